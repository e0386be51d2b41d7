use std::fmt;
use std::io::Write;
use std::str::FromStr;

use crate::domain::{parse_domain, ProblemInstance};
use crate::encoder::{EncodeError, EncodingConfig, MutexMode, PlanKind, QuantMode};
use crate::solver::SolverConfig;

use super::{evaluate, gen_blocks, gen_rooms, BenchRecord};

pub const SUITES: &[&str] = &["rooms", "blocks3", "blocks4", "example43", "paper-fixtures"];

const TWO_BLOCKS: &str = include_str!("../../fixtures/two_blocks.dom");
const FOOD_TRIP: &str = include_str!("../../fixtures/food_trip.dom");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// Sequence plans for 5, 13 and 20 rooms, one step short of and at the
    /// minimal horizon.
    Rooms,
    /// The 3-block rows of the runtime table.
    Blocks3,
    /// The 4-block sequence and phased rows of the runtime table.
    Blocks4,
    /// Bob's dinner: phased up to 3 states and horizon 6, automaton up to
    /// 3 states and horizon 4.
    Example43,
    /// The hand-written 2-block instance and the generated one, in both
    /// quantification modes.
    PaperFixtures,
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let i = *self as usize;
        f.write_str(SUITES[i])
    }
}

impl FromStr for Suite {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rooms" => Ok(Suite::Rooms),
            "blocks3" => Ok(Suite::Blocks3),
            "blocks4" => Ok(Suite::Blocks4),
            "example43" => Ok(Suite::Example43),
            "paper-fixtures" => Ok(Suite::PaperFixtures),
            _ => Err(format!("unknown suite `{s}` (expected one of {})", SUITES.join(", "))),
        }
    }
}

/// One solver call of a suite.
#[derive(Debug, Clone)]
pub struct BenchPoint {
    pub label: String,
    pub instance: ProblemInstance,
    pub config: EncodingConfig,
}

fn instance(text: &str) -> ProblemInstance {
    parse_domain(text).expect("built-in domains parse")
}

fn blocks(n: usize) -> ProblemInstance {
    instance(&gen_blocks(n).expect("supported block count"))
}

fn blocks_config(kind: PlanKind, t: usize, s: usize) -> EncodingConfig {
    EncodingConfig::new(kind, t, s).with_mutex(MutexMode::DependentPairs).with_invariants(true)
}

impl Suite {
    pub fn points(self) -> Vec<BenchPoint> {
        let point = |label: &str, instance: &ProblemInstance, config: EncodingConfig| BenchPoint {
            label: label.to_string(),
            instance: instance.clone(),
            config,
        };
        match self {
            Suite::Rooms => [5, 13, 20]
                .into_iter()
                .flat_map(|n| {
                    let inst = instance(&gen_rooms(n).expect("n >= 2"));
                    let label = format!("rooms{n}");
                    [n - 2, n - 1].map(|t| point(&label, &inst, EncodingConfig::sequence(t)))
                })
                .collect(),
            Suite::Blocks3 => {
                let inst = blocks(3);
                let rows = [
                    (PlanKind::Automaton, 5, 3),
                    (PlanKind::Automaton, 5, 4),
                    (PlanKind::Automaton, 4, 4),
                    (PlanKind::Phased, 4, 3),
                    (PlanKind::Phased, 5, 2),
                    (PlanKind::Phased, 5, 3),
                    (PlanKind::Sequence, 4, 1),
                    (PlanKind::Sequence, 5, 1),
                ];
                rows.into_iter().map(|(k, t, s)| point("blocks3", &inst, blocks_config(k, t, s))).collect()
            }
            Suite::Blocks4 => {
                let inst = blocks(4);
                let rows = [
                    (PlanKind::Sequence, 6, 1),
                    (PlanKind::Sequence, 7, 1),
                    (PlanKind::Phased, 6, 3),
                    (PlanKind::Phased, 7, 2),
                    (PlanKind::Phased, 7, 3),
                ];
                rows.into_iter().map(|(k, t, s)| point("blocks4", &inst, blocks_config(k, t, s))).collect()
            }
            Suite::Example43 => {
                let inst = instance(FOOD_TRIP);
                let phased = (1..=3).flat_map(|s| (1..=6).map(move |t| (PlanKind::Phased, t, s)));
                let automaton = (1..=3).flat_map(|s| (1..=4).map(move |t| (PlanKind::Automaton, t, s)));
                phased
                    .chain(automaton)
                    .map(|(k, t, s)| point("example43", &inst, EncodingConfig::new(k, t, s)))
                    .collect()
            }
            Suite::PaperFixtures => {
                let mut out = Vec::new();
                for (name, inst) in [("two-blocks", instance(TWO_BLOCKS)), ("blocks2", blocks(2))] {
                    for q in [QuantMode::Aux, QuantMode::Direct] {
                        for t in 1..=2 {
                            out.push(point(&format!("{name}-{q}"), &inst, EncodingConfig::sequence(t).with_quant(q)));
                        }
                    }
                }
                out
            }
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Runs every point of `suite` in order, writing one CSV record per solver
/// call as soon as it finishes.
pub fn run_benchmark<W: Write>(suite: Suite, solver: &SolverConfig, out: W) -> Result<Vec<BenchRecord>, BenchError> {
    let mut w = csv::Writer::from_writer(out);
    let mut records = Vec::new();
    for p in suite.points() {
        let rec = evaluate(&p.instance, &p.label, &p.config, solver)?.record;
        w.serialize(&rec)?;
        w.flush()?;
        records.push(rec);
    }
    Ok(records)
}

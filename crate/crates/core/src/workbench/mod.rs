//! Benchmark generators, iterative plan search and the statistics harness.

mod bench;
mod gen;

use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::domain::ProblemInstance;
use crate::encoder::{assemble, EncodeError, EncodedProblem, EncodingConfig, PlanKind};
use crate::plan::{extract_plan, verify_plan, Plan, PlanError, VerificationReport, VerifyOptions};
use crate::solver::{solve, Outcome, SolverConfig, SolverResult};

pub use bench::{run_benchmark, BenchError, BenchPoint, Suite, SUITES};
pub use gen::{block_configurations, gen_blocks, gen_rooms, MAX_BLOCKS};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error(transparent)]
    Plan(#[from] PlanError),
    /// A true formula decoded to a plan that fails simulation. This is a bug
    /// in the encoder, solver or executor, never an expected outcome.
    #[error("plan from the true formula at t_max={t_max}, states={n_states} fails verification ({failures} failing scenarios)")]
    Unsound { t_max: usize, n_states: usize, failures: usize },
}

#[derive(Debug, Clone)]
pub struct SearchLimits {
    pub max_t_max: usize,
    /// Ignored for sequence plans.
    pub max_states: usize,
    pub time_cap: Option<Duration>,
    pub node_cap: Option<u64>,
    /// Scenario cap handed to the verifier.
    pub verify_cap: usize,
    /// Evaluate independent parameter points in parallel batches.
    pub concurrent: bool,
}

impl Default for SearchLimits {
    fn default() -> Self {
        SearchLimits {
            max_t_max: 10,
            max_states: 4,
            time_cap: None,
            node_cap: None,
            verify_cap: 1 << 20,
            concurrent: false,
        }
    }
}

/// One solver call.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRecord {
    pub encoding: String,
    pub params: String,
    #[serde(rename = "tmax")]
    pub t_max: usize,
    /// Empty for sequence plans.
    #[serde(rename = "states")]
    pub n_states: Option<usize>,
    pub clauses: usize,
    pub vars: usize,
    pub ms: u128,
    pub nodes: u64,
    pub value: String,
}

impl BenchRecord {
    pub fn outcome(&self) -> Option<bool> {
        match self.value.as_str() {
            "true" => Some(true),
            "false" => Some(false),
            _ => None,
        }
    }
}

/// A solved parameter point.
#[derive(Debug)]
pub struct Evaluation {
    pub encoded: EncodedProblem,
    pub result: SolverResult,
    pub record: BenchRecord,
}

/// Encodes and solves one parameter point.
pub fn evaluate(
    inst: &ProblemInstance,
    label: &str,
    cfg: &EncodingConfig,
    solver: &SolverConfig,
) -> Result<Evaluation, EncodeError> {
    let start = Instant::now();
    let encoded = assemble(inst, cfg)?;
    let result = solve(&encoded.qbf, solver);
    let record = BenchRecord {
        encoding: cfg.plan_kind.to_string(),
        params: label.to_string(),
        t_max: cfg.t_max,
        n_states: (cfg.plan_kind != PlanKind::Sequence).then_some(cfg.n_states),
        clauses: encoded.num_clauses(),
        vars: encoded.num_vars(),
        ms: start.elapsed().as_millis(),
        nodes: result.stats.nodes,
        value: result.outcome.to_string(),
    };
    Ok(Evaluation { encoded, result, record })
}

/// Parameter points in search order: horizons `1..=max_t_max` for
/// sequence plans; otherwise ascending `t_max + n_states`, smaller `t_max`
/// first on ties.
pub fn search_order(kind: PlanKind, limits: &SearchLimits) -> Vec<(usize, usize)> {
    if kind == PlanKind::Sequence {
        return (1..=limits.max_t_max).map(|t| (t, 1)).collect();
    }
    let mut points: Vec<(usize, usize)> = (1..=limits.max_t_max)
        .flat_map(|t| (1..=limits.max_states).map(move |s| (t, s)))
        .collect();
    points.sort_by_key(|&(t, s)| (t + s, t));
    points
}

#[derive(Debug, Clone)]
pub struct FoundPlan {
    pub plan: Plan,
    pub t_max: usize,
    pub n_states: usize,
    pub verification: VerificationReport,
}

#[derive(Debug, Clone)]
pub struct SearchReport {
    pub records: Vec<BenchRecord>,
    pub found: Option<FoundPlan>,
}

impl SearchReport {
    /// Some call ran into a cap, so "no plan" is not conclusive.
    pub fn inconclusive(&self) -> bool {
        self.found.is_none() && self.records.iter().any(|r| r.outcome().is_none())
    }
}

/// Searches parameter points in [`search_order`] until a formula is true,
/// then decodes and verifies the plan. `base` supplies everything except
/// `t_max` and `n_states`.
pub fn plan_search(
    inst: &ProblemInstance,
    label: &str,
    base: &EncodingConfig,
    solver: &SolverConfig,
    limits: &SearchLimits,
) -> Result<SearchReport, SearchError> {
    let solver = SolverConfig {
        time_cap: limits.time_cap.or(solver.time_cap),
        node_cap: limits.node_cap.or(solver.node_cap),
        ..solver.clone()
    };
    let points = search_order(base.plan_kind, limits);
    let batch = if limits.concurrent { rayon::current_num_threads().max(1) } else { 1 };
    let mut records = Vec::new();
    for chunk in points.chunks(batch) {
        let evals: Vec<Result<Evaluation, EncodeError>> = chunk
            .par_iter()
            .map(|&(t, s)| {
                let cfg = EncodingConfig { t_max: t, n_states: s, ..base.clone() };
                evaluate(inst, label, &cfg, &solver)
            })
            .collect();
        for eval in evals {
            let eval = eval?;
            records.push(eval.record.clone());
            if eval.result.outcome != Outcome::True {
                continue;
            }
            let cfg = &eval.encoded.config;
            let witness = eval.result.witness.as_deref().unwrap_or(&[]);
            let plan = extract_plan(&eval.encoded, witness)?;
            let verification = verify_plan(&plan, inst, cfg.t_max, &VerifyOptions::with_cap(limits.verify_cap).with_mutex(cfg.mutex_mode))?;
            if !verification.verified() {
                return Err(SearchError::Unsound {
                    t_max: cfg.t_max,
                    n_states: cfg.n_states,
                    failures: verification.failure_count,
                });
            }
            let found = FoundPlan { plan, t_max: cfg.t_max, n_states: cfg.n_states, verification };
            return Ok(SearchReport { records, found: Some(found) });
        }
    }
    Ok(SearchReport { records, found: None })
}

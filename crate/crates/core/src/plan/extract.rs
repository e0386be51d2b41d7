use std::collections::{BTreeSet, HashMap};

use crate::domain::FactId;
use crate::encoder::{EncodedProblem, PlanKind};
use crate::logic::{Lit, VarIdentity};

use super::{AutomatonPlan, PhasedPlan, Plan, PlanError, SequencePlan};

/// Reads the plan off the outermost existential assignment. Plan variables
/// missing from the witness count as false.
pub fn extract_plan(e: &EncodedProblem, witness: &[Lit]) -> Result<Plan, PlanError> {
    let atlas = e.qbf.atlas();
    let mut value: HashMap<VarIdentity, bool> = HashMap::new();
    for l in witness {
        let id = atlas
            .identity(l.var())
            .ok_or_else(|| PlanError::MalformedWitness(format!("unknown variable {}", l.var().0)))?;
        if value.insert(*id, l.is_positive()).is_some_and(|prev| prev != l.is_positive()) {
            return Err(PlanError::MalformedWitness(format!("{id} assigned both ways")));
        }
    }
    let get = |id: VarIdentity| value.get(&id).copied().unwrap_or(false);
    let inst = &e.instance;
    let ops = 0..inst.operators.len();
    let cfg = &e.config;
    let enabled_sets = |slots: std::ops::Range<usize>| -> Vec<BTreeSet<usize>> {
        slots
            .map(|slot| ops.clone().filter(|&op| get(VarIdentity::Enabled { op, slot })).collect())
            .collect()
    };
    Ok(match cfg.plan_kind {
        PlanKind::Sequence => Plan::Sequence(SequencePlan { enabled: enabled_sets(0..cfg.t_max) }),
        PlanKind::Phased => Plan::Phased(PhasedPlan { enabled: enabled_sets(1..cfg.n_states + 1) }),
        PlanKind::Automaton => {
            let n = cfg.n_states;
            let exactly_one = |what: &str, s: usize, hits: Vec<usize>| -> Result<usize, PlanError> {
                match hits[..] {
                    [x] => Ok(x),
                    _ => Err(PlanError::MalformedWitness(format!(
                        "state {s} has {} {what} values set",
                        hits.len()
                    ))),
                }
            };
            let mut condition = Vec::with_capacity(n);
            let mut succ_true = Vec::with_capacity(n);
            let mut succ_false = Vec::with_capacity(n);
            for s in 1..=n {
                let conds = inst
                    .observables()
                    .into_iter()
                    .filter(|b| get(VarIdentity::Cond { state: s, fact: b.0 }))
                    .map(|b| b.0)
                    .collect();
                condition.push(FactId(exactly_one("condition", s, conds)?));
                let st = (1..=n).filter(|&to| get(VarIdentity::SuccT { from: s, to })).collect();
                succ_true.push(exactly_one("true-successor", s, st)?);
                let sf = (1..=n).filter(|&to| get(VarIdentity::SuccF { from: s, to })).collect();
                succ_false.push(exactly_one("false-successor", s, sf)?);
            }
            Plan::Automaton(AutomatonPlan { condition, succ_true, succ_false, enabled: enabled_sets(1..n + 1) })
        }
    })
}

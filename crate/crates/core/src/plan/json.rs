use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::domain::ProblemInstance;
use crate::encoder::PlanKind;

use super::{AutomatonPlan, PhasedPlan, Plan, PlanError, SequencePlan};

/// On-disk plan shape; operators and facts go by name.
#[derive(Debug, Serialize, Deserialize)]
struct PlanJson {
    kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    tmax: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    states: Option<usize>,
    enabled: Vec<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    condition: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    succ_true: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    succ_false: Option<Vec<usize>>,
}

impl Plan {
    /// Serializes with operator and fact names. `t_max` is recorded for
    /// every kind; only sequence plans depend on it.
    pub fn to_json(&self, inst: &ProblemInstance, t_max: usize) -> String {
        let names = |sets: &[BTreeSet<usize>]| -> Vec<Vec<String>> {
            sets.iter().map(|s| s.iter().map(|&i| inst.operators[i].name.clone()).collect()).collect()
        };
        let mut j = PlanJson {
            kind: self.kind().to_string(),
            tmax: Some(t_max),
            states: None,
            enabled: vec![],
            condition: None,
            succ_true: None,
            succ_false: None,
        };
        match self {
            Plan::Sequence(p) => j.enabled = names(&p.enabled),
            Plan::Phased(p) => {
                j.states = Some(p.n_states());
                j.enabled = names(&p.enabled);
            }
            Plan::Automaton(p) => {
                j.states = Some(p.n_states());
                j.enabled = names(&p.enabled);
                j.condition = Some(p.condition.iter().map(|&f| inst.fact_name(f).to_string()).collect());
                j.succ_true = Some(p.succ_true.clone());
                j.succ_false = Some(p.succ_false.clone());
            }
        }
        serde_json::to_string_pretty(&j).expect("plan JSON serializes")
    }

    /// Parses a plan, returning it with its recorded horizon, if any.
    pub fn from_json(text: &str, inst: &ProblemInstance) -> Result<(Plan, Option<usize>), PlanError> {
        let j: PlanJson = serde_json::from_str(text).map_err(|e| PlanError::Json(e.to_string()))?;
        let kind: PlanKind = j.kind.parse().map_err(PlanError::Json)?;
        let enabled = j
            .enabled
            .iter()
            .map(|names| {
                names
                    .iter()
                    .map(|n| inst.operator(n).map(|o| o.0).ok_or_else(|| PlanError::UnknownOperator(n.clone())))
                    .collect::<Result<BTreeSet<usize>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        let check_states = |n: usize| -> Result<(), PlanError> {
            match j.states {
                Some(s) if s != n => Err(PlanError::Json(format!("`states` is {s} but {n} enabled lists given"))),
                _ => Ok(()),
            }
        };
        let plan = match kind {
            PlanKind::Sequence => {
                if let Some(t) = j.tmax {
                    if t != enabled.len() {
                        return Err(PlanError::Json(format!("`tmax` is {t} but {} enabled lists given", enabled.len())));
                    }
                }
                Plan::Sequence(SequencePlan { enabled })
            }
            PlanKind::Phased => {
                check_states(enabled.len())?;
                Plan::Phased(PhasedPlan { enabled })
            }
            PlanKind::Automaton => {
                let n = enabled.len();
                check_states(n)?;
                let missing = |f: &str| PlanError::Json(format!("automaton plan without `{f}`"));
                let condition = j
                    .condition
                    .as_ref()
                    .ok_or_else(|| missing("condition"))?
                    .iter()
                    .map(|c| inst.fact(c).ok_or_else(|| PlanError::UnknownFact(c.clone())))
                    .collect::<Result<Vec<_>, _>>()?;
                let succ_true = j.succ_true.clone().ok_or_else(|| missing("succ_true"))?;
                let succ_false = j.succ_false.clone().ok_or_else(|| missing("succ_false"))?;
                if condition.len() != n || succ_true.len() != n || succ_false.len() != n {
                    return Err(PlanError::Json("automaton tables differ in length".into()));
                }
                if succ_true.iter().chain(&succ_false).any(|&s| s == 0 || s > n) {
                    return Err(PlanError::Json("successor states are 1-based and at most `states`".into()));
                }
                Plan::Automaton(AutomatonPlan { condition, succ_true, succ_false, enabled })
            }
        };
        Ok((plan, j.tmax))
    }
}

//! Plans decoded from witnesses, their execution and verification.

mod execute;
mod extract;
mod json;
mod verify;

use std::collections::BTreeSet;

use thiserror::Error;

use crate::domain::{FactId, FactValuation};

pub use execute::{execute, execute_automaton, execute_phased, execute_sequence, trace_literals, ChoiceSeq};
pub use extract::extract_plan;
pub use verify::{verify_plan, Failure, FailureReason, VerificationReport, VerifyOptions};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PlanError {
    #[error("malformed witness: {0}")]
    MalformedWitness(String),
    #[error("effect conflict at time {t} on fact `{fact}`")]
    EffectConflict { t: usize, fact: String },
    #[error("operators `{first}` and `{second}` fire together at time {t}")]
    Interference { t: usize, first: String, second: String },
    #[error("plan JSON: {0}")]
    Json(String),
    #[error("unknown operator `{0}`")]
    UnknownOperator(String),
    #[error("unknown fact `{0}`")]
    UnknownFact(String),
    #[error("plan does not fit the instance: {0}")]
    Shape(String),
}

/// One enabled operator set per time point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SequencePlan {
    pub enabled: Vec<BTreeSet<usize>>,
}

impl SequencePlan {
    pub fn t_max(&self) -> usize {
        self.enabled.len()
    }
}

/// Phases visited in order; `enabled[i]` belongs to phase `i + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PhasedPlan {
    pub enabled: Vec<BTreeSet<usize>>,
}

impl PhasedPlan {
    pub fn n_states(&self) -> usize {
        self.enabled.len()
    }
}

/// Finite-state controller. Index `i` describes state `i + 1`; successor
/// entries are 1-based states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AutomatonPlan {
    pub condition: Vec<FactId>,
    pub succ_true: Vec<usize>,
    pub succ_false: Vec<usize>,
    pub enabled: Vec<BTreeSet<usize>>,
}

impl AutomatonPlan {
    pub fn n_states(&self) -> usize {
        self.enabled.len()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Plan {
    Automaton(AutomatonPlan),
    Phased(PhasedPlan),
    Sequence(SequencePlan),
}

impl Plan {
    pub fn kind(&self) -> crate::encoder::PlanKind {
        use crate::encoder::PlanKind;
        match self {
            Plan::Automaton(_) => PlanKind::Automaton,
            Plan::Phased(_) => PlanKind::Phased,
            Plan::Sequence(_) => PlanKind::Sequence,
        }
    }
}

/// One time point of an execution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceStep {
    pub valuation: FactValuation,
    /// 1-based plan state; for sequence plans the time point plus one.
    pub state: usize,
    /// Operators fired at this time (empty at the last time point).
    pub fired: Vec<usize>,
    /// Rules fired at this time with the chosen alternative.
    pub rules: Vec<(usize, usize)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExecutionTrace {
    pub steps: Vec<TraceStep>,
}

impl ExecutionTrace {
    pub fn last(&self) -> &FactValuation {
        &self.steps.last().expect("a trace has at least one step").valuation
    }

    pub fn states(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.state).collect()
    }

    /// `t=<k> state=<s> fired=[...] facts={...}` per time point.
    pub fn dump(&self, inst: &crate::domain::ProblemInstance) -> String {
        let mut out = String::new();
        for (t, s) in self.steps.iter().enumerate() {
            let fired: Vec<&str> = s.fired.iter().map(|&i| inst.operators[i].name.as_str()).collect();
            out.push_str(&format!(
                "t={t} state={} fired=[{}] facts={}\n",
                s.state,
                fired.join(","),
                s.valuation.render(inst)
            ));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_domain;
    use crate::encoder::{assemble, EncodingConfig, MutexMode, PlanKind, QuantMode};
    use crate::logic::Lit;
    use crate::solver::{solve, Outcome, SolverConfig};

    fn two_blocks() -> crate::domain::ProblemInstance {
        parse_domain(include_str!("../../fixtures/two_blocks.dom")).unwrap()
    }

    fn food_trip() -> crate::domain::ProblemInstance {
        parse_domain(include_str!("../../fixtures/food_trip.dom")).unwrap()
    }

    fn seq(sets: &[&[usize]]) -> Plan {
        Plan::Sequence(SequencePlan { enabled: sets.iter().map(|s| s.iter().copied().collect()).collect() })
    }

    #[test]
    fn literal_two_block_plan_verifies() {
        let inst = two_blocks();
        let r = verify_plan(&seq(&[&[1], &[2]]), &inst, 2, &VerifyOptions::with_cap(1000)).unwrap();
        assert!(r.verified() && r.exhaustive);
        assert_eq!(r.scenarios, 3);
    }

    #[test]
    fn dropping_the_second_step_fails_from_b_on_a() {
        let inst = two_blocks();
        let r = verify_plan(&seq(&[&[1], &[]]), &inst, 2, &VerifyOptions::with_cap(1000)).unwrap();
        assert!(!r.verified());
        let b_on_a = inst.valuation_from_true_facts(&["onBA", "clearB", "ontableA"]);
        assert!(r.failures.iter().any(|f| f.initial == b_on_a && f.reason == FailureReason::GoalNotReached));
    }

    #[test]
    fn witness_decodes_to_a_verified_plan() {
        let inst = two_blocks();
        for quant in [QuantMode::Aux, QuantMode::Direct] {
            let e = assemble(&inst, &EncodingConfig::sequence(2).with_quant(quant)).unwrap();
            let r = solve(&e.qbf, &SolverConfig::default());
            assert_eq!(r.outcome, Outcome::True);
            let plan = extract_plan(&e, r.witness.as_ref().unwrap()).unwrap();
            assert!(verify_plan(&plan, &inst, 2, &VerifyOptions::with_cap(1000)).unwrap().verified(), "{quant:?}");
        }
    }

    #[test]
    fn literal_witness_extracts_to_the_literal_plan() {
        use crate::logic::VarIdentity;
        let inst = two_blocks();
        let e = assemble(&inst, &EncodingConfig::sequence(2)).unwrap();
        let witness: Vec<Lit> = e
            .plan_vars
            .iter()
            .map(|&v| {
                let on = matches!(
                    e.qbf.atlas().identity(v),
                    Some(VarIdentity::Enabled { op: 1, slot: 0 } | VarIdentity::Enabled { op: 2, slot: 1 })
                );
                v.lit(on)
            })
            .collect();
        assert_eq!(extract_plan(&e, &witness).unwrap(), seq(&[&[1], &[2]]));
    }

    #[test]
    fn automaton_witness_must_pick_one_condition() {
        let inst = food_trip();
        let e = assemble(&inst, &EncodingConfig::new(PlanKind::Automaton, 2, 2)).unwrap();
        let none: Vec<Lit> = e.plan_vars.iter().map(|v| v.lit(false)).collect();
        assert!(matches!(extract_plan(&e, &none), Err(PlanError::MalformedWitness(_))));
    }

    #[test]
    fn automaton_plan_for_food_trip() {
        // state 1 flies by the food condition, states 2/3 eat
        let inst = food_trip();
        let op = |n: &str| inst.operator(n).unwrap().0;
        let plan = Plan::Automaton(AutomatonPlan {
            condition: vec![inst.fact("food-in-Kyoto").unwrap(); 3],
            succ_true: vec![2, 2, 3],
            succ_false: vec![3, 2, 3],
            enabled: vec![
                BTreeSet::new(),
                [op("fly-to-kyoto"), op("eat-in-kyoto")].into(),
                [op("fly-to-paris"), op("eat-in-paris")].into(),
            ],
        });
        assert!(verify_plan(&plan, &inst, 3, &VerifyOptions::with_cap(100)).unwrap().verified());
        assert!(!verify_plan(&plan, &inst, 2, &VerifyOptions::with_cap(100)).unwrap().verified());
    }

    #[test]
    fn phased_plan_advances_when_nothing_is_applicable() {
        let inst = two_blocks();
        // phase 1 unstacks, phase 2 stacks A on B
        let plan = Plan::Phased(PhasedPlan { enabled: vec![[0, 1].into(), [2].into()] });
        let init = inst.valuation_from_true_facts(&["onBA", "clearB", "ontableA"]);
        let trace = execute(&plan, &inst, &init, 3, &vec![], MutexMode::DependentPairs).unwrap();
        assert_eq!(trace.states(), vec![1, 2, 2, 2]);
        assert!(trace.last().satisfies(&inst.goal));
        assert!(verify_plan(&plan, &inst, 2, &VerifyOptions::with_cap(100)).unwrap().verified());
    }

    #[test]
    fn opposite_effects_are_a_conflict() {
        let text = "fact p q\noperator a pre q post p\nrule r pre q eff -p eff -p -q\ninit (and q (not p))\ngoal p\n";
        let inst = parse_domain(text).unwrap();
        let plan = seq(&[&[0]]);
        let init = inst.valuation_from_true_facts(&["q"]);
        let run = execute(&plan, &inst, &init, 1, &vec![], MutexMode::DependentPairs);
        assert!(matches!(run, Err(PlanError::EffectConflict { t: 0, .. })));
        let r = verify_plan(&plan, &inst, 1, &VerifyOptions::with_cap(10)).unwrap();
        assert_eq!(r.failure_count, 2);
        assert!(matches!(r.failures[0].reason, FailureReason::EffectConflict { .. }));
    }

    #[test]
    fn mutex_mode_decides_which_operators_may_fire_together() {
        let text = "fact p q r\noperator a pre r post p\noperator b pre r post q\ninit r\ngoal (and p q)\n";
        let inst = parse_domain(text).unwrap();
        let plan = seq(&[&[0, 1]]);
        let dep = verify_plan(&plan, &inst, 1, &VerifyOptions::with_cap(10)).unwrap();
        assert!(dep.verified());
        let all = VerifyOptions::with_cap(10).with_mutex(MutexMode::AllPairs);
        let r = verify_plan(&plan, &inst, 1, &all).unwrap();
        assert!(matches!(r.failures[0].reason, FailureReason::Interference { t: 0, .. }));
    }

    #[test]
    fn rule_alternatives_follow_the_choice_sequence() {
        let text = "fact p q\nrule coin pre q eff p eff -p\ninit (and q (not p))\ngoal p\n";
        let inst = parse_domain(text).unwrap();
        let plan = seq(&[&[]]);
        let init = inst.valuation_from_true_facts(&["q"]);
        assert!(execute(&plan, &inst, &init, 1, &vec![vec![0]], MutexMode::DependentPairs).unwrap().last().satisfies(&inst.goal));
        assert!(!execute(&plan, &inst, &init, 1, &vec![vec![1]], MutexMode::DependentPairs).unwrap().last().satisfies(&inst.goal));
        let r = verify_plan(&plan, &inst, 1, &VerifyOptions::with_cap(10)).unwrap();
        assert_eq!((r.scenarios, r.failure_count), (2, 1));
    }

    #[test]
    fn sampling_kicks_in_above_the_cap() {
        let inst = two_blocks();
        let r = verify_plan(&seq(&[&[1], &[2]]), &inst, 2, &VerifyOptions { scenario_cap: 2, seed: 7, ..VerifyOptions::default() }).unwrap();
        assert!(!r.exhaustive);
        assert_eq!(r.scenarios, 2);
        assert!(r.verified());
    }

    #[test]
    fn json_round_trip() {
        let inst = food_trip();
        let plan = Plan::Automaton(AutomatonPlan {
            condition: vec![inst.fact("food-in-Paris").unwrap(); 2],
            succ_true: vec![2, 1],
            succ_false: vec![1, 2],
            enabled: vec![[0].into(), [1, 3].into()],
        });
        let text = plan.to_json(&inst, 4);
        assert!(text.contains("\"fly-to-paris\""));
        assert_eq!(Plan::from_json(&text, &inst).unwrap(), (plan, Some(4)));
        let s = seq(&[&[1], &[]]);
        assert_eq!(Plan::from_json(&s.to_json(&inst, 2), &inst).unwrap().0, s);
    }

    #[test]
    fn json_rejects_unknown_names_and_bad_successors() {
        let inst = food_trip();
        let bad_op = r#"{"kind":"sequence","tmax":1,"enabled":[["swim"]]}"#;
        assert_eq!(Plan::from_json(bad_op, &inst).unwrap_err(), PlanError::UnknownOperator("swim".into()));
        let bad_succ = r#"{"kind":"automaton","states":1,"enabled":[[]],"condition":["food-in-Paris"],"succ_true":[2],"succ_false":[1]}"#;
        assert!(matches!(Plan::from_json(bad_succ, &inst), Err(PlanError::Json(_))));
        assert!(matches!(Plan::from_json("{", &inst), Err(PlanError::Json(_))));
    }

    #[test]
    fn trace_dump_format() {
        let inst = two_blocks();
        let init = inst.valuation_from_true_facts(&["onBA", "clearB", "ontableA"]);
        let trace = execute(&seq(&[&[1], &[2]]), &inst, &init, 2, &vec![], MutexMode::DependentPairs).unwrap();
        let dump = trace.dump(&inst);
        let first = dump.lines().next().unwrap();
        assert!(first.starts_with("t=0 state=1 fired=[unstack-b-a] facts={ontableB:0,onBA:1,"), "{first}");
        assert_eq!(dump.lines().count(), 3);
    }

    fn consistent(e: &crate::encoder::EncodedProblem, plan: &Plan, init: &crate::domain::FactValuation) -> bool {
        let trace = execute(plan, &e.instance, init, e.config.t_max, &vec![], e.config.mutex_mode).unwrap();
        let fixed = trace_literals(e, plan, &trace, &vec![]);
        solve(&e.qbf.assume(&fixed), &SolverConfig::default()).outcome == Outcome::True
    }

    #[test]
    fn traces_satisfy_the_encoding_exactly_when_the_goal_holds() {
        let inst = food_trip();
        let plan = Plan::Automaton(AutomatonPlan {
            condition: vec![inst.fact("food-in-Kyoto").unwrap(); 3],
            succ_true: vec![2, 2, 3],
            succ_false: vec![3, 2, 3],
            enabled: vec![BTreeSet::new(), [0, 2].into(), [1, 3].into()],
        });
        for t in [2, 3] {
            let e = assemble(&inst, &EncodingConfig::new(PlanKind::Automaton, t, 3)).unwrap();
            for init in inst.enumerate_initial_states(10).unwrap() {
                assert_eq!(consistent(&e, &plan, &init), t == 3);
            }
        }
        let inst = two_blocks();
        let plan = Plan::Phased(PhasedPlan { enabled: vec![[0, 1].into(), [2].into()] });
        let e = assemble(&inst, &EncodingConfig::new(PlanKind::Phased, 2, 2)).unwrap();
        for init in inst.enumerate_initial_states(10).unwrap() {
            assert!(consistent(&e, &plan, &init));
        }
    }
}

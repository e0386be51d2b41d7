mod common;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use proptest::collection::{btree_map, btree_set, vec};
use proptest::prelude::*;
use proptest::sample::select;

use qplan_core::encoder::{assemble, EncodingConfig, MutexMode, PlanKind, QuantMode};
use qplan_core::invariants::synthesize_invariants;
use qplan_core::logic::{clausify, qdimacs, to_padded_dnf, Formula, QbfProblem, QuantBlock, Quantifier, VarId, VariableAtlas};
use qplan_core::plan::{
    execute, extract_plan, trace_literals, verify_plan, AutomatonPlan, PhasedPlan, Plan, PlanError,
    SequencePlan, VerifyOptions,
};
use qplan_core::solver::{expand_eval, solve, Outcome, SolverConfig};
use qplan_core::{parse_domain, FactId, ProblemInstance};

type Lits = BTreeMap<usize, bool>;

/// A small random domain over facts `f0..`, all observable.
#[derive(Debug, Clone)]
struct RandomDomain {
    facts: usize,
    ops: Vec<(Lits, Vec<Lits>)>,
    rules: Vec<(Lits, Vec<Lits>)>,
    init: Vec<Lits>,
    goal: Lits,
}

impl RandomDomain {
    fn text(&self) -> String {
        let lits = |m: &Lits| -> String {
            m.iter().map(|(&f, &p)| format!(" {}f{f}", if p { "" } else { "-" })).collect()
        };
        let conj = |m: &Lits| -> String {
            let parts: Vec<String> =
                m.iter().map(|(&f, &p)| if p { format!("f{f}") } else { format!("(not f{f})") }).collect();
            format!("(and {})", parts.join(" "))
        };
        let names: Vec<String> = (0..self.facts).map(|i| format!("f{i}")).collect();
        let mut s = format!("fact {}\nobservable {}\n", names.join(" "), names.join(" "));
        for (i, (pre, effs)) in self.ops.iter().enumerate() {
            write!(s, "operator o{i} pre{}", lits(pre)).unwrap();
            if effs.len() == 1 {
                write!(s, " post{}", lits(&effs[0])).unwrap();
            } else {
                for e in effs {
                    write!(s, " eff{}", lits(e)).unwrap();
                }
            }
            s.push('\n');
        }
        for (i, (pre, effs)) in self.rules.iter().enumerate() {
            write!(s, "rule r{i} pre{}", lits(pre)).unwrap();
            for e in effs {
                write!(s, " eff{}", lits(e)).unwrap();
            }
            s.push('\n');
        }
        let terms: Vec<String> = self.init.iter().map(conj).collect();
        writeln!(s, "init (or {})\ngoal {}", terms.join(" "), conj(&self.goal)).unwrap();
        s
    }

    fn instance(&self) -> ProblemInstance {
        parse_domain(&self.text()).expect("generated domains parse")
    }
}

fn random_domain() -> impl Strategy<Value = RandomDomain> {
    (2usize..=4).prop_flat_map(|n| {
        let lits = move |lo: usize, hi: usize| btree_map(0..n, any::<bool>(), lo..=hi);
        let op = (lits(0, 2), vec(lits(1, 2), 1..=2));
        let rule = (lits(1, 2), vec(lits(1, 1), 2..=2));
        (Just(n), vec(op, 1..=4), vec(rule, 0..=1), vec(lits(1, n), 1..=2), lits(1, 2))
            .prop_map(|(facts, ops, rules, init, goal)| RandomDomain { facts, ops, rules, init, goal })
    })
}

fn deterministic_domain() -> impl Strategy<Value = RandomDomain> {
    random_domain().prop_map(|mut d| {
        d.rules.clear();
        for (_, effs) in &mut d.ops {
            effs.truncate(1);
        }
        d
    })
}

/// A plan of the given kind over `ops` operators, built from raw enabled sets.
fn random_plan(ops: usize, facts: usize) -> impl Strategy<Value = (Plan, usize)> {
    let sets = move |n: usize| vec(btree_set(0..ops, 0..=ops.min(2)), n..=n);
    (select(vec![PlanKind::Automaton, PlanKind::Phased, PlanKind::Sequence]), 1usize..=3, 1usize..=2).prop_flat_map(
        move |(kind, t_max, n)| {
            let plan = match kind {
                PlanKind::Sequence => sets(t_max).prop_map(|enabled| Plan::Sequence(SequencePlan { enabled })).boxed(),
                PlanKind::Phased => sets(n).prop_map(|enabled| Plan::Phased(PhasedPlan { enabled })).boxed(),
                PlanKind::Automaton => (sets(n), vec(0..facts, n..=n), vec(1..=n, n..=n), vec(1..=n, n..=n))
                    .prop_map(|(enabled, cond, succ_true, succ_false)| {
                        Plan::Automaton(AutomatonPlan {
                            condition: cond.into_iter().map(FactId).collect(),
                            succ_true,
                            succ_false,
                            enabled,
                        })
                    })
                    .boxed(),
            };
            (plan, Just(t_max))
        },
    )
}

fn mutex() -> impl Strategy<Value = MutexMode> {
    select(vec![MutexMode::AllPairs, MutexMode::DependentPairs])
}

fn formula(atoms: u32) -> impl Strategy<Value = Formula<VarId>> {
    let leaf = prop_oneof![
        (1..=atoms).prop_map(|v| Formula::atom(VarId(v))),
        Just(Formula::True),
        Just(Formula::False),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            inner.clone().prop_map(Formula::not),
            vec(inner.clone(), 0..=3).prop_map(Formula::and),
            vec(inner.clone(), 0..=3).prop_map(Formula::or),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::imp(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Formula::iff(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn clausified_formulae_are_equisatisfiable_per_assignment(f in formula(5)) {
        let mut atlas = VariableAtlas::new();
        for v in 1..=5 {
            atlas.var(qplan_core::logic::VarIdentity::FactAt { fact: v as usize, t: 0 });
        }
        let (clauses, aux) = clausify(&f, &mut atlas);
        prop_assume!(aux.len() <= 18);
        for bits in 0u32..32 {
            let value = |v: &VarId| bits >> (v.0 - 1) & 1 == 1;
            let fixed: Vec<_> = (1..=5).map(|v| VarId(v).lit(value(&VarId(v)))).collect();
            let q = QbfProblem::new(vec![QuantBlock::new(Quantifier::Exists, aux.clone())], clauses.clone(), VariableAtlas::new())
                .unwrap()
                .assume(&fixed);
            prop_assert_eq!(expand_eval(&q).unwrap(), f.holds(&value));
        }
    }

    #[test]
    fn padded_dnf_has_the_same_models(f in formula(5)) {
        let terms = to_padded_dnf(&f, 1 << 12).unwrap();
        let atoms = f.atoms();
        for bits in 0u32..32 {
            let value = |v: &VarId| bits >> (v.0 - 1) & 1 == 1;
            let hit = terms.iter().any(|t| t.iter().all(|(a, p)| value(a) == *p));
            prop_assert_eq!(hit, f.holds(&value));
        }
        for t in &terms {
            prop_assert_eq!(t.iter().map(|(a, _)| *a).collect::<BTreeSet<_>>(), atoms.clone());
        }
    }

    #[test]
    fn written_domains_parse_back(d in random_domain()) {
        let inst = d.instance();
        prop_assert_eq!(parse_domain(&inst.to_domain_text()).unwrap(), inst);
    }

    #[test]
    fn traces_only_change_facts_that_fired_effects_mention(
        (d, (plan, t_max)) in random_domain().prop_flat_map(|d| {
            let (ops, facts) = (d.ops.len(), d.facts);
            (Just(d), random_plan(ops, facts))
        }),
        mutex in mutex(),
        seed in any::<u64>(),
    ) {
        let inst = d.instance();
        let choices = common::all_choices(&inst, t_max);
        let c = &choices[seed as usize % choices.len()];
        for init in inst.enumerate_initial_states(64).unwrap() {
            let trace = match execute(&plan, &inst, &init, t_max, c, mutex) {
                Ok(tr) => tr,
                Err(PlanError::EffectConflict { .. } | PlanError::Interference { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            prop_assert_eq!(common::frame_violation(&inst, &trace), None);
        }
    }

    #[test]
    fn invariants_hold_in_every_reachable_state(d in random_domain()) {
        let inst = d.instance();
        let inv = synthesize_invariants(&inst, 64).unwrap();
        for s in common::reachable(&inst, 10_000).unwrap() {
            for c in &inv {
                prop_assert!(c.holds(&s), "{} fails in {}", c.render(&inst), s.render(&inst));
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn simulated_traces_satisfy_the_encoding_iff_the_goal_holds(
        (d, (plan, t_max)) in random_domain().prop_flat_map(|d| {
            let (ops, facts) = (d.ops.len(), d.facts);
            (Just(d), random_plan(ops, facts))
        }),
        mutex in mutex(),
        direct in any::<bool>(),
    ) {
        let inst = d.instance();
        let n_states = match &plan {
            Plan::Automaton(p) => p.n_states(),
            Plan::Phased(p) => p.n_states(),
            Plan::Sequence(_) => 1,
        };
        let quant = if direct { QuantMode::Direct } else { QuantMode::Aux };
        let cfg = EncodingConfig::new(plan.kind(), t_max, n_states).with_mutex(mutex).with_quant(quant);
        let e = assemble(&inst, &cfg).unwrap();
        for init in inst.enumerate_initial_states(64).unwrap() {
            for c in common::all_choices(&inst, t_max) {
                let trace = match execute(&plan, &inst, &init, t_max, &c, mutex) {
                    Ok(tr) => tr,
                    Err(PlanError::EffectConflict { .. } | PlanError::Interference { .. }) => continue,
                    Err(err) => panic!("{err}"),
                };
                let fixed = trace_literals(&e, &plan, &trace, &c);
                let r = solve(&e.qbf.assume(&fixed), &SolverConfig::default());
                prop_assert_eq!(r.outcome == Outcome::True, trace.last().satisfies(&inst.goal));
            }
        }
    }

    #[test]
    fn solved_encodings_agree_across_modes_and_yield_verified_plans(
        d in random_domain(),
        kind in select(vec![PlanKind::Automaton, PlanKind::Phased, PlanKind::Sequence]),
        t_max in 1usize..=3,
        n_states in 1usize..=2,
        mutex in mutex(),
        invariants in any::<bool>(),
    ) {
        let inst = d.instance();
        let base = EncodingConfig::new(kind, t_max, n_states).with_mutex(mutex);
        let aux = assemble(&inst, &base.clone().with_invariants(invariants)).unwrap();
        let direct = assemble(&inst, &base.with_quant(QuantMode::Direct)).unwrap();
        let cfg = SolverConfig::default();
        let (ra, rd) = (solve(&aux.qbf, &cfg), solve(&direct.qbf, &cfg));
        prop_assert_eq!(ra.outcome, rd.outcome);
        for (e, r) in [(&aux, &ra), (&direct, &rd)] {
            if r.outcome != Outcome::True {
                continue;
            }
            let w = r.witness.as_ref().unwrap();
            prop_assert_eq!(solve(&e.qbf.assume(w), &cfg).outcome, Outcome::True);
            let plan = extract_plan(e, w).unwrap();
            let report = verify_plan(&plan, &inst, t_max, &VerifyOptions::default().with_mutex(mutex)).unwrap();
            prop_assert!(report.exhaustive && report.verified(), "{:?}", report.failures.first());
        }
    }

    #[test]
    fn encodings_survive_a_qdimacs_round_trip(
        d in deterministic_domain(),
        kind in select(vec![PlanKind::Automaton, PlanKind::Phased, PlanKind::Sequence]),
        t_max in 1usize..=3,
    ) {
        let inst = d.instance();
        let e = assemble(&inst, &EncodingConfig::new(kind, t_max, 2)).unwrap();
        let text = qdimacs::write(&e.qbf);
        let back = qdimacs::read(&text).unwrap();
        prop_assert_eq!(&back, &e.qbf);
        prop_assert_eq!(qdimacs::write(&back), text);
    }
}

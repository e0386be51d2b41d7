use crate::domain::ProblemInstance;
use crate::logic::{Formula, VarIdentity, VariableAtlas};

use super::builder::{SchemaFormula, Vars};
use super::{EncodeError, Schema};

/// Finite-automaton plans: a condition and two successors per state, and
/// enabled operators firing whenever their preconditions hold.
pub fn encode_automaton_plan(
    inst: &ProblemInstance,
    t_max: usize,
    n_states: usize,
    atlas: &mut VariableAtlas,
) -> Result<Vec<SchemaFormula>, EncodeError> {
    let obs = inst.observables();
    if obs.is_empty() {
        return Err(EncodeError::NoObservables);
    }
    let states = 1..=n_states;
    let mut v = Vars::new(atlas);
    let mut out = Vec::new();
    let cond = |v: &mut Vars, s: usize, b: usize| v.atom(VarIdentity::Cond { state: s, fact: b });
    let succ = |v: &mut Vars, from: usize, to: usize, truth: bool| {
        if truth {
            v.atom(VarIdentity::SuccT { from, to })
        } else {
            v.atom(VarIdentity::SuccF { from, to })
        }
    };

    for i in states.clone() {
        for &j in &obs {
            for &k in &obs {
                if j != k {
                    let f = Formula::imp(cond(&mut v, i, j.0), Formula::not(cond(&mut v, i, k.0)));
                    out.push((Schema::CondExclusive, f));
                }
            }
        }
        out.push((Schema::CondSome, Formula::or(obs.iter().map(|b| cond(&mut v, i, b.0)).collect::<Vec<_>>())));
    }
    for (truth, schema) in [(true, Schema::SuccTExclusive), (false, Schema::SuccFExclusive)] {
        for i in states.clone() {
            for j in states.clone() {
                for k in states.clone() {
                    if j != k {
                        let f = Formula::imp(succ(&mut v, i, j, truth), Formula::not(succ(&mut v, i, k, truth)));
                        out.push((schema, f));
                    }
                }
            }
        }
    }
    for (truth, schema) in [(true, Schema::SuccTSome), (false, Schema::SuccFSome)] {
        for i in states.clone() {
            let f = Formula::or(states.clone().map(|j| succ(&mut v, i, j, truth)).collect::<Vec<_>>());
            out.push((schema, f));
        }
    }
    out.push((Schema::AutomatonStart, v.state(1, 0)));
    for t in 0..=t_max {
        for i in states.clone() {
            for j in states.clone() {
                if i != j {
                    out.push((Schema::AutomatonUnique, Formula::imp(v.state(i, t), Formula::not(v.state(j, t)))));
                }
            }
        }
    }
    for t in 0..t_max {
        for (truth, schema) in [(true, Schema::TransitionT), (false, Schema::TransitionF)] {
            for i in states.clone() {
                for j in states.clone() {
                    for &k in &obs {
                        let p = v.fact(k, t);
                        let p = if truth { p } else { Formula::not(p) };
                        let body = Formula::and([v.state(i, t), cond(&mut v, i, k.0), p, succ(&mut v, i, j, truth)]);
                        out.push((schema, Formula::imp(body, v.state(j, t + 1))));
                    }
                }
            }
        }
        for o in &inst.operators {
            let i = o.index.0;
            for s in states.clone() {
                let body = Formula::and([v.enabled(i, s), v.state(s, t), v.conj(&o.pre, t)]);
                out.push((Schema::Apply, Formula::imp(body, v.op(i, t))));
            }
            let any = Formula::or(
                states.clone().map(|s| Formula::and([v.enabled(i, s), v.state(s, t)])).collect::<Vec<_>>(),
            );
            out.push((Schema::ApplyOnly, Formula::imp(v.op(i, t), any)));
        }
    }
    Ok(out)
}

/// Phased plans: each phase repeats its enabled operators while any of them
/// is applicable, then moves on to the next phase. The last phase is
/// absorbing, and applicability is defined for `1..=t_max`.
pub fn encode_phased_plan(
    inst: &ProblemInstance,
    t_max: usize,
    n_states: usize,
    atlas: &mut VariableAtlas,
) -> Vec<SchemaFormula> {
    let states = 1..=n_states;
    let ops: Vec<usize> = (0..inst.operators.len()).collect();
    let mut v = Vars::new(atlas);
    let mut out = Vec::new();
    let appl = |v: &mut Vars, i: usize, t: usize| v.atom(VarIdentity::ApplAt { op: i, t });

    for t in 1..=t_max {
        for &i in &ops {
            let prev = Formula::or(
                states.clone().map(|s| Formula::and([v.enabled(i, s), v.state(s, t - 1)])).collect::<Vec<_>>(),
            );
            let body = Formula::and([v.applicable(inst, i, t), prev]);
            out.push((Schema::Applicable, Formula::iff(appl(&mut v, i, t), body)));
        }
    }
    for t in 0..t_max {
        for i in states.clone() {
            let none = Formula::and(ops.iter().map(|&o| Formula::not(appl(&mut v, o, t + 1))).collect::<Vec<_>>());
            let next = if i < n_states { i + 1 } else { i };
            let schema = if i < n_states { Schema::Advance } else { Schema::Absorb };
            out.push((schema, Formula::imp(Formula::and([v.state(i, t), none]), v.state(next, t + 1))));
        }
        for i in states.clone() {
            let some = Formula::or(ops.iter().map(|&o| appl(&mut v, o, t + 1)).collect::<Vec<_>>());
            out.push((Schema::Stay, Formula::imp(Formula::and([v.state(i, t), some]), v.state(i, t + 1))));
        }
    }
    out.push((Schema::PhasedStart, v.state(1, 0)));
    for t in 0..=t_max {
        for i in states.clone() {
            for j in states.clone() {
                if i != j {
                    out.push((Schema::PhasedUnique, Formula::imp(v.state(i, t), Formula::not(v.state(j, t)))));
                }
            }
        }
    }
    for t in 0..t_max {
        for o in &inst.operators {
            let i = o.index.0;
            for s in states.clone() {
                let body = Formula::and([v.enabled(i, s), v.state(s, t), v.applicable(inst, i, t)]);
                out.push((Schema::PhasedApply, Formula::imp(body, v.op(i, t))));
            }
            let post: Vec<_> = o.effect_lits().copied().collect();
            out.push((Schema::NoopSatisfied, Formula::imp(v.conj(&post, t), Formula::not(v.op(i, t)))));
            let off = Formula::and(
                states
                    .clone()
                    .map(|s| Formula::or([Formula::not(v.enabled(i, s)), Formula::not(v.state(s, t))]))
                    .collect::<Vec<_>>(),
            );
            out.push((Schema::NoopDisabled, Formula::imp(off, Formula::not(v.op(i, t)))));
        }
    }
    out
}

/// Sequence plans: one enabled set per time point.
pub fn encode_sequence_plan(inst: &ProblemInstance, t_max: usize, atlas: &mut VariableAtlas) -> Vec<SchemaFormula> {
    let mut v = Vars::new(atlas);
    let mut out = Vec::new();
    for t in 0..t_max {
        for o in &inst.operators {
            let i = o.index.0;
            let body = Formula::and([v.enabled(i, t), v.applicable(inst, i, t)]);
            out.push((Schema::Sequence, Formula::iff(v.op(i, t), body)));
        }
    }
    out
}

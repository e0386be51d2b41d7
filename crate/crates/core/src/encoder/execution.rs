use crate::domain::{FactLit, OpId, ProblemInstance, Source};
use crate::logic::{Formula, VarId, VariableAtlas};

use super::builder::{SchemaFormula, Vars};
use super::{MutexMode, Schema};

/// Preconditions, effects, frame axioms, mutexes and definitions for
/// times `0..t_max` (definitions for `0..=t_max`).
pub fn encode_execution(
    inst: &ProblemInstance,
    t_max: usize,
    mutex: MutexMode,
    atlas: &mut VariableAtlas,
) -> Vec<SchemaFormula> {
    let mut v = Vars::new(atlas);
    let mut out = Vec::new();
    for t in 0..t_max {
        for o in &inst.operators {
            let i = o.index.0;
            let op = v.op(i, t);
            if o.is_deterministic() {
                let body = Formula::and([v.conj(&o.pre, t), v.conj(&o.effects[0], t + 1)]);
                out.push((Schema::Effect, Formula::imp(op, body)));
            } else {
                out.push((Schema::NondetPre, Formula::imp(op.clone(), v.conj(&o.pre, t))));
                let k = o.effects.len();
                for (j, e) in o.effects.iter().enumerate() {
                    let c = v.choice(Source::Operator(i), k, j, t);
                    let f = Formula::imp(Formula::and([op.clone(), c]), v.conj(e, t + 1));
                    let s = if j == 0 { Schema::NondetFirst } else { Schema::NondetRest };
                    out.push((s, f));
                }
            }
        }
        for r in &inst.rules {
            let k = r.alternatives.len();
            for (j, e) in r.alternatives.iter().enumerate() {
                let c = v.choice(Source::Rule(r.index), k, j, t);
                let f = Formula::imp(Formula::and([v.conj(&r.pre, t), c]), v.conj(e, t + 1));
                out.push((Schema::RuleEffect, f));
            }
        }
        for f in inst.base_facts() {
            for positive in [true, false] {
                let l = FactLit { fact: f, positive };
                let mut disj = vec![v.lit(l, t), Formula::not(v.lit(l, t + 1))];
                disj.extend(causes(inst, l, t, &mut v));
                out.push((Schema::Frame, Formula::or(disj)));
            }
        }
        let n = inst.operators.len();
        for i in 0..n {
            for j in i + 1..n {
                if mutex == MutexMode::AllPairs || inst.dependent(OpId(i), OpId(j)) {
                    let f = Formula::not(Formula::and([v.op(i, t), v.op(j, t)]));
                    out.push((Schema::Mutex, f));
                }
            }
        }
    }
    for t in 0..=t_max {
        for fact in inst.facts.iter() {
            if let Some(def) = &fact.defined_by {
                let f = Formula::iff(v.fact(fact.index, t), v.at(def, t));
                out.push((Schema::Definition, f));
            }
        }
    }
    out
}

/// Everything that can make `l` true between `t` and `t + 1`.
fn causes(inst: &ProblemInstance, l: FactLit, t: usize, v: &mut Vars) -> Vec<Formula<VarId>> {
    let mut out = Vec::new();
    for o in &inst.operators {
        let k = o.effects.len();
        for (j, e) in o.effects.iter().enumerate() {
            if !e.contains(&l) {
                continue;
            }
            let op = v.op(o.index.0, t);
            if k == 1 {
                out.push(op);
            } else {
                out.push(Formula::and([op, v.choice(Source::Operator(o.index.0), k, j, t)]));
            }
        }
    }
    for r in &inst.rules {
        let k = r.alternatives.len();
        for (j, e) in r.alternatives.iter().enumerate() {
            if e.contains(&l) {
                let c = v.choice(Source::Rule(r.index), k, j, t);
                out.push(Formula::and([v.conj(&r.pre, t), c]));
            }
        }
    }
    out
}

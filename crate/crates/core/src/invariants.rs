//! Two-literal state invariants.
//!
//! Candidates are all clauses of width one or two over base facts that hold
//! in every initial state. A round removes every candidate that some step
//! could falsify from a state satisfying all current candidates; rounds
//! repeat until nothing changes. Steps may fire several operators at once
//! (any pairwise independent set) together with rules, so the test also
//! looks at a second source firing alongside the first.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;

use crate::domain::{DomainError, FactId, FactLit, FactValuation, ProblemInstance};
use crate::logic::Formula;

/// A clause of one or two literals over non-defined facts.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct InvariantClause {
    pub lits: Vec<FactLit>,
}

impl InvariantClause {
    pub fn holds(&self, v: &FactValuation) -> bool {
        self.lits.iter().any(|l| l.holds(v))
    }

    pub fn to_formula(&self) -> Formula<FactId> {
        Formula::or(self.lits.iter().map(|l| l.to_formula()))
    }

    pub fn render(&self, inst: &ProblemInstance) -> String {
        let mut s = String::from("(or");
        for l in &self.lits {
            let sign = if l.positive { "" } else { "-" };
            let _ = write!(s, " {sign}{}", inst.fact_name(l.fact));
        }
        s.push(')');
        s
    }
}

/// One way a step source can change the state.
struct Alternative {
    source: usize,
    is_rule: bool,
    op: Option<usize>,
    pre: Vec<FactLit>,
    eff: Vec<FactLit>,
}

fn alternatives(inst: &ProblemInstance) -> Vec<Alternative> {
    let mut out = Vec::new();
    for o in &inst.operators {
        for e in &o.effects {
            out.push(Alternative {
                source: o.index.0,
                is_rule: false,
                op: Some(o.index.0),
                pre: o.pre.clone(),
                eff: e.clone(),
            });
        }
    }
    let n = inst.operators.len();
    for r in &inst.rules {
        for e in &r.alternatives {
            out.push(Alternative {
                source: n + r.index,
                is_rule: true,
                op: None,
                pre: r.pre.clone(),
                eff: e.clone(),
            });
        }
    }
    out
}

/// Literal code: `2 * fact + negated`.
fn code(l: FactLit) -> usize {
    2 * l.fact.0 + usize::from(!l.positive)
}

fn lit_of(c: usize) -> FactLit {
    FactLit { fact: FactId(c / 2), positive: c % 2 == 0 }
}

/// Unit propagation of `start` over the candidate clauses. `None` when the
/// literals are inconsistent with the candidates.
fn implied(start: &[FactLit], cands: &[Vec<usize>], nfacts: usize, is_base: &[bool]) -> Option<Vec<bool>> {
    let mut val = vec![false; 2 * nfacts];
    let mut stack: Vec<usize> = Vec::new();
    let set = |c: usize, val: &mut Vec<bool>, stack: &mut Vec<usize>| -> bool {
        if val[c ^ 1] {
            return false;
        }
        if !val[c] {
            val[c] = true;
            stack.push(c);
        }
        true
    };
    for l in start {
        if is_base[l.fact.0] && !set(code(*l), &mut val, &mut stack) {
            return None;
        }
    }
    for c in cands {
        if c.len() == 1 && !set(c[0], &mut val, &mut stack) {
            return None;
        }
    }
    // watch lists keyed by the falsified literal
    let mut watch: Vec<Vec<usize>> = vec![Vec::new(); 2 * nfacts];
    for c in cands {
        if c.len() == 2 {
            watch[c[0] ^ 1].push(c[1]);
            watch[c[1] ^ 1].push(c[0]);
        }
    }
    while let Some(c) = stack.pop() {
        for k in 0..watch[c].len() {
            let other = watch[c][k];
            if !set(other, &mut val, &mut stack) {
                return None;
            }
        }
    }
    Some(val)
}

/// Invariants of width at most two, in a canonical order.
pub fn synthesize_invariants(
    inst: &ProblemInstance,
    cap: usize,
) -> Result<Vec<InvariantClause>, DomainError> {
    let states = inst.enumerate_initial_states(cap)?;
    let base: Vec<FactId> = inst.base_facts().collect();
    let nfacts = inst.facts.len();
    let is_base: Vec<bool> = inst.facts.iter().map(|f| !f.is_defined()).collect();

    // literal codes true in each initial state, as bitsets over candidates
    let lit_codes: Vec<usize> = base.iter().flat_map(|f| [2 * f.0, 2 * f.0 + 1]).collect();
    let holds = |c: usize, s: &FactValuation| s.get(FactId(c / 2)) == (c % 2 == 0);
    let mut cands: Vec<Vec<usize>> = Vec::new();
    for (i, &a) in lit_codes.iter().enumerate() {
        if states.iter().all(|s| holds(a, s)) {
            cands.push(vec![a]);
        }
        for &b in &lit_codes[i + 1..] {
            if a / 2 == b / 2 {
                continue;
            }
            if states.iter().all(|s| holds(a, s) || holds(b, s)) {
                cands.push(vec![a, b]);
            }
        }
    }

    let alts = alternatives(inst);
    loop {
        let pre_implied: Vec<Option<Vec<bool>>> =
            alts.iter().map(|a| implied(&a.pre, &cands, nfacts, &is_base)).collect();
        // negative effects reachable by a source co-firing with alternative i
        let mut cofire_neg: Vec<HashSet<usize>> = vec![HashSet::new(); alts.len()];
        for (i, a) in alts.iter().enumerate() {
            if pre_implied[i].is_none() {
                continue;
            }
            for b in &alts {
                if b.source == a.source || (!a.is_rule && !b.is_rule && {
                    let (x, y) = (a.op.unwrap(), b.op.unwrap());
                    inst.dependent(crate::domain::OpId(x), crate::domain::OpId(y))
                }) {
                    continue;
                }
                let mut both = a.pre.clone();
                both.extend_from_slice(&b.pre);
                if implied(&both, &cands, nfacts, &is_base).is_none() {
                    continue;
                }
                cofire_neg[i].extend(b.eff.iter().map(|l| code(*l)));
            }
        }

        let survives = |c: &[usize]| -> bool {
            for (i, a) in alts.iter().enumerate() {
                let Some(imp) = &pre_implied[i] else { continue };
                let eff: HashSet<usize> = a.eff.iter().map(|l| code(*l)).collect();
                for (k, &l) in c.iter().enumerate() {
                    if !eff.contains(&(l ^ 1)) {
                        continue;
                    }
                    // alternative i makes l false
                    let Some(&other) = c.get(1 - k) else { return false };
                    if eff.contains(&other) {
                        continue;
                    }
                    if eff.contains(&(other ^ 1)) || !imp[other] || cofire_neg[i].contains(&(other ^ 1)) {
                        return false;
                    }
                }
            }
            true
        };
        let before = cands.len();
        let kept: Vec<Vec<usize>> = cands.iter().filter(|c| survives(c)).cloned().collect();
        cands = kept;
        if cands.len() == before {
            break;
        }
    }

    let out: BTreeSet<InvariantClause> = cands
        .into_iter()
        .map(|c| InvariantClause { lits: c.into_iter().map(lit_of).collect() })
        .collect();
    Ok(out.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::parse_domain;

    fn two_blocks() -> ProblemInstance {
        parse_domain(include_str!("../fixtures/two_blocks.dom")).unwrap()
    }

    fn lit(inst: &ProblemInstance, name: &str, positive: bool) -> FactLit {
        FactLit { fact: inst.fact(name).unwrap(), positive }
    }

    /// States reachable by firing single operators.
    fn reachable(inst: &ProblemInstance) -> Vec<FactValuation> {
        let mut seen: BTreeSet<FactValuation> = inst.enumerate_initial_states(1000).unwrap().into_iter().collect();
        let mut todo: Vec<FactValuation> = seen.iter().cloned().collect();
        while let Some(s) = todo.pop() {
            for o in &inst.operators {
                if !o.pre_holds(&s) {
                    continue;
                }
                for e in &o.effects {
                    let mut n = s.clone();
                    for l in e {
                        n.set(l.fact, l.positive);
                    }
                    n.refresh_defined(inst);
                    if seen.insert(n.clone()) {
                        todo.push(n);
                    }
                }
            }
        }
        seen.into_iter().collect()
    }

    #[test]
    fn two_blocks_invariants_hold_in_reachable_states() {
        let inst = two_blocks();
        let inv = synthesize_invariants(&inst, 100).unwrap();
        // clear and on-table facts are tied to the on facts
        let tie = InvariantClause { lits: vec![lit(&inst, "clearB", false), lit(&inst, "onAB", false)] };
        assert!(inv.contains(&tie));
        for s in reachable(&inst) {
            for c in &inv {
                assert!(c.holds(&s), "{} fails in {}", c.render(&inst), s.render(&inst));
            }
        }
    }

    #[test]
    fn no_operators_keeps_everything_true_initially() {
        let inst = parse_domain("fact p q\ninit (and p (or q (not q)))\ngoal p\n").unwrap();
        let inv = synthesize_invariants(&inst, 10).unwrap();
        assert!(inv.contains(&InvariantClause { lits: vec![lit(&inst, "p", true)] }));
        // q is unconstrained, so only clauses containing p remain
        assert!(inv.iter().all(|c| c.lits.contains(&lit(&inst, "p", true))));
        assert_eq!(inv.len(), 3);
    }

    #[test]
    fn unconditional_effect_removes_its_complement() {
        let inst = parse_domain("fact p q\noperator set pre post p\ninit (and (not p) q)\ngoal p\n").unwrap();
        let inv = synthesize_invariants(&inst, 10).unwrap();
        assert!(!inv.contains(&InvariantClause { lits: vec![lit(&inst, "p", false)] }));
        assert!(!inv.contains(&InvariantClause { lits: vec![lit(&inst, "p", false), lit(&inst, "q", false)] }));
        assert!(inv.contains(&InvariantClause { lits: vec![lit(&inst, "q", true)] }));
    }

    #[test]
    fn rules_fire_alongside_operators() {
        // each source alone preserves (x | y), but both fire from x & y
        let text = "fact x y\n\
                    operator a pre y post -x\n\
                    rule r pre x eff -y eff y\n\
                    init (and x y)\ngoal x\n";
        let inst = parse_domain(text).unwrap();
        let inv = synthesize_invariants(&inst, 10).unwrap();
        let xy = InvariantClause { lits: vec![lit(&inst, "x", true), lit(&inst, "y", true)] };
        assert!(!inv.contains(&xy));
    }
}

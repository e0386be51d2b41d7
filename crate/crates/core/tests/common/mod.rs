#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet, HashSet};

use qplan_core::plan::ChoiceSeq;
use qplan_core::{ExecutionTrace, FactValuation, OpId, ProblemInstance};

/// Every choice sequence of `t_max` steps over the nondeterministic sources.
pub fn all_choices(inst: &ProblemInstance, t_max: usize) -> Vec<ChoiceSeq> {
    let arities: Vec<usize> = inst.nondet_sources().iter().map(|&(_, k)| k).collect();
    let mut out: Vec<ChoiceSeq> = vec![vec![]];
    for _ in 0..t_max {
        let mut steps: Vec<Vec<usize>> = vec![vec![]];
        for &k in &arities {
            steps = steps.into_iter().flat_map(|s| (0..k).map(move |j| [s.clone(), vec![j]].concat())).collect();
        }
        out = out.into_iter().flat_map(|p| steps.iter().map(move |s| [p.clone(), vec![s.clone()]].concat())).collect();
    }
    out
}

/// Successors under any set of pairwise independent operators whose
/// preconditions hold, with every triggered rule firing.
pub fn successors(inst: &ProblemInstance, s: &FactValuation) -> Vec<FactValuation> {
    let ready: Vec<usize> = (0..inst.operators.len()).filter(|&i| inst.operators[i].pre_holds(s)).collect();
    let rules: Vec<_> = inst.rules.iter().filter(|r| r.pre_holds(s)).collect();
    let mut out = Vec::new();
    for mask in 0u64..1 << ready.len() {
        let chosen: Vec<usize> = (0..ready.len()).filter(|k| mask >> k & 1 == 1).map(|k| ready[k]).collect();
        if chosen.iter().enumerate().any(|(k, &a)| chosen[k + 1..].iter().any(|&b| inst.dependent(OpId(a), OpId(b)))) {
            continue;
        }
        let mut sources: Vec<&Vec<Vec<_>>> = chosen.iter().map(|&i| &inst.operators[i].effects).collect();
        sources.extend(rules.iter().map(|r| &r.alternatives));
        let mut picks: Vec<Vec<usize>> = vec![vec![]];
        for src in &sources {
            picks = picks.into_iter().flat_map(|p| (0..src.len()).map(move |j| [p.clone(), vec![j]].concat())).collect();
        }
        'pick: for p in picks {
            let mut next = s.clone();
            let mut set: BTreeMap<usize, bool> = BTreeMap::new();
            for (src, &j) in sources.iter().zip(&p) {
                for l in &src[j] {
                    if set.insert(l.fact.0, l.positive).is_some_and(|old| old != l.positive) {
                        continue 'pick;
                    }
                    next.set(l.fact, l.positive);
                }
            }
            next.refresh_defined(inst);
            out.push(next);
        }
    }
    out
}

/// States reachable from the initial states, or `None` past `cap`.
pub fn reachable(inst: &ProblemInstance, cap: usize) -> Option<BTreeSet<FactValuation>> {
    let mut seen: BTreeSet<FactValuation> = inst.enumerate_initial_states(cap).ok()?.into_iter().collect();
    let mut todo: Vec<FactValuation> = seen.iter().cloned().collect();
    while let Some(s) = todo.pop() {
        for n in successors(inst, &s) {
            if seen.insert(n.clone()) {
                if seen.len() > cap {
                    return None;
                }
                todo.push(n);
            }
        }
    }
    Some(seen)
}

/// First fact that changes between two steps without a fired effect
/// setting it to its new value.
pub fn frame_violation(inst: &ProblemInstance, trace: &ExecutionTrace) -> Option<(usize, usize)> {
    for (t, w) in trace.steps.windows(2).enumerate() {
        let mut touched: HashSet<(usize, bool)> = HashSet::new();
        for &o in &w[0].fired {
            touched.extend(inst.operators[o].effect_lits().map(|l| (l.fact.0, l.positive)));
        }
        for &(r, alt) in &w[0].rules {
            touched.extend(inst.rules[r].alternatives[alt].iter().map(|l| (l.fact.0, l.positive)));
        }
        for f in inst.base_facts() {
            let (a, b) = (w[0].valuation.values()[f.0], w[1].valuation.values()[f.0]);
            if a != b && !touched.contains(&(f.0, b)) {
                return Some((t, f.0));
            }
        }
    }
    None
}

use std::collections::{BTreeSet, HashMap};

use crate::domain::{FactLit, FactValuation, OpId, ProblemInstance, Source};
use crate::encoder::{choice_bits, EncodedProblem, MutexMode};
use crate::logic::{Lit, VarIdentity};

use super::{AutomatonPlan, ExecutionTrace, PhasedPlan, Plan, PlanError, SequencePlan, TraceStep};

/// Alternative picked by every nondeterministic source at every time:
/// `choices[t][k]` indexes the alternatives of `inst.nondet_sources()[k]`.
/// Missing entries mean the first alternative.
pub type ChoiceSeq = Vec<Vec<usize>>;

fn pick(choices: &ChoiceSeq, t: usize, k: usize) -> usize {
    choices.get(t).and_then(|c| c.get(k)).copied().unwrap_or(0)
}

/// Fires `ops` and every rule whose precondition holds, returning the next
/// valuation. Operators that the mutex mode keeps apart must not fire
/// together, and complementary asserted literals are an effect conflict.
fn step(
    inst: &ProblemInstance,
    v: &FactValuation,
    ops: &[usize],
    t: usize,
    choices: &ChoiceSeq,
    slot_of: &HashMap<Source, usize>,
    mutex: MutexMode,
) -> Result<(FactValuation, Vec<(usize, usize)>), PlanError> {
    for (k, &a) in ops.iter().enumerate() {
        for &b in &ops[k + 1..] {
            if mutex == MutexMode::AllPairs || inst.dependent(OpId(a), OpId(b)) {
                return Err(PlanError::Interference {
                    t,
                    first: inst.operators[a].name.clone(),
                    second: inst.operators[b].name.clone(),
                });
            }
        }
    }
    let mut asserted: Vec<FactLit> = Vec::new();
    for &i in ops {
        let o = &inst.operators[i];
        let alt = if o.is_deterministic() {
            0
        } else {
            pick(choices, t, slot_of[&Source::Operator(i)]).min(o.effects.len() - 1)
        };
        asserted.extend(&o.effects[alt]);
    }
    let mut rules = Vec::new();
    for r in &inst.rules {
        if r.pre_holds(v) {
            let alt = pick(choices, t, slot_of[&Source::Rule(r.index)]).min(r.alternatives.len() - 1);
            rules.push((r.index, alt));
            asserted.extend(&r.alternatives[alt]);
        }
    }
    let mut next = v.clone();
    let mut set: HashMap<usize, bool> = HashMap::new();
    for l in asserted {
        if let Some(&prev) = set.get(&l.fact.0) {
            if prev != l.positive {
                return Err(PlanError::EffectConflict { t, fact: inst.fact_name(l.fact).to_string() });
            }
        }
        set.insert(l.fact.0, l.positive);
        next.set(l.fact, l.positive);
    }
    next.refresh_defined(inst);
    Ok((next, rules))
}

fn source_slots(inst: &ProblemInstance) -> HashMap<Source, usize> {
    inst.nondet_sources().iter().enumerate().map(|(k, (s, _))| (*s, k)).collect()
}

fn check_ops(inst: &ProblemInstance, sets: &[BTreeSet<usize>]) -> Result<(), PlanError> {
    match sets.iter().flatten().find(|&&i| i >= inst.operators.len()) {
        Some(i) => Err(PlanError::Shape(format!("operator index {i} out of range"))),
        None => Ok(()),
    }
}

/// Finite-automaton executor: every enabled operator whose precondition
/// holds fires, then the condition fact (read before the effects) picks
/// the successor.
pub fn execute_automaton(
    plan: &AutomatonPlan,
    inst: &ProblemInstance,
    init: &FactValuation,
    t_max: usize,
    choices: &ChoiceSeq,
    mutex: MutexMode,
) -> Result<ExecutionTrace, PlanError> {
    let n = plan.n_states();
    if n == 0 || plan.condition.len() != n || plan.succ_true.len() != n || plan.succ_false.len() != n {
        return Err(PlanError::Shape("automaton tables differ in length".into()));
    }
    if plan.succ_true.iter().chain(&plan.succ_false).any(|&s| s == 0 || s > n) {
        return Err(PlanError::Shape("successor out of range".into()));
    }
    if plan.condition.iter().any(|c| c.0 >= inst.facts.len()) {
        return Err(PlanError::Shape("condition fact out of range".into()));
    }
    check_ops(inst, &plan.enabled)?;
    let slots = source_slots(inst);
    let mut v = init.clone();
    let mut s = 1;
    let mut steps = Vec::with_capacity(t_max + 1);
    for t in 0..t_max {
        let fired: Vec<usize> =
            plan.enabled[s - 1].iter().copied().filter(|&i| inst.operators[i].pre_holds(&v)).collect();
        let (next, rules) = step(inst, &v, &fired, t, choices, &slots, mutex)?;
        let succ = if v.get(plan.condition[s - 1]) { plan.succ_true[s - 1] } else { plan.succ_false[s - 1] };
        steps.push(TraceStep { valuation: v, state: s, fired, rules });
        v = next;
        s = succ;
    }
    steps.push(TraceStep { valuation: v, state: s, fired: vec![], rules: vec![] });
    Ok(ExecutionTrace { steps })
}

fn applicable(inst: &ProblemInstance, i: usize, v: &FactValuation) -> bool {
    let o = &inst.operators[i];
    o.pre_holds(v) && o.has_novel_effect(v)
}

/// Phased executor: enabled operators fire while applicable and would
/// change something; once none of them is, the next phase starts. The
/// last phase never ends.
pub fn execute_phased(
    plan: &PhasedPlan,
    inst: &ProblemInstance,
    init: &FactValuation,
    t_max: usize,
    choices: &ChoiceSeq,
    mutex: MutexMode,
) -> Result<ExecutionTrace, PlanError> {
    let n = plan.n_states();
    if n == 0 {
        return Err(PlanError::Shape("phased plan without phases".into()));
    }
    check_ops(inst, &plan.enabled)?;
    let slots = source_slots(inst);
    let mut v = init.clone();
    let mut s = 1;
    let mut steps = Vec::with_capacity(t_max + 1);
    for t in 0..t_max {
        let enabled = &plan.enabled[s - 1];
        let fired: Vec<usize> = enabled.iter().copied().filter(|&i| applicable(inst, i, &v)).collect();
        let (next, rules) = step(inst, &v, &fired, t, choices, &slots, mutex)?;
        let stay = enabled.iter().any(|&i| applicable(inst, i, &next));
        steps.push(TraceStep { valuation: v, state: s, fired, rules });
        v = next;
        if !stay {
            s = (s + 1).min(n);
        }
    }
    steps.push(TraceStep { valuation: v, state: s, fired: vec![], rules: vec![] });
    Ok(ExecutionTrace { steps })
}

/// Sequence executor: at time `t` the operators of slot `t` fire when
/// applicable and some postcondition is false.
pub fn execute_sequence(
    plan: &SequencePlan,
    inst: &ProblemInstance,
    init: &FactValuation,
    t_max: usize,
    choices: &ChoiceSeq,
    mutex: MutexMode,
) -> Result<ExecutionTrace, PlanError> {
    if plan.t_max() < t_max {
        return Err(PlanError::Shape(format!("sequence has {} slots, horizon is {t_max}", plan.t_max())));
    }
    check_ops(inst, &plan.enabled)?;
    let slots = source_slots(inst);
    let mut v = init.clone();
    let mut steps = Vec::with_capacity(t_max + 1);
    for t in 0..t_max {
        let fired: Vec<usize> = plan.enabled[t].iter().copied().filter(|&i| applicable(inst, i, &v)).collect();
        let (next, rules) = step(inst, &v, &fired, t, choices, &slots, mutex)?;
        steps.push(TraceStep { valuation: v, state: t + 1, fired, rules });
        v = next;
    }
    steps.push(TraceStep { valuation: v, state: t_max + 1, fired: vec![], rules: vec![] });
    Ok(ExecutionTrace { steps })
}

pub fn execute(
    plan: &Plan,
    inst: &ProblemInstance,
    init: &FactValuation,
    t_max: usize,
    choices: &ChoiceSeq,
    mutex: MutexMode,
) -> Result<ExecutionTrace, PlanError> {
    match plan {
        Plan::Automaton(p) => execute_automaton(p, inst, init, t_max, choices, mutex),
        Plan::Phased(p) => execute_phased(p, inst, init, t_max, choices, mutex),
        Plan::Sequence(p) => execute_sequence(p, inst, init, t_max, choices, mutex),
    }
}

/// Values the encoding's named variables take along `trace`: facts,
/// operator firings, states, applicability, plan variables, choices and
/// auxiliary selectors. Tseitin variables are left out.
///
/// Fixing these literals in the encoded QBF must leave a satisfiable
/// matrix whenever the trace ends in a goal state.
pub fn trace_literals(
    e: &EncodedProblem,
    plan: &Plan,
    trace: &ExecutionTrace,
    choices: &ChoiceSeq,
) -> Vec<Lit> {
    let inst = &e.instance;
    let t_max = e.config.t_max;
    let slots = source_slots(inst);
    let alts: HashMap<Source, usize> = inst.nondet_sources().into_iter().collect();
    let enabled_in = |i: usize, slot: usize| -> bool {
        match plan {
            Plan::Sequence(p) => p.enabled.get(slot).is_some_and(|s| s.contains(&i)),
            Plan::Phased(p) => p.enabled.get(slot.wrapping_sub(1)).is_some_and(|s| s.contains(&i)),
            Plan::Automaton(p) => p.enabled.get(slot.wrapping_sub(1)).is_some_and(|s| s.contains(&i)),
        }
    };
    let aux: HashMap<_, _> = e.aux_assignment(&trace.steps[0].valuation).unwrap_or_default().into_iter().collect();
    let mut out = Vec::new();
    for (var, id) in e.qbf.atlas().iter() {
        let value = match *id {
            VarIdentity::FactAt { fact, t } => trace.steps[t].valuation.values()[fact],
            VarIdentity::OpAt { op, t } => trace.steps[t].fired.contains(&op),
            VarIdentity::StateAt { state, t } => trace.steps[t].state == state,
            VarIdentity::Enabled { op, slot } => enabled_in(op, slot),
            VarIdentity::Cond { state, fact } => match plan {
                Plan::Automaton(p) => p.condition[state - 1].0 == fact,
                _ => continue,
            },
            VarIdentity::SuccT { from, to } => match plan {
                Plan::Automaton(p) => p.succ_true[from - 1] == to,
                _ => continue,
            },
            VarIdentity::SuccF { from, to } => match plan {
                Plan::Automaton(p) => p.succ_false[from - 1] == to,
                _ => continue,
            },
            VarIdentity::ApplAt { op, t } => {
                t >= 1 && t <= t_max && enabled_in(op, trace.steps[t - 1].state) && applicable(inst, op, &trace.steps[t].valuation)
            }
            VarIdentity::AuxInit { .. } => match aux.get(&var) {
                Some(&b) => b,
                None => continue,
            },
            VarIdentity::Choice { source, bit, t } => {
                let k = alts[&source];
                let j = pick(choices, t, slots[&source]).min(k - 1);
                debug_assert!(bit < choice_bits(k));
                j >> bit & 1 == 0
            }
            VarIdentity::Tseitin { .. } => continue,
        };
        out.push(var.lit(value));
    }
    out
}

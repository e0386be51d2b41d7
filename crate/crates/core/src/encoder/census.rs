use std::collections::BTreeMap;

use crate::domain::{OpId, ProblemInstance};

use super::{choice_bits, EncodingConfig, MutexMode, PlanKind, QuantMode, Schema};

/// Formula counts per schema derived from the index ranges alone.
///
/// `init_terms` is the number of padded DNF terms of the initial formula
/// and `invariants` the number of invariant clauses; both are ignored when
/// the configuration does not use them.
pub fn expected_census(
    inst: &ProblemInstance,
    cfg: &EncodingConfig,
    init_terms: usize,
    invariants: usize,
) -> BTreeMap<Schema, usize> {
    let t = cfg.t_max;
    let ns = cfg.n_states;
    let no = inst.operators.len();
    let b = inst.observables().len();
    let base = inst.base_facts().count();
    let defined = inst.facts.len() - base;
    let det = inst.operators.iter().filter(|o| o.is_deterministic()).count();
    let nondet_alts: usize =
        inst.operators.iter().filter(|o| !o.is_deterministic()).map(|o| o.effects.len()).sum();
    let rule_alts: usize = inst.rules.iter().map(|r| r.alternatives.len()).sum();
    let pairs = match cfg.mutex_mode {
        MutexMode::AllPairs => no * no.saturating_sub(1) / 2,
        MutexMode::DependentPairs => (0..no)
            .flat_map(|i| (i + 1..no).map(move |j| (i, j)))
            .filter(|&(i, j)| inst.dependent(OpId(i), OpId(j)))
            .count(),
    };

    let mut c = BTreeMap::new();
    c.insert(Schema::Effect, det * t);
    c.insert(Schema::NondetPre, (no - det) * t);
    c.insert(Schema::NondetFirst, (no - det) * t);
    c.insert(Schema::NondetRest, (nondet_alts - (no - det)) * t);
    c.insert(Schema::RuleEffect, rule_alts * t);
    c.insert(Schema::Frame, 2 * base * t);
    c.insert(Schema::Mutex, pairs * t);
    c.insert(Schema::Definition, defined * (t + 1));
    match cfg.plan_kind {
        PlanKind::Automaton => {
            c.insert(Schema::CondExclusive, ns * (b * b - b));
            c.insert(Schema::CondSome, ns);
            c.insert(Schema::SuccTExclusive, ns * (ns * ns - ns));
            c.insert(Schema::SuccFExclusive, ns * (ns * ns - ns));
            c.insert(Schema::SuccTSome, ns);
            c.insert(Schema::SuccFSome, ns);
            c.insert(Schema::AutomatonStart, 1);
            c.insert(Schema::AutomatonUnique, (ns * ns - ns) * (t + 1));
            c.insert(Schema::TransitionT, ns * ns * b * t);
            c.insert(Schema::TransitionF, ns * ns * b * t);
            c.insert(Schema::Apply, ns * no * t);
            c.insert(Schema::ApplyOnly, no * t);
        }
        PlanKind::Phased => {
            c.insert(Schema::Applicable, no * t);
            c.insert(Schema::Advance, (ns - 1) * t);
            c.insert(Schema::Absorb, t);
            c.insert(Schema::Stay, ns * t);
            c.insert(Schema::PhasedStart, 1);
            c.insert(Schema::PhasedUnique, (ns * ns - ns) * (t + 1));
            c.insert(Schema::PhasedApply, no * ns * t);
            c.insert(Schema::NoopSatisfied, no * t);
            c.insert(Schema::NoopDisabled, no * t);
        }
        PlanKind::Sequence => {
            c.insert(Schema::Sequence, no * t);
        }
    }
    match cfg.quant_mode {
        QuantMode::Aux => {
            c.insert(Schema::InitSelect, 1 << choice_bits(init_terms));
            c.insert(Schema::Goal, 1);
            if cfg.use_invariants {
                c.insert(Schema::Invariant, invariants * (t + 1));
            }
        }
        QuantMode::Direct => {
            c.insert(Schema::InitGoal, 1);
        }
    }
    c.retain(|_, n| *n > 0);
    c
}

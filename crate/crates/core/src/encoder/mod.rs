//! Instantiation of the execution and plan schemata into `∃P ∀C ∃R Φ`.

mod builder;
mod census;
mod execution;
mod plans;
mod schema;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::domain::{DomainError, FactId, FactValuation, ProblemInstance};
use crate::invariants::{synthesize_invariants, InvariantClause};
use crate::logic::{
    to_padded_dnf, Clausifier, Formula, LogicError, QbfProblem, QuantBlock, Quantifier, VarId,
    VarIdentity, VariableAtlas, DEFAULT_DNF_CAP,
};

pub use builder::{choice_bits, SchemaFormula};
pub use census::expected_census;
pub use execution::encode_execution;
pub use plans::{encode_automaton_plan, encode_phased_plan, encode_sequence_plan};
pub use schema::Schema;

/// Initial-state cap used when synthesising invariants.
pub const INVARIANT_STATE_CAP: usize = 1 << 17;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("automaton plans need at least one observable fact")]
    NoObservables,
    #[error("the horizon must be at least 1")]
    ZeroHorizon,
    #[error("plans need at least one state")]
    ZeroStates,
    #[error("invariants are only used with auxiliary-variable quantification")]
    InvariantsNeedAux,
    #[error("the initial-state formula is unsatisfiable")]
    NoInitialStates,
    #[error(transparent)]
    Logic(#[from] LogicError),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PlanKind {
    Automaton,
    Phased,
    Sequence,
}

impl fmt::Display for PlanKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PlanKind::Automaton => "automaton",
            PlanKind::Phased => "phased",
            PlanKind::Sequence => "sequence",
        })
    }
}

impl FromStr for PlanKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "automaton" => Ok(PlanKind::Automaton),
            "phased" => Ok(PlanKind::Phased),
            "sequence" => Ok(PlanKind::Sequence),
            _ => Err(format!("unknown plan kind `{s}`")),
        }
    }
}

/// How the initial states are quantified.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum QuantMode {
    /// Universal auxiliary variables select a DNF term of the initial formula.
    Aux,
    /// Time-0 facts are universal; the goal is required only for valuations
    /// satisfying the initial formula.
    Direct,
}

impl fmt::Display for QuantMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            QuantMode::Aux => "aux",
            QuantMode::Direct => "direct",
        })
    }
}

impl FromStr for QuantMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "aux" => Ok(QuantMode::Aux),
            "direct" => Ok(QuantMode::Direct),
            _ => Err(format!("unknown quantification mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MutexMode {
    /// Only dependent operators exclude each other.
    DependentPairs,
    /// At most one operator per time point.
    AllPairs,
}

impl fmt::Display for MutexMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MutexMode::DependentPairs => "dep",
            MutexMode::AllPairs => "all",
        })
    }
}

impl FromStr for MutexMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "dep" | "dependent-pairs" => Ok(MutexMode::DependentPairs),
            "all" | "all-pairs" => Ok(MutexMode::AllPairs),
            _ => Err(format!("unknown mutex mode `{s}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EncodingConfig {
    pub plan_kind: PlanKind,
    pub t_max: usize,
    /// Ignored for sequence plans.
    pub n_states: usize,
    pub quant_mode: QuantMode,
    pub mutex_mode: MutexMode,
    pub use_invariants: bool,
    pub dnf_cap: usize,
}

impl EncodingConfig {
    pub fn new(plan_kind: PlanKind, t_max: usize, n_states: usize) -> Self {
        EncodingConfig {
            plan_kind,
            t_max,
            n_states,
            quant_mode: QuantMode::Aux,
            mutex_mode: MutexMode::AllPairs,
            use_invariants: false,
            dnf_cap: DEFAULT_DNF_CAP,
        }
    }

    pub fn sequence(t_max: usize) -> Self {
        EncodingConfig::new(PlanKind::Sequence, t_max, 1)
    }

    pub fn with_quant(mut self, q: QuantMode) -> Self {
        self.quant_mode = q;
        self
    }

    pub fn with_mutex(mut self, m: MutexMode) -> Self {
        self.mutex_mode = m;
        self
    }

    pub fn with_invariants(mut self, on: bool) -> Self {
        self.use_invariants = on;
        self
    }

    fn validate(&self) -> Result<(), EncodeError> {
        if self.t_max == 0 {
            return Err(EncodeError::ZeroHorizon);
        }
        if self.plan_kind != PlanKind::Sequence && self.n_states == 0 {
            return Err(EncodeError::ZeroStates);
        }
        if self.use_invariants && self.quant_mode != QuantMode::Aux {
            return Err(EncodeError::InvariantsNeedAux);
        }
        Ok(())
    }
}

/// A planning problem compiled to a QBF, with what is needed to decode
/// witnesses and to audit the encoding.
#[derive(Debug, Clone)]
pub struct EncodedProblem {
    pub qbf: QbfProblem,
    pub config: EncodingConfig,
    pub instance: ProblemInstance,
    pub formulas: Vec<SchemaFormula>,
    pub census: BTreeMap<Schema, usize>,
    pub plan_vars: Vec<VarId>,
    pub universal_vars: Vec<VarId>,
    /// Padded DNF terms of the initial formula (auxiliary mode only).
    pub init_terms: Vec<Vec<(FactId, bool)>>,
    pub aux_vars: Vec<VarId>,
    pub invariants: Vec<InvariantClause>,
}

impl EncodedProblem {
    /// Values of the auxiliary variables selecting the term satisfied by
    /// `state`, if any.
    pub fn aux_assignment(&self, state: &FactValuation) -> Option<Vec<(VarId, bool)>> {
        let i = self
            .init_terms
            .iter()
            .position(|term| term.iter().all(|&(f, b)| state.get(f) == b))?;
        Some(
            self.aux_vars
                .iter()
                .enumerate()
                .map(|(k, &d)| (d, i >> k & 1 == 0))
                .collect(),
        )
    }

    pub fn num_clauses(&self) -> usize {
        self.qbf.num_clauses()
    }

    pub fn num_vars(&self) -> usize {
        self.qbf.matrix_vars().len()
    }
}

/// Builds the complete QBF for `inst` under `cfg`.
pub fn assemble(inst: &ProblemInstance, cfg: &EncodingConfig) -> Result<EncodedProblem, EncodeError> {
    cfg.validate()?;
    let t_max = cfg.t_max;
    let mut atlas = VariableAtlas::new();

    // plan variables first, in a readable order
    let mut plan_vars = Vec::new();
    let n_ops = inst.operators.len();
    match cfg.plan_kind {
        PlanKind::Sequence => {
            for t in 0..t_max {
                for i in 0..n_ops {
                    plan_vars.push(atlas.var(VarIdentity::Enabled { op: i, slot: t }));
                }
            }
        }
        PlanKind::Phased | PlanKind::Automaton => {
            let obs = inst.observables();
            if cfg.plan_kind == PlanKind::Automaton {
                if obs.is_empty() {
                    return Err(EncodeError::NoObservables);
                }
                for s in 1..=cfg.n_states {
                    for b in &obs {
                        plan_vars.push(atlas.var(VarIdentity::Cond { state: s, fact: b.0 }));
                    }
                }
                for s in 1..=cfg.n_states {
                    for s2 in 1..=cfg.n_states {
                        plan_vars.push(atlas.var(VarIdentity::SuccT { from: s, to: s2 }));
                    }
                    for s2 in 1..=cfg.n_states {
                        plan_vars.push(atlas.var(VarIdentity::SuccF { from: s, to: s2 }));
                    }
                }
            }
            for s in 1..=cfg.n_states {
                for i in 0..n_ops {
                    plan_vars.push(atlas.var(VarIdentity::Enabled { op: i, slot: s }));
                }
            }
        }
    }

    // universal variables
    let mut universal = Vec::new();
    let mut init_terms = Vec::new();
    let mut aux_vars = Vec::new();
    let init = expand_definitions(inst, &inst.init);
    match cfg.quant_mode {
        QuantMode::Aux => {
            init_terms = to_padded_dnf(&init, cfg.dnf_cap)?;
            if init_terms.is_empty() {
                return Err(EncodeError::NoInitialStates);
            }
            let n = choice_bits(init_terms.len());
            for k in 1..=n {
                let d = atlas.var(VarIdentity::AuxInit { k });
                aux_vars.push(d);
                universal.push(d);
            }
            let mentioned: BTreeSet<FactId> = init.atoms();
            for f in inst.base_facts() {
                if !mentioned.contains(&f) {
                    universal.push(atlas.var(VarIdentity::FactAt { fact: f.0, t: 0 }));
                }
            }
        }
        QuantMode::Direct => {
            for f in inst.base_facts() {
                universal.push(atlas.var(VarIdentity::FactAt { fact: f.0, t: 0 }));
            }
        }
    }
    for (source, k) in inst.nondet_sources() {
        for t in 0..t_max {
            for bit in 0..choice_bits(k) {
                universal.push(atlas.var(VarIdentity::Choice { source, bit, t }));
            }
        }
    }

    let mut formulas = encode_execution(inst, t_max, cfg.mutex_mode, &mut atlas);
    match cfg.plan_kind {
        PlanKind::Automaton => {
            formulas.extend(encode_automaton_plan(inst, t_max, cfg.n_states, &mut atlas)?)
        }
        PlanKind::Phased => formulas.extend(encode_phased_plan(inst, t_max, cfg.n_states, &mut atlas)),
        PlanKind::Sequence => formulas.extend(encode_sequence_plan(inst, t_max, &mut atlas)),
    }

    let at = |atlas: &mut VariableAtlas, f: &Formula<FactId>, t: usize| {
        f.map_atoms(&mut |a: &FactId| atlas.var(VarIdentity::FactAt { fact: a.0, t }))
    };
    let goal = at(&mut atlas, &inst.goal, t_max);
    let mut invariants = Vec::new();
    match cfg.quant_mode {
        QuantMode::Aux => {
            let n = aux_vars.len();
            for i in 0..(1usize << n) {
                let pattern = Formula::and(
                    aux_vars
                        .iter()
                        .enumerate()
                        .map(|(k, &d)| Formula::lit(d, i >> k & 1 == 0))
                        .collect::<Vec<_>>(),
                );
                let phi = match init_terms.get(i) {
                    Some(term) => Formula::and(
                        term.iter()
                            .map(|&(f, b)| {
                                Formula::lit(atlas.var(VarIdentity::FactAt { fact: f.0, t: 0 }), b)
                            })
                            .collect::<Vec<_>>(),
                    ),
                    None => Formula::True,
                };
                let f = if n == 0 { phi } else { Formula::imp(pattern, phi) };
                formulas.push((Schema::InitSelect, f));
            }
            formulas.push((Schema::Goal, goal));
            if cfg.use_invariants {
                invariants = synthesize_invariants(inst, INVARIANT_STATE_CAP)?;
                for t in 0..=t_max {
                    for c in &invariants {
                        formulas.push((Schema::Invariant, at(&mut atlas, &c.to_formula(), t)));
                    }
                }
            }
        }
        QuantMode::Direct => {
            let upsilon = at(&mut atlas, &inst.init, 0);
            formulas.push((Schema::InitGoal, Formula::imp(upsilon, goal)));
        }
    }

    let mut census: BTreeMap<Schema, usize> = BTreeMap::new();
    for (s, _) in &formulas {
        *census.entry(*s).or_default() += 1;
    }

    let mut clausifier = Clausifier::new(&mut atlas);
    let mut matrix = Vec::new();
    for (_, f) in &formulas {
        matrix.extend(clausifier.clausify(f));
    }
    drop(clausifier);

    let outer: BTreeSet<VarId> = plan_vars.iter().chain(universal.iter()).copied().collect();
    let inner: Vec<VarId> = atlas.iter().map(|(v, _)| v).filter(|v| !outer.contains(v)).collect();
    let prefix = vec![
        QuantBlock::new(Quantifier::Exists, plan_vars.clone()),
        QuantBlock::new(Quantifier::Forall, universal.clone()),
        QuantBlock::new(Quantifier::Exists, inner),
    ];
    let qbf = QbfProblem::new(prefix, matrix, atlas)?;
    Ok(EncodedProblem {
        qbf,
        config: cfg.clone(),
        instance: inst.clone(),
        formulas,
        census,
        plan_vars,
        universal_vars: universal,
        init_terms,
        aux_vars,
        invariants,
    })
}

/// Replaces defined facts by their definitions.
fn expand_definitions(inst: &ProblemInstance, f: &Formula<FactId>) -> Formula<FactId> {
    f.substitute(&mut |a: &FactId| match &inst.facts[a.0].defined_by {
        Some(def) => def.clone(),
        None => Formula::atom(*a),
    })
}

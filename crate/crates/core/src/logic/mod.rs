//! Propositional logic: formulae, normal forms, clausification, the
//! variable atlas and the quantified clause representation.

mod atlas;
mod clausify;
mod dnf;
mod formula;
mod nnf;
pub mod qdimacs;
pub mod random;

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

pub use atlas::{VarIdentity, VariableAtlas};
pub use clausify::{clausify, Clausifier};
pub use dnf::{to_padded_dnf, DEFAULT_DNF_CAP};
pub use formula::Formula;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LogicError {
    #[error("formula mentions an unvalued atom {0}")]
    UnvaluedAtom(String),
    #[error("DNF conversion exceeds the cap of {cap} terms")]
    DnfCap { cap: usize },
    #[error("variable {0} is quantified more than once")]
    DuplicateQuantifier(u32),
    #[error("QDIMACS line {line}: {msg}")]
    Qdimacs { line: usize, msg: String },
}

/// Solver variable, numbered from 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct VarId(pub u32);

impl VarId {
    pub fn index(self) -> usize {
        self.0 as usize
    }

    pub fn lit(self, positive: bool) -> Lit {
        Lit::new(self, positive)
    }
}

impl fmt::Display for VarId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Signed variable in DIMACS convention.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Lit(i32);

impl Lit {
    pub fn new(var: VarId, positive: bool) -> Lit {
        let v = var.0 as i32;
        assert!(v > 0, "variables are numbered from 1");
        Lit(if positive { v } else { -v })
    }

    pub fn from_dimacs(x: i32) -> Option<Lit> {
        (x != 0).then_some(Lit(x))
    }

    pub fn to_dimacs(self) -> i32 {
        self.0
    }

    pub fn var(self) -> VarId {
        VarId(self.0.unsigned_abs())
    }

    pub fn is_positive(self) -> bool {
        self.0 > 0
    }

    pub fn negate(self) -> Lit {
        Lit(-self.0)
    }
}

impl std::ops::Not for Lit {
    type Output = Lit;
    fn not(self) -> Lit {
        self.negate()
    }
}

impl fmt::Display for Lit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// Disjunction of literals, sorted by variable with no duplicates and no
/// complementary pair.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Clause(Vec<Lit>);

impl Clause {
    /// Builds a clause; returns `None` for tautologies.
    pub fn new(lits: impl IntoIterator<Item = Lit>) -> Option<Clause> {
        let mut v: Vec<Lit> = lits.into_iter().collect();
        v.sort_by_key(|l| (l.var(), l.is_positive()));
        v.dedup();
        if v.windows(2).any(|w| w[0].var() == w[1].var()) {
            return None;
        }
        Some(Clause(v))
    }

    pub fn empty() -> Clause {
        Clause(Vec::new())
    }

    pub fn lits(&self) -> &[Lit] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn eval(&self, value: impl Fn(VarId) -> bool) -> bool {
        self.0.iter().any(|l| value(l.var()) == l.is_positive())
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l} ")?;
        }
        write!(f, "0")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Quantifier {
    Exists,
    Forall,
}

impl Quantifier {
    pub fn symbol(self) -> char {
        match self {
            Quantifier::Exists => 'e',
            Quantifier::Forall => 'a',
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantBlock {
    pub quantifier: Quantifier,
    pub vars: Vec<VarId>,
}

impl QuantBlock {
    pub fn new(quantifier: Quantifier, vars: Vec<VarId>) -> Self {
        QuantBlock { quantifier, vars }
    }
}

/// Prenex CNF QBF with the atlas naming its variables.
#[derive(Debug, Clone, PartialEq)]
pub struct QbfProblem {
    prefix: Vec<QuantBlock>,
    matrix: Vec<Clause>,
    atlas: VariableAtlas,
}

impl QbfProblem {
    /// Normalises the prefix: empty blocks are dropped, adjacent blocks with
    /// the same quantifier merged, and unquantified matrix variables put in
    /// an outermost existential block.
    pub fn new(
        prefix: Vec<QuantBlock>,
        matrix: Vec<Clause>,
        atlas: VariableAtlas,
    ) -> Result<QbfProblem, LogicError> {
        let mut seen = BTreeSet::new();
        for b in &prefix {
            for v in &b.vars {
                if !seen.insert(*v) {
                    return Err(LogicError::DuplicateQuantifier(v.0));
                }
            }
        }
        let free: BTreeSet<VarId> = matrix
            .iter()
            .flat_map(|c| c.lits().iter().map(|l| l.var()))
            .filter(|v| !seen.contains(v))
            .collect();
        let mut blocks = Vec::with_capacity(prefix.len() + 1);
        if !free.is_empty() {
            blocks.push(QuantBlock::new(Quantifier::Exists, free.into_iter().collect()));
        }
        blocks.extend(prefix);
        let mut merged: Vec<QuantBlock> = Vec::new();
        for b in blocks.into_iter().filter(|b| !b.vars.is_empty()) {
            match merged.last_mut() {
                Some(last) if last.quantifier == b.quantifier => last.vars.extend(b.vars),
                _ => merged.push(b),
            }
        }
        Ok(QbfProblem { prefix: merged, matrix, atlas })
    }

    pub fn prefix(&self) -> &[QuantBlock] {
        &self.prefix
    }

    pub fn matrix(&self) -> &[Clause] {
        &self.matrix
    }

    pub fn atlas(&self) -> &VariableAtlas {
        &self.atlas
    }

    /// Largest variable index mentioned anywhere.
    pub fn num_vars(&self) -> u32 {
        let p = self.prefix.iter().flat_map(|b| b.vars.iter()).map(|v| v.0).max().unwrap_or(0);
        let m = self
            .matrix
            .iter()
            .flat_map(|c| c.lits().iter())
            .map(|l| l.var().0)
            .max()
            .unwrap_or(0);
        p.max(m).max(self.atlas.len() as u32)
    }

    pub fn num_clauses(&self) -> usize {
        self.matrix.len()
    }

    /// Number of literal occurrences in the matrix.
    pub fn num_literals(&self) -> usize {
        self.matrix.iter().map(Clause::len).sum()
    }

    /// Distinct variables occurring in the matrix.
    pub fn matrix_vars(&self) -> BTreeSet<VarId> {
        self.matrix.iter().flat_map(|c| c.lits().iter().map(|l| l.var())).collect()
    }

    pub fn quantifier_of(&self, v: VarId) -> Option<(usize, Quantifier)> {
        self.prefix
            .iter()
            .enumerate()
            .find(|(_, b)| b.vars.contains(&v))
            .map(|(i, b)| (i, b.quantifier))
    }

    /// Same problem with some variables fixed: satisfied clauses are dropped,
    /// falsified literals removed and the fixed variables leave the prefix.
    pub fn assume(&self, lits: &[Lit]) -> QbfProblem {
        let fixed: std::collections::HashMap<VarId, bool> =
            lits.iter().map(|l| (l.var(), l.is_positive())).collect();
        let matrix = self
            .matrix
            .iter()
            .filter_map(|c| {
                let mut out = Vec::with_capacity(c.len());
                for &l in c.lits() {
                    match fixed.get(&l.var()) {
                        Some(&v) if v == l.is_positive() => return None,
                        Some(_) => {}
                        None => out.push(l),
                    }
                }
                Some(Clause(out))
            })
            .collect();
        let prefix = self
            .prefix
            .iter()
            .map(|b| {
                QuantBlock::new(
                    b.quantifier,
                    b.vars.iter().copied().filter(|v| !fixed.contains_key(v)).collect(),
                )
            })
            .collect();
        QbfProblem::new(prefix, matrix, self.atlas.clone()).expect("prefix stays disjoint")
    }
}

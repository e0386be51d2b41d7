//! Ground planning instances: facts, operators, nondeterministic rules and
//! the initial/goal formulae, plus the textual domain format.

mod parse;
mod write;

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::logic::Formula;

pub use parse::parse_domain;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DomainError {
    #[error("line {line}, column {col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("line {line}, column {col}: undeclared fact `{name}`")]
    UndeclaredFact { name: String, line: usize, col: usize },
    #[error("line {line}: duplicate name `{name}`")]
    Duplicate { name: String, line: usize },
    #[error("`{name}` has an empty effect list")]
    EmptyEffect { name: String },
    #[error("`{name}` asserts a literal and its complement in one effect")]
    ContradictoryEffect { name: String },
    #[error("definition of `{name}` refers to another defined fact")]
    NestedDefinition { name: String },
    #[error("`{name}` changes the defined fact `{fact}`")]
    DefinedEffect { name: String, fact: String },
    #[error("rule `{name}` needs at least two alternatives")]
    TooFewAlternatives { name: String },
    #[error("fact index {index} out of range")]
    FactOutOfRange { index: usize },
    #[error("initial-state enumeration exceeded the cap after {count} states")]
    CapExceeded { count: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FactId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct OpId(pub usize);

/// A fact or its negation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactLit {
    pub fact: FactId,
    pub positive: bool,
}

impl FactLit {
    pub fn pos(fact: FactId) -> Self {
        FactLit { fact, positive: true }
    }

    pub fn neg(fact: FactId) -> Self {
        FactLit { fact, positive: false }
    }

    pub fn complement(self) -> Self {
        FactLit { fact: self.fact, positive: !self.positive }
    }

    pub fn holds(self, v: &FactValuation) -> bool {
        v.get(self.fact) == self.positive
    }

    pub fn to_formula(self) -> Formula<FactId> {
        Formula::lit(self.fact, self.positive)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Fact {
    pub name: String,
    pub index: FactId,
    pub observable: bool,
    pub defined_by: Option<Formula<FactId>>,
}

impl Fact {
    pub fn is_defined(&self) -> bool {
        self.defined_by.is_some()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    pub name: String,
    pub index: OpId,
    pub pre: Vec<FactLit>,
    /// Effect alternatives; exactly one for deterministic operators.
    pub effects: Vec<Vec<FactLit>>,
}

impl Operator {
    pub fn is_deterministic(&self) -> bool {
        self.effects.len() == 1
    }

    /// Every literal mentioned by some alternative.
    pub fn effect_lits(&self) -> impl Iterator<Item = &FactLit> {
        self.effects.iter().flatten()
    }

    pub fn effect_vars(&self) -> BTreeSet<FactId> {
        self.effect_lits().map(|l| l.fact).collect()
    }

    pub fn pre_vars(&self) -> BTreeSet<FactId> {
        self.pre.iter().map(|l| l.fact).collect()
    }

    pub fn pre_holds(&self, v: &FactValuation) -> bool {
        self.pre.iter().all(|l| l.holds(v))
    }

    /// Some postcondition is false: the operator would change the state.
    /// For several alternatives, some literal of some alternative is false.
    pub fn has_novel_effect(&self, v: &FactValuation) -> bool {
        self.effect_lits().any(|l| !l.holds(v))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NondetRule {
    pub name: String,
    pub index: usize,
    pub pre: Vec<FactLit>,
    pub alternatives: Vec<Vec<FactLit>>,
}

impl NondetRule {
    pub fn pre_holds(&self, v: &FactValuation) -> bool {
        self.pre.iter().all(|l| l.holds(v))
    }
}

/// Origin of a nondeterministic choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Source {
    Operator(usize),
    Rule(usize),
}

impl fmt::Display for Source {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Source::Operator(i) => write!(f, "op{i}"),
            Source::Rule(i) => write!(f, "rule{i}"),
        }
    }
}

impl FromStr for Source {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parse = |n: &str| n.parse::<usize>().map_err(|e| format!("bad source `{s}`: {e}"));
        if let Some(n) = s.strip_prefix("op") {
            Ok(Source::Operator(parse(n)?))
        } else if let Some(n) = s.strip_prefix("rule") {
            Ok(Source::Rule(parse(n)?))
        } else {
            Err(format!("bad source `{s}`"))
        }
    }
}

/// Truth value of every fact. Defined facts always agree with their
/// definitions.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FactValuation(Vec<bool>);

impl FactValuation {
    /// Builds a valuation from base-fact values; `base` is consulted for
    /// non-defined facts only.
    pub fn from_base(inst: &ProblemInstance, base: impl Fn(FactId) -> bool) -> FactValuation {
        let mut v = FactValuation(
            inst.facts.iter().map(|f| !f.is_defined() && base(f.index)).collect(),
        );
        v.refresh_defined(inst);
        v
    }

    pub fn get(&self, f: FactId) -> bool {
        self.0[f.0]
    }

    pub fn values(&self) -> &[bool] {
        &self.0
    }

    /// Sets a base fact; call [`FactValuation::refresh_defined`] afterwards.
    pub fn set(&mut self, f: FactId, value: bool) {
        self.0[f.0] = value;
    }

    pub fn refresh_defined(&mut self, inst: &ProblemInstance) {
        for fact in &inst.facts {
            if let Some(def) = &fact.defined_by {
                let value = def.holds(&|g: &FactId| self.0[g.0]);
                self.0[fact.index.0] = value;
            }
        }
    }

    pub fn satisfies(&self, f: &Formula<FactId>) -> bool {
        f.holds(&|g: &FactId| self.0[g.0])
    }

    /// `{name:0/1,...}` rendering used in trace dumps.
    pub fn render(&self, inst: &ProblemInstance) -> String {
        let body: Vec<String> = inst
            .facts
            .iter()
            .map(|f| format!("{}:{}", f.name, u8::from(self.0[f.index.0])))
            .collect();
        format!("{{{}}}", body.join(","))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    pub facts: Vec<Fact>,
    pub operators: Vec<Operator>,
    pub rules: Vec<NondetRule>,
    pub init: Formula<FactId>,
    pub goal: Formula<FactId>,
}

impl ProblemInstance {
    /// Validates and builds an instance. Indices must already be dense.
    pub fn new(
        facts: Vec<Fact>,
        operators: Vec<Operator>,
        rules: Vec<NondetRule>,
        init: Formula<FactId>,
        goal: Formula<FactId>,
    ) -> Result<Self, DomainError> {
        let inst = ProblemInstance { facts, operators, rules, init, goal };
        inst.validate()?;
        Ok(inst)
    }

    fn validate(&self) -> Result<(), DomainError> {
        let n = self.facts.len();
        let in_range = |f: &FactId| -> Result<(), DomainError> {
            if f.0 < n {
                Ok(())
            } else {
                Err(DomainError::FactOutOfRange { index: f.0 })
            }
        };
        let mut names = HashSet::new();
        for (i, f) in self.facts.iter().enumerate() {
            assert_eq!(f.index.0, i, "fact indices must be dense");
            if !names.insert(f.name.as_str()) {
                return Err(DomainError::Duplicate { name: f.name.clone(), line: 0 });
            }
            if let Some(def) = &def_of(f) {
                for a in def.atoms() {
                    in_range(&a)?;
                    if self.facts[a.0].is_defined() {
                        return Err(DomainError::NestedDefinition { name: f.name.clone() });
                    }
                }
            }
        }
        let consistent = |lits: &[FactLit]| {
            let set: HashSet<FactLit> = lits.iter().copied().collect();
            lits.iter().all(|l| !set.contains(&l.complement()))
        };
        let mut op_names = HashSet::new();
        for (i, o) in self.operators.iter().enumerate() {
            assert_eq!(o.index.0, i, "operator indices must be dense");
            if !op_names.insert(o.name.as_str()) {
                return Err(DomainError::Duplicate { name: o.name.clone(), line: 0 });
            }
            if o.effects.is_empty() || o.effect_lits().next().is_none() {
                return Err(DomainError::EmptyEffect { name: o.name.clone() });
            }
            for l in o.pre.iter().chain(o.effect_lits()) {
                in_range(&l.fact)?;
            }
            if !o.effects.iter().all(|e| consistent(e)) {
                return Err(DomainError::ContradictoryEffect { name: o.name.clone() });
            }
            self.check_base_effects(&o.name, o.effect_lits())?;
        }
        for r in &self.rules {
            if !op_names.insert(r.name.as_str()) {
                return Err(DomainError::Duplicate { name: r.name.clone(), line: 0 });
            }
            if r.alternatives.len() < 2 {
                return Err(DomainError::TooFewAlternatives { name: r.name.clone() });
            }
            for l in r.pre.iter().chain(r.alternatives.iter().flatten()) {
                in_range(&l.fact)?;
            }
            if !r.alternatives.iter().all(|e| consistent(e)) {
                return Err(DomainError::ContradictoryEffect { name: r.name.clone() });
            }
            self.check_base_effects(&r.name, r.alternatives.iter().flatten())?;
        }
        for a in self.init.atoms().iter().chain(self.goal.atoms().iter()) {
            in_range(a)?;
        }
        Ok(())
    }

    fn check_base_effects<'a>(
        &self,
        name: &str,
        mut lits: impl Iterator<Item = &'a FactLit>,
    ) -> Result<(), DomainError> {
        match lits.find(|l| self.facts[l.fact.0].is_defined()) {
            Some(l) => Err(DomainError::DefinedEffect {
                name: name.to_string(),
                fact: self.facts[l.fact.0].name.clone(),
            }),
            None => Ok(()),
        }
    }

    pub fn num_ops(&self) -> usize {
        self.operators.len()
    }

    pub fn fact(&self, name: &str) -> Option<FactId> {
        self.facts.iter().find(|f| f.name == name).map(|f| f.index)
    }

    pub fn operator(&self, name: &str) -> Option<OpId> {
        self.operators.iter().find(|o| o.name == name).map(|o| o.index)
    }

    pub fn fact_name(&self, f: FactId) -> &str {
        &self.facts[f.0].name
    }

    /// Non-defined facts in index order.
    pub fn base_facts(&self) -> impl Iterator<Item = FactId> + '_ {
        self.facts.iter().filter(|f| !f.is_defined()).map(|f| f.index)
    }

    pub fn observables(&self) -> Vec<FactId> {
        self.facts.iter().filter(|f| f.observable).map(|f| f.index).collect()
    }

    /// Sum of precondition and effect sizes over all operators.
    pub fn sizeof_ops(&self) -> usize {
        self.operators
            .iter()
            .map(|o| o.pre.len() + o.effects.iter().map(Vec::len).sum::<usize>())
            .sum()
    }

    /// Operators with several alternatives, then rules, each with its
    /// alternative count. This fixes the order of choice sequences.
    pub fn nondet_sources(&self) -> Vec<(Source, usize)> {
        self.operators
            .iter()
            .filter(|o| !o.is_deterministic())
            .map(|o| (Source::Operator(o.index.0), o.effects.len()))
            .chain(self.rules.iter().map(|r| (Source::Rule(r.index), r.alternatives.len())))
            .collect()
    }

    /// Operators that must not fire at the same time: one's effects touch
    /// the other's precondition, or the two assert opposite literals.
    pub fn dependent(&self, a: OpId, b: OpId) -> bool {
        dependent(&self.operators[a.0], &self.operators[b.0])
    }

    /// All valuations of the base facts satisfying the initial formula, in
    /// lexicographic order (fact 0 most significant, false before true).
    pub fn enumerate_initial_states(&self, cap: usize) -> Result<Vec<FactValuation>, DomainError> {
        assert!(cap >= 1);
        let base: Vec<FactId> = self.base_facts().collect();
        let mut values = vec![false; self.facts.len()];
        let mut out = Vec::new();
        self.enumerate_rec(&self.init.simplify(), &base, 0, &mut values, cap, &mut out)?;
        Ok(out)
    }

    fn enumerate_rec(
        &self,
        f: &Formula<FactId>,
        base: &[FactId],
        depth: usize,
        values: &mut Vec<bool>,
        cap: usize,
        out: &mut Vec<FactValuation>,
    ) -> Result<(), DomainError> {
        if matches!(f, Formula::False) {
            return Ok(());
        }
        if depth == base.len() {
            debug_assert!(matches!(f, Formula::True));
            if out.len() == cap {
                return Err(DomainError::CapExceeded { count: out.len() + 1 });
            }
            let snapshot = values.clone();
            out.push(FactValuation::from_base(self, |g| snapshot[g.0]));
            return Ok(());
        }
        let fact = base[depth];
        for value in [false, true] {
            values[fact.0] = value;
            let g = f.simplify_with(&|a: &FactId| (*a == fact).then_some(value));
            self.enumerate_rec(&g, base, depth + 1, values, cap, out)?;
        }
        values[fact.0] = false;
        Ok(())
    }

    /// A random initial state: facts are fixed one at a time to a random
    /// value, backtracking when the formula becomes false. Not uniform.
    pub fn sample_initial_state(&self, rng: &mut impl rand::Rng) -> Option<FactValuation> {
        let base: Vec<FactId> = self.base_facts().collect();
        let mut values = vec![false; self.facts.len()];
        if !sample_rec(&self.init.simplify(), &base, 0, &mut values, rng) {
            return None;
        }
        Some(FactValuation::from_base(self, |g| values[g.0]))
    }

    /// Valuation of base facts from explicit values, for fixtures.
    pub fn valuation_from_true_facts(&self, true_facts: &[&str]) -> FactValuation {
        let ids: HashMap<FactId, ()> =
            true_facts.iter().map(|n| (self.fact(n).expect("known fact"), ())).collect();
        FactValuation::from_base(self, |f| ids.contains_key(&f))
    }
}

fn sample_rec(
    f: &Formula<FactId>,
    base: &[FactId],
    depth: usize,
    values: &mut [bool],
    rng: &mut impl rand::Rng,
) -> bool {
    if matches!(f, Formula::False) {
        return false;
    }
    if depth == base.len() {
        return true;
    }
    let fact = base[depth];
    let first: bool = rng.gen();
    for value in [first, !first] {
        values[fact.0] = value;
        let g = f.simplify_with(&|a: &FactId| (*a == fact).then_some(value));
        if sample_rec(&g, base, depth + 1, values, rng) {
            return true;
        }
    }
    false
}

fn def_of(f: &Fact) -> Option<Formula<FactId>> {
    f.defined_by.clone()
}

pub fn dependent(a: &Operator, b: &Operator) -> bool {
    let (ea, eb) = (a.effect_vars(), b.effect_vars());
    if !ea.is_disjoint(&b.pre_vars()) || !eb.is_disjoint(&a.pre_vars()) {
        return true;
    }
    let lits_b: HashSet<FactLit> = b.effect_lits().copied().collect();
    a.effect_lits().any(|l| lits_b.contains(&l.complement()))
}

impl fmt::Display for ProblemInstance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = |a: &FactId| self.facts[a.0].name.clone();
        let lits = |ls: &[FactLit]| -> String {
            ls.iter()
                .map(|l| format!(" {}{}", if l.positive { "" } else { "-" }, name(&l.fact)))
                .collect()
        };
        let mut run: Vec<&str> = Vec::new();
        for fact in &self.facts {
            match &fact.defined_by {
                None => run.push(&fact.name),
                Some(def) => {
                    if !run.is_empty() {
                        writeln!(f, "fact {}", run.join(" "))?;
                        run.clear();
                    }
                    writeln!(f, "defined {} {}", fact.name, def.to_sexpr(name))?;
                }
            }
        }
        if !run.is_empty() {
            writeln!(f, "fact {}", run.join(" "))?;
        }
        let obs: Vec<&str> =
            self.facts.iter().filter(|x| x.observable).map(|x| x.name.as_str()).collect();
        if !obs.is_empty() {
            writeln!(f, "observable {}", obs.join(" "))?;
        }
        for o in &self.operators {
            write!(f, "operator {} pre{}", o.name, lits(&o.pre))?;
            if o.is_deterministic() {
                writeln!(f, " post{}", lits(&o.effects[0]))?;
            } else {
                for e in &o.effects {
                    write!(f, " eff{}", lits(e))?;
                }
                writeln!(f)?;
            }
        }
        for r in &self.rules {
            write!(f, "rule {} pre{}", r.name, lits(&r.pre))?;
            for e in &r.alternatives {
                write!(f, " eff{}", lits(e))?;
            }
            writeln!(f)?;
        }
        writeln!(f, "init {}", self.init.to_sexpr(name))?;
        writeln!(f, "goal {}", self.goal.to_sexpr(name))
    }
}

//! ∀∃ QBFs as conditional-planning instances, with a brute-force
//! solvability check under the per-initial-state reachability semantics.

use std::collections::{HashSet, VecDeque};

use rand::Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::domain::{DomainError, Fact, FactId, FactLit, FactValuation, Operator, OpId, ProblemInstance};
use crate::logic::{Clause, Formula, QbfProblem, QuantBlock, Quantifier, VarId, VariableAtlas};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReductionError {
    #[error("more than {cap} reachable states from one initial state")]
    CapExceeded { cap: usize },
    #[error("nondeterministic operators or rules are not supported")]
    Nondeterministic,
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Variable of a ∀∃ formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum QVar {
    /// Universal `x_i`, 0-based.
    X(usize),
    /// Existential `y_i`, 0-based.
    Y(usize),
}

/// `∀x_1..x_n ∃y_1..y_m Φ` with `Φ` in CNF.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ForallExistsQbf {
    pub n: usize,
    pub m: usize,
    pub clauses: Vec<Vec<(QVar, bool)>>,
}

impl ForallExistsQbf {
    /// Fails if a clause mentions a variable outside the prefix.
    pub fn new(n: usize, m: usize, clauses: Vec<Vec<(QVar, bool)>>) -> Result<Self, String> {
        for c in &clauses {
            for &(v, _) in c {
                match v {
                    QVar::X(i) if i >= n => return Err(format!("x{} is not quantified", i + 1)),
                    QVar::Y(i) if i >= m => return Err(format!("y{} is not quantified", i + 1)),
                    _ => {}
                }
            }
        }
        Ok(ForallExistsQbf { n, m, clauses })
    }

    /// Same formula as a prenex CNF QBF: `x_i` is variable `i + 1`, `y_i`
    /// is variable `n + i + 1`.
    pub fn to_qbf(&self) -> QbfProblem {
        let var = |v: QVar| match v {
            QVar::X(i) => VarId(i as u32 + 1),
            QVar::Y(i) => VarId((self.n + i) as u32 + 1),
        };
        let prefix = vec![
            QuantBlock::new(Quantifier::Forall, (0..self.n).map(|i| var(QVar::X(i))).collect()),
            QuantBlock::new(Quantifier::Exists, (0..self.m).map(|i| var(QVar::Y(i))).collect()),
        ];
        // a clause with complementary literals is always true
        let matrix = self
            .clauses
            .iter()
            .filter_map(|c| Clause::new(c.iter().map(|&(v, pos)| var(v).lit(pos))))
            .collect();
        QbfProblem::new(prefix, matrix, VariableAtlas::new()).expect("prefix blocks are disjoint")
    }

    /// Reads a QBF whose prefix is `∀X ∃Y` (either block may be missing).
    /// Universals become `x_1..` and existentials `y_1..` in prefix order.
    pub fn from_qbf(q: &QbfProblem) -> Result<Self, String> {
        let (xs, ys): (&[VarId], &[VarId]) = match q.prefix() {
            [] => (&[], &[]),
            [b] if b.quantifier == Quantifier::Forall => (&b.vars, &[]),
            [b] => (&[], &b.vars),
            [a, b] if a.quantifier == Quantifier::Forall => (&a.vars, &b.vars),
            _ => return Err("prefix must be a universal block followed by an existential block".into()),
        };
        let mut index = std::collections::HashMap::new();
        index.extend(xs.iter().enumerate().map(|(i, &v)| (v, QVar::X(i))));
        index.extend(ys.iter().enumerate().map(|(i, &v)| (v, QVar::Y(i))));
        let clauses = q
            .matrix()
            .iter()
            .map(|c| c.lits().iter().map(|l| (index[&l.var()], l.is_positive())).collect())
            .collect();
        ForallExistsQbf::new(xs.len(), ys.len(), clauses)
    }

    /// Random instance with `1..=max_n` universals, `1..=max_m`
    /// existentials and `1..=max_clauses` clauses of 1 to 3 literals.
    pub fn random(rng: &mut impl Rng, max_n: usize, max_m: usize, max_clauses: usize) -> Self {
        let n = rng.gen_range(1..=max_n);
        let m = rng.gen_range(1..=max_m);
        let clauses = (0..rng.gen_range(1..=max_clauses))
            .map(|_| {
                (0..rng.gen_range(1..=3))
                    .map(|_| {
                        let v = if rng.gen_bool(0.5) { QVar::X(rng.gen_range(0..n)) } else { QVar::Y(rng.gen_range(0..m)) };
                        (v, rng.gen_bool(0.5))
                    })
                    .collect()
            })
            .collect();
        ForallExistsQbf { n, m, clauses }
    }
}

/// Planning instance that has a solution iff `f` is true. Facts are `sat`,
/// `s`, `y1..ym`, `c1..ct`, `x1..xn`; the `x` facts are left open
/// initially.
pub fn qbf_to_planning(f: &ForallExistsQbf) -> ProblemInstance {
    let t = f.clauses.len();
    let mut names = vec!["sat".to_string(), "s".to_string()];
    names.extend((1..=f.m).map(|i| format!("y{i}")));
    names.extend((1..=t).map(|j| format!("c{j}")));
    names.extend((1..=f.n).map(|i| format!("x{i}")));
    let facts: Vec<Fact> = names
        .into_iter()
        .enumerate()
        .map(|(i, name)| Fact { name, index: FactId(i), observable: false, defined_by: None })
        .collect();
    let (sat, s) = (FactId(0), FactId(1));
    let y = |i: usize| FactId(2 + i);
    let c = |j: usize| FactId(2 + f.m + j);
    let x = |i: usize| FactId(2 + f.m + t + i);

    let mut ops: Vec<(String, Vec<FactLit>, Vec<FactLit>)> = Vec::new();
    for i in 0..f.m {
        ops.push((format!("set-y{}", i + 1), vec![FactLit::pos(s)], vec![FactLit::pos(y(i))]));
    }
    ops.push(("conclude".into(), (0..t).map(|j| FactLit::pos(c(j))).collect(), vec![FactLit::pos(sat)]));
    for (j, clause) in f.clauses.iter().enumerate() {
        for (k, &(v, positive)) in clause.iter().enumerate() {
            let fact = match v {
                QVar::X(i) => x(i),
                QVar::Y(i) => y(i),
            };
            ops.push((
                format!("check-c{}-{}", j + 1, k + 1),
                vec![FactLit { fact, positive }],
                vec![FactLit::pos(c(j)), FactLit::neg(s)],
            ));
        }
    }
    let operators = ops
        .into_iter()
        .enumerate()
        .map(|(i, (name, pre, post))| Operator { name, index: OpId(i), pre, effects: vec![post] })
        .collect();

    let mut init = vec![Formula::not(Formula::atom(sat)), Formula::atom(s)];
    init.extend((0..f.m).map(|i| Formula::not(Formula::atom(y(i)))));
    init.extend((0..t).map(|j| Formula::not(Formula::atom(c(j)))));
    ProblemInstance::new(facts, operators, vec![], Formula::and(init), Formula::atom(sat))
        .expect("the construction is well formed")
}

/// True iff from every initial state some sequence of operator
/// applications reaches the goal. Each initial state is searched
/// breadth-first; `cap` bounds both the number of initial states and the
/// states visited from each.
pub fn solvable_by_search(inst: &ProblemInstance, cap: usize) -> Result<bool, ReductionError> {
    if !inst.rules.is_empty() || inst.operators.iter().any(|o| !o.is_deterministic()) {
        return Err(ReductionError::Nondeterministic);
    }
    let starts = inst.enumerate_initial_states(cap).map_err(|e| match e {
        DomainError::CapExceeded { .. } => ReductionError::CapExceeded { cap },
        e => ReductionError::Domain(e),
    })?;
    let results: Vec<Result<bool, ReductionError>> =
        starts.par_iter().map(|s| reaches_goal(inst, s, cap)).collect();
    for r in results {
        if !r? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn reaches_goal(inst: &ProblemInstance, start: &FactValuation, cap: usize) -> Result<bool, ReductionError> {
    let mut seen: HashSet<FactValuation> = HashSet::from([start.clone()]);
    let mut queue = VecDeque::from([start.clone()]);
    while let Some(v) = queue.pop_front() {
        if v.satisfies(&inst.goal) {
            return Ok(true);
        }
        for o in &inst.operators {
            if !o.pre_holds(&v) {
                continue;
            }
            let mut next = v.clone();
            for l in &o.effects[0] {
                next.set(l.fact, l.positive);
            }
            next.refresh_defined(inst);
            if seen.insert(next.clone()) {
                if seen.len() > cap {
                    return Err(ReductionError::CapExceeded { cap });
                }
                queue.push_back(next);
            }
        }
    }
    Ok(false)
}

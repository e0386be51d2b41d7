use std::collections::BTreeSet;
use std::fmt;

use super::LogicError;

/// Propositional formula over atoms of type `A`.
///
/// Domain formulae use fact indices as atoms; encoded formulae use solver
/// variables.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula<A> {
    True,
    False,
    Atom(A),
    Not(Box<Formula<A>>),
    And(Vec<Formula<A>>),
    Or(Vec<Formula<A>>),
    Imp(Box<Formula<A>>, Box<Formula<A>>),
    Iff(Box<Formula<A>>, Box<Formula<A>>),
}

impl<A> Formula<A> {
    pub fn atom(a: A) -> Self {
        Formula::Atom(a)
    }

    pub fn lit(a: A, positive: bool) -> Self {
        if positive {
            Formula::Atom(a)
        } else {
            Formula::Not(Box::new(Formula::Atom(a)))
        }
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula<A>) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(fs: impl IntoIterator<Item = Formula<A>>) -> Self {
        Formula::And(fs.into_iter().collect())
    }

    pub fn or(fs: impl IntoIterator<Item = Formula<A>>) -> Self {
        Formula::Or(fs.into_iter().collect())
    }

    pub fn imp(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Imp(Box::new(a), Box::new(b))
    }

    pub fn iff(a: Formula<A>, b: Formula<A>) -> Self {
        Formula::Iff(Box::new(a), Box::new(b))
    }

    /// Number of atom occurrences.
    pub fn size(&self) -> usize {
        match self {
            Formula::True | Formula::False => 0,
            Formula::Atom(_) => 1,
            Formula::Not(f) => f.size(),
            Formula::And(fs) | Formula::Or(fs) => fs.iter().map(Formula::size).sum(),
            Formula::Imp(a, b) | Formula::Iff(a, b) => a.size() + b.size(),
        }
    }

    pub fn map_atoms<B>(&self, f: &mut impl FnMut(&A) -> B) -> Formula<B> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => Formula::Atom(f(a)),
            Formula::Not(g) => Formula::Not(Box::new(g.map_atoms(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.map_atoms(f)).collect()),
            Formula::Imp(a, b) => Formula::Imp(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
            Formula::Iff(a, b) => Formula::Iff(Box::new(a.map_atoms(f)), Box::new(b.map_atoms(f))),
        }
    }

    /// Substitutes formulae for atoms.
    pub fn substitute<B>(&self, f: &mut impl FnMut(&A) -> Formula<B>) -> Formula<B> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => f(a),
            Formula::Not(g) => Formula::Not(Box::new(g.substitute(f))),
            Formula::And(gs) => Formula::And(gs.iter().map(|g| g.substitute(f)).collect()),
            Formula::Or(gs) => Formula::Or(gs.iter().map(|g| g.substitute(f)).collect()),
            Formula::Imp(a, b) => {
                Formula::Imp(Box::new(a.substitute(f)), Box::new(b.substitute(f)))
            }
            Formula::Iff(a, b) => {
                Formula::Iff(Box::new(a.substitute(f)), Box::new(b.substitute(f)))
            }
        }
    }

    pub fn visit_atoms<'a>(&'a self, f: &mut impl FnMut(&'a A)) {
        match self {
            Formula::True | Formula::False => {}
            Formula::Atom(a) => f(a),
            Formula::Not(g) => g.visit_atoms(f),
            Formula::And(gs) | Formula::Or(gs) => gs.iter().for_each(|g| g.visit_atoms(f)),
            Formula::Imp(a, b) | Formula::Iff(a, b) => {
                a.visit_atoms(f);
                b.visit_atoms(f);
            }
        }
    }

    /// Evaluates under a partial valuation; unvalued atoms are an error.
    pub fn eval(&self, value: &impl Fn(&A) -> Option<bool>) -> Result<bool, LogicError>
    where
        A: fmt::Debug,
    {
        Ok(match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => {
                value(a).ok_or_else(|| LogicError::UnvaluedAtom(format!("{a:?}")))?
            }
            Formula::Not(g) => !g.eval(value)?,
            Formula::And(gs) => {
                for g in gs {
                    if !g.eval(value)? {
                        return Ok(false);
                    }
                }
                true
            }
            Formula::Or(gs) => {
                for g in gs {
                    if g.eval(value)? {
                        return Ok(true);
                    }
                }
                false
            }
            Formula::Imp(a, b) => !a.eval(value)? || b.eval(value)?,
            Formula::Iff(a, b) => a.eval(value)? == b.eval(value)?,
        })
    }

    /// Total evaluation; panics on nothing since every atom is valued.
    pub fn holds(&self, value: &impl Fn(&A) -> bool) -> bool {
        match self {
            Formula::True => true,
            Formula::False => false,
            Formula::Atom(a) => value(a),
            Formula::Not(g) => !g.holds(value),
            Formula::And(gs) => gs.iter().all(|g| g.holds(value)),
            Formula::Or(gs) => gs.iter().any(|g| g.holds(value)),
            Formula::Imp(a, b) => !a.holds(value) || b.holds(value),
            Formula::Iff(a, b) => a.holds(value) == b.holds(value),
        }
    }
}

impl<A: Clone + Ord> Formula<A> {
    pub fn atoms(&self) -> BTreeSet<A> {
        let mut out = BTreeSet::new();
        self.visit_atoms(&mut |a| {
            out.insert(a.clone());
        });
        out
    }
}

fn negate_simplified<A>(f: Formula<A>) -> Formula<A> {
    match f {
        Formula::True => Formula::False,
        Formula::False => Formula::True,
        Formula::Not(h) => *h,
        h => Formula::Not(Box::new(h)),
    }
}

impl<A: Clone + PartialEq> Formula<A> {
    /// Partially evaluates the formula with constant folding. `value`
    /// returns `None` for atoms that stay symbolic.
    pub fn simplify_with(&self, value: &impl Fn(&A) -> Option<bool>) -> Formula<A> {
        match self {
            Formula::True => Formula::True,
            Formula::False => Formula::False,
            Formula::Atom(a) => match value(a) {
                Some(true) => Formula::True,
                Some(false) => Formula::False,
                None => Formula::Atom(a.clone()),
            },
            Formula::Not(g) => negate_simplified(g.simplify_with(value)),
            Formula::And(gs) => {
                let mut out = Vec::with_capacity(gs.len());
                for g in gs {
                    match g.simplify_with(value) {
                        Formula::True => {}
                        Formula::False => return Formula::False,
                        Formula::And(hs) => out.extend(hs),
                        h => out.push(h),
                    }
                }
                match out.len() {
                    0 => Formula::True,
                    1 => out.pop().unwrap(),
                    _ => Formula::And(out),
                }
            }
            Formula::Or(gs) => {
                let mut out = Vec::with_capacity(gs.len());
                for g in gs {
                    match g.simplify_with(value) {
                        Formula::False => {}
                        Formula::True => return Formula::True,
                        Formula::Or(hs) => out.extend(hs),
                        h => out.push(h),
                    }
                }
                match out.len() {
                    0 => Formula::False,
                    1 => out.pop().unwrap(),
                    _ => Formula::Or(out),
                }
            }
            Formula::Imp(a, b) => {
                let a = a.simplify_with(value);
                let b = b.simplify_with(value);
                match (a, b) {
                    (Formula::False, _) | (_, Formula::True) => Formula::True,
                    (Formula::True, b) => b,
                    (a, Formula::False) => negate_simplified(a),
                    (a, b) => Formula::imp(a, b),
                }
            }
            Formula::Iff(a, b) => {
                let a = a.simplify_with(value);
                let b = b.simplify_with(value);
                match (a, b) {
                    (Formula::True, x) | (x, Formula::True) => x,
                    (Formula::False, x) | (x, Formula::False) => negate_simplified(x),
                    (a, b) => Formula::iff(a, b),
                }
            }
        }
    }

    pub fn simplify(&self) -> Formula<A> {
        self.simplify_with(&|_| None)
    }
}

impl<A> Formula<A> {
    /// Writes the formula in the domain-file syntax, naming atoms with `name`.
    pub fn write_sexpr(
        &self,
        out: &mut impl fmt::Write,
        name: &impl Fn(&A) -> String,
    ) -> fmt::Result {
        match self {
            Formula::True => out.write_str("(true)"),
            Formula::False => out.write_str("(false)"),
            Formula::Atom(a) => out.write_str(&name(a)),
            Formula::Not(g) => {
                out.write_str("(not ")?;
                g.write_sexpr(out, name)?;
                out.write_str(")")
            }
            Formula::And(gs) | Formula::Or(gs) => {
                out.write_str(if matches!(self, Formula::And(_)) { "(and" } else { "(or" })?;
                for g in gs {
                    out.write_str(" ")?;
                    g.write_sexpr(out, name)?;
                }
                out.write_str(")")
            }
            Formula::Imp(a, b) | Formula::Iff(a, b) => {
                out.write_str(if matches!(self, Formula::Imp(..)) { "(imp " } else { "(iff " })?;
                a.write_sexpr(out, name)?;
                out.write_str(" ")?;
                b.write_sexpr(out, name)?;
                out.write_str(")")
            }
        }
    }

    pub fn to_sexpr(&self, name: impl Fn(&A) -> String) -> String {
        let mut s = String::new();
        self.write_sexpr(&mut s, &name).expect("writing to a String");
        s
    }
}

impl<A: fmt::Display> fmt::Display for Formula<A> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.write_sexpr(f, &|a: &A| a.to_string())
    }
}

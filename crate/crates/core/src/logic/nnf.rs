use super::Formula;

/// Negation normal form: negations only on atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Nnf<A> {
    True,
    False,
    Lit(A, bool),
    And(Vec<Nnf<A>>),
    Or(Vec<Nnf<A>>),
}

impl<A: Clone> Nnf<A> {
    pub(crate) fn from_formula(f: &Formula<A>) -> Nnf<A> {
        Self::convert(f, true)
    }

    fn convert(f: &Formula<A>, pos: bool) -> Nnf<A> {
        match f {
            Formula::True => {
                if pos {
                    Nnf::True
                } else {
                    Nnf::False
                }
            }
            Formula::False => {
                if pos {
                    Nnf::False
                } else {
                    Nnf::True
                }
            }
            Formula::Atom(a) => Nnf::Lit(a.clone(), pos),
            Formula::Not(g) => Self::convert(g, !pos),
            Formula::And(gs) => {
                let parts = gs.iter().map(|g| Self::convert(g, pos)).collect();
                if pos {
                    Nnf::and(parts)
                } else {
                    Nnf::or(parts)
                }
            }
            Formula::Or(gs) => {
                let parts = gs.iter().map(|g| Self::convert(g, pos)).collect();
                if pos {
                    Nnf::or(parts)
                } else {
                    Nnf::and(parts)
                }
            }
            Formula::Imp(a, b) => {
                if pos {
                    Nnf::or(vec![Self::convert(a, false), Self::convert(b, true)])
                } else {
                    Nnf::and(vec![Self::convert(a, true), Self::convert(b, false)])
                }
            }
            Formula::Iff(a, b) => {
                // a <-> b  ==  (~a | b) & (a | ~b)
                // ~(a <-> b) == (a | b) & (~a | ~b)
                let (pa, na) = (Self::convert(a, true), Self::convert(a, false));
                let (pb, nb) = (Self::convert(b, true), Self::convert(b, false));
                if pos {
                    Nnf::and(vec![Nnf::or(vec![na, pb]), Nnf::or(vec![pa, nb])])
                } else {
                    Nnf::and(vec![Nnf::or(vec![pa, pb]), Nnf::or(vec![na, nb])])
                }
            }
        }
    }

    /// Flattening conjunction with constant folding.
    pub(crate) fn and(parts: Vec<Nnf<A>>) -> Nnf<A> {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Nnf::True => {}
                Nnf::False => return Nnf::False,
                Nnf::And(qs) => out.extend(qs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Nnf::True,
            1 => out.pop().unwrap(),
            _ => Nnf::And(out),
        }
    }

    pub(crate) fn or(parts: Vec<Nnf<A>>) -> Nnf<A> {
        let mut out = Vec::with_capacity(parts.len());
        for p in parts {
            match p {
                Nnf::False => {}
                Nnf::True => return Nnf::True,
                Nnf::Or(qs) => out.extend(qs),
                p => out.push(p),
            }
        }
        match out.len() {
            0 => Nnf::False,
            1 => out.pop().unwrap(),
            _ => Nnf::Or(out),
        }
    }
}

use std::collections::{BTreeMap, BTreeSet};

use super::nnf::Nnf;
use super::{Formula, LogicError};

pub const DEFAULT_DNF_CAP: usize = 4096;

type Term<A> = BTreeMap<A, bool>;

/// Disjunctive normal form in which every term mentions exactly the atoms
/// of `f`. Terms are consistent, distinct and sorted; each is a list of
/// `(atom, polarity)` pairs in atom order.
///
/// Fails with [`LogicError::DnfCap`] when any intermediate or final term set
/// would exceed `cap`.
pub fn to_padded_dnf<A: Clone + Ord>(
    f: &Formula<A>,
    cap: usize,
) -> Result<Vec<Vec<(A, bool)>>, LogicError> {
    let atoms: Vec<A> = f.atoms().into_iter().collect();
    let terms = dnf(&Nnf::from_formula(f), cap)?;
    let mut out: BTreeSet<Vec<(A, bool)>> = BTreeSet::new();
    for term in terms {
        let missing: Vec<&A> = atoms.iter().filter(|a| !term.contains_key(*a)).collect();
        if missing.len() > 40 {
            return Err(LogicError::DnfCap { cap });
        }
        for bits in 0u64..(1u64 << missing.len()) {
            let mut padded = term.clone();
            for (k, a) in missing.iter().enumerate() {
                padded.insert((*a).clone(), bits >> (missing.len() - 1 - k) & 1 == 1);
            }
            out.insert(padded.into_iter().collect());
            if out.len() > cap {
                return Err(LogicError::DnfCap { cap });
            }
        }
    }
    Ok(out.into_iter().collect())
}

fn dnf<A: Clone + Ord>(f: &Nnf<A>, cap: usize) -> Result<Vec<Term<A>>, LogicError> {
    match f {
        Nnf::True => Ok(vec![Term::new()]),
        Nnf::False => Ok(vec![]),
        Nnf::Lit(a, pos) => Ok(vec![Term::from([(a.clone(), *pos)])]),
        Nnf::Or(gs) => {
            let mut out = Vec::new();
            for g in gs {
                out.extend(dnf(g, cap)?);
                if out.len() > cap {
                    return Err(LogicError::DnfCap { cap });
                }
            }
            Ok(out)
        }
        Nnf::And(gs) => {
            let mut acc: Vec<Term<A>> = vec![Term::new()];
            for g in gs {
                let part = dnf(g, cap)?;
                let mut next = Vec::new();
                for t in &acc {
                    'terms: for p in &part {
                        let mut merged = t.clone();
                        for (a, v) in p {
                            match merged.insert(a.clone(), *v) {
                                Some(old) if old != *v => continue 'terms,
                                _ => {}
                            }
                        }
                        next.push(merged);
                        if next.len() > cap {
                            return Err(LogicError::DnfCap { cap });
                        }
                    }
                }
                acc = next;
                if acc.is_empty() {
                    break;
                }
            }
            Ok(acc)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type F = Formula<u8>;

    fn a(x: u8) -> F {
        Formula::atom(x)
    }

    /// Truth-table oracle: set of satisfying assignments over `atoms`.
    fn models(f: &F, atoms: &[u8]) -> BTreeSet<Vec<(u8, bool)>> {
        let mut out = BTreeSet::new();
        for bits in 0u32..(1 << atoms.len()) {
            let val = |x: &u8| {
                let i = atoms.iter().position(|y| y == x).unwrap();
                bits >> i & 1 == 1
            };
            if f.holds(&val) {
                out.insert(atoms.iter().map(|x| (*x, val(x))).collect());
            }
        }
        out
    }

    #[test]
    fn absorption_example() {
        let f = Formula::or([a(0), Formula::and([a(0), a(1)])]);
        let terms = to_padded_dnf(&f, DEFAULT_DNF_CAP).unwrap();
        assert_eq!(terms, vec![vec![(0, true), (1, false)], vec![(0, true), (1, true)]]);
        assert_eq!(terms.into_iter().collect::<BTreeSet<_>>(), models(&f, &[0, 1]));
    }

    #[test]
    fn false_has_no_terms() {
        assert!(to_padded_dnf(&F::False, 16).unwrap().is_empty());
        assert_eq!(to_padded_dnf(&F::True, 16).unwrap(), vec![Vec::<(u8, bool)>::new()]);
    }

    #[test]
    fn cap_is_enforced() {
        // (x0|y0)&(x1|y1)&... has 2^n terms before padding.
        let f = Formula::and((0..6).map(|i| Formula::or([a(2 * i), a(2 * i + 1)])));
        assert!(matches!(to_padded_dnf(&f, 32), Err(LogicError::DnfCap { cap: 32 })));
        assert!(to_padded_dnf(&f, 4096).is_ok());
    }

    #[test]
    fn inconsistent_terms_vanish() {
        let f = Formula::and([a(0), Formula::not(a(0))]);
        assert!(to_padded_dnf(&f, 16).unwrap().is_empty());
    }
}

use super::nnf::Nnf;
use super::{Clause, Formula, Lit, VarId, VariableAtlas};

/// Products of at most this many clauses are distributed directly; larger
/// disjunctions name their widest conjunctive disjunct with a fresh variable.
const DISTRIBUTE_LIMIT: usize = 64;

/// Polarity-aware definitional CNF transformation.
///
/// Formulae are first put in negation normal form, so every subformula
/// occurs positively and a one-sided definition `t -> g` suffices for each
/// named subformula `g`. The fresh variables are registered in the atlas
/// and collected in [`Clausifier::aux_vars`]; they must be quantified
/// existentially in the innermost block.
pub struct Clausifier<'a> {
    atlas: &'a mut VariableAtlas,
    aux: Vec<VarId>,
    defs: Vec<Vec<Lit>>,
}

impl<'a> Clausifier<'a> {
    pub fn new(atlas: &'a mut VariableAtlas) -> Self {
        Clausifier { atlas, aux: Vec::new(), defs: Vec::new() }
    }

    pub fn atlas(&mut self) -> &mut VariableAtlas {
        self.atlas
    }

    /// Clauses equisatisfiable with `f` (over the fresh variables).
    pub fn clausify(&mut self, f: &Formula<VarId>) -> Vec<Clause> {
        let nnf = Nnf::from_formula(f);
        let mut raw = self.cnf(&nnf);
        raw.append(&mut self.defs);
        raw.into_iter().filter_map(Clause::new).collect()
    }

    pub fn aux_vars(&self) -> &[VarId] {
        &self.aux
    }

    pub fn into_aux_vars(self) -> Vec<VarId> {
        self.aux
    }

    fn cnf(&mut self, f: &Nnf<VarId>) -> Vec<Vec<Lit>> {
        match f {
            Nnf::True => vec![],
            Nnf::False => vec![vec![]],
            Nnf::Lit(v, pos) => vec![vec![v.lit(*pos)]],
            Nnf::And(gs) => gs.iter().flat_map(|g| self.cnf(g)).collect(),
            Nnf::Or(gs) => {
                let mut parts: Vec<Vec<Vec<Lit>>> = Vec::with_capacity(gs.len());
                for g in gs {
                    let c = self.cnf(g);
                    if c.is_empty() {
                        // a disjunct is valid
                        return vec![];
                    }
                    parts.push(c);
                }
                loop {
                    let product = parts
                        .iter()
                        .try_fold(1usize, |acc, p| acc.checked_mul(p.len()))
                        .unwrap_or(usize::MAX);
                    if product <= DISTRIBUTE_LIMIT {
                        break;
                    }
                    let widest = (0..parts.len()).max_by_key(|&i| parts[i].len()).unwrap();
                    let t = self.atlas.fresh_tseitin();
                    self.aux.push(t);
                    for mut c in std::mem::take(&mut parts[widest]) {
                        c.push(t.lit(false));
                        self.defs.push(c);
                    }
                    parts[widest] = vec![vec![t.lit(true)]];
                }
                let mut acc: Vec<Vec<Lit>> = vec![vec![]];
                for p in parts {
                    let mut next = Vec::with_capacity(acc.len() * p.len());
                    for a in &acc {
                        for c in &p {
                            let mut merged = a.clone();
                            merged.extend_from_slice(c);
                            next.push(merged);
                        }
                    }
                    acc = next;
                }
                acc
            }
        }
    }
}

/// One-shot clausification; returns the clauses and the fresh auxiliaries.
pub fn clausify(f: &Formula<VarId>, atlas: &mut VariableAtlas) -> (Vec<Clause>, Vec<VarId>) {
    let mut c = Clausifier::new(atlas);
    let clauses = c.clausify(f);
    (clauses, c.into_aux_vars())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::VarIdentity;
    use std::collections::HashMap;

    fn fresh(atlas: &mut VariableAtlas, k: usize) -> Vec<VarId> {
        (0..k).map(|i| atlas.var(VarIdentity::AuxInit { k: i + 1 })).collect()
    }

    /// Truth-table oracle: for every valuation of the original atoms,
    /// `f` holds iff some extension to the auxiliaries satisfies the clauses.
    fn equisatisfiable(f: &Formula<VarId>, vars: &[VarId], clauses: &[Clause], aux: &[VarId]) {
        for bits in 0u32..(1 << vars.len()) {
            let mut val: HashMap<VarId, bool> =
                vars.iter().enumerate().map(|(i, v)| (*v, bits >> i & 1 == 1)).collect();
            let expected = f.holds(&|v| val[v]);
            let mut found = false;
            for abits in 0u32..(1 << aux.len()) {
                for (i, t) in aux.iter().enumerate() {
                    val.insert(*t, abits >> i & 1 == 1);
                }
                if clauses.iter().all(|c| c.eval(|v| val[&v])) {
                    found = true;
                    break;
                }
            }
            assert_eq!(found, expected, "valuation {bits:b}");
        }
    }

    #[test]
    fn clause_passes_through() {
        let mut atlas = VariableAtlas::new();
        let v = fresh(&mut atlas, 2);
        let f = Formula::or([Formula::lit(v[0], false), Formula::atom(v[1])]);
        let (cs, aux) = clausify(&f, &mut atlas);
        assert!(aux.is_empty());
        assert_eq!(cs, vec![Clause::new([v[0].lit(false), v[1].lit(true)]).unwrap()]);
    }

    #[test]
    fn nested_biconditional_is_equisatisfiable() {
        let mut atlas = VariableAtlas::new();
        let v = fresh(&mut atlas, 5);
        let at = |i: usize| Formula::atom(v[i]);
        let f = Formula::iff(
            at(0),
            Formula::or([Formula::and([at(1), at(2)]), Formula::and([at(3), at(4)])]),
        );
        let (cs, aux) = clausify(&f, &mut atlas);
        equisatisfiable(&f, &v, &cs, &aux);
    }

    #[test]
    fn wide_disjunction_gets_named() {
        let mut atlas = VariableAtlas::new();
        let v = fresh(&mut atlas, 12);
        let at = |i: usize| Formula::atom(v[i]);
        // (a&b&c) | (d&e&f) | (g&h&i) | (j&k&l): product 81 > limit
        let f = Formula::or((0..4).map(|k| Formula::and([at(3 * k), at(3 * k + 1), at(3 * k + 2)])));
        let (cs, aux) = clausify(&f, &mut atlas);
        assert!(!aux.is_empty());
        equisatisfiable(&f, &v, &cs, &aux);
    }

    #[test]
    fn constants() {
        let mut atlas = VariableAtlas::new();
        assert!(clausify(&Formula::True, &mut atlas).0.is_empty());
        assert_eq!(clausify(&Formula::False, &mut atlas).0, vec![Clause::empty()]);
    }
}

use std::collections::HashMap;

use crate::logic::Clause;

/// Union-find over dense indices with path halving.
pub(crate) struct DisjointSets {
    parent: Vec<u32>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        DisjointSets { parent: (0..n as u32).collect() }
    }

    pub(crate) fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let p = self.parent[x as usize];
            self.parent[x as usize] = self.parent[p as usize];
            x = p;
        }
        x
    }

    pub(crate) fn union(&mut self, a: u32, b: u32) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb) as usize] = ra.min(rb);
        }
    }
}

/// Splits a clause set into connected components of the clause/variable
/// incidence graph. Components are ordered by their first clause; clause
/// order is preserved inside each component. Empty clauses form singleton
/// components.
pub fn partition(matrix: &[Clause]) -> Vec<Vec<Clause>> {
    let mut ds = DisjointSets::new(matrix.len());
    let mut owner: HashMap<u32, u32> = HashMap::new();
    for (i, c) in matrix.iter().enumerate() {
        for l in c.lits() {
            match owner.get(&l.var().0) {
                Some(&j) => ds.union(i as u32, j),
                None => {
                    owner.insert(l.var().0, i as u32);
                }
            }
        }
    }
    let mut index: HashMap<u32, usize> = HashMap::new();
    let mut out: Vec<Vec<Clause>> = Vec::new();
    for (i, c) in matrix.iter().enumerate() {
        let root = ds.find(i as u32);
        let k = *index.entry(root).or_insert_with(|| {
            out.push(Vec::new());
            out.len() - 1
        });
        out[k].push(c.clone());
    }
    out
}

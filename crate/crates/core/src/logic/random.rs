//! Seeded random QBF generation for differential testing and benchmarks.

use rand::seq::SliceRandom;
use rand::Rng;

use super::{Clause, QbfProblem, QuantBlock, Quantifier, VarId, VariableAtlas};

#[derive(Debug, Clone, Copy)]
pub struct RandomQbfParams {
    pub max_vars: u32,
    pub max_clauses: usize,
    pub min_blocks: usize,
    pub max_blocks: usize,
    pub max_clause_len: usize,
}

impl Default for RandomQbfParams {
    fn default() -> Self {
        RandomQbfParams { max_vars: 12, max_clauses: 30, min_blocks: 2, max_blocks: 4, max_clause_len: 4 }
    }
}

/// Draws a prenex CNF QBF. Block count, variable count and clause count
/// are sampled within the limits; the outermost quantifier is random.
pub fn random_qbf(rng: &mut impl Rng, p: &RandomQbfParams) -> QbfProblem {
    let blocks = rng.gen_range(p.min_blocks..=p.max_blocks);
    let nvars = rng.gen_range((blocks as u32).max(2)..=p.max_vars.max(blocks as u32));
    let mut vars: Vec<VarId> = (1..=nvars).map(VarId).collect();
    vars.shuffle(rng);

    // Split the shuffled variables into `blocks` non-empty runs.
    let mut cuts: Vec<usize> = (1..nvars as usize).collect();
    cuts.shuffle(rng);
    let mut cuts: Vec<usize> = cuts.into_iter().take(blocks - 1).collect();
    cuts.sort_unstable();
    let mut prefix = Vec::with_capacity(blocks);
    let mut start = 0;
    let mut q = if rng.gen_bool(0.5) { Quantifier::Exists } else { Quantifier::Forall };
    for end in cuts.into_iter().chain(std::iter::once(nvars as usize)) {
        let mut block = vars[start..end].to_vec();
        block.sort();
        prefix.push(QuantBlock::new(q, block));
        start = end;
        q = match q {
            Quantifier::Exists => Quantifier::Forall,
            Quantifier::Forall => Quantifier::Exists,
        };
    }

    let nclauses = rng.gen_range(1..=p.max_clauses);
    let mut matrix = Vec::with_capacity(nclauses);
    while matrix.len() < nclauses {
        let len = rng.gen_range(1..=p.max_clause_len);
        let lits = (0..len).map(|_| VarId(rng.gen_range(1..=nvars)).lit(rng.gen_bool(0.5)));
        if let Some(c) = Clause::new(lits) {
            matrix.push(c);
        }
    }
    QbfProblem::new(prefix, matrix, VariableAtlas::new()).expect("blocks are disjoint")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn respects_limits() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let p = RandomQbfParams::default();
        for _ in 0..100 {
            let q = random_qbf(&mut rng, &p);
            assert!(q.num_vars() <= 12);
            assert!(q.num_clauses() <= 30);
            assert!((1..=4).contains(&q.prefix().len()));
        }
    }
}

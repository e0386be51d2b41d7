//! QDPLL-style decision procedure for prenex CNF QBFs, with an expansion
//! oracle for small instances.

mod engine;
mod expand;
mod partition;

use std::fmt;
use std::time::Duration;

use thiserror::Error;

use crate::logic::{Lit, QbfProblem};

pub use expand::{expand_eval, EXPAND_VAR_LIMIT};
pub use partition::partition;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("expansion oracle limited to {limit} variables, problem has {found}")]
    TooLarge { limit: u32, found: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverConfig {
    pub enable_failed_literal: bool,
    /// Failed-literal tests on variables outside the active block, using
    /// purely propositional propagation.
    pub enable_inner_failed_literal: bool,
    pub enable_universal_probing: bool,
    pub enable_partitioning: bool,
    /// Universal probes per search node.
    pub probe_budget: usize,
    /// When the universal block next to the active one has at most this
    /// many unassigned variables, every assignment to it is probed.
    pub full_probe_bits: usize,
    pub seed: u64,
    pub node_cap: Option<u64>,
    pub time_cap: Option<Duration>,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            enable_failed_literal: true,
            enable_inner_failed_literal: true,
            enable_universal_probing: true,
            enable_partitioning: true,
            probe_budget: 2,
            full_probe_bits: 7,
            seed: 0,
            node_cap: None,
            time_cap: None,
        }
    }
}

impl SolverConfig {
    /// Everything off: plain backtracking search with unit propagation and
    /// universal reduction.
    pub fn plain() -> Self {
        SolverConfig {
            enable_failed_literal: false,
            enable_inner_failed_literal: false,
            enable_universal_probing: false,
            enable_partitioning: false,
            ..SolverConfig::default()
        }
    }

    /// The configuration selected by the low four bits of `mask`
    /// (failed literals, inner failed literals, probing, partitioning).
    pub fn from_flags(mask: u8) -> Self {
        SolverConfig {
            enable_failed_literal: mask & 1 != 0,
            enable_inner_failed_literal: mask & 2 != 0,
            enable_universal_probing: mask & 4 != 0,
            enable_partitioning: mask & 8 != 0,
            ..SolverConfig::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    True,
    False,
    /// A node or time cap was hit.
    Unknown,
}

impl Outcome {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Outcome::True => Some(true),
            Outcome::False => Some(false),
            Outcome::Unknown => None,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::True => "true",
            Outcome::False => "false",
            Outcome::Unknown => "unknown",
        })
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolverStats {
    /// Branching nodes of the search tree.
    pub nodes: u64,
    pub propagations: u64,
    pub duration: Duration,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolverResult {
    pub outcome: Outcome,
    /// Values of the outermost block when it is existential and the
    /// outcome is true, sorted by variable.
    pub witness: Option<Vec<Lit>>,
    pub stats: SolverStats,
}

impl SolverResult {
    pub fn value(&self) -> Option<bool> {
        self.outcome.as_bool()
    }

    /// `result=... nodes=... props=... ms=...`
    pub fn stats_line(&self) -> String {
        format!(
            "result={} nodes={} props={} ms={}",
            self.outcome,
            self.stats.nodes,
            self.stats.propagations,
            self.stats.duration.as_millis()
        )
    }

    /// `v <lits> 0`, present only with a witness.
    pub fn witness_line(&self) -> Option<String> {
        self.witness.as_ref().map(|w| {
            let mut s = String::from("v");
            for l in w {
                s.push(' ');
                s.push_str(&l.to_string());
            }
            s.push_str(" 0");
            s
        })
    }
}

pub fn solve(q: &QbfProblem, cfg: &SolverConfig) -> SolverResult {
    engine::Engine::new(q, cfg).run(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::logic::random::{random_qbf, RandomQbfParams};
    use crate::logic::{qdimacs, Clause, QuantBlock, Quantifier, VarId, VariableAtlas};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn q(text: &str) -> QbfProblem {
        qdimacs::read(text).unwrap()
    }

    fn all_configs() -> Vec<SolverConfig> {
        (0..16).map(SolverConfig::from_flags).collect()
    }

    #[test]
    fn small_fixtures_match_expansion() {
        let cases = [
            ("p cnf 2 2\ne 1 2 0\n1 0\n2 0\n", true),
            ("p cnf 2 2\na 1 0\ne 2 0\n-1 2 0\n1 -2 0\n", true),
            ("p cnf 2 2\ne 1 0\na 2 0\n-1 2 0\n1 -2 0\n", false),
            ("p cnf 2 1\na 1 2 0\n1 2 0\n", false),
        ];
        for (text, expected) in cases {
            let p = q(text);
            assert_eq!(expand_eval(&p).unwrap(), expected);
            for cfg in all_configs() {
                assert_eq!(solve(&p, &cfg).value(), Some(expected), "{text} {cfg:?}");
            }
        }
    }

    #[test]
    fn trivial_matrices() {
        let empty = QbfProblem::new(vec![], vec![], VariableAtlas::new()).unwrap();
        assert_eq!(solve(&empty, &SolverConfig::default()).value(), Some(true));
        let contradiction =
            QbfProblem::new(vec![], vec![Clause::empty()], VariableAtlas::new()).unwrap();
        assert_eq!(solve(&contradiction, &SolverConfig::default()).value(), Some(false));
    }

    #[test]
    fn universal_reduction_forces_outer_existential() {
        // exists x forall u: (x | u)
        let p = QbfProblem::new(
            vec![
                QuantBlock::new(Quantifier::Exists, vec![VarId(1)]),
                QuantBlock::new(Quantifier::Forall, vec![VarId(2)]),
            ],
            vec![Clause::new([VarId(1).lit(true), VarId(2).lit(true)]).unwrap()],
            VariableAtlas::new(),
        )
        .unwrap();
        assert!(expand_eval(&p).unwrap());
        for cfg in all_configs() {
            let r = solve(&p, &cfg);
            assert_eq!(r.value(), Some(true));
            assert_eq!(r.witness, Some(vec![VarId(1).lit(true)]));
        }
    }

    #[test]
    fn inner_existential_is_not_fixed_by_a_failed_literal() {
        // forall u exists p: p <-> u. Asserting p fails propositionally only
        // through the universal, which must not count.
        let p = q("p cnf 2 2\na 1 0\ne 2 0\n-2 1 0\n2 -1 0\n");
        for cfg in all_configs() {
            assert_eq!(solve(&p, &cfg).value(), Some(true), "{cfg:?}");
        }
    }

    #[test]
    fn agrees_with_expansion_on_random_formulae() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let params = RandomQbfParams::default();
        let mut truths = 0;
        for i in 0..60 {
            let p = random_qbf(&mut rng, &params);
            let expected = expand_eval(&p).unwrap();
            truths += usize::from(expected);
            for cfg in all_configs() {
                let r = solve(&p, &cfg);
                assert_eq!(r.value(), Some(expected), "instance {i} cfg {cfg:?}\n{}", qdimacs::write(&p));
            }
        }
        assert!(truths > 5 && truths < 55, "{truths} true instances");
    }

    #[test]
    fn witnesses_re_solve_true() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let params = RandomQbfParams { max_clauses: 10, ..Default::default() };
        let mut checked = 0;
        for _ in 0..200 {
            let p = random_qbf(&mut rng, &params);
            let r = solve(&p, &SolverConfig::default());
            if let Some(w) = &r.witness {
                assert_eq!(p.prefix()[0].vars.len(), w.len());
                assert!(expand_eval(&p.assume(w)).unwrap());
                checked += 1;
            }
        }
        assert!(checked > 10);
    }

    #[test]
    fn node_cap_yields_unknown() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let params = RandomQbfParams { max_vars: 12, max_clauses: 30, ..Default::default() };
        let cfg = SolverConfig { node_cap: Some(0), ..SolverConfig::plain() };
        let mut saw_unknown = false;
        for _ in 0..50 {
            let p = random_qbf(&mut rng, &params);
            let r = solve(&p, &cfg);
            if r.stats.nodes > 0 || r.outcome == Outcome::Unknown {
                saw_unknown |= r.outcome == Outcome::Unknown;
            }
        }
        assert!(saw_unknown);
    }

    #[test]
    fn deterministic_statistics() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = random_qbf(&mut rng, &RandomQbfParams::default());
        let a = solve(&p, &SolverConfig::default());
        let b = solve(&p, &SolverConfig::default());
        assert_eq!((a.outcome, a.stats.nodes, a.stats.propagations), (b.outcome, b.stats.nodes, b.stats.propagations));
        assert_eq!(a.witness, b.witness);
    }
}

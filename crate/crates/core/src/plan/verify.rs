use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::domain::{DomainError, FactValuation, ProblemInstance};
use crate::encoder::MutexMode;

use super::{execute, ChoiceSeq, Plan, PlanError};

/// Failures kept in a report; the total is always counted.
const KEPT_FAILURES: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FailureReason {
    GoalNotReached,
    EffectConflict { t: usize, fact: String },
    /// Two operators fired together that the mutex mode keeps apart.
    Interference { t: usize, first: String, second: String },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Failure {
    pub initial: FactValuation,
    pub choices: ChoiceSeq,
    pub reason: FailureReason,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub scenarios: usize,
    /// Every initial state and choice sequence was tried.
    pub exhaustive: bool,
    pub failure_count: usize,
    pub failures: Vec<Failure>,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.failure_count == 0
    }
}

#[derive(Debug, Clone)]
pub struct VerifyOptions {
    /// Above this many scenarios, this many are sampled instead.
    pub scenario_cap: usize,
    pub seed: u64,
    /// Operators that must not fire at the same time.
    pub mutex: MutexMode,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { scenario_cap: 1 << 20, seed: 0, mutex: MutexMode::DependentPairs }
    }
}

impl VerifyOptions {
    pub fn with_cap(scenario_cap: usize) -> Self {
        VerifyOptions { scenario_cap, ..VerifyOptions::default() }
    }

    pub fn with_mutex(self, mutex: MutexMode) -> Self {
        VerifyOptions { mutex, ..self }
    }
}

/// Runs `plan` for `t_max` steps from every initial state under every
/// choice sequence and checks the goal at the end.
pub fn verify_plan(
    plan: &Plan,
    inst: &ProblemInstance,
    t_max: usize,
    opts: &VerifyOptions,
) -> Result<VerificationReport, PlanError> {
    let (cap, seed, mutex) = (opts.scenario_cap.max(1), opts.seed, opts.mutex);
    let arities: Vec<usize> = inst.nondet_sources().iter().map(|&(_, k)| k).collect();
    let per_step = arities.iter().try_fold(1usize, |acc, &k| acc.checked_mul(k));
    let choice_count = per_step.and_then(|p| (0..t_max).try_fold(1usize, |acc, _| acc.checked_mul(p)));

    let states = match inst.enumerate_initial_states(cap) {
        Ok(s) => Some(s),
        Err(DomainError::CapExceeded { .. }) => None,
        Err(e) => return Err(PlanError::Shape(e.to_string())),
    };
    if states.as_ref().is_some_and(|s| s.is_empty()) {
        return Err(PlanError::Shape("the initial formula is unsatisfiable".into()));
    }
    let total = match (&states, choice_count) {
        (Some(s), Some(c)) => s.len().checked_mul(c),
        _ => None,
    };
    let exhaustive = total.is_some_and(|n| n <= cap);

    let scenarios: Vec<(FactValuation, ChoiceSeq)> = if exhaustive {
        let states = states.unwrap();
        let seqs = all_choice_seqs(&arities, t_max);
        states.iter().flat_map(|s| seqs.iter().map(move |c| (s.clone(), c.clone()))).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..cap)
            .map(|_| {
                let s = match &states {
                    Some(all) => all[rng.gen_range(0..all.len())].clone(),
                    None => inst.sample_initial_state(&mut rng).expect("initial formula is satisfiable"),
                };
                let c: ChoiceSeq =
                    (0..t_max).map(|_| arities.iter().map(|&k| rng.gen_range(0..k)).collect()).collect();
                (s, c)
            })
            .collect()
    };

    // shape errors surface before the parallel run
    if let Err(e @ PlanError::Shape(_)) = execute(plan, inst, &scenarios[0].0, t_max, &scenarios[0].1, mutex) {
        return Err(e);
    }

    let failures: Vec<Failure> = scenarios
        .par_iter()
        .filter_map(|(s, c)| {
            let reason = match execute(plan, inst, s, t_max, c, mutex) {
                Ok(trace) if trace.last().satisfies(&inst.goal) => return None,
                Ok(_) => FailureReason::GoalNotReached,
                Err(PlanError::EffectConflict { t, fact }) => FailureReason::EffectConflict { t, fact },
                Err(PlanError::Interference { t, first, second }) => FailureReason::Interference { t, first, second },
                Err(e) => unreachable!("checked above: {e}"),
            };
            Some(Failure { initial: s.clone(), choices: c.clone(), reason })
        })
        .collect();
    Ok(VerificationReport {
        scenarios: scenarios.len(),
        exhaustive,
        failure_count: failures.len(),
        failures: failures.into_iter().take(KEPT_FAILURES).collect(),
    })
}

fn all_choice_seqs(arities: &[usize], t_max: usize) -> Vec<ChoiceSeq> {
    if arities.is_empty() {
        return vec![vec![]];
    }
    let mut out: Vec<ChoiceSeq> = vec![vec![]];
    for _ in 0..t_max {
        let mut next = Vec::new();
        for prefix in &out {
            let mut step = vec![0; arities.len()];
            loop {
                let mut seq = prefix.clone();
                seq.push(step.clone());
                next.push(seq);
                // odometer increment
                let mut k = 0;
                while k < arities.len() {
                    step[k] += 1;
                    if step[k] < arities[k] {
                        break;
                    }
                    step[k] = 0;
                    k += 1;
                }
                if k == arities.len() {
                    break;
                }
            }
        }
        out = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn choice_sequences_cover_the_product() {
        let seqs = all_choice_seqs(&[2, 3], 2);
        assert_eq!(seqs.len(), 36);
        let distinct: std::collections::BTreeSet<_> = seqs.iter().collect();
        assert_eq!(distinct.len(), 36);
        assert_eq!(all_choice_seqs(&[], 5), vec![Vec::<Vec<usize>>::new()]);
    }
}

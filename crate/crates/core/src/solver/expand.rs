use super::SolverError;
use crate::logic::{QbfProblem, Quantifier};

pub const EXPAND_VAR_LIMIT: u32 = 24;

/// Truth value by Shannon expansion along the prefix, without any pruning
/// beyond short-circuiting the boolean combination. Ground-truth oracle for
/// small problems.
pub fn expand_eval(q: &QbfProblem) -> Result<bool, SolverError> {
    let order: Vec<(u32, Quantifier)> = q
        .prefix()
        .iter()
        .flat_map(|b| b.vars.iter().map(move |v| (v.0, b.quantifier)))
        .collect();
    let found = order.len() as u32;
    if found > EXPAND_VAR_LIMIT {
        return Err(SolverError::TooLarge { limit: EXPAND_VAR_LIMIT, found });
    }
    let n = q.num_vars() as usize;
    let mut value = vec![false; n + 1];
    Ok(rec(q, &order, 0, &mut value))
}

fn rec(q: &QbfProblem, order: &[(u32, Quantifier)], depth: usize, value: &mut [bool]) -> bool {
    if depth == order.len() {
        return q.matrix().iter().all(|c| c.eval(|v| value[v.index()]));
    }
    let (v, quant) = order[depth];
    let branch = |b: bool, value: &mut [bool]| {
        value[v as usize] = b;
        rec(q, order, depth + 1, value)
    };
    match quant {
        Quantifier::Exists => branch(false, value) || branch(true, value),
        Quantifier::Forall => branch(false, value) && branch(true, value),
    }
}

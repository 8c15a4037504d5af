use thiserror::Error;

use crate::minilang::TypedFunction;
use crate::summarizer::{check_signatures, eval_concrete, EvalError, SignatureError};

/// Largest input domain the exhaustive oracle will walk.
pub const MAX_BRUTE_FORCE_DOMAIN: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BruteForceError {
    #[error("input domain has 2^{0} values; at most 2^20 can be enumerated")]
    DomainTooLarge(u32),
    #[error(transparent)]
    Signature(#[from] SignatureError),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Exact agreement of two functions over every input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BruteForce {
    pub domain_size: u64,
    pub eq_count: u64,
    /// Every diverging input, in input order, sorted.
    pub neq_inputs: Vec<Vec<i128>>,
}

/// Evaluates both functions on every input.
pub fn brute_force(f1: &TypedFunction, f2: &TypedFunction, unroll_limit: u32) -> Result<BruteForce, BruteForceError> {
    check_signatures(f1, f2)?;
    let sorts: Vec<_> = f1.params.iter().map(|p| p.sort).collect();
    let bits: u32 = sorts.iter().map(|s| s.width()).sum();
    if bits > 20 {
        return Err(BruteForceError::DomainTooLarge(bits));
    }
    let mut neq_inputs = Vec::new();
    let mut input: Vec<i128> = sorts.iter().map(|s| s.min_value()).collect();
    let domain_size = 1u64 << bits;
    for _ in 0..domain_size {
        if eval_concrete(f1, &input, unroll_limit)? != eval_concrete(f2, &input, unroll_limit)? {
            neq_inputs.push(input.clone());
        }
        // odometer over the inputs, last one fastest
        for (k, sort) in sorts.iter().enumerate().rev() {
            if input[k] < sort.max_value() {
                input[k] += 1;
                break;
            }
            input[k] = sort.min_value();
        }
    }
    let eq_count = domain_size - neq_inputs.len() as u64;
    Ok(BruteForce { domain_size, eq_count, neq_inputs })
}

pub fn brute_force_eq_count(f1: &TypedFunction, f2: &TypedFunction, unroll_limit: u32) -> Result<u64, BruteForceError> {
    brute_force(f1, f2, unroll_limit).map(|b| b.eq_count)
}

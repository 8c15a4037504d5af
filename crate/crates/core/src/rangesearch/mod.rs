//! Solver-guided search for input regions on which two programs agree.
//!
//! Every reported region is certified by the id of an unsat query, so the
//! counts derived from them are lower bounds on the equivalent inputs.

mod divide;
mod regions;
mod render;
mod search;

pub use divide::{divide_range, halve, prioritized_divide_range, PartitionError};
pub use regions::{Certified, CertifiedBox, CertifiedInterval, RegionList, RegionSet, Regions};
pub use render::{coalesce, complement, region_list_conditions, region_set_conditions, Condition};
pub use search::{combine, Combined, Probe, Search};

use std::time::{Duration, Instant};

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::classifier::Pair;
use crate::formula::RangePair;
use crate::oracle::{Oracle, OracleError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Relational,
    Iterative,
    /// Iterative priority search.
    Priority,
    Combined,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Relational, Method::Iterative, Method::Priority, Method::Combined];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Relational => "relational",
            Method::Iterative => "iterative",
            Method::Priority => "priority",
            Method::Combined => "combined",
        }
    }
}

impl std::fmt::Display for Method {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.as_str() == s).ok_or_else(|| format!("unknown algorithm {s:?}"))
    }
}

/// Bisection depth used when none is given: deeper for one input.
pub fn default_limit(inputs: usize) -> u32 {
    if inputs <= 1 {
        8
    } else {
        4
    }
}

#[derive(Clone, Debug)]
pub struct QuantResult {
    pub method: Method,
    pub limit: u32,
    pub regions: Regions,
    /// Both per-input candidates, for the combined method.
    pub candidates: Option<Combined>,
    pub eq_lower_bound: BigUint,
    pub domain_size: BigUint,
    pub eq_condition: Condition,
    pub impact_condition: Condition,
    pub solver_calls: u64,
    pub elapsed: Duration,
    /// Some query was unknown, so the bound may be weaker than the search
    /// could otherwise reach.
    pub incomplete: bool,
}

impl QuantResult {
    /// `100 · eq_lower_bound / |D|`, exactly.
    pub fn eq_percent(&self) -> BigRational {
        percent(&self.eq_lower_bound, &self.domain_size)
    }

    /// Upper bound on the share of inputs the patch changes.
    pub fn impact_percent(&self) -> BigRational {
        BigRational::from_integer(100.into()) - self.eq_percent()
    }
}

pub fn percent(part: &BigUint, whole: &BigUint) -> BigRational {
    BigRational::new(BigInt::from(part.clone()) * 100, BigInt::from(whole.clone()))
}

/// Decimal rendering of a non-negative rational, rounded down or up at
/// `decimals` places so lower and upper bounds stay sound.
pub fn format_decimal(r: &BigRational, decimals: u32, round_up: bool) -> String {
    assert!(!r.is_negative());
    let scale = BigInt::from(10u32).pow(decimals);
    let scaled = r.numer() * &scale;
    let (q, rem) = scaled.div_rem(r.denom());
    let q = if round_up && !rem.is_zero() { q + 1 } else { q };
    let (whole, frac) = q.div_rem(&scale);
    if decimals == 0 {
        return whole.to_string();
    }
    format!("{whole}.{:0>width$}", frac.to_string(), width = decimals as usize)
}

/// Runs `method` over the pair's full input domain.
pub fn quantify(pair: &Pair, oracle: &Oracle, method: Method, limit: Option<u32>) -> Result<QuantResult, OracleError> {
    let vars = pair.inputs();
    let limit = limit.unwrap_or_else(|| default_limit(vars.len()));
    let full: Vec<RangePair> = vars.iter().map(|v| RangePair::full(v.sort)).collect();
    let domains: Vec<BigUint> = vars.iter().map(|v| v.sort.domain_size()).collect();
    let domain_size: BigUint = domains.iter().product();
    let (start, calls) = (Instant::now(), oracle.solver_calls());
    let mut search = Search::new(pair, oracle);
    let mut candidates = None;
    let regions = match method {
        Method::Relational => Regions::Set(search.relational(vars, &full, limit)?),
        Method::Iterative => Regions::List(search.iterative(vars, &full, limit)?),
        Method::Priority => Regions::List(search.iterative_priority(vars, &full)?),
        Method::Combined => {
            let c = search.combined(vars, &full, limit)?;
            let best = c.best.clone();
            candidates = Some(c);
            Regions::List(best)
        }
    };
    let (eq_lower_bound, (eq_condition, impact_condition)) = match &regions {
        Regions::Set(rs) => (rs.eq_lower_bound(), region_set_conditions(vars, rs)),
        Regions::List(rl) => (rl.eq_lower_bound(&domains), region_list_conditions(vars, rl)),
    };
    Ok(QuantResult {
        method,
        limit,
        regions,
        candidates,
        eq_lower_bound,
        domain_size,
        eq_condition,
        impact_condition,
        solver_calls: oracle.solver_calls() - calls,
        elapsed: start.elapsed(),
        incomplete: search.incomplete(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimals() {
        let r = percent(&BigUint::from(1u32), &BigUint::from(8u32));
        assert_eq!(format_decimal(&r, 2, false), "12.50");
        let r = percent(&BigUint::from((1u64 << 32) - 56), &BigUint::from(1u64 << 32));
        assert_eq!(format_decimal(&r, 2, false), "99.99");
        let impact = BigRational::from_integer(100.into()) - r;
        assert_eq!(format_decimal(&impact, 2, true), "0.01");
        assert_eq!(format_decimal(&impact, 0, false), "0");
        assert_eq!(format_decimal(&BigRational::from_integer(100.into()), 2, true), "100.00");
    }

    #[test]
    fn method_names() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!(default_limit(1), 8);
        assert_eq!(default_limit(2), 4);
    }
}

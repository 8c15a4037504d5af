use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::formula::RangePair;

/// A region together with the ids of the unsat queries that certify it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Certified<T> {
    pub region: T,
    pub certificates: Vec<u64>,
}

/// A hyper-rectangle, one interval per input.
pub type CertifiedBox = Certified<Vec<RangePair>>;
pub type CertifiedInterval = Certified<RangePair>;

/// Disjoint hyper-rectangles on which the pair agrees.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionSet {
    pub boxes: Vec<CertifiedBox>,
}

/// Per input, disjoint intervals on which the pair agrees whatever the
/// other inputs are.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RegionList {
    pub vars: Vec<Vec<CertifiedInterval>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regions {
    Set(RegionSet),
    List(RegionList),
}

fn volume(b: &[RangePair]) -> BigUint {
    b.iter().map(|p| BigUint::from(p.size())).product()
}

impl RegionSet {
    /// Sum of box volumes.
    pub fn eq_lower_bound(&self) -> BigUint {
        self.boxes.iter().map(|b| volume(&b.region)).sum()
    }
}

impl RegionList {
    /// Number of values of input `n` covered by its intervals.
    pub fn eq_bound(&self, n: usize) -> BigUint {
        self.vars[n].iter().map(|c| BigUint::from(c.region.size())).sum()
    }

    /// Inputs where the first variable inside its intervals is `n`:
    /// `Σ_n Π_{k<n} neq_k · eq_n · Π_{j>n} |D_j|`.
    pub fn eq_lower_bound(&self, domains: &[BigUint]) -> BigUint {
        assert_eq!(domains.len(), self.vars.len());
        let eq: Vec<BigUint> = (0..self.vars.len()).map(|n| self.eq_bound(n)).collect();
        let mut total = BigUint::zero();
        let mut prefix = BigUint::one();
        for n in 0..eq.len() {
            let suffix: BigUint = domains[n + 1..].iter().product();
            total += &prefix * &eq[n] * suffix;
            prefix *= &domains[n] - &eq[n];
        }
        total
    }
}

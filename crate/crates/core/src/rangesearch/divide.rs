use thiserror::Error;

use crate::formula::RangePair;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PartitionError {
    #[error("range [{0}, {1}] lies in neither the positive nor the negative partition")]
    Straddles(i128, i128),
}

/// Halves of one non-empty interval at `min + ⌈(max − min)/2⌉`.
///
/// A two-element interval would leave the upper half empty under that
/// midpoint, so it is split into its two points instead.
pub fn halve(p: RangePair) -> Vec<RangePair> {
    if p.is_singleton() {
        return vec![p];
    }
    let width = p.max - p.min;
    let mid = if width == 1 { p.min } else { p.min + (width + 1) / 2 };
    vec![RangePair { min: p.min, max: mid }, RangePair { min: mid + 1, max: p.max }]
}

/// Cartesian product of the halves of every dimension; singleton
/// dimensions pass through. The result partitions `r`.
pub fn divide_range(r: &[RangePair]) -> Vec<Vec<RangePair>> {
    let mut out: Vec<Vec<RangePair>> = vec![Vec::with_capacity(r.len())];
    for &p in r {
        let halves = halve(p);
        out = out
            .into_iter()
            .flat_map(|prefix| {
                halves.iter().map(move |h| {
                    let mut v = prefix.clone();
                    v.push(*h);
                    v
                })
            })
            .collect();
    }
    out
}

fn ceil_half(v: i128) -> i128 {
    v.div_euclid(2) + v.rem_euclid(2)
}

/// Shrinks a one-signed interval toward zero: `(min, ⌈max/2⌉)` for positive
/// intervals, `(⌈min/2⌉, max)` for negative ones. Ceilings round toward +∞.
pub fn prioritized_divide_range(p: RangePair) -> Result<RangePair, PartitionError> {
    if p.min >= 1 && ceil_half(p.max) >= p.min {
        Ok(RangePair { min: p.min, max: ceil_half(p.max) })
    } else if p.max <= -1 && ceil_half(p.min) <= p.max {
        Ok(RangePair { min: ceil_half(p.min), max: p.max })
    } else {
        Err(PartitionError::Straddles(p.min, p.max))
    }
}

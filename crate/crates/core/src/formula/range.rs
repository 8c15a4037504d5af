use serde::{Deserialize, Serialize};

use super::error::FormulaError;
use super::term::{BvVar, Formula, Term};
use crate::minilang::IntSort;

/// An inclusive interval of values, read in the variable's signedness.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RangePair {
    pub min: i128,
    pub max: i128,
}

impl RangePair {
    pub fn new(sort: IntSort, min: i128, max: i128) -> Result<RangePair, FormulaError> {
        for value in [min, max] {
            if !sort.contains(value) {
                return Err(FormulaError::BoundOutOfRange { value, sort: sort.to_string() });
            }
        }
        if min > max {
            return Err(FormulaError::EmptyRange { min, max });
        }
        Ok(RangePair { min, max })
    }

    pub fn full(sort: IntSort) -> RangePair {
        RangePair { min: sort.min_value(), max: sort.max_value() }
    }

    pub fn point(value: i128) -> RangePair {
        RangePair { min: value, max: value }
    }

    /// Number of values, `max - min + 1`.
    pub fn size(&self) -> u128 {
        (self.max - self.min) as u128 + 1
    }

    pub fn is_singleton(&self) -> bool {
        self.min == self.max
    }

    pub fn contains(&self, value: i128) -> bool {
        (self.min..=self.max).contains(&value)
    }

    /// `min <= v <= max` over `var`.
    pub fn constraint(&self, var: &BvVar) -> Formula {
        let sort = var.sort;
        let v = var.term();
        if self.is_singleton() {
            return Formula::eq(v, Term::int(sort, self.min));
        }
        Formula::and([
            Formula::le(sort, Term::int(sort, self.min), v.clone()),
            Formula::le(sort, v, Term::int(sort, self.max)),
        ])
    }
}

/// Conjunction over `n` of `lo[n] <= vars[n] <= hi[n]`, compared in each
/// variable's signedness.
pub fn mk_range_constraint(vars: &[BvVar], lo: &[i128], hi: &[i128]) -> Result<Formula, FormulaError> {
    if lo.len() != vars.len() || hi.len() != vars.len() {
        return Err(FormulaError::Arity { expected: vars.len(), found: lo.len().max(hi.len()) });
    }
    let mut parts = Vec::with_capacity(vars.len());
    for ((var, &min), &max) in vars.iter().zip(lo).zip(hi) {
        parts.push(RangePair::new(var.sort, min, max)?.constraint(var));
    }
    Ok(Formula::and(parts))
}

/// `mk_range_constraint` over already validated pairs.
pub fn range_vector_constraint(vars: &[BvVar], ranges: &[RangePair]) -> Formula {
    assert_eq!(vars.len(), ranges.len());
    Formula::and(vars.iter().zip(ranges).map(|(v, r)| r.constraint(v)))
}

/// `(s1 ∧ range) ⇔ (s2 ∧ range)`, checking both sides declare the same
/// variables.
pub fn iff_under_range(
    vars1: &[BvVar],
    s1: &Formula,
    vars2: &[BvVar],
    s2: &Formula,
    range: &Formula,
) -> Result<Formula, FormulaError> {
    if vars1 != vars2 {
        return Err(FormulaError::VarSetMismatch);
    }
    Ok(Formula::iff(Formula::and([s1.clone(), range.clone()]), Formula::and([s2.clone(), range.clone()])))
}

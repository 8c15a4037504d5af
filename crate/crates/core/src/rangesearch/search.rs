use std::slice;

use super::divide::{divide_range, prioritized_divide_range};
use super::regions::{Certified, CertifiedBox, CertifiedInterval, RegionList, RegionSet};
use crate::classifier::Pair;
use crate::formula::{range_vector_constraint, BvVar, RangePair};
use crate::oracle::{Oracle, OracleError, SatResult, SatVerdict};

/// Outcome of one certifying query.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Probe {
    /// The property holds; carries the query id.
    Holds(u64),
    Fails,
    Unknown,
}

/// Solver-guided range searches over one pair. Every unknown verdict
/// marks the search incomplete and is treated as "not certified".
pub struct Search<'a> {
    pair: &'a Pair,
    oracle: &'a Oracle,
    incomplete: bool,
}

impl<'a> Search<'a> {
    pub fn new(pair: &'a Pair, oracle: &'a Oracle) -> Search<'a> {
        Search { pair, oracle, incomplete: false }
    }

    /// Whether any query came back unknown.
    pub fn incomplete(&self) -> bool {
        self.incomplete
    }

    fn probe(&mut self, r: SatResult, holds_when_unsat: bool) -> Probe {
        match r.verdict {
            SatVerdict::Unknown(_) => {
                self.incomplete = true;
                Probe::Unknown
            }
            SatVerdict::Unsat if holds_when_unsat => Probe::Holds(r.query_id.expect("answered query has an id")),
            SatVerdict::Sat if !holds_when_unsat => Probe::Holds(r.query_id.expect("answered query has an id")),
            _ => Probe::Fails,
        }
    }

    /// Holds iff the outputs never differ inside the box; the id certifies it.
    pub fn equivalent(&mut self, vars: &[BvVar], r: &[RangePair]) -> Result<Probe, OracleError> {
        let range = range_vector_constraint(vars, r);
        let result = self.oracle.is_sat(self.pair.decls(), &self.pair.differ_within(&range))?;
        Ok(self.probe(result, true))
    }

    /// Holds iff the outputs agree somewhere inside the box.
    pub fn overlaps(&mut self, vars: &[BvVar], r: &[RangePair]) -> Result<Probe, OracleError> {
        let range = range_vector_constraint(vars, r);
        let result = self.oracle.is_sat(self.pair.decls(), &self.pair.agree_within(&range))?;
        Ok(self.probe(result, false))
    }

    /// Recursive bisection of `r` over `vars`, to `limit` levels. The whole
    /// box is checked first so a fully equivalent box is one region.
    pub fn relational(&mut self, vars: &[BvVar], r: &[RangePair], limit: u32) -> Result<RegionSet, OracleError> {
        let mut boxes = Vec::new();
        match self.equivalent(vars, r)? {
            Probe::Holds(id) => boxes.push(Certified { region: r.to_vec(), certificates: vec![id] }),
            _ => self.relational_at(vars, r, 0, limit, &mut boxes)?,
        }
        Ok(RegionSet { boxes })
    }

    fn relational_at(
        &mut self,
        vars: &[BvVar],
        r: &[RangePair],
        depth: u32,
        limit: u32,
        out: &mut Vec<CertifiedBox>,
    ) -> Result<(), OracleError> {
        if depth >= limit || r.iter().all(RangePair::is_singleton) {
            return Ok(());
        }
        for child in divide_range(r) {
            match self.equivalent(vars, &child)? {
                Probe::Holds(id) => out.push(Certified { region: child, certificates: vec![id] }),
                Probe::Unknown => {}
                Probe::Fails => {
                    if child.iter().all(RangePair::is_singleton) {
                        continue;
                    }
                    if let Probe::Holds(_) = self.overlaps(vars, &child)? {
                        self.relational_at(vars, &child, depth + 1, limit, out)?;
                    }
                }
            }
        }
        Ok(())
    }

    /// One single-variable relational search per input, the others left
    /// unconstrained.
    pub fn iterative(&mut self, vars: &[BvVar], r: &[RangePair], limit: u32) -> Result<RegionList, OracleError> {
        let mut list = Vec::with_capacity(vars.len());
        for (v, p) in vars.iter().zip(r) {
            let rs = self.relational(slice::from_ref(v), slice::from_ref(p), limit)?;
            list.push(
                rs.boxes.into_iter().map(|b| Certified { region: b.region[0], certificates: b.certificates }).collect(),
            );
        }
        Ok(RegionList { vars: list })
    }

    /// Shrinks a one-signed interval toward zero until it is equivalent,
    /// then widens it back toward the last discarded bound.
    pub fn priority(&mut self, var: &BvVar, p: RangePair) -> Result<Option<CertifiedInterval>, OracleError> {
        let vars = slice::from_ref(var);
        let mut p = p;
        let mut frontier = None;
        loop {
            match self.equivalent(vars, &[p])? {
                Probe::Holds(id) => {
                    let found = Certified { region: p, certificates: vec![id] };
                    return Ok(Some(match frontier {
                        Some(f) => self.expand_domain_boundary(var, found, f)?,
                        None => found,
                    }));
                }
                Probe::Unknown => return Ok(None),
                Probe::Fails => {}
            }
            if p.max <= p.min || !matches!(self.overlaps(vars, &[p])?, Probe::Holds(_)) {
                return Ok(None);
            }
            let Ok(next) = prioritized_divide_range(p) else { return Ok(None) };
            frontier = Some(if p.min >= 1 { p.max } else { p.min });
            p = next;
        }
    }

    /// Binary search for the widest certified extension of `found` toward
    /// `frontier`, which lies just past the bound known not to hold. Each
    /// probe certifies only the added slice.
    pub fn expand_domain_boundary(
        &mut self,
        var: &BvVar,
        found: CertifiedInterval,
        frontier: i128,
    ) -> Result<CertifiedInterval, OracleError> {
        let vars = slice::from_ref(var);
        let Certified { region, mut certificates } = found;
        if frontier > region.max {
            // region.max..=lo certified, frontier is not
            let (mut lo, mut hi) = (region.max, frontier);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                match self.equivalent(vars, &[RangePair { min: lo + 1, max: mid }])? {
                    Probe::Holds(id) => {
                        certificates.push(id);
                        lo = mid;
                    }
                    Probe::Fails => hi = mid,
                    Probe::Unknown => break,
                }
            }
            Ok(Certified { region: RangePair { min: region.min, max: lo }, certificates })
        } else if frontier < region.min {
            let (mut lo, mut hi) = (frontier, region.min);
            while hi - lo > 1 {
                let mid = lo + (hi - lo) / 2;
                match self.equivalent(vars, &[RangePair { min: mid, max: hi - 1 }])? {
                    Probe::Holds(id) => {
                        certificates.push(id);
                        hi = mid;
                    }
                    Probe::Fails => lo = mid,
                    Probe::Unknown => break,
                }
            }
            Ok(Certified { region: RangePair { min: hi, max: region.max }, certificates })
        } else {
            Ok(Certified { region, certificates })
        }
    }

    /// Priority search per input over its positive, negative (signed only)
    /// and zero parts.
    pub fn iterative_priority(&mut self, vars: &[BvVar], r: &[RangePair]) -> Result<RegionList, OracleError> {
        let mut list = Vec::with_capacity(vars.len());
        for (v, p) in vars.iter().zip(r) {
            let mut found = Vec::new();
            for part in partitions(v, *p) {
                if part.min == 0 && part.max == 0 {
                    if let Probe::Holds(id) = self.equivalent(slice::from_ref(v), &[part])? {
                        found.push(Certified { region: part, certificates: vec![id] });
                    }
                } else if let Some(c) = self.priority(v, part)? {
                    found.push(c);
                }
            }
            list.push(found);
        }
        Ok(RegionList { vars: list })
    }

    /// Per input, the better of the iterative and priority results.
    pub fn combined(&mut self, vars: &[BvVar], r: &[RangePair], limit: u32) -> Result<Combined, OracleError> {
        let iterative = self.iterative(vars, r, limit)?;
        let priority = self.iterative_priority(vars, r)?;
        Ok(Combined { best: combine(&iterative, &priority), iterative, priority })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Combined {
    pub best: RegionList,
    pub iterative: RegionList,
    pub priority: RegionList,
}

/// Takes `a`'s entry for each input unless `b` covers strictly more.
pub fn combine(a: &RegionList, b: &RegionList) -> RegionList {
    assert_eq!(a.vars.len(), b.vars.len());
    let vars = (0..a.vars.len())
        .map(|k| if a.eq_bound(k) >= b.eq_bound(k) { a.vars[k].clone() } else { b.vars[k].clone() })
        .collect();
    RegionList { vars }
}

/// Positive, negative and zero parts of `p`, the negative part only for
/// signed inputs.
fn partitions(var: &BvVar, p: RangePair) -> Vec<RangePair> {
    let mut parts = Vec::new();
    if p.max >= 1 {
        parts.push(RangePair { min: p.min.max(1), max: p.max });
    }
    if var.sort.is_signed() && p.min <= -1 {
        parts.push(RangePair { min: p.min, max: p.max.min(-1) });
    }
    if p.contains(0) {
        parts.push(RangePair::point(0));
    }
    parts
}

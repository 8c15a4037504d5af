use std::fmt;

use serde::Serialize;

use super::regions::{RegionList, RegionSet};
use crate::formula::{smtlib, BvVar, Formula, RangePair};
use crate::minilang::IntSort;

/// A condition over the inputs, as a formula and in two text forms.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Condition {
    /// Infix form, e.g. `x <= 536870911`.
    pub pretty: String,
    /// SMT-LIB term.
    pub smt: String,
    #[serde(skip)]
    pub formula: Formula,
}

impl Condition {
    fn new(formula: Formula, pretty: Cond) -> Condition {
        Condition { pretty: pretty.to_string(), smt: smtlib::formula_to_smt(&formula), formula }
    }
}

/// Sorted union of intervals with neighbours merged.
pub fn coalesce(intervals: impl IntoIterator<Item = RangePair>) -> Vec<RangePair> {
    let mut sorted: Vec<RangePair> = intervals.into_iter().collect();
    sorted.sort();
    let mut out: Vec<RangePair> = Vec::with_capacity(sorted.len());
    for p in sorted {
        match out.last_mut() {
            Some(last) if p.min <= last.max + 1 => last.max = last.max.max(p.max),
            _ => out.push(p),
        }
    }
    out
}

/// The values of `sort` outside coalesced `intervals`.
pub fn complement(sort: IntSort, intervals: &[RangePair]) -> Vec<RangePair> {
    let mut out = Vec::new();
    let mut next = sort.min_value();
    for p in intervals {
        if p.min > next {
            out.push(RangePair { min: next, max: p.min - 1 });
        }
        next = p.max + 1;
    }
    if next <= sort.max_value() {
        out.push(RangePair { min: next, max: sort.max_value() });
    }
    out
}

/// Boolean skeleton for the infix rendering, folded like `Formula`.
#[derive(Clone, Debug, PartialEq, Eq)]
enum Cond {
    True,
    False,
    Atom(String),
    Not(Box<Cond>),
    And(Vec<Cond>),
    Or(Vec<Cond>),
}

impl Cond {
    fn and(parts: Vec<Cond>) -> Cond {
        let mut keep = Vec::new();
        for p in parts {
            match p {
                Cond::True => {}
                Cond::False => return Cond::False,
                Cond::And(inner) => keep.extend(inner),
                p => keep.push(p),
            }
        }
        match keep.len() {
            0 => Cond::True,
            1 => keep.pop().unwrap(),
            _ => Cond::And(keep),
        }
    }

    fn or(parts: Vec<Cond>) -> Cond {
        let mut keep = Vec::new();
        for p in parts {
            match p {
                Cond::False => {}
                Cond::True => return Cond::True,
                Cond::Or(inner) => keep.extend(inner),
                p => keep.push(p),
            }
        }
        match keep.len() {
            0 => Cond::False,
            1 => keep.pop().unwrap(),
            _ => Cond::Or(keep),
        }
    }

    fn not(c: Cond) -> Cond {
        match c {
            Cond::True => Cond::False,
            Cond::False => Cond::True,
            Cond::Not(inner) => *inner,
            c => Cond::Not(Box::new(c)),
        }
    }

    fn interval(var: &BvVar, p: RangePair) -> Cond {
        let (lo, hi) = (p.min == var.sort.min_value(), p.max == var.sort.max_value());
        let name = &var.name;
        Cond::Atom(match (lo, hi) {
            (true, true) => return Cond::True,
            _ if p.is_singleton() => format!("{name} == {}", p.min),
            (true, false) => format!("{name} <= {}", p.max),
            (false, true) => format!("{name} >= {}", p.min),
            (false, false) => format!("{} <= {name} <= {}", p.min, p.max),
        })
    }

    fn fmt_child(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cond::And(_) | Cond::Or(_) => write!(f, "({self})"),
            atom => write!(f, "{atom}"),
        }
    }
}

impl fmt::Display for Cond {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |f: &mut fmt::Formatter<'_>, parts: &[Cond], sep: &str| {
            for (i, p) in parts.iter().enumerate() {
                if i > 0 {
                    f.write_str(sep)?;
                }
                p.fmt_child(f)?;
            }
            Ok(())
        };
        match self {
            Cond::True => f.write_str("true"),
            Cond::False => f.write_str("false"),
            Cond::Atom(s) => f.write_str(s),
            Cond::Not(inner) => match inner.as_ref() {
                Cond::Atom(_) => write!(f, "!({inner})"),
                _ => {
                    f.write_str("!")?;
                    inner.fmt_child(f)
                }
            },
            Cond::And(parts) => join(f, parts, " && "),
            Cond::Or(parts) => join(f, parts, " || "),
        }
    }
}

fn membership(var: &BvVar, intervals: &[RangePair]) -> (Formula, Cond) {
    let formula = Formula::or(intervals.iter().map(|p| p.constraint(var)));
    let cond = Cond::or(intervals.iter().map(|p| Cond::interval(var, *p)).collect());
    (formula, cond)
}

fn box_membership(vars: &[BvVar], b: &[RangePair]) -> (Formula, Cond) {
    let parts: Vec<(Formula, Cond)> = vars.iter().zip(b).map(|(v, p)| membership(v, slice(p))).collect();
    let (fs, cs): (Vec<_>, Vec<_>) = parts.into_iter().unzip();
    (Formula::and(fs), Cond::and(cs))
}

fn slice(p: &RangePair) -> &[RangePair] {
    std::slice::from_ref(p)
}

/// Equivalence and impact conditions of relational regions: the union of
/// the boxes and its negation.
pub fn region_set_conditions(vars: &[BvVar], rs: &RegionSet) -> (Condition, Condition) {
    if let [var] = vars {
        let merged = coalesce(rs.boxes.iter().map(|b| b.region[0]));
        return single_var_conditions(var, &merged);
    }
    let (fs, cs): (Vec<_>, Vec<_>) = rs.boxes.iter().map(|b| box_membership(vars, &b.region)).unzip();
    let (f, c) = (Formula::or(fs), Cond::or(cs));
    (Condition::new(f.clone(), c.clone()), Condition::new(Formula::not(f), Cond::not(c)))
}

/// Equivalence and impact conditions of per-input regions: input `n` in
/// its intervals with no earlier input in its own, so the models are
/// exactly the counted inputs.
pub fn region_list_conditions(vars: &[BvVar], rl: &RegionList) -> (Condition, Condition) {
    assert_eq!(vars.len(), rl.vars.len());
    let merged: Vec<Vec<RangePair>> = rl.vars.iter().map(|iv| coalesce(iv.iter().map(|c| c.region))).collect();
    if let [var] = vars {
        return single_var_conditions(var, &merged[0]);
    }
    let members: Vec<(Formula, Cond)> = vars.iter().zip(&merged).map(|(v, iv)| membership(v, iv)).collect();
    let mut fs = Vec::new();
    let mut cs = Vec::new();
    for n in 0..vars.len() {
        let mut f_term: Vec<Formula> = members[..n].iter().map(|(f, _)| Formula::not(f.clone())).collect();
        let mut c_term: Vec<Cond> = members[..n].iter().map(|(_, c)| Cond::not(c.clone())).collect();
        f_term.push(members[n].0.clone());
        c_term.push(members[n].1.clone());
        fs.push(Formula::and(f_term));
        cs.push(Cond::and(c_term));
    }
    let (f, c) = (Formula::or(fs), Cond::or(cs));
    (Condition::new(f.clone(), c.clone()), Condition::new(Formula::not(f), Cond::not(c)))
}

/// A single input's impact condition is rendered as the complementary
/// intervals rather than a negation.
fn single_var_conditions(var: &BvVar, merged: &[RangePair]) -> (Condition, Condition) {
    let (f, c) = membership(var, merged);
    let (nf, nc) = membership(var, &complement(var.sort, merged));
    (Condition::new(f, c), Condition::new(nf, nc))
}

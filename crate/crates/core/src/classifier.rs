//! Three-way equivalence classification of a program pair.

use std::fmt;

use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::formula::{iff_under_range, Assignment, BvVar, Formula};
use crate::oracle::{Oracle, OracleError, SatVerdict, UnknownReason};
use crate::summarizer::Summary;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("the summaries are over different variables")]
pub struct PairMismatch;

/// Summaries of the original and patched program over shared variables.
#[derive(Clone, Debug)]
pub struct Pair {
    pub s1: Summary,
    pub s2: Summary,
    f1: Formula,
    f2: Formula,
    decls: Vec<BvVar>,
}

impl Pair {
    pub fn new(s1: Summary, s2: Summary) -> Result<Pair, PairMismatch> {
        if !s1.same_variables(&s2) {
            return Err(PairMismatch);
        }
        let (f1, f2, decls) = (s1.formula(), s2.formula(), s1.decls());
        Ok(Pair { s1, s2, f1, f2, decls })
    }

    pub fn inputs(&self) -> &[BvVar] {
        &self.s1.inputs
    }

    /// Inputs followed by the output.
    pub fn decls(&self) -> &[BvVar] {
        &self.decls
    }

    /// Satisfiable iff some input inside `range` makes the outputs differ.
    pub fn differ_within(&self, range: &Formula) -> Formula {
        let iff = iff_under_range(&self.decls, &self.f1, &self.decls, &self.f2, range).expect("same variables");
        Formula::not(iff)
    }

    /// Satisfiable iff some input inside `range` makes the outputs agree.
    pub fn agree_within(&self, range: &Formula) -> Formula {
        Formula::and([self.f1.clone(), range.clone(), self.f2.clone(), range.clone()])
    }

    /// Signed or unsigned reading of a model, in input order.
    pub fn input_values(&self, model: &Assignment) -> Vec<(String, i128)> {
        self.inputs().iter().map(|v| (v.name.clone(), v.sort.to_int(model[&v.name]))).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VerdictKind {
    TEq,
    TNeq,
    PEq,
    Unknown,
}

impl VerdictKind {
    pub fn as_str(self) -> &'static str {
        match self {
            VerdictKind::TEq => "T_eq",
            VerdictKind::TNeq => "T_neq",
            VerdictKind::PEq => "P_eq",
            VerdictKind::Unknown => "Unknown",
        }
    }
}

impl fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for VerdictKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [VerdictKind::TEq, VerdictKind::TNeq, VerdictKind::PEq, VerdictKind::Unknown]
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown verdict {s:?}"))
    }
}

impl Serialize for VerdictKind {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub kind: VerdictKind,
    /// An input on which the outputs differ, for `P_eq` and `T_neq`.
    pub witness: Option<Assignment>,
    /// Why a deciding query was inconclusive, for `Unknown`.
    pub reason: Option<UnknownReason>,
}

/// `T_eq` iff the outputs never differ, else `T_neq` iff they never agree,
/// else `P_eq`. An inconclusive deciding query gives `Unknown`.
pub fn eq_check(pair: &Pair, oracle: &Oracle) -> Result<Verdict, OracleError> {
    let unknown = |reason| Verdict { kind: VerdictKind::Unknown, witness: None, reason: Some(reason) };
    let full = Formula::tt();
    let differ = oracle.get_model_projected(pair.decls(), &pair.differ_within(&full), pair.inputs())?;
    let witness = match differ.verdict {
        SatVerdict::Unsat => return Ok(Verdict { kind: VerdictKind::TEq, witness: None, reason: None }),
        SatVerdict::Unknown(reason) => return Ok(unknown(reason)),
        SatVerdict::Sat => differ.model,
    };
    let agree = oracle.is_sat(pair.decls(), &pair.agree_within(&full))?;
    Ok(match agree.verdict {
        SatVerdict::Unsat => Verdict { kind: VerdictKind::TNeq, witness, reason: None },
        SatVerdict::Sat => Verdict { kind: VerdictKind::PEq, witness, reason: None },
        SatVerdict::Unknown(reason) => unknown(reason),
    })
}

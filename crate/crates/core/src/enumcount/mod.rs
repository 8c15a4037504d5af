//! Counting by model enumeration, and the exhaustive concrete oracle.

mod brute;

pub use brute::{brute_force, brute_force_eq_count, BruteForce, BruteForceError, MAX_BRUTE_FORCE_DOMAIN};

use std::time::{Duration, Instant};

use num_bigint::BigUint;
use serde::Serialize;

use crate::classifier::Pair;
use crate::formula::{Assignment, Formula};
use crate::oracle::{Oracle, OracleError, SatVerdict, Session, UnknownReason};

/// Which enumeration finished first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Case {
    /// Every agreeing input was listed: the count is exact.
    Case1,
    /// Every diverging input was listed: the count is `|D| − |neq|`.
    Case2,
    /// Neither finished; agreeing inputs seen so far are a lower bound.
    Case3,
}

#[derive(Clone, Debug)]
pub struct EnumResult {
    pub case: Case,
    /// Agreeing inputs found, as signed or unsigned values in input order,
    /// sorted.
    pub eq_inputs: Vec<Vec<i128>>,
    pub neq_inputs: Vec<Vec<i128>>,
    pub exact_eq_count: Option<BigUint>,
    pub eq_count_lower_bound: BigUint,
    pub domain_size: BigUint,
    /// Why a `Case3` run stopped.
    pub stopped: Option<UnknownReason>,
    pub solver_calls: u64,
    pub elapsed: Duration,
}

struct Side {
    session: Session,
    models: Vec<Vec<i128>>,
}

enum Step {
    Model,
    Exhausted,
    Stopped(UnknownReason),
}

impl Side {
    fn new(oracle: &Oracle, pair: &Pair, f: &Formula) -> Result<Side, OracleError> {
        let mut session = oracle.session()?;
        session.declare(pair.decls());
        session.assert(f);
        Ok(Side { session, models: Vec::new() })
    }

    fn step(&mut self, pair: &Pair) -> Result<Step, OracleError> {
        let r = self.session.check_projected(pair.inputs());
        match r.verdict {
            SatVerdict::Unsat => Ok(Step::Exhausted),
            SatVerdict::Unknown(reason) => Ok(Step::Stopped(reason)),
            SatVerdict::Sat => {
                let model: Assignment = r.model.expect("projected sat has a model");
                self.session.block_model(pair.inputs(), &model)?;
                self.models.push(pair.input_values(&model).into_iter().map(|(_, v)| v).collect());
                Ok(Step::Model)
            }
        }
    }
}

/// Lists agreeing and diverging inputs one model at a time in turn,
/// blocking each, until one side runs out, `max_models` models have been
/// found in total, or a query is inconclusive.
pub fn enumerate(pair: &Pair, oracle: &Oracle, max_models: Option<u64>) -> Result<EnumResult, OracleError> {
    let (start, calls) = (Instant::now(), oracle.solver_calls());
    let domain_size: BigUint = pair.inputs().iter().map(|v| v.sort.domain_size()).product();
    let full = Formula::tt();
    let mut eq = Side::new(oracle, pair, &pair.agree_within(&full))?;
    let mut neq = Side::new(oracle, pair, &pair.differ_within(&full))?;
    let (case, stopped) = loop {
        if max_models.is_some_and(|cap| (eq.models.len() + neq.models.len()) as u64 >= cap) {
            break (Case::Case3, Some(UnknownReason::Budget));
        }
        match eq.step(pair)? {
            Step::Exhausted => break (Case::Case1, None),
            Step::Stopped(reason) => break (Case::Case3, Some(reason)),
            Step::Model => {}
        }
        match neq.step(pair)? {
            Step::Exhausted => break (Case::Case2, None),
            Step::Stopped(reason) => break (Case::Case3, Some(reason)),
            Step::Model => {}
        }
    };
    let (mut eq_inputs, mut neq_inputs) = (eq.models, neq.models);
    eq_inputs.sort();
    neq_inputs.sort();
    let exact_eq_count = match case {
        Case::Case1 => Some(BigUint::from(eq_inputs.len())),
        Case::Case2 => Some(&domain_size - BigUint::from(neq_inputs.len())),
        Case::Case3 => None,
    };
    let eq_count_lower_bound = exact_eq_count.clone().unwrap_or_else(|| BigUint::from(eq_inputs.len()));
    Ok(EnumResult {
        case,
        eq_inputs,
        neq_inputs,
        exact_eq_count,
        eq_count_lower_bound,
        domain_size,
        stopped,
        solver_calls: oracle.solver_calls() - calls,
        elapsed: start.elapsed(),
    })
}

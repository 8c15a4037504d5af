//! SMT solver client over a child process speaking SMT-LIB on stdin/stdout.
//!
//! A timeout, crash or malformed reply never becomes `sat` or `unsat`: it is
//! reported as [`SatVerdict::Unknown`] and the offending process is killed.

mod config;
mod session;
mod sexp;

pub use config::{split_command, SolverConfig, DEFAULT_BUDGET, DEFAULT_QUERY_TIMEOUT, DEFAULT_SOLVER_COMMAND};
pub use session::{blocking_clause, Session};

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::{Arc, Mutex};
use std::time::{Duration, Instant};

use serde::Serialize;
use thiserror::Error;

use crate::formula::{check_declared, Assignment, BvVar, Formula, FormulaError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("solver executable not found: {0}")]
    SolverMissing(String),
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("solver i/o failed: {0}")]
    Io(String),
    #[error("solver session is closed")]
    SessionDead,
    #[error("ill-formed query: {0}")]
    IllFormed(#[from] FormulaError),
    #[error("projection variable {0} is not a declared input")]
    Projection(String),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case", tag = "kind", content = "detail")]
pub enum UnknownReason {
    /// The per-query timeout elapsed.
    Timeout,
    /// The analysis budget is used up.
    Budget,
    /// The solver itself answered `unknown`.
    SolverUnknown,
    /// The solver crashed or replied with something unexpected.
    Protocol(String),
}

impl fmt::Display for UnknownReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            UnknownReason::Timeout => f.write_str("query timeout"),
            UnknownReason::Budget => f.write_str("budget exhausted"),
            UnknownReason::SolverUnknown => f.write_str("solver returned unknown"),
            UnknownReason::Protocol(msg) => write!(f, "protocol error: {msg}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum SatVerdict {
    Sat,
    Unsat,
    Unknown(UnknownReason),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatResult {
    pub verdict: SatVerdict,
    /// Present only for `sat` answers to projected queries.
    pub model: Option<Assignment>,
    /// Sequence number of the `check-sat` within its oracle, if one ran.
    pub query_id: Option<u64>,
}

impl SatResult {
    fn unknown(reason: UnknownReason, query_id: Option<u64>) -> SatResult {
        SatResult { verdict: SatVerdict::Unknown(reason), model: None, query_id }
    }

    pub fn is_sat(&self) -> bool {
        self.verdict == SatVerdict::Sat
    }

    pub fn is_unsat(&self) -> bool {
        self.verdict == SatVerdict::Unsat
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self.verdict, SatVerdict::Unknown(_))
    }
}

struct Shared {
    cfg: SolverConfig,
    deadline: Instant,
    queries: AtomicU64,
}

impl Shared {
    fn next_query_id(&self) -> u64 {
        self.queries.fetch_add(1, Ordering::Relaxed) + 1
    }

    /// How long the next query may run, and what to blame if it does not
    /// finish; `None` once the budget is spent.
    fn wait_time(&self) -> Option<(Duration, UnknownReason)> {
        let left = self.deadline.checked_duration_since(Instant::now()).filter(|d| !d.is_zero())?;
        if left < self.cfg.query_timeout {
            Some((left, UnknownReason::Budget))
        } else {
            Some((self.cfg.query_timeout, UnknownReason::Timeout))
        }
    }
}

/// Entry point for one analysis: owns its budget clock, its query counter,
/// and (when reusing sessions) a pool of idle solver processes.
///
/// Cheap to clone; clones share the budget, counter and pool.
#[derive(Clone)]
pub struct Oracle {
    shared: Arc<Shared>,
    pool: Arc<Mutex<Vec<Session>>>,
}

impl Oracle {
    /// Starts the budget clock.
    pub fn new(cfg: SolverConfig) -> Result<Oracle, OracleError> {
        cfg.validate()?;
        let deadline = Instant::now() + cfg.budget;
        Ok(Oracle {
            shared: Arc::new(Shared { cfg, deadline, queries: AtomicU64::new(0) }),
            pool: Arc::new(Mutex::new(Vec::new())),
        })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.shared.cfg
    }

    /// Number of `check-sat` commands issued so far.
    pub fn solver_calls(&self) -> u64 {
        self.shared.queries.load(Ordering::Relaxed)
    }

    pub fn budget_exhausted(&self) -> bool {
        self.shared.wait_time().is_none()
    }

    /// Spawns a dedicated session for incremental use.
    pub fn session(&self) -> Result<Session, OracleError> {
        Session::spawn(self.shared.clone())
    }

    pub fn is_sat(&self, decls: &[BvVar], f: &Formula) -> Result<SatResult, OracleError> {
        self.query(decls, f, None)
    }

    /// Like `is_sat`, returning on `sat` the values of exactly `project`.
    pub fn get_model_projected(
        &self,
        decls: &[BvVar],
        f: &Formula,
        project: &[BvVar],
    ) -> Result<SatResult, OracleError> {
        for v in project {
            if !decls.contains(v) {
                return Err(OracleError::Projection(v.name.clone()));
            }
        }
        self.query(decls, f, Some(project))
    }

    fn query(&self, decls: &[BvVar], f: &Formula, project: Option<&[BvVar]>) -> Result<SatResult, OracleError> {
        check_declared(decls, f)?;
        if self.budget_exhausted() {
            return Ok(SatResult::unknown(UnknownReason::Budget, None));
        }
        let reuse = self.shared.cfg.reuse_sessions;
        let pooled = if reuse { self.pool.lock().expect("pool lock").pop() } else { None };
        let mut session = match pooled {
            Some(s) => s,
            None => self.session()?,
        };
        if reuse {
            session.push();
        }
        session.declare(decls);
        session.assert(f);
        let result = match project {
            Some(vars) => session.check_projected(vars),
            None => session.check(),
        };
        if reuse && !session.is_dead() {
            session.pop();
            self.pool.lock().expect("pool lock").push(session);
        }
        Ok(result)
    }
}

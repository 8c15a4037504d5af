use std::time::Duration;

use super::OracleError;

pub const DEFAULT_SOLVER_COMMAND: &str = "z3 -in";
pub const DEFAULT_QUERY_TIMEOUT: Duration = Duration::from_secs(10);
pub const DEFAULT_BUDGET: Duration = Duration::from_secs(120);

/// How the solver is started and how long it may run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolverConfig {
    /// Executable followed by its arguments. The process must read commands
    /// on stdin.
    pub command: Vec<String>,
    pub query_timeout: Duration,
    /// Wall-clock allowance for one whole analysis.
    pub budget: Duration,
    /// Run independent queries inside `push`/`pop` on pooled sessions
    /// instead of a fresh process each. Much faster for small queries,
    /// sometimes slower for hard ones.
    pub reuse_sessions: bool,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            command: split_command(DEFAULT_SOLVER_COMMAND),
            query_timeout: DEFAULT_QUERY_TIMEOUT,
            budget: DEFAULT_BUDGET,
            reuse_sessions: false,
        }
    }
}

/// Splits a command line on whitespace; quoting is not supported.
pub fn split_command(command: &str) -> Vec<String> {
    command.split_whitespace().map(str::to_string).collect()
}

impl SolverConfig {
    pub fn new(command: &str, query_timeout: Duration, budget: Duration) -> Result<SolverConfig, OracleError> {
        let cfg = SolverConfig { command: split_command(command), query_timeout, budget, reuse_sessions: false };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn with_reuse(mut self, reuse: bool) -> SolverConfig {
        self.reuse_sessions = reuse;
        self
    }

    pub fn validate(&self) -> Result<(), OracleError> {
        if self.command.is_empty() {
            return Err(OracleError::Config("empty solver command".into()));
        }
        if self.query_timeout.is_zero() {
            return Err(OracleError::Config("query timeout must be positive".into()));
        }
        if self.budget < self.query_timeout {
            return Err(OracleError::Config("budget must be at least the query timeout".into()));
        }
        Ok(())
    }
}

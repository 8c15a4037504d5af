use std::io::{BufRead, BufReader, Write};
use std::process::{Child, ChildStdin, Command, Stdio};
use std::sync::mpsc::{self, Receiver, RecvTimeoutError};
use std::sync::Arc;
use std::thread;
use std::time::Duration;

use super::sexp::{self, Sexp};
use super::{OracleError, SatResult, SatVerdict, Shared, UnknownReason};
use crate::formula::{smtlib, Assignment, BvVar, Formula};

/// One live solver process. Owned by one task at a time.
pub struct Session {
    shared: Arc<Shared>,
    child: Child,
    stdin: Option<ChildStdin>,
    lines: Receiver<String>,
    dead: bool,
}

impl Session {
    pub(super) fn spawn(shared: Arc<Shared>) -> Result<Session, OracleError> {
        let cfg = &shared.cfg;
        let mut child = Command::new(&cfg.command[0])
            .args(&cfg.command[1..])
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .stderr(Stdio::null())
            .spawn()
            .map_err(|e| match e.kind() {
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied => {
                    OracleError::SolverMissing(cfg.command.join(" "))
                }
                _ => OracleError::Io(e.to_string()),
            })?;
        let stdout = child.stdout.take().expect("piped stdout");
        let (tx, lines) = mpsc::channel();
        thread::spawn(move || {
            for line in BufReader::new(stdout).lines() {
                let Ok(line) = line else { break };
                if tx.send(line).is_err() {
                    break;
                }
            }
        });
        let stdin = child.stdin.take();
        let mut session = Session { shared, child, stdin, lines, dead: false };
        session.send("(set-logic QF_BV)");
        Ok(session)
    }

    pub fn is_dead(&self) -> bool {
        self.dead
    }

    fn send(&mut self, command: &str) {
        if self.dead {
            return;
        }
        let ok = match self.stdin.as_mut() {
            Some(stdin) => writeln!(stdin, "{command}").and_then(|_| stdin.flush()).is_ok(),
            None => false,
        };
        if !ok {
            self.kill();
        }
    }

    fn kill(&mut self) {
        self.dead = true;
        self.stdin = None;
        let _ = self.child.kill();
        let _ = self.child.wait();
    }

    pub fn declare(&mut self, vars: &[BvVar]) {
        for v in vars {
            self.send(&smtlib::declaration(v));
        }
    }

    pub fn assert(&mut self, f: &Formula) {
        self.send(&format!("(assert {})", smtlib::formula_to_smt(f)));
    }

    pub fn push(&mut self) {
        self.send("(push 1)");
    }

    pub fn pop(&mut self) {
        self.send("(pop 1)");
    }

    /// Waits for one response line, killing the process on timeout.
    fn read_line(&mut self, wait: Duration, on_timeout: UnknownReason) -> Result<String, UnknownReason> {
        if self.dead {
            return Err(UnknownReason::Protocol("session is closed".into()));
        }
        match self.lines.recv_timeout(wait) {
            Ok(line) if line.trim_start().starts_with("(error") => {
                self.kill();
                Err(UnknownReason::Protocol(line))
            }
            Ok(line) => Ok(line),
            Err(RecvTimeoutError::Timeout) => {
                self.kill();
                Err(on_timeout)
            }
            Err(RecvTimeoutError::Disconnected) => {
                self.kill();
                Err(UnknownReason::Protocol("solver exited".into()))
            }
        }
    }

    /// `check-sat` under the query timeout and the remaining budget.
    pub fn check(&mut self) -> SatResult {
        let Some((wait, reason)) = self.shared.wait_time() else {
            return SatResult::unknown(UnknownReason::Budget, None);
        };
        let id = self.shared.next_query_id();
        self.send("(check-sat)");
        let verdict = match self.read_line(wait, reason) {
            Ok(line) => match line.trim() {
                "sat" => SatVerdict::Sat,
                "unsat" => SatVerdict::Unsat,
                "unknown" => SatVerdict::Unknown(UnknownReason::SolverUnknown),
                other => {
                    let msg = format!("unexpected response {other:?}");
                    self.kill();
                    SatVerdict::Unknown(UnknownReason::Protocol(msg))
                }
            },
            Err(reason) => SatVerdict::Unknown(reason),
        };
        SatResult { verdict, model: None, query_id: Some(id) }
    }

    /// Values of `vars` in the model of the last `sat` check.
    pub fn get_values(&mut self, vars: &[BvVar]) -> Result<Assignment, UnknownReason> {
        if vars.is_empty() {
            return Ok(Assignment::new());
        }
        let names: Vec<String> = vars.iter().map(|v| smtlib::symbol(&v.name)).collect();
        self.send(&format!("(get-value ({}))", names.join(" ")));
        let wait = self.shared.cfg.query_timeout;
        let mut text = String::new();
        let mut depth = 0;
        loop {
            let line = self.read_line(wait, UnknownReason::Timeout)?;
            depth += sexp::depth_change(&line);
            text.push_str(&line);
            text.push('\n');
            if depth <= 0 {
                break;
            }
        }
        match parse_values(&text, vars) {
            Ok(model) => Ok(model),
            Err(msg) => {
                self.kill();
                Err(UnknownReason::Protocol(msg))
            }
        }
    }

    /// Asserts `¬(∧ v = model[v])` over `vars`, excluding that input point.
    pub fn block_model(&mut self, vars: &[BvVar], model: &Assignment) -> Result<(), OracleError> {
        if self.dead {
            return Err(OracleError::SessionDead);
        }
        self.assert(&blocking_clause(vars, model));
        if self.dead {
            return Err(OracleError::SessionDead);
        }
        Ok(())
    }

    /// Check, then read `project` on `sat`. A `sat` whose model cannot be
    /// read is reported as unknown.
    pub fn check_projected(&mut self, project: &[BvVar]) -> SatResult {
        let mut result = self.check();
        if result.verdict == SatVerdict::Sat {
            match self.get_values(project) {
                Ok(model) => result.model = Some(model),
                Err(reason) => result.verdict = SatVerdict::Unknown(reason),
            }
        }
        result
    }
}

impl Drop for Session {
    fn drop(&mut self) {
        if !self.dead {
            self.send("(exit)");
            self.kill();
        }
    }
}

pub fn blocking_clause(vars: &[BvVar], model: &Assignment) -> Formula {
    Formula::not(Formula::and(vars.iter().map(|v| {
        let bits = model.get(&v.name).copied().unwrap_or_else(|| panic!("model lacks {}", v.name));
        Formula::eq(v.term(), crate::formula::Term::constant(v.width(), bits))
    })))
}

fn parse_values(text: &str, vars: &[BvVar]) -> Result<Assignment, String> {
    let Sexp::List(pairs) = sexp::parse(text.trim())? else {
        return Err(format!("malformed get-value response {text:?}"));
    };
    let mut model = Assignment::new();
    for pair in &pairs {
        let Sexp::List(kv) = pair else { return Err(format!("malformed pair in {text:?}")) };
        let [Sexp::Atom(name), value] = kv.as_slice() else {
            return Err(format!("malformed pair in {text:?}"));
        };
        let var = vars.iter().find(|v| &v.name == name).ok_or_else(|| format!("unrequested variable {name}"))?;
        let bits = sexp::bv_value(value).ok_or_else(|| format!("not a bit-vector value: {value:?}"))?;
        if bits > var.sort.mask() {
            return Err(format!("value of {name} exceeds its width"));
        }
        model.insert(name.clone(), bits);
    }
    if model.len() != vars.len() {
        return Err(format!("incomplete model in {text:?}"));
    }
    Ok(model)
}

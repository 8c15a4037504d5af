use std::collections::BTreeMap;
use std::fmt::Write;
use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::manifest::{load_corpus, CorpusCase, ManifestError};
use super::{run_pair, AnalysisConfig, ImpactReport, Percent};

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "snake_case", tag = "status", content = "detail")]
pub enum CaseStatus {
    Passed,
    /// The analysis ran but disagreed with the manifest.
    Failed(Vec<String>),
    /// The case could not be analysed.
    Error {
        message: String,
        infrastructure: bool,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseOutcome {
    pub name: String,
    #[serde(flatten)]
    pub status: CaseStatus,
    pub report: Option<ImpactReport>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CorpusSummary {
    pub algorithm: String,
    pub cases: Vec<CaseOutcome>,
    pub verdict_counts: BTreeMap<String, usize>,
    /// Mean of the impact upper bounds over analysed cases.
    pub mean_impact_percent: Option<Percent>,
    pub passed: usize,
    pub failed: usize,
    pub errors: usize,
}

/// Mismatches between a report and its manifest.
pub fn check_expectations(case: &CorpusCase, report: &ImpactReport) -> Vec<String> {
    let mut problems = Vec::new();
    if let Some(v) = case.verdict {
        if v != report.verdict {
            problems.push(format!("verdict {} but expected {v}", report.verdict));
        }
    }
    if let Some(exact) = &case.expect.eq_count {
        let bound = &report.eq_lower_bound_exact;
        if bound > exact {
            problems.push(format!("lower bound {bound} exceeds the exact count {exact}"));
        } else if report.exact && bound != exact {
            problems.push(format!("exact count {bound} but expected {exact}"));
        }
    }
    let Ok(algorithm) = report.algorithm.parse() else { return problems };
    if let Some(m) = case.expect.methods.get(&algorithm) {
        let shown = &report.impact_percent_upper_bound.display;
        if let Some(want) = &m.impact_percent {
            if want != shown {
                problems.push(format!("impact {shown}% but expected {want}%"));
            }
        }
        let cond = report.condition.as_ref();
        for (want, got, what) in [
            (&m.eq_condition, cond.map(|c| &c.eq.pretty), "equivalence condition"),
            (&m.impact_condition, cond.map(|c| &c.impact.pretty), "impact condition"),
        ] {
            if let Some(want) = want {
                if got != Some(want) {
                    problems.push(format!("{what} {got:?} but expected {want:?}"));
                }
            }
        }
    }
    problems
}

fn run_case(case: Result<CorpusCase, ManifestError>, cfg: &AnalysisConfig) -> CaseOutcome {
    let case = match case {
        Ok(c) => c,
        Err(e) => {
            let name = match &e {
                ManifestError::Invalid { path, .. } | ManifestError::Io { path, .. } => path.clone(),
            };
            return CaseOutcome {
                name,
                status: CaseStatus::Error { message: e.to_string(), infrastructure: false },
                report: None,
            };
        }
    };
    match run_pair(&case.name, &case.original, &case.patched, cfg) {
        Ok(analysis) => {
            let problems = check_expectations(&case, &analysis.report);
            let status = if problems.is_empty() { CaseStatus::Passed } else { CaseStatus::Failed(problems) };
            CaseOutcome { name: case.name, status, report: Some(analysis.report) }
        }
        Err(e) => CaseOutcome {
            name: case.name,
            status: CaseStatus::Error { message: e.to_string(), infrastructure: e.infrastructure },
            report: None,
        },
    }
}

/// Analyses every manifest in `dir` with up to `jobs` cases at a time.
pub fn run_corpus(dir: &Path, cfg: &AnalysisConfig, jobs: usize) -> Result<CorpusSummary, ManifestError> {
    let cases = load_corpus(dir)?;
    let pool = rayon::ThreadPoolBuilder::new().num_threads(jobs.max(1)).build().expect("thread pool");
    let outcomes: Vec<CaseOutcome> = pool.install(|| cases.into_par_iter().map(|c| run_case(c, cfg)).collect());
    Ok(CorpusSummary::new(cfg, outcomes))
}

impl CorpusSummary {
    fn new(cfg: &AnalysisConfig, cases: Vec<CaseOutcome>) -> CorpusSummary {
        let mut verdict_counts = BTreeMap::new();
        let mut impact_sum = BigRational::from_integer(BigInt::from(0));
        let mut analysed = 0u32;
        let (mut passed, mut failed, mut errors) = (0, 0, 0);
        for c in &cases {
            match c.status {
                CaseStatus::Passed => passed += 1,
                CaseStatus::Failed(_) => failed += 1,
                CaseStatus::Error { .. } => errors += 1,
            }
            if let Some(r) = &c.report {
                *verdict_counts.entry(r.verdict.to_string()).or_insert(0) += 1;
                let p = &r.impact_percent_upper_bound;
                let p = BigRational::new(p.numerator.parse().unwrap(), p.denominator.parse().unwrap());
                impact_sum += p;
                analysed += 1;
            }
        }
        let mean_impact_percent = (analysed > 0).then(|| {
            let mean = impact_sum / BigRational::from_integer(BigInt::from(analysed));
            Percent::new(&mean, cfg.decimals, true)
        });
        CorpusSummary {
            algorithm: cfg.algorithm.to_string(),
            cases,
            verdict_counts,
            mean_impact_percent,
            passed,
            failed,
            errors,
        }
    }

    /// 0 when every case passed, 1 when some case failed its expectations or
    /// could not be loaded, 2 when the solver could not be run.
    pub fn exit_code(&self) -> i32 {
        let infra = self.cases.iter().any(|c| matches!(c.status, CaseStatus::Error { infrastructure: true, .. }));
        if infra {
            2
        } else if self.failed + self.errors > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes")
    }

    /// Aligned plain-text table, one row per case, then the totals.
    pub fn to_table(&self) -> String {
        let header = ["case", "verdict", "eq %", "impact %", "calls", "status"];
        let mut rows: Vec<[String; 6]> = Vec::new();
        for c in &self.cases {
            let status = match &c.status {
                CaseStatus::Passed => "ok".to_string(),
                CaseStatus::Failed(p) => format!("FAIL: {}", p.join("; ")),
                CaseStatus::Error { message, .. } => format!("ERROR: {message}"),
            };
            let (verdict, eq, impact, calls) = match &c.report {
                Some(r) => (
                    r.verdict.to_string() + if r.incomplete { "*" } else { "" },
                    r.eq_percent_lower_bound.display.clone(),
                    r.impact_percent_upper_bound.display.clone(),
                    r.solver_calls.to_string(),
                ),
                None => ("-".into(), "-".into(), "-".into(), "-".into()),
            };
            rows.push([c.name.clone(), verdict, eq, impact, calls, status]);
        }
        let mut widths = header.map(str::len);
        for row in &rows {
            for (w, cell) in widths.iter_mut().zip(row) {
                *w = (*w).max(cell.chars().count());
            }
        }
        let mut out = String::new();
        let mut line = |cells: Vec<&str>| {
            let mut l = String::new();
            for (i, (cell, w)) in cells.iter().zip(widths).enumerate() {
                if i + 1 == cells.len() {
                    l.push_str(cell);
                } else if (2..=4).contains(&i) {
                    let _ = write!(l, "{cell:>w$}  ");
                } else {
                    let _ = write!(l, "{cell:<w$}  ");
                }
            }
            out.push_str(l.trim_end());
            out.push('\n');
        };
        line(header.to_vec());
        for row in &rows {
            line(row.iter().map(String::as_str).collect());
        }
        let counts: Vec<String> = self.verdict_counts.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(
            out,
            "\n{} cases: {} passed, {} failed, {} errors; verdicts {}; mean impact {}%",
            self.cases.len(),
            self.passed,
            self.failed,
            self.errors,
            if counts.is_empty() { "-".to_string() } else { counts.join(" ") },
            self.mean_impact_percent.as_ref().map_or("-", |p| p.display.as_str()),
        );
        out
    }
}

use std::fmt::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use patch_impact::minilang::load;
use patch_impact::oracle::{split_command, SolverConfig};
use patch_impact::rangesearch::Method;
use patch_impact::report::{
    analyze, load_pair_files, run_corpus, summarize_pair, Algorithm, AnalysisConfig, ImpactReport, PipelineError,
};
use patch_impact::summarizer::summarize;

#[derive(Parser)]
#[command(name = "patch-impact", version, about = "Measure how much of the input domain a patch changes")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Global {
    /// Solver command line; it must accept SMT-LIB on stdin.
    #[arg(long, global = true, env = "PATCH_IMPACT_SOLVER_CMD", default_value = "z3 -in")]
    solver_cmd: String,
    /// Limit for one solver query.
    #[arg(long, global = true, env = "PATCH_IMPACT_QUERY_TIMEOUT_MS", default_value_t = 10_000)]
    query_timeout_ms: u64,
    /// Limit for the whole analysis of one pair.
    #[arg(long, global = true, env = "PATCH_IMPACT_BUDGET_MS", default_value_t = 120_000)]
    budget_ms: u64,
    /// Bisection depth; defaults to 8 for one input and 4 otherwise.
    #[arg(long, global = true, env = "PATCH_IMPACT_DEPTH_LIMIT")]
    depth_limit: Option<u32>,
    #[arg(long, global = true, env = "PATCH_IMPACT_ALGORITHM", value_enum, default_value_t = AlgorithmArg::Combined)]
    algorithm: AlgorithmArg,
    #[arg(long, global = true, env = "PATCH_IMPACT_FORMAT", value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Corpus cases analysed at once.
    #[arg(long, global = true, env = "PATCH_IMPACT_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Leave timings out of the output.
    #[arg(long, global = true, env = "PATCH_IMPACT_STABLE")]
    stable: bool,
    /// Drop infeasible branches with the solver while summarizing.
    #[arg(long, global = true, env = "PATCH_IMPACT_PRUNE")]
    prune: bool,
    /// Reuse solver processes across queries.
    #[arg(long, global = true, env = "PATCH_IMPACT_REUSE_SESSIONS")]
    reuse_sessions: bool,
    /// Iterations each loop is unrolled.
    #[arg(long, global = true, env = "PATCH_IMPACT_UNROLL_LIMIT", default_value_t = 64)]
    unroll_limit: u32,
    /// Cap on enumerated models.
    #[arg(long, global = true, env = "PATCH_IMPACT_MAX_MODELS")]
    max_models: Option<u64>,
    /// Decimal places for percentages.
    #[arg(long, global = true, env = "PATCH_IMPACT_DECIMALS", default_value_t = 2)]
    decimals: u32,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgorithmArg {
    Relational,
    Iterative,
    Priority,
    Combined,
    Enumerate,
}

impl From<AlgorithmArg> for Algorithm {
    fn from(a: AlgorithmArg) -> Algorithm {
        match a {
            AlgorithmArg::Relational => Algorithm::Range(Method::Relational),
            AlgorithmArg::Iterative => Algorithm::Range(Method::Iterative),
            AlgorithmArg::Priority => Algorithm::Range(Method::Priority),
            AlgorithmArg::Combined => Algorithm::Range(Method::Combined),
            AlgorithmArg::Enumerate => Algorithm::Enumerate,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Subcommand)]
enum Command {
    /// Print the symbolic summary of a program as SMT-LIB.
    Summarize { file: PathBuf },
    /// Classify a pair as equivalent, partially equivalent or totally different.
    Check { original: PathBuf, patched: PathBuf },
    /// Classify a pair and bound the share of inputs the patch changes.
    Impact { original: PathBuf, patched: PathBuf },
    /// Run every manifest in a directory and check its expectations.
    Corpus { dir: PathBuf },
}

/// Failure with the exit status it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl From<anyhow::Error> for Failure {
    fn from(error: anyhow::Error) -> Failure {
        Failure { code: 1, error }
    }
}

impl From<PipelineError> for Failure {
    fn from(e: PipelineError) -> Failure {
        Failure { code: if e.infrastructure { 2 } else { 1 }, error: e.into() }
    }
}

fn config(g: &Global) -> Result<AnalysisConfig, Failure> {
    let solver = SolverConfig {
        command: split_command(&g.solver_cmd),
        query_timeout: Duration::from_millis(g.query_timeout_ms),
        budget: Duration::from_millis(g.budget_ms),
        reuse_sessions: g.reuse_sessions,
    };
    solver.validate().map_err(|e| Failure { code: 2, error: e.into() })?;
    Ok(AnalysisConfig {
        solver,
        algorithm: g.algorithm.into(),
        depth_limit: g.depth_limit,
        unroll_limit: g.unroll_limit,
        prune: g.prune,
        max_models: g.max_models,
        decimals: g.decimals,
        stable: g.stable,
    })
}

fn source(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))
}

fn cmd_summarize(g: &Global, file: &Path) -> Result<String, Failure> {
    let f = load(&source(file)?).with_context(|| format!("loading {}", file.display()))?;
    let s = summarize(&f, g.unroll_limit).context("summarizing")?;
    Ok(match g.format {
        Format::Text => s.to_smtlib(),
        Format::Json => {
            let decls: Vec<_> =
                s.decls().iter().map(|v| serde_json::json!({"name": v.name, "sort": v.sort.to_string()})).collect();
            let json = serde_json::json!({
                "function": f.name,
                "variables": decls,
                "paths": s.path_count(),
                "smtlib": s.to_smtlib(),
            });
            serde_json::to_string_pretty(&json).expect("json") + "\n"
        }
    })
}

fn json_int(v: i128) -> serde_json::Value {
    match i64::try_from(v) {
        Ok(i) => i.into(),
        Err(_) => (v as u64).into(),
    }
}

fn cmd_check(g: &Global, original: &Path, patched: &Path) -> Result<String, Failure> {
    let cfg = config(g)?;
    let loaded = load_pair_files(original, patched)?;
    let oracle =
        patch_impact::oracle::Oracle::new(cfg.solver.clone()).map_err(|e| Failure { code: 2, error: e.into() })?;
    let pair = summarize_pair(&loaded, &cfg, &oracle)?;
    let verdict =
        patch_impact::classifier::eq_check(&pair, &oracle).map_err(|e| Failure { code: 2, error: e.into() })?;
    let witness: Option<Vec<(String, i128)>> = verdict.witness.as_ref().map(|m| pair.input_values(m));
    Ok(match g.format {
        Format::Json => {
            let w = witness.map(|w| w.into_iter().map(|(k, v)| (k, json_int(v))).collect::<serde_json::Map<_, _>>());
            let reason = verdict.reason.as_ref().map(|r| r.to_string());
            let json = serde_json::json!({"verdict": verdict.kind, "witness": w, "unknown_reason": reason});
            serde_json::to_string_pretty(&json).expect("json") + "\n"
        }
        Format::Text => {
            let mut out = format!("{}\n", verdict.kind);
            if let Some(w) = witness {
                let shown: Vec<String> = w.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                let _ = writeln!(out, "diverging input: {}", shown.join(", "));
            }
            if let Some(r) = &verdict.reason {
                let _ = writeln!(out, "reason: {r}");
            }
            out
        }
    })
}

fn impact_text(r: &ImpactReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "pair: {} -> {}", r.original, r.patched);
    let _ = writeln!(out, "inputs: {}", r.inputs.join(", "));
    let _ = writeln!(out, "verdict: {}", r.verdict);
    let depth = r.depth_limit.map(|d| format!(" (depth limit {d})")).unwrap_or_default();
    let _ = writeln!(out, "algorithm: {}{depth}", r.algorithm);
    let qualifier = if r.exact { "" } else { ">= " };
    let _ = writeln!(
        out,
        "equivalent inputs: {qualifier}{} of {} ({qualifier}{}%)",
        r.eq_lower_bound, r.domain_size, r.eq_percent_lower_bound.display
    );
    let qualifier = if r.exact { "" } else { "<= " };
    let _ = writeln!(out, "patch impact: {qualifier}{}%", r.impact_percent_upper_bound.display);
    if let Some(c) = &r.condition {
        let _ = writeln!(out, "equivalence condition: {}", c.eq.pretty);
        let _ = writeln!(out, "impact condition: {}", c.impact.pretty);
    }
    if let Some(e) = &r.enumeration {
        let _ =
            writeln!(out, "enumeration: {:?}, {} agreeing and {} diverging models", e.case, e.eq_models, e.neq_models);
    }
    if let Some(w) = &r.witness {
        let shown: Vec<String> = w.inputs.iter().map(|(k, v)| format!("{k} = {v}")).collect();
        let check = if w.revalidated { "confirmed by evaluation" } else { "NOT confirmed by evaluation" };
        let _ = writeln!(out, "diverging input: {} ({check})", shown.join(", "));
    }
    if r.incomplete {
        let why = r.unknown_reason.as_ref().map(|u| format!(": {u}")).unwrap_or_default();
        let _ = writeln!(out, "incomplete{why}");
    }
    let _ = write!(out, "solver calls: {}", r.solver_calls);
    if let Some(ms) = r.elapsed_ms {
        let _ = write!(out, ", {ms} ms");
    }
    out.push('\n');
    out
}

fn cmd_impact(g: &Global, original: &Path, patched: &Path) -> Result<String, Failure> {
    let cfg = config(g)?;
    let loaded = load_pair_files(original, patched)?;
    let name = original.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let paths = (original.display().to_string(), patched.display().to_string());
    let analysis = analyze(&name, (&paths.0, &paths.1), &loaded, &cfg)?;
    Ok(match g.format {
        Format::Json => analysis.report.to_json() + "\n",
        Format::Text => impact_text(&analysis.report),
    })
}

fn cmd_corpus(g: &Global, dir: &Path) -> Result<(String, u8), Failure> {
    let cfg = config(g)?;
    let summary = run_corpus(dir, &cfg, g.jobs).context("reading the corpus")?;
    let text = match g.format {
        Format::Json => summary.to_json() + "\n",
        Format::Text => summary.to_table(),
    };
    Ok((text, summary.exit_code() as u8))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let g = &cli.global;
    let result = match &cli.command {
        Command::Summarize { file } => cmd_summarize(g, file).map(|s| (s, 0)),
        Command::Check { original, patched } => cmd_check(g, original, patched).map(|s| (s, 0)),
        Command::Impact { original, patched } => cmd_impact(g, original, patched).map(|s| (s, 0)),
        Command::Corpus { dir } => cmd_corpus(g, dir),
    };
    match result {
        Ok((out, code)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}

//! End-to-end analysis of a program pair and its JSON report.

mod corpus;
mod manifest;

pub use corpus::{run_corpus, CaseOutcome, CaseStatus, CorpusSummary};
pub use manifest::{load_corpus, load_manifest, CorpusCase, Expectations, ManifestError, MethodExpectations};

use std::fmt;
use std::path::Path;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use serde_json::{Map, Value as Json};

use crate::classifier::{eq_check, Pair, Verdict, VerdictKind};
use crate::enumcount::{enumerate, Case, EnumResult};
use crate::formula::{Assignment, BvVar, Formula};
use crate::minilang::{load, TypedFunction};
use crate::oracle::{Oracle, OracleError, SolverConfig, UnknownReason};
use crate::rangesearch::{
    format_decimal, percent, quantify, region_set_conditions, Certified, Condition, Method, QuantResult, RegionSet,
    Regions,
};
use crate::summarizer::{
    check_signatures, eval_concrete, summarize, summarize_pruned, PathPruner, DEFAULT_UNROLL_LIMIT,
};

/// Enumerated models listed in a report, per side.
pub const MAX_REPORTED_MODELS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Algorithm {
    Range(Method),
    Enumerate,
}

impl Algorithm {
    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Range(m) => m.as_str(),
            Algorithm::Enumerate => "enumerate",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "enumerate" {
            return Ok(Algorithm::Enumerate);
        }
        s.parse::<Method>().map(Algorithm::Range).map_err(|_| format!("unknown algorithm {s:?}"))
    }
}

#[derive(Clone, Debug)]
pub struct AnalysisConfig {
    pub solver: SolverConfig,
    pub algorithm: Algorithm,
    /// Bisection depth; `None` picks by input count.
    pub depth_limit: Option<u32>,
    pub unroll_limit: u32,
    /// Drop infeasible branches with the solver while summarizing.
    pub prune: bool,
    /// Cap on enumerated models, both sides together.
    pub max_models: Option<u64>,
    pub decimals: u32,
    /// Leave timing out of reports so they are reproducible.
    pub stable: bool,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            solver: SolverConfig::default(),
            algorithm: Algorithm::Range(Method::Combined),
            depth_limit: None,
            unroll_limit: DEFAULT_UNROLL_LIMIT,
            prune: false,
            max_models: None,
            decimals: 2,
            stable: false,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    LoadOriginal,
    LoadPatched,
    Signature,
    Summarize,
    Classify,
    Quantify,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::LoadOriginal => "loading the original program",
            Stage::LoadPatched => "loading the patched program",
            Stage::Signature => "comparing signatures",
            Stage::Summarize => "summarizing",
            Stage::Classify => "classifying",
            Stage::Quantify => "quantifying",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{stage}: {message}")]
pub struct PipelineError {
    pub stage: Stage,
    pub message: String,
    /// The solver could not be run at all, as opposed to a bad input.
    pub infrastructure: bool,
}

impl PipelineError {
    fn new(stage: Stage, e: impl fmt::Display) -> PipelineError {
        PipelineError { stage, message: e.to_string(), infrastructure: false }
    }

    fn oracle(stage: Stage, e: OracleError) -> PipelineError {
        let infrastructure = matches!(e, OracleError::SolverMissing(_) | OracleError::Io(_) | OracleError::Config(_));
        PipelineError { stage, message: e.to_string(), infrastructure }
    }
}

/// An exact percentage and its rounded rendering.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Percent {
    pub numerator: String,
    pub denominator: String,
    pub display: String,
}

impl Percent {
    fn new(r: &BigRational, decimals: u32, round_up: bool) -> Percent {
        Percent {
            numerator: r.numer().to_string(),
            denominator: r.denom().to_string(),
            display: format_decimal(r, decimals, round_up),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Conditions {
    pub eq: Condition,
    pub impact: Condition,
}

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub inputs: Map<String, Json>,
    /// Concrete evaluation of both programs disagrees on the inputs.
    pub revalidated: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct Enumeration {
    pub case: Case,
    pub exact: bool,
    pub eq_models: usize,
    pub neq_models: usize,
    /// At most `MAX_REPORTED_MODELS` per side.
    pub eq_inputs: Vec<Vec<String>>,
    pub neq_inputs: Vec<Vec<String>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ImpactReport {
    pub name: String,
    pub original: String,
    pub patched: String,
    pub inputs: Vec<String>,
    pub verdict: VerdictKind,
    pub algorithm: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_limit: Option<u32>,
    pub eq_lower_bound: String,
    pub domain_size: String,
    pub eq_percent_lower_bound: Percent,
    pub impact_percent_upper_bound: Percent,
    /// Omitted when too many models would have to be listed.
    pub condition: Option<Conditions>,
    pub witness: Option<Witness>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub regions: Option<Regions>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub enumeration: Option<Enumeration>,
    pub solver_calls: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
    pub incomplete: bool,
    pub unknown_reason: Option<UnknownReason>,
    #[serde(skip)]
    pub eq_lower_bound_exact: BigUint,
    #[serde(skip)]
    pub exact: bool,
}

impl ImpactReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Both versions of a pair, loaded and type-checked.
pub struct LoadedPair {
    pub original: TypedFunction,
    pub patched: TypedFunction,
}

pub fn load_pair(original: &str, patched: &str) -> Result<LoadedPair, PipelineError> {
    let original = load(original).map_err(|e| PipelineError::new(Stage::LoadOriginal, e))?;
    let patched = load(patched).map_err(|e| PipelineError::new(Stage::LoadPatched, e))?;
    check_signatures(&original, &patched).map_err(|e| PipelineError::new(Stage::Signature, e))?;
    Ok(LoadedPair { original, patched })
}

pub fn load_pair_files(original: &Path, patched: &Path) -> Result<LoadedPair, PipelineError> {
    let read = |p: &Path, stage| {
        std::fs::read_to_string(p).map_err(|e| PipelineError::new(stage, format!("{}: {e}", p.display())))
    };
    load_pair(&read(original, Stage::LoadOriginal)?, &read(patched, Stage::LoadPatched)?)
}

struct SolverPruner<'a> {
    oracle: &'a Oracle,
}

impl PathPruner for SolverPruner<'_> {
    fn maybe_feasible(&mut self, inputs: &[BvVar], path: &Formula) -> bool {
        !matches!(self.oracle.is_sat(inputs, path), Ok(r) if r.is_unsat())
    }
}

pub fn summarize_pair(pair: &LoadedPair, cfg: &AnalysisConfig, oracle: &Oracle) -> Result<Pair, PipelineError> {
    let run = |f: &TypedFunction| {
        if cfg.prune {
            summarize_pruned(f, cfg.unroll_limit, &mut SolverPruner { oracle })
        } else {
            summarize(f, cfg.unroll_limit)
        }
        .map_err(|e| PipelineError::new(Stage::Summarize, e))
    };
    Pair::new(run(&pair.original)?, run(&pair.patched)?).map_err(|e| PipelineError::new(Stage::Summarize, e))
}

/// Signed or unsigned value of each input, in order.
fn input_point(pair: &Pair, model: &Assignment) -> Vec<i128> {
    pair.input_values(model).into_iter().map(|(_, v)| v).collect()
}

fn json_int(v: i128) -> Json {
    match i64::try_from(v) {
        Ok(i) => Json::from(i),
        Err(_) => Json::from(v as u64),
    }
}

fn witness(pair: &Pair, loaded: &LoadedPair, model: &Assignment, unroll: u32) -> Witness {
    let point = input_point(pair, model);
    let inputs = pair.inputs().iter().zip(&point).map(|(v, x)| (v.name.clone(), json_int(*x))).collect();
    let revalidated =
        match (eval_concrete(&loaded.original, &point, unroll), eval_concrete(&loaded.patched, &point, unroll)) {
            (Ok(a), Ok(b)) => a != b,
            _ => false,
        };
    Witness { inputs, revalidated }
}

fn constant_conditions(eq: bool) -> Conditions {
    let make = |v: bool| Condition {
        pretty: v.to_string(),
        smt: v.to_string(),
        formula: if v { Formula::tt() } else { Formula::ff() },
    };
    Conditions { eq: make(eq), impact: make(!eq) }
}

/// Conditions whose models are exactly `points`, or their complement.
fn point_conditions(vars: &[BvVar], points: &[Vec<i128>], points_are_eq: bool) -> Conditions {
    let rs = RegionSet {
        boxes: points
            .iter()
            .map(|p| Certified {
                region: p.iter().map(|&v| crate::formula::RangePair::point(v)).collect(),
                certificates: vec![],
            })
            .collect(),
    };
    let (inside, outside) = region_set_conditions(vars, &rs);
    if points_are_eq {
        Conditions { eq: inside, impact: outside }
    } else {
        Conditions { eq: outside, impact: inside }
    }
}

fn enumeration_section(r: &EnumResult) -> Enumeration {
    let show = |ms: &[Vec<i128>]| {
        ms.iter().take(MAX_REPORTED_MODELS).map(|m| m.iter().map(|v| v.to_string()).collect()).collect()
    };
    Enumeration {
        case: r.case,
        exact: r.exact_eq_count.is_some(),
        eq_models: r.eq_inputs.len(),
        neq_models: r.neq_inputs.len(),
        eq_inputs: show(&r.eq_inputs),
        neq_inputs: show(&r.neq_inputs),
    }
}

/// Everything computed for one pair, before it is flattened into a report.
pub struct Analysis {
    pub pair: Pair,
    pub verdict: Verdict,
    pub quant: Option<QuantResult>,
    pub enumeration: Option<EnumResult>,
    pub report: ImpactReport,
}

/// Classifies the pair and, when it is partially equivalent, quantifies it
/// with the configured algorithm. Each call gets its own budget.
pub fn analyze(
    name: &str,
    paths: (&str, &str),
    loaded: &LoadedPair,
    cfg: &AnalysisConfig,
) -> Result<Analysis, PipelineError> {
    let start = Instant::now();
    let oracle = Oracle::new(cfg.solver.clone()).map_err(|e| PipelineError::oracle(Stage::Classify, e))?;
    let pair = summarize_pair(loaded, cfg, &oracle)?;
    let verdict = eq_check(&pair, &oracle).map_err(|e| PipelineError::oracle(Stage::Classify, e))?;
    let vars = pair.inputs().to_vec();
    let domain: BigUint = vars.iter().map(|v| v.sort.domain_size()).product();

    let mut quant = None;
    let mut enumeration = None;
    let mut regions = None;
    let mut depth_limit = None;
    let mut incomplete = false;
    let mut unknown_reason = verdict.reason.clone();
    let (bound, exact, condition) = match verdict.kind {
        VerdictKind::TEq => (domain.clone(), true, Some(constant_conditions(true))),
        VerdictKind::TNeq => (BigUint::zero(), true, Some(constant_conditions(false))),
        VerdictKind::Unknown => {
            incomplete = true;
            (BigUint::zero(), false, None)
        }
        VerdictKind::PEq => match cfg.algorithm {
            Algorithm::Range(method) => {
                let q = quantify(&pair, &oracle, method, cfg.depth_limit)
                    .map_err(|e| PipelineError::oracle(Stage::Quantify, e))?;
                depth_limit =
                    matches!(method, Method::Relational | Method::Iterative | Method::Combined).then_some(q.limit);
                incomplete = q.incomplete;
                regions = Some(q.regions.clone());
                let conds = Conditions { eq: q.eq_condition.clone(), impact: q.impact_condition.clone() };
                let out = (q.eq_lower_bound.clone(), q.eq_lower_bound == domain, Some(conds));
                quant = Some(q);
                out
            }
            Algorithm::Enumerate => {
                let r =
                    enumerate(&pair, &oracle, cfg.max_models).map_err(|e| PipelineError::oracle(Stage::Quantify, e))?;
                incomplete = r.case == Case::Case3;
                if incomplete {
                    unknown_reason = r.stopped.clone();
                }
                let condition = match r.case {
                    Case::Case2 if r.neq_inputs.len() <= MAX_REPORTED_MODELS => {
                        Some(point_conditions(&vars, &r.neq_inputs, false))
                    }
                    Case::Case1 | Case::Case3 if r.eq_inputs.len() <= MAX_REPORTED_MODELS => {
                        Some(point_conditions(&vars, &r.eq_inputs, true))
                    }
                    _ => None,
                };
                let out = (r.eq_count_lower_bound.clone(), r.exact_eq_count.is_some(), condition);
                enumeration = Some(r);
                out
            }
        },
    };

    let eq_percent = percent(&bound, &domain);
    let impact = BigRational::from_integer(BigInt::from(100)) - &eq_percent;
    let report = ImpactReport {
        name: name.to_string(),
        original: paths.0.to_string(),
        patched: paths.1.to_string(),
        inputs: vars.iter().map(|v| format!("{}: {}", v.name, v.sort)).collect(),
        verdict: verdict.kind,
        algorithm: cfg.algorithm.to_string(),
        depth_limit,
        eq_lower_bound: bound.to_string(),
        domain_size: domain.to_string(),
        eq_percent_lower_bound: Percent::new(&eq_percent, cfg.decimals, false),
        impact_percent_upper_bound: Percent::new(&impact, cfg.decimals, true),
        condition,
        witness: verdict.witness.as_ref().map(|m| witness(&pair, loaded, m, cfg.unroll_limit)),
        regions,
        enumeration: enumeration.as_ref().map(enumeration_section),
        solver_calls: oracle.solver_calls(),
        elapsed_ms: (!cfg.stable).then(|| start.elapsed().as_millis() as u64),
        incomplete,
        unknown_reason,
        eq_lower_bound_exact: bound,
        exact,
    };
    Ok(Analysis { pair, verdict, quant, enumeration, report })
}

/// `analyze` from source files.
pub fn run_pair(name: &str, original: &Path, patched: &Path, cfg: &AnalysisConfig) -> Result<Analysis, PipelineError> {
    let loaded = load_pair_files(original, patched)?;
    analyze(name, (&original.display().to_string(), &patched.display().to_string()), &loaded, cfg)
}

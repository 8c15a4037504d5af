use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::BigUint;
use serde::Deserialize;
use thiserror::Error;

use super::Algorithm;
use crate::classifier::VerdictKind;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ManifestError {
    #[error("{path}: {message}")]
    Invalid { path: String, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
}

/// Values an algorithm is expected to report for a case.
#[derive(Clone, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MethodExpectations {
    /// Rounded impact percentage, e.g. `"87.50"`.
    pub impact_percent: Option<String>,
    /// Pretty form of the equivalence condition.
    pub eq_condition: Option<String>,
    pub impact_condition: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Expectations {
    /// Exact number of agreeing inputs. A reported bound may not exceed
    /// it, and must equal it when the report claims exactness.
    pub eq_count: Option<BigUint>,
    pub methods: BTreeMap<Algorithm, MethodExpectations>,
}

/// One pair of programs and what analysing it should give.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CorpusCase {
    pub name: String,
    pub manifest: PathBuf,
    pub original: PathBuf,
    pub patched: PathBuf,
    pub verdict: Option<VerdictKind>,
    pub expect: Expectations,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawManifest {
    original: PathBuf,
    patched: PathBuf,
    verdict: Option<String>,
    #[serde(default)]
    expect: RawExpect,
}

#[derive(Default, Deserialize)]
struct RawExpect {
    eq_count: Option<String>,
    #[serde(flatten)]
    methods: BTreeMap<String, MethodExpectations>,
}

/// Reads a TOML manifest; program paths are relative to its directory.
pub fn load_manifest(path: &Path) -> Result<CorpusCase, ManifestError> {
    let shown = path.display().to_string();
    let invalid = |message: String| ManifestError::Invalid { path: shown.clone(), message };
    let text =
        std::fs::read_to_string(path).map_err(|e| ManifestError::Io { path: shown.clone(), message: e.to_string() })?;
    let raw: RawManifest = toml::from_str(&text).map_err(|e| invalid(e.message().to_string()))?;
    let verdict = raw.verdict.map(|v| v.parse::<VerdictKind>()).transpose().map_err(invalid)?;
    let eq_count = raw
        .expect
        .eq_count
        .map(|c| c.parse::<BigUint>().map_err(|_| invalid(format!("eq_count {c:?} is not a non-negative integer"))))
        .transpose()?;
    let mut methods = BTreeMap::new();
    for (key, m) in raw.expect.methods {
        methods.insert(key.parse::<Algorithm>().map_err(invalid)?, m);
    }
    let dir = path.parent().unwrap_or(Path::new("."));
    let name = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| shown.clone());
    Ok(CorpusCase {
        name,
        manifest: path.to_path_buf(),
        original: dir.join(raw.original),
        patched: dir.join(raw.patched),
        verdict,
        expect: Expectations { eq_count, methods },
    })
}

/// Every `*.toml` manifest directly inside `dir`, sorted by file name.
pub fn load_corpus(dir: &Path) -> Result<Vec<Result<CorpusCase, ManifestError>>, ManifestError> {
    let io = |e: std::io::Error| ManifestError::Io { path: dir.display().to_string(), message: e.to_string() };
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)
        .map_err(io)?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file() && p.extension().is_some_and(|x| x == "toml"))
        .collect();
    paths.sort();
    Ok(paths.iter().map(|p| load_manifest(p)).collect())
}

use std::path::{Path, PathBuf};

use patch_impact::classifier::VerdictKind;
use patch_impact::minilang::load;
use patch_impact::oracle::SolverConfig;
use patch_impact::rangesearch::Method;
use patch_impact::report::{analyze, load_corpus, load_pair, run_pair, Algorithm, AnalysisConfig, CaseStatus, Stage};
use patch_impact::summarizer::summarize;

fn root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

fn corpus(name: &str) -> PathBuf {
    root().join("corpus").join(name)
}

fn stable(algorithm: Algorithm) -> AnalysisConfig {
    AnalysisConfig { algorithm, stable: true, ..AnalysisConfig::default() }
}

#[test]
fn summaries_match_golden_files() {
    for version in ["orig", "patched"] {
        let src = std::fs::read_to_string(corpus(&format!("cve_2010_4165.{version}.mini"))).unwrap();
        let got = summarize(&load(&src).unwrap(), 64).unwrap().to_smtlib();
        let golden = Path::new(env!("CARGO_MANIFEST_DIR")).join(format!("tests/golden/cve_2010_4165.{version}.smt2"));
        assert_eq!(got, std::fs::read_to_string(golden).unwrap(), "{version}");
    }
}

#[test]
fn every_manifest_loads_and_its_programs_exist() {
    let cases = load_corpus(&root().join("corpus")).unwrap();
    assert!(cases.len() >= 10);
    for case in cases {
        let case = case.unwrap();
        assert!(case.original.is_file() && case.patched.is_file(), "{}", case.name);
        assert!(case.verdict.is_some(), "{}", case.name);
    }
}

#[test]
fn identical_programs_are_fully_equivalent() {
    let a = run_pair(
        "identity",
        &corpus("identity.mini"),
        &corpus("identity.mini"),
        &stable(Algorithm::Range(Method::Combined)),
    )
    .unwrap();
    assert_eq!(a.report.verdict, VerdictKind::TEq);
    assert_eq!(a.report.eq_percent_lower_bound.display, "100.00");
    assert_eq!(a.report.impact_percent_upper_bound.display, "0.00");
    assert_eq!(a.report.condition.unwrap().eq.pretty, "true");
    assert!(a.report.witness.is_none());
}

#[test]
fn constant_programs_never_agree() {
    let a = run_pair("constants", &corpus("const_zero.mini"), &corpus("const_one.mini"), &stable(Algorithm::Enumerate))
        .unwrap();
    assert_eq!(a.report.verdict, VerdictKind::TNeq);
    assert_eq!(a.report.eq_lower_bound, "0");
    assert!(a.report.witness.unwrap().revalidated);
}

#[test]
fn stable_reports_are_byte_identical() {
    let run = || {
        run_pair(
            "qemu",
            &corpus("qemu_len_sign.orig.mini"),
            &corpus("qemu_len_sign.patched.mini"),
            &stable(Algorithm::Range(Method::Combined)),
        )
        .unwrap()
        .report
        .to_json()
    };
    let first = run();
    assert_eq!(first, run());
    assert!(!first.contains("elapsed_ms"));
}

#[test]
fn report_keeps_exact_percentages() {
    let a = run_pair(
        "cve_2010_4165",
        &corpus("cve_2010_4165.orig.mini"),
        &corpus("cve_2010_4165.patched.mini"),
        &stable(Algorithm::Enumerate),
    )
    .unwrap();
    let r = &a.report;
    assert_eq!(r.eq_lower_bound, (4294967296u64 - 56).to_string());
    assert_eq!(r.eq_percent_lower_bound.display, "99.99");
    assert_eq!(r.impact_percent_upper_bound.display, "0.01");
    assert_eq!(r.impact_percent_upper_bound.numerator, "175");
    assert_eq!(r.impact_percent_upper_bound.denominator, "134217728");
    let cond = r.condition.as_ref().unwrap();
    assert_eq!(cond.impact.pretty, "8 <= val <= 63");
    let json: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
    assert_eq!(json["enumeration"]["case"], "case2");
    assert_eq!(json["verdict"], "P_eq");
}

#[test]
fn load_failures_name_their_stage() {
    let ok = "fn f(x: u8) -> u8 { return x; }";
    let err = load_pair("fn f(x: u8) -> u8 { return y; }", ok).err().unwrap();
    assert_eq!(err.stage, Stage::LoadOriginal);
    assert!(!err.infrastructure);
    let err = load_pair(ok, "fn f(x: i8) -> u8 { return 0; }").err().unwrap();
    assert_eq!(err.stage, Stage::Signature);
}

#[test]
fn missing_solver_is_an_infrastructure_error() {
    let loaded = load_pair("fn f(x: u8) -> u8 { return x; }", "fn f(x: u8) -> u8 { return 0; }").unwrap();
    let mut cfg = stable(Algorithm::Range(Method::Relational));
    cfg.solver = SolverConfig { command: vec!["/nonexistent/solver".into()], ..SolverConfig::default() };
    let err = analyze("f", ("a", "b"), &loaded, &cfg).err().unwrap();
    assert!(err.infrastructure, "{err}");
}

#[test]
fn mismatched_expectations_fail_the_case() {
    let dir = tempdir();
    std::fs::copy(corpus("identity.mini"), dir.join("identity.mini")).unwrap();
    std::fs::write(
        dir.join("wrong.toml"),
        "original = \"identity.mini\"\npatched = \"identity.mini\"\nverdict = \"P_eq\"\n",
    )
    .unwrap();
    let summary = patch_impact::report::run_corpus(&dir, &stable(Algorithm::Range(Method::Combined)), 1).unwrap();
    assert!(matches!(summary.cases[0].status, CaseStatus::Failed(_)));
    assert_eq!(summary.exit_code(), 1);
    std::fs::remove_dir_all(&dir).unwrap();
}

fn tempdir() -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pipeline-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

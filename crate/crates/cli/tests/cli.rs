use std::collections::BTreeMap;
use std::process::Command;

use serde::de::DeserializeOwned;
use serde::Serialize;

use ramify_core::extension::{PhiTable, ProfileDump};
use ramify_core::fixtures::FixtureInfo;
use ramify_core::perturb::DualRouteReport;
use ramify_core::suite::SuiteReport;
use ramify_core::symcomb::{DCoefficient, PsiExpansion};
use ramify_core::theorems::VerificationReport;
use ramify_core::{Partition, Verdict};

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn ramify(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_ramify")).args(args).output().unwrap();
    Run {
        code: out.status.code().unwrap(),
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
    }
}

/// Parses a successful JSON run and checks it re-serializes to the same bytes.
fn parsed<T: DeserializeOwned + Serialize>(args: &[&str]) -> T {
    let run = ramify(args);
    assert_eq!(run.code, 0, "{args:?}: {}", run.stderr);
    let value: T = serde_json::from_str(&run.stdout).unwrap();
    assert_eq!(serde_json::to_string_pretty(&value).unwrap() + "\n", run.stdout);
    value
}

fn partition(s: &str) -> Partition {
    s.parse().unwrap()
}

#[test]
fn indices_of_the_quartic() {
    let dump: ProfileDump = parsed(&["indices", "--p", "2", "--poly", "1,0,6,-4,2"]);
    assert_eq!(dump.i, vec![5, 2, 0]);
    assert_eq!((dump.a, dump.b), (vec![2, 1, 1], vec![3, 2, 4]));
    let raw: ProfileDump = parsed(&["indices", "--raw", "--poly", "1,0,6,4,2"]);
    let fixture: ProfileDump = parsed(&["indices", "--example", "2adic-deg4"]);
    assert_eq!(raw.i, vec![5, 2, 0]);
    assert_eq!(fixture.i, vec![5, 2, 0]);
}

#[test]
fn bad_polynomials_are_input_errors() {
    let malformed = ramify(&["indices", "--poly", "1,0,6,x,2"]);
    assert_eq!(malformed.code, 2);
    assert!(malformed.stderr.contains("position 6"), "{}", malformed.stderr);
    let not_eisenstein = ramify(&["indices", "--poly", "2,6,3"]);
    assert_eq!(not_eisenstein.code, 2);
    assert!(not_eisenstein.stderr.contains("not Eisenstein"), "{}", not_eisenstein.stderr);
    assert_eq!(ramify(&["indices", "--backend", "ramified", "--poly", "2"]).code, 2);
    assert_eq!(ramify(&["indices"]).code, 2);
    assert_eq!(ramify(&["indices", "--example", "nope"]).code, 2);
}

#[test]
fn phi_tables_of_both_fixtures() {
    let quartic: PhiTable = parsed(&["phi-table", "--example", "2adic-deg4", "--ell-max", "3"]);
    let rows: Vec<(Vec<i64>, Vec<i64>)> = quartic.rows.into_iter().map(|r| (r.phi_tilde, r.phi)).collect();
    assert_eq!(
        rows,
        vec![
            (vec![6, 4, 4], vec![6, 4, 4]),
            (vec![7, 6, 8], vec![7, 6, 6]),
            (vec![8, 8, 12], vec![8, 8, 8]),
        ]
    );
    let nonic: PhiTable = parsed(&["phi-table", "--example", "3adic-deg9", "--ell-max", "3"]);
    let phi: Vec<Vec<i64>> = nonic.rows.into_iter().map(|r| r.phi).collect();
    assert_eq!(phi, vec![vec![17, 15, 9], vec![18, 18, 18], vec![19, 19, 19]]);
    let empty: PhiTable = parsed(&["phi-table", "--example", "2adic-deg4", "--ell-max", "0"]);
    assert!(empty.rows.is_empty());
}

#[test]
fn dcoeff_and_psi() {
    let d: DCoefficient = parsed(&["dcoeff", "--lambda", "3,1", "--mu", "2,1,1"]);
    assert_eq!(d.d, 1);
    assert_eq!(ramify(&["dcoeff", "--lambda", "3,1", "--mu", "2,1"]).code, 2);
    let psi: PsiExpansion = parsed(&["psi", "--mu", "2", "--n", "2"]);
    let expected = BTreeMap::from([(partition("1,1"), 1), (partition("2"), -2)]);
    assert_eq!(psi.as_map(), expected);
    assert_eq!(ramify(&["psi", "--mu", "1,1,1", "--n", "2"]).code, 2);
}

#[test]
fn perturb_compares_both_routes() {
    for phi in ["1,1", "{1: 1, 2: 1}", "2: 1, 1: 1"] {
        let report: DualRouteReport = parsed(&["perturb", "--example", "2adic-deg4", "--phi", phi]);
        assert!(report.routes_agree && report.root_check);
        assert_eq!(report.comparison.len(), 4);
        assert_eq!(report.phi, vec!["1", "1"]);
    }
    // φ = X leaves f unchanged
    let same: DualRouteReport = parsed(&["perturb", "--example", "2adic-deg4", "--phi", "1"]);
    let lin: Vec<&str> = same.comparison.iter().map(|c| c.linear_algebra.split(' ').next().unwrap()).collect();
    assert_eq!(lin, vec!["0", "6", "4194300", "2"]);
    let bad = ramify(&["perturb", "--example", "2adic-deg4", "--phi", "2,1"]);
    assert_eq!(bad.code, 2);
    assert!(bad.stderr.contains("unit"), "{}", bad.stderr);
    let typo = ramify(&["perturb", "--example", "2adic-deg4", "--phi", "1: 1, 2: 1x"]);
    assert_eq!(typo.code, 2);
    assert!(typo.stderr.contains("position 10"), "{}", typo.stderr);
}

#[test]
fn verify_the_quartic() {
    let report: VerificationReport = parsed(&["verify", "--example", "2adic-deg4", "--ell", "1"]);
    assert_eq!(report.verdict, Verdict::Pass);
    let rho: Vec<u32> = report.rows.iter().map(|r| r.rho).collect();
    assert_eq!(rho, vec![2, 2, 3, 2]);
    let special = &report.rows[3];
    assert_eq!((special.k, special.predicted.as_deref()), (Some(2), Some("2 (mod 2^3)")));
    assert!(report.nochange.holds);
}

#[test]
fn verify_the_nonic() {
    let report: VerificationReport = parsed(&["verify", "--example", "3adic-deg9", "--ell", "2"]);
    assert_eq!(report.verdict, Verdict::Pass);
    let check = report.special.checks.iter().find(|c| c.terms.h == 9).unwrap();
    assert_eq!(check.verdict, Verdict::Pass);
    assert_eq!(check.terms.terms.iter().map(|t| t.g_m).collect::<Vec<_>>(), vec![-2, -2, 1]);
    let r2: VerificationReport = parsed(&["verify", "--example", "3adic-deg9", "--ell", "1", "--r", "[2, 1]"]);
    assert_eq!(r2.verdict, Verdict::Pass);
    assert_eq!(r2.special.checks.len(), 3);
}

#[test]
fn random_suite_is_deterministic() {
    let args = ["verify", "--random", "200", "--seed", "7"];
    let first = ramify(&args);
    assert_eq!(first.code, 0, "{}", first.stderr);
    let report: SuiteReport = serde_json::from_str(&first.stdout).unwrap();
    assert_eq!((report.passed, report.failed, report.precision_ceiling), (200, 0, 0));
    assert_eq!(serde_json::to_string_pretty(&report).unwrap() + "\n", first.stdout);
    assert_eq!(ramify(&args).stdout, first.stdout);
    let other = ramify(&["verify", "--random", "20", "--seed", "8"]);
    let prefix = ramify(&["verify", "--random", "20", "--seed", "7"]);
    assert_ne!(other.stdout, prefix.stdout);
}

#[test]
fn truncated_input_hits_the_ceiling() {
    let run = ramify(&["verify", "--poly", "0,6,-4,2 (mod 2^2)", "--ell", "1"]);
    assert_eq!(run.code, 3, "{}", run.stderr);
    assert!(run.stdout.is_empty());
}

#[test]
fn argument_errors() {
    assert_eq!(ramify(&["verify", "--example", "2adic-deg4"]).code, 2);
    assert_eq!(ramify(&["verify", "--example", "2adic-deg4", "--ell", "0"]).code, 2);
    assert_eq!(ramify(&["verify", "--random", "3", "--ell", "1"]).code, 2);
    assert_eq!(ramify(&["indices", "--example", "2adic-deg4", "--precision", "90"]).code, 2);
}

#[test]
fn examples_are_listed() {
    let all: Vec<FixtureInfo> = parsed(&["example", "--list"]);
    let names: Vec<&str> = all.iter().map(|f| f.name.as_str()).collect();
    assert_eq!(names, vec!["2adic-deg4", "3adic-deg9"]);
    let nonic: FixtureInfo = parsed(&["example", "3adic-deg9"]);
    assert_eq!(nonic.profile.i, vec![16, 12, 0]);
    assert_eq!(nonic.c.len(), 9);
}

#[test]
fn other_backends() {
    let laurent: ProfileDump = parsed(&["indices", "--backend", "laurent", "--p", "3", "--poly", "t, t^2, t + t^2"]);
    assert_eq!(laurent.i, vec![2, 0]);
    let ramified: ProfileDump = parsed(&["indices", "--backend", "ramified:2", "--p", "3", "--poly", "[0,1]"]);
    assert_eq!(ramified.i, vec![0]);
}

#[test]
fn tables_are_readable() {
    let run = ramify(&["verify", "--example", "2adic-deg4", "--ell", "1", "--format", "table"]);
    assert_eq!(run.code, 0);
    assert!(run.stdout.contains("verdict: pass"), "{}", run.stdout);
    let run = ramify(&["phi-table", "--example", "3adic-deg9", "--ell-max", "2", "--format", "table"]);
    assert!(run.stdout.lines().nth(1).unwrap().contains("17"));
    let run = ramify(&["dcoeff", "--lambda", "3,1", "--mu", "2,1,1", "--format", "table"]);
    assert_eq!(run.stdout.trim().parse::<i64>().unwrap(), 1);
    let run = ramify(&["verify", "--random", "4", "--format", "table"]);
    assert!(run.stdout.contains("4 passed"), "{}", run.stdout);
}

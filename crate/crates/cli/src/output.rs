//! JSON and plain-text rendering of command results.

use serde::Serialize;

use ramify_core::extension::{PhiTable, ProfileDump};
use ramify_core::fixtures::FixtureInfo;
use ramify_core::perturb::DualRouteReport;
use ramify_core::suite::SuiteReport;
use ramify_core::symcomb::{DCoefficient, PsiExpansion};
use ramify_core::theorems::VerificationReport;
use ramify_core::Verdict;

use crate::Format;

/// A command result that can be printed either way.
pub trait Render: Serialize {
    fn table(&self) -> String;
}

pub fn render<T: Render>(value: &T, format: Format) -> Result<String, serde_json::Error> {
    match format {
        Format::Json => serde_json::to_string_pretty(value).map(|s| s + "\n"),
        Format::Table => Ok(value.table()),
    }
}

/// Left-aligned columns separated by two spaces.
fn columns(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells
            .iter()
            .zip(&widths)
            .map(|(c, w)| format!("{c:<w$}"))
            .collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut out = line(header.to_vec());
    for row in rows {
        out += &line(row.iter().map(String::as_str).collect());
    }
    out
}

fn list<T: ToString>(items: &[T]) -> String {
    let parts: Vec<String> = items.iter().map(|x| x.to_string()).collect();
    format!("({})", parts.join(", "))
}

fn verdict_name(v: Verdict) -> &'static str {
    match v {
        Verdict::Pass => "pass",
        Verdict::Fail => "FAIL",
        Verdict::PrecisionCeiling => "precision ceiling",
    }
}

fn yes_no(b: bool) -> &'static str {
    if b {
        "yes"
    } else {
        "no"
    }
}

impl Render for ProfileDump {
    fn table(&self) -> String {
        format!(
            "n = {}, u = {}, nu = {}\ni_raw  = {}\ni      = {}\nA      = {}\nb      = {}\nbreaks = {}\n",
            self.n,
            self.u,
            self.nu,
            list(&self.i_raw),
            list(&self.i),
            list(&self.a),
            list(&self.b),
            list(&self.breaks),
        )
    }
}

impl Render for PhiTable {
    fn table(&self) -> String {
        self.to_string()
    }
}

impl Render for DCoefficient {
    fn table(&self) -> String {
        format!("{}\n", self.d)
    }
}

impl Render for PsiExpansion {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .coeffs
            .iter()
            .map(|t| vec![t.lambda.to_string(), t.d.to_string()])
            .collect();
        format!("m_{} in {} variables\n", self.mu, self.n) + &columns(&["lambda", "d"], &rows)
    }
}

impl Render for DualRouteReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .comparison
            .iter()
            .map(|c| {
                vec![
                    c.h.to_string(),
                    c.symmetric.clone(),
                    c.linear_algebra.clone(),
                    c.shared_precision.map_or("exact".into(), |k| k.to_string()),
                    yes_no(c.agree).into(),
                ]
            })
            .collect();
        format!("field: {}\nphi: {}\n", self.field, list(&self.phi))
            + &columns(&["h", "symmetric", "linear algebra", "precision", "agree"], &rows)
            + &format!(
                "routes agree: {}, root check: {}\n",
                yes_no(self.routes_agree),
                yes_no(self.root_check)
            )
    }
}

impl Render for VerificationReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|row| {
                vec![
                    row.h.to_string(),
                    row.rho.to_string(),
                    row.kappa.to_string(),
                    row.k.map_or("-".into(), |k| k.to_string()),
                    row.predicted.clone().unwrap_or_else(|| "-".into()),
                    row.actual.clone(),
                    verdict_name(row.verdict).into(),
                ]
            })
            .collect();
        let routes = &self.special.routes;
        format!(
            "field: {}\nc = {}\ni = {}\nphi = X + r X^{}, r = {}\n",
            self.field,
            list(&self.poly),
            list(&self.profile.i),
            self.ell + 1,
            self.r
        ) + &columns(&["h", "rho", "kappa", "k", "predicted", "actual", "verdict"], &rows)
            + &format!(
                "routes agree: {}, root check: {}\nverdict: {}\n",
                yes_no(routes.routes_agree),
                yes_no(routes.root_check),
                verdict_name(self.verdict)
            )
    }
}

impl Render for SuiteReport {
    fn table(&self) -> String {
        let rows: Vec<Vec<String>> = self
            .cases
            .iter()
            .map(|c| {
                let field = c.spec.field(c.precision);
                vec![
                    c.spec.index.to_string(),
                    field.to_string(),
                    c.spec.n().to_string(),
                    c.spec.ell.to_string(),
                    c.precision.to_string(),
                    verdict_name(c.verdict).into(),
                    c.error.clone().unwrap_or_default(),
                ]
            })
            .collect();
        columns(&["case", "field", "n", "ell", "precision", "verdict", "note"], &rows)
            + &format!(
                "seed {}: {} passed, {} failed, {} at the precision ceiling\n",
                self.config.seed, self.passed, self.failed, self.precision_ceiling
            )
    }
}

impl Render for FixtureInfo {
    fn table(&self) -> String {
        format!(
            "{}: {}\nfield: {}\nc = {}\n",
            self.name,
            self.description,
            self.field,
            list(&self.c)
        ) + &self.profile.table()
    }
}

impl Render for Vec<FixtureInfo> {
    fn table(&self) -> String {
        self.iter().map(|f| format!("{}  {}\n", f.name, f.description)).collect()
    }
}

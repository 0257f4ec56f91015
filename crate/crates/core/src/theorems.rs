//! Coefficient congruences between `f` and the minimal polynomial `f̃` of a
//! perturbed uniformizer, and harnesses that check them against ground truth.
//!
//! With `j = v̄_p(h)` the predicted exponents are
//! `ρ_h(ℓ) = ⌈(φ_j(ℓ) + h)/n⌉` and Krasner's weaker `κ_h(ℓ) = ⌈(φ_ν(ℓ) + h)/n⌉`.
//! `f̃ ∼_ℓ f` means `c̃_h ≡ c_h (mod M_K^{ρ_h(ℓ)})` for every `h`.
//!
//! The automorphism in the hypotheses is always the identity: `π̃_L` is built
//! directly as `φ(π_L)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basefield::{BaseField, FieldElement, FieldError, Precision};
use crate::extension::{ceil_div, vbar, EisensteinPoly, ExtensionError, InseparabilityProfile, ProfileDump};
use crate::perturb::{
    apply_series, dual_route, minpoly_linear_algebra, LValuation, PerturbError, PerturbationSeries, QuotientRing,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TheoremError {
    #[error("h = {h} out of range 1..={n}")]
    BadIndex { h: u32, n: u32 },
    #[error("ℓ must be positive")]
    BadEll,
    #[error("polynomials differ in degree or base field")]
    Mismatch,
    #[error("hypothesis fails: v_L(φ(π_L) - π_L) = {valuation}, need at least {needed}")]
    HypothesisViolated { valuation: i64, needed: i64 },
    #[error("h = {h}: need precision {needed}, have {available}")]
    PrecisionTooLow { h: u32, needed: u32, available: u32 },
    #[error("precision too low to check the hypothesis (only v_L >= {bound} is known)")]
    HypothesisUncertain { bound: i64 },
    #[error("no special term for ℓ = {ell}, j = {j}")]
    NotApplicable { ell: u32, j: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Perturb(#[from] PerturbError),
}

impl TheoremError {
    /// True when re-running at a higher working precision could help.
    pub fn is_precision(&self) -> bool {
        match self {
            TheoremError::PrecisionTooLow { .. } | TheoremError::HypothesisUncertain { .. } => true,
            TheoremError::Field(FieldError::PrecisionTooLow { .. }) => true,
            TheoremError::Extension(ExtensionError::Field(FieldError::PrecisionTooLow { .. })) => true,
            TheoremError::Perturb(e) => e.is_precision(),
            _ => false,
        }
    }
}

/// Outcome of one certified check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    /// The check could not be certified below the precision ceiling.
    PrecisionCeiling,
}

impl Verdict {
    pub fn from_bool(ok: bool) -> Self {
        if ok {
            Verdict::Pass
        } else {
            Verdict::Fail
        }
    }

    /// Combine: any failure wins, then any uncertified check.
    pub fn and(self, other: Verdict) -> Verdict {
        match (self, other) {
            (Verdict::Fail, _) | (_, Verdict::Fail) => Verdict::Fail,
            (Verdict::PrecisionCeiling, _) | (_, Verdict::PrecisionCeiling) => Verdict::PrecisionCeiling,
            _ => Verdict::Pass,
        }
    }
}

fn check_h(profile: &InseparabilityProfile, h: u32) -> Result<(), TheoremError> {
    let n = profile.n();
    if h == 0 || h > n {
        return Err(TheoremError::BadIndex { h, n });
    }
    Ok(())
}

/// `ρ_h(ℓ) = ⌈(φ_j(ℓ) + h)/n⌉` with `j = v̄_p(h)`.
pub fn rho(profile: &InseparabilityProfile, h: u32, ell: u32) -> Result<u32, TheoremError> {
    check_h(profile, h)?;
    let j = vbar(h as i64, profile.nu(), profile.p());
    let value = ceil_div(profile.phi_at(j, ell as i64) + h as i64, profile.n() as i64);
    Ok(value as u32)
}

/// `κ_h(ℓ) = ⌈(φ_ν(ℓ) + h)/n⌉`, the exponent from Krasner's lemma.
pub fn kappa(profile: &InseparabilityProfile, h: u32, ell: u32) -> Result<u32, TheoremError> {
    check_h(profile, h)?;
    let value = ceil_div(profile.phi_at(profile.nu(), ell as i64) + h as i64, profile.n() as i64) as u32;
    debug_assert!(value <= rho(profile, h, ell)?, "κ exceeds ρ");
    Ok(value)
}

/// One coefficient of a [`CongruenceReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceRow {
    pub h: u32,
    pub rho: u32,
    pub kappa: u32,
    /// `c̃_h ≡ c_h (mod M_K^ρ)`.
    pub verified: bool,
    /// Largest certified `k` with `c̃_h ≡ c_h (mod M_K^k)`; `None` when the
    /// two coefficients are exactly equal.
    pub verified_exponent: Option<u32>,
    /// Shared certified precision of the two coefficients (`None` when exact).
    pub precision: Option<u32>,
}

/// Cross-check of the two minimal-polynomial routes behind a report.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RouteCheck {
    pub routes_agree: bool,
    pub root_check: bool,
}

/// Per-coefficient verdicts for `f̃ ∼_ℓ f`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceReport {
    pub ell: u32,
    pub rows: Vec<CongruenceRow>,
    /// Conjunction of the row verdicts.
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub routes: Option<RouteCheck>,
}

impl CongruenceReport {
    /// Every row verified, and both routes agree when they were run.
    pub fn verdict(&self) -> Verdict {
        let routes_ok = self.routes.is_none_or(|r| r.routes_agree && r.root_check);
        Verdict::from_bool(self.holds && routes_ok)
    }
}

/// Checks `f̃ ∼_ℓ f`, using the indices of `f` for the exponents.
pub fn equiv_ell(f: &EisensteinPoly, ft: &EisensteinPoly, ell: u32) -> Result<CongruenceReport, TheoremError> {
    if ell == 0 {
        return Err(TheoremError::BadEll);
    }
    if f.degree() != ft.degree() || !f.field().same_ring(&ft.field()) {
        return Err(TheoremError::Mismatch);
    }
    let profile = f.indices()?;
    let mut rows = Vec::with_capacity(f.degree() as usize);
    for h in 1..=f.degree() {
        let (a, b) = (f.c(h), ft.c(h));
        let rho_h = rho(&profile, h, ell)?;
        let kappa_h = kappa(&profile, h, ell)?;
        let precision = a.precision().min(b.precision()).as_absolute();
        if let Some(available) = precision.filter(|&k| k < rho_h) {
            return Err(TheoremError::PrecisionTooLow {
                h,
                needed: rho_h,
                available,
            });
        }
        let verified = a.congruent(b, rho_h)?;
        let (k, _) = a.agreement(b)?;
        let verified_exponent = match precision {
            None if k == u32::MAX => None,
            None => Some(k),
            Some(cap) => Some(k.min(cap)),
        };
        rows.push(CongruenceRow {
            h,
            rho: rho_h,
            kappa: kappa_h,
            verified,
            verified_exponent,
            precision,
        });
    }
    let holds = rows.iter().all(|r| r.verified);
    Ok(CongruenceReport {
        ell,
        rows,
        holds,
        routes: None,
    })
}

/// One correction term `g_m c_n^{k-A_m} c_{b_m} r^{p^m}` of a special prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialTerm {
    pub m: u32,
    #[serde(rename = "A_m")]
    pub a_m: i64,
    pub b_m: i64,
    pub g_m: i64,
}

/// The data of a special congruence for `(ℓ, j)` with `v̄_p(φ_j(ℓ)) = j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialTerms {
    pub ell: u32,
    pub j: u32,
    pub h: u32,
    pub h0: u32,
    pub k: u32,
    /// `S_j = {m <= j : φ_j(ℓ) = φ̃_m(ℓ)}` with the term for each `m`.
    pub terms: Vec<SpecialTerm>,
}

impl SpecialTerms {
    pub fn s_j(&self) -> Vec<u32> {
        self.terms.iter().map(|t| t.m).collect()
    }
}

fn sign(exp: i64) -> i64 {
    if exp.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `None` when `v̄_p(φ_j(ℓ)) != j`.
pub fn special_terms(profile: &InseparabilityProfile, ell: u32, j: u32) -> Result<Option<SpecialTerms>, TheoremError> {
    if ell == 0 {
        return Err(TheoremError::BadEll);
    }
    let (p, nu, u) = (profile.p(), profile.nu(), profile.u() as i64);
    if j > nu {
        return Ok(None);
    }
    let n = profile.n() as i64;
    let ell_i = ell as i64;
    let phi = profile.phi_at(j, ell_i);
    if vbar(phi, nu, p) != j {
        return Ok(None);
    }
    let candidates: Vec<i64> = (1..=n).filter(|h| (phi + h) % n == 0).collect();
    assert_eq!(candidates.len(), 1, "exactly one h in 1..n with n | φ_j(ℓ) + h");
    let h = candidates[0];
    let pj = (p as i64).pow(j);
    debug_assert_eq!(h % pj, 0);
    let h0 = h / pj;
    let k = (phi + h) / n;
    let mut terms = Vec::new();
    for m in 0..=j {
        if profile.phi_tilde_at(m, ell_i) != phi {
            continue;
        }
        let a_m = profile.a()[m as usize];
        let b_m = profile.b()[m as usize];
        let s = sign(k + ell_i + a_m);
        let up = u * (p as i64).pow(nu - m);
        let head = h0 * (p as i64).pow(j - m) + ell_i;
        let g_m = if b_m == n {
            s * up
        } else if b_m < h {
            s * (head - up)
        } else {
            s * head
        };
        debug_assert!(k >= a_m);
        terms.push(SpecialTerm { m, a_m, b_m, g_m });
    }
    Ok(Some(SpecialTerms {
        ell,
        j,
        h: h as u32,
        h0: h0 as u32,
        k: k as u32,
        terms,
    }))
}

/// A special congruence with its predicted value.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialPrediction {
    pub terms: SpecialTerms,
    /// `c_h + Σ_{m ∈ S_j} g_m c_n^{k-A_m} c_{b_m} r^{p^m}`, modulo `M_K^{k+1}`.
    pub predicted: FieldElement,
}

/// Predicted `c̃_h (mod M_K^{k+1})` when `π̃_L ≡ π_L + r π_L^{ℓ+1} (mod M_L^{ℓ+2})`.
pub fn predict_special(f: &EisensteinPoly, r: &FieldElement, ell: u32, j: u32) -> Result<SpecialPrediction, TheoremError> {
    let profile = f.indices()?;
    let terms = special_terms(&profile, ell, j)?.ok_or(TheoremError::NotApplicable { ell, j })?;
    let field = f.field();
    let r = r.in_field(field)?;
    let n = f.degree();
    let p = field.p() as u32;
    let mut acc = f.c(terms.h).clone();
    for t in &terms.terms {
        let term = f
            .c(n)
            .pow((terms.k as i64 - t.a_m) as u32)
            .mul(f.c(t.b_m as u32))?
            .mul(&r.pow(p.pow(t.m)))?
            .scale(&t.g_m.into());
        acc = acc.add(&term)?;
    }
    let target = terms.k + 1;
    if let Precision::Absolute(a) = acc.precision() {
        if a < target {
            return Err(TheoremError::PrecisionTooLow {
                h: terms.h,
                needed: target,
                available: a,
            });
        }
    }
    Ok(SpecialPrediction {
        predicted: acc.truncate(target),
        terms,
    })
}

/// `v_L(φ(π_L) - π_L) >= ℓ + 1`, or the reason it cannot be confirmed.
fn check_nochange_hypothesis(f: &EisensteinPoly, phi: &PerturbationSeries, ell: u32) -> Result<(), TheoremError> {
    let ring = QuotientRing::new(f);
    let diff = ring.sub(&apply_series(f, phi)?, &ring.pi());
    let needed = ell as i64 + 1;
    match diff.valuation() {
        LValuation::Infinity => Ok(()),
        LValuation::Finite(v) if v >= needed => Ok(()),
        LValuation::Finite(v) => Err(TheoremError::HypothesisViolated { valuation: v, needed }),
        LValuation::Insufficient { bound } if bound >= needed => Ok(()),
        LValuation::Insufficient { bound } => Err(TheoremError::HypothesisUncertain { bound }),
    }
}

/// Builds `f̃` for `π̃_L = φ(π_L)` by both routes and checks `f̃ ∼_ℓ f`.
pub fn verify_nochange(f: &EisensteinPoly, phi: &PerturbationSeries, ell: u32) -> Result<CongruenceReport, TheoremError> {
    if ell == 0 {
        return Err(TheoremError::BadEll);
    }
    check_nochange_hypothesis(f, phi, ell)?;
    let dual = dual_route(f, phi)?;
    let mut report = equiv_ell(f, &dual.linear_algebra, ell)?;
    report.routes = Some(RouteCheck {
        routes_agree: dual.agree(),
        root_check: dual.root_check,
    });
    Ok(report)
}

/// Ground truth against one special prediction.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialCheck {
    pub terms: SpecialTerms,
    pub predicted: String,
    pub actual: String,
    pub verdict: Verdict,
}

/// Every applicable `j` for `φ = X + r X^{ℓ+1}`, checked modulo `M_K^{k+1}`.
/// Empty when no `j` satisfies `v̄_p(φ_j(ℓ)) = j`.
pub fn verify_special(f: &EisensteinPoly, r: &FieldElement, ell: u32) -> Result<SpecialReport, TheoremError> {
    if ell == 0 {
        return Err(TheoremError::BadEll);
    }
    let field = f.field();
    let r = r.in_field(field)?;
    let profile = f.indices()?;
    let phi = PerturbationSeries::x_plus(field, &r, ell)?;
    let dual = dual_route(f, &phi)?;
    let mut checks = Vec::new();
    for j in 0..=profile.nu() {
        if special_terms(&profile, ell, j)?.is_none() {
            continue;
        }
        let prediction = predict_special(f, &r, ell, j)?;
        let h = prediction.terms.h;
        let actual = dual.linear_algebra.c(h);
        let target = prediction.terms.k + 1;
        if let Some(available) = actual.precision().as_absolute().filter(|&a| a < target) {
            return Err(TheoremError::PrecisionTooLow {
                h,
                needed: target,
                available,
            });
        }
        let ok = actual.congruent(&prediction.predicted, target)?;
        checks.push(SpecialCheck {
            predicted: prediction.predicted.to_string(),
            actual: actual.truncate(target).to_string(),
            verdict: Verdict::from_bool(ok),
            terms: prediction.terms,
        });
    }
    Ok(SpecialReport {
        ell,
        checks,
        routes: RouteCheck {
            routes_agree: dual.agree(),
            root_check: dual.root_check,
        },
    })
}

/// All special checks for one `ℓ`, with the route cross-check behind them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecialReport {
    pub ell: u32,
    pub checks: Vec<SpecialCheck>,
    pub routes: RouteCheck,
}

impl SpecialReport {
    pub fn verdict(&self) -> Verdict {
        let routes = Verdict::from_bool(self.routes.routes_agree && self.routes.root_check);
        self.checks.iter().fold(routes, |acc, c| acc.and(c.verdict))
    }
}

/// One coefficient of a [`VerificationReport`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientRow {
    pub h: u32,
    pub rho: u32,
    pub kappa: u32,
    /// `k` when `h` carries a special congruence.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<u32>,
    /// Predicted `c̃_h` modulo `M_K^{k+1}` for special rows.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub predicted: Option<String>,
    pub actual: String,
    pub verdict: Verdict,
}

/// Everything checked for `f`, `ℓ` and `φ = X + r X^{ℓ+1}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub field: BaseField,
    pub poly: Vec<String>,
    pub ell: u32,
    pub r: String,
    pub profile: ProfileDump,
    pub rows: Vec<CoefficientRow>,
    pub nochange: CongruenceReport,
    pub special: SpecialReport,
    pub verdict: Verdict,
}

/// Runs the unchanged-coefficient check and every special congruence for
/// `φ = X + r X^{ℓ+1}`, and tabulates them per coefficient.
pub fn verify_case(f: &EisensteinPoly, r: &FieldElement, ell: u32) -> Result<VerificationReport, TheoremError> {
    let field = f.field();
    let r = r.in_field(field)?;
    let phi = PerturbationSeries::x_plus(field, &r, ell)?;
    let nochange = verify_nochange(f, &phi, ell)?;
    let special = verify_special(f, &r, ell)?;
    let ft = minpoly_linear_algebra(f, &phi)?;
    let rows = nochange
        .rows
        .iter()
        .map(|row| {
            let check = special.checks.iter().find(|c| c.terms.h == row.h);
            let verdict = check.map_or(Verdict::Pass, |c| c.verdict).and(Verdict::from_bool(row.verified));
            CoefficientRow {
                h: row.h,
                rho: row.rho,
                kappa: row.kappa,
                k: check.map(|c| c.terms.k),
                predicted: check.map(|c| c.predicted.clone()),
                actual: ft.c(row.h).to_string(),
                verdict,
            }
        })
        .collect();
    let verdict = nochange.verdict().and(special.verdict());
    Ok(VerificationReport {
        field,
        poly: f.coeffs().iter().map(|c| c.to_string()).collect(),
        ell,
        r: r.to_string(),
        profile: f.indices()?.dump(),
        rows,
        nochange,
        special,
        verdict,
    })
}

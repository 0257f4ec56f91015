//! Eisenstein polynomials, the totally ramified extension `L = K(π_L)` they
//! define, indices of inseparability and the generalized Hasse-Herbrand
//! functions `φ_j`.
//!
//! Polynomials use the alternating-sign convention
//! `f(X) = X^n - c_1 X^{n-1} + c_2 X^{n-2} - ... + (-1)^n c_n`, so `c_h` is
//! the `h`-th elementary symmetric polynomial of the roots.

use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basefield::{vp, BaseField, FieldElement, FieldError, Valuation};

pub type Rational = Ratio<i64>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExtensionError {
    #[error("not Eisenstein: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    NotEisenstein(Vec<Violation>),
    #[error("degree must be at least 1")]
    EmptyPolynomial,
    #[error("polynomial is inseparable (every c_h with p ∤ h vanishes)")]
    Inseparable,
    #[error("monic coefficient list must start with 1")]
    NotMonic,
    #[error("index j = {j} out of range 0..={nu}")]
    IndexOutOfRange { j: u32, nu: u32 },
    #[error(transparent)]
    Field(#[from] FieldError),
}

/// One failed Eisenstein condition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    /// `v(c_h) = 0`.
    UnitCoefficient { h: u32 },
    /// `v(c_n) != 1`.
    ConstantTerm { valuation: Option<u32> },
    /// A valuation needed for the check is not certified at this precision.
    Uncertain { h: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::UnitCoefficient { h } => write!(f, "c_{h} is a unit"),
            Violation::ConstantTerm { valuation: Some(v) } => {
                write!(f, "constant term has valuation {v}, expected 1")
            }
            Violation::ConstantTerm { valuation: None } => write!(f, "constant term is zero"),
            Violation::Uncertain { h } => write!(f, "valuation of c_{h} is not certified"),
        }
    }
}

/// `min(v_p(k), ν)`; `k = 0` gives `ν`.
pub fn vbar(k: i64, nu: u32, p: u64) -> u32 {
    if k == 0 {
        nu
    } else {
        vp(k, p).min(nu)
    }
}

/// A monic Eisenstein polynomial over `O_K`, stored as `c_1..c_n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EisensteinPoly {
    field: BaseField,
    coeffs: Vec<FieldElement>,
    u: u32,
    nu: u32,
}

fn split_degree(n: u32, p: u64) -> (u32, u32) {
    let mut u = n;
    let mut nu = 0;
    while (u as u64).is_multiple_of(p) {
        u /= p as u32;
        nu += 1;
    }
    (u, nu)
}

impl EisensteinPoly {
    /// From `c_1..c_n` in the alternating-sign convention; validated.
    pub fn new(field: BaseField, coeffs: Vec<FieldElement>) -> Result<Self, ExtensionError> {
        let f = Self::new_unchecked(field, coeffs)?;
        f.validate()?;
        Ok(f)
    }

    /// Same as [`EisensteinPoly::new`] without the Eisenstein check.
    pub fn new_unchecked(field: BaseField, coeffs: Vec<FieldElement>) -> Result<Self, ExtensionError> {
        if coeffs.is_empty() {
            return Err(ExtensionError::EmptyPolynomial);
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.in_field(field))
            .collect::<Result<Vec<_>, _>>()?;
        let (u, nu) = split_degree(coeffs.len() as u32, field.p());
        Ok(Self { field, coeffs, u, nu })
    }

    /// From ordinary monic coefficients `[1, a_{n-1}, ..., a_0]` of
    /// `X^n + a_{n-1} X^{n-1} + ... + a_0`.
    pub fn from_monic(field: BaseField, monic: Vec<FieldElement>) -> Result<Self, ExtensionError> {
        let Some((lead, rest)) = monic.split_first() else {
            return Err(ExtensionError::EmptyPolynomial);
        };
        if !lead.is_exact() || lead.sub(&field.one())?.valuation() != Valuation::Infinity {
            return Err(ExtensionError::NotMonic);
        }
        let coeffs = rest
            .iter()
            .enumerate()
            .map(|(i, a)| if i % 2 == 0 { a.neg() } else { a.clone() })
            .collect();
        Self::new(field, coeffs)
    }

    /// From integer `c_1..c_n` (exact).
    pub fn from_integers(field: BaseField, coeffs: &[i64]) -> Result<Self, ExtensionError> {
        Self::new(field, coeffs.iter().map(|&c| field.exact_integer(c)).collect())
    }

    /// Check `v(c_h) >= 1` for all `h` and `v(c_n) = 1`.
    pub fn validate(&self) -> Result<(), ExtensionError> {
        let n = self.degree();
        let mut bad = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate() {
            let h = i as u32 + 1;
            let v = c.valuation();
            if h == n {
                match v {
                    Valuation::Finite(1) => {}
                    Valuation::Finite(v) => bad.push(Violation::ConstantTerm { valuation: Some(v) }),
                    Valuation::Infinity => bad.push(Violation::ConstantTerm { valuation: None }),
                    Valuation::Insufficient { precision } if precision <= 1 => {
                        bad.push(Violation::Uncertain { h })
                    }
                    Valuation::Insufficient { .. } => bad.push(Violation::ConstantTerm { valuation: None }),
                }
            } else {
                match v {
                    Valuation::Finite(0) => bad.push(Violation::UnitCoefficient { h }),
                    Valuation::Insufficient { precision: 0 } => bad.push(Violation::Uncertain { h }),
                    _ => {}
                }
            }
        }
        if bad.is_empty() {
            Ok(())
        } else {
            Err(ExtensionError::NotEisenstein(bad))
        }
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    /// `c_h` for `1 <= h <= n`.
    pub fn c(&self, h: u32) -> &FieldElement {
        &self.coeffs[h as usize - 1]
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Ordinary coefficients `[1, a_{n-1}, ..., a_0]`.
    pub fn monic_coeffs(&self) -> Vec<FieldElement> {
        let mut out = vec![self.field.one()];
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(if i % 2 == 0 { c.neg() } else { c.clone() });
        }
        out
    }

    /// `i_j^{π_L} = min{ n·v(c_h) - h : v̄_p(h) <= j }` for `0 <= j <= ν`.
    pub fn indices_raw(&self) -> Result<Vec<RawIndex>, ExtensionError> {
        let n = self.degree() as i64;
        let p = self.field.p();
        (0..=self.nu)
            .map(|j| {
                let mut best: Option<i64> = None;
                let mut floor: Option<(i64, u32)> = None;
                for h in 1..=n {
                    if vbar(h, self.nu, p) > j {
                        continue;
                    }
                    match self.c(h as u32).valuation() {
                        Valuation::Finite(v) => {
                            let cand = n * v as i64 - h;
                            best = Some(best.map_or(cand, |b| b.min(cand)));
                        }
                        Valuation::Infinity => {}
                        Valuation::Insufficient { precision } => {
                            let bound = n * precision as i64 - h;
                            if floor.is_none_or(|(b, _)| bound < b) {
                                floor = Some((bound, precision));
                            }
                        }
                    }
                }
                if let Some((bound, precision)) = floor {
                    if best.is_none_or(|b| bound < b) {
                        // a truncated zero might undercut the minimum
                        let needed = match best {
                            Some(b) => ceil_div(b + n, n) as u32,
                            None => precision + 1,
                        };
                        return Err(FieldError::PrecisionTooLow {
                            needed,
                            available: precision,
                        }
                        .into());
                    }
                }
                Ok(best.map_or(RawIndex::Infinite, RawIndex::Finite))
            })
            .collect()
    }

    /// Full inseparability profile.
    pub fn indices(&self) -> Result<InseparabilityProfile, ExtensionError> {
        let raw = self.indices_raw()?;
        InseparabilityProfile::from_raw(self.field.p(), self.degree(), self.field.e_k(), raw)
    }
}

impl fmt::Display for EisensteinPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "c = ({}) over {}", parts.join(", "), self.field)
    }
}

/// `i_j^{π_L}`: finite, or infinite when every eligible `c_h` is exactly zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "RawRepr", into = "RawRepr")]
pub enum RawIndex {
    Finite(i64),
    Infinite,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum RawRepr {
    Num(i64),
    Text(String),
}

impl From<RawIndex> for RawRepr {
    fn from(r: RawIndex) -> Self {
        match r {
            RawIndex::Finite(v) => RawRepr::Num(v),
            RawIndex::Infinite => RawRepr::Text("inf".into()),
        }
    }
}

impl TryFrom<RawRepr> for RawIndex {
    type Error = String;
    fn try_from(r: RawRepr) -> Result<Self, String> {
        match r {
            RawRepr::Num(v) => Ok(RawIndex::Finite(v)),
            RawRepr::Text(s) if s == "inf" => Ok(RawIndex::Infinite),
            RawRepr::Text(s) => Err(format!("expected integer or \"inf\", got {s:?}")),
        }
    }
}

impl RawIndex {
    pub fn finite(self) -> Option<i64> {
        match self {
            RawIndex::Finite(v) => Some(v),
            RawIndex::Infinite => None,
        }
    }
}

impl fmt::Display for RawIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RawIndex::Finite(v) => write!(f, "{v}"),
            RawIndex::Infinite => write!(f, "inf"),
        }
    }
}

/// Indices of inseparability of `L/K` and the data for `φ_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InseparabilityProfile {
    p: u64,
    n: u32,
    u: u32,
    nu: u32,
    /// `e_L = n·e_K`; `None` in characteristic `p`.
    e_l: Option<i64>,
    raw: Vec<RawIndex>,
    indices: Vec<i64>,
    a: Vec<i64>,
    b: Vec<i64>,
}

/// `i = A·n - b` with `1 <= b <= n`.
pub fn split_index(i: i64, n: i64) -> (i64, i64) {
    let mut b = (-i).rem_euclid(n);
    if b == 0 {
        b = n;
    }
    ((i + b) / n, b)
}

impl InseparabilityProfile {
    /// Profile from raw indices `i_0^π..i_ν^π`.
    pub fn from_raw(p: u64, n: u32, e_k: Option<u32>, raw: Vec<RawIndex>) -> Result<Self, ExtensionError> {
        let (u, nu) = split_degree(n, p);
        assert_eq!(raw.len(), nu as usize + 1, "one raw index per j");
        let e_l = e_k.map(|e| n as i64 * e as i64);
        let mut indices = Vec::with_capacity(raw.len());
        for j in 0..=nu as usize {
            let best = match e_l {
                None => raw[j].finite(),
                Some(el) => (j..=nu as usize)
                    .filter_map(|jp| raw[jp].finite().map(|r| r + (jp - j) as i64 * el))
                    .min(),
            };
            indices.push(best.ok_or(ExtensionError::Inseparable)?);
        }
        let (a, b) = indices.iter().map(|&i| split_index(i, n as i64)).unzip();
        Ok(Self {
            p,
            n,
            u,
            nu,
            e_l,
            raw,
            indices,
            a,
            b,
        })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn u(&self) -> u32 {
        self.u
    }

    pub fn nu(&self) -> u32 {
        self.nu
    }

    pub fn e_l(&self) -> Option<i64> {
        self.e_l
    }

    pub fn raw(&self) -> &[RawIndex] {
        &self.raw
    }

    /// `i_0, ..., i_ν`.
    pub fn indices(&self) -> &[i64] {
        &self.indices
    }

    pub fn a(&self) -> &[i64] {
        &self.a
    }

    pub fn b(&self) -> &[i64] {
        &self.b
    }

    fn pj(&self, j: u32) -> i64 {
        (self.p as i64).pow(j)
    }

    /// `φ̃_j(x) = i_j + p^j x`.
    pub fn phi_tilde(&self, j: u32, x: Rational) -> Rational {
        Rational::from_integer(self.indices[j as usize]) + x * self.pj(j)
    }

    /// `φ_j(x) = min_{j0 <= j} φ̃_{j0}(x)`.
    pub fn phi(&self, j: u32, x: Rational) -> Rational {
        (0..=j).map(|j0| self.phi_tilde(j0, x)).min().expect("j0 = 0 exists")
    }

    /// `φ̃_j` at an integer.
    pub fn phi_tilde_at(&self, j: u32, x: i64) -> i64 {
        self.indices[j as usize] + self.pj(j) * x
    }

    /// `φ_j` at an integer.
    pub fn phi_at(&self, j: u32, x: i64) -> i64 {
        (0..=j).map(|j0| self.phi_tilde_at(j0, x)).min().expect("j0 = 0 exists")
    }

    /// `φ_{L/K}(x) = φ_ν(x)/n`.
    pub fn hasse_herbrand(&self, x: Rational) -> Rational {
        self.phi(self.nu, x) / self.n as i64
    }

    /// Points where the active line of `φ_ν` changes, ascending.
    pub fn lower_breaks(&self) -> Vec<Rational> {
        let lines: Vec<(i64, i64)> = (0..=self.nu).map(|j| (self.indices[j as usize], self.pj(j))).collect();
        // at x = 0 the minimum is i_ν = 0, reached only by the steepest line
        let mut cur = self.nu as usize;
        let mut x = Rational::zero();
        let mut breaks = Vec::new();
        loop {
            let (ci, cs) = lines[cur];
            let mut next: Option<(Rational, usize)> = None;
            for (k, &(i, s)) in lines.iter().enumerate() {
                if s >= cs {
                    continue;
                }
                // ci + cs x = i + s x
                let meet = Rational::new(i - ci, cs - s);
                if meet < x {
                    continue;
                }
                let better = match next {
                    None => true,
                    Some((mx, mk)) => meet < mx || (meet == mx && s < lines[mk].1),
                };
                if better {
                    next = Some((meet, k));
                }
            }
            match next {
                Some((mx, k)) => {
                    if breaks.last() != Some(&mx) && mx > Rational::zero() {
                        breaks.push(mx);
                    }
                    x = mx;
                    cur = k;
                }
                None => break,
            }
        }
        breaks
    }

    /// Rows `ℓ = 1..=ell_max` of `φ̃_j(ℓ)` and `φ_j(ℓ)`.
    pub fn phi_table(&self, ell_max: u32) -> PhiTable {
        let rows = (1..=ell_max as i64)
            .map(|ell| PhiRow {
                ell,
                phi_tilde: (0..=self.nu).map(|j| self.phi_tilde_at(j, ell)).collect(),
                phi: (0..=self.nu).map(|j| self.phi_at(j, ell)).collect(),
            })
            .collect();
        PhiTable { nu: self.nu, rows }
    }

    /// JSON-friendly summary.
    pub fn dump(&self) -> ProfileDump {
        ProfileDump {
            n: self.n,
            u: self.u,
            nu: self.nu,
            i_raw: self.raw.clone(),
            i: self.indices.clone(),
            a: self.a.clone(),
            b: self.b.clone(),
            breaks: self.lower_breaks().iter().map(rational_string).collect(),
        }
    }
}

pub fn rational_string(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Parse `a` or `a/b`.
pub fn parse_rational(s: &str) -> Option<Rational> {
    match s.split_once('/') {
        Some((a, b)) => {
            let a: i64 = a.trim().parse().ok()?;
            let b: i64 = b.trim().parse().ok()?;
            (b != 0).then(|| Rational::new(a, b))
        }
        None => Some(Rational::from_integer(s.trim().parse().ok()?)),
    }
}

/// Profile summary as emitted by the command-line tool.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProfileDump {
    pub n: u32,
    pub u: u32,
    pub nu: u32,
    pub i_raw: Vec<RawIndex>,
    pub i: Vec<i64>,
    #[serde(rename = "A")]
    pub a: Vec<i64>,
    pub b: Vec<i64>,
    /// Rationals rendered as `"3"` or `"5/2"`.
    pub breaks: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiRow {
    pub ell: i64,
    pub phi_tilde: Vec<i64>,
    pub phi: Vec<i64>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PhiTable {
    pub nu: u32,
    pub rows: Vec<PhiRow>,
}

impl fmt::Display for PhiTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut header = vec!["l".to_string()];
        header.extend((0..=self.nu).map(|j| format!("~phi_{j}")));
        header.extend((0..=self.nu).map(|j| format!("phi_{j}")));
        let mut lines = vec![header];
        for row in &self.rows {
            let mut cells = vec![row.ell.to_string()];
            cells.extend(row.phi_tilde.iter().map(|v| v.to_string()));
            cells.extend(row.phi.iter().map(|v| v.to_string()));
            lines.push(cells);
        }
        let width = lines.iter().flatten().map(|c| c.len()).max().unwrap_or(1);
        for line in lines {
            let cells: Vec<String> = line.iter().map(|c| format!("{c:>width$}")).collect();
            writeln!(f, "{}", cells.join(" | "))?;
        }
        Ok(())
    }
}

/// Smallest integer `>= x`.
pub fn ceil_div(a: i64, b: i64) -> i64 {
    debug_assert!(b > 0);
    Rational::new(a, b).ceil().to_integer()
}

/// `v_L` of a field element embedded in `L` (`n·v_K`), if certain.
pub fn v_l(n: u32, x: &FieldElement) -> Option<i64> {
    x.valuation().finite().map(|v| v as i64 * n as i64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example2() -> EisensteinPoly {
        EisensteinPoly::from_integers(BaseField::qp(2).unwrap(), &[0, 6, -4, 2]).unwrap()
    }

    #[test]
    fn vbar_caps() {
        assert_eq!(vbar(9, 2, 3), 2);
        assert_eq!(vbar(6, 2, 3), 1);
        assert_eq!(vbar(27, 2, 3), 2);
        assert_eq!(vbar(5, 2, 3), 0);
    }

    #[test]
    fn eisenstein_validation() {
        let q2 = BaseField::qp(2).unwrap();
        assert!(example2().validate().is_ok());
        assert!(matches!(
            EisensteinPoly::from_integers(q2, &[0, 1]),
            Err(ExtensionError::NotEisenstein(v)) if v == vec![Violation::ConstantTerm { valuation: Some(0) }]
        ));
        assert!(matches!(
            EisensteinPoly::from_integers(q2, &[0, 4]),
            Err(ExtensionError::NotEisenstein(_))
        ));
        assert!(matches!(
            EisensteinPoly::from_integers(q2, &[1, 2]),
            Err(ExtensionError::NotEisenstein(v)) if v == vec![Violation::UnitCoefficient { h: 1 }]
        ));
    }

    #[test]
    fn monic_round_trip() {
        let q2 = BaseField::qp(2).unwrap();
        let monic: Vec<FieldElement> = [1, 0, 6, 4, 2].iter().map(|&a| q2.exact_integer(a)).collect();
        let f = EisensteinPoly::from_monic(q2, monic.clone()).unwrap();
        assert_eq!(f, example2());
        assert_eq!(f.monic_coeffs(), monic);
    }

    #[test]
    fn example2_profile() {
        let prof = example2().indices().unwrap();
        assert_eq!(prof.raw(), &[RawIndex::Finite(5), RawIndex::Finite(2), RawIndex::Finite(0)]);
        assert_eq!(prof.indices(), &[5, 2, 0]);
        assert_eq!(prof.a(), &[2, 1, 1]);
        assert_eq!(prof.b(), &[3, 2, 4]);
        assert_eq!(
            prof.lower_breaks(),
            vec![Rational::from_integer(1), Rational::from_integer(3)]
        );
        assert_eq!(prof.hasse_herbrand(Rational::from_integer(1)), Rational::from_integer(1));
        assert_eq!(prof.phi(2, Rational::from_integer(1)), Rational::from_integer(4));
    }

    #[test]
    fn raw_index_can_be_infinite() {
        // n = 4 over Q_2 with c_1 = c_3 = 0 exactly: i_0^π = ∞
        let q2 = BaseField::qp(2).unwrap();
        let f = EisensteinPoly::from_integers(q2, &[0, 2, 0, 2]).unwrap();
        let raw = f.indices_raw().unwrap();
        assert_eq!(raw[0], RawIndex::Infinite);
        let prof = f.indices().unwrap();
        // i_0 = min(∞, i_1^π + e_L, ...) is finite
        assert_eq!(prof.indices()[0], raw[1].finite().unwrap() + 4);
        let json = serde_json::to_string(&prof.dump()).unwrap();
        assert!(json.contains("\"inf\""));
        let back: ProfileDump = serde_json::from_str(&json).unwrap();
        assert_eq!(back, prof.dump());
    }

    #[test]
    fn truncated_zero_blocks_the_minimum() {
        let q2 = BaseField::qp(2).unwrap();
        let c1 = q2.exact_integer(0).truncate(1);
        let f = EisensteinPoly::new(q2, vec![c1, q2.exact_integer(2)]).unwrap();
        assert!(matches!(
            f.indices_raw(),
            Err(ExtensionError::Field(FieldError::PrecisionTooLow { .. }))
        ));
    }

    #[test]
    fn tame_has_no_breaks() {
        let q3 = BaseField::qp(3).unwrap();
        let f = EisensteinPoly::from_integers(q3, &[3, 3]).unwrap();
        let prof = f.indices().unwrap();
        assert_eq!(prof.nu(), 0);
        assert_eq!(prof.indices(), &[0]);
        assert!(prof.lower_breaks().is_empty());
    }

    #[test]
    fn split_index_range() {
        assert_eq!(split_index(5, 4), (2, 3));
        assert_eq!(split_index(0, 4), (1, 4));
        assert_eq!(split_index(16, 9), (2, 2));
        assert_eq!(ceil_div(18, 9), 2);
        assert_eq!(ceil_div(19, 9), 3);
        assert_eq!(parse_rational("5/2"), Some(Rational::new(5, 2)));
        assert_eq!(rational_string(&Rational::new(6, 2)), "3");
    }
}

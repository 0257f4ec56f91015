//! Precision-tracked arithmetic in the ring of integers `O_K` of a local field
//! `K` whose residue field is `F_p`.
//!
//! Two backends are provided:
//!
//! - [`Backend::CharZero`]: `O_K = Z_p[π]/(π^e - p)`. An element is stored as
//!   integer coordinates `a_0 + a_1 π + ... + a_{e-1} π^{e-1}`. With `e = 1`
//!   this is just `Z_p`.
//! - [`Backend::CharP`]: `O_K = F_p[[t]]` with uniformizer `π = t`, stored as a
//!   digit vector.
//!
//! Every element is either exact or known modulo `M_K^k` for an absolute
//! precision `k`. Arithmetic never claims more precision than the inputs
//! support: sums keep the smaller precision, products use
//! `min(v(a) + prec(b), v(b) + prec(a))`.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u64),
    #[error("ramification index must be at least 1")]
    BadRamificationIndex,
    #[error("working precision must be at least 1")]
    BadPrecision,
    #[error("elements belong to different base fields ({0} vs {1})")]
    ConfigMismatch(BaseField, BaseField),
    #[error("precision too low: need O(π^{needed}), have O(π^{available})")]
    PrecisionTooLow { needed: u32, available: u32 },
    #[error("element is not a unit")]
    NotAUnit,
    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },
}

/// Arithmetic model of `O_K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Backend {
    /// Characteristic zero, totally ramified of degree `e` over `Q_p` via `π^e = p`.
    CharZero { e: u32 },
    /// Laurent series over `F_p` (only the integral part `F_p[[t]]` is modelled).
    CharP,
}

/// The base field `K`: residue characteristic, backend and working precision.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BaseField {
    p: u64,
    backend: Backend,
    precision: u32,
}

pub const DEFAULT_PRECISION: u32 = 20;

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl BaseField {
    pub fn new(p: u64, backend: Backend, precision: u32) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if let Backend::CharZero { e } = backend {
            if e == 0 {
                return Err(FieldError::BadRamificationIndex);
            }
        }
        if precision == 0 {
            return Err(FieldError::BadPrecision);
        }
        Ok(Self {
            p,
            backend,
            precision,
        })
    }

    /// `Q_p` at the default precision.
    pub fn qp(p: u64) -> Result<Self, FieldError> {
        Self::new(p, Backend::CharZero { e: 1 }, DEFAULT_PRECISION)
    }

    /// `Q_p(p^{1/e})` at the default precision.
    pub fn ramified(p: u64, e: u32) -> Result<Self, FieldError> {
        Self::new(p, Backend::CharZero { e }, DEFAULT_PRECISION)
    }

    /// `F_p((t))` at the default precision.
    pub fn laurent(p: u64) -> Result<Self, FieldError> {
        Self::new(p, Backend::CharP, DEFAULT_PRECISION)
    }

    pub fn with_precision(self, precision: u32) -> Result<Self, FieldError> {
        Self::new(self.p, self.backend, precision)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn precision(&self) -> u32 {
        self.precision
    }

    /// Absolute ramification index `v_K(p)`; `None` in characteristic `p`.
    pub fn e_k(&self) -> Option<u32> {
        match self.backend {
            Backend::CharZero { e } => Some(e),
            Backend::CharP => None,
        }
    }

    pub fn is_char_p(&self) -> bool {
        matches!(self.backend, Backend::CharP)
    }

    /// Same ring, ignoring working precision.
    pub fn same_ring(&self, other: &BaseField) -> bool {
        self.p == other.p && self.backend == other.backend
    }

    fn check(&self, other: &BaseField) -> Result<(), FieldError> {
        if self.same_ring(other) {
            Ok(())
        } else {
            Err(FieldError::ConfigMismatch(*self, *other))
        }
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement::exact(*self, self.empty_coords())
    }

    pub fn one(&self) -> FieldElement {
        self.exact_integer(1)
    }

    /// Exact image of an integer.
    pub fn exact_integer(&self, m: impl Into<BigInt>) -> FieldElement {
        let m: BigInt = m.into();
        let coords = match self.backend {
            Backend::CharZero { e } => {
                let mut v = vec![BigInt::zero(); e as usize];
                v[0] = m;
                Coords::Ramified(v)
            }
            Backend::CharP => Coords::Series(vec![mod_small(&m, self.p)]),
        };
        FieldElement::exact(*self, coords)
    }

    /// Image of `m` in `O_K` at the working precision. An integer whose image
    /// is zero (a multiple of `p` in characteristic `p`) stays exactly zero.
    pub fn from_integer(&self, m: impl Into<BigInt>) -> FieldElement {
        let x = self.exact_integer(m);
        if x.is_exact_zero() {
            x
        } else {
            x.truncate(self.precision)
        }
    }

    /// The uniformizer `π_K` (exact).
    pub fn uniformizer(&self) -> FieldElement {
        let coords = match self.backend {
            Backend::CharZero { e: 1 } => Coords::Ramified(vec![BigInt::from(self.p)]),
            Backend::CharZero { e } => {
                let mut v = vec![BigInt::zero(); e as usize];
                v[1] = BigInt::one();
                Coords::Ramified(v)
            }
            Backend::CharP => Coords::Series(vec![0, 1]),
        };
        FieldElement::exact(*self, coords)
    }

    /// `π_K^k` (exact).
    pub fn uniformizer_pow(&self, k: u32) -> FieldElement {
        match self.backend {
            Backend::CharZero { e } => {
                let mut v = vec![BigInt::zero(); e as usize];
                v[(k % e) as usize] = BigInt::from(self.p).pow(k / e);
                FieldElement::exact(*self, Coords::Ramified(v))
            }
            Backend::CharP => {
                let mut v = vec![0; k as usize + 1];
                v[k as usize] = 1;
                FieldElement::exact(*self, Coords::Series(v))
            }
        }
    }

    /// Exact element from characteristic-zero coordinates `a_0 + a_1 π + ...`.
    /// Extra coordinates beyond `e` are folded with `π^e = p`.
    pub fn from_coords(&self, coords: &[BigInt]) -> FieldElement {
        let mut acc = self.zero();
        for (i, a) in coords.iter().enumerate() {
            let term = self.exact_integer(a.clone()).mul_unchecked(&self.uniformizer_pow(i as u32));
            acc = acc.add_unchecked(&term);
        }
        acc
    }

    /// Exact element `Σ d_k π^k` from residue digits.
    pub fn from_digits(&self, digits: &[i64]) -> FieldElement {
        let coords: Vec<BigInt> = digits.iter().map(|&d| BigInt::from(d)).collect();
        self.from_coords(&coords)
    }

    fn empty_coords(&self) -> Coords {
        match self.backend {
            Backend::CharZero { e } => Coords::Ramified(vec![BigInt::zero(); e as usize]),
            Backend::CharP => Coords::Series(Vec::new()),
        }
    }

    /// Parse the textual element format (see [`FieldElement::parse`]).
    pub fn parse(&self, text: &str) -> Result<FieldElement, FieldError> {
        FieldElement::parse(*self, text)
    }
}

impl fmt::Display for BaseField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.backend {
            Backend::CharZero { e: 1 } => write!(f, "Q_{}", self.p),
            Backend::CharZero { e } => write!(f, "Q_{}(pi), pi^{} = {}", self.p, e, self.p),
            Backend::CharP => write!(f, "F_{}((t))", self.p),
        }
    }
}

/// Absolute precision of an element.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Precision {
    Exact,
    Absolute(u32),
}

impl Precision {
    pub fn as_absolute(self) -> Option<u32> {
        match self {
            Precision::Exact => None,
            Precision::Absolute(k) => Some(k),
        }
    }

    /// True if the element is known modulo `M_K^k`.
    pub fn covers(self, k: u32) -> bool {
        match self {
            Precision::Exact => true,
            Precision::Absolute(a) => a >= k,
        }
    }

    fn plus(self, v: u64) -> Precision {
        match self {
            Precision::Exact => Precision::Exact,
            Precision::Absolute(a) => Precision::Absolute((a as u64 + v).min(u32::MAX as u64) as u32),
        }
    }
}

impl PartialOrd for Precision {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Precision {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Precision::Exact, Precision::Exact) => Ordering::Equal,
            (Precision::Exact, _) => Ordering::Greater,
            (_, Precision::Exact) => Ordering::Less,
            (Precision::Absolute(a), Precision::Absolute(b)) => a.cmp(b),
        }
    }
}

/// Result of asking for `v_K(x)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Valuation {
    Finite(u32),
    /// Only the exact zero element.
    Infinity,
    /// `x ≡ 0 mod M_K^precision` but `x` is not known to be zero.
    Insufficient { precision: u32 },
}

impl Valuation {
    pub fn finite(self) -> Option<u32> {
        match self {
            Valuation::Finite(v) => Some(v),
            _ => None,
        }
    }

    /// A certified lower bound (`None` = +∞).
    pub fn lower_bound(self) -> Option<u64> {
        match self {
            Valuation::Finite(v) => Some(v as u64),
            Valuation::Infinity => None,
            Valuation::Insufficient { precision } => Some(precision as u64),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum Coords {
    Ramified(Vec<BigInt>),
    Series(Vec<u64>),
}

/// An element of `O_K` with tracked absolute precision.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FieldElement {
    field: BaseField,
    coords: Coords,
    prec: Precision,
}

fn mod_small(m: &BigInt, p: u64) -> u64 {
    m.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

fn vp_big(m: &BigInt, p: u64) -> u64 {
    debug_assert!(!m.is_zero());
    let p = BigInt::from(p);
    let mut m = m.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

fn inv_mod_p(a: u64, p: u64) -> u64 {
    let (g, x) = {
        let ext = (a as i128).extended_gcd(&(p as i128));
        (ext.gcd, ext.x)
    };
    debug_assert_eq!(g, 1);
    x.rem_euclid(p as i128) as u64
}

impl FieldElement {
    fn exact(field: BaseField, coords: Coords) -> Self {
        let mut x = Self {
            field,
            coords,
            prec: Precision::Exact,
        };
        x.normalize();
        x
    }

    fn with(field: BaseField, coords: Coords, prec: Precision) -> Self {
        let mut x = Self {
            field,
            coords,
            prec,
        };
        x.normalize();
        x
    }

    /// Modulus of characteristic-zero coordinate `i` at absolute precision `n`.
    fn coord_modulus(&self, i: usize, n: u32) -> BigInt {
        let e = self.field.e_k().expect("char 0") as i64;
        let rem = n as i64 - i as i64;
        let m = if rem <= 0 { 0 } else { (rem + e - 1) / e };
        BigInt::from(self.field.p).pow(m as u32)
    }

    fn normalize(&mut self) {
        let prec = self.prec;
        let moduli: Option<Vec<BigInt>> = match (&self.coords, prec) {
            (Coords::Ramified(v), Precision::Absolute(n)) => {
                Some((0..v.len()).map(|i| self.coord_modulus(i, n)).collect())
            }
            _ => None,
        };
        match &mut self.coords {
            Coords::Ramified(v) => {
                if let Some(moduli) = moduli {
                    for (a, m) in v.iter_mut().zip(moduli) {
                        *a = a.mod_floor(&m);
                    }
                }
            }
            Coords::Series(d) => {
                if let Precision::Absolute(n) = prec {
                    d.truncate(n as usize);
                }
                while d.last() == Some(&0) {
                    d.pop();
                }
            }
        }
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn precision(&self) -> Precision {
        self.prec
    }

    pub fn is_exact(&self) -> bool {
        self.prec == Precision::Exact
    }

    /// Exactly zero (not merely indistinguishable from zero).
    pub fn is_exact_zero(&self) -> bool {
        self.is_exact() && self.is_visibly_zero()
    }

    fn is_visibly_zero(&self) -> bool {
        match &self.coords {
            Coords::Ramified(v) => v.iter().all(Zero::is_zero),
            Coords::Series(d) => d.is_empty(),
        }
    }

    /// `v_K(x)` when certain.
    pub fn valuation(&self) -> Valuation {
        let visible = match &self.coords {
            Coords::Ramified(v) => {
                let e = v.len() as u64;
                v.iter()
                    .enumerate()
                    .filter(|(_, a)| !a.is_zero())
                    .map(|(i, a)| e * vp_big(a, self.field.p) + i as u64)
                    .min()
            }
            Coords::Series(d) => d.iter().position(|&x| x != 0).map(|i| i as u64),
        };
        match (visible, self.prec) {
            (Some(v), _) => Valuation::Finite(v as u32),
            (None, Precision::Exact) => Valuation::Infinity,
            (None, Precision::Absolute(n)) => Valuation::Insufficient { precision: n },
        }
    }

    /// Drop precision to at most `k`.
    pub fn truncate(&self, k: u32) -> FieldElement {
        let prec = self.prec.min(Precision::Absolute(k));
        Self::with(self.field, self.coords.clone(), prec)
    }

    /// Treat the stored representative as exact.
    pub(crate) fn lift_exact(&self) -> FieldElement {
        Self::exact(self.field, self.coords.clone())
    }

    /// Reinterpret in a field with the same ring but another working precision.
    pub fn in_field(&self, field: BaseField) -> Result<FieldElement, FieldError> {
        self.field.check(&field)?;
        Ok(Self {
            field,
            coords: self.coords.clone(),
            prec: self.prec,
        })
    }

    pub fn add(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&other.field)?;
        Ok(self.add_unchecked(other))
    }

    pub fn sub(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&other.field)?;
        Ok(self.add_unchecked(&other.neg()))
    }

    pub fn mul(&self, other: &FieldElement) -> Result<FieldElement, FieldError> {
        self.field.check(&other.field)?;
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn add_unchecked(&self, other: &FieldElement) -> FieldElement {
        let prec = self.prec.min(other.prec);
        let coords = match (&self.coords, &other.coords) {
            (Coords::Ramified(a), Coords::Ramified(b)) => {
                Coords::Ramified(a.iter().zip(b).map(|(x, y)| x + y).collect())
            }
            (Coords::Series(a), Coords::Series(b)) => {
                let p = self.field.p;
                let len = a.len().max(b.len());
                Coords::Series(
                    (0..len)
                        .map(|i| (a.get(i).copied().unwrap_or(0) + b.get(i).copied().unwrap_or(0)) % p)
                        .collect(),
                )
            }
            _ => unreachable!("backend checked"),
        };
        Self::with(self.field, coords, prec)
    }

    pub(crate) fn sub_unchecked(&self, other: &FieldElement) -> FieldElement {
        self.add_unchecked(&other.neg())
    }

    pub fn neg(&self) -> FieldElement {
        let coords = match &self.coords {
            Coords::Ramified(a) => Coords::Ramified(a.iter().map(|x| -x).collect()),
            Coords::Series(d) => {
                let p = self.field.p;
                Coords::Series(d.iter().map(|&x| (p - x) % p).collect())
            }
        };
        Self::with(self.field, coords, self.prec)
    }

    fn product_precision(&self, other: &FieldElement) -> Precision {
        let va = self.valuation().lower_bound();
        let vb = other.valuation().lower_bound();
        let left = match va {
            None => Precision::Exact,
            Some(v) => other.prec.plus(v),
        };
        let right = match vb {
            None => Precision::Exact,
            Some(v) => self.prec.plus(v),
        };
        left.min(right)
    }

    pub(crate) fn mul_unchecked(&self, other: &FieldElement) -> FieldElement {
        if self.is_exact_zero() || other.is_exact_zero() {
            return self.field.zero();
        }
        let prec = self.product_precision(other);
        let coords = match (&self.coords, &other.coords) {
            (Coords::Ramified(a), Coords::Ramified(b)) => {
                let e = a.len();
                let p = BigInt::from(self.field.p);
                let mut c = vec![BigInt::zero(); e];
                for (i, x) in a.iter().enumerate() {
                    if x.is_zero() {
                        continue;
                    }
                    for (j, y) in b.iter().enumerate() {
                        if y.is_zero() {
                            continue;
                        }
                        let t = x * y;
                        if i + j < e {
                            c[i + j] += t;
                        } else {
                            c[i + j - e] += &p * t;
                        }
                    }
                }
                Coords::Ramified(c)
            }
            (Coords::Series(a), Coords::Series(b)) => {
                let p = self.field.p;
                let cap = match prec {
                    Precision::Exact => a.len() + b.len(),
                    Precision::Absolute(n) => (n as usize).min(a.len() + b.len()),
                };
                let mut c = vec![0u64; cap];
                for (i, &x) in a.iter().enumerate() {
                    if x == 0 || i >= cap {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate() {
                        if i + j >= cap {
                            break;
                        }
                        c[i + j] = (c[i + j] + x * y) % p;
                    }
                }
                Coords::Series(c)
            }
            _ => unreachable!("backend checked"),
        };
        Self::with(self.field, coords, prec)
    }

    /// Multiply by an exact integer scalar.
    pub fn scale(&self, k: &BigInt) -> FieldElement {
        self.mul_unchecked(&self.field.exact_integer(k.clone()))
    }

    pub fn pow(&self, k: u32) -> FieldElement {
        let mut result = self.field.one();
        let mut base = self.clone();
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                result = result.mul_unchecked(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul_unchecked(&base);
            }
        }
        result
    }

    /// `v_K(a - b) >= k`, refusing to answer from truncated data.
    pub fn congruent(&self, other: &FieldElement, k: u32) -> Result<bool, FieldError> {
        self.field.check(&other.field)?;
        for x in [self, other] {
            if let Precision::Absolute(a) = x.prec {
                if a < k {
                    return Err(FieldError::PrecisionTooLow {
                        needed: k,
                        available: a,
                    });
                }
            }
        }
        Ok(match self.sub_unchecked(other).valuation() {
            Valuation::Finite(v) => v >= k,
            Valuation::Infinity | Valuation::Insufficient { .. } => true,
        })
    }

    /// Largest `k` (up to the shared precision) with `a ≡ b mod M_K^k`, and
    /// whether that value is capped by precision rather than certified exact.
    pub fn agreement(&self, other: &FieldElement) -> Result<(u32, bool), FieldError> {
        self.field.check(&other.field)?;
        let diff = self.sub_unchecked(other);
        Ok(match diff.valuation() {
            Valuation::Finite(v) => (v, false),
            Valuation::Infinity => (u32::MAX, true),
            Valuation::Insufficient { precision } => (precision, true),
        })
    }

    /// Inverse of a unit, at the element's precision (working precision when exact).
    pub fn inv_unit(&self) -> Result<FieldElement, FieldError> {
        if self.valuation() != Valuation::Finite(0) {
            return Err(FieldError::NotAUnit);
        }
        let target = match self.prec {
            Precision::Exact => self.field.precision,
            Precision::Absolute(k) => k,
        };
        let p = self.field.p;
        let a0 = match &self.coords {
            Coords::Ramified(v) => mod_small(&v[0], p),
            Coords::Series(d) => d[0],
        };
        let mut b = self.field.exact_integer(inv_mod_p(a0, p)).truncate(1);
        let mut have = 1u32;
        let two = self.field.exact_integer(2);
        let a = self.lift_exact();
        while have < target {
            have = (have.saturating_mul(2)).min(target);
            let lb = b.lift_exact();
            let next = lb.mul_unchecked(&two.sub_unchecked(&a.mul_unchecked(&lb)));
            b = next.truncate(have);
        }
        Ok(FieldElement::with(self.field, b.coords, Precision::Absolute(target)))
    }

    /// Characteristic-zero coordinates (residues in `[0, p^m)` when inexact).
    pub fn coords(&self) -> Option<&[BigInt]> {
        match &self.coords {
            Coords::Ramified(v) => Some(v),
            Coords::Series(_) => None,
        }
    }

    /// Characteristic-`p` digits of the power series.
    pub fn digits(&self) -> Option<&[u64]> {
        match &self.coords {
            Coords::Series(d) => Some(d),
            Coords::Ramified(_) => None,
        }
    }

    /// Residue class modulo `M_K`, as an integer in `[0, p)`.
    pub fn residue(&self) -> u64 {
        match &self.coords {
            Coords::Ramified(v) => mod_small(&v[0], self.field.p),
            Coords::Series(d) => d.first().copied().unwrap_or(0),
        }
    }

    /// Parse an element.
    ///
    /// Accepted forms: an integer (`-4`); a coordinate list `[a0, a1, ...]`
    /// meaning `a0 + a1 π + ...`; or a polynomial in the uniformizer written
    /// with `t` or `pi` (`1 + 2*t + t^3`). An optional trailing
    /// `(mod t^N)` / `(mod pi^N)` / `(mod p^N)` sets the absolute precision
    /// (`p^N` counts `N·e` valuation units); without it the value is exact.
    pub fn parse(field: BaseField, text: &str) -> Result<FieldElement, FieldError> {
        crate::basefield::parse::parse_element(field, text)
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (&self.coords, self.field.backend) {
            (Coords::Ramified(v), Backend::CharZero { e: 1 }) => {
                write!(f, "{}", v[0])?;
                if let Precision::Absolute(n) = self.prec {
                    write!(f, " (mod {}^{})", self.field.p, n)?;
                }
            }
            (Coords::Ramified(v), _) => {
                let parts: Vec<String> = v.iter().map(|a| a.to_string()).collect();
                write!(f, "[{}]", parts.join(", "))?;
                if let Precision::Absolute(n) = self.prec {
                    write!(f, " (mod pi^{})", n)?;
                }
            }
            (Coords::Series(d), _) => {
                let mut terms = Vec::new();
                for (k, &c) in d.iter().enumerate() {
                    if c == 0 {
                        continue;
                    }
                    terms.push(match (k, c) {
                        (0, c) => c.to_string(),
                        (1, 1) => "t".to_string(),
                        (1, c) => format!("{}*t", c),
                        (k, 1) => format!("t^{}", k),
                        (k, c) => format!("{}*t^{}", c, k),
                    });
                }
                if terms.is_empty() {
                    write!(f, "0")?;
                } else {
                    write!(f, "{}", terms.join(" + "))?;
                }
                if let Precision::Absolute(n) = self.prec {
                    write!(f, " (mod t^{})", n)?;
                }
            }
        }
        Ok(())
    }
}

impl Serialize for FieldElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

mod parse {
    use super::*;

    struct Cursor<'a> {
        src: &'a [u8],
        pos: usize,
    }

    impl<'a> Cursor<'a> {
        fn skip_ws(&mut self) {
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
                self.pos += 1;
            }
        }

        fn peek(&mut self) -> Option<u8> {
            self.skip_ws();
            self.src.get(self.pos).copied()
        }

        fn eat(&mut self, c: u8) -> bool {
            if self.peek() == Some(c) {
                self.pos += 1;
                true
            } else {
                false
            }
        }

        fn eat_word(&mut self, w: &str) -> bool {
            self.skip_ws();
            if self.src[self.pos..].starts_with(w.as_bytes()) {
                self.pos += w.len();
                true
            } else {
                false
            }
        }

        fn err(&self, message: impl Into<String>) -> FieldError {
            FieldError::Parse {
                position: self.pos,
                message: message.into(),
            }
        }

        fn integer(&mut self) -> Result<BigInt, FieldError> {
            self.skip_ws();
            let start = self.pos;
            if self.pos < self.src.len() && (self.src[self.pos] == b'-' || self.src[self.pos] == b'+') {
                self.pos += 1;
            }
            let digits_start = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if digits_start == self.pos {
                self.pos = start;
                return Err(self.err("expected an integer"));
            }
            let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
            s.parse::<BigInt>().map_err(|e| self.err(e.to_string()))
        }

        fn small(&mut self) -> Result<u32, FieldError> {
            let v = self.integer()?;
            v.to_u32().ok_or_else(|| self.err("exponent out of range"))
        }

        /// `t`, `pi`, or `p` (the last only inside `(mod p^N)`).
        fn variable(&mut self) -> bool {
            self.eat_word("pi") || self.eat_word("t")
        }
    }

    pub(super) fn parse_element(field: BaseField, text: &str) -> Result<FieldElement, FieldError> {
        let mut cur = Cursor {
            src: text.as_bytes(),
            pos: 0,
        };
        let value = if cur.peek() == Some(b'[') {
            cur.pos += 1;
            let mut coords = Vec::new();
            if !cur.eat(b']') {
                loop {
                    coords.push(cur.integer()?);
                    if cur.eat(b']') {
                        break;
                    }
                    if !cur.eat(b',') {
                        return Err(cur.err("expected ',' or ']'"));
                    }
                }
            }
            field.from_coords(&coords)
        } else {
            polynomial(&mut cur, field)?
        };
        let value = if cur.eat(b'(') {
            if !cur.eat_word("mod") {
                return Err(cur.err("expected 'mod'"));
            }
            let unit = if cur.variable() {
                1
            } else if cur.eat(b'p') {
                field.e_k().unwrap_or(1)
            } else {
                let base = cur.integer()?;
                if base != BigInt::from(field.p()) {
                    return Err(cur.err("modulus base must be the residue characteristic"));
                }
                field.e_k().unwrap_or(1)
            };
            if !cur.eat(b'^') {
                return Err(cur.err("expected '^'"));
            }
            let n = cur.small()?;
            if !cur.eat(b')') {
                return Err(cur.err("expected ')'"));
            }
            value.truncate(n * unit)
        } else {
            value
        };
        if cur.peek().is_some() {
            return Err(cur.err("unexpected trailing input"));
        }
        Ok(value)
    }

    fn polynomial(cur: &mut Cursor<'_>, field: BaseField) -> Result<FieldElement, FieldError> {
        let mut acc = field.zero();
        let mut first = true;
        loop {
            let negative = if cur.eat(b'-') {
                true
            } else if cur.eat(b'+') || first {
                false
            } else {
                break;
            };
            first = false;
            let term = term(cur, field)?;
            acc = if negative {
                acc.sub_unchecked(&term)
            } else {
                acc.add_unchecked(&term)
            };
            match cur.peek() {
                Some(b'+') | Some(b'-') => continue,
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(cur: &mut Cursor<'_>, field: BaseField) -> Result<FieldElement, FieldError> {
        cur.skip_ws();
        let start = cur.pos;
        let coeff = match cur.peek() {
            Some(c) if c.is_ascii_digit() => Some(cur.integer()?),
            _ => None,
        };
        let has_var = if coeff.is_some() {
            if cur.eat(b'*') {
                if !cur.variable() {
                    return Err(cur.err("expected 't' or 'pi' after '*'"));
                }
                true
            } else {
                false
            }
        } else if cur.variable() {
            true
        } else {
            cur.pos = start;
            return Err(cur.err("expected a term"));
        };
        let exp = if has_var {
            if cur.eat(b'^') {
                cur.small()?
            } else {
                1
            }
        } else {
            0
        };
        let c = field.exact_integer(coeff.unwrap_or_else(BigInt::one));
        Ok(c.mul_unchecked(&field.uniformizer_pow(exp)))
    }
}

/// `v_p(k)` for a nonzero integer.
pub fn vp(k: i64, p: u64) -> u32 {
    assert!(k != 0, "v_p(0) is infinite");
    let mut k = k.unsigned_abs();
    let mut v = 0;
    while k.is_multiple_of(p) {
        k /= p;
        v += 1;
    }
    v
}

/// `v_p` of a big integer, `None` for zero.
pub fn vp_bigint(k: &BigInt, p: u64) -> Option<u64> {
    if k.is_zero() {
        None
    } else {
        Some(vp_big(&k.abs(), p))
    }
}

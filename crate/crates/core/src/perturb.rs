//! The minimal polynomial `f̃` of a perturbed uniformizer `π̃_L = φ(π_L)`,
//! computed two independent ways:
//!
//! - symmetric route: `c̃_h = E_h(π̃_L) = Σ_μ r_μ M_μ(π_L)` over partitions `μ`
//!   with `h` parts, where `M_μ(π_L) = Σ_λ d_λμ c_λ = ψ_μ(c_1, ..., c_n)`;
//! - linear-algebra route: express `α^n` in the basis `1, α, ..., α^{n-1}` of
//!   `L = K[X]/(f)` with `α = φ(π_L)`.

use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::basefield::{vp, vp_bigint, BaseField, FieldElement, FieldError, Precision, Valuation};
use crate::extension::{EisensteinPoly, ExtensionError};
use crate::symcomb::{d_coeff, partitions_of, ElementaryExpander, Partition, SymError, Truncation};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PerturbError {
    #[error("perturbation series is empty")]
    EmptySeries,
    #[error("r_1 must be a unit")]
    LeadingNotUnit,
    #[error("partition part {part} exceeds the degree {n}")]
    PartOutOfRange { part: u32, n: u32 },
    #[error("partition has {parts} parts, more than n = {n}")]
    TooManyParts { parts: usize, n: u32 },
    #[error("h = {h} out of range 1..={n}")]
    BadIndex { h: u32, n: u32 },
    #[error("elimination met a non-unit pivot in column {column}")]
    SingularPivot { column: usize },
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Sym(#[from] SymError),
}

impl PerturbError {
    /// True when raising the working precision could help.
    pub fn is_precision(&self) -> bool {
        matches!(
            self,
            PerturbError::Field(FieldError::PrecisionTooLow { .. })
                | PerturbError::Extension(ExtensionError::Field(FieldError::PrecisionTooLow { .. }))
                | PerturbError::SingularPivot { .. }
        )
    }
}

/// `φ(X) = r_1 X + r_2 X^2 + ... + r_d X^d` with `r_1` a unit.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerturbationSeries {
    field: BaseField,
    coeffs: Vec<FieldElement>,
}

impl PerturbationSeries {
    /// From `r_1..r_d`.
    pub fn new(field: BaseField, coeffs: Vec<FieldElement>) -> Result<Self, PerturbError> {
        if coeffs.is_empty() {
            return Err(PerturbError::EmptySeries);
        }
        let coeffs = coeffs
            .into_iter()
            .map(|c| c.in_field(field))
            .collect::<Result<Vec<_>, _>>()?;
        if coeffs[0].valuation() != Valuation::Finite(0) {
            return Err(PerturbError::LeadingNotUnit);
        }
        let mut s = Self { field, coeffs };
        while s.coeffs.len() > 1 && s.coeffs.last().is_some_and(|c| c.is_exact_zero()) {
            s.coeffs.pop();
        }
        Ok(s)
    }

    /// `φ(X) = X`.
    pub fn identity(field: BaseField) -> Self {
        Self {
            field,
            coeffs: vec![field.one()],
        }
    }

    /// From a sparse `degree -> coefficient` map (missing degrees are zero).
    pub fn from_sparse(field: BaseField, terms: &BTreeMap<u32, FieldElement>) -> Result<Self, PerturbError> {
        let d = terms.keys().copied().max().unwrap_or(0);
        if d == 0 || terms.contains_key(&0) {
            return Err(PerturbError::EmptySeries);
        }
        let coeffs = (1..=d)
            .map(|k| terms.get(&k).cloned().unwrap_or_else(|| field.zero()))
            .collect();
        Self::new(field, coeffs)
    }

    /// `φ(X) = X + r X^{ℓ+1}`.
    pub fn x_plus(field: BaseField, r: &FieldElement, ell: u32) -> Result<Self, PerturbError> {
        let mut terms = BTreeMap::new();
        terms.insert(1, field.one());
        terms.insert(ell + 1, r.clone());
        Self::from_sparse(field, &terms)
    }

    pub fn field(&self) -> BaseField {
        self.field
    }

    pub fn degree(&self) -> u32 {
        self.coeffs.len() as u32
    }

    /// `r_k` (zero beyond the degree).
    pub fn r(&self, k: u32) -> FieldElement {
        self.coeffs.get(k as usize - 1).cloned().unwrap_or_else(|| self.field.zero())
    }

    pub fn coeffs(&self) -> &[FieldElement] {
        &self.coeffs
    }

    /// Nonzero terms as `(degree, coefficient)`.
    pub fn sparse(&self) -> Vec<(u32, FieldElement)> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_exact_zero())
            .map(|(i, c)| (i as u32 + 1, c.clone()))
            .collect()
    }

    fn in_field(&self, field: BaseField) -> Result<Self, PerturbError> {
        Ok(Self {
            field,
            coeffs: self
                .coeffs
                .iter()
                .map(|c| c.in_field(field))
                .collect::<Result<Vec<_>, _>>()?,
        })
    }
}

/// `a_0 + a_1 π_L + ... + a_{n-1} π_L^{n-1}` in `L = K[X]/(f)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuotientElement {
    coords: Vec<FieldElement>,
}

/// Result of asking for `v_L` of a [`QuotientElement`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LValuation {
    Finite(i64),
    Infinity,
    /// Indistinguishable from zero; the value is at least `bound`.
    Insufficient { bound: i64 },
}

impl QuotientElement {
    pub fn coords(&self) -> &[FieldElement] {
        &self.coords
    }

    /// `v_L = min_i (n·v_K(a_i) + i)` when certain.
    pub fn valuation(&self) -> LValuation {
        let n = self.coords.len() as i64;
        let mut best: Option<i64> = None;
        let mut floor: Option<i64> = None;
        for (i, a) in self.coords.iter().enumerate() {
            match a.valuation() {
                Valuation::Finite(v) => {
                    let cand = n * v as i64 + i as i64;
                    best = Some(best.map_or(cand, |b| b.min(cand)));
                }
                Valuation::Infinity => {}
                Valuation::Insufficient { precision } => {
                    let bound = n * precision as i64 + i as i64;
                    floor = Some(floor.map_or(bound, |f| f.min(bound)));
                }
            }
        }
        match (best, floor) {
            (Some(b), Some(f)) if f < b => LValuation::Insufficient { bound: f },
            (Some(b), _) => LValuation::Finite(b),
            (None, Some(f)) => LValuation::Insufficient { bound: f },
            (None, None) => LValuation::Infinity,
        }
    }

    /// Known to be `≡ 0 mod M_L^k`.
    pub fn vanishes_to(&self, k: i64) -> bool {
        match self.valuation() {
            LValuation::Finite(v) => v >= k,
            LValuation::Infinity => true,
            LValuation::Insufficient { bound } => bound >= k,
        }
    }
}

/// Arithmetic in `K[X]/(f)`.
#[derive(Debug, Clone)]
pub struct QuotientRing {
    field: BaseField,
    n: usize,
    /// `π^n = Σ_i reduction[i] π^i`.
    reduction: Vec<FieldElement>,
}

impl QuotientRing {
    pub fn new(f: &EisensteinPoly) -> Self {
        let n = f.degree() as usize;
        let mut reduction = vec![f.field().zero(); n];
        for h in 1..=n {
            let c = f.c(h as u32);
            reduction[n - h] = if h % 2 == 1 { c.clone() } else { c.neg() };
        }
        Self {
            field: f.field(),
            n,
            reduction,
        }
    }

    pub fn zero(&self) -> QuotientElement {
        QuotientElement {
            coords: vec![self.field.zero(); self.n],
        }
    }

    pub fn from_base(&self, a: &FieldElement) -> QuotientElement {
        let mut x = self.zero();
        x.coords[0] = a.clone();
        x
    }

    pub fn one(&self) -> QuotientElement {
        self.from_base(&self.field.one())
    }

    /// `π_L`.
    pub fn pi(&self) -> QuotientElement {
        if self.n == 1 {
            return self.from_base(&self.reduction[0]);
        }
        let mut x = self.zero();
        x.coords[1] = self.field.one();
        x
    }

    pub fn add(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        QuotientElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x.add_unchecked(y)).collect(),
        }
    }

    pub fn sub(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        QuotientElement {
            coords: a.coords.iter().zip(&b.coords).map(|(x, y)| x.sub_unchecked(y)).collect(),
        }
    }

    pub fn scale(&self, a: &QuotientElement, k: &FieldElement) -> QuotientElement {
        QuotientElement {
            coords: a.coords.iter().map(|x| x.mul_unchecked(k)).collect(),
        }
    }

    fn reduce(&self, mut full: Vec<FieldElement>) -> QuotientElement {
        let n = self.n;
        for k in (n..full.len()).rev() {
            let top = std::mem::replace(&mut full[k], self.field.zero());
            if top.is_exact_zero() {
                continue;
            }
            for (i, red) in self.reduction.iter().enumerate() {
                if red.is_exact_zero() {
                    continue;
                }
                let idx = k - n + i;
                full[idx] = full[idx].add_unchecked(&top.mul_unchecked(red));
            }
        }
        full.truncate(n);
        QuotientElement { coords: full }
    }

    pub fn mul(&self, a: &QuotientElement, b: &QuotientElement) -> QuotientElement {
        let n = self.n;
        let mut full = vec![self.field.zero(); 2 * n - 1];
        for (i, x) in a.coords.iter().enumerate() {
            if x.is_exact_zero() {
                continue;
            }
            for (j, y) in b.coords.iter().enumerate() {
                if y.is_exact_zero() {
                    continue;
                }
                full[i + j] = full[i + j].add_unchecked(&x.mul_unchecked(y));
            }
        }
        self.reduce(full)
    }

    /// Multiply by `π_L`.
    pub fn mul_pi(&self, a: &QuotientElement) -> QuotientElement {
        let mut full = vec![self.field.zero()];
        full.extend(a.coords.iter().cloned());
        self.reduce(full)
    }

    /// `φ(π_L)` by Horner's rule.
    pub fn apply_series(&self, phi: &PerturbationSeries) -> QuotientElement {
        let mut acc = self.zero();
        for r in phi.coeffs().iter().rev() {
            acc = self.add(&acc, &self.from_base(r));
            acc = self.mul_pi(&acc);
        }
        acc
    }

    /// Evaluate `X^n - c̃_1 X^{n-1} + ... + (-1)^n c̃_n` at `x`.
    pub fn eval_eisenstein(&self, g: &EisensteinPoly, x: &QuotientElement) -> QuotientElement {
        let monic = g.monic_coeffs();
        let mut acc = self.zero();
        for a in monic {
            acc = self.mul(&acc, x);
            acc = self.add(&acc, &self.from_base(&a));
        }
        acc
    }
}

/// `φ(π_L)` reduced modulo `f`.
pub fn apply_series(f: &EisensteinPoly, phi: &PerturbationSeries) -> Result<QuotientElement, PerturbError> {
    let phi = phi.in_field(f.field())?;
    Ok(QuotientRing::new(f).apply_series(&phi))
}

/// Minimal polynomial of `φ(π_L)` by solving `Σ_k x_k α^k = α^n`.
pub fn minpoly_linear_algebra(f: &EisensteinPoly, phi: &PerturbationSeries) -> Result<EisensteinPoly, PerturbError> {
    let field = f.field();
    let phi = phi.in_field(field)?;
    let ring = QuotientRing::new(f);
    let n = ring.n;
    let alpha = ring.apply_series(&phi);
    let mut powers = vec![ring.one()];
    for k in 1..=n {
        powers.push(ring.mul(&powers[k - 1], &alpha));
    }
    // augmented matrix rows i = coordinate index, columns k = power
    let mut m: Vec<Vec<FieldElement>> = (0..n)
        .map(|i| (0..=n).map(|k| powers[k].coords[i].clone()).collect())
        .collect();
    for col in 0..n {
        let mut pivot: Option<(usize, u32)> = None;
        for (row, r) in m.iter().enumerate().skip(col) {
            if let Valuation::Finite(v) = r[col].valuation() {
                if pivot.is_none_or(|(_, pv)| v < pv) {
                    pivot = Some((row, v));
                }
            }
        }
        let row = match pivot {
            Some((row, 0)) => row,
            Some(_) => return Err(PerturbError::SingularPivot { column: col }),
            None => {
                let available = m[col][col].precision().as_absolute().unwrap_or(0);
                return Err(FieldError::PrecisionTooLow {
                    needed: available + 1,
                    available,
                }
                .into());
            }
        };
        m.swap(col, row);
        let inv = m[col][col].inv_unit()?;
        let pivot_row: Vec<FieldElement> = m[col].iter().map(|x| x.mul_unchecked(&inv)).collect();
        for (r, other) in m.iter_mut().enumerate() {
            if r == col || other[col].is_exact_zero() {
                continue;
            }
            let factor = other[col].clone();
            for (k, x) in other.iter_mut().enumerate().skip(col) {
                *x = x.sub_unchecked(&factor.mul_unchecked(&pivot_row[k]));
            }
        }
        m[col] = pivot_row;
    }
    let x: Vec<FieldElement> = m.iter().map(|r| r[n].clone()).collect();
    let coeffs = (1..=n)
        .map(|h| {
            let v = &x[n - h];
            if h % 2 == 1 {
                v.clone()
            } else {
                v.neg()
            }
        })
        .collect();
    Ok(EisensteinPoly::new(field, coeffs)?)
}

/// `c_λ = c_{λ_1} ... c_{λ_k}`; the empty partition gives 1.
pub fn c_lambda(f: &EisensteinPoly, lambda: &Partition) -> Result<FieldElement, PerturbError> {
    let n = f.degree();
    let mut acc = f.field().one();
    for &part in lambda.parts() {
        if part > n {
            return Err(PerturbError::PartOutOfRange { part, n });
        }
        acc = acc.mul_unchecked(f.c(part));
    }
    Ok(acc)
}

/// `M_μ(π_L) = Σ_λ d_λμ c_λ` with `d_λμ` from tiling counts (weight capped).
pub fn m_mu(f: &EisensteinPoly, mu: &Partition) -> Result<FieldElement, PerturbError> {
    let n = f.degree();
    if mu.len() > n as usize {
        return Err(PerturbError::TooManyParts { parts: mu.len(), n });
    }
    let mut acc = f.field().zero();
    for lambda in partitions_of(mu.weight(), Some(n), None) {
        let d = d_coeff(&lambda, mu)?;
        if d != 0 {
            acc = acc.add_unchecked(&c_lambda(f, &lambda)?.scale(&BigInt::from(d)));
        }
    }
    Ok(acc)
}

/// Evaluates `M_μ(π_L)` modulo `M_K^N` for arbitrary weight, using the
/// elementary expansion truncated to products `c_λ` that can be nonzero mod `M_K^N`.
/// Exact but slow once `n` and the weight grow; [`PowerSumEvaluator`] is the fast path.
#[derive(Debug, Clone)]
pub struct ExpansionEvaluator {
    f: EisensteinPoly,
    bound: u32,
    engine: Arc<ElementaryExpander>,
}

impl ExpansionEvaluator {
    /// Evaluator at the working precision of `f`'s field.
    pub fn new(f: &EisensteinPoly) -> Self {
        let bound = f.field().precision();
        let weights = f
            .coeffs()
            .iter()
            .map(|c| c.valuation().lower_bound().map(|v| v.min(bound as u64) as u32))
            .collect();
        let engine = ElementaryExpander::shared(Truncation::Weighted { weights, bound });
        Self {
            f: f.clone(),
            bound,
            engine,
        }
    }

    pub fn m_mu(&self, mu: &Partition) -> Result<FieldElement, PerturbError> {
        let n = self.f.degree();
        if mu.len() > n as usize {
            return Err(PerturbError::TooManyParts { parts: mu.len(), n });
        }
        let expansion = self.engine.monomial(mu);
        let mut terms: Vec<(&Partition, &BigInt)> = expansion.iter().collect();
        terms.sort();
        let mut acc = self.f.field().zero();
        for (lambda, d) in terms {
            acc = acc.add_unchecked(&c_lambda(&self.f, lambda)?.scale(d));
        }
        Ok(acc.truncate(self.bound))
    }

    /// `E_h(φ(π_L)) = Σ_{μ with h parts} r_μ M_μ(π_L)`.
    pub fn e_h(&self, phi: &PerturbationSeries, h: u32) -> Result<FieldElement, PerturbError> {
        let n = self.f.degree();
        if h == 0 || h > n {
            return Err(PerturbError::BadIndex { h, n });
        }
        let field = self.f.field();
        let phi = phi.in_field(field)?;
        let support: Vec<u32> = phi.sparse().iter().map(|(k, _)| *k).collect();
        let mut acc = field.zero();
        for mu in multisets(&support, h as usize) {
            let mut r_mu = field.one();
            for &k in mu.parts() {
                r_mu = r_mu.mul_unchecked(&phi.r(k));
            }
            if r_mu.is_exact_zero() {
                continue;
            }
            acc = acc.add_unchecked(&r_mu.mul_unchecked(&self.m_mu(&mu)?));
        }
        Ok(acc.truncate(self.bound))
    }
}

/// Multisets of size `h` drawn from `support`, as partitions.
fn multisets(support: &[u32], h: usize) -> Vec<Partition> {
    fn go(support: &[u32], start: usize, left: usize, cur: &mut Vec<u32>, out: &mut Vec<Partition>) {
        if left == 0 {
            out.push(Partition::new(cur.clone()).expect("positive degrees"));
            return;
        }
        for i in start..support.len() {
            cur.push(support[i]);
            go(support, i, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(support, 0, h, &mut Vec::new(), &mut out);
    out
}

type Lift = Vec<BigInt>;

/// Integer lift of `O_K` where division by integers is exact.
///
/// Characteristic zero: `Z[π]/(π^e - p)` with coordinates mod `p^m`.
/// Characteristic `p`: `Z[t]/(t^N)` with coefficients mod `p^m`; reducing
/// coefficients mod `p` recovers `F_p[[t]]/(t^N)`.
#[derive(Debug, Clone)]
struct LiftRing {
    p: BigInt,
    /// `Some(e)` in characteristic zero.
    e: Option<usize>,
    len: usize,
    modulus: BigInt,
    exponent: u32,
}

impl LiftRing {
    fn reduce(&self, v: &mut Lift) {
        for x in v.iter_mut() {
            *x = x.mod_floor(&self.modulus);
        }
    }

    fn zero(&self) -> Lift {
        vec![BigInt::zero(); self.len]
    }

    fn one(&self) -> Lift {
        let mut v = self.zero();
        v[0] = BigInt::one();
        v
    }

    fn lift(&self, x: &FieldElement) -> Lift {
        let mut v = self.zero();
        match (x.coords(), x.digits()) {
            (Some(c), _) => v.clone_from_slice(c),
            (_, Some(d)) => {
                for (slot, &digit) in v.iter_mut().zip(d) {
                    *slot = BigInt::from(digit);
                }
            }
            _ => unreachable!("element has coordinates or digits"),
        }
        self.reduce(&mut v);
        v
    }

    fn add_into(&self, acc: &mut Lift, b: &Lift) {
        for (x, y) in acc.iter_mut().zip(b) {
            *x += y;
        }
    }

    fn sub_into(&self, acc: &mut Lift, b: &Lift, times: &BigInt) {
        for (x, y) in acc.iter_mut().zip(b) {
            *x -= y * times;
        }
    }

    fn mul(&self, a: &Lift, b: &Lift) -> Lift {
        let mut out = self.zero();
        match self.e {
            Some(e) => {
                let mut wide = vec![BigInt::zero(); 2 * e];
                for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    for (j, y) in b.iter().enumerate() {
                        wide[i + j] += x * y;
                    }
                }
                for (i, w) in wide.into_iter().enumerate() {
                    if i < e {
                        out[i] += w;
                    } else {
                        out[i - e] += w * &self.p;
                    }
                }
            }
            None => {
                for (i, x) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                    for (j, y) in b.iter().enumerate().take(self.len - i) {
                        out[i + j] += x * y;
                    }
                }
            }
        }
        self.reduce(&mut out);
        out
    }
}

/// Evaluates `M_μ(π_L) = ψ_μ(c_1, ..., c_n)` modulo `M_K^N` through Newton's
/// identities: power sums of the roots of `f` give the augmented monomials
/// `m̃_μ = m_μ · Π mult!`, computed in an integer lift and then divided exactly.
#[derive(Debug, Clone)]
pub struct PowerSumEvaluator {
    f: EisensteinPoly,
    ring: LiftRing,
    /// Certified precision of the results.
    cap: u32,
    c: Vec<Lift>,
    power: Vec<Lift>,
    augmented: HashMap<Partition, Lift>,
}

impl PowerSumEvaluator {
    /// Evaluator at the working precision of `f`'s field.
    pub fn new(f: &EisensteinPoly) -> Self {
        let field = f.field();
        let p = field.p();
        let n = f.degree();
        let bound = field.precision();
        // Π mult! divides h! for a partition with h <= n parts.
        let slack: u32 = (2..=n as i64).map(|k| vp(k, p)).sum();
        let (e, len, exponent) = match field.e_k() {
            Some(e) => (Some(e as usize), e as usize, bound.div_ceil(e) + slack),
            None => (None, bound as usize, slack + 1),
        };
        let ring = LiftRing {
            p: BigInt::from(p),
            e,
            len,
            modulus: BigInt::from(p).pow(exponent),
            exponent,
        };
        let cap = f
            .coeffs()
            .iter()
            .filter_map(|c| c.precision().as_absolute())
            .fold(bound, u32::min);
        let power = vec![ring.zero()];
        let mut c = vec![ring.zero()];
        c.extend(f.coeffs().iter().map(|x| ring.lift(x)));
        Self {
            f: f.clone(),
            ring,
            cap,
            c,
            power,
            augmented: HashMap::new(),
        }
    }

    /// Power sum `P_k` of the roots, by Newton's identities.
    fn power_sum(&mut self, k: usize) -> Lift {
        let n = self.f.degree() as usize;
        while self.power.len() <= k {
            let m = self.power.len();
            let mut acc = self.ring.zero();
            for i in 1..m.min(n + 1) {
                let term = self.ring.mul(&self.c[i], &self.power[m - i]);
                if i % 2 == 1 {
                    self.ring.add_into(&mut acc, &term);
                } else {
                    self.ring.sub_into(&mut acc, &term, &BigInt::one());
                }
            }
            if m <= n {
                let sign = if m % 2 == 1 { BigInt::from(m) } else { -BigInt::from(m) };
                let mut term = self.c[m].clone();
                for x in term.iter_mut() {
                    *x *= &sign;
                }
                self.ring.add_into(&mut acc, &term);
            }
            self.ring.reduce(&mut acc);
            self.power.push(acc);
        }
        self.power[k].clone()
    }

    /// `m̃_ν`, via `m̃_{ν ∪ {k}} = P_k m̃_ν - Σ_s m̃_{ν + k ε_s}`.
    fn augmented(&mut self, nu: &Partition) -> Lift {
        if nu.is_empty() {
            return self.ring.one();
        }
        if nu.len() > self.f.degree() as usize {
            return self.ring.zero();
        }
        if let Some(v) = self.augmented.get(nu) {
            return v.clone();
        }
        let k = *nu.parts().last().expect("nonempty");
        let rest = nu.without_part(k).expect("k is a part");
        let pk = self.power_sum(k as usize);
        let base = self.augmented(&rest);
        let mut acc = self.ring.mul(&pk, &base);
        for (part, mult) in rest.multiplicities() {
            let merged = rest
                .without_part(part)
                .expect("part present")
                .with_part(part + k);
            let term = self.augmented(&merged);
            self.ring.sub_into(&mut acc, &term, &BigInt::from(mult));
        }
        self.ring.reduce(&mut acc);
        self.augmented.insert(nu.clone(), acc.clone());
        acc
    }

    /// `M_μ(π_L)`, certified to `min(N, precision of the c_h)`.
    pub fn m_mu(&mut self, mu: &Partition) -> Result<FieldElement, PerturbError> {
        let n = self.f.degree();
        if mu.len() > n as usize {
            return Err(PerturbError::TooManyParts { parts: mu.len(), n });
        }
        let field = self.f.field();
        let p = field.p();
        let raw = self.augmented(mu);
        let denom: BigInt = mu
            .multiplicities()
            .values()
            .map(|&m| (1..=m as u64).map(BigInt::from).product::<BigInt>())
            .product();
        let v = vp_bigint(&denom, p).unwrap_or(0) as u32;
        let pv = BigInt::from(p).pow(v);
        let unit = &denom / &pv;
        let modulus = BigInt::from(p).pow(self.ring.exponent - v);
        let inv = unit.modinv(&modulus).expect("unit is prime to p");
        let coords: Vec<BigInt> = raw
            .iter()
            .map(|x| {
                debug_assert!((x % &pv).is_zero(), "augmented monomial not divisible");
                ((x / &pv) * &inv).mod_floor(&modulus)
            })
            .collect();
        Ok(field.from_coords(&coords).truncate(self.cap))
    }

    /// `E_h(φ(π_L)) = Σ_{μ with h parts} r_μ M_μ(π_L)`.
    pub fn e_h(&mut self, phi: &PerturbationSeries, h: u32) -> Result<FieldElement, PerturbError> {
        let n = self.f.degree();
        if h == 0 || h > n {
            return Err(PerturbError::BadIndex { h, n });
        }
        let field = self.f.field();
        let phi = phi.in_field(field)?;
        let support: Vec<u32> = phi.sparse().iter().map(|(k, _)| *k).collect();
        let mut acc = field.zero();
        for mu in multisets(&support, h as usize) {
            let mut r_mu = field.one();
            for &k in mu.parts() {
                r_mu = r_mu.mul_unchecked(&phi.r(k));
            }
            if r_mu.is_exact_zero() {
                continue;
            }
            acc = acc.add_unchecked(&r_mu.mul_unchecked(&self.m_mu(&mu)?));
        }
        Ok(acc.truncate(self.cap))
    }
}

/// `c̃_h = E_h(φ(π_L))` by the symmetric route.
pub fn e_h_perturbed(f: &EisensteinPoly, phi: &PerturbationSeries, h: u32) -> Result<FieldElement, PerturbError> {
    PowerSumEvaluator::new(f).e_h(phi, h)
}

/// Minimal polynomial of `φ(π_L)` by the symmetric route.
pub fn minpoly_symmetric(f: &EisensteinPoly, phi: &PerturbationSeries) -> Result<EisensteinPoly, PerturbError> {
    let mut eval = PowerSumEvaluator::new(f);
    let coeffs = (1..=f.degree())
        .map(|h| eval.e_h(phi, h))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(EisensteinPoly::new(f.field(), coeffs)?)
}

/// Agreement of the two routes on one coefficient.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoefficientComparison {
    pub h: u32,
    pub symmetric: String,
    pub linear_algebra: String,
    /// Smaller of the two certified precisions (`None` when both exact).
    pub shared_precision: Option<u32>,
    pub agree: bool,
}

/// Both routes plus the root check.
#[derive(Debug, Clone)]
pub struct DualRoute {
    pub symmetric: EisensteinPoly,
    pub linear_algebra: EisensteinPoly,
    pub comparison: Vec<CoefficientComparison>,
    /// `f̃(φ(π_L))` vanishes at the certified precision of `f̃`.
    pub root_check: bool,
}

impl DualRoute {
    pub fn agree(&self) -> bool {
        self.comparison.iter().all(|c| c.agree)
    }

    pub fn report(&self, f: &EisensteinPoly, phi: &PerturbationSeries) -> DualRouteReport {
        DualRouteReport {
            field: f.field(),
            poly: f.coeffs().iter().map(|c| c.to_string()).collect(),
            phi: phi.coeffs().iter().map(|c| c.to_string()).collect(),
            comparison: self.comparison.clone(),
            routes_agree: self.agree(),
            root_check: self.root_check,
        }
    }
}

/// Serializable summary of a [`DualRoute`] run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DualRouteReport {
    pub field: BaseField,
    /// `c_1..c_n` of `f`.
    pub poly: Vec<String>,
    /// `r_1..r_d`.
    pub phi: Vec<String>,
    pub comparison: Vec<CoefficientComparison>,
    pub routes_agree: bool,
    pub root_check: bool,
}

fn shared_precision(a: &FieldElement, b: &FieldElement) -> Precision {
    a.precision().min(b.precision())
}

/// Run both routes and compare them.
pub fn dual_route(f: &EisensteinPoly, phi: &PerturbationSeries) -> Result<DualRoute, PerturbError> {
    let symmetric = minpoly_symmetric(f, phi)?;
    let linear_algebra = minpoly_linear_algebra(f, phi)?;
    let mut comparison = Vec::new();
    for h in 1..=f.degree() {
        let (a, b) = (symmetric.c(h), linear_algebra.c(h));
        let shared = shared_precision(a, b);
        let agree = match shared {
            Precision::Exact => a == b,
            Precision::Absolute(k) => a.congruent(b, k)?,
        };
        comparison.push(CoefficientComparison {
            h,
            symmetric: a.to_string(),
            linear_algebra: b.to_string(),
            shared_precision: shared.as_absolute(),
            agree,
        });
    }
    let root_check = root_check(f, phi, &linear_algebra)?;
    Ok(DualRoute {
        symmetric,
        linear_algebra,
        comparison,
        root_check,
    })
}

/// `g(φ(π_L)) ≡ 0` modulo `M_L^{n·k}` where `k` is the smallest certified
/// precision among `g`'s coefficients.
pub fn root_check(f: &EisensteinPoly, phi: &PerturbationSeries, g: &EisensteinPoly) -> Result<bool, PerturbError> {
    let ring = QuotientRing::new(f);
    let alpha = ring.apply_series(&phi.in_field(f.field())?);
    let value = ring.eval_eisenstein(g, &alpha);
    let k = g
        .coeffs()
        .iter()
        .filter_map(|c| c.precision().as_absolute())
        .min()
        .unwrap_or(f.field().precision());
    Ok(value.vanishes_to(k as i64 * f.degree() as i64))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn example2() -> EisensteinPoly {
        EisensteinPoly::from_integers(BaseField::qp(2).unwrap(), &[0, 6, -4, 2]).unwrap()
    }

    fn ints(f: &EisensteinPoly) -> Vec<FieldElement> {
        f.coeffs().to_vec()
    }

    #[test]
    fn series_application() {
        let q2 = BaseField::qp(2).unwrap();
        let f = example2();
        let id = apply_series(&f, &PerturbationSeries::identity(q2)).unwrap();
        assert_eq!(id.coords()[1], q2.one());
        assert!(id.coords().iter().enumerate().all(|(i, c)| i == 1 || c.is_exact_zero()));

        let phi = PerturbationSeries::x_plus(q2, &q2.one(), 1).unwrap();
        let x = apply_series(&f, &phi).unwrap();
        let expect: Vec<FieldElement> = [0, 1, 1, 0].iter().map(|&a| q2.exact_integer(a)).collect();
        assert_eq!(x.coords(), &expect[..]);

        // X^2 + 2: π^2 = -2, so π + π^2 = -2 + π
        let g = EisensteinPoly::from_integers(q2, &[0, 2]).unwrap();
        let y = apply_series(&g, &phi).unwrap();
        assert_eq!(y.coords(), &[q2.exact_integer(-2), q2.one()][..]);
        assert_eq!(y.valuation(), LValuation::Finite(1));
    }

    #[test]
    fn leading_coefficient_must_be_unit() {
        let q2 = BaseField::qp(2).unwrap();
        assert_eq!(
            PerturbationSeries::new(q2, vec![q2.exact_integer(2)]),
            Err(PerturbError::LeadingNotUnit)
        );
    }

    #[test]
    fn identity_perturbation_returns_f() {
        let q2 = BaseField::qp(2).unwrap();
        let f = example2();
        let id = PerturbationSeries::identity(q2);
        let la = minpoly_linear_algebra(&f, &id).unwrap();
        let sym = minpoly_symmetric(&f, &id).unwrap();
        for h in 1..=4 {
            assert!(la.c(h).congruent(f.c(h), q2.precision()).unwrap());
            assert!(sym.c(h).congruent(f.c(h), q2.precision()).unwrap());
        }
    }

    #[test]
    fn quadratic_by_hand() {
        // X^2 + 2 and φ = X + X^2: π̃ = π - 2 has minimal polynomial Y^2 + 4Y + 6
        let q2 = BaseField::qp(2).unwrap();
        let f = EisensteinPoly::from_integers(q2, &[0, 2]).unwrap();
        let phi = PerturbationSeries::x_plus(q2, &q2.one(), 1).unwrap();
        let la = minpoly_linear_algebra(&f, &phi).unwrap();
        let expect = [q2.from_integer(-4), q2.from_integer(6)];
        for h in 1..=2 {
            assert!(la.c(h).congruent(&expect[h as usize - 1], 20).unwrap());
        }
        let sym = minpoly_symmetric(&f, &phi).unwrap();
        for (a, b) in ints(&sym).iter().zip(ints(&la).iter()) {
            assert!(a.congruent(b, 20).unwrap());
        }
        // X^2 - 2 (c_2 = -2): π̃ = π + 2, minimal polynomial Y^2 - 4Y + 2
        let g = EisensteinPoly::from_integers(q2, &[0, -2]).unwrap();
        let la = minpoly_linear_algebra(&g, &phi).unwrap();
        assert!(la.c(1).congruent(&q2.from_integer(4), 20).unwrap());
        assert!(la.c(2).congruent(&q2.from_integer(2), 20).unwrap());
    }

    #[test]
    fn example2_routes_agree() {
        let q2 = BaseField::qp(2).unwrap();
        let f = example2();
        let phi = PerturbationSeries::x_plus(q2, &q2.one(), 1).unwrap();
        let dual = dual_route(&f, &phi).unwrap();
        assert!(dual.agree());
        assert!(dual.root_check);
        // Y^4 + 12Y^3 + 58Y^2 + 44Y + 10
        let expect = [-12, 58, -44, 10];
        for h in 1..=4 {
            assert!(dual
                .linear_algebra
                .c(h)
                .congruent(&q2.from_integer(expect[h as usize - 1]), 20)
                .unwrap());
        }
    }

    #[test]
    fn m_mu_small_cases() {
        let f = example2();
        let q2 = f.field();
        let p = |s: &str| s.parse::<Partition>().unwrap();
        assert_eq!(m_mu(&f, &p("1")).unwrap(), f.c(1).clone());
        assert_eq!(m_mu(&f, &p("1,1")).unwrap(), f.c(2).clone());
        let expect = f.c(1).mul(f.c(1)).unwrap().sub(&f.c(2).scale(&BigInt::from(2))).unwrap();
        assert_eq!(m_mu(&f, &p("2")).unwrap(), expect);
        assert_eq!(c_lambda(&f, &p("4,2")).unwrap(), q2.exact_integer(12));
        assert_eq!(c_lambda(&f, &Partition::empty()).unwrap(), q2.one());
        assert!(matches!(c_lambda(&f, &p("5")), Err(PerturbError::PartOutOfRange { .. })));
        let eval = ExpansionEvaluator::new(&f);
        let mut fast = PowerSumEvaluator::new(&f);
        for mu in ["2,1", "3,3", "2,2,1,1", "4,1"] {
            let a = m_mu(&f, &p(mu)).unwrap();
            let b = eval.m_mu(&p(mu)).unwrap();
            let c = fast.m_mu(&p(mu)).unwrap();
            assert!(a.congruent(&b, q2.precision()).unwrap(), "{mu}");
            assert!(a.congruent(&c, q2.precision()).unwrap(), "{mu}");
        }
    }

    #[test]
    fn evaluators_agree_across_backends() {
        let fields = [
            BaseField::ramified(3, 2).unwrap().with_precision(12).unwrap(),
            BaseField::laurent(2).unwrap().with_precision(10).unwrap(),
            BaseField::laurent(3).unwrap().with_precision(10).unwrap(),
            BaseField::qp(5).unwrap().with_precision(8).unwrap(),
        ];
        for field in fields {
            let pi = field.uniformizer();
            let coeffs = vec![
                pi.mul(&field.from_integer(2)).unwrap(),
                pi.pow(2),
                field.zero(),
                pi.mul(&field.from_integer(1 + field.p() as i64)).unwrap(),
            ];
            let f = EisensteinPoly::new(field, coeffs).unwrap();
            let mut fast = PowerSumEvaluator::new(&f);
            for mu in ["1", "2", "2,1", "3,1,1", "2,2,2", "4,3,1", "5,5"] {
                let mu: Partition = mu.parse().unwrap();
                let a = m_mu(&f, &mu).unwrap();
                let b = fast.m_mu(&mu).unwrap();
                assert!(a.congruent(&b, field.precision()).unwrap(), "{field:?} {mu}");
            }
        }
    }
}

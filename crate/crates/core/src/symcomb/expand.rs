//! Expansion of monomial symmetric polynomials in the elementary basis
//! without enumerating tilings, for weights beyond the tiling cap.
//!
//! Work in `Z[e_1, e_2, ...]`, where a monomial `e_λ` is keyed by the
//! partition `λ`. Power sums come from Newton's identities. The augmented
//! monomials `m̃_ν = (Π mult!)·m_ν` satisfy
//!
//! `m̃_{ν ∪ {k}} = p_k·m̃_ν - Σ_s m̃_{ν + k·ε_s}`
//!
//! so every `m_μ` is reached without division until the final exact
//! quotient by `Π mult!`. Dropping all `e_λ` outside a family closed under
//! taking sub-multisets is a ring homomorphism, which keeps the computation
//! small when only some coefficients are needed.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::partition::Partition;

/// A (truncated) polynomial in the elementary symmetric polynomials.
pub type EPoly = HashMap<Partition, BigInt>;

/// Which monomials `e_λ` to keep. Each variant keeps a family closed under
/// sub-multisets, so truncation commutes with products.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Truncation {
    /// `n` variables: `e_k = 0` for `k > n`.
    PartsAtMost(u32),
    /// Only sub-multisets of the given partition.
    SubmultisetsOf(Partition),
    /// Keep `e_λ` with `Σ weight(λ_i) < bound`; `weights[k - 1]` is the weight
    /// of part `k`, `None` (or a part beyond the table) means the part is dropped.
    Weighted { weights: Vec<Option<u32>>, bound: u32 },
}

impl Truncation {
    pub fn keeps(&self, lambda: &Partition) -> bool {
        match self {
            Truncation::PartsAtMost(n) => lambda.max_part().is_none_or(|m| m <= *n),
            Truncation::SubmultisetsOf(target) => target.contains(lambda),
            Truncation::Weighted { weights, bound } => {
                let mut total = 0u64;
                for &x in lambda.parts() {
                    match weights.get(x as usize - 1).copied().flatten() {
                        Some(wt) => total += wt as u64,
                        None => return false,
                    }
                    if total >= *bound as u64 {
                        return false;
                    }
                }
                true
            }
        }
    }

    fn keeps_part(&self, k: u32) -> bool {
        self.keeps(&Partition::new(vec![k]).expect("positive"))
    }
}

/// Expansion engine with caches for one truncation.
#[derive(Debug)]
pub struct ElementaryExpander {
    trunc: Truncation,
    power_sums: Mutex<Vec<Arc<EPoly>>>,
    augmented: Mutex<HashMap<Partition, Arc<EPoly>>>,
}

fn add_into(acc: &mut EPoly, key: Partition, c: BigInt) {
    if c.is_zero() {
        return;
    }
    match acc.get_mut(&key) {
        Some(v) => {
            *v += c;
            if v.is_zero() {
                acc.remove(&key);
            }
        }
        None => {
            acc.insert(key, c);
        }
    }
}

impl ElementaryExpander {
    pub fn new(trunc: Truncation) -> Self {
        Self {
            trunc,
            power_sums: Mutex::new(vec![Arc::new(EPoly::new())]),
            augmented: Mutex::new(HashMap::new()),
        }
    }

    /// Shared engine for a truncation (caches survive across calls).
    pub fn shared(trunc: Truncation) -> Arc<Self> {
        static REGISTRY: OnceLock<Mutex<HashMap<Truncation, Arc<ElementaryExpander>>>> = OnceLock::new();
        let reg = REGISTRY.get_or_init(Default::default);
        let mut reg = reg.lock().expect("registry lock");
        if reg.len() > 256 {
            reg.clear();
        }
        reg.entry(trunc.clone()).or_insert_with(|| Arc::new(Self::new(trunc))).clone()
    }

    pub fn truncation(&self) -> &Truncation {
        &self.trunc
    }

    fn mul(&self, a: &EPoly, b: &EPoly) -> EPoly {
        let mut out = EPoly::new();
        for (ka, ca) in a {
            for (kb, cb) in b {
                let key = ka.union(kb);
                if self.trunc.keeps(&key) {
                    add_into(&mut out, key, ca * cb);
                }
            }
        }
        out
    }

    /// `p_k` in the elementary basis.
    pub fn power_sum(&self, k: u32) -> Arc<EPoly> {
        {
            let cache = self.power_sums.lock().expect("cache lock");
            if let Some(p) = cache.get(k as usize) {
                return p.clone();
            }
        }
        // fill p_1 .. p_k in order
        let mut have = self.power_sums.lock().expect("cache lock").len() as u32;
        while have <= k {
            let j = have;
            let mut acc = EPoly::new();
            for i in 1..j {
                if !self.trunc.keeps_part(i) {
                    continue;
                }
                let prev = self.power_sum(j - i);
                let sign: i64 = if (i - 1) % 2 == 0 { 1 } else { -1 };
                for (key, c) in prev.iter() {
                    let nk = key.with_part(i);
                    if self.trunc.keeps(&nk) {
                        add_into(&mut acc, nk, c * sign);
                    }
                }
            }
            if self.trunc.keeps_part(j) {
                let sign: i64 = if (j - 1).is_multiple_of(2) { 1 } else { -1 };
                add_into(
                    &mut acc,
                    Partition::new(vec![j]).expect("positive"),
                    BigInt::from(sign * j as i64),
                );
            }
            let mut cache = self.power_sums.lock().expect("cache lock");
            if cache.len() as u32 == j {
                cache.push(Arc::new(acc));
            }
            have = cache.len() as u32;
        }
        self.power_sums.lock().expect("cache lock")[k as usize].clone()
    }

    fn augmented(&self, nu: &Partition) -> Arc<EPoly> {
        if let Some(v) = self.augmented.lock().expect("cache lock").get(nu) {
            return v.clone();
        }
        let result = if nu.is_empty() {
            let mut one = EPoly::new();
            one.insert(Partition::empty(), BigInt::one());
            one
        } else {
            let parts = nu.parts();
            let k = *parts.last().expect("nonempty");
            let rest = nu.without_part(k).expect("present");
            let mut acc = self.mul(&self.power_sum(k), &self.augmented(&rest));
            for (v, m) in rest.multiplicities() {
                let merged = rest.without_part(v).expect("present").with_part(v + k);
                let sub = self.augmented(&merged);
                let m = BigInt::from(m);
                for (key, c) in sub.iter() {
                    add_into(&mut acc, key.clone(), -(c * &m));
                }
            }
            acc
        };
        let result = Arc::new(result);
        self.augmented
            .lock()
            .expect("cache lock")
            .insert(nu.clone(), result.clone());
        result
    }

    /// `m_μ` in the elementary basis, i.e. the coefficients `d_λμ` for the kept `λ`.
    pub fn monomial(&self, mu: &Partition) -> EPoly {
        let aug = self.augmented(mu);
        let denom: BigInt = mu
            .multiplicities()
            .values()
            .map(|&m| (1..=m as u64).map(BigInt::from).product::<BigInt>())
            .product();
        aug.iter()
            .map(|(k, c)| {
                let (q, r) = c.div_rem(&denom);
                debug_assert!(r.is_zero(), "augmented monomial not divisible");
                (k.clone(), q)
            })
            .collect()
    }
}

/// `d_λμ` for arbitrary weight, expanding whichever side has fewer parts
/// and truncating to sub-multisets of the other.
pub fn d_coeff_expanded(lambda: &Partition, mu: &Partition) -> BigInt {
    if lambda.weight() != mu.weight() {
        return BigInt::zero();
    }
    let (expand, target) = if lambda.len() <= mu.len() { (lambda, mu) } else { (mu, lambda) };
    let engine = ElementaryExpander::shared(Truncation::SubmultisetsOf(target.clone()));
    engine.monomial(expand).get(target).cloned().unwrap_or_default()
}

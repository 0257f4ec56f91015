//! Symmetric-function combinatorics: partitions, tilings of cycle digraphs
//! and the integers `d_λμ` with `m_μ = Σ_λ d_λμ e_λ`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub mod closed;
pub mod expand;
pub mod oracle;
pub mod partition;
pub mod tiling;

pub use closed::{d_closed_form, eta_single_cycle_closed_form};
pub use expand::{d_coeff_expanded, ElementaryExpander, Truncation};
pub use oracle::oracle_psi_expansion;
pub use partition::{partitions_of, scale_partition, Partition, ScaleMode};
pub use tiling::{
    admissible_pair_count, d_coeff, enumerate_tilings, eta, CycleDigraph, Path, Tiling, TilingPair,
    MAX_TILING_WEIGHT,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SymError {
    #[error("partitions have different weights ({left} vs {right})")]
    WeightMismatch { left: u32, right: u32 },
    #[error("weight {weight} exceeds the tiling enumeration cap {cap}")]
    TooLarge { weight: u32, cap: u32 },
    #[error("partition parts must be positive")]
    ZeroPart,
    #[error("malformed partition {0}")]
    BadPartition(String),
    #[error("partition has {parts} parts, more than n = {n}")]
    TooManyParts { parts: usize, n: usize },
}

/// `ψ_μ` in `n` variables: `m_μ = Σ_λ d_λμ X_{λ_1}...X_{λ_k}` over `λ` with parts at most `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiExpansion {
    pub mu: Partition,
    pub n: u32,
    pub coeffs: Vec<PsiTerm>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PsiTerm {
    pub lambda: Partition,
    pub d: i64,
}

impl PsiExpansion {
    pub fn as_map(&self) -> BTreeMap<Partition, i64> {
        self.coeffs.iter().map(|t| (t.lambda.clone(), t.d)).collect()
    }
}

/// A single coefficient `d_λμ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DCoefficient {
    pub lambda: Partition,
    pub mu: Partition,
    pub d: i64,
}

impl DCoefficient {
    pub fn compute(lambda: &Partition, mu: &Partition) -> Result<Self, SymError> {
        Ok(Self {
            lambda: lambda.clone(),
            mu: mu.clone(),
            d: d_coeff(lambda, mu)?,
        })
    }
}

/// `ψ_μ` from tiling counts. Zero coefficients are omitted; terms follow the
/// reverse-lexicographic order of `λ`.
pub fn psi_expansion(mu: &Partition, n: u32) -> Result<PsiExpansion, SymError> {
    if mu.len() > n as usize {
        return Err(SymError::TooManyParts { parts: mu.len(), n: n as usize });
    }
    let mut coeffs = Vec::new();
    for lambda in partitions_of(mu.weight(), Some(n), None) {
        let d = d_coeff(&lambda, mu)?;
        if d != 0 {
            coeffs.push(PsiTerm { lambda, d });
        }
    }
    Ok(PsiExpansion { mu: mu.clone(), n, coeffs })
}

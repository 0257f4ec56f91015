//! Perturbation of Eisenstein polynomials over local fields.
//!
//! Given an Eisenstein polynomial `f` over `O_K` with root `π` and a series
//! `φ(X) = r_1 X + r_2 X^2 + ...` with `v(r_1) = 0`, the minimal polynomial
//! `f̃` of `π̃ = φ(π)` is again Eisenstein. This crate computes how the
//! coefficients of `f̃` relate to those of `f`, using the indices of
//! inseparability of the extension:
//!
//! - [`basefield`]: precision-tracked arithmetic in `O_K`.
//! - [`symcomb`]: partitions, tilings of cycle digraphs and the integer
//!   coefficients `d_λμ` linking monomial and elementary symmetric polynomials.
//! - [`extension`]: Eisenstein polynomials, indices of inseparability and the
//!   Hasse-Herbrand function.
//! - [`perturb`]: the perturbed minimal polynomial by two independent routes.
//! - [`theorems`]: the congruence statements and their verification.

pub mod basefield;
pub mod extension;
pub mod fixtures;
pub mod perturb;
pub mod suite;
pub mod symcomb;
pub mod theorems;

pub use basefield::{Backend, BaseField, FieldElement, FieldError, Precision, Valuation};
pub use extension::{EisensteinPoly, ExtensionError, InseparabilityProfile, RawIndex};
pub use perturb::{PerturbError, PerturbationSeries};
pub use symcomb::{Partition, SymError};
pub use theorems::{CongruenceReport, TheoremError, Verdict};

//! Two worked extensions used as regression fixtures.
//!
//! - `2adic-deg4`: `X^4 + 6X^2 + 4X + 2` over `Q_2`.
//! - `3adic-deg9`: a degree-9 polynomial over `K = Q_3(π_K)`, `π_K^2 = 3`,
//!   with `c = (π², π², 2π², π³, 0, π² + π³, π⁴, π³, π)`. Only the valuations
//!   `v(c_2) = v(c_6) = 2`, `v(c_1), v(c_3) >= 2`, `v(c_4), v(c_5), v(c_7), v(c_8) >= 3`
//!   and `v(c_9) = 1` matter for its indices and `φ` tables; the units are one
//!   fixed choice.

use serde::{Deserialize, Serialize};

use crate::basefield::BaseField;
use crate::extension::{EisensteinPoly, ExtensionError, ProfileDump};

pub const NAMES: [&str; 2] = ["2adic-deg4", "3adic-deg9"];

/// `X^4 + 6X^2 + 4X + 2` over `Q_2` at the given working precision.
pub fn two_adic_deg4(precision: u32) -> Result<EisensteinPoly, ExtensionError> {
    let field = BaseField::qp(2)?.with_precision(precision)?;
    EisensteinPoly::from_integers(field, &[0, 6, -4, 2])
}

/// The degree-9 fixture over `Q_3(√3)` at the given working precision.
pub fn three_adic_deg9(precision: u32) -> Result<EisensteinPoly, ExtensionError> {
    let field = BaseField::ramified(3, 2)?.with_precision(precision)?;
    let pi = |k: u32| field.uniformizer_pow(k);
    let two = field.exact_integer(2);
    let coeffs = vec![
        pi(2),
        pi(2),
        two.mul(&pi(2))?,
        pi(3),
        field.zero(),
        pi(2).add(&pi(3))?,
        pi(4),
        pi(3),
        pi(1),
    ];
    EisensteinPoly::new(field, coeffs)
}

/// A fixture by name, or `None` for an unknown name.
pub fn by_name(name: &str, precision: u32) -> Option<Result<EisensteinPoly, ExtensionError>> {
    match name {
        "2adic-deg4" => Some(two_adic_deg4(precision)),
        "3adic-deg9" => Some(three_adic_deg9(precision)),
        _ => None,
    }
}

/// One-line description for listings.
pub fn describe(name: &str) -> Option<&'static str> {
    match name {
        "2adic-deg4" => Some("X^4 + 6X^2 + 4X + 2 over Q_2"),
        "3adic-deg9" => Some("degree 9 over Q_3(pi), pi^2 = 3, v(c_9) = 1, v(c_2) = v(c_6) = 2"),
        _ => None,
    }
}

/// A fixture with its field, coefficients and indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixtureInfo {
    pub name: String,
    pub description: String,
    pub field: BaseField,
    /// `c_1..c_n`.
    pub c: Vec<String>,
    pub profile: ProfileDump,
}

pub fn info(name: &str, precision: u32) -> Option<Result<FixtureInfo, ExtensionError>> {
    let f = by_name(name, precision)?;
    let description = describe(name)?;
    Some(f.and_then(|f| {
        Ok(FixtureInfo {
            name: name.to_string(),
            description: description.to_string(),
            field: f.field(),
            c: f.coeffs().iter().map(|c| c.to_string()).collect(),
            profile: f.indices()?.dump(),
        })
    }))
}

//! Parsing of command-line inputs: backends, element lists and polynomials.

use ramify_core::{Backend, BaseField, EisensteinPoly, FieldElement, Partition, Valuation};

use crate::CliError;

/// `qp`, `laurent` or `ramified:<e>`.
pub fn backend(text: &str) -> Result<Backend, CliError> {
    let text = text.trim();
    match text {
        "qp" => Ok(Backend::CharZero { e: 1 }),
        "laurent" => Ok(Backend::CharP),
        _ => {
            let e = text
                .strip_prefix("ramified:")
                .and_then(|e| e.trim().parse::<u32>().ok())
                .ok_or_else(|| CliError::Input(format!("unknown backend {text:?} (qp, ramified:<e>, laurent)")))?;
            Ok(Backend::CharZero { e })
        }
    }
}

/// Splits on `,` or `;` outside brackets and parentheses, with byte offsets.
pub fn split_items(text: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let (mut depth, mut start) = (0i32, 0usize);
    for (i, ch) in text.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            ',' | ';' if depth == 0 => {
                out.push((start, &text[start..i]));
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push((start, &text[start..]));
    out
}

/// A comma-separated list of elements.
pub fn elements(field: BaseField, text: &str) -> Result<Vec<FieldElement>, CliError> {
    if text.trim().is_empty() {
        return Err(CliError::Input("empty coefficient list".into()));
    }
    split_items(text)
        .into_iter()
        .map(|(offset, item)| {
            field.parse(item).map_err(|e| match e {
                ramify_core::FieldError::Parse { position, message } => CliError::Parse {
                    position: offset + position,
                    message,
                },
                other => other.into(),
            })
        })
        .collect()
}

/// An Eisenstein polynomial.
///
/// Default form: `c_1, ..., c_n` with `f = X^n - c_1 X^{n-1} + ... + (-1)^n c_n`;
/// a leading `1` for `X^n` may be included. With `raw`, the plain monic
/// coefficients from `X^n` (optional) down to the constant term.
pub fn poly(field: BaseField, text: &str, raw: bool) -> Result<EisensteinPoly, CliError> {
    let mut items = elements(field, text)?;
    // a unit can never be an Eisenstein coefficient, so a leading unit is X^n's
    let leading = items.first().is_some_and(|c| c.valuation() == Valuation::Finite(0));
    if leading {
        if items[0].sub(&field.one())?.valuation() != Valuation::Infinity {
            return Err(CliError::Input("leading coefficient must be 1".into()));
        }
        if !raw {
            items.remove(0);
        }
    } else if raw {
        items.insert(0, field.one());
    }
    if raw {
        Ok(EisensteinPoly::from_monic(field, items)?)
    } else {
        Ok(EisensteinPoly::new(field, items)?)
    }
}

pub fn partition(text: &str) -> Result<Partition, CliError> {
    text.parse::<Partition>().map_err(|e| CliError::Input(e.to_string()))
}

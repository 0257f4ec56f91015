//! Closed-form values of `η_λμ` on a single cycle and of `d_λμ` for
//! partitions with at most one exceptional part.

use super::partition::Partition;

/// `λ = {a^r} ∪ {c}` (either piece may be absent).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Shape {
    /// `None` when `r = 0`.
    a: Option<u32>,
    r: u32,
    /// The single exceptional part, if any.
    c: Option<u32>,
}

/// Every way of writing `λ` as `r` copies of `a` plus at most one other part.
fn shapes(lambda: &Partition) -> Vec<Shape> {
    let mults: Vec<(u32, usize)> = lambda.multiplicities().into_iter().collect();
    let mut out = Vec::new();
    match mults.as_slice() {
        [(v, m)] => {
            out.push(Shape { a: Some(*v), r: *m as u32, c: None });
            if *m == 1 {
                out.push(Shape { a: None, r: 0, c: Some(*v) });
            }
        }
        [(v1, m1), (v2, m2)] => {
            if *m2 == 1 {
                out.push(Shape { a: Some(*v1), r: *m1 as u32, c: Some(*v2) });
            }
            if *m1 == 1 {
                out.push(Shape { a: Some(*v2), r: *m2 as u32, c: Some(*v1) });
            }
        }
        _ => {}
    }
    out
}

/// `η_λμ(Γ)` for `Γ` a single cycle of length `|λ|`, when `λ` and `μ` have one
/// of the shapes `({a^r}, {b^s, d})` or `({a^r, c}, {b^s, d})` (in either order).
pub fn eta_single_cycle_closed_form(lambda: &Partition, mu: &Partition) -> Option<u64> {
    let w = lambda.weight();
    if w != mu.weight() || w == 0 {
        return None;
    }
    let one_way = |l: &Partition, m: &Partition| -> Option<u64> {
        let has_d = shapes(m).iter().any(|s| s.c.is_some());
        if !has_d {
            return None;
        }
        let mut best = None;
        for s in shapes(l) {
            match (s.a, s.c) {
                (Some(_), Some(_)) | (None, Some(_)) => best = Some(w as u64),
                (Some(a), None) if best.is_none() => best = Some(a as u64),
                _ => {}
            }
        }
        best
    };
    one_way(lambda, mu).or_else(|| one_way(mu, lambda))
}

/// `d_λμ` for `λ = {a^r, c}`, `μ = {b^s, d}` with `a > sb` (or the pure shape
/// `λ = {a^r}` with `a > sb`), trying both orders. `None` when no closed form
/// applies.
pub fn d_closed_form(lambda: &Partition, mu: &Partition) -> Option<i64> {
    let w = lambda.weight();
    if w != mu.weight() || w == 0 {
        return None;
    }
    let sgn = |k: u64| if k.is_multiple_of(2) { 1i64 } else { -1 };
    let one_way = |l: &Partition, m: &Partition| -> Option<i64> {
        for ms in shapes(m) {
            let Some(d) = ms.c else { continue };
            let (b, s) = (ms.a.unwrap_or(0), ms.r);
            debug_assert!(ms.a != Some(d));
            let sb = s as u64 * b as u64;
            for ls in shapes(l) {
                let r = ls.r as u64;
                let big_a = ls.a.is_none_or(|a| a as u64 > sb);
                if !big_a {
                    continue;
                }
                match ls.c {
                    Some(c) => {
                        let wi = w as i64;
                        let divides = b != 0 && c % b == 0;
                        let base = sgn(r + s as u64 + w as u64 + 1);
                        return Some(if !divides || sb < c as u64 {
                            base * wi
                        } else {
                            base * (wi - ls.a.expect("a > sb >= c forces r > 0") as i64 * b as i64)
                        });
                    }
                    None => {
                        let a = ls.a.expect("pure shape has a");
                        return Some(sgn(r + s as u64 + w as u64) * a as i64);
                    }
                }
            }
        }
        None
    };
    one_way(lambda, mu).or_else(|| one_way(mu, lambda))
}

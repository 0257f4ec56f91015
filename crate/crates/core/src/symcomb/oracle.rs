//! Independent computation of `ψ_μ` (with `m_μ = ψ_μ(e_1, ..., e_n)`) by
//! leading-monomial reduction of an explicit polynomial in `n` variables.
//! Only practical for small `n` and weight; used to cross-check tilings.

use std::collections::BTreeMap;

use super::partition::Partition;
use super::SymError;

type Poly = BTreeMap<Vec<u8>, i64>;

fn add_term(p: &mut Poly, exp: Vec<u8>, c: i64) {
    if c == 0 {
        return;
    }
    let entry = p.entry(exp.clone()).or_insert(0);
    *entry += c;
    if *entry == 0 {
        p.remove(&exp);
    }
}

fn mul(a: &Poly, b: &Poly) -> Poly {
    let mut out = Poly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let exp: Vec<u8> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
            *out.entry(exp).or_insert(0) += ca * cb;
        }
    }
    out.retain(|_, c| *c != 0);
    out
}

/// Distinct permutations of `exps` (a multiset), pushed into `out`.
fn permutations(exps: &mut Vec<u8>, k: usize, out: &mut Poly) {
    if k == exps.len() {
        out.insert(exps.clone(), 1);
        return;
    }
    let mut used = Vec::new();
    for i in k..exps.len() {
        if used.contains(&exps[i]) {
            continue;
        }
        used.push(exps[i]);
        exps.swap(k, i);
        permutations(exps, k + 1, out);
        exps.swap(k, i);
    }
}

fn monomial_symmetric(mu: &Partition, n: usize) -> Poly {
    let mut exps: Vec<u8> = mu.parts().iter().map(|&x| x as u8).collect();
    exps.resize(n, 0);
    let mut out = Poly::new();
    permutations(&mut exps, 0, &mut out);
    out
}

fn elementary(k: usize, n: usize) -> Poly {
    let mut exps = vec![1u8; k];
    exps.resize(n, 0);
    let mut out = Poly::new();
    permutations(&mut exps, 0, &mut out);
    out
}

/// Coefficients of `ψ_μ` in `n` variables, keyed by `λ` (parts at most `n`).
pub fn oracle_psi_expansion(mu: &Partition, n: usize) -> Result<BTreeMap<Partition, i64>, SymError> {
    if mu.len() > n {
        return Err(SymError::TooManyParts { parts: mu.len(), n });
    }
    let es: Vec<Poly> = (0..=n).map(|k| elementary(k, n)).collect();
    let mut rest = monomial_symmetric(mu, n);
    let mut out = BTreeMap::new();
    while let Some((lead, &coef)) = rest.iter().next_back() {
        let lead = lead.clone();
        // leading exponent α of a symmetric polynomial is weakly decreasing;
        // it is the leading term of Π e_i^(α_i - α_{i+1})
        let mut parts = Vec::new();
        let mut product = es[0].clone();
        for i in 0..n {
            let next = if i + 1 < n { lead[i + 1] } else { 0 };
            let reps = lead[i].checked_sub(next).expect("symmetric leading term");
            for _ in 0..reps {
                parts.push(i as u32 + 1);
                product = mul(&product, &es[i + 1]);
            }
        }
        let lambda = Partition::new(parts).expect("positive parts");
        out.insert(lambda, coef);
        for (exp, c) in product {
            add_term(&mut rest, exp, -coef * c);
        }
    }
    Ok(out)
}

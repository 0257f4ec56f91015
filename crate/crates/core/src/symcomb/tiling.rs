//! Cycle digraphs, their tilings by directed paths, and the coefficients
//! `d_λμ` obtained by counting admissible tiling pairs.
//!
//! A tiling of a single `L`-cycle is determined by the set of vertices at
//! which its paths start, stored as an `L`-bit mask. A pair of tilings
//! `(S, T)` decorates each cycle with two masks; automorphisms of the digraph
//! act by rotating cycles and permuting cycles of equal length.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::{Arc, Mutex, OnceLock};

use super::partition::{partitions_of, Partition};
use super::SymError;

/// Largest weight accepted by the direct tiling enumeration.
pub const MAX_TILING_WEIGHT: u32 = 16;

/// A disjoint union of directed cycles, given by its cycle lengths.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CycleDigraph {
    lengths: Partition,
}

impl CycleDigraph {
    pub fn new(lengths: Partition) -> Self {
        Self { lengths }
    }

    /// Every isomorphism class with `w` vertices.
    pub fn all_with_vertices(w: u32) -> Vec<CycleDigraph> {
        partitions_of(w, None, None).into_iter().map(Self::new).collect()
    }

    pub fn lengths(&self) -> &Partition {
        &self.lengths
    }

    pub fn vertex_count(&self) -> u32 {
        self.lengths.weight()
    }

    pub fn cycle_count(&self) -> usize {
        self.lengths.len()
    }

    /// `(-1)^(w - c)`.
    pub fn sign(&self) -> i64 {
        if (self.vertex_count() as usize - self.cycle_count()).is_multiple_of(2) {
            1
        } else {
            -1
        }
    }

    /// `|Aut(Γ)| = Π L^{m_L} m_L!`.
    pub fn automorphism_count(&self) -> u128 {
        self.lengths
            .multiplicities()
            .iter()
            .map(|(&l, &m)| (l as u128).pow(m as u32) * (1..=m as u128).product::<u128>())
            .product()
    }

    /// Global label of vertex `pos` on cycle `cycle` (cycles laid out in order).
    pub fn vertex_label(&self, cycle: usize, pos: u32) -> u32 {
        self.lengths.parts()[..cycle].iter().sum::<u32>() + pos
    }
}

/// A directed path on one cycle: `len` vertices starting at `start`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Path {
    pub cycle: usize,
    pub start: u32,
    pub len: u32,
}

/// A tiling of a cycle digraph: one start-vertex mask per cycle.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Tiling {
    starts: Vec<u32>,
}

fn gaps(mask: u32, len: u32) -> Vec<u32> {
    let starts: Vec<u32> = (0..len).filter(|i| mask >> i & 1 == 1).collect();
    let k = starts.len();
    (0..k)
        .map(|i| {
            if i + 1 < k {
                starts[i + 1] - starts[i]
            } else {
                len - starts[i] + starts[0]
            }
        })
        .collect()
}

impl Tiling {
    pub fn start_masks(&self) -> &[u32] {
        &self.starts
    }

    pub fn paths(&self, g: &CycleDigraph) -> Vec<Path> {
        let mut out = Vec::new();
        for (c, (&mask, &len)) in self.starts.iter().zip(g.lengths.parts()).enumerate() {
            let starts: Vec<u32> = (0..len).filter(|i| mask >> i & 1 == 1).collect();
            for (start, l) in starts.iter().zip(gaps(mask, len)) {
                out.push(Path {
                    cycle: c,
                    start: *start,
                    len: l,
                });
            }
        }
        out
    }

    /// Multiset of path lengths.
    pub fn shape(&self, g: &CycleDigraph) -> Partition {
        let mut parts = Vec::new();
        for (&mask, &len) in self.starts.iter().zip(g.lengths.parts()) {
            parts.extend(gaps(mask, len));
        }
        Partition::new(parts).expect("gaps are positive")
    }
}

/// A `(λ, μ)`-tiling: a `λ`-tiling `S` and a `μ`-tiling `T` of the same digraph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TilingPair {
    pub s: Tiling,
    pub t: Tiling,
}

fn rotate(mask: u32, r: u32, len: u32) -> u32 {
    if r == 0 {
        return mask;
    }
    let full = if len == 32 { u32::MAX } else { (1u32 << len) - 1 };
    ((mask >> r) | (mask << (len - r))) & full
}

/// Minimal rotation of a decorated cycle and the number of rotations fixing it.
fn canonical_cycle(len: u32, s: u32, t: u32) -> ((u32, u32), u32) {
    let mut best = (s, t);
    let mut fixed = 0;
    for r in 0..len {
        let cand = (rotate(s, r, len), rotate(t, r, len));
        if cand == (s, t) {
            fixed += 1;
        }
        if cand < best {
            best = cand;
        }
    }
    (best, fixed)
}

impl TilingPair {
    /// Canonical representative of the isomorphism class: sorted list of
    /// minimally rotated decorated cycles.
    pub fn canonical_form(&self, g: &CycleDigraph) -> Vec<(u32, u32, u32)> {
        let mut form: Vec<(u32, u32, u32)> = g
            .lengths
            .parts()
            .iter()
            .zip(self.s.starts.iter().zip(&self.t.starts))
            .map(|(&len, (&s, &t))| {
                let ((cs, ct), _) = canonical_cycle(len, s, t);
                (len, cs, ct)
            })
            .collect();
        form.sort_unstable();
        form
    }

    /// Order of the stabilizer of `(S, T)` in `Aut(Γ)`.
    pub fn stabilizer_order(&self, g: &CycleDigraph) -> u128 {
        let mut classes: HashMap<(u32, u32, u32), (u128, u128)> = HashMap::new();
        for (&len, (&s, &t)) in g.lengths.parts().iter().zip(self.s.starts.iter().zip(&self.t.starts)) {
            let ((cs, ct), fixed) = canonical_cycle(len, s, t);
            let entry = classes.entry((len, cs, ct)).or_insert((0, fixed as u128));
            entry.0 += 1;
        }
        classes
            .values()
            .map(|&(k, fixed)| (1..=k).product::<u128>() * fixed.pow(k as u32))
            .product()
    }

    pub fn is_admissible(&self, g: &CycleDigraph) -> bool {
        let mut seen = HashSet::new();
        for (&len, (&s, &t)) in g.lengths.parts().iter().zip(self.s.starts.iter().zip(&self.t.starts)) {
            let (canon, fixed) = canonical_cycle(len, s, t);
            if fixed != 1 || !seen.insert((len, canon)) {
                return false;
            }
        }
        true
    }
}

/// All tilings of one `len`-cycle grouped by shape, as
/// `(shape multiplicities, masks)` in ascending shape order.
type CycleTable = Vec<(Vec<(u32, u8)>, Vec<u32>)>;

fn cycle_table(len: u32) -> Arc<CycleTable> {
    static TABLES: OnceLock<Mutex<HashMap<u32, Arc<CycleTable>>>> = OnceLock::new();
    let tables = TABLES.get_or_init(Default::default);
    if let Some(t) = tables.lock().expect("table lock").get(&len) {
        return t.clone();
    }
    let mut by_shape: BTreeMap<Vec<(u32, u8)>, Vec<u32>> = BTreeMap::new();
    for mask in 1u32..(1u32 << len) {
        let mut counts: BTreeMap<u32, u8> = BTreeMap::new();
        for g in gaps(mask, len) {
            *counts.entry(g).or_insert(0) += 1;
        }
        by_shape.entry(counts.into_iter().collect()).or_default().push(mask);
    }
    let table = Arc::new(by_shape.into_iter().collect::<CycleTable>());
    tables.lock().expect("table lock").insert(len, table.clone());
    table
}

fn check_weights(g: &CycleDigraph, lambda: &Partition) -> Result<(), SymError> {
    if g.vertex_count() != lambda.weight() {
        return Err(SymError::WeightMismatch {
            left: g.vertex_count(),
            right: lambda.weight(),
        });
    }
    if g.vertex_count() > MAX_TILING_WEIGHT {
        return Err(SymError::TooLarge {
            weight: g.vertex_count(),
            cap: MAX_TILING_WEIGHT,
        });
    }
    Ok(())
}

/// Every `λ`-tiling of `Γ`, in a deterministic order.
pub fn enumerate_tilings(g: &CycleDigraph, lambda: &Partition) -> Result<Vec<Tiling>, SymError> {
    check_weights(g, lambda)?;
    let w = lambda.weight() as usize;
    let mut remaining = vec![0u8; w + 1];
    for &x in lambda.parts() {
        remaining[x as usize] += 1;
    }
    let tables: Vec<Arc<CycleTable>> = g.lengths.parts().iter().map(|&l| cycle_table(l)).collect();
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(tables.len());
    fn go(
        tables: &[Arc<CycleTable>],
        idx: usize,
        remaining: &mut [u8],
        cur: &mut Vec<u32>,
        out: &mut Vec<Tiling>,
    ) {
        if idx == tables.len() {
            out.push(Tiling { starts: cur.clone() });
            return;
        }
        for (shape, masks) in tables[idx].iter() {
            if !shape.iter().all(|&(l, m)| remaining[l as usize] >= m) {
                continue;
            }
            for &(l, m) in shape {
                remaining[l as usize] -= m;
            }
            for &mask in masks {
                cur.push(mask);
                go(tables, idx + 1, remaining, cur, out);
                cur.pop();
            }
            for &(l, m) in shape {
                remaining[l as usize] += m;
            }
        }
    }
    go(&tables, 0, &mut remaining, &mut cur, &mut out);
    Ok(out)
}

/// Number of admissible `(λ, μ)`-tilings of `Γ` (not up to isomorphism).
pub fn admissible_pair_count(g: &CycleDigraph, lambda: &Partition, mu: &Partition) -> Result<u128, SymError> {
    let ss = enumerate_tilings(g, lambda)?;
    let ts = enumerate_tilings(g, mu)?;
    let mut count = 0;
    for s in &ss {
        for t in &ts {
            let pair = TilingPair { s: s.clone(), t: t.clone() };
            if pair.is_admissible(g) {
                count += 1;
            }
        }
    }
    Ok(count)
}

/// `η_λμ(Γ)`: isomorphism classes of admissible `(λ, μ)`-tilings of `Γ`.
pub fn eta(g: &CycleDigraph, lambda: &Partition, mu: &Partition) -> Result<u64, SymError> {
    let ss = enumerate_tilings(g, lambda)?;
    let ts = enumerate_tilings(g, mu)?;
    let mut classes = HashSet::new();
    for s in &ss {
        for t in &ts {
            let pair = TilingPair { s: s.clone(), t: t.clone() };
            if pair.is_admissible(g) {
                classes.insert(pair.canonical_form(g));
            }
        }
    }
    Ok(classes.len() as u64)
}

/// `d_λμ = (-1)^{|λ|+|μ|} Σ_Γ sgn(Γ) η_λμ(Γ)`, by direct enumeration
/// (weights up to [`MAX_TILING_WEIGHT`]). Results are memoized.
pub fn d_coeff(lambda: &Partition, mu: &Partition) -> Result<i64, SymError> {
    if lambda.weight() != mu.weight() {
        return Err(SymError::WeightMismatch {
            left: lambda.weight(),
            right: mu.weight(),
        });
    }
    let w = lambda.weight();
    if w > MAX_TILING_WEIGHT {
        return Err(SymError::TooLarge {
            weight: w,
            cap: MAX_TILING_WEIGHT,
        });
    }
    static MEMO: OnceLock<Mutex<HashMap<(Partition, Partition), i64>>> = OnceLock::new();
    let memo = MEMO.get_or_init(Default::default);
    let key = (lambda.clone(), mu.clone());
    if let Some(&d) = memo.lock().expect("memo lock").get(&key) {
        return Ok(d);
    }
    let mut total: i64 = 0;
    for g in CycleDigraph::all_with_vertices(w) {
        // each cycle must be tileable by both shapes; cheap filter first
        let lens = g.lengths.parts();
        if lens.iter().any(|&l| l < lambda.parts().last().copied().unwrap_or(0))
            || lens.iter().any(|&l| l < mu.parts().last().copied().unwrap_or(0))
        {
            continue;
        }
        let eta = eta(&g, lambda, mu)? as i64;
        total += g.sign() * eta;
    }
    let sign = if (lambda.len() + mu.len()).is_multiple_of(2) { 1 } else { -1 };
    let d = sign * total;
    memo.lock().expect("memo lock").insert(key, d);
    Ok(d)
}

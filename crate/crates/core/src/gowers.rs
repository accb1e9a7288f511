//! Gowers uniformity sums `A_rho(a)` of `(-1)^{s_rho}` over combinatorial
//! cubes and the weighted digraph that drives their recursion.
//!
//! Everything here is exact: edge weights are signed counts over the
//! common denominator `2^{m+1}`, path weights over `2^{k(m+1)}`.

use std::collections::{BTreeMap, HashMap, VecDeque};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, ToPrimitive};
use rayon::prelude::*;

use crate::error::{check_budget, invalid, Error, Result};
use crate::rational::{DyadicRational, Int};

/// Integer family `a_eps` indexed by `eps in {0,1}^m`; bit `i-1` of the
/// index is `eps_i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OffsetFamily {
    m: u32,
    entries: Vec<i64>,
}

impl OffsetFamily {
    pub fn new(m: u32, entries: Vec<i64>) -> Result<Self> {
        check_m(m)?;
        if entries.len() != 1 << m {
            return invalid(format!("family for m={m} needs {} entries, got {}", 1 << m, entries.len()));
        }
        Ok(Self { m, entries })
    }

    pub fn zero(m: u32) -> Result<Self> {
        check_m(m)?;
        Ok(Self { m, entries: vec![0; 1 << m] })
    }

    /// `a^(j)`: 1 where `eps_1 = ... = eps_j = 1`, else 0. `j = 0` and
    /// `j = m + 1` give the zero family.
    pub fn konieczny(m: u32, j: u32) -> Result<Self> {
        check_m(m)?;
        if j > m + 1 {
            return invalid(format!("Konieczny index j={j} exceeds m+1={}", m + 1));
        }
        if j == 0 || j == m + 1 {
            return Self::zero(m);
        }
        let mask = (1usize << j) - 1;
        let entries = (0..1usize << m).map(|eps| i64::from(eps & mask == mask)).collect();
        Ok(Self { m, entries })
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    /// `|a| = sum_eps a_eps`.
    pub fn weight(&self) -> i64 {
        self.entries.iter().sum()
    }

    pub fn max_abs(&self) -> i64 {
        self.entries.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&x| x == 0)
    }
}

impl std::fmt::Display for OffsetFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|x| x.to_string()).collect();
        write!(f, "[{}]", parts.join(","))
    }
}

fn check_m(m: u32) -> Result<()> {
    if !(2..=6).contains(&m) {
        return invalid(format!("m must lie in 2..=6, got {m}"));
    }
    Ok(())
}

/// `delta(a, e)_eps = floor((a_eps + e_0 + sum_i eps_i e_i) / 2)`; bit 0 of
/// `e` is `e_0`, bit `i` is `e_i`.
pub fn delta(a: &OffsetFamily, e: u32) -> Result<OffsetFamily> {
    if e >> (a.m + 1) != 0 {
        return invalid(format!("e={e:#b} has more than m+1={} bits", a.m + 1));
    }
    Ok(delta_unchecked(a, e))
}

fn delta_unchecked(a: &OffsetFamily, e: u32) -> OffsetFamily {
    let e0 = i64::from(e & 1);
    let rest = (e >> 1) as usize;
    let entries = a
        .entries
        .iter()
        .enumerate()
        .map(|(eps, &x)| (x + e0 + i64::from((eps & rest).count_ones())).div_euclid(2))
        .collect();
    OffsetFamily { m: a.m, entries }
}

fn sign_of(a: &OffsetFamily) -> i64 {
    if a.weight().rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// `w(a, b) = (-1)^{|a|} #{e : delta(a, e) = b} / 2^{m+1}`.
pub fn edge_weight(a: &OffsetFamily, b: &OffsetFamily) -> Result<DyadicRational> {
    if a.m != b.m {
        return invalid("families have different m");
    }
    let hits = (0..1u32 << (a.m + 1)).filter(|&e| &delta_unchecked(a, e) == b).count() as i64;
    Ok(DyadicRational::new(sign_of(a) * hits, a.m + 1))
}

/// Reachable part of the weighted graph, vertices in sorted order.
#[derive(Debug, Clone)]
pub struct GowersGraph {
    m: u32,
    vertices: Vec<OffsetFamily>,
    index: HashMap<OffsetFamily, usize>,
    /// Per row: `(column, signed count)`; the weight is count / 2^{m+1}.
    edges: Vec<Vec<(usize, i64)>>,
}

impl GowersGraph {
    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn vertices(&self) -> &[OffsetFamily] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn index_of(&self, a: &OffsetFamily) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn zero_index(&self) -> usize {
        self.index_of(&OffsetFamily::zero(self.m).expect("valid m")).expect("zero is a vertex")
    }

    /// Outgoing edges of vertex `i` as `(target, signed count)`.
    pub fn row(&self, i: usize) -> &[(usize, i64)] {
        &self.edges[i]
    }

    pub fn weight(&self, i: usize, j: usize) -> DyadicRational {
        let count = self.edges[i].iter().find(|(c, _)| *c == j).map_or(0, |e| e.1);
        DyadicRational::new(count, self.m + 1)
    }

    /// All nonzero weights keyed by vertex indices.
    pub fn weights(&self) -> BTreeMap<(usize, usize), DyadicRational> {
        let mut out = BTreeMap::new();
        for (i, row) in self.edges.iter().enumerate() {
            for &(j, c) in row {
                out.insert((i, j), DyadicRational::new(c, self.m + 1));
            }
        }
        out
    }

    /// Deterministic adjacency listing with `num/2^k` weights.
    pub fn export_adjacency(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "# m={} vertices={}", self.m, self.vertices.len());
        for (i, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(s, "v{i} {v}");
        }
        for (i, row) in self.edges.iter().enumerate() {
            for &(j, c) in row {
                let _ = writeln!(s, "v{i} -> v{j} {}", DyadicRational::new(c, self.m + 1));
            }
        }
        s
    }
}

/// Default cap on the number of vertices explored by [`build_graph`].
pub const GRAPH_VERTEX_CAP: usize = 1 << 20;

/// Breadth-first closure from the zero family under every `e`, with the
/// vertex bound, unit row sums and reachability of zero checked.
pub fn build_graph(m: u32) -> Result<GowersGraph> {
    check_m(m)?;
    let zero = OffsetFamily::zero(m)?;
    let moves = 1u32 << (m + 1);
    let mut seen: HashMap<OffsetFamily, usize> = HashMap::new();
    let mut order = vec![zero.clone()];
    seen.insert(zero, 0);
    let mut raw_edges: Vec<Vec<(usize, i64)>> = Vec::new();
    let mut queue = VecDeque::from([0usize]);
    while let Some(i) = queue.pop_front() {
        let a = order[i].clone();
        let mut counts: BTreeMap<usize, i64> = BTreeMap::new();
        for e in 0..moves {
            let b = delta_unchecked(&a, e);
            let j = match seen.get(&b) {
                Some(&j) => j,
                None => {
                    if order.len() >= GRAPH_VERTEX_CAP {
                        return Err(Error::BudgetExceeded {
                            estimate: order.len() as f64,
                            budget: GRAPH_VERTEX_CAP as f64,
                        });
                    }
                    let j = order.len();
                    seen.insert(b.clone(), j);
                    order.push(b);
                    queue.push_back(j);
                    j
                }
            };
            *counts.entry(j).or_default() += 1;
        }
        if raw_edges.len() <= i {
            raw_edges.resize(i + 1, Vec::new());
        }
        let s = sign_of(&a);
        raw_edges[i] = counts.into_iter().map(|(j, c)| (j, s * c)).collect();
    }
    // canonical order
    let mut perm: Vec<usize> = (0..order.len()).collect();
    perm.sort_by(|&x, &y| order[x].cmp(&order[y]));
    let mut new_index = vec![0usize; order.len()];
    for (new, &old) in perm.iter().enumerate() {
        new_index[old] = new;
    }
    let vertices: Vec<OffsetFamily> = perm.iter().map(|&old| order[old].clone()).collect();
    let edges: Vec<Vec<(usize, i64)>> = perm
        .iter()
        .map(|&old| {
            let mut row: Vec<(usize, i64)> = raw_edges[old].iter().map(|&(j, c)| (new_index[j], c)).collect();
            row.sort_unstable();
            row
        })
        .collect();
    let index = vertices.iter().cloned().enumerate().map(|(i, v)| (v, i)).collect();
    let graph = GowersGraph { m, vertices, index, edges };
    check_invariants(&graph)?;
    Ok(graph)
}

fn check_invariants(g: &GowersGraph) -> Result<()> {
    let bound = i64::from(g.m) + 1;
    let full = 1i64 << (g.m + 1);
    for (i, v) in g.vertices.iter().enumerate() {
        if v.max_abs() >= bound {
            return Err(Error::Internal(format!("vertex {v} violates max |a_eps| < m+1")));
        }
        let row_sum: i64 = g.edges[i].iter().map(|(_, c)| c.abs()).sum();
        if row_sum != full {
            return Err(Error::Internal(format!("row {v} has absolute weight {row_sum}/2^{}", g.m + 1)));
        }
        // the all-zero move halves every entry
        let mut cur = v.clone();
        let mut steps = 0;
        while !cur.is_zero() {
            cur = delta_unchecked(&cur, 0);
            steps += 1;
            if steps > 64 || g.index_of(&cur).is_none() {
                return Err(Error::Internal(format!("zero family not reached from {v}")));
            }
        }
    }
    Ok(())
}

/// Exact `A_rho(a)` by direct summation over `n, r_1, ..., r_m < 2^rho`.
pub fn gowers_bruteforce(m: u32, rho: u32, a: &OffsetFamily, budget: f64) -> Result<DyadicRational> {
    check_m(m)?;
    if a.m != m {
        return invalid("family has a different m");
    }
    let terms = 2f64.powi(((m + 1) * rho) as i32) * f64::from(1u32 << m);
    check_budget(terms, budget)?;
    if rho > 20 {
        return invalid("rho too large for direct summation");
    }
    let size = 1u64 << rho;
    let mask = size - 1;
    let corners = 1usize << m;
    let r_count = 1u64 << (u64::from(m) * u64::from(rho));
    let total: i64 = (0..r_count)
        .into_par_iter()
        .map(|code| {
            let offsets: Vec<u64> = (0..corners)
                .map(|eps| {
                    let mut o = a.entries[eps];
                    for i in 0..m as usize {
                        if eps >> i & 1 == 1 {
                            o += ((code >> (i as u64 * u64::from(rho))) & mask) as i64;
                        }
                    }
                    o as u64
                })
                .collect();
            let mut acc = 0i64;
            for n in 0..size {
                let parity = offsets
                    .iter()
                    .fold(0u32, |p, &o| p ^ (n.wrapping_add(o) & mask).count_ones());
                acc += 1 - 2 * i64::from(parity & 1);
            }
            acc
        })
        .sum();
    Ok(DyadicRational::new(total, (m + 1) * rho))
}

/// `A_rho` on every vertex, as numerators over `2^{rho(m+1)}`, by
/// `rho`-fold application of the recursion from `A_0 = 1`.
pub fn recursion_values(graph: &GowersGraph, rho: u32) -> Vec<DyadicRational> {
    let mut v: Vec<BigInt> = vec![BigInt::from(1); graph.len()];
    for _ in 0..rho {
        v = graph
            .edges
            .iter()
            .map(|row| row.iter().map(|&(j, c)| &v[j] * c).sum())
            .collect();
    }
    let e = rho * (graph.m + 1);
    v.into_iter().map(|x| DyadicRational::new(x, e)).collect()
}

/// `A_rho(a)` through the recursion; `a` must be a vertex of the graph.
pub fn recursion_value(rho: u32, a: &OffsetFamily, graph: &GowersGraph) -> Result<DyadicRational> {
    let Some(i) = graph.index_of(a) else {
        return invalid(format!("{a} is not reachable from the zero family"));
    };
    Ok(recursion_values(graph, rho).swap_remove(i))
}

/// Dense `w_k` numerators over the common denominator `2^{k(m+1)}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PathWeights {
    pub k: u32,
    pub exponent: u32,
    pub numerators: Vec<Vec<BigInt>>,
}

impl PathWeights {
    pub fn get(&self, i: usize, j: usize) -> DyadicRational {
        DyadicRational::new(self.numerators[i][j].clone(), self.exponent)
    }

    /// `max_a sum_b |w_k(a, b)|`.
    pub fn max_row_abs_sum(&self) -> DyadicRational {
        let best = self
            .numerators
            .iter()
            .map(|row| row.iter().map(|x| x.abs()).sum::<BigInt>())
            .max()
            .unwrap_or_default();
        DyadicRational::new(best, self.exponent)
    }
}

fn step_dense<T: Int>(graph: &GowersGraph, cur: &[Vec<T>]) -> Vec<Vec<T>> {
    let n = graph.len();
    cur.par_iter()
        .map(|row| {
            let mut out = vec![T::zero(); n];
            for (j, x) in row.iter().enumerate() {
                if x.is_zero() {
                    continue;
                }
                for &(l, c) in &graph.edges[j] {
                    out[l] = out[l].clone() + x.clone() * T::from_i64(c).expect("fits");
                }
            }
            out
        })
        .collect()
}

fn identity<T: Int>(n: usize) -> Vec<Vec<T>> {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { T::one() } else { T::zero() }).collect())
        .collect()
}

/// Exact `w_k` as a dense matrix.
pub fn path_weight_powers(graph: &GowersGraph, k: u32) -> Result<PathWeights> {
    if k == 0 {
        return invalid("path length k must be >= 1");
    }
    let mut cur = identity::<BigInt>(graph.len());
    for _ in 0..k {
        cur = step_dense(graph, &cur);
    }
    Ok(PathWeights { k, exponent: k * (graph.m + 1), numerators: cur })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Contraction {
    /// Smallest `k <= k_max` with `max_a sum_b |w_k(a,b)| < 1`.
    pub k_star: Option<u32>,
    /// The maximal row sum at `k_star`, or at `k_max` if none was found.
    pub c_star: DyadicRational,
    /// `max_a sum_b |w_k(a,b)|` for `k = 1..`.
    pub row_sums: Vec<DyadicRational>,
}

/// Default search cap for [`contraction_check`].
pub const DEFAULT_K_MAX: u32 = 20;

fn max_row_sum<T: Int>(m: &[Vec<T>]) -> T {
    m.iter()
        .map(|row| row.iter().fold(T::zero(), |acc, x| acc + x.abs()))
        .max()
        .unwrap_or_else(T::zero)
}

/// Searches `k = 1..=k_max` for a contracting path length. With
/// `extra_steps > 0`, keeps computing row sums past `k*` (used to check
/// monotonicity).
pub fn contraction_check_extended(graph: &GowersGraph, k_max: u32, extra_steps: u32) -> Result<Contraction> {
    if k_max == 0 {
        return invalid("k_max must be >= 1");
    }
    let bits_per_step = graph.m + 1;
    let mut row_sums = Vec::new();
    let mut k_star = None;
    // row sums of w_k numerators never exceed 2^{k(m+1)}
    let mut small = identity::<i128>(graph.len());
    let mut big: Option<Vec<Vec<BigInt>>> = None;
    let mut k = 0;
    let mut stop_at = k_max;
    while k < stop_at {
        k += 1;
        let num: BigInt = if big.is_none() && k * bits_per_step < 120 {
            small = step_dense(graph, &small);
            BigInt::from(max_row_sum(&small))
        } else {
            let cur = big.take().unwrap_or_else(|| {
                small.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect()
            });
            let next = step_dense(graph, &cur);
            let s = max_row_sum(&next);
            big = Some(next);
            s
        };
        let c = DyadicRational::new(num, k * bits_per_step);
        if k_star.is_none() && c < DyadicRational::one() {
            k_star = Some(k);
            stop_at = (k + extra_steps).max(k);
        }
        row_sums.push(c);
    }
    let c_star = match k_star {
        Some(k) => row_sums[k as usize - 1].clone(),
        None => row_sums.last().cloned().unwrap_or_else(DyadicRational::one),
    };
    Ok(Contraction { k_star, c_star, row_sums })
}

pub fn contraction_check(graph: &GowersGraph, k_max: u32) -> Result<Contraction> {
    contraction_check_extended(graph, k_max, 0)
}

/// `eta = -log2(c*) / k*`.
pub fn decay_rate(k_star: u32, c_star: &DyadicRational) -> Result<f64> {
    if k_star == 0 {
        return invalid("k* must be >= 1");
    }
    if c_star >= &DyadicRational::one() || c_star.is_negative() {
        return invalid(format!("c* must lie in [0, 1), got {c_star}"));
    }
    if c_star.is_zero() {
        return Ok(f64::INFINITY);
    }
    Ok(-log2_dyadic(c_star) / f64::from(k_star))
}

fn log2_dyadic(x: &DyadicRational) -> f64 {
    let n = x.numerator().abs();
    let shift = n.bits().saturating_sub(60);
    let top = (&n >> shift).to_f64().expect("fits");
    top.log2() + shift as f64 - f64::from(x.exponent())
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecayReport {
    pub eta: f64,
    /// `(rho, |A_rho(0)|)` for every checked `rho`.
    pub values: Vec<(u32, DyadicRational)>,
}

/// Checks `|A_rho(0)| <= c*^{floor(rho/k*)} <= (1/c*) 2^{-rho eta}` for
/// `rho = 0..=rho_max`.
pub fn verify_decay(graph: &GowersGraph, k_star: u32, c_star: &DyadicRational, rho_max: u32) -> Result<DecayReport> {
    let eta = decay_rate(k_star, c_star)?;
    let zero = graph.zero_index();
    let mut values = Vec::new();
    let mut v: Vec<BigInt> = vec![BigInt::from(1); graph.len()];
    let log_c = log2_dyadic(c_star);
    for rho in 0..=rho_max {
        if rho > 0 {
            v = graph.edges.iter().map(|row| row.iter().map(|&(j, c)| &v[j] * c).sum()).collect();
        }
        let a = DyadicRational::new(v[zero].abs(), rho * (graph.m + 1));
        let blocks = rho / k_star;
        let power = (0..blocks).fold(DyadicRational::one(), |acc, _| &acc * c_star);
        if a > power {
            return Err(Error::Internal(format!("|A_{rho}(0)| = {a} exceeds c*^{blocks} = {power}")));
        }
        let lhs = f64::from(blocks) * log_c;
        let rhs = -log_c - f64::from(rho) * eta;
        if lhs > rhs + 1e-9 * rhs.abs().max(1.0) {
            return Err(Error::Internal(format!("c*^{blocks} exceeds (1/c*) 2^(-{rho} eta)")));
        }
        values.push((rho, a));
    }
    Ok(DecayReport { eta, values })
}

/// The `e` moves from `a^(j)` to `a^(j+1)` for `j = 0..=m`, with the edge
/// weights; an empty move list means the step is not an edge.
pub fn konieczny_path(m: u32) -> Result<Vec<(OffsetFamily, OffsetFamily, Vec<u32>, DyadicRational)>> {
    (0..=m)
        .map(|j| {
            let a = OffsetFamily::konieczny(m, j)?;
            let b = OffsetFamily::konieczny(m, j + 1)?;
            let moves: Vec<u32> = (0..1u32 << (m + 1)).filter(|&e| delta_unchecked(&a, e) == b).collect();
            let w = edge_weight(&a, &b)?;
            Ok((a, b, moves, w))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fam(m: u32, v: &[i64]) -> OffsetFamily {
        OffsetFamily::new(m, v.to_vec()).unwrap()
    }

    #[test]
    fn delta_examples() {
        let z = OffsetFamily::zero(2).unwrap();
        assert_eq!(delta(&z, 0).unwrap(), z);
        // e = (e0, e1, e2) = (1, 1, 0): b_eps = eps_1
        assert_eq!(delta(&z, 0b011).unwrap(), fam(2, &[0, 1, 0, 1]));
        assert_eq!(delta(&z, 0b001).unwrap(), z);
        assert!(delta(&z, 0b1000).is_err());
        assert_eq!(delta(&fam(2, &[-3, 0, 0, 0]), 0).unwrap(), fam(2, &[-2, 0, 0, 0]));
    }

    #[test]
    fn weight_examples() {
        let z = OffsetFamily::zero(2).unwrap();
        assert_eq!(edge_weight(&z, &z).unwrap(), DyadicRational::new(1, 1));
        assert!(edge_weight(&z, &fam(2, &[3, 3, 3, 3])).unwrap().is_zero());
        let total = (0..8u32)
            .map(|e| delta(&z, e).unwrap())
            .collect::<std::collections::BTreeSet<_>>()
            .iter()
            .fold(DyadicRational::zero(), |acc, b| &acc + &edge_weight(&z, b).unwrap().abs());
        assert_eq!(total, DyadicRational::one());
    }

    #[test]
    fn konieczny_families() {
        assert_eq!(OffsetFamily::konieczny(2, 1).unwrap(), fam(2, &[0, 1, 0, 1]));
        assert_eq!(OffsetFamily::konieczny(2, 2).unwrap(), fam(2, &[0, 0, 0, 1]));
        assert!(OffsetFamily::konieczny(2, 3).unwrap().is_zero());
        let path = konieczny_path(2).unwrap();
        for (j, (_, _, moves, w)) in path.iter().enumerate() {
            assert!(!moves.is_empty(), "step {j}");
            assert_eq!(w.is_negative(), j == 2);
        }
    }

    #[test]
    fn small_bruteforce_values() {
        let z = OffsetFamily::zero(2).unwrap();
        assert_eq!(gowers_bruteforce(2, 0, &fam(2, &[5, -1, 2, 0]), 1e9).unwrap(), DyadicRational::one());
        assert_eq!(gowers_bruteforce(2, 1, &z, 1e9).unwrap(), DyadicRational::one());
        assert!(matches!(gowers_bruteforce(2, 12, &z, 1e6), Err(Error::BudgetExceeded { .. })));
    }

    #[test]
    fn graph_is_canonical_and_reproducible() {
        let g = build_graph(2).unwrap();
        let h = build_graph(2).unwrap();
        assert_eq!(g.export_adjacency(), h.export_adjacency());
        assert!(g.vertices().windows(2).all(|w| w[0] < w[1]));
        assert_eq!(g.vertices()[g.zero_index()], OffsetFamily::zero(2).unwrap());
        for (i, v) in g.vertices().iter().enumerate() {
            for (&(a, b), w) in g.weights().range((i, 0)..(i + 1, 0)) {
                assert_eq!(a, i);
                assert_eq!(w, &edge_weight(v, &g.vertices()[b]).unwrap());
            }
        }
    }

    #[test]
    fn recursion_rejects_unreachable() {
        let g = build_graph(2).unwrap();
        assert!(recursion_value(1, &fam(2, &[2, 2, 2, 2]), &g).is_err());
        assert_eq!(recursion_value(0, &OffsetFamily::zero(2).unwrap(), &g).unwrap(), DyadicRational::one());
    }

    #[test]
    fn decay_examples() {
        assert_eq!(decay_rate(1, &DyadicRational::new(1, 1)).unwrap(), 1.0);
        assert_eq!(decay_rate(2, &DyadicRational::new(1, 2)).unwrap(), 1.0);
        assert!(decay_rate(1, &DyadicRational::one()).is_err());
    }

    #[test]
    fn path_powers_compose() {
        let g = build_graph(2).unwrap();
        let w1 = path_weight_powers(&g, 1).unwrap();
        for (&(i, j), w) in &g.weights() {
            assert_eq!(&w1.get(i, j), w);
        }
        let w2 = path_weight_powers(&g, 2).unwrap();
        let w3 = path_weight_powers(&g, 3).unwrap();
        let w5 = path_weight_powers(&g, 5).unwrap();
        let n = g.len();
        for i in 0..n {
            for j in 0..n {
                let prod: BigInt = (0..n).map(|l| &w2.numerators[i][l] * &w3.numerators[l][j]).sum();
                assert_eq!(prod, w5.numerators[i][j]);
            }
        }
    }
}

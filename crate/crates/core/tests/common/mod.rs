//! Brute-force oracles shared by the integration tests. Nothing here calls
//! into the library's own ranking or quantizing code.

#![allow(dead_code)]

use ccdm::{Composition, SourceModel, Symbol};
use num_bigint::BigUint;
use num_rational::Ratio;
use rand::Rng;

/// Four-symbol target distribution of the reference divergence and rate series.
pub const TARGET: [f64; 4] = [0.0722, 0.1654, 0.3209, 0.4415];

pub struct SeriesPoint {
    pub n: u64,
    pub ndiv: f64,
    pub rate: f64,
    pub rate_bound: f64,
}

/// The published divergence, rate and lower-bound series on the 50-point grid.
pub fn reference_series() -> Vec<SeriesPoint> {
    include_str!("../data/reference_series.tsv")
        .lines()
        .filter(|l| !l.starts_with('#') && !l.trim().is_empty())
        .map(|l| {
            let f: Vec<&str> = l.split('\t').collect();
            SeriesPoint {
                n: f[0].parse().unwrap(),
                ndiv: f[1].parse().unwrap(),
                rate: f[2].parse().unwrap(),
                rate_bound: f[3].parse().unwrap(),
            }
        })
        .collect()
}

/// Every count vector of length `k` summing to `n`, restricted to `allowed`.
pub fn for_each_composition(n: u64, allowed: &[bool], f: &mut impl FnMut(&[u64])) {
    fn go(
        pos: usize,
        left: u64,
        allowed: &[bool],
        counts: &mut Vec<u64>,
        f: &mut impl FnMut(&[u64]),
    ) {
        if pos + 1 == allowed.len() {
            if left == 0 || allowed[pos] {
                counts.push(left);
                f(counts);
                counts.pop();
            }
            return;
        }
        let top = if allowed[pos] { left } else { 0 };
        for c in 0..=top {
            counts.push(c);
            go(pos + 1, left - c, allowed, counts, f);
            counts.pop();
        }
    }
    let mut counts = Vec::with_capacity(allowed.len());
    go(0, n, allowed, &mut counts, f);
}

/// `D(counts / n || p)` in bits, straight from the definition.
pub fn kl_of_counts(counts: &[u64], p: &[f64]) -> f64 {
    let n: u64 = counts.iter().sum();
    counts
        .iter()
        .zip(p)
        .filter(|(&c, _)| c > 0)
        .map(|(&c, &q)| {
            let f = c as f64 / n as f64;
            f * (f / q).ln() / std::f64::consts::LN_2
        })
        .sum()
}

/// Smallest divergence over all n-types supported on `supp(p)`.
pub fn brute_force_min_kl(p: &[f64], n: u64) -> f64 {
    let allowed: Vec<bool> = p.iter().map(|&q| q > 0.0).collect();
    let mut best = f64::INFINITY;
    for_each_composition(n, &allowed, &mut |c| best = best.min(kl_of_counts(c, p)));
    best
}

/// Multinomial coefficient from factorials.
pub fn multinomial(counts: &[u64]) -> BigUint {
    let fact = |x: u64| (1..=x).fold(BigUint::from(1u32), |acc, i| acc * i);
    let n: u64 = counts.iter().sum();
    counts.iter().fold(fact(n), |acc, &c| acc / fact(c))
}

/// All sequences of the composition in lexicographic order.
pub fn lexicographic_class(counts: &[u64]) -> Vec<Vec<Symbol>> {
    let mut seq: Vec<Symbol> = counts
        .iter()
        .enumerate()
        .flat_map(|(a, &c)| std::iter::repeat(a as Symbol).take(c as usize))
        .collect();
    let mut out = vec![seq.clone()];
    // classic next-permutation walk
    loop {
        let Some(i) = (1..seq.len()).rev().find(|&i| seq[i - 1] < seq[i]) else {
            return out;
        };
        let j = (i..seq.len()).rev().find(|&j| seq[j] > seq[i - 1]).unwrap();
        seq.swap(i - 1, j);
        seq[i..].reverse();
        out.push(seq.clone());
    }
}

/// Codebook by definition: codeword `j` is the class member with index
/// `ceil(j |T| / 2^m)`.
pub fn brute_force_codebook(counts: &[u64]) -> (u64, Vec<Vec<Symbol>>) {
    let class = lexicographic_class(counts);
    let size = class.len() as u64;
    let m = 63 - size.leading_zeros() as u64;
    let book = (0..1u64 << m)
        .map(|j| {
            let i = (j as u128 * size as u128).div_ceil(1u128 << m);
            class[i as usize].clone()
        })
        .collect();
    (m, book)
}

/// Walks the whole prefix tree of the composition under the
/// draw-without-replacement model and returns (leaves, whether every leaf
/// probability equals 1/leaves exactly).
pub fn path_probabilities_uniform(comp: &Composition) -> (u64, bool) {
    fn walk(model: &SourceModel, prob: Ratio<u64>, leaves: &mut Vec<Ratio<u64>>) {
        if model.remaining_total() == 0 {
            leaves.push(prob);
            return;
        }
        let next = model.next_symbol_distribution().unwrap();
        for (a, q) in next.into_iter().enumerate() {
            if *q.numer() == 0 {
                continue;
            }
            let mut child = model.clone();
            child.draw(a as Symbol).unwrap();
            walk(&child, prob * q, leaves);
        }
    }
    let mut leaves = Vec::new();
    walk(&SourceModel::new(comp), Ratio::from_integer(1), &mut leaves);
    let count = leaves.len() as u64;
    let uniform = leaves.iter().all(|&p| p == Ratio::new(1, count));
    (count, uniform)
}

/// Random distribution over `k` symbols; with `allow_zeros` some entries
/// may be zero.
pub fn random_distribution(rng: &mut impl Rng, k: usize, allow_zeros: bool) -> Vec<f64> {
    loop {
        let w: Vec<f64> = (0..k)
            .map(|_| {
                if allow_zeros && rng.gen_bool(0.15) {
                    0.0
                } else {
                    rng.gen_range(0.01..1.0)
                }
            })
            .collect();
        let s: f64 = w.iter().sum();
        if s > 0.0 {
            return w.into_iter().map(|x| x / s).collect();
        }
    }
}

/// `log2 x` for a large integer, to double precision.
pub fn log2_big(x: &BigUint) -> f64 {
    let bits = x.bits();
    let shift = bits.saturating_sub(60);
    let top = (x >> shift).to_u64_digits().first().copied().unwrap_or(0);
    (top as f64).log2() + shift as f64
}

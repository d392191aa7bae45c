//! Distributions, n-types and the closed-form performance of a constant
//! composition matcher: entropy, divergence, type-class sizes, input length
//! and the rate/divergence bounds.

use std::f64::consts::LN_2;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;

use crate::nat::Nat;
use crate::{Error, Result};

/// Tolerance on the probability sum accepted by [`Distribution::new`] and the text parser.
pub const SUM_TOLERANCE: f64 = 1e-9;

/// Largest supported alphabet; symbols are stored as bytes.
pub const MAX_ALPHABET: usize = 256;

/// Largest supported blocklength. Counts must fit the coder's word arithmetic.
pub const MAX_BLOCKLENGTH: u64 = u32::MAX as u64;

/// Output symbol, an index into the alphabet.
pub type Symbol = u8;

fn log2(x: f64) -> f64 {
    x.ln() / LN_2
}

/// Target probability vector over the alphabet `0..k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Validates `probs` and renormalizes it to sum to one.
    ///
    /// Entries must be finite and non-negative and their sum must be within
    /// [`SUM_TOLERANCE`] of one.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty alphabet".into()));
        }
        if probs.len() > MAX_ALPHABET {
            return Err(Error::InvalidDistribution(format!(
                "alphabet size {} exceeds {MAX_ALPHABET}",
                probs.len()
            )));
        }
        if let Some((i, p)) = probs
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_finite() || **p < 0.0)
        {
            return Err(Error::InvalidDistribution(format!(
                "entry {i} is {p}, probabilities must be finite and non-negative"
            )));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        let probs = if sum == 1.0 {
            probs
        } else {
            probs.into_iter().map(|p| p / sum).collect()
        };
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Alphabet size.
    pub fn k(&self) -> usize {
        self.probs.len()
    }

    /// Smallest strictly positive probability.
    pub fn min_positive(&self) -> f64 {
        self.probs
            .iter()
            .copied()
            .filter(|&p| p > 0.0)
            .fold(f64::INFINITY, f64::min)
    }

    /// Parses either a JSON array of numbers or one probability per line.
    /// Blank lines and lines starting with `#` are ignored in the line format.
    pub fn parse(text: &str) -> Result<Self> {
        let trimmed = text.trim_start();
        let probs: Vec<f64> = if trimmed.starts_with('[') {
            serde_json::from_str(trimmed)
                .map_err(|e| Error::InvalidDistribution(format!("bad JSON array: {e}")))?
        } else {
            trimmed
                .lines()
                .map(str::trim)
                .filter(|l| !l.is_empty() && !l.starts_with('#'))
                .map(|l| {
                    l.parse::<f64>()
                        .map_err(|e| Error::InvalidDistribution(format!("bad number {l:?}: {e}")))
                })
                .collect::<Result<_>>()?
        };
        Distribution::new(probs)
    }
}

impl FromStr for Distribution {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Distribution::parse(s)
    }
}

/// An n-type: how often each symbol occurs in every codeword.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Composition {
    counts: Vec<u64>,
    n: u64,
}

impl Composition {
    pub fn new(counts: Vec<u64>) -> Result<Self> {
        if counts.is_empty() || counts.len() > MAX_ALPHABET {
            return Err(Error::InvalidComposition(format!(
                "alphabet size must be in 1..={MAX_ALPHABET}, got {}",
                counts.len()
            )));
        }
        let n = counts
            .iter()
            .try_fold(0u64, |acc, &c| acc.checked_add(c))
            .filter(|&n| n <= MAX_BLOCKLENGTH)
            .ok_or_else(|| Error::InvalidComposition("blocklength too large".into()))?;
        if n == 0 {
            return Err(Error::InvalidComposition(
                "blocklength must be positive".into(),
            ));
        }
        Ok(Composition { counts, n })
    }

    /// Composition of a symbol sequence over an alphabet of size `k`.
    pub fn of_sequence(seq: &[Symbol], k: usize) -> Result<Self> {
        let mut counts = vec![0u64; k];
        for &s in seq {
            *counts
                .get_mut(s as usize)
                .ok_or(Error::CompositionMismatch)? += 1;
        }
        Composition::new(counts)
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Blocklength.
    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.counts.len()
    }

    /// The induced type `n_a / n`.
    pub fn empirical(&self) -> Distribution {
        let n = self.n as f64;
        Distribution {
            probs: self.counts.iter().map(|&c| c as f64 / n).collect(),
        }
    }

    /// Whether `seq` has exactly this composition.
    pub fn matches(&self, seq: &[Symbol]) -> bool {
        if seq.len() as u64 != self.n {
            return false;
        }
        let mut counts = vec![0u64; self.k()];
        for &s in seq {
            match counts.get_mut(s as usize) {
                Some(c) => *c += 1,
                None => return false,
            }
        }
        counts == self.counts
    }
}

impl fmt::Display for Composition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.counts.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A composition together with its type-class size and input length.
///
/// Immutable once built; cheap to share between coders and threads.
#[derive(Clone, Debug)]
pub struct CodeParams {
    composition: Composition,
    type_class_size: BigUint,
    size: Nat,
    m: u64,
}

impl CodeParams {
    pub fn new(composition: Composition) -> Self {
        let size = type_class_size_nat(&composition);
        let m = size.bits() - 1;
        CodeParams {
            type_class_size: size.to_biguint(),
            size,
            m,
            composition,
        }
    }

    /// Quantizes `dist` to blocklength `n` and derives the code from it.
    pub fn from_distribution(dist: &Distribution, n: u64) -> Result<Self> {
        Ok(CodeParams::new(quantize_to_ntype(dist, n)?))
    }

    pub fn composition(&self) -> &Composition {
        &self.composition
    }

    /// `|T|`, the number of sequences with this composition.
    pub fn type_class_size(&self) -> &BigUint {
        &self.type_class_size
    }

    pub(crate) fn size_nat(&self) -> &Nat {
        &self.size
    }

    /// Input length in bits, `floor(log2 |T|)`.
    pub fn m(&self) -> u64 {
        self.m
    }

    /// Output length in symbols.
    pub fn n(&self) -> u64 {
        self.composition.n()
    }

    pub fn k(&self) -> usize {
        self.composition.k()
    }

    /// Matching rate `m / n` in bits per symbol.
    pub fn rate(&self) -> f64 {
        self.m as f64 / self.n() as f64
    }
}

/// Entropy in bits; zero-probability entries contribute nothing.
pub fn entropy(dist: &Distribution) -> f64 {
    dist.probs
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * log2(p))
        .sum()
}

/// Informational (Kullback-Leibler) divergence `D(phat || p)` in bits.
pub fn kl_divergence(phat: &Distribution, p: &Distribution) -> Result<f64> {
    if phat.k() != p.k() {
        return Err(Error::AlphabetMismatch {
            left: phat.k(),
            right: p.k(),
        });
    }
    let mut d = 0.0;
    for (a, (&q, &r)) in phat.probs.iter().zip(&p.probs).enumerate() {
        if q > 0.0 {
            if r == 0.0 {
                return Err(Error::SupportViolation { symbol: a });
            }
            d += q * log2(q / r);
        }
    }
    Ok(d)
}

/// The n-type closest to `dist` in divergence.
///
/// Greedy marginal allocation: starting from all-zero counts, `n` times
/// increment the symbol whose count increase raises
/// `Σ c_a log2(c_a / (n p_a))` the least. The objective is separable and
/// convex in the counts, so the greedy allocation is optimal. Equal
/// increments go to the lowest symbol index; zero-probability symbols are
/// never allocated.
pub fn quantize_to_ntype(dist: &Distribution, n: u64) -> Result<Composition> {
    if n == 0 || n > MAX_BLOCKLENGTH {
        return Err(Error::InvalidComposition(format!(
            "blocklength must be in 1..={MAX_BLOCKLENGTH}, got {n}"
        )));
    }
    let nf = n as f64;
    let cost = |c: u64, p: f64| -> f64 {
        if c == 0 {
            0.0
        } else {
            c as f64 * log2(c as f64 / (nf * p))
        }
    };
    let mut counts = vec![0u64; dist.k()];
    // cached marginal cost of the next increment per symbol
    let mut next: Vec<f64> = dist
        .probs
        .iter()
        .map(|&p| if p > 0.0 { cost(1, p) } else { f64::INFINITY })
        .collect();
    for _ in 0..n {
        let mut best = 0;
        for a in 1..next.len() {
            if next[a] < next[best] {
                best = a;
            }
        }
        let p = dist.probs[best];
        counts[best] += 1;
        let c = counts[best];
        next[best] = cost(c + 1, p) - cost(c, p);
    }
    Composition::new(counts)
}

pub(crate) fn type_class_size_nat(comp: &Composition) -> Nat {
    // add one symbol at a time: T(c + e_a) = T(c) * (N + 1) / (c_a + 1)
    let mut size = Nat::from_u64(1);
    let mut total = 0u64;
    for &c in comp.counts() {
        for i in 1..=c {
            total += 1;
            size.mul_small(total);
            size.div_exact_small(i);
        }
    }
    size
}

/// Multinomial coefficient `n! / (n_0! ... n_{k-1}!)`, exactly.
pub fn type_class_size(comp: &Composition) -> BigUint {
    type_class_size_nat(comp).to_biguint()
}

/// Input length `m = floor(log2 |T|)`.
pub fn input_length(comp: &Composition) -> u64 {
    type_class_size_nat(comp).bits() - 1
}

/// Normalized divergence `D(P_out || P^n) / n = H(P̄) - m/n + D(P̄ || P)` in bits per symbol.
pub fn normalized_divergence(dist: &Distribution, comp: &Composition) -> Result<f64> {
    let phat = comp.empirical();
    let gap = kl_divergence(&phat, dist)?;
    let rate = input_length(comp) as f64 / comp.n() as f64;
    Ok(entropy(&phat) - rate + gap)
}

/// Upper bound `k / (min_a P(a) n^2)` on the divergence between the optimal
/// n-type and a strictly positive target.
pub fn quantization_gap_bound(dist: &Distribution, n: u64) -> Result<f64> {
    if let Some(a) = dist.probs.iter().position(|&p| p == 0.0) {
        return Err(Error::ZeroProbability { symbol: a });
    }
    let n = n as f64;
    Ok(dist.k() as f64 / (dist.min_positive() * n * n))
}

/// Lower bound `-k log2(n + k) / n + H - 1/n` on the matching rate.
pub fn rate_lower_bound(entropy_value: f64, n: u64, k: usize) -> f64 {
    let (n, k) = (n as f64, k as f64);
    -k * log2(n + k) / n + entropy_value - 1.0 / n
}

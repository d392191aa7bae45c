//! Lexicographic rank and unrank inside a type class, and the closed-form
//! index maps that define the matcher.
//!
//! Sequences are ordered lexicographically with symbol `0` smallest. Input
//! bits are read most significant first, so the block `b_0 … b_{m-1}` has
//! value `j = Σ b_t 2^(m-1-t)`. The matcher sends `j` to the codeword of
//! index `ceil(j |T| / 2^m)`; the dematcher inverts with
//! `floor(i 2^m / |T|)`.

use std::cmp::Ordering;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use crate::coder::SourceModel;
use crate::nat::{sign_of, Nat, Term};
use crate::typemath::{type_class_size_nat, CodeParams, Composition, Symbol};
use crate::{Error, Result};

/// Largest input length [`codebook`] enumerates by default.
pub const DEFAULT_ENUMERATION_LIMIT: u64 = 20;

/// Position of a sequence in the lexicographic order of its type class.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TypeIndex(pub BigUint);

impl TypeIndex {
    pub fn value(&self) -> &BigUint {
        &self.0
    }
}

impl From<u64> for TypeIndex {
    fn from(i: u64) -> Self {
        TypeIndex(BigUint::from(i))
    }
}

/// Remaining counts and the size of the type class they span.
struct Walk {
    model: SourceModel,
    size: Nat,
}

impl Walk {
    fn new(comp: &Composition, size: Nat) -> Self {
        Walk {
            model: SourceModel::new(comp),
            size,
        }
    }

    /// Appends `a`, returning how many completions of the old prefix sort
    /// before the new one.
    fn take(&mut self, a: usize, below: u64) -> (Nat, u64) {
        let split = self.model.split(a, below);
        self.size.div_exact_small(split.divisor);
        let quotient = self.size.clone();
        self.size.mul_small(split.count);
        self.model.draw(a as Symbol).expect("symbol is present");
        (quotient, split.below)
    }
}

/// Number of sequences of the type class that precede `seq`.
pub fn rank(seq: &[Symbol], comp: &Composition) -> Result<TypeIndex> {
    rank_in(seq, comp, type_class_size_nat(comp))
}

fn rank_in(seq: &[Symbol], comp: &Composition, size: Nat) -> Result<TypeIndex> {
    if !comp.matches(seq) {
        return Err(Error::CompositionMismatch);
    }
    let mut walk = Walk::new(comp, size);
    let mut index = Nat::zero();
    for &s in seq {
        let below = walk.model.below(s as usize);
        let (quotient, mult) = walk.take(s as usize, below);
        index.add_mul_small(&quotient, mult);
    }
    Ok(TypeIndex(index.to_biguint()))
}

/// The sequence of the type class at position `i`.
pub fn unrank(i: &TypeIndex, comp: &Composition) -> Result<Vec<Symbol>> {
    unrank_in(i, comp, type_class_size_nat(comp))
}

fn unrank_in(i: &TypeIndex, comp: &Composition, size: Nat) -> Result<Vec<Symbol>> {
    let mut walk = Walk::new(comp, size);
    let mut rest = Nat::from_biguint(i.value());
    if rest >= walk.size {
        return Err(Error::IndexOutOfRange);
    }
    let mut seq = Vec::with_capacity(comp.n() as usize);
    while walk.model.remaining_total() > 0 {
        let total = walk.model.remaining_total();
        // the last symbol whose first completion is at most `rest`
        let mut a = walk.model.first_present();
        let mut below = 0;
        while let Some(next) = walk.model.next_present(a) {
            let next_below = below + walk.model.remaining()[a];
            let reached = sign_of(&[
                Term::pos(&rest, total, 0),
                Term::neg(&walk.size, next_below, 0),
            ]);
            if reached == Ordering::Less {
                break;
            }
            a = next;
            below = next_below;
        }
        let (quotient, mult) = walk.take(a, below);
        rest.sub_mul_small(&quotient, mult);
        seq.push(a as Symbol);
    }
    Ok(seq)
}

/// Value of a bit block, first bit most significant.
pub fn bits_to_value(bits: &[bool]) -> BigUint {
    let mut bytes = vec![0u8; bits.len().div_ceil(8)];
    // right-align so the last bit lands in the least significant position
    let offset = bytes.len() * 8 - bits.len();
    for (t, &b) in bits.iter().enumerate() {
        if b {
            let p = offset + t;
            bytes[p / 8] |= 0x80 >> (p % 8);
        }
    }
    BigUint::from_bytes_be(&bytes)
}

/// The `m`-bit block of `value`, first bit most significant.
pub fn value_to_bits(value: &BigUint, m: u64) -> Vec<bool> {
    debug_assert!(value.bits() <= m);
    (0..m).rev().map(|t| value.bit(t)).collect()
}

fn check_len(bits: &[bool], m: u64) -> Result<()> {
    if bits.len() as u64 != m {
        return Err(Error::LengthMismatch {
            expected: m as usize,
            actual: bits.len(),
        });
    }
    Ok(())
}

/// Index of the codeword for input value `j`: `ceil(j |T| / 2^m)`.
pub fn encode_index(j: &BigUint, params: &CodeParams) -> TypeIndex {
    let m = params.m();
    let num = j * params.type_class_size() + ((BigUint::one() << m) - 1u32);
    TypeIndex(num >> m)
}

/// Input value for codeword index `i`: `floor(i 2^m / |T|)`.
pub fn decode_index(i: &TypeIndex, params: &CodeParams) -> BigUint {
    (i.value() << params.m()) / params.type_class_size()
}

/// Maps an `m`-bit block to its codeword.
pub fn ref_encode(bits: &[bool], params: &CodeParams) -> Result<Vec<Symbol>> {
    check_len(bits, params.m())?;
    let i = encode_index(&bits_to_value(bits), params);
    unrank_in(&i, params.composition(), params.size_nat().clone())
}

/// Maps a codeword back to its `m`-bit block.
///
/// In strict mode a member of the type class that no input maps to is
/// rejected with [`Error::NotACodeword`].
pub fn ref_decode(seq: &[Symbol], params: &CodeParams, strict: bool) -> Result<Vec<bool>> {
    let i = rank_in(seq, params.composition(), params.size_nat().clone())?;
    let j = decode_index(&i, params);
    if strict && encode_index(&j, params) != i {
        return Err(Error::NotACodeword);
    }
    Ok(value_to_bits(&j, params.m()))
}

/// All `2^m` codewords in input order, if `m` is at most [`DEFAULT_ENUMERATION_LIMIT`].
pub fn codebook(params: &CodeParams) -> Result<Vec<Vec<Symbol>>> {
    codebook_with_limit(params, DEFAULT_ENUMERATION_LIMIT)
}

pub fn codebook_with_limit(params: &CodeParams, limit: u64) -> Result<Vec<Vec<Symbol>>> {
    let m = params.m();
    if m > limit {
        return Err(Error::TooLarge { m, limit });
    }
    let mut j = BigUint::zero();
    let mut book = Vec::with_capacity(1 << m);
    for _ in 0..1u64 << m {
        let i = encode_index(&j, params);
        book.push(unrank_in(
            &i,
            params.composition(),
            params.size_nat().clone(),
        )?);
        j += 1u32;
    }
    Ok(book)
}

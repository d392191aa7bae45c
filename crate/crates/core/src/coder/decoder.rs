use std::cmp::Ordering;

use num_rational::BigRational;
use num_traits::Zero;

use super::{IntervalState, SourceModel, MAX_PENDING};
use crate::nat::{sign_of, Nat, Term};
use crate::typemath::{CodeParams, Symbol};
use crate::{Error, Result};

/// Incremental dematcher: consumes output symbols and emits input bits as
/// soon as they are certain.
///
/// Mirrors [`super::Encoder`]. The symbols seen so far cover the codeword
/// indices `[R, R + C)`; the emitted bits with value `J` cover
/// `[J |T| / 2^t, (J + 1) |T| / 2^t)`. The state keeps `C` and the scaled
/// offset `V = R 2^t - J |T|` of the prefix inside the input interval.
#[derive(Clone, Debug)]
pub struct Decoder<'a> {
    params: &'a CodeParams,
    model: SourceModel,
    completions: Nat,
    offset: Nat,
    folded: u64,
    pending: u64,
    pending_len: u32,
    bits: Vec<bool>,
}

impl<'a> Decoder<'a> {
    pub fn new(params: &'a CodeParams) -> Self {
        let mut dec = Decoder {
            params,
            model: SourceModel::new(params.composition()),
            completions: params.size_nat().clone(),
            offset: Nat::zero(),
            folded: 0,
            pending: 0,
            pending_len: 0,
            bits: Vec::with_capacity(params.m() as usize),
        };
        dec.emit_certain();
        dec
    }

    /// Bits emitted so far.
    pub fn emitted(&self) -> &[bool] {
        &self.bits
    }

    /// Output model after the consumed symbols.
    pub fn model(&self) -> &SourceModel {
        &self.model
    }

    /// The output interval rescaled so that the emitted input prefix spans `[0, 1)`.
    ///
    /// Once all symbols are in, only the codeword's lower border is tracked
    /// and the width is reported as zero.
    pub fn output_interval(&self) -> IntervalState {
        let size = self.params.size_nat().to_biguint();
        let low = (self.offset.to_biguint() << self.pending_len) - size.clone() * self.pending;
        let t = self.folded + self.pending_len as u64;
        let width = if self.model.remaining_total() == 0 {
            BigRational::zero()
        } else {
            BigRational::new(
                (self.completions.to_biguint() << t).into(),
                size.clone().into(),
            )
        };
        IntervalState {
            low: BigRational::new(low.into(), size.into()),
            width,
        }
    }

    /// Consumes one output symbol and returns the bits it made certain.
    pub fn push_symbol(&mut self, s: Symbol) -> Result<&[bool]> {
        let a = s as usize;
        let total = self.model.remaining_total();
        if total == 0 || a >= self.model.remaining().len() || self.model.remaining()[a] == 0 {
            return Err(Error::CompositionMismatch);
        }
        let split = self.model.split(a, self.model.below(a));
        self.completions.split_exact::<false>(
            split.divisor,
            split.count,
            &mut self.offset,
            split.below,
            self.folded,
        );
        self.model.draw(s)?;
        let start = self.bits.len();
        self.emit_certain();
        Ok(&self.bits[start..])
    }

    fn fold(&mut self) {
        self.offset.shl_small(self.pending_len);
        self.offset
            .sub_mul_small(self.params.size_nat(), self.pending);
        self.folded += self.pending_len as u64;
        self.pending = 0;
        self.pending_len = 0;
    }

    fn push_pending(&mut self, bit: bool) {
        self.pending = self.pending << 1 | bit as u64;
        self.pending_len += 1;
        self.bits.push(bit);
        if self.pending_len == MAX_PENDING {
            self.fold();
        }
    }

    fn emit_certain(&mut self) {
        let m = self.params.m();
        // once the codeword is complete only its lower border matters
        let point = self.model.remaining_total() == 0;
        let size = self.params.size_nat();
        while (self.bits.len() as u64) < m {
            let r = self.pending_len as u64;
            let midpoint = 2 * self.pending + 1;
            let upper = sign_of(&[
                Term::pos(&self.offset, 1, r + 1),
                Term::neg(size, midpoint, 0),
            ]);
            if upper != Ordering::Less {
                self.push_pending(true);
                continue;
            }
            let lower = point
                || sign_of(&[
                    Term::pos(&self.offset, 1, r + 1),
                    Term::pos(&self.completions, 1, self.folded + r + 1),
                    Term::neg(size, midpoint, 0),
                ]) != Ordering::Greater;
            if !lower {
                return;
            }
            self.push_pending(false);
        }
    }

    /// Returns the input block once all `n` symbols are in.
    ///
    /// In strict mode a sequence that no input maps to is rejected.
    pub fn finish(mut self, strict: bool) -> Result<Vec<bool>> {
        if self.model.remaining_total() > 0 {
            return Err(Error::CompositionMismatch);
        }
        self.fold();
        // codewords sit less than one index above their block's lower border
        if strict && self.offset.bits() > self.params.m() {
            return Err(Error::NotACodeword);
        }
        Ok(self.bits)
    }
}

/// Maps a codeword back to its `m`-bit block with the streaming dematcher.
pub fn decode_stream(seq: &[Symbol], params: &CodeParams, strict: bool) -> Result<Vec<bool>> {
    if seq.len() as u64 != params.n() {
        return Err(Error::CompositionMismatch);
    }
    let mut dec = Decoder::new(params);
    for &s in seq {
        dec.push_symbol(s)?;
    }
    dec.finish(strict)
}

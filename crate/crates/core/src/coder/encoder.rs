use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;

use super::{IntervalState, SourceModel, MAX_PENDING};
use crate::nat::{sign_of, Nat, Term};
use crate::typemath::{CodeParams, Symbol};
use crate::{Error, Result};

/// Incremental matcher: consumes input bits and emits output symbols as
/// soon as they are certain.
///
/// Positions are measured in codeword indices. The emitted prefix covers the
/// indices `[R, R + C)`; after `t` bits with value `J` the input interval is
/// `[J |T| / 2^t, (J + 1) |T| / 2^t)`. The state keeps `C` and the scaled
/// offset `A = J |T| - R 2^t` of the input interval inside the prefix. Bits
/// are buffered in a machine word and folded into `A` in batches. Without
/// its pending bits `A` can dip below zero, but never below `-|T|`, so it is
/// stored as `B = A + |T|`.
#[derive(Clone, Debug)]
pub struct Encoder<'a> {
    params: &'a CodeParams,
    model: SourceModel,
    completions: Nat,
    offset: Nat,
    /// bits folded into `offset`
    folded: u64,
    pending: u64,
    pending_len: u32,
    consumed: u64,
    /// symbol whose subinterval holds the lower border, and the remaining
    /// count below it
    candidate: usize,
    candidate_base: u64,
    output: Vec<Symbol>,
}

impl<'a> Encoder<'a> {
    pub fn new(params: &'a CodeParams) -> Self {
        let model = SourceModel::new(params.composition());
        let candidate = model.first_present();
        Encoder {
            params,
            model,
            completions: params.size_nat().clone(),
            offset: params.size_nat().clone(),
            folded: 0,
            pending: 0,
            pending_len: 0,
            consumed: 0,
            candidate,
            candidate_base: 0,
            output: Vec::with_capacity(params.n() as usize),
        }
    }

    /// Number of input bits consumed so far.
    pub fn consumed(&self) -> u64 {
        self.consumed
    }

    /// Symbols emitted so far.
    pub fn emitted(&self) -> &[Symbol] {
        &self.output
    }

    /// Output model after the emitted symbols.
    pub fn model(&self) -> &SourceModel {
        &self.model
    }

    /// The input interval rescaled so that the emitted prefix spans `[0, 1)`.
    pub fn input_interval(&self) -> IntervalState {
        let t = self.folded + self.pending_len as u64;
        let size = self.params.size_nat().to_biguint();
        let low = (BigInt::from(self.offset.to_biguint()) << self.pending_len)
            - BigInt::from(size.clone()) * ((1u64 << self.pending_len) - self.pending);
        let denom = BigInt::from(self.completions.to_biguint()) << t;
        IntervalState {
            low: BigRational::new(low, denom.clone()),
            width: BigRational::new(size.into(), denom),
        }
    }

    /// Consumes one input bit and returns the symbols it made certain.
    pub fn push_bit(&mut self, bit: bool) -> Result<&[Symbol]> {
        let m = self.params.m();
        if self.consumed == m {
            return Err(Error::LengthMismatch {
                expected: m as usize,
                actual: m as usize + 1,
            });
        }
        self.consumed += 1;
        self.pending = self.pending << 1 | bit as u64;
        self.pending_len += 1;
        if self.pending_len == MAX_PENDING {
            self.fold();
        }
        let start = self.output.len();
        // a one raises the lower border, a zero lowers the upper border
        self.emit_certain(bit, !bit);
        Ok(&self.output[start..])
    }

    fn fold(&mut self) {
        // B 2^r + (w + 1 - 2^r) |T|
        let unset = (1u64 << self.pending_len) - 1 - self.pending;
        self.offset.shl_small(self.pending_len);
        self.offset.sub_mul_small(self.params.size_nat(), unset);
        self.folded += self.pending_len as u64;
        self.pending = 0;
        self.pending_len = 0;
    }

    /// Sign of `n' * (input border + extra widths) - cum * C`, all scaled by `2^t`.
    fn border_vs(&self, extra: u64, cum: u64) -> Ordering {
        let total = self.model.remaining_total();
        let below_top = (1u64 << self.pending_len) - self.pending - extra;
        sign_of(&[
            Term::pos(&self.offset, total, self.pending_len as u64),
            Term::neg(self.params.size_nat(), total * below_top, 0),
            Term::neg(
                &self.completions,
                cum,
                self.folded + self.pending_len as u64,
            ),
        ])
    }

    /// Emits while the input interval fits inside one symbol's subinterval.
    ///
    /// Between calls the candidate is up to date and nothing is emittable,
    /// so only the checks that a moved border can change are repeated.
    fn emit_certain(&mut self, lower_moved: bool, upper_moved: bool) {
        let (mut lower_moved, mut upper_moved) = (lower_moved, upper_moved);
        while self.model.remaining_total() > 0 {
            // the lower border only moves up, so the candidate only advances
            let mut advanced = false;
            while lower_moved {
                let Some(next) = self.model.next_present(self.candidate) else {
                    break;
                };
                let base = self.candidate_base + self.model.remaining()[self.candidate];
                if self.border_vs(0, base) == Ordering::Less {
                    break;
                }
                self.candidate = next;
                self.candidate_base = base;
                advanced = true;
            }
            let a = self.candidate;
            let count = self.model.remaining()[a];
            let forced = count == self.model.remaining_total();
            if !forced
                && (!(upper_moved || advanced)
                    || self.border_vs(1, self.candidate_base + count) == Ordering::Greater)
            {
                return;
            }
            self.take(a);
            (lower_moved, upper_moved) = (true, true);
        }
    }

    fn take(&mut self, a: usize) {
        let split = self.model.split(a, self.candidate_base);
        self.completions.split_exact::<true>(
            split.divisor,
            split.count,
            &mut self.offset,
            split.below,
            self.folded,
        );
        self.model.draw(a as Symbol).expect("candidate is present");
        self.output.push(a as Symbol);
        if self.model.remaining_total() > 0 {
            self.candidate = self.model.first_present();
            self.candidate_base = 0;
        }
    }

    /// Completes the codeword once all `m` bits are in.
    ///
    /// The codeword is the one with the smallest lower border not below the
    /// input interval's lower border.
    pub fn finish(mut self) -> Result<Vec<Symbol>> {
        let m = self.params.m();
        if self.consumed != m {
            return Err(Error::LengthMismatch {
                expected: m as usize,
                actual: self.consumed as usize,
            });
        }
        self.fold();
        // index of the codeword inside the prefix: ceil(A / 2^m)
        let mut rest = std::mem::take(&mut self.offset);
        rest.sub_mul_small(self.params.size_nat(), 1);
        let round_up = rest.low_bits_nonzero(m);
        rest.shr_bits(m);
        if round_up {
            rest.add_small(1);
        }
        while self.model.remaining_total() > 0 {
            let total = self.model.remaining_total();
            let mut a = self.model.first_present();
            let mut base = 0;
            while let Some(next) = self.model.next_present(a) {
                let next_base = base + self.model.remaining()[a];
                let at_or_above = sign_of(&[
                    Term::pos(&rest, total, 0),
                    Term::neg(&self.completions, next_base, 0),
                ]);
                if at_or_above == Ordering::Less {
                    break;
                }
                a = next;
                base = next_base;
            }
            let split = self.model.split(a, base);
            self.completions.div_exact_small(split.divisor);
            rest.sub_mul_small(&self.completions, split.below);
            self.completions.mul_small(split.count);
            self.model.draw(a as Symbol).expect("symbol is present");
            self.output.push(a as Symbol);
        }
        Ok(self.output)
    }
}

/// Maps an `m`-bit block to its codeword with the streaming matcher.
pub fn encode_stream(bits: &[bool], params: &CodeParams) -> Result<Vec<Symbol>> {
    if bits.len() as u64 != params.m() {
        return Err(Error::LengthMismatch {
            expected: params.m() as usize,
            actual: bits.len(),
        });
    }
    let mut enc = Encoder::new(params);
    for &b in bits {
        enc.push_bit(b)?;
    }
    enc.finish()
}

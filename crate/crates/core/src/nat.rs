//! Minimal little-endian natural numbers for the coder hot paths.
//!
//! The streaming coder and the reference ranker spend nearly all of their time
//! multiplying or exactly dividing a large integer by a word, or adding a
//! shifted copy of one large integer into another. `num-bigint` has no exact
//! (Hensel) division and no shifted in-place accumulation, so those few
//! operations live here. Everything else goes through [`BigUint`].

use std::cmp::Ordering;

use num_bigint::{BigInt, BigUint, Sign};
use num_traits::Zero;

/// Non-negative integer, little-endian 64-bit limbs, no trailing zero limbs.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct Nat {
    limbs: Vec<u64>,
}

impl Nat {
    pub(crate) fn zero() -> Self {
        Self::default()
    }

    pub(crate) fn from_u64(x: u64) -> Self {
        let mut n = Self::zero();
        if x != 0 {
            n.limbs.push(x);
        }
        n
    }

    pub(crate) fn from_biguint(x: &BigUint) -> Self {
        let mut n = Nat {
            limbs: x.iter_u64_digits().collect(),
        };
        n.normalize();
        n
    }

    pub(crate) fn to_biguint(&self) -> BigUint {
        let mut digits = Vec::with_capacity(self.limbs.len() * 2);
        for &l in &self.limbs {
            digits.push(l as u32);
            digits.push((l >> 32) as u32);
        }
        BigUint::new(digits)
    }

    pub(crate) fn is_zero(&self) -> bool {
        self.limbs.is_empty()
    }

    /// Number of significant bits; zero has none.
    pub(crate) fn bits(&self) -> u64 {
        match self.limbs.last() {
            None => 0,
            Some(&top) => 64 * (self.limbs.len() as u64 - 1) + (64 - top.leading_zeros() as u64),
        }
    }

    fn normalize(&mut self) {
        while self.limbs.last() == Some(&0) {
            self.limbs.pop();
        }
    }

    fn limb(&self, i: usize) -> u64 {
        self.limbs.get(i).copied().unwrap_or(0)
    }

    /// `self *= m`
    pub(crate) fn mul_small(&mut self, m: u64) {
        if m == 0 {
            self.limbs.clear();
            return;
        }
        let mut carry = 0u64;
        for l in self.limbs.as_mut_slice() {
            (*l, carry) = mul_add(*l, m, carry);
        }
        if carry != 0 {
            self.limbs.push(carry);
        }
    }

    /// `self /= d` where `d` is known to divide `self`.
    ///
    /// Hensel (low-to-high) division by the odd part of `d` costs a
    /// multiplication per limb instead of a hardware division.
    pub(crate) fn div_exact_small(&mut self, d: u64) {
        assert!(d != 0, "division by zero");
        let tz = d.trailing_zeros();
        let odd = d >> tz;
        let inv = inverse_mod_word(odd);
        let mut borrow = 0u64;
        for l in self.limbs.iter_mut() {
            let (x, b) = l.overflowing_sub(borrow);
            let q = x.wrapping_mul(inv);
            borrow = mul_hi(q, odd).wrapping_add(b as u64);
            *l = q;
        }
        debug_assert_eq!(borrow, 0, "inexact division");
        if tz > 0 {
            self.shr_bits(tz as u64);
        } else {
            self.normalize();
        }
    }

    /// `self += x`
    pub(crate) fn add_small(&mut self, x: u64) {
        let mut carry = x;
        for l in self.limbs.iter_mut() {
            let (s, c) = l.overflowing_add(carry);
            *l = s;
            if !c {
                return;
            }
            carry = 1;
        }
        if carry != 0 {
            self.limbs.push(carry);
        }
    }

    /// `self >>= s` (floor).
    pub(crate) fn shr_bits(&mut self, s: u64) {
        let words = (s / 64) as usize;
        let bits = (s % 64) as u32;
        if words >= self.limbs.len() {
            self.limbs.clear();
            return;
        }
        self.limbs.drain(..words);
        if bits > 0 {
            let l = self.limbs.as_mut_slice();
            for i in 1..l.len() {
                l[i - 1] = (l[i - 1] >> bits) | (l[i] << (64 - bits));
            }
            if let Some(top) = l.last_mut() {
                *top >>= bits;
            }
        }
        self.normalize();
    }

    /// `self <<= s` for `s < 64`.
    pub(crate) fn shl_small(&mut self, s: u32) {
        debug_assert!(s < 64);
        if s == 0 || self.is_zero() {
            return;
        }
        let mut carry = 0u64;
        for l in self.limbs.iter_mut() {
            let next = *l >> (64 - s);
            *l = (*l << s) | carry;
            carry = next;
        }
        if carry != 0 {
            self.limbs.push(carry);
        }
    }

    /// `self += (other * m) << shift`
    pub(crate) fn add_mul_shifted(&mut self, other: &Nat, m: u64, shift: u64) {
        if m == 0 || other.is_zero() {
            return;
        }
        let words = (shift / 64) as usize;
        let span = words + other.limbs.len() + 2;
        if self.limbs.len() < span {
            self.limbs.resize(span, 0);
        }
        let dst = &mut self.limbs.as_mut_slice()[words..];
        let mut product = ShiftedProduct::new(m, (shift % 64) as u32);
        let mut carry = false;
        let (body, rest) = dst.split_at_mut(other.limbs.len());
        for (d, &l) in body.iter_mut().zip(other.limbs.as_slice()) {
            (*d, carry) = add_carry(*d, product.next(l), carry);
        }
        let (tail, rest) = rest.split_at_mut(2);
        for d in tail {
            (*d, carry) = add_carry(*d, product.next(0), carry);
        }
        if carry {
            let mut done = false;
            for d in rest.iter_mut() {
                (*d, carry) = add_carry(*d, 0, true);
                if !carry {
                    done = true;
                    break;
                }
            }
            if !done {
                self.limbs.push(1);
            }
        }
        self.normalize();
    }

    /// `self -= (other * m) << shift`; the caller guarantees the result is non-negative.
    pub(crate) fn sub_mul_shifted(&mut self, other: &Nat, m: u64, shift: u64) {
        if m == 0 || other.is_zero() {
            return;
        }
        let words = (shift / 64) as usize;
        let span = words + other.limbs.len() + 2;
        if self.limbs.len() < span {
            self.limbs.resize(span, 0);
        }
        let dst = &mut self.limbs.as_mut_slice()[words..];
        let mut product = ShiftedProduct::new(m, (shift % 64) as u32);
        let mut borrow = false;
        let (body, rest) = dst.split_at_mut(other.limbs.len());
        for (d, &l) in body.iter_mut().zip(other.limbs.as_slice()) {
            (*d, borrow) = sub_borrow(*d, product.next(l), borrow);
        }
        let (tail, rest) = rest.split_at_mut(2);
        for d in tail {
            (*d, borrow) = sub_borrow(*d, product.next(0), borrow);
        }
        if borrow {
            for d in rest.iter_mut() {
                (*d, borrow) = sub_borrow(*d, 0, true);
                if !borrow {
                    break;
                }
            }
        }
        assert!(!borrow, "negative result in Nat::sub_mul_shifted");
        self.normalize();
    }

    /// With `q = self / d` (exact): `acc ± (q * below) << shift` and
    /// `self = q * count`, in a single pass over `self`. Subtraction must not
    /// underflow.
    pub(crate) fn split_exact<const SUB: bool>(
        &mut self,
        d: u64,
        count: u64,
        acc: &mut Nat,
        below: u64,
        shift: u64,
    ) {
        if below == 0 || self.is_zero() {
            self.div_exact_small(d);
            self.mul_small(count);
            return;
        }
        assert!(d != 0, "division by zero");
        let tz = d.trailing_zeros();
        let odd = d >> tz;
        let inv = inverse_mod_word(odd);
        let n = self.limbs.len();
        let words = (shift / 64) as usize;
        if acc.limbs.len() < words + n + 2 {
            acc.limbs.resize(words + n + 2, 0);
        }
        let src = self.limbs.as_mut_slice();
        let dst = &mut acc.limbs.as_mut_slice()[words..];
        let (body, rest) = dst.split_at_mut(n);
        let mut product = ShiftedProduct::new(below, (shift % 64) as u32);
        let (mut borrow, mut carry, mut flag) = (0u64, 0u64, false);
        // quotient limbs leave the odd-part division one step late so the
        // power of two can be shifted out on the fly
        let mut prev = src[0].wrapping_mul(inv);
        borrow = borrow.wrapping_add(mul_hi(prev, odd));
        for i in 1..n {
            let (x, b) = src[i].overflowing_sub(borrow);
            let q = x.wrapping_mul(inv);
            borrow = mul_hi(q, odd).wrapping_add(b as u64);
            let out = (prev >> tz) | ((q << 1) << (63 - tz));
            (src[i - 1], carry) = mul_add(out, count, carry);
            (body[i - 1], flag) = acc_step::<SUB>(body[i - 1], product.next(out), flag);
            prev = q;
        }
        debug_assert_eq!(borrow, 0, "inexact division");
        let out = prev >> tz;
        (src[n - 1], carry) = mul_add(out, count, carry);
        (body[n - 1], flag) = acc_step::<SUB>(body[n - 1], product.next(out), flag);
        let (tail, rest) = rest.split_at_mut(2);
        for d in tail {
            (*d, flag) = acc_step::<SUB>(*d, product.next(0), flag);
        }
        for d in rest {
            if !flag {
                break;
            }
            (*d, flag) = acc_step::<SUB>(*d, 0, true);
        }
        if flag {
            assert!(!SUB, "negative result in Nat::split_exact");
            acc.limbs.push(1);
        }
        if carry != 0 {
            self.limbs.push(carry);
        }
        self.normalize();
        acc.normalize();
    }

    /// `self += other * m`
    pub(crate) fn add_mul_small(&mut self, other: &Nat, m: u64) {
        self.add_mul_shifted(other, m, 0);
    }

    /// `self -= other * m`; the caller guarantees the result is non-negative.
    pub(crate) fn sub_mul_small(&mut self, other: &Nat, m: u64) {
        self.sub_mul_shifted(other, m, 0);
    }

    /// `floor(self / 2^s)` as a `u128` (must fit), and whether that floor is exact.
    pub(crate) fn top_bits(&self, s: u64) -> (u128, bool) {
        let words = (s / 64) as usize;
        let bits = (s % 64) as u32;
        let limbs = self.limbs.as_slice();
        let at = |i: usize| limbs.get(i).copied().unwrap_or(0);
        let (l0, l1, l2) = (at(words), at(words + 1), at(words + 2));
        let (lo, hi) = if bits == 0 {
            (l0, l1)
        } else {
            // three limbs cover 128 bits at any residual offset
            (
                l0 >> bits | l1 << (64 - bits),
                l1 >> bits | l2 << (64 - bits),
            )
        };
        let exact = (bits == 0 || l0 & ((1u64 << bits) - 1) == 0)
            && limbs[..words.min(limbs.len())].iter().all(|&l| l == 0);
        (lo as u128 | (hi as u128) << 64, exact)
    }

    /// The value as a `u128`, if it fits.
    pub(crate) fn to_u128(&self) -> Option<u128> {
        match self.limbs.len() {
            0 => Some(0),
            1 => Some(self.limbs[0] as u128),
            2 => Some(self.limbs[0] as u128 | (self.limbs[1] as u128) << 64),
            _ => None,
        }
    }

    /// Whether any of the low `s` bits is set.
    pub(crate) fn low_bits_nonzero(&self, s: u64) -> bool {
        let words = (s / 64) as usize;
        let bits = (s % 64) as u32;
        self.limbs.iter().take(words).any(|&l| l != 0)
            || (bits > 0 && self.limb(words) & ((1u64 << bits) - 1) != 0)
    }
}

impl Ord for Nat {
    fn cmp(&self, other: &Self) -> Ordering {
        self.limbs
            .len()
            .cmp(&other.limbs.len())
            .then_with(|| self.limbs.iter().rev().cmp(other.limbs.iter().rev()))
    }
}

impl PartialOrd for Nat {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn mul_add(a: u64, b: u64, c: u64) -> (u64, u64) {
    let p = (a as u128).wrapping_mul(b as u128).wrapping_add(c as u128);
    (p as u64, (p >> 64) as u64)
}

fn mul_hi(a: u64, b: u64) -> u64 {
    ((a as u128).wrapping_mul(b as u128) >> 64) as u64
}

fn add_carry(a: u64, b: u64, carry: bool) -> (u64, bool) {
    let (x, c1) = a.overflowing_add(b);
    let (x, c2) = x.overflowing_add(carry as u64);
    (x, c1 | c2)
}

fn sub_borrow(a: u64, b: u64, borrow: bool) -> (u64, bool) {
    let (x, b1) = a.overflowing_sub(b);
    let (x, b2) = x.overflowing_sub(borrow as u64);
    (x, b1 | b2)
}

fn acc_step<const SUB: bool>(a: u64, b: u64, flag: bool) -> (u64, bool) {
    if SUB {
        sub_borrow(a, b, flag)
    } else {
        add_carry(a, b, flag)
    }
}

/// Streams the limbs of `(limbs * m) << bits` for `bits < 64`, lowest first.
struct ShiftedProduct {
    m: u64,
    bits: u32,
    carry: u64,
    prev: u64,
}

impl ShiftedProduct {
    fn new(m: u64, bits: u32) -> Self {
        ShiftedProduct {
            m,
            bits,
            carry: 0,
            prev: 0,
        }
    }

    #[inline(always)]
    fn next(&mut self, limb: u64) -> u64 {
        let (v, carry) = mul_add(limb, self.m, self.carry);
        self.carry = carry;
        // two-step shift so that bits == 0 needs no branch
        let out = (v << self.bits) | ((self.prev >> 1) >> (63 - self.bits));
        self.prev = v;
        out
    }
}

/// Inverse of an odd word modulo 2^64 by Newton iteration.
fn inverse_mod_word(d: u64) -> u64 {
    debug_assert!(d & 1 == 1);
    // d is its own inverse modulo 8; each step doubles the correct bits
    let mut inv = d;
    for _ in 0..5 {
        inv = inv.wrapping_mul(2u64.wrapping_sub(d.wrapping_mul(inv)));
    }
    inv
}

/// One summand `±mult * (value << shift)` of a [`sign_of`] query.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Term<'a> {
    pub(crate) value: &'a Nat,
    pub(crate) negative: bool,
    pub(crate) mult: u64,
    pub(crate) shift: u64,
}

impl<'a> Term<'a> {
    pub(crate) fn pos(value: &'a Nat, mult: u64, shift: u64) -> Self {
        Term {
            value,
            negative: false,
            mult,
            shift,
        }
    }

    pub(crate) fn neg(value: &'a Nat, mult: u64, shift: u64) -> Self {
        Term {
            value,
            negative: true,
            mult,
            shift,
        }
    }

    fn is_zero(&self) -> bool {
        self.mult == 0 || self.value.is_zero()
    }

    /// Exclusive upper bound on log2 of the term's magnitude.
    fn top(&self) -> u64 {
        self.value.bits() + self.shift + (64 - self.mult.leading_zeros() as u64)
    }
}

/// Width of the window the fast path evaluates, in bits.
const WINDOW: u64 = 120;

/// Sign of `Σ ±mult·(value << shift)` over at most four terms.
///
/// Every term is truncated to a common 120-bit window below the largest
/// term's leading bit; the sum of the truncation errors is bounded by the
/// multipliers, so the window decides unless the true sum is within that
/// bound of zero. Undecided cases are evaluated exactly.
pub(crate) fn sign_of(terms: &[Term<'_>]) -> Ordering {
    debug_assert!(terms.len() <= 4);
    let mut tops = [0u64; 4];
    let mut top = 0;
    for (t, slot) in terms.iter().zip(tops.iter_mut()) {
        if !t.is_zero() {
            *slot = t.top();
            top = top.max(*slot);
        }
    }
    if top == 0 {
        return Ordering::Equal;
    }
    let cut = top.saturating_sub(WINDOW);
    let mut base: i128 = 0;
    let mut pos_slack: i128 = 0;
    let mut neg_slack: i128 = 0;
    for (t, &t_top) in terms.iter().zip(&tops) {
        if t_top == 0 {
            continue;
        }
        let (approx, exact) = if t.shift >= cut {
            let v = t.value.to_u128().expect("window term fits in 128 bits");
            (v << (t.shift - cut), true)
        } else {
            t.value.top_bits(cut - t.shift)
        };
        let scaled = approx.wrapping_mul(t.mult as u128) as i128;
        let slack = if exact { 0 } else { t.mult as i128 };
        if t.negative {
            base -= scaled;
            neg_slack += slack;
        } else {
            base += scaled;
            pos_slack += slack;
        }
    }
    if pos_slack == 0 && neg_slack == 0 {
        return base.cmp(&0);
    }
    if base - neg_slack > 0 {
        return Ordering::Greater;
    }
    if base + pos_slack < 0 {
        return Ordering::Less;
    }
    sign_of_exact(terms)
}

fn sign_of_exact(terms: &[Term<'_>]) -> Ordering {
    let mut sum = BigInt::zero();
    for t in terms.iter().filter(|t| !t.is_zero()) {
        let mag = (t.value.to_biguint() << t.shift) * t.mult;
        let sign = if t.negative { Sign::Minus } else { Sign::Plus };
        sum += BigInt::from_biguint(sign, mag);
    }
    sum.sign().cmp_zero()
}

trait SignExt {
    fn cmp_zero(self) -> Ordering;
}

impl SignExt for Sign {
    fn cmp_zero(self) -> Ordering {
        match self {
            Sign::Minus => Ordering::Less,
            Sign::NoSign => Ordering::Equal,
            Sign::Plus => Ordering::Greater,
        }
    }
}

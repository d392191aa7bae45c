//! Streaming matcher and dematcher.
//!
//! Both directions are arithmetic coders over exact integers. The input
//! side splits its interval in halves per bit; the output side splits per
//! symbol in proportion to the draw-without-replacement model. A side emits
//! as soon as its interval fits inside one part of the other side's
//! partition, and both intervals are rescaled so the emitted part becomes
//! `[0, 1)` again.
//!
//! The coders produce exactly the codewords of [`crate::ranker::ref_encode`]
//! and the blocks of [`crate::ranker::ref_decode`].

mod decoder;
mod encoder;
mod model;

use num_rational::BigRational;

pub use decoder::{decode_stream, Decoder};
pub use encoder::{encode_stream, Encoder};
pub use model::SourceModel;

/// Bits buffered in a word before they are folded into a coder's offset.
const MAX_PENDING: u32 = 31;

/// A rescaled interval, as exact rationals.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalState {
    pub low: BigRational,
    pub width: BigRational,
}

#[cfg(test)]
mod tests {
    use num_bigint::BigUint;
    use num_rational::Ratio;
    use num_traits::{One, Zero};
    use proptest::prelude::*;

    use super::*;
    use crate::ranker::{
        self, bits_to_value, codebook, ref_decode, ref_encode, unrank, value_to_bits, TypeIndex,
    };
    use crate::typemath::{type_class_size, CodeParams, Composition, Symbol};
    use crate::Error;

    fn s(text: &str) -> Vec<Symbol> {
        text.bytes().map(|c| c - b'0').collect()
    }

    fn b(text: &str) -> Vec<bool> {
        text.bytes().map(|c| c == b'1').collect()
    }

    fn params(c: &[u64]) -> CodeParams {
        CodeParams::new(Composition::new(c.to_vec()).unwrap())
    }

    fn all_inputs(m: u64) -> impl Iterator<Item = Vec<bool>> {
        (0..1u64 << m).map(move |j| value_to_bits(&BigUint::from(j), m))
    }

    fn big_rational(r: Ratio<u64>) -> BigRational {
        BigRational::new((*r.numer()).into(), (*r.denom()).into())
    }

    const SMALL: [&[u64]; 9] = [
        &[2, 2],
        &[1, 1],
        &[1, 0],
        &[1, 2, 3, 4],
        &[5, 1],
        &[0, 4, 0, 3],
        &[3, 3, 3],
        &[1, 1, 1, 1, 2],
        &[6],
    ];

    #[test]
    fn worked_binary_example() {
        let p = params(&[2, 2]);
        assert_eq!(encode_stream(&b("01"), &p).unwrap(), s("0110"));
        let mut enc = Encoder::new(&p);
        assert_eq!(enc.push_bit(true).unwrap(), &[1]);
        assert_eq!(enc.push_bit(false).unwrap(), &[0]);
        assert_eq!(enc.finish().unwrap(), s("1001"));
        assert_eq!(decode_stream(&s("0110"), &p, true).unwrap(), b("01"));
        assert_eq!(decode_stream(&s("1001"), &p, true).unwrap(), b("10"));
    }

    #[test]
    fn matches_reference_exhaustively() {
        for counts in SMALL {
            let p = params(counts);
            for bits in all_inputs(p.m()) {
                let seq = encode_stream(&bits, &p).unwrap();
                assert_eq!(seq, ref_encode(&bits, &p).unwrap(), "{counts:?} {bits:?}");
                assert_eq!(decode_stream(&seq, &p, true).unwrap(), bits);
            }
        }
    }

    #[test]
    fn decoder_matches_reference_on_whole_type_class() {
        for counts in SMALL {
            let p = params(counts);
            let size: u64 = p.type_class_size().try_into().unwrap();
            for i in 0..size {
                let seq = unrank(&i.into(), p.composition()).unwrap();
                for strict in [true, false] {
                    let got = decode_stream(&seq, &p, strict);
                    match ref_decode(&seq, &p, strict) {
                        Ok(bits) => assert_eq!(got.unwrap(), bits),
                        Err(Error::NotACodeword) => {
                            assert!(matches!(got, Err(Error::NotACodeword)))
                        }
                        Err(e) => panic!("{e}"),
                    }
                }
            }
        }
    }

    #[test]
    fn singleton_codebook_needs_no_input() {
        let p = params(&[0, 3, 0]);
        assert_eq!(p.m(), 0);
        assert_eq!(encode_stream(&[], &p).unwrap(), s("111"));
        assert_eq!(decode_stream(&s("111"), &p, true).unwrap(), b(""));
    }

    #[test]
    fn rejects_malformed_input() {
        let p = params(&[2, 2]);
        assert!(matches!(
            encode_stream(&b("0"), &p),
            Err(Error::LengthMismatch {
                expected: 2,
                actual: 1
            })
        ));
        let mut enc = Encoder::new(&p);
        enc.push_bit(true).unwrap();
        enc.push_bit(true).unwrap();
        assert!(matches!(
            enc.push_bit(true),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            Encoder::new(&p).finish(),
            Err(Error::LengthMismatch { .. })
        ));
        assert!(matches!(
            decode_stream(&s("0101"), &p, true),
            Err(Error::NotACodeword)
        ));
        assert_eq!(decode_stream(&s("0101"), &p, false).unwrap(), b("00"));
        for bad in ["0111", "011", "01100", "0120"] {
            assert!(matches!(
                decode_stream(&s(bad), &p, true),
                Err(Error::CompositionMismatch)
            ));
        }
        let mut dec = Decoder::new(&p);
        dec.push_symbol(0).unwrap();
        assert!(matches!(dec.finish(true), Err(Error::CompositionMismatch)));
    }

    #[test]
    fn emitted_prefixes_are_sure() {
        for counts in SMALL {
            let p = params(counts);
            let book = codebook(&p).unwrap();
            let m = p.m();
            for j in 0..1u64 << m {
                let mut enc = Encoder::new(&p);
                for (t, bit) in value_to_bits(&BigUint::from(j), m).into_iter().enumerate() {
                    enc.push_bit(bit).unwrap();
                    let shift = m - t as u64 - 1;
                    let reachable = (j >> shift << shift)..((j >> shift) + 1) << shift;
                    for k in reachable {
                        assert!(book[k as usize].starts_with(enc.emitted()));
                    }
                }
            }
        }
    }

    #[test]
    fn dematcher_bits_are_sure() {
        for counts in SMALL {
            let p = params(counts);
            let size: u64 = p.type_class_size().try_into().unwrap();
            let class: Vec<Vec<Symbol>> = (0..size)
                .map(|i| unrank(&i.into(), p.composition()).unwrap())
                .collect();
            let blocks: Vec<Vec<bool>> = (0..size)
                .map(|i| value_to_bits(&ranker::decode_index(&i.into(), &p), p.m()))
                .collect();
            for seq in &class {
                let mut dec = Decoder::new(&p);
                for (pos, &sym) in seq.iter().enumerate() {
                    dec.push_symbol(sym).unwrap();
                    // sequences sharing the prefix form a rank range, and
                    // blocks are monotone in rank, so the extremes suffice
                    let prefix = &seq[..=pos];
                    let lo = class.partition_point(|x| &x[..=pos] < prefix);
                    let hi = class.partition_point(|x| &x[..=pos] <= prefix);
                    assert!(blocks[lo].starts_with(dec.emitted()));
                    assert!(blocks[hi - 1].starts_with(dec.emitted()));
                }
            }
        }
    }

    /// Product of the model's conditional probabilities along `prefix`.
    fn path_probability(comp: &Composition, prefix: &[Symbol]) -> BigRational {
        let mut model = SourceModel::new(comp);
        let mut prob = BigRational::one();
        for &a in prefix {
            prob *= big_rational(model.next_symbol_distribution().unwrap()[a as usize]);
            model.draw(a).unwrap();
        }
        prob
    }

    #[test]
    fn interval_state_is_conserved() {
        for counts in SMALL {
            let p = params(counts);
            let size = BigRational::from_integer(p.type_class_size().clone().into());
            for bits in all_inputs(p.m()) {
                let mut enc = Encoder::new(&p);
                for (t, &bit) in bits.iter().enumerate() {
                    enc.push_bit(bit).unwrap();
                    let state = enc.input_interval();
                    assert!(state.low >= BigRational::zero());
                    assert!(&state.low + &state.width <= BigRational::one());
                    let prob = path_probability(p.composition(), enc.emitted());
                    let halving = BigRational::new(1.into(), (BigUint::one() << (t + 1)).into());
                    assert_eq!(state.width, halving / &prob);
                    let rest = Composition::new(enc.model().remaining().to_vec());
                    let completion = match rest {
                        Ok(rest) => BigRational::new(1.into(), type_class_size(&rest).into()),
                        Err(_) => BigRational::one(),
                    };
                    assert_eq!(prob * completion, size.recip());
                }
            }
        }
    }

    #[test]
    fn dematcher_interval_stays_inside() {
        for counts in SMALL {
            let p = params(counts);
            for seq in codebook(&p).unwrap() {
                let mut dec = Decoder::new(&p);
                for &sym in &seq {
                    dec.push_symbol(sym).unwrap();
                    let state = dec.output_interval();
                    assert!(state.low >= BigRational::zero());
                    assert!(&state.low + &state.width <= BigRational::one());
                }
                assert!(dec.output_interval().low < BigRational::one());
            }
        }
    }

    fn composition() -> impl Strategy<Value = Vec<u64>> {
        prop::collection::vec(0u64..120, 1..6)
            .prop_filter("non-empty", |c| c.iter().sum::<u64>() > 0)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn encoder_matches_reference(counts in composition(), seed in prop::collection::vec(any::<bool>(), 600)) {
            let p = params(&counts);
            let bits: Vec<bool> = seed.iter().copied().cycle().take(p.m() as usize).collect();
            let seq = encode_stream(&bits, &p).unwrap();
            prop_assert_eq!(&seq, &ref_encode(&bits, &p).unwrap());
            prop_assert_eq!(decode_stream(&seq, &p, true).unwrap(), bits);
        }

        #[test]
        fn decoder_matches_reference(counts in composition(), digits in prop::collection::vec(any::<u32>(), 1..30)) {
            let p = params(&counts);
            let i = TypeIndex(BigUint::new(digits) % p.type_class_size());
            let seq = unrank(&i, p.composition()).unwrap();
            let lenient = decode_stream(&seq, &p, false).unwrap();
            prop_assert_eq!(&lenient, &ref_decode(&seq, &p, false).unwrap());
            let is_codeword = ranker::encode_index(&bits_to_value(&lenient), &p) == i;
            prop_assert_eq!(decode_stream(&seq, &p, true).is_ok(), is_codeword);
        }

        #[test]
        fn boundary_inputs_round_trip(counts in composition()) {
            let p = params(&counts);
            let m = p.m() as usize;
            let mut patterns = vec![vec![false; m], vec![true; m]];
            for split in [1, m / 2, m.saturating_sub(1)] {
                let split = split.min(m);
                let mut a = vec![false; m];
                a[..split].fill(true);
                let mut b = vec![true; m];
                b[..split].fill(false);
                patterns.push(a);
                patterns.push(b);
            }
            for bits in patterns {
                let seq = encode_stream(&bits, &p).unwrap();
                prop_assert_eq!(&seq, &ref_encode(&bits, &p).unwrap());
                prop_assert_eq!(decode_stream(&seq, &p, true).unwrap(), bits);
            }
        }
    }
}

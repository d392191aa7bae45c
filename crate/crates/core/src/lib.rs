//! Constant composition distribution matching.
//!
//! A matcher maps `m` uniform input bits to a block of `n` symbols that all
//! share one composition (an n-type) close to a target distribution. It is
//! an arithmetic coder whose output model draws symbols without replacement,
//! so every sequence of the type class is equally likely and the map is
//! exactly invertible.
//!
//! ```
//! use ccdm::{decode_stream, encode_stream, CodeParams, Composition};
//!
//! let params = CodeParams::new(Composition::new(vec![2, 2]).unwrap());
//! assert_eq!(params.m(), 2);
//! let symbols = encode_stream(&[false, true], &params).unwrap();
//! assert_eq!(symbols, [0, 1, 1, 0]);
//! assert_eq!(decode_stream(&symbols, &params, true).unwrap(), [false, true]);
//! ```

pub mod analysis;
pub mod coder;
mod error;
mod nat;
pub mod ranker;
pub mod typemath;

pub use analysis::{empirical_divergence, sweep, SweepRecord, PRESET_GRID};
pub use coder::{decode_stream, encode_stream, Decoder, Encoder, IntervalState, SourceModel};
pub use error::{Error, Result};
pub use ranker::{codebook, rank, ref_decode, ref_encode, unrank, TypeIndex};
pub use typemath::{
    entropy, input_length, kl_divergence, normalized_divergence, quantization_gap_bound,
    quantize_to_ntype, rate_lower_bound, type_class_size, CodeParams, Composition, Distribution,
    Symbol,
};

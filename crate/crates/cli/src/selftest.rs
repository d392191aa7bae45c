//! Built-in consistency checks of the streaming coder against the exact
//! reference coder on small compositions.

use std::fmt::Write as _;

use ccdm::{
    decode_stream, encode_stream, ranker::unrank, ref_decode, ref_encode, type_class_size,
    CodeParams, Composition, Error, SourceModel, Symbol, TypeIndex,
};
use num_bigint::BigUint;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

/// The matcher under test.
pub type EncodeFn = fn(&[bool], &CodeParams) -> ccdm::Result<Vec<Symbol>>;

/// The shipped streaming matcher.
pub const STREAMING: EncodeFn = encode_stream;

#[derive(Clone, Debug)]
pub struct Config {
    pub max_n: u64,
    pub trials: u64,
    pub seed: u64,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            max_n: 12,
            trials: 1000,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, Default)]
pub struct Suite {
    pub name: &'static str,
    pub cases: u64,
    pub failures: u64,
    pub first_failure: Option<String>,
}

impl Suite {
    fn new(name: &'static str) -> Self {
        Suite {
            name,
            ..Default::default()
        }
    }

    fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(what());
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct Report {
    pub compositions: u64,
    pub suites: Vec<Suite>,
    /// Codebook of the two-by-two composition, when `max_n >= 4`.
    pub worked_example: Option<Vec<String>>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.suites.iter().all(|s| s.failures == 0)
    }

    pub fn exit_code(&self) -> i32 {
        if self.passed() {
            0
        } else {
            1
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<22} {:>10} {:>9}  status\n",
            "suite", "cases", "failures"
        );
        for s in &self.suites {
            let status = if s.failures == 0 { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{:<22} {:>10} {:>9}  {status}",
                s.name, s.cases, s.failures
            );
            if let Some(f) = &s.first_failure {
                let _ = writeln!(out, "  first failure: {f}");
            }
        }
        let _ = writeln!(out, "compositions: {}", self.compositions);
        if let Some(book) = &self.worked_example {
            let _ = writeln!(
                out,
                "composition [2, 2]: m=2 |T|=6 codebook {}",
                book.join(" ")
            );
        }
        out
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "compositions": self.compositions,
            "suites": self.suites.iter().map(|s| json!({
                "name": s.name,
                "cases": s.cases,
                "failures": s.failures,
                "first_failure": s.first_failure,
            })).collect::<Vec<_>>(),
            "worked_example": self.worked_example,
        })
    }
}

fn show(seq: &[Symbol]) -> String {
    seq.iter().map(|s| s.to_string()).collect()
}

fn show_bits(bits: &[bool]) -> String {
    bits.iter().map(|&b| if b { '1' } else { '0' }).collect()
}

/// Positive count vectors over up to three symbols with `n <= max_n`.
fn compositions(max_n: u64) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    for n in 1..=max_n {
        out.push(vec![n]);
        for a in 1..n {
            out.push(vec![a, n - a]);
            for b in 1..n - a {
                out.push(vec![a, b, n - a - b]);
            }
        }
    }
    out
}

/// Inputs to try: every block if there are at most `trials`, otherwise
/// `trials` random ones.
fn inputs(m: u64, trials: u64, rng: &mut ChaCha8Rng) -> Vec<Vec<bool>> {
    if m < 64 && 1u64 << m <= trials {
        (0..1u64 << m)
            .map(|j| (0..m).rev().map(|t| j >> t & 1 == 1).collect())
            .collect()
    } else {
        (0..trials)
            .map(|_| (0..m).map(|_| rng.gen()).collect())
            .collect()
    }
}

/// Whether the draw-without-replacement model gives `seq` probability
/// exactly `1 / size`.
fn has_uniform_probability(seq: &[Symbol], comp: &Composition, size: &BigUint) -> bool {
    let mut model = SourceModel::new(comp);
    let (mut num, mut den) = (BigUint::from(1u32), BigUint::from(1u32));
    for &s in seq {
        let Some(&c) = model.remaining().get(s as usize) else {
            return false;
        };
        num *= c;
        den *= model.remaining_total();
        if model.draw(s).is_err() {
            return false;
        }
    }
    den == num * size
}

pub fn run(config: &Config, encode: EncodeFn) -> Report {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut oracle = Suite::new("oracle equivalence");
    let mut round_trip = Suite::new("round trip");
    let mut composition = Suite::new("composition");
    let mut uniformity = Suite::new("uniformity");
    let mut dematcher = Suite::new("dematcher oracle");
    let comps = compositions(config.max_n);
    for counts in &comps {
        let comp = Composition::new(counts.clone()).expect("positive counts");
        let params = CodeParams::new(comp.clone());
        let size = type_class_size(&comp);
        for bits in inputs(params.m(), config.trials, &mut rng) {
            let label = || format!("{counts:?} input {}", show_bits(&bits));
            let got = encode(&bits, &params);
            let want = ref_encode(&bits, &params).expect("valid block");
            let Ok(seq) = got else {
                oracle.check(false, || format!("{}: {}", label(), got.unwrap_err()));
                continue;
            };
            oracle.check(seq == want, || {
                format!("{}: {} vs {}", label(), show(&seq), show(&want))
            });
            composition.check(comp.matches(&seq), || {
                format!("{}: {}", label(), show(&seq))
            });
            uniformity.check(has_uniform_probability(&seq, &comp, &size), || {
                format!("{}: {}", label(), show(&seq))
            });
            let back = decode_stream(&seq, &params, true);
            round_trip.check(back.as_ref().is_ok_and(|b| *b == bits), || {
                format!(
                    "{}: decoded {:?}",
                    label(),
                    back.as_ref().map(|b| show_bits(b))
                )
            });
        }
        // every member of small classes, codeword or not
        if size <= BigUint::from(config.trials) {
            let mut i = BigUint::from(0u32);
            while i < size {
                let seq = unrank(&TypeIndex(i.clone()), &comp).expect("index in range");
                for strict in [true, false] {
                    let got = decode_stream(&seq, &params, strict);
                    let want = ref_decode(&seq, &params, strict);
                    let same = match (&got, &want) {
                        (Ok(a), Ok(b)) => a == b,
                        (Err(Error::NotACodeword), Err(Error::NotACodeword)) => true,
                        _ => false,
                    };
                    dematcher.check(same, || {
                        format!(
                            "{counts:?} sequence {} strict={strict}: {got:?} vs {want:?}",
                            show(&seq)
                        )
                    });
                }
                i += 1u32;
            }
        }
    }
    let mut suites = vec![oracle, round_trip, composition, uniformity, dematcher];
    let worked_example = (config.max_n >= 4).then(|| {
        let params = CodeParams::new(Composition::new(vec![2, 2]).expect("valid"));
        let mut example = Suite::new("worked example [2, 2]");
        let book: Vec<String> = ["00", "01", "10", "11"]
            .iter()
            .map(|b| {
                let bits: Vec<bool> = b.chars().map(|c| c == '1').collect();
                encode(&bits, &params)
                    .map(|s| show(&s))
                    .unwrap_or_else(|e| e.to_string())
            })
            .collect();
        let expected = ["0011", "0110", "1001", "1100"];
        example.check(
            params.m() == 2 && *params.type_class_size() == BigUint::from(6u32),
            || format!("m={} |T|={}", params.m(), params.type_class_size()),
        );
        for (got, want) in book.iter().zip(expected) {
            example.check(got == want, || format!("codeword {got} instead of {want}"));
        }
        suites.push(example);
        book
    });
    Report {
        compositions: comps.len() as u64,
        suites,
        worked_example,
    }
}

//! Rate and divergence of the matcher across blocklengths, with CSV and
//! JSON reports.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize, Serializer};

use crate::ranker::{codebook_with_limit, DEFAULT_ENUMERATION_LIMIT};
use crate::typemath::{
    entropy, kl_divergence, normalized_divergence, quantization_gap_bound, quantize_to_ntype,
    rate_lower_bound, CodeParams, Composition, Distribution,
};
use crate::{Error, Result};

/// Log-spaced blocklengths from 10 to 10000.
pub const PRESET_GRID: [u64; 50] = [
    10, 12, 13, 15, 18, 20, 23, 27, 31, 36, 41, 47, 54, 63, 72, 83, 95, 110, 126, 146, 168, 193,
    222, 256, 295, 339, 391, 450, 518, 596, 687, 791, 910, 1048, 1207, 1389, 1600, 1842, 2121,
    2442, 2812, 3237, 3728, 4292, 4942, 5690, 6551, 7543, 8685, 10000,
];

/// Significant digits written to reports.
pub const REPORT_DIGITS: usize = 15;

fn round_significant(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{:.*e}", REPORT_DIGITS - 1, x).parse().unwrap_or(x)
}

fn ser_rounded<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(round_significant(*x))
}

fn ser_rounded_opt<S: Serializer>(x: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
    match x {
        Some(v) => s.serialize_some(&round_significant(*v)),
        None => s.serialize_none(),
    }
}

/// Performance of the matcher at one blocklength.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepRecord {
    pub n: u64,
    pub m: u64,
    /// `m / n`, bits per symbol.
    #[serde(serialize_with = "ser_rounded")]
    pub rate: f64,
    /// Entropy of the n-type.
    #[serde(serialize_with = "ser_rounded")]
    pub h_bar: f64,
    /// Normalized divergence `h_bar - rate + kl_gap`.
    #[serde(serialize_with = "ser_rounded")]
    pub ndiv: f64,
    /// Divergence of the n-type from the target.
    #[serde(serialize_with = "ser_rounded")]
    pub kl_gap: f64,
    /// Quantization bound on `kl_gap`; absent when the target has zero entries.
    #[serde(serialize_with = "ser_rounded_opt")]
    pub gap_bound: Option<f64>,
    /// Rate lower bound evaluated at the target's entropy.
    #[serde(serialize_with = "ser_rounded")]
    pub rate_bound: f64,
    pub counts: Vec<u64>,
}

impl SweepRecord {
    pub fn composition(&self) -> Result<Composition> {
        Composition::new(self.counts.clone())
    }

    /// Rate lower bound evaluated at the n-type's entropy.
    pub fn rate_bound_at_type(&self) -> f64 {
        rate_lower_bound(self.h_bar, self.n, self.counts.len())
    }
}

/// One record per blocklength in `n_values`, in order.
pub fn sweep(dist: &Distribution, n_values: &[u64]) -> Result<Vec<SweepRecord>> {
    let h = entropy(dist);
    n_values
        .iter()
        .map(|&n| {
            let comp = quantize_to_ntype(dist, n)?;
            let params = CodeParams::new(comp);
            let phat = params.composition().empirical();
            Ok(SweepRecord {
                n,
                m: params.m(),
                rate: params.rate(),
                h_bar: entropy(&phat),
                ndiv: normalized_divergence(dist, params.composition())?,
                kl_gap: kl_divergence(&phat, dist)?,
                gap_bound: quantization_gap_bound(dist, n).ok(),
                rate_bound: rate_lower_bound(h, n, dist.k()),
                counts: params.composition().counts().to_vec(),
            })
        })
        .collect()
}

/// Normalized divergence of the matcher output from the i.i.d. target,
/// evaluated by enumerating the codebook.
pub fn empirical_divergence(dist: &Distribution, params: &CodeParams) -> Result<f64> {
    empirical_divergence_with_limit(dist, params, DEFAULT_ENUMERATION_LIMIT)
}

pub fn empirical_divergence_with_limit(
    dist: &Distribution,
    params: &CodeParams,
    limit: u64,
) -> Result<f64> {
    if dist.k() != params.k() {
        return Err(Error::AlphabetMismatch {
            left: params.k(),
            right: dist.k(),
        });
    }
    let book = codebook_with_limit(params, limit)?;
    let mut hits: HashMap<&[u8], u64> = HashMap::new();
    for c in &book {
        *hits.entry(c.as_slice()).or_default() += 1;
    }
    let inputs = book.len() as f64;
    let mut d = 0.0;
    for (c, count) in hits {
        let p_out = count as f64 / inputs;
        let mut log_target = 0.0;
        for &a in c {
            let p = dist.probs()[a as usize];
            if p == 0.0 {
                return Err(Error::SupportViolation { symbol: a as usize });
            }
            log_target += p.log2();
        }
        d += p_out * (p_out.log2() - log_target);
    }
    Ok(d / params.n() as f64)
}

/// Report serialization format.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            _ => Err(Error::Report(format!("unknown format {s:?}"))),
        }
    }
}

impl fmt::Display for ReportFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ReportFormat::Csv => "csv",
            ReportFormat::Json => "json",
        })
    }
}

/// Flat CSV row; counts are joined with `;`.
#[derive(Serialize, Deserialize)]
struct CsvRow {
    n: u64,
    m: u64,
    #[serde(serialize_with = "ser_rounded")]
    rate: f64,
    #[serde(serialize_with = "ser_rounded")]
    h_bar: f64,
    #[serde(serialize_with = "ser_rounded")]
    ndiv: f64,
    #[serde(serialize_with = "ser_rounded")]
    kl_gap: f64,
    #[serde(serialize_with = "ser_rounded_opt")]
    gap_bound: Option<f64>,
    #[serde(serialize_with = "ser_rounded")]
    rate_bound: f64,
    counts: String,
}

impl From<&SweepRecord> for CsvRow {
    fn from(r: &SweepRecord) -> Self {
        let counts: Vec<String> = r.counts.iter().map(u64::to_string).collect();
        CsvRow {
            n: r.n,
            m: r.m,
            rate: r.rate,
            h_bar: r.h_bar,
            ndiv: r.ndiv,
            kl_gap: r.kl_gap,
            gap_bound: r.gap_bound,
            rate_bound: r.rate_bound,
            counts: counts.join(";"),
        }
    }
}

impl TryFrom<CsvRow> for SweepRecord {
    type Error = Error;

    fn try_from(r: CsvRow) -> Result<Self> {
        let counts = r
            .counts
            .split(';')
            .map(|c| {
                c.trim()
                    .parse()
                    .map_err(|_| Error::Report(format!("bad counts {:?}", r.counts)))
            })
            .collect::<Result<_>>()?;
        Ok(SweepRecord {
            n: r.n,
            m: r.m,
            rate: r.rate,
            h_bar: r.h_bar,
            ndiv: r.ndiv,
            kl_gap: r.kl_gap,
            gap_bound: r.gap_bound,
            rate_bound: r.rate_bound,
            counts,
        })
    }
}

fn csv_error(e: csv::Error) -> Error {
    if e.is_io_error() {
        match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        }
    } else {
        Error::Report(e.to_string())
    }
}

fn json_error(e: serde_json::Error) -> Error {
    if e.is_io() {
        Error::Io(e.into())
    } else {
        Error::Report(e.to_string())
    }
}

/// Writes one row (CSV, with header) or one object (JSON array) per record.
pub fn emit_report<W: Write>(records: &[SweepRecord], format: ReportFormat, out: W) -> Result<()> {
    if records.is_empty() {
        return Err(Error::Report("no records".into()));
    }
    match format {
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for r in records {
                w.serialize(CsvRow::from(r)).map_err(csv_error)?;
            }
            w.flush()?;
        }
        ReportFormat::Json => {
            let mut out = out;
            serde_json::to_writer_pretty(&mut out, records).map_err(json_error)?;
            out.write_all(b"\n")?;
            out.flush()?;
        }
    }
    Ok(())
}

/// Parses a report written by [`emit_report`].
pub fn read_report<R: Read>(input: R, format: ReportFormat) -> Result<Vec<SweepRecord>> {
    match format {
        ReportFormat::Csv => csv::Reader::from_reader(input)
            .deserialize::<CsvRow>()
            .map(|row| row.map_err(csv_error).and_then(SweepRecord::try_from))
            .collect(),
        ReportFormat::Json => serde_json::from_reader(input).map_err(json_error),
    }
}

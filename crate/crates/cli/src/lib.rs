//! Library side of the `ccdm` command: file formats, commands and the self-test.

pub mod files;
pub mod selftest;

use std::fs;
use std::io::Write;
use std::path::Path;

use ccdm::analysis::{emit_report, ReportFormat};
use ccdm::{
    decode_stream, encode_stream, entropy, kl_divergence, sweep, CodeParams, Distribution, Error,
    PRESET_GRID,
};
use serde_json::{json, Value};
use thiserror::Error;

use files::{BitBlockFile, SymbolBlockFile};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Integrity(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Integrity(_) => 3,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(io) => CliError::Io(io.to_string()),
            Error::CompositionMismatch | Error::NotACodeword => CliError::Integrity(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// What a command reports on stdout, in both presentations.
pub struct Outcome {
    pub text: String,
    pub json: Value,
}

fn read(path: &Path) -> CliResult<Vec<u8>> {
    fs::read(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn write(path: &Path, data: &[u8]) -> CliResult<()> {
    fs::write(path, data).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

pub fn load_distribution(path: &Path) -> CliResult<Distribution> {
    let data = read(path)?;
    let text = std::str::from_utf8(&data)
        .map_err(|_| CliError::Usage(format!("{}: not UTF-8 text", path.display())))?;
    Distribution::parse(text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

pub fn load_params(dist_path: &Path, n: u64) -> CliResult<(Distribution, CodeParams)> {
    if n == 0 {
        return Err(CliError::Usage("--n must be at least 1".into()));
    }
    let dist = load_distribution(dist_path)?;
    let params = CodeParams::from_distribution(&dist, n)?;
    Ok((dist, params))
}

fn symbol_alphabet(params: &CodeParams) -> CliResult<u64> {
    let k = params.k() as u64;
    if k > SymbolBlockFile::MAX_K {
        return Err(CliError::Usage(format!(
            "alphabet size {k} exceeds the symbol file limit {}",
            SymbolBlockFile::MAX_K
        )));
    }
    Ok(k)
}

pub fn cmd_quantize(dist_path: &Path, n: u64) -> CliResult<Outcome> {
    let (dist, params) = load_params(dist_path, n)?;
    let comp = params.composition();
    let phat = comp.empirical();
    let kl_gap = kl_divergence(&phat, &dist)?;
    let size = params.type_class_size().to_string();
    let text = format!(
        "counts  {:?}\nm       {}\n|T|     {}\nrate    {}\np_bar   {:?}\nh_bar   {}\nkl_gap  {}",
        comp.counts(),
        params.m(),
        size,
        params.rate(),
        phat.probs(),
        entropy(&phat),
        kl_gap
    );
    let json = json!({
        "n": n,
        "counts": comp.counts(),
        "m": params.m(),
        "type_class_size": size,
        "rate": params.rate(),
        "p_bar": phat.probs(),
        "h_bar": entropy(&phat),
        "kl_gap": kl_gap,
    });
    Ok(Outcome { text, json })
}

pub fn cmd_encode(dist_path: &Path, n: u64, input: &Path, output: &Path) -> CliResult<Outcome> {
    let (_, params) = load_params(dist_path, n)?;
    let k = symbol_alphabet(&params)?;
    let bits = BitBlockFile::parse(&read(input)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    if bits.m != params.m() {
        return Err(CliError::Usage(format!(
            "{}: blocks have m={}, the code needs m={}",
            input.display(),
            bits.m,
            params.m()
        )));
    }
    let blocks = bits
        .blocks
        .iter()
        .map(|b| encode_stream(b, &params))
        .collect::<Result<Vec<_>, _>>()?;
    let count = blocks.len();
    write(output, &SymbolBlockFile { n, k, blocks }.to_bytes())?;
    Ok(Outcome {
        text: format!(
            "encoded {count} blocks of {} bits into {n} symbols each",
            params.m()
        ),
        json: json!({ "blocks": count, "m": params.m(), "n": n, "k": k }),
    })
}

pub fn cmd_decode(
    dist_path: &Path,
    n: u64,
    input: &Path,
    output: &Path,
    lenient: bool,
) -> CliResult<Outcome> {
    let (_, params) = load_params(dist_path, n)?;
    let k = symbol_alphabet(&params)?;
    let symbols = SymbolBlockFile::parse(&read(input)?)
        .map_err(|e| CliError::Usage(format!("{}: {e}", input.display())))?;
    if (symbols.n, symbols.k) != (n, k) {
        return Err(CliError::Usage(format!(
            "{}: blocks have n={} k={}, the code needs n={n} k={k}",
            input.display(),
            symbols.n,
            symbols.k
        )));
    }
    let mut warnings = 0u64;
    let mut blocks = Vec::with_capacity(symbols.blocks.len());
    for (b, block) in symbols.blocks.iter().enumerate() {
        let bits = match decode_stream(block, &params, true) {
            Err(Error::NotACodeword) if lenient => {
                warnings += 1;
                decode_stream(block, &params, false)
            }
            other => other,
        }
        .map_err(|e| match CliError::from(e) {
            CliError::Integrity(msg) => CliError::Integrity(format!("block {b}: {msg}")),
            other => other,
        })?;
        blocks.push(bits);
    }
    let count = blocks.len();
    write(
        output,
        &BitBlockFile {
            m: params.m(),
            blocks,
        }
        .to_bytes(),
    )?;
    let mut text = format!(
        "decoded {count} blocks of {n} symbols into {} bits each",
        params.m()
    );
    if lenient {
        text += &format!("\nwarnings: {warnings} blocks were not codewords");
    }
    Ok(Outcome {
        text,
        json: json!({ "blocks": count, "m": params.m(), "n": n, "warnings": warnings }),
    })
}

/// `preset` or a comma-separated list of positive blocklengths.
pub fn parse_grid(grid: &str) -> CliResult<Vec<u64>> {
    if grid == "preset" {
        return Ok(PRESET_GRID.to_vec());
    }
    grid.split(',')
        .map(|s| match s.trim().parse::<u64>() {
            Ok(n) if n > 0 => Ok(n),
            _ => Err(CliError::Usage(format!("bad blocklength {s:?} in --grid"))),
        })
        .collect()
}

pub fn parse_format(format: &str) -> CliResult<ReportFormat> {
    format
        .parse()
        .map_err(|e: Error| CliError::Usage(e.to_string()))
}

/// Writes the sweep report to `out`, or to `stdout` when no path is given.
pub fn cmd_sweep(
    dist_path: &Path,
    grid: &str,
    format: ReportFormat,
    out: Option<&Path>,
    stdout: &mut dyn Write,
) -> CliResult<Outcome> {
    let dist = load_distribution(dist_path)?;
    let records = sweep(&dist, &parse_grid(grid)?)?;
    match out {
        Some(path) => {
            let mut buf = Vec::new();
            emit_report(&records, format, &mut buf)?;
            write(path, &buf)?;
        }
        None => emit_report(&records, format, stdout)?,
    }
    Ok(Outcome {
        text: format!("{} records", records.len()),
        json: json!({ "records": records.len(), "format": format.to_string() }),
    })
}

//! Block file formats: a one-line ASCII header followed by a binary payload.

use std::fmt;

use ccdm::Symbol;

#[derive(Debug, PartialEq, Eq)]
pub struct FormatError(pub String);

impl fmt::Display for FormatError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for FormatError {}

fn bad(msg: impl Into<String>) -> FormatError {
    FormatError(msg.into())
}

/// Splits off the header line and parses its `key=value` fields, which
/// must appear exactly in the order of `keys`.
fn parse_header<'a>(data: &'a [u8], keys: &[&str]) -> Result<(Vec<u64>, &'a [u8]), FormatError> {
    let end = data
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| bad("missing header line"))?;
    let line = std::str::from_utf8(&data[..end]).map_err(|_| bad("header is not ASCII"))?;
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != keys.len() {
        return Err(bad(format!(
            "expected header {:?}, got {line:?}",
            keys.join(" ")
        )));
    }
    let mut values = Vec::with_capacity(keys.len());
    for (field, key) in fields.iter().zip(keys) {
        let value = field
            .strip_prefix(key)
            .and_then(|r| r.strip_prefix('='))
            .ok_or_else(|| bad(format!("expected field {key}=, got {field:?}")))?;
        if value.is_empty() || !value.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad(format!(
                "field {key} is not an unsigned integer: {value:?}"
            )));
        }
        values.push(
            value
                .parse()
                .map_err(|_| bad(format!("field {key} is too large")))?,
        );
    }
    Ok((values, &data[end + 1..]))
}

fn expect_len(payload: &[u8], blocks: u64, per_block: u64) -> Result<usize, FormatError> {
    let want = blocks
        .checked_mul(per_block)
        .and_then(|x| usize::try_from(x).ok())
        .ok_or_else(|| bad("payload size overflows"))?;
    if payload.len() != want {
        return Err(bad(format!(
            "payload has {} bytes, expected {want}",
            payload.len()
        )));
    }
    Ok(want)
}

/// Most blocks a file of empty blocks may declare.
const MAX_EMPTY_BLOCKS: u64 = 1 << 24;

fn empty_blocks<T: Clone>(count: u64) -> Result<Vec<Vec<T>>, FormatError> {
    if count > MAX_EMPTY_BLOCKS {
        return Err(bad(format!(
            "{count} empty blocks exceed the limit {MAX_EMPTY_BLOCKS}"
        )));
    }
    Ok(vec![Vec::new(); count as usize])
}

/// Fixed-length bit blocks, each packed MSB-first and padded with zeros to
/// a whole number of bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitBlockFile {
    pub m: u64,
    pub blocks: Vec<Vec<bool>>,
}

impl BitBlockFile {
    pub fn bytes_per_block(m: u64) -> u64 {
        m.div_ceil(8)
    }

    pub fn parse(data: &[u8]) -> Result<Self, FormatError> {
        let (h, payload) = parse_header(data, &["m", "blocks"])?;
        let (m, count) = (h[0], h[1]);
        let width = Self::bytes_per_block(m);
        expect_len(payload, count, width)?;
        if width > 0 {
            let mut blocks = Vec::with_capacity(count as usize);
            for (b, chunk) in payload.chunks(width as usize).enumerate() {
                let bits: Vec<bool> = (0..width * 8)
                    .map(|i| chunk[(i / 8) as usize] >> (7 - i % 8) & 1 == 1)
                    .collect();
                if bits[m as usize..].iter().any(|&x| x) {
                    return Err(bad(format!("block {b} has nonzero padding bits")));
                }
                blocks.push(bits[..m as usize].to_vec());
            }
            Ok(BitBlockFile { m, blocks })
        } else {
            Ok(BitBlockFile {
                m,
                blocks: empty_blocks(count)?,
            })
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = format!("m={} blocks={}\n", self.m, self.blocks.len()).into_bytes();
        for block in &self.blocks {
            assert_eq!(block.len() as u64, self.m, "block length differs from m");
            let start = out.len();
            out.resize(start + Self::bytes_per_block(self.m) as usize, 0);
            for (i, &bit) in block.iter().enumerate() {
                out[start + i / 8] |= (bit as u8) << (7 - i % 8);
            }
        }
        out
    }
}

/// Fixed-length symbol blocks, one byte per symbol.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymbolBlockFile {
    pub n: u64,
    pub k: u64,
    pub blocks: Vec<Vec<Symbol>>,
}

impl SymbolBlockFile {
    /// Largest alphabet a byte per symbol can carry.
    pub const MAX_K: u64 = 255;

    pub fn parse(data: &[u8]) -> Result<Self, FormatError> {
        let (h, payload) = parse_header(data, &["n", "k", "blocks"])?;
        let (n, k, count) = (h[0], h[1], h[2]);
        if k == 0 || k > Self::MAX_K {
            return Err(bad(format!(
                "alphabet size {k} outside 1..={}",
                Self::MAX_K
            )));
        }
        expect_len(payload, count, n)?;
        if let Some(pos) = payload.iter().position(|&s| s as u64 >= k) {
            return Err(bad(format!(
                "symbol {} at byte {pos} is not below k={k}",
                payload[pos]
            )));
        }
        let blocks = if n == 0 {
            empty_blocks(count)?
        } else {
            payload.chunks(n as usize).map(<[u8]>::to_vec).collect()
        };
        Ok(SymbolBlockFile { n, k, blocks })
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out =
            format!("n={} k={} blocks={}\n", self.n, self.k, self.blocks.len()).into_bytes();
        for block in &self.blocks {
            assert_eq!(block.len() as u64, self.n, "block length differs from n");
            out.extend_from_slice(block);
        }
        out
    }
}

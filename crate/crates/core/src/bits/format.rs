//! Bit file formats.
//!
//! - ASCII: one `'0'`/`'1'` character per bit, no separators, optional
//!   trailing newline.
//! - Packed: 8-byte little-endian bit count, then the bits MSB-first,
//!   last byte zero-padded.

use std::io::{Read, Write};

use super::{BitError, BitSequence, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BitFormat {
    Ascii,
    Packed,
}

pub fn to_ascii_bytes(seq: &BitSequence) -> Vec<u8> {
    let mut out: Vec<u8> = seq.bits().iter().map(|&b| b'0' + b).collect();
    out.push(b'\n');
    out
}

pub fn from_ascii_bytes(data: &[u8], label: &str) -> Result<BitSequence> {
    let body = data.strip_suffix(b"\n").unwrap_or(data);
    let body = body.strip_suffix(b"\r").unwrap_or(body);
    let text = std::str::from_utf8(body).map_err(|e| BitError::Format(e.to_string()))?;
    BitSequence::from_ascii(text, label)
}

pub fn pack(seq: &BitSequence) -> Vec<u8> {
    let mut out = Vec::with_capacity(8 + seq.len().div_ceil(8));
    out.extend_from_slice(&(seq.len() as u64).to_le_bytes());
    for chunk in seq.bits().chunks(8) {
        let byte = chunk
            .iter()
            .enumerate()
            .fold(0u8, |acc, (i, &b)| acc | (b << (7 - i)));
        out.push(byte);
    }
    out
}

pub fn unpack(data: &[u8], label: &str) -> Result<BitSequence> {
    let header: [u8; 8] = data
        .get(..8)
        .and_then(|h| h.try_into().ok())
        .ok_or_else(|| BitError::Format("missing 8-byte length header".into()))?;
    let len = u64::from_le_bytes(header);
    let body = &data[8..];
    let needed = usize::try_from(len)
        .ok()
        .map(|l| l.div_ceil(8))
        .ok_or_else(|| BitError::Format(format!("length {len} too large")))?;
    if body.len() != needed {
        return Err(BitError::Format(format!(
            "header says {len} bits ({needed} bytes) but body has {} bytes",
            body.len()
        )));
    }
    let bits = body
        .iter()
        .flat_map(|&byte| (0..8).rev().map(move |i| (byte >> i) & 1))
        .take(len as usize)
        .collect();
    BitSequence::new(bits, label)
}

/// Text files contain only `'0'`, `'1'` and an optional final newline.
pub fn detect_format(data: &[u8]) -> BitFormat {
    let body = data.strip_suffix(b"\n").unwrap_or(data);
    let body = body.strip_suffix(b"\r").unwrap_or(body);
    if !body.is_empty() && body.iter().all(|&c| c == b'0' || c == b'1') {
        BitFormat::Ascii
    } else {
        BitFormat::Packed
    }
}

pub fn write_bits<W: Write>(seq: &BitSequence, format: BitFormat, mut writer: W) -> Result<()> {
    let bytes = match format {
        BitFormat::Ascii => to_ascii_bytes(seq),
        BitFormat::Packed => pack(seq),
    };
    writer.write_all(&bytes)?;
    writer.flush()?;
    Ok(())
}

/// Reads a bit file; `format = None` auto-detects.
pub fn read_bits<R: Read>(mut reader: R, format: Option<BitFormat>, label: &str) -> Result<BitSequence> {
    let mut data = Vec::new();
    reader.read_to_end(&mut data)?;
    match format.unwrap_or_else(|| detect_format(&data)) {
        BitFormat::Ascii => from_ascii_bytes(&data, label),
        BitFormat::Packed => unpack(&data, label),
    }
}

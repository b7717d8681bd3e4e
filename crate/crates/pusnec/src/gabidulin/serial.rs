//! Byte layout of outer words.
//!
//! Symbols are visited column by column; within a column, component rows in
//! order; within a row, the n coordinates. Each w-bit symbol is appended to a
//! little-endian bit stream (least significant bit first) and the final byte is
//! zero-padded.

use super::{GabError, OuterWord};
use crate::ffield::ExtElem;

pub fn pack_symbols(symbols: &[u16], w: u32) -> Vec<u8> {
    let total = symbols.len() * w as usize;
    let mut out = vec![0u8; total.div_ceil(8)];
    let mut bit = 0usize;
    for &s in symbols {
        for b in 0..w {
            if (s >> b) & 1 == 1 {
                out[bit / 8] |= 1 << (bit % 8);
            }
            bit += 1;
        }
    }
    out
}

pub fn unpack_symbols(bytes: &[u8], w: u32, count: usize) -> Result<Vec<u16>, GabError> {
    let need = (count * w as usize).div_ceil(8);
    if bytes.len() != need {
        return Err(GabError::DimensionMismatch(format!("expected {need} bytes, got {}", bytes.len())));
    }
    let mut out = Vec::with_capacity(count);
    let mut bit = 0usize;
    for _ in 0..count {
        let mut s = 0u16;
        for b in 0..w {
            if (bytes[bit / 8] >> (bit % 8)) & 1 == 1 {
                s |= 1 << b;
            }
            bit += 1;
        }
        out.push(s);
    }
    let tail = count * w as usize;
    if !tail.is_multiple_of(8) && bytes[tail / 8] >> (tail % 8) != 0 {
        return Err(GabError::DimensionMismatch("nonzero padding bits".into()));
    }
    Ok(out)
}

pub fn serialize(word: &OuterWord, n: usize, w: u32) -> Vec<u8> {
    let symbols: Vec<u16> = (0..word.n0()).flat_map(|j| word.column_payload(j, n)).collect();
    pack_symbols(&symbols, w)
}

pub fn deserialize(bytes: &[u8], l: usize, n0: usize, n: usize, w: u32) -> Result<OuterWord, GabError> {
    let symbols = unpack_symbols(bytes, w, l * n0 * n)?;
    if symbols.iter().any(|&s| s as u32 >= 1 << w) {
        return Err(GabError::DimensionMismatch("symbol out of range".into()));
    }
    let mut rows = vec![vec![ExtElem::ZERO; n0]; l];
    for j in 0..n0 {
        for (i, row) in rows.iter_mut().enumerate() {
            let start = (j * l + i) * n;
            row[j] = ExtElem::from_coords(&symbols[start..start + n]);
        }
    }
    Ok(OuterWord { rows })
}

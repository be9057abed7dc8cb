//! IDX files (the MNIST container): big-endian magic `0x0000TTDD`
//! (`TT` element type, `DD` rank), `DD` big-endian u32 extents, raw data.
//! Only unsigned-byte payloads are read.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

pub const IMAGES_MAGIC: u32 = 0x0000_0803;
pub const LABELS_MAGIC: u32 = 0x0000_0801;

fn header(bytes: &[u8], expected_magic: u32) -> Result<(Vec<usize>, &[u8])> {
    if bytes.len() < 4 {
        return Err(Error::Format("IDX file truncated before magic".into()));
    }
    let magic = u32::from_be_bytes(bytes[..4].try_into().unwrap());
    if magic != expected_magic {
        return Err(Error::Format(format!(
            "IDX magic {magic:#010x}, expected {expected_magic:#010x}"
        )));
    }
    let rank = (magic & 0xff) as usize;
    let body = &bytes[4..];
    if body.len() < 4 * rank {
        return Err(Error::Format("IDX file truncated in dimensions".into()));
    }
    let dims: Vec<usize> = body[..4 * rank]
        .chunks_exact(4)
        .map(|c| u32::from_be_bytes(c.try_into().unwrap()) as usize)
        .collect();
    let payload = &body[4 * rank..];
    let numel = dims.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d));
    match numel {
        Some(n) if n == payload.len() && n > 0 => Ok((dims, payload)),
        Some(n) if n > payload.len() => Err(Error::Format(format!(
            "IDX file truncated: dims {dims:?} need {n} bytes, found {}",
            payload.len()
        ))),
        _ => Err(Error::Format(format!(
            "IDX dims {dims:?} do not match payload of {} bytes",
            payload.len()
        ))),
    }
}

pub fn parse_idx_images(bytes: &[u8]) -> Result<Tensor<f64>> {
    let (dims, payload) = header(bytes, IMAGES_MAGIC)?;
    Tensor::new(dims, payload.iter().map(|&b| b as f64).collect())
}

pub fn parse_idx_labels(bytes: &[u8]) -> Result<Vec<u8>> {
    let (_, payload) = header(bytes, LABELS_MAGIC)?;
    Ok(payload.to_vec())
}

/// Load a `(n, H, W)` unsigned-byte image file; pixels stay in `0..=255`.
pub fn load_idx(path: &Path) -> Result<Tensor<f64>> {
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    parse_idx_images(&bytes)
}

pub fn load_idx_labels(path: &Path) -> Result<Vec<u8>> {
    let bytes = fs::read(path).map_err(|e| Error::file(path, e))?;
    parse_idx_labels(&bytes)
}

pub fn encode_idx_images(n: usize, h: usize, w: usize, pixels: &[u8]) -> Result<Vec<u8>> {
    if pixels.len() != n * h * w {
        return Err(Error::invalid("pixel count does not match dims"));
    }
    let mut out = IMAGES_MAGIC.to_be_bytes().to_vec();
    for d in [n, h, w] {
        out.extend_from_slice(&(d as u32).to_be_bytes());
    }
    out.extend_from_slice(pixels);
    Ok(out)
}

pub fn encode_idx_labels(labels: &[u8]) -> Vec<u8> {
    let mut out = LABELS_MAGIC.to_be_bytes().to_vec();
    out.extend_from_slice(&(labels.len() as u32).to_be_bytes());
    out.extend_from_slice(labels);
    out
}

pub fn write_idx_images(path: &Path, n: usize, h: usize, w: usize, pixels: &[u8]) -> Result<()> {
    fs::write(path, encode_idx_images(n, h, w, pixels)?).map_err(|e| Error::file(path, e))
}

pub fn write_idx_labels(path: &Path, labels: &[u8]) -> Result<()> {
    fs::write(path, encode_idx_labels(labels)).map_err(|e| Error::file(path, e))
}

//! Netpbm (PGM/PPM) and CSV image input, PPM output.
//!
//! Reads `P2`/`P5` gray and `P3`/`P6` color maps with any maxval up to 65535
//! (two-byte big-endian samples in the binary forms when maxval > 255), and
//! plain CSV matrices of gray values. Intensities are normalized to `[0, 1]`.

use std::fs;
use std::path::Path;

use crate::affinity::ImageBuffer;
use crate::error::{Error, Result};

/// 8-bit RGB raster, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RgbImage {
    pub width: usize,
    pub height: usize,
    pub data: Vec<u8>,
}

impl RgbImage {
    /// Binary `P6` encoding.
    pub fn to_ppm(&self) -> Vec<u8> {
        let mut out = format!("P6\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn pixel(&self, x: usize, y: usize) -> [u8; 3] {
        let i = 3 * (y * self.width + x);
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }
}

pub fn write_ppm(path: &Path, image: &RgbImage) -> Result<()> {
    fs::write(path, image.to_ppm()).map_err(|e| Error::io(path, e))
}

/// Loads a PGM/PPM (detected by magic number) or a CSV matrix.
pub fn read_image(path: &Path) -> Result<ImageBuffer> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes)
}

pub fn decode_image(bytes: &[u8]) -> Result<ImageBuffer> {
    if bytes.len() >= 2 && bytes[0] == b'P' && matches!(bytes[1], b'2' | b'3' | b'5' | b'6') {
        decode_pnm(bytes)
    } else {
        let text = std::str::from_utf8(bytes)
            .map_err(|_| Error::validation("image is neither netpbm nor UTF-8 CSV"))?;
        decode_csv(text)
    }
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn skip_space_and_comments(&mut self) {
        while self.pos < self.bytes.len() {
            match self.bytes[self.pos] {
                b'#' => {
                    while self.pos < self.bytes.len() && self.bytes[self.pos] != b'\n' {
                        self.pos += 1;
                    }
                }
                c if c.is_ascii_whitespace() => self.pos += 1,
                _ => break,
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<usize> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::validation(format!("netpbm: expected {what}")))
    }
}

pub fn decode_pnm(bytes: &[u8]) -> Result<ImageBuffer> {
    let magic = bytes.get(1).copied();
    let (channels, binary) = match magic {
        Some(b'2') => (1, false),
        Some(b'5') => (1, true),
        Some(b'3') => (3, false),
        Some(b'6') => (3, true),
        _ => return Err(Error::validation("netpbm: unsupported magic number")),
    };
    let mut cur = Cursor { bytes, pos: 2 };
    let width = cur.number("width")?;
    let height = cur.number("height")?;
    let maxval = cur.number("maxval")?;
    if maxval == 0 || maxval > 65535 {
        return Err(Error::validation(format!("netpbm: maxval {maxval} out of range")));
    }
    let count = width * height * channels;
    let mut raw = Vec::with_capacity(count);
    if binary {
        // exactly one whitespace byte separates the header from the raster
        cur.pos += 1;
        let wide = maxval > 255;
        let needed = count * if wide { 2 } else { 1 };
        let data = bytes
            .get(cur.pos..cur.pos + needed)
            .ok_or_else(|| Error::validation("netpbm: truncated raster"))?;
        if wide {
            raw.extend(data.chunks_exact(2).map(|c| u16::from_be_bytes([c[0], c[1]]) as usize));
        } else {
            raw.extend(data.iter().map(|&b| b as usize));
        }
    } else {
        for _ in 0..count {
            raw.push(cur.number("sample")?);
        }
    }
    if let Some(bad) = raw.iter().find(|&&v| v > maxval) {
        return Err(Error::validation(format!("netpbm: sample {bad} exceeds maxval {maxval}")));
    }
    let scale = maxval as f64;
    ImageBuffer::new(width, height, channels, raw.into_iter().map(|v| v as f64 / scale).collect())
}

/// Comma-separated rows of nonnegative gray values. Values already in `[0, 1]`
/// are kept; otherwise everything is divided by the maximum.
pub fn decode_csv(text: &str) -> Result<ImageBuffer> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row = line
            .split(',')
            .map(|tok| {
                tok.trim()
                    .parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite() && *v >= 0.0)
                    .ok_or_else(|| Error::Parse {
                        line: idx + 1,
                        message: format!("invalid intensity {:?}", tok.trim()),
                    })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(Error::Parse {
                    line: idx + 1,
                    message: format!("expected {} columns, found {}", first.len(), row.len()),
                });
            }
        }
        rows.push(row);
    }
    let height = rows.len();
    let width = rows.first().map_or(0, Vec::len);
    let mut values: Vec<f64> = rows.concat();
    let max = values.iter().copied().fold(0.0, f64::max);
    if max > 1.0 {
        values.iter_mut().for_each(|v| *v /= max);
    }
    ImageBuffer::new(width, height, 1, values)
}

/// Quantizes an image to 8 bits and encodes it as binary PGM or PPM.
pub fn encode_pnm(img: &ImageBuffer) -> Vec<u8> {
    let magic = if img.channels() == 1 { "P5" } else { "P6" };
    let mut out = format!("{magic}\n{} {}\n255\n", img.width(), img.height()).into_bytes();
    out.extend(img.pixels().iter().map(|v| (v * 255.0).round() as u8));
    out
}

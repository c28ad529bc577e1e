//! Binary PGM (P5) codec for 8-bit grayscale images.
//!
//! Reading tolerates `#` comments in the header and any `maxval` up to 255.
//! Writing always emits `P5\n<cols> <rows>\n255\n` followed by raw bytes.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PgmError {
    #[error("malformed PGM at byte {offset}: {message}")]
    Malformed { offset: usize, message: String },
    #[error("PGM maxval {0} means 16-bit samples, which are not supported; convert to 8-bit")]
    Unsupported16Bit(u32),
    #[error("{0} files are not grayscale; convert the image to 8-bit grayscale PGM first")]
    NotGrayscale(&'static str),
}

/// Decoded raster: dimensions and row-major samples rescaled to 0..=255.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    pub rows: usize,
    pub cols: usize,
    pub samples: Vec<u8>,
}

struct Cursor<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl Cursor<'_> {
    fn err(&self, message: impl Into<String>) -> PgmError {
        PgmError::Malformed {
            offset: self.pos,
            message: message.into(),
        }
    }

    fn skip_space_and_comments(&mut self) {
        while let Some(&b) = self.bytes.get(self.pos) {
            if b == b'#' {
                while let Some(&b) = self.bytes.get(self.pos) {
                    self.pos += 1;
                    if b == b'\n' || b == b'\r' {
                        break;
                    }
                }
            } else if b.is_ascii_whitespace() {
                self.pos += 1;
            } else {
                break;
            }
        }
    }

    fn number(&mut self, what: &str) -> Result<u32, PgmError> {
        self.skip_space_and_comments();
        let start = self.pos;
        while self.bytes.get(self.pos).is_some_and(u8::is_ascii_digit) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err(format!("expected {what}")));
        }
        std::str::from_utf8(&self.bytes[start..self.pos])
            .ok()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| PgmError::Malformed {
                offset: start,
                message: format!("{what} out of range"),
            })
    }
}

pub fn decode(bytes: &[u8]) -> Result<Raster, PgmError> {
    let mut cur = Cursor { bytes, pos: 0 };
    match bytes.get(..2) {
        Some(b"P5") => {}
        Some(b"P6") | Some(b"P3") => return Err(PgmError::NotGrayscale("color PPM")),
        Some(b"P7") => return Err(PgmError::NotGrayscale("PAM")),
        _ => return Err(cur.err("missing P5 magic number")),
    }
    cur.pos = 2;
    let cols = cur.number("width")? as usize;
    let rows = cur.number("height")? as usize;
    let maxval = cur.number("maxval")?;
    if cols == 0 || rows == 0 {
        return Err(cur.err("zero image dimension"));
    }
    if maxval == 0 {
        return Err(cur.err("maxval must be positive"));
    }
    if maxval > 255 {
        return Err(PgmError::Unsupported16Bit(maxval));
    }
    match bytes.get(cur.pos) {
        Some(b) if b.is_ascii_whitespace() => cur.pos += 1,
        _ => return Err(cur.err("expected a single whitespace byte after maxval")),
    }
    let len = rows
        .checked_mul(cols)
        .ok_or_else(|| cur.err("image dimensions overflow"))?;
    let data = bytes
        .get(cur.pos..cur.pos + len)
        .ok_or_else(|| cur.err(format!("expected {len} sample bytes, found {}", bytes.len() - cur.pos)))?;
    let samples = if maxval == 255 {
        data.to_vec()
    } else {
        let mut out = Vec::with_capacity(len);
        for (i, &v) in data.iter().enumerate() {
            if u32::from(v) > maxval {
                return Err(PgmError::Malformed {
                    offset: cur.pos + i,
                    message: format!("sample {v} exceeds maxval {maxval}"),
                });
            }
            out.push(((u32::from(v) * 255 + maxval / 2) / maxval) as u8);
        }
        out
    };
    Ok(Raster { rows, cols, samples })
}

pub fn encode(rows: usize, cols: usize, samples: &[u8]) -> Vec<u8> {
    debug_assert_eq!(samples.len(), rows * cols);
    let mut out = format!("P5\n{cols} {rows}\n255\n").into_bytes();
    out.extend_from_slice(samples);
    out
}

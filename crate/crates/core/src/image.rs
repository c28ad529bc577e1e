//! Image and mask value types plus the metrics shared by every algorithm.
//!
//! Storage is row-major and indexing is always `(row, col)`.

use crate::error::{Error, Result};

/// Grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    pixels: Vec<f64>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, pixels: Vec<f64>) -> Result<Self> {
        check_dims(rows, cols)?;
        if pixels.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: pixels.len(),
            });
        }
        if let Some((index, &value)) = pixels.iter().enumerate().find(|(_, p)| !(0.0..=1.0).contains(*p)) {
            return Err(Error::IntensityOutOfRange { index, value });
        }
        Ok(Self { rows, cols, pixels })
    }

    /// Image with every pixel set to `value`, clamped into `[0, 1]`.
    pub fn filled(rows: usize, cols: usize, value: f64) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            pixels: vec![clamp_unit(value); rows * cols],
        })
    }

    pub fn zeros(rows: usize, cols: usize) -> Result<Self> {
        Self::filled(rows, cols, 0.0)
    }

    /// Builds an image from a per-pixel function. Values are clamped into
    /// `[0, 1]`; NaN maps to 0.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut pixels = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                pixels.push(clamp_unit(f(r, c)));
            }
        }
        Ok(Self { rows, cols, pixels })
    }

    /// Maps 8-bit samples by `v / 255`.
    pub fn from_u8(rows: usize, cols: usize, samples: &[u8]) -> Result<Self> {
        check_dims(rows, cols)?;
        if samples.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: samples.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            pixels: samples.iter().map(|&v| f64::from(v) / 255.0).collect(),
        })
    }

    /// Quantizes back to 8 bits with round-to-nearest.
    pub fn to_u8(&self) -> Vec<u8> {
        self.pixels
            .iter()
            .map(|&p| (p * 255.0).round().clamp(0.0, 255.0) as u8)
            .collect()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.pixels.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.pixels.is_empty()
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.pixels[row * self.cols + col]
    }

    /// Sets a pixel, clamping the value into `[0, 1]`.
    #[inline]
    pub fn set(&mut self, row: usize, col: usize, value: f64) {
        self.pixels[row * self.cols + col] = clamp_unit(value);
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Callers must keep every value inside `[0, 1]`.
    pub(crate) fn pixels_mut(&mut self) -> &mut [f64] {
        &mut self.pixels
    }

    pub(crate) fn from_raw(rows: usize, cols: usize, pixels: Vec<f64>) -> Self {
        debug_assert_eq!(pixels.len(), rows * cols);
        Self { rows, cols, pixels }
    }

    pub fn min_max(&self) -> (f64, f64) {
        self.pixels
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| {
                (lo.min(p), hi.max(p))
            })
    }

    pub fn mean(&self) -> f64 {
        self.pixels.iter().sum::<f64>() / self.pixels.len() as f64
    }

    /// Copies out the sub-image covered by `region`.
    pub fn crop(&self, region: &PatchCoords) -> Result<GrayImage> {
        if region.rows == 0
            || region.cols == 0
            || region.top + region.rows > self.rows
            || region.left + region.cols > self.cols
        {
            return Err(Error::InvalidConfig(format!(
                "region {region:?} does not fit a {}x{} image",
                self.rows, self.cols
            )));
        }
        let mut pixels = Vec::with_capacity(region.rows * region.cols);
        for r in region.top..region.top + region.rows {
            let start = r * self.cols + region.left;
            pixels.extend_from_slice(&self.pixels[start..start + region.cols]);
        }
        Ok(Self::from_raw(region.rows, region.cols, pixels))
    }

    /// Transposed copy, `out(r, c) = self(c, r)`.
    pub fn transpose(&self) -> GrayImage {
        let mut pixels = Vec::with_capacity(self.pixels.len());
        for c in 0..self.cols {
            for r in 0..self.rows {
                pixels.push(self.get(r, c));
            }
        }
        Self::from_raw(self.cols, self.rows, pixels)
    }

    pub(crate) fn check_same_dims(&self, rows: usize, cols: usize) -> Result<()> {
        if self.rows != rows || self.cols != cols {
            return Err(Error::DimensionMismatch {
                left_rows: self.rows,
                left_cols: self.cols,
                right_rows: rows,
                right_cols: cols,
            });
        }
        Ok(())
    }
}

/// Binary mask aligned with an image: `true` marks a known pixel, `false` a
/// missing one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mask {
    rows: usize,
    cols: usize,
    bits: Vec<bool>,
}

impl Mask {
    pub fn new(rows: usize, cols: usize, bits: Vec<bool>) -> Result<Self> {
        check_dims(rows, cols)?;
        if bits.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: bits.len(),
            });
        }
        Ok(Self { rows, cols, bits })
    }

    pub fn all_known(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            bits: vec![true; rows * cols],
        })
    }

    pub fn all_missing(rows: usize, cols: usize) -> Result<Self> {
        check_dims(rows, cols)?;
        Ok(Self {
            rows,
            cols,
            bits: vec![false; rows * cols],
        })
    }

    /// `f(row, col)` returns whether the pixel is known.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> bool) -> Result<Self> {
        check_dims(rows, cols)?;
        let mut bits = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                bits.push(f(r, c));
            }
        }
        Ok(Self { rows, cols, bits })
    }

    /// Mask-file convention: 0 is missing, anything else is known.
    pub fn from_u8(rows: usize, cols: usize, samples: &[u8]) -> Result<Self> {
        check_dims(rows, cols)?;
        if samples.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                found: samples.len(),
            });
        }
        Ok(Self {
            rows,
            cols,
            bits: samples.iter().map(|&v| v != 0).collect(),
        })
    }

    /// Known pixels become 255, missing ones 0.
    pub fn to_u8(&self) -> Vec<u8> {
        self.bits.iter().map(|&b| if b { 255 } else { 0 }).collect()
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn dims(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    #[inline]
    pub fn is_known(&self, row: usize, col: usize) -> bool {
        self.bits[row * self.cols + col]
    }

    pub fn set(&mut self, row: usize, col: usize, known: bool) {
        self.bits[row * self.cols + col] = known;
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn known_count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn missing_count(&self) -> usize {
        self.bits.len() - self.known_count()
    }

    pub fn missing_fraction(&self) -> f64 {
        self.missing_count() as f64 / self.bits.len() as f64
    }

    pub fn crop(&self, region: &PatchCoords) -> Result<Mask> {
        if region.rows == 0
            || region.cols == 0
            || region.top + region.rows > self.rows
            || region.left + region.cols > self.cols
        {
            return Err(Error::InvalidConfig(format!(
                "region {region:?} does not fit a {}x{} mask",
                self.rows, self.cols
            )));
        }
        let mut bits = Vec::with_capacity(region.rows * region.cols);
        for r in region.top..region.top + region.rows {
            let start = r * self.cols + region.left;
            bits.extend_from_slice(&self.bits[start..start + region.cols]);
        }
        Ok(Mask {
            rows: region.rows,
            cols: region.cols,
            bits,
        })
    }

    pub(crate) fn check_matches(&self, img: &GrayImage) -> Result<()> {
        img.check_same_dims(self.rows, self.cols)
    }
}

/// Rectangular region of an image. Patches are nominally `size x size`;
/// trailing patches are clipped to the image so `rows`/`cols` may be smaller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PatchCoords {
    pub top: usize,
    pub left: usize,
    pub size: usize,
    pub rows: usize,
    pub cols: usize,
}

impl PatchCoords {
    pub fn contains(&self, row: usize, col: usize) -> bool {
        row >= self.top && row < self.top + self.rows && col >= self.left && col < self.left + self.cols
    }

    /// Center of the region in continuous `(row, col)` coordinates.
    pub fn center(&self) -> (f64, f64) {
        (
            self.top as f64 + (self.rows as f64 - 1.0) / 2.0,
            self.left as f64 + (self.cols as f64 - 1.0) / 2.0,
        )
    }
}

fn check_dims(rows: usize, cols: usize) -> Result<()> {
    if rows == 0 || cols == 0 {
        return Err(Error::EmptyDimensions { rows, cols });
    }
    Ok(())
}

#[inline]
fn clamp_unit(v: f64) -> f64 {
    if v.is_nan() {
        0.0
    } else {
        v.clamp(0.0, 1.0)
    }
}

fn sum_sq_diff(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    a.check_same_dims(b.rows, b.cols)?;
    Ok(a.pixels.iter().zip(&b.pixels).map(|(x, y)| (x - y) * (x - y)).sum())
}

/// `sqrt(sum((a - b)^2))`.
pub fn frobenius_distance(a: &GrayImage, b: &GrayImage) -> Result<f64> {
    sum_sq_diff(a, b).map(f64::sqrt)
}

/// Mean squared error over all pixels, normalized by the actual pixel count.
pub fn mse(original: &GrayImage, reconstructed: &GrayImage) -> Result<f64> {
    Ok(sum_sq_diff(original, reconstructed)? / original.len() as f64)
}

/// Extends the image by `width` pixels on every side, copying the nearest
/// edge pixel outward.
pub fn replicate_pad(img: &GrayImage, width: usize) -> Result<GrayImage> {
    if width == 0 {
        return Err(Error::InvalidPadWidth);
    }
    let rows = img.rows + 2 * width;
    let cols = img.cols + 2 * width;
    let mut pixels = Vec::with_capacity(rows * cols);
    for r in 0..rows {
        let src_r = r.saturating_sub(width).min(img.rows - 1);
        for c in 0..cols {
            let src_c = c.saturating_sub(width).min(img.cols - 1);
            pixels.push(img.get(src_r, src_c));
        }
    }
    Ok(GrayImage::from_raw(rows, cols, pixels))
}

/// Tiles a `rows x cols` image with `n x n` patches in row-major order.
/// Trailing patches are clipped at the right and bottom edges.
pub fn split_into_patches(rows: usize, cols: usize, n: usize) -> Result<Vec<PatchCoords>> {
    if n < 2 {
        return Err(Error::InvalidPatchSize(n));
    }
    check_dims(rows, cols)?;
    let mut out = Vec::with_capacity(rows.div_ceil(n) * cols.div_ceil(n));
    for top in (0..rows).step_by(n) {
        for left in (0..cols).step_by(n) {
            out.push(PatchCoords {
                top,
                left,
                size: n,
                rows: n.min(rows - top),
                cols: n.min(cols - left),
            });
        }
    }
    Ok(out)
}

/// Known pixels from `original`, missing ones from `diffused`.
pub fn composite(diffused: &GrayImage, original: &GrayImage, mask: &Mask) -> Result<GrayImage> {
    diffused.check_same_dims(original.rows, original.cols)?;
    mask.check_matches(original)?;
    let pixels = diffused
        .pixels
        .iter()
        .zip(&original.pixels)
        .zip(&mask.bits)
        .map(|((&d, &o), &known)| if known { o } else { d })
        .collect();
    Ok(GrayImage::from_raw(original.rows, original.cols, pixels))
}

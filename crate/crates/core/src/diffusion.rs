//! Iterative masked diffusion with a fixed 3x3 kernel.
//!
//! Each iteration convolves the whole image, then restores the known pixels
//! from the input. Iteration stops once the Frobenius norm of the change
//! drops to `epsilon` or `max_iters` is reached.

use crate::error::{Error, Result};
use crate::image::{GrayImage, Mask};
use crate::kernels::Kernel3;

#[cfg(feature = "parallel")]
use rayon::prelude::*;

/// Below this many pixels the row-parallel path costs more than it saves.
#[cfg(feature = "parallel")]
const PARALLEL_MIN_PIXELS: usize = 128 * 128;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffusionConfig {
    /// Convergence threshold on `||I_r - I_prev||_F`.
    pub epsilon: f64,
    /// Hard cap on the number of iterations.
    pub max_iters: usize,
}

impl Default for DiffusionConfig {
    fn default() -> Self {
        Self {
            epsilon: 1e-3,
            max_iters: 10_000,
        }
    }
}

impl DiffusionConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.epsilon.is_finite() || self.epsilon < 0.0 {
            return Err(Error::InvalidConfig(format!(
                "epsilon must be a finite non-negative number, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::InvalidConfig("max_iters must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiffusionResult {
    pub image: GrayImage,
    pub iterations: usize,
    /// Frobenius norm of the last update.
    pub final_delta: f64,
    pub converged: bool,
}

/// Correlates `img` with `k` (no kernel flip) under replicated borders.
pub fn convolve(img: &GrayImage, k: &Kernel3) -> GrayImage {
    let mut out = vec![0.0; img.len()];
    convolve_into(img.pixels(), img.rows(), img.cols(), k, &mut out);
    for v in &mut out {
        *v = v.clamp(0.0, 1.0);
    }
    GrayImage::from_raw(img.rows(), img.cols(), out)
}

fn convolve_row(src: &[f64], rows: usize, cols: usize, k: &Kernel3, r: usize, out: &mut [f64]) {
    let w = k.weights();
    let up = &src[r.saturating_sub(1) * cols..][..cols];
    let mid = &src[r * cols..][..cols];
    let down = &src[(r + 1).min(rows - 1) * cols..][..cols];
    for (c, o) in out.iter_mut().enumerate() {
        let cl = c.saturating_sub(1);
        let cr = (c + 1).min(cols - 1);
        *o = w[0][0] * up[cl]
            + w[0][1] * up[c]
            + w[0][2] * up[cr]
            + w[1][0] * mid[cl]
            + w[1][1] * mid[c]
            + w[1][2] * mid[cr]
            + w[2][0] * down[cl]
            + w[2][1] * down[c]
            + w[2][2] * down[cr];
    }
}

pub(crate) fn convolve_into(src: &[f64], rows: usize, cols: usize, k: &Kernel3, out: &mut [f64]) {
    debug_assert_eq!(src.len(), rows * cols);
    debug_assert_eq!(out.len(), rows * cols);
    #[cfg(feature = "parallel")]
    if src.len() >= PARALLEL_MIN_PIXELS {
        out.par_chunks_mut(cols)
            .enumerate()
            .for_each(|(r, row)| convolve_row(src, rows, cols, k, r, row));
        return;
    }
    for (r, row) in out.chunks_mut(cols).enumerate() {
        convolve_row(src, rows, cols, k, r, row);
    }
}

/// One convolve-then-restore step. Returns the new image and the Frobenius
/// norm of the change from `current`.
pub fn diffusion_step(current: &GrayImage, original: &GrayImage, mask: &Mask, k: &Kernel3) -> Result<(GrayImage, f64)> {
    mask.check_matches(original)?;
    mask.check_matches(current)?;
    let k = k.normalize()?;
    let mut buf = vec![0.0; current.len()];
    let mut next = current.clone();
    let delta = step_in_place(
        next.pixels_mut(),
        original.pixels(),
        mask.bits(),
        current.rows(),
        current.cols(),
        &k,
        &mut buf,
    );
    Ok((next, delta))
}

fn step_in_place(
    current: &mut [f64],
    original: &[f64],
    known: &[bool],
    rows: usize,
    cols: usize,
    k: &Kernel3,
    buf: &mut [f64],
) -> f64 {
    convolve_into(current, rows, cols, k, buf);
    let mut sum_sq = 0.0;
    for (((cur, &conv), &orig), &is_known) in current.iter_mut().zip(buf.iter()).zip(original).zip(known) {
        let next = if is_known { orig } else { conv.clamp(0.0, 1.0) };
        let d = next - *cur;
        sum_sq += d * d;
        *cur = next;
    }
    sum_sq.sqrt()
}

/// Fills the missing pixels of `damaged` by iterated diffusion with `k`.
///
/// The kernel is normalized first. Known pixels of the result are
/// bit-identical to the input.
pub fn diffuse(damaged: &GrayImage, mask: &Mask, k: &Kernel3, cfg: &DiffusionConfig) -> Result<DiffusionResult> {
    diffuse_observed(damaged, mask, k, cfg, |_, _| {})
}

/// [`diffuse`] that calls `observer(iteration, image)` after every iteration.
pub fn diffuse_observed(
    damaged: &GrayImage,
    mask: &Mask,
    k: &Kernel3,
    cfg: &DiffusionConfig,
    mut observer: impl FnMut(usize, &GrayImage),
) -> Result<DiffusionResult> {
    mask.check_matches(damaged)?;
    cfg.validate()?;
    let k = k.normalize()?;
    let (rows, cols) = damaged.dims();

    let mut current = damaged.clone();
    let mut buf = vec![0.0; damaged.len()];
    // The first comparison is against the all-zero I_prev.
    let mut delta = current.pixels().iter().map(|p| p * p).sum::<f64>().sqrt();
    let mut iterations = 0;
    while delta > cfg.epsilon && iterations < cfg.max_iters {
        delta = step_in_place(
            current.pixels_mut(),
            damaged.pixels(),
            mask.bits(),
            rows,
            cols,
            &k,
            &mut buf,
        );
        iterations += 1;
        observer(iterations, &current);
    }
    Ok(DiffusionResult {
        image: current,
        iterations,
        final_delta: delta,
        converged: delta <= cfg.epsilon,
    })
}

//! Edge-angle heuristic for an image patch based on circular shift
//! differences.
//!
//! `v` sums differences between horizontally adjacent pixels (large for
//! vertical stripes), `h` between vertically adjacent pixels (large for
//! horizontal stripes) and the diagonal sum compares each pixel with the one
//! diagonally right-below it. All shifts wrap around the patch.

use crate::image::GrayImage;

/// Slant ratio above which a patch is treated as right-slanted.
pub const DEFAULT_SLANT_THRESHOLD: f64 = 0.6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PatchMetrics {
    pub v: f64,
    pub h: f64,
    /// Raw diagonal difference sum, before normalization into `d`.
    pub diagonal: f64,
    /// `(1 + diagonal) / (1 + v + h)`.
    pub d: f64,
    /// `90 (h + 1) / (h + v + 1)`, in `(0, 90]`.
    pub theta1: f64,
    /// Edge angle in degrees, reduced into `(-90, 90]`.
    pub theta: f64,
}

/// `sum |P(r, c) - P((r + dy) mod rows, (c + dx) mod cols)|`.
pub fn shift_diff(patch: &GrayImage, dx: isize, dy: isize) -> f64 {
    let (rows, cols) = patch.dims();
    let sr = dy.rem_euclid(rows as isize) as usize;
    let sc = dx.rem_euclid(cols as isize) as usize;
    let mut acc = 0.0;
    for r in 0..rows {
        let r2 = (r + sr) % rows;
        for c in 0..cols {
            let c2 = (c + sc) % cols;
            acc += (patch.get(r, c) - patch.get(r2, c2)).abs();
        }
    }
    acc
}

pub fn patch_metrics(patch: &GrayImage) -> PatchMetrics {
    patch_metrics_with_threshold(patch, DEFAULT_SLANT_THRESHOLD)
}

pub fn patch_metrics_with_threshold(patch: &GrayImage, slant_threshold: f64) -> PatchMetrics {
    let v = shift_diff(patch, 1, 0);
    let h = shift_diff(patch, 0, 1);
    let diagonal = shift_diff(patch, 1, 1);
    let theta1 = 90.0 * (h + 1.0) / (h + v + 1.0);
    let d = (1.0 + diagonal) / (1.0 + v + h);
    let raw = if d > slant_threshold {
        -90.0 + 90.0 * d + theta1
    } else {
        -90.0 + 90.0 - theta1
    };
    PatchMetrics {
        v,
        h,
        diagonal,
        d,
        theta1,
        theta: reduce_angle(raw),
    }
}

/// Wraps an angle into `(-90, 90]`; kernel orientation is 180-degree periodic.
pub fn reduce_angle(theta: f64) -> f64 {
    let mut t = theta.rem_euclid(180.0);
    if t > 90.0 {
        t -= 180.0;
    }
    if t <= -90.0 {
        t += 180.0;
    }
    t
}

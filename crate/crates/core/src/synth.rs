//! Deterministic synthetic test images with oriented structure.

use std::f64::consts::TAU;

use crate::image::GrayImage;

/// Sinusoidal stripes whose lines run at `angle_deg` from the horizontal
/// (measured with the row axis pointing down, so 90 gives vertical lines).
pub fn stripes(rows: usize, cols: usize, angle_deg: f64, period: f64) -> GrayImage {
    let (s, c) = angle_deg.to_radians().sin_cos();
    GrayImage::from_fn(rows.max(1), cols.max(1), |r, col| {
        let across = -(col as f64) * s + r as f64 * c;
        0.5 + 0.5 * (TAU * across / period).cos()
    })
    .expect("dimensions are positive")
}

/// Concentric rings around the image center.
pub fn rings(rows: usize, cols: usize, period: f64) -> GrayImage {
    let (cr, cc) = ((rows as f64 - 1.0) / 2.0, (cols as f64 - 1.0) / 2.0);
    GrayImage::from_fn(rows.max(1), cols.max(1), |r, c| {
        let rad = ((r as f64 - cr).powi(2) + (c as f64 - cc).powi(2)).sqrt();
        0.5 + 0.5 * (TAU * rad / period).cos()
    })
    .expect("dimensions are positive")
}

/// Horizontal stripes bent by a slow sine wave, giving orientations that
/// drift across the image.
pub fn wavy_stripes(rows: usize, cols: usize, period: f64, amplitude: f64, wavelength: f64) -> GrayImage {
    GrayImage::from_fn(rows.max(1), cols.max(1), |r, c| {
        let y = r as f64 + amplitude * (TAU * c as f64 / wavelength).sin();
        0.5 + 0.5 * (TAU * y / period).cos()
    })
    .expect("dimensions are positive")
}

/// Five square images covering horizontal, vertical, slanted, curved and
/// drifting orientations, for benchmarks that need no image files.
pub fn oriented_suite(size: usize) -> Vec<(&'static str, GrayImage)> {
    let n = size.max(1);
    vec![
        ("stripes-h", stripes(n, n, 0.0, 12.0)),
        ("stripes-v", stripes(n, n, 90.0, 12.0)),
        ("stripes-30", stripes(n, n, 30.0, 10.0)),
        ("rings", rings(n, n, 14.0)),
        ("wavy", wavy_stripes(n, n, 10.0, n as f64 / 16.0, n as f64 / 2.0)),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stripe_orientation() {
        let h = stripes(8, 8, 0.0, 4.0);
        assert!((0..8).all(|c| h.get(3, c) == h.get(3, 0)));
        let v = stripes(8, 8, 90.0, 4.0);
        assert!((0..8).all(|r| (v.get(r, 5) - v.get(0, 5)).abs() < 1e-12));
    }

    #[test]
    fn values_in_range() {
        for im in [
            rings(30, 20, 5.0),
            wavy_stripes(20, 30, 6.0, 3.0, 25.0),
            stripes(9, 9, 33.0, 3.0),
        ] {
            let (lo, hi) = im.min_max();
            assert!(lo >= 0.0 && hi <= 1.0);
        }
    }

    #[test]
    fn suite_is_square() {
        let suite = oriented_suite(24);
        assert_eq!(suite.len(), 5);
        assert!(suite.iter().all(|(_, im)| im.dims() == (24, 24)));
    }
}

//! 3x3 diffusion kernels and construction of the rotated directional kernel.

use crate::error::{Error, Result};
use crate::image::GrayImage;

/// Catmull-Rom parameter of the cubic convolution kernel.
const CUBIC_A: f64 = -0.5;

/// Non-negative 3x3 weight grid, indexed `[row][col]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Kernel3 {
    weights: [[f64; 3]; 3],
}

impl Kernel3 {
    pub fn new(weights: [[f64; 3]; 3]) -> Result<Self> {
        if weights.iter().flatten().any(|w| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidKernel);
        }
        Ok(Self { weights })
    }

    /// Four-neighbour average.
    pub fn diamond() -> Self {
        Self {
            weights: [[0.0, 0.25, 0.0], [0.25, 0.0, 0.25], [0.0, 0.25, 0.0]],
        }
    }

    /// Kernel weighted along the main diagonal (top-left to bottom-right).
    pub fn diag() -> Self {
        Self {
            weights: [[0.38, 0.04, 0.04], [0.04, 0.0, 0.04], [0.04, 0.04, 0.38]],
        }
    }

    pub fn weights(&self) -> &[[f64; 3]; 3] {
        &self.weights
    }

    #[inline]
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.weights[row][col]
    }

    pub fn sum(&self) -> f64 {
        self.weights.iter().flatten().sum()
    }

    /// Scales the weights to sum to one.
    pub fn normalize(&self) -> Result<Self> {
        let total = self.sum();
        if total <= 0.0 {
            return Err(Error::DegenerateKernel);
        }
        let mut weights = self.weights;
        weights.iter_mut().flatten().for_each(|w| *w /= total);
        Ok(Self { weights })
    }

    /// Rotates the kernel about its center cell by `angle_deg`, using the
    /// rotation matrix `[[cos, -sin], [sin, cos]]` on `(col, row)` offsets
    /// (row axis pointing down). Each output cell samples the source at the
    /// inversely rotated position with bicubic interpolation; negative
    /// overshoot is clamped to zero and the result renormalized.
    pub fn rotated(&self, angle_deg: f64) -> Result<Self> {
        if !angle_deg.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "rotation angle {angle_deg} is not finite"
            )));
        }
        let (cos, sin) = cos_sin_deg(angle_deg);
        let mut weights = [[0.0; 3]; 3];
        for (r, row) in weights.iter_mut().enumerate() {
            for (c, w) in row.iter_mut().enumerate() {
                let dx = c as f64 - 1.0;
                let dy = r as f64 - 1.0;
                let sx = cos * dx + sin * dy;
                let sy = -sin * dx + cos * dy;
                *w = bicubic_sample(&self.weights, 1.0 + sx, 1.0 + sy).max(0.0);
            }
        }
        Self { weights }.normalize()
    }

    /// Grid positions of the two largest weights, largest first. Ties resolve
    /// to the earlier cell in row-major order.
    pub fn dominant_cells(&self) -> [(usize, usize); 2] {
        let mut cells: Vec<(usize, usize)> = (0..9).map(|i| (i / 3, i % 3)).collect();
        cells.sort_by(|a, b| self.get(b.0, b.1).total_cmp(&self.get(a.0, a.1)));
        [cells[0], cells[1]]
    }
}

/// Directional kernel for an edge angle `theta_deg`: the diagonal kernel
/// rotated by `theta_deg + 45`.
pub fn rotate_kernel(theta_deg: f64) -> Result<Kernel3> {
    Kernel3::diag().rotated(theta_deg + 45.0)
}

/// Exact values at multiples of 90 degrees so right-angle rotations are pure
/// cell permutations.
fn cos_sin_deg(deg: f64) -> (f64, f64) {
    let d = deg.rem_euclid(360.0);
    if d == 0.0 {
        (1.0, 0.0)
    } else if d == 90.0 {
        (0.0, 1.0)
    } else if d == 180.0 {
        (-1.0, 0.0)
    } else if d == 270.0 {
        (0.0, -1.0)
    } else {
        let rad = d.to_radians();
        (rad.cos(), rad.sin())
    }
}

/// Cubic convolution weight for a tap at distance `t`.
#[inline]
pub fn cubic_weight(t: f64) -> f64 {
    let t = t.abs();
    if t <= 1.0 {
        (CUBIC_A + 2.0) * t * t * t - (CUBIC_A + 3.0) * t * t + 1.0
    } else if t < 2.0 {
        CUBIC_A * (t * t * t - 5.0 * t * t + 8.0 * t - 4.0)
    } else {
        0.0
    }
}

fn sample_with(rows: usize, cols: usize, get: impl Fn(usize, usize) -> f64, x: f64, y: f64) -> f64 {
    let x0 = x.floor();
    let y0 = y.floor();
    let clamp = |v: f64, n: usize| -> usize { v.clamp(0.0, (n - 1) as f64) as usize };
    let mut acc = 0.0;
    for j in -1..=2 {
        let ny = y0 + f64::from(j);
        let wy = cubic_weight(y - ny);
        if wy == 0.0 {
            continue;
        }
        let r = clamp(ny, rows);
        for i in -1..=2 {
            let nx = x0 + f64::from(i);
            let wx = cubic_weight(x - nx);
            if wx == 0.0 {
                continue;
            }
            acc += wy * wx * get(r, clamp(nx, cols));
        }
    }
    acc
}

/// Bicubic (Catmull-Rom) sample of a 3x3 grid at column `x`, row `y`.
/// Integer coordinates hit cells exactly; the grid is extended by edge
/// replication outside its support.
pub fn bicubic_sample(grid: &[[f64; 3]; 3], x: f64, y: f64) -> f64 {
    sample_with(3, 3, |r, c| grid[r][c], x, y)
}

/// Same interpolation over an arbitrary image. The result is not clamped.
pub fn bicubic_sample_image(img: &GrayImage, x: f64, y: f64) -> f64 {
    sample_with(img.rows(), img.cols(), |r, c| img.get(r, c), x, y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn rot90_cw_cells(k: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
        // Permutation oracle: out(r, c) = in(2 - c, r) is what R(90) does to
        // (col, row) offsets with the row axis pointing down.
        let mut out = [[0.0; 3]; 3];
        for r in 0..3 {
            for c in 0..3 {
                out[r][c] = k[2 - c][r];
            }
        }
        out
    }

    #[test]
    fn diamond_values() {
        let k = Kernel3::diamond();
        assert_eq!(k.get(1, 1), 0.0);
        assert_eq!(k.sum(), 1.0);
        assert_eq!(rot90_cw_cells(k.weights()), *k.weights());
    }

    #[test]
    fn diag_values() {
        let k = Kernel3::diag();
        assert_eq!(k.get(0, 0), 0.38);
        assert_eq!(k.get(2, 2), 0.38);
        assert_abs_diff_eq!(k.sum(), 1.0, epsilon = 1e-15);
        let w = k.weights();
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(w[r][c], w[2 - r][2 - c]);
            }
        }
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(Kernel3::diamond().normalize().unwrap(), Kernel3::diamond());
        let ones = Kernel3::new([[1.0; 3]; 3]).unwrap().normalize().unwrap();
        assert!(ones.weights().iter().flatten().all(|&w| w == 1.0 / 9.0));
        let center = Kernel3::new([[0.0, 0.0, 0.0], [0.0, 2.0, 0.0], [0.0, 0.0, 0.0]])
            .unwrap()
            .normalize()
            .unwrap();
        assert_eq!(center.get(1, 1), 1.0);
        assert_eq!(
            Kernel3::new([[0.0; 3]; 3]).unwrap().normalize(),
            Err(Error::DegenerateKernel)
        );
        assert_eq!(Kernel3::new([[-0.1; 3]; 3]), Err(Error::InvalidKernel));
    }

    #[test]
    fn cubic_weights_partition_unity() {
        for i in 0..=20 {
            let t = f64::from(i) / 20.0;
            let s = cubic_weight(t + 1.0) + cubic_weight(t) + cubic_weight(t - 1.0) + cubic_weight(t - 2.0);
            assert_abs_diff_eq!(s, 1.0, epsilon = 1e-14);
        }
        assert_eq!(cubic_weight(0.0), 1.0);
        assert_eq!(cubic_weight(1.0), 0.0);
        assert_eq!(cubic_weight(2.0), 0.0);
        assert_eq!(cubic_weight(0.5), 0.5625);
        assert_eq!(cubic_weight(1.5), -0.0625);
    }

    #[test]
    fn bicubic_constant_and_nodes() {
        let constant = [[0.3; 3]; 3];
        for &(x, y) in &[(0.2, 1.7), (-0.5, 2.9), (1.0, 1.0), (3.4, -1.2)] {
            assert_abs_diff_eq!(bicubic_sample(&constant, x, y), 0.3, epsilon = 1e-15);
        }
        let g = [[0.1, 0.2, 0.3], [0.4, 0.5, 0.6], [0.7, 0.8, 0.9]];
        for r in 0..3 {
            for c in 0..3 {
                assert_eq!(bicubic_sample(&g, c as f64, r as f64), g[r][c]);
            }
        }
    }

    #[test]
    fn bicubic_linear_ramp() {
        // Across the ramp axis every tap sees the same column value.
        let ramp = [[0.0, 0.5, 1.0]; 3];
        assert_eq!(bicubic_sample(&ramp, 1.0, 0.5), 0.5);
        assert_eq!(bicubic_sample(&ramp, 2.0, 1.5), 1.0);
        // Along the ramp, edge replication on a 3-wide grid flattens the
        // outer tap: weights (-1/16, 9/16, 9/16, -1/16) over taps
        // (0, 0, 0.5, 1) give 9/32 - 1/16 = 7/32 instead of the mean 1/4.
        assert_eq!(bicubic_sample(&ramp, 0.5, 1.0), 7.0 / 32.0);
        // With all four taps inside the support, linear data is reproduced.
        let wide = GrayImage::from_fn(2, 6, |_, c| c as f64 / 5.0).unwrap();
        for i in 1..4 {
            let x = i as f64 + 0.5;
            let mean = (wide.get(0, i) + wide.get(0, i + 1)) / 2.0;
            assert_abs_diff_eq!(bicubic_sample_image(&wide, x, 0.0), mean, epsilon = 1e-15);
        }
    }

    #[test]
    fn rotation_right_angles_are_permutations() {
        let diag = *Kernel3::diag().weights();
        assert_eq!(rotate_kernel(-45.0).unwrap(), Kernel3::diag());
        assert_eq!(rotate_kernel(135.0).unwrap(), Kernel3::diag());
        let quarter = rotate_kernel(45.0).unwrap();
        assert_eq!(*quarter.weights(), rot90_cw_cells(&diag));
        assert_eq!(quarter.get(0, 2), 0.38);
        assert_eq!(quarter.get(2, 0), 0.38);
        assert_eq!(quarter.get(0, 0), 0.04);
        assert_eq!(quarter.get(1, 1), 0.0);
        assert_eq!(*rotate_kernel(225.0).unwrap().weights(), rot90_cw_cells(&diag));
    }

    #[test]
    fn rotation_is_normalized_and_nonnegative() {
        for i in -360..=360 {
            let theta = f64::from(i) * 0.5;
            let k = rotate_kernel(theta).unwrap();
            assert_abs_diff_eq!(k.sum(), 1.0, epsilon = 1e-12);
            assert!(k.weights().iter().flatten().all(|&w| w >= 0.0));
            assert!(k.get(1, 1) < 0.38);
        }
    }

    #[test]
    fn rotation_periodic() {
        for i in 0..90 {
            let theta = f64::from(i) * 4.1 - 180.0;
            let a = rotate_kernel(theta).unwrap();
            let b = rotate_kernel(theta + 360.0).unwrap();
            for (x, y) in a.weights().iter().flatten().zip(b.weights().iter().flatten()) {
                assert_abs_diff_eq!(x, y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn rotation_to_horizontal() {
        // 135 degrees turns the main diagonal onto the middle row.
        let k = Kernel3::diag().rotated(135.0).unwrap();
        let mut dom = k.dominant_cells();
        dom.sort();
        assert_eq!(dom, [(1, 0), (1, 2)]);
        let k = Kernel3::diag().rotated(45.0).unwrap();
        let mut dom = k.dominant_cells();
        dom.sort();
        assert_eq!(dom, [(0, 1), (2, 1)]);
    }

    #[test]
    fn rotation_rejects_nan() {
        assert!(rotate_kernel(f64::NAN).is_err());
    }
}

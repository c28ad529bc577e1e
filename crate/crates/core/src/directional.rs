//! Directional diffusion: regular diffusion estimate, per-patch edge angle,
//! per-patch rotated kernel, per-patch diffusion and reassembly.

use crate::diffusion::{diffuse, DiffusionConfig, DiffusionResult};
use crate::directionality::{patch_metrics_with_threshold, DEFAULT_SLANT_THRESHOLD};
use crate::error::{Error, Result};
use crate::image::{split_into_patches, GrayImage, Mask, PatchCoords};
use crate::kernels::{rotate_kernel, Kernel3};

#[cfg(feature = "parallel")]
use rayon::prelude::*;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DirectionalConfig {
    pub patch_size: usize,
    /// Used for both the estimate pass and every patch pass.
    pub diffusion: DiffusionConfig,
    pub slant_threshold: f64,
}

impl Default for DirectionalConfig {
    fn default() -> Self {
        Self {
            patch_size: 16,
            diffusion: DiffusionConfig::default(),
            slant_threshold: DEFAULT_SLANT_THRESHOLD,
        }
    }
}

impl DirectionalConfig {
    pub fn with_patch_size(patch_size: usize) -> Self {
        Self {
            patch_size,
            ..Self::default()
        }
    }
}

/// Patches with their inferred angle (degrees) and directional kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchGrid {
    coords: Vec<PatchCoords>,
    angles: Vec<f64>,
    kernels: Vec<Kernel3>,
}

impl PatchGrid {
    /// Splits `estimate` into patches and runs the angle heuristic on each.
    pub fn infer(estimate: &GrayImage, patch_size: usize, slant_threshold: f64) -> Result<Self> {
        let coords = split_into_patches(estimate.rows(), estimate.cols(), patch_size)?;
        let angle_of = |pc: &PatchCoords| -> Result<f64> {
            let patch = estimate.crop(pc)?;
            Ok(patch_metrics_with_threshold(&patch, slant_threshold).theta)
        };
        #[cfg(feature = "parallel")]
        let angles = coords.par_iter().map(angle_of).collect::<Result<Vec<_>>>()?;
        #[cfg(not(feature = "parallel"))]
        let angles = coords.iter().map(angle_of).collect::<Result<Vec<_>>>()?;
        Self::from_angles(coords, angles)
    }

    /// Grid with caller-chosen angles.
    pub fn from_angles(coords: Vec<PatchCoords>, angles: Vec<f64>) -> Result<Self> {
        if coords.len() != angles.len() {
            return Err(Error::InvalidConfig(format!(
                "{} patches but {} angles",
                coords.len(),
                angles.len()
            )));
        }
        let kernels = angles
            .iter()
            .map(|&theta| rotate_kernel(theta))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            coords,
            angles,
            kernels,
        })
    }

    pub fn coords(&self) -> &[PatchCoords] {
        &self.coords
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn kernels(&self) -> &[Kernel3] {
        &self.kernels
    }

    pub fn len(&self) -> usize {
        self.coords.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn empty() -> Self {
        Self {
            coords: Vec::new(),
            angles: Vec::new(),
            kernels: Vec::new(),
        }
    }
}

/// Diffused interior of one patch.
#[derive(Debug, Clone, PartialEq)]
pub struct PatchFill {
    pub coords: PatchCoords,
    pub interior: GrayImage,
    pub iterations: usize,
    pub converged: bool,
}

impl PatchFill {
    pub fn write_into(&self, target: &mut GrayImage) {
        let pc = &self.coords;
        let cols = target.cols();
        let dst = target.pixels_mut();
        for r in 0..pc.rows {
            let start = (pc.top + r) * cols + pc.left;
            dst[start..start + pc.cols].copy_from_slice(&self.interior.pixels()[r * pc.cols..(r + 1) * pc.cols]);
        }
    }
}

/// Diffuses a single patch with `kernel`.
///
/// The patch is cut from `estimate` together with a one-pixel halo (where
/// the image extends that far). Halo pixels are held fixed; inside the patch
/// the mask decides which pixels are free.
pub fn diffuse_patch(
    estimate: &GrayImage,
    mask: &Mask,
    coords: &PatchCoords,
    kernel: &Kernel3,
    cfg: &DiffusionConfig,
) -> Result<PatchFill> {
    mask.check_matches(estimate)?;
    let top = coords.top.saturating_sub(1);
    let left = coords.left.saturating_sub(1);
    let bottom = (coords.top + coords.rows + 1).min(estimate.rows());
    let right = (coords.left + coords.cols + 1).min(estimate.cols());
    let region = PatchCoords {
        top,
        left,
        size: coords.size,
        rows: bottom - top,
        cols: right - left,
    };
    let sub = estimate.crop(&region)?;
    let mut sub_mask = mask.crop(&region)?;
    for r in 0..region.rows {
        for c in 0..region.cols {
            if !coords.contains(top + r, left + c) {
                sub_mask.set(r, c, true);
            }
        }
    }
    let res = diffuse(&sub, &sub_mask, kernel, cfg)?;
    let inner = PatchCoords {
        top: coords.top - top,
        left: coords.left - left,
        size: coords.size,
        rows: coords.rows,
        cols: coords.cols,
    };
    Ok(PatchFill {
        coords: *coords,
        interior: res.image.crop(&inner)?,
        iterations: res.iterations,
        converged: res.converged,
    })
}

/// Runs [`diffuse_patch`] for every patch of `grid` and writes the interiors
/// over a copy of `estimate`. Halos always come from `estimate`, so the
/// result does not depend on the order patches are processed in.
pub fn diffuse_patches(
    estimate: &GrayImage,
    mask: &Mask,
    grid: &PatchGrid,
    cfg: &DiffusionConfig,
) -> Result<(GrayImage, Vec<PatchFill>)> {
    mask.check_matches(estimate)?;
    let run = |i: usize| diffuse_patch(estimate, mask, &grid.coords[i], &grid.kernels[i], cfg);
    #[cfg(feature = "parallel")]
    let fills = (0..grid.len()).into_par_iter().map(run).collect::<Result<Vec<_>>>()?;
    #[cfg(not(feature = "parallel"))]
    let fills = (0..grid.len()).map(run).collect::<Result<Vec<_>>>()?;

    let mut out = estimate.clone();
    for fill in &fills {
        fill.write_into(&mut out);
    }
    Ok((out, fills))
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectionalResult {
    pub image: GrayImage,
    pub grid: PatchGrid,
    /// The regular-diffusion pass the angles were inferred from.
    pub estimate: DiffusionResult,
    pub patch_iterations: Vec<usize>,
    /// Estimate and every patch pass converged.
    pub converged: bool,
}

impl DirectionalResult {
    /// Estimate iterations plus the longest patch pass.
    pub fn iterations(&self) -> usize {
        self.estimate.iterations + self.patch_iterations.iter().copied().max().unwrap_or(0)
    }
}

/// Full directional inpainting of `damaged`.
pub fn inpaint_directional(damaged: &GrayImage, mask: &Mask, cfg: &DirectionalConfig) -> Result<DirectionalResult> {
    mask.check_matches(damaged)?;
    if cfg.patch_size < 2 {
        return Err(Error::InvalidPatchSize(cfg.patch_size));
    }
    let estimate = diffuse(damaged, mask, &Kernel3::diamond(), &cfg.diffusion)?;
    let grid = PatchGrid::infer(&estimate.image, cfg.patch_size, cfg.slant_threshold)?;
    let (image, fills) = diffuse_patches(&estimate.image, mask, &grid, &cfg.diffusion)?;
    let converged = estimate.converged && fills.iter().all(|f| f.converged);
    Ok(DirectionalResult {
        image,
        grid,
        patch_iterations: fills.iter().map(|f| f.iterations).collect(),
        estimate,
        converged,
    })
}

/// Draws one white segment per patch through its center, oriented like the
/// patch kernel's dominant weights, 0.8 patch sizes long.
///
/// An angle of 0 gives a vertical segment and 90 a horizontal one, matching
/// the stripe orientation that produces those angles.
pub fn render_directionality_overlay(img: &GrayImage, grid: &PatchGrid) -> GrayImage {
    let mut out = img.clone();
    for (pc, &theta) in grid.coords().iter().zip(grid.angles()) {
        let (cr, cc) = pc.center();
        let half = 0.4 * pc.size as f64;
        let rad = theta.to_radians();
        // Direction in (col, row) coordinates, row axis down.
        let (dx, dy) = (-rad.sin(), rad.cos());
        draw_segment(
            &mut out,
            (cc - half * dx, cr - half * dy),
            (cc + half * dx, cr + half * dy),
        );
    }
    out
}

fn draw_segment(img: &mut GrayImage, from: (f64, f64), to: (f64, f64)) {
    let steps = (to.0 - from.0).abs().max((to.1 - from.1).abs()).ceil().max(1.0) as usize;
    for i in 0..=steps {
        let t = i as f64 / steps as f64;
        let x = (from.0 + t * (to.0 - from.0)).round();
        let y = (from.1 + t * (to.1 - from.1)).round();
        if x >= 0.0 && y >= 0.0 && (x as usize) < img.cols() && (y as usize) < img.rows() {
            img.set(y as usize, x as usize, 1.0);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::mse;
    use crate::masks::{apply_damage, random_mask};
    use crate::synth;
    use approx::assert_abs_diff_eq;

    #[test]
    fn all_known_is_identity() {
        let im = synth::rings(40, 40, 9.0);
        let mask = Mask::all_known(40, 40).unwrap();
        let res = inpaint_directional(&im, &mask, &DirectionalConfig::default()).unwrap();
        assert_eq!(res.image, im);
        assert!(res.patch_iterations.iter().all(|&i| i == 1));
    }

    #[test]
    fn constant_stays_constant() {
        let im = GrayImage::filled(37, 29, 0.6).unwrap();
        let mask = random_mask(37, 29, 0.5, 3).unwrap();
        let damaged = apply_damage(&im, &mask).unwrap();
        let res = inpaint_directional(&damaged, &mask, &DirectionalConfig::with_patch_size(8)).unwrap();
        for &v in res.image.pixels() {
            assert_abs_diff_eq!(v, 0.6, epsilon = 1e-3);
        }
    }

    #[test]
    fn stripes_with_block_beat_diamond() {
        let original = synth::stripes(64, 64, 0.0, 8.0);
        let mask = crate::masks::rect_mask(64, 64, 24, 24, 16, 16).unwrap();
        let damaged = apply_damage(&original, &mask).unwrap();
        let cfg = DirectionalConfig::with_patch_size(16);
        let regular = diffuse(&damaged, &mask, &Kernel3::diamond(), &cfg.diffusion).unwrap();
        let directional = inpaint_directional(&damaged, &mask, &cfg).unwrap();
        let e_reg = mse(&original, &regular.image).unwrap();
        let e_dir = mse(&original, &directional.image).unwrap();
        assert!(e_dir < e_reg, "directional {e_dir} vs diamond {e_reg}");
        // Patches untouched by the block see clean stripes and get an exactly
        // horizontal kernel.
        for (pc, k) in directional.grid.coords().iter().zip(directional.grid.kernels()) {
            if mask.crop(pc).unwrap().missing_count() == 0 {
                let cells = k.dominant_cells();
                assert_eq!(cells[0].0, cells[1].0);
            }
        }
    }

    #[test]
    fn grid_angles_match_metrics() {
        let im = synth::rings(48, 40, 11.0);
        let grid = PatchGrid::infer(&im, 16, DEFAULT_SLANT_THRESHOLD).unwrap();
        assert_eq!(grid.len(), 9);
        for (pc, &theta) in grid.coords().iter().zip(grid.angles()) {
            let m = crate::directionality::patch_metrics(&im.crop(pc).unwrap());
            assert_eq!(m.theta, theta);
        }
        assert_eq!(grid.kernels().len(), grid.len());
    }

    #[test]
    fn from_angles_length_mismatch() {
        let coords = split_into_patches(8, 8, 4).unwrap();
        assert!(PatchGrid::from_angles(coords, vec![0.0]).is_err());
    }

    #[test]
    fn patch_order_independent() {
        let original = synth::rings(50, 45, 7.0);
        let mask = random_mask(50, 45, 0.4, 11).unwrap();
        let damaged = apply_damage(&original, &mask).unwrap();
        let cfg = DirectionalConfig::with_patch_size(8);
        let res = inpaint_directional(&damaged, &mask, &cfg).unwrap();

        let mut out = res.estimate.image.clone();
        for i in (0..res.grid.len()).rev() {
            diffuse_patch(
                &res.estimate.image,
                &mask,
                &res.grid.coords()[i],
                &res.grid.kernels()[i],
                &cfg.diffusion,
            )
            .unwrap()
            .write_into(&mut out);
        }
        assert_eq!(out, res.image);
    }

    #[test]
    fn overlay_cases() {
        let black = GrayImage::zeros(32, 32).unwrap();
        assert_eq!(render_directionality_overlay(&black, &PatchGrid::empty()), black);

        let one = PatchGrid::from_angles(split_into_patches(16, 16, 16).unwrap(), vec![0.0]).unwrap();
        let drawn = render_directionality_overlay(&GrayImage::zeros(16, 16).unwrap(), &one);
        let lit: Vec<(usize, usize)> = (0..16)
            .flat_map(|r| (0..16).map(move |c| (r, c)))
            .filter(|&(r, c)| drawn.get(r, c) == 1.0)
            .collect();
        assert!(lit.len() >= 12);
        assert!(lit.iter().all(|&(_, c)| c == lit[0].1), "segment not vertical: {lit:?}");

        let one = PatchGrid::from_angles(split_into_patches(16, 16, 16).unwrap(), vec![90.0]).unwrap();
        let drawn = render_directionality_overlay(&GrayImage::zeros(16, 16).unwrap(), &one);
        let rows: std::collections::BTreeSet<usize> = (0..16)
            .flat_map(|r| (0..16).map(move |c| (r, c)))
            .filter(|&(r, c)| drawn.get(r, c) == 1.0)
            .map(|(r, _)| r)
            .collect();
        assert_eq!(rows.len(), 1);
    }

    #[test]
    fn overlay_one_segment_per_patch() {
        let coords = split_into_patches(512, 512, 16).unwrap();
        let angles = (0..coords.len()).map(|i| (i as f64 * 7.3) % 180.0 - 89.0).collect();
        let grid = PatchGrid::from_angles(coords, angles).unwrap();
        let drawn = render_directionality_overlay(&GrayImage::zeros(512, 512).unwrap(), &grid);
        let mut with_segment = 0;
        for pc in grid.coords() {
            let lit = (pc.top..pc.top + pc.rows)
                .flat_map(|r| (pc.left..pc.left + pc.cols).map(move |c| (r, c)))
                .filter(|&(r, c)| drawn.get(r, c) == 1.0)
                .count();
            if lit >= 8 {
                with_segment += 1;
            }
        }
        assert_eq!(with_segment, 1024);
    }
}

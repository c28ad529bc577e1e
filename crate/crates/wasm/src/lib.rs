//! wasm-bindgen bindings for the browser demo in `www/`.
//!
//! Everything crossing the boundary is a number, string or byte/float
//! vector. Images come back as RGBA bytes ready for `ImageData`.

use dirdiff::masks::rect_mask;
use dirdiff::{
    apply_damage, diffuse, inpaint_directional, mse, render_directionality_overlay, rotate_kernel, synth,
    DiffusionConfig, DirectionalConfig, GrayImage, Kernel3, Mask, MaskSpec, PatchGrid,
};
use wasm_bindgen::prelude::*;

const MAX_SIDE: usize = 1024;

/// The nine weights of the rotated diagonal kernel for edge angle `theta`
/// (degrees), row-major. Empty if `theta` is not finite.
#[wasm_bindgen]
pub fn kernel_weights(theta: f64) -> Vec<f64> {
    match rotate_kernel(theta) {
        Ok(k) => k.weights().iter().flatten().copied().collect(),
        Err(_) => Vec::new(),
    }
}

fn gray_rgba(img: &GrayImage) -> Vec<u8> {
    img.to_u8().iter().flat_map(|&v| [v, v, v, 255]).collect()
}

#[wasm_bindgen]
pub struct Scene {
    original: GrayImage,
    mask: Mask,
    regular: Option<GrayImage>,
    directional: Option<(GrayImage, PatchGrid)>,
}

#[wasm_bindgen]
impl Scene {
    /// A synthetic square scene: "stripes", "diagonal", "rings" or "wavy"
    /// (anything else falls back to stripes). The side is clamped to
    /// 8..=1024. Starts with every pixel known.
    #[wasm_bindgen(constructor)]
    pub fn new(pattern: &str, side: usize) -> Scene {
        let n = side.clamp(8, MAX_SIDE);
        let original = match pattern {
            "diagonal" => synth::stripes(n, n, 45.0, 10.0),
            "rings" => synth::rings(n, n, 14.0),
            "wavy" => synth::wavy_stripes(n, n, 10.0, n as f64 / 16.0, n as f64 / 2.0),
            _ => synth::stripes(n, n, 0.0, 10.0),
        };
        Scene::with_image(original)
    }

    /// Builds a scene from RGBA bytes (e.g. canvas `ImageData`), converted
    /// to luma. Returns `None` if the buffer does not match the size.
    pub fn from_rgba(width: usize, height: usize, rgba: &[u8]) -> Option<Scene> {
        if width == 0 || height == 0 || width > MAX_SIDE || height > MAX_SIDE || rgba.len() != width * height * 4 {
            return None;
        }
        let luma: Vec<u8> = rgba
            .chunks_exact(4)
            .map(|p| (0.299 * f64::from(p[0]) + 0.587 * f64::from(p[1]) + 0.114 * f64::from(p[2])).round() as u8)
            .collect();
        GrayImage::from_u8(height, width, &luma).ok().map(Scene::with_image)
    }

    fn with_image(original: GrayImage) -> Scene {
        let (rows, cols) = original.dims();
        Scene {
            mask: Mask::all_known(rows, cols).expect("image dimensions are positive"),
            original,
            regular: None,
            directional: None,
        }
    }

    pub fn width(&self) -> usize {
        self.original.cols()
    }

    pub fn height(&self) -> usize {
        self.original.rows()
    }

    fn set_mask(&mut self, mask: Mask) {
        self.mask = mask;
        self.regular = None;
        self.directional = None;
    }

    /// Returns false (and keeps the old mask) for a fraction outside [0, 1].
    pub fn set_random_mask(&mut self, missing_fraction: f64, seed: u32) -> bool {
        let spec = MaskSpec::Random {
            missing_fraction,
            seed: u64::from(seed),
        };
        self.build_mask(spec)
    }

    pub fn set_text_mask(&mut self, text: &str, scale: usize) -> bool {
        self.build_mask(MaskSpec::Text {
            text: text.to_owned(),
            scale,
        })
    }

    fn build_mask(&mut self, spec: MaskSpec) -> bool {
        match spec.build(self.height(), self.width()) {
            Ok(m) => {
                self.set_mask(m);
                true
            }
            Err(_) => false,
        }
    }

    pub fn set_block_mask(&mut self, top: usize, left: usize, height: usize, width: usize) -> bool {
        match rect_mask(self.height(), self.width(), top, left, height, width) {
            Ok(m) => {
                self.set_mask(m);
                true
            }
            Err(_) => false,
        }
    }

    pub fn clear_mask(&mut self) {
        let (rows, cols) = self.original.dims();
        self.set_mask(Mask::all_known(rows, cols).expect("image dimensions are positive"));
    }

    /// Marks a disc of pixels missing (or known again when `erase` is set).
    pub fn paint(&mut self, row: f64, col: f64, radius: f64, erase: bool) {
        let mut mask = self.mask.clone();
        let r2 = radius * radius;
        for r in 0..self.height() {
            for c in 0..self.width() {
                let (dr, dc) = (r as f64 - row, c as f64 - col);
                if dr * dr + dc * dc <= r2 {
                    mask.set(r, c, erase);
                }
            }
        }
        self.set_mask(mask);
    }

    pub fn missing_fraction(&self) -> f64 {
        self.mask.missing_fraction()
    }

    /// Regular diffusion with the diamond kernel. Returns the iteration count.
    pub fn run_regular(&mut self, epsilon: f64) -> usize {
        let cfg = config(epsilon);
        let damaged = self.damaged();
        let res = diffuse(&damaged, &self.mask, &Kernel3::diamond(), &cfg).expect("valid inputs");
        self.regular = Some(res.image);
        res.iterations
    }

    /// Directional inpainting with `patch_size` patches (at least 2).
    /// Returns estimate iterations plus the longest patch pass.
    pub fn run_directional(&mut self, patch_size: usize, epsilon: f64) -> usize {
        let cfg = DirectionalConfig {
            patch_size: patch_size.max(2),
            diffusion: config(epsilon),
            ..DirectionalConfig::default()
        };
        let damaged = self.damaged();
        let res = inpaint_directional(&damaged, &self.mask, &cfg).expect("valid inputs");
        let iterations = res.iterations();
        self.directional = Some((res.image, res.grid));
        iterations
    }

    /// MSE of the last regular run against the original, NaN before a run.
    pub fn regular_mse(&self) -> f64 {
        self.regular
            .as_ref()
            .map_or(f64::NAN, |im| mse(&self.original, im).unwrap_or(f64::NAN))
    }

    pub fn directional_mse(&self) -> f64 {
        self.directional
            .as_ref()
            .map_or(f64::NAN, |(im, _)| mse(&self.original, im).unwrap_or(f64::NAN))
    }

    /// Patch angles of the last directional run, row-major over patches.
    pub fn patch_angles(&self) -> Vec<f64> {
        self.directional
            .as_ref()
            .map_or_else(Vec::new, |(_, g)| g.angles().to_vec())
    }

    fn damaged(&self) -> GrayImage {
        apply_damage(&self.original, &self.mask).expect("mask matches image")
    }

    pub fn original_rgba(&self) -> Vec<u8> {
        gray_rgba(&self.original)
    }

    /// The input with missing pixels painted red.
    pub fn damaged_rgba(&self) -> Vec<u8> {
        let mut out = gray_rgba(&self.original);
        for (px, &known) in out.chunks_exact_mut(4).zip(self.mask.bits()) {
            if !known {
                px.copy_from_slice(&[220, 30, 30, 255]);
            }
        }
        out
    }

    /// Empty before a regular run.
    pub fn regular_rgba(&self) -> Vec<u8> {
        self.regular.as_ref().map_or_else(Vec::new, gray_rgba)
    }

    /// Empty before a directional run.
    pub fn directional_rgba(&self) -> Vec<u8> {
        self.directional.as_ref().map_or_else(Vec::new, |(im, _)| gray_rgba(im))
    }

    /// Directional result with one line per patch along its inferred edge
    /// angle, drawn in yellow. Empty before a directional run.
    pub fn overlay_rgba(&self) -> Vec<u8> {
        let Some((im, grid)) = &self.directional else {
            return Vec::new();
        };
        let lines = render_directionality_overlay(&GrayImage::zeros(im.rows(), im.cols()).expect("positive"), grid);
        let mut out = gray_rgba(im);
        for (px, &v) in out.chunks_exact_mut(4).zip(lines.pixels()) {
            if v > 0.5 {
                px.copy_from_slice(&[255, 210, 0, 255]);
            }
        }
        out
    }
}

fn config(epsilon: f64) -> DiffusionConfig {
    DiffusionConfig {
        epsilon: if epsilon.is_finite() && epsilon > 0.0 {
            epsilon
        } else {
            1e-3
        },
        ..DiffusionConfig::default()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_weights_are_row_major() {
        let w = kernel_weights(-45.0);
        assert_eq!(w.len(), 9);
        let diag = Kernel3::diag();
        for (i, v) in w.iter().enumerate() {
            assert!((v - diag.get(i / 3, i % 3)).abs() < 1e-12);
        }
        assert!(kernel_weights(f64::NAN).is_empty());
    }

    #[test]
    fn scene_round_trip() {
        let mut s = Scene::new("stripes", 48);
        assert_eq!((s.width(), s.height()), (48, 48));
        assert_eq!(s.original_rgba().len(), 48 * 48 * 4);
        assert!(s.regular_rgba().is_empty() && s.regular_mse().is_nan());

        assert!(s.set_block_mask(16, 16, 16, 16));
        assert!((s.missing_fraction() - 256.0 / 2304.0).abs() < 1e-12);
        assert!(s.run_regular(1e-3) > 0);
        assert!(s.run_directional(16, 1e-3) > 0);
        assert_eq!(s.patch_angles().len(), 9);
        assert!(s.directional_mse() >= 0.0 && s.regular_mse() >= 0.0);
        assert_eq!(s.overlay_rgba().len(), 48 * 48 * 4);
        assert!(s.overlay_rgba().chunks_exact(4).any(|p| p == [255, 210, 0, 255]));

        // A new mask invalidates previous results.
        assert!(s.set_random_mask(0.3, 1));
        assert!(s.directional_rgba().is_empty());
        assert!(!s.set_random_mask(1.5, 1));
        assert!((s.missing_fraction() - 0.3).abs() < 1e-3);
    }

    #[test]
    fn damaged_marks_missing_red() {
        let mut s = Scene::new("rings", 16);
        s.paint(8.0, 8.0, 2.0, false);
        let red = s
            .damaged_rgba()
            .chunks_exact(4)
            .filter(|p| *p == [220, 30, 30, 255])
            .count();
        assert_eq!(red, 13);
        s.paint(8.0, 8.0, 2.0, true);
        assert_eq!(s.missing_fraction(), 0.0);
    }

    #[test]
    fn from_rgba_validates() {
        assert!(Scene::from_rgba(2, 2, &[0; 15]).is_none());
        let s = Scene::from_rgba(2, 1, &[255, 255, 255, 255, 0, 0, 0, 255]).unwrap();
        assert_eq!(s.original_rgba(), vec![255, 255, 255, 255, 0, 0, 0, 255]);
    }
}

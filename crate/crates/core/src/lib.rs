//! Diffusion-based inpainting for grayscale images.
//!
//! Two reconstruction algorithms are provided:
//!
//! * [`diffusion::diffuse`] repeatedly convolves the image with a fixed 3x3
//!   kernel and re-imposes the known pixels until the update falls below a
//!   Frobenius-norm threshold.
//! * [`directional::inpaint_directional`] first runs regular diffusion to get
//!   an estimate, estimates a dominant edge angle per square patch, rotates a
//!   diagonal kernel to match it and diffuses every patch with its own kernel.
//!
//! Mask generation (seeded random and bitmap text masks) and the mean squared
//! error metric used for benchmarking live in [`masks`] and [`image`].

pub mod diffusion;
pub mod directional;
pub mod directionality;
mod error;
mod font;
pub mod image;
pub mod kernels;
pub mod masks;
pub mod synth;

pub use diffusion::{convolve, diffuse, DiffusionConfig, DiffusionResult};
pub use directional::{
    inpaint_directional, render_directionality_overlay, DirectionalConfig, DirectionalResult, PatchGrid,
};
pub use directionality::{patch_metrics, PatchMetrics};
pub use error::{Error, Result};
pub use image::{composite, frobenius_distance, mse, GrayImage, Mask, PatchCoords};
pub use kernels::{rotate_kernel, Kernel3};
pub use masks::{apply_damage, random_mask, text_mask, MaskSpec};

//! Mask families: seeded uniform-random missing pixels, tiled bitmap text
//! and rectangular blocks, plus damage application.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::font::{ink, GLYPH_HEIGHT, GLYPH_WIDTH};
use crate::image::{GrayImage, Mask};

/// Horizontal advance of one glyph cell before scaling.
const CELL_WIDTH: usize = GLYPH_WIDTH + 1;
/// Vertical distance between text lines before scaling: one glyph height of
/// ink followed by one of blank.
const LINE_PITCH: usize = 2 * GLYPH_HEIGHT;

#[derive(Debug, Clone, PartialEq)]
pub enum MaskSpec {
    Random { missing_fraction: f64, seed: u64 },
    Text { text: String, scale: usize },
}

impl MaskSpec {
    pub fn build(&self, rows: usize, cols: usize) -> Result<Mask> {
        match self {
            MaskSpec::Random { missing_fraction, seed } => random_mask(rows, cols, *missing_fraction, *seed),
            MaskSpec::Text { text, scale } => text_mask(rows, cols, text, *scale),
        }
    }

    /// Short label used in benchmark tables.
    pub fn id(&self) -> String {
        match self {
            MaskSpec::Random { missing_fraction, .. } => format!("random-{missing_fraction:.2}"),
            MaskSpec::Text { .. } => "text".to_string(),
        }
    }
}

/// Marks exactly `round(missing_fraction * rows * cols)` pixels missing,
/// chosen uniformly without replacement from a ChaCha8 stream seeded with
/// `seed`.
pub fn random_mask(rows: usize, cols: usize, missing_fraction: f64, seed: u64) -> Result<Mask> {
    if !(0.0..=1.0).contains(&missing_fraction) {
        return Err(Error::InvalidFraction(missing_fraction));
    }
    let mut mask = Mask::all_known(rows, cols)?;
    let total = rows * cols;
    let missing = (missing_fraction * total as f64).round() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for idx in rand::seq::index::sample(&mut rng, total, missing) {
        mask.set(idx / cols, idx % cols, false);
    }
    Ok(mask)
}

/// Renders `text` repeatedly across the image with the built-in 5x7 font,
/// each font pixel becoming a `scale x scale` block of missing pixels.
///
/// Glyphs advance 6 font pixels horizontally and lines 14 font pixels
/// vertically; the text wraps continuously from line to line with a single
/// space between repetitions, starting at the top-left corner.
pub fn text_mask(rows: usize, cols: usize, text: &str, scale: usize) -> Result<Mask> {
    if text.is_empty() || scale == 0 {
        return Err(Error::InvalidText);
    }
    let mut stream: Vec<char> = text.chars().collect();
    stream.push(' ');
    let cell_w = CELL_WIDTH * scale;
    let pitch = LINE_PITCH * scale;
    let slots_per_line = cols.div_ceil(cell_w);

    Mask::from_fn(rows, cols, |r, c| {
        let line = r / pitch;
        let gy = (r % pitch) / scale;
        let slot = c / cell_w;
        let gx = (c % cell_w) / scale;
        let ch = stream[(line * slots_per_line + slot) % stream.len()];
        !ink(ch, gy, gx)
    })
}

/// Missing `height x width` block at `(top, left)`, clipped to the image.
pub fn rect_mask(rows: usize, cols: usize, top: usize, left: usize, height: usize, width: usize) -> Result<Mask> {
    Mask::from_fn(rows, cols, |r, c| {
        !(r >= top && r < top.saturating_add(height) && c >= left && c < left.saturating_add(width))
    })
}

/// Sets missing pixels to 0.
pub fn apply_damage(img: &GrayImage, mask: &Mask) -> Result<GrayImage> {
    mask.check_matches(img)?;
    let pixels = img
        .pixels()
        .iter()
        .zip(mask.bits())
        .map(|(&p, &known)| if known { p } else { 0.0 })
        .collect();
    Ok(GrayImage::from_raw(img.rows(), img.cols(), pixels))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::image::composite;
    use proptest::prelude::*;

    #[test]
    fn random_extremes() {
        assert_eq!(random_mask(7, 9, 0.0, 1).unwrap(), Mask::all_known(7, 9).unwrap());
        assert_eq!(random_mask(7, 9, 1.0, 1).unwrap(), Mask::all_missing(7, 9).unwrap());
        assert_eq!(random_mask(3, 3, 1.5, 1), Err(Error::InvalidFraction(1.5)));
        assert!(random_mask(3, 3, -0.1, 1).is_err());
        assert!(random_mask(3, 3, f64::NAN, 1).is_err());
    }

    #[test]
    fn random_exact_count() {
        let m = random_mask(512, 512, 0.5, 42).unwrap();
        assert_eq!(m.missing_count(), 131072);
        let m = random_mask(512, 512, 0.3, 1).unwrap();
        assert_eq!(m.missing_count(), 78643);
    }

    #[test]
    fn random_reproducible_and_seed_sensitive() {
        let a = random_mask(64, 48, 0.37, 9).unwrap();
        assert_eq!(a, random_mask(64, 48, 0.37, 9).unwrap());
        assert_ne!(a, random_mask(64, 48, 0.37, 10).unwrap());
    }

    #[test]
    fn text_space_is_blank() {
        assert_eq!(text_mask(40, 40, " ", 2).unwrap(), Mask::all_known(40, 40).unwrap());
    }

    #[test]
    fn text_single_glyph() {
        let m = text_mask(7, 5, "I", 1).unwrap();
        for r in 0..7 {
            for c in 0..5 {
                assert_eq!(m.is_known(r, c), !ink('I', r, c), "({r}, {c})");
            }
        }
    }

    #[test]
    fn text_scaled_glyph() {
        let m = text_mask(14, 10, "I", 2).unwrap();
        for r in 0..14 {
            for c in 0..10 {
                assert_eq!(m.is_known(r, c), !ink('I', r / 2, c / 2));
            }
        }
    }

    #[test]
    fn text_coverage_moderate() {
        for text in ["Lorem ipsum dolor sit amet", "HELLO WORLD", "#@$%&", "x"] {
            for scale in 1..=4 {
                let f = text_mask(512, 512, text, scale).unwrap().missing_fraction();
                assert!(f > 0.0 && f < 0.5, "{text:?} x{scale}: {f}");
            }
        }
    }

    #[test]
    fn text_errors_and_unknown_chars() {
        assert_eq!(text_mask(10, 10, "", 1), Err(Error::InvalidText));
        assert_eq!(text_mask(10, 10, "a", 0), Err(Error::InvalidText));
        assert_eq!(
            text_mask(10, 10, "\u{3b1}\u{3b2}", 1).unwrap(),
            Mask::all_known(10, 10).unwrap()
        );
    }

    #[test]
    fn rect_block() {
        let m = rect_mask(8, 8, 2, 3, 4, 10).unwrap();
        assert_eq!(m.missing_count(), 4 * 5);
        assert!(!m.is_known(2, 3) && !m.is_known(5, 7));
        assert!(m.is_known(1, 3) && m.is_known(6, 3) && m.is_known(2, 2));
    }

    #[test]
    fn damage_examples() {
        let im = GrayImage::from_fn(6, 6, |r, c| (r * 6 + c) as f64 / 35.0).unwrap();
        assert_eq!(apply_damage(&im, &Mask::all_known(6, 6).unwrap()).unwrap(), im);
        assert_eq!(
            apply_damage(&im, &Mask::all_missing(6, 6).unwrap()).unwrap(),
            GrayImage::zeros(6, 6).unwrap()
        );
        let ones = GrayImage::filled(64, 64, 1.0).unwrap();
        let half = apply_damage(&ones, &random_mask(64, 64, 0.5, 4).unwrap()).unwrap();
        assert_eq!(half.mean(), 0.5);
        assert!(apply_damage(&im, &Mask::all_known(6, 5).unwrap()).is_err());
    }

    #[test]
    fn spec_ids() {
        assert_eq!(
            MaskSpec::Random {
                missing_fraction: 0.3,
                seed: 1
            }
            .id(),
            "random-0.30"
        );
        assert_eq!(
            MaskSpec::Text {
                text: "a".into(),
                scale: 1
            }
            .id(),
            "text"
        );
    }

    proptest! {
        #[test]
        fn damage_then_composite_restores_known(
            (r, c) in (1usize..20, 1usize..20),
            frac in 0.0f64..=1.0,
            seed in any::<u64>(),
            fill in 0.0f64..=1.0,
        ) {
            let im = GrayImage::from_fn(r, c, |y, x| ((y * 13 + x * 7) % 11) as f64 / 10.0).unwrap();
            let mask = random_mask(r, c, frac, seed).unwrap();
            let damaged = apply_damage(&im, &mask).unwrap();
            let other = GrayImage::filled(r, c, fill).unwrap();
            let restored = composite(&other, &im, &mask).unwrap();
            let again = composite(&other, &damaged, &mask).unwrap();
            for i in 0..im.len() {
                if mask.bits()[i] {
                    prop_assert_eq!(restored.pixels()[i], im.pixels()[i]);
                    prop_assert_eq!(again.pixels()[i], im.pixels()[i]);
                }
            }
        }
    }
}

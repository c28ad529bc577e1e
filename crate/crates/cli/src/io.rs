//! Image and mask files. PGM (P5) is always available; PNG needs the `png`
//! feature. The format is chosen by file extension.

use std::path::{Path, PathBuf};

use dirdiff::{GrayImage, Mask};
use thiserror::Error;

use crate::pgm::{self, PgmError, Raster};

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Fs {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Pgm {
        path: PathBuf,
        #[source]
        source: PgmError,
    },
    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },
}

fn is_png(path: &Path) -> bool {
    path.extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

fn read_raster(path: &Path) -> Result<Raster, IoError> {
    if is_png(path) {
        return read_png(path);
    }
    let bytes = std::fs::read(path).map_err(|source| IoError::Fs {
        path: path.to_owned(),
        source,
    })?;
    pgm::decode(&bytes).map_err(|source| IoError::Pgm {
        path: path.to_owned(),
        source,
    })
}

fn write_raster(path: &Path, rows: usize, cols: usize, samples: &[u8]) -> Result<(), IoError> {
    if is_png(path) {
        return write_png(path, rows, cols, samples);
    }
    std::fs::write(path, pgm::encode(rows, cols, samples)).map_err(|source| IoError::Fs {
        path: path.to_owned(),
        source,
    })
}

#[cfg(feature = "png")]
fn read_png(path: &Path) -> Result<Raster, IoError> {
    use image::{ColorType, ImageReader};

    let format_err = |message: String| IoError::Format {
        path: path.to_owned(),
        message,
    };
    let decoded = ImageReader::open(path)
        .map_err(|source| IoError::Fs {
            path: path.to_owned(),
            source,
        })?
        .decode()
        .map_err(|e| format_err(e.to_string()))?;
    match decoded.color() {
        ColorType::L8 => {}
        ColorType::L16 => {
            return Err(format_err(
                "16-bit PNG is not supported; convert to 8-bit grayscale".into(),
            ))
        }
        other => {
            return Err(format_err(format!(
                "{other:?} PNG is not grayscale; convert the image to 8-bit grayscale first"
            )))
        }
    }
    let gray = decoded.into_luma8();
    Ok(Raster {
        rows: gray.height() as usize,
        cols: gray.width() as usize,
        samples: gray.into_raw(),
    })
}

#[cfg(not(feature = "png"))]
fn read_png(path: &Path) -> Result<Raster, IoError> {
    Err(IoError::Format {
        path: path.to_owned(),
        message: "PNG support was not compiled in (enable the `png` feature)".into(),
    })
}

#[cfg(feature = "png")]
fn write_png(path: &Path, rows: usize, cols: usize, samples: &[u8]) -> Result<(), IoError> {
    image::GrayImage::from_raw(cols as u32, rows as u32, samples.to_vec())
        .expect("sample count matches dimensions")
        .save(path)
        .map_err(|e| IoError::Format {
            path: path.to_owned(),
            message: e.to_string(),
        })
}

#[cfg(not(feature = "png"))]
fn write_png(path: &Path, _rows: usize, _cols: usize, _samples: &[u8]) -> Result<(), IoError> {
    read_png(path).map(|_| ())
}

/// Loads an 8-bit grayscale image, mapping samples by `v / 255`.
pub fn read_image(path: &Path) -> Result<GrayImage, IoError> {
    let r = read_raster(path)?;
    GrayImage::from_u8(r.rows, r.cols, &r.samples).map_err(|e| IoError::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub fn write_image(img: &GrayImage, path: &Path) -> Result<(), IoError> {
    write_raster(path, img.rows(), img.cols(), &img.to_u8())
}

/// Loads a mask image: 0 is missing, any other value known.
pub fn read_mask(path: &Path) -> Result<Mask, IoError> {
    let r = read_raster(path)?;
    Mask::from_u8(r.rows, r.cols, &r.samples).map_err(|e| IoError::Format {
        path: path.to_owned(),
        message: e.to_string(),
    })
}

pub fn write_mask(mask: &Mask, path: &Path) -> Result<(), IoError> {
    write_raster(path, mask.rows(), mask.cols(), &mask.to_u8())
}

/// Image files in `dir` with a supported extension, sorted by file name.
pub fn list_images(dir: &Path) -> Result<Vec<PathBuf>, IoError> {
    let entries = std::fs::read_dir(dir).map_err(|source| IoError::Fs {
        path: dir.to_owned(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let path = entry
            .map_err(|source| IoError::Fs {
                path: dir.to_owned(),
                source,
            })?
            .path();
        let ext = path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase);
        let supported = ext.as_deref() == Some("pgm") || (cfg!(feature = "png") && ext.as_deref() == Some("png"));
        if supported && path.is_file() {
            paths.push(path);
        }
    }
    paths.sort();
    Ok(paths)
}

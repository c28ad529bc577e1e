//! Benchmark harness: runs every (image, mask, algorithm) triple, records
//! MSE, iteration count and wall time, and writes CSV tables.

use std::fmt;
use std::io::Write;
use std::str::FromStr;
use std::time::Instant;

use dirdiff::{
    apply_damage, diffuse, inpaint_directional, mse, DiffusionConfig, DirectionalConfig, GrayImage, Kernel3, Mask,
    MaskSpec,
};

pub const CSV_HEADER: &str = "image_id,mask_id,algorithm,mse,iterations,wall_seconds";
pub const AGGREGATE_HEADER: &str = "mask_id,algorithm,n,mse_mean,mse_std,wall_mean,wall_std";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    DiffusionDiamond,
    Directional16,
    Directional32,
}

impl Algorithm {
    pub const ALL: [Algorithm; 3] = [
        Algorithm::DiffusionDiamond,
        Algorithm::Directional16,
        Algorithm::Directional32,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Algorithm::DiffusionDiamond => "diffusion-diamond",
            Algorithm::Directional16 => "directional-16",
            Algorithm::Directional32 => "directional-32",
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Algorithm {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Algorithm::ALL.into_iter().find(|a| a.id() == s).ok_or_else(|| {
            format!("unknown algorithm {s:?} (expected diffusion-diamond, directional-16 or directional-32)")
        })
    }
}

/// Reconstruction plus the diagnostics a benchmark row needs.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub image: GrayImage,
    pub iterations: usize,
    pub converged: bool,
}

pub fn run_algorithm(
    algorithm: Algorithm,
    damaged: &GrayImage,
    mask: &Mask,
    cfg: &DiffusionConfig,
) -> dirdiff::Result<Outcome> {
    match algorithm {
        Algorithm::DiffusionDiamond => {
            let res = diffuse(damaged, mask, &Kernel3::diamond(), cfg)?;
            Ok(Outcome {
                image: res.image,
                iterations: res.iterations,
                converged: res.converged,
            })
        }
        Algorithm::Directional16 | Algorithm::Directional32 => {
            let patch_size = if algorithm == Algorithm::Directional16 { 16 } else { 32 };
            let dcfg = DirectionalConfig {
                patch_size,
                diffusion: *cfg,
                ..DirectionalConfig::default()
            };
            let res = inpaint_directional(damaged, mask, &dcfg)?;
            Ok(Outcome {
                iterations: res.iterations(),
                converged: res.converged,
                image: res.image,
            })
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub image_id: String,
    pub mask_id: String,
    pub algorithm: Algorithm,
    pub mse: f64,
    pub iterations: usize,
    pub wall_seconds: f64,
}

impl BenchRecord {
    pub fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.image_id,
            self.mask_id,
            self.algorithm,
            fmt_sig(self.mse, 6),
            self.iterations,
            fmt_sig(self.wall_seconds, 6)
        )
    }
}

pub struct BenchImage {
    pub id: String,
    pub image: GrayImage,
}

pub enum MaskSource {
    Spec(MaskSpec),
    /// A fixed mask, only applicable to images of the same size.
    Fixed(Mask),
}

pub struct BenchMask {
    pub id: String,
    pub source: MaskSource,
}

impl BenchMask {
    pub fn from_spec(spec: MaskSpec) -> Self {
        Self {
            id: spec.id(),
            source: MaskSource::Spec(spec),
        }
    }

    pub fn build(&self, rows: usize, cols: usize) -> dirdiff::Result<Mask> {
        match &self.source {
            MaskSource::Spec(spec) => spec.build(rows, cols),
            MaskSource::Fixed(mask) => {
                if mask.dims() != (rows, cols) {
                    return Err(dirdiff::Error::DimensionMismatch {
                        left_rows: mask.rows(),
                        left_cols: mask.cols(),
                        right_rows: rows,
                        right_cols: cols,
                    });
                }
                Ok(mask.clone())
            }
        }
    }
}

/// Damages `original` with `mask`, runs `algorithm` on it and scores the
/// result. Only the algorithm call is timed.
pub fn evaluate(
    image_id: &str,
    original: &GrayImage,
    mask_id: &str,
    mask: &Mask,
    algorithm: Algorithm,
    cfg: &DiffusionConfig,
) -> dirdiff::Result<BenchRecord> {
    let damaged = apply_damage(original, mask)?;
    let start = Instant::now();
    let outcome = run_algorithm(algorithm, &damaged, mask, cfg)?;
    let wall_seconds = start.elapsed().as_secs_f64();
    Ok(BenchRecord {
        image_id: image_id.to_string(),
        mask_id: mask_id.to_string(),
        algorithm,
        mse: mse(original, &outcome.image)?,
        iterations: outcome.iterations,
        wall_seconds,
    })
}

/// Evaluates every triple sequentially, ordered by image, then mask, then
/// algorithm. Triples run one at a time so wall times are not skewed by
/// competing jobs; each algorithm is parallel internally.
pub fn run_bench(
    images: &[BenchImage],
    masks: &[BenchMask],
    algorithms: &[Algorithm],
    cfg: &DiffusionConfig,
    mut progress: impl FnMut(&BenchRecord),
) -> dirdiff::Result<Vec<BenchRecord>> {
    let mut records = Vec::with_capacity(images.len() * masks.len() * algorithms.len());
    for img in images {
        for m in masks {
            let mask = m.build(img.image.rows(), img.image.cols())?;
            for &alg in algorithms {
                let rec = evaluate(&img.id, &img.image, &m.id, &mask, alg, cfg)?;
                progress(&rec);
                records.push(rec);
            }
        }
    }
    Ok(records)
}

pub fn write_csv(records: &[BenchRecord], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for r in records {
        writeln!(out, "{}", r.csv_line())?;
    }
    Ok(())
}

/// Mean and population standard deviation over images for one
/// (mask, algorithm) pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Aggregate {
    pub mask_id: String,
    pub algorithm: Algorithm,
    pub n: usize,
    pub mse_mean: f64,
    pub mse_std: f64,
    pub wall_mean: f64,
    pub wall_std: f64,
}

pub fn mean_and_std(values: &[f64]) -> (f64, f64) {
    if values.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Groups records by (mask, algorithm) in order of first appearance.
pub fn aggregate(records: &[BenchRecord]) -> Vec<Aggregate> {
    let mut keys: Vec<(&str, Algorithm)> = Vec::new();
    for r in records {
        if !keys.contains(&(r.mask_id.as_str(), r.algorithm)) {
            keys.push((&r.mask_id, r.algorithm));
        }
    }
    keys.into_iter()
        .map(|(mask_id, algorithm)| {
            let group: Vec<&BenchRecord> = records
                .iter()
                .filter(|r| r.mask_id == mask_id && r.algorithm == algorithm)
                .collect();
            let (mse_mean, mse_std) = mean_and_std(&group.iter().map(|r| r.mse).collect::<Vec<_>>());
            let (wall_mean, wall_std) = mean_and_std(&group.iter().map(|r| r.wall_seconds).collect::<Vec<_>>());
            Aggregate {
                mask_id: mask_id.to_string(),
                algorithm,
                n: group.len(),
                mse_mean,
                mse_std,
                wall_mean,
                wall_std,
            }
        })
        .collect()
}

pub fn write_aggregate_csv(aggs: &[Aggregate], mut out: impl Write) -> std::io::Result<()> {
    writeln!(out, "{AGGREGATE_HEADER}")?;
    for a in aggs {
        writeln!(
            out,
            "{},{},{},{},{},{},{}",
            a.mask_id,
            a.algorithm,
            a.n,
            fmt_sig(a.mse_mean, 6),
            fmt_sig(a.mse_std, 6),
            fmt_sig(a.wall_mean, 6),
            fmt_sig(a.wall_std, 6)
        )?;
    }
    Ok(())
}

/// Formats like C's `%.{digits}g`: `digits` significant digits, trailing
/// zeros dropped, exponent notation outside `[1e-4, 10^digits)`.
pub fn fmt_sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let digits = digits.max(1);
    // Round first so the exponent reflects the printed mantissa.
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if exp < -4 || exp >= digits as i32 {
        let mantissa = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{mantissa}e{sign}{:02}", exp.abs())
    } else {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(&format!("{x:.decimals$}")).to_string()
    }
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use dirdiff::synth;

    #[test]
    fn sig_formatting() {
        assert_eq!(fmt_sig(0.0, 6), "0");
        assert_eq!(fmt_sig(0.000551234567, 6), "0.000551235");
        assert_eq!(fmt_sig(1.0, 6), "1");
        assert_eq!(fmt_sig(2.5, 6), "2.5");
        assert_eq!(fmt_sig(123456.7, 6), "123457");
        assert_eq!(fmt_sig(1234567.0, 6), "1.23457e+06");
        assert_eq!(fmt_sig(9.5367431640625e-7, 6), "9.53674e-07");
        assert_eq!(fmt_sig(0.0001, 6), "0.0001");
        assert_eq!(fmt_sig(999999.6, 6), "1e+06");
        assert_eq!(fmt_sig(-0.125, 6), "-0.125");
    }

    #[test]
    fn algorithm_ids_round_trip() {
        for a in Algorithm::ALL {
            assert_eq!(a.id().parse::<Algorithm>().unwrap(), a);
        }
        assert!("svd".parse::<Algorithm>().is_err());
    }

    #[test]
    fn population_std() {
        let (m, s) = mean_and_std(&[1.0, 3.0]);
        assert_eq!((m, s), (2.0, 1.0));
        let (m, s) = mean_and_std(&[4.0]);
        assert_eq!((m, s), (4.0, 0.0));
    }

    #[test]
    fn bench_order_and_cardinality() {
        let images = vec![
            BenchImage {
                id: "a".into(),
                image: synth::stripes(40, 40, 0.0, 8.0),
            },
            BenchImage {
                id: "b".into(),
                image: synth::rings(40, 40, 9.0),
            },
        ];
        let masks: Vec<BenchMask> = [0.3, 0.6]
            .iter()
            .map(|&f| {
                BenchMask::from_spec(MaskSpec::Random {
                    missing_fraction: f,
                    seed: 42,
                })
            })
            .collect();
        let recs = run_bench(&images, &masks, &Algorithm::ALL, &DiffusionConfig::default(), |_| {}).unwrap();
        assert_eq!(recs.len(), 12);
        let keys: Vec<(String, String, Algorithm)> = recs
            .iter()
            .map(|r| (r.image_id.clone(), r.mask_id.clone(), r.algorithm))
            .collect();
        assert_eq!(keys[0], ("a".into(), "random-0.30".into(), Algorithm::DiffusionDiamond));
        assert_eq!(keys[2], ("a".into(), "random-0.30".into(), Algorithm::Directional32));
        assert_eq!(keys[3], ("a".into(), "random-0.60".into(), Algorithm::DiffusionDiamond));
        assert_eq!(keys[6].0, "b");
        assert!(recs.iter().all(|r| r.mse >= 0.0 && r.wall_seconds >= 0.0));

        let again = run_bench(&images, &masks, &Algorithm::ALL, &DiffusionConfig::default(), |_| {}).unwrap();
        for (x, y) in recs.iter().zip(&again) {
            assert_eq!(x.mse.to_bits(), y.mse.to_bits());
            assert_eq!(x.iterations, y.iterations);
        }

        let aggs = aggregate(&recs);
        assert_eq!(aggs.len(), 6);
        assert!(aggs.iter().all(|a| a.n == 2));
        let mut buf = Vec::new();
        write_csv(&recs, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
        assert_eq!(text.lines().count(), 13);
        assert!(!text.contains('\r'));
    }

    #[test]
    fn fixed_mask_size_checked() {
        let m = BenchMask {
            id: "f".into(),
            source: MaskSource::Fixed(Mask::all_known(4, 4).unwrap()),
        };
        assert!(m.build(4, 4).is_ok());
        assert!(m.build(4, 5).is_err());
    }
}

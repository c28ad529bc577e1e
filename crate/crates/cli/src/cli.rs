use std::ffi::OsString;
use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};
use dirdiff::diffusion::diffuse_observed;
use dirdiff::directionality::DEFAULT_SLANT_THRESHOLD;
use dirdiff::masks::rect_mask;
use dirdiff::{
    apply_damage, inpaint_directional, mse, render_directionality_overlay, rotate_kernel, synth, DiffusionConfig,
    DirectionalConfig, GrayImage, Kernel3, Mask, MaskSpec,
};

use crate::harness::{self, Algorithm, BenchImage, BenchMask, MaskSource};
use crate::io::{self, IoError};

/// Failure classes and their process exit codes.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Io(String),
    Numeric(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Io(_) => 2,
            Failure::Numeric(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Io(m) | Failure::Numeric(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Io(e.to_string())
    }
}

impl From<dirdiff::Error> for Failure {
    fn from(e: dirdiff::Error) -> Self {
        use dirdiff::Error as E;
        match e {
            E::DegenerateKernel | E::InvalidKernel | E::IntensityOutOfRange { .. } => Failure::Numeric(e.to_string()),
            _ => Failure::Usage(e.to_string()),
        }
    }
}

fn write_failed(path: &Path, e: std::io::Error) -> Failure {
    Failure::Io(format!("{}: {e}", path.display()))
}

#[derive(Debug, Parser)]
#[command(
    name = "dirdiff",
    version,
    about = "Regular and directional diffusion inpainting for grayscale images"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reconstruct the missing pixels of an image.
    Inpaint(InpaintArgs),
    /// Score algorithms over a set of images and masks, emitting CSV.
    Bench(BenchArgs),
    /// Write a mask image (0 = missing, 255 = known).
    Genmask(GenmaskArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum AlgoArg {
    Diffusion,
    Directional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KernelArg {
    Diamond,
    Diag,
    /// Diagonal kernel rotated for the edge angle given by --theta.
    Directional,
}

#[derive(Debug, Args)]
struct DiffusionArgs {
    /// Convergence threshold on the Frobenius norm of each update.
    #[arg(long, default_value_t = 1e-3)]
    epsilon: f64,
    /// Iteration cap for every diffusion pass.
    #[arg(long, default_value_t = 10_000)]
    max_iters: usize,
}

impl DiffusionArgs {
    fn config(&self) -> Result<DiffusionConfig, Failure> {
        let cfg = DiffusionConfig {
            epsilon: self.epsilon,
            max_iters: self.max_iters,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Debug, Args)]
struct InpaintArgs {
    /// Input image (PGM or PNG, 8-bit grayscale). Pixels the mask marks
    /// missing are ignored.
    #[arg(long = "in", value_name = "PATH")]
    input: PathBuf,
    /// Mask image: 0 = missing, nonzero = known.
    #[arg(long, value_name = "PATH")]
    mask: PathBuf,
    /// Reconstructed image.
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = AlgoArg::Diffusion)]
    algo: AlgoArg,
    /// Kernel for --algo diffusion [default: diamond].
    #[arg(long, value_enum)]
    kernel: Option<KernelArg>,
    /// Edge angle in degrees for --kernel directional.
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<f64>,
    /// Patch side length for --algo directional [default: 16].
    #[arg(long)]
    patch: Option<usize>,
    /// Slant ratio threshold of the angle heuristic (--algo directional).
    #[arg(long)]
    slant_threshold: Option<f64>,
    /// Write the input with per-patch direction lines (--algo directional).
    #[arg(long, value_name = "PATH")]
    overlay: Option<PathBuf>,
    /// Original image; prints the MSE of the result (and of snapshots).
    #[arg(long, value_name = "PATH")]
    reference: Option<PathBuf>,
    /// Save the image every K iterations (--algo diffusion).
    #[arg(long, value_name = "K", requires = "snapshot_dir")]
    snapshot_every: Option<usize>,
    /// Directory for snapshots, written as iter_NNNNNN.pgm.
    #[arg(long, value_name = "DIR", requires = "snapshot_every")]
    snapshot_dir: Option<PathBuf>,
    #[command(flatten)]
    diffusion: DiffusionArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["images", "synthetic"])))]
struct BenchArgs {
    /// Directory of 8-bit grayscale images (.pgm, .png).
    #[arg(long, value_name = "DIR")]
    images: Option<PathBuf>,
    /// Use the built-in oriented-texture images instead of a directory.
    #[arg(long)]
    synthetic: bool,
    /// Side length of the synthetic images.
    #[arg(long, default_value_t = 512)]
    synthetic_size: usize,
    /// Add a text mask rendered from this string.
    #[arg(long)]
    text: Option<String>,
    /// Glyph scale of the text mask.
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Add random masks at 10%, 20%, ..., 90% missing.
    #[arg(long)]
    random_sweep: bool,
    /// Add random masks at these missing fractions.
    #[arg(long, value_delimiter = ',')]
    fractions: Vec<f64>,
    /// Add a mask loaded from a file (repeatable).
    #[arg(long, value_name = "PATH")]
    mask_file: Vec<PathBuf>,
    /// Seed for random masks.
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Algorithms to run, comma separated.
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "diffusion-diamond,directional-16,directional-32"
    )]
    algos: Vec<Algorithm>,
    /// Per-run CSV; stdout when omitted.
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Mean +- population std per (mask, algorithm), as CSV.
    #[arg(long, value_name = "PATH")]
    aggregate: Option<PathBuf>,
    /// No progress lines on stderr.
    #[arg(long)]
    quiet: bool,
    #[command(flatten)]
    diffusion: DiffusionArgs,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("kind").required(true).args(["random", "text", "rect"])))]
#[command(group(ArgGroup::new("dims").required(true).args(["size", "like"])))]
struct GenmaskArgs {
    /// Mask size as WIDTHxHEIGHT.
    #[arg(long, value_parser = parse_size)]
    size: Option<(usize, usize)>,
    /// Take the size from an existing image.
    #[arg(long, value_name = "PATH")]
    like: Option<PathBuf>,
    /// Uniform random mask with this fraction of missing pixels.
    #[arg(long, allow_hyphen_values = true)]
    random: Option<f64>,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Text mask rendered from this string.
    #[arg(long)]
    text: Option<String>,
    #[arg(long, default_value_t = 1)]
    scale: usize,
    /// Missing rectangle TOP,LEFT,HEIGHT,WIDTH.
    #[arg(long, value_parser = parse_rect)]
    rect: Option<[usize; 4]>,
    #[arg(long, value_name = "PATH")]
    out: PathBuf,
}

fn parse_size(s: &str) -> Result<(usize, usize), String> {
    let (w, h) = s
        .split_once(['x', 'X'])
        .ok_or_else(|| format!("expected WIDTHxHEIGHT, got {s:?}"))?;
    let w: usize = w.trim().parse().map_err(|_| format!("bad width in {s:?}"))?;
    let h: usize = h.trim().parse().map_err(|_| format!("bad height in {s:?}"))?;
    if w == 0 || h == 0 {
        return Err("size must be positive".into());
    }
    Ok((h, w))
}

fn parse_rect(s: &str) -> Result<[usize; 4], String> {
    let parts: Vec<usize> = s
        .split(',')
        .map(|p| {
            p.trim()
                .parse()
                .map_err(|_| format!("bad rectangle component in {s:?}"))
        })
        .collect::<Result<_, _>>()?;
    parts
        .try_into()
        .map_err(|_| format!("expected TOP,LEFT,HEIGHT,WIDTH, got {s:?}"))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let usage_error = e.use_stderr();
            let _ = e.print();
            return ExitCode::from(if usage_error { 1 } else { 0 });
        }
    };
    let result = match cli.command {
        Command::Inpaint(a) => cmd_inpaint(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Genmask(a) => cmd_genmask(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}

fn check_mask_dims(img: &GrayImage, mask: &Mask) -> Result<(), Failure> {
    if img.dims() != mask.dims() {
        return Err(Failure::Usage(format!(
            "mask is {}x{} but image is {}x{} (WIDTHxHEIGHT)",
            mask.cols(),
            mask.rows(),
            img.cols(),
            img.rows()
        )));
    }
    Ok(())
}

fn cmd_inpaint(a: InpaintArgs) -> Result<(), Failure> {
    let cfg = a.diffusion.config()?;
    match a.algo {
        AlgoArg::Diffusion => {
            for (given, flag) in [
                (a.patch.is_some(), "--patch"),
                (a.overlay.is_some(), "--overlay"),
                (a.slant_threshold.is_some(), "--slant-threshold"),
            ] {
                if given {
                    return Err(Failure::Usage(format!("{flag} requires --algo directional")));
                }
            }
        }
        AlgoArg::Directional => {
            for (given, flag) in [
                (a.kernel.is_some(), "--kernel"),
                (a.theta.is_some(), "--theta"),
                (a.snapshot_every.is_some(), "--snapshot-every"),
            ] {
                if given {
                    return Err(Failure::Usage(format!("{flag} is only valid with --algo diffusion")));
                }
            }
        }
    }
    let kernel = match (a.kernel.unwrap_or(KernelArg::Diamond), a.theta) {
        (KernelArg::Diamond, None) => Kernel3::diamond(),
        (KernelArg::Diag, None) => Kernel3::diag(),
        (KernelArg::Directional, Some(theta)) => rotate_kernel(theta)?,
        (KernelArg::Directional, None) => return Err(Failure::Usage("--kernel directional needs --theta".into())),
        (_, Some(_)) => return Err(Failure::Usage("--theta requires --kernel directional".into())),
    };
    if a.snapshot_every == Some(0) {
        return Err(Failure::Usage("--snapshot-every must be at least 1".into()));
    }

    let input = io::read_image(&a.input)?;
    let mask = io::read_mask(&a.mask)?;
    check_mask_dims(&input, &mask)?;
    let reference = a.reference.as_deref().map(io::read_image).transpose()?;
    if let Some(r) = &reference {
        if r.dims() != input.dims() {
            return Err(Failure::Usage("reference image size differs from input".into()));
        }
    }
    let damaged = apply_damage(&input, &mask)?;

    let (image, iterations, converged, elapsed, overlay) = match a.algo {
        AlgoArg::Diffusion => {
            if let Some(dir) = &a.snapshot_dir {
                std::fs::create_dir_all(dir).map_err(|e| write_failed(dir, e))?;
            }
            let every = a.snapshot_every.unwrap_or(0);
            let mut snapshot_error = None;
            let mut snapshot_time = std::time::Duration::ZERO;
            let start = Instant::now();
            let res = diffuse_observed(&damaged, &mask, &kernel, &cfg, |i, img| {
                if every == 0 || i % every != 0 || snapshot_error.is_some() {
                    return;
                }
                let t = Instant::now();
                let dir = a.snapshot_dir.as_deref().expect("clap requires --snapshot-dir");
                let path = dir.join(format!("iter_{i:06}.pgm"));
                match io::write_image(img, &path) {
                    Ok(()) => {
                        if let Some(r) = &reference {
                            println!(
                                "snapshot iteration={i} mse={}",
                                harness::fmt_sig(mse(r, img).unwrap_or(f64::NAN), 6)
                            );
                        }
                    }
                    Err(e) => snapshot_error = Some(e),
                }
                snapshot_time += t.elapsed();
            })?;
            let elapsed = start.elapsed().saturating_sub(snapshot_time);
            if let Some(e) = snapshot_error {
                return Err(e.into());
            }
            (res.image, res.iterations, res.converged, elapsed, None)
        }
        AlgoArg::Directional => {
            let dcfg = DirectionalConfig {
                patch_size: a.patch.unwrap_or(16),
                diffusion: cfg,
                slant_threshold: a.slant_threshold.unwrap_or(DEFAULT_SLANT_THRESHOLD),
            };
            let start = Instant::now();
            let res = inpaint_directional(&damaged, &mask, &dcfg)?;
            let elapsed = start.elapsed();
            let overlay = a
                .overlay
                .as_ref()
                .map(|_| render_directionality_overlay(&res.image, &res.grid));
            let iterations = res.iterations();
            (res.image, iterations, res.converged, elapsed, overlay)
        }
    };

    io::write_image(&image, &a.out)?;
    if let (Some(path), Some(img)) = (&a.overlay, &overlay) {
        io::write_image(img, path)?;
    }
    println!(
        "iterations={iterations} converged={converged} wall_seconds={}",
        harness::fmt_sig(elapsed.as_secs_f64(), 6)
    );
    if !converged {
        eprintln!("warning: stopped at --max-iters before reaching --epsilon");
    }
    if let Some(r) = &reference {
        println!("mse={}", harness::fmt_sig(mse(r, &image)?, 6));
    }
    Ok(())
}

fn cmd_genmask(a: GenmaskArgs) -> Result<(), Failure> {
    let (rows, cols) = match (a.size, &a.like) {
        (Some(dims), _) => dims,
        (None, Some(path)) => io::read_image(path)?.dims(),
        (None, None) => unreachable!("clap requires --size or --like"),
    };
    let mask = if let Some(fraction) = a.random {
        MaskSpec::Random {
            missing_fraction: fraction,
            seed: a.seed,
        }
        .build(rows, cols)?
    } else if let Some(text) = a.text {
        MaskSpec::Text { text, scale: a.scale }.build(rows, cols)?
    } else if let Some([top, left, h, w]) = a.rect {
        rect_mask(rows, cols, top, left, h, w)?
    } else {
        unreachable!("clap requires a mask kind")
    };
    io::write_mask(&mask, &a.out)?;
    println!(
        "wrote {}x{} mask with {} missing pixels ({:.2}%)",
        cols,
        rows,
        mask.missing_count(),
        100.0 * mask.missing_fraction()
    );
    Ok(())
}

fn load_bench_images(a: &BenchArgs) -> Result<Vec<BenchImage>, Failure> {
    if a.synthetic {
        if a.synthetic_size < 2 {
            return Err(Failure::Usage("--synthetic-size must be at least 2".into()));
        }
        return Ok(synth::oriented_suite(a.synthetic_size)
            .into_iter()
            .map(|(id, image)| BenchImage {
                id: id.to_string(),
                image,
            })
            .collect());
    }
    let dir = a.images.as_deref().expect("clap requires --images or --synthetic");
    io::list_images(dir)?
        .into_iter()
        .map(|path| {
            let id = path
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok(BenchImage {
                id,
                image: io::read_image(&path)?,
            })
        })
        .collect()
}

fn cmd_bench(a: BenchArgs) -> Result<(), Failure> {
    let cfg = a.diffusion.config()?;
    let mut masks = Vec::new();
    if let Some(text) = &a.text {
        if text.is_empty() || a.scale == 0 {
            return Err(Failure::Usage(
                "--text needs a non-empty string and --scale >= 1".into(),
            ));
        }
        masks.push(BenchMask::from_spec(MaskSpec::Text {
            text: text.clone(),
            scale: a.scale,
        }));
    }
    let mut fractions = a.fractions.clone();
    if a.random_sweep {
        fractions.extend((1..=9).map(|i| f64::from(i) / 10.0));
    }
    for f in fractions {
        if !(0.0..=1.0).contains(&f) {
            return Err(Failure::Usage(format!("missing fraction {f} is outside [0, 1]")));
        }
        masks.push(BenchMask::from_spec(MaskSpec::Random {
            missing_fraction: f,
            seed: a.seed,
        }));
    }
    for path in &a.mask_file {
        let id = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        masks.push(BenchMask {
            id,
            source: MaskSource::Fixed(io::read_mask(path)?),
        });
    }
    if masks.is_empty() {
        return Err(Failure::Usage(
            "no masks selected; use --text, --fractions, --random-sweep or --mask-file".into(),
        ));
    }
    if a.algos.is_empty() {
        return Err(Failure::Usage("no algorithms selected".into()));
    }

    let images = load_bench_images(&a)?;
    if images.is_empty() {
        return Err(Failure::Usage("the image set is empty".into()));
    }

    let quiet = a.quiet;
    let records = harness::run_bench(&images, &masks, &a.algos, &cfg, |r| {
        if !quiet {
            eprintln!(
                "{} {} {}: mse={} iterations={} wall={}s",
                r.image_id,
                r.mask_id,
                r.algorithm,
                harness::fmt_sig(r.mse, 6),
                r.iterations,
                harness::fmt_sig(r.wall_seconds, 3)
            );
        }
    })?;

    match &a.out {
        Some(path) => {
            let file = File::create(path).map_err(|e| write_failed(path, e))?;
            let mut w = BufWriter::new(file);
            harness::write_csv(&records, &mut w)
                .and_then(|()| w.flush())
                .map_err(|e| write_failed(path, e))?;
        }
        None => {
            let stdout = std::io::stdout();
            harness::write_csv(&records, stdout.lock()).map_err(|e| Failure::Io(e.to_string()))?;
        }
    }
    if let Some(path) = &a.aggregate {
        let file = File::create(path).map_err(|e| write_failed(path, e))?;
        let mut w = BufWriter::new(file);
        harness::write_aggregate_csv(&harness::aggregate(&records), &mut w)
            .and_then(|()| w.flush())
            .map_err(|e| write_failed(path, e))?;
    }
    Ok(())
}

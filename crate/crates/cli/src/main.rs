//! `o2m`: batch front end for the artifact-removal stack.
//!
//! Exit codes: 0 success, 1 usage, 2 data error, 3 numeric failure.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use o2m_core::data::Image;
use o2m_core::jpeg::{jpeg_degrade, write_dct_dump};
use o2m_core::metrics::{psnr, psnr_b, ssim, MetricReport, CSV_HEADER};
use o2m_core::net::{checkpoint_channels, load_checkpoint_into, ProposalNet};
use o2m_core::nn::Deconv2d;
use o2m_core::rng::Rng;
use o2m_core::tensor::Tensor;
use o2m_core::train::{gradient_suite, restore_image, TrainConfig, Trainer, GRAD_TOLERANCE};
use o2m_core::{Error, Result};

#[derive(Parser)]
#[command(
    name = "o2m",
    version,
    about = "One-to-many JPEG artifact removal: degrade, train, restore, score"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Quantize an image through the block codec and save the decode.
    Degrade(DegradeArgs),
    /// Train the restoration networks from a config file.
    Train(TrainArgs),
    /// Restore an image with a trained checkpoint, one PNG per latent draw.
    Infer(InferArgs),
    /// Score test images against references and append CSV rows.
    Eval(EvalArgs),
    /// Run self-checks or write the upsampling demo figure.
    Check(CheckArgs),
}

#[derive(Args)]
struct DegradeArgs {
    /// Codec quality in 1..=100.
    #[arg(long)]
    quality: u8,
    /// Input image (PNG).
    #[arg(long = "in")]
    input: PathBuf,
    /// Output PNG path.
    #[arg(long)]
    out: PathBuf,
    /// Also write the quantized coefficient grid to this path.
    #[arg(long)]
    dump_dct: Option<PathBuf>,
}

#[derive(Args)]
struct TrainArgs {
    /// `key = value` config file; see configs/toy.conf.
    #[arg(long)]
    config: PathBuf,
}

#[derive(Args)]
struct InferArgs {
    /// Restorer checkpoint (.o2m).
    #[arg(long)]
    ckpt: PathBuf,
    /// Degraded input image (PNG).
    #[arg(long = "in")]
    input: PathBuf,
    /// Number of latent draws to decode.
    #[arg(long, default_value_t = 1)]
    samples: usize,
    /// Latent seed; same seed reproduces the same outputs.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Outputs are written as <prefix>1.png, <prefix>2.png, …
    #[arg(long)]
    out_prefix: String,
}

#[derive(Args)]
struct EvalArgs {
    /// Reference image or directory of images.
    #[arg(long = "ref")]
    reference: PathBuf,
    /// Test image, or directory matched to references by file name.
    #[arg(long)]
    test: PathBuf,
    /// CSV to append to (header written when the file is new).
    #[arg(long)]
    csv: PathBuf,
    /// Quality column value for the emitted rows.
    #[arg(long, default_value_t = 0)]
    quality: u8,
    /// Approach column value for the emitted rows.
    #[arg(long, default_value = "test")]
    approach: String,
}

#[derive(Args)]
struct CheckArgs {
    /// Run the finite-difference gradient suite and print one row per check.
    #[arg(long, conflicts_with = "deconv_demo")]
    gradients: bool,
    /// Write a side-by-side PNG: plain transposed conv vs shift-and-average.
    #[arg(long, requires = "out")]
    deconv_demo: bool,
    /// Output path for --deconv-demo.
    #[arg(long)]
    out: Option<PathBuf>,
}

enum AppError {
    Usage(String),
    Core(Error),
}

impl From<Error> for AppError {
    fn from(e: Error) -> Self {
        AppError::Core(e)
    }
}

impl From<o2m_core::error::TensorError> for AppError {
    fn from(e: o2m_core::error::TensorError) -> Self {
        AppError::Core(Error::Tensor(e))
    }
}

type AppResult = Result<(), AppError>;

/// Emitted images are PNG only; reject other extensions up front.
fn require_png(path: &Path, flag: &str) -> AppResult {
    let ok = path
        .extension()
        .and_then(|e| e.to_str())
        .is_some_and(|e| e.eq_ignore_ascii_case("png"));
    if ok {
        Ok(())
    } else {
        Err(AppError::Usage(format!(
            "{flag} must name a .png file, got {}",
            path.display()
        )))
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.exit_code() == 0 { 0 } else { 1 });
        }
    };
    let run = match cli.cmd {
        Command::Degrade(a) => cmd_degrade(a),
        Command::Train(a) => cmd_train(a),
        Command::Infer(a) => cmd_infer(a),
        Command::Eval(a) => cmd_eval(a),
        Command::Check(a) => cmd_check(a),
    };
    match run {
        Ok(()) => ExitCode::SUCCESS,
        Err(AppError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(1)
        }
        Err(AppError::Core(e)) => {
            eprintln!("error: {e}");
            match e {
                Error::Numeric(_) => ExitCode::from(3),
                _ => ExitCode::from(2),
            }
        }
    }
}

fn cmd_degrade(a: DegradeArgs) -> AppResult {
    require_png(&a.out, "--out")?;
    let img = Image::load(&a.input)?;
    let out = jpeg_degrade(&img, a.quality)?;
    out.image.save(&a.out)?;
    if let Some(dump_path) = &a.dump_dct {
        let mut file = fs::File::create(dump_path).map_err(|e| Error::io(dump_path, e))?;
        write_dct_dump(
            &mut file,
            &out.grid,
            img.height() as u32,
            img.width() as u32,
            a.quality as u32,
        )?;
    }
    println!(
        "degraded {} at quality {} -> {}",
        a.input.display(),
        a.quality,
        a.out.display()
    );
    Ok(())
}

fn cmd_train(a: TrainArgs) -> AppResult {
    let cfg = TrainConfig::load(&a.config)?;
    let mut trainer = Trainer::new(cfg)?;
    let total = trainer.total_iters();
    println!(
        "training: {} iterations ({} per epoch)",
        total,
        trainer.iters_per_epoch()
    );
    let artifacts = trainer.run()?;
    let last = trainer.history().last().map(|s| s.report.total);
    println!("log:           {}", artifacts.log.display());
    println!("restorer:      {}", artifacts.proposal.display());
    println!("discriminator: {}", artifacts.discriminator.display());
    println!("features:      {}", artifacts.feature.display());
    if let Some(loss) = last {
        println!("final combined loss: {loss:.6}");
    }
    Ok(())
}

fn cmd_infer(a: InferArgs) -> AppResult {
    let img = Image::load(&a.input)?;
    let channels = checkpoint_channels(&a.ckpt)?;
    let mut rng = Rng::seed_from(0);
    let net = ProposalNet::<f32>::new(&mut rng, channels)?;
    load_checkpoint_into(&net.param_map(), &a.ckpt)?;
    let outs = restore_image(&net, &img, a.samples, a.seed)?;
    for (i, out) in outs.iter().enumerate() {
        let path = PathBuf::from(format!("{}{}.png", a.out_prefix, i + 1));
        out.save(&path)?;
        println!("wrote {}", path.display());
    }
    Ok(())
}

fn image_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| Error::io(dir, e))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| {
            p.extension()
                .and_then(|e| e.to_str())
                .is_some_and(|e| e.eq_ignore_ascii_case("png"))
        })
        .collect();
    files.sort();
    Ok(files)
}

fn eval_pairs(a: &EvalArgs) -> Result<Vec<(String, PathBuf, PathBuf)>> {
    if a.test.is_dir() {
        let mut pairs = Vec::new();
        for test in image_files(&a.test)? {
            let name = test
                .file_name()
                .and_then(|n| n.to_str())
                .unwrap_or_default()
                .to_string();
            let reference = a.reference.join(&name);
            if !reference.is_file() {
                return Err(Error::Invalid(format!(
                    "{}: no matching reference in {}",
                    name,
                    a.reference.display()
                )));
            }
            pairs.push((name, reference, test));
        }
        if pairs.is_empty() {
            return Err(Error::Invalid(format!(
                "{}: no PNG files to score",
                a.test.display()
            )));
        }
        Ok(pairs)
    } else {
        let name = a
            .test
            .file_name()
            .and_then(|n| n.to_str())
            .unwrap_or_default()
            .to_string();
        Ok(vec![(name, a.reference.clone(), a.test.clone())])
    }
}

fn score_one(a: &EvalArgs, name: &str, reference: &Path, test: &Path) -> Result<MetricReport> {
    let r = Image::load(reference)?;
    let t = Image::load(test)?;
    Ok(MetricReport {
        image: name.to_string(),
        quality: a.quality,
        approach: a.approach.clone(),
        psnr_db: psnr(&r, &t)?,
        ssim: ssim(&r, &t)?,
        psnr_b_db: psnr_b(&r, &t)?,
    })
}

fn cmd_eval(a: EvalArgs) -> AppResult {
    let pairs = eval_pairs(&a)?;
    let threads: usize = std::env::var("O2M_THREADS")
        .ok()
        .and_then(|v| v.parse().ok())
        .unwrap_or(1);
    let threads = threads.clamp(1, pairs.len().max(1));

    let mut rows: Vec<Option<Result<MetricReport>>> = Vec::new();
    rows.resize_with(pairs.len(), || None);
    std::thread::scope(|scope| {
        for (worker, chunk) in rows.chunks_mut(pairs.len().div_ceil(threads)).enumerate() {
            let pairs = &pairs;
            let a = &a;
            let base = worker * pairs.len().div_ceil(threads);
            scope.spawn(move || {
                for (off, slot) in chunk.iter_mut().enumerate() {
                    let (name, reference, test) = &pairs[base + off];
                    *slot = Some(score_one(a, name, reference, test));
                }
            });
        }
    });

    let new_file = !a.csv.exists();
    let mut csv = fs::OpenOptions::new()
        .create(true)
        .append(true)
        .open(&a.csv)
        .map_err(|e| Error::io(&a.csv, e))?;
    if new_file {
        writeln!(csv, "{CSV_HEADER}").map_err(|e| Error::io(&a.csv, e))?;
    }
    for slot in rows {
        let report = slot.expect("every slot scored")?;
        writeln!(csv, "{}", report.csv_row()).map_err(|e| Error::io(&a.csv, e))?;
    }
    println!("scored {} image(s) into {}", pairs.len(), a.csv.display());
    Ok(())
}

fn cmd_check(a: CheckArgs) -> AppResult {
    if a.gradients {
        let entries = gradient_suite()?;
        let mut failed = 0usize;
        println!("{:<24} {:>12}  {}", "check", "max rel err", "status");
        for e in &entries {
            let status = if e.passed() { "ok" } else { "FAIL" };
            println!("{:<24} {:>12.3e}  {}", e.name, e.max_rel_err, status);
            if !e.passed() {
                failed += 1;
            }
        }
        if failed > 0 {
            return Err(AppError::Core(Error::Numeric(format!(
                "{failed} gradient check(s) above {GRAD_TOLERANCE:.0e}"
            ))));
        }
        return Ok(());
    }
    if !a.deconv_demo {
        return Err(AppError::Usage(
            "check needs --gradients or --deconv-demo".into(),
        ));
    }
    let out = a.out.expect("clap enforces --out with --deconv-demo");
    require_png(&out, "--out")?;
    deconv_demo(&out)?;
    Ok(())
}

/// Left: plain transposed convolution of a constant image (grid
/// pattern). Right: the shift-and-average path (flat). Shared gray
/// scaling so the two halves are comparable.
fn deconv_demo(out: &Path) -> Result<()> {
    let mut rng = Rng::seed_from(0x64656d6f);
    let wd: Vec<f32> = (0..16).map(|_| rng.uniform(-1.0, 1.0) as f32).collect();
    let weight = Tensor::param(&[1, 1, 4, 4], wd)?;
    let bias = Tensor::param(&[1], vec![0.0f32])?;
    let up = Deconv2d::from_params(weight, bias, 2)?;
    let x = Tensor::constant(&[1, 1, 32, 32], vec![0.5f32; 32 * 32])?;
    let plain = up.forward_plain(&x)?.to_vec();
    let averaged = up.forward(&x)?.to_vec();

    let lo = plain
        .iter()
        .chain(&averaged)
        .fold(f32::MAX, |m, &v| m.min(v));
    let hi = plain
        .iter()
        .chain(&averaged)
        .fold(f32::MIN, |m, &v| m.max(v));
    let span = (hi - lo).max(1e-6);
    let to_gray = |v: f32| (((v - lo) / span) * 255.0).round().clamp(0.0, 255.0) as u8;

    let side = 64usize;
    let mut pixels = vec![0u8; side * (2 * side)];
    for y in 0..side {
        for xcol in 0..side {
            pixels[y * 2 * side + xcol] = to_gray(plain[y * side + xcol]);
            pixels[y * 2 * side + side + xcol] = to_gray(averaged[y * side + xcol]);
        }
    }
    Image::new(2 * side, side, 1, pixels)?.save(out)?;
    println!("wrote {}", out.display());
    Ok(())
}

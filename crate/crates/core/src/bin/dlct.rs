//! `dlct`: encrypt, decrypt and analyze 8-bit grayscale images.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use thiserror::Error;

use dlct_cipher::analysis::{
    self, AnalysisError, AnalysisReport, Direction, KeyParameter, KeySpacePreset, Occlusion,
    DEFAULT_CORRELATION_SEED, DEFAULT_NOISE_SEED, DEFAULT_PAIRS,
};
use dlct_cipher::chaos::LogisticParams;
use dlct_cipher::cipher::{self, derive_discards, Cipher, CipherError, CipherMatrix, GrayImage, KeyBundle};
use dlct_cipher::dlct::{self, ChirpRates, ComplexMatrix, DlctError, DIRECT_SUM_LIMIT};
use dlct_cipher::imageio::{self, FormatError, CIPHER_MAGIC};

#[derive(Parser)]
#[command(name = "dlct", version, about = "Chaotic scrambling + 2D discrete linear chirp transform image cipher")]
struct Cli {
    /// Worker threads (default: number of CPUs).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write a key file.
    Keygen(KeygenArgs),
    /// Encrypt a PGM image into a DLC1 ciphertext.
    Encrypt(CryptArgs),
    /// Decrypt a DLC1 ciphertext into a PGM image.
    Decrypt(CryptArgs),
    /// Standalone 2D DLCT of a PGM image or a DLC1 matrix.
    Transform(TransformArgs),
    /// Correlation, histogram and key-space report.
    Analyze(AnalyzeArgs),
    /// Damage a ciphertext, decrypt it and print the PSNR of the recovery.
    Attack {
        #[command(subcommand)]
        kind: AttackKind,
    },
    /// Decryption MSE as one key parameter moves away from its true value.
    Sweep(SweepArgs),
    /// Time the fast transform against the direct sum.
    Bench(BenchArgs),
}

#[derive(Args)]
struct KeygenArgs {
    #[arg(long, allow_negative_numbers = true)]
    x0: f64,
    #[arg(long, allow_negative_numbers = true)]
    mu1: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta_x: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta_y: f64,
    #[arg(long, allow_negative_numbers = true)]
    y0: f64,
    #[arg(long, allow_negative_numbers = true)]
    mu2: f64,
    /// Derive p1 and p2 from this image's pixel sum.
    #[arg(long, conflicts_with_all = ["p1", "p2"])]
    image: Option<PathBuf>,
    #[arg(long, required_unless_present = "image")]
    p1: Option<u64>,
    #[arg(long, required_unless_present = "image")]
    p2: Option<u64>,
    /// Output key file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CryptArgs {
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long)]
    key: PathBuf,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct TransformArgs {
    /// PGM image or DLC1 matrix.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, allow_negative_numbers = true)]
    beta_x: f64,
    #[arg(long, allow_negative_numbers = true)]
    beta_y: f64,
    #[arg(long)]
    inverse: bool,
    /// Output DLC1 file.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Paper,
    Physical,
}

impl From<PresetArg> for KeySpacePreset {
    fn from(p: PresetArg) -> Self {
        match p {
            PresetArg::Paper => KeySpacePreset::Paper,
            PresetArg::Physical => KeySpacePreset::Physical,
        }
    }
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    plain: PathBuf,
    /// Ciphertext; its quantized real part is analyzed.
    #[arg(long)]
    cipher: Option<PathBuf>,
    /// Key for the MSE/PSNR of the correct-key decryption.
    #[arg(long)]
    key: Option<PathBuf>,
    /// Report JSON (default: stdout).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Directory for `x,y` scatter CSVs of the sampled pixel pairs.
    #[arg(long)]
    scatter: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_PAIRS)]
    pairs: usize,
    #[arg(long, default_value_t = DEFAULT_CORRELATION_SEED)]
    seed: u64,
    #[arg(long, value_enum, default_value = "paper")]
    key_space: PresetArg,
}

#[derive(Args)]
struct AttackCommon {
    /// Reference plain image.
    #[arg(long)]
    plain: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// Ciphertext to attack (default: encrypt `--plain` with `--key`).
    #[arg(long)]
    cipher: Option<PathBuf>,
    /// Write the damaged ciphertext here.
    #[arg(long)]
    attacked: Option<PathBuf>,
    /// Write the recovered image here.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum AttackKind {
    /// Zero a quarter, half or three quarters of the ciphertext.
    Occlude {
        #[arg(long)]
        fraction: f64,
        #[command(flatten)]
        common: AttackCommon,
    },
    /// Add Gaussian noise scaled to the ciphertext's dynamic range.
    Noise {
        #[arg(long)]
        sigma: f64,
        #[arg(long, default_value_t = DEFAULT_NOISE_SEED)]
        seed: u64,
        #[command(flatten)]
        common: AttackCommon,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SweepFormat {
    Csv,
    Json,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    plain: PathBuf,
    #[arg(long)]
    key: PathBuf,
    /// x0, mu1, p1, beta_x, beta_y, y0, mu2 or p2.
    #[arg(long)]
    param: KeyParameter,
    #[arg(long, default_value_t = 1e-8)]
    log_min: f64,
    #[arg(long, default_value_t = 1e-1)]
    log_max: f64,
    /// Magnitudes per sign.
    #[arg(long, default_value_t = 40)]
    points: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: SweepFormat,
    /// Output file (default: stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, default_value_t = 256)]
    size: usize,
    #[arg(long, default_value_t = 10)]
    iters: usize,
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("{path}: {source}")]
    Format { path: PathBuf, source: FormatError },
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Cipher(#[from] CipherError),
    #[error(transparent)]
    Dlct(#[from] DlctError),
    #[error(transparent)]
    Analysis(#[from] AnalysisError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Json(_) => 2,
            CliError::Format { source: FormatError::KeyDomain(_), .. } => 3,
            CliError::Format { .. } => 2,
            CliError::Cipher(_) | CliError::Dlct(_) | CliError::Analysis(_) => 3,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn read(path: &Path) -> Result<Vec<u8>> {
    fs::read(path).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|source| CliError::Io { path: path.to_owned(), source })
}

fn write_or_stdout(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => write(p, bytes),
        None => io::stdout()
            .write_all(bytes)
            .map_err(|source| CliError::Io { path: "<stdout>".into(), source }),
    }
}

fn format_err(path: &Path) -> impl FnOnce(FormatError) -> CliError + '_ {
    move |source| CliError::Format { path: path.to_owned(), source }
}

fn load_image(path: &Path) -> Result<GrayImage> {
    imageio::load_pgm(&read(path)?).map_err(format_err(path))
}

fn load_cipher(path: &Path) -> Result<CipherMatrix> {
    imageio::read_cipher_file(&read(path)?).map_err(format_err(path))
}

fn load_key(path: &Path) -> Result<KeyBundle> {
    let bytes = read(path)?;
    let text = String::from_utf8(bytes).map_err(|e| CliError::Format {
        path: path.to_owned(),
        source: FormatError::KeySyntax { line: 0, message: e.to_string() },
    })?;
    imageio::read_key_file(&text).map_err(format_err(path))
}

fn keygen(a: KeygenArgs) -> Result<()> {
    let (p1, p2) = match &a.image {
        Some(path) => derive_discards(&load_image(path)?),
        None => match (a.p1, a.p2) {
            (Some(p1), Some(p2)) => (p1, p2),
            (None, _) => return Err(CliError::Usage("--p1 is required without --image".into())),
            (_, None) => return Err(CliError::Usage("--p2 is required without --image".into())),
        },
    };
    let keys = KeyBundle {
        key1: LogisticParams { x0: a.x0, mu: a.mu1, discard: p1 },
        key2: ChirpRates { beta_x: a.beta_x, beta_y: a.beta_y },
        key3: LogisticParams { x0: a.y0, mu: a.mu2, discard: p2 },
    };
    keys.validate()?;
    write_or_stdout(a.out.as_deref(), imageio::write_key_file(&keys).as_bytes())
}

fn encrypt(a: CryptArgs) -> Result<()> {
    let img = load_image(&a.input)?;
    let keys = load_key(&a.key)?;
    let c = cipher::encrypt(&img, &keys)?;
    write(&a.out, &imageio::write_cipher_file(&c))
}

fn decrypt(a: CryptArgs) -> Result<()> {
    let c = load_cipher(&a.input)?;
    let keys = load_key(&a.key)?;
    let img = cipher::decrypt(&c, &keys)?;
    write(&a.out, &imageio::save_pgm(&img))
}

fn transform(a: TransformArgs) -> Result<()> {
    let bytes = read(&a.input)?;
    let m = if bytes.starts_with(CIPHER_MAGIC) {
        imageio::read_cipher_file(&bytes).map_err(format_err(&a.input))?.into_matrix()
    } else {
        let img = imageio::load_pgm(&bytes).map_err(format_err(&a.input))?;
        let values: Vec<f64> = img.pixels().iter().map(|&p| f64::from(p)).collect();
        ComplexMatrix::from_real(img.rows(), img.cols(), &values)?
    };
    let rates = ChirpRates::new(a.beta_x, a.beta_y)?;
    let out = if a.inverse { dlct::dlct2_inverse(&m, rates)? } else { dlct::dlct2_forward(&m, rates)? };
    write(&a.out, &imageio::write_cipher_file(&CipherMatrix::new(out)))
}

fn scatter_csv(pairs: &[(u8, u8)]) -> String {
    let mut s = String::from("x,y\n");
    for (x, y) in pairs {
        s.push_str(&format!("{x},{y}\n"));
    }
    s
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let plain = load_image(&a.plain)?;
    let cipher = a.cipher.as_deref().map(load_cipher).transpose()?;
    let keys = a.key.as_deref().map(load_key).transpose()?;

    let (plain_stats, plain_samples) = analysis::image_statistics(&plain, a.pairs, a.seed)?;
    let mut scatters: Vec<(&str, Vec<(Direction, analysis::CorrelationSample)>)> = vec![("plain", plain_samples)];
    let cipher_stats = match &cipher {
        Some(c) => {
            let q = analysis::quantize_complex(c)?;
            let (stats, samples) = analysis::image_statistics(&q, a.pairs, a.seed)?;
            scatters.push(("cipher", samples));
            Some(stats)
        }
        None => None,
    };
    let mse = match &keys {
        Some(k) => {
            let c = match &cipher {
                Some(c) => c.clone(),
                None => cipher::encrypt(&plain, k)?,
            };
            Some(analysis::mse(&plain, &cipher::decrypt(&c, k)?)?)
        }
        None => None,
    };
    let preset = KeySpacePreset::from(a.key_space);
    let report = AnalysisReport {
        seed: a.seed,
        pairs: a.pairs,
        plain: plain_stats,
        cipher: cipher_stats,
        mse,
        psnr_db: mse.map(analysis::psnr_from_mse),
        key_space_preset: preset,
        key_space_bits: preset.bits(),
    };

    if let Some(dir) = &a.scatter {
        fs::create_dir_all(dir).map_err(|source| CliError::Io { path: dir.clone(), source })?;
        for (label, samples) in &scatters {
            for (direction, sample) in samples {
                let path = dir.join(format!("{label}_{}.csv", direction.name()));
                write(&path, scatter_csv(&sample.pairs).as_bytes())?;
            }
        }
    }
    let mut json = serde_json::to_string_pretty(&report)?;
    json.push('\n');
    write_or_stdout(a.report.as_deref(), json.as_bytes())
}

fn attack(kind: AttackKind) -> Result<()> {
    let (common, label) = match &kind {
        AttackKind::Occlude { fraction, common } => (common, format!("occlude fraction={fraction}")),
        AttackKind::Noise { sigma, seed, common } => (common, format!("noise sigma={sigma} seed={seed}")),
    };
    let plain = load_image(&common.plain)?;
    let keys = load_key(&common.key)?;
    let c = match &common.cipher {
        Some(p) => load_cipher(p)?,
        None => cipher::encrypt(&plain, &keys)?,
    };
    let damaged = match &kind {
        AttackKind::Occlude { fraction, .. } => analysis::occlude(&c, Occlusion::from_fraction(*fraction)?)?,
        AttackKind::Noise { sigma, seed, .. } => analysis::add_gaussian_noise(&c, *sigma, *seed)?,
    };
    let recovered = Cipher::new(&keys, c.rows(), c.cols())?.decrypt(&damaged)?;
    if let Some(p) = &common.attacked {
        write(p, &imageio::write_cipher_file(&damaged))?;
    }
    if let Some(p) = &common.out {
        write(p, &imageio::save_pgm(&recovered))?;
    }
    println!("{label} psnr_db={:.2}", analysis::psnr(&plain, &recovered)?);
    Ok(())
}

fn sweep(a: SweepArgs) -> Result<()> {
    if !(a.log_min > 0.0 && a.log_max >= a.log_min && a.log_max.is_finite()) {
        return Err(CliError::Usage("--log-min and --log-max need 0 < min <= max".into()));
    }
    let plain = load_image(&a.plain)?;
    let keys = load_key(&a.key)?;
    let grid = analysis::log_deviation_grid(a.log_min, a.log_max, a.points);
    let curve = analysis::sensitivity_sweep(&plain, &keys, a.param, &grid)?;
    let out = match a.format {
        SweepFormat::Csv => curve.to_csv(),
        SweepFormat::Json => serde_json::to_string_pretty(&curve)? + "\n",
    };
    write_or_stdout(a.out.as_deref(), out.as_bytes())
}

fn bench(a: BenchArgs) -> Result<()> {
    if a.size == 0 || a.iters == 0 {
        return Err(CliError::Usage("--size and --iters must be positive".into()));
    }
    let rates = ChirpRates::new(1.5, -3.5)?;
    let m = ComplexMatrix::from_fn(a.size, a.size, |r, c| Complex64::new(((r * 31 + c * 17) % 256) as f64, 0.0))?;
    let start = Instant::now();
    for _ in 0..a.iters {
        std::hint::black_box(dlct::dlct2_forward(&m, rates)?);
    }
    let fast = start.elapsed().as_secs_f64() / a.iters as f64;
    println!("fast   {0}x{0}: {1:.3} ms/iter", a.size, fast * 1e3);

    // The direct sum is O((NM)^2); it only runs on the largest square within the cap.
    let direct_size = a.size.min((DIRECT_SUM_LIMIT as f64).sqrt() as usize);
    if direct_size < a.size {
        println!("direct {0}x{0}: skipped, over the {DIRECT_SUM_LIMIT}-entry limit", a.size);
    }
    let small = ComplexMatrix::from_fn(direct_size, direct_size, |r, c| m.get(r, c))?;
    let start = Instant::now();
    let direct_out = dlct::dlct2_forward_direct(&small, rates)?;
    let direct = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let fast_out = dlct::dlct2_forward(&small, rates)?;
    let fast_small = start.elapsed().as_secs_f64();
    println!(
        "direct {0}x{0}: {1:.3} ms, fast {2:.3} ms, max |diff| {3:.2e}",
        direct_size,
        direct * 1e3,
        fast_small * 1e3,
        fast_out.max_abs_diff(&direct_out)
    );
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(CliError::Usage("--threads must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("--threads: {e}")))?;
    }
    match cli.command {
        Command::Keygen(a) => keygen(a),
        Command::Encrypt(a) => encrypt(a),
        Command::Decrypt(a) => decrypt(a),
        Command::Transform(a) => transform(a),
        Command::Analyze(a) => analyze(a),
        Command::Attack { kind } => attack(kind),
        Command::Sweep(a) => sweep(a),
        Command::Bench(a) => bench(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

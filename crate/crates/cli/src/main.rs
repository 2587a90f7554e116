mod commands;
mod parse;

use clap::{Args, Parser, Subcommand, ValueEnum};
use hillspec::potential::{ExtensionMode, Norm, Polynomial, Span};
use hillspec::{Complex64, IntegratorConfig};
use std::path::PathBuf;
use std::process::ExitCode;

/// Spectral analysis of Hill's equation with complex periodic potentials.
#[derive(Parser, Debug)]
#[command(name = "hillspec", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Locate eigenvalues of one or more boundary problems.
    Spectrum(SpectrumArgs),
    /// Trace the discriminant along a real segment and map |Δ² - 4| on a grid.
    Discriminant(DiscriminantArgs),
    /// Residuals of the potential conditions.
    Check(CheckArgs),
    /// Build a potential satisfying the half-interval condition from its odd part.
    Construct(ConstructArgs),
    /// Full verification report.
    Verify(VerifyArgs),
    /// Transformation kernel and its representation residual.
    Kernel(KernelArgs),
}

#[derive(Args, Debug, Clone)]
pub struct IntegratorArgs {
    #[arg(long)]
    rel_tol: Option<f64>,
    #[arg(long)]
    abs_tol: Option<f64>,
    #[arg(long)]
    max_step: Option<f64>,
    #[arg(long)]
    min_steps_per_wave: Option<usize>,
}

impl IntegratorArgs {
    pub fn config(&self) -> IntegratorConfig {
        let d = IntegratorConfig::default();
        IntegratorConfig {
            rel_tol: self.rel_tol.unwrap_or(d.rel_tol),
            abs_tol: self.abs_tol.unwrap_or(d.abs_tol),
            max_step: self.max_step.unwrap_or(d.max_step),
            min_steps_per_wave: self.min_steps_per_wave.unwrap_or(d.min_steps_per_wave),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct RegionArgs {
    /// Real range of the search rectangle, `min..max`.
    #[arg(long, value_parser = parse::range, allow_hyphen_values = true)]
    re: Option<(f64, f64)>,
    /// Imaginary range of the search rectangle, `min..max`.
    #[arg(long, value_parser = parse::range, allow_hyphen_values = true)]
    im: Option<(f64, f64)>,
    #[arg(long)]
    max_depth: Option<usize>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum NormArg {
    L2,
    Sup,
}

impl From<NormArg> for Norm {
    fn from(n: NormArg) -> Norm {
        match n {
            NormArg::L2 => Norm::L2,
            NormArg::Sup => Norm::Sup,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExtensionArg {
    #[value(name = "half_period")]
    HalfPeriod,
    #[value(name = "reflect_about_half")]
    ReflectAboutHalf,
    #[value(name = "explicit_tail")]
    ExplicitTail,
}

impl From<ExtensionArg> for ExtensionMode {
    fn from(e: ExtensionArg) -> ExtensionMode {
        match e {
            ExtensionArg::HalfPeriod => ExtensionMode::HalfPeriod,
            ExtensionArg::ReflectAboutHalf => ExtensionMode::ReflectAboutHalf,
            ExtensionArg::ExplicitTail => ExtensionMode::ExplicitTail,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum SpanArg {
    Half,
    Unit,
}

impl From<SpanArg> for Span {
    fn from(s: SpanArg) -> Span {
        match s {
            SpanArg::Half => Span::Half,
            SpanArg::Unit => Span::Unit,
        }
    }
}

#[derive(Args, Debug)]
pub struct SpectrumArgs {
    /// Potential spec (JSON).
    #[arg(long)]
    potential: PathBuf,
    /// Comma-separated problem tags: D, N, DN, ND, P, AP, D_half, N_half, DN_half, ND_half.
    #[arg(long, value_delimiter = ',', default_value = "P,AP")]
    tags: Vec<String>,
    #[command(flatten)]
    region: RegionArgs,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(short, long, default_value = ".")]
    output_dir: PathBuf,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Args, Debug)]
pub struct DiscriminantArgs {
    #[arg(long)]
    potential: PathBuf,
    /// Real segment of the trace, `min..max`.
    #[arg(long, value_parser = parse::range, allow_hyphen_values = true, default_value = "0..100")]
    re: (f64, f64),
    /// Points along the segment.
    #[arg(long, default_value_t = 201)]
    samples: usize,
    /// Imaginary range of the zero map.
    #[arg(long, value_parser = parse::range, allow_hyphen_values = true, default_value = "-5..5")]
    map_im: (f64, f64),
    /// Zero-map resolution along the real axis.
    #[arg(long, default_value_t = 41)]
    map_re_points: usize,
    /// Zero-map resolution along the imaginary axis.
    #[arg(long, default_value_t = 21)]
    map_im_points: usize,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(short, long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    /// Potential spec (JSON); may also be given with --potential.
    #[arg(conflicts_with = "potential")]
    path: Option<PathBuf>,
    #[arg(long)]
    potential: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "l2")]
    norm: NormArg,
    /// Verdict tolerance; defaults to 1e-8 (analytic) or 10 h² (sampled).
    #[arg(long)]
    tol: Option<f64>,
    /// Also write the JSON report to this file.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ConstructArgs {
    /// Odd part on the construction interval, `poly:c_n,...,c_0` (highest power first).
    #[arg(long, value_parser = parse::polynomial, allow_hyphen_values = true)]
    q2: Polynomial,
    #[arg(long, value_enum)]
    extension: Option<ExtensionArg>,
    /// `half` builds on [0, 1/2], `unit` on [0, 1].
    #[arg(long, value_enum, default_value = "half")]
    span: SpanArg,
    /// Samples on [1/2, 1] for explicit_tail, comma-separated complex numbers.
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true)]
    tail: Option<Vec<Complex64>>,
    #[arg(long)]
    grid_n: Option<usize>,
    #[arg(long)]
    id: Option<String>,
    /// Output potential spec file.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    potential: PathBuf,
    #[command(flatten)]
    region: RegionArgs,
    #[arg(long, value_enum, default_value = "l2")]
    norm: NormArg,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(short, long, default_value = ".")]
    output_dir: PathBuf,
}

#[derive(Args, Debug)]
pub struct KernelArgs {
    #[arg(long)]
    potential: PathBuf,
    #[arg(long, default_value_t = hillspec::kernel::DEFAULT_MESH)]
    n: usize,
    #[arg(long, default_value_t = hillspec::kernel::DEFAULT_PICARD_TOL)]
    picard_tol: f64,
    /// Spectral parameters for the representation check.
    #[arg(long, value_parser = parse::complex, value_delimiter = ',', allow_hyphen_values = true, default_value = "1+1i,1-1i,4,25")]
    mu: Vec<Complex64>,
    /// Mesh nodes x for the representation check.
    #[arg(long, value_delimiter = ',', default_value = "0.25,0.5,0.75,1")]
    x: Vec<f64>,
    /// Also write the kernel values to kernel.csv.
    #[arg(long)]
    dump: bool,
    #[command(flatten)]
    integrator: IntegratorArgs,
    #[arg(short, long, default_value = ".")]
    output_dir: PathBuf,
}

fn setup_threads() -> Result<(), commands::CliError> {
    let Ok(value) = std::env::var("HILLSPEC_THREADS") else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| commands::CliError::validation(format!("HILLSPEC_THREADS must be a positive integer, got `{value}`")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| commands::CliError::numerical(format!("cannot start worker pool: {e}")))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let run = setup_threads().and_then(|_| match &cli.command {
        Command::Spectrum(a) => commands::spectrum(a),
        Command::Discriminant(a) => commands::discriminant(a),
        Command::Check(a) => commands::check(a),
        Command::Construct(a) => commands::construct(a),
        Command::Verify(a) => commands::verify(a),
        Command::Kernel(a) => commands::kernel(a),
    });
    match run {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
    }
}

use crate::{
    CheckArgs, ConstructArgs, DiscriminantArgs, Format, IntegratorArgs, KernelArgs, RegionArgs, SpanArg,
    SpectrumArgs, VerifyArgs,
};
use hillspec::harness::{self, HarnessConfig};
use hillspec::output::{Header, ToleranceLadder};
use hillspec::potential::{self, ExtensionMode};
use hillspec::spectra::{self, SpectrumReport};
use hillspec::{kernel, ode, Complex64, IntegratorConfig, PotentialSpec, ProblemTag, SearchRegion};
use rayon::prelude::*;
use serde_json::{json, Value};
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

pub const EXIT_OK: u8 = 0;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_NUMERICAL: u8 = 3;
pub const EXIT_INCONCLUSIVE: u8 = 4;

#[derive(Debug)]
pub struct CliError {
    pub code: u8,
    pub message: String,
}

impl CliError {
    pub fn validation(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_NUMERICAL,
            message: message.into(),
        }
    }
}

impl From<hillspec::Error> for CliError {
    fn from(e: hillspec::Error) -> Self {
        if e.is_validation() {
            CliError::validation(e.to_string())
        } else {
            CliError::numerical(e.to_string())
        }
    }
}

type Outcome = Result<u8, CliError>;

fn load_potential(path: &Path) -> Result<PotentialSpec, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::validation(format!("cannot read potential file {}: {e}", path.display())))?;
    let q = PotentialSpec::from_json_str(&text)
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    q.validate()
        .map_err(|e| CliError::validation(format!("{}: {e}", path.display())))?;
    if q.id().is_some() {
        return Ok(q);
    }
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    Ok(q.with_id(stem))
}

fn integrator(args: &IntegratorArgs) -> Result<IntegratorConfig, CliError> {
    let cfg = args.config();
    cfg.validate()?;
    Ok(cfg)
}

/// The default region of `q` with any bounds given on the command line.
fn region(q: &PotentialSpec, args: &RegionArgs) -> Result<SearchRegion, CliError> {
    let mut r = spectra::default_region(q);
    if let Some((a, b)) = args.re {
        r.re_min = a;
        r.re_max = b;
    }
    if let Some((a, b)) = args.im {
        r.im_min = a;
        r.im_max = b;
    }
    if let Some(d) = args.max_depth {
        r.max_depth = d;
    }
    r.validate()?;
    Ok(r)
}

fn prepare_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::validation(format!("cannot create output directory {}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::validation(format!("cannot write {}: {e}", path.display())))
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values always serialize");
    s.push('\n');
    s
}

/// JSON object `{"header": ..., rest...}`.
fn with_header(header: &Header, rest: Value) -> Value {
    let mut obj = serde_json::Map::new();
    obj.insert("header".into(), serde_json::to_value(header).expect("header serializes"));
    if let Value::Object(m) = rest {
        obj.extend(m);
    }
    Value::Object(obj)
}

fn ladder(cfg: &IntegratorConfig) -> ToleranceLadder {
    ToleranceLadder {
        integration: cfg.rel_tol,
        ..ToleranceLadder::default()
    }
}

pub fn spectrum(args: &SpectrumArgs) -> Outcome {
    let q = load_potential(&args.potential)?;
    let cfg = integrator(&args.integrator)?;
    let region = region(&q, &args.region)?;
    let tags = args
        .tags
        .iter()
        .map(|t| t.parse::<ProblemTag>())
        .collect::<hillspec::Result<Vec<_>>>()?;
    if tags.is_empty() {
        return Err(CliError::validation("no problem tags given"));
    }
    prepare_dir(&args.output_dir)?;

    let mut unresolved = Vec::new();
    for tag in tags {
        let report = spectra::find_eigenvalues(&q, tag, &region, &cfg)?;
        let config = json!({
            "command": "spectrum",
            "potential": q.to_json_value(),
            "tag": tag,
            "region": region,
            "integrator": cfg,
        });
        let header = Header::new(&config, ladder(&cfg));
        let (name, body) = match args.format {
            Format::Csv => (format!("spectrum_{}.csv", tag.name()), header.prepend(&report.to_csv())),
            Format::Json => (
                format!("spectrum_{}.json", tag.name()),
                to_json(&with_header(
                    &header,
                    json!({ "potential_id": q.id(), "spectrum": serde_json::to_value(&report).map_err(hillspec::Error::from)? }),
                )),
            ),
        };
        write_file(&args.output_dir.join(&name), &body)?;
        println!("{}", spectrum_line(&report, &name));
        if !report.is_complete() {
            unresolved.push(tag);
        }
    }
    if !unresolved.is_empty() {
        let names: Vec<&str> = unresolved.iter().map(|t| t.name()).collect();
        return Err(CliError::numerical(format!(
            "spectrum not fully resolved for {}; raise --max-depth or shrink the region",
            names.join(", ")
        )));
    }
    Ok(EXIT_OK)
}

fn spectrum_line(r: &SpectrumReport, file: &str) -> String {
    format!(
        "{}: {} eigenvalues (winding count {}) -> {file}",
        r.tag.name(),
        r.eigenvalues.len(),
        r.winding_total
    )
}

pub fn discriminant(args: &DiscriminantArgs) -> Outcome {
    let q = load_potential(&args.potential)?;
    let cfg = integrator(&args.integrator)?;
    if args.samples < 2 || args.map_re_points < 2 || args.map_im_points < 2 {
        return Err(CliError::validation("sample counts must be at least 2"));
    }
    prepare_dir(&args.output_dir)?;
    let config = json!({
        "command": "discriminant",
        "potential": q.to_json_value(),
        "re": [args.re.0, args.re.1],
        "samples": args.samples,
        "map_im": [args.map_im.0, args.map_im.1],
        "map_points": [args.map_re_points, args.map_im_points],
        "integrator": cfg,
    });
    let header = Header::new(&config, ladder(&cfg));

    let lin = |(a, b): (f64, f64), n: usize, k: usize| a + (b - a) * k as f64 / (n - 1) as f64;
    let trace_mu: Vec<f64> = (0..args.samples).map(|k| lin(args.re, args.samples, k)).collect();
    let trace = trace_mu
        .par_iter()
        .map(|&m| ode::discriminant(&q, Complex64::new(m, 0.0), &cfg, false).map(|d| d.0))
        .collect::<hillspec::Result<Vec<_>>>()?;
    let mut csv = String::from("re_mu,re_delta,im_delta\n");
    for (m, d) in trace_mu.iter().zip(&trace) {
        let _ = writeln!(csv, "{m:.15e},{:.15e},{:.15e}", d.re, d.im);
    }
    write_file(&args.output_dir.join("discriminant_trace.csv"), &header.prepend(&csv))?;

    let grid: Vec<Complex64> = (0..args.map_im_points)
        .flat_map(|j| {
            (0..args.map_re_points).map(move |k| {
                Complex64::new(lin(args.re, args.map_re_points, k), lin(args.map_im, args.map_im_points, j))
            })
        })
        .collect();
    let values = grid
        .par_iter()
        .map(|&mu| ode::discriminant(&q, mu, &cfg, false).map(|d| d.0 * d.0 - 4.0))
        .collect::<hillspec::Result<Vec<_>>>()?;
    let mut csv = String::from("re_mu,im_mu,re_value,im_value,abs_value\n");
    for (mu, v) in grid.iter().zip(&values) {
        let _ = writeln!(csv, "{:.15e},{:.15e},{:.15e},{:.15e},{:.15e}", mu.re, mu.im, v.re, v.im, v.norm());
    }
    write_file(&args.output_dir.join("discriminant_zero_map.csv"), &header.prepend(&csv))?;
    println!(
        "trace: {} points, zero map: {}x{} points -> {}",
        args.samples,
        args.map_re_points,
        args.map_im_points,
        args.output_dir.display()
    );
    Ok(EXIT_OK)
}

pub fn check(args: &CheckArgs) -> Outcome {
    let path: &PathBuf = args
        .path
        .as_ref()
        .or(args.potential.as_ref())
        .ok_or_else(|| CliError::validation("a potential file is required"))?;
    let q = load_potential(path)?;
    if let Some(t) = args.tol {
        if !(t > 0.0 && t.is_finite()) {
            return Err(CliError::validation(format!("--tol must be positive, got {t}")));
        }
    }
    let report = potential::condition_report(&q, args.norm.into(), args.tol);
    let config = json!({
        "command": "check",
        "potential": q.to_json_value(),
        "norm": report.norm_used,
        "tolerance": report.tolerance,
    });
    let header = Header::new(&config, ToleranceLadder::default());
    let body = with_header(
        &header,
        json!({
            "potential_id": q.id(),
            "condition_report": serde_json::to_value(&report).map_err(hillspec::Error::from)?,
        }),
    );
    let text = to_json(&body);
    if let Some(out) = &args.output {
        if let Some(dir) = out.parent().filter(|d| !d.as_os_str().is_empty()) {
            prepare_dir(dir)?;
        }
        write_file(out, &text)?;
    }
    print!("{text}");
    Ok(EXIT_OK)
}

pub fn construct(args: &ConstructArgs) -> Outcome {
    let built = match args.span {
        SpanArg::Half => {
            let mode = args.extension.map(ExtensionMode::from).unwrap_or_default();
            potential::construct_from_q2(&args.q2, mode, args.tail.clone())?
        }
        SpanArg::Unit => {
            if args.extension.is_some() || args.tail.is_some() {
                return Err(CliError::validation(
                    "--extension and --tail apply only to --span half",
                ));
            }
            potential::construct_from_q2_unit(&args.q2)?
        }
    };
    let mut q = built.potential;
    if let Some(n) = args.grid_n {
        q = q.with_grid_n(n);
    }
    if let Some(id) = &args.id {
        q = q.with_id(id.clone());
    }
    q.validate()?;
    for w in &built.warnings {
        eprintln!("warning: {w}");
    }
    let spec = q.to_json_value();
    let config = json!({ "command": "construct", "potential": spec });
    let header = Header::new(&config, ToleranceLadder::default());
    if let Some(dir) = args.output.parent().filter(|d| !d.as_os_str().is_empty()) {
        prepare_dir(dir)?;
    }
    write_file(&args.output, &to_json(&with_header(&header, spec)))?;
    println!("wrote {}", args.output.display());
    Ok(EXIT_OK)
}

pub fn verify(args: &VerifyArgs) -> Outcome {
    let q = load_potential(&args.potential)?;
    let cfg = HarnessConfig {
        integrator: integrator(&args.integrator)?,
        norm: args.norm.into(),
        region: if args.region.re.is_some() || args.region.im.is_some() || args.region.max_depth.is_some() {
            Some(region(&q, &args.region)?)
        } else {
            None
        },
        ..HarnessConfig::default()
    };
    prepare_dir(&args.output_dir)?;
    let report = harness::doubleness_report(&q, &cfg)?;
    let mut json = report.to_json()?;
    json.push('\n');
    write_file(&args.output_dir.join("verification.json"), &json)?;
    let summary = report.summary();
    write_file(&args.output_dir.join("verification.txt"), &summary)?;
    print!("{summary}");
    if report.any_inconclusive() {
        eprintln!("verification inconclusive: a spectrum was not fully resolved or has a near-double root");
        return Ok(EXIT_INCONCLUSIVE);
    }
    Ok(EXIT_OK)
}

pub fn kernel(args: &KernelArgs) -> Outcome {
    let q = load_potential(&args.potential)?;
    let cfg = integrator(&args.integrator)?;
    if !(args.picard_tol > 0.0 && args.picard_tol.is_finite()) {
        return Err(CliError::validation(format!(
            "--picard-tol must be positive, got {}",
            args.picard_tol
        )));
    }
    prepare_dir(&args.output_dir)?;
    let grid = kernel::solve_goursat(&q, args.n, args.picard_tol)?;
    let residual = kernel::representation_residual(&grid, &args.mu, &args.x, &cfg)?;
    let config = json!({
        "command": "kernel",
        "potential": q.to_json_value(),
        "n": args.n,
        "picard_tol": args.picard_tol,
        "mu": args.mu,
        "x": args.x,
        "integrator": cfg,
    });
    let header = Header::new(&config, ladder(&cfg));
    let summary = with_header(
        &header,
        json!({
            "potential_id": q.id(),
            "n": grid.n(),
            "picard_iterations": grid.iterations(),
            "picard_last_update": grid.last_update(),
            "kernel_sup_norm": grid.sup_norm(),
            "mu_grid": args.mu,
            "x_grid": args.x,
            "representation_residual": residual,
        }),
    );
    write_file(&args.output_dir.join("kernel_summary.json"), &to_json(&summary))?;
    if args.dump {
        write_file(&args.output_dir.join("kernel.csv"), &header.prepend(&grid.to_csv()))?;
    }
    println!(
        "kernel n={} iterations={} sup|K|={:.6e} representation residual={:.6e}",
        grid.n(),
        grid.iterations(),
        grid.sup_norm(),
        residual
    );
    Ok(EXIT_OK)
}

//! `mpnormal validate|spectrum|verify`.
//!
//! Exit codes: 0 success, 1 failed validation or computation, 2 usage or
//! parse error. Reports go to stdout, diagnostics to stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::composite_spectrum::{full_spectrum, SpectrumResult};
use crate::config::{preset, ProblemConfig, PRESETS};
use crate::error::Error;
use crate::extension::{validate_extension, NormalExtension};
use crate::verify::{run_suite, Suite, REPORT_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(name = "mpnormal", version, about = "Normal extensions of multipoint d/dt + A operators and their spectra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Check that the unitary pair defines a normal extension.
    Validate(Common),
    /// Point, continuous and residual spectrum of the extension.
    Spectrum(Common),
    /// Run self-check suites.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

#[derive(Args, Debug)]
pub struct Common {
    /// Problem description (JSON).
    #[arg(long, value_name = "FILE", conflicts_with = "preset")]
    pub config: Option<PathBuf>,
    /// Bundled problem.
    #[arg(long, value_name = "NAME")]
    pub preset: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Write `re,im` scatter data of the spectrum here.
    #[arg(long, value_name = "FILE")]
    pub plot_data: Option<PathBuf>,
    /// Branches n in [-N, N].
    #[arg(long, value_name = "N", conflicts_with = "im_bound")]
    pub n_window: Option<i64>,
    /// Branches with |Im lambda| <= X.
    #[arg(long, value_name = "X")]
    pub im_bound: Option<f64>,
    /// Finite-difference cells for the oracle suite.
    #[arg(long, value_name = "M")]
    pub grid: Option<usize>,
    /// Kernel tolerance.
    #[arg(long, value_name = "X")]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long, value_enum, default_value_t = Suite::All)]
    pub suite: Suite,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

/// Failure carrying its exit code.
struct Exit(i32, String);

fn load(c: &Common) -> Result<ProblemConfig, Exit> {
    let mut cfg = match (&c.config, &c.preset) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path).map_err(|e| Exit(EXIT_USAGE, format!("{}: {e}", path.display())))?;
            ProblemConfig::from_json(&text).map_err(|e| {
                let msg = e.to_string();
                let msg = msg.strip_suffix(&format!(" at line {} column {}", e.line(), e.column())).unwrap_or(&msg);
                Exit(EXIT_USAGE, format!("{}:{}:{}: {msg}", path.display(), e.line(), e.column()))
            })?
        }
        (None, Some(name)) => preset(name).map_err(|e| Exit(EXIT_USAGE, e.to_string()))?,
        (None, None) => return Err(Exit(EXIT_USAGE, format!("one of --config or --preset is required (presets: {})", PRESETS.join(", ")))),
    };
    if let Some(n) = c.n_window {
        cfg.options.n_window = Some(n);
        cfg.options.im_bound = None;
    }
    if let Some(x) = c.im_bound {
        cfg.options.im_bound = Some(x);
        cfg.options.n_window = None;
    }
    if c.grid.is_some() {
        cfg.options.grid = c.grid;
    }
    if c.tol.is_some() {
        cfg.options.tol_kernel = c.tol;
    }
    Ok(cfg)
}

fn error_record(e: &Error) -> Value {
    json!({ "version": REPORT_VERSION, "kind": "error", "code": e.code(), "message": e.to_string() })
}

fn emit(out: &mut dyn Write, v: &Value) -> std::io::Result<()> {
    writeln!(out, "{}", serde_json::to_string_pretty(v).expect("json serializes"))
}

fn csv_rows(out: &mut dyn Write, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> std::io::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.flush()
}

fn validate(c: &Common, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let cfg = load(c)?;
    let built = cfg.build().and_then(|(p, e)| Ok((validate_extension(&p, &e)?, p)));
    let (report, p) = match built {
        Ok(x) => x,
        Err(e) => {
            let _ = emit(out, &error_record(&e));
            return Err(Exit(EXIT_FAILED, e.to_string()));
        }
    };
    let v = json!({
        "version": REPORT_VERSION,
        "kind": "normality_report",
        "coefficients": p.coefficient_report(),
        "report": report,
    });
    let io = match c.format {
        Format::Json => emit(out, &v),
        Format::Csv => csv_rows(
            out,
            &["field", "value"],
            v["report"].as_object().unwrap().iter().map(|(k, x)| vec![k.clone(), x.to_string()]),
        ),
    };
    io.map_err(|e| Exit(EXIT_FAILED, e.to_string()))?;
    if let Some(note) = &report.maximality_note {
        let _ = writeln!(err, "{note}");
    }
    for note in report.notes.iter().skip(1) {
        let _ = writeln!(err, "note: {note}");
    }
    Ok(if report.extension_exists { EXIT_OK } else { EXIT_FAILED })
}

fn spectrum_json(s: &SpectrumResult, kernel_dims: (usize, usize)) -> Value {
    let point: Vec<Value> = s
        .eigenvalues
        .iter()
        .map(|e| json!({ "re": e.lambda.re, "im": e.lambda.im, "n": e.branch_n, "mu_re": e.mu.re, "mu_im": e.mu.im, "residual": e.residual }))
        .collect();
    json!({
        "version": REPORT_VERSION,
        "kind": "spectrum_report",
        "window": s.window,
        "kernel_dims": [kernel_dims.0, kernel_dims.1],
        "point": point,
        "point_descriptor": s.point,
        "continuous": s.continuous.to_string(),
        "continuous_descriptor": s.continuous,
        "residual": s.residual.to_string(),
        "excluded_axis_points": s.excluded_axis_points,
        "provenance": s.provenance,
    })
}

fn write_plot_data(path: &PathBuf, s: &SpectrumResult) -> std::io::Result<()> {
    let file = std::fs::File::create(path)?;
    let mut w = csv::Writer::from_writer(file);
    w.write_record(["re", "im"])?;
    for z in &s.point_enumerated {
        w.write_record([z.re.to_string(), z.im.to_string()])?;
    }
    // the continuous part lies on Re = 0
    w.write_record(["0", "iR"])?;
    w.flush()
}

fn spectrum(c: &Common, out: &mut dyn Write) -> Result<i32, Exit> {
    let cfg = load(c)?;
    let result = cfg.build().and_then(|(p, e)| NormalExtension::new(p, e)).and_then(|ext| {
        let s = full_spectrum(&ext, cfg.window(), cfg.options.arg_branch)?;
        Ok((s, ext.report().kernel_dims))
    });
    let (s, kernel_dims) = match result {
        Ok(x) => x,
        Err(e) => {
            let _ = emit(out, &error_record(&e));
            return Err(Exit(EXIT_FAILED, e.to_string()));
        }
    };
    let io = match c.format {
        Format::Json => emit(out, &spectrum_json(&s, kernel_dims)),
        Format::Csv => csv_rows(
            out,
            &["re", "im", "n", "mu_re", "mu_im", "residual"],
            s.eigenvalues.iter().map(|e| {
                vec![e.lambda.re.to_string(), e.lambda.im.to_string(), e.branch_n.to_string(), e.mu.re.to_string(), e.mu.im.to_string(), e.residual.to_string()]
            }),
        ),
    };
    io.map_err(|e| Exit(EXIT_FAILED, e.to_string()))?;
    if let Some(path) = &c.plot_data {
        write_plot_data(path, &s).map_err(|e| Exit(EXIT_FAILED, format!("{}: {e}", path.display())))?;
    }
    Ok(EXIT_OK)
}

fn verify(a: &VerifyArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Exit> {
    let cfg = load(&a.common)?;
    let report = run_suite(&cfg, a.suite, a.seed);
    let io = match a.common.format {
        Format::Json => emit(out, &serde_json::to_value(&report).expect("report serializes")),
        Format::Csv => csv_rows(
            out,
            &["name", "pass", "measured", "threshold"],
            report.checks.iter().map(|c| vec![c.name.clone(), c.pass.to_string(), c.measured.to_string(), c.threshold.to_string()]),
        ),
    };
    io.map_err(|e| Exit(EXIT_FAILED, e.to_string()))?;
    for c in report.checks.iter().filter(|c| !c.pass) {
        let _ = writeln!(err, "FAIL {}: measured {} (threshold {}){}", c.name, c.measured, c.threshold, c.detail.as_deref().map(|d| format!(", {d}")).unwrap_or_default());
    }
    Ok(if report.passed { EXIT_OK } else { EXIT_FAILED })
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { write!(err, "{text}") } else { write!(out, "{text}") };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Validate(c) => validate(c, out, err),
        Command::Spectrum(c) => spectrum(c, out),
        Command::Verify(a) => verify(a, out, err),
    };
    match result {
        Ok(code) => code,
        Err(Exit(code, msg)) => {
            let _ = writeln!(err, "error: {msg}");
            code
        }
    }
}

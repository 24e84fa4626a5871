use std::fmt::Write as _;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use rayon::prelude::*;

use cauchy_lipschitz::identities::{run_identity_suite, SuiteSpec};
use cauchy_lipschitz::kernels::schur_row_integral;
use cauchy_lipschitz::report::VerificationReport;
use cauchy_lipschitz::transform::{cauchy_transform, log_grid, norm_scan, plemelj_decompose, BoundaryFunction, PlemeljOptions};
use cauchy_lipschitz::{ConeSpec, CurveSpec, Error, QuadConfig};

#[derive(Parser, Debug)]
#[command(name = "cauchy-lip", version, about = "Cauchy transform on Lipschitz graphs: transforms, boundary decompositions, norm scans and a verification suite")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run the verification suite and write the JSON report.
    Verify(Opts),
    /// Evaluate G(w) at points off the curve.
    Transform(Opts),
    /// Boundary values from both sides and the jump across the curve.
    Decompose(Opts),
    /// Norms of G on shifted curves against the operator bound.
    NormScan(Opts),
    /// Schur row integrals at points off the curve.
    Schur(Opts),
    /// Summarize a JSON report (`--input`), or run the suite and summarize it.
    Report(Opts),
}

#[derive(Args, Debug, Clone)]
struct Opts {
    /// Curve registry entry, e.g. `line`, `wedge:m=0.5`, `sine:amp=0.5,freq=1`, `ramp:m=1,width=1`.
    #[arg(long)]
    curve: Option<String>,
    /// Boundary function, e.g. `rational:c=1`, `bump:0,1`, `indicator:-1,1`, `gaussian:sigma=1`.
    #[arg(long)]
    function: Option<String>,
    /// CSV file of boundary samples `u,re,im` (or a JSON report for `report`).
    #[arg(long)]
    input: Option<PathBuf>,
    /// Output file; standard output when omitted.
    #[arg(long)]
    output: Option<PathBuf>,
    #[arg(long)]
    tau_min: Option<f64>,
    #[arg(long)]
    tau_max: Option<f64>,
    #[arg(long)]
    tau_count: Option<usize>,
    /// Relative tolerance, or `key=value` quadrature overrides; repeatable.
    #[arg(long)]
    tol: Vec<String>,
    /// Near/far split radius of the quadrature.
    #[arg(long)]
    truncation: Option<f64>,
    /// Seed for sample points.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV of points: `re,im` for transform and schur, `u` for decompose.
    #[arg(long)]
    grid_file: Option<PathBuf>,
}

/// Failure before any output was produced.
struct ConfigError(String);

impl From<Error> for ConfigError {
    fn from(e: Error) -> Self {
        ConfigError(e.to_string())
    }
}

struct Outcome {
    text: String,
    flagged: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (opts, run): (&Opts, fn(&Opts) -> Result<Outcome, ConfigError>) = match &cli.command {
        Command::Verify(o) => (o, cmd_verify),
        Command::Transform(o) => (o, cmd_transform),
        Command::Decompose(o) => (o, cmd_decompose),
        Command::NormScan(o) => (o, cmd_norm_scan),
        Command::Schur(o) => (o, cmd_schur),
        Command::Report(o) => (o, cmd_report),
    };
    let outcome = match run(opts) {
        Ok(o) => o,
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    if let Err(e) = write_output(opts.output.as_deref(), &outcome.text) {
        eprintln!("error: {e}");
        return ExitCode::from(2);
    }
    if outcome.flagged {
        ExitCode::from(1)
    } else {
        ExitCode::SUCCESS
    }
}

/// Writes to a temporary file beside `path` and renames it into place.
fn write_output(path: Option<&Path>, text: &str) -> std::io::Result<()> {
    let Some(path) = path else {
        std::io::stdout().write_all(text.as_bytes())?;
        return Ok(());
    };
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(text.as_bytes())?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        tmp.as_file().set_permissions(std::fs::Permissions::from_mode(0o644))?;
    }
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

fn quad_config(o: &Opts) -> Result<QuadConfig, ConfigError> {
    let mut cfg = QuadConfig::default();
    for item in &o.tol {
        for part in item.split(',') {
            match part.trim().parse::<f64>() {
                Ok(x) => cfg.rel_tol = x,
                Err(_) => cfg.apply_kv(part)?,
            }
        }
    }
    if let Some(r) = o.truncation {
        cfg.truncation_r = r;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn curve(o: &Opts) -> Result<CurveSpec, ConfigError> {
    Ok(CurveSpec::parse(o.curve.as_deref().unwrap_or("line"))?)
}

fn boundary_function(o: &Opts, default: &str) -> Result<BoundaryFunction, ConfigError> {
    match (&o.function, &o.input) {
        (Some(_), Some(_)) => Err(ConfigError("give either --function or --input, not both".into())),
        (None, Some(path)) => Ok(BoundaryFunction::from_csv_file(path)?),
        (f, None) => Ok(BoundaryFunction::parse(f.as_deref().unwrap_or(default))?),
    }
}

fn tau_grid(o: &Opts) -> Result<Vec<f64>, ConfigError> {
    Ok(log_grid(o.tau_min.unwrap_or(1e-3), o.tau_max.unwrap_or(1e3), o.tau_count.unwrap_or(24))?)
}

fn read_grid(path: &Path, columns: usize) -> Result<Vec<Vec<f64>>, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
    let mut rows = Vec::new();
    for (k, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok().filter(|x| x.is_finite())).collect();
        match parsed {
            Some(v) if v.len() == columns => rows.push(v),
            // a header line is allowed before any data
            None if rows.is_empty() && fields.iter().all(|f| f.parse::<f64>().is_err()) => {}
            _ => return Err(ConfigError(format!("{}: line {}: expected {columns} numeric fields, got `{line}`", path.display(), k + 1))),
        }
    }
    if rows.is_empty() {
        return Err(ConfigError(format!("{}: no points", path.display())));
    }
    Ok(rows)
}

fn reject(what: &[(&str, bool)]) -> Result<(), ConfigError> {
    for (flag, given) in what {
        if *given {
            return Err(ConfigError(format!("{flag} does not apply to this command")));
        }
    }
    Ok(())
}

fn cmd_verify(o: &Opts) -> Result<Outcome, ConfigError> {
    reject(&[("--function", o.function.is_some()), ("--input", o.input.is_some()), ("--grid-file", o.grid_file.is_some())])?;
    let report = run_suite(o)?;
    let failed = report.failed_rows().count();
    eprintln!("{} rows, {} failed", report.rows.len(), failed);
    Ok(Outcome {
        text: report.to_json() + "\n",
        flagged: !report.pass,
    })
}

fn run_suite(o: &Opts) -> Result<VerificationReport, ConfigError> {
    let cfg = quad_config(o)?;
    let mut spec = match &o.curve {
        Some(_) => SuiteSpec::with_curves(vec![curve(o)?]),
        None => SuiteSpec::default_bank(),
    };
    spec.seed = o.seed;
    if o.tau_min.is_some() || o.tau_max.is_some() || o.tau_count.is_some() {
        spec.tau_grid = tau_grid(o)?;
    }
    Ok(run_identity_suite(&spec, &cfg).without_timings())
}

fn cmd_report(o: &Opts) -> Result<Outcome, ConfigError> {
    let report = match &o.input {
        Some(path) => {
            reject(&[("--curve", o.curve.is_some()), ("--function", o.function.is_some())])?;
            let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?;
            serde_json::from_str::<VerificationReport>(&text).map_err(|e| ConfigError(format!("{}: {e}", path.display())))?
        }
        None => run_suite(o)?,
    };
    let mut text = String::new();
    let width = report.rows.iter().map(|r| r.id.len()).max().unwrap_or(2);
    for r in &report.rows {
        let _ = writeln!(
            text,
            "{}  {:width$}  {:>14.8e} {:?} {:<14.8e}  {}  {}",
            if r.pass { "PASS" } else { "FAIL" },
            r.id,
            r.lhs,
            r.relation,
            r.rhs,
            r.curve,
            r.case,
        );
    }
    let failed = report.failed_rows().count();
    let _ = writeln!(text, "# {} rows, {} failed", report.rows.len(), failed);
    Ok(Outcome { text, flagged: !report.pass })
}

fn cmd_transform(o: &Opts) -> Result<Outcome, ConfigError> {
    let (c, g, cfg) = (curve(o)?, boundary_function(o, "bump:0,1")?, quad_config(o)?);
    let points: Vec<Complex64> = match &o.grid_file {
        Some(p) => read_grid(p, 2)?.into_iter().map(|v| Complex64::new(v[0], v[1])).collect(),
        None => (-4..=4)
            .flat_map(|k| {
                let z = c.eval(0.5 * k as f64);
                [0.25, 1.0, -0.25, -1.0].map(|t| z + Complex64::new(0.0, t))
            })
            .collect(),
    };
    let values: Vec<Result<Complex64, Error>> = points.par_iter().map(|&w| cauchy_transform(&g, &c, w, &cfg)).collect();
    let mut text = String::from("re(w),im(w),re(G),im(G),status\n");
    let mut flagged = false;
    for (w, v) in points.iter().zip(values) {
        let (val, status) = match v {
            Ok(v) => (v, "ok"),
            Err(e) => {
                flagged = true;
                (Complex64::new(f64::NAN, f64::NAN), status_of(&e))
            }
        };
        let _ = writeln!(text, "{},{},{:.15e},{:.15e},{status}", w.re, w.im, val.re, val.im);
    }
    Ok(Outcome { text, flagged })
}

fn status_of(e: &Error) -> &'static str {
    match e {
        Error::NonConvergent { .. } => "non_convergent",
        Error::NotConverged { .. } => "non_convergent",
        Error::OnCurve { .. } => "on_curve",
        Error::TangentUndefined { .. } => "corner",
        _ => "error",
    }
}

fn cmd_decompose(o: &Opts) -> Result<Outcome, ConfigError> {
    let (c, g, cfg) = (curve(o)?, boundary_function(o, "rational:c=1")?, quad_config(o)?);
    let us: Vec<f64> = match &o.grid_file {
        Some(p) => read_grid(p, 1)?.into_iter().map(|v| v[0]).collect(),
        None => (0..20).map(|k| -4.75 + 0.5 * k as f64).collect(),
    };
    let opts = PlemeljOptions::default();
    let results: Vec<_> = us
        .par_iter()
        .map(|&u| {
            let cone = ConeSpec::at_curve(&c, u, std::f64::consts::FRAC_PI_4)?;
            plemelj_decompose(&g, &c, u, &cone, &opts, &cfg)
        })
        .collect();
    let mut text = String::from("u,re(g),im(g),re(jump),im(jump),abs_err,status\n");
    let mut flagged = false;
    for (&u, r) in us.iter().zip(results) {
        let gv = g.eval(u);
        let (jump, status) = match r {
            Ok(r) if r.converged => (r.jump, "ok"),
            Ok(r) => (r.jump, "non_convergent"),
            Err(e) => (Complex64::new(f64::NAN, f64::NAN), status_of(&e)),
        };
        flagged |= status != "ok";
        let _ = writeln!(text, "{u},{:.15e},{:.15e},{:.15e},{:.15e},{:.3e},{status}", gv.re, gv.im, jump.re, jump.im, (jump - gv).norm());
    }
    Ok(Outcome { text, flagged })
}

fn cmd_norm_scan(o: &Opts) -> Result<Outcome, ConfigError> {
    let (c, g, cfg, taus) = (curve(o)?, boundary_function(o, "rational:c=1")?, quad_config(o)?, tau_grid(o)?);
    let scan = norm_scan(&g, &c, &taus, &cfg)?;
    let mut text = String::from("tau,side,norm,ratio,status\n");
    let mut flagged = scan.violated;
    for r in &scan.rows {
        flagged |= r.status.as_str() != "ok";
        let _ = writeln!(text, "{:.6e},{},{:.12e},{:.12e},{}", r.tau, r.side.as_str(), r.norm, r.ratio, r.status.as_str());
    }
    let _ = writeln!(text, "# g_norm={:.12e}", scan.g_norm);
    let _ = writeln!(text, "# max_ratio={:.12e}", scan.max_ratio);
    let _ = writeln!(text, "# bound={}", scan.bound);
    Ok(Outcome { text, flagged })
}

fn cmd_schur(o: &Opts) -> Result<Outcome, ConfigError> {
    reject(&[("--function", o.function.is_some()), ("--input", o.input.is_some())])?;
    let (c, cfg) = (curve(o)?, quad_config(o)?);
    let points: Vec<Complex64> = match &o.grid_file {
        Some(p) => read_grid(p, 2)?.into_iter().map(|v| Complex64::new(v[0], v[1])).collect(),
        None => vec![Complex64::new(0.0, -1.0), Complex64::new(-5.0, -3.0), Complex64::new(0.0, 2.0), Complex64::new(3.0, 0.5)],
    };
    let bound = if c.is_flat() { std::f64::consts::PI } else { 4.0 * std::f64::consts::PI };
    let results: Vec<_> = points.par_iter().map(|&w| schur_row_integral(w, &c, &cfg)).collect();
    let mut text = String::from("re(w),im(w),integral,error_estimate,status\n");
    let mut flagged = false;
    for (w, r) in points.iter().zip(results) {
        let (v, err, status) = match r {
            Ok(r) if r.value.re <= bound * (1.0 + 1e-6) => (r.value.re, r.error_estimate, "ok"),
            Ok(r) => (r.value.re, r.error_estimate, "exceeds_bound"),
            Err(e) => (f64::NAN, f64::NAN, status_of(&e)),
        };
        flagged |= status != "ok";
        let _ = writeln!(text, "{},{},{:.12e},{:.3e},{status}", w.re, w.im, v, err);
    }
    let _ = writeln!(text, "# bound={bound}");
    Ok(Outcome { text, flagged })
}

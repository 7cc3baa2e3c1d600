//! Command-line front end.
//!
//! Entry parameters are passed as `--name value` after the entry id (for
//! example `classify example02 --c 1`). Exit codes: 0 success (and expected
//! verdicts matched), 1 verdict mismatch, 2 usage or configuration error.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::catalog::{self, CatalogEntry, Mismatch};
use crate::curvature::{classify_with, sample_from, ClassificationReport, Status, Tolerances};
use crate::families::{self, characteristic_flow, transport_invariant, FamilyConfig, FamilyError};
use crate::metric::{GridSpec, MetricProfile, RsPoint};
use crate::report::{fmt_f64, to_json};
use crate::spray::{integrate_geodesic, spray_data, straightness_deviation, trajectory_csv};

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;

/// Names recognised as entry parameters anywhere after an entry-taking subcommand.
const ENTRY_PARAMS: [&str; 7] = ["c", "epsilon", "gamma", "h", "m", "sign", "g"];
const ENTRY_COMMANDS: [&str; 3] = ["classify", "geodesic", "grid-dump"];

#[derive(Parser, Debug)]
#[command(name = "finslerlab", version, about = "Verify spherically symmetric Finsler metrics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, PartialEq, ValueEnum)]
enum Quantity {
    #[value(name = "phi")]
    Phi,
    #[value(name = "Q")]
    Q,
    #[value(name = "P")]
    P,
    #[value(name = "R1")]
    R1,
    #[value(name = "R2")]
    R2,
    #[value(name = "R3")]
    R3,
    #[value(name = "R4")]
    R4,
    #[value(name = "K")]
    K,
}

#[derive(clap::Args, Debug, Default)]
struct GridArgs {
    /// Number of r nodes.
    #[arg(long)]
    n_r: Option<usize>,
    /// Number of s/r nodes.
    #[arg(long)]
    n_sigma: Option<usize>,
}

impl GridArgs {
    fn apply(&self, mut g: GridSpec) -> Result<GridSpec, String> {
        if let Some(n) = self.n_r {
            g.n_r = n;
        }
        if let Some(n) = self.n_sigma {
            g.n_sigma = n;
        }
        if g.n_r == 0 || g.n_sigma == 0 {
            return Err("grid sizes must be positive".into());
        }
        Ok(g)
    }
}

#[derive(clap::Args, Debug, Default)]
struct TolArgs {
    #[arg(long)]
    tol_scalar: Option<f64>,
    #[arg(long)]
    tol_const: Option<f64>,
    #[arg(long)]
    tol_k_spread: Option<f64>,
    #[arg(long)]
    tol_douglas: Option<f64>,
    #[arg(long)]
    tol_flat: Option<f64>,
}

impl TolArgs {
    fn apply(&self, mut t: Tolerances) -> Result<Tolerances, String> {
        let set = |slot: &mut f64, v: Option<f64>| {
            if let Some(v) = v {
                *slot = v;
            }
        };
        set(&mut t.scalar, self.tol_scalar);
        set(&mut t.constant, self.tol_const);
        set(&mut t.k_spread, self.tol_k_spread);
        set(&mut t.douglas, self.tol_douglas);
        set(&mut t.flat, self.tol_flat);
        t.validate()?;
        Ok(t)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Catalog of closed-form metrics.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Classify a catalog entry; entry parameters follow as `--name value`.
    Classify {
        entry: String,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        tol: TolArgs,
        /// Write the JSON report here.
        #[arg(long)]
        output: Option<PathBuf>,
        /// Print the JSON report on stdout instead of the summary.
        #[arg(long)]
        json: bool,
    },
    /// Integrate a geodesic of a catalog entry and report its straightness.
    Geodesic {
        entry: String,
        /// Initial position, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        x0: Vec<f64>,
        /// Initial velocity, comma separated.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        y0: Vec<f64>,
        #[arg(long, default_value_t = 1.0)]
        t_end: f64,
        #[arg(long, default_value_t = 1e-2)]
        step: f64,
        /// Write the trajectory CSV here instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Build a metric from a JSON family config and classify it.
    Family {
        config: PathBuf,
        #[command(flatten)]
        grid: GridArgs,
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Integrate a characteristic curve of a family config; CSV `r,X,invariant`.
    Characteristic {
        config: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        r0: f64,
        #[arg(long, allow_hyphen_values = true)]
        s0: f64,
        #[arg(long)]
        r_end: f64,
        #[arg(long, default_value_t = 1e-3)]
        step: f64,
    },
    /// Dump a quantity on the default grid as CSV `r,s,value`.
    GridDump {
        entry: String,
        quantity: Quantity,
        #[command(flatten)]
        grid: GridArgs,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    /// Print the entry manifest.
    List {
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
}

/// Failure carrying its exit code.
struct Failure {
    code: i32,
    message: String,
}

impl Failure {
    fn config(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("i/o error: {e}"))
    }
}

/// Pull `--name value` / `--name=value` entry parameters out of the argument list.
fn split_entry_params(args: Vec<String>) -> (Vec<String>, BTreeMap<String, String>) {
    let is_entry_cmd = args.iter().skip(1).find(|a| !a.starts_with('-')).is_some_and(|c| ENTRY_COMMANDS.contains(&c.as_str()));
    if !is_entry_cmd {
        return (args, BTreeMap::new());
    }
    let mut rest = Vec::with_capacity(args.len());
    let mut params = BTreeMap::new();
    let mut it = args.into_iter().peekable();
    while let Some(a) = it.next() {
        if let Some(flag) = a.strip_prefix("--") {
            let (name, inline) = match flag.split_once('=') {
                Some((n, v)) => (n.to_string(), Some(v.to_string())),
                None => (flag.to_string(), None),
            };
            if ENTRY_PARAMS.contains(&name.as_str()) {
                let value = inline.or_else(|| it.next()).unwrap_or_default();
                params.insert(name, value);
                continue;
            }
        }
        rest.push(a);
    }
    (rest, params)
}

/// Size the global rayon pool from `FINSLERLAB_THREADS`.
pub fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("FINSLERLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|n| *n > 0)
        .ok_or_else(|| format!("FINSLERLAB_THREADS = '{v}' must be a positive integer"))?;
    // a second initialisation in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Run with explicit argument list and streams; returns the exit code.
pub fn run_with(args: Vec<String>, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    if let Err(m) = init_threads() {
        let _ = writeln!(err, "error: {m}");
        return EXIT_CONFIG;
    }
    let (args, params) = split_entry_params(args);
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(err, "{text}");
                EXIT_CONFIG
            } else {
                let _ = write!(out, "{text}");
                EXIT_OK
            };
        }
    };
    match dispatch(cli.command, &params, out, err) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message);
            f.code
        }
    }
}

/// Run against the process arguments and standard streams.
pub fn run() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

fn load_entry(id: &str, params: &BTreeMap<String, String>) -> Result<CatalogEntry, Failure> {
    catalog::get(id, params).map_err(|e| Failure::config(e.to_string()))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure::config(format!("cannot write {}: {e}", path.display())))
}

fn dispatch(
    cmd: Command,
    params: &BTreeMap<String, String>,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<i32, Failure> {
    match cmd {
        Command::Catalog {
            action: CatalogAction::List { format },
        } => {
            match format {
                Format::Json => write!(out, "{}", catalog::manifest_json())?,
                Format::Csv => write!(out, "{}", catalog::manifest_csv())?,
            }
            Ok(EXIT_OK)
        }
        Command::Classify {
            entry,
            grid,
            tol,
            output,
            json,
        } => {
            let mut e = load_entry(&entry, params)?;
            e.grid = grid.apply(e.grid.clone()).map_err(Failure::config)?;
            let tol = tol.apply(e.tolerances()).map_err(Failure::config)?;
            let report = e.classify_with(&tol);
            let mism = e.mismatches(&report, &tol);
            let text = to_json(&report);
            if let Some(p) = &output {
                write_file(p, &text)?;
            }
            if json {
                write!(out, "{text}")?;
            } else {
                write_summary(out, &report, &tol, &mism)?;
            }
            let _ = err;
            Ok(if mism.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Geodesic {
            entry,
            x0,
            y0,
            t_end,
            step,
            output,
        } => {
            let e = load_entry(&entry, params)?;
            if x0.len() != y0.len() || x0.len() < 2 {
                return Err(Failure::config("x0 and y0 need the same dimension (at least 2)"));
            }
            let traj = integrate_geodesic(&e.profile, &x0, &y0, t_end, step)
                .map_err(|er| Failure::config(format!("cannot start geodesic: {er}")))?;
            let csv = trajectory_csv(&traj);
            let dev = straightness_deviation(&traj.states);
            let summary = format!(
                "steps={} max_local_error={:.3e} straightness_deviation={:.3e}{}",
                traj.states.len() - 1,
                traj.max_local_error(),
                dev,
                match &traj.exit {
                    Some(x) => format!(" exit={}", serde_json::to_string(x).unwrap_or_default()),
                    None => String::new(),
                }
            );
            match &output {
                Some(p) => {
                    write_file(p, &csv)?;
                    writeln!(out, "{summary}")?;
                }
                None => {
                    write!(out, "{csv}")?;
                    writeln!(err, "{summary}")?;
                }
            }
            Ok(EXIT_OK)
        }
        Command::Family { config, grid, output } => {
            let cfg = read_config(&config)?;
            let profile = families::build_profile(&cfg.family).map_err(family_failure)?;
            let g = grid.apply(cfg.grid.clone().unwrap_or_default()).map_err(Failure::config)?;
            let tol = cfg
                .tolerances
                .unwrap_or_else(|| Tolerances::for_provenance(profile.provenance));
            let report = classify_with(&profile, &g.points(&profile.domain), &tol);
            let mism: Vec<Mismatch> = cfg
                .expected
                .iter()
                .filter(|(k, v)| report.status(k) != Some(**v))
                .map(|(k, v)| Mismatch {
                    name: k.clone(),
                    expected: v.as_str().into(),
                    observed: report.status(k).map_or("missing", |s| s.as_str()).into(),
                })
                .collect();
            if let Some(p) = &output {
                write_file(p, &to_json(&report))?;
            }
            write_summary(out, &report, &tol, &mism)?;
            Ok(if mism.is_empty() { EXIT_OK } else { EXIT_MISMATCH })
        }
        Command::Characteristic {
            config,
            r0,
            s0,
            r_end,
            step,
        } => {
            let cfg = read_config(&config)?;
            let start = RsPoint::new(r0, s0).map_err(|e| Failure::config(e.to_string()))?;
            let curve = characteristic_flow(&cfg.family, start, r_end, step).map_err(family_failure)?;
            writeln!(out, "r,X,invariant")?;
            for p in &curve.points {
                let v = transport_invariant(&cfg.family, *p).unwrap_or(f64::NAN);
                writeln!(out, "{},{},{}", fmt_f64(p.r), fmt_f64(p.s), fmt_f64(v))?;
            }
            if let Some(x) = &curve.exit {
                writeln!(err, "stopped early: {x}")?;
            }
            if !curve.flagged_steps.is_empty() {
                writeln!(err, "arctan jumps at steps {:?}", curve.flagged_steps)?;
            }
            Ok(EXIT_OK)
        }
        Command::GridDump { entry, quantity, grid } => {
            let mut e = load_entry(&entry, params)?;
            e.grid = grid.apply(e.grid.clone()).map_err(Failure::config)?;
            let pts = e.grid_points();
            let vals: Vec<f64> = pts.par_iter().map(|&at| quantity_at(&e.profile, at, quantity)).collect();
            writeln!(out, "r,s,value")?;
            for (at, v) in pts.iter().zip(vals) {
                writeln!(out, "{},{},{}", fmt_f64(at.r), fmt_f64(at.s), fmt_f64(v))?;
            }
            Ok(EXIT_OK)
        }
    }
}

fn family_failure(e: FamilyError) -> Failure {
    let kind = match &e {
        FamilyError::SingularIntegrand { .. } => "SingularIntegrand",
        FamilyError::CompatibilityFailure { .. } => "CompatibilityFailure",
        FamilyError::PositivityFailure { .. } => "PositivityFailure",
        FamilyError::InvalidSpec(_) => "InvalidSpec",
        FamilyError::Quadrature(_) => "QuadratureFailure",
        _ => "BuildError",
    };
    Failure::config(format!("{kind}: {e}"))
}

fn read_config(path: &Path) -> Result<FamilyConfig, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure::config(format!("cannot read {}: {e}", path.display())))?;
    FamilyConfig::from_json(&text).map_err(family_failure)
}

fn quantity_at(profile: &MetricProfile, at: RsPoint, q: Quantity) -> f64 {
    if q == Quantity::Phi {
        return profile.phi(at).unwrap_or(f64::NAN);
    }
    let Ok(sd) = spray_data(profile, at) else {
        return f64::NAN;
    };
    let s = sample_from(&sd);
    match q {
        Quantity::Phi => s.phi,
        Quantity::Q => s.q,
        Quantity::P => s.p,
        Quantity::R1 => s.r1,
        Quantity::R2 => s.r2,
        Quantity::R3 => s.r3,
        Quantity::R4 => s.r4,
        Quantity::K => s.k,
    }
}

fn write_summary(
    out: &mut dyn Write,
    report: &ClassificationReport,
    tol: &Tolerances,
    mism: &[Mismatch],
) -> std::io::Result<()> {
    let verdicts: Vec<String> = report
        .verdicts
        .iter()
        .map(|v| format!("{}={}", v.name, v.status.as_str()))
        .collect();
    writeln!(out, "{}: {}", report.name, verdicts.join(" "))?;
    if let (Some(k), Some(Status::Pass)) = (&report.k, report.status("constant_flag")) {
        let spread = if k.spread < tol.k_spread {
            format!("spread<{:e}", tol.k_spread)
        } else {
            format!("spread={:.3e}", k.spread)
        };
        writeln!(out, "constant K: mean={:.6} {spread}", k.mean)?;
    }
    if mism.is_empty() {
        writeln!(out, "expected verdicts matched")?;
    } else {
        for m in mism {
            writeln!(out, "MISMATCH {}: expected {}, observed {}", m.name, m.expected, m.observed)?;
        }
    }
    Ok(())
}

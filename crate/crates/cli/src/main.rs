use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use thl_core::constants::{ConstantKind, InequalityParams};
use thl_core::integrate::{ConeDomain, QuadratureSpec};
use thl_core::profiles::{build_cone_profile, build_half_profile};
use thl_core::report::{
    cmd_constants, cmd_sweep, GeometryKind, OutputFormat, Report, SweepPlan, Task, TaskOptions, CSV_COLUMNS, DEFAULT_GAP,
};
use thl_core::Error;

const EXIT_USAGE: u8 = 2;
const EXIT_RUNTIME: u8 = 1;

#[derive(Parser)]
#[command(name = "thl", version, about = "Sharp trace Hardy constants, extremizers and certificates")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Table of sharp constants with the identity suite at each grid point.
    Constants(Common),
    /// Profile ω and ω′ on a uniform grid.
    Profile {
        #[command(flatten)]
        common: Common,
        /// Number of grid points.
        #[arg(long, default_value_t = 101)]
        points: usize,
        /// Right end of the grid for the half-space profile.
        #[arg(long, default_value_t = 10.0)]
        y_max: f64,
    },
    /// Inequality certificates over a seeded corpus.
    Verify(Common),
    /// Rayleigh quotients of the extremizer families along an ε schedule.
    Sharpness(Common),
    /// Radial logarithmic constants and trace-log certificates.
    Logsob(Common),
    /// Runs a task over the grid and writes the table plus a plot-data companion.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = TaskArg::Constants)]
        task: TaskArg,
    },
}

#[derive(Args, Clone)]
struct Common {
    /// Dimensions n (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2")]
    n: Vec<usize>,
    /// Weight exponents s (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0", allow_hyphen_values = true)]
    s: Vec<f64>,
    /// Parameters β (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "2", allow_hyphen_values = true)]
    beta: Vec<f64>,
    /// Constant kinds (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "H_cone,k_half")]
    kinds: Vec<String>,
    #[arg(long, value_enum, default_value_t = GeometryArg::Cone)]
    geometry: GeometryArg,
    /// File of whitespace-separated unit normals, one per line.
    #[arg(long)]
    cone_normals: Option<PathBuf>,
    /// Decreasing ε values (comma separated).
    #[arg(long, value_delimiter = ',', default_value = "0.1,0.01,0.001")]
    eps_schedule: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    corpus_size: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Relative quadrature tolerance.
    #[arg(long, default_value_t = 1e-8)]
    tol: f64,
    /// Allowed relative gap to the sharp constant in sharpness studies.
    #[arg(long, default_value_t = DEFAULT_GAP)]
    gap: f64,
    /// Monte Carlo samples per integral.
    #[arg(long, default_value_t = 200_000)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GeometryArg {
    Cone,
    Halfspace,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum TaskArg {
    Constants,
    Verify,
    Sharpness,
    Logsob,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    err: anyhow::Error,
}

fn usage(err: impl Into<anyhow::Error>) -> Failure {
    Failure { code: EXIT_USAGE, err: err.into() }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Invalid(_) | Error::Range(_) | Error::Domain(_) | Error::Pole(_) => EXIT_USAGE,
            Error::IdentityViolation { .. } => 3,
            _ => EXIT_RUNTIME,
        };
        Failure { code, err: e.into() }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(err: anyhow::Error) -> Self {
        Failure { code: EXIT_RUNTIME, err }
    }
}

fn read_normals(path: &Path) -> Result<ConeDomain, Failure> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display())).map_err(usage)?;
    let normals = text
        .lines()
        .filter(|l| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .map(|l| l.split_whitespace().map(str::parse::<f64>).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()
        .with_context(|| format!("parsing {}", path.display()))
        .map_err(usage)?;
    Ok(ConeDomain::new(normals)?)
}

fn plan(c: &Common, task: Task) -> Result<SweepPlan, Failure> {
    let kinds = c
        .kinds
        .iter()
        .filter(|k| !k.trim().is_empty())
        .map(|k| k.parse::<ConstantKind>())
        .collect::<Result<Vec<_>, _>>()?;
    let cone = c.cone_normals.as_deref().map(read_normals).transpose()?;
    let plan = SweepPlan {
        n: c.n.clone(),
        s: c.s.clone(),
        beta: c.beta.clone(),
        task,
        spec: QuadratureSpec { rel_tol: c.tol, mc_samples: c.samples, seed: c.seed, ..Default::default() },
        format: match c.format {
            FormatArg::Json => OutputFormat::Json,
            FormatArg::Csv => OutputFormat::Csv,
        },
        options: TaskOptions {
            geometry: match c.geometry {
                GeometryArg::Cone => GeometryKind::Cone,
                GeometryArg::Halfspace => GeometryKind::Halfspace,
            },
            cone,
            kinds,
            corpus_size: c.corpus_size,
            eps_schedule: c.eps_schedule.clone(),
            gap: c.gap,
        },
    };
    plan.validate()?;
    Ok(plan)
}

fn report_csv(r: &Report) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(CSV_COLUMNS)?;
    for row in &r.rows {
        let p = row.params;
        for (kind, name, value) in row.entries() {
            w.write_record([
                r.task.name(),
                &row.label,
                &p.n.to_string(),
                &p.s.to_string(),
                &p.beta.to_string(),
                &row.seed.to_string(),
                kind,
                name,
                &value,
            ])?;
        }
    }
    Ok(w.into_inner()?)
}

fn plot_csv(r: &Report) -> anyhow::Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["curve", "x", "y"])?;
    for (curve, x, y) in r.curves() {
        w.write_record([curve, x.to_string(), format!("{y:e}")])?;
    }
    Ok(w.into_inner()?)
}

fn render(r: &Report, format: OutputFormat) -> anyhow::Result<Vec<u8>> {
    match format {
        OutputFormat::Json => {
            let mut v = serde_json::to_vec_pretty(r)?;
            v.push(b'\n');
            Ok(v)
        }
        OutputFormat::Csv => report_csv(r),
    }
}

fn emit(bytes: &[u8], out: Option<&Path>) -> anyhow::Result<()> {
    match out {
        Some(p) => std::fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut so = std::io::stdout().lock();
            so.write_all(bytes)?;
            Ok(so.flush()?)
        }
    }
}

fn companion_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "sweep".into());
    out.with_file_name(format!("{stem}.plot.csv"))
}

fn finish(r: &Report, plan: &SweepPlan, out: Option<&Path>) -> Result<u8, Failure> {
    emit(&render(r, plan.format)?, out)?;
    let total: f64 = r.rows.iter().map(|row| row.wall_time).sum();
    let failed = r.rows.iter().filter(|row| !row.passes()).count();
    eprintln!("{}: {} rows, {} failing, {:.2} s", r.task.name(), r.rows.len(), failed, total);
    Ok(r.outcome().exit_code() as u8)
}

fn profile(c: &Common, points: usize, y_max: f64) -> Result<u8, Failure> {
    if c.n.len() != 1 || c.s.len() != 1 || c.beta.len() != 1 {
        return Err(usage(anyhow::anyhow!("profile takes a single (n, s, beta)")));
    }
    if points < 2 {
        return Err(usage(anyhow::anyhow!("at least two grid points are needed")));
    }
    let p = InequalityParams::new(c.n[0], c.s[0], c.beta[0])?;
    let mut rows = Vec::with_capacity(points);
    match c.geometry {
        GeometryArg::Cone => {
            // z = min_i ⟨x, u_i⟩²/|x|² ∈ (0, 1]; ω blows up at z = 0 when β > 2.
            let prof = build_cone_profile(p)?;
            for k in 1..=points {
                let z = k as f64 / points as f64;
                let v = prof.eval_full(z)?;
                rows.push((z, v.w, v.dw));
            }
        }
        GeometryArg::Halfspace => {
            let prof = build_half_profile(p.s, p.beta)?;
            for k in 0..points {
                let y = y_max * k as f64 / (points - 1) as f64;
                let (w, dw) = prof.value_slope(y)?;
                rows.push((y, w, dw));
            }
        }
    }
    let bytes = match c.format {
        FormatArg::Json => {
            let v = serde_json::json!({
                "schema_version": thl_core::report::SCHEMA_VERSION,
                "task": "profile",
                "params": p,
                "x": rows.iter().map(|r| r.0).collect::<Vec<_>>(),
                "omega": rows.iter().map(|r| r.1).collect::<Vec<_>>(),
                "omega_prime": rows.iter().map(|r| r.2).collect::<Vec<_>>(),
            });
            let mut b = serde_json::to_vec_pretty(&v).map_err(anyhow::Error::from)?;
            b.push(b'\n');
            b
        }
        FormatArg::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let run = || -> anyhow::Result<Vec<u8>> {
                w.write_record(["x", "omega", "omega_prime"])?;
                for (x, a, b) in &rows {
                    w.write_record([x.to_string(), format!("{a:e}"), format!("{b:e}")])?;
                }
                Ok(w.into_inner()?)
            };
            run()?
        }
    };
    emit(&bytes, c.out.as_deref())?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Constants(c) => {
            let plan = plan(&c, Task::Constants)?;
            finish(&cmd_constants(&plan)?, &plan, c.out.as_deref())
        }
        Command::Profile { common, points, y_max } => profile(&common, points, y_max),
        Command::Verify(c) => {
            let plan = plan(&c, Task::Verify)?;
            finish(&cmd_sweep(&plan)?, &plan, c.out.as_deref())
        }
        Command::Sharpness(c) => {
            let plan = plan(&c, Task::Sharpness)?;
            finish(&cmd_sweep(&plan)?, &plan, c.out.as_deref())
        }
        Command::Logsob(c) => {
            let plan = plan(&c, Task::Logsob)?;
            finish(&cmd_sweep(&plan)?, &plan, c.out.as_deref())
        }
        Command::Sweep { common, task } => {
            let task = match task {
                TaskArg::Constants => Task::Constants,
                TaskArg::Verify => Task::Verify,
                TaskArg::Sharpness => Task::Sharpness,
                TaskArg::Logsob => Task::Logsob,
            };
            let out = common.out.clone().ok_or_else(|| usage(anyhow::anyhow!("sweep needs --out")))?;
            let plan = plan(&common, task)?;
            let r = cmd_sweep(&plan)?;
            let code = finish(&r, &plan, Some(&out))?;
            let comp = companion_path(&out);
            emit(&plot_csv(&r)?, Some(&comp))?;
            Ok(code)
        }
    }
}

fn main() -> ExitCode {
    if let Some(n) = std::env::var("THL_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // Only fails when a pool already exists.
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {:#}", f.err);
            ExitCode::from(f.code)
        }
    }
}

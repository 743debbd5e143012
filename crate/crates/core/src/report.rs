//! Tables behind the command-line front end: constant sweeps, certificates
//! over seeded corpora, sharpness studies and logarithmic checks.

use crate::constants::{
    clh_r, cls_r, constant_identities, h_cone, k_half, sharp_constant, ConstantKind, InequalityParams,
};
use crate::error::{Error, Result};
use crate::families::{
    cone_certificates, cone_corpus, cone_extremizer, flat_corpus, half_corpus, half_extremizer, lh_extremal,
    ls_extremal, radial_log_quotients, to_halfline_variable, trace_log_checks, whole_line_certificate,
    CutoffSpec, ExtremizerSpec, FamilyTag, LogKind, DEFAULT_TERMS,
};
use crate::integrate::{
    halfspace_certificate, rayleigh_quotient, Certificate, ConeDomain, Geometry, QuadratureSpec,
};
use crate::profiles::{build_cone_profile, build_half_profile};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

/// Version of the JSON layout written by the front end.
pub const SCHEMA_VERSION: u32 = 1;

/// Frozen CSV header: one line per (row, entry), entries grouped as values, errors, flags.
pub const CSV_COLUMNS: [&str; 9] = ["task", "label", "n", "s", "beta", "seed", "kind", "name", "value"];

/// Default relative gap allowed by the sharpness study.
pub const DEFAULT_GAP: f64 = 0.05;

/// Radius of the ball holding the cone corpus, also the D of the remainder series.
pub const CORPUS_RADIUS: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Constants,
    Verify,
    Sharpness,
    Logsob,
}

impl Task {
    pub fn name(&self) -> &'static str {
        match self {
            Task::Constants => "constants",
            Task::Verify => "verify",
            Task::Sharpness => "sharpness",
            Task::Logsob => "logsob",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryKind {
    #[default]
    Cone,
    Halfspace,
}

/// Cone with normals e_n and e_{n+1} in ℝ^{n+1}.
pub fn quarter_space(n: usize) -> ConeDomain {
    let dim = n + 1;
    let e = |k: usize| (0..dim).map(|i| if i == k { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    ConeDomain::new(vec![e(n - 1), e(n)]).expect("coordinate normals")
}

/// Options shared by the tasks other than `constants`.
#[derive(Debug, Clone, PartialEq)]
pub struct TaskOptions {
    pub geometry: GeometryKind,
    /// Cone normals; the quarter-space cone when absent.
    pub cone: Option<ConeDomain>,
    pub kinds: Vec<ConstantKind>,
    pub corpus_size: usize,
    pub eps_schedule: Vec<f64>,
    pub gap: f64,
}

impl Default for TaskOptions {
    fn default() -> Self {
        Self {
            geometry: GeometryKind::Cone,
            cone: None,
            kinds: vec![ConstantKind::HCone, ConstantKind::KHalf],
            corpus_size: 20,
            eps_schedule: vec![1e-1, 1e-2, 1e-3],
            gap: DEFAULT_GAP,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPlan {
    pub n: Vec<usize>,
    pub s: Vec<f64>,
    pub beta: Vec<f64>,
    pub task: Task,
    pub spec: QuadratureSpec,
    pub format: OutputFormat,
    pub options: TaskOptions,
}

impl SweepPlan {
    /// Grid points in n-major, then s, then β order.
    pub fn grid(&self) -> Result<Vec<InequalityParams>> {
        if self.n.is_empty() || self.s.is_empty() || self.beta.is_empty() {
            return Err(Error::Invalid("parameter grid is empty".into()));
        }
        let mut out = Vec::with_capacity(self.n.len() * self.s.len() * self.beta.len());
        for &n in &self.n {
            for &s in &self.s {
                for &beta in &self.beta {
                    out.push(InequalityParams::new(n, s, beta)?);
                }
            }
        }
        Ok(out)
    }

    pub fn validate(&self) -> Result<()> {
        self.spec.validate()?;
        let grid = self.grid()?;
        let o = &self.options;
        match self.task {
            Task::Constants if o.kinds.is_empty() => return Err(Error::Invalid("no constant kinds requested".into())),
            Task::Verify if o.corpus_size == 0 => return Err(Error::Invalid("corpus size must be at least 1".into())),
            Task::Sharpness => check_schedule(&o.eps_schedule)?,
            _ => {}
        }
        if matches!(self.task, Task::Verify | Task::Sharpness) {
            grid.iter().try_for_each(|p| check_geometry(p, o))?;
        }
        Ok(())
    }
}

fn check_geometry(p: &InequalityParams, o: &TaskOptions) -> Result<()> {
    match o.geometry {
        GeometryKind::Cone => {
            p.check_cone()?;
            if let Some(c) = &o.cone {
                if c.dim() != p.n + 1 {
                    return Err(Error::Invalid(format!("cone lives in dimension {}, need {}", c.dim(), p.n + 1)));
                }
            }
            Ok(())
        }
        GeometryKind::Halfspace => p.check_half(),
    }
}

/// Nonempty, strictly decreasing and inside (0, 1/4).
pub fn check_schedule(eps: &[f64]) -> Result<()> {
    if eps.is_empty() {
        return Err(Error::Invalid("empty eps schedule".into()));
    }
    if let Some(e) = eps.iter().find(|&&e| !(e > 0.0 && e < 0.25)) {
        return Err(Error::Range(format!("eps must lie in (0, 1/4), got {e}")));
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::Invalid("eps schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// One line of output: named values with their error estimates and pass/fail flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReportRow {
    pub label: String,
    pub params: InequalityParams,
    pub values: BTreeMap<String, f64>,
    pub errors: BTreeMap<String, f64>,
    pub flags: BTreeMap<String, bool>,
    pub seed: u64,
    pub version: String,
    /// Seconds spent on the row; kept out of serialized output.
    #[serde(skip)]
    pub wall_time: f64,
}

/// Equality ignores the wall time.
impl PartialEq for ReportRow {
    fn eq(&self, o: &Self) -> bool {
        (&self.label, &self.params, &self.values, &self.errors, &self.flags, self.seed, &self.version)
            == (&o.label, &o.params, &o.values, &o.errors, &o.flags, o.seed, &o.version)
    }
}

impl ReportRow {
    pub fn new(label: impl Into<String>, params: InequalityParams, seed: u64) -> Self {
        Self {
            label: label.into(),
            params,
            values: BTreeMap::new(),
            errors: BTreeMap::new(),
            flags: BTreeMap::new(),
            seed,
            version: env!("CARGO_PKG_VERSION").into(),
            wall_time: 0.0,
        }
    }

    pub fn value(&mut self, name: &str, v: f64) -> &mut Self {
        self.values.insert(name.into(), v);
        self
    }

    pub fn error(&mut self, name: &str, e: f64) -> &mut Self {
        self.errors.insert(name.into(), e);
        self
    }

    pub fn flag(&mut self, name: &str, f: bool) -> &mut Self {
        self.flags.insert(name.into(), f);
        self
    }

    pub fn passes(&self) -> bool {
        self.flags.values().all(|&f| f)
    }

    /// (kind, name, value) triples in CSV order.
    pub fn entries(&self) -> Vec<(&'static str, &str, String)> {
        let mut out = Vec::new();
        for (k, v) in &self.values {
            out.push(("value", k.as_str(), format!("{v:e}")));
        }
        for (k, v) in &self.errors {
            out.push(("error", k.as_str(), format!("{v:e}")));
        }
        for (k, v) in &self.flags {
            out.push(("flag", k.as_str(), if *v { "1".into() } else { "0".into() }));
        }
        out
    }
}

/// Outcome classes that map to distinct exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Ok,
    IdentityViolation,
    CertificateFailure,
    GapExceeded,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            Outcome::Ok => 0,
            Outcome::IdentityViolation => 3,
            Outcome::CertificateFailure => 4,
            Outcome::GapExceeded => 5,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub task: Task,
    pub rows: Vec<ReportRow>,
}

impl Report {
    pub fn new(task: Task, rows: Vec<ReportRow>) -> Self {
        Self { schema_version: SCHEMA_VERSION, task, rows }
    }

    pub fn outcome(&self) -> Outcome {
        if self.rows.iter().all(ReportRow::passes) {
            return Outcome::Ok;
        }
        match self.task {
            Task::Constants => Outcome::IdentityViolation,
            Task::Sharpness => Outcome::GapExceeded,
            Task::Verify | Task::Logsob => Outcome::CertificateFailure,
        }
    }

    /// Curves (name, x, y) for plotting.
    pub fn curves(&self) -> Vec<(String, f64, f64)> {
        let mut out = Vec::new();
        for r in &self.rows {
            let p = r.params;
            match self.task {
                Task::Constants | Task::Logsob => {
                    for (k, v) in &r.values {
                        out.push((format!("{k}@n={},s={}", p.n, p.s), p.beta, *v));
                    }
                }
                Task::Sharpness => {
                    if let (Some(e), Some(q)) = (r.values.get("eps"), r.values.get("quotient")) {
                        out.push((format!("quotient@n={},s={},beta={}", p.n, p.s, p.beta), -e.log10(), *q));
                    }
                }
                Task::Verify => {
                    if let Some(m) = r.values.iter().find(|(k, _)| k.ends_with("_margin")) {
                        out.push((format!("{}@n={},s={},beta={}", m.0, p.n, p.s, p.beta), out.len() as f64, *m.1));
                    }
                }
            }
        }
        out
    }
}

fn timed(mut f: impl FnMut() -> Result<Vec<ReportRow>>) -> Result<Vec<ReportRow>> {
    let start = Instant::now();
    let mut rows = f()?;
    let per = start.elapsed().as_secs_f64() / rows.len().max(1) as f64;
    for r in &mut rows {
        r.wall_time = per;
    }
    Ok(rows)
}

/// Requested constants at every grid point, with the identity suite of that point.
pub fn cmd_constants(plan: &SweepPlan) -> Result<Report> {
    plan.validate()?;
    let kinds = &plan.options.kinds;
    let grid = plan.grid()?;
    let rows = grid
        .par_iter()
        .map(|p| timed(|| Ok(vec![constants_row(p, kinds, plan.spec.seed)?])))
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(Task::Constants, rows.into_iter().flatten().collect()))
}

fn constants_row(p: &InequalityParams, kinds: &[ConstantKind], seed: u64) -> Result<ReportRow> {
    let mut row = ReportRow::new("point", *p, seed);
    for k in kinds {
        // Constants undefined at this point are marked rather than counted as violations.
        match sharp_constant(*k, *p, None) {
            Ok(v) => row.value(k.name(), v),
            Err(_) => row.value(&format!("{}_undefined", k.name()), 1.0),
        };
    }
    let ids = constant_identities(&[*p])?;
    row.value("identity_max_deviation", ids.max_deviation());
    row.flag("identities", ids.pass());
    Ok(row)
}

fn record(row: &mut ReportRow, c: &Certificate) {
    let tag = &c.inequality_tag;
    row.value(&format!("{tag}_margin"), c.margin);
    row.value(&format!("{tag}_lhs"), c.lhs);
    row.error(&format!("{tag}_margin"), c.error_estimate);
    row.flag(tag, c.passes());
}

/// Certificates over a seeded corpus, one row per field and a summary row.
pub fn cmd_verify(params: &InequalityParams, opts: &TaskOptions, spec: &QuadratureSpec) -> Result<Report> {
    if opts.corpus_size == 0 {
        return Err(Error::Invalid("corpus size must be at least 1".into()));
    }
    spec.validate()?;
    check_geometry(params, opts)?;
    let seed = spec.seed;
    let p = *params;
    let certs: Vec<Vec<Certificate>> = match opts.geometry {
        GeometryKind::Cone => {
            let cone = opts.cone.clone().unwrap_or_else(|| quarter_space(p.n));
            cone_corpus(&cone, opts.corpus_size, seed, CORPUS_RADIUS)
                .par_iter()
                .map(|u| {
                    let (a, b) = cone_certificates(u, &cone, &p, CORPUS_RADIUS, DEFAULT_TERMS, spec)?;
                    Ok(vec![a, b])
                })
                .collect::<Result<_>>()?
        }
        GeometryKind::Halfspace => {
            let whole = p.s == 0.0 && p.beta == 1.0;
            let half = half_corpus(p.n, opts.corpus_size, seed, whole);
            let flat = flat_corpus(p.n, opts.corpus_size, seed);
            half.par_iter()
                .zip(flat.par_iter())
                .map(|(u, v)| {
                    let mut c = vec![halfspace_certificate(u, &p, spec)?];
                    if whole {
                        c.push(whole_line_certificate(u, spec)?);
                    }
                    c.push(trace_log_checks(v, p.n, p.s, LogKind::Ls, spec)?);
                    c.push(trace_log_checks(v, p.n, p.s, LogKind::Lh, spec)?);
                    Ok(c)
                })
                .collect::<Result<_>>()?
        }
    };
    let mut rows: Vec<ReportRow> = certs
        .iter()
        .enumerate()
        .map(|(i, cs)| {
            let mut row = ReportRow::new(format!("field_{i}"), p, seed);
            for c in cs {
                record(&mut row, c);
            }
            row
        })
        .collect();
    let mut summary = ReportRow::new("summary", p, seed);
    for c in &certs[0] {
        let tag = &c.inequality_tag;
        let all: Vec<&Certificate> = certs.iter().flatten().filter(|d| &d.inequality_tag == tag).collect();
        summary.value(&format!("{tag}_min_margin"), all.iter().map(|d| d.margin).fold(f64::INFINITY, f64::min));
        summary.value(&format!("{tag}_count"), all.len() as f64);
        summary.flag(tag, all.iter().all(|d| d.passes()));
    }
    rows.push(summary);
    Ok(Report::new(Task::Verify, rows))
}

/// q∞ of q = q∞ + A/(L + b) through the last three points, L = −ln ε; two-point
/// fit with b = 0 when only two are available.
pub fn extrapolate(eps: &[f64], q: &[f64]) -> Option<f64> {
    let m = eps.len().min(q.len());
    let l: Vec<f64> = eps[..m].iter().map(|e| -e.ln()).collect();
    match m {
        0 | 1 => None,
        2 => {
            let (l1, l2) = (l[0], l[1]);
            Some((q[1] * l2 - q[0] * l1) / (l2 - l1))
        }
        _ => {
            let (l1, l2, l3) = (l[m - 3], l[m - 2], l[m - 1]);
            let (q1, q2, q3) = (q[m - 3], q[m - 2], q[m - 1]);
            let r = (q1 - q2) / (q2 - q3);
            let den = r * (l3 - l2) - (l2 - l1);
            if !r.is_finite() || den == 0.0 {
                return None;
            }
            let b = ((l2 - l1) * l3 - r * (l3 - l2) * l1) / den;
            let a = (q1 - q2) / (1.0 / (l1 + b) - 1.0 / (l2 + b));
            let v = q3 - a / (l3 + b);
            v.is_finite().then_some(v)
        }
    }
}

/// Exponent shift of the critical family at ε: (−ln ε)^{−1/2}.
pub fn critical_delta(eps: f64) -> f64 {
    (-eps.ln()).powf(-0.5)
}

/// Rayleigh quotient of the extremizer family at each ε of the schedule.
pub fn sharpness_quotients(
    params: &InequalityParams,
    opts: &TaskOptions,
    spec: &QuadratureSpec,
) -> Result<(f64, Vec<f64>)> {
    check_schedule(&opts.eps_schedule)?;
    check_geometry(params, opts)?;
    let p = *params;
    match opts.geometry {
        GeometryKind::Cone => {
            let cone = opts.cone.clone().unwrap_or_else(|| quarter_space(p.n));
            let prof = build_cone_profile(p)?;
            let geo = Geometry::Cone(cone.clone());
            let q = opts
                .eps_schedule
                .par_iter()
                .map(|&e| {
                    let u = cone_extremizer(&prof, &cone, e, CutoffSpec::default())?;
                    rayleigh_quotient(&u, &geo, &p, spec)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((h_cone(p.n, p.s, p.beta)?, q))
        }
        GeometryKind::Halfspace => {
            build_half_profile(p.s, p.beta)?;
            let q = opts
                .eps_schedule
                .par_iter()
                .map(|&e| {
                    let (tag, delta) =
                        if p.beta == 1.0 { (FamilyTag::HalfCritical, critical_delta(e)) } else { (FamilyTag::HalfGeneric, 0.0) };
                    let u = half_extremizer(&ExtremizerSpec { tag, params: p, eps: e, delta }, CutoffSpec::default())?;
                    rayleigh_quotient(&u, &Geometry::HalfSpace, &p, spec)
                })
                .collect::<Result<Vec<_>>>()?;
            Ok((k_half(p.s, p.beta)?, q))
        }
    }
}

/// Quotient per ε, the extrapolated limit and the gap to the sharp constant.
pub fn cmd_sharpness(params: &InequalityParams, opts: &TaskOptions, spec: &QuadratureSpec) -> Result<Report> {
    spec.validate()?;
    let (sharp, q) = sharpness_quotients(params, opts, spec)?;
    let seed = spec.seed;
    let mut rows: Vec<ReportRow> = opts
        .eps_schedule
        .iter()
        .zip(&q)
        .map(|(&e, &qe)| {
            let mut row = ReportRow::new(format!("eps_{e:e}"), *params, seed);
            row.value("eps", e).value("quotient", qe).value("relative_gap", (qe - sharp) / sharp);
            if params.beta == 1.0 && opts.geometry == GeometryKind::Halfspace {
                row.value("delta", critical_delta(e));
            }
            row
        })
        .collect();
    let last = *q.last().expect("nonempty schedule");
    let gap = (last - sharp) / sharp;
    let mut summary = ReportRow::new("summary", *params, seed);
    summary.value("sharp_constant", sharp).value("final_quotient", last).value("relative_gap", gap);
    if let Some(x) = extrapolate(&opts.eps_schedule, &q) {
        summary.value("extrapolated", x).value("extrapolated_gap", (x - sharp) / sharp);
    }
    summary.flag("decreasing", q.windows(2).all(|w| w[1] < w[0]));
    summary.flag("within_gap", gap.abs() <= opts.gap);
    rows.push(summary);
    Ok(Report::new(Task::Sharpness, rows))
}

/// Radial constants, extremal quotients and trace-log certificates on a flat corpus.
pub fn cmd_logsob(params: &InequalityParams, opts: &TaskOptions, spec: &QuadratureSpec) -> Result<Report> {
    spec.validate()?;
    let (n, s) = (params.n, params.s);
    let mut row = ReportRow::new("constants", *params, spec.seed);
    let (ls, lh) = (cls_r(n, s)?, clh_r(n, s)?);
    row.value("cls_r", ls).value("clh_r", lh);
    let qls = radial_log_quotients(&to_halfline_variable(&ls_extremal(n, s, 1.0)?, n, s)?, n, s, LogKind::Ls, spec)?;
    let qlh = radial_log_quotients(&to_halfline_variable(&lh_extremal(n, s, 1.0)?, n, s)?, n, s, LogKind::Lh, spec)?;
    row.value("ls_extremal_quotient", qls).value("lh_extremal_quotient", qlh);
    row.flag("ls_reproduced", ((qls - ls) / ls).abs() <= 1e-6);
    row.flag("lh_reproduced", ((qlh - lh) / lh).abs() <= 1e-6);
    let mut rows = vec![row];
    if opts.corpus_size > 0 {
        let corpus = flat_corpus(n, opts.corpus_size, spec.seed);
        let certs = corpus
            .par_iter()
            .map(|u| Ok([trace_log_checks(u, n, s, LogKind::Ls, spec)?, trace_log_checks(u, n, s, LogKind::Lh, spec)?]))
            .collect::<Result<Vec<_>>>()?;
        for (i, cs) in certs.iter().enumerate() {
            let mut r = ReportRow::new(format!("field_{i}"), *params, spec.seed);
            for c in cs {
                record(&mut r, c);
            }
            rows.push(r);
        }
    }
    Ok(Report::new(Task::Logsob, rows))
}

/// Runs the plan's task over its grid; rows come back in grid order.
pub fn cmd_sweep(plan: &SweepPlan) -> Result<Report> {
    plan.validate()?;
    if plan.task == Task::Constants {
        return cmd_constants(plan);
    }
    let grid = plan.grid()?;
    let parts = grid
        .par_iter()
        .map(|p| {
            timed(|| {
                let r = match plan.task {
                    Task::Verify => cmd_verify(p, &plan.options, &plan.spec)?,
                    Task::Sharpness => cmd_sharpness(p, &plan.options, &plan.spec)?,
                    Task::Logsob => cmd_logsob(p, &plan.options, &plan.spec)?,
                    Task::Constants => unreachable!(),
                };
                Ok(r.rows)
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Report::new(plan.task, parts.into_iter().flatten().collect()))
}

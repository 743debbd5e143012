use super::field::{FieldHints, TestField};
use super::geometry::{dot, norm, ConeDomain};
use super::quad::{graded_edges, QuadratureSpec, Rule};
use crate::constants::{omega_ns, omega_sphere, InequalityParams};
use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

const PSI_LEVELS: u32 = 3;
const CHI_LEVELS: u32 = 4;
const ORIGIN_LEVELS: u32 = 6;
const MAX_PANEL_RATIO: f64 = 4.0;
const WIDTH_PANELS: f64 = 16.0;
const CIRCLE_PANELS: usize = 8;
const STRATA: usize = 16;

/// Integral value with an error estimate (one standard error for Monte Carlo).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Method {
    Tensor,
    MonteCarlo,
}

/// Energy, Hardy and trace integrals of one field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Functionals {
    pub energy: Estimate,
    pub hardy: Estimate,
    pub trace: Estimate,
    /// ∫ W(|x|) u²/|x|² d^s when a radial weight W was requested.
    pub remainder: Option<Estimate>,
    pub method: Method,
}

impl Functionals {
    /// Factor applied to error estimates when they gate a pass/fail decision.
    pub fn confidence(&self) -> f64 {
        match self.method {
            Method::Tensor => 1.0,
            Method::MonteCarlo => 3.0,
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum MethodChoice {
    #[default]
    Auto,
    Tensor,
    MonteCarlo,
}

#[derive(Clone, Copy, Default)]
pub struct FunctionalOptions<'a> {
    pub method: MethodChoice,
    pub remainder_weight: Option<&'a (dyn Fn(f64) -> f64 + Sync)>,
    /// Stream selector for the Monte Carlo generator.
    pub tag: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HalfMode {
    /// Weight t^s, Hardy term in x_n, trace weight x_n^{s−1}.
    XnWeight,
    /// The cone inequality on {t > 0}.
    TWeight,
}

/// Where a Rayleigh quotient is taken.
#[derive(Debug, Clone, PartialEq)]
pub enum Geometry {
    Cone(ConeDomain),
    HalfSpace,
}

/// Paired Kronrod and Gauss sums.
#[derive(Debug, Clone, Copy)]
struct Sums<const K: usize> {
    k: [f64; K],
    g: [f64; K],
}

impl<const K: usize> Default for Sums<K> {
    fn default() -> Self {
        Self { k: [0.0; K], g: [0.0; K] }
    }
}

impl<const K: usize> Sums<K> {
    fn add(&mut self, o: &Self) {
        for j in 0..K {
            self.k[j] += o.k[j];
            self.g[j] += o.g[j];
        }
    }

    fn estimate(&self, j: usize, spec: &QuadratureSpec) -> Estimate {
        let v = self.k[j];
        let e = (v - self.g[j]).abs();
        let scaled = if v != 0.0 { e * (200.0 * e / v.abs()).powf(1.5).min(1.0) } else { e };
        Estimate { value: v, error: scaled.max(50.0 * f64::EPSILON * v.abs()).max(spec.abs_tol.min(e)) }
    }
}

/// Orthonormal basis of u^⊥.
fn orth_basis(u: &[f64]) -> Vec<Vec<f64>> {
    let n = u.len();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| u[a].abs().partial_cmp(&u[b].abs()).unwrap());
    for &k in &order {
        if basis.len() == n - 1 {
            break;
        }
        let mut v = vec![0.0; n];
        v[k] = 1.0;
        for w in std::iter::once(u).chain(basis.iter().map(|b| b.as_slice())) {
            let c = dot(&v, w);
            for (a, b) in v.iter_mut().zip(w) {
                *a -= c * b;
            }
        }
        let l = norm(&v);
        if l > 1e-8 {
            basis.push(v.into_iter().map(|x| x / l).collect());
        }
    }
    basis
}

/// Facet i with the constraints ⟨e, u_j⟩ > 0 and the Voronoi data b_j = 1 − ⟨u_i, u_j⟩.
struct Facet {
    u: Vec<f64>,
    basis: Vec<Vec<f64>>,
    others: Vec<(Vec<f64>, f64)>,
}

impl Facet {
    fn new(cone: &ConeDomain, i: usize) -> Self {
        let u = cone.normals()[i].clone();
        let others = cone
            .normals()
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, w)| (w.clone(), 1.0 - dot(&u, w)))
            .filter(|&(_, b)| b > 1e-14)
            .collect();
        Self { basis: orth_basis(&u), u, others }
    }

    /// Largest χ with facet i nearest along cos χ e + sin χ u_i; None when e leaves the face.
    fn chi_max(&self, e: &[f64]) -> Option<f64> {
        let mut m = 0.5 * PI;
        for (w, b) in &self.others {
            let p = dot(e, w);
            if p <= 0.0 {
                return None;
            }
            m = m.min((p / b).atan());
        }
        Some(m)
    }

    fn direction(&self, psi: f64) -> Vec<f64> {
        let (s, c) = psi.sin_cos();
        self.basis[0].iter().zip(&self.basis[1]).map(|(a, b)| c * a + s * b).collect()
    }

    /// Angular interval of face directions (N = 3) with breakpoints where the nearest
    /// competing facet changes; None when the face is empty.
    fn arc(&self) -> Option<(Vec<f64>, bool)> {
        let coords: Vec<(f64, f64, f64)> = self
            .others
            .iter()
            .map(|(w, b)| (dot(&self.basis[0], w), dot(&self.basis[1], w), *b))
            .collect();
        let live: Vec<&(f64, f64, f64)> = coords.iter().filter(|c| c.0.hypot(c.1) > 1e-14).collect();
        if live.is_empty() {
            return Some((vec![0.0, 2.0 * PI], true));
        }
        let phi0 = live[0].1.atan2(live[0].0);
        let (mut lo, mut hi) = (phi0 - 0.5 * PI, phi0 + 0.5 * PI);
        for c in &live[1..] {
            let mid = 0.5 * (lo + hi);
            let mut phi = c.1.atan2(c.0);
            phi += 2.0 * PI * ((mid - phi) / (2.0 * PI)).round();
            lo = lo.max(phi - 0.5 * PI);
            hi = hi.min(phi + 0.5 * PI);
        }
        if hi - lo <= 1e-12 {
            return None;
        }
        let mut pts = vec![lo, hi];
        for (j, a) in live.iter().enumerate() {
            for b in &live[j + 1..] {
                let ca = a.0 / a.2 - b.0 / b.2;
                let cb = a.1 / a.2 - b.1 / b.2;
                if ca.hypot(cb) < 1e-14 {
                    continue;
                }
                let root = (-ca).atan2(cb);
                for k in -3..=3 {
                    let p = root + k as f64 * PI;
                    if p > lo + 1e-12 && p < hi - 1e-12 {
                        pts.push(p);
                    }
                }
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        Some((pts, false))
    }
}

/// ψ-rule over an arc, graded toward its two ends.
fn arc_rule(pts: &[f64], full: bool, end_exp: f64) -> Rule {
    let mut rule = Rule::default();
    if full {
        let edges: Vec<f64> = (0..=CIRCLE_PANELS).map(|k| pts[0] + (pts[1] - pts[0]) * k as f64 / CIRCLE_PANELS as f64).collect();
        return Rule::on_edges(&edges);
    }
    let last = pts.len() - 2;
    for (j, w) in pts.windows(2).enumerate() {
        let (a, b) = (w[0], w[1]);
        match (j == 0, j == last) {
            (true, true) => {
                let m = 0.5 * (a + b);
                rule.extend(Rule::graded(a, m, &[], PSI_LEVELS, 0.25, end_exp));
                rule.extend(Rule::graded_right(m, b, &[], PSI_LEVELS, 0.25, end_exp));
            }
            (true, false) => rule.extend(Rule::graded(a, b, &[], PSI_LEVELS, 0.25, end_exp)),
            (false, true) => rule.extend(Rule::graded_right(a, b, &[], PSI_LEVELS, 0.25, end_exp)),
            (false, false) => rule.extend(Rule::on_edges(&[a, 0.5 * (a + b), b])),
        }
    }
    rule
}

/// Splits every panel whose end ratio exceeds the cap, then every panel wider than `width`.
fn log_refine(edges: &[f64], cap: f64, width: f64) -> Vec<f64> {
    let mut out = vec![edges[0]];
    for w in edges.windows(2) {
        let (a, b) = (w[0], w[1]);
        let mut pts = vec![a];
        if a > 0.0 && b / a > cap {
            let k = ((b / a).ln() / cap.ln()).ceil() as i32;
            for j in 1..k {
                pts.push(a * (b / a).powf(j as f64 / k as f64));
            }
        }
        pts.push(b);
        for p in pts.windows(2) {
            let k = ((p[1] - p[0]) / width).ceil().max(1.0) as usize;
            for j in 1..=k {
                out.push(p[0] + (p[1] - p[0]) * j as f64 / k as f64);
            }
        }
    }
    out
}

fn sorted_breaks(breaks: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let mut b: Vec<f64> = breaks.iter().copied().filter(|&x| x > lo && x < hi).collect();
    b.sort_by(|x, y| x.partial_cmp(y).unwrap());
    b.dedup();
    b
}

/// Rule on [a, b] for a coordinate with a possible singularity (x−a)^e at a when a = 0.
fn positive_axis_rule(lo: f64, hi: f64, breaks: &[f64], e: f64) -> Rule {
    let b = sorted_breaks(breaks, lo, hi);
    let width = hi / WIDTH_PANELS;
    if lo > 0.0 {
        let mut edges = vec![lo];
        edges.extend(b);
        edges.push(hi);
        return Rule::on_edges(&log_refine(&edges, MAX_PANEL_RATIO, width));
    }
    let e = if e > -1.0 { e } else { 0.0 };
    let edges = log_refine(&graded_edges(0.0, hi, &b, ORIGIN_LEVELS, 1.0 / MAX_PANEL_RATIO), f64::INFINITY, width);
    let mut r = Rule::default();
    r.push_power_panel(edges[0], edges[1], e);
    r.extend(Rule::on_edges(&edges[1..]));
    r
}

fn radial_rule(h: &FieldHints, radius: f64, e: f64) -> Rule {
    positive_axis_rule(h.inner_radius.max(0.0), radius, &h.radial_breaks, e)
}

fn sphere_area(k: usize) -> f64 {
    omega_sphere(k + 1).expect("positive sphere dimension")
}

fn check_dims<F: TestField + ?Sized>(u: &F, n: usize) -> Result<()> {
    if u.dim() != n {
        return Err(Error::Invalid(format!("field dimension {} does not match domain dimension {n}", u.dim())));
    }
    Ok(())
}

fn finite_radius<F: TestField + ?Sized>(u: &F) -> Result<f64> {
    let r = u.support_radius();
    if !(r.is_finite() && r > 0.0) {
        return Err(Error::Invalid(format!("support radius must be positive and finite, got {r}")));
    }
    Ok(r)
}

/// ∫_C |∇u|² d_C^s, ∫_C u²/|x|² d_C^s and Σ_i ∫_{face i} u²/|x|^{1−s}.
pub fn cone_functionals<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    spec: &QuadratureSpec,
) -> Result<Functionals> {
    cone_functionals_with(u, cone, params.s, spec, &FunctionalOptions::default())
}

pub fn cone_functionals_with<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    s: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    spec.validate()?;
    check_dims(u, cone.dim())?;
    let n = cone.dim();
    let tensor = match opts.method {
        MethodChoice::Auto => n <= 3,
        MethodChoice::Tensor => {
            if n > 3 {
                return Err(Error::UnsupportedDimension(n));
            }
            true
        }
        MethodChoice::MonteCarlo => false,
    };
    if tensor {
        cone_tensor(u, cone, s, spec, opts)
    } else {
        cone_monte_carlo(u, cone, s, spec, opts)
    }
}

/// Angular node θ = cos χ e + sin χ u_i with its weights, including cos^{N−2}χ sin^s χ.
struct AngularNode {
    theta: Vec<f64>,
    wk: f64,
    wg: f64,
}

fn cone_tensor<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    s: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    let n = cone.dim();
    let nf = n as f64;
    let radius = finite_radius(u)?;
    let hints = u.hints();
    let rrule = radial_rule(&hints, radius, nf - 3.0 + s);
    let chi_exp = -s.abs();
    let chi_rule = Rule::graded(0.0, 1.0, &[], CHI_LEVELS, 0.25, chi_exp);
    let psi_exp = 1.0 - s.abs();

    let mut interior: Vec<AngularNode> = Vec::new();
    let mut face: Vec<AngularNode> = Vec::new();
    for i in 0..cone.normals().len() {
        let f = Facet::new(cone, i);
        let dirs: Vec<(Vec<f64>, f64, f64)> = if n == 2 {
            [1.0, -1.0].iter().map(|&sg| (f.basis[0].iter().map(|v| sg * v).collect(), 1.0, 1.0)).collect()
        } else {
            let Some((pts, full)) = f.arc() else { continue };
            let pr = arc_rule(&pts, full, psi_exp);
            (0..pr.len()).map(|j| (f.direction(pr.x[j]), pr.wk[j], pr.wg[j])).collect()
        };
        for (e, wk, wg) in dirs {
            let Some(cm) = f.chi_max(&e) else { continue };
            face.push(AngularNode { theta: e.clone(), wk, wg });
            for j in 0..chi_rule.len() {
                let chi = cm * chi_rule.x[j];
                let (sc, cc) = chi.sin_cos();
                let w = cm * cc.powi(n as i32 - 2) * sc.powf(s);
                let theta = e.iter().zip(&f.u).map(|(a, b)| cc * a + sc * b).collect();
                interior.push(AngularNode { theta, wk: wk * chi_rule.wk[j] * w, wg: wg * chi_rule.wg[j] * w });
            }
        }
    }

    let pe: Vec<f64> = rrule.x.iter().map(|r| r.powf(nf - 1.0 + s)).collect();
    let ph: Vec<f64> = rrule.x.iter().map(|r| r.powf(nf - 3.0 + s)).collect();
    let rw: Vec<f64> = match opts.remainder_weight {
        Some(w) => rrule.x.iter().map(|&r| w(r)).collect(),
        None => vec![0.0; rrule.len()],
    };
    let origin = vec![0.0; n];
    let parts: Vec<Sums<3>> = interior
        .par_iter()
        .map(|node| {
            let vals = u.along(&origin, &node.theta, &rrule.x);
            let mut acc = Sums::<3>::default();
            for (j, &(v, g2)) in vals.iter().enumerate() {
                let h = v * v * ph[j];
                let terms = [g2 * pe[j], h, h * rw[j]];
                for (t, term) in terms.iter().enumerate() {
                    acc.k[t] += node.wk * rrule.wk[j] * term;
                    acc.g[t] += node.wg * rrule.wg[j] * term;
                }
            }
            acc
        })
        .collect();
    let mut tot = Sums::<3>::default();
    parts.iter().for_each(|p| tot.add(p));
    let tparts: Vec<Sums<1>> = face
        .par_iter()
        .map(|node| {
            let vals = u.along(&origin, &node.theta, &rrule.x);
            let mut acc = Sums::<1>::default();
            for (j, &(v, _)) in vals.iter().enumerate() {
                let term = v * v * ph[j];
                acc.k[0] += node.wk * rrule.wk[j] * term;
                acc.g[0] += node.wg * rrule.wg[j] * term;
            }
            acc
        })
        .collect();
    let mut ttot = Sums::<1>::default();
    tparts.iter().for_each(|p| ttot.add(p));
    let out = Functionals {
        energy: tot.estimate(0, spec),
        hardy: tot.estimate(1, spec),
        trace: ttot.estimate(0, spec),
        remainder: opts.remainder_weight.map(|_| tot.estimate(2, spec)),
        method: Method::Tensor,
    };
    finite_or_fail(out)
}

fn finite_or_fail(f: Functionals) -> Result<Functionals> {
    let all = [f.energy, f.hardy, f.trace].into_iter().chain(f.remainder);
    for e in all {
        if !e.value.is_finite() {
            return Err(Error::DepthExhausted { value: e.value, error: f64::INFINITY });
        }
    }
    Ok(f)
}

/// Running mean and variance per stratum.
#[derive(Clone)]
struct Strata {
    sum: Vec<Vec<f64>>,
    sq: Vec<Vec<f64>>,
    count: Vec<usize>,
}

impl Strata {
    fn new(k: usize, terms: usize) -> Self {
        Self { sum: vec![vec![0.0; terms]; k], sq: vec![vec![0.0; terms]; k], count: vec![0; k] }
    }

    fn push(&mut self, stratum: usize, vals: &[f64]) {
        self.count[stratum] += 1;
        for (t, v) in vals.iter().enumerate() {
            self.sum[stratum][t] += v;
            self.sq[stratum][t] += v * v;
        }
    }

    /// Stratified mean with equal stratum probabilities, and its standard error.
    fn estimate(&self, t: usize) -> Estimate {
        let k = self.count.len() as f64;
        let mut mean = 0.0;
        let mut var = 0.0;
        for j in 0..self.count.len() {
            let c = self.count[j] as f64;
            if c < 2.0 {
                continue;
            }
            let m = self.sum[j][t] / c;
            let v = (self.sq[j][t] / c - m * m).max(0.0) * c / (c - 1.0);
            mean += m / k;
            var += v / (k * k * c);
        }
        Estimate { value: mean, error: var.sqrt() }
    }
}

/// r in [lo, hi] from a stratified uniform variate, with dr-weight; power law at 0, log-uniform otherwise.
fn radial_sample(v: f64, lo: f64, hi: f64, e: f64) -> (f64, f64) {
    if lo > 0.0 {
        let l = (hi / lo).ln();
        let r = lo * (v * l).exp();
        (r, r * l)
    } else {
        let p = 1.0 / (1.0 + e.max(-0.9));
        let r = hi * v.powf(p);
        (r, hi * p * v.powf(p - 1.0))
    }
}

fn unit_gaussian(rng: &mut ChaCha8Rng, k: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..k).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let l = norm(&v);
        if l > 1e-12 {
            return v.into_iter().map(|x| x / l).collect();
        }
    }
}

fn cone_monte_carlo<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    s: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    let n = cone.dim();
    let nf = n as f64;
    let radius = finite_radius(u)?;
    let hints = u.hints();
    let r_in = hints.inner_radius.max(0.0);
    let m = cone.normals().len();
    let per_facet = (spec.mc_samples / m).max(STRATA * 2);
    let area = sphere_area(n - 2);
    let chi_exp = -s.abs();
    let q = 1.0 / (1.0 + chi_exp);
    let origin = vec![0.0; n];
    let mut inner = Strata::new(STRATA, 3);
    let mut faces = Strata::new(STRATA, 1);
    for i in 0..m {
        let f = Facet::new(cone, i);
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(opts.tag.wrapping_mul(1 << 16).wrapping_add(i as u64));
        for k in 0..per_facet {
            let st = k % STRATA;
            let c = unit_gaussian(&mut rng, n - 1);
            let e: Vec<f64> = (0..n).map(|a| (0..n - 1).map(|b| c[b] * f.basis[b][a]).sum()).collect();
            let v = (st as f64 + rng.gen::<f64>()) / STRATA as f64;
            let (r, wr) = radial_sample(v, r_in, radius, nf - 3.0 + s);
            let vr = (st as f64 + rng.gen::<f64>()) / STRATA as f64;
            let (rt, wrt) = radial_sample(vr, r_in, radius, nf - 3.0 + s);
            let tau: f64 = 1.0 - rng.gen::<f64>();
            let Some(cm) = f.chi_max(&e) else {
                inner.push(st, &[0.0; 3]);
                faces.push(st, &[0.0]);
                continue;
            };
            let tval = u.along(&origin, &e, &[rt])[0].0;
            faces.push(st, &[area * wrt * tval * tval * rt.powf(nf - 3.0 + s)]);
            let chi = cm * tau.powf(q);
            let wchi = cm * q * tau.powf(q - 1.0);
            let (sc, cc) = chi.sin_cos();
            let theta: Vec<f64> = e.iter().zip(&f.u).map(|(a, b)| cc * a + sc * b).collect();
            let (val, g2) = u.along(&origin, &theta, &[r])[0];
            let w = area * wchi * cc.powi(n as i32 - 2) * sc.powf(s) * wr;
            let h = w * val * val * r.powf(nf - 3.0 + s);
            let rem = opts.remainder_weight.map_or(0.0, |wf| wf(r));
            inner.push(st, &[w * g2 * r.powf(nf - 1.0 + s), h, h * rem]);
        }
    }
    let scale = |e: Estimate| Estimate { value: e.value * m as f64, error: e.error * m as f64 };
    // Each facet contributes per_facet samples to one pooled mean, so rescale by m.
    let out = Functionals {
        energy: scale(inner.estimate(0)),
        hardy: scale(inner.estimate(1)),
        trace: scale(faces.estimate(0)),
        remainder: opts.remainder_weight.map(|_| scale(inner.estimate(2))),
        method: Method::MonteCarlo,
    };
    finite_or_fail(out)
}

/// Half-space integrals. Points are (x_1, …, x_n, t) with t last.
pub fn halfspace_functionals<F: TestField + ?Sized>(
    u: &F,
    s: f64,
    mode: HalfMode,
    spec: &QuadratureSpec,
) -> Result<Functionals> {
    halfspace_functionals_with(u, s, mode, spec, &FunctionalOptions::default())
}

pub fn halfspace_functionals_with<F: TestField + ?Sized>(
    u: &F,
    s: f64,
    mode: HalfMode,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    spec.validate()?;
    let dim = u.dim();
    if dim < 3 {
        return Err(Error::Invalid(format!("half-space fields live on ℝ^n × ℝ₊ with n ≥ 2, got dimension {dim}")));
    }
    match mode {
        HalfMode::TWeight => {
            let cone = ConeDomain::half_space(dim);
            let mut f = cone_functionals_with(u, &cone, s, spec, opts)?;
            f.trace = flat_trace(u, s, spec, opts)?;
            Ok(f)
        }
        HalfMode::XnWeight => {
            check_xn_support(u)?;
            let tensor = match opts.method {
                MethodChoice::Auto => dim == 3,
                MethodChoice::Tensor => {
                    if dim != 3 {
                        return Err(Error::UnsupportedDimension(dim));
                    }
                    true
                }
                MethodChoice::MonteCarlo => false,
            };
            if tensor {
                xn_tensor(u, s, spec)
            } else {
                xn_monte_carlo(u, s, spec, opts)
            }
        }
    }
}

fn bbox<F: TestField + ?Sized>(u: &F) -> Vec<(f64, f64)> {
    let r = u.support_radius();
    let n = u.dim();
    match u.hints().bbox {
        Some(b) => b,
        None => (0..n).map(|k| if k >= n - 2 { (0.0, r) } else { (-r, r) }).collect(),
    }
}

/// u must vanish to 1e−3 of its size at x_n = 1e−12·R.
fn check_xn_support<F: TestField + ?Sized>(u: &F) -> Result<()> {
    let b = bbox(u);
    let n = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5a17);
    let mut sup = 0.0f64;
    let mut edge = 0.0f64;
    let r = u.support_radius().min(b[n - 2].1);
    for _ in 0..256 {
        let mut x: Vec<f64> = b.iter().map(|&(lo, hi)| rng.gen_range(lo..hi.max(lo + 1e-300))).collect();
        x[n - 1] *= rng.gen::<f64>().powi(4);
        sup = sup.max(u.value(&x).abs());
        x[n - 2] = 1e-12 * r;
        edge = edge.max(u.value(&x).abs());
    }
    if edge > 1e-3 * sup {
        return Err(Error::SupportViolation);
    }
    Ok(())
}

fn linear_rule(lo: f64, hi: f64, breaks: &[f64], panels: usize) -> Rule {
    let mut edges = vec![lo];
    let mut pts = sorted_breaks(breaks, lo, hi);
    pts.push(hi);
    let width = (hi - lo) / panels as f64;
    let mut prev = lo;
    for p in pts {
        let k = ((p - prev) / width).ceil().max(1.0) as usize;
        for j in 1..=k {
            edges.push(prev + (p - prev) * j as f64 / k as f64);
        }
        prev = p;
    }
    Rule::on_edges(&edges)
}

fn xn_tensor<F: TestField + ?Sized>(u: &F, s: f64, spec: &QuadratureSpec) -> Result<Functionals> {
    let b = bbox(u);
    let h = u.hints();
    let x1 = linear_rule(b[0].0, b[0].1, &h.x_breaks, WIDTH_PANELS as usize);
    let xn = positive_axis_rule(b[1].0, b[1].1, &h.xn_breaks, h.xn_exp);
    let mut t = positive_axis_rule(b[2].0, b[2].1, &h.t_breaks, s);
    if let Some(g) = h.t_tail {
        t.push_tail(b[2].1, g);
    }
    let dir = [1.0, 0.0, 0.0];
    let ts: Vec<f64> = t.x.iter().map(|v| v.powf(s)).collect();
    let parts: Vec<Sums<2>> = (0..xn.len() * t.len())
        .into_par_iter()
        .map(|idx| {
            let (a, c) = (idx / t.len(), idx % t.len());
            let y = xn.x[a];
            let vals = u.along(&[0.0, y, t.x[c]], &dir, &x1.x);
            let mut acc = Sums::<2>::default();
            let (wk, wg) = (xn.wk[a] * t.wk[c] * ts[c], xn.wg[a] * t.wg[c] * ts[c]);
            for (j, &(v, g2)) in vals.iter().enumerate() {
                let terms = [g2, v * v / (y * y)];
                for k in 0..2 {
                    acc.k[k] += wk * x1.wk[j] * terms[k];
                    acc.g[k] += wg * x1.wg[j] * terms[k];
                }
            }
            acc
        })
        .collect();
    let mut tot = Sums::<2>::default();
    parts.iter().for_each(|p| tot.add(p));
    let mut tr = Sums::<1>::default();
    for a in 0..xn.len() {
        let y = xn.x[a];
        let vals = u.along(&[0.0, y, 0.0], &dir, &x1.x);
        let wy = y.powf(s - 1.0);
        for (j, &(v, _)) in vals.iter().enumerate() {
            tr.k[0] += xn.wk[a] * x1.wk[j] * wy * v * v;
            tr.g[0] += xn.wg[a] * x1.wg[j] * wy * v * v;
        }
    }
    finite_or_fail(Functionals {
        energy: tot.estimate(0, spec),
        hardy: tot.estimate(1, spec),
        trace: tr.estimate(0, spec),
        remainder: None,
        method: Method::Tensor,
    })
}

fn xn_monte_carlo<F: TestField + ?Sized>(
    u: &F,
    s: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    let b = bbox(u);
    let n = u.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(opts.tag.wrapping_mul(1 << 16).wrapping_add(0xfff));
    let box_vol: f64 = b[..n - 2].iter().map(|(lo, hi)| hi - lo).product();
    let (y_lo, y_hi) = b[n - 2];
    let t_hi = b[n - 1].1;
    let mut inner = Strata::new(STRATA, 2);
    let mut faces = Strata::new(STRATA, 1);
    for k in 0..spec.mc_samples {
        let st = k % STRATA;
        let mut x: Vec<f64> = b[..n - 2].iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect();
        let y = y_lo + (y_hi - y_lo) * rng.gen::<f64>();
        let v = (st as f64 + rng.gen::<f64>()) / STRATA as f64;
        let (t, wt) = radial_sample(v, 0.0, t_hi, s);
        x.push(y);
        let mut pt = x.clone();
        pt.push(t);
        let g = u.gradient(&pt);
        let val = u.value(&pt);
        let w = box_vol * (y_hi - y_lo) * wt * t.powf(s);
        inner.push(st, &[w * g.iter().map(|a| a * a).sum::<f64>(), w * val * val / (y * y)]);
        pt[n - 1] = 0.0;
        let v0 = u.value(&pt);
        faces.push(st, &[box_vol * (y_hi - y_lo) * v0 * v0 * y.powf(s - 1.0)]);
    }
    finite_or_fail(Functionals {
        energy: inner.estimate(0),
        hardy: inner.estimate(1),
        trace: faces.estimate(0),
        remainder: None,
        method: Method::MonteCarlo,
    })
}

/// ∫_{ℝ^n} u(x, 0)²/|x|^{1−s} dx in polar coordinates.
fn flat_trace<F: TestField + ?Sized>(u: &F, s: f64, spec: &QuadratureSpec, opts: &FunctionalOptions) -> Result<Estimate> {
    let n = u.dim() - 1;
    let [tr] = flat_moments(u, n as f64 - 2.0 + s, spec, opts, |v, r| [v * v * r.powf(s - 1.0)])?;
    Ok(tr)
}

/// ∫_{ℝ^n} f(u(x, 0), |x|) dx for K integrands at once; `origin_exp` is the power of r
/// in r^{n−1}f near the origin. Tensor rule for n = 2, stratified Monte Carlo otherwise.
pub(crate) fn flat_moments<F, G, const K: usize>(
    u: &F,
    origin_exp: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
    f: G,
) -> Result<[Estimate; K]>
where
    F: TestField + ?Sized,
    G: Fn(f64, f64) -> [f64; K],
{
    let dim = u.dim();
    let n = dim - 1;
    let radius = finite_radius(u)?;
    let h = u.hints();
    let origin = vec![0.0; dim];
    let jac = |r: f64| r.powi(n as i32 - 1);
    if n == 2 {
        let rr = radial_rule(&h, radius, origin_exp);
        let edges: Vec<f64> = (0..=CIRCLE_PANELS).map(|k| 2.0 * PI * k as f64 / CIRCLE_PANELS as f64).collect();
        let ar = Rule::on_edges(&edges);
        let mut acc = Sums::<K>::default();
        for j in 0..ar.len() {
            let (sa, ca) = ar.x[j].sin_cos();
            let vals = u.along(&origin, &[ca, sa, 0.0], &rr.x);
            for (k, &(v, _)) in vals.iter().enumerate() {
                let terms = f(v, rr.x[k]);
                let jk = jac(rr.x[k]);
                for m in 0..K {
                    acc.k[m] += ar.wk[j] * rr.wk[k] * jk * terms[m];
                    acc.g[m] += ar.wg[j] * rr.wg[k] * jk * terms[m];
                }
            }
        }
        return Ok(std::array::from_fn(|m| acc.estimate(m, spec)));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    rng.set_stream(opts.tag.wrapping_mul(1 << 16).wrapping_add(0xffe));
    let area = sphere_area(n - 1);
    let mut st = Strata::new(STRATA, K);
    for k in 0..spec.mc_samples {
        let mut e = unit_gaussian(&mut rng, n);
        e.push(0.0);
        let v = ((k % STRATA) as f64 + rng.gen::<f64>()) / STRATA as f64;
        let (r, wr) = radial_sample(v, h.inner_radius.max(0.0), radius, origin_exp);
        let val = u.along(&origin, &e, &[r])[0].0;
        let terms = f(val, r);
        let w = area * wr * jac(r);
        let row: [f64; K] = std::array::from_fn(|m| w * terms[m]);
        st.push(k % STRATA, &row);
    }
    Ok(std::array::from_fn(|m| st.estimate(m)))
}

/// (ω_{n,s}, ω_{n−1}): weighted measure of the upper unit hemisphere of ℝ^{n+1} and |S^{n−1}|.
pub fn sphere_weight(n: usize, s: f64) -> Result<(f64, f64)> {
    Ok((omega_ns(n, s)?, omega_sphere(n)?))
}

/// Coefficient of the interior Hardy term: (β−2)²/4 on cones, β²/4 on the half-space.
pub fn hardy_coefficient(geometry: &Geometry, beta: f64) -> f64 {
    match geometry {
        Geometry::Cone(_) => 0.25 * (beta - 2.0).powi(2),
        Geometry::HalfSpace => 0.25 * beta * beta,
    }
}

pub fn geometry_functionals<F: TestField + ?Sized>(
    u: &F,
    geometry: &Geometry,
    s: f64,
    spec: &QuadratureSpec,
    opts: &FunctionalOptions,
) -> Result<Functionals> {
    match geometry {
        Geometry::Cone(c) => cone_functionals_with(u, c, s, spec, opts),
        Geometry::HalfSpace => halfspace_functionals_with(u, s, HalfMode::XnWeight, spec, opts),
    }
}

/// (energy − hardy_coefficient·hardy)/trace.
pub fn quotient_of(f: &Functionals, geometry: &Geometry, beta: f64) -> Result<f64> {
    if !(f.trace.value > 0.0) || f.trace.value <= 1e-300 {
        return Err(Error::ZeroTrace);
    }
    Ok((f.energy.value - hardy_coefficient(geometry, beta) * f.hardy.value) / f.trace.value)
}

pub fn rayleigh_quotient<F: TestField + ?Sized>(
    u: &F,
    geometry: &Geometry,
    params: &InequalityParams,
    spec: &QuadratureSpec,
) -> Result<f64> {
    let f = geometry_functionals(u, geometry, params.s, spec, &FunctionalOptions::default())?;
    quotient_of(&f, geometry, params.beta)
}

/// Numerical check of one inequality: lhs ≥ Σ rhs_terms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub lhs: f64,
    pub rhs_terms: Vec<(String, f64)>,
    pub margin: f64,
    pub error_estimate: f64,
    pub params: InequalityParams,
    pub inequality_tag: String,
}

impl Certificate {
    /// rhs terms are (name, coefficient, integral); errors combine linearly, scaled by `confidence`.
    pub fn new(
        tag: &str,
        params: InequalityParams,
        lhs: Estimate,
        terms: &[(&str, f64, Estimate)],
        confidence: f64,
    ) -> Self {
        let rhs_terms: Vec<(String, f64)> = terms.iter().map(|(name, c, e)| (name.to_string(), c * e.value)).collect();
        let margin = lhs.value - rhs_terms.iter().map(|t| t.1).sum::<f64>();
        let err = lhs.error + terms.iter().map(|(_, c, e)| c.abs() * e.error).sum::<f64>();
        Self { lhs: lhs.value, rhs_terms, margin, error_estimate: confidence * err, params, inequality_tag: tag.into() }
    }

    pub fn passes(&self) -> bool {
        self.margin >= -self.error_estimate
    }
}

/// Certificate for the cone inequality with constant H(n, s, β).
pub fn cone_certificate<F: TestField + ?Sized>(
    u: &F,
    cone: &ConeDomain,
    params: &InequalityParams,
    spec: &QuadratureSpec,
) -> Result<Certificate> {
    let h = crate::constants::h_cone(params.n, params.s, params.beta)?;
    let f = cone_functionals(u, cone, params, spec)?;
    let c = hardy_coefficient(&Geometry::Cone(cone.clone()), params.beta);
    Ok(Certificate::new(
        "cone_trace_hardy",
        *params,
        f.energy,
        &[("hardy", c, f.hardy), ("trace", h, f.trace)],
        f.confidence(),
    ))
}

/// Certificate for the half-space inequality with constant k(s, β).
pub fn halfspace_certificate<F: TestField + ?Sized>(
    u: &F,
    params: &InequalityParams,
    spec: &QuadratureSpec,
) -> Result<Certificate> {
    let k = crate::constants::k_half(params.s, params.beta)?;
    let f = halfspace_functionals(u, params.s, HalfMode::XnWeight, spec)?;
    Ok(Certificate::new(
        "halfspace_trace_hardy",
        *params,
        f.energy,
        &[("hardy", 0.25 * params.beta * params.beta, f.hardy), ("trace", k, f.trace)],
        f.confidence(),
    ))
}

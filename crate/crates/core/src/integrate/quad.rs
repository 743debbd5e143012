//! One-dimensional adaptive quadrature with algebraic endpoint handling,
//! plus Gauss–Legendre rules for tensor products.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::cmp::Ordering;
use std::collections::BinaryHeap;

const XGK: [f64; 8] = [
    0.991_455_371_120_812_639_206_854_697_526_329,
    0.949_107_912_342_758_524_526_189_684_047_851,
    0.864_864_423_359_769_072_789_712_788_640_926,
    0.741_531_185_599_394_439_863_864_773_280_788,
    0.586_087_235_467_691_130_294_144_845_693_013,
    0.405_845_151_377_397_166_906_606_412_076_961,
    0.207_784_955_007_898_467_600_689_403_773_245,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224_963_732_008_058_970,
    0.063_092_092_629_978_553_290_700_663_189_204,
    0.104_790_010_322_250_183_839_876_322_541_518,
    0.140_653_259_715_525_918_745_189_590_510_238,
    0.169_004_726_639_267_902_826_583_426_598_550,
    0.190_350_578_064_785_409_913_256_402_421_014,
    0.204_432_940_075_298_892_414_161_999_234_649,
    0.209_482_141_084_727_828_012_999_174_891_714,
];
const WG: [f64; 4] = [
    0.129_484_966_168_869_693_270_611_432_679_082,
    0.279_705_391_489_276_667_901_467_771_423_780,
    0.381_830_050_505_118_944_950_369_775_488_975,
    0.417_959_183_673_469_387_755_102_040_816_327,
];

/// Tolerances and sampling budget shared by all quadrature routines.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_depth: u32,
    pub mc_samples: usize,
    pub seed: u64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, max_depth: 60, mc_samples: 1_000_000, seed: 0 }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.abs_tol > 0.0) {
            return Err(Error::Invalid("quadrature tolerances must be positive".into()));
        }
        if self.mc_samples < 1000 {
            return Err(Error::Invalid("mc_samples must be at least 1000".into()));
        }
        Ok(())
    }
}

/// 15-point Kronrod estimate and its difference from the embedded 7-point Gauss rule.
pub fn gk15<F: Fn(f64) -> f64 + ?Sized>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut rk = fc * WGK[7];
    let mut rg = fc * WG[3];
    for j in 0..7 {
        let x = h * XGK[j];
        let s = f(c - x) + f(c + x);
        rk += WGK[j] * s;
        if j % 2 == 1 {
            rg += WG[j / 2] * s;
        }
    }
    let rk = rk * h;
    let rg = rg * h;
    (rk, (rk - rg).abs())
}

struct Piece {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
    depth: u32,
}

impl PartialEq for Piece {
    fn eq(&self, o: &Self) -> bool {
        self.error == o.error
    }
}
impl Eq for Piece {}
impl PartialOrd for Piece {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl Ord for Piece {
    fn cmp(&self, o: &Self) -> Ordering {
        self.error.partial_cmp(&o.error).unwrap_or(Ordering::Equal)
    }
}

const MAX_PIECES: usize = 4000;

/// Globally adaptive Gauss–Kronrod integration of a finite interval.
///
/// Pieces deeper than `max_depth` bisections are frozen. If the tolerance
/// cannot be met the best estimate comes back in [`Error::DepthExhausted`].
pub fn adaptive_gk<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
    max_depth: u32,
) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    let (v, e) = gk15(f, a, b);
    let mut heap = BinaryHeap::new();
    heap.push(Piece { a, b, value: v, error: e, depth: 0 });
    let mut frozen_v = 0.0;
    let mut frozen_e = 0.0;
    let mut value = v;
    let mut error = e;
    let mut count = 1;
    loop {
        if !value.is_finite() {
            return Err(Error::NoConvergence("non-finite integrand".into()));
        }
        if error <= abs_tol.max(rel_tol * value.abs()) {
            return Ok((value, error));
        }
        let Some(p) = heap.pop() else { break };
        if p.depth >= max_depth || count >= MAX_PIECES {
            frozen_v += p.value;
            frozen_e += p.error;
            if count >= MAX_PIECES {
                for q in heap.drain() {
                    frozen_v += q.value;
                    frozen_e += q.error;
                }
                break;
            }
            continue;
        }
        let m = 0.5 * (p.a + p.b);
        let (v1, e1) = gk15(f, p.a, m);
        let (v2, e2) = gk15(f, m, p.b);
        value += v1 + v2 - p.value;
        error += e1 + e2 - p.error;
        heap.push(Piece { a: p.a, b: m, value: v1, error: e1, depth: p.depth + 1 });
        heap.push(Piece { a: m, b: p.b, value: v2, error: e2, depth: p.depth + 1 });
        count += 1;
    }
    let _ = frozen_v;
    let error = error.max(frozen_e);
    if error <= abs_tol.max(rel_tol * value.abs()) {
        Ok((value, error))
    } else {
        Err(Error::DepthExhausted { value, error })
    }
}

/// ∫_a^b f with f ~ (x−a)^{left_exp} and (b−x)^{right_exp} at the endpoints.
///
/// Each half is mapped by x = a + (m−a)τ^{1/(1+left_exp)} (mirrored at b),
/// which turns the endpoint powers into bounded integrands. For b = ∞ the
/// half-line is first mapped by x = a + τ/(1−τ); `right_exp` is then the
/// exponent of (1−τ) in the mapped integrand.
pub fn quad1d_singular<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    left_exp: f64,
    right_exp: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    if !(left_exp > -1.0 && right_exp > -1.0) {
        return Err(Error::Invalid(format!("endpoint exponents must exceed -1, got {left_exp}, {right_exp}")));
    }
    if b == f64::INFINITY {
        let g = |tau: f64| {
            if tau >= 1.0 {
                return 0.0;
            }
            let om = 1.0 - tau;
            let v = f(a + tau / om) / (om * om);
            if v.is_finite() {
                v
            } else {
                0.0
            }
        };
        return quad1d_singular(&g as &dyn Fn(f64) -> f64, 0.0, 1.0, left_exp, right_exp, spec);
    }
    if !(b > a) {
        return if a == b { Ok((0.0, 0.0)) } else { Err(Error::Invalid("quadrature interval reversed".into())) };
    }
    let m = 0.5 * (a + b);
    let hl = m - a;
    let ql = 1.0 / (1.0 + left_exp);
    let qr = 1.0 / (1.0 + right_exp);
    let left = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let v = f(a + hl * t.powf(ql)) * hl * ql * t.powf(ql - 1.0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let right = |t: f64| {
        if t <= 0.0 {
            return 0.0;
        }
        let v = f(b - hl * t.powf(qr)) * hl * qr * t.powf(qr - 1.0);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let l = adaptive_gk(&left, 0.0, 1.0, spec.rel_tol, 0.5 * spec.abs_tol, spec.max_depth);
    let r = adaptive_gk(&right, 0.0, 1.0, spec.rel_tol, 0.5 * spec.abs_tol, spec.max_depth);
    match (l, r) {
        (Ok((v1, e1)), Ok((v2, e2))) => {
            let (v, e) = (v1 + v2, e1 + e2);
            if e <= spec.abs_tol.max(spec.rel_tol * v.abs()) * 2.0 {
                Ok((v, e))
            } else {
                Err(Error::DepthExhausted { value: v, error: e })
            }
        }
        (l, r) => {
            let unpack = |x: Result<(f64, f64)>| match x {
                Ok(p) => Ok(p),
                Err(Error::DepthExhausted { value, error }) => Ok((value, error)),
                Err(e) => Err(e),
            };
            let (v1, e1) = unpack(l)?;
            let (v2, e2) = unpack(r)?;
            Err(Error::DepthExhausted { value: v1 + v2, error: e1 + e2 })
        }
    }
}

/// Like [`quad1d_singular`] but returns the best estimate on depth exhaustion.
pub fn quad1d_best<F: Fn(f64) -> f64 + ?Sized>(
    f: &F,
    a: f64,
    b: f64,
    left_exp: f64,
    right_exp: f64,
    spec: &QuadratureSpec,
) -> Result<(f64, f64)> {
    match quad1d_singular(f, a, b, left_exp, right_exp, spec) {
        Err(Error::DepthExhausted { value, error }) => Ok((value, error)),
        r => r,
    }
}

/// Gauss–Legendre nodes and weights on [−1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    let nf = n as f64;
    for i in 0..(n + 1) / 2 {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let kf = k as f64;
                let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
                p0 = p1;
                p1 = p2;
            }
            let pn = if n == 0 { 1.0 } else if n == 1 { z } else { p1 };
            let pm = if n == 1 { 1.0 } else { p0 };
            dp = nf * (z * pn - pm) / (z * z - 1.0);
            let dz = pn / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        w[i] = wi;
        w[n - 1 - i] = wi;
    }
    (x, w)
}

/// Gauss–Legendre rule mapped to [a, b].
pub fn gauss_on(n: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    let (x, w) = gauss_legendre(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    x.iter().zip(w.iter()).map(|(&xi, &wi)| (c + h * xi, h * wi)).collect()
}

/// Composite Gauss rule with the power substitution x = a + (b−a)τ^{1/(1+e)}
/// absorbing (x−a)^e; weights include the Jacobian but not the weight itself.
pub fn gauss_power(n: usize, panels: usize, a: f64, b: f64, e: f64) -> Vec<(f64, f64)> {
    let q = 1.0 / (1.0 + e);
    let mut out = Vec::with_capacity(n * panels);
    for p in 0..panels {
        let t0 = p as f64 / panels as f64;
        let t1 = (p + 1) as f64 / panels as f64;
        for (t, w) in gauss_on(n, t0, t1) {
            let x = a + (b - a) * t.powf(q);
            out.push((x, w * (b - a) * q * t.powf(q - 1.0)));
        }
    }
    out
}

/// Tensor-ready 1D rule: nodes with Kronrod weights and the weights of the
/// embedded Gauss rule (zero on Kronrod-only nodes).
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Rule {
    pub x: Vec<f64>,
    pub wk: Vec<f64>,
    pub wg: Vec<f64>,
}

impl Rule {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    fn push_nodes(&mut self, a: f64, b: f64, map: impl Fn(f64) -> (f64, f64)) {
        let c = 0.5 * (a + b);
        let h = 0.5 * (b - a);
        for j in 0..15 {
            let (off, k) = if j < 7 { (-XGK[j], j) } else if j == 7 { (0.0, 7) } else { (XGK[14 - j], 14 - j) };
            let wk = WGK[k] * h;
            let wg = if k == 7 { WG[3] * h } else if k % 2 == 1 { WG[k / 2] * h } else { 0.0 };
            let (x, jac) = map(c + h * off);
            self.x.push(x);
            self.wk.push(wk * jac);
            self.wg.push(wg * jac);
        }
    }

    /// GK15 panel on [a, b].
    pub fn push_panel(&mut self, a: f64, b: f64) {
        self.push_nodes(a, b, |x| (x, 1.0));
    }

    /// GK15 panel after x = a + (b−a)τ^{1/(1+e)}, absorbing (x−a)^e.
    pub fn push_power_panel(&mut self, a: f64, b: f64, e: f64) {
        let q = 1.0 / (1.0 + e);
        let l = b - a;
        self.push_nodes(0.0, 1.0, |t| (a + l * t.powf(q), l * q * t.powf(q - 1.0)));
    }

    /// Mirror image of [`Rule::push_power_panel`], singular at b.
    pub fn push_power_panel_right(&mut self, a: f64, b: f64, e: f64) {
        let q = 1.0 / (1.0 + e);
        let l = b - a;
        self.push_nodes(0.0, 1.0, |t| (b - l * t.powf(q), l * q * t.powf(q - 1.0)));
    }

    /// Panels on consecutive edges.
    pub fn on_edges(edges: &[f64]) -> Self {
        let mut r = Self::default();
        for w in edges.windows(2) {
            if w[1] > w[0] {
                r.push_panel(w[0], w[1]);
            }
        }
        r
    }

    /// Panels on [a, b] refined geometrically toward a; the innermost panel absorbs (x−a)^e.
    pub fn graded(a: f64, b: f64, breaks: &[f64], levels: u32, ratio: f64, e: f64) -> Self {
        let edges = graded_edges(a, b, breaks, levels, ratio);
        let mut r = Self::default();
        r.push_power_panel(edges[0], edges[1], e);
        for w in edges[1..].windows(2) {
            r.push_panel(w[0], w[1]);
        }
        r
    }

    /// Same as [`Rule::graded`] but refined toward b.
    pub fn graded_right(a: f64, b: f64, breaks: &[f64], levels: u32, ratio: f64, e: f64) -> Self {
        let mirrored: Vec<f64> = breaks.iter().map(|&x| a + b - x).collect();
        let edges: Vec<f64> = graded_edges(a, b, &mirrored, levels, ratio).iter().rev().map(|&x| a + b - x).collect();
        let n = edges.len();
        let mut r = Self::default();
        for w in edges[..n - 1].windows(2) {
            r.push_panel(w[0], w[1]);
        }
        r.push_power_panel_right(edges[n - 2], edges[n - 1], e);
        r
    }

    /// GK15 panel on [a, ∞) after t = a τ^{−1/γ}, absorbing a t^{−1−γ} tail.
    pub fn push_tail(&mut self, a: f64, gamma: f64) {
        let q = 1.0 / gamma;
        self.push_nodes(0.0, 1.0, |tau| (a * tau.powf(-q), a * q * tau.powf(-q - 1.0)));
    }

    pub fn extend(&mut self, other: Rule) {
        self.x.extend(other.x);
        self.wk.extend(other.wk);
        self.wg.extend(other.wg);
    }
}

/// Edges a = e₀ < e₁ < … < b containing the breaks, geometric toward a with
/// `levels` refinements of the given ratio, every panel [l, h] with
/// (h−a)/(l−a) above 1/ratio split geometrically.
pub fn graded_edges(a: f64, b: f64, breaks: &[f64], levels: u32, ratio: f64) -> Vec<f64> {
    let mut pts: Vec<f64> = breaks.iter().copied().filter(|&x| x > a && x < b).collect();
    pts.push(b);
    pts.sort_by(|x, y| x.partial_cmp(y).unwrap());
    pts.dedup_by(|x, y| (*x - *y).abs() <= 1e-14 * (b - a));
    let first = pts[0] - a;
    let mut edges = vec![a];
    for k in (1..=levels).rev() {
        edges.push(a + first * ratio.powi(k as i32));
    }
    let max_ratio = 1.0 / ratio;
    let mut prev = *edges.last().unwrap();
    for p in pts {
        let (lo, hi) = (prev - a, p - a);
        if lo > 0.0 && hi / lo > max_ratio {
            let pieces = ((hi / lo).ln() / max_ratio.ln()).ceil() as i32;
            for j in 1..pieces {
                edges.push(a + lo * (hi / lo).powf(j as f64 / pieces as f64));
            }
        }
        edges.push(p);
        prev = p;
    }
    edges
}

use crate::constants::{h_cone, InequalityParams};
use crate::error::{Error, Result};
use crate::integrate::geometry::ConeDomain;
use crate::specfun::hyp2f1::{series, HypParams};
use crate::specfun::{eta_limit, extrapolate, hyp2f1_deriv2, PolyOde};
use serde::{Deserialize, Serialize};

/// Continuation stops at 1 − 2^{−LAST_CHECKPOINT}; closer to z = 1 the
/// solution regular at 1 is expanded directly.
const LAST_CHECKPOINT: i32 = 12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
struct Checkpoint {
    z: f64,
    w: f64,
    dw: f64,
}

/// ω(z) = F(a₁,b₁;c₁;z) − (H/(1−s)) z^{(1−s)/2} F(a₂,b₂;c₂;z) with φ(x) = |x|^{−(n_s−2)/2} ω(d²/|x|²).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeProfile {
    pub params: InequalityParams,
    pub h: f64,
    /// Coefficient −H/(1−s) of the z^{(1−s)/2} term.
    pub coefficient: f64,
    pub first: (f64, f64, f64),
    pub second: (f64, f64, f64),
    /// ω(1), the regular limit at the boundary of the cone's angular range.
    pub omega_one: f64,
    checkpoints: Vec<Checkpoint>,
}

/// ω with its first two derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileValue {
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
}

impl ConeProfile {
    fn ode(&self) -> PolyOde {
        let (a, b, c) = self.first;
        PolyOde::hypergeometric(a, b, c)
    }

    /// (n_s − 2)/2, the homogeneity degree of φ.
    pub fn degree(&self) -> f64 {
        0.5 * (self.params.n_s() - 2.0)
    }

    /// ((n_s−2)² − (β−2)²)/16.
    pub fn c0(&self) -> f64 {
        let p = &self.params;
        ((p.n_s() - 2.0).powi(2) - (p.beta - 2.0).powi(2)) / 16.0
    }

    fn series_eval(&self, z: f64) -> Result<ProfileValue> {
        let (a1, b1, c1) = self.first;
        let (a2, b2, c2) = self.second;
        let pw = 0.5 * (1.0 - self.params.s);
        let f1 = series(a1, b1, c1, z)?;
        let df1 = a1 * b1 / c1 * series(a1 + 1.0, b1 + 1.0, c1 + 1.0, z)?;
        let d2f1 = hyp2f1_deriv2(HypParams::new(a1, b1, c1, z))?;
        if z == 0.0 {
            return Ok(ProfileValue { w: f1, dw: f64::NEG_INFINITY, d2w: f64::INFINITY });
        }
        let f2 = series(a2, b2, c2, z)?;
        let df2 = a2 * b2 / c2 * series(a2 + 1.0, b2 + 1.0, c2 + 1.0, z)?;
        let d2f2 = hyp2f1_deriv2(HypParams::new(a2, b2, c2, z))?;
        let zp = z.powf(pw);
        let k = self.coefficient;
        let w = f1 + k * zp * f2;
        let dw = df1 + k * (pw * zp / z * f2 + zp * df2);
        let d2w = d2f1 + k * (pw * (pw - 1.0) * zp / (z * z) * f2 + 2.0 * pw * zp / z * df2 + zp * d2f2);
        Ok(ProfileValue { w, dw, d2w })
    }

    /// ω, ω′, ω″ on [0, 1]. Second derivatives come from the hypergeometric
    /// formulas for z ≤ 1/2 and from the local Taylor sums beyond.
    pub fn eval_full(&self, z: f64) -> Result<ProfileValue> {
        if !(0.0..=1.0).contains(&z) {
            return Err(Error::Domain(format!("cone profile argument must lie in [0, 1], got {z}")));
        }
        if z <= 0.5 {
            return self.series_eval(z);
        }
        let cp = self.checkpoints.iter().rev().find(|c| c.z <= z).expect("checkpoint at 1/2");
        if cp.z == self.checkpoints.last().unwrap().z && z > cp.z {
            return self.regular_at_one(z);
        }
        let st = self.ode().taylor(cp.z, cp.w, cp.dw, z - cp.z);
        Ok(ProfileValue { w: st.w, dw: st.dw, d2w: st.d2w })
    }

    /// ω(1)·F(a₁, b₁; n/2; 1−z), the solution regular at z = 1.
    fn regular_at_one(&self, z: f64) -> Result<ProfileValue> {
        let (a, b, _) = self.first;
        let c = 0.5 * self.params.nf();
        let t = 1.0 - z;
        let w1 = self.omega_one;
        let f = series(a, b, c, t)?;
        let df = a * b / c * series(a + 1.0, b + 1.0, c + 1.0, t)?;
        let d2f = a * (a + 1.0) * b * (b + 1.0) / (c * (c + 1.0)) * series(a + 2.0, b + 2.0, c + 2.0, t)?;
        Ok(ProfileValue { w: w1 * f, dw: -w1 * df, d2w: w1 * d2f })
    }

    pub fn omega(&self, z: f64) -> Result<f64> {
        self.eval_full(z).map(|v| v.w)
    }

    pub fn omega_prime(&self, z: f64) -> Result<f64> {
        self.eval_full(z).map(|v| v.dw)
    }

    /// ω′(1) = −(2/n) c₀ ω(1).
    pub fn omega_prime_at_one(&self) -> f64 {
        -2.0 / self.params.nf() * self.c0() * self.omega_one
    }
}

/// Builds ω for 2 ≤ β < n_s.
pub fn build_cone_profile(params: InequalityParams) -> Result<ConeProfile> {
    params.check_cone()?;
    let InequalityParams { n, s, beta } = params;
    let ns = params.n_s();
    if beta >= ns {
        return Err(Error::Range(format!("cone profile needs beta < n_s = {ns}, got {beta}")));
    }
    let h = h_cone(n, s, beta)?;
    let first = ((ns + beta - 4.0) / 4.0, (ns - beta) / 4.0, 0.5 * (1.0 + s));
    let second = ((ns + beta) / 4.0 - 0.5 * (1.0 + s), (ns - beta) / 4.0 + 0.5 * (1.0 - s), 0.5 * (3.0 - s));
    let omega_one = eta_limit(first.0, first.1, first.2)?;
    let mut prof = ConeProfile {
        params,
        h,
        coefficient: -h / (1.0 - s),
        first,
        second,
        omega_one,
        checkpoints: Vec::new(),
    };
    let v = prof.series_eval(0.5)?;
    let ode = prof.ode();
    let mut cps = vec![Checkpoint { z: 0.5, w: v.w, dw: v.dw }];
    // Intermediate checkpoints every half of the remaining distance, subdivided in four.
    for k in 1..LAST_CHECKPOINT {
        let z0 = 1.0 - 0.5f64.powi(k);
        let z1 = 1.0 - 0.5f64.powi(k + 1);
        for j in 1..=4 {
            let zt = z0 + (z1 - z0) * j as f64 / 4.0;
            let last = *cps.last().unwrap();
            let st = ode.advance(last.z, last.w, last.dw, zt, 0.5);
            cps.push(Checkpoint { z: zt, w: st.w, dw: st.dw });
        }
    }
    prof.checkpoints = cps;
    Ok(prof)
}

/// φ(x) and ∇φ(x) for x inside the cone.
pub fn cone_profile_eval(p: &ConeProfile, x: &[f64], cone: &ConeDomain) -> Result<(f64, Vec<f64>)> {
    let r2: f64 = x.iter().map(|v| v * v).sum();
    if r2 == 0.0 {
        return Err(Error::Origin);
    }
    let fd = cone.distance(x);
    if fd.tie {
        return Err(Error::FacetTie);
    }
    // Points within 1e−12·|x| of ∂C count as boundary points.
    if fd.d < -1e-12 * r2.sqrt() {
        return Err(Error::Domain("point outside the cone".into()));
    }
    let d = fd.d.max(0.0);
    let z = (d * d / r2).min(1.0);
    let v = p.eval_full(z)?;
    let g = p.degree();
    let rg = r2.powf(-0.5 * g);
    let phi = rg * v.w;
    let u = &cone.normals()[fd.facet];
    let grad = x
        .iter()
        .zip(u)
        .map(|(&xi, &ui)| {
            let dz = 2.0 * d * ui / r2 - 2.0 * d * d * xi / (r2 * r2);
            -g * rg / r2 * xi * v.w + rg * v.dw * dz
        })
        .collect();
    Ok((phi, grad))
}

/// max |z(z−1)ω″ + ((n_s/2)z − (1+s)/2)ω′ + c₀ω| over the grid.
pub fn cone_ode_residual(p: &ConeProfile, z_grid: &[f64]) -> Result<f64> {
    let ns = p.params.n_s();
    let s = p.params.s;
    let c0 = p.c0();
    let mut worst = 0.0f64;
    for &z in z_grid {
        if !(z > 0.0 && z < 1.0) {
            return Err(Error::Domain(format!("residual grid point {z} outside (0, 1)")));
        }
        let v = p.eval_full(z)?;
        let r = z * (z - 1.0) * v.d2w + (0.5 * ns * z - 0.5 * (1.0 + s)) * v.dw + c0 * v.w;
        worst = worst.max(r.abs());
    }
    Ok(worst)
}

/// Expansion exponents of z^s d(ω(z²))/dz and y^s ω′(y) near 0: 1+s, 2, 3+s, 4, ...
pub(crate) fn flux_exponents(s: f64, count: usize) -> Vec<f64> {
    (0..count).map(|j| if j % 2 == 0 { (j + 1) as f64 + s } else { (j + 1) as f64 }).collect()
}

/// Richardson limit of z^s · d(ω(z²))/dz as z → 0⁺; tends to −H(n, s, β).
pub fn cone_boundary_flux_limit(p: &ConeProfile) -> Result<f64> {
    let s = p.params.s;
    let samples: Vec<f64> = (0..12)
        .map(|k| {
            let z = 0.1 * 0.5f64.powi(k);
            p.omega_prime(z * z).map(|dw| 2.0 * z.powf(1.0 + s) * dw)
        })
        .collect::<Result<_>>()?;
    let ex = extrapolate(&samples, 0.5, &flux_exponents(s, 8));
    if !(ex.error <= 1e-8 * ex.value.abs().max(1e-300)) {
        return Err(Error::NoConvergence(format!("flux extrapolation unstable (error {:e})", ex.error)));
    }
    Ok(ex.value)
}

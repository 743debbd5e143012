use serde::{Deserialize, Serialize};

/// Radial cutoff equal to 1 on [0, inner] and 0 on [outer, ∞), with a C^∞ transition
/// g(1−τ)/(g(1−τ)+g(τ)), g(x) = exp(1 − 1/x), τ the relative position in the shell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CutoffSpec {
    pub inner: f64,
    pub outer: f64,
}

impl Default for CutoffSpec {
    fn default() -> Self {
        Self { inner: 1.0, outer: 2.0 }
    }
}

fn g(x: f64) -> f64 {
    if x > 0.0 {
        (1.0 - 1.0 / x).exp()
    } else {
        0.0
    }
}

fn dg(x: f64) -> f64 {
    if x > 0.0 {
        g(x) / (x * x)
    } else {
        0.0
    }
}

impl CutoffSpec {
    fn tau(&self, r: f64) -> f64 {
        (r - self.inner) / (self.outer - self.inner)
    }

    /// Profile value at radius r.
    pub fn phi(&self, r: f64) -> f64 {
        let t = self.tau(r.abs());
        if t <= 0.0 {
            return 1.0;
        }
        if t >= 1.0 {
            return 0.0;
        }
        let (a, b) = (g(1.0 - t), g(t));
        a / (a + b)
    }

    /// d/dr of [`CutoffSpec::phi`].
    pub fn dphi(&self, r: f64) -> f64 {
        let t = self.tau(r.abs());
        if t <= 0.0 || t >= 1.0 {
            return 0.0;
        }
        let (a, b) = (g(1.0 - t), g(t));
        let d = -(dg(1.0 - t) * b + a * dg(t)) / ((a + b) * (a + b));
        d / (self.outer - self.inner) * r.signum()
    }

    /// η on ℝ^{n−1}, a function of |z|.
    pub fn eta(&self, z: &[f64]) -> f64 {
        self.phi(z.iter().map(|v| v * v).sum::<f64>().sqrt())
    }

    /// h on ℝ₊.
    pub fn h(&self, y: f64) -> f64 {
        self.phi(y)
    }
}

/// φ(|x|).
pub fn bump_cutoff(spec: &CutoffSpec, x: &[f64]) -> f64 {
    spec.eta(x)
}

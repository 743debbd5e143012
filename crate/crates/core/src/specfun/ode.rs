//! Taylor-series continuation for linear second-order equations
//! p2(z) w'' + p1(z) w' + p0(z) w = 0 with polynomial coefficients.

/// Local state (w, w', w'') after a continuation step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeState {
    pub w: f64,
    pub dw: f64,
    pub d2w: f64,
}

#[derive(Debug, Clone)]
pub struct PolyOde {
    p2: Vec<f64>,
    p1: Vec<f64>,
    p0: Vec<f64>,
    singular: Vec<(f64, f64)>,
}

const MAX_TERMS: usize = 800;

fn shift(p: &[f64], z0: f64) -> Vec<f64> {
    let mut q = p.to_vec();
    let n = q.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            q[j] += z0 * q[j + 1];
        }
    }
    q
}

impl PolyOde {
    /// Coefficients in increasing powers of z; singular points as complex numbers.
    pub fn new(p2: Vec<f64>, p1: Vec<f64>, p0: Vec<f64>, singular: Vec<(f64, f64)>) -> Self {
        Self { p2, p1, p0, singular }
    }

    /// z(1−z) w'' + (c − (a+b+1) z) w' − ab w = 0.
    pub fn hypergeometric(a: f64, b: f64, c: f64) -> Self {
        Self::new(
            vec![0.0, 1.0, -1.0],
            vec![c, -(a + b + 1.0)],
            vec![-a * b],
            vec![(0.0, 0.0), (1.0, 0.0)],
        )
    }

    /// Distance from the real point z to the nearest singular point.
    pub fn radius(&self, z: f64) -> f64 {
        self.singular
            .iter()
            .map(|&(re, im)| ((z - re).powi(2) + im * im).sqrt())
            .fold(f64::INFINITY, f64::min)
    }

    /// Sum of the local Taylor expansion at z0 evaluated at z0 + h.
    pub fn taylor(&self, z0: f64, w: f64, dw: f64, h: f64) -> OdeState {
        if h == 0.0 {
            let q2 = shift(&self.p2, z0)[0];
            let q1 = shift(&self.p1, z0)[0];
            let q0 = shift(&self.p0, z0)[0];
            return OdeState { w, dw, d2w: -(q1 * dw + q0 * w) / q2 };
        }
        let scale = |p: &[f64], f: f64| -> Vec<f64> {
            let mut hp = 1.0;
            shift(p, z0)
                .into_iter()
                .map(|c| {
                    let v = c * hp * f;
                    hp *= h;
                    v
                })
                .collect()
        };
        let q2 = scale(&self.p2, 1.0);
        let q1 = scale(&self.p1, h);
        let q0 = scale(&self.p0, h * h);
        let mut c = Vec::with_capacity(96);
        c.push(w);
        c.push(dw * h);
        let mut sum = c[0] + c[1];
        let mut dsum = c[1];
        let mut d2sum = 0.0;
        let mut m = 0usize;
        loop {
            let mut acc = 0.0;
            for (j, &q) in q2.iter().enumerate().skip(1) {
                if j <= m + 2 {
                    let k = m + 2 - j;
                    acc += q * (k * k.saturating_sub(1)) as f64 * c[k];
                }
            }
            for (j, &q) in q1.iter().enumerate() {
                if j <= m + 1 {
                    let k = m + 1 - j;
                    acc += q * k as f64 * c[k];
                }
            }
            for (j, &q) in q0.iter().enumerate() {
                if j <= m {
                    acc += q * c[m - j];
                }
            }
            let k = m + 2;
            let next = -acc / (q2[0] * (k * (k - 1)) as f64);
            c.push(next);
            sum += next;
            dsum += k as f64 * next;
            d2sum += (k * (k - 1)) as f64 * next;
            let tiny = 1e-17 * (sum.abs() + dsum.abs() + 1e-300);
            if k >= 8 && next.abs() < tiny && c[k - 1].abs() < tiny {
                break;
            }
            if k >= MAX_TERMS {
                break;
            }
            m += 1;
        }
        OdeState { w: sum, dw: dsum / h, d2w: d2sum / (h * h) }
    }

    /// Continues the solution from z0 to z1 in steps of at most `frac` times
    /// the local radius of convergence.
    pub fn advance(&self, z0: f64, w: f64, dw: f64, z1: f64, frac: f64) -> OdeState {
        let mut z = z0;
        let mut st = OdeState { w, dw, d2w: 0.0 };
        if z0 == z1 {
            return self.taylor(z0, w, dw, 0.0);
        }
        loop {
            let rho = self.radius(z);
            let remaining = z1 - z;
            let hmax = frac * rho;
            let h = if remaining.abs() <= hmax { remaining } else { hmax * remaining.signum() };
            st = self.taylor(z, st.w, st.dw, h);
            z += h;
            if h == remaining {
                return st;
            }
        }
    }
}

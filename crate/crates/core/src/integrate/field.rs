use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Placement hints that let the tensor rules put panel edges where a field changes character.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FieldHints {
    /// u vanishes on |x| < inner_radius.
    pub inner_radius: f64,
    /// Radii where u or its derivatives jump or change scale.
    pub radial_breaks: Vec<f64>,
    /// Breakpoints in the last coordinate.
    pub t_breaks: Vec<f64>,
    /// Breakpoints in the second to last coordinate.
    pub xn_breaks: Vec<f64>,
    /// Breakpoints shared by the remaining coordinates.
    pub x_breaks: Vec<f64>,
    /// Coordinate box containing the support, overriding [−R, R]^N.
    pub bbox: Option<Vec<(f64, f64)>>,
    /// Exponent of the integrands in x_n near x_n = 0.
    pub xn_exp: f64,
    /// Decay t^{−1−γ} beyond the box in the last coordinate.
    pub t_tail: Option<f64>,
}

/// A test function u on ℝ^N with bounded support.
pub trait TestField: Sync {
    fn dim(&self) -> usize;

    fn value(&self, x: &[f64]) -> f64;

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        fd_gradient(self, x)
    }

    fn support_radius(&self) -> f64;

    fn hints(&self) -> FieldHints {
        FieldHints::default()
    }

    /// (u, |∇u|²) at base + c·dir for each c.
    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        let mut x = vec![0.0; base.len()];
        coords
            .iter()
            .map(|&c| {
                for k in 0..x.len() {
                    x[k] = base[k] + c * dir[k];
                }
                let g = self.gradient(&x);
                (self.value(&x), g.iter().map(|v| v * v).sum())
            })
            .collect()
    }
}

/// Central differences with step |x|·1e−6 + 1e−9.
pub fn fd_gradient<F: TestField + ?Sized>(u: &F, x: &[f64]) -> Vec<f64> {
    let h = x.iter().map(|v| v * v).sum::<f64>().sqrt() * 1e-6 + 1e-9;
    let mut y = x.to_vec();
    (0..x.len())
        .map(|k| {
            y[k] = x[k] + h;
            let fp = u.value(&y);
            y[k] = x[k] - h;
            let fm = u.value(&y);
            y[k] = x[k];
            (fp - fm) / (2.0 * h)
        })
        .collect()
}

/// Samples points with support_radius < |x| ≤ 2·support_radius and fails if u is nonzero there.
pub fn check_support<F: TestField + ?Sized>(u: &F, samples: usize, seed: u64) -> Result<()> {
    let r = u.support_radius();
    if !r.is_finite() {
        return Ok(());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = u.dim();
    for _ in 0..samples {
        let dir: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = dir.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len < 1e-3 {
            continue;
        }
        let rad = r * (1.0 + 1e-9 + rng.gen::<f64>());
        let x: Vec<f64> = dir.iter().map(|v| v / len * rad).collect();
        if u.value(&x) != 0.0 {
            return Err(Error::SupportExceeds(r));
        }
    }
    Ok(())
}

/// Field given by closures; the gradient falls back to finite differences when absent.
pub struct FnField<V, G = fn(&[f64]) -> Vec<f64>> {
    pub dim: usize,
    pub radius: f64,
    pub value: V,
    pub gradient: Option<G>,
    pub hints: FieldHints,
}

impl<V: Fn(&[f64]) -> f64 + Sync> FnField<V> {
    pub fn new(dim: usize, radius: f64, value: V) -> Self {
        Self { dim, radius, value, gradient: None, hints: FieldHints::default() }
    }
}

impl<V, G> FnField<V, G>
where
    V: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Sync,
{
    pub fn with_gradient(dim: usize, radius: f64, value: V, gradient: G) -> Self {
        Self { dim, radius, value, gradient: Some(gradient), hints: FieldHints::default() }
    }

    pub fn hinted(mut self, hints: FieldHints) -> Self {
        self.hints = hints;
        self
    }
}

impl<V, G> TestField for FnField<V, G>
where
    V: Fn(&[f64]) -> f64 + Sync,
    G: Fn(&[f64]) -> Vec<f64> + Sync,
{
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        (self.value)(x)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        match &self.gradient {
            Some(g) => g(x),
            None => fd_gradient(self, x),
        }
    }

    fn support_radius(&self) -> f64 {
        self.radius
    }

    fn hints(&self) -> FieldHints {
        self.hints.clone()
    }
}

/// u(λx).
pub struct Dilated<'a, F: ?Sized> {
    pub inner: &'a F,
    pub lambda: f64,
}

impl<F: TestField + ?Sized> TestField for Dilated<'_, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        let y: Vec<f64> = x.iter().map(|v| v * self.lambda).collect();
        self.inner.value(&y)
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = x.iter().map(|v| v * self.lambda).collect();
        self.inner.gradient(&y).into_iter().map(|g| g * self.lambda).collect()
    }

    fn support_radius(&self) -> f64 {
        self.inner.support_radius() / self.lambda
    }

    fn hints(&self) -> FieldHints {
        let h = self.inner.hints();
        let sc = |v: Vec<f64>| v.into_iter().map(|b| b / self.lambda).collect();
        FieldHints {
            inner_radius: h.inner_radius / self.lambda,
            radial_breaks: sc(h.radial_breaks),
            t_breaks: sc(h.t_breaks),
            xn_breaks: sc(h.xn_breaks),
            x_breaks: sc(h.x_breaks),
            bbox: h.bbox.map(|b| b.into_iter().map(|(lo, hi)| (lo / self.lambda, hi / self.lambda)).collect()),
            ..h
        }
    }

    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        let b: Vec<f64> = base.iter().map(|v| v * self.lambda).collect();
        let c: Vec<f64> = coords.iter().map(|v| v * self.lambda).collect();
        let l2 = self.lambda * self.lambda;
        self.inner.along(&b, dir, &c).into_iter().map(|(v, g)| (v, g * l2)).collect()
    }
}

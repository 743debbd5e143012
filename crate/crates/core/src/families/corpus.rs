use super::logsob::RadialProfile;
use crate::integrate::{dot, ConeDomain, FieldHints, TestField};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

/// a·exp(1 − 1/(1 − |x−c|²/w²)) on the ball of radius w around c.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amp: f64,
}

impl Bump {
    fn eval(&self, x: &[f64], grad: Option<&mut [f64]>) -> f64 {
        let w2 = self.width * self.width;
        let q: f64 = x.iter().zip(&self.center).map(|(a, b)| (a - b) * (a - b)).sum::<f64>() / w2;
        if q >= 1.0 {
            return 0.0;
        }
        let om = 1.0 - q;
        let v = self.amp * (1.0 - 1.0 / om).exp();
        if let Some(g) = grad {
            let dq = -v / (om * om);
            for (k, gk) in g.iter_mut().enumerate() {
                *gk += dq * 2.0 * (x[k] - self.center[k]) / w2;
            }
        }
        v
    }
}

/// Finite sum of bumps with an analytic gradient.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpField {
    pub dim: usize,
    pub bumps: Vec<Bump>,
    pub hints: FieldHints,
}

impl BumpField {
    pub fn new(dim: usize, bumps: Vec<Bump>) -> Self {
        Self { dim, bumps, hints: FieldHints::default() }
    }

    /// Smallest box containing every bump, clipped to t ≥ 0 in the last coordinate.
    fn box_hint(&self) -> Vec<(f64, f64)> {
        (0..self.dim)
            .map(|k| {
                let lo = self.bumps.iter().map(|b| b.center[k] - b.width).fold(f64::INFINITY, f64::min);
                let hi = self.bumps.iter().map(|b| b.center[k] + b.width).fold(f64::NEG_INFINITY, f64::max);
                if k == self.dim - 1 {
                    let top = self.bumps.iter().map(|b| b.center[k].abs() + b.width).fold(0.0, f64::max);
                    (0.0, top)
                } else {
                    (lo, hi)
                }
            })
            .collect()
    }
}

impl TestField for BumpField {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.bumps.iter().map(|b| b.eval(x, None)).sum()
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for b in &self.bumps {
            b.eval(x, Some(&mut g));
        }
        g
    }

    fn support_radius(&self) -> f64 {
        self.bumps.iter().map(|b| dot(&b.center, &b.center).sqrt() + b.width).fold(0.0, f64::max)
    }

    fn hints(&self) -> FieldHints {
        self.hints.clone()
    }

    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        let d2 = dot(dir, dir);
        let mut vals = vec![0.0; coords.len()];
        let mut grads = vec![0.0; coords.len() * self.dim];
        let mut rel = vec![0.0; self.dim];
        for b in &self.bumps {
            for k in 0..self.dim {
                rel[k] = base[k] - b.center[k];
            }
            // |rel + c·dir|² = d2·(c − c0)² + perp
            let c0 = if d2 > 0.0 { -dot(&rel, dir) / d2 } else { 0.0 };
            let perp = dot(&rel, &rel) - d2 * c0 * c0;
            let w2 = b.width * b.width;
            if perp >= w2 {
                continue;
            }
            for (j, &c) in coords.iter().enumerate() {
                let q = (perp + d2 * (c - c0) * (c - c0)) / w2;
                if q >= 1.0 {
                    continue;
                }
                let om = 1.0 - q;
                let v = b.amp * (1.0 - 1.0 / om).exp();
                vals[j] += v;
                let dq = -2.0 * v / (om * om * w2);
                let g = &mut grads[j * self.dim..(j + 1) * self.dim];
                for k in 0..self.dim {
                    g[k] += dq * (rel[k] + c * dir[k]);
                }
            }
        }
        vals.iter().zip(grads.chunks(self.dim)).map(|(&v, g)| (v, dot(g, g))).collect()
    }
}

/// u(x, −t) for a field on ℝ^n × ℝ.
pub struct Reflected<'a, F: ?Sized> {
    pub inner: &'a F,
}

fn flip(x: &[f64]) -> Vec<f64> {
    let mut y = x.to_vec();
    if let Some(t) = y.last_mut() {
        *t = -*t;
    }
    y
}

impl<F: TestField + ?Sized> TestField for Reflected<'_, F> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn value(&self, x: &[f64]) -> f64 {
        self.inner.value(&flip(x))
    }

    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        flip(&self.inner.gradient(&flip(x)))
    }

    fn support_radius(&self) -> f64 {
        self.inner.support_radius()
    }

    fn hints(&self) -> FieldHints {
        self.inner.hints()
    }

    fn along(&self, base: &[f64], dir: &[f64], coords: &[f64]) -> Vec<(f64, f64)> {
        self.inner.along(&flip(base), &flip(dir), coords)
    }
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let l = dot(&v, &v).sqrt();
        if l > 1e-8 {
            return v.into_iter().map(|c| c / l).collect();
        }
    }
}

/// Bumps centred in the cone, supported in the ball of radius `max_radius`; every field reaches the boundary.
pub fn cone_corpus(cone: &ConeDomain, count: usize, seed: u64, max_radius: f64) -> Vec<BumpField> {
    let dim = cone.dim();
    let witness = cone.witness().unwrap_or_else(|| vec![0.0; dim]);
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, i as u64);
            let k = rng.gen_range(1..=3);
            let bumps = (0..k)
                .map(|_| {
                    let dir = loop {
                        let mut v = unit_vector(&mut rng, dim);
                        for (c, w) in v.iter_mut().zip(&witness) {
                            *c += 0.5 * w;
                        }
                        if cone.contains(&v) {
                            let l = dot(&v, &v).sqrt();
                            break v.into_iter().map(|c| c / l).collect::<Vec<_>>();
                        }
                    };
                    let rad = max_radius * rng.gen_range(0.0..0.5);
                    let width = max_radius * rng.gen_range(0.3..0.5f64).min(1.0 - rad / max_radius);
                    Bump {
                        center: dir.iter().map(|c| c * rad).collect(),
                        width,
                        amp: rng.gen_range(0.5..1.5),
                    }
                })
                .collect();
            BumpField::new(dim, bumps)
        })
        .collect()
}

/// Fields on {x_n > 0} × ℝ with support away from x_n = 0, points (x′, x_n, t).
///
/// Every bump meets t = 0. With `whole_line` the centres may sit on either side; otherwise they have t ≥ 0.
pub fn half_corpus(n: usize, count: usize, seed: u64, whole_line: bool) -> Vec<BumpField> {
    let dim = n + 1;
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, 0x1000 + i as u64);
            let k = rng.gen_range(1..=3);
            let bumps = (0..k)
                .map(|_| {
                    let xn = rng.gen_range(0.5..1.0);
                    let width = rng.gen_range(0.2..0.5f64).min(xn - 0.05);
                    let mut center: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-0.5..0.5)).collect();
                    center.push(xn);
                    let t = if whole_line { rng.gen_range(-0.7 * width..0.7 * width) } else { rng.gen_range(0.0..0.7 * width) };
                    center.push(t);
                    Bump { center, width, amp: rng.gen_range(0.5..1.5) }
                })
                .collect();
            let mut f = BumpField::new(dim, bumps);
            f.hints.bbox = Some(f.box_hint());
            f
        })
        .collect()
}

/// Fields on ℝ^n × ℝ₊ with nonzero trace on t = 0.
pub fn flat_corpus(n: usize, count: usize, seed: u64) -> Vec<BumpField> {
    let dim = n + 1;
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, 0x2000 + i as u64);
            let k = rng.gen_range(1..=3);
            let bumps = (0..k)
                .map(|_| {
                    let width = rng.gen_range(0.3..0.6);
                    let mut center: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.5..0.5)).collect();
                    center.push(rng.gen_range(-0.5 * width..0.5 * width));
                    Bump { center, width, amp: rng.gen_range(0.5..1.5) }
                })
                .collect();
            BumpField::new(dim, bumps)
        })
        .collect()
}

/// Positive profiles on ℝ₊ with finite moments against r^{a−1} and r^{a−3}.
pub fn radial_corpus(a: f64, count: usize, seed: u64) -> Vec<RadialProfile> {
    (0..count)
        .map(|i| {
            let mut rng = rng_for(seed, 0x3000 + i as u64);
            match i % 4 {
                0 => {
                    let c: f64 = rng.gen_range(0.5..2.0);
                    let q: f64 = rng.gen_range(1.0..3.0);
                    RadialProfile::new(c.powf(-1.0 / q), move |r| {
                        let v = (-c * r.powf(q)).exp();
                        (v, -c * q * r.powf(q - 1.0) * v)
                    })
                }
                1 => {
                    let c: f64 = rng.gen_range(0.5..2.0);
                    let p: f64 = 0.5 * a + rng.gen_range(2.0..6.0);
                    RadialProfile::new(c.sqrt().recip(), move |r| {
                        let b = 1.0 + c * r * r;
                        (b.powf(-p), -2.0 * p * c * r * b.powf(-p - 1.0))
                    })
                }
                2 => {
                    let w: f64 = rng.gen_range(0.2..1.0);
                    let l: f64 = rng.gen_range(1.5..4.0);
                    RadialProfile::new(1.0, move |r| {
                        let (g1, g2) = ((-0.5 * r * r).exp(), (-0.5 * l * l * r * r).exp());
                        (g1 + w * g2, -r * g1 - w * l * l * r * g2)
                    })
                }
                _ => {
                    let e: f64 = rng.gen_range(0.05..0.5);
                    RadialProfile::new(1.0, move |r| {
                        let g = (-0.5 * r * r).exp();
                        let m = 1.0 + e * r * (-r).exp();
                        let dm = e * (1.0 - r) * (-r).exp();
                        (g * m, g * (dm - r * m))
                    })
                }
            }
        })
        .collect()
}

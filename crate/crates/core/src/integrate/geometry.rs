use crate::error::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Polyhedral cone {x ∈ ℝ^N : ⟨x, u_i⟩ > 0 for all i}.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeDomain {
    dim: usize,
    normals: Vec<Vec<f64>>,
}

/// Distance to the boundary with the minimizing facet.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FacetDistance {
    pub d: f64,
    pub facet: usize,
    pub tie: bool,
}

pub const TIE_TOL: f64 = 1e-12;

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

impl ConeDomain {
    /// Validates unit normals and finds an interior witness by rejection sampling.
    pub fn new(normals: Vec<Vec<f64>>) -> Result<Self> {
        let Some(first) = normals.first() else {
            return Err(Error::Invalid("a cone needs at least one normal".into()));
        };
        let dim = first.len();
        if dim < 2 {
            return Err(Error::Invalid("cone dimension must be at least 2".into()));
        }
        for (i, u) in normals.iter().enumerate() {
            if u.len() != dim {
                return Err(Error::Invalid(format!("normal {i} has length {}, expected {dim}", u.len())));
            }
            if (norm(u) - 1.0).abs() > 1e-12 {
                return Err(Error::Invalid(format!("normal {i} is not a unit vector (|u| = {})", norm(u))));
            }
        }
        let cone = Self { dim, normals };
        if cone.witness().is_none() {
            return Err(Error::Invalid("cone is empty: no interior point found".into()));
        }
        Ok(cone)
    }

    /// Normalizes the given directions before building the cone.
    pub fn from_directions(dirs: Vec<Vec<f64>>) -> Result<Self> {
        let normals = dirs
            .into_iter()
            .map(|u| {
                let r = norm(&u);
                u.into_iter().map(|x| x / r).collect()
            })
            .collect();
        Self::new(normals)
    }

    /// Upper half-space {x_N > 0}.
    pub fn half_space(dim: usize) -> Self {
        let mut u = vec![0.0; dim];
        u[dim - 1] = 1.0;
        Self { dim, normals: vec![u] }
    }

    /// Positive orthant of ℝ^N.
    pub fn orthant(dim: usize) -> Self {
        let normals = (0..dim)
            .map(|i| {
                let mut u = vec![0.0; dim];
                u[i] = 1.0;
                u
            })
            .collect();
        Self { dim, normals }
    }

    /// Planar wedge {0 < θ < opening}.
    pub fn wedge(opening: f64) -> Result<Self> {
        if !(opening > 0.0 && opening < std::f64::consts::PI) {
            return Err(Error::Invalid(format!("wedge opening must lie in (0, π), got {opening}")));
        }
        Self::new(vec![vec![0.0, 1.0], vec![opening.sin(), -opening.cos()]])
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn normals(&self) -> &[Vec<f64>] {
        &self.normals
    }

    /// Interior point with every ⟨x, u_i⟩ > 0, sampled from a fixed seed.
    pub fn witness(&self) -> Option<Vec<f64>> {
        let mean: Vec<f64> = (0..self.dim).map(|k| self.normals.iter().map(|u| u[k]).sum::<f64>()).collect();
        if self.normals.iter().all(|u| dot(u, &mean) > 0.0) {
            return Some(mean);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
        for _ in 0..100_000 {
            let x: Vec<f64> = (0..self.dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
            if self.normals.iter().all(|u| dot(u, &x) > 0.0) {
                return Some(x);
            }
        }
        None
    }

    /// d_C(x) = min_i ⟨x, u_i⟩, negative outside the cone.
    pub fn distance(&self, x: &[f64]) -> FacetDistance {
        let mut best = f64::INFINITY;
        let mut second = f64::INFINITY;
        let mut facet = 0;
        for (i, u) in self.normals.iter().enumerate() {
            let d = dot(u, x);
            if d < best {
                second = best;
                best = d;
                facet = i;
            } else if d < second {
                second = d;
            }
        }
        let tie = second - best <= TIE_TOL * (1.0 + best.abs());
        FacetDistance { d: best, facet, tie }
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.distance(x).d > 0.0
    }

    /// Whether facet i has a nontrivial face: some y with ⟨y, u_i⟩ = 0 and ⟨y, u_j⟩ > 0 for j ≠ i.
    pub fn facet_is_active(&self, i: usize, y: &[f64]) -> bool {
        self.normals.iter().enumerate().all(|(j, u)| j == i || dot(u, y) > 0.0)
    }
}

/// Free-function form of [`ConeDomain::distance`]: (d, active facet, tie flag).
pub fn cone_distance(cone: &ConeDomain, x: &[f64]) -> (f64, usize, bool) {
    let f = cone.distance(x);
    (f.d, f.facet, f.tie)
}

/// Moves a point lying on a facet tie by 1e−10·|x| along u_second − u_best.
pub fn jitter_tie(cone: &ConeDomain, x: &[f64]) -> Vec<f64> {
    let fd = cone.distance(x);
    if !fd.tie {
        return x.to_vec();
    }
    let best = &cone.normals[fd.facet];
    let second = cone
        .normals
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != fd.facet)
        .min_by(|a, b| dot(a.1, x).partial_cmp(&dot(b.1, x)).unwrap())
        .map(|(_, u)| u)
        .expect("a tie needs two facets");
    let dir: Vec<f64> = second.iter().zip(best).map(|(a, b)| a - b).collect();
    let len = norm(&dir);
    if len == 0.0 {
        return x.to_vec();
    }
    let step = 1e-10 * norm(x) / len;
    x.iter().zip(&dir).map(|(v, d)| v + step * d).collect()
}

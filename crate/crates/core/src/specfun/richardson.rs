//! Richardson extrapolation on geometric sample sequences.

/// Extrapolated value with an error estimate taken from the last two diagonal entries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolation {
    pub value: f64,
    pub error: f64,
}

/// Extrapolates `samples[k] = A(h0·ratio^k)` to h = 0, assuming
/// A(h) = A + Σ c_j h^{exps[j]}.
///
/// The diagonal with the smallest change from its predecessor is returned,
/// which stops the elimination once round-off dominates.
pub fn extrapolate(samples: &[f64], ratio: f64, exps: &[f64]) -> Extrapolation {
    let n = samples.len();
    if n == 0 {
        return Extrapolation { value: f64::NAN, error: f64::INFINITY };
    }
    if n == 1 {
        return Extrapolation { value: samples[0], error: f64::INFINITY };
    }
    let mut table: Vec<Vec<f64>> = vec![samples.to_vec()];
    for j in 0..(n - 1).min(exps.len()) {
        let f = ratio.powf(exps[j]);
        let prev = &table[j];
        let next: Vec<f64> = (1..prev.len()).map(|k| (prev[k] - f * prev[k - 1]) / (1.0 - f)).collect();
        table.push(next);
    }
    // best[j] is the most refined entry of column j.
    let best: Vec<f64> = table.iter().map(|col| *col.last().unwrap()).collect();
    let mut out = Extrapolation { value: best[0], error: (samples[n - 1] - samples[n - 2]).abs() };
    for j in 1..best.len() {
        let col = &table[j];
        let err = if col.len() >= 2 {
            (col[col.len() - 1] - col[col.len() - 2]).abs()
        } else {
            (best[j] - best[j - 1]).abs()
        };
        if err < out.error {
            out = Extrapolation { value: best[j], error: err };
        }
    }
    out
}

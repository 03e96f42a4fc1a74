use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::maps::EchelonClass;
use crate::quadrature::gauss_legendre_on;
use crate::{Error, Result};

/// Tensor Gauss-Legendre rule on `{t1 >= t2 >= .. >= t_{k+1} >= 0}` in collapsed coordinates.
///
/// Nodes are `(t2, .., t_{k+1})`; `t_{j+1} = t_j u_j` with `u_j` Gauss points on `[0, 1]`.
pub fn simplex_rule(k: usize, t1: f64, n: usize) -> Vec<(Vec<f64>, f64)> {
    let (u, w) = gauss_legendre_on(n, 0.0, 1.0);
    let mut out = vec![(Vec::with_capacity(k), 1.0)];
    for _ in 0..k {
        let mut next = Vec::with_capacity(out.len() * n);
        for (ts, wt) in &out {
            let prev = ts.last().copied().unwrap_or(t1);
            for (ui, wi) in u.iter().zip(&w) {
                let mut t = ts.clone();
                t.push(prev * ui);
                next.push((t, wt * wi * prev));
            }
        }
        out = next;
    }
    out
}

/// Volume of the ordered simplex in `[0, t1]^k`.
pub fn simplex_volume(k: usize, t1: f64) -> f64 {
    (1..=k).fold(t1.powi(k as i32), |v, i| v / i as f64)
}

/// Time vector of the representative carrying a member's times `t2..t_{k+1}`.
pub fn relabel_times(perm: &[usize], times: &[f64]) -> Vec<f64> {
    let mut s = vec![0.0; times.len()];
    for (j, &p) in perm.iter().enumerate() {
        s[p - 2] = times[j];
    }
    s
}

/// Whether `s` (the representative's `t2..t_{k+1}`) lies in the image of a member's simplex.
pub fn in_member_image(perm: &[usize], t1: f64, s: &[f64]) -> bool {
    // member's t_j sits at s[perm[j-2]-2]; the member's times must decrease in j
    let mut prev = t1;
    for &p in perm {
        let t = s[p - 2];
        if t > prev {
            return false;
        }
        prev = t;
    }
    prev >= 0.0
}

/// Monte Carlo realisation of the time domain `T(mu)` of a board-game class.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeDomainSample {
    /// Uniform points of `[0, t1]^k`, as the representative's `t2..t_{k+1}`.
    pub points: Vec<Vec<f64>>,
    /// `|[0,t1]^k| / n` inside `T(mu)`, zero outside.
    pub weights: Vec<f64>,
    pub volume: f64,
    pub std_error: f64,
    /// `members * t1^k / k!`
    pub exact_volume: f64,
    /// Some point lies in more than one member image.
    pub overlap: bool,
}

impl TimeDomainSample {
    pub fn within_3_sigma(&self) -> bool {
        (self.volume - self.exact_volume).abs() <= 3.0 * self.std_error.max(f64::EPSILON)
    }
}

/// Sample `T(mu)` as the union of the member simplices mapped into the representative's times.
pub fn time_domain_sample(class: &EchelonClass, t1: f64, n_points: usize, seed: u64) -> Result<TimeDomainSample> {
    if n_points < 1000 {
        return Err(Error::Config("time-domain sampling needs at least 1000 points".into()));
    }
    if !(t1.is_finite() && t1 >= 0.0) {
        return Err(Error::Config(format!("t1 = {t1} must be finite and >= 0")));
    }
    let k = class.k();
    let cube = t1.powi(k as i32);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = Vec::with_capacity(n_points);
    let mut weights = Vec::with_capacity(n_points);
    let mut overlap = false;
    let mut hits = 0usize;
    for _ in 0..n_points {
        let s: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * t1).collect();
        let count = class
            .time_permutations
            .iter()
            .filter(|p| in_member_image(p, t1, &s))
            .count();
        overlap |= count > 1;
        let inside = count > 0;
        hits += inside as usize;
        weights.push(if inside { cube / n_points as f64 } else { 0.0 });
        points.push(s);
    }
    let p = hits as f64 / n_points as f64;
    Ok(TimeDomainSample {
        points,
        weights,
        volume: p * cube,
        std_error: cube * (p * (1.0 - p) / n_points as f64).sqrt(),
        exact_volume: class.size() as f64 * simplex_volume(k, t1),
        overlap,
    })
}

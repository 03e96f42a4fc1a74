use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::expand::{eval_j_direct, Collider};
use super::maps::{enumerate_collapse_maps, km_classes};
use super::time::{in_member_image, simplex_volume};
use crate::spectral_core::{propagate, PhaseField, Repr};
use crate::{Result, C64};

/// Monte Carlo comparison of the two sides of the board-game identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoardGameReport {
    pub k: usize,
    pub t1: f64,
    pub n_points: usize,
    pub seed: u64,
    pub n_maps: usize,
    pub n_classes: usize,
    /// `|sum over all maps of the simplex integrals|`
    pub lhs_norm: f64,
    /// `|sum over classes of the T(mu) integrals|`
    pub rhs_norm: f64,
    pub diff_norm: f64,
    /// Standard error of the matched difference estimator.
    pub sigma: f64,
    pub passed: bool,
}

/// `sum_mu int_simplex J_mu = sum_classes int_{T(mu)} J_rep`, both sides estimated on one point set.
///
/// The input is the freely evolving state `f^{(k+1)}(t) = U(t) f^{(x)(k+1)}`,
/// for which relabelling the times of a member reproduces the representative exactly.
pub fn board_game_identity(
    f: &PhaseField,
    k: usize,
    t1: f64,
    n_points: usize,
    seed: u64,
    op: &Collider,
) -> Result<BoardGameReport> {
    let maps = enumerate_collapse_maps(k)?;
    let classes = km_classes(k)?;
    let f = f.to(Repr::XXi);
    let cube = t1.powi(k as i32);
    let simplex = simplex_volume(k, t1);
    let grid = *f.grid();
    let len = grid.len();
    let cell = f.cell_measure();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut sum_l = vec![C64::new(0.0, 0.0); len];
    let mut sum_r = vec![C64::new(0.0, 0.0); len];
    let mut sum_sq = 0.0;
    let mut sum_d = vec![C64::new(0.0, 0.0); len];
    let at = |times: &[f64], mu| -> Result<PhaseField> {
        let leaf = propagate(&f, times[k - 1]);
        eval_j_direct(mu, &leaf, t1, times, op)
    };
    for _ in 0..n_points {
        let s: Vec<f64> = (0..k).map(|_| rng.random::<f64>() * t1).collect();
        let mut sorted = s.clone();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let mut x = vec![C64::new(0.0, 0.0); len];
        for mu in &maps {
            let j = at(&sorted, mu)?;
            for (a, b) in x.iter_mut().zip(j.data()) {
                *a += b * simplex;
            }
        }
        let mut y = vec![C64::new(0.0, 0.0); len];
        for c in &classes {
            if c.time_permutations.iter().any(|p| in_member_image(p, t1, &s)) {
                let j = at(&s, &c.representative)?;
                for (a, b) in y.iter_mut().zip(j.data()) {
                    *a += b * cube;
                }
            }
        }
        for i in 0..len {
            let dlt = x[i] - y[i];
            sum_l[i] += x[i];
            sum_r[i] += y[i];
            sum_d[i] += dlt;
            sum_sq += dlt.norm_sqr();
        }
    }
    let n = n_points as f64;
    let norm = |v: &[C64]| (v.iter().map(|z| z.norm_sqr()).sum::<f64>() * cell).sqrt() / n;
    let mean_sq = sum_d.iter().map(|z| z.norm_sqr()).sum::<f64>() / (n * n);
    // sample variance summed over components, then the variance of the mean
    let var = (sum_sq / n - mean_sq).max(0.0) * n / (n - 1.0).max(1.0);
    let sigma = (var * cell / n).sqrt();
    let diff_norm = norm(&sum_d);
    Ok(BoardGameReport {
        k,
        t1,
        n_points,
        seed,
        n_maps: maps.len(),
        n_classes: classes.len(),
        lhs_norm: norm(&sum_l),
        rhs_norm: norm(&sum_r),
        diff_norm,
        sigma,
        passed: diff_norm <= 3.0 * sigma + 1e-12 * norm(&sum_l),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::{CollisionKernelSpec, Route};
    use crate::solver::{maxwellian, perturbed_maxwellian};
    use crate::spectral_core::SpectralGrid;

    #[test]
    fn identity_holds_for_small_depths() {
        let g = SpectralGrid::torus(2, 4, 8, 5.0).unwrap();
        let f = perturbed_maxwellian(g, 0.4).axpy(C64::new(0.5, 0.0), &maxwellian(g, 0.5, &[1.2, -0.5], 0.6));
        let spec = CollisionKernelSpec {
            n_sphere: 12,
            ..Default::default()
        };
        let op = Collider::new(spec, Route::Bobylev);
        for k in 1..=2 {
            let r = board_game_identity(&f, k, 0.5, 40, 3, &op).unwrap();
            assert!(r.passed, "{r:?}");
            assert!(r.lhs_norm > 0.0);
            assert_eq!(r.n_classes, if k == 1 { 1 } else { 2 });
        }
    }
}

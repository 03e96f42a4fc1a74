//! Initial data: Maxwellians, perturbed Maxwellians and band-limited random fields.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::spectral_core::{sobolev_norm, PhaseField, SpectralGrid};
use crate::{Error, Result, C64};

/// `rho (2 pi T)^{-d/2} exp(-|v - u|^2 / 2T)`, uniform in `x`.
pub fn maxwellian(grid: SpectralGrid, rho: f64, u: &[f64], temp: f64) -> PhaseField {
    let d = grid.d;
    let c = rho * (2.0 * PI * temp).powf(-(d as f64) / 2.0);
    PhaseField::from_velocity_fn(grid, |v| {
        let w: f64 = (0..d).map(|a| (v[a] - u.get(a).copied().unwrap_or(0.0)).powi(2)).sum();
        C64::new(c * (-w / (2.0 * temp)).exp(), 0.0)
    })
}

/// `(1 + amp cos(x_1)) M(v)` for the unit Maxwellian `M`.
pub fn perturbed_maxwellian(grid: SpectralGrid, amp: f64) -> PhaseField {
    let m = maxwellian(grid, 1.0, &[], 1.0);
    let mut out = m.clone();
    for ix in 0..grid.n_x() {
        let x1 = grid.x_coord(grid.x_multi(ix)[0]);
        let s = 1.0 + amp * x1.cos();
        for (o, z) in out.slice_mut(ix).iter_mut().zip(m.slice(ix)) {
            *o = z * s;
        }
    }
    out
}

/// Real random field with spatial modes `|k_a| <= kx` and Gaussian-times-polynomial
/// velocity profiles, scaled so that `|f|_{H^s_x L^{2,r}_v} = norm`.
pub fn random_band_limited(grid: SpectralGrid, seed: u64, kx: usize, s: f64, r: f64, norm: f64) -> Result<PhaseField> {
    if 2 * kx >= grid.nx {
        return Err(Error::Config(format!(
            "mode bound {kx} not resolved by nx = {}",
            grid.nx
        )));
    }
    let d = grid.d;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_modes = (2 * kx + 1).pow(d as u32);
    let terms: Vec<(Vec<i64>, [f64; 2], Vec<f64>, f64)> = (0..n_modes)
        .map(|i| {
            let mut k = Vec::with_capacity(d);
            let mut rest = i;
            for _ in 0..d {
                k.push((rest % (2 * kx + 1)) as i64 - kx as i64);
                rest /= 2 * kx + 1;
            }
            let amp = [rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)];
            let shift: Vec<f64> = (0..d).map(|_| rng.random_range(-0.5..0.5)).collect();
            let width = rng.random_range(0.7..1.3);
            (k, amp, shift, width)
        })
        .collect();
    let dk = grid.dk();
    let f = PhaseField::from_xv_fn(grid, |x, v| {
        let mut acc = 0.0;
        for (k, amp, shift, width) in &terms {
            let ph: f64 = k.iter().zip(x).map(|(k, x)| *k as f64 * dk * x).sum();
            let w: f64 = v.iter().zip(shift).map(|(v, c)| (v - c) * (v - c)).sum();
            acc += (amp[0] * ph.cos() + amp[1] * ph.sin()) * (-w / (2.0 * width * width)).exp();
        }
        C64::new(acc, 0.0)
    });
    let n = sobolev_norm(&f, s, r);
    if n == 0.0 {
        return Err(Error::Config("random field vanished".into()));
    }
    Ok(f.scaled(C64::new(norm / n, 0.0)))
}

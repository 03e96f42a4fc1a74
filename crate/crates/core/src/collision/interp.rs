//! Off-grid evaluation of velocity slices.
//!
//! A velocity slice is read as its trigonometric interpolant (or its multilinear
//! interpolant) cut off outside the box `[-v_max, v_max)^d`. On the Fourier side
//! the same function is evaluated through the sinc series of its samples.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::spectral_core::fft::fft_axis;
use crate::spectral_core::{fft_index, SpectralGrid};
use crate::C64;

/// Interpolation used to read velocity samples between grid points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Interp {
    /// Trigonometric interpolation, exact for band-limited slices.
    #[default]
    Trigonometric,
    /// Multilinear interpolation; preserves the support of the samples.
    Multilinear,
}

fn signs(n: usize) -> Vec<f64> {
    (0..n)
        .map(|i| if fft_index(i, n).rem_euclid(2) == 1 { -1.0 } else { 1.0 })
        .collect()
}

/// Unitary transform of one velocity slice (samples to FFT-ordered coefficients).
pub(crate) fn slice_forward(grid: &SpectralGrid, data: &mut [C64]) {
    let shape = vec![grid.nv; grid.d];
    let c = grid.dv() / (2.0 * PI).sqrt();
    let post: Vec<f64> = signs(grid.nv).iter().map(|s| s * c).collect();
    for axis in 0..grid.d {
        fft_axis(data, &shape, axis, false, None, &post);
    }
}

/// Inverse of [`slice_forward`].
pub(crate) fn slice_inverse(grid: &SpectralGrid, data: &mut [C64]) {
    let shape = vec![grid.nv; grid.d];
    let c = grid.dxi() / (2.0 * PI).sqrt();
    let pre = signs(grid.nv);
    let post = vec![c; grid.nv];
    for axis in 0..grid.d {
        fft_axis(data, &shape, axis, true, Some(&pre), &post);
    }
}

/// Radius of the smallest origin-centred ball holding every sample above `tol * max`,
/// padded by one cell diagonal and capped at the box corner.
pub(crate) fn support_radius(grid: &SpectralGrid, samples: &[C64], tol: f64) -> Option<f64> {
    let mx = samples.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if mx == 0.0 {
        return None;
    }
    let mut r2 = 0.0f64;
    for (j, z) in samples.iter().enumerate() {
        if z.norm() > tol * mx {
            let idx = grid.v_multi(j);
            let s: f64 = (0..grid.d).map(|k| grid.v_coord(idx[k]).powi(2)).sum();
            r2 = r2.max(s);
        }
    }
    let df = grid.d as f64;
    Some((r2.sqrt() + df.sqrt() * grid.dv()).min(df.sqrt() * grid.v_max))
}

/// Produces `P(v_j + a)` for every grid velocity `v_j`, zero where `v_j + a` leaves the box.
pub(crate) struct SliceShifter {
    grid: SpectralGrid,
    kind: Interp,
    /// Coefficients (trigonometric) or samples (multilinear).
    base: Vec<C64>,
}

impl SliceShifter {
    pub fn new(grid: &SpectralGrid, samples: &[C64], kind: Interp) -> Self {
        let mut base = samples.to_vec();
        if kind == Interp::Trigonometric {
            slice_forward(grid, &mut base);
        }
        SliceShifter {
            grid: *grid,
            kind,
            base,
        }
    }

    /// Per-axis admissible index range `[lo, hi)` for a shift `a`.
    fn window(&self, a: f64) -> (usize, usize) {
        let g = &self.grid;
        let dv = g.dv();
        // v_j + a in [-v_max, v_max)  <=>  j in [-a/dv, nv - a/dv)
        let lo = (-a / dv - 1e-12).ceil().max(0.0);
        let hi = ((g.nv as f64) - a / dv - 1e-12).ceil().clamp(0.0, g.nv as f64);
        (lo.min(g.nv as f64) as usize, hi as usize)
    }

    pub fn shifted(&self, a: &[f64; 3], out: &mut [C64]) {
        let g = &self.grid;
        let (d, nv) = (g.d, g.nv);
        let mut win = [(0usize, nv); 3];
        for k in 0..d {
            win[k] = self.window(a[k]);
            if win[k].0 >= win[k].1 {
                out.iter_mut().for_each(|z| *z = C64::new(0.0, 0.0));
                return;
            }
        }
        match self.kind {
            Interp::Trigonometric => {
                let dxi = g.dxi();
                let mut ph = [vec![C64::new(0.0, 0.0); nv], vec![], vec![]];
                for k in 0..d {
                    let mut p = vec![C64::new(0.0, 0.0); nv];
                    let z = C64::from_polar(1.0, a[k] * dxi);
                    let mut acc = C64::new(1.0, 0.0);
                    for m in 0..nv / 2 {
                        p[m] = acc;
                        if m > 0 {
                            p[nv - m] = acc.conj();
                        }
                        acc *= z;
                    }
                    // the Nyquist term is read as c cos(xi_N v), which keeps real slices real
                    p[nv / 2] = C64::new(acc.re, 0.0);
                    ph[k] = p;
                }
                for (i, o) in out.iter_mut().enumerate() {
                    let idx = g.v_multi(i);
                    let mut w = ph[0][idx[0]];
                    for k in 1..d {
                        w *= ph[k][idx[k]];
                    }
                    *o = self.base[i] * w;
                }
                slice_inverse(g, out);
            }
            Interp::Multilinear => {
                out.copy_from_slice(&self.base);
                let shape = vec![nv; d];
                let mut line = vec![C64::new(0.0, 0.0); nv];
                for k in 0..d {
                    let s = a[k] / g.dv();
                    let o = s.floor();
                    let t = s - o;
                    let o = o as i64;
                    let inner: usize = shape[k + 1..].iter().product();
                    let outer: usize = shape[..k].iter().product();
                    for ob in 0..outer {
                        for ib in 0..inner {
                            let at = |j: usize| ob * nv * inner + j * inner + ib;
                            for j in 0..nv {
                                let j0 = (j as i64 + o).rem_euclid(nv as i64) as usize;
                                let j1 = (j0 + 1) % nv;
                                line[j] = out[at(j0)] * (1.0 - t) + out[at(j1)] * t;
                            }
                            for j in 0..nv {
                                out[at(j)] = line[j];
                            }
                        }
                    }
                }
            }
        }
        for (i, o) in out.iter_mut().enumerate() {
            let idx = g.v_multi(i);
            if (0..d).any(|k| idx[k] < win[k].0 || idx[k] >= win[k].1) {
                *o = C64::new(0.0, 0.0);
            }
        }
    }
}

/// `sinc(v_max (p - xi_m))` for every storage slot `m` of one axis.
pub(crate) fn sinc_weights(grid: &SpectralGrid, p: f64, out: &mut [f64]) {
    let a = grid.v_max;
    let s = (a * p).sin();
    let sinc = |m: i64| {
        let x = a * p - m as f64 * PI;
        if x.abs() < 1e-4 {
            let x2 = x * x;
            1.0 - x2 / 6.0 + x2 * x2 / 120.0
        } else if m.rem_euclid(2) == 1 {
            -s / x
        } else {
            s / x
        }
    };
    let nyq = (grid.nv / 2) as i64;
    for (i, o) in out.iter_mut().enumerate() {
        let m = fft_index(i, grid.nv);
        // Nyquist coefficient split evenly between +xi_N and -xi_N
        *o = if m == -nyq {
            0.5 * (sinc(m) + sinc(nyq))
        } else {
            sinc(m)
        };
    }
}

/// Fourier-side evaluator of a velocity slice given by its coefficients.
pub(crate) struct SincEval {
    pub grid: SpectralGrid,
    pub coef: Vec<C64>,
    /// Per-axis half-width of the coefficient support, padded.
    pub extent: f64,
}

impl SincEval {
    pub fn new(grid: &SpectralGrid, coef: &[C64], tol: f64, margin: f64) -> Option<Self> {
        let mx = coef.iter().map(|z| z.norm()).fold(0.0, f64::max);
        if mx == 0.0 {
            return None;
        }
        let mut e = 0.0f64;
        for (i, z) in coef.iter().enumerate() {
            if z.norm() > tol * mx {
                let idx = grid.v_multi(i);
                for k in 0..grid.d {
                    e = e.max(grid.xi_coord(idx[k]).abs());
                }
            }
        }
        Some(SincEval {
            grid: *grid,
            coef: coef.to_vec(),
            extent: e + margin * grid.dxi(),
        })
    }

    pub fn eval(&self, p: &[f64; 3]) -> C64 {
        let g = &self.grid;
        let nv = g.nv;
        let mut w = [[0.0f64; 64]; 3];
        for k in 0..g.d {
            sinc_weights(g, p[k], &mut w[k][..nv]);
        }
        contract(g.d, nv, &self.coef, &w)
    }
}

/// `sum_m c_m prod_k w_k[m_k]` over a row-major `nv^d` block.
pub(crate) fn contract(d: usize, nv: usize, c: &[C64], w: &[[f64; 64]; 3]) -> C64 {
    match d {
        1 => c.iter().zip(&w[0][..nv]).map(|(c, w)| c * w).sum(),
        2 => {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..nv {
                let row = &c[i * nv..(i + 1) * nv];
                let mut r = C64::new(0.0, 0.0);
                for j in 0..nv {
                    r += row[j] * w[1][j];
                }
                acc += r * w[0][i];
            }
            acc
        }
        _ => {
            let mut acc = C64::new(0.0, 0.0);
            for i in 0..nv {
                let mut r2 = C64::new(0.0, 0.0);
                for j in 0..nv {
                    let row = &c[(i * nv + j) * nv..(i * nv + j + 1) * nv];
                    let mut r = C64::new(0.0, 0.0);
                    for l in 0..nv {
                        r += row[l] * w[2][l];
                    }
                    r2 += r * w[1][j];
                }
                acc += r2 * w[0][i];
            }
            acc
        }
    }
}

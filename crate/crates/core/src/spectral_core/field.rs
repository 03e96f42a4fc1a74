use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::fft::fft_axis;
use super::grid::{fft_index, SpectralGrid};
use crate::{Error, Result, C64};

/// Spectral representation of a phase-space field.
#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Repr {
    /// Physical `x`, physical `v`.
    XV,
    /// Physical `x`, Fourier variable `xi` of `v`.
    XXi,
    /// Fourier variable `k` of `x`, physical `v`.
    KV,
}

/// Complex function of one particle's phase-space variables.
///
/// Data are row-major over `[x or k axes][v or xi axes]`; Fourier axes are in
/// FFT order. The velocity transform is
/// `f~(xi) = (2 pi)^{-d/2} dv^d sum_j f(v_j) e^{-i v_j . xi}`, and the spatial one
/// uses the same normalisation with `dx`, so every transform preserves the
/// discrete L2 norm with constant 1.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseField {
    grid: SpectralGrid,
    repr: Repr,
    data: Vec<C64>,
}

impl PhaseField {
    pub fn zeros(grid: SpectralGrid, repr: Repr) -> Self {
        Self {
            grid,
            repr,
            data: vec![C64::new(0.0, 0.0); grid.len()],
        }
    }

    pub fn from_data(grid: SpectralGrid, repr: Repr, data: Vec<C64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::Config(format!(
                "data length {} does not match grid size {}",
                data.len(),
                grid.len()
            )));
        }
        Ok(Self { grid, repr, data })
    }

    /// Sample `f(x, v)` on the physical grid.
    pub fn from_xv_fn<F>(grid: SpectralGrid, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> C64,
    {
        let d = grid.d;
        let mut data = Vec::with_capacity(grid.len());
        let mut x = [0.0; 3];
        let mut v = [0.0; 3];
        for ix in 0..grid.n_x() {
            let mi = grid.x_multi(ix);
            for a in 0..d {
                x[a] = grid.x_coord(mi[a]);
            }
            for iv in 0..grid.n_v() {
                let mj = grid.v_multi(iv);
                for a in 0..d {
                    v[a] = grid.v_coord(mj[a]);
                }
                data.push(f(&x[..d], &v[..d]));
            }
        }
        Self {
            grid,
            repr: Repr::XV,
            data,
        }
    }

    /// Spatially homogeneous field `f(x, v) = g(v)`.
    pub fn from_velocity_fn<F>(grid: SpectralGrid, g: F) -> Self
    where
        F: Fn(&[f64]) -> C64,
    {
        Self::from_xv_fn(grid, |_, v| g(v))
    }

    /// Fill a field from a function of its current-representation coordinates.
    ///
    /// The closure receives the first-factor coordinates (`x` or `k`) and the
    /// second-factor coordinates (`v` or `xi`).
    pub fn from_coord_fn<F>(grid: SpectralGrid, repr: Repr, f: F) -> Self
    where
        F: Fn(&[f64], &[f64]) -> C64,
    {
        let d = grid.d;
        let mut data = Vec::with_capacity(grid.len());
        let mut a_c = [0.0; 3];
        let mut b_c = [0.0; 3];
        for ix in 0..grid.n_x() {
            let mi = grid.x_multi(ix);
            for a in 0..d {
                a_c[a] = match repr {
                    Repr::KV => grid.k_coord(mi[a]),
                    _ => grid.x_coord(mi[a]),
                };
            }
            for iv in 0..grid.n_v() {
                let mj = grid.v_multi(iv);
                for a in 0..d {
                    b_c[a] = match repr {
                        Repr::XXi => grid.xi_coord(mj[a]),
                        _ => grid.v_coord(mj[a]),
                    };
                }
                data.push(f(&a_c[..d], &b_c[..d]));
            }
        }
        Self { grid, repr, data }
    }

    pub fn grid(&self) -> &SpectralGrid {
        &self.grid
    }

    pub fn repr(&self) -> Repr {
        self.repr
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    /// Contiguous velocity (or xi) slice at spatial (or wavenumber) cell `ix`.
    pub fn slice(&self, ix: usize) -> &[C64] {
        let nv = self.grid.n_v();
        &self.data[ix * nv..(ix + 1) * nv]
    }

    pub fn slice_mut(&mut self, ix: usize) -> &mut [C64] {
        let nv = self.grid.n_v();
        &mut self.data[ix * nv..(ix + 1) * nv]
    }

    /// Convert to another representation.
    pub fn to(&self, target: Repr) -> PhaseField {
        transform(self, target)
    }

    pub(crate) fn check_compatible(&self, other: &PhaseField) -> Result<()> {
        if !self.grid.same_as(&other.grid) {
            return Err(Error::Config("fields live on different grids".into()));
        }
        Ok(())
    }

    /// Cell measure of the current representation.
    pub fn cell_measure(&self) -> f64 {
        let g = &self.grid;
        let d = g.d as i32;
        match self.repr {
            Repr::XV => (g.dx() * g.dv()).powi(d),
            Repr::XXi => (g.dx() * g.dxi()).powi(d),
            Repr::KV => (g.dk() * g.dv()).powi(d),
        }
    }

    /// Discrete L2 norm in the current representation.
    pub fn l2_norm(&self) -> f64 {
        (self.data.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.cell_measure()).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest pointwise difference after bringing `other` into this representation.
    pub fn max_abs_diff(&self, other: &PhaseField) -> f64 {
        let o = other.to(self.repr);
        self.data
            .iter()
            .zip(&o.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// Relative L2 distance `|self - other| / |other|` (absolute when `other` is zero).
    pub fn rel_l2_diff(&self, other: &PhaseField) -> f64 {
        let o = other.to(self.repr);
        let num: f64 = self.data.iter().zip(&o.data).map(|(a, b)| (a - b).norm_sqr()).sum();
        let den: f64 = o.data.iter().map(|b| b.norm_sqr()).sum();
        if den == 0.0 {
            num.sqrt()
        } else {
            (num / den).sqrt()
        }
    }

    pub fn scaled(&self, c: C64) -> PhaseField {
        let mut out = self.clone();
        out.data.iter_mut().for_each(|z| *z *= c);
        out
    }

    /// `self + c * other`, computed in this field's representation.
    pub fn axpy(&self, c: C64, other: &PhaseField) -> PhaseField {
        let o = other.to(self.repr);
        let mut out = self.clone();
        out.data.iter_mut().zip(&o.data).for_each(|(a, b)| *a += c * b);
        out
    }

    pub fn add(&self, other: &PhaseField) -> PhaseField {
        self.axpy(C64::new(1.0, 0.0), other)
    }

    pub fn sub(&self, other: &PhaseField) -> PhaseField {
        self.axpy(C64::new(-1.0, 0.0), other)
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|z| z.re.is_finite() && z.im.is_finite())
    }

    /// Multiply every entry by `m(first, second)` where the arguments are the
    /// coordinates of the current representation.
    pub(crate) fn multiply_by<F>(&mut self, m: F)
    where
        F: Fn(&[f64], &[f64]) -> C64,
    {
        let g = self.grid;
        let d = g.d;
        let first: Vec<[f64; 3]> = (0..g.n_x())
            .map(|ix| {
                let mi = g.x_multi(ix);
                let mut c = [0.0; 3];
                for a in 0..d {
                    c[a] = match self.repr {
                        Repr::KV => g.k_coord(mi[a]),
                        _ => g.x_coord(mi[a]),
                    };
                }
                c
            })
            .collect();
        let second: Vec<[f64; 3]> = (0..g.n_v())
            .map(|iv| {
                let mj = g.v_multi(iv);
                let mut c = [0.0; 3];
                for a in 0..d {
                    c[a] = match self.repr {
                        Repr::XXi => g.xi_coord(mj[a]),
                        _ => g.v_coord(mj[a]),
                    };
                }
                c
            })
            .collect();
        let nv = g.n_v();
        for (ix, fc) in first.iter().enumerate() {
            for (iv, sc) in second.iter().enumerate() {
                self.data[ix * nv + iv] *= m(&fc[..d], &sc[..d]);
            }
        }
    }
}

fn signs(n: usize, centered: bool) -> Vec<f64> {
    (0..n)
        .map(|m| {
            if centered && fft_index(m, n).rem_euclid(2) == 1 {
                -1.0
            } else {
                1.0
            }
        })
        .collect()
}

fn apply_v(field: &mut PhaseField, forward: bool) {
    let g = field.grid;
    let shape = g.shape();
    let s = signs(g.nv, true);
    let c = if forward { g.dv() } else { g.dxi() } / (2.0 * PI).sqrt();
    for axis in g.d..2 * g.d {
        if forward {
            let post: Vec<f64> = s.iter().map(|x| x * c).collect();
            fft_axis(&mut field.data, &shape, axis, false, None, &post);
        } else {
            let post = vec![c; g.nv];
            fft_axis(&mut field.data, &shape, axis, true, Some(&s), &post);
        }
    }
}

fn apply_x(field: &mut PhaseField, forward: bool) {
    let g = field.grid;
    let shape = g.shape();
    let s = signs(g.nx, g.x_centered());
    let c = if forward { g.dx() } else { g.dk() } / (2.0 * PI).sqrt();
    for axis in 0..g.d {
        if forward {
            let post: Vec<f64> = s.iter().map(|x| x * c).collect();
            fft_axis(&mut field.data, &shape, axis, false, None, &post);
        } else {
            let post = vec![c; g.nx];
            fft_axis(&mut field.data, &shape, axis, true, Some(&s), &post);
        }
    }
}

/// Return `field` in the `target` representation.
pub fn transform(field: &PhaseField, target: Repr) -> PhaseField {
    let mut out = field.clone();
    match (field.repr, target) {
        (a, b) if a == b => {}
        (Repr::XV, Repr::XXi) => apply_v(&mut out, true),
        (Repr::XXi, Repr::XV) => apply_v(&mut out, false),
        (Repr::XV, Repr::KV) => apply_x(&mut out, true),
        (Repr::KV, Repr::XV) => apply_x(&mut out, false),
        (Repr::XXi, Repr::KV) => {
            apply_v(&mut out, false);
            apply_x(&mut out, true);
        }
        (Repr::KV, Repr::XXi) => {
            apply_x(&mut out, false);
            apply_v(&mut out, true);
        }
        _ => unreachable!(),
    }
    out.repr = target;
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::DomainKind;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(2, 8, 16, 4.0, DomainKind::TorusBox).unwrap()
    }

    fn sample() -> PhaseField {
        PhaseField::from_xv_fn(grid(), |x, v| {
            let g = (-(v[0] * v[0] + v[1] * v[1]) / 2.0).exp();
            C64::new(g * (1.0 + 0.3 * x[0].cos()), 0.2 * g * (2.0 * x[1]).sin() * v[0])
        })
    }

    #[test]
    fn zero_field_stays_zero() {
        let z = PhaseField::zeros(grid(), Repr::XV);
        for r in [Repr::XXi, Repr::KV] {
            assert_eq!(z.to(r).max_abs(), 0.0);
        }
    }

    #[test]
    fn roundtrips_are_identity() {
        let f = sample();
        for r in [Repr::XXi, Repr::KV] {
            let back = f.to(r).to(Repr::XV);
            assert!(back.rel_l2_diff(&f) < 1e-13);
            let other = if r == Repr::XXi { Repr::KV } else { Repr::XXi };
            let via = f.to(r).to(other).to(Repr::XV);
            assert!(via.rel_l2_diff(&f) < 1e-13);
        }
    }

    #[test]
    fn parseval_constant_is_one() {
        let f = sample();
        let n = f.l2_norm();
        for r in [Repr::XXi, Repr::KV] {
            assert!((f.to(r).l2_norm() - n).abs() < 1e-12 * n);
        }
    }

    #[test]
    fn exponential_maps_to_delta() {
        let g = grid();
        let m0 = [3usize, 14usize];
        let xi0 = [g.xi_coord(m0[0]), g.xi_coord(m0[1])];
        let f = PhaseField::from_velocity_fn(g, |v| C64::from_polar(1.0, v[0] * xi0[0] + v[1] * xi0[1]));
        let ft = f.to(Repr::XXi);
        let peak = (2.0 * PI).powi(-1) * (g.dv() * g.nv as f64).powi(2);
        for ix in 0..g.n_x() {
            let s = ft.slice(ix);
            for (iv, z) in s.iter().enumerate() {
                let mj = g.v_multi(iv);
                let expect = if mj[0] == m0[0] && mj[1] == m0[1] { peak } else { 0.0 };
                assert!((z - C64::new(expect, 0.0)).norm() < 1e-11, "{z} vs {expect}");
            }
        }
    }

    #[test]
    fn torus_mode_is_single_wavenumber() {
        let g = grid();
        let f = PhaseField::from_xv_fn(g, |x, _| C64::from_polar(1.0, 2.0 * x[0] - x[1]));
        let fk = f.to(Repr::KV);
        let mut hits = 0;
        for ix in 0..g.n_x() {
            let mi = g.x_multi(ix);
            let big = fk.slice(ix).iter().any(|z| z.norm() > 1e-9);
            if big {
                hits += 1;
                assert_eq!((g.k_coord(mi[0]), g.k_coord(mi[1])), (2.0, -1.0));
            }
        }
        assert_eq!(hits, 1);
    }

    #[test]
    fn box_domain_roundtrip_and_parseval() {
        let g = SpectralGrid::new(1, 16, 16, 3.0, DomainKind::BoxBox).unwrap();
        let f = PhaseField::from_xv_fn(g, |x, v| C64::new((-(x[0] * x[0]) - v[0] * v[0]).exp(), 0.0));
        let k = f.to(Repr::KV);
        assert!((k.l2_norm() - f.l2_norm()).abs() < 1e-12);
        assert!(k.to(Repr::XV).rel_l2_diff(&f) < 1e-13);
    }
}

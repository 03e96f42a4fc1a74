use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Geometry of the spatial factor of phase space.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DomainKind {
    /// `T^d x R^d`: the spatial factor is the torus `[0, 2pi)^d` with integer wavenumbers.
    TorusBox,
    /// `R^d x R^d`: the spatial factor is the periodised box `[-v_max, v_max)^d`.
    BoxBox,
}

/// Discretisation of phase space.
///
/// Velocities live on `v_j = -v_max + j dv`, `dv = 2 v_max / nv`; the dual
/// variable `xi` lives on `xi_m = m dxi` with `dxi = pi / v_max` and
/// `m in [-nv/2, nv/2)`. All Fourier-side axes are stored in FFT order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpectralGrid {
    pub d: usize,
    pub nx: usize,
    pub nv: usize,
    pub v_max: f64,
    pub domain_kind: DomainKind,
}

/// Build and validate a grid.
pub fn make_grid(d: usize, nx: usize, nv: usize, v_max: f64, domain_kind: DomainKind) -> Result<SpectralGrid> {
    SpectralGrid::new(d, nx, nv, v_max, domain_kind)
}

/// Signed FFT-order frequency index of storage slot `i` on an axis of length `n`.
#[inline]
pub fn fft_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl SpectralGrid {
    pub fn new(d: usize, nx: usize, nv: usize, v_max: f64, domain_kind: DomainKind) -> Result<Self> {
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        for (name, n) in [("nx", nx), ("nv", nv)] {
            if n < 4 || !n.is_power_of_two() {
                return Err(Error::Config(format!("{name} = {n} must be a power of two >= 4")));
            }
        }
        if !(v_max.is_finite() && v_max > 0.0) {
            return Err(Error::Config(format!("v_max = {v_max} must be positive")));
        }
        Ok(Self {
            d,
            nx,
            nv,
            v_max,
            domain_kind,
        })
    }

    /// Torus grid `[0,2pi)^d x [-v_max, v_max)^d`.
    pub fn torus(d: usize, nx: usize, nv: usize, v_max: f64) -> Result<Self> {
        Self::new(d, nx, nv, v_max, DomainKind::TorusBox)
    }

    pub fn dv(&self) -> f64 {
        2.0 * self.v_max / self.nv as f64
    }

    pub fn dxi(&self) -> f64 {
        PI / self.v_max
    }

    /// Half-width of the dual grid, `nv dxi / 2`.
    pub fn xi_max(&self) -> f64 {
        self.nv as f64 * self.dxi() / 2.0
    }

    /// Length of one spatial period.
    pub fn x_len(&self) -> f64 {
        match self.domain_kind {
            DomainKind::TorusBox => 2.0 * PI,
            DomainKind::BoxBox => 2.0 * self.v_max,
        }
    }

    pub fn dx(&self) -> f64 {
        self.x_len() / self.nx as f64
    }

    /// Spacing of the spatial wavenumbers (1 on the torus).
    pub fn dk(&self) -> f64 {
        2.0 * PI / self.x_len()
    }

    fn x_origin(&self) -> f64 {
        match self.domain_kind {
            DomainKind::TorusBox => 0.0,
            DomainKind::BoxBox => -self.v_max,
        }
    }

    /// Whether the spatial axis is centred, which puts a `(-1)^m` phase on its DFT.
    pub(crate) fn x_centered(&self) -> bool {
        self.domain_kind == DomainKind::BoxBox
    }

    pub fn x_coord(&self, i: usize) -> f64 {
        self.x_origin() + i as f64 * self.dx()
    }

    pub fn v_coord(&self, j: usize) -> f64 {
        -self.v_max + j as f64 * self.dv()
    }

    /// Wavenumber stored at slot `i` of a spatial Fourier axis.
    pub fn k_coord(&self, i: usize) -> f64 {
        fft_index(i, self.nx) as f64 * self.dk()
    }

    /// Dual frequency stored at slot `m` of a velocity Fourier axis.
    pub fn xi_coord(&self, m: usize) -> f64 {
        fft_index(m, self.nv) as f64 * self.dxi()
    }

    pub fn v_points(&self) -> Vec<f64> {
        (0..self.nv).map(|j| self.v_coord(j)).collect()
    }

    pub fn x_points(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.x_coord(i)).collect()
    }

    pub fn xi_points(&self) -> Vec<f64> {
        (0..self.nv).map(|m| self.xi_coord(m)).collect()
    }

    pub fn k_points(&self) -> Vec<f64> {
        (0..self.nx).map(|i| self.k_coord(i)).collect()
    }

    /// Number of spatial cells, `nx^d`.
    pub fn n_x(&self) -> usize {
        self.nx.pow(self.d as u32)
    }

    /// Number of velocity cells, `nv^d`.
    pub fn n_v(&self) -> usize {
        self.nv.pow(self.d as u32)
    }

    pub fn len(&self) -> usize {
        self.n_x() * self.n_v()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Array shape `[nx; d] ++ [nv; d]`.
    pub fn shape(&self) -> Vec<usize> {
        let mut s = vec![self.nx; self.d];
        s.extend(std::iter::repeat_n(self.nv, self.d));
        s
    }

    /// Split a flat velocity index into per-axis indices.
    pub fn v_multi(&self, flat: usize) -> [usize; 3] {
        unflatten(flat, self.nv, self.d)
    }

    /// Split a flat spatial index into per-axis indices.
    pub fn x_multi(&self, flat: usize) -> [usize; 3] {
        unflatten(flat, self.nx, self.d)
    }

    /// Same grid with every resolution doubled and the same physical extent.
    pub fn refined(&self) -> Self {
        Self {
            nx: self.nx * 2,
            nv: self.nv * 2,
            ..*self
        }
    }

    pub(crate) fn same_as(&self, other: &SpectralGrid) -> bool {
        self.d == other.d
            && self.nx == other.nx
            && self.nv == other.nv
            && self.v_max == other.v_max
            && self.domain_kind == other.domain_kind
    }
}

pub(crate) fn unflatten(mut flat: usize, n: usize, d: usize) -> [usize; 3] {
    let mut out = [0usize; 3];
    for a in (0..d).rev() {
        out[a] = flat % n;
        flat /= n;
    }
    out
}

#[cfg(test)]
pub(crate) fn flatten(idx: &[usize], n: usize) -> usize {
    idx.iter().fold(0, |acc, &i| acc * n + i)
}

//! Browser demo: free transport of a phase-space bump, Littlewood-Paley bands
//! and the gain operator on a velocity slice.
//!
//! Every export returns a flat row-major image (`rows * cols` values, first
//! row first) that the page draws as a heat map.

use wasm_bindgen::prelude::*;

use boltzkit::collision::{q_direct, CollisionKernelSpec, Sign};
use boltzkit::spectral_core::{lp_project, propagate, DyadicLevel, PhaseField, ProjAxis, ProjMode, Repr, SpectralGrid};
use boltzkit::{Result, C64};

fn bump(grid: SpectralGrid, x0: f64, v0: f64, width: f64) -> PhaseField {
    PhaseField::from_xv_fn(grid, |x, v| {
        let dx = (x[0] - x0).sin();
        let dv = v[0] - v0;
        C64::new((-(dx * dx + dv * dv) / (2.0 * width * width)).exp(), 0.0)
    })
}

/// `nx` rows of `nv` values: `|f|` in `(x, v)`.
fn modulus(f: &PhaseField) -> Vec<f64> {
    f.to(Repr::XV).data().iter().map(|z| z.norm()).collect()
}

/// `|U(t) f|` for a Gaussian bump centred at `(x0, v0)` on a one-dimensional torus.
pub fn transport_image(nx: usize, nv: usize, v_max: f64, t: f64, x0: f64, v0: f64, width: f64) -> Result<Vec<f64>> {
    let g = SpectralGrid::torus(1, nx, nv, v_max)?;
    Ok(modulus(&propagate(&bump(g, x0, v0, width), t)))
}

/// `|P_N f|` for a sum of bumps, projected in `x` (`axis = 0`) or `xi` (`axis = 1`).
pub fn band_image(nx: usize, nv: usize, v_max: f64, level: u64, axis: u8, sharp: bool) -> Result<Vec<f64>> {
    let g = SpectralGrid::torus(1, nx, nv, v_max)?;
    let f = bump(g, 1.0, -1.0, 0.3).axpy(C64::new(1.0, 0.0), &bump(g, 4.0, 1.5, 0.8));
    let axis = if axis == 0 { ProjAxis::X } else { ProjAxis::Xi };
    let mode = if sharp {
        ProjMode::SharpAnnulus
    } else {
        ProjMode::Annulus
    };
    Ok(modulus(&lp_project(&f, axis, DyadicLevel::new(level)?, mode)?))
}

/// `nv` rows of `nv` values: `Q+(f, f)` at `x = 0` for two colliding velocity bumps in the plane.
/// Rows run over `v1`, columns over `v2`.
pub fn gain_image(nv: usize, v_max: f64, separation: f64, n_sphere: usize) -> Result<Vec<f64>> {
    let g = SpectralGrid::torus(2, 4, nv, v_max)?;
    let s = separation / 2.0;
    let f = PhaseField::from_velocity_fn(g, |v| {
        let a = (v[0] - s).powi(2) + v[1] * v[1];
        let b = (v[0] + s).powi(2) + v[1] * v[1];
        C64::new((-a / 0.5).exp() + (-b / 0.5).exp(), 0.0)
    });
    let spec = CollisionKernelSpec {
        n_sphere,
        ..Default::default()
    };
    let q = q_direct(&f, &f, &spec, Sign::Gain)?;
    let xv = q.to(Repr::XV);
    Ok(xv.data()[..g.n_v()].iter().map(|z| z.re).collect())
}

fn js<T>(r: Result<T>) -> std::result::Result<T, JsError> {
    r.map_err(|e| JsError::new(&e.to_string()))
}

#[wasm_bindgen]
pub fn transport(
    nx: usize,
    nv: usize,
    v_max: f64,
    t: f64,
    x0: f64,
    v0: f64,
    width: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    js(transport_image(nx, nv, v_max, t, x0, v0, width))
}

#[wasm_bindgen]
pub fn band(
    nx: usize,
    nv: usize,
    v_max: f64,
    level: u64,
    axis: u8,
    sharp: bool,
) -> std::result::Result<Vec<f64>, JsError> {
    js(band_image(nx, nv, v_max, level, axis, sharp))
}

#[wasm_bindgen]
pub fn gain(nv: usize, v_max: f64, separation: f64, n_sphere: usize) -> std::result::Result<Vec<f64>, JsError> {
    js(gain_image(nv, v_max, separation, n_sphere))
}

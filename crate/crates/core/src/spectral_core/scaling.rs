use std::f64::consts::PI;

use super::field::{PhaseField, Repr};
use crate::{Error, Result, C64};

/// Entries below this fraction of the field maximum are treated as outside the support.
pub const SUPPORT_TOL: f64 = 1e-13;

/// Scaling operator `(delta_a g)(x, xi) = g(x, a xi)`.
///
/// Here `g` is the trigonometric interpolant of the field in `xi`, i.e. the
/// Fourier transform of the velocity samples viewed as point masses. For
/// power-of-two `a >= 1` this maps the sample at `v_j` to the grid point
/// `a v_j` and is exact; other factors resample the dual grid with a dense
/// transform. Scaling by `a > 1` fails if the velocity support would leave the box.
pub fn scale_xi(field: &PhaseField, a: f64) -> Result<PhaseField> {
    if !(a.is_finite() && a > 0.0) {
        return Err(Error::Config(format!("scale factor {a} must be positive")));
    }
    if a == 1.0 {
        return Ok(field.clone());
    }
    let xv = field.to(Repr::XV);
    let g = *xv.grid();
    let d = g.d;
    let nv = g.nv;
    let vs = g.v_points();
    let peak = xv.max_abs();
    if a > 1.0 && peak > 0.0 {
        for ix in 0..g.n_x() {
            for (iv, z) in xv.slice(ix).iter().enumerate() {
                if z.norm() <= SUPPORT_TOL * peak {
                    continue;
                }
                let mj = g.v_multi(iv);
                for &j in &mj[..d] {
                    let w = a * vs[j];
                    if w < -g.v_max || w >= g.v_max {
                        return Err(Error::Range(format!(
                            "scaling by {a} moves velocity {} outside the box",
                            vs[j]
                        )));
                    }
                }
            }
        }
    }
    let out = if a >= 1.0 && a.fract() == 0.0 && (a as u64).is_power_of_two() {
        let ai = a as usize;
        let shift = (ai - 1) * nv / 2;
        let mut out = PhaseField::zeros(g, Repr::XV);
        for ix in 0..g.n_x() {
            let src = xv.slice(ix);
            let dst = out.slice_mut(ix);
            for (iv, z) in src.iter().enumerate() {
                let mj = g.v_multi(iv);
                let mut flat = 0usize;
                let mut inside = true;
                for &j in &mj[..d] {
                    let l = ai * j;
                    if l < shift || l - shift >= nv {
                        inside = false;
                        break;
                    }
                    flat = flat * nv + (l - shift);
                }
                if inside {
                    dst[flat] = *z;
                }
            }
        }
        out
    } else {
        dense_rescale(&xv, a)
    };
    Ok(out.to(field.repr()))
}

fn dense_rescale(xv: &PhaseField, a: f64) -> PhaseField {
    let g = *xv.grid();
    let nv = g.nv;
    let c = g.dv() / (2.0 * PI).sqrt();
    let vs = g.v_points();
    let xis = g.xi_points();
    let mat: Vec<C64> = (0..nv * nv)
        .map(|mj| {
            let (m, j) = (mj / nv, mj % nv);
            C64::from_polar(c, -a * vs[j] * xis[m])
        })
        .collect();
    let mut data = xv.data().to_vec();
    let shape = g.shape();
    let mut line = vec![C64::new(0.0, 0.0); nv];
    for axis in g.d..2 * g.d {
        let inner: usize = shape[axis + 1..].iter().product();
        let outer: usize = shape[..axis].iter().product();
        for o in 0..outer {
            for i in 0..inner {
                let base = o * nv * inner + i;
                for (j, l) in line.iter_mut().enumerate() {
                    *l = data[base + j * inner];
                }
                for m in 0..nv {
                    let row = &mat[m * nv..(m + 1) * nv];
                    data[base + m * inner] = row.iter().zip(&line).map(|(w, z)| w * z).sum();
                }
            }
        }
    }
    PhaseField::from_data(g, Repr::XXi, data).expect("shape preserved")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::SpectralGrid;

    fn compact(g: SpectralGrid, reach: f64) -> PhaseField {
        PhaseField::from_xv_fn(g, |x, v| {
            if v.iter().all(|c| c.abs() <= reach) {
                C64::new(1.0 + v[0] + x[0].sin(), v.iter().sum::<f64>().cos())
            } else {
                C64::new(0.0, 0.0)
            }
        })
    }

    #[test]
    fn unit_factor_is_identity() {
        let g = SpectralGrid::torus(1, 4, 16, 4.0).unwrap();
        let f = compact(g, 4.0);
        assert_eq!(scale_xi(&f, 1.0).unwrap(), f);
    }

    #[test]
    fn power_of_two_agrees_with_dense_resampling() {
        let g = SpectralGrid::torus(2, 4, 16, 4.0).unwrap();
        let f = compact(g, 1.5);
        let fast = scale_xi(&f, 2.0).unwrap();
        let dense = dense_rescale(&f.to(Repr::XV), 2.0).to(Repr::XV);
        assert!(fast.max_abs_diff(&dense) < 1e-12);
    }

    #[test]
    fn support_escape_is_a_range_error() {
        let g = SpectralGrid::torus(1, 4, 16, 4.0).unwrap();
        let f = compact(g, 3.0);
        assert!(matches!(scale_xi(&f, 2.0), Err(Error::Range(_))));
        assert!(scale_xi(&f, 0.0).is_err());
    }
}

//! Velocity-space evaluation of `Q+` and `Q-`.
//!
//! The relative velocity `z = u - v` is integrated in polar form. The radial
//! rule is Gauss-Jacobi in `s = |z|^2`; pairing every direction with its
//! antipode makes the angular average a smooth function of `|z|^2`, so the
//! rule converges spectrally for every admissible `gamma`. Each quadrature node
//! fixes the offsets `v* - v` and `u* - v`, so a whole velocity slice is read
//! at once by shifting its interpolant.

use std::f64::consts::PI;

use super::interp::{support_radius, Interp, SliceShifter};
use super::kernel::CollisionKernelSpec;
use super::{unique_slice_pairs, Sign};
use crate::par::map_indexed;
use crate::quadrature::{gauss_jacobi_left, gauss_legendre_on};
use crate::spectral_core::{PhaseField, Repr, SpectralGrid};
use crate::{Result, C64};

/// One direction of the relative velocity with its scattering directions.
#[derive(Debug, Clone)]
pub(crate) struct Direction {
    pub zhat: [f64; 3],
    pub weight: f64,
    /// `(omega, weight * b(zhat . omega))`
    pub omegas: Vec<([f64; 3], f64)>,
}

pub(crate) fn frame_of(z: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let a = if z[0].abs() < 0.9 {
        [1.0, 0.0, 0.0]
    } else {
        [0.0, 1.0, 0.0]
    };
    let d = a[0] * z[0] + a[1] * z[1] + a[2] * z[2];
    let mut e1 = [a[0] - d * z[0], a[1] - d * z[1], a[2] - d * z[2]];
    let n = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    e1.iter_mut().for_each(|x| *x /= n);
    let e2 = [
        z[1] * e1[2] - z[2] * e1[1],
        z[2] * e1[0] - z[0] * e1[2],
        z[0] * e1[1] - z[1] * e1[0],
    ];
    (e1, e2)
}

/// Product rule over `z`-directions and, for each, the scattering directions `omega`.
///
/// The direction set is symmetric under `zhat -> -zhat`. Only half of the
/// `omega` sphere is sampled since `v*`, `u*` depend on `omega` through
/// `(z.omega) omega`.
pub(crate) fn angular_rule(d: usize, spec: &CollisionKernelSpec) -> Vec<Direction> {
    match d {
        1 => [1.0, -1.0]
            .iter()
            .map(|&s| Direction {
                zhat: [s, 0.0, 0.0],
                weight: 1.0,
                omegas: vec![([s, 0.0, 0.0], spec.b(1.0) + spec.b(-1.0))],
            })
            .collect(),
        2 => {
            let (al, wa) = gauss_legendre_on(spec.n_sphere, -PI / 2.0, PI / 2.0);
            let nz = spec.n_zhat;
            (0..nz)
                .map(|i| {
                    let t = 2.0 * PI * i as f64 / nz as f64;
                    let (z, p) = ([t.cos(), t.sin(), 0.0], [-t.sin(), t.cos(), 0.0]);
                    let omegas = al
                        .iter()
                        .zip(&wa)
                        .map(|(&a, &w)| {
                            let (c, s) = (a.cos(), a.sin());
                            ([c * z[0] + s * p[0], c * z[1] + s * p[1], 0.0], 2.0 * w * spec.b(c))
                        })
                        .collect();
                    Direction {
                        zhat: z,
                        weight: 2.0 * PI / nz as f64,
                        omegas,
                    }
                })
                .collect()
        }
        _ => {
            let (ct, wt) = gauss_legendre_on(spec.n_zhat / 2, -1.0, 1.0);
            let nphi = spec.n_zhat;
            let (cs, ws) = gauss_legendre_on((spec.n_sphere / 2).max(1), 0.0, 1.0);
            let npsi = spec.n_sphere;
            let mut out = Vec::new();
            for (&c, &w) in ct.iter().zip(&wt) {
                let s = (1.0 - c * c).sqrt();
                for j in 0..nphi {
                    let ph = 2.0 * PI * j as f64 / nphi as f64;
                    let z = [s * ph.cos(), s * ph.sin(), c];
                    let (e1, e2) = frame_of(z);
                    let mut omegas = Vec::with_capacity(cs.len() * npsi);
                    for (&t, &wtt) in cs.iter().zip(&ws) {
                        let st = (1.0 - t * t).sqrt();
                        for l in 0..npsi {
                            let ps = 2.0 * PI * l as f64 / npsi as f64;
                            let (a, b) = (st * ps.cos(), st * ps.sin());
                            let om = [
                                t * z[0] + a * e1[0] + b * e2[0],
                                t * z[1] + a * e1[1] + b * e2[1],
                                t * z[2] + a * e1[2] + b * e2[2],
                            ];
                            omegas.push((om, 2.0 * wtt * 2.0 * PI / npsi as f64 * spec.b(t)));
                        }
                    }
                    out.push(Direction {
                        zhat: z,
                        weight: w * 2.0 * PI / nphi as f64,
                        omegas,
                    });
                }
            }
            out
        }
    }
}

/// Radial rule for `int_0^R r^{d-1+gamma} h(r) dr` with `h` even in `r`.
pub(crate) fn radial_rule(d: usize, gamma: f64, n: usize, r_max: f64) -> Vec<(f64, f64)> {
    let beta = (d as f64 + gamma) / 2.0 - 1.0;
    let (s, w) = gauss_jacobi_left(n, beta, r_max * r_max);
    s.iter().zip(&w).map(|(s, w)| (s.sqrt(), w / 2.0)).collect()
}

/// `Q+(f, g)` or `Q-(f, g)` by velocity-space quadrature with trigonometric interpolation.
pub fn q_direct(f: &PhaseField, g: &PhaseField, spec: &CollisionKernelSpec, sign: Sign) -> Result<PhaseField> {
    q_direct_with(f, g, spec, sign, Interp::Trigonometric)
}

/// [`q_direct`] with a chosen interpolation of the samples. Output is in `XV`.
pub fn q_direct_with(
    f: &PhaseField,
    g: &PhaseField,
    spec: &CollisionKernelSpec,
    sign: Sign,
    interp: Interp,
) -> Result<PhaseField> {
    f.check_compatible(g)?;
    let grid = *f.grid();
    spec.validate(grid.d)?;
    let fx = f.to(Repr::XV);
    let gx = g.to(Repr::XV);
    let rule = angular_rule(grid.d, spec);
    let (reps, owner) = unique_slice_pairs(&fx, &gx);
    let slices = map_indexed(reps.len(), |r| {
        let ix = reps[r];
        match sign {
            Sign::Gain => gain_slice(&grid, fx.slice(ix), gx.slice(ix), spec, &rule, interp),
            Sign::Loss => loss_slice(&grid, fx.slice(ix), gx.slice(ix), spec, &rule, interp),
        }
    });
    let mut out = PhaseField::zeros(grid, Repr::XV);
    for (ix, &r) in owner.iter().enumerate() {
        out.slice_mut(ix).copy_from_slice(&slices[r]);
    }
    Ok(out)
}

fn gain_slice(
    grid: &SpectralGrid,
    fs: &[C64],
    gs: &[C64],
    spec: &CollisionKernelSpec,
    rule: &[Direction],
    interp: Interp,
) -> Vec<C64> {
    let n = fs.len();
    let zero = vec![C64::new(0.0, 0.0); n];
    let (Some(rf), Some(rg)) = (
        support_radius(grid, fs, spec.support_tol),
        support_radius(grid, gs, spec.support_tol),
    ) else {
        return zero;
    };
    if spec.cutoff == 0.0 {
        return zero;
    }
    // |v|^2 + |u|^2 <= rf^2 + rg^2 bounds |u - v| by sqrt(2 (rf^2 + rg^2))
    let r_max = (2.0 * (rf * rf + rg * rg)).sqrt();
    let radial = radial_rule(grid.d, spec.gamma, spec.n_radial, r_max);
    let sf = SliceShifter::new(grid, fs, interp);
    let sg = SliceShifter::new(grid, gs, interp);
    let parts = map_indexed(radial.len(), |i| {
        let (r, wr) = radial[i];
        let mut acc = vec![C64::new(0.0, 0.0); n];
        let mut a = vec![C64::new(0.0, 0.0); n];
        let mut b = vec![C64::new(0.0, 0.0); n];
        for dir in rule {
            for &(om, w) in &dir.omegas {
                if w == 0.0 {
                    continue;
                }
                let p = r * (dir.zhat[0] * om[0] + dir.zhat[1] * om[1] + dir.zhat[2] * om[2]);
                let da = [p * om[0], p * om[1], p * om[2]];
                let db = [
                    r * dir.zhat[0] - da[0],
                    r * dir.zhat[1] - da[1],
                    r * dir.zhat[2] - da[2],
                ];
                sf.shifted(&da, &mut a);
                sg.shifted(&db, &mut b);
                let c = wr * dir.weight * w;
                for j in 0..n {
                    acc[j] += a[j] * b[j] * c;
                }
            }
        }
        acc
    });
    sum_parts(parts, n)
}

fn loss_slice(
    grid: &SpectralGrid,
    fs: &[C64],
    gs: &[C64],
    spec: &CollisionKernelSpec,
    rule: &[Direction],
    interp: Interp,
) -> Vec<C64> {
    let n = fs.len();
    let c_b: f64 = rule[0].omegas.iter().map(|o| o.1).sum();
    let rate: Vec<C64> = if spec.gamma == 0.0 {
        let mass: C64 = gs.iter().sum::<C64>() * grid.dv().powi(grid.d as i32);
        vec![mass; n]
    } else {
        let (Some(rf), Some(rg)) = (
            support_radius(grid, fs, spec.support_tol),
            support_radius(grid, gs, spec.support_tol),
        ) else {
            return vec![C64::new(0.0, 0.0); n];
        };
        let radial = radial_rule(grid.d, spec.gamma, spec.n_radial, rf + rg);
        let sg = SliceShifter::new(grid, gs, interp);
        let parts = map_indexed(radial.len(), |i| {
            let (r, wr) = radial[i];
            let mut acc = vec![C64::new(0.0, 0.0); n];
            let mut b = vec![C64::new(0.0, 0.0); n];
            for dir in rule {
                let db = [r * dir.zhat[0], r * dir.zhat[1], r * dir.zhat[2]];
                sg.shifted(&db, &mut b);
                for j in 0..n {
                    acc[j] += b[j] * (wr * dir.weight);
                }
            }
            acc
        });
        sum_parts(parts, n)
    };
    fs.iter().zip(&rate).map(|(f, r)| f * r * c_b).collect()
}

fn sum_parts(parts: Vec<Vec<C64>>, n: usize) -> Vec<C64> {
    let mut out = vec![C64::new(0.0, 0.0); n];
    for p in parts {
        for (o, x) in out.iter_mut().zip(p) {
            *o += x;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::AngularKind;
    use crate::spectral_core::DomainKind;

    fn grid(d: usize) -> SpectralGrid {
        SpectralGrid::new(d, 4, 32, 8.0, DomainKind::TorusBox).unwrap()
    }

    fn maxwellian(g: SpectralGrid, scale: f64) -> PhaseField {
        PhaseField::from_velocity_fn(g, |v| {
            let r2: f64 = v.iter().map(|x| x * x).sum();
            C64::new(scale * (-r2 / 2.0).exp(), 0.0)
        })
    }

    #[test]
    fn angular_rule_integrates_b() {
        let s = CollisionKernelSpec::maxwellian(AngularKind::AbsCos);
        for d in 1..=3 {
            let rule = angular_rule(d, &s);
            let c: f64 = rule[0].omegas.iter().map(|o| o.1).sum();
            assert!((c - s.b_norm(d)).abs() < 1e-12, "d={d}: {c}");
            let area: f64 = rule.iter().map(|r| r.weight).sum();
            let exact = [2.0, 2.0 * PI, 4.0 * PI][d - 1];
            assert!((area - exact).abs() < 1e-12);
        }
    }

    #[test]
    fn quadrature_nodes_conserve() {
        let s = CollisionKernelSpec::default();
        for d in 2..=3 {
            for dir in angular_rule(d, &s) {
                for (om, _) in dir.omegas.iter().take(5) {
                    let v = [0.3, -1.0, 0.5];
                    let u = [
                        v[0] + 2.0 * dir.zhat[0],
                        v[1] + 2.0 * dir.zhat[1],
                        v[2] + 2.0 * dir.zhat[2],
                    ];
                    let p = super::super::CollisionPair::new(&u[..d], &v[..d], &om[..d]).unwrap();
                    assert!(p.conservation_defect() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn zero_input_gives_zero() {
        let g = grid(2);
        let z = PhaseField::zeros(g, Repr::XV);
        let m = maxwellian(g, 1.0);
        let s = CollisionKernelSpec::default();
        for sign in [Sign::Gain, Sign::Loss] {
            assert_eq!(q_direct(&z, &m, &s, sign).unwrap().max_abs(), 0.0);
        }
    }

    #[test]
    fn loss_with_unit_mass_is_c_b_times_f() {
        let g = grid(2);
        let m = maxwellian(g, 1.0 / (2.0 * PI));
        let f = PhaseField::from_velocity_fn(g, |v| C64::new((-(v[0] - 1.0).powi(2) - v[1] * v[1]).exp(), 0.3));
        let s = CollisionKernelSpec::default();
        let q = q_direct(&f, &m, &s, Sign::Loss).unwrap();
        let want = f.scaled(C64::new(4.0, 0.0));
        assert!(q.max_abs_diff(&want) < 1e-10);
    }

    #[test]
    fn maxwellian_is_an_equilibrium() {
        for d in 1..=2 {
            let g = grid(d);
            let m = maxwellian(g, 1.0);
            let s = CollisionKernelSpec::default();
            let gain = q_direct(&m, &m, &s, Sign::Gain).unwrap();
            let loss = q_direct(&m, &m, &s, Sign::Loss).unwrap();
            let r = gain.max_abs_diff(&loss) / loss.max_abs();
            assert!(r < 1e-6, "d={d} residual {r}");
        }
    }

    #[test]
    fn soft_maxwellian_is_an_equilibrium() {
        let g = grid(2);
        let m = maxwellian(g, 1.0);
        let s = CollisionKernelSpec::soft(-0.5);
        let gain = q_direct(&m, &m, &s, Sign::Gain).unwrap();
        let loss = q_direct(&m, &m, &s, Sign::Loss).unwrap();
        let r = gain.max_abs_diff(&loss) / loss.max_abs();
        assert!(r < 1e-6, "residual {r}");
    }
}

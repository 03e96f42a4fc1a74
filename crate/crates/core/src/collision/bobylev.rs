//! Fourier-side evaluation of `Q+` and `Q-`.
//!
//! With `Phi^(eta) = c |eta|^{-(d+gamma)}` the unitary transform of `|w|^gamma`,
//!
//! ```text
//! Q-~(xi) = ||b|| H(xi, 0)
//! Q+~(xi) = int_{S^{d-1}} B_sigma(xi^ . sigma) H(xi+, xi-) d sigma
//! H(a, b) = int Phi^(eta) f~(a + eta) g~(b - eta) d eta
//! ```
//!
//! with `xi± = (xi ± |xi| sigma) / 2`. For `gamma = 0` the weight is a point
//! mass and `H(a, b) = (2 pi)^{d/2} f~(a) g~(b)`. Off-grid values of `f~`
//! come from the sinc series of the samples, and the grid output folds the
//! nearest aliases `xi + 2 xi_max n`, `n in {-1, 0, 1}^d`, back in.

use std::f64::consts::PI;

use super::direct::frame_of;
use super::interp::{contract, sinc_weights, slice_inverse, support_radius, SincEval};
use super::kernel::{CollisionKernelSpec, EtaRule};
use super::{unique_slice_pairs, Sign};
use crate::par::map_indexed;
use crate::quadrature::{gauss_jacobi_left, gauss_legendre, gauss_legendre_on};
use crate::spectral_core::{PhaseField, Repr, SpectralGrid};
use crate::{Result, C64};

/// `Q+~` or `Q-~` of two fields in the `XXi` representation.
pub fn q_bobylev(ft: &PhaseField, gt: &PhaseField, spec: &CollisionKernelSpec, sign: Sign) -> Result<PhaseField> {
    ft.check_compatible(gt)?;
    let grid = *ft.grid();
    spec.validate(grid.d)?;
    let fx = ft.to(Repr::XXi);
    let gx = gt.to(Repr::XXi);
    let (reps, owner) = unique_slice_pairs(&fx, &gx);
    let slices: Vec<Vec<C64>> = reps
        .iter()
        .map(|&ix| slice_op(&grid, fx.slice(ix), gx.slice(ix), spec, sign))
        .collect();
    let mut out = PhaseField::zeros(grid, Repr::XXi);
    for (ix, &r) in owner.iter().enumerate() {
        out.slice_mut(ix).copy_from_slice(&slices[r]);
    }
    Ok(out)
}

/// Sigma nodes relative to `xi^ = e_1`: `(sigma, weight * B_sigma(xi^ . sigma))`.
fn sigma_rule(d: usize, spec: &CollisionKernelSpec) -> Vec<([f64; 3], f64)> {
    match d {
        1 => vec![
            ([1.0, 0.0, 0.0], spec.b_sigma(1, 1.0)),
            ([-1.0, 0.0, 0.0], spec.b_sigma(1, -1.0)),
        ],
        2 => {
            let (p, w) = gauss_legendre_on(spec.n_sphere, 0.0, 2.0 * PI);
            p.iter()
                .zip(&w)
                .map(|(&p, &w)| ([p.cos(), p.sin(), 0.0], w * spec.b_sigma(2, p.cos())))
                .collect()
        }
        _ => {
            // t = 1 - 2 c^2 removes the endpoint singularity of B_sigma at t = 1
            let (cs, wc) = gauss_legendre_on((spec.n_sphere / 2).max(1), 0.0, 1.0);
            let np = spec.n_sphere;
            let mut out = Vec::new();
            for (&c, &w) in cs.iter().zip(&wc) {
                let t = 1.0 - 2.0 * c * c;
                let s = (1.0 - t * t).max(0.0).sqrt();
                for l in 0..np {
                    let ps = 2.0 * PI * l as f64 / np as f64;
                    out.push((
                        [t, s * ps.cos(), s * ps.sin()],
                        4.0 * c * w * 2.0 * PI / np as f64 * spec.b_sigma(3, t),
                    ));
                }
            }
            out
        }
    }
}

struct Slice<'a> {
    grid: SpectralGrid,
    spec: &'a CollisionKernelSpec,
    f: SincEval,
    g: SincEval,
    c_phi: f64,
    /// Bound on `|v| + |u|` over the velocity supports; sets the oscillation of the eta integrand.
    freq: f64,
    duffy: Vec<DuffyNode>,
}

/// Node of the Duffy rule on the cube `[0, 1]^d` with the weight `|eta|^{-(d+gamma)}` folded in.
#[derive(Clone, Copy)]
struct DuffyNode {
    eta: [f64; 3],
    weight: f64,
}

fn slice_op(grid: &SpectralGrid, fs: &[C64], gs: &[C64], spec: &CollisionKernelSpec, sign: Sign) -> Vec<C64> {
    let n = fs.len();
    let zero = vec![C64::new(0.0, 0.0); n];
    let (Some(f), Some(g)) = (
        SincEval::new(grid, fs, spec.support_tol, spec.eta_margin),
        SincEval::new(grid, gs, spec.support_tol, spec.eta_margin),
    ) else {
        return zero;
    };
    if spec.cutoff == 0.0 {
        return zero;
    }
    let d = grid.d;
    let radius = |c: &[C64]| {
        let mut s = c.to_vec();
        slice_inverse(grid, &mut s);
        support_radius(grid, &s, spec.support_tol).unwrap_or(0.0)
    };
    let freq = radius(fs) + radius(gs);
    let ctx = Slice {
        grid: *grid,
        spec,
        f,
        g,
        c_phi: spec.phi_hat_const(d),
        freq,
        duffy: if spec.gamma < 0.0 {
            duffy_rule(d, spec)
        } else {
            Vec::new()
        },
    };
    let sig = sigma_rule(d, spec);
    let b_norm = spec.b_norm(d);
    let reach = ctx.f.extent + ctx.g.extent;
    let xi_max = grid.xi_max();
    map_indexed(n, |i| {
        let idx = grid.v_multi(i);
        let base: Vec<f64> = (0..d).map(|k| grid.xi_coord(idx[k])).collect();
        let mut acc = C64::new(0.0, 0.0);
        for shift in 0..3usize.pow(d as u32) {
            let mut xi = [0.0f64; 3];
            let mut s = shift;
            for k in 0..d {
                xi[k] = base[k] + 2.0 * xi_max * ((s % 3) as f64 - 1.0);
                s /= 3;
            }
            if xi[..d].iter().any(|x| x.abs() >= reach) {
                continue;
            }
            acc += match sign {
                Sign::Loss => ctx.h(&xi, &[0.0; 3]) * b_norm,
                Sign::Gain => ctx.gain_at(&xi, &sig),
            };
        }
        acc
    })
}

impl Slice<'_> {
    fn gain_at(&self, xi: &[f64; 3], sig: &[([f64; 3], f64)]) -> C64 {
        let d = self.grid.d;
        let nrm = xi[..d].iter().map(|x| x * x).sum::<f64>().sqrt();
        // at xi = 0 every sigma gives xi± = 0, so the reference direction is immaterial
        let e0 = if nrm > 0.0 {
            [xi[0] / nrm, xi[1] / nrm, xi[2] / nrm]
        } else {
            [1.0, 0.0, 0.0]
        };
        let (e1, e2) = match d {
            1 => ([0.0; 3], [0.0; 3]),
            2 => ([-e0[1], e0[0], 0.0], [0.0; 3]),
            _ => frame_of(e0),
        };
        let mut acc = C64::new(0.0, 0.0);
        for &(s, w) in sig {
            if w == 0.0 {
                continue;
            }
            let mut a = [0.0f64; 3];
            let mut b = [0.0f64; 3];
            for k in 0..d {
                let sk = s[0] * e0[k] + s[1] * e1[k] + s[2] * e2[k];
                a[k] = (xi[k] + nrm * sk) / 2.0;
                b[k] = (xi[k] - nrm * sk) / 2.0;
            }
            acc += self.h(&a, &b) * w;
        }
        acc
    }

    /// `H(a, b) = int Phi^(eta) f~(a + eta) g~(b - eta) d eta`.
    fn h(&self, a: &[f64; 3], b: &[f64; 3]) -> C64 {
        if self.spec.gamma == 0.0 {
            return self.f.eval(a) * self.g.eval(b) * self.c_phi;
        }
        match self.spec.eta_reg {
            EtaRule::CellAverage => self.h_lattice(a, b),
            EtaRule::Graded => self.h_graded(a, b),
        }
    }

    fn h_lattice(&self, a: &[f64; 3], b: &[f64; 3]) -> C64 {
        let g = &self.grid;
        let d = g.d;
        let h = g.dxi();
        let p = -(d as f64 + self.spec.gamma) / 2.0;
        let w0 = origin_cell_integral(d, self.spec.gamma, h);
        let cell = h.powi(d as i32);
        let mut acc = C64::new(0.0, 0.0);
        for i in 0..g.n_v() {
            let idx = g.v_multi(i);
            let mut pa = [0.0; 3];
            let mut pb = [0.0; 3];
            let mut r2 = 0.0;
            for k in 0..d {
                let e = g.xi_coord(idx[k]);
                pa[k] = a[k] + e;
                pb[k] = b[k] - e;
                r2 += e * e;
            }
            let w = if r2 == 0.0 { w0 } else { r2.powf(p) * cell };
            acc += self.f.eval(&pa) * self.g.eval(&pb) * w;
        }
        acc * self.c_phi
    }

    fn h_graded(&self, a: &[f64; 3], b: &[f64; 3]) -> C64 {
        let g = &self.grid;
        let d = g.d;
        let nv = g.nv;
        let delta = g.dxi();
        let wmax = 4.0 * g.dxi();
        let (ef, eg) = (self.f.extent, self.g.extent);
        let mut axes: Vec<AxisRule> = Vec::with_capacity(d);
        let mut interior = true;
        for k in 0..d {
            let mut lo = (-ef - a[k]).max(b[k] - eg);
            let mut hi = (ef - a[k]).min(b[k] + eg);
            if lo >= hi {
                return C64::new(0.0, 0.0);
            }
            let dist = if lo > 0.0 {
                lo
            } else if hi < 0.0 {
                -hi
            } else {
                0.0
            };
            let graded = dist < wmax;
            if graded {
                lo = lo.min(-delta);
                hi = hi.max(delta);
            } else {
                interior = false;
            }
            axes.push(AxisRule::new(
                lo,
                hi,
                graded,
                delta,
                wmax,
                self.freq,
                self.spec.eta_oversample,
            ));
        }
        let p = -(d as f64 + self.spec.gamma) / 2.0;
        // f~(a + eta) and g~(b - eta) on the tensor grid
        let fa = tensor_eval(&self.f, &axes, a, 1.0);
        let gb = tensor_eval(&self.g, &axes, b, -1.0);
        let sizes: Vec<usize> = axes.iter().map(|r| r.x.len()).collect();
        let total: usize = sizes.iter().product();
        let mut acc = C64::new(0.0, 0.0);
        for t in 0..total {
            let mut rem = t;
            let mut idx = [0usize; 3];
            for k in (0..d).rev() {
                idx[k] = rem % sizes[k];
                rem /= sizes[k];
            }
            if interior && (0..d).all(|k| axes[k].inner[idx[k]]) {
                continue;
            }
            let mut w = 1.0;
            let mut r2 = 0.0;
            for k in 0..d {
                let x = axes[k].x[idx[k]];
                w *= axes[k].w[idx[k]];
                r2 += x * x;
            }
            acc += fa[t] * gb[t] * (w * r2.powf(p));
        }
        if interior {
            let scale = delta.powf(-self.spec.gamma);
            let mut wf = [[0.0f64; 64]; 3];
            let mut wg = [[0.0f64; 64]; 3];
            for node in &self.duffy {
                for k in 0..d {
                    let e = node.eta[k] * delta;
                    sinc_weights(g, a[k] + e, &mut wf[k][..nv]);
                    sinc_weights(g, b[k] - e, &mut wg[k][..nv]);
                }
                acc += contract(d, nv, &self.f.coef, &wf) * contract(d, nv, &self.g.coef, &wg) * (node.weight * scale);
            }
        }
        acc * self.c_phi
    }
}

/// Composite Gauss nodes on one axis of the eta box.
struct AxisRule {
    x: Vec<f64>,
    w: Vec<f64>,
    /// Node lies in `[-delta, delta]`, the span of the Duffy cells.
    inner: Vec<bool>,
}

impl AxisRule {
    fn new(lo: f64, hi: f64, graded: bool, delta: f64, wmax: f64, freq: f64, over: f64) -> Self {
        let mut pts = vec![lo, hi];
        if graded {
            pts.push(0.0);
            let mut s = delta;
            while s < 4.0 * wmax {
                for p in [-s, s] {
                    if p > lo && p < hi {
                        pts.push(p);
                    }
                }
                s *= 2.0;
            }
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup_by(|a, b| (*a - *b).abs() < 1e-14);
        let mut x = Vec::new();
        let mut w = Vec::new();
        let mut inner = Vec::new();
        for win in pts.windows(2) {
            let (p0, p1) = (win[0], win[1]);
            let parts = ((p1 - p0) / (4.0 * wmax)).ceil().max(1.0) as usize;
            let h = (p1 - p0) / parts as f64;
            for j in 0..parts {
                let (q0, q1) = (p0 + j as f64 * h, p0 + (j + 1) as f64 * h);
                let n = (over * (4.0 + 0.25 * freq * h)).ceil().max(2.0) as usize;
                let (xs, ws) = gauss_legendre_on(n, q0, q1);
                let is_inner = graded && q0 >= -delta - 1e-12 && q1 <= delta + 1e-12;
                x.extend(xs);
                w.extend(ws);
                inner.extend(std::iter::repeat_n(is_inner, n));
            }
        }
        AxisRule { x, w, inner }
    }
}

/// `f~(a + s eta)` on the tensor product of the axis rules, row-major.
fn tensor_eval(e: &SincEval, axes: &[AxisRule], a: &[f64; 3], s: f64) -> Vec<C64> {
    let g = &e.grid;
    let nv = g.nv;
    let d = g.d;
    let mut cur = e.coef.clone();
    let mut dims: Vec<usize> = vec![nv; d];
    let mut wrow = vec![0.0f64; nv];
    for k in 0..d {
        let n_k = axes[k].x.len();
        let mut mat = vec![0.0f64; n_k * nv];
        for (i, &x) in axes[k].x.iter().enumerate() {
            sinc_weights(g, a[k] + s * x, &mut wrow);
            mat[i * nv..(i + 1) * nv].copy_from_slice(&wrow);
        }
        let outer: usize = dims[..k].iter().product();
        let inner: usize = dims[k + 1..].iter().product();
        let mut next = vec![C64::new(0.0, 0.0); outer * n_k * inner];
        for o in 0..outer {
            for i in 0..n_k {
                let row = &mat[i * nv..(i + 1) * nv];
                let dst = &mut next[(o * n_k + i) * inner..(o * n_k + i + 1) * inner];
                for (m, &wm) in row.iter().enumerate() {
                    if wm == 0.0 {
                        continue;
                    }
                    let src = &cur[(o * nv + m) * inner..(o * nv + m + 1) * inner];
                    for (dz, sz) in dst.iter_mut().zip(src) {
                        *dz += sz * wm;
                    }
                }
            }
        }
        dims[k] = n_k;
        cur = next;
    }
    cur
}

/// Duffy rule for `int_{[-1,1]^d} |eta|^{-(d+gamma)} h(eta) d eta`, `h` smooth.
///
/// Each orthant cube is cut into `d` pyramids by the largest coordinate; in
/// pyramid coordinates `eta = s (1, u)` the weight becomes `s^{-1-gamma}`,
/// which Gauss-Jacobi integrates exactly.
fn duffy_rule(d: usize, spec: &CollisionKernelSpec) -> Vec<DuffyNode> {
    let gamma = spec.gamma;
    let n = (6.0 * spec.eta_oversample).ceil().max(2.0) as usize;
    let (s, ws) = gauss_jacobi_left(n, -1.0 - gamma, 1.0);
    let (u, wu) = gauss_legendre(n);
    let u: Vec<f64> = u.iter().map(|x| (x + 1.0) / 2.0).collect();
    let wu: Vec<f64> = wu.iter().map(|w| w / 2.0).collect();
    let p = -(d as f64 + gamma) / 2.0;
    let mut out = Vec::new();
    let free = d - 1;
    let combos = n.pow(free as u32);
    for orth in 0..(1usize << d) {
        let sgn: Vec<f64> = (0..d).map(|k| if orth >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
        for kmax in 0..d {
            for c in 0..combos {
                let mut rem = c;
                let mut dir = [0.0f64; 3];
                let mut wdir = 1.0;
                for k in 0..d {
                    if k == kmax {
                        dir[k] = 1.0;
                    } else {
                        let j = rem % n;
                        rem /= n;
                        dir[k] = u[j];
                        wdir *= wu[j];
                    }
                }
                let r2: f64 = dir[..d].iter().map(|x| x * x).sum();
                let wr = wdir * r2.powf(p);
                for (&si, &wsi) in s.iter().zip(&ws) {
                    let mut eta = [0.0f64; 3];
                    for k in 0..d {
                        eta[k] = sgn[k] * si * dir[k];
                    }
                    out.push(DuffyNode { eta, weight: wsi * wr });
                }
            }
        }
    }
    out
}

/// `int_{[-h/2, h/2]^d} |eta|^{-(d+gamma)} d eta` for `gamma < 0`.
pub(crate) fn origin_cell_integral(d: usize, gamma: f64, h: f64) -> f64 {
    let p = -(d as f64 + gamma) / 2.0;
    let (u, wu) = gauss_legendre_on(24, 0.0, 1.0);
    let iu = match d {
        1 => 1.0,
        2 => u.iter().zip(&wu).map(|(u, w)| w * (1.0 + u * u).powf(p)).sum(),
        _ => {
            let mut s = 0.0;
            for (a, wa) in u.iter().zip(&wu) {
                for (b, wb) in u.iter().zip(&wu) {
                    s += wa * wb * (1.0 + a * a + b * b).powf(p);
                }
            }
            s
        }
    };
    (1u32 << d) as f64 * d as f64 * (h / 2.0).powf(-gamma) / (-gamma) * iu
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::kernel::AngularKind;
    use crate::spectral_core::DomainKind;

    fn grid() -> SpectralGrid {
        SpectralGrid::new(2, 4, 16, 4.0, DomainKind::TorusBox).unwrap()
    }

    #[test]
    fn sigma_rule_integrates_b_norm() {
        for kind in [AngularKind::AbsCos, AngularKind::CosSquared] {
            let s = CollisionKernelSpec::maxwellian(kind);
            for d in 1..=3 {
                let tot: f64 = sigma_rule(d, &s).iter().map(|x| x.1).sum();
                assert!((tot - s.b_norm(d)).abs() < 1e-10, "d={d} {tot}");
            }
        }
    }

    #[test]
    fn duffy_rule_integrates_weight() {
        // int_{[-1,1]^2} |eta|^{-3/2} d eta = 4 * 2 * int_0^1 int_0^1 s^{-1/2} (1+u^2)^{-3/4} du ds
        let spec = CollisionKernelSpec {
            eta_oversample: 2.0,
            ..CollisionKernelSpec::soft(-0.5)
        };
        let tot: f64 = duffy_rule(2, &spec).iter().map(|n| n.weight).sum();
        let want = 4.0 * origin_cell_integral(2, -0.5, 2.0) / 4.0;
        assert!((tot - want).abs() < 1e-12 * want, "{tot} vs {want}");
        let spec1 = CollisionKernelSpec::soft(-0.5);
        let tot1: f64 = duffy_rule(1, &spec1).iter().map(|n| n.weight).sum();
        assert!((tot1 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn zero_inputs_give_zero() {
        let g = grid();
        let z = PhaseField::zeros(g, Repr::XXi);
        let f = PhaseField::from_velocity_fn(g, |v| C64::new((-v[0] * v[0] - v[1] * v[1]).exp(), 0.0)).to(Repr::XXi);
        for gamma in [0.0, -0.5] {
            let s = CollisionKernelSpec::soft(gamma);
            for sign in [Sign::Gain, Sign::Loss] {
                assert_eq!(q_bobylev(&z, &f, &s, sign).unwrap().max_abs(), 0.0);
                assert_eq!(q_bobylev(&f, &z, &s, sign).unwrap().max_abs(), 0.0);
            }
        }
    }

    #[test]
    fn lattice_loss_against_point_mass() {
        let g = grid();
        let spec = CollisionKernelSpec {
            gamma: -0.5,
            eta_reg: EtaRule::CellAverage,
            ..Default::default()
        };
        let f = PhaseField::from_velocity_fn(g, |v| C64::new((-v[0] * v[0] - 2.0 * v[1] * v[1]).exp(), 0.1 * v[0]))
            .to(Repr::XXi);
        // g~ = 1 at eta0 = (2, -1) dxi in every x-cell
        let m0 = [2usize, 15usize];
        let mut gt = PhaseField::zeros(g, Repr::XXi);
        for ix in 0..g.n_x() {
            gt.slice_mut(ix)[m0[0] * 16 + m0[1]] = C64::new(1.0, 0.0);
        }
        let q = q_bobylev(&f, &gt, &spec, Sign::Loss).unwrap();
        let dxi = g.dxi();
        let eta0 = [2.0 * dxi, -dxi];
        let w =
            spec.b_norm(2) * spec.phi_hat_const(2) * (eta0[0] * eta0[0] + eta0[1] * eta0[1]).powf(-0.75) * dxi * dxi;
        let fs = f.slice(0);
        let out = q.slice(0);
        // the alias fold makes the lattice convolution periodic
        for i in 0..16usize {
            for j in 0..16usize {
                let want = fs[((i + 14) % 16) * 16 + (j + 1) % 16] * w;
                let got = out[i * 16 + j];
                assert!(
                    (got - want).norm() < 1e-12 * (1.0 + want.norm()),
                    "{i},{j}: {got} vs {want}"
                );
            }
        }
    }
}

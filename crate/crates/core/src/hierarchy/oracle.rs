//! Brute-force evaluation of `J_mu` on the full `(k+1)`-particle tensor.
//!
//! Only for one velocity dimension, `gamma = 0` and tiny grids: the tensor has
//! `(nx nv)^(k+1)` entries. In one dimension every collision swaps the two
//! velocities, so both halves of `Q_{a,b}` are sums over grid points.

use rustfft::FftPlanner;

use super::maps::CollapseMap;
use crate::collision::CollisionKernelSpec;
use crate::spectral_core::{DomainKind, PhaseField, Repr, SpectralGrid};
use crate::{Error, Result, C64};

const MAX_ENTRIES: usize = 1 << 24;

struct Tensor {
    /// points per particle (`nx * nv`)
    m: usize,
    n: usize,
    data: Vec<C64>,
}

impl Tensor {
    fn stride(&self, p: usize) -> usize {
        self.m.pow((self.n - 1 - p) as u32)
    }
}

/// `J_mu` on the product of `leaves` (given at `t_{k+1}`), returned as a single-particle field in `XV`.
pub fn tensor_oracle_d1(
    mu: &CollapseMap,
    leaves: &[PhaseField],
    t1: f64,
    times: &[f64],
    kernel: &CollisionKernelSpec,
) -> Result<PhaseField> {
    let k = mu.k();
    if leaves.len() != k + 1 || times.len() != k {
        return Err(Error::Config("need k+1 leaves and k times".into()));
    }
    let g = *leaves[0].grid();
    if g.d != 1 || g.domain_kind != DomainKind::TorusBox {
        return Err(Error::UnsupportedRegime(
            "tensor oracle needs d = 1 on the torus".into(),
        ));
    }
    if kernel.gamma != 0.0 {
        return Err(Error::UnsupportedRegime("tensor oracle needs gamma = 0".into()));
    }
    let m = g.n_x() * g.n_v();
    if m.checked_pow((k + 1) as u32).is_none_or(|e| e > MAX_ENTRIES) {
        return Err(Error::Range("tensor too large".into()));
    }
    let xv: Vec<PhaseField> = leaves.iter().map(|l| l.to(Repr::XV)).collect();
    let mut t = Tensor {
        m,
        n: 1,
        data: xv[0].data().to_vec(),
    };
    for l in &xv[1..] {
        let mut data = Vec::with_capacity(t.data.len() * m);
        for a in &t.data {
            data.extend(l.data().iter().map(|b| a * b));
        }
        t = Tensor { m, n: t.n + 1, data };
    }
    let time = |j: usize| if j == 1 { t1 } else { times[j - 2] };
    for j in (2..=k + 1).rev() {
        t = collide(&t, mu.at(j) - 1, &g, kernel.b_norm(1));
        let tau = time(j - 1) - time(j);
        for p in 0..t.n {
            transport(&mut t, p, &g, tau);
        }
    }
    PhaseField::from_data(g, Repr::XV, t.data)
}

/// `Q_{a, last}`: the last particle is absorbed into particle `a` at the same position.
fn collide(t: &Tensor, a: usize, g: &SpectralGrid, bnorm: f64) -> Tensor {
    let nv = g.n_v();
    let w = bnorm * g.dv();
    let n = t.n - 1;
    let sa = t.m.pow((n - 1 - a) as u32);
    let mut data = vec![C64::new(0.0, 0.0); t.m.pow(n as u32)];
    for (o, slot) in data.iter_mut().enumerate() {
        let pa = (o / sa) % t.m;
        let ix = pa / nv;
        let mut acc = C64::new(0.0, 0.0);
        for u in 0..nv {
            // gain: particle a takes velocity u, the absorbed particle sits at (x_a, v_a)
            let gain = (o + (ix * nv + u) * sa - pa * sa) * t.m + pa;
            let loss = o * t.m + ix * nv + u;
            acc += t.data[gain] - t.data[loss];
        }
        *slot = acc * w;
    }
    Tensor { m: t.m, n, data }
}

/// Free transport of particle `p` by `tau`: `f(x - tau v, v)`.
fn transport(t: &mut Tensor, p: usize, g: &SpectralGrid, tau: f64) {
    if tau == 0.0 {
        return;
    }
    let (nx, nv) = (g.n_x(), g.n_v());
    let mut planner = FftPlanner::new();
    let fwd = planner.plan_fft_forward(nx);
    let inv = planner.plan_fft_inverse(nx);
    let s = t.stride(p);
    let block = t.m * s;
    let mut line = vec![C64::new(0.0, 0.0); nx];
    for hi in 0..t.data.len() / block {
        for iv in 0..nv {
            let v = g.v_coord(iv);
            for lo in 0..s {
                let at = |ix: usize| hi * block + (ix * nv + iv) * s + lo;
                for (ix, z) in line.iter_mut().enumerate() {
                    *z = t.data[at(ix)];
                }
                fwd.process(&mut line);
                for (i, z) in line.iter_mut().enumerate() {
                    *z *= C64::from_polar(1.0 / nx as f64, -tau * g.k_coord(i) * v);
                }
                inv.process(&mut line);
                for (ix, z) in line.iter().enumerate() {
                    t.data[at(ix)] = *z;
                }
            }
        }
    }
}

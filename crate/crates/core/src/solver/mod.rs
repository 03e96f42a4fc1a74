//! Split-step solver for `(d_t + v . grad_x) f = Q(f, f)`.
//!
//! Transport is the exact free flow; the collision substep is the explicit
//! midpoint rule. Strang splitting gives second order in `dt`, Lie splitting
//! first order.

pub mod initial;
pub mod snapshot;

use serde::{Deserialize, Serialize};

use crate::collision::{collide, CollisionKernelSpec, Route};
use crate::spectral_core::{propagate, sobolev_norm, PhaseField, Repr, SpectralGrid};
use crate::{Error, Result, C64};

pub use initial::{maxwellian, perturbed_maxwellian, random_band_limited};
pub use snapshot::{read_snapshot, write_snapshot, SnapshotMeta};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scheme {
    #[default]
    Strang,
    Lie,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    pub dt: f64,
    pub scheme: Scheme,
    pub kernel: CollisionKernelSpec,
    #[serde(default)]
    pub route: Route,
    pub grid: SpectralGrid,
    pub t_end: f64,
}

impl SolverConfig {
    pub fn new(grid: SpectralGrid, kernel: CollisionKernelSpec, dt: f64, t_end: f64) -> Self {
        SolverConfig {
            dt,
            scheme: Scheme::Strang,
            kernel,
            route: Route::Direct,
            grid,
            t_end,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Error::Config(format!("dt = {} must be positive", self.dt)));
        }
        if !(self.t_end.is_finite() && self.t_end >= 0.0) {
            return Err(Error::Config(format!("t_end = {} must be >= 0", self.t_end)));
        }
        self.kernel.validate(self.grid.d)
    }

    /// Same configuration with step size `dt`.
    pub fn with_dt(&self, dt: f64) -> Self {
        SolverConfig { dt, ..self.clone() }
    }
}

fn collision_substep(f: &PhaseField, h: f64, cfg: &SolverConfig, step: usize) -> Result<PhaseField> {
    let q = |g: &PhaseField| -> Result<PhaseField> {
        if cfg.kernel.cutoff == 0.0 {
            return Ok(PhaseField::zeros(*g.grid(), g.repr()));
        }
        collide(g, g, &cfg.kernel, cfg.route).map_err(|e| Error::Instability {
            step,
            msg: e.to_string(),
        })
    };
    let mid = f.axpy(C64::new(h / 2.0, 0.0), &q(f)?);
    let out = f.axpy(C64::new(h, 0.0), &q(&mid)?);
    if !out.is_finite() {
        return Err(Error::Instability {
            step,
            msg: "non-finite values after the collision substep".into(),
        });
    }
    Ok(out)
}

fn step_by(f: &PhaseField, h: f64, cfg: &SolverConfig, index: usize) -> Result<PhaseField> {
    match cfg.scheme {
        Scheme::Strang => {
            let a = propagate(f, h / 2.0);
            let b = collision_substep(&a, h, cfg, index)?;
            Ok(propagate(&b, h / 2.0))
        }
        Scheme::Lie => {
            let a = propagate(f, h);
            collision_substep(&a, h, cfg, index)
        }
    }
}

/// One step of size `cfg.dt`; the result keeps the representation of `f`.
pub fn step(f: &PhaseField, cfg: &SolverConfig) -> Result<PhaseField> {
    cfg.validate()?;
    step_by(f, cfg.dt, cfg, 0)
}

/// Fields at the requested times.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub fields: Vec<PhaseField>,
}

/// Integrate from `f0` and record the state at every entry of `sample_times`.
///
/// Steps have size `dt` except for the shortened steps that land on sample times.
/// Fields are returned in the order of `sample_times`.
pub fn solve(f0: &PhaseField, cfg: &SolverConfig, sample_times: &[f64]) -> Result<Trajectory> {
    cfg.validate()?;
    for &s in sample_times {
        if !(0.0..=cfg.t_end * (1.0 + 1e-12)).contains(&s) {
            return Err(Error::Config(format!("sample time {s} outside [0, {}]", cfg.t_end)));
        }
    }
    let mut order: Vec<usize> = (0..sample_times.len()).collect();
    order.sort_by(|&a, &b| sample_times[a].total_cmp(&sample_times[b]));
    let mut out: Vec<Option<PhaseField>> = vec![None; sample_times.len()];
    let mut f = f0.clone();
    let mut t = 0.0;
    let mut index = 0usize;
    let eps = 1e-12 * cfg.dt;
    for &i in &order {
        let s = sample_times[i];
        while s - t > eps {
            let h = if s - t > cfg.dt + eps { cfg.dt } else { s - t };
            f = step_by(&f, h, cfg, index)?;
            index += 1;
            t = if h == s - t { s } else { t + h };
        }
        out[i] = Some(f.clone());
    }
    Ok(Trajectory {
        times: sample_times.to_vec(),
        fields: out.into_iter().map(|f| f.expect("every sample is visited")).collect(),
    })
}

/// `int int f dx dv`.
pub fn mass(f: &PhaseField) -> f64 {
    let xv = f.to(Repr::XV);
    let g = xv.grid();
    xv.data().iter().map(|z| z.re).sum::<f64>() * (g.dx() * g.dv()).powi(g.d as i32)
}

/// Values of `f` on a grid whose points are a subset of its own (every `n`-th point per axis).
pub fn restrict(f: &PhaseField, coarse: &SpectralGrid) -> Result<PhaseField> {
    let g = *f.grid();
    if g.same_as(coarse) {
        return Ok(f.to(Repr::XV));
    }
    let ok = g.d == coarse.d
        && g.domain_kind == coarse.domain_kind
        && g.v_max == coarse.v_max
        && g.nx.is_multiple_of(coarse.nx)
        && g.nv.is_multiple_of(coarse.nv);
    if !ok {
        return Err(Error::Config("grids are not nested".into()));
    }
    let (rx, rv) = (g.nx / coarse.nx, g.nv / coarse.nv);
    let xv = f.to(Repr::XV);
    let mut data = vec![C64::new(0.0, 0.0); coarse.len()];
    for ix in 0..coarse.n_x() {
        let mx = coarse.x_multi(ix);
        let fx = (0..g.d).fold(0, |acc, a| acc * g.nx + mx[a] * rx);
        for iv in 0..coarse.n_v() {
            let mv = coarse.v_multi(iv);
            let fv = (0..g.d).fold(0, |acc, a| acc * g.nv + mv[a] * rv);
            data[ix * coarse.n_v() + iv] = xv.slice(fx)[fv];
        }
    }
    PhaseField::from_data(*coarse, Repr::XV, data)
}

/// Gap between two runs at one sample time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub t: f64,
    pub l2: f64,
    pub sobolev: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UniquenessReport {
    pub rows: Vec<GapRow>,
    pub sup_l2: f64,
    pub sup_sobolev: f64,
    /// Regularity `(s, r)` of the weighted Sobolev gap.
    pub s: f64,
    pub r: f64,
}

/// Run both configurations to `t` and tabulate `|f_a - f_b|` in `L^2` and `H^s_x L^{2,r}_v`.
///
/// When the grids differ the finer run is restricted to the coarser grid.
#[allow(clippy::too_many_arguments)]
pub fn uniqueness_experiment(
    f0_a: &PhaseField,
    f0_b: &PhaseField,
    cfg_a: &SolverConfig,
    cfg_b: &SolverConfig,
    t: f64,
    n_samples: usize,
    s: f64,
    r: f64,
) -> Result<UniquenessReport> {
    let n = n_samples.max(1);
    let times: Vec<f64> = (1..=n).map(|i| t * i as f64 / n as f64).collect();
    let ca = SolverConfig {
        t_end: t,
        ..cfg_a.clone()
    };
    let cb = SolverConfig {
        t_end: t,
        ..cfg_b.clone()
    };
    let a = solve(f0_a, &ca, &times)?;
    let b = solve(f0_b, &cb, &times)?;
    let coarse = if cfg_a.grid.len() <= cfg_b.grid.len() {
        cfg_a.grid
    } else {
        cfg_b.grid
    };
    let mut rows = Vec::with_capacity(n);
    for (i, &ti) in times.iter().enumerate() {
        let fa = restrict(&a.fields[i], &coarse)?;
        let fb = restrict(&b.fields[i], &coarse)?;
        let diff = fa.sub(&fb);
        rows.push(GapRow {
            t: ti,
            l2: diff.l2_norm(),
            sobolev: sobolev_norm(&diff, s, r),
        });
    }
    Ok(UniquenessReport {
        sup_l2: rows.iter().map(|r| r.l2).fold(0.0, f64::max),
        sup_sobolev: rows.iter().map(|r| r.sobolev).fold(0.0, f64::max),
        rows,
        s,
        r,
    })
}

/// Gaps of the pairs `(dt, dt/2)` and `(dt/2, dt/4)` and their ratio.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RefinementStudy {
    pub coarse_gap: f64,
    pub fine_gap: f64,
    pub ratio: f64,
    /// `log2(ratio)`
    pub order: f64,
}

pub fn refinement_study(f0: &PhaseField, cfg: &SolverConfig, t: f64) -> Result<RefinementStudy> {
    let c = |k: f64| cfg.with_dt(cfg.dt / k);
    let g1 = uniqueness_experiment(f0, f0, &c(1.0), &c(2.0), t, 1, 0.0, 0.0)?.sup_l2;
    let g2 = uniqueness_experiment(f0, f0, &c(2.0), &c(4.0), t, 1, 0.0, 0.0)?.sup_l2;
    let ratio = g1 / g2;
    Ok(RefinementStudy {
        coarse_gap: g1,
        fine_gap: g2,
        ratio,
        order: ratio.log2(),
    })
}

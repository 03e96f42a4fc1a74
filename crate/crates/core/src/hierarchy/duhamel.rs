//! Truncated Duhamel expansions driven by solver trajectories, and the
//! contraction experiment built on them.

use serde::{Deserialize, Serialize};

use super::expand::{eval_j_direct, Collider};
use super::iterate_bound;
use super::maps::{enumerate_collapse_maps, km_classes};
use super::time::simplex_rule;
use crate::solver::{solve, SolverConfig};
use crate::spectral_core::{propagate, PhaseField, Repr};
use crate::{par, Error, Result};

/// Comparison of `f(t1) - U(t1) f(0)` with its depth-`k` expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DuhamelReport {
    pub k: usize,
    pub t1: f64,
    pub n_quad: usize,
    /// `|f(t1) - U(t1) f(0)|`
    pub target_norm: f64,
    /// Norm of each level's contribution; the last one carries the solution.
    pub level_norms: Vec<f64>,
    pub abs_error: f64,
    pub rel_error: f64,
}

fn zero_like(f: &PhaseField) -> PhaseField {
    PhaseField::zeros(*f.grid(), Repr::XXi)
}

fn accumulate(acc: &mut PhaseField, w: f64, f: &PhaseField) {
    let f = f.to(Repr::XXi);
    for (a, b) in acc.data_mut().iter_mut().zip(f.data()) {
        *a += b * w;
    }
}

/// `sum over maps of depth k of int_simplex J_mu(leaf(t_{k+1}))`.
fn level<L>(k: usize, t1: f64, n_quad: usize, proto: &PhaseField, leaf: L, op: &Collider) -> Result<PhaseField>
where
    L: Fn(f64) -> Result<PhaseField> + Sync,
{
    let maps = enumerate_collapse_maps(k)?;
    let rule = simplex_rule(k, t1, n_quad);
    let parts = par::map_indexed(rule.len(), |i| -> Result<PhaseField> {
        let (times, w) = &rule[i];
        let f = leaf(times[k - 1])?;
        let mut acc = zero_like(proto);
        for mu in &maps {
            accumulate(&mut acc, *w, &eval_j_direct(mu, &f, t1, times, op)?);
        }
        Ok(acc)
    });
    let mut out = zero_like(proto);
    for p in parts {
        accumulate(&mut out, 1.0, &p?);
    }
    Ok(out)
}

/// Expand the solver's solution to depth `k` and compare with `f(t1) - U(t1) f(0)`.
///
/// Levels `j < k` carry the freely evolved initial data `U(t_{j+1}) f0`; level `k`
/// carries the solver state `f(t_{k+1})`. Time integrals use a collapsed
/// Gauss-Legendre rule with `n_quad` points per simplex dimension.
pub fn duhamel_reconstruction(
    f0: &PhaseField,
    cfg: &SolverConfig,
    k: usize,
    t1: f64,
    n_quad: usize,
) -> Result<DuhamelReport> {
    if k == 0 || n_quad == 0 {
        return Err(Error::Config("need k >= 1 and n_quad >= 1".into()));
    }
    if !(t1 > 0.0 && t1 <= cfg.t_end) {
        return Err(Error::Config(format!("t1 = {t1} outside (0, {}]", cfg.t_end)));
    }
    let op = Collider::new(cfg.kernel.clone(), cfg.route);
    let rule = simplex_rule(k, t1, n_quad);
    let mut samples: Vec<f64> = rule.iter().map(|(t, _)| t[k - 1]).collect();
    samples.push(t1);
    let traj = solve(f0, cfg, &samples)?;
    let at = |t: f64| -> Result<PhaseField> {
        let i = samples.iter().position(|&s| s == t).expect("sampled time");
        Ok(traj.fields[i].clone())
    };
    let target = traj.fields[samples.len() - 1].sub(&propagate(f0, t1).to(traj.fields[0].repr()));
    let target = target.to(Repr::XXi);
    let mut sum = zero_like(f0);
    let mut level_norms = Vec::with_capacity(k);
    for j in 1..=k {
        let part = if j < k {
            level(j, t1, n_quad, f0, |s| Ok(propagate(f0, s)), &op)?
        } else {
            level(j, t1, n_quad, f0, at, &op)?
        };
        level_norms.push(part.l2_norm());
        accumulate(&mut sum, 1.0, &part);
    }
    let target_norm = target.l2_norm();
    let abs_error = sum.sub(&target).l2_norm();
    Ok(DuhamelReport {
        k,
        t1,
        n_quad,
        target_norm,
        level_norms,
        abs_error,
        rel_error: abs_error / target_norm.max(f64::MIN_POSITIVE),
    })
}

/// Measured constants of the contraction bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContractionConstants {
    /// `|Q(f, g)| / (|f| |g|)` over the trajectory samples
    pub c: f64,
    /// `sup_t |f(t)|`
    pub c0: f64,
    /// Horizon with `4 C C0 T^{1/2} = target`.
    pub horizon: f64,
}

fn measure_constants(f0: &PhaseField, cfg: &SolverConfig, horizon: f64) -> Result<(f64, f64)> {
    let n = 4;
    let times: Vec<f64> = (0..=n).map(|i| horizon * i as f64 / n as f64).collect();
    let traj = solve(
        f0,
        &SolverConfig {
            t_end: horizon,
            ..cfg.clone()
        },
        &times,
    )?;
    let op = Collider::new(cfg.kernel.clone(), cfg.route);
    let mut c: f64 = 0.0;
    let mut c0: f64 = 0.0;
    for (i, f) in traj.fields.iter().enumerate() {
        let g = &traj.fields[n - i];
        let (nf, ng) = (f.l2_norm(), g.l2_norm());
        c0 = c0.max(nf);
        if nf > 0.0 && ng > 0.0 {
            c = c.max(op.apply(f, g, 0)?.l2_norm() / (nf * ng));
        }
    }
    Ok((c, c0))
}

/// Measure `C` and `C0` along the run and pick `T` with `4 C C0 T^{1/2} = target`.
///
/// The constants depend on the window `[0, T]`, so `T` is iterated to a fixed
/// point starting from `cfg.t_end`.
pub fn contraction_horizon(f0: &PhaseField, cfg: &SolverConfig, target: f64) -> Result<ContractionConstants> {
    let mut horizon = cfg.t_end;
    let (mut c, mut c0) = (0.0, 0.0);
    for _ in 0..12 {
        (c, c0) = measure_constants(f0, cfg, horizon)?;
        if c * c0 == 0.0 {
            return Ok(ContractionConstants {
                c,
                c0,
                horizon: f64::INFINITY,
            });
        }
        let next = (target / (4.0 * c * c0)).powi(2);
        let done = (next - horizon).abs() <= 0.01 * horizon;
        horizon = next;
        if done {
            break;
        }
    }
    Ok(ContractionConstants { c, c0, horizon })
}

/// One depth of the contraction table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionRow {
    pub k: usize,
    /// `max_t1 sum over classes |int I_mu|` for the difference of the two runs
    pub norm: f64,
    /// `norm_k / norm_{k-1}`, zero when the previous norm vanishes
    pub ratio: f64,
    pub bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContractionTable {
    pub horizon: f64,
    pub constants: ContractionConstants,
    /// `4 C C0 T^{1/2}`
    pub factor: f64,
    /// Row `k = 0` holds `sup_t |f_a(t) - f_b(t)|`.
    pub rows: Vec<ContractionRow>,
    /// `4 C C0 T^{1/2} >= 1`: the bound does not contract.
    pub not_small: bool,
}

const CONTRACTION_QUAD: usize = 3;

/// Depth-by-depth size of the expansion of `f_a - f_b` for two discretisations of one solution.
///
/// The signed two-point measure `f_a^(x)(k+1) - f_b^(x)(k+1)` stands in for the
/// difference of two hierarchy solutions. Each depth sums, over board-game classes,
/// the norm of the class integral, maximised over `t1 in {T/2, T}`.
pub fn contraction_demo(
    f0: &PhaseField,
    cfg_a: &SolverConfig,
    cfg_b: &SolverConfig,
    k_max: usize,
    horizon: f64,
) -> Result<ContractionTable> {
    if k_max > 4 {
        return Err(Error::Range(format!("k_max = {k_max} exceeds 4")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::Config(format!("horizon {horizon} must be positive")));
    }
    if cfg_a.grid != cfg_b.grid || cfg_a.kernel != cfg_b.kernel || cfg_a.route != cfg_b.route {
        return Err(Error::Config("the two runs must share grid, kernel and route".into()));
    }
    let mut ca = cfg_a.clone();
    ca.t_end = horizon;
    let mut cb = cfg_b.clone();
    cb.t_end = horizon;
    let (c, c0) = measure_constants(f0, &ca, horizon)?;
    let constants = ContractionConstants { c, c0, horizon };
    let factor = 4.0 * constants.c * constants.c0 * horizon.sqrt();
    let op = Collider::new(ca.kernel.clone(), ca.route);
    let t1s = [horizon / 2.0, horizon];

    let mut samples: Vec<f64> = t1s.to_vec();
    for k in 1..=k_max {
        for &t1 in &t1s {
            samples.extend(simplex_rule(k, t1, CONTRACTION_QUAD).iter().map(|(t, _)| t[k - 1]));
        }
    }
    samples.sort_by(f64::total_cmp);
    samples.dedup();
    let ta = solve(f0, &ca, &samples)?;
    let tb = solve(f0, &cb, &samples)?;
    let lookup = |t: f64| samples.iter().position(|&s| s == t).expect("sampled time");

    let norm0 = ta
        .fields
        .iter()
        .zip(&tb.fields)
        .map(|(a, b)| a.sub(b).l2_norm())
        .fold(0.0, f64::max);
    let mut rows = vec![ContractionRow {
        k: 0,
        norm: norm0,
        ratio: 0.0,
        bound: 1.0,
    }];
    for k in 1..=k_max {
        let classes = km_classes(k)?;
        let mut norm: f64 = 0.0;
        for &t1 in &t1s {
            let rule = simplex_rule(k, t1, CONTRACTION_QUAD);
            let per_class = par::map_indexed(classes.len(), |ci| -> Result<f64> {
                let mut acc = zero_like(f0);
                for (times, w) in &rule {
                    let i = lookup(times[k - 1]);
                    for mu in &classes[ci].members {
                        let ja = eval_j_direct(mu, &ta.fields[i], t1, times, &op)?;
                        let jb = eval_j_direct(mu, &tb.fields[i], t1, times, &op)?;
                        accumulate(&mut acc, *w, &ja.sub(&jb));
                    }
                }
                Ok(acc.l2_norm())
            });
            let mut total = 0.0;
            for n in per_class {
                total += n?;
            }
            norm = norm.max(total);
        }
        let prev = rows[k - 1].norm;
        rows.push(ContractionRow {
            k,
            norm,
            ratio: if prev > 0.0 { norm / prev } else { 0.0 },
            bound: iterate_bound(k, horizon, constants.c, constants.c0),
        });
    }
    Ok(ContractionTable {
        horizon,
        constants,
        factor,
        rows,
        not_small: factor >= 1.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::collision::{CollisionKernelSpec, Route};
    use crate::solver::{maxwellian, perturbed_maxwellian};
    use crate::spectral_core::SpectralGrid;
    use crate::C64;

    fn setup() -> (PhaseField, SolverConfig) {
        let g = SpectralGrid::torus(2, 4, 8, 5.0).unwrap();
        let f0 = perturbed_maxwellian(g, 0.4).axpy(C64::new(0.5, 0.0), &maxwellian(g, 0.5, &[1.2, -0.5], 0.6));
        let spec = CollisionKernelSpec {
            n_sphere: 12,
            ..Default::default()
        };
        let mut cfg = SolverConfig::new(g, spec, 0.01, 0.5);
        cfg.route = Route::Bobylev;
        (f0, cfg)
    }

    #[test]
    fn depth_two_expansion_reproduces_the_solution() {
        let (f0, cfg) = setup();
        let r = duhamel_reconstruction(&f0, &cfg, 2, 0.5, 4).unwrap();
        assert!(r.rel_error < 1e-3, "{r:?}");
        assert_eq!(r.level_norms.len(), 2);
        assert!(duhamel_reconstruction(&f0, &cfg, 2, 0.6, 4).is_err());
        assert!(duhamel_reconstruction(&f0, &cfg, 0, 0.5, 4).is_err());
    }

    #[test]
    fn contraction_controls_vanish() {
        let (f0, cfg) = setup();
        let cfg = cfg.with_dt(0.05);
        let same = contraction_demo(&f0, &cfg, &cfg, 2, 0.1).unwrap();
        assert!(same.rows.iter().all(|r| r.norm == 0.0 && r.ratio == 0.0));
        let zero = PhaseField::zeros(*f0.grid(), f0.repr());
        let z = contraction_demo(&zero, &cfg, &cfg.with_dt(0.025), 2, 0.1).unwrap();
        assert!(z.rows.iter().all(|r| r.norm == 0.0));
        assert!(contraction_demo(&f0, &cfg, &cfg, 5, 0.1).is_err());
    }

    #[test]
    fn tuned_horizon_hits_the_target_factor() {
        let (f0, cfg) = setup();
        let c = contraction_horizon(&f0, &cfg.with_dt(0.05), 0.5).unwrap();
        let factor = 4.0 * c.c * c.c0 * c.horizon.sqrt();
        assert!((factor - 0.5).abs() < 0.02, "{c:?}");
    }
}

use serde::{Deserialize, Serialize};

use super::interp::Interp;
use super::{q_direct_with, CollisionKernelSpec, Sign};
use crate::spectral_core::{lp_project, DyadicLevel, PhaseField, ProjAxis, ProjMode, Repr};
use crate::Result;

/// Largest per-cell moments of a collision output.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mass_delta: f64,
    pub momentum_delta: f64,
    pub energy_delta: f64,
}

/// `int Q dv`, `int v Q dv`, `int |v|^2 Q dv` per spatial cell, maximised over cells.
pub fn conserved_moments(qf: &PhaseField) -> Moments {
    let q = qf.to(Repr::XV);
    let g = *q.grid();
    let dv = g.dv().powi(g.d as i32);
    let mut out = Moments {
        mass_delta: 0.0,
        momentum_delta: 0.0,
        energy_delta: 0.0,
    };
    for ix in 0..g.n_x() {
        let s = q.slice(ix);
        let mut mass = crate::C64::new(0.0, 0.0);
        let mut mom = [crate::C64::new(0.0, 0.0); 3];
        let mut en = crate::C64::new(0.0, 0.0);
        for (j, z) in s.iter().enumerate() {
            let idx = g.v_multi(j);
            let mut v2 = 0.0;
            for k in 0..g.d {
                let v = g.v_coord(idx[k]);
                mom[k] += z * v;
                v2 += v * v;
            }
            mass += z;
            en += z * v2;
        }
        let m = mom.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        out.mass_delta = out.mass_delta.max(mass.norm() * dv);
        out.momentum_delta = out.momentum_delta.max(m * dv);
        out.energy_delta = out.energy_delta.max(en.norm() * dv);
    }
    out
}

/// Outcome of one annihilation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnihilationReport {
    pub m: u64,
    pub m1: u64,
    pub m2: u64,
    /// `||P_M Q+(P_M1 f, P_M2 g)|| / (||f|| ||g||)`
    pub ratio: f64,
    /// Whether `M >= 10 max(M1, M2)`, the regime where the ratio must vanish.
    pub asserted: bool,
    pub threshold: f64,
    pub passed: bool,
}

/// Annihilation check with sharp annular `xi`-projectors and support-preserving interpolation.
pub fn check_annihilation(
    ft: &PhaseField,
    gt: &PhaseField,
    m: DyadicLevel,
    m1: DyadicLevel,
    m2: DyadicLevel,
    spec: &CollisionKernelSpec,
) -> Result<AnnihilationReport> {
    check_annihilation_with(ft, gt, m, m1, m2, spec, ProjMode::SharpAnnulus, Interp::Multilinear)
}

/// [`check_annihilation`] with a chosen projector shape and interpolation.
///
/// The ratio must fall below `1e-12` for sharp projectors and `1e-8` for smooth ones.
#[allow(clippy::too_many_arguments)]
pub fn check_annihilation_with(
    ft: &PhaseField,
    gt: &PhaseField,
    m: DyadicLevel,
    m1: DyadicLevel,
    m2: DyadicLevel,
    spec: &CollisionKernelSpec,
    mode: ProjMode,
    interp: Interp,
) -> Result<AnnihilationReport> {
    let fp = lp_project(ft, ProjAxis::Xi, m1, mode)?;
    let gp = lp_project(gt, ProjAxis::Xi, m2, mode)?;
    let q = q_direct_with(&fp, &gp, spec, Sign::Gain, interp)?.to(Repr::XXi);
    let out = lp_project(&q, ProjAxis::Xi, m, mode)?;
    let denom = ft.l2_norm() * gt.l2_norm();
    let ratio = if denom == 0.0 { 0.0 } else { out.l2_norm() / denom };
    let asserted = m.value() >= 10 * m1.value().max(m2.value());
    let threshold = match mode {
        ProjMode::SharpBall | ProjMode::SharpAnnulus => 1e-12,
        _ => 1e-8,
    };
    Ok(AnnihilationReport {
        m: m.value(),
        m1: m1.value(),
        m2: m2.value(),
        ratio,
        asserted,
        threshold,
        passed: !asserted || ratio < threshold,
    })
}

/// [`check_annihilation`] over every triple of `levels`, one collision per `(M1, M2)`.
pub fn annihilation_sweep(
    ft: &PhaseField,
    gt: &PhaseField,
    levels: &[DyadicLevel],
    spec: &CollisionKernelSpec,
) -> Result<Vec<AnnihilationReport>> {
    let mode = ProjMode::SharpAnnulus;
    let denom = ft.l2_norm() * gt.l2_norm();
    let mut out = Vec::with_capacity(levels.len().pow(3));
    for &m1 in levels {
        let fp = lp_project(ft, ProjAxis::Xi, m1, mode)?;
        for &m2 in levels {
            let gp = lp_project(gt, ProjAxis::Xi, m2, mode)?;
            let q = q_direct_with(&fp, &gp, spec, Sign::Gain, Interp::Multilinear)?.to(Repr::XXi);
            for &m in levels {
                let proj = lp_project(&q, ProjAxis::Xi, m, mode)?;
                let ratio = if denom == 0.0 { 0.0 } else { proj.l2_norm() / denom };
                let asserted = m.value() >= 10 * m1.value().max(m2.value());
                out.push(AnnihilationReport {
                    m: m.value(),
                    m1: m1.value(),
                    m2: m2.value(),
                    ratio,
                    asserted,
                    threshold: 1e-12,
                    passed: !asserted || ratio < 1e-12,
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::{DomainKind, SpectralGrid};
    use crate::C64;
    use rand::{Rng, SeedableRng};

    fn random(g: SpectralGrid, seed: u64) -> PhaseField {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let data = (0..g.len())
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        PhaseField::from_data(g, Repr::XV, data).unwrap().to(Repr::XXi)
    }

    #[test]
    fn zero_field_has_zero_moments() {
        let g = SpectralGrid::new(2, 4, 8, 4.0, DomainKind::TorusBox).unwrap();
        let m = conserved_moments(&PhaseField::zeros(g, Repr::XV));
        assert_eq!((m.mass_delta, m.momentum_delta, m.energy_delta), (0.0, 0.0, 0.0));
    }

    #[test]
    fn annihilation_far_level_vanishes() {
        let g = SpectralGrid::new(2, 4, 32, 16.0, DomainKind::TorusBox).unwrap();
        let (f, h) = (random(g, 3), random(g, 4));
        let spec = CollisionKernelSpec {
            n_sphere: 8,
            n_zhat: 8,
            n_radial: 8,
            ..Default::default()
        };
        let l = |n| DyadicLevel::new(n).unwrap();
        let r = check_annihilation(&f, &h, l(16), l(1), l(1), &spec).unwrap();
        assert!(r.asserted && r.passed && r.ratio < 1e-14, "{}", r.ratio);
        let near = check_annihilation(&f, &h, l(2), l(2), l(1), &spec).unwrap();
        assert!(!near.asserted && near.passed && near.ratio > 0.0);
        let z = PhaseField::zeros(g, Repr::XXi);
        let zr = check_annihilation(&z, &h, l(16), l(1), l(1), &spec).unwrap();
        assert_eq!(zr.ratio, 0.0);
        assert!(near.ratio > 1e-6);
        let levels: Vec<DyadicLevel> = [1, 2, 16].into_iter().map(l).collect();
        let sweep = annihilation_sweep(&f, &h, &levels, &spec).unwrap();
        assert_eq!(sweep.len(), 27);
        let one = sweep.iter().find(|r| (r.m, r.m1, r.m2) == (16, 1, 1)).unwrap();
        assert_eq!(one.ratio, r.ratio);
        let two = sweep.iter().find(|r| (r.m, r.m1, r.m2) == (2, 2, 1)).unwrap();
        assert_eq!(two.ratio, near.ratio);
    }
}

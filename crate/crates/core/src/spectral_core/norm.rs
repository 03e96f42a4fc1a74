use serde::{Deserialize, Serialize};

use super::field::{PhaseField, Repr};
use super::propagator::trajectory;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NormKind {
    /// `L^p` over `(t, x, xi)` on a uniformly sampled trajectory.
    LpSpacetime,
    /// `|<grad_x>^s <v>^r f|_{L^2}`, i.e. `H^s_x H^r_xi` on the Fourier side.
    SobolevHsHr,
    /// `|<v>^r f|_{L^2_{x,v}}`.
    WeightedL2r,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NormSpec {
    pub kind: NormKind,
    pub p: f64,
    pub s: f64,
    pub r: f64,
    pub t_end: f64,
    pub time_samples: usize,
}

impl NormSpec {
    pub fn lp_spacetime(p: f64, t_end: f64, time_samples: usize) -> Self {
        Self {
            kind: NormKind::LpSpacetime,
            p,
            s: 0.0,
            r: 0.0,
            t_end,
            time_samples,
        }
    }

    pub fn sobolev(s: f64, r: f64) -> Self {
        Self {
            kind: NormKind::SobolevHsHr,
            p: 2.0,
            s,
            r,
            t_end: 0.0,
            time_samples: 2,
        }
    }

    pub fn weighted(r: f64) -> Self {
        Self {
            kind: NormKind::WeightedL2r,
            p: 2.0,
            s: 0.0,
            r,
            t_end: 0.0,
            time_samples: 2,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.p >= 1.0) {
            return Err(Error::Config(format!("Lebesgue exponent p = {} < 1", self.p)));
        }
        if !(self.s.is_finite() && self.r.is_finite()) {
            return Err(Error::Config("regularity indices must be finite".into()));
        }
        if self.time_samples < 2 {
            return Err(Error::Config("time_samples must be at least 2".into()));
        }
        Ok(())
    }
}

/// Input of [`norm`]: a single field or a uniformly sampled trajectory on `[0, T]`.
#[derive(Debug, Clone, Copy)]
pub enum NormInput<'a> {
    Field(&'a PhaseField),
    Trajectory(&'a [PhaseField]),
}

fn japanese(z: &[f64]) -> f64 {
    (1.0 + z.iter().map(|c| c * c).sum::<f64>()).sqrt()
}

/// `|<grad_x>^s <v>^r f|_{L^2}` evaluated as Fourier multipliers in the `KV` representation.
pub fn sobolev_norm(field: &PhaseField, s: f64, r: f64) -> f64 {
    let mut kv = field.to(Repr::KV);
    kv.multiply_by(|k, v| crate::C64::new(japanese(k).powf(s) * japanese(v).powf(r), 0.0));
    kv.l2_norm()
}

/// `L^p_{t,x,xi}` norm of a trajectory sampled uniformly on `[0, t_end]`.
///
/// Time is integrated with the composite trapezoid rule, `x` and `xi` with cell sums.
pub fn lp_spacetime_norm(traj: &[PhaseField], p: f64, t_end: f64) -> f64 {
    let n = traj.len();
    let dt = if n > 1 { t_end / (n - 1) as f64 } else { 0.0 };
    let mut total = 0.0;
    for (i, f) in traj.iter().enumerate() {
        let xi = f.to(Repr::XXi);
        let s: f64 = xi.data().iter().map(|z| z.norm().powf(p)).sum::<f64>() * xi.cell_measure();
        let w = if i == 0 || i == n - 1 { 0.5 } else { 1.0 };
        total += w * dt * s;
    }
    total.powf(1.0 / p)
}

/// `L^p_{t,x,xi}` norm of the free evolution of `field` over `[0, t_end]`.
pub fn propagated_lp_norm(field: &PhaseField, p: f64, t_end: f64, samples: usize) -> f64 {
    let traj = trajectory(field, t_end, samples, Repr::XXi);
    lp_spacetime_norm(&traj, p, t_end)
}

/// Evaluate the norm described by `spec`.
pub fn norm(input: NormInput<'_>, spec: &NormSpec) -> Result<f64> {
    spec.validate()?;
    match (spec.kind, input) {
        (NormKind::LpSpacetime, NormInput::Trajectory(traj)) => {
            if traj.len() != spec.time_samples {
                return Err(Error::Config(format!(
                    "trajectory has {} samples but the spec asks for {}",
                    traj.len(),
                    spec.time_samples
                )));
            }
            Ok(lp_spacetime_norm(traj, spec.p, spec.t_end))
        }
        (NormKind::LpSpacetime, NormInput::Field(_)) => Err(Error::Config("space-time norms need a trajectory".into())),
        (NormKind::SobolevHsHr, NormInput::Field(f)) => Ok(sobolev_norm(f, spec.s, spec.r)),
        (NormKind::WeightedL2r, NormInput::Field(f)) => Ok(sobolev_norm(f, 0.0, spec.r)),
        (_, NormInput::Trajectory(traj)) => {
            let mut m: f64 = 0.0;
            for f in traj {
                m = m.max(norm(NormInput::Field(f), spec)?);
            }
            Ok(m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::SpectralGrid;
    use crate::C64;

    #[test]
    fn zero_field_has_zero_norm() {
        let g = SpectralGrid::torus(2, 8, 8, 4.0).unwrap();
        let z = PhaseField::zeros(g, Repr::XV);
        assert_eq!(norm(NormInput::Field(&z), &NormSpec::sobolev(1.0, 2.0)).unwrap(), 0.0);
    }

    #[test]
    fn single_mode_sobolev_weight() {
        let g = SpectralGrid::torus(2, 8, 8, 4.0).unwrap();
        let f = PhaseField::from_coord_fn(g, Repr::KV, |k, v| {
            if k == [2.0, -1.0] && v == [0.0, 0.0] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let f = f.scaled(C64::new(1.0 / f.l2_norm(), 0.0));
        let n = norm(NormInput::Field(&f), &NormSpec::sobolev(1.0, 0.0)).unwrap();
        assert!((n - 6f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn bad_specs_are_rejected() {
        let g = SpectralGrid::torus(1, 4, 4, 1.0).unwrap();
        let z = PhaseField::zeros(g, Repr::XV);
        let mut s = NormSpec::sobolev(0.0, 0.0);
        s.p = 0.5;
        assert!(norm(NormInput::Field(&z), &s).is_err());
        let lp = NormSpec::lp_spacetime(2.0, 1.0, 3);
        assert!(norm(NormInput::Field(&z), &lp).is_err());
        let tr = vec![z.clone(), z.clone()];
        assert!(norm(NormInput::Trajectory(&tr), &lp).is_err());
    }

    #[test]
    fn l2_spacetime_of_unitary_flow() {
        let g = SpectralGrid::torus(1, 8, 16, 4.0).unwrap();
        let f = PhaseField::from_xv_fn(g, |x, v| C64::new(x[0].cos() * (-v[0] * v[0]).exp(), 0.0));
        let n = propagated_lp_norm(&f, 2.0, 2.0, 9);
        assert!((n - f.l2_norm() * 2f64.sqrt()).abs() < 1e-12);
    }
}

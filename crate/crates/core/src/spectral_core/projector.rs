use serde::{Deserialize, Serialize};

use super::field::{PhaseField, Repr};
use crate::{Error, Result, C64};

/// Dyadic scale `N = 2^j >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct DyadicLevel(u64);

impl DyadicLevel {
    pub fn new(value: u64) -> Result<Self> {
        if value == 0 || !value.is_power_of_two() {
            return Err(Error::Config(format!("dyadic level {value} is not a power of two")));
        }
        Ok(Self(value))
    }

    pub fn value(&self) -> u64 {
        self.0
    }

    pub fn as_f64(&self) -> f64 {
        self.0 as f64
    }

    /// All dyadic levels `1, 2, 4, ...` not exceeding `max`.
    pub fn up_to(max: f64) -> Vec<DyadicLevel> {
        let mut out = Vec::new();
        let mut n = 1u64;
        while (n as f64) <= max {
            out.push(DyadicLevel(n));
            n *= 2;
        }
        out
    }
}

/// Which Fourier variable a projector acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProjAxis {
    /// Frequencies `k` of `x`.
    X,
    /// Frequencies of the `xi` variable; these are the velocities `v`.
    Xi,
}

/// Shape of the frequency cut-off.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProjMode {
    /// `chi(|zeta| / N)`.
    Ball,
    /// `phi_N(|zeta|) = chi(|zeta| / N) - chi(2 |zeta| / N)`.
    Annulus,
    /// Indicator of `|zeta| <= N`.
    SharpBall,
    /// Indicator of `N/2 < |zeta| <= N`.
    SharpAnnulus,
}

fn psi(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// Smooth cut-off equal to 1 on `|x| <= 1` and 0 on `|x| >= 2`.
pub fn chi(x: f64) -> f64 {
    let a = x.abs();
    if a <= 1.0 {
        return 1.0;
    }
    if a >= 2.0 {
        return 0.0;
    }
    let p = psi(2.0 - a);
    p / (p + psi(a - 1.0))
}

/// Littlewood-Paley annulus multiplier `chi(z/N) - chi(2z/N)`, supported on `N/2 <= |z| <= 2N`.
pub fn phi(n: f64, z: f64) -> f64 {
    chi(z / n) - chi(2.0 * z / n)
}

/// Multiplier value of a projector at frequency magnitude `z`.
pub fn multiplier(mode: ProjMode, n: f64, z: f64) -> f64 {
    match mode {
        ProjMode::Ball => chi(z / n),
        ProjMode::Annulus => phi(n, z),
        ProjMode::SharpBall => {
            if z <= n {
                1.0
            } else {
                0.0
            }
        }
        ProjMode::SharpAnnulus => {
            if z > n / 2.0 && z <= n {
                1.0
            } else {
                0.0
            }
        }
    }
}

/// Largest admissible level on an axis.
pub fn max_level(field: &PhaseField, axis: ProjAxis) -> f64 {
    let g = field.grid();
    match axis {
        ProjAxis::X => g.nx as f64 / 2.0 * g.dk(),
        ProjAxis::Xi => g.v_max,
    }
}

/// Littlewood-Paley projection in `x` (multiplier in `k`) or in `xi`
/// (multiplier in `v`). The result keeps the representation of the input.
pub fn lp_project(field: &PhaseField, axis: ProjAxis, level: DyadicLevel, mode: ProjMode) -> Result<PhaseField> {
    let n = level.as_f64();
    let lim = max_level(field, axis);
    if n > lim {
        return Err(Error::Range(format!(
            "level {n} exceeds the grid limit {lim} on the {axis:?} axis"
        )));
    }
    let work = match axis {
        ProjAxis::X => Repr::KV,
        ProjAxis::Xi => {
            if field.repr() == Repr::KV {
                Repr::KV
            } else {
                Repr::XV
            }
        }
    };
    let mut w = field.to(work);
    w.multiply_by(|a, b| {
        let z = match axis {
            ProjAxis::X => a,
            ProjAxis::Xi => b,
        };
        let r = z.iter().map(|c| c * c).sum::<f64>().sqrt();
        C64::new(multiplier(mode, n, r), 0.0)
    });
    Ok(w.to(field.repr()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::SpectralGrid;

    #[test]
    fn chi_profile() {
        assert_eq!(chi(0.3), 1.0);
        assert_eq!(chi(-1.0), 1.0);
        assert_eq!(chi(2.0), 0.0);
        assert!((chi(1.5) - 0.5).abs() < 1e-15);
        let mut prev = 1.0;
        for i in 0..=100 {
            let c = chi(1.0 + i as f64 / 100.0);
            assert!(c <= prev + 1e-15);
            prev = c;
        }
    }

    #[test]
    fn annulus_support() {
        for &z in &[0.0, 0.49, 2.01, 5.0] {
            assert_eq!(phi(1.0, z), 0.0);
        }
        assert!(phi(4.0, 4.0) > 0.99);
    }

    #[test]
    fn dyadic_levels() {
        assert!(DyadicLevel::new(3).is_err());
        assert!(DyadicLevel::new(0).is_err());
        let l: Vec<u64> = DyadicLevel::up_to(9.0).iter().map(|l| l.value()).collect();
        assert_eq!(l, vec![1, 2, 4, 8]);
    }

    #[test]
    fn range_error_beyond_nyquist() {
        let g = SpectralGrid::torus(1, 8, 8, 4.0).unwrap();
        let f = PhaseField::zeros(g, Repr::XV);
        assert!(matches!(
            lp_project(&f, ProjAxis::X, DyadicLevel::new(8).unwrap(), ProjMode::Ball),
            Err(Error::Range(_))
        ));
        assert!(lp_project(&f, ProjAxis::X, DyadicLevel::new(4).unwrap(), ProjMode::Ball).is_ok());
        assert!(matches!(
            lp_project(&f, ProjAxis::Xi, DyadicLevel::new(8).unwrap(), ProjMode::Ball),
            Err(Error::Range(_))
        ));
    }

    #[test]
    fn ball_keeps_low_modes_and_kills_high_ones() {
        let g = SpectralGrid::torus(2, 32, 8, 4.0).unwrap();
        let low = PhaseField::from_xv_fn(g, |x, v| C64::new((x[0] + x[1]).cos() * (-v[0] * v[0]).exp(), 0.0));
        let n1 = DyadicLevel::new(2).unwrap();
        let p = lp_project(&low, ProjAxis::X, n1, ProjMode::Ball).unwrap();
        assert!(p.max_abs_diff(&low) < 1e-13);
        let high = PhaseField::from_xv_fn(g, |x, _| C64::from_polar(1.0, 9.0 * x[0]));
        let p = lp_project(&high, ProjAxis::X, n1, ProjMode::Ball).unwrap();
        assert!(p.max_abs() < 1e-13);
    }
}

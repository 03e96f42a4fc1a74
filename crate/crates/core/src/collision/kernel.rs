use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use statrs::function::gamma::gamma;

use crate::{Error, Result};

/// Shape of the angular factor `b(cos theta)`, scaled by the cutoff constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AngularKind {
    /// `b(c) = C |c|`
    AbsCos,
    /// `b(c) = C c^2`
    CosSquared,
}

impl AngularKind {
    fn profile(self, c: f64) -> f64 {
        match self {
            AngularKind::AbsCos => c.abs(),
            AngularKind::CosSquared => c * c,
        }
    }

    /// `profile(c) / c` for `c >= 0`, continuous at zero.
    fn profile_over_c(self, c: f64) -> f64 {
        match self {
            AngularKind::AbsCos => 1.0,
            AngularKind::CosSquared => c,
        }
    }

    /// `int_{S^{d-1}} profile(e . omega) d omega`.
    fn sphere_integral(self, d: usize) -> f64 {
        match (self, d) {
            (_, 1) => 2.0,
            (AngularKind::AbsCos, 2) => 4.0,
            (AngularKind::CosSquared, 2) => PI,
            (AngularKind::AbsCos, _) => 2.0 * PI,
            (AngularKind::CosSquared, _) => 4.0 * PI / 3.0,
        }
    }
}

/// How the singular weight `|eta|^{-(d+gamma)}` is integrated on the Fourier side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EtaRule {
    /// Graded composite Gauss panels with a Duffy-transformed cell at the origin.
    Graded,
    /// Lattice sum over the `xi` grid; the origin cell carries the exact cell integral.
    CellAverage,
}

/// Collision kernel `B(z, omega) = |z|^gamma b(cos theta)` and the resolution of its quadratures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CollisionKernelSpec {
    pub gamma: f64,
    pub angular: AngularKind,
    /// Grad cutoff constant `C`; `b(c) = C * profile(c) <= C |c|`.
    pub cutoff: f64,
    /// Angular nodes on the collision sphere (sigma on the Fourier side, omega in velocity space).
    pub n_sphere: usize,
    /// Directions of the relative velocity `z = u - v` (even).
    pub n_zhat: usize,
    /// Radial Gauss-Jacobi nodes for `|z|`.
    pub n_radial: usize,
    pub eta_reg: EtaRule,
    /// Scale on the Gauss node count per `eta` panel.
    pub eta_oversample: f64,
    /// Padding of the `eta` domain beyond the data support, in units of `dxi`.
    pub eta_margin: f64,
    /// Relative threshold below which samples count as outside the support.
    pub support_tol: f64,
}

impl Default for CollisionKernelSpec {
    fn default() -> Self {
        CollisionKernelSpec {
            gamma: 0.0,
            angular: AngularKind::AbsCos,
            cutoff: 1.0,
            n_sphere: 24,
            n_zhat: 32,
            n_radial: 32,
            eta_reg: EtaRule::Graded,
            eta_oversample: 1.0,
            eta_margin: 2.0,
            support_tol: 1e-13,
        }
    }
}

/// Kernel value with a flag raised when the singular point was regularised.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelValue {
    pub value: f64,
    pub regularized: bool,
}

impl CollisionKernelSpec {
    pub fn maxwellian(angular: AngularKind) -> Self {
        CollisionKernelSpec {
            angular,
            ..Default::default()
        }
    }

    pub fn soft(gamma: f64) -> Self {
        CollisionKernelSpec {
            gamma,
            ..Default::default()
        }
    }

    pub fn validate(&self, d: usize) -> Result<()> {
        if !(1..=3).contains(&d) {
            return Err(Error::UnsupportedDimension(d));
        }
        if !self.gamma.is_finite() || self.gamma > 0.0 || self.gamma <= -(d as f64) {
            return Err(Error::UnsupportedRegime(format!(
                "gamma = {} outside (-{d}, 0]",
                self.gamma
            )));
        }
        if !(self.cutoff.is_finite() && self.cutoff >= 0.0) {
            return Err(Error::Config(format!("cutoff constant {} must be >= 0", self.cutoff)));
        }
        if self.n_sphere < 2 || self.n_radial < 2 || self.n_zhat < 2 || !self.n_zhat.is_multiple_of(2) {
            return Err(Error::Config("quadrature sizes must be >= 2 and n_zhat even".into()));
        }
        if !(self.eta_oversample > 0.0 && self.eta_margin >= 0.0 && self.support_tol >= 0.0) {
            return Err(Error::Config("invalid eta quadrature parameters".into()));
        }
        Ok(())
    }

    /// Angular factor `b(c)`.
    pub fn b(&self, c: f64) -> f64 {
        self.cutoff * self.angular.profile(c)
    }

    /// `||b||_{L^1(S^{d-1})}` in closed form.
    pub fn b_norm(&self, d: usize) -> f64 {
        self.cutoff * self.angular.sphere_integral(d)
    }

    /// Angular weight in the sigma parametrisation, `v* = (v+u)/2 + |v-u| sigma / 2`.
    ///
    /// `t` is the cosine between `sigma` and the relative velocity (or `xi`).
    pub fn b_sigma(&self, d: usize, t: f64) -> f64 {
        let c = ((1.0 - t) / 2.0).clamp(0.0, 1.0).sqrt();
        match d {
            1 => 2.0 * c * self.b(c),
            2 => self.b(c),
            _ => self.cutoff * self.angular.profile_over_c(c) / 2.0,
        }
    }

    /// Constant `c` in the unitary transform of `|w|^gamma`, which is `c |eta|^{-(d+gamma)}`.
    ///
    /// For `gamma = 0` the transform is `(2 pi)^{d/2} delta`; the returned value is that mass.
    pub fn phi_hat_const(&self, d: usize) -> f64 {
        let df = d as f64;
        if self.gamma == 0.0 {
            (2.0 * PI).powf(df / 2.0)
        } else {
            let g = self.gamma;
            2f64.powf(g + df / 2.0) * gamma((df + g) / 2.0) / gamma(-g / 2.0)
        }
    }
}

/// `B(u_rel, omega) = |u_rel|^gamma b(cos theta)`, `cos theta = u_rel . omega / |u_rel|`.
pub fn eval_kernel(u_rel: &[f64], omega: &[f64], spec: &CollisionKernelSpec) -> Result<KernelValue> {
    if u_rel.len() != omega.len() {
        return Err(Error::Geometry("dimension mismatch".into()));
    }
    let on: f64 = omega.iter().map(|w| w * w).sum::<f64>().sqrt();
    if (on - 1.0).abs() > 1e-12 {
        return Err(Error::Geometry(format!("|omega| = {on} is not 1")));
    }
    let r: f64 = u_rel.iter().map(|w| w * w).sum::<f64>().sqrt();
    if r == 0.0 {
        return Ok(KernelValue {
            value: 0.0,
            regularized: true,
        });
    }
    let c: f64 = u_rel.iter().zip(omega).map(|(a, b)| a * b).sum::<f64>() / r;
    Ok(KernelValue {
        value: r.powf(spec.gamma) * spec.b(c),
        regularized: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quadrature::gauss_legendre_on;

    #[test]
    fn kernel_examples() {
        let s = CollisionKernelSpec::default();
        let a = eval_kernel(&[3.0, 0.0], &[0.6, 0.8], &s).unwrap().value;
        let b = eval_kernel(&[0.5, 0.0], &[0.6, 0.8], &s).unwrap().value;
        assert!((a - b).abs() < 1e-15 && (a - 0.6).abs() < 1e-15);
        assert_eq!(eval_kernel(&[1.0, 0.0], &[0.0, 1.0], &s).unwrap().value, 0.0);
        let soft = CollisionKernelSpec::soft(-1.0);
        let v = eval_kernel(&[2.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &soft).unwrap().value;
        assert!((v - 0.5).abs() < 1e-15);
        let z = eval_kernel(&[0.0, 0.0], &[1.0, 0.0], &soft).unwrap();
        assert!(z.regularized);
        assert!(eval_kernel(&[1.0, 0.0], &[1.0, 1.0], &s).is_err());
    }

    #[test]
    fn validation_rejects_bad_gamma() {
        assert!(CollisionKernelSpec::soft(0.5).validate(2).is_err());
        assert!(CollisionKernelSpec::soft(-2.0).validate(2).is_err());
        assert!(CollisionKernelSpec::soft(-1.5).validate(2).is_ok());
    }

    #[test]
    fn sigma_weight_integrates_to_b_norm() {
        for kind in [AngularKind::AbsCos, AngularKind::CosSquared] {
            let s = CollisionKernelSpec::maxwellian(kind);
            let (x, w) = gauss_legendre_on(40, 0.0, 2.0 * PI);
            let q2: f64 = x.iter().zip(&w).map(|(p, w)| w * s.b_sigma(2, p.cos())).sum();
            assert!((q2 - s.b_norm(2)).abs() < 1e-12);
            let (c, w) = gauss_legendre_on(40, 0.0, 1.0);
            let q3: f64 = 2.0
                * PI
                * c.iter()
                    .zip(&w)
                    .map(|(c, w)| w * 4.0 * c * s.b_sigma(3, 1.0 - 2.0 * c * c))
                    .sum::<f64>();
            assert!((q3 - s.b_norm(3)).abs() < 1e-10);
            assert!((s.b_sigma(1, -1.0) + s.b_sigma(1, 1.0) - s.b_norm(1)).abs() < 1e-15);
            // omega-side check of the closed-form norm
            let mut qo = 0.0;
            for q in 0..4 {
                let (a, w) = gauss_legendre_on(20, q as f64 * PI / 2.0, (q + 1) as f64 * PI / 2.0);
                qo += a.iter().zip(&w).map(|(a, w)| w * s.b(a.cos())).sum::<f64>();
            }
            assert!((qo - s.b_norm(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn riesz_constant_matches_gaussian_transform() {
        // The unitary transform of exp(-|v|^2/2) is exp(-|xi|^2/2); the pairing
        // int |v|^gamma e^{-|v|^2/2} dv equals c int |eta|^{-(d+gamma)} e^{-|eta|^2/2} d eta.
        for d in 1..=3usize {
            for &g in &[-0.25, -0.5, -0.9] {
                let s = CollisionKernelSpec::soft(g);
                let df = d as f64;
                let area = 2.0 * PI.powf(df / 2.0) / gamma(df / 2.0);
                let lhs = area * 2f64.powf((df + g) / 2.0 - 1.0) * gamma((df + g) / 2.0);
                let rhs = s.phi_hat_const(d) * area * 2f64.powf(-g / 2.0 - 1.0) * gamma(-g / 2.0);
                assert!((lhs - rhs).abs() < 1e-12 * lhs, "d={d} g={g}");
            }
        }
    }
}

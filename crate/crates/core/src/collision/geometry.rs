use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A binary collision: incoming `(u, v)`, direction `omega`, outgoing `(u_star, v_star)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CollisionPair {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub omega: Vec<f64>,
    pub u_star: Vec<f64>,
    pub v_star: Vec<f64>,
}

impl CollisionPair {
    pub fn new(u: &[f64], v: &[f64], omega: &[f64]) -> Result<Self> {
        let (u_star, v_star) = post_collision(u, v, omega)?;
        Ok(CollisionPair {
            u: u.to_vec(),
            v: v.to_vec(),
            omega: omega.to_vec(),
            u_star,
            v_star,
        })
    }

    /// Largest of the momentum and energy defects.
    pub fn conservation_defect(&self) -> f64 {
        let mut m = 0.0f64;
        for k in 0..self.u.len() {
            let before = self.u[k] + self.v[k];
            let after = self.u_star[k] + self.v_star[k];
            m = m.max((before - after).abs());
        }
        let e0 = dot(&self.u, &self.u) + dot(&self.v, &self.v);
        let e1 = dot(&self.u_star, &self.u_star) + dot(&self.v_star, &self.v_star);
        m.max((e0 - e1).abs())
    }
}

/// `u* = u + (omega.(v-u)) omega`, `v* = v - (omega.(v-u)) omega`.
pub fn post_collision(u: &[f64], v: &[f64], omega: &[f64]) -> Result<(Vec<f64>, Vec<f64>)> {
    if u.len() != v.len() || u.len() != omega.len() || u.is_empty() {
        return Err(Error::Geometry("dimension mismatch".into()));
    }
    let n = dot(omega, omega).sqrt();
    if (n - 1.0).abs() > 1e-12 {
        return Err(Error::Geometry(format!("|omega| = {n} is not 1")));
    }
    let p: f64 = omega.iter().zip(v.iter().zip(u)).map(|(w, (a, b))| w * (a - b)).sum();
    let us = u.iter().zip(omega).map(|(a, w)| a + p * w).collect();
    let vs = v.iter().zip(omega).map(|(a, w)| a - p * w).collect();
    Ok((us, vs))
}

/// Split `xi` against a unit vector `sigma`: `xi^± = (xi ± |xi| sigma) / 2`.
pub fn xi_split(xi: &[f64], sigma: &[f64]) -> (Vec<f64>, Vec<f64>) {
    let n = dot(xi, xi).sqrt();
    let plus = xi.iter().zip(sigma).map(|(x, s)| (x + n * s) / 2.0).collect();
    let minus = xi.iter().zip(sigma).map(|(x, s)| (x - n * s) / 2.0).collect();
    (plus, minus)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn head_on_exchange() {
        let (us, vs) = post_collision(&[1.0, 0.0, 0.0], &[0.0; 3], &[1.0, 0.0, 0.0]).unwrap();
        assert_eq!(us, vec![0.0; 3]);
        assert_eq!(vs, vec![1.0, 0.0, 0.0]);
    }

    #[test]
    fn grazing_is_identity() {
        let (us, vs) = post_collision(&[1.0, 2.0], &[1.0, -1.0], &[1.0, 0.0]).unwrap();
        assert_eq!(us, vec![1.0, 2.0]);
        assert_eq!(vs, vec![1.0, -1.0]);
    }

    #[test]
    fn rejects_non_unit_omega() {
        assert!(post_collision(&[1.0], &[0.0], &[0.5]).is_err());
    }

    fn unit(a: f64, b: f64) -> Vec<f64> {
        vec![a.sin() * b.cos(), a.sin() * b.sin(), a.cos()]
    }

    proptest! {
        #[test]
        fn conserves_momentum_and_energy(
            u in prop::array::uniform3(-5.0f64..5.0),
            v in prop::array::uniform3(-5.0f64..5.0),
            a in 0.0f64..std::f64::consts::PI,
            b in 0.0f64..(2.0 * std::f64::consts::PI),
        ) {
            let p = CollisionPair::new(&u, &v, &unit(a, b)).unwrap();
            prop_assert!(p.conservation_defect() < 1e-12);
        }

        #[test]
        fn xi_split_geometry(
            xi in prop::array::uniform3(-20.0f64..20.0),
            a in 0.0f64..std::f64::consts::PI,
            b in 0.0f64..(2.0 * std::f64::consts::PI),
        ) {
            let (p, m) = xi_split(&xi, &unit(a, b));
            let n2 = dot(&xi, &xi);
            for k in 0..3 {
                prop_assert!((p[k] + m[k] - xi[k]).abs() < 1e-12);
            }
            prop_assert!(dot(&p, &m).abs() < 1e-12 * n2.max(1.0));
            prop_assert!((dot(&p, &p) + dot(&m, &m) - n2).abs() < 1e-12 * n2.max(1.0));
        }
    }
}

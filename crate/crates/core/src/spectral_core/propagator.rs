use super::field::{PhaseField, Repr};
use crate::C64;

/// Free transport `f(t, x, v) = f(0, x - t v, v)`.
///
/// In the `KV` representation this is the phase multiplier `e^{-i t k.v}`; the
/// result is returned in the representation of the input.
pub fn propagate(field: &PhaseField, t: f64) -> PhaseField {
    if t == 0.0 {
        return field.clone();
    }
    let mut kv = field.to(Repr::KV);
    kv.multiply_by(|k, v| {
        let kv: f64 = k.iter().zip(v).map(|(a, b)| a * b).sum();
        C64::from_polar(1.0, -t * kv)
    });
    kv.to(field.repr())
}

/// Propagated copies of `field` at `n` uniform times in `[0, t_end]`, returned
/// in representation `repr`.
pub fn trajectory(field: &PhaseField, t_end: f64, n: usize, repr: Repr) -> Vec<PhaseField> {
    assert!(n >= 2, "a trajectory needs at least two samples");
    let kv = field.to(Repr::KV);
    (0..n)
        .map(|i| {
            let t = t_end * i as f64 / (n - 1) as f64;
            propagate(&kv, t).to(repr)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral_core::grid::SpectralGrid;
    use std::f64::consts::PI;

    fn grid() -> SpectralGrid {
        SpectralGrid::torus(2, 8, 8, 4.0).unwrap()
    }

    #[test]
    fn single_mode_phase() {
        let g = grid();
        // k = (1, 0) and the velocity grid point v = (2, 0).
        let f = PhaseField::from_coord_fn(g, Repr::KV, |k, v| {
            if k == [1.0, 0.0] && v == [2.0, 0.0] {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        });
        let full = propagate(&f, PI);
        assert!(full.max_abs_diff(&f) < 1e-14);
        let half = propagate(&f, PI / 2.0);
        assert!(half.max_abs_diff(&f.scaled(C64::new(-1.0, 0.0))) < 1e-14);
    }

    #[test]
    fn unitary_and_group_law() {
        let g = grid();
        let f = PhaseField::from_xv_fn(g, |x, v| {
            C64::new((x[0] - x[1]).cos() * (-v[0] * v[0]).exp(), v[1] * (-v[1] * v[1]).exp())
        });
        let a = propagate(&f, 0.7);
        assert!((a.l2_norm() - f.l2_norm()).abs() < 1e-12 * f.l2_norm());
        let b = propagate(&a, -1.9);
        let c = propagate(&f, -1.2);
        assert!(b.rel_l2_diff(&c) < 1e-12);
        assert!(propagate(&a, -0.7).rel_l2_diff(&f) < 1e-12);
    }

    #[test]
    fn trajectory_endpoints() {
        let g = grid();
        let f = PhaseField::from_xv_fn(g, |x, v| C64::new(x[0].sin() * (-v[0] * v[0]).exp(), 0.0));
        let tr = trajectory(&f, 1.5, 4, Repr::XV);
        assert_eq!(tr.len(), 4);
        assert!(tr[0].rel_l2_diff(&f) < 1e-13);
        assert!(tr[3].rel_l2_diff(&propagate(&f, 1.5)) < 1e-13);
    }
}

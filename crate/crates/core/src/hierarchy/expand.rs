use serde::{Deserialize, Serialize};

use super::maps::CollapseMap;
use super::tree::{Child, DuhamelTree};
use crate::collision::{collide, CollisionKernelSpec, Route};
use crate::spectral_core::{propagate, PhaseField, Repr};
use crate::{Error, Result};

/// The bilinear `Q~ = Q~+ - Q~-` used at every collision of an expansion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Collider {
    pub kernel: CollisionKernelSpec,
    pub route: Route,
}

impl Default for Collider {
    fn default() -> Self {
        Collider {
            kernel: CollisionKernelSpec::default(),
            route: Route::Bobylev,
        }
    }
}

impl Collider {
    pub fn new(kernel: CollisionKernelSpec, route: Route) -> Self {
        Collider { kernel, route }
    }

    /// `Q~(a, b)` in the `XXi` representation; `node` labels errors.
    pub fn apply(&self, a: &PhaseField, b: &PhaseField, node: usize) -> Result<PhaseField> {
        let q = collide(&a.to(Repr::XXi), &b.to(Repr::XXi), &self.kernel, self.route).map_err(|e| {
            Error::NumericalRange {
                node,
                msg: e.to_string(),
            }
        })?;
        finite(q, node)
    }
}

fn finite(f: PhaseField, node: usize) -> Result<PhaseField> {
    if f.is_finite() {
        Ok(f)
    } else {
        Err(Error::NumericalRange {
            node,
            msg: "non-finite values".into(),
        })
    }
}

fn check_times(k: usize, n: usize, want: usize) -> Result<()> {
    if n != want {
        return Err(Error::Config(format!("depth {k} needs {want} times, got {n}")));
    }
    Ok(())
}

/// Per-slot fields of a factorised hierarchy state.
///
/// Each slot remembers the time its field belongs to, and is propagated only
/// when a collision reads it.
#[derive(Debug, Clone)]
pub struct SlotState {
    slots: Vec<Option<(PhaseField, f64)>>,
}

impl SlotState {
    /// Slots `1..=n` holding `leaves` at time `t`.
    pub fn new(leaves: &[PhaseField], t: f64) -> Result<Self> {
        if let Some(first) = leaves.first() {
            for l in leaves {
                first.check_compatible(l)?;
            }
        }
        Ok(SlotState {
            slots: leaves.iter().map(|l| Some((l.to(Repr::XXi), t))).collect(),
        })
    }

    pub fn active(&self) -> Vec<usize> {
        (1..=self.slots.len())
            .filter(|&i| self.slots[i - 1].is_some())
            .collect()
    }

    fn take_at(&mut self, i: usize, t: f64) -> Result<PhaseField> {
        let (f, s) = self.slots[i - 1]
            .take()
            .ok_or_else(|| Error::Config(format!("slot {i} is not active")))?;
        Ok(propagate(&f, t - s))
    }

    /// `Q~_{a,b}`: merge slot `b` into slot `a` at time `t`.
    pub fn collide(&mut self, a: usize, b: usize, t: f64, op: &Collider) -> Result<()> {
        let fa = self.take_at(a, t)?;
        let fb = self.take_at(b, t)?;
        self.slots[a - 1] = Some((op.apply(&fa, &fb, b)?, t));
        Ok(())
    }

    /// Field of slot `i` propagated to time `t`.
    pub fn read(&self, i: usize, t: f64) -> Result<PhaseField> {
        let (f, s) = self.slots[i - 1]
            .as_ref()
            .ok_or_else(|| Error::Config(format!("slot {i} is not active")))?;
        Ok(propagate(f, t - s))
    }
}

/// `J_mu(f^{(k+1)})(t1, t2..t_{k+1})` read as an operator string over a [`SlotState`].
///
/// `times` holds `t2, .., t_{k+1}`; the result is in `XXi`.
pub fn eval_j_direct(mu: &CollapseMap, f: &PhaseField, t1: f64, times: &[f64], op: &Collider) -> Result<PhaseField> {
    let leaves = vec![f.clone(); mu.k() + 1];
    eval_j_direct_slots(mu, &leaves, t1, times, op)
}

/// [`eval_j_direct`] with an independent leaf per slot, all given at time `t_{k+1}`.
pub fn eval_j_direct_slots(
    mu: &CollapseMap,
    leaves: &[PhaseField],
    t1: f64,
    times: &[f64],
    op: &Collider,
) -> Result<PhaseField> {
    let k = mu.k();
    check_times(k, times.len(), k)?;
    check_times(k, leaves.len(), k + 1)?;
    let t = |j: usize| if j == 1 { t1 } else { times[j - 2] };
    let mut state = SlotState::new(leaves, t(k + 1))?;
    for j in (2..=k + 1).rev() {
        state.collide(mu.at(j), j, t(j), op)?;
    }
    let out = state.read(1, t1)?;
    finite(out, 1)
}

/// `D^{(1)}` of the Duhamel tree for the factorised input `f^{(k+1)} = f^{(x)(k+1)}`.
///
/// `times` holds `t1, .., t_{k+1}`; the result is in `XXi`.
pub fn expand_tree(tree: &DuhamelTree, f_leaf: &PhaseField, times: &[f64], op: &Collider) -> Result<PhaseField> {
    let leaves = vec![f_leaf.clone(); tree.k() + 1];
    expand_tree_slots(tree, &leaves, times, op)
}

/// [`expand_tree`] with leaf `F_i` read from `leaves[i - 1]`.
pub fn expand_tree_slots(
    tree: &DuhamelTree,
    leaves: &[PhaseField],
    times: &[f64],
    op: &Collider,
) -> Result<PhaseField> {
    let k = tree.k();
    check_times(k, times.len(), k + 1)?;
    check_times(k, leaves.len(), k + 1)?;
    let t = |j: usize| times[j - 1];
    // F_i = U_{-(k+1)} f
    let f_nodes: Vec<PhaseField> = leaves.iter().map(|l| propagate(&l.to(Repr::XXi), -t(k + 1))).collect();
    let mut d: Vec<Option<PhaseField>> = vec![None; k + 2];
    for j in (2..=k + 1).rev() {
        let (l, r) = tree.children(j);
        let lift = |c: Child| -> PhaseField {
            match c {
                Child::F(i) => propagate(&f_nodes[i - 1], t(j)),
                Child::D(m) => propagate(d[m].as_ref().expect("children are built first"), t(j)),
            }
        };
        let (cl, cr) = (lift(l), lift(r));
        d[j] = Some(propagate(&op.apply(&cl, &cr, j)?, -t(j)));
    }
    finite(propagate(d[2].as_ref().unwrap(), t(1)), 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::maps::enumerate_collapse_maps;
    use crate::hierarchy::oracle::tensor_oracle_d1;
    use crate::hierarchy::tree::build_duhamel_tree;
    use crate::spectral_core::SpectralGrid;
    use crate::C64;

    fn leaf(g: SpectralGrid, shift: f64, mode: f64) -> PhaseField {
        PhaseField::from_xv_fn(g, |x, v| {
            let w = (v[0] - shift) * (v[0] - shift);
            C64::new(
                (-w).exp() * (1.0 + 0.4 * (mode * x[0]).cos()),
                0.1 * (x[0]).sin() * (-w).exp(),
            )
        })
        .to(Repr::XXi)
    }

    fn grid1() -> SpectralGrid {
        SpectralGrid::torus(1, 8, 8, 4.0).unwrap()
    }

    fn leaves(g: SpectralGrid, n: usize) -> Vec<PhaseField> {
        (0..n)
            .map(|i| leaf(g, 0.7 * i as f64 - 1.0, 1.0 + (i % 2) as f64))
            .collect()
    }

    fn times(k: usize) -> Vec<f64> {
        (0..=k).map(|j| 0.9 - 0.17 * j as f64 + 0.03 * (j * j) as f64).collect()
    }

    #[test]
    fn single_collision_is_q() {
        let g = grid1();
        let op = Collider::default();
        let (a, b) = (leaf(g, 0.0, 1.0), leaf(g, 0.5, 2.0));
        let mu = CollapseMap::new(vec![1]).unwrap();
        let q = op.apply(&a, &b, 2).unwrap();
        let tree = build_duhamel_tree(&mu);
        let e = expand_tree_slots(&tree, &[a.clone(), b.clone()], &[0.0, 0.0], &op).unwrap();
        let j = eval_j_direct_slots(&mu, &[a, b], 0.0, &[0.0], &op).unwrap();
        assert!(e.max_abs_diff(&q) < 1e-12 && j.max_abs_diff(&q) < 1e-12);
        assert!(q.max_abs() > 1e-3);
    }

    #[test]
    fn zero_leaf_gives_zero() {
        let g = grid1();
        let z = PhaseField::zeros(g, Repr::XXi);
        let mu = CollapseMap::new(vec![1, 1]).unwrap();
        let op = Collider::default();
        let t = times(2);
        assert_eq!(
            expand_tree(&build_duhamel_tree(&mu), &z, &t, &op).unwrap().max_abs(),
            0.0
        );
        assert_eq!(eval_j_direct(&mu, &z, t[0], &t[1..], &op).unwrap().max_abs(), 0.0);
    }

    #[test]
    fn tree_and_operator_string_agree() {
        let g = grid1();
        let op = Collider::default();
        for k in 1..=4 {
            let ls = leaves(g, k + 1);
            let t = times(k);
            for mu in enumerate_collapse_maps(k).unwrap() {
                let e = expand_tree_slots(&build_duhamel_tree(&mu), &ls, &t, &op).unwrap();
                let j = eval_j_direct_slots(&mu, &ls, t[0], &t[1..], &op).unwrap();
                assert!(e.max_abs_diff(&j) < 1e-10, "mu={mu}: {}", e.max_abs_diff(&j));
                assert!(j.max_abs() > 1e-6, "mu={mu} is degenerate");
            }
        }
    }

    #[test]
    fn operator_string_matches_tensor_oracle() {
        let g = grid1();
        let op = Collider::default();
        let ls = leaves(g, 3);
        let t = times(2);
        for mu in enumerate_collapse_maps(2).unwrap() {
            let j = eval_j_direct_slots(&mu, &ls, t[0], &t[1..], &op).unwrap().to(Repr::XV);
            let o = tensor_oracle_d1(&mu, &ls, t[0], &t[1..], &op.kernel).unwrap();
            assert!(j.max_abs_diff(&o) < 1e-8, "mu={mu}: {}", j.max_abs_diff(&o));
        }
    }

    #[test]
    fn hand_traced_string() {
        // mu = (1,1): slot 3 merges into 1 at t3, then slot 2 into 1 at t2
        let g = grid1();
        let op = Collider::default();
        let ls = leaves(g, 3);
        let t = times(2);
        let s1 = op.apply(&ls[0], &ls[2], 3).unwrap();
        let s1 = propagate(&s1, t[1] - t[2]);
        let s2 = propagate(&ls[1], t[1] - t[2]);
        let want = propagate(&op.apply(&s1, &s2, 2).unwrap(), t[0] - t[1]);
        let mu = CollapseMap::new(vec![1, 1]).unwrap();
        let j = eval_j_direct_slots(&mu, &ls, t[0], &t[1..], &op).unwrap();
        assert!(j.max_abs_diff(&want) < 1e-12);
    }

    #[test]
    fn linear_in_each_slot() {
        let g = grid1();
        let op = Collider::default();
        let mu = CollapseMap::new(vec![1, 2, 1]).unwrap();
        let t = times(3);
        let ls = leaves(g, 4);
        let extra = leaf(g, 1.3, 3.0);
        for slot in [1, 3] {
            let run = |l: &PhaseField| {
                let mut v = ls.clone();
                v[slot] = l.clone();
                eval_j_direct_slots(&mu, &v, t[0], &t[1..], &op).unwrap()
            };
            let (a, b) = (C64::new(0.6, 0.2), C64::new(-1.1, 0.0));
            let lhs = run(&ls[slot].scaled(a).axpy(b, &extra));
            let rhs = run(&ls[slot]).scaled(a).axpy(b, &run(&extra));
            assert!(lhs.max_abs_diff(&rhs) < 1e-10 * rhs.max_abs());
        }
    }

    #[test]
    fn wrong_time_count_is_rejected() {
        let g = grid1();
        let mu = CollapseMap::new(vec![1, 1]).unwrap();
        let f = leaf(g, 0.0, 1.0);
        assert!(eval_j_direct(&mu, &f, 1.0, &[0.5], &Collider::default()).is_err());
    }
}

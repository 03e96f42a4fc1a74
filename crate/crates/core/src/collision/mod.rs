//! Gain and loss collision operators in velocity space and in the Fourier
//! (Bobylev) form, collision geometry, and structural diagnostics.
//!
//! Both routes read a discrete velocity slice as the same continuous function:
//! its trigonometric interpolant cut off outside the velocity box. The direct
//! route integrates that function over the collision sphere; the Fourier route
//! evaluates its transform through the sinc series and folds the aliases back
//! onto the grid.

pub mod bobylev;
pub mod diagnostics;
pub mod direct;
pub mod geometry;
pub(crate) mod interp;
pub mod kernel;

use serde::{Deserialize, Serialize};

pub use bobylev::q_bobylev;
pub use diagnostics::{
    annihilation_sweep, check_annihilation, check_annihilation_with, conserved_moments, AnnihilationReport, Moments,
};
pub use direct::{q_direct, q_direct_with};
pub use geometry::{post_collision, xi_split, CollisionPair};
pub use interp::Interp;
pub use kernel::{eval_kernel, AngularKind, CollisionKernelSpec, EtaRule, KernelValue};

use crate::spectral_core::{PhaseField, Repr};
use crate::Result;

/// Which half of the collision operator to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sign {
    Gain,
    Loss,
}

/// Evaluation route for `Q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    /// Velocity-space quadrature.
    #[default]
    Direct,
    /// Fourier-side (Bobylev) quadrature.
    Bobylev,
}

/// `Q(f, g) = Q+(f, g) - Q-(f, g)`, returned in the representation of `f`.
pub fn collide(f: &PhaseField, g: &PhaseField, spec: &CollisionKernelSpec, route: Route) -> Result<PhaseField> {
    let repr = f.repr();
    let q = match route {
        Route::Direct => {
            let gain = q_direct(f, g, spec, Sign::Gain)?;
            let loss = q_direct(f, g, spec, Sign::Loss)?;
            gain.sub(&loss)
        }
        Route::Bobylev => {
            let ft = f.to(Repr::XXi);
            let gt = g.to(Repr::XXi);
            let gain = q_bobylev(&ft, &gt, spec, Sign::Gain)?;
            let loss = q_bobylev(&ft, &gt, spec, Sign::Loss)?;
            gain.sub(&loss)
        }
    };
    Ok(q.to(repr))
}

/// Indices of the first x-cell carrying each distinct pair of velocity slices,
/// and for every cell the position of its representative in that list.
pub(crate) fn unique_slice_pairs(f: &PhaseField, g: &PhaseField) -> (Vec<usize>, Vec<usize>) {
    use std::collections::HashMap;
    use std::hash::{Hash, Hasher};
    let nx = f.grid().n_x();
    let key = |ix: usize| {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        for z in f.slice(ix).iter().chain(g.slice(ix)) {
            z.re.to_bits().hash(&mut h);
            z.im.to_bits().hash(&mut h);
        }
        h.finish()
    };
    let same = |a: usize, b: usize| {
        let bits = |s: &[crate::C64], t: &[crate::C64]| {
            s.iter()
                .zip(t)
                .all(|(x, y)| x.re.to_bits() == y.re.to_bits() && x.im.to_bits() == y.im.to_bits())
        };
        bits(f.slice(a), f.slice(b)) && bits(g.slice(a), g.slice(b))
    };
    let mut reps: Vec<usize> = Vec::new();
    let mut by_key: HashMap<u64, Vec<usize>> = HashMap::new();
    let mut owner = vec![0usize; nx];
    for ix in 0..nx {
        let bucket = by_key.entry(key(ix)).or_default();
        match bucket.iter().find(|&&r| same(reps[r], ix)) {
            Some(&r) => owner[ix] = r,
            None => {
                bucket.push(reps.len());
                owner[ix] = reps.len();
                reps.push(ix);
            }
        }
    }
    (reps, owner)
}

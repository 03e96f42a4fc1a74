use std::fmt;

use serde::{Deserialize, Serialize};

use super::maps::CollapseMap;

/// Child of a D-node: another D-node or an F-leaf, both by index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Child {
    D(usize),
    F(usize),
}

/// Binary Duhamel tree of a collapsing map.
///
/// Node 1 has node 2 as its only child; every node `2..=k+1` has a left and a right child.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DuhamelTree {
    k: usize,
    /// `children[j]` for `j = 2..=k+1`; entries 0 and 1 are unused.
    children: Vec<(Child, Child)>,
}

/// Algorithm 1 with strict left/right children.
pub fn build_duhamel_tree(mu: &CollapseMap) -> DuhamelTree {
    let k = mu.k();
    let mut children = vec![(Child::F(0), Child::F(0)); k + 2];
    for j in 2..=k + 1 {
        let l = (j + 1..=k + 1).find(|&l| mu.at(l) == mu.at(j));
        let r = (j + 1..=k + 1).find(|&r| mu.at(r) == j);
        children[j] = (l.map_or(Child::F(mu.at(j)), Child::D), r.map_or(Child::F(j), Child::D));
    }
    DuhamelTree { k, children }
}

impl DuhamelTree {
    pub fn k(&self) -> usize {
        self.k
    }

    /// `(left, right)` children of node `j` for `2 <= j <= k+1`.
    pub fn children(&self, j: usize) -> (Child, Child) {
        self.children[j]
    }

    /// F-leaf indices in left-to-right order.
    pub fn leaves(&self) -> Vec<usize> {
        let mut out = Vec::new();
        self.collect_leaves(Child::D(2), &mut out);
        out
    }

    fn collect_leaves(&self, c: Child, out: &mut Vec<usize>) {
        match c {
            Child::F(i) => out.push(i),
            Child::D(j) => {
                let (l, r) = self.children[j];
                self.collect_leaves(l, out);
                self.collect_leaves(r, out);
            }
        }
    }

    /// Recover the collapsing map from the left/right rule.
    pub fn collapse_map(&self) -> CollapseMap {
        let mut mu = vec![0; self.k];
        mu[0] = 1;
        for j in 2..=self.k + 1 {
            let (l, r) = self.children[j];
            if let Child::D(l) = l {
                mu[l - 2] = mu[j - 2];
            }
            if let Child::D(r) = r {
                mu[r - 2] = j;
            }
        }
        CollapseMap::new(mu).expect("tree encodes a valid map")
    }

    /// Pre-order shape string with labels erased, collecting the labels alongside.
    pub(crate) fn walk_shape(&self, j: usize, shape: &mut String, labels: &mut Vec<usize>) {
        labels.push(j);
        shape.push('(');
        let (l, r) = self.children[j];
        for c in [l, r] {
            match c {
                Child::F(_) => shape.push('.'),
                Child::D(m) => self.walk_shape(m, shape, labels),
            }
        }
        shape.push(')');
    }

    fn fmt_child(&self, c: Child, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match c {
            Child::F(i) => write!(f, "F{i}"),
            Child::D(j) => {
                let (l, r) = self.children[j];
                write!(f, "D{j}(")?;
                self.fmt_child(l, f)?;
                write!(f, ",")?;
                self.fmt_child(r, f)?;
                write!(f, ")")
            }
        }
    }
}

impl fmt::Display for DuhamelTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "D1(")?;
        self.fmt_child(Child::D(2), f)?;
        write!(f, ")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hierarchy::maps::enumerate_collapse_maps;

    fn tree(v: &[usize]) -> DuhamelTree {
        build_duhamel_tree(&CollapseMap::new(v.to_vec()).unwrap())
    }

    #[test]
    fn tree_of_1123() {
        let t = tree(&[1, 1, 2, 3]);
        assert_eq!(t.to_string(), "D1(D2(D3(F1,D5(F3,F5)),D4(F2,F4)))");
        assert_eq!(t.children(2), (Child::D(3), Child::D(4)));
        assert_eq!(t.children(3), (Child::F(1), Child::D(5)));
        assert_eq!(t.children(4), (Child::F(2), Child::F(4)));
        assert_eq!(t.children(5), (Child::F(3), Child::F(5)));
    }

    #[test]
    fn small_trees() {
        assert_eq!(tree(&[1]).to_string(), "D1(D2(F1,F2))");
        let t = tree(&[1, 2]);
        assert_eq!(t.children(2), (Child::F(1), Child::D(3)));
        assert_eq!(tree(&[1, 1]).to_string(), "D1(D2(D3(F1,F3),F2))");
    }

    #[test]
    fn leaves_and_roundtrip() {
        for k in 1..=6 {
            for mu in enumerate_collapse_maps(k).unwrap() {
                let t = build_duhamel_tree(&mu);
                let mut leaves = t.leaves();
                leaves.sort_unstable();
                assert_eq!(leaves, (1..=k + 1).collect::<Vec<_>>());
                assert_eq!(t.collapse_map(), mu);
            }
        }
    }
}

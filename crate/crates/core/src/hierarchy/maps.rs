use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::tree::build_duhamel_tree;
use crate::{Error, Result};

/// Largest depth for which maps are enumerated.
pub const MAX_DEPTH: usize = 8;

/// Collapsing map `mu: {2, .., k+1} -> {1, .., k}` with `mu(2) = 1` and `mu(j) < j`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct CollapseMap {
    values: Vec<usize>,
}

impl CollapseMap {
    /// Build from `mu(2), .., mu(k+1)`.
    pub fn new(values: Vec<usize>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Range("a collapsing map needs depth >= 1".into()));
        }
        for (i, &m) in values.iter().enumerate() {
            let j = i + 2;
            if m < 1 || m >= j {
                return Err(Error::Range(format!("mu({j}) = {m} must lie in 1..{j}")));
            }
        }
        Ok(CollapseMap { values })
    }

    pub fn k(&self) -> usize {
        self.values.len()
    }

    /// `mu(j)` for `2 <= j <= k+1`.
    pub fn at(&self, j: usize) -> usize {
        self.values[j - 2]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }
}

impl fmt::Display for CollapseMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.values.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

fn check_depth(k: usize) -> Result<()> {
    if !(1..=MAX_DEPTH).contains(&k) {
        return Err(Error::Range(format!("depth {k} outside 1..={MAX_DEPTH}")));
    }
    Ok(())
}

/// All `k!` collapsing maps of depth `k` in lexicographic order.
pub fn enumerate_collapse_maps(k: usize) -> Result<Vec<CollapseMap>> {
    check_depth(k)?;
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(j: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<CollapseMap>) {
        if j == k + 2 {
            out.push(CollapseMap { values: cur.clone() });
            return;
        }
        for m in 1..j {
            cur.push(m);
            rec(j + 1, k, cur, out);
            cur.pop();
        }
    }
    rec(2, k, &mut cur, &mut out);
    Ok(out)
}

/// `C_k = binom(2k, k) / (k + 1)`.
pub fn catalan(k: usize) -> u64 {
    let mut c: u64 = 1;
    for i in 0..k as u64 {
        c = c * 2 * (2 * i + 1) / (i + 2);
    }
    c
}

/// Equivalence class of collapsing maps whose integrands differ only by a relabelling of times.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EchelonClass {
    pub representative: CollapseMap,
    pub members: Vec<CollapseMap>,
    /// For each member, `perm[j - 2]` is the representative's time index carrying the member's `t_j`.
    pub time_permutations: Vec<Vec<usize>>,
}

impl EchelonClass {
    pub fn k(&self) -> usize {
        self.representative.k()
    }

    pub fn size(&self) -> usize {
        self.members.len()
    }
}

/// Shape of the Duhamel tree with node labels erased, plus the labels in pre-order.
fn shape_and_labels(mu: &CollapseMap) -> (String, Vec<usize>) {
    let tree = build_duhamel_tree(mu);
    let mut shape = String::new();
    let mut labels = Vec::new();
    tree.walk_shape(2, &mut shape, &mut labels);
    (shape, labels)
}

fn relabelling(member: &[usize], rep: &[usize]) -> Vec<usize> {
    let mut perm = vec![0; member.len()];
    for (m, r) in member.iter().zip(rep) {
        perm[m - 2] = *r;
    }
    perm
}

/// Canonical (nondecreasing) map with the same Duhamel-tree shape as `mu`, and the
/// time relabelling taking `mu`'s simplex into the canonical map's time domain.
pub fn echelon_reduce(mu: &CollapseMap) -> (CollapseMap, Vec<usize>) {
    let k = mu.k();
    let (shape, labels) = shape_and_labels(mu);
    // Each shape has exactly one nondecreasing labelling; search those only.
    let mut cur = vec![1usize];
    let mut found = None;
    fn rec(k: usize, cur: &mut Vec<usize>, shape: &str, found: &mut Option<(CollapseMap, Vec<usize>)>) {
        if found.is_some() {
            return;
        }
        if cur.len() == k {
            let cand = CollapseMap { values: cur.clone() };
            let (s, l) = shape_and_labels(&cand);
            if s == shape {
                *found = Some((cand, l));
            }
            return;
        }
        let j = cur.len() + 2;
        let lo = *cur.last().unwrap();
        for m in lo..j {
            cur.push(m);
            rec(k, cur, shape, found);
            cur.pop();
        }
    }
    rec(k, &mut cur, &shape, &mut found);
    let (rep, rep_labels) = found.expect("every tree shape has a nondecreasing labelling");
    let perm = relabelling(&labels, &rep_labels);
    (rep, perm)
}

/// Partition of all depth-`k` maps into board-game classes, in order of their representatives.
pub fn km_classes(k: usize) -> Result<Vec<EchelonClass>> {
    let maps = enumerate_collapse_maps(k)?;
    let mut by_shape: HashMap<String, usize> = HashMap::new();
    let mut classes: Vec<(Vec<usize>, EchelonClass)> = Vec::new();
    for mu in maps {
        let (shape, labels) = shape_and_labels(&mu);
        let idx = *by_shape.entry(shape).or_insert_with(|| {
            classes.push((
                Vec::new(),
                EchelonClass {
                    representative: mu.clone(),
                    members: Vec::new(),
                    time_permutations: Vec::new(),
                },
            ));
            classes.len() - 1
        });
        let entry = &mut classes[idx];
        if mu.is_nondecreasing() {
            entry.1.representative = mu.clone();
            entry.0 = labels;
        }
        entry.1.members.push(mu);
    }
    let mut out: Vec<EchelonClass> = classes
        .into_iter()
        .map(|(rep_labels, mut c)| {
            c.time_permutations = c
                .members
                .iter()
                .map(|m| relabelling(&shape_and_labels(m).1, &rep_labels))
                .collect();
            c
        })
        .collect();
    out.sort_by(|a, b| a.representative.cmp(&b.representative));
    Ok(out)
}

/// Class table as CSV with columns `k, canonical_map, class_size`.
pub fn class_table_csv(classes: &[EchelonClass]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let io = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(["k", "canonical_map", "class_size"]).map_err(io)?;
    for c in classes {
        w.write_record([c.k().to_string(), c.representative.to_string(), c.size().to_string()])
            .map_err(io)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn map(v: &[usize]) -> CollapseMap {
        CollapseMap::new(v.to_vec()).unwrap()
    }

    #[test]
    fn small_enumerations() {
        let m2 = enumerate_collapse_maps(2).unwrap();
        assert_eq!(m2, vec![map(&[1, 1]), map(&[1, 2])]);
        assert_eq!(enumerate_collapse_maps(1).unwrap(), vec![map(&[1])]);
        assert_eq!(enumerate_collapse_maps(3).unwrap().len(), 6);
        assert!(enumerate_collapse_maps(0).is_err());
        assert!(enumerate_collapse_maps(9).is_err());
    }

    #[test]
    fn counts_are_factorial_and_catalan() {
        let mut fact = 1usize;
        for k in 1..=MAX_DEPTH {
            fact *= k;
            let maps = enumerate_collapse_maps(k).unwrap();
            assert_eq!(maps.len(), fact);
            assert!(maps.windows(2).all(|w| w[0] < w[1]));
            let classes = km_classes(k).unwrap();
            assert_eq!(classes.len() as u64, catalan(k));
            assert!(catalan(k) <= 4u64.pow(k as u32));
            assert_eq!(classes.iter().map(|c| c.size()).sum::<usize>(), fact);
        }
        let cat: Vec<u64> = (1..=8).map(catalan).collect();
        assert_eq!(cat, vec![1, 2, 5, 14, 42, 132, 429, 1430]);
    }

    #[test]
    fn rejects_invalid_maps() {
        assert!(CollapseMap::new(vec![2]).is_err());
        assert!(CollapseMap::new(vec![1, 3]).is_err());
        assert!(CollapseMap::new(vec![]).is_err());
    }

    #[test]
    fn reduction_examples() {
        let (c, p) = echelon_reduce(&map(&[1, 1, 2, 3]));
        assert_eq!(c, map(&[1, 1, 2, 3]));
        assert_eq!(p, vec![2, 3, 4, 5]);
        let (c, p) = echelon_reduce(&map(&[1, 2, 1]));
        assert_eq!(c, map(&[1, 1, 2]));
        assert_eq!(p, vec![2, 4, 3]);
        let (c, p) = echelon_reduce(&map(&[1]));
        assert_eq!((c, p), (map(&[1]), vec![2]));
    }

    #[test]
    fn classes_partition_and_reduce_to_representative() {
        for k in 1..=6 {
            let classes = km_classes(k).unwrap();
            let mut seen = std::collections::HashSet::new();
            for c in &classes {
                assert!(c.representative.is_nondecreasing());
                for (m, p) in c.members.iter().zip(&c.time_permutations) {
                    assert!(seen.insert(m.clone()));
                    let (r, q) = echelon_reduce(m);
                    assert_eq!(&r, &c.representative);
                    assert_eq!(&q, p);
                }
            }
        }
    }

    proptest! {
        #[test]
        fn reduction_is_idempotent(k in 1usize..=6, seed in 0usize..720) {
            let maps = enumerate_collapse_maps(k).unwrap();
            let mu = &maps[seed % maps.len()];
            let (c, _) = echelon_reduce(mu);
            let (c2, p2) = echelon_reduce(&c);
            prop_assert_eq!(&c2, &c);
            prop_assert_eq!(p2, (2..=k + 1).collect::<Vec<_>>());
        }
    }

    #[test]
    fn class_table_rows() {
        let csv = class_table_csv(&km_classes(3).unwrap()).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "k,canonical_map,class_size");
        assert_eq!(lines.len(), 6);
        assert!(lines.contains(&"3,\"(1,1,2)\",2"));
    }
}

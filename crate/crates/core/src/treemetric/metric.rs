//! Finite metrics, u_L tables and the exact ultrametric and 4-point tests.

use std::collections::{HashMap, HashSet};

use indexmap::IndexMap;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::loglength::{Length, LogLength};
use crate::error::{Error, Result};
use crate::lattice::{BracketTable, BranchSpec};
use crate::rational::Rational;

/// Symmetric table over a label set. The diagonal is never consulted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteMetric<T> {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    table: Vec<Vec<Option<T>>>,
}

impl<T: Clone> FiniteMetric<T> {
    /// Builds the table from `f(i, j)` evaluated for `i < j`.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> Result<T>) -> Result<Self> {
        let n = labels.len();
        let mut index = HashMap::with_capacity(n);
        for (i, l) in labels.iter().enumerate() {
            if index.insert(l.clone(), i).is_some() {
                return Err(Error::DuplicateVertexId(l.clone()));
            }
        }
        let mut table = vec![vec![None; n]; n];
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i + 1..n {
                let d = f(i, j)?;
                table[i][j] = Some(d.clone());
                table[j][i] = Some(d);
            }
        }
        Ok(FiniteMetric { labels, index, table })
    }

    /// Restriction to a sub-family of labels.
    pub fn restrict(&self, labels: &[&str]) -> Result<Self> {
        let idx: Vec<usize> = labels.iter().map(|l| self.index_of(l)).collect::<Result<_>>()?;
        FiniteMetric::from_fn(labels.iter().map(|l| (*l).to_owned()).collect(), |i, j| {
            Ok(self.at(idx[i], idx[j]).clone())
        })
    }
}

impl<T> FiniteMetric<T> {
    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn index_of(&self, label: &str) -> Result<usize> {
        self.index.get(label).copied().ok_or_else(|| Error::UnknownVertex(label.to_owned()))
    }

    /// Off-diagonal entry; panics on `i == j`.
    pub fn at(&self, i: usize, j: usize) -> &T {
        self.table[i][j].as_ref().expect("off-diagonal entry")
    }

    pub fn get(&self, a: &str, b: &str) -> Result<&T> {
        Ok(self.at(self.index_of(a)?, self.index_of(b)?))
    }
}

impl<T: Serialize> Serialize for FiniteMetric<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let map: IndexMap<&str, IndexMap<&str, &T>> = self
            .labels
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let row = self
                    .labels
                    .iter()
                    .enumerate()
                    .filter(|&(j, _)| j != i)
                    .map(|(j, b)| (b.as_str(), self.table[i][j].as_ref().expect("off-diagonal")))
                    .collect();
                (a.as_str(), row)
            })
            .collect();
        map.serialize(s)
    }
}

impl<'de, T: DeserializeOwned + Clone + PartialEq> Deserialize<'de> for FiniteMetric<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let map: IndexMap<String, IndexMap<String, T>> = IndexMap::deserialize(d)?;
        let labels: Vec<String> = map.keys().cloned().collect();
        FiniteMetric::from_fn(labels.clone(), |i, j| {
            let x = map[&labels[i]].get(&labels[j]);
            let y = map[&labels[j]].get(&labels[i]);
            match (x, y) {
                (Some(x), Some(y)) if x == y => Ok(x.clone()),
                _ => Err(Error::Parse(format!("asymmetric or missing entry {}-{}", labels[i], labels[j]))),
            }
        })
        .map_err(D::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraReport {
    pub ok: bool,
    pub witness: Option<[String; 3]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FourPointReport {
    pub ok: bool,
    pub witness: Option<[String; 4]>,
}

/// Largest of three values is attained at least twice.
pub(crate) fn max_attained_twice<T: Ord>(a: &T, b: &T, c: &T) -> bool {
    let mut v = [a, b, c];
    v.sort();
    v[1] == v[2]
}

/// Smallest of three values is attained at least twice.
pub(crate) fn min_attained_twice<T: Ord>(a: &T, b: &T, c: &T) -> bool {
    let mut v = [a, b, c];
    v.sort();
    v[0] == v[1]
}

fn lex_order<T>(m: &FiniteMetric<T>) -> Vec<usize> {
    let mut order: Vec<usize> = (0..m.len()).collect();
    order.sort_by(|&a, &b| m.labels[a].cmp(&m.labels[b]));
    order
}

/// Every triangle has its two largest sides equal. The witness is the
/// lexicographically least failing triple.
pub fn is_ultrametric<T: Ord + Clone>(m: &FiniteMetric<T>) -> UltraReport {
    let o = lex_order(m);
    let n = o.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                let (x, y, z) = (o[a], o[b], o[c]);
                if !max_attained_twice(m.at(x, y), m.at(x, z), m.at(y, z)) {
                    let w = [x, y, z].map(|i| m.labels[i].clone());
                    return UltraReport { ok: false, witness: Some(w) };
                }
            }
        }
    }
    UltraReport { ok: true, witness: None }
}

/// Sum-form 4-point condition: of the three pairings of every quadruple,
/// the two largest sums coincide.
pub fn four_point_check<T: Length>(m: &FiniteMetric<T>) -> FourPointReport {
    let o = lex_order(m);
    let n = o.len();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let (w, x, y, z) = (o[a], o[b], o[c], o[d]);
                    let s1 = m.at(w, x).add(m.at(y, z));
                    let s2 = m.at(w, y).add(m.at(x, z));
                    let s3 = m.at(w, z).add(m.at(x, y));
                    if !max_attained_twice(&s1, &s2, &s3) {
                        let q = [w, x, y, z].map(|i| m.labels[i].clone());
                        return FourPointReport { ok: false, witness: Some(q) };
                    }
                }
            }
        }
    }
    FourPointReport { ok: true, witness: None }
}

/// Exact triangle inequality over all triples; returns a failing triple.
pub fn triangle_violation<T: Length>(m: &FiniteMetric<T>) -> Option<[String; 3]> {
    let n = m.len();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a == b || b == c || a == c || a > c {
                    continue;
                }
                if m.at(a, c) > &m.at(a, b).add(m.at(b, c)) {
                    return Some([a, b, c].map(|i| m.labels[i].clone()));
                }
            }
        }
    }
    None
}

/// `u_L(A, B) = (L.A)(L.B)/(A.B)` over named branches.
pub fn u_l_branches(
    t: &BracketTable,
    root: &BranchSpec,
    branches: &[(String, BranchSpec)],
) -> Result<FiniteMetric<Rational>> {
    let with_root: Vec<Rational> =
        branches.iter().map(|(_, b)| t.branch_intersection(root, b)).collect::<Result<_>>()?;
    FiniteMetric::from_fn(branches.iter().map(|(l, _)| l.clone()).collect(), |i, j| {
        let ab = t.branch_intersection(&branches[i].1, &branches[j].1)?;
        Ok(&with_root[i] * &with_root[j] / ab)
    })
}

/// Representing vertices of a family in injective-resolution form.
pub fn family_vertices(t: &BracketTable, family: &[BranchSpec]) -> Result<Vec<String>> {
    let mut seen = HashSet::new();
    family
        .iter()
        .map(|b| {
            let v = b.representing_vertex().ok_or_else(|| Error::NotInjectiveResolution(b.to_string()))?;
            t.index_of(v)?;
            if !seen.insert(v) {
                return Err(Error::NotInjectiveResolution(format!("two branches at {v}")));
            }
            Ok(v.to_owned())
        })
        .collect()
}

/// u_L table of a family of branches given by their representing vertices,
/// over the family minus the root. Labels are vertex ids.
pub fn u_l_table(t: &BracketTable, family: &[BranchSpec], root: usize) -> Result<FiniteMetric<Rational>> {
    let ids = family_vertices(t, family)?;
    if root >= family.len() {
        return Err(Error::RootNotInFamily);
    }
    let rest: Vec<(String, BranchSpec)> = ids
        .iter()
        .zip(family)
        .enumerate()
        .filter(|&(i, _)| i != root)
        .map(|(_, (id, b))| (id.clone(), b.clone()))
        .collect();
    u_l_branches(t, &family[root], &rest)
}

/// u_L table for vertex ids, with `root` one of them.
pub fn u_l_table_vertices(t: &BracketTable, family: &[&str], root: &str) -> Result<FiniteMetric<Rational>> {
    let specs: Vec<BranchSpec> = family.iter().map(|v| BranchSpec::unit(*v)).collect();
    let r = family.iter().position(|v| *v == root).ok_or(Error::RootNotInFamily)?;
    u_l_table(t, &specs, r)
}

/// Angular distance `-log q(u, v)` over a family of vertices.
pub fn rho_metric(t: &BracketTable, family: &[&str]) -> Result<FiniteMetric<LogLength>> {
    let idx: Vec<usize> = family.iter().map(|v| t.index_of(v)).collect::<Result<_>>()?;
    FiniteMetric::from_fn(family.iter().map(|v| (*v).to_owned()).collect(), |i, j| {
        LogLength::neg_log(t.q_at(idx[i], idx[j]))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::brackets;

    fn table(entries: &[(&str, &str, i64)]) -> FiniteMetric<Rational> {
        let mut labels: Vec<String> = Vec::new();
        for (a, b, _) in entries {
            for l in [a, b] {
                if !labels.iter().any(|x| x == l) {
                    labels.push(l.to_string());
                }
            }
        }
        let ls = labels.clone();
        FiniteMetric::from_fn(labels, |i, j| {
            entries
                .iter()
                .find(|(a, b, _)| (*a == ls[i] && *b == ls[j]) || (*a == ls[j] && *b == ls[i]))
                .map(|e| Rational::from_integer(e.2))
                .ok_or(Error::EmptyFamily)
        })
        .unwrap()
    }

    #[test]
    fn tetrahedron_u_l_is_constant() {
        let t = brackets(&corpus::tetrahedron(4)).unwrap();
        let m = u_l_table_vertices(&t, &["E1", "E2", "E3", "E4"], "E1").unwrap();
        assert_eq!(m.labels(), ["E2", "E3", "E4"]);
        for i in 0..3 {
            for j in 0..3 {
                if i != j {
                    assert_eq!(m.at(i, j), &Rational::new(1, 5));
                }
            }
        }
        assert!(is_ultrametric(&m).ok);
    }

    #[test]
    fn a3_u_l() {
        let t = brackets(&corpus::a3()).unwrap();
        let m = u_l_table_vertices(&t, &["E1", "E2", "E3"], "E2").unwrap();
        assert_eq!(m.get("E1", "E3").unwrap(), &Rational::one());
        let single = u_l_table_vertices(&t, &["E1", "E2"], "E2").unwrap();
        assert_eq!(single.len(), 1);
    }

    #[test]
    fn u_l_rejects_bad_families() {
        let t = brackets(&corpus::a3()).unwrap();
        let fam = vec![BranchSpec::unit("E1"), BranchSpec::unit("E1")];
        assert!(matches!(u_l_table(&t, &fam, 0), Err(Error::NotInjectiveResolution(_))));
        let fam = vec![BranchSpec::new([("E1", 2)]).unwrap()];
        assert!(matches!(u_l_table(&t, &fam, 0), Err(Error::NotInjectiveResolution(_))));
        let fam = vec![BranchSpec::unit("E1")];
        assert_eq!(u_l_table(&t, &fam, 3).unwrap_err(), Error::RootNotInFamily);
    }

    #[test]
    fn ultrametric_witness() {
        let m = table(&[("A", "B", 2), ("A", "C", 1), ("B", "C", 3)]);
        let r = is_ultrametric(&m);
        assert!(!r.ok);
        assert_eq!(r.witness, Some(["A".into(), "B".into(), "C".into()]));
    }

    #[test]
    fn rho_on_a3() {
        let t = brackets(&corpus::a3()).unwrap();
        let m = rho_metric(&t, &["E1", "E2", "E3"]).unwrap();
        let third = LogLength::neg_log(Rational::new(1, 3)).unwrap();
        assert_eq!(m.get("E1", "E2").unwrap(), &third);
        assert_eq!(m.get("E2", "E3").unwrap(), &third);
        assert_eq!(m.get("E1", "E3").unwrap().carrier(), &Rational::new(1, 9));
        assert_eq!(m.get("E1", "E3").unwrap(), &third.add(&third));
        assert!(rho_metric(&t, &["E1"]).unwrap().len() == 1);
        assert!(four_point_check(&m).ok);
    }

    #[test]
    fn four_point_on_small_metrics() {
        let m = table(&[("a", "b", 3), ("a", "c", 4), ("b", "c", 5)]);
        assert!(four_point_check(&m).ok);
        // Unit square with diagonals 2 and 1: pairings sum to 2, 3 and 2.
        let sq = table(&[("a", "b", 1), ("b", "c", 1), ("c", "d", 1), ("a", "d", 1), ("a", "c", 2), ("b", "d", 1)]);
        let r = four_point_check(&sq);
        assert!(!r.ok);
        assert_eq!(r.witness, Some(["a".into(), "b".into(), "c".into(), "d".into()]));
    }

    #[test]
    fn json_round_trip() {
        let t = brackets(&corpus::chain23()).unwrap();
        let m = u_l_table_vertices(&t, &["E1", "E2"], "E1").unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"E2":{}}"#);
        let t = brackets(&corpus::tetrahedron(4)).unwrap();
        let m = u_l_table_vertices(&t, &["E1", "E2", "E3"], "E1").unwrap();
        let s = serde_json::to_string(&m).unwrap();
        assert_eq!(s, r#"{"E2":{"E3":"1/5"},"E3":{"E2":"1/5"}}"#);
        let back: FiniteMetric<Rational> = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
    }
}

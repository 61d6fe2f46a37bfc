//! Reconstruction of the metric tree inducing a tree-like metric.

use serde::{Deserialize, Serialize};

use super::loglength::Length;
use super::metric::FiniteMetric;
use crate::bricks::{Tree, TreeNode};
use crate::error::{Error, Result};

/// A labelled tree with a positive length on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MetricTreeHull<T> {
    pub tree: Tree,
    /// Parallel to `tree.edges()`.
    pub lengths: Vec<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullEdge<T> {
    pub a: String,
    pub b: String,
    pub length: T,
    pub rho_float: f64,
}

/// JSON form of a metric tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HullReport<T> {
    pub nodes: Vec<HullNode>,
    pub edges: Vec<HullEdge<T>>,
}

impl<T: Length> MetricTreeHull<T> {
    /// Sum of edge lengths along the path between two nodes.
    pub fn distance(&self, a: usize, b: usize) -> T {
        let path = self.tree.path(a, b);
        path.windows(2).fold(T::zero(), |acc, w| acc.add(&self.lengths[self.edge_between(w[0], w[1])]))
    }

    fn edge_between(&self, a: usize, b: usize) -> usize {
        self.tree.edges().iter().position(|&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)).expect("adjacent nodes")
    }

    pub fn report(&self) -> HullReport<T> {
        let id = |i: usize| self.tree.node(i).id.clone();
        HullReport {
            nodes: self.tree.nodes().iter().map(|n| HullNode { id: n.id.clone(), label: n.label.clone() }).collect(),
            edges: self
                .tree
                .edges()
                .iter()
                .zip(&self.lengths)
                .map(|(&(a, b), l)| HullEdge { a: id(a), b: id(b), length: l.clone(), rho_float: l.to_f64() })
                .collect(),
        }
    }

    pub fn from_report(report: &HullReport<T>) -> Result<Self> {
        let nodes =
            report.nodes.iter().map(|n| TreeNode { id: n.id.clone(), label: n.label.clone(), brick: false }).collect();
        let edges: Vec<(String, String)> = report.edges.iter().map(|e| (e.a.clone(), e.b.clone())).collect();
        let tree = Tree::from_parts(nodes, &edges)?;
        let lengths = report.edges.iter().map(|e| e.length.clone()).collect();
        Ok(MetricTreeHull { tree, lengths })
    }

    /// Checks that leaf-to-leaf path sums equal `m` exactly.
    pub fn reproduces(&self, m: &FiniteMetric<T>) -> Result<bool> {
        let nodes: Vec<usize> = m
            .labels()
            .iter()
            .map(|l| self.tree.labelled(l).ok_or_else(|| Error::UnknownVertex(l.clone())))
            .collect::<Result<_>>()?;
        for i in 0..m.len() {
            for j in i + 1..m.len() {
                if &self.distance(nodes[i], nodes[j]) != m.at(i, j) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }
}

fn not_tree_like(what: String) -> Error {
    Error::NotTreeLike(what)
}

/// Builds the labelled tree with positive edge lengths whose induced
/// distance is `m`, by inserting labels one at a time and attaching each at
/// its largest Gromov product with the first label.
pub fn tree_hull<T: Length>(m: &FiniteMetric<T>) -> Result<MetricTreeHull<T>> {
    let n = m.len();
    if n == 0 {
        return Err(Error::EmptyFamily);
    }
    let labels = m.labels();
    let mut hull = MetricTreeHull { tree: Tree::new(), lengths: Vec::new() };
    let mut node_of = vec![usize::MAX; n];
    node_of[0] = hull.tree.add_node(labels[0].clone(), Some(labels[0].clone()), false)?;
    let mut steiner = 0usize;

    for x in 1..n {
        let rx = m.at(0, x);
        // Attachment distance along the path from the reference label.
        let mut best: Option<(T, usize)> = None;
        for a in 1..x {
            let sum = rx.add(m.at(0, a));
            let g = sum
                .checked_sub(m.at(x, a))
                .ok_or_else(|| not_tree_like(format!("triangle {}, {}, {}", labels[0], labels[a], labels[x])))?
                .half();
            let better = match &best {
                None => true,
                Some((bg, ba)) => g > *bg || (g == *bg && labels[a] < labels[*ba]),
            };
            if better {
                best = Some((g, a));
            }
        }
        let (g, target) = best.unwrap_or((T::zero(), 0));
        let pendant = rx
            .checked_sub(&g)
            .ok_or_else(|| not_tree_like(format!("label {} lies beyond its attachment", labels[x])))?;

        let attach = locate(&mut hull, node_of[0], node_of[target], &g, &mut steiner)
            .ok_or_else(|| not_tree_like(format!("cannot place {}", labels[x])))?;

        if pendant.is_zero() {
            if let Some(other) = &hull.tree.node(attach).label {
                if m.get(other, &labels[x])?.is_zero() {
                    return Err(Error::CoincidentLabels(other.clone(), labels[x].clone()));
                }
                return Err(not_tree_like(format!("{} would merge with {other}", labels[x])));
            }
            hull.tree.set_label(attach, Some(labels[x].clone()));
            node_of[x] = attach;
        } else {
            let new = hull.tree.add_node(labels[x].clone(), Some(labels[x].clone()), false)?;
            hull.tree.add_edge(attach, new);
            hull.lengths.push(pendant);
            node_of[x] = new;
        }
    }

    if !hull.reproduces(m)? {
        return Err(not_tree_like("induced distances differ from the input".into()));
    }
    Ok(hull)
}

/// Node at distance `g` from `from` on the path to `to`, subdividing an
/// edge when the point is interior to it.
fn locate<T: Length>(
    hull: &mut MetricTreeHull<T>,
    from: usize,
    to: usize,
    g: &T,
    steiner: &mut usize,
) -> Option<usize> {
    let path = hull.tree.path(from, to);
    let mut walked = T::zero();
    if g.is_zero() {
        return Some(from);
    }
    for w in path.windows(2) {
        let e = hull.edge_between(w[0], w[1]);
        let next = walked.add(&hull.lengths[e]);
        if &next == g {
            return Some(w[1]);
        }
        if &next > g {
            let before = g.checked_sub(&walked)?;
            let after = next.checked_sub(g)?;
            *steiner += 1;
            let mid = loop {
                let id = format!("#s{steiner}");
                if !hull.tree.contains(&id) {
                    break hull.tree.add_node(id, None, false).ok()?;
                }
                *steiner += 1;
            };
            let (a, b) = hull.tree.edges()[e];
            let near = if a == w[0] { a } else { b };
            let far = if near == a { b } else { a };
            replace_edge(hull, e, (near, mid), before);
            hull.tree.add_edge(mid, far);
            hull.lengths.push(after);
            return Some(mid);
        }
        walked = next;
    }
    None
}

fn replace_edge<T>(hull: &mut MetricTreeHull<T>, e: usize, ends: (usize, usize), length: T) {
    let mut nodes = hull.tree.nodes().to_vec();
    let mut edges: Vec<(usize, usize)> = hull.tree.edges().to_vec();
    edges[e] = ends;
    let mut t = Tree::new();
    for n in nodes.drain(..) {
        t.add_node(n.id, n.label, n.brick).expect("ids stay unique");
    }
    for (a, b) in edges {
        t.add_edge(a, b);
    }
    hull.tree = t;
    hull.lengths[e] = length;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::brackets;
    use crate::rational::Rational;
    use crate::treemetric::loglength::LogLength;
    use crate::treemetric::metric::rho_metric;

    fn int_metric(labels: &[&str], d: &[&[i64]]) -> FiniteMetric<Rational> {
        FiniteMetric::from_fn(labels.iter().map(|s| s.to_string()).collect(), |i, j| {
            Ok(Rational::from_integer(d[i][j]))
        })
        .unwrap()
    }

    fn edge_lengths(h: &MetricTreeHull<Rational>) -> Vec<(String, String, i64)> {
        let mut v: Vec<(String, String, i64)> = h
            .tree
            .edges()
            .iter()
            .zip(&h.lengths)
            .map(|(&(a, b), l)| {
                let (x, y) = (h.tree.node(a).id.clone(), h.tree.node(b).id.clone());
                let (x, y) = if x < y { (x, y) } else { (y, x) };
                (x, y, l.floor().try_into().unwrap())
            })
            .collect();
        v.sort();
        v
    }

    #[test]
    fn five_leaf_example() {
        // a -3- b -2- s, s -1- c, s -2- d, s -3- e
        let m = int_metric(
            &["a", "b", "c", "d", "e"],
            &[&[0, 3, 6, 7, 8], &[3, 0, 3, 4, 5], &[6, 3, 0, 3, 4], &[7, 4, 3, 0, 5], &[8, 5, 4, 5, 0]],
        );
        let h = tree_hull(&m).unwrap();
        assert_eq!(h.tree.len(), 6);
        let s = "#s1".to_string();
        assert_eq!(
            edge_lengths(&h),
            vec![
                (s.clone(), "b".into(), 2),
                (s.clone(), "c".into(), 1),
                (s.clone(), "d".into(), 2),
                (s.clone(), "e".into(), 3),
                ("a".into(), "b".into(), 3),
            ]
        );
        assert!(h.tree.is_f_tree());
    }

    #[test]
    fn a3_rho_hull_is_a_path() {
        let t = brackets(&corpus::a3()).unwrap();
        let m = rho_metric(&t, &["E1", "E2", "E3"]).unwrap();
        let h = tree_hull(&m).unwrap();
        assert_eq!(h.tree.len(), 3);
        let third = LogLength::neg_log(Rational::new(1, 3)).unwrap();
        assert!(h.lengths.iter().all(|l| *l == third));
        let mid = h.tree.labelled("E2").unwrap();
        assert_eq!(h.tree.valency(mid), 2);
    }

    #[test]
    fn two_points_and_one() {
        let m = int_metric(&["x", "y"], &[&[0, 4], &[4, 0]]);
        let h = tree_hull(&m).unwrap();
        assert_eq!(h.lengths, vec![Rational::from_integer(4)]);
        let one = int_metric(&["x"], &[&[0]]);
        assert_eq!(tree_hull(&one).unwrap().tree.len(), 1);
    }

    #[test]
    fn tetrahedron_rho_hull_is_a_star() {
        let t = brackets(&corpus::tetrahedron(4)).unwrap();
        let m = rho_metric(&t, &["E1", "E2", "E3"]).unwrap();
        let h = tree_hull(&m).unwrap();
        assert_eq!(h.tree.len(), 4);
        let half = LogLength::neg_log(Rational::new(1, 2)).unwrap();
        assert!(h.lengths.iter().all(|l| *l == half));
    }

    #[test]
    fn rejects_bad_metrics() {
        let sq = int_metric(&["a", "b", "c", "d"], &[&[0, 1, 2, 1], &[1, 0, 1, 1], &[2, 1, 0, 1], &[1, 1, 1, 0]]);
        assert!(matches!(tree_hull(&sq), Err(Error::NotTreeLike(_))));
        let zero = int_metric(&["a", "b"], &[&[0, 0], &[0, 0]]);
        assert_eq!(tree_hull(&zero).unwrap_err(), Error::CoincidentLabels("a".into(), "b".into()));
    }

    #[test]
    fn report_round_trip() {
        let t = brackets(&corpus::a3()).unwrap();
        let m = rho_metric(&t, &["E1", "E2", "E3"]).unwrap();
        let h = tree_hull(&m).unwrap();
        let json = serde_json::to_string(&h.report()).unwrap();
        let back: HullReport<LogLength> = serde_json::from_str(&json).unwrap();
        assert_eq!(MetricTreeHull::from_report(&back).unwrap(), h);
    }
}

//! Rooted dendrograms of ultrametrics.

use serde::{Deserialize, Serialize};

use super::metric::{is_ultrametric, FiniteMetric};
use crate::bricks::Tree;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Tree of closed balls with leaves the labels and an extra root of
/// valency one carrying the label of the root branch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UltraTree {
    pub tree: Tree,
    pub root: usize,
    /// Ball diameter of each node, `None` on the leaves and the root.
    pub diameters: Vec<Option<Rational>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ball_diameter: Option<Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraTreeReport {
    pub root: String,
    pub nodes: Vec<UltraNode>,
    pub edges: Vec<[String; 2]>,
}

impl UltraTree {
    pub fn report(&self) -> UltraTreeReport {
        UltraTreeReport {
            root: self.tree.node(self.root).id.clone(),
            nodes: self
                .tree
                .nodes()
                .iter()
                .zip(&self.diameters)
                .map(|(n, d)| UltraNode { id: n.id.clone(), label: n.label.clone(), ball_diameter: d.clone() })
                .collect(),
            edges: self
                .tree
                .edges()
                .iter()
                .map(|&(a, b)| [self.tree.node(a).id.clone(), self.tree.node(b).id.clone()])
                .collect(),
        }
    }

    /// Diameters strictly decrease away from the root.
    pub fn is_well_nested(&self) -> bool {
        let adj = self.tree.adjacency();
        let mut stack = vec![(self.root, usize::MAX)];
        while let Some((u, parent)) = stack.pop() {
            for &c in &adj[u] {
                if c == parent {
                    continue;
                }
                if let (Some(Some(dp)), Some(dc)) = (self.diameters.get(u), &self.diameters[c]) {
                    if dc >= dp {
                        return false;
                    }
                }
                stack.push((c, u));
            }
        }
        self.tree.valency(self.root) <= 1
    }
}

/// Dendrogram of an ultrametric on the family minus the root, hung from a
/// root node labelled `root_label`.
pub fn ultra_tree(m: &FiniteMetric<Rational>, root_label: &str) -> Result<UltraTree> {
    let report = is_ultrametric(m);
    if let Some([a, b, c]) = report.witness {
        return Err(Error::NotUltrametric(a, b, c));
    }
    if m.labels().iter().any(|l| l == root_label) {
        return Err(Error::IdCollision(root_label.to_owned()));
    }
    let mut tree = Tree::new();
    let mut diameters = Vec::new();
    let root = tree.add_node(root_label, Some(root_label.to_owned()), false)?;
    diameters.push(None);
    if !m.is_empty() {
        let all: Vec<usize> = (0..m.len()).collect();
        let mut balls = 0;
        let top = build(m, &all, &mut tree, &mut diameters, &mut balls)?;
        tree.add_edge(root, top);
    }
    Ok(UltraTree { tree, root, diameters })
}

fn build(
    m: &FiniteMetric<Rational>,
    members: &[usize],
    tree: &mut Tree,
    diameters: &mut Vec<Option<Rational>>,
    balls: &mut usize,
) -> Result<usize> {
    if let [only] = members {
        let l = &m.labels()[*only];
        diameters.push(None);
        return tree.add_node(l.clone(), Some(l.clone()), false);
    }
    let diameter = members
        .iter()
        .flat_map(|&i| members.iter().filter(move |&&j| j > i).map(move |&j| m.at(i, j)))
        .max()
        .expect("at least two members")
        .clone();
    // Sub-balls: classes of the relation d < diameter.
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for &x in members {
        match classes.iter_mut().find(|c| m.at(c[0], x) < &diameter) {
            Some(c) => c.push(x),
            None => classes.push(vec![x]),
        }
    }
    *balls += 1;
    let mut id = format!("ball#{balls}");
    while tree.contains(&id) {
        *balls += 1;
        id = format!("ball#{balls}");
    }
    let node = tree.add_node(id, None, false)?;
    diameters.push(Some(diameter));
    for class in classes {
        let child = build(m, &class, tree, diameters, balls)?;
        tree.add_edge(node, child);
    }
    Ok(node)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn metric(labels: &[&str], d: &[(usize, usize, i64)]) -> FiniteMetric<Rational> {
        FiniteMetric::from_fn(labels.iter().map(|s| s.to_string()).collect(), |i, j| {
            Ok(Rational::from_integer(d.iter().find(|e| (e.0, e.1) == (i, j) || (e.1, e.0) == (i, j)).unwrap().2))
        })
        .unwrap()
    }

    #[test]
    fn constant_table_gives_one_ball() {
        let m = metric(&["A", "B", "C"], &[(0, 1, 1), (0, 2, 1), (1, 2, 1)]);
        let u = ultra_tree(&m, "L").unwrap();
        assert_eq!(u.tree.len(), 5);
        assert_eq!(u.tree.valency(u.root), 1);
        let ball = u.tree.index_of("ball#1").unwrap();
        assert_eq!(u.tree.valency(ball), 4);
        assert!(u.tree.is_f_tree());
        assert!(u.is_well_nested());
    }

    #[test]
    fn nested_balls() {
        let m = metric(&["A", "B", "C"], &[(0, 1, 1), (0, 2, 2), (1, 2, 2)]);
        let u = ultra_tree(&m, "L").unwrap();
        let r = u.report();
        let top = r.nodes.iter().find(|n| n.id == "ball#1").unwrap();
        assert_eq!(top.ball_diameter, Some(Rational::from_integer(2)));
        let sub = r.nodes.iter().find(|n| n.id == "ball#2").unwrap();
        assert_eq!(sub.ball_diameter, Some(Rational::one()));
        assert!(r.edges.contains(&["ball#2".into(), "A".into()]));
        assert!(r.edges.contains(&["ball#2".into(), "B".into()]));
        assert!(r.edges.contains(&["ball#1".into(), "C".into()]));
        assert!(u.is_well_nested());
    }

    #[test]
    fn singleton_and_failures() {
        let m = metric(&["A"], &[]);
        let u = ultra_tree(&m, "L").unwrap();
        assert_eq!(u.tree.len(), 2);
        assert_eq!(u.tree.edges().len(), 1);
        let bad = metric(&["A", "B", "C"], &[(0, 1, 2), (0, 2, 1), (1, 2, 3)]);
        assert_eq!(ultra_tree(&bad, "L").unwrap_err(), Error::NotUltrametric("A".into(), "B".into(), "C".into()));
    }
}

//! Graphviz output.
//!
//! Dual-graph vertices are labelled `id (self)`. In trees, source vertices
//! are circles and brick nodes shaded boxes; nodes of a highlighted convex
//! hull are drawn in red.

use std::collections::HashSet;
use std::fmt::Write;

use crate::bricks::Tree;
use crate::dualgraph::{DualGraph, GenericGraph};
use crate::treemetric::{Length, MetricTreeHull, UltraTree};

fn quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

pub fn dual_graph(g: &DualGraph) -> String {
    let mut out = String::new();
    let name = g.name().unwrap_or("dual");
    writeln!(out, "graph {} {{", quote(name)).unwrap();
    writeln!(out, "  node [shape=circle];").unwrap();
    for v in g.vertices() {
        writeln!(out, "  {} [label={}];", quote(&v.id), quote(&format!("{} ({})", v.id, v.self_int))).unwrap();
    }
    for &(a, b) in g.edges() {
        writeln!(out, "  {} -- {};", quote(g.id(a)), quote(g.id(b))).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn generic_graph(g: &GenericGraph) -> String {
    let mut out = String::from("graph G {\n  node [shape=circle];\n");
    for id in g.ids() {
        writeln!(out, "  {};", quote(id)).unwrap();
    }
    for &(a, b) in g.edges() {
        writeln!(out, "  {} -- {};", quote(g.id(a)), quote(g.id(b))).unwrap();
    }
    out.push_str("}\n");
    out
}

/// A tree such as a brick-vertex tree; nodes whose ids appear in `hull` are
/// highlighted.
pub fn tree(t: &Tree, hull: Option<&Tree>) -> String {
    let inside: HashSet<&str> = hull.map(|h| h.nodes().iter().map(|n| n.id.as_str()).collect()).unwrap_or_default();
    let mut out = String::from("graph T {\n");
    for n in t.nodes() {
        let mut attrs = vec![if n.brick {
            "shape=box, style=filled, fillcolor=gray80".to_owned()
        } else {
            "shape=circle".to_owned()
        }];
        if let Some(l) = &n.label {
            if l != &n.id {
                attrs.push(format!("label={}", quote(l)));
            }
        }
        if inside.contains(n.id.as_str()) {
            attrs.push("color=red, penwidth=2".to_owned());
        }
        writeln!(out, "  {} [{}];", quote(&n.id), attrs.join(", ")).unwrap();
    }
    for &(a, b) in t.edges() {
        let highlighted = inside.contains(t.node(a).id.as_str()) && inside.contains(t.node(b).id.as_str());
        let style = if highlighted { " [color=red, penwidth=2]" } else { "" };
        writeln!(out, "  {} -- {}{};", quote(&t.node(a).id), quote(&t.node(b).id), style).unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn metric_tree<T: Length>(h: &MetricTreeHull<T>) -> String {
    let mut out = String::from("graph H {\n");
    for n in h.tree.nodes() {
        match &n.label {
            Some(_) => writeln!(out, "  {} [shape=circle];", quote(&n.id)).unwrap(),
            None => writeln!(out, "  {} [shape=point];", quote(&n.id)).unwrap(),
        }
    }
    for (&(a, b), len) in h.tree.edges().iter().zip(&h.lengths) {
        let label = format!("{len} ≈ {:.6}", len.to_f64());
        writeln!(out, "  {} -- {} [label={}];", quote(&h.tree.node(a).id), quote(&h.tree.node(b).id), quote(&label))
            .unwrap();
    }
    out.push_str("}\n");
    out
}

pub fn ultra_tree(u: &UltraTree) -> String {
    let mut out = String::from("graph U {\n");
    for (i, n) in u.tree.nodes().iter().enumerate() {
        let attrs = match (&u.diameters[i], i == u.root) {
            (Some(d), _) => format!("shape=box, label={}", quote(&format!("{d}"))),
            (None, true) => "shape=doublecircle".to_owned(),
            (None, false) => "shape=circle".to_owned(),
        };
        writeln!(out, "  {} [{}];", quote(&n.id), attrs).unwrap();
    }
    for &(a, b) in u.tree.edges() {
        writeln!(out, "  {} -- {};", quote(&u.tree.node(a).id), quote(&u.tree.node(b).id)).unwrap();
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bricks::{brick_vertex_tree, convex_hull};
    use crate::corpus;

    #[test]
    fn dual_graph_labels() {
        let s = dual_graph(&corpus::chain23());
        assert!(s.contains("\"E1\" [label=\"E1 (-2)\"]"));
        assert!(s.contains("\"E1\" -- \"E2\""));
    }

    #[test]
    fn bricks_are_shaded_and_hull_highlighted() {
        let g = corpus::triangle_pendant().to_generic();
        let bvt = brick_vertex_tree(&g).unwrap();
        let hull = convex_hull(&bvt, &["E1", "E2"]).unwrap();
        let s = tree(&bvt, Some(&hull));
        assert!(s.contains("\"B#1\" [shape=box, style=filled, fillcolor=gray80, color=red, penwidth=2]"));
        assert!(s.contains("\"E4\" [shape=circle]"));
    }
}

//! Named dual graphs used by the golden runner and the test suites.

use crate::dualgraph::DualGraph;

fn ids(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("E{i}")).collect()
}

fn build(name: &str, selfs: &[i64], edges: &[(usize, usize)]) -> DualGraph {
    let ids = ids(selfs.len());
    DualGraph::new(
        Some(name),
        ids.iter().cloned().zip(selfs.iter().copied()),
        edges.iter().map(|&(a, b)| (ids[a - 1].clone(), ids[b - 1].clone())),
    )
    .unwrap_or_else(|e| panic!("corpus graph {name} is invalid: {e}"))
}

/// One prime of self-intersection `-k`.
pub fn single(k: i64) -> DualGraph {
    build("single", &[-k], &[])
}

/// Chain of three `(-2)`-curves.
pub fn a3() -> DualGraph {
    build("A3", &[-2, -2, -2], &[(1, 2), (2, 3)])
}

pub fn chain23() -> DualGraph {
    build("chain23", &[-2, -3], &[(1, 2)])
}

/// Four primes of self-intersection `-k` meeting pairwise once.
pub fn tetrahedron(k: i64) -> DualGraph {
    build("tetrahedron", &[-k, -k, -k, -k], &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
}

/// Tetrahedron with the point `E1 ∩ E2` blown up and the new prime's
/// self-intersection lowered to `-2`.
pub fn y_graph() -> DualGraph {
    build("Y", &[-5, -5, -4, -4, -2], &[(1, 3), (1, 4), (2, 3), (2, 4), (3, 4), (1, 5), (2, 5)])
}

/// Two primes meeting in two points.
pub fn double_edge() -> DualGraph {
    build("double-edge", &[-2, -3], &[(1, 2), (1, 2)])
}

pub fn triple_edge() -> DualGraph {
    build("triple-edge", &[-4, -4], &[(1, 2), (1, 2), (1, 2)])
}

pub fn triangle() -> DualGraph {
    build("triangle", &[-3, -3, -3], &[(1, 2), (2, 3), (1, 3)])
}

pub fn triangle_pendant() -> DualGraph {
    build("triangle-pendant", &[-3, -3, -4, -2], &[(1, 2), (2, 3), (1, 3), (3, 4)])
}

/// Two triangles sharing `E3`.
pub fn bowtie() -> DualGraph {
    build("bowtie", &[-3, -3, -5, -3, -3], &[(1, 2), (1, 3), (2, 3), (3, 4), (3, 5), (4, 5)])
}

pub fn pentagon() -> DualGraph {
    build("pentagon", &[-3, -3, -3, -3, -3], &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 1)])
}

/// Square with a tail of two vertices hanging off `E1`.
pub fn square_tail() -> DualGraph {
    build("square-tail", &[-4, -3, -3, -3, -3, -2], &[(1, 2), (2, 3), (3, 4), (4, 1), (1, 5), (5, 6)])
}

pub fn d4() -> DualGraph {
    build("D4", &[-2, -2, -2, -2], &[(1, 2), (1, 3), (1, 4)])
}

pub fn e8() -> DualGraph {
    build("E8", &[-2; 8], &[(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 7), (3, 8)])
}

/// Chain of two `-3`-curves with `-2`-branches, a typical star-shaped tree.
pub fn star_tree() -> DualGraph {
    build("star-tree", &[-3, -2, -2, -2, -3, -2, -2], &[(1, 2), (1, 3), (1, 4), (1, 5), (5, 6), (6, 7)])
}

/// All named graphs.
pub fn named() -> Vec<DualGraph> {
    vec![
        single(2),
        a3(),
        chain23(),
        tetrahedron(4),
        tetrahedron(5),
        y_graph(),
        double_edge(),
        triple_edge(),
        triangle(),
        triangle_pendant(),
        bowtie(),
        pentagon(),
        square_tail(),
        d4(),
        e8(),
        star_tree(),
    ]
}

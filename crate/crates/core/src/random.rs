//! Seeded generators for random models, graphs and families.
//!
//! Every case gets its own ChaCha stream derived from `(seed, index)`, so a
//! run is reproducible and cases can be evaluated in any order.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dualgraph::{BlowupSpec, DualGraph, GenericGraph};

pub type CaseRng = ChaCha8Rng;

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Independent generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> CaseRng {
    ChaCha8Rng::seed_from_u64(splitmix64(seed ^ splitmix64(index)))
}

fn random_edges<R: Rng>(rng: &mut R, n: usize, extra: usize, loops: bool) -> Vec<(usize, usize)> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    if n >= 2 {
        for _ in 0..extra {
            let a = rng.gen_range(0..n);
            let mut b = rng.gen_range(0..n - 1);
            if b >= a {
                b += 1;
            }
            edges.push((a, b));
        }
    }
    if loops {
        for _ in 0..rng.gen_range(0..=1) {
            let a = rng.gen_range(0..n);
            edges.push((a, a));
        }
    }
    edges
}

/// Random valid dual graph on `1..=max_vertices` vertices.
///
/// A random spanning tree plus a few extra (possibly parallel) edges; each
/// self-intersection is `-(valency + extra)` with at least one positive
/// `extra`, so the negated matrix is irreducibly diagonally dominant.
pub fn random_dual_graph<R: Rng>(rng: &mut R, max_vertices: usize) -> DualGraph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let extra_edges = if n >= 2 { rng.gen_range(0..=n) } else { 0 };
    let edges = random_edges(rng, n, extra_edges, false);
    let mut valency = vec![0i64; n];
    for &(a, b) in &edges {
        valency[a] += 1;
        valency[b] += 1;
    }
    let mut extra: Vec<i64> = (0..n).map(|_| rng.gen_range(0..=2)).collect();
    if extra.iter().all(|&e| e == 0) {
        let i = rng.gen_range(0..n);
        extra[i] = 1;
    }
    let ids: Vec<String> = (1..=n).map(|i| format!("E{i}")).collect();
    let vertices: Vec<(String, i64)> = (0..n).map(|i| (ids[i].clone(), -(valency[i] + extra[i]).max(1))).collect();
    DualGraph::new(Some("random"), vertices, edges.iter().map(|&(a, b)| (ids[a].clone(), ids[b].clone())))
        .expect("diagonally dominant models are valid")
}

/// Random connected multigraph; loops are added when `loops` is set.
pub fn random_generic_graph<R: Rng>(rng: &mut R, max_vertices: usize, loops: bool) -> GenericGraph {
    let n = rng.gen_range(1..=max_vertices.max(1));
    let extra = if n >= 2 { rng.gen_range(0..=n + 1) } else { 0 };
    let edges = random_edges(rng, n, extra, loops);
    let ids: Vec<String> = (1..=n).map(|i| format!("v{i}")).collect();
    GenericGraph::from_indices(ids, edges).expect("indices are in range")
}

/// Random blow-up applicable to `g`.
pub fn random_blowup<R: Rng>(rng: &mut R, g: &DualGraph) -> BlowupSpec {
    if g.edges().is_empty() || rng.gen_bool(0.4) {
        let u = rng.gen_range(0..g.len());
        BlowupSpec::free(g.id(u))
    } else {
        let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
        let nth = g.edges().iter().filter(|&&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)).count();
        BlowupSpec::Satellite { u: g.id(a).to_owned(), v: g.id(b).to_owned(), index: rng.gen_range(0..nth) }
    }
}

/// Random subset of `0..n` of size in `min..=max` (clamped to `n`), sorted.
pub fn random_subset<R: Rng>(rng: &mut R, n: usize, min: usize, max: usize) -> Vec<usize> {
    let hi = max.min(n);
    let lo = min.min(hi);
    let k = rng.gen_range(lo..=hi);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut pick = all[..k].to_vec();
    pick.sort_unstable();
    pick
}

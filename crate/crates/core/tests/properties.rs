use proptest::prelude::*;
use rand::Rng;

use arborcheck::bricks::{block_decomposition, brick_vertex_tree, convex_hull, tree_separates_idx};
use arborcheck::lattice::{brackets, crucial_check, dual_basis};
use arborcheck::random::{case_rng, random_blowup, random_dual_graph, random_generic_graph, random_subset};
use arborcheck::treemetric::{four_point_check, is_ultrametric, tree_hull, u_l_table_vertices, FiniteMetric};
use arborcheck::valuation::{same_valuation, val_bracket, Bracket};
use arborcheck::{DualGraph, Rational, Valuation};

fn graph(seed: u64, max: usize) -> DualGraph {
    random_dual_graph(&mut case_rng(seed, 0), max)
}

fn ratio() -> impl Strategy<Value = Rational> {
    (1i64..40, 1i64..12).prop_map(|(p, q)| Rational::new(p, q))
}

fn pick_valuation(g: &DualGraph, rng: &mut impl Rng, r: Rational, s: Rational) -> Valuation {
    if !g.edges().is_empty() && rng.gen_bool(0.5) {
        let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
        Valuation::qm(g.id(a), g.id(b), r, s)
    } else {
        Valuation::div(g.id(rng.gen_range(0..g.len()))).scaled(&r)
    }
}

fn finite(b: Bracket) -> Rational {
    b.finite().cloned().expect("finite bracket")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn arborescence_survives_blowups(seed in any::<u64>(), steps in 1usize..5) {
        let mut rng = case_rng(seed, 1);
        let mut g = graph(seed, 8);
        let before = g.is_arborescent();
        for _ in 0..steps {
            let spec = random_blowup(&mut rng, &g);
            let id = g.fresh_id("N");
            g = g.blowup(&spec, &id).unwrap();
            prop_assert_eq!(g.is_arborescent(), before);
        }
    }

    #[test]
    fn dual_basis_is_strictly_negative(seed in any::<u64>()) {
        let g = graph(seed, 9);
        for e in dual_basis(&g).unwrap() {
            prop_assert!(e.coeffs().iter().all(Rational::is_negative));
        }
        let t = brackets(&g).unwrap();
        for i in 0..g.len() {
            for j in 0..g.len() {
                prop_assert!(t.at(i, j).is_positive());
                prop_assert_eq!(t.at(i, j), t.at(j, i));
            }
        }
    }

    #[test]
    fn dual_basis_is_dual(seed in any::<u64>()) {
        let g = graph(seed, 7);
        let basis = dual_basis(&g).unwrap();
        for (u, e) in basis.iter().enumerate() {
            let products = e.intersect_primes(&g);
            for (v, p) in products.iter().enumerate() {
                let want = if u == v { Rational::one() } else { Rational::zero() };
                prop_assert_eq!(p, &want);
            }
        }
    }

    #[test]
    fn bracket_is_homogeneous(seed in any::<u64>(), r in ratio(), s in ratio(), c in ratio()) {
        let g = graph(seed, 7);
        let mut rng = case_rng(seed, 2);
        let v1 = pick_valuation(&g, &mut rng, r.clone(), s.clone());
        let v2 = pick_valuation(&g, &mut rng, s, r);
        if same_valuation(&g, &v1, &v2).unwrap() {
            return Ok(());
        }
        let b = finite(val_bracket(&g, &v1, &v2).unwrap());
        prop_assert!(b.is_positive());
        let scaled = finite(val_bracket(&g, &v1.scaled(&c), &v2).unwrap());
        prop_assert_eq!(scaled, &c * &b);
        let swapped = finite(val_bracket(&g, &v2, &v1).unwrap());
        prop_assert_eq!(swapped, b);
    }

    #[test]
    fn quasi_monomial_bracket_is_linear_in_weights(seed in any::<u64>(), r in ratio(), s in ratio()) {
        let g = graph(seed, 7);
        if g.edges().is_empty() || g.len() < 3 {
            return Ok(());
        }
        let mut rng = case_rng(seed, 3);
        let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
        let Some(w) = (0..g.len()).find(|&w| w != a && w != b) else { return Ok(()) };
        let t = brackets(&g).unwrap();
        let mu = Valuation::qm(g.id(a), g.id(b), r.clone(), s.clone());
        let got = finite(val_bracket(&g, &mu, &Valuation::div(g.id(w))).unwrap());
        prop_assert_eq!(got, &r * t.at(a, w) + &s * t.at(b, w));
    }

    #[test]
    fn valuation_text_round_trips(seed in any::<u64>(), r in ratio(), s in ratio()) {
        let g = graph(seed, 6);
        let v = pick_valuation(&g, &mut case_rng(seed, 4), r, s);
        let back: Valuation = v.to_string().parse().unwrap();
        prop_assert_eq!(&back, &v);
        let json = serde_json::to_string(&v).unwrap();
        prop_assert_eq!(serde_json::from_str::<Valuation>(&json).unwrap(), v);
    }

    #[test]
    fn equality_iff_separation(seed in any::<u64>()) {
        let g = graph(seed, 8);
        let t = brackets(&g).unwrap();
        let ids: Vec<&str> = g.ids().collect();
        for u in &ids {
            for v in &ids {
                for w in &ids {
                    let rep = crucial_check(&t, &g, u, v, w).unwrap();
                    prop_assert_eq!(rep.equality, g.separates(v, u, w).unwrap());
                }
            }
        }
    }

    #[test]
    fn separation_is_read_off_the_brick_vertex_tree(seed in any::<u64>()) {
        let g = random_generic_graph(&mut case_rng(seed, 5), 9, true);
        let bvt = brick_vertex_tree(&g).unwrap();
        prop_assert!(bvt.is_tree());
        let node: Vec<usize> = g.ids().iter().map(|id| bvt.index_of(id).unwrap()).collect();
        for a in 0..g.len() {
            for b in 0..g.len() {
                for c in 0..g.len() {
                    prop_assert_eq!(g.separates_idx(c, a, b), tree_separates_idx(&bvt, node[c], node[a], node[b]));
                }
            }
        }
        let blocks = block_decomposition(&g).unwrap();
        let covered: usize = blocks.blocks.iter().map(|b| b.edges.len()).sum();
        prop_assert_eq!(covered, g.edges().len());
    }

    #[test]
    fn convex_hull_contains_family_and_is_a_subtree(seed in any::<u64>()) {
        let g = random_generic_graph(&mut case_rng(seed, 6), 9, false);
        let bvt = brick_vertex_tree(&g).unwrap();
        let pick = random_subset(&mut case_rng(seed, 7), g.len(), 1, 5);
        let family: Vec<&str> = pick.iter().map(|&i| g.id(i)).collect();
        let hull = convex_hull(&bvt, &family).unwrap();
        prop_assert!(hull.is_tree());
        for f in &family {
            prop_assert!(hull.contains(f));
        }
    }

    #[test]
    fn trees_give_ultrametric_tables(seed in any::<u64>()) {
        let g = graph(seed, 9);
        if !g.is_arborescent() {
            return Ok(());
        }
        let t = brackets(&g).unwrap();
        let ids: Vec<&str> = g.ids().collect();
        for root in &ids {
            let m = u_l_table_vertices(&t, &ids, root).unwrap();
            prop_assert!(is_ultrametric(&m).ok);
        }
    }

    #[test]
    fn tree_hull_recovers_weighted_trees(seed in any::<u64>()) {
        let mut rng = case_rng(seed, 8);
        let n = rng.gen_range(1..12);
        let parent: Vec<usize> = (1..n).map(|v| rng.gen_range(0..v)).collect();
        let length: Vec<i64> = (1..n).map(|_| rng.gen_range(1..6)).collect();
        let mut degree = vec![0; n];
        for (v, &p) in parent.iter().enumerate() {
            degree[v + 1] += 1;
            degree[p] += 1;
        }
        let labelled: Vec<usize> = (0..n).filter(|&v| degree[v] <= 1 || rng.gen_bool(0.3)).collect();
        let depth_path = |mut v: usize| {
            let mut path = vec![v];
            while v > 0 {
                v = parent[v - 1];
                path.push(v);
            }
            path
        };
        let dist = |a: usize, b: usize| {
            let (pa, pb) = (depth_path(a), depth_path(b));
            let meet = *pa.iter().find(|x| pb.contains(x)).unwrap();
            let up = |p: &[usize]| p.iter().take_while(|&&x| x != meet).map(|&x| length[x - 1]).sum::<i64>();
            Rational::from_integer(up(&pa) + up(&pb))
        };
        let labels: Vec<String> = labelled.iter().map(|v| format!("x{v}")).collect();
        let m = FiniteMetric::from_fn(labels, |i, j| Ok(dist(labelled[i], labelled[j]))).unwrap();
        prop_assert!(four_point_check(&m).ok);
        let h = tree_hull(&m).unwrap();
        prop_assert!(h.tree.is_tree());
        prop_assert!(h.reproduces(&m).unwrap());
        prop_assert!(h.lengths.iter().all(Rational::is_positive));
    }
}

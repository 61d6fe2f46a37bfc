//! End-to-end checks tying the block structure of a dual graph to the
//! ultrametric and tree-like behaviour of its brackets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::hull::tree_hull;
use super::metric::{four_point_check, is_ultrametric, rho_metric, u_l_table_vertices, FourPointReport, UltraReport};
use super::ultra::{ultra_tree, UltraTreeReport};
use crate::bricks::{
    as_f_tree, brick_hull_valencies, brick_vertex_tree, convex_hull, f_tree_isomorphic, suppress, FTree,
    HullValencyReport, Tree, TreeReport,
};
use crate::dualgraph::DualGraph;
use crate::error::{Error, Result};
use crate::lattice::BracketTable;

fn check_family(g: &DualGraph, family: &[&str]) -> Result<()> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let mut seen = HashSet::new();
    for v in family {
        g.index_of(v)?;
        if !seen.insert(*v) {
            return Err(Error::NotInjectiveResolution(format!("two branches at {v}")));
        }
    }
    Ok(())
}

/// Brick-vertex tree with one pendant leaf per family vertex standing for
/// the branch represented there. Pendant node ids are `br:<vertex>`.
pub fn branch_tree(g: &DualGraph, family: &[&str]) -> Result<Tree> {
    let mut t = brick_vertex_tree(&g.to_generic())?;
    for v in family {
        let at = t.index_of(v)?;
        let leaf = t.add_node(format!("br:{v}"), None, false)?;
        t.add_edge(at, leaf);
    }
    Ok(t)
}

/// Convex hull of the branches of a family, as a tree labelled by the
/// vertex ids.
pub fn branch_hull_f_tree(g: &DualGraph, family: &[&str]) -> Result<FTree> {
    let t = branch_tree(g, family)?;
    let pendants: Vec<String> = family.iter().map(|v| format!("br:{v}")).collect();
    let ids: Vec<&str> = pendants.iter().map(String::as_str).collect();
    let mut hull = convex_hull(&t, &ids)?;
    for v in family {
        let i = hull.index_of(&format!("br:{v}"))?;
        hull.set_label(i, Some((*v).to_owned()));
    }
    suppress(&hull)
}

/// Convex hull of the family vertices in the brick-vertex tree, suppressed
/// to an F-tree.
pub fn vertex_hull_f_tree(g: &DualGraph, family: &[&str]) -> Result<FTree> {
    let bvt = brick_vertex_tree(&g.to_generic())?;
    as_f_tree(&convex_hull(&bvt, family)?, family)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraTheoremReport {
    pub root: String,
    pub hypothesis: HullValencyReport,
    pub ultrametric: UltraReport,
    pub ultra_tree: Option<UltraTreeReport>,
    pub hull_tree: TreeReport,
    pub isomorphic: Option<bool>,
    /// False only when the valency hypothesis holds but a conclusion fails.
    pub consistent: bool,
}

/// Valency hypothesis, ultrametricity of u_L, and agreement of the rooted
/// dendrogram with the hull of the branches.
pub fn ultram_theorem_check(
    g: &DualGraph,
    t: &BracketTable,
    family: &[&str],
    root: &str,
) -> Result<UltraTheoremReport> {
    check_family(g, family)?;
    if !family.contains(&root) {
        return Err(Error::RootNotInFamily);
    }
    let hypothesis = hull_report(g, family)?;
    let table = u_l_table_vertices(t, family, root)?;
    let ultrametric = is_ultrametric(&table);
    let hull_tree = branch_hull_f_tree(g, family)?;
    let (ultra, isomorphic) = if ultrametric.ok {
        let u = ultra_tree(&table, root)?;
        let iso = f_tree_isomorphic(&u.tree, &hull_tree)?;
        (Some(u.report()), Some(iso))
    } else {
        (None, None)
    };
    let consistent = !hypothesis.ok || (ultrametric.ok && isomorphic == Some(true));
    Ok(UltraTheoremReport {
        root: root.to_owned(),
        hypothesis,
        ultrametric,
        ultra_tree: ultra,
        hull_tree: hull_tree.report(),
        isomorphic,
        consistent,
    })
}

fn hull_report(g: &DualGraph, family: &[&str]) -> Result<HullValencyReport> {
    let bvt = brick_vertex_tree(&g.to_generic())?;
    Ok(brick_hull_valencies(&convex_hull(&bvt, family)?))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubtleReport {
    pub verdicts: Vec<(String, bool)>,
    pub consistent: bool,
}

/// Ultrametricity of u_L for every choice of root in the family.
pub fn subtle_check(t: &BracketTable, family: &[&str]) -> Result<SubtleReport> {
    let verdicts: Vec<(String, bool)> = family
        .iter()
        .map(|r| Ok(((*r).to_owned(), is_ultrametric(&u_l_table_vertices(t, family, r)?).ok)))
        .collect::<Result<_>>()?;
    let consistent = verdicts.iter().all(|v| v.1) || verdicts.iter().all(|v| !v.1);
    Ok(SubtleReport { verdicts, consistent })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValBlocksReport {
    pub hypothesis: HullValencyReport,
    pub four_point: FourPointReport,
    pub hull_reproduces: Option<bool>,
    pub isomorphic: Option<bool>,
    pub consistent: bool,
}

/// Tree-likeness of the angular distance on a family of vertices and
/// agreement of its tree hull with the hull in the brick-vertex tree.
pub fn valblocks_check(g: &DualGraph, t: &BracketTable, family: &[&str]) -> Result<ValBlocksReport> {
    check_family(g, family)?;
    let hypothesis = hull_report(g, family)?;
    let rho = rho_metric(t, family)?;
    let four_point = four_point_check(&rho);
    let (hull_reproduces, isomorphic) = if four_point.ok {
        match tree_hull(&rho) {
            Ok(h) => {
                let shape = vertex_hull_f_tree(g, family)?;
                (Some(h.reproduces(&rho)?), Some(f_tree_isomorphic(&h.tree, &shape)?))
            }
            Err(Error::NotTreeLike(_)) => (Some(false), None),
            Err(e) => return Err(e),
        }
    } else {
        (None, None)
    };
    let consistent = !hypothesis.ok || (four_point.ok && hull_reproduces == Some(true) && isomorphic == Some(true));
    Ok(ValBlocksReport { hypothesis, four_point, hull_reproduces, isomorphic, consistent })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::lattice::brackets;

    #[test]
    fn tetrahedron_full_family() {
        let g = corpus::tetrahedron(4);
        let t = brackets(&g).unwrap();
        let r = ultram_theorem_check(&g, &t, &["E1", "E2", "E3", "E4"], "E1").unwrap();
        assert!(!r.hypothesis.ok);
        assert_eq!(r.hypothesis.offenders, vec![("B#1".to_owned(), 4)]);
        assert!(r.ultrametric.ok);
        assert!(r.consistent);
    }

    #[test]
    fn tetrahedron_three_vertices() {
        let g = corpus::tetrahedron(4);
        let t = brackets(&g).unwrap();
        let r = ultram_theorem_check(&g, &t, &["E1", "E2", "E3"], "E1").unwrap();
        assert!(r.hypothesis.ok);
        assert!(r.ultrametric.ok);
        assert_eq!(r.isomorphic, Some(true));
        let v = valblocks_check(&g, &t, &["E1", "E2", "E3"]).unwrap();
        assert!(v.consistent);
        assert_eq!(v.isomorphic, Some(true));
    }

    #[test]
    fn arborescent_corpus_is_consistent() {
        for g in corpus::named().into_iter().filter(|g| g.is_arborescent()) {
            let t = brackets(&g).unwrap();
            let ids: Vec<&str> = g.ids().collect();
            for root in &ids {
                let r = ultram_theorem_check(&g, &t, &ids, root).unwrap();
                assert!(r.hypothesis.ok && r.ultrametric.ok && r.isomorphic == Some(true), "{:?} {root}", g.name());
            }
            let v = valblocks_check(&g, &t, &ids).unwrap();
            assert!(v.consistent, "{:?}", g.name());
            assert!(subtle_check(&t, &ids).unwrap().consistent);
        }
    }

    #[test]
    fn subtle_on_tetrahedron() {
        let t = brackets(&corpus::tetrahedron(4)).unwrap();
        let r = subtle_check(&t, &["E1", "E2", "E3", "E4"]).unwrap();
        assert!(r.consistent);
        assert!(r.verdicts.iter().all(|v| v.1));
    }

    #[test]
    fn family_errors() {
        let g = corpus::a3();
        let t = brackets(&g).unwrap();
        assert_eq!(ultram_theorem_check(&g, &t, &["E1", "E2"], "E3").unwrap_err(), Error::RootNotInFamily);
        assert!(matches!(ultram_theorem_check(&g, &t, &["E1", "E1"], "E1"), Err(Error::NotInjectiveResolution(_))));
    }
}

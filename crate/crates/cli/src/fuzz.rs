//! Randomized invariant suites over seeded models.
//!
//! Case `i` draws everything from its own stream `case_rng(seed, i)`, so the
//! cases run in parallel and the merged report depends only on the seed.

use std::f64::consts::FRAC_PI_2;
use std::fmt::Write;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use arborcheck::bricks::{brick_vertex_tree, tree_separates_idx};
use arborcheck::lattice::{crucial_check, spherical_angle};
use arborcheck::random::{case_rng, random_blowup, random_dual_graph, random_subset, CaseRng};
use arborcheck::treemetric::{is_ultrametric, subtle_check, u_l_table_vertices, ultram_theorem_check, valblocks_check};
use arborcheck::valuation::{noud_counterexample, same_valuation, val_bracket};
use arborcheck::{brackets, DualGraph, Rational, Valuation};

use crate::{Failure, Output, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CaseReport {
    pub index: u64,
    pub vertices: usize,
    pub edges: usize,
    pub arborescent: bool,
    pub checks: usize,
    pub failures: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FuzzReport {
    pub seed: u64,
    pub models: usize,
    pub max_vertices: usize,
    pub checks: usize,
    pub failed_cases: usize,
    pub cases: Vec<CaseReport>,
}

struct Case {
    checks: usize,
    failures: Vec<String>,
}

impl Case {
    fn expect(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checks += 1;
        if !ok {
            self.failures.push(what());
        }
    }

    fn attempt<T>(&mut self, what: &str, r: arborcheck::Result<T>) -> Option<T> {
        match r {
            Ok(v) => Some(v),
            Err(e) => {
                self.checks += 1;
                self.failures.push(format!("{what}: {e}"));
                None
            }
        }
    }
}

fn random_valuation(g: &DualGraph, rng: &mut CaseRng) -> Valuation {
    let weight = |rng: &mut CaseRng| Rational::new(rng.gen_range(1..10), rng.gen_range(1..5));
    if !g.edges().is_empty() && rng.gen_bool(0.5) {
        let (a, b) = g.edges()[rng.gen_range(0..g.edges().len())];
        Valuation::qm(g.id(a), g.id(b), weight(rng), weight(rng))
    } else {
        Valuation::div(g.id(rng.gen_range(0..g.len()))).scaled(&weight(rng))
    }
}

fn lattice_suite(c: &mut Case, g: &DualGraph, tolerance: f64) -> Option<()> {
    let t = c.attempt("brackets", brackets(g))?;
    let ids: Vec<&str> = g.ids().collect();
    let generic = g.to_generic();
    let bvt = c.attempt("brick-vertex tree", brick_vertex_tree(&generic))?;
    let node: Vec<usize> = ids.iter().map(|id| bvt.index_of(id)).collect::<Result<_, _>>().ok()?;
    for u in 0..ids.len() {
        for v in 0..ids.len() {
            for w in 0..ids.len() {
                let Some(rep) = c.attempt("crucial inequality", crucial_check(&t, g, ids[u], ids[v], ids[w])) else {
                    continue;
                };
                let sep = g.separates_idx(v, u, w);
                c.expect(rep.equality == sep, || {
                    format!("equality differs from separation at ({}, {}, {})", ids[u], ids[v], ids[w])
                });
                c.expect(sep == tree_separates_idx(&bvt, node[v], node[u], node[w]), || {
                    format!("brick-vertex tree misreads separation at ({}, {}, {})", ids[u], ids[v], ids[w])
                });
                if u != v && v != w && u != w {
                    if let Some(a) = c.attempt("spherical angle", spherical_angle(&t, ids[u], ids[v], ids[w])) {
                        c.expect(a > 0.0 && a <= FRAC_PI_2 + tolerance, || format!("angle {a} out of range"));
                        if sep {
                            c.expect((a - FRAC_PI_2).abs() < tolerance, || {
                                format!("separation triple ({}, {}, {}) has angle {a}", ids[u], ids[v], ids[w])
                            });
                        }
                    }
                }
            }
        }
    }
    Some(())
}

fn blowup_suite(c: &mut Case, g: &DualGraph, rng: &mut CaseRng) -> Option<()> {
    let before = c.attempt("brackets", brackets(g))?;
    let mut h = g.clone();
    for _ in 0..3 {
        let spec = random_blowup(rng, &h);
        let id = h.fresh_id("N");
        h = c.attempt("blow-up", h.blowup(&spec, &id))?;
    }
    c.expect(h.is_arborescent() == g.is_arborescent(), || "blow-up changed arborescence".into());
    let after = c.attempt("brackets after blow-up", brackets(&h))?;
    for u in g.ids() {
        for v in g.ids() {
            c.expect(before.get(u, v).ok() == after.get(u, v).ok(), || format!("<{u},{v}> changed under blow-up"));
        }
    }
    Some(())
}

fn metric_suite(c: &mut Case, g: &DualGraph, rng: &mut CaseRng) -> Option<()> {
    let t = c.attempt("brackets", brackets(g))?;
    let ids: Vec<&str> = g.ids().collect();
    if g.is_arborescent() {
        for root in &ids {
            let m = c.attempt("u_L table", u_l_table_vertices(&t, &ids, root))?;
            c.expect(is_ultrametric(&m).ok, || format!("tree graph but u_{root} is not ultrametric"));
        }
    } else if let Some(w) = c.attempt("counterexample", noud_counterexample(g, ids[0])) {
        let [p0, p1, p2] = &w.products;
        c.expect(p0 < p1 && p1 < p2, || "counterexample chain is not strict".into());
    }
    let pick = random_subset(rng, ids.len(), 1, 6);
    let family: Vec<&str> = pick.iter().map(|&i| ids[i]).collect();
    if let Some(rep) = c.attempt("root independence", subtle_check(&t, &family)) {
        c.expect(rep.consistent, || format!("ultrametricity depends on the root for {family:?}"));
    }
    if let Some(rep) = c.attempt("ultrametric theorem", ultram_theorem_check(g, &t, &family, family[0])) {
        c.expect(rep.consistent, || format!("ultrametric conclusion fails for {family:?}"));
    }
    if let Some(rep) = c.attempt("tree hull", valblocks_check(g, &t, &family)) {
        c.expect(rep.consistent, || format!("tree hull conclusion fails for {family:?}"));
    }
    Some(())
}

fn valuation_suite(c: &mut Case, g: &DualGraph, rng: &mut CaseRng) -> Option<()> {
    let v1 = random_valuation(g, rng);
    let v2 = random_valuation(g, rng);
    if c.attempt("same valuation", same_valuation(g, &v1, &v2))? {
        return Some(());
    }
    let b12 = c.attempt("valuation bracket", val_bracket(g, &v1, &v2))?;
    let b21 = c.attempt("valuation bracket", val_bracket(g, &v2, &v1))?;
    c.expect(b12 == b21, || format!("<{v1}, {v2}> is not symmetric"));
    let two = Rational::from_integer(2);
    let b = c.attempt("valuation bracket", val_bracket(g, &v1.scaled(&two), &v2))?;
    c.expect(b.finite().cloned() == b12.finite().map(|x| x * &two), || format!("<{v1}, {v2}> is not homogeneous"));
    Some(())
}

fn run_case(seed: u64, index: u64, max_vertices: usize, tolerance: f64) -> CaseReport {
    let mut rng = case_rng(seed, index);
    let g = random_dual_graph(&mut rng, max_vertices);
    let mut c = Case { checks: 0, failures: Vec::new() };
    let reparsed = DualGraph::from_json(&g.to_json());
    c.expect(reparsed.as_ref().ok() == Some(&g), || "graph JSON does not round-trip".into());
    lattice_suite(&mut c, &g, tolerance);
    blowup_suite(&mut c, &g, &mut rng);
    metric_suite(&mut c, &g, &mut rng);
    valuation_suite(&mut c, &g, &mut rng);
    CaseReport {
        index,
        vertices: g.len(),
        edges: g.edges().len(),
        arborescent: g.is_arborescent(),
        checks: c.checks,
        failures: c.failures,
    }
}

pub fn fuzz(models: usize, seed: u64, max_vertices: usize, tolerance: f64) -> FuzzReport {
    let cases: Vec<CaseReport> =
        (0..models as u64).into_par_iter().map(|i| run_case(seed, i, max_vertices, tolerance)).collect();
    FuzzReport {
        seed,
        models,
        max_vertices,
        checks: cases.iter().map(|c| c.checks).sum(),
        failed_cases: cases.iter().filter(|c| !c.failures.is_empty()).count(),
        cases,
    }
}

pub fn run(models: usize, seed: u64, max_vertices: usize, tolerance: f64) -> Result<Output, Failure> {
    if max_vertices == 0 {
        return Err(Failure::input("--max-vertices must be positive"));
    }
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Failure::input(format!("tolerance {tolerance} must be a nonnegative number")));
    }
    let report = fuzz(models, seed, max_vertices, tolerance);
    let mut text =
        format!("seed {seed}: {} models, {} checks, {} failed cases\n", models, report.checks, report.failed_cases);
    for case in report.cases.iter().filter(|c| !c.failures.is_empty()) {
        for f in &case.failures {
            writeln!(text, "case {}: {f}", case.index).unwrap();
        }
    }
    let status = if report.failed_cases == 0 { Status::Holds } else { Status::Internal };
    Output::new(&report, text, status)
}

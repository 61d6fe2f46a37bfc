//! One function per subcommand, plus the typed JSON reports they emit.

use std::fmt::Write;
use std::io::Read;
use std::path::Path;

use indexmap::IndexMap;
use serde::{Deserialize, Serialize};

use arborcheck::bricks::{block_decomposition, brick_vertex_tree, convex_hull, hull_valency_report, TreeReport};
use arborcheck::lattice::{crucial_check, spherical_angle, CrucialReport};
use arborcheck::treemetric::{
    four_point_check, rho_metric, tree_hull, u_l_table_vertices, ultra_tree, ultram_theorem_check, valblocks_check,
    FourPointReport, HullReport, UltraTheoremReport, ValBlocksReport,
};
use arborcheck::valuation::{
    noud_counterexample, udbv_hypothesis_check, val_bracket, val_fourpoint, NoudWitness, UdbvReport, ValFourPointReport,
};
use arborcheck::{
    brackets, dot, dual_basis, BlowupSpec, Bracket, BracketTable, DualGraph, FiniteMetric, GenericGraph, GraphFile,
    HullValencyReport, LogLength, Rational, Valuation,
};

use crate::{effective_seed, fuzz, golden, Cli, Command, Failure, Output, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateReport {
    pub name: Option<String>,
    pub vertices: usize,
    pub edges: usize,
    pub first_betti: usize,
    pub arborescent: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BracketsReport {
    pub brackets: BracketTable,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dual_basis: Option<IndexMap<String, IndexMap<String, Rational>>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RhoReport {
    pub family: Vec<String>,
    pub rho: FiniteMetric<LogLength>,
    pub four_point: FourPointReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub u: String,
    pub v: String,
    pub w: String,
    pub crucial: CrucialReport,
    pub q_uv: Rational,
    pub q_vw: Rational,
    pub q_uw: Rational,
    /// Spherical angle at `v`; absent when two of the vertices coincide.
    pub angle: Option<f64>,
    pub right_angle: Option<bool>,
    pub tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BvtReport {
    pub tree: TreeReport,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hull: Option<TreeReport>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullCmdReport {
    pub family: Vec<String>,
    pub hull: TreeReport,
    pub valency: HullValencyReport,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UltraCmdReport {
    pub family: Vec<String>,
    pub table: FiniteMetric<Rational>,
    pub check: UltraTheoremReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreehullReport {
    pub family: Vec<String>,
    pub check: ValBlocksReport,
    pub tree: Option<HullReport<LogLength>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlowupReport {
    pub spec: BlowupSpec,
    pub new_id: String,
    pub model: GraphFile,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValBracketReport {
    pub v1: Valuation,
    pub v2: Valuation,
    pub bracket: Bracket,
}

fn read_input(path: &Path) -> Result<String, Failure> {
    let mut text = String::new();
    if path.as_os_str() == "-" {
        std::io::stdin().read_to_string(&mut text).map_err(|e| Failure::input(format!("stdin: {e}")))?;
    } else {
        text = std::fs::read_to_string(path).map_err(|e| Failure::input(format!("{}: {e}", path.display())))?;
    }
    Ok(text)
}

fn load_raw(path: &Path) -> Result<GraphFile, Failure> {
    Ok(GraphFile::from_json(&read_input(path)?)?)
}

pub fn load_graph(path: &Path) -> Result<DualGraph, Failure> {
    Ok(DualGraph::validate(&load_raw(path)?)?)
}

/// Block structure only needs the combinatorics, so self-intersections may
/// be omitted and loops are allowed.
fn load_generic(path: &Path) -> Result<GenericGraph, Failure> {
    Ok(GenericGraph::from_file(&load_raw(path)?)?)
}

fn family_or_all(g: &DualGraph, family: &[String]) -> Result<Vec<String>, Failure> {
    if family.is_empty() {
        return Ok(g.ids().map(str::to_owned).collect());
    }
    for v in family {
        g.index_of(v)?;
    }
    Ok(family.to_vec())
}

fn as_strs(v: &[String]) -> Vec<&str> {
    v.iter().map(String::as_str).collect()
}

fn parse_valuation(s: &str) -> Result<Valuation, Failure> {
    Ok(s.parse()?)
}

fn verdict(ok: bool) -> &'static str {
    if ok {
        "yes"
    } else {
        "no"
    }
}

fn holds_if(ok: bool) -> Status {
    if ok {
        Status::Holds
    } else {
        Status::Fails
    }
}

pub fn run(cli: &Cli) -> Result<Output, Failure> {
    match &cli.command {
        Command::Validate(a) => validate(&a.graph),
        Command::Brackets { graph, dual } => brackets_cmd(&graph.graph, *dual),
        Command::Rho { graph, family } => rho(&graph.graph, &family.family),
        Command::Triple { graph, u, v, w, tolerance } => triple(&graph.graph, u, v, w, *tolerance),
        Command::Bricks(a) => bricks(&a.graph),
        Command::Bvt { graph, family } => bvt(&graph.graph, family),
        Command::Hull { graph, family } => hull(&graph.graph, &family.family),
        Command::Ultra { graph, family, root } => ultra(&graph.graph, &family.family, root.as_deref()),
        Command::Treehull { graph, family } => treehull(&graph.graph, &family.family),
        Command::Blowup { graph, free, satellite, id } => {
            blowup(&graph.graph, free.as_deref(), satellite, id.as_deref())
        }
        Command::Counterexample { graph, root } => counterexample(&graph.graph, root.as_deref()),
        Command::Valbracket { graph, v1, v2 } => valbracket(&graph.graph, v1, v2),
        Command::Fourpoint { graph, valuations, scale } => fourpoint(&graph.graph, valuations, scale),
        Command::Hypothesis { graph, valuations } => hypothesis(&graph.graph, valuations),
        Command::Golden => golden::run(),
        Command::Fuzz { models, seed, max_vertices, tolerance } => {
            fuzz::run(*models, effective_seed(*seed)?, *max_vertices, *tolerance)
        }
    }
}

fn validate(path: &Path) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let report = ValidateReport {
        name: g.name().map(str::to_owned),
        vertices: g.len(),
        edges: g.edges().len(),
        first_betti: g.edges().len() + 1 - g.len(),
        arborescent: g.is_arborescent(),
    };
    let text = format!(
        "valid: {} vertices, {} edges, first Betti number {}, arborescent: {}\n",
        report.vertices,
        report.edges,
        report.first_betti,
        verdict(report.arborescent)
    );
    Ok(Output::new(&report, text, Status::Holds)?.with_dot(dot::dual_graph(&g)))
}

fn brackets_cmd(path: &Path, dual: bool) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let t = brackets(&g)?;
    let basis = if dual {
        Some(dual_basis(&g)?.iter().zip(g.ids()).map(|(e, id)| (id.to_owned(), e.to_map(&g))).collect())
    } else {
        None
    };
    let mut text = String::new();
    for (i, u) in t.ids().iter().enumerate() {
        let row: Vec<String> = (0..t.len()).map(|j| t.at(i, j).to_string()).collect();
        writeln!(text, "{u}: {}", row.join(" ")).unwrap();
    }
    Output::new(&BracketsReport { brackets: t, dual_basis: basis }, text, Status::Holds)
}

fn rho(path: &Path, family: &[String]) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let family = family_or_all(&g, family)?;
    let t = brackets(&g)?;
    let rho = rho_metric(&t, &as_strs(&family))?;
    let four_point = four_point_check(&rho);
    let mut text = String::new();
    for (i, a) in rho.labels().iter().enumerate() {
        for (j, b) in rho.labels().iter().enumerate().skip(i + 1) {
            let d = rho.at(i, j);
            writeln!(text, "rho({a},{b}) = {d} ~ {:.9}", arborcheck::treemetric::Length::to_f64(d)).unwrap();
        }
    }
    writeln!(text, "4-point condition: {}", verdict(four_point.ok)).unwrap();
    if let Some(w) = &four_point.witness {
        writeln!(text, "witness: {}", w.join(", ")).unwrap();
    }
    let status = holds_if(four_point.ok);
    Output::new(&RhoReport { family, rho, four_point }, text, status)
}

fn triple(path: &Path, u: &str, v: &str, w: &str, tolerance: f64) -> Result<Output, Failure> {
    if !(tolerance.is_finite() && tolerance >= 0.0) {
        return Err(Failure::input(format!("tolerance {tolerance} must be a nonnegative number")));
    }
    let g = load_graph(path)?;
    let t = brackets(&g)?;
    let crucial = crucial_check(&t, &g, u, v, w)?;
    let distinct = u != v && v != w && u != w;
    let angle = if distinct { Some(spherical_angle(&t, u, v, w)?) } else { None };
    let right_angle = angle.map(|a| (a - std::f64::consts::FRAC_PI_2).abs() < tolerance);
    if crucial.separates && right_angle == Some(false) {
        return Err(Failure::internal(format!("{v} separates {u} from {w} but the angle is {}", angle.unwrap())));
    }
    let report = TripleReport {
        u: u.to_owned(),
        v: v.to_owned(),
        w: w.to_owned(),
        q_uv: t.q_value(u, v)?,
        q_vw: t.q_value(v, w)?,
        q_uw: t.q_value(u, w)?,
        crucial,
        angle,
        right_angle,
        tolerance,
    };
    let mut text = format!(
        "<{u},{v}><{v},{w}> = {}  <=  <{v},{v}><{u},{w}> = {}\nequality: {}, {v} separates: {}\n",
        report.crucial.lhs,
        report.crucial.rhs,
        verdict(report.crucial.equality),
        verdict(report.crucial.separates)
    );
    if let Some(a) = angle {
        writeln!(text, "angle at {v}: {a:.12} rad").unwrap();
    }
    Output::new(&report, text, Status::Holds)
}

fn bricks(path: &Path) -> Result<Output, Failure> {
    let g = load_generic(path)?;
    let report = block_decomposition(&g)?.report(&g);
    let mut text = format!("cut vertices: {}\n", report.cut_vertices.join(" "));
    for b in &report.bricks {
        writeln!(text, "{}: {}", b.id, b.vertices.join(" ")).unwrap();
    }
    let bridges: Vec<String> = report.bridges.iter().map(|[a, b]| format!("{a}-{b}")).collect();
    writeln!(text, "bridges: {}", bridges.join(" ")).unwrap();
    let bvt = brick_vertex_tree(&g)?;
    Ok(Output::new(&report, text, Status::Holds)?.with_dot(dot::tree(&bvt, None)))
}

fn tree_text(t: &TreeReport) -> String {
    let mut text = String::new();
    for [a, b] in &t.edges {
        writeln!(text, "{a} -- {b}").unwrap();
    }
    text
}

fn bvt(path: &Path, family: &[String]) -> Result<Output, Failure> {
    let g = load_generic(path)?;
    let tree = brick_vertex_tree(&g)?;
    let hull = if family.is_empty() { None } else { Some(convex_hull(&tree, &as_strs(family))?) };
    let report = BvtReport { tree: tree.report(), hull: hull.as_ref().map(|h| h.report()) };
    let text = tree_text(&report.tree);
    Ok(Output::new(&report, text, Status::Holds)?.with_dot(dot::tree(&tree, hull.as_ref())))
}

fn hull(path: &Path, family: &[String]) -> Result<Output, Failure> {
    let raw = load_raw(path)?;
    let g = GenericGraph::from_file(&raw)?;
    let family: Vec<String> = if family.is_empty() { g.ids().to_vec() } else { family.to_vec() };
    let f = as_strs(&family);
    let tree = brick_vertex_tree(&g)?;
    let hull = convex_hull(&tree, &f)?;
    let valency = hull_valency_report(&g, &f)?;
    let mut text = tree_text(&hull.report());
    writeln!(text, "every brick has hull valency at most 3: {}", verdict(valency.ok)).unwrap();
    for (brick, val) in &valency.offenders {
        writeln!(text, "  {brick}: valency {val}").unwrap();
    }
    let status = holds_if(valency.ok);
    let report = HullCmdReport { family, hull: hull.report(), valency };
    Ok(Output::new(&report, text, status)?.with_dot(dot::tree(&tree, Some(&hull))))
}

fn ultra(path: &Path, family: &[String], root: Option<&str>) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let family = family_or_all(&g, family)?;
    let root = root.unwrap_or(&family[0]).to_owned();
    let f = as_strs(&family);
    let t = brackets(&g)?;
    let table = u_l_table_vertices(&t, &f, &root)?;
    let check = ultram_theorem_check(&g, &t, &f, &root)?;
    if !check.consistent {
        return Err(Failure::internal(format!(
            "valency hypothesis holds for {family:?} but the conclusion fails at root {root}"
        )));
    }
    let mut text = format!("u_{root} ultrametric: {}\n", verdict(check.ultrametric.ok));
    if let Some(w) = &check.ultrametric.witness {
        writeln!(text, "witness: {}", w.join(", ")).unwrap();
    }
    writeln!(text, "valency hypothesis: {}", verdict(check.hypothesis.ok)).unwrap();
    if let Some(iso) = check.isomorphic {
        writeln!(text, "dendrogram matches the hull: {}", verdict(iso)).unwrap();
    }
    let status = holds_if(check.hypothesis.ok && check.ultrametric.ok && check.isomorphic != Some(false));
    let dot = if check.ultrametric.ok { Some(dot::ultra_tree(&ultra_tree(&table, &root)?)) } else { None };
    let mut out = Output::new(&UltraCmdReport { family, table, check }, text, status)?;
    out.dot = dot;
    Ok(out)
}

fn treehull(path: &Path, family: &[String]) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let family = family_or_all(&g, family)?;
    let f = as_strs(&family);
    let t = brackets(&g)?;
    let check = valblocks_check(&g, &t, &f)?;
    if !check.consistent {
        return Err(Failure::internal(format!("valency hypothesis holds for {family:?} but the tree hull disagrees")));
    }
    let hull = if check.four_point.ok { tree_hull(&rho_metric(&t, &f)?).ok() } else { None };
    let mut text = format!("4-point condition: {}\n", verdict(check.four_point.ok));
    if let Some(h) = &hull {
        for e in h.report().edges {
            writeln!(text, "{} -- {}: {} ~ {:.9}", e.a, e.b, e.length, e.rho_float).unwrap();
        }
    }
    if let Some(iso) = check.isomorphic {
        writeln!(text, "shape matches the hull: {}", verdict(iso)).unwrap();
    }
    let status =
        holds_if(check.four_point.ok && check.hull_reproduces != Some(false) && check.isomorphic != Some(false));
    let dot = hull.as_ref().map(dot::metric_tree);
    let mut out = Output::new(&TreehullReport { family, check, tree: hull.map(|h| h.report()) }, text, status)?;
    out.dot = dot;
    Ok(out)
}

fn blowup(path: &Path, free: Option<&str>, satellite: &[String], id: Option<&str>) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let spec = match (free, satellite) {
        (Some(at), []) => BlowupSpec::free(at),
        (None, [u, v]) => BlowupSpec::satellite(u, v),
        (None, [u, v, index]) => BlowupSpec::Satellite {
            u: u.clone(),
            v: v.clone(),
            index: index.parse().map_err(|_| Failure::input(format!("edge index {index:?} is not a number")))?,
        },
        _ => return Err(Failure::input("give either --free U or --satellite U,V[,INDEX]")),
    };
    let new_id = id.map(str::to_owned).unwrap_or_else(|| g.fresh_id("N"));
    let h = g.blowup(&spec, &new_id)?;
    let mut text = format!("new prime {new_id}\n");
    for v in h.vertices() {
        writeln!(text, "{} ({})", v.id, v.self_int).unwrap();
    }
    let edges: Vec<String> = h.edges().iter().map(|&(a, b)| format!("{}-{}", h.id(a), h.id(b))).collect();
    writeln!(text, "edges: {}", edges.join(" ")).unwrap();
    let report = BlowupReport { spec, new_id, model: h.to_file() };
    Ok(Output::new(&report, text, Status::Holds)?.with_dot(dot::dual_graph(&h)))
}

fn counterexample(path: &Path, root: Option<&str>) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let root = match root {
        Some(r) => r.to_owned(),
        None => g.id(0).to_owned(),
    };
    let w: NoudWitness = noud_counterexample(&g, &root)?;
    let model = DualGraph::validate(&w.model)?;
    let text = format!(
        "cycle {}\nA = {}, B = {}, C_m = {}, C_p = {}\n(s, t) = ({}, {})\n{} < {} < {}\n",
        w.cycle.join(" "),
        w.branch_a,
        w.branch_b,
        w.branch_cm,
        w.branch_cp,
        w.s,
        w.t,
        w.products[0],
        w.products[1],
        w.products[2]
    );
    Ok(Output::new(&w, text, Status::Holds)?.with_dot(dot::dual_graph(&model)))
}

fn valbracket(path: &Path, v1: &str, v2: &str) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let (v1, v2) = (parse_valuation(v1)?, parse_valuation(v2)?);
    let bracket = val_bracket(&g, &v1, &v2)?;
    let text = format!("<{v1}, {v2}> = {bracket}\n");
    Output::new(&ValBracketReport { v1, v2, bracket }, text, Status::Holds)
}

fn fourpoint(path: &Path, valuations: &[String], scale: &str) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let scale: Rational = scale.parse()?;
    if !scale.is_positive() {
        return Err(Failure::input(format!("scale {scale} must be positive")));
    }
    let vals: Vec<Valuation> = valuations.iter().map(|s| parse_valuation(s)).collect::<Result<_, _>>()?;
    let vals: [Valuation; 4] = vals.try_into().map_err(|_| Failure::input("expected four valuations"))?;
    let report: ValFourPointReport = val_fourpoint(&g, &vals, &scale)?;
    let text = format!(
        "I1 = {}, I2 = {}, I3 = {}\n4-point condition: {}\n",
        report.i1,
        report.i2,
        report.i3,
        verdict(report.verdict)
    );
    let status = holds_if(report.verdict);
    Output::new(&report, text, status)
}

fn hypothesis(path: &Path, valuations: &[String]) -> Result<Output, Failure> {
    let g = load_graph(path)?;
    let vals: Vec<Valuation> = valuations.iter().map(|s| parse_valuation(s)).collect::<Result<_, _>>()?;
    let report: UdbvReport = udbv_hypothesis_check(&g, &vals)?;
    let mut text = format!("valency hypothesis: {}\n", verdict(report.ok));
    for (brick, val) in &report.offenders {
        writeln!(text, "  {brick}: valency {val}").unwrap();
    }
    if report.ambiguous {
        text.push_str("another attachment of the curve members changes the verdict\n");
    }
    let status = holds_if(report.ok);
    Output::new(&report, text, status)
}

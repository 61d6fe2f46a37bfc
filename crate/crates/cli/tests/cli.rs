use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::{Command, Output, Stdio};

use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::Value;
use tempfile::TempDir;

use arborcheck::corpus;
use arborcheck::valuation::{NoudWitness, UdbvReport, ValFourPointReport};
use arborcheck::{BlockReport, DualGraph, Rational};
use arborcheck_cli::commands::{
    BlowupReport, BracketsReport, BvtReport, HullCmdReport, RhoReport, TreehullReport, TripleReport, UltraCmdReport,
    ValBracketReport, ValidateReport,
};
use arborcheck_cli::fuzz::FuzzReport;
use arborcheck_cli::golden::GoldenReport;

struct Workspace {
    dir: TempDir,
}

impl Workspace {
    fn new() -> Self {
        let ws = Workspace { dir: TempDir::new().unwrap() };
        ws.graph("tetra.json", &corpus::tetrahedron(4));
        ws.graph("y.json", &corpus::y_graph());
        ws.graph("chain.json", &corpus::a3());
        ws.graph("pendant.json", &corpus::triangle_pendant());
        ws.write("disconnected.json", r#"{"vertices":[{"id":"a","self":-2},{"id":"b","self":-2}],"edges":[]}"#);
        ws.write("indefinite.json", r#"{"vertices":[{"id":"a","self":-1},{"id":"b","self":-1}],"edges":[["a","b"]]}"#);
        ws.write("loops.json", r#"{"vertices":[{"id":"a"},{"id":"b"}],"edges":[["a","b"],["b","b"]]}"#);
        ws
    }

    fn write(&self, name: &str, text: &str) -> PathBuf {
        let p = self.dir.path().join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    fn graph(&self, name: &str, g: &DualGraph) -> PathBuf {
        self.write(name, &g.to_json())
    }

    fn path(&self, name: &str) -> String {
        self.dir.path().join(name).display().to_string()
    }

    fn run(&self, args: &[&str]) -> Output {
        arborcheck(args, &[])
    }
}

fn arborcheck(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_arborcheck"));
    cmd.args(args).env_remove("ARBORCHECK_SEED");
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn stdout(out: &Output) -> &str {
    std::str::from_utf8(&out.stdout).unwrap()
}

/// Parses the report into its type, checks that rendering it again gives the
/// same JSON, and returns it.
fn round_trip<T: Serialize + DeserializeOwned>(out: &Output) -> T {
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    let typed: T = serde_json::from_value(value.clone()).unwrap();
    assert_eq!(serde_json::to_value(&typed).unwrap(), value);
    typed
}

fn r(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn tetrahedron_brackets() {
    let ws = Workspace::new();
    let out = ws.run(&["brackets", &ws.path("tetra.json")]);
    assert_eq!(code(&out), 0);
    let rep: BracketsReport = round_trip(&out);
    assert_eq!(rep.brackets.get("E1", "E1").unwrap(), &r("2/5"));
    assert_eq!(rep.brackets.get("E2", "E4").unwrap(), &r("1/5"));
    assert!(rep.dual_basis.is_none());

    let out = ws.run(&["brackets", "--dual", &ws.path("tetra.json")]);
    let rep: BracketsReport = round_trip(&out);
    assert_eq!(rep.dual_basis.unwrap()["E1"]["E1"], r("-2/5"));
}

#[test]
fn table_keys_keep_vertex_order() {
    let ws = Workspace::new();
    let g = corpus::star_tree();
    ws.graph("star.json", &g);
    let out = ws.run(&["brackets", &ws.path("star.json")]);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<&String> = value["brackets"].as_object().unwrap().keys().collect();
    let ids: Vec<String> = g.ids().map(str::to_owned).collect();
    assert_eq!(keys, ids.iter().collect::<Vec<_>>());
}

#[test]
fn input_errors_exit_2() {
    let ws = Workspace::new();
    let out = ws.run(&["validate", &ws.path("disconnected.json")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("disconnected"));

    let out = ws.run(&["validate", &ws.path("indefinite.json")]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("negative definite"));

    assert_eq!(code(&ws.run(&["validate", &ws.path("missing.json")])), 2);
    assert_eq!(code(&ws.run(&["valbracket", &ws.path("tetra.json"), "div(E9)", "div(E1)"])), 2);
    assert_eq!(code(&ws.run(&["valbracket", &ws.path("tetra.json"), "dvi(E1)", "div(E1)"])), 2);
    assert_eq!(code(&ws.run(&["fourpoint", &ws.path("tetra.json"), "div(E1)", "div(E2)", "div(E3)"])), 2);
    assert_eq!(code(&ws.run(&["ultra", &ws.path("tetra.json"), "-f", "E1,E2", "--root", "E3"])), 2);
    assert_eq!(code(&ws.run(&["no-such-command"])), 2);
    assert_eq!(code(&ws.run(&["blowup", &ws.path("tetra.json")])), 2);
}

#[test]
fn validate_reports_topology() {
    let ws = Workspace::new();
    let out = ws.run(&["validate", &ws.path("y.json")]);
    assert_eq!(code(&out), 0);
    let rep: ValidateReport = round_trip(&out);
    assert_eq!((rep.vertices, rep.edges, rep.first_betti, rep.arborescent), (5, 7, 3, false));
    let rep: ValidateReport = round_trip(&ws.run(&["validate", &ws.path("chain.json")]));
    assert!(rep.arborescent);
}

#[test]
fn graph_from_stdin() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_arborcheck"))
        .args(["brackets", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child.stdin.take().unwrap().write_all(corpus::tetrahedron(4).to_json().as_bytes()).unwrap();
    let out = child.wait_with_output().unwrap();
    assert_eq!(code(&out), 0);
    let rep: BracketsReport = round_trip(&out);
    assert_eq!(rep.brackets.get("E3", "E4").unwrap(), &r("1/5"));
}

#[test]
fn y_graph_boundary_quadruple() {
    let ws = Workspace::new();
    let y = ws.path("y.json");
    let quad = |t: &str, s: &str| {
        ws.run(&["fourpoint", &y, &format!("qm(E2,E5;{s},{t})"), "div(E1)", "div(E3)", "div(E4)", "--scale", "6400"])
    };
    let out = quad("1/6", "5/6");
    assert_eq!(code(&out), 0);
    let rep: ValFourPointReport = round_trip(&out);
    assert_eq!([rep.i1, rep.i2, rep.i3].map(|b| b.finite().unwrap().clone()), [r("100"), r("100"), r("100")]);
    assert!(rep.verdict);

    let out = quad("1/12", "11/12");
    assert_eq!(code(&out), 1);
    let rep: ValFourPointReport = round_trip(&out);
    assert_eq!(rep.i1.finite().unwrap(), &r("92"));
    assert!(!rep.verdict);
}

#[test]
fn valuation_brackets() {
    let ws = Workspace::new();
    let t = ws.path("tetra.json");
    let out = ws.run(&["valbracket", &t, "div(E1)", "qm(E1,E2;2/3,1/3)"]);
    let rep: ValBracketReport = round_trip(&out);
    assert_eq!(rep.bracket.finite().unwrap(), &r("1/3"));
    let out = ws.run(&["valbracket", &t, "curve(E1:1)", "curve(E1:1)*2"]);
    let value: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["bracket"], "inf");
    let _: ValBracketReport = round_trip(&out);
}

#[test]
fn golden_examples_pass() {
    let out = arborcheck(&["golden"], &[]);
    assert_eq!(code(&out), 0);
    let rep: GoldenReport = round_trip(&out);
    assert_eq!(rep.failed, 0);
    assert!(rep.cases.iter().all(|c| c.ok && c.expected == c.actual));
    assert!(rep.passed >= 40);
}

#[test]
fn fuzz_is_reproducible_and_env_seed_wins() {
    let a = arborcheck(&["fuzz", "--models", "30", "--seed", "11"], &[]);
    let b = arborcheck(&["fuzz", "--models", "30", "--seed", "11"], &[]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let rep: FuzzReport = round_trip(&a);
    assert_eq!(rep.failed_cases, 0);
    assert_eq!(rep.cases.iter().map(|c| c.index).collect::<Vec<_>>(), (0..30).collect::<Vec<_>>());

    let c = arborcheck(&["fuzz", "--models", "30", "--seed", "5"], &[("ARBORCHECK_SEED", "11")]);
    assert_eq!(a.stdout, c.stdout);
    let d = arborcheck(&["fuzz", "--models", "30", "--seed", "12"], &[]);
    assert_ne!(a.stdout, d.stdout);
    assert_eq!(code(&arborcheck(&["fuzz", "--models", "1"], &[("ARBORCHECK_SEED", "x")])), 2);
}

#[test]
fn counterexample_on_tetrahedron() {
    let ws = Workspace::new();
    let out = ws.run(&["counterexample", &ws.path("tetra.json"), "--root", "E1"]);
    assert_eq!(code(&out), 0);
    let w: NoudWitness = round_trip(&out);
    assert_eq!((w.s, w.t), (1, 2));
    assert_eq!(w.products, [r("8/25"), r("9/25"), r("2/5")]);
    let out = ws.run(&["counterexample", &ws.path("chain.json")]);
    assert_eq!(code(&out), 1);
}

#[test]
fn block_structure_commands() {
    let ws = Workspace::new();
    let out = ws.run(&["bricks", &ws.path("pendant.json")]);
    let rep: BlockReport = round_trip(&out);
    assert_eq!(rep.bricks.len(), 1);
    assert_eq!(rep.bridges.len(), 1);

    let out = ws.run(&["bricks", &ws.path("loops.json")]);
    assert_eq!(code(&out), 0);
    let rep: BlockReport = round_trip(&out);
    assert_eq!(rep.bricks.len(), 1);

    let out = ws.run(&["bvt", &ws.path("pendant.json"), "-f", "E1,E2"]);
    let rep: BvtReport = round_trip(&out);
    assert!(rep.hull.unwrap().nodes.iter().any(|n| n.brick));

    let out = ws.run(&["hull", &ws.path("tetra.json")]);
    assert_eq!(code(&out), 1);
    let rep: HullCmdReport = round_trip(&out);
    assert_eq!(rep.valency.offenders, vec![("B#1".to_owned(), 4)]);
    let out = ws.run(&["hull", &ws.path("tetra.json"), "-f", "E1,E2,E3"]);
    assert_eq!(code(&out), 0);
}

#[test]
fn metric_commands() {
    let ws = Workspace::new();
    let t = ws.path("tetra.json");
    let out = ws.run(&["rho", &t]);
    assert_eq!(code(&out), 0);
    let rep: RhoReport = round_trip(&out);
    assert!(rep.four_point.ok);

    let out = ws.run(&["ultra", &t, "-f", "E1,E2,E3", "--root", "E2"]);
    assert_eq!(code(&out), 0);
    let rep: UltraCmdReport = round_trip(&out);
    assert!(rep.check.ultrametric.ok && rep.check.isomorphic == Some(true));

    let out = ws.run(&["treehull", &t, "-f", "E1,E2,E3"]);
    assert_eq!(code(&out), 0);
    let rep: TreehullReport = round_trip(&out);
    let tree = rep.tree.unwrap();
    assert_eq!(tree.edges.len(), 3);
    assert!(tree.edges.iter().all(|e| (e.rho_float - 2f64.ln()).abs() < 1e-12));

    let out = ws.run(&["triple", &ws.path("chain.json"), "E1", "E2", "E3"]);
    assert_eq!(code(&out), 0);
    let rep: TripleReport = round_trip(&out);
    assert!(rep.crucial.equality && rep.crucial.separates && rep.right_angle == Some(true));
}

#[test]
fn blowup_and_hypothesis() {
    let ws = Workspace::new();
    let out = ws.run(&["blowup", &ws.path("tetra.json"), "--satellite", "E1,E2", "--id", "F"]);
    assert_eq!(code(&out), 0);
    let rep: BlowupReport = round_trip(&out);
    let h = DualGraph::validate(&rep.model).unwrap();
    assert_eq!(h.self_int(h.index_of("F").unwrap()), -1);
    assert_eq!(h.self_int(h.index_of("E1").unwrap()), -5);

    let out = ws.run(&["hypothesis", &ws.path("tetra.json"), "div(E1)", "div(E2)", "div(E3)", "div(E4)"]);
    assert_eq!(code(&out), 1);
    let rep: UdbvReport = round_trip(&out);
    assert!(!rep.ok);
}

#[test]
fn output_formats() {
    let ws = Workspace::new();
    let out = ws.run(&["validate", &ws.path("tetra.json"), "--dot"]);
    assert!(stdout(&out).starts_with("graph \"tetrahedron\" {"));
    assert!(stdout(&out).contains("[label=\"E1 (-4)\"]"));
    let out = ws.run(&["bricks", &ws.path("pendant.json"), "--dot"]);
    assert!(stdout(&out).contains("fillcolor=gray80"));
    let out = ws.run(&["--text", "brackets", &ws.path("tetra.json")]);
    assert!(stdout(&out).starts_with("E1: 2/5 1/5 1/5 1/5"));
    assert_eq!(code(&ws.run(&["brackets", &ws.path("tetra.json"), "--text", "--dot"])), 2);
}

#[test]
fn golden_examples_match_library() {
    // The binary's embedded values agree with the library run in process.
    let out = arborcheck_cli::golden::run().unwrap();
    let rep: GoldenReport = serde_json::from_value(out.body).unwrap();
    assert_eq!(rep.failed, 0);
    assert!(Path::new(env!("CARGO_BIN_EXE_arborcheck")).exists());
}

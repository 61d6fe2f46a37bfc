//! Worked examples on the tetrahedron and the Y graph, replayed against
//! stored values. Every comparison is between canonical `p/q` strings.

use std::fmt::Write;

use serde::{Deserialize, Serialize};

use arborcheck::corpus::{tetrahedron, y_graph};
use arborcheck::valuation::{noud_counterexample, val_bracket, val_fourpoint};
use arborcheck::{brackets, DualGraph, Rational, Valuation};

use crate::{Failure, Output, Status};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenCase {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub cases: Vec<GoldenCase>,
    pub passed: usize,
    pub failed: usize,
}

struct Cases(Vec<GoldenCase>);

impl Cases {
    fn check(&mut self, name: impl Into<String>, expected: &str, actual: impl ToString) {
        let actual = actual.to_string();
        self.0.push(GoldenCase { name: name.into(), ok: actual == expected, expected: expected.to_owned(), actual });
    }
}

const TETRA_T: [(&str, &str); 6] =
    [("0", "2/5"), ("1/6", "11/30"), ("1/3", "1/3"), ("1/2", "3/10"), ("2/3", "4/15"), ("1", "1/5")];

const Y_T: [(&str, &str, bool); 3] = [("1/12", "92", false), ("1/6", "100", true), ("1/4", "108", true)];

fn mu(u: &str, v: &str, t: &Rational) -> Valuation {
    Valuation::qm(u, v, Rational::one() - t, t.clone())
}

fn quadruple(
    cases: &mut Cases,
    g: &DualGraph,
    name: &str,
    q: [Valuation; 4],
    scale: &Rational,
    want: [&str; 3],
    holds: bool,
) -> arborcheck::Result<()> {
    let rep = val_fourpoint(g, &q, scale)?;
    cases.check(format!("{name} I1"), want[0], &rep.i1);
    cases.check(format!("{name} I2"), want[1], &rep.i2);
    cases.check(format!("{name} I3"), want[2], &rep.i3);
    cases.check(format!("{name} verdict"), &holds.to_string(), rep.verdict);
    Ok(())
}

fn collect() -> arborcheck::Result<Vec<GoldenCase>> {
    let mut cases = Cases(Vec::new());

    let g = tetrahedron(4);
    let t = brackets(&g)?;
    cases.check("tetrahedron <E1,E1>", "2/5", t.get("E1", "E1")?);
    cases.check("tetrahedron <E1,E2>", "1/5", t.get("E1", "E2")?);
    for (s, want) in TETRA_T {
        let s: Rational = s.parse()?;
        let b = val_bracket(&g, &Valuation::div("E1"), &mu("E1", "E2", &s))?;
        cases.check(format!("tetrahedron <div(E1), mu_{s}>"), want, b);
    }
    let scale = Rational::from_integer(25);
    for s in ["1/3", "1/2"] {
        let s: Rational = s.parse()?;
        let two_minus = (Rational::from_integer(2) - &s).to_string();
        let one_plus = (Rational::one() + &s).to_string();
        let q = [Valuation::div("E1"), mu("E1", "E2", &s), Valuation::div("E3"), Valuation::div("E4")];
        quadruple(&mut cases, &g, &format!("tetrahedron (1, mu_{s}, 3, 4)"), q, &scale, [&two_minus, "1", "1"], true)?;
        let q = [Valuation::div("E1"), mu("E1", "E2", &s), Valuation::div("E2"), Valuation::div("E3")];
        quadruple(
            &mut cases,
            &g,
            &format!("tetrahedron (1, mu_{s}, 2, 3)"),
            q,
            &scale,
            [&two_minus, "1", &one_plus],
            false,
        )?;
    }
    let w = noud_counterexample(&g, "E1")?;
    cases.check("tetrahedron witness (s, t)", "(1, 2)", format!("({}, {})", w.s, w.t));
    let products: Vec<String> = w.products.iter().map(Rational::to_string).collect();
    cases.check("tetrahedron witness products", "8/25 9/25 2/5", products.join(" "));

    let g = y_graph();
    let t = brackets(&g)?;
    cases.check("Y <E1,E2>", "7/80", t.get("E1", "E2")?);
    cases.check("Y <E1,E5>", "3/16", t.get("E1", "E5")?);
    cases.check("Y <E3,E2>", "1/8", t.get("E3", "E2")?);
    cases.check("Y <E3,E5>", "1/8", t.get("E3", "E5")?);
    let scale = Rational::from_integer(6400);
    for (s, i1, holds) in Y_T {
        let s: Rational = s.parse()?;
        let q = [Valuation::div("E1"), mu("E2", "E5", &s), Valuation::div("E3"), Valuation::div("E4")];
        quadruple(&mut cases, &g, &format!("Y (1, mu'_{s}, 3, 4)"), q, &scale, [i1, "100", "100"], holds)?;
    }
    Ok(cases.0)
}

pub fn run() -> Result<Output, Failure> {
    let cases = collect().map_err(|e| Failure::internal(format!("golden example failed to evaluate: {e}")))?;
    let failed = cases.iter().filter(|c| !c.ok).count();
    let mut text = String::new();
    for c in &cases {
        if c.ok {
            writeln!(text, "ok    {}: {}", c.name, c.actual).unwrap();
        } else {
            writeln!(text, "FAIL  {}: expected {}, got {}", c.name, c.expected, c.actual).unwrap();
        }
    }
    writeln!(text, "{} passed, {failed} failed", cases.len() - failed).unwrap();
    let report = GoldenReport { passed: cases.len() - failed, failed, cases };
    let status = if failed == 0 { Status::Holds } else { Status::Fails };
    Output::new(&report, text, status)
}

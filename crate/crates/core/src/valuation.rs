//! Divisorial, rational quasi-monomial and curve semivaluations on an
//! explicit model, their b-divisors and brackets.
//!
//! A quasi-monomial valuation with weights `(r, s)` at a point of `E_u ∩ E_v`
//! has `Z = r·Ě_u + s·Ě_v`. When two of them sit at the same point the
//! bracket is computed after repeated satellite blow-ups of that point, which
//! runs the Euclidean algorithm on the weights.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bricks::{hull_valency_report, HullValencyReport};
use crate::dualgraph::{BlowupSpec, DualGraph, GraphFile};
use crate::error::{Error, Result};
use crate::lattice::{brackets, dual_basis, BracketTable, BranchSpec, ExcDivisor};
use crate::rational::Rational;
use crate::treemetric::{is_ultrametric, min_attained_twice, u_l_branches};

#[derive(Clone, PartialEq, Eq, Hash)]
pub enum Valuation {
    Divisorial {
        vertex: String,
        scale: Rational,
    },
    /// Weights `r` on `E_u` and `s` on `E_v` at the `index`-th intersection
    /// point of the two primes.
    QuasiMonomial {
        u: String,
        v: String,
        index: usize,
        r: Rational,
        s: Rational,
    },
    Curve {
        branch: BranchSpec,
        scale: Rational,
    },
}

impl Valuation {
    pub fn div(vertex: impl Into<String>) -> Self {
        Valuation::Divisorial { vertex: vertex.into(), scale: Rational::one() }
    }

    pub fn qm(u: impl Into<String>, v: impl Into<String>, r: Rational, s: Rational) -> Self {
        Valuation::QuasiMonomial { u: u.into(), v: v.into(), index: 0, r, s }
    }

    pub fn curve(branch: BranchSpec) -> Self {
        Valuation::Curve { branch, scale: Rational::one() }
    }

    /// The same valuation multiplied by `c`.
    pub fn scaled(&self, c: &Rational) -> Self {
        match self {
            Valuation::Divisorial { vertex, scale } => {
                Valuation::Divisorial { vertex: vertex.clone(), scale: scale * c }
            }
            Valuation::QuasiMonomial { u, v, index, r, s } => {
                Valuation::QuasiMonomial { u: u.clone(), v: v.clone(), index: *index, r: r * c, s: s * c }
            }
            Valuation::Curve { branch, scale } => Valuation::Curve { branch: branch.clone(), scale: scale * c },
        }
    }

    fn check_numbers(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::InvalidValuation(format!("{self}: {msg}")));
        match self {
            Valuation::Divisorial { scale, .. } | Valuation::Curve { scale, .. } if !scale.is_positive() => {
                bad("scale must be positive")
            }
            Valuation::QuasiMonomial { r, s, .. } if r.is_negative() || s.is_negative() => {
                bad("weights must be nonnegative")
            }
            Valuation::QuasiMonomial { r, s, .. } if r.is_zero() && s.is_zero() => bad("weights are both zero"),
            Valuation::QuasiMonomial { u, v, .. } if u == v => bad("edge joins a vertex to itself"),
            _ => Ok(()),
        }
    }

    /// Checks the data against a model.
    pub fn check(&self, g: &DualGraph) -> Result<()> {
        self.check_numbers()?;
        match self {
            Valuation::Divisorial { vertex, .. } => g.index_of(vertex).map(|_| ()),
            Valuation::QuasiMonomial { u, v, index, .. } => {
                let (a, b) = (g.index_of(u)?, g.index_of(v)?);
                if g.edge_multiplicity(a, b) <= *index {
                    return Err(Error::NoSuchEdge(u.clone(), v.clone()));
                }
                Ok(())
            }
            Valuation::Curve { branch, .. } => {
                for id in branch.support() {
                    g.index_of(id)?;
                }
                Ok(())
            }
        }
    }

    /// Normal form on `g`: quasi-monomial valuations with a zero weight
    /// become divisorial, and edges are oriented by declared vertex order.
    pub fn canonical(&self, g: &DualGraph) -> Result<Valuation> {
        self.check(g)?;
        Ok(match self {
            Valuation::QuasiMonomial { u, s, r, .. } if s.is_zero() => {
                Valuation::Divisorial { vertex: u.clone(), scale: r.clone() }
            }
            Valuation::QuasiMonomial { v, r, s, .. } if r.is_zero() => {
                Valuation::Divisorial { vertex: v.clone(), scale: s.clone() }
            }
            Valuation::QuasiMonomial { u, v, index, r, s } if g.index_of(u)? > g.index_of(v)? => {
                Valuation::QuasiMonomial { u: v.clone(), v: u.clone(), index: *index, r: s.clone(), s: r.clone() }
            }
            other => other.clone(),
        })
    }

    /// `Z = Σ c_i Ě_i` as a list of `(vertex index, c_i)`.
    fn dual_terms(&self, g: &DualGraph) -> Result<Vec<(usize, Rational)>> {
        self.check(g)?;
        Ok(match self {
            Valuation::Divisorial { vertex, scale } => vec![(g.index_of(vertex)?, scale.clone())],
            Valuation::QuasiMonomial { u, v, r, s, .. } => {
                vec![(g.index_of(u)?, r.clone()), (g.index_of(v)?, s.clone())]
            }
            Valuation::Curve { branch, scale } => branch
                .iter()
                .map(|(id, k)| Ok((g.index_of(id)?, scale * Rational::from_integer(k as i64))))
                .collect::<Result<_>>()?,
        })
    }

    fn is_curve(&self) -> bool {
        matches!(self, Valuation::Curve { .. })
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Divisorial { vertex, scale } => {
                write!(f, "div({vertex})")?;
                if !scale.is_one() {
                    write!(f, "*{scale}")?;
                }
                Ok(())
            }
            Valuation::QuasiMonomial { u, v, index, r, s } => {
                if *index == 0 {
                    write!(f, "qm({u},{v};{r},{s})")
                } else {
                    write!(f, "qm({u},{v},{index};{r},{s})")
                }
            }
            Valuation::Curve { branch, scale } => {
                let parts: Vec<String> = branch.iter().map(|(id, k)| format!("{id}:{k}")).collect();
                write!(f, "curve({})", parts.join(","))?;
                if !scale.is_one() {
                    write!(f, "*{scale}")?;
                }
                Ok(())
            }
        }
    }
}

impl fmt::Debug for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

fn invalid(text: &str, why: &str) -> Error {
    Error::InvalidValuation(format!("{text:?}: {why}"))
}

fn parse_rational(text: &str, field: &str) -> Result<Rational> {
    field.trim().parse().map_err(|_| invalid(text, &format!("{field:?} is not a rational number")))
}

fn parse_id(text: &str, field: &str) -> Result<String> {
    let id = field.trim();
    if id.is_empty() {
        return Err(invalid(text, "empty vertex id"));
    }
    Ok(id.to_owned())
}

impl FromStr for Valuation {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let t = text.trim();
        let open = t.find('(').ok_or_else(|| invalid(text, "expected kind(...)"))?;
        let close = t.rfind(')').ok_or_else(|| invalid(text, "missing ')'"))?;
        if close < open {
            return Err(invalid(text, "misplaced parentheses"));
        }
        let kind = t[..open].trim();
        let inner = &t[open + 1..close];
        let tail = t[close + 1..].trim();
        let scale = match tail.strip_prefix('*') {
            Some(c) => Some(parse_rational(text, c)?),
            None if tail.is_empty() => None,
            None => return Err(invalid(text, "unexpected text after ')'")),
        };
        let v = match kind {
            "div" => {
                Valuation::Divisorial { vertex: parse_id(text, inner)?, scale: scale.unwrap_or_else(Rational::one) }
            }
            "qm" => {
                if scale.is_some() {
                    return Err(invalid(text, "scale a quasi-monomial valuation through its weights"));
                }
                let (edge, weights) = inner.split_once(';').ok_or_else(|| invalid(text, "expected ';'"))?;
                let edge: Vec<&str> = edge.split(',').collect();
                let (u, v, index) = match edge.as_slice() {
                    [u, v] => (parse_id(text, u)?, parse_id(text, v)?, 0),
                    [u, v, i] => (
                        parse_id(text, u)?,
                        parse_id(text, v)?,
                        i.trim().parse().map_err(|_| invalid(text, "bad edge index"))?,
                    ),
                    _ => return Err(invalid(text, "expected two vertex ids")),
                };
                let (r, s) = weights.split_once(',').ok_or_else(|| invalid(text, "expected two weights"))?;
                Valuation::QuasiMonomial { u, v, index, r: parse_rational(text, r)?, s: parse_rational(text, s)? }
            }
            "curve" => {
                let mut entries = Vec::new();
                for part in inner.split(',') {
                    let (id, k) = part.split_once(':').ok_or_else(|| invalid(text, "expected id:k"))?;
                    let k: u64 = k.trim().parse().map_err(|_| invalid(text, "bad intersection number"))?;
                    entries.push((parse_id(text, id)?, k));
                }
                let branch = BranchSpec::new(entries).map_err(|_| invalid(text, "empty branch"))?;
                Valuation::Curve { branch, scale: scale.unwrap_or_else(Rational::one) }
            }
            _ => return Err(invalid(text, "unknown kind")),
        };
        v.check_numbers()?;
        Ok(v)
    }
}

impl Serialize for Valuation {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Valuation {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// A bracket value: a positive rational, or `+∞` for the self-bracket of a
/// curve semivaluation.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Bracket {
    Finite(Rational),
    Infinite,
}

impl Bracket {
    pub fn finite(&self) -> Option<&Rational> {
        match self {
            Bracket::Finite(r) => Some(r),
            Bracket::Infinite => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Bracket::Infinite)
    }

    fn times(&self, other: &Bracket) -> Bracket {
        match (self, other) {
            (Bracket::Finite(a), Bracket::Finite(b)) => Bracket::Finite(a * b),
            _ => Bracket::Infinite,
        }
    }
}

impl fmt::Display for Bracket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bracket::Finite(r) => write!(f, "{r}"),
            Bracket::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Bracket {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "inf" {
            Ok(Bracket::Infinite)
        } else {
            s.parse().map(Bracket::Finite)
        }
    }
}

impl Serialize for Bracket {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Bracket {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        String::deserialize(d)?.parse().map_err(D::Error::custom)
    }
}

/// Dual b-divisor of `v` on the model `g`.
pub fn z_divisor(g: &DualGraph, v: &Valuation) -> Result<ExcDivisor> {
    let basis = dual_basis(g)?;
    let mut z = ExcDivisor::zero(g.len());
    for (i, c) in v.dual_terms(g)? {
        z.add_scaled(&basis[i], &c);
    }
    Ok(z)
}

/// `-Z(v1)·Z(v2)` on the model of `t`, valid when the centers differ.
fn pairing(g: &DualGraph, t: &BracketTable, v1: &Valuation, v2: &Valuation) -> Result<Rational> {
    let a = v1.dual_terms(g)?;
    let b = v2.dual_terms(g)?;
    Ok(a.iter().flat_map(|(i, x)| b.iter().map(move |(j, y)| x * y * t.at(*i, *j))).sum())
}

/// The two valuations are positive multiples of each other.
pub fn same_valuation(g: &DualGraph, v1: &Valuation, v2: &Valuation) -> Result<bool> {
    Ok(match (v1.canonical(g)?, v2.canonical(g)?) {
        (Valuation::Divisorial { vertex: a, .. }, Valuation::Divisorial { vertex: b, .. }) => a == b,
        (
            Valuation::QuasiMonomial { u: u1, v: v1, index: i1, r: r1, s: s1 },
            Valuation::QuasiMonomial { u: u2, v: v2, index: i2, r: r2, s: s2 },
        ) => (u1, v1, i1) == (u2, v2, i2) && &r1 * &s2 == &r2 * &s1,
        (Valuation::Curve { branch: a, .. }, Valuation::Curve { branch: b, .. }) => a == b,
        _ => false,
    })
}

fn same_point(a: &Valuation, b: &Valuation) -> bool {
    matches!(
        (a, b),
        (
            Valuation::QuasiMonomial { u: u1, v: v1, index: i1, .. },
            Valuation::QuasiMonomial { u: u2, v: v2, index: i2, .. },
        ) if (u1, v1, i1) == (u2, v2, i2)
    )
}

/// One satellite blow-up at the center of a quasi-monomial valuation; the
/// valuation is rewritten on the new model.
fn descend_step(g: &DualGraph, v: &Valuation, w: &str) -> Result<(DualGraph, Valuation)> {
    let Valuation::QuasiMonomial { u, v: x, index, r, s } = v else {
        return Err(Error::InternalVerificationFailed("descent on a non quasi-monomial valuation".into()));
    };
    let spec = BlowupSpec::Satellite { u: u.clone(), v: x.clone(), index: *index };
    let h = g.blowup(&spec, w)?;
    Ok((h, rewrite(u, x, w, r, s)))
}

fn rewrite(u: &str, x: &str, w: &str, r: &Rational, s: &Rational) -> Valuation {
    use std::cmp::Ordering::*;
    match r.cmp(s) {
        Greater => Valuation::QuasiMonomial { u: u.into(), v: w.into(), index: 0, r: r - s, s: s.clone() },
        Less => Valuation::QuasiMonomial { u: w.into(), v: x.into(), index: 0, r: r.clone(), s: s - r },
        Equal => Valuation::Divisorial { vertex: w.into(), scale: r.clone() },
    }
}

/// Blows up until the two valuations no longer share a closed-point center.
/// Returns the final model and both valuations rewritten on it.
pub fn separate_centers(g: &DualGraph, v1: &Valuation, v2: &Valuation) -> Result<(DualGraph, Valuation, Valuation)> {
    let mut model = g.clone();
    let mut a = v1.canonical(g)?;
    let mut b = v2.canonical(g)?;
    while same_point(&a, &b) {
        let w = model.fresh_id("~w");
        let (h, a2) = descend_step(&model, &a, &w)?;
        let Valuation::QuasiMonomial { u, v: x, r, s, .. } = &b else { unreachable!() };
        let b2 = rewrite(u, x, &w, r, s);
        model = h;
        a = a2.canonical(&model)?;
        b = b2.canonical(&model)?;
    }
    Ok((model, a, b))
}

/// Bracket `<v1, v2> = -Z(v1)·Z(v2)` computed on a model where the centers
/// differ. Distinct curve semivaluations are assumed to have disjoint
/// strict transforms.
pub fn val_bracket(g: &DualGraph, v1: &Valuation, v2: &Valuation) -> Result<Bracket> {
    let t = brackets(g)?;
    val_bracket_with(g, &t, v1, v2)
}

/// As [`val_bracket`], reusing the bracket table of `g`.
pub fn val_bracket_with(g: &DualGraph, t: &BracketTable, v1: &Valuation, v2: &Valuation) -> Result<Bracket> {
    let a = v1.canonical(g)?;
    let b = v2.canonical(g)?;
    if a.is_curve() && b.is_curve() && same_valuation(g, &a, &b)? {
        return Ok(Bracket::Infinite);
    }
    if same_point(&a, &b) {
        let (model, a, b) = separate_centers(g, &a, &b)?;
        let t2 = brackets(&model)?;
        return pairing(&model, &t2, &a, &b).map(Bracket::Finite);
    }
    pairing(g, t, &a, &b).map(Bracket::Finite)
}

/// Skewness `α(v) = <v, v>`.
pub fn skewness(g: &DualGraph, v: &Valuation) -> Result<Bracket> {
    val_bracket(g, v, v)
}

/// `u_λ(v1, v2) = <λ,v1><λ,v2>/<v1,v2>`, and `0` when `v1` and `v2` are the
/// same valuation up to scale.
pub fn u_lambda(g: &DualGraph, lambda: &Valuation, v1: &Valuation, v2: &Valuation) -> Result<Bracket> {
    let t = brackets(g)?;
    u_lambda_with(g, &t, lambda, v1, v2)
}

pub fn u_lambda_with(
    g: &DualGraph,
    t: &BracketTable,
    lambda: &Valuation,
    v1: &Valuation,
    v2: &Valuation,
) -> Result<Bracket> {
    if same_valuation(g, v1, v2)? {
        v1.check(g)?;
        return Ok(Bracket::Finite(Rational::zero()));
    }
    let l1 = val_bracket_with(g, t, lambda, v1)?;
    let l2 = val_bracket_with(g, t, lambda, v2)?;
    let den = val_bracket_with(g, t, v1, v2)?;
    match (l1.times(&l2), den) {
        (Bracket::Finite(num), Bracket::Finite(den)) => Ok(Bracket::Finite(num / den)),
        _ => Ok(Bracket::Infinite),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValFourPointReport {
    pub valuations: [Valuation; 4],
    pub scale: Rational,
    pub i1: Bracket,
    pub i2: Bracket,
    pub i3: Bracket,
    /// Two of the three values coincide and the third is at least as large.
    pub verdict: bool,
    pub degenerate: bool,
}

/// Scaled bracket products `I_1 = <a,b><c,d>`, `I_2 = <a,c><b,d>`,
/// `I_3 = <a,d><b,c>` of a quadruple and the 4-point verdict.
pub fn val_fourpoint(g: &DualGraph, vals: &[Valuation; 4], scale: &Rational) -> Result<ValFourPointReport> {
    if !scale.is_positive() {
        return Err(Error::InvalidValuation(format!("scale {scale} must be positive")));
    }
    for i in 0..4 {
        for j in i + 1..4 {
            if same_valuation(g, &vals[i], &vals[j])? {
                return Err(Error::DuplicateValuation(i, j));
            }
        }
    }
    let t = brackets(g)?;
    let br = |i: usize, j: usize| val_bracket_with(g, &t, &vals[i], &vals[j]);
    let c = Bracket::Finite(scale.clone());
    let i1 = c.times(&br(0, 1)?.times(&br(2, 3)?));
    let i2 = c.times(&br(0, 2)?.times(&br(1, 3)?));
    let i3 = c.times(&br(0, 3)?.times(&br(1, 2)?));
    let degenerate = i1.is_infinite() || i2.is_infinite() || i3.is_infinite();
    let verdict = !degenerate && min_attained_twice(&i1, &i2, &i3);
    Ok(ValFourPointReport { valuations: vals.clone(), scale: scale.clone(), i1, i2, i3, verdict, degenerate })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NoudWitness {
    /// Model on which the cycle has length at least 4.
    pub model: GraphFile,
    pub cycle: Vec<String>,
    pub a: String,
    pub m: String,
    pub p: String,
    pub l: String,
    pub s: u64,
    pub t: u64,
    pub branch_a: BranchSpec,
    pub branch_b: BranchSpec,
    pub branch_cm: BranchSpec,
    pub branch_cp: BranchSpec,
    /// `(A·B)(C_m·C_p)`, `(C_m·A)(C_p·B)`, `(C_m·B)(C_p·A)`.
    pub products: [Rational; 3],
}

/// Longest fundamental cycle of a depth-first spanning tree, as a vertex
/// sequence closed by the edge from the last vertex back to the first,
/// together with the index of that closing edge.
fn fundamental_cycle(g: &DualGraph) -> Option<(Vec<usize>, usize)> {
    let adj = g.adjacency();
    let n = g.len();
    let mut parent = vec![usize::MAX; n];
    let mut parent_edge = vec![usize::MAX; n];
    let mut depth = vec![usize::MAX; n];
    let mut tree_edge = vec![false; g.edges().len()];
    depth[0] = 0;
    let mut stack = vec![(0usize, 0usize)];
    while let Some((u, next)) = stack.pop() {
        if next < adj[u].len() {
            stack.push((u, next + 1));
            let (v, e) = adj[u][next];
            if depth[v] == usize::MAX {
                depth[v] = depth[u] + 1;
                parent[v] = u;
                parent_edge[v] = e;
                tree_edge[e] = true;
                stack.push((v, 0));
            }
        }
    }
    let mut best: Option<(Vec<usize>, usize)> = None;
    for (e, &(a, b)) in g.edges().iter().enumerate() {
        if tree_edge[e] {
            continue;
        }
        // In a depth-first tree every non-tree edge joins an ancestor to a
        // descendant.
        let (top, bottom) = if depth[a] <= depth[b] { (a, b) } else { (b, a) };
        let mut path = vec![bottom];
        let mut cur = bottom;
        while cur != top {
            cur = parent[cur];
            path.push(cur);
        }
        path.reverse();
        if best.as_ref().is_none_or(|(c, _)| path.len() > c.len()) {
            best = Some((path, e));
        }
    }
    best
}

fn occurrence(g: &DualGraph, e: usize) -> usize {
    let (a, b) = g.edges()[e];
    g.edges()[..e].iter().filter(|&&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)).count()
}

/// Rotates the cycle to start at `start` and orients it so that the second
/// vertex precedes the last one in declared order.
fn rotate(cycle: &[usize], start: usize) -> Vec<usize> {
    let pos = cycle.iter().position(|&c| c == start).expect("start lies on the cycle");
    let mut c: Vec<usize> = cycle[pos..].iter().chain(&cycle[..pos]).copied().collect();
    if c[1] > c[c.len() - 1] {
        c[1..].reverse();
    }
    c
}

fn nearest_on_cycle(g: &DualGraph, from: usize, cycle: &[usize]) -> usize {
    let adj = g.adjacency();
    let mut dist = vec![usize::MAX; g.len()];
    dist[from] = 0;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                queue.push_back(v);
            }
        }
    }
    *cycle.iter().min_by_key(|&&c| (dist[c], c)).expect("cycle is nonempty")
}

/// Smallest integer `x >= 1` with `coef·x + constant > 0`, for `coef > 0`.
fn least_positive_solution(coef: &Rational, constant: &Rational) -> Result<u64> {
    if !coef.is_positive() {
        return Err(Error::InternalVerificationFailed(format!("leading coefficient {coef} is not positive")));
    }
    let bound: BigInt = (-constant / coef).floor() + 1;
    let x: i64 = bound.try_into().map_err(|_| Error::InternalVerificationFailed("solution out of range".into()))?;
    Ok(x.max(1) as u64)
}

/// Branches `A, B = L, C_m, C_p` violating the ultrametric inequality for
/// `u_L`, built around a cycle of the dual graph of length at least 4.
pub fn noud_counterexample(g: &DualGraph, l: &str) -> Result<NoudWitness> {
    let mut model = g.clone();
    let li = model.index_of(l)?;
    let (mut cycle, close) = fundamental_cycle(&model).ok_or(Error::GraphIsArborescent)?;
    let mut closing = (cycle[cycle.len() - 1], cycle[0], occurrence(&model, close));
    while cycle.len() < 4 {
        let (x, y, idx) = closing;
        let w = model.fresh_id("~c");
        let spec = BlowupSpec::Satellite { u: model.id(x).to_owned(), v: model.id(y).to_owned(), index: idx };
        model = model.blowup(&spec, &w)?;
        let wi = model.index_of(&w)?;
        cycle.push(wi);
        closing = (wi, y, 0);
    }
    let start = if cycle.contains(&li) { li } else { nearest_on_cycle(&model, li, &cycle) };
    let c = rotate(&cycle, start);
    let (m, a, p) = (c[1], c[2], c[3]);

    let t = brackets(&model)?;
    let b = li;
    let br = |x: usize, y: usize| t.at(x, y).clone();
    let coef_s = br(a, a) * br(b, p) - br(a, b) * br(a, p);
    let const_s = br(a, m) * br(b, p) - br(a, b) * br(m, p);
    let s = least_positive_solution(&coef_s, &const_s)?;
    let coef_t = br(a, a) * br(b, m) - br(a, b) * br(a, m);
    let const_t = -(&coef_s * Rational::from_integer(s as i64)) + br(a, p) * br(b, m) - br(a, m) * br(b, p);
    let tt = least_positive_solution(&coef_t, &const_t)?;

    let id = |i: usize| model.id(i).to_owned();
    let branch_a = BranchSpec::unit(id(a));
    let branch_b = BranchSpec::unit(id(b));
    let branch_cm = BranchSpec::new([(id(m), 1), (id(a), s)])?;
    let branch_cp = BranchSpec::new([(id(p), 1), (id(a), tt)])?;
    let x = |u: &BranchSpec, v: &BranchSpec| t.branch_intersection(u, v);
    let products = [
        x(&branch_a, &branch_b)? * x(&branch_cm, &branch_cp)?,
        x(&branch_cm, &branch_a)? * x(&branch_cp, &branch_b)?,
        x(&branch_cm, &branch_b)? * x(&branch_cp, &branch_a)?,
    ];
    if !(products[0] < products[1] && products[1] < products[2]) {
        return Err(Error::InternalVerificationFailed(format!(
            "products {}, {}, {} are not strictly increasing",
            products[0], products[1], products[2]
        )));
    }
    let named = vec![
        ("A".to_owned(), branch_a.clone()),
        ("Cm".to_owned(), branch_cm.clone()),
        ("Cp".to_owned(), branch_cp.clone()),
    ];
    if is_ultrametric(&u_l_branches(&t, &branch_b, &named)?).ok {
        return Err(Error::InternalVerificationFailed("witness does not break the ultrametric inequality".into()));
    }
    Ok(NoudWitness {
        model: model.to_file(),
        cycle: c.iter().map(|&i| id(i)).collect(),
        a: id(a),
        m: id(m),
        p: id(p),
        l: l.to_owned(),
        s,
        t: tt,
        branch_a,
        branch_b,
        branch_cm,
        branch_cp,
        products,
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct UdbvReport {
    pub ok: bool,
    pub offenders: Vec<(String, usize)>,
    /// Node of the auxiliary graph standing for each member.
    pub members: Vec<String>,
    /// Some other attachment of curve members changes the verdict.
    pub ambiguous: bool,
    pub graph: GraphFile,
}

const MAX_ATTACHMENTS: usize = 64;

/// Valency hypothesis for a family of valuations: the dual graph with edges
/// subdivided at quasi-monomial members and pendant vertices for curve
/// members, then the brick hull-valency test on the member nodes.
pub fn udbv_hypothesis_check(g: &DualGraph, family: &[Valuation]) -> Result<UdbvReport> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let canon: Vec<Valuation> = family.iter().map(|v| v.canonical(g)).collect::<Result<_>>()?;
    for i in 0..canon.len() {
        for j in i + 1..canon.len() {
            if same_valuation(g, &canon[i], &canon[j])? {
                return Err(Error::DuplicateValuation(i, j));
            }
        }
    }
    let mut base = g.to_generic();
    let mut members: Vec<Option<String>> = vec![None; canon.len()];
    let mut fresh = 0usize;
    let mut next_id = |base: &crate::dualgraph::GenericGraph, prefix: &str| loop {
        fresh += 1;
        let id = format!("{prefix}{fresh}");
        if base.index_of(&id).is_err() {
            break id;
        }
    };

    // Quasi-monomial members, grouped by edge occurrence and ordered along it.
    let mut on_edge: BTreeMap<(usize, usize, usize), Vec<(Rational, usize)>> = BTreeMap::new();
    for (k, v) in canon.iter().enumerate() {
        match v {
            Valuation::Divisorial { vertex, .. } => members[k] = Some(vertex.clone()),
            Valuation::QuasiMonomial { u, v: x, index, r, s } => {
                let key = (g.index_of(u)?, g.index_of(x)?, *index);
                on_edge.entry(key).or_default().push((s / (r + s), k));
            }
            Valuation::Curve { .. } => {}
        }
    }
    for ((u, x, index), mut points) in on_edge {
        points.sort();
        let mut from = u;
        let mut nth = index;
        for (_, k) in points {
            let id = next_id(&base, "q#");
            let w = base.subdivide(from, x, nth, id.clone())?;
            members[k] = Some(id);
            from = w;
            nth = 0;
        }
    }

    let curves: Vec<(usize, Vec<usize>)> = canon
        .iter()
        .enumerate()
        .filter_map(|(k, v)| match v {
            Valuation::Curve { branch, .. } => {
                Some(branch.support().map(|id| g.index_of(id)).collect::<Result<Vec<_>>>().map(|s| (k, s)))
            }
            _ => None,
        })
        .collect::<Result<_>>()?;
    let curve_ids: Vec<String> = curves.iter().map(|_| next_id(&base, "c#")).collect();
    for (c, (k, _)) in curves.iter().enumerate() {
        members[*k] = Some(curve_ids[c].clone());
    }
    let members: Vec<String> = members.into_iter().map(|m| m.expect("every member placed")).collect();
    let member_refs: Vec<&str> = members.iter().map(String::as_str).collect();

    let mut choice = vec![0usize; curves.len()];
    let mut first: Option<(HullValencyReport, GraphFile)> = None;
    let mut ambiguous = false;
    for _ in 0..MAX_ATTACHMENTS {
        let mut graph = base.clone();
        for (c, (_, support)) in curves.iter().enumerate() {
            let leaf = graph.add_vertex(curve_ids[c].clone())?;
            graph.add_edge(support[choice[c]], leaf);
        }
        let report = hull_valency_report(&graph, &member_refs)?;
        match &first {
            None => first = Some((report, graph.to_file())),
            Some((f, _)) if f.ok != report.ok => ambiguous = true,
            _ => {}
        }
        // Next attachment choice, odometer style.
        let mut pos = 0;
        loop {
            if pos == curves.len() {
                break;
            }
            choice[pos] += 1;
            if choice[pos] < curves[pos].1.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
        if pos == curves.len() {
            break;
        }
    }
    let (report, graph) = first.expect("at least one attachment");
    Ok(UdbvReport { ok: report.ok, offenders: report.offenders, members, ambiguous, graph })
}

//! Exact intersection theory on the exceptional lattice of a dual graph.
//!
//! The intersection matrix `M` is inverted once by fraction-free
//! Gauss-Jordan elimination. Column `u` of `M⁻¹` is the dual divisor `Ě_u`
//! and the bracket table is `-M⁻¹`.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use indexmap::IndexMap;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dualgraph::DualGraph;
use crate::error::{Error, Result};
use crate::rational::Rational;

/// Sylvester's criterion on `-m`: every leading principal minor of the
/// negated matrix must be positive. Bareiss elimination without pivoting
/// produces exactly those minors as successive pivots.
pub fn check_negative_definite(m: &[Vec<i64>]) -> Result<()> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m.iter().map(|row| row.iter().map(|&x| BigInt::from(-x)).collect()).collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        if !a[k][k].is_positive() {
            return Err(Error::NotNegativeDefinite { minor_index: k + 1 });
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = &a[k][k] * &a[i][j] - &a[i][k] * &a[k][j];
                a[i][j] = num / &prev;
            }
        }
        prev = a[k][k].clone();
    }
    Ok(())
}

/// Exact inverse of an integer matrix by fraction-free Gauss-Jordan
/// elimination on `[m | I]`.
pub fn invert(m: &[Vec<i64>]) -> Result<Vec<Vec<Rational>>> {
    let n = m.len();
    let mut a: Vec<Vec<BigInt>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r: Vec<BigInt> = row.iter().map(|&x| BigInt::from(x)).collect();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let mut prev = BigInt::one();
    for k in 0..n {
        let p = (k..n).find(|&r| !a[r][k].is_zero()).ok_or(Error::SingularMatrix)?;
        a.swap(k, p);
        let pivot_row = a[k].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == k {
                continue;
            }
            let factor = row[k].clone();
            for j in 0..2 * n {
                let num = &pivot_row[k] * &row[j] - &factor * &pivot_row[j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "fraction-free step must divide exactly");
                row[j] = q;
            }
        }
        prev = pivot_row[k].clone();
    }
    Ok((0..n).map(|i| (0..n).map(|j| Rational::from_big(a[i][n + j].clone(), a[i][i].clone())).collect()).collect())
}

/// Exceptional divisor as coefficients on `(E_u)` in declared vertex order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExcDivisor {
    coeffs: Vec<Rational>,
}

impl ExcDivisor {
    pub fn zero(n: usize) -> Self {
        ExcDivisor { coeffs: vec![Rational::zero(); n] }
    }

    pub fn from_coeffs(coeffs: Vec<Rational>) -> Self {
        ExcDivisor { coeffs }
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> &Rational {
        &self.coeffs[i]
    }

    pub fn scaled(&self, c: &Rational) -> Self {
        ExcDivisor { coeffs: self.coeffs.iter().map(|x| x * c).collect() }
    }

    pub fn add_scaled(&mut self, other: &ExcDivisor, c: &Rational) {
        for (x, y) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *x += y * c;
        }
    }

    /// Intersection number with another divisor on the same graph.
    pub fn intersect(&self, other: &ExcDivisor, g: &DualGraph) -> Rational {
        let mut total = Rational::zero();
        for (i, v) in g.vertices().iter().enumerate() {
            total += &self.coeffs[i] * &other.coeffs[i] * Rational::from_integer(v.self_int);
        }
        for &(a, b) in g.edges() {
            total += &self.coeffs[a] * &other.coeffs[b];
            total += &self.coeffs[b] * &other.coeffs[a];
        }
        total
    }

    /// `self · E_i` for each vertex `i`.
    pub fn intersect_primes(&self, g: &DualGraph) -> Vec<Rational> {
        let m = g.intersection_matrix();
        (0..g.len())
            .map(|i| self.coeffs.iter().zip(&m).map(|(c, row)| c * Rational::from_integer(row[i])).sum())
            .collect()
    }

    pub fn to_map(&self, g: &DualGraph) -> IndexMap<String, Rational> {
        g.ids().map(str::to_owned).zip(self.coeffs.iter().cloned()).collect()
    }
}

/// Dual divisors `Ě_u`, indexed like the vertices of `g`.
pub fn dual_basis(g: &DualGraph) -> Result<Vec<ExcDivisor>> {
    let inv = invert(&g.intersection_matrix())?;
    let n = g.len();
    let basis: Vec<ExcDivisor> =
        (0..n).map(|u| ExcDivisor { coeffs: (0..n).map(|v| inv[v][u].clone()).collect() }).collect();
    for (u, d) in basis.iter().enumerate() {
        if d.coeffs.iter().any(|c| !c.is_negative()) {
            return Err(Error::InternalVerificationFailed(format!(
                "dual divisor of {} is not anti-effective with full support",
                g.id(u)
            )));
        }
    }
    Ok(basis)
}

/// Symmetric table of brackets `⟨u,v⟩ = -Ě_u·Ě_v`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BracketTable {
    ids: Vec<String>,
    index: HashMap<String, usize>,
    entries: Vec<Vec<Rational>>,
}

impl BracketTable {
    fn from_entries(ids: Vec<String>, entries: Vec<Vec<Rational>>) -> Result<Self> {
        let index = ids.iter().enumerate().map(|(i, id)| (id.clone(), i)).collect();
        let table = BracketTable { ids, index, entries };
        table.check_invariants()?;
        Ok(table)
    }

    /// Positivity, symmetry and strict Cauchy-Schwarz off the diagonal.
    fn check_invariants(&self) -> Result<()> {
        let n = self.ids.len();
        for i in 0..n {
            for j in 0..n {
                let e = &self.entries[i][j];
                if !e.is_positive() || *e != self.entries[j][i] {
                    return Err(Error::InternalVerificationFailed(format!(
                        "bracket ({}, {}) = {e} violates positivity or symmetry",
                        self.ids[i], self.ids[j]
                    )));
                }
                if i != j && e * e >= &self.entries[i][i] * &self.entries[j][j] {
                    return Err(Error::InternalVerificationFailed(format!(
                        "bracket ({}, {}) violates strict Cauchy-Schwarz",
                        self.ids[i], self.ids[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    /// Bracket by vertex index.
    pub fn at(&self, i: usize, j: usize) -> &Rational {
        &self.entries[i][j]
    }

    pub fn get(&self, u: &str, v: &str) -> Result<&Rational> {
        Ok(self.at(self.index_of(u)?, self.index_of(v)?))
    }

    /// `q(u,v) = ⟨u,v⟩² / (⟨u,u⟩⟨v,v⟩)`, the exponential of minus the
    /// angular distance.
    pub fn q_at(&self, i: usize, j: usize) -> Rational {
        let b = self.at(i, j);
        b * b / (self.at(i, i) * self.at(j, j))
    }

    pub fn q_value(&self, u: &str, v: &str) -> Result<Rational> {
        Ok(self.q_at(self.index_of(u)?, self.index_of(v)?))
    }

    fn branch_indices(&self, a: &BranchSpec) -> Result<Vec<(usize, u64)>> {
        a.iter().map(|(id, k)| Ok((self.index_of(id)?, k))).collect()
    }

    /// `Σ k_A(u) k_B(v) ⟨u,v⟩`, the intersection number of two branches with
    /// disjoint strict transforms. Disjointness is the caller's assertion.
    pub fn branch_intersection(&self, a: &BranchSpec, b: &BranchSpec) -> Result<Rational> {
        let ia = self.branch_indices(a)?;
        let ib = self.branch_indices(b)?;
        let mut total = Rational::zero();
        for &(u, ku) in &ia {
            for &(v, kv) in &ib {
                total += self.at(u, v) * Rational::from_integer((ku * kv) as i64);
            }
        }
        Ok(total)
    }

    /// Bilinear extension of [`Self::branch_intersection`] to divisors
    /// supported on branches.
    pub fn divisor_intersection(
        &self,
        lhs: &[(Rational, BranchSpec)],
        rhs: &[(Rational, BranchSpec)],
    ) -> Result<Rational> {
        let mut total = Rational::zero();
        for (ca, a) in lhs {
            for (cb, b) in rhs {
                total += ca * cb * self.branch_intersection(a, b)?;
            }
        }
        Ok(total)
    }

    /// `exct(A) = -Σ k_A(u) Ě_u`; coefficient on `E_v` is `Σ k_A(u) ⟨u,v⟩`.
    pub fn exc_transform_coeffs(&self, a: &BranchSpec) -> Result<ExcDivisor> {
        let ia = self.branch_indices(a)?;
        let coeffs = (0..self.len())
            .map(|v| ia.iter().map(|&(u, k)| self.at(u, v) * Rational::from_integer(k as i64)).sum())
            .collect();
        Ok(ExcDivisor { coeffs })
    }

    pub fn to_map(&self) -> IndexMap<String, IndexMap<String, Rational>> {
        self.ids
            .iter()
            .enumerate()
            .map(|(i, u)| {
                let row = self.ids.iter().enumerate().map(|(j, v)| (v.clone(), self.entries[i][j].clone())).collect();
                (u.clone(), row)
            })
            .collect()
    }
}

impl Serialize for BracketTable {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_map().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BracketTable {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = IndexMap::<String, IndexMap<String, Rational>>::deserialize(deserializer)?;
        let ids: Vec<String> = map.keys().cloned().collect();
        let entries = map
            .values()
            .map(|row| {
                ids.iter()
                    .map(|id| row.get(id).cloned().ok_or_else(|| D::Error::custom(format!("missing entry {id}"))))
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()?;
        BracketTable::from_entries(ids, entries).map_err(D::Error::custom)
    }
}

/// Brackets of all pairs of primes: `-M⁻¹` entrywise.
pub fn brackets(g: &DualGraph) -> Result<BracketTable> {
    let inv = invert(&g.intersection_matrix())?;
    let entries = inv.into_iter().map(|row| row.into_iter().map(|x| -x).collect()).collect();
    BracketTable::from_entries(g.ids().map(str::to_owned).collect(), entries)
}

/// Strict-transform intersection numbers `k_u` of a branch with the primes.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BranchSpec {
    entries: BTreeMap<String, u64>,
}

impl BranchSpec {
    pub fn new<S: Into<String>>(entries: impl IntoIterator<Item = (S, u64)>) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (id, k) in entries {
            *map.entry(id.into()).or_insert(0) += k;
        }
        map.retain(|_, k| *k > 0);
        if map.is_empty() {
            return Err(Error::EmptyBranch);
        }
        Ok(BranchSpec { entries: map })
    }

    /// Branch whose representing divisor is `E_id`.
    pub fn unit(id: impl Into<String>) -> Self {
        BranchSpec { entries: BTreeMap::from([(id.into(), 1)]) }
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.entries.iter().map(|(id, &k)| (id.as_str(), k))
    }

    pub fn get(&self, id: &str) -> u64 {
        self.entries.get(id).copied().unwrap_or(0)
    }

    /// Vertex of the representing divisor when the branch is a single unit
    /// entry.
    pub fn representing_vertex(&self) -> Option<&str> {
        match self.entries.iter().next() {
            Some((id, 1)) if self.entries.len() == 1 => Some(id),
            _ => None,
        }
    }

    /// Vertices with positive intersection number.
    pub fn support(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }
}

impl fmt::Display for BranchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.entries.iter().map(|(id, k)| format!("{id}:{k}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl fmt::Debug for BranchSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl Serialize for BranchSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.entries.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for BranchSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        use serde::de::Error as _;
        let map = BTreeMap::<String, u64>::deserialize(deserializer)?;
        BranchSpec::new(map).map_err(D::Error::custom)
    }
}

/// `exct(A)`, with the postcondition `(A_π + exct(A))·E_u = 0` checked
/// against the intersection matrix.
pub fn branch_exc_transform(g: &DualGraph, table: &BracketTable, a: &BranchSpec) -> Result<ExcDivisor> {
    let d = table.exc_transform_coeffs(a)?;
    for (i, x) in d.intersect_primes(g).into_iter().enumerate() {
        let strict = Rational::from_integer(a.get(g.id(i)) as i64);
        if !(strict + x).is_zero() {
            return Err(Error::InternalVerificationFailed(format!(
                "total transform of {a} is not orthogonal to {}",
                g.id(i)
            )));
        }
    }
    Ok(d)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrucialReport {
    pub lhs: Rational,
    pub rhs: Rational,
    pub equality: bool,
    pub separates: bool,
}

/// Compares `⟨u,v⟩⟨v,w⟩` with `⟨v,v⟩⟨u,w⟩`. The inequality always holds,
/// with equality exactly when `v` separates `u` from `w`.
pub fn crucial_check(t: &BracketTable, g: &DualGraph, u: &str, v: &str, w: &str) -> Result<CrucialReport> {
    let (iu, iv, iw) = (t.index_of(u)?, t.index_of(v)?, t.index_of(w)?);
    let (gu, gv, gw) = (g.index_of(u)?, g.index_of(v)?, g.index_of(w)?);
    crucial_check_idx(t, g, (iu, iv, iw), (gu, gv, gw))
}

pub(crate) fn crucial_check_idx(
    t: &BracketTable,
    g: &DualGraph,
    (u, v, w): (usize, usize, usize),
    (gu, gv, gw): (usize, usize, usize),
) -> Result<CrucialReport> {
    let lhs = t.at(u, v) * t.at(v, w);
    let rhs = t.at(v, v) * t.at(u, w);
    let separates = g.separates_idx(gv, gu, gw);
    let equality = lhs == rhs;
    if lhs > rhs || equality != separates {
        return Err(Error::InequalityViolated(format!(
            "({}, {}, {}): lhs {lhs}, rhs {rhs}, separates {separates}",
            t.ids[u], t.ids[v], t.ids[w]
        )));
    }
    Ok(CrucialReport { lhs, rhs, equality, separates })
}

/// Angle at `v` of the spherical triangle spanned by the unit vectors along
/// `Ě_u, Ě_v, Ě_w` for the negated intersection form.
pub fn spherical_angle(t: &BracketTable, u: &str, v: &str, w: &str) -> Result<f64> {
    spherical_angle_idx(t, t.index_of(u)?, t.index_of(v)?, t.index_of(w)?)
}

pub(crate) fn spherical_angle_idx(t: &BracketTable, u: usize, v: usize, w: usize) -> Result<f64> {
    let q_uv = t.q_at(u, v);
    let q_vw = t.q_at(v, w);
    let q_uw = t.q_at(u, w);
    if q_uv.is_one() || q_vw.is_one() || q_uw.is_one() {
        return Err(Error::DegenerateTriangle);
    }
    // cos of the three sides are sqrt(q); the numerator of the spherical law
    // of cosines, sqrt(q_uw) - sqrt(q_uv q_vw), is formed from the exact
    // difference to keep the separation case at exactly zero.
    let prod = &q_uv * &q_vw;
    let diff = (&q_uw - &prod).to_f64();
    let numer = diff / (q_uw.to_f64().sqrt() + prod.to_f64().sqrt());
    let sin_a = (1.0 - q_uv.to_f64()).sqrt();
    let sin_b = (1.0 - q_vw.to_f64()).sqrt();
    let cos = (numer / (sin_a * sin_b)).clamp(-1.0, 1.0);
    Ok(cos.acos())
}

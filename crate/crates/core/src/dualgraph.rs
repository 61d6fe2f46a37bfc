//! Weighted dual graphs of good resolutions and plain multigraphs.
//!
//! A [`DualGraph`] carries one vertex per exceptional prime, annotated with
//! its self-intersection, and one edge per intersection point. Parallel edges
//! are allowed, loops are not. Vertex order is the declared input order and
//! fixes the row order of every matrix built from the graph.

use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice;

/// On-disk graph description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<VertexEntry>,
    #[serde(default)]
    pub edges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    #[serde(rename = "self", default, skip_serializing_if = "Option::is_none")]
    pub self_int: Option<i64>,
}

impl GraphFile {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vertex {
    pub id: String,
    pub self_int: i64,
}

/// Validated dual graph of a good resolution.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DualGraph {
    name: Option<String>,
    vertices: Vec<Vertex>,
    edges: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

/// Model refinement by blowing up a point of the exceptional divisor.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BlowupSpec {
    /// Blow up a smooth point of one prime.
    Free { at: String },
    /// Blow up an intersection point; `index` selects among parallel edges.
    Satellite {
        u: String,
        v: String,
        #[serde(default)]
        index: usize,
    },
}

impl BlowupSpec {
    pub fn free(at: impl Into<String>) -> Self {
        BlowupSpec::Free { at: at.into() }
    }

    pub fn satellite(u: impl Into<String>, v: impl Into<String>) -> Self {
        BlowupSpec::Satellite { u: u.into(), v: v.into(), index: 0 }
    }
}

fn build_index(ids: impl Iterator<Item = String>) -> Result<HashMap<String, usize>> {
    let mut index = HashMap::new();
    for (i, id) in ids.enumerate() {
        if index.insert(id.clone(), i).is_some() {
            return Err(Error::DuplicateVertexId(id));
        }
    }
    Ok(index)
}

fn resolve_edges(index: &HashMap<String, usize>, edges: &[(String, String)]) -> Result<Vec<(usize, usize)>> {
    edges
        .iter()
        .map(|(a, b)| {
            let ia = *index.get(a).ok_or_else(|| Error::UnknownVertex(a.clone()))?;
            let ib = *index.get(b).ok_or_else(|| Error::UnknownVertex(b.clone()))?;
            Ok((ia, ib))
        })
        .collect()
}

/// Connectivity of `n` vertices under `edges`, ignoring vertex `skip`.
pub(crate) fn is_connected(n: usize, edges: &[(usize, usize)]) -> bool {
    if n == 0 {
        return true;
    }
    let adj = adjacency(n, edges);
    let mut seen = vec![false; n];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(u) = queue.pop_front() {
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Adjacency lists of `(neighbor, edge index)` in edge-list order.
pub(crate) fn adjacency(n: usize, edges: &[(usize, usize)]) -> Vec<Vec<(usize, usize)>> {
    let mut adj = vec![Vec::new(); n];
    for (e, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, e));
        if a != b {
            adj[b].push((a, e));
        }
    }
    adj
}

fn separates_idx(adj: &[Vec<(usize, usize)>], c: usize, a: usize, b: usize) -> bool {
    if c == a || c == b {
        return true;
    }
    let mut seen = vec![false; adj.len()];
    seen[c] = true;
    seen[a] = true;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        if u == b {
            return false;
        }
        for &(v, _) in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                queue.push_back(v);
            }
        }
    }
    true
}

impl DualGraph {
    /// Builds and validates a dual graph from ids, self-intersections and
    /// edge pairs.
    pub fn new<S: Into<String>>(
        name: Option<&str>,
        vertices: impl IntoIterator<Item = (S, i64)>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let vertices: Vec<Vertex> =
            vertices.into_iter().map(|(id, self_int)| Vertex { id: id.into(), self_int }).collect();
        let edges: Vec<(String, String)> = edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        Self::from_parts(name.map(str::to_owned), vertices, &edges)
    }

    pub fn validate(raw: &GraphFile) -> Result<Self> {
        let vertices = raw
            .vertices
            .iter()
            .map(|v| {
                let self_int =
                    v.self_int.ok_or_else(|| Error::Parse(format!("vertex {} has no self-intersection", v.id)))?;
                Ok(Vertex { id: v.id.clone(), self_int })
            })
            .collect::<Result<Vec<_>>>()?;
        let edges: Vec<(String, String)> = raw.edges.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        Self::from_parts(raw.name.clone(), vertices, &edges)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::validate(&GraphFile::from_json(text)?)
    }

    fn from_parts(name: Option<String>, vertices: Vec<Vertex>, edges: &[(String, String)]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let index = build_index(vertices.iter().map(|v| v.id.clone()))?;
        let edges = resolve_edges(&index, edges)?;
        if let Some(&(a, _)) = edges.iter().find(|(a, b)| a == b) {
            return Err(Error::LoopEdge(vertices[a].id.clone()));
        }
        if let Some(v) = vertices.iter().find(|v| v.self_int > -1) {
            return Err(Error::NonNegativeSelfIntersection { vertex: v.id.clone(), value: v.self_int });
        }
        if !is_connected(vertices.len(), &edges) {
            return Err(Error::Disconnected);
        }
        let graph = DualGraph { name, vertices, edges, index };
        lattice::check_negative_definite(&graph.intersection_matrix())?;
        Ok(graph)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: impl Into<String>) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn ids(&self) -> impl Iterator<Item = &str> {
        self.vertices.iter().map(|v| v.id.as_str())
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i].id
    }

    pub fn self_int(&self, i: usize) -> i64 {
        self.vertices[i].self_int
    }

    /// Edge list as vertex-index pairs, in declared order.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn edge_multiplicity(&self, a: usize, b: usize) -> usize {
        self.edges.iter().filter(|&&(x, y)| (x, y) == (a, b) || (x, y) == (b, a)).count()
    }

    /// Number of edge germs at `i`.
    pub fn valency(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }

    /// Integer intersection matrix in declared vertex order.
    pub fn intersection_matrix(&self) -> Vec<Vec<i64>> {
        let n = self.len();
        let mut m = vec![vec![0i64; n]; n];
        for (i, v) in self.vertices.iter().enumerate() {
            m[i][i] = v.self_int;
        }
        for &(a, b) in &self.edges {
            m[a][b] += 1;
            m[b][a] += 1;
        }
        m
    }

    /// True iff the dual graph is a tree. Both kinds of blow-up preserve the
    /// first Betti number, so one model decides the question for all.
    pub fn is_arborescent(&self) -> bool {
        self.edges.len() + 1 == self.len()
    }

    /// Returns the model obtained by one blow-up, with the new prime
    /// appended as the last vertex.
    pub fn blowup(&self, spec: &BlowupSpec, new_id: &str) -> Result<DualGraph> {
        if self.contains(new_id) {
            return Err(Error::IdCollision(new_id.to_owned()));
        }
        let mut vertices = self.vertices.clone();
        let mut edges = self.edges.clone();
        let w = vertices.len();
        match spec {
            BlowupSpec::Free { at } => {
                let u = self.index_of(at)?;
                vertices[u].self_int -= 1;
                edges.push((u, w));
            }
            BlowupSpec::Satellite { u, v, index } => {
                let iu = self.index_of(u)?;
                let iv = self.index_of(v)?;
                let pos = edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(a, b))| (a, b) == (iu, iv) || (a, b) == (iv, iu))
                    .map(|(pos, _)| pos)
                    .nth(*index)
                    .ok_or_else(|| Error::NoSuchEdge(u.clone(), v.clone()))?;
                edges.remove(pos);
                vertices[iu].self_int -= 1;
                vertices[iv].self_int -= 1;
                edges.push((iu, w));
                edges.push((w, iv));
            }
        }
        vertices.push(Vertex { id: new_id.to_owned(), self_int: -1 });
        let mut index = self.index.clone();
        index.insert(new_id.to_owned(), w);
        let graph = DualGraph { name: self.name.clone(), vertices, edges, index };
        debug_assert!(lattice::check_negative_definite(&graph.intersection_matrix()).is_ok());
        Ok(graph)
    }

    /// A vertex id not yet used in the graph, of the form `{prefix}{k}`.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (1..).map(|k| format!("{prefix}{k}")).find(|id| !self.contains(id)).expect("unbounded id supply")
    }

    /// Vertex separation by id (see [`GenericGraph::separates`]).
    pub fn separates(&self, c: &str, a: &str, b: &str) -> Result<bool> {
        let (c, a, b) = (self.index_of(c)?, self.index_of(a)?, self.index_of(b)?);
        Ok(self.separates_idx(c, a, b))
    }

    pub fn separates_idx(&self, c: usize, a: usize, b: usize) -> bool {
        separates_idx(&adjacency(self.len(), &self.edges), c, a, b)
    }

    /// Adjacency lists of `(neighbor, edge index)`.
    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        adjacency(self.len(), &self.edges)
    }

    /// Forgets the self-intersections.
    pub fn to_generic(&self) -> GenericGraph {
        GenericGraph {
            vertices: self.vertices.iter().map(|v| v.id.clone()).collect(),
            edges: self.edges.clone(),
            index: self.index.clone(),
        }
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            name: self.name.clone(),
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexEntry { id: v.id.clone(), self_int: Some(v.self_int) })
                .collect(),
            edges: self.edges.iter().map(|&(a, b)| [self.id(a).to_owned(), self.id(b).to_owned()]).collect(),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("graph serializes")
    }
}

/// Finite multigraph; loops allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericGraph {
    vertices: Vec<String>,
    edges: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

impl GenericGraph {
    pub fn new<S: Into<String>>(
        vertices: impl IntoIterator<Item = S>,
        edges: impl IntoIterator<Item = (S, S)>,
    ) -> Result<Self> {
        let vertices: Vec<String> = vertices.into_iter().map(Into::into).collect();
        let index = build_index(vertices.iter().cloned())?;
        let edges: Vec<(String, String)> = edges.into_iter().map(|(a, b)| (a.into(), b.into())).collect();
        let edges = resolve_edges(&index, &edges)?;
        Ok(GenericGraph { vertices, edges, index })
    }

    pub fn from_file(raw: &GraphFile) -> Result<Self> {
        Self::new(raw.vertices.iter().map(|v| v.id.clone()), raw.edges.iter().map(|[a, b]| (a.clone(), b.clone())))
    }

    pub fn from_indices(vertices: Vec<String>, edges: Vec<(usize, usize)>) -> Result<Self> {
        let index = build_index(vertices.iter().cloned())?;
        if let Some(&(a, b)) = edges.iter().find(|&&(a, b)| a >= vertices.len() || b >= vertices.len()) {
            return Err(Error::UnknownVertex(format!("#{}", a.max(b))));
        }
        Ok(GenericGraph { vertices, edges, index })
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.vertices
    }

    pub fn id(&self, i: usize) -> &str {
        &self.vertices[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn is_connected(&self) -> bool {
        is_connected(self.len(), &self.edges)
    }

    pub fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        adjacency(self.len(), &self.edges)
    }

    /// True iff `c` is one of `a`, `b`, or removing `c` with its incident
    /// edges leaves `a` and `b` in different components.
    pub fn separates(&self, c: &str, a: &str, b: &str) -> Result<bool> {
        let (c, a, b) = (self.index_of(c)?, self.index_of(a)?, self.index_of(b)?);
        Ok(self.separates_idx(c, a, b))
    }

    pub fn separates_idx(&self, c: usize, a: usize, b: usize) -> bool {
        separates_idx(&self.adjacency(), c, a, b)
    }

    /// Adds a vertex and returns its index.
    pub fn add_vertex(&mut self, id: impl Into<String>) -> Result<usize> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::IdCollision(id));
        }
        let i = self.vertices.len();
        self.index.insert(id.clone(), i);
        self.vertices.push(id);
        Ok(i)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.edges.push((a, b));
    }

    /// Replaces the `nth` edge between `a` and `b` by a path through a new
    /// vertex and returns the new vertex index.
    pub fn subdivide(&mut self, a: usize, b: usize, nth: usize, id: impl Into<String>) -> Result<usize> {
        let pos = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, &(x, y))| (x, y) == (a, b) || (x, y) == (b, a))
            .map(|(pos, _)| pos)
            .nth(nth)
            .ok_or_else(|| Error::NoSuchEdge(self.vertices[a].clone(), self.vertices[b].clone()))?;
        let w = self.add_vertex(id)?;
        self.edges.remove(pos);
        self.edges.push((a, w));
        self.edges.push((w, b));
        Ok(w)
    }

    pub fn to_file(&self) -> GraphFile {
        GraphFile {
            name: None,
            vertices: self.vertices.iter().map(|id| VertexEntry { id: id.clone(), self_int: None }).collect(),
            edges: self.edges.iter().map(|&(a, b)| [self.vertices[a].clone(), self.vertices[b].clone()]).collect(),
        }
    }
}

/// Number of connected components left after deleting vertex `removed`.
pub fn components_without(g: &GenericGraph, removed: usize) -> usize {
    let adj = g.adjacency();
    let mut seen: HashSet<usize> = HashSet::from([removed]);
    let mut count = 0;
    for start in 0..g.len() {
        if seen.contains(&start) {
            continue;
        }
        count += 1;
        seen.insert(start);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &adj[u] {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
    }
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn single_vertex_is_valid() {
        let g = DualGraph::new(None, [("E1", -2)], []).unwrap();
        assert_eq!(g.len(), 1);
        assert!(g.is_arborescent());
    }

    #[test]
    fn tetrahedron_is_valid() {
        let g = corpus::tetrahedron(4);
        assert_eq!(g.len(), 4);
        assert_eq!(g.edges().len(), 6);
    }

    #[test]
    fn two_minus_one_curves_fail_definiteness() {
        let err = DualGraph::new(None, [("E1", -1), ("E2", -1)], [("E1", "E2")]).unwrap_err();
        assert_eq!(err, Error::NotNegativeDefinite { minor_index: 2 });
    }

    #[test]
    fn validation_errors() {
        assert_eq!(DualGraph::new(None, [("a", -2), ("b", -2)], []).unwrap_err(), Error::Disconnected);
        assert_eq!(DualGraph::new(None, [("a", -2)], [("a", "a")]).unwrap_err(), Error::LoopEdge("a".into()));
        assert_eq!(
            DualGraph::new(None, [("a", 0)], []).unwrap_err(),
            Error::NonNegativeSelfIntersection { vertex: "a".into(), value: 0 }
        );
        assert_eq!(DualGraph::new(None, [("a", -2), ("a", -3)], []).unwrap_err(), Error::DuplicateVertexId("a".into()));
        assert_eq!(DualGraph::new(None, [("a", -2)], [("a", "z")]).unwrap_err(), Error::UnknownVertex("z".into()));
        let empty: [(&str, i64); 0] = [];
        assert_eq!(DualGraph::new(None, empty, []).unwrap_err(), Error::EmptyGraph);
    }

    #[test]
    fn json_input_keeps_declared_order() {
        let text = r#"{"name":"chain","vertices":[{"id":"b","self":-3},{"id":"a","self":-2}],"edges":[["a","b"]]}"#;
        let g = DualGraph::from_json(text).unwrap();
        assert_eq!(g.ids().collect::<Vec<_>>(), ["b", "a"]);
        assert_eq!(g.intersection_matrix(), vec![vec![-3, 1], vec![1, -2]]);
        assert_eq!(g.name(), Some("chain"));
    }

    #[test]
    fn satellite_blowup_on_tetrahedron() {
        let g = corpus::tetrahedron(4);
        let h = g.blowup(&BlowupSpec::satellite("E1", "E2"), "E5").unwrap();
        let selfs: Vec<i64> = h.vertices().iter().map(|v| v.self_int).collect();
        assert_eq!(selfs, [-5, -5, -4, -4, -1]);
        let mut edges: Vec<String> = h
            .edges()
            .iter()
            .map(|&(a, b)| {
                let (x, y) = (h.id(a)[1..].to_owned(), h.id(b)[1..].to_owned());
                if x < y {
                    format!("{x}{y}")
                } else {
                    format!("{y}{x}")
                }
            })
            .collect();
        edges.sort();
        assert_eq!(edges, ["13", "14", "15", "23", "24", "25", "34"]);
    }

    #[test]
    fn free_blowup_of_single_vertex() {
        let g = DualGraph::new(None, [("E1", -2)], []).unwrap();
        let h = g.blowup(&BlowupSpec::free("E1"), "E2").unwrap();
        assert_eq!(h.intersection_matrix(), vec![vec![-3, 1], vec![1, -1]]);
    }

    #[test]
    fn blowup_errors() {
        let g = corpus::a3();
        assert_eq!(g.blowup(&BlowupSpec::free("X"), "N").unwrap_err(), Error::UnknownVertex("X".into()));
        assert_eq!(
            g.blowup(&BlowupSpec::satellite("E1", "E3"), "N").unwrap_err(),
            Error::NoSuchEdge("E1".into(), "E3".into())
        );
        assert_eq!(g.blowup(&BlowupSpec::free("E1"), "E2").unwrap_err(), Error::IdCollision("E2".into()));
    }

    #[test]
    fn arborescence_examples() {
        assert!(!corpus::tetrahedron(4).is_arborescent());
        assert!(corpus::a3().is_arborescent());
        assert!(!corpus::double_edge().is_arborescent());
    }

    #[test]
    fn separation_examples() {
        let a3 = corpus::a3();
        assert!(a3.separates("E2", "E1", "E3").unwrap());
        let t = corpus::tetrahedron(4);
        assert!(!t.separates("E3", "E1", "E2").unwrap());
        assert!(t.separates("E1", "E1", "E2").unwrap());
        assert!(!t.separates("E1", "E2", "E2").unwrap());
        assert_eq!(t.separates("E9", "E1", "E2").unwrap_err(), Error::UnknownVertex("E9".into()));
    }

    #[test]
    fn generic_graph_allows_loops() {
        let g = GenericGraph::new(["a", "b"], [("a", "a"), ("a", "b")]).unwrap();
        assert!(g.is_connected());
        assert!(!g.separates("a", "b", "b").unwrap());
    }
}

//! Blocks, brick-vertex trees, convex hulls and labelled trees.
//!
//! Blocks are found with the depth-first lowpoint method over edge ids, so
//! parallel edges close circuits like any other back edge. A loop is its own
//! single-vertex brick.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::dualgraph::GenericGraph;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockKind {
    Brick,
    Bridge,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub kind: BlockKind,
    /// `B#k` for bricks; empty for bridges.
    pub id: String,
    /// Vertex indices, ascending.
    pub vertices: Vec<usize>,
    /// Edge indices into the source graph, ascending.
    pub edges: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub cut_vertices: Vec<usize>,
    pub blocks: Vec<Block>,
}

impl BlockDecomposition {
    pub fn bricks(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Brick)
    }

    pub fn bridges(&self) -> impl Iterator<Item = &Block> {
        self.blocks.iter().filter(|b| b.kind == BlockKind::Bridge)
    }

    pub fn report(&self, g: &GenericGraph) -> BlockReport {
        BlockReport {
            cut_vertices: self.cut_vertices.iter().map(|&v| g.id(v).to_owned()).collect(),
            bricks: self
                .bricks()
                .map(|b| BrickEntry {
                    id: b.id.clone(),
                    vertices: b.vertices.iter().map(|&v| g.id(v).to_owned()).collect(),
                })
                .collect(),
            bridges: self
                .bridges()
                .map(|b| {
                    let (x, y) = g.edges()[b.edges[0]];
                    [g.id(x).to_owned(), g.id(y).to_owned()]
                })
                .collect(),
        }
    }
}

/// JSON form of a block decomposition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub cut_vertices: Vec<String>,
    pub bricks: Vec<BrickEntry>,
    pub bridges: Vec<[String; 2]>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BrickEntry {
    pub id: String,
    pub vertices: Vec<String>,
}

struct Lowpoint<'a> {
    adj: &'a [Vec<(usize, usize)>],
    edges: &'a [(usize, usize)],
    disc: Vec<usize>,
    low: Vec<usize>,
    time: usize,
    stack: Vec<usize>,
    blocks: Vec<Vec<usize>>,
}

impl Lowpoint<'_> {
    fn visit(&mut self, u: usize, parent_edge: Option<usize>) {
        self.disc[u] = self.time;
        self.low[u] = self.time;
        self.time += 1;
        for &(v, e) in &self.adj[u] {
            if Some(e) == parent_edge || self.edges[e].0 == self.edges[e].1 {
                continue;
            }
            if self.disc[v] == usize::MAX {
                self.stack.push(e);
                self.visit(v, Some(e));
                self.low[u] = self.low[u].min(self.low[v]);
                if self.low[v] >= self.disc[u] {
                    let mut block = Vec::new();
                    while let Some(f) = self.stack.pop() {
                        block.push(f);
                        if f == e {
                            break;
                        }
                    }
                    self.blocks.push(block);
                }
            } else if self.disc[v] < self.disc[u] {
                self.stack.push(e);
                self.low[u] = self.low[u].min(self.disc[v]);
            }
        }
    }
}

/// Splits a connected graph into its blocks.
pub fn block_decomposition(g: &GenericGraph) -> Result<BlockDecomposition> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let adj = g.adjacency();
    let mut lp = Lowpoint {
        adj: &adj,
        edges: g.edges(),
        disc: vec![usize::MAX; g.len()],
        low: vec![0; g.len()],
        time: 0,
        stack: Vec::new(),
        blocks: Vec::new(),
    };
    if !g.is_empty() {
        lp.visit(0, None);
    }
    let mut edge_sets = lp.blocks;
    edge_sets.extend(g.edges().iter().enumerate().filter(|(_, &(a, b))| a == b).map(|(e, _)| vec![e]));

    let mut blocks = Vec::with_capacity(edge_sets.len());
    let mut brick_count = 0;
    let mut membership = vec![0usize; g.len()];
    for mut edges in edge_sets {
        edges.sort_unstable();
        let vertices: BTreeSet<usize> = edges.iter().flat_map(|&e| [g.edges()[e].0, g.edges()[e].1]).collect();
        for &v in &vertices {
            membership[v] += 1;
        }
        let is_bridge = edges.len() == 1 && vertices.len() == 2;
        let (kind, id) = if is_bridge {
            (BlockKind::Bridge, String::new())
        } else {
            brick_count += 1;
            (BlockKind::Brick, format!("B#{brick_count}"))
        };
        blocks.push(Block { kind, id, vertices: vertices.into_iter().collect(), edges });
    }
    let cut_vertices = (0..g.len()).filter(|&v| membership[v] >= 2).collect();
    Ok(BlockDecomposition { cut_vertices, blocks })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeNode {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub brick: bool,
}

/// Finite tree with string node ids. Used for brick-vertex trees, convex
/// hulls and labelled trees alike.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Tree {
    nodes: Vec<TreeNode>,
    edges: Vec<(usize, usize)>,
    index: HashMap<String, usize>,
}

/// A tree whose labelled nodes form the set `F` and whose unlabelled nodes
/// all have valency at least 3.
pub type FTree = Tree;

impl Tree {
    pub fn new() -> Self {
        Tree { nodes: Vec::new(), edges: Vec::new(), index: HashMap::new() }
    }

    pub fn add_node(&mut self, id: impl Into<String>, label: Option<String>, brick: bool) -> Result<usize> {
        let id = id.into();
        if self.index.contains_key(&id) {
            return Err(Error::IdCollision(id));
        }
        let i = self.nodes.len();
        self.index.insert(id.clone(), i);
        self.nodes.push(TreeNode { id, label, brick });
        Ok(i)
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        self.edges.push((a, b));
    }

    /// Builds a tree from nodes and id pairs, checking tree-ness.
    pub fn from_parts(nodes: Vec<TreeNode>, edges: &[(String, String)]) -> Result<Self> {
        let mut t = Tree::new();
        for n in nodes {
            t.add_node(n.id, n.label, n.brick)?;
        }
        for (a, b) in edges {
            let (ia, ib) = (t.index_of(a)?, t.index_of(b)?);
            t.add_edge(ia, ib);
        }
        if !t.is_tree() {
            return Err(Error::Parse("edges do not form a tree".into()));
        }
        Ok(t)
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[TreeNode] {
        &self.nodes
    }

    pub fn node(&self, i: usize) -> &TreeNode {
        &self.nodes[i]
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn index_of(&self, id: &str) -> Result<usize> {
        self.index.get(id).copied().ok_or_else(|| Error::UnknownVertex(id.to_owned()))
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn set_label(&mut self, i: usize, label: Option<String>) {
        self.nodes[i].label = label;
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        self.edges
            .iter()
            .filter_map(|&(a, b)| {
                if a == i {
                    Some(b)
                } else if b == i {
                    Some(a)
                } else {
                    None
                }
            })
            .collect()
    }

    pub fn valency(&self, i: usize) -> usize {
        self.edges.iter().filter(|&&(a, b)| a == i || b == i).count()
    }

    /// Connected with `|E| = |V| - 1`.
    pub fn is_tree(&self) -> bool {
        if self.nodes.is_empty() {
            return self.edges.is_empty();
        }
        self.edges.len() + 1 == self.nodes.len() && self.component_of(0).len() == self.nodes.len()
    }

    fn component_of(&self, start: usize) -> HashSet<usize> {
        let adj = self.adjacency();
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if seen.insert(v) {
                    queue.push_back(v);
                }
            }
        }
        seen
    }

    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.nodes.len()];
        for &(a, b) in &self.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        adj
    }

    /// Unique path from `a` to `b`, endpoints included.
    pub fn path(&self, a: usize, b: usize) -> Vec<usize> {
        let adj = self.adjacency();
        let mut prev = vec![usize::MAX; self.nodes.len()];
        prev[a] = a;
        let mut queue = VecDeque::from([a]);
        while let Some(u) = queue.pop_front() {
            if u == b {
                break;
            }
            for &v in &adj[u] {
                if prev[v] == usize::MAX {
                    prev[v] = u;
                    queue.push_back(v);
                }
            }
        }
        let mut path = vec![b];
        let mut cur = b;
        while cur != a {
            cur = prev[cur];
            path.push(cur);
        }
        path.reverse();
        path
    }

    /// Induced subtree on a node set assumed to be connected.
    fn induced(&self, keep: &BTreeSet<usize>) -> Tree {
        let mut t = Tree::new();
        let mut remap = HashMap::new();
        for &i in keep {
            let n = &self.nodes[i];
            remap.insert(i, t.add_node(n.id.clone(), n.label.clone(), n.brick).expect("ids are unique"));
        }
        for &(a, b) in &self.edges {
            if let (Some(&x), Some(&y)) = (remap.get(&a), remap.get(&b)) {
                t.add_edge(x, y);
            }
        }
        t
    }

    /// Canonical string of the subtree at `node` seen from `parent`.
    fn encode(&self, adj: &[Vec<usize>], node: usize, parent: usize) -> String {
        let mut children: Vec<String> =
            adj[node].iter().filter(|&&c| c != parent).map(|&c| self.encode(adj, c, node)).collect();
        children.sort();
        let label = self.nodes[node].label.as_deref().unwrap_or("*");
        format!("({}{})", escape(label), children.concat())
    }

    pub fn labels(&self) -> BTreeSet<&str> {
        self.nodes.iter().filter_map(|n| n.label.as_deref()).collect()
    }

    /// Node carrying the given label.
    pub fn labelled(&self, label: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.label.as_deref() == Some(label))
    }

    /// Every node of valency at most 2 is labelled, and labels are unique.
    pub fn is_f_tree(&self) -> bool {
        let labels: Vec<&str> = self.nodes.iter().filter_map(|n| n.label.as_deref()).collect();
        let unique: HashSet<&str> = labels.iter().copied().collect();
        self.is_tree()
            && unique.len() == labels.len()
            && (0..self.len()).all(|i| self.nodes[i].label.is_some() || self.valency(i) >= 3)
    }
}

impl Default for Tree {
    fn default() -> Self {
        Tree::new()
    }
}

fn escape(label: &str) -> String {
    label.replace('\\', "\\\\").replace('(', "\\(").replace(')', "\\)").replace('*', "\\*")
}

/// JSON form of a tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeReport {
    pub nodes: Vec<TreeNode>,
    pub edges: Vec<[String; 2]>,
}

impl Tree {
    pub fn report(&self) -> TreeReport {
        TreeReport {
            nodes: self.nodes.clone(),
            edges: self.edges.iter().map(|&(a, b)| [self.nodes[a].id.clone(), self.nodes[b].id.clone()]).collect(),
        }
    }

    pub fn from_report(report: &TreeReport) -> Result<Self> {
        let edges: Vec<(String, String)> = report.edges.iter().map(|[a, b]| (a.clone(), b.clone())).collect();
        Tree::from_parts(report.nodes.clone(), &edges)
    }
}

/// Tree on the vertices and bricks of `g`: bridges are kept, and each brick
/// node is joined to the vertices it contains.
pub fn brick_vertex_tree(g: &GenericGraph) -> Result<Tree> {
    let blocks = block_decomposition(g)?;
    brick_vertex_tree_from(g, &blocks)
}

pub fn brick_vertex_tree_from(g: &GenericGraph, blocks: &BlockDecomposition) -> Result<Tree> {
    let mut t = Tree::new();
    for id in g.ids() {
        t.add_node(id.clone(), None, false)?;
    }
    for b in &blocks.blocks {
        match b.kind {
            BlockKind::Bridge => {
                let (x, y) = g.edges()[b.edges[0]];
                t.add_edge(x, y);
            }
            BlockKind::Brick => {
                let node = t.add_node(b.id.clone(), None, true)?;
                for &v in &b.vertices {
                    t.add_edge(node, v);
                }
            }
        }
    }
    debug_assert!(t.is_tree());
    Ok(t)
}

/// `c` lies on the path from `a` to `b` (endpoints included).
pub fn tree_separates(t: &Tree, c: &str, a: &str, b: &str) -> Result<bool> {
    let (c, a, b) = (t.index_of(c)?, t.index_of(a)?, t.index_of(b)?);
    Ok(tree_separates_idx(t, c, a, b))
}

pub fn tree_separates_idx(t: &Tree, c: usize, a: usize, b: usize) -> bool {
    c == a || c == b || t.path(a, b).contains(&c)
}

/// Minimal subtree containing the given nodes, obtained by pruning leaves
/// outside the family.
pub fn convex_hull(t: &Tree, family: &[&str]) -> Result<Tree> {
    if family.is_empty() {
        return Err(Error::EmptyFamily);
    }
    let wanted: HashSet<usize> = family.iter().map(|id| t.index_of(id)).collect::<Result<_>>()?;
    let mut alive: BTreeSet<usize> = (0..t.len()).collect();
    let mut degree: Vec<usize> = (0..t.len()).map(|i| t.valency(i)).collect();
    let adj = t.adjacency();
    let mut queue: VecDeque<usize> = (0..t.len()).filter(|&i| degree[i] <= 1 && !wanted.contains(&i)).collect();
    while let Some(u) = queue.pop_front() {
        if !alive.contains(&u) || wanted.contains(&u) || degree[u] > 1 {
            continue;
        }
        alive.remove(&u);
        for &v in &adj[u] {
            if alive.contains(&v) {
                degree[v] -= 1;
                if degree[v] <= 1 && !wanted.contains(&v) {
                    queue.push_back(v);
                }
            }
        }
    }
    Ok(t.induced(&alive))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HullValencyReport {
    pub ok: bool,
    /// Bricks of hull-valency above 3.
    pub offenders: Vec<(String, usize)>,
    /// Hull-valency of every brick node inside the hull.
    pub brick_valencies: BTreeMap<String, usize>,
}

/// Checks that every brick has valency at most 3 inside the convex hull of
/// `family` in the brick-vertex tree.
pub fn hull_valency_report(g: &GenericGraph, family: &[&str]) -> Result<HullValencyReport> {
    for id in family {
        g.index_of(id)?;
    }
    let bvt = brick_vertex_tree(g)?;
    let hull = convex_hull(&bvt, family)?;
    Ok(brick_hull_valencies(&hull))
}

pub(crate) fn brick_hull_valencies(hull: &Tree) -> HullValencyReport {
    let brick_valencies: BTreeMap<String, usize> =
        (0..hull.len()).filter(|&i| hull.node(i).brick).map(|i| (hull.node(i).id.clone(), hull.valency(i))).collect();
    let offenders: Vec<(String, usize)> =
        brick_valencies.iter().filter(|(_, &v)| v > 3).map(|(id, &v)| (id.clone(), v)).collect();
    HullValencyReport { ok: offenders.is_empty(), offenders, brick_valencies }
}

/// Labels the family nodes by their ids and suppresses every unlabelled
/// node of valency 2.
pub fn as_f_tree(subtree: &Tree, family: &[&str]) -> Result<FTree> {
    let mut t = subtree.clone();
    for n in t.nodes.iter_mut() {
        n.label = None;
    }
    for id in family {
        let i = t.index_of(id)?;
        t.nodes[i].label = Some((*id).to_owned());
    }
    suppress(&t)
}

/// Suppresses unlabelled valency-2 nodes of an already labelled tree.
pub fn suppress(t: &Tree) -> Result<FTree> {
    for i in 0..t.len() {
        if t.nodes[i].label.is_none() && t.valency(i) <= 1 {
            return Err(Error::LeafNotInF(t.nodes[i].id.clone()));
        }
    }
    let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); t.len()];
    for &(a, b) in &t.edges {
        adj[a].insert(b);
        adj[b].insert(a);
    }
    let mut alive: BTreeSet<usize> = (0..t.len()).collect();
    for i in 0..t.len() {
        if t.nodes[i].label.is_none() && adj[i].len() == 2 {
            let mut it = adj[i].iter().copied();
            let (x, y) = (it.next().unwrap(), it.next().unwrap());
            adj[x].remove(&i);
            adj[y].remove(&i);
            adj[x].insert(y);
            adj[y].insert(x);
            adj[i].clear();
            alive.remove(&i);
        }
    }
    let mut out = Tree::new();
    let mut remap = HashMap::new();
    for &i in &alive {
        let n = &t.nodes[i];
        remap.insert(i, out.add_node(n.id.clone(), n.label.clone(), n.brick)?);
    }
    for &i in &alive {
        for &j in &adj[i] {
            if i < j {
                out.add_edge(remap[&i], remap[&j]);
            }
        }
    }
    Ok(out)
}

/// Isomorphism of labelled trees fixing every label, decided by comparing
/// canonical encodings rooted at the least label.
pub fn f_tree_isomorphic(t1: &FTree, t2: &FTree) -> Result<bool> {
    let l1 = t1.labels();
    if l1 != t2.labels() {
        return Err(Error::LabelSetMismatch);
    }
    let Some(&root) = l1.iter().next() else {
        return Ok(t1.len() == t2.len());
    };
    let r1 = t1.labelled(root).expect("label present");
    let r2 = t2.labelled(root).expect("label present");
    Ok(t1.encode(&t1.adjacency(), r1, usize::MAX) == t2.encode(&t2.adjacency(), r2, usize::MAX))
}

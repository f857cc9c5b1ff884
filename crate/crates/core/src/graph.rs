//! Coxeter matrices, their diagrams, rooted spanning trees, chord circuits and
//! edge-swap sequences between spanning trees.

use std::collections::{BTreeSet, VecDeque};
use std::sync::Arc;

use num_integer::Integer;

use crate::error::{CoxError, Result};

/// Labels `<= 0` stand for an infinite order.
pub const INFINITE: i64 = 0;

/// An edge as an ordered pair with the smaller index first.
pub type Edge = (usize, usize);

pub fn edge(s: usize, t: usize) -> Edge {
    (s.min(t), s.max(t))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoxeterMatrix {
    m: Vec<Vec<i64>>,
    labels: Vec<String>,
}

impl CoxeterMatrix {
    /// Vertex labels default to `s1 .. sn`.
    pub fn new(m: Vec<Vec<i64>>) -> Self {
        let labels = (1..=m.len()).map(|i| format!("s{i}")).collect();
        Self { m, labels }
    }

    pub fn with_labels(m: Vec<Vec<i64>>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != m.len() {
            return Err(CoxError::InvalidInput(format!(
                "{} labels for rank {}",
                labels.len(),
                m.len()
            )));
        }
        let unique: BTreeSet<&String> = labels.iter().collect();
        if unique.len() != labels.len() {
            return Err(CoxError::InvalidInput("vertex labels must be distinct".into()));
        }
        Ok(Self { m, labels })
    }

    pub fn rank(&self) -> usize {
        self.m.len()
    }

    pub fn entry(&self, s: usize, t: usize) -> i64 {
        self.m[s][t]
    }

    pub fn entries(&self) -> &[Vec<i64>] {
        &self.m
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }
}

/// A validated, connected Coxeter diagram with finite labels.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagram {
    matrix: CoxeterMatrix,
    edges: Vec<Edge>,
    neighbors: Vec<Vec<usize>>,
}

/// Checks the matrix and builds its diagram.
pub fn validate(matrix: &CoxeterMatrix) -> Result<Arc<Diagram>> {
    let n = matrix.rank();
    if n == 0 {
        return Err(CoxError::InvalidInput("rank must be positive".into()));
    }
    for (s, row) in matrix.m.iter().enumerate() {
        if row.len() != n {
            return Err(CoxError::InvalidInput(format!("row {s} has {} entries, expected {n}", row.len())));
        }
    }
    let mut edges = Vec::new();
    let mut neighbors = vec![Vec::new(); n];
    for s in 0..n {
        if matrix.m[s][s] != 1 {
            return Err(CoxError::BadDiagonal(s));
        }
        for t in 0..n {
            if t == s {
                continue;
            }
            let v = matrix.m[s][t];
            if v != matrix.m[t][s] {
                return Err(CoxError::NotSymmetric(s, t));
            }
            if v <= INFINITE {
                return Err(CoxError::InfiniteLabel(s, t));
            }
            if v < 2 {
                return Err(CoxError::InvalidLabel(s, t, v));
            }
            if v >= 3 {
                neighbors[s].push(t);
                if s < t {
                    edges.push((s, t));
                }
            }
        }
    }
    let diagram = Diagram { matrix: matrix.clone(), edges, neighbors };
    if diagram.component(0).len() != n {
        return Err(CoxError::Disconnected);
    }
    Ok(Arc::new(diagram))
}

impl Diagram {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn matrix(&self) -> &CoxeterMatrix {
        &self.matrix
    }

    pub fn labels(&self) -> &[String] {
        self.matrix.labels()
    }

    pub fn label(&self, s: usize) -> &str {
        &self.matrix.labels[s]
    }

    pub fn vertex(&self, label: &str) -> Result<usize> {
        self.matrix
            .labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| CoxError::UnknownVertex(label.to_string()))
    }

    pub fn order(&self, s: usize, t: usize) -> u64 {
        self.matrix.m[s][t] as u64
    }

    /// Edges `(s, t)`, `s < t`, with label at least 3, in lexicographic order.
    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Neighbors in ascending order.
    pub fn neighbors(&self, s: usize) -> &[usize] {
        &self.neighbors[s]
    }

    pub fn has_edge(&self, s: usize, t: usize) -> bool {
        s != t && self.matrix.m[s][t] >= 3
    }

    /// `N = lcm(2 m_e)` over all edges, 1 without edges.
    pub fn conductor(&self) -> u64 {
        self.edges.iter().fold(1u64, |acc, &(s, t)| acc.lcm(&(2 * self.order(s, t))))
    }

    fn component(&self, start: usize) -> Vec<usize> {
        let mut seen = vec![false; self.rank()];
        let mut stack = vec![start];
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(v) = stack.pop() {
            out.push(v);
            for &w in &self.neighbors[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        out
    }

    /// Shortest path from `s` to `t` avoiding the edge `skip`, if any.
    pub fn shortest_path_avoiding(&self, s: usize, t: usize, skip: Edge) -> Option<Vec<usize>> {
        let mut prev = vec![usize::MAX; self.rank()];
        prev[s] = s;
        let mut queue = VecDeque::from([s]);
        while let Some(v) = queue.pop_front() {
            if v == t {
                break;
            }
            for &w in &self.neighbors[v] {
                if edge(v, w) == skip || prev[w] != usize::MAX {
                    continue;
                }
                prev[w] = v;
                queue.push_back(w);
            }
        }
        if prev[t] == usize::MAX {
            return None;
        }
        let mut path = vec![t];
        let mut v = t;
        while v != s {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        Some(path)
    }
}

/// A spanning tree of a diagram with a chosen root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpanningTree {
    diagram: Arc<Diagram>,
    root: usize,
    parent: Vec<Option<usize>>,
    depth: Vec<usize>,
    tree_edges: Vec<Edge>,
    chords: Vec<Edge>,
}

/// The tree path joining the endpoints of a chord.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChordCircuit {
    pub chord: Edge,
    /// Vertices from `chord.0` to `chord.1` along the tree.
    pub path: Vec<usize>,
    /// Index in `path` of the entry vertex, the tree-minimal one.
    pub entry: usize,
}

impl ChordCircuit {
    pub fn entry_vertex(&self) -> usize {
        self.path[self.entry]
    }
}

/// Breadth-first spanning tree; neighbors are visited by ascending index.
pub fn spanning_tree(diagram: &Arc<Diagram>, root: usize) -> Result<SpanningTree> {
    if root >= diagram.rank() {
        return Err(CoxError::UnknownVertex(root.to_string()));
    }
    let n = diagram.rank();
    let mut seen = vec![false; n];
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    let mut edges = Vec::new();
    while let Some(v) = queue.pop_front() {
        for &w in diagram.neighbors(v) {
            if !seen[w] {
                seen[w] = true;
                edges.push(edge(v, w));
                queue.push_back(w);
            }
        }
    }
    SpanningTree::from_edges(diagram, root, &edges)
}

impl SpanningTree {
    /// Tree from an explicit edge set; checks it spans the diagram.
    pub fn from_edges(diagram: &Arc<Diagram>, root: usize, edges: &[Edge]) -> Result<Self> {
        let n = diagram.rank();
        if root >= n {
            return Err(CoxError::UnknownVertex(root.to_string()));
        }
        let mut tree_edges: Vec<Edge> = edges.iter().map(|&(s, t)| edge(s, t)).collect();
        tree_edges.sort_unstable();
        tree_edges.dedup();
        for &(s, t) in &tree_edges {
            if t >= n || !diagram.has_edge(s, t) {
                return Err(CoxError::NotASpanningTree(format!("({s}, {t}) is not an edge of the diagram")));
            }
        }
        if tree_edges.len() + 1 != n {
            return Err(CoxError::NotASpanningTree(format!(
                "{} edges for {n} vertices",
                tree_edges.len()
            )));
        }
        let mut adj = vec![Vec::new(); n];
        for &(s, t) in &tree_edges {
            adj[s].push(t);
            adj[t].push(s);
        }
        let mut parent = vec![None; n];
        let mut depth = vec![0; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some(v);
                    depth[w] = depth[v] + 1;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        if count != n {
            return Err(CoxError::NotASpanningTree("edges do not connect every vertex".into()));
        }
        let chords = diagram
            .edges()
            .iter()
            .copied()
            .filter(|e| tree_edges.binary_search(e).is_err())
            .collect();
        Ok(Self { diagram: diagram.clone(), root, parent, depth, tree_edges, chords })
    }

    /// Same edges, different root.
    pub fn with_root(&self, root: usize) -> Result<Self> {
        Self::from_edges(&self.diagram, root, &self.tree_edges)
    }

    pub fn diagram(&self) -> &Arc<Diagram> {
        &self.diagram
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn parent(&self, s: usize) -> Option<usize> {
        self.parent[s]
    }

    pub fn depth(&self, s: usize) -> usize {
        self.depth[s]
    }

    pub fn tree_edges(&self) -> &[Edge] {
        &self.tree_edges
    }

    pub fn chords(&self) -> &[Edge] {
        &self.chords
    }

    pub fn is_tree_edge(&self, s: usize, t: usize) -> bool {
        self.tree_edges.binary_search(&edge(s, t)).is_ok()
    }

    pub fn is_chord(&self, s: usize, t: usize) -> bool {
        self.chords.binary_search(&edge(s, t)).is_ok()
    }

    /// Vertices from the root down to `s`.
    pub fn root_path(&self, s: usize) -> Vec<usize> {
        let mut path = vec![s];
        let mut v = s;
        while let Some(p) = self.parent[v] {
            path.push(p);
            v = p;
        }
        path.reverse();
        path
    }

    /// Vertices ordered by depth, ties by index; parents come first.
    pub fn top_down(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.diagram.rank()).collect();
        order.sort_by_key(|&v| (self.depth[v], v));
        order
    }

    /// `s` lies on the tree path from the root to `t`.
    pub fn precedes(&self, s: usize, t: usize) -> bool {
        let mut v = t;
        loop {
            if v == s {
                return true;
            }
            match self.parent[v] {
                Some(p) if self.depth[v] > self.depth[s] => v = p,
                _ => return false,
            }
        }
    }

    /// Tree path from `s` to `t`.
    pub fn path(&self, s: usize, t: usize) -> Vec<usize> {
        let (mut a, mut b) = (s, t);
        let mut left = vec![a];
        let mut right = vec![b];
        while a != b {
            if self.depth[a] >= self.depth[b] {
                a = self.parent[a].expect("non-root vertex has a parent");
                left.push(a);
            } else {
                b = self.parent[b].expect("non-root vertex has a parent");
                right.push(b);
            }
        }
        right.pop();
        left.extend(right.into_iter().rev());
        left
    }

    pub fn chord_circuit(&self, s: usize, t: usize) -> Result<ChordCircuit> {
        let chord = edge(s, t);
        if !self.is_chord(chord.0, chord.1) {
            return Err(CoxError::NotAChord(s, t));
        }
        let path = self.path(chord.0, chord.1);
        let entries: Vec<usize> = (0..path.len())
            .filter(|&i| path.iter().all(|&v| self.precedes(path[i], v)))
            .collect();
        if entries.len() != 1 {
            return Err(CoxError::Internal(format!(
                "chord ({s}, {t}) has {} entry vertices",
                entries.len()
            )));
        }
        Ok(ChordCircuit { chord, path, entry: entries[0] })
    }

    /// Replaces the tree edge `remove` by `add`, keeping the root.
    pub fn swap(&self, add: Edge, remove: Edge) -> Result<Self> {
        let mut edges: Vec<Edge> = self.tree_edges.iter().copied().filter(|&e| e != edge(remove.0, remove.1)).collect();
        if edges.len() == self.tree_edges.len() {
            return Err(CoxError::NotASpanningTree(format!("{remove:?} is not a tree edge")));
        }
        edges.push(edge(add.0, add.1));
        Self::from_edges(&self.diagram, self.root, &edges)
    }
}

/// Single edge exchanges turning `from` into `to`: each step adds an edge of
/// `to` and removes an edge of `from` lying on the cycle it closes.
pub fn swap_sequence(from: &SpanningTree, to: &SpanningTree) -> Result<Vec<(Edge, Edge)>> {
    if from.diagram.matrix != to.diagram.matrix {
        return Err(CoxError::DifferentDiagram);
    }
    let mut current = from.clone();
    let mut swaps = Vec::new();
    for &f in to.tree_edges() {
        if current.is_tree_edge(f.0, f.1) {
            continue;
        }
        let cycle = current.path(f.0, f.1);
        let remove = cycle
            .windows(2)
            .map(|w| edge(w[0], w[1]))
            .find(|e| !to.is_tree_edge(e.0, e.1))
            .ok_or_else(|| CoxError::Internal("no exchangeable edge on the cycle".into()))?;
        current = current.swap(f, remove)?;
        swaps.push((f, remove));
    }
    Ok(swaps)
}

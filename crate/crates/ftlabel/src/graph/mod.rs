//! Undirected simple graphs, edge-list parsing, and brute-force connectivity.

mod certificate;
mod cut;

use std::collections::VecDeque;
use std::fmt;

pub use certificate::sparse_certificate;
pub use cut::CutOracle;

/// Vertex identifier, `0..n`.
pub type Vertex = u32;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GraphError {
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: vertex {vertex} out of range for n = {n}")]
    OutOfRange { line: usize, vertex: u64, n: usize },
    #[error("line {line}: duplicate edge ({u}, {v})")]
    DuplicateEdge { line: usize, u: Vertex, v: Vertex },
    #[error("line {line}: self-loop at {v}")]
    SelfLoop { line: usize, v: Vertex },
    #[error("vertex {0} out of range")]
    VertexOutOfRange(u64),
}

/// Undirected simple graph with sorted adjacency lists.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<Vec<Vertex>>,
    m: usize,
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges={:?})", self.n(), self.edges().collect::<Vec<_>>())
    }
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph { adj: vec![Vec::new(); n], m: 0 }
    }

    /// Builds a graph from an edge list, rejecting self-loops, duplicates and
    /// out-of-range endpoints. Line numbers in errors are 1-based edge indices.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (Vertex, Vertex)>,
    {
        let mut g = Graph::empty(n);
        for (i, (u, v)) in edges.into_iter().enumerate() {
            g.try_add_edge(u as u64, v as u64, i + 1)?;
        }
        g.finish();
        Ok(g)
    }

    fn try_add_edge(&mut self, u: u64, v: u64, line: usize) -> Result<(), GraphError> {
        let n = self.n();
        for w in [u, v] {
            if w >= n as u64 {
                return Err(GraphError::OutOfRange { line, vertex: w, n });
            }
        }
        let (u, v) = (u as Vertex, v as Vertex);
        if u == v {
            return Err(GraphError::SelfLoop { line, v: u });
        }
        if self.adj[u as usize].contains(&v) {
            return Err(GraphError::DuplicateEdge { line, u, v });
        }
        self.adj[u as usize].push(v);
        self.adj[v as usize].push(u);
        self.m += 1;
        Ok(())
    }

    fn finish(&mut self) {
        for list in &mut self.adj {
            list.sort_unstable();
        }
    }

    /// Parses the edge-list text format: a header line `n m` followed by `m`
    /// lines `u v`. Blank lines and lines starting with `#` are skipped.
    pub fn parse(text: &str) -> Result<Self, GraphError> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim_end_matches('\r').trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hline, header) = lines.next().ok_or(GraphError::Parse {
            line: 1,
            msg: "missing header \"n m\"".into(),
        })?;
        let (n, m) = parse_pair(hline, header)?;
        let n = usize::try_from(n).map_err(|_| GraphError::Parse {
            line: hline,
            msg: "n too large".into(),
        })?;
        if n > Vertex::MAX as usize {
            return Err(GraphError::Parse { line: hline, msg: "n too large".into() });
        }
        let mut g = Graph::empty(n);
        let mut seen = std::collections::HashSet::new();
        let mut count = 0u64;
        for (line, text) in lines {
            let (u, v) = parse_pair(line, text)?;
            for w in [u, v] {
                if w >= n as u64 {
                    return Err(GraphError::OutOfRange { line, vertex: w, n });
                }
            }
            if u == v {
                return Err(GraphError::SelfLoop { line, v: u as Vertex });
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge { line, u: u as Vertex, v: v as Vertex });
            }
            g.adj[u as usize].push(v as Vertex);
            g.adj[v as usize].push(u as Vertex);
            g.m += 1;
            count += 1;
        }
        if count != m {
            return Err(GraphError::Parse {
                line: hline,
                msg: format!("header declares {m} edges, found {count}"),
            });
        }
        g.finish();
        Ok(g)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.m());
        for (u, v) in self.edges() {
            out.push_str(&format!("{u} {v}\n"));
        }
        out
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v as usize]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v as usize].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u as usize].binary_search(&v).is_ok()
    }

    /// Edges as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        self.adj.iter().enumerate().flat_map(|(u, list)| {
            let u = u as Vertex;
            list.iter().copied().filter(move |&v| u < v).map(move |v| (u, v))
        })
    }

    /// Same vertex set with every edge touching `removed` dropped.
    pub fn without(&self, removed: &[Vertex]) -> Graph {
        let mask = mask_of(self.n(), removed);
        self.without_mask(&mask)
    }

    pub fn without_mask(&self, mask: &[bool]) -> Graph {
        let mut m = 0;
        let adj = self
            .adj
            .iter()
            .enumerate()
            .map(|(u, list)| {
                if mask[u] {
                    return Vec::new();
                }
                let kept: Vec<Vertex> = list.iter().copied().filter(|&v| !mask[v as usize]).collect();
                m += kept.len();
                kept
            })
            .collect();
        Graph { adj, m: m / 2 }
    }

    /// Subgraph keeping only the listed edges (which must exist in `self`).
    pub fn edge_subgraph<I: IntoIterator<Item = (Vertex, Vertex)>>(&self, edges: I) -> Graph {
        let mut g = Graph::empty(self.n());
        for (u, v) in edges {
            debug_assert!(self.has_edge(u, v));
            g.adj[u as usize].push(v);
            g.adj[v as usize].push(u);
            g.m += 1;
        }
        g.finish();
        g
    }

    pub fn check_vertex(&self, v: u64) -> Result<Vertex, GraphError> {
        if v < self.n() as u64 {
            Ok(v as Vertex)
        } else {
            Err(GraphError::VertexOutOfRange(v))
        }
    }
}

fn parse_pair(line: usize, text: &str) -> Result<(u64, u64), GraphError> {
    let mut it = text.split_whitespace();
    let mut next = |what: &str| -> Result<u64, GraphError> {
        let tok = it.next().ok_or_else(|| GraphError::Parse {
            line,
            msg: format!("missing {what}"),
        })?;
        tok.parse::<u64>().map_err(|_| GraphError::Parse {
            line,
            msg: format!("invalid integer {tok:?}"),
        })
    };
    let a = next("first field")?;
    let b = next("second field")?;
    if it.next().is_some() {
        return Err(GraphError::Parse { line, msg: "trailing fields".into() });
    }
    Ok((a, b))
}

/// Boolean membership vector of length `n` for the given vertices.
pub fn mask_of(n: usize, vs: &[Vertex]) -> Vec<bool> {
    let mut mask = vec![false; n];
    for &v in vs {
        mask[v as usize] = true;
    }
    mask
}

/// Connected components of `G ∖ removed`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComponentMap {
    cid: Vec<Option<Vertex>>,
    pub removed: Vec<Vertex>,
}

impl ComponentMap {
    /// Component identifier (maximum vertex ID in the component), or `None`
    /// for removed vertices.
    pub fn cid(&self, v: Vertex) -> Option<Vertex> {
        self.cid[v as usize]
    }

    pub fn connected(&self, a: Vertex, b: Vertex) -> bool {
        match (self.cid(a), self.cid(b)) {
            (Some(x), Some(y)) => x == y,
            _ => false,
        }
    }

    pub fn as_slice(&self) -> &[Option<Vertex>] {
        &self.cid
    }
}

pub fn components(g: &Graph, removed: &[Vertex]) -> ComponentMap {
    let mask = mask_of(g.n(), removed);
    let mut removed = removed.to_vec();
    removed.sort_unstable();
    removed.dedup();
    ComponentMap { cid: component_ids(g, &mask), removed }
}

/// Per-vertex component identifier of `G ∖ mask` (max ID in the component).
pub fn component_ids(g: &Graph, mask: &[bool]) -> Vec<Option<Vertex>> {
    let n = g.n();
    let mut cid = vec![None; n];
    let mut queue = VecDeque::new();
    let mut members = Vec::new();
    // Scanning from the top makes the first vertex of each component its max.
    for start in (0..n).rev() {
        if mask[start] || cid[start].is_some() {
            continue;
        }
        let id = start as Vertex;
        cid[start] = Some(id);
        queue.push_back(id);
        members.clear();
        while let Some(x) = queue.pop_front() {
            members.push(x);
            for &y in g.neighbors(x) {
                if !mask[y as usize] && cid[y as usize].is_none() {
                    cid[y as usize] = Some(id);
                    queue.push_back(y);
                }
            }
        }
    }
    cid
}

/// Vertices reachable from `start` in `G ∖ blocked`. The start vertex itself
/// is always reached, even if blocked.
pub fn reach_from(g: &Graph, start: Vertex, blocked: &[bool]) -> Vec<bool> {
    let mut seen = vec![false; g.n()];
    let mut stack = vec![start];
    seen[start as usize] = true;
    while let Some(x) = stack.pop() {
        for &y in g.neighbors(x) {
            if !blocked[y as usize] && !seen[y as usize] {
                seen[y as usize] = true;
                stack.push(y);
            }
        }
    }
    seen
}

/// Brute-force answer to "are `u` and `v` connected in `G ∖ F`?".
pub fn oracle_connected(g: &Graph, u: Vertex, v: Vertex, faults: &[Vertex]) -> Result<bool, GraphError> {
    for &w in faults.iter().chain([&u, &v]) {
        g.check_vertex(w as u64)?;
    }
    if faults.contains(&u) || faults.contains(&v) {
        return Ok(false);
    }
    if u == v {
        return Ok(true);
    }
    let blocked = mask_of(g.n(), faults);
    Ok(reach_from(g, u, &blocked)[v as usize])
}

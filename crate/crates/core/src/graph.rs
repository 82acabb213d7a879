//! Simple undirected graphs with stable integer vertex ids.

use std::collections::{BTreeSet, VecDeque};

use thiserror::Error;

/// A vertex id, always in `0..num_vertices`.
pub type Vertex = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("self-loop at vertex {0}")]
    SelfLoop(Vertex),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(Vertex, Vertex),
    #[error("edge ({u}, {v}) has an endpoint outside 0..{n}")]
    OutOfRange { u: Vertex, v: Vertex, n: usize },
    #[error("graph is not a tree")]
    NotTree,
    #[error("vertex {0} does not belong to the graph")]
    NoSuchVertex(Vertex),
}

/// An immutable simple undirected graph.
///
/// Edges are stored normalized (`u < v`) and sorted, so two graphs built from
/// the same edge set compare equal regardless of input order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    edges: Vec<(Vertex, Vertex)>,
    adj: Vec<Vec<Vertex>>,
}

impl Graph {
    pub fn new(n: usize, edges: &[(Vertex, Vertex)]) -> Result<Self, GraphError> {
        let mut seen = BTreeSet::new();
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(GraphError::OutOfRange { u, v, n });
            }
            if u == v {
                return Err(GraphError::SelfLoop(u));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(GraphError::DuplicateEdge(u, v));
            }
        }
        let edges: Vec<_> = seen.into_iter().collect();
        let mut adj = vec![Vec::new(); n];
        for &(u, v) in &edges {
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort_unstable();
        }
        Ok(Self { n, edges, adj })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// Sorted, normalized edge list.
    pub fn edges(&self) -> &[(Vertex, Vertex)] {
        &self.edges
    }

    pub fn neighbors(&self, v: Vertex) -> &[Vertex] {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        u < self.n && self.adj[u].binary_search(&v).is_ok()
    }

    pub fn vertices(&self) -> std::ops::Range<Vertex> {
        0..self.n
    }

    /// Connected components as sorted vertex lists, ordered by smallest member.
    pub fn components(&self) -> Vec<Vec<Vertex>> {
        let mut comp = vec![usize::MAX; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if comp[s] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![s];
            comp[s] = id;
            let mut i = 0;
            while i < members.len() {
                let u = members[i];
                i += 1;
                for &w in &self.adj[u] {
                    if comp[w] == usize::MAX {
                        comp[w] = id;
                        members.push(w);
                    }
                }
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.n > 0 && self.components().len() == 1
    }

    /// Two-coloring if the graph is bipartite. Each component's smallest
    /// vertex gets side `false`.
    pub fn bipartition(&self) -> Option<Vec<bool>> {
        let mut side = vec![None; self.n];
        for s in 0..self.n {
            if side[s].is_some() {
                continue;
            }
            side[s] = Some(false);
            let mut queue = VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let su = side[u].unwrap();
                for &w in &self.adj[u] {
                    match side[w] {
                        None => {
                            side[w] = Some(!su);
                            queue.push_back(w);
                        }
                        Some(sw) if sw == su => return None,
                        _ => {}
                    }
                }
            }
        }
        Some(side.into_iter().map(Option::unwrap).collect())
    }

    /// BFS distances from `s`; unreachable vertices get `usize::MAX`.
    pub fn distances(&self, s: Vertex) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &w in &self.adj[u] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// The subgraph induced by `keep`, with vertices renumbered in the order
    /// given. Returns the graph and the new-to-old id map.
    pub fn induced(&self, keep: &[Vertex]) -> (Graph, Vec<Vertex>) {
        let mut index = vec![usize::MAX; self.n];
        for (i, &v) in keep.iter().enumerate() {
            index[v] = i;
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .filter(|&&(u, v)| index[u] != usize::MAX && index[v] != usize::MAX)
            .map(|&(u, v)| (index[u], index[v]))
            .collect();
        let g = Graph::new(keep.len(), &edges).expect("induced subgraph of a simple graph");
        (g, keep.to_vec())
    }

    /// Relabel vertices: vertex `v` becomes `map[v]`. `map` must be a
    /// permutation of `0..n`.
    pub fn permuted(&self, map: &[Vertex]) -> Graph {
        let edges: Vec<_> = self.edges.iter().map(|&(u, v)| (map[u], map[v])).collect();
        Graph::new(self.n, &edges).expect("permutation preserves simplicity")
    }
}

/// True iff `g` is connected with exactly `n - 1` edges.
pub fn is_tree(g: &Graph) -> bool {
    g.num_vertices() > 0 && g.num_edges() + 1 == g.num_vertices() && g.is_connected()
}

pub(crate) fn require_tree(g: &Graph) -> Result<(), GraphError> {
    if is_tree(g) {
        Ok(())
    } else {
        Err(GraphError::NotTree)
    }
}

/// A longest path in a tree, as a vertex sequence. Ties broken towards
/// smaller ids via BFS order.
pub fn diameter_path(t: &Graph) -> Vec<Vertex> {
    if t.num_vertices() == 0 {
        return Vec::new();
    }
    let far = |s: Vertex| {
        let d = t.distances(s);
        let mut best = s;
        for v in t.vertices() {
            if d[v] != usize::MAX && d[v] > d[best] {
                best = v;
            }
        }
        best
    };
    let a = far(0);
    let b = far(a);
    path_between(t, a, b)
}

/// The unique path between two vertices of a tree.
pub fn path_between(t: &Graph, a: Vertex, b: Vertex) -> Vec<Vertex> {
    let mut parent = vec![usize::MAX; t.num_vertices()];
    parent[a] = a;
    let mut queue = VecDeque::from([a]);
    while let Some(u) = queue.pop_front() {
        for &w in t.neighbors(u) {
            if parent[w] == usize::MAX {
                parent[w] = u;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![b];
    let mut cur = b;
    while cur != a {
        cur = parent[cur];
        path.push(cur);
    }
    path.reverse();
    path
}

pub fn diameter(t: &Graph) -> usize {
    diameter_path(t).len().saturating_sub(1)
}

pub fn path_graph(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::new(n, &edges).unwrap()
}

pub fn star_graph(leaves: usize) -> Graph {
    let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
    Graph::new(leaves + 1, &edges).unwrap()
}

pub fn cycle_graph(n: usize) -> Graph {
    let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
    Graph::new(n, &edges).unwrap()
}

pub fn complete_graph(n: usize) -> Graph {
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            edges.push((u, v));
        }
    }
    Graph::new(n, &edges).unwrap()
}

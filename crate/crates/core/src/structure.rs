//! Bases, caterpillars, lobsters and the spine/lobe/branch decomposition.

use serde::Serialize;
use thiserror::Error;

use crate::graph::{diameter_path, require_tree, Graph, GraphError, Vertex};

/// A subgraph together with the ids its vertices had in the parent graph.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Subtree {
    pub graph: Graph,
    /// `ids[i]` is the parent-graph id of vertex `i`.
    pub ids: Vec<Vertex>,
}

/// The tree left after deleting every degree-one vertex.
///
/// K1 has no pendant vertex and is its own base; K2 loses both vertices.
pub fn base(t: &Graph) -> Result<Subtree, GraphError> {
    require_tree(t)?;
    let keep: Vec<_> = t.vertices().filter(|&v| t.degree(v) != 1).collect();
    let (graph, ids) = t.induced(&keep);
    Ok(Subtree { graph, ids })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TreeClass {
    SingleVertex,
    Path,
    Caterpillar,
    Lobster,
    Deeper,
}

fn is_path_or_smaller(g: &Graph) -> bool {
    g.num_vertices() <= 1 || g.vertices().all(|v| g.degree(v) <= 2)
}

/// Smallest class in single-vertex ⊂ path ⊂ caterpillar ⊂ lobster.
pub fn classify_tree(t: &Graph) -> Result<TreeClass, GraphError> {
    require_tree(t)?;
    if t.num_vertices() == 1 {
        return Ok(TreeClass::SingleVertex);
    }
    if is_path_or_smaller(t) {
        return Ok(TreeClass::Path);
    }
    let b = base(t)?.graph;
    if is_path_or_smaller(&b) {
        return Ok(TreeClass::Caterpillar);
    }
    let bb = base(&b)?.graph;
    if is_path_or_smaller(&bb) {
        Ok(TreeClass::Lobster)
    } else {
        Ok(TreeClass::Deeper)
    }
}

/// A star hanging off a spinal vertex: center adjacent to the spine, plus
/// its leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Branch {
    pub center: Vertex,
    pub leaves: Vec<Vertex>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lobe {
    pub spinal: Vertex,
    /// Branches with at least one leaf.
    pub branches: Vec<Branch>,
    /// Leaves attached directly to the spinal vertex.
    pub pendants: Vec<Vertex>,
}

impl Lobe {
    /// Degree of the spinal vertex inside its reduced lobe.
    pub fn reduced_degree(&self) -> usize {
        self.branches.len()
    }

    /// Leaf counts of the branches, sorted ascending.
    pub fn branch_sizes(&self) -> Vec<usize> {
        let mut sizes: Vec<_> = self.branches.iter().map(|b| b.leaves.len()).collect();
        sizes.sort_unstable();
        sizes
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LobsterError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("tree is deeper than a lobster")]
    Deeper,
}

/// Spine, lobes, branches and pendants of a lobster.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Lobster {
    #[serde(skip)]
    pub tree: Graph,
    pub spine: Vec<Vertex>,
    pub lobes: Vec<Lobe>,
}

impl Lobster {
    pub fn len(&self) -> usize {
        self.spine.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spine.is_empty()
    }

    pub fn pendant_counts(&self) -> Vec<usize> {
        self.lobes.iter().map(|l| l.pendants.len()).collect()
    }

    /// The same lobster read from the other end of the spine.
    pub fn reversed(&self) -> Lobster {
        let mut out = self.clone();
        out.spine.reverse();
        out.lobes.reverse();
        out
    }

    /// Rebuild the edge set from spine, lobes and pendants.
    pub fn reassemble(&self) -> Graph {
        let mut edges = Vec::new();
        for w in self.spine.windows(2) {
            edges.push((w[0], w[1]));
        }
        for lobe in &self.lobes {
            for &p in &lobe.pendants {
                edges.push((lobe.spinal, p));
            }
            for b in &lobe.branches {
                edges.push((lobe.spinal, b.center));
                for &l in &b.leaves {
                    edges.push((b.center, l));
                }
            }
        }
        Graph::new(self.tree.num_vertices(), &edges).expect("decomposition of a simple graph")
    }

    /// The reduced lobe at spine position `i`, rooted at its spinal vertex
    /// (local id 0).
    pub fn reduced_lobe(&self, i: usize) -> Subtree {
        self.lobe_subtree(i, 0)
    }

    /// The reduced lobe plus the first `extra_pendants` pendants.
    pub fn lobe_subtree(&self, i: usize, extra_pendants: usize) -> Subtree {
        let lobe = &self.lobes[i];
        let mut ids = vec![lobe.spinal];
        let mut edges = Vec::new();
        for b in &lobe.branches {
            let c = ids.len();
            ids.push(b.center);
            edges.push((0, c));
            for &l in &b.leaves {
                edges.push((c, ids.len()));
                ids.push(l);
            }
        }
        for &p in lobe.pendants.iter().take(extra_pendants) {
            edges.push((0, ids.len()));
            ids.push(p);
        }
        Subtree {
            graph: Graph::new(ids.len(), &edges).unwrap(),
            ids,
        }
    }

    /// The lobster with every pendant removed, ids renumbered.
    pub fn without_pendants(&self) -> Subtree {
        let mut keep = Vec::new();
        for lobe in &self.lobes {
            keep.push(lobe.spinal);
            for b in &lobe.branches {
                keep.push(b.center);
                keep.extend(&b.leaves);
            }
        }
        keep.sort_unstable();
        let (graph, ids) = self.tree.induced(&keep);
        Subtree { graph, ids }
    }
}

/// Split a lobster (or caterpillar, or path) into spine and lobes.
///
/// The spine is the base of the base when that has at least two vertices.
/// Otherwise it is a longest path in the base, or the single base vertex.
pub fn lobster_decompose(t: &Graph) -> Result<Lobster, LobsterError> {
    if classify_tree(t)? == TreeClass::Deeper {
        return Err(LobsterError::Deeper);
    }
    let spine = choose_spine(t)?;
    let mut on_spine = vec![false; t.num_vertices()];
    for &v in &spine {
        on_spine[v] = true;
    }
    let mut lobes = Vec::with_capacity(spine.len());
    let mut covered = spine.len();
    for &v in &spine {
        let mut lobe = Lobe {
            spinal: v,
            branches: Vec::new(),
            pendants: Vec::new(),
        };
        for &w in t.neighbors(v) {
            if on_spine[w] {
                continue;
            }
            if t.degree(w) == 1 {
                lobe.pendants.push(w);
                covered += 1;
                continue;
            }
            let leaves: Vec<_> = t.neighbors(w).iter().copied().filter(|&l| l != v).collect();
            if leaves.iter().any(|&l| t.degree(l) != 1) {
                return Err(LobsterError::Deeper);
            }
            covered += 1 + leaves.len();
            lobe.branches.push(Branch { center: w, leaves });
        }
        lobes.push(lobe);
    }
    if covered != t.num_vertices() {
        return Err(LobsterError::Deeper);
    }
    Ok(Lobster {
        tree: t.clone(),
        spine,
        lobes,
    })
}

fn choose_spine(t: &Graph) -> Result<Vec<Vertex>, GraphError> {
    if t.num_vertices() <= 2 {
        return Ok(vec![0]);
    }
    let b = base(t)?;
    if b.graph.num_vertices() == 1 {
        return Ok(vec![b.ids[0]]);
    }
    let bb = base(&b.graph)?;
    let local: Vec<Vertex> = if bb.graph.num_vertices() >= 2 {
        let path = diameter_path(&bb.graph);
        path.into_iter().map(|v| bb.ids[v]).collect()
    } else {
        diameter_path(&b.graph)
    };
    let mut spine: Vec<Vertex> = local.into_iter().map(|v| b.ids[v]).collect();
    if spine.first() > spine.last() {
        spine.reverse();
    }
    Ok(spine)
}

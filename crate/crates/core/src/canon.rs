//! AHU-style canonical codes for rooted and free trees.

use std::collections::HashMap;

use crate::graph::{require_tree, Graph, GraphError, Vertex};

/// Canonical code of a (rooted or free) tree. Equal codes iff isomorphic.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TreeCanonicalForm {
    pub code: String,
}

/// Parent pointers and a preorder for the part of `g` reachable from `root`
/// without passing through `blocked`.
fn rooted_order(g: &Graph, root: Vertex, blocked: Option<Vertex>) -> (Vec<Vertex>, Vec<Option<Vertex>>) {
    let mut parent = vec![None; g.num_vertices()];
    let mut seen = vec![false; g.num_vertices()];
    seen[root] = true;
    if let Some(b) = blocked {
        seen[b] = true;
    }
    let mut order = vec![root];
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        for &w in g.neighbors(u) {
            if !seen[w] {
                seen[w] = true;
                parent[w] = Some(u);
                order.push(w);
            }
        }
    }
    (order, parent)
}

/// Codes for every vertex reachable from `root` (avoiding `blocked`),
/// each describing the subtree hanging below it.
fn subtree_codes(g: &Graph, root: Vertex, blocked: Option<Vertex>) -> (Vec<Vertex>, Vec<Option<Vertex>>, HashMap<Vertex, String>) {
    let (order, parent) = rooted_order(g, root, blocked);
    let mut children: HashMap<Vertex, Vec<String>> = HashMap::new();
    let mut codes = HashMap::with_capacity(order.len());
    for &v in order.iter().rev() {
        let mut kids = children.remove(&v).unwrap_or_default();
        kids.sort_unstable();
        let mut code = String::with_capacity(2 + kids.iter().map(String::len).sum::<usize>());
        code.push('(');
        for k in &kids {
            code.push_str(k);
        }
        code.push(')');
        if let Some(p) = parent[v] {
            children.entry(p).or_default().push(code.clone());
        }
        codes.insert(v, code);
    }
    (order, parent, codes)
}

/// Code of the subtree of `g` rooted at `root`, ignoring the side containing
/// `blocked`. `g` may be any graph; only the acyclic region reached matters.
pub fn rooted_code_in(g: &Graph, root: Vertex, blocked: Option<Vertex>) -> TreeCanonicalForm {
    let (_, _, mut codes) = subtree_codes(g, root, blocked);
    TreeCanonicalForm {
        code: codes.remove(&root).unwrap(),
    }
}

pub fn rooted_code(t: &Graph, root: Vertex) -> Result<TreeCanonicalForm, GraphError> {
    require_tree(t)?;
    if root >= t.num_vertices() {
        return Err(GraphError::NoSuchVertex(root));
    }
    Ok(rooted_code_in(t, root, None))
}

/// One or two centroids of a tree.
pub fn centroids(t: &Graph) -> Vec<Vertex> {
    let n = t.num_vertices();
    let (order, parent) = rooted_order(t, 0, None);
    let mut size = vec![1usize; n];
    for &v in order.iter().rev() {
        if let Some(p) = parent[v] {
            size[p] += size[v];
        }
    }
    let mut out = Vec::new();
    for v in 0..n {
        let mut heaviest = n - size[v];
        for &w in t.neighbors(v) {
            if parent[w] == Some(v) {
                heaviest = heaviest.max(size[w]);
            }
        }
        if 2 * heaviest <= n {
            out.push(v);
        }
    }
    out
}

/// Free-tree code: the smallest rooted code over the centroids.
pub fn free_code(t: &Graph) -> Result<TreeCanonicalForm, GraphError> {
    require_tree(t)?;
    Ok(centroids(t)
        .into_iter()
        .map(|c| rooted_code_in(t, c, None))
        .min()
        .unwrap())
}

/// Isomorphism test for trees, rooted when `roots` is given.
pub fn tree_isomorphic(t1: &Graph, t2: &Graph, roots: Option<(Vertex, Vertex)>) -> Result<bool, GraphError> {
    match roots {
        Some((r1, r2)) => Ok(rooted_code(t1, r1)? == rooted_code(t2, r2)?),
        None => Ok(free_code(t1)? == free_code(t2)?),
    }
}

/// An explicit isomorphism `t1 -> t2` (vertex map indexed by `t1` ids),
/// rooted when `roots` is given.
pub fn tree_isomorphism(t1: &Graph, t2: &Graph, roots: Option<(Vertex, Vertex)>) -> Result<Option<Vec<Vertex>>, GraphError> {
    require_tree(t1)?;
    require_tree(t2)?;
    if t1.num_vertices() != t2.num_vertices() {
        return Ok(None);
    }
    let (r1, r2) = match roots {
        Some(pair) => pair,
        None => {
            let c1 = centroids(t1);
            let code1 = free_code(t1)?;
            let r1 = *c1
                .iter()
                .find(|&&c| rooted_code_in(t1, c, None) == code1)
                .unwrap();
            let c2 = centroids(t2);
            let Some(&r2) = c2.iter().find(|&&c| rooted_code_in(t2, c, None) == code1) else {
                return Ok(None);
            };
            (r1, r2)
        }
    };
    if r1 >= t1.num_vertices() {
        return Err(GraphError::NoSuchVertex(r1));
    }
    if r2 >= t2.num_vertices() {
        return Err(GraphError::NoSuchVertex(r2));
    }
    Ok(rooted_map(t1, r1, None, t2, r2, None))
}

/// Map the subtree of `g1` at `r1` (avoiding `b1`) onto that of `g2` at `r2`
/// (avoiding `b2`). The result is indexed by `g1` vertex; unmapped entries
/// hold `usize::MAX`.
pub fn rooted_map(
    g1: &Graph,
    r1: Vertex,
    b1: Option<Vertex>,
    g2: &Graph,
    r2: Vertex,
    b2: Option<Vertex>,
) -> Option<Vec<Vertex>> {
    let (_, p1, codes1) = subtree_codes(g1, r1, b1);
    let (_, p2, codes2) = subtree_codes(g2, r2, b2);
    if codes1[&r1] != codes2[&r2] {
        return None;
    }
    let mut map = vec![usize::MAX; g1.num_vertices()];
    let mut stack = vec![(r1, r2)];
    while let Some((u, w)) = stack.pop() {
        map[u] = w;
        let mut kids1: Vec<_> = g1
            .neighbors(u)
            .iter()
            .copied()
            .filter(|&c| p1[c] == Some(u))
            .collect();
        let mut kids2: Vec<_> = g2
            .neighbors(w)
            .iter()
            .copied()
            .filter(|&c| p2[c] == Some(w))
            .collect();
        kids1.sort_by(|a, b| codes1[a].cmp(&codes1[b]).then(a.cmp(b)));
        kids2.sort_by(|a, b| codes2[a].cmp(&codes2[b]).then(a.cmp(b)));
        for (a, b) in kids1.into_iter().zip(kids2) {
            stack.push((a, b));
        }
    }
    Some(map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, star_graph};

    #[test]
    fn rooted_path_ends_differ_from_middle() {
        let p3 = path_graph(3);
        assert!(!tree_isomorphic(&p3, &p3, Some((0, 1))).unwrap());
        assert!(tree_isomorphic(&p3, &p3, Some((0, 2))).unwrap());
    }

    #[test]
    fn star_vs_path() {
        assert!(!tree_isomorphic(&star_graph(3), &path_graph(4), None).unwrap());
        assert!(tree_isomorphic(&path_graph(2), &path_graph(2), None).unwrap());
    }

    #[test]
    fn non_tree_rejected() {
        let c = crate::graph::cycle_graph(4);
        assert_eq!(free_code(&c), Err(GraphError::NotTree));
    }

    #[test]
    fn explicit_map_preserves_edges() {
        let t1 = Graph::new(6, &[(0, 1), (1, 2), (1, 3), (3, 4), (3, 5)]).unwrap();
        let t2 = Graph::new(6, &[(5, 4), (4, 3), (4, 2), (2, 1), (2, 0)]).unwrap();
        let map = tree_isomorphism(&t1, &t2, None).unwrap().unwrap();
        for &(u, v) in t1.edges() {
            assert!(t2.has_edge(map[u], map[v]));
        }
    }
}

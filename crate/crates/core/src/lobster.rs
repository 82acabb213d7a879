//! Lobster classes and the labelings the constructions give them.
//!
//! Pipelines build the pendant-free part of a lobster with the matrix
//! constructions, map it onto the input tree through a tree isomorphism,
//! then add pendants one matrix insertion at a time. The final labeling is
//! checked against the input edge set, not just up to isomorphism.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::canon::tree_isomorphism;
use crate::construct::{chain_join_km, chain_with_copies, double, merge_join_chain, Certificate, ConstructError, Construction, Origin};
use crate::graph::{diameter, diameter_path, is_tree, Graph, GraphError, Vertex};
use crate::labeling::{verify, verify_alpha, Failure, Label, LabelKind, Labeling};
use crate::matrix::{
    canonical_adjacency, canonical_biadjacency, insert_pendant_adjacent, insert_pendant_column, insert_pendant_row,
    is_completely_graceful, matrix_to_graph, LabeledMatrix, MatrixError, MatrixKind,
};
use crate::search::{brute_force_alpha, brute_force_graceful, graceful_tree_with_pins, BudgetLimit, SearchBudget, SearchOutcome};
use crate::structure::{classify_tree, lobster_decompose, Lobster, LobsterError, Subtree, TreeClass};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum PipelineError {
    #[error(transparent)]
    Lobster(#[from] LobsterError),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("wrong shape: {0}")]
    WrongShape(String),
    #[error("not a caterpillar")]
    NotCaterpillar,
    #[error("balanced spec needs as many y values as x values ({x} vs {y})")]
    SpecLength { x: usize, y: usize },
    #[error("leaf count {side}_{index} is zero")]
    ZeroLeaves { side: char, index: usize },
    #[error("unbalanced: {0}")]
    Unbalanced(Imbalance),
    #[error("clause ({clause}) needs an {parity} index, got {index}")]
    Parity { clause: Clause, parity: &'static str, index: usize },
    #[error("index {index} outside 1..={r}")]
    IndexRange { index: usize, r: usize },
    #[error("reduced lobes {pair} and {next} are not isomorphic", next = pair + 1)]
    NotPairwiseSimilar { pair: usize },
    #[error("spinal vertex {index} (vertex {vertex}) is essentially even with no pendant")]
    EvenWithoutPendant { index: usize, vertex: Vertex },
    #[error("no pairwise-linked decomposition: {reason}")]
    NoDecomposition { reason: String },
    #[error("piece {piece} has no graceful labeling with its center maximum")]
    NoCenterMax { piece: usize },
    #[error("pairwise balanced needs an even spine, got {len}")]
    OddSpine { len: usize },
    #[error("spinal pair {pair} is not balanced: {reason}")]
    UnbalancedPair { pair: usize, reason: String },
    #[error("no insertion position keeps the matrix completely graceful for a pendant at vertex {vertex}")]
    PendantInsertion { vertex: Vertex },
    #[error("search stopped: {0}")]
    Search(BudgetLimit),
    #[error("construction does not reproduce the lobster: {0}")]
    Structure(String),
    #[error("verification failed: {0}")]
    Verification(Failure),
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    EssentiallyOdd,
    EssentiallyEven,
    /// The reduced lobe is the spinal vertex alone.
    Bare,
}

impl fmt::Display for Parity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Parity::EssentiallyOdd => "essentially-odd",
            Parity::EssentiallyEven => "essentially-even",
            Parity::Bare => "bare",
        })
    }
}

/// Parity of each spinal vertex's degree in its reduced lobe.
pub fn spinal_parity(l: &Lobster) -> Vec<Parity> {
    l.lobes
        .iter()
        .map(|lobe| match lobe.reduced_degree() {
            0 => Parity::Bare,
            d if d % 2 == 1 => Parity::EssentiallyOdd,
            _ => Parity::EssentiallyEven,
        })
        .collect()
}

/// The first violated balance condition: `side` is `'x'` or `'y'`, the
/// sequence whose entry at the 1-based `index` is constrained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Imbalance {
    pub side: char,
    pub index: usize,
}

impl fmt::Display for Imbalance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let a = self.side;
        let b = if a == 'x' { 'y' } else { 'x' };
        let i = self.index;
        if i % 2 == 1 {
            write!(f, "{a} balance fails at i={i}: {a}_{i} must equal {b}_(r-{})", (i - 1) / 2)
        } else {
            write!(f, "{a} balance fails at i={i}: {a}_{i} must equal {a}_{}", i / 2)
        }
    }
}

/// The two-spine lobster with `r` branches on each side: `x_i` leaves on
/// the i-th branch at `v_1`, `y_j` on the j-th at `v_2`, and `s1`, `s2`
/// pendants at `v_1`, `v_2`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BalancedLobsterSpec {
    pub x: Vec<usize>,
    pub y: Vec<usize>,
    pub s1: usize,
    pub s2: usize,
}

/// Vertices of the built spec tree that callers care about.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SpecVertices {
    pub v1: Vertex,
    pub v2: Vertex,
    pub k: Label,
}

impl BalancedLobsterSpec {
    pub fn new(x: Vec<usize>, y: Vec<usize>, s1: usize, s2: usize) -> Self {
        Self { x, y, s1, s2 }
    }

    /// Build a balanced spec from one value per class of [`balance_classes`].
    pub fn from_class_values(r: usize, values: &[usize], s1: usize, s2: usize) -> Self {
        let mut x = vec![0; r];
        let mut y = vec![0; r];
        for ((xs, ys), &v) in balance_classes(r).iter().zip(values) {
            for &i in xs {
                x[i] = v;
            }
            for &j in ys {
                y[j] = v;
            }
        }
        Self { x, y, s1, s2 }
    }

    pub fn r(&self) -> usize {
        self.x.len()
    }

    pub fn check_shape(&self) -> Result<(), PipelineError> {
        if self.x.len() != self.y.len() {
            return Err(PipelineError::SpecLength {
                x: self.x.len(),
                y: self.y.len(),
            });
        }
        for (side, v) in [('x', &self.x), ('y', &self.y)] {
            if let Some(i) = v.iter().position(|&c| c == 0) {
                return Err(PipelineError::ZeroLeaves { side, index: i + 1 });
            }
        }
        Ok(())
    }

    /// The first violated condition, checking x before y. Assumes equal
    /// lengths.
    pub fn imbalance(&self) -> Option<Imbalance> {
        let r = self.r();
        for (side, a, b) in [('x', &self.x, &self.y), ('y', &self.y, &self.x)] {
            for i in 1..=r {
                let want = if i % 2 == 1 { b[r - (i - 1) / 2 - 1] } else { a[i / 2 - 1] };
                if a[i - 1] != want {
                    return Some(Imbalance { side, index: i });
                }
            }
        }
        None
    }

    pub fn is_balanced(&self) -> bool {
        self.x.len() == self.y.len() && self.imbalance().is_none()
    }

    pub fn is_trivially_balanced(&self) -> bool {
        self.x.len() == self.y.len() && self.x.iter().chain(&self.y).all(|&v| Some(&v) == self.x.first())
    }

    pub fn expected_k(&self) -> Label {
        self.s1 + self.r() + self.y.iter().sum::<usize>()
    }

    pub fn expected_m(&self) -> Label {
        self.s1 + self.s2 + 2 * self.r() + 1 + self.x.iter().chain(&self.y).sum::<usize>()
    }

    /// The lobster with every vertex id equal to its label in the
    /// explicit ordering: rows `γ_1*`, then `u_1(r-j)` followed by the
    /// leaves `β_(j+1)*`, then `v_2`; columns `γ_2*`, then `u_2(r-j)`
    /// followed by `α_(j+1)*`, then `v_1`.
    pub fn tree(&self) -> (Graph, SpecVertices) {
        let r = self.r();
        let mut next = 0;
        let mut fresh = || {
            next += 1;
            next - 1
        };
        let gamma1: Vec<Vertex> = (0..self.s1).map(|_| fresh()).collect();
        let mut u1 = vec![0; r];
        let mut beta = vec![Vec::new(); r];
        for j in 0..r {
            u1[r - 1 - j] = fresh();
            beta[j] = (0..self.y[j]).map(|_| fresh()).collect();
        }
        let v2 = fresh();
        let gamma2: Vec<Vertex> = (0..self.s2).map(|_| fresh()).collect();
        let mut u2 = vec![0; r];
        let mut alpha = vec![Vec::new(); r];
        for j in 0..r {
            u2[r - 1 - j] = fresh();
            alpha[j] = (0..self.x[j]).map(|_| fresh()).collect();
        }
        let v1 = fresh();
        let n = v1 + 1;
        let mut edges = vec![(v1, v2)];
        edges.extend(gamma1.iter().map(|&g| (g, v1)));
        edges.extend(gamma2.iter().map(|&g| (v2, g)));
        for i in 0..r {
            edges.push((u1[i], v1));
            edges.extend(alpha[i].iter().map(|&a| (u1[i], a)));
            edges.push((v2, u2[i]));
            edges.extend(beta[i].iter().map(|&b| (b, u2[i])));
        }
        let g = Graph::new(n, &edges).expect("spec tree is simple");
        (g, SpecVertices { v1, v2, k: v2 })
    }
}

/// Position classes forced equal by the balance equations, as 0-based
/// `(x positions, y positions)`, ordered by smallest member.
pub fn balance_classes(r: usize) -> Vec<(Vec<usize>, Vec<usize>)> {
    let mut parent: Vec<usize> = (0..2 * r).collect();
    fn find(p: &mut [usize], a: usize) -> usize {
        let mut a = a;
        while p[a] != a {
            p[a] = p[p[a]];
            a = p[a];
        }
        a
    }
    let mut union = |a: usize, b: usize| {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        parent[ra.max(rb)] = ra.min(rb);
    };
    for i in 1..=r {
        if i % 2 == 1 {
            let j = r - (i - 1) / 2 - 1;
            union(i - 1, r + j);
            union(r + i - 1, j);
        } else {
            union(i - 1, i / 2 - 1);
            union(r + i - 1, r + i / 2 - 1);
        }
    }
    let mut classes: Vec<(usize, Vec<usize>, Vec<usize>)> = Vec::new();
    for p in 0..2 * r {
        let root = find(&mut parent, p);
        let idx = match classes.iter().position(|c| c.0 == root) {
            Some(i) => i,
            None => {
                classes.push((root, Vec::new(), Vec::new()));
                classes.len() - 1
            }
        };
        if p < r {
            classes[idx].1.push(p);
        } else {
            classes[idx].2.push(p - r);
        }
    }
    classes.into_iter().map(|(_, xs, ys)| (xs, ys)).collect()
}

/// Orderings of two leaf-count multisets that satisfy the balance
/// equations, if any exist. Values are tried in ascending order per class.
pub fn balanced_orderings(xs: &[usize], ys: &[usize]) -> Option<BalancedLobsterSpec> {
    if xs.len() != ys.len() {
        return None;
    }
    let r = xs.len();
    let classes = balance_classes(r);
    let mut pool_x: Vec<usize> = xs.to_vec();
    let mut pool_y: Vec<usize> = ys.to_vec();
    let mut values = vec![0; classes.len()];
    fn take(pool: &mut Vec<usize>, v: usize, n: usize) -> bool {
        if pool.iter().filter(|&&p| p == v).count() < n {
            return false;
        }
        for _ in 0..n {
            let i = pool.iter().position(|&p| p == v).unwrap();
            pool.swap_remove(i);
        }
        true
    }
    fn go(c: usize, classes: &[(Vec<usize>, Vec<usize>)], px: &mut Vec<usize>, py: &mut Vec<usize>, values: &mut [usize]) -> bool {
        if c == classes.len() {
            return true;
        }
        let (a, b) = (classes[c].0.len(), classes[c].1.len());
        let mut candidates: Vec<usize> = px.iter().chain(py.iter()).copied().collect();
        candidates.sort_unstable();
        candidates.dedup();
        for v in candidates {
            let (sx, sy) = (px.clone(), py.clone());
            if take(px, v, a) && take(py, v, b) {
                values[c] = v;
                if go(c + 1, classes, px, py, values) {
                    return true;
                }
            }
            *px = sx;
            *py = sy;
        }
        false
    }
    go(0, &classes, &mut pool_x, &mut pool_y, &mut values).then(|| BalancedLobsterSpec::from_class_values(r, &values, 0, 0))
}

/// The explicit complete alpha-labeling of a balanced spec, with `v_2` at
/// the critical number and `v_1` at the maximum.
pub fn label_balanced_lobster(spec: &BalancedLobsterSpec) -> Result<Certificate, PipelineError> {
    spec.check_shape()?;
    if let Some(bad) = spec.imbalance() {
        return Err(PipelineError::Unbalanced(bad));
    }
    let (graph, at) = spec.tree();
    let n = graph.num_vertices();
    let labeling = Labeling::alpha((0..n).collect(), at.k);
    let verdict = verify_alpha(&graph, &labeling);
    if let Some(failure) = verdict.failure {
        return Err(PipelineError::Verification(failure));
    }
    let matrix = canonical_biadjacency(&graph, &labeling)?;
    let list = |v: &[usize]| v.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(",");
    let cert = Certificate {
        construction: Construction::BalancedLobster,
        inputs: Vec::new(),
        parameters: vec![
            ("r".into(), spec.r().to_string()),
            ("x".into(), list(&spec.x)),
            ("y".into(), list(&spec.y)),
            ("s1".into(), spec.s1.to_string()),
            ("s2".into(), spec.s2.to_string()),
        ],
        graph,
        labeling,
        matrix,
        origins: vec![vec![Origin::New]; n],
        label_bound: n - 1,
    };
    cert.check()?;
    Ok(cert)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Clause {
    I,
    Ii,
    Iii,
    Iv,
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Clause::I => "i",
            Clause::Ii => "ii",
            Clause::Iii => "iii",
            Clause::Iv => "iv",
        })
    }
}

/// Both sides of one of the four prefix-sum identities that balanced specs
/// satisfy. Clauses i and ii take an odd index, iii and iv an even one.
pub fn lemma_pb1_sums(spec: &BalancedLobsterSpec, index: usize, clause: Clause) -> Result<(usize, usize), PipelineError> {
    spec.check_shape()?;
    let r = spec.r();
    if !(1..=r).contains(&index) {
        return Err(PipelineError::IndexRange { index, r });
    }
    let odd = matches!(clause, Clause::I | Clause::Ii);
    if (index % 2 == 1) != odd {
        return Err(PipelineError::Parity {
            clause,
            parity: if odd { "odd" } else { "even" },
            index,
        });
    }
    // 1-based inclusive range sum.
    let sum = |v: &[usize], from: usize, to: usize| v[from - 1..to].iter().sum::<usize>();
    let (a, b) = match clause {
        Clause::I | Clause::Iii => (&spec.x, &spec.y),
        Clause::Ii | Clause::Iv => (&spec.y, &spec.x),
    };
    Ok(if odd {
        (sum(a, index.div_ceil(2), index), sum(b, r - (index - 1) / 2, r))
    } else {
        (sum(a, index / 2 + 1, index), sum(b, r - index / 2 + 1, r))
    })
}

/// The classic alpha-labeling of a caterpillar: breadth-first from one end
/// of a longest path (the next spine vertex last among each vertex's
/// children), one side labeled upwards from 0, the other downwards from m.
/// Stars start from their center.
pub fn label_caterpillar(t: &Graph) -> Result<Labeling, PipelineError> {
    match classify_tree(t)? {
        TreeClass::SingleVertex => return Ok(Labeling::alpha(vec![0], 0)),
        TreeClass::Path | TreeClass::Caterpillar => {}
        _ => return Err(PipelineError::NotCaterpillar),
    }
    let n = t.num_vertices();
    let mut path = diameter_path(t);
    if path.last() < path.first() {
        path.reverse();
    }
    let mut next_on_path = vec![None; n];
    for w in path.windows(2) {
        next_on_path[w[0]] = Some(w[1]);
    }
    let start = t.vertices().find(|&v| n >= 3 && t.degree(v) == n - 1).unwrap_or(path[0]);
    let mut order = vec![start];
    let mut depth = vec![usize::MAX; n];
    depth[start] = 0;
    let mut i = 0;
    while i < order.len() {
        let u = order[i];
        i += 1;
        let mut kids: Vec<Vertex> = t.neighbors(u).iter().copied().filter(|&w| depth[w] == usize::MAX).collect();
        kids.sort_by_key(|&w| (Some(w) == next_on_path[u], w));
        for w in kids {
            depth[w] = depth[u] + 1;
            order.push(w);
        }
    }
    let m = n - 1;
    let mut labels = vec![0; n];
    let (mut lo, mut hi) = (0, m);
    for &v in &order {
        if depth[v] % 2 == 0 {
            labels[v] = lo;
            lo += 1;
        } else {
            labels[v] = hi;
            hi = hi.wrapping_sub(1);
        }
    }
    let f = Labeling::alpha(labels, lo - 1);
    match verify_alpha(t, &f).failure {
        None => Ok(f),
        Some(failure) => Err(PipelineError::Verification(failure)),
    }
}

/// `v - u - leaves`: `u` gets 0, the leaves 1..k in id order, `v` gets k+1.
pub fn label_star_lobe(f: &Graph, v: Vertex) -> Result<Labeling, PipelineError> {
    let shape = |what: &str| PipelineError::WrongShape(what.into());
    if !is_tree(f) || v >= f.num_vertices() {
        return Err(shape("expected a tree containing the spinal vertex"));
    }
    if f.degree(v) != 1 {
        return Err(shape("spinal vertex must have exactly one neighbor"));
    }
    let u = f.neighbors(v)[0];
    if f.vertices().any(|w| w != u && f.degree(w) != 1) {
        return Err(shape("not a single branch"));
    }
    let mut labels = vec![0; f.num_vertices()];
    let mut next = 1;
    for w in f.vertices() {
        if w != u && w != v {
            labels[w] = next;
            next += 1;
        }
    }
    labels[v] = next;
    Ok(Labeling::beta(labels))
}

fn lobe_budget() -> SearchBudget {
    SearchBudget::default().with_max_vertices(usize::MAX).expect("positive")
}

/// A graceful labeling of a tree of diameter at most 4 that gives its center
/// the maximum label, by exhaustive search. `Exhausted` is a genuine
/// answer: it can happen when the center has even degree.
pub fn label_diameter4_center_max(f: &Graph, c: Vertex) -> Result<SearchOutcome<Labeling>, PipelineError> {
    if !is_tree(f) || c >= f.num_vertices() {
        return Err(PipelineError::WrongShape("expected a tree containing the center".into()));
    }
    if f.num_vertices() == 1 {
        return Ok(SearchOutcome::Found(Labeling::beta(vec![0])));
    }
    let d = diameter(f);
    if d > 4 {
        return Err(PipelineError::WrongShape(format!("diameter {d} exceeds 4")));
    }
    let ecc = f.distances(c).into_iter().max().unwrap_or(0);
    if ecc != d.div_ceil(2) {
        return Err(PipelineError::WrongShape(format!("vertex {c} is not a center")));
    }
    graceful_tree_with_pins(f, &[(c, f.num_edges())], lobe_budget()).map_err(|_| PipelineError::WrongShape("not a tree".into()))
}

/// A graceful labeling of a rooted piece (spinal vertex = local 0) with the
/// root at the maximum label.
fn center_max(g: &Graph, root: Vertex, piece: usize) -> Result<Labeling, PipelineError> {
    if g.num_vertices() == 1 {
        return Ok(Labeling::beta(vec![0]));
    }
    if g.degree(root) == 1 {
        if let Ok(f) = label_star_lobe(g, root) {
            return Ok(f);
        }
    }
    match label_diameter4_center_max(g, root)? {
        SearchOutcome::Found(f) => Ok(f),
        SearchOutcome::Exhausted => Err(PipelineError::NoCenterMax { piece }),
        SearchOutcome::BudgetExceeded(limit) => Err(PipelineError::Search(limit)),
    }
}

/// A tree made of a root (local 0) carrying branches with the given leaf
/// counts.
fn piece_graph(sizes: &[usize]) -> Graph {
    let mut edges = Vec::new();
    let mut next = 1;
    for &s in sizes {
        let c = next;
        edges.push((0, c));
        next += 1;
        for _ in 0..s {
            edges.push((c, next));
            next += 1;
        }
    }
    Graph::new(next, &edges).expect("piece is a tree")
}

/// One `G_i` of a pairwise-linked decomposition, rooted at local vertex 0.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedPiece {
    pub branch_sizes: Vec<usize>,
    #[serde(skip)]
    pub graph: Graph,
    pub labeling: Labeling,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LinkedDecomposition {
    /// True when found reading the spine from its other end.
    pub reversed: bool,
    pub pieces: Vec<LinkedPiece>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LobsterClassification {
    pub spine_len: usize,
    pub parity: Vec<Parity>,
    pub pairwise_isomorphic: bool,
    pub pairwise_similar: bool,
    pub pairwise_linked: bool,
    pub linked: Option<LinkedDecomposition>,
    pub pairwise_balanced: bool,
    pub pairwise_trivially_balanced: bool,
}

impl LobsterClassification {
    /// Names of the class flags that hold.
    pub fn flags(&self) -> Vec<&'static str> {
        [
            (self.pairwise_isomorphic, "pairwise-isomorphic"),
            (self.pairwise_similar, "pairwise-similar"),
            (self.pairwise_linked, "pairwise-linked"),
            (self.pairwise_balanced, "pairwise-balanced"),
            (self.pairwise_trivially_balanced, "pairwise-trivially-balanced"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect()
    }
}

/// First odd pair (0-based index of its first lobe) whose lobes differ
/// under `key`.
fn first_unpaired<K: PartialEq>(l: &Lobster, key: impl Fn(usize) -> K) -> Option<usize> {
    (0..l.len().saturating_sub(1)).step_by(2).find(|&p| key(p) != key(p + 1))
}

fn similar_in(l: &Lobster) -> Option<usize> {
    first_unpaired(l, |p| l.lobes[p].branch_sizes())
}

fn isomorphic_in(l: &Lobster) -> Option<usize> {
    first_unpaired(l, |p| (l.lobes[p].branch_sizes(), l.lobes[p].pendants.len()))
}

/// Suffix peeling: `G_r` is the last reduced lobe and each earlier `G_i`
/// is its reduced lobe minus the branches of `G_{i+1}`.
fn linked_in(l: &Lobster, reversed: bool) -> Result<LinkedDecomposition, String> {
    let r = l.len();
    let mut sizes: Vec<Vec<usize>> = vec![Vec::new(); r];
    sizes[r - 1] = l.lobes[r - 1].branch_sizes();
    for i in (0..r - 1).rev() {
        let mut rest = l.lobes[i].branch_sizes();
        for s in &sizes[i + 1] {
            let at = rest
                .iter()
                .position(|x| x == s)
                .ok_or_else(|| format!("lobe {} lacks a branch of size {s} that lobe {} needs", i + 1, i + 2))?;
            rest.remove(at);
        }
        sizes[i] = rest;
    }
    let mut pieces = Vec::with_capacity(r);
    for (i, s) in sizes.into_iter().enumerate() {
        let graph = piece_graph(&s);
        let labeling = center_max(&graph, 0, i + 1).map_err(|e| e.to_string())?;
        pieces.push(LinkedPiece {
            branch_sizes: s,
            graph,
            labeling,
        });
    }
    Ok(LinkedDecomposition { reversed, pieces })
}

/// Balanced spec for the spinal pair starting at lobe `p`.
fn pair_spec(l: &Lobster, p: usize) -> Result<BalancedLobsterSpec, String> {
    let (a, b) = (&l.lobes[p], &l.lobes[p + 1]);
    let (xs, ys) = (a.branch_sizes(), b.branch_sizes());
    if xs.len() != ys.len() {
        return Err(format!("{} branches against {}", xs.len(), ys.len()));
    }
    match balanced_orderings(&xs, &ys) {
        Some(mut spec) => {
            spec.s1 = a.pendants.len();
            spec.s2 = b.pendants.len();
            Ok(spec)
        }
        None => {
            let spec = BalancedLobsterSpec::new(xs, ys, 0, 0);
            Err(match spec.imbalance() {
                Some(bad) => format!("no branch order satisfies the balance equations; sorted order: {bad}"),
                None => "no branch order satisfies the balance equations".into(),
            })
        }
    }
}

fn balanced_pairs(l: &Lobster) -> Result<Vec<BalancedLobsterSpec>, PipelineError> {
    if l.len() % 2 == 1 {
        return Err(PipelineError::OddSpine { len: l.len() });
    }
    (0..l.len())
        .step_by(2)
        .map(|p| pair_spec(l, p).map_err(|reason| PipelineError::UnbalancedPair { pair: p / 2 + 1, reason }))
        .collect()
}

pub fn classify_lobster(l: &Lobster) -> LobsterClassification {
    let rev = l.reversed();
    let linked = linked_in(l, false).or_else(|_| linked_in(&rev, true)).ok();
    let pairs = balanced_pairs(l);
    let trivially = pairs.as_ref().is_ok_and(|specs| specs.iter().all(|s| s.is_trivially_balanced()));
    LobsterClassification {
        spine_len: l.len(),
        parity: spinal_parity(l),
        pairwise_isomorphic: isomorphic_in(l).is_none() || isomorphic_in(&rev).is_none(),
        pairwise_similar: similar_in(l).is_none() || similar_in(&rev).is_none(),
        pairwise_linked: linked.is_some(),
        linked,
        pairwise_balanced: pairs.is_ok(),
        pairwise_trivially_balanced: trivially,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Caterpillar,
    PairwiseBalanced,
    PairwiseLinked,
    PairwiseSimilar,
    Search,
}

impl fmt::Display for Route {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Route::Caterpillar => "caterpillar",
            Route::PairwiseBalanced => "pairwise-balanced",
            Route::PairwiseLinked => "pairwise-linked",
            Route::PairwiseSimilar => "pairwise-similar",
            Route::Search => "search",
        })
    }
}

/// A verified labeling of an input tree, with the route that produced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LobsterCertificate {
    pub route: Route,
    pub constructions: Vec<Construction>,
    pub graph: Graph,
    pub labeling: Labeling,
    pub matrix: LabeledMatrix,
}

impl LobsterCertificate {
    fn new(route: Route, constructions: Vec<Construction>, graph: Graph, labeling: Labeling) -> Result<Self, PipelineError> {
        let matrix = match labeling.kind() {
            LabelKind::Alpha => canonical_biadjacency(&graph, &labeling)?,
            LabelKind::Beta => canonical_adjacency(&graph, &labeling)?,
        };
        let cert = Self {
            route,
            constructions,
            graph,
            labeling,
            matrix,
        };
        cert.check()?;
        Ok(cert)
    }

    /// Re-verify the labeling and the stored matrix from scratch.
    pub fn check(&self) -> Result<(), PipelineError> {
        if let Some(failure) = verify(&self.graph, &self.labeling).failure {
            return Err(PipelineError::Verification(failure));
        }
        let canon = match self.labeling.kind() {
            LabelKind::Alpha => canonical_biadjacency(&self.graph, &self.labeling)?,
            LabelKind::Beta => canonical_adjacency(&self.graph, &self.labeling)?,
        };
        if canon != self.matrix {
            return Err(PipelineError::Structure("stored matrix differs from the canonical one".into()));
        }
        if !is_completely_graceful(&self.matrix).ok {
            return Err(PipelineError::Structure("matrix is not completely graceful".into()));
        }
        Ok(())
    }
}

/// Matrix id and label of a vertex, and whether it indexes a row.
fn locate(m: &LabeledMatrix, v: Vertex) -> Option<(bool, Label)> {
    if let Some(&(_, l)) = m.row_labels().iter().find(|&&(id, _)| id == v) {
        return Some((true, l));
    }
    m.col_labels().iter().find(|&&(id, _)| id == v).map(|&(_, l)| (false, l))
}

/// Add one pendant at `target`, trying insertion positions in order.
fn add_pendant(m: &LabeledMatrix, target: Vertex) -> Result<LabeledMatrix, PipelineError> {
    let (is_row, label) = locate(m, target).ok_or(PipelineError::PendantInsertion { vertex: target })?;
    let found = match m.kind() {
        MatrixKind::Adjacency => (0..=m.rows()).find_map(|at| insert_pendant_adjacent(m, at, label).ok()),
        MatrixKind::Biadjacency if is_row => std::iter::once(None)
            .chain(m.col_labels().iter().map(|&(_, l)| Some(l)))
            .find_map(|after| insert_pendant_column(m, after, label).ok()),
        MatrixKind::Biadjacency => std::iter::once(None)
            .chain(m.row_labels().iter().map(|&(_, l)| Some(l)))
            .find_map(|after| insert_pendant_row(m, after, label).ok()),
    };
    found.ok_or(PipelineError::PendantInsertion { vertex: target })
}

/// Map a constructed matrix for `core` onto `t`, add the pendants, and
/// check that the result is exactly `t`.
fn finish(
    t: &Graph,
    route: Route,
    constructions: Vec<Construction>,
    built: LabeledMatrix,
    core: &Subtree,
    pendants: &[(Vertex, Vec<Vertex>)],
) -> Result<LobsterCertificate, PipelineError> {
    let (g, _) = matrix_to_graph(&built)?;
    let phi = tree_isomorphism(&g, &core.graph, None)?
        .ok_or_else(|| PipelineError::Structure("constructed tree is not isomorphic to the pendant-free lobster".into()))?;
    let mut back = vec![0; phi.len()];
    for (c, &local) in phi.iter().enumerate() {
        back[local] = c;
    }
    let mut to_t: Vec<Vertex> = phi.iter().map(|&local| core.ids[local]).collect();
    let mut m = built;
    for (spinal, extra) in pendants {
        let local = core.ids.iter().position(|id| id == spinal).ok_or_else(|| PipelineError::Structure("spinal vertex missing".into()))?;
        for &p in extra {
            m = add_pendant(&m, back[local])?;
            to_t.push(p);
        }
    }
    let (g, f) = matrix_to_graph(&m)?;
    let mut mapped: Vec<(Vertex, Vertex)> = g
        .edges()
        .iter()
        .map(|&(u, v)| {
            let (a, b) = (to_t[u], to_t[v]);
            (a.min(b), a.max(b))
        })
        .collect();
    mapped.sort_unstable();
    if to_t.len() != t.num_vertices() || mapped != t.edges() {
        return Err(PipelineError::Structure("edge set differs from the input lobster".into()));
    }
    let mut labels = vec![0; t.num_vertices()];
    for (v, &id) in to_t.iter().enumerate() {
        labels[id] = f.label(v);
    }
    let labeling = match f.critical() {
        Some(k) => Labeling::alpha(labels, k),
        None => Labeling::beta(labels),
    };
    LobsterCertificate::new(route, constructions, t.clone(), labeling)
}

fn induced(t: &Graph, mut keep: Vec<Vertex>) -> Subtree {
    keep.sort_unstable();
    let (graph, ids) = t.induced(&keep);
    Subtree { graph, ids }
}

/// Graceful labeling of a pairwise-similar lobster whose spinal vertices
/// are essentially odd, bare, or essentially even with a pendant (one
/// pendant is then moved into the reduced lobe).
pub fn label_pairwise_similar(l: &Lobster) -> Result<LobsterCertificate, PipelineError> {
    let rev = l.reversed();
    let l = match (similar_in(l), similar_in(&rev)) {
        (None, _) => l,
        (_, None) => &rev,
        (Some(p), _) => return Err(PipelineError::NotPairwiseSimilar { pair: p + 1 }),
    };
    let parity = spinal_parity(l);
    for (i, lobe) in l.lobes.iter().enumerate() {
        if parity[i] == Parity::EssentiallyEven && lobe.pendants.is_empty() {
            return Err(PipelineError::EvenWithoutPendant {
                index: i + 1,
                vertex: lobe.spinal,
            });
        }
    }
    let promote: Vec<usize> = parity.iter().map(|&p| usize::from(p == Parity::EssentiallyEven)).collect();
    let r = l.len();
    let mut pieces = Vec::new();
    for p in (0..r).step_by(2) {
        let sub = l.lobe_subtree(p, promote[p]);
        let f = center_max(&sub.graph, 0, p + 1)?;
        pieces.push((sub.graph, f));
    }
    let mut constructions = Vec::new();
    let built = if r == 1 {
        canonical_adjacency(&pieces[0].0, &pieces[0].1)?
    } else if r % 2 == 1 {
        constructions.push(Construction::ChainWithCopies);
        chain_with_copies(&pieces)?.matrix
    } else {
        let doubles = pieces
            .iter()
            .map(|(g, f)| double(g, f, g.num_edges()))
            .collect::<Result<Vec<_>, _>>()?;
        constructions.push(Construction::Double);
        if doubles.len() == 1 {
            doubles.into_iter().next().unwrap().matrix
        } else {
            constructions.push(Construction::ChainKm);
            let parts: Vec<_> = doubles.into_iter().map(|c| (c.graph, c.labeling)).collect();
            chain_join_km(&parts)?.matrix
        }
    };
    let mut keep = Vec::new();
    let mut pendants = Vec::new();
    for (i, lobe) in l.lobes.iter().enumerate() {
        keep.extend(l.lobe_subtree(i, promote[i]).ids);
        pendants.push((lobe.spinal, lobe.pendants[promote[i]..].to_vec()));
    }
    finish(&l.tree, Route::PairwiseSimilar, constructions, built, &induced(&l.tree, keep), &pendants)
}

/// Graceful labeling of a pairwise-linked lobster via the merge-join chain.
pub fn label_pairwise_linked(l: &Lobster) -> Result<LobsterCertificate, PipelineError> {
    let dec = linked_in(l, false).or_else(|forward| {
        linked_in(&l.reversed(), true).map_err(|back| PipelineError::NoDecomposition {
            reason: format!("{forward}; reading the spine backwards, {back}"),
        })
    })?;
    let l = if dec.reversed { l.reversed() } else { l.clone() };
    let parts: Vec<(Graph, Labeling)> = dec.pieces.iter().map(|p| (p.graph.clone(), p.labeling.clone())).collect();
    let (built, constructions) = if parts.len() == 1 {
        (canonical_adjacency(&parts[0].0, &parts[0].1)?, Vec::new())
    } else {
        (merge_join_chain(&parts)?.matrix, vec![Construction::MergeJoin])
    };
    let core = l.without_pendants();
    let pendants: Vec<_> = l.lobes.iter().map(|lobe| (lobe.spinal, lobe.pendants.clone())).collect();
    finish(&l.tree, Route::PairwiseLinked, constructions, built, &core, &pendants)
}

/// Complete alpha-labeling of a pairwise-balanced lobster: each spinal
/// pair labeled explicitly, pairs chained critical-to-maximum.
pub fn label_pairwise_balanced(l: &Lobster) -> Result<LobsterCertificate, PipelineError> {
    let specs = balanced_pairs(l)?;
    let certs = specs.iter().map(label_balanced_lobster).collect::<Result<Vec<_>, _>>()?;
    let mut constructions = vec![Construction::BalancedLobster];
    let built = if certs.len() == 1 {
        certs.into_iter().next().unwrap().matrix
    } else {
        constructions.push(Construction::ChainKm);
        let parts: Vec<_> = certs.into_iter().map(|c| (c.graph, c.labeling)).collect();
        chain_join_km(&parts)?.matrix
    };
    let core = Subtree {
        graph: l.tree.clone(),
        ids: l.tree.vertices().collect(),
    };
    finish(&l.tree, Route::PairwiseBalanced, constructions, built, &core, &[])
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "kebab-case")]
pub enum SearchStatus {
    /// More vertices than the budget allows.
    Skipped { n: usize, max: usize },
    Exhausted,
    BudgetExceeded { limit: BudgetLimit },
}

/// Why the dispatcher produced no certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct NotCovered {
    pub attempts: Vec<(Route, String)>,
    pub search: SearchStatus,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AutoOutcome {
    Labeled(LobsterCertificate),
    NotCovered(NotCovered),
}

type Pipeline = fn(&Lobster) -> Result<LobsterCertificate, PipelineError>;

/// Try, in order: caterpillar sweep, pairwise balanced, pairwise linked,
/// pairwise similar, then exhaustive search within `budget`.
pub fn label_lobster_auto(t: &Graph, budget: SearchBudget) -> Result<AutoOutcome, PipelineError> {
    let l = lobster_decompose(t)?;
    let mut attempts = Vec::new();
    if classify_tree(t)? <= TreeClass::Caterpillar {
        let f = label_caterpillar(t)?;
        return Ok(AutoOutcome::Labeled(LobsterCertificate::new(Route::Caterpillar, Vec::new(), t.clone(), f)?));
    }
    attempts.push((Route::Caterpillar, PipelineError::NotCaterpillar.to_string()));
    let routes: [(Route, Pipeline); 3] = [
        (Route::PairwiseBalanced, label_pairwise_balanced),
        (Route::PairwiseLinked, label_pairwise_linked),
        (Route::PairwiseSimilar, label_pairwise_similar),
    ];
    for (route, run) in routes {
        match run(&l) {
            Ok(cert) => return Ok(AutoOutcome::Labeled(cert)),
            Err(e) => attempts.push((route, e.to_string())),
        }
    }
    let search = label_by_search(t, budget)?;
    match search {
        Ok(cert) => Ok(AutoOutcome::Labeled(cert)),
        Err(search) => Ok(AutoOutcome::NotCovered(NotCovered { attempts, search })),
    }
}

/// Exhaustive fallback: an alpha-labeling if one exists, else any graceful
/// labeling.
pub fn label_by_search(t: &Graph, budget: SearchBudget) -> Result<Result<LobsterCertificate, SearchStatus>, PipelineError> {
    let n = t.num_vertices();
    if n > budget.max_vertices() {
        return Ok(Err(SearchStatus::Skipped {
            n,
            max: budget.max_vertices(),
        }));
    }
    let outcome = match brute_force_alpha(t, budget) {
        SearchOutcome::Found(f) => SearchOutcome::Found(f),
        SearchOutcome::Exhausted => brute_force_graceful(t, budget),
        other => other,
    };
    Ok(match outcome {
        SearchOutcome::Found(f) => Ok(LobsterCertificate::new(Route::Search, Vec::new(), t.clone(), f)?),
        SearchOutcome::Exhausted => Err(SearchStatus::Exhausted),
        SearchOutcome::BudgetExceeded(limit) => Err(SearchStatus::BudgetExceeded { limit }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{path_graph, star_graph};
    use crate::labeling::verify_beta;

    fn uneven_spec() -> BalancedLobsterSpec {
        BalancedLobsterSpec::new(vec![2, 2, 3], vec![3, 3, 2], 3, 2)
    }

    #[test]
    fn balance_equations() {
        assert!(uneven_spec().is_balanced());
        assert!(!uneven_spec().is_trivially_balanced());
        assert!(BalancedLobsterSpec::new(vec![3; 3], vec![3; 3], 0, 0).is_trivially_balanced());
        let bad = BalancedLobsterSpec::new(vec![2], vec![3], 0, 0);
        assert_eq!(bad.imbalance(), Some(Imbalance { side: 'x', index: 1 }));
        assert!(matches!(label_balanced_lobster(&bad), Err(PipelineError::Unbalanced(_))));
        assert!(BalancedLobsterSpec::new(vec![], vec![], 1, 1).is_balanced());
        let spec = balanced_orderings(&[3, 2, 2], &[2, 3, 3]).unwrap();
        assert_eq!((spec.x, spec.y), (vec![2, 2, 3], vec![3, 3, 2]));
        assert_eq!(balanced_orderings(&[5, 2, 2], &[4, 4, 1]), None);
    }

    #[test]
    fn classes_cover_every_position_once() {
        for r in 0..=12 {
            let classes = balance_classes(r);
            let mut xs: Vec<usize> = classes.iter().flat_map(|c| c.0.clone()).collect();
            let mut ys: Vec<usize> = classes.iter().flat_map(|c| c.1.clone()).collect();
            xs.sort();
            ys.sort();
            assert_eq!(xs, (0..r).collect::<Vec<_>>());
            assert_eq!(ys, (0..r).collect::<Vec<_>>());
            let values: Vec<usize> = (1..=classes.len()).collect();
            assert!(BalancedLobsterSpec::from_class_values(r, &values, 0, 0).is_balanced());
        }
    }

    #[test]
    fn balanced_spec_labels() {
        let cert = label_balanced_lobster(&uneven_spec()).unwrap();
        assert_eq!(cert.critical(), Some(14));
        assert_eq!(cert.graph.num_edges(), 27);
        assert!(cert.is_complete());
        let p4 = label_balanced_lobster(&BalancedLobsterSpec::new(vec![], vec![], 1, 1)).unwrap();
        assert_eq!(p4.critical(), Some(1));
        assert_eq!(p4.graph.num_edges(), 3);
    }

    #[test]
    fn lemma_sums() {
        let s = uneven_spec();
        assert_eq!(lemma_pb1_sums(&s, 3, Clause::I).unwrap(), (5, 5));
        assert_eq!(lemma_pb1_sums(&s, 2, Clause::Iii).unwrap(), (2, 2));
        let t = BalancedLobsterSpec::new(vec![3; 3], vec![3; 3], 0, 0);
        assert_eq!(lemma_pb1_sums(&t, 1, Clause::Ii).unwrap(), (3, 3));
        assert!(matches!(lemma_pb1_sums(&s, 2, Clause::I), Err(PipelineError::Parity { .. })));
        assert!(matches!(lemma_pb1_sums(&s, 4, Clause::Iii), Err(PipelineError::IndexRange { .. })));
    }

    #[test]
    fn small_labelers() {
        let f = label_caterpillar(&path_graph(4)).unwrap();
        assert_eq!(f.labels(), &[0, 3, 1, 2]);
        assert_eq!(f.critical(), Some(1));
        let s = label_caterpillar(&star_graph(3)).unwrap();
        assert_eq!(s.label(0), 0);
        assert_eq!(s.critical(), Some(0));
        // v = 0, u = 1, leaves 2..4.
        let lobe = Graph::new(5, &[(0, 1), (1, 2), (1, 3), (1, 4)]).unwrap();
        assert_eq!(label_star_lobe(&lobe, 0).unwrap().labels(), &[4, 0, 1, 2, 3]);
        assert_eq!(label_star_lobe(&path_graph(2), 0).unwrap().labels(), &[1, 0]);
        assert!(label_star_lobe(&path_graph(5), 0).is_err());
        let k13 = label_diameter4_center_max(&star_graph(3), 0).unwrap().found().unwrap();
        assert_eq!(k13.label(0), 3);
        assert!(verify_beta(&star_graph(3), &k13).ok);
        assert!(label_diameter4_center_max(&path_graph(6), 2).is_err());
        assert_eq!(label_diameter4_center_max(&path_graph(1), 0).unwrap().found().unwrap().labels(), &[0]);
    }

    #[test]
    fn parity_tags() {
        // Spine 0-1; vertex 0 has three bare-leaf branches, vertex 1 two,
        // and vertex 1 also one pendant.
        let t = Graph::new(
            13,
            &[(0, 1), (0, 2), (2, 3), (0, 4), (4, 5), (0, 6), (6, 7), (1, 8), (8, 9), (1, 10), (10, 11), (1, 12)],
        )
        .unwrap();
        let l = lobster_decompose(&t).unwrap();
        let by_vertex: Vec<(Vertex, Parity)> = l.spine.iter().copied().zip(spinal_parity(&l)).collect();
        assert!(by_vertex.contains(&(0, Parity::EssentiallyOdd)));
        assert!(by_vertex.contains(&(1, Parity::EssentiallyEven)));
    }
}

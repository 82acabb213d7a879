//! Compositions of labeled graphs.
//!
//! Every operation lays the block matrix of its construction out on a
//! canvas whose positions are the result labels, reads the graph back from
//! the grid and verifies the labeling from scratch. The canvas also records
//! where each input vertex went, which lets the result be compared with the
//! graph the construction was supposed to produce.

use std::collections::{BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::canon::rooted_map;
use crate::graph::{is_tree, Graph, Vertex};
use crate::labeling::{verify_alpha_bounded, verify_beta, verify_beta_bounded, Failure, Label, LabelKind, Labeling};
use crate::matrix::{
    canonical_adjacency, canonical_adjacency_bounded, canonical_biadjacency, canonical_biadjacency_bounded, is_completely_graceful,
    is_graceful_grid, matrix_to_graph, transform, LabeledMatrix, MatrixError, MatrixKind, Transform,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Construction {
    Double,
    DisjointUnion,
    ChainKm,
    ChainAlternating,
    ChainAllM,
    ChainWithCopies,
    StarJoin,
    Attach,
    AttachRelaxed,
    MergeJoin,
    BalancedLobster,
}

impl fmt::Display for Construction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Construction::Double => "double",
            Construction::DisjointUnion => "disjoint-union",
            Construction::ChainKm => "chain-km",
            Construction::ChainAlternating => "chain-alternating",
            Construction::ChainAllM => "chain-all-m",
            Construction::ChainWithCopies => "chain-with-copies",
            Construction::StarJoin => "star-join",
            Construction::Attach => "attach",
            Construction::AttachRelaxed => "attach-relaxed",
            Construction::MergeJoin => "merge-join",
            Construction::BalancedLobster => "balanced-lobster",
        })
    }
}

/// Where a result vertex came from. `copy` is 0 for the part itself and 1
/// for the second copy a doubled block creates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Origin {
    Part { part: usize, copy: usize, vertex: Vertex },
    New,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PartSummary {
    pub vertices: usize,
    pub edges: usize,
    pub critical: Option<Label>,
}

/// A verified construction result.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub construction: Construction,
    pub inputs: Vec<PartSummary>,
    pub parameters: Vec<(String, String)>,
    /// Vertex ids follow ascending labels.
    pub graph: Graph,
    pub labeling: Labeling,
    pub matrix: LabeledMatrix,
    /// Per result vertex; merged vertices have several origins.
    pub origins: Vec<Vec<Origin>>,
    /// Largest label the labeling may use. Above the edge count only for
    /// disjoint unions and doubles of graphs with isolated padding.
    pub label_bound: Label,
}

impl Certificate {
    /// Re-run the verifier and rebuild the canonical matrix.
    pub fn check(&self) -> Result<(), ConstructError> {
        let verdict = match self.labeling.kind() {
            LabelKind::Alpha => verify_alpha_bounded(&self.graph, &self.labeling, self.label_bound),
            LabelKind::Beta => verify_beta_bounded(&self.graph, &self.labeling, self.label_bound),
        };
        if let Some(failure) = verdict.failure {
            return Err(ConstructError::Verification(failure));
        }
        let canon = canonical_for(&self.graph, &self.labeling, self.label_bound)?;
        if canon != self.matrix {
            return Err(ConstructError::Structure("stored matrix is not the canonical matrix of the result".into()));
        }
        Ok(())
    }

    pub fn is_complete(&self) -> bool {
        is_completely_graceful(&self.matrix).ok
    }

    pub fn critical(&self) -> Option<Label> {
        self.labeling.critical()
    }
}

fn canonical_for(g: &Graph, f: &Labeling, bound: Label) -> Result<LabeledMatrix, MatrixError> {
    match f.kind() {
        LabelKind::Alpha => canonical_biadjacency_bounded(g, f, bound),
        LabelKind::Beta => canonical_adjacency_bounded(g, f, bound),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("need at least {need} parts, got {got}")]
    TooFewParts { need: usize, got: usize },
    #[error("part {index}: {failure}")]
    Part { index: usize, failure: Failure },
    #[error("part {index} is not completely graceful")]
    NotComplete { index: usize },
    #[error("part {index} is not bipartite")]
    NotBipartite { index: usize },
    #[error("part {index} is not a tree")]
    NotTree { index: usize },
    #[error("label {0} is not used by the labeling")]
    UnusedLabel(Label),
    #[error("parts {first} and {index} differ in size ({first_edges} vs {index_edges} edges)")]
    UnequalSizes { first: usize, index: usize, first_edges: usize, index_edges: usize },
    #[error("precondition fails at i = {index} (parts counted from 1): {reason}")]
    Precondition { index: usize, reason: String },
    #[error("parts {i} and {j} are not isomorphic when rooted at their max-labeled vertices")]
    NotIsomorphic { i: usize, j: usize },
    #[error("host graph: {0}")]
    Host(String),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("assembled labeling fails verification: {0}")]
    Verification(Failure),
    #[error("assembled graph differs from the intended one: {0}")]
    Structure(String),
}

fn require_beta(index: usize, g: &Graph, f: &Labeling) -> Result<(), ConstructError> {
    let v = verify_beta(g, &f.as_beta());
    match v.failure {
        Some(failure) => Err(ConstructError::Part { index, failure }),
        None => Ok(()),
    }
}

fn require_complete(index: usize, g: &Graph, f: &Labeling) -> Result<(), ConstructError> {
    require_beta(index, g, f)?;
    if !f.is_complete(g) {
        return Err(ConstructError::NotComplete { index });
    }
    Ok(())
}

fn require_alpha(index: usize, g: &Graph, f: &Labeling) -> Result<LabeledMatrix, ConstructError> {
    canonical_biadjacency(g, f).map_err(|e| match e {
        MatrixError::NotAlpha(failure) => ConstructError::Part { index, failure },
        other => other.into(),
    })
}

fn max_vertex(index: usize, f: &Labeling) -> Result<Vertex, ConstructError> {
    f.max_vertex().ok_or(ConstructError::NotComplete { index })
}

/// Grid under construction. Positions are labels: rows then columns for a
/// biadjacency canvas, the shared row/column order for an adjacency canvas.
struct Canvas {
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
    origins: Vec<Vec<Origin>>,
}

impl Canvas {
    fn adjacency(n: usize) -> Self {
        Self {
            kind: MatrixKind::Adjacency,
            rows: n,
            cols: n,
            cells: vec![false; n * n],
            origins: vec![Vec::new(); n],
        }
    }

    fn biadjacency(rows: usize, cols: usize) -> Self {
        Self {
            kind: MatrixKind::Biadjacency,
            rows,
            cols,
            cells: vec![false; rows * cols],
            origins: vec![Vec::new(); rows + cols],
        }
    }

    /// Set a cell; adjacency canvases stay symmetric.
    fn set(&mut self, i: usize, j: usize) {
        self.cells[i * self.cols + j] = true;
        if self.kind == MatrixKind::Adjacency {
            self.cells[j * self.cols + i] = true;
        }
    }

    fn bind(&mut self, pos: usize, origin: Origin) {
        if !self.origins[pos].contains(&origin) {
            self.origins[pos].push(origin);
        }
    }

    /// Copy every 1 of `block`, sending its cell `(a, b)` to `(row(a), col(b))`.
    fn place(&mut self, block: &LabeledMatrix, row: impl Fn(usize) -> usize, col: impl Fn(usize) -> usize) {
        let ones: Vec<_> = block.ones().collect();
        for (a, b) in ones {
            self.set(row(a), col(b));
        }
    }

    /// Bind the real vertices of a biadjacency block placed with the given
    /// row/column maps (maps return global positions).
    fn bind_block(&mut self, block: &LabeledMatrix, part: usize, n: usize, row: impl Fn(usize) -> usize, col: impl Fn(usize) -> usize) {
        for (a, &(v, _)) in block.row_labels().iter().enumerate() {
            if v < n {
                self.bind(row(a), Origin::Part { part, copy: 0, vertex: v });
            }
        }
        for (b, &(v, _)) in block.col_labels().iter().enumerate() {
            if v < n {
                self.bind(col(b), Origin::Part { part, copy: 0, vertex: v });
            }
        }
    }

    /// Bind one copy of a part, each vertex at `at(label)`.
    fn bind_single(&mut self, part: usize, f: &Labeling, at: impl Fn(Label) -> usize) {
        for (v, &l) in f.labels().iter().enumerate() {
            self.bind(at(l), Origin::Part { part, copy: 0, vertex: v });
        }
    }

    /// Bind the two copies a doubled block carries. The side of `reference`
    /// goes to `at_a` in the first copy and to `at_b` in the second; the
    /// other side does the opposite. `second` names the second copy and,
    /// when it lives in another part, maps vertices into that part.
    #[allow(clippy::too_many_arguments)]
    fn bind_cover(
        &mut self,
        index: usize,
        g: &Graph,
        f: &Labeling,
        reference: Vertex,
        second: (usize, usize, Option<&[Vertex]>),
        at_a: impl Fn(Label) -> usize,
        at_b: impl Fn(Label) -> usize,
    ) -> Result<(), ConstructError> {
        let side = g.bipartition().ok_or(ConstructError::NotBipartite { index })?;
        let (part_b, copy_b, map) = second;
        for (x, &l) in f.labels().iter().enumerate() {
            let (pa, pb) = if side[x] == side[reference] { (at_a(l), at_b(l)) } else { (at_b(l), at_a(l)) };
            self.bind(pa, Origin::Part { part: index, copy: 0, vertex: x });
            let y = map.map_or(x, |m| m[x]);
            self.bind(pb, Origin::Part { part: part_b, copy: copy_b, vertex: y });
        }
        Ok(())
    }
}

/// Row and column offsets of blocks laid along the antidiagonal: block 0
/// top right, the last block bottom left.
struct Band {
    row_off: Vec<usize>,
    col_off: Vec<usize>,
    rows: usize,
    cols: usize,
}

impl Band {
    fn new(blocks: &[LabeledMatrix]) -> Self {
        let rows = blocks.iter().map(LabeledMatrix::rows).sum();
        let cols = blocks.iter().map(LabeledMatrix::cols).sum();
        let mut row_off = Vec::with_capacity(blocks.len());
        let mut col_off = vec![0; blocks.len()];
        let mut acc = 0;
        for b in blocks {
            row_off.push(acc);
            acc += b.rows();
        }
        let mut acc = 0;
        for (i, b) in blocks.iter().enumerate().rev() {
            col_off[i] = acc;
            acc += b.cols();
        }
        Self { row_off, col_off, rows, cols }
    }

    fn last_row(&self, blocks: &[LabeledMatrix], i: usize) -> usize {
        self.row_off[i] + blocks[i].rows() - 1
    }

    fn last_col(&self, blocks: &[LabeledMatrix], i: usize) -> usize {
        self.col_off[i] + blocks[i].cols() - 1
    }
}

fn summaries(parts: &[(Graph, Labeling)]) -> Vec<PartSummary> {
    parts
        .iter()
        .map(|(g, f)| PartSummary {
            vertices: g.num_vertices(),
            edges: g.num_edges(),
            critical: f.critical(),
        })
        .collect()
}

/// Read the canvas back as a labeled graph, drop unbound padding, verify,
/// and compare against the graph the origins and `joins` describe.
fn finish(
    canvas: Canvas,
    construction: Construction,
    parts: &[(Graph, Labeling)],
    parameters: Vec<(String, String)>,
    joins: &[(Origin, Origin)],
) -> Result<Certificate, ConstructError> {
    let kind = canvas.kind;
    let positions = canvas.origins.len();
    let (row_meta, col_meta): (Vec<_>, Vec<_>) = match kind {
        MatrixKind::Adjacency => ((0..positions).map(|p| (p, p)).collect(), (0..positions).map(|p| (p, p)).collect()),
        MatrixKind::Biadjacency => (
            (0..canvas.rows).map(|p| (p, p)).collect(),
            (canvas.rows..positions).map(|p| (p, p)).collect(),
        ),
    };
    let critical = (kind == MatrixKind::Biadjacency).then(|| canvas.rows - 1);
    let grid = LabeledMatrix::new(kind, row_meta, col_meta, canvas.cells, critical)?;
    let gv = is_graceful_grid(&grid);
    if !gv.ok {
        return Err(MatrixError::NotCompletelyGraceful {
            overfull: gv.overfull,
            deficient: Vec::new(),
        }
        .into());
    }
    let (full, _) = matrix_to_graph(&grid)?;
    let keep: Vec<usize> = (0..positions).filter(|&p| !canvas.origins[p].is_empty()).collect();
    if let Some(p) = (0..positions).find(|&p| canvas.origins[p].is_empty() && full.degree(p) > 0) {
        return Err(ConstructError::Structure(format!("position {p} carries edges but no vertex")));
    }
    let (graph, ids) = full.induced(&keep);
    let bound = positions - 1;
    let labeling = match kind {
        MatrixKind::Adjacency => Labeling::beta(ids.clone()),
        MatrixKind::Biadjacency => Labeling::alpha(ids.clone(), canvas.rows - 1),
    };
    let origins: Vec<Vec<Origin>> = ids.iter().map(|&p| canvas.origins[p].clone()).collect();
    check_structure(&graph, &origins, parts, joins)?;
    let matrix = canonical_for(&graph, &labeling, bound)?;
    if matrix.cells() != grid.cells() {
        return Err(ConstructError::Structure("canonical matrix of the result differs from the assembled grid".into()));
    }
    let cert = Certificate {
        construction,
        inputs: summaries(parts),
        parameters,
        graph,
        labeling,
        matrix,
        origins,
        label_bound: bound,
    };
    cert.check()?;
    Ok(cert)
}

fn check_structure(graph: &Graph, origins: &[Vec<Origin>], parts: &[(Graph, Labeling)], joins: &[(Origin, Origin)]) -> Result<(), ConstructError> {
    let mut at: HashMap<Origin, Vertex> = HashMap::new();
    for (v, list) in origins.iter().enumerate() {
        for &o in list {
            if at.insert(o, v).is_some() {
                return Err(ConstructError::Structure(format!("{o:?} placed twice")));
            }
        }
    }
    let copies: BTreeSet<(usize, usize)> = at
        .keys()
        .filter_map(|o| match *o {
            Origin::Part { part, copy, .. } => Some((part, copy)),
            Origin::New => None,
        })
        .collect();
    let mut expected = BTreeSet::new();
    for (part, copy) in copies {
        let g = &parts[part].0;
        let find = |vertex| at.get(&Origin::Part { part, copy, vertex }).copied();
        if (0..g.num_vertices()).any(|v| find(v).is_none()) {
            return Err(ConstructError::Structure(format!("copy {copy} of part {part} is incomplete")));
        }
        for &(u, v) in g.edges() {
            let (a, b) = (find(u).unwrap(), find(v).unwrap());
            expected.insert((a.min(b), a.max(b)));
        }
    }
    for (o1, o2) in joins {
        let (Some(&a), Some(&b)) = (at.get(o1), at.get(o2)) else {
            return Err(ConstructError::Structure(format!("join {o1:?} - {o2:?} has a missing endpoint")));
        };
        expected.insert((a.min(b), a.max(b)));
    }
    let actual: BTreeSet<_> = graph.edges().iter().copied().collect();
    if expected != actual {
        let missing = expected.difference(&actual).count();
        let extra = actual.difference(&expected).count();
        return Err(ConstructError::Structure(format!("{missing} intended edges missing, {extra} unexpected edges")));
    }
    Ok(())
}

fn part_of(index: usize, vertex: Vertex) -> Origin {
    Origin::Part { part: index, copy: 0, vertex }
}

fn copy_of(index: usize, vertex: Vertex) -> Origin {
    Origin::Part { part: index, copy: 1, vertex }
}

/// The grid of the double at label `j`: the canonical adjacency grid of the
/// padded graph read as a biadjacency matrix, plus a 1 at `(j, j)`.
fn double_block(index: usize, g: &Graph, f: &Labeling, j: Label) -> Result<LabeledMatrix, ConstructError> {
    let beta = f.as_beta();
    require_beta(index, g, &beta)?;
    f.vertex_with(j).ok_or(ConstructError::UnusedLabel(j))?;
    let adj = canonical_adjacency(g, &beta)?;
    let m = g.num_edges();
    let mut cells = adj.cells().to_vec();
    cells[j * (m + 1) + j] = true;
    let rows: Vec<_> = (0..=m).collect();
    let cols: Vec<_> = (m + 1..=2 * m + 1).collect();
    Ok(LabeledMatrix::from_labels(MatrixKind::Biadjacency, &rows, &cols, cells, Some(m))?)
}

/// The double of `g` at label `j`: `g`, a disjoint copy, and an edge
/// between the two vertices labeled `j`. Alpha with critical number `m`.
pub fn double(g: &Graph, f: &Labeling, j: Label) -> Result<Certificate, ConstructError> {
    let block = double_block(0, g, f, j)?;
    let x = f.vertex_with(j).unwrap();
    let m = g.num_edges();
    let mut c = Canvas::biadjacency(m + 1, m + 1);
    c.place(&block, |a| a, |b| b);
    c.bind_cover(0, g, f, x, (0, 1, None), |l| l, |l| m + 1 + l)?;
    let parts = [(g.clone(), f.as_beta())];
    finish(c, Construction::Double, &parts, vec![("at".into(), j.to_string())], &[(part_of(0, x), copy_of(0, x))])
}

/// Lay alpha blocks along the antidiagonal, optionally adding the chain
/// join cells `(last row of block i, last column of block i+1)`.
fn band_construction(
    construction: Construction,
    parts: &[(Graph, Labeling)],
    blocks: Vec<LabeledMatrix>,
    joins: &[(usize, usize, usize, usize)],
) -> Result<Certificate, ConstructError> {
    let band = Band::new(&blocks);
    let mut c = Canvas::biadjacency(band.rows, band.cols);
    for (i, b) in blocks.iter().enumerate() {
        let (ro, co) = (band.row_off[i], band.col_off[i]);
        c.place(b, |a| ro + a, |j| co + j);
        let n = parts[i].0.num_vertices();
        let rows = band.rows;
        c.bind_block(b, i, n, |a| ro + a, |j| rows + co + j);
    }
    let mut origin_joins = Vec::new();
    // (block of the row, which row, block of the column, which column)
    for &(rb, row, cb, col) in joins {
        c.set(row, col);
        let rv = blocks[rb].row_labels()[row - band.row_off[rb]].0;
        let cv = blocks[cb].col_labels()[col - band.col_off[cb]].0;
        origin_joins.push((part_of(rb, rv), part_of(cb, cv)));
    }
    finish(c, construction, parts, Vec::new(), &origin_joins)
}

/// Disjoint union of alpha-labeled graphs, critical number `Σk_i + r - 1`.
/// Labels may exceed the edge count by `r - 1`.
pub fn disjoint_union_alpha(parts: &[(Graph, Labeling)]) -> Result<Certificate, ConstructError> {
    if parts.is_empty() {
        return Err(ConstructError::TooFewParts { need: 1, got: 0 });
    }
    let blocks = parts
        .iter()
        .enumerate()
        .map(|(i, (g, f))| require_alpha(i, g, f))
        .collect::<Result<Vec<_>, _>>()?;
    band_construction(Construction::DisjointUnion, parts, blocks, &[])
}

fn complete_alpha_blocks(parts: &[(Graph, Labeling)]) -> Result<Vec<LabeledMatrix>, ConstructError> {
    if parts.is_empty() {
        return Err(ConstructError::TooFewParts { need: 1, got: 0 });
    }
    parts
        .iter()
        .enumerate()
        .map(|(i, (g, f))| {
            let b = require_alpha(i, g, f)?;
            if !f.is_complete(g) {
                return Err(ConstructError::NotComplete { index: i });
            }
            Ok(b)
        })
        .collect()
}

/// Chain of complete alpha parts joining `k_i` to `m_{i+1}`.
pub fn chain_join_km(parts: &[(Graph, Labeling)]) -> Result<Certificate, ConstructError> {
    let blocks = complete_alpha_blocks(parts)?;
    let band = Band::new(&blocks);
    let joins: Vec<_> = (0..blocks.len() - 1)
        .map(|i| (i, band.last_row(&blocks, i), i + 1, band.last_col(&blocks, i + 1)))
        .collect();
    band_construction(Construction::ChainKm, parts, blocks, &joins)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ChainMode {
    /// `m_i - m_{i+1}` joins at odd i, `k_i - k_{i+1}` at even i.
    Alternating,
    /// `m_i - m_{i+1}` joins throughout; needs equal `m - k` across each
    /// even-to-odd step.
    AllM,
}

/// Chains joining max or critical vertices of neighboring parts. Parts at
/// odd positions (counting from 1) are laid out transposed.
pub fn chain_join_p4(parts: &[(Graph, Labeling)], mode: ChainMode) -> Result<Certificate, ConstructError> {
    let mut blocks = complete_alpha_blocks(parts)?;
    if mode == ChainMode::AllM {
        for i in (1..blocks.len().saturating_sub(1)).step_by(2) {
            let (a, b) = (&blocks[i], &blocks[i + 1]);
            if a.cols() != b.cols() {
                return Err(ConstructError::Precondition {
                    index: i + 1,
                    reason: format!("m_i - k_i = {} but m_(i+1) - k_(i+1) = {}", a.cols(), b.cols()),
                });
            }
        }
    }
    for b in blocks.iter_mut().step_by(2) {
        *b = transform(b, Transform::T)?;
    }
    let band = Band::new(&blocks);
    let joins: Vec<_> = (0..blocks.len() - 1)
        .map(|i| {
            if mode == ChainMode::AllM && i % 2 == 1 {
                (i + 1, band.last_row(&blocks, i + 1), i, band.last_col(&blocks, i))
            } else {
                (i, band.last_row(&blocks, i), i + 1, band.last_col(&blocks, i + 1))
            }
        })
        .collect();
    let tag = match mode {
        ChainMode::Alternating => Construction::ChainAlternating,
        ChainMode::AllM => Construction::ChainAllM,
    };
    band_construction(tag, parts, blocks, &joins)
}

fn complete_parts(parts: &[(Graph, Labeling)], need: usize) -> Result<Vec<Vertex>, ConstructError> {
    if parts.len() < need {
        return Err(ConstructError::TooFewParts { need, got: parts.len() });
    }
    parts
        .iter()
        .enumerate()
        .map(|(i, (g, f))| {
            require_complete(i, g, f)?;
            max_vertex(i, f)
        })
        .collect()
}

fn beta_parts(parts: &[(Graph, Labeling)]) -> Vec<(Graph, Labeling)> {
    parts.iter().map(|(g, f)| (g.clone(), f.as_beta())).collect()
}

/// The chain `G_1 - G'_1 - G_2 - ... - G_{r-1} - G'_{r-1} - G_r` of
/// completely graceful parts, where `G'_i` is a copy of `G_i`.
pub fn chain_with_copies(parts: &[(Graph, Labeling)]) -> Result<Certificate, ConstructError> {
    let maxes = complete_parts(parts, 2)?;
    let r = parts.len();
    let doubles = parts[..r - 1]
        .iter()
        .enumerate()
        .map(|(i, (g, f))| double_block(i, g, f, g.num_edges()))
        .collect::<Result<Vec<_>, _>>()?;
    let band = Band::new(&doubles);
    let (ra, ca) = (band.rows, band.cols);
    let (gr, fr) = &parts[r - 1];
    let nr = gr.num_vertices();
    let mut c = Canvas::adjacency(ra + nr + ca);
    let col_base = ra + nr;
    for (i, d) in doubles.iter().enumerate() {
        let (ro, co) = (band.row_off[i], band.col_off[i]);
        c.place(d, |a| ro + a, |b| col_base + co + b);
        let (g, f) = &parts[i];
        c.bind_cover(i, g, f, maxes[i], (i, 1, None), |l| ro + l, |l| col_base + co + l)?;
    }
    let mut joins = Vec::new();
    for i in 0..r - 1 {
        joins.push((part_of(i, maxes[i]), copy_of(i, maxes[i])));
        if i + 1 < r - 1 {
            c.set(band.last_row(&doubles, i), col_base + band.last_col(&doubles, i + 1));
            joins.push((part_of(i, maxes[i]), copy_of(i + 1, maxes[i + 1])));
        }
    }
    let adj = canonical_adjacency(gr, &fr.as_beta())?;
    c.place(&adj, |a| ra + a, |b| ra + b);
    c.bind_single(r - 1, fr, |l| ra + l);
    c.set(ra - 1, ra + nr - 1);
    joins.push((part_of(r - 2, maxes[r - 2]), part_of(r - 1, maxes[r - 1])));
    finish(c, Construction::ChainWithCopies, &beta_parts(parts), Vec::new(), &joins)
}

fn require_equal_sizes(parts: &[(Graph, Labeling)]) -> Result<(), ConstructError> {
    let m = parts[0].0.num_edges();
    for (i, (g, _)) in parts.iter().enumerate() {
        if g.num_edges() != m {
            return Err(ConstructError::UnequalSizes {
                first: 0,
                index: i,
                first_edges: m,
                index_edges: g.num_edges(),
            });
        }
    }
    Ok(())
}

/// A new vertex `v` joined to the max vertices of `G_1..G_r` and of copies
/// of `G_1..G_{r-1}`. All parts share the same edge count; `v` gets the
/// largest label.
pub fn star_join(parts: &[(Graph, Labeling)]) -> Result<Certificate, ConstructError> {
    let maxes = complete_parts(parts, 1)?;
    require_equal_sizes(parts)?;
    let r = parts.len();
    let w = parts[0].0.num_edges() + 1;
    let m = w - 1;
    let mut c = Canvas::adjacency((2 * r - 1) * w + 1);
    let v = (2 * r - 1) * w;
    c.bind(v, Origin::New);
    let mut joins = Vec::new();
    for (i, (g, f)) in parts[..r - 1].iter().enumerate() {
        let p = i * w;
        let q = (2 * r - 2 - i) * w;
        let adj = canonical_adjacency(g, &f.as_beta())?;
        c.place(&adj, |a| p + m - a, |b| q + m - b);
        c.bind_cover(i, g, f, maxes[i], (i, 1, None), |l| p + m - l, |l| q + m - l)?;
        c.set(v, p);
        c.set(v, q);
        joins.push((Origin::New, part_of(i, maxes[i])));
        joins.push((Origin::New, copy_of(i, maxes[i])));
    }
    let mid = (r - 1) * w;
    let (g, f) = &parts[r - 1];
    let adj = canonical_adjacency(g, &f.as_beta())?;
    c.place(&adj, |a| mid + m - a, |b| mid + m - b);
    c.bind_single(r - 1, f, |l| mid + m - l);
    c.set(v, mid);
    joins.push((Origin::New, part_of(r - 1, maxes[r - 1])));
    finish(c, Construction::StarJoin, &beta_parts(parts), Vec::new(), &joins)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum AttachMode {
    /// All parts have equal size.
    Strict,
    /// Mirrored parts have equal size and the host satisfies the neighbor
    /// condition `N(v_i) ⊆ {v_{r-i}, v_{r-i-1}, v_{r-i-2}}`.
    Relaxed,
}

/// Merge the max vertex of part `G_i` with host vertex `v_i` (the host
/// vertex labeled `i`), for `i = 0..=r`. Each pair `G_i`, `G_{r-i}` must be
/// isomorphic as trees rooted at their max vertices; the labeling of the
/// higher-indexed partner is transported from the lower one.
///
/// The host is recorded as the last input of the certificate.
pub fn attach_at_vertices(h: &(Graph, Labeling), parts: &[(Graph, Labeling)], mode: AttachMode) -> Result<Certificate, ConstructError> {
    let maxes = complete_parts(parts, 1)?;
    let (hg, hf) = h;
    let host = parts.len();
    if let Some(failure) = verify_beta(hg, &hf.as_beta()).failure {
        return Err(ConstructError::Host(failure.to_string()));
    }
    if !hf.is_complete(hg) || hg.num_vertices() != parts.len() {
        return Err(ConstructError::Host(format!(
            "must be completely graceful on {} vertices",
            parts.len()
        )));
    }
    let r = parts.len() - 1;
    match mode {
        AttachMode::Strict => require_equal_sizes(parts)?,
        AttachMode::Relaxed => {
            for i in 0..=r / 2 {
                let (a, b) = (parts[i].0.num_edges(), parts[r - i].0.num_edges());
                if a != b {
                    return Err(ConstructError::UnequalSizes {
                        first: i,
                        index: r - i,
                        first_edges: a,
                        index_edges: b,
                    });
                }
            }
            for u in hg.vertices() {
                let i = hf.label(u);
                for &w in hg.neighbors(u) {
                    let t = hf.label(w);
                    if t > r - i || r - i - t > 2 {
                        return Err(ConstructError::Host(format!(
                            "neighbor condition fails: v_{i} is adjacent to v_{t}"
                        )));
                    }
                }
            }
        }
    }
    let mut off = Vec::with_capacity(parts.len());
    let mut total = 0;
    for (g, _) in parts {
        off.push(total);
        total += g.num_vertices();
    }
    let mut c = Canvas::adjacency(total);
    for i in 0..=r / 2 {
        let j = r - i;
        let (g, f) = &parts[i];
        let adj = canonical_adjacency(g, &f.as_beta())?;
        let (oi, oj) = (off[i], off[j]);
        c.place(&adj, |a| oi + a, |b| oj + b);
        if i == j {
            c.bind_single(i, f, |l| oi + l);
            continue;
        }
        if !is_tree(g) {
            return Err(ConstructError::NotTree { index: i });
        }
        if !is_tree(&parts[j].0) {
            return Err(ConstructError::NotTree { index: j });
        }
        let phi = rooted_map(g, maxes[i], None, &parts[j].0, maxes[j], None).ok_or(ConstructError::NotIsomorphic { i, j })?;
        c.bind_cover(i, g, f, maxes[i], (j, 0, Some(&phi)), |l| oi + l, |l| oj + l)?;
    }
    let slot = |t: usize| off[t] + parts[t].0.num_vertices() - 1;
    for u in hg.vertices() {
        c.bind(slot(hf.label(u)), part_of(host, u));
    }
    for &(u, w) in hg.edges() {
        c.set(slot(hf.label(u)), slot(hf.label(w)));
    }
    let mut inputs = beta_parts(parts);
    inputs.push((hg.clone(), hf.as_beta()));
    // The host's vertices coincide with the parts' max vertices; checking
    // the host as a part covers its edges.
    let tag = match mode {
        AttachMode::Strict => Construction::Attach,
        AttachMode::Relaxed => Construction::AttachRelaxed,
    };
    finish(c, tag, &inputs, Vec::new(), &[])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
enum Axis {
    Center,
    Row,
    Col,
}

/// Merge-join chain: `G_1` and `G_2` share their max vertex, the copy of
/// `G_i` shares its max vertex with `G_{i+1}`, and each `G_i` (i ≥ 2) is
/// joined to its copy at the max vertices. Built from the doubles of
/// `G_2..G_r` laid alternately left and right of `G_1` reversed.
pub fn merge_join_chain(parts: &[(Graph, Labeling)]) -> Result<Certificate, ConstructError> {
    let maxes = complete_parts(parts, 2)?;
    let r = parts.len();
    let mut seq: VecDeque<Vec<(usize, Axis, Label)>> = VecDeque::new();
    let m1 = parts[0].0.num_edges();
    for l in (0..=m1).rev() {
        seq.push_back(vec![(0, Axis::Center, l)]);
    }
    // Left of the center, read left to right: ..., L_4, L_3, L_2.
    let mut left: VecDeque<Vec<(usize, Axis, Label)>> = VecDeque::new();
    let mut right: Vec<Vec<(usize, Axis, Label)>> = Vec::new();
    for (i, (part, _)) in parts.iter().enumerate().skip(1) {
        let m = part.num_edges();
        // Part index i is G_{i+1}; "even" below refers to i+1.
        let even = (i + 1) % 2 == 0;
        let l_seg: Vec<_> = if even {
            (0..=m).map(|l| (i, Axis::Row, l)).collect()
        } else {
            (0..=m).rev().map(|l| (i, Axis::Col, l)).collect()
        };
        let r_seg: Vec<_> = if even {
            (0..=m).map(|l| (i, Axis::Col, l)).collect()
        } else {
            (0..=m).rev().map(|l| (i, Axis::Row, l)).collect()
        };
        // Left: the segment's last element merges with the center's first
        // (i+1 = 2) or with the current leftmost slot (even i+1 ≥ 4).
        let mut l_slots: Vec<Vec<_>> = l_seg.into_iter().map(|e| vec![e]).collect();
        if even {
            let last = l_slots.pop().unwrap();
            if i == 1 {
                seq[0].extend(last);
            } else {
                left[0].extend(last);
            }
        }
        for s in l_slots.into_iter().rev() {
            left.push_front(s);
        }
        // Right: odd i+1 ≥ 3 merges its first element with the last slot.
        let mut r_slots = r_seg.into_iter().map(|e| vec![e]);
        if !even {
            let first = r_slots.next().unwrap();
            right.last_mut().unwrap().extend(first);
        }
        right.extend(r_slots);
    }
    let slots: Vec<_> = left.into_iter().chain(seq).chain(right).collect();
    let mut pos: HashMap<(usize, Axis, Label), usize> = HashMap::new();
    for (p, s) in slots.iter().enumerate() {
        for &e in s {
            pos.insert(e, p);
        }
    }
    let mut c = Canvas::adjacency(slots.len());
    let (g1, f1) = &parts[0];
    let adj = canonical_adjacency(g1, &f1.as_beta())?;
    c.place(&adj, |a| pos[&(0, Axis::Center, a)], |b| pos[&(0, Axis::Center, b)]);
    c.bind_single(0, f1, |l| pos[&(0, Axis::Center, l)]);
    let mut joins = Vec::new();
    for i in 1..r {
        let (g, f) = &parts[i];
        let d = double_block(i, g, f, g.num_edges())?;
        c.place(&d, |a| pos[&(i, Axis::Row, a)], |b| pos[&(i, Axis::Col, b)]);
        c.bind_cover(i, g, f, maxes[i], (i, 1, None), |l| pos[&(i, Axis::Row, l)], |l| pos[&(i, Axis::Col, l)])?;
        joins.push((part_of(i, maxes[i]), copy_of(i, maxes[i])));
    }
    finish(c, Construction::MergeJoin, &beta_parts(parts), Vec::new(), &joins)
}

/// Merge two labeled graphs at their max-labeled vertices. Vertices of `a`
/// keep their ids; those of `b` follow, skipping its max vertex.
pub fn glue(a: &(Graph, Labeling), b: &(Graph, Labeling)) -> Result<Graph, ConstructError> {
    let xa = max_vertex(0, &a.1)?;
    let xb = max_vertex(1, &b.1)?;
    let na = a.0.num_vertices();
    let map: Vec<Vertex> = (0..b.0.num_vertices())
        .map(|v| match v.cmp(&xb) {
            std::cmp::Ordering::Equal => xa,
            std::cmp::Ordering::Less => na + v,
            std::cmp::Ordering::Greater => na + v - 1,
        })
        .collect();
    let mut edges = a.0.edges().to_vec();
    edges.extend(b.0.edges().iter().map(|&(u, v)| (map[u], map[v])));
    Graph::new(na + b.0.num_vertices() - 1, &edges).map_err(|e| ConstructError::Structure(e.to_string()))
}

//! Binary matrices with vertex/label metadata, and the box-value calculus.
//!
//! Grids are stored 0-based and row-major. The box-value of a cell uses the
//! 1-based formula `R + j - i`, which in 0-based indices is the same value
//! since the offsets cancel.

use std::collections::HashMap;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{is_tree, Graph, Vertex};
use crate::labeling::{verify_alpha_bounded, Failure, Label, LabelKind, Labeling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Adjacency,
    Biadjacency,
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::Biadjacency => "biadjacency",
        })
    }
}

/// The four orientations of a biadjacency matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Transform {
    /// Rotate by 180 degrees: rows `k..0`, columns `m..k+1`.
    R,
    /// Transpose.
    T,
    /// Rotate, then transpose.
    RT,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MatrixError {
    #[error("cell ({i}, {j}) lies outside a {rows}x{cols} grid")]
    OutOfRange { i: usize, j: usize, rows: usize, cols: usize },
    #[error("grid has {found} cells, expected {expected}")]
    GridSize { expected: usize, found: usize },
    #[error("labeling has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has label {label} outside 0..={max}")]
    LabelOutOfRange { vertex: Vertex, label: Label, max: Label },
    #[error("label {0} is used twice")]
    DuplicateLabel(Label),
    #[error("labeling is not an alpha-labeling: {0}")]
    NotAlpha(Failure),
    #[error("expected a {expected} matrix")]
    WrongKind { expected: MatrixKind },
    #[error("inconsistent label metadata: {0}")]
    Metadata(String),
    #[error("matrix is not completely graceful: {}", describe_diagonals(.overfull, .deficient))]
    NotCompletelyGraceful { overfull: Vec<usize>, deficient: Vec<usize> },
    #[error("matrix is not in canonical orientation (rows 0..=k, columns k+1..=m, ascending)")]
    NotCanonical,
    #[error("no row or column carries label {0}")]
    UnknownLabel(Label),
}

fn describe_diagonals(overfull: &[usize], deficient: &[usize]) -> String {
    let mut parts = Vec::new();
    if !overfull.is_empty() {
        parts.push(format!("diagonals with two or more 1s: {overfull:?}"));
    }
    if !deficient.is_empty() {
        parts.push(format!("empty diagonals: {deficient:?}"));
    }
    parts.join("; ")
}

/// A 0/1 grid whose rows and columns carry `(vertex, label)` metadata.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabeledMatrix {
    kind: MatrixKind,
    rows: usize,
    cols: usize,
    cells: Vec<bool>,
    row_labels: Vec<(Vertex, Label)>,
    col_labels: Vec<(Vertex, Label)>,
    critical: Option<Label>,
}

impl LabeledMatrix {
    /// Build and validate. Adjacency matrices must be square, symmetric,
    /// zero on the principal diagonal, and carry identical row and column
    /// metadata. Every vertex id and every label appears once (per axis for
    /// adjacency).
    pub fn new(
        kind: MatrixKind,
        row_labels: Vec<(Vertex, Label)>,
        col_labels: Vec<(Vertex, Label)>,
        cells: Vec<bool>,
        critical: Option<Label>,
    ) -> Result<Self, MatrixError> {
        let (rows, cols) = (row_labels.len(), col_labels.len());
        if cells.len() != rows * cols {
            return Err(MatrixError::GridSize {
                expected: rows * cols,
                found: cells.len(),
            });
        }
        let m = Self {
            kind,
            rows,
            cols,
            cells,
            row_labels,
            col_labels,
            critical,
        };
        m.validate()?;
        Ok(m)
    }

    /// Build from labels alone; each vertex id equals its label.
    pub fn from_labels(
        kind: MatrixKind,
        row_labels: &[Label],
        col_labels: &[Label],
        cells: Vec<bool>,
        critical: Option<Label>,
    ) -> Result<Self, MatrixError> {
        let rl = row_labels.iter().map(|&l| (l, l)).collect();
        let cl = col_labels.iter().map(|&l| (l, l)).collect();
        Self::new(kind, rl, cl, cells, critical)
    }

    fn validate(&self) -> Result<(), MatrixError> {
        let dup = |list: &[(Vertex, Label)]| -> Result<(), MatrixError> {
            let mut v_seen = HashMap::new();
            let mut l_seen = HashMap::new();
            for &(v, l) in list {
                if v_seen.insert(v, ()).is_some() {
                    return Err(MatrixError::Metadata(format!("vertex {v} appears twice")));
                }
                if l_seen.insert(l, ()).is_some() {
                    return Err(MatrixError::DuplicateLabel(l));
                }
            }
            Ok(())
        };
        match self.kind {
            MatrixKind::Adjacency => {
                if self.row_labels != self.col_labels {
                    return Err(MatrixError::Metadata(
                        "adjacency rows and columns must carry the same vertices in the same order".into(),
                    ));
                }
                dup(&self.row_labels)?;
                for i in 0..self.rows {
                    if self.get(i, i) {
                        return Err(MatrixError::Metadata(format!("principal diagonal entry {i} is 1")));
                    }
                    for j in i + 1..self.cols {
                        if self.get(i, j) != self.get(j, i) {
                            return Err(MatrixError::Metadata(format!("entries ({i}, {j}) and ({j}, {i}) differ")));
                        }
                    }
                }
            }
            MatrixKind::Biadjacency => {
                let mut all = self.row_labels.clone();
                all.extend_from_slice(&self.col_labels);
                dup(&all)?;
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> MatrixKind {
        self.kind
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.cells[i * self.cols + j]
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }

    pub fn row_labels(&self) -> &[(Vertex, Label)] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[(Vertex, Label)] {
        &self.col_labels
    }

    pub fn critical(&self) -> Option<Label> {
        self.critical
    }

    /// Positions of all 1s, row-major.
    pub fn ones(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let cols = self.cols;
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(p, _)| (p / cols, p % cols))
    }

    /// 0-based box-value of a cell (equal to the 1-based formula).
    pub fn box_at(&self, i: usize, j: usize) -> usize {
        self.rows + j - i
    }

    pub fn row_of_label(&self, label: Label) -> Option<usize> {
        self.row_labels.iter().position(|&(_, l)| l == label)
    }

    pub fn col_of_label(&self, label: Label) -> Option<usize> {
        self.col_labels.iter().position(|&(_, l)| l == label)
    }

    /// The grid as lines of `0`/`1` characters.
    pub fn grid_lines(&self) -> Vec<String> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| if self.get(i, j) { '1' } else { '0' }).collect())
            .collect()
    }

    /// One 1 per row of the grid viewed as edges: `(row vertex, col vertex)`.
    fn edge_pairs(&self) -> Vec<(Vertex, Vertex)> {
        let mut out = Vec::new();
        for (i, j) in self.ones() {
            if self.kind == MatrixKind::Adjacency && j < i {
                continue;
            }
            out.push((self.row_labels[i].0, self.col_labels[j].0));
        }
        out
    }

    /// True when rows are labels `0..=k` and columns `k+1..=m`, both ascending.
    pub fn is_canonical_biadjacency(&self) -> bool {
        self.kind == MatrixKind::Biadjacency
            && self.row_labels.iter().enumerate().all(|(i, &(_, l))| l == i)
            && self.col_labels.iter().enumerate().all(|(j, &(_, l))| l == self.rows + j)
    }

    pub(crate) fn with_cells(&self, cells: Vec<bool>) -> LabeledMatrix {
        LabeledMatrix {
            cells,
            ..self.clone()
        }
    }
}

/// Box-value `R + j - i` of the 1-based cell `(i, j)`.
pub fn box_value(rows: usize, cols: usize, i: usize, j: usize) -> Result<usize, MatrixError> {
    if i == 0 || j == 0 || i > rows || j > cols {
        return Err(MatrixError::OutOfRange { i, j, rows, cols });
    }
    Ok(rows + j - i)
}

/// Outcome of a diagonal test. Diagonal `c` collects cells of box-value `c`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct GridVerdict {
    pub ok: bool,
    pub overfull: Vec<usize>,
    pub deficient: Vec<usize>,
}

impl GridVerdict {
    /// The smallest offending diagonal, if any.
    pub fn first_violation(&self) -> Option<usize> {
        self.overfull.iter().chain(&self.deficient).min().copied()
    }
}

fn diagonal_counts(m: &LabeledMatrix) -> Vec<usize> {
    let mut counts = vec![0usize; m.rows + m.cols];
    for (i, j) in m.ones() {
        counts[m.box_at(i, j)] += 1;
    }
    counts
}

/// Every diagonal holds at most one 1.
pub fn is_graceful_grid(m: &LabeledMatrix) -> GridVerdict {
    let counts = diagonal_counts(m);
    let overfull: Vec<_> = (1..counts.len()).filter(|&c| counts[c] > 1).collect();
    GridVerdict {
        ok: overfull.is_empty(),
        overfull,
        deficient: Vec::new(),
    }
}

/// Every diagonal holds exactly one 1, except the principal diagonal of an
/// adjacency matrix, which holds none.
pub fn is_completely_graceful(m: &LabeledMatrix) -> GridVerdict {
    let counts = diagonal_counts(m);
    let mut overfull = Vec::new();
    let mut deficient = Vec::new();
    for (c, &count) in counts.iter().enumerate().skip(1) {
        let want = if m.kind == MatrixKind::Adjacency && c == m.rows { 0 } else { 1 };
        if count > want {
            overfull.push(c);
        } else if count < want {
            deficient.push(c);
        }
    }
    GridVerdict {
        ok: overfull.is_empty() && deficient.is_empty(),
        overfull,
        deficient,
    }
}

pub(crate) fn require_complete(m: &LabeledMatrix) -> Result<(), MatrixError> {
    let v = is_completely_graceful(m);
    if v.ok {
        Ok(())
    } else {
        Err(MatrixError::NotCompletelyGraceful {
            overfull: v.overfull,
            deficient: v.deficient,
        })
    }
}

/// Labels of the augmented graph: the given labels, then unused values in
/// ascending order for the padding vertices `n..=bound`.
fn padded_labels(g: &Graph, f: &Labeling, bound: Label) -> Result<Vec<Label>, MatrixError> {
    if f.len() != g.num_vertices() {
        return Err(MatrixError::LengthMismatch {
            expected: g.num_vertices(),
            found: f.len(),
        });
    }
    let mut used = vec![false; bound + 1];
    for (v, &l) in f.labels().iter().enumerate() {
        if l > bound {
            return Err(MatrixError::LabelOutOfRange { vertex: v, label: l, max: bound });
        }
        if used[l] {
            return Err(MatrixError::DuplicateLabel(l));
        }
        used[l] = true;
    }
    let mut labels = f.labels().to_vec();
    labels.extend((0..=bound).filter(|&l| !used[l]));
    Ok(labels)
}

fn by_label(labels: &[Label]) -> Vec<Vertex> {
    let mut order = vec![0; labels.len()];
    for (v, &l) in labels.iter().enumerate() {
        order[l] = v;
    }
    order
}

/// Adjacency matrix of the augmented graph, vertices in ascending label order.
pub fn canonical_adjacency(g: &Graph, f: &Labeling) -> Result<LabeledMatrix, MatrixError> {
    canonical_adjacency_bounded(g, f, g.num_edges())
}

/// As [`canonical_adjacency`] with labels allowed up to `bound`.
pub fn canonical_adjacency_bounded(g: &Graph, f: &Labeling, bound: Label) -> Result<LabeledMatrix, MatrixError> {
    let labels = padded_labels(g, f, bound)?;
    let order = by_label(&labels);
    let n = order.len();
    let mut cells = vec![false; n * n];
    for &(u, v) in g.edges() {
        let (a, b) = (labels[u], labels[v]);
        cells[a * n + b] = true;
        cells[b * n + a] = true;
    }
    let meta: Vec<_> = order.iter().map(|&v| (v, labels[v])).collect();
    LabeledMatrix::new(MatrixKind::Adjacency, meta.clone(), meta, cells, None)
}

/// Biadjacency matrix with rows labeled `0..=k` and columns `k+1..=m`.
pub fn canonical_biadjacency(g: &Graph, f: &Labeling) -> Result<LabeledMatrix, MatrixError> {
    canonical_biadjacency_bounded(g, f, g.num_edges())
}

/// As [`canonical_biadjacency`] with labels allowed up to `bound`.
pub fn canonical_biadjacency_bounded(g: &Graph, f: &Labeling, bound: Label) -> Result<LabeledMatrix, MatrixError> {
    let verdict = verify_alpha_bounded(g, f, bound);
    if !verdict.ok {
        return Err(MatrixError::NotAlpha(verdict.failure.unwrap()));
    }
    let k = verdict.critical.unwrap();
    let labels = padded_labels(g, f, bound)?;
    let order = by_label(&labels);
    let rows: Vec<_> = order[..=k].iter().map(|&v| (v, labels[v])).collect();
    let cols: Vec<_> = order[k + 1..].iter().map(|&v| (v, labels[v])).collect();
    let width = cols.len();
    let mut cells = vec![false; rows.len() * width];
    for &(u, v) in g.edges() {
        let (a, b) = (labels[u].min(labels[v]), labels[u].max(labels[v]));
        cells[a * width + (b - k - 1)] = true;
    }
    LabeledMatrix::new(MatrixKind::Biadjacency, rows, cols, cells, Some(k))
}

/// Reorient a biadjacency matrix, carrying the metadata along.
pub fn transform(m: &LabeledMatrix, which: Transform) -> Result<LabeledMatrix, MatrixError> {
    if m.kind != MatrixKind::Biadjacency {
        return Err(MatrixError::WrongKind {
            expected: MatrixKind::Biadjacency,
        });
    }
    Ok(match which {
        Transform::R => rotate(m),
        Transform::T => transpose(m),
        Transform::RT => transpose(&rotate(m)),
    })
}

fn rotate(m: &LabeledMatrix) -> LabeledMatrix {
    let mut cells = m.cells.clone();
    cells.reverse();
    let mut row_labels = m.row_labels.clone();
    row_labels.reverse();
    let mut col_labels = m.col_labels.clone();
    col_labels.reverse();
    LabeledMatrix {
        cells,
        row_labels,
        col_labels,
        ..m.clone()
    }
}

fn transpose(m: &LabeledMatrix) -> LabeledMatrix {
    let mut cells = vec![false; m.cells.len()];
    for i in 0..m.rows {
        for j in 0..m.cols {
            cells[j * m.rows + i] = m.get(i, j);
        }
    }
    LabeledMatrix {
        kind: m.kind,
        rows: m.cols,
        cols: m.rows,
        cells,
        row_labels: m.col_labels.clone(),
        col_labels: m.row_labels.clone(),
        critical: m.critical,
    }
}

/// Rebuild the labeled graph a matrix describes. Vertex ids come from the
/// metadata and must be exactly `0..N`.
pub fn matrix_to_graph(m: &LabeledMatrix) -> Result<(Graph, Labeling), MatrixError> {
    let mut meta: Vec<(Vertex, Label)> = m.row_labels.clone();
    if m.kind == MatrixKind::Biadjacency {
        meta.extend_from_slice(&m.col_labels);
    }
    let n = meta.len();
    let mut labels = vec![usize::MAX; n];
    for &(v, l) in &meta {
        if v >= n || labels[v] != usize::MAX {
            return Err(MatrixError::Metadata(format!("vertex ids are not a permutation of 0..{n}")));
        }
        labels[v] = l;
    }
    let mut sorted: Vec<_> = labels.clone();
    sorted.sort_unstable();
    if sorted.iter().enumerate().any(|(i, &l)| i != l) {
        return Err(MatrixError::Metadata(format!("labels are not exactly 0..{n}")));
    }
    let g = Graph::new(n, &m.edge_pairs()).map_err(|e| MatrixError::Metadata(e.to_string()))?;
    let f = match m.kind {
        MatrixKind::Adjacency => Labeling::beta(labels),
        MatrixKind::Biadjacency => {
            let (low, high) = if m.row_labels.iter().any(|&(_, l)| l == 0) {
                (&m.row_labels, &m.col_labels)
            } else {
                (&m.col_labels, &m.row_labels)
            };
            let k = low.len().checked_sub(1).ok_or_else(|| MatrixError::Metadata("no low side".into()))?;
            if low.iter().any(|&(_, l)| l > k) || high.iter().any(|&(_, l)| l <= k) {
                return Err(MatrixError::Metadata(
                    "one side must carry labels 0..=k and the other k+1..=m".into(),
                ));
            }
            if m.critical.is_some_and(|c| c != k) {
                return Err(MatrixError::Metadata(format!(
                    "declared critical number {} but the low side ends at {k}",
                    m.critical.unwrap()
                )));
            }
            Labeling::alpha(labels, k)
        }
    };
    Ok((g, f))
}

/// Move a 1 from one `(row label, column label)` cell to another.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Move {
    pub from: (Label, Label),
    pub to: (Label, Label),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ShiftError {
    #[error(transparent)]
    Matrix(#[from] MatrixError),
    #[error("cell {{{0}, {1}}} holds no 1")]
    FromEmpty(Label, Label),
    #[error("cell {{{0}, {1}}} is already occupied")]
    Collision(Label, Label),
    #[error("the shifted matrix does not describe a tree")]
    NotTree,
}

fn cell_of(m: &LabeledMatrix, (r, c): (Label, Label)) -> Result<(usize, usize), MatrixError> {
    let i = m.row_of_label(r).ok_or(MatrixError::UnknownLabel(r))?;
    let j = m.col_of_label(c).ok_or(MatrixError::UnknownLabel(c))?;
    Ok((i, j))
}

/// Apply all moves at once, then require complete gracefulness (and, when
/// asked, that the result is the biadjacency matrix of a tree).
pub fn shift_ones(m: &LabeledMatrix, moves: &[Move], require_tree: bool) -> Result<LabeledMatrix, ShiftError> {
    if m.kind != MatrixKind::Biadjacency {
        return Err(MatrixError::WrongKind {
            expected: MatrixKind::Biadjacency,
        }
        .into());
    }
    let mut cells = m.cells.clone();
    let mut targets = Vec::with_capacity(moves.len());
    for mv in moves {
        let (i, j) = cell_of(m, mv.from)?;
        if !cells[i * m.cols + j] {
            return Err(ShiftError::FromEmpty(mv.from.0, mv.from.1));
        }
        cells[i * m.cols + j] = false;
        targets.push((cell_of(m, mv.to)?, mv.to));
    }
    for ((i, j), to) in targets {
        if cells[i * m.cols + j] {
            return Err(ShiftError::Collision(to.0, to.1));
        }
        cells[i * m.cols + j] = true;
    }
    let out = m.with_cells(cells);
    require_complete(&out)?;
    if require_tree {
        let (g, _) = matrix_to_graph(&out)?;
        if !is_tree(&g) {
            return Err(ShiftError::NotTree);
        }
    }
    Ok(out)
}

fn require_canonical(m: &LabeledMatrix) -> Result<(), MatrixError> {
    if !m.is_canonical_biadjacency() {
        return Err(MatrixError::NotCanonical);
    }
    Ok(())
}

fn next_vertex_id(m: &LabeledMatrix) -> Vertex {
    m.row_labels.len() + m.col_labels.len()
}

/// Insert a new row holding a single 1 in the column labeled `target_col`.
/// The row goes directly below the row labeled `after_row`, or on top when
/// `after_row` is `None`. Existing vertices keep their ids, the new vertex
/// takes the next free id, and labels are re-derived from positions.
pub fn insert_pendant_row(m: &LabeledMatrix, after_row: Option<Label>, target_col: Label) -> Result<LabeledMatrix, MatrixError> {
    require_canonical(m)?;
    let at = match after_row {
        None => 0,
        Some(l) => m.row_of_label(l).ok_or(MatrixError::UnknownLabel(l))? + 1,
    };
    let tj = m.col_of_label(target_col).ok_or(MatrixError::UnknownLabel(target_col))?;
    let mut row_ids: Vec<Vertex> = m.row_labels.iter().map(|&(v, _)| v).collect();
    row_ids.insert(at, next_vertex_id(m));
    let mut cells = Vec::with_capacity((m.rows + 1) * m.cols);
    for i in 0..=m.rows {
        if i == at {
            cells.extend((0..m.cols).map(|j| j == tj));
        }
        if i < m.rows {
            cells.extend_from_slice(&m.cells[i * m.cols..(i + 1) * m.cols]);
        }
    }
    let col_ids: Vec<Vertex> = m.col_labels.iter().map(|&(v, _)| v).collect();
    rebuild_canonical(row_ids, col_ids, cells)
}

/// Insert a new column holding a single 1 in the row labeled `target_row`,
/// directly right of the column labeled `after_col` (leftmost when `None`).
pub fn insert_pendant_column(m: &LabeledMatrix, after_col: Option<Label>, target_row: Label) -> Result<LabeledMatrix, MatrixError> {
    require_canonical(m)?;
    let at = match after_col {
        None => 0,
        Some(l) => m.col_of_label(l).ok_or(MatrixError::UnknownLabel(l))? + 1,
    };
    let ti = m.row_of_label(target_row).ok_or(MatrixError::UnknownLabel(target_row))?;
    let mut col_ids: Vec<Vertex> = m.col_labels.iter().map(|&(v, _)| v).collect();
    col_ids.insert(at, next_vertex_id(m));
    let mut cells = Vec::with_capacity(m.rows * (m.cols + 1));
    for i in 0..m.rows {
        for j in 0..=m.cols {
            if j == at {
                cells.push(i == ti);
            }
            if j < m.cols {
                cells.push(m.get(i, j));
            }
        }
    }
    let row_ids: Vec<Vertex> = m.row_labels.iter().map(|&(v, _)| v).collect();
    rebuild_canonical(row_ids, col_ids, cells)
}

fn rebuild_canonical(row_ids: Vec<Vertex>, col_ids: Vec<Vertex>, cells: Vec<bool>) -> Result<LabeledMatrix, MatrixError> {
    let r = row_ids.len();
    let rows = row_ids.into_iter().enumerate().map(|(i, v)| (v, i)).collect();
    let cols = col_ids.into_iter().enumerate().map(|(j, v)| (v, r + j)).collect();
    let out = LabeledMatrix::new(MatrixKind::Biadjacency, rows, cols, cells, r.checked_sub(1))?;
    require_complete(&out)?;
    Ok(out)
}

/// Insert a pendant vertex into an adjacency matrix at position `at`
/// (0..=N), adjacent to the vertex labeled `target`. Labels are re-derived
/// from positions; the new vertex takes id N.
pub fn insert_pendant_adjacent(m: &LabeledMatrix, at: usize, target: Label) -> Result<LabeledMatrix, MatrixError> {
    if m.kind != MatrixKind::Adjacency {
        return Err(MatrixError::WrongKind {
            expected: MatrixKind::Adjacency,
        });
    }
    let n = m.rows;
    if at > n {
        return Err(MatrixError::OutOfRange { i: at, j: at, rows: n, cols: n });
    }
    let t = m.row_of_label(target).ok_or(MatrixError::UnknownLabel(target))?;
    let old = |p: usize| -> Option<usize> {
        match p.cmp(&at) {
            std::cmp::Ordering::Less => Some(p),
            std::cmp::Ordering::Equal => None,
            std::cmp::Ordering::Greater => Some(p - 1),
        }
    };
    let nn = n + 1;
    let mut cells = vec![false; nn * nn];
    for i in 0..nn {
        for j in 0..nn {
            cells[i * nn + j] = match (old(i), old(j)) {
                (Some(a), Some(b)) => m.get(a, b),
                (None, Some(b)) => b == t,
                (Some(a), None) => a == t,
                (None, None) => false,
            };
        }
    }
    let mut ids: Vec<Vertex> = m.row_labels.iter().map(|&(v, _)| v).collect();
    ids.insert(at, n);
    let meta: Vec<_> = ids.into_iter().enumerate().map(|(p, v)| (v, p)).collect();
    let out = LabeledMatrix::new(MatrixKind::Adjacency, meta.clone(), meta, cells, None)?;
    require_complete(&out)?;
    Ok(out)
}

/// The labeling a matrix assigns, as a kind-tagged [`Labeling`].
pub fn labeling_kind(m: &LabeledMatrix) -> LabelKind {
    match m.kind {
        MatrixKind::Adjacency => LabelKind::Beta,
        MatrixKind::Biadjacency => LabelKind::Alpha,
    }
}

//! Text codecs: edge lists, labelings, matrices, shift moves, and DOT.
//!
//! Writers emit LF line endings without trailing whitespace; parsing a
//! written file and writing it again gives the same bytes.

use std::fmt::Write as _;

use thiserror::Error;

use crate::graph::{Graph, GraphError};
use crate::labeling::{Label, LabelKind, Labeling};
use crate::matrix::{LabeledMatrix, MatrixError, MatrixKind, Move};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("unexpected end of input: {0}")]
    Truncated(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Matrix(#[from] MatrixError),
}

fn syntax(line: usize, message: impl Into<String>) -> FormatError {
    FormatError::Syntax {
        line,
        message: message.into(),
    }
}

/// Non-empty lines that are not `#` comments, with 1-based line numbers.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn numbers<const N: usize>(line: usize, s: &str) -> Result<[usize; N], FormatError> {
    let parts: Vec<_> = s.split_whitespace().collect();
    if parts.len() != N {
        return Err(syntax(line, format!("expected {N} numbers, found {}", parts.len())));
    }
    let mut out = [0; N];
    for (slot, p) in out.iter_mut().zip(parts) {
        *slot = p.parse().map_err(|_| syntax(line, format!("not a non-negative integer: {p:?}")))?;
    }
    Ok(out)
}

/// Largest vertex count an edge list may declare; the header alone would
/// otherwise size the adjacency table.
pub const MAX_VERTICES: usize = 1 << 20;

pub fn parse_edge_list(text: &str) -> Result<Graph, FormatError> {
    let mut lines = content_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| FormatError::Truncated("missing \"n m\" header".into()))?;
    let [n, m] = numbers::<2>(ln, header)?;
    if n > MAX_VERTICES {
        return Err(syntax(ln, format!("{n} vertices exceeds the limit of {MAX_VERTICES}")));
    }
    let mut edges = Vec::with_capacity(m.min(1 << 16));
    for (ln, l) in lines {
        if edges.len() == m {
            return Err(syntax(ln, format!("more than the declared {m} edges")));
        }
        let [u, v] = numbers::<2>(ln, l)?;
        edges.push((u, v));
    }
    if edges.len() != m {
        return Err(FormatError::Truncated(format!("declared {m} edges, found {}", edges.len())));
    }
    Ok(Graph::new(n, &edges)?)
}

pub fn write_edge_list(g: &Graph) -> String {
    let mut out = format!("{} {}\n", g.num_vertices(), g.num_edges());
    for &(u, v) in g.edges() {
        let _ = writeln!(out, "{u} {v}");
    }
    out
}

pub fn parse_labeling(text: &str) -> Result<Labeling, FormatError> {
    let mut lines = content_lines(text).peekable();
    let (ln, head) = lines.next().ok_or_else(|| FormatError::Truncated("missing \"kind\" line".into()))?;
    let kind = match head.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["kind", "alpha"] => LabelKind::Alpha,
        ["kind", "beta"] => LabelKind::Beta,
        _ => return Err(syntax(ln, "expected \"kind alpha\" or \"kind beta\"")),
    };
    let mut critical = None;
    if let Some(&(ln, l)) = lines.peek() {
        if let Some(rest) = l.strip_prefix("critical") {
            let [k] = numbers::<1>(ln, rest)?;
            critical = Some(k);
            lines.next();
        }
    }
    if critical.is_some() && kind == LabelKind::Beta {
        return Err(syntax(ln, "a beta labeling has no critical number"));
    }
    let mut pairs = Vec::new();
    for (ln, l) in lines {
        let [v, label] = numbers::<2>(ln, l)?;
        pairs.push((ln, v, label));
    }
    let mut labels = vec![None; pairs.len()];
    for (ln, v, label) in pairs {
        let slot = labels
            .get_mut(v)
            .ok_or_else(|| syntax(ln, format!("vertex {v} is out of range; vertices must be 0..n")))?;
        if slot.replace(label).is_some() {
            return Err(syntax(ln, format!("vertex {v} labeled twice")));
        }
    }
    let labels: Vec<Label> = labels.into_iter().map(Option::unwrap).collect();
    Ok(match (kind, critical) {
        (LabelKind::Alpha, Some(k)) => Labeling::alpha(labels, k),
        (LabelKind::Alpha, None) => Labeling::alpha_derived(labels),
        _ => Labeling::beta(labels),
    })
}

pub fn write_labeling(f: &Labeling) -> String {
    let mut out = format!("kind {}\n", f.kind());
    if let Some(k) = f.critical() {
        let _ = writeln!(out, "critical {k}");
    }
    for (v, l) in f.labels().iter().enumerate() {
        let _ = writeln!(out, "{v} {l}");
    }
    out
}

/// Matrix files carry labels only; parsed vertices take their label as id.
pub fn parse_matrix(text: &str) -> Result<LabeledMatrix, FormatError> {
    let lines: Vec<&str> = text.lines().collect();
    let get = |i: usize| -> Result<&str, FormatError> {
        lines
            .get(i)
            .copied()
            .ok_or_else(|| FormatError::Truncated(format!("missing line {}", i + 1)))
    };
    let head: Vec<&str> = get(0)?.split_whitespace().collect();
    let kind = match head.first() {
        Some(&"adjacency") => MatrixKind::Adjacency,
        Some(&"biadjacency") => MatrixKind::Biadjacency,
        _ => return Err(syntax(1, "expected \"adjacency\" or \"biadjacency\"")),
    };
    let dims = numbers_vec(1, &head[1..])?;
    let (rows, cols, critical) = match (kind, dims.as_slice()) {
        (MatrixKind::Adjacency, &[r, c]) => (r, c, None),
        (MatrixKind::Biadjacency, &[r, c]) => (r, c, None),
        (MatrixKind::Biadjacency, &[r, c, k]) => (r, c, Some(k)),
        _ => return Err(syntax(1, "expected \"kind R C\" (and an optional k for biadjacency)")),
    };
    let row_labels = numbers_vec(2, &get(1)?.split_whitespace().collect::<Vec<_>>())?;
    let col_labels = numbers_vec(3, &get(2)?.split_whitespace().collect::<Vec<_>>())?;
    if row_labels.len() != rows {
        return Err(syntax(2, format!("expected {rows} row labels, found {}", row_labels.len())));
    }
    if col_labels.len() != cols {
        return Err(syntax(3, format!("expected {cols} column labels, found {}", col_labels.len())));
    }
    let mut cells = Vec::with_capacity(rows.saturating_mul(cols).min(1 << 20));
    for i in 0..rows {
        let line = get(3 + i)?;
        if line.len() != cols {
            return Err(syntax(4 + i, format!("expected {cols} cells, found {}", line.len())));
        }
        for ch in line.chars() {
            match ch {
                '0' => cells.push(false),
                '1' => cells.push(true),
                _ => return Err(syntax(4 + i, format!("unexpected character {ch:?}"))),
            }
        }
    }
    if let Some((i, _)) = lines.iter().enumerate().skip(3 + rows).find(|(_, l)| !l.trim().is_empty()) {
        return Err(syntax(i + 1, "trailing content after the grid"));
    }
    Ok(LabeledMatrix::from_labels(kind, &row_labels, &col_labels, cells, critical)?)
}

fn numbers_vec(line: usize, parts: &[&str]) -> Result<Vec<usize>, FormatError> {
    parts
        .iter()
        .map(|p| p.parse().map_err(|_| syntax(line, format!("not a non-negative integer: {p:?}"))))
        .collect()
}

fn join(labels: impl Iterator<Item = Label>) -> String {
    labels.map(|l| l.to_string()).collect::<Vec<_>>().join(" ")
}

pub fn write_matrix(m: &LabeledMatrix) -> String {
    let mut out = format!("{} {} {}", m.kind(), m.rows(), m.cols());
    if m.kind() == MatrixKind::Biadjacency {
        if let Some(k) = m.critical() {
            let _ = write!(out, " {k}");
        }
    }
    out.push('\n');
    out.push_str(&join(m.row_labels().iter().map(|&(_, l)| l)));
    out.push('\n');
    out.push_str(&join(m.col_labels().iter().map(|&(_, l)| l)));
    out.push('\n');
    for line in m.grid_lines() {
        out.push_str(&line);
        out.push('\n');
    }
    out
}

/// One move per line: `r c -> r' c'`, all four being labels.
pub fn parse_moves(text: &str) -> Result<Vec<Move>, FormatError> {
    content_lines(text)
        .map(|(ln, l)| {
            let (from, to) = l.split_once("->").ok_or_else(|| syntax(ln, "expected \"r c -> r' c'\""))?;
            let [a, b] = numbers::<2>(ln, from)?;
            let [c, d] = numbers::<2>(ln, to)?;
            Ok(Move {
                from: (a, b),
                to: (c, d),
            })
        })
        .collect()
}

pub fn write_moves(moves: &[Move]) -> String {
    moves
        .iter()
        .map(|m| format!("{} {} -> {} {}\n", m.from.0, m.from.1, m.to.0, m.to.1))
        .collect()
}

/// Graphviz text. With a labeling, nodes are captioned with vertex labels
/// and edges with edge labels, and everything is listed by ascending label.
pub fn to_dot(g: &Graph, f: Option<&Labeling>) -> String {
    let mut out = String::from("graph G {\n");
    match f {
        None => {
            for v in g.vertices() {
                let _ = writeln!(out, "  {v};");
            }
            for &(u, v) in g.edges() {
                let _ = writeln!(out, "  {u} -- {v};");
            }
        }
        Some(f) => {
            let mut order: Vec<_> = g.vertices().collect();
            order.sort_by_key(|&v| f.label(v));
            for &v in &order {
                let _ = writeln!(out, "  {v} [label=\"{}\"];", f.label(v));
            }
            let mut edges: Vec<_> = g
                .edges()
                .iter()
                .map(|&(u, v)| if f.label(u) < f.label(v) { (u, v) } else { (v, u) })
                .collect();
            edges.sort_by_key(|&(u, v)| (f.label(u), f.label(v)));
            for (u, v) in edges {
                let _ = writeln!(out, "  {u} -- {v} [label=\"{}\"];", f.label(u).abs_diff(f.label(v)));
            }
        }
    }
    out.push_str("}\n");
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn edge_list_round_trip_with_comments() {
        let g = parse_edge_list("# K2\n2 1\n\n1 0\n").unwrap();
        assert_eq!(write_edge_list(&g), "2 1\n0 1\n");
        assert!(matches!(parse_edge_list("2 2\n0 1\n"), Err(FormatError::Truncated(_))));
        assert!(matches!(parse_edge_list("3 2\n0 1\n0 1\n"), Err(FormatError::Graph(_))));
        assert!(matches!(parse_edge_list("2 1\n0 x\n"), Err(FormatError::Syntax { line: 2, .. })));
    }

    #[test]
    fn labeling_round_trip() {
        let text = "kind alpha\ncritical 1\n0 0\n1 3\n2 1\n3 2\n";
        let f = parse_labeling(text).unwrap();
        assert_eq!(f.critical(), Some(1));
        assert_eq!(write_labeling(&f), text);
        assert!(parse_labeling("kind beta\n0 0\n0 1\n").is_err());
        assert!(parse_labeling("kind beta\ncritical 0\n0 0\n").is_err());
        assert!(parse_labeling("kind gamma\n").is_err());
    }

    #[test]
    fn matrix_round_trip() {
        let text = "biadjacency 1 1 0\n0\n1\n1\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(write_matrix(&m), text);
        let k1 = "biadjacency 1 0 0\n0\n\n\n";
        assert_eq!(write_matrix(&parse_matrix(k1).unwrap()), k1);
        assert!(parse_matrix("biadjacency 1 1\n0\n1\n2\n").is_err());
        assert!(parse_matrix("adjacency 2 2\n0 1\n0 1\n01\n00\n").is_err());
    }

    #[test]
    fn moves_round_trip() {
        let text = "1 21 -> 1 17\n4 20 -> 0 20\n";
        assert_eq!(write_moves(&parse_moves(text).unwrap()), text);
        assert!(parse_moves("1 2 3 4\n").is_err());
    }

    #[test]
    fn dot_for_k2() {
        let g = Graph::new(2, &[(0, 1)]).unwrap();
        let f = Labeling::beta(vec![1, 0]);
        assert_eq!(
            to_dot(&g, Some(&f)),
            "graph G {\n  1 [label=\"0\"];\n  0 [label=\"1\"];\n  1 -- 0 [label=\"1\"];\n}\n"
        );
        assert_eq!(to_dot(&g, None), "graph G {\n  0;\n  1;\n  0 -- 1;\n}\n");
    }
}

//! Vertex labelings and their verifiers.

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::graph::{Graph, GraphError, Vertex};

pub type Label = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum LabelKind {
    Beta,
    Alpha,
}

impl fmt::Display for LabelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            LabelKind::Beta => "beta",
            LabelKind::Alpha => "alpha",
        })
    }
}

/// A vertex labeling: `labels[v]` is the label of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct Labeling {
    labels: Vec<Label>,
    kind: LabelKind,
    critical: Option<Label>,
}

impl Labeling {
    pub fn beta(labels: Vec<Label>) -> Self {
        Self {
            labels,
            kind: LabelKind::Beta,
            critical: None,
        }
    }

    pub fn alpha(labels: Vec<Label>, critical: Label) -> Self {
        Self {
            labels,
            kind: LabelKind::Alpha,
            critical: Some(critical),
        }
    }

    /// An alpha claim whose critical number the verifier derives.
    pub fn alpha_derived(labels: Vec<Label>) -> Self {
        Self {
            labels,
            kind: LabelKind::Alpha,
            critical: None,
        }
    }

    pub fn label(&self, v: Vertex) -> Label {
        self.labels[v]
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn kind(&self) -> LabelKind {
        self.kind
    }

    pub fn critical(&self) -> Option<Label> {
        self.critical
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Bijective onto `0..=m` for the given graph.
    pub fn is_complete(&self, g: &Graph) -> bool {
        let n = g.num_vertices();
        if n != g.num_edges() + 1 || self.labels.len() != n {
            return false;
        }
        let mut seen = vec![false; n];
        for &l in &self.labels {
            if l >= n || seen[l] {
                return false;
            }
            seen[l] = true;
        }
        true
    }

    /// The same labels viewed as a plain graceful labeling.
    pub fn as_beta(&self) -> Labeling {
        Labeling::beta(self.labels.clone())
    }

    /// The vertex carrying `label`, if any.
    pub fn vertex_with(&self, label: Label) -> Option<Vertex> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn max_vertex(&self) -> Option<Vertex> {
        (0..self.labels.len()).max_by_key(|&v| self.labels[v])
    }

    /// `m - f(v)` for every vertex.
    pub fn complement(&self, m: Label) -> Labeling {
        Labeling::beta(self.labels.iter().map(|&l| m - l).collect())
    }

    /// Transport along a vertex map `target[v]`: the result labels the
    /// target graph so that `result[target[v]] = self[v]`.
    pub fn transported(&self, target: &[Vertex]) -> Labeling {
        let mut labels = vec![0; self.labels.len()];
        for (v, &t) in target.iter().enumerate() {
            labels[t] = self.labels[v];
        }
        Labeling {
            labels,
            kind: self.kind,
            critical: self.critical,
        }
    }
}

/// Why a labeling was rejected.
#[derive(Debug, Clone, PartialEq, Eq, Error, Serialize)]
#[serde(tag = "reason", rename_all = "kebab-case")]
pub enum Failure {
    #[error("labeling has {found} entries but the graph has {expected} vertices")]
    LengthMismatch { expected: usize, found: usize },
    #[error("vertex {vertex} has label {label} outside 0..={max}")]
    LabelOutOfRange { vertex: Vertex, label: Label, max: Label },
    #[error("vertices {u} and {v} share label {label}")]
    DuplicateVertexLabel { label: Label, u: Vertex, v: Vertex },
    #[error("edges ({}, {}) and ({}, {}) share edge label {label}", .first.0, .first.1, .second.0, .second.1)]
    DuplicateEdgeLabel {
        label: Label,
        first: (Vertex, Vertex),
        second: (Vertex, Vertex),
    },
    #[error("edge ({}, {}) does not straddle critical number {critical}", .edge.0, .edge.1)]
    Straddle { edge: (Vertex, Vertex), critical: Label },
    #[error("claimed critical number {claimed} is invalid; the labeling needs {derived}")]
    CriticalMismatch { claimed: Label, derived: Label },
}

/// Outcome of a verifier. `critical` is set by successful alpha checks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub ok: bool,
    pub failure: Option<Failure>,
    pub critical: Option<Label>,
}

impl Verdict {
    fn pass(critical: Option<Label>) -> Self {
        Self {
            ok: true,
            failure: None,
            critical,
        }
    }

    fn fail(failure: Failure) -> Self {
        Self {
            ok: false,
            failure: Some(failure),
            critical: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HatError {
    #[error("{n} vertices exceed m + 1 = {}; no graceful labeling exists", .m + 1)]
    TooManyVertices { n: usize, m: usize },
}

/// The graph plus `m + 1 - n` isolated vertices (ids `n..=m`).
pub fn augment_hat(g: &Graph) -> Result<Graph, HatError> {
    let (n, m) = (g.num_vertices(), g.num_edges());
    if n > m + 1 {
        return Err(HatError::TooManyVertices { n, m });
    }
    Ok(Graph::new(m + 1, g.edges()).expect("same edges on more vertices"))
}

/// Graceful check with labels allowed in `0..=bound`.
pub fn verify_beta_bounded(g: &Graph, f: &Labeling, bound: Label) -> Verdict {
    let labels = f.labels();
    if labels.len() != g.num_vertices() {
        return Verdict::fail(Failure::LengthMismatch {
            expected: g.num_vertices(),
            found: labels.len(),
        });
    }
    let mut owner = vec![usize::MAX; bound + 1];
    for (v, &l) in labels.iter().enumerate() {
        if l > bound {
            return Verdict::fail(Failure::LabelOutOfRange {
                vertex: v,
                label: l,
                max: bound,
            });
        }
        if owner[l] != usize::MAX {
            return Verdict::fail(Failure::DuplicateVertexLabel {
                label: l,
                u: owner[l],
                v,
            });
        }
        owner[l] = v;
    }
    let mut edge_owner: Vec<Option<(Vertex, Vertex)>> = vec![None; bound + 1];
    for &(u, v) in g.edges() {
        let d = labels[u].abs_diff(labels[v]);
        if let Some(first) = edge_owner[d] {
            return Verdict::fail(Failure::DuplicateEdgeLabel {
                label: d,
                first,
                second: (u, v),
            });
        }
        edge_owner[d] = Some((u, v));
    }
    Verdict::pass(None)
}

pub fn verify_beta(g: &Graph, f: &Labeling) -> Verdict {
    verify_beta_bounded(g, f, g.num_edges())
}

/// Alpha check with labels allowed in `0..=bound`. The critical number is
/// derived as the largest lower endpoint; a claimed one is cross-checked.
pub fn verify_alpha_bounded(g: &Graph, f: &Labeling, bound: Label) -> Verdict {
    let beta = verify_beta_bounded(g, f, bound);
    if !beta.ok {
        return beta;
    }
    let labels = f.labels();
    let lows = g.edges().iter().map(|&(u, v)| labels[u].min(labels[v]));
    let highs = g.edges().iter().map(|&(u, v)| labels[u].max(labels[v]));
    let derived = lows.max().unwrap_or(0);
    let ceiling = highs.min().unwrap_or(bound + 1);
    if derived >= ceiling {
        let edge = *g
            .edges()
            .iter()
            .find(|&&(u, v)| labels[u].max(labels[v]) <= derived)
            .unwrap();
        return Verdict::fail(Failure::Straddle {
            edge,
            critical: derived,
        });
    }
    match f.critical() {
        Some(c) if c < derived || c >= ceiling.min(bound + 1) => {
            Verdict::fail(Failure::CriticalMismatch { claimed: c, derived })
        }
        Some(c) => Verdict::pass(Some(c)),
        None => Verdict::pass(Some(derived)),
    }
}

pub fn verify_alpha(g: &Graph, f: &Labeling) -> Verdict {
    verify_alpha_bounded(g, f, g.num_edges())
}

/// Verify under whichever kind the labeling declares.
pub fn verify(g: &Graph, f: &Labeling) -> Verdict {
    match f.kind() {
        LabelKind::Beta => verify_beta(g, f),
        LabelKind::Alpha => verify_alpha(g, f),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InverseError {
    #[error("labeling is not a complete alpha-labeling: {0}")]
    NotCompleteAlpha(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

/// The inverse alpha-labeling `f*(v) = (k - f(v)) mod n`.
pub fn inverse_alpha(g: &Graph, f: &Labeling) -> Result<Labeling, InverseError> {
    let verdict = verify_alpha(g, f);
    if !verdict.ok {
        return Err(InverseError::NotCompleteAlpha(
            verdict.failure.map(|e| e.to_string()).unwrap_or_default(),
        ));
    }
    if !f.is_complete(g) {
        return Err(InverseError::NotCompleteAlpha("labels are not a bijection onto 0..=m".into()));
    }
    let k = verdict.critical.unwrap();
    let n = g.num_vertices();
    let labels = f.labels().iter().map(|&l| (k + n - l) % n).collect();
    Ok(Labeling::alpha(labels, k))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete_graph, cycle_graph, path_graph};

    fn tree9() -> (Graph, Labeling) {
        let g = Graph::new(9, &[(0, 2), (0, 5), (0, 6), (0, 8), (1, 8), (3, 7), (4, 7), (7, 8)]).unwrap();
        (g, Labeling::beta((0..9).collect()))
    }

    #[test]
    fn beta_examples() {
        let (g, f) = tree9();
        assert!(verify_beta(&g, &f).ok);
        let k2 = path_graph(2);
        assert!(verify_beta(&k2, &Labeling::beta(vec![0, 1])).ok);
        let v = verify_beta(&path_graph(3), &Labeling::beta(vec![0, 1, 2]));
        assert!(matches!(v.failure, Some(Failure::DuplicateEdgeLabel { label: 1, .. })));
    }

    #[test]
    fn alpha_examples() {
        let k2 = path_graph(2);
        let v = verify_alpha(&k2, &Labeling::beta(vec![0, 1]));
        assert_eq!(v.critical, Some(0));
        // A triangle labeled 0, 1, 3 is graceful but cannot straddle any k.
        let s = complete_graph(3);
        let f = Labeling::beta(vec![0, 1, 3]);
        assert!(verify_beta(&s, &f).ok);
        assert!(matches!(verify_alpha(&s, &f).failure, Some(Failure::Straddle { .. })));
        // P4 labeled 0,3,1,2 is alpha with k = 1; a wrong claim is caught.
        let p4 = path_graph(4);
        assert_eq!(verify_alpha(&p4, &Labeling::beta(vec![0, 3, 1, 2])).critical, Some(1));
        let wrong = Labeling::alpha(vec![0, 3, 1, 2], 2);
        assert!(matches!(
            verify_alpha(&p4, &wrong).failure,
            Some(Failure::CriticalMismatch { claimed: 2, derived: 1 })
        ));
    }

    #[test]
    fn hat() {
        assert_eq!(augment_hat(&path_graph(4)).unwrap(), path_graph(4));
        assert_eq!(augment_hat(&cycle_graph(4)).unwrap().num_vertices(), 5);
        assert!(augment_hat(&Graph::empty(3)).is_err());
    }

    #[test]
    fn inverse_fixes_k2() {
        let k2 = path_graph(2);
        let f = Labeling::alpha(vec![0, 1], 0);
        assert_eq!(inverse_alpha(&k2, &f).unwrap().labels(), &[0, 1]);
    }

    #[test]
    fn range_and_injectivity() {
        let p = path_graph(3);
        assert!(matches!(
            verify_beta(&p, &Labeling::beta(vec![0, 3, 1])).failure,
            Some(Failure::LabelOutOfRange { label: 3, .. })
        ));
        assert!(matches!(
            verify_beta(&p, &Labeling::beta(vec![1, 0, 1])).failure,
            Some(Failure::DuplicateVertexLabel { label: 1, .. })
        ));
        assert!(matches!(
            verify_beta(&p, &Labeling::beta(vec![0, 1])).failure,
            Some(Failure::LengthMismatch { .. })
        ));
    }
}

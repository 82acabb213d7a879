//! Exhaustive backtracking search for graceful and alpha labelings, plus
//! small free-tree enumeration. This is the ground truth the constructions
//! are checked against, so it shares no code with them beyond the verifiers.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::canon::free_code;
use crate::graph::{Graph, Vertex};
use crate::labeling::{verify_alpha, verify_beta, Label, Labeling};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SearchBudget {
    max_vertices: usize,
    max_nodes: u64,
    #[serde(serialize_with = "secs")]
    time_limit: Duration,
}

fn secs<S: serde::Serializer>(d: &Duration, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_f64(d.as_secs_f64())
}

impl Default for SearchBudget {
    fn default() -> Self {
        Self {
            max_vertices: 14,
            max_nodes: 500_000_000,
            time_limit: Duration::from_secs(60),
        }
    }
}

impl SearchBudget {
    pub fn new(max_vertices: usize, max_nodes: u64, time_limit: Duration) -> Result<Self, SearchError> {
        if max_vertices == 0 || max_nodes == 0 || time_limit.is_zero() {
            return Err(SearchError::InvalidBudget);
        }
        Ok(Self {
            max_vertices,
            max_nodes,
            time_limit,
        })
    }

    pub fn max_vertices(&self) -> usize {
        self.max_vertices
    }

    pub fn max_nodes(&self) -> u64 {
        self.max_nodes
    }

    pub fn time_limit(&self) -> Duration {
        self.time_limit
    }

    pub fn with_max_vertices(self, max_vertices: usize) -> Result<Self, SearchError> {
        Self::new(max_vertices, self.max_nodes, self.time_limit)
    }

    pub fn with_max_nodes(self, max_nodes: u64) -> Result<Self, SearchError> {
        Self::new(self.max_vertices, max_nodes, self.time_limit)
    }

    pub fn with_time_limit(self, time_limit: Duration) -> Result<Self, SearchError> {
        Self::new(self.max_vertices, self.max_nodes, time_limit)
    }
}

/// Which limit stopped a search.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "limit", rename_all = "snake_case")]
pub enum BudgetLimit {
    Vertices { n: usize, max: usize },
    Nodes { max: u64 },
    Time { seconds: u64 },
}

impl fmt::Display for BudgetLimit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BudgetLimit::Vertices { n, max } => write!(f, "{n} vertices exceeds the limit of {max}"),
            BudgetLimit::Nodes { max } => write!(f, "more than {max} search nodes"),
            BudgetLimit::Time { seconds } => write!(f, "time limit of {seconds}s reached"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchOutcome<T> {
    Found(T),
    /// The whole space was explored and nothing qualifies.
    Exhausted,
    BudgetExceeded(BudgetLimit),
}

impl<T> SearchOutcome<T> {
    pub fn found(self) -> Option<T> {
        match self {
            SearchOutcome::Found(t) => Some(t),
            _ => None,
        }
    }

    pub fn is_found(&self) -> bool {
        matches!(self, SearchOutcome::Found(_))
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SearchError {
    #[error("search budget fields must all be positive")]
    InvalidBudget,
    #[error("budget exceeded: {0}")]
    Budget(BudgetLimit),
    #[error("graph is not a tree")]
    NotTree,
    #[error("tree enumeration supports 1 <= n <= 10, got {0}")]
    Range(usize),
}

/// Shared node and clock accounting, safe to use from several threads.
struct Meter {
    budget: SearchBudget,
    start: Instant,
    nodes: AtomicU64,
    stop: AtomicBool,
}

impl Meter {
    fn new(budget: SearchBudget) -> Self {
        Self {
            budget,
            start: Instant::now(),
            nodes: AtomicU64::new(0),
            stop: AtomicBool::new(false),
        }
    }

    fn tick(&self) -> Result<(), BudgetLimit> {
        let n = self.nodes.fetch_add(1, Ordering::Relaxed) + 1;
        if n > self.budget.max_nodes {
            return Err(BudgetLimit::Nodes {
                max: self.budget.max_nodes,
            });
        }
        if n.is_multiple_of(4096) && self.start.elapsed() > self.budget.time_limit {
            self.stop.store(true, Ordering::Relaxed);
        }
        if self.stop.load(Ordering::Relaxed) {
            return Err(BudgetLimit::Time {
                seconds: self.budget.time_limit.as_secs(),
            });
        }
        Ok(())
    }
}

/// One backtracking problem: vertices in a fixed order, each with an
/// inclusive label window.
struct Problem {
    m: usize,
    order: Vec<Vertex>,
    /// Positions of earlier neighbours, per position.
    back: Vec<Vec<usize>>,
    windows: Vec<(Label, Label)>,
}

impl Problem {
    fn new(g: &Graph, order: Vec<Vertex>, windows_by_vertex: &[(Label, Label)]) -> Self {
        let mut pos = vec![0; g.num_vertices()];
        for (p, &v) in order.iter().enumerate() {
            pos[v] = p;
        }
        let back = order
            .iter()
            .enumerate()
            .map(|(p, &v)| {
                let mut b: Vec<usize> = g.neighbors(v).iter().map(|&u| pos[u]).filter(|&q| q < p).collect();
                b.sort_unstable();
                b
            })
            .collect();
        let windows = order.iter().map(|&v| windows_by_vertex[v]).collect();
        Self {
            m: g.num_edges(),
            order,
            back,
            windows,
        }
    }

    fn state(&self) -> State {
        State {
            at: vec![0; self.order.len()],
            used_v: vec![false; self.m + 1],
            used_e: vec![false; self.m + 1],
        }
    }

    fn to_labels(&self, st: &State) -> Vec<Label> {
        let mut labels = vec![0; self.order.len()];
        for (p, &v) in self.order.iter().enumerate() {
            labels[v] = st.at[p];
        }
        labels
    }

    /// Try `l` at position `p`; on success the state is updated and the
    /// caller must `unplace`.
    fn place(&self, st: &mut State, p: usize, l: Label) -> bool {
        if st.used_v[l] {
            return false;
        }
        let mut k = 0;
        while k < self.back[p].len() {
            let d = l.abs_diff(st.at[self.back[p][k]]);
            if st.used_e[d] {
                break;
            }
            st.used_e[d] = true;
            k += 1;
        }
        if k < self.back[p].len() {
            for &q in &self.back[p][..k] {
                st.used_e[l.abs_diff(st.at[q])] = false;
            }
            return false;
        }
        st.used_v[l] = true;
        st.at[p] = l;
        true
    }

    fn unplace(&self, st: &mut State, p: usize) {
        let l = st.at[p];
        st.used_v[l] = false;
        for &q in &self.back[p] {
            st.used_e[l.abs_diff(st.at[q])] = false;
        }
    }

    /// Depth-first search from position `p`. `Ok(true)` means a complete
    /// assignment sits in `st` (first-found mode), and in counting mode
    /// solutions are added to `count` instead.
    fn dfs(&self, st: &mut State, p: usize, meter: &Meter, count: Option<&mut u64>) -> Result<bool, BudgetLimit> {
        if p == self.order.len() {
            return Ok(match count {
                Some(c) => {
                    *c += 1;
                    false
                }
                None => true,
            });
        }
        let (lo, hi) = self.windows[p];
        let mut count = count;
        for l in lo..=hi {
            meter.tick()?;
            if !self.place(st, p, l) {
                continue;
            }
            if self.dfs(st, p + 1, meter, count.as_deref_mut())? {
                return Ok(true);
            }
            self.unplace(st, p);
        }
        Ok(false)
    }

    fn first(&self, meter: &Meter) -> Result<Option<Vec<Label>>, BudgetLimit> {
        let mut st = self.state();
        Ok(self.dfs(&mut st, 0, meter, None)?.then(|| self.to_labels(&st)))
    }

    /// Counts all solutions, fanning out over the first vertex's labels.
    fn count(&self, meter: &Meter) -> Result<u64, BudgetLimit> {
        if self.order.is_empty() {
            return Ok(1);
        }
        let (lo, hi) = self.windows[0];
        let parts: Vec<Result<u64, BudgetLimit>> = (lo..=hi)
            .into_par_iter()
            .map(|l| {
                let mut st = self.state();
                meter.tick()?;
                if !self.place(&mut st, 0, l) {
                    return Ok(0);
                }
                let mut c = 0;
                self.dfs(&mut st, 1, meter, Some(&mut c))?;
                Ok(c)
            })
            .collect();
        parts.into_iter().sum()
    }
}

/// Descending degree, then id.
fn degree_order(g: &Graph) -> Vec<Vertex> {
    let mut order: Vec<Vertex> = g.vertices().collect();
    order.sort_by_key(|&v| (std::cmp::Reverse(g.degree(v)), v));
    order
}

/// Breadth-first from the highest-degree vertex of each component, children
/// in degree order, so every vertex after a component's first has a
/// labeled neighbour when it is reached.
fn connected_order(g: &Graph) -> Vec<Vertex> {
    let by_degree = degree_order(g);
    let mut rank = vec![0; g.num_vertices()];
    for (i, &v) in by_degree.iter().enumerate() {
        rank[v] = i;
    }
    let mut seen = vec![false; g.num_vertices()];
    let mut order = Vec::with_capacity(g.num_vertices());
    for &s in &by_degree {
        if seen[s] {
            continue;
        }
        seen[s] = true;
        let mut i = order.len();
        order.push(s);
        while i < order.len() {
            let mut next: Vec<Vertex> = g.neighbors(order[i]).iter().copied().filter(|&w| !seen[w]).collect();
            next.sort_by_key(|&w| rank[w]);
            for w in next {
                seen[w] = true;
                order.push(w);
            }
            i += 1;
        }
    }
    order
}

/// Tree search driven by edge labels from m down to 1. Each step either
/// finds the label already formed by two labeled neighbours or extends the
/// labeled part by an edge that realises it. Unlabeled leaves of one vertex
/// are interchangeable, so only the first is tried. With `sides`, the search
/// is for an alpha-labeling: low-side vertices take labels up to `k`.
struct EdgeDriven<'g> {
    g: &'g Graph,
    sides: Option<(Vec<bool>, Label)>,
    who: Vec<Option<Vertex>>,
    at: Vec<Option<Label>>,
    used_e: Vec<bool>,
}

impl<'g> EdgeDriven<'g> {
    fn new(g: &'g Graph, sides: Option<(Vec<bool>, Label)>) -> Self {
        let m = g.num_edges();
        Self {
            g,
            sides,
            who: vec![None; m + 1],
            at: vec![None; g.num_vertices()],
            used_e: vec![false; m + 1],
        }
    }

    fn assign(&mut self, v: Vertex, l: Label) -> bool {
        if self.who[l].is_some() || self.at[v].is_some() {
            return false;
        }
        let mut formed = Vec::new();
        for &x in self.g.neighbors(v) {
            if let Some(lx) = self.at[x] {
                let d = l.abs_diff(lx);
                if self.used_e[d] || formed.contains(&d) {
                    return false;
                }
                formed.push(d);
            }
        }
        for d in formed {
            self.used_e[d] = true;
        }
        self.at[v] = Some(l);
        self.who[l] = Some(v);
        true
    }

    fn unassign(&mut self, v: Vertex) {
        let l = self.at[v].take().expect("assigned");
        self.who[l] = None;
        for &x in self.g.neighbors(v) {
            if let Some(lx) = self.at[x] {
                self.used_e[l.abs_diff(lx)] = false;
            }
        }
    }

    /// Unlabeled neighbours of `u`, keeping only the first unlabeled leaf.
    fn open_neighbours(&self, u: Vertex) -> Vec<Vertex> {
        let mut leaf_seen = false;
        let mut out = Vec::new();
        for &w in self.g.neighbors(u) {
            if self.at[w].is_some() {
                continue;
            }
            if self.g.degree(w) == 1 {
                if leaf_seen {
                    continue;
                }
                leaf_seen = true;
            }
            out.push(w);
        }
        out
    }

    fn try_pairs(&mut self, pairs: &[(Vertex, Label, Vertex, Label)], d: Label, meter: &Meter) -> Result<bool, BudgetLimit> {
        for &(u, lu, w, lw) in pairs {
            meter.tick()?;
            let fresh_u = self.at[u].is_none();
            if fresh_u && !self.assign(u, lu) {
                continue;
            }
            if self.assign(w, lw) {
                if self.dfs(d - 1, meter)? {
                    return Ok(true);
                }
                self.unassign(w);
            }
            if fresh_u {
                self.unassign(u);
            }
        }
        Ok(false)
    }

    fn dfs(&mut self, d: Label, meter: &Meter) -> Result<bool, BudgetLimit> {
        if d == 0 {
            return Ok(true);
        }
        if self.used_e[d] {
            return self.dfs(d - 1, meter);
        }
        let m = self.g.num_edges();
        let (lo, hi) = match &self.sides {
            Some((_, k)) => ((k + 1).saturating_sub(d), (*k).min(m - d)),
            None => (0, m - d),
        };
        for a in lo..=hi {
            let b = a + d;
            let pairs: Vec<(Vertex, Label, Vertex, Label)> = match (self.who[a], self.who[b]) {
                (Some(_), Some(_)) => continue,
                (Some(u), None) => self.open_neighbours(u).into_iter().map(|w| (u, a, w, b)).collect(),
                (None, Some(v)) => self.open_neighbours(v).into_iter().map(|w| (v, b, w, a)).collect(),
                (None, None) => {
                    let mut pairs = Vec::new();
                    for &(x, y) in self.g.edges() {
                        if self.at[x].is_some() || self.at[y].is_some() {
                            continue;
                        }
                        match &self.sides {
                            Some((low, _)) => pairs.push(if low[x] { (x, a, y, b) } else { (y, a, x, b) }),
                            None => {
                                pairs.push((x, a, y, b));
                                pairs.push((y, a, x, b));
                            }
                        }
                    }
                    pairs
                }
            };
            if self.try_pairs(&pairs, d, meter)? {
                return Ok(true);
            }
        }
        Ok(false)
    }

    fn labels(&self) -> Vec<Label> {
        self.at.iter().map(|l| l.expect("tree fully labeled")).collect()
    }
}

struct State {
    at: Vec<Label>,
    used_v: Vec<bool>,
    used_e: Vec<bool>,
}

fn precheck<T>(g: &Graph, budget: &SearchBudget) -> Option<SearchOutcome<T>> {
    let n = g.num_vertices();
    if n > budget.max_vertices {
        return Some(SearchOutcome::BudgetExceeded(BudgetLimit::Vertices {
            n,
            max: budget.max_vertices,
        }));
    }
    if n > g.num_edges() + 1 {
        return Some(SearchOutcome::Exhausted);
    }
    None
}

/// First graceful labeling in the fixed exploration order. The first vertex
/// is limited to labels up to m/2; the complement covers the rest.
pub fn brute_force_graceful(g: &Graph, budget: SearchBudget) -> SearchOutcome<Labeling> {
    if let Some(out) = precheck(g, &budget) {
        return out;
    }
    let m = g.num_edges();
    let mut problem = Problem::new(g, degree_order(g), &vec![(0, m); g.num_vertices()]);
    if let Some(w) = problem.windows.first_mut() {
        w.1 = m / 2;
    }
    let meter = Meter::new(budget);
    match problem.first(&meter) {
        Ok(Some(labels)) => {
            let f = Labeling::beta(labels);
            debug_assert!(verify_beta(g, &f).ok);
            SearchOutcome::Found(f)
        }
        Ok(None) => SearchOutcome::Exhausted,
        Err(limit) => SearchOutcome::BudgetExceeded(limit),
    }
}

/// First alpha-labeling. Side assignments are tried per component (as a
/// bitmask, ascending) and for each the critical number ascending.
pub fn brute_force_alpha(g: &Graph, budget: SearchBudget) -> SearchOutcome<Labeling> {
    if let Some(out) = precheck(g, &budget) {
        return out;
    }
    let Some(color) = g.bipartition() else {
        return SearchOutcome::Exhausted;
    };
    let m = g.num_edges();
    if m == 0 {
        return SearchOutcome::Found(Labeling::alpha(vec![0; g.num_vertices()], 0));
    }
    if crate::graph::is_tree(g) {
        return alpha_on_tree(g, &color, budget);
    }
    alpha_by_vertices(g, &color, budget)
}

/// Side assignment and critical number enumerated, then vertex backtracking.
fn alpha_by_vertices(g: &Graph, color: &[bool], budget: SearchBudget) -> SearchOutcome<Labeling> {
    let m = g.num_edges();
    let comps: Vec<Vec<Vertex>> = g.components().into_iter().filter(|c| c.len() > 1).collect();
    let meter = Meter::new(budget);
    for mask in 0u64..(1u64 << comps.len().min(63)) {
        let mut low_side = vec![None; g.num_vertices()];
        for (c, comp) in comps.iter().enumerate() {
            let flip = mask >> c & 1 == 1;
            for &v in comp {
                low_side[v] = Some(color[v] == color[comp[0]] && !flip || color[v] != color[comp[0]] && flip);
            }
        }
        let lows = low_side.iter().filter(|s| **s == Some(true)).count();
        let highs = low_side.iter().filter(|s| **s == Some(false)).count();
        for k in 0..m {
            if lows > k + 1 || highs > m - k {
                continue;
            }
            let windows: Vec<(Label, Label)> = low_side
                .iter()
                .map(|s| match s {
                    Some(true) => (0, k),
                    Some(false) => (k + 1, m),
                    None => (0, m),
                })
                .collect();
            match Problem::new(g, connected_order(g), &windows).first(&meter) {
                Ok(Some(labels)) => {
                    let f = Labeling::alpha(labels, k);
                    debug_assert!(verify_alpha(g, &f).ok);
                    return SearchOutcome::Found(f);
                }
                Ok(None) => {}
                Err(limit) => return SearchOutcome::BudgetExceeded(limit),
            }
        }
    }
    SearchOutcome::Exhausted
}

/// On a tree every label is used, so the critical number is fixed by the
/// size of the low side; only the two side choices remain.
fn alpha_on_tree(g: &Graph, color: &[bool], budget: SearchBudget) -> SearchOutcome<Labeling> {
    let meter = Meter::new(budget);
    for flip in [false, true] {
        let low: Vec<bool> = color.iter().map(|&c| c == color[0] && !flip || c != color[0] && flip).collect();
        let k = low.iter().filter(|&&l| l).count() - 1;
        let mut search = EdgeDriven::new(g, Some((low, k)));
        match search.dfs(g.num_edges(), &meter) {
            Ok(true) => {
                let f = Labeling::alpha(search.labels(), k);
                debug_assert!(verify_alpha(g, &f).ok);
                return SearchOutcome::Found(f);
            }
            Ok(false) => {}
            Err(limit) => return SearchOutcome::BudgetExceeded(limit),
        }
    }
    SearchOutcome::Exhausted
}

/// First graceful labeling of a tree that gives each pinned vertex its
/// pinned label, or `Exhausted` when none exists.
pub fn graceful_tree_with_pins(t: &Graph, pins: &[(Vertex, Label)], budget: SearchBudget) -> Result<SearchOutcome<Labeling>, SearchError> {
    if !crate::graph::is_tree(t) {
        return Err(SearchError::NotTree);
    }
    if let Some(out) = precheck(t, &budget) {
        return Ok(out);
    }
    let m = t.num_edges();
    let mut search = EdgeDriven::new(t, None);
    for &(v, l) in pins {
        if v >= t.num_vertices() || l > m || !search.assign(v, l) {
            return Ok(SearchOutcome::Exhausted);
        }
    }
    let meter = Meter::new(budget);
    Ok(match search.dfs(m, &meter) {
        Ok(true) => {
            let f = Labeling::beta(search.labels());
            debug_assert!(verify_beta(t, &f).ok);
            SearchOutcome::Found(f)
        }
        Ok(false) => SearchOutcome::Exhausted,
        Err(limit) => SearchOutcome::BudgetExceeded(limit),
    })
}

/// Number of graceful labelings as functions (no symmetry reduction).
pub fn count_graceful_labelings(g: &Graph, budget: SearchBudget) -> Result<u64, SearchError> {
    match precheck::<()>(g, &budget) {
        Some(SearchOutcome::BudgetExceeded(limit)) => return Err(SearchError::Budget(limit)),
        Some(_) => return Ok(0),
        None => {}
    }
    let m = g.num_edges();
    let problem = Problem::new(g, degree_order(g), &vec![(0, m); g.num_vertices()]);
    problem.count(&Meter::new(budget)).map_err(SearchError::Budget)
}

/// All free trees on `n` vertices up to isomorphism, ordered by canonical code.
pub fn enumerate_trees(n: usize) -> Result<Vec<Graph>, SearchError> {
    if !(1..=10).contains(&n) {
        return Err(SearchError::Range(n));
    }
    let mut level = vec![Graph::empty(1)];
    for size in 2..=n {
        let mut next = BTreeMap::new();
        for t in &level {
            for v in t.vertices() {
                let mut edges = t.edges().to_vec();
                edges.push((v, size - 1));
                let grown = Graph::new(size, &edges).expect("leaf extension of a tree is a tree");
                let code = free_code(&grown).expect("tree");
                next.entry(code).or_insert(grown);
            }
        }
        level = next.into_values().collect();
    }
    Ok(level)
}

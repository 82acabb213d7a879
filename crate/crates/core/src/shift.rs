//! Breadth-first exploration of diagonal shifts.
//!
//! A completely graceful biadjacency grid has exactly one 1 per diagonal,
//! so a grid is determined by the row of the 1 on each diagonal. States are
//! stored that way; a slide changes one entry and a diagonal swap changes
//! two.

use std::collections::{HashSet, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::labeling::Label;
use crate::matrix::{is_completely_graceful, matrix_to_graph, LabeledMatrix, MatrixError, MatrixKind, Move, ShiftError};

/// Which atomic steps the exploration may take.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StepSet {
    /// Slides, and swaps to any empty cells on the exchanged diagonals.
    #[default]
    Full,
    /// Slides, and swaps where each 1 stays in its own row or column.
    RowColumn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "step", rename_all = "kebab-case")]
pub enum Step {
    Slide { mv: Move },
    Swap { first: Move, second: Move },
}

impl Step {
    pub fn moves(&self) -> Vec<Move> {
        match *self {
            Step::Slide { mv } => vec![mv],
            Step::Swap { first, second } => vec![first, second],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Shifted {
    pub matrix: LabeledMatrix,
    /// Steps from the start grid, in order.
    pub steps: Vec<Step>,
}

type State = Box<[u16]>;

struct Space {
    start: LabeledMatrix,
    rows: usize,
    cols: usize,
    steps: StepSet,
}

impl Space {
    /// 0-based rows that meet diagonal `d` (box-value `d`).
    fn rows_on(&self, d: usize) -> std::ops::Range<usize> {
        self.rows.saturating_sub(d)..(self.rows + self.cols - d).min(self.rows)
    }

    fn col(&self, d: usize, i: usize) -> usize {
        d + i - self.rows
    }

    fn label_cell(&self, d: usize, i: usize) -> (Label, Label) {
        (self.start.row_labels()[i].1, self.start.col_labels()[self.col(d, i)].1)
    }

    fn is_tree(&self, s: &[u16]) -> bool {
        let mut parent: Vec<usize> = (0..self.rows + self.cols).collect();
        fn find(p: &mut [usize], mut a: usize) -> usize {
            while p[a] != a {
                p[a] = p[p[a]];
                a = p[a];
            }
            a
        }
        for (d0, &i) in s.iter().enumerate() {
            let i = i as usize;
            let (a, b) = (find(&mut parent, i), find(&mut parent, self.rows + self.col(d0 + 1, i)));
            if a == b {
                return false;
            }
            parent[a] = b;
        }
        // One edge per diagonal and no cycle: a forest with n - 1 edges.
        s.len() + 1 == self.rows + self.cols
    }

    fn matrix(&self, s: &[u16]) -> LabeledMatrix {
        let mut cells = vec![false; self.rows * self.cols];
        for (d0, &i) in s.iter().enumerate() {
            let i = i as usize;
            cells[i * self.cols + self.col(d0 + 1, i)] = true;
        }
        self.start.with_cells(cells)
    }

    /// Tree children of `s`, in a fixed order: slides by diagonal then row,
    /// then swaps by diagonal pair then target rows.
    fn children(&self, s: &[u16]) -> Vec<(State, Step)> {
        let mut out = Vec::new();
        let keep = |x: Vec<u16>, step: Step, out: &mut Vec<(State, Step)>| {
            if self.is_tree(&x) {
                out.push((x.into_boxed_slice(), step));
            }
        };
        let nd = s.len();
        for d in 1..=nd {
            let old = s[d - 1] as usize;
            for i in self.rows_on(d).filter(|&i| i != old) {
                let mut x = s.to_vec();
                x[d - 1] = i as u16;
                let mv = Move {
                    from: self.label_cell(d, old),
                    to: self.label_cell(d, i),
                };
                keep(x, Step::Slide { mv }, &mut out);
            }
        }
        for d1 in 1..=nd {
            for d2 in d1 + 1..=nd {
                let (i1, i2) = (s[d1 - 1] as usize, s[d2 - 1] as usize);
                // The 1 at (i1, d1) lands on d2 and the one at (i2, d2) on d1.
                let first = self.targets(i1, d1, d2, i2);
                let second = self.targets(i2, d2, d1, i1);
                for &a in &first {
                    for &b in &second {
                        let mut x = s.to_vec();
                        x[d2 - 1] = a as u16;
                        x[d1 - 1] = b as u16;
                        let step = Step::Swap {
                            first: Move {
                                from: self.label_cell(d1, i1),
                                to: self.label_cell(d2, a),
                            },
                            second: Move {
                                from: self.label_cell(d2, i2),
                                to: self.label_cell(d1, b),
                            },
                        };
                        keep(x, step, &mut out);
                    }
                }
            }
        }
        out
    }

    /// Empty cells on diagonal `to` a 1 at row `i`, diagonal `from` may move
    /// to; `occupied` is the row of the 1 already there.
    fn targets(&self, i: usize, from: usize, to: usize, occupied: usize) -> Vec<usize> {
        let j = self.col(from, i);
        self.rows_on(to)
            .filter(|&t| t != occupied)
            .filter(|&t| self.steps == StepSet::Full || t == i || self.col(to, t) == j)
            .collect()
    }
}

type Predicate<'a> = Box<dyn Fn(&LabeledMatrix) -> bool + Sync + 'a>;

/// Lazy breadth-first stream; see [`enumerate_shifts`].
pub struct Shifts<'a> {
    space: Space,
    predicate: Predicate<'a>,
    max_steps: usize,
    depth: usize,
    level: Vec<(State, Vec<Step>)>,
    cursor: usize,
    next: Vec<(State, Vec<Step>)>,
    seen: HashSet<State>,
    ready: VecDeque<Shifted>,
}

/// Parents expanded per batch; children of a batch are produced in
/// parallel and then merged in parent order.
const BATCH: usize = 64;

impl Iterator for Shifts<'_> {
    type Item = Shifted;

    fn next(&mut self) -> Option<Shifted> {
        loop {
            if let Some(item) = self.ready.pop_front() {
                return Some(item);
            }
            if self.cursor == self.level.len() {
                if self.depth >= self.max_steps || self.next.is_empty() {
                    return None;
                }
                self.level = std::mem::take(&mut self.next);
                self.cursor = 0;
                self.depth += 1;
            }
            let end = (self.cursor + BATCH).min(self.level.len());
            let batch = &self.level[self.cursor..end];
            let space = &self.space;
            let expanded: Vec<Vec<(State, Step)>> = batch.par_iter().map(|(s, _)| space.children(s)).collect();
            let mut fresh = Vec::new();
            for ((_, path), kids) in batch.iter().zip(expanded) {
                for (s, step) in kids {
                    if self.seen.insert(s.clone()) {
                        let mut steps = path.clone();
                        steps.push(step);
                        fresh.push((s, steps));
                    }
                }
            }
            self.cursor = end;
            let predicate = &self.predicate;
            let kept: Vec<Option<LabeledMatrix>> = fresh
                .par_iter()
                .map(|(s, _)| {
                    let m = space.matrix(s);
                    predicate(&m).then_some(m)
                })
                .collect();
            for ((s, steps), m) in fresh.into_iter().zip(kept) {
                if let Some(matrix) = m {
                    self.ready.push_back(Shifted {
                        matrix,
                        steps: steps.clone(),
                    });
                }
                if self.depth + 1 < self.max_steps {
                    self.next.push((s, steps));
                }
            }
        }
    }
}

/// Every distinct completely graceful tree grid within `max_steps` atomic
/// steps of `m` (including `m` itself) that satisfies `predicate`, in
/// breadth-first order. Uses the full step set.
pub fn enumerate_shifts<'a>(
    m: &LabeledMatrix,
    max_steps: usize,
    predicate: impl Fn(&LabeledMatrix) -> bool + Sync + 'a,
) -> Result<Shifts<'a>, ShiftError> {
    enumerate_shifts_with(m, max_steps, StepSet::Full, predicate)
}

pub fn enumerate_shifts_with<'a>(
    m: &LabeledMatrix,
    max_steps: usize,
    steps: StepSet,
    predicate: impl Fn(&LabeledMatrix) -> bool + Sync + 'a,
) -> Result<Shifts<'a>, ShiftError> {
    if m.kind() != MatrixKind::Biadjacency {
        return Err(MatrixError::WrongKind {
            expected: MatrixKind::Biadjacency,
        }
        .into());
    }
    let verdict = is_completely_graceful(m);
    if !verdict.ok {
        return Err(MatrixError::NotCompletelyGraceful {
            overfull: verdict.overfull,
            deficient: verdict.deficient,
        }
        .into());
    }
    let (rows, cols) = (m.rows(), m.cols());
    let mut start = vec![0u16; rows + cols - 1];
    for (i, j) in m.ones() {
        start[rows + j - i - 1] = i as u16;
    }
    let space = Space {
        start: m.clone(),
        rows,
        cols,
        steps,
    };
    let (g, _) = matrix_to_graph(m)?;
    if !crate::graph::is_tree(&g) {
        return Err(ShiftError::NotTree);
    }
    let start: State = start.into_boxed_slice();
    let mut ready = VecDeque::new();
    if predicate(m) {
        ready.push_back(Shifted {
            matrix: m.clone(),
            steps: Vec::new(),
        });
    }
    let level = if max_steps > 0 { vec![(start.clone(), Vec::new())] } else { Vec::new() };
    Ok(Shifts {
        space,
        predicate: Box::new(predicate),
        max_steps,
        depth: 0,
        level,
        cursor: 0,
        next: Vec::new(),
        seen: HashSet::from([start]),
        ready,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::{canonical_biadjacency, shift_ones};
    use crate::graph::path_graph;
    use crate::labeling::Labeling;

    #[test]
    fn zero_steps_is_the_start() {
        let g = path_graph(4);
        let m = canonical_biadjacency(&g, &Labeling::alpha(vec![0, 3, 1, 2], 1)).unwrap();
        let all: Vec<_> = enumerate_shifts(&m, 0, |_| true).unwrap().collect();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].matrix, m);
    }

    #[test]
    fn single_cell_has_no_moves() {
        let m = LabeledMatrix::from_labels(MatrixKind::Biadjacency, &[0], &[1], vec![true], Some(0)).unwrap();
        let all: Vec<_> = enumerate_shifts(&m, 5, |_| true).unwrap().collect();
        assert_eq!(all.len(), 1);
    }

    #[test]
    fn steps_replay_through_shift_ones() {
        let g = path_graph(6);
        let m = canonical_biadjacency(&g, &Labeling::alpha(vec![0, 5, 1, 4, 2, 3], 2)).unwrap();
        let mut count = 0;
        let mut grids = HashSet::new();
        for s in enumerate_shifts(&m, 2, |_| true).unwrap() {
            let mut cur = m.clone();
            for step in &s.steps {
                cur = shift_ones(&cur, &step.moves(), true).unwrap();
            }
            assert_eq!(cur, s.matrix);
            assert!(grids.insert(s.matrix.cells().to_vec()));
            count += 1;
        }
        assert!(count > 1);
        let restricted = enumerate_shifts_with(&m, 2, StepSet::RowColumn, |_| true).unwrap().count();
        assert!(restricted <= count);
    }
}

use std::path::PathBuf;

use graceful_core::format::{parse_matrix, parse_moves, write_matrix};
use graceful_core::lobster::classify_lobster;
use graceful_core::matrix::{is_completely_graceful, matrix_to_graph, shift_ones, LabeledMatrix, Move, ShiftError};
use graceful_core::shift::{enumerate_shifts, enumerate_shifts_with, StepSet};
use graceful_core::structure::lobster_decompose;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn in_no_class(m: &LabeledMatrix) -> bool {
    let Ok((t, _)) = matrix_to_graph(m) else { return false };
    lobster_decompose(&t).is_ok_and(|l| classify_lobster(&l).flags().is_empty())
}

#[test]
fn fixture_moves_reproduce_the_shifted_matrix() {
    let a = parse_matrix(&fixture("lobster26_biadjacency.matrix")).unwrap();
    let moves = parse_moves(&fixture("lobster26.moves")).unwrap();
    assert_eq!(moves.len(), 6);
    let shifted = shift_ones(&a, &moves, true).unwrap();
    assert_eq!(write_matrix(&shifted), fixture("lobster26_shifted.matrix"));
    assert!(shift_ones(&a, &[], true).unwrap() == a);
}

#[test]
fn lone_moves_break_a_diagonal() {
    let a = parse_matrix(&fixture("lobster26_biadjacency.matrix")).unwrap();
    let lone = Move { from: (1, 21), to: (1, 17) };
    assert!(matches!(shift_ones(&a, &[lone], true), Err(ShiftError::Matrix(_))));
    let empty = Move { from: (0, 13), to: (0, 14) };
    assert!(matches!(shift_ones(&a, &[empty], true), Err(ShiftError::FromEmpty(0, 13))));
    let onto = Move { from: (1, 21), to: (0, 25) };
    assert!(matches!(shift_ones(&a, &[onto], true), Err(ShiftError::Collision(0, 25))));
}

#[test]
fn exploration_reaches_the_shifted_lobster() {
    let a = parse_matrix(&fixture("lobster26_biadjacency.matrix")).unwrap();
    let target = parse_matrix(&fixture("lobster26_shifted.matrix")).unwrap();
    let hit = enumerate_shifts_with(&a, 3, StepSet::RowColumn, in_no_class)
        .unwrap()
        .find(|s| s.matrix == target)
        .expect("A' within three swaps");
    assert_eq!(hit.steps.len(), 3);
    let mut cur = a.clone();
    for step in &hit.steps {
        cur = shift_ones(&cur, &step.moves(), true).unwrap();
    }
    assert_eq!(cur, target);
}

#[test]
fn full_steps_stay_completely_graceful_trees() {
    let a = parse_matrix(&fixture("lobster28_biadjacency.matrix")).unwrap();
    let mut n = 0;
    for s in enumerate_shifts(&a, 1, |_| true).unwrap() {
        assert!(is_completely_graceful(&s.matrix).ok);
        let (t, _) = matrix_to_graph(&s.matrix).unwrap();
        assert!(t.is_connected());
        n += 1;
    }
    assert!(n > 100, "{n}");
}

/// Several minutes on one core.
#[test]
#[ignore]
fn full_steps_reach_the_shifted_lobster() {
    let a = parse_matrix(&fixture("lobster26_biadjacency.matrix")).unwrap();
    let target = parse_matrix(&fixture("lobster26_shifted.matrix")).unwrap();
    assert!(enumerate_shifts(&a, 3, in_no_class).unwrap().any(|s| s.matrix == target));
}

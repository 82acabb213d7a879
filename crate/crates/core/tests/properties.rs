use graceful_core::format::{
    parse_edge_list, parse_labeling, parse_matrix, parse_moves, write_edge_list, write_labeling, write_matrix,
    write_moves,
};
use graceful_core::graph::Graph;
use graceful_core::labeling::{verify_beta, Labeling};
use graceful_core::matrix::{canonical_adjacency, is_graceful_grid, Move};
use proptest::prelude::*;

/// A random labeled tree: parent pointers plus a permutation of labels.
fn tree_and_labels() -> impl Strategy<Value = (Graph, Labeling)> {
    (1usize..14).prop_flat_map(|n| {
        let parents: Vec<_> = (1..n).map(|v| 0..v).collect();
        (parents, Just((0..n).collect::<Vec<_>>()).prop_shuffle()).prop_map(move |(ps, labels)| {
            let edges: Vec<_> = ps.into_iter().enumerate().map(|(i, p)| (p, i + 1)).collect();
            (Graph::new(n, &edges).unwrap(), Labeling::beta(labels))
        })
    })
}

proptest! {
    #[test]
    fn edge_lists_round_trip((g, _) in tree_and_labels()) {
        let text = write_edge_list(&g);
        let back = parse_edge_list(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(write_edge_list(&back), text);
    }

    #[test]
    fn labelings_round_trip((_, f) in tree_and_labels(), alpha in any::<bool>()) {
        let f = if alpha { Labeling::alpha(f.labels().to_vec(), f.len() / 2) } else { f };
        let text = write_labeling(&f);
        prop_assert_eq!(parse_labeling(&text).unwrap(), f);
    }

    #[test]
    fn matrices_round_trip((g, f) in tree_and_labels()) {
        let m = canonical_adjacency(&g, &f).unwrap();
        let text = write_matrix(&m);
        prop_assert_eq!(write_matrix(&parse_matrix(&text).unwrap()), text);
    }

    #[test]
    fn moves_round_trip(cells in prop::collection::vec((0usize..100, 0usize..100, 0usize..100, 0usize..100), 0..8)) {
        let moves: Vec<Move> = cells.into_iter().map(|(a, b, c, d)| Move { from: (a, b), to: (c, d) }).collect();
        prop_assert_eq!(parse_moves(&write_moves(&moves)).unwrap(), moves);
    }

    #[test]
    fn grid_agrees_with_verifier((g, f) in tree_and_labels()) {
        let grid = is_graceful_grid(&canonical_adjacency(&g, &f).unwrap()).ok;
        prop_assert_eq!(grid, verify_beta(&g, &f).ok);
    }

    #[test]
    fn parsers_never_panic(text in "[0-9 #\\-\\n>a-z]{0,80}") {
        let _ = parse_edge_list(&text);
        let _ = parse_labeling(&text);
        let _ = parse_matrix(&text);
        let _ = parse_moves(&text);
    }
}

//! Graceful and alpha-labelings of trees, with an adjacency-matrix calculus
//! for composing them and a brute-force oracle for checking the results.

pub mod canon;
pub mod construct;
pub mod format;
pub mod graph;
pub mod labeling;
pub mod lobster;
pub mod matrix;
pub mod search;
pub mod shift;
pub mod structure;

//! One line per acceptance criterion, each timed against its limit.
//! Runs without the libtest harness so the report stays readable.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::time::{Duration, Instant};

use graceful_core::construct::{
    attach_at_vertices, chain_join_km, chain_join_p4, disjoint_union_alpha, double, merge_join_chain, star_join,
    AttachMode, Certificate, ChainMode, ConstructError,
};
use graceful_core::format::{parse_edge_list, parse_labeling, parse_matrix, parse_moves, write_matrix};
use graceful_core::graph::{is_tree, Graph, Vertex};
use graceful_core::labeling::{inverse_alpha, verify, verify_alpha, verify_beta, LabelKind, Labeling};
use graceful_core::lobster::{classify_lobster, label_balanced_lobster, lemma_pb1_sums, BalancedLobsterSpec, Clause};
use graceful_core::matrix::{
    canonical_adjacency, canonical_biadjacency, is_completely_graceful, is_graceful_grid, matrix_to_graph, shift_ones,
    transform, LabeledMatrix, MatrixKind, Transform,
};
use graceful_core::search::{brute_force_alpha, brute_force_graceful, enumerate_trees, SearchBudget};
use graceful_core::structure::{classify_tree, lobster_decompose, TreeClass};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn fixture(name: &str) -> String {
    let path: PathBuf = [env!("CARGO_MANIFEST_DIR"), "fixtures", name].iter().collect();
    std::fs::read_to_string(path).unwrap()
}

fn tree9() -> (Graph, Labeling) {
    (parse_edge_list(&fixture("tree9.edges")).unwrap(), parse_labeling(&fixture("tree9.labels")).unwrap())
}

fn fixture_double() {
    let (g, f) = tree9();
    assert_eq!(write_matrix(&canonical_adjacency(&g, &f).unwrap()), fixture("tree9_adjacency.matrix"));
    let cert = double(&g, &f, 8).unwrap();
    cert.check().unwrap();
    assert_eq!(write_matrix(&cert.matrix), fixture("tree9_double.matrix"));
    assert!(cert.is_complete());
    let v = verify_alpha(&cert.graph, &cert.labeling);
    assert!(v.ok);
    assert_eq!(v.critical, Some(8));
    assert!(cert.labeling.is_complete(&cert.graph));
}

fn fixture_attach() {
    let read = |name: &str| parse_matrix(&fixture(name)).unwrap();
    let [a0, a1, a2, b] = ["attach_part0.matrix", "attach_part1.matrix", "attach_part2.matrix", "attach_host.matrix"].map(read);
    let blocks = [&a0, &a1, &a2, &a1, &a0];
    let parts: Vec<(Graph, Labeling)> = blocks.iter().map(|m| matrix_to_graph(m).unwrap()).collect();
    let host = matrix_to_graph(&b).unwrap();
    let cert = attach_at_vertices(&host, &parts, AttachMode::Strict).unwrap();
    cert.check().unwrap();
    assert_eq!((cert.graph.num_vertices(), cert.graph.num_edges()), (45, 44));
    assert!(is_tree(&cert.graph));
    assert!(verify(&cert.graph, &cert.labeling).ok);
    assert!(is_completely_graceful(&cert.matrix).ok);

    // Block A_i sits in row band i and column band r - i; the host grid
    // occupies the last row and column of every band.
    let (n, r, w) = (45, 4, 9);
    let mut expected = vec![false; n * n];
    for (i, a) in blocks.iter().enumerate() {
        for (p, q) in a.ones() {
            expected[(w * i + p) * n + w * (r - i) + q] = true;
        }
    }
    for i in 0..=r {
        for j in 0..=r {
            expected[(w * i + w - 1) * n + w * j + w - 1] = b.get(i, j);
        }
    }
    assert_eq!(cert.matrix.kind(), MatrixKind::Adjacency);
    assert!(cert.matrix.row_labels().iter().enumerate().all(|(p, &(_, l))| p == l));
    for i in 0..=r {
        for j in 0..=r {
            let cell = (w * i + w - 1, w * j + w - 1);
            assert_eq!(cert.matrix.get(cell.0, cell.1), b.get(i, j), "b_{i}{j}");
        }
    }
    assert_eq!(cert.matrix.cells(), &expected[..]);
}

fn fixture_balanced() {
    let spec = BalancedLobsterSpec::new(vec![2, 2, 3], vec![3, 3, 2], 3, 2);
    let cert = label_balanced_lobster(&spec).unwrap();
    assert_eq!(cert.critical(), Some(14));
    assert_eq!(cert.graph.num_edges(), 27);
    assert_eq!((cert.matrix.rows(), cert.matrix.cols()), (15, 13));
    assert_eq!(write_matrix(&cert.matrix), fixture("lobster28_biadjacency.matrix"));
}

fn fixture_shifted() {
    let spec = BalancedLobsterSpec::new(vec![3; 3], vec![3; 3], 0, 0);
    assert!(spec.is_trivially_balanced());
    let cert = label_balanced_lobster(&spec).unwrap();
    assert_eq!((cert.critical(), cert.graph.num_edges()), (Some(12), 25));
    assert_eq!(write_matrix(&cert.matrix), fixture("lobster26_biadjacency.matrix"));

    let moves = parse_moves(&fixture("lobster26.moves")).unwrap();
    assert_eq!(moves.len(), 6);
    let shifted = shift_ones(&cert.matrix, &moves, true).unwrap();
    assert_eq!(write_matrix(&shifted), fixture("lobster26_shifted.matrix"));
    assert!(is_completely_graceful(&shifted).ok);
    let (t, f) = matrix_to_graph(&shifted).unwrap();
    assert!(is_tree(&t));
    assert!(verify(&t, &f).ok);
    assert_eq!(classify_tree(&t).unwrap(), TreeClass::Lobster);
    let c = classify_lobster(&lobster_decompose(&t).unwrap());
    assert!(c.flags().is_empty(), "{:?}", c.flags());
}

fn oracle_sweep() {
    let expected = [1, 1, 1, 2, 3, 6, 11, 23, 47];
    for (n, &count) in (1..=9).zip(&expected) {
        let trees = enumerate_trees(n).unwrap();
        assert_eq!(trees.len(), count, "n = {n}");
        for t in &trees {
            let f = brute_force_graceful(t, SearchBudget::default()).found().expect("graceful labeling");
            assert!(verify_beta(t, &f).ok);
        }
    }
}

/// Completely graceful seeds: every tree on 2..=7 vertices with an oracle
/// labeling, its complement and, when one exists, an alpha-labeling and
/// its inverse.
fn seeds() -> Vec<(Graph, Labeling)> {
    let mut out = Vec::new();
    for n in 2..=7 {
        for t in enumerate_trees(n).unwrap() {
            let m = t.num_edges();
            let f = brute_force_graceful(&t, SearchBudget::default()).found().unwrap();
            out.push((t.clone(), f.complement(m)));
            out.push((t.clone(), f));
            if let Some(a) = brute_force_alpha(&t, SearchBudget::default()).found() {
                out.push((t.clone(), inverse_alpha(&t, &a).unwrap()));
                out.push((t, a));
            }
        }
    }
    out
}

/// The same labeled tree with vertex ids shuffled.
fn shuffled(seed: &(Graph, Labeling), rng: &mut ChaCha8Rng) -> (Graph, Labeling) {
    let mut map: Vec<Vertex> = seed.0.vertices().collect();
    map.shuffle(rng);
    (seed.0.permuted(&map), seed.1.transported(&map))
}

fn pick<'a>(pool: &'a [(Graph, Labeling)], rng: &mut ChaCha8Rng, keep: impl Fn(&(Graph, Labeling)) -> bool) -> &'a (Graph, Labeling) {
    let fits: Vec<_> = pool.iter().filter(|s| keep(s)).collect();
    fits.choose(rng).unwrap()
}

fn is_alpha(s: &(Graph, Labeling)) -> bool {
    s.1.kind() == LabelKind::Alpha
}

fn edge_sum(parts: &[(Graph, Labeling)]) -> usize {
    parts.iter().map(|(g, _)| g.num_edges()).sum()
}

/// Attempt one random composition. `Ok(None)` is a rejected input.
fn compose(pool: &[(Graph, Labeling)], kind: usize, rng: &mut ChaCha8Rng) -> Result<Option<(String, Certificate)>, String> {
    let sizes = |rng: &mut ChaCha8Rng| rng.gen_range(2..=4);
    let (name, result, edges, critical): (&str, Result<Certificate, ConstructError>, Option<usize>, Option<usize>) = match kind {
        0 => {
            let s = shuffled(pick(pool, rng, |_| true), rng);
            let j = rng.gen_range(0..=s.0.num_edges());
            let m = s.0.num_edges();
            ("double", double(&s.0, &s.1, j), Some(2 * m + 1), Some(m))
        }
        1..=4 => {
            let r = sizes(rng);
            let parts: Vec<_> = (0..r).map(|_| shuffled(pick(pool, rng, is_alpha), rng)).collect();
            let ks: usize = parts.iter().map(|(_, f)| f.critical().unwrap()).sum();
            let e = edge_sum(&parts);
            match kind {
                1 => ("disjoint-union", disjoint_union_alpha(&parts), Some(e), Some(ks + r - 1)),
                2 => ("chain-km", chain_join_km(&parts), Some(e + r - 1), Some(ks + r - 1)),
                3 => ("chain-alternating", chain_join_p4(&parts, ChainMode::Alternating), Some(e + r - 1), None),
                _ => ("chain-all-m", chain_join_p4(&parts, ChainMode::AllM), Some(e + r - 1), None),
            }
        }
        5 => {
            let r = sizes(rng);
            let n0 = rng.gen_range(2..=5);
            let parts: Vec<_> = (0..r).map(|_| shuffled(pick(pool, rng, |s| s.0.num_vertices() == n0), rng)).collect();
            let e = edge_sum(&parts);
            ("star-join", star_join(&parts), Some(e + (r - 1) * (n0 - 1) + 2 * r - 1), None)
        }
        6 => {
            let r = rng.gen_range(1..=4);
            let host = shuffled(pick(pool, rng, |s| s.0.num_vertices() == r + 1), rng);
            let n0 = rng.gen_range(2..=4);
            let mut parts = vec![None; r + 1];
            for i in 0..=r / 2 {
                let s = pick(pool, rng, |s| s.0.num_vertices() == n0);
                parts[i] = Some(shuffled(s, rng));
                parts[r - i] = Some(shuffled(s, rng));
            }
            let parts: Vec<_> = parts.into_iter().map(Option::unwrap).collect();
            let e = edge_sum(&parts) + host.0.num_edges();
            ("attach", attach_at_vertices(&host, &parts, AttachMode::Strict), Some(e), None)
        }
        _ => {
            let r = sizes(rng);
            let parts: Vec<_> = (0..r).map(|_| shuffled(pick(pool, rng, |s| s.0.num_vertices() <= 5), rng)).collect();
            let e = parts[0].0.num_edges() + parts[1..].iter().map(|(g, _)| 2 * g.num_edges() + 1).sum::<usize>();
            ("merge-join", merge_join_chain(&parts), Some(e), None)
        }
    };
    let cert = match result {
        Ok(cert) => cert,
        Err(ConstructError::Verification(f)) => return Err(format!("{name}: {f}")),
        Err(ConstructError::Structure(s)) => return Err(format!("{name}: {s}")),
        Err(ConstructError::Matrix(e)) => return Err(format!("{name}: {e}")),
        Err(_) => return Ok(None),
    };
    cert.check().map_err(|e| format!("{name}: recheck: {e}"))?;
    if let Some(e) = edges {
        if cert.graph.num_edges() != e {
            return Err(format!("{name}: {} edges, expected {e}", cert.graph.num_edges()));
        }
    }
    if critical.is_some() && cert.critical() != critical {
        return Err(format!("{name}: critical {:?}, expected {critical:?}", cert.critical()));
    }
    // A forest of several trees has more vertices than labels 0..=m allow.
    if name != "disjoint-union" {
        if !is_tree(&cert.graph) {
            return Err(format!("{name}: result is not a tree"));
        }
        if cert.graph.num_vertices() <= 12 && !brute_force_graceful(&cert.graph, SearchBudget::default()).is_found() {
            return Err(format!("{name}: oracle finds no graceful labeling"));
        }
    }
    Ok(Some((name.to_string(), cert)))
}

fn construction_soundness() {
    let pool = seeds();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let mut done = std::collections::BTreeMap::<String, usize>::new();
    let mut attempts = 0;
    while done.values().sum::<usize>() < 560 && attempts < 20_000 {
        let kind = attempts % 8;
        attempts += 1;
        match compose(&pool, kind, &mut rng) {
            Ok(Some((name, _))) => *done.entry(name).or_default() += 1,
            Ok(None) => {}
            Err(e) => panic!("{e}"),
        }
    }
    assert!(done.values().sum::<usize>() >= 500, "{done:?}");
    assert_eq!(done.len(), 8, "{done:?}");
    assert!(done.values().all(|&c| c >= 10), "{done:?}");
}

/// Balanced specs built from the defining equations with a union-find over
/// the 2r leaf counts.
fn random_balanced_spec(rng: &mut ChaCha8Rng) -> BalancedLobsterSpec {
    let r = rng.gen_range(0..=16);
    let mut parent: Vec<usize> = (0..2 * r).collect();
    fn find(p: &mut [usize], mut a: usize) -> usize {
        while p[a] != a {
            a = p[a];
        }
        a
    }
    let mut union = |a: usize, b: usize| {
        let (a, b) = (find(&mut parent, a), find(&mut parent, b));
        parent[a] = b;
    };
    // x_i at 2(i-1), y_i at 2(i-1)+1, 1-based i.
    let (xi, yi) = (|i: usize| 2 * (i - 1), |i: usize| 2 * (i - 1) + 1);
    for i in 1..=r {
        if i % 2 == 1 {
            union(xi(i), yi(r - (i - 1) / 2));
            union(yi(i), xi(r - (i - 1) / 2));
        } else {
            union(xi(i), xi(i / 2));
            union(yi(i), yi(i / 2));
        }
    }
    let value: Vec<usize> = (0..2 * r).map(|_| rng.gen_range(1..=9)).collect();
    let at = |p: usize, parent: &mut [usize]| value[find(parent, p)];
    let x = (1..=r).map(|i| at(xi(i), &mut parent)).collect();
    let y = (1..=r).map(|i| at(yi(i), &mut parent)).collect();
    BalancedLobsterSpec::new(x, y, rng.gen_range(0..=9), rng.gen_range(0..=9))
}

fn formula_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(47);
    let mut checked = 0;
    for _ in 0..100 {
        let spec = random_balanced_spec(&mut rng);
        assert!(spec.is_balanced());
        let r = spec.r();
        let (x, y) = (&spec.x, &spec.y);
        let sum = |v: &[usize], a: usize, b: usize| (a..=b).map(|t| v[t - 1]).sum::<usize>();
        for i in 1..=r {
            let cases: [(Clause, usize, usize); 2] = if i % 2 == 1 {
                [
                    (Clause::I, sum(x, i.div_ceil(2), i), sum(y, r - (i - 1) / 2, r)),
                    (Clause::Ii, sum(y, i.div_ceil(2), i), sum(x, r - (i - 1) / 2, r)),
                ]
            } else {
                [
                    (Clause::Iii, sum(x, i / 2 + 1, i), sum(y, r - i / 2 + 1, r)),
                    (Clause::Iv, sum(y, i / 2 + 1, i), sum(x, r - i / 2 + 1, r)),
                ]
            };
            for (clause, lhs, rhs) in cases {
                assert_eq!(lhs, rhs, "{spec:?} i = {i} clause {clause}");
                assert_eq!(lemma_pb1_sums(&spec, i, clause).unwrap(), (lhs, rhs));
                checked += 1;
            }
        }

        let cert = label_balanced_lobster(&spec).unwrap();
        let (sx, sy): (usize, usize) = (x.iter().sum(), y.iter().sum());
        let k = spec.s1 + r + sy;
        let m = spec.s1 + spec.s2 + 2 * r + 1 + sx + sy;
        // Count vertices directly: the side holding label 0 has k + 1.
        let side = cert.graph.bipartition().unwrap();
        let zero = cert.labeling.vertex_with(0).unwrap();
        let low = cert.graph.vertices().filter(|&v| side[v] == side[zero]).count();
        assert_eq!(cert.graph.num_vertices(), 2 + spec.s1 + spec.s2 + 2 * r + sx + sy);
        assert_eq!((low - 1, cert.graph.num_edges()), (k, m));
        assert_eq!(cert.critical(), Some(k));
        assert!(verify_alpha(&cert.graph, &cert.labeling).ok);
    }
    assert!(checked > 300, "{checked}");
}

fn random_tree(n: usize, rng: &mut ChaCha8Rng) -> Graph {
    let edges: Vec<_> = (1..n).map(|v| (rng.gen_range(0..v), v)).collect();
    Graph::new(n, &edges).unwrap()
}

/// A uniformly random permutation of `0..n` as labels.
fn random_labels(n: usize, rng: &mut ChaCha8Rng) -> Labeling {
    let mut labels: Vec<usize> = (0..n).collect();
    labels.shuffle(rng);
    Labeling::beta(labels)
}

fn calculus_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let budget = SearchBudget::default();

    // Inverse alpha-labelings and the four orientations.
    for _ in 0..60 {
        let t = random_tree(rng.gen_range(2..=9), &mut rng);
        let Some(f) = brute_force_alpha(&t, budget).found() else { continue };
        let inv = inverse_alpha(&t, &f).unwrap();
        assert_eq!(inv.critical(), f.critical());
        assert!(verify_alpha(&t, &inv).ok);
        assert_eq!(inverse_alpha(&t, &inv).unwrap(), f);

        let a = canonical_biadjacency(&t, &f).unwrap();
        let ar = transform(&a, Transform::R).unwrap();
        assert_eq!(ar.cells(), canonical_biadjacency(&t, &inv).unwrap().cells());
        let at = transform(&a, Transform::T).unwrap();
        assert_eq!(transform(&at, Transform::T).unwrap(), a);
        assert_eq!(transform(&ar, Transform::R).unwrap(), a);
        let rt = transform(&a, Transform::RT).unwrap();
        assert_eq!(transform(&ar, Transform::T).unwrap(), rt);
        assert_eq!(transform(&at, Transform::R).unwrap(), rt);
        for m in [&ar, &at, &rt] {
            assert!(is_completely_graceful(m).ok);
        }
    }

    // Labeling side: graceful grid exactly when the verifier passes.
    let (mut pass, mut fail) = (0, 0);
    for round in 0..400 {
        let n = rng.gen_range(2..=9);
        let t = random_tree(n, &mut rng);
        let f = if round % 2 == 0 {
            brute_force_graceful(&t, budget).found().unwrap()
        } else {
            random_labels(n, &mut rng)
        };
        let f = if round % 4 == 0 {
            // Break a known-good labeling by swapping two labels.
            let mut labels = f.labels().to_vec();
            let (a, b) = (rng.gen_range(0..n), rng.gen_range(0..n));
            labels.swap(a, b);
            Labeling::beta(labels)
        } else {
            f
        };
        let grid = is_graceful_grid(&canonical_adjacency(&t, &f).unwrap()).ok;
        let verdict = verify_beta(&t, &f).ok;
        assert_eq!(grid, verdict, "{:?} on {:?}", f.labels(), t.edges());
        if verdict {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    assert!(pass > 100 && fail > 50, "{pass} / {fail}");

    // Grid side: random symmetric grids read back as labeled graphs.
    let (mut pass, mut fail) = (0, 0);
    for round in 0..400 {
        let m = rng.gen_range(1..=10);
        let n = m + 1;
        let mut cells = vec![false; n * n];
        let mut placed = 0;
        while placed < m {
            // Even rounds put one 1 on each diagonal; odd rounds anywhere.
            let (a, b) = if round % 2 == 0 {
                let d = placed + 1;
                let a = rng.gen_range(0..n - d);
                (a, a + d)
            } else {
                let a = rng.gen_range(0..n);
                let b = rng.gen_range(0..n);
                if a == b || cells[a * n + b] {
                    continue;
                }
                (a, b)
            };
            cells[a * n + b] = true;
            cells[b * n + a] = true;
            placed += 1;
        }
        let labels: Vec<usize> = (0..n).collect();
        let grid = LabeledMatrix::from_labels(MatrixKind::Adjacency, &labels, &labels, cells, None).unwrap();
        let (g, f) = matrix_to_graph(&grid).unwrap();
        let ok = is_graceful_grid(&grid).ok;
        assert_eq!(ok, verify_beta(&g, &f).ok);
        if ok {
            pass += 1;
        } else {
            fail += 1;
        }
    }
    assert!(pass >= 200 && fail > 50, "{pass} / {fail}");
}

fn main() {
    type Check = fn();
    let criteria: [(&str, u64, Check); 8] = [
        ("1 canonical matrices and double", 1, fixture_double),
        ("2 attachment layout", 1, fixture_attach),
        ("3 balanced lobster", 1, fixture_balanced),
        ("4 shifted lobster", 1, fixture_shifted),
        ("5 tree counts and oracle sweep", 60, oracle_sweep),
        ("6 construction soundness", 120, construction_soundness),
        ("7 prefix sums and k, m formulas", 10, formula_suite),
        ("8 matrix calculus laws", 10, calculus_suite),
    ];
    let mut failed = 0;
    for (name, limit, check) in criteria {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(check));
        let elapsed = start.elapsed();
        let slow = elapsed > Duration::from_secs(limit);
        let status = if outcome.is_ok() && !slow { "PASS" } else { "FAIL" };
        let note = match (&outcome, slow) {
            (Err(_), _) => " (assertion failed)",
            (Ok(()), true) => " (over time limit)",
            _ => "",
        };
        println!("{status} criterion {name}: {:.3}s of {limit}s{note}", elapsed.as_secs_f64());
        failed += usize::from(status == "FAIL");
    }
    if failed > 0 {
        eprintln!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}

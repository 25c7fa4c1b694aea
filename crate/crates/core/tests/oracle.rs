mod common;

use common::{library_betti_table, naive_betti_table, random_points};
use proptest::prelude::*;

#[test]
fn oracle_knows_four_general_points() {
    // Complete intersection of two conics: 1, 2 quadrics, 1 syzygy of degree 4.
    let pts = vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1], vec![1, 1, 1]];
    let t = naive_betti_table(&pts, 2, 101, 2);
    assert_eq!(t, vec![vec![1, 0, 0, 0], vec![0, 2, 0, 0], vec![0, 0, 1, 0]]);
}

#[test]
fn oracle_knows_collinear_points() {
    // Three collinear points in the plane: ideal (X_2, cubic), resolution a
    // Koszul complex with generators in degrees 1 and 3.
    let pts = vec![vec![1, 0, 0], vec![0, 1, 0], vec![1, 1, 0]];
    let t = naive_betti_table(&pts, 2, 31, 3);
    assert_eq!(t[0], vec![1, 1, 0, 0]);
    assert_eq!(t[2], vec![0, 1, 1, 0]);
    assert!(t[1].iter().chain(&t[3]).all(|&x| x == 0));
}

#[test]
fn library_matches_oracle_on_degenerate_sets() {
    for (n, count, collinear, seed) in [(2, 9, 5, 1u64), (3, 10, 4, 2), (3, 7, 7, 3), (2, 12, 0, 4)] {
        let pts = random_points(n, count, 53, seed, collinear);
        let rows = count as u32;
        assert_eq!(library_betti_table(&pts, n, 53, rows), naive_betti_table(&pts, n, 53, rows as usize), "n={} seed={}", n, seed);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn library_matches_oracle(seed in any::<u64>(), n in 2usize..4, count in 1usize..11, collinear in 0usize..5) {
        let pts = random_points(n, count, 31, seed, collinear);
        let rows = count as u32;
        prop_assert_eq!(library_betti_table(&pts, n, 31, rows), naive_betti_table(&pts, n, 31, rows as usize));
    }
}

mod common;

use common::{oracle_mismatches, random_instance};

#[test]
fn estimators_match_brute_force_on_random_small_graphs() {
    let mut failures = Vec::new();
    for seed in 0..25 {
        let inst = random_instance(seed);
        assert!((5..=12).contains(&inst.n));
        for name in oracle_mismatches(&inst, 1e-10) {
            failures.push(format!("seed {seed} (n={}, r={}): {name}", inst.n, inst.r));
        }
    }
    assert!(failures.is_empty(), "{failures:#?}");
}

#[test]
fn cofactor_inverse_is_an_inverse() {
    let m = [[4.0, 1.0, 2.0], [1.0, 3.0, 0.5], [2.0, 0.5, 5.0]];
    let p = common::mul3(&m, &common::inverse3(&m));
    for i in 0..3 {
        for j in 0..3 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((p[i][j] - want).abs() < 1e-14);
        }
    }
}

#[test]
fn brute_force_ssiv_meat_matches_closed_form_on_a_path() {
    // Path 0-1-2 with u = (1, 2, 3): c = 2(1*2 + 2*3) = 16, d = 2^2 + 4^2 + 2^2 = 24.
    let adj = vec![vec![0.0, 1.0, 0.0], vec![1.0, 0.0, 1.0], vec![0.0, 1.0, 0.0]];
    let m = common::ssiv_meat(&adj, &[1.0, 2.0, 3.0], 0.5);
    assert_eq!(m[0][0], 14.0);
    assert_eq!(m[1][2], 0.25 * 16.0);
    assert_eq!(m[2][2], 0.25 * 24.0);
}

use proptest::prelude::*;
use topomap::matching::*;

fn total(pairs: &[(usize, usize)], d: &dyn Fn(usize, usize) -> i64) -> i64 {
    pairs.iter().map(|&(a, b)| d(a, b)).sum()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 400, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn blossom_matches_brute_force(half in 1usize..=4, pts in proptest::collection::vec((0i64..12, 0i64..12), 8)) {
        let n = 2 * half;
        let l = 12;
        let tor = |a: i64, b: i64| { let d = (a - b).rem_euclid(l); d.min(l - d) };
        let d = |i: usize, j: usize| tor(pts[i].0, pts[j].0) + tor(pts[i].1, pts[j].1);
        let pairs = min_weight_perfect_matching(n, d);
        let mut seen = vec![false; n];
        for &(a, b) in &pairs {
            prop_assert!(!seen[a] && !seen[b]);
            seen[a] = true;
            seen[b] = true;
        }
        prop_assert_eq!(total(&pairs, &d), brute_force_min_matching(n, &d));
    }

    #[test]
    fn random_weights(half in 1usize..=6, w in proptest::collection::vec(0i64..100, 66)) {
        let n = 2 * half;
        let idx = |i: usize, j: usize| { let (a, b) = if i < j { (i, j) } else { (j, i) }; a * 12 + b - (a + 1) * (a + 2) / 2 };
        let d = |i: usize, j: usize| w[idx(i, j)];
        let pairs = min_weight_perfect_matching(n, d);
        prop_assert_eq!(total(&pairs, &d), brute_force_min_matching(n, &d));
    }
}

#[test]
fn larger_instances_are_perfect() {
    let mut s = 12345u64;
    for n in [40usize, 120] {
        let pts: Vec<(i64, i64)> = (0..n)
            .map(|_| {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                (((s >> 33) % 64) as i64, ((s >> 13) % 64) as i64)
            })
            .collect();
        let d = |i: usize, j: usize| (pts[i].0 - pts[j].0).abs() + (pts[i].1 - pts[j].1).abs();
        let pairs = min_weight_perfect_matching(n, d);
        assert_eq!(pairs.len(), n / 2);
        // local optimality: no two pairs improve by swapping partners
        for a in 0..pairs.len() {
            for b in a + 1..pairs.len() {
                let (p, q) = pairs[a];
                let (r, t) = pairs[b];
                let cur = d(p, q) + d(r, t);
                assert!(cur <= d(p, r) + d(q, t) && cur <= d(p, t) + d(q, r));
            }
        }
    }
}

use approx::assert_relative_eq;
use proptest::prelude::*;

use topohunt::union_find::UnionFind;
use topohunt::{
    betti_curve, betti_numbers, bottleneck_distance, diagram_from_barcode, euclidean_distances, rips_complex,
    rips_persistence, Barcode, DistanceMatrix, PersistenceFeature, PointCloud, Simplex,
};

fn cloud(max_n: usize) -> impl Strategy<Value = PointCloud> {
    (2usize..=3).prop_flat_map(move |dim| {
        prop::collection::vec(prop::collection::vec(-1.0f64..1.0, dim), 1..=max_n)
            .prop_map(|rows| PointCloud::from_rows(rows).unwrap())
    })
}

/// Points on a small integer grid, so many pairwise distances tie.
fn grid_cloud(max_n: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec((0i32..4, 0i32..4), 1..=max_n).prop_map(|pts| {
        PointCloud::from_rows(pts.into_iter().map(|(x, y)| vec![x as f64, y as f64]).collect()).unwrap()
    })
}

fn brute_cliques(d: &DistanceMatrix, eps: f64, max_dim: usize) -> Vec<Simplex> {
    let n = d.len();
    let mut out = Vec::new();
    for mask in 1u32..(1 << n) {
        let vs: Vec<u32> = (0..n as u32).filter(|v| mask & (1 << v) != 0).collect();
        if vs.len() > max_dim + 1 {
            continue;
        }
        if vs
            .iter()
            .all(|&a| vs.iter().all(|&b| d.get(a as usize, b as usize) <= eps))
        {
            out.push(Simplex::new(vs).unwrap());
        }
    }
    out.sort();
    out
}

fn sorted_features(bc: &Barcode) -> Vec<(usize, u64, u64)> {
    let mut v: Vec<_> = bc
        .features()
        .iter()
        .map(|f| (f.dimension, f.birth.to_bits(), f.death.to_bits()))
        .collect();
    v.sort();
    v
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rips_matches_clique_enumeration(c in cloud(9), frac in 0.0f64..1.0) {
        let d = euclidean_distances(&c);
        let eps = d.max_distance() * frac;
        let fc = rips_complex(&d, eps, 3);
        let mut got: Vec<Simplex> = fc.cells().iter().map(|c| c.simplex.clone()).collect();
        got.sort();
        prop_assert_eq!(got, brute_cliques(&d, eps, 3));
        for cell in fc.cells() {
            let vs = cell.simplex.vertices();
            let diam = vs
                .iter()
                .flat_map(|&a| vs.iter().map(move |&b| (a, b)))
                .map(|(a, b)| d.get(a as usize, b as usize))
                .fold(0.0, f64::max);
            prop_assert_eq!(cell.value, diam);
        }
    }

    #[test]
    fn rips_complexes_are_nested(c in cloud(10), a in 0.0f64..1.0, b in 0.0f64..1.0) {
        let d = euclidean_distances(&c);
        let (lo, hi) = (a.min(b) * d.max_distance(), a.max(b) * d.max_distance());
        let fc = rips_complex(&d, hi, 2);
        let small = fc.complex_at(lo);
        let big = fc.complex_at(hi);
        prop_assert!(small.iter().all(|s| big.contains(s)));
    }

    #[test]
    fn barcode_agrees_with_static_betti(c in cloud(10)) {
        let d = euclidean_distances(&c);
        let eps_max = d.max_distance();
        let bc = rips_persistence(&d, eps_max, 2).unwrap();
        let fc = rips_complex(&d, eps_max, 3);
        let mut scales: Vec<f64> = fc.cells().iter().map(|c| c.value).collect();
        scales.push(eps_max * 0.37);
        for e in scales {
            let stat = betti_numbers(&fc.complex_at(e));
            for k in 0..=2 {
                prop_assert_eq!(betti_curve(&bc, k, e), stat.get(k), "k {} eps {}", k, e);
            }
        }
    }

    #[test]
    fn infinite_h0_bars_count_components(c in cloud(12), frac in 0.0f64..1.0) {
        let d = euclidean_distances(&c);
        let eps = d.max_distance() * frac;
        let bc = rips_persistence(&d, eps, 1).unwrap();
        let mut uf = UnionFind::new(d.len());
        for i in 0..d.len() {
            for j in i + 1..d.len() {
                if d.get(i, j) <= eps {
                    uf.union(i, j);
                }
            }
        }
        let infinite = bc.in_dimension(0).filter(|f| f.is_infinite()).count();
        prop_assert_eq!(infinite, uf.components());
    }

    #[test]
    fn barcode_is_stable_under_relabeling(c in grid_cloud(9), seed in any::<u64>()) {
        let d = euclidean_distances(&c);
        let mut perm: Vec<usize> = (0..c.len()).collect();
        // deterministic shuffle from the seed
        let mut s = seed;
        for i in (1..perm.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            perm.swap(i, (s >> 33) as usize % (i + 1));
        }
        let a = rips_persistence(&d, d.max_distance(), 2).unwrap();
        let b = rips_persistence(&d.permuted(&perm), d.max_distance(), 2).unwrap();
        prop_assert_eq!(sorted_features(&a), sorted_features(&b));
    }

    #[test]
    fn barcode_scales_with_distances(c in cloud(8), scale in 0.1f64..10.0) {
        let d = euclidean_distances(&c);
        let a = rips_persistence(&d, d.max_distance(), 1).unwrap();
        let b = rips_persistence(&d.scaled(scale), d.max_distance() * scale, 1).unwrap();
        prop_assert_eq!(a.len(), b.len());
        let mut fa: Vec<_> = a.features().to_vec();
        let mut fb: Vec<_> = b.features().to_vec();
        let key = |f: &PersistenceFeature| (f.dimension, f.birth, f.death);
        fa.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        fb.sort_by(|x, y| key(x).partial_cmp(&key(y)).unwrap());
        for (x, y) in fa.iter().zip(&fb) {
            prop_assert_eq!(x.dimension, y.dimension);
            assert_relative_eq!(x.birth * scale, y.birth, max_relative = 1e-9, epsilon = 1e-12);
            if x.is_infinite() {
                prop_assert!(y.is_infinite());
            } else {
                assert_relative_eq!(x.death * scale, y.death, max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn perturbation_moves_diagram_boundedly(
        c in cloud(8),
        shifts in prop::collection::vec(prop::collection::vec(-0.05f64..0.05, 3), 8),
    ) {
        let rows: Vec<Vec<f64>> = c
            .points()
            .zip(&shifts)
            .map(|(p, s)| p.iter().zip(s).map(|(x, dx)| x + dx).collect())
            .collect();
        let moved = PointCloud::from_rows(rows).unwrap();
        let delta = c
            .points()
            .zip(moved.points())
            .map(|(p, q)| p.iter().zip(q).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        let (d1, d2) = (euclidean_distances(&c), euclidean_distances(&moved));
        let cap = d1.max_distance().max(d2.max_distance()) + 1.0;
        let (a, b) = (rips_persistence(&d1, cap, 1).unwrap(), rips_persistence(&d2, cap, 1).unwrap());
        for k in 0..=1 {
            let dist = bottleneck_distance(&diagram_from_barcode(&a, k), &diagram_from_barcode(&b, k)).unwrap();
            // every pairwise distance moves by at most 2 delta
            prop_assert!(dist <= 2.0 * delta + 1e-12, "k {}: {} > 2 * {}", k, dist, delta);
        }
    }
}

#[test]
fn truncation_keeps_bars_open() {
    let sq = PointCloud::from_rows(vec![vec![0.0, 0.0], vec![1.0, 0.0], vec![1.0, 1.0], vec![0.0, 1.0]]).unwrap();
    let bc = rips_persistence(&euclidean_distances(&sq), 1.2, 1).unwrap();
    let h1: Vec<_> = bc.in_dimension(1).collect();
    assert_eq!(h1.len(), 1);
    assert!(h1[0].is_infinite());
    assert_eq!(bc.lifetimes(1), vec![0.19999999999999996]);
}

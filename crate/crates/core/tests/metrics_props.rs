use proptest::prelude::*;

use topohunt::crocker::default_grid;
use topohunt::{
    betti_curve, bottleneck_distance, crocker, euclidean_distances, filter_values, generate, mapper_graph,
    rips_persistence, uniform_cover, Clustering, DiagramPoint, FilterKind, GeneratorSpec, PersistenceDiagram,
    PointCloud, Shape,
};

fn diagram() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0u8..12, 0u8..8), 0..=5).prop_map(|v| {
        v.into_iter()
            .map(|(b, l)| (b as f64 / 4.0, (b + l) as f64 / 4.0))
            .collect()
    })
}

fn to_diagram(points: &[(f64, f64)]) -> PersistenceDiagram {
    PersistenceDiagram::new(0, points.iter().map(|&(b, d)| DiagramPoint::new(b, d)).collect()).unwrap()
}

/// Every way to pair points of `a` with points of `b`, the rest to the diagonal.
fn brute_force(a: &[(f64, f64)], b: &[(f64, f64)]) -> f64 {
    fn go(a: &[(f64, f64)], b: &mut Vec<Option<(f64, f64)>>) -> f64 {
        let Some((&p, rest)) = a.split_first() else {
            return b.iter().flatten().map(|q| (q.1 - q.0) / 2.0).fold(0.0, f64::max);
        };
        let mut best = ((p.1 - p.0) / 2.0).max(go(rest, b));
        for j in 0..b.len() {
            if let Some(q) = b[j].take() {
                let cost = (p.0 - q.0).abs().max((p.1 - q.1).abs());
                best = best.min(cost.max(go(rest, b)));
                b[j] = Some(q);
            }
        }
        best
    }
    go(a, &mut b.iter().copied().map(Some).collect())
}

fn cloud(max_n: usize) -> impl Strategy<Value = PointCloud> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, 2), 1..=max_n)
        .prop_map(|rows| PointCloud::from_rows(rows).unwrap())
}

proptest! {
    #[test]
    fn bottleneck_equals_brute_force(a in diagram(), b in diagram()) {
        let d = bottleneck_distance(&to_diagram(&a), &to_diagram(&b)).unwrap();
        prop_assert_eq!(d, brute_force(&a, &b));
    }

    #[test]
    fn bottleneck_is_a_metric(a in diagram(), b in diagram(), c in diagram()) {
        let (da, db, dc) = (to_diagram(&a), to_diagram(&b), to_diagram(&c));
        let ab = bottleneck_distance(&da, &db).unwrap();
        prop_assert_eq!(bottleneck_distance(&da, &da).unwrap(), 0.0);
        prop_assert_eq!(ab, bottleneck_distance(&db, &da).unwrap());
        let ac = bottleneck_distance(&da, &dc).unwrap();
        let bc = bottleneck_distance(&db, &dc).unwrap();
        prop_assert!(ac <= ab + bc);
    }

    #[test]
    fn bottleneck_ignores_point_order(a in diagram(), b in diagram()) {
        let mut r = a.clone();
        r.reverse();
        prop_assert_eq!(
            bottleneck_distance(&to_diagram(&a), &to_diagram(&b)).unwrap(),
            bottleneck_distance(&to_diagram(&r), &to_diagram(&b)).unwrap()
        );
    }

    #[test]
    fn crocker_rows_follow_time_order(series in prop::collection::vec(cloud(8), 1..=4)) {
        let inputs: Vec<_> = series.iter().map(euclidean_distances).collect();
        let grid = default_grid(&inputs, 12).unwrap();
        let eps_max = *grid.last().unwrap();
        let m = crocker(&inputs, None, 0, &grid, 1).unwrap();
        for (row, d) in m.values.iter().zip(&inputs) {
            prop_assert!(row.windows(2).all(|w| w[0] >= w[1]));
            let bc = rips_persistence(d, eps_max, 1).unwrap();
            let want: Vec<usize> = grid.iter().map(|&e| betti_curve(&bc, 0, e)).collect();
            prop_assert_eq!(row, &want);
        }
        let mut reversed = inputs.clone();
        reversed.reverse();
        let r = crocker(&reversed, None, 0, &grid, 1).unwrap();
        let mut rows = r.values.clone();
        rows.reverse();
        prop_assert_eq!(rows, m.values);
    }

    #[test]
    fn mapper_is_invariant_under_permutation(c in cloud(25), rot in 1usize..25) {
        let n = c.len();
        let perm: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let summary = |cloud: &PointCloud, perm: &[usize]| {
            let d = euclidean_distances(cloud);
            let f = filter_values(cloud, &d, FilterKind::Eccentricity { exponent: 1.0 }).unwrap();
            let cover = uniform_cover(&f, 3, 0.4).unwrap();
            let g = mapper_graph(&d, &f, &cover, Clustering::SingleLinkage { epsilon: 0.8 }).unwrap();
            let mut nodes: Vec<(usize, Vec<usize>)> = g
                .nodes
                .iter()
                .map(|node| {
                    let mut m: Vec<usize> = node.members.iter().map(|&i| perm[i]).collect();
                    m.sort_unstable();
                    (node.interval, m)
                })
                .collect();
            nodes.sort();
            (nodes, g.edges.len(), g.cycle_rank())
        };
        let identity: Vec<usize> = (0..n).collect();
        prop_assert_eq!(summary(&c, &identity), summary(&c.permuted(&perm), &perm));
    }
}

fn circle_cycle_rank(spec: &GeneratorSpec) -> usize {
    let c = generate(spec).unwrap();
    let d = euclidean_distances(&c);
    let f = filter_values(&c, &d, FilterKind::Coordinate { axis: 0 }).unwrap();
    let cover = uniform_cover(&f, 4, 0.5).unwrap();
    mapper_graph(&d, &f, &cover, Clustering::SingleLinkage { epsilon: 0.5 })
        .unwrap()
        .cycle_rank()
}

#[test]
fn mapper_sees_the_circle() {
    for n in 40..=80 {
        let spec = GeneratorSpec::new(Shape::Circle, n, 0).noise(0.0);
        assert!(circle_cycle_rank(&spec) >= 1, "n {n}");
    }
    assert_eq!(circle_cycle_rank(&GeneratorSpec::new(Shape::Circle, 60, 1)), 1);
}

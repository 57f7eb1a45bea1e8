use proptest::prelude::*;

use topohunt::homology::euler_characteristic;
use topohunt::union_find::UnionFind;
use topohunt::{betti_numbers, SimplicialComplex};

/// Up to `max_v` vertices and a handful of random maximal simplices.
fn complex(max_v: u32) -> impl Strategy<Value = Vec<Vec<u32>>> {
    prop::collection::vec(prop::collection::btree_set(0..max_v, 1..=5usize), 1..=7)
        .prop_map(|sets| sets.into_iter().map(|s| s.into_iter().collect()).collect())
}

proptest! {
    #[test]
    fn boundary_of_boundary_is_zero(maximal in complex(8)) {
        let k = SimplicialComplex::build(maximal).unwrap();
        let top = k.dimension().unwrap();
        for d in 1..top {
            let outer = k.boundary_matrix(d).unwrap();
            let inner = k.boundary_matrix(d + 1).unwrap();
            let product = outer.compose(&inner).unwrap();
            prop_assert!(product.iter().all(Vec::is_empty));
        }
    }

    #[test]
    fn euler_characteristic_matches_betti(maximal in complex(8)) {
        let k = SimplicialComplex::build(maximal).unwrap();
        let betti = betti_numbers(&k);
        let alt: i64 = betti
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &b)| if i % 2 == 0 { b as i64 } else { -(b as i64) })
            .sum();
        prop_assert_eq!(alt, euler_characteristic(&k));
    }

    #[test]
    fn betti_numbers_add_over_disjoint_union(a in complex(6), b in complex(6)) {
        let ka = SimplicialComplex::build(a.clone()).unwrap();
        let kb = SimplicialComplex::build(b.clone()).unwrap();
        let shifted = b.iter().map(|s| s.iter().map(|v| v + 100).collect::<Vec<_>>());
        let union = SimplicialComplex::build(a.into_iter().chain(shifted)).unwrap();
        let (ba, bb, bu) = (betti_numbers(&ka), betti_numbers(&kb), betti_numbers(&union));
        for d in 0..6 {
            prop_assert_eq!(bu.get(d), ba.get(d) + bb.get(d));
        }
    }

    #[test]
    fn beta_zero_counts_components(maximal in complex(10)) {
        let k = SimplicialComplex::build(maximal).unwrap();
        let verts: Vec<u32> = k.simplices(0).iter().map(|s| s.vertices()[0]).collect();
        let index = |v: u32| verts.binary_search(&v).unwrap();
        let mut uf = UnionFind::new(verts.len());
        if k.dimension().unwrap() >= 1 {
            for e in k.simplices(1) {
                uf.union(index(e.vertices()[0]), index(e.vertices()[1]));
            }
        }
        prop_assert_eq!(betti_numbers(&k).get(0), uf.components());
    }

    #[test]
    fn closure_is_closed(maximal in complex(8)) {
        let k = SimplicialComplex::build(maximal).unwrap();
        prop_assert!(k.is_closed());
        let again = SimplicialComplex::build(
            k.maximal_simplices().iter().map(|s| s.vertices().to_vec()),
        ).unwrap();
        prop_assert_eq!(again, k);
    }
}

#[test]
fn torus_triangulation() {
    // minimal 7-vertex torus
    let tris: Vec<[u32; 3]> = (0..7)
        .flat_map(|i| [[i, (i + 1) % 7, (i + 3) % 7], [i, (i + 2) % 7, (i + 3) % 7]])
        .collect();
    let k = SimplicialComplex::build(tris).unwrap();
    assert_eq!(k.count(2), 14);
    assert_eq!(betti_numbers(&k).as_slice(), &[1, 2, 1]);
    assert_eq!(euler_characteristic(&k), 0);
}

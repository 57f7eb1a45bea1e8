//! Static homology of a single complex over Z/2 via dense elimination.
//!
//! This path is deliberately independent of the sparse persistence
//! reduction so the two can be checked against each other.

use std::fmt;

use serde::Serialize;

use crate::simplicial::{BoundaryMatrix, SimplicialComplex};

/// Betti numbers indexed by dimension.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct BettiVector(pub Vec<usize>);

impl BettiVector {
    /// `beta_k`, zero above the complex dimension.
    pub fn get(&self, k: usize) -> usize {
        self.0.get(k).copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }
}

impl fmt::Display for BettiVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .0
            .iter()
            .enumerate()
            .map(|(k, b)| format!("beta_{k}={b}"))
            .collect();
        f.write_str(&parts.join(" "))
    }
}

/// Sizes of chain, cycle and boundary spaces in one dimension.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ChainDims {
    pub chains: usize,
    pub cycles: usize,
    pub boundaries: usize,
}

/// `dim C_k`, `dim Z_k`, `dim B_k` for every dimension of a complex.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ChainComplexDims(pub Vec<ChainDims>);

struct BitMatrix {
    words: usize,
    rows: Vec<Vec<u64>>,
}

impl BitMatrix {
    fn from_boundary(m: &BoundaryMatrix) -> Self {
        // rows of the elimination are the matrix columns; rank is transpose-invariant
        let words = m.nrows().div_ceil(64);
        let rows = m
            .columns()
            .iter()
            .map(|col| {
                let mut bits = vec![0u64; words];
                for &i in col {
                    bits[i / 64] ^= 1 << (i % 64);
                }
                bits
            })
            .collect();
        BitMatrix { words, rows }
    }

    fn rank(mut self) -> usize {
        let mut rank = 0;
        let nbits = self.words * 64;
        for bit in 0..nbits {
            let (w, mask) = (bit / 64, 1u64 << (bit % 64));
            let Some(p) = (rank..self.rows.len()).find(|&r| self.rows[r][w] & mask != 0) else {
                continue;
            };
            self.rows.swap(rank, p);
            let pivot = self.rows[rank].clone();
            for r in rank + 1..self.rows.len() {
                if self.rows[r][w] & mask != 0 {
                    for (x, y) in self.rows[r][w..].iter_mut().zip(&pivot[w..]) {
                        *x ^= y;
                    }
                }
            }
            rank += 1;
            if rank == self.rows.len() {
                break;
            }
        }
        rank
    }
}

/// Rank over Z/2.
pub fn rank_z2(m: &BoundaryMatrix) -> usize {
    if m.ncols() == 0 || m.nrows() == 0 {
        return 0;
    }
    BitMatrix::from_boundary(m).rank()
}

fn boundary_ranks(complex: &SimplicialComplex) -> Vec<usize> {
    let Some(top) = complex.dimension() else {
        return Vec::new();
    };
    (0..=top)
        .map(|k| {
            let m = complex.boundary_matrix(k).expect("k ranges over existing dimensions");
            rank_z2(&m)
        })
        .collect()
}

pub fn chain_complex_dims(complex: &SimplicialComplex) -> ChainComplexDims {
    let ranks = boundary_ranks(complex);
    ChainComplexDims(
        (0..ranks.len())
            .map(|k| {
                let chains = complex.count(k);
                ChainDims {
                    chains,
                    cycles: chains - ranks[k],
                    boundaries: ranks.get(k + 1).copied().unwrap_or(0),
                }
            })
            .collect(),
    )
}

/// `beta_k = dim Z_k - dim B_k` for `k = 0..=dim`.
pub fn betti_numbers(complex: &SimplicialComplex) -> BettiVector {
    BettiVector(
        chain_complex_dims(complex)
            .0
            .iter()
            .map(|d| d.cycles - d.boundaries)
            .collect(),
    )
}

/// Alternating sum of simplex counts.
pub fn euler_characteristic(complex: &SimplicialComplex) -> i64 {
    (0..=complex.dimension().unwrap_or(0))
        .map(|k| {
            let c = complex.count(k) as i64;
            if k % 2 == 0 {
                c
            } else {
                -c
            }
        })
        .sum()
}

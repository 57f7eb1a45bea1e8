//! Persistence diagrams and the bottleneck distance.
//!
//! The finite part of the distance is found by binary search over the
//! candidate costs. For a threshold `t` the diagrams are matchable iff the
//! bipartite graph below has a perfect matching:
//!
//! * left = points of `a` plus one diagonal slot per point of `b`,
//! * right = points of `b` plus one diagonal slot per point of `a`,
//! * `a_i - b_j` when their L-infinity distance is at most `t`,
//! * `a_i - diag(a_i)` and `diag(b_j) - b_j` when the projection cost is at
//!   most `t`, and every diagonal slot joined to every other diagonal slot.
//!
//! Points with infinite death are matched separately by sorted birth.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::persistence::Barcode;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DiagramPoint {
    pub birth: f64,
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(birth: f64, death: f64) -> Self {
        DiagramPoint { birth, death }
    }

    /// Cost of sending the point to the diagonal.
    pub fn diagonal_cost(&self) -> f64 {
        (self.death - self.birth) / 2.0
    }

    pub fn linf(&self, other: &DiagramPoint) -> f64 {
        (self.birth - other.birth).abs().max((self.death - other.death).abs())
    }
}

/// Multiset of `(birth, death)` points of one homology dimension.
#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct PersistenceDiagram {
    pub dimension: usize,
    pub points: Vec<DiagramPoint>,
}

impl PersistenceDiagram {
    pub fn new(dimension: usize, points: Vec<DiagramPoint>) -> Result<Self> {
        if let Some(p) = points
            .iter()
            .find(|p| p.birth.is_nan() || p.death.is_nan() || p.death < p.birth || p.birth.is_infinite())
        {
            return Err(Error::InvalidParameter(format!(
                "diagram point ({}, {}) is not on or above the diagonal",
                p.birth, p.death
            )));
        }
        Ok(PersistenceDiagram { dimension, points })
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// One point per dimension-`k` bar.
pub fn diagram_from_barcode(bc: &Barcode, k: usize) -> PersistenceDiagram {
    PersistenceDiagram {
        dimension: k,
        points: bc
            .in_dimension(k)
            .map(|f| DiagramPoint::new(f.birth, f.death))
            .collect(),
    }
}

/// Bottleneck distance between two diagrams of the same dimension.
pub fn bottleneck_distance(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Result<f64> {
    if a.dimension != b.dimension {
        return Err(Error::DimensionMismatch {
            expected: a.dimension,
            found: b.dimension,
        });
    }
    let (a_fin, a_inf) = split_infinite(&a.points);
    let (b_fin, b_inf) = split_infinite(&b.points);
    let essential = match essential_distance(a_inf, b_inf) {
        Some(d) => d,
        None => return Ok(f64::INFINITY),
    };
    Ok(finite_bottleneck(&a_fin, &b_fin).max(essential))
}

fn split_infinite(points: &[DiagramPoint]) -> (Vec<DiagramPoint>, Vec<f64>) {
    let mut fin = Vec::new();
    let mut inf = Vec::new();
    for p in points {
        if p.death.is_infinite() {
            inf.push(p.birth);
        } else {
            fin.push(*p);
        }
    }
    (fin, inf)
}

/// Sorted-birth matching of essential points; `None` when counts differ.
fn essential_distance(mut a: Vec<f64>, mut b: Vec<f64>) -> Option<f64> {
    if a.len() != b.len() {
        return None;
    }
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Some(a.iter().zip(&b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

fn finite_bottleneck(a: &[DiagramPoint], b: &[DiagramPoint]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    let mut candidates: Vec<f64> = Vec::with_capacity(a.len() * b.len() + a.len() + b.len() + 1);
    candidates.push(0.0);
    candidates.extend(a.iter().map(DiagramPoint::diagonal_cost));
    candidates.extend(b.iter().map(DiagramPoint::diagonal_cost));
    for p in a {
        candidates.extend(b.iter().map(|q| p.linf(q)));
    }
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    // the largest candidate is always feasible: send everything to the diagonal
    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if perfect_matching_exists(a, b, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    candidates[lo]
}

fn perfect_matching_exists(a: &[DiagramPoint], b: &[DiagramPoint], t: f64) -> bool {
    let (n, m) = (a.len(), b.len());
    // left: a_0..a_n, then diag(b_0)..diag(b_m); right: b_0..b_m, then diag(a_0)..diag(a_n)
    let mut adj: Vec<Vec<usize>> = vec![Vec::new(); n + m];
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            if p.linf(q) <= t {
                adj[i].push(j);
            }
        }
        if p.diagonal_cost() <= t {
            adj[i].push(m + i);
        }
    }
    for (j, q) in b.iter().enumerate() {
        if q.diagonal_cost() <= t {
            adj[n + j].push(j);
        }
        adj[n + j].extend(m..m + n);
    }
    hopcroft_karp(&adj, m + n) == n + m
}

/// Size of a maximum matching; `adj[u]` lists right vertices of left `u`.
fn hopcroft_karp(adj: &[Vec<usize>], right: usize) -> usize {
    const FREE: usize = usize::MAX;
    let left = adj.len();
    let mut match_l = vec![FREE; left];
    let mut match_r = vec![FREE; right];
    let mut dist = vec![0usize; left];
    let mut matched = 0;

    loop {
        // layer the graph from free left vertices
        let mut queue = VecDeque::new();
        for u in 0..left {
            if match_l[u] == FREE {
                dist[u] = 0;
                queue.push_back(u);
            } else {
                dist[u] = usize::MAX;
            }
        }
        let mut found = false;
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == FREE {
                    found = true;
                } else if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        if !found {
            return matched;
        }

        fn augment(
            u: usize,
            adj: &[Vec<usize>],
            dist: &mut [usize],
            match_l: &mut [usize],
            match_r: &mut [usize],
        ) -> bool {
            for &v in &adj[u] {
                let w = match_r[v];
                if w == usize::MAX || (dist[w] == dist[u] + 1 && augment(w, adj, dist, match_l, match_r)) {
                    match_l[u] = v;
                    match_r[v] = u;
                    return true;
                }
            }
            dist[u] = usize::MAX;
            false
        }

        for u in 0..left {
            if match_l[u] == FREE && augment(u, adj, &mut dist, &mut match_l, &mut match_r) {
                matched += 1;
            }
        }
    }
}

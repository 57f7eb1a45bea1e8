//! Mapper graphs: a filter function, an overlapping interval cover of its
//! range, single-linkage clustering of each preimage, and a graph joining
//! clusters that share points.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;

use crate::cloud::PointCloud;
use crate::error::{Error, Result};
use crate::rips::DistanceMatrix;
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum FilterKind {
    /// One coordinate of the ambient space.
    Coordinate { axis: usize },
    /// `(mean_j d(i,j)^p)^(1/p)`; `p = inf` gives the largest distance.
    Eccentricity { exponent: f64 },
    /// Negated Gaussian kernel sum, so dense regions get low values.
    Density { bandwidth: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FilterValues {
    pub values: Vec<f64>,
    pub kind: FilterKind,
}

impl FilterValues {
    /// Filter values supplied directly by the caller.
    pub fn custom(values: Vec<f64>, kind: FilterKind) -> Result<Self> {
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("filter values must be finite".into()));
        }
        Ok(FilterValues { values, kind })
    }

    pub fn range(&self) -> Option<(f64, f64)> {
        let min = self.values.iter().copied().reduce(f64::min)?;
        let max = self.values.iter().copied().reduce(f64::max)?;
        Some((min, max))
    }
}

pub fn filter_values(cloud: &PointCloud, d: &DistanceMatrix, kind: FilterKind) -> Result<FilterValues> {
    let n = cloud.len();
    if d.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: d.len(),
        });
    }
    let values = match kind {
        FilterKind::Coordinate { axis } => {
            if axis >= cloud.dim() {
                return Err(Error::InvalidParameter(format!(
                    "axis {axis} out of range for {}-dimensional points",
                    cloud.dim()
                )));
            }
            cloud.points().map(|p| p[axis]).collect()
        }
        FilterKind::Eccentricity { exponent } => {
            if exponent.is_nan() || exponent < 1.0 {
                return Err(Error::InvalidParameter(format!(
                    "eccentricity exponent must be at least 1, got {exponent}"
                )));
            }
            (0..n)
                .map(|i| {
                    let row = d.row(i);
                    if exponent.is_infinite() {
                        row.iter().copied().fold(0.0, f64::max)
                    } else if exponent == 1.0 {
                        row.iter().sum::<f64>() / n as f64
                    } else {
                        (row.iter().map(|x| x.powf(exponent)).sum::<f64>() / n as f64).powf(1.0 / exponent)
                    }
                })
                .collect()
        }
        FilterKind::Density { bandwidth } => {
            if !(bandwidth > 0.0 && bandwidth.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "bandwidth must be positive, got {bandwidth}"
                )));
            }
            let denom = 2.0 * bandwidth * bandwidth;
            (0..n)
                .map(|i| -d.row(i).iter().map(|x| (-(x * x) / denom).exp()).sum::<f64>())
                .collect()
        }
    };
    Ok(FilterValues { values, kind })
}

/// Closed intervals over the filter range, ordered by lower end.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cover {
    pub intervals: Vec<(f64, f64)>,
    pub count: usize,
    pub overlap: f64,
    /// Set when the filter range had zero width and a single interval was
    /// produced in place of the requested `count`.
    pub degenerate: bool,
}

impl Cover {
    /// An explicit list of intervals.
    pub fn from_intervals(mut intervals: Vec<(f64, f64)>) -> Result<Self> {
        if intervals.is_empty() || intervals.iter().any(|(lo, hi)| lo.is_nan() || hi.is_nan() || lo > hi) {
            return Err(Error::InvalidParameter(
                "cover intervals must be non-empty with lo <= hi".into(),
            ));
        }
        intervals.sort_by(|a, b| a.0.total_cmp(&b.0));
        Ok(Cover {
            count: intervals.len(),
            intervals,
            overlap: 0.0,
            degenerate: false,
        })
    }
}

/// `count` equal-length intervals, neighbours overlapping by the fraction
/// `overlap` of one interval, exactly covering `[min, max]`.
pub fn uniform_cover(values: &FilterValues, count: usize, overlap: f64) -> Result<Cover> {
    if count == 0 {
        return Err(Error::InvalidParameter("interval count must be at least 1".into()));
    }
    if !(overlap > 0.0 && overlap < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "overlap must lie in (0, 1), got {overlap}"
        )));
    }
    let (min, max) = values
        .range()
        .ok_or_else(|| Error::InvalidParameter("no filter values".into()))?;
    if count == 1 || max == min {
        return Ok(Cover {
            intervals: vec![(min, max)],
            count: 1,
            overlap,
            degenerate: count > 1,
        });
    }
    let r = count as f64;
    let length = (max - min) / (r - (r - 1.0) * overlap);
    let step = (1.0 - overlap) * length;
    let mut intervals: Vec<(f64, f64)> = (0..count)
        .map(|i| {
            let lo = min + i as f64 * step;
            (lo, lo + length)
        })
        .collect();
    intervals[count - 1].1 = max;
    Ok(Cover {
        intervals,
        count,
        overlap,
        degenerate: false,
    })
}

/// How points of one preimage are grouped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Clustering {
    /// Single linkage cut at a fixed distance.
    SingleLinkage { epsilon: f64 },
    /// Single linkage cut at the first empty bin of a histogram of merge
    /// distances; one cluster when there is no gap.
    HistogramGap { bins: usize },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapperNode {
    pub id: usize,
    pub interval: usize,
    /// Sorted point indices.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapperEdge {
    pub source: usize,
    pub target: usize,
    pub shared: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MapperGraph {
    pub nodes: Vec<MapperNode>,
    pub edges: Vec<MapperEdge>,
}

impl MapperGraph {
    pub fn components(&self) -> usize {
        let mut uf = UnionFind::new(self.nodes.len());
        for e in &self.edges {
            uf.union(e.source, e.target);
        }
        uf.components()
    }

    /// `edges - nodes + components`: independent cycles of the graph.
    pub fn cycle_rank(&self) -> usize {
        self.edges.len() + self.components() - self.nodes.len()
    }

    /// Graphviz rendering; node labels read `id (size)`.
    pub fn to_dot(&self, color_by_interval: bool) -> String {
        let mut out = String::from("graph mapper {\n");
        let intervals = self.nodes.iter().map(|n| n.interval).max().map_or(1, |m| m + 1);
        for n in &self.nodes {
            let _ = write!(out, "  {} [label=\"{} ({})\"", n.id, n.id, n.members.len());
            if color_by_interval {
                let hue = n.interval as f64 / intervals as f64 * 0.7;
                let _ = write!(out, ", style=filled, fillcolor=\"{hue:.3} 0.6 0.9\"");
            }
            out.push_str("];\n");
        }
        for e in &self.edges {
            let _ = writeln!(out, "  {} -- {} [weight={}];", e.source, e.target, e.shared);
        }
        out.push_str("}\n");
        out
    }
}

/// Merge distances of single linkage on `points`, ascending (Prim's MST).
fn merge_distances(d: &DistanceMatrix, points: &[usize]) -> Vec<f64> {
    let p = points.len();
    if p < 2 {
        return Vec::new();
    }
    let mut in_tree = vec![false; p];
    let mut best = vec![f64::INFINITY; p];
    best[0] = 0.0;
    let mut out = Vec::with_capacity(p - 1);
    for step in 0..p {
        let (u, _) = (0..p)
            .filter(|&i| !in_tree[i])
            .map(|i| (i, best[i]))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("an unvisited vertex remains");
        in_tree[u] = true;
        if step > 0 {
            out.push(best[u]);
        }
        for v in 0..p {
            if !in_tree[v] {
                best[v] = best[v].min(d.get(points[u], points[v]));
            }
        }
    }
    out.sort_by(f64::total_cmp);
    out
}

fn gap_threshold(merges: &[f64], bins: usize) -> f64 {
    let Some(&max) = merges.last() else {
        return 0.0;
    };
    let min = merges[0];
    if bins == 0 || max == min {
        return max;
    }
    let width = (max - min) / bins as f64;
    let mut counts = vec![0usize; bins];
    for &m in merges {
        let b = (((m - min) / width) as usize).min(bins - 1);
        counts[b] += 1;
    }
    match counts.iter().position(|&c| c == 0) {
        Some(b) => min + b as f64 * width,
        None => max,
    }
}

fn single_linkage(d: &DistanceMatrix, points: &[usize], epsilon: f64) -> Vec<Vec<usize>> {
    let mut uf = UnionFind::new(points.len());
    for a in 0..points.len() {
        for b in a + 1..points.len() {
            if d.get(points[a], points[b]) <= epsilon {
                uf.union(a, b);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &p) in points.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().push(p);
    }
    let mut clusters: Vec<Vec<usize>> = groups.into_values().collect();
    for c in &mut clusters {
        c.sort_unstable();
    }
    clusters.sort();
    clusters
}

/// Builds the mapper graph. Preimages use closed interval bounds so points
/// on a shared boundary land in both intervals. Nodes are numbered by
/// `(interval, smallest member)`.
pub fn mapper_graph(
    d: &DistanceMatrix,
    values: &FilterValues,
    cover: &Cover,
    clustering: Clustering,
) -> Result<MapperGraph> {
    if values.values.len() != d.len() {
        return Err(Error::DimensionMismatch {
            expected: d.len(),
            found: values.values.len(),
        });
    }
    match clustering {
        Clustering::SingleLinkage { epsilon } if epsilon.is_nan() || epsilon <= 0.0 => {
            return Err(Error::InvalidParameter(format!(
                "cluster epsilon must be positive, got {epsilon}"
            )))
        }
        _ => {}
    }
    let mut nodes = Vec::new();
    for (interval, &(lo, hi)) in cover.intervals.iter().enumerate() {
        let preimage: Vec<usize> = values
            .values
            .iter()
            .enumerate()
            .filter(|(_, &v)| lo <= v && v <= hi)
            .map(|(i, _)| i)
            .collect();
        if preimage.is_empty() {
            continue;
        }
        let epsilon = match clustering {
            Clustering::SingleLinkage { epsilon } => epsilon,
            Clustering::HistogramGap { bins } => gap_threshold(&merge_distances(d, &preimage), bins),
        };
        for members in single_linkage(d, &preimage, epsilon) {
            nodes.push(MapperNode {
                id: nodes.len(),
                interval,
                members,
            });
        }
    }

    let mut edges = Vec::new();
    for a in 0..nodes.len() {
        for b in a + 1..nodes.len() {
            let shared = count_shared(&nodes[a].members, &nodes[b].members);
            if shared > 0 {
                edges.push(MapperEdge {
                    source: a,
                    target: b,
                    shared,
                });
            }
        }
    }
    Ok(MapperGraph { nodes, edges })
}

fn count_shared(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut n) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                n += 1;
                i += 1;
                j += 1;
            }
        }
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rips::euclidean_distances;

    fn identity_filter(xs: &[f64]) -> FilterValues {
        FilterValues::custom(xs.to_vec(), FilterKind::Coordinate { axis: 0 }).unwrap()
    }

    #[test]
    fn coordinate_and_eccentricity() {
        let c = PointCloud::from_rows(vec![vec![0.0, 0.0], vec![3.0, 4.0]]).unwrap();
        let d = euclidean_distances(&c);
        let f = filter_values(&c, &d, FilterKind::Coordinate { axis: 0 }).unwrap();
        assert_eq!(f.values, vec![0.0, 3.0]);
        assert!(filter_values(&c, &d, FilterKind::Coordinate { axis: 2 }).is_err());

        let line = PointCloud::from_scalars(&[0.0, 10.0]).unwrap();
        let d = euclidean_distances(&line);
        let f = filter_values(
            &line,
            &d,
            FilterKind::Eccentricity {
                exponent: f64::INFINITY,
            },
        )
        .unwrap();
        assert_eq!(f.values, vec![10.0, 10.0]);
        let f = filter_values(&line, &d, FilterKind::Eccentricity { exponent: 1.0 }).unwrap();
        assert_eq!(f.values, vec![5.0, 5.0]);
    }

    #[test]
    fn density_parameters() {
        let c = PointCloud::from_scalars(&[0.0]).unwrap();
        let d = euclidean_distances(&c);
        let f = filter_values(&c, &d, FilterKind::Density { bandwidth: 1.0 }).unwrap();
        assert_eq!(f.values, vec![-1.0]);
        assert!(filter_values(&c, &d, FilterKind::Density { bandwidth: 0.0 }).is_err());
        assert!(filter_values(&c, &d, FilterKind::Density { bandwidth: -2.0 }).is_err());
    }

    #[test]
    fn two_interval_cover() {
        let f = identity_filter(&[0.0, 10.0]);
        let c = uniform_cover(&f, 2, 0.5).unwrap();
        let l = 20.0 / 3.0;
        assert!((c.intervals[0].0 - 0.0).abs() < 1e-12);
        assert!((c.intervals[0].1 - l).abs() < 1e-12);
        assert!((c.intervals[1].0 - (10.0 - l)).abs() < 1e-12);
        assert_eq!(c.intervals[1].1, 10.0);
    }

    #[test]
    fn single_interval_and_small_overlap() {
        let f = identity_filter(&[0.0, 4.0, 10.0]);
        assert_eq!(uniform_cover(&f, 1, 0.3).unwrap().intervals, vec![(0.0, 10.0)]);
        let c = uniform_cover(&f, 2, 1e-9).unwrap();
        assert!((c.intervals[0].1 - 5.0).abs() < 1e-6);
        assert!((c.intervals[1].0 - 5.0).abs() < 1e-6);
    }

    #[test]
    fn cover_errors() {
        let f = identity_filter(&[1.0, 1.0]);
        let c = uniform_cover(&f, 3, 0.5).unwrap();
        assert!(c.degenerate);
        assert_eq!(c.intervals, vec![(1.0, 1.0)]);
        assert!(uniform_cover(&f, 0, 0.5).is_err());
        assert!(uniform_cover(&f, 2, 1.0).is_err());
        assert!(uniform_cover(&f, 2, 0.0).is_err());
    }

    #[test]
    fn ten_collinear_points() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let d = euclidean_distances(&PointCloud::from_scalars(&xs).unwrap());
        let cover = Cover::from_intervals(vec![(0.0, 6.0), (4.0, 10.0)]).unwrap();
        let g = mapper_graph(
            &d,
            &identity_filter(&xs),
            &cover,
            Clustering::SingleLinkage { epsilon: 1.5 },
        )
        .unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.nodes[0].members, (0..=6).collect::<Vec<_>>());
        assert_eq!(g.nodes[1].members, (4..=9).collect::<Vec<_>>());
        assert_eq!(
            g.edges,
            vec![MapperEdge {
                source: 0,
                target: 1,
                shared: 3
            }]
        );
        assert_eq!(g.cycle_rank(), 0);
    }

    #[test]
    fn two_far_clusters() {
        let xs = [0.0, 0.5, 1.0, 100.0, 100.5];
        let d = euclidean_distances(&PointCloud::from_scalars(&xs).unwrap());
        let f = identity_filter(&xs);
        let cover = uniform_cover(&f, 1, 0.5).unwrap();
        let g = mapper_graph(&d, &f, &cover, Clustering::SingleLinkage { epsilon: 1.0 }).unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert!(g.edges.is_empty());
        let g = mapper_graph(&d, &f, &cover, Clustering::HistogramGap { bins: 10 }).unwrap();
        assert_eq!(g.nodes.len(), 2);
    }

    #[test]
    fn nonpositive_cluster_epsilon() {
        let d = euclidean_distances(&PointCloud::from_scalars(&[0.0]).unwrap());
        let f = identity_filter(&[0.0]);
        let cover = uniform_cover(&f, 1, 0.5).unwrap();
        assert!(mapper_graph(&d, &f, &cover, Clustering::SingleLinkage { epsilon: 0.0 }).is_err());
    }

    #[test]
    fn empty_preimages_give_no_nodes() {
        let xs = [0.0, 10.0];
        let d = euclidean_distances(&PointCloud::from_scalars(&xs).unwrap());
        let cover = Cover::from_intervals(vec![(0.0, 1.0), (4.0, 6.0), (9.0, 10.0)]).unwrap();
        let g = mapper_graph(
            &d,
            &identity_filter(&xs),
            &cover,
            Clustering::SingleLinkage { epsilon: 1.0 },
        )
        .unwrap();
        assert_eq!(g.nodes.len(), 2);
        assert_eq!(g.nodes[1].interval, 2);
    }

    #[test]
    fn dot_and_json() {
        let xs: Vec<f64> = (0..10).map(f64::from).collect();
        let d = euclidean_distances(&PointCloud::from_scalars(&xs).unwrap());
        let cover = Cover::from_intervals(vec![(0.0, 6.0), (4.0, 10.0)]).unwrap();
        let g = mapper_graph(
            &d,
            &identity_filter(&xs),
            &cover,
            Clustering::SingleLinkage { epsilon: 1.5 },
        )
        .unwrap();
        let dot = g.to_dot(false);
        assert!(dot.contains("0 [label=\"0 (7)\"]"));
        assert!(dot.contains("0 -- 1 [weight=3]"));
        assert!(g.to_dot(true).contains("fillcolor"));
    }

    #[test]
    fn gap_threshold_finds_the_gap() {
        assert_eq!(gap_threshold(&[1.0, 1.0, 1.1, 10.0], 10), 1.0 + 0.9);
        assert_eq!(gap_threshold(&[], 10), 0.0);
    }
}

//! Distance matrices and the Vietoris-Rips filtration.

use std::cmp::Ordering;
use std::io::Read;
use std::path::Path;

use rayon::prelude::*;

use crate::cloud::{read_table, PointCloud};
use crate::error::{Error, Result};
use crate::simplicial::{Simplex, SimplicialComplex, Vertex};

/// Symmetric matrix of pairwise distances with zero diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MatrixLayout {
    /// `n` rows of `n` entries.
    Square,
    /// Row `i` holds `d(i, 0..i)`, optionally followed by the zero diagonal.
    LowerTriangular,
}

impl DistanceMatrix {
    /// Validates symmetry, zero diagonal, finiteness and non-negativity.
    pub fn from_square(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = Vec::with_capacity(n * n);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "row {} has {} entries, expected {n}",
                    i + 1,
                    row.len()
                )));
            }
            data.extend(row);
        }
        let m = DistanceMatrix { n, data };
        m.validate()?;
        Ok(m)
    }

    pub fn from_lower_triangular(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.iter().enumerate() {
            if row.len() != i && row.len() != i + 1 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "row {} has {} entries, expected {i} or {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
            if row.len() == i + 1 && row[i] != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "diagonal entry {} is {}",
                    i + 1,
                    row[i]
                )));
            }
            for (j, &d) in row.iter().take(i).enumerate() {
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        let m = DistanceMatrix { n, data };
        m.validate()?;
        Ok(m)
    }

    fn validate(&self) -> Result<()> {
        for i in 0..self.n {
            if self.get(i, i) != 0.0 {
                return Err(Error::InvalidDistanceMatrix(format!(
                    "diagonal entry {} is {}",
                    i + 1,
                    self.get(i, i)
                )));
            }
            for j in 0..i {
                let d = self.get(i, j);
                if !d.is_finite() || d < 0.0 {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "entry ({},{}) is {d}",
                        i + 1,
                        j + 1
                    )));
                }
                if d != self.get(j, i) {
                    return Err(Error::InvalidDistanceMatrix(format!(
                        "not symmetric at ({},{})",
                        i + 1,
                        j + 1
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn max_distance(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }

    /// Every entry multiplied by `c > 0`.
    pub fn scaled(&self, c: f64) -> Self {
        DistanceMatrix {
            n: self.n,
            data: self.data.iter().map(|d| d * c).collect(),
        }
    }

    /// Distances between points `perm[i]` and `perm[j]` become entry `(i, j)`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let n = perm.len();
        let mut data = Vec::with_capacity(n * n);
        for &pi in perm {
            for &pj in perm {
                data.push(self.get(pi, pj));
            }
        }
        DistanceMatrix { n, data }
    }
}

/// Pairwise Euclidean distances.
pub fn euclidean_distances(cloud: &PointCloud) -> DistanceMatrix {
    let n = cloud.len();
    let mut data = vec![0.0; n * n];
    for i in 0..n {
        let p = cloud.point(i);
        for j in 0..i {
            let q = cloud.point(j);
            let d = p.iter().zip(q).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    DistanceMatrix { n, data }
}

pub fn parse_distance_matrix<R: Read>(reader: R, layout: MatrixLayout) -> Result<DistanceMatrix> {
    let rows = read_rows_flexible(reader)?;
    match layout {
        MatrixLayout::Square => DistanceMatrix::from_square(rows),
        MatrixLayout::LowerTriangular => DistanceMatrix::from_lower_triangular(rows),
    }
}

fn read_rows_flexible<R: Read>(reader: R) -> Result<Vec<Vec<f64>>> {
    // lower-triangular rows are ragged, so parse line by line
    let mut text = String::new();
    let mut reader = reader;
    reader.read_to_string(&mut text).map_err(|e| Error::Parse {
        row: 0,
        message: e.to_string(),
    })?;
    let mut rows = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            rows.push(Vec::new());
            continue;
        }
        let row = read_table(line.as_bytes(), Some(false))?.pop().unwrap_or_default();
        if row.is_empty() && !line.is_empty() {
            return Err(Error::Parse {
                row: i + 1,
                message: "unreadable row".into(),
            });
        }
        rows.push(row);
    }
    // a leading empty row is the first row of a lower-triangular file
    while rows.len() > 1 && rows.last().is_some_and(Vec::is_empty) {
        rows.pop();
    }
    Ok(rows)
}

pub fn read_distance_matrix(path: impl AsRef<Path>, layout: MatrixLayout) -> Result<DistanceMatrix> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_distance_matrix(std::io::BufReader::new(file), layout).map_err(|e| match e {
        Error::Parse { row, message } => Error::Parse {
            row,
            message: format!("{}: {message}", path.display()),
        },
        other => other,
    })
}

/// A simplex together with the scale at which it enters.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredCell {
    pub simplex: Simplex,
    pub value: f64,
}

impl FilteredCell {
    pub fn new(simplex: Simplex, value: f64) -> Self {
        FilteredCell { simplex, value }
    }

    pub fn dimension(&self) -> usize {
        self.simplex.dimension()
    }
}

/// Filtration order: value, then dimension, then lexicographic vertices.
pub fn filtration_order(a: &FilteredCell, b: &FilteredCell) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then_with(|| a.dimension().cmp(&b.dimension()))
        .then_with(|| a.simplex.cmp(&b.simplex))
}

/// Simplices listed in filtration order.
#[derive(Clone, Debug, PartialEq)]
pub struct FilteredComplex {
    cells: Vec<FilteredCell>,
    max_dimension: usize,
    epsilon_max: f64,
}

impl FilteredComplex {
    /// Sorts `cells` into filtration order.
    pub fn from_cells(mut cells: Vec<FilteredCell>, max_dimension: usize, epsilon_max: f64) -> Self {
        cells.sort_by(filtration_order);
        FilteredComplex::from_ordered(cells, max_dimension, epsilon_max)
    }

    /// Keeps `cells` in the order given. Nothing is checked here; the
    /// persistence computation validates the order before reducing.
    pub fn from_ordered(cells: Vec<FilteredCell>, max_dimension: usize, epsilon_max: f64) -> Self {
        FilteredComplex {
            cells,
            max_dimension,
            epsilon_max,
        }
    }

    pub fn cells(&self) -> &[FilteredCell] {
        &self.cells
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    /// Highest simplex dimension the construction was allowed to produce.
    pub fn max_dimension(&self) -> usize {
        self.max_dimension
    }

    pub fn epsilon_max(&self) -> f64 {
        self.epsilon_max
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells.iter().filter(|c| c.dimension() == k).count()
    }

    /// The static complex of all cells with value at most `epsilon`.
    pub fn complex_at(&self, epsilon: f64) -> SimplicialComplex {
        let members: Vec<Vec<Vertex>> = self
            .cells
            .iter()
            .filter(|c| c.value <= epsilon)
            .map(|c| c.simplex.vertices().to_vec())
            .collect();
        SimplicialComplex::build(members).expect("filtered cells are valid simplices")
    }
}

struct ThresholdGraph {
    /// Neighbours with a larger index, ascending.
    upper: Vec<Vec<Vertex>>,
}

impl ThresholdGraph {
    fn new(d: &DistanceMatrix, epsilon: f64) -> Self {
        let n = d.len();
        let upper = (0..n)
            .map(|i| {
                let row = d.row(i);
                (i + 1..n).filter(|&j| row[j] <= epsilon).map(|j| j as Vertex).collect()
            })
            .collect();
        ThresholdGraph { upper }
    }
}

fn intersect_sorted(a: &[Vertex], b: &[Vertex]) -> Vec<Vertex> {
    let mut out = Vec::with_capacity(a.len().min(b.len()));
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                out.push(a[i]);
                i += 1;
                j += 1;
            }
        }
    }
    out
}

/// All cliques whose lowest vertex is `root`, grown one vertex at a time
/// from the common upper neighbours.
fn cliques_from(root: Vertex, d: &DistanceMatrix, graph: &ThresholdGraph, max_dim: usize, out: &mut Vec<FilteredCell>) {
    fn expand(
        clique: &mut Vec<Vertex>,
        value: f64,
        candidates: &[Vertex],
        d: &DistanceMatrix,
        graph: &ThresholdGraph,
        max_dim: usize,
        out: &mut Vec<FilteredCell>,
    ) {
        out.push(FilteredCell::new(Simplex::from_sorted(clique), value));
        if clique.len() > max_dim {
            return;
        }
        for (idx, &v) in candidates.iter().enumerate() {
            let row = d.row(v as usize);
            let entry = clique.iter().map(|&u| row[u as usize]).fold(value, f64::max);
            let next = intersect_sorted(&candidates[idx + 1..], &graph.upper[v as usize]);
            clique.push(v);
            expand(clique, entry, &next, d, graph, max_dim, out);
            clique.pop();
        }
    }
    let mut clique = vec![root];
    expand(&mut clique, 0.0, &graph.upper[root as usize], d, graph, max_dim, out);
}

/// Vietoris-Rips filtration truncated at `epsilon_max`, with simplices up
/// to dimension `max_dim`. A simplex enters at the largest pairwise
/// distance among its vertices; the threshold is closed.
pub fn rips_complex(d: &DistanceMatrix, epsilon_max: f64, max_dim: usize) -> FilteredComplex {
    let graph = ThresholdGraph::new(d, epsilon_max);
    let mut cells: Vec<FilteredCell> = (0..d.len() as Vertex)
        .into_par_iter()
        .map(|root| {
            let mut out = Vec::new();
            cliques_from(root, d, &graph, max_dim, &mut out);
            out
        })
        .flatten()
        .collect();
    cells.par_sort_unstable_by(filtration_order);
    FilteredComplex::from_ordered(cells, max_dim, epsilon_max)
}

//! Abstract simplices, closure-closed simplicial complexes and Z/2 boundary
//! matrices.
//!
//! A simplex is stored as its strictly increasing vertex list. Over Z/2 the
//! sorted list is a valid orientation for every simplex, so no sign
//! bookkeeping is carried anywhere in the crate.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use smallvec::SmallVec;

use crate::error::{Error, Result};

pub type Vertex = u32;

/// A simplex given by its strictly increasing vertex ids.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: SmallVec<[Vertex; 4]>,
}

impl Simplex {
    /// Builds a simplex from vertex ids in any order.
    ///
    /// Fails on an empty list or a repeated vertex.
    pub fn new(vertices: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut vs: SmallVec<[Vertex; 4]> = vertices.into_iter().collect();
        if vs.is_empty() {
            return Err(Error::InvalidSimplex {
                vertices: Vec::new(),
                reason: "a simplex needs at least one vertex".into(),
            });
        }
        vs.sort_unstable();
        if vs.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidSimplex {
                vertices: vs.to_vec(),
                reason: "repeated vertex".into(),
            });
        }
        Ok(Simplex { vertices: vs })
    }

    /// Caller guarantees `vertices` is non-empty and strictly increasing.
    pub(crate) fn from_sorted(vertices: &[Vertex]) -> Self {
        debug_assert!(!vertices.is_empty());
        debug_assert!(vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex {
            vertices: SmallVec::from_slice(vertices),
        }
    }

    pub fn vertex(v: Vertex) -> Self {
        Simplex::from_sorted(&[v])
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The codimension-one faces, in the order obtained by deleting vertex
    /// `0, 1, ..., k`. Empty for a vertex.
    pub fn facets(&self) -> impl Iterator<Item = Simplex> + '_ {
        let k = self.vertices.len();
        (0..k).filter(move |_| k > 1).map(move |skip| {
            let vs: SmallVec<[Vertex; 4]> = self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex { vertices: vs }
        })
    }

    /// Every non-empty face, including the simplex itself.
    pub fn faces(&self) -> Vec<Simplex> {
        let k = self.vertices.len();
        (1u64..(1u64 << k))
            .map(|mask| {
                let vs: SmallVec<[Vertex; 4]> = (0..k)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| self.vertices[i])
                    .collect();
                Simplex { vertices: vs }
            })
            .collect()
    }

    pub fn is_face_of(&self, other: &Simplex) -> bool {
        self.vertices.iter().all(|v| other.vertices.binary_search(v).is_ok())
    }
}

impl fmt::Debug for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.vertices.as_slice())
    }
}

impl fmt::Display for Simplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.vertices.iter().map(|v| v.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A finite abstract simplicial complex. Every face of every member is a
/// member; simplices of each dimension are kept in lexicographic order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SimplicialComplex {
    by_dim: Vec<Vec<Simplex>>,
}

impl SimplicialComplex {
    /// Closure of the given maximal simplices.
    pub fn build<I, V>(maximal: I) -> Result<Self>
    where
        I: IntoIterator<Item = V>,
        V: IntoIterator<Item = Vertex>,
    {
        let mut sets: Vec<BTreeSet<Simplex>> = Vec::new();
        for vs in maximal {
            let s = Simplex::new(vs)?;
            if s.dimension() > 20 {
                return Err(Error::InvalidSimplex {
                    vertices: s.vertices().to_vec(),
                    reason: "dimension above 20 is not supported".into(),
                });
            }
            for face in s.faces() {
                let d = face.dimension();
                if sets.len() <= d {
                    sets.resize_with(d + 1, BTreeSet::new);
                }
                sets[d].insert(face);
            }
        }
        Ok(SimplicialComplex {
            by_dim: sets.into_iter().map(|s| s.into_iter().collect()).collect(),
        })
    }

    /// Highest simplex dimension, `None` for the empty complex.
    pub fn dimension(&self) -> Option<usize> {
        self.by_dim.len().checked_sub(1)
    }

    pub fn simplices(&self, k: usize) -> &[Simplex] {
        self.by_dim.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.simplices(k).len()
    }

    pub fn len(&self) -> usize {
        self.by_dim.iter().map(Vec::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.by_dim.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Simplex> {
        self.by_dim.iter().flatten()
    }

    pub fn contains(&self, s: &Simplex) -> bool {
        self.index_of(s).is_some()
    }

    /// Position of `s` within its dimension's lexicographic list.
    pub fn index_of(&self, s: &Simplex) -> Option<usize> {
        self.by_dim.get(s.dimension())?.binary_search(s).ok()
    }

    /// Checks the closure property by enumerating every facet.
    pub fn is_closed(&self) -> bool {
        self.iter().all(|s| s.facets().all(|f| self.contains(&f)))
    }

    /// Simplices that are not a facet of any other simplex.
    pub fn maximal_simplices(&self) -> Vec<Simplex> {
        let mut has_coface: Vec<Vec<bool>> = self.by_dim.iter().map(|l| vec![false; l.len()]).collect();
        for k in 1..self.by_dim.len() {
            for s in &self.by_dim[k] {
                for f in s.facets() {
                    if let Some(i) = self.index_of(&f) {
                        has_coface[k - 1][i] = true;
                    }
                }
            }
        }
        self.by_dim
            .iter()
            .zip(&has_coface)
            .flat_map(|(l, flags)| l.iter().zip(flags).filter(|(_, &c)| !c).map(|(s, _)| s.clone()))
            .collect()
    }

    /// The boundary map from `k`-chains to `(k-1)`-chains.
    pub fn boundary_matrix(&self, k: usize) -> Result<BoundaryMatrix> {
        let max = self
            .dimension()
            .ok_or(Error::DimensionOutOfRange { requested: k, max: 0 })?;
        if k > max {
            return Err(Error::DimensionOutOfRange { requested: k, max });
        }
        let cols = self.by_dim[k].clone();
        let rows = if k == 0 { Vec::new() } else { self.by_dim[k - 1].clone() };
        let columns = cols
            .iter()
            .map(|s| {
                let mut col: Vec<usize> = s
                    .facets()
                    .map(|f| {
                        rows.binary_search(&f)
                            .expect("closure property guarantees every facet is present")
                    })
                    .collect();
                col.sort_unstable();
                col
            })
            .collect();
        Ok(BoundaryMatrix {
            k,
            nrows: rows.len(),
            rows,
            cols,
            columns,
        })
    }
}

/// Sparse Z/2 matrix of the boundary map in one dimension. Column `j` lists,
/// in increasing order, the row indices of the facets of `cols[j]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryMatrix {
    k: usize,
    nrows: usize,
    rows: Vec<Simplex>,
    cols: Vec<Simplex>,
    columns: Vec<Vec<usize>>,
}

impl BoundaryMatrix {
    /// Builds an unlabelled matrix from sparse columns; repeated entries
    /// cancel in pairs.
    pub fn from_columns(nrows: usize, columns: Vec<Vec<usize>>) -> Self {
        let columns = columns
            .into_iter()
            .map(|mut c| {
                c.sort_unstable();
                let mut out: Vec<usize> = Vec::with_capacity(c.len());
                for r in c {
                    assert!(r < nrows, "row index {r} out of range for {nrows} rows");
                    if out.last() == Some(&r) {
                        out.pop();
                    } else {
                        out.push(r);
                    }
                }
                out
            })
            .collect();
        BoundaryMatrix {
            k: 0,
            nrows,
            rows: Vec::new(),
            cols: Vec::new(),
            columns,
        }
    }

    pub fn dimension(&self) -> usize {
        self.k
    }

    pub fn nrows(&self) -> usize {
        self.nrows
    }

    pub fn ncols(&self) -> usize {
        self.columns.len()
    }

    pub fn row_simplices(&self) -> &[Simplex] {
        &self.rows
    }

    pub fn column_simplices(&self) -> &[Simplex] {
        &self.cols
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[Vec<usize>] {
        &self.columns
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(Vec::len).sum()
    }

    /// Dense 0/1 rendering, `dense[row][col]`.
    pub fn to_dense(&self) -> Vec<Vec<u8>> {
        let mut dense = vec![vec![0u8; self.ncols()]; self.nrows()];
        for (j, col) in self.columns.iter().enumerate() {
            for &i in col {
                dense[i][j] = 1;
            }
        }
        dense
    }

    /// Sparse product `self * rhs` over Z/2, returned column by column.
    pub fn compose(&self, rhs: &BoundaryMatrix) -> Result<Vec<Vec<usize>>> {
        if rhs.nrows() != self.ncols() {
            return Err(Error::DimensionMismatch {
                expected: self.ncols(),
                found: rhs.nrows(),
            });
        }
        Ok(rhs
            .columns
            .iter()
            .map(|rcol| {
                let mut acc: BTreeSet<usize> = BTreeSet::new();
                for &j in rcol {
                    for &i in &self.columns[j] {
                        if !acc.remove(&i) {
                            acc.insert(i);
                        }
                    }
                }
                acc.into_iter().collect()
            })
            .collect())
    }
}

/// Parses the maximal-simplex text format: one simplex per line as
/// whitespace-separated vertex ids. Blank lines and `#` comments are skipped.
pub fn parse_maximal_simplices(text: &str) -> Result<Vec<Vec<Vertex>>> {
    let mut out = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let vs = line
            .split_whitespace()
            .map(|tok| {
                tok.parse::<Vertex>().map_err(|e| Error::Parse {
                    row: lineno + 1,
                    message: format!("bad vertex id {tok:?}: {e}"),
                })
            })
            .collect::<Result<Vec<_>>>()?;
        out.push(vs);
    }
    Ok(out)
}

pub fn read_maximal_simplices(path: impl AsRef<Path>) -> Result<Vec<Vec<Vertex>>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_maximal_simplices(&text)
}

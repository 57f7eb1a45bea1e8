//! Persistent homology of a filtered complex by Z/2 column reduction.
//!
//! Columns are processed from the highest dimension down. Once a column of
//! dimension `d + 1` reduces to pivot `i`, the column of cell `i` is known
//! to reduce to zero and is skipped when dimension `d` is reduced
//! (clearing). Reduced columns are kept as sorted index lists together with
//! a pivot lookup table.

use std::collections::HashMap;
use std::fmt;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::rips::{rips_complex, DistanceMatrix, FilteredComplex};
use crate::simplicial::Simplex;

/// One bar `[birth, death)` of a barcode.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PersistenceFeature {
    pub dimension: usize,
    pub birth: f64,
    /// `f64::INFINITY` for a class still alive at the end of the filtration.
    pub death: f64,
}

impl PersistenceFeature {
    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }

    /// `death - birth`, infinite for essential classes.
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Lifetime with infinite deaths cut off at `cap`.
    pub fn truncated_persistence(&self, cap: f64) -> f64 {
        self.death.min(cap) - self.birth
    }

    /// Alive on the half-open interval `[birth, death)`.
    pub fn alive_at(&self, epsilon: f64) -> bool {
        self.birth <= epsilon && epsilon < self.death
    }
}

fn serialize_value<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_infinite() {
        s.serialize_str("inf")
    } else {
        s.serialize_f64(*v)
    }
}

impl Serialize for PersistenceFeature {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        use serde::ser::SerializeStruct;
        struct Value(f64);
        impl Serialize for Value {
            fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
                serialize_value(&self.0, s)
            }
        }
        let mut st = s.serialize_struct("PersistenceFeature", 3)?;
        st.serialize_field("dim", &self.dimension)?;
        st.serialize_field("birth", &Value(self.birth))?;
        st.serialize_field("death", &Value(self.death))?;
        st.end()
    }
}

/// Formats a scale value; infinity is written as `inf`.
pub fn format_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        v.to_string()
    }
}

/// Parses a scale value written by [`format_value`].
pub fn parse_value(s: &str) -> Option<f64> {
    match s.trim() {
        "inf" | "Inf" | "+inf" | "infinity" | "Infinity" => Some(f64::INFINITY),
        t => t.parse().ok().filter(|v: &f64| !v.is_nan()),
    }
}

/// Multiset of persistence features, sorted by `(dimension, birth, death)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Barcode {
    features: Vec<PersistenceFeature>,
    epsilon_max: f64,
    max_dimension: usize,
}

impl Barcode {
    pub fn new(mut features: Vec<PersistenceFeature>, epsilon_max: f64, max_dimension: usize) -> Self {
        features.sort_by(|a, b| {
            a.dimension
                .cmp(&b.dimension)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Barcode {
            features,
            epsilon_max,
            max_dimension,
        }
    }

    pub fn features(&self) -> &[PersistenceFeature] {
        &self.features
    }

    pub fn in_dimension(&self, k: usize) -> impl Iterator<Item = &PersistenceFeature> {
        self.features.iter().filter(move |f| f.dimension == k)
    }

    pub fn epsilon_max(&self) -> f64 {
        self.epsilon_max
    }

    /// Highest homology dimension that was computed.
    pub fn max_dimension(&self) -> usize {
        self.max_dimension
    }

    pub fn len(&self) -> usize {
        self.features.len()
    }

    pub fn is_empty(&self) -> bool {
        self.features.is_empty()
    }

    /// Lifetimes in dimension `k`, longest first, with infinite deaths cut
    /// off at `epsilon_max`.
    pub fn lifetimes(&self, k: usize) -> Vec<f64> {
        let mut l: Vec<f64> = self
            .in_dimension(k)
            .map(|f| f.truncated_persistence(self.epsilon_max))
            .collect();
        l.sort_by(|a, b| b.total_cmp(a));
        l
    }

    /// CSV with header `dimension,birth,death`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("dimension,birth,death\n");
        for f in &self.features {
            out.push_str(&format!(
                "{},{},{}\n",
                f.dimension,
                format_value(f.birth),
                format_value(f.death)
            ));
        }
        out
    }

    /// Reads the CSV written by [`Barcode::to_csv`]. The header is optional.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut features = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("dim")) {
                continue;
            }
            let parse_err = |message: String| Error::Parse { row: i + 1, message };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 3 {
                return Err(parse_err(format!("expected 3 fields, found {}", fields.len())));
            }
            let dimension = fields[0]
                .parse()
                .map_err(|_| parse_err(format!("bad dimension {:?}", fields[0])))?;
            let birth = parse_value(fields[1])
                .filter(|b| b.is_finite())
                .ok_or_else(|| parse_err(format!("bad birth {:?}", fields[1])))?;
            let death = parse_value(fields[2]).ok_or_else(|| parse_err(format!("bad death {:?}", fields[2])))?;
            if death < birth {
                return Err(parse_err(format!("death {death} before birth {birth}")));
            }
            features.push(PersistenceFeature {
                dimension,
                birth,
                death,
            });
        }
        let max_dimension = features.iter().map(|f| f.dimension).max().unwrap_or(0);
        let epsilon_max = features
            .iter()
            .flat_map(|f| [f.birth, f.death])
            .filter(|v| v.is_finite())
            .fold(0.0, f64::max);
        Ok(Barcode::new(features, epsilon_max, max_dimension))
    }
}

impl Serialize for Barcode {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.features.serialize(s)
    }
}

impl fmt::Display for Barcode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

/// `beta_k(epsilon)`: bars of dimension `k` with `birth <= epsilon < death`.
pub fn betti_curve(bc: &Barcode, k: usize, epsilon: f64) -> usize {
    bc.in_dimension(k).filter(|f| f.alive_at(epsilon)).count()
}

/// Raw output of the reduction, indices into the filtration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Pairing {
    /// `(creator, destroyer)` cell indices, zero-length pairs included.
    pub pairs: Vec<(usize, usize)>,
    /// Creators that are never destroyed.
    pub essential: Vec<usize>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct PersistenceOptions {
    /// Keep bars whose birth equals their death.
    pub keep_zero_length: bool,
}

/// Facet indices of every cell, stored flat.
struct BoundaryTable {
    offsets: Vec<usize>,
    entries: Vec<u32>,
}

impl BoundaryTable {
    fn column(&self, j: usize) -> &[u32] {
        &self.entries[self.offsets[j]..self.offsets[j + 1]]
    }
}

/// Checks face monotonicity and builds the filtered boundary matrix.
fn boundary_table(fc: &FilteredComplex) -> Result<BoundaryTable> {
    let cells = fc.cells();
    if cells.len() >= u32::MAX as usize {
        return Err(Error::InvalidFiltration("too many cells".into()));
    }
    let top = cells.iter().map(|c| c.dimension()).max().unwrap_or(0);
    let mut index: HashMap<&Simplex, u32> = HashMap::new();
    let mut offsets = Vec::with_capacity(cells.len() + 1);
    let mut entries = Vec::new();
    offsets.push(0);
    let mut prev_value = f64::NEG_INFINITY;
    for (j, cell) in cells.iter().enumerate() {
        if !cell.value.is_finite() {
            return Err(Error::InvalidFiltration(format!(
                "cell {} has value {}",
                cell.simplex, cell.value
            )));
        }
        if cell.value < prev_value {
            return Err(Error::InvalidFiltration(format!(
                "values decrease at cell {} ({} after {prev_value})",
                cell.simplex, cell.value
            )));
        }
        prev_value = cell.value;
        let start = entries.len();
        for facet in cell.simplex.facets() {
            let Some(&i) = index.get(&facet) else {
                return Err(Error::InvalidFiltration(format!(
                    "face {facet} of {} is missing or enters later",
                    cell.simplex
                )));
            };
            if cells[i as usize].value > cell.value {
                return Err(Error::InvalidFiltration(format!(
                    "face {facet} enters after {}",
                    cell.simplex
                )));
            }
            entries.push(i);
        }
        entries[start..].sort_unstable();
        offsets.push(entries.len());
        if cell.dimension() < top && index.insert(&cell.simplex, j as u32).is_some() {
            return Err(Error::InvalidFiltration(format!("cell {} appears twice", cell.simplex)));
        }
    }
    Ok(BoundaryTable { offsets, entries })
}

/// Symmetric difference of two ascending lists, written to `out`.
fn add_columns(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

const NONE: u32 = u32::MAX;

/// Reduces the filtered boundary matrix and returns the persistence pairs.
pub fn persistence_pairs(fc: &FilteredComplex) -> Result<Pairing> {
    let table = boundary_table(fc)?;
    let cells = fc.cells();
    let n = cells.len();
    let top = cells.iter().map(|c| c.dimension()).max().unwrap_or(0);

    let mut by_dim: Vec<Vec<u32>> = vec![Vec::new(); top + 1];
    for (j, c) in cells.iter().enumerate() {
        by_dim[c.dimension()].push(j as u32);
    }

    // pivot_owner[i] = slot in `reduced` of the column whose lowest entry is i
    let mut pivot_owner = vec![NONE; n];
    let mut reduced: Vec<Vec<u32>> = Vec::new();
    let mut cleared = vec![false; n];
    let mut destroyer_of = vec![NONE; n];
    let mut work: Vec<u32> = Vec::new();
    let mut scratch: Vec<u32> = Vec::new();

    for d in (1..=top).rev() {
        for &j in &by_dim[d] {
            let j = j as usize;
            if cleared[j] {
                continue;
            }
            work.clear();
            work.extend_from_slice(table.column(j));
            while let Some(&low) = work.last() {
                let owner = pivot_owner[low as usize];
                if owner == NONE {
                    break;
                }
                add_columns(&work, &reduced[owner as usize], &mut scratch);
                std::mem::swap(&mut work, &mut scratch);
            }
            if let Some(&low) = work.last() {
                pivot_owner[low as usize] = reduced.len() as u32;
                reduced.push(work.clone());
                destroyer_of[low as usize] = j as u32;
                cleared[low as usize] = true;
            }
        }
    }

    let mut pairing = Pairing::default();
    let mut negative = vec![false; n];
    for (i, &j) in destroyer_of.iter().enumerate() {
        if j != NONE {
            pairing.pairs.push((i, j as usize));
            negative[j as usize] = true;
        }
    }
    // a cell is a creator iff its reduced column is zero
    pairing.essential = (0..n).filter(|&i| !negative[i] && destroyer_of[i] == NONE).collect();
    pairing.pairs.sort_unstable();
    Ok(pairing)
}

/// Barcode of a filtered complex, zero-length bars dropped.
pub fn persistent_homology(fc: &FilteredComplex) -> Result<Barcode> {
    persistent_homology_with(fc, PersistenceOptions::default())
}

/// Barcode of a filtered complex. Classes of the top simplex dimension are
/// not reported since nothing above them can kill them; the barcode covers
/// homology dimensions `0..max_dimension`.
pub fn persistent_homology_with(fc: &FilteredComplex, opts: PersistenceOptions) -> Result<Barcode> {
    let pairing = persistence_pairs(fc)?;
    let cells = fc.cells();
    let max_hom = fc.max_dimension().saturating_sub(1);
    let mut features = Vec::new();
    for &(i, j) in &pairing.pairs {
        let dim = cells[i].dimension();
        let (birth, death) = (cells[i].value, cells[j].value);
        if dim <= max_hom && (birth < death || opts.keep_zero_length) {
            features.push(PersistenceFeature {
                dimension: dim,
                birth,
                death,
            });
        }
    }
    for &i in &pairing.essential {
        let dim = cells[i].dimension();
        if dim <= max_hom {
            features.push(PersistenceFeature {
                dimension: dim,
                birth: cells[i].value,
                death: f64::INFINITY,
            });
        }
    }
    Ok(Barcode::new(features, fc.epsilon_max(), max_hom))
}

/// Rips persistence in homology dimensions `0..=max_hom_dim`; builds
/// simplices up to dimension `max_hom_dim + 1`.
pub fn rips_persistence(d: &DistanceMatrix, epsilon_max: f64, max_hom_dim: usize) -> Result<Barcode> {
    if epsilon_max.is_nan() || epsilon_max < 0.0 {
        return Err(Error::InvalidParameter(format!(
            "epsilon_max must be non-negative, got {epsilon_max}"
        )));
    }
    let fc = rips_complex(d, epsilon_max, max_hom_dim + 1);
    let mut bc = persistent_homology(&fc)?;
    bc.max_dimension = max_hom_dim;
    Ok(bc)
}

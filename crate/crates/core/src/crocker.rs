//! CROCKER matrices: Betti numbers over a time index and a scale grid.

use std::cmp::Ordering;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::persistence::{betti_curve, rips_persistence};
use crate::rips::DistanceMatrix;

/// `values[t][e] = beta_k(t, epsilon_grid[e])`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrockerMatrix {
    pub k: usize,
    pub t_labels: Vec<String>,
    pub epsilon_grid: Vec<f64>,
    pub values: Vec<Vec<usize>>,
}

impl CrockerMatrix {
    /// First row is `t\epsilon` followed by the grid, then one row per time
    /// step: label then Betti numbers.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t\\epsilon");
        for e in &self.epsilon_grid {
            out.push(',');
            out.push_str(&e.to_string());
        }
        out.push('\n');
        for (label, row) in self.t_labels.iter().zip(&self.values) {
            out.push_str(label);
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// `count` evenly spaced scales from `min` to `max` inclusive.
pub fn linear_grid(count: usize, min: f64, max: f64) -> Result<Vec<f64>> {
    if count == 0 || !(min.is_finite() && max.is_finite()) {
        return Err(Error::InvalidParameter(
            "grid needs a positive count and finite bounds".into(),
        ));
    }
    if count == 1 {
        return Ok(vec![min]);
    }
    if max <= min {
        return Err(Error::InvalidParameter(format!(
            "grid maximum {max} must exceed minimum {min}"
        )));
    }
    let step = (max - min) / (count - 1) as f64;
    let mut grid: Vec<f64> = (0..count).map(|i| min + step * i as f64).collect();
    grid[count - 1] = max;
    Ok(grid)
}

/// `count` scales from 0 to the largest distance over all time steps.
pub fn default_grid(inputs: &[DistanceMatrix], count: usize) -> Result<Vec<f64>> {
    let max = inputs.iter().map(DistanceMatrix::max_distance).fold(0.0, f64::max);
    if max == 0.0 {
        return Ok(vec![0.0]);
    }
    linear_grid(count, 0.0, max)
}

/// One persistence computation per time step, truncated at the largest grid
/// scale and sampled along the grid. `max_dim` is the highest homology
/// dimension computed and must be at least `k`.
pub fn crocker(
    inputs: &[DistanceMatrix],
    labels: Option<Vec<String>>,
    k: usize,
    epsilon_grid: &[f64],
    max_dim: usize,
) -> Result<CrockerMatrix> {
    if inputs.is_empty() {
        return Err(Error::InvalidParameter("empty time series".into()));
    }
    if epsilon_grid.is_empty() {
        return Err(Error::InvalidParameter("empty scale grid".into()));
    }
    if epsilon_grid
        .windows(2)
        .any(|w| w[0].partial_cmp(&w[1]) != Some(Ordering::Less))
        || epsilon_grid.iter().any(|e| e.is_nan() || *e < 0.0)
    {
        return Err(Error::InvalidParameter(
            "scale grid must be non-negative and strictly increasing".into(),
        ));
    }
    if max_dim < k {
        return Err(Error::InvalidParameter(format!(
            "max dimension {max_dim} is below the requested Betti dimension {k}"
        )));
    }
    let t_labels = match labels {
        Some(l) if l.len() == inputs.len() => l,
        Some(l) => {
            return Err(Error::InvalidParameter(format!(
                "{} labels for {} time steps",
                l.len(),
                inputs.len()
            )))
        }
        None => (0..inputs.len()).map(|t| t.to_string()).collect(),
    };
    let eps_max = *epsilon_grid.last().expect("grid is non-empty");
    let values = inputs
        .par_iter()
        .map(|d| {
            let bc = rips_persistence(d, eps_max, max_dim)?;
            Ok(epsilon_grid.iter().map(|&e| betti_curve(&bc, k, e)).collect())
        })
        .collect::<Result<Vec<Vec<usize>>>>()?;
    Ok(CrockerMatrix {
        k,
        t_labels,
        epsilon_grid: epsilon_grid.to_vec(),
        values,
    })
}

/// Entries above `cap` become `cap + 1`, a single "noise" bucket.
pub fn crocker_noise_floor(m: &CrockerMatrix, cap: usize) -> Result<CrockerMatrix> {
    if cap == 0 {
        return Err(Error::InvalidParameter("noise cap must be at least 1".into()));
    }
    Ok(CrockerMatrix {
        values: m
            .values
            .iter()
            .map(|row| row.iter().map(|&v| if v > cap { cap + 1 } else { v }).collect())
            .collect(),
        ..m.clone()
    })
}

/// Paths listed one per line; relative paths resolve against the manifest's
/// directory. Blank lines and `#` comments are skipped.
pub fn read_manifest(path: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let base = path.parent().unwrap_or(Path::new("."));
    let entries: Vec<PathBuf> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let p = PathBuf::from(l);
            if p.is_absolute() {
                p
            } else {
                base.join(p)
            }
        })
        .collect();
    if entries.is_empty() {
        return Err(Error::Parse {
            row: 1,
            message: format!("{}: manifest lists no inputs", path.display()),
        });
    }
    Ok(entries)
}

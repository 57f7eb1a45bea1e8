//! Point clouds: synthetic shape generators and CSV input/output.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Points of a common ambient dimension, stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let dim = rows.first().map_or(0, Vec::len);
        let mut coords = Vec::with_capacity(rows.len() * dim);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != dim {
                return Err(Error::Parse {
                    row: i + 1,
                    message: format!("expected {dim} coordinates, found {}", row.len()),
                });
            }
            if let Some(bad) = row.iter().find(|x| !x.is_finite()) {
                return Err(Error::Parse {
                    row: i + 1,
                    message: format!("non-finite coordinate {bad}"),
                });
            }
            coords.extend(row);
        }
        Ok(PointCloud { dim, coords })
    }

    /// Points on a line.
    pub fn from_scalars(values: &[f64]) -> Result<Self> {
        PointCloud::from_rows(values.iter().map(|&x| vec![x]).collect())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len().checked_div(self.dim).unwrap_or(0)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> {
        self.coords.chunks_exact(self.dim.max(1))
    }

    /// Reorders points so that new point `i` is old point `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(self.coords.len());
        for &p in perm {
            coords.extend_from_slice(self.point(p));
        }
        PointCloud { dim: self.dim, coords }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Shape {
    /// Unit circle in the plane.
    Circle,
    /// Uniform in the ring between radii 1 and 2.
    Annulus,
    /// Unit circles in 3-space sharing one common point.
    Bouquet { loops: usize },
    /// Unit sphere of the given intrinsic dimension.
    Sphere { intrinsic_dim: usize },
    /// Standard torus in 3-space, major radius 2, minor radius 1.
    Torus,
    /// One circle of radius 3 with four unit circles attached to it.
    Composite,
}

impl Shape {
    pub fn natural_dim(&self) -> usize {
        match *self {
            Shape::Circle | Shape::Annulus | Shape::Composite => 2,
            Shape::Bouquet { .. } | Shape::Torus => 3,
            Shape::Sphere { intrinsic_dim } => intrinsic_dim + 1,
        }
    }

    /// Length scale used for the default noise level.
    pub fn scale(&self) -> f64 {
        1.0
    }

    pub fn default_noise(&self) -> f64 {
        0.05 * self.scale()
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape::Circle => f.write_str("circle"),
            Shape::Annulus => f.write_str("annulus"),
            Shape::Bouquet { loops } => write!(f, "bouquet:{loops}"),
            Shape::Sphere { intrinsic_dim } => write!(f, "sphere:{intrinsic_dim}"),
            Shape::Torus => f.write_str("torus"),
            Shape::Composite => f.write_str("composite"),
        }
    }
}

/// Parses `circle`, `annulus`, `bouquet[:k]`, `sphere[:s]`, `torus`,
/// `composite`.
impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (name, arg) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let parse_arg = |default: usize| -> Result<usize> {
            match arg {
                None => Ok(default),
                Some(a) => a
                    .parse()
                    .map_err(|_| Error::InvalidParameter(format!("bad shape argument {a:?}"))),
            }
        };
        let shape = match name.to_ascii_lowercase().as_str() {
            "circle" => Shape::Circle,
            "annulus" => Shape::Annulus,
            "bouquet" => Shape::Bouquet { loops: parse_arg(3)? },
            "sphere" => Shape::Sphere {
                intrinsic_dim: parse_arg(2)?,
            },
            "torus" => Shape::Torus,
            "composite" => Shape::Composite,
            other => return Err(Error::InvalidParameter(format!("unknown shape {other:?}"))),
        };
        if arg.is_some() && !matches!(shape, Shape::Bouquet { .. } | Shape::Sphere { .. }) {
            return Err(Error::InvalidParameter(format!("shape {name} takes no argument")));
        }
        Ok(shape)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GeneratorSpec {
    pub shape: Shape,
    pub n: usize,
    pub ambient_dim: usize,
    pub noise_sigma: f64,
    pub seed: u64,
}

impl GeneratorSpec {
    /// Shape in its natural dimension with the default noise level.
    pub fn new(shape: Shape, n: usize, seed: u64) -> Self {
        GeneratorSpec {
            shape,
            n,
            ambient_dim: shape.natural_dim(),
            noise_sigma: shape.default_noise(),
            seed,
        }
    }

    pub fn ambient_dim(mut self, dim: usize) -> Self {
        self.ambient_dim = dim;
        self
    }

    pub fn noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = sigma;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidParameter("point count must be at least 1".into()));
        }
        if !(self.noise_sigma >= 0.0 && self.noise_sigma.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be finite and non-negative, got {}",
                self.noise_sigma
            )));
        }
        match self.shape {
            Shape::Bouquet { loops: 0 } => {
                return Err(Error::InvalidParameter("bouquet needs at least one loop".into()))
            }
            Shape::Sphere { intrinsic_dim: 0 } => {
                return Err(Error::InvalidParameter("sphere dimension must be at least 1".into()))
            }
            _ => {}
        }
        let natural = self.shape.natural_dim();
        if self.ambient_dim < natural {
            return Err(Error::InvalidParameter(format!(
                "{} needs ambient dimension at least {natural}, got {}",
                self.shape, self.ambient_dim
            )));
        }
        Ok(())
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    StandardNormal.sample(rng)
}

fn uniform_angle(rng: &mut ChaCha8Rng) -> f64 {
    rng.random_range(0.0..std::f64::consts::TAU)
}

fn normalize(v: &mut [f64]) {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
}

fn random_unit(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let mut v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
        if v.iter().map(|x| x * x).sum::<f64>() > 1e-12 {
            normalize(&mut v);
            return v;
        }
    }
}

/// Orthonormal frame `(u, w)` for each loop of a bouquet; the loop is
/// `u + w sin t - u cos t`, which passes through the origin at `t = 0`.
fn bouquet_frames(rng: &mut ChaCha8Rng, loops: usize) -> Vec<([f64; 3], [f64; 3])> {
    (0..loops)
        .map(|_| {
            let u = random_unit(rng, 3);
            let w = loop {
                let mut w = random_unit(rng, 3);
                let dot: f64 = w.iter().zip(&u).map(|(a, b)| a * b).sum();
                w.iter_mut().zip(&u).for_each(|(a, b)| *a -= dot * b);
                if w.iter().map(|x| x * x).sum::<f64>() > 1e-6 {
                    normalize(&mut w);
                    break w;
                }
            };
            ([u[0], u[1], u[2]], [w[0], w[1], w[2]])
        })
        .collect()
}

fn split_counts(n: usize, weights: &[f64]) -> Vec<usize> {
    let total: f64 = weights.iter().sum();
    let mut counts: Vec<usize> = weights
        .iter()
        .map(|w| (n as f64 * w / total).floor() as usize)
        .collect();
    let mut rest = n - counts.iter().sum::<usize>();
    let (mut i, len) = (0, counts.len());
    while rest > 0 {
        counts[i % len] += 1;
        rest -= 1;
        i += 1;
    }
    counts
}

fn sample_shape(spec: &GeneratorSpec, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = spec.n;
    match spec.shape {
        Shape::Circle => (0..n)
            .map(|i| {
                let t = if spec.noise_sigma == 0.0 {
                    i as f64 * std::f64::consts::TAU / n as f64
                } else {
                    uniform_angle(rng)
                };
                vec![t.cos(), t.sin()]
            })
            .collect(),
        Shape::Annulus => (0..n)
            .map(|_| {
                // area-uniform radius on [1, 2]
                let r = (1.0 + 3.0 * rng.random::<f64>()).sqrt();
                let t = uniform_angle(rng);
                vec![r * t.cos(), r * t.sin()]
            })
            .collect(),
        Shape::Bouquet { loops } => {
            let frames = bouquet_frames(rng, loops);
            let counts = split_counts(n, &vec![1.0; loops]);
            let mut pts = Vec::with_capacity(n);
            for ((u, w), count) in frames.iter().zip(counts) {
                for _ in 0..count {
                    let t = uniform_angle(rng);
                    let (s, c) = t.sin_cos();
                    pts.push((0..3).map(|j| u[j] + w[j] * s - u[j] * c).collect());
                }
            }
            pts
        }
        Shape::Sphere { intrinsic_dim } => (0..n).map(|_| random_unit(rng, intrinsic_dim + 1)).collect(),
        Shape::Torus => (0..n)
            .map(|_| {
                // area-uniform: accept theta with density proportional to the ring radius
                let (major, minor) = (2.0, 1.0);
                let theta = loop {
                    let t = uniform_angle(rng);
                    if rng.random::<f64>() * (major + minor) <= major + minor * t.cos() {
                        break t;
                    }
                };
                let phi = uniform_angle(rng);
                let ring = major + minor * theta.cos();
                vec![ring * phi.cos(), ring * phi.sin(), minor * theta.sin()]
            })
            .collect(),
        Shape::Composite => {
            // big circle radius 3 at the origin, unit circles centred at
            // distance 4 touching it from outside; counts follow arc length
            let mut circles = vec![(0.0, 0.0, 3.0)];
            for j in 0..4 {
                let a = j as f64 * std::f64::consts::FRAC_PI_2;
                circles.push((4.0 * a.cos(), 4.0 * a.sin(), 1.0));
            }
            let weights: Vec<f64> = circles.iter().map(|c| c.2).collect();
            let counts = split_counts(n, &weights);
            let mut pts = Vec::with_capacity(n);
            for (&(cx, cy, r), count) in circles.iter().zip(counts) {
                for _ in 0..count {
                    let t = uniform_angle(rng);
                    pts.push(vec![cx + r * t.cos(), cy + r * t.sin()]);
                }
            }
            pts
        }
    }
}

/// Random `ambient x natural` matrix with orthonormal columns.
fn random_embedding(rng: &mut ChaCha8Rng, ambient: usize, natural: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(ambient, natural, |_, _| gaussian(rng));
    g.qr().q()
}

/// Samples a point cloud. Output is a pure function of `spec`.
pub fn generate(spec: &GeneratorSpec) -> Result<PointCloud> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut pts = sample_shape(spec, &mut rng);
    let natural = spec.shape.natural_dim();
    if spec.ambient_dim > natural {
        let q = random_embedding(&mut rng, spec.ambient_dim, natural);
        pts = pts
            .into_iter()
            .map(|p| {
                (0..spec.ambient_dim)
                    .map(|r| (0..natural).map(|c| q[(r, c)] * p[c]).sum())
                    .collect()
            })
            .collect();
    }
    if spec.noise_sigma > 0.0 {
        for p in &mut pts {
            for x in p.iter_mut() {
                *x += spec.noise_sigma * gaussian(&mut rng);
            }
        }
    }
    PointCloud::from_rows(pts)
}

fn parse_record(record: &csv::StringRecord, row: usize) -> Result<Vec<f64>> {
    record
        .iter()
        .map(|field| {
            field.trim().parse::<f64>().map_err(|_| Error::Parse {
                row,
                message: format!("non-numeric field {field:?}"),
            })
        })
        .collect()
}

/// Reads a numeric CSV table. `has_header = None` skips the first row only
/// when it is not numeric.
pub fn read_table<R: Read>(reader: R, has_header: Option<bool>) -> Result<Vec<Vec<f64>>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut width = None;
    for (i, record) in rdr.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::Parse {
            row,
            message: e.to_string(),
        })?;
        if record.iter().all(|f| f.is_empty()) {
            continue;
        }
        if i == 0 {
            let skip = match has_header {
                Some(h) => h,
                None => parse_record(&record, row).is_err(),
            };
            if skip {
                continue;
            }
        }
        let values = parse_record(&record, row)?;
        match width {
            None => width = Some(values.len()),
            Some(w) if w != values.len() => {
                return Err(Error::Parse {
                    row,
                    message: format!("expected {w} fields, found {}", values.len()),
                })
            }
            _ => {}
        }
        rows.push(values);
    }
    Ok(rows)
}

pub fn parse_cloud<R: Read>(reader: R, has_header: Option<bool>) -> Result<PointCloud> {
    let rows = read_table(reader, has_header)?;
    if let Some((i, _)) = rows.iter().enumerate().find(|(_, r)| r.iter().any(|x| !x.is_finite())) {
        return Err(Error::Parse {
            row: i + 1,
            message: "non-finite coordinate".into(),
        });
    }
    PointCloud::from_rows(rows)
}

pub fn read_cloud(path: impl AsRef<Path>, has_header: Option<bool>) -> Result<PointCloud> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    parse_cloud(std::io::BufReader::new(file), has_header)
}

/// Writes one point per line; floats use the shortest round-trip form.
pub fn write_cloud_to<W: Write>(cloud: &PointCloud, mut out: W) -> std::io::Result<()> {
    for p in cloud.points() {
        let line: Vec<String> = p.iter().map(|x| x.to_string()).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    Ok(())
}

pub fn write_cloud(cloud: &PointCloud, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    write_cloud_to(cloud, &mut w)
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    #[test]
    fn noiseless_circle_of_four() {
        let c = generate(&GeneratorSpec::new(Shape::Circle, 4, 1).noise(0.0)).unwrap();
        let mut d: Vec<f64> = Vec::new();
        for i in 0..4 {
            for j in i + 1..4 {
                d.push(dist(c.point(i), c.point(j)));
            }
        }
        d.sort_by(f64::total_cmp);
        let s2 = 2f64.sqrt();
        for (got, want) in d.iter().zip([s2, s2, s2, s2, 2.0, 2.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
    }

    #[test]
    fn sphere_points_are_unit() {
        let c = generate(&GeneratorSpec::new(Shape::Sphere { intrinsic_dim: 2 }, 50, 3).noise(0.0)).unwrap();
        assert_eq!(c.dim(), 3);
        for p in c.points() {
            assert!((dist(p, &[0.0; 3]) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn annulus_radii() {
        let c = generate(&GeneratorSpec::new(Shape::Annulus, 200, 5).noise(0.0)).unwrap();
        for p in c.points() {
            let r = dist(p, &[0.0, 0.0]);
            assert!((1.0..=2.0).contains(&r));
        }
    }

    #[test]
    fn bouquet_loops_pass_through_the_wedge_point() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for (u, w) in bouquet_frames(&mut rng, 5) {
            let dot: f64 = (0..3).map(|j| u[j] * w[j]).sum();
            assert!(dot.abs() < 1e-12);
        }
        // noiseless samples sit on unit circles whose centre is at distance 1 from the origin
        let spec = GeneratorSpec::new(Shape::Bouquet { loops: 3 }, 90, 11).noise(0.0);
        let c = generate(&spec).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let frames = bouquet_frames(&mut rng, 3);
        for (i, p) in c.points().enumerate() {
            let (u, _) = frames[i / 30];
            assert!((dist(p, &u) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn ambient_below_natural_is_rejected() {
        let spec = GeneratorSpec::new(Shape::Torus, 10, 0).ambient_dim(2);
        assert!(matches!(generate(&spec), Err(Error::InvalidParameter(_))));
        let spec = GeneratorSpec::new(Shape::Circle, 0, 0);
        assert!(generate(&spec).is_err());
    }

    #[test]
    fn embedding_is_an_isometry() {
        let flat = generate(&GeneratorSpec::new(Shape::Torus, 40, 9).noise(0.0)).unwrap();
        let high = generate(&GeneratorSpec::new(Shape::Torus, 40, 9).noise(0.0).ambient_dim(50)).unwrap();
        assert_eq!(high.dim(), 50);
        for i in 0..40 {
            for j in 0..40 {
                let (a, b) = (dist(flat.point(i), flat.point(j)), dist(high.point(i), high.point(j)));
                assert!((a - b).abs() <= 1e-9 * a.max(1.0));
            }
        }
    }

    #[test]
    fn embedded_torus_has_rank_three() {
        let c = generate(&GeneratorSpec::new(Shape::Torus, 60, 7).noise(0.0).ambient_dim(400)).unwrap();
        let n = c.len();
        let mean: Vec<f64> = (0..400)
            .map(|j| c.points().map(|p| p[j]).sum::<f64>() / n as f64)
            .collect();
        let m = DMatrix::from_fn(n, 400, |i, j| c.point(i)[j] - mean[j]);
        let sv = m.singular_values();
        let big = sv.iter().filter(|&&s| s > 1e-9 * sv.max()).count();
        assert!(big <= 3, "centred rank {big}");
    }

    #[test]
    fn composite_counts() {
        let c = generate(&GeneratorSpec::new(Shape::Composite, 400, 2)).unwrap();
        assert_eq!(c.len(), 400);
        assert_eq!(c.dim(), 2);
    }

    #[test]
    fn shape_names() {
        assert_eq!("bouquet:4".parse::<Shape>().unwrap(), Shape::Bouquet { loops: 4 });
        assert_eq!("sphere".parse::<Shape>().unwrap(), Shape::Sphere { intrinsic_dim: 2 });
        assert!("torus:3".parse::<Shape>().is_err());
        assert!("klein".parse::<Shape>().is_err());
    }

    #[test]
    fn csv_parsing() {
        let c = parse_cloud("0,0\n3,4\n".as_bytes(), None).unwrap();
        assert_eq!((c.len(), c.dim()), (2, 2));
        assert_eq!(c.point(1), &[3.0, 4.0]);

        let c = parse_cloud("x,y\n1,2\n".as_bytes(), None).unwrap();
        assert_eq!(c.len(), 1);

        let err = parse_cloud("1,2,3\n4,5\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");

        let err = parse_cloud("1,2\n4,abc\n".as_bytes(), None).unwrap_err();
        assert!(matches!(err, Error::Parse { row: 2, .. }), "{err}");
    }

    #[test]
    fn same_seed_same_bytes() {
        let spec = GeneratorSpec::new(Shape::Bouquet { loops: 3 }, 100, 42);
        let mut a = Vec::new();
        let mut b = Vec::new();
        write_cloud_to(&generate(&spec).unwrap(), &mut a).unwrap();
        write_cloud_to(&generate(&spec).unwrap(), &mut b).unwrap();
        assert_eq!(a, b);
        let mut c = Vec::new();
        write_cloud_to(&generate(&GeneratorSpec { seed: 43, ..spec }).unwrap(), &mut c).unwrap();
        assert_ne!(a, c);
    }
}

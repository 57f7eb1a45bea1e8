//! `topohunt` command-line front end.

mod svg;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand, ValueEnum};

use topohunt::cloud::{read_cloud, write_cloud_to, GeneratorSpec, PointCloud, Shape};
use topohunt::crocker::{crocker, crocker_noise_floor, default_grid, linear_grid, read_manifest};
use topohunt::diagram::{bottleneck_distance, diagram_from_barcode};
use topohunt::homology::betti_numbers;
use topohunt::mapper::{filter_values, mapper_graph, uniform_cover, Clustering, FilterKind};
use topohunt::persistence::{betti_curve, persistent_homology_with, Barcode, PersistenceOptions};
use topohunt::rips::{euclidean_distances, read_distance_matrix, rips_complex, DistanceMatrix, MatrixLayout};
use topohunt::simplicial::{read_maximal_simplices, SimplicialComplex};

#[derive(Parser, Debug)]
#[command(
    name = "topohunt",
    version,
    about = "Persistent homology, mapper and friends for point clouds"
)]
struct Cli {
    /// Worker threads for parallel stages (output does not depend on it).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sample a synthetic point cloud.
    Generate(GenerateArgs),
    /// Betti numbers of a complex given by its maximal simplices.
    Homology(HomologyArgs),
    /// Vietoris-Rips persistent homology of a cloud or distance matrix.
    RipsPh(RipsArgs),
    /// Betti numbers read off a barcode along a scale grid.
    BettiCurve(BettiCurveArgs),
    /// Bottleneck distance between two barcodes in one dimension.
    Bottleneck(BottleneckArgs),
    /// Mapper graph of a point cloud.
    Mapper(MapperArgs),
    /// CROCKER matrix of a time series of clouds.
    Crocker(CrockerArgs),
}

#[derive(Args, Debug)]
struct GenerateArgs {
    /// circle, annulus, bouquet[:k], sphere[:s], torus, composite
    #[arg(long)]
    shape: String,
    #[arg(long)]
    n: usize,
    /// Ambient dimension; defaults to the shape's natural dimension.
    #[arg(long)]
    dim: Option<usize>,
    /// Gaussian noise sigma; defaults to 0.05 times the shape scale.
    #[arg(long)]
    noise: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output CSV; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct HomologyArgs {
    /// One maximal simplex per line, whitespace-separated vertex ids.
    input: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum InputKind {
    /// Point coordinates, one point per row.
    Cloud,
    /// Square distance matrix.
    Square,
    /// Lower-triangular distance matrix.
    Lower,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// How to read the input CSV.
    #[arg(long, value_enum, default_value_t = InputKind::Cloud)]
    input_kind: InputKind,
    /// First row of a cloud CSV is a header (auto-detected otherwise).
    #[arg(long)]
    header: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum BarcodeFormat {
    Csv,
    Json,
}

#[derive(Args, Debug)]
struct RipsArgs {
    input: PathBuf,
    #[command(flatten)]
    input_args: InputArgs,
    /// Highest homology dimension computed.
    #[arg(long, default_value_t = 2)]
    max_dim: usize,
    /// Truncation scale; the largest pairwise distance when absent.
    #[arg(long)]
    eps_max: Option<f64>,
    #[arg(long, value_enum, default_value_t = BarcodeFormat::Csv)]
    format: BarcodeFormat,
    /// Barcode output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    svg_barcode: Option<PathBuf>,
    #[arg(long)]
    svg_diagram: Option<PathBuf>,
    /// Keep bars of zero length.
    #[arg(long)]
    keep_zero: bool,
    /// Print bars ranked by persistence on stderr.
    #[arg(long)]
    summary: bool,
}

#[derive(Args, Debug)]
struct GridArgs {
    /// Explicit comma-separated scales.
    #[arg(long, value_delimiter = ',')]
    eps: Option<Vec<f64>>,
    #[arg(long, default_value_t = 100)]
    grid_count: usize,
    #[arg(long)]
    grid_min: Option<f64>,
    #[arg(long)]
    grid_max: Option<f64>,
}

#[derive(Args, Debug)]
struct BettiCurveArgs {
    /// Barcode CSV as written by rips-ph.
    barcode: PathBuf,
    #[arg(long)]
    dim: usize,
    #[command(flatten)]
    grid: GridArgs,
}

#[derive(Args, Debug)]
struct BottleneckArgs {
    a: PathBuf,
    b: PathBuf,
    #[arg(long)]
    dim: usize,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum GraphFormat {
    Dot,
    Json,
}

#[derive(Args, Debug)]
struct MapperArgs {
    input: PathBuf,
    #[arg(long)]
    header: bool,
    /// coordinate:AXIS, eccentricity:P (P may be inf), density:BANDWIDTH
    #[arg(long, default_value = "coordinate:0")]
    filter: String,
    #[arg(long, default_value_t = 10)]
    intervals: usize,
    #[arg(long, default_value_t = 0.5)]
    overlap: f64,
    /// Single-linkage threshold inside each preimage.
    #[arg(long, conflicts_with = "auto_bins")]
    cluster_eps: Option<f64>,
    /// Pick the threshold at the first gap of a histogram with this many bins.
    #[arg(long)]
    auto_bins: Option<usize>,
    #[arg(long, value_enum, default_value_t = GraphFormat::Dot)]
    format: GraphFormat,
    /// Colour DOT nodes by cover interval.
    #[arg(long)]
    color: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CrockerArgs {
    /// One CSV path per line, in time order.
    manifest: PathBuf,
    #[command(flatten)]
    input_args: InputArgs,
    /// Betti dimension.
    #[arg(long, default_value_t = 0)]
    dim: usize,
    /// Highest homology dimension computed; defaults to --dim.
    #[arg(long)]
    max_dim: Option<usize>,
    #[command(flatten)]
    grid: GridArgs,
    /// Bucket entries above this value as cap + 1.
    #[arg(long)]
    noise_cap: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Failures caused by bad input exit with 2, anything else with 1.
enum Failure {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl From<topohunt::Error> for Failure {
    fn from(e: topohunt::Error) -> Self {
        // the error's Display already includes its source
        Failure::Input(anyhow::anyhow!(e.to_string()))
    }
}

type CmdResult = Result<(), Failure>;

fn input_err(msg: impl Into<String>) -> Failure {
    Failure::Input(anyhow::anyhow!(msg.into()))
}

fn emit(path: Option<&Path>, content: &str) -> CmdResult {
    match path {
        Some(p) => fs::write(p, content)
            .with_context(|| format!("writing {}", p.display()))
            .map_err(Failure::Internal),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(content.as_bytes())
                .and_then(|_| out.flush())
                .context("writing to stdout")
                .map_err(Failure::Internal)
        }
    }
}

fn load_distances(path: &Path, args: &InputArgs) -> Result<DistanceMatrix, Failure> {
    Ok(match args.input_kind {
        InputKind::Cloud => euclidean_distances(&load_cloud(path, args.header)?),
        InputKind::Square => read_distance_matrix(path, MatrixLayout::Square)?,
        InputKind::Lower => read_distance_matrix(path, MatrixLayout::LowerTriangular)?,
    })
}

fn load_cloud(path: &Path, header: bool) -> Result<PointCloud, Failure> {
    let cloud = read_cloud(path, header.then_some(true))?;
    if cloud.is_empty() {
        return Err(input_err(format!("{}: no points", path.display())));
    }
    Ok(cloud)
}

fn run_generate(args: GenerateArgs) -> CmdResult {
    let shape: Shape = args.shape.parse()?;
    let mut spec = GeneratorSpec::new(shape, args.n, args.seed);
    if let Some(dim) = args.dim {
        spec = spec.ambient_dim(dim);
    }
    if let Some(noise) = args.noise {
        spec = spec.noise(noise);
    }
    let cloud = topohunt::generate(&spec)?;
    let mut buf = Vec::new();
    write_cloud_to(&cloud, &mut buf).expect("writing to memory");
    emit(args.out.as_deref(), &String::from_utf8(buf).expect("ascii output"))
}

fn run_homology(args: HomologyArgs) -> CmdResult {
    let maximal = read_maximal_simplices(&args.input)?;
    let complex = SimplicialComplex::build(maximal)?;
    emit(None, &format!("{}\n", betti_numbers(&complex)))
}

fn summary(bc: &Barcode) -> String {
    let mut out = String::new();
    for k in 0..=bc.max_dimension() {
        let lifetimes = bc.lifetimes(k);
        let ratio = match (lifetimes.first(), lifetimes.get(1)) {
            (Some(a), Some(b)) if *b > 0.0 => format!("{:.3}", a / b),
            (Some(_), _) => "inf".to_string(),
            _ => "-".to_string(),
        };
        let top: Vec<String> = lifetimes.iter().take(10).map(|l| format!("{l:.4}")).collect();
        out.push_str(&format!(
            "H{k}: {} bars, longest/second = {ratio}, lifetimes: {}\n",
            lifetimes.len(),
            top.join(" ")
        ));
    }
    out
}

fn run_rips(args: RipsArgs) -> CmdResult {
    let d = load_distances(&args.input, &args.input_args)?;
    let eps_max = args.eps_max.unwrap_or_else(|| d.max_distance());
    if !(eps_max >= 0.0 && eps_max.is_finite()) {
        return Err(input_err(format!(
            "--eps-max must be finite and non-negative, got {eps_max}"
        )));
    }
    let fc = rips_complex(&d, eps_max, args.max_dim + 1);
    let opts = PersistenceOptions {
        keep_zero_length: args.keep_zero,
    };
    let bc = persistent_homology_with(&fc, opts).map_err(|e| Failure::Internal(e.into()))?;
    let text = match args.format {
        BarcodeFormat::Csv => bc.to_csv(),
        BarcodeFormat::Json => serde_json::to_string(&bc).map_err(|e| Failure::Internal(e.into()))? + "\n",
    };
    emit(args.out.as_deref(), &text)?;
    if let Some(p) = &args.svg_barcode {
        emit(Some(p), &svg::barcode_svg(&bc))?;
    }
    if let Some(p) = &args.svg_diagram {
        emit(Some(p), &svg::diagram_svg(&bc))?;
    }
    if args.summary {
        eprint!("{}", summary(&bc));
    }
    Ok(())
}

fn read_barcode(path: &Path) -> Result<Barcode, Failure> {
    let text = fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(Failure::Input)?;
    Barcode::from_csv(&text).map_err(|e| input_err(format!("{}: {e}", path.display())))
}

fn grid_from(args: &GridArgs, default_max: f64) -> Result<Vec<f64>, Failure> {
    if let Some(eps) = &args.eps {
        if eps.is_empty()
            || eps
                .windows(2)
                .any(|w| w[0].partial_cmp(&w[1]) != Some(std::cmp::Ordering::Less))
        {
            return Err(input_err("--eps values must be strictly increasing"));
        }
        return Ok(eps.clone());
    }
    let min = args.grid_min.unwrap_or(0.0);
    let max = args.grid_max.unwrap_or(default_max);
    if max <= min {
        return Ok(vec![min]);
    }
    Ok(linear_grid(args.grid_count, min, max)?)
}

fn run_betti_curve(args: BettiCurveArgs) -> CmdResult {
    let bc = read_barcode(&args.barcode)?;
    let grid = grid_from(&args.grid, bc.epsilon_max())?;
    let mut out = format!("epsilon,beta_{}\n", args.dim);
    for e in grid {
        out.push_str(&format!("{e},{}\n", betti_curve(&bc, args.dim, e)));
    }
    emit(None, &out)
}

fn run_bottleneck(args: BottleneckArgs) -> CmdResult {
    let a = diagram_from_barcode(&read_barcode(&args.a)?, args.dim);
    let b = diagram_from_barcode(&read_barcode(&args.b)?, args.dim);
    let d = bottleneck_distance(&a, &b)?;
    emit(None, &format!("{}\n", topohunt::persistence::format_value(d)))
}

fn parse_filter(spec: &str) -> Result<FilterKind, Failure> {
    let (name, arg) = spec.split_once(':').unwrap_or((spec, ""));
    let bad = || input_err(format!("bad --filter {spec:?}"));
    match name {
        "coordinate" => Ok(FilterKind::Coordinate {
            axis: if arg.is_empty() {
                0
            } else {
                arg.parse().map_err(|_| bad())?
            },
        }),
        "eccentricity" => Ok(FilterKind::Eccentricity {
            exponent: match arg {
                "" => 1.0,
                "inf" => f64::INFINITY,
                a => a.parse().map_err(|_| bad())?,
            },
        }),
        "density" => Ok(FilterKind::Density {
            bandwidth: if arg.is_empty() {
                1.0
            } else {
                arg.parse().map_err(|_| bad())?
            },
        }),
        _ => Err(bad()),
    }
}

fn run_mapper(args: MapperArgs) -> CmdResult {
    let cloud = load_cloud(&args.input, args.header)?;
    let d = euclidean_distances(&cloud);
    let values = filter_values(&cloud, &d, parse_filter(&args.filter)?)?;
    let cover = uniform_cover(&values, args.intervals, args.overlap)?;
    if cover.degenerate {
        eprintln!("warning: filter values have zero range; using a single interval");
    }
    let clustering = match (args.cluster_eps, args.auto_bins) {
        (Some(epsilon), _) => Clustering::SingleLinkage { epsilon },
        (None, Some(bins)) => Clustering::HistogramGap { bins },
        (None, None) => return Err(input_err("one of --cluster-eps or --auto-bins is required")),
    };
    let graph = mapper_graph(&d, &values, &cover, clustering)?;
    let text = match args.format {
        GraphFormat::Dot => graph.to_dot(args.color),
        GraphFormat::Json => serde_json::to_string(&graph).map_err(|e| Failure::Internal(e.into()))? + "\n",
    };
    emit(args.out.as_deref(), &text)
}

fn run_crocker(args: CrockerArgs) -> CmdResult {
    let paths = read_manifest(&args.manifest)?;
    let inputs = paths
        .iter()
        .map(|p| load_distances(p, &args.input_args))
        .collect::<Result<Vec<_>, _>>()?;
    let labels: Vec<String> = paths
        .iter()
        .map(|p| {
            p.file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_else(|| p.display().to_string())
        })
        .collect();
    let grid = match (&args.grid.eps, args.grid.grid_min, args.grid.grid_max) {
        (None, None, None) => default_grid(&inputs, args.grid.grid_count)?,
        _ => {
            let max = inputs.iter().map(DistanceMatrix::max_distance).fold(0.0, f64::max);
            grid_from(&args.grid, max)?
        }
    };
    let max_dim = args.max_dim.unwrap_or(args.dim);
    let mut m = crocker(&inputs, Some(labels), args.dim, &grid, max_dim)?;
    if let Some(cap) = args.noise_cap {
        m = crocker_noise_floor(&m, cap)?;
    }
    emit(args.out.as_deref(), &m.to_csv())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Homology(a) => run_homology(a),
        Command::RipsPh(a) => run_rips(a),
        Command::BettiCurve(a) => run_betti_curve(a),
        Command::Bottleneck(a) => run_bottleneck(a),
        Command::Mapper(a) => run_mapper(a),
        Command::Crocker(a) => run_crocker(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("internal error: {e:#}");
            ExitCode::from(1)
        }
    }
}

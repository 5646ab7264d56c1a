//! `heatclust`: generate synthetic data, cluster point clouds and plot the
//! results.
//!
//! Exit codes: 0 success, 1 bad input or I/O failure, 2 degenerate-input
//! warnings under `--strict`, 3 numerical failure.

mod plot;
mod report;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use heatclust::datasets::{
    generate_blobs, generate_three_circles, generate_two_circles, LabeledPointCloud,
};
use heatclust::io::{read_labels, read_points, write_labels, write_points};
use heatclust::{cluster, BandwidthMode, ClusterConfig, KernelFamily};

use plot::View;
use report::{RunReport, Timings};

#[derive(Debug, Parser)]
#[command(
    name = "heatclust",
    version,
    about = "Topological clustering with graph heat operators"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a synthetic labeled point cloud.
    Gen(GenArgs),
    /// Cluster a point cloud.
    Cluster(ClusterArgs),
    /// Render a result as SVG.
    Plot(PlotArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Family {
    ThreeCircles,
    Blobs,
    TwoCircles,
}

#[derive(Debug, Args)]
struct GenArgs {
    family: Family,
    #[arg(long, default_value_t = 500)]
    n: usize,
    #[arg(long, default_value_t = 0.05)]
    sigma: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of blobs.
    #[arg(long, default_value_t = 2)]
    k: usize,
    /// Distance between blob centers (blobs have diameter 1).
    #[arg(long, default_value_t = 2.0)]
    spacing: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    labels_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ClusterArgs {
    #[arg(long)]
    input: PathBuf,
    /// The input's first line is a header.
    #[arg(long)]
    header: bool,
    /// row-ball or lebesgue-ball.
    #[arg(long, default_value = "row-ball")]
    kernel: KernelFamily,
    /// auto (elbow rule), max, or a fixed radius.
    #[arg(long, default_value = "auto")]
    bandwidth: BandwidthMode,
    #[arg(long, default_value_t = 30)]
    grid: usize,
    #[arg(long, default_value_t = 10)]
    subsamples: usize,
    #[arg(long, default_value_t = 0.8)]
    fraction: f64,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out_labels: PathBuf,
    #[arg(long)]
    out_report: Option<PathBuf>,
    /// Not written for a fixed bandwidth.
    #[arg(long)]
    out_curve: Option<PathBuf>,
    /// Eliminated eigenvector map, one row per point.
    #[arg(long)]
    out_phi: Option<PathBuf>,
    /// Exit with status 2 on degenerate-input warnings.
    #[arg(long)]
    strict: bool,
    /// Worker threads for the variance curve (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PlotKind {
    /// Variance curve from a curve CSV.
    Curve,
    /// Image of the eigenvector map from a phi CSV.
    Phi,
    /// Point cloud colored by cluster.
    Clusters,
}

#[derive(Debug, Args)]
struct PlotArgs {
    kind: PlotKind,
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Labels CSV (phi and clusters plots).
    #[arg(long)]
    labels: Option<PathBuf>,
    /// Report JSON supplying r_hat (curve plot).
    #[arg(long)]
    report: Option<PathBuf>,
    /// Selected radius to mark (curve plot); overrides --report.
    #[arg(long)]
    r_hat: Option<f64>,
    /// The point CSV has a header line (clusters plot).
    #[arg(long)]
    header: bool,
    #[arg(long, default_value_t = 30.0)]
    azimuth: f64,
    #[arg(long, default_value_t = 25.0)]
    elevation: f64,
}

#[derive(Debug, thiserror::Error)]
enum CliError {
    #[error("{0}")]
    Lib(#[from] heatclust::Error),
    #[error("{path}: {source}")]
    File {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Strict(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Lib(e) if e.is_numerical() => 3,
            CliError::Strict(_) => 2,
            _ => 1,
        }
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn open(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        })
}

fn write_file(path: &Path, contents: &[u8]) -> Result<()> {
    let mut w = create(path)?;
    w.write_all(contents)
        .and_then(|_| w.flush())
        .map_err(|source| CliError::File {
            path: path.to_path_buf(),
            source,
        })
}

fn run_gen(args: GenArgs) -> Result<()> {
    let data: LabeledPointCloud = match args.family {
        Family::ThreeCircles => generate_three_circles(args.n, args.sigma, args.seed)?,
        Family::Blobs => generate_blobs(args.n, args.k, args.spacing, args.sigma, args.seed)?,
        Family::TwoCircles => generate_two_circles(args.n, args.sigma, args.seed)?,
    };
    let mut buf = Vec::new();
    write_points(&mut buf, &data.cloud)?;
    write_file(&args.out, &buf)?;
    if let Some(path) = &args.labels_out {
        let mut buf = Vec::new();
        write_labels(&mut buf, &data.labels)?;
        write_file(path, &buf)?;
    }
    Ok(())
}

fn ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

fn run_cluster(args: ClusterArgs) -> Result<()> {
    let started = Instant::now();
    let cloud = read_points(open(&args.input)?, args.header)?;
    let read_ms = ms(started);

    let config = ClusterConfig {
        kernel: args.kernel,
        bandwidth: args.bandwidth,
        grid_size: args.grid,
        subsamples: args.subsamples,
        fraction: args.fraction,
        time: args.t,
        tolerance: args.tol,
        seed: args.seed,
    };
    config.validate()?;

    let cluster_start = Instant::now();
    let result = match args.threads {
        Some(threads) => rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .map_err(|e| CliError::Usage(format!("cannot start {threads} threads: {e}")))?
            .install(|| cluster(&cloud, &config))?,
        None => cluster(&cloud, &config)?,
    };
    let cluster_ms = ms(cluster_start);

    let mut buf = Vec::new();
    write_labels(&mut buf, &result.labels)?;
    write_file(&args.out_labels, &buf)?;

    if let Some(path) = &args.out_curve {
        match &result.curve {
            Some(curve) => write_file(path, curve.to_csv().as_bytes())?,
            None => eprintln!(
                "note: fixed bandwidth, no variance curve written to {}",
                path.display()
            ),
        }
    }

    if let Some(path) = &args.out_phi {
        let k = result.phi.nrows();
        let mut text: String = (1..=k)
            .map(|i| format!("phi_{i}"))
            .collect::<Vec<_>>()
            .join(",");
        text.push('\n');
        for col in result.phi.column_iter() {
            let row: Vec<String> = col.iter().map(|v| v.to_string()).collect();
            text.push_str(&row.join(","));
            text.push('\n');
        }
        write_file(path, text.as_bytes())?;
    }

    for w in &result.warnings {
        eprintln!("warning: {w}");
    }

    if let Some(path) = &args.out_report {
        let report = RunReport::new(
            cloud.dim(),
            &result,
            &config,
            &args.input.display().to_string(),
            args.header,
            Timings {
                read: read_ms,
                cluster: cluster_ms,
                total: ms(started),
            },
        );
        let mut json = serde_json::to_vec_pretty(&report)?;
        json.push(b'\n');
        write_file(path, &json)?;
    }

    println!(
        "beta0 = {}, r_hat = {}, sizes = {:?}",
        result.beta0,
        result.r_hat,
        result.cluster_sizes()
    );

    if args.strict {
        let degenerate: Vec<String> = result
            .warnings
            .iter()
            .filter(|w| w.is_degenerate())
            .map(ToString::to_string)
            .collect();
        if !degenerate.is_empty() {
            return Err(CliError::Strict(format!(
                "strict mode: {}",
                degenerate.join("; ")
            )));
        }
    }
    Ok(())
}

fn read_table(path: &Path, header: bool) -> Result<Vec<Vec<f64>>> {
    let cloud = read_points(open(path)?, header)?;
    Ok(heatclust::datasets::to_rows(&cloud))
}

fn labels_for(path: Option<&PathBuf>, n: usize) -> Result<Vec<usize>> {
    let Some(path) = path else {
        return Err(CliError::Usage("--labels is required for this plot".into()));
    };
    let labels = read_labels(open(path)?)?;
    if labels.len() != n {
        return Err(CliError::Usage(format!(
            "{} labels for {n} points in {}",
            labels.len(),
            path.display()
        )));
    }
    Ok(labels)
}

fn run_plot(args: PlotArgs) -> Result<()> {
    let view = View {
        azimuth: args.azimuth,
        elevation: args.elevation,
    };
    let svg = match args.kind {
        PlotKind::Curve => {
            let rows = read_table(&args.input, true)?;
            if rows[0].len() != 2 {
                return Err(CliError::Usage(
                    "curve CSV must have columns r,v_hat".into(),
                ));
            }
            let r_hat = match (args.r_hat, &args.report) {
                (Some(r), _) => Some(r),
                (None, Some(path)) => {
                    let value: serde_json::Value = serde_json::from_reader(open(path)?)?;
                    value["r_hat"].as_f64()
                }
                (None, None) => None,
            };
            let radii: Vec<f64> = rows.iter().map(|r| r[0]).collect();
            let values: Vec<f64> = rows.iter().map(|r| r[1]).collect();
            plot::curve_svg(&radii, &values, r_hat)
        }
        PlotKind::Phi => {
            let rows = read_table(&args.input, true)?;
            let labels = labels_for(args.labels.as_ref(), rows.len())?;
            plot::scatter_svg("Image of the eigenvector map", &rows, &labels, view)
        }
        PlotKind::Clusters => {
            let rows = read_table(&args.input, args.header)?;
            let labels = labels_for(args.labels.as_ref(), rows.len())?;
            plot::scatter_svg("Clusters", &rows, &labels, view)
        }
    };
    write_file(&args.out, svg.as_bytes())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let outcome = match cli.command {
        Command::Gen(args) => run_gen(args),
        Command::Cluster(args) => run_cluster(args),
        Command::Plot(args) => run_plot(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

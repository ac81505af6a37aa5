use std::fs::File;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::error::ErrorKind;
use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};
use serde_json::json;

use pknng::cluster::{accuracy, Linkage};
use pknng::data::{generate, DataConstants, DatasetSpec, Embedding, Family, Noise};
use pknng::eval::{
    mnist_dir, mnist_files, run_algorithm, run_grid_to_dir, run_mnist_files, write_mnist_table, Algorithm,
    ExperimentSpec, MethodSpec, MetricKind, MnistConfig, DEFAULT_SIGMA_FACTOR, SUMMARY_FILE,
};
use pknng::par::with_jobs;
use pknng::{
    euclidean_matrix_with, min_k_metric, pknng_metric_with, ConnectorConfig, DissimilarityMatrix, Execution,
    Penalty, PointSet, Scheme, DEFAULT_K,
};

#[derive(Parser)]
#[command(name = "pknng", version, about = "Geodesic kNN-graph dissimilarities, clustering and benchmarks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset as CSV.
    Gen(GenArgs),
    /// Compute a dissimilarity matrix from a point CSV.
    Metric(MetricArgs),
    /// Cluster a dissimilarity matrix (or points under the Euclidean metric).
    Cluster(ClusterArgs),
    /// Run an experiment grid from a JSON config.
    Bench(BenchArgs),
    /// Cluster MNIST digit subsets and tabulate accuracy.
    Mnist(MnistArgs),
}

#[derive(Args)]
struct GenArgs {
    #[arg(long)]
    family: Family,
    /// low, medium, high or an explicit sigma.
    #[arg(long, default_value = "low")]
    noise: Noise,
    /// 2d, 3d, 3d-noise or 10d-noise.
    #[arg(long = "embed", default_value = "2d")]
    embedding: Embedding,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Defaults to the family's entry in the constants table.
    #[arg(long)]
    n_per_cluster: Option<usize>,
    /// Embedding noise sigma; defaults to a fraction of the data diameter.
    #[arg(long)]
    embed_sigma: Option<f64>,
    /// JSON file overriding the data constants.
    #[arg(long)]
    constants: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MetricArgs {
    /// Point CSV (`x0,...,label`).
    #[arg(long)]
    input: PathBuf,
    /// Binary matrix output.
    #[arg(long)]
    out: PathBuf,
    /// Also write the matrix as headerless CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    #[arg(long, default_value = "pknng")]
    metric: MetricKind,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    /// minspan, allsubgraphs, alledges or medoids.
    #[arg(long, default_value = "minspan")]
    scheme: Scheme,
    /// exponential, shifted or plain.
    #[arg(long, default_value = "exponential")]
    penalty: Penalty,
    /// Write the connected graph as an edge list (pknng only).
    #[arg(long)]
    dump_graph: Option<PathBuf>,
}

#[derive(Args)]
struct ClusterArgs {
    /// Binary matrix from `metric`.
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    matrix: Option<PathBuf>,
    /// Point CSV, clustered under the Euclidean metric. If it has labels the
    /// accuracy is reported.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long = "algo", value_enum)]
    algorithm: AlgoName,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "average")]
    linkage: Linkage,
    #[arg(long, default_value_t = DEFAULT_SIGMA_FACTOR)]
    sigma_factor: f64,
    /// Seed for spectral clustering's k-means.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Labels CSV (`point_index,cluster_id`).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoName {
    Pam,
    Hc,
    Mst,
    Spectral,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory; an interrupted run resumes here.
    #[arg(long, default_value = "results")]
    out: PathBuf,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct MnistArgs {
    /// JSON run description (digits, per_class, repeats, base_seed, knn_k,
    /// methods); replaces the run flags.
    #[arg(long, conflicts_with_all = ["digits", "per_class", "repeats", "methods", "k", "seed"])]
    config: Option<PathBuf>,
    /// Comma-separated digits.
    #[arg(long, value_delimiter = ',', default_value = "3,5,8")]
    digits: Vec<usize>,
    #[arg(long, default_value_t = 500)]
    per_class: usize,
    #[arg(long, default_value_t = 10)]
    repeats: usize,
    /// Method presets, comma-separated.
    #[arg(
        long = "method",
        value_delimiter = ',',
        default_value = "pknng-pam,spectral,euclidean-pam,mst",
        value_parser = parse_preset
    )]
    methods: Vec<MethodSpec>,
    #[arg(long, default_value_t = DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory with the training IDX files; overrides the environment.
    #[arg(long)]
    dir: Option<PathBuf>,
    /// Table CSV; printed to stdout as well.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads (0 = all cores).
    #[arg(long, default_value_t = 1)]
    jobs: usize,
}

fn parse_preset(s: &str) -> std::result::Result<MethodSpec, String> {
    MethodSpec::preset(s.trim()).map_err(|_| format!("expected one of {}", MethodSpec::PRESETS.join(", ")))
}

/// Report a flag combination clap cannot express; exits with status 2.
fn usage_error(msg: &str) -> ! {
    Cli::command().error(ErrorKind::ArgumentConflict, msg).exit()
}

fn print_config(command: &str, value: serde_json::Value) -> Result<()> {
    let v = json!({ "command": command, "config": value });
    println!("{}", serde_json::to_string_pretty(&v)?);
    Ok(())
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn load_constants(path: Option<&Path>) -> Result<DataConstants> {
    match path {
        None => Ok(DataConstants::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            Ok(serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?)
        }
    }
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let constants = load_constants(a.constants.as_deref())?;
    let spec = DatasetSpec {
        family: a.family,
        n_per_cluster: a.n_per_cluster.unwrap_or_else(|| constants.default_n_per_cluster(a.family)),
        noise: a.noise,
        embedding: a.embedding,
        embed_noise_sigma: a.embed_sigma,
        seed: a.seed,
    };
    print_config("gen", json!({ "dataset": spec, "constants": constants, "out": a.out }))?;
    let ps = generate(&spec, &constants)?;
    ps.save_csv(&a.out)?;
    println!("n={} D={} C={}", ps.n(), ps.dim(), ps.num_classes());
    Ok(())
}

fn cmd_metric(a: MetricArgs) -> Result<()> {
    if a.dump_graph.is_some() && a.metric != MetricKind::Pknng {
        usage_error("--dump-graph needs --metric pknng");
    }
    let connector = ConnectorConfig::new(a.scheme, a.penalty);
    print_config(
        "metric",
        json!({
            "input": a.input, "out": a.out, "csv": a.csv, "metric": a.metric.to_string(),
            "k": a.k, "connector": connector, "dump_graph": a.dump_graph,
        }),
    )?;
    let ps = PointSet::load_csv(&a.input)?;
    let exec = Execution::Sequential;
    let d = match a.metric {
        MetricKind::Euclidean => euclidean_matrix_with(&ps, exec),
        MetricKind::Pknng => {
            let out = pknng_metric_with(&ps, a.k, &connector, exec)?;
            println!(
                "components={} mu={:?} pruned_edges={} added_edges={} clamped_duplicates={}",
                out.components, out.mu, out.pruned_edges, out.added_edges, out.clamped_duplicates
            );
            if let Some(p) = &a.dump_graph {
                out.graph.write_edge_list(create(p)?)?;
            }
            out.matrix
        }
        MetricKind::MinK => {
            let (d, k) = min_k_metric(&ps, exec)?;
            println!("min_k={k}");
            d
        }
    };
    d.save_binary(&a.out)?;
    if let Some(p) = &a.csv {
        d.save_csv(p)?;
    }
    println!("n={}", d.n());
    Ok(())
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let algorithm = match a.algorithm {
        AlgoName::Pam => Algorithm::Pam,
        AlgoName::Hc => Algorithm::Hc { linkage: a.linkage },
        AlgoName::Mst => Algorithm::Mst,
        AlgoName::Spectral => Algorithm::Spectral {
            sigma_factor: a.sigma_factor,
        },
    };
    print_config(
        "cluster",
        json!({
            "matrix": a.matrix, "points": a.points, "algorithm": algorithm, "k": a.k,
            "seed": a.seed, "out": a.out,
        }),
    )?;
    let (d, truth) = match (&a.matrix, &a.points) {
        (Some(m), _) => (DissimilarityMatrix::load_binary(m)?, None),
        (None, Some(p)) => {
            let ps = PointSet::load_csv(p)?;
            (euclidean_matrix_with(&ps, Execution::Sequential), ps.labels().map(<[usize]>::to_vec))
        }
        (None, None) => unreachable!("clap enforces one input"),
    };
    let assignment = run_algorithm(&d, algorithm, a.k, a.seed)?;
    assignment.write_csv(create(&a.out)?)?;
    println!("sizes={:?}", assignment.sizes());
    if let Some(obj) = assignment.objective {
        println!("objective={obj:?}");
    }
    if let Some(t) = truth {
        println!("accuracy={:?}", accuracy(&assignment, &t)?);
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let spec = ExperimentSpec::load(&a.config)?;
    print_config("bench", json!({ "spec": spec, "out": a.out, "jobs": a.jobs }))?;
    let result = with_jobs(a.jobs, || {
        run_grid_to_dir(&spec, &a.out, Execution::Parallel, |c| {
            eprintln!("{} {}: mean={:.4} failures={}", c.dataset, c.method, c.mean(), c.failures());
        })
    })?;
    println!("cells={} summary={}", result.cells.len(), a.out.join(SUMMARY_FILE).display());
    Ok(())
}

fn cmd_mnist(a: MnistArgs) -> Result<()> {
    let dir = a.dir.clone().unwrap_or_else(|| mnist_dir("data/mnist"));
    let (images, labels) = mnist_files(&dir);
    let cfg = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing {}", p.display()))?
        }
        None => MnistConfig {
            digits: a.digits,
            per_class: a.per_class,
            repeats: a.repeats,
            base_seed: a.seed,
            knn_k: a.k,
            methods: a.methods,
        },
    };
    print_config(
        "mnist",
        json!({ "images": images, "labels": labels, "run": cfg, "out": a.out, "jobs": a.jobs }),
    )?;
    let rows = with_jobs(a.jobs, || run_mnist_files(&images, &labels, &cfg, Execution::Parallel))?;
    write_mnist_table(&rows, &cfg, std::io::stdout().lock())?;
    if let Some(p) = &a.out {
        write_mnist_table(&rows, &cfg, create(p)?)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Metric(a) => cmd_metric(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Mnist(a) => cmd_mnist(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}

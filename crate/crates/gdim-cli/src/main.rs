//! Command-line front end for the `gdim` estimators.
//!
//! Subcommands:
//!
//! * `estimate`  — run the cross-validated eigenvalue test on a graph file
//!   and report how many leading components carry signal.
//! * `simulate`  — sample a graph from a block-model description.
//! * `scree`     — print eigenvalue scree columns for a graph, a model, or
//!   both, optionally with held-out columns from one split.
//! * `calibrate` — replicate a null-calibration study from a study file.
//! * `accuracy`  — replicate a recovery study from a study file.
//!
//! Exit codes: 0 on success, 2 for usage and validation problems, 3 for
//! unparseable input files, 4 for numeric failures (non-convergence, empty
//! graphs, and the like).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use gdim::spectra::{top_eigen, LinearOp};
use gdim::{
    bench::{accuracy_study, calibration_study, StudySpec},
    io, seed, split, Error, MatrixMode, ModelSpec, SparseGraph,
};

#[derive(Parser)]
#[command(
    name = "gdim",
    version,
    about = "Estimate the latent dimension of a random graph",
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate how many leading components of a graph carry signal
    Estimate(EstimateArgs),
    /// Sample a graph from a block-model description
    Simulate(SimulateArgs),
    /// Print eigenvalue scree columns for a graph, a model, or both
    Scree(ScreeArgs),
    /// Measure the null behaviour of the test statistic on a model grid
    Calibrate(StudyArgs),
    /// Measure estimation accuracy on a model grid
    Accuracy(StudyArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FileFormat {
    /// Whitespace-separated `i j [weight]` lines, zero-based
    Edgelist,
    /// Matrix Market coordinate format
    Matrixmarket,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Matrix {
    /// Degree-normalized adjacency matrix with a mean-degree offset
    Laplacian,
    /// Raw adjacency matrix
    Adjacency,
}

impl From<Matrix> for MatrixMode {
    fn from(m: Matrix) -> MatrixMode {
        match m {
            Matrix::Laplacian => MatrixMode::Laplacian,
            Matrix::Adjacency => MatrixMode::Adjacency,
        }
    }
}

#[derive(Args)]
struct EstimateArgs {
    /// Graph file to read
    #[arg(long)]
    input: PathBuf,
    /// Input file format
    #[arg(long, value_enum, default_value_t = FileFormat::Edgelist)]
    format: FileFormat,
    /// Fraction of edge weight withheld for testing in each fold
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Largest component index to score
    #[arg(long, default_value_t = 15)]
    kmax: usize,
    /// Number of independent splits to average over
    #[arg(long, default_value_t = 10)]
    folds: usize,
    /// Significance level for reading off the estimate
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    /// Matrix whose leading vectors are scored
    #[arg(long, value_enum, default_value_t = Matrix::Laplacian)]
    matrix: Matrix,
    /// RNG seed (falls back to the GDIM_SEED environment variable, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the worker thread pool
    #[arg(long)]
    threads: Option<usize>,
    /// Drop weights and directions, keeping a simple symmetric graph
    #[arg(long)]
    symmetrize: bool,
    /// Score singular vectors of the rectangular adjacency matrix instead
    #[arg(long)]
    rectangular: bool,
    /// Rectangular mode: use the variance-style denominator
    #[arg(long, requires = "rectangular")]
    squared_denominator: bool,
    /// Benjamini-Hochberg adjustment across components
    #[arg(long)]
    bh: bool,
    /// Emit the full report as JSON
    #[arg(long, conflicts_with = "csv")]
    json: bool,
    /// Emit one CSV row per component
    #[arg(long)]
    csv: bool,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Model description file (JSON)
    #[arg(long)]
    model: PathBuf,
    /// Output graph format
    #[arg(long, value_enum, default_value_t = FileFormat::Edgelist)]
    format: FileFormat,
    /// Sampling seed (the model file's own seed fixes its structure)
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the worker thread pool
    #[arg(long)]
    threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct ScreeArgs {
    /// Graph file to read
    #[arg(long, required_unless_present = "model")]
    input: Option<PathBuf>,
    /// Input file format
    #[arg(long, value_enum, default_value_t = FileFormat::Edgelist)]
    format: FileFormat,
    /// Model description file (JSON); adds population columns
    #[arg(long)]
    model: Option<PathBuf>,
    /// Number of leading components to print
    #[arg(long, default_value_t = 15)]
    kmax: usize,
    /// Matrix whose spectrum is printed
    #[arg(long, value_enum, default_value_t = Matrix::Laplacian)]
    matrix: Matrix,
    /// Add held-out columns computed from one split of the input graph
    #[arg(long, requires = "input")]
    cv: bool,
    /// Fraction of edge weight withheld by the split
    #[arg(long, default_value_t = 0.05)]
    eps: f64,
    /// Drop weights and directions, keeping a simple symmetric graph
    #[arg(long)]
    symmetrize: bool,
    /// RNG seed (falls back to the GDIM_SEED environment variable, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Size of the worker thread pool
    #[arg(long)]
    threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct StudyArgs {
    /// Study description file (JSON)
    #[arg(long)]
    spec: PathBuf,
    /// Include wall-clock seconds per replicate (varies run to run)
    #[arg(long)]
    timings: bool,
    /// Emit JSON instead of CSV
    #[arg(long)]
    json: bool,
    /// Size of the worker thread pool
    #[arg(long)]
    threads: Option<usize>,
    /// Write output here instead of stdout
    #[arg(long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("gdim: {err}");
            ExitCode::from(exit_code(&err))
        }
    }
}

fn run(command: Command) -> Result<(), Error> {
    match command {
        Command::Estimate(args) => cmd_estimate(args),
        Command::Simulate(args) => cmd_simulate(args),
        Command::Scree(args) => cmd_scree(args),
        Command::Calibrate(args) => cmd_study(args, calibration_study),
        Command::Accuracy(args) => cmd_study(args, accuracy_study),
    }
}

/// 2 for problems with how the program was invoked or what it was fed, 3 for
/// files that would not parse at all, 4 for numeric failures on valid input.
fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Parse { .. } | Error::Json(_) => 3,
        Error::NonConvergence { .. } | Error::NotOrthonormal { .. } | Error::EmptyGraph { .. } => {
            4
        }
        _ => 2,
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = flag {
        return Ok(s);
    }
    match std::env::var("GDIM_SEED") {
        Ok(text) => text.trim().parse().map_err(|_| {
            Error::InvalidParameter(format!("GDIM_SEED must be an unsigned integer, got {text:?}"))
        }),
        Err(_) => Ok(0),
    }
}

fn install_threads(threads: Option<usize>) -> Result<(), Error> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn emit(content: &str, output: &Option<PathBuf>) -> Result<(), Error> {
    match output {
        Some(path) => fs::write(path, content)?,
        None => print!("{content}"),
    }
    Ok(())
}

/// Reads a file with the path attached to any I/O failure.
fn read_text(path: &Path) -> Result<String, Error> {
    fs::read_to_string(path)
        .map_err(|e| std::io::Error::new(e.kind(), format!("{}: {e}", path.display())).into())
}

/// Reads a graph in the requested format and shape. The symmetric estimators
/// need both orientations of every edge to agree; a one-sided or entrywise
/// symmetric general file is accepted as-is, anything else needs
/// `--symmetrize` or `--rectangular`.
fn read_graph(
    path: &Path,
    format: FileFormat,
    symmetrize: bool,
    rectangular: bool,
) -> Result<SparseGraph, Error> {
    let text = read_text(path)?;
    let result = (|| {
        let g = match format {
            FileFormat::Edgelist => {
                if rectangular || symmetrize {
                    io::read_edge_list_str(&text, false)?
                } else {
                    return io::read_edge_list_str(&text, true);
                }
            }
            FileFormat::Matrixmarket => io::read_matrix_market_str(&text)?,
        };
        if rectangular {
            return Ok(g);
        }
        if symmetrize {
            return g.symmetrize();
        }
        if g.is_symmetric() {
            return Ok(g);
        }
        let triples: Vec<(usize, usize, f64)> = g.entries().collect();
        SparseGraph::from_edge_list(g.n_rows(), g.n_cols(), &triples, true)
    })();
    result.map_err(|e| match e {
        Error::SymmetricConflict { row, col } => Error::InvalidParameter(format!(
            "entries ({row}, {col}) and ({col}, {row}) disagree; pass --symmetrize to \
             drop weights and directions, or --rectangular to score singular vectors"
        )),
        other => other,
    })
}

fn cmd_estimate(args: EstimateArgs) -> Result<(), Error> {
    install_threads(args.threads)?;
    let seed_value = resolve_seed(args.seed)?;
    let g = read_graph(&args.input, args.format, args.symmetrize, args.rectangular)?;
    let opts = gdim::EigcvOptions {
        epsilon: args.eps,
        k_max: args.kmax,
        folds: args.folds,
        alpha: args.alpha,
        matrix_mode: args.matrix.into(),
        seed: seed_value,
        bh: args.bh,
        squared_denominator: args.squared_denominator,
        ..Default::default()
    };
    let report = if args.rectangular {
        gdim::eigcv_rectangular(&g, &opts)?
    } else {
        gdim::eigcv(&g, &opts)?
    };
    let text = if args.json {
        let mut s = report.to_json();
        s.push('\n');
        s
    } else if args.csv {
        report.to_csv()
    } else {
        render_report(&report)
    };
    emit(&text, &args.output)
}

fn render_report(report: &gdim::CvReport) -> String {
    let p = &report.parameters;
    let matrix = match p.matrix_mode {
        MatrixMode::Laplacian => "laplacian",
        MatrixMode::Adjacency => "adjacency",
    };
    let mut out = String::new();
    out.push_str(&format!(
        "graph: {} x {}{}\n",
        p.n_rows,
        p.n_cols,
        if p.rectangular { " (rectangular)" } else { "" }
    ));
    out.push_str(&format!(
        "epsilon: {}, folds: {}, k_max: {}, alpha: {}, matrix: {}, seed: {}\n\n",
        p.epsilon, p.folds, p.k_max, p.alpha, matrix, p.seed
    ));
    if p.bh {
        out.push_str("component       mean_t     p_value  p_adjusted\n");
    } else {
        out.push_str("component       mean_t     p_value\n");
    }
    for c in &report.components {
        let adj = c.p_adjusted.unwrap_or(c.p);
        let star = if adj < p.alpha { "  *" } else { "" };
        if p.bh {
            out.push_str(&format!(
                "{:>9}  {:>11.5}  {:>10.6}  {:>10.6}{}\n",
                c.component,
                c.mean_t,
                c.p,
                c.p_adjusted.unwrap_or(f64::NAN),
                star
            ));
        } else {
            out.push_str(&format!(
                "{:>9}  {:>11.5}  {:>10.6}{}\n",
                c.component, c.mean_t, c.p, star
            ));
        }
    }
    out.push_str(&format!(
        "\nk_hat: {}{}\n",
        report.estimate.k_hat,
        if report.estimate.censored {
            " (censored: every tested component was significant)"
        } else {
            ""
        }
    ));
    for w in &report.warnings {
        out.push_str(&format!("warning: {w}\n"));
    }
    out
}

fn cmd_simulate(args: SimulateArgs) -> Result<(), Error> {
    install_threads(args.threads)?;
    let seed_value = resolve_seed(args.seed)?;
    let spec = ModelSpec::from_json(&read_text(&args.model)?)?;
    let model = spec.build()?;
    let g = model.sample(seed_value)?;
    let text = match args.format {
        FileFormat::Edgelist => io::write_edge_list_str(&g),
        FileFormat::Matrixmarket => io::write_matrix_market_str(&g),
    };
    emit(&text, &args.output)
}

/// Stream tags for the independent RNG draws a scree makes.
const SCREE_SPLIT_STREAM: u64 = 0x5C4;
const SCREE_EIG_STREAM: u64 = 0x5C4E;

fn cmd_scree(args: ScreeArgs) -> Result<(), Error> {
    install_threads(args.threads)?;
    let seed_value = resolve_seed(args.seed)?;
    if args.kmax == 0 {
        return Err(Error::InvalidParameter("kmax must be positive".into()));
    }

    // Column layout: component, then sample columns when a graph was given,
    // then population columns when a model was given.
    let mut sample: Vec<f64> = Vec::new();
    let mut lambda_test: Vec<f64> = Vec::new();
    let mut z: Vec<Option<f64>> = Vec::new();
    let mut population: Vec<f64> = Vec::new();
    let mut lambda_pop: Vec<f64> = Vec::new();

    let graph = match &args.input {
        Some(path) => Some(read_graph(path, args.format, args.symmetrize, false)?),
        None => None,
    };

    if let Some(g) = &graph {
        let k = args.kmax.min(g.n_rows());
        let eig_seed = seed::mix(seed_value, SCREE_EIG_STREAM);
        let basis = match args.matrix {
            Matrix::Laplacian => {
                let l = g.regularized_laplacian()?;
                top_eigen(&l, k, 1e-8, 500_000, eig_seed)?
            }
            Matrix::Adjacency => top_eigen(g, k, 1e-8, 500_000, eig_seed)?,
        };
        sample = basis.values().to_vec();

        if args.cv {
            let pair = split(g, args.eps, seed::mix(seed_value, SCREE_SPLIT_STREAM))?;
            let fit_basis = match args.matrix {
                Matrix::Laplacian => {
                    let l = pair.fit.regularized_laplacian()?;
                    top_eigen(&l, k, 1e-8, 500_000, eig_seed)?
                }
                Matrix::Adjacency => top_eigen(&pair.fit, k, 1e-8, 500_000, eig_seed)?,
            };
            let test_matrix = match args.matrix {
                Matrix::Laplacian => pair.test.regularized_laplacian()?,
                Matrix::Adjacency => pair.test.clone(),
            };
            for j in 0..fit_basis.len() {
                let x = fit_basis.vector(j);
                lambda_test.push(test_matrix.quadratic_form(x, x));
                let sigma = gdim::cveig::sigma_full(x, g, args.eps)?;
                if sigma > 0.0 {
                    z.push(Some(gdim::cveig::lambda_test(&pair.test, x)? / sigma));
                } else {
                    z.push(None);
                }
            }

            if let Some(path) = &args.model {
                let spec = ModelSpec::from_json(&read_text(path)?)?;
                let expected = spec.build()?.expected_adjacency()?;
                let pop_matrix = match args.matrix {
                    Matrix::Laplacian => expected.regularized_laplacian()?,
                    Matrix::Adjacency => expected.matrix().clone(),
                };
                for j in 0..fit_basis.len() {
                    lambda_pop.push(dense_quadratic_form(&pop_matrix, fit_basis.vector(j))?);
                }
            }
        }
    }

    if let Some(path) = &args.model {
        let spec = ModelSpec::from_json(&read_text(path)?)?;
        let expected = spec.build()?.expected_adjacency()?;
        let pop_matrix = match args.matrix {
            Matrix::Laplacian => expected.regularized_laplacian()?,
            Matrix::Adjacency => expected.matrix().clone(),
        };
        let k = args.kmax.min(expected.n());
        let basis = top_eigen(&pop_matrix, k, 1e-10, 500_000, seed::mix(seed_value, 1))?;
        population = basis.values().to_vec();
    }

    let mut header = String::from("component");
    if graph.is_some() {
        header.push_str(",sample");
    }
    if args.cv {
        header.push_str(",lambda_test,z");
    }
    if !population.is_empty() {
        header.push_str(",population");
    }
    if !lambda_pop.is_empty() {
        header.push_str(",lambda_pop");
    }
    let rows = sample.len().max(population.len());
    let mut out = header;
    out.push('\n');
    for j in 0..rows {
        out.push_str(&(j + 1).to_string());
        if graph.is_some() {
            push_field(&mut out, sample.get(j).copied());
        }
        if args.cv {
            push_field(&mut out, lambda_test.get(j).copied());
            push_field(&mut out, z.get(j).copied().flatten());
        }
        if !population.is_empty() {
            push_field(&mut out, population.get(j).copied());
        }
        if !lambda_pop.is_empty() {
            push_field(&mut out, lambda_pop.get(j).copied());
        }
        out.push('\n');
    }
    emit(&out, &args.output)
}

fn push_field(out: &mut String, value: Option<f64>) {
    out.push(',');
    if let Some(v) = value {
        // Shortest decimal that round-trips, switching to scientific
        // notation for tiny magnitudes instead of a wall of zeros.
        out.push_str(&serde_json::to_string(&v).expect("finite float"));
    }
}

fn dense_quadratic_form(m: &nalgebra::DMatrix<f64>, x: &[f64]) -> Result<f64, Error> {
    if m.ncols() != x.len() || m.nrows() != x.len() {
        return Err(Error::DimensionMismatch {
            context: format!(
                "population matrix is {} x {} but the eigenvector has {} entries \
                 (model and graph sizes must match)",
                m.nrows(),
                m.ncols(),
                x.len()
            ),
        });
    }
    let mut y = vec![0.0; x.len()];
    m.apply(x, &mut y);
    Ok(x.iter().zip(&y).map(|(a, b)| a * b).sum())
}

fn cmd_study(
    args: StudyArgs,
    study: fn(&StudySpec, bool) -> Result<gdim::bench::StudyResult, Error>,
) -> Result<(), Error> {
    install_threads(args.threads)?;
    let spec = StudySpec::from_json(&read_text(&args.spec)?)?;
    let result = study(&spec, args.timings)?;
    let text = if args.json {
        let mut s = result.to_json();
        s.push('\n');
        s
    } else {
        result.to_csv()
    };
    emit(&text, &args.output)
}

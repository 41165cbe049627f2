//! `inflap`: command line front end for the discrete infinity Laplace solvers.

mod commands;
mod manifest;
mod specs;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use manifest::{RunManifest, MANIFEST_FORMAT};

#[derive(Debug, Parser)]
#[command(name = "inflap", version, about = "Discrete infinity Laplace solvers")]
struct Cli {
    /// Worker threads for the parallel kernels (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Command {
    /// Solve a Dirichlet problem given as a graph file.
    Solve(SolveArgs),
    /// Classify a field and check the subharmonicity conditions.
    Check(CheckArgs),
    /// Steepen a subharmonic field on its flat set.
    Regularize(RegularizeArgs),
    /// Exhaustion on a registered infinite graph.
    Exhaust(ExhaustArgs),
    /// Closed-form and reduced solves on a rooted tree.
    Tree(TreeArgs),
    /// ε-graph convergence study on a Euclidean domain.
    Euclid(EuclidArgs),
    /// List or export the built-in fixtures.
    #[command(subcommand)]
    Fixtures(FixturesCommand),
    /// Re-run a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum Mode {
    GaussSeidel,
    Jacobi,
}

impl From<Mode> for inflap::dirichlet::SweepMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::GaussSeidel => Self::GaussSeidel,
            Mode::Jacobi => Self::Jacobi,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
enum SolveMethod {
    /// Bracketed DPP iteration from the super- and subsolution.
    Dpp,
    /// Exact steepest-path peeling, homogeneous problems only.
    Peel,
}

#[derive(Debug, Args, Serialize)]
struct SolverArgs {
    /// Sweep-change tolerance; the default keeps iteration error below the printed digits.
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Mode::GaussSeidel)]
    mode: Mode,
}

impl SolverArgs {
    fn options(&self) -> inflap::dirichlet::SolverOptions {
        inflap::dirichlet::SolverOptions::default()
            .with_tol(self.tol)
            .with_max_iter(self.max_iter)
            .with_mode(self.mode.into())
    }
}

#[derive(Debug, Args, Serialize)]
struct SolveArgs {
    #[arg(long)]
    graph: PathBuf,
    #[command(flatten)]
    solver: SolverArgs,
    #[arg(long, value_enum, default_value_t = SolveMethod::Dpp)]
    method: SolveMethod,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct CheckArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Field CSV `vertex,depth,value`.
    #[arg(long)]
    field: PathBuf,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    /// Largest radius for the ball condition (default: graph diameter).
    #[arg(long)]
    radius: Option<usize>,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct RegularizeArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    field: PathBuf,
    #[arg(long)]
    eps: f64,
    /// Use `L(u,x) < ε` for the flat set instead of `≤`.
    #[arg(long)]
    strict_flat_set: bool,
    #[arg(long, default_value_t = 1e-9)]
    tol: f64,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct ExhaustArgs {
    /// half-line, half-plane[:period], binary-tree or fig3[:k].
    #[arg(long)]
    oracle: String,
    /// Boundary data: alternating or const:c (default: alternating on the half-plane, else const:0).
    #[arg(long)]
    g: Option<String>,
    /// Comma-separated increasing radii.
    #[arg(long, default_value = "4,8,16,32")]
    radii: String,
    #[arg(long, default_value_t = 4)]
    window_r: usize,
    /// Stabilization tolerance between radii.
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Tolerance of each finite solve.
    #[arg(long, default_value_t = 1e-12)]
    solver_tol: f64,
    #[arg(long, value_enum, default_value_t = Mode::GaussSeidel)]
    mode: Mode,
    /// Keep going after the window stabilizes.
    #[arg(long)]
    no_early_stop: bool,
    /// Also run with the outer cap inf g.
    #[arg(long)]
    lower_bracket: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct TreeArgs {
    /// Graph file with `root i` lines (boundary lines are read as roots when there are none).
    #[arg(long)]
    graph: PathBuf,
    /// Deepest level evaluated (default: the deepest vertex).
    #[arg(long)]
    depth_cap: Option<usize>,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, value_enum, default_value_t = Mode::GaussSeidel)]
    mode: Mode,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
struct EuclidArgs {
    /// square[:x0,y0,x1,y1], annulus[:r_in,r_out], lshape or exterior-disk[:radius,window].
    #[arg(long)]
    domain: String,
    /// Comma-separated ε values.
    #[arg(long, default_value = "0.4,0.2,0.1")]
    eps: String,
    /// Boundary data: const:c, affine:a,b,c, cone[:cx,cy] or aronsson (default: the reference).
    #[arg(long)]
    g: Option<String>,
    /// Reference solution, same names as --g.
    #[arg(long, default_value = "cone")]
    r#ref: String,
    /// `h = ε / h_ratio`.
    #[arg(long, default_value_t = 8.0)]
    h_ratio: f64,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long, default_value_t = 1_000_000)]
    max_iter: usize,
    #[arg(long, value_enum, default_value_t = Mode::GaussSeidel)]
    mode: Mode,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "kebab-case")]
enum FixturesCommand {
    /// Print the fixture names.
    List,
    /// Write a fixture in the graph text format.
    Export(ExportArgs),
}

#[derive(Debug, Args, Serialize)]
struct ExportArgs {
    /// Fixture name, optionally with a parameter (`fig1:8`).
    name: String,
    /// Graph file to write.
    #[arg(long)]
    out: PathBuf,
    /// Also write the fixture's field, when it has one.
    #[arg(long)]
    field: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct ReplayArgs {
    manifest: PathBuf,
    /// Directory for the reproduced outputs.
    #[arg(long)]
    out: PathBuf,
}

/// How a command finished after writing its outputs.
#[derive(Debug)]
pub enum Status {
    Success,
    Convergence(String),
    Property(String),
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Lib(#[from] inflap::Error),
}

impl CliError {
    pub fn io(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
        move |source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> i32 {
        use inflap::Error as E;
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 2,
            CliError::Lib(e) => match e {
                E::NonConvergence { .. } => 3,
                E::PropertyViolation { .. } | E::Precondition { .. } | E::NoSublinearSolution { .. } => 4,
                E::InternalConsistency(_) => 1,
                _ => 2,
            },
        }
    }
}

impl Status {
    fn exit_code(&self) -> i32 {
        match self {
            Status::Success => 0,
            Status::Convergence(_) => 3,
            Status::Property(_) => 4,
        }
    }
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Check(_) => "check",
            Command::Regularize(_) => "regularize",
            Command::Exhaust(_) => "exhaust",
            Command::Tree(_) => "tree",
            Command::Euclid(_) => "euclid",
            Command::Fixtures(FixturesCommand::List) => "fixtures list",
            Command::Fixtures(FixturesCommand::Export(_)) => "fixtures export",
            Command::Replay(_) => "replay",
        }
    }
}

/// Parses `argv` (without the program name), runs it and returns the exit code.
pub fn run(argv: &[String]) -> i32 {
    let cli = match Cli::try_parse_from(std::iter::once("inflap".to_string()).chain(argv.iter().cloned())) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    if let Some(n) = cli.threads {
        // A second call in the same process keeps the first pool.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let start = Instant::now();
    let (mut run, result) = match &cli.command {
        Command::Fixtures(FixturesCommand::List) => {
            for name in inflap::fixtures::NAMES {
                println!("{name}");
            }
            return 0;
        }
        Command::Replay(args) => return commands::replay(args, run_in(&args.out)),
        Command::Solve(a) => with_run(&a.out, |r| commands::solve(a, r)),
        Command::Check(a) => with_run(&a.out, |r| commands::check(a, r)),
        Command::Regularize(a) => with_run(&a.out, |r| commands::regularize(a, r)),
        Command::Exhaust(a) => with_run(&a.out, |r| commands::exhaust(a, r)),
        Command::Tree(a) => with_run(&a.out, |r| commands::tree(a, r)),
        Command::Euclid(a) => with_run(&a.out, |r| commands::euclid(a, r)),
        Command::Fixtures(FixturesCommand::Export(a)) => {
            let dir = a.out.parent().map(Path::to_path_buf).unwrap_or_default();
            let mut run = manifest::Run::in_dir(&dir);
            let mut name = a.out.file_name().unwrap_or_default().to_os_string();
            name.push(".manifest.json");
            run.manifest_path = a.out.with_file_name(name);
            let result = commands::export(a, &mut run);
            (run, result)
        }
    };
    let (code, message) = match &result {
        Ok(Status::Success) => (0, None),
        Ok(s @ (Status::Convergence(m) | Status::Property(m))) => (s.exit_code(), Some(m.clone())),
        Err(e) => (e.exit_code(), Some(e.to_string())),
    };
    if let Some(m) = &message {
        eprintln!("inflap {}: {m}", cli.command.name());
    }
    let manifest = RunManifest {
        format: MANIFEST_FORMAT,
        tool: "inflap".into(),
        version: env!("CARGO_PKG_VERSION").into(),
        subcommand: cli.command.name().into(),
        argv: argv.to_vec(),
        cwd: std::env::current_dir().map(|d| d.display().to_string()).unwrap_or_default(),
        parameters: serde_json::to_value(&cli.command).unwrap_or(serde_json::Value::Null),
        threads: cli.threads,
        inputs: std::mem::take(&mut run.inputs),
        outputs: std::mem::take(&mut run.outputs),
        wall_time_s: start.elapsed().as_secs_f64(),
        exit_code: code,
        message,
    };
    if let Err(e) = write_manifest(&run.manifest_path, &manifest) {
        eprintln!("inflap: cannot write manifest: {e}");
        return code.max(1);
    }
    code
}

fn run_in(out: &Path) -> manifest::Run {
    manifest::Run::in_dir(out)
}

fn with_run(
    out: &Path,
    f: impl FnOnce(&mut manifest::Run) -> Result<Status, CliError>,
) -> (manifest::Run, Result<Status, CliError>) {
    let mut run = manifest::Run::in_dir(out);
    let result = std::fs::create_dir_all(out)
        .map_err(CliError::io(out))
        .and_then(|_| f(&mut run));
    (run, result)
}

fn write_manifest(path: &Path, m: &RunManifest) -> std::io::Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    let text = serde_json::to_string_pretty(m).map_err(std::io::Error::other)?;
    std::fs::write(path, text + "\n")
}

fn main() -> ExitCode {
    let argv: Vec<String> = std::env::args().skip(1).collect();
    ExitCode::from(run(&argv) as u8)
}

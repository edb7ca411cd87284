use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nonlocal_cli::run::{EXIT_PARSE, EXIT_OK};
use nonlocal_cli::{parse_spec, run, Job};

#[derive(Parser)]
#[command(name = "nonlocal", version, about = "Symbols, quadrature and Liouville classification for Levy-type operators")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the symbol at the spec's points, cross-checked by quadrature.
    Symbol(Flags),
    /// Apply the operator to a Gaussian at the spec's points.
    Apply(Flags),
    /// Classify the bounded/polynomially growing solutions of L u + P u = 0.
    Classify(Flags),
    /// Check the kernel hypotheses, the decay bound and an optional candidate.
    Check(Flags),
    /// Compare the discrete Fourier transform of L φ with η φ̂.
    Duality(Flags),
}

#[derive(Args)]
struct Flags {
    /// Operator spec file.
    #[arg(long)]
    spec: PathBuf,
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Override the job tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the grid size (zero-set resolution, duality points, ray points).
    #[arg(long)]
    grid: Option<usize>,
    /// Worker threads for parallel loops.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (job, flags) = match cli.command {
        Command::Symbol(f) => (Job::Symbol, f),
        Command::Apply(f) => (Job::Apply, f),
        Command::Classify(f) => (Job::Classify, f),
        Command::Check(f) => (Job::Check, f),
        Command::Duality(f) => (Job::Duality, f),
    };
    if let Some(n) = flags.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_PARSE);
        }
    }
    let text = match std::fs::read_to_string(&flags.spec) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("error: cannot read {}: {e}", flags.spec.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    let mut spec = match parse_spec(&text) {
        Ok(s) => s,
        Err(e) => {
            eprintln!("{}: {e}", flags.spec.display());
            return ExitCode::from(EXIT_PARSE);
        }
    };
    if spec.job != job {
        eprintln!("note: running `{}` on a spec declaring `{}`", job.name(), spec.job.name());
        spec.job = job;
    }
    if flags.tol.is_some() {
        spec.options.tol = flags.tol;
    }
    if flags.grid.is_some() {
        spec.options.grid = flags.grid;
    }
    let outcome = run(&spec);
    match &flags.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &outcome.report) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(EXIT_PARSE);
            }
        }
        None => print!("{}", outcome.report),
    }
    if outcome.exit_code != EXIT_OK {
        eprintln!("{} exited with status {}", job.name(), outcome.exit_code);
    }
    ExitCode::from(outcome.exit_code)
}

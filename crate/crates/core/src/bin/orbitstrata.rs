use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orbitstrata::io::commands::{
    parse_box, parse_point, run_classify, run_pmatrix, run_probe, run_relations, run_stratum, run_verify,
    CommandError, CommandOutput, RunOptions,
};
use orbitstrata::io::load_problem;
use orbitstrata::strata::DEFAULT_TOL;

#[derive(Parser)]
#[command(name = "orbitstrata", version, about = "Orbit-space strata of finite linear groups")]
struct Cli {
    /// Leave the `timings` object of the report empty.
    #[arg(long, global = true)]
    no_timings: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute and render the P̂-matrix and run the Euler-row check.
    Pmatrix {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Search for relations among the basis up to a weighted degree.
    Relations {
        problem: PathBuf,
        #[arg(long)]
        max_degree: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Parametrize the stratum of a strata job.
    Stratum {
        problem: PathBuf,
        #[arg(long)]
        job: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Divisibility of det P̂ by the candidate factors and checks of every job.
    Verify {
        problem: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Rank of the gradient Gram matrix at a point.
    Classify {
        problem: PathBuf,
        /// Comma-separated coordinates, e.g. "1,1/2,0,rt".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Sample the parameter region and check the rank of the Jacobian.
    Probe {
        problem: PathBuf,
        #[arg(long)]
        job: usize,
        /// "lo:hi" for every parameter or one interval per parameter.
        #[arg(long = "box", allow_hyphen_values = true)]
        bx: String,
        #[arg(long, default_value_t = 10_000)]
        samples: usize,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn emit(out: &CommandOutput, path: Option<&Path>) -> Result<(), CommandError> {
    let text = out.report.to_json_pretty();
    match path {
        Some(p) => std::fs::write(p, text + "\n")
            .map_err(|e| CommandError::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<CommandOutput, CommandError> {
    let opts = RunOptions { timings: !cli.no_timings };
    let (res, out) = match cli.command {
        Command::Pmatrix { problem, out } => (load_problem(&problem).map_err(Into::into).and_then(|p| run_pmatrix(&p, opts)), out),
        Command::Relations { problem, max_degree, out } => (
            load_problem(&problem).map_err(Into::into).and_then(|p| run_relations(&p, max_degree, opts)),
            out,
        ),
        Command::Stratum { problem, job, out } => {
            (load_problem(&problem).map_err(Into::into).and_then(|p| run_stratum(&p, job, opts)), out)
        }
        Command::Verify { problem, out } => (load_problem(&problem).map_err(Into::into).and_then(|p| run_verify(&p, opts)), out),
        Command::Classify { problem, point, tol, out } => (
            load_problem(&problem).map_err(Into::into).and_then(|p| {
                let x = parse_point(&point, p.field_d, p.x_vars().arity())?;
                run_classify(&p, &x, tol, opts)
            }),
            out,
        ),
        Command::Probe { problem, job, bx, samples, seed, out } => (
            load_problem(&problem).map_err(Into::into).and_then(|p| {
                let dim = p
                    .job(job)
                    .map(|j| j.lambda_mib.len())
                    .ok_or_else(|| CommandError::Input(format!("job {job} does not exist")))?;
                let b = parse_box(&bx, dim)?;
                run_probe(&p, job, &b, samples, seed, opts)
            }),
            out,
        ),
    };
    let output = res?;
    emit(&output, out.as_deref())?;
    Ok(output)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(out) => ExitCode::from(out.status.exit_code() as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

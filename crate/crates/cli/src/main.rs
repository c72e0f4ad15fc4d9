//! `bidisc`: JSON in, JSON report out.
//!
//! Exit status 0 means the verdict passed, 1 that it failed or was refused,
//! 2 that the command could not run.

mod commands;
mod grid;
mod input;
mod report;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bidisc_core::numlin::DEFAULT_TOL;

use crate::commands::Context;
use crate::input::Inputs;
use crate::report::{CliError, InputsDigest, Report, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

#[derive(Parser, Debug)]
#[command(name = "bidisc", version, about = "Colligations, inner-function certificates and kernel tests on the bidisc")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Numerical tolerance.
    #[arg(long, global = true, env = "BIDISC_SCHUR_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,
    /// Sample grid, e.g. torus2:64, bidisc:rand:40:seed=7, product:8x8, file:grid.json.
    #[arg(long, global = true)]
    grid: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for random grids that do not carry their own.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate a colligation, rational function, power series or Blaschke product.
    Eval {
        input: PathBuf,
        /// One point as a JSON list of [re, im] pairs; without it the grid is used.
        #[arg(long)]
        point: Option<String>,
    },
    /// Isometric / co-isometric / unitary / contractive, plus block structure.
    Classify { input: PathBuf },
    /// Three-valued innerness certificate.
    InnerCheck { input: PathBuf },
    /// Isometry defect of the truncated Toeplitz matrix.
    ToeplitzCheck {
        input: PathBuf,
        #[arg(long, default_value_t = 16)]
        order: usize,
        #[arg(long, default_value_t = 8)]
        window: usize,
    },
    /// Agler kernels of a co-isometric colligation on the grid.
    AglerKernels { input: PathBuf },
    /// Check an Agler decomposition: a function and two kernels, or one agler-kernels report.
    AglerVerify {
        function: PathBuf,
        #[arg(required = true, num_args = 1..=2)]
        kernels: Vec<PathBuf>,
    },
    /// de Branges-Rovnyak test on the disc, for a kernel or a Theta realization sampled on the grid.
    DbrCheck { kernel: PathBuf },
    /// Positivity of S - K and (1 - z conj(w)) K on the disc.
    DbrNfCheck { kernel: PathBuf },
    /// Realize a de Branges-Rovnyak kernel on the disc.
    DbrReconstruct { kernel: PathBuf },
    /// Certificate check on the polydisc: the kernel, then one component per variable.
    DbrPolydisc {
        kernel: PathBuf,
        #[arg(required = true)]
        components: Vec<PathBuf>,
    },
    /// de Branges-Rovnyak test on the ball.
    DbrBall { kernel: PathBuf },
    /// Factor a colligation or rational inner function into one-variable factors.
    Factor { input: PathBuf },
    /// Cascade two one-variable colligations.
    Compose { first: PathBuf, second: PathBuf },
    /// Split a structured colligation into one-variable factors.
    Split { input: PathBuf },
    /// Model colligation of a finite Blaschke product.
    Model { input: PathBuf },
    /// Remove a monomial factor z_k^p.
    Strip {
        input: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(1..=2))]
        variable: u8,
        /// Truncation order used when the input is a colligation.
        #[arg(long, default_value_t = 16)]
        order: usize,
    },
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Eval { .. } => "eval",
            Command::Classify { .. } => "classify",
            Command::InnerCheck { .. } => "inner-check",
            Command::ToeplitzCheck { .. } => "toeplitz-check",
            Command::AglerKernels { .. } => "agler-kernels",
            Command::AglerVerify { .. } => "agler-verify",
            Command::DbrCheck { .. } => "dbr-check",
            Command::DbrNfCheck { .. } => "dbr-nf-check",
            Command::DbrReconstruct { .. } => "dbr-reconstruct",
            Command::DbrPolydisc { .. } => "dbr-polydisc",
            Command::DbrBall { .. } => "dbr-ball",
            Command::Factor { .. } => "factor",
            Command::Compose { .. } => "compose",
            Command::Split { .. } => "split",
            Command::Model { .. } => "model",
            Command::Strip { .. } => "strip",
        }
    }

    /// Options that change the result and so belong in the digest.
    fn options(&self) -> String {
        match self {
            Command::Eval { point, .. } => format!("point={}", point.as_deref().unwrap_or("")),
            Command::ToeplitzCheck { order, window, .. } => format!("order={order};window={window}"),
            Command::Strip { variable, order, .. } => format!("variable={variable};order={order}"),
            _ => String::new(),
        }
    }
}

fn dispatch(cli: &Cli, ctx: &mut Context) -> commands::CmdResult {
    use commands::*;
    match &cli.command {
        Command::Eval { input, point } => eval(ctx, input, point.as_deref(), cli.seed),
        Command::Classify { input } => classify_cmd(ctx, input),
        Command::InnerCheck { input } => inner_check(ctx, input),
        Command::ToeplitzCheck { input, order, window } => toeplitz_check(ctx, input, *order, *window),
        Command::AglerKernels { input } => agler_kernels(ctx, input, cli.seed),
        Command::AglerVerify { function, kernels } => agler_verify(ctx, function, kernels),
        Command::DbrCheck { kernel } => dbr_check(ctx, kernel, cli.seed),
        Command::DbrNfCheck { kernel } => dbr_nf_check(ctx, kernel, cli.seed),
        Command::DbrReconstruct { kernel } => dbr_reconstruct(ctx, kernel, cli.seed),
        Command::DbrPolydisc { kernel, components } => dbr_polydisc(ctx, kernel, components),
        Command::DbrBall { kernel } => dbr_ball(ctx, kernel),
        Command::Factor { input } => factor(ctx, input),
        Command::Compose { first, second } => compose(ctx, first, second),
        Command::Split { input } => split(ctx, input),
        Command::Model { input } => model(ctx, input),
        Command::Strip { input, variable, order } => strip(ctx, input, *variable, *order),
    }
}

fn run(cli: &Cli) -> (Report, u8) {
    let mut digest = InputsDigest::default();
    digest.add("command", cli.command.name().as_bytes());
    digest.add("tol", cli.tol.to_string().as_bytes());
    digest.add("grid", cli.grid.as_deref().unwrap_or("").as_bytes());
    digest.add("seed", cli.seed.to_string().as_bytes());
    digest.add("options", cli.command.options().as_bytes());

    let result = if !(cli.tol.is_finite() && cli.tol > 0.0) {
        Err(CliError::parse(format!("--tol must be positive, got {}", cli.tol)))
    } else {
        match cli.grid.as_deref().map(|g| grid::parse_grid(g, cli.seed)).transpose() {
            Err(e) => Err(e),
            Ok(grid) => {
                let mut ctx = Context { tol: cli.tol, grid, inputs: Inputs::new(&mut digest) };
                dispatch(cli, &mut ctx)
            }
        }
    };
    let (verdict, evidence, code) = match result {
        Ok(o) => (o.verdict, o.evidence, if o.pass { EXIT_PASS } else { EXIT_FAIL }),
        Err(e) => {
            let evidence = serde_json::json!({ "error": { "name": e.name, "message": e.message } });
            (e.verdict(), evidence, e.exit_code())
        }
    };
    let report =
        Report { command: cli.command.name().into(), inputs_digest: digest.finish(), tol: cli.tol, verdict, evidence };
    (report, code)
}

/// Keys are written in sorted order so that re-serializing a parsed report
/// reproduces it byte for byte.
fn emit(report: &Report, out: Option<&PathBuf>) -> std::io::Result<()> {
    let value = serde_json::to_value(report).map_err(std::io::Error::other)?;
    let mut text = serde_json::to_string_pretty(&value).map_err(std::io::Error::other)?;
    text.push('\n');
    match out {
        Some(path) => std::fs::write(path, text),
        None => std::io::stdout().write_all(text.as_bytes()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (report, code) = run(&cli);
    if let Err(e) = emit(&report, cli.out.as_ref()) {
        eprintln!("bidisc: cannot write report: {e}");
        return ExitCode::from(EXIT_ERROR);
    }
    eprintln!("bidisc {}: {}", report.command, report.verdict);
    ExitCode::from(code)
}

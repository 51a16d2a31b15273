use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use pencilk::C64;
use pencilk_cli::config::parse_shift;
use pencilk_cli::{commands, examples, CliError, Format, Output, Overrides, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "pencilk",
    version,
    about = "Compound matrices, matrix pencils, Drazin inverses and difference-algebraic equations"
)]
struct Cli {
    /// Relative rank threshold (singular values below tol * sigma_max are zero)
    #[arg(long, global = true, value_name = "TOL")]
    tol_rank: Option<f64>,

    /// Relative tolerance for consistency of initial conditions
    #[arg(long, global = true, value_name = "TOL")]
    tol_residual: Option<f64>,

    /// Eigenvalues within this distance of the unit circle are marginal
    #[arg(long, global = true, value_name = "MARGIN")]
    stability_margin: Option<f64>,

    /// Significant digits of printed numbers (1..=17)
    #[arg(long, global = true, env = "PENCILK_PRECISION", value_name = "DIGITS")]
    precision: Option<usize>,

    /// Output format; trajectories default to csv, everything else to json
    #[arg(long, global = true, value_enum)]
    format: Option<FormatArg>,

    /// Shift tried first when regularizing A - lambda B, as `re` or `re,im`;
    /// may be repeated
    #[arg(long, global = true, value_name = "LAMBDA", value_parser = parse_shift, allow_hyphen_values = true)]
    shift: Vec<C64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print the k-th multiplicative compound of a matrix
    Compound {
        matrix: PathBuf,
        #[arg(long)]
        k: usize,
    },
    /// Generalized eigenvalues of the pencil (A, B), optionally of its k-compound
    PencilEig {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Drazin index and Drazin inverse
    Drazin { matrix: PathBuf },
    /// Tractability, consistent subspace, spectrum and stability of B x(j+1) = A x(j)
    DaeAnalyze {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        k: Option<usize>,
    },
    /// Propagate a consistent initial condition
    DaeSolve {
        a: PathBuf,
        b: PathBuf,
        x0: PathBuf,
        #[arg(long)]
        steps: usize,
    },
    /// Track the k-compound of a bundle of k solutions
    DaeVolume {
        a: PathBuf,
        b: PathBuf,
        /// n x k matrix whose columns are the initial conditions
        x0cols: PathBuf,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        steps: usize,
    },
    /// Reproduce a bundled example: periodic, leslie or singular
    Examples {
        name: String,
        /// Output directory [default: pencilk-<name>]
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        steps: Option<usize>,
    },
}

fn run(cli: Cli) -> Result<Output, CliError> {
    let cfg = RunConfig::from_overrides(&Overrides {
        rank_tol: cli.tol_rank,
        residual_tol: cli.tol_residual,
        stability_margin: cli.stability_margin,
        shifts: cli.shift,
        precision: cli.precision,
        format: cli.format.map(|f| match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }),
    })?;
    match cli.command {
        Command::Compound { matrix, k } => commands::compound(&cfg, &matrix, k),
        Command::PencilEig { a, b, k } => commands::pencil_eig(&cfg, &a, &b, k),
        Command::Drazin { matrix } => commands::drazin(&cfg, &matrix),
        Command::DaeAnalyze { a, b, k } => commands::dae_analyze(&cfg, &a, &b, k),
        Command::DaeSolve { a, b, x0, steps } => commands::dae_solve(&cfg, &a, &b, &x0, steps),
        Command::DaeVolume {
            a,
            b,
            x0cols,
            k,
            steps,
        } => commands::dae_volume(&cfg, &a, &b, &x0cols, k, steps),
        Command::Examples { name, out, steps } => {
            if !examples::NAMES.contains(&name.as_str()) {
                return Err(CliError::UnknownExample(name));
            }
            let dir = out.unwrap_or_else(|| PathBuf::from(format!("pencilk-{name}")));
            let r = examples::run(&cfg, &name, &dir, steps)?;
            let notes = if r.all_pass() {
                Vec::new()
            } else {
                r.checks
                    .iter()
                    .filter(|c| !c.pass)
                    .map(|c| {
                        format!(
                            "check failed: {} (error {:e}, tolerance {:e})",
                            c.name, c.error, c.tolerance
                        )
                    })
                    .collect()
            };
            Ok(Output {
                stdout: r.summary(&cfg),
                notes,
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(out) => {
            print!("{}", out.stdout);
            for note in out.notes {
                eprintln!("{note}");
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

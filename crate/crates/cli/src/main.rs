//! Command-line surface of the jet-space symmetry workbench.
//!
//! Every command prints one deterministic JSON (or CSV) report to
//! standard output. Exit codes: 0 success, 2 parse failure, 3 validation
//! failure, 4 budget exceeded, 5 property violation, 1 anything else.
//!
//! Model files are read from a path or from standard input with `-`.
//! The environment variables `JETKT_MAX_WEIGHT` and `JETKT_MAX_TPOW`
//! override the canonicalization budgets of the symbolic bracket engine.

use clap::{Parser, Subcommand, ValueEnum};
use jetkt::commands::{run_command, Command as WorkCommand};
use jetkt::ktcomplex::Preset;
use jetkt::modelio::CmdError;
use std::io::Read;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "jetkt", version, about = "exact workbench for jet-space symmetry algebras")]
struct Cli {
    /// Output format for the report
    #[arg(long, global = true, default_value = "json")]
    format: Format,
    #[command(subcommand)]
    command: CliCommand,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum PresetArg {
    Auxiliary,
    Harmonic,
    FreeScalar,
    ToyU1,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Preset {
        match p {
            PresetArg::Auxiliary => Preset::Auxiliary,
            PresetArg::Harmonic => Preset::Harmonic,
            PresetArg::FreeScalar => Preset::FreeScalar,
            PresetArg::ToyU1 => Preset::ToyU1,
        }
    }
}

#[derive(Subcommand)]
enum CliCommand {
    /// Verify the binomial reduction identities over a sweep
    Np1 {
        #[arg(long, default_value_t = 6)]
        max_n: u32,
        #[arg(long, default_value_t = 20)]
        max_p: u32,
    },
    /// Total abelian charges of a model file
    Charges {
        /// model file path, or `-` for standard input
        #[arg(long)]
        model: String,
    },
    /// Large-truncation expansion of a model's charges
    Asymptotics {
        #[arg(long)]
        model: String,
    },
    /// Scan field contents against the finiteness condition
    Scan {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 8)]
        max_dim: u32,
    },
    /// Verify the summed supertrace lemmas and composition identities
    VerifyTraces {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        samples: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 2)]
        degree: u32,
    },
    /// Verify the cyclic bracket identity with symbolic charges
    Jacobi {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 3)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        modes: i64,
        #[arg(long, default_value_t = 12)]
        samples: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Verify the gauge-fixed bracket and the restricted central charge
    Dirac {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        degree: u32,
        #[arg(long, default_value_t = 3)]
        samples: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Cross-check commutator anomalies against supertrace sums
    FockAnomaly {
        #[arg(long, default_value_t = 2)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        p: u32,
        #[arg(long, default_value_t = 10)]
        samples: u32,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        #[arg(long, default_value_t = 3)]
        max_mode: i64,
    },
    /// Measure the central charge of a free weighted system
    Virasoro {
        /// comma-separated `lambda:parity:multiplicity` entries
        #[arg(long, default_value = "0:b:1")]
        pairs: String,
        #[arg(long, default_value_t = 3)]
        cutoff: i64,
    },
    /// Build a toy complex, check nilpotency and report cohomology
    Kt {
        #[arg(long, value_enum)]
        preset: PresetArg,
        #[arg(long, default_value_t = 3)]
        p: u32,
        #[arg(long, default_value_t = 2)]
        degree: usize,
        #[arg(long)]
        longitudinal: bool,
        #[arg(long)]
        compat: bool,
        /// use the first (undressed) longitudinal variant
        #[arg(long)]
        dd1: bool,
        #[arg(long)]
        geodesic: bool,
        #[arg(long)]
        noether: bool,
    },
}

fn read_model(path: &str) -> Result<String, CmdError> {
    if path == "-" {
        let mut buf = String::new();
        std::io::stdin()
            .read_to_string(&mut buf)
            .map_err(|e| CmdError::Other(format!("reading standard input: {e}")))?;
        Ok(buf)
    } else {
        std::fs::read_to_string(path)
            .map_err(|e| CmdError::Other(format!("reading {path}: {e}")))
    }
}

fn to_work_command(cli: &CliCommand) -> Result<WorkCommand, CmdError> {
    Ok(match cli {
        CliCommand::Np1 { max_n, max_p } => WorkCommand::Np1 { max_n: *max_n, max_p: *max_p },
        CliCommand::Charges { model } => WorkCommand::Charges { model: read_model(model)? },
        CliCommand::Asymptotics { model } => {
            WorkCommand::Asymptotics { model: read_model(model)? }
        }
        CliCommand::Scan { n, max_dim } => WorkCommand::Scan { n: *n, max_dim: *max_dim },
        CliCommand::VerifyTraces { n, p, samples, seed, degree } => WorkCommand::VerifyTraces {
            n: *n,
            p: *p,
            samples: *samples,
            seed: *seed,
            degree: *degree,
        },
        CliCommand::Jacobi { n, degree, modes, samples, seed } => WorkCommand::Jacobi {
            n: *n,
            degree: *degree,
            modes: *modes,
            samples: *samples,
            seed: *seed,
        },
        CliCommand::Dirac { n, degree, samples, seed } => {
            WorkCommand::Dirac { n: *n, degree: *degree, samples: *samples, seed: *seed }
        }
        CliCommand::FockAnomaly { n, p, samples, seed, max_mode } => WorkCommand::FockAnomaly {
            n: *n,
            p: *p,
            samples: *samples,
            seed: *seed,
            max_mode: *max_mode,
        },
        CliCommand::Virasoro { pairs, cutoff } => {
            WorkCommand::Virasoro { pairs: pairs.clone(), cutoff: *cutoff }
        }
        CliCommand::Kt { preset, p, degree, longitudinal, compat, dd1, geodesic, noether } => {
            WorkCommand::Kt {
                preset: (*preset).into(),
                p: *p,
                degree: *degree,
                longitudinal: *longitudinal,
                compat: *compat,
                dd1: *dd1,
                geodesic: *geodesic,
                noether: *noether,
            }
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let work = match to_work_command(&cli.command) {
        Ok(w) => w,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run_command(&work) {
        Ok(report) => {
            match cli.format {
                Format::Json => println!("{}", report.to_json()),
                Format::Csv => print!("{}", report.to_csv()),
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

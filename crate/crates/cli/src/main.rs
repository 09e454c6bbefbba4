use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use wavepart_cli::commands::{self, Family, TheoryState, Via};
use wavepart_cli::histfile::HistogramFile;
use wavepart_cli::json::to_json;
use wavepart_cli::{read_file, write_output, CliError};
use wavepart_core::fock::DEFAULT_TAU;
use wavepart_core::witness::tmsv_q_for_mean_total;
use wavepart_core::Complex64;

/// Wave and particle nonclassicality witnesses for two-mode interference.
#[derive(Parser)]
#[command(name = "wavepart", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum StateArg {
    Vacuum,
    Coherent,
    Fock,
    Tmsv,
}

#[derive(Clone, Copy, ValueEnum)]
enum ViaArg {
    Analytic,
    Pipeline,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    Coherent,
    Fock,
    /// TMSV parametrized by `q`.
    TmsvQ,
    /// TMSV parametrized by detected mean photon number.
    Tmsv,
}

#[derive(Subcommand)]
enum Command {
    /// Witness values from closed forms or the exact Fock pipeline.
    Theory {
        #[arg(long, value_enum)]
        state: StateArg,
        #[arg(long, value_enum, default_value = "analytic")]
        via: ViaArg,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long, default_value_t = 0.0)]
        theta: f64,
        /// TMSV squeezing parameter tanh^2 r.
        #[arg(long, conflicts_with = "mean_total")]
        q: Option<f64>,
        /// TMSV detected total mean photon number.
        #[arg(long)]
        mean_total: Option<f64>,
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.0)]
        alpha_im: f64,
        #[arg(long, default_value_t = 0.0)]
        beta: f64,
        #[arg(long, default_value_t = 0.0)]
        beta_im: f64,
        #[arg(long, default_value_t = 0)]
        m: u64,
        #[arg(long, default_value_t = 0)]
        n: u64,
    },
    /// Simulate a configured experiment and write a histogram file.
    Simulate {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads; results do not depend on this.
        #[arg(long)]
        threads: Option<usize>,
    },
    /// Analyze a histogram file into a JSON report.
    Analyze {
        #[arg(long)]
        hist: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_TAU)]
        tau: f64,
    },
    /// Theory curves along a parameter family, as CSV.
    Sweep {
        #[arg(long, value_enum)]
        family: FamilyArg,
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        /// Grid points (ignored for fock, which steps by one).
        #[arg(long, default_value_t = 21)]
        steps: usize,
        #[arg(long, default_value_t = 1.0)]
        eta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Theory {
            state,
            via,
            eta,
            theta,
            q,
            mean_total,
            alpha,
            alpha_im,
            beta,
            beta_im,
            m,
            n,
        } => {
            let state = match state {
                StateArg::Vacuum => TheoryState::Vacuum,
                StateArg::Coherent => TheoryState::Coherent {
                    alpha: Complex64::new(alpha, alpha_im),
                    beta: Complex64::new(beta, beta_im),
                },
                StateArg::Fock => TheoryState::Fock { m, n },
                StateArg::Tmsv => {
                    let q = match (q, mean_total) {
                        (Some(q), _) => q,
                        (None, Some(mt)) => tmsv_q_for_mean_total(mt, eta)?,
                        (None, None) => {
                            return Err(CliError::Input("tmsv needs --q or --mean-total".into()))
                        }
                    };
                    TheoryState::Tmsv { q }
                }
            };
            let via = match via {
                ViaArg::Analytic => Via::Analytic,
                ViaArg::Pipeline => Via::Pipeline,
            };
            let out = commands::theory(state, theta, eta, via)?;
            write_output(None, &to_json(&out))
        }
        Command::Simulate {
            config,
            out,
            threads,
        } => {
            let file = match threads {
                Some(t) => rayon::ThreadPoolBuilder::new()
                    .num_threads(t)
                    .build()
                    .map_err(|e| CliError::Input(format!("thread pool: {e}")))?
                    .install(|| commands::simulate_path(&config))?,
                None => commands::simulate_path(&config)?,
            };
            write_output(out.as_deref(), &file.render())
        }
        Command::Analyze { hist, out, tau } => {
            let file = HistogramFile::parse(&read_file(&hist)?)?;
            let report = commands::analyze(&file, tau)?;
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            write_output(out.as_deref(), &to_json(&report))
        }
        Command::Sweep {
            family,
            from,
            to,
            steps,
            eta,
            out,
        } => {
            let family = match family {
                FamilyArg::Coherent => Family::Coherent,
                FamilyArg::Fock => Family::Fock,
                FamilyArg::TmsvQ => Family::TmsvQ,
                FamilyArg::Tmsv => Family::TmsvMeanTotal,
            };
            let csv = commands::sweep(family, from, to, steps, eta)?;
            write_output(out.as_deref(), &csv)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

//! Command-line front end: generate instances to files, solve from
//! files, and run benchmark sweeps.
//!
//! Exit codes: 0 on success/convergence, 1 on numerical failure,
//! 2 on input or format errors.

use clap::{Parser, Subcommand, ValueEnum};
use mtensor_solve::bench::{run_bench, to_csv, to_json, to_table, BenchRecord};
use mtensor_solve::error::Error;
use mtensor_solve::homotopy::{track, TrackStatus, TrackerConfig};
use mtensor_solve::io::{read_tensor, read_vector, write_tensor, write_vector};
use mtensor_solve::mtensor::{generate_instance, GeneratorConfig};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "mtensor-solve",
    about = "Positive solutions of multilinear systems with nonsingular M-tensors"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ReportFormat {
    Csv,
    Json,
    Table,
}

#[derive(clap::Args, Debug)]
struct TrackerFlags {
    /// Initial predictor stepsize
    #[arg(long = "h-init", default_value_t = 0.2)]
    h_init: f64,
    /// Per-step Newton residual tolerance
    #[arg(long = "newton-tol", default_value_t = 1e-10)]
    newton_tol: f64,
    /// Termination residue of the scaled system
    #[arg(long = "final-tol", default_value_t = 1e-12)]
    final_tol: f64,
}

impl TrackerFlags {
    fn to_config(&self) -> TrackerConfig {
        TrackerConfig {
            h_init: self.h_init,
            newton_tol: self.newton_tol,
            final_tol: self.final_tol,
            ..TrackerConfig::default()
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Generate a random M-tensor instance and write it to files
    Generate {
        /// Tensor order m
        #[arg(short = 'm', long = "order")]
        order: usize,
        /// Tensor dimension n
        #[arg(short = 'n', long = "dim")]
        dim: usize,
        /// Diagonal dominance margin: s = (1+epsilon) * max row sum
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// RNG seed
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Output prefix; writes <prefix>.tensor and <prefix>.rhs
        out_prefix: String,
    },
    /// Solve A x^{m-1} = b from tensor and right-side files
    Solve {
        tensor_path: PathBuf,
        rhs_path: PathBuf,
        #[command(flatten)]
        tracker: TrackerFlags,
    },
    /// Generate-and-solve sweeps over sizes and seeds
    Bench {
        /// Comma-separated sizes, e.g. 3x10,3x50,4x10
        #[arg(long, value_delimiter = ',')]
        sizes: Vec<String>,
        #[arg(long, default_value_t = 0.01)]
        epsilon: f64,
        /// Comma-separated seeds
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,4,5")]
        seeds: Vec<u64>,
        /// Report file; prints to stdout when omitted
        #[arg(long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = ReportFormat::Table)]
        format: ReportFormat,
        #[command(flatten)]
        tracker: TrackerFlags,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e {
                Error::Format { .. } | Error::InvalidArgument(_) | Error::Io(_) => 2,
                Error::DimensionMismatch { .. } | Error::Domain(_) => 2,
                Error::SingularMatrix { .. } => 1,
            };
            ExitCode::from(code)
        }
    }
}

fn run(cmd: Command) -> mtensor_solve::Result<ExitCode> {
    match cmd {
        Command::Generate {
            order,
            dim,
            epsilon,
            seed,
            out_prefix,
        } => {
            let inst = generate_instance(&GeneratorConfig {
                order,
                dim,
                epsilon,
                seed,
            })?;
            let tensor_path = PathBuf::from(format!("{out_prefix}.tensor"));
            let rhs_path = PathBuf::from(format!("{out_prefix}.rhs"));
            write_tensor(&tensor_path, &inst.a)?;
            write_vector(&rhs_path, &inst.b)?;
            println!(
                "wrote {} and {}",
                tensor_path.display(),
                rhs_path.display()
            );
            Ok(ExitCode::SUCCESS)
        }
        Command::Solve {
            tensor_path,
            rhs_path,
            tracker,
        } => {
            let a = read_tensor(&tensor_path)?;
            let b = read_vector(&rhs_path)?;
            let (m, n) = (a.order(), a.dim());
            let start = std::time::Instant::now();
            let r = track(a, b, &tracker.to_config())?;
            let record = BenchRecord {
                m,
                n,
                seed: 0,
                euitr: r.euitr,
                nwitr: r.nwitr,
                time_seconds: start.elapsed().as_secs_f64(),
                residue_orig: r.residue_orig,
                residue_scaled: r.residue_scaled,
                status: r.status.to_string(),
            };
            println!("x: {:?}", r.x);
            println!("{}", serde_json::to_string(&record).expect("record serializes"));
            if r.status == TrackStatus::Converged {
                Ok(ExitCode::SUCCESS)
            } else {
                eprintln!("did not converge: status {}", r.status);
                Ok(ExitCode::from(1))
            }
        }
        Command::Bench {
            sizes,
            epsilon,
            seeds,
            output,
            format,
            tracker,
        } => {
            let sizes = parse_sizes(&sizes)?;
            let records = run_bench(&sizes, epsilon, &seeds, &tracker.to_config());
            let rendered = match format {
                ReportFormat::Csv => to_csv(&records)?,
                ReportFormat::Json => to_json(&records),
                ReportFormat::Table => to_table(&records),
            };
            match output {
                Some(path) => {
                    std::fs::write(&path, rendered)?;
                    // keep a readable summary on stdout regardless
                    print!("{}", to_table(&records));
                }
                None => print!("{rendered}"),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn parse_sizes(sizes: &[String]) -> mtensor_solve::Result<Vec<(usize, usize)>> {
    sizes
        .iter()
        .filter(|s| !s.is_empty())
        .map(|s| {
            let (m, n) = s.split_once('x').ok_or_else(|| {
                Error::InvalidArgument(format!("size '{s}' is not of the form MxN"))
            })?;
            let m = m
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad order in size '{s}'")))?;
            let n = n
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad dim in size '{s}'")))?;
            Ok((m, n))
        })
        .collect()
}

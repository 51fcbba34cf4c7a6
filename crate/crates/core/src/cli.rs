//! `vqpm` command line: `gen`, `solve`, `spectrum`, `sweep`.
//!
//! Exit codes: 0 success, 2 invalid arguments or input, 3 I/O failure,
//! 4 degenerate (all-zero) problem, 5 capacity exceeded. Results go to
//! stdout, diagnostics to stderr.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::{Result, VqpmError};
use crate::experiments::{aggregate, emit_aggregates_csv, emit_instances_csv, emit_trace_csv, run_sweep, SweepConfig};
use crate::qubo::{generate_random, parse_problem, scale_problem, serialize_problem, Bitstring, QuboInstance, MAX_ENUMERATION_QUBITS};
use crate::spectrum::{build_oracle, eigengap};
use crate::vqpm::{run, Mode, VqpmConfig};

/// Largest `n` accepted by `spectrum`.
pub const LISTING_LIMIT: usize = 16;

pub const EXIT_OK: i32 = 0;
pub const EXIT_ARGS: i32 = 2;
pub const EXIT_IO: i32 = 3;
pub const EXIT_DEGENERATE: i32 = 4;
pub const EXIT_CAPACITY: i32 = 5;

#[derive(Parser, Debug)]
#[command(name = "vqpm", version, about = "Variational quantum power method for QUBO problems")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ModeArg {
    Variational,
    Exact,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Variational => Mode::Variational,
            ModeArg::Exact => Mode::Exact,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a random problem file.
    Gen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve a problem file.
    Solve {
        #[arg(long)]
        problem: PathBuf,
        #[arg(long, default_value_t = 1e-4)]
        gamma: f64,
        #[arg(long, default_value_t = 1e-3)]
        pdiff: f64,
        #[arg(long = "max-iters", default_value_t = 100)]
        max_iters: usize,
        #[arg(long, value_enum, default_value = "variational")]
        mode: ModeArg,
        /// Write the per-iteration trace as CSV.
        #[arg(long = "trace-out")]
        trace_out: Option<PathBuf>,
    },
    /// List every bitstring with its objective and shifted eigenphase.
    Spectrum {
        #[arg(long)]
        problem: PathBuf,
    },
    /// Random-instance sweep over a range of sizes.
    Sweep {
        #[arg(long = "n-min")]
        n_min: usize,
        #[arg(long = "n-max")]
        n_max: usize,
        #[arg(long, default_value_t = 50)]
        instances: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "out-dir")]
        out_dir: PathBuf,
    },
}

pub fn exit_code(e: &VqpmError) -> i32 {
    match e {
        VqpmError::Argument(_) | VqpmError::Parse(_) | VqpmError::Dimension { .. } => EXIT_ARGS,
        VqpmError::Io { .. } => EXIT_IO,
        VqpmError::DegenerateProblem => EXIT_DEGENERATE,
        VqpmError::Capacity { .. } => EXIT_CAPACITY,
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn main_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ARGS } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn write_out(out: &mut dyn Write, text: std::fmt::Arguments<'_>) -> Result<()> {
    out.write_fmt(text).map_err(|e| VqpmError::io("<stdout>", e))
}

fn read_problem(path: &Path) -> Result<QuboInstance> {
    let text = std::fs::read_to_string(path).map_err(|e| VqpmError::io(path, e))?;
    parse_problem(&text)
}

fn threads_from_env() -> Option<usize> {
    std::env::var("VQPM_THREADS").ok()?.trim().parse().ok()
}

pub fn execute(command: Command, out: &mut dyn Write) -> Result<()> {
    match command {
        Command::Gen { n, seed, out: path } => {
            let p = generate_random(n as usize, seed)?;
            std::fs::write(&path, serialize_problem(&p)).map_err(|e| VqpmError::io(&path, e))
        }
        Command::Solve {
            problem,
            gamma,
            pdiff,
            max_iters,
            mode,
            trace_out,
        } => {
            let cfg = VqpmConfig {
                gamma,
                p_diff: pdiff,
                max_iters,
                mode: mode.into(),
                ..VqpmConfig::default()
            };
            cfg.validate()?;
            let p = read_problem(&problem)?;
            let s = scale_problem(&p)?;
            if s.n() > MAX_ENUMERATION_QUBITS {
                return Err(VqpmError::Capacity {
                    n: s.n(),
                    limit: MAX_ENUMERATION_QUBITS,
                });
            }
            let r = run(&s, &cfg, None)?;
            let phase = s.base.objective(&r.found)? + s.phase_shift;
            write_out(out, format_args!("{}  {:.5}  {:.5}\n", r.found, r.found_objective, phase))?;
            write_out(out, format_args!("iterations  {}\n", r.iterations))?;
            write_out(out, format_args!("termination  {}\n", r.termination))?;
            if let Some(path) = trace_out {
                emit_trace_csv(&r.trace, &path)?;
            }
            Ok(())
        }
        Command::Spectrum { problem } => {
            let p = read_problem(&problem)?;
            if p.n() > LISTING_LIMIT {
                return Err(VqpmError::Capacity {
                    n: p.n(),
                    limit: LISTING_LIMIT,
                });
            }
            let s = scale_problem(&p)?;
            let oracle = build_oracle(&s)?;
            write_out(out, format_args!("x  y  y_scaled  phase_shifted\n"))?;
            for index in 0..1usize << p.n() {
                let x = Bitstring::from_index(p.n(), index);
                write_out(
                    out,
                    format_args!(
                        "{}  {:.5}  {:.5}  {:.5}\n",
                        x,
                        p.objective(&x)?,
                        s.base.objective(&x)?,
                        oracle.phases()[index]
                    ),
                )?;
            }
            write_out(out, format_args!("eigengap  {:.5}\n", eigengap(&oracle)))
        }
        Command::Sweep {
            n_min,
            n_max,
            instances,
            seed,
            out_dir,
        } => {
            let cfg = SweepConfig {
                output_dir: Some(out_dir.clone()),
                ..SweepConfig::new(n_min, n_max, instances, seed)
            };
            cfg.validate()?;
            std::fs::create_dir_all(&out_dir).map_err(|e| VqpmError::io(&out_dir, e))?;
            let records = crate::par::with_threads(threads_from_env(), || run_sweep(&cfg))?;
            let aggregates = aggregate(&records)?;
            emit_instances_csv(&records, &out_dir.join("instances.csv"))?;
            emit_aggregates_csv(&aggregates, &out_dir.join("aggregate.csv"))?;
            let cell = |v: Option<f64>| v.map(|x| format!("{x:.5}")).unwrap_or_else(|| "-".into());
            for a in &aggregates {
                write_out(
                    out,
                    format_args!(
                        "n={}  mean_iterations={:.5}  mean_eigengap={:.5}  exact={}/{}  mean_abs_error_nonexact={}  mean_hamming_nonexact={}\n",
                        a.n,
                        a.mean_iterations,
                        a.mean_eigengap,
                        a.exact_count,
                        instances,
                        cell(a.mean_abs_error_nonexact),
                        cell(a.mean_hamming_nonexact),
                    ),
                )?;
            }
            Ok(())
        }
    }
}

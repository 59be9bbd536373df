//! Argument parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};

use crate::commands::{self, CliError, FindArgs, MemoryArgs, Output, VerifyArgs};

#[derive(Debug, Parser)]
#[command(
    name = "graphqec",
    version,
    about = "Qudit graph codes: certification, verification and memory simulation"
)]
pub struct Cli {
    /// Print the report as JSON.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Add wall time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SuiteArg {
    Kl,
    Thm1,
    Encode,
    Syndrome,
    Measure,
    Decode,
    All,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RoleArg {
    Encoder,
    Syndrome,
    Decoder,
    Decoder5,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check admissibility, the t-error-correcting condition and Knill–Laflamme.
    CheckGraph {
        /// Graph document.
        graph: PathBuf,
        /// Expected field order; the graph's own `d` must match.
        #[arg(long)]
        d: Option<u32>,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Largest accepted deviation.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Seeded search for a t-error-correcting graph.
    FindGraph {
        /// Field order (prime).
        #[arg(long)]
        d: u32,
        /// Number of input vertices.
        #[arg(long, default_value_t = 1)]
        inputs: usize,
        /// Number of output vertices.
        #[arg(long)]
        outputs: usize,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Search seed.
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Largest number of candidate graphs examined.
        #[arg(long, default_value_t = 200_000)]
        budget: u64,
        /// Write the graph here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the syndrome table and export the scheme.
    BuildScheme {
        /// Graph document.
        graph: PathBuf,
        /// Expected field order; the graph's own `d` must match.
        #[arg(long)]
        d: Option<u32>,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Write the scheme here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run channel-identity checks.
    Verify {
        /// Graph document.
        graph: PathBuf,
        /// Expected field order; the graph's own `d` must match.
        #[arg(long)]
        d: Option<u32>,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Check group to run.
        #[arg(long, value_enum, default_value_t = SuiteArg::All)]
        suite: SuiteArg,
        /// Largest accepted deviation.
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
        /// Noise document for the thm1 suite; replaces the built-in noise set.
        #[arg(long)]
        noise: Option<PathBuf>,
        /// Random noise channels for the thm1 suite.
        #[arg(long, default_value_t = 100)]
        random_noise: usize,
        /// Seed for the random noise channels.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Emit a one-way measurement pattern.
    EmitProgram {
        /// Graph document.
        graph: PathBuf,
        /// Expected field order; the graph's own `d` must match.
        #[arg(long)]
        d: Option<u32>,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Program to emit.
        #[arg(long, value_enum)]
        role: RoleArg,
        /// Write the pattern here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Repeated decode/re-encode under depolarizing decay.
    SimulateMemory {
        /// Graph document.
        graph: PathBuf,
        /// Expected field order; the graph's own `d` must match.
        #[arg(long)]
        d: Option<u32>,
        /// Number of correctable errors.
        #[arg(long, default_value_t = 1)]
        t: usize,
        /// Per-site decay rate.
        #[arg(long)]
        lambda: f64,
        /// Duration of one cycle.
        #[arg(long, default_value_t = 1.0)]
        cycle_time: f64,
        /// Number of cycles.
        #[arg(long, default_value_t = 5)]
        cycles: usize,
        /// Distance bound for the residuals and the decoherence time.
        #[arg(long, default_value_t = 1e-2)]
        threshold: f64,
        /// Keep only errors of weight at most one.
        #[arg(long)]
        truncated: bool,
        /// Cycle times for the storing-time scan, comma separated.
        #[arg(long, value_delimiter = ',')]
        scan: Vec<f64>,
        /// Largest cycle count tried per scanned cycle time.
        #[arg(long, default_value_t = 20)]
        max_cycles: usize,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn dispatch(command: &Command) -> Result<(Output, Option<&Path>), CliError> {
    Ok(match command {
        Command::CheckGraph {
            graph,
            d,
            t,
            tolerance,
        } => (
            commands::check_graph(&read(graph)?, *d, *t, *tolerance)?,
            None,
        ),
        Command::FindGraph {
            d,
            inputs,
            outputs,
            t,
            seed,
            budget,
            out,
        } => (
            commands::find_graph(FindArgs {
                d: *d,
                inputs: *inputs,
                outputs: *outputs,
                t: *t,
                seed: *seed,
                budget: *budget,
            })?,
            out.as_deref(),
        ),
        Command::BuildScheme { graph, d, t, out } => (
            commands::build_scheme(&read(graph)?, *d, *t)?,
            out.as_deref(),
        ),
        Command::Verify {
            graph,
            d,
            t,
            suite,
            tolerance,
            noise,
            random_noise,
            seed,
        } => {
            let noise_text = noise.as_deref().map(read).transpose()?;
            let suite = match suite {
                SuiteArg::Kl => commands::Suite::Kl,
                SuiteArg::Thm1 => commands::Suite::Thm1,
                SuiteArg::Encode => commands::Suite::Encode,
                SuiteArg::Syndrome => commands::Suite::Syndrome,
                SuiteArg::Measure => commands::Suite::Measure,
                SuiteArg::Decode => commands::Suite::Decode,
                SuiteArg::All => commands::Suite::All,
            };
            let args = VerifyArgs {
                t: *t,
                d: *d,
                suite,
                tolerance: *tolerance,
                random_noise: *random_noise,
                seed: *seed,
            };
            (
                commands::verify(&read(graph)?, noise_text.as_deref(), &args)?,
                None,
            )
        }
        Command::EmitProgram {
            graph,
            d,
            t,
            role,
            out,
        } => {
            let role = match role {
                RoleArg::Encoder => commands::Role::Encoder,
                RoleArg::Syndrome => commands::Role::Syndrome,
                RoleArg::Decoder => commands::Role::Decoder,
                RoleArg::Decoder5 => commands::Role::Decoder5,
            };
            (commands::emit(&read(graph)?, *d, *t, role)?, out.as_deref())
        }
        Command::SimulateMemory {
            graph,
            d,
            t,
            lambda,
            cycle_time,
            cycles,
            threshold,
            truncated,
            scan,
            max_cycles,
        } => {
            let args = MemoryArgs {
                t: *t,
                d: *d,
                lambda: *lambda,
                cycle_time: *cycle_time,
                cycles: *cycles,
                threshold: *threshold,
                truncated: *truncated,
                scan: scan.clone(),
                max_cycles: *max_cycles,
            };
            (commands::memory(&read(graph)?, &args)?, None)
        }
    })
}

/// Runs a parsed command line, writing to `stdout`/`stderr`; returns the
/// exit code (0 pass, 1 failed check, 2 usage, parse or rejected input).
pub fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    let start = Instant::now();
    let result = match cli.threads {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| dispatch(&cli.command)),
            Err(e) => Err(CliError::Usage(e.to_string())),
        },
        None => dispatch(&cli.command),
    };
    let (mut output, out_path) = match result {
        Ok(r) => r,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            return e.exit_code();
        }
    };
    if cli.timing {
        output.report.wall_time_s = Some(start.elapsed().as_secs_f64());
    }
    let rendered = if cli.json {
        output.report.to_json()
    } else {
        output.report.to_text()
    };
    match (&output.document, out_path) {
        (Some(doc), Some(path)) => {
            if let Err(e) = write(path, doc) {
                let _ = writeln!(stderr, "error: {e}");
                return e.exit_code();
            }
            let _ = stdout.write_all(rendered.as_bytes());
        }
        (Some(doc), None) => {
            let _ = stdout.write_all(doc.as_bytes());
            let _ = stderr.write_all(rendered.as_bytes());
        }
        (None, _) => {
            let _ = stdout.write_all(rendered.as_bytes());
        }
    }
    if output.report.pass {
        0
    } else {
        1
    }
}

/// Parses `args` and runs; clap usage errors exit with code 2.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(&cli, stdout, stderr),
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                2
            } else {
                let _ = write!(stdout, "{e}");
                0
            }
        }
    }
}

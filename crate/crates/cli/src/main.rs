mod args;

use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;
use stqp_core::oracle::brute_force_stqp;
use stqp_core::stats::{
    moment_closed_form, moment_mc, moment_quadrature, simulate, tail_condition_report,
    MomentReport, SimulateOptions, TailReport,
};
use stqp_core::{sample_matrix, solve, EnsembleEcho, Error, Exec, SolveOptions, SymmetricMatrix};

use args::{parse_grid, positive, positive_u64, EnsembleArgs, Grid};

const EXIT_UNCERTIFIED: u8 = 3;
const EXIT_USAGE: u8 = 2;
const EXIT_CAPACITY: u8 = 4;
const EXIT_NUMERIC: u8 = 1;

#[derive(Debug, Parser)]
#[command(
    name = "stqp",
    version,
    about = "Exact standard quadratic programs on random instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a matrix and write it in the text format.
    Generate {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Solve an instance read from `--input` or generated inline.
    Solve {
        #[arg(long, conflicts_with_all = ["ensemble", "n", "seed"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_parser = positive)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 25, value_parser = positive)]
        support_cap: usize,
    },
    /// Monte Carlo over full instances.
    Simulate {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_parser = positive)]
        n: usize,
        #[arg(long, value_parser = positive_u64)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = positive)]
        threads: Option<usize>,
        /// JSON-lines file receiving one record per trial.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also solve every trial.
        #[arg(long)]
        solve: bool,
        #[arg(long, default_value_t = 25, value_parser = positive)]
        support_cap: usize,
        #[arg(long)]
        json: bool,
    },
    /// Moments of the edge probability at the diagonal minimum.
    Moments {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, default_value_t = 4)]
        power: u32,
        #[arg(long, value_enum, default_value_t = Method::Quadrature)]
        method: Method,
        #[arg(long, value_parser = parse_grid)]
        n_grid: Grid,
        #[arg(long, default_value_t = 100_000, value_parser = positive_u64)]
        trials: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, value_parser = positive)]
        threads: Option<usize>,
        #[arg(long)]
        json: bool,
    },
    /// Classify the tail-decay condition from parameters and from the trend.
    CheckTail {
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_parser = parse_grid, default_value = "100,200,400,800")]
        n_grid: Grid,
        #[arg(long)]
        json: bool,
    },
    /// Full power-set enumeration, without the decomposition.
    #[command(hide = true)]
    Oracle {
        #[arg(long, conflicts_with_all = ["ensemble", "n", "seed"])]
        input: Option<PathBuf>,
        #[command(flatten)]
        ensemble: EnsembleArgs,
        #[arg(long, value_parser = positive)]
        n: Option<usize>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = 16)]
        cap: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Mc,
    Quadrature,
    ClosedForm,
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Capacity { .. } => EXIT_CAPACITY,
            Error::Parameter(_) | Error::Domain(_) | Error::Format(_) => EXIT_USAGE,
            Error::Quadrature(_) | Error::Consistency(_) => EXIT_NUMERIC,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::usage(e.to_string())
    }
}

type CmdResult = Result<u8, Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn run(command: Command) -> CmdResult {
    match command {
        Command::Generate {
            ensemble,
            n,
            seed,
            out,
        } => generate(&ensemble, n, seed, &out),
        Command::Solve {
            input,
            ensemble,
            n,
            seed,
            support_cap,
        } => {
            let q = load_instance(input.as_deref(), &ensemble, n, seed)?;
            let sol = solve(
                &q,
                &SolveOptions {
                    support_cap,
                    ..SolveOptions::default()
                },
            )?;
            print_json(&sol.report())?;
            Ok(if sol.certified_exact_dnn {
                0
            } else {
                EXIT_UNCERTIFIED
            })
        }
        Command::Simulate {
            ensemble,
            n,
            trials,
            seed,
            threads,
            out,
            solve,
            support_cap,
            json,
        } => {
            let spec = ensemble.spec().map_err(Failure::usage)?;
            let opts = SimulateOptions {
                solve,
                solve_options: SolveOptions {
                    support_cap,
                    ..SolveOptions::default()
                },
                exec: Exec::from_threads(threads),
            };
            let sim = simulate(&spec, n, trials, seed, &opts)?;
            if let Some(path) = out {
                let mut w =
                    BufWriter::new(fs::File::create(&path).map_err(|e| io_context(&path, e))?);
                for r in &sim.records {
                    serde_json::to_writer(&mut w, r).map_err(|e| Failure::usage(e.to_string()))?;
                    w.write_all(b"\n")?;
                }
                w.flush()?;
            }
            if json {
                print_json(&sim.summary)?;
            } else {
                print_fields(&serde_json::to_value(&sim.summary).expect("summary serializes"));
            }
            Ok(0)
        }
        Command::Moments {
            ensemble,
            power,
            method,
            n_grid,
            trials,
            seed,
            threads,
            json,
        } => {
            let spec = ensemble.spec().map_err(Failure::usage)?;
            if method == Method::ClosedForm
                && !matches!(spec, stqp_core::EnsembleSpec::ShiftedExponential { .. })
            {
                return Err(Failure::usage(
                    "closed-form moments exist only for the shifted-exponential ensemble",
                ));
            }
            let exec = Exec::from_threads(threads);
            let reports = n_grid
                .0
                .iter()
                .map(|&n| match method {
                    Method::Mc => moment_mc(&spec, n, power, trials, seed, exec),
                    Method::Quadrature => moment_quadrature(&spec, n, power),
                    Method::ClosedForm => moment_closed_form(&spec, n, power),
                })
                .collect::<Result<Vec<_>, _>>()?;
            if json {
                print_json(&MomentsOutput {
                    ensemble: spec.echo(),
                    reports,
                })?;
            } else {
                print_moments(&reports);
            }
            Ok(0)
        }
        Command::CheckTail {
            ensemble,
            n_grid,
            json,
        } => {
            let spec = ensemble.spec().map_err(Failure::usage)?;
            let report = tail_condition_report(&spec, &n_grid.0)?;
            if json {
                print_json(&report)?;
            } else {
                print_tail(&report);
            }
            Ok(0)
        }
        Command::Oracle {
            input,
            ensemble,
            n,
            seed,
            cap,
        } => {
            let q = load_instance(input.as_deref(), &ensemble, n, seed)?;
            let sol = brute_force_stqp(&q, cap)?;
            print_json(&OracleOutput {
                n: q.n(),
                value: sol.value,
                support: sol.support.iter().map(|i| i + 1).collect(),
                x: sol.x,
                near_tie: sol.near_tie,
            })?;
            Ok(0)
        }
    }
}

#[derive(Serialize)]
struct GenerateOutput<'a> {
    ensemble: EnsembleEcho,
    n: usize,
    seed: u64,
    out: &'a Path,
}

#[derive(Serialize)]
struct MomentsOutput {
    ensemble: EnsembleEcho,
    reports: Vec<MomentReport>,
}

#[derive(Serialize)]
struct OracleOutput {
    n: usize,
    value: f64,
    support: Vec<usize>,
    x: Vec<f64>,
    near_tie: bool,
}

fn generate(ensemble: &EnsembleArgs, n: usize, seed: u64, out: &Path) -> CmdResult {
    let spec = ensemble.spec().map_err(Failure::usage)?;
    let q = sample_matrix(&spec, n, seed)?;
    fs::write(out, q.to_text()).map_err(|e| io_context(out, e))?;
    print_json(&GenerateOutput {
        ensemble: spec.echo(),
        n,
        seed,
        out,
    })?;
    Ok(0)
}

fn load_instance(
    input: Option<&Path>,
    ensemble: &EnsembleArgs,
    n: Option<usize>,
    seed: Option<u64>,
) -> Result<SymmetricMatrix, Failure> {
    if let Some(path) = input {
        let text = fs::read_to_string(path).map_err(|e| io_context(path, e))?;
        return SymmetricMatrix::parse(&text)
            .map_err(|e| Failure::usage(format!("{}: {e}", path.display())));
    }
    if ensemble.ensemble.is_none() {
        return Err(Failure::usage(
            "either --input or --ensemble with --n is required",
        ));
    }
    let spec = ensemble.spec().map_err(Failure::usage)?;
    let n = n.ok_or_else(|| Failure::usage("--n is required with --ensemble"))?;
    Ok(sample_matrix(&spec, n, seed.unwrap_or(0))?)
}

fn io_context(path: &Path, e: io::Error) -> Failure {
    Failure::usage(format!("{}: {e}", path.display()))
}

fn print_json<T: Serialize>(value: &T) -> Result<(), Failure> {
    let s = serde_json::to_string_pretty(value).map_err(|e| Failure::usage(e.to_string()))?;
    println!("{s}");
    Ok(())
}

/// `key  value` lines, keys padded to a common width.
fn print_fields(v: &Value) {
    let Value::Object(map) = v else {
        println!("{v}");
        return;
    };
    let width = map.keys().map(String::len).max().unwrap_or(0);
    for (k, v) in map {
        let shown = match v {
            Value::Object(o) if o.contains_key("variant") => {
                let params = o["params"]
                    .as_object()
                    .map(|p| {
                        p.iter()
                            .map(|(k, v)| format!("{k}={v}"))
                            .collect::<Vec<_>>()
                            .join(" ")
                    })
                    .unwrap_or_default();
                format!("{} {params}", o["variant"].as_str().unwrap_or("?"))
                    .trim_end()
                    .to_string()
            }
            other => other.to_string(),
        };
        println!("{k:<width$}  {shown}");
    }
}

fn print_moments(reports: &[MomentReport]) {
    println!(
        "{:>8} {:>3} {:>18} {:>10} {:>18}",
        "n", "s", "estimate", "stderr", "scaled"
    );
    for r in reports {
        let stderr = r.stderr.map_or("-".to_string(), |e| format!("{e:.3e}"));
        let scaled = r.scaled.map_or("-".to_string(), |v| format!("{v:.10e}"));
        println!(
            "{:>8} {:>3} {:>18.10e} {:>10} {:>18}",
            r.n, r.s, r.estimate, stderr, scaled
        );
    }
}

fn print_tail(r: &TailReport) {
    println!("{:>8} {:>18} {:>18}", "n", "E[q^4]", "n^5 E[q^4]");
    for row in &r.rows {
        println!("{:>8} {:>18.10e} {:>18.10e}", row.n, row.e4, row.scaled);
    }
    println!("slope        {:.6}", r.slope);
    println!("empirical    {}", label(&r.empirical));
    println!("theoretical  {}", label(&r.theoretical));
    println!("condition    {}", r.condition);
    println!("agree        {}", r.agree);
}

/// Serialized name of a unit enum variant.
fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        Ok(other) => other.to_string(),
        Err(_) => String::new(),
    }
}

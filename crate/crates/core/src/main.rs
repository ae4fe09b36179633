use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::sync::Arc;
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};

use notjs::client::{bench_table, corpus, format_table, report_errors};
use notjs::concrete::{run, Outcome};
use notjs::engine::{
    analyze, dump, fuzz, generate_program, minimize, soundness_check, EngineError, GenConfig, Limits, Order,
};
use notjs::ir::{parse_program, pretty, validate, Decl};
use notjs::sensitivity::{parse_sensitivity, Sensitivity, STANDARD_SET};

#[derive(Parser)]
#[command(name = "notjs", version, about = "Abstract interpreter for notJS programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderArg {
    Fifo,
    Lifo,
}

#[derive(clap::Args)]
struct LimitArgs {
    /// Worklist iterations before giving up.
    #[arg(long, default_value_t = 1_000_000)]
    max_iterations: u64,
    /// Wall-clock budget in milliseconds.
    #[arg(long)]
    timeout_ms: Option<u64>,
    #[arg(long, value_enum, default_value = "fifo")]
    order: OrderArg,
}

impl LimitArgs {
    fn limits(&self) -> Limits {
        Limits {
            max_iterations: self.max_iterations,
            wall_clock: self.timeout_ms.map(Duration::from_millis),
            order: match self.order {
                OrderArg::Fifo => Order::Fifo,
                OrderArg::Lifo => Order::Lifo,
            },
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a program and report possible runtime errors.
    Analyze {
        file: PathBuf,
        #[arg(long, default_value = "fs")]
        sensitivity: String,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[command(flatten)]
        limits: LimitArgs,
        /// Exit with status 1 when the report is not empty.
        #[arg(long)]
        fail_on_errors: bool,
        /// Print the partition, one JSON record per line, instead of the report.
        #[arg(long)]
        dump: bool,
        /// Report 0 ms so that repeated runs print identical output.
        #[arg(long)]
        no_timing: bool,
    },
    /// Run a program on the concrete interpreter.
    Run {
        file: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        fuel: u64,
    },
    /// Check the analysis of a program against a concrete run.
    Check {
        file: PathBuf,
        #[arg(long, default_value = "fs")]
        sensitivity: String,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Differential soundness run over generated programs.
    Fuzz {
        /// Seed range, `A..B`.
        #[arg(long, default_value = "0..100", value_parser = parse_range)]
        seeds: std::ops::Range<u64>,
        /// Comma-separated sensitivities; defaults to the standard seven.
        #[arg(long, value_delimiter = ',')]
        sensitivity_set: Vec<String>,
        #[arg(long, default_value_t = 10_000)]
        fuel: u64,
        #[arg(long, default_value_t = 200)]
        max_nodes: usize,
        /// Run on one thread.
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
    /// Precision and partition-size table over the bundled corpus.
    Bench {
        #[arg(long, value_delimiter = ',')]
        sensitivity_set: Vec<String>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        #[arg(long)]
        sequential: bool,
        #[command(flatten)]
        limits: LimitArgs,
    },
}

fn parse_range(s: &str) -> Result<std::ops::Range<u64>, String> {
    let (a, b) = s.split_once("..").ok_or("expected A..B")?;
    let a = a.parse::<u64>().map_err(|e| e.to_string())?;
    let b = b.parse::<u64>().map_err(|e| e.to_string())?;
    if a > b {
        return Err("empty range".into());
    }
    Ok(a..b)
}

/// A usage or input failure: message and exit status 2.
struct Usage(String);

fn load(path: &Path) -> Result<Arc<Decl>, Usage> {
    let text = std::fs::read_to_string(path).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    let prog = parse_program(&text).map_err(|e| Usage(format!("{}: {e}", path.display())))?;
    if let Some(d) = validate(&prog).first() {
        return Err(Usage(format!("{}: {d}", path.display())));
    }
    Ok(Arc::new(prog))
}

fn strategy(spec: &str) -> Result<Arc<dyn Sensitivity>, Usage> {
    parse_sensitivity(spec).map_err(|e| Usage(e.to_string()))
}

fn specs(given: &[String]) -> Vec<&str> {
    if given.is_empty() {
        STANDARD_SET.to_vec()
    } else {
        given.iter().map(String::as_str).collect()
    }
}

fn program_name(path: &Path) -> String {
    path.file_stem().map_or_else(|| path.display().to_string(), |s| s.to_string_lossy().into_owned())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<ExitCode, Usage> {
    match command {
        Command::Analyze {
            file,
            sensitivity,
            format,
            limits,
            fail_on_errors,
            dump: dump_partition,
            no_timing,
        } => {
            let strategy = strategy(&sensitivity)?;
            let prog = load(&file)?;
            let result = match analyze(&prog, strategy.as_ref(), limits.limits()) {
                Ok(r) => r,
                Err(e @ EngineError::LimitExceeded(_)) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            if dump_partition {
                print!("{}", dump(&result));
                return Ok(ExitCode::SUCCESS);
            }
            let mut report =
                report_errors(&program_name(&file), &result, strategy.as_ref()).expect("complete result");
            if no_timing {
                report.stats.millis = 0;
            }
            match format {
                Format::Json => println!("{}", report.to_json()),
                Format::Text => print!("{}", report.to_text()),
            }
            Ok(if fail_on_errors && !report.is_clean() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            })
        }
        Command::Run { file, fuel } => {
            let prog = load(&file)?;
            let r = run(&prog, fuel);
            for line in &r.state.output {
                println!("{line}");
            }
            for (node, kind) in &r.state.errors {
                eprintln!("node:{node} {}", kind.as_str());
            }
            match r.outcome {
                Outcome::Halted(v) => {
                    println!("=> {v}");
                    Ok(ExitCode::SUCCESS)
                }
                Outcome::UncaughtException(v) => {
                    println!("uncaught exception: {v}");
                    Ok(ExitCode::FAILURE)
                }
                Outcome::FuelExhausted(n) => {
                    println!("out of fuel after {n} steps");
                    Ok(ExitCode::FAILURE)
                }
            }
        }
        Command::Check {
            file,
            sensitivity,
            fuel,
            limits,
        } => {
            let strategy = strategy(&sensitivity)?;
            let prog = load(&file)?;
            let report = match soundness_check(&prog, strategy.as_ref(), fuel, limits.limits()) {
                Ok(r) => r,
                Err(e) => {
                    eprintln!("error: {e}");
                    return Ok(ExitCode::FAILURE);
                }
            };
            println!(
                "{} violations ({} concrete states, {} partitions)",
                report.violations(),
                report.states_checked,
                report.partitions
            );
            if let Some(v) = &report.violation {
                println!("{v}");
                return Ok(ExitCode::FAILURE);
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Fuzz {
            seeds,
            sensitivity_set,
            fuel,
            max_nodes,
            sequential,
            limits,
        } => {
            let specs = specs(&sensitivity_set);
            let cfg = GenConfig {
                max_nodes,
                ..GenConfig::default()
            };
            let limits = limits.limits();
            let summary =
                fuzz(seeds, &specs, fuel, cfg, limits, !sequential).map_err(|e| Usage(e.to_string()))?;
            println!(
                "{} cases, {} concrete states, {} violations, {} incomplete, {} ms",
                summary.cases,
                summary.states_checked,
                summary.failures.len(),
                summary.incomplete,
                summary.millis
            );
            let Some(first) = summary.failures.first() else {
                return Ok(ExitCode::SUCCESS);
            };
            for f in &summary.failures {
                println!("seed {} {}: {}", f.seed, f.sensitivity, f.violation.as_ref().expect("failure"));
            }
            let strategy = strategy(&first.sensitivity)?;
            let fails = |p: &Arc<Decl>| {
                soundness_check(p, strategy.as_ref(), fuel, limits).is_ok_and(|r| r.violation.is_some())
            };
            let witness = minimize(&generate_program(first.seed, cfg), &fails);
            println!("minimized witness for seed {}:\n{}", first.seed, pretty(&witness));
            Ok(ExitCode::FAILURE)
        }
        Command::Bench {
            sensitivity_set,
            format,
            sequential,
            limits,
        } => {
            let specs = specs(&sensitivity_set);
            let rows =
                bench_table(&corpus(), &specs, limits.limits(), !sequential).map_err(|e| Usage(e.to_string()))?;
            match format {
                Format::Json => println!("{}", serde_json::to_string_pretty(&rows).expect("rows serialize")),
                Format::Text => print!("{}", format_table(&rows)),
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use sparsedom_cli::config::{self, Kind};
use sparsedom_cli::runner;
use sparsedom_cli::scenarios::{self, BUNDLED};
use sparsedom_cli::{CliError, EXIT_ERROR, EXIT_FAIL, EXIT_PASS};

#[derive(Parser)]
#[command(name = "sparsedom", version, about = "Run sparse-domination scenarios and write CSV summaries")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a bundled scenario by name, or a scenario file with --config.
    Run {
        name: Option<String>,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Overrides the scenario seed.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        threads: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
        /// `section.key=value`, value parsed as TOML. Repeatable.
        #[arg(long = "override", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// List the bundled scenarios.
    List,
    /// Print the fields a scenario kind needs.
    Describe { kind: String },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_ERROR as u8 } else { EXIT_PASS as u8 });
        }
    };
    let code = match cli.command {
        Command::List => {
            for b in BUNDLED {
                let kind = config::parse(b.text, &[]).map(|s| s.kind.name()).unwrap_or("?");
                println!("{:<20} {kind}", b.name);
            }
            EXIT_PASS
        }
        Command::Describe { kind } => match Kind::parse(&kind) {
            Some(k) => {
                println!("{}", config::describe(k));
                EXIT_PASS
            }
            None => {
                let known: Vec<&str> = Kind::ALL.iter().map(|k| k.name()).collect();
                eprintln!("unknown kind `{kind}`; known kinds: {}", known.join(", "));
                EXIT_ERROR
            }
        },
        Command::Run { name, config, seed, threads, out, overrides } => {
            match run(name, config, seed, threads, out, overrides) {
                Ok(code) => code,
                Err(e) => {
                    eprintln!("error: {e}");
                    e.exit_code()
                }
            }
        }
    };
    ExitCode::from(code as u8)
}

fn run(
    name: Option<String>,
    path: Option<PathBuf>,
    seed: Option<u64>,
    threads: Option<usize>,
    out: Option<PathBuf>,
    mut overrides: Vec<String>,
) -> Result<i32, CliError> {
    let text = match (&name, &path) {
        (Some(_), Some(_)) => return Err(CliError::Config("give a scenario name or --config, not both".into())),
        (Some(n), None) => scenarios::find(n)
            .ok_or_else(|| CliError::Config(format!("no bundled scenario `{n}`; see `sparsedom list`")))?
            .text
            .to_string(),
        (None, Some(p)) => {
            std::fs::read_to_string(p).map_err(|e| CliError::Config(format!("cannot read {}: {e}", p.display())))?
        }
        (None, None) => return Err(CliError::Config("give a scenario name or --config PATH".into())),
    };
    if let Some(s) = seed {
        overrides.push(format!("seed={s}"));
    }
    let scenario = config::parse(&text, &overrides)?;
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config(format!("thread pool: {e}")))?;
    }
    let dir = runner::output_dir(&scenario, out.as_deref());
    let start = Instant::now();
    let summary = runner::run(&scenario, &dir)?;
    let elapsed = start.elapsed().as_secs_f64();
    for r in &summary.rows {
        let status = if r.pass { "pass" } else { "FAIL" };
        println!("{status:<5} {:<32} {:>14.6e}  {}", r.check, r.constant, r.tolerance);
    }
    println!("{}: {:.2}s of {}s budget, tables in {}", scenario.name, elapsed, scenario.time_budget_s, dir.display());
    if elapsed > scenario.time_budget_s {
        eprintln!("warning: run exceeded its time budget");
    }
    Ok(if summary.all_pass() { EXIT_PASS } else { EXIT_FAIL })
}

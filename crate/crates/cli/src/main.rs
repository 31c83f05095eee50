use std::path::PathBuf;
use std::process::ExitCode;

use alharm_core::par::Exec;
use alharm_core::suites::{list_suites, run_suite, Scenario};
use alharm_core::Error;
use clap::{Parser, Subcommand};

const EXIT_FAIL: u8 = 1;
const EXIT_CONFIG: u8 = 2;

#[derive(Parser)]
#[command(name = "alharm", version, about = "Run verification suites and emit JSON reports")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run one suite; exit 0 if every case passes, 1 if any fails, 2 on a config error.
    Run {
        /// Suite name (see `alharm list`); may come from the config instead.
        #[arg(long)]
        suite: Option<String>,
        /// Scenario JSON: {suite, params, tol, seed, output}.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Where to write the JSON report.
        #[arg(long)]
        report: Option<PathBuf>,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        seed: Option<u64>,
        /// Write runtime_ms as 0 so reports are byte-identical across runs.
        #[arg(long)]
        no_timing: bool,
        /// Run cases on one thread.
        #[arg(long)]
        sequential: bool,
    },
    /// Print the suite names in canonical order.
    List,
}

fn config_error(msg: impl std::fmt::Display) -> ExitCode {
    let msg = msg.to_string();
    eprintln!("config error: {}", msg.strip_prefix("config error: ").unwrap_or(&msg));
    ExitCode::from(EXIT_CONFIG)
}

fn main() -> ExitCode {
    match Cli::parse().cmd {
        Cmd::List => {
            for s in list_suites() {
                println!("{s}");
            }
            ExitCode::SUCCESS
        }
        Cmd::Run { suite, config, report, tol, seed, no_timing, sequential } => {
            let mut sc = match &config {
                Some(path) => {
                    let text = match std::fs::read_to_string(path) {
                        Ok(t) => t,
                        Err(e) => return config_error(format!("config: cannot read {}: {e}", path.display())),
                    };
                    match Scenario::from_json(&text) {
                        Ok(s) => s,
                        Err(Error::Config(m)) | Err(Error::Invalid(m)) => return config_error(format!("{}: {m}", path.display())),
                        Err(e) => return config_error(format!("{}: {e}", path.display())),
                    }
                }
                None => Scenario::default(),
            };
            match (suite, sc.suite.is_empty()) {
                (Some(s), true) => sc.suite = s,
                (Some(s), false) if s != sc.suite => {
                    return config_error(format!("suite: --suite {s} disagrees with the config suite {}", sc.suite))
                }
                (None, true) => return config_error("suite: give --suite or a config with a suite"),
                _ => {}
            }
            if tol.is_some() {
                sc.tol = tol;
            }
            if seed.is_some() {
                sc.seed = seed;
            }
            if sequential {
                Exec::set_current(Exec::Sequential);
            }
            let rep = match run_suite(&sc) {
                Ok(r) => r,
                Err(e) => return config_error(e),
            };
            let out = if no_timing { rep.body() } else { rep.clone() };
            if let Some(path) = report.or(sc.output.as_ref().map(PathBuf::from)) {
                if let Err(e) = std::fs::write(&path, out.to_json() + "\n") {
                    return config_error(format!("report: cannot write {}: {e}", path.display()));
                }
            }
            print!("{}", rep.summary_text());
            if rep.pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_FAIL)
            }
        }
    }
}

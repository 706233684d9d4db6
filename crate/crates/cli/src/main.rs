use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use gkls_contact_cli::{config::ScenarioConfig, runner, scenarios, CliError, RunOptions};

#[derive(Parser)]
#[command(name = "gkls-contact", version, about = "Open quantum and dissipative classical flows with contact-geometric checks")]
struct Cli {
    /// More logging (-v info, -vv debug). RUST_LOG takes precedence.
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario from a JSON config or a built-in name.
    Run {
        config: Option<PathBuf>,
        #[arg(long, conflicts_with = "config")]
        scenario: Option<String>,
        /// Output directory for the CSV and report.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        dt: Option<f64>,
        #[arg(long = "t-end")]
        t_end: Option<f64>,
    },
    /// List built-in scenarios.
    List,
    /// Run the invariant suites.
    Checks {
        /// Run a single suite.
        #[arg(long)]
        filter: Option<String>,
        #[arg(long, default_value_t = runner::DEFAULT_SEED)]
        seed: u64,
    },
}

fn run(cli: Cli) -> Result<i32, CliError> {
    match cli.command {
        Command::List => {
            for (name, about) in scenarios::BUILTINS {
                println!("{name:<28} {about}");
            }
            Ok(0)
        }
        Command::Run { config, scenario, out, dt, t_end } => {
            let cfg = match (config, scenario) {
                (Some(path), None) => ScenarioConfig::from_path(&path)?,
                (None, Some(name)) => scenarios::builtin(&name).ok_or_else(|| {
                    CliError::Usage(format!("unknown scenario {name:?}; see `gkls-contact list`"))
                })?,
                _ => return Err(CliError::Usage("give a config file or --scenario <name>".into())),
            };
            let report = runner::run(&cfg, &RunOptions { out_dir: out, dt, t_end })?;
            for inv in &report.invariants {
                let tag = if inv.passed { "PASS" } else { "FAIL" };
                println!("{tag} {:<36} residual {:.3e} (tol {:.1e})", inv.name, inv.residual, inv.tolerance);
            }
            if let Some(e) = &report.error {
                eprintln!("error: {e}");
            }
            for path in &report.outputs {
                println!("wrote {}", path.display());
            }
            Ok(report.exit_code())
        }
        Command::Checks { filter, seed } => {
            let reports = runner::run_checks(filter.as_deref(), seed)?;
            let mut ok = true;
            for r in &reports {
                for c in &r.checks {
                    ok &= c.passed;
                    let tag = if c.passed { "PASS" } else { "FAIL" };
                    println!("{tag} {:<20} {:<52} {:.3e} <= {:.1e}", r.suite, c.name, c.residual, c.tolerance);
                    if let Some(d) = c.detail.as_ref().filter(|d| !c.passed && !d.is_empty()) {
                        println!("     {d}");
                    }
                }
            }
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}

//! Batch driver: `ftqem <subcommand> [--config F] [--out DIR] [--seed N]
//! [--workers N] [--acceptance] [--print-config]`.
//!
//! Exit codes: 0 success, 2 acceptance failure, 3 config error.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use ftqem::config::Config;
use ftqem::run::{self, Subcommand};

const EXIT_ACCEPTANCE: u8 = 2;
const EXIT_CONFIG: u8 = 3;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Command {
    DecodeBench,
    ThresholdScan,
    MarkovFit,
    CliffordDemo,
    SkBench,
    SwapDemo,
    EstErrorDemo,
    GstDemo,
    BisectionDemo,
    Resources,
    Selftest,
}

impl From<Command> for Subcommand {
    fn from(c: Command) -> Self {
        match c {
            Command::DecodeBench => Subcommand::DecodeBench,
            Command::ThresholdScan => Subcommand::ThresholdScan,
            Command::MarkovFit => Subcommand::MarkovFit,
            Command::CliffordDemo => Subcommand::CliffordDemo,
            Command::SkBench => Subcommand::SkBench,
            Command::SwapDemo => Subcommand::SwapDemo,
            Command::EstErrorDemo => Subcommand::EstErrorDemo,
            Command::GstDemo => Subcommand::GstDemo,
            Command::BisectionDemo => Subcommand::BisectionDemo,
            Command::Resources => Subcommand::Resources,
            Command::Selftest => Subcommand::Selftest,
        }
    }
}

#[derive(Debug, Parser)]
#[command(version, about = "Monte Carlo experiments for error mitigation on logical qubits")]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// TOML config; missing tables and fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory (default: out/<subcommand>).
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Worker threads (default: all cores). Results do not depend on it.
    #[arg(long)]
    workers: Option<usize>,
    /// Run the acceptance criteria tied to the subcommand instead.
    #[arg(long)]
    acceptance: bool,
    /// Print the effective config as TOML and exit.
    #[arg(long)]
    print_config: bool,
}

fn load_config(path: Option<&Path>) -> Result<Config, String> {
    let cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| format!("{}: {e}", p.display()))?;
            Config::from_toml(&text).map_err(|e| format!("{}: {e}", p.display()))?
        }
        None => Config::default(),
    };
    Ok(cfg)
}

fn write_outputs(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, contents) in files {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_CONFIG) } else { ExitCode::SUCCESS };
        }
    };
    let sub: Subcommand = cli.command.into();
    let cfg = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if cli.print_config {
        print!("{}", cfg.to_toml());
        return ExitCode::SUCCESS;
    }
    if let Err(e) = cfg.validate() {
        eprintln!("{e}");
        return ExitCode::from(EXIT_CONFIG);
    }
    if let Some(n) = cli.workers {
        if n == 0 || rayon::ThreadPoolBuilder::new().num_threads(n).build_global().is_err() {
            eprintln!("config error: cannot start {n} workers");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out").join(sub.name()));

    if cli.acceptance {
        let reports = match run::run_acceptance(sub, cli.seed) {
            Ok(r) => r,
            Err(e) => {
                eprintln!("error: {e}");
                return ExitCode::from(EXIT_ACCEPTANCE);
            }
        };
        for r in &reports {
            println!("{}", r.line());
            for c in &r.checks {
                println!("    [{}] {}: {}", if c.pass { "ok" } else { "FAIL" }, c.id, c.detail);
            }
        }
        let doc = serde_json::json!({
            "schema_version": run::SCHEMA_VERSION,
            "subcommand": sub.name(),
            "seed": cli.seed,
            "acceptance": reports,
        });
        let files = vec![("acceptance.json".to_string(), format!("{:#}\n", doc))];
        if let Err(e) = write_outputs(&dir, &files) {
            eprintln!("cannot write {}: {e}", dir.display());
            return ExitCode::from(EXIT_CONFIG);
        }
        return if reports.iter().all(|r| r.pass()) {
            ExitCode::SUCCESS
        } else {
            ExitCode::from(EXIT_ACCEPTANCE)
        };
    }

    let out = match run::run(sub, &cfg, cli.seed) {
        Ok(o) => o,
        Err(e @ ftqem::Error::Config(_)) => {
            eprintln!("{e}");
            return ExitCode::from(EXIT_CONFIG);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::FAILURE;
        }
    };
    for line in &out.summary {
        println!("{line}");
    }
    let doc = run::stats_document(sub, &cfg, cli.seed, &out);
    let mut files = out.files.clone();
    files.push(("stats.json".into(), format!("{:#}\n", doc)));
    files.push(("config.toml".into(), cfg.to_toml()));
    if let Err(e) = write_outputs(&dir, &files) {
        eprintln!("cannot write {}: {e}", dir.display());
        return ExitCode::from(EXIT_CONFIG);
    }
    println!("wrote {}", dir.display());
    if out.ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_ACCEPTANCE)
    }
}

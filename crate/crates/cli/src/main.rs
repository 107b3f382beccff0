use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};

use fixkit::catalog::PatternFilter;
use fixkit::driver::{FlMode, RepairConfig};
use fixkit::harness::{load_bug, load_corpus, render_table, repair_row, run_suite, settings_of, RunReport};
use fixkit::lang::interp::RunConfig;

const EXIT_USAGE: u8 = 1;
const EXIT_CORPUS: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(name = "fixkit", version, about = "Template-based program repair for MiniJ")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Repair a single bug directory.
    Repair {
        bug_dir: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
    /// Repair every bug under a corpus root.
    Bench {
        corpus_root: PathBuf,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Args)]
struct Opts {
    /// Use the known buggy statements instead of Ochiai ranking.
    #[arg(long)]
    perfect_fl: bool,
    /// Validate all candidates and report every plausible patch.
    #[arg(long)]
    exhaustive: bool,
    /// Per-bug budget in seconds; 0 means unlimited.
    #[arg(long, default_value_t = 60)]
    timeout: u64,
    #[arg(long, default_value_t = 50)]
    max_suspicious: usize,
    /// Comma-separated pattern ids or families, e.g. `FP2.1,FP11`.
    #[arg(long)]
    patterns: Option<String>,
    /// Write the JSON report here.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Only check that bugs reproduce and their ground truth fixes them.
    #[arg(long)]
    seed_check: bool,
    /// Per-test timeout in milliseconds.
    #[arg(long, default_value_t = 100)]
    test_timeout_ms: u64,
}

impl Opts {
    fn run_config(&self) -> RunConfig {
        RunConfig { per_test_timeout: Duration::from_millis(self.test_timeout_ms), ..RunConfig::default() }
    }

    fn repair_config(&self) -> Result<RepairConfig, String> {
        let patterns = match &self.patterns {
            Some(list) => PatternFilter::parse(list).map_err(|e| e.to_string())?,
            None => PatternFilter::all(),
        };
        Ok(RepairConfig {
            mode: if self.perfect_fl { FlMode::Perfect } else { FlMode::Normal },
            budget: (self.timeout > 0).then(|| Duration::from_secs(self.timeout)),
            max_suspicious: self.max_suspicious,
            exhaustive: self.exhaustive,
            patterns,
            run: self.run_config(),
            ..RepairConfig::default()
        })
    }
}

fn write_report(path: Option<&Path>, report: &RunReport) -> Result<(), ExitCode> {
    if let Some(path) = path {
        std::fs::write(path, report.to_json()).map_err(|e| {
            eprintln!("error: writing {}: {e}", path.display());
            ExitCode::from(EXIT_INTERNAL)
        })?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), ExitCode> {
    let (path, opts, single) = match &cli.command {
        Command::Repair { bug_dir, opts } => (bug_dir, opts, true),
        Command::Bench { corpus_root, opts } => (corpus_root, opts, false),
    };
    let config = opts.repair_config().map_err(|e| {
        eprintln!("error: {e}");
        ExitCode::from(EXIT_USAGE)
    })?;
    let run_config = opts.run_config();
    let loaded = if single { load_bug(path, &run_config).map(|b| vec![b]) } else { load_corpus(path, &run_config) };
    let bugs = loaded.map_err(|e| {
        eprintln!("corpus error: {e}");
        ExitCode::from(EXIT_CORPUS)
    })?;
    if opts.seed_check {
        println!("{} bug(s) verified", bugs.len());
        return Ok(());
    }
    let report = if single {
        RunReport::new(settings_of(&config), vec![repair_row(&bugs[0], &config)])
    } else {
        run_suite(&bugs, &config)
    };
    print!("{}", render_table(&report));
    if single {
        if let Some(p) = &report.bugs[0].plausible_patch {
            println!();
            print!("{}", p.diff);
        }
    }
    write_report(opts.report.as_deref(), &report)?;
    if report.aggregates.errors > 0 {
        return Err(ExitCode::from(EXIT_INTERNAL));
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(EXIT_USAGE) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => code,
    }
}

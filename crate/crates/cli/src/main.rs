//! `weyl-lab <kind> --config <path> [--out <dir>] [--seed N] [--threads N]`
//!
//! Exit status: 0 when every check passes, 1 when a check fails or a solver
//! breaks down, 2 for configuration errors.

mod config;
mod run;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::Parser;

use config::{ExperimentConfig, Kind};
use run::{Report, RunError, Table};

#[derive(Debug, Parser)]
#[command(name = "weyl-lab", version, about = "Numerical checks of two-term Weyl asymptotics")]
struct Cli {
    kind: Kind,
    #[arg(long)]
    config: PathBuf,
    /// Output directory (overrides `out` in the config).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Seed (overrides `seed` in the config).
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, env = "WEYL_LAB_THREADS")]
    threads: Option<usize>,
}

fn write_table(dir: &Path, t: &Table) -> std::io::Result<()> {
    let mut f = fs::File::create(dir.join(t.name))?;
    writeln!(f, "# units: {}", t.units)?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(&t.header)?;
    for r in &t.rows {
        w.write_record(r)?;
    }
    w.flush()
}

fn summary_text(cfg: &ExperimentConfig, rep: &Report) -> String {
    let mut s = format!("kind: {}\n", cfg.kind.as_str());
    if let Some(seed) = cfg.seed {
        s += &format!("seed: {seed}\n");
    }
    for (i, r) in cfg.records.iter().enumerate() {
        s += &format!("domain {i}: {r}\n");
    }
    for line in &rep.summary {
        s += line;
        s.push('\n');
    }
    for c in &rep.checks {
        s += &format!("{} {}: {}\n", if c.pass { "PASS" } else { "FAIL" }, c.name, c.detail);
    }
    let failed = rep.failures().count();
    s += &format!("result: {} checks, {failed} failed\n", rep.checks.len());
    s
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let text = match fs::read_to_string(&cli.config) {
        Ok(t) => t,
        Err(e) => {
            eprintln!("config error: cannot read {}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    let cfg = match ExperimentConfig::parse(cli.kind, &text, cli.seed) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("{}: {e}", cli.config.display());
            return ExitCode::from(2);
        }
    };
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("config error: thread count must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("cannot set up {n} threads: {e}");
            return ExitCode::from(1);
        }
    }
    let out = cli
        .out
        .or_else(|| cfg.out.as_ref().map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("weyl-lab-out"));
    let rep = match run::run(&cfg) {
        Ok(r) => r,
        Err(RunError::Config(m)) => {
            eprintln!("config error: {m}");
            return ExitCode::from(2);
        }
        Err(RunError::Runtime(m)) => {
            eprintln!("run failed: {m}");
            return ExitCode::from(1);
        }
    };
    let summary = summary_text(&cfg, &rep);
    let written = fs::create_dir_all(&out)
        .and_then(|_| rep.tables.iter().try_for_each(|t| write_table(&out, t)))
        .and_then(|_| fs::write(out.join("summary.txt"), &summary));
    if let Err(e) = written {
        eprintln!("cannot write to {}: {e}", out.display());
        return ExitCode::from(1);
    }
    print!("{summary}");
    let failed: Vec<_> = rep.failures().collect();
    if failed.is_empty() {
        ExitCode::SUCCESS
    } else {
        for c in failed {
            eprintln!("failed: {}: {}", c.name, c.detail);
        }
        ExitCode::from(1)
    }
}

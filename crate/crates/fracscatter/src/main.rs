use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use fracscatter::{output, run, ExperimentConfig, Kind, RunError};

#[derive(Parser, Debug)]
#[command(name = "fracscatter", version, about = "Wave-operator experiments for fractional Laplacians with long-range potentials")]
struct Cli {
    /// cauchy, dollard_cauchy, weaklimit, cook, modifier_rl, sweep or selftest
    kind: String,
    #[arg(long)]
    config: PathBuf,
    /// Overrides `out_dir` from the config; defaults to the current directory.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("fracscatter: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn execute(cli: &Cli) -> Result<u8, RunError> {
    let kind: Kind = cli.kind.parse()?;
    let text = std::fs::read_to_string(&cli.config)?;
    let mut cfg = ExperimentConfig::parse(&text, Some(kind))?;
    if let Some(out) = &cli.out {
        cfg.out_dir = Some(out.clone());
    }
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = cli.threads {
        pool = pool.num_threads(k.max(1));
    }
    let pool = pool.build().map_err(std::io::Error::other)?;
    let report = pool.install(|| run(&cfg))?;
    let dir = cfg.out_dir.clone().unwrap_or_else(|| PathBuf::from("."));
    let files = output::write_report(&dir, &cfg, &report)?;
    for c in report.checks.iter().chain(&report.verdicts) {
        println!("{} {}: {}", if c.passed { "ok  " } else { "FAIL" }, c.name, c.detail);
    }
    for f in &files {
        println!("wrote {}", f.display());
    }
    Ok(if report.validated() { 0 } else { 2 })
}

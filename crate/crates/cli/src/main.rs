use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use pretangent::analysis::{emit_outputs, parse_config, run_analysis, AnalysisConfig, Report, Task};
use pretangent::{ce_truncation, Error, Exact};

#[derive(Parser)]
#[command(name = "pretangent", version, about = "Pretangent-space analysis of pointed metric spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output directory (overrides the config's `out_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Seed for the random subsequence selector and sampled spheres.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Run every task listed in a JSON config.
    Analyze { config: PathBuf },
    /// Print the truncated extended Cantor set as exact fractions.
    CantorTable {
        #[arg(long, default_value = "1")]
        bound: String,
        #[arg(long, default_value_t = 4)]
        depth: u32,
        #[arg(long, default_value_t = 0)]
        marked: u8,
    },
    /// Evaluate the conditions and build a non-uniqueness witness.
    Witness { config: PathBuf },
}

fn load(path: &Path, seed: Option<u64>) -> Result<AnalysisConfig, Error> {
    let text = fs::read_to_string(path)?;
    let mut config = parse_config(&text)?;
    if let Some(seed) = seed {
        config.seed = seed;
    }
    Ok(config)
}

fn out_dir(cli_out: Option<PathBuf>, config: &AnalysisConfig) -> PathBuf {
    cli_out
        .or_else(|| config.out_dir.clone())
        .unwrap_or_else(|| PathBuf::from("out"))
}

fn summarize(report: &Report) {
    println!("space: {}", report.space.id);
    println!("scale: {}", report.scale);
    if let Some(cs) = &report.conditions {
        for c in cs {
            let estimate = c.estimate.map_or("-".to_string(), |e| format!("{e}"));
            println!("condition {:?}: {:?} (estimate {estimate})", c.condition, c.verdict);
        }
    }
    if let Some(u) = &report.uniqueness {
        println!("uniqueness: {:?}", u.verdict);
    }
    if let Some(w) = &report.witness {
        println!("witness: {} vs {}, sublimit gap {}", w.x_label, w.z_label, w.gap);
    }
    if let Some(p) = &report.pretangent {
        println!("pretangent: {} classes", p.pretangent.len());
    }
    if let Some(t) = &report.tangency {
        println!("tangency: {:?}", t.verdict);
    }
    if let Some(te) = &report.tangent_equivalence {
        println!(
            "tangent equivalence: eps/t -> {} ({:?}), equivalent {:?}",
            te.estimate.value, te.estimate.status, te.equivalent
        );
    }
    if let Some(c) = &report.cantor {
        println!("cantor table: {} values", c.table.len());
    }
    for s in &report.skipped {
        println!("skipped {:?}: {}", s.task, s.reason);
    }
    for e in &report.errors {
        eprintln!("task {:?} failed: {}", e.task, e.message);
    }
}

fn analyze(config: AnalysisConfig, out: PathBuf, quiet: bool) -> Result<bool, Error> {
    let report = run_analysis(&config)?;
    let written = emit_outputs(&report, &out)?;
    if !quiet {
        summarize(&report);
        for path in written {
            println!("wrote {}", path.display());
        }
    }
    Ok(!report.has_errors())
}

fn run(cli: Cli) -> Result<bool, Error> {
    match cli.command {
        Command::Analyze { config } => {
            let config = load(&config, cli.seed)?;
            let out = out_dir(cli.out, &config);
            analyze(config, out, cli.quiet)
        }
        Command::Witness { config } => {
            let mut config = load(&config, cli.seed)?;
            config.tasks = vec![Task::Conditions, Task::Witness];
            let out = out_dir(cli.out, &config);
            analyze(config, out, cli.quiet)
        }
        Command::CantorTable { bound, depth, marked } => {
            if marked > 1 {
                return Err(Error::InvalidSpec {
                    field: "marked",
                    reason: format!("expected 0 or 1, got {marked}"),
                });
            }
            let bound: Exact = bound.parse()?;
            let values = ce_truncation(&bound, depth, marked)?;
            let mut text = String::from("value\r\n");
            for v in &values {
                text.push_str(&v.to_fraction_string());
                text.push_str("\r\n");
            }
            if let Some(dir) = cli.out {
                fs::create_dir_all(&dir)?;
                fs::write(dir.join("cantor_table.csv"), &text)?;
            }
            if !cli.quiet {
                for v in &values {
                    println!("{}", v.to_fraction_string());
                }
            }
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

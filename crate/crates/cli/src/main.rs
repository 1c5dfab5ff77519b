// SPDX-License-Identifier: Apache-2.0

use anyhow::{bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use mipreopt::harness::{
    compare_reports, read_report_csv, run_series, write_report, RunConfig, Techniques,
};
use mipreopt::model::{load_instance, load_series, perturb_series, write_series, Component};
use mipreopt::solver::ClockMode;
use std::collections::BTreeSet;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "mipreopt",
    version,
    about = "Solve and score series of similar MIP instances"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Technique {
    Hints,
    History,
    Sb,
    Tuning,
    Turnoff,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Kind {
    Objective,
    Rhs,
    Bounds,
    Matrix,
}

impl From<Kind> for Component {
    fn from(k: Kind) -> Self {
        match k {
            Kind::Objective => Component::Objective,
            Kind::Rhs => Component::Rhs,
            Kind::Bounds => Component::Bounds,
            Kind::Matrix => Component::Matrix,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Solve every instance of a series in order and write the report.
    Run {
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Technique to switch off; repeat for several.
        #[arg(long, value_enum)]
        disable: Vec<Technique>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Measure time in simplex pivots at this many pivots per second.
        #[arg(long, value_name = "PIVOTS_PER_SEC")]
        det_clock: Option<f64>,
        #[arg(long)]
        checkpoint: Option<PathBuf>,
    },
    /// Write a perturbed series derived from one instance.
    Generate {
        #[arg(long)]
        base: PathBuf,
        /// Component to perturb; repeat for several.
        #[arg(long, value_enum, required = true)]
        kind: Vec<Kind>,
        #[arg(long)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 10.0)]
        time_limit: f64,
        #[arg(long, default_value_t = 0.1)]
        magnitude: f64,
    },
    /// Compare two reports batch by batch.
    Score {
        #[arg(long)]
        report: PathBuf,
        #[arg(long)]
        baseline: PathBuf,
    },
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Run {
            manifest,
            out,
            disable,
            seed,
            det_clock,
            checkpoint,
        } => {
            let series = load_series(&manifest)
                .with_context(|| format!("loading {}", manifest.display()))?;
            let mut techniques = Techniques::ALL;
            for d in disable {
                match d {
                    Technique::Hints => techniques.hints = false,
                    Technique::History => techniques.history = false,
                    Technique::Sb => techniques.strong_branching = false,
                    Technique::Tuning => techniques.tuning = false,
                    Technique::Turnoff => techniques.turnoff = false,
                }
            }
            let clock = match det_clock {
                Some(pps) if pps > 0.0 => ClockMode::Deterministic {
                    work_per_second: pps,
                },
                Some(pps) => bail!("--det-clock must be positive, got {pps}"),
                None => ClockMode::Wall,
            };
            let run = RunConfig {
                techniques,
                seed,
                clock,
                checkpoint,
                ..RunConfig::default()
            };
            let report = run_series(&series, &run)?;
            let (csv, json) = write_report(&out, &report)?;
            let s = &report.summary;
            println!(
                "{}: {} instances, mean total score {:.4}, shifted geomean time {:.3}s",
                s.series_name, s.instances, s.mean_total, s.geomean_time
            );
            for b in &s.batches {
                println!("  batch {:>2}-{:<2} {:.4}", b.first, b.last, b.mean_total);
            }
            for (idx, msg) in &s.errors {
                eprintln!("  instance {idx}: {msg}");
            }
            println!("wrote {} and {}", csv.display(), json.display());
        }
        Command::Generate {
            base,
            kind,
            count,
            seed,
            out,
            time_limit,
            magnitude,
        } => {
            let inst =
                load_instance(&base).with_context(|| format!("loading {}", base.display()))?;
            let changing: BTreeSet<Component> = kind.into_iter().map(Component::from).collect();
            let insts = perturb_series(&inst, &changing, count, seed, magnitude)?;
            let path = write_series(&out, &inst.name, time_limit, &changing, &insts)?;
            println!(
                "wrote {} instances, manifest {}",
                insts.len(),
                path.display()
            );
        }
        Command::Score { report, baseline } => {
            let a = read_report_csv(&report)?;
            let b = read_report_csv(&baseline)?;
            if a.is_empty() || b.is_empty() {
                bail!("both reports need at least one instance");
            }
            println!(
                "{:<8} {:>10} {:>10} {:>9}",
                "batch", "baseline", "report", "improv%"
            );
            for row in compare_reports(&a, &b) {
                println!(
                    "{:<8} {:>10.4} {:>10.4} {:>9.2}",
                    row.label, row.baseline, row.report, row.improvement_pct
                );
            }
        }
    }
    Ok(())
}

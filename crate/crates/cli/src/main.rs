use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use swarmform_cli::{parse_seeds, run, Mode, RunManifest};

/// Run formation-flight episodes.
#[derive(Debug, Parser)]
#[command(name = "swarmform", version)]
struct Args {
    /// Scenario (world) TOML file.
    #[arg(long)]
    scenario: Option<PathBuf>,
    /// Swarm configuration TOML file.
    #[arg(long)]
    swarm: Option<PathBuf>,
    /// A single seed.
    #[arg(long, conflicts_with = "seeds")]
    seed: Option<u64>,
    /// Seed list, e.g. `1,4,9` or `1..20`.
    #[arg(long)]
    seeds: Option<String>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::Single)]
    mode: Mode,
}

fn main() -> ExitCode {
    let args = Args::parse();
    if args.mode == Mode::OracleCheck {
        let results = swarmform_oracle::suites::run_all();
        let mut ok = true;
        for r in &results {
            println!("{r}");
            ok &= r.passed();
        }
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(2) };
    }

    let seeds = match (args.seed, args.seeds.as_deref()) {
        (Some(s), _) => Ok(vec![s]),
        (None, Some(list)) => parse_seeds(list),
        (None, None) => Ok(vec![0]),
    };
    let seeds = match seeds {
        Ok(s) => s,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let (Some(scenario), Some(swarm)) = (args.scenario, args.swarm) else {
        eprintln!("error: --scenario and --swarm are required unless --mode oracle-check");
        return ExitCode::from(1);
    };
    let manifest = RunManifest {
        scenario,
        swarm,
        seeds,
        out: args.out,
        mode: args.mode,
    };
    match run(&manifest) {
        Ok(results) => {
            for r in &results {
                let p = &r.report;
                println!(
                    "seed {}: success={} outcome={:?} avg_ef={:.4} max_ef={:.4} t={:.1}s min_scale={}",
                    r.seed, p.success, p.outcome, p.avg_similarity, p.max_similarity, p.completion_time, p.min_scale
                );
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

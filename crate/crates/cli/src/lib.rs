//! Run manifests: load configs, run seeded episodes, write artifacts.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use thiserror::Error;

use swarmform_core::sim::{run_episode, trace_csv, EpisodeReport, SimError, SwarmConfig};
use swarmform_core::world::ScenarioSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Single,
    Sweep,
    OracleCheck,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunManifest {
    pub scenario: PathBuf,
    pub swarm: PathBuf,
    pub seeds: Vec<u64>,
    pub out: PathBuf,
    pub mode: Mode,
}

#[derive(Debug, Error)]
pub enum RunError {
    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },
    #[error("{0}")]
    Manifest(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("seed {seed}: {source}")]
    Episode { seed: u64, source: SimError },
}

impl RunError {
    /// Process exit code: 1 for anything the user can fix in their inputs.
    pub fn exit_code(&self) -> i32 {
        1
    }
}

fn read(path: &Path) -> Result<String, RunError> {
    fs::read_to_string(path).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), RunError> {
    fs::write(path, text).map_err(|source| RunError::Io {
        path: path.to_path_buf(),
        source,
    })
}

pub fn load_scenario(path: &Path) -> Result<ScenarioSpec, RunError> {
    let config = |message: String| RunError::Config {
        path: path.to_path_buf(),
        message,
    };
    let spec: ScenarioSpec = toml::from_str(&read(path)?).map_err(|e| config(e.to_string()))?;
    spec.validate().map_err(|e| config(e.to_string()))?;
    Ok(spec)
}

pub fn load_swarm(path: &Path) -> Result<SwarmConfig, RunError> {
    SwarmConfig::from_toml(&read(path)?).map_err(|e| RunError::Config {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Parses `1,2,5` and inclusive ranges such as `1..20`, in any mix.
pub fn parse_seeds(text: &str) -> Result<Vec<u64>, String> {
    let mut seeds = Vec::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let num = |s: &str| s.trim().parse::<u64>().map_err(|e| format!("bad seed {s:?}: {e}"));
        match part.split_once("..") {
            Some((a, b)) => {
                let (a, b) = (num(a)?, num(b)?);
                if a > b {
                    return Err(format!("empty seed range {part:?}"));
                }
                seeds.extend(a..=b);
            }
            None => seeds.push(num(part)?),
        }
    }
    if seeds.is_empty() {
        return Err("no seeds given".into());
    }
    Ok(seeds)
}

/// The seed replaces both the world seed and the swarm master seed.
pub fn seeded(scenario: &ScenarioSpec, swarm: &SwarmConfig, seed: u64) -> (ScenarioSpec, SwarmConfig) {
    let mut s = scenario.clone();
    s.seed = seed;
    let mut c = swarm.clone();
    c.master_seed = seed;
    (s, c)
}

pub struct SeedResult {
    pub seed: u64,
    pub report: EpisodeReport,
}

/// Runs every seed (in parallel) and returns results sorted by seed.
pub fn run_seeds(scenario: &ScenarioSpec, swarm: &SwarmConfig, seeds: &[u64]) -> Result<Vec<SeedResult>, RunError> {
    let mut sorted = seeds.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    sorted
        .par_iter()
        .map(|&seed| {
            let (s, c) = seeded(scenario, swarm, seed);
            run_episode(&c, &s)
                .map(|report| SeedResult { seed, report })
                .map_err(|source| RunError::Episode { seed, source })
        })
        .collect()
}

pub const EPISODES_HEADER: &str =
    "seed,success,outcome,avg_ef,max_ef,completion_time,min_obstacle_clearance,min_mutual_distance,min_scale";
pub const SUMMARY_HEADER: &str = "environment,episodes,suc(%),avg_ef,avg_ef_max";

pub fn episodes_csv(results: &[SeedResult]) -> String {
    let mut out = format!("{EPISODES_HEADER}\n");
    for r in results {
        let p = &r.report;
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.seed,
            p.success,
            p.outcome.as_str(),
            p.avg_similarity,
            p.max_similarity,
            p.completion_time,
            p.min_obstacle_clearance,
            p.min_mutual_distance,
            p.min_scale
        )
        .unwrap();
    }
    out
}

/// One aggregate row: success rate and mean similarity errors.
pub fn summary_csv(environment: &str, results: &[SeedResult]) -> String {
    let n = results.len() as f64;
    let suc = 100.0 * results.iter().filter(|r| r.report.success).count() as f64 / n;
    let avg = results.iter().map(|r| r.report.avg_similarity).sum::<f64>() / n;
    let max = results.iter().map(|r| r.report.max_similarity).sum::<f64>() / n;
    format!("{SUMMARY_HEADER}\n{environment},{},{suc},{avg},{max}\n", results.len())
}

/// Executes a single or sweep manifest and writes its artifacts.
pub fn run(manifest: &RunManifest) -> Result<Vec<SeedResult>, RunError> {
    let scenario = load_scenario(&manifest.scenario)?;
    let swarm = load_swarm(&manifest.swarm)?;
    match manifest.mode {
        Mode::Single if manifest.seeds.len() != 1 => {
            return Err(RunError::Manifest("single mode takes exactly one seed".into()))
        }
        Mode::OracleCheck => return Err(RunError::Manifest("oracle-check takes no manifest".into())),
        _ => {}
    }
    fs::create_dir_all(&manifest.out).map_err(|source| RunError::Io {
        path: manifest.out.clone(),
        source,
    })?;
    let results = run_seeds(&scenario, &swarm, &manifest.seeds)?;
    for r in &results {
        write(&manifest.out.join(format!("trace_seed{}.csv", r.seed)), &trace_csv(&r.report.trace))?;
        write(&manifest.out.join(format!("report_seed{}.toml", r.seed)), &r.report.to_toml())?;
    }
    if manifest.mode == Mode::Sweep {
        let env = manifest
            .scenario
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        write(&manifest.out.join("episodes.csv"), &episodes_csv(&results))?;
        write(&manifest.out.join("summary.csv"), &summary_csv(&env, &results))?;
    }
    Ok(results)
}

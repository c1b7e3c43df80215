use std::path::{Path, PathBuf};
use std::process::Command;

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn swarmform(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_swarmform")).args(args).output().unwrap()
}

/// A swarm config with a short timeout, written next to the outputs.
fn short_swarm(dir: &Path, timeout: f64) -> PathBuf {
    let base = std::fs::read_to_string(configs().join("swarm.toml")).unwrap();
    let text = format!("episode_timeout = {timeout}\n{base}");
    let path = dir.join("swarm.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn single_run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let swarm = short_swarm(dir.path(), 5.0);
    let out = dir.path().join("out");
    let run = swarmform(&[
        "--scenario",
        configs().join("scenarios/sparse.toml").to_str().unwrap(),
        "--swarm",
        swarm.to_str().unwrap(),
        "--seed",
        "2",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let trace = std::fs::read_to_string(out.join("trace_seed2.csv")).unwrap();
    assert!(trace.starts_with("time,uav,px,py,pz,vx,vy,vz,f,d_obs,scale\n"));
    // Six UAVs per sample, 26 samples over 5 s.
    assert_eq!(trace.lines().count(), 1 + 6 * 26);
    let report = std::fs::read_to_string(out.join("report_seed2.toml")).unwrap();
    assert!(report.contains("outcome = \"timeout\""));
}

#[test]
fn sweeps_are_byte_identical_across_reruns() {
    let dir = tempfile::tempdir().unwrap();
    let swarm = short_swarm(dir.path(), 4.0);
    let run = |name: &str| {
        let out = dir.path().join(name);
        let r = swarmform(&[
            "--scenario",
            configs().join("scenarios/dense.toml").to_str().unwrap(),
            "--swarm",
            swarm.to_str().unwrap(),
            "--seeds",
            "1..2",
            "--mode",
            "sweep",
            "--out",
            out.to_str().unwrap(),
        ]);
        assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
        out
    };
    let a = run("a");
    let b = run("b");
    for file in ["trace_seed1.csv", "trace_seed2.csv", "report_seed1.toml", "episodes.csv", "summary.csv"] {
        let x = std::fs::read(a.join(file)).unwrap();
        let y = std::fs::read(b.join(file)).unwrap();
        assert!(x == y, "{file} differs between reruns");
    }
    let summary = std::fs::read_to_string(a.join("summary.csv")).unwrap();
    assert!(summary.starts_with("environment,episodes,suc(%),avg_ef,avg_ef_max\ndense,2,"));
}

#[test]
fn bad_inputs_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "n_uavs = 6\nunknown_key = true\n").unwrap();
    let scenario = configs().join("scenarios/empty.toml");
    let r = swarmform(&["--scenario", scenario.to_str().unwrap(), "--swarm", bad.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("unknown"));

    let swarm = configs().join("swarm.toml");
    let r = swarmform(&[
        "--scenario",
        scenario.to_str().unwrap(),
        "--swarm",
        swarm.to_str().unwrap(),
        "--seeds",
        "5..1",
    ]);
    assert_eq!(r.status.code(), Some(1));

    let r = swarmform(&["--swarm", swarm.to_str().unwrap()]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn seed_lists_parse() {
    assert_eq!(swarmform_cli::parse_seeds("1..3, 7").unwrap(), vec![1, 2, 3, 7]);
    assert!(swarmform_cli::parse_seeds("").is_err());
    assert!(swarmform_cli::parse_seeds("x").is_err());
}

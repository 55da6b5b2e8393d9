use std::path::{Path, PathBuf};

use gridrisk::outage::synthetic::{synthetic_csv, SyntheticConfig};
use gridrisk::pipeline::cli::main_with_args;
use gridrisk::pipeline::{run, PipelineConfig, Stage, StageStatus};

fn workspace(records: usize) -> tempfile::TempDir {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("outages.csv"), synthetic_csv(&SyntheticConfig { records, ..SyntheticConfig::default() }))
        .unwrap();
    std::fs::write(
        dir.path().join("gridrisk.toml"),
        "out_dir = \"out\"\nseed = 42\n\n[inputs]\noutage_csv = \"outages.csv\"\n",
    )
    .unwrap();
    dir
}

fn cli(dir: &Path, extra: &[&str]) -> i32 {
    let config = dir.join("gridrisk.toml");
    let mut args: Vec<String> = vec!["gridrisk".into(), "--config".into(), config.to_string_lossy().into_owned()];
    args.extend(extra.iter().map(|s| s.to_string()));
    main_with_args(args)
}

fn load(dir: &Path) -> PipelineConfig {
    PipelineConfig::load(dir.join("gridrisk.toml")).unwrap()
}

#[test]
fn full_run_then_up_to_date() {
    let dir = workspace(1500);
    assert_eq!(cli(dir.path(), &["run"]), 0);
    for stage in Stage::ALL {
        assert!(dir.path().join("out").join(stage.as_str()).join("manifest.json").is_file(), "{stage}");
    }
    for f in ["resilience.json", "resilience_table.txt", "resilience.csv", "operability_gap.svg", "failed_by_kind.csv"] {
        assert!(dir.path().join("out/report").join(f).is_file(), "{f}");
    }

    let again = run(&load(dir.path()), &Stage::ALL).unwrap();
    assert!(again.iter().all(|r| r.status == StageStatus::UpToDate));
}

#[test]
fn single_subcommands_chain() {
    let dir = workspace(800);
    assert_eq!(cli(dir.path(), &["network"]), 0);
    assert_eq!(cli(dir.path(), &["scenarios"]), 0);
    assert_eq!(cli(dir.path(), &["simulate"]), 0);
    assert!(dir.path().join("out/simulate/reports.json").is_file());
}

#[test]
fn missing_upstream_is_stage_failure() {
    let dir = workspace(300);
    assert_eq!(cli(dir.path(), &["simulate"]), 2);
}

#[test]
fn tampered_upstream_reruns_downstream_check() {
    let dir = workspace(300);
    assert_eq!(cli(dir.path(), &["run", "--stages", "network,scenarios"]), 0);
    std::fs::write(dir.path().join("out/network/network.json"), "{}").unwrap();
    // upstream output no longer matches its manifest
    assert_eq!(cli(dir.path(), &["simulate"]), 2);
}

#[test]
fn validation_errors_exit_1() {
    let dir = workspace(100);
    assert_eq!(cli(dir.path(), &["bogus"]), 1);
    assert_eq!(cli(dir.path(), &["network", "--stages", "all"]), 1);
    assert_eq!(cli(dir.path(), &["run", "--stages", "ingest,nope"]), 1);

    std::fs::write(dir.path().join("gridrisk.toml"), "out_dir = \"out\"\nseed = 1\n[stats]\nalpha = 1.5\n[inputs]\noutage_csv = \"outages.csv\"\n")
        .unwrap();
    assert_eq!(cli(dir.path(), &["run"]), 1);

    std::fs::write(dir.path().join("gridrisk.toml"), "out_dir = \"out\"\nseed = 1\n").unwrap();
    assert_eq!(cli(dir.path(), &["ingest"]), 1);
    // network stages do not need outage data
    assert_eq!(cli(dir.path(), &["network"]), 0);

    std::fs::write(dir.path().join("gridrisk.toml"), "out_dir = \"out\"\n").unwrap();
    assert_eq!(cli(dir.path(), &["network"]), 1);
    assert_eq!(cli(dir.path(), &["network", "--seed", "3"]), 0);

    let missing: PathBuf = dir.path().join("nope.toml");
    assert_eq!(main_with_args(["gridrisk", "--config", missing.to_str().unwrap(), "run"]), 1);
}

#[test]
fn seed_and_out_overrides() {
    let dir = workspace(600);
    let other = dir.path().join("elsewhere");
    assert_eq!(cli(dir.path(), &["severity", "--out", other.to_str().unwrap(), "--seed", "7"]), 2);
    assert_eq!(cli(dir.path(), &["run", "--stages", "ingest,severity", "--out", other.to_str().unwrap(), "--seed", "7"]), 0);
    assert!(other.join("severity/model.json").is_file());
    assert!(!dir.path().join("out").exists());
}

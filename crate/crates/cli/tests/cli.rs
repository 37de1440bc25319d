//! End-to-end checks of the binary: artifact creation, determinism of
//! outputs, and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn syncsched(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_syncsched"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

const SMALL_CONFIG: &str = r#"
[env]
horizon = 12
seed = 9

[agent]
train_slots = 15
pretrain_transitions = 10
pretrain_steps = 3
minibatch = 8
trunk = [24, 12]
head_hidden = 6
"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("scenario.toml");
    std::fs::write(&path, SMALL_CONFIG).unwrap();
    path
}

#[test]
fn train_then_compare_with_the_learned_policy() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config = config.to_str().unwrap();

    let out = syncsched(&["train", "--config", config, "--out", "run"], dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("run/model.ckpt").exists());
    assert!(dir.path().join("run/training.csv").exists());

    let mut with_learned = std::fs::read_to_string(config).unwrap();
    with_learned.push_str
        ("\n[run]\npolicies = [\"full-sync\", \"greedy\", \"anti-entropy\", \"learned\", \"no-sync\"]\nseeds = [1, 2]\n");
    let config2 = dir.path().join("with_learned.toml");
    std::fs::write(&config2, with_learned).unwrap();

    let out = syncsched(
        &[
            "compare",
            "--config",
            config2.to_str().unwrap(),
            "--checkpoint",
            "run/model.ckpt",
            "--out",
            "cmp",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("cmp/compare.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 5 * 12);
    assert!(csv.contains("learned"));
}

#[test]
fn sweep_produces_grouped_rows() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = syncsched(
        &[
            "sweep",
            "--config",
            config.to_str().unwrap(),
            "--axis",
            "budget-lambda",
            "--values",
            "1,3",
            "--seed",
            "4",
            "--out",
            "sweep",
        ],
        dir.path(),
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(dir.path().join("sweep/sweep.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 4);
}

#[test]
fn gen_topology_prints_a_snippet() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("degrees.toml");
    std::fs::write(&config, "[topology]\ndegree_sequence = [3, 2, 2, 2, 2, 1, 1, 1]\n").unwrap();
    let out = syncsched(
        &["gen-topology", "--config", config.to_str().unwrap(), "--seed", "11"],
        dir.path(),
    );
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("domains = 8"), "{text}");
    assert!(text.contains("edges = ["), "{text}");
}

#[test]
fn config_errors_exit_with_code_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[dynamics]\nnot_a_key = 1\n").unwrap();
    let out = syncsched(&["compare", "--config", bad.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));

    let missing = dir.path().join("nope.toml");
    let out = syncsched(&["train", "--config", missing.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn missing_checkpoint_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("learned.toml");
    std::fs::write(
        &config,
        "[env]\nhorizon = 5\n\n[run]\npolicies = [\"learned\"]\nseeds = [1]\n",
    )
    .unwrap();
    let out = syncsched(&["compare", "--config", config.to_str().unwrap()], dir.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let config = config.to_str().unwrap();
    for out_dir in ["a", "b"] {
        let out = syncsched(
            &["train", "--config", config, "--seed", "5", "--out", out_dir],
            dir.path(),
        );
        assert!(out.status.success());
    }
    let ckpt_a = std::fs::read(dir.path().join("a/model.ckpt")).unwrap();
    let ckpt_b = std::fs::read(dir.path().join("b/model.ckpt")).unwrap();
    assert_eq!(ckpt_a, ckpt_b);
    let csv_a = std::fs::read(dir.path().join("a/training.csv")).unwrap();
    let csv_b = std::fs::read(dir.path().join("b/training.csv")).unwrap();
    assert_eq!(csv_a, csv_b);
}

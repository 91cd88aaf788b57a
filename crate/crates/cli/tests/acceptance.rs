// Copyright 2026 qtailor Contributors
// SPDX-License-Identifier: Apache-2.0

//! Criterion 10: identical config and master seed produce byte-identical
//! artifacts, independent of worker thread count.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::Command;

fn qtailor() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qtailor"))
}

fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for entry in std::fs::read_dir(dir).unwrap() {
        let entry = entry.unwrap();
        out.insert(
            entry.file_name().to_string_lossy().into_owned(),
            std::fs::read(entry.path()).unwrap(),
        );
    }
    out
}

fn run(config: &Path, subcommand: &str, out: &Path, threads: usize) {
    let status = qtailor()
        .arg(subcommand)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .arg("--threads")
        .arg(threads.to_string())
        .status()
        .expect("binary runs");
    assert!(status.success(), "{subcommand} failed");
}

#[test]
fn criterion_10_replay_determinism_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("walk.json");
    std::fs::write(
        &config,
        r#"{
            "experiment": "error-walk",
            "circuit": {"kind": "iswap-chain", "depths": [2, 4, 8, 16, 32], "iswap_steps": 32},
            "noise": {"deltas": [0.01], "process": {"kind": "quasi-static", "std": 0.002}},
            "twirl": {"shots": 64},
            "master_seed": 99
        }"#,
    )
    .unwrap();

    let out1 = dir.path().join("threads1");
    let out4 = dir.path().join("threads4");
    let out4b = dir.path().join("threads4_repeat");
    run(&config, "error-walk", &out1, 1);
    run(&config, "error-walk", &out4, 4);
    run(&config, "error-walk", &out4b, 4);

    let bytes1 = read_dir_bytes(&out1);
    let bytes4 = read_dir_bytes(&out4);
    let bytes4b = read_dir_bytes(&out4b);
    assert_eq!(
        bytes1.keys().collect::<Vec<_>>(),
        bytes4.keys().collect::<Vec<_>>()
    );
    for (name, content) in &bytes1 {
        assert_eq!(
            content, &bytes4[name],
            "{name} differs between 1 and 4 threads"
        );
        assert_eq!(content, &bytes4b[name], "{name} differs between repeats");
    }

    // a second experiment family through the same gate
    let sweep_config = dir.path().join("sweep.json");
    std::fs::write(
        &sweep_config,
        r#"{
            "circuit": {"kind": "iswap-chain"},
            "noise": {"deltas": [0.02, 0.05]},
            "pulse": {"steps": 64, "kind": "cosine"},
            "master_seed": 5
        }"#,
    )
    .unwrap();
    let sweep1 = dir.path().join("sweep1");
    let sweep4 = dir.path().join("sweep4");
    run(&sweep_config, "fidelity-sweep", &sweep1, 1);
    run(&sweep_config, "fidelity-sweep", &sweep4, 4);
    let a = read_dir_bytes(&sweep1);
    let b = read_dir_bytes(&sweep4);
    for (name, content) in &a {
        assert_eq!(content, &b[name], "{name} differs between thread counts");
    }

    println!(
        "ACCEPTANCE 10 PASS: byte-identical artifacts across thread counts \
         ({} error-walk files, {} fidelity-sweep files)",
        bytes1.len(),
        a.len()
    );
}

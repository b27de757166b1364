//! End-to-end tests of the installed binary: exit codes, determinism, seed
//! reporting, JSON output, and the file-format diagnostics.

use rankmedian::{dist, io, Metric, Permutation};
use std::path::PathBuf;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rankmedian"))
}

/// Per-test scratch path; tests run in parallel, so every caller passes a
/// distinct file name.
fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("rankmedian-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

fn stdout_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr_str(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

#[test]
fn gen_is_deterministic_for_a_fixed_seed() {
    let a = scratch("det-a.txt");
    let b = scratch("det-b.txt");
    for path in [&a, &b] {
        let out = bin()
            .args(["gen", "--n", "5", "--m", "3", "--seed", "1"])
            .arg(path)
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", stderr_str(&out));
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn planted_noise_stays_within_one_move() {
    let q = scratch("planted-k1.txt");
    let out = bin()
        .args(["gen", "--n", "12", "--m", "6", "--model", "planted", "--k", "1", "--seed", "9"])
        .arg(&q)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));

    let inst = io::read_instance(&q).unwrap();
    let center_text = std::fs::read_to_string(q.with_extension("txt.center")).unwrap();
    let line: Vec<usize> = center_text
        .split_whitespace()
        .map(|t| t.parse().unwrap())
        .collect();
    let center = Permutation::from_one_based(&line).unwrap();
    for p in &inst.perms {
        // the Ulam metric is in indel units: two per element move
        let d = dist::distance(Metric::Ulam, p, &center, None).unwrap();
        assert!(d <= 2.0, "member drifted {d} from the planted center");
    }
}

#[test]
fn planted_zero_noise_aggregates_to_ratio_one() {
    let q = scratch("planted-k0.txt");
    let out = bin()
        .args(["gen", "--n", "6", "--m", "5", "--model", "planted", "--k", "0", "--seed", "4"])
        .arg(&q)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));

    let out = bin()
        .arg("aggregate")
        .arg(&q)
        .args(["--metric", "kendall", "--verify", "--json", "--seed", "8"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["ratio"], 1.0);
    assert_eq!(report["cost"], 0.0);
    assert_eq!(report["seed"], 8);
    assert_eq!(report["instance"]["n"], 6);
    assert_eq!(report["output"].as_array().unwrap().len(), 6);
}

#[test]
fn malformed_files_name_line_and_column() {
    let q = scratch("malformed.txt");
    std::fs::write(&q, "3 2\n1 2 3\n1 2 x\n").unwrap();
    let out = bin()
        .arg("dist")
        .arg(&q)
        .args(["--metric", "hamming"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_str(&out);
    assert!(err.contains("line 3, column 5"), "diagnostic was: {err}");
}

#[test]
fn cap_violation_exits_with_code_two() {
    let q = scratch("cap.txt");
    let out = bin()
        .args(["gen", "--n", "16", "--m", "5", "--model", "planted", "--k", "0", "--seed", "2"])
        .arg(&q)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));

    // the default per-block enumeration budget overruns a machine's word cap
    // at this size; a tight budget fits
    let out = bin()
        .args(["mpc", "reconstruct"])
        .arg(&q)
        .args(["--seed", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2), "{}", stderr_str(&out));
    assert!(stderr_str(&out).contains("word cap exceeded"));

    let out = bin()
        .args(["mpc", "reconstruct"])
        .arg(&q)
        .args(["--seed", "3", "--tuple-cap", "400", "--json"])
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));
    let report: serde_json::Value = serde_json::from_str(&stdout_str(&out)).unwrap();
    assert_eq!(report["cost"], 0.0);
    assert_eq!(report["trace"]["failed"], false);
}

#[test]
fn missing_metric_is_an_input_error() {
    let q = scratch("nometric.txt");
    std::fs::write(&q, "3 2\n1 2 3\n2 1 3\n").unwrap();
    let out = bin().arg("dist").arg(&q).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("--metric"));
}

#[test]
fn seed_is_printed_when_omitted_and_reproduces_the_run() {
    let a = scratch("entropy-a.txt");
    let out = bin()
        .args(["gen", "--n", "6", "--m", "4"])
        .arg(&a)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));
    let err = stderr_str(&out);
    let seed = err
        .lines()
        .find_map(|l| l.strip_prefix("seed "))
        .expect("entropy seed should be announced on stderr")
        .trim()
        .to_string();

    let b = scratch("entropy-b.txt");
    let out = bin()
        .args(["gen", "--n", "6", "--m", "4", "--seed", &seed])
        .arg(&b)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn verify_suite_rejects_unknown_names() {
    let out = bin().args(["verify", "bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr_str(&out).contains("unknown suite"));
}

#[test]
fn mpc_distance_equals_the_local_kernel() {
    let q = scratch("mpcdist.txt");
    let out = bin()
        .args(["gen", "--n", "40", "--m", "3", "--seed", "6"])
        .arg(&q)
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", stderr_str(&out));

    for metric in ["hamming", "footrule", "kendall", "ulam"] {
        let local = bin()
            .arg("dist")
            .arg(&q)
            .args(["--metric", metric, "--json"])
            .output()
            .unwrap();
        assert!(local.status.success(), "{}", stderr_str(&local));
        let distributed = bin()
            .args(["mpc", "dist"])
            .arg(&q)
            .args(["--metric", metric, "--json"])
            .output()
            .unwrap();
        assert!(distributed.status.success(), "{}", stderr_str(&distributed));
        let a: serde_json::Value = serde_json::from_str(&stdout_str(&local)).unwrap();
        let b: serde_json::Value = serde_json::from_str(&stdout_str(&distributed)).unwrap();
        assert_eq!(a["value"], b["value"], "{metric}");
        assert_eq!(b["trace"]["failed"], false, "{metric}");
    }
}

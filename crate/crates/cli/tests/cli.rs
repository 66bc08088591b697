use std::path::Path;
use std::process::{Command, Output};

use lqcert::scalar::boundary_b;
use lqcert::{Certificate, QExponent, Verdict};

fn lqcert(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lqcert"))
        .args(args)
        .env_remove("RIC_CERTIFY_WORKERS")
        .output()
        .expect("spawn lqcert")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn every_subcommand_has_help() {
    for sub in [
        "pq-table", "boundary", "verify", "verify-cell", "search-qmax", "threshold-q1",
        "lemma3-test", "max-gap", "ric", "recover", "nsp-check", "experiment",
    ] {
        let out = lqcert(&[sub, "--help"]);
        assert_eq!(code(&out), 0, "{sub}");
        assert!(stdout(&out).contains("Usage"), "{sub}");
    }
}

#[test]
fn usage_errors_exit_one() {
    assert_eq!(code(&lqcert(&["no-such-command"])), 1);
    assert_eq!(code(&lqcert(&["verify"])), 1);
    assert_eq!(code(&lqcert(&["max-gap", "--n", "4", "--q", "1.5"])), 1);
}

#[test]
fn pq_table_rows() {
    let out = lqcert(&["pq-table", "--from", "0.1", "--to", "0.9", "--step", "0.1"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    let rows: Vec<Vec<f64>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 9);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    // p_q at 0.3 from the plain power form
    let oracle = 0.15f64.powf(0.3 / 1.7) - 0.15f64.powf(2.0 / 1.7);
    assert!((rows[2][1] - oracle).abs() < 1e-12);
    assert!((rows[4][3] - boundary_b(QExponent::new(0.5).unwrap()).unwrap()).abs() < 1e-15);
    assert_eq!(code(&lqcert(&["pq-table", "--from", "0.5", "--to", "1.0", "--step", "0.1"])), 1);
}

#[test]
fn pq_table_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("table.csv");
    let out = lqcert(&["pq-table", "--from", "0.2", "--to", "0.4", "--step", "0.1", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("q,p_q,dp_dq,B\n0.20000000000000001,"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn theorem7_certified_and_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let out = lqcert(&["verify", "--theorem", "7", "--delta", "0.5", "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let cert = Certificate::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert.verdict, Verdict::Certified);
    assert!(cert.worst_bound < 1.0);
    assert!(cert.cells_checked > 50_000_000);
}

#[test]
fn extended_partition_is_refuted() {
    let out = lqcert(&["verify", "--theorem", "7", "--delta", "0.5", "--q-max", "0.9182"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("witness"));
    let cert = Certificate::from_json(&stdout(&out)).unwrap();
    let w = cert.witness.unwrap();
    assert!((w.t - 0.064).abs() < 1e-3 && (w.q - 0.9182).abs() < 1e-3);
    assert!(w.r >= 1.0);
}

#[test]
fn config_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"delta\": 0.5,");
    assert_eq!(code(&lqcert(&["verify", "--config", &bad])), 1);
    let unknown = write(dir.path(), "unknown.json", r#"{"delta": 0.5, "q_max": 0.5, "colour": 3}"#);
    assert_eq!(code(&lqcert(&["verify", "--config", &unknown])), 1);
    let missing = dir.path().join("missing.json");
    assert_eq!(code(&lqcert(&["verify", "--config", missing.to_str().unwrap()])), 4);

    let cert_path = dir.path().join("job.json");
    let job = format!(
        r#"{{"delta": 0.5, "partitions": [{{"t_lo": 0.1, "t_hi": 0.2, "q_lo": 0.3, "q_hi": 0.4, "t_step": 0.01, "q_step": 0.01}}], "output": {:?}}}"#,
        cert_path.to_str().unwrap()
    );
    let cfg = write(dir.path(), "job_in.json", &job);
    assert_eq!(code(&lqcert(&["verify", "--config", &cfg])), 0);
    let cert = Certificate::from_json(&std::fs::read_to_string(cert_path).unwrap()).unwrap();
    assert_eq!(cert.cells_checked, 100);
}

#[test]
fn verify_cell_bound() {
    let out = lqcert(&["verify-cell", "--t-lo", "0.06", "--t-hi", "0.07", "--q-lo", "0.5", "--q-hi", "0.51", "--delta", "0.5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["below_one"], true);
    // beyond 1/(2 - delta) the corner bound is not valid
    let out = lqcert(&["verify-cell", "--t-lo", "0.6", "--t-hi", "0.7", "--q-lo", "0.5", "--q-hi", "0.51", "--delta", "0.5"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn search_qmax_brackets() {
    assert_eq!(code(&lqcert(&["search-qmax", "--delta", "0.51"])), 1);
    let out = lqcert(&["search-qmax", "--delta", "0.5", "--precision", "1e-4"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    let lo = v["q_certified"].as_f64().unwrap();
    let hi = v["q_failed"].as_f64().unwrap();
    assert!(lo <= 0.9181 && 0.9181 < hi, "[{lo}, {hi})");
    let out = lqcert(&["search-qmax", "--delta", "0.4931", "--precision", "1e-3"]);
    assert!(json(&out)["q_certified"].as_f64().unwrap() >= 0.9181);
}

#[test]
fn q1_threshold_and_parabola() {
    let out = lqcert(&["threshold-q1"]);
    assert_eq!(code(&out), 0);
    assert!((json(&out)["threshold"].as_f64().unwrap() - 0.4931097).abs() < 1e-7);
    assert_eq!(code(&lqcert(&["threshold-q1", "--delta", "0.4931"])), 0);
    let out = lqcert(&["threshold-q1", "--delta", "0.4935"]);
    assert_eq!(code(&out), 2);
    assert!(json(&out)["r_max"].as_f64().unwrap() >= 1.0);
}

#[test]
fn boundary_command() {
    let out = lqcert(&["boundary", "--at", "0.17,0.9181"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert_eq!(v["report"]["decreasing"], true);
    let lo = v["enclosures"][0]["lo"].as_f64().unwrap();
    assert!(lo > 2.0 / 3.0);
}

#[test]
fn lemma3_and_max_gap() {
    let out = lqcert(&["lemma3-test", "--vector", "1,1,1,1", "--q", "0.5"]);
    assert_eq!(code(&out), 0);
    let v = json(&out);
    assert!((v["lhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!((v["rhs"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    let out = lqcert(&["lemma3-test", "--trials", "2000", "--seed", "5"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["violations"], 0);
    let out = lqcert(&["max-gap", "--n", "4", "--q", "0.5"]);
    let v = json(&out);
    assert!((v["r_star"].as_f64().unwrap() - 1.587401).abs() < 1e-5);
    assert!((v["value"].as_f64().unwrap() - 0.944941).abs() < 1e-5);
}

#[test]
fn recovery_commands() {
    let dir = tempfile::tempdir().unwrap();
    let id = write(dir.path(), "id.txt", "{\"m\":2,\"n\":2}\n1,0\n0,1\n");
    let out = lqcert(&["ric", "--matrix", &id, "--k", "1"]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["value"].as_f64().unwrap(), 0.0);

    let ex = write(dir.path(), "ex.txt", "{\"m\":2,\"n\":3}\n1,0,0\n0,1,0\n");
    let out = lqcert(&["recover", "--matrix", &ex, "--b", "1,0", "--q", "0.5"]);
    assert_eq!(code(&out), 0);
    let x: Vec<f64> = json(&out)["x_hat"].as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect();
    assert!((x[0] - 1.0).abs() < 1e-12 && x[1].abs() < 1e-12 && x[2].abs() < 1e-12);

    let one = write(dir.path(), "one.txt", "{\"m\":1,\"n\":2}\n1,1\n");
    let out = lqcert(&["nsp-check", "--matrix", &one, "--t0", "0", "--q", "0.5"]);
    let v = json(&out);
    assert_eq!(v["exact"], true);
    assert!((v["max_tau"].as_f64().unwrap() - 1.0).abs() < 1e-12);

    assert_eq!(code(&lqcert(&["ric", "--matrix", "/nonexistent/m.txt", "--k", "1"])), 4);
    let saved = dir.path().join("g.txt");
    let out = lqcert(&["ric", "--m", "4", "--n", "8", "--matrix-seed", "3", "--k", "2", "--save-matrix", saved.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let again = lqcert(&["ric", "--matrix", saved.to_str().unwrap(), "--k", "2"]);
    assert_eq!(json(&out)["value"], json(&again)["value"]);
}

#[test]
fn experiment_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["experiment", "--m", "10", "--n", "20", "--k-values", "1,3", "--q-values", "0.5,1", "--trials", "5", "--seed", "11"];
    let a = lqcert(&args);
    let b = lqcert(&args);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let mut four = vec!["--workers", "4"];
    four.extend(args);
    assert_eq!(lqcert(&four).stdout, a.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("k,q,success_count,trials\n"));
    assert_eq!(text.lines().count(), 5);

    let cfg = write(
        dir.path(),
        "exp.json",
        r#"{"m": 10, "n": 20, "k_values": [1, 3], "q_values": [0.5, 1.0], "trials": 5, "seed": 11}"#,
    );
    assert_eq!(lqcert(&["experiment", "--config", &cfg]).stdout, a.stdout);
}

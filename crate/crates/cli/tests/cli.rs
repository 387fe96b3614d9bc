use std::process::{Command, Output};

fn guessdec(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_guessdec")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

#[test]
fn simulate_writes_csv_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fer.csv");
    let out = guessdec(&[
        "simulate", "--code", "random:16,8,1", "--channel", "awgn:1,3,code", "--decoder", "gcd", "--stop", "dai",
        "--min-errors", "20", "--max-frames", "2000", "--workers", "2", "--out", path.to_str().unwrap(),
    ]);
    stdout(&out);
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "point,frames,frame_errors,budget_exhausted,fer,avg_queries,q50,q90,q99,avg_ops,seconds");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("1.0,") || lines[1].starts_with("1,"));
}

#[test]
fn simulate_json_to_stdout() {
    let out = guessdec(&[
        "simulate", "--code", "hamming74", "--channel", "bsc:0.05", "--order", "hamming", "--max-frames", "500",
        "--format", "json",
    ]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 1);
    assert_eq!(rows[0]["point"], 0.05);
}

#[test]
fn simulate_reads_a_code_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("h.txt");
    std::fs::write(&path, "7 4\n1110100\n0111010\n1101001\n").unwrap();
    let out = guessdec(&[
        "simulate", "--code", path.to_str().unwrap(), "--channel", "awgn:4,code", "--max-frames", "200",
    ]);
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn missing_code_file_fails_with_diagnostic() {
    let out = guessdec(&["simulate", "--code", "/nonexistent/code.alist", "--channel", "awgn:1,code"]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("error") && err.contains("nonexistent"), "{err}");
}

#[test]
fn incompatible_stop_rule_fails() {
    let out = guessdec(&["simulate", "--code", "hamming74", "--channel", "awgn:1,code", "--stop", "trivial"]);
    assert!(!out.status.success());
    assert!(!out.stderr.is_empty());
}

#[test]
fn decode_prints_json() {
    let out = guessdec(&[
        "decode", "--code", "hamming74", "--llrs", "2.1,-0.3,1.7,3.0,2.2,1.4,0.9", "--soft-output", "2",
    ]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["found"], true);
    assert_eq!(v["codeword"].as_str().unwrap().len(), 7);
    let posts = v["soft_output"]["block_posteriors"].as_array().unwrap();
    assert_eq!(posts.len(), 2);
    assert_eq!(v["soft_output"]["bit_llrs"].as_array().unwrap().len(), 7);
}

#[test]
fn decode_rejects_wrong_llr_count() {
    let out = guessdec(&["decode", "--code", "hamming74", "--llrs", "1,2,3"]);
    assert!(!out.status.success());
}

#[test]
fn rcu_grid_is_monotone() {
    let out = guessdec(&["rcu", "--n", "32", "--k", "16", "--ebn0", "1,2,3", "--samples", "2000", "--format", "json"]);
    let rows: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let eps: Vec<f64> = rows.as_array().unwrap().iter().map(|r| r["epsilon_rcu"].as_f64().unwrap()).collect();
    assert_eq!(eps.len(), 3);
    assert!(eps.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn analyze_small_run() {
    let out = guessdec(&[
        "analyze", "--n", "32", "--rates", "0.75", "--ebn0", "3", "--epsilon", "0.01", "--samples", "2000",
        "--rcu-samples", "2000",
    ]);
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0].split(',').count(), lines[1].split(',').count());
}

use std::collections::HashMap;
use std::path::Path;
use std::process::{Command, Output};

use qgated_polar::circuit::parse_text;
use qgated_polar::harness::{run_sweep, SweepConfig, CSV_HEADER};
use qgated_polar::qgated::DecoderConfig;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qgated-polar")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn data_rows(csv: &str) -> Vec<Vec<String>> {
    csv.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn small_config(dir: &Path, workers: usize) -> SweepConfig {
    SweepConfig {
        snr_db: vec![0.0, 3.0],
        noise_p: vec![0.0, 0.01],
        problems: 40,
        decoder: DecoderConfig { shots: 200, ..DecoderConfig::default() },
        seed: 99,
        workers,
        out: Some(dir.join(format!("w{workers}.csv"))),
        log_problems: Some(dir.join(format!("w{workers}.log.csv"))),
        ..SweepConfig::default()
    }
}

#[test]
fn worker_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let a = run_sweep(&small_config(dir.path(), 1)).unwrap();
    let b = run_sweep(&small_config(dir.path(), 8)).unwrap();
    assert_eq!(a.records, b.records);
    for f in ["csv", "log.csv"] {
        let x = std::fs::read(dir.path().join(format!("w1.{f}"))).unwrap();
        let y = std::fs::read(dir.path().join(format!("w8.{f}"))).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn rows_can_be_rebuilt_from_problem_logs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), 2);
    run_sweep(&cfg).unwrap();
    let log = std::fs::read_to_string(cfg.log_problems.as_ref().unwrap()).unwrap();
    let mut lines = log.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let mut sums: HashMap<(String, String), [u64; 4]> = HashMap::new();
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let e = sums.entry((f[col("snr_db")].into(), f[col("p_bitflip")].into())).or_default();
        for (slot, name) in ["bit_errors", "block_error", "ml_bit_errors", "ml_block_error"].iter().enumerate() {
            e[slot] += f[col(name)].parse::<u64>().unwrap();
        }
    }
    let csv = std::fs::read_to_string(cfg.out.as_ref().unwrap()).unwrap();
    let rows = data_rows(&csv);
    assert_eq!(rows.len(), 4);
    let k = cfg.k as f64;
    for r in rows {
        let s = sums[&(r[0].clone(), r[1].clone())];
        let problems: f64 = r[2].parse().unwrap();
        assert_eq!([r[4].clone(), r[5].clone(), r[8].clone(), r[9].clone()], s.map(|v| v.to_string()));
        assert_eq!(r[6], (s[0] as f64 / (problems * k)).to_string());
        assert_eq!(r[7], (s[1] as f64 / problems).to_string());
        assert_eq!(r[10], (s[2] as f64 / (problems * k)).to_string());
        assert_eq!(r[11], (s[3] as f64 / problems).to_string());
    }
}

#[test]
fn csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig { problems: 3, snr_db: vec![1.0], ..small_config(dir.path(), 1) };
    run_sweep(&cfg).unwrap();
    let csv = std::fs::read_to_string(cfg.out.as_ref().unwrap()).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("# snr_convention=Es/N0"));
    assert_eq!(lines.next(), Some("# seed=99"));
    assert_eq!(lines.next(), Some("# ber_bits=message"));
    assert_eq!(lines.next().unwrap(), CSV_HEADER.join(","));
    assert!(lines.all(|l| l.ends_with(",0.000")));
}

#[test]
fn clean_channel_makes_no_errors() {
    let cfg = SweepConfig {
        snr_db: vec![60.0],
        problems: 200,
        decoder: DecoderConfig::ideal(),
        workers: 2,
        ..SweepConfig::default()
    };
    let r = &run_sweep(&cfg).unwrap().records[0];
    assert_eq!((r.ber, r.bler, r.ml_ber, r.ml_bler), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn ideal_decisions_follow_ml() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = SweepConfig {
        snr_db: vec![0.0, 2.5],
        problems: 300,
        decoder: DecoderConfig::ideal(),
        log_problems: Some(dir.path().join("log.csv")),
        ..SweepConfig::default()
    };
    let out = run_sweep(&cfg).unwrap();
    for l in &out.logs {
        assert_eq!(l.decision, l.ml_decision, "{l:?}");
    }
    for r in &out.records {
        assert_eq!((r.bit_errors, r.block_errors), (r.ml_bit_errors, r.ml_block_errors));
    }
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(SweepConfig { problems: 0, ..SweepConfig::default() }.validate().is_err());
    assert!(SweepConfig { snr_db: vec![], ..SweepConfig::default() }.validate().is_err());
    assert!(SweepConfig { noise_p: vec![1.5], ..SweepConfig::default() }.validate().is_err());
    assert!(SweepConfig::from_toml_str("bogus = 1").is_err());
    let cfg = SweepConfig::from_toml_str("n = 16\nk = 8\nsnr-db = [1, 2.5]\nnoise-p = \"0,0.01\"\nideal = false").unwrap();
    assert_eq!((cfg.n, cfg.k), (16, 8));
    assert_eq!(cfg.snr_db, vec![1.0, 2.5]);
    assert_eq!(cfg.noise_p, vec![0.0, 0.01]);
}

#[test]
fn cli_sweep_grid() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.csv");
    let o = cli(&[
        "sweep", "--n", "8", "--k", "4", "--snr-db", "0,2.5,5", "--noise-p", "0,0.001", "--problems", "1000",
        "--shots", "1000", "--seed", "7", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(data_rows(&std::fs::read_to_string(out).unwrap()).len(), 6);
}

#[test]
fn cli_config_file_with_override() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("sweep.toml");
    std::fs::write(&conf, "snr-db = [1.0, 2.0]\nproblems = 5\nshots = 50\nseed = 3\n").unwrap();
    let o = cli(&["sweep", "--config", conf.to_str().unwrap(), "--snr-db", "-1"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0], "-1");
    assert_eq!(rows[0][2], "5");
    assert!(text.contains("# seed=3"));
}

#[test]
fn cli_decode_prints_schedule() {
    let o = cli(&["decode", "--n", "8", "--k", "4", "--snr-db", "1.5", "--ideal", "--seed", "1"]);
    assert!(o.status.success());
    let text = stdout(&o);
    for key in ["theta_rt=", "m=", "lambda1=", "lambda2=", "decision=", "histogram:"] {
        assert!(text.lines().any(|l| l.starts_with(key)), "missing {key}\n{text}");
    }
}

#[test]
fn cli_ml_matches_ideal_decode() {
    let args = ["--n", "8", "--k", "4", "--snr-db", "0.5", "--seed", "12"];
    let ml = stdout(&cli(&[&["ml"], &args[..]].concat()));
    let q = stdout(&cli(&[&["decode", "--ideal"], &args[..]].concat()));
    let decision = |t: &str| t.lines().find(|l| l.starts_with("decision=")).unwrap().to_string();
    assert_eq!(decision(&ml), decision(&q));
}

#[test]
fn cli_export_circuit_parses_back() {
    let o = cli(&["export-circuit", "--n", "8", "--k", "4", "--p", "0.5,0.5,0.5,0.5,0.5,0.5,0.5,0.5"]);
    assert!(o.status.success());
    let c = parse_text::<f64>(&stdout(&o)).unwrap();
    assert_eq!(c.n_qubits(), 8);
    assert!(c.len() > 100);

    let o = cli(&["export-circuit", "--y", "-1.2,0.3,0.9,-0.4,1.1,-0.8,0.2,1.4", "--snr-db", "2"]);
    assert!(o.status.success());
    parse_text::<f64>(&stdout(&o)).unwrap();
}

#[test]
fn cli_exit_codes() {
    assert_eq!(cli(&["--help"]).status.code(), Some(0));
    assert_eq!(cli(&[]).status.code(), Some(1));
    assert_eq!(cli(&["sweep", "--bogus"]).status.code(), Some(1));
    assert_eq!(cli(&["sweep", "--problems", "0"]).status.code(), Some(1));
    assert_eq!(cli(&["decode", "--p", "0.5,0.5"]).status.code(), Some(1));
    assert_eq!(cli(&["sweep", "--config", "/nonexistent/x.toml"]).status.code(), Some(1));
    let o = cli(&["sweep", "--problems", "1", "--snr-db", "0", "--out", "/nonexistent/dir/r.csv"]);
    assert_eq!(o.status.code(), Some(2));
}

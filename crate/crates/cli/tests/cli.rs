use std::path::Path;
use std::process::{Command, Output};

use cptwb::numerics::max_dist;
use cptwb::zoo;
use cptwb::KrausChannel;
use serde_json::Value;

fn cptwb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cptwb")).args(args).env_remove("CPTWB_THREADS").output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn info_reports_werner_holevo() {
    let v = json_of(&cptwb(&["info", "--family", "werner_holevo", "--dim", "3"]));
    let r = &v["result"];
    assert_eq!(r["d_in"], 3);
    assert_eq!(r["choi_rank"], 3);
    assert_eq!(r["extremality"]["extreme"], true);
    assert_eq!(r["generalized_extreme"], true);
    assert!(r["validation"]["tp_residual"].as_f64().unwrap() < 1e-10);
    for key in ["seed", "version", "config", "tolerances"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
}

#[test]
fn dumped_kraus_reloads_to_same_choi() {
    let dir = tempfile::tempdir().unwrap();
    let dump = dir.path().join("ch.json");
    json_of(&cptwb(&["info", "--family", "shift_subunitary", "--dim", "4", "--seed", "11", "--dump-kraus", path_str(&dump)]));
    let mut spec = zoo::ChannelSpec::new(zoo::Family::ShiftSubunitary).with_dim(4);
    spec.seed = 11;
    let original = spec.build().unwrap();
    let reloaded = KrausChannel::from_json(&std::fs::read_to_string(&dump).unwrap(), true).unwrap();
    assert!(max_dist(&reloaded.choi().matrix, &original.choi().matrix) < 1e-12);
    let v = json_of(&cptwb(&["info", "--input", path_str(&dump)]));
    assert_eq!(v["result"]["d_in"], 4);
}

#[test]
fn szarek_split_from_choi_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("choi.json");
    let mut g = cptwb::sample::stream(3, 0);
    let ch = cptwb::sample::channel(&mut g, 3, 2, 4);
    std::fs::write(&path, serde_json::to_string(&ch.choi()).unwrap()).unwrap();
    let v = json_of(&cptwb(&["decompose", "--mode", "szarek", "--input", path_str(&path)]));
    let r = &v["result"];
    assert_eq!(r["decomposition"]["terms"].as_array().unwrap().len(), 2);
    assert!(r["decomposition"]["residuals"]["reconstruction"].as_f64().unwrap() < 1e-9);
    assert!(r["decomposition"]["residuals"]["diagonal_blocks"].as_f64().unwrap() < 1e-9);
    assert_eq!(r["ar4"]["verified"], true);
    for rank in r["channels"]["choi_ranks"].as_array().unwrap() {
        assert!(rank.as_u64().unwrap() <= 3);
    }
}

#[test]
fn horn_mode_on_bare_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rho.json");
    let rho = cptwb::sample::density(&mut cptwb::sample::stream(5, 0), 4, 2);
    let body = serde_json::json!({ "matrix": cptwb::numerics::json::encode(&rho) });
    std::fs::write(&path, body.to_string()).unwrap();
    let v = json_of(&cptwb(&["decompose", "--mode", "horn", "--input", path_str(&path)]));
    assert_eq!(v["result"]["ar4"]["verified"], true);
    for n in v["result"]["vector_norms"].as_array().unwrap() {
        assert!((n.as_f64().unwrap() - 1.0).abs() < 1e-10);
    }
}

#[test]
fn scan_flips_near_the_threshold() {
    let out = cptwb(&["multscan", "--family", "werner_holevo", "--dim", "3", "--p-grid", "4:5.5:0.25", "--seed", "7", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,nu_a,nu_b,nu_ab_lb,gap,violated"));
    let flags: Vec<(f64, bool)> = lines
        .map(|l| {
            let cols: Vec<&str> = l.split(',').collect();
            (cols[0].parse().unwrap(), cols[5] == "true")
        })
        .collect();
    assert_eq!(flags.len(), 7);
    assert!(flags.iter().all(|&(p, v)| v == (p > 4.79)));
}

#[test]
fn multcheck_json_carries_certificate_and_text_highlights() {
    let args = ["multcheck", "--family", "werner_holevo", "--dim", "3", "--p", "5", "--restarts", "10", "--tensor-restarts", "10"];
    let v = json_of(&cptwb(&args));
    assert_eq!(v["result"]["violated"], true);
    assert_eq!(v["result"]["certificate_input"].as_array().unwrap().len(), 9);
    let text = cptwb(&[&args[..], &["--format", "text"]].concat());
    assert!(String::from_utf8(text.stdout).unwrap().contains("VIOLATED"));
}

#[test]
fn reports_are_byte_identical_across_runs_and_thread_counts() {
    let args = ["numax", "--family", "depolarized_wh", "--dim", "3", "--x", "0.3", "--p", "3", "--seed", "9", "--restarts", "16"];
    let a = cptwb(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_cptwb")).args(args).env("CPTWB_THREADS", "1").output().unwrap();
    assert!(a.status.success() && b.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(json_of(&a)["seed"], 9);
}

#[test]
fn smin_in_bits() {
    let v = json_of(&cptwb(&["smin", "--family", "werner_holevo", "--dim", "3", "--p", "2", "--bits", "--restarts", "8"]));
    assert_eq!(v["result"]["units"], "bits");
    assert!((v["result"]["smin"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn complement_of_identity_is_trace_map() {
    let v = json_of(&cptwb(&["complement", "--family", "identity", "--dim", "3"]));
    assert_eq!(v["result"]["complement"]["d_out"], 1);
    assert!(v["result"]["spectrum_mismatch"].as_f64().unwrap() < 1e-10);
}

#[test]
fn extremality_perturbation() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("dephasing.json");
    let z = cptwb::numerics::real_diag(&[1.0, -1.0]);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let ch = KrausChannel::new(2, 2, vec![cptwb::numerics::identity(2).scale(h), z.scale(h)]).unwrap();
    std::fs::write(&path, ch.to_json()).unwrap();
    let dump = dir.path().join("out.json");
    let v = json_of(&cptwb(&["extremality", "--input", path_str(&path), "--perturb", "0.2", "--dump-kraus", path_str(&dump)]));
    assert_eq!(v["result"]["extremality"]["extreme"], false);
    assert_eq!(v["result"]["perturbation"]["extreme_after"], true);
    assert!(v["result"]["perturbation"]["choi_distance"].as_f64().unwrap() <= 0.2);
    let after = json_of(&cptwb(&["extremality", "--input", path_str(&dump)]));
    assert_eq!(after["result"]["extremality"]["extreme"], true);
}

#[test]
fn output_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let out = cptwb(&["info", "--family", "fss_psi", "--output", path_str(&path)]);
    assert!(out.status.success() && out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["command"], "info");
}

#[test]
fn exit_codes() {
    assert_eq!(cptwb(&["info", "--no-such-flag"]).status.code(), Some(64));
    assert_eq!(cptwb(&["frobnicate"]).status.code(), Some(64));
    assert_eq!(cptwb(&["info", "--family", "nope", "--dim", "3"]).status.code(), Some(64));
    assert_eq!(cptwb(&["multscan", "--family", "werner_holevo", "--dim", "3", "--p-grid", "5:4:1"]).status.code(), Some(64));
    assert_eq!(cptwb(&["info", "--family", "werner_holevo"]).status.code(), Some(2));
    assert_eq!(cptwb(&["numax", "--family", "werner_holevo", "--dim", "3", "--p", "1"]).status.code(), Some(2));
    assert_eq!(cptwb(&["info", "--input", "/nonexistent/ch.json"]).status.code(), Some(2));
    assert_eq!(cptwb(&["--help"]).status.code(), Some(0));
    let bad = Command::new(env!("CARGO_BIN_EXE_cptwb"))
        .args(["info", "--family", "identity", "--dim", "2"])
        .env("CPTWB_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(64));
}

#[test]
fn invalid_channel_file_needs_no_validate() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    let ch = KrausChannel::new_unchecked(2, 2, vec![cptwb::numerics::identity(2).scale(0.5)]);
    std::fs::write(&path, ch.to_json()).unwrap();
    assert_eq!(cptwb(&["info", "--input", path_str(&path)]).status.code(), Some(2));
    let v = json_of(&cptwb(&["info", "--input", path_str(&path), "--no-validate"]));
    assert_eq!(v["result"]["validation"]["trace_preserving"], false);
    assert!(v["result"]["extremality"].is_null());
}

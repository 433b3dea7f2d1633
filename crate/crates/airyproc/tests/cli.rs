use std::io::Write;
use std::process::Command;

use airyproc::cli::run;
use airyproc_core::{airy2, GridParams};

fn call(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let mut full = vec!["airyproc"];
    full.extend_from_slice(args);
    let code = run(full, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(text.as_bytes()).records().map(|r| r.unwrap()).collect()
}

#[test]
fn marginal_rows() {
    let (code, out, _) = call(&["marginal", "--process", "airy1", "-x", "0"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 1);
    let v: f64 = rows[0][1].parse().unwrap();
    assert!(v > 0.0 && v < 1.0);

    let (_, out, _) = call(&["marginal", "-x", "8"]);
    assert!(csv_rows(&out)[0][1].parse::<f64>().unwrap() >= 1.0 - 1e-6);

    let (_, out, _) = call(&["marginal", "--process", "airy2", "-x", "0"]);
    let lib = airy2::marginal_cdf_gue(0.0, &GridParams::default()).unwrap().value;
    assert_eq!(csv_rows(&out)[0][1].parse::<f64>().unwrap().to_bits(), lib.to_bits());
}

#[test]
fn fdd_rows() {
    let (code, out, _) = call(&["fdd", "--both", "-t", "0,1", "-x", "0,0"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 2);
    assert!(rows[0][3].parse::<f64>().unwrap() < 1e-6);

    let (_, one, _) = call(&["fdd", "-t", "0.5", "-x", "-0.3"]);
    let (_, marg, _) = call(&["marginal", "-x", "-0.3"]);
    let a: f64 = csv_rows(&one)[0][1].parse().unwrap();
    let b: f64 = csv_rows(&marg)[0][1].parse().unwrap();
    assert!((a - b).abs() < 1e-12);

    let (_, base, _) = call(&["fdd", "-t", "0,0.5", "-x", "0.2,-0.1"]);
    let (_, moved, _) = call(&["fdd", "--shift", "0.7", "-t", "0,0.5", "-x", "0.2,-0.1"]);
    let a: f64 = csv_rows(&base)[0][1].parse().unwrap();
    let b: f64 = csv_rows(&moved)[0][1].parse().unwrap();
    assert!((a - b).abs() < 1e-8);
}

#[test]
fn hitting_rows() {
    let dir = std::env::temp_dir().join(format!("airyproc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let high = dir.join("high.json");
    std::fs::File::create(&high).unwrap().write_all(br#"{"breakpoints":[[-0.5,8],[0.5,8]]}"#).unwrap();
    let (code, out, _) = call(&["hitting", high.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert!(csv_rows(&out)[0][2].parse::<f64>().unwrap() >= 0.999);

    let flat = dir.join("flat.json");
    std::fs::File::create(&flat).unwrap().write_all(br#"{"breakpoints":[[0,1],[1,1]]}"#).unwrap();
    let (code, out, _) = call(&["hitting", "--tolerance", "1", flat.to_str().unwrap(), "16"]);
    assert_eq!(code, 0);
    let gaps: Vec<f64> = csv_rows(&out)[1..].iter().map(|r| r[4].parse().unwrap()).collect();
    assert_eq!(gaps.len(), 3);
    assert!(gaps.windows(2).all(|w| w[1] < w[0]));

    let bad = dir.join("bad.json");
    std::fs::File::create(&bad).unwrap().write_all(br#"{"breakpoints":[[1,0],[0,0]]}"#).unwrap();
    assert_eq!(call(&["hitting", bad.to_str().unwrap()]).0, 2);
    assert_eq!(call(&["hitting", dir.join("missing.json").to_str().unwrap()]).0, 2);
    assert_eq!(call(&["hitting", flat.to_str().unwrap(), "6"]).0, 2);
}

#[test]
fn local_and_moments_tables() {
    let (code, out, _) = call(&["local", "-x", "0", "-t", "1", "-y", "0.5,8", "--eps", "0.2,0.05", "--output-format", "json"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let rows = v["rows"].as_array().unwrap();
    assert_eq!(rows.len(), 4);
    assert_eq!(v["config"]["command"], "local");
    let g = |i: usize| (rows[i]["g_val"].as_f64().unwrap() - 1.0).abs();
    assert!(g(1) < g(0));
    assert!((rows[3]["h_val"].as_f64().unwrap() - 1.0).abs() < 1e-3);

    let (code, out, err) = call(&["moments", "-t", "0.02,0.04", "--orders", "2,4"]);
    assert_eq!(code, 0);
    let rows = csv_rows(&out);
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().all(|r| r[2].parse::<f64>().unwrap() > 0.0));
    let ratio: f64 = rows[0][3].parse().unwrap();
    assert!((ratio / 3.0 - 1.0).abs() < 0.15);
    assert!(err.contains("slope_order2"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(call(&["marginal"]).0, 2);
    assert_eq!(call(&["fdd", "-t", "1,0", "-x", "0,0"]).0, 2);
    assert_eq!(call(&["fdd", "-t", "0,1", "-x", "0"]).0, 2);
    assert_eq!(call(&["--grid-m", "4", "marginal", "-x", "0"]).0, 2);
    assert_eq!(call(&["moments", "-t", "0.1", "--orders", "3"]).0, 2);
    assert_eq!(call(&["nonsense"]).0, 2);
    assert_eq!(call(&["--help"]).0, 0);
}

#[test]
fn numeric_failures_exit_with_three() {
    // the path formula refuses a cutoff this large
    let (code, _, err) = call(&["fdd", "-t", "0,50", "-x", "0,0"]);
    assert_eq!(code, 3);
    assert!(err.contains("fdd_path_integral"));
    // an impossible tolerance still prints the rows
    let (code, out, _) = call(&["--tolerance", "1e-300", "marginal", "-x", "-1"]);
    assert_eq!(code, 3);
    assert_eq!(csv_rows(&out).len(), 1);
}

#[test]
fn json_output_is_valid() {
    let (code, out, _) = call(&["--output-format", "json", "marginal", "-x", "-1,0,1"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"].as_array().unwrap().len(), 3);
    assert_eq!(v["config"]["grid_m"], 120);
}

#[test]
fn reruns_are_bit_identical() {
    let args = ["fdd", "--both", "-t", "0,0.4,0.9", "-x", "0.1,0.3,-0.2"];
    assert_eq!(call(&args).1, call(&args).1);
    let st = ["selftest", "--criteria", "6", "--samples", "2000", "--output-format", "json"];
    let a: serde_json::Value = serde_json::from_str(&call(&st).1).unwrap();
    let b: serde_json::Value = serde_json::from_str(&call(&st).1).unwrap();
    assert_eq!(a["rows"][0]["detail"], b["rows"][0]["detail"]);
}

#[test]
fn grid_size_from_environment_and_flag() {
    let bin = env!("CARGO_BIN_EXE_airyproc");
    let json = |envm: Option<&str>, flag: Option<&str>| {
        let mut c = Command::new(bin);
        c.env_remove("AIRYPROC_GRID_M");
        if let Some(m) = envm {
            c.env("AIRYPROC_GRID_M", m);
        }
        if let Some(m) = flag {
            c.args(["--grid-m", m]);
        }
        let o = c.args(["--output-format", "json", "marginal", "-x", "0"]).output().unwrap();
        assert!(o.status.success());
        serde_json::from_slice::<serde_json::Value>(&o.stdout).unwrap()["config"]["grid_m"].as_u64().unwrap()
    };
    assert_eq!(json(None, None), 120);
    assert_eq!(json(Some("60"), None), 60);
    assert_eq!(json(Some("60"), Some("80")), 80);
    let o = Command::new(bin).args(["fdd", "-t", "1,0", "-x", "0,0"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
}

use std::process::{Command, Output};

use serde_json::Value;

fn morrey(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_morrey"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let out = morrey(args);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

const EXAMPLES: [&[&str]; 3] = [
    &["constants", "--n", "2", "--p", "4", "--format", "json"],
    &["volumes", "--model", "sphere:2:1", "--rho-grid", "0.1:3.0:30", "--format", "csv"],
    &["quotient", "--model", "euclidean:2", "--profile", "power", "--n", "2", "--p", "4", "--lambda", "1"],
];

#[test]
fn repeated_runs_are_byte_identical() {
    for args in EXAMPLES {
        let a = morrey(args);
        let b = morrey(args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "{args:?}");
    }
}

#[test]
fn constants_record() {
    let v = json(EXAMPLES[0]);
    let r = &v["results"];
    assert!((r["c1"].as_f64().unwrap() - 0.64303).abs() < 1e-5);
    assert_eq!(r["eta"].as_f64().unwrap(), 0.8);
    assert_eq!(r["omega_n"].as_f64().unwrap(), std::f64::consts::PI);
    assert_eq!(v["command"], "constants");
    assert_eq!(v["version"], env!("CARGO_PKG_VERSION"));
    let keys: Vec<&String> = v.as_object().unwrap().keys().collect();
    assert_eq!(keys, ["command", "diagnostics", "inputs", "results", "version"]);
}

#[test]
fn sphere_volumes_csv() {
    let out = morrey(EXAMPLES[1]);
    let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
    assert_eq!(rdr.headers().unwrap(), vec!["rho", "volume", "ratio", "isoperimetric_gap"]);
    let ratios: Vec<f64> = rdr.records().map(|r| r.unwrap()[2].parse().unwrap()).collect();
    assert_eq!(ratios.len(), 30);
    assert!(ratios.windows(2).all(|w| w[1] <= w[0]));
}

#[test]
fn power_quotient_matches_sharp_constant() {
    let v = json(EXAMPLES[2]);
    let c = json(EXAMPLES[0]);
    let q1 = v["results"]["q1"].as_f64().unwrap();
    let c1 = c["results"]["c1"].as_f64().unwrap();
    assert!((q1 * c1 - 1.0).abs() < 1e-8);
}

#[test]
fn csv_and_json_agree() {
    let runs: [&[&str]; 4] = [
        &["quotient", "--model", "hyperbolic:2:1", "--profile", "talenti", "--n", "2", "--p", "4", "--lambda", "1.5", "--which", "q2"],
        &["scan", "--model", "hyperbolic:2:1", "--n", "2", "--p", "4", "--lambda-grid", "0.25:4:5"],
        &["volumes", "--model", "hyperbolic:3:1", "--rho-grid", "0.1:2:7"],
        &["constants", "--n", "3", "--p", "5"],
    ];
    for args in runs {
        let v = json(args);
        let mut csv_args = args.to_vec();
        csv_args.extend(["--format", "csv"]);
        let out = morrey(&csv_args);
        let mut rdr = csv::Reader::from_reader(out.stdout.as_slice());
        let headers = rdr.headers().unwrap().clone();
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        let r = &v["results"];
        for (col, name) in headers.iter().enumerate() {
            let series = match name {
                "q" => "q_values",
                "lambda" if args[0] == "scan" => "lambdas",
                "margin" => "margins",
                "rho" => "radii",
                "volume" => "volumes",
                "ratio" => "ratios",
                "isoperimetric_gap" => "isoperimetric_gaps",
                "status" => continue,
                other => other,
            };
            for (i, row) in rows.iter().enumerate() {
                let expected = if r[series].is_array() { &r[series][i] } else { &r[series] };
                let from_csv: f64 = row[col].parse().unwrap();
                assert_eq!(from_csv, expected.as_f64().unwrap(), "{args:?} {name}");
            }
        }
    }
}

#[test]
fn numeric_inputs_round_trip() {
    let lambda = "0.3";
    let v = json(&["quotient", "--model", "hyperbolic:2:0.7", "--profile", "power", "--n", "2", "--p", "3.3", "--lambda", lambda]);
    assert_eq!(v["inputs"]["lambda"].as_f64().unwrap(), 0.3);
    assert_eq!(v["inputs"]["p"].as_f64().unwrap(), 3.3);
    assert_eq!(v["inputs"]["n"].as_u64().unwrap(), 2);
    let out = morrey(&["quotient", "--model", "hyperbolic:2:0.7", "--profile", "power", "--n", "2", "--p", "3.3", "--lambda", lambda]);
    // echoed literals are 17-digit floats that parse back exactly
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"lambda\":2.9999999999999999e-1"));
    let g = json(&["scan", "--model", "euclidean:2", "--n", "2", "--p", "4", "--lambda-grid", "0.1:0.7:3"]);
    assert_eq!(g["inputs"]["lambda_grid"]["start"].as_f64().unwrap(), 0.1);
    assert_eq!(g["inputs"]["lambda_grid"]["end"].as_f64().unwrap(), 0.7);
}

#[test]
fn exit_codes() {
    let bad: [&[&str]; 7] = [
        &["frobnicate"],
        &["constants", "--n", "2"],
        &["constants", "--n", "2", "--p", "1.5"],
        &["quotient", "--model", "torus:2", "--profile", "power", "--n", "2", "--p", "4", "--lambda", "1"],
        &["quotient", "--model", "euclidean:3", "--profile", "power", "--n", "2", "--p", "4", "--lambda", "1"],
        &["volumes", "--model", "sphere:2:1", "--rho-grid", "0.1:4:5"],
        &["scan", "--model", "euclidean:2", "--n", "2", "--p", "4", "--lambda-grid", "1:2"],
    ];
    for args in bad {
        let out = morrey(args);
        assert_eq!(out.status.code(), Some(1), "{args:?}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
    let impossible = morrey(&[
        "quotient", "--model", "hyperbolic:2:1", "--profile", "power", "--n", "2", "--p", "4",
        "--lambda", "1", "--rel-tol", "1e-20", "--abs-tol", "1e-300",
    ]);
    assert_eq!(impossible.status.code(), Some(2));
    assert_eq!(morrey(&["--help"]).status.code(), Some(0));
    assert_eq!(morrey(&["--version"]).status.code(), Some(0));
}

#[test]
fn diagnose_and_rearrange() {
    let d = json(&["diagnose", "--model", "sphere:2:1", "--n", "2", "--p", "4", "--C", "0.6430370685787438", "--which", "ms1", "--rho-grid", "0.1:3:30"]);
    assert!(d["results"]["worst_margin"].as_f64().unwrap() < 0.0);
    assert_eq!(d["results"]["holds"], false);
    let e = json(&["diagnose", "--model", "euclidean:2", "--n", "2", "--p", "4", "--C", "0.94066603838457796", "--which", "ms2"]);
    for g in e["results"]["gap_integrals"].as_array().unwrap() {
        assert!(g["gap"].as_f64().unwrap().abs() < 1e-9);
    }
    let r = json(&["rearrange", "--model", "hyperbolic:2:1", "--profile", "linear:0,1;1,0", "--n", "2", "--p", "4"]);
    assert!((r["results"]["lambda_star"].as_f64().unwrap() - 1.0422).abs() < 1e-4);
    assert!(r["results"]["polya_szego"]["delta_grad"].as_f64().unwrap() > 0.0);
    let s = json(&["rearrange", "--model", "sphere:2:1", "--profile", "power", "--n", "2", "--p", "4", "--lambda", "1"]);
    assert!(s["results"]["polya_szego"].is_null());
}

use std::path::Path;
use std::process::{Command, Output};

fn revineq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_revineq"))
        .args(args)
        .env_remove("INEQ_SEED")
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn small_verify_passes_with_report_schema() {
    let out = revineq(&[
        "verify",
        "--theorems",
        "t2.1,t2.3",
        "--samples",
        "300",
        "--seed",
        "9",
    ]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["seed"], 9);
    let results = report["results"].as_array().unwrap();
    assert_eq!(results.len(), 2);
    for r in results {
        for key in [
            "theorem_id",
            "samples",
            "violations",
            "min_slack",
            "mean_slack",
            "max_tightness",
            "near_boundary",
            "infeasible",
        ] {
            assert!(r.get(key).is_some(), "missing {key}");
        }
        assert_eq!(r["violations"], 0);
    }
    assert_eq!(results[0]["theorem_id"], "T2.1");
}

#[test]
fn usage_and_parameter_errors_exit_2() {
    assert_eq!(code(&revineq(&["verify", "--rho", "1.5"])), 2);
    assert_eq!(code(&revineq(&["verify", "--no-such-flag"])), 2);
    assert_eq!(code(&revineq(&["verify", "--theorems", "t7.7"])), 2);
    assert_eq!(code(&revineq(&["verify", "--bracket", "4:1"])), 2);
    assert_eq!(
        code(&revineq(&[
            "verify",
            "--rho",
            "0.5",
            "--rho-range",
            "0.1:0.2"
        ])),
        2
    );
    assert_eq!(code(&revineq(&["verify", "--theorems", "p6.1"])), 2);
    assert_eq!(code(&revineq(&["sharpness", "--r-sweep", "1:2:cubic"])), 2);
}

#[test]
fn strict_feasibility_exits_3_on_empty_regions() {
    let args = [
        "verify",
        "--theorems",
        "t2.2",
        "--rho",
        "0.1",
        "--family-size",
        "3",
        "--dim",
        "3:8",
        "--samples",
        "64",
    ];
    let lenient = revineq(&args);
    assert_eq!(code(&lenient), 0);
    assert_eq!(json(&lenient)["results"][0]["infeasible"], 64);
    let mut strict = args.to_vec();
    strict.push("--strict-feasibility");
    assert_eq!(code(&revineq(&strict)), 3);
}

#[test]
fn seed_falls_back_to_environment() {
    let base = ["verify", "--theorems", "dm", "--samples", "50"];
    let explicit = revineq(&[&base[..], &["--seed", "17"]].concat());
    let from_env = Command::new(env!("CARGO_BIN_EXE_revineq"))
        .args(base)
        .env("INEQ_SEED", "17")
        .output()
        .unwrap();
    assert_eq!(explicit.stdout, from_env.stdout);
    assert_ne!(explicit.stdout, revineq(&base).stdout);
}

#[test]
fn csv_format_has_one_row_per_theorem() {
    let out = revineq(&[
        "verify",
        "--theorems",
        "t4.1,t4.2,t4.3",
        "--samples",
        "40",
        "--format",
        "csv",
    ]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    let lines: Vec<_> = text.lines().collect();
    assert_eq!(lines.len(), 4);
    assert!(lines[0].starts_with("theorem_id,samples,violations"));
}

#[test]
fn report_round_trips_and_keeps_the_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.to_str().unwrap();
    assert_eq!(
        code(&revineq(&["verify", "--samples", "100", "--out", p])),
        0
    );
    let original = std::fs::read(&path).unwrap();
    let again = revineq(&["report", p]);
    assert_eq!(code(&again), 0);
    assert_eq!(again.stdout, original);

    let bad = dir.path().join("bad.json");
    let b = bad.to_str().unwrap();
    let faulty = revineq(&[
        "verify",
        "--samples",
        "100",
        "--fault-delta",
        "1e-3",
        "--out",
        b,
    ]);
    assert_eq!(code(&faulty), 1);
    assert!(String::from_utf8_lossy(&faulty.stderr).contains("VIOLATIONS"));
    assert_eq!(code(&revineq(&["report", b])), 1);
    assert_eq!(code(&revineq(&["report", "/nonexistent/report.json"])), 2);
}

#[test]
fn config_file_supplies_flags_and_cli_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ci.toml");
    std::fs::write(
        &cfg,
        "seed = 5\n\n[verify]\ntheorems = \"t2.1\"\nsamples = 30\nfield = \"real\"\n",
    )
    .unwrap();
    let c = cfg.to_str().unwrap();
    let out = revineq(&["--config", c, "verify"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["seed"], 5);
    assert_eq!(r["results"][0]["samples"], 30);
    assert_eq!(r["config"]["field"], "real");

    let out = revineq(&["verify", "--config", c, "--samples", "12"]);
    assert_eq!(json(&out)["results"][0]["samples"], 12);

    std::fs::write(&cfg, "[verify]\nbogus = 1\n").unwrap();
    assert_eq!(code(&revineq(&["--config", c, "verify"])), 2);
    assert_eq!(
        code(&revineq(&["--config", "/nonexistent.toml", "verify"])),
        2
    );
}

#[test]
fn witnesses_reach_equality() {
    for theorem in [
        "dm", "t2.1", "t2.3", "t3.1", "t4.1", "t4.2", "t4.3", "t4.4", "p5.1", "p5.2",
    ] {
        for field in ["real", "complex"] {
            let out = revineq(&["witness", "--theorem", theorem, "--field", field]);
            assert_eq!(code(&out), 0, "{theorem} {field}");
            let doc = json(&out);
            assert_eq!(doc["verification"]["attains_equality"], true);
            assert!(doc["instance"]["predicted_equality"].is_string());
        }
    }
    let out = revineq(&[
        "witness",
        "--theorem",
        "t2.2",
        "--rho",
        "0.9",
        "--family-size",
        "3",
        "--n",
        "5",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["instance"]["xs"].as_array().unwrap().len(), 5);
    // rho^2 < 1 - 1/m leaves no admissible vector
    assert_eq!(
        code(&revineq(&[
            "witness",
            "--theorem",
            "t2.2",
            "--rho",
            "0.1",
            "--family-size",
            "3"
        ])),
        3
    );
}

#[test]
fn sharpness_writes_the_sweep() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("sweep.csv");
    let out = revineq(&[
        "sharpness",
        "--r-sweep",
        "1e-1:1e-6:log",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0);
    let mut rdr = csv::Reader::from_path(&path).unwrap();
    assert_eq!(
        rdr.headers().unwrap(),
        vec!["r", "lhs", "bound", "ratio_to_half"]
    );
    let rows: Vec<Vec<f64>> = rdr
        .records()
        .map(|r| r.unwrap().iter().map(|v| v.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 6);
    assert_eq!(rows[2][0], 1e-3);
    assert!(rows[2][3] >= 0.4999990);
    assert!(rows.windows(2).all(|w| w[1][3] > w[0][3]));
}

fn write_nodes(path: &Path, nodes: &[f64], f: impl Fn(f64) -> (f64, f64)) {
    let mut text = String::from("t,v_0,v_1\n");
    for t in nodes {
        let (a, b) = f(*t);
        text.push_str(&format!("{t},{a},{b}\n"));
    }
    std::fs::write(path, text).unwrap();
}

#[test]
fn integral_campaign_and_csv_input() {
    let out = revineq(&["integral", "--samples", "40", "--seed", "2"]);
    assert_eq!(code(&out), 0);
    let report = json(&out);
    assert_eq!(report["checks"].as_array().unwrap().len(), 3);
    assert_eq!(report["results"].as_array().unwrap().len(), 2);

    // four Gauss-Legendre nodes on [0, 1]
    let (s1, s2) = (
        (3.0 / 7.0 - 2.0 / 7.0 * 1.2f64.sqrt()).sqrt(),
        (3.0 / 7.0 + 2.0 / 7.0 * 1.2f64.sqrt()).sqrt(),
    );
    let nodes: Vec<f64> = [-s2, -s1, s1, s2].iter().map(|x| (x + 1.0) / 2.0).collect();
    let dir = tempfile::tempdir().unwrap();
    let (g, f1, f2) = (
        dir.path().join("g.csv"),
        dir.path().join("f1.csv"),
        dir.path().join("f2.csv"),
    );
    write_nodes(&g, &nodes, |_| (1.0, 0.0));
    write_nodes(&f1, &nodes, |t| (1.0 + 0.2 * t, 0.1));
    write_nodes(&f2, &nodes, |t| (1.0 - 0.1 * t, -0.2 * t));
    let fs = format!("{},{}", f1.display(), f2.display());
    let g = g.to_str().unwrap();

    let out = revineq(&[
        "integral", "--g-csv", g, "--f-csv", &fs, "--rho", "0.5", "--weight", "uniform",
    ]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json(&out);
    assert_eq!(doc["theorem_id"], "P6.1");
    assert_eq!(doc["certificate"]["holds"], true);

    let out = revineq(&[
        "integral",
        "--g-csv",
        g,
        "--f-csv",
        &fs,
        "--bracket",
        "0.5:2",
        "--weight",
        "poly:3",
    ]);
    assert_eq!(code(&out), 2, "unnormalized weight must be rejected");
    let out = revineq(&[
        "integral",
        "--g-csv",
        g,
        "--f-csv",
        &fs,
        "--bracket",
        "0.5:2",
        "--weight",
        "poly:3",
        "--renormalize",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(json(&out)["theorem_id"], "P6.2");

    let out = revineq(&[
        "integral",
        "--g-csv",
        g,
        "--f-csv",
        &fs,
        "--rho",
        "0.01",
        "--weight",
        "uniform",
        "--strict-feasibility",
    ]);
    assert_eq!(code(&out), 3);
    assert!(json(&out)["certificate"].is_null());
}

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(name)
}

fn spherad(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spherad"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn field(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key))
        .unwrap_or_else(|| panic!("no {key} in {text}"))
        .trim()
        .parse()
        .unwrap()
}

#[test]
fn vasiliev_general() {
    let f = fixture("vasiliev.csv");
    let out = spherad(&[
        "estimate",
        f.to_str().unwrap(),
        "--method",
        "general",
        "--sigma-s",
        "0.01",
        "--sigma-m",
        "0.01",
        "--r0",
        "1.5",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!((field(&text, "radius") - 1.00257).abs() < 1e-3);
    assert_eq!(field(&text, "effective_rank"), 2.0);
}

#[test]
fn octahedron_sum() {
    let f = fixture("octahedron.csv");
    let out = spherad(&["estimate", f.to_str().unwrap(), "--method", "sum"]);
    assert!(out.status.success());
    assert!((field(&stdout(&out), "radius") - 1.0).abs() < 1e-12);
}

#[test]
fn flights_json() {
    let f = fixture("flights.csv");
    let out = spherad(&[
        "estimate",
        f.to_str().unwrap(),
        "--arcs",
        "--sigma-s",
        "3.3333",
        "--sigma-m",
        "3.3333",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((v["radius"].as_f64().unwrap() - 6374.57).abs() < 1.0);
    assert_eq!(v["method"], "arcs");
    assert!(v["sigma_r"].as_f64().unwrap() > 0.0);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let garbage = dir.path().join("garbage.csv");
    fs::write(&garbage, "0,x\n1,0\n").unwrap();
    let out = spherad(&["estimate", garbage.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = spherad(&["estimate", dir.path().join("missing.csv").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    let out = spherad(&[
        "estimate",
        fixture("octahedron.csv").to_str().unwrap(),
        "--sigma-s",
        "-1",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // Unit square: singular, so the plain four-point inverse must refuse.
    let square = dir.path().join("square.csv");
    let d = 2f64.sqrt();
    fs::write(
        &square,
        format!("0,{d},2,{d}\n{d},0,{d},2\n2,{d},0,{d}\n{d},2,{d},0\n"),
    )
    .unwrap();
    let out = spherad(&["estimate", square.to_str().unwrap(), "--method", "four"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("ill-conditioned"));
    let out = spherad(&["estimate", square.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(field(&stdout(&out), "effective_rank"), 3.0);

    let out = spherad(&[
        "estimate",
        fixture("octahedron.csv").to_str().unwrap(),
        "--sigma-s",
        "10",
    ]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("insufficient signal"));
}

#[test]
fn optimal_search_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let out = spherad(&[
            "optimal-search",
            "--n-points",
            "4",
            "--radius",
            "1",
            "--seed",
            "3",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert!(out.status.success());
        assert!(field(&stdout(&out), "ratio") <= 1.05);
    }
    let text = fs::read_to_string(&a).unwrap();
    assert_eq!(text, fs::read_to_string(&b).unwrap());

    // Opposite edges of the optimal tetrahedron are equal.
    let pts: Vec<[f64; 3]> = text
        .lines()
        .map(|l| {
            let v: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
            [v[0], v[1], v[2]]
        })
        .collect();
    let dist = |i: usize, j: usize| -> f64 {
        (0..3)
            .map(|k| (pts[i][k] - pts[j][k]).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    for (i, j, k, l) in [(0, 1, 2, 3), (0, 2, 1, 3), (0, 3, 1, 2)] {
        assert!((dist(i, j) - dist(k, l)).abs() < 1e-6);
    }
}

#[test]
fn optimal_search_non_convergence() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("best.csv");
    let out = spherad(&[
        "optimal-search",
        "--n-points",
        "12",
        "--restarts",
        "0",
        "--iterations",
        "1",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(fs::read_to_string(&out_path).unwrap().lines().count(), 12);
}

#[test]
fn montecarlo_report() {
    let args = [
        "montecarlo",
        "--n-points",
        "5",
        "--polar-max",
        "45",
        "--trials",
        "30",
        "--seed",
        "4",
    ];
    let a = spherad(&args);
    let b = spherad(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert!(text.starts_with("# Table III"));
    for m in ["general", "sum", "iterative-fit", "algebraic-fit"] {
        assert!(text.lines().any(|l| l.starts_with(m)), "{m}");
    }

    let out = spherad(&[
        "montecarlo",
        "--n-points",
        "4",
        "--trials",
        "10",
        "--sigma-s",
        "0",
        "--sigma-m",
        "0",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["table"], "Table IV");
    for m in v["methods"].as_array().unwrap() {
        if m["method"] != "sum" {
            assert!(m["mae"].as_f64().unwrap() < 1e-8, "{m}");
        }
    }
}

#[test]
fn platonic_report() {
    let out = spherad(&[
        "platonic",
        "--kind",
        "tetrahedron",
        "--trials",
        "5",
        "--sigma-s",
        "0",
        "--sigma-m",
        "0",
        "--json",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    for m in v["methods"].as_array().unwrap() {
        assert!(m["mae"].as_f64().unwrap() < 1e-9, "{m}");
    }
    let out = spherad(&["platonic", "--kind", "sphere"]);
    assert_eq!(out.status.code(), Some(2));
}

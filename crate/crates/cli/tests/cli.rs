use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn curv(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_curv"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, v: &Value) -> String {
    let path = dir.join(name);
    std::fs::write(&path, v.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

/// `(g∧g)[x,y,z,w] = g_xz g_yw - g_yz g_xw` for `g = diag(1, 1, 1)`.
fn metric_wedge_doc() -> Value {
    let d = |a: usize, b: usize| if a == b { 1.0 } else { 0.0 };
    let mut r = Vec::new();
    for x in 0..3 {
        for y in 0..3 {
            for z in 0..3 {
                for w in 0..3 {
                    r.push(d(x, z) * d(y, w) - d(y, z) * d(x, w));
                }
            }
        }
    }
    json!({"dim": 3, "signature": [3, 0], "R": r})
}

#[test]
fn dims_reproduces_formula_values() {
    let out = curv(&["dims", "--dim", "3", "--signature", "3,0"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    let dim_of = |tag: &str| {
        doc["reports"]
            .as_array()
            .unwrap()
            .iter()
            .find(|r| r["space"] == tag)
            .map(|r| r["empirical_dim"].as_u64().unwrap())
            .unwrap()
    };
    assert_eq!([dim_of("r"), dim_of("a"), dim_of("f"), dim_of("p")], [24, 6, 21, 15]);
    assert!(doc["reports"].as_array().unwrap().iter().all(|r| r["matches_formula"] == true));
}

#[test]
fn decompose_metric_wedge() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "gg.json", &metric_wedge_doc());
    let out = curv(&["decompose", "--mode", "w", "--input", &input]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    let comps = doc["components"].as_array().unwrap();
    assert_eq!(comps.len(), 8);
    assert_eq!(comps[0]["tensor"]["R"], metric_wedge_doc()["R"]);
    for c in &comps[1..] {
        assert!(c["max_norm"].as_f64().unwrap() <= 1e-12);
    }
    assert!(doc["completeness_residual"].as_f64().unwrap() <= 1e-12);

    let st = json_of(&curv(&["decompose", "--mode", "st", "--input", &input]));
    assert_eq!(st["singer_thorpe"]["constant_curvature"], -1.0);
}

#[test]
fn decompose_writes_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "gg.json", &metric_wedge_doc());
    let target = dir.path().join("out.json");
    let out = curv(&["decompose", "--mode", "a", "--input", &input, "--output", target.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: Value = serde_json::from_slice(&std::fs::read(target).unwrap()).unwrap();
    assert_eq!(doc["mode"], "a");
}

#[test]
fn sample_is_deterministic_and_feeds_decompose() {
    let args = ["sample", "--space", "f", "--dim", "4", "--signature", "3,1", "--seed", "9"];
    let a = curv(&args);
    let b = curv(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let doc = json_of(&a);
    assert_eq!(doc["R"].as_array().unwrap().len(), 256);

    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "f.json", &doc);
    let out = curv(&["decompose", "--mode", "w", "--input", &input]);
    assert!(out.status.success());
    assert!(json_of(&out)["completeness_residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn verify_passes_and_is_byte_identical() {
    let args = ["verify", "--dim", "3", "--signature", "3,0", "--samples", "32", "--seed", "0", "--tol", "1e-9"];
    let a = curv(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stderr));
    let b = curv(&args);
    assert_eq!(a.stdout, b.stdout);
    let doc = json_of(&a);
    assert!(doc["lemma_6_1_map_identities"]["pass"].as_bool().unwrap());
}

#[test]
fn verify_failure_exits_3() {
    let out = curv(&["verify", "--suite", "w_completeness", "--dim", "3", "--samples", "4", "--tol", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(json_of(&out)["w_completeness"]["pass"], false);
}

#[test]
fn usage_errors_exit_2() {
    assert_eq!(curv(&["verify", "--suite", "no_such_check"]).status.code(), Some(2));
    assert_eq!(curv(&["sample", "--dim", "3"]).status.code(), Some(2));
    assert_eq!(curv(&["decompose", "--mode", "x", "--input", "a.json"]).status.code(), Some(2));
    assert_eq!(curv(&["sample", "--space", "zz", "--dim", "3", "--signature", "3,0"]).status.code(), Some(2));
}

#[test]
fn data_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let short = write(dir.path(), "short.json", &json!({"dim": 3, "signature": [3, 0], "R": vec![0.0; 80]}));
    let out = curv(&["decompose", "--mode", "w", "--input", &short]);
    assert_eq!(out.status.code(), Some(1));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("81"));
    let missing = dir.path().join("absent.json");
    assert_eq!(curv(&["decompose", "--mode", "w", "--input", missing.to_str().unwrap()]).status.code(), Some(1));
    assert_eq!(
        curv(&["sample", "--space", "r", "--dim", "3", "--signature", "2,0"]).status.code(),
        Some(1)
    );
}

#[test]
fn chart_reports() {
    let dir = tempfile::tempdir().unwrap();
    let chart = json!({
        "dim": 3,
        "metric": {
            "0,0": {"0 0 0": 1.0, "2 0 0": 0.3},
            "1,1": {"0 0 0": 1.0},
            "2,2": {"0 0 0": -1.0, "0 1 0": 0.1},
        },
        "cubic": {"0,0,1": {"0 0 0": 0.5, "0 0 1": 0.2}, "1,2,2": {"1 0 0": -0.4}},
        "domain_note": "near the origin",
    });
    let input = write(dir.path(), "chart.json", &chart);
    let out = curv(&["chart", "--input", &input, "--point", "0.1,-0.2,0.05"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let doc = json_of(&out);
    for k in ["levi_civita", "nabla", "nabla_star"] {
        assert_eq!(doc["curvatures"][k]["R"].as_array().unwrap().len(), 81);
    }
    let out = curv(&["chart", "--input", &input, "--point", "-0.1,0.2,0.05", "--report", "triple"]);
    assert!(out.status.success());
    let doc = json_of(&out);
    for (k, v) in doc["identity_residuals"].as_object().unwrap() {
        assert!(v.as_f64().unwrap() <= 1e-9, "{k}");
    }
    assert_eq!(doc["C_op"].as_array().unwrap().len(), 3);

    let wrong = curv(&["chart", "--input", &input, "--point", "0.1,0.2"]);
    assert_eq!(wrong.status.code(), Some(1));
}

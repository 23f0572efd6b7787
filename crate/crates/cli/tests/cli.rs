use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_oscint"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn schema(name: &str) -> jsonschema::JSONSchema {
    let path = Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("schemas")
        .join(name);
    let v: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    jsonschema::JSONSchema::compile(&v).expect("schema compiles")
}

fn assert_valid(schema_name: &str, v: &Value) {
    let s = schema(schema_name);
    if let Err(errors) = s.validate(v) {
        let msgs: Vec<String> = errors
            .map(|e| format!("{} at {}", e, e.instance_path))
            .collect();
        panic!("{schema_name}: {msgs:#?}");
    };
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}", String::from_utf8_lossy(&o.stdout));
    })
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn write_json(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn fixtures_match_their_schemas() {
    let load = |n: &str| -> Value {
        serde_json::from_str(&std::fs::read_to_string(fixture(n)).unwrap()).unwrap()
    };
    assert_valid("snarl.schema.json", &load("snarl-r4-triple.json"));
    assert_valid("maps.schema.json", &load("maps-r4-triple.json"));
    for p in ["poly-x1y1.json", "poly-twisted.json", "poly-zero.json"] {
        assert_valid("poly.schema.json", &load(p));
    }
    for r in ["sweep-x1x2.json", "sweep-x1y1-adversarial.json"] {
        assert_valid("runspec.schema.json", &load(r));
    }
}

#[test]
fn resolve_bundled_snarl() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "resolve",
        s(&fixture("snarl-r4-triple.json")),
        "--seed",
        "3",
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("resolution.json")).unwrap())
            .unwrap();
    assert_valid("resolve-output.schema.json", &out);
    assert_eq!(out["steps"], 3);
    let chain = out["resolution"]["chain"].as_array().unwrap();
    let terminal = chain.last().unwrap()["subspaces"].as_array().unwrap();
    assert_eq!(terminal.len(), 6);
    assert!(terminal
        .iter()
        .all(|e| e["basis"].as_array().unwrap().len() == 3));
    assert_eq!(out["verification"]["passed"], true);
    let record: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("record.json")).unwrap())
            .unwrap();
    assert_valid("run-record.schema.json", &record);
    assert_eq!(record["seeds"][0], 3);
}

#[test]
fn resolve_from_maps_reports_derived_maps() {
    let o = run(&["resolve", s(&fixture("maps-r4-triple.json"))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout_json(&o);
    assert_valid("resolve-output.schema.json", &out);
    let maps = out["terminal_maps"]["maps"].as_array().unwrap();
    assert_eq!(maps.len(), 6);
    assert!(maps
        .iter()
        .all(|m| m["rows"].as_array().unwrap().len() == 1));
    assert_eq!(out["derived_maps"].as_array().unwrap().len(), 3);
}

#[test]
fn resolve_one_dimensional_input() {
    let dir = tempfile::tempdir().unwrap();
    let snarl = json!({"m": 3, "subspaces": [
        {"label": "a", "basis": [["1","0","0"], ["0","1","0"]]},
        {"label": "b", "basis": [["0","1","0"], ["0","0","1"]]},
        {"label": "c", "basis": [["1","0","0"], ["0","0","1"]]},
    ]});
    let o = run(&["resolve", s(&write_json(dir.path(), "s.json", &snarl))]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out = stdout_json(&o);
    assert_eq!(out["steps"], 0);
    assert_eq!(out["resolution"]["chain"].as_array().unwrap().len(), 1);
}

#[test]
fn resolve_weak_hypothesis_violation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let maps = json!({"m": 4, "maps": [
        {"label": "a", "rows": [["1","0","0","0"], ["0","1","0","0"]]},
        {"label": "b", "rows": [["0","0","1","0"], ["0","0","0","1"]]},
        {"label": "c", "rows": [["1","1","1","0"], ["0","1","0","1"]]},
        {"label": "d", "rows": [["1","0","0","1"]]},
    ]});
    let o = run(&["resolve", s(&write_json(dir.path(), "s.json", &maps))]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("2m"), "{}", stderr(&o));
}

#[test]
fn malformed_input_exits_1_with_location() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.json");
    std::fs::write(
        &p,
        r#"{"m": 4, "subspaces": [{"label": "a", "basis": [["1", "x", "0", "0"]]}]}"#,
    )
    .unwrap();
    let o = run(&["resolve", s(&p)]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(
        err.contains("subspaces[0].basis[0][1]") && err.contains("column"),
        "{err}"
    );
    let o = run(&["resolve", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn degeneracy_reports() {
    let maps = fixture("maps-r4-triple.json");
    let o = run(&["degeneracy", s(&fixture("poly-x1y1.json")), s(&maps)]);
    assert_eq!(o.status.code(), Some(0));
    let r = stdout_json(&o);
    assert_valid("degeneracy-report.schema.json", &r);
    assert_eq!(r["is_degenerate"], true);
    assert_eq!(r["quotient_norm"], 0.0);

    let r = stdout_json(&run(&[
        "degeneracy",
        s(&fixture("poly-twisted.json")),
        s(&maps),
    ]));
    assert_valid("degeneracy-report.schema.json", &r);
    assert_eq!(r["is_degenerate"], false);
    assert!(r["quotient_norm"].as_f64().unwrap() > 0.0);
    assert_eq!(r["certificate"], Value::Null);

    let r = stdout_json(&run(&[
        "degeneracy",
        s(&fixture("poly-zero.json")),
        s(&maps),
    ]));
    assert_eq!(r["is_degenerate"], true);
    assert_eq!(r["quotient_norm"], 0.0);
}

#[test]
fn degeneracy_dimension_mismatch_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_json(
        dir.path(),
        "p.json",
        &json!({"vars": 3, "terms": [{"exps": [1, 1, 0], "coeff": "1"}]}),
    );
    let o = run(&["degeneracy", s(&p), s(&fixture("maps-r4-triple.json"))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("dimension"));
}

fn small_spec(extra: Value) -> Value {
    let mut spec = json!({
        "phase": {"vars": 2, "terms": [{"exps": [2, 0], "coeff": "1"}, {"exps": [0, 3], "coeff": "2"}]},
        "maps": [{"label": "u", "rows": [["1", "0"]]}, {"label": "v", "rows": [["0", "1"]]}],
        "lambdas": [1, 4, 16, 64],
    });
    for (k, v) in extra.as_object().unwrap() {
        spec[k] = v.clone();
    }
    spec
}

#[test]
fn sweep_missing_lambdas_exits_1() {
    let dir = tempfile::tempdir().unwrap();
    let mut spec = small_spec(json!({}));
    spec.as_object_mut().unwrap().remove("lambdas");
    let o = run(&["sweep", s(&write_json(dir.path(), "r.json", &spec))]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("lambdas"));
}

#[test]
fn sweep_nondegenerate_demo_decreases() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("out.csv");
    let js = dir.path().join("out.json");
    let o = run(&[
        "sweep",
        s(&fixture("sweep-x1x2.json")),
        "--out",
        s(&csv),
        "--json",
        s(&js),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "lambda,re,im,abs,nodes,status");
    let abs: Vec<f64> = lines
        .map(|l| l.split(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(abs.len(), 9);
    assert!(abs.windows(2).all(|w| w[1] < w[0]));
    let out: Value = serde_json::from_str(&std::fs::read_to_string(&js).unwrap()).unwrap();
    assert_valid("sweep-output.schema.json", &out);
    assert!(out["fit"]["rho"].as_f64().unwrap() > 0.3);
}

#[test]
fn sweep_adversarial_is_flat() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_json(dir.path(), "r.json", &small_spec(json!({})));
    let o = run(&[
        "sweep",
        s(&spec),
        "--adversarial",
        "--json",
        s(&dir.path().join("o.json")),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let out: Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("o.json")).unwrap()).unwrap();
    assert_eq!(out["mode"], "adversarial");
    assert!(out["relative_spread"].as_f64().unwrap() < 1e-6);
}

#[test]
fn sweep_adversarial_needs_a_degenerate_phase() {
    let o = run(&["sweep", s(&fixture("sweep-x1x2.json")), "--adversarial"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("nondegenerate"));
}

#[test]
fn sweep_node_cap_exits_3_unless_allowed() {
    let dir = tempfile::tempdir().unwrap();
    let spec = small_spec(json!({
        "phase": {"vars": 2, "terms": [{"exps": [1, 1], "coeff": "1"}]},
        "lambdas": [1, 2, 4, 3000],
        "quad": {"max_nodes_per_axis": 32},
    }));
    let p = write_json(dir.path(), "r.json", &spec);
    let o = run(&["sweep", s(&p)]);
    assert_eq!(o.status.code(), Some(3));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.lines().last().unwrap().ends_with("unconverged"));
    let o = run(&["sweep", s(&p), "--allow-unconverged"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn replay_round_trips_and_catches_edits() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "resolve",
        s(&fixture("snarl-r4-triple.json")),
        "--out",
        s(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let rec_path = dir.path().join("record.json");
    let o = run(&["replay", s(&rec_path)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    assert_eq!(stdout_json(&o)["reproduced"], true);

    let mut rec: Value =
        serde_json::from_str(&std::fs::read_to_string(&rec_path).unwrap()).unwrap();
    let mut edited = rec.clone();
    edited["output"]["terminal_general_position"] = json!(false);
    let o = run(&["replay", s(&write_json(dir.path(), "edited.json", &edited))]);
    assert_eq!(o.status.code(), Some(4));
    let report = stdout_json(&o);
    let paths: Vec<&str> = report["diffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|d| d["path"].as_str().unwrap())
        .collect();
    assert!(
        paths.contains(&"/output/terminal_general_position"),
        "{paths:?}"
    );

    rec["tool_version"] = json!("oscint 0.0.1");
    let o = run(&["replay", s(&write_json(dir.path(), "old.json", &rec))]);
    assert!(stderr(&o).contains("warning"));
    // the version is part of the content hash, so only the id differs
    let report = stdout_json(&o);
    let diffs = report["diffs"].as_array().unwrap();
    assert_eq!(diffs.len(), 1);
    assert_eq!(diffs[0]["path"], "/run_id");
}

#[test]
fn replay_sweep_within_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_json(dir.path(), "r.json", &small_spec(json!({})));
    let rec = dir.path().join("rec.json");
    let o = run(&["sweep", s(&spec), "--record", s(&rec)]);
    assert_eq!(o.status.code(), Some(0));
    let o = run(&["replay", s(&rec)]);
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stdout)
    );
    let mut edited: Value = serde_json::from_str(&std::fs::read_to_string(&rec).unwrap()).unwrap();
    let re = edited["output"]["rows"][2]["re"].as_f64().unwrap();
    edited["output"]["rows"][2]["re"] = json!(re * 1.01);
    let o = run(&["replay", s(&write_json(dir.path(), "e.json", &edited))]);
    assert_eq!(o.status.code(), Some(4));
}

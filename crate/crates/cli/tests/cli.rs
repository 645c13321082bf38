//! End-to-end tests of the `qhist` binary: exit codes, report shapes,
//! machine-format round-trips and byte-level determinism.

use std::io::Write;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn qhist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qhist"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn write_scenario(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    let mut f = std::fs::File::create(&path).unwrap();
    f.write_all(contents.as_bytes()).unwrap();
    path.to_string_lossy().into_owned()
}

/// Floats in machine reports are decimal strings; parse one back.
fn float_field(block: &Value, key: &str) -> f64 {
    block["fields"][key]
        .as_str()
        .unwrap_or_else(|| panic!("field {key} missing"))
        .parse()
        .unwrap()
}

fn blocks(doc: &Value) -> &Vec<Value> {
    doc["blocks"].as_array().unwrap()
}

const POLARIZER: &str = r#"{
  "dimension": 2,
  "events": {
    "a": { "angle": 0.0 },
    "b": { "angle": 0.7853981633974483 },
    "abar": { "basis": 2 }
  },
  "histories": { "pol": "(a & b) & abar" },
  "queries": [
    { "kind": "certainty", "target": "pol" },
    { "kind": "absolute_prob", "target": "pol" },
    { "kind": "memory_check", "target": ["a", "b", "abar"] }
  ]
}"#;

#[test]
fn parse_prints_canonical_form() {
    let out = qhist(&["parse", "a & b1|b2 & c"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    assert!(text.contains("canonical: a & (b1 | b2) & c"));
    assert!(text.contains("paths: 2"));
    assert!(text.contains("event b2"));
}

#[test]
fn parse_json_carries_the_ast() {
    let out = qhist(&["parse", "a & (b1 | b2) & c", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["canonical"], "a & (b1 | b2) & c");
    assert_eq!(doc["ast"]["type"], "seq");
    assert_eq!(doc["ast"]["steps"][1]["type"], "alt");
}

#[test]
fn parse_error_exits_2_with_position() {
    let out = qhist(&["parse", "a & & b"]);
    assert_eq!(code(&out), 2);
    let err = stderr(&out);
    assert_eq!(err.lines().count(), 1);
    let doc: Value = serde_json::from_str(err.trim()).unwrap();
    assert_eq!(doc["error"]["exit_code"], 2);
    assert!(doc["error"]["message"]
        .as_str()
        .unwrap()
        .contains("position 4"));
}

#[test]
fn eval_polarizer_quarter_pi() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "pol.json", POLARIZER);
    let out = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let blocks = blocks(&doc);
    assert_eq!(blocks.len(), 3);

    let certainty = float_field(&blocks[0], "certainty");
    assert!((certainty - 0.25).abs() < 1e-12);
    let diff = float_field(&blocks[0], "representation_difference");
    assert!(diff < 1e-10);

    let p = float_field(&blocks[1], "probability");
    assert!((p - 0.125).abs() < 1e-12);

    let chained = float_field(&blocks[2], "p_c_given_a_then_b");
    let direct = float_field(&blocks[2], "p_c_given_b");
    assert!((chained - direct).abs() < 1e-10);
}

#[test]
fn eval_machine_report_round_trips_values() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "pol.json", POLARIZER);
    let out = qhist(&["eval", "--scenario", &path, "--json"]);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    // The parsed decimal string must recover the library's value bit
    // for bit.
    use qhist_core::{parse, EventSpace, Ray, Strictness};
    let mut space = EventSpace::new(2).unwrap();
    space.register("a", Ray::from_angle(0.0)).unwrap();
    space
        .register("b", Ray::from_angle(std::f64::consts::FRAC_PI_4))
        .unwrap();
    space.register("abar", Ray::standard_basis(2, 1)).unwrap();
    let expected = qhist_core::certainty_of(
        &parse("(a & b) & abar").unwrap(),
        &space,
        Strictness::Strict,
    )
    .unwrap();
    let reported = float_field(&blocks(&doc)[0], "certainty");
    assert_eq!(reported.to_bits(), expected.to_bits());
}

#[test]
fn eval_is_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(dir.path(), "pol.json", POLARIZER);
    let a = qhist(&["eval", "--scenario", &path, "--json"]);
    let b = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(a.stdout, b.stdout);
    let c = qhist(&["eval", "--scenario", &path]);
    let d = qhist(&["eval", "--scenario", &path]);
    assert_eq!(c.stdout, d.stdout);
}

#[test]
fn eval_empty_query_list_is_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "empty.json",
        r#"{ "dimension": 3, "events": {}, "histories": {}, "queries": [] }"#,
    );
    let out = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(blocks(&doc).len(), 0);
    assert_eq!(doc["meta"]["dimension"], 3);
}

#[test]
fn unnormalizable_ray_is_a_validation_error_naming_the_event() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.json",
        r#"{ "dimension": 2, "events": { "bad": { "components": [[0, 0], [0, 0]] } } }"#,
    );
    let out = qhist(&["eval", "--scenario", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("'bad'"));
}

#[test]
fn malformed_history_is_a_validation_error_with_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.json",
        r#"{ "dimension": 2, "events": { "a": { "basis": 1 }, "b": { "basis": 2 } },
            "histories": { "h": "a & & b" } }"#,
    );
    let out = qhist(&["eval", "--scenario", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("position 4"));
}

#[test]
fn unknown_query_reference_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "bad.json",
        r#"{ "dimension": 2, "events": {}, "histories": {},
            "queries": [ { "kind": "certainty", "target": "nope" } ] }"#,
    );
    let out = qhist(&["eval", "--scenario", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("nope"));
}

#[test]
fn forbidden_actualization_exits_3_but_reports() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "forbidden.json",
        r#"{ "dimension": 2,
            "events": { "a": { "basis": 1 }, "abar": { "basis": 2 } },
            "histories": { "blocked": "a & abar" },
            "queries": [ { "kind": "actualize", "target": "blocked" },
                         { "kind": "certainty", "target": "blocked" } ] }"#,
    );
    let out = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(code(&out), 3);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let blocks = blocks(&doc);
    assert_eq!(blocks[0]["status"]["ok"], false);
    assert_eq!(blocks[0]["status"]["class"], "evaluation");
    // The later query still ran.
    assert_eq!(blocks[1]["status"]["ok"], true);
    assert_eq!(float_field(&blocks[1], "certainty"), 0.0);
}

#[test]
fn nonorthogonal_alternatives_strict_vs_lenient() {
    let dir = tempfile::tempdir().unwrap();
    let scenario = r#"{ "dimension": 2,
        "events": { "a": { "angle": 0.3 }, "b1": { "angle": 0.0 },
                    "b2": { "angle": 0.2 }, "c": { "angle": 1.0 } },
        "histories": { "h": "a & (b1 | b2) & c" },
        "queries": [ { "kind": "certainty", "target": "h" } ] }"#;
    let path = write_scenario(dir.path(), "overlap.json", scenario);

    let strict = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(code(&strict), 3);
    let doc: Value = serde_json::from_str(&stdout(&strict)).unwrap();
    assert_eq!(blocks(&doc)[0]["status"]["class"], "evaluation");

    let lenient = qhist(&["eval", "--scenario", &path, "--json", "--lenient"]);
    assert_eq!(code(&lenient), 0, "stderr: {}", stderr(&lenient));
    let doc: Value = serde_json::from_str(&stdout(&lenient)).unwrap();
    let block = &blocks(&doc)[0];
    assert_eq!(block["status"]["ok"], true);
    assert!(!block["warnings"].as_array().unwrap().is_empty());
}

#[test]
fn alternative_endpoint_refuses_the_trace_identity() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "altend.json",
        r#"{ "dimension": 2,
            "events": { "a1": { "basis": 1 }, "a2": { "basis": 2 }, "b": { "angle": 0.4 } },
            "histories": { "h": "(a1 | a2) & b" },
            "queries": [ { "kind": "certainty", "target": "h" },
                         { "kind": "loops", "target": "h" } ] }"#,
    );
    let out = qhist(&["eval", "--scenario", &path, "--json"]);
    assert_eq!(code(&out), 3);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let blocks = blocks(&doc);
    // Certainty evaluates (the operator exists) but reports the
    // amplitude route as inapplicable.
    assert_eq!(blocks[0]["status"]["ok"], true);
    assert_eq!(
        blocks[0]["fields"]["amplitude_route"],
        "not applicable (alternative endpoint)"
    );
    // Loops genuinely need elementary endpoints.
    assert_eq!(blocks[1]["status"]["ok"], false);
}

#[test]
fn demo_die_is_uniform() {
    let out = qhist(&["demo", "die", "--faces", "6", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["blocks"][0]["tables"]["absolute probabilities"]
        .as_array()
        .unwrap();
    assert_eq!(rows.len(), 6);
    for row in rows {
        let p: f64 = row["probability"].as_str().unwrap().parse().unwrap();
        assert!((p - 1.0 / 6.0).abs() < 1e-12);
    }
}

#[test]
fn demo_die_rotated_faces_follow_the_cosine() {
    let theta = std::f64::consts::FRAC_PI_6;
    let out = qhist(&[
        "demo",
        "die",
        "--faces",
        "6",
        "--rotate",
        &theta.to_string(),
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let block = &doc["blocks"][1];
    let rows = block["tables"]["conditional probabilities"]
        .as_array()
        .unwrap();
    let p1: f64 = rows[0]["probability"].as_str().unwrap().parse().unwrap();
    assert!((p1 - theta.cos().powi(2)).abs() < 1e-12);
    let sum: f64 = block["fields"]["sum"].as_str().unwrap().parse().unwrap();
    assert!((sum - 1.0).abs() < 1e-10);
}

#[test]
fn demo_polarizer_peak() {
    let out = qhist(&[
        "demo",
        "polarizer",
        "--theta",
        "0.7853981633974483",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let lambda = float_field(&doc["blocks"][0], "certainty");
    assert!((lambda - 0.25).abs() < 1e-12);
}

#[test]
fn demo_polarizer_sweep_has_all_rows() {
    let out = qhist(&[
        "demo",
        "polarizer",
        "--theta",
        "0.3",
        "--sweep",
        "18",
        "--json",
    ]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["blocks"][1]["tables"]["certainty over theta in [0, pi/2]"]
        .as_array()
        .unwrap();
    assert_eq!(rows.len(), 19);
    for row in rows {
        let diff: f64 = row["difference"].as_str().unwrap().parse().unwrap();
        assert!(diff < 1e-12);
    }
}

#[test]
fn demo_double_slit_decomposition() {
    let out = qhist(&["demo", "double-slit", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    let decomposition = &doc["blocks"][0];
    let itrace: f64 = decomposition["fields"]["interference_trace"]["re"]
        .as_str()
        .unwrap()
        .parse()
        .unwrap();
    assert!((itrace - 0.375).abs() < 1e-12);
    assert!(float_field(decomposition, "reassembly_residual") < 1e-12);
    let loops = doc["blocks"][1]["tables"]["loops"].as_array().unwrap();
    assert_eq!(loops.len(), 4);
    let kinds: Vec<&str> = loops.iter().map(|l| l["kind"].as_str().unwrap()).collect();
    assert_eq!(
        kinds,
        vec!["direct", "interference", "interference", "direct"]
    );
}

#[test]
fn demo_double_slit_commuting_kills_interference() {
    let out = qhist(&["demo", "double-slit", "--commuting", "--json"]);
    assert_eq!(code(&out), 0);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(float_field(&doc["blocks"][0], "interference_max_abs") < 1e-12);
    let probabilities = &doc["blocks"][2];
    assert!(float_field(probabilities, "boolean_difference") < 1e-12);
}

#[test]
fn selfcheck_passes_and_respects_seed() {
    let out = qhist(&["selfcheck", "--cases", "100", "--seed", "7", "--json"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let a = qhist(&["selfcheck", "--cases", "100", "--seed", "7", "--json"]);
    assert_eq!(out.stdout, a.stdout);
    let doc: Value = serde_json::from_str(&stdout(&out)).unwrap();
    for block in blocks(&doc) {
        assert_eq!(block["status"]["ok"], true, "block {}", block["title"]);
        assert_eq!(block["fields"]["pass"], true);
    }
}

#[test]
fn angle_shorthand_is_dimension_2_only() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        dir.path(),
        "angle3.json",
        r#"{ "dimension": 3, "events": { "a": { "angle": 0.5 } } }"#,
    );
    let out = qhist(&["eval", "--scenario", &path]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("dimension 2"));
}

#[test]
fn basis_index_is_one_based_and_bounded() {
    let dir = tempfile::tempdir().unwrap();
    for bad in [r#"{ "basis": 0 }"#, r#"{ "basis": 3 }"#] {
        let path = write_scenario(
            dir.path(),
            "basis.json",
            &format!(r#"{{ "dimension": 2, "events": {{ "a": {bad} }} }}"#),
        );
        let out = qhist(&["eval", "--scenario", &path]);
        assert_eq!(code(&out), 2);
        assert!(stderr(&out).contains("out of range"));
    }
}

#[test]
fn missing_scenario_file_exits_2() {
    let out = qhist(&["eval", "--scenario", "/nonexistent/nope.json"]);
    assert_eq!(code(&out), 2);
    let doc: Value = serde_json::from_str(stderr(&out).trim()).unwrap();
    assert_eq!(doc["error"]["class"], "validation");
}

use std::f64::consts::PI;
use std::io::Write;
use std::process::{Command, Output, Stdio};
use std::time::Instant;

use num_complex::Complex64 as C;
use scpoly::geometry::{interior_angles, is_simple};
use scpoly::{ChartPoint, LabelledPolygon, ScMap};
use serde_json::Value;

fn scpoly(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_scpoly")).args(args).env_remove("SCPOLY_TOL").output().unwrap()
}

fn stdout(out: &Output) -> String {
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn error_kind(out: &Output) -> String {
    let body: Value = serde_json::from_slice(&out.stderr).expect("stderr is a JSON error body");
    body["error"]["kind"].as_str().unwrap().to_string()
}

const SQUARE: &str = r#"{"n":4,"vertices":[[0,0],[1,0],[1,1],[0,1]]}"#;
const BOWTIE: &str = r#"{"n":4,"vertices":[[0,0],[1,1],[1,0],[0,1]]}"#;

#[test]
fn forward_of_chart_origin_is_equilateral() {
    let out = stdout(&scpoly(&["forward", r#"{"n":3,"z":[],"a":[0,0]}"#]));
    let poly: LabelledPolygon = serde_json::from_str(&out).unwrap();
    for t in interior_angles(&poly).unwrap().values {
        assert!((t - PI / 3.0).abs() < 1e-9);
    }
}

#[test]
fn forward_pentagon_is_simple() {
    let out = stdout(&scpoly(&["forward", r#"{"n":5,"z":[1.3,-2.1],"a":[0.4,-2.5,1.9,2.2]}"#]));
    let poly: LabelledPolygon = serde_json::from_str(&out).unwrap();
    assert!(is_simple(&poly).unwrap());
}

#[test]
fn forward_then_invert_round_trips() {
    let chart = r#"{"n":6,"z":[0.4,-1.2,2.0],"a":[1.1,-0.3,2.4,-1.7,0.6]}"#;
    let poly = stdout(&scpoly(&["forward", chart]));
    let inv: Value = serde_json::from_str(&stdout(&scpoly(&["invert", &poly]))).unwrap();
    let got: ChartPoint = serde_json::from_value(inv["chart"].clone()).unwrap();
    let want: ChartPoint = serde_json::from_str(chart).unwrap();
    assert!(got.sup_distance(&want) < 1e-6);
    assert_eq!(inv["report"]["converged"], Value::Bool(true));
}

#[test]
fn similar_polygons_get_the_same_chart() {
    let poly: LabelledPolygon =
        serde_json::from_str(&stdout(&scpoly(&["forward", r#"{"n":5,"z":[0.2,0.9],"a":[0.5,1.0,-0.5,0.3]}"#])))
            .unwrap();
    let moved = scpoly::scmap::apply_similarity(&poly, C::new(0.0, -3.0), C::new(7.0, 1.0)).unwrap();
    let chart = |p: &LabelledPolygon| -> ChartPoint {
        let v: Value = serde_json::from_str(&stdout(&scpoly(&["invert", &serde_json::to_string(p).unwrap()]))).unwrap();
        serde_json::from_value(v["chart"].clone()).unwrap()
    };
    assert!(chart(&poly).sup_distance(&chart(&moved)) < 1e-8);
}

#[test]
fn exit_codes() {
    let bad_json = scpoly(&["forward", r#"{"n":3,"#]);
    assert_eq!(bad_json.status.code(), Some(2));
    assert_eq!(error_kind(&bad_json), "validation");
    assert_eq!(scpoly(&["invert", BOWTIE]).status.code(), Some(2));
    assert_eq!(scpoly(&["sweep", "--n", "5", "--samples", "0"]).status.code(), Some(2));
    assert_eq!(scpoly(&["forward", "/no/such/file.json"]).status.code(), Some(2));
    assert_eq!(scpoly(&["--tol", "-1", "forward", r#"{"n":3,"z":[],"a":[0,0]}"#]).status.code(), Some(2));

    let map = stdout(&scpoly(&["unchart", r#"{"n":4,"z":[0.5],"a":[0.3,-0.2,0.1]}"#]));
    let near_prevertex = scpoly(&["eval", &map, "[[0,1e-320]]"]);
    assert_eq!(near_prevertex.status.code(), Some(3));
    assert_eq!(error_kind(&near_prevertex), "numerical");

    let hard = stdout(&scpoly(&["forward", r#"{"n":8,"z":[2.9,-2.8,2.7,-2.9,2.5],"a":[2.9,-2.9,2.8,-2.7,2.9,-2.9,2.9]}"#]));
    let stalled = scpoly(&["invert", &hard, "--max-iterations", "1"]);
    assert_eq!(stalled.status.code(), Some(4));
    assert_eq!(error_kind(&stalled), "non_convergence");
}

#[test]
fn malformed_inputs_never_panic() {
    let cases = [
        r#"{}"#,
        r#"[]"#,
        r#"{"n":-3,"z":[],"a":[0,0]}"#,
        r#"{"n":3,"z":[],"a":[0]}"#,
        r#"{"n":3,"z":[],"a":[1e400,0]}"#,
        r#"{"n":4,"z":["x"],"a":[0,0,0]}"#,
        r#"{"n":100000000000,"z":[],"a":[]}"#,
        r#"{"n":3,"vertices":[[0,0],[0,0],[1,1]]}"#,
        r#"{"n":2,"vertices":[[0,0],[1,1]]}"#,
        r#"{"n":3,"prevertices":[0,-1],"alphas":[0.25,0.25,0.5],"A":[1,0],"B":[0,0],"mode":"standard"}"#,
        r#"{"n":3,"prevertices":[-1,0],"alphas":[0.25,0.25,0.5],"A":[0,0],"B":[0,0],"mode":"standard"}"#,
        r#"{"n":3,"prevertices":[-1,0],"alphas":[2.5,-0.5,1.0],"A":[1,0],"B":[0,0],"mode":"sideways"}"#,
        "not json",
    ];
    for input in cases {
        for cmd in ["forward", "invert", "render", "chart", "unchart"] {
            let out = scpoly(&[cmd, input]);
            if cmd == "render" && input.contains("[0,0],[0,0]") {
                // A repeated vertex is still drawable.
                assert!(out.status.success());
                continue;
            }
            let code = out.status.code().unwrap();
            assert!(code == 2 || code == 3, "{cmd} {input}: exit {code}");
            error_kind(&out);
        }
        let out = scpoly(&["eval", input, "[[0,1]]"]);
        assert!(matches!(out.status.code(), Some(2 | 3)), "eval {input}");
    }
    let map = stdout(&scpoly(&["unchart", r#"{"n":3,"z":[],"a":[0,0]}"#]));
    for pts in ["[[0]]", "[[0,-1]]", r#"[["a","b"]]"#, "[[1e400,1]]", "{}"] {
        let out = scpoly(&["eval", &map, pts]);
        assert_eq!(out.status.code(), Some(2), "{pts}");
    }
}

#[test]
fn sweep_is_deterministic_and_respects_seed() {
    let run = |seed: &str| stdout(&scpoly(&["--seed", seed, "sweep", "--n", "5", "--samples", "64"]));
    let a = run("7");
    assert_eq!(a, run("7"));
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["simple_count"], 64);
    assert_eq!(v["tested"], 64);
    let out: Value =
        serde_json::from_str(&stdout(&scpoly(&["--seed", "1", "sweep", "--n", "6", "--samples", "1200"]))).unwrap();
    for inst in out["nonsimple_instances"].as_array().unwrap() {
        assert!(inst["winding"].as_i64().unwrap() >= 2);
    }
}

#[test]
fn render_square_and_marked_hexagon() {
    let svg = stdout(&scpoly(&["render", SQUARE]));
    assert_eq!(svg.matches("<path").count(), 1);
    assert!(svg.contains("Z\""));
    let hexagon = r#"{"n":6,"vertices":[[6,1],[5,6],[3,1],[5,4],[5,2],[0,3]]}"#;
    let svg = stdout(&scpoly(&["render", hexagon, "--find-witness"]));
    assert_eq!(svg.matches("class=\"witness\"").count(), 1);
    let svg2 = stdout(&scpoly(&["render", hexagon, "--witness", "-1.5,2"]));
    assert!(svg2.contains(r#"cx="-1.500000" cy="-2.000000""#));
}

#[test]
fn render_map_with_grid_is_byte_stable() {
    let map = stdout(&scpoly(&["unchart", r#"{"n":5,"z":[0.1,0.3],"a":[0.2,0.1,-0.3,0.4]}"#]));
    let a = stdout(&scpoly(&["render", &map, "--grid", "4", "--grid-samples", "16"]));
    assert_eq!(a.matches("class=\"grid\"").count(), 8);
    assert_eq!(a, stdout(&scpoly(&["render", &map, "--grid", "4", "--grid-samples", "16"])));
    assert_eq!(scpoly(&["render", SQUARE, "--grid", "3"]).status.code(), Some(2));
}

#[test]
fn eval_base_point_and_prevertices() {
    let map_json = r#"{"n":4,"prevertices":[-1,0,1.7],"alphas":[0.5,0.7,0.4,0.4],"A":[0.5,2],"B":[3,-1],"mode":"standard"}"#;
    let map: ScMap = serde_json::from_str(map_json).unwrap();
    let w: Vec<[f64; 2]> = serde_json::from_str(&stdout(&scpoly(&["eval", map_json, "[[0,1],[-1,0],[0,0],[1.7,0]]"]))).unwrap();
    assert_eq!(w[0], [3.0, -1.0]);
    let poly = map.polygon(1e-10).unwrap();
    for k in 0..3 {
        assert!((C::new(w[k + 1][0], w[k + 1][1]) - poly.vertex(k)).norm() < 1e-9);
    }
}

#[test]
fn eval_batch_of_a_thousand_points() {
    let map = stdout(&scpoly(&["unchart", r#"{"n":7,"z":[0.3,-0.4,1.1,0.2],"a":[0.5,-0.5,1.0,0.2,-0.8,0.3]}"#]));
    let pts: Vec<[f64; 2]> = (0..1000).map(|k| [-3.0 + 0.006 * k as f64, 0.01 + 0.002 * (k % 97) as f64]).collect();
    let pts = serde_json::to_string(&pts).unwrap();
    let start = Instant::now();
    let w: Vec<[f64; 2]> = serde_json::from_str(&stdout(&scpoly(&["eval", &map, &pts]))).unwrap();
    let elapsed = start.elapsed();
    assert_eq!(w.len(), 1000);
    assert!(elapsed.as_secs_f64() < 5.0, "{elapsed:?}");
}

#[test]
fn chart_unchart_and_output_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.json");
    let chart = r#"{"n":5,"z":[0.25,-0.5],"a":[0.1,0.2,-0.3,0.4]}"#;
    stdout(&scpoly(&["--output", path.to_str().unwrap(), "unchart", chart]));
    let back: ChartPoint = serde_json::from_str(&stdout(&scpoly(&["chart", path.to_str().unwrap()]))).unwrap();
    assert!(back.sup_distance(&serde_json::from_str(chart).unwrap()) < 1e-12);
}

#[test]
fn stdin_input_and_tolerance_from_environment() {
    let mut child = Command::new(env!("CARGO_BIN_EXE_scpoly"))
        .args(["chart"])
        .env_remove("SCPOLY_TOL")
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"n":3,"prevertices":[-1,0],"alphas":[0.25,0.25,0.5],"A":[1,0],"B":[0,0],"mode":"standard"}"#)
        .unwrap();
    assert!(child.wait_with_output().unwrap().status.success());

    let with_env = |tol: &str| {
        Command::new(env!("CARGO_BIN_EXE_scpoly"))
            .args(["forward", r#"{"n":3,"z":[],"a":[0,0]}"#])
            .env("SCPOLY_TOL", tol)
            .output()
            .unwrap()
    };
    assert_eq!(with_env("0.5").status.code(), Some(2));
    assert_eq!(with_env("abc").status.code(), Some(2));
    assert!(with_env("1e-9").status.success());
    // An explicit flag wins over the environment.
    let out = Command::new(env!("CARGO_BIN_EXE_scpoly"))
        .args(["--tol", "1e-9", "forward", r#"{"n":3,"z":[],"a":[0,0]}"#])
        .env("SCPOLY_TOL", "0.5")
        .output()
        .unwrap();
    assert!(out.status.success());
}

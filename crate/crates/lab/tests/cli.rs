mod common;

use common::{check_schema, run_in, Fixtures};
use contraction_core::{ContractionKind, TriangleFunction};
use contraction_lab::{run_command, Status};
use serde_json::Value;

fn run(f: &Fixtures, args: &[&str]) -> (i32, Value) {
    let r = run_in(f.dir(), args, None);
    let v = r.json();
    check_schema(&v).unwrap_or_else(|e| panic!("{:?}: {}", args, e));
    (r.code, v)
}

#[test]
fn three_point_space_under_power_half_is_valid() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "validate",
            "--space",
            "r25.json",
            "--phi",
            r#"{"kind":"power","q":0.5}"#,
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(v["status"], "ok");
    assert_eq!(v["payload"]["triangle"]["violation_count"], 0);
    assert_eq!(v["payload"]["b_constant"], 1.5);
}

#[test]
fn three_point_space_is_not_a_metric() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "validate",
            "--space",
            "r25.json",
            "--phi",
            r#"{"kind":"additive"}"#,
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["status"], "violation");
    let first = &v["payload"]["triangle"]["violations"][0];
    assert_eq!(
        (&first["x"], &first["y"], &first["z"]),
        (&"y".into(), &"z".into(), &"x".into())
    );
    assert_eq!(first["lhs"], 3.0);
    assert_eq!(first["rhs"], 2.0);
}

#[test]
fn halving_map_converges_to_zero() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "iterate",
            "--space",
            "unit.json",
            "--map",
            r#"{"expr":"x/2"}"#,
            "--x0",
            "1",
        ],
    );
    assert_eq!(code, 0);
    let trace = &v["payload"]["trace"];
    assert_eq!(trace["stop_reason"], "converged");
    let last = trace["orbit"]
        .as_array()
        .unwrap()
        .last()
        .unwrap()
        .as_f64()
        .unwrap();
    assert!(last.abs() < 1e-9);
    assert_eq!(trace["rate_estimate"], 0.5);
}

#[test]
fn interval_space_validation_runs_the_continuity_battery() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "validate",
            "--space",
            "unit.json",
            "--phi",
            r#"{"kind":"max"}"#,
        ],
    );
    // |x - y| is a metric, not an ultrametric.
    assert_eq!(code, 1);
    assert_eq!(v["payload"]["triangle"]["scope"], "sampled");
    assert_eq!(v["payload"]["continuity"]["passed"], true);
    let (code, v) = run(&f, &["validate", "--space", "unit.json"]);
    assert_eq!(code, 0);
    assert_eq!(v["payload"]["b_constant"], Value::Null);

    f.write("sq.json", r#"{"lo":0,"hi":1,"dist":"(x-y)^2"}"#);
    let (code, v) = run(&f, &["validate", "--space", "sq.json"]);
    assert_eq!(code, 1);
    assert!(v["payload"]["continuity"]["report"]["refused"].is_string());
    let (code, _) = run(
        &f,
        &[
            "validate",
            "--space",
            "sq.json",
            "--phi",
            r#"{"kind":"power","q":0.5}"#,
        ],
    );
    assert_eq!(code, 0);
}

#[test]
fn broken_spaces_are_violations_or_errors() {
    let f = Fixtures::new();
    f.write("asym.json", r#"{"labels":["a","b"],"dist":[[0,1],[2,0]]}"#);
    let (code, v) = run(&f, &["validate", "--space", "asym.json"]);
    assert_eq!(code, 1);
    assert_eq!(v["payload"]["semimetric"]["valid"], false);

    f.write("ragged.json", r#"{"labels":["a","b"],"dist":[[0,1],[1]]}"#);
    let (code, v) = run(&f, &["validate", "--space", "ragged.json"]);
    assert_eq!(code, 2);
    assert_eq!(v["status"], "error");

    f.write("neither.json", r#"{"points":3}"#);
    let (code, v) = run(&f, &["validate", "--space", "neither.json"]);
    assert_eq!(code, 2);
    assert!(v["payload"]["error"].as_str().unwrap().contains("labels"));

    let (code, _) = run(&f, &["validate", "--space", "missing.json"]);
    assert_eq!(code, 2);
}

#[test]
fn classify_fits_every_class() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "classify",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,1]}"#,
        ],
    );
    assert_eq!(code, 0);
    let classes = v["payload"]["classes"].as_array().unwrap();
    assert_eq!(classes.len(), 6);
    assert_eq!(v["payload"]["fixed_points"], serde_json::json!(["x"]));
    let bianchini = classes.iter().find(|c| c["tag"] == "bianchini").unwrap();
    assert_eq!(bianchini["verification"]["status"], "certified");
    assert_eq!(bianchini["estimate"]["outcome"]["form"], "single");
}

#[test]
fn classify_with_a_given_kind() {
    let f = Fixtures::new();
    // A 3-cycle moves every point; no Bianchini constant below 1 fits.
    let (code, v) = run(
        &f,
        &[
            "classify",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[1,2,0]}"#,
            "--kind",
            r#"{"tag":"bianchini","beta":0.5}"#,
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["status"], "violation");
    assert_eq!(
        v["payload"]["classes"][0]["verification"]["status"],
        "violated"
    );

    // In class, but b-metric chains diverge for this rate.
    f.write(
        "b.json",
        r#"{"labels":["a","b","c"],"dist":[[0,1,1],[1,0,3],[1,3,0]]}"#,
    );
    let (code, v) = run(
        &f,
        &[
            "classify",
            "--space",
            "b.json",
            "--map",
            r#"{"images":[0,0,0]}"#,
            "--phi",
            r#"{"kind":"bscaled","K":2}"#,
            "--kind",
            r#"{"tag":"partial","alpha":0.3,"beta":0.3}"#,
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["status"], "not-applicable");
}

#[test]
fn map_argument_accepts_a_file() {
    let f = Fixtures::new();
    let map = f.write("map.json", r#"{"images":[0,0,1]}"#);
    let (code, v) = run(
        &f,
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            map.to_str().unwrap(),
            "--x0",
            "z",
        ],
    );
    assert_eq!(code, 0);
    assert_eq!(
        v["payload"]["trace"]["orbit"],
        serde_json::json!(["z", "y", "x", "x"])
    );
}

#[test]
fn cycles_are_violations() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,2,1]}"#,
            "--x0",
            "1",
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["payload"]["trace"]["stop_reason"], "cycle_detected");
    let (code, v) = run(
        &f,
        &[
            "iterate",
            "--space",
            "unit.json",
            "--map",
            r#"{"expr":"1-x"}"#,
            "--x0",
            "0.2",
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["payload"]["trace"]["stop_reason"], "cycle_detected");
}

#[test]
fn operational_errors_exit_with_two() {
    let f = Fixtures::new();
    let cases: &[&[&str]] = &[
        &[
            "iterate",
            "--space",
            "unit.json",
            "--map",
            r#"{"expr":"x+1"}"#,
            "--x0",
            "0.5",
        ],
        &[
            "iterate",
            "--space",
            "unit.json",
            "--map",
            r#"{"images":[0]}"#,
            "--x0",
            "0.5",
        ],
        &[
            "iterate",
            "--space",
            "unit.json",
            "--map",
            r#"{"expr":"x/2"}"#,
            "--x0",
            "3",
        ],
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0]}"#,
            "--x0",
            "x",
        ],
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,0]}"#,
            "--x0",
            "w",
        ],
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,0]}"#,
            "--x0",
            "x",
            "--tol",
            "0",
        ],
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"expr":"x//2"}"#,
            "--x0",
            "x",
        ],
        &[
            "validate",
            "--space",
            "r25.json",
            "--phi",
            r#"{"kind":"power","q":-1}"#,
        ],
        &[
            "validate",
            "--space",
            "r25.json",
            "--phi",
            r#"{"kind":"wobbly"}"#,
        ],
        &[
            "classify",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,0]}"#,
            "--kind",
            r#"{"tag":"partial","alpha":0.3}"#,
        ],
        &[
            "search",
            "--phi",
            r#"{"kind":"max"}"#,
            "--kind",
            r#"{"tag":"bianchini","beta":0.5}"#,
            "--budget",
            "0",
        ],
        &["iterate", "--space", "r25.json"],
        &["validate", "--space", "r25.json", "--format", "csv"],
        &["frobnicate"],
        &[],
    ];
    for args in cases {
        let (code, v) = run(&f, args);
        assert_eq!(code, 2, "{:?}", args);
        assert_eq!(v["status"], "error", "{:?}", args);
    }
}

#[test]
fn halving_bounds_table() {
    let f = Fixtures::new();
    let args = [
        "bounds",
        "--space",
        "unit.json",
        "--map",
        r#"{"expr":"x/2"}"#,
        "--kind",
        r#"{"tag":"partial","alpha":0.5,"beta":0}"#,
        "--x0",
        "1",
    ];
    let (code, v) = run(&f, &args);
    assert_eq!(code, 0);
    let report = &v["payload"]["report"];
    assert_eq!(report["c_alpha"], 2.0);
    assert_eq!(report["bound_holds"], true);
    assert_eq!(report["certified"], true);
    assert_eq!(v["payload"]["fixed_point_source"], "last_iterate");

    let mut csv_args = args.to_vec();
    csv_args.extend(["--format", "csv"]);
    let r = run_in(f.dir(), &csv_args, None);
    assert_eq!(r.code, 0);
    let mut lines = r.stdout.lines();
    assert_eq!(lines.next(), Some("n,x_n,step_dist,bound,observed,slack"));
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[..4], ["0", "1", "0.5", "1"]);
    assert_eq!(
        r.stdout.lines().count(),
        report["rows"].as_array().unwrap().len() + 1
    );
}

#[test]
fn iterate_csv_leaves_bound_columns_empty() {
    let f = Fixtures::new();
    let r = run_in(
        f.dir(),
        &[
            "iterate",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,1]}"#,
            "--x0",
            "z",
            "--format",
            "csv",
        ],
        None,
    );
    assert_eq!(r.code, 0);
    assert_eq!(
        r.stdout,
        "n,x_n,step_dist,bound,observed,slack\n0,z,3,,,\n1,y,1,,,\n2,x,0,,,\n3,x,,,,\n"
    );
}

#[test]
fn finite_bounds_use_the_oracle_fixed_point() {
    let f = Fixtures::new();
    f.write(
        "ultra.json",
        r#"{"labels":["a","b","c"],"dist":[[0,1,4],[1,0,4],[4,4,0]]}"#,
    );
    let (code, v) = run(
        &f,
        &[
            "bounds",
            "--space",
            "ultra.json",
            "--map",
            r#"{"images":[0,0,1]}"#,
            "--phi",
            r#"{"kind":"max"}"#,
            "--kind",
            r#"{"tag":"bianchini","beta":0.25}"#,
            "--x0",
            "c",
        ],
    );
    assert_eq!(code, 0, "{}", v);
    assert_eq!(v["payload"]["fixed_point"], "a");
    assert_eq!(v["payload"]["fixed_point_source"], "oracle");
    assert_eq!(v["payload"]["report"]["c_alpha"], 1.0);
}

#[test]
fn b_metric_bounds_are_unavailable() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "bounds",
            "--space",
            "r25.json",
            "--map",
            r#"{"images":[0,0,0]}"#,
            "--phi",
            r#"{"kind":"bscaled","K":2}"#,
            "--kind",
            r#"{"tag":"partial","alpha":0.3,"beta":0.3}"#,
            "--x0",
            "z",
        ],
    );
    assert_eq!(code, 1);
    assert_eq!(v["status"], "not-applicable");
    assert_eq!(v["payload"]["report"], Value::Null);
    assert!(v["payload"]["unavailable"]
        .as_str()
        .unwrap()
        .contains("infinite"));
}

#[test]
fn search_reports_b_metric_findings() {
    let f = Fixtures::new();
    let (code, v) = run(
        &f,
        &[
            "search",
            "--phi",
            r#"{"kind":"bscaled","K":2}"#,
            "--kind",
            r#"{"tag":"partial","alpha":0.3,"beta":0.3}"#,
            "--budget",
            "300",
            "--seed",
            "11",
        ],
    );
    assert_eq!(code, 0);
    let findings = v["payload"]["findings"].as_array().unwrap();
    assert!(!findings.is_empty());
    assert!(findings.iter().all(|x| x["failed_hypotheses"]
        .as_array()
        .unwrap()
        .contains(&"chain_bound".into())));
}

#[test]
fn seed_environment_variable_overrides_the_flag() {
    let f = Fixtures::new();
    let args = |seed: &'static str| {
        [
            "search",
            "--phi",
            r#"{"kind":"power","q":1}"#,
            "--kind",
            r#"{"tag":"chatterjea_bianchini","beta":0.6}"#,
            "--budget",
            "50",
            "--seed",
            seed,
        ]
    };
    let env = run_in(f.dir(), &args("1"), Some("42"));
    let flag = run_in(f.dir(), &args("42"), None);
    let other = run_in(f.dir(), &args("1"), None);
    assert_eq!(env.stdout, flag.stdout);
    assert_ne!(env.stdout, other.stdout);
    assert_eq!(env.json()["payload"]["config"]["seed"], 42);
}

#[test]
fn library_and_binary_agree() {
    let f = Fixtures::new();
    let space = f.path("r25.json");
    let argv = [
        "contraction-lab",
        "validate",
        "--space",
        space.to_str().unwrap(),
        "--phi",
        r#"{"kind":"additive"}"#,
    ];
    let lib = run_command(argv);
    assert_eq!(lib.status, Status::Violation);
    let bin = run_in(f.dir(), &argv[1..], None);
    assert_eq!(bin.stdout, lib.render());
    assert_eq!(bin.code, lib.exit_code());
}

#[test]
fn kind_json_shape() {
    let k: ContractionKind =
        serde_json::from_str(r#"{"tag":"partial","alpha":0.3,"beta":0.4}"#).unwrap();
    assert_eq!(
        k,
        ContractionKind::Partial {
            alpha: 0.3,
            beta: 0.4
        }
    );
    assert_eq!(
        serde_json::to_value(&k).unwrap(),
        serde_json::json!({"tag":"partial","alpha":0.3,"beta":0.4})
    );
    let w: ContractionKind =
        serde_json::from_str(r#"{"tag":"weak_dual","alpha":0.5,"delta":0.1}"#).unwrap();
    assert_eq!(
        w,
        ContractionKind::WeakDual {
            alpha: 0.5,
            delta: 0.1
        }
    );
    for bad in [
        r#"{"tag":"partial","alpha":0.3}"#,
        r#"{"tag":"partial","alpha":0.3,"beta":0.4,"delta":0.1}"#,
        r#"{"tag":"bianchini","alpha":0.3,"beta":0.4}"#,
        r#"{"tag":"bianchini","beta":-0.1}"#,
        r#"{"tag":"chatterjea","beta":0.4}"#,
    ] {
        assert!(
            serde_json::from_str::<ContractionKind>(bad).is_err(),
            "{}",
            bad
        );
    }
}

#[test]
fn phi_json_shape() {
    let cases = [
        (
            r#"{"kind":"power","q":0.5}"#,
            TriangleFunction::Power { q: 0.5 },
        ),
        (
            r#"{"kind":"bscaled","K":2.0}"#,
            TriangleFunction::BScaled { k: 2.0 },
        ),
        (r#"{"kind":"max"}"#, TriangleFunction::Max),
    ];
    for (text, phi) in cases {
        let parsed: TriangleFunction = serde_json::from_str(text).unwrap();
        assert_eq!(parsed, phi);
        let back: Value = serde_json::to_value(&parsed).unwrap();
        assert_eq!(back, serde_json::from_str::<Value>(text).unwrap());
    }
    let custom: TriangleFunction =
        serde_json::from_str(r#"{"kind":"custom","expr":"max(u,v)/2"}"#).unwrap();
    assert!(custom.is_custom());
    for bad in [
        r#"{"kind":"bscaled","K":0.5}"#,
        r#"{"kind":"power"}"#,
        r#"{"kind":"custom","expr":"w+1"}"#,
        r#"{"kind":"max","q":2}"#,
    ] {
        assert!(
            serde_json::from_str::<TriangleFunction>(bad).is_err(),
            "{}",
            bad
        );
    }
}

use std::process::{Command, Output};

use extkp::formats::{diffpoly_from_json, CoeffsJson, DiffPolyTerm, PearceyJson, SeriesJson};
use extkp_core::diffpoly::DiffPoly;
use extkp_core::q;

fn extkp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_extkp"))
        .args(args)
        .env_remove("EXTKP_FORMAT")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, serde_json::Value) {
    let mut full = vec!["--format", "json"];
    full.extend_from_slice(args);
    let out = extkp(&full);
    let text = String::from_utf8(out.stdout).unwrap();
    (
        out.status.code().unwrap(),
        serde_json::from_str(&text).unwrap_or_else(|e| panic!("{e}: {text}")),
    )
}

#[test]
fn coefficient_tables() {
    let (code, v) = json(&["coeffs", "--r", "2", "--which", "d", "--order", "2"]);
    assert_eq!(code, 0);
    let c: CoeffsJson = serde_json::from_value(v).unwrap();
    assert_eq!(c.d.unwrap(), ["41/24", "9241/1152"]);
    assert!(c.a.is_none());

    let (_, v) = json(&["coeffs", "--r", "4", "--which", "a", "--order", "1"]);
    assert_eq!(v["a"], serde_json::json!(["-9/8"]));

    let (code, v) = json(&["coeffs", "--r", "2", "--which", "a", "--order", "0"]);
    assert_eq!(code, 0);
    assert_eq!(v["a"], serde_json::json!([]));
}

#[test]
fn csv_only_for_tables() {
    let out = extkp(&["--format", "csv", "coeffs", "--r", "2", "--order", "2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "k,a_k,d_k\n1,-5/24,41/24\n2,385/1152,9241/1152\n"
    );
    let out = extkp(&["--format", "csv", "flow", "--r", "2", "--m", "3"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn format_defaults_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_extkp"))
        .args(["coeffs", "--r", "3", "--order", "1"])
        .env("EXTKP_FORMAT", "json")
        .output()
        .unwrap();
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["a"], serde_json::json!(["-7/12"]));
    assert_eq!(v["d"], serde_json::json!(["31/12"]));
}

#[test]
fn verify_suites_pass() {
    let (code, v) = json(&["verify", "concomitant", "--r", "3", "--order", "12"]);
    assert_eq!(code, 0);
    let value: SeriesJson = serde_json::from_value(v["value"].clone()).unwrap();
    let s = value.to_series().unwrap();
    assert_eq!(
        s.terms().map(|(e, c)| (e, c.clone())).collect::<Vec<_>>(),
        vec![(2, q(3, 1))]
    );

    let (code, v) = json(&["verify", "ortho", "--r", "2", "--max", "6", "--order", "30"]);
    assert_eq!(code, 0);
    assert_eq!(v["residues"], 49);
    assert_eq!(v["nonzero"], serde_json::json!([]));

    let (code, v) = json(&[
        "verify", "psi-init", "--r", "2", "--n", "5", "--order", "30",
    ]);
    assert_eq!(code, 0);
    assert_eq!(
        v["values"],
        serde_json::json!(["1/1", "0/1", "0/1", "0/1", "0/1", "0/1"])
    );

    let (code, _) = json(&["verify", "ode-residual", "--r", "4", "--order", "6"]);
    assert_eq!(code, 0);
    let (code, v) = json(&["verify", "flow-commute", "--r", "3", "--m", "2", "--n", "4"]);
    assert_eq!(code, 0);
    assert_eq!(v["pairs"][0]["commute"], true);
}

#[test]
fn insufficient_order_asks_for_more() {
    let out = extkp(&["verify", "ortho", "--r", "2", "--max", "6", "--order", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("increase --order"));
    let out = extkp(&["verify", "psi-init", "--r", "2", "--n", "5", "--order", "0"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8(out.stderr)
        .unwrap()
        .contains("increase --order"));
}

#[test]
fn flows_print_as_differential_polynomials() {
    let out = extkp(&["flow", "--r", "2", "--m", "3"]);
    assert!(String::from_utf8(out.stdout)
        .unwrap()
        .starts_with("u_t = 1/12 u^(3) + 1/2 u u^(1)\n"));

    let (_, v) = json(&["flow", "--r", "2", "--m", "3"]);
    let terms: Vec<DiffPolyTerm> = serde_json::from_value(v["rhs"][0]["terms"].clone()).unwrap();
    let u = |k| DiffPoly::var(1, k);
    let want = &u(3).scale(&q(1, 12)) + &(&u(0) * &u(1)).scale(&q(1, 2));
    assert_eq!(diffpoly_from_json(&terms).unwrap(), want);

    let (_, v) = json(&["flow", "--r", "2", "--m", "2"]);
    assert_eq!(v["rhs"][0]["terms"], serde_json::json!([]));

    let out = extkp(&["flow", "--r", "3", "--m", "1"]);
    assert_eq!(
        String::from_utf8(out.stdout).unwrap(),
        "u_1_t = u_1^(1)\nu_2_t = u_2^(1)\nPASS\n"
    );
}

#[test]
fn pearcey_comparisons() {
    let (code, v) = json(&[
        "pearcey", "--r", "2", "--which", "a", "--z", "4,0", "--terms", "3",
    ]);
    assert_eq!(code, 0);
    let p: PearceyJson = serde_json::from_value(v).unwrap();
    assert!(p.asserted && p.pass && p.gap <= p.bound);
    assert_eq!(p.z, [4.0, 0.0]);
    assert_eq!(p.truncation, 3);

    let (code, v) = json(&[
        "pearcey", "--r", "2", "--which", "a", "--z", "0.5,0", "--terms", "3",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["asserted"], false);

    let (code, v) = json(&[
        "pearcey", "--r", "3", "--which", "d", "--z", "2.5,-2.5", "--terms", "2",
    ]);
    assert_eq!(code, 0);
    assert_eq!(v["pass"], true);
}

#[test]
fn pearcey_rejects_points_outside_the_sector() {
    let out = extkp(&[
        "pearcey", "--r", "2", "--which", "a", "--z", "-3,0", "--terms", "3",
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8(out.stderr).unwrap().contains("sector"));
    let out = extkp(&[
        "pearcey",
        "--r",
        "2",
        "--which",
        "d",
        "--z",
        "3,1",
        "--terms",
        "2",
        "--tolerance",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn wrong_side_detour_fails_the_bound() {
    // the index-1 contour adds ~1e5 times the exponentially large solution
    let args = [
        "pearcey",
        "--r",
        "2",
        "--which",
        "d",
        "--z",
        "1.5,-2.6",
        "--terms",
        "2",
        "--tolerance",
        "1e-4",
    ];
    assert_eq!(extkp(&args).status.code(), Some(0));
    let out = extkp(&[&args[..], &["--detour=-0.25"]].concat());
    assert_eq!(
        out.status.code(),
        Some(1),
        "{}",
        String::from_utf8_lossy(&out.stdout)
    );
    // an absolute 1e-10 is out of reach for a value of that size
    let out = extkp(&[
        "pearcey",
        "--r",
        "2",
        "--which",
        "d",
        "--z",
        "1.5,-2.6",
        "--terms",
        "2",
        "--detour=-0.25",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn usage_errors() {
    assert_eq!(
        extkp(&["coeffs", "--r", "1", "--order", "2"]).status.code(),
        Some(2)
    );
    assert_eq!(extkp(&["coeffs", "--r", "2"]).status.code(), Some(2));
    assert_eq!(extkp(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn reports_are_deterministic() {
    for args in [
        &[
            "--format", "json", "pearcey", "--r", "3", "--which", "a", "--z", "4,0.5", "--terms",
            "3",
        ][..],
        &["verify", "ortho", "--r", "3", "--max", "5"][..],
    ] {
        assert_eq!(extkp(args).stdout, extkp(args).stdout);
    }
}

#[test]
fn output_file() {
    let path = std::env::temp_dir().join(format!("extkp-out-{}.json", std::process::id()));
    let out = extkp(&[
        "--format",
        "json",
        "-o",
        path.to_str().unwrap(),
        "coeffs",
        "--r",
        "2",
        "--order",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(v["a"], serde_json::json!(["-5/24"]));
}

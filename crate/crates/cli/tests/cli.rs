use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../data")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn ifunc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ifunc"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn complex(v: &Value) -> (f64, f64) {
    (v[0].as_f64().unwrap(), v[1].as_f64().unwrap())
}

fn write_tmp(name: &str, body: &str) -> String {
    let path = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

#[test]
fn eval_exponential_at_one() {
    let out = ifunc(&["eval", &data("exp.json"), "--z", "1"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let (re, im) = complex(&doc["value"]);
    assert!((re - (-1.0f64).exp()).abs() < 1e-10, "{re}");
    assert!(im.abs() < 1e-12);
    assert!(doc["abs_error_estimate"].as_f64().unwrap() <= 1e-10);
}

#[test]
fn every_method_agrees_on_exponential() {
    for method in ["auto", "quadrature", "series"] {
        let out = ifunc(&["eval", &data("exp.json"), "--z", "0.5", "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let (re, _) = complex(&json(&out)["value"]);
        assert!((re - (-0.5f64).exp()).abs() < 1e-10, "{method}: {re}");
    }
}

#[test]
fn polar_argument_lands_on_negative_axis() {
    let out = ifunc(&["eval", &data("exp.json"), "--z", "1@180"]);
    assert_eq!(out.status.code(), Some(0));
    let (re, _) = complex(&json(&out)["value"]);
    assert!((re - 1f64.exp()).abs() < 1e-9, "{re}");
}

#[test]
fn analyze_free_energy() {
    let out = ifunc(&["analyze", &data("free_energy_d3.json"), "--z", "-0.4444,0"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["delta"].as_f64(), Some(2.0));
    assert_eq!(doc["mu"].as_f64(), Some(0.0));
    assert!((doc["nabla"].as_f64().unwrap() - 2.5).abs() < 1e-12);
    assert_eq!(doc["contour_a"]["status"], "yes");
    assert_eq!(doc["contour_b"]["status"], "yes");
}

#[test]
fn zero_argument_is_a_domain_error() {
    for cmd in ["eval", "analyze", "compare"] {
        let out = ifunc(&[cmd, &data("exp.json"), "--z", "0"]);
        assert_eq!(out.status.code(), Some(2), "{cmd}");
        assert!(out.stdout.is_empty());
        assert!(!out.stderr.is_empty());
    }
}

#[test]
fn invalid_params_exit_2() {
    let bad = write_tmp(
        "coincident.json",
        r#"{"m":1,"n":1,"upper":[{"a_re":1,"alpha":1,"exp":1}],"lower":[{"a_re":0,"alpha":1,"exp":1}]}"#,
    );
    let out = ifunc(&["eval", &bad, "--z", "0.5"]);
    assert_eq!(out.status.code(), Some(2));
    let malformed = write_tmp("malformed.json", "{ not json");
    assert_eq!(ifunc(&["analyze", &malformed, "--z", "1"]).status.code(), Some(2));
    assert_eq!(ifunc(&["eval", &data("exp.json"), "--z", "x,y"]).status.code(), Some(2));
}

#[test]
fn no_admissible_method_exit_3() {
    let p = write_tmp(
        "stuck.json",
        r#"{"m":0,"n":0,"upper":[{"a_re":0.5,"alpha":1,"exp":1}],"lower":[{"a_re":0,"alpha":1,"exp":1}]}"#,
    );
    let out = ifunc(&["eval", &p, "--z", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn output_is_deterministic() {
    let args = ["eval", &data("free_energy_d3.json"), "--z", "-0.3,0.1", "--method", "quadrature"];
    let a = ifunc(&args);
    let b = ifunc(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn reduce_round_trips() {
    let p = write_tmp(
        "reducible.json",
        r#"{"m":1,"n":1,"upper":[{"a_re":0.7,"alpha":2,"exp":1.5},{"a_re":0.3,"alpha":1,"exp":1}],
            "lower":[{"a_re":0,"alpha":1,"exp":1},{"a_re":0.7,"alpha":2,"exp":1.5}]}"#,
    );
    let out = ifunc(&["reduce", &p]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["upper"].as_array().unwrap().len(), 1);
    assert_eq!(doc["lower"].as_array().unwrap().len(), 1);

    let again = write_tmp("reduced.json", &String::from_utf8(out.stdout.clone()).unwrap());
    let second = ifunc(&["reduce", &again]);
    assert_eq!(second.stdout, out.stdout);

    let z = ["--z", "0.4"];
    let v1 = json(&ifunc(&["eval", &p, z[0], z[1]]));
    let v2 = json(&ifunc(&["eval", &again, z[0], z[1]]));
    let (a, _) = complex(&v1["value"]);
    let (b, _) = complex(&v2["value"]);
    assert!((a - b).abs() < 1e-9, "{a} vs {b}");
}

#[test]
fn compare_reports_agreement() {
    let out = ifunc(&["compare", &data("exp.json"), "--z", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["agree"], true);
    assert!(doc["difference"].as_f64().unwrap() <= doc["combined_estimate"].as_f64().unwrap());
}

#[test]
fn series_subcommand_lists_terms() {
    let out = ifunc(&["series", &data("exp.json"), "--terms", "5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    let terms = doc["terms"].as_array().unwrap();
    assert_eq!(terms.len(), 5);
    let (c2, _) = complex(&terms[2]["coefficient"]);
    assert!((c2 - 0.5).abs() < 1e-14);
    assert_eq!(doc["region"], "inside");

    // Five terms cannot reach the default tolerance at z = 0.5.
    let short = ifunc(&["series", &data("exp.json"), "--terms", "5", "--z", "0.5"]);
    assert_eq!(short.status.code(), Some(3));
    let full = json(&ifunc(&["series", &data("exp.json"), "--z", "0.5"]));
    assert!((complex(&full["value"]).0 - (-0.5f64).exp()).abs() < 1e-12);
}

#[test]
fn special_free_energy_and_lrc_term() {
    let out = ifunc(&["special", "free-energy", "--d", "3", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&out);
    assert_eq!(doc["method"], "specialized");
    assert!(complex(&doc["value"]).0.is_finite());

    let out = ifunc(&["special", "lrc-term", "--order", "3", "--lambda", "0.25", "--tol", "1e-8"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let (re, _) = complex(&json(&out)["value"]);
    let expect = 4f64.ln().powi(2) / 2.0;
    assert!((re - expect).abs() < 1e-7, "{re} vs {expect}");
}

#[test]
fn text_output_is_flat() {
    let out = ifunc(&["analyze", &data("exp.json"), "--z", "2", "--output", "text"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l == "delta: 1.0"), "{text}");
    assert!(text.lines().any(|l| l.starts_with("contour_a.status: ")));
}

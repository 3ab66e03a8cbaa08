use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn ctxkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctxkit")).args(args).output().expect("binary runs")
}

fn report(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let out = ctxkit(&a);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(args: &[&str]) -> i32 {
    let out = ctxkit(args);
    assert!(out.stdout.is_empty() || out.status.success());
    out.status.code().expect("exit code")
}

fn temp_file(name: &str, body: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ctxkit-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn f(v: &Value) -> f64 {
    v.as_f64().unwrap_or_else(|| panic!("not a number: {v}"))
}

#[test]
fn classify_presets() {
    assert_eq!(report(&["classify", "--preset", "hardy"])["results"]["level"], "Logical");
    assert_eq!(report(&["classify", "--preset", "pr_box"])["results"]["level"], "Strong");
    assert_eq!(report(&["classify", "--preset", "chsh"])["results"]["level"], "Probabilistic");
}

#[test]
fn classify_files_and_errors() {
    let good = temp_file(
        "pr.json",
        r#"{"observables":{"a":2,"b":2,"a'":2,"b'":2},
            "contexts":[["a","b"],["a","b'"],["a'","b"],["a'","b'"]],
            "rows":[[0.5,0,0,0.5],[0.5,0,0,0.5],[0.5,0,0,0.5],[0,0.5,0.5,0]]}"#,
    );
    assert_eq!(report(&["classify", good.to_str().unwrap()])["results"]["level"], "Strong");
    let bad = temp_file("bad.json", "{\"observables\": ");
    assert_eq!(code(&["classify", bad.to_str().unwrap()]), 2);
    let rows = temp_file("rows.json", r#"{"observables":{"a":2},"contexts":[["a"]],"rows":[[0.5,0.2]]}"#);
    assert_eq!(code(&["classify", rows.to_str().unwrap()]), 3);
    let shape = temp_file("shape.json", r#"{"observables":{"a":2}}"#);
    assert_eq!(code(&["classify", shape.to_str().unwrap()]), 3);
    assert_eq!(code(&["classify", "--preset", "nonexistent"]), 4);
    assert_eq!(code(&["classify", "/definitely/not/here.json"]), 4);
    assert_eq!(code(&["classify"]), 2);
    assert_eq!(code(&["frobnicate"]), 2);
}

#[test]
fn invariants_examples() {
    let r = report(&["invariants", "--preset", "c5"]);
    assert_eq!(f(&r["results"]["alpha"]), 2.0);
    assert!((f(&r["results"]["theta"]) - 2.23607).abs() < 1e-4);
    let r = report(&["invariants", "--preset", "chsh"]);
    assert_eq!(f(&r["results"]["alpha"]), 3.0);
    assert!((f(&r["results"]["theta"]) - 3.41421).abs() < 1e-4);
    let e = temp_file("e3.json", r#"{"n":3,"edges":[]}"#);
    let r = report(&["invariants", e.to_str().unwrap()]);
    assert_eq!(f(&r["results"]["alpha"]), 3.0);
    assert!((f(&r["results"]["theta"]) - 3.0).abs() < 1e-4);
    let bad = temp_file("g.json", r#"{"n":2,"edges":[[0,5]]}"#);
    assert_eq!(code(&["invariants", bad.to_str().unwrap()]), 3);
    let loopy = temp_file("loop.json", r#"{"n":2,"edges":[[1,1]]}"#);
    assert_eq!(code(&["invariants", loopy.to_str().unwrap()]), 3);
    assert_eq!(code(&["invariants", "--preset", "petersen"]), 4);
}

#[test]
fn three_box_report() {
    let r = report(&["paradox", "three-box"])["results"].clone();
    let abl = r["abl"].as_array().unwrap();
    assert!((f(&abl[0]["distribution"][0]["p"]) - 1.0).abs() < 1e-12);
    assert!((f(&abl[1]["distribution"][0]["p"]) - 1.0).abs() < 1e-12);
    assert!((f(&abl[2]["distribution"][0]["p"]) - 1.0 / 3.0).abs() < 1e-11);
    let weak: Vec<(String, f64)> = r["weak_values"]
        .as_array()
        .unwrap()
        .iter()
        .map(|w| (w["observable"].as_str().unwrap().to_string(), f(&w["re"])))
        .collect();
    let get = |n: &str| weak.iter().find(|(k, _)| k == n).unwrap().1;
    assert!((get("P1+P2") - 2.0).abs() < 1e-12);
    assert!((get("P3") + 1.0).abs() < 1e-12);
    assert_eq!(r["logical_paradox"], true);
}

#[test]
fn cheshire_reports() {
    let r = report(&["paradox", "cheshire", "--weak"])["results"].clone();
    let vals: Vec<f64> = r["weak_values"].as_array().unwrap().iter().map(|w| f(&w["re"])).collect();
    let want = [1.0, 0.0, 0.0, 1.0, -0.5];
    for (v, w) in vals.iter().zip(want) {
        assert!((v - w).abs() < 1e-12, "{vals:?}");
    }
    let t = report(&["paradox", "cheshire", "--toy"])["results"]["toy"].clone();
    assert_eq!(t["right_path"]["exact"], "0");
    assert_eq!(t["right_plus"]["exact"], "1/4");
    assert_eq!(t["right_minus"]["exact"], "1/4");
    assert_eq!(code(&["paradox", "no-such-paradox"]), 4);
    assert_eq!(code(&["paradox", "three-box", "--toy"]), 4);
}

#[test]
fn reports_echo_provenance_and_are_deterministic() {
    let args = ["toy", "demo", "--seed", "11", "--json"];
    let a = ctxkit(&args);
    let b = ctxkit(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let r: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(r["seed"], 11);
    assert_eq!(r["command"][0], "ctxkit");
    assert_eq!(r["command"][2], "demo");
    assert!(r["version"].is_string());
    assert!(r["inputs"][0]["digest"].as_str().unwrap().starts_with("sha256:"));
    assert!(r["tolerances"].is_object());
    let text_a = ctxkit(&["paradox", "pigeonhole"]);
    let text_b = ctxkit(&["paradox", "pigeonhole"]);
    assert_eq!(text_a.stdout, text_b.stdout);
}

fn sig_digits(s: &str) -> usize {
    let mant = s.split(['e', 'E']).next().unwrap();
    let digits: String = mant.chars().filter(|c| c.is_ascii_digit()).collect();
    let trimmed = digits.trim_start_matches('0').trim_end_matches('0');
    trimmed.len()
}

/// Number tokens of the raw output, string literals removed.
fn number_tokens(text: &str) -> Vec<String> {
    let mut bare = String::new();
    let mut in_str = false;
    let mut esc = false;
    for ch in text.chars() {
        if in_str {
            match (esc, ch) {
                (true, _) => esc = false,
                (false, '\\') => esc = true,
                (false, '"') => in_str = false,
                _ => {}
            }
            bare.push(' ');
        } else if ch == '"' {
            in_str = true;
            bare.push(' ');
        } else {
            bare.push(ch);
        }
    }
    bare.split(|c: char| !(c.is_ascii_digit() || "eE.+-".contains(c)))
        .filter(|t| t.chars().any(|c| c.is_ascii_digit()) && t.parse::<f64>().is_ok())
        .map(str::to_string)
        .collect()
}

#[test]
fn numbers_have_at_most_twelve_significant_digits() {
    for args in [
        &["invariants", "--preset", "c7"][..],
        &["inequality", "--preset", "kcbs"],
        &["paradox", "three-box"],
        &["ncbound", "prep"],
    ] {
        let mut a = args.to_vec();
        a.push("--json");
        let out = ctxkit(&a);
        assert!(out.status.success());
        let nums = number_tokens(&String::from_utf8(out.stdout).unwrap());
        assert!(!nums.is_empty());
        for n in nums {
            assert!(sig_digits(&n) <= 12, "{args:?}: {n}");
        }
    }
}

#[test]
fn ncbound_with_vector_file() {
    let data = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/../core/data/cabello18.txt")).unwrap();
    let p = temp_file("c18.txt", &data);
    let r = report(&["ncbound", "cabello18", "--vectors", p.to_str().unwrap()])["results"].clone();
    assert!((f(&r["nc_bound"]) - 5.0 / 6.0).abs() < 1e-9);
    assert!((f(&r["quantum_value"]) - 1.0).abs() < 1e-9);
    assert_eq!(r["example_value"], "5/6");
    let short: String = data.lines().filter(|l| !l.starts_with('#')).take(17).collect::<Vec<_>>().join("\n");
    let p = temp_file("c17.txt", &short);
    assert_eq!(code(&["ncbound", "cabello18", "--vectors", p.to_str().unwrap()]), 3);
    let p = temp_file("junk.txt", "1 2 three 4\n");
    assert_eq!(code(&["ncbound", "cabello18", "--vectors", p.to_str().unwrap()]), 2);
}

#[test]
fn prep_contextuality_report() {
    let r = report(&["ncbound", "prep"])["results"]["prep"].clone();
    assert_eq!(r["cells"], 27);
    assert_eq!(r["feasible"], false);
    assert_eq!(r["farkas_verified"], true);
}

#[test]
fn toy_commands() {
    let t = report(&["toy", "table"]);
    assert_eq!(t["results"]["updates"].as_array().unwrap().len(), 42);
    let d = report(&["toy", "demo", "--state", "+x", "--axes", "x,x,z", "--seed", "3"])["results"].clone();
    let steps = d["steps"].as_array().unwrap();
    assert_eq!(steps.len(), 3);
    assert_eq!(steps[0]["outcome"], 1);
    assert_eq!(steps[1]["state"], "+x");
    assert_eq!(f(&d["repeatability"]["agreement"]), 1.0);
    let m = report(&["toy", "demo", "--state", "-z", "--axes", "z"])["results"].clone();
    assert_eq!(m["steps"][0]["outcome"], -1);
    assert_eq!(code(&["toy", "demo", "--state", "+w"]), 4);
    assert_eq!(code(&["toy", "demo", "--axes", "x,q"]), 4);
}

#[test]
fn inequalities() {
    let k = report(&["inequality", "--preset", "kcbs"])["results"].clone();
    assert!((f(&k["quantum_value"]) - 5f64.sqrt()).abs() < 1e-9);
    assert_eq!(k["violated"], true);
    let m = report(&["inequality", "--preset", "mermin-peres"])["results"].clone();
    assert_eq!(f(&m["quantum_value"]), 6.0);
    assert_eq!(code(&["inequality", "--preset", "gyni"]), 4);
}

#[test]
fn scenario_presets_and_models() {
    let c = report(&["scenario", "--preset", "cabello18"])["results"].clone();
    assert_eq!(c["deterministic_models"], 0);
    assert!(c["ks_coloring"].is_null());
    let t = report(&["scenario", "--preset", "triangle"])["results"].clone();
    assert_eq!(t["deterministic_models"], 4);
    let m = temp_file(
        "tri.json",
        r#"{"scenario":{"vertices":["v1","v2","v3","v4","v5","v6"],
            "edges":[["v1","v2","v3"],["v3","v4","v5"],["v5","v6","v1"]]},
            "values":{"v1":0.5,"v2":0,"v3":0.5,"v4":0,"v5":0.5,"v6":0}}"#,
    );
    let r = report(&["scenario", m.to_str().unwrap()])["results"].clone();
    assert_eq!(r["model"]["classical"]["classical"], false);
    let bad = temp_file("dup.json", r#"{"vertices":["a","a"],"edges":[["a"]]}"#);
    assert_eq!(code(&["scenario", bad.to_str().unwrap()]), 3);
    assert_eq!(code(&["scenario", "--preset", "heptagon"]), 4);
}

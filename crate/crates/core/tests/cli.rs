use std::path::Path;

use polyanalytic::cli::run_from;
use polyanalytic::io::{read_coefficients_csv, read_json, ExpansionDoc, SCHEMA_VERSION};
use serde_json::Value;

fn run(out: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["polyan".to_string()];
    argv.extend(args.iter().map(|s| s.to_string()));
    argv.push("--out".into());
    argv.push(out.display().to_string());
    run_from(argv)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn decompose_finite_corpus_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["decompose", "--corpus", "finite:[1;1],N=2"]), 0);
    let report = json(&dir.path().join("decompose_report.json"));
    assert_eq!(report["schema"], SCHEMA_VERSION);
    assert_eq!(report["data"]["radii_defaulted"], true);
    assert!(report["data"]["residual"].as_f64().unwrap() <= 1e-10);
    let table = read_coefficients_csv(std::fs::File::open(dir.path().join("coefficients.csv")).unwrap()).unwrap();
    assert_eq!(table.order(), 2);
}

#[test]
fn decompose_gevrey_matches_the_generator() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["decompose", "--corpus", "gevrey:c=1,k=1,N=1,Q=128"]), 0);
    let report = json(&dir.path().join("decompose_report.json"));
    assert!(report["data"]["generator_error"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn expand_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["expand", "--corpus", "gevrey:c=1,k=1,N=1,Q=512"]), 0);
    let doc = read_json::<ExpansionDoc>(std::fs::File::open(dir.path().join("expansion.json")).unwrap(), "expansion").unwrap();
    assert!(doc.data.delta.unwrap() < 1.0);

    assert_eq!(run(dir.path(), &["expand", "--corpus", "polynomial_decay:q=1,Q=512"]), 2);
    let failure = json(&dir.path().join("expansion.json"));
    assert_eq!(failure["kind"], "expansion_failure");
    assert_eq!(failure["data"]["error"], "NO_GEOMETRIC_DECAY");

    assert_eq!(run(dir.path(), &["expand", "--corpus", "finite:[1;2;3]"]), 0);
    let doc = json(&dir.path().join("expansion.json"));
    assert_eq!(doc["data"]["certificate"]["trivial"], true);
}

#[test]
fn verify_bounds_and_injected_failure() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["verify", "--suite", "bounds", "--instances", "8"]), 0);
    let reports = json(&dir.path().join("bounds.json"));
    let items = reports["data"].as_array().unwrap();
    assert!(items.iter().all(|r| r["holds"] == true && r["parameters"].is_object()));
    assert_eq!(run(dir.path(), &["verify", "--suite", "bounds", "--instances", "2", "--inject-rhs-scale", "0.5"]), 1);
}

#[test]
fn dynkin_and_approx_on_a_member() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["expand", "--corpus", "gevrey:c=1,k=1,N=1,Q=256"]), 0);
    let expansion = dir.path().join("expansion.json").display().to_string();
    assert_eq!(run(dir.path(), &["dynkin", "--expansion", &expansion]), 0);
    let report = json(&dir.path().join("extension.json"));
    assert!(report["data"]["fit"]["c2"].as_f64().unwrap() > 0.0);
    assert!(dir.path().join("extension.csv").exists());

    assert_eq!(run(dir.path(), &["approx", "--corpus", "gevrey:c=1,k=1,N=1,Q=128", "--n-max", "40", "--grid", "128"]), 0);
    let fit = json(&dir.path().join("theta_fit.json"));
    assert!(fit["data"]["fits"].as_array().unwrap().iter().all(|f| f["fit"]["beta"].as_f64().unwrap() > 0.0));
}

#[test]
fn approx_on_the_non_member_fails() {
    let dir = tempfile::tempdir().unwrap();
    let code = run(dir.path(), &["approx", "--corpus", "polynomial_decay:q=1,Q=512", "--n-max", "16", "--method", "constructive"]);
    assert_eq!(code, 2);
    let report = json(&dir.path().join("theta_fit.json"));
    assert_eq!(report["data"]["constructive_skipped"], "NO_GEOMETRIC_DECAY");
}

#[test]
fn usage_errors_exit_one() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["bogus"]), 1);
    assert_eq!(run(dir.path(), &["expand"]), 1);
    assert_eq!(run(dir.path(), &["decompose", "--corpus", "nonsense:x=1"]), 1);
    assert_eq!(run(dir.path(), &["expand", "--corpus", "gevrey", "--json", "--csv"]), 1);
}

#[test]
fn identical_runs_write_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let out = dir.path().join("run");
        std::fs::create_dir_all(&out).unwrap();
        assert_eq!(run(&out, &["verify", "--suite", "bounds", "--instances", "4", "--seed", "7"]), 0);
        assert_eq!(run(&out, &["approx", "--corpus", "gevrey:Q=64", "--n-max", "20", "--grid", "64"]), 0);
    }
    for name in ["bounds.json", "approx.csv", "theta_fit.json"] {
        let x = std::fs::read_to_string(a.path().join("run").join(name)).unwrap();
        let y = std::fs::read_to_string(b.path().join("run").join(name)).unwrap();
        let strip = |s: &str| s.replace(&a.path().display().to_string(), "").replace(&b.path().display().to_string(), "");
        assert_eq!(strip(&x), strip(&y), "{name} differs");
    }
}

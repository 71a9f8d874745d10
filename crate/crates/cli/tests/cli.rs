use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("blockforge-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockforge"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(o)))
}

fn export(dir: &Path, name: &str) {
    let o = run(dir, &["--quiet", "catalog", "show", name, "--export", "."]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_shipped_pair() {
    let d = scratch("verify");
    export(&d, "NOT");
    export(&d, "NOR_ring");
    assert_eq!(code(&run(&d, &["verify", "not.json", "not_lang.json"])), 0);
    let o = run(&d, &["verify", "nor_ring.json", "not_lang.json"]);
    assert_eq!(code(&o), 2, "word length mismatch is a usage error");
    // a NOT complex read as a link fails with a counterexample
    std::fs::write(d.join("lnk_lang.json"), r#"{"word_length": 2, "words": ["00", "11"]}"#).unwrap();
    let o = run(&d, &["verify", "not.json", "lnk_lang.json"]);
    assert_eq!(code(&o), 1);
    assert!(!o.stderr.is_empty());
}

#[test]
fn search_reports_infeasibility_with_certificate() {
    let d = scratch("search");
    export(&d, "NOR_ring");
    let o = run(&d, &["--quiet", "search", "nor_ring_lang.json", "--atoms", "4", "--certificate", "cert.json"]);
    assert_eq!(code(&o), 1);
    let v = json(&o);
    assert_eq!(v["feasible"], false);
    assert_eq!(v["certificate"]["sweeps"].as_array().unwrap().len(), 2);
    assert!(d.join("cert.json").exists());

    let o = run(&d, &["--quiet", "search", "nor_ring_lang.json", "--atoms", "5", "--out-dir", "found"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["n_atoms"], 5);
    assert!(v["distinct_graphs"].as_u64().unwrap() >= 2);
    assert!(d.join("found/found_0.json").exists());
}

#[test]
fn compile_nor_gives_five_atoms() {
    let d = scratch("compile");
    let o = run(&d, &["--quiet", "compile", "--expr", "x1 nor x2", "-o", "nor.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("nor.json")).unwrap()).unwrap();
    assert_eq!(v["atoms"].as_array().unwrap().len(), 5);
    let o = run(&d, &["--quiet", "lang", "truth-table", "--expr", "x1 nor x2", "-o", "nor_lang.json"]);
    assert_eq!(code(&o), 0);
    assert_eq!(code(&run(&d, &["verify", "nor.json", "nor_lang.json"])), 0);
}

#[test]
fn constrained_compile_and_empty_constraint() {
    let d = scratch("constrain");
    let o = run(&d, &["--quiet", "compile", "--expr", "x1 == x2", "--constrain", "1", "-o", "eq.json"]);
    assert_eq!(code(&o), 0);
    std::fs::write(d.join("eq_lang.json"), r#"{"word_length": 2, "words": ["00", "11"]}"#).unwrap();
    assert_eq!(code(&run(&d, &["verify", "eq.json", "eq_lang.json"])), 0);
    let o = run(&d, &["--quiet", "compile", "--expr", "x1 & !x1", "--constrain", "1"]);
    assert_eq!(code(&o), 1, "unsatisfiable constraint is a negative result");
}

#[test]
fn amalgamating_two_inverters_gives_a_link() {
    let d = scratch("amalgamate");
    export(&d, "NOT");
    let o = run(&d, &["--quiet", "amalgamate", "not.json", "not.json", "--gamma", "Q:A", "--abstract", "-o", "lnk.json"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    std::fs::write(d.join("lnk_lang.json"), r#"{"word_length": 2, "words": ["00", "11"]}"#).unwrap();
    assert_eq!(code(&run(&d, &["verify", "lnk.json", "lnk_lang.json"])), 0);
    let o = run(&d, &["amalgamate", "not.json", "not.json", "--gamma", "Q:Z"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn gsm_metrics_and_render() {
    let d = scratch("gsm");
    export(&d, "NOR_triangle");
    let o = run(&d, &["--json", "gsm", "nor_triangle.json", "--vdw", "--c6", "1"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["configurations"].as_array().unwrap().len(), 4);
    assert!(v["vdw"]["ratio"].is_number());
    let v = json(&run(&d, &["--json", "metrics", "nor_triangle.json"]));
    assert_eq!(v["valid"], true);
    assert!(v["robustness"].as_f64().unwrap() > 0.26);
    let o = run(&d, &["--quiet", "render", "nor_triangle.json", "-o", "nor.svg"]);
    assert_eq!(code(&o), 0);
    let svg = std::fs::read_to_string(d.join("nor.svg")).unwrap();
    assert!(svg.starts_with("<svg") && svg.matches("<line").count() == 7);
}

#[test]
fn gsm_budget_is_a_resource_error() {
    let d = scratch("budget");
    export(&d, "SCU");
    assert_eq!(code(&run(&d, &["gsm", "scu.json", "--max-atoms", "5"])), 3);
}

#[test]
fn optimize_writes_trace() {
    let d = scratch("optimize");
    export(&d, "NOR_ring");
    let o = run(
        &d,
        &["--quiet", "--seed", "3", "optimize", "nor_ring.json", "--iters", "200", "--restarts", "2", "-o", "out.json", "--trace", "trace.csv"],
    );
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let trace = std::fs::read_to_string(d.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,best_objective,current_objective\n"));
    assert!(trace.lines().count() > 2);
    assert!(d.join("out.json").exists());
}

#[test]
fn lattice_languages_and_tessellations() {
    let d = scratch("lattice");
    let o = run(&d, &["--quiet", "lang", "tessellate", "--lattice", "square", "--dims", "2x2", "--boundary", "periodic", "--check", "z2"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["words"].as_array().unwrap().len(), 32);
    let o = run(&d, &["--json", "tessellate", "--model", "surface-code", "--dims", "2x2", "--boundary", "periodic", "--verify", "-o", "sc.json"]);
    assert_eq!(code(&o), 0);
    let v = json(&o);
    assert_eq!(v["verification"]["ground_configurations"], 32);
    assert_eq!(v["atoms_per_cell"], 9.0);
    assert!(d.join("sc.json").exists());
    let o = run(&d, &["--json", "tessellate", "--model", "fibonacci", "--dims", "1x1", "--verify"]);
    assert_eq!(code(&o), 0);
    assert_eq!(json(&o)["verification"]["ground_configurations"], 5);
    assert_eq!(code(&run(&d, &["tessellate", "--model", "surface-code", "--dims", "2by2"])), 2);
}

#[test]
fn catalog_listing_and_unknown_entries() {
    let d = scratch("catalog");
    let v = json(&run(&d, &["--json", "catalog", "list"]));
    assert_eq!(v.as_array().unwrap().len(), 15);
    let o = run(&d, &["catalog", "show", "TOFFOLI"]);
    assert_eq!(code(&o), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("NOR_ring"));
}

#[test]
fn usage_errors_exit_two() {
    let d = scratch("usage");
    assert_eq!(code(&run(&d, &["frobnicate"])), 2);
    assert_eq!(code(&run(&d, &[])), 2);
    assert_eq!(code(&run(&d, &["verify", "missing.json", "also_missing.json"])), 2);
    std::fs::write(d.join("bad.json"), "{not json").unwrap();
    assert_eq!(code(&run(&d, &["metrics", "bad.json"])), 2);
    assert_eq!(code(&run(&d, &["compile", "--expr", "x1 &&& x2"])), 2);
    assert_eq!(code(&run(&d, &["--help"])), 0);
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

use hodge_limit::fixtures::{pbhl_fixtures, two_three};
use hodge_limit::hodgelefschetz::BigradedHL;
use hodge_limit::sncdegeneration::DegenerationSpec;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_hodge-limit"));
    c.env_remove("HODGE_LIMIT_SEED");
    c
}

fn data(rel: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("data").join(rel)
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("hodge-limit-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn weightfilt_j3_plus_j1() {
    let out = run(&["weightfilt", "--input", data("j3-j1.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["data"]["gr_dims"], serde_json::json!([1, 0, 2, 0, 1]));
    assert_eq!(r["data"]["primitive_dims"], serde_json::json!({"0": 1, "1": 0, "2": 1}));
}

#[test]
fn degeneration_bundled_i5() {
    let out = run(&["degeneration", "--input", data("kodaira/kodaira-5.json").to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = json_of(&out);
    assert_eq!(r["data"]["pages"][0]["limit_gr"]["1"], serde_json::json!({"0": 1, "2": 1}));
    assert!(r["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn toml_input_matches_json() {
    let dir = scratch("toml");
    let spec: DegenerationSpec =
        serde_json::from_str(&std::fs::read_to_string(data("kodaira/kodaira-4.json")).unwrap()).unwrap();
    let path = dir.join("i4.toml");
    std::fs::write(&path, toml::to_string(&spec).unwrap()).unwrap();
    let from_toml = run(&["degeneration", "--input", path.to_str().unwrap()]);
    let from_json = run(&["degeneration", "--input", data("kodaira/kodaira-4.json").to_str().unwrap()]);
    assert_eq!(code(&from_toml), 0);
    assert_eq!(from_toml.stdout, from_json.stdout);
}

#[test]
fn malformed_json_reports_location() {
    let dir = scratch("malformed");
    let path = dir.join("bad.json");
    std::fs::write(&path, "{\n  \"rows\": 2,\n  \"cols\": ,\n}").unwrap();
    let out = run(&["weightfilt", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("line 3 column 11"), "{err}");
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(code(&run(&["weightfilt"])), 2);
    assert_eq!(code(&run(&["frobnicate"])), 2);
    let i3 = data("kodaira/kodaira-3.json");
    assert_eq!(code(&run(&["degeneration", "--input", i3.to_str().unwrap(), "--alpha", "1/2"])), 2);
    assert_eq!(code(&run(&["local-model", "--n", "1", "--e", "2,3", "--alpha", "1/5", "--degree", "4"])), 2);
}

#[test]
fn unknown_suite_is_an_error() {
    let dir = scratch("unknown");
    let out = run(&["emit-goldens", "--suite", "nope", "--output", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown suite"));
}

fn assert_same_tree(a: &Path, b: &Path) {
    let mut names: Vec<_> = std::fs::read_dir(a).unwrap().map(|e| e.unwrap().file_name()).collect();
    names.sort();
    let mut other: Vec<_> = std::fs::read_dir(b).unwrap().map(|e| e.unwrap().file_name()).collect();
    other.sort();
    assert_eq!(names, other);
    for n in names {
        assert_eq!(std::fs::read(a.join(&n)).unwrap(), std::fs::read(b.join(&n)).unwrap(), "{n:?} differs");
    }
}

#[test]
fn goldens_are_byte_stable() {
    for suite in ["kodaira", "charts"] {
        let first = scratch(&format!("{suite}-1"));
        let second = scratch(&format!("{suite}-2"));
        for dir in [&first, &second] {
            let out = run(&["emit-goldens", "--suite", suite, "--output", dir.to_str().unwrap()]);
            assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        }
        assert_same_tree(&first, &second);
        assert_same_tree(&first, &data(suite));
    }
}

#[test]
fn exact_reports_do_not_depend_on_jobs() {
    let dir = scratch("jobs");
    let path = dir.join("two-three.json");
    std::fs::write(&path, serde_json::to_string(&two_three()).unwrap()).unwrap();
    let one = run(&["degeneration", "--input", path.to_str().unwrap(), "--jobs", "1"]);
    let four = run(&["degeneration", "--input", path.to_str().unwrap(), "--jobs", "4"]);
    assert_eq!(one.stdout, four.stdout);
    let pages = json_of(&one)["data"]["pages"].as_array().unwrap().len();
    assert!(pages > 1);
}

#[test]
fn cohomology_structure_reparses() {
    let dir = scratch("cohomology");
    let (_, dp) = pbhl_fixtures().into_iter().next().unwrap();
    let path = dir.join("dp.json");
    std::fs::write(&path, serde_json::to_string(&dp).unwrap()).unwrap();
    let out = run(&["cohomology", "--input", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let r = json_of(&out);
    let back: BigradedHL = serde_json::from_value(r["data"]["structure"].clone()).unwrap();
    assert!(back.dim() > 0);
}

#[test]
fn local_model_from_flags() {
    let out = run(&["local-model", "--n", "1", "--e", "2,3", "--degree", "5"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let r = json_of(&out);
    let lens: Vec<_> = r["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["name"].as_str().unwrap().starts_with("artinian_length"))
        .map(|c| c["measured"].as_u64().unwrap())
        .collect();
    assert_eq!(lens, vec![2, 3, 5]);
}

#[test]
fn mellin_exit_codes_follow_checks() {
    let ok = run(&["mellin-verify", "--case", "constant", "--chart", data("charts/chart-reduced-r0.json").to_str().unwrap()]);
    assert_eq!(code(&ok), 0);
    let renorm = run(&["mellin-verify", "--case", "renorm", "--tol", "1e-8"]);
    assert_eq!(code(&renorm), 0);
    let r1 = run(&["mellin-verify", "--case", "constant", "--chart", data("charts/chart-reduced-r1.json").to_str().unwrap()]);
    assert_eq!(code(&r1), 1);
    let check = &json_of(&r1)["checks"][0];
    assert_eq!(check["status"], "fail");
    assert!(check["witness"]["abs_error"].as_f64().unwrap() > 0.4);
}

#[test]
fn csv_and_text_formats() {
    let input = data("j3-j1.json");
    let csv_out = run(&["weightfilt", "--input", input.to_str().unwrap(), "--format", "csv"]);
    let text = String::from_utf8(csv_out.stdout).unwrap();
    assert!(text.starts_with("command,name,status,measured,target,provenance,witness\n"));
    assert_eq!(text.lines().count(), 5);
    let txt = run(&["weightfilt", "--input", input.to_str().unwrap(), "--format", "text"]);
    assert!(String::from_utf8(txt.stdout).unwrap().ends_with("4 checks, 0 failed\n"));
}

#[test]
fn report_written_to_output_file() {
    let dir = scratch("output");
    let path = dir.join("r.json");
    let out = run(&["weightfilt", "--input", data("j3-j1.json").to_str().unwrap(), "--output", path.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    assert!(out.stdout.is_empty());
    let r: Value = serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
    assert_eq!(r["command"], "weightfilt");
}

#[test]
fn seed_comes_from_flag_or_env() {
    let flag = json_of(&run(&["selftest", "--samples", "3", "--seed", "7"]));
    assert_eq!(flag["data"]["seed"], 7);
    let env = bin().args(["selftest", "--samples", "3"]).env("HODGE_LIMIT_SEED", "11").output().unwrap();
    assert_eq!(code(&env), 0);
    assert_eq!(json_of(&env)["data"]["seed"], 11);
}

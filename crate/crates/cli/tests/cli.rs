use std::process::{Command, Output};

use num_traits::One;
use serde_json::Value;

use ctasep::primitives::parse_rational;
use ctasep::Rational;

fn ctasep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ctasep"))
        .args(args)
        .env_remove("CTASEP_CACHE_DIR")
        .output()
        .unwrap()
}

fn json_of(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn stationary_is_a_distribution_of_rationals() {
    let v = json_of(&ctasep(&[
        "tasep",
        "stationary",
        "--m",
        "1,1,1",
        "--N",
        "5",
        "--exact",
    ]));
    let map = v.as_object().unwrap();
    assert_eq!(map.len(), 60);
    let total: Rational = map
        .values()
        .map(|p| parse_rational(p.as_str().unwrap()).unwrap())
        .sum();
    assert!(total.is_one());
}

#[test]
fn perm_dist_n3_schema() {
    let v = json_of(&ctasep(&["continuum", "pdist", "--n", "3"]));
    assert_eq!(v["213"], "1/12");
    assert_eq!(v.as_object().unwrap().len(), 6);
}

#[test]
fn emitted_json_round_trips() {
    let out = ctasep(&["continuum", "gpoly", "--pi", "4,3,1,2"]);
    let v = json_of(&out);
    let again = serde_json::to_string_pretty(&v).unwrap() + "\n";
    assert_eq!(again.as_bytes(), out.stdout.as_slice());
    assert_eq!(v["vars"], serde_json::json!(["q1", "q2", "q3", "q4"]));
}

#[test]
fn same_seed_same_bytes() {
    let args = [
        "continuum",
        "corr",
        "--n",
        "3",
        "--mc",
        "--samples",
        "2e4",
        "--seed",
        "11",
        "--format",
        "csv",
    ];
    let a = ctasep(&args);
    let b = ctasep(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    assert_eq!(text.lines().next(), Some("i,j,estimate,stderr,conjecture"));
    assert_eq!(text.lines().count(), 1 + 9);
}

#[test]
fn determinism_holds_across_thread_counts() {
    let run = |jobs: &str| {
        ctasep(&[
            "--jobs",
            jobs,
            "continuum",
            "pdist",
            "--n",
            "4",
            "--mc",
            "--samples",
            "5e4",
            "--seed",
            "3",
        ])
    };
    assert_eq!(run("1").stdout, run("3").stdout);
}

#[test]
fn count_with_formula_reports_status() {
    let v = json_of(&ctasep(&[
        "mlq",
        "count",
        "--pi",
        "4,3,2,1",
        "--b",
        "0,2,5,6",
        "--N",
        "8",
        "--formula",
        "w0",
    ]));
    assert_eq!(v["formula"]["status"], "match");
    assert_eq!(v["count"], v["formula"]["value"]);
}

#[test]
fn fw_example_shape() {
    let v = json_of(&ctasep(&["tab", "fw", "--m", "2,2,2,3", "--N", "13"]));
    assert_eq!(v["t"], 9);
    assert_eq!(v["conjugate"], serde_json::json!([6, 4, 3, 2]));
}

#[test]
fn ssyt_routes_agree_on_the_command_line() {
    for route in ["hook", "jt", "brute"] {
        let v = json_of(&ctasep(&[
            "tab",
            "ssyt-count",
            "--shape",
            "2,1",
            "--t",
            "3",
            "--route",
            route,
        ]));
        assert_eq!(v["count"], "8", "{route}");
    }
}

#[test]
fn rs_patterns_serialize_as_pair_lists() {
    let v = json_of(&ctasep(&["rs", "stationary", "--n", "3", "--k", "2"]));
    let total: Rational = v
        .as_object()
        .unwrap()
        .values()
        .map(|p| parse_rational(p.as_str().unwrap()).unwrap())
        .sum();
    assert!(total.is_one());
    let p = json_of(&ctasep(&["rs", "patterns", "--n", "2"]));
    assert_eq!(p, serde_json::json!([[[1, 2], [3, 4]], [[1, 4], [2, 3]]]));
}

#[test]
fn laplacian_of_a_harmonic_density_is_zero() {
    let v = json_of(&ctasep(&[
        "poly",
        "laplacian",
        "--pi",
        "1,4,3,2",
        "--n",
        "4",
    ]));
    assert_eq!(v["terms"], serde_json::json!([]));
}

#[test]
fn verify_passing_filter_exits_zero() {
    let v = json_of(&ctasep(&["verify", "fm-*"]));
    let reports = v.as_array().unwrap();
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["status"] == "proved-match"));
}

#[test]
fn verify_conjecture_filter() {
    let v = json_of(&ctasep(&["verify", "conj-corr-n4"]));
    assert_eq!(v[0]["status"], "conjecture-match");
}

#[test]
fn unknown_check_is_a_usage_error() {
    let out = ctasep(&["verify", "nonexistent-*"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no check matches"));
}

#[test]
fn bad_arguments_exit_one_and_help_exits_zero() {
    assert_eq!(
        ctasep(&["tasep", "stationary", "--m", "1,x", "--N", "3"])
            .status
            .code(),
        Some(1)
    );
    assert_eq!(ctasep(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(ctasep(&["--help"]).status.code(), Some(0));
    assert_eq!(
        ctasep(&["tasep", "step", "--word", "2.1.", "--site", "1"])
            .status
            .code(),
        Some(1)
    );
}

#[test]
fn csv_refused_for_nested_results() {
    let out = ctasep(&["--format", "csv", "continuum", "gpoly", "--pi", "21"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cache_hits_reproduce_fresh_output() {
    let dir = tempfile::tempdir().unwrap();
    let args = ["continuum", "pdist", "--n", "4"];
    let fresh = ctasep(&args);
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_ctasep"))
            .args(args)
            .env("CTASEP_CACHE_DIR", dir.path())
            .output()
            .unwrap()
    };
    let miss = run();
    let hit = run();
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);
    assert_eq!(fresh.stdout, miss.stdout);
    assert_eq!(fresh.stdout, hit.stdout);
}

#[test]
fn harmonic_census_n3() {
    let v = json_of(&ctasep(&["continuum", "harmonic", "--n", "3"]));
    assert_eq!(v["classes"], 2);
    assert_eq!(v["harmonic_classes"], 2);
    assert!(v["inconsistent"].as_array().unwrap().is_empty());
}

use std::process::{Command, Output};

use settol::ExtendedValue;

fn fixture(name: &str) -> String {
    format!("{}/../../fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_settol"))
        .args(args)
        .arg("--no-banner")
        .output()
        .expect("binary runs")
}

fn stdout(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn footer<'a>(text: &'a str, key: &str) -> &'a str {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.strip_prefix(": ")))
        .unwrap_or_else(|| panic!("no `{key}` line in\n{text}"))
}

const E2: &str = "v1-v6,v1-v7,v5-v6,v6-v7,v1-v4,v4-v5,v1-v5,v2-v3";

#[test]
fn single_on_graph_lists_every_edge() {
    let graph = fixture("appendixE.txt");
    let text = stdout(&["single", "--graph", &graph, "--verify"]);
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .take_while(|l| !l.contains(':'))
        .map(|l| l.split_whitespace().collect())
        .collect();
    assert_eq!(rows.len(), 13);
    let find = |label: &str| rows.iter().find(|r| r[0] == label).unwrap().clone();
    assert_eq!(find("v2-v5")[1..3], ["inf", "7"]);
    assert_eq!(find("v5-v7")[1..3], ["inf", "4"]);
    assert_eq!(find("v3-v4")[1..3], ["inf", "2"]);
    assert_eq!(find("v1-v2")[1..3], ["1", "0"]);
    assert_eq!(find("v3-v5")[1..3], ["1", "0"]);
    assert_eq!(footer(&text, "verified"), "yes");
}

#[test]
fn single_with_selected_elements() {
    let csp = fixture("triangle.json");
    let text = stdout(&["single", "--csp", &csp, "--elements", "c"]);
    let row: Vec<&str> = text.lines().nth(1).unwrap().split_whitespace().collect();
    assert_eq!(row[..3], ["c", "inf", "2"]);
    let all = stdout(&["single", "--csp", &csp, "--elements", ""]);
    assert_eq!(all.lines().filter(|l| l.ends_with("single")).count(), 3);
}

#[test]
fn set_upper_on_graph_by_eul() {
    let graph = fixture("appendixE.txt");
    let text = stdout(&[
        "set", "--graph", &graph, "--kind", "upper", "--set", E2, "--method", "eul", "--verify",
    ]);
    assert_eq!(footer(&text, "value"), "26");
    assert_eq!(footer(&text, "oracle"), "26");
}

#[test]
fn set_lower_on_graph_by_tree_formulas() {
    let graph = fixture("appendixE.json");
    let text = stdout(&[
        "set",
        "--graph",
        &graph,
        "--kind",
        "lower",
        "--set",
        "v2-v3,v3-v4,v5-v7",
        "--method",
        "mst-exact",
    ]);
    assert_eq!(footer(&text, "value"), "6");
}

#[test]
fn set_lower_reports_witness_as_json() {
    let csp = fixture("triangle.json");
    let text = stdout(&[
        "set", "--csp", &csp, "--kind", "lower", "--set", "a,c", "--method", "tll", "--format",
        "json",
    ]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    let value: ExtendedValue = v["value"].as_str().unwrap().parse().unwrap();
    assert_eq!(value, ExtendedValue::from_int(2));
    let alpha: Vec<&str> = v["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| r["alpha"].as_str().unwrap())
        .collect();
    assert_eq!(alpha, ["0", "2"]);
}

#[test]
fn json_values_round_trip() {
    let csp = fixture("triangle.json");
    let text = stdout(&["single", "--csp", &csp, "--format", "json"]);
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    for row in v["rows"].as_array().unwrap() {
        for key in ["upper", "lower"] {
            let s = row[key].as_str().unwrap();
            let parsed: ExtendedValue = s.parse().unwrap();
            assert_eq!(parsed.to_string(), s);
        }
    }
}

#[test]
fn all_lower_table_and_counts() {
    let csp = fixture("triangle.json");
    let text = stdout(&["all-lower", "--csp", &csp, "--format", "csv"]);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("set,cardinality,value,method,solves"));
    assert_eq!(text.lines().filter(|l| l.contains(",tll,")).count(), 7);
    let solves: usize = footer(&text, "solves").parse().unwrap();
    assert!(solves <= 8);
    let naive = stdout(&["all-lower", "--csp", &csp, "--method", "ell-naive"]);
    assert_eq!(footer(&naive, "solves"), "27");
}

#[test]
fn all_lower_rows_sorted_by_cardinality() {
    let csp = fixture("triangle.json");
    let text = stdout(&["all-lower", "--csp", &csp, "--format", "csv"]);
    let cards: Vec<usize> = text
        .lines()
        .skip(1)
        .filter(|l| !l.starts_with("solves"))
        .map(|l| l.rsplit(',').nth(3).unwrap().parse().unwrap())
        .collect();
    assert_eq!(cards, [1, 1, 1, 2, 2, 2, 3]);
}

#[test]
fn bounds_with_partition() {
    let csp = fixture("triangle.json");
    let text = stdout(&[
        "bounds", "--csp", &csp, "--set", "a,b,c", "--part", "a", "--part", "b,c", "--verify",
    ]);
    assert!(text.contains("partition {a} {b,c}"));
    assert_eq!(footer(&text, "best lower cap"), "2");
    assert_eq!(footer(&text, "lower"), "2");
}

#[test]
fn verify_random_batch_passes() {
    let text = stdout(&["verify", "--random", "15", "--seed", "9"]);
    assert_eq!(footer(&text, "result"), "PASS");
    assert_eq!(footer(&text, "seed"), "9");
    let text = stdout(&[
        "verify",
        "--random",
        "5",
        "--family",
        "graph",
        "--max-size",
        "5",
    ]);
    assert_eq!(footer(&text, "result"), "PASS");
}

#[test]
fn output_is_deterministic() {
    let graph = fixture("appendixE.txt");
    let csp = fixture("triangle.json");
    for args in [
        vec!["all-lower", "--csp", &csp, "--format", "csv"],
        vec![
            "set", "--graph", &graph, "--kind", "upper", "--set", E2, "--format", "json",
        ],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn banner_goes_to_stderr_only() {
    let csp = fixture("triangle.json");
    let out = Command::new(env!("CARGO_BIN_EXE_settol"))
        .args(["single", "--csp", &csp])
        .output()
        .unwrap();
    assert!(String::from_utf8_lossy(&out.stderr).starts_with("settol "));
    assert!(!String::from_utf8_lossy(&out.stdout).contains("unix time"));
}

#[test]
fn decimal_output_is_marked() {
    let dir = std::env::temp_dir().join("settol-cli-decimal.json");
    std::fs::write(
        &dir,
        r#"{"elements":["a","b"],"costs":{"a":"1/3","b":"1"},"solutions":[["a"],["b"]]}"#,
    )
    .unwrap();
    let text = stdout(&[
        "single",
        "--csp",
        dir.to_str().unwrap(),
        "--elements",
        "b",
        "--decimal",
        "3",
    ]);
    assert!(text.contains("~0.667"), "{text}");
}

#[test]
fn exit_codes() {
    let csp = fixture("triangle.json");
    let graph = fixture("appendixE.txt");
    assert_eq!(code(&["single", "--csp", "missing.json"]), 1);
    assert_eq!(
        code(&["single", "--graph", &csp, "--graph-format", "text"]),
        1
    );
    assert_eq!(code(&["single", "--csp", &csp, "--elements", "z"]), 2);
    assert_eq!(
        code(&[
            "set",
            "--csp",
            &csp,
            "--kind",
            "lower",
            "--set",
            "a",
            "--method",
            "mst-exact"
        ]),
        2
    );
    assert_eq!(
        code(&["set", "--csp", &csp, "--kind", "upper", "--set", "a", "--method", "tll"]),
        2
    );
    assert_eq!(
        code(&[
            "set",
            "--graph",
            &graph,
            "--kind",
            "upper",
            "--set",
            "v1-v2,v2-v3,v3-v5,v4-v5",
            "--method",
            "closed"
        ]),
        2
    );
    assert_eq!(code(&["all-lower", "--graph", &graph]), 2);
    assert_eq!(
        code(&["set", "--csp", &csp, "--kind", "lower", "--set", "a,a"]),
        2
    );
}

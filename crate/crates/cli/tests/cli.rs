use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn kmcalc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kmcalc")).args(args).output().expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

/// Number of partitions of `target` into parts drawn (with repetition) from
/// `parts`.
fn count_partitions(parts: &[Vec<i64>], target: &[i64]) -> u64 {
    fn go(parts: &[Vec<i64>], rest: &mut Vec<i64>, from: usize) -> u64 {
        if rest.iter().all(|&x| x == 0) {
            return 1;
        }
        let mut total = 0;
        for k in from..parts.len() {
            if parts[k].iter().zip(rest.iter()).all(|(p, r)| p <= r) {
                for (r, p) in rest.iter_mut().zip(&parts[k]) {
                    *r -= p;
                }
                total += go(parts, rest, k);
                for (r, p) in rest.iter_mut().zip(&parts[k]) {
                    *r += p;
                }
            }
        }
        total
    }
    go(parts, &mut target.to_vec(), 0)
}

#[test]
fn enumerate_is_deterministic() {
    let args = ["enumerate", "--family", "A", "--rank", "2", "--max-height", "5"];
    let a = kmcalc(&args);
    let b = kmcalc(&args);
    let c = kmcalc(&[&args[..], &["--sequential"]].concat());
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stdout, c.stdout);
}

#[test]
fn a2_count_matches_partition_function() {
    let out = kmcalc(&["enumerate", "--family", "A", "--rank", "2", "--max-height", "4"]);
    assert_eq!(code(&out), 0);
    let lines = String::from_utf8(out.stdout).unwrap();
    let n = lines.lines().count() - 1;
    let roots = vec![vec![1, 0], vec![0, 1], vec![1, 1]];
    let mut expected = 0;
    for a in 0..=4i64 {
        for b in 0..=(4 - a) {
            expected += count_partitions(&roots, &[a, b]);
        }
    }
    assert_eq!(n as u64, expected);
    let header: Value = serde_json::from_str(lines.lines().next().unwrap()).unwrap();
    assert_eq!(header["count"].as_u64(), Some(expected));
}

#[test]
fn unwritable_output_is_an_input_error() {
    let out = kmcalc(&["enumerate", "--family", "A", "--rank", "1", "--out", "/nonexistent-dir/g.jsonl"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn bad_arguments_exit_two() {
    assert_eq!(code(&kmcalc(&["enumerate", "--family", "Q", "--rank", "2"])), 2);
    assert_eq!(code(&kmcalc(&["enumerate", "--family", "A", "--rank", "2", "--word", "1,7"])), 2);
    assert_eq!(code(&kmcalc(&["frobnicate"])), 2);
}

#[test]
fn verify_passes_on_a2_and_affine_a1() {
    let out = kmcalc(&["verify", "--family", "A", "--rank", "2", "--max-height", "6"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(json_of(&out)["passed"], Value::Bool(true));
    let out = kmcalc(&["verify", "--family", "A", "--rank", "1", "--affine", "--max-height", "4"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn verify_reads_its_cache_and_detects_corruption() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["verify", "--family", "A", "--rank", "2", "--max-height", "4", "--cache", cache];
    let first = kmcalc(&args);
    assert_eq!(code(&first), 0);
    assert_eq!(json_of(&first)["fromCache"], Value::Bool(false));
    let second = kmcalc(&args);
    assert_eq!(code(&second), 0);
    assert_eq!(json_of(&second)["fromCache"], Value::Bool(true));

    let file = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    corrupt_phi(&file, 4);
    let third = kmcalc(&args);
    assert_eq!(code(&third), 1);
    let report = json_of(&third);
    let cache_suite = report["suites"].as_array().unwrap().iter().find(|s| s["name"] == "cache").unwrap();
    assert_eq!(cache_suite["findings"][0]["element"].as_u64(), Some(4));
}

fn corrupt_phi(path: &Path, id: usize) {
    let text = fs::read_to_string(path).unwrap();
    let lines: Vec<String> = text
        .lines()
        .enumerate()
        .map(|(k, line)| {
            if k == id + 1 {
                let mut v: Value = serde_json::from_str(line).unwrap();
                v["phi"]["1"] = Value::from(v["phi"]["1"].as_i64().unwrap() + 5);
                v.to_string()
            } else {
                line.to_string()
            }
        })
        .collect();
    fs::write(path, lines.join("\n") + "\n").unwrap();
}

#[test]
fn truncated_cache_line_names_the_element() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().to_str().unwrap();
    let args = ["enumerate", "--family", "A", "--rank", "2", "--max-height", "3", "--cache", cache];
    assert_eq!(code(&kmcalc(&args)), 0);
    let file = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    let text = fs::read_to_string(&file).unwrap();
    let mut lines: Vec<&str> = text.lines().collect();
    lines[3] = "{\"id\":2,\"string\":";
    fs::write(&file, lines.join("\n")).unwrap();
    let out = kmcalc(&["verify", "--family", "A", "--rank", "2", "--max-height", "3", "--cache", cache]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("element 2"));
}

#[test]
fn stalk_polynomials() {
    let out = kmcalc(&["stalk", "--family", "A", "--rank", "2", "--partition", "1:1"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["normalizedSinglePoint"], "1 + q^2");
    assert_eq!(v["raw"], "q^2 + q^4");

    let v = json_of(&kmcalc(&["stalk", "--family", "A", "--rank", "1", "--partition", "1:2"]));
    assert_eq!(v["raw"], "q^4");
    let v = json_of(&kmcalc(&["stalk", "--family", "A", "--rank", "1", "--partition", "2:1"]));
    assert_eq!(v["raw"], "q^2 + q^4");
    assert_eq!(v["normalizedSinglePoint"], "1");
}

#[test]
fn stalk_rejects_non_simply_laced() {
    let out = kmcalc(&["stalk", "--family", "B", "--rank", "2"]);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("dual-twist unimplemented"));
}

#[test]
fn parabolic_rows_agree() {
    let out = kmcalc(&["parabolic", "--family", "A", "--rank", "2", "--levi", "2", "--max-height", "6"]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    let rows = v["rows"].as_array().unwrap();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r["status"] != "mismatch"));
    let tsv = kmcalc(&["parabolic", "--family", "A", "--rank", "2", "--levi", "2", "--max-height", "6", "--format", "tsv"]);
    let text = String::from_utf8(tsv.stdout).unwrap();
    assert!(text.starts_with("m\tnu\tmult_graph\tmult_char\tmult_cnu\tstatus\n"));
    assert_eq!(text.lines().count(), rows.len() + 1);
}

#[test]
fn dims_for_a2() {
    let v = json_of(&kmcalc(&["dims", "--family", "A", "--rank", "2", "--levi", "1", "--theta", "1", "--vanishing", "4"]));
    assert_eq!(v["bundle"]["dim"], 6);
    assert_eq!(v["zastava"]["dimension"], 3);
    assert_eq!(v["zastava"]["rho_m_pairing"], "-1/2");
    assert_eq!(v["vanishingOrder"]["order"], 20);
    assert_eq!(v["vanishingOrder"]["filtrationSum"], 20);
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn adhm_scalar_example() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "x.json", r#"{"a":1,"n":1,"B1":[["3"]],"B2":[["-1/2"]],"i":[["1"]],"j":[["0"]]}"#);
    let out = kmcalc(&["adhm", "--datum", &f]);
    assert_eq!(code(&out), 0);
    let v = json_of(&out);
    assert_eq!(v["residualZero"], true);
    assert_eq!(v["stable"], true);
    assert_eq!(v["costable"], false);
    assert_eq!(v["charpolyB1"], "x - 3");
    assert_eq!(v["charpolyB2"], "x + 1/2");
    assert_eq!(v["monad"]["holds"], true);
}

#[test]
fn adhm_invariants_survive_conjugation() {
    let dir = tempfile::tempdir().unwrap();
    // Not a moment solution; the invariants are conjugation-invariant regardless.
    let x = r#"{"a":2,"n":1,
        "B1":[["1","1"],["0","2"]],
        "B2":[["0","1"],["0","0"]],
        "i":[["1"],["0"]],
        "j":[["0","0"]]}"#;
    let out = kmcalc(&["adhm", "--datum", &write(dir.path(), "x.json", x)]);
    let v = json_of(&out);
    let residual_zero = v["residualZero"].as_bool().unwrap();
    // g = [[1,1],[0,1]]: g B g^-1, g i, j g^-1.
    let y = r#"{"a":2,"n":1,
        "B1":[["1","2"],["0","2"]],
        "B2":[["0","1"],["0","0"]],
        "i":[["1"],["0"]],
        "j":[["0","0"]]}"#;
    let w = json_of(&kmcalc(&["adhm", "--datum", &write(dir.path(), "y.json", y)]));
    assert_eq!(v["invariants"], w["invariants"]);
    assert_eq!(v["charpolyB1"], w["charpolyB1"]);
    assert_eq!(residual_zero, w["residualZero"].as_bool().unwrap());
}

#[test]
fn adhm_shape_error_exits_two() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.json", r#"{"a":1,"n":2,"B1":[["1"]],"B2":[["0"]],"i":[["1"]],"j":[["0"]]}"#);
    assert_eq!(code(&kmcalc(&["adhm", "--datum", &f])), 2);
    assert_eq!(code(&kmcalc(&["adhm", "--datum", "/no/such/file.json"])), 2);
}

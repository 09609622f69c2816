use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn carrier(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_carrier")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json_out(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn stderr_error(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap_or_else(|e| panic!("bad error JSON ({e}): {}", String::from_utf8_lossy(&o.stderr)))
}

#[test]
fn junta_counts() {
    for (args, expected) in [(["3", "2"], "38"), (["4", "1"], "10"), (["2", "2"], "16")] {
        let o = carrier(&["junta", "count", args[0], args[1]]);
        assert!(o.status.success());
        assert_eq!(stdout(&o).trim(), expected);
    }
}

#[test]
fn junta_enumeration_to_file_and_budget() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("juntas.json");
    let o = carrier(&["junta", "enumerate", "3", "1", "--output", path.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(v["count"], 8);
    assert_eq!(v["truth_tables_hex"].as_array().unwrap().len(), 8);

    let o = Command::new(env!("CARGO_BIN_EXE_carrier")).args(["junta", "enumerate", "3", "2"]).env("CARRIER_JUNTA_BUDGET", "10").output().unwrap();
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(stderr_error(&o)["error"], "budget");
    // The flag beats the environment.
    let o = Command::new(env!("CARGO_BIN_EXE_carrier"))
        .args(["junta", "enumerate", "3", "2", "--budget-juntas", "100"])
        .env("CARRIER_JUNTA_BUDGET", "10")
        .output()
        .unwrap();
    assert!(o.status.success());
}

#[test]
fn polytope_reports() {
    let v = json_out(&carrier(&["polytope", "fvector", "3", "2"]));
    assert_eq!(v["f_vector"], serde_json::json!([38, 408, 1608, 2764, 2208, 776, 96]));
    assert_eq!(json_out(&carrier(&["polytope", "dim", "3", "2"]))["affine_dim"], 7);
    assert_eq!(json_out(&carrier(&["polytope", "fvector", "2", "1"]))["f_vector"], serde_json::json!([6, 12, 8]));
    let facets = json_out(&carrier(&["polytope", "facets", "2", "1"]));
    assert_eq!(facets["facets"].as_array().unwrap().len(), 8);
    let o = carrier(&["polytope", "facets", "3", "2", "--budget-vertices", "10"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn membership_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let vertex = dir.path().join("vertex.json");
    fs::write(&vertex, r#"{"n_inputs": 2, "p1": [0, 1, 0, 1]}"#).unwrap();
    let o = carrier(&["membership", vertex.to_str().unwrap(), "2", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json_out(&o);
    assert_eq!(v["member"], true);
    assert_eq!(v["weights"].as_array().unwrap().len(), 1);

    // Optimal second-order behavior at N = 4: P(1|x) = (4-h)(h+1)/6.
    let p1: Vec<String> = (0..16u32).map(|x| {
        let h = x.count_ones() as i64;
        let (num, den) = ((4 - h) * (h + 1), 6);
        format!("\"{num}/{den}\"")
    }).collect();
    let zstar = dir.path().join("zstar.json");
    fs::write(&zstar, format!(r#"{{"n_inputs": 4, "p1": [{}]}}"#, p1.join(","))).unwrap();
    let o = carrier(&["membership", zstar.to_str().unwrap(), "4", "3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(json_out(&o)["separating_hyperplane"]["normal"].is_array());

    let bad = dir.path().join("bad.json");
    fs::write(&bad, "{not json").unwrap();
    let o = carrier(&["membership", bad.to_str().unwrap(), "2", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o)["error"], "data");
    let o = carrier(&["membership", vertex.to_str().unwrap(), "3", "1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn optimize_is_deterministic() {
    let args = ["optimize", "4", "2", "--sym-u", "--sym-p", "--restarts", "8", "--seed", "3"];
    let a = carrier(&args);
    let b = carrier(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v = json_out(&a);
    assert!((v["delta"].as_f64().unwrap() - 0.04).abs() < 1e-6);
    let seq = carrier(&[&["--sequential"][..], &args[..]].concat());
    assert_eq!(seq.stdout, a.stdout);
}

#[test]
fn optimize_three_sites_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let log = dir.path().join("log.jsonl");
    let o = carrier(&["optimize", "3", "2", "--restarts", "4", "--log", log.to_str().unwrap()]);
    assert!(o.status.success());
    assert!((json_out(&o)["delta"].as_f64().unwrap() - 1.0 / 6.0).abs() < 1e-6);
    let lines: Vec<Value> = fs::read_to_string(&log).unwrap().lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 4);
    assert!(lines.iter().all(|l| l["seed"] == 0 && l["delta"].is_number() && l["iterations"].is_number()));
}

#[test]
fn theorem2_outputs() {
    let v = json_out(&carrier(&["theorem2", "4"]));
    assert_eq!(v["delta"], "1/15");
    assert_eq!(v["p0_all_zero_input"], "1/3");
    assert_eq!(json_out(&carrier(&["theorem2", "5"]))["delta"], "1/36");
    let o = carrier(&["theorem2", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr_error(&o)["message"].as_str().unwrap().contains("N > 3"));
}

#[test]
fn usage_errors_are_json() {
    let o = carrier(&["junta", "count", "5"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_error(&o)["error"], "usage");
    let o = carrier(&["junta", "count", "2", "3"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(carrier(&["--help"]).status.success());
}

fn parse_csv(text: &str) -> Vec<Vec<String>> {
    text.lines().map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn scan_is_reproducible_and_ordered() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("scan.toml");
    fs::write(
        &config,
        r#"
n_range = [4, 5]
modes = ["d1-sym", "d1-asym", "d2-sym", "theorem1", "theorem2"]
restarts = 6
seed = 11
"#,
    )
    .unwrap();
    let out = dir.path().join("a.csv");
    let o = carrier(&["scan", config.to_str().unwrap(), "--output", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let first = fs::read_to_string(&out).unwrap();
    let o = carrier(&["scan", config.to_str().unwrap(), "--output", "-"]);
    assert_eq!(stdout(&o), first);

    let rows = parse_csv(&first);
    assert_eq!(rows[0].join(","), "N,mode,delta,delta_exact,source,seed,restarts");
    assert_eq!(rows.len(), 1 + 2 * 5);
    for n in ["4", "5"] {
        let value = |mode: &str| -> f64 { rows.iter().find(|r| r[0] == n && r[1] == mode).unwrap()[2].parse().unwrap() };
        let chain = [value("d1-sym"), value("d1-asym"), value("d2-sym"), value("theorem1"), value("theorem2")];
        for w in chain.windows(2) {
            assert!(w[0] <= w[1] + 1e-9, "N={n}: {chain:?}");
        }
        assert!((chain[2] - chain[3]).abs() < 1e-6);
    }
    let t2 = rows.iter().find(|r| r[0] == "4" && r[1] == "theorem2").unwrap();
    assert_eq!(t2[2], "0.0666666666666667");
    assert_eq!(t2[3], "1/15");
    assert_eq!(t2[4], "closed-form");
    let t1 = rows.iter().find(|r| r[0] == "4" && r[1] == "theorem1").unwrap();
    assert_eq!(t1[2], "0.0400000000000000");
    let numeric = rows.iter().find(|r| r[1] == "d1-sym").unwrap();
    assert_eq!((numeric[4].as_str(), numeric[5].as_str(), numeric[6].as_str()), ("numeric", "11", "6"));
}

#[test]
fn scan_rejects_bad_configs() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("bad.toml");
    fs::write(&config, "n_range = [1, 30]\n").unwrap();
    assert_eq!(carrier(&["scan", config.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&config, "modes = [\"d2-weird\"]\n").unwrap();
    assert_eq!(carrier(&["scan", config.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&config, "unknown_key = 1\n").unwrap();
    assert_eq!(carrier(&["scan", config.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(carrier(&["scan", "/nonexistent/config.toml"]).status.code(), Some(2));
}

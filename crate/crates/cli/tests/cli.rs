use dioph_cli::config::{self, Overrides};
use dioph_cli::{run_config, strip_timings};
use serde_json::{json, Value as Json};
use std::path::Path;
use std::process::{Command, Output};

fn dioph(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dioph")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> Json {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{}: {}", e, String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, v: &Json) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.display().to_string()
}

#[test]
fn pell_prints_the_fundamental_solution() {
    let o = dioph(&["pell", "--d", "2"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"x":3,"y":2}"#);
    let o = dioph(&["pell", "--d", "5"]);
    assert_eq!(stdout_json(&o), json!({"x": 9, "y": 4}));
}

#[test]
fn ec_mul_on_the_default_curve() {
    let o = dioph(&["ec", "mul", "--n", "5"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(String::from_utf8(o.stdout).unwrap().trim(), r#"{"x":"1/4","y":"-5/8"}"#);
    let o = dioph(&["ec", "mul", "--n", "-2"]);
    assert_eq!(stdout_json(&o), json!({"x": "1", "y": "-1"}));
    let o = dioph(&["ec", "mul", "--a", "0,0,1,-1,0", "--point", "0,0", "--n", "3"]);
    assert_eq!(stdout_json(&o), json!({"x": "-1", "y": "-1"}));
}

#[test]
fn ec_denom_of_the_tenth_multiple() {
    let o = dioph(&["ec", "denom", "--n", "10"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["denominator"]["divisor"], json!("(2)^4"));
}

#[test]
fn density_table_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("rows.csv");
    let o = dioph(&["density", "--X", "10000", "--csv", csv.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    let f = v["fraction_approx"].as_f64().unwrap();
    assert!((f - 2.0 / 3.0).abs() < 0.03, "{}", f);
    let text = std::fs::read_to_string(&csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("p,split_type"));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len() as u64, v["total_count"].as_u64().unwrap());
    // 2 is inert in x^3 - 3x - 1; 3 ramifies and is left out
    assert_eq!(rows[0], "2,inert");
    assert!(!rows.iter().any(|r| r.starts_with("3,")));

    let o = dioph(&["density", "--field", "sqrt2", "--X", "10000"]);
    let f = stdout_json(&o)["fraction_approx"].as_f64().unwrap();
    assert!((f - 0.5).abs() < 0.03, "{}", f);
}

#[test]
fn field_and_prime_commands() {
    let o = dioph(&["field", "info", "--poly=-2,0,1"]);
    let v = stdout_json(&o);
    assert_eq!((v["degree"].clone(), v["disc"].clone(), v["signature"].clone()), (json!(2), json!(8), json!([2, 0])));
    let o = dioph(&["factor-prime", "--field", "cyclic_cubic", "--p", "2"]);
    let v = stdout_json(&o);
    assert_eq!(v.as_array().unwrap().len(), 1);
    assert_eq!(v[0]["f"], json!(3));
    assert_eq!(dioph(&["field", "info", "--poly=-4,0,1"]).status.code(), Some(2));
}

#[test]
fn flag_errors_exit_two() {
    assert_eq!(dioph(&["pell"]).status.code(), Some(2));
    assert_eq!(dioph(&["pell", "--d", "4"]).status.code(), Some(2));
    assert_eq!(dioph(&["pell", "--d", "x"]).status.code(), Some(2));
    assert_eq!(dioph(&["ec", "mul", "--n", "five"]).status.code(), Some(2));
    assert_eq!(dioph(&["lemma-suite", "nonsense"]).status.code(), Some(2));
    assert_eq!(dioph(&["witness", "construct", "setB"]).status.code(), Some(2));
    assert_eq!(dioph(&["witness", "construct", "setA", "--mode", "loose"]).status.code(), Some(2));
    assert_eq!(dioph(&["density", "--field", "nowhere"]).status.code(), Some(2));
    assert_eq!(dioph(&["rank1", "model", "--p", "4"]).status.code(), Some(2));
}

#[test]
fn lemma_suites_and_model() {
    let o = dioph(&["lemma-suite", "elliptic"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["multiple_with_2_4"], json!(10));
    let o = dioph(&["lemma-suite", "torsion"]);
    assert_eq!(stdout_json(&o), json!({"counts": {"3": 7, "5": 8}, "torsion_bound": 1}));
    assert_eq!(dioph(&["lemma-suite", "xdifference"]).status.code(), Some(0));
    let o = dioph(&["rank1", "model"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["big_m"], json!(2520));
    assert_eq!((v["points_mod_p"].clone(), v["points_mod_q"].clone()), (json!(8), json!(9)));
}

#[test]
fn witness_files_round_trip_and_tamper() {
    let dir = tempfile::tempdir().unwrap();
    let b = dir.path().join("b.json");
    let bs = b.to_str().unwrap();
    let o = dioph(&["witness", "construct", "setA", "--m", "2", "--mode", "relaxed:2", "--out", bs]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let o = dioph(&["witness", "verify", "setA", "--m", "2", "--bundle", bs]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout_json(&o)["pass"], json!(true));
    // the bundle certifies 4, not 9
    let o = dioph(&["witness", "verify", "setA", "--m", "3", "--bundle", bs]);
    assert_eq!(o.status.code(), Some(1));

    let mut v: Json = serde_json::from_str(&std::fs::read_to_string(&b).unwrap()).unwrap();
    let w = v["assignment"]["w"]["coords"][0].as_str().unwrap().parse::<i64>().unwrap();
    v["assignment"]["w"]["coords"][0] = json!((w + 1).to_string());
    let t = write(dir.path(), "t.json", &v);
    let o = dioph(&["witness", "verify", "setA", "--m", "2", "--bundle", &t]);
    assert_eq!(o.status.code(), Some(1));
    let failing: Vec<Json> = stdout_json(&o)["checks"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|c| c["status"] == json!("fail"))
        .map(|c| c["label"].clone())
        .collect();
    assert!(failing.contains(&json!("eq:cong1.1")), "{:?}", failing);

    let g = write(dir.path(), "garbage.json", &json!({"system": "setA"}));
    assert_ne!(dioph(&["witness", "verify", "setA", "--m", "2", "--bundle", &g]).status.code(), Some(0));
    let o = dioph(&["witness", "verify", "part2", "--x", "2", "--bundle", bs]);
    assert_eq!(o.status.code(), Some(2), "system mismatch is an input error");
}

#[test]
fn deg2_and_bigring_witnesses() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().join("d.json");
    let ds = d.to_str().unwrap();
    assert_eq!(dioph(&["witness", "construct", "deg2", "--x", "1", "--out", ds]).status.code(), Some(0));
    assert_eq!(dioph(&["witness", "verify", "deg2", "--x", "1", "--bundle", ds]).status.code(), Some(0));
    let s = dir.path().join("s.json");
    let ss = s.to_str().unwrap();
    assert_eq!(dioph(&["witness", "construct", "setA_bigring", "--m", "1", "--out", ss]).status.code(), Some(0));
    assert_eq!(dioph(&["witness", "verify", "setA_bigring", "--m", "1", "--bundle", ss]).status.code(), Some(0));
    let o = dioph(&["witness", "construct", "part2_bigring", "--x", "1", "--budget", "2000"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("budget"));
}

fn run_file(cfg: &Json, extra: &[&str]) -> (Option<i32>, Option<Json>) {
    let dir = tempfile::tempdir().unwrap();
    let c = write(dir.path(), "cfg.json", cfg);
    let out = dir.path().join("report.json");
    let mut args = vec!["run", c.as_str(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    let o = dioph(&args);
    let rep = std::fs::read_to_string(&out).ok().map(|t| serde_json::from_str(&t).unwrap());
    (o.status.code(), rep)
}

#[test]
fn run_lemma_suite_config_passes() {
    let cfg = json!({"tasks": [{"name": "suite", "kind": "lemma_suite", "curve": "default"}]});
    let (code, rep) = run_file(&cfg, &[]);
    assert_eq!(code, Some(0));
    let rep = rep.unwrap();
    let t = &rep["tasks"]["suite"];
    assert_eq!(t["status"], json!("pass"));
    assert!(t["timings"]["ms"].is_number());
    let labels: Vec<&str> = t["checks"].as_array().unwrap().iter().map(|c| c["label"].as_str().unwrap()).collect();
    assert!(labels.contains(&"lemma:evenorder") && labels.contains(&"lemma:ratio"));
}

#[test]
fn run_config_errors_exit_two() {
    let bad_ref = json!({"tasks": [{"kind": "field_info", "field": "missing"}]});
    assert_eq!(run_file(&bad_ref, &[]), (Some(2), None));
    let bad_curve_ref = json!({"curves": {"E": {"field": "nope", "a": [0, 0, 0, 0, 1]}}});
    assert_eq!(run_file(&bad_curve_ref, &[]).0, Some(2));
    let not_json = json!("just a string");
    assert_eq!(run_file(&not_json, &[]).0, Some(2));
    let unknown_key = json!({"tasks": [{"kind": "pell", "d": 2, "dd": 3}]});
    assert_eq!(run_file(&unknown_key, &[]).0, Some(2));
    let zero_budget = json!({"tasks": [{"kind": "witness", "system": "setA", "budget": 0}]});
    assert_eq!(run_file(&zero_budget, &[]).0, Some(2));
    let bad_mode = json!({"tasks": [{"kind": "witness", "system": "setA", "mode": "fast"}]});
    assert_eq!(run_file(&bad_mode, &[]).0, Some(2));
    let dup = json!({"tasks": [{"kind": "pell", "d": 2, "name": "a"}, {"kind": "pell", "d": 3, "name": "a"}]});
    assert_eq!(run_file(&dup, &[]).0, Some(2));
    let cyclic = json!({"prime_sets": {"A": {"rule": "B"}, "B": {"rule": "A"}}});
    assert_eq!(run_file(&cyclic, &[]).0, Some(2));
    let reducible = json!({"fields": {"F": {"min_poly": [-4, 0, 1]}}});
    assert_eq!(run_file(&reducible, &[]).0, Some(2));
}

#[test]
fn run_empty_task_list() {
    let (code, rep) = run_file(&json!({"tasks": []}), &[]);
    assert_eq!(code, Some(0));
    assert_eq!(rep.unwrap(), json!({"seed": 0, "tasks": {}}));
    let (code, rep) = run_file(&json!({}), &["--seed", "9"]);
    assert_eq!(code, Some(0));
    assert_eq!(rep.unwrap()["seed"], json!(9));
}

#[test]
fn run_reports_failures_and_errors() {
    let cfg = json!({"tasks": [
        {"name": "good", "kind": "ec_mul", "n": 5, "expect": {"x": "1/4", "y": "-5/8"}},
        {"name": "wrong", "kind": "ec_mul", "n": 5, "expect": {"x": "1/4", "y": "5/8"}},
        {"name": "budget", "kind": "witness", "system": "part2_bigring", "budget": 100},
    ]});
    let (code, rep) = run_file(&cfg, &[]);
    assert_eq!(code, Some(1));
    let rep = rep.unwrap();
    assert_eq!(rep["tasks"]["good"]["status"], json!("pass"));
    assert_eq!(rep["tasks"]["wrong"]["status"], json!("fail"));
    assert_eq!(rep["tasks"]["budget"]["status"], json!("error"));
}

#[test]
fn run_full_fixture_config() {
    let cfg = json!({
        "seed": 5,
        "fields": {"K": {"min_poly": [-2, 0, 1]}},
        "curves": {"E": {"field": "K", "a": [0, 0, 1, -1, 0], "P": [[0], [0, 0]]}},
        "prime_sets": {
            "two": {"rule": {"list": [[2, [0, 1]]]}},
            "W": {"rule": {"union": [{"no_deg_one_in": "cyclic_cubic"}, {"list": [[3]]}]}},
            "K2": {"field": "K", "rule": {"closure": {"list": [[7, [3, 1]]]}}},
        },
        "tasks": [
            {"name": "mul_over_K", "kind": "ec_mul", "curve": "E", "n": 4, "expect": {"x": "2", "y": "-3"}},
            {"name": "seta_exact", "kind": "witness", "system": "setA", "m": 1, "mode": "paper_exact"},
            {"name": "seta_ring", "kind": "witness", "system": "setA", "m": 1, "ring": "two"},
            {"name": "part2", "kind": "witness", "system": "part2", "x": 1, "p": 3},
            {"name": "members", "kind": "prime_set", "set": "W", "bound": 20},
            {"name": "closure", "kind": "prime_set", "set": "K2", "bound": 10},
            {"name": "tower", "kind": "degree_index", "q": 5},
            {"name": "params", "kind": "bigring_params"},
            {"name": "negorder", "kind": "negorder", "samples": 10},
            {"name": "pell", "kind": "pell", "d": "3"},
        ]
    });
    let (code, rep) = run_file(&cfg, &[]);
    let rep = rep.unwrap();
    assert_eq!(code, Some(0), "{:#}", rep);
    let t = &rep["tasks"];
    // primes up to 20 without a root of x^3 - 3x - 1, plus 3
    assert_eq!(t["members"]["details"]["members"], json!(["(2)", "(3)", "(5)", "(7)", "(11)", "(13)"]));
    assert_eq!(t["closure"]["details"]["members"].as_array().unwrap().len(), 2);
    assert_eq!(t["tower"]["details"]["index"], json!(3));
    assert_eq!(t["params"]["details"]["A1"], json!(2));
    assert_eq!(t["params"]["details"]["rank"], json!(7));
    assert_eq!(t["pell"]["details"], json!({"x": 2, "y": 1}));
    let checks = t["seta_exact"]["checks"].as_array().unwrap();
    assert!(checks.iter().any(|c| c["label"] == json!("eq:cong1.1")));
}

#[test]
fn reports_are_deterministic_modulo_timings() {
    let text = json!({
        "seed": 17,
        "tasks": [
            {"kind": "negorder", "samples": 20},
            {"kind": "density", "X": 2000},
            {"kind": "witness", "system": "setA", "m": 2, "mode": "relaxed:2"},
            {"kind": "rank1_model"},
        ]
    })
    .to_string();
    let ov = Overrides::default();
    let (mut a, ca) = run_config(&text, &ov, true).unwrap();
    let (mut b, cb) = run_config(&text, &ov, true).unwrap();
    assert_eq!(ca, 0);
    assert_eq!(ca, cb);
    strip_timings(&mut a);
    strip_timings(&mut b);
    assert_eq!(serde_json::to_string_pretty(&a).unwrap(), serde_json::to_string_pretty(&b).unwrap());
    let (c, _) = run_config(&text, &ov, false).unwrap();
    assert_eq!(a, c);
}

#[test]
fn overrides_replace_config_values() {
    let text = json!({"seed": 1, "tasks": [{"name": "w", "kind": "witness", "system": "setA", "m": 1, "mode": "paper_exact"}]})
        .to_string();
    let ov = Overrides { seed: Some(4), budget: Some(1), mode: Some(dioph_core::dioph::Mode::Relaxed(3)) };
    let (seed, tasks) = config::load(&text, &ov).unwrap();
    assert_eq!(seed, 4);
    match &tasks[0].kind {
        config::TaskKind::Witness(w) => {
            assert_eq!(w.budget, 1);
            assert_eq!(w.mode, dioph_core::dioph::Mode::Relaxed(3));
        }
        _ => panic!("witness task expected"),
    }
}

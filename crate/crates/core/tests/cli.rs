use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn kfl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfl")).args(args).output().unwrap()
}

fn kfl_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kfl"))
        .args(args)
        .env(key, value)
        .output()
        .unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn stderr_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stderr).unwrap()
}

struct Scratch(PathBuf);

impl Scratch {
    fn new(name: &str) -> Self {
        let dir = std::env::temp_dir().join(format!("kfl-cli-{}-{name}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        Scratch(dir)
    }

    fn file(&self, name: &str, body: &str) -> String {
        let p = self.0.join(name);
        fs::write(&p, body).unwrap();
        p.to_str().unwrap().to_owned()
    }

    fn path(&self, name: &str) -> String {
        self.0.join(name).to_str().unwrap().to_owned()
    }
}

impl Drop for Scratch {
    fn drop(&mut self) {
        let _ = fs::remove_dir_all(&self.0);
    }
}

const CYCLE3: &str = r#"{"n": 3, "edges": [[0,1],[1,2],[2,0]]}"#;

#[test]
fn classify_three_cycle() {
    let s = Scratch::new("classify");
    let frame = s.file("cycle.json", CYCLE3);
    let o = kfl(&["classify", "--frame", &frame, "--m", "1", "--n", "4"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["height"], 1);
    assert_eq!(v["clusters"], 1);
    assert_eq!(v["cluster_sizes"]["3"], 1);
    assert_eq!(v["pretransitivity_index"], 2);
    assert_eq!(v["edges"], 3);
    assert_eq!(v["mn_frame"]["holds"], true);
    assert_eq!(v["m_transitive"]["holds"], false);

    let pretty = kfl(&["--pretty", "classify", "--frame", &frame]);
    let text = String::from_utf8(pretty.stdout).unwrap();
    assert!(text.contains("height: 1"), "{text}");
}

#[test]
fn check_and_valid() {
    let s = Scratch::new("check");
    let model = s.file("m.json", r#"{"n": 3, "edges": [[0,1],[1,2]], "val": {"p1": [2]}}"#);
    let o = kfl(&["check", "--model", &model, "--formula", "<><>p1"]);
    assert_eq!(stdout_json(&o)["points"], serde_json::json!([0]));
    let o = kfl(&["check", "--model", &model, "--formula", "<>p1", "--point", "1"]);
    assert_eq!(stdout_json(&o)["holds"], true);
    let o = kfl(&["check", "--model", &model, "--formula", "p1", "--point", "7"]);
    assert_eq!(o.status.code(), Some(2));

    let frame = s.file("f.json", r#"{"n": 3, "edges": [[0,1],[1,2]]}"#);
    let o = kfl(&["valid", "--frame", &frame, "--formula", "<><>p1 -> <>p1"]);
    let v = stdout_json(&o);
    assert_eq!(v["valid"], false);
    assert_eq!(v["counterexample"]["point"], 0);
    let o = kfl(&["valid", "--frame", &frame, "--formula", "[][][]p1"]);
    assert_eq!(stdout_json(&o)["valid"], true);
}

#[test]
fn filtrate_round_trip() {
    let s = Scratch::new("filtrate");
    let model = s.file(
        "m.json",
        r#"{"n": 6, "edges": [[0,1],[1,2],[2,3],[3,0],[0,4],[4,5],[5,4],[1,4],[2,4],[3,4],[0,5],[1,5],[2,5],[3,5]], "val": {"p1": [0,2,4]}}"#,
    );
    let out_model = s.path("out.json");
    let o = kfl(&[
        "filtrate", "--model", &model, "--formula", "p1 & <>~p1", "--class", "g:3", "--out-model", &out_model,
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    assert_eq!(v["report"]["output_in_class"], true);
    assert_eq!(v["report"]["output_satisfies"], true);
    let witness = v["report"]["witness_image"].as_u64().unwrap().to_string();
    let o = kfl(&["check", "--model", &out_model, "--formula", "p1 & <>~p1", "--point", &witness]);
    assert_eq!(stdout_json(&o)["holds"], true);
    let o = kfl(&["classify", "--frame", &out_model, "--m", "3"]);
    assert_eq!(stdout_json(&o)["m_transitive"]["holds"], true);

    let o = kfl(&["filtrate", "--model", &model, "--formula", "p1 & ~p1", "--class", "g:3"]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "unsatisfiable");
    let o = kfl(&["filtrate", "--model", &model, "--formula", "p1", "--class", "g:0"]);
    assert_eq!(o.status.code(), Some(1));
    let o = kfl(&["filtrate", "--model", &model, "--formula", "p1", "--class", "gg:0"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn proper_refine_fan() {
    let s = Scratch::new("proper");
    let frame = s.file("fan.json", r#"{"n": 5, "edges": [[0,1],[0,2],[0,3],[0,4]]}"#);
    let part = s.file("p.json", r#"{"blocks": [[0,1,2,3,4]]}"#);
    let o = kfl(&["proper-refine", "--frame", &frame, "--partition", &part]);
    let v = stdout_json(&o);
    assert_eq!(v["blocks"], serde_json::json!([[0], [1, 2, 3, 4]]));
    assert_eq!(v["proper"], true);
    assert_eq!(v["input_proper"], false);
    let short = s.file("q.json", r#"{"blocks": [[0,1]]}"#);
    let o = kfl(&["proper-refine", "--frame", &frame, "--partition", &short]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn gen_commands() {
    let text = |args: &[&str]| String::from_utf8(kfl(args).stdout).unwrap().trim().to_owned();
    assert_eq!(text(&["gen", "mn-axiom", "--m", "1", "--n", "2"]), "<><>p1 -> <>p1");
    assert_eq!(text(&["gen", "pretrans-axiom", "--m", "0"]), "<>p1 -> p1");
    let g = text(&["gen", "glivenko", "--m", "1", "--formula", "p1"]);
    assert!(g.contains("[]") && g.contains("<>"), "{g}");
    let b = text(&["gen", "bh", "--h", "2", "--m", "1"]);
    assert!(b.contains("p2"), "{b}");
}

#[test]
fn enumerate_streams_and_caps() {
    let o = kfl(&["enumerate", "--size", "2"]);
    let lines: Vec<Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 16);
    assert!(lines.iter().all(|v| v["n"] == 2));
    let count = |class: &str| String::from_utf8(kfl(&["enumerate", "--size", "2", "--class", class]).stdout)
        .unwrap()
        .lines()
        .count();
    assert_eq!(count("mn:1,2"), 13);
    assert_eq!(count("g:1"), 16);
    assert_eq!(count("g:0"), 4);
    let o = kfl(&["enumerate", "--size", "3", "--class", "g:1", "--height", "1"]);
    assert!(o.status.success());
    let o = kfl_env(&["enumerate", "--size", "2"], "KFL_MAX_ENUM", "1");
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(stderr_json(&o)["error"], "cap_exceeded");
    let o = kfl_env(&["enumerate", "--size", "2"], "KFL_MAX_ENUM", "lots");
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn verify_filtration_suite() {
    let o = kfl(&["verify", "--suite", "filtration", "--cases", "1000", "--seed", "42"]);
    assert_eq!(o.status.code(), Some(0));
    let v = stdout_json(&o);
    assert_eq!(v["passed"], true);
    assert_eq!(v["cases"], 1000);
    let again = kfl(&["verify", "--suite", "filtration", "--cases", "1000", "--seed", "42"]);
    assert_eq!(o.stdout, again.stdout);
    for suite in ["proper", "finitize", "definability", "glivenko"] {
        let o = kfl(&["verify", "--suite", suite, "--cases", "50", "--seed", "7"]);
        assert_eq!(o.status.code(), Some(0), "{suite}");
    }
    let o = kfl(&["verify", "--suite", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_inputs_exit_2() {
    let s = Scratch::new("malformed");
    let bad = s.file("bad.json", r#"{"n": 2, "edges": [[0,5]]}"#);
    let o = kfl(&["classify", "--frame", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(stderr_json(&o)["error"], "parse");
    let o = kfl(&["classify", "--frame", &s.path("missing.json")]);
    assert_eq!(o.status.code(), Some(2));
    let o = kfl(&["classify"]);
    assert_eq!(o.status.code(), Some(2));
}

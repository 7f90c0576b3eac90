use std::fs;
use std::path::Path;
use std::process::{Command, Output};

const GGN: &str = env!("CARGO_BIN_EXE_ggn");

fn run_in(cwd: &Path, args: &[&str]) -> Output {
    Command::new(GGN).current_dir(cwd).args(args).output().unwrap()
}

fn run(args: &[&str]) -> Output {
    Command::new(GGN).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const SUBCOMMANDS: [&str; 7] = ["simulate", "ggn", "infer", "evaluate", "pd-demo", "karate-demo", "stats"];

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(&[]).status.code(), Some(2));
    for sub in SUBCOMMANDS {
        assert_eq!(run(&[sub, "--no-such-flag"]).status.code(), Some(2), "{sub}");
    }
    assert_eq!(run(&["evaluate", "--tie-rule", "random"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--accuracy-scope", "some"]).status.code(), Some(2));
    assert_eq!(run(&["evaluate", "--runs", "many"]).status.code(), Some(2));
}

#[test]
fn runtime_errors_exit_with_one() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("o");
    let out = out.to_str().unwrap();
    let missing = run(&["evaluate", "--dataset", "/definitely/missing.txt", "--out", out]);
    assert_eq!(missing.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&missing.stderr).contains("missing.txt"));
    assert_eq!(run(&["evaluate", "--runs", "0", "--out", out]).status.code(), Some(1));
    assert_eq!(run(&["karate-demo", "--node", "99"]).status.code(), Some(1));
    assert_eq!(run(&["pd-demo", "--outcome", "Q,X"]).status.code(), Some(1));
}

#[test]
fn help_lists_flags_with_defaults() {
    for sub in SUBCOMMANDS {
        let o = run(&[sub, "--help"]);
        assert_eq!(o.status.code(), Some(0));
        let text = stdout(&o);
        for flag in ["--config", "--out", "--seed"] {
            assert!(text.contains(flag), "{sub} help lacks {flag}");
        }
        assert!(text.contains("[default: 0]"), "{sub}");
    }
    let text = stdout(&run(&["evaluate", "--help"]));
    for flag in ["--dataset", "--c", "--k", "--runs", "--jobs", "--symmetrize", "--tie-rule", "--accuracy-scope"] {
        assert!(text.contains(flag), "evaluate help lacks {flag}");
    }
    assert!(text.contains("[default: current-first]") && text.contains("[default: predicted]"));
}

#[test]
fn pd_demo_prints_the_worked_example() {
    let o = run(&["pd-demo", "--outcome", "Q,S"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("pure Nash equilibria: (S,S)\n"));
    assert!(text.contains("GGN for observed outcome (Q,S):\n  p1 -> p2: 4\n  p2 -> p1: 0\n"));
    assert!(!text.contains("(Q,Q):"));
    let both = stdout(&run(&["pd-demo"]));
    assert!(both.contains("(Q,S):") && both.contains("(Q,Q):"));
}

#[test]
fn evaluate_writes_results_summary_and_config() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = run(&[
        "evaluate", "--dataset", "karate-planted", "--c", "0.2", "--k", "2", "--runs", "5", "--seed", "7", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "dataset,c,k,run,seed,avg_accuracy,predictive_pct,sweeps,runtime_s");
    assert_eq!(lines.len(), 6);
    let seeds: Vec<&str> = lines[1..].iter().map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(seeds, ["7", "8", "9", "10", "11"]);
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let cell = &summary["karate-planted:23"]["0.2"]["2"];
    assert_eq!(cell["runs"], 5);
    assert!(cell["avg_accuracy"]["mean"].is_number());
    assert!(cell["avg_accuracy"]["std"].is_number());
    assert_eq!(cell["avg_accuracy"]["excluded"], 0);
    let config: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(config["seed"], 7);
    assert_eq!(config["c"], serde_json::json!([0.2]));
    assert!(String::from_utf8_lossy(&o.stderr).contains("\"seed\": 7"));
}

#[test]
fn order_zero_predicts_nothing() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("k0");
    let o = run(&["evaluate", "--k", "0", "--runs", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    for line in csv.lines().skip(1) {
        let fields: Vec<&str> = line.split(',').collect();
        assert_eq!(fields[5], "", "accuracy must be undefined");
        assert_eq!(fields[6], "0");
    }
    let summary: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    let cell = &summary["karate-planted:23"]["0.2"]["0"];
    assert!(cell["avg_accuracy"]["mean"].is_null());
    assert_eq!(cell["avg_accuracy"]["excluded"], 2);
}

#[test]
fn config_file_fills_unset_flags_only() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("cfg.json");
    fs::write(&cfg, r#"{"c": [0.1, 0.3], "k": [1, 2], "runs": 4, "seed": 3, "timings": true}"#).unwrap();
    let out = tmp.path().join("merged");
    let o = run(&["evaluate", "--config", cfg.to_str().unwrap(), "--runs", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let resolved: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("config.json")).unwrap()).unwrap();
    assert_eq!(resolved["runs"], 2);
    assert_eq!(resolved["seed"], 3);
    assert_eq!(resolved["c"], serde_json::json!([0.1, 0.3]));
    assert_eq!(resolved["timings"], true);
    let csv = fs::read_to_string(out.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 2 * 2 * 2);
    assert!(csv.lines().skip(1).all(|l| !l.ends_with(',')), "timings fill runtime_s");

    // the written config reproduces the run
    let again = tmp.path().join("again");
    let o = run(&["evaluate", "--config", out.join("config.json").to_str().unwrap(), "--out", again.to_str().unwrap()]);
    assert!(o.status.success());
    let strip = |p: &Path| {
        fs::read_to_string(p).unwrap().lines().map(|l| l.rsplit_once(',').unwrap().0.to_owned()).collect::<Vec<_>>()
    };
    assert_eq!(strip(&out.join("results.csv")), strip(&again.join("results.csv")));

    fs::write(&cfg, r#"{"cc": 1}"#).unwrap();
    assert_eq!(run(&["evaluate", "--config", cfg.to_str().unwrap()]).status.code(), Some(2));
    fs::write(&cfg, "not json").unwrap();
    assert_eq!(run(&["evaluate", "--config", cfg.to_str().unwrap()]).status.code(), Some(1));
}

#[test]
fn default_output_directory_is_timestamped() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run_in(tmp.path(), &["simulate"]);
    assert!(o.status.success());
    let runs: Vec<_> = fs::read_dir(tmp.path().join("ggn-runs")).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(runs.len(), 1);
    let name = runs[0].to_string_lossy().into_owned();
    assert!(name.strip_prefix("simulate-").is_some_and(|t| t.parse::<u64>().is_ok()), "{name}");
    assert!(tmp.path().join("ggn-runs").join(&name).join("partition.csv").exists());
}

#[test]
fn pipeline_steps_chain_through_files() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |s: &str| tmp.path().join(s).to_str().unwrap().to_owned();
    assert!(run(&["simulate", "--out", &p("sim")]).status.success());
    let part = fs::read_to_string(p("sim/partition.csv")).unwrap();
    assert!(part.starts_with("node,team\n"));
    assert_eq!(part.lines().count(), 35);

    assert!(run(&["ggn", "--partition", &p("sim/partition.csv"), "--out", &p("ggn")]).status.success());
    let ggn = fs::read_to_string(p("ggn/ggn.txt")).unwrap();
    assert!(ggn.lines().any(|l| l.starts_with("23 ") && l.contains(" -0.8")));

    let o = run(&["infer", "--ggn", &p("ggn/ggn.txt"), "--k", "2", "--out", &p("inf")]);
    assert!(o.status.success());
    let pred = fs::read_to_string(p("inf/predictions.csv")).unwrap();
    assert!(pred.starts_with("u,v,predicted_sign,strength\n"));
    assert!(pred.lines().any(|l| l.starts_with("23,25,-1,")));

    // the same run without intermediate files gives the same predictions
    let o = run(&["infer", "--k", "2", "--out", &p("inf2")]);
    assert!(o.status.success());
    assert_eq!(pred, fs::read_to_string(p("inf2/predictions.csv")).unwrap());
}

#[test]
fn game_ggns_from_the_command_line() {
    let tmp = tempfile::tempdir().unwrap();
    let p = |s: &str| tmp.path().join(s).to_str().unwrap().to_owned();
    assert!(run(&["ggn", "--dataset", "pd", "--outcome", "Q,S", "--out", &p("pd")]).status.success());
    assert_eq!(fs::read_to_string(p("pd/ggn.txt")).unwrap(), "# directed GGN: 2 nodes, 2 edges\np1 p2 4\np2 p1 0\n");

    fs::write(p("trace.json"), r#"[{"time": 1, "player": 0, "strategy": 1}, {"time": 2, "player": 1, "strategy": 1}]"#).unwrap();
    let o = run(&["ggn", "--dataset", "pd", "--outcome", "Q,Q", "--trace", &p("trace.json"), "--out", &p("dyn")]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // (Q,Q) -> (S,Q): p2 drops from -1 to -5; (S,Q) -> (S,S): p1 goes from 0 to -4
    assert_eq!(fs::read_to_string(p("dyn/ggn.txt")).unwrap(), "# directed GGN: 2 nodes, 2 edges\np1 p2 -4 1\np2 p1 -4 2\n");

    assert_eq!(run(&["ggn", "--dataset", "pd", "--out", &p("x")]).status.code(), Some(1));
}

#[test]
fn stats_prints_a_table_row() {
    let text = stdout(&run(&["stats", "--dataset", "karate-planted", "--name", "Karate"]));
    assert!(text.contains("Karate & 34 & 78 & 73 & 5"), "{text}");
    let sampled = stdout(&run(&["stats", "--dataset", "karate", "--sample-nodes", "10"]));
    assert!(sampled.lines().nth(1).unwrap().starts_with("karate@top-degree-10 & 10 & "));
}

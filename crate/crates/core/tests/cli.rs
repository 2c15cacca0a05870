use std::path::Path;
use std::process::{Command, Output};

fn rmab(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rmab"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const CIRCULANT_FOUR: &str = r#"{
    "instance": {"generator": "circulant", "n_arms": 5, "budget": 1},
    "policies": ["wiql", "opt", "greedy", "random"],
    "T": 10000,
    "trials": 30,
    "base_seed": 0
}"#;

fn csv_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().to_string_lossy().into_owned())
        .collect();
    names.sort();
    names
}

#[test]
fn run_writes_two_csvs_per_policy_and_a_manifest() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("circ.json"), CIRCULANT_FOUR).unwrap();
    let out = rmab(&["run", "--config", "circ.json", "--out", "a"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let files = csv_files(&dir.path().join("a"));
    let mut expected: Vec<String> = ["greedy", "opt", "random", "wiql"]
        .iter()
        .flat_map(|p| [format!("circulant_{p}_agg.csv"), format!("circulant_{p}_raw.csv")])
        .collect();
    expected.push("manifest.json".into());
    expected.sort();
    assert_eq!(files, expected);

    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("a/manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["version"], env!("CARGO_PKG_VERSION"));
    let seeds: Vec<u64> = serde_json::from_value(manifest["runs"][0]["seeds"].clone()).unwrap();
    assert_eq!(seeds, (0..30).collect::<Vec<_>>());
    assert_eq!(manifest["config"]["horizon"], 10000);

    // identical config, single worker: raw CSVs must match byte for byte
    let again = Command::new(env!("CARGO_BIN_EXE_rmab"))
        .args(["run", "--config", "circ.json", "--out", "b"])
        .env("RMAB_THREADS", "1")
        .current_dir(dir.path())
        .output()
        .unwrap();
    assert!(again.status.success(), "{}", stderr(&again));
    for p in ["greedy", "opt", "random", "wiql"] {
        for kind in ["raw", "agg"] {
            let name = format!("circulant_{p}_{kind}.csv");
            let a = std::fs::read(dir.path().join("a").join(&name)).unwrap();
            let b = std::fs::read(dir.path().join("b").join(&name)).unwrap();
            assert!(a == b, "{name} differs between runs");
        }
    }

    // compare ranks OPT above Random
    let cmp = rmab(
        &["compare", "a/circulant_random_agg.csv", "a/circulant_opt_agg.csv"],
        dir.path(),
    );
    assert!(cmp.status.success(), "{}", stderr(&cmp));
    let text = stdout(&cmp);
    let opt_line = text.lines().position(|l| l.contains(" opt ")).unwrap();
    let random_line = text.lines().position(|l| l.contains(" random ")).unwrap();
    assert!(opt_line < random_line, "{text}");
}

#[test]
fn raw_csv_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&["run", "--generator", "circulant", "--T", "3", "--trials", "2", "--seed", "5", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let raw = std::fs::read_to_string(dir.path().join("o/circulant_wiql_raw.csv")).unwrap();
    let lines: Vec<&str> = raw.lines().collect();
    assert_eq!(lines[0], "instance,policy,trial,t,total_reward");
    assert_eq!(lines.len(), 1 + 2 * 3);
    assert!(lines[1].starts_with("circulant,wiql,0,1,"));
    assert!(lines[6].starts_with("circulant,wiql,1,3,"));
    let agg = std::fs::read_to_string(dir.path().join("o/circulant_wiql_agg.csv")).unwrap();
    assert_eq!(agg.lines().next().unwrap(), "instance,policy,t,mean,stderr,moving_avg");
    assert_eq!(agg.lines().count(), 4);
}

#[test]
fn index_on_circulant() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&["index", "--generator", "circulant", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("circulant_index.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("arm,state,lambda_star"));
    let expect = [-0.5, 0.5, 1.0, -1.0];
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        let state: usize = f[1].parse().unwrap();
        let lambda: f64 = f[2].parse().unwrap();
        assert!((lambda - expect[state]).abs() <= 0.05, "{line}");
    }
    assert_eq!(stdout(&out), text);
}

#[test]
fn index_on_action_symmetric_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&["index", "--generator", "action_symmetric", "--out", "."], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    for line in stdout(&out).lines().skip(1) {
        let lambda: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!(lambda.abs() <= 1e-4, "{line}");
    }
}

#[test]
fn non_indexable_preset_fails_and_names_the_state() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&["index", "--generator", "non_indexable", "--out", "."], dir.path());
    assert!(!out.status.success());
    let msg = stderr(&out);
    assert!(msg.contains("non-indexable at state 0"), "{msg}");
}

#[test]
fn identical_series_compare_equal_and_empty_window_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmab(&["run", "--generator", "circulant", "--T", "50", "--trials", "3", "--out", "x"], dir.path());
    assert!(out.status.success());
    let out = rmab(&["run", "--generator", "circulant", "--T", "50", "--trials", "3", "--out", "y"], dir.path());
    assert!(out.status.success());
    let cmp = rmab(&["compare", "x/circulant_wiql_agg.csv", "y/circulant_wiql_agg.csv"], dir.path());
    let text = stdout(&cmp);
    let means: Vec<&str> = text.lines().skip(1).map(|l| l.split_whitespace().nth(2).unwrap()).collect();
    assert_eq!(means.len(), 2);
    assert_eq!(means[0], means[1]);

    for window in ["0", "0.01", "1.5"] {
        let bad = rmab(&["compare", "x/circulant_wiql_agg.csv", "--window", window], dir.path());
        assert!(!bad.status.success(), "window {window}");
        assert!(stderr(&bad).contains("window"), "{}", stderr(&bad));
    }
}

#[test]
fn configuration_errors_exit_nonzero() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        r#"{"instance": {"generator": "circulant"}, "policies": ["ucb"]}"#,
        r#"{"instance": {"generator": "nope"}}"#,
        r#"{"instance": {"generator": "circulant"}, "T": 0}"#,
        r#"{"instance": {"generator": "circulant", "n_arms": 2, "budget": 3}}"#,
        r#"{"instance": {"generator": "file", "path": "missing.json"}}"#,
    ];
    for (k, text) in cases.iter().enumerate() {
        let name = format!("bad{k}.json");
        std::fs::write(dir.path().join(&name), text).unwrap();
        let out = rmab(&["run", "--config", &name, "--out", "o"], dir.path());
        assert!(!out.status.success(), "case {k} should fail");
        assert!(stderr(&out).starts_with("error:"), "{}", stderr(&out));
    }
    let out = rmab(&["run", "--generator", "circulant", "--trials", "0"], dir.path());
    assert!(!out.status.success());
    let out = rmab(&["run", "--generator", "circulant", "--budget", "9"], dir.path());
    assert!(!out.status.success());
}

#[test]
fn instance_file_config_resolves_relative_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("cfg");
    std::fs::create_dir(&sub).unwrap();
    rmab::instances::save(&rmab::instances::circulant(3, 1, 2), sub.join("inst.json")).unwrap();
    std::fs::write(
        sub.join("run.json"),
        r#"{"name": "mine", "instance": {"generator": "file", "path": "inst.json"}, "policies": ["random"], "T": 10, "trials": 2}"#,
    )
    .unwrap();
    let out = rmab(&["run", "--config", "cfg/run.json", "--out", "o"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(dir.path().join("o/mine_random_raw.csv").exists());
}

#[test]
fn list_instances_names_every_generator() {
    let out = rmab(&["list-instances"], Path::new("."));
    assert!(out.status.success());
    let text = stdout(&out);
    for (name, _) in rmab::experiment::GENERATORS {
        assert!(text.lines().any(|l| l.starts_with(name)), "{name}");
    }
}

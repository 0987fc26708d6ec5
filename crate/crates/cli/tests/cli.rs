use std::path::Path;
use std::process::{Command, Output};

fn unitgp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_unitgp")).args(args).env_clear().output().expect("binary runs")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn invalid_mode_names_the_flag() {
    let o = unitgp(&["run", "--benchmark", "hubble", "--mode", "sideways"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("--mode"), "{}", stderr(&o));
}

#[test]
fn bad_noise_level_is_rejected() {
    let o = unitgp(&["run", "--benchmark", "rydberg", "--mode", "culling", "--noise", "0.05"]);
    assert!(!o.status.success());
    assert!(stderr(&o).contains("noise"), "{}", stderr(&o));
}

#[test]
fn benchmark_run_writes_reports() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = unitgp(&[
        "run", "--benchmark", "hubble", "--mode", "culling", "--seeds", "2", "--budget", "10g", "--pop", "60",
        "--deterministic", "--out-dir", out,
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for f in ["run_1.jsonl", "run_2.jsonl", "run_1_generations.jsonl", "aggregate.json", "summary.txt"] {
        assert!(dir.path().join(f).exists(), "{f}");
    }
    let summary = std::fs::read_to_string(dir.path().join("summary.txt")).unwrap();
    assert!(summary.contains("hubble\tculling\t0%"), "{summary}");
    let aggregate: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("aggregate.json")).unwrap()).unwrap();
    assert_eq!(aggregate["runs"].as_array().unwrap().len(), 2);
    assert!(aggregate["tally"].is_object());

    let c = unitgp(&["classify", "--benchmark", "hubble", "--front", dir.path().join("run_1.jsonl").to_str().unwrap()]);
    assert!(c.status.success(), "{}", stderr(&c));
    assert!(stdout(&c).contains("front verdict:"));

    let s = unitgp(&["stats", out]);
    assert!(s.status.success(), "{}", stderr(&s));
    assert!(stdout(&s).contains("normalized_generations"));
}

#[test]
fn csv_dataset_run_has_no_verdict() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("kepler.csv");
    let g = unitgp(&["generate-data", "--benchmark", "kepler", "--noise", "0.05", "--n-samples", "40", "-o", csv.to_str().unwrap()]);
    assert!(g.status.success(), "{}", stderr(&g));
    let out = dir.path().join("out");
    let o = unitgp(&[
        "run", "--dataset", csv.to_str().unwrap(), "--mode", "multiobjective", "--seeds", "1", "--budget", "5g",
        "--pop", "40", "--out-dir", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let aggregate = std::fs::read_to_string(out.join("aggregate.json")).unwrap();
    let v: serde_json::Value = serde_json::from_str(&aggregate).unwrap();
    assert!(v["tally"].is_null());
    assert!(v["runs"][0]["verdict"].is_null());
    assert!(Path::new(&out.join("run_1.jsonl")).exists());
}

#[test]
fn config_file_and_env_layers() {
    let dir = tempfile::tempdir().unwrap();
    let conf = dir.path().join("exp.conf");
    let out = dir.path().join("out");
    std::fs::write(
        &conf,
        format!("benchmark = kepler\nmode = repair\nseeds = 1\nbudget = 3g\npopulation_size = 30\nout_dir = {}\n", out.display()),
    )
    .unwrap();
    // the environment overrides the file, the flag overrides the environment
    let o = Command::new(env!("CARGO_BIN_EXE_unitgp"))
        .args(["run", "--config", conf.to_str().unwrap(), "--mode", "culling"])
        .env_clear()
        .env("UNITGP_MODE", "baseline")
        .env("UNITGP_SEED", "7")
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(out.join("aggregate.json")).unwrap()).unwrap();
    assert_eq!(v["mode"], "culling");
    assert_eq!(v["runs"][0]["seed"], 7);
    assert_eq!(v["population_size"], 30);

    std::fs::write(&conf, "benchmark = kepler\nmode = culling\nbogus = 1\n").unwrap();
    let bad = unitgp(&["run", "--config", conf.to_str().unwrap()]);
    assert!(!bad.status.success());
    assert!(stderr(&bad).contains("bogus"), "{}", stderr(&bad));
}

#[test]
fn classify_equations() {
    let o = unitgp(&["classify", "--benchmark", "hubble", "--equation", "(c0[2] * x0)", "--equation", "pow2(x0)"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!(text.contains("correct\t(c0[2] * x0)"), "{text}");
    assert!(text.contains("wrong\tpow2(x0)"), "{text}");
    assert!(text.contains("front verdict: correct"));
}

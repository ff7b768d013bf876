use std::path::Path;
use std::process::{Command, Output};

use smoothlab::output::results_json;
use smoothlab::{run_experiment, ExperimentConfig, Format, Kind};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_smoothlab"));
    c.env_remove("SMOOTHLAB_CACHE");
    c
}

fn run_in(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).args(["--out", dir.to_str().unwrap()]).output().unwrap()
}

fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn analyze_flux_on_trig2d() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["analyze-flux", "--flux", "trig2d", "--format", "json,csv"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let j = read_json(&dir.path().join("results.json"));
    let a = &j["results"]["report"]["alpha_sup"];
    assert_eq!((a["numer"].as_u64(), a["denom"].as_u64()), (Some(1), Some(2)));
    assert!(dir.path().join("index.csv").exists());
    assert!(!dir.path().join("index.svg").exists());
}

#[test]
fn malformed_flux_exits_with_two_and_the_position() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["analyze-flux", "--flux", "[u^2/2, sin(u]"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("position") && err.contains("flux"), "{err}");
}

#[test]
fn config_file_with_flag_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"kind": "analyze-flux", "flux": "multid-burgers-2", "formats": ["json"]}"#).unwrap();
    let out = run_in(dir.path(), &["analyze-flux", "--config", cfg.to_str().unwrap(), "--flux", "power-chain-3"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let j = read_json(&dir.path().join("results.json"));
    assert_eq!(j["config"]["flux"], "power-chain-3");
    assert_eq!(j["results"]["report"]["d_f"]["finite"], 3);

    let out = run_in(dir.path(), &["profile", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let out = run_in(dir.path(), &["analyze-flux", "--param", "m=-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`m`"));
}

#[test]
fn verdict_failure_exits_with_one() {
    // s = 1/4 sits outside the 5% slope band at these ε (see the acceptance notes)
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), &["sobolev-scaling", "--param", "s=[0.25]", "--format", "csv,svg"]);
    assert_eq!(out.status.code(), Some(1), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(dir.path().join("sobolev-s0.25.svg").exists());
    assert!(dir.path().join("sobolev-s0.25.csv").exists());
}

#[test]
fn smoothing_bound_on_power_chain() {
    let config = ExperimentConfig::defaults(Kind::SmoothingBound);
    let rec = run_experiment(&config).unwrap();
    let v: Vec<(&str, bool)> = rec.run.verdicts.iter().map(|v| (v.name.as_str(), v.pass)).collect();
    assert_eq!(v.len(), 3);
    assert!(rec.run.all_pass(), "{v:?}");
    assert!(v[1].0.contains("0.5000: bounded") && v[2].0.contains("0.7500: unbounded"), "{v:?}");
    assert_eq!(rec.run.results["v"], serde_json::json!([0.0, 1.0]));
}

#[test]
fn identical_configs_give_identical_bytes() {
    let mut config = ExperimentConfig::defaults(Kind::FitAlpha);
    config.flux = "trig2d".into();
    let a = run_experiment(&config).unwrap();
    config.threads = Some(1);
    let b = run_experiment(&config).unwrap();
    config.threads = None;
    let c = run_experiment(&config).unwrap();
    assert_eq!(results_json(&a.run), results_json(&c.run));
    assert_eq!(a.run.tables, b.run.tables);
    assert_eq!(a.run.results, b.run.results);
    assert_eq!(a.run.config_hash, b.run.config_hash);
}

#[test]
fn verdicts_are_recomputed_from_tables() {
    let rec = run_experiment(&ExperimentConfig::defaults(Kind::Cancellation)).unwrap();
    assert!(rec.run.all_pass() && rec.run.recheck());
    let mut tampered = rec.run.clone();
    let rows = &mut tampered.tables[0].rows;
    let last = rows.len() - 1;
    rows[last][1] = rows[0][1];
    assert!(!tampered.recheck());
}

#[test]
fn cache_and_run_log() {
    let dir = tempfile::tempdir().unwrap();
    let cache = dir.path().join("cache");
    let out = dir.path().join("out");
    for expect_cached in [false, true] {
        let o = bin()
            .env("SMOOTHLAB_CACHE", &cache)
            .args(["profile", "--format", "json", "--out", out.to_str().unwrap()])
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        assert_eq!(String::from_utf8_lossy(&o.stdout).contains("cached"), expect_cached);
    }
    assert_eq!(std::fs::read_dir(&cache).unwrap().count(), 1);
    let log = std::fs::read_to_string(out.join("runs.jsonl")).unwrap();
    let lines: Vec<serde_json::Value> = log.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(lines.len(), 2);
    assert_eq!(lines[0]["config_hash"], lines[1]["config_hash"]);
    assert_eq!(lines[0]["tables"], lines[1]["tables"]);
}

#[test]
fn catalog_annotations() {
    let out = bin().arg("catalog").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout);
    let row = |key: &str| text.lines().find(|l| l.starts_with(key)).unwrap().split_whitespace().collect::<Vec<_>>();
    assert_eq!(row("multid-burgers-2")[3], "0");
    assert_eq!(row("power-chain-3")[3], "1/3");
    assert_eq!(row("trig2d")[3], "1/2");
    let json = bin().args(["catalog", "--format", "json"]).output().unwrap();
    let v: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(v.as_array().unwrap().len(), 8);
}

#[test]
fn spacetime_box_respects_the_negative_time_extension() {
    let mut config = ExperimentConfig::defaults(Kind::SobolevScaling);
    config.spacetime = true;
    assert!(run_experiment(&config).is_err());
    config.half_width = 0.05;
    config.negative_time = Some(0.12);
    config.eps = vec![0.125, 0.0625];
    config.formats = vec![Format::Json];
    let rec = run_experiment(&config).unwrap();
    let t = &rec.run.tables[0];
    assert_eq!(t.name, "spacetime-s0.5");
    let v = t.column("seminorm").unwrap();
    assert!(v[1] > v[0] && v[0] > 0.0, "{v:?}");
}

#[test]
fn wkb_and_profile_defaults_pass() {
    for kind in [Kind::WkbSweep, Kind::Profile, Kind::AnalyzeFlux] {
        let rec = run_experiment(&ExperimentConfig::defaults(kind)).unwrap();
        assert!(rec.run.all_pass() && !rec.run.verdicts.is_empty(), "{kind}: {:?}", rec.run.verdicts);
    }
}

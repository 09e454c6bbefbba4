use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_wavepart"));
    c.env_remove(wavepart_cli::OUT_DIR_ENV);
    c
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn run(cmd: &mut Command) -> Output {
    let out = cmd.output().expect("binary runs");
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json output")
}

#[test]
fn theory_examples() {
    let v =
        json(&run(bin().args([
            "theory", "--state", "tmsv", "--q", "0.5", "--eta", "1",
        ])));
    assert_eq!(v["format"], "wpd-theory-v1");
    assert_eq!(v["e_wave"].as_f64(), Some(-1.0));
    assert_eq!(v["e_part"].as_f64(), Some(-1.0));

    let v = json(&run(bin().args([
        "theory", "--state", "fock", "--m", "1", "--n", "1", "--eta", "1",
    ])));
    assert_eq!(v["e_wave"].as_f64(), Some(-1.0));

    for via in ["analytic", "pipeline"] {
        let v = json(&run(bin().args([
            "theory", "--state", "coherent", "--alpha", "0", "--beta", "0", "--via", via,
        ])));
        assert_eq!(v["e_wave"].as_f64(), Some(0.0), "{via}");
        assert_eq!(v["e_part"].as_f64(), Some(0.0), "{via}");
    }

    let v = json(&run(bin().args([
        "theory",
        "--state",
        "tmsv",
        "--mean-total",
        "0.05",
        "--eta",
        "0.024",
        "--via",
        "pipeline",
    ])));
    assert!((v["e_wave"].as_f64().unwrap() + 0.0006).abs() < 1e-12);
}

#[test]
fn exit_codes() {
    let out = bin().args(["theory", "--state", "tmsv"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["theory", "--state", "tmsv", "--q", "1.5"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin().args(["theory", "--bogus"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = bin()
        .args(["analyze", "--hist", "/nonexistent/h.csv"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(
        &bad,
        "[input]\nkind = \"tmsv\"\nq = 0.5\nextra = 1\n[run]\nshots = 5\nseed = 1\n",
    )
    .unwrap();
    let out = bin()
        .args(["simulate", "--config"])
        .arg(&bad)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let hist = dir.path().join("h.csv");
    std::fs::write(&hist, "# format=wpd-hist-v1\n# detector=clicks\n").unwrap();
    let out = bin()
        .args(["analyze", "--hist"])
        .arg(&hist)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    let out = bin()
        .args(["sweep", "--family", "coherent", "--from", "2", "--to", "0"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn vacuum_gives_single_cell() {
    let out = run(bin()
        .args(["simulate", "--config"])
        .arg(fixture("vacuum.toml")));
    let text = String::from_utf8(out.stdout).unwrap();
    let body: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
    assert_eq!(body, ["k_a,k_b,count", "0,0,1000"]);
}

#[test]
fn golden_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("tmsv.csv");
    let report = dir.path().join("tmsv.json");
    run(bin()
        .args(["simulate", "--config"])
        .arg(fixture("tmsv_small.toml"))
        .arg("--out")
        .arg(&hist));
    run(bin()
        .args(["analyze", "--hist"])
        .arg(&hist)
        .arg("--out")
        .arg(&report));
    let hist_text = std::fs::read_to_string(&hist).unwrap();
    let report_text = std::fs::read_to_string(&report).unwrap();
    assert_eq!(
        hist_text,
        std::fs::read_to_string(fixture("tmsv_small.hist.csv")).unwrap()
    );
    assert_eq!(
        report_text,
        std::fs::read_to_string(fixture("tmsv_small.report.json")).unwrap()
    );

    let v: Value = serde_json::from_str(&report_text).unwrap();
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(
        keys,
        [
            "format",
            "mean_total",
            "witness",
            "d_bins",
            "shots",
            "seed",
            "input",
            "warnings",
            "table"
        ]
    );
    assert_eq!(v["format"], "wpd-report-v1");
}

#[test]
fn thread_count_does_not_change_output() {
    let a = run(bin()
        .args(["simulate", "--threads", "1", "--config"])
        .arg(fixture("thermal_wave.toml")));
    let b = run(bin()
        .args(["simulate", "--threads", "6", "--config"])
        .arg(fixture("thermal_wave.toml")));
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn classical_runs_respect_their_bounds() {
    let dir = tempfile::tempdir().unwrap();
    for (cfg, key) in [
        ("thermal_wave.toml", "e_wave"),
        ("particles.toml", "e_part"),
    ] {
        let hist = dir.path().join(format!("{cfg}.csv"));
        run(bin()
            .args(["simulate", "--config"])
            .arg(fixture(cfg))
            .arg("--out")
            .arg(&hist));
        assert!(std::fs::read_to_string(&hist)
            .unwrap()
            .contains("# detector=ideal\n"));
        let v = json(&run(bin().args(["analyze", "--hist"]).arg(&hist)));
        let e = v["witness"][key].as_f64().unwrap();
        let sigma = v["witness"][format!("err_{}_random", &key[2..])]
            .as_f64()
            .unwrap();
        assert!(e >= -3.0 * sigma, "{cfg}: {key} = {e}, sigma = {sigma}");
    }
}

#[test]
fn out_dir_env_resolves_relative_paths() {
    let dir = tempfile::tempdir().unwrap();
    run(bin().env(wavepart_cli::OUT_DIR_ENV, dir.path()).args([
        "sweep", "--family", "fock", "--from", "0", "--to", "3", "--out", "fock.csv",
    ]));
    let text = std::fs::read_to_string(dir.path().join("fock.csv")).unwrap();
    assert!(text.starts_with("# format=wpd-sweep-v1\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 5);
}

#[test]
fn analyze_refuses_truncated_histograms() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("h.csv");
    std::fs::write(
        &hist,
        "# format=wpd-hist-v1\n# detector=clicks\n# d_bins=8\n# shots=4\n# seed=1\n# tail_mass=1e-3\nk_a,k_b,count\n0,0,3\n1,1,1\n",
    )
    .unwrap();
    let out = bin()
        .args(["analyze", "--hist"])
        .arg(&hist)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    run(bin()
        .args(["analyze", "--tau", "1e-2", "--hist"])
        .arg(&hist));
}

use std::process::Command;

fn rmt() -> Command {
    Command::new(env!("CARGO_BIN_EXE_rmt"))
}

#[test]
fn law_subcommand_writes_grid() {
    let dir = tempfile::tempdir().unwrap();
    let status = rmt()
        .args(["law", "--type", "mp", "--c", "0.4", "--points", "200", "--out"])
        .arg(dir.path().join("mp.csv"))
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(dir.path().join("mp.csv")).unwrap();
    assert!(text.starts_with("x,density,cdf\n"));
    assert_eq!(text.lines().count(), 201);
}

#[test]
fn simulate_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "p = 40\nn = 100\ntrials = 2\n\n[kernel]\nvariant = \"constant\"\n").unwrap();
    let out = dir.path().join("out");
    let status = rmt().args(["--threads", "1", "simulate", "--config"]).arg(&cfg).arg("--out").arg(&out).status().unwrap();
    assert!(status.success());
    for f in ["histogram.csv", "law.csv", "report.json", "timing.json"] {
        assert!(out.join(f).exists(), "{f}");
    }
}

#[test]
fn bad_config_exits_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "p = 40\nn = 100\n\n[kernel]\nvariant = \"indicator\"\n").unwrap();
    let status = rmt().args(["simulate", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));
    let status = rmt().args(["simulate", "--config"]).arg(dir.path().join("none.toml")).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn semicircle_regime_violation_exits_with_two() {
    let status = rmt().args(["semicircle", "--p", "10", "--n", "200"]).status().unwrap();
    assert_eq!(status.code(), Some(2));
}

#[test]
fn check_breach_exits_with_four() {
    // An MP(c, α²) comparison at τ = 1.3 misses the KS threshold.
    let dir = tempfile::tempdir().unwrap();
    let out = rmt()
        .args(["--check", "figure2", "--trials", "1", "--taus", "1.3", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[FAIL]"));
}

#[test]
fn check_pass_exits_with_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = rmt()
        .args(["--check", "figure1", "--trials", "2", "--betas", "inf", "--out"])
        .arg(dir.path())
        .output()
        .unwrap();
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PASS]"));
}

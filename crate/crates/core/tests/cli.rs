use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_qd-transport"))
}

fn run(args: &[&str], out: &Path) -> Output {
    let o = bin().arg("run").args(args).arg("--out").arg(out).output().unwrap();
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    o
}

fn files(dir: &Path) -> BTreeSet<String> {
    fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect()
}

fn csvs_equal(a: &Path, b: &Path) {
    for f in files(a).iter().filter(|f| f.ends_with(".csv")) {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
}

#[test]
fn fig2_writes_the_documented_file_set() {
    let dir = tempfile::tempdir().unwrap();
    run(&["fig2", "--points", "11", "--n-max", "6"], dir.path());
    let expected: BTreeSet<String> = ["fig2_full.csv", "fig2_wea3.csv", "fig2_analytic.csv", "fig2_manifest.json"]
        .into_iter()
        .map(String::from)
        .collect();
    assert_eq!(files(dir.path()), expected);

    let csv = fs::read_to_string(dir.path().join("fig2_full.csv")).unwrap();
    let mut lines = csv.lines();
    let header: Vec<_> = lines.next().unwrap().split(',').collect();
    assert_eq!(header[0], "omega_L_minus_omega_c_ueV");
    assert!(header.contains(&"moment_m5") && header.contains(&"mean_B"));
    let rows: Vec<_> = lines.collect();
    assert_eq!(rows.len(), 11);
    assert!(rows.iter().all(|r| r.split(',').count() == header.len()));

    // Three-state model has no two-photon states.
    let wea3 = fs::read_to_string(dir.path().join("fig2_wea3.csv")).unwrap();
    let m2 = header.iter().position(|c| *c == "moment_m2").unwrap();
    assert!(wea3.lines().skip(1).all(|r| r.split(',').nth(m2) == Some("NaN")));

    let manifest: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.path().join("fig2_manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["scenario"]["system"]["g_ueV"], 20.0);
    assert_eq!(manifest["scenario"]["sweep"]["points"], 11);
    assert_eq!(manifest["phonon"]["mean_B"], 1.0);
    let runs = manifest["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 3);
    assert_eq!(runs[0]["file"], "fig2_full.csv");
    assert_eq!(runs[0]["n_max_max"], 6);
}

#[test]
fn output_is_independent_of_thread_count() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let c = tempfile::tempdir().unwrap();
    let args = ["--preset", "fig6d", "--points", "13", "--variants", "full,no_dot_reference"];
    run(&[&args[..], &["--threads", "1"]].concat(), a.path());
    run(&[&args[..], &["--threads", "3"]].concat(), b.path());
    run(&[&args[..], &["--threads", "3"]].concat(), c.path());
    assert!(files(a.path()).contains("fig6d_conditional_phase.csv"));
    assert!(files(a.path()).contains("fig6d_nodot_full.csv"));
    csvs_equal(a.path(), b.path());
    csvs_equal(b.path(), c.path());

    let cp = fs::read_to_string(a.path().join("fig6d_conditional_phase.csv")).unwrap();
    assert_eq!(cp.lines().next().unwrap(), "omega_L_minus_omega_c_ueV,phi_t_c_rad,phi_r_c_rad");
    assert_eq!(cp.lines().count(), 14);
}

#[test]
fn shown_preset_runs_as_config() {
    let dir = tempfile::tempdir().unwrap();
    let shown = bin().args(["show", "fig4"]).output().unwrap();
    assert!(shown.status.success());
    let text = String::from_utf8(shown.stdout).unwrap();
    let cfg = dir.path().join("fig4.toml");
    fs::write(&cfg, text.replace("points = 201", "points = 9")).unwrap();

    let from_config = dir.path().join("a");
    let from_preset = dir.path().join("b");
    run(&["--config", cfg.to_str().unwrap(), "--n-max", "5"], &from_config);
    run(&["fig4", "--points", "9", "--n-max", "5"], &from_preset);
    csvs_equal(&from_config, &from_preset);
}

#[test]
fn bad_config_reports_line() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "name = \"bad\"\n[system]\ng_ueV = 20.0\nkappa_c_ueV = fifty\n").unwrap();
    let o = bin()
        .args(["run", "--config", cfg.to_str().unwrap(), "--out"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml") && err.contains("line 4"), "{err}");
    assert!(!dir.path().join("out").exists());
}

#[test]
fn rejects_unknown_preset_and_variant() {
    let o = bin().args(["run", "fig9"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown preset"));

    let o = bin().args(["run", "fig2", "--variants", "full,exact"]).output().unwrap();
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("exact"));
}

#[test]
fn lists_presets() {
    let o = bin().arg("presets").output().unwrap();
    let text = String::from_utf8(o.stdout).unwrap();
    for p in ["fig2", "fig5", "fig6d", "fig6_polaron"] {
        assert!(text.lines().any(|l| l == p), "{p}");
    }
}

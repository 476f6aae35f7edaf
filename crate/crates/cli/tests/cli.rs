//! End-to-end checks of the binary: artifact shapes, exit codes, and
//! byte-level reproducibility.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_hyperring"))
}

fn tmp_dir(tag: &str) -> PathBuf {
    let dir = Path::new(env!("CARGO_TARGET_TMPDIR")).join(tag);
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn defaults_prints_parseable_toml() {
    let out = bin().arg("defaults").output().unwrap();
    assert!(out.status.success());
    let text = stdout_of(&out);
    let parsed: toml::Value = toml::from_str(&text).unwrap();
    let ring1 = &parsed["ring"]["1"];
    assert_eq!(ring1["nonlinear_param"].as_float().unwrap(), 1.48);
    assert_eq!(parsed["grid"]["n_points"].as_integer().unwrap(), 513);
    assert!(text.contains("theta3"));
}

#[test]
fn defaults_roundtrips_through_config_flag() {
    let dir = tmp_dir("roundtrip");
    let cfg = dir.join("config.toml");
    let out = bin().arg("defaults").output().unwrap();
    fs::write(&cfg, stdout_of(&out)).unwrap();
    let out2 = bin()
        .args(["state", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out2.status.success(),
        "{}",
        String::from_utf8_lossy(&out2.stderr)
    );
    let density: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("density.json")).unwrap()).unwrap();
    assert_eq!(density["basis"][0], "HH.SaIa");
    let gp = density["purity_pol"].as_f64().unwrap();
    assert!((0.9990..=0.9999).contains(&gp), "gamma_pol = {gp}");
    assert!(density["config_hash"].as_str().unwrap().len() == 16);
}

#[test]
fn purity_sweep_t_row_count_and_determinism() {
    let dir = tmp_dir("sweep-t");
    let run = |d: &Path| {
        let out = bin()
            .args([
                "purity-sweep-t",
                "--tmin",
                "1e-9",
                "--tmax",
                "2e-9",
                "--points",
                "3",
                "--out",
            ])
            .arg(d)
            .output()
            .unwrap();
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        fs::read(d.join("purity_vs_duration.csv")).unwrap()
    };
    let first = run(&dir);
    let text = String::from_utf8(first.clone()).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "x,gamma_pol,gamma_bin,hyper_fidelity"
    );
    assert_eq!(lines.count(), 3, "three data rows requested");
    // byte-identical on a second run
    let dir2 = tmp_dir("sweep-t-2");
    let second = run(&dir2);
    assert_eq!(first, second);
    // sidecar embeds the config hash and version
    let meta: serde_json::Value = serde_json::from_str(
        &fs::read_to_string(dir.join("purity_vs_duration.meta.json")).unwrap(),
    )
    .unwrap();
    assert_eq!(meta["config_hash"].as_str().unwrap().len(), 16);
    assert!(meta["config"]["ring"]["1"]["radius"].as_f64().unwrap() > 0.0);
}

#[test]
fn verify_reports_tight_oracle_agreement() {
    let out = bin()
        .args(["verify", "--coarse-n", "13", "--random-configs", "1"])
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    assert!(report["passed"].as_bool().unwrap());
    assert!(report["oracle_max_abs_diff"].as_f64().unwrap() < 1e-8);
    assert!(report["support_leak"].as_f64().unwrap() < 1e-12);
    assert_eq!(
        report["commutator_norms"]["pol_detuning"].as_f64().unwrap(),
        0.0
    );
}

#[test]
fn jsa_export_writes_csv_and_sidecar() {
    let dir = tmp_dir("jsa");
    let out = bin()
        .args([
            "jsa",
            "--ring",
            "1",
            "--mismatch-override-ghz",
            "1.0",
            "--grid-n",
            "65",
        ])
        .arg("--grid-halfwidth-ghz")
        .arg("1.934")
        .arg("--out")
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let csv = fs::read_to_string(dir.join("jsa_ring1.csv")).unwrap();
    assert!(csv.starts_with("omega_rad_s,omega_prime_rad_s,re_phi,im_phi,abs_phi"));
    let meta: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(dir.join("jsa_ring1.meta.json")).unwrap())
            .unwrap();
    assert_eq!(meta["ring_id"].as_u64().unwrap(), 1);
    assert!(meta["beta_squared"].as_f64().unwrap() > 0.0);
}

#[test]
fn bad_config_exits_2() {
    let dir = tmp_dir("bad-config");
    let cfg = dir.join("broken.toml");
    fs::write(&cfg, "definitely not [ valid").unwrap();
    let out = bin()
        .args(["state", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));

    // unknown flag also exits 2 with usage text
    let out = bin().args(["state", "--no-such-flag"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("--help"));
}

#[test]
fn unresolved_grid_exits_3() {
    // 65 points over the default half width cannot resolve the linewidth
    let dir = tmp_dir("coarse");
    let out = bin()
        .args(["state", "--grid-n", "65", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid"));
}

#[test]
fn equalize_reports_near_milliwatt_powers() {
    let dir = tmp_dir("equalize");
    let out = bin()
        .args(["equalize", "--target-total-prob", "1.2e-3", "--out"])
        .arg(&dir)
        .output()
        .unwrap();
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let eq = fs::read_to_string(dir.join("equalized.toml")).unwrap();
    let parsed: toml::Value = toml::from_str(&eq).unwrap();
    for n in 1..=4 {
        let p = parsed["pump"][&n.to_string()]["peak_power"]
            .as_float()
            .unwrap();
        assert!((0.9e-3..1.1e-3).contains(&p), "ring {n}: P = {p}");
    }
}

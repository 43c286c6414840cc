use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_torus-spectral");

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn invoke(kind: &str, config: &Path, out: &Path, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(BIN);
    cmd.args([kind, "--config"]).arg(config).arg("--out").arg(out);
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().unwrap()
}

fn write_config(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn free_diagonal_min(n: i64, beta: f64, rho: f64) -> f64 {
    let mut best = f64::INFINITY;
    for m1 in -n..=n {
        for m2 in -n..=n {
            let w1 = m1 as f64 + beta;
            let re = w1 * w1 + (m2 * m2) as f64 - rho * rho;
            best = best.min(4.0 * PI * PI * re.hypot(2.0 * rho * w1));
        }
    }
    best
}

#[test]
fn free_thomas_csv_matches_diagonal_oracle() {
    let dir = tempfile::tempdir().unwrap();
    let o = invoke("thomas", &configs().join("free_thomas.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let csv = std::fs::read_to_string(dir.path().join("scan.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "rho,sigma_min_H,sigma_min_precond,fitted_C,T_rho_norm");
    let rows: Vec<Vec<String>> = lines.map(|l| l.split(',').map(String::from).collect()).collect();
    assert_eq!(rows.len(), 4);
    for row in rows {
        let rho: f64 = row[0].parse().unwrap();
        let s: f64 = row[1].parse().unwrap();
        let oracle = free_diagonal_min(16, 0.5, rho);
        assert!((s - oracle).abs() <= 1e-9 * oracle, "rho {rho}: {s} vs {oracle}");
        assert!(row[4].is_empty());
    }
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.contains("scan.csv"));
}

#[test]
fn manifest_rerun_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(invoke("bands", &configs().join("mathieu_bands.toml"), &a, &[]).status.success());
    let o = invoke("bands", &a.join("manifest.json"), &b, &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    for file in ["bands.csv", "flat_bands.json"] {
        assert_eq!(std::fs::read(a.join(file)).unwrap(), std::fs::read(b.join(file)).unwrap(), "{file}");
    }
}

#[test]
fn manifest_lists_checksums_of_outputs() {
    use sha2::{Digest, Sha256};
    let dir = tempfile::tempdir().unwrap();
    assert!(invoke("cover", &configs().join("cover.toml"), dir.path(), &[]).status.success());
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    let outputs = manifest["outputs"].as_array().unwrap();
    assert!(!outputs.is_empty());
    for o in outputs {
        let bytes = std::fs::read(dir.path().join(o["file"].as_str().unwrap())).unwrap();
        let digest: String = Sha256::digest(&bytes).iter().map(|b| format!("{b:02x}")).collect();
        assert_eq!(o["sha256"].as_str().unwrap(), digest);
    }
}

#[test]
fn constant_gauge_is_obstructed_with_success() {
    let dir = tempfile::tempdir().unwrap();
    let o = invoke("gauge", &configs().join("constant_gauge.toml"), dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let g: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("gauge.json")).unwrap()).unwrap();
    assert_eq!(g["verdict"], "obstructed");
    assert_eq!(g["obstruction"], serde_json::json!([[0.25, -1.5]]));
}

#[test]
fn seed_override_is_recorded() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(BIN)
        .args(["matrix-gauge", "--config"])
        .arg(configs().join("matrix_gauge.toml"))
        .arg("--out")
        .arg(dir.path())
        .args(["--seed", "4242"])
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let manifest: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["config"]["seed"], 4242);
}

#[test]
fn unknown_key_exits_2_and_names_it() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "kind = \"bands\"\n[lattice]\nd = 1\nn = 4\nrho_lost = 3\n");
    let o = invoke("bands", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("rho_lost"), "{}", stderr(&o));
}

#[test]
fn type_mismatch_exits_2_with_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.toml", "kind = \"bands\"\n[lattice]\nd = 1\nn = 4\n[bands]\ngrid = \"many\"\ncount = 2\n");
    let o = invoke("bands", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("bands.grid"), "{}", stderr(&o));
}

#[test]
fn kind_mismatch_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let o = invoke("thomas", &configs().join("mathieu_bands.toml"), dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("config:"), "config echo missing: {}", stderr(&o));
}

#[test]
fn bad_literal_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "kind = \"bands\"\n[lattice]\nd = 1\nn = 4\n[potentials.v]\npreset = \"literal\"\ntext = \"not a field\"\n[bands]\ngrid = 3\ncount = 2\n",
    );
    let o = invoke("bands", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
}

#[test]
fn unresolved_gauge_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(
        dir.path(),
        "c.toml",
        "kind = \"gauge\"\n[lattice]\nd = 2\nn = 3\n[potentials.g]\npreset = \"gauss-decay\"\namp = 20.0\nw = 100.0\n[gauge]\ntol = 1e-10\n",
    );
    let o = invoke("gauge", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
}

#[test]
fn memory_budget_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let o = invoke("thomas", &configs().join("free_thomas.toml"), dir.path(), &[("TORUS_SPECTRAL_MEM_MB", "1")]);
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

//! End-to-end exercises of the command-line driver.

use std::path::Path;
use std::process::Command;

fn elastrec() -> Command {
    Command::new(env!("CARGO_BIN_EXE_elastrec"))
}

fn small_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("config.toml");
    std::fs::write(
        &path,
        r#"
out_dir = "out"

[mesh]
inverse_n = 8
data_n = 16

[operator]
mode = "compact"
bc = "mixed"
c_p = -1e-4
smoothing_s = 2.0
mu_floor = 0.01

[inversion]
method = "tpg"
noise_level = 0.02
seed = 7
tau = 1.2
max_iters = 300
initial_guess = [2.0, 0.3]

[phantom]
preset = "smooth"
"#,
    )
    .unwrap();
    path
}

#[test]
fn pipeline_phantom_forward_noise_invert() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("artifacts");

    for cmd in ["phantom", "forward", "noise", "invert"] {
        let status = elastrec()
            .args([cmd, "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .status()
            .unwrap();
        assert!(status.success(), "{cmd} failed");
    }
    for file in [
        "phantom_data.csv",
        "phantom_inverse.vtk",
        "u_clean.csv",
        "u_noisy.csv",
        "noise_meta.txt",
        "reconstruction.csv",
        "reconstruction.vtk",
        "residuals.csv",
        "config_used.toml",
    ] {
        assert!(out.join(file).exists(), "missing {file}");
    }

    // the residual log honors the discrepancy principle: final row at or
    // below tau * delta, all earlier rows above
    let meta = std::fs::read_to_string(out.join("noise_meta.txt")).unwrap();
    let delta: f64 = meta
        .lines()
        .find_map(|l| l.strip_prefix("delta = "))
        .unwrap()
        .parse()
        .unwrap();
    let bound = 1.2 * delta;
    let log = std::fs::read_to_string(out.join("residuals.csv")).unwrap();
    let residuals: Vec<f64> = log
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert!(!residuals.is_empty());
    assert!(*residuals.last().unwrap() <= bound);
    assert!(residuals[..residuals.len() - 1].iter().all(|&r| r > bound));
}

#[test]
fn invert_is_deterministic_byte_for_byte() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let mut artifacts = Vec::new();
    for name in ["a", "b"] {
        let out = dir.path().join(name);
        let status = elastrec()
            .args(["invert", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(&out)
            .args(["--override", "inversion.max_iters=20"])
            .status()
            .unwrap();
        assert!(status.success());
        let recon = std::fs::read(out.join("reconstruction.csv")).unwrap();
        // drop the wall-time column, which is the one legitimate difference
        let log: Vec<String> = std::fs::read_to_string(out.join("residuals.csv"))
            .unwrap()
            .lines()
            .map(|l| l.rsplit_once(',').unwrap().0.to_string())
            .collect();
        artifacts.push((recon, log));
    }
    assert_eq!(artifacts[0].0, artifacts[1].0, "fields differ across runs");
    assert_eq!(artifacts[0].1, artifacts[1].1, "logs differ across runs");
}

#[test]
fn verify_exits_zero_on_default_small_setup() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("verify");
    let output = elastrec()
        .args(["verify", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .output()
        .unwrap();
    assert!(
        output.status.success(),
        "verify failed: {}",
        String::from_utf8_lossy(&output.stdout)
    );
    assert!(out.join("verify_report.csv").exists());
}

#[test]
fn tcc_exits_zero_and_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out = dir.path().join("tcc");
    let status = elastrec()
        .args(["tcc", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert!(status.success());
    assert!(out.join("tcc_report.csv").exists());
}

#[test]
fn bad_config_gives_nonzero_exit() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, "mesh = \"not a table\"\n").unwrap();
    let output = elastrec()
        .args(["invert", "--config"])
        .arg(&cfg)
        .output()
        .unwrap();
    assert!(!output.status.success());
    assert!(!output.stderr.is_empty());

    // inverse-crime guard: data mesh must be finer
    let dir2 = tempfile::tempdir().unwrap();
    let cfg2 = small_config(dir2.path());
    let output = elastrec()
        .args(["forward", "--config"])
        .arg(&cfg2)
        .args(["--override", "mesh.data_n=8"])
        .output()
        .unwrap();
    assert!(!output.status.success());
}

#[test]
fn seed_flag_overrides_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path());
    let out_a = dir.path().join("sa");
    let out_b = dir.path().join("sb");
    for (out, seed) in [(&out_a, "7"), (&out_b, "8")] {
        let status = elastrec()
            .args(["noise", "--config"])
            .arg(&cfg)
            .arg("--out")
            .arg(out)
            .args(["--seed", seed])
            .status()
            .unwrap();
        assert!(status.success());
    }
    let a = std::fs::read(out_a.join("u_noisy.csv")).unwrap();
    let b = std::fs::read(out_b.join("u_noisy.csv")).unwrap();
    assert_ne!(a, b, "different seeds must give different noise");
}

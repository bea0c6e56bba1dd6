use std::path::Path;
use std::process::Command;

use liouville_cli::output::csv_body;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_liouville"))
}

fn run_in(out: &Path, args: &[&str]) -> i32 {
    let status = bin()
        .arg("--out")
        .arg(out)
        .args(args)
        .output()
        .expect("spawn liouville");
    status.status.code().expect("exit code")
}

fn manifest(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("manifest.json")).unwrap()).unwrap()
}

#[test]
fn verify_passes_on_clean_build() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in(d.path(), &["verify"]), 0);
    let text = std::fs::read_to_string(d.path().join("verify.txt")).unwrap();
    assert!(text.lines().filter(|l| l.starts_with("PASS")).count() >= 18);
    assert!(!text.contains("FAIL"));
    assert_eq!(manifest(d.path())["status"], "ok");
}

#[test]
fn usage_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in(d.path(), &["spectrum", "--bogus"]), 2);
    assert_eq!(run_in(d.path(), &["nonsense"]), 2);
    assert_eq!(run_in(d.path(), &["binder", "--sizes", "4,x"]), 2);
    assert_eq!(run_in(d.path(), &["mcm", "--N", "3"]), 2);
    assert_eq!(run_in(d.path(), &["--workers", "0", "verify"]), 2);
}

#[test]
fn help_exits_zero() {
    let out = bin().arg("--help").output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for sub in ["spectrum", "mcm", "meanfield", "thermal", "binder", "dynamics", "unravel", "verify"] {
        assert!(text.contains(sub), "{sub} missing from help");
    }
}

#[test]
fn header_echoes_resolved_config() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "# defaults\nN = 4\ng = 0.25\nn_traj = 50\n").unwrap();
    let out = d.path().join("o");
    let code = run_in(&out, &["--config", cfg.to_str().unwrap(), "spectrum", "--N", "2"]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert!(text.contains("# N = 2\n"), "flag should override config:\n{text}");
    assert!(text.contains("# g = 0.25\n"));
    assert!(text.contains("# gamma = 1\n"));
    let body = csv_body(&text);
    assert!(body.starts_with("index,re_lambda,im_lambda,abs_trace,steady\n"));
    assert_eq!(body.lines().count(), 1 + 16);

    let m = manifest(&out);
    assert_eq!(m["config"]["N"], "2");
    assert_eq!(m["convergence"]["symmetries_passed"], true);
    assert!(m["wall_seconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn unknown_config_key_is_rejected() {
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("run.cfg");
    std::fs::write(&cfg, "N = 2\ntemperature = 300\n").unwrap();
    assert_eq!(run_in(d.path(), &["--config", cfg.to_str().unwrap(), "spectrum"]), 2);
}

#[test]
fn csv_bodies_do_not_depend_on_workers() {
    let d = tempfile::tempdir().unwrap();
    let args = ["unravel", "--n-traj", "300", "--t-max", "0.5", "--steps", "5"];
    let (a, b) = (d.path().join("a"), d.path().join("b"));
    assert_eq!(run_in(&a, &[&["--workers", "1"][..], &args[..]].concat()), 0);
    assert_eq!(run_in(&b, &[&["--workers", "3"][..], &args[..]].concat()), 0);
    let read = |p: &Path| csv_body(&std::fs::read_to_string(p.join("unravel.csv")).unwrap());
    assert_eq!(read(&a), read(&b));
}

#[test]
fn nonconvergence_exits_one_with_outputs() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(run_in(d.path(), &["mcm", "--N", "4", "--max-steps", "3"]), 1);
    assert!(d.path().join("mcm.csv").exists());
    let m = manifest(d.path());
    assert_eq!(m["status"], "failed");
    assert_eq!(m["convergence"]["converged"], false);
}

#[test]
fn dense_cap_override() {
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .env("LIOUVILLE_DENSE_CAP", "2")
        .args(["--out", d.path().to_str().unwrap(), "spectrum", "--N", "4"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dense cap"));
}

#[test]
fn memory_guard_refuses_large_runs() {
    let d = tempfile::tempdir().unwrap();
    let out = bin()
        .env("LIOUVILLE_MEM_LIMIT_MB", "1")
        .args(["--out", d.path().to_str().unwrap(), "mcm", "--N", "8"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("guard"));
}

#[test]
fn mcm_checkpoint_round_trip() {
    let d = tempfile::tempdir().unwrap();
    let ck = d.path().join("mode.ck");
    let a = d.path().join("a");
    assert_eq!(run_in(&a, &["mcm", "--N", "4", "--g", "0.3", "--checkpoint", ck.to_str().unwrap()]), 0);
    let b = d.path().join("b");
    assert_eq!(run_in(&b, &["mcm", "--N", "4", "--g", "0.3", "--resume", ck.to_str().unwrap()]), 0);
    let (ma, mb) = (manifest(&a), manifest(&b));
    let re = |m: &serde_json::Value| m["convergence"]["eigenvalue"][0].as_f64().unwrap();
    assert!((re(&ma) - re(&mb)).abs() < 1e-7);
    assert!(mb["convergence"]["iterations"].as_u64().unwrap() <= 1);
}

#[test]
fn small_pipelines_run() {
    let d = tempfile::tempdir().unwrap();
    let cases: [(&str, &[&str], &str); 4] = [
        ("mf", &["meanfield", "--beta", "inf", "--gamma-grid", "0,0,1", "--g-grid", "0,2,5"], "meanfield.csv"),
        ("th", &["thermal", "--N", "2", "--gamma-grid", "0,1,2", "--g-grid", "0,1,2"], "thermal.csv"),
        ("dy", &["dynamics", "--N", "2", "--steps", "100", "--overlaps"], "fourier.csv"),
        ("bi", &["binder", "--sizes", "2,4", "--bracket", "0.3,1.5"], "binder_crossings.csv"),
    ];
    for (dir, args, file) in cases {
        let out = d.path().join(dir);
        assert_eq!(run_in(&out, args), 0, "{args:?}");
        assert!(out.join(file).exists(), "{file}");
        assert_eq!(manifest(&out)["status"], "ok");
    }
    let mf = csv_body(&std::fs::read_to_string(d.path().join("mf/meanfield.csv")).unwrap());
    // beta = inf, gamma = 0: m = sqrt(1 - g^2) below g = 1
    let row: Vec<f64> = mf.lines().nth(2).unwrap().split(',').take(3).map(|x| x.parse().unwrap()).collect();
    assert!((row[1] - 0.5).abs() < 1e-12);
    assert!((row[2] - 0.75f64.sqrt()).abs() < 1e-8);
}

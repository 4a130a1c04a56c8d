use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static Path {
    Path::new(env!("CARGO_BIN_EXE_dipole-loop"))
}

fn write_config(dir: &Path, text: &str) -> PathBuf {
    let p = dir.join("run.cfg");
    std::fs::write(&p, text).unwrap();
    p
}

fn run(args: &[&str], cfg: &Path, out: &Path) -> Output {
    Command::new(bin())
        .args(args)
        .arg("--config")
        .arg(cfg)
        .arg("--out")
        .arg(out)
        .env_remove("DIPOLE_LOOP_THREADS")
        .output()
        .unwrap()
}

#[test]
fn negative_feynman_scale_exits_3() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "loop.path = exact\nloop.p_sq = -10\n");
    let o = run(&["loop-selfenergy"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("kinematic domain"));
}

#[test]
fn config_errors_exit_2_with_every_line() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "atoms.m1 = -1\n# ok\nfoo.bar = 2\njc.rwa = maybe\n");
    let o = run(&["jc-rabi"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    for needle in ["line 1: atoms.m1", "line 3: foo.bar", "line 4: jc.rwa"] {
        assert!(err.contains(needle), "{err}");
    }
    assert!(!tmp.path().join("out").exists());
}

#[test]
fn missing_config_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&["check-dims"], &tmp.path().join("nope.cfg"), &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn bad_lambda_grid_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let o = run(
        &["loop-vertex", "--lambda-grid", "10:x:4"],
        &cfg,
        &tmp.path().join("out"),
    );
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--lambda-grid"));
}

#[test]
fn bad_thread_count_exits_2() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let o = Command::new(bin())
        .args(["check-dims", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(tmp.path().join("out"))
        .env("DIPOLE_LOOP_THREADS", "many")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_exits_1() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let blocker = tmp.path().join("file");
    std::fs::write(&blocker, "").unwrap();
    let o = run(&["check-dims"], &cfg, &blocker.join("out"));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn csv_carries_resolved_config_and_units() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "loop.lambda = 40\n");
    let out = tmp.path().join("out");
    let o = run(&["loop-polarization", "--lambda-grid", "60:6000:12,log"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("loop-polarization.csv")).unwrap();
    assert!(text.starts_with("# dipole-loop loop-polarization\n"));
    assert!(text.contains("# loop.lambda = 40\n"));
    assert!(text.contains("# loop.fit_lambda = 60:6000:12,log\n"));
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(text.as_bytes());
    let header = rdr.headers().unwrap().clone();
    assert_eq!(&header[0], "lambda [mass]");
    let rows: Vec<_> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0][0].parse::<f64>().unwrap(), 40.0);
    let fit = std::fs::read_to_string(out.join("loop-polarization_fit.csv")).unwrap();
    assert_eq!(fit.lines().filter(|l| l.starts_with("polarization,")).count(), 12);
}

#[test]
fn oracle_verify_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "");
    let o = run(&["oracle-verify"], &cfg, &tmp.path().join("out"));
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("0 failed"));
}

#[test]
fn counterterm_report_lists_two_new_operators() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "dipole.tensor = 0.1,0.05,-0.02,0,0.03,0.01\n");
    let out = tmp.path().join("out");
    let o = run(&["report-counterterms"], &cfg, &out);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(out.join("report-counterterms.txt")).unwrap();
    assert_eq!(text.lines().filter(|l| l.starts_with("counterterm.new.")).count(), 2);
    assert!(text.contains("prefactor.ratio = 1.5707963"));
}

use std::path::{Path, PathBuf};
use std::process::Command;

use pwcenter::cli::{parse_spec, render_csv, run_report, RunOptions, CSV_HEADER};

const X2Y_Y3: &str = "\
# canonical case V entry
[upper]
degree = 3
coeffs = 0, 1, 0, 0        # x^2 y
[lower]
degree = 3
coeffs = 0, 0, 0, 1        # y^3
[options]
order = 8
rmax = 0.2
samples = 16
tol = 1e-6
";

fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("pwcenter-cli-{tag}-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn run(args: &[&str], spec: &Path) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_analyze"))
        .arg(spec)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_is_deterministic_and_reports() {
    let dir = scratch_dir("det");
    let spec = dir.join("sys.txt");
    std::fs::write(&spec, X2Y_Y3).unwrap();
    let (a, b) = (dir.join("a.csv"), dir.join("b.csv"));
    for out in [&a, &b] {
        let o = run(&["--seed", "7", "--no-timestamp", "--csv", out.to_str().unwrap()], &spec);
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
        let text = String::from_utf8(o.stdout).unwrap();
        assert!(text.contains("case V"));
        assert!(text.contains("first obstruction: r0^1 coefficient 2 + 0*pi"));
        assert!(text.contains("witness: r0 = "));
    }
    let (ta, tb) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(ta, tb);
    let text = String::from_utf8(ta).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(CSV_HEADER));
    assert_eq!(lines.count(), 16);

    let stamped = dir.join("c.csv");
    run(&["--seed", "7", "--csv", stamped.to_str().unwrap()], &spec);
    let stamped = std::fs::read_to_string(stamped).unwrap();
    assert!(stamped.starts_with("# generated "));
    assert_eq!(stamped.split_once('\n').unwrap().1, text);
}

#[test]
fn exit_codes() {
    let dir = scratch_dir("exit");
    let bad = dir.join("bad.txt");
    std::fs::write(&bad, X2Y_Y3.replace("0, 1, 0, 0", "0, 1/0, 0, 0")).unwrap();
    let o = run(&[], &bad);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 4, column 13"));

    let mismatch = dir.join("mismatch.txt");
    std::fs::write(&mismatch, X2Y_Y3.replace("0, 0, 0, 1", "0, 0, 1")).unwrap();
    assert_eq!(run(&[], &mismatch).status.code(), Some(2));

    let non_center = dir.join("nc.txt");
    let csv = dir.join("nc.csv");
    std::fs::write(&non_center, X2Y_Y3.replace("0, 1, 0, 0", "1, 0, 0, 0")).unwrap();
    let o = run(&["--csv", csv.to_str().unwrap()], &non_center);
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("not a center"));
    assert!(text.contains("correspondence gap"));
    assert!(!csv.exists());
}

#[test]
fn zero_system_is_trivially_isochronous() {
    let text = "[upper]\ndegree = 3\ncoeffs = 0, 0, 0, 0\n[lower]\ndegree = 3\ncoeffs = 0,0,0,0\n";
    let parsed = parse_spec(text).unwrap();
    assert_eq!(parsed.warnings.len(), 1);
    let opts = RunOptions {
        samples: 8,
        ..RunOptions::default()
    };
    let out = run_report(&parsed.system, &opts).unwrap();
    assert_eq!(out.report.summary, "isochronous (trivial linear)");
    assert!(out.report.witness.is_none());
    for row in &out.rows {
        assert!((row.t_numeric - 2.0 * std::f64::consts::PI).abs() <= 1e-10);
    }
    assert_eq!(render_csv(&out.rows, None).lines().count(), 9);
}

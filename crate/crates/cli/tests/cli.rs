use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn domain(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("domains").join(format!("{name}.toml"))
}

fn billiard(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_billiard")).args(args).output().expect("spawn billiard")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

#[test]
#[allow(clippy::approx_constant)]
fn circle_beta_half_row() {
    let c = domain("circle");
    let o = billiard(&["beta", c.to_str().unwrap(), "--q-max", "8"]);
    assert!(o.status.success());
    let text = stdout(&o);
    let row = text.lines().find(|l| l.starts_with("1,2,")).expect("1/2 row");
    let fields: Vec<&str> = row.split(',').collect();
    let beta: f64 = fields[3].parse().unwrap();
    assert!((beta + 0.3183099).abs() < 1e-7, "{row}");
    assert_eq!(fields[6], "true");
}

#[test]
fn check_passes_on_the_circle() {
    let o = billiard(&["check", domain("circle").to_str().unwrap(), "--q-max", "12"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(String::from_utf8_lossy(&o.stderr).contains("0 failed"));
}

#[test]
fn check_fails_on_an_under_resolved_boundary() {
    // Strongly non-round and only 64 samples: the turning integral misses 2π
    // and the normal form breaks its constraints.
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("flat.toml");
    fs::write(&path, "cos_coeffs = [1.0, 0.0, 0.0, 0.0, 0.9]\nn_samples = 64\n").unwrap();
    let o = billiard(&["check", path.to_str().unwrap(), "--q-max", "10"]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
}

#[test]
fn rotated_circle_is_indistinguishable() {
    let o = billiard(&[
        "compare",
        domain("circle").to_str().unwrap(),
        domain("rotated-circle").to_str().unwrap(),
        "--q-max",
        "10",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains(": indistinguishable"), "{}", stdout(&o));
}

#[test]
fn circle_and_ellipse_are_distinguished() {
    let o = billiard(&["compare", domain("circle").to_str().unwrap(), domain("ellipse").to_str().unwrap(), "--q-max", "6"]);
    assert!(stdout(&o).contains("distinguished at 1/2"), "{}", stdout(&o));
}

#[test]
fn outputs_are_byte_identical_across_runs_and_widths() {
    let p = domain("perturbed");
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for (dir, jobs) in [(&a, "1"), (&b, "4")] {
        let o = billiard(&["spectrum", p.to_str().unwrap(), "--q-max", "12", "--jobs", jobs, "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success());
        let o = billiard(&["beta", p.to_str().unwrap(), "--q-max", "12", "--jobs", jobs, "--out", dir.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["spectrum.csv", "beta.csv", "beta_coeffs.csv"] {
        let x = fs::read(a.path().join(f)).unwrap();
        let y = fs::read(b.path().join(f)).unwrap();
        assert_eq!(x, y, "{f}");
        assert!(!String::from_utf8(x).unwrap().contains("NaN"));
    }
}

#[test]
fn normal_form_tables() {
    let dir = tempfile::tempdir().unwrap();
    let o = billiard(&["normal-form", domain("ellipse").to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    let ledger = fs::read_to_string(dir.path().join("nf_ledger.csv")).unwrap();
    assert_eq!(ledger.lines().count(), 3);
    assert!(ledger.lines().skip(1).all(|l| l.ends_with(",true")));

    let o = billiard(&["normal-form", domain("circle").to_str().unwrap(), "--backend", "rational"]);
    let text = stdout(&o);
    assert!(text.contains("1/6 * (pi/2)^2") && text.contains("3/40 * (pi/2)^4"), "{text}");
    let o = billiard(&["normal-form", domain("ellipse").to_str().unwrap(), "--backend", "rational"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_writes_two_svgs() {
    let dir = tempfile::tempdir().unwrap();
    let o = billiard(&["plot", domain("perturbed").to_str().unwrap(), "--q-max", "8", "--out", dir.path().to_str().unwrap()]);
    assert!(o.status.success());
    for f in ["beta.svg", "phase.svg"] {
        let s = fs::read_to_string(dir.path().join(f)).unwrap();
        assert!(s.starts_with("<svg") && s.trim_end().ends_with("</svg>") && !s.contains("NaN"));
    }
}

#[test]
fn config_errors_point_at_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    fs::write(&path, "name = \"bad\"\ncos_coeffs = [1.0, 0.0\nn_samples = 64\n").unwrap();
    let o = billiard(&["domain", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("bad.toml") && err.contains("line 3"), "{err}");

    fs::write(&path, "cos_coeffs = [1.0, 0.2]\nn_samples = 64\n").unwrap();
    let err = String::from_utf8_lossy(&billiard(&["domain", path.to_str().unwrap()]).stderr).into_owned();
    assert!(err.contains("first harmonic"), "{err}");
}

#[test]
fn committed_domains_validate() {
    for name in ["circle", "ellipse", "perturbed", "rotated-circle"] {
        let o = billiard(&["domain", domain(name).to_str().unwrap()]);
        assert!(o.status.success(), "{name}");
        assert!(stdout(&o).contains("perimeter after scaling: 1.0000000000000"), "{name}");
    }
}

use std::path::Path;
use std::process::{Command, Output};

fn oft(args: &[&str], dir: &Path, envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_oft"));
    cmd.args(args).current_dir(dir).env_remove("OFT_THREADS");
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("spawn oft")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(key).and_then(|r| r.trim().strip_prefix('=')))
        .unwrap_or_else(|| panic!("no `{key}` in\n{text}"))
        .trim()
        .parse()
        .unwrap()
}

const BUMP_1D: &str = "\
[grid]
lower = -1
upper = 1
n = 81
[physics]
kappa = 10
[time]
dt0 = 0.05
[refraction]
kind = gaussian
width = 0.3
amplitude = 0.1
[incident]
direction = 1
[output]
path = out.csv
format = csv
";

#[test]
fn solve_writes_field_and_report() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bump.conf"), BUMP_1D).unwrap();
    let o = oft(&["solve", "bump.conf"], dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    assert!(report_value(&out, "rel_residual") < 1.0);
    assert!(report_value(&out, "max_abs_scattered") > 1e-3);
    let csv = std::fs::read_to_string(dir.path().join("out.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("x,re,im"));
    assert_eq!(csv.lines().count(), 82);
    assert!(dir.path().join("out.csv.report").exists());
}

#[test]
fn uniform_medium_scatters_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let conf = BUMP_1D.replace(
        "kind = gaussian\nwidth = 0.3\namplitude = 0.1",
        "kind = uniform\nbeta0 = 1",
    );
    std::fs::write(dir.path().join("flat.conf"), conf).unwrap();
    let o = oft(&["solve", "flat.conf"], dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(report_value(&stdout(&o), "max_abs_scattered") <= 1e-10);
}

#[test]
fn thread_count_does_not_change_output() {
    let dir = tempfile::tempdir().unwrap();
    let conf = BUMP_1D
        .replace("lower = -1\nupper = 1\nn = 81", "lower = -1 -1\nupper = 1 1\nn = 41 41")
        .replace("direction = 1", "direction = 1 1")
        .replace("path = out.csv\nformat = csv", "path = out.oftf");
    std::fs::write(dir.path().join("bump.conf"), conf).unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4"] {
        let o = oft(&["solve", "bump.conf"], dir.path(), &[("OFT_THREADS", threads)]);
        assert!(o.status.success(), "{}", stderr(&o));
        outputs.push(std::fs::read(dir.path().join("out.oftf")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1]);
}

#[test]
fn apply_sqrt_runs_one_pass() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("bump.conf"), BUMP_1D).unwrap();
    let o = oft(&["apply-sqrt", "bump.conf"], dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(report_value(&stdout(&o), "steps") > 10.0);
    let residual = BUMP_1D.replace("[output]", "[stopping]\nkind = residual\ntol = 0.1\n[output]");
    std::fs::write(dir.path().join("res.conf"), residual).unwrap();
    assert_eq!(oft(&["apply-sqrt", "res.conf"], dir.path(), &[]).status.code(), Some(2));
}

#[test]
fn raster_paths_resolve_next_to_the_config() {
    let dir = tempfile::tempdir().unwrap();
    let sub = dir.path().join("cases");
    std::fs::create_dir(&sub).unwrap();
    let mut pgm = b"P5\n2 2\n255\n".to_vec();
    pgm.extend_from_slice(&[0, 255, 255, 0]);
    std::fs::write(sub.join("img.pgm"), pgm).unwrap();
    let conf = "[grid]\nlower = -1 -1\nupper = 1 1\nn = 21 21\n[physics]\nkappa = 5\n[time]\ndt0 = 0.1\n\
                [refraction]\nkind = raster\npath = img.pgm\namplitude = 0.1\n[incident]\ndirection = 1 0\n\
                [output]\npath = r.oftf\n";
    std::fs::write(sub.join("r.conf"), conf).unwrap();
    let o = oft(&["solve", "cases/r.conf"], dir.path(), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(sub.join("r.oftf").exists());

    std::fs::write(sub.join("img.pgm"), b"P5\n2 2\n255\n\x00").unwrap();
    let o = oft(&["solve", "cases/r.conf"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2), "{}", stderr(&o));
    assert!(stderr(&o).contains("byte"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let o = oft(&["solve", "missing.conf"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(4));

    std::fs::write(dir.path().join("bad.conf"), BUMP_1D.replace("kappa = 10", "kappa = 0")).unwrap();
    let o = oft(&["solve", "bad.conf"], dir.path(), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("physics.kappa"));

    std::fs::write(dir.path().join("typo.conf"), BUMP_1D.replace("width", "widht")).unwrap();
    assert_eq!(oft(&["solve", "typo.conf"], dir.path(), &[]).status.code(), Some(2));

    std::fs::write(
        dir.path().join("ok.conf"),
        BUMP_1D.replace("path = out.csv", "path = no/such/dir/out.csv"),
    )
    .unwrap();
    assert_eq!(oft(&["solve", "ok.conf"], dir.path(), &[]).status.code(), Some(4));

    let o = oft(
        &["eigen", "--alpha", "1", "--length", "1", "--count", "1"],
        dir.path(),
        &[("OFT_THREADS", "zero")],
    );
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(
        oft(
            &["eigen", "--alpha", "-1", "--length", "1", "--count", "1"],
            dir.path(),
            &[]
        )
        .status
        .code(),
        Some(2)
    );
    assert_eq!(oft(&["converge", "--dim", "4"], dir.path(), &[]).status.code(), Some(2));
    assert_eq!(
        oft(&["converge", "--dim", "1", "--rows", "3..2"], dir.path(), &[])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn eigen_lists_roots() {
    let o = oft(
        &["eigen", "--alpha", "10", "--length", "2", "--count", "5"],
        Path::new("."),
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "n,re,im,abs_f");
    assert_eq!(lines.len(), 6);
    for l in &lines[1..] {
        let cols: Vec<f64> = l.split(',').map(|c| c.parse().unwrap()).collect();
        assert!(cols[1] > 0.0 && cols[2] < 0.0 && cols[3] < 1e-10, "{l}");
    }
}

#[test]
fn converge_first_row_and_skip_notice() {
    let o = oft(&["converge", "--dim", "1", "--rows", "1"], Path::new("."), &[]);
    assert!(o.status.success(), "{}", stderr(&o));
    let out = stdout(&o);
    let lines: Vec<&str> = out.lines().collect();
    assert_eq!(lines[0], "dt0,Ntau,Nx,relErr_v1,ub,relErr_v2,res");
    let cols: Vec<f64> = lines[1].split(',').map(|c| c.parse().unwrap()).collect();
    assert_eq!((cols[1], cols[2]), (102.0, 70.0));
    assert!(cols[3] > 0.08 && cols[3] < 0.18, "{}", lines[1]);

    let o = oft(&["converge", "--dim", "3", "--rows", "3..3"], Path::new("."), &[]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("skipping row 3"));
    assert_eq!(stdout(&o).lines().count(), 1);
}

#[test]
fn demos_report_errors() {
    let o = oft(&["demo", "ode1", "--intervals", "20"], Path::new("."), &[]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("max_error"));
    let o = oft(&["demo", "ode2"], Path::new("."), &[]);
    let out = stdout(&o);
    let field = |key: &str| -> f64 {
        let rest = out.split(&format!("{key} = ")).nth(1).unwrap();
        rest.split_whitespace().next().unwrap().parse().unwrap()
    };
    assert!((field("max_error") - field("quadrature_error")).abs() < 1e-12, "{out}");
    let o = oft(
        &["demo", "luneburg", "--n", "24,24,30", "--t-final", "10"],
        Path::new("."),
        &[],
    );
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("focus_distance"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut seen = 0;
    for entry in std::fs::read_dir(&dir).unwrap() {
        let path = entry.unwrap().path();
        if path.extension().is_some_and(|e| e == "conf") {
            let cfg = oft_core::config::SolverConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
            cfg.schedule().unwrap();
            seen += 1;
        }
    }
    assert!(seen >= 3);
}

//! End-to-end runs of the `atomphoton` binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use atomphoton::sweep::{read_rows, CSV_HEADER};

fn atomphoton(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_atomphoton"))
        .args(args)
        .env_remove("ATOMPHOTON_CATALOG")
        .output()
        .unwrap()
}

fn stdout(out: &Output) -> String {
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).unwrap()
}

const FAST: [&str; 6] = ["--samples", "1024", "--replicates", "2", "--seed", "3"];

fn sweep_args<'a>(out: &'a str, jobs: &'a str) -> Vec<&'a str> {
    let mut a = vec![
        "sweep",
        "--line",
        "Li-narrow",
        "--tu-min-uK",
        "0.2",
        "--tu-max-uK",
        "2000",
        "--points",
        "6",
        "--out",
        out,
        "--jobs",
        jobs,
    ];
    a.extend(FAST);
    a
}

#[test]
fn lines_lists_builtin_catalog() {
    let text = stdout(&atomphoton(&["lines"]));
    let rows: Vec<&str> = text.lines().collect();
    assert_eq!(
        rows[0],
        "name,transition,t_recoil_uK,t_doppler_uK,d,t_de_uK"
    );
    assert_eq!(rows.len(), 7);
    assert!(rows[1].starts_with("Cs-D2,6S1/2 -> 6P3/2,0.2,125.0,625.0,312500.0"));
}

#[test]
fn custom_catalog_by_flag_and_environment() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lines.json");
    fs::write(
        &path,
        r#"[{"name": "Toy", "t_recoil_uK": 2.0, "t_doppler_uK": 8.0}]"#,
    )
    .unwrap();
    let p = path.to_str().unwrap();

    let text = stdout(&atomphoton(&["--catalog", p, "lines"]));
    assert_eq!(text.lines().nth(1).unwrap(), "Toy,,2.0,8.0,4.0,128.0");
    assert_eq!(text.lines().count(), 2);

    let out = Command::new(env!("CARGO_BIN_EXE_atomphoton"))
        .args(["estimate", "--line", "Toy", "--tu-uK", "2"])
        .env("ATOMPHOTON_CATALOG", &path)
        .output()
        .unwrap();
    assert!(stdout(&out).contains("Toy,2.0,2.0,8.0,128.0,1.0,4.0,"));
}

#[test]
fn bad_catalog_exits_2_missing_catalog_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    fs::write(&bad, "[{\"name\": 3}]").unwrap();
    assert_eq!(
        atomphoton(&["--catalog", bad.to_str().unwrap(), "lines"])
            .status
            .code(),
        Some(2)
    );
    let missing = dir.path().join("missing.json");
    assert_eq!(
        atomphoton(&["--catalog", missing.to_str().unwrap(), "lines"])
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn unknown_line_exits_2_and_lists_catalog() {
    let out = atomphoton(&["purity", "--line", "NoSuchLine", "--tu-uK", "1"]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("Cs-D2") && err.contains("Sr-narrow"), "{err}");
}

#[test]
fn invalid_arguments_exit_2() {
    assert_eq!(
        atomphoton(&["purity", "--line", "Cs-D2", "--tu-uK", "-1"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        atomphoton(&[
            "purity",
            "--line",
            "Cs-D2",
            "--tu-uK",
            "1",
            "--samples",
            "10"
        ])
        .status
        .code(),
        Some(2)
    );
    assert_eq!(
        atomphoton(&["sweep", "--line", "Cs-D2", "--points", "1"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn unwritable_output_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "").unwrap();
    let out = blocker.join("rows.csv");
    let out = atomphoton(&sweep_args(out.to_str().unwrap(), "1"));
    assert_eq!(
        out.status.code(),
        Some(3),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}

#[test]
fn purity_row_is_self_consistent() {
    let mut args = vec!["purity", "--line", "Cs-D2", "--tu-uK", "125"];
    args.extend(FAST);
    let text = stdout(&atomphoton(&args));
    assert_eq!(text.lines().next().unwrap(), CSV_HEADER);
    let rows = read_rows(&text).unwrap();
    assert_eq!(rows.len(), 1);
    let r = &rows[0];
    assert_eq!((r.u, r.d, r.axis_value), (625.0, 625.0, 1.0));
    assert_eq!(r.schmidt_rank, 1.0 / r.purity.min(1.0));
    assert_eq!(r.regime, "Plateau");
}

#[test]
fn estimate_examples() {
    let text = stdout(&atomphoton(&[
        "estimate", "--line", "Cs-D2", "--tu-uK", "0.20",
    ]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!((row[5], row[8], row[10]), ("1.0", "2.0", "Recoil"));

    let text = stdout(&atomphoton(&[
        "estimate", "--line", "Cs-D2", "--tu-uK", "312500",
    ]));
    let row: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(row[7], "1.0");
    let k: f64 = row[9].parse().unwrap();
    assert!((k - (8.0 * 2f64.ln()).sqrt()).abs() < 1e-12);
    assert_eq!(row[10], "Doppler");

    for t in ["0.01", "1", "1000"] {
        let text = stdout(&atomphoton(&[
            "estimate",
            "--line",
            "Sr-narrow",
            "--tu-uK",
            t,
        ]));
        assert!(text.trim_end().ends_with(",Mixed"), "{text}");
    }
}

#[test]
fn phase_diagram_analytic_labels() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("phase.csv");
    let o = out.to_str().unwrap();
    stdout(&atomphoton(&[
        "phase-diagram",
        "--u-min",
        "0.5",
        "--u-max",
        "1562500",
        "--u-points",
        "9",
        "--d-min",
        "0.4",
        "--d-max",
        "625",
        "--d-points",
        "2",
        "--out",
        o,
    ]));
    let text = fs::read_to_string(&out).unwrap();
    let rows: Vec<Vec<&str>> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    assert_eq!(rows.len(), 18);
    assert!(rows[..9].iter().all(|r| r[1] == "0.4" && r[2] == "Mixed"));
    assert_eq!(
        (rows[9][0], rows[9][1], rows[9][2]),
        ("0.5", "625.0", "Recoil")
    );
    assert_eq!((rows[17][0], rows[17][2]), ("1562500.0", "Doppler"));
    assert!(rows.iter().all(|r| r[6].is_empty()));
}

#[test]
fn phase_diagram_numeric_fills_purity() {
    let mut args = vec![
        "phase-diagram",
        "--numeric",
        "--u-min",
        "1",
        "--u-max",
        "100",
        "--u-points",
        "2",
        "--d-min",
        "10",
        "--d-max",
        "10",
        "--d-points",
        "1",
        "--jobs",
        "2",
    ];
    args.extend(FAST);
    let text = stdout(&atomphoton(&args));
    for line in text.lines().skip(1) {
        let p: f64 = line.split(',').nth(6).unwrap().parse().unwrap();
        assert!(p > 0.0 && p < 1.1);
    }
}

fn run_sweep(dir: &Path, name: &str, jobs: &str, resume: bool) -> (Vec<u8>, String) {
    let out = dir.join(name);
    let o = out.to_str().unwrap().to_string();
    let mut args = sweep_args(&o, jobs);
    if resume {
        args.push("--resume");
    }
    let res = atomphoton(&args);
    assert!(
        res.status.success(),
        "{}",
        String::from_utf8_lossy(&res.stderr)
    );
    (
        fs::read(&out).unwrap(),
        String::from_utf8(res.stderr).unwrap(),
    )
}

#[test]
fn sweep_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, _) = run_sweep(dir.path(), "a.csv", "1", false);
    let (b, _) = run_sweep(dir.path(), "b.csv", "3", false);
    let (c, _) = run_sweep(dir.path(), "a.csv", "2", false);
    assert_eq!(a, b);
    assert_eq!(a, c);
    let rows = read_rows(std::str::from_utf8(&a).unwrap()).unwrap();
    assert_eq!(rows.len(), 6);
    assert!(rows.windows(2).all(|w| w[0].t_u_uk < w[1].t_u_uk));
    assert!(rows
        .iter()
        .all(|r| r.schmidt_rank == 1.0 / r.purity.min(1.0)));
}

#[test]
fn interrupted_sweep_resumes_from_cache() {
    let dir = tempfile::tempdir().unwrap();
    let (full, log) = run_sweep(dir.path(), "rows.csv", "2", false);
    assert!(log.contains("6 points computed, 0 reused"), "{log}");

    // lose half the finished points and corrupt one more
    let cache = dir.path().join("rows.csv.cache");
    let mut entries: Vec<_> = fs::read_dir(&cache)
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    entries.sort();
    assert_eq!(entries.len(), 6);
    for p in &entries[..3] {
        fs::remove_file(p).unwrap();
    }
    fs::write(&entries[3], "{ truncated").unwrap();
    fs::remove_file(dir.path().join("rows.csv")).unwrap();

    let (resumed, log) = run_sweep(dir.path(), "rows.csv", "2", true);
    assert!(log.contains("4 points computed, 2 reused"), "{log}");
    assert_eq!(resumed, full);

    let (again, log) = run_sweep(dir.path(), "rows.csv", "1", true);
    assert!(log.contains("0 points computed, 6 reused"), "{log}");
    assert_eq!(again, full);
}

#[test]
fn closed_form_method() {
    let text = stdout(&atomphoton(&[
        "purity",
        "--line",
        "Cs-D2",
        "--tu-uK",
        "0.2",
        "--method",
        "closed-form",
    ]));
    let r = &read_rows(&text).unwrap()[0];
    assert!((r.purity - 0.634_177_202_268_669_8).abs() < 1e-9);
    assert_eq!(r.std_error, 0.0);
    let out = atomphoton(&[
        "purity",
        "--line",
        "Cs-D2",
        "--tu-uK",
        "0.2",
        "--method",
        "closed-form",
        "--epsilon",
    ]);
    assert_eq!(out.status.code(), Some(2));
}

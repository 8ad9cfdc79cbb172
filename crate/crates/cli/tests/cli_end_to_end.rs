use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use casq_cli::emit::CSV_HEADER;
use casq_cli::Report;

fn casq(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_casq"))
        .args(args)
        .env_remove("CASQ_SPECIES_DB")
        .output()
        .expect("binary runs")
}

fn scenario(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(name)
        .display()
        .to_string()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p: PathBuf = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn run_emits_header_and_one_row() {
    let o = casq(&["run", &scenario("nonlocal_rb.json")]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(reader.headers().unwrap().iter().collect::<Vec<_>>(), CSV_HEADER);
    let rows: Vec<_> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 1);
    assert_eq!(&rows[0][0], "nonlocal");
    assert_eq!(&rows[0][6], "true");
    assert!(stderr(&o).contains("wall time"));
}

#[test]
fn json_output_reads_back() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let o = casq(&[
        "run",
        &scenario("sagnac_symmetric_rb.json"),
        "--format",
        "json",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: Report = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(report.operation, "sagnac::sagnac_total_symmetric");
    assert!((report.breakdown["ratio_total_to_local"] - 0.7).abs() < 1e-15);
    let again = casq(&["run", &scenario("sagnac_symmetric_rb.json"), "--format", "json"]);
    assert_eq!(stdout(&again), std::fs::read_to_string(&out).unwrap());
}

#[test]
fn svg_is_well_formed() {
    let o = casq(&[
        "sweep",
        &scenario("sagnac_straight_line_rb.json"),
        "--param",
        "y_ell",
        "--from",
        "0.5",
        "--to",
        "4",
        "--points",
        "9",
        "--log",
        "--format",
        "svg-plotdata",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let svg = stdout(&o);
    assert!(svg.starts_with("<?xml") && svg.trim_end().ends_with("</svg>"));
    let points = svg.split("points=\"").nth(1).unwrap().split('"').next().unwrap();
    assert_eq!(points.split_whitespace().count(), 9);
    let doc = roxmltree::Document::parse(&svg).expect("well-formed XML");
    assert_eq!(doc.root_element().tag_name().name(), "svg");
    assert_eq!(doc.descendants().filter(|n| n.has_tag_name("polyline")).count(), 1);
}

#[test]
fn log_sweep_values() {
    let o = casq(&[
        "sweep",
        &scenario("quasi_static_rb.json"),
        "--param",
        "paths.0.center_m",
        "--from",
        "1e-6",
        "--to",
        "1e-4",
        "--points",
        "3",
        "--log",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let values: Vec<f64> = csv::Reader::from_reader(text.as_bytes())
        .records()
        .map(|r| r.unwrap()[3].parse().unwrap())
        .collect();
    assert_eq!(values, vec![1e-6, 1e-5, 1e-4]);
}

#[test]
fn sweep_rows_independent_of_jobs() {
    let base = [
        "sweep",
        &scenario("motional_mirror_rb.json"),
        "--param",
        "paths.0.v_m_per_s",
        "--from",
        "-0.1",
        "--to",
        "0.1",
        "--points",
        "12",
    ];
    let one = casq(&[&base[..], &["--jobs", "1"]].concat());
    let eight = casq(&[&base[..], &["--jobs", "8"]].concat());
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(one.stdout, eight.stdout);
    assert_eq!(stdout(&one).lines().count(), 13);
}

#[test]
fn bad_parameter_path_exits_2() {
    let o = casq(&[
        "sweep",
        &scenario("nonlocal_rb.json"),
        "--param",
        "paths.5.h_m",
        "--values",
        "1e-7,2e-7",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("paths.5.h_m"));
}

#[test]
fn exit_code_classes() {
    let dir = tempfile::tempdir().unwrap();
    let missing_omega = write(
        dir.path(),
        "a.json",
        r#"{"kind": "sagnac_straight_line", "species": "Rb87-D2", "y_m": 1e-8,
            "particle": {"alpha0_F_m2": 1e-38, "resonance_rad_per_s": 2e16}}"#,
    );
    let o = casq(&["run", &missing_omega]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("omega_rad_per_s"), "{}", stderr(&o));

    let wrong_unit = write(
        dir.path(),
        "b.json",
        r#"{"kind": "dce_closed", "species": "Rb87-D2",
            "oscillation": {"r_max_nm": 1.0, "omega_cm_rad_per_s": 1e12}}"#,
    );
    let o = casq(&["run", &wrong_unit]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("r_max_m"), "{}", stderr(&o));

    let unknown_species = write(
        dir.path(),
        "c.json",
        r#"{"kind": "dce_closed", "species": "Unobtainium",
            "oscillation": {"r_max_m": 1e-9, "omega_cm_rad_per_s": 1e12}}"#,
    );
    assert_eq!(casq(&["run", &unknown_species]).status.code(), Some(2));

    let starved = write(
        dir.path(),
        "d.json",
        r#"{"kind": "quasi_static", "species": "Rb87-D2",
            "window": {"t_start_s": 0, "t_end_s": 1e-3},
            "paths": [{"motion": "harmonic", "center_m": 5e-7, "amplitude_m": 4.9e-7, "omega_rad_per_s": 62831.85}],
            "quadrature": {"rel_tol": 1e-14, "max_subdivisions": 3}}"#,
    );
    let o = casq(&["run", &starved]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stdout(&o).contains(",false,"));

    let missing = dir.path().join("nope.json");
    assert_eq!(casq(&["run", missing.to_str().unwrap()]).status.code(), Some(4));
    let unwritable = dir.path().join("no_dir").join("out.csv");
    let o = casq(&["run", &scenario("dce_closed_rb.json"), "--out", unwritable.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(4));
    let o = casq(&["--species-db", missing.to_str().unwrap(), "species", "list"]);
    assert_eq!(o.status.code(), Some(4));
}

#[test]
fn species_db_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let db = write(
        dir.path(),
        "db.json",
        r#"{"species": [{"name": "Toy", "transitions": [{"omega_eg_rad_per_s": 1e16, "d2_C2m2": 1e-58}]}]}"#,
    );
    let o = Command::new(env!("CARGO_BIN_EXE_casq"))
        .args(["species", "list"])
        .env("CASQ_SPECIES_DB", &db)
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).starts_with("Toy\t"));
    let o = casq(&["species", "show", "Cs133-D1D2"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("\"transitions\""));
    assert_eq!(casq(&["species", "show", "Nope"]).status.code(), Some(2));
}

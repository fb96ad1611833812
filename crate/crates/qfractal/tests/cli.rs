use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use qfractal::output::{read_ppm, ColorTable};
use qfractal_core::ConvergenceLabel;

fn qfractal(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qfractal"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(dir: &Path, args: &[&str]) -> Output {
    let out = qfractal(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    out
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    qfractal(dir, args).status.code().unwrap()
}

fn files(dir: &Path, names: &[&str]) -> Vec<Vec<u8>> {
    names.iter().map(|n| fs::read(dir.join(n)).unwrap()).collect()
}

fn csv_rows(path: PathBuf) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let mut rows = vec![r.headers().unwrap().iter().map(String::from).collect::<Vec<_>>()];
    rows.extend(r.records().map(|rec| rec.unwrap().iter().map(String::from).collect()));
    rows
}

#[test]
fn regions_writes_image_table_and_config() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["regions", "--plane", "--resolution", "40x30", "--out", "plane.ppm"]);
    let img = read_ppm(&fs::read(dir.path().join("plane.ppm")).unwrap()).unwrap();
    assert_eq!((img.width, img.height), (40, 30));
    assert!(img.comment.contains("regions") && img.comment.contains("plane=true") && img.comment.contains("resolution=40x30"));
    let colors = ColorTable::default();
    assert_eq!(img.pixel(0, 0), colors.color(ConvergenceLabel::OutsideDomain));
    assert_eq!(img.pixel(20, 15), colors.color(ConvergenceLabel::MixedC0));

    let rows = csv_rows(dir.path().join("plane.csv"));
    assert_eq!(rows[0], ["pixel_i", "pixel_j", "x", "y", "u", "v", "w", "label", "iterations"]);
    assert_eq!(rows.len(), 1 + 40 * 30);
    let centre = &rows[1 + 15 * 40 + 20];
    assert_eq!(centre[7], "MixedC0");
    let x: f64 = centre[2].parse().unwrap();
    assert_eq!(centre[4].parse::<f64>().unwrap(), x);

    let cfg = fs::read_to_string(dir.path().join("plane.cfg")).unwrap();
    assert!(cfg.contains("plane=true\n") && cfg.contains("window=-1,1,-1,1\n"));
}

#[test]
fn reruns_and_thread_counts_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let names = ["a.ppm", "a.csv", "a.cfg"];
    let args = ["regions", "--purity", "0.9", "--resolution", "64x48", "--out", "a.ppm"];
    ok(dir.path(), &[&args[..], &["--threads", "1"]].concat());
    let first = files(dir.path(), &names);
    ok(dir.path(), &[&args[..], &["--threads", "3"]].concat());
    assert_eq!(first, files(dir.path(), &names));

    let b = ["backward", "--depth", "4", "--steps", "20", "--strategy", "random", "--seed", "7", "--out", "b.csv"];
    ok(dir.path(), &[&b[..], &["--threads", "1"]].concat());
    let first = files(dir.path(), &["b.csv", "b.cfg"]);
    ok(dir.path(), &[&b[..], &["--threads", "4"]].concat());
    assert_eq!(first, files(dir.path(), &["b.csv", "b.cfg"]));
    let mut other = b.to_vec();
    other[8] = "8";
    ok(dir.path(), &other);
    assert_ne!(first[0], fs::read(dir.path().join("b.csv")).unwrap());
}

#[test]
fn config_file_sets_defaults_and_flags_win() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("run.cfg"), "# small run\npurity = 0.85\nresolution = 16x16\nout = f.ppm\n").unwrap();
    ok(dir.path(), &["regions", "--config", "run.cfg"]);
    let cfg = fs::read_to_string(dir.path().join("f.cfg")).unwrap();
    assert!(cfg.contains("purity=0.85\n") && cfg.contains("resolution=16x16\n"));

    ok(dir.path(), &["regions", "--config", "run.cfg", "--purity", "0.95", "--out", "g.ppm"]);
    let cfg = fs::read_to_string(dir.path().join("g.cfg")).unwrap();
    assert!(cfg.contains("purity=0.95\n") && cfg.contains("resolution=16x16\n"));

    // The sidecar is itself a config file that reproduces the run.
    let original = fs::read(dir.path().join("g.ppm")).unwrap();
    fs::rename(dir.path().join("g.ppm"), dir.path().join("g0.ppm")).unwrap();
    ok(dir.path(), &["regions", "--config", "g.cfg"]);
    assert_eq!(original, fs::read(dir.path().join("g.ppm")).unwrap());
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["regions", "--no-such-flag"]), 2);
    assert_eq!(code(d, &["frobnicate"]), 2);
    assert_eq!(code(d, &["regions", "--purity", "1.5", "--resolution", "8x8"]), 2);
    assert_eq!(code(d, &["regions", "--window", "1,0,0,1"]), 2);
    assert_eq!(code(d, &["regions", "--resolution", "8"]), 2);
    assert_eq!(code(d, &["regions", "--plane", "--purity", "0.9"]), 2);
    assert_eq!(code(d, &["backward", "--strategy", "sideways"]), 2);
    assert_eq!(code(d, &["dimension", "--purity", "1", "--resolution", "32x32", "--scales", "2,4,16"]), 2);
    fs::write(d.join("bad.cfg"), "colour=red\n").unwrap();
    assert_eq!(code(d, &["cycles", "--config", "bad.cfg"]), 2);
    assert_eq!(code(d, &["cycles", "--config", "missing.cfg"]), 2);
    // A patch inside one basin has no border to measure.
    assert_eq!(code(d, &["dimension", "--purity", "1", "--window", "-0.01,0.01,-0.01,0.01", "--resolution", "64x64"]), 3);
    assert_eq!(code(d, &["julia", "--depth", "21"]), 2);
    assert_eq!(code(d, &["--help"]), 0);
}

#[test]
fn failed_runs_leave_no_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(d, &["dimension", "--purity", "1", "--window", "-0.01,0.01,-0.01,0.01", "--resolution", "64x64", "--out", "x.csv"]), 3);
    assert_eq!(code(d, &["julia", "--depth", "2", "--out", "nowhere/j.csv"]), 1);
    assert_eq!(fs::read_dir(d).unwrap().count(), 0);
}

#[test]
fn cycles_table() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["cycles", "--out", "c.csv"]);
    let rows = csv_rows(dir.path().join("c.csv"));
    assert_eq!(rows.len(), 8);
    let names: Vec<&str> = rows[1..].iter().map(|r| r[0].as_str()).collect();
    assert_eq!(names, ["C0", "C1", "C2", "C3", "C4", "C5", "C6"]);
    let stability: Vec<&str> = rows[1..].iter().map(|r| r[10].as_str()).collect();
    assert_eq!(&stability[..5], ["attractive", "repelling", "saddle", "attractive", "saddle"]);
    for r in &rows[1..] {
        assert!(r[14].parse::<f64>().unwrap() < 1e-10);
    }
    let c1_u: f64 = rows[2][2].parse().unwrap();
    assert!((c1_u - 0.639).abs() < 1e-3);
}

#[test]
fn dimension_tables() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["dimension", "--purity", "1", "--resolution", "128x128", "--out", "one.csv"]);
    let rows = csv_rows(dir.path().join("one.csv"));
    assert_eq!(rows[0], ["kind", "scale", "count", "dimension", "r_squared", "border_pixels"]);
    let boxes: Vec<_> = rows.iter().filter(|r| r[0] == "box").collect();
    assert_eq!(boxes.iter().map(|r| r[1].as_str()).collect::<Vec<_>>(), ["2", "4", "8", "16"]);
    let fit = rows.last().unwrap();
    assert_eq!(fit[0], "fit");
    let d: f64 = fit[3].parse().unwrap();
    assert!(d > 1.2 && d < 1.8);

    let sweep = ["dimension", "--sweep", "0.8,1.0,0.05", "--resolution", "64x64", "--out", "s.csv"];
    ok(dir.path(), &sweep);
    let rows = csv_rows(dir.path().join("s.csv"));
    assert_eq!(rows.len(), 1 + 5 + 1);
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.8);
    assert_eq!(rows[1][5], "64x64");
    assert_eq!(rows[6][0], "transition_estimate");
    let first = fs::read(dir.path().join("s.csv")).unwrap();
    ok(dir.path(), &sweep);
    assert_eq!(first, fs::read(dir.path().join("s.csv")).unwrap());
    let cfg = fs::read_to_string(dir.path().join("s.cfg")).unwrap();
    assert!(cfg.contains("window-policy=axis\n") && cfg.contains("half-width=0.0001\n"));

    assert_eq!(code(dir.path(), &["dimension", "--window", "-1,1,-1,1", "--resolution", "64x64"]), 2);
    ok(dir.path(), &["dimension", "--sweep", "0.9,1.0,0.05", "--window-policy", "fixed", "--resolution", "64x64", "--out", "f.csv"]);
}

#[test]
fn backward_julia_and_trace_tables() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["backward", "--depth", "3", "--steps", "5", "--out", "b.csv"]);
    let rows = csv_rows(dir.path().join("b.csv"));
    assert_eq!(rows[0], ["strategy", "orbit", "step", "u", "v", "w", "purity"]);
    assert_eq!(rows.len(), 1 + 3 * 8 * 6);
    let cfg = fs::read_to_string(dir.path().join("b.cfg")).unwrap();
    assert!(cfg.contains("rng=ChaCha8\n") && cfg.contains("strategy=plus,minus,random\n"));

    ok(dir.path(), &["julia", "--depth", "3", "--out", "j.csv"]);
    let rows = csv_rows(dir.path().join("j.csv"));
    assert_eq!(rows.len(), 1 + 8);
    for r in &rows[1..] {
        let (u, v, w): (f64, f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap(), r[5].parse().unwrap());
        assert!(((u * u + v * v + w * w) - 1.0).abs() < 1e-12);
    }

    let t = ["trace", "--resolution", "96x96", "--depth", "6", "--plane-seeds", "16", "--out", "t.ppm"];
    let out = ok(dir.path(), &t);
    assert!(String::from_utf8_lossy(&out.stdout).contains("within 2 px"));
    let img = read_ppm(&fs::read(dir.path().join("t.ppm")).unwrap()).unwrap();
    assert_eq!((img.width, img.height), (96, 96));
    let rows = csv_rows(dir.path().join("t.csv"));
    assert_eq!(rows[0][0], "family");
    assert!(rows[1..].iter().any(|r| r[0] == "plane"));
    let first = files(dir.path(), &["t.ppm", "t.csv", "t.cfg"]);
    ok(dir.path(), &t);
    assert_eq!(first, files(dir.path(), &["t.ppm", "t.csv", "t.cfg"]));
}

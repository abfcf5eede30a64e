use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use image::{GrayImage, Luma};
use serde_json::Value;
use tempfile::TempDir;

const DICHROIC: [&str; 6] = ["-K", "11", "-s", "0.40625", "-p", "0.3671875"];

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_spectral-pu"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = cli(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn dir_arg(dir: &Path) -> &str {
    dir.to_str().unwrap()
}

fn manifest(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("manifest.json")).unwrap()).unwrap()
}

fn error_line(out: &Output) -> Value {
    let stderr = String::from_utf8(out.stderr.clone()).unwrap();
    assert_eq!(stderr.trim_end().lines().count(), 1, "{stderr}");
    serde_json::from_str(stderr.trim_end()).unwrap()
}

#[test]
fn basis_reports_metrics_and_writes_documents() {
    let tmp = TempDir::new().unwrap();
    let stdout = ok(&[
        "basis",
        "-K",
        "7",
        "-s",
        "0.66",
        "-p",
        "0.39",
        "-o",
        dir_arg(tmp.path()),
    ]);
    assert!(stdout.contains("excess_area"));
    let smooth: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("smoothness_nm = "))
        .unwrap()
        .parse()
        .unwrap();
    assert!(smooth >= 20.0);
    let gamut = fs::read_to_string(tmp.path().join("gamut.csv")).unwrap();
    assert_eq!(gamut.lines().count(), 8);
    let doc: Value = serde_json::from_str(&fs::read_to_string(tmp.path().join("basis.json")).unwrap()).unwrap();
    assert_eq!(doc["count"], 7);
    let m = manifest(tmp.path());
    assert_eq!(m["command"], "basis");
    assert_eq!(m["parameters"]["bases"], 7);
    assert_eq!(m["outputs"].as_array().unwrap().len(), 2);
}

#[test]
fn too_few_bases_is_a_usage_error() {
    let tmp = TempDir::new().unwrap();
    let out = cli(&["basis", "-K", "2", "-o", dir_arg(tmp.path())]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_line(&out)["error"], "usage");

    let out = cli(&["basis", "--strength", "0.3"]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(error_line(&out)["exit_code"], 2);
}

#[test]
fn basis_output_is_byte_identical_across_runs() {
    let (a, b) = (TempDir::new().unwrap(), TempDir::new().unwrap());
    for dir in [&a, &b] {
        ok(&[
            "basis",
            "-K",
            "9",
            "-s",
            "0.5",
            "-p",
            "0.4",
            "--illuminant",
            "D65",
            "-o",
            dir_arg(dir.path()),
        ]);
    }
    for name in ["basis.json", "gamut.csv"] {
        assert_eq!(
            fs::read(a.path().join(name)).unwrap(),
            fs::read(b.path().join(name)).unwrap()
        );
    }
}

#[test]
fn optimize_single_cell_and_both_directions() {
    let tmp = TempDir::new().unwrap();
    let one = tmp.path().join("one");
    ok(&["optimize", "-K", "7", "--grid", "1", "-o", dir_arg(&one)]);
    let csv = fs::read_to_string(one.join("metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 2);
    let m = manifest(&one);
    assert_eq!(m["result"]["s"], 0.0);
    assert_eq!(m["result"]["p"], 0.5);

    let at_least = tmp.path().join("at-least");
    let below = tmp.path().join("below");
    ok(&[
        "optimize",
        "-K",
        "7",
        "--grid",
        "4",
        "--direction",
        "at-least",
        "-o",
        dir_arg(&at_least),
    ]);
    ok(&[
        "optimize",
        "-K",
        "7",
        "--grid",
        "4",
        "--direction",
        "below",
        "-o",
        dir_arg(&below),
    ]);
    assert!(manifest(&at_least)["result"]["smoothness_nm"].as_f64().unwrap() >= 20.0);
    assert!(manifest(&below)["result"]["smoothness_nm"].as_f64().unwrap() < 20.0);

    let out = cli(&["optimize", "-K", "7", "--direction", "sideways"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn yellow_target_sample_reports_achieving_fraction_and_timing() {
    let tmp = TempDir::new().unwrap();
    let basis_dir = tmp.path().join("basis");
    ok(&["basis", "-K", "5", "--offset", "0", "-o", dir_arg(&basis_dir)]);
    let basis = basis_dir.join("basis.json");
    let out = tmp.path().join("sample");
    let stdout = ok(&[
        "sample",
        "--basis",
        basis.to_str().unwrap(),
        "--cx",
        "0.41",
        "--cy",
        "0.42",
        "-Y",
        "0.57",
        "-n",
        "1000",
        "--batch",
        "250",
        "--seed",
        "4",
        "-o",
        dir_arg(&out),
    ]);
    assert_eq!(stdout.lines().filter(|l| l.starts_with("timing batch")).count(), 4);
    let fraction: f64 = stdout
        .lines()
        .find_map(|l| l.strip_prefix("achieving fraction "))
        .and_then(|l| l.split_whitespace().next())
        .unwrap()
        .parse()
        .unwrap();
    assert!(fraction > 0.0 && fraction < 1.0);

    let samples = fs::read_to_string(out.join("samples.csv")).unwrap();
    assert_eq!(samples.lines().count(), 1001);
    let spectra = fs::read_to_string(out.join("spectra.csv")).unwrap();
    assert_eq!(spectra.lines().next().unwrap().split(',').count(), 1001);
    assert_eq!(spectra.lines().count(), 317);
    let m = manifest(&out);
    assert_eq!(m["seed"], 4);
    assert_eq!(m["inputs"][0], basis.to_str().unwrap());
    assert_eq!(
        m["timings"]
            .as_array()
            .unwrap()
            .iter()
            .filter(|t| t["phase"].as_str().unwrap().starts_with("sample batch"))
            .count(),
        4
    );
}

#[test]
fn sampling_is_seed_reproducible_and_replayable() {
    let tmp = TempDir::new().unwrap();
    let args = |dir: &Path| -> Vec<String> {
        [
            "sample", "-K", "7", "-s", "0.66", "-p", "0.39", "--cx", "0.35", "--cy", "0.4", "-Y", "0.3", "-n", "64",
            "--seed", "9", "-o",
        ]
        .iter()
        .map(|s| s.to_string())
        .chain([dir.to_str().unwrap().to_string()])
        .collect()
    };
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let owned = args(dir);
        ok(&owned.iter().map(String::as_str).collect::<Vec<_>>());
    }
    let replayed = tmp.path().join("replayed");
    ok(&[
        "replay",
        a.join("manifest.json").to_str().unwrap(),
        "-o",
        dir_arg(&replayed),
    ]);
    for name in ["samples.csv", "spectra.csv"] {
        let first = fs::read(a.join(name)).unwrap();
        assert_eq!(first, fs::read(b.join(name)).unwrap());
        assert_eq!(first, fs::read(replayed.join(name)).unwrap());
    }
    assert_eq!(manifest(&replayed)["parameters"]["out"], dir_arg(&replayed));
}

#[test]
fn out_of_gamut_target_exits_3() {
    let tmp = TempDir::new().unwrap();
    let out = cli(&[
        "sample",
        "-K",
        "5",
        "--cx",
        "0.1",
        "--cy",
        "0.8",
        "-Y",
        "0.2",
        "-o",
        dir_arg(tmp.path()),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let line = error_line(&out);
    assert_eq!(line["error"], "out_of_gamut");
    assert!(line["message"].as_str().unwrap().contains("outside the basis gamut"));
}

#[test]
fn missing_input_file_exits_4() {
    let tmp = TempDir::new().unwrap();
    let missing = tmp.path().join("nope.json");
    let out = cli(&[
        "sample",
        "--basis",
        missing.to_str().unwrap(),
        "--cx",
        "0.3",
        "--cy",
        "0.3",
        "-Y",
        "0.2",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(error_line(&out)["error"], "io");
}

#[test]
fn dichroic_trajectory_passes_through_the_target_at_unit_depth() {
    let tmp = TempDir::new().unwrap();
    let sample_dir = tmp.path().join("sample");
    let mut args = vec!["sample"];
    args.extend(DICHROIC);
    args.extend([
        "--cx",
        "0.38",
        "--cy",
        "0.45",
        "-Y",
        "0.46",
        "-n",
        "20",
        "--seed",
        "2",
        "-o",
        dir_arg(&sample_dir),
    ]);
    ok(&args);

    let samples = sample_dir.join("samples.csv");
    let out = tmp.path().join("trajectory");
    let mut args = vec!["trajectory"];
    args.extend(DICHROIC);
    args.extend([
        "--samples",
        samples.to_str().unwrap(),
        "--row",
        "5",
        "-o",
        dir_arg(&out),
    ]);
    ok(&args);

    let csv = fs::read_to_string(out.join("trajectory.csv")).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    let col = |name: &str| header.iter().position(|h| *h == name).unwrap();
    let row: Vec<&str> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .find(|r| r[col("d")].parse::<f64>().unwrap() == 1.0)
        .unwrap();
    let x: f64 = row[col("x")].parse().unwrap();
    let y: f64 = row[col("y")].parse().unwrap();
    assert!((x - 0.38).abs() < 1e-6 && (y - 0.45).abs() < 1e-6, "({x}, {y})");
    assert!(out.join("spectrum.csv").exists());

    let out = cli(&[
        "trajectory",
        "-K",
        "5",
        "--weights",
        "0.5,0.5",
        "-o",
        dir_arg(&tmp.path().join("bad")),
    ]);
    assert_eq!(out.status.code(), Some(2));
}

fn palette(dir: &Path, luminance: &str, count: &str, extra: &[&str]) -> Value {
    let mut args = vec![
        "palette", "-K", "7", "--first", "D65", "--second", "F2", "-Y", luminance, "-n", count, "--seed", "5",
    ];
    args.extend(extra);
    args.extend(["-o", dir_arg(dir)]);
    ok(&args);
    serde_json::from_str(&fs::read_to_string(dir.join("palette.json")).unwrap()).unwrap()
}

#[test]
fn white_palette_emits_32_entries() {
    let tmp = TempDir::new().unwrap();
    let doc = palette(tmp.path(), "0.8", "32", &[]);
    let entries = doc["entries"].as_array().unwrap();
    assert_eq!(entries.len(), 32);
    for e in entries {
        assert!((e["color_under_first"]["y"].as_f64().unwrap() - 0.8).abs() < 1e-6);
    }
    let csv = fs::read_to_string(tmp.path().join("palette.csv")).unwrap();
    assert_eq!(csv.lines().count(), 33);
    assert_eq!(manifest(tmp.path())["result"]["entries"], 32);
}

#[test]
fn hide_with_an_all_white_mask_gives_uniform_images() {
    let tmp = TempDir::new().unwrap();
    let pal = tmp.path().join("palette");
    palette(&pal, "0.4", "64", &["--keep-unmet"]);
    let mask = tmp.path().join("mask.png");
    GrayImage::from_pixel(24, 16, Luma([255])).save(&mask).unwrap();
    let out = tmp.path().join("hide");
    ok(&[
        "hide",
        "--palette",
        pal.join("palette.json").to_str().unwrap(),
        "--mask",
        mask.to_str().unwrap(),
        "-o",
        dir_arg(&out),
    ]);
    for name in ["first.png", "second.png"] {
        let img = image::open(out.join(name)).unwrap().to_rgb8();
        assert_eq!(img.dimensions(), (24, 16));
        let first = *img.get_pixel(0, 0);
        assert!(img.pixels().all(|p| *p == first), "{name}");
    }
}

#[test]
fn hidden_pattern_and_image_are_replayable() {
    let tmp = TempDir::new().unwrap();
    let pal = tmp.path().join("palette");
    palette(&pal, "0.3", "128", &["--keep-unmet"]);
    let palette_path = pal.join("palette.json");

    let mask = tmp.path().join("mask.png");
    GrayImage::from_fn(32, 32, |x, y| {
        Luma([if (x as i32 - 16).pow(2) + (y as i32 - 16).pow(2) < 100 {
            255
        } else {
            0
        }])
    })
    .save(&mask)
    .unwrap();
    let pattern = tmp.path().join("pattern");
    ok(&[
        "hide",
        "--palette",
        palette_path.to_str().unwrap(),
        "--mask",
        mask.to_str().unwrap(),
        "-o",
        dir_arg(&pattern),
    ]);
    let result = &manifest(&pattern)["result"];
    assert!(result["difference_first"].as_f64().unwrap() < 1.0);
    assert!(result["difference_second"].as_f64().unwrap() > result["difference_first"].as_f64().unwrap());

    let gray = tmp.path().join("gray.png");
    GrayImage::from_fn(64, 8, |x, _| Luma([(x * 4) as u8]))
        .save(&gray)
        .unwrap();
    let image_dir = tmp.path().join("image");
    ok(&[
        "hide",
        "--palette",
        palette_path.to_str().unwrap(),
        "--gray",
        gray.to_str().unwrap(),
        "-o",
        dir_arg(&image_dir),
    ]);

    for dir in [&pattern, &image_dir] {
        let again = dir.with_extension("again");
        ok(&[
            "replay",
            dir.join("manifest.json").to_str().unwrap(),
            "-o",
            dir_arg(&again),
        ]);
        for name in ["first.png", "second.png"] {
            assert_eq!(fs::read(dir.join(name)).unwrap(), fs::read(again.join(name)).unwrap());
        }
    }

    let out = cli(&["hide", "--palette", palette_path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

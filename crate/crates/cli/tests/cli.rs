//! Behavioural tests for the `ftcal` binary: file layout of the synthetic
//! presets, the layering of config file and flags, and the exit-code
//! contract documented in `error.rs`.

mod util;

use std::fs;
use std::path::{Path, PathBuf};

use util::{assert_exit, ftcal, path_args, read_json, stderr, stdout_json, synth};

const CSV_HEADER: &str = "t,r1,r2,r3,r4,r5,r6,ax,ay,az";

/// Run the calibration half of the pipeline (offset + calibrate on
/// dataset1–4) and return all eight CSV paths plus the calibration report.
fn calibrated(dir: &Path) -> (Vec<PathBuf>, PathBuf) {
    let files = synth(dir, "paper", 1, 0.0);
    let offset_path = dir.join("offset.json");
    let mut args = vec!["offset".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend(["--sg-window".into(), "0".into(), "--out".into()]);
    args.push(offset_path.to_str().unwrap().into());
    assert_exit(&ftcal(&args), 0);

    let calib_path = dir.join("calibration.json");
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend(["--offset-report".into(), offset_path.to_str().unwrap().into()]);
    args.extend(["--sg-window".into(), "0".into(), "--out".into()]);
    args.push(calib_path.to_str().unwrap().into());
    assert_exit(&ftcal(&args), 0);
    (files, calib_path)
}

fn write_log(path: &Path, rows: &[(f64, [f64; 6], [f64; 3])]) {
    let mut text = format!("{CSV_HEADER}\n");
    for (t, r, a) in rows {
        text.push_str(&format!(
            "{t},{},{},{},{}\n",
            r.map(|v| v.to_string()).join(","),
            a[0],
            a[1],
            a[2]
        ));
    }
    fs::write(path, text).unwrap();
}

// ── synth ────────────────────────────────────────────────────────────────

#[test]
fn synth_writes_the_documented_files_deterministically() {
    let tmp = tempfile::tempdir().unwrap();
    let a = tmp.path().join("a");
    let files = synth(&a, "paper", 0, 0.0);

    for (i, csv) in files.iter().enumerate() {
        assert!(csv.is_file(), "missing {}", csv.display());
        let text = fs::read_to_string(csv).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        assert_eq!(lines.count(), 50, "dataset{} sample count", i + 1);
        assert!(csv.with_extension("meta").is_file(), "missing sidecar for dataset{}", i + 1);
    }

    // dataset1 and dataset7 are the empty-plate recordings; the rest carry
    // the 0.51 kg bottle at varying positions.
    for (index, mass) in [(1, "0"), (2, "0.51"), (7, "0")] {
        let meta = fs::read_to_string(a.join(format!("dataset{index}.meta"))).unwrap();
        assert!(
            meta.lines().any(|l| l == format!("mass_kg={mass}")),
            "dataset{index}.meta should declare mass_kg={mass}, got:\n{meta}"
        );
    }

    let truth = read_json(&a.join("ground_truth.json"));
    assert_eq!(truth["schema"], "ftcal/ground-truth/v1");
    assert_eq!(truth["preset"], "paper");
    assert_eq!(truth["seed"], 0);
    assert_eq!(truth["c"].as_array().unwrap().len(), 6);
    assert_eq!(truth["offset"].as_array().unwrap().len(), 6);
    assert!(truth["note"].as_str().unwrap().contains("synthetic"));

    // Same seed, fresh directory: every artefact byte-identical.
    let b = tmp.path().join("b");
    synth(&b, "paper", 0, 0.0);
    let mut names: Vec<String> =
        (1..=8).flat_map(|i| [format!("dataset{i}.csv"), format!("dataset{i}.meta")]).collect();
    names.push("ground_truth.json".into());
    for name in names {
        assert_eq!(
            fs::read(a.join(&name)).unwrap(),
            fs::read(b.join(&name)).unwrap(),
            "{name} differs between reruns"
        );
    }
}

// ── ingest failures ──────────────────────────────────────────────────────

#[test]
fn malformed_and_degenerate_logs_map_to_their_exit_codes() {
    let tmp = tempfile::tempdir().unwrap();
    let g = 9.80665;

    // A non-numeric cell: parse error with file and line, exit 3.
    let bad = tmp.path().join("bad.csv");
    fs::write(
        &bad,
        format!("{CSV_HEADER}\n0,1,2,3,4,5,6,0,0,-{g}\n0.01,1,2,oops,4,5,6,0,0,-{g}\n"),
    )
    .unwrap();
    let out = ftcal(["offset", bad.to_str().unwrap(), "--sg-window", "0"]);
    assert_exit(&out, 3);
    assert!(stderr(&out).contains("bad.csv:3:"), "stderr: {}", stderr(&out));
    assert!(stderr(&out).contains("r3"), "stderr: {}", stderr(&out));

    // Every sample in the same orientation: the readings have no 3-D span,
    // exit 5.
    let flat = tmp.path().join("flat.csv");
    let rows: Vec<_> =
        (0..6).map(|i| (i as f64 * 0.01, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0], [0.0, 0.0, -g])).collect();
    write_log(&flat, &rows);
    let out = ftcal(["offset", flat.to_str().unwrap(), "--sg-window", "0"]);
    assert_exit(&out, 5);
    assert!(stderr(&out).contains("span"), "stderr: {}", stderr(&out));

    // Accelerometer norms nowhere near gravity: every sample is screened
    // out, exit 1.
    let weightless = tmp.path().join("weightless.csv");
    let rows: Vec<_> = (0..6)
        .map(|i| (i as f64 * 0.01, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0], [0.0, 0.0, -0.5]))
        .collect();
    write_log(&weightless, &rows);
    let out = ftcal(["offset", weightless.to_str().unwrap(), "--sg-window", "0"]);
    assert_exit(&out, 1);
    assert!(stderr(&out).contains("no samples left"), "stderr: {}", stderr(&out));

    // The default 301-sample smoothing window cannot fit a 50-sample log.
    let short = synth(&tmp.path().join("s"), "paper", 3, 0.0);
    let out = ftcal(["offset", short[0].to_str().unwrap()]);
    assert_exit(&out, 1);
    assert!(stderr(&out).contains("shorter than filter window"), "stderr: {}", stderr(&out));
}

// ── config layering ──────────────────────────────────────────────────────

#[test]
fn config_file_and_flags_layer_correctly() {
    let tmp = tempfile::tempdir().unwrap();
    let files = synth(&tmp.path().join("d"), "paper", 2, 0.0);
    let logs = path_args(&files[..4]);

    // A config file can switch smoothing off; the result matches the flag.
    let conf = tmp.path().join("ftcal.conf");
    fs::write(&conf, "# lab defaults\nsg_window = 0\n").unwrap();
    let mut with_config =
        vec!["--config".to_string(), conf.to_str().unwrap().into(), "offset".into()];
    with_config.extend(logs.clone());
    let via_config = ftcal(&with_config);
    assert_exit(&via_config, 0);

    let mut with_flag = vec!["offset".to_string()];
    with_flag.extend(logs.clone());
    with_flag.extend(["--sg-window".into(), "0".into()]);
    let via_flag = ftcal(&with_flag);
    assert_exit(&via_flag, 0);
    assert_eq!(via_config.stdout, via_flag.stdout);

    // Flags outrank the file: the file's impossible window is overridden.
    fs::write(&conf, "sg_window = 301\n").unwrap();
    let mut both = vec!["--config".to_string(), conf.to_str().unwrap().into(), "offset".into()];
    both.extend(logs.clone());
    both.extend(["--sg-window".into(), "0".into()]);
    assert_exit(&ftcal(&both), 0);

    // Unknown keys are refused with the offending location, exit 2.
    fs::write(&conf, "smoothing = 5\n").unwrap();
    let mut unknown = vec!["--config".to_string(), conf.to_str().unwrap().into(), "offset".into()];
    unknown.extend(logs.clone());
    let out = ftcal(&unknown);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("ftcal.conf:1:"), "stderr: {}", stderr(&out));

    // Invalid flag values are usage errors too.
    let mut even = vec!["offset".to_string()];
    even.extend(logs);
    even.extend(["--sg-window".into(), "6".into()]);
    let out = ftcal(&even);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("odd"), "stderr: {}", stderr(&out));
}

// ── calibrate ────────────────────────────────────────────────────────────

#[test]
fn calibrate_enforces_offset_source_and_identifiability() {
    let tmp = tempfile::tempdir().unwrap();
    let files = synth(tmp.path(), "paper", 4, 0.0);
    let zero_offset = ["--offset", "0,0,0,0,0,0", "--sg-window", "0"];

    // No offset source at all: usage error.
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend(["--sg-window".into(), "0".into()]);
    let out = ftcal(&args);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("offset is required"), "stderr: {}", stderr(&out));

    // Two datasets can never pin down all forty unknowns.
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[1..3]));
    args.extend(zero_offset.map(String::from));
    let out = ftcal(&args);
    assert_exit(&out, 4);
    assert!(stderr(&out).contains("at least 3 datasets"), "stderr: {}", stderr(&out));

    // Three copies of the same load are just as unidentifiable.
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&[files[1].clone(), files[1].clone(), files[1].clone()]));
    args.extend(zero_offset.map(String::from));
    let out = ftcal(&args);
    assert_exit(&out, 4);
    assert!(stderr(&out).contains("identical"), "stderr: {}", stderr(&out));

    // Calibration refuses logs without an added-mass sidecar.
    let orphan = tmp.path().join("orphan.csv");
    fs::copy(&files[1], &orphan).unwrap();
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[..3]));
    args.push(orphan.to_str().unwrap().into());
    args.extend(zero_offset.map(String::from));
    let out = ftcal(&args);
    assert_exit(&out, 3);
    assert!(stderr(&out).contains("sidecar"), "stderr: {}", stderr(&out));
}

#[test]
fn ill_conditioned_solves_need_force() {
    let tmp = tempfile::tempdir().unwrap();
    let (files, _) = calibrated(tmp.path());
    let offset_json = tmp.path().join("offset.json");

    // With the warning threshold forced to 1, every solve is "ill
    // conditioned"; without --force that is a refusal.
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend([
        "--offset-report".into(),
        offset_json.to_str().unwrap().into(),
        "--sg-window".into(),
        "0".into(),
        "--condition-warning".into(),
        "1.0".into(),
    ]);
    let out = ftcal(&args);
    assert_exit(&out, 6);
    assert!(stderr(&out).contains("--force"), "stderr: {}", stderr(&out));

    args.push("--force".into());
    let out = ftcal(&args);
    assert_exit(&out, 0);
    let report = stdout_json(&out);
    assert_eq!(report["ill_conditioned"], true);
    assert_eq!(report["forced"], true);
    let warnings = report["warnings"].as_array().unwrap();
    assert!(warnings.iter().any(|w| w.as_str().unwrap().contains("--force")));
}

// ── validate ─────────────────────────────────────────────────────────────

#[test]
fn validate_argument_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let (files, calib) = calibrated(tmp.path());
    let held_out = path_args(&files[4..]);
    let base: Vec<String> = vec![
        "validate".into(),
        "--calibration".into(),
        calib.to_str().unwrap().into(),
        "--sg-window".into(),
        "0".into(),
    ];

    // Missing required --calibration flag is a clap usage error.
    let mut args = vec!["validate".to_string()];
    args.extend(held_out.clone());
    let out = ftcal(&args);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("--calibration"), "stderr: {}", stderr(&out));

    // A baseline label that matches nothing lists what is available.
    let mut args = base.clone();
    args.extend(held_out.clone());
    args.extend(["--baseline".into(), "bogus".into()]);
    let out = ftcal(&args);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("dataset5"), "stderr: {}", stderr(&out));

    // Two zero-mass datasets: the baseline must be named explicitly.
    let mut args = base.clone();
    args.push(files[0].to_str().unwrap().into());
    args.extend(held_out.clone());
    let out = ftcal(&args);
    assert_exit(&out, 2);
    assert!(stderr(&out).contains("--baseline"), "stderr: {}", stderr(&out));

    // …and naming it resolves the ambiguity.
    let mut args = base.clone();
    args.push(files[0].to_str().unwrap().into());
    args.extend(held_out);
    args.extend(["--baseline".into(), "dataset7".into()]);
    assert_exit(&ftcal(&args), 0);
}

// ── output formats ───────────────────────────────────────────────────────

#[test]
fn text_format_renders_tables_and_out_still_writes_json() {
    let tmp = tempfile::tempdir().unwrap();
    let (files, calib) = calibrated(tmp.path());

    let mut args = vec!["offset".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend(["--sg-window".into(), "0".into(), "--format".into(), "text".into()]);
    let out = ftcal(&args);
    assert_exit(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("offset estimate (raw units)"), "stdout: {text}");
    assert!(!text.starts_with('{'), "expected a table, got JSON");

    let report_path = tmp.path().join("calib_text.json");
    let mut args = vec!["calibrate".to_string()];
    args.extend(path_args(&files[..4]));
    args.extend([
        "--offset-report".into(),
        tmp.path().join("offset.json").to_str().unwrap().into(),
        "--sg-window".into(),
        "0".into(),
        "--format".into(),
        "text".into(),
        "--out".into(),
        report_path.to_str().unwrap().into(),
    ]);
    let out = ftcal(&args);
    assert_exit(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("calibration matrix C"), "stdout: {text}");
    // --out always receives the JSON document, whatever stdout shows.
    assert_eq!(read_json(&report_path)["schema"], "ftcal/calibration-report/v1");

    let mut args = vec![
        "validate".to_string(),
        "--calibration".into(),
        calib.to_str().unwrap().into(),
        "--sg-window".into(),
        "0".into(),
        "--format".into(),
        "text".into(),
    ];
    args.extend(path_args(&files[4..]));
    let out = ftcal(&args);
    assert_exit(&out, 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("validation against baseline `dataset7`"), "stdout: {text}");
}

#[test]
fn points_dir_writes_per_dataset_point_clouds() {
    let tmp = tempfile::tempdir().unwrap();
    let (files, calib) = calibrated(tmp.path());
    let points = tmp.path().join("points");

    let mut args = vec![
        "validate".to_string(),
        "--calibration".into(),
        calib.to_str().unwrap().into(),
        "--sg-window".into(),
        "0".into(),
        "--points-dir".into(),
        points.to_str().unwrap().into(),
    ];
    args.extend(path_args(&files[4..]));
    assert_exit(&ftcal(&args), 0);

    for i in 5..=8 {
        for (suffix, header) in [("forces", "fx,fy,fz"), ("projected", "p1,p2,p3")] {
            let path = points.join(format!("dataset{i}_{suffix}.csv"));
            let text =
                fs::read_to_string(&path).unwrap_or_else(|_| panic!("missing {}", path.display()));
            let mut lines = text.lines();
            assert_eq!(lines.next(), Some(header), "{}", path.display());
            assert_eq!(lines.count(), 50, "{} row count", path.display());
        }
    }
}

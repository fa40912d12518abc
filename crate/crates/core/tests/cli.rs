use std::path::Path;
use std::process::{Command, Output};

fn cpjam(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cpjam"))
        .args(args)
        .current_dir(dir)
        .env_remove("CPJAM_THREADS")
        .output()
        .expect("running cpjam")
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn simulate_applies_overrides_over_file() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("sc.json"),
        r#"{"id": "file", "null_dims": 3, "blocks": 50, "seed": 4, "ofdm": {"symbols_per_block": 10}}"#,
    )
    .unwrap();
    let out = cpjam(
        &["simulate", "--scenario", "sc.json", "--jammer", "compliant", "--null-dims", "1",
          "--snr", "-2:2:2", "--blocks", "2", "--out", "res"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));

    let csv = std::fs::read_to_string(dir.path().join("res/ber.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "scenario_id,jammer_mode,null_dims,snr_db,bits,bit_errors,ber");
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("file,compliant,1,-2.0,"));
    let bits = 2 * 48 * 10 * 2 * 2;
    assert!(lines.iter().skip(1).all(|l| l.split(',').nth(4) == Some(&bits.to_string()[..])));

    let json: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("res/scenario.json")).unwrap()).unwrap();
    assert_eq!(json["null_dims"], 1);
    assert_eq!(json["blocks"], 2);
    assert_eq!(json["seed"], 4);
    assert_eq!(json["jammer"]["mode"], "compliant");
    assert_eq!(json["ofdm"]["symbols_per_block"], 10);
}

#[test]
fn config_errors_exit_nonzero_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpjam(&["simulate", "--null-dims", "8", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("cannot null 8 of 8"), "{}", stderr(&out));

    let out = cpjam(&["simulate", "--scenario", "missing.json", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("missing.json"), "{}", stderr(&out));

    let out = cpjam(&["simulate", "--jammer", "loud", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("loud"));

    let out = cpjam(&["simulate", "--snr", "0:10", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("A:B:STEP"));

    std::fs::write(dir.path().join("bad.json"), r#"{"antennas": 3}"#).unwrap();
    let out = cpjam(&["simulate", "--scenario", "bad.json", "--out", "x"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("antennas"));
}

#[test]
fn unwritable_output_is_reported() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("occupied"), "").unwrap();
    let out = cpjam(&["simulate", "--blocks", "1", "--snr", "0:0:1", "--out", "occupied"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("occupied"), "{}", stderr(&out));
}

#[test]
fn thread_count_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_cpjam"))
        .args(["analyze-rank", "--draws", "1", "--taps", "2", "--out", "r"])
        .current_dir(dir.path())
        .env("CPJAM_THREADS", "0")
        .output()
        .unwrap();
    assert!(!out.status.success());
    assert!(stderr(&out).contains("thread count"));
}

#[test]
fn analyze_rank_writes_one_row_per_layout() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpjam(
        &["analyze-rank", "--antennas", "8,2", "--taps", "1,4", "--draws", "3", "--out", "r"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(dir.path().join("r/ranks.csv")).unwrap();
    let rows: Vec<csv::StringRecord> = rdr.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 4);
    let expected = [("8", "1", "1"), ("8", "4", "4"), ("2", "1", "1"), ("2", "4", "2")];
    for (row, (b, l, r)) in rows.iter().zip(expected) {
        assert_eq!((&row[0], &row[2], &row[3]), (b, l, r));
        assert_eq!(&row[5], "3", "all draws conform for B={b} L={l}");
    }

    let out = cpjam(
        &["analyze-rank", "--antennas", "8", "--taps", "3", "--jammer-antennas", "2", "--draws", "2", "--out", "r2"],
        dir.path(),
    );
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("r2/ranks.csv")).unwrap();
    assert!(text.lines().nth(1).unwrap().starts_with("8,violating,3+3,6,2,2,"));
}

#[test]
fn fractions_subcommand_writes_statistics() {
    let dir = tempfile::tempdir().unwrap();
    let out = cpjam(&["fractions", "--blocks", "3", "--out", "f"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let mut rdr = csv::Reader::from_path(dir.path().join("f/fractions.csv")).unwrap();
    assert_eq!(rdr.headers().unwrap(), vec!["dim_index", "mean_fraction", "std_fraction"]);
    let means: Vec<f64> = rdr.records().map(|r| r.unwrap()[1].parse().unwrap()).collect();
    assert_eq!(means.len(), 8);
    assert_eq!(means.iter().filter(|&&m| m > 1e-6).count(), 4);

    let out = cpjam(&["fractions", "--blocks", "2", "--at-snr", "-3", "--energy", "--out", "g"], dir.path());
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(dir.path().join("g/fractions.csv")).unwrap();
    assert_eq!(text.lines().count(), 9);

    let out = cpjam(&["fractions", "--jammer", "none", "--out", "h"], dir.path());
    assert!(!out.status.success());
    assert!(stderr(&out).contains("needs a jammer"));
}

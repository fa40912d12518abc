//! CSV and JSON result files.
//!
//! Subcarrier and dimension indices in output files are 0-based.

use std::fs::File;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::sim::SimResult;
use super::study::RankSummary;
use crate::analysis::SingularFractionStats;
use crate::error::{Error, Result};

pub const BER_HEADER: [&str; 7] = [
    "scenario_id",
    "jammer_mode",
    "null_dims",
    "snr_db",
    "bits",
    "bit_errors",
    "ber",
];
pub const FRACTION_HEADER: [&str; 3] = ["dim_index", "mean_fraction", "std_fraction"];

/// One row of a BER file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerRow {
    pub scenario_id: String,
    pub jammer_mode: String,
    pub null_dims: usize,
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

fn create(path: &Path) -> Result<csv::Writer<File>> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    Ok(csv::WriterBuilder::new().has_headers(false).from_writer(file))
}

fn finish(mut w: csv::Writer<File>, path: &Path) -> Result<()> {
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn write_ber_csv(results: &[SimResult], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record(BER_HEADER).map_err(err)?;
    for res in results {
        for p in &res.points {
            w.serialize(BerRow {
                scenario_id: res.scenario_id.clone(),
                jammer_mode: res.jammer_mode.to_string(),
                null_dims: res.null_dims,
                snr_db: p.snr_db,
                bits: p.bits,
                bit_errors: p.bit_errors,
                ber: p.ber(),
            })
            .map_err(err)?;
        }
    }
    finish(w, path)
}

pub fn read_ber_csv(path: &Path) -> Result<Vec<BerRow>> {
    let mut r = csv::Reader::from_path(path).map_err(|e| Error::csv(path, e))?;
    r.deserialize()
        .collect::<std::result::Result<Vec<BerRow>, _>>()
        .map_err(|e| Error::csv(path, e))
}

pub fn write_fraction_csv(stats: &SingularFractionStats, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record(FRACTION_HEADER).map_err(err)?;
    for (i, (m, s)) in stats.mean.iter().zip(&stats.std).enumerate() {
        w.write_record([i.to_string(), m.to_string(), s.to_string()])
            .map_err(err)?;
    }
    finish(w, path)
}

pub fn write_rank_csv(rows: &[RankSummary], path: &Path) -> Result<()> {
    let mut w = create(path)?;
    let err = |e| Error::csv(path, e);
    w.write_record([
        "b_antennas",
        "jammer_mode",
        "taps_per_antenna",
        "expected_rank",
        "draws",
        "conforming_draws",
        "conforming_fraction",
        "subcarrier_samples",
        "conforming_samples",
        "min_rank",
        "max_rank",
    ])
    .map_err(err)?;
    for r in rows {
        let taps: Vec<String> = r.case.taps_per_antenna.iter().map(|l| l.to_string()).collect();
        w.write_record([
            r.case.b_antennas.to_string(),
            r.case.mode.to_string(),
            taps.join("+"),
            r.expected_rank.to_string(),
            r.draws.to_string(),
            r.conforming_draws.to_string(),
            r.conforming_fraction().to_string(),
            r.subcarrier_samples.to_string(),
            r.conforming_samples.to_string(),
            r.min_rank.to_string(),
            r.max_rank.to_string(),
        ])
        .map_err(err)?;
    }
    finish(w, path)
}

pub fn write_scenario_json(sc: &Scenario, path: &Path) -> Result<()> {
    std::fs::write(path, sc.to_json()? + "\n").map_err(|e| Error::io(path, e))
}

/// Writes `ber.csv`, `scenario.json` and, when given, `fractions.csv` into
/// `dir` (created if missing). Returns the written paths.
pub fn emit_results(
    sc: &Scenario,
    results: &[SimResult],
    fractions: Option<&SingularFractionStats>,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut written = Vec::new();
    let ber = dir.join("ber.csv");
    write_ber_csv(results, &ber)?;
    written.push(ber);
    let json = dir.join("scenario.json");
    write_scenario_json(sc, &json)?;
    written.push(json);
    if let Some(stats) = fractions {
        let path = dir.join("fractions.csv");
        write_fraction_csv(stats, &path)?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::sim::BerPoint;
    use crate::jammer::JammerMode;

    fn result() -> SimResult {
        SimResult {
            scenario_id: "s".into(),
            jammer_mode: JammerMode::Violating,
            null_dims: 2,
            points: vec![
                BerPoint { snr_db: -2.5, bits: 9600, bit_errors: 7, erased_subcarriers: 0 },
                BerPoint { snr_db: 4.0, bits: 19200, bit_errors: 3, erased_subcarriers: 0 },
            ],
        }
    }

    #[test]
    fn empty_result_gives_header_only() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ber.csv");
        write_ber_csv(&[], &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "scenario_id,jammer_mode,null_dims,snr_db,bits,bit_errors,ber\n");
        assert!(read_ber_csv(&path).unwrap().is_empty());
    }

    #[test]
    fn csv_round_trip_preserves_numbers() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ber.csv");
        let res = result();
        write_ber_csv(std::slice::from_ref(&res), &path).unwrap();
        let rows = read_ber_csv(&path).unwrap();
        assert_eq!(rows.len(), 2);
        for (row, p) in rows.iter().zip(&res.points) {
            assert_eq!(row.snr_db, p.snr_db);
            assert_eq!(row.bits, p.bits);
            assert_eq!(row.bit_errors, p.bit_errors);
            assert_eq!(row.ber, row.bit_errors as f64 / row.bits as f64);
            assert_eq!(row.jammer_mode, "violating");
            assert_eq!(row.null_dims, 2);
        }
    }

    #[test]
    fn fraction_file_layout() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("f.csv");
        let stats = SingularFractionStats { mean: vec![0.75, 0.25], std: vec![0.0, 0.5], samples: 2 };
        write_fraction_csv(&stats, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text, "dim_index,mean_fraction,std_fraction\n0,0.75,0\n1,0.25,0.5\n");
    }

    #[test]
    fn emit_writes_all_files() {
        let dir = tempfile::tempdir().unwrap();
        let out = dir.path().join("nested/out");
        let sc = Scenario::default().resolved().unwrap();
        let stats = SingularFractionStats { mean: vec![1.0], std: vec![0.0], samples: 1 };
        let files = emit_results(&sc, &[result()], Some(&stats), &out).unwrap();
        assert_eq!(files.len(), 3);
        let back = Scenario::from_json_file(&out.join("scenario.json")).unwrap();
        assert_eq!(back, sc);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let err = write_ber_csv(&[], Path::new("/nonexistent/dir/ber.csv")).unwrap_err();
        assert!(err.to_string().contains("/nonexistent/dir/ber.csv"));
    }
}

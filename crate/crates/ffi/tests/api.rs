use std::ffi::{CStr, CString};
use std::ptr;

use cpjam_ffi::*;

fn last_error() -> String {
    let p = cpjam_last_error();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

fn small_scenario() -> *mut CpjamScenario {
    let json = CString::new(
        r#"{"id": "ffi", "blocks": 3, "snr_grid_db": [0.0, 10.0], "ofdm": {"symbols_per_block": 10}}"#,
    )
    .unwrap();
    let mut sc = ptr::null_mut();
    assert_eq!(unsafe { cpjam_scenario_from_json(json.as_ptr(), &mut sc) }, CpjamStatus::Ok);
    sc
}

#[test]
fn simulate_and_read_points() {
    unsafe {
        let sc = small_scenario();
        assert_eq!(cpjam_scenario_set_jammer(sc, CpjamJammerMode::Compliant), CpjamStatus::Ok);
        let mut res = ptr::null_mut();
        assert_eq!(cpjam_simulate(sc, 1, &mut res), CpjamStatus::Ok);
        assert_eq!(cpjam_result_len(res), 2);
        let mut p = CpjamBerPoint { snr_db: 0.0, bits: 0, bit_errors: 0, ber: 0.0 };
        assert_eq!(cpjam_result_point(res, 1, &mut p), CpjamStatus::Ok);
        assert_eq!(p.snr_db, 10.0);
        assert_eq!(p.bits, 3 * 48 * 10 * 2 * 2);
        assert_eq!(p.ber, p.bit_errors as f64 / p.bits as f64);
        assert_eq!(cpjam_result_point(res, 2, &mut p), CpjamStatus::IndexOutOfRange);
        cpjam_result_free(res);
        cpjam_scenario_free(sc);
    }
}

#[test]
fn thread_count_does_not_change_results() {
    unsafe {
        let sc = small_scenario();
        let (mut a, mut b) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(cpjam_simulate(sc, 1, &mut a), CpjamStatus::Ok);
        assert_eq!(cpjam_simulate(sc, 2, &mut b), CpjamStatus::Ok);
        let dir = tempfile::tempdir().unwrap();
        let pa = CString::new(dir.path().join("a.csv").to_str().unwrap()).unwrap();
        let pb = CString::new(dir.path().join("b.csv").to_str().unwrap()).unwrap();
        assert_eq!(cpjam_result_write_csv(a, pa.as_ptr()), CpjamStatus::Ok);
        assert_eq!(cpjam_result_write_csv(b, pb.as_ptr()), CpjamStatus::Ok);
        let (ta, tb) = (
            std::fs::read(dir.path().join("a.csv")).unwrap(),
            std::fs::read(dir.path().join("b.csv")).unwrap(),
        );
        assert_eq!(ta, tb);
        assert!(String::from_utf8(ta).unwrap().starts_with("scenario_id,jammer_mode,null_dims"));
        cpjam_result_free(a);
        cpjam_result_free(b);
        cpjam_scenario_free(sc);
    }
}

#[test]
fn invalid_edits_are_rejected_and_leave_scenario_intact() {
    unsafe {
        let mut sc = ptr::null_mut();
        assert_eq!(cpjam_scenario_new(&mut sc), CpjamStatus::Ok);
        assert_eq!(cpjam_scenario_set_null_dims(sc, 8), CpjamStatus::Config);
        assert!(last_error().contains("null"));
        assert_eq!(cpjam_scenario_set_snr_grid(sc, ptr::null(), 0), CpjamStatus::Config);
        assert_eq!(cpjam_scenario_set_snr_grid(sc, ptr::null(), 3), CpjamStatus::NullPointer);
        assert_eq!(cpjam_scenario_set_blocks(sc, 0), CpjamStatus::Config);

        let mut json = ptr::null_mut();
        assert_eq!(cpjam_scenario_to_json(sc, &mut json), CpjamStatus::Ok);
        let text = CStr::from_ptr(json).to_str().unwrap().to_owned();
        cpjam_string_free(json);
        assert!(text.contains("\"null_dims\": 1"));
        assert!(text.contains("\"blocks\": 2000"));

        let grid = [1.0, 2.0, 3.0];
        assert_eq!(cpjam_scenario_set_snr_grid(sc, grid.as_ptr(), 3), CpjamStatus::Ok);
        assert_eq!(cpjam_scenario_set_seed(sc, 7), CpjamStatus::Ok);
        assert_eq!(cpjam_scenario_set_subspace(sc, CpjamSubspaceMode::Estimated), CpjamStatus::Ok);
        cpjam_scenario_free(sc);
    }
}

#[test]
fn parse_errors_map_to_status_codes() {
    unsafe {
        let mut sc = ptr::null_mut();
        let bad = CString::new("{not json").unwrap();
        assert_eq!(cpjam_scenario_from_json(bad.as_ptr(), &mut sc), CpjamStatus::Json);
        assert!(sc.is_null());
        let unknown = CString::new(r#"{"b_antennas": 2, "null_dims": 2}"#).unwrap();
        assert_eq!(cpjam_scenario_from_json(unknown.as_ptr(), &mut sc), CpjamStatus::Config);
        let invalid_utf8 = [0xffu8, 0xfe, 0];
        assert_eq!(
            cpjam_scenario_from_json(invalid_utf8.as_ptr().cast(), &mut sc),
            CpjamStatus::InvalidUtf8
        );
        assert_eq!(cpjam_scenario_from_json(ptr::null(), &mut sc), CpjamStatus::NullPointer);
        let missing = CString::new("/nonexistent/scenario.json").unwrap();
        assert_eq!(cpjam_scenario_from_file(missing.as_ptr(), &mut sc), CpjamStatus::Io);
        assert!(last_error().contains("/nonexistent/scenario.json"));
    }
}

#[test]
fn null_handles_are_safe() {
    unsafe {
        cpjam_scenario_free(ptr::null_mut());
        cpjam_result_free(ptr::null_mut());
        cpjam_string_free(ptr::null_mut());
        assert_eq!(cpjam_result_len(ptr::null()), 0);
        assert_eq!(cpjam_scenario_antennas(ptr::null()), 0);
        let mut res = ptr::null_mut();
        assert_eq!(cpjam_simulate(ptr::null(), 0, &mut res), CpjamStatus::NullPointer);
        assert_eq!(cpjam_result_write_csv(ptr::null(), ptr::null()), CpjamStatus::NullPointer);
    }
}

#[test]
fn rank_study_through_the_abi() {
    let taps = [3usize, 3];
    let mut out = CpjamRankSummary::default();
    unsafe {
        assert_eq!(cpjam_rank_study(8, taps.as_ptr(), 2, 4, 1, &mut out), CpjamStatus::Ok);
        assert_eq!(out.expected_rank, 6);
        assert_eq!(out.conforming_draws, 4);
        assert_eq!((out.min_rank, out.max_rank), (6, 6));
        assert_eq!(cpjam_rank_study(8, taps.as_ptr(), 2, 0, 1, &mut out), CpjamStatus::Config);
        assert_eq!(cpjam_rank_study(8, ptr::null(), 2, 4, 1, &mut out), CpjamStatus::NullPointer);
    }
}

#[test]
fn fractions_fill_caller_buffers() {
    unsafe {
        let sc = small_scenario();
        let b = cpjam_scenario_antennas(sc);
        assert_eq!(b, 8);
        let (mut mean, mut std, mut written) = (vec![0.0; b], vec![0.0; b], 0usize);
        let status = cpjam_fractions(
            sc,
            true,
            0.0,
            CpjamFractionKind::Singular,
            mean.as_mut_ptr(),
            std.as_mut_ptr(),
            b,
            &mut written,
        );
        assert_eq!(status, CpjamStatus::Ok);
        assert_eq!(written, 8);
        assert!((mean.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert_eq!(mean.iter().filter(|&&v| v > 1e-6).count(), 4);

        let status = cpjam_fractions(
            sc,
            false,
            10.0,
            CpjamFractionKind::Energy,
            mean.as_mut_ptr(),
            std.as_mut_ptr(),
            4,
            &mut written,
        );
        assert_eq!(status, CpjamStatus::BufferTooSmall);
        cpjam_scenario_free(sc);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(cpjam_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
}

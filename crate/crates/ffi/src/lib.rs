//! C ABI for `cpjam`.
//!
//! Scenarios and results are opaque heap objects created and released
//! through this interface. Every fallible call returns a [`CpjamStatus`];
//! on failure, [`cpjam_last_error`] describes the problem. Panics never
//! cross the boundary; they are reported as `CPJAM_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use cpjam::analysis::FractionKind;
use cpjam::harness::{
    fraction_study, rank_study, sweep, sweep_with_threads, write_ber_csv, RankCase, Scenario,
    SimResult, SubspaceMode,
};
use cpjam::jammer::JammerMode;
use cpjam::ofdm::OfdmConfig;

/// Outcome of an API call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpjamStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Invalid scenario or argument.
    Config = 3,
    Dimension = 4,
    Framing = 5,
    /// The requested estimate is not identifiable from the data.
    IllPosed = 6,
    Io = 7,
    Json = 8,
    /// A caller-provided buffer is too short.
    BufferTooSmall = 9,
    IndexOutOfRange = 10,
    Panic = 11,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpjamJammerMode {
    None = 0,
    Compliant = 1,
    Violating = 2,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpjamSubspaceMode {
    Genie = 0,
    Estimated = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CpjamFractionKind {
    /// `sigma_b / sum(sigma)`
    Singular = 0,
    /// `sigma_b^2 / sum(sigma^2)`
    Energy = 1,
}

/// One point of a BER curve.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CpjamBerPoint {
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub ber: f64,
}

/// Outcome of a noise-free rank study for one receiver/jammer layout.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct CpjamRankSummary {
    pub expected_rank: usize,
    pub draws: usize,
    pub conforming_draws: usize,
    pub min_rank: usize,
    pub max_rank: usize,
}

/// Opaque simulation scenario.
pub struct CpjamScenario {
    inner: Scenario,
}

/// Opaque BER sweep result.
pub struct CpjamResult {
    inner: SimResult,
}

struct Failure(CpjamStatus, String);

impl From<cpjam::Error> for Failure {
    fn from(e: cpjam::Error) -> Self {
        use cpjam::Error as E;
        let status = match &e {
            E::Dimension(_) => CpjamStatus::Dimension,
            E::Config(_) => CpjamStatus::Config,
            E::Framing(_) => CpjamStatus::Framing,
            E::IllPosed(_) => CpjamStatus::IllPosed,
            E::Io { .. } | E::Csv { .. } => CpjamStatus::Io,
            E::Json(_) => CpjamStatus::Json,
        };
        Failure(status, e.to_string())
    }
}

type FfiResult<T> = Result<T, Failure>;

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> FfiResult<()>) -> CpjamStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CpjamStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_last_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CpjamStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(CpjamStatus::NullPointer, format!("{what} is null"))
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn borrow_mut<'a, T>(p: *mut T, what: &str) -> FfiResult<&'a mut T> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn string<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|e| Failure(CpjamStatus::InvalidUtf8, format!("{what}: {e}")))
}

unsafe fn slice<'a, T>(p: *const T, len: usize, what: &str) -> FfiResult<&'a [T]> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(null(what));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> FfiResult<()> {
    let out = borrow_mut(out, "output pointer")?;
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Message of the last failed call on this thread, or NULL. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cpjam_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cpjam_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Creates a scenario with default settings. Release it with
/// [`cpjam_scenario_free`].
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_new(out: *mut *mut CpjamScenario) -> CpjamStatus {
    guard(|| {
        let inner = Scenario::default().resolved()?;
        write_out(out, CpjamScenario { inner })
    })
}

/// Parses a JSON scenario; missing fields take default values.
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_from_json(
    json: *const c_char,
    out: *mut *mut CpjamScenario,
) -> CpjamStatus {
    guard(|| {
        let inner = Scenario::from_json_str(string(json, "json")?)?;
        write_out(out, CpjamScenario { inner })
    })
}

/// Reads a JSON scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_from_file(
    path: *const c_char,
    out: *mut *mut CpjamScenario,
) -> CpjamStatus {
    guard(|| {
        let path = PathBuf::from(string(path, "path")?);
        let inner = Scenario::from_json_file(&path)?;
        write_out(out, CpjamScenario { inner })
    })
}

/// # Safety
/// `sc` must be NULL or a scenario returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_free(sc: *mut CpjamScenario) {
    if !sc.is_null() {
        drop(Box::from_raw(sc));
    }
}

/// Applies `edit` to a copy and keeps it only if the result validates.
unsafe fn edit_scenario(
    sc: *mut CpjamScenario,
    edit: impl FnOnce(&mut Scenario) -> FfiResult<()>,
) -> CpjamStatus {
    guard(|| {
        let sc = borrow_mut(sc, "scenario")?;
        let mut next = sc.inner.clone();
        edit(&mut next)?;
        next.validate()?;
        sc.inner = next;
        Ok(())
    })
}

/// Switches the jammer type; tap counts default to the scenario's jammer tap count.
///
/// # Safety
/// `sc` must be a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_jammer(
    sc: *mut CpjamScenario,
    mode: CpjamJammerMode,
) -> CpjamStatus {
    let mode = match mode {
        CpjamJammerMode::None => JammerMode::None,
        CpjamJammerMode::Compliant => JammerMode::Compliant,
        CpjamJammerMode::Violating => JammerMode::Violating,
    };
    edit_scenario(sc, |s| {
        *s = s.clone().with_jammer_mode(mode);
        Ok(())
    })
}

/// # Safety
/// `sc` must be a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_null_dims(
    sc: *mut CpjamScenario,
    null_dims: usize,
) -> CpjamStatus {
    edit_scenario(sc, |s| {
        s.null_dims = null_dims;
        Ok(())
    })
}

/// # Safety
/// `sc` must be a valid scenario and `snr_db` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_snr_grid(
    sc: *mut CpjamScenario,
    snr_db: *const f64,
    len: usize,
) -> CpjamStatus {
    edit_scenario(sc, |s| {
        s.snr_grid_db = slice(snr_db, len, "snr_db")?.to_vec();
        Ok(())
    })
}

/// # Safety
/// `sc` must be a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_blocks(sc: *mut CpjamScenario, blocks: u64) -> CpjamStatus {
    edit_scenario(sc, |s| {
        s.blocks = blocks;
        Ok(())
    })
}

/// # Safety
/// `sc` must be a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_seed(sc: *mut CpjamScenario, seed: u64) -> CpjamStatus {
    edit_scenario(sc, |s| {
        s.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `sc` must be a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_set_subspace(
    sc: *mut CpjamScenario,
    mode: CpjamSubspaceMode,
) -> CpjamStatus {
    let mode = match mode {
        CpjamSubspaceMode::Genie => SubspaceMode::Genie,
        CpjamSubspaceMode::Estimated => SubspaceMode::Estimated,
    };
    edit_scenario(sc, |s| {
        s.subspace_mode = mode;
        Ok(())
    })
}

/// Receive antenna count of the scenario, or 0 for a NULL scenario.
///
/// # Safety
/// `sc` must be NULL or a valid scenario.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_antennas(sc: *const CpjamScenario) -> usize {
    sc.as_ref().map_or(0, |s| s.inner.b_antennas)
}

/// Serializes the scenario to JSON. Release the string with
/// [`cpjam_string_free`].
///
/// # Safety
/// `sc` must be a valid scenario and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_scenario_to_json(
    sc: *const CpjamScenario,
    out: *mut *mut c_char,
) -> CpjamStatus {
    guard(|| {
        let json = borrow(sc, "scenario")?.inner.to_json()?;
        let c = CString::new(json).map_err(|e| Failure(CpjamStatus::Json, e.to_string()))?;
        *borrow_mut(out, "output pointer")? = c.into_raw();
        Ok(())
    })
}

/// # Safety
/// `s` must be NULL or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpjam_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Runs the BER sweep of `sc`. `threads == 0` uses the default worker
/// pool. Results do not depend on the thread count.
///
/// # Safety
/// `sc` must be a valid scenario and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_simulate(
    sc: *const CpjamScenario,
    threads: usize,
    out: *mut *mut CpjamResult,
) -> CpjamStatus {
    guard(|| {
        let sc = &borrow(sc, "scenario")?.inner;
        let inner = if threads == 0 { sweep(sc)? } else { sweep_with_threads(sc, threads)? };
        write_out(out, CpjamResult { inner })
    })
}

/// # Safety
/// `res` must be NULL or a result returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cpjam_result_free(res: *mut CpjamResult) {
    if !res.is_null() {
        drop(Box::from_raw(res));
    }
}

/// Number of SNR points, or 0 for a NULL result.
///
/// # Safety
/// `res` must be NULL or a valid result.
#[no_mangle]
pub unsafe extern "C" fn cpjam_result_len(res: *const CpjamResult) -> usize {
    res.as_ref().map_or(0, |r| r.inner.points.len())
}

/// # Safety
/// `res` must be a valid result and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cpjam_result_point(
    res: *const CpjamResult,
    index: usize,
    out: *mut CpjamBerPoint,
) -> CpjamStatus {
    guard(|| {
        let res = borrow(res, "result")?;
        let p = res.inner.points.get(index).ok_or_else(|| {
            Failure(
                CpjamStatus::IndexOutOfRange,
                format!("point {index} of {}", res.inner.points.len()),
            )
        })?;
        *borrow_mut(out, "output pointer")? = CpjamBerPoint {
            snr_db: p.snr_db,
            bits: p.bits,
            bit_errors: p.bit_errors,
            ber: p.ber(),
        };
        Ok(())
    })
}

/// Writes the result as a BER CSV file.
///
/// # Safety
/// `res` must be a valid result and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn cpjam_result_write_csv(
    res: *const CpjamResult,
    path: *const c_char,
) -> CpjamStatus {
    guard(|| {
        let res = borrow(res, "result")?;
        let path = PathBuf::from(string(path, "path")?);
        write_ber_csv(std::slice::from_ref(&res.inner), &path)?;
        Ok(())
    })
}

/// Noise-free interference rank over `draws` random draws for a violating
/// jammer with `jammer_antennas` antennas whose channels have the given tap
/// counts, seen by `b_antennas` receive antennas.
///
/// # Safety
/// `taps` must point to `jammer_antennas` values and `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn cpjam_rank_study(
    b_antennas: usize,
    taps: *const usize,
    jammer_antennas: usize,
    draws: usize,
    seed: u64,
    out: *mut CpjamRankSummary,
) -> CpjamStatus {
    guard(|| {
        let taps = slice(taps, jammer_antennas, "taps")?.to_vec();
        let out = borrow_mut(out, "output pointer")?;
        let case = RankCase::violating(b_antennas, taps);
        let row = rank_study(&[case], &OfdmConfig::default(), draws, seed)?
            .pop()
            .expect("one summary per case");
        *out = CpjamRankSummary {
            expected_rank: row.expected_rank,
            draws: row.draws,
            conforming_draws: row.conforming_draws,
            min_rank: row.min_rank,
            max_rank: row.max_rank,
        };
        Ok(())
    })
}

/// Mean and standard deviation of the ordered interference fractions of
/// `sc`, over its blocks and data subcarriers. `noise_free` ignores
/// `snr_db`. `mean` and `std` must each hold at least `len` values with
/// `len >= cpjam_scenario_antennas(sc)`; `written` receives the count used.
///
/// # Safety
/// All pointers must be valid for the stated lengths.
#[no_mangle]
pub unsafe extern "C" fn cpjam_fractions(
    sc: *const CpjamScenario,
    noise_free: bool,
    snr_db: f64,
    kind: CpjamFractionKind,
    mean: *mut f64,
    std: *mut f64,
    len: usize,
    written: *mut usize,
) -> CpjamStatus {
    guard(|| {
        let sc = &borrow(sc, "scenario")?.inner;
        if mean.is_null() || std.is_null() {
            return Err(null("output buffer"));
        }
        let written = borrow_mut(written, "written")?;
        if len < sc.b_antennas {
            return Err(Failure(
                CpjamStatus::BufferTooSmall,
                format!("need {} values, buffer holds {len}", sc.b_antennas),
            ));
        }
        let kind = match kind {
            CpjamFractionKind::Singular => FractionKind::Singular,
            CpjamFractionKind::Energy => FractionKind::Energy,
        };
        let stats = fraction_study(sc, (!noise_free).then_some(snr_db), kind)?;
        let n = stats.mean.len();
        std::slice::from_raw_parts_mut(mean, n).copy_from_slice(&stats.mean);
        std::slice::from_raw_parts_mut(std, n).copy_from_slice(&stats.std);
        *written = n;
        Ok(())
    })
}

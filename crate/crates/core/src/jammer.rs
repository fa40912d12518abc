//! Jammer transmit streams and the per-subcarrier effective jammer channel.
//!
//! A jammer that does not send a cyclic prefix still produces, after the
//! receiver's windowing and DFT, a per-subcarrier contribution that is
//! linear in a `(P + 1)`-dimensional effective input: the DFT sample of the
//! prefix-free part of its frame plus the `P` deviations of its actual
//! prefix from a cyclic one. [`EffectiveJammerChannel`] is the `B x (P + 1)`
//! matrix that maps this input to the receive antennas. Its rank is bounded
//! by `min(B, L)` for `L` jammer taps, and that bound is attained for
//! generic channels.

use std::f64::consts::PI;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{complex_gaussian, ChannelRealization, TapTensor};
use crate::error::{ensure, Result};
use crate::linalg::{singular_values, CMatrix};
use crate::ofdm::{add_cyclic_prefix, Dft, OfdmConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JammerMode {
    None,
    /// Sends a cyclic prefix aligned with the legitimate OFDM frames.
    Compliant,
    /// Sends i.i.d. Gaussian samples with no frame structure.
    Violating,
}

impl JammerMode {
    pub fn as_str(self) -> &'static str {
        match self {
            JammerMode::None => "none",
            JammerMode::Compliant => "compliant",
            JammerMode::Violating => "violating",
        }
    }
}

impl std::fmt::Display for JammerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for JammerMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "none" => Ok(JammerMode::None),
            "compliant" => Ok(JammerMode::Compliant),
            "violating" => Ok(JammerMode::Violating),
            other => Err(crate::Error::Config(format!("unknown jammer mode '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct JammerSpec {
    pub mode: JammerMode,
    pub antennas: usize,
    /// Receive energy of the jammer relative to the legitimate signal.
    pub rel_energy_db: f64,
    /// Channel taps per jammer antenna; one entry per antenna. A scenario
    /// fills an empty list from its default jammer tap count.
    pub taps_per_antenna: Vec<usize>,
}

impl Default for JammerSpec {
    fn default() -> Self {
        Self {
            taps_per_antenna: Vec::new(),
            ..Self::violating(1)
        }
    }
}

impl JammerSpec {
    pub fn none() -> Self {
        Self {
            mode: JammerMode::None,
            antennas: 0,
            rel_energy_db: 25.0,
            taps_per_antenna: Vec::new(),
        }
    }

    pub fn compliant(taps: usize) -> Self {
        Self {
            mode: JammerMode::Compliant,
            antennas: 1,
            rel_energy_db: 25.0,
            taps_per_antenna: vec![taps],
        }
    }

    pub fn violating(taps: usize) -> Self {
        Self::violating_multi(vec![taps])
    }

    pub fn violating_multi(taps_per_antenna: Vec<usize>) -> Self {
        Self {
            mode: JammerMode::Violating,
            antennas: taps_per_antenna.len(),
            rel_energy_db: 25.0,
            taps_per_antenna,
        }
    }

    /// Switches the mode and fixes up the antenna layout: `none` drops all
    /// antennas and `compliant` keeps only the first one.
    pub fn with_mode(mut self, mode: JammerMode, default_taps: usize) -> Self {
        match mode {
            JammerMode::None => {
                self.antennas = 0;
                self.taps_per_antenna.clear();
            }
            JammerMode::Compliant => {
                let l = self.taps_per_antenna.first().copied().unwrap_or(default_taps);
                self.antennas = 1;
                self.taps_per_antenna = vec![l];
            }
            JammerMode::Violating => {
                if self.antennas == 0 {
                    self.antennas = 1;
                    self.taps_per_antenna = vec![default_taps];
                }
            }
        }
        self.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<()> {
        match self.mode {
            JammerMode::None => {
                ensure!(self.antennas == 0, Config, "jammer mode none requires 0 antennas");
            }
            JammerMode::Compliant => {
                ensure!(self.antennas == 1, Config, "a compliant jammer has exactly one antenna");
            }
            JammerMode::Violating => {
                ensure!(self.antennas >= 1, Config, "a violating jammer needs an antenna");
            }
        }
        ensure!(
            self.taps_per_antenna.len() == self.antennas,
            Config,
            "{} tap counts given for {} jammer antennas",
            self.taps_per_antenna.len(),
            self.antennas
        );
        ensure!(
            self.taps_per_antenna.iter().all(|&l| l >= 1),
            Config,
            "jammer antennas need at least one tap"
        );
        ensure!(self.rel_energy_db.is_finite(), Config, "jammer energy must be finite");
        Ok(())
    }

    /// Sum of tap counts over antennas; the interference rank cannot exceed it.
    pub fn total_taps(&self) -> usize {
        self.taps_per_antenna.iter().sum()
    }
}

/// Per-sample jammer transmit variance that puts the expected total receive
/// energy of the jammer `rel_energy_db` above that of the legitimate signal,
/// given the drawn taps. The legitimate transmitters load `|K|` of `N`
/// subcarriers with unit-energy symbols, so their per-sample variance is
/// `|K| / N`.
pub fn calibrated_variance(ch: &ChannelRealization, cfg: &OfdmConfig, rel_energy_db: f64) -> f64 {
    let jam = ch.jammer_taps.energy();
    if jam == 0.0 {
        return 0.0;
    }
    let signal = ch.legit_taps.energy() * cfg.n_data() as f64 / cfg.n_subcarriers as f64;
    10f64.powf(rel_energy_db / 10.0) * signal / jam
}

/// Jammer transmit streams, one per antenna, each `total_len` samples.
///
/// Compliant jammers emit Gaussian frequency symbols of variance `variance`
/// on every subcarrier, framed with a cyclic prefix on the legitimate frame
/// grid. Violating jammers emit i.i.d. CN(0, `variance`) samples.
pub fn gen_jammer_stream<R: Rng + ?Sized>(
    spec: &JammerSpec,
    cfg: &OfdmConfig,
    total_len: usize,
    variance: f64,
    rng: &mut R,
) -> Result<Vec<Vec<Complex64>>> {
    spec.validate()?;
    ensure!(variance >= 0.0, Config, "jammer variance must be non-negative");
    match spec.mode {
        JammerMode::None => Ok(Vec::new()),
        JammerMode::Violating => Ok((0..spec.antennas)
            .map(|_| (0..total_len).map(|_| complex_gaussian(rng, variance)).collect())
            .collect()),
        JammerMode::Compliant => {
            let dft = Dft::new(cfg.n_subcarriers);
            let frames = total_len.div_ceil(cfg.symbol_len());
            let mut out = Vec::with_capacity(total_len + cfg.symbol_len());
            let mut buf = vec![Complex64::default(); cfg.n_subcarriers];
            for _ in 0..frames {
                buf.iter_mut().for_each(|v| *v = complex_gaussian(rng, variance));
                dft.inverse_in_place(&mut buf)?;
                out.extend(add_cyclic_prefix(&buf, cfg)?);
            }
            out.truncate(total_len);
            Ok(vec![out])
        }
    }
}

/// The `N x (N + P)` matrix mapping one jammer frame `w[-P+1..=N]` to the `N`
/// windowed receive samples of one antenna. Row `r` holds the reversed taps
/// starting at column `P - L + 1 + r`.
pub fn toeplitz_window_matrix(taps: &[Complex64], cfg: &OfdmConfig) -> Result<CMatrix> {
    let (n, p, l) = (cfg.n_subcarriers, cfg.cp_len, taps.len());
    ensure!(l >= 1, Config, "channel without taps");
    ensure!(
        l <= p + 1,
        Config,
        "{} taps need a cyclic prefix of at least {}, have {}",
        l,
        l - 1,
        p
    );
    Ok(CMatrix::from_fn(n, n + p, |r, c| {
        let d = (r + p) as isize - c as isize;
        if (0..l as isize).contains(&d) {
            taps[d as usize]
        } else {
            Complex64::default()
        }
    }))
}

/// The first `P` columns of a window matrix: the part that acts on the
/// jammer's prefix. Only its last `L - 1` columns are nonzero.
pub fn prefix_columns(window: &CMatrix, cfg: &OfdmConfig) -> CMatrix {
    window.columns(0, cfg.cp_len).into_owned()
}

/// `B x I(P + 1)` effective channel of the jammer on one subcarrier. For
/// each jammer antenna the block is `[sqrt(N) j[k], R[k]]` with row `b` of
/// `R[k]` equal to the `k`th DFT row times the prefix columns of antenna
/// `b`'s window matrix. Antenna blocks are concatenated horizontally.
#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveJammerChannel {
    pub subcarrier: usize,
    pub matrix: CMatrix,
}

impl EffectiveJammerChannel {
    pub fn apply(&self, input: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        ensure!(
            input.len() == self.matrix.ncols(),
            Dimension,
            "effective input has {} entries, channel expects {}",
            input.len(),
            self.matrix.ncols()
        );
        Ok(&self.matrix * input)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        singular_values(&self.matrix)
    }

    pub fn rank(&self, policy: &RankPolicy) -> usize {
        policy.rank(&self.singular_values())
    }
}

fn dft_row_entry(n: usize, k: usize, t: usize) -> Complex64 {
    let ang = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
    Complex64::from_polar(1.0 / (n as f64).sqrt(), ang)
}

/// Effective single-antenna block for jammer antenna `i` on subcarrier `k`.
fn antenna_block(taps: &TapTensor, i: usize, cfg: &OfdmConfig, k: usize) -> Result<CMatrix> {
    let (n, p) = (cfg.n_subcarriers, cfg.cp_len);
    let b = taps.rx();
    let mut block = CMatrix::zeros(b, p + 1);
    for r in 0..b {
        let h = taps.link(r, i);
        ensure!(
            h.len() <= p + 1,
            Config,
            "{} jammer taps need a cyclic prefix of at least {}, have {}",
            h.len(),
            h.len() - 1,
            p
        );
        // sqrt(N) * (unitary DFT of the zero-padded response)[k]
        block[(r, 0)] = h
            .iter()
            .enumerate()
            .map(|(t, v)| v * dft_row_entry(n, k, t) * (n as f64).sqrt())
            .sum();
        // R[r, c] = sum_row f_row[k] * W[row, c], with W[row, c] = h[row + P - c]
        for c in 0..p {
            let mut acc = Complex64::default();
            for (d, v) in h.iter().enumerate() {
                if let Some(row) = (c + d).checked_sub(p) {
                    acc += dft_row_entry(n, k, row) * v;
                }
            }
            block[(r, c + 1)] = acc;
        }
    }
    Ok(block)
}

pub fn build_effective_channel(
    ch: &ChannelRealization,
    cfg: &OfdmConfig,
    k: usize,
) -> Result<EffectiveJammerChannel> {
    ensure!(
        k < cfg.n_subcarriers,
        Dimension,
        "subcarrier {} out of range for N = {}",
        k,
        cfg.n_subcarriers
    );
    let taps = &ch.jammer_taps;
    ensure!(taps.tx() >= 1, Config, "realization has no jammer antennas");
    let width = cfg.cp_len + 1;
    let mut matrix = CMatrix::zeros(taps.rx(), width * taps.tx());
    for i in 0..taps.tx() {
        let block = antenna_block(taps, i, cfg, k)?;
        matrix.columns_mut(i * width, width).copy_from(&block);
    }
    Ok(EffectiveJammerChannel { subcarrier: k, matrix })
}

/// Effective input `[DFT(w[1..=N])[k]; w[-P+1..=0] - w[N-P+1..=N]]` of one
/// jammer frame. `frame` starts at the first prefix sample; samples past
/// `N + P` are ignored.
pub fn extract_effective_input(
    frame: &[Complex64],
    cfg: &OfdmConfig,
    k: usize,
) -> Result<DVector<Complex64>> {
    extract_effective_input_with(frame, cfg, k, &Dft::new(cfg.n_subcarriers))
}

pub(crate) fn extract_effective_input_with(
    frame: &[Complex64],
    cfg: &OfdmConfig,
    k: usize,
    dft: &Dft,
) -> Result<DVector<Complex64>> {
    let (n, p) = (cfg.n_subcarriers, cfg.cp_len);
    ensure!(
        frame.len() >= n + p,
        Framing,
        "jammer frame needs {} samples, got {}",
        n + p,
        frame.len()
    );
    ensure!(k < n, Dimension, "subcarrier {} out of range for N = {}", k, n);
    let body = dft.forward(&frame[p..p + n])?;
    let mut out = DVector::zeros(p + 1);
    out[0] = body[k];
    for t in 0..p {
        out[t + 1] = frame[t] - frame[n + t];
    }
    Ok(out)
}

/// Effective input of a multi-antenna jammer: per-antenna inputs stacked in
/// antenna order, matching the column layout of [`EffectiveJammerChannel`].
pub fn extract_effective_input_multi(
    frames: &[&[Complex64]],
    cfg: &OfdmConfig,
    k: usize,
) -> Result<DVector<Complex64>> {
    let dft = Dft::new(cfg.n_subcarriers);
    let parts = frames
        .iter()
        .map(|f| extract_effective_input_with(f, cfg, k, &dft))
        .collect::<Result<Vec<_>>>()?;
    let values: Vec<Complex64> = parts.iter().flat_map(|v| v.iter().copied()).collect();
    Ok(DVector::from_vec(values))
}

/// Scale-relative numerical rank: a singular value counts iff
/// `sigma > scale * sigma_max * 2^-40`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankPolicy {
    pub scale: f64,
}

impl RankPolicy {
    const REL: f64 = 1.0 / (1u64 << 40) as f64;

    /// `scale = max(B, P + 1)`.
    pub fn new(b: usize, cfg: &OfdmConfig) -> Self {
        Self {
            scale: b.max(cfg.cp_len + 1) as f64,
        }
    }

    pub fn threshold(&self, sigma_max: f64) -> f64 {
        self.scale * sigma_max * Self::REL
    }

    /// `singular_values` must be sorted non-increasing.
    pub fn rank(&self, singular_values: &[f64]) -> usize {
        let Some(&top) = singular_values.first() else {
            return 0;
        };
        if top <= 0.0 {
            return 0;
        }
        let thr = self.threshold(top);
        singular_values.iter().take_while(|&&s| s > thr).count()
    }
}

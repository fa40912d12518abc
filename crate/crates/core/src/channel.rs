//! Block-fading frequency-selective MIMO channels.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{ensure, Result};
use crate::linalg::CMatrix;
use crate::ofdm::{Dft, OfdmConfig};

/// One circularly-symmetric complex Gaussian sample with variance `var`.
pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R, var: f64) -> Complex64 {
    let s = (var / 2.0).sqrt();
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex64::new(s * re, s * im)
}

/// Time-domain impulse responses between `rx` receive and `tx` transmit
/// antennas, each `taps` long.
#[derive(Debug, Clone, PartialEq)]
pub struct TapTensor {
    rx: usize,
    tx: usize,
    taps: usize,
    data: Vec<Complex64>,
}

impl TapTensor {
    pub fn zeros(rx: usize, tx: usize, taps: usize) -> Self {
        Self {
            rx,
            tx,
            taps,
            data: vec![Complex64::default(); rx * tx * taps],
        }
    }

    /// Builds a tensor from per-link tap vectors, `links[r][t]`.
    pub fn from_links(links: &[Vec<Vec<Complex64>>]) -> Result<Self> {
        let rx = links.len();
        ensure!(rx >= 1, Dimension, "tap tensor needs at least one receive antenna");
        let tx = links[0].len();
        let taps = links[0].first().map_or(0, Vec::len);
        let mut out = Self::zeros(rx, tx, taps);
        for (r, row) in links.iter().enumerate() {
            ensure!(row.len() == tx, Dimension, "ragged transmit dimension at rx {}", r);
            for (t, h) in row.iter().enumerate() {
                ensure!(h.len() == taps, Dimension, "ragged tap length at ({}, {})", r, t);
                out.link_mut(r, t).copy_from_slice(h);
            }
        }
        Ok(out)
    }

    /// i.i.d. CN(0, 1) taps.
    pub fn rayleigh<R: Rng + ?Sized>(rx: usize, tx: usize, taps: usize, rng: &mut R) -> Self {
        let data = (0..rx * tx * taps)
            .map(|_| complex_gaussian(rng, 1.0))
            .collect();
        Self { rx, tx, taps, data }
    }

    pub fn rx(&self) -> usize {
        self.rx
    }

    pub fn tx(&self) -> usize {
        self.tx
    }

    pub fn taps(&self) -> usize {
        self.taps
    }

    pub fn link(&self, r: usize, t: usize) -> &[Complex64] {
        let at = (r * self.tx + t) * self.taps;
        &self.data[at..at + self.taps]
    }

    pub fn link_mut(&mut self, r: usize, t: usize) -> &mut [Complex64] {
        let at = (r * self.tx + t) * self.taps;
        &mut self.data[at..at + self.taps]
    }

    /// Impulse response from transmit antenna `t` to every receive antenna.
    pub fn column(&self, t: usize) -> Vec<Vec<Complex64>> {
        (0..self.rx).map(|r| self.link(r, t).to_vec()).collect()
    }

    pub fn energy(&self) -> f64 {
        self.data.iter().map(|v| v.norm_sqr()).sum()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

/// Channel taps held constant over one coherence block.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    /// `B x U x L_h`
    pub legit_taps: TapTensor,
    /// `B x I x L_j`; antennas with fewer taps are zero-padded.
    pub jammer_taps: TapTensor,
    pub noise_var: f64,
}

/// Per-subcarrier channel matrices: `legit[k]` is `B x U`, `jammer[k]` is
/// `B x I`, each entry the unitary DFT of the zero-padded link response.
#[derive(Debug, Clone, PartialEq)]
pub struct FreqResponse {
    pub legit: Vec<CMatrix>,
    pub jammer: Vec<CMatrix>,
}

impl FreqResponse {
    /// `sqrt(N) * H[k]`, the matrix that multiplies the transmit symbols.
    pub fn legit_effective(&self, k: usize) -> CMatrix {
        let n = self.legit.len() as f64;
        self.legit[k].scale(n.sqrt())
    }
}

/// Draws i.i.d. CN(0, 1) legitimate and jammer taps. Legitimate taps are
/// drawn first, so the legitimate channel does not depend on the jammer
/// dimensions for a fixed seed.
pub fn draw_channel<R: Rng + ?Sized>(
    b: usize,
    u: usize,
    i: usize,
    l_h: usize,
    l_j: usize,
    rng: &mut R,
) -> Result<ChannelRealization> {
    draw_channel_with_jammer_taps(b, u, l_h, &vec![l_j; i], rng)
}

/// As [`draw_channel`], with an individual tap count per jammer antenna.
pub fn draw_channel_with_jammer_taps<R: Rng + ?Sized>(
    b: usize,
    u: usize,
    l_h: usize,
    jammer_taps: &[usize],
    rng: &mut R,
) -> Result<ChannelRealization> {
    ensure!(b >= 1 && u >= 1, Config, "need b >= 1 and u >= 1 (got b={}, u={})", b, u);
    ensure!(l_h >= 1, Config, "legitimate channel needs at least one tap");
    ensure!(
        jammer_taps.iter().all(|&l| l >= 1),
        Config,
        "every jammer antenna needs at least one tap"
    );
    let legit_taps = TapTensor::rayleigh(b, u, l_h, rng);
    let l_max = jammer_taps.iter().copied().max().unwrap_or(1);
    let mut jam = TapTensor::zeros(b, jammer_taps.len(), l_max);
    for r in 0..b {
        for (t, &l) in jammer_taps.iter().enumerate() {
            for v in &mut jam.link_mut(r, t)[..l] {
                *v = complex_gaussian(rng, 1.0);
            }
        }
    }
    Ok(ChannelRealization {
        legit_taps,
        jammer_taps: jam,
        noise_var: 0.0,
    })
}

/// Linear convolution of every transmit stream with its link response,
/// summed over transmit antennas. Each output stream has `S + L - 1` samples.
pub fn apply_channel(taps: &TapTensor, x: &[Vec<Complex64>]) -> Result<Vec<Vec<Complex64>>> {
    ensure!(
        x.len() == taps.tx(),
        Dimension,
        "{} transmit streams for a channel with {} transmit antennas",
        x.len(),
        taps.tx()
    );
    let s = x.first().map_or(0, Vec::len);
    ensure!(s >= 1, Dimension, "empty transmit stream");
    ensure!(x.iter().all(|v| v.len() == s), Dimension, "transmit streams differ in length");
    ensure!(taps.taps() >= 1, Dimension, "channel without taps");

    let out_len = s + taps.taps() - 1;
    let mut out = vec![vec![Complex64::default(); out_len]; taps.rx()];
    for (r, y) in out.iter_mut().enumerate() {
        for (t, xt) in x.iter().enumerate() {
            for (d, h) in taps.link(r, t).iter().enumerate() {
                if *h == Complex64::default() {
                    continue;
                }
                for (yv, xv) in y[d..d + s].iter_mut().zip(xt) {
                    *yv += h * xv;
                }
            }
        }
    }
    Ok(out)
}

fn tensor_response(taps: &TapTensor, dft: &Dft) -> Result<Vec<CMatrix>> {
    let n = dft.len();
    let mut out = vec![CMatrix::zeros(taps.rx(), taps.tx()); n];
    let mut buf = vec![Complex64::default(); n];
    for r in 0..taps.rx() {
        for t in 0..taps.tx() {
            buf.fill(Complex64::default());
            buf[..taps.taps()].copy_from_slice(taps.link(r, t));
            dft.forward_in_place(&mut buf)?;
            for (k, v) in buf.iter().enumerate() {
                out[k][(r, t)] = *v;
            }
        }
    }
    Ok(out)
}

pub fn freq_response(ch: &ChannelRealization, cfg: &OfdmConfig) -> Result<FreqResponse> {
    freq_response_with(ch, &Dft::new(cfg.n_subcarriers))
}

pub(crate) fn freq_response_with(ch: &ChannelRealization, dft: &Dft) -> Result<FreqResponse> {
    let n = dft.len();
    ensure!(
        ch.legit_taps.taps() <= n && ch.jammer_taps.taps() <= n,
        Config,
        "channel with {} / {} taps does not fit N = {}",
        ch.legit_taps.taps(),
        ch.jammer_taps.taps(),
        n
    );
    Ok(FreqResponse {
        legit: tensor_response(&ch.legit_taps, dft)?,
        jammer: tensor_response(&ch.jammer_taps, dft)?,
    })
}

/// Adds i.i.d. CN(0, `noise_var`) samples in place.
pub fn add_noise<R: Rng + ?Sized>(
    y: &mut [Vec<Complex64>],
    noise_var: f64,
    rng: &mut R,
) -> Result<()> {
    ensure!(
        noise_var >= 0.0 && noise_var.is_finite(),
        Config,
        "noise variance must be finite and non-negative, got {}",
        noise_var
    );
    if noise_var == 0.0 {
        return Ok(());
    }
    for v in y.iter_mut().flatten() {
        *v += complex_gaussian(rng, noise_var);
    }
    Ok(())
}

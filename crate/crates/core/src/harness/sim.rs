//! Block-level link simulation and Monte-Carlo sweeps.

use std::ops::Range;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::{Scenario, SubspaceMode};
use crate::channel::{
    add_noise, apply_channel, draw_channel_with_jammer_taps, freq_response_with,
    ChannelRealization,
};
use crate::error::{ensure, Error, Result};
use crate::jammer::{calibrated_variance, gen_jammer_stream, JammerMode};
use crate::linalg::CMatrix;
use crate::ofdm::{add_cyclic_prefix, strip_and_window, Dft, OfdmConfig};
use crate::receiver::{
    estimate_interference_basis, qpsk_demap, qpsk_map, ProjectionBank, SubcarrierGrid,
    ZeroForcing,
};

/// Bit error counts of one coherence block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOutcome {
    pub bits: u64,
    pub bit_errors: u64,
    /// Subcarriers whose projected channel was rank-deficient; their bits
    /// are counted as half wrong.
    pub erased_subcarriers: u64,
}

impl std::ops::AddAssign for BlockOutcome {
    fn add_assign(&mut self, rhs: Self) {
        self.bits += rhs.bits;
        self.bit_errors += rhs.bit_errors;
        self.erased_subcarriers += rhs.erased_subcarriers;
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BerPoint {
    pub snr_db: f64,
    pub bits: u64,
    pub bit_errors: u64,
    pub erased_subcarriers: u64,
}

impl BerPoint {
    pub fn ber(&self) -> f64 {
        if self.bits == 0 {
            0.0
        } else {
            self.bit_errors as f64 / self.bits as f64
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimResult {
    pub scenario_id: String,
    pub jammer_mode: JammerMode,
    pub null_dims: usize,
    pub points: Vec<BerPoint>,
}

impl SimResult {
    pub fn empty(sc: &Scenario) -> Self {
        Self {
            scenario_id: sc.id.clone(),
            jammer_mode: sc.jammer.mode,
            null_dims: sc.null_dims,
            points: sc
                .snr_grid_db
                .iter()
                .map(|&snr_db| BerPoint {
                    snr_db,
                    bits: 0,
                    bit_errors: 0,
                    erased_subcarriers: 0,
                })
                .collect(),
        }
    }

    /// Adds the counts of a result over the same scenario and SNR grid.
    pub fn merge(&mut self, other: &SimResult) -> Result<()> {
        ensure!(
            self.scenario_id == other.scenario_id
                && self.jammer_mode == other.jammer_mode
                && self.null_dims == other.null_dims
                && self.points.len() == other.points.len(),
            Dimension,
            "cannot merge results of different scenarios"
        );
        for (a, b) in self.points.iter_mut().zip(&other.points) {
            ensure!(a.snr_db == b.snr_db, Dimension, "SNR grids differ");
            a.bits += b.bits;
            a.bit_errors += b.bit_errors;
            a.erased_subcarriers += b.erased_subcarriers;
        }
        Ok(())
    }

    pub fn bers(&self) -> Vec<f64> {
        self.points.iter().map(BerPoint::ber).collect()
    }
}

/// Random streams of one block. Every component draws from its own
/// generator so that, for a fixed block seed, scenarios that differ only in
/// the jammer or the receiver see the same channel, data and noise.
pub(crate) struct BlockRngs {
    pub channel: ChaCha8Rng,
    pub data: ChaCha8Rng,
    pub jammer: ChaCha8Rng,
    pub noise: ChaCha8Rng,
    pub training: ChaCha8Rng,
}

impl BlockRngs {
    pub fn new<R: RngCore + ?Sized>(rng: &mut R) -> Self {
        let mut child = || ChaCha8Rng::seed_from_u64(rng.next_u64());
        Self {
            channel: child(),
            data: child(),
            jammer: child(),
            noise: child(),
            training: child(),
        }
    }
}

/// Generator for block `block` at SNR index `snr_index`; independent of the
/// order in which blocks are executed.
pub fn block_rng(seed: u64, snr_index: usize, block: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((snr_index as u64) << 40) ^ block);
    rng
}

/// Windows and transforms every OFDM symbol of a serialized block, keeping
/// the data subcarriers.
pub(crate) fn receive_grid(
    streams: &[Vec<Complex64>],
    cfg: &OfdmConfig,
    dft: &Dft,
) -> Result<SubcarrierGrid> {
    let m_syms = cfg.symbols_per_block;
    let mut grid = SubcarrierGrid::zeros(cfg.data_subcarriers.clone(), streams.len(), m_syms);
    for (b, y) in streams.iter().enumerate() {
        for m in 0..m_syms {
            let start = m * cfg.symbol_len();
            ensure!(
                y.len() >= start,
                Framing,
                "receive stream ends before symbol {}",
                m
            );
            let mut win = strip_and_window(&y[start..], cfg)?;
            dft.forward_in_place(&mut win)?;
            for (i, &k) in cfg.data_subcarriers.iter().enumerate() {
                grid.samples[i][(b, m)] = win[k];
            }
        }
    }
    Ok(grid)
}

fn sum_streams(a: &mut [Vec<Complex64>], b: &[Vec<Complex64>]) {
    for (x, y) in a.iter_mut().zip(b) {
        for (u, v) in x.iter_mut().zip(y) {
            *u += v;
        }
    }
}

fn truncate_streams(s: &mut [Vec<Complex64>], len: usize) {
    s.iter_mut().for_each(|v| v.truncate(len));
}

/// Received jammer signal over one block, truncated to the block length.
fn jammer_receive(
    sc: &Scenario,
    ch: &ChannelRealization,
    rng: &mut ChaCha8Rng,
) -> Result<Option<Vec<Vec<Complex64>>>> {
    if sc.jammer.mode == JammerMode::None {
        return Ok(None);
    }
    let cfg = &sc.ofdm;
    let var = calibrated_variance(ch, cfg, sc.jammer.rel_energy_db);
    let w = gen_jammer_stream(&sc.jammer, cfg, cfg.block_len(), var, rng)?;
    let mut y = apply_channel(&ch.jammer_taps, &w)?;
    truncate_streams(&mut y, cfg.block_len());
    Ok(Some(y))
}

/// Interference observed on the data subcarriers over one block: the
/// received jammer signal plus noise of variance `noise_var`.
pub(crate) fn interference_grid(
    sc: &Scenario,
    ch: &ChannelRealization,
    noise_var: f64,
    jammer_rng: &mut ChaCha8Rng,
    noise_rng: &mut ChaCha8Rng,
    dft: &Dft,
) -> Result<SubcarrierGrid> {
    let cfg = &sc.ofdm;
    let mut y = jammer_receive(sc, ch, jammer_rng)?
        .unwrap_or_else(|| vec![vec![Complex64::default(); cfg.block_len()]; sc.b_antennas]);
    add_noise(&mut y, noise_var, noise_rng)?;
    receive_grid(&y, cfg, dft)
}

pub(crate) fn draw_block_channel(sc: &Scenario, rng: &mut ChaCha8Rng) -> Result<ChannelRealization> {
    draw_channel_with_jammer_taps(
        sc.b_antennas,
        sc.u_streams,
        sc.l_taps,
        &sc.jammer.taps_per_antenna,
        rng,
    )
}

/// Simulates one coherence block at `snr_db` (`+inf` for noise-free) and
/// counts bit errors after nulling `sc.null_dims` interference dimensions
/// per data subcarrier and zero-forcing detection.
pub fn run_block<R: RngCore + ?Sized>(sc: &Scenario, snr_db: f64, rng: &mut R) -> Result<BlockOutcome> {
    let dft = Dft::new(sc.ofdm.n_subcarriers);
    run_block_with(sc, snr_db, rng, &dft)
}

fn run_block_with<R: RngCore + ?Sized>(
    sc: &Scenario,
    snr_db: f64,
    rng: &mut R,
    dft: &Dft,
) -> Result<BlockOutcome> {
    let cfg = &sc.ofdm;
    let (b, u, m_syms) = (sc.b_antennas, sc.u_streams, cfg.symbols_per_block);
    let mut rngs = BlockRngs::new(rng);

    let mut ch = draw_block_channel(sc, &mut rngs.channel)?;
    ch.noise_var = sc.noise_var(snr_db);
    let freq = freq_response_with(&ch, dft)?;

    // Payload bits: bits[i] holds, for data subcarrier i, the pairs of
    // symbol m and stream s at offset 2 * (m * U + s).
    let bits_per_sc = m_syms * u * 2;
    let bits: Vec<Vec<u8>> = (0..cfg.n_data())
        .map(|_| (0..bits_per_sc).map(|_| u8::from(rngs.data.random::<bool>())).collect())
        .collect();
    let symbols: Vec<Vec<Complex64>> = bits.iter().map(|b| qpsk_map(b)).collect::<Result<_>>()?;

    let mut tx = vec![Vec::with_capacity(cfg.block_len()); u];
    let mut buf = vec![Complex64::default(); cfg.n_subcarriers];
    for m in 0..m_syms {
        for (s, stream) in tx.iter_mut().enumerate() {
            buf.fill(Complex64::default());
            for (i, &k) in cfg.data_subcarriers.iter().enumerate() {
                buf[k] = symbols[i][m * u + s];
            }
            dft.inverse_in_place(&mut buf)?;
            stream.extend(add_cyclic_prefix(&buf, cfg)?);
        }
    }

    let mut rx = apply_channel(&ch.legit_taps, &tx)?;
    truncate_streams(&mut rx, cfg.block_len());
    let jam = jammer_receive(sc, &ch, &mut rngs.jammer)?;
    if let Some(j) = &jam {
        sum_streams(&mut rx, j);
    }
    add_noise(&mut rx, ch.noise_var, &mut rngs.noise)?;
    let grid = receive_grid(&rx, cfg, dft)?;

    let bank = if sc.null_dims == 0 {
        None
    } else {
        let interf = match (sc.subspace_mode, &jam) {
            (SubspaceMode::Genie, Some(j)) => receive_grid(j, cfg, dft)?,
            (SubspaceMode::Genie, None) => {
                SubcarrierGrid::zeros(cfg.data_subcarriers.clone(), b, m_syms)
            }
            (SubspaceMode::Estimated, _) => interference_grid(
                sc,
                &ch,
                ch.noise_var,
                &mut rngs.training,
                &mut rngs.noise,
                dft,
            )?,
        };
        Some(estimate_interference_basis(&interf, sc.null_dims)?)
    };

    detect_and_count(&grid, bank.as_ref(), &freq.legit, cfg.n_subcarriers, &bits)
}

fn detect_and_count(
    grid: &SubcarrierGrid,
    bank: Option<&ProjectionBank>,
    legit: &[CMatrix],
    n: usize,
    bits: &[Vec<u8>],
) -> Result<BlockOutcome> {
    let scale = (n as f64).sqrt();
    let mut out = BlockOutcome::default();
    for (i, (&k, y)) in grid.subcarriers.iter().zip(&grid.samples).enumerate() {
        let h = legit[k].scale(scale);
        let (h_bar, y_bar) = match bank {
            Some(bank) => (bank.project_matrix(i, &h)?, bank.project_matrix(i, y)?),
            None => (h, y.clone()),
        };
        let n_bits = bits[i].len() as u64;
        out.bits += n_bits;
        let zf = match ZeroForcing::new(&h_bar) {
            Ok(zf) => zf,
            Err(Error::IllPosed(_)) => {
                out.bit_errors += n_bits / 2;
                out.erased_subcarriers += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let est: DMatrix<Complex64> = zf.detect_block(&y_bar)?;
        // column-major U x M matches the (m, s) bit layout
        let decided = qpsk_demap(est.as_slice());
        out.bit_errors += decided
            .iter()
            .zip(&bits[i])
            .filter(|(a, b)| a != b)
            .count() as u64;
    }
    Ok(out)
}

/// Runs blocks `blocks` (a range of block indices) at every SNR point.
pub fn sweep_blocks(sc: &Scenario, blocks: Range<u64>) -> Result<SimResult> {
    sc.validate()?;
    let dft = Dft::new(sc.ofdm.n_subcarriers);
    let jobs: Vec<(usize, u64)> = (0..sc.snr_grid_db.len())
        .flat_map(|s| blocks.clone().map(move |blk| (s, blk)))
        .collect();
    let outcomes: Vec<(usize, BlockOutcome)> = jobs
        .par_iter()
        .map(|&(s, blk)| {
            let mut rng = block_rng(sc.seed, s, blk);
            run_block_with(sc, sc.snr_grid_db[s], &mut rng, &dft).map(|o| (s, o))
        })
        .collect::<Result<_>>()?;

    let mut result = SimResult::empty(sc);
    for (s, o) in outcomes {
        let p = &mut result.points[s];
        p.bits += o.bits;
        p.bit_errors += o.bit_errors;
        p.erased_subcarriers += o.erased_subcarriers;
    }
    Ok(result)
}

/// Runs `sc.blocks` blocks at every SNR point on the current rayon pool.
pub fn sweep(sc: &Scenario) -> Result<SimResult> {
    sweep_blocks(sc, 0..sc.blocks)
}

/// As [`sweep`], on a dedicated pool of `threads` workers.
pub fn sweep_with_threads(sc: &Scenario, threads: usize) -> Result<SimResult> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("thread pool: {e}")))?;
    pool.install(|| sweep(sc))
}

//! Interference-only experiments: measured rank across antenna/tap
//! configurations and ordered singular-fraction statistics.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::scenario::Scenario;
use super::sim::{block_rng, draw_block_channel, interference_grid, BlockRngs};
use crate::analysis::{aggregate_stats, measured_rank, singular_fractions, FractionKind, SingularFractionStats};
use crate::error::{ensure, Result};
use crate::jammer::{JammerMode, JammerSpec, RankPolicy};
use crate::ofdm::{Dft, OfdmConfig};
use crate::receiver::SubcarrierGrid;

/// One receiver/jammer layout for a rank study.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankCase {
    pub b_antennas: usize,
    pub mode: JammerMode,
    pub taps_per_antenna: Vec<usize>,
}

impl RankCase {
    pub fn violating(b_antennas: usize, taps_per_antenna: Vec<usize>) -> Self {
        Self {
            b_antennas,
            mode: JammerMode::Violating,
            taps_per_antenna,
        }
    }

    /// `min(B, sum L_i)` for a violating jammer, 1 for a compliant one.
    pub fn expected_rank(&self) -> usize {
        match self.mode {
            JammerMode::None => 0,
            JammerMode::Compliant => 1,
            JammerMode::Violating => self.b_antennas.min(self.taps_per_antenna.iter().sum()),
        }
    }

    fn scenario(&self, cfg: &OfdmConfig) -> Result<Scenario> {
        let jammer = match self.mode {
            JammerMode::Violating => JammerSpec::violating_multi(self.taps_per_antenna.clone()),
            JammerMode::Compliant => {
                ensure!(self.taps_per_antenna.len() == 1, Config, "compliant jammers have one antenna");
                JammerSpec::compliant(self.taps_per_antenna[0])
            }
            JammerMode::None => JammerSpec::none(),
        };
        Scenario {
            id: "rank".into(),
            ofdm: cfg.clone(),
            b_antennas: self.b_antennas,
            u_streams: 1,
            l_taps: 1,
            l_jam: self.taps_per_antenna.first().copied().unwrap_or(1),
            jammer,
            null_dims: 0,
            ..Scenario::default()
        }
        .resolved()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankSummary {
    pub case: RankCase,
    pub expected_rank: usize,
    pub draws: usize,
    /// Draws in which every data subcarrier had the expected rank.
    pub conforming_draws: usize,
    pub subcarrier_samples: usize,
    pub conforming_samples: usize,
    pub min_rank: usize,
    pub max_rank: usize,
}

impl RankSummary {
    pub fn conforming_fraction(&self) -> f64 {
        self.conforming_draws as f64 / self.draws as f64
    }
}

/// Noise-free interference rank on every data subcarrier for `draws`
/// independent channel/jammer draws; one rank vector per draw.
pub fn measure_ranks(case: &RankCase, cfg: &OfdmConfig, draws: usize, seed: u64) -> Result<Vec<Vec<usize>>> {
    let sc = case.scenario(cfg)?;
    let policy = RankPolicy::new(case.b_antennas, cfg);
    let dft = Dft::new(cfg.n_subcarriers);
    (0..draws as u64)
        .into_par_iter()
        .map(|d| {
            let mut rngs = BlockRngs::new(&mut block_rng(seed, 0, d));
            let ch = draw_block_channel(&sc, &mut rngs.channel)?;
            let grid = interference_grid(&sc, &ch, 0.0, &mut rngs.jammer, &mut rngs.noise, &dft)?;
            Ok(measured_rank(&grid, &policy))
        })
        .collect()
}

pub fn rank_study(cases: &[RankCase], cfg: &OfdmConfig, draws: usize, seed: u64) -> Result<Vec<RankSummary>> {
    ensure!(draws >= 1, Config, "rank study needs at least one draw");
    cases
        .iter()
        .map(|case| {
            let ranks = measure_ranks(case, cfg, draws, seed)?;
            let expected = case.expected_rank();
            let flat: Vec<usize> = ranks.iter().flatten().copied().collect();
            Ok(RankSummary {
                case: case.clone(),
                expected_rank: expected,
                draws,
                conforming_draws: ranks.iter().filter(|r| r.iter().all(|&x| x == expected)).count(),
                subcarrier_samples: flat.len(),
                conforming_samples: flat.iter().filter(|&&x| x == expected).count(),
                min_rank: flat.iter().copied().min().unwrap_or(0),
                max_rank: flat.iter().copied().max().unwrap_or(0),
            })
        })
        .collect()
}

/// Data-subcarrier interference (jammer plus noise at `snr_db`, `None` for
/// noise-free) of block `block`, drawn from the same streams as
/// [`fraction_study`].
pub fn interference_block(sc: &Scenario, block: u64, snr_db: Option<f64>) -> Result<SubcarrierGrid> {
    sc.validate()?;
    interference_with(sc, block, snr_db, &Dft::new(sc.ofdm.n_subcarriers))
}

fn interference_with(sc: &Scenario, block: u64, snr_db: Option<f64>, dft: &Dft) -> Result<SubcarrierGrid> {
    let mut rngs = BlockRngs::new(&mut block_rng(sc.seed, 0, block));
    let ch = draw_block_channel(sc, &mut rngs.channel)?;
    let noise_var = snr_db.map_or(0.0, |s| sc.noise_var(s));
    interference_grid(sc, &ch, noise_var, &mut rngs.jammer, &mut rngs.noise, dft)
}

/// Ordered interference fractions over `sc.blocks` blocks and all data
/// subcarriers. Interference is the received jammer signal plus noise at
/// `snr_db` (`None` for noise-free).
pub fn fraction_study(sc: &Scenario, snr_db: Option<f64>, kind: FractionKind) -> Result<SingularFractionStats> {
    sc.validate()?;
    ensure!(sc.jammer.mode != JammerMode::None, Config, "fraction study needs a jammer");
    let dft = Dft::new(sc.ofdm.n_subcarriers);
    let per_block: Vec<Vec<Vec<f64>>> = (0..sc.blocks)
        .into_par_iter()
        .map(|blk| singular_fractions(&interference_with(sc, blk, snr_db, &dft)?, kind))
        .collect::<Result<_>>()?;
    let samples: Vec<Vec<f64>> = per_block.into_iter().flatten().collect();
    aggregate_stats(&samples)
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Error, Result};
use crate::jammer::{JammerMode, JammerSpec};
use crate::ofdm::OfdmConfig;

/// How the receiver learns the interference subspace of a block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SubspaceMode {
    /// From the noise-free jammer contribution of the data period itself.
    #[default]
    Genie,
    /// From jammer-plus-noise samples of a silent training period of `M`
    /// symbols that precedes the data (same channel, fresh jammer samples).
    Estimated,
}

impl std::str::FromStr for SubspaceMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "genie" => Ok(SubspaceMode::Genie),
            "estimated" => Ok(SubspaceMode::Estimated),
            other => Err(Error::Config(format!("unknown subspace mode '{other}'"))),
        }
    }
}

/// One simulated system. Defaults: `B = 8`, `U = 2`, `N = 64` with 48 data
/// bins, `P = 16`, `M = 50`, four Rayleigh taps for every link and a
/// single-antenna violating jammer 25 dB above the signal.
///
/// The SNR relates the expected legitimate receive energy per antenna and
/// data subcarrier, `E = U * L_h` for unit-energy symbols and unit-variance
/// taps, to the noise: `snr = E / (B * N0 * |K| / N)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    pub ofdm: OfdmConfig,
    pub b_antennas: usize,
    pub u_streams: usize,
    pub l_taps: usize,
    /// Tap count for jammer antennas whose `taps_per_antenna` is not given.
    pub l_jam: usize,
    pub jammer: JammerSpec,
    pub null_dims: usize,
    pub snr_grid_db: Vec<f64>,
    pub blocks: u64,
    pub seed: u64,
    pub subspace_mode: SubspaceMode,
}

impl Default for Scenario {
    fn default() -> Self {
        Self {
            id: "default".into(),
            ofdm: OfdmConfig::default(),
            b_antennas: 8,
            u_streams: 2,
            l_taps: 4,
            l_jam: 4,
            jammer: JammerSpec::default(),
            null_dims: 1,
            snr_grid_db: snr_range(0.0, 20.0, 2.0).expect("static grid"),
            blocks: 2000,
            seed: 0,
            subspace_mode: SubspaceMode::Genie,
        }
    }
}

impl Scenario {
    pub fn from_json_str(s: &str) -> Result<Self> {
        let sc: Scenario = serde_json::from_str(s)?;
        sc.resolved()
    }

    pub fn from_json_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json_str(&text)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Fills unspecified jammer tap counts from `l_jam` and validates.
    pub fn resolved(mut self) -> Result<Self> {
        if self.jammer.taps_per_antenna.is_empty() {
            self.jammer.taps_per_antenna = vec![self.l_jam; self.jammer.antennas];
        }
        self.validate()?;
        Ok(self)
    }

    /// Replaces the jammer mode, keeping tap counts where they still apply.
    pub fn with_jammer_mode(mut self, mode: JammerMode) -> Self {
        self.jammer = self.jammer.with_mode(mode, self.l_jam);
        self
    }

    pub fn validate(&self) -> Result<()> {
        self.ofdm.validate()?;
        self.jammer.validate()?;
        let (b, u, d, p) = (self.b_antennas, self.u_streams, self.null_dims, self.ofdm.cp_len);
        ensure!(b >= 1 && u >= 1, Config, "need at least one antenna on each side");
        ensure!(d < b, Config, "cannot null {} of {} receive dimensions", d, b);
        ensure!(
            u <= b - d,
            Config,
            "{} streams cannot be separated in {} dimensions left after nulling {}",
            u,
            b - d,
            d
        );
        ensure!(
            self.l_taps >= 1 && self.l_taps <= p + 1,
            Config,
            "legitimate channel with {} taps needs cyclic prefix >= {}, have {}",
            self.l_taps,
            self.l_taps.saturating_sub(1),
            p
        );
        ensure!(self.l_jam >= 1, Config, "l_jam must be positive");
        for &l in &self.jammer.taps_per_antenna {
            ensure!(
                l <= p + 1,
                Config,
                "jammer channel with {} taps needs cyclic prefix >= {}, have {}",
                l,
                l - 1,
                p
            );
        }
        ensure!(!self.snr_grid_db.is_empty(), Config, "empty SNR grid");
        ensure!(
            self.snr_grid_db.iter().all(|s| !s.is_nan()),
            Config,
            "SNR grid contains NaN"
        );
        ensure!(self.blocks >= 1, Config, "need at least one block");
        ensure!(
            self.ofdm.symbols_per_block >= d,
            IllPosed,
            "{} symbols per block cannot identify {} interference dimensions",
            self.ofdm.symbols_per_block,
            d
        );
        Ok(())
    }

    /// Noise variance per complex sample; `+inf` dB gives a noise-free link.
    pub fn noise_var(&self, snr_db: f64) -> f64 {
        let signal = (self.u_streams * self.l_taps) as f64;
        let active = self.ofdm.n_data() as f64 / self.ofdm.n_subcarriers as f64;
        signal / (self.b_antennas as f64 * active * 10f64.powf(snr_db / 10.0))
    }

    /// Payload bits per block: `|K| * M * U * 2`.
    pub fn bits_per_block(&self) -> u64 {
        (self.ofdm.n_data() * self.ofdm.symbols_per_block * self.u_streams * 2) as u64
    }
}

/// Inclusive grid `start, start + step, ..., <= stop`.
pub fn snr_range(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    ensure!(
        step > 0.0 && start.is_finite() && stop.is_finite(),
        Config,
        "SNR range needs finite bounds and a positive step"
    );
    ensure!(stop >= start, Config, "SNR range stop {} below start {}", stop, start);
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + step * i as f64).collect())
}

/// Parses `A:B:STEP`.
pub fn parse_snr_range(s: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = s.split(':').collect();
    ensure!(parts.len() == 3, Config, "SNR range must look like A:B:STEP, got '{}'", s);
    let num = |p: &str| {
        p.trim()
            .parse::<f64>()
            .map_err(|_| Error::Config(format!("bad number '{p}' in SNR range")))
    };
    snr_range(num(parts[0])?, num(parts[1])?, num(parts[2])?)
}

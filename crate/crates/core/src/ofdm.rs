//! OFDM numerology, unitary DFT and cyclic-prefix framing.
//!
//! Subcarrier indices are 0-based throughout the crate: subcarrier `k`
//! corresponds to DFT bin `k` in `0..N`. The DFT pair is unitary (scaled by
//! `1/sqrt(N)` in both directions); the `sqrt(N)` gain of cyclic convolution
//! appears explicitly wherever a channel is applied in the frequency domain.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Static OFDM numerology.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OfdmConfig {
    pub n_subcarriers: usize,
    pub cp_len: usize,
    /// Data-carrying DFT bins (0-based, strictly increasing after validation).
    pub data_subcarriers: Vec<usize>,
    /// OFDM symbols per coherence block.
    pub symbols_per_block: usize,
}

impl Default for OfdmConfig {
    fn default() -> Self {
        Self {
            n_subcarriers: 64,
            cp_len: 16,
            data_subcarriers: legacy_wifi_data_bins(64),
            symbols_per_block: 50,
        }
    }
}

/// The 48 data bins of the 20 MHz 802.11a/g/n legacy layout: logical
/// subcarriers -26..=26 without DC and without the pilots at +-7 and +-21,
/// wrapped onto DFT bins `0..n`.
pub fn legacy_wifi_data_bins(n: usize) -> Vec<usize> {
    let mut bins: Vec<usize> = (-26i64..=26)
        .filter(|k| *k != 0 && k.abs() != 7 && k.abs() != 21)
        .map(|k| k.rem_euclid(n as i64) as usize)
        .collect();
    bins.sort_unstable();
    bins
}

impl OfdmConfig {
    pub fn new(
        n_subcarriers: usize,
        cp_len: usize,
        data_subcarriers: Vec<usize>,
        symbols_per_block: usize,
    ) -> Result<Self> {
        let cfg = Self {
            n_subcarriers,
            cp_len,
            data_subcarriers,
            symbols_per_block,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Numerology with every subcarrier carrying data.
    pub fn full(n_subcarriers: usize, cp_len: usize, symbols_per_block: usize) -> Result<Self> {
        Self::new(
            n_subcarriers,
            cp_len,
            (0..n_subcarriers).collect(),
            symbols_per_block,
        )
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(self.n_subcarriers >= 1, Config, "n_subcarriers must be positive");
        ensure!(
            self.cp_len <= self.n_subcarriers,
            Config,
            "cyclic prefix length {} exceeds N = {}",
            self.cp_len,
            self.n_subcarriers
        );
        ensure!(self.symbols_per_block >= 1, Config, "symbols_per_block must be positive");
        ensure!(!self.data_subcarriers.is_empty(), Config, "no data subcarriers");
        for w in self.data_subcarriers.windows(2) {
            ensure!(
                w[0] < w[1],
                Config,
                "data subcarriers must be strictly increasing (found {} then {})",
                w[0],
                w[1]
            );
        }
        let last = *self.data_subcarriers.last().unwrap();
        ensure!(
            last < self.n_subcarriers,
            Config,
            "data subcarrier {} out of range for N = {}",
            last,
            self.n_subcarriers
        );
        Ok(())
    }

    /// Samples per OFDM symbol including the prefix.
    pub fn symbol_len(&self) -> usize {
        self.n_subcarriers + self.cp_len
    }

    /// Samples in one serialized block of `symbols_per_block` OFDM symbols.
    pub fn block_len(&self) -> usize {
        self.symbol_len() * self.symbols_per_block
    }

    /// Offset of the receive window of symbol `m` within a serialized block.
    pub fn window_start(&self, m: usize) -> usize {
        m * self.symbol_len() + self.cp_len
    }

    pub fn n_data(&self) -> usize {
        self.data_subcarriers.len()
    }
}

/// Planned forward/inverse unitary DFT of a fixed size.
#[derive(Clone)]
pub struct Dft {
    n: usize,
    scale: f64,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for Dft {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Dft").field("n", &self.n).finish()
    }
}

impl Dft {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "DFT size must be positive");
        let mut planner = FftPlanner::new();
        Self {
            n,
            scale: 1.0 / (n as f64).sqrt(),
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn forward_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf.len())?;
        self.forward.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
        Ok(())
    }

    pub fn inverse_in_place(&self, buf: &mut [Complex64]) -> Result<()> {
        self.check(buf.len())?;
        self.inverse.process(buf);
        buf.iter_mut().for_each(|v| *v *= self.scale);
        Ok(())
    }

    pub fn forward(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut buf = x.to_vec();
        self.forward_in_place(&mut buf)?;
        Ok(buf)
    }

    pub fn inverse(&self, x: &[Complex64]) -> Result<Vec<Complex64>> {
        let mut buf = x.to_vec();
        self.inverse_in_place(&mut buf)?;
        Ok(buf)
    }

    fn check(&self, len: usize) -> Result<()> {
        ensure!(
            len == self.n,
            Dimension,
            "DFT of size {} applied to {} samples",
            self.n,
            len
        );
        Ok(())
    }
}

/// Unitary DFT, `X[k] = N^{-1/2} sum_n x[n] exp(-2 pi i k n / N)`.
///
/// Plans a transform per call; use [`Dft`] in loops.
pub fn dft(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    ensure!(n > 0, Dimension, "DFT size must be positive");
    Dft::new(n).forward(x)
}

/// Inverse of [`dft`].
pub fn idft(x: &[Complex64], n: usize) -> Result<Vec<Complex64>> {
    ensure!(n > 0, Dimension, "DFT size must be positive");
    Dft::new(n).inverse(x)
}

/// Prepends the last `P` samples of a length-`N` symbol.
pub fn add_cyclic_prefix(x: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    let (n, p) = (cfg.n_subcarriers, cfg.cp_len);
    ensure!(p <= n, Config, "cyclic prefix length {} exceeds N = {}", p, n);
    ensure!(x.len() == n, Dimension, "expected {} samples, got {}", n, x.len());
    let mut out = Vec::with_capacity(n + p);
    out.extend_from_slice(&x[n - p..]);
    out.extend_from_slice(x);
    Ok(out)
}

/// Discards the prefix and any reverberation tail, returning the `N`
/// samples that follow the first `P`.
pub fn strip_and_window(y: &[Complex64], cfg: &OfdmConfig) -> Result<Vec<Complex64>> {
    let (n, p) = (cfg.n_subcarriers, cfg.cp_len);
    ensure!(
        y.len() >= n + p,
        Framing,
        "need at least {} samples to window an OFDM symbol, got {}",
        n + p,
        y.len()
    );
    Ok(y[p..p + n].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64 as C;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C {
        C::new(re, 0.0)
    }

    fn random_vec(rng: &mut impl Rng, n: usize) -> Vec<C> {
        (0..n)
            .map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect()
    }

    fn brute_dft(x: &[C]) -> Vec<C> {
        let n = x.len();
        (0..n)
            .map(|k| {
                x.iter().enumerate().fold(C::default(), |acc, (t, v)| {
                    let ang = -2.0 * std::f64::consts::PI * (k * t) as f64 / n as f64;
                    acc + v * C::from_polar(1.0, ang)
                }) / (n as f64).sqrt()
            })
            .collect()
    }

    fn max_err(a: &[C], b: &[C]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    fn norm(a: &[C]) -> f64 {
        a.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn impulse_and_dc() {
        let x = dft(&[c(1.0), c(0.0), c(0.0), c(0.0)], 4).unwrap();
        assert!(x.iter().all(|v| (v - c(0.5)).norm() < 1e-15));
        let x = dft(&[c(1.0); 4], 4).unwrap();
        assert!(max_err(&x, &[c(2.0), c(0.0), c(0.0), c(0.0)]) < 1e-15);
        let t = idft(&[c(2.0), c(0.0), c(0.0), c(0.0)], 4).unwrap();
        assert!(max_err(&t, &[c(1.0); 4]) < 1e-15);
    }

    #[test]
    fn idft_of_unit_vector_is_exponential() {
        let n = 16;
        for k in [1usize, 5, 15] {
            let mut e = vec![C::default(); n];
            e[k] = c(1.0);
            let t = idft(&e, n).unwrap();
            for (i, v) in t.iter().enumerate() {
                let want = C::from_polar(
                    1.0 / (n as f64).sqrt(),
                    2.0 * std::f64::consts::PI * (k * i) as f64 / n as f64,
                );
                assert!((v - want).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn matches_brute_force_and_round_trips() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let x = random_vec(&mut rng, 64);
        let fx = dft(&x, 64).unwrap();
        assert!(max_err(&fx, &brute_dft(&x)) < 1e-12);
        let back = idft(&fx, 64).unwrap();
        assert!(max_err(&back, &x) / norm(&x) < 1e-12);
        let fwd = dft(&idft(&x, 64).unwrap(), 64).unwrap();
        assert!(max_err(&fwd, &x) / norm(&x) < 1e-12);
    }

    #[test]
    fn length_mismatch_is_dimension_error() {
        let err = dft(&[c(1.0); 3], 4).unwrap_err();
        assert!(matches!(err, crate::Error::Dimension(_)));
    }

    #[test]
    fn cyclic_prefix_layout() {
        let cfg = OfdmConfig::full(4, 2, 1).unwrap();
        let x = [c(1.0), c(2.0), c(3.0), c(4.0)];
        let y = add_cyclic_prefix(&x, &cfg).unwrap();
        assert_eq!(y, vec![c(3.0), c(4.0), c(1.0), c(2.0), c(3.0), c(4.0)]);

        let cfg0 = OfdmConfig::full(4, 0, 1).unwrap();
        assert_eq!(add_cyclic_prefix(&x, &cfg0).unwrap(), x.to_vec());

        let cfg = OfdmConfig::default();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let x = random_vec(&mut rng, 64);
        let y = add_cyclic_prefix(&x, &cfg).unwrap();
        assert_eq!(y.len(), 80);
        assert_eq!(&y[..16], &x[48..]);
        assert_eq!(&y[16..], &x[..]);
    }

    #[test]
    fn prefix_longer_than_symbol_is_rejected() {
        let cfg = OfdmConfig {
            n_subcarriers: 4,
            cp_len: 5,
            data_subcarriers: vec![0],
            symbols_per_block: 1,
        };
        assert!(matches!(
            add_cyclic_prefix(&[c(0.0); 4], &cfg),
            Err(crate::Error::Config(_))
        ));
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn window_indices() {
        let cfg = OfdmConfig::full(4, 2, 1).unwrap();
        let y: Vec<C> = (1..=7).map(|v| c(v as f64)).collect();
        assert_eq!(
            strip_and_window(&y, &cfg).unwrap(),
            vec![c(3.0), c(4.0), c(5.0), c(6.0)]
        );
        assert!(matches!(
            strip_and_window(&y[..5], &cfg),
            Err(crate::Error::Framing(_))
        ));
    }

    #[test]
    fn default_layout_has_48_bins_without_dc() {
        let cfg = OfdmConfig::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.n_data(), 48);
        assert!(!cfg.data_subcarriers.contains(&0));
        for pilot in [7usize, 21, 43, 57] {
            assert!(!cfg.data_subcarriers.contains(&pilot));
        }
        assert!(cfg.data_subcarriers.iter().all(|k| !(27..=37).contains(k)));
    }

    #[test]
    fn duplicate_or_out_of_range_bins_rejected() {
        assert!(OfdmConfig::new(8, 2, vec![1, 1], 1).is_err());
        assert!(OfdmConfig::new(8, 2, vec![1, 8], 1).is_err());
        assert!(OfdmConfig::new(8, 2, vec![3, 1], 1).is_err());
    }

    proptest! {
        #[test]
        fn dft_is_unitary(
            re in prop::collection::vec(-10.0f64..10.0, 1..80),
            seed in any::<u64>(),
        ) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let x: Vec<C> = re.iter().map(|r| C::new(*r, rng.random_range(-10.0..10.0))).collect();
            let n = x.len();
            let fx = dft(&x, n).unwrap();
            let (a, b) = (norm(&x), norm(&fx));
            prop_assert!((a - b).abs() <= 1e-10 * a.max(1e-300));
            let back = idft(&fx, n).unwrap();
            prop_assert!(max_err(&back, &x) <= 1e-12 * a.max(1.0));
        }
    }
}

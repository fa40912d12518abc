//! Per-subcarrier interference nulling and zero-forcing detection.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{Cholesky, DVector};
use num_complex::Complex64;

use crate::error::{ensure, Error, Result};
use crate::linalg::{left_svd, CMatrix};

/// Receive vectors on a set of subcarriers over one coherence block.
/// `samples[i]` is the `B x M` matrix for subcarrier `subcarriers[i]`, one
/// column per OFDM symbol.
#[derive(Debug, Clone, PartialEq)]
pub struct SubcarrierGrid {
    pub subcarriers: Vec<usize>,
    pub samples: Vec<CMatrix>,
}

impl SubcarrierGrid {
    pub fn new(subcarriers: Vec<usize>, samples: Vec<CMatrix>) -> Result<Self> {
        ensure!(
            subcarriers.len() == samples.len(),
            Dimension,
            "{} subcarrier indices for {} sample matrices",
            subcarriers.len(),
            samples.len()
        );
        if let Some(first) = samples.first() {
            let shape = first.shape();
            ensure!(
                samples.iter().all(|s| s.shape() == shape),
                Dimension,
                "sample matrices differ in shape"
            );
        }
        Ok(Self {
            subcarriers,
            samples,
        })
    }

    /// Zero-filled grid of `b x m` matrices.
    pub fn zeros(subcarriers: Vec<usize>, b: usize, m: usize) -> Self {
        let samples = vec![CMatrix::zeros(b, m); subcarriers.len()];
        Self {
            subcarriers,
            samples,
        }
    }

    pub fn antennas(&self) -> usize {
        self.samples.first().map_or(0, |s| s.nrows())
    }

    pub fn symbols(&self) -> usize {
        self.samples.first().map_or(0, |s| s.ncols())
    }

    pub fn len(&self) -> usize {
        self.subcarriers.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subcarriers.is_empty()
    }

    pub fn energy(&self) -> f64 {
        self.samples.iter().map(crate::linalg::frobenius_sq).sum()
    }
}

/// Orthonormal bases `U[k]` (`B x (B - d)`) of the complement of the `d`
/// strongest interference directions on each subcarrier.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionBank {
    pub null_dims: usize,
    pub subcarriers: Vec<usize>,
    pub bases: Vec<CMatrix>,
}

impl ProjectionBank {
    /// `U[i]^H H` for the `i`th subcarrier of the bank.
    pub fn project_matrix(&self, i: usize, h: &CMatrix) -> Result<CMatrix> {
        let u = &self.bases[i];
        ensure!(
            u.nrows() == h.nrows(),
            Dimension,
            "projection for {} antennas applied to {} rows",
            u.nrows(),
            h.nrows()
        );
        Ok(u.ad_mul(h))
    }
}

/// Keeps the left singular vectors `d..B` of each subcarrier's `B x M`
/// interference matrix, i.e. nulls the `d` dimensions that carry the most
/// interference.
pub fn estimate_interference_basis(interf: &SubcarrierGrid, d: usize) -> Result<ProjectionBank> {
    let b = interf.antennas();
    ensure!(!interf.is_empty(), Dimension, "empty interference grid");
    ensure!(
        d < b,
        Config,
        "cannot null {} of {} receive dimensions",
        d,
        b
    );
    ensure!(
        interf.symbols() >= d,
        IllPosed,
        "{} interference samples cannot identify {} dimensions",
        interf.symbols(),
        d
    );
    let bases = interf
        .samples
        .iter()
        .map(|y| {
            if d == 0 {
                return CMatrix::identity(b, b);
            }
            let (u, _) = left_svd(y);
            u.columns(d, b - d).into_owned()
        })
        .collect();
    Ok(ProjectionBank {
        null_dims: d,
        subcarriers: interf.subcarriers.clone(),
        bases,
    })
}

/// `ybar[k, m] = U[k]^H y[k, m]`.
pub fn project_grid(grid: &SubcarrierGrid, bank: &ProjectionBank) -> Result<SubcarrierGrid> {
    ensure!(
        grid.subcarriers == bank.subcarriers,
        Dimension,
        "grid and projection bank cover different subcarriers"
    );
    let samples = grid
        .samples
        .iter()
        .enumerate()
        .map(|(i, y)| bank.project_matrix(i, y))
        .collect::<Result<Vec<_>>>()?;
    Ok(SubcarrierGrid {
        subcarriers: grid.subcarriers.clone(),
        samples,
    })
}

/// Zero-forcing equalizer `(H^H H)^-1 H^H` for a tall full-column-rank `H`.
#[derive(Debug, Clone)]
pub struct ZeroForcing {
    filter: CMatrix,
}

impl ZeroForcing {
    /// Smallest accepted ratio between the extreme squared Cholesky pivots
    /// of the Gram matrix.
    const MIN_PIVOT_RATIO: f64 = 1e-14;

    pub fn new(h: &CMatrix) -> Result<Self> {
        ensure!(
            h.ncols() >= 1 && h.ncols() <= h.nrows(),
            Dimension,
            "zero-forcing needs a tall channel, got {}x{}",
            h.nrows(),
            h.ncols()
        );
        let gram = h.ad_mul(h);
        let chol = Cholesky::new(gram)
            .ok_or_else(|| Error::IllPosed("rank-deficient channel matrix".into()))?;
        let diag = chol.l_dirty().diagonal();
        let (lo, hi) = diag.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), v| {
            (lo.min(v.norm_sqr()), hi.max(v.norm_sqr()))
        });
        ensure!(
            lo > Self::MIN_PIVOT_RATIO * hi,
            IllPosed,
            "rank-deficient channel matrix"
        );
        Ok(Self {
            filter: chol.solve(&h.adjoint()),
        })
    }

    pub fn detect(&self, y: &DVector<Complex64>) -> Result<DVector<Complex64>> {
        ensure!(
            y.len() == self.filter.ncols(),
            Dimension,
            "receive vector has {} entries, channel has {} rows",
            y.len(),
            self.filter.ncols()
        );
        Ok(&self.filter * y)
    }

    /// Equalizes every column of a `rows x M` matrix.
    pub fn detect_block(&self, y: &CMatrix) -> Result<CMatrix> {
        ensure!(
            y.nrows() == self.filter.ncols(),
            Dimension,
            "receive block has {} rows, channel has {}",
            y.nrows(),
            self.filter.ncols()
        );
        Ok(&self.filter * y)
    }
}

/// One-shot zero-forcing estimate of the transmit vector.
pub fn zf_detect(h: &CMatrix, y: &DVector<Complex64>) -> Result<DVector<Complex64>> {
    ZeroForcing::new(h)?.detect(y)
}

/// Gray-mapped unit-energy QPSK: the first bit of each pair selects the sign
/// of the real part and the second the imaginary part, `0 -> +`, so `00`
/// maps to `(1 + i) / sqrt(2)`.
pub fn qpsk_map(bits: &[u8]) -> Result<Vec<Complex64>> {
    ensure!(bits.len() % 2 == 0, Framing, "QPSK needs an even number of bits, got {}", bits.len());
    let level = |b: u8| if b == 0 { FRAC_1_SQRT_2 } else { -FRAC_1_SQRT_2 };
    Ok(bits
        .chunks_exact(2)
        .map(|p| Complex64::new(level(p[0]), level(p[1])))
        .collect())
}

pub fn qpsk_demap(symbols: &[Complex64]) -> Vec<u8> {
    symbols
        .iter()
        .flat_map(|s| [u8::from(s.re < 0.0), u8::from(s.im < 0.0)])
        .collect()
}

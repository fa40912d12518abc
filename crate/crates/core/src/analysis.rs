//! Interference subspace statistics: ordered singular-value fractions and
//! numerical rank per subcarrier.

use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};
use crate::jammer::RankPolicy;
use crate::linalg::singular_values;
use crate::receiver::SubcarrierGrid;

/// How each ordered dimension's share of the interference is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FractionKind {
    /// `sigma_b / sum(sigma)`
    #[default]
    Singular,
    /// `sigma_b^2 / sum(sigma^2)`, the share of interference energy.
    Energy,
}

/// Mean and population standard deviation of each ordered fraction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularFractionStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub samples: usize,
}

fn padded_singular_values(y: &crate::linalg::CMatrix) -> Vec<f64> {
    let mut sv = singular_values(y);
    sv.resize(y.nrows(), 0.0);
    sv
}

/// One non-increasing fraction vector of length `B` per subcarrier.
pub fn singular_fractions(interf: &SubcarrierGrid, kind: FractionKind) -> Result<Vec<Vec<f64>>> {
    ensure!(!interf.is_empty(), Dimension, "empty interference grid");
    interf
        .samples
        .iter()
        .zip(&interf.subcarriers)
        .map(|(y, k)| {
            let mut sv = padded_singular_values(y);
            if kind == FractionKind::Energy {
                sv.iter_mut().for_each(|s| *s *= *s);
            }
            let total: f64 = sv.iter().sum();
            ensure!(total > 0.0, IllPosed, "no interference on subcarrier {}", k);
            Ok(sv.into_iter().map(|s| s / total).collect())
        })
        .collect()
}

/// Numerical rank of the interference on each subcarrier.
pub fn measured_rank(interf: &SubcarrierGrid, policy: &RankPolicy) -> Vec<usize> {
    interf
        .samples
        .iter()
        .map(|y| policy.rank(&singular_values(y)))
        .collect()
}

pub fn aggregate_stats(samples: &[Vec<f64>]) -> Result<SingularFractionStats> {
    ensure!(!samples.is_empty(), Dimension, "no fraction samples to aggregate");
    let dims = samples[0].len();
    ensure!(
        samples.iter().all(|s| s.len() == dims),
        Dimension,
        "fraction vectors differ in length"
    );
    let n = samples.len() as f64;
    let mut mean = vec![0.0; dims];
    for s in samples {
        for (m, v) in mean.iter_mut().zip(s) {
            *m += v;
        }
    }
    mean.iter_mut().for_each(|m| *m /= n);
    let mut var = vec![0.0; dims];
    for s in samples {
        for ((acc, v), m) in var.iter_mut().zip(s).zip(&mean) {
            *acc += (v - m) * (v - m);
        }
    }
    let std = var.into_iter().map(|v| (v / n).sqrt()).collect();
    Ok(SingularFractionStats {
        mean,
        std,
        samples: samples.len(),
    })
}

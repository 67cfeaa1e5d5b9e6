use ndarray::ArrayView2;
use serde::{Deserialize, Serialize};

use super::MetricError;
use crate::dsp::CepstralFeatures;

/// The conventional `10 * sqrt(2) / ln 10` dB factor, applied only when
/// [`McdConfig::db_scale`] is set.
pub const MCD_DB_SCALE: f64 = 6.141_851_463_713_754;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct McdConfig {
    /// Coefficients `1..=k` enter the distance; c0 is skipped.
    pub k: usize,
    pub db_scale: bool,
}

impl Default for McdConfig {
    fn default() -> Self {
        Self { k: 13, db_scale: false }
    }
}

/// `(1/T) * sum_t sqrt(sum_{k=1..K} (f[t,k] - g[t,k])^2)` over aligned sequences.
pub fn mcd(reference: &CepstralFeatures, predicted: &CepstralFeatures, config: &McdConfig) -> Result<f64, MetricError> {
    let raw = mcd_frames(reference.frames.view(), predicted.frames.view(), config.k)?;
    Ok(if config.db_scale { raw * MCD_DB_SCALE } else { raw })
}

pub fn mcd_frames(reference: ArrayView2<f64>, predicted: ArrayView2<f64>, k: usize) -> Result<f64, MetricError> {
    if reference.nrows() == 0 {
        return Err(MetricError::EmptyReference);
    }
    if reference.nrows() != predicted.nrows() {
        return Err(MetricError::LengthMismatch { reference: reference.nrows(), predicted: predicted.nrows() });
    }
    let available = reference.ncols().min(predicted.ncols()).saturating_sub(1);
    if k > available {
        return Err(MetricError::NotEnoughCoefficients { k, available });
    }
    let total: f64 = reference
        .rows()
        .into_iter()
        .zip(predicted.rows())
        .map(|(r, p)| (1..=k).map(|i| (r[i] - p[i]).powi(2)).sum::<f64>().sqrt())
        .sum();
    Ok(total / reference.nrows() as f64)
}

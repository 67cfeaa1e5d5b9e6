use std::f64::consts::PI;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{DspError, FrameSpec, MelFeatures};

/// Smallest number of cepstral coefficients (beyond c0) an MFCC matrix may carry.
pub const MIN_CEPSTRAL_COEFFS: usize = 13;

/// MFCC matrix; row `t` holds coefficients `c0..=cK` of frame `t`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CepstralFeatures {
    pub frames: Array2<f64>,
    pub frame_spec: FrameSpec,
}

impl CepstralFeatures {
    pub fn num_frames(&self) -> usize {
        self.frames.nrows()
    }

    /// K, the number of coefficients stored after c0.
    pub fn num_coeffs(&self) -> usize {
        self.frames.ncols().saturating_sub(1)
    }
}

/// First `rows` rows of the orthonormal DCT-II matrix of size `n`.
///
/// `G[k][m] = s_k cos(pi k (m + 1/2) / n)` with `s_0 = sqrt(1/n)` and `s_k = sqrt(2/n)`.
pub fn dct_ii_matrix(rows: usize, n: usize) -> Array2<f64> {
    let nf = n as f64;
    Array2::from_shape_fn((rows, n), |(k, m)| {
        let scale = if k == 0 { (1.0 / nf).sqrt() } else { (2.0 / nf).sqrt() };
        scale * (PI * k as f64 * (m as f64 + 0.5) / nf).cos()
    })
}

/// Orthonormal DCT-II along the mel axis, keeping `c0..=c{num_coeffs}`.
pub fn mfcc(mel: &MelFeatures, num_coeffs: usize) -> Result<CepstralFeatures, DspError> {
    let bins = mel.mel_bins();
    if num_coeffs < MIN_CEPSTRAL_COEFFS {
        return Err(DspError::Config(format!(
            "at least {MIN_CEPSTRAL_COEFFS} cepstral coefficients are required, got {num_coeffs}"
        )));
    }
    if num_coeffs + 1 > bins {
        return Err(DspError::Config(format!("{num_coeffs} coefficients plus c0 exceed {bins} mel bins")));
    }
    let dct = dct_ii_matrix(num_coeffs + 1, bins);
    Ok(CepstralFeatures { frames: mel.frames.dot(&dct.t()), frame_spec: mel.frame_spec })
}

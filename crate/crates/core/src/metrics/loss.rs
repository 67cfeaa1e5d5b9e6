use ndarray::ArrayView2;

use super::MetricError;
use crate::dsp::MelFeatures;

/// Combined L1 + L2 loss: `mean(|r - p|) + mean((r - p)^2)` over all entries.
pub fn spectrogram_loss(reference: &MelFeatures, predicted: &MelFeatures) -> Result<f64, MetricError> {
    spectrogram_loss_raw(reference.frames.view(), predicted.frames.view())
}

pub fn spectrogram_loss_raw(reference: ArrayView2<f64>, predicted: ArrayView2<f64>) -> Result<f64, MetricError> {
    if reference.dim() != predicted.dim() {
        return Err(MetricError::ShapeMismatch { reference: reference.dim(), predicted: predicted.dim() });
    }
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let n = reference.len() as f64;
    let (l1, l2) = reference.iter().zip(predicted.iter()).fold((0.0, 0.0), |(l1, l2), (r, p)| {
        let d = r - p;
        (l1 + d.abs(), l2 + d * d)
    });
    Ok(l1 / n + l2 / n)
}

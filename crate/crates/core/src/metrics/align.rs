use ndarray::{Array1, Array2};

use super::MetricError;
use crate::dsp::{CepstralFeatures, PitchContour};

/// Reference and prediction of identical length.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignedPair<F> {
    pub reference: Vec<F>,
    pub predicted: Vec<F>,
}

impl<F> AlignedPair<F> {
    pub fn len(&self) -> usize {
        self.reference.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reference.is_empty()
    }
}

/// Clips `predicted` to the reference length, or right-pads it with `pad`.
pub fn align_to_reference<F: Clone>(reference: &[F], predicted: &[F], pad: F) -> Result<AlignedPair<F>, MetricError> {
    if reference.is_empty() {
        return Err(MetricError::EmptyReference);
    }
    let n = reference.len();
    let mut aligned: Vec<F> = predicted.iter().take(n).cloned().collect();
    aligned.resize(n, pad);
    Ok(AlignedPair { reference: reference.to_vec(), predicted: aligned })
}

/// Aligns pitch contours, padding with unvoiced zero-pitch frames.
pub fn align_contours(
    reference: &PitchContour,
    predicted: &PitchContour,
) -> Result<(PitchContour, PitchContour), MetricError> {
    if reference.hop_ms() != predicted.hop_ms() {
        return Err(MetricError::FrameRateMismatch { reference: reference.hop_ms(), predicted: predicted.hop_ms() });
    }
    let r: Vec<_> = reference.frames().collect();
    let p: Vec<_> = predicted.frames().collect();
    let pair = align_to_reference(&r, &p, (0.0, false))?;
    let hop = reference.hop_ms();
    Ok((PitchContour::from_frames(pair.reference, hop)?, PitchContour::from_frames(pair.predicted, hop)?))
}

/// Aligns cepstral sequences, padding with `pad_row`.
pub fn align_cepstra(
    reference: &CepstralFeatures,
    predicted: &CepstralFeatures,
    pad_row: &Array1<f64>,
) -> Result<(CepstralFeatures, CepstralFeatures), MetricError> {
    let width = reference.frames.ncols();
    if predicted.frames.ncols() != width || pad_row.len() != width {
        return Err(MetricError::ShapeMismatch {
            reference: reference.frames.dim(),
            predicted: predicted.frames.dim(),
        });
    }
    let rows = |m: &Array2<f64>| m.rows().into_iter().map(|r| r.to_owned()).collect::<Vec<_>>();
    let pair = align_to_reference(&rows(&reference.frames), &rows(&predicted.frames), pad_row.clone())?;
    let stack = |rows: Vec<Array1<f64>>| Array2::from_shape_fn((rows.len(), width), |(t, k)| rows[t][k]);
    Ok((
        CepstralFeatures { frames: stack(pair.reference), frame_spec: reference.frame_spec },
        CepstralFeatures { frames: stack(pair.predicted), frame_spec: reference.frame_spec },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn equal_lengths_are_untouched() {
        let r: Vec<i32> = (0..10).collect();
        let pair = align_to_reference(&r, &r, -1).unwrap();
        assert_eq!(pair.predicted, r);
    }

    #[test]
    fn short_prediction_is_padded_unvoiced() {
        let reference = PitchContour::from_pitch(vec![120.0; 10], 12.5).unwrap();
        let predicted = PitchContour::from_pitch(vec![110.0; 8], 12.5).unwrap();
        let (_, p) = align_contours(&reference, &predicted).unwrap();
        assert_eq!(p.len(), 10);
        assert_eq!(&p.voiced()[8..], &[false, false]);
        assert_eq!(&p.pitch()[8..], &[0.0, 0.0]);
        assert!(p.voiced()[..8].iter().all(|&v| v));
    }

    #[test]
    fn long_prediction_is_clipped() {
        let r: Vec<i32> = (0..10).collect();
        let p: Vec<i32> = (100..112).collect();
        let pair = align_to_reference(&r, &p, 0).unwrap();
        assert_eq!(pair.predicted, (100..110).collect::<Vec<_>>());
    }

    #[test]
    fn empty_reference_is_an_error() {
        assert_eq!(align_to_reference::<i32>(&[], &[1], 0), Err(MetricError::EmptyReference));
    }

    #[test]
    fn different_hops_are_rejected() {
        let a = PitchContour::unvoiced(3, 12.5);
        let b = PitchContour::unvoiced(3, 10.0);
        assert!(matches!(align_contours(&a, &b), Err(MetricError::FrameRateMismatch { .. })));
    }

    proptest! {
        #[test]
        fn idempotent(r in proptest::collection::vec(0u8..10, 1..20), p in proptest::collection::vec(0u8..10, 0..30)) {
            let once = align_to_reference(&r, &p, 0).unwrap();
            let twice = align_to_reference(&r, &once.predicted, 0).unwrap();
            prop_assert_eq!(once.predicted.len(), r.len());
            prop_assert_eq!(&once, &twice);
        }
    }
}

use ndarray::{Array1, ArrayView1};
use serde::{Serialize, Serializer};

use super::AttentionError;

pub const SPEAKER_DIM: usize = 256;

/// Unit-norm speaker vector of [`SPEAKER_DIM`] entries.
#[derive(Debug, Clone, PartialEq)]
pub struct SpeakerEmbedding(Array1<f64>);

impl SpeakerEmbedding {
    /// Scales `vector` to unit norm.
    pub fn normalized(vector: Array1<f64>) -> Result<Self, AttentionError> {
        check(&vector)?;
        let norm = vector.dot(&vector).sqrt();
        if norm < 1e-12 {
            return Err(AttentionError::DegenerateSpeaker { norm });
        }
        Ok(Self(vector / norm))
    }

    pub fn vector(&self) -> &Array1<f64> {
        &self.0
    }

    pub fn into_vector(self) -> Array1<f64> {
        self.0
    }
}

impl Serialize for SpeakerEmbedding {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_seq(self.0.iter())
    }
}

fn check(v: &Array1<f64>) -> Result<(), AttentionError> {
    if v.len() != SPEAKER_DIM {
        return Err(AttentionError::DimensionMismatch {
            what: "speaker embedding",
            expected: SPEAKER_DIM,
            got: v.len(),
        });
    }
    if v.iter().any(|x| !x.is_finite()) {
        return Err(AttentionError::NonFiniteEmbedding);
    }
    Ok(())
}

/// Component-wise mean of per-utterance embeddings, scaled to unit norm.
pub fn aggregate_speaker_embedding(embeddings: &[Array1<f64>]) -> Result<SpeakerEmbedding, AttentionError> {
    let first = embeddings.first().ok_or(AttentionError::NoEmbeddings)?;
    check(first)?;
    let mut sum = Array1::zeros(SPEAKER_DIM);
    for e in embeddings {
        check(e)?;
        sum += e;
    }
    SpeakerEmbedding::normalized(sum / embeddings.len() as f64)
}

/// Attention query `[prenet; speaker]`.
pub fn compose_query(prenet: ArrayView1<f64>, speaker: &SpeakerEmbedding) -> Array1<f64> {
    prenet.iter().chain(speaker.0.iter()).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vector(seed: u64) -> Array1<f64> {
        Array1::from_shape_fn(SPEAKER_DIM, |i| ((i as u64 * 2654435761 + seed * 97) % 1000) as f64 / 500.0 - 1.0)
    }

    #[test]
    fn singleton_is_normalized() {
        let v = vector(1);
        let s = aggregate_speaker_embedding(std::slice::from_ref(&v)).unwrap();
        let expected = &v / v.dot(&v).sqrt();
        for (a, b) in s.vector().iter().zip(expected.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn identical_unit_vectors_are_a_fixed_point() {
        let u = SpeakerEmbedding::normalized(vector(2)).unwrap().into_vector();
        let s = aggregate_speaker_embedding(&[u.clone(), u.clone(), u.clone()]).unwrap();
        for (a, b) in s.vector().iter().zip(u.iter()) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn opposite_vectors_are_degenerate() {
        let v = vector(3);
        let err = aggregate_speaker_embedding(&[v.clone(), -v]).unwrap_err();
        assert!(matches!(err, AttentionError::DegenerateSpeaker { .. }));
    }

    #[test]
    fn input_validation() {
        assert_eq!(aggregate_speaker_embedding(&[]), Err(AttentionError::NoEmbeddings));
        assert!(matches!(
            aggregate_speaker_embedding(&[Array1::ones(10)]),
            Err(AttentionError::DimensionMismatch { .. })
        ));
        let mut bad = vector(4);
        bad[3] = f64::NAN;
        assert_eq!(aggregate_speaker_embedding(&[bad]), Err(AttentionError::NonFiniteEmbedding));
    }

    #[test]
    fn query_layout() {
        let s = SpeakerEmbedding::normalized(vector(5)).unwrap();
        let q = compose_query(ndarray::array![0.5, -1.5].view(), &s);
        assert_eq!(q.len(), 2 + SPEAKER_DIM);
        assert_eq!((q[0], q[1]), (0.5, -1.5));
        assert_eq!(q.slice(ndarray::s![2..]), s.vector().view());

        let zero = compose_query(Array1::zeros(4).view(), &s);
        assert!(zero.iter().take(4).all(|&x| x == 0.0));
    }

    #[test]
    fn speakers_only_change_the_tail() {
        let a = SpeakerEmbedding::normalized(vector(6)).unwrap();
        let b = SpeakerEmbedding::normalized(vector(7)).unwrap();
        let prenet = ndarray::array![1.0, 2.0, 3.0];
        let (qa, qb) = (compose_query(prenet.view(), &a), compose_query(prenet.view(), &b));
        assert_eq!(qa.slice(ndarray::s![..3]), qb.slice(ndarray::s![..3]));
        assert_ne!(qa.slice(ndarray::s![3..]), qb.slice(ndarray::s![3..]));
    }
}

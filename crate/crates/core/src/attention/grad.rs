use super::AttentionError;

/// Central-difference gradient of `f` at `point`.
pub fn numerical_gradient<F>(f: F, point: &[f64], epsilon: f64) -> Result<Vec<f64>, AttentionError>
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = point.to_vec();
    let mut grad = Vec::with_capacity(point.len());
    for i in 0..point.len() {
        let orig = x[i];
        x[i] = orig + epsilon;
        let plus = f(&x);
        x[i] = orig - epsilon;
        let minus = f(&x);
        x[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(AttentionError::NonFiniteEvaluation { coordinate: Some(i) });
        }
        grad.push((plus - minus) / (2.0 * epsilon));
    }
    Ok(grad)
}

/// Compares the analytic gradient returned by `f` against central differences.
///
/// `f` returns `(value, gradient)`. The result is the maximum over coordinates of
/// `|g_a - g_n| / max(1, |g_a|, |g_n|)`.
pub fn grad_check<F>(f: F, point: &[f64], epsilon: f64) -> Result<f64, AttentionError>
where
    F: Fn(&[f64]) -> (f64, Vec<f64>),
{
    if !(1e-7..=1e-3).contains(&epsilon) {
        return Err(AttentionError::Config(format!("finite-difference step {epsilon:e} outside [1e-7, 1e-3]")));
    }
    let (value, analytic) = f(point);
    if !value.is_finite() || analytic.iter().any(|g| !g.is_finite()) {
        return Err(AttentionError::NonFiniteEvaluation { coordinate: None });
    }
    if analytic.len() != point.len() {
        return Err(AttentionError::DimensionMismatch {
            what: "analytic gradient",
            expected: point.len(),
            got: analytic.len(),
        });
    }
    let numeric = numerical_gradient(|x| f(x).0, point, epsilon)?;
    Ok(analytic.iter().zip(&numeric).map(|(a, n)| (a - n).abs() / 1f64.max(a.abs()).max(n.abs())).fold(0.0, f64::max))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn squared_norm(x: &[f64]) -> (f64, Vec<f64>) {
        (x.iter().map(|v| v * v).sum(), x.iter().map(|v| 2.0 * v).collect())
    }

    #[test]
    fn squared_norm_passes() {
        let x = [0.3, -1.7, 2.2, 0.0, 5.5];
        assert!(grad_check(squared_norm, &x, 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn wrong_gradient_is_caught() {
        let wrong = |x: &[f64]| (x.iter().map(|v| v * v).sum(), x.iter().map(|v| 3.0 * v).collect());
        assert!(grad_check(wrong, &[1.0, 2.0], 1e-5).unwrap() > 0.1);
    }

    #[test]
    fn epsilon_range() {
        assert!(grad_check(squared_norm, &[1.0], 1e-2).is_err());
        assert!(grad_check(squared_norm, &[1.0], 1e-8).is_err());
    }

    #[test]
    fn non_finite_evaluation() {
        let f = |x: &[f64]| (x[0].ln(), vec![1.0 / x[0]]);
        assert!(matches!(grad_check(f, &[0.0], 1e-5), Err(AttentionError::NonFiniteEvaluation { .. })));
    }
}

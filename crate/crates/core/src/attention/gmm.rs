use ndarray::{s, Array1, Array2, ArrayView1};
use rand::Rng;

use super::{AttentionError, EncoderOutput};

/// Affine map from `[query; previous context]` to the `3 * N` mixture
/// pre-activations `[w_hat; delta_hat; sigma_hat]`, plus the value projection
/// from encoder width to context width.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmAttentionParams {
    /// `3N x (D_q + D_ctx)`
    pub param_weight: Array2<f64>,
    /// `3N`
    pub param_bias: Array1<f64>,
    /// `D_ctx x D_m`
    pub value_proj: Array2<f64>,
}

impl GmmAttentionParams {
    pub fn random<R: Rng>(
        query_dim: usize,
        context_dim: usize,
        model_dim: usize,
        num_mixtures: usize,
        scale: f64,
        rng: &mut R,
    ) -> Self {
        let mut draw = |shape: (usize, usize)| Array2::from_shape_fn(shape, |_| rng.gen_range(-scale..=scale));
        let param_weight = draw((3 * num_mixtures, query_dim + context_dim));
        let param_bias = draw((1, 3 * num_mixtures)).row(0).to_owned();
        let value_proj = draw((context_dim, model_dim));
        Self { param_weight, param_bias, value_proj }
    }

    pub fn num_mixtures(&self) -> usize {
        self.param_bias.len() / 3
    }

    pub fn context_dim(&self) -> usize {
        self.value_proj.nrows()
    }

    pub fn model_dim(&self) -> usize {
        self.value_proj.ncols()
    }

    pub fn query_dim(&self) -> usize {
        self.param_weight.ncols() - self.context_dim()
    }
}

/// Mixture means and the previous context of one attention source.
#[derive(Debug, Clone, PartialEq)]
pub struct GmmAttentionState {
    pub means: Array1<f64>,
    pub context: Array1<f64>,
    /// Steps taken so far.
    pub step: usize,
}

impl GmmAttentionState {
    pub fn initial(num_mixtures: usize, context_dim: usize) -> Self {
        Self { means: Array1::zeros(num_mixtures), context: Array1::zeros(context_dim), step: 0 }
    }

    pub fn for_params(params: &GmmAttentionParams) -> Self {
        Self::initial(params.num_mixtures(), params.context_dim())
    }
}

/// `alpha_j = sum_n w_n exp(-(j - mu_n)^2 / (2 sigma_n^2))` for positions `0..len`.
/// The energies are not normalized.
pub fn gmm_energies(
    weights: ArrayView1<f64>,
    means: ArrayView1<f64>,
    scales: ArrayView1<f64>,
    len: usize,
) -> Array1<f64> {
    Array1::from_shape_fn(len, |j| {
        let pos = j as f64;
        weights
            .iter()
            .zip(means.iter())
            .zip(scales.iter())
            .map(|((w, mu), sigma)| w * (-(pos - mu).powi(2) / (2.0 * sigma * sigma)).exp())
            .sum()
    })
}

/// One step of a single source's attention, with what the backward pass needs.
#[derive(Debug, Clone)]
pub struct GmmStep {
    pub context: Array1<f64>,
    pub state: GmmAttentionState,
    pub energies: Array1<f64>,
    pub weights: Array1<f64>,
    pub shifts: Array1<f64>,
    pub scales: Array1<f64>,
    input: Array1<f64>,
    pooled: Array1<f64>,
}

/// Gradients of a scalar loss through one [`GmmStep`], given `dL/dcontext`.
#[derive(Debug, Clone)]
pub struct GmmGradients {
    /// `dL/d[w_hat; delta_hat; sigma_hat]`
    pub preactivations: Array1<f64>,
    pub param_weight: Array2<f64>,
    pub param_bias: Array1<f64>,
    pub value_proj: Array2<f64>,
    pub query: Array1<f64>,
    pub prev_context: Array1<f64>,
    pub prev_means: Array1<f64>,
    pub hidden: Array2<f64>,
}

pub fn gmm_attention_step(
    query: ArrayView1<f64>,
    state: &GmmAttentionState,
    encoder: &EncoderOutput,
    params: &GmmAttentionParams,
) -> Result<GmmStep, AttentionError> {
    let n = params.num_mixtures();
    expect_dim("query", params.query_dim(), query.len())?;
    expect_dim("previous context", params.context_dim(), state.context.len())?;
    expect_dim("mixture means", n, state.means.len())?;
    expect_dim("encoder width", params.model_dim(), encoder.dim())?;

    let step = state.step + 1;
    let non_finite = |quantity| AttentionError::NonFinite { step, source_kind: encoder.source(), quantity };

    let input = concat(query, state.context.view());
    let pre = params.param_weight.dot(&input) + &params.param_bias;
    let weights = pre.slice(s![..n]).mapv(f64::exp);
    let shifts = pre.slice(s![n..2 * n]).mapv(f64::exp);
    let scales = pre.slice(s![2 * n..]).mapv(f64::exp);
    if !all_finite(&weights) || !all_finite(&shifts) || !all_finite(&scales) || scales.iter().any(|&s| s <= 0.0) {
        return Err(non_finite("mixture parameters"));
    }
    let means = &state.means + &shifts;
    if !all_finite(&means) {
        return Err(non_finite("mixture means"));
    }

    let energies = gmm_energies(weights.view(), means.view(), scales.view(), encoder.len());
    let pooled = encoder.hidden().t().dot(&energies);
    let context = params.value_proj.dot(&pooled);
    if !all_finite(&energies) || !all_finite(&context) {
        return Err(non_finite("attention context"));
    }

    Ok(GmmStep {
        state: GmmAttentionState { means, context: context.clone(), step },
        context,
        energies,
        weights,
        shifts,
        scales,
        input,
        pooled,
    })
}

impl GmmStep {
    pub fn backward(
        &self,
        d_context: ArrayView1<f64>,
        encoder: &EncoderOutput,
        params: &GmmAttentionParams,
    ) -> GmmGradients {
        let n = self.weights.len();
        let hidden = encoder.hidden();
        let d_pooled = params.value_proj.t().dot(&d_context);
        let value_proj = outer(d_context, self.pooled.view());
        let d_hidden = outer(self.energies.view(), d_pooled.view());
        let d_energy = hidden.dot(&d_pooled);

        let mut preactivations = Array1::zeros(3 * n);
        let mut prev_means = Array1::zeros(n);
        for m in 0..n {
            let (w, mu, sigma) = (self.weights[m], self.state.means[m], self.scales[m]);
            let var = sigma * sigma;
            let (mut d_w_hat, mut d_mu, mut d_sigma_hat) = (0.0, 0.0, 0.0);
            for (j, &a) in d_energy.iter().enumerate() {
                let offset = j as f64 - mu;
                let g = a * w * (-offset * offset / (2.0 * var)).exp();
                d_w_hat += g;
                d_mu += g * offset / var;
                d_sigma_hat += g * offset * offset / var;
            }
            preactivations[m] = d_w_hat;
            preactivations[n + m] = d_mu * self.shifts[m];
            preactivations[2 * n + m] = d_sigma_hat;
            prev_means[m] = d_mu;
        }

        let d_input = params.param_weight.t().dot(&preactivations);
        let query_dim = params.query_dim();
        GmmGradients {
            param_weight: outer(preactivations.view(), self.input.view()),
            param_bias: preactivations.clone(),
            preactivations,
            value_proj,
            query: d_input.slice(s![..query_dim]).to_owned(),
            prev_context: d_input.slice(s![query_dim..]).to_owned(),
            prev_means,
            hidden: d_hidden,
        }
    }
}

pub(crate) fn concat(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Array1<f64> {
    a.iter().chain(b.iter()).copied().collect()
}

pub(crate) fn outer(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Array2<f64> {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j])
}

fn all_finite(a: &Array1<f64>) -> bool {
    a.iter().all(|v| v.is_finite())
}

fn expect_dim(what: &'static str, expected: usize, got: usize) -> Result<(), AttentionError> {
    if expected == got {
        Ok(())
    } else {
        Err(AttentionError::DimensionMismatch { what, expected, got })
    }
}

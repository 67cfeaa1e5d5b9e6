use ndarray::{s, Array1, Array2, ArrayView1};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gmm::{concat, outer};
use super::{
    gmm_attention_step, AttentionConfig, AttentionError, EncoderOutput, GmmAttentionParams, GmmAttentionState,
    GmmGradients, GmmStep, SourceKind,
};

/// Independent attention parameters for each source plus the fusion layer.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiSourceParams {
    pub video: GmmAttentionParams,
    pub text: GmmAttentionParams,
    /// `D_m x 2 D_ctx`, applied to `[c_video; c_text]`.
    pub fusion_weight: Array2<f64>,
    pub fusion_bias: Option<Array1<f64>>,
}

impl MultiSourceParams {
    /// Uniform initialization in `[-init_scale, init_scale]` from a seeded ChaCha8 stream.
    pub fn init(config: &AttentionConfig, seed: u64) -> Result<Self, AttentionError> {
        config.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = config;
        let video = GmmAttentionParams::random(
            c.query_dim(),
            c.context_dim,
            c.model_dim,
            c.num_mixtures,
            c.init_scale,
            &mut rng,
        );
        let text = GmmAttentionParams::random(
            c.query_dim(),
            c.context_dim,
            c.model_dim,
            c.num_mixtures,
            c.init_scale,
            &mut rng,
        );
        let mut uniform = || rng.gen_range(-c.init_scale..=c.init_scale);
        let fusion_weight = Array2::from_shape_fn((c.model_dim, 2 * c.context_dim), |_| uniform());
        let fusion_bias = c.fusion_bias.then(|| Array1::from_shape_fn(c.model_dim, |_| uniform()));
        Ok(Self { video, text, fusion_weight, fusion_bias })
    }

    pub fn output_dim(&self) -> usize {
        self.fusion_weight.nrows()
    }

    pub fn fusion_input_dim(&self) -> usize {
        self.fusion_weight.ncols()
    }

    pub fn initial_states(&self) -> (GmmAttentionState, GmmAttentionState) {
        (GmmAttentionState::for_params(&self.video), GmmAttentionState::for_params(&self.text))
    }
}

/// `W [c_video; c_text] + b`.
pub fn fuse_contexts(
    params: &MultiSourceParams,
    video: ArrayView1<f64>,
    text: ArrayView1<f64>,
) -> Result<Array1<f64>, AttentionError> {
    let joined = concat(video, text);
    if joined.len() != params.fusion_input_dim() {
        return Err(AttentionError::DimensionMismatch {
            what: "fusion input",
            expected: params.fusion_input_dim(),
            got: joined.len(),
        });
    }
    let mut fused = params.fusion_weight.dot(&joined);
    if let Some(b) = &params.fusion_bias {
        fused += b;
    }
    Ok(fused)
}

#[derive(Debug, Clone)]
pub struct MultiSourceStep {
    pub fused: Array1<f64>,
    pub video: GmmStep,
    pub text: GmmStep,
}

#[derive(Debug, Clone)]
pub struct MultiSourceGradients {
    pub fusion_weight: Array2<f64>,
    pub fusion_bias: Option<Array1<f64>>,
    pub video: GmmGradients,
    pub text: GmmGradients,
    /// Sum of both sources' query gradients.
    pub query: Array1<f64>,
}

/// Runs both attentions on the shared query and fuses their contexts.
pub fn multi_source_step(
    query: ArrayView1<f64>,
    state_video: &GmmAttentionState,
    state_text: &GmmAttentionState,
    video: &EncoderOutput,
    text: &EncoderOutput,
    params: &MultiSourceParams,
) -> Result<MultiSourceStep, AttentionError> {
    let video_step = gmm_attention_step(query, state_video, video, &params.video)?;
    let text_step = gmm_attention_step(query, state_text, text, &params.text)?;
    let fused = fuse_contexts(params, video_step.context.view(), text_step.context.view())?;
    Ok(MultiSourceStep { fused, video: video_step, text: text_step })
}

impl MultiSourceStep {
    pub fn backward(
        &self,
        d_fused: ArrayView1<f64>,
        video: &EncoderOutput,
        text: &EncoderOutput,
        params: &MultiSourceParams,
    ) -> MultiSourceGradients {
        let ctx = self.video.context.len();
        let joined = concat(self.video.context.view(), self.text.context.view());
        let d_joined = params.fusion_weight.t().dot(&d_fused);
        let video_grads = self.video.backward(d_joined.slice(s![..ctx]), video, &params.video);
        let text_grads = self.text.backward(d_joined.slice(s![ctx..]), text, &params.text);
        MultiSourceGradients {
            fusion_weight: outer(d_fused, joined.view()),
            fusion_bias: params.fusion_bias.as_ref().map(|_| d_fused.to_owned()),
            query: &video_grads.query + &text_grads.query,
            video: video_grads,
            text: text_grads,
        }
    }
}

/// Per-step attention energies over one source, for offline plotting.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttentionMap {
    pub step: usize,
    pub source: SourceKind,
    pub energies: Vec<f64>,
}

/// Result of driving the attention over a sequence of teacher-forced queries.
#[derive(Debug, Clone)]
pub struct Unroll {
    pub fused: Vec<Array1<f64>>,
    /// State after each step; `video_states[t].context` is the video context at step `t + 1`.
    pub video_states: Vec<GmmAttentionState>,
    pub text_states: Vec<GmmAttentionState>,
    /// Two maps per step, video first.
    pub maps: Vec<AttentionMap>,
}

pub fn unroll_attention(
    queries: &[Array1<f64>],
    video: &EncoderOutput,
    text: &EncoderOutput,
    params: &MultiSourceParams,
) -> Result<Unroll, AttentionError> {
    if queries.is_empty() {
        return Err(AttentionError::NoQueries);
    }
    let (mut state_video, mut state_text) = params.initial_states();
    let mut out = Unroll {
        fused: Vec::with_capacity(queries.len()),
        video_states: Vec::with_capacity(queries.len()),
        text_states: Vec::with_capacity(queries.len()),
        maps: Vec::with_capacity(2 * queries.len()),
    };
    for query in queries {
        let step = multi_source_step(query.view(), &state_video, &state_text, video, text, params)?;
        let t = step.video.state.step;
        out.maps.push(AttentionMap { step: t, source: SourceKind::Video, energies: step.video.energies.to_vec() });
        out.maps.push(AttentionMap { step: t, source: SourceKind::Text, energies: step.text.energies.to_vec() });
        state_video = step.video.state;
        state_text = step.text.state;
        out.video_states.push(state_video.clone());
        out.text_states.push(state_text.clone());
        out.fused.push(step.fused);
    }
    Ok(out)
}

/// Attention maps as a JSON array of `{step, source, energies}` objects.
pub fn attention_maps_json(maps: &[AttentionMap]) -> String {
    serde_json::to_string(maps).expect("attention maps serialize")
}

//! Randomized verification suites for the attention implementation.
//!
//! Each suite is seeded and deterministic. The gradient suite builds random
//! instances, turns one step into a scalar `r . output` for a random `r`, and
//! runs [`grad_check`] over every parameter block and input.

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    compose_query, gmm_attention_step, grad_check, multi_source_step, unroll_attention, AttentionConfig,
    AttentionError, EncoderOutput, GmmAttentionParams, GmmAttentionState, MultiSourceParams, SourceKind,
    SpeakerEmbedding, SPEAKER_DIM,
};

/// Finite-difference step used by the suites.
pub const GRAD_EPSILON: f64 = 1e-5;
/// Largest tolerated relative gradient error.
pub const GRAD_TOLERANCE: f64 = 1e-4;

#[derive(Debug, Clone, Serialize)]
pub struct GradientReport {
    pub instances: usize,
    pub checks: usize,
    pub max_rel_error: f64,
    pub worst_check: String,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct MonotonicityReport {
    pub trials: usize,
    pub steps: usize,
    /// Steps where some mixture mean moved backwards.
    pub mean_violations: usize,
    /// Steps where some mixture mean failed to move forward at all.
    pub stalled_means: usize,
    pub negative_energies: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct IsolationReport {
    pub steps: usize,
    pub video_unchanged_by_text: bool,
    pub text_unchanged_by_video: bool,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ShapeReport {
    pub query_dim: usize,
    pub context_dim: usize,
    pub fusion_input_dim: usize,
    pub fused_dim: usize,
    pub passed: bool,
}

/// A random small problem: dimensions, parameters, encoders, states and a query.
struct Instance {
    params: MultiSourceParams,
    video: EncoderOutput,
    text: EncoderOutput,
    state_video: GmmAttentionState,
    state_text: GmmAttentionState,
    query: Array1<f64>,
}

fn uniform_vec(rng: &mut ChaCha8Rng, len: usize, scale: f64) -> Array1<f64> {
    Array1::from_shape_fn(len, |_| rng.gen_range(-scale..scale))
}

fn uniform_mat(rng: &mut ChaCha8Rng, shape: (usize, usize), scale: f64) -> Array2<f64> {
    Array2::from_shape_fn(shape, |_| rng.gen_range(-scale..scale))
}

fn random_query(rng: &mut ChaCha8Rng, prenet_dim: usize) -> Array1<f64> {
    let speaker = SpeakerEmbedding::normalized(uniform_vec(rng, SPEAKER_DIM, 1.0)).expect("random speaker is nonzero");
    compose_query(uniform_vec(rng, prenet_dim, 1.0).view(), &speaker)
}

/// Random dimensions with `D_m <= max_model_dim` and `T_src <= max_len`.
fn random_config(rng: &mut ChaCha8Rng, max_model_dim: usize, scale: f64) -> AttentionConfig {
    AttentionConfig {
        prenet_dim: rng.gen_range(1..=8),
        model_dim: rng.gen_range(2..=max_model_dim),
        context_dim: rng.gen_range(1..=8),
        num_mixtures: rng.gen_range(1..=5),
        fusion_bias: rng.gen_bool(0.5),
        init_scale: scale,
    }
}

fn random_instance(rng: &mut ChaCha8Rng, max_model_dim: usize, max_len: usize) -> Result<Instance, AttentionError> {
    let config = random_config(rng, max_model_dim, 0.3);
    let params = MultiSourceParams::init(&config, rng.gen())?;
    let encoder = |rng: &mut ChaCha8Rng, kind| {
        let len = rng.gen_range(1..=max_len);
        EncoderOutput::new(uniform_mat(rng, (len, config.model_dim), 1.0), kind)
    };
    let video = encoder(rng, SourceKind::Video)?;
    let text = encoder(rng, SourceKind::Text)?;
    let state = |rng: &mut ChaCha8Rng, len: usize| GmmAttentionState {
        means: Array1::from_shape_fn(config.num_mixtures, |_| rng.gen_range(0.0..len as f64)),
        context: uniform_vec(rng, config.context_dim, 1.0),
        step: rng.gen_range(0..10),
    };
    let state_video = state(rng, video.len());
    let state_text = state(rng, text.len());
    let query = random_query(rng, config.prenet_dim);
    Ok(Instance { params, video, text, state_video, state_text, query })
}

fn flat(a: &Array2<f64>) -> Vec<f64> {
    a.iter().copied().collect()
}

fn reshape(x: &[f64], like: &Array2<f64>) -> Array2<f64> {
    Array2::from_shape_vec(like.dim(), x.to_vec()).expect("shape preserved")
}

struct Tracker {
    checks: usize,
    max: f64,
    worst: String,
}

impl Tracker {
    fn record(&mut self, name: &str, err: f64) {
        self.checks += 1;
        if err > self.max || self.checks == 1 {
            self.max = self.max.max(err);
            self.worst = name.to_owned();
        }
    }
}

/// Gradient checks of one GMM step and one multi-source step per instance.
pub fn gradient_suite(
    seed: u64,
    instances: usize,
    max_model_dim: usize,
    max_len: usize,
) -> Result<GradientReport, AttentionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tracker = Tracker { checks: 0, max: 0.0, worst: String::new() };

    for _ in 0..instances {
        let inst = random_instance(&mut rng, max_model_dim, max_len)?;
        let p = &inst.params.video;
        let d_ctx = p.context_dim();
        let probe = uniform_vec(&mut rng, d_ctx, 1.0);

        // single source: scalar = probe . context
        let gmm_scalar =
            |params: &GmmAttentionParams, query: &Array1<f64>, state: &GmmAttentionState, enc: &EncoderOutput| {
                let step = gmm_attention_step(query.view(), state, enc, params).expect("finite instance");
                let grads = step.backward(probe.view(), enc, params);
                (probe.dot(&step.context), grads)
            };

        let e = grad_check(
            |x| {
                let mut q = p.clone();
                q.param_bias = Array1::from(x.to_vec());
                let (v, g) = gmm_scalar(&q, &inst.query, &inst.state_video, &inst.video);
                (v, g.preactivations.to_vec())
            },
            &p.param_bias.to_vec(),
            GRAD_EPSILON,
        )?;
        tracker.record("gmm preactivations", e);

        let e = grad_check(
            |x| {
                let mut q = p.clone();
                q.param_weight = reshape(x, &p.param_weight);
                let (v, g) = gmm_scalar(&q, &inst.query, &inst.state_video, &inst.video);
                (v, flat(&g.param_weight))
            },
            &flat(&p.param_weight),
            GRAD_EPSILON,
        )?;
        tracker.record("gmm parameter weights", e);

        let e = grad_check(
            |x| {
                let mut q = p.clone();
                q.value_proj = reshape(x, &p.value_proj);
                let (v, g) = gmm_scalar(&q, &inst.query, &inst.state_video, &inst.video);
                (v, flat(&g.value_proj))
            },
            &flat(&p.value_proj),
            GRAD_EPSILON,
        )?;
        tracker.record("gmm value projection", e);

        let e = grad_check(
            |x| {
                let enc = EncoderOutput::new(reshape(x, inst.video.hidden()), SourceKind::Video).expect("finite");
                let (v, g) = gmm_scalar(p, &inst.query, &inst.state_video, &enc);
                (v, flat(&g.hidden))
            },
            &flat(inst.video.hidden()),
            GRAD_EPSILON,
        )?;
        tracker.record("gmm encoder states", e);

        let (nq, nc) = (inst.query.len(), d_ctx);
        let mut point = inst.query.to_vec();
        point.extend(inst.state_video.context.iter());
        point.extend(inst.state_video.means.iter());
        let e = grad_check(
            |x| {
                let query = Array1::from(x[..nq].to_vec());
                let state = GmmAttentionState {
                    context: Array1::from(x[nq..nq + nc].to_vec()),
                    means: Array1::from(x[nq + nc..].to_vec()),
                    step: inst.state_video.step,
                };
                let (v, g) = gmm_scalar(p, &query, &state, &inst.video);
                let mut grad = g.query.to_vec();
                grad.extend(g.prev_context.iter());
                grad.extend(g.prev_means.iter());
                (v, grad)
            },
            &point,
            GRAD_EPSILON,
        )?;
        tracker.record("gmm query, previous context and means", e);

        // both sources: scalar = probe . fused
        let out_probe = uniform_vec(&mut rng, inst.params.output_dim(), 1.0);
        let multi_scalar = |params: &MultiSourceParams, query: &Array1<f64>| {
            let step =
                multi_source_step(query.view(), &inst.state_video, &inst.state_text, &inst.video, &inst.text, params)
                    .expect("finite instance");
            let grads = step.backward(out_probe.view(), &inst.video, &inst.text, params);
            (out_probe.dot(&step.fused), grads)
        };

        let e = grad_check(
            |x| {
                let mut q = inst.params.clone();
                q.fusion_weight = reshape(x, &inst.params.fusion_weight);
                let (v, g) = multi_scalar(&q, &inst.query);
                (v, flat(&g.fusion_weight))
            },
            &flat(&inst.params.fusion_weight),
            GRAD_EPSILON,
        )?;
        tracker.record("fusion projection weights", e);

        if let Some(bias) = &inst.params.fusion_bias {
            let e = grad_check(
                |x| {
                    let mut q = inst.params.clone();
                    q.fusion_bias = Some(Array1::from(x.to_vec()));
                    let (v, g) = multi_scalar(&q, &inst.query);
                    (v, g.fusion_bias.expect("bias enabled").to_vec())
                },
                &bias.to_vec(),
                GRAD_EPSILON,
            )?;
            tracker.record("fusion bias", e);
        }

        let n3 = inst.params.video.param_bias.len();
        let mut point = inst.params.video.param_bias.to_vec();
        point.extend(inst.params.text.param_bias.iter());
        point.extend(inst.query.iter());
        let e = grad_check(
            |x| {
                let mut q = inst.params.clone();
                q.video.param_bias = Array1::from(x[..n3].to_vec());
                q.text.param_bias = Array1::from(x[n3..2 * n3].to_vec());
                let (v, g) = multi_scalar(&q, &Array1::from(x[2 * n3..].to_vec()));
                let mut grad = g.video.preactivations.to_vec();
                grad.extend(g.text.preactivations.iter());
                grad.extend(g.query.iter());
                (v, grad)
            },
            &point,
            GRAD_EPSILON,
        )?;
        tracker.record("multi-source preactivations and query", e);
    }

    Ok(GradientReport {
        instances,
        checks: tracker.checks,
        max_rel_error: tracker.max,
        worst_check: tracker.worst,
        passed: tracker.max < GRAD_TOLERANCE,
    })
}

/// Random unrolls checking that means never move backwards and energies stay nonnegative.
pub fn monotonicity_suite(seed: u64, trials: usize, steps: usize) -> Result<MonotonicityReport, AttentionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut mean_violations, mut stalled_means, mut negative_energies) = (0, 0, 0);
    for _ in 0..trials {
        let scale = rng.gen_range(0.01..0.1);
        let config = random_config(&mut rng, 16, scale);
        let params = MultiSourceParams::init(&config, rng.gen())?;
        let tx = rng.gen_range(1..=32);
        let ty = rng.gen_range(1..=32);
        let video = EncoderOutput::new(uniform_mat(&mut rng, (tx, config.model_dim), 1.0), SourceKind::Video)?;
        let text = EncoderOutput::new(uniform_mat(&mut rng, (ty, config.model_dim), 1.0), SourceKind::Text)?;
        let queries: Vec<_> = (0..steps).map(|_| random_query(&mut rng, config.prenet_dim)).collect();
        let unroll = unroll_attention(&queries, &video, &text, &params)?;

        let (init_video, init_text) = params.initial_states();
        for states in [(init_video, &unroll.video_states), (init_text, &unroll.text_states)] {
            let mut prev = states.0.means;
            for s in states.1 {
                if s.means.iter().zip(prev.iter()).any(|(now, before)| now < before) {
                    mean_violations += 1;
                }
                if s.means.iter().zip(prev.iter()).any(|(now, before)| now <= before) {
                    stalled_means += 1;
                }
                prev = s.means.clone();
            }
        }
        negative_energies += unroll.maps.iter().flat_map(|m| m.energies.iter()).filter(|&&e| e < 0.0).count();
    }
    Ok(MonotonicityReport {
        trials,
        steps,
        mean_violations,
        stalled_means,
        negative_energies,
        passed: mean_violations == 0 && negative_energies == 0,
    })
}

/// Perturbs one encoder and checks the other source's contexts are bit-identical over an unroll.
pub fn isolation_check(seed: u64, steps: usize) -> Result<IsolationReport, AttentionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let config = AttentionConfig::desk();
    let params = MultiSourceParams::init(&config, rng.gen())?;
    let video = EncoderOutput::new(uniform_mat(&mut rng, (12, config.model_dim), 1.0), SourceKind::Video)?;
    let text = EncoderOutput::new(uniform_mat(&mut rng, (9, config.model_dim), 1.0), SourceKind::Text)?;
    let queries: Vec<_> = (0..steps).map(|_| random_query(&mut rng, config.prenet_dim)).collect();
    let perturb = |e: &EncoderOutput, rng: &mut ChaCha8Rng| {
        EncoderOutput::new(e.hidden() + &uniform_mat(rng, e.hidden().dim(), 0.5), e.source())
    };
    let other_video = perturb(&video, &mut rng)?;
    let other_text = perturb(&text, &mut rng)?;

    let base = unroll_attention(&queries, &video, &text, &params)?;
    let text_moved = unroll_attention(&queries, &video, &other_text, &params)?;
    let video_moved = unroll_attention(&queries, &other_video, &text, &params)?;

    let contexts = |states: &[GmmAttentionState]| states.iter().map(|s| s.context.clone()).collect::<Vec<_>>();
    let video_unchanged_by_text = contexts(&base.video_states) == contexts(&text_moved.video_states);
    let text_unchanged_by_video = contexts(&base.text_states) == contexts(&video_moved.text_states);
    Ok(IsolationReport {
        steps,
        video_unchanged_by_text,
        text_unchanged_by_video,
        passed: video_unchanged_by_text && text_unchanged_by_video,
    })
}

/// Builds parameters at `config` dimensions and runs one step on short encoders.
pub fn shape_check(config: &AttentionConfig, seed: u64) -> Result<ShapeReport, AttentionError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let params = MultiSourceParams::init(config, seed)?;
    let video = EncoderOutput::new(uniform_mat(&mut rng, (4, config.model_dim), 1.0), SourceKind::Video)?;
    let text = EncoderOutput::new(uniform_mat(&mut rng, (3, config.model_dim), 1.0), SourceKind::Text)?;
    let query = random_query(&mut rng, config.prenet_dim);
    let (sv, st) = params.initial_states();
    let step = multi_source_step(query.view(), &sv, &st, &video, &text, &params)?;
    let passed = query.len() == config.query_dim()
        && step.video.context.len() == config.context_dim
        && step.text.context.len() == config.context_dim
        && params.fusion_input_dim() == 2 * config.context_dim
        && step.fused.len() == config.model_dim;
    Ok(ShapeReport {
        query_dim: query.len(),
        context_dim: step.video.context.len(),
        fusion_input_dim: params.fusion_input_dim(),
        fused_dim: step.fused.len(),
        passed,
    })
}

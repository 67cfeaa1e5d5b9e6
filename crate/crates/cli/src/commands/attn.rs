use clap::Args;
use serde::Serialize;
use serde_json::json;

use prosodyne::attention::diagnostics::{
    gradient_suite, isolation_check, monotonicity_suite, shape_check, GradientReport, IsolationReport,
    MonotonicityReport, ShapeReport, GRAD_EPSILON, GRAD_TOLERANCE,
};

use crate::config::{Dims, RunConfig};
use crate::output;
use crate::CliError;

#[derive(Debug, Clone, Default, Args)]
pub struct AttnCheckArgs {
    /// Dimensions for the shape check.
    #[arg(long, value_enum)]
    pub dims: Option<Dims>,
    /// Random instances for the gradient check.
    #[arg(long, value_name = "N")]
    pub instances: Option<usize>,
    /// Random unrolls for the monotonicity check.
    #[arg(long, value_name = "N")]
    pub trials: Option<usize>,
    /// Decoder steps per unroll.
    #[arg(long, value_name = "N")]
    pub steps: Option<usize>,
    /// Only build parameters at the chosen dimensions and run one step.
    #[arg(long)]
    pub shape_only: bool,
}

#[derive(Debug, Serialize)]
struct AttnReport {
    config: serde_json::Value,
    shape: ShapeReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    gradient: Option<GradientReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    monotonicity: Option<MonotonicityReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    isolation: Option<IsolationReport>,
    passed: bool,
}

pub fn run(args: &AttnCheckArgs, mut config: RunConfig) -> Result<(), CliError> {
    let settings = &mut config.attention;
    if let Some(d) = args.dims {
        settings.dims = d;
    }
    if let Some(n) = args.instances {
        settings.gradient_instances = n;
    }
    if let Some(n) = args.trials {
        settings.unroll_trials = n;
    }
    if let Some(n) = args.steps {
        settings.unroll_steps = n;
    }
    settings.shape_only |= args.shape_only;
    let settings = config.attention.clone();
    let dims = settings.config();
    dims.validate().map_err(CliError::input)?;
    if settings.max_model_dim == 0 || settings.max_source_len == 0 {
        return Err(CliError::Input("gradient instance bounds must be positive".into()));
    }

    let seed = config.seed;
    let shape = shape_check(&dims, seed).map_err(CliError::compute)?;
    let (gradient, monotonicity, isolation) = if settings.shape_only {
        (None, None, None)
    } else {
        log::info!("gradient check over {} instances", settings.gradient_instances);
        let g = gradient_suite(seed, settings.gradient_instances, settings.max_model_dim, settings.max_source_len)
            .map_err(CliError::compute)?;
        let m = monotonicity_suite(seed, settings.unroll_trials, settings.unroll_steps).map_err(CliError::compute)?;
        let i = isolation_check(seed, settings.unroll_steps).map_err(CliError::compute)?;
        (Some(g), Some(m), Some(i))
    };
    let passed = shape.passed
        && gradient.as_ref().is_none_or(|g| g.passed)
        && monotonicity.as_ref().is_none_or(|m| m.passed)
        && isolation.as_ref().is_none_or(|i| i.passed);

    let report = AttnReport {
        config: json!({
            "seed": seed,
            "attention": settings,
            "resolved_dims": dims,
            "grad_epsilon": GRAD_EPSILON,
            "grad_tolerance": GRAD_TOLERANCE,
        }),
        shape,
        gradient,
        monotonicity,
        isolation,
        passed,
    };
    output::write_json(output::stdout(), &report)?;
    if passed {
        Ok(())
    } else {
        Err(CliError::Compute("attention diagnostics failed; see report".into()))
    }
}

//! Experiment runner for quantum extreme learning machines.
//!
//! Presets regenerate each figure and table as machine-readable rows;
//! explicit configurations compose any architecture with any target list.
//! The numerical work lives in `qelm-core`.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod runner;

use qelm_core::bounds::ResourceReport;

pub use config::{ExperimentConfig, Format};
pub use error::{exit, CliError, CliResult};
pub use presets::{Overrides, Plan, PRESETS};
pub use runner::{Job, ResultRow};

/// Rows produced by a preset or configuration.
#[derive(Clone, Debug, PartialEq)]
pub enum Output {
    Results(Vec<ResultRow>),
    Bounds(Vec<ResourceReport>),
}

impl Output {
    pub fn render(&self, format: Format) -> CliResult<Vec<u8>> {
        match self {
            Output::Results(rows) => output::render_results(rows, format),
            Output::Bounds(rows) => output::render_bounds(rows, format),
        }
    }
}

fn execute(label: &str, plan: Plan) -> CliResult<Output> {
    match plan {
        Plan::Experiments(jobs) => runner::run_jobs(label, &jobs).map(Output::Results),
        Plan::Bounds(rows) => Ok(Output::Bounds(rows)),
    }
}

pub fn run_preset(name: &str, overrides: &Overrides) -> CliResult<Output> {
    let preset = presets::find(name)?;
    execute(preset.name, preset.plan(overrides)?)
}

/// The job an explicit configuration describes, with overrides applied.
pub fn explicit_job(cfg: &ExperimentConfig) -> CliResult<(String, Job)> {
    cfg.validate()?;
    let e = cfg
        .explicit
        .as_ref()
        .ok_or_else(|| CliError::usage("configuration has no explicit block"))?;
    let spec = e.architecture.to_spec(e.dynamics.into())?;
    let targets = e
        .targets
        .iter()
        .map(|t| t.to_spec())
        .collect::<CliResult<Vec<_>>>()?;
    if e.n_runs == 0 {
        return Err(CliError::usage("n_runs must be at least 1"));
    }
    let runs = cfg
        .runs
        .unwrap_or_else(|| config::scaled_runs(e.n_runs, cfg.desk_scale.unwrap_or(1.0)));
    let mut job = Job::new(spec, targets, e.n_samples, runs);
    job.settings = e.settings();
    job.settings.n_samples = cfg.samples.unwrap_or(e.n_samples);
    job.master_seed = cfg.seed.or(e.master_seed).unwrap_or(config::DEFAULT_SEED);
    Ok((e.label.clone(), job))
}

pub fn run_config(cfg: &ExperimentConfig) -> CliResult<Output> {
    cfg.validate()?;
    if let Some(name) = &cfg.preset {
        let overrides = Overrides {
            seed: cfg.seed,
            runs: cfg.runs,
            samples: cfg.samples,
            desk_scale: cfg.desk_scale,
            big_compute: cfg.big_compute,
        };
        return run_preset(name, &overrides);
    }
    let (label, job) = explicit_job(cfg)?;
    execute(&label, Plan::Experiments(vec![job]))
}

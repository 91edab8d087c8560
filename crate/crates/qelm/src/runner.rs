//! Executes experiment jobs, parallel across independent runs.
//!
//! Every run derives its randomness from `(master_seed, run)` alone, so the
//! results do not depend on the number of worker threads.

use std::time::Instant;

use qelm_core::architectures::{prepare, ArchitectureSpec};
use qelm_core::dynamics::apply_channel;
use qelm_core::learn::{aggregate, mean_std, run_single, run_source, ExperimentSettings};
use qelm_core::targets::{concurrence, mutual_information, TargetSpec};
use qelm_core::Result as CoreResult;
use rayon::prelude::*;

use crate::error::{CliError, CliResult};

/// Extra quantities measured alongside the NMSE.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Probe {
    #[default]
    None,
    /// Mean input/reservoir mutual information and concurrence of the evolved
    /// joint state, over every input of every run. Single-unit architectures.
    Correlations,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Job {
    pub spec: ArchitectureSpec,
    pub targets: Vec<TargetSpec>,
    pub settings: ExperimentSettings,
    pub n_runs: usize,
    pub master_seed: u64,
    /// Free-form tag distinguishing jobs of one preset.
    pub variant: String,
    /// Per-target annotations; empty or one entry per target.
    pub annotations: Vec<String>,
    pub probe: Probe,
}

impl Job {
    pub fn new(
        spec: ArchitectureSpec,
        targets: Vec<TargetSpec>,
        n_samples: usize,
        n_runs: usize,
    ) -> Self {
        Self {
            spec,
            targets,
            settings: ExperimentSettings::new(n_samples),
            n_runs,
            master_seed: crate::config::DEFAULT_SEED,
            variant: String::new(),
            annotations: Vec::new(),
            probe: Probe::None,
        }
    }

    pub fn variant(mut self, v: impl Into<String>) -> Self {
        self.variant = v.into();
        self
    }

    pub fn describe(&self) -> String {
        let s = &self.spec;
        format!(
            "{} n={} input_qubits={} reservoir_qubits={}{}",
            s.kind,
            s.n,
            s.input_qubits,
            s.reservoir_qubits,
            if self.variant.is_empty() {
                String::new()
            } else {
                format!(" [{}]", self.variant)
            }
        )
    }

    /// Checks size limits and target shapes before any work starts.
    pub fn validate(&self) -> CliResult<()> {
        let wrap = |e| CliError::from_core(self.describe(), e);
        self.spec.validate().map_err(wrap)?;
        if self.targets.is_empty() {
            return Err(CliError::usage(format!("{}: no targets", self.describe())));
        }
        if self.n_runs == 0 || self.settings.n_samples == 0 {
            return Err(CliError::usage(format!(
                "{}: runs and samples must be positive",
                self.describe()
            )));
        }
        if !self.annotations.is_empty() && self.annotations.len() != self.targets.len() {
            return Err(CliError::usage(format!(
                "{}: one annotation per target",
                self.describe()
            )));
        }
        if self.probe == Probe::Correlations && self.spec.units() != 1 {
            return Err(CliError::usage(format!(
                "{}: correlations need a single-unit architecture",
                self.describe()
            )));
        }
        Ok(())
    }
}

/// One line of experiment output.
#[derive(Clone, Debug, PartialEq)]
pub struct ResultRow {
    pub preset: String,
    pub architecture: String,
    pub n: usize,
    pub input_qubits: usize,
    pub reservoir_qubits: usize,
    pub pvm_outcomes: usize,
    pub target: String,
    pub nmse_mean: f64,
    pub nmse_std: f64,
    pub n_runs: usize,
    pub n_samples: usize,
    pub master_seed: u64,
    pub wall_time_seconds: f64,
    pub variant: String,
    pub extra: String,
}

/// Mean mutual information and concurrence between input and reservoir after the evolution.
fn correlations(job: &Job, run: usize) -> CoreResult<(f64, f64)> {
    let spec = &job.spec;
    let mut rng = run_source(job.master_seed, run);
    let arch = prepare(spec, &mut rng)?;
    let (channel, eta) = (&arch.unit_channels()[0], &arch.reservoir_states()[0]);
    let dim_in = 1usize << spec.input_qubits;
    let dim_res = 1usize << spec.reservoir_qubits;
    let two_qubits = dim_in * dim_res == 4;
    let (mut mi, mut c) = (0.0, 0.0);
    // Same draws, in the same order, as the run's dataset.
    for _ in 0..job.settings.n_samples {
        let rho = job.settings.input_ensemble.sample(dim_in, &mut rng)?;
        let out = apply_channel(channel, &rho.tensor(eta)?)?;
        mi += mutual_information(&out, dim_in, dim_res)?;
        if two_qubits {
            c += concurrence(&out)?;
        }
    }
    let n = job.settings.n_samples as f64;
    Ok((mi / n, if two_qubits { c / n } else { f64::NAN }))
}

pub fn run_job(preset: &str, job: &Job) -> CliResult<Vec<ResultRow>> {
    job.validate()?;
    let start = Instant::now();
    let wrap = |e| CliError::from_core(job.describe(), e);
    let per_run: Vec<Vec<f64>> = (0..job.n_runs)
        .into_par_iter()
        .map(|r| run_single(&job.spec, &job.targets, &job.settings, job.master_seed, r))
        .collect::<CoreResult<_>>()
        .map_err(wrap)?;
    let probe = match job.probe {
        Probe::None => None,
        Probe::Correlations => {
            let values: Vec<(f64, f64)> = (0..job.n_runs)
                .into_par_iter()
                .map(|r| correlations(job, r))
                .collect::<CoreResult<_>>()
                .map_err(wrap)?;
            let (mi, _) = mean_std(&values.iter().map(|v| v.0).collect::<Vec<_>>());
            let (c, _) = mean_std(&values.iter().map(|v| v.1).collect::<Vec<_>>());
            Some(format!("mutual_information={mi:.16e};concurrence={c:.16e}"))
        }
    };
    let summaries = aggregate(&job.targets, &per_run).map_err(wrap)?;
    let wall = start.elapsed().as_secs_f64();
    log::info!("{preset}: {} finished in {wall:.2} s", job.describe());
    Ok(summaries
        .into_iter()
        .enumerate()
        .map(|(l, s)| {
            let mut extra: Vec<&str> = Vec::new();
            if let Some(a) = job.annotations.get(l).filter(|a| !a.is_empty()) {
                extra.push(a);
            }
            if let Some(p) = &probe {
                extra.push(p);
            }
            ResultRow {
                preset: preset.to_string(),
                architecture: job.spec.kind.to_string(),
                n: job.spec.n,
                input_qubits: job.spec.input_qubits,
                reservoir_qubits: job.spec.reservoir_qubits,
                pvm_outcomes: job.spec.feature_len(),
                target: s.label,
                nmse_mean: s.mean,
                nmse_std: s.std,
                n_runs: job.n_runs,
                n_samples: job.settings.n_samples,
                master_seed: job.master_seed,
                wall_time_seconds: wall,
                variant: job.variant.clone(),
                extra: extra.join(";"),
            }
        })
        .collect())
}

/// Validates every job first so a bad configuration fails before any compute.
pub fn run_jobs(preset: &str, jobs: &[Job]) -> CliResult<Vec<ResultRow>> {
    for job in jobs {
        job.validate()?;
    }
    let mut rows = Vec::new();
    for job in jobs {
        rows.extend(run_job(preset, job)?);
    }
    Ok(rows)
}

/// Sizes the global worker pool from `QELM_THREADS` and applies `QELM_MAX_DIM`.
pub fn configure_from_env() -> CliResult<()> {
    if let Ok(v) = std::env::var("QELM_MAX_DIM") {
        let limit: usize = v.trim().parse().map_err(|_| {
            CliError::usage(format!(
                "QELM_MAX_DIM must be a positive integer, got `{v}`"
            ))
        })?;
        qelm_core::qcore::set_max_dim(limit);
    }
    if let Ok(v) = std::env::var("QELM_THREADS") {
        let threads: usize = v.trim().parse().ok().filter(|t| *t > 0).ok_or_else(|| {
            CliError::usage(format!(
                "QELM_THREADS must be a positive integer, got `{v}`"
            ))
        })?;
        // A pool that already exists keeps its size.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build_global();
    }
    Ok(())
}

//! Datasets, linear readout training and normalized error.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use faer::linalg::matmul::matmul;
use faer::{Accum, Mat, Par};
use rand::seq::SliceRandom;

use crate::architectures::{
    features_batch, prepare, ArchitectureSpec, FeatureVector, PreparedArchitecture,
};
use crate::qcore::{DensityMatrix, Ensemble, RandomSource};
use crate::targets::TargetSpec;
use crate::{Error, Result};

/// Mean NMSE at or below this counts as perfect reconstruction.
pub const PERFECT_NMSE: f64 = 1e-8;
/// Singular values below this fraction of the largest are dropped by the pseudoinverse.
pub const PINV_CUTOFF: f64 = 1e-10;
/// Target variance below which NMSE is undefined.
pub const MIN_TARGET_VARIANCE: f64 = 1e-14;

#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub input: DensityMatrix,
    pub features: FeatureVector,
    /// One value per target spec.
    pub targets: Vec<f64>,
}

/// Samples sharing a feature length and a target list.
#[derive(Clone, Debug, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    target_specs: Vec<TargetSpec>,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>, target_specs: Vec<TargetSpec>) -> Result<Self> {
        if let Some(first) = samples.first() {
            let p = first.features.len();
            for s in &samples {
                if s.features.len() != p {
                    return Err(Error::DimensionMismatch {
                        context: "dataset features",
                        expected: p,
                        found: s.features.len(),
                    });
                }
                if s.targets.len() != target_specs.len() {
                    return Err(Error::DimensionMismatch {
                        context: "dataset targets",
                        expected: target_specs.len(),
                        found: s.targets.len(),
                    });
                }
            }
        }
        Ok(Self {
            samples,
            target_specs,
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn target_specs(&self) -> &[TargetSpec] {
        &self.target_specs
    }

    pub fn feature_len(&self) -> usize {
        self.samples.first().map_or(0, |s| s.features.len())
    }

    pub fn target_column(&self, l: usize) -> Vec<f64> {
        self.samples.iter().map(|s| s.targets[l]).collect()
    }
}

/// `n_samples` i.i.d. inputs from `ensemble` with their features and exact targets.
pub fn generate_dataset(
    arch: &PreparedArchitecture,
    targets: &[TargetSpec],
    n_samples: usize,
    ensemble: Ensemble,
    rng: &mut RandomSource,
) -> Result<Dataset> {
    if n_samples == 0 {
        return Err(Error::contract("a dataset needs at least one sample"));
    }
    let dim = 1usize << arch.spec().input_qubits;
    let inputs: Vec<DensityMatrix> = (0..n_samples)
        .map(|_| ensemble.sample(dim, rng))
        .collect::<Result<_>>()?;
    let features = features_batch(arch, &inputs)?;
    let samples = inputs
        .into_iter()
        .zip(features)
        .map(|(input, features)| {
            let targets = targets
                .iter()
                .map(|t| t.evaluate(&input))
                .collect::<Result<_>>()?;
            Ok(Sample {
                input,
                features,
                targets,
            })
        })
        .collect::<Result<_>>()?;
    Dataset::new(samples, targets.to_vec())
}

fn split_at(
    mut samples: Vec<Sample>,
    specs: &[TargetSpec],
    train_fraction: f64,
) -> Result<(Dataset, Dataset)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::contract(
            "train fraction must lie strictly between 0 and 1",
        ));
    }
    let n_train = libm::floor(train_fraction * samples.len() as f64) as usize;
    if n_train == 0 || n_train == samples.len() {
        return Err(Error::contract(format!(
            "splitting {} samples at {train_fraction} leaves one side empty",
            samples.len()
        )));
    }
    let test = samples.split_off(n_train);
    Ok((
        Dataset::new(samples, specs.to_vec())?,
        Dataset::new(test, specs.to_vec())?,
    ))
}

/// First `⌊fraction·N⌋` samples train, the rest test.
pub fn split(ds: &Dataset, train_fraction: f64) -> Result<(Dataset, Dataset)> {
    split_at(ds.samples.clone(), &ds.target_specs, train_fraction)
}

/// As [`split`] after a seeded shuffle.
pub fn split_shuffled(
    ds: &Dataset,
    train_fraction: f64,
    rng: &mut RandomSource,
) -> Result<(Dataset, Dataset)> {
    let mut samples = ds.samples.clone();
    samples.shuffle(rng);
    split_at(samples, &ds.target_specs, train_fraction)
}

/// Row-major `N_tg × p` readout matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ReadoutWeights {
    targets: usize,
    features: usize,
    w: Vec<f64>,
}

impl ReadoutWeights {
    pub fn new(targets: usize, features: usize, w: Vec<f64>) -> Result<Self> {
        if w.len() != targets * features {
            return Err(Error::DimensionMismatch {
                context: "readout weights",
                expected: targets * features,
                found: w.len(),
            });
        }
        if w.iter().any(|x| !x.is_finite()) {
            return Err(Error::Numeric("readout weights must be finite".into()));
        }
        Ok(Self {
            targets,
            features,
            w,
        })
    }

    pub fn zeros(targets: usize, features: usize) -> Self {
        Self {
            targets,
            features,
            w: alloc::vec![0.0; targets * features],
        }
    }

    pub fn n_targets(&self) -> usize {
        self.targets
    }

    pub fn n_features(&self) -> usize {
        self.features
    }

    pub fn row(&self, l: usize) -> &[f64] {
        &self.w[l * self.features..(l + 1) * self.features]
    }
}

/// Least-squares readout through the SVD pseudoinverse of the feature matrix.
///
/// With `regularization = Some(λ)` the ridge objective `‖Y − F W‖² + λ‖W‖²`
/// is minimized instead. Rank-deficient problems get the minimum-norm solution.
pub fn fit_readout(train: &Dataset, regularization: Option<f64>) -> Result<ReadoutWeights> {
    fit_readout_with(train, regularization, PinvCutoff::default())
}

/// Which singular values the unregularized pseudoinverse keeps.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum PinvCutoff {
    /// Keep `σ > c·σ_max`.
    Relative(f64),
    /// Keep `σ > ε·max(N, p)·σ_max`, the LAPACK least-squares default.
    /// Resolves feature directions that vanish with a tiny coupling.
    Machine,
}

impl Default for PinvCutoff {
    fn default() -> Self {
        PinvCutoff::Relative(PINV_CUTOFF)
    }
}

/// [`fit_readout`] with an explicit pseudoinverse cutoff.
pub fn fit_readout_with(
    train: &Dataset,
    regularization: Option<f64>,
    cutoff: PinvCutoff,
) -> Result<ReadoutWeights> {
    let n = train.len();
    let p = train.feature_len();
    let n_tg = train.target_specs.len();
    if n == 0 || p == 0 {
        return Err(Error::contract("training set must be non-empty"));
    }
    if let Some(l) = regularization {
        if !(l.is_finite() && l >= 0.0) {
            return Err(Error::contract(
                "regularization must be finite and non-negative",
            ));
        }
    }
    let relative = match cutoff {
        PinvCutoff::Relative(c) if c.is_finite() && c >= 0.0 => c,
        PinvCutoff::Relative(_) => {
            return Err(Error::contract("cutoff must be finite and non-negative"))
        }
        PinvCutoff::Machine => f64::EPSILON * n.max(p) as f64,
    };
    if n <= p {
        log::warn!("{n} training samples for {p} features: the readout is underdetermined");
    }
    let f = Mat::<f64>::from_fn(n, p, |i, j| train.samples[i].features.values[j]);
    let y = Mat::<f64>::from_fn(n, n_tg, |i, l| train.samples[i].targets[l]);
    let svd = f
        .thin_svd()
        .map_err(|e| Error::Numeric(format!("singular value decomposition failed: {e:?}")))?;
    let sigma = svd.S().column_vector();
    let k = sigma.nrows();
    let max = (0..k).map(|i| sigma[i]).fold(0.0, f64::max);
    if max == 0.0 {
        return Err(Error::Numeric("feature matrix is identically zero".into()));
    }
    let gain: Vec<f64> = (0..k)
        .map(|i| {
            let s = sigma[i];
            match regularization {
                Some(l) if l > 0.0 => s / (s * s + l),
                _ if s > relative * max => 1.0 / s,
                _ => 0.0,
            }
        })
        .collect();
    // Wᵀ = V · diag(gain) · Uᵀ · Y
    let mut uty = Mat::<f64>::zeros(k, n_tg);
    matmul(
        uty.as_mut(),
        Accum::Replace,
        svd.U().transpose(),
        y.as_ref(),
        1.0,
        Par::Seq,
    );
    for i in 0..k {
        for l in 0..n_tg {
            uty[(i, l)] *= gain[i];
        }
    }
    let mut wt = Mat::<f64>::zeros(p, n_tg);
    matmul(
        wt.as_mut(),
        Accum::Replace,
        svd.V(),
        uty.as_ref(),
        1.0,
        Par::Seq,
    );
    let w = (0..n_tg)
        .flat_map(|l| (0..p).map(move |j| (l, j)))
        .map(|(l, j)| wt[(j, l)])
        .collect();
    ReadoutWeights::new(n_tg, p, w)
}

/// `W · f`.
pub fn predict(w: &ReadoutWeights, f: &FeatureVector) -> Result<Vec<f64>> {
    if f.len() != w.features {
        return Err(Error::DimensionMismatch {
            context: "predict",
            expected: w.features,
            found: f.len(),
        });
    }
    Ok((0..w.targets)
        .map(|l| w.row(l).iter().zip(&f.values).map(|(a, b)| a * b).sum())
        .collect())
}

/// `mean((y − ŷ)²) / Var(y)` with the population variance of `y_true`.
pub fn nmse(y_true: &[f64], y_pred: &[f64]) -> Result<f64> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            context: "nmse",
            expected: y_true.len(),
            found: y_pred.len(),
        });
    }
    if y_true.len() < 2 {
        return Err(Error::contract("nmse needs at least two values"));
    }
    let n = y_true.len() as f64;
    let mean = y_true.iter().sum::<f64>() / n;
    let var = y_true.iter().map(|y| (y - mean) * (y - mean)).sum::<f64>() / n;
    if var.is_nan() || var <= MIN_TARGET_VARIANCE {
        return Err(Error::DegenerateTarget(var));
    }
    let mse = y_true
        .iter()
        .zip(y_pred)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        / n;
    Ok(mse / var)
}

/// Per-target test NMSE of a trained readout.
pub fn evaluate(w: &ReadoutWeights, test: &Dataset) -> Result<Vec<f64>> {
    let predictions: Vec<Vec<f64>> = test
        .samples
        .iter()
        .map(|s| predict(w, &s.features))
        .collect::<Result<_>>()?;
    (0..w.targets)
        .map(|l| {
            let pred: Vec<f64> = predictions.iter().map(|p| p[l]).collect();
            nmse(&test.target_column(l), &pred)
        })
        .collect()
}

/// Protocol knobs shared by every run of an experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExperimentSettings {
    pub n_samples: usize,
    pub train_fraction: f64,
    pub regularization: Option<f64>,
    pub cutoff: PinvCutoff,
    pub input_ensemble: Ensemble,
    pub shuffle: bool,
}

impl ExperimentSettings {
    /// 80/20 split, no ridge, Hilbert–Schmidt inputs.
    pub fn new(n_samples: usize) -> Self {
        Self {
            n_samples,
            train_fraction: 0.8,
            regularization: None,
            cutoff: PinvCutoff::default(),
            input_ensemble: Ensemble::Ginibre,
            shuffle: false,
        }
    }
}

/// Random source of run `run` under `master_seed`; independent of execution order.
pub fn run_source(master_seed: u64, run: usize) -> RandomSource {
    RandomSource::new(master_seed, 0).derive(run as u64)
}

/// Prepares a fresh architecture, trains and returns per-target test NMSE.
pub fn run_single(
    spec: &ArchitectureSpec,
    targets: &[TargetSpec],
    settings: &ExperimentSettings,
    master_seed: u64,
    run: usize,
) -> Result<Vec<f64>> {
    let attach = |e: Error| Error::Run {
        run,
        source: Box::new(e),
    };
    let mut rng = run_source(master_seed, run);
    let arch = prepare(spec, &mut rng).map_err(attach)?;
    let ds = generate_dataset(
        &arch,
        targets,
        settings.n_samples,
        settings.input_ensemble,
        &mut rng,
    )
    .map_err(attach)?;
    let (train, test) = if settings.shuffle {
        split_shuffled(&ds, settings.train_fraction, &mut rng)
    } else {
        split(&ds, settings.train_fraction)
    }
    .map_err(attach)?;
    let w = fit_readout_with(&train, settings.regularization, settings.cutoff).map_err(attach)?;
    evaluate(&w, &test).map_err(attach)
}

/// Mean and spread of one target's NMSE across runs.
#[derive(Clone, Debug, PartialEq)]
pub struct TargetSummary {
    pub label: String,
    pub mean: f64,
    /// Sample standard deviation across runs; zero for a single run.
    pub std: f64,
    pub per_run: Vec<f64>,
}

impl TargetSummary {
    pub fn is_perfect(&self) -> bool {
        self.mean <= PERFECT_NMSE
    }
}

/// Collapses per-run NMSE vectors (`runs × targets`) into per-target summaries.
pub fn aggregate(targets: &[TargetSpec], per_run: &[Vec<f64>]) -> Result<Vec<TargetSummary>> {
    if per_run.is_empty() {
        return Err(Error::contract("no runs to aggregate"));
    }
    targets
        .iter()
        .enumerate()
        .map(|(l, t)| {
            let values: Vec<f64> = per_run
                .iter()
                .map(|r| {
                    r.get(l).copied().ok_or(Error::DimensionMismatch {
                        context: "aggregate",
                        expected: targets.len(),
                        found: r.len(),
                    })
                })
                .collect::<Result<_>>()?;
            let (mean, std) = mean_std(&values);
            Ok(TargetSummary {
                label: t.label.clone(),
                mean,
                std,
                per_run: values,
            })
        })
        .collect()
}

/// Mean and sample standard deviation.
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, libm::sqrt(var))
}

/// Runs `n_runs` independent experiments sequentially and aggregates them.
pub fn run_experiment(
    spec: &ArchitectureSpec,
    targets: &[TargetSpec],
    settings: &ExperimentSettings,
    n_runs: usize,
    master_seed: u64,
) -> Result<Vec<TargetSummary>> {
    if n_runs == 0 {
        return Err(Error::contract("at least one run is required"));
    }
    let per_run: Vec<Vec<f64>> = (0..n_runs)
        .map(|r| run_single(spec, targets, settings, master_seed, r))
        .collect::<Result<_>>()?;
    aggregate(targets, &per_run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::architectures::ArchitectureKind;
    use crate::dynamics::DynamicsProfile;

    fn synthetic(rows: &[(Vec<f64>, Vec<f64>)]) -> Dataset {
        let specs: Vec<TargetSpec> = (0..rows[0].1.len()).map(|_| TargetSpec::purity()).collect();
        let samples = rows
            .iter()
            .map(|(f, y)| Sample {
                input: DensityMatrix::maximally_mixed(2),
                features: FeatureVector {
                    values: f.clone(),
                    blocks: 1,
                },
                targets: y.clone(),
            })
            .collect();
        Dataset::new(samples, specs).unwrap()
    }

    #[test]
    fn nmse_definition() {
        let y = [0.3, -1.2, 2.5, 0.7];
        assert_eq!(nmse(&y, &y).unwrap(), 0.0);
        let mean = y.iter().sum::<f64>() / 4.0;
        assert!((nmse(&y, &[mean; 4]).unwrap() - 1.0).abs() < 1e-15);
        assert!((nmse(&[0.0, 1.0], &[0.0, 0.0]).unwrap() - 2.0).abs() < 1e-15);
        assert!(matches!(
            nmse(&[1.0, 1.0], &[1.0, 1.0]),
            Err(Error::DegenerateTarget(_))
        ));
        assert!(nmse(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn split_sizes() {
        let rows: Vec<_> = (0..200)
            .map(|i| (alloc::vec![i as f64], alloc::vec![0.0]))
            .collect();
        let ds = synthetic(&rows);
        let (a, b) = split(&ds, 0.8).unwrap();
        assert_eq!((a.len(), b.len()), (160, 40));
        let (a, b) = split(&synthetic(&rows[..10]), 0.8).unwrap();
        assert_eq!((a.len(), b.len()), (8, 2));
        let (a, b) = split(&synthetic(&rows[..2]), 0.5).unwrap();
        assert_eq!((a.len(), b.len()), (1, 1));
        assert!(split(&synthetic(&rows[..1]), 0.5).is_err());
        assert!(split(&ds, 1.0).is_err());
        let mut rng = RandomSource::new(0, 0);
        let (a, _) = split_shuffled(&ds, 0.8, &mut rng).unwrap();
        assert_eq!(a.len(), 160);
        assert_ne!(a.samples()[0].features.values[0], 0.0);
    }

    #[test]
    fn single_feature_fit() {
        let w = fit_readout(&synthetic(&[(alloc::vec![3.0], alloc::vec![6.0])]), None).unwrap();
        assert!((w.row(0)[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn exact_linear_targets_are_recovered() {
        let mut rng = RandomSource::new(7, 0);
        let v = [[0.5, -1.0, 2.0, 0.25, 3.0], [1.5, 0.0, -0.5, 1.0, -2.0]];
        let rows: Vec<_> = (0..40)
            .map(|_| {
                let f: Vec<f64> = (0..5).map(|_| rng.standard_normal()).collect();
                let y = v
                    .iter()
                    .map(|r| r.iter().zip(&f).map(|(a, b)| a * b).sum())
                    .collect();
                (f, y)
            })
            .collect();
        let ds = synthetic(&rows);
        let (train, test) = split(&ds, 0.8).unwrap();
        let w = fit_readout(&train, None).unwrap();
        for s in test.samples() {
            let p = predict(&w, &s.features).unwrap();
            for (a, b) in p.iter().zip(&s.targets) {
                assert!((a - b).abs() < 1e-9);
            }
        }
    }

    #[test]
    fn duplicated_columns_give_minimum_norm() {
        let rows: Vec<_> = [1.0, 2.0, -1.5, 0.5]
            .iter()
            .map(|&x| (alloc::vec![x, x], alloc::vec![4.0 * x]))
            .collect();
        let w = fit_readout(&synthetic(&rows), None).unwrap();
        assert!((w.row(0)[0] - 2.0).abs() < 1e-12 && (w.row(0)[1] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn zero_features_are_rejected() {
        let rows = [
            (alloc::vec![0.0, 0.0], alloc::vec![1.0]),
            (alloc::vec![0.0, 0.0], alloc::vec![2.0]),
        ];
        assert!(matches!(
            fit_readout(&synthetic(&rows), None),
            Err(Error::Numeric(_))
        ));
    }

    #[test]
    fn predict_edge_cases() {
        let f = FeatureVector {
            values: alloc::vec![0.2, 0.3, 0.5],
            blocks: 1,
        };
        assert_eq!(
            predict(&ReadoutWeights::zeros(2, 3), &f).unwrap(),
            alloc::vec![0.0, 0.0]
        );
        let pick = ReadoutWeights::new(1, 3, alloc::vec![0.0, 1.0, 0.0]).unwrap();
        assert_eq!(predict(&pick, &f).unwrap(), alloc::vec![0.3]);
        assert!(predict(&ReadoutWeights::zeros(1, 2), &f).is_err());
    }

    #[test]
    fn ergodic_single_qubit_reservoir_learns_sigma_x() {
        let spec = ArchitectureSpec::new(ArchitectureKind::S3L, 1, 1, 1);
        let targets = [TargetSpec::pauli("X").unwrap()];
        let s = run_experiment(&spec, &targets, &ExperimentSettings::new(200), 3, 11).unwrap();
        assert!(s[0].mean <= PERFECT_NMSE, "{}", s[0].mean);

        let frozen = spec.with_dynamics(DynamicsProfile {
            j_scale: 0.0,
            ..DynamicsProfile::ergodic()
        });
        let s = run_experiment(&frozen, &targets, &ExperimentSettings::new(200), 3, 11).unwrap();
        assert!(s[0].mean > 0.5, "{}", s[0].mean);
    }

    #[test]
    fn experiments_are_deterministic() {
        let spec = ArchitectureSpec::new(ArchitectureKind::SM, 2, 1, 1);
        let targets = [TargetSpec::purity()];
        let a = run_experiment(&spec, &targets, &ExperimentSettings::new(30), 2, 5).unwrap();
        let b = run_experiment(&spec, &targets, &ExperimentSettings::new(30), 2, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sample_standard_deviation() {
        assert_eq!(mean_std(&[2.0]), (2.0, 0.0));
        let (m, s) = mean_std(&[1.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((s - libm::sqrt(2.0)).abs() < 1e-15);
    }
}

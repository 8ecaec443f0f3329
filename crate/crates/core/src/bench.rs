//! Monte-Carlo forecasting benchmark.
//!
//! Each trial draws autoregression coefficients, simulates a path and runs the
//! truncated predictor with and without the near-ideal prefilter. Errors are
//! reported as ratios against the linear predictor with the true coefficients
//! ("oracle") and with the population means `(0.5, 0)` ("mean").

use serde::Serialize;

use crate::arsim::{sample_ar1_coeff, sample_stationary_ar2, simulate_ar, ArModel, CoefficientDraw, TrialRng, DEFAULT_BURN_IN};
use crate::error::{domain, Error, Result};
use crate::realization::{compose, impulse_from_spec, truncate, Kernel, DEFAULT_GRID};
use crate::stream::{convolve, Series};
use crate::xfer::{NearIdealParams, PredictorParams, TransferSpec};

/// Population means of the random coefficients.
pub const MEAN_COEFFS: (f64, f64) = (0.5, 0.0);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Ar1,
    Ar2,
}

/// How the prefiltered predictor kernel is built.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CompositeWindow {
    /// Inverse transform of `K H`, truncated to lags `0..=d`.
    DWindow,
    /// `k_d` convolved with `h_d`, lags `0..=2d`.
    TwoDWindow,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub trials: usize,
    pub n: usize,
    pub d: usize,
    pub sigma: f64,
    pub model_kind: ModelKind,
    pub predictor: PredictorParams,
    pub prefilter: NearIdealParams,
    pub grid_l: usize,
    pub master_seed: u64,
    pub composite_window: CompositeWindow,
    pub burn_in: usize,
}

impl BenchConfig {
    /// `gamma = r = 1.1`, `(a, p, N, m) = (0.6, 0.7, 100, 2)`,
    /// 10,000 trials with `n = d = 100` and `sigma = 0.3`.
    pub fn reference(model_kind: ModelKind) -> Self {
        Self {
            trials: 10_000,
            n: 100,
            d: 100,
            sigma: 0.3,
            model_kind,
            predictor: PredictorParams::new(1.1, 1.1).expect("valid"),
            prefilter: NearIdealParams::new(0.6, 0.7, 100, 2).expect("valid"),
            grid_l: DEFAULT_GRID,
            master_seed: 1,
            composite_window: CompositeWindow::DWindow,
            burn_in: DEFAULT_BURN_IN,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(domain("trials", 0.0, "trials >= 1"));
        }
        if self.n == 0 {
            return Err(domain("n", 0.0, "n >= 1"));
        }
        if self.d == 0 {
            return Err(domain("d", 0.0, "d >= 1"));
        }
        if !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return Err(domain("sigma", self.sigma, "sigma > 0"));
        }
        if self.d + 1 > self.grid_l / 2 {
            return Err(domain("d", self.d as f64, "d + 1 <= grid/2"));
        }
        Ok(())
    }

    pub fn predictor_spec(&self) -> TransferSpec {
        TransferSpec::Predictor(self.predictor)
    }

    pub fn composite_spec(&self) -> TransferSpec {
        TransferSpec::Product(vec![self.predictor_spec(), TransferSpec::NearIdeal(self.prefilter)])
    }
}

/// Truncated kernels shared by all trials of a configuration.
#[derive(Debug, Clone)]
pub struct BenchKernels {
    /// `k_d`: predictor alone.
    pub predictor: Kernel,
    /// Predictor with the prefilter.
    pub composite: Kernel,
}

/// One-step predictor kernel on lags `0..=d`, optionally prefiltered.
pub fn predictor_kernel(
    predictor: PredictorParams,
    prefilter: Option<NearIdealParams>,
    d: usize,
    grid: usize,
    window: CompositeWindow,
) -> Result<Kernel> {
    let support = d + 1;
    let bare = TransferSpec::Predictor(predictor);
    let Some(prefilter) = prefilter else {
        return truncate(&impulse_from_spec(&bare, grid, support)?, d);
    };
    match window {
        CompositeWindow::DWindow => {
            let spec = TransferSpec::Product(vec![bare, TransferSpec::NearIdeal(prefilter)]);
            truncate(&impulse_from_spec(&spec, grid, support)?, d)
        }
        CompositeWindow::TwoDWindow => {
            let k = truncate(&impulse_from_spec(&bare, grid, support)?, d)?;
            let h = truncate(&impulse_from_spec(&TransferSpec::NearIdeal(prefilter), grid, support)?, d)?;
            Ok(compose(&k, &h))
        }
    }
}

pub fn build_kernels(config: &BenchConfig) -> Result<BenchKernels> {
    config.validate()?;
    let kernel = |prefilter| predictor_kernel(config.predictor, prefilter, config.d, config.grid_l, config.composite_window);
    Ok(BenchKernels {
        predictor: kernel(None)?,
        composite: kernel(Some(config.prefilter))?,
    })
}

/// `||y(t-1) - x(t)|| / ||b1 x(t-1) + b2 x(t-2) - x(t)||` over `t = 1..=n`.
pub fn error_ratio(y: &Series, x: &Series, b1: f64, b2: f64, n: usize) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for t in 1..=n as i64 {
        let xt = x.at(t)?;
        let x1 = x.at(t - 1)?;
        let x2 = x.at(t - 2)?;
        num += (y.at(t - 1)? - xt).powi(2);
        den += (b1 * x1 + b2 * x2 - xt).powi(2);
    }
    if den < 1e-300 {
        return Err(Error::DegenerateDenominator(den));
    }
    Ok((num / den).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub beta1: f64,
    pub beta2: f64,
    #[serde(rename = "e_KK_oracle")]
    pub e_kk_oracle: f64,
    #[serde(rename = "e_KH_oracle")]
    pub e_kh_oracle: f64,
    #[serde(rename = "e_KK_mean")]
    pub e_kk_mean: f64,
    #[serde(rename = "e_KH_mean")]
    pub e_kh_mean: f64,
    pub resamples: u32,
}

/// Everything a trial computes before the ratios.
#[derive(Debug, Clone)]
pub struct TrialPaths {
    pub coefficients: CoefficientDraw,
    /// `x(t)` for `t = -(d+2) ..= n`.
    pub x: Series,
    pub y_predictor: Series,
    pub y_composite: Series,
}

pub fn trial_paths(config: &BenchConfig, trial_index: u64, kernels: &BenchKernels) -> Result<TrialPaths> {
    let mut rng = TrialRng::new(config.master_seed, trial_index);
    let coefficients = match config.model_kind {
        ModelKind::Ar2 => sample_stationary_ar2(&mut rng),
        ModelKind::Ar1 => sample_ar1_coeff(&mut rng),
    };
    let model = ArModel::new(coefficients.beta1, coefficients.beta2, config.sigma)?;
    let start = -(config.d as i64 + 2);
    let length = config.n + config.d + 3;
    let x = simulate_ar(&model, length, config.burn_in, start, &mut rng);
    let y_predictor = convolve(&kernels.predictor, &x);
    let y_composite = convolve(&kernels.composite, &x);
    Ok(TrialPaths {
        coefficients,
        x,
        y_predictor,
        y_composite,
    })
}

pub fn run_trial(config: &BenchConfig, trial_index: u64, kernels: &BenchKernels) -> Result<TrialResult> {
    let paths = trial_paths(config, trial_index, kernels)?;
    let c = paths.coefficients;
    let (m1, m2) = MEAN_COEFFS;
    let n = config.n;
    Ok(TrialResult {
        trial_index,
        beta1: c.beta1,
        beta2: c.beta2,
        e_kk_oracle: error_ratio(&paths.y_predictor, &paths.x, c.beta1, c.beta2, n)?,
        e_kh_oracle: error_ratio(&paths.y_composite, &paths.x, c.beta1, c.beta2, n)?,
        e_kk_mean: error_ratio(&paths.y_predictor, &paths.x, m1, m2, n)?,
        e_kh_mean: error_ratio(&paths.y_composite, &paths.x, m1, m2, n)?,
        resamples: c.resamples,
    })
}

/// Mean and standard error of one metric.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetricSummary {
    pub mean: f64,
    pub se: f64,
    pub count: usize,
}

impl MetricSummary {
    /// Sequential summation in the given order.
    pub fn from_values(values: impl Iterator<Item = f64> + Clone) -> Self {
        let count = values.clone().count();
        if count == 0 {
            return Self {
                mean: f64::NAN,
                se: f64::NAN,
                count,
            };
        }
        let mean = values.clone().sum::<f64>() / count as f64;
        let se = if count > 1 {
            let var = values.map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
            (var / count as f64).sqrt()
        } else {
            0.0
        };
        Self { mean, se, count }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Metrics {
    #[serde(rename = "e_KK_oracle")]
    pub e_kk_oracle: MetricSummary,
    #[serde(rename = "e_KH_oracle")]
    pub e_kh_oracle: MetricSummary,
    #[serde(rename = "e_KK_mean")]
    pub e_kk_mean: MetricSummary,
    #[serde(rename = "e_KH_mean")]
    pub e_kh_mean: MetricSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub metrics: Metrics,
    pub trials: usize,
    pub seed: u64,
    pub total_resamples: u64,
    pub seconds: f64,
}

/// Aggregates results sorted by trial index.
pub fn aggregate(config: &BenchConfig, results: &[TrialResult], seconds: f64) -> BenchReport {
    let mut ordered = results.to_vec();
    ordered.sort_by_key(|r| r.trial_index);
    let summary = |f: fn(&TrialResult) -> f64| MetricSummary::from_values(ordered.iter().map(f));
    BenchReport {
        config: config.clone(),
        metrics: Metrics {
            e_kk_oracle: summary(|r| r.e_kk_oracle),
            e_kh_oracle: summary(|r| r.e_kh_oracle),
            e_kk_mean: summary(|r| r.e_kk_mean),
            e_kh_mean: summary(|r| r.e_kh_mean),
        },
        trials: ordered.len(),
        seed: config.master_seed,
        total_resamples: ordered.iter().map(|r| r.resamples as u64).sum(),
        seconds,
    }
}

/// Runs trials `0..trials` on up to `workers` threads (0 = all cores).
/// The results do not depend on `workers`.
pub fn run_trials(config: &BenchConfig, kernels: &BenchKernels, workers: usize) -> Result<Vec<TrialResult>> {
    let indices = 0..config.trials as u64;
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        if workers != 1 {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(workers)
                .build()
                .map_err(|_| domain("workers", workers as f64, "a usable thread count"))?;
            return pool.install(|| {
                indices
                    .into_par_iter()
                    .map(|i| run_trial(config, i, kernels))
                    .collect()
            });
        }
    }
    let _ = workers;
    indices.map(|i| run_trial(config, i, kernels)).collect()
}

pub fn run_benchmark(config: &BenchConfig) -> Result<BenchReport> {
    run_benchmark_with_workers(config, 0)
}

pub fn run_benchmark_with_workers(config: &BenchConfig, workers: usize) -> Result<BenchReport> {
    let started = std::time::Instant::now();
    let kernels = build_kernels(config)?;
    let results = run_trials(config, &kernels, workers)?;
    Ok(aggregate(config, &results, started.elapsed().as_secs_f64()))
}

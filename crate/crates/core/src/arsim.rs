//! Autoregression sample paths and per-trial random streams.
//!
//! Every Monte-Carlo trial owns a [`TrialRng`]: a ChaCha8 generator keyed by
//! the master seed and positioned on stream `trial_index`, so trials are
//! reproducible in isolation and can run in any order.
//!
//! Uniform variates take the top 53 bits of a `u64` as `(k + 1/2) / 2^53`,
//! which lies strictly inside `(0, 1)`. Gaussian variates use the Marsaglia
//! polar method on pairs of uniforms on `(-1, 1)`, returning the cached second
//! variate on the next call.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::stream::Series;

/// Default number of discarded start-up samples.
pub const DEFAULT_BURN_IN: usize = 1000;

/// Source of the innovations `eta(t)` driving an autoregression.
pub trait Innovations {
    fn next_innovation(&mut self) -> f64;
}

/// Reproducible random stream for one Monte-Carlo trial.
#[derive(Debug, Clone)]
pub struct TrialRng {
    master_seed: u64,
    trial_index: u64,
    inner: ChaCha8Rng,
    spare: Option<f64>,
}

impl TrialRng {
    pub fn new(master_seed: u64, trial_index: u64) -> Self {
        let mut inner = ChaCha8Rng::seed_from_u64(master_seed);
        inner.set_stream(trial_index);
        Self {
            master_seed,
            trial_index,
            inner,
            spare: None,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trial_index(&self) -> u64 {
        self.trial_index
    }

    /// Uniform on the open interval `(0, 1)`.
    pub fn uniform_open(&mut self) -> f64 {
        const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
        ((self.inner.next_u64() >> 11) as f64 + 0.5) * SCALE
    }

    /// Uniform on `(lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform_open()
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(v) = self.spare.take() {
            return v;
        }
        loop {
            let u = 2.0 * self.uniform_open() - 1.0;
            let v = 2.0 * self.uniform_open() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * factor);
                return u * factor;
            }
        }
    }
}

impl Innovations for TrialRng {
    fn next_innovation(&mut self) -> f64 {
        self.standard_normal()
    }
}

/// Replays a fixed innovation sequence, cycling when exhausted.
///
/// Meant for hand-checkable tests: `ScriptedNoise::new(vec![1.0])` is `eta = 1`.
#[derive(Debug, Clone)]
pub struct ScriptedNoise {
    values: Vec<f64>,
    next: usize,
}

impl ScriptedNoise {
    pub fn new(values: Vec<f64>) -> Self {
        assert!(!values.is_empty(), "scripted noise needs at least one value");
        Self { values, next: 0 }
    }
}

impl Innovations for ScriptedNoise {
    fn next_innovation(&mut self) -> f64 {
        let v = self.values[self.next];
        self.next = (self.next + 1) % self.values.len();
        v
    }
}

/// True iff both roots of `z^2 - beta1 z - beta2` lie strictly inside the unit disk.
pub fn is_stationary(beta1: f64, beta2: f64) -> bool {
    beta2.abs() < 1.0 && beta1 + beta2 < 1.0 && beta2 - beta1 < 1.0
}

/// `x(t) = beta1 x(t-1) + beta2 x(t-2) + sigma eta(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ArModel {
    beta1: f64,
    beta2: f64,
    sigma: f64,
}

impl ArModel {
    pub fn new(beta1: f64, beta2: f64, sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(domain("sigma", sigma, "sigma > 0"));
        }
        if !is_stationary(beta1, beta2) {
            return Err(Error::NonStationary { beta1, beta2 });
        }
        Ok(Self {
            beta1,
            beta2,
            sigma,
        })
    }

    pub fn beta1(&self) -> f64 {
        self.beta1
    }

    pub fn beta2(&self) -> f64 {
        self.beta2
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Variance of the stationary AR(1) process (`beta2 = 0` only).
    pub fn ar1_variance(&self) -> Option<f64> {
        (self.beta2 == 0.0).then(|| self.sigma * self.sigma / (1.0 - self.beta1 * self.beta1))
    }
}

/// Maps a uniform `beta1` in `(0,1)` and `xi` in `(-1,1)` to `(beta1, xi sqrt(1 - beta1^2))`.
pub fn ar2_coeffs_from_uniforms(beta1: f64, xi: f64) -> (f64, f64) {
    (beta1, xi * (1.0 - beta1 * beta1).sqrt())
}

/// One draw of the random AR(2) coefficients: `beta1` first, then `xi`.
pub fn sample_ar2_coeffs(rng: &mut TrialRng) -> (f64, f64) {
    let beta1 = rng.uniform_open();
    let xi = rng.uniform(-1.0, 1.0);
    ar2_coeffs_from_uniforms(beta1, xi)
}

/// Coefficients accepted for a trial, with the number of rejected draws.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CoefficientDraw {
    pub beta1: f64,
    pub beta2: f64,
    pub resamples: u32,
}

/// Draws AR(2) coefficients until [`is_stationary`] accepts them.
pub fn sample_stationary_ar2(rng: &mut TrialRng) -> CoefficientDraw {
    let mut resamples = 0;
    loop {
        let (beta1, beta2) = sample_ar2_coeffs(rng);
        if is_stationary(beta1, beta2) {
            return CoefficientDraw {
                beta1,
                beta2,
                resamples,
            };
        }
        resamples += 1;
    }
}

/// AR(1) coefficient `beta1 ~ U(0, 1)`, `beta2 = 0`.
pub fn sample_ar1_coeff(rng: &mut TrialRng) -> CoefficientDraw {
    CoefficientDraw {
        beta1: rng.uniform_open(),
        beta2: 0.0,
        resamples: 0,
    }
}

/// Runs the recursion from two zero initial values, discards `burn_in`
/// samples and returns the next `length` ones starting at `start_index`.
pub fn simulate_ar<I: Innovations>(
    model: &ArModel,
    length: usize,
    burn_in: usize,
    start_index: i64,
    noise: &mut I,
) -> Series {
    let (mut prev1, mut prev2) = (0.0, 0.0);
    let mut values = Vec::with_capacity(length);
    for k in 0..burn_in + length {
        let x = model.beta1 * prev1 + model.beta2 * prev2 + model.sigma * noise.next_innovation();
        prev2 = prev1;
        prev1 = x;
        if k >= burn_in {
            values.push(x);
        }
    }
    Series::new(values, start_index).expect("stationary recursion with finite innovations stays finite")
}

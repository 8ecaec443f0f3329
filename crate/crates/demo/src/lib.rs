//! Browser bindings for the near-ideal filter demo page.
//!
//! The plain functions are ordinary Rust and are tested natively; the
//! `#[wasm_bindgen]` wrappers only convert errors.

use nearideal::arsim::{simulate_ar, ArModel, TrialRng, DEFAULT_BURN_IN};
use nearideal::bench::{error_ratio, predictor_kernel, CompositeWindow};
use nearideal::xfer::{eval_near_ideal, eval_reference, unit};
use nearideal::{convolve, impulse_from_spec, NearIdealParams, PredictorParams, ReferenceParams, TransferSpec};
use wasm_bindgen::prelude::*;

/// Grid used for the demo kernels; small enough to stay interactive.
pub const DEMO_GRID: usize = 16384;

/// Interleaved `(omega, |H|, M, |H - 1|)` for `points` angles in `[0, pi]`.
pub fn gain_rows(near: &NearIdealParams, reference: &ReferenceParams, points: usize) -> nearideal::Result<Vec<f64>> {
    let points = points.max(2);
    let mut out = Vec::with_capacity(4 * points);
    for i in 0..points {
        let omega = std::f64::consts::PI * i as f64 / (points - 1) as f64;
        let z = if i == points - 1 { (-1.0).into() } else { unit(omega) };
        let h = eval_near_ideal(near, z)?;
        out.extend([omega, h.norm(), eval_reference(reference, omega), (h - 1.0).norm()]);
    }
    Ok(out)
}

pub fn impulse_taps(near: &NearIdealParams, support: usize) -> nearideal::Result<Vec<f64>> {
    Ok(impulse_from_spec(&TransferSpec::NearIdeal(*near), DEMO_GRID, support)?.taps().to_vec())
}

/// An AR(2) path with one-step forecasts from the bare and the prefiltered predictor.
#[wasm_bindgen]
#[derive(Debug, Clone)]
pub struct Forecast {
    start: i32,
    x: Vec<f64>,
    bare: Vec<f64>,
    filtered: Vec<f64>,
    e_bare: f64,
    e_filtered: f64,
}

#[wasm_bindgen]
impl Forecast {
    /// Time index of the first entry of `x`.
    #[wasm_bindgen(getter)]
    pub fn start(&self) -> i32 {
        self.start
    }

    /// `x(t)` for `t = 1..=n`.
    #[wasm_bindgen(getter)]
    pub fn x(&self) -> Vec<f64> {
        self.x.clone()
    }

    /// Forecast of `x(t)` made at `t - 1` without the prefilter.
    #[wasm_bindgen(getter)]
    pub fn bare(&self) -> Vec<f64> {
        self.bare.clone()
    }

    #[wasm_bindgen(getter)]
    pub fn filtered(&self) -> Vec<f64> {
        self.filtered.clone()
    }

    /// Error ratio against the true-coefficient linear predictor.
    #[wasm_bindgen(getter)]
    pub fn e_bare(&self) -> f64 {
        self.e_bare
    }

    #[wasm_bindgen(getter)]
    pub fn e_filtered(&self) -> f64 {
        self.e_filtered
    }
}

#[allow(clippy::too_many_arguments)]
pub fn forecast_path(
    beta1: f64,
    beta2: f64,
    sigma: f64,
    n: usize,
    d: usize,
    seed: u64,
    predictor: PredictorParams,
    prefilter: NearIdealParams,
) -> nearideal::Result<Forecast> {
    let model = ArModel::new(beta1, beta2, sigma)?;
    let start = -(d as i64 + 2);
    let x = simulate_ar(&model, n + d + 3, DEFAULT_BURN_IN, start, &mut TrialRng::new(seed, 0));
    let kernel = |pre| predictor_kernel(predictor, pre, d, DEMO_GRID, CompositeWindow::DWindow);
    let y_bare = convolve(&kernel(None)?, &x);
    let y_filtered = convolve(&kernel(Some(prefilter))?, &x);
    let lagged = |y: &nearideal::Series| (1..=n as i64).map(|t| y.at(t - 1)).collect::<nearideal::Result<Vec<_>>>();
    Ok(Forecast {
        start: 1,
        x: (1..=n as i64).map(|t| x.at(t)).collect::<nearideal::Result<_>>()?,
        bare: lagged(&y_bare)?,
        filtered: lagged(&y_filtered)?,
        e_bare: error_ratio(&y_bare, &x, beta1, beta2, n)?,
        e_filtered: error_ratio(&y_filtered, &x, beta1, beta2, n)?,
    })
}

fn js(err: nearideal::Error) -> JsError {
    JsError::new(&err.to_string())
}

/// Gain of the near-ideal filter next to the reference gain.
#[wasm_bindgen]
#[allow(non_snake_case)]
pub fn gain_curve(a: f64, p: f64, N: u32, m: u32, mu: f64, q: f64, points: usize) -> Result<Vec<f64>, JsError> {
    let near = NearIdealParams::new(a, p, N, m).map_err(js)?;
    let reference = ReferenceParams::new(mu, q).map_err(js)?;
    gain_rows(&near, &reference, points).map_err(js)
}

#[wasm_bindgen]
#[allow(non_snake_case)]
pub fn impulse_response(a: f64, p: f64, N: u32, m: u32, support: usize) -> Result<Vec<f64>, JsError> {
    let near = NearIdealParams::new(a, p, N, m).map_err(js)?;
    impulse_taps(&near, support).map_err(js)
}

#[wasm_bindgen]
#[allow(non_snake_case, clippy::too_many_arguments)]
pub fn forecast(
    beta1: f64,
    beta2: f64,
    sigma: f64,
    n: usize,
    d: usize,
    seed: u32,
    gamma: f64,
    r: f64,
    a: f64,
    p: f64,
    N: u32,
    m: u32,
) -> Result<Forecast, JsError> {
    let predictor = PredictorParams::new(gamma, r).map_err(js)?;
    let prefilter = NearIdealParams::new(a, p, N, m).map_err(js)?;
    forecast_path(beta1, beta2, sigma, n, d, seed.into(), predictor, prefilter).map_err(js)
}

//! Numerical checks of the conditions that characterize the near-ideal
//! family: bounded gain (a1), identity approximation on a band (a2) and on
//! sequences (a3), a flat zero at `z = -1` (b1), a small-gain neighbourhood
//! of `z = -1` (b2), and domination by the reference gain (c).
//!
//! Every check is a deterministic function of its arguments. Suprema are
//! taken over uniform grids; derivatives at `w = pi` use central differences
//! with Richardson extrapolation.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::{E, PI};

use num_complex::Complex64;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{domain, Result};
use crate::realization::{impulse_from_spec, DEFAULT_GRID};
use crate::stream::{convolve, Series};
use crate::xfer::{
    eval_near_ideal, eval_near_ideal_uncorrected, eval_reference, unit, NearIdealParams,
    ReferenceParams, TransferSpec,
};

/// Default number of grid points for suprema.
pub const DEFAULT_CHECK_GRID: usize = 4096;
/// Base finite-difference step for derivatives at `w = pi`.
pub const DERIVATIVE_STEP: f64 = 1e-3;
/// Derivative tolerance relative to the same-stencil derivative at `w = pi/2`.
pub const DERIVATIVE_REL_TOL: f64 = 1e-5;
/// `|H(-1)|` tolerance relative to the maximal gain.
pub const ZERO_REL_TOL: f64 = 1e-12;
/// Upper limit on the final identity-band error in the a2 check.
pub const IDENTITY_LIMIT: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionId {
    A1,
    A2,
    A3,
    B1,
    B2,
    C,
}

impl std::fmt::Display for ConditionId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            ConditionId::A1 => "a1",
            ConditionId::A2 => "a2",
            ConditionId::A3 => "a3",
            ConditionId::B1 => "b1",
            ConditionId::B2 => "b2",
            ConditionId::C => "c",
        };
        f.write_str(s)
    }
}

/// Outcome of one check with every measured quantity behind it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionReport {
    pub condition_id: ConditionId,
    pub pass: bool,
    pub witness: Map<String, Value>,
    pub tolerances: Map<String, Value>,
    pub parameters: Map<String, Value>,
}

impl ConditionReport {
    fn new(condition_id: ConditionId, pass: bool, witness: Value, tolerances: Value, parameters: Value) -> Self {
        let as_map = |v: Value| match v {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        Self {
            condition_id,
            pass,
            witness: as_map(witness),
            tolerances: as_map(tolerances),
            parameters: as_map(parameters),
        }
    }

    pub fn witness_f64(&self, key: &str) -> Option<f64> {
        self.witness.get(key).and_then(Value::as_f64)
    }
}

/// Frequency bands of the domination check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandSpec {
    /// Identity band `[-omega, omega]`.
    pub omega: f64,
    /// Damping band `[omega0, omega1]` and its mirror; empty when equal.
    pub omega0: f64,
    pub omega1: f64,
    pub epsilon: f64,
    pub grid_points: usize,
}

impl BandSpec {
    pub fn new(omega: f64, omega0: f64, omega1: f64, epsilon: f64, grid_points: usize) -> Result<Self> {
        if !(omega > 0.0 && omega < omega0) {
            return Err(domain("omega", omega, "0 < omega < omega0"));
        }
        if !(omega0 <= omega1 && omega1 < PI) {
            return Err(domain("omega1", omega1, "omega0 <= omega1 < pi"));
        }
        if !(epsilon > 0.0) {
            return Err(domain("epsilon", epsilon, "epsilon > 0"));
        }
        if grid_points < 2 {
            return Err(domain("grid_points", grid_points as f64, "grid_points >= 2"));
        }
        Ok(Self {
            omega,
            omega0,
            omega1,
            epsilon,
            grid_points,
        })
    }

    /// `omega = 2.0`, `[2.6, 3.0]`, `epsilon = 0.1`, 4096 points.
    pub fn default_band() -> Self {
        Self {
            omega: 2.0,
            omega0: 2.6,
            omega1: 3.0,
            epsilon: 0.1,
            grid_points: DEFAULT_CHECK_GRID,
        }
    }
}

/// `n` equispaced points on `[lo, hi]`, endpoints included.
fn linspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let step = if n > 1 { (hi - lo) / (n - 1) as f64 } else { 0.0 };
    (0..n).map(move |i| if i + 1 == n && n > 1 { hi } else { lo + step * i as f64 })
}

fn near_params_json(params: &NearIdealParams) -> Value {
    json!({"a": params.a(), "p": params.p(), "N": params.lag(), "m": params.power()})
}

fn gain(params: &NearIdealParams, omega: f64) -> f64 {
    eval_near_ideal(params, unit(omega)).map_or(f64::INFINITY, |h| h.norm())
}

/// Largest gain over `grid` points of `[0, pi]`.
pub fn max_gain(params: &NearIdealParams, grid: usize) -> f64 {
    linspace(0.0, PI, grid.max(2)).map(|w| gain(params, w)).fold(0.0, f64::max)
}

/// a1: `|H_a|` stays below `2 (e + 1)^m` for every `a` in `a_list`.
pub fn check_bounded_gain(p: f64, lag: u32, power: u32, a_list: &[f64], grid: usize) -> Result<ConditionReport> {
    let bound = 2.0 * (E + 1.0).powi(power as i32);
    let mut per_a = Vec::with_capacity(a_list.len());
    let mut max = 0.0f64;
    for &a in a_list {
        let params = NearIdealParams::new(a, p, lag, power)?;
        let m = max_gain(&params, grid);
        per_a.push(json!({"a": a, "max_gain": m}));
        max = max.max(m);
    }
    Ok(ConditionReport::new(
        ConditionId::A1,
        max <= bound,
        json!({"max_gain": max, "per_a": per_a}),
        json!({"bound": bound}),
        json!({"p": p, "N": lag, "m": power, "a_list": a_list, "grid": grid}),
    ))
}

fn same_family(seq: &[NearIdealParams]) -> Result<()> {
    for pair in seq.windows(2) {
        let (x, y) = (pair[0], pair[1]);
        if x.p() != y.p() || x.lag() != y.lag() || x.power() != y.power() {
            return Err(domain("p/N/m", y.p(), "shared (p, N, m) across the sequence"));
        }
        if !(y.a() > x.a()) {
            return Err(domain("a", y.a(), "strictly increasing a"));
        }
    }
    Ok(())
}

/// `max |H_a - 1|` over `[-omega, omega]`; a single point at `w = 0` when `omega <= 0`.
pub fn identity_band_error(params: &NearIdealParams, omega: f64, grid: usize) -> f64 {
    let points = if omega <= 0.0 { 1 } else { grid.max(2) };
    let lo = if omega <= 0.0 { 0.0 } else { -omega };
    linspace(lo, omega.max(0.0), points)
        .map(|w| eval_near_ideal(params, unit(w)).map_or(f64::INFINITY, |h| (h - 1.0).norm()))
        .fold(0.0, f64::max)
}

/// a2: the identity-band error shrinks along `params_seq` and ends below 0.05.
pub fn check_identity_approx(params_seq: &[NearIdealParams], omega: f64, grid: usize) -> Result<ConditionReport> {
    same_family(params_seq)?;
    let errors: Vec<f64> = params_seq.iter().map(|p| identity_band_error(p, omega, grid)).collect();
    let pass = match (errors.first(), errors.last()) {
        (Some(first), Some(last)) => (errors.len() == 1 || last < first) && *last < IDENTITY_LIMIT,
        _ => false,
    };
    let a_values: Vec<f64> = params_seq.iter().map(NearIdealParams::a).collect();
    let family = params_seq.first().map_or(Value::Null, near_params_json);
    Ok(ConditionReport::new(
        ConditionId::A2,
        pass,
        json!({"a": a_values, "band_error": errors}),
        json!({"final_limit": IDENTITY_LIMIT}),
        json!({"family": family, "omega": omega, "grid": grid}),
    ))
}

/// Sum of sinusoids with every frequency inside `[-omega, omega]`.
pub fn bandlimited_probe(omega: f64, len: usize) -> Series {
    let freqs = [0.1 * omega, 0.45 * omega, 0.9 * omega];
    let values = (0..len)
        .map(|t| {
            let t = t as f64;
            (freqs[0] * t).cos() + 0.5 * (freqs[1] * t + 1.0).sin() + 0.25 * (freqs[2] * t + 2.0).cos()
        })
        .collect();
    Series::new(values, 0).expect("finite probe")
}

/// a3: filtering a band-limited probe, `max |y_a - x|` after the start-up
/// transient shrinks along `params_seq`.
pub fn check_sequence_approx(params_seq: &[NearIdealParams], omega: f64, support: usize) -> Result<ConditionReport> {
    same_family(params_seq)?;
    let probe = bandlimited_probe(omega, 2 * support);
    let mut errors = Vec::with_capacity(params_seq.len());
    for params in params_seq {
        let kernel = impulse_from_spec(&TransferSpec::NearIdeal(*params), DEFAULT_GRID, support)?;
        let y = convolve(&kernel, &probe);
        let err = y.values()[support..]
            .iter()
            .zip(&probe.values()[support..])
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        errors.push(err);
    }
    let pass = errors.windows(2).all(|w| w[1] < w[0]) && !errors.is_empty();
    let a_values: Vec<f64> = params_seq.iter().map(NearIdealParams::a).collect();
    let family = params_seq.first().map_or(Value::Null, near_params_json);
    Ok(ConditionReport::new(
        ConditionId::A3,
        pass,
        json!({"a": a_values, "sup_error": errors}),
        json!({"monotone": true}),
        json!({"family": family, "omega": omega, "support": support, "probe_len": 2 * support}),
    ))
}

fn binomial(n: u32, k: u32) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Central `k`-th difference quotient with step `h`.
fn central_difference<F: Fn(f64) -> Complex64>(f: &F, at: f64, order: u32, h: f64) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..=order {
        let offset = (order as f64 / 2.0 - i as f64) * h;
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        acc += sign * binomial(order, i) * f(at + offset);
    }
    acc / h.powi(order as i32)
}

/// Richardson table over steps `h, h/2, ..., h/2^(levels-1)`; the central
/// stencil has an even error expansion so each level removes one power of `h^2`.
fn richardson<F: Fn(f64) -> Complex64>(f: &F, at: f64, order: u32, h: f64, levels: usize) -> Complex64 {
    let mut row: Vec<Complex64> = (0..levels)
        .map(|i| central_difference(f, at, order, h / 2f64.powi(i as i32)))
        .collect();
    for level in 1..levels {
        let factor = 4f64.powi(level as i32);
        row = row.windows(2).map(|w| (factor * w[1] - w[0]) / (factor - 1.0)).collect();
    }
    row[0]
}

const RICHARDSON_LEVELS: usize = 3;

fn zero_at_pi_report<F: Fn(f64) -> Complex64>(params: &NearIdealParams, response: F, variant: &str) -> ConditionReport {
    let power = params.power();
    let at_pi = response(PI).norm();
    let scale = linspace(0.0, PI, DEFAULT_CHECK_GRID).map(|w| response(w).norm()).fold(0.0, f64::max);
    let zero_ok = at_pi <= ZERO_REL_TOL * scale;

    let mut derivatives = Vec::new();
    let mut all_ok = zero_ok;
    for order in 1..=(2 * power).saturating_sub(1).max(power) {
        let estimate = richardson(&response, PI, order, DERIVATIVE_STEP, RICHARDSON_LEVELS).norm();
        let halved = richardson(&response, PI, order, DERIVATIVE_STEP / 2.0, RICHARDSON_LEVELS).norm();
        let reference = richardson(&response, PI / 2.0, order, DERIVATIVE_STEP, RICHARDSON_LEVELS).norm();
        let tol = DERIVATIVE_REL_TOL * reference;
        let within = estimate <= tol;
        let converged = (estimate - halved).abs() <= 0.1 * halved.max(tol);
        let asserted = order <= power;
        if asserted {
            all_ok &= within;
        }
        derivatives.push(json!({
            "order": order,
            "estimate": estimate,
            "estimate_half_step": halved,
            "reference_at_half_pi": reference,
            "tolerance": tol,
            "within_tolerance": within,
            "converged": converged,
            "asserted": asserted,
        }));
    }
    let mut parameters = near_params_json(params);
    parameters["variant"] = json!(variant);
    ConditionReport::new(
        ConditionId::B1,
        all_ok,
        json!({"abs_at_pi": at_pi, "max_gain": scale, "zero_ok": zero_ok, "derivatives": derivatives}),
        json!({
            "zero_rel": ZERO_REL_TOL,
            "derivative_rel": DERIVATIVE_REL_TOL,
            "step": DERIVATIVE_STEP,
            "richardson_levels": RICHARDSON_LEVELS,
        }),
        parameters,
    )
}

/// b1: `H(-1) = 0` and `d^k H / dw^k = 0` at `w = pi` for `k = 1..=m`.
///
/// Orders `m+1..2m-1` are estimated and reported but not asserted.
pub fn check_zero_at_pi(params: &NearIdealParams) -> ConditionReport {
    zero_at_pi_report(params, |w| eval_near_ideal(params, unit(w)).unwrap_or(Complex64::new(f64::NAN, 0.0)), "full")
}

/// Same stencil applied to `(exp Psi)^m`, i.e. with the correction term removed.
/// Its slope at `w = pi` does not vanish, so this check is expected to fail.
pub fn check_zero_at_pi_uncorrected(params: &NearIdealParams) -> ConditionReport {
    zero_at_pi_report(
        params,
        |w| eval_near_ideal_uncorrected(params, unit(w)).unwrap_or(Complex64::new(f64::NAN, 0.0)),
        "without_correction",
    )
}

/// b2: the largest `delta` with `sup_{|w - pi| <= delta} |H| < epsilon`.
pub fn check_small_neighborhood(params: &NearIdealParams, epsilon: f64, grid: usize) -> Result<ConditionReport> {
    if !(epsilon > 0.0) {
        return Err(domain("epsilon", epsilon, "epsilon > 0"));
    }
    let grid = grid.max(2);
    let below = |u: f64| gain(params, PI - u) < epsilon && gain(params, -PI + u) < epsilon;
    let step = PI / grid as f64;
    let mut last_good: Option<usize> = None;
    for i in 0..=grid {
        if below(step * i as f64) {
            last_good = Some(i);
        } else {
            break;
        }
    }
    let delta = match last_good {
        None => 0.0,
        Some(i) if i == grid => PI,
        Some(i) => {
            let (mut lo, mut hi) = (step * i as f64, step * (i + 1) as f64);
            for _ in 0..60 {
                let mid = 0.5 * (lo + hi);
                if below(mid) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            lo
        }
    };
    Ok(ConditionReport::new(
        ConditionId::B2,
        delta > 0.0,
        json!({"delta": delta}),
        json!({"epsilon": epsilon}),
        json!({"near_ideal": near_params_json(params), "grid": grid}),
    ))
}

/// c: `|H - 1| <= epsilon` on `[-omega, omega]` and `|H| <= M` on the damping band.
pub fn check_domination(near: &NearIdealParams, reference: &ReferenceParams, band: &BandSpec) -> ConditionReport {
    let n = band.grid_points;
    let identity_error = identity_band_error(near, band.omega, n);
    let identity_margin = band.epsilon - identity_error;

    let mut worst: Option<(f64, f64)> = None;
    if band.omega1 > band.omega0 {
        for w in linspace(band.omega0, band.omega1, n) {
            for side in [w, -w] {
                let margin = eval_reference(reference, side) - gain(near, side);
                if worst.is_none_or(|(m, _)| margin < m) {
                    worst = Some((margin, side));
                }
            }
        }
    }
    let domination_margin = worst.map_or(f64::INFINITY, |(m, _)| m);
    let pass = identity_margin >= 0.0 && domination_margin >= 0.0;
    ConditionReport::new(
        ConditionId::C,
        pass,
        json!({
            "identity_band_error": identity_error,
            "identity_margin": identity_margin,
            "domination_margin": worst.map(|(m, _)| m),
            "worst_omega": worst.map(|(_, w)| w),
            "damping_band_empty": worst.is_none(),
        }),
        json!({"epsilon": band.epsilon}),
        json!({
            "near_ideal": near_params_json(near),
            "reference": {"mu": reference.mu(), "q": reference.q()},
            "band": band,
        }),
    )
}

/// Options for [`run_suite`].
#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub grid: usize,
    pub a1_list: Vec<f64>,
    pub a2_sequence: Vec<f64>,
    pub a2_omega: f64,
    pub b2_epsilon: f64,
    /// Runs the domination check when set.
    pub domination: Option<(ReferenceParams, BandSpec)>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            grid: DEFAULT_CHECK_GRID,
            a1_list: vec![0.5, 0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
            a2_sequence: vec![0.9, 0.99, 0.999],
            a2_omega: PI / 2.0,
            b2_epsilon: 0.1,
            domination: None,
        }
    }
}

/// a1, a2, b1, b2 (and c when requested) for the family of `params`.
pub fn run_suite(params: &NearIdealParams, options: &SuiteOptions) -> Result<Vec<ConditionReport>> {
    let mut a1_list = options.a1_list.clone();
    if !a1_list.contains(&params.a()) {
        a1_list.push(params.a());
    }
    let seq = options
        .a2_sequence
        .iter()
        .map(|&a| params.with_a(a))
        .collect::<Result<Vec<_>>>()?;
    let mut reports = vec![
        check_bounded_gain(params.p(), params.lag(), params.power(), &a1_list, options.grid)?,
        check_identity_approx(&seq, options.a2_omega, options.grid)?,
        check_zero_at_pi(params),
        check_small_neighborhood(params, options.b2_epsilon, options.grid)?,
    ];
    if let Some((reference, band)) = &options.domination {
        reports.push(check_domination(params, reference, band));
    }
    Ok(reports)
}

//! Closed-form transfer functions, evaluated pointwise on the closed exterior
//! of the unit disk.
//!
//! Three families are provided:
//!
//! * the near-ideal causal smoothing filter
//!   `H(z) = (exp((1-a)^p / (z + a)) + G(z))^m` with the correction term
//!   `G(z) = -xi(a,p) + gamma_coef(a,p)/N * ((-1)^N z^-N - 1)`,
//! * the non-causal reference gain `M(w) = exp(-mu / |1 + e^{iw}|^q)`,
//! * the one-step predictor `K(z) = z (1 - exp(-gamma / (z + 1 - gamma^-r)))`.
//!
//! Integer powers are always formed by multiplication so no complex logarithm
//! (and no branch cut) is ever involved.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{domain, Error, Result};

const SINGULAR_EPS: f64 = 1e-14;

/// Parameters `(a, p, N, m)` of the near-ideal filter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NearIdealParams {
    a: f64,
    p: f64,
    #[serde(rename = "N")]
    lag: u32,
    #[serde(rename = "m")]
    power: u32,
}

impl NearIdealParams {
    pub fn new(a: f64, p: f64, lag: u32, power: u32) -> Result<Self> {
        check_a_p(a, p)?;
        if lag == 0 {
            return Err(domain("N", lag as f64, "N >= 1"));
        }
        if power == 0 {
            return Err(domain("m", power as f64, "m >= 1"));
        }
        Ok(Self { a, p, lag, power })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// Lag `N` of the periodic correction term.
    pub fn lag(&self) -> u32 {
        self.lag
    }

    /// Power `m`; the zero at `z = -1` has order `2m`.
    pub fn power(&self) -> u32 {
        self.power
    }

    /// Same `(p, N, m)` with a different `a`.
    pub fn with_a(&self, a: f64) -> Result<Self> {
        Self::new(a, self.p, self.lag, self.power)
    }

    pub fn xi(&self) -> f64 {
        xi_unchecked(self.a, self.p)
    }

    pub fn gamma_coef(&self) -> f64 {
        gamma_unchecked(self.a, self.p)
    }
}

/// Parameters `(mu, q)` of the reference gain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ReferenceParams {
    mu: f64,
    q: f64,
}

impl ReferenceParams {
    pub fn new(mu: f64, q: f64) -> Result<Self> {
        if !(mu > 0.0 && mu.is_finite()) {
            return Err(domain("mu", mu, "mu > 0"));
        }
        if !(q > 1.0 && q.is_finite()) {
            return Err(domain("q", q, "q > 1"));
        }
        Ok(Self { mu, q })
    }

    pub fn mu(&self) -> f64 {
        self.mu
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// Parameters of the predicting kernel `K`.
///
/// `gamma` is the predictor gain, unrelated to [`gamma_coef`]. The prediction
/// is accurate for inputs whose spectrum is dominated by a reference gain with
/// `q > 1 + 2/r`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PredictorParams {
    gamma: f64,
    r: f64,
}

impl PredictorParams {
    pub fn new(gamma: f64, r: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(domain("gamma", gamma, "gamma > 0"));
        }
        if !(r > 0.0 && r.is_finite()) {
            return Err(domain("r", r, "r > 0"));
        }
        Ok(Self { gamma, r })
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    /// `gamma^-r`, computed as `exp(-r ln gamma)`.
    pub fn shift(&self) -> f64 {
        (-self.r * self.gamma.ln()).exp()
    }
}

/// Symbolic description of a transfer function.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", content = "params", rename_all = "snake_case")]
pub enum TransferSpec {
    NearIdeal(NearIdealParams),
    Reference(ReferenceParams),
    Predictor(PredictorParams),
    /// Pointwise product; build it with [`TransferSpec::product`].
    Product(Vec<TransferSpec>),
}

impl TransferSpec {
    pub fn product(factors: Vec<TransferSpec>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::EmptyProduct);
        }
        Ok(TransferSpec::Product(factors))
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        match self {
            TransferSpec::NearIdeal(params) => eval_near_ideal(params, z),
            TransferSpec::Reference(params) => Ok(Complex64::new(eval_reference(params, z.arg()), 0.0)),
            TransferSpec::Predictor(params) => eval_predictor(params, z),
            TransferSpec::Product(factors) => {
                let (first, rest) = factors.split_first().ok_or(Error::EmptyProduct)?;
                rest.iter()
                    .try_fold(first.eval(z)?, |acc, f| Ok(acc * f.eval(z)?))
            }
        }
    }

    /// True when a near-ideal factor forces a zero at `z = -1`.
    pub fn contains_near_ideal(&self) -> bool {
        match self {
            TransferSpec::NearIdeal(_) => true,
            TransferSpec::Product(factors) => factors.iter().any(TransferSpec::contains_near_ideal),
            _ => false,
        }
    }
}

/// Dispatching evaluator, see [`TransferSpec::eval`].
pub fn eval_spec(spec: &TransferSpec, z: Complex64) -> Result<Complex64> {
    spec.eval(z)
}

fn check_a_p(a: f64, p: f64) -> Result<()> {
    if !(a > 0.0 && a < 1.0) {
        return Err(domain("a", a, "0 < a < 1"));
    }
    if !(p > 0.5 && p < 1.0) {
        return Err(domain("p", p, "1/2 < p < 1"));
    }
    Ok(())
}

fn xi_unchecked(a: f64, p: f64) -> f64 {
    (-(1.0 - a).powf(p - 1.0)).exp()
}

fn gamma_unchecked(a: f64, p: f64) -> f64 {
    (1.0 - a).abs().powf(p - 2.0) * xi_unchecked(a, p)
}

/// `xi(a, p) = exp(-(1-a)^(p-1))`.
pub fn xi_coef(a: f64, p: f64) -> Result<f64> {
    check_a_p(a, p)?;
    Ok(xi_unchecked(a, p))
}

/// `gamma(a, p) = |1-a|^(p-2) xi(a, p)`.
pub fn gamma_coef(a: f64, p: f64) -> Result<f64> {
    check_a_p(a, p)?;
    Ok(gamma_unchecked(a, p))
}

/// `Psi(z) = (1-a)^p / (z + a)`.
pub fn eval_psi(params: &NearIdealParams, z: Complex64) -> Result<Complex64> {
    let den = z + params.a;
    if den.norm() < SINGULAR_EPS {
        return Err(Error::Singularity(format!("z + a = 0 at z = {z}")));
    }
    Ok((1.0 - params.a).powf(params.p) / den)
}

/// Correction term `G(z)`; `(-1)^N` is taken from the parity of `N`.
pub fn eval_g(params: &NearIdealParams, z: Complex64) -> Result<Complex64> {
    if z.norm() < SINGULAR_EPS {
        return Err(Error::Singularity("z = 0 in z^-N".to_string()));
    }
    let mut periodic = z.inv().powu(params.lag);
    if params.lag % 2 == 1 {
        periodic = -periodic;
    }
    let scale = params.gamma_coef() / params.lag as f64;
    Ok(-params.xi() + scale * (periodic - 1.0))
}

fn int_power(base: Complex64, power: u32) -> Complex64 {
    let mut acc = base;
    for _ in 1..power {
        acc *= base;
    }
    acc
}

/// Near-ideal transfer function `H(z)`.
pub fn eval_near_ideal(params: &NearIdealParams, z: Complex64) -> Result<Complex64> {
    let base = eval_psi(params, z)?.exp() + eval_g(params, z)?;
    Ok(int_power(base, params.power))
}

/// `(exp Psi(z))^m` without the correction term `G`.
///
/// Diagnostic only: it shows that `G` is what flattens the zero at `z = -1`.
pub fn eval_near_ideal_uncorrected(params: &NearIdealParams, z: Complex64) -> Result<Complex64> {
    Ok(int_power(eval_psi(params, z)?.exp(), params.power))
}

/// Reference gain `M(w)`; returns the limit value 0 where `|1 + e^{iw}| = 0`.
pub fn eval_reference(params: &ReferenceParams, omega: f64) -> f64 {
    if omega.abs() == std::f64::consts::PI {
        return 0.0;
    }
    // |1 + e^{iw}| = 2 |cos(w/2)|
    let dist = 2.0 * (0.5 * omega).cos().abs();
    if dist == 0.0 {
        return 0.0;
    }
    (-params.mu / dist.powf(params.q)).exp()
}

/// Predicting kernel `K(z)`.
pub fn eval_predictor(params: &PredictorParams, z: Complex64) -> Result<Complex64> {
    let den = z + (1.0 - params.shift());
    if den.norm() < SINGULAR_EPS {
        return Err(Error::Singularity(format!(
            "z + 1 - gamma^-r = 0 at z = {z}"
        )));
    }
    Ok(z * (1.0 - (-params.gamma / den).exp()))
}

/// `e^{iw}`, built so that `unit(-w)` is the exact conjugate of `unit(w)`.
pub fn unit(omega: f64) -> Complex64 {
    let (s, c) = omega.sin_cos();
    Complex64::new(c, s)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    // 40-digit mpmath evaluations of the closed forms, kept at full printed length.
    const XI_06_07: f64 = 0.268_103_493_206_502_007_4;
    const GAMMA_06_07: f64 = 0.882_316_668_442_210_894_4;
    const XI_099_06: f64 = 0.001_818_808_896_157_207_421;
    const GAMMA_099_06: f64 = 1.147_590_831_236_303_155;
    const PSI_AT_ONE: f64 = 0.329_095_551_083_559_353_4;
    const H_AT_ONE: f64 = 1.258_002_586_356_855_923;
    const M_AT_ZERO: f64 = 0.990_118_223_848_607_322_7;
    const K_AT_ONE: f64 = 0.632_276_943_318_417_867_0;
    const K_AT_MINUS_ONE: f64 = 2.392_569_724_845_953_465;

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    fn fig_params() -> NearIdealParams {
        NearIdealParams::new(0.6, 0.7, 100, 2).unwrap()
    }

    #[test]
    fn coefficients_match_high_precision() {
        assert!(rel(xi_coef(0.6, 0.7).unwrap(), XI_06_07) < 1e-14);
        assert!(rel(gamma_coef(0.6, 0.7).unwrap(), GAMMA_06_07) < 1e-14);
        assert!(rel(xi_coef(0.99, 0.6).unwrap(), XI_099_06) < 1e-13);
        assert!(rel(gamma_coef(0.99, 0.6).unwrap(), GAMMA_099_06) < 1e-13);
        let expected = 0.01f64.powf(-1.4) * xi_coef(0.99, 0.6).unwrap();
        assert!(rel(gamma_coef(0.99, 0.6).unwrap(), expected) < 1e-14);
    }

    #[test]
    fn coefficient_identity_and_limit() {
        for &(a, p) in &[(0.1, 0.55), (0.5, 0.7), (0.9, 0.9), (0.999, 0.6)] {
            let ratio = gamma_coef(a, p).unwrap() / xi_coef(a, p).unwrap();
            assert!(rel(ratio, (1.0 - a).powf(p - 2.0)) < 1e-12);
        }
        let mut prev = 1.0;
        for a in [0.9, 0.99, 0.999, 0.9999, 0.999_999] {
            let xi = xi_coef(a, 0.7).unwrap();
            assert!(xi > 0.0 && xi < prev);
            prev = xi;
        }
        assert!(prev < 1e-10);
    }

    #[test]
    fn coefficient_domain_errors() {
        assert!(xi_coef(0.0, 0.7).is_err());
        assert!(xi_coef(1.0, 0.7).is_err());
        assert!(gamma_coef(0.5, 0.5).is_err());
        assert!(gamma_coef(0.5, 1.0).is_err());
        assert!(xi_coef(f64::NAN, 0.7).is_err());
        assert!(NearIdealParams::new(0.5, 0.7, 0, 1).is_err());
        assert!(NearIdealParams::new(0.5, 0.7, 1, 0).is_err());
        assert!(ReferenceParams::new(0.0, 1.5).is_err());
        assert!(ReferenceParams::new(0.1, 1.0).is_err());
        assert!(PredictorParams::new(-1.0, 1.0).is_err());
        assert!(PredictorParams::new(1.0, 0.0).is_err());
    }

    #[test]
    fn psi_values() {
        let params = fig_params();
        let at_one = eval_psi(&params, Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel(at_one.re, PSI_AT_ONE) < 1e-14);
        assert_eq!(at_one.im, 0.0);
        let at_minus_one = eval_psi(&params, Complex64::new(-1.0, 0.0)).unwrap();
        assert!(rel(at_minus_one.re, -(0.4f64).powf(-0.3)) < 1e-14);
        let z = unit(1.234);
        assert_eq!(eval_psi(&params, z.conj()).unwrap(), eval_psi(&params, z).unwrap().conj());
    }

    #[test]
    fn g_values() {
        let params = fig_params();
        let g1 = eval_g(&params, Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel(g1.re, -XI_06_07) < 1e-14);
        for lag in [1, 2, 7, 50] {
            let p = NearIdealParams::new(0.8, 0.6, lag, 1).unwrap();
            let gm = eval_g(&p, Complex64::new(-1.0, 0.0)).unwrap();
            assert!((gm + p.xi()).norm() < 1e-15, "lag {lag}: {gm}");
            let bound = 2.0 * p.gamma_coef() / lag as f64;
            for k in 0..200 {
                let w = -PI + 2.0 * PI * k as f64 / 200.0;
                let g = eval_g(&p, unit(w)).unwrap();
                assert!((g + p.xi()).norm() <= bound * (1.0 + 1e-12));
            }
        }
        assert!(eval_g(&params, Complex64::new(0.0, 0.0)).is_err());
    }

    #[test]
    fn near_ideal_values() {
        let h1 = eval_near_ideal(&fig_params(), Complex64::new(1.0, 0.0)).unwrap();
        assert!(rel(h1.re, H_AT_ONE) < 1e-13);
        assert_eq!(h1.im, 0.0);
        for &(a, p, n, m) in &[(0.6, 0.7, 100, 2), (0.99, 0.6, 50, 2), (0.8, 0.6, 10, 1), (0.3, 0.9, 3, 4)] {
            let params = NearIdealParams::new(a, p, n, m).unwrap();
            let h = eval_near_ideal(&params, Complex64::new(-1.0, 0.0)).unwrap();
            assert!(h.norm() <= 1e-12, "{params:?}: {h}");
        }
    }

    #[test]
    fn reference_values() {
        let params = ReferenceParams::new(0.02, 1.01).unwrap();
        assert!(rel(eval_reference(&params, 0.0), M_AT_ZERO) < 1e-14);
        assert_eq!(eval_reference(&params, PI), 0.0);
        assert_eq!(eval_reference(&params, -PI), 0.0);
        let heavier = ReferenceParams::new(0.05, 1.01).unwrap();
        for k in 0..100 {
            let w = -PI + 2.0 * PI * k as f64 / 100.0;
            assert!(eval_reference(&params, w) >= eval_reference(&heavier, w));
        }
    }

    #[test]
    fn predictor_values() {
        let params = PredictorParams::new(1.1, 1.1).unwrap();
        let k1 = eval_predictor(&params, Complex64::new(1.0, 0.0)).unwrap();
        let km1 = eval_predictor(&params, Complex64::new(-1.0, 0.0)).unwrap();
        assert!(rel(k1.re, K_AT_ONE) < 1e-13);
        assert!(rel(km1.re, K_AT_MINUS_ONE) < 1e-13);
        assert!(k1.im.abs() < 1e-16 && km1.im.abs() < 1e-16);
        let z = unit(2.5);
        assert_eq!(eval_predictor(&params, z.conj()).unwrap(), eval_predictor(&params, z).unwrap().conj());
    }

    #[test]
    fn product_dispatch() {
        assert_eq!(TransferSpec::product(vec![]), Err(Error::EmptyProduct));
        assert_eq!(TransferSpec::Product(vec![]).eval(unit(0.3)), Err(Error::EmptyProduct));
        let h = TransferSpec::NearIdeal(fig_params());
        let k = TransferSpec::Predictor(PredictorParams::new(1.1, 1.1).unwrap());
        let single = TransferSpec::product(vec![h.clone()]).unwrap();
        let kh = TransferSpec::product(vec![k.clone(), h.clone()]).unwrap();
        for w in [0.0, 0.4, -2.0, 3.0] {
            let z = unit(w);
            assert_eq!(single.eval(z).unwrap(), h.eval(z).unwrap());
            assert_eq!(kh.eval(z).unwrap(), k.eval(z).unwrap() * h.eval(z).unwrap());
        }
        assert!(kh.eval(Complex64::new(-1.0, 0.0)).unwrap().norm() < 1e-12);
        assert!(kh.contains_near_ideal());
        assert!(!k.contains_near_ideal());
    }

    #[test]
    fn psi_bounded_on_positive_real_part_arc() {
        for &a in &[0.5, 0.6, 0.8, 0.9, 0.99] {
            let params = NearIdealParams::new(a, 0.6, 50, 2).unwrap();
            let bound = (1.0 - a).powf(0.6 - 0.5) / (1.0 + a).sqrt();
            assert!(bound <= 1.0);
            for k in 0..=4000 {
                let w = PI * k as f64 / 4000.0;
                if w.cos() + a < 0.0 {
                    continue;
                }
                let psi = eval_psi(&params, unit(w)).unwrap();
                assert!(psi.norm() <= bound * (1.0 + 1e-12));
            }
        }
    }

    #[test]
    fn bounded_gain_per_a() {
        for &p in &[0.6, 0.7] {
            for k in 0..50 {
                let a = 0.5 + 0.01 * k as f64;
                let params = NearIdealParams::new(a, p, 50, 2).unwrap();
                let bound = std::f64::consts::E + params.xi() + 2.0 * params.gamma_coef() / 50.0;
                for j in 0..=512 {
                    let w = PI * j as f64 / 512.0;
                    let h = eval_near_ideal(&params, unit(w)).unwrap();
                    assert!(h.norm().sqrt() <= bound);
                }
            }
        }
    }
}

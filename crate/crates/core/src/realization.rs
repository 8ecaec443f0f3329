//! Grid realization of transfer functions as causal FIR kernels.
//!
//! The frequency response is sampled at the `L`-th roots of unity and the
//! inverse DFT gives the periodic summation `sum_k h(t + kL)` of the true
//! impulse response. Indices `0..L/2` are read as non-negative time and the
//! upper half of the buffer as negative time, which must be numerically zero
//! for a causal transfer function. A second transform on the doubled grid
//! bounds the aliasing of the retained taps.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::f64::consts::PI;
use std::io::{BufRead, Write};

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::Serialize;

use crate::error::{domain, Error, Result};
use crate::xfer::{unit, TransferSpec};

/// Default grid size for kernel realization.
pub const DEFAULT_GRID: usize = 65_536;
/// Anti-causal residual allowed, relative to `max |taps|`.
pub const CAUSALITY_TOL: f64 = 1e-8;
/// Imaginary residual allowed, relative to `max |taps|`.
pub const REALNESS_TOL: f64 = 1e-9;
/// Tap movement allowed between grids `L` and `2L`, relative to `max |taps|`.
pub const ALIASING_TOL: f64 = 1e-9;
/// Smallest accepted grid.
pub const MIN_GRID: usize = 16;

/// Samples of a transfer function at `e^{i 2 pi j / L}`, `j = 0..L`.
#[derive(Debug, Clone)]
pub struct FrequencyResponse {
    spec: TransferSpec,
    samples: Vec<Complex64>,
}

impl FrequencyResponse {
    pub fn spec(&self) -> &TransferSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn grid(&self) -> usize {
        self.samples.len()
    }
}

/// Angle of grid point `j` on an `L`-point grid, folded into `[-pi, pi)`.
pub fn grid_angle(j: usize, grid: usize) -> f64 {
    if 2 * j < grid {
        2.0 * PI * j as f64 / grid as f64
    } else if 2 * j == grid {
        -PI
    } else {
        -2.0 * PI * (grid - j) as f64 / grid as f64
    }
}

fn check_grid(grid: usize) -> Result<()> {
    if grid < MIN_GRID || !grid.is_power_of_two() {
        return Err(domain("grid", grid as f64, "power of two >= 16"));
    }
    Ok(())
}

/// Evaluates `spec` on the `L`-point grid.
///
/// Points with `j > L/2` are the conjugates of points `L - j`, so the samples
/// are conjugate symmetric whenever the transfer function has a real kernel.
pub fn sample_response(spec: &TransferSpec, grid: usize) -> Result<FrequencyResponse> {
    check_grid(grid)?;
    let samples = (0..grid)
        .map(|j| {
            let z = if 2 * j == grid {
                Complex64::new(-1.0, 0.0)
            } else {
                unit(grid_angle(j, grid))
            };
            spec.eval(z)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(FrequencyResponse {
        spec: spec.clone(),
        samples,
    })
}

/// Discarded parts of the inverse transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Residuals {
    pub max_anticausal: f64,
    pub max_imag: f64,
}

/// A causal, finitely supported real impulse response.
#[derive(Debug, Clone, PartialEq)]
pub struct Kernel {
    taps: Vec<f64>,
    origin_spec: Option<TransferSpec>,
    grid: usize,
    residuals: Residuals,
}

impl Kernel {
    /// A kernel from explicit taps, with no transfer function of origin.
    pub fn from_taps(taps: Vec<f64>) -> Result<Self> {
        if taps.is_empty() {
            return Err(domain("support", 0.0, "support >= 1"));
        }
        if let Some(pos) = taps.iter().position(|t| !t.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self {
            taps,
            origin_spec: None,
            grid: 0,
            residuals: Residuals {
                max_anticausal: 0.0,
                max_imag: 0.0,
            },
        })
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn support(&self) -> usize {
        self.taps.len()
    }

    pub fn origin_spec(&self) -> Option<&TransferSpec> {
        self.origin_spec.as_ref()
    }

    /// Grid size the kernel was realized on; 0 for explicit taps.
    pub fn grid(&self) -> usize {
        self.grid
    }

    pub fn residuals(&self) -> Residuals {
        self.residuals
    }

    pub fn max_abs(&self) -> f64 {
        max_abs(&self.taps)
    }

    pub fn dc_gain(&self) -> f64 {
        self.taps.iter().sum()
    }

    /// CSV with header `t,h`, 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,h")?;
        for (t, h) in self.taps.iter().enumerate() {
            writeln!(out, "{t},{}", crate::fmt_f64(*h))?;
        }
        Ok(())
    }

    /// Reads a `t,h` CSV. Rows must start at `t = 0` and increase by one.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let rows = crate::read_pairs(input, "t", "h")?;
        let mut taps = Vec::with_capacity(rows.len());
        for (i, (t, h)) in rows.into_iter().enumerate() {
            if t != i as i64 {
                return Err(Error::Csv(format!("expected t = {i}, found {t}")));
            }
            taps.push(h);
        }
        Self::from_taps(taps)
    }
}

fn max_abs(values: &[f64]) -> f64 {
    values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn inverse_dft(response: &FrequencyResponse) -> Vec<Complex64> {
    let mut buffer = response.samples.clone();
    let grid = buffer.len();
    FftPlanner::new().plan_fft_inverse(grid).process(&mut buffer);
    let scale = 1.0 / grid as f64;
    buffer.iter_mut().for_each(|v| *v *= scale);
    buffer
}

struct RawKernel {
    taps: Vec<f64>,
    residuals: Residuals,
}

fn raw_kernel(spec: &TransferSpec, grid: usize, support: usize) -> Result<RawKernel> {
    if support == 0 || support > grid / 2 {
        return Err(domain("support", support as f64, "1 <= support <= grid/2"));
    }
    let buffer = inverse_dft(&sample_response(spec, grid)?);
    let taps = buffer[..support].iter().map(|v| v.re).collect();
    let max_anticausal = buffer[grid / 2..].iter().fold(0.0f64, |m, v| m.max(v.norm()));
    let max_imag = buffer.iter().fold(0.0f64, |m, v| m.max(v.im.abs()));
    Ok(RawKernel {
        taps,
        residuals: Residuals {
            max_anticausal,
            max_imag,
        },
    })
}

/// Realizes `spec` as a kernel of `support` taps on an `L`-point grid.
///
/// Fails with [`Error::CausalityViolation`] or [`Error::NotReal`] when the
/// certificates do not hold, and with [`Error::Aliasing`] when the taps move
/// by more than [`ALIASING_TOL`] relative when the grid is doubled.
pub fn impulse_from_spec(spec: &TransferSpec, grid: usize, support: usize) -> Result<Kernel> {
    let raw = raw_kernel(spec, grid, support)?;
    let scale = max_abs(&raw.taps);
    let causal_limit = CAUSALITY_TOL * scale;
    if !(raw.residuals.max_anticausal <= causal_limit) {
        return Err(Error::CausalityViolation {
            residual: raw.residuals.max_anticausal,
            threshold: causal_limit,
        });
    }
    let real_limit = REALNESS_TOL * scale;
    if !(raw.residuals.max_imag <= real_limit) {
        return Err(Error::NotReal {
            residual: raw.residuals.max_imag,
            threshold: real_limit,
        });
    }
    let fine = raw_kernel(spec, 2 * grid, support)?;
    let difference = max_difference(&raw.taps, &fine.taps);
    let alias_limit = ALIASING_TOL * scale;
    if !(difference <= alias_limit) {
        return Err(Error::Aliasing {
            grid,
            doubled: 2 * grid,
            difference,
            threshold: alias_limit,
        });
    }
    Ok(Kernel {
        taps: raw.taps,
        origin_spec: Some(spec.clone()),
        grid,
        residuals: raw.residuals,
    })
}

/// Largest tap difference over `0..support` between grids `L` and `2L`.
pub fn aliasing_check(spec: &TransferSpec, grid: usize, support: usize) -> Result<f64> {
    let coarse = raw_kernel(spec, grid, support)?;
    let fine = raw_kernel(spec, 2 * grid, support)?;
    Ok(max_difference(&coarse.taps, &fine.taps))
}

fn max_difference(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs()))
}

/// Keeps lags `0..=d`: the result has support `d + 1`.
pub fn truncate(kernel: &Kernel, d: usize) -> Result<Kernel> {
    if d >= kernel.support() {
        return Err(domain("d", d as f64, "d <= support - 1"));
    }
    Ok(Kernel {
        taps: kernel.taps[..=d].to_vec(),
        ..kernel.clone()
    })
}

/// Full linear convolution of two kernels (support `s1 + s2 - 1`).
pub fn compose(first: &Kernel, second: &Kernel) -> Kernel {
    let mut taps = vec![0.0; first.support() + second.support() - 1];
    for (i, a) in first.taps.iter().enumerate() {
        for (j, b) in second.taps.iter().enumerate() {
            taps[i + j] += a * b;
        }
    }
    let origin_spec = match (&first.origin_spec, &second.origin_spec) {
        (Some(f), Some(s)) => Some(TransferSpec::Product(vec![f.clone(), s.clone()])),
        _ => None,
    };
    Kernel {
        taps,
        origin_spec,
        grid: first.grid.max(second.grid),
        residuals: Residuals {
            max_anticausal: first.residuals.max_anticausal.max(second.residuals.max_anticausal),
            max_imag: first.residuals.max_imag.max(second.residuals.max_imag),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::xfer::{NearIdealParams, PredictorParams, ReferenceParams};

    fn near(a: f64, p: f64, n: u32, m: u32) -> TransferSpec {
        TransferSpec::NearIdeal(NearIdealParams::new(a, p, n, m).unwrap())
    }

    #[test]
    fn reference_samples_are_real_and_vanish_at_pi() {
        let spec = TransferSpec::Reference(ReferenceParams::new(0.02, 1.01).unwrap());
        for grid in [16, 256, 4096] {
            let resp = sample_response(&spec, grid).unwrap();
            assert!(resp.samples().iter().all(|s| s.im == 0.0));
            assert_eq!(resp.samples()[grid / 2], Complex64::new(0.0, 0.0));
        }
    }

    #[test]
    fn samples_symmetry_and_dc() {
        let spec = near(0.6, 0.7, 100, 2);
        let resp = sample_response(&spec, 4096).unwrap();
        let s = resp.samples();
        assert!((s[0].re - 1.258_002_586_356_855_9).abs() < 1e-13);
        assert!(s[2048].norm() < 1e-12);
        for j in 1..4096 {
            assert_eq!(s[4096 - j], s[j].conj());
        }
    }

    #[test]
    fn doubling_keeps_shared_points() {
        let spec = TransferSpec::product(vec![
            TransferSpec::Predictor(PredictorParams::new(1.1, 1.1).unwrap()),
            near(0.6, 0.7, 100, 2),
        ])
        .unwrap();
        let coarse = sample_response(&spec, 1024).unwrap();
        let fine = sample_response(&spec, 2048).unwrap();
        for j in 0..1024 {
            assert_eq!(coarse.samples()[j], fine.samples()[2 * j]);
        }
    }

    #[test]
    fn bad_grids_rejected() {
        let spec = near(0.6, 0.7, 100, 2);
        assert!(sample_response(&spec, 8).is_err());
        assert!(sample_response(&spec, 1000).is_err());
        assert!(impulse_from_spec(&spec, 1024, 513).is_err());
        assert!(impulse_from_spec(&spec, 1024, 0).is_err());
    }

    #[test]
    fn negative_taps_and_dc_consistency() {
        let spec = near(0.8, 0.6, 10, 1);
        let kernel = impulse_from_spec(&spec, DEFAULT_GRID, 200).unwrap();
        assert!(kernel.taps().iter().any(|&h| h < 0.0));
        let dc = spec.eval(Complex64::new(1.0, 0.0)).unwrap().re;
        assert!((kernel.dc_gain() - dc).abs() < 1e-6);
        let r = kernel.residuals();
        assert!(r.max_anticausal <= CAUSALITY_TOL * kernel.max_abs());
        assert!(r.max_imag <= REALNESS_TOL * kernel.max_abs());
    }

    #[test]
    fn reference_is_not_causal() {
        let spec = TransferSpec::Reference(ReferenceParams::new(0.02, 1.01).unwrap());
        let err = impulse_from_spec(&spec, 4096, 100).unwrap_err();
        assert!(matches!(err, Error::CausalityViolation { .. }), "{err:?}");
    }

    #[test]
    fn aliasing_diagnostic() {
        let spec = near(0.6, 0.7, 100, 2);
        let kernel = impulse_from_spec(&spec, DEFAULT_GRID, 300).unwrap();
        assert!(aliasing_check(&spec, DEFAULT_GRID, 300).unwrap() <= 1e-9 * kernel.max_abs());
        let long_memory = near(0.99, 0.6, 50, 2);
        let coarse = aliasing_check(&long_memory, 16, 8).unwrap();
        assert!(coarse > 1e-3, "{coarse}");
        let err = impulse_from_spec(&long_memory, 64, 32).unwrap_err();
        assert!(matches!(err, Error::Aliasing { .. } | Error::CausalityViolation { .. }));
        let single = TransferSpec::product(vec![spec.clone()]).unwrap();
        assert_eq!(
            impulse_from_spec(&single, 4096, 64).unwrap().taps(),
            impulse_from_spec(&spec, 4096, 64).unwrap().taps()
        );
    }

    #[test]
    fn truncate_edges() {
        let kernel = impulse_from_spec(&near(0.8, 0.6, 10, 1), 4096, 50).unwrap();
        assert_eq!(truncate(&kernel, 49).unwrap(), kernel);
        let one = truncate(&kernel, 0).unwrap();
        assert_eq!(one.taps(), &kernel.taps()[..1]);
        assert_eq!(one.residuals(), kernel.residuals());
        assert!(truncate(&kernel, 50).is_err());
    }

    #[test]
    fn compose_matches_direct_sum() {
        let a = Kernel::from_taps(vec![1.0, 2.0, -1.0]).unwrap();
        let b = Kernel::from_taps(vec![0.5, 0.25]).unwrap();
        assert_eq!(compose(&a, &b).taps(), &[0.5, 1.25, 0.0, -0.25]);
    }

    #[test]
    fn csv_round_trip() {
        let kernel = impulse_from_spec(&near(0.8, 0.6, 10, 1), 4096, 40).unwrap();
        let mut buf = Vec::new();
        kernel.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("t,h\n0,"));
        let back = Kernel::read_csv(&buf[..]).unwrap();
        assert_eq!(back.taps(), kernel.taps());
        assert!(Kernel::read_csv(&b"t,h\n1,0.5\n"[..]).is_err());
        assert!(Kernel::read_csv(&b"t,x\n0,0.5\n"[..]).is_err());
    }
}

#![allow(dead_code)]

use std::f64::consts::PI;

use nearideal::arsim::TrialRng;
use nearideal::{Kernel, Series, TransferSpec};
use num_complex::Complex64;

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson over `[a, b]`, started on `pieces` equal panels.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, pieces: usize, tol: f64) -> f64 {
    let width = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let (lo, hi) = (a + i as f64 * width, a + (i + 1) as f64 * width);
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            adaptive(f, lo, hi, fa, fm, fb, simpson(lo, hi, fa, fm, fb), tol / pieces as f64, 40)
        })
        .sum()
}

/// `h(t) = (1/2pi) * integral of Re(H(e^{iw}) e^{iwt})` over `[-pi, pi]`.
pub fn quadrature_tap(spec: &TransferSpec, t: i64) -> f64 {
    let f = |w: f64| {
        let z = Complex64::from_polar(1.0, w);
        let h = spec.eval(z).expect("evaluable on the circle");
        (h * Complex64::from_polar(1.0, w * t as f64)).re
    };
    integrate(&f, -PI, PI, 256, 1e-12) / (2.0 * PI)
}

/// Direct evaluation of `y(t) = sum_j h(j) x(t - j)` with missing samples as zero.
pub fn brute_force_convolve(kernel: &Kernel, x: &Series) -> Vec<f64> {
    x.times()
        .map(|t| {
            let mut acc = 0.0;
            for j in 0..kernel.support() {
                if t - (j as i64) < x.start_index() {
                    break;
                }
                acc += kernel.taps()[j] * x.get(t - j as i64).unwrap();
            }
            acc
        })
        .collect()
}

/// Random kernel and series for case `index`.
pub fn random_case(index: u64) -> (Kernel, Series) {
    let mut rng = TrialRng::new(2024, index);
    let support = 1 + (rng.uniform_open() * 60.0) as usize;
    let len = (rng.uniform_open() * 300.0) as usize;
    let taps = (0..support).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let xs = (0..len).map(|_| 2.0 * rng.standard_normal()).collect();
    let start = (rng.uniform_open() * 40.0) as i64 - 20;
    (Kernel::from_taps(taps).unwrap(), Series::new(xs, start).unwrap())
}

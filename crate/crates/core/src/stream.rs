//! Causal FIR filtering of real sequences, in batch and one sample at a time.
//!
//! Both paths compute `y(t) = sum_{j=0}^{support-1} h(j) x(t - j)` with
//! ascending `j` and zero pre-history, so they agree bit for bit.

use std::io::{BufRead, Write};

use crate::error::{Error, Result};
use crate::realization::Kernel;

/// A finite real sequence starting at time `start_index`.
#[derive(Debug, Clone, PartialEq)]
pub struct Series {
    values: Vec<f64>,
    start_index: i64,
}

impl Series {
    pub fn new(values: Vec<f64>, start_index: i64) -> Result<Self> {
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self {
            values,
            start_index,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn start_index(&self) -> i64 {
        self.start_index
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// One past the last time index.
    pub fn end_index(&self) -> i64 {
        self.start_index + self.values.len() as i64
    }

    pub fn get(&self, t: i64) -> Option<f64> {
        let offset = t.checked_sub(self.start_index)?;
        usize::try_from(offset).ok().and_then(|i| self.values.get(i).copied())
    }

    /// Value at `t`, or [`Error::MissingIndex`].
    pub fn at(&self, t: i64) -> Result<f64> {
        self.get(t).ok_or(Error::MissingIndex(t))
    }

    pub fn times(&self) -> impl Iterator<Item = i64> + '_ {
        self.start_index..self.end_index()
    }

    /// CSV with header `t,x`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "t,x")?;
        for (t, x) in self.times().zip(&self.values) {
            writeln!(out, "{t},{}", crate::fmt_f64(*x))?;
        }
        Ok(())
    }

    /// Reads a `t,x` CSV; `t` must increase by one from row to row.
    pub fn read_csv<R: BufRead>(input: R) -> Result<Self> {
        let rows = crate::read_pairs(input, "t", "x")?;
        let start = rows.first().map_or(0, |r| r.0);
        let mut values = Vec::with_capacity(rows.len());
        for (i, (t, x)) in rows.into_iter().enumerate() {
            if t != start + i as i64 {
                return Err(Error::Csv(format!("expected t = {}, found {t}", start + i as i64)));
            }
            values.push(x);
        }
        Self::new(values, start).map_err(|e| Error::Csv(e.to_string()))
    }
}

/// Filters `x` with `kernel`; output is aligned with the input.
pub fn convolve(kernel: &Kernel, x: &Series) -> Series {
    let taps = kernel.taps();
    let xs = x.values();
    let values = (0..xs.len())
        .map(|i| {
            let mut acc = 0.0;
            for (j, h) in taps.iter().enumerate().take(i + 1) {
                acc += h * xs[i - j];
            }
            acc
        })
        .collect();
    Series {
        values,
        start_index: x.start_index,
    }
}

/// Online form of [`convolve`] holding the last `support` inputs.
#[derive(Debug, Clone)]
pub struct StreamState {
    kernel: Kernel,
    ring: Vec<f64>,
    head: usize,
    pushed: u64,
}

impl StreamState {
    pub fn new(kernel: Kernel) -> Self {
        let support = kernel.support();
        Self {
            kernel,
            ring: vec![0.0; support],
            head: support - 1,
            pushed: 0,
        }
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }

    pub fn pushed(&self) -> u64 {
        self.pushed
    }

    /// Most recent inputs, newest first (at most `support` of them).
    pub fn history(&self) -> Vec<f64> {
        let support = self.ring.len();
        let held = (self.pushed as usize).min(support);
        (0..held).map(|j| self.ring[(self.head + support - j) % support]).collect()
    }

    /// Feeds one sample and returns the filter output at that time.
    pub fn push(&mut self, sample: f64) -> Result<f64> {
        if !sample.is_finite() {
            return Err(Error::NonFinite(self.pushed as usize));
        }
        let support = self.ring.len();
        self.head = (self.head + 1) % support;
        self.ring[self.head] = sample;
        self.pushed += 1;
        let mut acc = 0.0;
        for (j, h) in self.kernel.taps().iter().enumerate() {
            acc += h * self.ring[(self.head + support - j) % support];
        }
        Ok(acc)
    }

    pub fn reset(&mut self) {
        self.ring.iter_mut().for_each(|v| *v = 0.0);
        self.head = self.ring.len() - 1;
        self.pushed = 0;
    }
}


#[cfg(test)]
mod props {
    use super::*;
    use proptest::collection::vec;
    use proptest::prelude::*;

    proptest! {
        #[test]
        fn stream_equals_batch(taps in vec(-2.0f64..2.0, 1..40), xs in vec(-5.0f64..5.0, 0..120)) {
            let k = Kernel::from_taps(taps).unwrap();
            let batch = convolve(&k, &Series::new(xs.clone(), 0).unwrap());
            let mut state = StreamState::new(k);
            for (i, x) in xs.iter().enumerate() {
                prop_assert_eq!(state.push(*x).unwrap().to_bits(), batch.values()[i].to_bits());
            }
        }

        #[test]
        fn linear(taps in vec(-2.0f64..2.0, 1..30), pairs in vec((-5.0f64..5.0, -5.0f64..5.0), 1..80),
                  alpha in -3.0f64..3.0, beta in -3.0f64..3.0) {
            let k = Kernel::from_taps(taps).unwrap();
            let x: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let w: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let mix: Vec<f64> = pairs.iter().map(|p| alpha * p.0 + beta * p.1).collect();
            let yx = convolve(&k, &Series::new(x, 0).unwrap());
            let yw = convolve(&k, &Series::new(w, 0).unwrap());
            let ym = convolve(&k, &Series::new(mix, 0).unwrap());
            let scale: f64 = k.taps().iter().map(|h| h.abs()).sum::<f64>() * 5.0 * (alpha.abs() + beta.abs()) + 1e-300;
            for i in 0..ym.len() {
                let expected = alpha * yx.values()[i] + beta * yw.values()[i];
                prop_assert!((ym.values()[i] - expected).abs() <= 1e-12 * scale);
            }
        }

        #[test]
        fn time_invariant(taps in vec(-2.0f64..2.0, 1..20), xs in vec(-5.0f64..5.0, 1..60), shift in 0usize..30) {
            let k = Kernel::from_taps(taps).unwrap();
            let y = convolve(&k, &Series::new(xs.clone(), 0).unwrap());
            let mut padded = vec![0.0; shift];
            padded.extend_from_slice(&xs);
            let ys = convolve(&k, &Series::new(padded, 0).unwrap());
            prop_assert_eq!(&ys.values()[shift..], y.values());
        }
    }
}

//! Near-ideal causal smoothing filters and a one-step predictor for
//! discrete-time real sequences.
//!
//! * [`xfer`]: closed-form transfer functions on `|z| >= 1`.
//! * [`realization`]: grid inverse transforms into causal FIR kernels.
//! * [`stream`]: batch and streaming causal convolution.
//! * [`conditions`]: numerical checks of the filter family's defining
//!   conditions.
//! * [`arsim`]: AR(1)/AR(2) paths with per-trial reproducible randomness.
//! * [`bench`]: the Monte-Carlo forecasting benchmark.

pub mod arsim;
pub mod bench;
pub mod conditions;
pub mod error;
pub mod realization;
pub mod stream;
pub mod xfer;

pub use error::{Error, Result};
pub use realization::{impulse_from_spec, sample_response, truncate, FrequencyResponse, Kernel};
pub use stream::{convolve, Series, StreamState};
pub use xfer::{NearIdealParams, PredictorParams, ReferenceParams, TransferSpec};

/// Formats a float with 17 significant digits, enough to round-trip exactly.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Reads a two-column CSV with the given header into `(integer, float)` rows.
pub(crate) fn read_pairs<R: std::io::BufRead>(
    input: R,
    first: &str,
    second: &str,
) -> Result<Vec<(i64, f64)>> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let headers = reader.headers().map_err(|e| Error::Csv(e.to_string()))?;
    if headers.len() != 2 || &headers[0] != first || &headers[1] != second {
        return Err(Error::Csv(format!(
            "expected header `{first},{second}`, found `{}`",
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Error::Csv(e.to_string()))?;
        let bad = || Error::Csv(format!("row {}: cannot parse `{}`", line + 1, record.iter().collect::<Vec<_>>().join(",")));
        let t = record[0].parse::<i64>().map_err(|_| bad())?;
        let v = record[1].parse::<f64>().map_err(|_| bad())?;
        rows.push((t, v));
    }
    Ok(rows)
}

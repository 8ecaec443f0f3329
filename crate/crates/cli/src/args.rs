use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "nearideal", version, about = "Near-ideal causal smoothing filters and one-step prediction")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Frequency response on [-pi, pi) as `omega,re,im,gain,err1`.
    Freqresp {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = 4096)]
        grid: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Causal impulse response as `t,h`.
    Impulse {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = nearideal::realization::DEFAULT_GRID)]
        grid: usize,
        /// Number of taps to keep.
        #[arg(long, default_value_t = 256)]
        support: usize,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Filters a `t,x` series and writes `t,x,y`.
    Smooth {
        #[command(flatten)]
        filter: FilterArgs,
        #[arg(long, default_value_t = nearideal::realization::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = 256)]
        support: usize,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// One-step predictions of a `t,x` series as `t,x,yhat`.
    Predict {
        #[command(flatten)]
        predictor: PredictorArgs,
        #[command(flatten)]
        near: NearIdealArgs,
        /// Prefilter with the near-ideal filter given by --a --p --N --m.
        #[arg(long)]
        prefilter: bool,
        #[arg(long, value_enum, default_value_t = Window::D)]
        window: Window,
        /// Kernel window: lags 0..=d.
        #[arg(long, default_value_t = 100)]
        d: usize,
        #[arg(long, default_value_t = nearideal::realization::DEFAULT_GRID)]
        grid: usize,
        #[arg(long)]
        input: PathBuf,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Checks the filter conditions and writes a JSON report.
    Verify {
        #[command(flatten)]
        near: NearIdealArgs,
        /// Reference damping exponent; enables the domination check (c).
        #[arg(long, requires = "q")]
        mu: Option<f64>,
        #[arg(long, requires = "mu")]
        q: Option<f64>,
        #[arg(long, default_value_t = nearideal::conditions::DEFAULT_CHECK_GRID)]
        grid: usize,
        /// Neighbourhood size for the b2 check.
        #[arg(long, default_value_t = 0.1)]
        epsilon: f64,
        #[command(flatten)]
        band: BandArgs,
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Monte-Carlo forecasting benchmark; writes a JSON report.
    Bench {
        #[command(flatten)]
        predictor: PredictorArgs,
        #[command(flatten)]
        near: NearIdealArgs,
        #[arg(long, default_value_t = 10_000)]
        trials: usize,
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[arg(long, default_value_t = 100)]
        d: usize,
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        #[arg(long, value_enum, default_value_t = Model::Ar2)]
        model: Model,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, value_enum, default_value_t = Window::D)]
        window: Window,
        #[arg(long, default_value_t = nearideal::realization::DEFAULT_GRID)]
        grid: usize,
        #[arg(long, default_value_t = nearideal::arsim::DEFAULT_BURN_IN)]
        burn_in: usize,
        /// Worker threads, 0 for all cores.
        #[arg(long, default_value_t = 0)]
        workers: usize,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Debug, Args)]
pub struct OutArgs {
    /// Output file; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct NearIdealArgs {
    #[arg(long, default_value_t = 0.6)]
    pub a: f64,
    #[arg(long, default_value_t = 0.7)]
    pub p: f64,
    #[arg(long = "N", default_value_t = 100)]
    pub lag: u32,
    #[arg(long = "m", default_value_t = 2)]
    pub power: u32,
}

#[derive(Debug, Args)]
pub struct PredictorArgs {
    #[arg(long, default_value_t = 1.1)]
    pub gamma: f64,
    #[arg(long, default_value_t = 1.1)]
    pub r: f64,
}

/// Filter selection; several kinds multiply.
#[derive(Debug, Args)]
pub struct FilterArgs {
    #[arg(long)]
    pub near_ideal: bool,
    #[arg(long)]
    pub reference: bool,
    #[arg(long)]
    pub predictor: bool,
    #[command(flatten)]
    pub near: NearIdealArgs,
    #[arg(long, default_value_t = 0.02)]
    pub mu: f64,
    #[arg(long, default_value_t = 1.01)]
    pub q: f64,
    #[command(flatten)]
    pub pred: PredictorArgs,
}

#[derive(Debug, Args)]
pub struct BandArgs {
    /// Upper edge of the identity band for (c).
    #[arg(long)]
    pub band_omega: Option<f64>,
    #[arg(long)]
    pub omega0: Option<f64>,
    #[arg(long)]
    pub omega1: Option<f64>,
    #[arg(long)]
    pub band_epsilon: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Window {
    #[value(name = "d")]
    D,
    #[value(name = "2d")]
    TwoD,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Model {
    Ar1,
    Ar2,
}

use std::fs::File;
use std::io::{BufReader, Write};
use std::path::Path;

use nearideal::bench::{predictor_kernel, run_benchmark_with_workers, BenchConfig, CompositeWindow, ModelKind};
use nearideal::conditions::{run_suite, BandSpec, SuiteOptions};
use nearideal::realization::grid_angle;
use nearideal::{
    convolve, fmt_f64, impulse_from_spec, sample_response, NearIdealParams, PredictorParams, ReferenceParams, Series,
    TransferSpec,
};
use serde_json::json;

use crate::args::{BandArgs, Cli, Command, FilterArgs, Model, NearIdealArgs, OutArgs, PredictorArgs, Window};
use crate::Failure;

type Outcome = Result<(), Failure>;

pub fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Freqresp { filter, grid, out } => freqresp(&filter, grid, &out),
        Command::Impulse {
            filter,
            grid,
            support,
            out,
        } => {
            let kernel = impulse_from_spec(&filter_spec(&filter)?, grid, support)?;
            let mut buf = Vec::new();
            kernel.write_csv(&mut buf).map_err(write_failure)?;
            emit(&out, &buf)
        }
        Command::Smooth {
            filter,
            grid,
            support,
            input,
            out,
        } => {
            let kernel = impulse_from_spec(&filter_spec(&filter)?, grid, support)?;
            let x = read_series(&input)?;
            let y = convolve(&kernel, &x);
            let mut buf = b"t,x,y\n".to_vec();
            for ((t, xv), yv) in x.times().zip(x.values()).zip(y.values()) {
                writeln!(buf, "{t},{},{}", fmt_f64(*xv), fmt_f64(*yv)).map_err(write_failure)?;
            }
            emit(&out, &buf)
        }
        Command::Predict {
            predictor,
            near,
            prefilter,
            window,
            d,
            grid,
            input,
            out,
        } => {
            let prefilter = if prefilter { Some(near_params(&near)?) } else { None };
            let kernel = predictor_kernel(predictor_params(&predictor)?, prefilter, d, grid, composite(window))?;
            let x = read_series(&input)?;
            let y = convolve(&kernel, &x);
            let mut buf = b"t,x,yhat\n".to_vec();
            for (t, xv) in x.times().zip(x.values()) {
                // prediction of x(t) made at t - 1; zero before the first sample
                let yhat = y.get(t - 1).unwrap_or(0.0);
                writeln!(buf, "{t},{},{}", fmt_f64(*xv), fmt_f64(yhat)).map_err(write_failure)?;
            }
            emit(&out, &buf)
        }
        Command::Verify {
            near,
            mu,
            q,
            grid,
            epsilon,
            band,
            report,
        } => verify(&near, mu.zip(q), grid, epsilon, &band, report.as_deref()),
        Command::Bench {
            predictor,
            near,
            trials,
            n,
            d,
            sigma,
            model,
            seed,
            window,
            grid,
            burn_in,
            workers,
            out,
        } => {
            let config = BenchConfig {
                trials,
                n,
                d,
                sigma,
                model_kind: match model {
                    Model::Ar1 => ModelKind::Ar1,
                    Model::Ar2 => ModelKind::Ar2,
                },
                predictor: predictor_params(&predictor)?,
                prefilter: near_params(&near)?,
                grid_l: grid,
                master_seed: seed,
                composite_window: composite(window),
                burn_in,
            };
            config.validate()?;
            check_grid(grid)?;
            let report = run_benchmark_with_workers(&config, workers).map_err(|e| {
                let failure = Failure::from(e);
                if failure.code == Failure::USAGE {
                    failure
                } else {
                    Failure::new(Failure::TRIAL, failure.message)
                }
            })?;
            emit(&out, json_bytes(&report)?.as_slice())
        }
    }
}

fn freqresp(filter: &FilterArgs, grid: usize, out: &OutArgs) -> Outcome {
    let response = sample_response(&filter_spec(filter)?, grid)?;
    let samples = response.samples();
    let mut buf = b"omega,re,im,gain,err1\n".to_vec();
    for k in 0..grid {
        let j = (k + grid / 2) % grid;
        let h = samples[j];
        let row = [grid_angle(j, grid), h.re, h.im, h.norm(), (h - 1.0).norm()].map(fmt_f64);
        writeln!(buf, "{}", row.join(",")).map_err(write_failure)?;
    }
    emit(out, &buf)
}

fn verify(
    near: &NearIdealArgs,
    reference: Option<(f64, f64)>,
    grid: usize,
    epsilon: f64,
    band: &BandArgs,
    report: Option<&Path>,
) -> Outcome {
    let params = near_params(near)?;
    let mut options = SuiteOptions {
        grid,
        b2_epsilon: epsilon,
        ..SuiteOptions::default()
    };
    if grid < 2 {
        return Err(Failure::new(Failure::USAGE, "--grid must be at least 2"));
    }
    if !(epsilon > 0.0 && epsilon < std::f64::consts::PI) {
        return Err(Failure::new(Failure::USAGE, "--epsilon must lie in (0, pi)"));
    }
    if let Some((mu, q)) = reference {
        let defaults = BandSpec::default_band();
        let band = BandSpec::new(
            band.band_omega.unwrap_or(defaults.omega),
            band.omega0.unwrap_or(defaults.omega0),
            band.omega1.unwrap_or(defaults.omega1),
            band.band_epsilon.unwrap_or(defaults.epsilon),
            defaults.grid_points,
        )?;
        options.domination = Some((ReferenceParams::new(mu, q)?, band));
    }
    let reports = run_suite(&params, &options)?;
    let pass = reports.iter().all(|r| r.pass);
    let doc = json!({ "params": params, "pass": pass, "reports": reports });
    let bytes = json_bytes(&doc)?;
    match report {
        Some(path) => write_file(path, &bytes)?,
        None => write_stdout(&bytes)?,
    }
    if pass {
        Ok(())
    } else {
        let failed: Vec<String> = reports.iter().filter(|r| !r.pass).map(|r| r.condition_id.to_string()).collect();
        Err(Failure::new(Failure::CHECK, format!("conditions failed: {}", failed.join(", "))))
    }
}

fn filter_spec(filter: &FilterArgs) -> Result<TransferSpec, Failure> {
    let mut factors = Vec::new();
    if filter.predictor {
        factors.push(TransferSpec::Predictor(predictor_params(&filter.pred)?));
    }
    if filter.near_ideal {
        factors.push(TransferSpec::NearIdeal(near_params(&filter.near)?));
    }
    if filter.reference {
        factors.push(TransferSpec::Reference(ReferenceParams::new(filter.mu, filter.q)?));
    }
    match factors.len() {
        0 => Err(Failure::new(
            Failure::USAGE,
            "select a filter with --near-ideal, --reference or --predictor",
        )),
        1 => Ok(factors.remove(0)),
        _ => Ok(TransferSpec::product(factors)?),
    }
}

fn near_params(args: &NearIdealArgs) -> Result<NearIdealParams, Failure> {
    Ok(NearIdealParams::new(args.a, args.p, args.lag, args.power)?)
}

fn predictor_params(args: &PredictorArgs) -> Result<PredictorParams, Failure> {
    Ok(PredictorParams::new(args.gamma, args.r)?)
}

fn composite(window: Window) -> CompositeWindow {
    match window {
        Window::D => CompositeWindow::DWindow,
        Window::TwoD => CompositeWindow::TwoDWindow,
    }
}

fn check_grid(grid: usize) -> Outcome {
    if grid < 16 || !grid.is_power_of_two() {
        return Err(Failure::new(Failure::USAGE, "--grid must be a power of two, at least 16"));
    }
    Ok(())
}

fn read_series(path: &Path) -> Result<Series, Failure> {
    let file = File::open(path).map_err(|e| Failure::new(Failure::USAGE, format!("{}: {e}", path.display())))?;
    Ok(Series::read_csv(BufReader::new(file))?)
}

fn json_bytes<T: serde::Serialize>(value: &T) -> Result<Vec<u8>, Failure> {
    let mut bytes = serde_json::to_vec_pretty(value).map_err(|e| Failure::new(Failure::TRIAL, e.to_string()))?;
    bytes.push(b'\n');
    Ok(bytes)
}

fn write_failure(err: std::io::Error) -> Failure {
    Failure::new(Failure::WRITE, err.to_string())
}

fn write_file(path: &Path, bytes: &[u8]) -> Outcome {
    std::fs::write(path, bytes).map_err(|e| Failure::new(Failure::WRITE, format!("{}: {e}", path.display())))
}

fn write_stdout(bytes: &[u8]) -> Outcome {
    let mut stdout = std::io::stdout().lock();
    stdout.write_all(bytes).and_then(|_| stdout.flush()).map_err(write_failure)
}

fn emit(out: &OutArgs, bytes: &[u8]) -> Outcome {
    match &out.out {
        Some(path) => write_file(path, bytes),
        None => write_stdout(bytes),
    }
}

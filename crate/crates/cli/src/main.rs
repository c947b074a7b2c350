use std::f64::consts::PI;
use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;
use stokes_spectra::bf_asymptotics;
use stokes_spectra::ffh;
use stokes_spectra::flatspec::{find_collisions_with, CollisionSearch};
use stokes_spectra::harness::{self, CollisionSelector};
use stokes_spectra::hf_asymptotics::isola_for;
use stokes_spectra::qnewton;
use stokes_spectra::{DispersionModel, Error, Execution, Family};

#[derive(Debug, Parser)]
#[command(name = "stokes-spectra", version, about = "Spectral stability of small-amplitude Stokes waves")]
struct Cli {
    /// Dispersion model, e.g. `kawahara:a=1,b=-0.25`, `whitham:h=2,sigma=3`,
    /// `akersmilewski:sigma=1`.
    #[arg(long, global = true, default_value = "kawahara:a=1,b=-0.25")]
    model: String,

    /// Wave amplitude.
    #[arg(long, global = true, default_value_t = 1e-3)]
    epsilon: f64,

    /// Fourier truncation of the spectral problem (modes -N..=N). Chosen
    /// from the wave when omitted.
    #[arg(long, global = true)]
    n_modes: Option<usize>,

    /// Output directory. Tables go to standard output when omitted, except
    /// for `run`, which defaults to `runs/<name>`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Worker threads; 1 runs everything on the calling thread.
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Collisions of flat-state eigenvalues of a given order.
    Collisions {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long, default_value_t = -20, allow_hyphen_values = true)]
        k_min: i64,
        #[arg(long, default_value_t = 20)]
        k_max: i64,
        #[arg(long, default_value_t = 10_000)]
        grid: usize,
    },
    /// Asymptotic isola of the collision nearest a Floquet exponent.
    Isola {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        p0: f64,
        #[arg(long, default_value_t = 64)]
        n_theta: usize,
    },
    /// Modulational (Benjamin-Feir) constants and lemniscate.
    Bf {
        #[arg(long, default_value_t = 128)]
        n_theta: usize,
    },
    /// Numerical spectrum on a uniform grid of Floquet exponents.
    Spectrum {
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        p_min: f64,
        #[arg(long, default_value_t = 1.0)]
        p_max: f64,
        #[arg(long, default_value_t = 100)]
        n_p: usize,
        /// Keep only eigenvalues with real part above the instability threshold.
        #[arg(long)]
        unstable_only: bool,
    },
    /// Quasi-Newton eigenpairs continued along an isola.
    Trace {
        #[arg(long, default_value_t = 1)]
        m: u32,
        #[arg(long)]
        p0: f64,
        #[arg(long, default_value_t = 16)]
        n_theta: usize,
        /// Amplitudes to continue through (comma separated); defaults to `--epsilon`.
        #[arg(long, value_delimiter = ',')]
        epsilons: Vec<f64>,
    },
    /// Runs a registered experiment and writes its bundle.
    Run {
        /// One of fig1-left, fig1-right, fig2, ..., fig7, compare-growth.
        name: String,
    },
    /// Compares triad, quartet and modulational growth rates.
    CompareGrowth,
}

#[derive(Debug, Serialize)]
struct CollisionRow {
    family: Family,
    params: String,
    m: u32,
    k1: i64,
    k2: i64,
    p0: f64,
    lambda0_im: f64,
    krein_negative: bool,
    cg1: f64,
    cg2: f64,
}

#[derive(Debug, Serialize)]
struct IsolaRow {
    theta: f64,
    p: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct BfRow {
    theta: f64,
    branch: i8,
    re: f64,
    im: f64,
    p: f64,
}

#[derive(Debug, Serialize)]
struct SpectrumRow {
    p: f64,
    re: f64,
    im: f64,
}

#[derive(Debug, Serialize)]
struct TraceRow {
    epsilon: f64,
    theta: f64,
    p: f64,
    re: f64,
    im: f64,
    residual: f64,
    iters: usize,
}

/// Where a table ends up: standard output or `<out>/<name>.<ext>`.
struct Sink {
    out: Option<PathBuf>,
    format: Format,
}

impl Sink {
    fn writer(&self, name: &str) -> Result<Box<dyn Write>, Error> {
        match &self.out {
            Some(dir) => {
                fs::create_dir_all(dir)?;
                let ext = match self.format {
                    Format::Csv => "csv",
                    Format::Json => "json",
                };
                Ok(Box::new(fs::File::create(dir.join(format!("{name}.{ext}")))?))
            }
            None => Ok(Box::new(io::stdout().lock())),
        }
    }

    /// Writes `rows` as a table; JSON output wraps them with `meta`.
    fn emit<T: Serialize>(&self, name: &str, rows: &[T], meta: serde_json::Value) -> Result<(), Error> {
        let mut writer = self.writer(name)?;
        match self.format {
            Format::Csv => {
                let mut csv = csv::Writer::from_writer(&mut writer);
                for row in rows {
                    csv.serialize(row)?;
                }
                csv.flush()?;
                if !meta.is_null() {
                    match &self.out {
                        Some(dir) => write_json(&dir.join(format!("{name}_meta.json")), &meta)?,
                        None => eprintln!("{meta}"),
                    }
                }
            }
            Format::Json => {
                let body = json!({ "meta": meta, "rows": rows });
                writeln!(writer, "{}", serde_json::to_string_pretty(&body)?)?;
            }
        }
        Ok(())
    }
}

fn write_json(path: &Path, value: &serde_json::Value) -> Result<(), Error> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

fn thetas(n: usize) -> Vec<f64> {
    (0..n).map(|j| 2.0 * PI * j as f64 / n as f64).collect()
}

fn execute(cli: &Cli, exec: Execution) -> Result<(), Error> {
    let model: DispersionModel = cli.model.parse()?;
    let sink = Sink {
        out: cli.out.clone(),
        format: cli.format,
    };
    match &cli.command {
        Command::Collisions { m, k_min, k_max, grid } => {
            let search = CollisionSearch {
                k_min: *k_min,
                k_max: *k_max,
                grid: *grid,
            };
            let rows: Vec<CollisionRow> = find_collisions_with(exec, &model, *m, &search)?
                .iter()
                .map(|c| CollisionRow {
                    family: model.family(),
                    params: model.params_label(),
                    m: c.m,
                    k1: c.k1,
                    k2: c.k2,
                    p0: c.p0,
                    lambda0_im: c.lambda0.im,
                    krein_negative: c.krein_negative,
                    cg1: c.cg1,
                    cg2: c.cg2,
                })
                .collect();
            sink.emit("collisions", &rows, json!({ "model": model.to_string(), "m": m }))
        }
        Command::Isola { m, p0, n_theta } => {
            let collision = harness::select_collision(exec, &model, &CollisionSelector { m: *m, p0: *p0 })?;
            let isola = isola_for(&model, &collision)?;
            let rows: Vec<IsolaRow> = thetas(*n_theta)
                .into_iter()
                .map(|theta| {
                    let pt = isola.point(cli.epsilon, theta);
                    IsolaRow {
                        theta,
                        p: pt.p,
                        re: pt.lambda.re,
                        im: pt.lambda.im,
                    }
                })
                .collect();
            let meta = json!({
                "model": model.to_string(),
                "epsilon": cli.epsilon,
                "isola": isola,
                "max_growth": isola.max_growth(cli.epsilon),
            });
            sink.emit("isola", &rows, meta)
        }
        Command::Bf { n_theta } => {
            let lm = bf_asymptotics::bf_constants(&model)?;
            let constants = json!({ "U": lm.u, "V": lm.v, "delta_bf": lm.delta_bf, "cg1": lm.cg1, "r1": lm.r1 });
            let rows: Vec<BfRow> = if lm.unstable {
                bf_asymptotics::lemniscate_curve(&lm, cli.epsilon, *n_theta)?
                    .into_iter()
                    .map(|pt| BfRow {
                        theta: pt.theta,
                        branch: pt.branch,
                        re: pt.lambda.re,
                        im: pt.lambda.im,
                        p: pt.p,
                    })
                    .collect()
            } else {
                log::warn!("delta_bf = {} <= 0: no modulational instability", lm.delta_bf);
                Vec::new()
            };
            sink.emit("bf", &rows, constants)
        }
        Command::Spectrum {
            p_min,
            p_max,
            n_p,
            unstable_only,
        } => {
            if *n_p == 0 || !(p_max >= p_min) {
                return Err(Error::Config("need n_p > 0 and p_max >= p_min".into()));
            }
            let wave = ffh::wave_for(&model, cli.epsilon)?;
            let n_modes = cli.n_modes.unwrap_or_else(|| ffh::suggested_modes(&wave, 1));
            let p_list: Vec<f64> = (0..*n_p)
                .map(|j| {
                    if *n_p == 1 {
                        *p_min
                    } else {
                        p_min + (p_max - p_min) * j as f64 / (*n_p - 1) as f64
                    }
                })
                .collect();
            let slices = ffh::sweep_with(exec, &wave, &p_list, n_modes)?;
            let rows: Vec<SpectrumRow> = if *unstable_only {
                ffh::unstable_points_with(exec, &wave, &slices, ffh::TOL_UNSTABLE, true)?
                    .into_iter()
                    .map(|pt| SpectrumRow {
                        p: pt.p,
                        re: pt.lambda.re,
                        im: pt.lambda.im,
                    })
                    .collect()
            } else {
                slices
                    .iter()
                    .flat_map(|s| s.eigenvalues.iter().map(|l| SpectrumRow { p: s.p, re: l.re, im: l.im }))
                    .collect()
            };
            let meta = json!({ "model": model.to_string(), "epsilon": cli.epsilon, "n_modes": n_modes });
            sink.emit("spectrum", &rows, meta)
        }
        Command::Trace { m, p0, n_theta, epsilons } => {
            let collision = harness::select_collision(exec, &model, &CollisionSelector { m: *m, p0: *p0 })?;
            let isola = isola_for(&model, &collision)?;
            let epsilons = if epsilons.is_empty() { vec![cli.epsilon] } else { epsilons.clone() };
            let n_modes = match cli.n_modes {
                Some(n) => n,
                None => qnewton::default_modes(&model, &isola, *epsilons.last().expect("non-empty"))?,
            };
            let thetas = thetas(*n_theta);
            let per_theta = stokes_spectra::exec::try_map(exec, &thetas, |&theta| {
                qnewton::continue_in_epsilon(&model, &isola, theta, &epsilons, Some(n_modes))
                    .map(|pairs| (theta, pairs))
            })?;
            let rows: Vec<TraceRow> = per_theta
                .into_iter()
                .flat_map(|(theta, pairs)| {
                    pairs.into_iter().map(move |pair| TraceRow {
                        epsilon: pair.epsilon,
                        theta,
                        p: pair.p,
                        re: pair.lambda.re,
                        im: pair.lambda.im,
                        residual: pair.residual,
                        iters: pair.iterations,
                    })
                })
                .collect();
            let meta = json!({ "model": model.to_string(), "n_modes": n_modes, "isola": isola });
            sink.emit("trace", &rows, meta)
        }
        Command::Run { name } => {
            let out = cli.out.clone().unwrap_or_else(|| PathBuf::from("runs").join(name));
            let config = harness::preset(name, out)?;
            let output = harness::run_with(exec, &config)?;
            println!("{}", output.dir.display());
            Ok(())
        }
        Command::CompareGrowth => {
            let report = bf_asymptotics::compare_growth_with(exec, &model, &CollisionSearch::default())?;
            let meta = json!({
                "model": model.to_string(),
                "verdict": report.verdict,
                "triad_present": report.triad_present,
                "max_triad_growth": report.max_triad_growth,
                "max_quartet_growth": report.max_quartet_growth,
                "bf_unstable": report.bf_unstable,
                "bf_growth": report.bf_growth,
                "bf_growth_u_delta": report.bf_growth_u_delta,
            });
            sink.emit("compare_growth", &report.quartets, meta)
        }
    }
}

fn execution(jobs: Option<usize>) -> Result<Execution, Error> {
    match jobs {
        Some(0) => Err(Error::Config("--jobs must be at least 1".into())),
        Some(1) => Ok(Execution::Sequential),
        #[cfg(feature = "parallel")]
        Some(n) => {
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| Error::Config(format!("cannot start {n} workers: {e}")))?;
            Ok(Execution::Parallel)
        }
        #[cfg(not(feature = "parallel"))]
        Some(_) => {
            log::warn!("built without parallel support; running sequentially");
            Ok(Execution::Sequential)
        }
        None => Ok(Execution::default()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = execution(cli.jobs).and_then(|exec| execute(&cli, exec));
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(if err.is_config() { 2 } else { 3 })
        }
    }
}

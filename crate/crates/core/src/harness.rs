//! Named experiments producing run bundles.
//!
//! Every run writes into its own directory:
//!
//! * `config.json`: the configuration that was run,
//! * one or more `*.csv` data files,
//! * `summary.json`: the key metrics of the run.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bf_asymptotics::{self, GrowthVerdict};
use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::flatspec::{find_collisions_with, Collision, CollisionSearch};
use crate::hf_asymptotics::{isola_for, IsolaModel};
use crate::qnewton;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Pipeline {
    /// Asymptotic isola against quasi-Newton eigenpairs, with error scaling.
    Isola,
    /// Asymptotic spectrum sampled over phase and amplitude.
    Sheet,
    /// Lemniscates against numerical figure-eights.
    Bf,
    /// Figure-eight of the discontinuous symbol and its amplitude scalings.
    AmBf,
    /// Growth-rate comparison between instability families.
    CompareGrowth,
}

/// Picks the collision of order `m` whose Floquet exponent is nearest `p0`,
/// preferring collisions of opposite Krein signature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionSelector {
    pub m: u32,
    pub p0: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub name: String,
    pub pipeline: Pipeline,
    pub models: Vec<String>,
    /// One selector per model, or a single selector shared by all models.
    #[serde(default)]
    pub selectors: Vec<CollisionSelector>,
    /// Amplitude of isola and curve samples.
    pub epsilon: f64,
    /// Amplitudes of scaling studies and sheets.
    #[serde(default)]
    pub epsilons: Vec<f64>,
    pub n_theta: usize,
    #[serde(default)]
    pub n_modes: Option<usize>,
    pub out_dir: PathBuf,
}

/// Names accepted by [`preset`].
pub const REGISTRY: [&str; 9] = [
    "fig1-left",
    "fig1-right",
    "fig2",
    "fig3",
    "fig4",
    "fig5",
    "fig6",
    "fig7",
    "compare-growth",
];

const SCALING_EPSILONS: [f64; 5] = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];
const AM_EPSILONS: [f64; 3] = [4e-3, 1e-2, 2e-2];
/// Floquet samples per side of the origin in figure-eight windows.
const BF_WINDOW_SAMPLES: usize = 60;
/// Window half-width in units of the predicted band half-width.
const BF_WINDOW_MARGIN: f64 = 1.2;
/// Phases of the dense lemniscate used for distance measurements.
const DENSE_THETA: usize = 4096;

fn sheet_epsilons() -> Vec<f64> {
    (0..=20).map(|j| 1e-2 * j as f64 / 20.0).collect()
}

/// Configuration of a registered experiment writing into `out_dir`.
pub fn preset(name: &str, out_dir: impl Into<PathBuf>) -> Result<ExperimentConfig> {
    let out_dir = out_dir.into();
    let isola = |model: &str, m: u32, p0: f64, epsilon: f64, epsilons: &[f64]| ExperimentConfig {
        name: name.to_string(),
        pipeline: Pipeline::Isola,
        models: vec![model.to_string()],
        selectors: vec![CollisionSelector { m, p0 }],
        epsilon,
        epsilons: epsilons.to_vec(),
        n_theta: 64,
        n_modes: None,
        out_dir: out_dir.clone(),
    };
    let sheet = |model: &str, m: u32, p0: f64| ExperimentConfig {
        name: name.to_string(),
        pipeline: Pipeline::Sheet,
        models: vec![model.to_string()],
        selectors: vec![CollisionSelector { m, p0 }],
        epsilon: 1e-2,
        epsilons: sheet_epsilons(),
        n_theta: 64,
        n_modes: None,
        out_dir: out_dir.clone(),
    };
    let config = match name {
        "fig1-left" => isola("whitham:h=inf,sigma=2.5", 1, 0.2681, 1e-3, &[]),
        "fig1-right" => isola("akersmilewski:sigma=2", 1, 0.1464, 1e-3, &[]),
        "fig2" => sheet("whitham:h=inf,sigma=2.5", 1, 0.2681),
        "fig3" => ExperimentConfig {
            models: vec!["kawahara:a=1,b=-0.25".into(), "whitham:h=inf,sigma=0.25".into()],
            selectors: vec![
                CollisionSelector { m: 2, p0: 0.3675 },
                CollisionSelector { m: 2, p0: 0.1363 },
            ],
            ..sheet("", 2, 0.0)
        },
        "fig4" => isola("kawahara:a=1,b=-0.25", 2, 0.3675, 1e-3, &SCALING_EPSILONS),
        "fig5" => isola("whitham:h=inf,sigma=0.25", 2, 0.1363, 1e-4, &SCALING_EPSILONS),
        "fig6" => ExperimentConfig {
            name: name.to_string(),
            pipeline: Pipeline::Bf,
            models: vec!["kawahara:a=-3,b=1".into(), "whitham:h=2".into(), "whitham:h=2,sigma=3".into()],
            selectors: Vec::new(),
            epsilon: 1e-2,
            epsilons: Vec::new(),
            n_theta: 256,
            n_modes: None,
            out_dir,
        },
        "fig7" => ExperimentConfig {
            name: name.to_string(),
            pipeline: Pipeline::AmBf,
            models: vec!["akersmilewski:sigma=1".into()],
            selectors: Vec::new(),
            epsilon: 1e-2,
            epsilons: AM_EPSILONS.to_vec(),
            n_theta: 256,
            n_modes: None,
            out_dir,
        },
        "compare-growth" => ExperimentConfig {
            name: name.to_string(),
            pipeline: Pipeline::CompareGrowth,
            models: vec![
                "whitham:h=inf,sigma=0.25".into(),
                "whitham:h=inf,sigma=2.5".into(),
                "kawahara:a=1,b=-0.25".into(),
                "kawahara:a=-3,b=1".into(),
                "whitham:h=2".into(),
                "whitham:h=2,sigma=3".into(),
            ],
            selectors: Vec::new(),
            epsilon: 1e-3,
            epsilons: Vec::new(),
            n_theta: 0,
            n_modes: None,
            out_dir,
        },
        other => {
            return Err(Error::Config(format!(
                "unknown experiment {other:?}; known: {}",
                REGISTRY.join(", ")
            )))
        }
    };
    Ok(config)
}

/// Least-squares line through `(log epsilon, log error)`. Returns
/// `(slope, prefactor)` with `error ~ prefactor epsilon^slope`.
pub fn fit_power_law(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 4 {
        return Err(Error::InvalidData(format!("power-law fit needs at least 4 points, got {}", pairs.len())));
    }
    log_log_fit(pairs)
}

/// [`fit_power_law`] without the minimum sample size, for short amplitude
/// ladders.
pub fn log_log_fit(pairs: &[(f64, f64)]) -> Result<(f64, f64)> {
    if pairs.len() < 2 {
        return Err(Error::InvalidData("power-law fit needs at least 2 points".into()));
    }
    if let Some(&(x, y)) = pairs.iter().find(|(x, y)| !(*x > 0.0 && *y > 0.0)) {
        return Err(Error::InvalidData(format!("non-positive sample ({x}, {y}) in power-law fit")));
    }
    let n = pairs.len() as f64;
    let (sx, sy) = pairs.iter().fold((0.0, 0.0), |(sx, sy), (x, y)| (sx + x.ln(), sy + y.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = pairs.iter().fold((0.0, 0.0), |(sxx, sxy), (x, y)| {
        let dx = x.ln() - mx;
        (sxx + dx * dx, sxy + dx * (y.ln() - my))
    });
    if sxx == 0.0 {
        return Err(Error::InvalidData("power-law fit needs distinct abscissae".into()));
    }
    let slope = sxy / sxx;
    Ok((slope, (my - slope * mx).exp()))
}

/// Symmetric Hausdorff distance between two point sets of the complex plane.
pub fn hausdorff(a: &[Complex64], b: &[Complex64]) -> f64 {
    let directed = |from: &[Complex64], to: &[Complex64]| {
        from.iter()
            .map(|x| to.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    directed(a, b).max(directed(b, a))
}

fn segment_distance(x: Complex64, a: Complex64, b: Complex64) -> f64 {
    let ab = b - a;
    let len2 = ab.norm_sqr();
    if len2 == 0.0 {
        return (x - a).norm();
    }
    let t = (((x - a) * ab.conj()).re / len2).clamp(0.0, 1.0);
    (x - (a + ab * t)).norm()
}

/// Hausdorff distance between the closed polygons through `a` and through
/// `b` (vertices in order). Edges are subdivided `refine` times when measuring
/// the distance from one polygon to the other.
pub fn polygon_hausdorff(a: &[Complex64], b: &[Complex64], refine: usize) -> f64 {
    let directed = |from: &[Complex64], to: &[Complex64]| -> f64 {
        let n = from.len();
        let m = to.len();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            let (start, end) = (from[i], from[(i + 1) % n]);
            for j in 0..refine.max(1) {
                let x = start + (end - start) * (j as f64 / refine.max(1) as f64);
                let d = (0..m)
                    .map(|k| segment_distance(x, to[k], to[(k + 1) % m]))
                    .fold(f64::INFINITY, f64::min);
                worst = worst.max(d);
            }
        }
        worst
    };
    if a.is_empty() || b.is_empty() {
        return f64::INFINITY;
    }
    directed(a, b).max(directed(b, a))
}

/// Largest distance from a point of `points` to the nearest point of `curve`.
pub fn max_distance_to(points: &[Complex64], curve: &[Complex64]) -> f64 {
    points
        .iter()
        .map(|x| curve.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

pub fn theta_grid(n_theta: usize) -> Vec<f64> {
    (0..n_theta).map(|j| 2.0 * PI * j as f64 / n_theta as f64).collect()
}

/// Resolves a selector against the collisions of `model`.
pub fn select_collision(exec: Execution, model: &DispersionModel, selector: &CollisionSelector) -> Result<Collision> {
    const MATCH_TOL: f64 = 1e-3;
    let collisions = find_collisions_with(exec, model, selector.m, &CollisionSearch::default())?;
    let nearest = |krein_only: bool| {
        collisions
            .iter()
            .filter(|c| !krein_only || c.krein_negative)
            .min_by(|a, b| (a.p0 - selector.p0).abs().total_cmp(&(b.p0 - selector.p0).abs()))
            .filter(|c| (c.p0 - selector.p0).abs() <= MATCH_TOL)
            .copied()
    };
    nearest(true).or_else(|| nearest(false)).ok_or_else(|| {
        Error::Config(format!(
            "no collision of order {} near p0 = {} for {model}",
            selector.m, selector.p0
        ))
    })
}

fn parse_models(config: &ExperimentConfig) -> Result<Vec<DispersionModel>> {
    if config.models.is_empty() {
        return Err(Error::Config("experiment lists no models".into()));
    }
    config.models.iter().map(|s| s.parse()).collect()
}

fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut writer = csv::Writer::from_path(path)?;
    for row in rows {
        writer.serialize(row)?;
    }
    writer.flush()?;
    Ok(())
}

fn write_json(path: &Path, value: &impl Serialize) -> Result<()> {
    fs::write(path, serde_json::to_string_pretty(value)? + "\n")?;
    Ok(())
}

/// Result of a run: the directory written and its summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub dir: PathBuf,
    pub summary: Value,
}

/// Runs an experiment and writes its bundle into `config.out_dir`.
pub fn run(config: &ExperimentConfig) -> Result<RunOutput> {
    run_with(Execution::default(), config)
}

pub fn run_with(exec: Execution, config: &ExperimentConfig) -> Result<RunOutput> {
    let context = format!("experiment {}", config.name);
    let models = parse_models(config).map_err(|e| e.context(context.clone()))?;
    if config.n_theta == 0 && config.pipeline != Pipeline::CompareGrowth {
        return Err(Error::Config("n_theta must be positive".into()).context(context));
    }
    let dir = config.out_dir.clone();
    fs::create_dir_all(&dir).map_err(|e| Error::from(e).context(context.clone()))?;
    write_json(&dir.join("config.json"), config)?;
    let summary = match config.pipeline {
        Pipeline::Isola => run_isola(exec, config, &models[0], &dir),
        Pipeline::Sheet => run_sheet(exec, config, &models, &dir),
        Pipeline::Bf => run_bf(exec, config, &models, &dir),
        Pipeline::AmBf => run_am_bf(exec, config, &models[0], &dir),
        Pipeline::CompareGrowth => run_compare_growth(exec, &models, &dir),
    }
    .map_err(|e| e.context(context))?;
    let summary = json!({ "name": config.name, "pipeline": config.pipeline, "results": summary });
    write_json(&dir.join("summary.json"), &summary)?;
    Ok(RunOutput { dir, summary })
}

fn collision_json(c: &Collision) -> Value {
    json!({
        "k1": c.k1, "k2": c.k2, "m": c.m, "p0": c.p0,
        "lambda0_im": c.lambda0.im, "krein_negative": c.krein_negative,
    })
}

fn isola_json(iso: &IsolaModel) -> Value {
    json!({
        "kind": iso.kind, "order": iso.order, "rho": iso.rho,
        "re_amp": iso.re_amp, "im_amp": iso.im_amp, "center_shift": iso.center_shift,
        "p_amp": iso.p_amp, "p_shift": iso.p_shift,
    })
}

#[derive(Serialize)]
struct IsolaRow {
    source: &'static str,
    epsilon: f64,
    theta: f64,
    p: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct ScalingRow {
    epsilon: f64,
    theta: f64,
    p: f64,
    asymptotic_re: f64,
    asymptotic_im: f64,
    numeric_re: f64,
    numeric_im: f64,
    error: f64,
}

/// Asymptotic isola and quasi-Newton eigenvalues on the same phase grid.
pub struct IsolaComparison {
    pub isola: IsolaModel,
    pub thetas: Vec<f64>,
    pub asymptotic: Vec<Complex64>,
    pub numeric: Vec<qnewton::EigenPair>,
}

impl IsolaComparison {
    fn numeric_lambdas(&self) -> Vec<Complex64> {
        self.numeric.iter().map(|pair| pair.lambda).collect()
    }

    /// Hausdorff distance between the two point sets.
    pub fn hausdorff(&self) -> f64 {
        hausdorff(&self.asymptotic, &self.numeric_lambdas())
    }

    /// Hausdorff distance between the closed curves through the two point
    /// sets, ordered by phase. Insensitive to the sampling density along the
    /// isola.
    pub fn curve_hausdorff(&self) -> f64 {
        polygon_hausdorff(&self.asymptotic, &self.unstable_numeric(), 8)
    }

    /// Quasi-Newton eigenvalues that lie on the numerical isola. Near the
    /// isola edges the asymptotic Floquet exponent can fall just outside the
    /// unstable band, where the continued eigenvalue is neutral.
    pub fn unstable_numeric(&self) -> Vec<Complex64> {
        self.numeric
            .iter()
            .map(|pair| pair.lambda)
            .filter(|l| l.re.abs() > crate::ffh::TOL_UNSTABLE)
            .collect()
    }

    pub fn max_numeric_growth(&self) -> f64 {
        self.numeric.iter().map(|pair| pair.lambda.re).fold(f64::NEG_INFINITY, f64::max)
    }
}

pub fn compare_isola(
    exec: Execution,
    model: &DispersionModel,
    isola: &IsolaModel,
    epsilon: f64,
    n_theta: usize,
    n_modes: Option<usize>,
) -> Result<IsolaComparison> {
    let thetas = theta_grid(n_theta);
    let asymptotic = thetas.iter().map(|&t| isola.eigenvalue(epsilon, t)).collect();
    let numeric = qnewton::trace_isola_with(exec, model, isola, epsilon, &thetas, n_modes)?;
    Ok(IsolaComparison {
        isola: *isola,
        thetas,
        asymptotic,
        numeric,
    })
}

/// Errors `|lambda_numeric - lambda_asymptotic|` along the most unstable phase.
pub fn error_scaling(
    model: &DispersionModel,
    isola: &IsolaModel,
    epsilons: &[f64],
    n_modes: Option<usize>,
) -> Result<Vec<(qnewton::EigenPair, Complex64)>> {
    let theta = isola.most_unstable_theta();
    let pairs = qnewton::continue_in_epsilon(model, isola, theta, epsilons, n_modes)?;
    Ok(pairs
        .into_iter()
        .map(|pair| {
            let asymptotic = isola.eigenvalue(pair.epsilon, theta);
            (pair, asymptotic)
        })
        .collect())
}

fn run_isola(exec: Execution, config: &ExperimentConfig, model: &DispersionModel, dir: &Path) -> Result<Value> {
    let selector = selector_for(config, 0)?;
    let collision = select_collision(exec, model, &selector)?;
    let isola = isola_for(model, &collision)?;
    let cmp = compare_isola(exec, model, &isola, config.epsilon, config.n_theta, config.n_modes)?;
    let mut rows = Vec::with_capacity(2 * cmp.thetas.len());
    for (&theta, lambda) in cmp.thetas.iter().zip(&cmp.asymptotic) {
        rows.push(IsolaRow {
            source: "asymptotic",
            epsilon: config.epsilon,
            theta,
            p: isola.floquet_exponent(config.epsilon, theta),
            re: lambda.re,
            im: lambda.im,
        });
    }
    for (&theta, pair) in cmp.thetas.iter().zip(&cmp.numeric) {
        rows.push(IsolaRow {
            source: "numeric",
            epsilon: config.epsilon,
            theta,
            p: pair.p,
            re: pair.lambda.re,
            im: pair.lambda.im,
        });
    }
    write_csv(&dir.join("isola.csv"), &rows)?;

    let mut summary = json!({
        "model": model.to_string(),
        "collision": collision_json(&collision),
        "asymptotics": isola_json(&isola),
        "epsilon": config.epsilon,
        "hausdorff": cmp.hausdorff(),
        "curve_hausdorff": cmp.curve_hausdorff(),
        "neutral_samples": cmp.numeric.len() - cmp.unstable_numeric().len(),
        "asymptotic_max_growth": isola.max_growth(config.epsilon),
        "numeric_max_growth": cmp.max_numeric_growth(),
    });

    if !config.epsilons.is_empty() {
        let results = error_scaling(model, &isola, &config.epsilons, config.n_modes)?;
        let rows: Vec<ScalingRow> = results
            .iter()
            .map(|(pair, asym)| ScalingRow {
                epsilon: pair.epsilon,
                theta: isola.most_unstable_theta(),
                p: pair.p,
                asymptotic_re: asym.re,
                asymptotic_im: asym.im,
                numeric_re: pair.lambda.re,
                numeric_im: pair.lambda.im,
                error: (pair.lambda - asym).norm(),
            })
            .collect();
        write_csv(&dir.join("error_scaling.csv"), &rows)?;
        let points: Vec<(f64, f64)> = rows.iter().map(|r| (r.epsilon, r.error)).collect();
        let fit = match fit_power_law(&points) {
            Ok((slope, prefactor)) => json!({ "slope": slope, "prefactor": prefactor }),
            Err(err) => json!({ "error": err.to_string() }),
        };
        summary["error_fit"] = fit;
    }
    Ok(summary)
}

#[derive(Serialize)]
struct SheetRow {
    model: String,
    epsilon: f64,
    theta: f64,
    p: f64,
    re: f64,
    im: f64,
}

fn selector_for(config: &ExperimentConfig, index: usize) -> Result<CollisionSelector> {
    match config.selectors.as_slice() {
        [] => Err(Error::Config("experiment needs a collision selector".into())),
        [shared] => Ok(*shared),
        list => list.get(index).copied().ok_or_else(|| {
            Error::Config(format!("{} selectors for {} models", list.len(), config.models.len()))
        }),
    }
}

fn run_sheet(exec: Execution, config: &ExperimentConfig, models: &[DispersionModel], dir: &Path) -> Result<Value> {
    if config.epsilons.is_empty() {
        return Err(Error::Config("sheet experiments need amplitudes".into()));
    }
    let thetas = theta_grid(config.n_theta);
    let mut rows = Vec::new();
    let mut per_model = Vec::new();
    for (index, model) in models.iter().enumerate() {
        let collision = select_collision(exec, model, &selector_for(config, index)?)?;
        let isola = isola_for(model, &collision)?;
        for &epsilon in &config.epsilons {
            for &theta in &thetas {
                let point = isola.point(epsilon, theta);
                rows.push(SheetRow {
                    model: model.to_string(),
                    epsilon,
                    theta,
                    p: point.p,
                    re: point.lambda.re,
                    im: point.lambda.im,
                });
            }
        }
        per_model.push(json!({
            "model": model.to_string(),
            "collision": collision_json(&collision),
            "asymptotics": isola_json(&isola),
        }));
    }
    write_csv(&dir.join("sheet.csv"), &rows)?;
    Ok(json!({ "models": per_model }))
}

#[derive(Serialize)]
struct CurveRow {
    model: String,
    epsilon: f64,
    theta: f64,
    branch: i8,
    p: f64,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct PointRow {
    model: String,
    epsilon: f64,
    p: f64,
    re: f64,
    im: f64,
}

/// Numerical figure-eight and its distance to the lemniscate.
pub struct FigureEight {
    pub constants: bf_asymptotics::LemniscateModel,
    pub points: Vec<crate::ffh::UnstablePoint>,
    pub max_re: f64,
    /// Largest distance from a numerical eigenvalue to the lemniscate.
    pub max_distance: f64,
}

pub fn figure_eight(exec: Execution, model: &DispersionModel, epsilon: f64) -> Result<FigureEight> {
    let constants = bf_asymptotics::bf_constants(model)?;
    if !constants.unstable {
        return Err(Error::Stable { delta: constants.delta_bf });
    }
    let points = bf_asymptotics::ffh_window(
        exec,
        model,
        epsilon,
        BF_WINDOW_MARGIN * constants.p_max(epsilon),
        BF_WINDOW_SAMPLES,
    )?;
    let curve: Vec<Complex64> = bf_asymptotics::lemniscate_curve(&constants, epsilon, DENSE_THETA)?
        .iter()
        .map(|pt| pt.lambda)
        .collect();
    let lambdas: Vec<Complex64> = points.iter().map(|pt| pt.lambda).collect();
    Ok(FigureEight {
        constants,
        max_re: lambdas.iter().map(|l| l.re).fold(0.0, f64::max),
        max_distance: max_distance_to(&lambdas, &curve),
        points,
    })
}

fn run_bf(exec: Execution, config: &ExperimentConfig, models: &[DispersionModel], dir: &Path) -> Result<Value> {
    let epsilon = config.epsilon;
    let mut curve_rows = Vec::new();
    let mut point_rows = Vec::new();
    let mut per_model = Vec::new();
    for model in models {
        let fig = figure_eight(exec, model, epsilon)?;
        for pt in bf_asymptotics::lemniscate_curve(&fig.constants, epsilon, config.n_theta)? {
            curve_rows.push(CurveRow {
                model: model.to_string(),
                epsilon,
                theta: pt.theta,
                branch: pt.branch,
                p: pt.p,
                re: pt.lambda.re,
                im: pt.lambda.im,
            });
        }
        for pt in &fig.points {
            point_rows.push(PointRow {
                model: model.to_string(),
                epsilon,
                p: pt.p,
                re: pt.lambda.re,
                im: pt.lambda.im,
            });
        }
        let lm = fig.constants;
        per_model.push(json!({
            "model": model.to_string(),
            "constants": { "U": lm.u, "V": lm.v, "delta_bf": lm.delta_bf, "cg1": lm.cg1, "r1": lm.r1 },
            "numeric_points": fig.points.len(),
            "numeric_max_re": fig.max_re,
            "predicted_max_re": lm.growth_coefficient() * epsilon * epsilon,
            "predicted_max_re_u_delta": (lm.u * lm.delta_bf).abs() * epsilon * epsilon,
            "max_distance": fig.max_distance,
            "max_distance_over_eps3": fig.max_distance / epsilon.powi(3),
        }));
    }
    write_csv(&dir.join("lemniscate.csv"), &curve_rows)?;
    write_csv(&dir.join("ffh.csv"), &point_rows)?;
    Ok(json!({ "epsilon": epsilon, "models": per_model }))
}

/// Extents of the numerical figure-eight of the discontinuous symbol.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AmExtent {
    pub epsilon: f64,
    pub max_re: f64,
    pub max_abs_im: f64,
    pub gamma: f64,
}

pub fn am_extents(exec: Execution, model: &DispersionModel, epsilons: &[f64]) -> Result<Vec<(AmExtent, Vec<crate::ffh::UnstablePoint>)>> {
    epsilons
        .iter()
        .map(|&epsilon| {
            let fit = bf_asymptotics::am_lemniscate_with(exec, model, epsilon, 8)?;
            let points = bf_asymptotics::ffh_window(
                exec,
                model,
                epsilon,
                BF_WINDOW_MARGIN * fit.constants.p_max(epsilon),
                BF_WINDOW_SAMPLES,
            )?;
            let extent = AmExtent {
                epsilon,
                max_re: points.iter().map(|pt| pt.lambda.re).fold(0.0, f64::max),
                max_abs_im: points.iter().map(|pt| pt.lambda.im.abs()).fold(0.0, f64::max),
                gamma: fit.gamma,
            };
            Ok((extent, points))
        })
        .collect()
}

fn run_am_bf(exec: Execution, config: &ExperimentConfig, model: &DispersionModel, dir: &Path) -> Result<Value> {
    let mut epsilons = config.epsilons.clone();
    if epsilons.is_empty() {
        epsilons.push(config.epsilon);
    }
    let extents = am_extents(exec, model, &epsilons)?;
    let mut curve_rows = Vec::new();
    let mut point_rows = Vec::new();
    for (extent, points) in &extents {
        let fit = bf_asymptotics::am_lemniscate_with(exec, model, extent.epsilon, config.n_theta)?;
        for pt in &fit.points {
            curve_rows.push(CurveRow {
                model: model.to_string(),
                epsilon: extent.epsilon,
                theta: pt.theta,
                branch: pt.branch,
                p: pt.p,
                re: pt.lambda.re,
                im: pt.lambda.im,
            });
        }
        for pt in points {
            point_rows.push(PointRow {
                model: model.to_string(),
                epsilon: extent.epsilon,
                p: pt.p,
                re: pt.lambda.re,
                im: pt.lambda.im,
            });
        }
    }
    write_csv(&dir.join("lemniscate.csv"), &curve_rows)?;
    write_csv(&dir.join("ffh.csv"), &point_rows)?;
    let list: Vec<AmExtent> = extents.iter().map(|(e, _)| *e).collect();
    write_csv(&dir.join("extents.csv"), &list)?;
    let constants = bf_asymptotics::bf_constants(model)?;
    let exponent = |f: fn(&AmExtent) -> f64| -> Value {
        let pairs: Vec<(f64, f64)> = list.iter().map(|e| (e.epsilon, f(e))).collect();
        match log_log_fit(&pairs) {
            Ok((slope, prefactor)) => json!({ "exponent": slope, "prefactor": prefactor }),
            Err(err) => json!({ "error": err.to_string() }),
        }
    };
    Ok(json!({
        "model": model.to_string(),
        "constants": { "U": constants.u, "V": constants.v, "delta_bf": constants.delta_bf, "cg1": constants.cg1 },
        "extents": list,
        "real_extent_fit": exponent(|e| e.max_re),
        "imaginary_extent_fit": exponent(|e| e.max_abs_im),
    }))
}

#[derive(Serialize)]
struct GrowthRow {
    model: String,
    kind: &'static str,
    k1: Option<i64>,
    k2: Option<i64>,
    p0: Option<f64>,
    growth: f64,
}

fn run_compare_growth(exec: Execution, models: &[DispersionModel], dir: &Path) -> Result<Value> {
    let search = CollisionSearch::default();
    let reports = exec::try_map(exec, models, |model| {
        bf_asymptotics::compare_growth_with(Execution::Sequential, model, &search)
    })?;
    let mut rows = Vec::new();
    let mut per_model = Vec::new();
    for (model, report) in models.iter().zip(&reports) {
        let name = model.to_string();
        for q in &report.quartets {
            rows.push(GrowthRow {
                model: name.clone(),
                kind: "quartet",
                k1: Some(q.k1),
                k2: Some(q.k2),
                p0: Some(q.p0),
                growth: q.growth,
            });
        }
        if report.triad_present {
            rows.push(GrowthRow {
                model: name.clone(),
                kind: "triad",
                k1: None,
                k2: None,
                p0: None,
                growth: report.max_triad_growth,
            });
        }
        rows.push(GrowthRow {
            model: name.clone(),
            kind: "benjamin-feir",
            k1: None,
            k2: None,
            p0: None,
            growth: report.bf_growth,
        });
        per_model.push(json!({
            "model": name,
            "verdict": report.verdict,
            "triad_present": report.triad_present,
            "max_triad_growth": report.max_triad_growth,
            "max_quartet_growth": report.max_quartet_growth,
            "bf_unstable": report.bf_unstable,
            "bf_growth": report.bf_growth,
            "bf_growth_u_delta": report.bf_growth_u_delta,
        }));
    }
    write_csv(&dir.join("growth.csv"), &rows)?;
    let verdicts: Vec<GrowthVerdict> = reports.iter().map(|r| r.verdict).collect();
    Ok(json!({ "models": per_model, "verdicts": verdicts }))
}

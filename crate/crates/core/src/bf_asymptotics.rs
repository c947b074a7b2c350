//! Benjamin-Feir (modulational) asymptotics near the origin of the spectrum.
//!
//! For Floquet exponents `p = epsilon p1`, the eigenvalues bifurcating from
//! zero trace a figure-eight approximated by the lemniscate
//!
//! ```text
//! p       = +- epsilon sqrt(2 delta) cos(theta / 2)
//! Im lambda = -cg1 p
//! Re lambda = epsilon^2 U sin(theta)
//! ```
//!
//! with `U = 1 / (omega'(0) - omega'(1)) + 1 / (omega(2) - 2 c0)`,
//! `V = -omega''(1) / 2` and `delta = -U / V`. The figure-eight exists iff
//! `delta > 0`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::{DispersionModel, Family};
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::ffh;
use crate::flatspec::{find_collisions_with, CollisionSearch};
use crate::hf_asymptotics::{quartet_coeffs, triad_isola};
use crate::stokes::RESONANCE_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemniscateModel {
    /// Comoving group velocity of the carrier, `omega'(1) - c0`.
    pub cg1: f64,
    pub u: f64,
    pub v: f64,
    pub delta_bf: f64,
    /// First correction of the Floquet parameterization; zero for this model class.
    pub r1: f64,
    /// `sqrt(2 delta)`, the half-width of the unstable band in units of `epsilon`.
    pub p1_max: f64,
    pub unstable: bool,
    /// Discontinuous symbol: the mean mode leaves the kernel and the
    /// imaginary part first appears at third order.
    pub am_mode: bool,
}

impl LemniscateModel {
    /// Largest real part of the figure-eight divided by `epsilon^2`.
    pub fn growth_coefficient(&self) -> f64 {
        self.u.abs()
    }

    /// Half-width of the unstable band of Floquet exponents.
    pub fn p_max(&self, epsilon: f64) -> f64 {
        epsilon * self.p1_max * (1.0 + self.r1 * epsilon)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemniscatePoint {
    pub theta: f64,
    /// `+1` or `-1`: sign of `p` for `theta` in `(0, pi)`.
    pub branch: i8,
    pub lambda: Complex64,
    pub p: f64,
}

fn nonzero(value: f64, what: &'static str) -> Result<f64> {
    if !value.is_finite() || value.abs() < RESONANCE_TOL {
        return Err(Error::BfResonance(what));
    }
    Ok(value)
}

/// Growth, curvature and band constants of the modulational instability.
///
/// Deep-water symbols have an infinite group velocity at zero, which removes
/// the mean-flow term of `U`. For the discontinuous symbol the mean mode is not
/// resonant and `U` keeps only the second-harmonic term.
pub fn bf_constants(model: &DispersionModel) -> Result<LemniscateModel> {
    let c0 = model.c0();
    let cg1 = model.comoving_group_velocity(1.0)?;
    let am_mode = model.family() == Family::AkersMilewski;
    let harmonic = 1.0 / nonzero(model.omega(2.0)? - 2.0 * c0, "second harmonic resonates with the carrier")?;
    let mean_flow = if am_mode {
        0.0
    } else if model.is_deep_water() {
        log::info!("group velocity is unbounded at zero wavenumber; dropping the mean-flow term");
        0.0
    } else {
        1.0 / nonzero(
            model.group_velocity(0.0)? - model.group_velocity(1.0)?,
            "long waves travel with the carrier group velocity",
        )?
    };
    let u = mean_flow + harmonic;
    let v = -0.5 * model.second_derivative(1.0)?;
    if v == 0.0 {
        return Err(Error::DegenerateCurvature);
    }
    let delta_bf = -u / v;
    let unstable = delta_bf > 0.0;
    Ok(LemniscateModel {
        cg1,
        u,
        v,
        delta_bf,
        r1: 0.0,
        p1_max: if unstable { (2.0 * delta_bf).sqrt() } else { 0.0 },
        unstable,
        am_mode,
    })
}

/// The two lemniscate points at phase `theta`, one per branch.
pub fn lemniscate(lm: &LemniscateModel, epsilon: f64, theta: f64) -> Result<[LemniscatePoint; 2]> {
    lemniscate_with_drift(lm, epsilon, theta, 0.0)
}

/// Lemniscate with an additional imaginary drift `gamma epsilon^2 p`.
fn lemniscate_with_drift(lm: &LemniscateModel, epsilon: f64, theta: f64, gamma: f64) -> Result<[LemniscatePoint; 2]> {
    if !lm.unstable {
        return Err(Error::Stable { delta: lm.delta_bf });
    }
    let re = epsilon * epsilon * lm.u * theta.sin();
    let half = lm.p_max(epsilon) * (theta / 2.0).cos();
    let point = |branch: i8| {
        let p = f64::from(branch) * half;
        LemniscatePoint {
            theta,
            branch,
            lambda: Complex64::new(re, (-lm.cg1 + gamma * epsilon * epsilon) * p),
            p,
        }
    };
    Ok([point(1), point(-1)])
}

fn theta_grid(n_theta: usize) -> impl Iterator<Item = f64> {
    (0..n_theta).map(move |j| 2.0 * PI * j as f64 / n_theta as f64)
}

/// Both branches sampled at `n_theta` phases in `[0, 2 pi)`.
pub fn lemniscate_curve(lm: &LemniscateModel, epsilon: f64, n_theta: usize) -> Result<Vec<LemniscatePoint>> {
    let mut points = Vec::with_capacity(2 * n_theta);
    for theta in theta_grid(n_theta) {
        points.extend(lemniscate(lm, epsilon, theta)?);
    }
    Ok(points)
}

/// Figure-eight of the discontinuous model with its numerically fitted
/// third-order imaginary part.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AmLemniscate {
    pub constants: LemniscateModel,
    /// Fitted coefficient `gamma` of the drift `Im lambda += gamma epsilon^2 p`.
    pub gamma: f64,
    /// Number of numerical eigenvalues used in the fit.
    pub fit_points: usize,
    pub points: Vec<LemniscatePoint>,
}

/// Phases used to fit the imaginary drift.
const AM_FIT_PHASES: usize = 16;

/// Lemniscate of the discontinuous-symbol model at amplitude `epsilon > 0`.
/// The third-order imaginary part is not available in closed form and is fitted
/// to numerical spectra at the same amplitude.
pub fn am_lemniscate(model: &DispersionModel, epsilon: f64, n_theta: usize) -> Result<AmLemniscate> {
    am_lemniscate_with(Execution::default(), model, epsilon, n_theta)
}

pub fn am_lemniscate_with(
    exec: Execution,
    model: &DispersionModel,
    epsilon: f64,
    n_theta: usize,
) -> Result<AmLemniscate> {
    if model.family() != Family::AkersMilewski {
        return Err(Error::InvalidModel(format!("{model} has no jump at zero")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::SignRestriction { epsilon });
    }
    let constants = bf_constants(model)?;
    if !constants.unstable {
        return Err(Error::Stable { delta: constants.delta_bf });
    }
    let wave = ffh::wave_for(model, epsilon)?;
    let n_modes = ffh::suggested_modes(&wave, 1);
    // Interior phases only: p = 0 is the jump and the band edge is neutral.
    let fit_p: Vec<f64> = (1..AM_FIT_PHASES)
        .map(|j| constants.p_max(epsilon) * (0.5 * PI * j as f64 / AM_FIT_PHASES as f64).cos())
        .collect();
    let expected_re = epsilon * epsilon * constants.u.abs();
    let samples = exec::try_map(exec, &fit_p, |&p| -> Result<Option<(f64, f64)>> {
        let slice = ffh::spectrum_slice(&wave, p, n_modes)?;
        // The unstable eigenvalue of the figure-eight near the origin.
        let best = slice
            .eigenvalues
            .iter()
            .filter(|l| l.re > ffh::TOL_UNSTABLE && l.norm() < 10.0 * expected_re + 10.0 * epsilon * p)
            .max_by(|a, b| a.re.total_cmp(&b.re));
        Ok(best.map(|l| (p, l.im)))
    })?;
    let samples: Vec<(f64, f64)> = samples.into_iter().flatten().collect();
    if samples.is_empty() {
        return Err(Error::InvalidData("no unstable eigenvalues near the origin to fit".into()));
    }
    let (num, den) = samples.iter().fold((0.0, 0.0), |(num, den), &(p, im)| {
        (num + (im + constants.cg1 * p) * p, den + p * p)
    });
    let gamma = num / (den * epsilon * epsilon);
    let mut points = Vec::with_capacity(2 * n_theta);
    for theta in theta_grid(n_theta) {
        points.extend(lemniscate_with_drift(&constants, epsilon, theta, gamma)?);
    }
    Ok(AmLemniscate {
        constants,
        gamma,
        fit_points: samples.len(),
        points,
    })
}

/// Numerically computed unstable eigenvalues at Floquet exponents
/// `+-half_width j / n_p`, `j = 1..=n_p`, sorted by `(p, Im, Re)`. Zero is
/// excluded so that symbols with a jump there stay evaluable.
pub fn ffh_window(
    exec: Execution,
    model: &DispersionModel,
    epsilon: f64,
    half_width: f64,
    n_p: usize,
) -> Result<Vec<ffh::UnstablePoint>> {
    let wave = ffh::wave_for(model, epsilon)?;
    let n_modes = ffh::suggested_modes(&wave, 1);
    let p_list: Vec<f64> = (1..=n_p)
        .flat_map(|j| {
            let p = half_width * j as f64 / n_p as f64;
            [-p, p]
        })
        .collect();
    let slices = ffh::sweep_with(exec, &wave, &p_list, n_modes)?;
    let mut points = ffh::unstable_points_with(exec, &wave, &slices, ffh::TOL_UNSTABLE, true)?;
    points.sort_by(|a, b| a.p.total_cmp(&b.p).then(ffh::canonical_order(&a.lambda, &b.lambda)));
    Ok(points)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GrowthVerdict {
    TriadDominates,
    QuartetDominates,
    BfDominates,
    BfDominatesByDefault,
    None,
}

impl std::fmt::Display for GrowthVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            GrowthVerdict::TriadDominates => "triad-dominates",
            GrowthVerdict::QuartetDominates => "quartet-dominates",
            GrowthVerdict::BfDominates => "bf-dominates",
            GrowthVerdict::BfDominatesByDefault => "bf-dominates-by-default",
            GrowthVerdict::None => "none",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuartetGrowth {
    pub k1: i64,
    pub k2: i64,
    pub p0: f64,
    /// `|-A sqrt(G/E) + C sqrt(E/G)|`, the growth rate over `epsilon^2`.
    pub growth: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GrowthReport {
    pub triad_present: bool,
    /// Largest triad growth rate over `epsilon`.
    pub max_triad_growth: f64,
    pub quartets: Vec<QuartetGrowth>,
    pub max_quartet_growth: f64,
    pub bf_unstable: bool,
    /// `|U|`, the modulational growth rate over `epsilon^2`.
    pub bf_growth: f64,
    /// `|U delta|`, the modulational growth rate as printed in the lemniscate
    /// display; reported for comparison only.
    pub bf_growth_u_delta: f64,
    pub verdict: GrowthVerdict,
}

/// Compares the small-amplitude growth of triad, quartet and modulational
/// instabilities. Triads grow at first order and always win; otherwise
/// quartets and the modulational instability compete at second order.
pub fn compare_growth(model: &DispersionModel, search: &CollisionSearch) -> Result<GrowthReport> {
    compare_growth_with(Execution::default(), model, search)
}

pub fn compare_growth_with(exec: Execution, model: &DispersionModel, search: &CollisionSearch) -> Result<GrowthReport> {
    let triads = find_collisions_with(exec, model, 1, search)?;
    let max_triad_growth = triads
        .iter()
        .filter_map(|c| triad_isola(c).ok())
        .map(|iso| iso.growth_coefficient())
        .fold(0.0, f64::max);
    let triad_present = max_triad_growth > 0.0;

    let mut quartets = Vec::new();
    for collision in find_collisions_with(exec, model, 2, search)? {
        let Ok(coeffs) = quartet_coeffs(model, &collision) else {
            continue;
        };
        let ratio = coeffs.g / coeffs.e;
        if !(ratio > 0.0) {
            continue;
        }
        quartets.push(QuartetGrowth {
            k1: collision.k1,
            k2: collision.k2,
            p0: collision.p0,
            growth: (-coeffs.a * ratio.sqrt() + coeffs.c / ratio.sqrt()).abs(),
        });
    }
    let max_quartet_growth = quartets.iter().map(|q| q.growth).fold(0.0, f64::max);

    let (bf_unstable, bf_growth, bf_growth_u_delta) = match bf_constants(model) {
        Ok(lm) if lm.unstable => (true, lm.growth_coefficient(), (lm.u * lm.delta_bf).abs()),
        Ok(_) => (false, 0.0, 0.0),
        Err(err) => {
            log::warn!("no modulational constants for {model}: {err}");
            (false, 0.0, 0.0)
        }
    };

    let verdict = if triad_present {
        GrowthVerdict::TriadDominates
    } else if max_quartet_growth > 0.0 {
        if bf_unstable && bf_growth > max_quartet_growth {
            GrowthVerdict::BfDominates
        } else {
            GrowthVerdict::QuartetDominates
        }
    } else if bf_unstable {
        GrowthVerdict::BfDominatesByDefault
    } else {
        GrowthVerdict::None
    };
    Ok(GrowthReport {
        triad_present,
        max_triad_growth,
        quartets,
        max_quartet_growth,
        bf_unstable,
        bf_growth,
        bf_growth_u_delta,
        verdict,
    })
}

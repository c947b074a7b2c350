#![allow(dead_code)]

use num_complex::Complex64;
use stokes_spectra::ffh::{self, TOL_UNSTABLE};
use stokes_spectra::harness::log_log_fit;
use stokes_spectra::hf_asymptotics::{self, IsolaKind};
use stokes_spectra::{find_collisions, flat_eigenvalue, CollisionSearch, DispersionModel, Error, StokesWave};

pub const DEEP: f64 = f64::INFINITY;

/// Models with a smooth or piecewise smooth symbol used across the suites.
pub fn sample_models() -> Vec<DispersionModel> {
    vec![
        DispersionModel::kawahara(1.0, -0.25),
        DispersionModel::kawahara(-3.0, 1.0),
        DispersionModel::whitham(2.0),
        DispersionModel::whitham(DEEP),
        DispersionModel::capillary_whitham(DEEP, 2.5),
        DispersionModel::capillary_whitham(2.0, 3.0),
        DispersionModel::akers_milewski(2.0),
    ]
}

/// Largest distance from a point of `a` to the nearest point of `b`.
pub fn one_sided(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .map(|x| b.iter().map(|y| (x - y).norm()).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Maximum over `|n| <= n_modes` of the distance between the computed flat
/// spectrum and the closed-form eigenvalues.
pub fn flat_limit_error(model: &DispersionModel, p: f64, n_modes: usize) -> f64 {
    let wave = stokes_spectra::stokes_numeric(model, 0.0, ffh::WAVE_MODES).unwrap();
    let slice = ffh::spectrum_slice(&wave, p, n_modes).unwrap();
    let exact: Vec<Complex64> = (-(n_modes as i64)..=n_modes as i64)
        .map(|n| flat_eigenvalue(model, n, p).unwrap())
        .collect();
    one_sided(&slice.eigenvalues, &exact).max(one_sided(&exact, &slice.eigenvalues))
}

/// Mismatch between the slice at `1 - p` and the conjugate of the slice at
/// `p`. The two truncations keep different outermost modes, so only
/// eigenvalues well inside the retained band are compared.
pub fn conjugation_error(wave: &StokesWave, p: f64, n_modes: usize) -> f64 {
    let model = &wave.model;
    let bound = |q: f64| {
        (n_modes as i64 / 2..=n_modes as i64)
            .flat_map(|n| [n, -n])
            .map(|n| flat_eigenvalue(model, n, q).unwrap().norm())
            .fold(f64::INFINITY, f64::min)
            / 2.0
    };
    // Dense eigenvalues carry an error of order 1e-16 times the largest
    // matrix entry; Newton polishing brings each to the scale of its own
    // eigenvector.
    let inner = |q: f64, r: f64| -> Vec<Complex64> {
        ffh::spectrum_slice(wave, q, n_modes)
            .unwrap()
            .eigenvalues
            .into_iter()
            .filter(|l| l.norm() < r)
            .map(|l| match ffh::polish(wave, q, n_modes, l) {
                Ok(polished) if (polished - l).norm() < 1e-8 * l.norm().max(1.0) => polished,
                _ => l,
            })
            .collect()
    };
    // Partners of eigenvalues just inside the radius may lie just outside it.
    let r = bound(p).min(bound(1.0 - p));
    let conj = |set: Vec<Complex64>| -> Vec<Complex64> { set.iter().map(|l| l.conj()).collect() };
    let forward = one_sided(&conj(inner(p, r)), &inner(1.0 - p, 1.5 * r));
    let backward = one_sided(&inner(1.0 - p, r), &conj(inner(p, 1.5 * r)));
    forward.max(backward)
}

/// Largest change of the unstable eigenvalues at `p` when the truncation
/// grows from `n_modes` to `n_modes + 8`. Returns `None` if nothing is
/// unstable at `p`.
pub fn truncation_change(wave: &StokesWave, p: f64, n_modes: usize) -> Option<f64> {
    let slice = ffh::spectrum_slice(wave, p, n_modes).unwrap();
    let unstable = ffh::unstable_points(wave, &[slice], TOL_UNSTABLE, true).unwrap();
    if unstable.is_empty() {
        return None;
    }
    let change = unstable
        .iter()
        .map(|pt| {
            let wider = ffh::polish(wave, p, n_modes + 8, pt.lambda).unwrap();
            (wider - pt.lambda).norm()
        })
        .fold(0.0, f64::max);
    Some(change)
}

/// Fitted exponent of the expansion residual over `epsilons`.
pub fn residual_slope(model: &DispersionModel, order: usize, epsilons: &[f64]) -> f64 {
    let pairs: Vec<(f64, f64)> = epsilons
        .iter()
        .map(|&eps| (eps, stokes_spectra::stokes_expand(model, eps, order).unwrap().residual().unwrap()))
        .collect();
    log_log_fit(&pairs).unwrap().0
}

pub fn log_space(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..n).map(|j| (a + (b - a) * j as f64 / (n - 1) as f64).exp()).collect()
}

/// Outcome of checking one collision against the Krein criterion.
#[derive(Debug)]
pub struct KreinRecord {
    pub model: DispersionModel,
    pub m: u32,
    pub k1: i64,
    pub p0: f64,
    pub krein_negative: bool,
    /// Asymptotic maximal growth at the test amplitude, zero when stable.
    pub predicted: f64,
    /// Largest growth of the colliding pair found by the Floquet-Fourier-Hill
    /// scan, `None` if the scan failed.
    pub measured: Option<f64>,
    pub note: Option<String>,
}

impl KreinRecord {
    /// The asymptotic growth is large enough for the numerical threshold to
    /// decide the question.
    pub fn decidable(&self) -> bool {
        self.predicted == 0.0 || self.predicted > 10.0 * TOL_UNSTABLE
    }

    pub fn consistent(&self) -> bool {
        let asymptotic_ok = (self.predicted > 0.0) == self.krein_negative;
        let numeric_ok = match self.measured {
            Some(re) => !self.decidable() || (re > TOL_UNSTABLE) == (self.predicted > 0.0),
            None => false,
        };
        asymptotic_ok && numeric_ok && self.note.is_none()
    }
}

/// Largest growth of the eigenvalue pair born at the collision of `isola` at
/// amplitude `epsilon`.
pub fn pair_growth_near(wave: &StokesWave, col: &stokes_spectra::Collision, isola: Option<&hf_asymptotics::IsolaModel>, epsilon: f64) -> stokes_spectra::Result<f64> {
    let scale = epsilon.powi(col.m.min(2) as i32);
    let (center, lo, hi) = match isola {
        Some(iso) => {
            let (lo, hi) = iso.floquet_band(epsilon);
            let margin = 2.0 * epsilon.powi(iso.order as i32) * (1.0 + iso.p_amp.abs());
            let mid = 0.5 * (lo + hi);
            (iso.center(epsilon), mid - margin, mid + margin)
        }
        None => (col.lambda0, col.p0 - 8.0 * scale, col.p0 + 8.0 * scale),
    };
    let reach = col.k1.unsigned_abs().max(col.k2.unsigned_abs()) as usize + 1;
    let n_modes = ffh::suggested_modes(wave, reach);
    Ok(ffh::pair_growth(wave, center, lo, hi, n_modes)?.lambda.re)
}

/// Checks every triad and quartet collision of `model` at amplitude `epsilon`.
/// Returns `Err` with the reason when no wave exists for the model.
pub fn krein_scan(model: &DispersionModel, epsilon: f64) -> Result<Vec<KreinRecord>, Error> {
    let wave = ffh::wave_for(model, epsilon)?;
    let mut records = Vec::new();
    for m in [1, 2] {
        for col in find_collisions(model, m, &CollisionSearch::default())? {
            if col.degenerate {
                continue;
            }
            let (isola, note) = match hf_asymptotics::isola_for(model, &col) {
                Ok(iso) => (Some(iso), None),
                Err(Error::StableCollision { .. }) => (None, None),
                Err(err) => (None, Some(err.to_string())),
            };
            let unstable_isola = isola.filter(|iso| iso.kind != IsolaKind::HigherOrder && iso.growth_coefficient() > 0.0);
            let predicted = unstable_isola.map_or(0.0, |iso| iso.max_growth(epsilon));
            let measured = pair_growth_near(&wave, &col, unstable_isola.as_ref(), epsilon).ok();
            records.push(KreinRecord {
                model: *model,
                m,
                k1: col.k1,
                p0: col.p0,
                krein_negative: col.krein_negative,
                predicted,
                measured,
                note,
            });
        }
    }
    Ok(records)
}

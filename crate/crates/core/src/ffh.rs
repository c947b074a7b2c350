//! Floquet-Fourier-Hill discretization of the linearized problem.
//!
//! Perturbations `exp(lambda t) exp(i p x) sum_n v_n exp(i n x)` of a traveling
//! wave satisfy `lambda v = M v` with
//!
//! ```text
//! M[n, m] = i (c (p + n) - omega(p + n)) delta_nm - 2 i (p + n) u_{n - m}
//! ```
//!
//! truncated to `|n|, |m| <= N`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::linalg;
use crate::qnewton;
use crate::stokes::{stokes_expand, stokes_numeric, StokesWave};

/// Real part above which an eigenvalue counts as unstable.
pub const TOL_UNSTABLE: f64 = 1e-10;
/// Harmonics kept in the Galerkin waves fed to the spectral problem.
pub const WAVE_MODES: usize = 32;

/// Traveling wave used by the numerical spectral methods: the Galerkin
/// solution on [`WAVE_MODES`] harmonics (the flat state at zero amplitude).
pub fn wave_for(model: &DispersionModel, epsilon: f64) -> Result<StokesWave> {
    if epsilon == 0.0 {
        return stokes_expand(model, 0.0, 2);
    }
    stokes_numeric(model, epsilon, WAVE_MODES)
}

/// Truncation that resolves the wave to roundoff and keeps a margin of
/// harmonics beyond `mode_of_interest`.
pub fn suggested_modes(wave: &StokesWave, mode_of_interest: usize) -> usize {
    let resolved = wave.significant_modes();
    (2 * resolved + 4).max(mode_of_interest + resolved + 4).max(8)
}

/// Index of Fourier mode `n` in a truncation with `n_modes` modes on each side.
pub fn mode_index(n: i64, n_modes: usize) -> Option<usize> {
    let idx = n + n_modes as i64;
    (idx >= 0 && idx <= 2 * n_modes as i64).then_some(idx as usize)
}

/// Dense matrix of the linearization at Floquet exponent `p` over the modes
/// `-n_modes..=n_modes`.
pub fn assemble(wave: &StokesWave, p: f64, n_modes: usize) -> Result<DMatrix<Complex64>> {
    let resolved = wave.significant_modes();
    if n_modes < 2 * resolved + 4 {
        log::warn!("under-resolved spectral problem: {n_modes} modes for a wave with {resolved} harmonics");
    }
    let model = &wave.model;
    let dim = 2 * n_modes + 1;
    let mut diagonal = Vec::with_capacity(dim);
    for i in 0..dim {
        let q = p + (i as f64 - n_modes as f64);
        if q == 0.0 && model.omega(0.0).is_err() {
            return Err(Error::JumpDiscontinuity { k: q });
        }
        diagonal.push(Complex64::new(0.0, wave.c * q - model.omega(q)?));
    }
    Ok(DMatrix::from_fn(dim, dim, |i, j| {
        let q = p + (i as f64 - n_modes as f64);
        let coupling = Complex64::new(0.0, -2.0 * q * wave.coefficient(i as i64 - j as i64));
        if i == j {
            diagonal[i] + coupling
        } else {
            coupling
        }
    }))
}

/// Lexicographic order on `(Im, Re)` used to make eigenvalue lists canonical.
pub fn canonical_order(a: &Complex64, b: &Complex64) -> std::cmp::Ordering {
    a.im.total_cmp(&b.im).then(a.re.total_cmp(&b.re))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SpectrumSlice {
    pub p: f64,
    pub n_modes: usize,
    pub epsilon: f64,
    /// Sorted by `(Im, Re)`.
    pub eigenvalues: Vec<Complex64>,
    pub max_re: f64,
}

/// All eigenvalues of the truncated problem at one Floquet exponent.
pub fn spectrum_slice(wave: &StokesWave, p: f64, n_modes: usize) -> Result<SpectrumSlice> {
    let matrix = assemble(wave, p, n_modes)?;
    let mut eigenvalues = linalg::eigenvalues(&matrix)?;
    eigenvalues.sort_by(canonical_order);
    let max_re = eigenvalues.iter().map(|l| l.re).fold(f64::NEG_INFINITY, f64::max);
    Ok(SpectrumSlice {
        p,
        n_modes,
        epsilon: wave.epsilon,
        eigenvalues,
        max_re,
    })
}

/// Slices at every Floquet exponent of `p_list`, in input order.
pub fn sweep(wave: &StokesWave, p_list: &[f64], n_modes: usize) -> Result<Vec<SpectrumSlice>> {
    sweep_with(Execution::default(), wave, p_list, n_modes)
}

pub fn sweep_with(exec: Execution, wave: &StokesWave, p_list: &[f64], n_modes: usize) -> Result<Vec<SpectrumSlice>> {
    exec::try_map(exec, p_list, |&p| spectrum_slice(wave, p, n_modes))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct UnstablePoint {
    pub p: f64,
    pub lambda: Complex64,
}

/// Eigenvalue of the truncated problem closest to `lambda`, refined to
/// roundoff by Newton iteration on the eigenpair.
pub fn polish(wave: &StokesWave, p: f64, n_modes: usize, lambda: Complex64) -> Result<Complex64> {
    let matrix = assemble(wave, p, n_modes)?;
    let (value, _) = qnewton::polish_eigenvalue(&matrix, lambda)?;
    Ok(value)
}

/// Eigenvalues with real part above `tol`. With `refine`, every candidate is
/// first polished so that roundoff in the dense solver (of order `1e-16`
/// times the largest entry) cannot produce spurious instabilities.
pub fn unstable_points(
    wave: &StokesWave,
    slices: &[SpectrumSlice],
    tol: f64,
    refine: bool,
) -> Result<Vec<UnstablePoint>> {
    unstable_points_with(Execution::default(), wave, slices, tol, refine)
}

pub fn unstable_points_with(
    exec: Execution,
    wave: &StokesWave,
    slices: &[SpectrumSlice],
    tol: f64,
    refine: bool,
) -> Result<Vec<UnstablePoint>> {
    let per_slice = exec::try_map(exec, slices, |slice| -> Result<Vec<UnstablePoint>> {
        let candidates: Vec<Complex64> = slice.eigenvalues.iter().copied().filter(|l| l.re > tol).collect();
        if candidates.is_empty() {
            return Ok(Vec::new());
        }
        let values = if refine {
            let matrix = assemble(wave, slice.p, slice.n_modes)?;
            let mut refined = Vec::with_capacity(candidates.len());
            for lambda in candidates {
                match qnewton::polish_eigenvalue(&matrix, lambda) {
                    Ok((value, _)) => refined.push(value),
                    Err(err) => {
                        log::debug!("keeping unpolished eigenvalue {lambda} at p = {}: {err}", slice.p);
                        refined.push(lambda);
                    }
                }
            }
            refined
        } else {
            candidates
        };
        Ok(values
            .into_iter()
            .filter(|l| l.re > tol)
            .map(|lambda| UnstablePoint { p: slice.p, lambda })
            .collect())
    })?;
    Ok(per_slice.into_iter().flatten().collect())
}

/// The two eigenvalues nearest `center`.
fn pair_near(wave: &StokesWave, p: f64, n_modes: usize, center: Complex64) -> Result<(Complex64, Complex64)> {
    let mut eigenvalues = linalg::eigenvalues(&assemble(wave, p, n_modes)?)?;
    if eigenvalues.len() < 2 {
        return Err(Error::EigFailure);
    }
    eigenvalues.sort_by(|a, b| (a - center).norm().total_cmp(&(b - center).norm()));
    Ok((eigenvalues[0], eigenvalues[1]))
}

const GOLDEN: f64 = 0.618_033_988_749_894_8;

/// Golden-section search for a minimum of `f` on `[a, b]`.
fn golden_min(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64) -> Result<f64> {
    let mut c = b - GOLDEN * (b - a);
    let mut d = a + GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    for _ in 0..200 {
        if (b - a) <= 4.0 * f64::EPSILON * a.abs().max(b.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - GOLDEN * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + GOLDEN * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc <= fd { c } else { d })
}

/// Largest growth rate of the pair of eigenvalues near `center` for Floquet
/// exponents in `[p_lo, p_hi]`.
///
/// Instabilities born at higher-order collisions occupy bands of Floquet
/// exponents far narrower than any practical grid. The band is located by
/// minimizing the imaginary split of the pair, which vanishes exactly on it;
/// the real part is then maximized across the band and the result polished.
pub fn pair_growth(
    wave: &StokesWave,
    center: Complex64,
    p_lo: f64,
    p_hi: f64,
    n_modes: usize,
) -> Result<UnstablePoint> {
    const COARSE: usize = 40;
    if !(p_hi > p_lo) {
        return Err(Error::Config("empty Floquet window".into()));
    }
    let split = |p: f64| -> Result<f64> {
        let (a, b) = pair_near(wave, p, n_modes, center)?;
        Ok((a.im - b.im).abs())
    };
    let growth = |p: f64| -> Result<f64> {
        let (a, b) = pair_near(wave, p, n_modes, center)?;
        Ok(a.re.abs().max(b.re.abs()))
    };
    let grid: Vec<f64> = (0..=COARSE).map(|j| p_lo + (p_hi - p_lo) * j as f64 / COARSE as f64).collect();
    let splits = grid.iter().map(|&p| split(p)).collect::<Result<Vec<_>>>()?;
    let best = (0..=COARSE).min_by(|&i, &j| splits[i].total_cmp(&splits[j])).expect("non-empty grid");
    let p_star = golden_min(split, grid[best.saturating_sub(1)], grid[(best + 1).min(COARSE)])?;

    // Walk out to both band edges, then maximize the growth between them.
    let mut p_best = p_star;
    if growth(p_star)? > TOL_UNSTABLE {
        let edge = |direction: f64| -> Result<f64> {
            let mut step = 4.0 * f64::EPSILON * p_star.abs().max(1.0);
            loop {
                let trial = p_star + direction * step;
                if growth(trial)? <= TOL_UNSTABLE || step > p_hi - p_lo {
                    return Ok(trial);
                }
                step *= 2.0;
            }
        };
        let (left, right) = (edge(-1.0)?, edge(1.0)?);
        p_best = golden_min(|p| growth(p).map(|g| -g), left, right)?;
    }

    let (a, b) = pair_near(wave, p_best, n_modes, center)?;
    let rough = if a.re >= b.re { a } else { b };
    let lambda = match polish(wave, p_best, n_modes, rough) {
        Ok(value) => value,
        Err(err) => {
            log::debug!("keeping unpolished eigenvalue {rough} at p = {p_best}: {err}");
            rough
        }
    };
    Ok(UnstablePoint { p: p_best, lambda })
}

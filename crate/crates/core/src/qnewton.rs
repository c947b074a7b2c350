//! Newton-type refinement and amplitude continuation of single eigenpairs.
//!
//! An eigenpair `(lambda, v)` of the truncated matrix `M` is the root of
//!
//! ```text
//! F(v, lambda) = [ (M - lambda) v ; v[pin] - 1 ]
//! ```
//!
//! which is solved with a Broyden (rank-one updated) inverse Jacobian that is
//! rebuilt from the exact Jacobian whenever a step fails to reduce `|F|`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::ffh::{self, assemble, mode_index};
use crate::hf_asymptotics::IsolaModel;
use crate::linalg;

/// Residual a converged eigenpair must reach.
pub const TOL_NEWTON: f64 = 1e-12;
pub const MAX_ITER: usize = 50;
/// Largest ratio between consecutive amplitudes of a continuation.
const MAX_STEP_RATIO: f64 = 2.0;
/// How often a failed continuation step may be halved (geometrically).
const MAX_BISECTIONS: usize = 12;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EigenPair {
    pub lambda: Complex64,
    /// Fourier coefficients over the modes `-n_modes..=n_modes`.
    pub v: Vec<Complex64>,
    pub p: f64,
    pub epsilon: f64,
    pub residual: f64,
    /// Mode whose coefficient is normalized to one.
    pub pin: i64,
    pub n_modes: usize,
    pub iterations: usize,
}

/// Outcome of a Newton solve on a fixed matrix.
#[derive(Debug, Clone)]
pub struct NewtonSolution {
    pub lambda: Complex64,
    pub v: DVector<Complex64>,
    pub residual: f64,
    pub iterations: usize,
    pub history: Vec<f64>,
}

fn defect(matrix: &DMatrix<Complex64>, v: &DVector<Complex64>, lambda: Complex64, pin: usize) -> DVector<Complex64> {
    let n = v.len();
    let mv = matrix * v;
    DVector::from_fn(n + 1, |i, _| if i < n { mv[i] - lambda * v[i] } else { v[pin] - 1.0 })
}

fn sup_norm(x: &DVector<Complex64>) -> f64 {
    x.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

fn inverse_jacobian(
    matrix: &DMatrix<Complex64>,
    v: &DVector<Complex64>,
    lambda: Complex64,
    pin: usize,
) -> Option<DMatrix<Complex64>> {
    let n = v.len();
    let jac = DMatrix::from_fn(n + 1, n + 1, |i, j| match (i < n, j < n) {
        (true, true) => matrix[(i, j)] - if i == j { lambda } else { Complex64::new(0.0, 0.0) },
        (true, false) => -v[i],
        (false, true) => Complex64::new(if j == pin { 1.0 } else { 0.0 }, 0.0),
        (false, false) => Complex64::new(0.0, 0.0),
    });
    jac.try_inverse()
}

/// Solves `M v = lambda v`, `v[pin] = 1` from the given starting point.
pub fn solve_pinned(
    matrix: &DMatrix<Complex64>,
    lambda: Complex64,
    v: &DVector<Complex64>,
    pin: usize,
) -> Result<NewtonSolution> {
    let n = v.len();
    let mut v = v / v[pin];
    let mut lambda = lambda;
    let mut f = defect(matrix, &v, lambda, pin);
    let mut r = sup_norm(&f);
    let mut history = vec![r];
    let mut inverse: Option<DMatrix<Complex64>> = None;
    let mut fresh = false;
    let mut iterations = 0;
    let mut evaluations = 0;

    while r > 0.0 && evaluations < MAX_ITER {
        if inverse.is_none() {
            inverse = inverse_jacobian(matrix, &v, lambda, pin);
            fresh = true;
            if inverse.is_none() {
                break;
            }
        }
        let h = inverse.as_ref().expect("inverse Jacobian available");
        let step = -(h * &f);
        let trial_v = DVector::from_fn(n, |i, _| v[i] + step[i]);
        let trial_lambda = lambda + step[n];
        let trial_f = defect(matrix, &trial_v, trial_lambda, pin);
        let trial_r = sup_norm(&trial_f);
        evaluations += 1;

        if !(trial_r < r) {
            if r < TOL_NEWTON {
                // Already converged and at the roundoff floor.
                break;
            }
            if !fresh {
                inverse = None;
                continue;
            }
            if !trial_r.is_finite() {
                break;
            }
        }

        // Broyden update of the inverse: H += (s - H y) (s^H H) / (s^H H y).
        let y = &trial_f - &f;
        let hy = h * &y;
        let s_h = step.adjoint() * h;
        let denom = (step.adjoint() * &hy)[(0, 0)];
        let mut updated = h.clone();
        if denom.norm() > 0.0 {
            updated += (&step - &hy) * s_h / denom;
        }
        inverse = Some(updated);
        fresh = false;

        let previous = r;
        v = trial_v;
        lambda = trial_lambda;
        f = trial_f;
        r = trial_r;
        history.push(r);
        iterations += 1;
        if r < TOL_NEWTON && r > 0.1 * previous {
            break;
        }
    }

    if !(r < TOL_NEWTON) {
        return Err(Error::NewtonDiverged { residuals: history });
    }
    Ok(NewtonSolution {
        lambda,
        v,
        residual: r,
        iterations,
        history,
    })
}

/// Approximate eigenvector for an eigenvalue estimate, by two steps of
/// inverse iteration.
pub fn eigenvector_estimate(matrix: &DMatrix<Complex64>, lambda: Complex64) -> Result<DVector<Complex64>> {
    let n = matrix.nrows();
    let scale = matrix.iter().fold(1.0f64, |acc, z| acc.max(z.norm()));
    let mut x = DVector::from_fn(n, |i, _| Complex64::from_polar(1.0, 0.7 * i as f64));
    let mut shift = lambda + Complex64::new(1e-14 * scale, 0.0);
    for _ in 0..2 {
        let mut shifted = matrix.clone();
        for i in 0..n {
            shifted[(i, i)] -= shift;
        }
        let lu = shifted.lu();
        let solved = match lu.solve(&x) {
            Some(y) if y.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => y,
            _ => {
                shift += Complex64::new(1e-12 * scale, 1e-12 * scale);
                continue;
            }
        };
        let norm = sup_norm(&solved);
        if norm == 0.0 {
            return Err(Error::EigFailure);
        }
        x = solved / Complex64::new(norm, 0.0);
    }
    Ok(x)
}

fn dominant_index(v: &DVector<Complex64>) -> usize {
    v.iter()
        .enumerate()
        .fold((0, -1.0), |best, (i, z)| if z.norm() > best.1 { (i, z.norm()) } else { best })
        .0
}

/// Refines an eigenvalue estimate of `matrix` to roundoff. Returns the
/// eigenvalue and its eigenvector normalized at its largest entry.
pub fn polish_eigenvalue(matrix: &DMatrix<Complex64>, lambda: Complex64) -> Result<(Complex64, DVector<Complex64>)> {
    let v = eigenvector_estimate(matrix, lambda)?;
    let pin = dominant_index(&v);
    let solution = solve_pinned(matrix, lambda, &v, pin)?;
    Ok((solution.lambda, solution.v))
}

/// Restarts Newton from the eigenvalue of the dense spectrum nearest `lambda`.
/// Needed near the edges of an isola, where two eigenvalues almost coincide
/// and Newton from a nearby guess converges only linearly.
fn restart_from_spectrum(matrix: &DMatrix<Complex64>, lambda: Complex64, pin: usize) -> Result<NewtonSolution> {
    let nearest = linalg::eigenvalues(matrix)?
        .into_iter()
        .min_by(|a, b| (a - lambda).norm().total_cmp(&(b - lambda).norm()))
        .ok_or(Error::EigFailure)?;
    let v = eigenvector_estimate(matrix, nearest)?;
    if v[pin].norm() < 1e-8 * sup_norm(&v) {
        return Err(Error::EigFailure);
    }
    solve_pinned(matrix, nearest, &v, pin)
}

/// Refines `guess` on the spectral problem of `wave` at Floquet exponent `p`.
pub fn refine(wave: &crate::stokes::StokesWave, p: f64, guess: &EigenPair, n_modes: usize) -> Result<EigenPair> {
    if guess.v.len() != 2 * n_modes + 1 {
        return Err(Error::Config(format!(
            "eigenvector has {} entries, expected {}",
            guess.v.len(),
            2 * n_modes + 1
        )));
    }
    let pin = mode_index(guess.pin, n_modes)
        .ok_or_else(|| Error::Config(format!("pin mode {} outside the truncation", guess.pin)))?;
    if guess.v[pin].norm() == 0.0 {
        return Err(Error::Config("guess vanishes at the pin mode".into()));
    }
    let matrix = assemble(wave, p, n_modes)?;
    let solution = match solve_pinned(&matrix, guess.lambda, &DVector::from_column_slice(&guess.v), pin) {
        Ok(solution) => solution,
        Err(err) => restart_from_spectrum(&matrix, guess.lambda, pin).map_err(|_| err)?,
    };
    Ok(EigenPair {
        lambda: solution.lambda,
        v: solution.v.iter().copied().collect(),
        p,
        epsilon: wave.epsilon,
        residual: solution.residual,
        pin: guess.pin,
        n_modes,
        iterations: solution.iterations,
    })
}

/// Leading-order eigenfunction `phi_1 + beta phi_2` of an isola.
pub fn seed_vector(isola: &IsolaModel, theta: f64, n_modes: usize) -> Result<Vec<Complex64>> {
    let col = &isola.collision;
    let (i1, i2) = match (mode_index(col.k1, n_modes), mode_index(col.k2, n_modes)) {
        (Some(i1), Some(i2)) => (i1, i2),
        _ => return Err(Error::Config(format!("collision modes {} and {} exceed the truncation {n_modes}", col.k1, col.k2))),
    };
    let mut v = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
    v[i1] = Complex64::new(1.0, 0.0);
    v[i2] = isola.beta(theta);
    Ok(v)
}

/// Truncation used by [`continue_in_epsilon`] when none is given.
pub fn default_modes(model: &DispersionModel, isola: &IsolaModel, eps_max: f64) -> Result<usize> {
    let wave = ffh::wave_for(model, eps_max)?;
    let col = &isola.collision;
    let reach = col.k1.unsigned_abs().max(col.k2.unsigned_abs()) as usize + 1;
    Ok(ffh::suggested_modes(&wave, reach))
}

/// Follows the eigenpair of `isola` at phase `theta` through increasing
/// amplitudes. The Floquet exponent at each amplitude comes from the
/// asymptotic expansion; intermediate amplitudes are inserted so that
/// consecutive amplitudes differ by at most a factor of two, and steps that
/// fail are bisected.
pub fn continue_in_epsilon(
    model: &DispersionModel,
    isola: &IsolaModel,
    theta: f64,
    eps_targets: &[f64],
    n_modes: Option<usize>,
) -> Result<Vec<EigenPair>> {
    if eps_targets.windows(2).any(|w| !(w[1] > w[0])) || eps_targets.iter().any(|e| !(*e >= 0.0)) {
        return Err(Error::Config("amplitudes must be non-negative and increasing".into()));
    }
    let Some(&eps_max) = eps_targets.last() else {
        return Ok(Vec::new());
    };
    let n_modes = match n_modes {
        Some(n) => n,
        None => default_modes(model, isola, eps_max)?,
    };
    let col = isola.collision;
    let mut results = Vec::with_capacity(eps_targets.len());
    let mut previous: Option<EigenPair> = None;

    for &target in eps_targets {
        if target == 0.0 {
            let wave = ffh::wave_for(model, 0.0)?;
            let mut v = vec![Complex64::new(0.0, 0.0); 2 * n_modes + 1];
            v[mode_index(col.k1, n_modes).ok_or_else(|| Error::Config("collision mode outside truncation".into()))?] =
                Complex64::new(1.0, 0.0);
            let guess = EigenPair {
                lambda: col.lambda0,
                v,
                p: col.p0,
                epsilon: 0.0,
                residual: f64::INFINITY,
                pin: col.k1,
                n_modes,
                iterations: 0,
            };
            let pair = refine(&wave, col.p0, &guess, n_modes)?;
            results.push(pair.clone());
            previous = Some(pair);
            continue;
        }

        // Amplitudes still to be reached on the way to `target`.
        let mut pending = vec![target];
        if let Some(prev) = previous.as_ref().filter(|p| p.epsilon > 0.0) {
            let mut eps = target;
            while eps / prev.epsilon > MAX_STEP_RATIO {
                eps /= MAX_STEP_RATIO;
                pending.push(eps);
            }
        }
        let mut bisections = 0;
        while let Some(&eps) = pending.last() {
            let wave = ffh::wave_for(model, eps)?;
            let p = isola.floquet_exponent(eps, theta);
            let guess = match previous.as_ref().filter(|prev| prev.epsilon > 0.0) {
                Some(prev) => EigenPair {
                    lambda: prev.lambda + isola.eigenvalue(eps, theta) - isola.eigenvalue(prev.epsilon, theta),
                    ..prev.clone()
                },
                None => EigenPair {
                    lambda: isola.eigenvalue(eps, theta),
                    v: seed_vector(isola, theta, n_modes)?,
                    p,
                    epsilon: eps,
                    residual: f64::INFINITY,
                    pin: col.k1,
                    n_modes,
                    iterations: 0,
                },
            };
            match refine(&wave, p, &guess, n_modes) {
                Ok(pair) => {
                    pending.pop();
                    previous = Some(pair);
                }
                Err(err) => {
                    let from = previous.as_ref().map_or(0.0, |prev| prev.epsilon);
                    if bisections >= MAX_BISECTIONS || from == 0.0 {
                        return Err(err.context(format!("continuation at epsilon = {eps:e}, theta = {theta}")));
                    }
                    bisections += 1;
                    pending.push((from * eps).sqrt());
                }
            }
        }
        results.push(previous.clone().expect("target reached"));
    }
    Ok(results)
}

/// One eigenpair per phase at a single amplitude.
pub fn trace_isola(
    model: &DispersionModel,
    isola: &IsolaModel,
    epsilon: f64,
    thetas: &[f64],
    n_modes: Option<usize>,
) -> Result<Vec<EigenPair>> {
    trace_isola_with(Execution::default(), model, isola, epsilon, thetas, n_modes)
}

pub fn trace_isola_with(
    exec: Execution,
    model: &DispersionModel,
    isola: &IsolaModel,
    epsilon: f64,
    thetas: &[f64],
    n_modes: Option<usize>,
) -> Result<Vec<EigenPair>> {
    let n_modes = match n_modes {
        Some(n) => n,
        None => default_modes(model, isola, epsilon)?,
    };
    exec::try_map(exec, thetas, |&theta| {
        continue_in_epsilon(model, isola, theta, &[epsilon], Some(n_modes)).map(|mut pairs| pairs.remove(0))
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatspec::flat_eigenvalue;

    #[test]
    fn flat_eigenpair_needs_no_iterations() {
        let model = DispersionModel::whitham(2.0);
        let wave = ffh::wave_for(&model, 0.0).unwrap();
        let n = 8;
        let mut v = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
        v[mode_index(-1, n).unwrap()] = Complex64::new(1.0, 0.0);
        let guess = EigenPair {
            lambda: flat_eigenvalue(&model, -1, 0.3).unwrap(),
            v,
            p: 0.3,
            epsilon: 0.0,
            residual: f64::INFINITY,
            pin: -1,
            n_modes: n,
            iterations: 0,
        };
        let pair = refine(&wave, 0.3, &guess, n).unwrap();
        assert_eq!(pair.iterations, 0);
        assert!(pair.residual < 1e-14);
    }

    #[test]
    fn perturbed_guess_returns_to_the_same_eigenvalue() {
        let model = DispersionModel::whitham(2.0);
        let wave = ffh::wave_for(&model, 0.05).unwrap();
        let matrix = assemble(&wave, 0.3, 12).unwrap();
        let (lambda, v) = polish_eigenvalue(&matrix, flat_eigenvalue(&model, 2, 0.3).unwrap()).unwrap();
        let pin = dominant_index(&v);
        let shifted = solve_pinned(&matrix, lambda + Complex64::new(1e-6, 1e-6), &v, pin).unwrap();
        assert!((shifted.lambda - lambda).norm() < 1e-13);
    }
}

//! Small-amplitude periodic traveling waves.
//!
//! A wave `u(x - c t)` solves `-c u' + L u + (u^2)' = 0`. Its Fourier
//! coefficients are real and even (`u_{-n} = u_n`), the mean is zero and the
//! amplitude is fixed by pinning `u_1 = epsilon / 2`, i.e. the `cos x`
//! coefficient equals `epsilon`.

use std::sync::atomic::{AtomicBool, Ordering};

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};

/// Threshold on `|c0 - cp(n)|` below which a harmonic counts as resonant.
pub const RESONANCE_TOL: f64 = 1e-10;
/// Residual that a Galerkin wave must reach.
pub const GALERKIN_TOL: f64 = 1e-12;
const GALERKIN_MAX_ITER: usize = 50;
/// Modes used when evaluating the traveling-wave residual.
const RESIDUAL_MODES: usize = 64;

/// How the wave was obtained.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum WaveSource {
    /// Power series in the amplitude truncated after `order` terms.
    /// `cos_coeffs[j - 1][n]` is the coefficient of `epsilon^j cos(n x)` and
    /// `c_series[j]` the coefficient of `epsilon^j` in the speed.
    Expansion {
        order: usize,
        cos_coeffs: Vec<Vec<f64>>,
        c_series: Vec<f64>,
    },
    /// Newton solution of the Galerkin truncation on `n_modes` harmonics.
    Galerkin { n_modes: usize, iterations: usize },
}

#[derive(Debug, Clone, Serialize)]
pub struct StokesWave {
    pub model: DispersionModel,
    pub epsilon: f64,
    /// Wave speed at this amplitude.
    pub c: f64,
    /// Fourier coefficients `u_0, u_1, ..., u_N` of the assembled wave.
    pub coeffs: Vec<f64>,
    pub source: WaveSource,
}

impl StokesWave {
    /// Fourier coefficient of mode `n`, zero outside the stored range.
    pub fn coefficient(&self, n: i64) -> f64 {
        self.coeffs.get(n.unsigned_abs() as usize).copied().unwrap_or(0.0)
    }

    /// Highest harmonic whose coefficient is not negligible next to `u_1`.
    pub fn significant_modes(&self) -> usize {
        let scale = self.coeffs.get(1).map_or(0.0, |u| u.abs());
        if scale == 0.0 {
            return 0;
        }
        self.coeffs
            .iter()
            .rposition(|u| u.abs() > 1e-16 * scale)
            .unwrap_or(0)
    }

    /// Sup-norm of `-c u' + L u + (u^2)'` sampled on a uniform grid.
    pub fn residual(&self) -> Result<f64> {
        traveling_wave_residual(&self.model, &self.coeffs, self.c)
    }

    /// JSON record `{family, params, epsilon, c, coeffs}`.
    pub fn to_json(&self) -> serde_json::Value {
        let params: serde_json::Map<String, serde_json::Value> = self
            .model
            .params()
            .into_iter()
            .map(|(k, v)| {
                let value = if v.is_finite() { serde_json::json!(v) } else { serde_json::json!("inf") };
                (k.to_string(), value)
            })
            .collect();
        serde_json::json!({
            "family": self.model.family(),
            "params": params,
            "epsilon": self.epsilon,
            "c": self.c,
            "coeffs": self.coeffs,
        })
    }
}

/// `sum_m a_m b_{n-m}` for even real sequences stored as `a_0, a_1, ...`.
fn even_convolution(a: &[f64], b: &[f64], n: i64) -> f64 {
    let ma = a.len() as i64 - 1;
    let mb = b.len() as i64 - 1;
    let lo = (-ma).max(n - mb);
    let hi = ma.min(n + mb);
    (lo..=hi)
        .map(|m| a[m.unsigned_abs() as usize] * b[(n - m).unsigned_abs() as usize])
        .sum()
}

fn phase_velocities(model: &DispersionModel, highest: usize) -> Result<Vec<f64>> {
    // The mean mode is gauged away and never divided by.
    std::iter::once(Ok(0.0))
        .chain((1..=highest).map(|n| model.phase_velocity(n as f64)))
        .collect()
}

fn check_resonance(model: &DispersionModel, highest: usize) -> Result<Vec<f64>> {
    let c0 = model.c0();
    let cp = phase_velocities(model, highest)?;
    if let Some(n) = (2..=highest).find(|&n| (c0 - cp[n]).abs() < RESONANCE_TOL) {
        return Err(Error::WiltonResonance { mode: n, gap: c0 - cp[n] });
    }
    Ok(cp)
}

/// Power-series wave through `epsilon^order`.
///
/// At order `j` the harmonic `n != 1` of `u_j` follows by division by
/// `cp(n) - c0`, and the `cos x` projection of order `j + 1` fixes `c_j`.
pub fn stokes_expand(model: &DispersionModel, epsilon: f64, order: usize) -> Result<StokesWave> {
    if order < 2 {
        return Err(Error::Config(format!("expansion order must be at least 2, got {order}")));
    }
    let c0 = model.c0();
    let cp = check_resonance(model, order)?;

    // orders[j][n] = coefficient of epsilon^j in u_n, for n = 0..=j.
    let mut orders: Vec<Vec<f64>> = vec![Vec::new(), vec![0.0, 0.5]];
    let mut speeds = vec![c0];
    for j in 2..=order + 1 {
        let products: Vec<f64> = (0..=j)
            .map(|n| (1..j).map(|i| even_convolution(&orders[i], &orders[j - i], n as i64)).sum())
            .collect();
        // Solvability at this order fixes the speed correction one order down.
        speeds.push(2.0 * products[1]);
        if j > order {
            break;
        }
        let mut u = vec![0.0; j + 1];
        for n in 2..=j {
            let drift: f64 = (1..=j - 2)
                .map(|i| speeds[i] * orders[j - i].get(n).copied().unwrap_or(0.0))
                .sum();
            u[n] = (drift - products[n]) / (cp[n] - c0);
        }
        orders.push(u);
    }

    let mut coeffs = vec![0.0; order + 1];
    for (j, u) in orders.iter().enumerate().skip(1) {
        let scale = epsilon.powi(j as i32);
        for (n, value) in u.iter().enumerate() {
            coeffs[n] += scale * value;
        }
    }
    let c = speeds.iter().enumerate().map(|(j, cj)| cj * epsilon.powi(j as i32)).sum();
    let cos_coeffs = orders[1..]
        .iter()
        .map(|u| u.iter().enumerate().map(|(n, v)| if n == 0 { *v } else { 2.0 * v }).collect())
        .collect();
    Ok(StokesWave {
        model: *model,
        epsilon,
        c,
        coeffs,
        source: WaveSource::Expansion {
            order,
            cos_coeffs,
            c_series: speeds,
        },
    })
}

/// Galerkin equations `(cp(n) - c) u_n + (u^2)_n` for `n = 1..=N`.
fn galerkin_defect(cp: &[f64], coeffs: &[f64], c: f64) -> Vec<f64> {
    (1..coeffs.len())
        .map(|n| (cp[n] - c) * coeffs[n] + even_convolution(coeffs, coeffs, n as i64))
        .collect()
}

fn sup_norm(values: &[f64]) -> f64 {
    values.iter().fold(0.0, |acc, v| acc.max(v.abs()))
}

/// Newton solution of the Galerkin truncation on harmonics `1..=n_modes`,
/// started from the second-order expansion.
pub fn stokes_numeric(model: &DispersionModel, epsilon: f64, n_modes: usize) -> Result<StokesWave> {
    if n_modes < 16 {
        return Err(Error::Config(format!("Galerkin waves need at least 16 modes, got {n_modes}")));
    }
    // The amplitude-dependent speed detunes a resonant harmonic, so the
    // Galerkin system stays solvable where the expansion breaks down.
    let cp = phase_velocities(model, n_modes)?;
    let c0 = model.c0();
    if let Some(n) = (2..=n_modes).find(|&n| (c0 - cp[n]).abs() < RESONANCE_TOL) {
        static WARNED: AtomicBool = AtomicBool::new(false);
        if !WARNED.swap(true, Ordering::Relaxed) {
            log::warn!("harmonic {n} is resonant with the carrier; the Galerkin wave carries a Wilton ripple");
        }
    }
    let guess = stokes_expand(model, epsilon, 2)?;
    let mut coeffs = vec![0.0; n_modes + 1];
    coeffs[..guess.coeffs.len()].copy_from_slice(&guess.coeffs);
    coeffs[1] = epsilon / 2.0;
    let mut c = guess.c;

    // Unknowns: u_2..u_N and c. Equations: harmonics 1..N.
    let mut defect = galerkin_defect(&cp, &coeffs, c);
    let mut iterations = 0;
    while iterations < GALERKIN_MAX_ITER && sup_norm(&defect) > 0.0 {
        let size = n_modes;
        let jac = DMatrix::from_fn(size, size, |row, col| {
            let n = row as i64 + 1;
            if col == size - 1 {
                return -coeffs[n as usize];
            }
            let k = col as i64 + 2;
            let coupling = |idx: i64| coeffs.get(idx.unsigned_abs() as usize).copied().unwrap_or(0.0);
            let diagonal = if n == k { cp[n as usize] - c } else { 0.0 };
            diagonal + 2.0 * (coupling(n - k) + coupling(n + k))
        });
        let rhs = -DVector::from_vec(defect.clone());
        let step = jac
            .lu()
            .solve(&rhs)
            .ok_or(Error::ContinuationFailure { residual: sup_norm(&defect) })?;
        for (i, value) in step.iter().take(size - 1).enumerate() {
            coeffs[i + 2] += value;
        }
        c += step[size - 1];
        iterations += 1;
        let next = galerkin_defect(&cp, &coeffs, c);
        let stalled = sup_norm(&next) >= sup_norm(&defect);
        defect = next;
        let step_size = step.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
        if stalled || step_size <= 4.0 * f64::EPSILON * c.abs().max(epsilon) {
            break;
        }
    }
    let residual = sup_norm(&defect);
    if !residual.is_finite() || residual > GALERKIN_TOL {
        return Err(Error::ContinuationFailure { residual });
    }
    Ok(StokesWave {
        model: *model,
        epsilon,
        c,
        coeffs,
        source: WaveSource::Galerkin { n_modes, iterations },
    })
}

/// Sup-norm over `x` of `-c u' + L u + (u^2)'` for the even wave with the given
/// Fourier coefficients, evaluated pseudospectrally.
pub fn traveling_wave_residual(model: &DispersionModel, coeffs: &[f64], c: f64) -> Result<f64> {
    let highest = (2 * coeffs.len().saturating_sub(1)).max(RESIDUAL_MODES);
    // Harmonic n of the residual is i n r_n with r_n = (cp(n) - c) u_n + (u^2)_n.
    let mut weights = Vec::with_capacity(highest);
    for n in 1..=highest {
        let u = coeffs.get(n).copied().unwrap_or(0.0);
        let linear = if u == 0.0 { 0.0 } else { (model.phase_velocity(n as f64)? - c) * u };
        let r = linear + even_convolution(coeffs, coeffs, n as i64);
        weights.push(n as f64 * r);
    }
    let points = 4 * highest;
    let sup = (0..points)
        .map(|j| {
            let x = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
            let value: f64 = weights
                .iter()
                .enumerate()
                .map(|(i, w)| -2.0 * w * ((i + 1) as f64 * x).sin())
                .sum();
            value.abs()
        })
        .fold(0.0, f64::max);
    Ok(sup)
}

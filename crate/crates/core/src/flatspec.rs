//! Spectrum of the zero-amplitude state and its eigenvalue collisions.
//!
//! Linearizing about `u = 0` in the frame moving with speed `c0 = omega(1)`,
//! the Bloch mode `exp(i (k + p) x)` has eigenvalue
//! `lambda0(k, p) = i (c0 (k + p) - omega(k + p))`. Collisions of two such
//! eigenvalues at the same Floquet exponent seed instabilities once the
//! amplitude is switched on.

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::exec::{self, Execution};
use crate::hf_asymptotics;

/// Collision residual that refined roots must reach, relative to the size of
/// the frequencies involved.
pub const COLLISION_TOL: f64 = 1e-12;
/// Roots closer than this to `p = 0` or `p = 1` belong to the modulational
/// (Benjamin-Feir) family and are not reported as high-frequency collisions.
pub const EDGE_EXCLUSION: f64 = 1e-8;
/// Relative threshold under which two group velocities count as equal.
const DEGENERATE_CG_TOL: f64 = 1e-10;

/// Eigenvalue of the Bloch mode `k` at Floquet exponent `p` on the flat state.
pub fn flat_eigenvalue(model: &DispersionModel, k: i64, p: f64) -> Result<Complex64> {
    let q = k as f64 + p;
    Ok(Complex64::new(0.0, -model.comoving_frequency(q)?))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Collision {
    pub k1: i64,
    pub k2: i64,
    /// Resonance order `k2 - k1`.
    pub m: u32,
    pub p0: f64,
    pub lambda0: Complex64,
    /// Opposite Krein signatures: the collision can destabilize.
    pub krein_negative: bool,
    /// Comoving group velocities at `k1 + p0` and `k2 + p0`.
    pub cg1: f64,
    pub cg2: f64,
    /// The two group velocities coincide and the asymptotic solvability
    /// system is singular.
    pub degenerate: bool,
}

impl Collision {
    pub fn q1(&self) -> f64 {
        self.k1 as f64 + self.p0
    }

    pub fn q2(&self) -> f64 {
        self.k2 as f64 + self.p0
    }

    /// Difference of the comoving group velocities, `cg2 - cg1`.
    pub fn cg_gap(&self) -> f64 {
        self.cg2 - self.cg1
    }

    /// The mirror collision at Floquet exponent `-p0`, shifted into `[0, 1)`:
    /// modes `-k2 - 1 < -k1 - 1` at `1 - p0`.
    pub fn mirrored(&self) -> (i64, i64, f64) {
        (-self.k2 - 1, -self.k1 - 1, 1.0 - self.p0)
    }
}

/// Search window for [`find_collisions`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CollisionSearch {
    pub k_min: i64,
    pub k_max: i64,
    /// Number of grid intervals on `p in [0, 1]`.
    pub grid: usize,
}

impl Default for CollisionSearch {
    fn default() -> Self {
        CollisionSearch {
            k_min: -20,
            k_max: 20,
            grid: 10_000,
        }
    }
}

/// `Lambda(k1 + p) - Lambda(k2 + p)` with `Lambda(q) = omega(q) - c0 q`.
fn collision_residual(model: &DispersionModel, k1: i64, k2: i64, p: f64) -> Result<f64> {
    Ok(model.comoving_frequency(k1 as f64 + p)? - model.comoving_frequency(k2 as f64 + p)?)
}

fn residual_scale(model: &DispersionModel, k1: i64, k2: i64, p: f64) -> f64 {
    let w1 = model.omega(k1 as f64 + p).unwrap_or(0.0).abs();
    let w2 = model.omega(k2 as f64 + p).unwrap_or(0.0).abs();
    1f64.max(w1).max(w2)
}

/// Refines a sign change of `f` on `[a, b]` by secant steps safeguarded with
/// bisection.
fn refine_root(f: impl Fn(f64) -> Result<f64>, mut a: f64, mut b: f64, mut fa: f64, mut fb: f64) -> Result<f64> {
    for _ in 0..200 {
        if fa == 0.0 {
            return Ok(a);
        }
        if fb == 0.0 {
            return Ok(b);
        }
        let mid = 0.5 * (a + b);
        if (b - a) <= 2.0 * f64::EPSILON * mid.abs().max(1e-300) {
            return Ok(if fa.abs() < fb.abs() { a } else { b });
        }
        let secant = b - fb * (b - a) / (fb - fa);
        let width = b - a;
        // Fall back to bisection when the secant point leaves the bracket or
        // crowds an endpoint.
        let x = if secant > a + 0.01 * width && secant < b - 0.01 * width { secant } else { mid };
        let fx = f(x)?;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
    }
    Ok(if fa.abs() < fb.abs() { a } else { b })
}

/// Evaluation point on the grid, nudged inside the open interval at the ends so
/// that symbols with a jump at zero stay evaluable.
fn grid_point(j: usize, grid: usize) -> f64 {
    const NUDGE: f64 = 1e-13;
    match j {
        0 => NUDGE,
        j if j == grid => 1.0 - NUDGE,
        j => j as f64 / grid as f64,
    }
}

fn krein_negative(model: &DispersionModel, collision: &Collision) -> bool {
    let signature_test = collision.q2() / collision.q1() < 0.0;
    if collision.m == 2 {
        if let Ok(coeffs) = hf_asymptotics::quartet_coeffs(model, collision) {
            return coeffs.g / coeffs.e > 0.0;
        }
    }
    signature_test
}

fn collisions_for_pair(model: &DispersionModel, k1: i64, m: u32, grid: usize) -> Result<Vec<Collision>> {
    let k2 = k1 + m as i64;
    let f = |p: f64| collision_residual(model, k1, k2, p);
    let values = (0..=grid)
        .map(|j| {
            let p = grid_point(j, grid);
            f(p).map(|r| (p, r))
        })
        .collect::<Result<Vec<_>>>()?;
    let c0 = model.c0();
    let mut found = Vec::new();
    for pair in values.windows(2) {
        let (a, fa) = pair[0];
        let (b, fb) = pair[1];
        // An exact zero on the grid is reported once, as the right end of its interval.
        let p0 = if fb == 0.0 {
            b
        } else if fa != 0.0 && fa.signum() != fb.signum() {
            refine_root(f, a, b, fa, fb)?
        } else {
            continue;
        };
        if p0 < EDGE_EXCLUSION || p0 > 1.0 - EDGE_EXCLUSION {
            continue;
        }
        let residual = f(p0)?.abs();
        if residual > COLLISION_TOL * residual_scale(model, k1, k2, p0) {
            log::debug!("discarding unconverged collision candidate k1={k1} p0={p0} residual={residual:e}");
            continue;
        }
        if found.iter().any(|c: &Collision| (c.p0 - p0).abs() < 1e-12) {
            continue;
        }
        let cg1 = model.group_velocity(k1 as f64 + p0)? - c0;
        let cg2 = model.group_velocity(k2 as f64 + p0)? - c0;
        let degenerate = (cg2 - cg1).abs() <= DEGENERATE_CG_TOL * cg1.abs().max(cg2.abs()).max(1.0);
        let mut collision = Collision {
            k1,
            k2,
            m,
            p0,
            lambda0: flat_eigenvalue(model, k1, p0)?,
            krein_negative: false,
            cg1,
            cg2,
            degenerate,
        };
        if degenerate {
            log::warn!("collision k1={k1} k2={k2} p0={p0} has equal group velocities");
        }
        collision.krein_negative = krein_negative(model, &collision);
        found.push(collision);
    }
    Ok(found)
}

/// All collisions `lambda0(k1, p0) = lambda0(k1 + m, p0)` with `k1` and `k1 + m`
/// inside the search window and `p0` strictly inside `(0, 1)`.
pub fn find_collisions(model: &DispersionModel, m: u32, search: &CollisionSearch) -> Result<Vec<Collision>> {
    find_collisions_with(Execution::default(), model, m, search)
}

pub fn find_collisions_with(
    exec: Execution,
    model: &DispersionModel,
    m: u32,
    search: &CollisionSearch,
) -> Result<Vec<Collision>> {
    if m == 0 {
        return Err(Error::Config("resonance order must be at least 1".into()));
    }
    if search.grid < 2 || search.k_max < search.k_min {
        return Err(Error::Config("empty collision search window".into()));
    }
    let k1_values: Vec<i64> = (search.k_min..=search.k_max - m as i64).collect();
    let per_pair = exec::try_map(exec, &k1_values, |&k1| collisions_for_pair(model, k1, m, search.grid))?;
    let mut all: Vec<Collision> = per_pair.into_iter().flatten().collect();
    all.sort_by(|a, b| a.k1.cmp(&b.k1).then(a.p0.total_cmp(&b.p0)));
    Ok(all)
}

/// Wavenumbers `k` in the window whose flat eigenvalue vanishes at `p = 0`,
/// i.e. the modes of the zero eigenvalue from which the modulational
/// instability bifurcates. For symbols with a jump at zero the mode `k = 0`
/// is tested from the right.
pub fn origin_resonances(model: &DispersionModel, k_min: i64, k_max: i64) -> Result<Vec<i64>> {
    let mut modes = Vec::new();
    for k in k_min..=k_max {
        let value = if k == 0 && model.omega(0.0).is_err() {
            // One-sided limit of the comoving frequency at zero.
            model.omega(f64::MIN_POSITIVE)?
        } else {
            model.comoving_frequency(k as f64)?
        };
        if value.abs() <= COLLISION_TOL * residual_scale(model, k, k, 0.0) {
            modes.push(k);
        }
    }
    Ok(modes)
}

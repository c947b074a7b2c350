//! Closed-form asymptotics of high-frequency instabilities.
//!
//! A collision of the flat modes `k1 < k2` at Floquet exponent `p0` perturbs,
//! for small amplitude `epsilon`, into a curve of eigenvalues
//! `lambda0 + epsilon^m lambda_m(theta)` at Floquet exponents
//! `p0 + epsilon^m p_m(theta)`, where `theta` is the phase of the weight `beta`
//! of the `k2` mode in the leading eigenfunction `phi_1 + beta phi_2`.
//! Triads (`k2 = k1 + 1`) give ellipses of size `O(epsilon)`, quartets
//! (`k2 = k1 + 2`) ellipses of size `O(epsilon^2)` whose centres drift along the
//! imaginary axis. Wider gaps only shift the eigenvalue along the imaginary
//! axis at second order.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::dispersion::DispersionModel;
use crate::error::{Error, Result};
use crate::flatspec::{flat_eigenvalue, Collision};
use crate::stokes::RESONANCE_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum IsolaKind {
    Triad,
    Quartet,
    HigherOrder,
}

/// Asymptotic isola `lambda(theta) = lambda0 + epsilon^order lambda_order(theta)`
/// with
///
/// ```text
/// Re lambda_order = re_amp sin(theta)
/// Im lambda_order = im_amp cos(theta) + center_shift
/// p_order         = p_amp cos(theta) + p_shift
/// ```
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolaModel {
    pub collision: Collision,
    pub kind: IsolaKind,
    pub order: u32,
    /// Modulus of `beta`.
    pub rho: f64,
    pub center_shift: f64,
    pub re_amp: f64,
    pub im_amp: f64,
    pub p_amp: f64,
    pub p_shift: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IsolaPoint {
    pub theta: f64,
    pub lambda: Complex64,
    pub p: f64,
}

impl IsolaModel {
    /// `(lambda_order(theta), p_order(theta))`.
    pub fn correction(&self, theta: f64) -> (Complex64, f64) {
        let (s, c) = theta.sin_cos();
        let lambda = Complex64::new(self.re_amp * s, self.im_amp * c + self.center_shift);
        (lambda, self.p_amp * c + self.p_shift)
    }

    pub fn eigenvalue(&self, epsilon: f64, theta: f64) -> Complex64 {
        self.collision.lambda0 + self.correction(theta).0 * epsilon.powi(self.order as i32)
    }

    pub fn floquet_exponent(&self, epsilon: f64, theta: f64) -> f64 {
        self.collision.p0 + self.correction(theta).1 * epsilon.powi(self.order as i32)
    }

    /// Center of the isola in the spectral plane.
    pub fn center(&self, epsilon: f64) -> Complex64 {
        self.collision.lambda0 + Complex64::new(0.0, self.center_shift * epsilon.powi(self.order as i32))
    }

    /// Floquet exponents covered by the isola, `(lowest, highest)`.
    pub fn floquet_band(&self, epsilon: f64) -> (f64, f64) {
        let scale = epsilon.powi(self.order as i32);
        let mid = self.collision.p0 + self.p_shift * scale;
        let half = self.p_amp.abs() * scale;
        (mid - half, mid + half)
    }

    pub fn point(&self, epsilon: f64, theta: f64) -> IsolaPoint {
        IsolaPoint {
            theta,
            lambda: self.eigenvalue(epsilon, theta),
            p: self.floquet_exponent(epsilon, theta),
        }
    }

    /// Weight of the `k2` mode relative to the `k1` mode in the leading-order
    /// eigenfunction at this `theta`.
    pub fn beta(&self, theta: f64) -> Complex64 {
        match self.kind {
            // The triad parameterization runs through beta in the clockwise sense.
            IsolaKind::Triad => Complex64::from_polar(self.rho, -theta),
            IsolaKind::Quartet | IsolaKind::HigherOrder => Complex64::from_polar(self.rho, theta),
        }
    }

    /// `n_theta` points at uniformly spaced `theta in [0, 2 pi)`.
    pub fn sample(&self, epsilon: f64, n_theta: usize) -> Vec<IsolaPoint> {
        (0..n_theta)
            .map(|j| self.point(epsilon, 2.0 * PI * j as f64 / n_theta as f64))
            .collect()
    }

    /// Largest real part over the isola divided by `epsilon^order`.
    pub fn growth_coefficient(&self) -> f64 {
        self.re_amp.abs()
    }

    pub fn max_growth(&self, epsilon: f64) -> f64 {
        self.growth_coefficient() * epsilon.powi(self.order as i32)
    }

    /// Phase at which the real part is largest.
    pub fn most_unstable_theta(&self) -> f64 {
        if self.re_amp >= 0.0 {
            PI / 2.0
        } else {
            3.0 * PI / 2.0
        }
    }
}

fn check_group_velocities(collision: &Collision) -> Result<f64> {
    if collision.degenerate || collision.cg_gap() == 0.0 {
        return Err(Error::DegenerateGroupVelocity {
            p0: collision.p0,
            cg: collision.cg1,
        });
    }
    Ok(collision.cg_gap())
}

/// First-order isola of a triad collision (`k2 = k1 + 1`).
pub fn triad_isola(collision: &Collision) -> Result<IsolaModel> {
    if collision.m != 1 {
        return Err(Error::Config(format!("triad isola needs a gap of 1, got {}", collision.m)));
    }
    let gap = check_group_velocities(collision)?;
    let (q1, q2) = (collision.q1(), collision.q2());
    let ratio = -q2 / q1;
    if ratio <= 0.0 {
        return Err(Error::StableCollision { p0: collision.p0 });
    }
    let rho = ratio.sqrt();
    let (g1, g2) = (collision.cg1, collision.cg2);
    Ok(IsolaModel {
        collision: *collision,
        kind: IsolaKind::Triad,
        order: 1,
        rho,
        center_shift: 0.0,
        re_amp: -(rho * q1 * g2 + g1 * q2 / rho) / gap,
        im_amp: (-rho * q1 * g2 + g1 * q2 / rho) / gap,
        p_amp: (rho * q1 - q2 / rho) / gap,
        p_shift: 0.0,
    })
}

/// Coefficients of the second-order solvability conditions of a quartet.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuartetCoeffs {
    pub alpha1_plus: f64,
    pub alpha1_minus: f64,
    pub alpha2_plus: f64,
    pub alpha2_minus: f64,
    pub a: f64,
    pub b: f64,
    pub c: f64,
    pub d: f64,
    pub e: f64,
    pub f: f64,
    pub g: f64,
    /// Second-order speed correction of the carrier wave.
    pub c2: f64,
}

/// Weights of the modes `k + 1` and `k - 1` excited at first order by the
/// mode `k`: `-i (q +- 1) / (lambda0(k) - lambda0(k +- 1))`, real because both
/// flat eigenvalues are imaginary.
fn sideband_weights(model: &DispersionModel, k: i64, p0: f64) -> Result<(f64, f64)> {
    let here = flat_eigenvalue(model, k, p0)?.im;
    let weight = |shift: i64| -> Result<f64> {
        let gap = here - flat_eigenvalue(model, k + shift, p0)?.im;
        if gap.abs() < RESONANCE_TOL {
            return Err(Error::SecondaryResonance {
                q: k as f64 + p0,
                neighbour: (k + shift) as f64 + p0,
            });
        }
        // -i x / (i gap) = -x / gap
        Ok(-((k + shift) as f64 + p0) / gap)
    };
    Ok((weight(1)?, weight(-1)?))
}

/// Second-order speed correction `1 / (2 (c0 - cp(2)))` of the carrier.
pub fn speed_correction(model: &DispersionModel) -> Result<f64> {
    let gap = model.c0() - model.phase_velocity(2.0)?;
    if gap.abs() < RESONANCE_TOL {
        return Err(Error::WiltonResonance { mode: 2, gap });
    }
    Ok(1.0 / (2.0 * gap))
}

/// Solvability coefficients of a quartet collision (`k2 = k1 + 2`).
///
/// The interaction constant `d` is the second-harmonic amplitude of the
/// carrier, which equals the speed correction `c2`.
pub fn quartet_coeffs(model: &DispersionModel, collision: &Collision) -> Result<QuartetCoeffs> {
    if collision.m != 2 {
        return Err(Error::Config(format!("quartet coefficients need a gap of 2, got {}", collision.m)));
    }
    let gap = check_group_velocities(collision)?;
    let (q1, q2) = (collision.q1(), collision.q2());
    let (g1, g2) = (collision.cg1, collision.cg2);
    let (alpha1_plus, alpha1_minus) = sideband_weights(model, collision.k1, collision.p0)?;
    let (alpha2_plus, alpha2_minus) = sideband_weights(model, collision.k2, collision.p0)?;
    let c2 = speed_correction(model)?;
    let d = c2;
    let self1 = alpha1_plus + alpha1_minus - c2;
    let self2 = alpha2_plus + alpha2_minus - c2;
    let coeffs = QuartetCoeffs {
        alpha1_plus,
        alpha1_minus,
        alpha2_plus,
        alpha2_minus,
        a: -g2 * q1 * (alpha2_minus + d) / gap,
        b: (-g2 * q1 * self1 + g1 * q2 * self2) / gap,
        c: g1 * q2 * (alpha1_plus + d) / gap,
        d,
        e: q1 * (alpha2_minus + d) / gap,
        f: (q1 * self1 - q2 * self2) / gap,
        g: -q2 * (alpha1_plus + d) / gap,
        c2,
    };
    if coeffs.e == 0.0 {
        return Err(Error::DegenerateQuartet);
    }
    Ok(coeffs)
}

/// Second-order isola of a quartet collision; requires `G/E > 0`.
pub fn quartet_isola(coeffs: &QuartetCoeffs, collision: &Collision) -> Result<IsolaModel> {
    let ratio = coeffs.g / coeffs.e;
    if !(ratio > 0.0) {
        return Err(Error::StableCollision { p0: collision.p0 });
    }
    let rho = ratio.sqrt();
    Ok(IsolaModel {
        collision: *collision,
        kind: IsolaKind::Quartet,
        order: 2,
        rho,
        center_shift: coeffs.b,
        re_amp: -coeffs.a * rho + coeffs.c / rho,
        im_amp: coeffs.a * rho + coeffs.c / rho,
        p_amp: coeffs.e * rho + coeffs.g / rho,
        p_shift: coeffs.f,
    })
}

/// Second-order corrections `(lambda2, p2)` for a collision with gap `m >= 3`.
/// Both are independent of `beta`, and `lambda2` is purely imaginary.
pub fn higher_order_corrections(model: &DispersionModel, collision: &Collision) -> Result<(Complex64, f64)> {
    if collision.m < 3 {
        return Err(Error::Config(format!("higher-order corrections need a gap of at least 3, got {}", collision.m)));
    }
    let gap = check_group_velocities(collision)?;
    let (q1, q2) = (collision.q1(), collision.q2());
    let (g1, g2) = (collision.cg1, collision.cg2);
    let (alpha1_plus, alpha1_minus) = sideband_weights(model, collision.k1, collision.p0)?;
    let (alpha2_plus, alpha2_minus) = sideband_weights(model, collision.k2, collision.p0)?;
    let c2 = speed_correction(model)?;
    let self1 = alpha1_plus + alpha1_minus - c2;
    let self2 = alpha2_plus + alpha2_minus - c2;
    let shift = (-q1 * g2 * self1 + g1 * q2 * self2) / gap;
    let p2 = (q1 * self1 - q2 * self2) / gap;
    Ok((Complex64::new(0.0, shift), p2))
}

/// The degenerate "isola" of a gap `m >= 3` collision: a single point drifting
/// along the imaginary axis.
pub fn higher_order_isola(model: &DispersionModel, collision: &Collision) -> Result<IsolaModel> {
    let (lambda2, p2) = higher_order_corrections(model, collision)?;
    Ok(IsolaModel {
        collision: *collision,
        kind: IsolaKind::HigherOrder,
        order: 2,
        rho: 1.0,
        center_shift: lambda2.im,
        re_amp: 0.0,
        im_amp: 0.0,
        p_amp: 0.0,
        p_shift: p2,
    })
}

/// Asymptotic model appropriate to the collision's gap.
pub fn isola_for(model: &DispersionModel, collision: &Collision) -> Result<IsolaModel> {
    match collision.m {
        1 => triad_isola(collision),
        2 => quartet_isola(&quartet_coeffs(model, collision)?, collision),
        _ => higher_order_isola(model, collision),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::flatspec::{find_collisions, CollisionSearch};

    fn collision_near(model: &DispersionModel, m: u32, p0: f64) -> Collision {
        find_collisions(model, m, &CollisionSearch::default())
            .unwrap()
            .into_iter()
            .find(|c| (c.p0 - p0).abs() < 1e-3 && c.krein_negative)
            .unwrap()
    }

    #[test]
    fn triad_display_matches_complex_solution() {
        let model = DispersionModel::akers_milewski(2.0);
        let col = collision_near(&model, 1, 0.1464);
        let isola = triad_isola(&col).unwrap();
        let (q1, q2, g1, g2) = (col.q1(), col.q2(), col.cg1, col.cg2);
        for j in 0..16 {
            let theta = 0.4 * j as f64;
            let beta = isola.beta(theta);
            let i = Complex64::i();
            let lambda1 = i * (g1 * q2 - beta * beta * q1 * g2) / (beta * (g2 - g1));
            let p1 = (beta * q1 - q2 / beta) / (g2 - g1);
            let (lam, p) = isola.correction(theta);
            assert!((lam - lambda1).norm() < 1e-12);
            assert!((p1 - p).norm() < 1e-12);
        }
    }

    #[test]
    fn quartet_display_matches_complex_solution() {
        let model = DispersionModel::kawahara(1.0, -0.25);
        let col = collision_near(&model, 2, 0.3675);
        let k = quartet_coeffs(&model, &col).unwrap();
        let isola = quartet_isola(&k, &col).unwrap();
        for j in 0..16 {
            let theta = 0.4 * j as f64;
            let beta = isola.beta(theta);
            let lambda2 = Complex64::i() * (k.a * beta * beta + k.b * beta + k.c) / beta;
            let p2 = (k.e * beta * beta + k.f * beta + k.g) / beta;
            let (lam, p) = isola.correction(theta);
            assert!((lam - lambda2).norm() < 1e-12);
            assert!((p2.re - p).abs() < 1e-12 && p2.im.abs() < 1e-12);
        }
    }
}

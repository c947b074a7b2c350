//! Dispersion relations of the supported model equations.
//!
//! Every model has the form `u_t + L u + (u^2)_x = 0` where `L` is the Fourier
//! multiplier with symbol `i omega(k)` and `omega` is real and odd.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Below this value of `|k h|` the factor `tanh(kh)/(kh)` is evaluated by its series.
const SERIES_CUTOFF: f64 = 1e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    Kawahara,
    Whitham,
    CapillaryWhitham,
    AkersMilewski,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Smoothness {
    Smooth,
    DiscontinuousAtZero,
}

/// A dispersion relation together with its parameters.
///
/// Depth `h = f64::INFINITY` selects the deep-water branch of the Whitham-type
/// symbols.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DispersionModel {
    Kawahara { a: f64, b: f64 },
    Whitham { depth: f64 },
    CapillaryWhitham { depth: f64, sigma: f64 },
    AkersMilewski { sigma: f64 },
}

impl DispersionModel {
    pub fn kawahara(a: f64, b: f64) -> Self {
        DispersionModel::Kawahara { a, b }
    }

    pub fn whitham(depth: f64) -> Self {
        DispersionModel::Whitham { depth }
    }

    pub fn capillary_whitham(depth: f64, sigma: f64) -> Self {
        DispersionModel::CapillaryWhitham { depth, sigma }
    }

    pub fn akers_milewski(sigma: f64) -> Self {
        DispersionModel::AkersMilewski { sigma }
    }

    pub fn family(&self) -> Family {
        match self {
            DispersionModel::Kawahara { .. } => Family::Kawahara,
            DispersionModel::Whitham { .. } => Family::Whitham,
            DispersionModel::CapillaryWhitham { .. } => Family::CapillaryWhitham,
            DispersionModel::AkersMilewski { .. } => Family::AkersMilewski,
        }
    }

    pub fn smoothness(&self) -> Smoothness {
        match self {
            DispersionModel::AkersMilewski { .. } => Smoothness::DiscontinuousAtZero,
            _ => Smoothness::Smooth,
        }
    }

    /// Named parameters in a fixed order.
    pub fn params(&self) -> Vec<(&'static str, f64)> {
        match *self {
            DispersionModel::Kawahara { a, b } => vec![("a", a), ("b", b)],
            DispersionModel::Whitham { depth } => vec![("h", depth)],
            DispersionModel::CapillaryWhitham { depth, sigma } => vec![("h", depth), ("sigma", sigma)],
            DispersionModel::AkersMilewski { sigma } => vec![("sigma", sigma)],
        }
    }

    /// Parameters formatted as `key=value` pairs separated by `;`, for CSV columns.
    pub fn params_label(&self) -> String {
        self.params()
            .iter()
            .map(|(k, v)| format!("{k}={}", format_param(*v)))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// True when the symbol is a Whitham-type symbol without finite depth.
    pub fn is_deep_water(&self) -> bool {
        match *self {
            DispersionModel::Whitham { depth } | DispersionModel::CapillaryWhitham { depth, .. } => depth.is_infinite(),
            _ => false,
        }
    }

    /// Phase speed of the carrier wave, `c0 = omega(1)`.
    pub fn c0(&self) -> f64 {
        self.omega(1.0).expect("omega is defined at k = 1 for every model")
    }

    pub fn omega(&self, k: f64) -> Result<f64> {
        match *self {
            DispersionModel::Kawahara { a, b } => Ok(a * k.powi(3) + b * k.powi(5)),
            DispersionModel::Whitham { depth } => Ok(whitham_type(k, depth, 0.0)),
            DispersionModel::CapillaryWhitham { depth, sigma } => Ok(whitham_type(k, depth, sigma)),
            DispersionModel::AkersMilewski { sigma } => {
                if k == 0.0 {
                    return Err(Error::JumpDiscontinuity { k });
                }
                Ok(k.signum() * (1.0 + sigma * k.abs()).powi(2))
            }
        }
    }

    /// `omega(k)/k`, extended continuously to `k = 0` where the limit exists.
    pub fn phase_velocity(&self, k: f64) -> Result<f64> {
        if k != 0.0 {
            return Ok(self.omega(k)? / k);
        }
        match *self {
            DispersionModel::Kawahara { .. } => Ok(0.0),
            DispersionModel::Whitham { depth } | DispersionModel::CapillaryWhitham { depth, .. } => {
                if depth.is_infinite() {
                    Err(Error::NotDifferentiable { k })
                } else {
                    Ok(depth.sqrt())
                }
            }
            DispersionModel::AkersMilewski { .. } => Err(Error::JumpDiscontinuity { k }),
        }
    }

    /// Group velocity `omega'(k)`.
    pub fn group_velocity(&self, k: f64) -> Result<f64> {
        match *self {
            DispersionModel::Kawahara { a, b } => Ok(3.0 * a * k * k + 5.0 * b * k.powi(4)),
            DispersionModel::Whitham { depth } => whitham_type_derivatives(k, depth, 0.0).map(|d| d.0),
            DispersionModel::CapillaryWhitham { depth, sigma } => whitham_type_derivatives(k, depth, sigma).map(|d| d.0),
            DispersionModel::AkersMilewski { sigma } => {
                if k == 0.0 {
                    return Err(Error::NotDifferentiable { k });
                }
                Ok(2.0 * sigma * (1.0 + sigma * k.abs()))
            }
        }
    }

    /// Second derivative `omega''(k)`.
    pub fn second_derivative(&self, k: f64) -> Result<f64> {
        match *self {
            DispersionModel::Kawahara { a, b } => Ok(6.0 * a * k + 20.0 * b * k.powi(3)),
            DispersionModel::Whitham { depth } => whitham_type_derivatives(k, depth, 0.0).map(|d| d.1),
            DispersionModel::CapillaryWhitham { depth, sigma } => whitham_type_derivatives(k, depth, sigma).map(|d| d.1),
            DispersionModel::AkersMilewski { sigma } => {
                if k == 0.0 {
                    return Err(Error::NotDifferentiable { k });
                }
                Ok(2.0 * sigma * sigma * k.signum())
            }
        }
    }

    /// Frequency seen in the frame moving with the carrier, `omega(q) - c0 q`.
    pub fn comoving_frequency(&self, q: f64) -> Result<f64> {
        Ok(self.omega(q)? - self.c0() * q)
    }

    /// Group velocity in the frame moving with the carrier, `omega'(q) - c0`.
    pub fn comoving_group_velocity(&self, q: f64) -> Result<f64> {
        Ok(self.group_velocity(q)? - self.c0())
    }
}

/// Central-difference derivative with the step `eps^(1/3) max(1, |k|)`.
pub fn central_difference(f: impl Fn(f64) -> f64, k: f64) -> f64 {
    let h = f64::EPSILON.cbrt() * k.abs().max(1.0);
    (f(k + h) - f(k - h)) / (2.0 * h)
}

/// `tanh(x)/x` with the removable singularity at zero handled by its series.
fn tanh_ratio(x: f64) -> f64 {
    if x.abs() < SERIES_CUTOFF {
        let x2 = x * x;
        1.0 - x2 / 3.0 + 2.0 * x2 * x2 / 15.0
    } else {
        x.tanh() / x
    }
}

fn whitham_type(k: f64, depth: f64, sigma: f64) -> f64 {
    let q = k.abs();
    let capillary = 1.0 + sigma * q * q;
    let magnitude = if depth.is_infinite() {
        (q * capillary).sqrt()
    } else {
        q * (depth * tanh_ratio(q * depth) * capillary).sqrt()
    };
    k.signum() * magnitude
}

/// First and second derivatives of a Whitham-type symbol, from `omega^2 = g(|k|) (1 + sigma k^2)`
/// with `g(q) = q tanh(q h)` (or `g(q) = q` in deep water).
fn whitham_type_derivatives(k: f64, depth: f64, sigma: f64) -> Result<(f64, f64)> {
    let q = k.abs();
    if q == 0.0 {
        return if depth.is_infinite() {
            Err(Error::NotDifferentiable { k })
        } else {
            Ok((depth.sqrt(), 0.0))
        };
    }
    let (g, dg, d2g) = if depth.is_infinite() {
        (q, 1.0, 0.0)
    } else {
        let x = q * depth;
        let t = x.tanh();
        let sech2 = 1.0 / x.cosh().powi(2);
        (q * t, t + x * sech2, 2.0 * depth * sech2 * (1.0 - x * t))
    };
    let s = 1.0 + sigma * q * q;
    let ds = 2.0 * sigma * q;
    let d2s = 2.0 * sigma;
    let f = g * s;
    let df = dg * s + g * ds;
    let d2f = d2g * s + 2.0 * dg * ds + g * d2s;
    let w = f.sqrt();
    let dw = df / (2.0 * w);
    let d2w = (d2f - 2.0 * dw * dw) / (2.0 * w);
    // omega' is even and omega'' is odd in k.
    Ok((dw, k.signum() * d2w))
}

fn format_param(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for DispersionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self.family() {
            Family::Kawahara => "kawahara",
            Family::Whitham => "whitham",
            Family::CapillaryWhitham => "capillarywhitham",
            Family::AkersMilewski => "akersmilewski",
        };
        let params = self
            .params()
            .iter()
            .map(|(k, v)| format!("{k}={}", format_param(*v)))
            .collect::<Vec<_>>()
            .join(",");
        write!(f, "{name}:{params}")
    }
}

fn parse_value(key: &str, raw: &str) -> Result<f64> {
    let raw = raw.trim();
    let value = match raw.to_ascii_lowercase().as_str() {
        "inf" | "+inf" | "infinity" => f64::INFINITY,
        _ => raw
            .parse::<f64>()
            .map_err(|_| Error::InvalidModel(format!("parameter {key} has non-numeric value {raw:?}")))?,
    };
    if value.is_nan() {
        return Err(Error::InvalidModel(format!("parameter {key} is NaN")));
    }
    Ok(value)
}

impl FromStr for DispersionModel {
    type Err = Error;

    /// Parses strings such as `kawahara:a=1,b=-0.25`, `whitham:h=inf,sigma=2.5`
    /// or `akersmilewski:sigma=1`. A Whitham model with a `sigma` parameter is
    /// the capillary variant; a missing depth means deep water.
    fn from_str(s: &str) -> Result<Self> {
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let mut a = None;
        let mut b = None;
        let mut depth = None;
        let mut sigma = None;
        for item in rest.split(',').map(str::trim).filter(|item| !item.is_empty()) {
            let (key, raw) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidModel(format!("expected key=value, got {item:?}")))?;
            let key = key.trim().to_ascii_lowercase();
            let value = parse_value(&key, raw)?;
            let slot = match key.as_str() {
                "a" => &mut a,
                "b" => &mut b,
                "h" | "depth" => &mut depth,
                "sigma" | "s" => &mut sigma,
                _ => return Err(Error::InvalidModel(format!("unknown parameter {key:?}"))),
            };
            if slot.replace(value).is_some() {
                return Err(Error::InvalidModel(format!("parameter {key} given twice")));
            }
        }
        let family = name.trim().to_ascii_lowercase().replace(['-', '_'], "");
        let reject = |allowed: &[&str], present: &[(&str, Option<f64>)]| -> Result<()> {
            for (key, value) in present {
                if value.is_some() && !allowed.contains(key) {
                    return Err(Error::InvalidModel(format!("parameter {key} does not apply to {family}")));
                }
            }
            Ok(())
        };
        let present = [("a", a), ("b", b), ("h", depth), ("sigma", sigma)];
        let model = match family.as_str() {
            "kawahara" => {
                reject(&["a", "b"], &present)?;
                let a = a.ok_or_else(|| Error::InvalidModel("kawahara needs a".into()))?;
                let b = b.ok_or_else(|| Error::InvalidModel("kawahara needs b".into()))?;
                DispersionModel::kawahara(a, b)
            }
            "whitham" | "capillarywhitham" => {
                reject(&["h", "sigma"], &present)?;
                let depth = depth.unwrap_or(f64::INFINITY);
                match sigma {
                    Some(sigma) => DispersionModel::capillary_whitham(depth, sigma),
                    None if family == "whitham" => DispersionModel::whitham(depth),
                    None => return Err(Error::InvalidModel("capillarywhitham needs sigma".into())),
                }
            }
            "akersmilewski" | "am" => {
                reject(&["sigma"], &present)?;
                let sigma = sigma.ok_or_else(|| Error::InvalidModel("akersmilewski needs sigma".into()))?;
                DispersionModel::akers_milewski(sigma)
            }
            other => return Err(Error::InvalidModel(format!("unknown model family {other:?}"))),
        };
        model.validate()?;
        Ok(model)
    }
}

impl DispersionModel {
    fn validate(&self) -> Result<()> {
        let finite = self.params().iter().all(|(key, v)| v.is_finite() || (*key == "h" && *v > 0.0));
        if !finite {
            return Err(Error::InvalidModel(format!("{self}: parameters must be finite")));
        }
        match *self {
            DispersionModel::Whitham { depth } | DispersionModel::CapillaryWhitham { depth, .. } if depth <= 0.0 => {
                Err(Error::InvalidModel(format!("{self}: depth must be positive")))
            }
            DispersionModel::CapillaryWhitham { sigma, .. } | DispersionModel::AkersMilewski { sigma } if sigma < 0.0 => {
                Err(Error::InvalidModel(format!("{self}: sigma must be non-negative")))
            }
            _ => Ok(()),
        }
    }
}

impl Serialize for DispersionModel {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for DispersionModel {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

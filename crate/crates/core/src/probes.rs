//! Test functions for range membership: averaged time-window factors with a
//! far-field phase `e^{-ik x̂·y}` or near-field phase `e^{ik|x−y|}`, the
//! ball-averaged variants for ε > 0, and their discretization on the τ-grid.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::spectral::FrequencyGrid;
use crate::synthesis::Observation;
use crate::vec3::Vec3;

/// Which moment of the radiating period is unknown. The known moment anchors
/// the probe's time window; η sweeps the unknown side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Regime {
    /// `t_max` unknown, window `[t_min, η]` with `η > t_min`.
    TmaxUnknown { t_min: f64 },
    /// `t_min` unknown, window `[η, t_max]` with `η < t_max`.
    TminUnknown { t_max: f64 },
}

impl Regime {
    /// Time window `[a, b]` spanned by the probe for the given η.
    pub fn window(&self, eta: f64) -> Result<(f64, f64)> {
        match *self {
            Regime::TmaxUnknown { t_min } => {
                if eta <= t_min {
                    return Err(CoreError::validation(format!(
                        "eta = {eta} must exceed the known t_min = {t_min}"
                    )));
                }
                Ok((t_min, eta))
            }
            Regime::TminUnknown { t_max } => {
                if eta >= t_max {
                    return Err(CoreError::validation(format!(
                        "eta = {eta} must lie below the known t_max = {t_max}"
                    )));
                }
                Ok((eta, t_max))
            }
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            Regime::TmaxUnknown { .. } => "tmax-unknown",
            Regime::TminUnknown { .. } => "tmin-unknown",
        }
    }
}

/// η and the ball-average radius shared by all probes of one sweep.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeParams {
    pub eta: f64,
    pub epsilon: f64,
}

impl ProbeParams {
    pub fn pointwise(eta: f64) -> Self {
        ProbeParams { eta, epsilon: 0.0 }
    }
}

/// Averaged window transform `(b−a)^{-1} ∫_a^b e^{ikt} dt`,
/// `= e^{ik(a+b)/2} sinc(k(b−a)/2)`; equals 1 at `k = 0`.
pub fn time_window_factor(window: (f64, f64), k: f64) -> Complex64 {
    let (a, b) = window;
    let half = 0.5 * k * (b - a);
    Complex64::from_polar(sinc(half), 0.5 * k * (a + b))
}

fn sinc(z: f64) -> f64 {
    if z.abs() < 1e-4 {
        let z2 = z * z;
        1.0 - z2 / 6.0 * (1.0 - z2 / 20.0)
    } else {
        z.sin() / z
    }
}

/// Mean of `e^{-ik x̂·z}` over a ball of radius ε (relative to the center
/// value): `2J₁(kε)/(kε)` in 2-d, `3(sin kε − kε cos kε)/(kε)³` in 3-d.
pub fn ball_average_factor(dim: usize, k: f64, epsilon: f64) -> f64 {
    let z = k * epsilon;
    if dim == 2 {
        if z.abs() < 1e-4 {
            let z2 = z * z;
            1.0 - z2 / 8.0 * (1.0 - z2 / 24.0)
        } else {
            2.0 * bessel_j1(z) / z
        }
    } else {
        if z.abs() < 1e-4 {
            let z2 = z * z;
            1.0 - z2 / 10.0 * (1.0 - z2 / 28.0)
        } else {
            3.0 * (z.sin() - z * z.cos()) / (z * z * z)
        }
    }
}

/// J₁ by ascending series below 12 and the standard asymptotic expansion
/// beyond; accurate to ~1e-8 everywhere, much better for small arguments.
fn bessel_j1(x: f64) -> f64 {
    let ax = x.abs();
    if ax < 12.0 {
        let half = 0.5 * x;
        let mut term = half;
        let mut sum = term;
        for m in 1..40 {
            term *= -(half * half) / (m as f64 * (m as f64 + 1.0));
            sum += term;
            if term.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let z = 8.0 / ax;
        let y = z * z;
        let p = 1.0
            + y * (0.183105e-2 + y * (-0.3516396496e-4 + y * (0.2457520174e-5 + y * -0.240337019e-6)));
        let q = 0.04687499995
            + y * (-0.2002690873e-3 + y * (0.8449199096e-5 + y * (-0.88228987e-6 + y * 0.105787412e-6)));
        let xx = ax - 2.356194491;
        let v = (2.0 / (std::f64::consts::PI * ax)).sqrt() * (xx.cos() * p - z * xx.sin() * q);
        if x < 0.0 {
            -v
        } else {
            v
        }
    }
}

/// Probe value at wavenumber `k` for the sampling point `y`: the window
/// factor times the observation phase, optionally ball-averaged over
/// `B_ε(y)`. The near-field ball average has no closed form and is evaluated
/// by midpoint quadrature over the ball.
pub fn probe_value(
    obs: &Observation,
    regime: &Regime,
    params: &ProbeParams,
    y: Vec3,
    dim: usize,
    k: f64,
) -> Result<Complex64> {
    let window = regime.window(params.eta)?;
    let tw = time_window_factor(window, k);
    match obs {
        Observation::FarField { direction } => {
            let phase = Complex64::from_polar(1.0, -k * direction.dot(y));
            if params.epsilon > 0.0 {
                Ok(tw * phase * ball_average_factor(dim, k, params.epsilon))
            } else {
                Ok(tw * phase)
            }
        }
        Observation::NearField { receiver } => {
            if receiver.dist(y) == 0.0 {
                return Err(CoreError::validation(
                    "near-field probe point coincides with the receiver",
                ));
            }
            if params.epsilon > 0.0 {
                Ok(tw * ball_mean_near_phase(*receiver, y, params.epsilon, k))
            } else {
                Ok(tw * Complex64::from_polar(1.0, k * receiver.dist(y)))
            }
        }
    }
}

/// Mean of `e^{ik|x−z|}` over `z ∈ B_ε(y)` by masked midpoint quadrature.
fn ball_mean_near_phase(x: Vec3, y: Vec3, eps: f64, k: f64) -> Complex64 {
    const N: usize = 16;
    let h = 2.0 * eps / N as f64;
    let mut acc = Complex64::new(0.0, 0.0);
    let mut count = 0usize;
    for iz in 0..N {
        for iy in 0..N {
            for ix in 0..N {
                let p = Vec3::new(
                    y.x - eps + (ix as f64 + 0.5) * h,
                    y.y - eps + (iy as f64 + 0.5) * h,
                    y.z - eps + (iz as f64 + 0.5) * h,
                );
                if p.dist(y) <= eps {
                    acc += Complex64::from_polar(1.0, k * x.dist(p));
                    count += 1;
                }
            }
        }
    }
    acc / count as f64
}

/// Probe vector on the τ-grid `τ_1, …, τ_N` of the given frequency grid.
pub fn discretize_probe(
    obs: &Observation,
    regime: &Regime,
    params: &ProbeParams,
    y: Vec3,
    dim: usize,
    grid: &FrequencyGrid,
) -> Result<Vec<Complex64>> {
    grid.taus()
        .iter()
        .map(|&tau| probe_value(obs, regime, params, y, dim, tau))
        .collect()
}

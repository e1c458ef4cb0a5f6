//! Time-dependent source densities `S(x, t)` supported on a shape times a
//! radiating period, and their frequency-domain transform
//! `f(x, k) = (2π)^{-1/2} ∫ S(x, t) e^{ikt} dt`.
//!
//! Every built-in amplitude is a spatial factor times a polynomial in `t`,
//! so the `t`-integral is evaluated in closed form.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::Shape;
use crate::vec3::Vec3;

pub const INV_SQRT_2PI: f64 = 0.398_942_280_401_432_7;

/// Spatial factor `p(x)` of a separable amplitude.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Spatial {
    Const { value: f64 },
    /// `value · |x|²`
    NormSqScaled { value: f64 },
}

impl Spatial {
    pub fn eval(&self, x: Vec3) -> f64 {
        match self {
            Spatial::Const { value } => *value,
            Spatial::NormSqScaled { value } => value * x.norm_sq(),
        }
    }
}

/// Separable amplitude `S(x, t) = p(x) · Σ_m c_m t^m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Amplitude {
    pub spatial: Spatial,
    /// Polynomial coefficients in `t`, constant term first.
    pub time_poly: Vec<f64>,
}

impl Amplitude {
    pub fn constant(value: f64) -> Self {
        Amplitude {
            spatial: Spatial::Const { value },
            time_poly: vec![1.0],
        }
    }

    /// `3|x|²(t + 1)`, the density used throughout the experiments.
    pub fn norm_sq_linear() -> Self {
        Amplitude {
            spatial: Spatial::NormSqScaled { value: 3.0 },
            time_poly: vec![1.0, 1.0],
        }
    }

    pub fn eval(&self, x: Vec3, t: f64) -> f64 {
        let mut poly = 0.0;
        for &c in self.time_poly.iter().rev() {
            poly = poly * t + c;
        }
        self.spatial.eval(x) * poly
    }
}

/// A source density: support shape, separable amplitude, radiating period
/// `[t_min, t_max]` and the nominal positivity floor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceModel {
    pub shape: Shape,
    pub amplitude: Amplitude,
    pub t_min: f64,
    pub t_max: f64,
    pub c0: f64,
}

impl SourceModel {
    pub fn new(shape: Shape, amplitude: Amplitude, t_min: f64, t_max: f64, c0: f64) -> Result<Self> {
        if !(t_min >= 0.0) {
            return Err(CoreError::validation("t_min must be nonnegative"));
        }
        if !(t_max > t_min) {
            return Err(CoreError::validation("t_max must exceed t_min"));
        }
        if !(c0 > 0.0) {
            return Err(CoreError::validation("positivity floor c0 must be positive"));
        }
        Ok(SourceModel {
            shape,
            amplitude,
            t_min,
            t_max,
            c0,
        })
    }

    pub fn duration(&self) -> f64 {
        self.t_max - self.t_min
    }

    /// `S(x, t)`, zero outside the radiating period. Spatial support is *not*
    /// applied here; quadrature masks handle it.
    pub fn amplitude_at(&self, x: Vec3, t: f64) -> f64 {
        if t < self.t_min || t > self.t_max {
            return 0.0;
        }
        self.amplitude.eval(x, t)
    }

    /// `(2π)^{-1/2} ∫_{t_min}^{t_max} (Σ c_m t^m) e^{ikt} dt` — the frequency
    /// content shared by every point of the support.
    pub fn time_factor(&self, k: f64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (m, &c) in self.amplitude.time_poly.iter().enumerate() {
            if c != 0.0 {
                acc += c * poly_moment(m as u32, self.t_min, self.t_max, k);
            }
        }
        acc * INV_SQRT_2PI
    }

    pub fn spatial_factor(&self, x: Vec3) -> f64 {
        self.amplitude.spatial.eval(x)
    }

    /// `f(x, k)`; zero for `x` outside the closed support.
    pub fn frequency_source(&self, x: Vec3, k: f64) -> Complex64 {
        if !self.shape.contains(x) {
            return Complex64::new(0.0, 0.0);
        }
        self.time_factor(k) * self.spatial_factor(x)
    }

    /// Checks `f(x, -k) = conj(f(x, k))` to the given relative tolerance.
    pub fn conjugate_symmetry_check(&self, x: Vec3, k: f64, rel_tol: f64) -> bool {
        let plus = self.frequency_source(x, k);
        let minus = self.frequency_source(x, -k);
        let scale = plus.norm().max(1e-300);
        (minus - plus.conj()).norm() <= rel_tol * scale.max(1.0)
    }

    /// Minimum of `S` over randomized samples of the bounding box restricted
    /// to the support, times the radiating period. Returns `None` when no
    /// sample lands inside the support.
    pub fn positivity_audit(&self, samples: usize, seed: u64) -> Option<f64> {
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let (lo, hi) = self.shape.bounding_box();
        let mask = self.shape.mask();
        let mut min: Option<f64> = None;
        for _ in 0..samples {
            let p = Vec3::new(
                rng.random_range(lo.x..=hi.x),
                rng.random_range(lo.y..=hi.y),
                if self.shape.dim() == 3 {
                    rng.random_range(lo.z..=hi.z)
                } else {
                    0.0
                },
            );
            if !mask.contains(p) {
                continue;
            }
            let t = rng.random_range(self.t_min..=self.t_max);
            let v = self.amplitude.eval(p, t);
            min = Some(min.map_or(v, |m: f64| m.min(v)));
        }
        min
    }
}

/// `∫_a^b t^m e^{ikt} dt`, exact for polynomial moments.
///
/// Small `|k·t|` uses the power series (the integration-by-parts recursion
/// divides by `ik` and loses accuracy near `k = 0`); otherwise the recursion.
pub fn poly_moment(m: u32, a: f64, b: f64, k: f64) -> Complex64 {
    let t_scale = a.abs().max(b.abs());
    if (k * t_scale).abs() <= 2.0 && (k * (b - a)).abs() <= 2.0 {
        return moment_series(m, a, b, k);
    }
    moment_recursion(m, a, b, k)
}

fn moment_series(m: u32, a: f64, b: f64, k: f64) -> Complex64 {
    //   ∫ t^m e^{ikt} = Σ_j (ik)^j / j! · (b^{m+j+1} − a^{m+j+1}) / (m+j+1)
    let mut sum = Complex64::new(0.0, 0.0);
    let mut ik_pow = Complex64::new(1.0, 0.0);
    let ik = Complex64::new(0.0, k);
    let mut factorial = 1.0;
    for j in 0..80u32 {
        let p = (m + j + 1) as i32;
        let term = ik_pow / factorial * ((b.powi(p) - a.powi(p)) / p as f64);
        sum += term;
        if term.norm() <= 1e-18 * sum.norm().max(1e-300) && j > 2 {
            break;
        }
        ik_pow *= ik;
        factorial *= (j + 1) as f64;
    }
    sum
}

fn moment_recursion(m: u32, a: f64, b: f64, k: f64) -> Complex64 {
    let ik = Complex64::new(0.0, k);
    let ea = Complex64::new(0.0, k * a).exp();
    let eb = Complex64::new(0.0, k * b).exp();
    let mut moment = (eb - ea) / ik;
    for j in 1..=m {
        moment = (b.powi(j as i32) * eb - a.powi(j as i32) * ea - j as f64 * moment) / ik;
    }
    moment
}

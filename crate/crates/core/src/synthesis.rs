//! Forward data generation: multi-frequency far-field patterns and 3-d
//! near-field data, band doubling by conjugate symmetry, the time-domain
//! far-field used as a consistency oracle, and reproducible noise injection.
//!
//! Spatial integrals use the tensor midpoint rule over the support's bounding
//! box, masked by the containment test; the `t`-integral is always the
//! closed form from [`crate::source`].

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::geometry::Shape;
use crate::io::Manifest;
use crate::source::SourceModel;
use crate::spectral::FrequencyGrid;
use crate::vec3::{UnitVec, Vec3};

/// Tensor-rule resolution per axis and the node count for discrete-`t`
/// factorization checks.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub nodes_2d: usize,
    pub nodes_3d: usize,
    pub t_nodes: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        QuadratureSpec {
            nodes_2d: 200,
            nodes_3d: 64,
            t_nodes: 64,
        }
    }
}

impl QuadratureSpec {
    pub fn validate(&self) -> Result<()> {
        if self.nodes_2d == 0 || self.nodes_3d == 0 || self.t_nodes == 0 {
            return Err(CoreError::validation("quadrature spec has zero nodes"));
        }
        Ok(())
    }

    pub fn nodes_for_dim(&self, dim: usize) -> usize {
        if dim == 3 {
            self.nodes_3d
        } else {
            self.nodes_2d
        }
    }
}

/// Where the data is observed.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Observation {
    FarField { direction: UnitVec },
    NearField { receiver: Vec3 },
}

impl Observation {
    pub fn is_far(&self) -> bool {
        matches!(self, Observation::FarField { .. })
    }

    /// The observation at the mirrored direction/receiver.
    pub fn opposite(&self) -> Observation {
        match self {
            Observation::FarField { direction } => Observation::FarField {
                direction: direction.flip(),
            },
            Observation::NearField { receiver } => Observation::NearField {
                receiver: receiver.neg(),
            },
        }
    }

    pub fn location(&self) -> Vec3 {
        match self {
            Observation::FarField { direction } => direction.vec(),
            Observation::NearField { receiver } => *receiver,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Observation::FarField { direction } => {
                let d = direction.vec();
                format!("far field at direction ({}, {}, {})", d.x, d.y, d.z)
            }
            Observation::NearField { receiver } => {
                format!("near field at receiver ({}, {}, {})", receiver.x, receiver.y, receiver.z)
            }
        }
    }
}

/// Midpoint nodes of the support, frozen once per synthesis run.
pub struct SpatialNodes {
    pub points: Vec<Vec3>,
    pub cell_volume: f64,
}

impl SpatialNodes {
    /// Integral of `f` against the node set.
    pub fn sum(&self, f: impl Fn(Vec3) -> Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for &p in &self.points {
            acc += f(p);
        }
        acc * self.cell_volume
    }
}

/// Masked midpoint nodes over the shape's bounding box, `n` cells per axis.
pub fn spatial_nodes(shape: &Shape, n: usize) -> Result<SpatialNodes> {
    if n == 0 {
        return Err(CoreError::validation("quadrature spec has zero nodes"));
    }
    let (lo, hi) = shape.bounding_box();
    let mask = shape.mask();
    let dim = shape.dim();
    let step = |a: f64, b: f64| (b - a) / n as f64;
    let (dx, dy) = (step(lo.x, hi.x), step(lo.y, hi.y));
    let dz = if dim == 3 { step(lo.z, hi.z) } else { 1.0 };
    let nz = if dim == 3 { n } else { 1 };
    let mut points = Vec::new();
    for iz in 0..nz {
        let z = if dim == 3 {
            lo.z + (iz as f64 + 0.5) * dz
        } else {
            lo.z
        };
        for iy in 0..n {
            let y = lo.y + (iy as f64 + 0.5) * dy;
            for ix in 0..n {
                let x = lo.x + (ix as f64 + 0.5) * dx;
                let p = Vec3::new(x, y, z);
                if mask.contains(p) {
                    points.push(p);
                }
            }
        }
    }
    Ok(SpatialNodes {
        points,
        cell_volume: dx * dy * dz,
    })
}

/// `w∞(x̂, k)` on a precomputed node set.
pub fn far_field_on_nodes(
    model: &SourceModel,
    direction: UnitVec,
    k: f64,
    nodes: &SpatialNodes,
) -> Complex64 {
    let tf = model.time_factor(k);
    tf * nodes.sum(|y| {
        Complex64::from_polar(model.spatial_factor(y), -k * direction.dot(y))
    })
}

/// `w∞(x̂, k) = (2π)^{-1/2} ∫∫ e^{ik(t − x̂·y)} S(y, t) dy dt`.
pub fn far_field(
    model: &SourceModel,
    direction: UnitVec,
    k: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    quad.validate()?;
    let nodes = spatial_nodes(&model.shape, quad.nodes_for_dim(model.shape.dim()))?;
    Ok(far_field_on_nodes(model, direction, k, &nodes))
}

/// `w(x, k)` on a precomputed node set; the 3-d outgoing kernel.
pub fn near_field_on_nodes(
    model: &SourceModel,
    receiver: Vec3,
    k: f64,
    nodes: &SpatialNodes,
) -> Result<Complex64> {
    let cell_diam = nodes.cell_volume.cbrt() * 3f64.sqrt();
    let tf = model.time_factor(k);
    let mut acc = Complex64::new(0.0, 0.0);
    for &y in &nodes.points {
        let d = receiver.dist(y);
        if d < cell_diam {
            return Err(CoreError::SingularKernel(receiver.x, receiver.y, receiver.z));
        }
        acc += Complex64::from_polar(
            model.spatial_factor(y) / (4.0 * std::f64::consts::PI * d),
            k * d,
        );
    }
    Ok(tf * acc * nodes.cell_volume)
}

/// `w(x, k) = ∫_D e^{ik|x−y|} / (4π|x−y|) · f(y, k) dy` for a receiver
/// outside the (3-d) support.
pub fn near_field(
    model: &SourceModel,
    receiver: Vec3,
    k: f64,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    quad.validate()?;
    if model.shape.dim() != 3 {
        return Err(CoreError::validation("near-field synthesis requires a 3-d support"));
    }
    if model.shape.contains(receiver) {
        return Err(CoreError::SingularKernel(receiver.x, receiver.y, receiver.z));
    }
    let nodes = spatial_nodes(&model.shape, quad.nodes_3d)?;
    near_field_on_nodes(model, receiver, k, &nodes)
}

/// Time-domain far-field pattern `U∞(x̂, t) = (4π)^{-1} ∫_D S(y, t + x̂·y/c) dy`
/// at sound speed `c`.
pub fn time_domain_far_field_on_nodes(
    model: &SourceModel,
    direction: UnitVec,
    t: f64,
    c: f64,
    nodes: &SpatialNodes,
) -> f64 {
    let mut acc = 0.0;
    for &y in &nodes.points {
        acc += model.amplitude_at(y, t + direction.dot(y) / c);
    }
    acc * nodes.cell_volume / (4.0 * std::f64::consts::PI)
}

/// Time-domain far field at unit sound speed.
pub fn time_domain_far_field(
    model: &SourceModel,
    direction: UnitVec,
    t: f64,
    quad: &QuadratureSpec,
) -> Result<f64> {
    quad.validate()?;
    let nodes = spatial_nodes(&model.shape, quad.nodes_for_dim(model.shape.dim()))?;
    Ok(time_domain_far_field_on_nodes(model, direction, t, 1.0, &nodes))
}

/// Complex samples of one observation over the doubled band: `2N − 1` values
/// at `k_c + (m + 1/2)Δk` for `m = −(N−1), …, N−1`.
#[derive(Clone, Debug)]
pub struct FieldDataset {
    pub observation: Observation,
    pub grid: FrequencyGrid,
    /// Diagonal order: index `o` holds the sample at offset `m = o − (N−1)`.
    pub samples: Vec<Complex64>,
    pub manifest: Manifest,
}

impl FieldDataset {
    pub fn new(
        observation: Observation,
        grid: FrequencyGrid,
        samples: Vec<Complex64>,
        manifest: Manifest,
    ) -> Result<Self> {
        if samples.len() != grid.sample_count() {
            return Err(CoreError::validation(format!(
                "dataset needs {} samples, got {}",
                grid.sample_count(),
                samples.len()
            )));
        }
        Ok(FieldDataset {
            observation,
            grid,
            samples,
            manifest,
        })
    }

    /// Wavenumber of the sample at vector index `o`.
    pub fn wavenumber(&self, o: usize) -> f64 {
        let m = o as i64 - (self.grid.n as i64 - 1);
        self.grid.diagonal_wavenumber(m)
    }

    /// Sample at Toeplitz diagonal `m ∈ [−(N−1), N−1]`.
    pub fn sample_at_diagonal(&self, m: i64) -> Result<Complex64> {
        let n = self.grid.n as i64;
        if m <= -n || m >= n {
            return Err(CoreError::IncompleteDataset {
                missing_k: self.grid.diagonal_wavenumber(m),
                have: self.samples.len(),
                expected: self.grid.sample_count(),
            });
        }
        Ok(self.samples[(m + n - 1) as usize])
    }
}

/// Evaluates one observation at all `2N − 1` wavenumbers of the grid. On a
/// symmetric (doubled) band, samples at negative wavenumbers are filled by
/// conjugation instead of re-integration.
pub fn synthesize_dataset(
    model: &SourceModel,
    observation: Observation,
    grid: &FrequencyGrid,
    quad: &QuadratureSpec,
) -> Result<FieldDataset> {
    quad.validate()?;
    let dim = model.shape.dim();
    if let Observation::NearField { receiver } = observation {
        if dim != 3 {
            return Err(CoreError::validation("near-field synthesis requires a 3-d support"));
        }
        if model.shape.contains(receiver) {
            return Err(CoreError::SingularKernel(receiver.x, receiver.y, receiver.z));
        }
    }
    let nodes = spatial_nodes(&model.shape, quad.nodes_for_dim(dim))?;
    let n = grid.n as i64;
    let eval = |m: i64| -> Result<Complex64> {
        let k = grid.diagonal_wavenumber(m);
        match observation {
            Observation::FarField { direction } => Ok(far_field_on_nodes(model, direction, k, &nodes)),
            Observation::NearField { receiver } => near_field_on_nodes(model, receiver, k, &nodes),
        }
    };

    let samples = if grid.is_symmetric() {
        // Conjugate symmetry: the sample at −k mirrors the one at k, and the
        // diagonals pair up as m ↔ −m−1.
        let positive: Vec<Complex64> = (0..n)
            .into_par_iter()
            .map(eval)
            .collect::<Result<_>>()?;
        let mut samples = vec![Complex64::new(0.0, 0.0); grid.sample_count()];
        for m in 0..n {
            samples[(m + n - 1) as usize] = positive[m as usize];
        }
        for m in 1..n {
            samples[(n - 1 - m) as usize] = positive[(m - 1) as usize].conj();
        }
        samples
    } else {
        (-(n - 1)..n)
            .into_par_iter()
            .map(eval)
            .collect::<Result<_>>()?
    };

    let manifest = Manifest::for_dataset(model, grid, &observation, quad, None, None);
    FieldDataset::new(observation, *grid, samples, manifest)
}

/// Adds complex Gaussian noise of the given relative magnitude per sample.
/// On a symmetric band only the nonnegative-offset samples are perturbed and
/// their mirrors are filled by conjugation, so the symmetry invariant is
/// preserved. Deterministic for a fixed seed.
pub fn inject_noise(dataset: &FieldDataset, level: f64, seed: u64) -> Result<FieldDataset> {
    if level < 0.0 {
        return Err(CoreError::validation("noise level must be nonnegative"));
    }
    let mut out = dataset.clone();
    out.manifest.note_noise(level, seed);
    if level == 0.0 {
        return Ok(out);
    }
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let n = dataset.grid.n as i64;
    let perturb = |v: Complex64, rng: &mut ChaCha12Rng| {
        let g1: f64 = StandardNormal.sample(rng);
        let g2: f64 = StandardNormal.sample(rng);
        v + Complex64::new(g1, g2) * (level * v.norm() / 2f64.sqrt())
    };
    if dataset.grid.is_symmetric() {
        for m in 0..n {
            let idx = (m + n - 1) as usize;
            out.samples[idx] = perturb(dataset.samples[idx], &mut rng);
        }
        for m in 1..n {
            out.samples[(n - 1 - m) as usize] = out.samples[(m + n - 1 - 1) as usize].conj();
        }
    } else {
        for s in out.samples.iter_mut() {
            *s = perturb(*s, &mut rng);
        }
    }
    Ok(out)
}

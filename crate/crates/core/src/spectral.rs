//! Discrete far/near-field operators and their spectra.
//!
//! One multi-frequency dataset at a single observation yields an N×N complex
//! Toeplitz matrix whose entry `(n, m)` samples the data at
//! `k_c + τ_n − s_m`, `τ_n = nΔk`, `s_m = (m − 1/2)Δk`. The sharpened
//! eigenvalues `λ_n = |Re λ̃_n| + |Im λ̃_n|` of the raw (non-Hermitian)
//! eigensystem feed the Picard sums in [`crate::imaging`]; an exact
//! Hermitian route for `|Re F| + |Im F|` is available for comparison.

use ndarray::Array2;
use ndarray_linalg::{Eig, Eigh, Norm, UPLO};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{CoreError, Result};
use crate::io::Manifest;
use crate::source::SourceModel;
use crate::synthesis::{
    far_field_on_nodes, near_field_on_nodes, spatial_nodes, FieldDataset, Observation,
    SpatialNodes,
};
use crate::vec3::Vec3;

/// Uniform frequency band `[k_min, k_max]` discretized by `N` nodes per
/// half-band: `Δk = K/N` with `K` the half-width, `k_n = (n − 1/2)Δk`,
/// `τ_n = nΔk`, `s_m = (m − 1/2)Δk`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGrid {
    pub k_min: f64,
    pub k_max: f64,
    pub n: usize,
}

impl FrequencyGrid {
    pub fn new(k_min: f64, k_max: f64, n: usize) -> Result<Self> {
        if !(k_max > k_min) {
            return Err(CoreError::validation("k_max must exceed k_min"));
        }
        if k_min < -k_max {
            return Err(CoreError::validation("k_min must satisfy k_min >= -k_max"));
        }
        if n == 0 {
            return Err(CoreError::validation("grid needs at least one node"));
        }
        Ok(FrequencyGrid { k_min, k_max, n })
    }

    /// The band `(0, k_max)` extended to `(−k_max, k_max)` by conjugate
    /// symmetry: center 0, half-width `k_max`.
    pub fn doubled(k_max: f64, n: usize) -> Result<Self> {
        FrequencyGrid::new(-k_max, k_max, n)
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.k_min + self.k_max)
    }

    pub fn half_band(&self) -> f64 {
        0.5 * (self.k_max - self.k_min)
    }

    pub fn dk(&self) -> f64 {
        self.half_band() / self.n as f64
    }

    pub fn is_symmetric(&self) -> bool {
        self.k_min == -self.k_max
    }

    /// `τ_n = nΔk` for `n = 1..N`.
    pub fn taus(&self) -> Vec<f64> {
        (1..=self.n).map(|i| i as f64 * self.dk()).collect()
    }

    /// `s_m = (m − 1/2)Δk` for `m = 1..N`.
    pub fn ss(&self) -> Vec<f64> {
        (1..=self.n).map(|i| (i as f64 - 0.5) * self.dk()).collect()
    }

    /// Number of data samples one operator needs: `2N − 1`.
    pub fn sample_count(&self) -> usize {
        2 * self.n - 1
    }

    /// Wavenumber sampled on Toeplitz diagonal `m`: `k_c + (m + 1/2)Δk`.
    pub fn diagonal_wavenumber(&self, m: i64) -> f64 {
        self.center() + (m as f64 + 0.5) * self.dk()
    }
}

/// How the sharpened operator is formed from the raw matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SharpMode {
    /// Raw eigensystem of the Toeplitz matrix with
    /// `λ_n = |Re λ̃_n| + |Im λ̃_n|` and unchanged eigenvectors.
    Verbatim,
    /// `|Re F| + |Im F|` assembled from two Hermitian eigendecompositions.
    /// Exact when the operator is normal; the production default above
    /// presumes shared eigenvectors.
    Hermitian,
}

/// Eigensystem of one discrete operator with sharpened nonnegative
/// eigenvalues and the regularization floor for Picard denominators.
#[derive(Clone, Debug)]
pub struct OperatorSpectrum {
    pub matrix: Array2<Complex64>,
    /// Raw eigenvalues `λ̃_n` (for `SharpMode::Hermitian` these are the real
    /// eigenvalues of the sharpened matrix).
    pub raw: Vec<Complex64>,
    /// Unit-norm eigenvectors, one per column, same order as `raw`.
    pub vectors: Array2<Complex64>,
    /// `λ_n ≥ 0`, sorted descending.
    pub sharp: Vec<f64>,
    /// `ε_reg = EPS_REG_REL · max λ_n`.
    pub floor: f64,
}

/// Maximum admissible eigenpair residual relative to the matrix norm.
const EIG_RESIDUAL_REL: f64 = 1e-10;

impl OperatorSpectrum {
    pub fn from_matrix(matrix: Array2<Complex64>, mode: SharpMode) -> Result<Self> {
        match mode {
            SharpMode::Verbatim => Self::verbatim(matrix),
            SharpMode::Hermitian => Self::hermitian(matrix),
        }
    }

    fn verbatim(matrix: Array2<Complex64>) -> Result<Self> {
        let (vals, vecs) = matrix
            .eig()
            .map_err(|e| CoreError::Eigensolver(e.to_string()))?;
        let mut raw: Vec<Complex64> = vals.to_vec();
        let mut vectors = vecs;
        // LAPACK returns unit vectors; renormalize anyway so downstream inner
        // products see exactly unit norm.
        for mut col in vectors.columns_mut() {
            let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                col.mapv_inplace(|z| z / norm);
            }
        }
        let order = sorted_order(&raw);
        raw = order.iter().map(|&i| raw[i]).collect();
        let vectors = reorder_columns(&vectors, &order);
        let sharp: Vec<f64> = raw.iter().map(|l| l.re.abs() + l.im.abs()).collect();
        let spectrum = OperatorSpectrum {
            floor: crate::EPS_REG_REL * sharp.first().copied().unwrap_or(0.0),
            matrix,
            raw,
            vectors,
            sharp,
        };
        spectrum.check_residuals()?;
        Ok(spectrum)
    }

    fn hermitian(matrix: Array2<Complex64>) -> Result<Self> {
        let adjoint = conjugate_transpose(&matrix);
        let half = Complex64::new(0.5, 0.0);
        let re = (&matrix + &adjoint) * half;
        let im = (&matrix - &adjoint) * Complex64::new(0.0, -0.5);
        let sharpened = hermitian_abs(&re)? + hermitian_abs(&im)?;
        let (vals, vecs) = sharpened
            .eigh(UPLO::Lower)
            .map_err(|e| CoreError::Eigensolver(e.to_string()))?;
        let mut pairs: Vec<(f64, usize)> = vals
            .iter()
            .enumerate()
            .map(|(i, &l)| (l.max(0.0), i))
            .collect();
        pairs.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));
        let order: Vec<usize> = pairs.iter().map(|&(_, i)| i).collect();
        let sharp: Vec<f64> = pairs.iter().map(|&(l, _)| l).collect();
        let raw: Vec<Complex64> = sharp.iter().map(|&l| Complex64::new(l, 0.0)).collect();
        let vectors = reorder_columns(&vecs, &order);
        Ok(OperatorSpectrum {
            floor: crate::EPS_REG_REL * sharp.first().copied().unwrap_or(0.0),
            matrix,
            raw,
            vectors,
            sharp,
        })
    }

    pub fn n(&self) -> usize {
        self.sharp.len()
    }

    /// Largest eigenpair residual `‖Mψ − λ̃ψ‖` (Hermitian mode checks against
    /// the sharpened matrix it decomposed, so residuals are not meaningful
    /// there against `matrix`).
    fn check_residuals(&self) -> Result<()> {
        let norm = self.matrix.norm_l2().max(1e-300);
        let mut worst = 0.0f64;
        for (i, &l) in self.raw.iter().enumerate() {
            let v = self.vectors.column(i);
            let mv = self.matrix.dot(&v);
            let r = (&mv - &v.mapv(|z| z * l)).norm_l2();
            worst = worst.max(r);
        }
        if worst > EIG_RESIDUAL_REL * norm {
            return Err(CoreError::EigenResidual {
                residual: worst,
                bound: EIG_RESIDUAL_REL * norm,
                norm,
            });
        }
        Ok(())
    }
}

fn sorted_order(raw: &[Complex64]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..raw.len()).collect();
    let sharp = |l: &Complex64| l.re.abs() + l.im.abs();
    order.sort_by(|&a, &b| {
        sharp(&raw[b])
            .total_cmp(&sharp(&raw[a]))
            .then(a.cmp(&b))
    });
    order
}

fn reorder_columns(m: &Array2<Complex64>, order: &[usize]) -> Array2<Complex64> {
    let mut out = Array2::zeros(m.raw_dim());
    for (dst, &src) in order.iter().enumerate() {
        out.column_mut(dst).assign(&m.column(src));
    }
    out
}

fn conjugate_transpose(m: &Array2<Complex64>) -> Array2<Complex64> {
    m.t().mapv(|z| z.conj())
}

/// `|A| = V |Λ| V^H` for Hermitian `A`.
fn hermitian_abs(m: &Array2<Complex64>) -> Result<Array2<Complex64>> {
    let (vals, vecs) = m
        .eigh(UPLO::Lower)
        .map_err(|e| CoreError::Eigensolver(e.to_string()))?;
    let scaled = &vecs * &vals.mapv(|l| Complex64::new(l.abs(), 0.0));
    Ok(scaled.dot(&conjugate_transpose(&vecs)))
}

/// Toeplitz approximation of the far/near-field operator: entry
/// `(n, m) = Δk · w(k_c + τ_n − s_m)`, i.e. diagonal `n − m` of the dataset.
pub fn assemble_toeplitz(dataset: &FieldDataset) -> Result<Array2<Complex64>> {
    let n = dataset.grid.n;
    if dataset.samples.len() != dataset.grid.sample_count() {
        let have = dataset.samples.len();
        let missing = have as i64 - (n as i64 - 1);
        return Err(CoreError::IncompleteDataset {
            missing_k: dataset.grid.diagonal_wavenumber(missing),
            have,
            expected: dataset.grid.sample_count(),
        });
    }
    let dk = dataset.grid.dk();
    let mut mat = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            mat[[i, j]] = dataset.sample_at_diagonal(i as i64 - j as i64)? * dk;
        }
    }
    Ok(mat)
}

/// Midpoint discretization of the source cylinder `D × [t_min, t_max]`:
/// spatial nodes with a uniform cell weight and temporal nodes with weight
/// `Δt`.
pub struct SourceSamples {
    pub nodes: SpatialNodes,
    pub times: Vec<f64>,
    pub time_weight: f64,
}

impl SourceSamples {
    pub fn midpoint(model: &SourceModel, spatial_per_axis: usize, t_nodes: usize) -> Result<Self> {
        if t_nodes == 0 {
            return Err(CoreError::validation("source sampling needs t nodes"));
        }
        let nodes = spatial_nodes(&model.shape, spatial_per_axis)?;
        let dt = model.duration() / t_nodes as f64;
        let times = (0..t_nodes)
            .map(|l| model.t_min + (l as f64 + 0.5) * dt)
            .collect();
        Ok(SourceSamples {
            nodes,
            times,
            time_weight: dt,
        })
    }

    pub fn len(&self) -> usize {
        self.nodes.points.len() * self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Phase `t − x̂·y` (far field) or `t + |x − y|` (near field) carried by
/// every operator kernel.
fn observation_phase(obs: &Observation, y: Vec3, t: f64) -> f64 {
    match obs {
        Observation::FarField { direction } => t - direction.dot(y),
        Observation::NearField { receiver } => t + receiver.dist(y),
    }
}

/// Discrete data-to-pattern operator: row `τ`, column `(y_j, t_l)` holds
/// `w_{jl} · e^{iτ(t_l − x̂·y_j)}` (near field: `e^{iτ(t_l + |x−y_j|)}`).
pub fn data_to_pattern_matrix(
    obs: &Observation,
    taus: &[f64],
    disc: &SourceSamples,
) -> Array2<Complex64> {
    let cols = disc.len();
    let w = disc.nodes.cell_volume * disc.time_weight;
    let mut mat = Array2::zeros((taus.len(), cols));
    for (j, &y) in disc.nodes.points.iter().enumerate() {
        for (l, &t) in disc.times.iter().enumerate() {
            let phase = observation_phase(obs, y, t);
            let col = j * disc.times.len() + l;
            for (row, &tau) in taus.iter().enumerate() {
                mat[[row, col]] = Complex64::from_polar(w, tau * phase);
            }
        }
    }
    mat
}

/// Applies the data-to-pattern operator to a density sampled on `disc`
/// without materializing the matrix.
pub fn apply_data_to_pattern(
    obs: &Observation,
    taus: &[f64],
    disc: &SourceSamples,
    density: impl Fn(Vec3, f64) -> f64,
) -> Vec<Complex64> {
    let w = disc.nodes.cell_volume * disc.time_weight;
    let mut out = vec![Complex64::new(0.0, 0.0); taus.len()];
    for &y in &disc.nodes.points {
        for &t in &disc.times {
            let phase = observation_phase(obs, y, t);
            let u = density(y, t) * w;
            for (row, &tau) in taus.iter().enumerate() {
                out[row] += Complex64::from_polar(u, tau * phase);
            }
        }
    }
    out
}

/// Relative Frobenius residual of the operator factorization `F = L T L*`.
///
/// The reference Toeplitz matrix is synthesized on the same spatial nodes as
/// the discrete factors (closed-form `t`-integration), so the residual
/// isolates the temporal midpoint error of the factor route and decays at
/// second order under simultaneous refinement.
pub fn verify_factorization(
    model: &SourceModel,
    obs: &Observation,
    grid: &FrequencyGrid,
    spatial_per_axis: usize,
    t_nodes: usize,
) -> Result<f64> {
    let disc = SourceSamples::midpoint(model, spatial_per_axis, t_nodes)?;

    // Route one: synthesize data, assemble the Toeplitz operator.
    let n = grid.n as i64;
    let mut samples = Vec::with_capacity(grid.sample_count());
    for m in -(n - 1)..n {
        let k = grid.diagonal_wavenumber(m);
        let v = match obs {
            Observation::FarField { direction } => {
                far_field_on_nodes(model, *direction, k, &disc.nodes)
            }
            Observation::NearField { receiver } => {
                near_field_on_nodes(model, *receiver, k, &disc.nodes)?
            }
        };
        samples.push(v);
    }
    let manifest = Manifest::for_dataset(
        model,
        grid,
        obs,
        &crate::synthesis::QuadratureSpec {
            nodes_2d: spatial_per_axis,
            nodes_3d: spatial_per_axis,
            t_nodes,
        },
        None,
        None,
    );
    let dataset = FieldDataset::new(*obs, *grid, samples, manifest)?;
    let reference = assemble_toeplitz(&dataset)?;

    // Route two: the factorization L·T·L*, accumulated column by column.
    // L carries the quadrature weights and the τ-grid phases, T multiplies by
    // (2π)^{-1/2} e^{i k_c φ} S (near field: the weighted singular kernel),
    // and L* carries Δk and the s-grid phases.
    let taus = grid.taus();
    let ss = grid.ss();
    let dk = grid.dk();
    let kc = grid.center();
    let w = disc.nodes.cell_volume * disc.time_weight;
    let nn = grid.n;
    let mut product: Array2<Complex64> = Array2::zeros((nn, nn));
    let mut a = vec![Complex64::new(0.0, 0.0); nn];
    let mut b = vec![Complex64::new(0.0, 0.0); nn];
    for &y in &disc.nodes.points {
        let kernel = match obs {
            Observation::FarField { .. } => crate::source::INV_SQRT_2PI,
            Observation::NearField { receiver } => {
                // 1/sqrt(32π³) = 1/(4π·sqrt(2π))
                crate::source::INV_SQRT_2PI / (4.0 * std::f64::consts::PI * receiver.dist(y))
            }
        };
        for &t in &disc.times {
            let phase = observation_phase(obs, y, t);
            let g = w * kernel * model.amplitude_at(y, t);
            let head = Complex64::from_polar(g, kc * phase);
            for (i, &tau) in taus.iter().enumerate() {
                a[i] = head * Complex64::from_polar(1.0, tau * phase);
            }
            for (m, &s) in ss.iter().enumerate() {
                b[m] = Complex64::from_polar(dk, -s * phase);
            }
            for i in 0..nn {
                for m in 0..nn {
                    product[[i, m]] += a[i] * b[m];
                }
            }
        }
    }

    let norm_ref = reference.norm_l2();
    if norm_ref == 0.0 {
        return Ok(0.0);
    }
    Ok((&product - &reference).norm_l2() / norm_ref)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::source::{Amplitude, INV_SQRT_2PI};
    use crate::synthesis::{synthesize_dataset, QuadratureSpec};
    use crate::vec3::UnitVec;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    fn xhat() -> UnitVec {
        UnitVec::new(Vec3::new(1.0, 0.0, 0.0)).unwrap()
    }

    fn paper_grid() -> FrequencyGrid {
        FrequencyGrid::doubled(8.0 * PI / 3.0, 16).unwrap()
    }

    fn peanut_model() -> SourceModel {
        SourceModel::new(
            Shape::Peanut {
                center: Vec3::ZERO,
                a: 1.0,
                b: 1.0,
                r: 1.0,
            },
            Amplitude::norm_sq_linear(),
            0.0,
            2.0,
            1e-9,
        )
        .unwrap()
    }

    fn constant_dataset(v: Complex64, grid: FrequencyGrid) -> FieldDataset {
        let model = SourceModel::new(
            Shape::Ball {
                center: Vec3::ZERO,
                r: 1.0,
                dim: 2,
            },
            Amplitude::constant(1.0),
            0.0,
            1.0,
            1e-9,
        )
        .unwrap();
        let manifest = Manifest::for_dataset(
            &model,
            &grid,
            &Observation::FarField { direction: xhat() },
            &QuadratureSpec::default(),
            None,
            None,
        );
        FieldDataset::new(
            Observation::FarField { direction: xhat() },
            grid,
            vec![v; grid.sample_count()],
            manifest,
        )
        .unwrap()
    }

    #[test]
    fn grid_nodes_match_experiment_settings() {
        let g = paper_grid();
        assert_relative_eq!(g.dk(), PI / 6.0, epsilon = 1e-15);
        assert_eq!(g.sample_count(), 31);
        assert_relative_eq!(g.center(), 0.0);
        assert_relative_eq!(g.half_band(), 8.0 * PI / 3.0);
        assert_relative_eq!(g.taus()[0], PI / 6.0);
        assert_relative_eq!(g.ss()[0], PI / 12.0);
    }

    #[test]
    fn toeplitz_from_constant_samples() {
        let grid = FrequencyGrid::doubled(4.0, 8).unwrap();
        let v = Complex64::new(0.3, -0.7);
        let ds = constant_dataset(v, grid);
        let mat = assemble_toeplitz(&ds).unwrap();
        for e in mat.iter() {
            assert!((e - v * grid.dk()).norm() < 1e-15);
        }
    }

    #[test]
    fn toeplitz_structure_and_layout() {
        let grid = paper_grid();
        let model = peanut_model();
        let quad = QuadratureSpec {
            nodes_2d: 60,
            ..QuadratureSpec::default()
        };
        let ds = synthesize_dataset(&model, Observation::FarField { direction: xhat() }, &grid, &quad)
            .unwrap();
        let mat = assemble_toeplitz(&ds).unwrap();
        assert_eq!(mat.dim(), (16, 16));
        // Every diagonal is constant.
        for i in 1..16 {
            for j in 1..16 {
                assert_eq!(mat[[i, j]], mat[[i - 1, j - 1]]);
            }
        }
        // First column walks the positive half-band, first row the negative.
        let dk = grid.dk();
        for i in 0..16 {
            let k = (i as f64 + 0.5) * dk;
            let direct = ds.samples[15 + i];
            assert_eq!(mat[[i, 0]], direct * dk);
            assert_relative_eq!(ds.wavenumber(15 + i), k, epsilon = 1e-12);
        }
        for j in 1..16 {
            assert_eq!(mat[[0, j]], ds.samples[15 - j] * dk);
        }
    }

    #[test]
    fn toeplitz_is_linear_in_samples() {
        let grid = FrequencyGrid::doubled(4.0, 6).unwrap();
        let a = constant_dataset(Complex64::new(1.0, 2.0), grid);
        let mut b = constant_dataset(Complex64::new(-0.5, 0.25), grid);
        for (i, s) in b.samples.iter_mut().enumerate() {
            *s += Complex64::new(i as f64 * 0.1, -(i as f64) * 0.05);
        }
        let mut combo = a.clone();
        for (i, s) in combo.samples.iter_mut().enumerate() {
            *s = *s * 2.0 + b.samples[i] * Complex64::new(0.0, 1.0);
        }
        let (ma, mb, mc) = (
            assemble_toeplitz(&a).unwrap(),
            assemble_toeplitz(&b).unwrap(),
            assemble_toeplitz(&combo).unwrap(),
        );
        let recon = &ma * Complex64::new(2.0, 0.0) + &mb * Complex64::new(0.0, 1.0);
        assert!((&mc - &recon).norm_l2() < 1e-14 * mc.norm_l2().max(1.0));
    }

    #[test]
    fn eigensystem_sharpening_examples() {
        let mut m = Array2::zeros((2, 2));
        m[[0, 0]] = Complex64::new(1.0, 2.0);
        m[[1, 1]] = Complex64::new(-3.0, 0.0);
        let s = OperatorSpectrum::from_matrix(m, SharpMode::Verbatim).unwrap();
        assert_eq!(s.sharp, vec![3.0, 3.0]);

        let z: Array2<Complex64> = Array2::zeros((3, 3));
        let s = OperatorSpectrum::from_matrix(z, SharpMode::Verbatim).unwrap();
        assert!(s.sharp.iter().all(|&l| l == 0.0));
        assert_eq!(s.floor, 0.0);
    }

    #[test]
    fn eigensystem_residuals_are_tiny() {
        let grid = paper_grid();
        let model = peanut_model();
        let quad = QuadratureSpec {
            nodes_2d: 80,
            ..QuadratureSpec::default()
        };
        let ds = synthesize_dataset(&model, Observation::FarField { direction: xhat() }, &grid, &quad)
            .unwrap();
        let mat = assemble_toeplitz(&ds).unwrap();
        // from_matrix errors if any residual exceeds 1e-10·‖M‖.
        let s = OperatorSpectrum::from_matrix(mat, SharpMode::Verbatim).unwrap();
        assert_eq!(s.n(), 16);
        assert!(s.sharp.windows(2).all(|w| w[0] >= w[1]));
        // Analytic kernel: the spectrum must collapse by many orders.
        let ratio = s.sharp[0] / s.sharp[15].max(1e-300);
        assert!(ratio > 1e2, "spectral decay too shallow: {ratio:.3e}");
    }

    #[test]
    fn hermitian_mode_yields_nonnegative_spectrum() {
        let grid = paper_grid();
        let model = peanut_model();
        let quad = QuadratureSpec {
            nodes_2d: 60,
            ..QuadratureSpec::default()
        };
        let ds = synthesize_dataset(&model, Observation::FarField { direction: xhat() }, &grid, &quad)
            .unwrap();
        let mat = assemble_toeplitz(&ds).unwrap();
        let s = OperatorSpectrum::from_matrix(mat, SharpMode::Hermitian).unwrap();
        assert!(s.sharp.iter().all(|&l| l >= 0.0));
        // Orthonormal eigenvectors in the Hermitian route.
        for i in 0..s.n() {
            for j in 0..s.n() {
                let dot: Complex64 = s
                    .vectors
                    .column(i)
                    .iter()
                    .zip(s.vectors.column(j).iter())
                    .map(|(a, b)| a * b.conj())
                    .sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot.norm() - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn data_to_pattern_zero_tau_row_is_weights() {
        let model = peanut_model();
        let disc = SourceSamples::midpoint(&model, 8, 4).unwrap();
        let obs = Observation::FarField { direction: xhat() };
        let mat = data_to_pattern_matrix(&obs, &[0.0], &disc);
        let w = disc.nodes.cell_volume * disc.time_weight;
        for e in mat.iter() {
            assert_relative_eq!(e.re, w, epsilon = 1e-15);
            assert_relative_eq!(e.im, 0.0);
        }
    }

    #[test]
    fn data_to_pattern_reproduces_far_field() {
        // (L S)(k)/sqrt(2π) = w∞(x̂, k) up to the t-quadrature error.
        let model = peanut_model();
        let disc = SourceSamples::midpoint(&model, 100, 400).unwrap();
        let obs = Observation::FarField { direction: xhat() };
        let ks = [PI / 6.0, 1.3, 4.0];
        let applied = apply_data_to_pattern(&obs, &ks, &disc, |y, t| model.amplitude_at(y, t));
        for (i, &k) in ks.iter().enumerate() {
            let direct = far_field_on_nodes(&model, xhat(), k, &disc.nodes);
            let via_l = applied[i] * INV_SQRT_2PI;
            assert!(
                (via_l - direct).norm() <= 2e-4 * direct.norm().max(1e-12),
                "k={k}: {via_l} vs {direct}"
            );
        }
    }

    #[test]
    fn factorization_residual_small_and_second_order() {
        let grid = paper_grid();
        let model = peanut_model();
        let obs = Observation::FarField { direction: xhat() };
        let coarse = verify_factorization(&model, &obs, &grid, 60, 24).unwrap();
        let fine = verify_factorization(&model, &obs, &grid, 120, 48).unwrap();
        assert!(coarse < 5e-2, "coarse residual {coarse:.3e}");
        assert!(
            coarse / fine >= 3.0,
            "refinement ratio {:.2} (coarse {coarse:.3e}, fine {fine:.3e})",
            coarse / fine
        );
    }

    #[test]
    fn factorization_zero_source_is_exact() {
        let model = SourceModel::new(
            Shape::Ball {
                center: Vec3::ZERO,
                r: 1.0,
                dim: 2,
            },
            Amplitude::constant(0.0),
            0.0,
            1.0,
            1.0,
        )
        .unwrap();
        let grid = FrequencyGrid::doubled(4.0, 4).unwrap();
        let obs = Observation::FarField { direction: xhat() };
        let res = verify_factorization(&model, &obs, &grid, 20, 8).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn streamed_product_matches_explicit_matrices() {
        // Tiny instance: accumulate L·T·L* explicitly and compare to the
        // streaming path inside verify_factorization by reconstructing both.
        let model = peanut_model();
        let grid = FrequencyGrid::doubled(2.0, 3).unwrap();
        let obs = Observation::FarField { direction: xhat() };
        let disc = SourceSamples::midpoint(&model, 10, 5).unwrap();
        let taus = grid.taus();
        let ss = grid.ss();
        let l = data_to_pattern_matrix(&obs, &taus, &disc);
        // L* with Δk weighting; T as a diagonal over columns (weights live in L,
        // so T here must divide one copy of the weight back out).
        let w = disc.nodes.cell_volume * disc.time_weight;
        let mut product = Array2::<Complex64>::zeros((grid.n, grid.n));
        for (j, &y) in disc.nodes.points.iter().enumerate() {
            for (l_idx, &t) in disc.times.iter().enumerate() {
                let col = j * disc.times.len() + l_idx;
                let phase = t - xhat().dot(y);
                let t_val = Complex64::from_polar(
                    INV_SQRT_2PI * model.amplitude_at(y, t) / w,
                    grid.center() * phase,
                );
                for i in 0..grid.n {
                    for m in 0..grid.n {
                        let lstar = Complex64::from_polar(grid.dk(), -ss[m] * phase);
                        product[[i, m]] += l[[i, col]] * t_val * lstar;
                    }
                }
            }
        }

        // Reference route repeated here: Toeplitz of data synthesized on the
        // same nodes with closed-form t.
        let n = grid.n as i64;
        let mut samples = Vec::new();
        for m in -(n - 1)..n {
            samples.push(far_field_on_nodes(
                &model,
                xhat(),
                grid.diagonal_wavenumber(m),
                &disc.nodes,
            ));
        }
        let manifest = Manifest::for_dataset(
            &model,
            &grid,
            &obs,
            &QuadratureSpec::default(),
            None,
            None,
        );
        let ds = FieldDataset::new(obs, grid, samples, manifest).unwrap();
        let reference = assemble_toeplitz(&ds).unwrap();
        let explicit = (&product - &reference).norm_l2() / reference.norm_l2();
        let streamed = verify_factorization(&model, &obs, &grid, 10, 5).unwrap();
        assert_relative_eq!(explicit, streamed, max_relative = 1e-10);
    }

    #[test]
    fn source_scaling_scales_spectrum_linearly() {
        let grid = paper_grid();
        let base = peanut_model();
        let mut scaled = base.clone();
        scaled.amplitude.spatial = crate::source::Spatial::NormSqScaled { value: 6.0 };
        let quad = QuadratureSpec {
            nodes_2d: 60,
            ..QuadratureSpec::default()
        };
        let obs = Observation::FarField { direction: xhat() };
        let s1 = OperatorSpectrum::from_matrix(
            assemble_toeplitz(&synthesize_dataset(&base, obs, &grid, &quad).unwrap()).unwrap(),
            SharpMode::Verbatim,
        )
        .unwrap();
        let s2 = OperatorSpectrum::from_matrix(
            assemble_toeplitz(&synthesize_dataset(&scaled, obs, &grid, &quad).unwrap()).unwrap(),
            SharpMode::Verbatim,
        )
        .unwrap();
        for (a, b) in s1.sharp.iter().zip(&s2.sharp) {
            assert_relative_eq!(2.0 * a, b, max_relative = 1e-9, epsilon = 1e-12 * s1.sharp[0]);
        }
    }
}

//! Picard-series indicators and their fusion into images.
//!
//! One observation dataset yields an operator spectrum; a sampling point is
//! scored by the truncated Picard sum of its probe against that spectrum.
//! Opposite observations are mandatory companions: the indicator is the
//! reciprocal of the summed Picard series over every observation of every
//! pair, large inside the reconstructable region and vanishing outside.
//! Sums always run in a fixed order (pair, then sign, then eigenvalue), so
//! grids are bit-reproducible regardless of thread count or input order.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{CoreError, Result};
use crate::probes::{discretize_probe, ProbeParams, Regime};
use crate::spectral::{assemble_toeplitz, FrequencyGrid, OperatorSpectrum, SharpMode};
use crate::synthesis::{FieldDataset, Observation};
use crate::vec3::Vec3;

/// Rectilinear sampling lattice over a search box. Axis 0 varies fastest.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchBox {
    pub min: [f64; 3],
    pub max: [f64; 3],
    pub counts: [usize; 3],
    pub dim: usize,
}

impl SearchBox {
    pub fn new(dim: usize, min: [f64; 3], max: [f64; 3], counts: [usize; 3]) -> Result<Self> {
        if dim != 2 && dim != 3 {
            return Err(CoreError::validation("search box dimension must be 2 or 3"));
        }
        for a in 0..dim {
            if counts[a] == 0 {
                return Err(CoreError::validation("search box needs at least one node per axis"));
            }
            if max[a] < min[a] {
                return Err(CoreError::validation("search box axis has max < min"));
            }
        }
        let mut counts = counts;
        for a in dim..3 {
            counts[a] = 1;
        }
        Ok(SearchBox {
            min,
            max,
            counts,
            dim,
        })
    }

    pub fn planar(min: [f64; 2], max: [f64; 2], counts: [usize; 2]) -> Result<Self> {
        SearchBox::new(
            2,
            [min[0], min[1], 0.0],
            [max[0], max[1], 0.0],
            [counts[0], counts[1], 1],
        )
    }

    pub fn len(&self) -> usize {
        self.counts[0] * self.counts[1] * self.counts[2]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn coord(&self, axis: usize, i: usize) -> f64 {
        let c = self.counts[axis];
        if c == 1 {
            0.5 * (self.min[axis] + self.max[axis])
        } else {
            self.min[axis] + (self.max[axis] - self.min[axis]) * i as f64 / (c - 1) as f64
        }
    }

    pub fn indices(&self, flat: usize) -> [usize; 3] {
        let ix = flat % self.counts[0];
        let iy = (flat / self.counts[0]) % self.counts[1];
        let iz = flat / (self.counts[0] * self.counts[1]);
        [ix, iy, iz]
    }

    pub fn point(&self, flat: usize) -> Vec3 {
        let [ix, iy, iz] = self.indices(flat);
        Vec3::new(self.coord(0, ix), self.coord(1, iy), self.coord(2, iz))
    }

    /// Lattice spacing per axis (zero for single-node axes).
    pub fn spacing(&self, axis: usize) -> f64 {
        if self.counts[axis] <= 1 {
            0.0
        } else {
            (self.max[axis] - self.min[axis]) / (self.counts[axis] - 1) as f64
        }
    }
}

/// One observation's spectrum, ready for Picard sums.
pub struct DirectionalData {
    pub observation: Observation,
    pub grid: FrequencyGrid,
    pub dim: usize,
    pub spectrum: OperatorSpectrum,
}

impl DirectionalData {
    pub fn from_dataset(dataset: &FieldDataset, mode: SharpMode) -> Result<Self> {
        let matrix = assemble_toeplitz(dataset)?;
        let spectrum = OperatorSpectrum::from_matrix(matrix, mode)?;
        Ok(DirectionalData {
            observation: dataset.observation,
            grid: dataset.grid,
            dim: dataset.manifest.model.shape.dim(),
            spectrum,
        })
    }
}

/// Two opposite observations. `plus` is the one whose location is
/// lexicographically greater, making the pairing canonical regardless of
/// input order.
pub struct PairedData {
    pub plus: DirectionalData,
    pub minus: DirectionalData,
}

/// Groups observations into opposite pairs. Fails loudly when an opposite is
/// missing: the indicator is undefined without it.
pub fn pair_up(data: Vec<DirectionalData>) -> Result<Vec<PairedData>> {
    let mut remaining: Vec<Option<DirectionalData>> = data.into_iter().map(Some).collect();
    let mut pairs = Vec::new();
    for i in 0..remaining.len() {
        let Some(a) = remaining[i].take() else {
            continue;
        };
        let want = a.observation.opposite().location();
        let mut partner = None;
        for slot in remaining.iter_mut().skip(i + 1) {
            if let Some(b) = slot {
                let same_kind = a.observation.is_far() == b.observation.is_far();
                if same_kind && b.observation.location().dist(want) < 1e-9 {
                    partner = slot.take();
                    break;
                }
            }
        }
        let Some(b) = partner else {
            return Err(CoreError::MissingOpposite(a.observation.describe()));
        };
        let (plus, minus) = if a.observation.location().lex_cmp(b.observation.location())
            == std::cmp::Ordering::Greater
        {
            (a, b)
        } else {
            (b, a)
        };
        pairs.push(PairedData { plus, minus });
    }
    pairs.sort_by(|p, q| {
        p.plus
            .observation
            .location()
            .lex_cmp(q.plus.observation.location())
    });
    Ok(pairs)
}

/// Truncated Picard sum `Σ_n |⟨φ, ψ_n⟩|² / max(λ_n, ε_reg)`.
pub fn picard_sum(spectrum: &OperatorSpectrum, probe: &[Complex64]) -> Result<f64> {
    let n = spectrum.n();
    if probe.len() != n {
        return Err(CoreError::DimensionMismatch(format!(
            "probe has {} entries, spectrum has {n}",
            probe.len()
        )));
    }
    let mut sum = 0.0f64;
    for j in 0..n {
        let mut coeff = Complex64::new(0.0, 0.0);
        for (i, &p) in probe.iter().enumerate() {
            coeff += p * spectrum.vectors[[i, j]].conj();
        }
        let num = coeff.norm_sqr();
        let den = spectrum.sharp[j].max(spectrum.floor);
        if den == 0.0 {
            if num > 0.0 {
                return Ok(f64::INFINITY);
            }
        } else {
            sum += num / den;
        }
    }
    Ok(sum)
}

fn directional_picard(
    data: &DirectionalData,
    y: Vec3,
    regime: &Regime,
    params: &ProbeParams,
) -> Result<f64> {
    let probe = discretize_probe(
        &data.observation,
        regime,
        params,
        y,
        data.dim,
        &data.grid,
    )?;
    picard_sum(&data.spectrum, &probe)
}

/// `W^{(x̂)}(y) = [I^{(x̂)}(y) + I^{(−x̂)}(y)]^{-1}` for one opposite pair.
pub fn pair_indicator(
    pair: &PairedData,
    y: Vec3,
    regime: &Regime,
    params: &ProbeParams,
) -> Result<f64> {
    let sum = directional_picard(&pair.plus, y, regime, params)?
        + directional_picard(&pair.minus, y, regime, params)?;
    Ok(1.0 / sum)
}

/// Multi-pair fusion `W(y) = [Σ_j 1/W^{(x̂_j)}(y)]^{-1}`: the reciprocal of
/// the Picard sums of all `2M` observations.
pub fn multi_indicator(
    pairs: &[PairedData],
    y: Vec3,
    regime: &Regime,
    params: &ProbeParams,
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(CoreError::validation("indicator needs at least one pair"));
    }
    let mut total = 0.0;
    for pair in pairs {
        total += directional_picard(&pair.plus, y, regime, params)?;
        total += directional_picard(&pair.minus, y, regime, params)?;
    }
    Ok(1.0 / total)
}

/// Raw and max-normalized indicator values over a search lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct IndicatorGrid {
    pub search: SearchBox,
    pub raw: Vec<f64>,
    pub normalized: Vec<f64>,
}

/// Evaluates the multi-pair indicator at every lattice point. Spectra are
/// computed once (by the caller); lattice points run in parallel and are
/// reassembled in index order.
pub fn grid_sweep(
    pairs: &[PairedData],
    search: &SearchBox,
    regime: &Regime,
    params: &ProbeParams,
) -> Result<IndicatorGrid> {
    if pairs.is_empty() {
        return Err(CoreError::validation("grid sweep needs at least one pair"));
    }
    regime.window(params.eta)?;
    let raw: Vec<f64> = (0..search.len())
        .into_par_iter()
        .map(|i| multi_indicator(pairs, search.point(i), regime, params))
        .collect::<Result<_>>()?;
    let max = raw.iter().cloned().fold(0.0f64, f64::max);
    let normalized = if max > 0.0 {
        raw.iter().map(|&v| v / max).collect()
    } else {
        raw.clone()
    };
    Ok(IndicatorGrid {
        search: search.clone(),
        raw,
        normalized,
    })
}

/// Indicator values along the segment `origin + t·dir`, `t ∈ ts`.
pub fn line_sweep(
    pairs: &[PairedData],
    origin: Vec3,
    dir: Vec3,
    ts: &[f64],
    regime: &Regime,
    params: &ProbeParams,
) -> Result<Vec<f64>> {
    ts.iter()
        .map(|&t| multi_indicator(pairs, origin.add(dir.scale(t)), regime, params))
        .collect()
}

/// `normalized ≥ δ` for `δ ∈ (0, 1]`.
pub fn threshold_mask(grid: &IndicatorGrid, delta: f64) -> Result<Vec<bool>> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(CoreError::validation("threshold must lie in (0, 1]"));
    }
    Ok(grid.normalized.iter().map(|&v| v >= delta).collect())
}

/// Labels the masked cells by face-connected components; unmasked cells get
/// `usize::MAX`. Returns the labels and the component count.
pub fn connected_components(search: &SearchBox, mask: &[bool]) -> (Vec<usize>, usize) {
    let mut labels = vec![usize::MAX; mask.len()];
    let mut count = 0;
    let mut queue = std::collections::VecDeque::new();
    for start in 0..mask.len() {
        if !mask[start] || labels[start] != usize::MAX {
            continue;
        }
        labels[start] = count;
        queue.push_back(start);
        while let Some(cell) = queue.pop_front() {
            let [ix, iy, iz] = search.indices(cell);
            let mut push = |jx: i64, jy: i64, jz: i64| {
                if jx < 0
                    || jy < 0
                    || jz < 0
                    || jx >= search.counts[0] as i64
                    || jy >= search.counts[1] as i64
                    || jz >= search.counts[2] as i64
                {
                    return;
                }
                let j = jx as usize
                    + jy as usize * search.counts[0]
                    + jz as usize * search.counts[0] * search.counts[1];
                if mask[j] && labels[j] == usize::MAX {
                    labels[j] = count;
                    queue.push_back(j);
                }
            };
            let (x, y, z) = (ix as i64, iy as i64, iz as i64);
            push(x - 1, y, z);
            push(x + 1, y, z);
            push(x, y - 1, z);
            push(x, y + 1, z);
            if search.dim == 3 {
                push(x, y, z - 1);
                push(x, y, z + 1);
            }
        }
        count += 1;
    }
    (labels, count)
}

/// One-dimensional η-scan of `1/I_η(z)` at a fixed test point, with the
/// detected drop location (the unknown moment estimate).
#[derive(Clone, Debug, PartialEq)]
pub struct ScanCurve {
    /// Ascending η values.
    pub etas: Vec<f64>,
    pub values: Vec<f64>,
    pub z: Vec3,
    pub epsilon: f64,
    pub estimate: Option<f64>,
}

/// Minimum one-step log-drop that counts as a detection.
const DROP_THRESHOLD: f64 = std::f64::consts::LN_2;

/// Sweeps η and records `1/I_η(z)` against a single observation's spectrum.
/// The estimate is the midpoint of the steepest proportional drop, walking
/// toward the unknown moment (upward in η when `t_max` is unknown, downward
/// when `t_min` is); `None` when no step loses more than a factor of two.
pub fn moment_scan(
    data: &DirectionalData,
    z: Vec3,
    epsilon: f64,
    etas: &[f64],
    regime: &Regime,
) -> Result<ScanCurve> {
    if etas.len() < 2 {
        return Err(CoreError::validation("moment scan needs at least two eta values"));
    }
    let mut etas = etas.to_vec();
    etas.sort_by(f64::total_cmp);
    for &eta in &etas {
        regime.window(eta)?;
    }
    let params_for = |eta: f64| ProbeParams { eta, epsilon };
    let values: Vec<f64> = etas
        .iter()
        .map(|&eta| {
            let sum = directional_picard(data, z, regime, &params_for(eta))?;
            Ok(1.0 / sum)
        })
        .collect::<Result<_>>()?;

    let order: Vec<usize> = match regime {
        Regime::TmaxUnknown { .. } => (0..etas.len()).collect(),
        Regime::TminUnknown { .. } => (0..etas.len()).rev().collect(),
    };
    let mut best_drop = 0.0;
    let mut estimate = None;
    for w in order.windows(2) {
        let (i, j) = (w[0], w[1]);
        let drop = values[i].max(1e-300).ln() - values[j].max(1e-300).ln();
        if drop > best_drop {
            best_drop = drop;
            estimate = Some(0.5 * (etas[i] + etas[j]));
        }
    }
    if best_drop < DROP_THRESHOLD {
        estimate = None;
    }
    Ok(ScanCurve {
        etas,
        values,
        z,
        epsilon,
        estimate,
    })
}

//! Plain-text serialization of datasets, indicator grids, scan curves and
//! spectrum dumps, plus the run manifest embedded in every output.
//!
//! All floats are written with 17 significant digits, so read∘write is exact
//! and two writes of the same value are byte-identical. Manifests are
//! canonical JSON (fixed field order, shortest-roundtrip floats); the model
//! hash is the SHA-256 of the synthesis-relevant manifest subset.

use std::fmt::Write as _;
use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{CoreError, Result};
use crate::imaging::{IndicatorGrid, ScanCurve, SearchBox};
use crate::source::SourceModel;
use crate::spectral::{FrequencyGrid, OperatorSpectrum};
use crate::synthesis::{FieldDataset, Observation, QuadratureSpec};
use crate::vec3::Vec3;

/// Provenance carried by every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub tool: String,
    pub model: SourceModel,
    pub grid: FrequencyGrid,
    pub observations: Vec<Observation>,
    pub quadrature: QuadratureSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise_level: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub regime: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_reg_rel: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub delta: Option<f64>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
    pub model_hash: String,
}

#[derive(Serialize)]
struct HashedInputs<'a> {
    model: &'a SourceModel,
    grid: &'a FrequencyGrid,
    quadrature: &'a QuadratureSpec,
    noise_level: Option<f64>,
    seed: Option<u64>,
}

fn compute_model_hash(
    model: &SourceModel,
    grid: &FrequencyGrid,
    quadrature: &QuadratureSpec,
    noise_level: Option<f64>,
    seed: Option<u64>,
) -> String {
    let canonical = serde_json::to_string(&HashedInputs {
        model,
        grid,
        quadrature,
        noise_level,
        seed,
    })
    .expect("manifest inputs serialize");
    let digest = Sha256::digest(canonical.as_bytes());
    let mut hex = String::with_capacity(64);
    for b in digest {
        let _ = write!(hex, "{b:02x}");
    }
    hex
}

impl Manifest {
    pub fn for_dataset(
        model: &SourceModel,
        grid: &FrequencyGrid,
        observation: &Observation,
        quadrature: &QuadratureSpec,
        noise_level: Option<f64>,
        seed: Option<u64>,
    ) -> Manifest {
        Manifest {
            tool: format!("wavesrc {}", env!("CARGO_PKG_VERSION")),
            model: model.clone(),
            grid: *grid,
            observations: vec![*observation],
            quadrature: *quadrature,
            noise_level,
            seed,
            eta: None,
            regime: None,
            eps_reg_rel: None,
            delta: None,
            warnings: Vec::new(),
            model_hash: compute_model_hash(model, grid, quadrature, noise_level, seed),
        }
    }

    /// Manifest for an imaging product derived from datasets sharing `base`'s
    /// synthesis inputs.
    pub fn for_imaging(
        base: &Manifest,
        observations: Vec<Observation>,
        eta: f64,
        regime: &str,
        eps_reg_rel: f64,
        delta: Option<f64>,
    ) -> Manifest {
        Manifest {
            observations,
            eta: Some(eta),
            regime: Some(regime.to_string()),
            eps_reg_rel: Some(eps_reg_rel),
            delta,
            warnings: Vec::new(),
            ..base.clone()
        }
    }

    /// Records noise parameters and refreshes the hash accordingly.
    pub fn note_noise(&mut self, level: f64, seed: u64) {
        self.noise_level = Some(level);
        self.seed = Some(seed);
        self.model_hash = compute_model_hash(
            &self.model,
            &self.grid,
            &self.quadrature,
            self.noise_level,
            self.seed,
        );
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("manifest serializes")
    }

    pub fn from_json(s: &str) -> Result<Manifest> {
        serde_json::from_str(s)
            .map_err(|e| CoreError::validation(format!("bad manifest json: {e}")))
    }
}

/// 17-significant-digit float formatting; round-trips f64 exactly.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(tok: &str, line: usize) -> Result<f64> {
    tok.parse::<f64>().map_err(|_| CoreError::Parse {
        line,
        msg: format!("expected a float, got {tok:?}"),
    })
}

fn header_line<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
    prefix: &str,
) -> Result<(usize, String)> {
    match lines.next() {
        Some((n, l)) if l.starts_with(prefix) => Ok((n, l[prefix.len()..].trim().to_string())),
        Some((n, l)) => Err(CoreError::Parse {
            line: n,
            msg: format!("expected header {prefix:?}, got {l:?}"),
        }),
        None => Err(CoreError::Parse {
            line: 0,
            msg: format!("missing header {prefix:?}"),
        }),
    }
}

// ---------------------------------------------------------------------------
// Dataset files
// ---------------------------------------------------------------------------

pub fn dataset_to_string(ds: &FieldDataset) -> String {
    let mut out = String::new();
    match &ds.observation {
        Observation::FarField { direction } => {
            let d = direction.vec();
            out.push_str("# mode farfield\n");
            let _ = writeln!(
                out,
                "# direction {} {} {}",
                fmt_f64(d.x),
                fmt_f64(d.y),
                fmt_f64(d.z)
            );
        }
        Observation::NearField { receiver } => {
            out.push_str("# mode nearfield\n");
            let _ = writeln!(
                out,
                "# receiver {} {} {}",
                fmt_f64(receiver.x),
                fmt_f64(receiver.y),
                fmt_f64(receiver.z)
            );
        }
    }
    let _ = writeln!(
        out,
        "# kc {} K {} N {}",
        fmt_f64(ds.grid.center()),
        fmt_f64(ds.grid.half_band()),
        ds.grid.n
    );
    let _ = writeln!(out, "# model-hash {}", ds.manifest.model_hash);
    let _ = writeln!(out, "# manifest {}", ds.manifest.to_json());
    for (o, s) in ds.samples.iter().enumerate() {
        let _ = writeln!(
            out,
            "{} {} {}",
            fmt_f64(ds.wavenumber(o)),
            fmt_f64(s.re),
            fmt_f64(s.im)
        );
    }
    out
}

pub fn write_dataset(path: &Path, ds: &FieldDataset) -> Result<()> {
    std::fs::write(path, dataset_to_string(ds))?;
    Ok(())
}

pub fn parse_dataset(text: &str) -> Result<FieldDataset> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (mode_line, mode) = header_line(&mut lines, "# mode ")?;
    let far = match mode.as_str() {
        "farfield" => true,
        "nearfield" => false,
        other => {
            return Err(CoreError::Parse {
                line: mode_line,
                msg: format!("unknown mode {other:?}"),
            })
        }
    };
    let loc_prefix = if far { "# direction " } else { "# receiver " };
    let (loc_line, loc) = header_line(&mut lines, loc_prefix)?;
    let coords: Vec<&str> = loc.split_whitespace().collect();
    if coords.len() != 3 {
        return Err(CoreError::Parse {
            line: loc_line,
            msg: "expected three coordinates".into(),
        });
    }
    let loc = Vec3::new(
        parse_f64(coords[0], loc_line)?,
        parse_f64(coords[1], loc_line)?,
        parse_f64(coords[2], loc_line)?,
    );
    let (grid_line, grid_text) = header_line(&mut lines, "# kc ")?;
    let toks: Vec<&str> = grid_text.split_whitespace().collect();
    if toks.len() != 5 || toks[1] != "K" || toks[3] != "N" {
        return Err(CoreError::Parse {
            line: grid_line,
            msg: "expected `kc <v> K <v> N <n>`".into(),
        });
    }
    let kc = parse_f64(toks[0], grid_line)?;
    let half = parse_f64(toks[2], grid_line)?;
    let n: usize = toks[4].parse().map_err(|_| CoreError::Parse {
        line: grid_line,
        msg: format!("bad N {:?}", toks[4]),
    })?;
    let (hash_line, hash) = header_line(&mut lines, "# model-hash ")?;
    let (manifest_line, manifest_json) = header_line(&mut lines, "# manifest ")?;
    let manifest = Manifest::from_json(&manifest_json).map_err(|e| CoreError::Parse {
        line: manifest_line,
        msg: e.to_string(),
    })?;
    if manifest.model_hash != hash {
        return Err(CoreError::Parse {
            line: hash_line,
            msg: "model-hash disagrees with the embedded manifest".into(),
        });
    }
    let grid = manifest.grid;
    if grid.n != n
        || (grid.center() - kc).abs() > 1e-9 * (1.0 + kc.abs())
        || (grid.half_band() - half).abs() > 1e-9 * (1.0 + half.abs())
    {
        return Err(CoreError::Parse {
            line: grid_line,
            msg: "grid header disagrees with the embedded manifest".into(),
        });
    }
    let observation = if far {
        Observation::FarField {
            direction: crate::vec3::UnitVec::new(loc).map_err(|e| CoreError::Parse {
                line: loc_line,
                msg: e.to_string(),
            })?,
        }
    } else {
        Observation::NearField { receiver: loc }
    };

    let mut samples = Vec::with_capacity(grid.sample_count());
    let mut last_line = manifest_line;
    for (line_no, row) in lines {
        last_line = line_no;
        if row.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(CoreError::Parse {
                line: line_no,
                msg: "expected `k re im`".into(),
            });
        }
        let k = parse_f64(toks[0], line_no)?;
        let o = samples.len() as i64 - (grid.n as i64 - 1);
        let expected_k = grid.diagonal_wavenumber(o);
        if (k - expected_k).abs() > 1e-9 * (1.0 + expected_k.abs()) {
            return Err(CoreError::Parse {
                line: line_no,
                msg: format!("sample at k = {k} where k = {expected_k} was expected"),
            });
        }
        samples.push(Complex64::new(
            parse_f64(toks[1], line_no)?,
            parse_f64(toks[2], line_no)?,
        ));
    }
    if samples.len() != grid.sample_count() {
        return Err(CoreError::Parse {
            line: last_line + 1,
            msg: format!(
                "dataset truncated: {} of {} samples",
                samples.len(),
                grid.sample_count()
            ),
        });
    }
    FieldDataset::new(observation, grid, samples, manifest)
}

pub fn read_dataset(path: &Path) -> Result<FieldDataset> {
    parse_dataset(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Indicator grids and masks
// ---------------------------------------------------------------------------

pub fn grid_to_string(grid: &IndicatorGrid, manifest: &Manifest) -> String {
    let mut out = String::new();
    let dim = grid.search.dim;
    let _ = writeln!(out, "# axes {dim}");
    for a in 0..dim {
        let _ = writeln!(
            out,
            "# axis {} {} {}",
            fmt_f64(grid.search.min[a]),
            fmt_f64(grid.search.max[a]),
            grid.search.counts[a]
        );
    }
    let _ = writeln!(out, "# manifest {}", manifest.to_json());
    for i in 0..grid.search.len() {
        let p = grid.search.point(i);
        let _ = write!(out, "{} {}", fmt_f64(p.x), fmt_f64(p.y));
        if dim == 3 {
            let _ = write!(out, " {}", fmt_f64(p.z));
        }
        let _ = writeln!(out, " {} {}", fmt_f64(grid.raw[i]), fmt_f64(grid.normalized[i]));
    }
    out
}

pub fn write_grid(path: &Path, grid: &IndicatorGrid, manifest: &Manifest) -> Result<()> {
    std::fs::write(path, grid_to_string(grid, manifest))?;
    Ok(())
}

fn parse_axes<'a>(
    lines: &mut impl Iterator<Item = (usize, &'a str)>,
) -> Result<(SearchBox, Manifest)> {
    let (axes_line, axes) = header_line(lines, "# axes ")?;
    let dim: usize = axes.parse().map_err(|_| CoreError::Parse {
        line: axes_line,
        msg: format!("bad axes count {axes:?}"),
    })?;
    if dim != 2 && dim != 3 {
        return Err(CoreError::Parse {
            line: axes_line,
            msg: format!("axes must be 2 or 3, got {dim}"),
        });
    }
    let mut min = [0.0; 3];
    let mut max = [0.0; 3];
    let mut counts = [1usize; 3];
    for a in 0..dim {
        let (l, text) = header_line(lines, "# axis ")?;
        let toks: Vec<&str> = text.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(CoreError::Parse {
                line: l,
                msg: "expected `axis <min> <max> <count>`".into(),
            });
        }
        min[a] = parse_f64(toks[0], l)?;
        max[a] = parse_f64(toks[1], l)?;
        counts[a] = toks[2].parse().map_err(|_| CoreError::Parse {
            line: l,
            msg: format!("bad count {:?}", toks[2]),
        })?;
    }
    let (l, manifest_json) = header_line(lines, "# manifest ")?;
    let manifest = Manifest::from_json(&manifest_json).map_err(|e| CoreError::Parse {
        line: l,
        msg: e.to_string(),
    })?;
    let search = SearchBox::new(dim, min, max, counts).map_err(|e| CoreError::Parse {
        line: axes_line,
        msg: e.to_string(),
    })?;
    Ok((search, manifest))
}

pub fn parse_grid(text: &str) -> Result<(IndicatorGrid, Manifest)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (search, manifest) = parse_axes(&mut lines)?;
    let dim = search.dim;
    let mut raw = Vec::with_capacity(search.len());
    let mut normalized = Vec::with_capacity(search.len());
    let mut last_line = 0;
    for (line_no, row) in lines {
        last_line = line_no;
        if row.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = row.split_whitespace().collect();
        let expect = dim + 2;
        if toks.len() != expect {
            return Err(CoreError::Parse {
                line: line_no,
                msg: format!("expected {expect} columns, got {}", toks.len()),
            });
        }
        raw.push(parse_f64(toks[dim], line_no)?);
        normalized.push(parse_f64(toks[dim + 1], line_no)?);
    }
    if raw.len() != search.len() {
        return Err(CoreError::Parse {
            line: last_line + 1,
            msg: format!("grid truncated: {} of {} rows", raw.len(), search.len()),
        });
    }
    Ok((
        IndicatorGrid {
            search,
            raw,
            normalized,
        },
        manifest,
    ))
}

pub fn read_grid(path: &Path) -> Result<(IndicatorGrid, Manifest)> {
    parse_grid(&std::fs::read_to_string(path)?)
}

pub fn mask_to_string(search: &SearchBox, mask: &[bool], manifest: &Manifest) -> String {
    let mut out = String::new();
    let dim = search.dim;
    let _ = writeln!(out, "# axes {dim}");
    for a in 0..dim {
        let _ = writeln!(
            out,
            "# axis {} {} {}",
            fmt_f64(search.min[a]),
            fmt_f64(search.max[a]),
            search.counts[a]
        );
    }
    let _ = writeln!(out, "# manifest {}", manifest.to_json());
    for i in 0..search.len() {
        let p = search.point(i);
        let _ = write!(out, "{} {}", fmt_f64(p.x), fmt_f64(p.y));
        if dim == 3 {
            let _ = write!(out, " {}", fmt_f64(p.z));
        }
        let _ = writeln!(out, " {}", u8::from(mask[i]));
    }
    out
}

pub fn write_mask(path: &Path, search: &SearchBox, mask: &[bool], manifest: &Manifest) -> Result<()> {
    std::fs::write(path, mask_to_string(search, mask, manifest))?;
    Ok(())
}

/// Grayscale PGM raster of the normalized values (2-d grids), row 0 at the
/// top of the image (largest axis-1 coordinate).
pub fn grid_to_pgm(grid: &IndicatorGrid) -> Result<String> {
    if grid.search.dim != 2 {
        return Err(CoreError::validation("pgm rasters are 2-d only"));
    }
    let (nx, ny) = (grid.search.counts[0], grid.search.counts[1]);
    let mut out = format!("P2\n{nx} {ny}\n255\n");
    for row in (0..ny).rev() {
        let mut first = true;
        for col in 0..nx {
            let v = grid.normalized[row * nx + col];
            let level = (v.clamp(0.0, 1.0) * 255.0).round() as u8;
            if !first {
                out.push(' ');
            }
            let _ = write!(out, "{level}");
            first = false;
        }
        out.push('\n');
    }
    Ok(out)
}

pub fn write_pgm(path: &Path, grid: &IndicatorGrid) -> Result<()> {
    std::fs::write(path, grid_to_pgm(grid)?)?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Scan curves
// ---------------------------------------------------------------------------

pub fn scan_to_string(curve: &ScanCurve, manifest: &Manifest) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# z {} {} {}",
        fmt_f64(curve.z.x),
        fmt_f64(curve.z.y),
        fmt_f64(curve.z.z)
    );
    let _ = writeln!(out, "# epsilon {}", fmt_f64(curve.epsilon));
    match curve.estimate {
        Some(e) => {
            let _ = writeln!(out, "# estimate {}", fmt_f64(e));
        }
        None => {
            let _ = writeln!(out, "# estimate none");
        }
    }
    let _ = writeln!(out, "# manifest {}", manifest.to_json());
    for (eta, v) in curve.etas.iter().zip(&curve.values) {
        let _ = writeln!(out, "{} {}", fmt_f64(*eta), fmt_f64(*v));
    }
    out
}

pub fn write_scan(path: &Path, curve: &ScanCurve, manifest: &Manifest) -> Result<()> {
    std::fs::write(path, scan_to_string(curve, manifest))?;
    Ok(())
}

pub fn parse_scan(text: &str) -> Result<(ScanCurve, Manifest)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let (zl, z_text) = header_line(&mut lines, "# z ")?;
    let toks: Vec<&str> = z_text.split_whitespace().collect();
    if toks.len() != 3 {
        return Err(CoreError::Parse {
            line: zl,
            msg: "expected three coordinates".into(),
        });
    }
    let z = Vec3::new(
        parse_f64(toks[0], zl)?,
        parse_f64(toks[1], zl)?,
        parse_f64(toks[2], zl)?,
    );
    let (el, eps_text) = header_line(&mut lines, "# epsilon ")?;
    let epsilon = parse_f64(&eps_text, el)?;
    let (estl, est_text) = header_line(&mut lines, "# estimate ")?;
    let estimate = if est_text == "none" {
        None
    } else {
        Some(parse_f64(&est_text, estl)?)
    };
    let (ml, manifest_json) = header_line(&mut lines, "# manifest ")?;
    let manifest = Manifest::from_json(&manifest_json).map_err(|e| CoreError::Parse {
        line: ml,
        msg: e.to_string(),
    })?;
    let mut etas = Vec::new();
    let mut values = Vec::new();
    for (line_no, row) in lines {
        if row.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = row.split_whitespace().collect();
        if toks.len() != 2 {
            return Err(CoreError::Parse {
                line: line_no,
                msg: "expected `eta value`".into(),
            });
        }
        etas.push(parse_f64(toks[0], line_no)?);
        values.push(parse_f64(toks[1], line_no)?);
    }
    Ok((
        ScanCurve {
            etas,
            values,
            z,
            epsilon,
            estimate,
        },
        manifest,
    ))
}

pub fn read_scan(path: &Path) -> Result<(ScanCurve, Manifest)> {
    parse_scan(&std::fs::read_to_string(path)?)
}

// ---------------------------------------------------------------------------
// Spectrum dumps
// ---------------------------------------------------------------------------

/// `n λ̃_re λ̃_im λ_sharp` per row, for regression diffing.
pub fn spectrum_to_string(spectrum: &OperatorSpectrum) -> String {
    let mut out = String::new();
    for (i, (raw, sharp)) in spectrum.raw.iter().zip(&spectrum.sharp).enumerate() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            i + 1,
            fmt_f64(raw.re),
            fmt_f64(raw.im),
            fmt_f64(*sharp)
        );
    }
    out
}

pub fn write_spectrum_dump(path: &Path, spectrum: &OperatorSpectrum) -> Result<()> {
    std::fs::write(path, spectrum_to_string(spectrum))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Shape;
    use crate::source::Amplitude;
    use crate::spectral::FrequencyGrid;
    use crate::synthesis::{synthesize_dataset, QuadratureSpec};
    use crate::vec3::UnitVec;

    fn sample_dataset() -> FieldDataset {
        let model = SourceModel::new(
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
        .unwrap();
        let grid = FrequencyGrid::doubled(8.0 * std::f64::consts::PI / 3.0, 8).unwrap();
        let quad = QuadratureSpec {
            nodes_2d: 40,
            ..QuadratureSpec::default()
        };
        synthesize_dataset(
            &model,
            Observation::FarField {
                direction: UnitVec::new(Vec3::new(1.0, 0.0, 0.0)).unwrap(),
            },
            &grid,
            &quad,
        )
        .unwrap()
    }

    #[test]
    fn fmt_round_trips_f64_exactly() {
        for v in [
            0.0,
            1.0 / 3.0,
            std::f64::consts::PI,
            -2.2250738585072014e-308,
            1.7976931348623157e308,
            -0.1,
        ] {
            let s = fmt_f64(v);
            let back: f64 = s.parse().unwrap();
            assert_eq!(back.to_bits(), v.to_bits(), "{v} -> {s}");
        }
    }

    #[test]
    fn dataset_round_trip_is_bit_identical() {
        let ds = sample_dataset();
        let text = dataset_to_string(&ds);
        let back = parse_dataset(&text).unwrap();
        assert_eq!(back.samples, ds.samples);
        assert_eq!(back.grid, ds.grid);
        assert_eq!(back.manifest, ds.manifest);
        assert_eq!(dataset_to_string(&back), text);
    }

    #[test]
    fn truncated_dataset_reports_line() {
        let ds = sample_dataset();
        let text = dataset_to_string(&ds);
        let lines: Vec<&str> = text.lines().collect();
        let cut = lines[..lines.len() - 3].join("\n");
        match parse_dataset(&cut) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, lines.len() - 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn corrupted_row_reports_line() {
        let ds = sample_dataset();
        let mut lines: Vec<String> = dataset_to_string(&ds).lines().map(String::from).collect();
        lines[7] = "not a row".into();
        match parse_dataset(&lines.join("\n")) {
            Err(CoreError::Parse { line, .. }) => assert_eq!(line, 8),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn manifest_hash_is_stable_and_input_sensitive() {
        let ds = sample_dataset();
        let again = sample_dataset();
        assert_eq!(ds.manifest.model_hash, again.manifest.model_hash);
        let noisy = crate::synthesis::inject_noise(&ds, 0.01, 3).unwrap();
        assert_ne!(ds.manifest.model_hash, noisy.manifest.model_hash);
        // Re-serialization of the same manifest is byte-identical.
        assert_eq!(ds.manifest.to_json(), again.manifest.to_json());
    }

    #[test]
    fn grid_round_trip_including_3d_axes() {
        let search = crate::imaging::SearchBox::new(
            3,
            [-1.0, -2.0, -3.0],
            [1.0, 2.0, 3.0],
            [3, 4, 5],
        )
        .unwrap();
        let n = search.len();
        let raw: Vec<f64> = (0..n).map(|i| i as f64 / n as f64).collect();
        let max = raw.iter().cloned().fold(0.0f64, f64::max);
        let grid = IndicatorGrid {
            search,
            normalized: raw.iter().map(|v| v / max).collect(),
            raw,
        };
        let manifest = sample_dataset().manifest;
        let text = grid_to_string(&grid, &manifest);
        let (back, back_manifest) = parse_grid(&text).unwrap();
        assert_eq!(back, grid);
        assert_eq!(back_manifest, manifest);
        assert_eq!(grid_to_string(&back, &back_manifest), text);
    }

    #[test]
    fn scan_round_trip() {
        let curve = ScanCurve {
            etas: vec![0.1, 0.2, 0.3],
            values: vec![1.0, 0.9, 0.01],
            z: Vec3::planar(-1.59, 0.0),
            epsilon: 0.0,
            estimate: Some(0.25),
        };
        let manifest = sample_dataset().manifest;
        let text = scan_to_string(&curve, &manifest);
        let (back, _) = parse_scan(&text).unwrap();
        assert_eq!(back, curve);

        let none = ScanCurve {
            estimate: None,
            ..curve
        };
        let text = scan_to_string(&none, &manifest);
        let (back, _) = parse_scan(&text).unwrap();
        assert_eq!(back.estimate, None);
    }

    #[test]
    fn pgm_raster_shape() {
        let search = crate::imaging::SearchBox::planar([0.0, 0.0], [1.0, 1.0], [3, 2]).unwrap();
        let grid = IndicatorGrid {
            search,
            raw: vec![0.0, 0.5, 1.0, 1.0, 0.5, 0.0],
            normalized: vec![0.0, 0.5, 1.0, 1.0, 0.5, 0.0],
        };
        let pgm = grid_to_pgm(&grid).unwrap();
        let mut lines = pgm.lines();
        assert_eq!(lines.next(), Some("P2"));
        assert_eq!(lines.next(), Some("3 2"));
        assert_eq!(lines.next(), Some("255"));
        assert_eq!(lines.next(), Some("255 128 0"));
        assert_eq!(lines.next(), Some("0 128 255"));
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn float_text_round_trip(bits in any::<u64>()) {
                let v = f64::from_bits(bits);
                prop_assume!(v.is_finite());
                let back: f64 = fmt_f64(v).parse().unwrap();
                prop_assert_eq!(back.to_bits(), v.to_bits());
            }
        }
    }
}

//! Intrinsic volumes μ_k.
//!
//! Grid regions get an exact per-cell closed form: an open d-box with edge
//! lengths ℓ has μ_k = (-1)^(d-k) e_k(ℓ), e_k the elementary symmetric
//! polynomial, and μ_k is additive over the disjoint cells. Arbitrary cell
//! complexes get two Monte Carlo estimators over Haar-random subspaces:
//! projections onto k-planes and slices by (n-k)-flats. Both are scaled by
//! a per-(n, k) constant calibrated on the closed unit cube.

use std::collections::BTreeMap;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::complex::{sign, slice_chi_cells, CellComplex, GridComplex, GridRegion, OpenPolytope};
use crate::error::{Error, Result};
use crate::geom::{project, sample_subspace, AffineFlat};
use crate::mc::{sample_values, with_resampling, SampleStats};

/// Seed of the default calibration run.
pub const CALIBRATION_SEED: u64 = 0x4861_6477;
/// Sample count of the default calibration run.
pub const DEFAULT_CALIBRATION_SAMPLES: usize = 100_000;
/// Largest k served by the projection route (hull measures in k ≤ 3).
pub const MAX_MC_K: usize = 3;

/// e_k of `values`.
pub fn elementary_symmetric(values: &[f64], k: usize) -> f64 {
    let mut e = vec![0.0; k + 1];
    e[0] = 1.0;
    for &x in values {
        for j in (1..=k).rev() {
            e[j] += e[j - 1] * x;
        }
    }
    e[k]
}

/// μ_k of an open box with the given edge lengths.
pub fn open_box_mu(lengths: &[f64], k: usize) -> f64 {
    let d = lengths.len();
    if k > d {
        return 0.0;
    }
    sign(d - k) as f64 * elementary_symmetric(lengths, k)
}

/// Exact μ_k of a grid region.
pub fn mu_grid_exact(region: &GridRegion, k: usize) -> Result<f64> {
    let n = region.complex().dim();
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    let complex = region.complex();
    Ok(region.cells().map(|c| open_box_mu(&complex.edge_lengths(&c), k)).sum())
}

/// Monte Carlo value with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    pub value: f64,
    pub stderr: f64,
    /// Samples drawn; 1 for exactly evaluated cases.
    pub samples: usize,
    pub seed: u64,
    /// Normalizing constant the raw mean was multiplied by.
    pub constant: f64,
}

impl MCEstimate {
    pub fn exact(value: f64, seed: u64) -> MCEstimate {
        MCEstimate { value, stderr: 0.0, samples: 1, seed, constant: 1.0 }
    }

    /// Is `target` within `sigmas` standard errors?
    pub fn agrees_with(&self, target: f64, sigmas: f64) -> bool {
        (self.value - target).abs() <= sigmas * self.stderr
    }
}

/// Result of calibrating one (n, k) constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub n: usize,
    pub k: usize,
    pub constant: f64,
    pub stderr: f64,
    pub samples: usize,
    pub seed: u64,
}

/// Normalizing constants c[n][k] turning probability-Haar averages into
/// intrinsic volumes. c[n][0] = c[n][n] = 1.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct CroftonConstants {
    entries: BTreeMap<String, Calibration>,
}

fn key(n: usize, k: usize) -> String {
    format!("{n},{k}")
}

impl CroftonConstants {
    pub fn new() -> CroftonConstants {
        CroftonConstants::default()
    }

    pub fn get(&self, n: usize, k: usize) -> Result<f64> {
        if k > n {
            return Err(Error::KOutOfRange { k, n });
        }
        if k == 0 || k == n {
            return Ok(1.0);
        }
        self.entries
            .get(&key(n, k))
            .map(|c| c.constant)
            .ok_or_else(|| Error::Calibration(format!("no calibrated constant for n = {n}, k = {k}")))
    }

    pub fn calibration(&self, n: usize, k: usize) -> Option<&Calibration> {
        self.entries.get(&key(n, k))
    }

    pub fn insert(&mut self, c: Calibration) {
        self.entries.insert(key(c.n, c.k), c);
    }

    pub fn entries(&self) -> impl Iterator<Item = &Calibration> {
        self.entries.values()
    }

    /// Calibrates (n, k) unless already present.
    pub fn ensure(&mut self, n: usize, k: usize, samples: usize, seed: u64) -> Result<f64> {
        if k == 0 || k == n || self.entries.contains_key(&key(n, k)) {
            return self.get(n, k);
        }
        let c = calibrate(n, k, samples, seed)?;
        self.insert(c);
        Ok(c.constant)
    }

    /// Default table for ambient dimension `n`: every 1 ≤ k ≤ min(3, n-1).
    pub fn default_for(n: usize) -> Result<CroftonConstants> {
        let mut t = CroftonConstants::new();
        for k in 1..n.min(MAX_MC_K + 1) {
            t.ensure(n, k, DEFAULT_CALIBRATION_SAMPLES, CALIBRATION_SEED)?;
        }
        Ok(t)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json(text: &str) -> Result<CroftonConstants> {
        let t: CroftonConstants = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        for c in t.entries.values() {
            if !(c.constant.is_finite() && c.constant > 0.0) {
                return Err(Error::Calibration(format!("non-positive constant for n = {}, k = {}", c.n, c.k)));
            }
        }
        Ok(t)
    }
}

fn check_request(n: usize, k: usize, samples: usize) -> Result<()> {
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k > MAX_MC_K && k != n {
        return Err(Error::Unsupported(format!("Monte Carlo μ_{k} in R^{n} (k must be ≤ {MAX_MC_K} or n)")));
    }
    if samples < 2 {
        return Err(Error::InvalidSamples(format!("need at least 2 samples, got {samples}")));
    }
    Ok(())
}

/// k = 0 and k = n need no sampling.
fn exact_endpoint(cells: &[OpenPolytope], n: usize, k: usize) -> Option<f64> {
    if k == 0 {
        Some(cells.iter().map(|c| c.chi() as f64).sum())
    } else if k == n {
        Some(cells.iter().filter(|c| c.dim == n).map(|c| c.volume()).sum())
    } else {
        None
    }
}

/// Uncalibrated projection estimator: per Haar-random k-plane L, the sum
/// over open cells σ with dim σ ≥ k of (-1)^(dim σ - k) vol_k(π_L σ).
pub fn crofton_raw(cells: &[OpenPolytope], n: usize, k: usize, samples: usize, seed: u64) -> Result<SampleStats> {
    let relevant: Vec<&OpenPolytope> = cells.iter().filter(|c| c.dim >= k).collect();
    let values = sample_values(samples, seed, |_, rng| {
        let l = sample_subspace(n, k, rng)?;
        let mut total = 0.0;
        for c in &relevant {
            total += sign(c.dim - k) as f64 * c.projected_measure(&l)?;
        }
        Ok(total)
    })?;
    Ok(SampleStats::from_values(&values))
}

/// Projection-route Monte Carlo estimate of μ_k.
pub fn mu_crofton<C: CellComplex + ?Sized>(
    set: &C,
    k: usize,
    samples: usize,
    seed: u64,
    constants: &CroftonConstants,
) -> Result<MCEstimate> {
    let n = set.ambient_dim();
    check_request(n, k, samples)?;
    let cells = set.open_cells();
    if let Some(v) = exact_endpoint(&cells, n, k) {
        return Ok(MCEstimate::exact(v, seed));
    }
    if !cells.iter().any(|c| c.dim >= k) {
        return Ok(MCEstimate::exact(0.0, seed));
    }
    let constant = constants.get(n, k)?;
    let stats = crofton_raw(&cells, n, k, samples, seed)?;
    Ok(MCEstimate {
        value: constant * stats.mean,
        stderr: constant * stats.stderr,
        samples,
        seed,
        constant,
    })
}

/// Calibrates c[n][k] so that the projection estimator returns
/// binomial(n, k) on the closed unit n-cube.
pub fn calibrate(n: usize, k: usize, samples: usize, seed: u64) -> Result<Calibration> {
    if n == 0 || k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k == 0 || k == n {
        return Ok(Calibration { n, k, constant: 1.0, stderr: 0.0, samples: 0, seed });
    }
    check_request(n, k, samples)?;
    let cube = GridRegion::full(GridComplex::new(vec![vec![0.0, 1.0]; n])?);
    let stats = crofton_raw(&cube.open_cells(), n, k, samples, seed)?;
    let target = binomial(n, k);
    if stats.mean <= 0.0 {
        return Err(Error::Calibration(format!("non-positive raw mean {}", stats.mean)));
    }
    let constant = target / stats.mean;
    let stderr = constant * stats.stderr / stats.mean;
    if stderr > 0.01 * constant {
        return Err(Error::Calibration(format!(
            "stderr {stderr:e} exceeds 1% of the constant {constant} with {samples} samples"
        )));
    }
    Ok(Calibration { n, k, constant, stderr, samples, seed })
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Axis-aligned window (in the coordinates of `normal`) containing the
/// projection of every listed vertex.
pub(crate) struct OffsetWindow {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl OffsetWindow {
    pub(crate) fn around(vertices: &[Vec<f64>], normal: &crate::geom::Subspace) -> Result<OffsetWindow> {
        let k = normal.dim();
        let mut lo = vec![f64::INFINITY; k];
        let mut hi = vec![f64::NEG_INFINITY; k];
        for p in project(vertices, normal)? {
            for a in 0..k {
                lo[a] = lo[a].min(p[a]);
                hi[a] = hi[a].max(p[a]);
            }
        }
        Ok(OffsetWindow { lo, hi })
    }

    pub(crate) fn volume(&self) -> f64 {
        self.lo.iter().zip(&self.hi).map(|(l, h)| (h - l).max(0.0)).product()
    }

    pub(crate) fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> Vec<f64> {
        self.lo.iter().zip(&self.hi).map(|(l, h)| l + (h - l) * rng.random::<f64>()).collect()
    }
}

/// Slice-route Monte Carlo estimate of μ_k: Haar-random codimension-k flats
/// with offsets uniform over the projected bounding window, weighted by the
/// window's k-volume.
pub fn mu_slice_mc<C: CellComplex + ?Sized>(
    set: &C,
    k: usize,
    samples: usize,
    seed: u64,
    constants: &CroftonConstants,
) -> Result<MCEstimate> {
    let n = set.ambient_dim();
    check_request(n, k, samples)?;
    let cells = set.open_cells();
    if let Some(v) = exact_endpoint(&cells, n, k) {
        return Ok(MCEstimate::exact(v, seed));
    }
    let relevant: Vec<OpenPolytope> = cells.into_iter().filter(|c| c.dim >= k).collect();
    if relevant.is_empty() {
        return Ok(MCEstimate::exact(0.0, seed));
    }
    let constant = constants.get(n, k)?;
    let vertices: Vec<Vec<f64>> = relevant.iter().flat_map(|c| c.vertices.iter().cloned()).collect();
    let values = sample_values(samples, seed, |index, rng| {
        let normal = sample_subspace(n, k, rng)?;
        let window = OffsetWindow::around(&vertices, &normal)?;
        let vol = window.volume();
        if vol == 0.0 {
            return Ok(0.0);
        }
        let chi = with_resampling(index, rng, |rng| {
            let flat = AffineFlat::from_normal(normal.clone(), &window.draw(rng))?;
            slice_chi_cells(&relevant, &flat)
        })?;
        Ok(vol * chi as f64)
    })?;
    let stats = SampleStats::from_values(&values);
    Ok(MCEstimate { value: constant * stats.mean, stderr: constant * stats.stderr, samples, seed, constant })
}

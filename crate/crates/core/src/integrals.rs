//! Lower and upper Hadwiger integrals ∫h⌊dμ_k⌋, ∫h⌈dμ_k⌉.
//!
//! Everything goes through the excursion-set formula
//!
//!   lower: ∫_0^∞ μ_k{h ≥ s} − μ_k{h < −s} ds
//!   upper: ∫_0^∞ μ_k{h > s} − μ_k{h ≤ −s} ds
//!
//! swept segment by segment between consecutive |critical values|. Where
//! the integrand is piecewise constant (grid functions, Euler
//! characteristics) one evaluation per segment is exact; PL excursion
//! volumes are polynomials of degree ≤ 3 in s on each segment and are
//! integrated exactly by 3-point Gauss–Legendre.

use serde::{Deserialize, Serialize};

use crate::complex::{flat_meets, sign, CellComplex, FlatHit, OpenPolytope};
use crate::error::{Error, Result};
use crate::function::pl::pieces_chi;
use crate::function::{ConstructibleFunction, Cut, PLFunction, Piece};
use crate::geom::{fiber_range, project, sample_subspace, AffineFlat};
use crate::mc::{sample_values, with_resampling, SampleStats};
use crate::volumes::{mu_grid_exact, open_box_mu, CroftonConstants, MCEstimate, OffsetWindow};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Bound {
    Lower,
    Upper,
}

impl Bound {
    pub fn dual(self) -> Bound {
        match self {
            Bound::Lower => Bound::Upper,
            Bound::Upper => Bound::Lower,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    ExcursionExact,
    ExcursionQuadrature,
    SliceMc,
    ProjectionMc,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntegralResult {
    pub value: f64,
    /// 0 on exact paths.
    pub stderr: f64,
    pub method: Method,
    pub k: usize,
    pub bound: Bound,
    /// 1 on exact paths.
    pub samples: usize,
    pub seed: u64,
    /// Normalizing constant applied (1 on exact paths).
    pub constant: f64,
}

impl IntegralResult {
    fn exact(value: f64, method: Method, k: usize, bound: Bound) -> IntegralResult {
        IntegralResult { value, stderr: 0.0, method, k, bound, samples: 1, seed: 0, constant: 1.0 }
    }

    fn sampled(est: MCEstimate, k: usize, bound: Bound) -> IntegralResult {
        IntegralResult {
            value: est.value,
            stderr: est.stderr,
            method: Method::SliceMc,
            k,
            bound,
            samples: est.samples,
            seed: est.seed,
            constant: est.constant,
        }
    }
}

/// Monte Carlo settings shared by the sampled paths.
#[derive(Debug, Clone, Copy)]
pub struct MonteCarlo<'a> {
    pub samples: usize,
    pub seed: u64,
    pub constants: &'a CroftonConstants,
}

/// A set function s ↦ μ{h ⋄ s} with known breakpoints.
pub trait ExcursionMeasure {
    fn measure(&self, cut: Cut, t: f64) -> Result<f64>;

    /// Every t at which some μ{h ⋄ t} may change.
    fn critical_values(&self) -> Vec<f64>;

    /// Constant between consecutive critical values?
    fn piecewise_constant(&self) -> bool;
}

/// μ_k of the excursions of a grid function, exact.
pub struct GridExcursions<'a> {
    pub h: &'a ConstructibleFunction,
    pub k: usize,
}

impl ExcursionMeasure for GridExcursions<'_> {
    fn measure(&self, cut: Cut, t: f64) -> Result<f64> {
        mu_grid_exact(&self.h.level_region(cut, t), self.k)
    }

    fn critical_values(&self) -> Vec<f64> {
        self.h.critical_values()
    }

    fn piecewise_constant(&self) -> bool {
        true
    }
}

/// χ of the excursions of a collection of affine pieces.
pub struct PieceExcursions<'a>(pub &'a [Piece]);

impl ExcursionMeasure for PieceExcursions<'_> {
    fn measure(&self, cut: Cut, t: f64) -> Result<f64> {
        Ok(pieces_chi(self.0, cut, t) as f64)
    }

    fn critical_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.0.iter().flat_map(|p| [p.min, p.max]).collect();
        v.push(0.0);
        v
    }

    fn piecewise_constant(&self) -> bool {
        true
    }
}

/// Lebesgue measure of the excursions of a PL function.
pub struct PlVolumes<'a>(pub &'a PLFunction);

impl ExcursionMeasure for PlVolumes<'_> {
    fn measure(&self, cut: Cut, t: f64) -> Result<f64> {
        self.0.excursion_volume(cut, t)
    }

    fn critical_values(&self) -> Vec<f64> {
        self.0.critical_values()
    }

    fn piecewise_constant(&self) -> bool {
        false
    }
}

/// The s-integrand of the excursion formula.
pub fn excursion_integrand<M: ExcursionMeasure + ?Sized>(meas: &M, s: f64, bound: Bound) -> Result<f64> {
    Ok(match bound {
        Bound::Lower => meas.measure(Cut::Geq, s)? - meas.measure(Cut::Lt, -s)?,
        Bound::Upper => meas.measure(Cut::Gt, s)? - meas.measure(Cut::Leq, -s)?,
    })
}

/// Sorted distinct {0} ∪ {|v|}.
fn sweep_breaks(critical: &[f64]) -> Vec<f64> {
    let mut b: Vec<f64> = critical.iter().map(|v| v.abs()).chain(std::iter::once(0.0)).collect();
    b.sort_by(f64::total_cmp);
    b.dedup();
    b
}

const GAUSS_NODES: [f64; 3] = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
const GAUSS_WEIGHTS: [f64; 3] = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];

/// ∫_0^∞ of the excursion integrand, exact for piecewise-constant measures
/// and for piecewise polynomials of degree ≤ 5 between breakpoints.
pub fn excursion_sweep<M: ExcursionMeasure + ?Sized>(meas: &M, bound: Bound) -> Result<f64> {
    let breaks = sweep_breaks(&meas.critical_values());
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let (a, b) = (w[0], w[1]);
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        if meas.piecewise_constant() {
            total += (b - a) * excursion_integrand(meas, mid, bound)?;
        } else {
            for (x, wt) in GAUSS_NODES.iter().zip(GAUSS_WEIGHTS) {
                total += half * wt * excursion_integrand(meas, mid + half * x, bound)?;
            }
        }
    }
    Ok(total)
}

/// (1/m) ∫⌊mh⌋ dμ (lower) or (1/m) ∫⌈mh⌉ dμ (upper), written through the
/// excursions of h:
///
///   lower: (1/m) Σ_{j≥1} μ{h ≥ j/m} − μ{h < −(j−1)/m}
///   upper: (1/m) Σ_{j≥1} μ{h > (j−1)/m} − μ{h ≤ −j/m}
pub fn step_sum<M: ExcursionMeasure + ?Sized>(meas: &M, m: usize, bound: Bound) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidSamples("step count m must be ≥ 1".into()));
    }
    let top = meas.critical_values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let last = (top * m as f64).ceil() as usize + 1;
    let mf = m as f64;
    let mut terms = Vec::with_capacity(last);
    for j in 1..=last {
        let (hi, lo) = (j as f64 / mf, (j - 1) as f64 / mf);
        terms.push(match bound {
            Bound::Lower => meas.measure(Cut::Geq, hi)? - meas.measure(Cut::Lt, -lo)?,
            Bound::Upper => meas.measure(Cut::Gt, lo)? - meas.measure(Cut::Leq, -hi)?,
        });
    }
    Ok(crate::mc::pairwise_sum(&terms) / mf)
}

fn check_k(k: usize, n: usize) -> Result<()> {
    if k > n {
        Err(Error::KOutOfRange { k, n })
    } else {
        Ok(())
    }
}

/// Exact Hadwiger integral of a grid function.
pub fn hadwiger_constructible(h: &ConstructibleFunction, k: usize, bound: Bound) -> Result<IntegralResult> {
    check_k(k, h.dim())?;
    let value = excursion_sweep(&GridExcursions { h, k }, bound)?;
    Ok(IntegralResult::exact(value, Method::ExcursionExact, k, bound))
}

/// Exact Euler integral (k = 0) of a PL function.
pub fn hadwiger_pl_euler(h: &PLFunction, bound: Bound) -> IntegralResult {
    let pieces = h.pieces();
    let value = excursion_sweep(&PieceExcursions(&pieces), bound).expect("piece χ never fails");
    IntegralResult::exact(value, Method::ExcursionExact, 0, bound)
}

/// Hadwiger integral of a PL function: exact for k = 0, exact quadrature
/// of excursion volumes for k = n, sliced Monte Carlo otherwise.
pub fn hadwiger_pl(h: &PLFunction, k: usize, bound: Bound, mc: &MonteCarlo) -> Result<IntegralResult> {
    let n = h.ambient_dim();
    check_k(k, n)?;
    if k == 0 {
        return Ok(hadwiger_pl_euler(h, bound));
    }
    if k == n {
        let value = excursion_sweep(&PlVolumes(h), bound)?;
        return Ok(IntegralResult::exact(value, Method::ExcursionQuadrature, k, bound));
    }
    let est = pl_slice_mc(h, k, mc, |pieces| excursion_sweep(&PieceExcursions(pieces), bound))?;
    Ok(IntegralResult::sampled(est, k, bound))
}

/// The open pieces in which a generic codimension-k flat cuts the cells of
/// dimension ≥ k, with the range of h on each closed piece.
fn flat_pieces(cells: &[(OpenPolytope, Vec<f64>)], flat: &AffineFlat) -> Result<Vec<Piece>> {
    let mut pieces = Vec::new();
    for (cell, vals) in cells {
        let FlatHit::Hit(dim) = flat_meets(cell, flat)? else { continue };
        let (vmin, vmax) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        if vmin == vmax {
            pieces.push(Piece { dim, min: vmin, max: vmax });
            continue;
        }
        let projected = project(&cell.vertices, flat.normal())?;
        // a hit cell always has a nonempty closed fiber
        let (lo, hi) = fiber_range(flat.offset_coords(), &projected, vals)?
            .ok_or(Error::DegenerateFlat { margin: 0.0 })?;
        pieces.push(Piece { dim, min: lo.clamp(vmin, vmax), max: hi.clamp(vmin, vmax) });
    }
    Ok(pieces)
}

/// Sliced Monte Carlo over codimension-k flats: per flat, `per_flat` maps
/// the cut pieces to an exact fiber quantity; the estimate is the window
/// volume times that quantity, averaged and scaled by c[n][k].
pub fn pl_slice_mc<F>(h: &PLFunction, k: usize, mc: &MonteCarlo, per_flat: F) -> Result<MCEstimate>
where
    F: Fn(&[Piece]) -> Result<f64> + Sync,
{
    let n = h.ambient_dim();
    if k == 0 || k >= n {
        return Err(Error::KOutOfRange { k, n });
    }
    if k > crate::volumes::MAX_MC_K {
        return Err(Error::Unsupported(format!("sliced Monte Carlo with k = {k}")));
    }
    if mc.samples < 2 {
        return Err(Error::InvalidSamples(format!("need at least 2 samples, got {}", mc.samples)));
    }
    let constant = mc.constants.get(n, k)?;
    let cells: Vec<(OpenPolytope, Vec<f64>)> = h
        .set()
        .open_cells()
        .into_iter()
        .enumerate()
        .filter(|(_, c)| c.dim >= k)
        .map(|(i, c)| (c, h.cell_values(i)))
        .collect();
    if cells.is_empty() {
        return Ok(MCEstimate { value: 0.0, stderr: 0.0, samples: mc.samples, seed: mc.seed, constant });
    }
    let vertices: Vec<Vec<f64>> = cells.iter().flat_map(|(c, _)| c.vertices.iter().cloned()).collect();
    let values = sample_values(mc.samples, mc.seed, |index, rng| {
        let normal = sample_subspace(n, k, rng)?;
        let window = OffsetWindow::around(&vertices, &normal)?;
        let vol = window.volume();
        if vol == 0.0 {
            return Ok(0.0);
        }
        let fiber = with_resampling(index, rng, |rng| {
            let flat = AffineFlat::from_normal(normal.clone(), &window.draw(rng))?;
            per_flat(&flat_pieces(&cells, &flat)?)
        })?;
        Ok(vol * fiber)
    })?;
    let stats = SampleStats::from_values(&values);
    Ok(MCEstimate {
        value: constant * stats.mean,
        stderr: constant * stats.stderr,
        samples: mc.samples,
        seed: mc.seed,
        constant,
    })
}

/// (1/m)∫⌊mh⌋dμ_k or (1/m)∫⌈mh⌉dμ_k of a grid function, exact.
pub fn step_integral_constructible(
    h: &ConstructibleFunction,
    m: usize,
    k: usize,
    bound: Bound,
) -> Result<IntegralResult> {
    check_k(k, h.dim())?;
    let value = step_sum(&GridExcursions { h, k }, m, bound)?;
    Ok(IntegralResult::exact(value, Method::ExcursionExact, k, bound))
}

/// Step approximant of a PL function: exact for k ∈ {0, n}, sliced Monte
/// Carlo otherwise.
pub fn step_integral_pl(h: &PLFunction, m: usize, k: usize, bound: Bound, mc: &MonteCarlo) -> Result<IntegralResult> {
    let n = h.ambient_dim();
    check_k(k, n)?;
    if k == 0 {
        let value = step_sum(&PieceExcursions(&h.pieces()), m, bound)?;
        return Ok(IntegralResult::exact(value, Method::ExcursionExact, k, bound));
    }
    if k == n {
        let value = step_sum(&PlVolumes(h), m, bound)?;
        return Ok(IntegralResult::exact(value, Method::ExcursionExact, k, bound));
    }
    if m == 0 {
        return Err(Error::InvalidSamples("step count m must be ≥ 1".into()));
    }
    let est = pl_slice_mc(h, k, mc, |pieces| step_sum(&PieceExcursions(pieces), m, bound))?;
    Ok(IntegralResult::sampled(est, k, bound))
}

/// Verdier dual: the linear extension of D1_σ = (−1)^dim σ · 1_closure(σ),
/// i.e. (Dh)(τ) = Σ over cells σ whose closure contains τ of (−1)^dim σ h(σ).
pub fn verdier_dual(h: &ConstructibleFunction) -> ConstructibleFunction {
    let complex = h.complex();
    let values = complex
        .cells()
        .map(|tau| complex.cofaces(&tau).iter().map(|s| sign(s.dim()) as f64 * h.value(s)).sum())
        .collect();
    ConstructibleFunction::new(complex.clone(), values).expect("dual keeps shape")
}

/// (∫h dμ_k, (−1)^(n−k) ∫Dh dμ_k). The pair is returned as computed; for
/// h supported in lower-dimensional cells the signs need not agree.
pub fn prop31_residual(h: &ConstructibleFunction, k: usize) -> Result<(f64, f64)> {
    let n = h.dim();
    let lhs = hadwiger_constructible(h, k, Bound::Lower)?.value;
    let dual = hadwiger_constructible(&verdier_dual(h), k, Bound::Lower)?.value;
    Ok((lhs, sign(n - k) as f64 * dual))
}

/// Σ over cells of h(σ)·μ_k(σ): the integral as a linear functional,
/// valid on grid functions where lower and upper agree.
pub fn cellwise_integral(h: &ConstructibleFunction, k: usize) -> Result<f64> {
    check_k(k, h.dim())?;
    let complex = h.complex();
    Ok(complex.cells().map(|c| h.value(&c) * open_box_mu(&complex.edge_lengths(&c), k)).sum())
}

/// Lebesgue integral of a grid function.
pub fn riemann_constructible(h: &ConstructibleFunction) -> f64 {
    let complex = h.complex();
    complex.cells().map(|c| h.value(&c) * complex.cell_volume(&c)).sum()
}

/// Lebesgue integral of a PL function: volume times mean vertex value on
/// every top-dimensional simplex.
pub fn riemann_pl(h: &PLFunction) -> f64 {
    let set = h.set();
    let n = set.ambient_dim();
    (0..set.cells().len())
        .filter(|&i| set.cell_dim(i) == n)
        .map(|i| {
            let vals = h.cell_values(i);
            set.cell_volume(i) * vals.iter().sum::<f64>() / vals.len() as f64
        })
        .sum()
}

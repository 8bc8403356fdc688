//! Valuations v(h) = Σ_k ∫ c_k∘h ⌊dμ_k⌋ (or with ⌈dμ_k⌉) built from
//! monotone piecewise-linear coefficient profiles with c_k(0) = 0.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::function::{ConstructibleFunction, Cut, LatticeOp, PLFunction};
use crate::integrals::{
    excursion_sweep, hadwiger_constructible, pl_slice_mc, step_sum, Bound, ExcursionMeasure, MonteCarlo,
    PieceExcursions, PlVolumes,
};
use crate::volumes::mu_grid_exact;

/// Tolerance on c(0) = 0 and on orthogonality of motions.
pub const PROFILE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Monotonicity {
    Zero,
    Increasing,
    Decreasing,
}

/// Continuous monotone piecewise-linear c: R → R through the given knots,
/// extended linearly beyond the first and last knot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<[f64; 2]>", into = "Vec<[f64; 2]>")]
pub struct CoefficientProfile {
    xs: Vec<f64>,
    ys: Vec<f64>,
}

impl TryFrom<Vec<[f64; 2]>> for CoefficientProfile {
    type Error = Error;

    fn try_from(points: Vec<[f64; 2]>) -> Result<CoefficientProfile> {
        CoefficientProfile::new(points.into_iter().map(|[x, y]| (x, y)).collect())
    }
}

impl From<CoefficientProfile> for Vec<[f64; 2]> {
    fn from(p: CoefficientProfile) -> Vec<[f64; 2]> {
        p.xs.iter().zip(&p.ys).map(|(&x, &y)| [x, y]).collect()
    }
}

impl CoefficientProfile {
    pub fn new(points: Vec<(f64, f64)>) -> Result<CoefficientProfile> {
        if points.len() < 2 {
            return Err(Error::InvalidProfile("need at least two knots".into()));
        }
        if points.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
            return Err(Error::InvalidProfile("non-finite knot".into()));
        }
        if points.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidProfile("knot abscissae must be strictly increasing".into()));
        }
        let p = CoefficientProfile {
            xs: points.iter().map(|p| p.0).collect(),
            ys: points.iter().map(|p| p.1).collect(),
        };
        let rises = p.ys.windows(2).any(|w| w[1] > w[0]);
        let falls = p.ys.windows(2).any(|w| w[1] < w[0]);
        if rises && falls {
            return Err(Error::InvalidProfile("profile is not monotone".into()));
        }
        let scale = p.ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
        let at_zero = p.eval(0.0);
        if at_zero.abs() > PROFILE_TOL * scale {
            return Err(Error::InvalidProfile(format!("c(0) = {at_zero:e}, must be 0")));
        }
        Ok(p)
    }

    pub fn zero() -> CoefficientProfile {
        CoefficientProfile { xs: vec![0.0, 1.0], ys: vec![0.0, 0.0] }
    }

    /// c(x) = a·x.
    pub fn linear(a: f64) -> CoefficientProfile {
        CoefficientProfile { xs: vec![0.0, 1.0], ys: vec![0.0, a] }
    }

    pub fn knots(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.xs.iter().copied().zip(self.ys.iter().copied())
    }

    pub fn monotonicity(&self) -> Monotonicity {
        if self.ys.windows(2).any(|w| w[1] > w[0]) {
            Monotonicity::Increasing
        } else if self.ys.windows(2).any(|w| w[1] < w[0]) {
            Monotonicity::Decreasing
        } else {
            Monotonicity::Zero
        }
    }

    pub fn is_strictly_decreasing(&self) -> bool {
        self.ys.windows(2).all(|w| w[1] < w[0])
    }

    fn slope(&self, seg: usize) -> f64 {
        (self.ys[seg + 1] - self.ys[seg]) / (self.xs[seg + 1] - self.xs[seg])
    }

    pub fn eval(&self, x: f64) -> f64 {
        let last = self.xs.len() - 1;
        let seg = if x <= self.xs[0] {
            0
        } else if x >= self.xs[last] {
            last - 1
        } else {
            self.xs.partition_point(|&k| k <= x) - 1
        };
        if x == self.xs[seg] {
            return self.ys[seg];
        }
        self.ys[seg] + self.slope(seg) * (x - self.xs[seg])
    }

    /// x ↦ −c(−x), which has the same monotonicity.
    fn reflected(&self) -> CoefficientProfile {
        CoefficientProfile {
            xs: self.xs.iter().rev().map(|x| -x).collect(),
            ys: self.ys.iter().rev().map(|y| -y).collect(),
        }
    }

    /// x ↦ c(−x), which flips the monotonicity.
    fn mirrored(&self) -> CoefficientProfile {
        CoefficientProfile {
            xs: self.xs.iter().rev().map(|x| -x).collect(),
            ys: self.ys.iter().rev().copied().collect(),
        }
    }

    /// inf{x : c(x) ≥ y} for nondecreasing c (±∞ when unbounded).
    fn least_at_least(&self, y: f64) -> f64 {
        let last = self.xs.len() - 1;
        if y <= self.ys[0] {
            let s = self.slope(0);
            return if s > 0.0 { self.xs[0] - (self.ys[0] - y) / s } else { f64::NEG_INFINITY };
        }
        if y > self.ys[last] {
            let s = self.slope(last - 1);
            return if s > 0.0 { self.xs[last] + (y - self.ys[last]) / s } else { f64::INFINITY };
        }
        // first knot reaching y; the segment before it rises strictly
        let j = self.ys.partition_point(|&v| v < y);
        if self.ys[j] == y {
            return self.xs[j];
        }
        let (x0, y0) = (self.xs[j - 1], self.ys[j - 1]);
        x0 + (y - y0) / (self.ys[j] - y0) * (self.xs[j] - x0)
    }

    /// sup{x : c(x) ≤ y} for nondecreasing c.
    fn greatest_at_most(&self, y: f64) -> f64 {
        -self.reflected().least_at_least(-y)
    }

    /// The cut on h equivalent to {c∘h ⋄ y}: least preimages for {≥}
    /// and {<}, greatest for {>} and {≤}.
    pub fn pull_back(&self, cut: Cut, y: f64) -> (Cut, f64) {
        match self.monotonicity() {
            Monotonicity::Decreasing => {
                let (c, t) = self.mirrored().pull_back(cut, y);
                (c.negated(), -t)
            }
            _ => match cut {
                Cut::Geq | Cut::Lt => (cut, self.least_at_least(y)),
                Cut::Gt | Cut::Leq => (cut, self.greatest_at_most(y)),
            },
        }
    }
}

/// Excursions of c∘h read off the excursions of h.
pub struct Composed<'a, M: ?Sized> {
    pub inner: &'a M,
    pub profile: &'a CoefficientProfile,
}

impl<M: ExcursionMeasure + ?Sized> ExcursionMeasure for Composed<'_, M> {
    fn measure(&self, cut: Cut, t: f64) -> Result<f64> {
        if self.profile.monotonicity() == Monotonicity::Zero {
            // c∘h ≡ 0
            return if cut.holds(0.0, t) {
                Err(Error::Unsupported("excursion containing the zero set".into()))
            } else {
                Ok(0.0)
            };
        }
        let (c, x) = self.profile.pull_back(cut, t);
        self.inner.measure(c, x)
    }

    fn critical_values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.inner.critical_values().iter().map(|&x| self.profile.eval(x)).collect();
        v.extend(self.profile.ys.iter().copied());
        v.push(0.0);
        v
    }

    fn piecewise_constant(&self) -> bool {
        self.inner.piecewise_constant()
    }
}

/// Σ_k ∫ c_k∘h dμ_k with one profile per k = 0..n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HadwigerValuation {
    pub profiles: Vec<CoefficientProfile>,
    pub bound: Bound,
}

/// A valuation value with one term per k.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValuationValue {
    pub value: f64,
    pub stderr: f64,
    /// (value, stderr) of each k term.
    pub terms: Vec<(f64, f64)>,
}

impl ValuationValue {
    fn from_terms(terms: Vec<(f64, f64)>) -> ValuationValue {
        let value = terms.iter().map(|t| t.0).sum();
        let stderr = terms.iter().map(|t| t.1 * t.1).sum::<f64>().sqrt();
        ValuationValue { value, stderr, terms }
    }
}

impl HadwigerValuation {
    /// Rejects profile sets mixing increasing and decreasing members.
    pub fn new(profiles: Vec<CoefficientProfile>, bound: Bound) -> Result<HadwigerValuation> {
        if profiles.is_empty() {
            return Err(Error::InvalidProfile("need one profile per k = 0..n".into()));
        }
        let dirs: Vec<Monotonicity> =
            profiles.iter().map(|p| p.monotonicity()).filter(|&m| m != Monotonicity::Zero).collect();
        if dirs.windows(2).any(|w| w[0] != w[1]) {
            return Err(Error::InvalidProfile("profiles mix increasing and decreasing members".into()));
        }
        Ok(HadwigerValuation { profiles, bound })
    }

    /// c_k(x) = x for k = `k`, zero otherwise.
    pub fn single_term(n: usize, k: usize, bound: Bound) -> HadwigerValuation {
        let profiles =
            (0..=n).map(|j| if j == k { CoefficientProfile::linear(1.0) } else { CoefficientProfile::zero() }).collect();
        HadwigerValuation { profiles, bound }
    }

    pub fn dim(&self) -> usize {
        self.profiles.len() - 1
    }

    fn check(&self, n: usize) -> Result<()> {
        if n != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: n });
        }
        if self.profiles.iter().any(|p| p.monotonicity() == Monotonicity::Decreasing) {
            return Err(Error::InvalidProfile(
                "decreasing profiles give neither lower- nor upper-continuous valuations; use the decreasing-composition experiment".into(),
            ));
        }
        Ok(())
    }

    fn active(&self) -> impl Iterator<Item = (usize, &CoefficientProfile)> {
        self.profiles.iter().enumerate().filter(|(_, p)| p.monotonicity() != Monotonicity::Zero)
    }

    /// Exact value on a grid function (c_k∘h composed cellwise).
    pub fn evaluate_constructible(&self, h: &ConstructibleFunction) -> Result<ValuationValue> {
        self.check(h.dim())?;
        let mut terms = vec![(0.0, 0.0); self.profiles.len()];
        for (k, c) in self.active() {
            terms[k].0 = hadwiger_constructible(&h.map(|x| c.eval(x)), k, self.bound)?.value;
        }
        Ok(ValuationValue::from_terms(terms))
    }

    /// Value on a PL function via threshold substitution; k ∈ {0, n} exact,
    /// other terms sliced Monte Carlo with stream seed + k.
    pub fn evaluate_pl(&self, h: &PLFunction, mc: &MonteCarlo) -> Result<ValuationValue> {
        let n = h.ambient_dim();
        self.check(n)?;
        let pieces = h.pieces();
        let mut terms = vec![(0.0, 0.0); self.profiles.len()];
        for (k, c) in self.active() {
            terms[k] = if k == 0 {
                (excursion_sweep(&Composed { inner: &PieceExcursions(&pieces), profile: c }, self.bound)?, 0.0)
            } else if k == n {
                (excursion_sweep(&Composed { inner: &PlVolumes(h), profile: c }, self.bound)?, 0.0)
            } else {
                let sub = MonteCarlo { seed: mc.seed.wrapping_add(k as u64), ..*mc };
                let est = pl_slice_mc(h, k, &sub, |p| {
                    excursion_sweep(&Composed { inner: &PieceExcursions(p), profile: c }, self.bound)
                })?;
                (est.value, est.stderr)
            };
        }
        Ok(ValuationValue::from_terms(terms))
    }
}

/// Σ_k Σ_i (c_k(r_i) − c_k(r_{i−1})) μ_k{h ≥ r_i} over the positive values
/// 0 = r_0 < r_1 < …, plus the mirror Σ_j (c_k(q_j) − c_k(q_{j−1})) μ_k{h ≤ q_j}
/// over the negative values 0 = q_0 > q_1 > ….
pub fn excursion_difference_form(v: &HadwigerValuation, h: &ConstructibleFunction) -> Result<f64> {
    v.check(h.dim())?;
    let values = h.critical_values();
    let positive: Vec<f64> = values.iter().copied().filter(|&x| x > 0.0).collect();
    let negative: Vec<f64> = values.iter().rev().copied().filter(|&x| x < 0.0).collect();
    let mut total = 0.0;
    for (k, c) in v.active() {
        let mut prev = 0.0;
        for &r in &positive {
            total += (c.eval(r) - c.eval(prev)) * mu_grid_exact(&h.level_region(Cut::Geq, r), k)?;
            prev = r;
        }
        let mut prev = 0.0;
        for &q in &negative {
            total += (c.eval(q) - c.eval(prev)) * mu_grid_exact(&h.level_region(Cut::Leq, q), k)?;
            prev = q;
        }
    }
    Ok(total)
}

/// |v(f) + v(g) − v(f∨g) − v(f∧g)|.
pub fn additivity_residual(v: &HadwigerValuation, f: &ConstructibleFunction, g: &ConstructibleFunction) -> Result<f64> {
    let e = |x: &ConstructibleFunction| v.evaluate_constructible(x).map(|r| r.value);
    let hi = f.lattice(g, LatticeOp::Max)?;
    let lo = f.lattice(g, LatticeOp::Min)?;
    Ok((e(f)? + e(g)? - e(&hi)? - e(&lo)?).abs())
}

/// One row of the decreasing-composition experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CompositionRow {
    pub m: usize,
    /// ∫ c((1/m)⌈mh⌉) dμ_k
    pub lhs: f64,
    /// (1/m) ∫ ⌊m c(h)⌋ dμ_k
    pub rhs: f64,
    pub lhs_stderr: f64,
    pub rhs_stderr: f64,
}

impl CompositionRow {
    pub fn gap(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// ∫ c∘g dμ for the step function g = (1/m)⌈mh⌉, summed by parts over its
/// excursions {g ≥ i/m} = {h > (i−1)/m} and {g ≤ −i/m} = {h ≤ −i/m}.
fn ceiling_composition<M: ExcursionMeasure + ?Sized>(meas: &M, c: &CoefficientProfile, m: usize) -> Result<f64> {
    let top = meas.critical_values().iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let last = (top * m as f64).ceil() as usize + 1;
    let mf = m as f64;
    let mut terms = Vec::with_capacity(2 * last);
    for i in 1..=last {
        let (hi, lo) = (i as f64 / mf, (i - 1) as f64 / mf);
        terms.push((c.eval(hi) - c.eval(lo)) * meas.measure(Cut::Gt, lo)?);
        terms.push((c.eval(-hi) - c.eval(-lo)) * meas.measure(Cut::Leq, -hi)?);
    }
    Ok(crate::mc::pairwise_sum(&terms))
}

/// Compares the ceiling-then-compose and compose-then-floor approximants
/// of ∫ c∘h dμ_k for strictly decreasing c, for each m.
pub fn decreasing_composition(
    h: &PLFunction,
    c: &CoefficientProfile,
    k: usize,
    m_list: &[usize],
    mc: &MonteCarlo,
) -> Result<Vec<CompositionRow>> {
    if !c.is_strictly_decreasing() {
        return Err(Error::InvalidProfile("profile must be strictly decreasing".into()));
    }
    let n = h.ambient_dim();
    if k > n {
        return Err(Error::KOutOfRange { k, n });
    }
    if let Some(&m) = m_list.iter().find(|&&m| m == 0) {
        return Err(Error::InvalidSamples(format!("step count m = {m} must be ≥ 1")));
    }
    let pieces = h.pieces();
    let mut rows = Vec::with_capacity(m_list.len());
    for &m in m_list {
        let row = if k == 0 || k == n {
            let (lhs, rhs) = if k == 0 {
                let meas = PieceExcursions(&pieces);
                (ceiling_composition(&meas, c, m)?, step_sum(&Composed { inner: &meas, profile: c }, m, Bound::Lower)?)
            } else {
                let meas = PlVolumes(h);
                (ceiling_composition(&meas, c, m)?, step_sum(&Composed { inner: &meas, profile: c }, m, Bound::Lower)?)
            };
            CompositionRow { m, lhs, rhs, lhs_stderr: 0.0, rhs_stderr: 0.0 }
        } else {
            let lhs = pl_slice_mc(h, k, mc, |p| ceiling_composition(&PieceExcursions(p), c, m))?;
            let rhs =
                pl_slice_mc(h, k, mc, |p| step_sum(&Composed { inner: &PieceExcursions(p), profile: c }, m, Bound::Lower))?;
            CompositionRow { m, lhs: lhs.value, rhs: rhs.value, lhs_stderr: lhs.stderr, rhs_stderr: rhs.stderr }
        };
        rows.push(row);
    }
    Ok(rows)
}

/// Result of comparing v(h) with v of the moved function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InvarianceCheck {
    pub original: ValuationValue,
    pub moved: ValuationValue,
    pub residual: f64,
    /// sqrt(stderr² + stderr²) of the two evaluations.
    pub combined_stderr: f64,
}

/// Largest |(RᵀR − I)_ij|.
pub fn orthogonality_defect(rotation: &[Vec<f64>]) -> f64 {
    let n = rotation.len();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..n {
            let d: f64 = (0..n).map(|r| rotation[r][i] * rotation[r][j]).sum();
            worst = worst.max((d - if i == j { 1.0 } else { 0.0 }).abs());
        }
    }
    worst
}

/// Seed offset for the moved copy, so the two runs are independent.
const MOVED_STREAM: u64 = 0x9e37_79b9_7f4a_7c15;

/// |v(h) − v(h∘φ⁻¹)| for the rigid motion φ(x) = Rx + t.
pub fn invariance_residual(
    v: &HadwigerValuation,
    h: &PLFunction,
    rotation: &[Vec<f64>],
    translation: &[f64],
    mc: &MonteCarlo,
) -> Result<InvarianceCheck> {
    let n = h.ambient_dim();
    if rotation.len() != n || rotation.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: rotation.len() });
    }
    let defect = orthogonality_defect(rotation);
    if defect > PROFILE_TOL {
        return Err(Error::NonOrthogonal(defect));
    }
    let moved_h = h.transformed(rotation, translation)?;
    let original = v.evaluate_pl(h, mc)?;
    let moved = v.evaluate_pl(&moved_h, &MonteCarlo { seed: mc.seed ^ MOVED_STREAM, ..*mc })?;
    Ok(InvarianceCheck {
        residual: (original.value - moved.value).abs(),
        combined_stderr: (original.stderr.powi(2) + moved.stderr.powi(2)).sqrt(),
        original,
        moved,
    })
}

/// |v(h) − v(h shifted by `shift`)| for a grid function, re-expressed on the
/// translated grid. Exact.
pub fn translation_residual(v: &HadwigerValuation, h: &ConstructibleFunction, shift: &[f64]) -> Result<f64> {
    let moved = h.with_complex(h.complex().translated(shift)?)?;
    Ok((v.evaluate_constructible(h)?.value - v.evaluate_constructible(&moved)?.value).abs())
}

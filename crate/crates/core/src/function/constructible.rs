use std::ops::Neg;

use super::{distinct_with_zero, Cut, ExcursionMode};
use crate::complex::{refine_common, CellId, GridComplex, GridRegion, Side};
use crate::error::{Error, Result};

/// A real value on every open cell of a grid complex, zero outside its
/// bounding box.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstructibleFunction {
    complex: GridComplex,
    values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LatticeOp {
    Max,
    Min,
}

impl ConstructibleFunction {
    pub fn new(complex: GridComplex, values: Vec<f64>) -> Result<ConstructibleFunction> {
        if values.len() != complex.cell_count() {
            return Err(Error::InvalidFunction(format!(
                "{} values for {} cells",
                values.len(),
                complex.cell_count()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("value {i} is not finite")));
        }
        Ok(ConstructibleFunction { complex, values })
    }

    pub fn zero(complex: GridComplex) -> ConstructibleFunction {
        let values = vec![0.0; complex.cell_count()];
        ConstructibleFunction { complex, values }
    }

    /// r times the indicator of `region`.
    pub fn scaled_indicator(region: &GridRegion, r: f64) -> ConstructibleFunction {
        let values = region.mask().iter().map(|&m| if m { r } else { 0.0 }).collect();
        ConstructibleFunction { complex: region.complex().clone(), values }
    }

    pub fn indicator(region: &GridRegion) -> ConstructibleFunction {
        Self::scaled_indicator(region, 1.0)
    }

    pub fn complex(&self) -> &GridComplex {
        &self.complex
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.complex.dim()
    }

    pub fn value(&self, cell: &CellId) -> f64 {
        self.values[self.complex.index(cell)]
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Applies `f` cellwise. `f(0)` should be 0 for the result to stay
    /// compactly supported; this is not checked.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> ConstructibleFunction {
        ConstructibleFunction { complex: self.complex.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }

    /// Same function over a refinement of its complex.
    pub fn lifted(&self, target: &GridComplex) -> Result<ConstructibleFunction> {
        let r = refine_common(&self.complex, target)?;
        Ok(ConstructibleFunction { values: r.lift_values(Side::Left, &self.complex, &self.values), complex: r.common })
    }

    /// Combines two functions cellwise on their common refinement.
    pub fn zip_with(
        &self,
        other: &ConstructibleFunction,
        f: impl Fn(f64, f64) -> f64,
    ) -> Result<ConstructibleFunction> {
        let r = refine_common(&self.complex, &other.complex)?;
        let a = r.lift_values(Side::Left, &self.complex, &self.values);
        let b = r.lift_values(Side::Right, &other.complex, &other.values);
        let values = a.iter().zip(&b).map(|(&x, &y)| f(x, y)).collect();
        Ok(ConstructibleFunction { complex: r.common, values })
    }

    /// Pointwise max or min.
    pub fn lattice(&self, other: &ConstructibleFunction, op: LatticeOp) -> Result<ConstructibleFunction> {
        match op {
            LatticeOp::Max => self.zip_with(other, f64::max),
            LatticeOp::Min => self.zip_with(other, f64::min),
        }
    }

    pub fn add(&self, other: &ConstructibleFunction) -> Result<ConstructibleFunction> {
        self.zip_with(other, |x, y| x + y)
    }

    /// Cells where `cut` holds against `t`, clipped to the bounding box.
    pub fn level_region(&self, cut: Cut, t: f64) -> GridRegion {
        let mask = self.values.iter().map(|&v| cut.holds(v, t)).collect();
        GridRegion::from_mask(self.complex.clone(), mask).expect("mask matches complex")
    }

    /// {h ≥ s}, {h > s}, {h < -s} or {h ≤ -s}. When the mode holds at 0
    /// the true excursion is unbounded; the result is clipped to the box.
    pub fn excursion(&self, s: f64, mode: ExcursionMode) -> GridRegion {
        let (cut, t) = mode.cut(s);
        self.level_region(cut, t)
    }

    /// Distinct cell values together with 0.
    pub fn critical_values(&self) -> Vec<f64> {
        distinct_with_zero(self.values.iter().copied())
    }

    /// Nonzero cells.
    pub fn support(&self) -> GridRegion {
        let mask = self.values.iter().map(|&v| v != 0.0).collect();
        GridRegion::from_mask(self.complex.clone(), mask).expect("mask matches complex")
    }

    /// Same values on a translated or rescaled copy of the complex.
    pub fn with_complex(&self, complex: GridComplex) -> Result<ConstructibleFunction> {
        let region = GridRegion::full(self.complex.clone()).with_complex(complex)?;
        Ok(ConstructibleFunction { complex: region.complex().clone(), values: self.values.clone() })
    }

    /// Exact equality of the represented functions, regardless of how the
    /// two complexes subdivide space.
    pub fn same_function(&self, other: &ConstructibleFunction) -> Result<bool> {
        let diff = self.zip_with(other, |x, y| x - y)?;
        Ok(diff.values.iter().all(|&d| d == 0.0))
    }
}

impl Neg for &ConstructibleFunction {
    type Output = ConstructibleFunction;

    fn neg(self) -> ConstructibleFunction {
        self.map(|v| -v)
    }
}

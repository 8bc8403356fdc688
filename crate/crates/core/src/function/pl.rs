use std::ops::Neg;

use super::{distinct_with_zero, Cut};
use crate::complex::{sign, SimplicialSet};
use crate::error::{Error, Result};
use crate::geom::hull_measure;

/// Vertex values on a simplicial set, affine on every open simplex and zero
/// off the set.
#[derive(Debug, Clone, PartialEq)]
pub struct PLFunction {
    set: SimplicialSet,
    values: Vec<f64>,
}

/// An open cell of dimension `dim` on which a function is affine with
/// image (min, max), or the single value min = max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Piece {
    pub dim: usize,
    pub min: f64,
    pub max: f64,
}

impl Piece {
    pub fn is_constant(&self) -> bool {
        self.min == self.max
    }

    /// χ of {h ⋄ t} within the piece. A non-constant affine function maps
    /// the open cell onto the open interval (min, max); a closed cut leaves
    /// all, nothing, or a half-open slab (χ = 0), an open cut all, nothing,
    /// or an open slab (χ = (-1)^dim).
    pub fn chi(&self, cut: Cut, t: f64) -> i64 {
        let inside = if self.is_constant() {
            cut.holds(self.min, t)
        } else {
            match cut {
                Cut::Geq => t <= self.min,
                Cut::Gt => t < self.max,
                Cut::Lt => t > self.min,
                Cut::Leq => t >= self.max,
            }
        };
        if inside {
            sign(self.dim)
        } else {
            0
        }
    }
}

pub fn pieces_chi(pieces: &[Piece], cut: Cut, t: f64) -> i64 {
    pieces.iter().map(|p| p.chi(cut, t)).sum()
}

impl PLFunction {
    pub fn new(set: SimplicialSet, values: Vec<f64>) -> Result<PLFunction> {
        if values.len() != set.vertices().len() {
            return Err(Error::InvalidFunction(format!(
                "{} values for {} vertices",
                values.len(),
                set.vertices().len()
            )));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidFunction(format!("value {i} is not finite")));
        }
        Ok(PLFunction { set, values })
    }

    /// Values given by `f` at every vertex.
    pub fn sampled(set: SimplicialSet, f: impl Fn(&[f64]) -> f64) -> Result<PLFunction> {
        let values = set.vertices().iter().map(|v| f(v)).collect();
        PLFunction::new(set, values)
    }

    pub fn set(&self) -> &SimplicialSet {
        &self.set
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn ambient_dim(&self) -> usize {
        self.set.ambient_dim()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn cell_values(&self, i: usize) -> Vec<f64> {
        self.set.cells()[i].iter().map(|&v| self.values[v]).collect()
    }

    pub fn piece(&self, i: usize) -> Piece {
        let vals = self.cell_values(i);
        let (min, max) = vals.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        Piece { dim: self.set.cell_dim(i), min, max }
    }

    pub fn pieces(&self) -> Vec<Piece> {
        (0..self.set.cells().len()).map(|i| self.piece(i)).collect()
    }

    /// χ{h ⋄ t}, counting only the set itself. For cuts holding at 0 the
    /// zero region off the set is not included.
    pub fn excursion_chi(&self, cut: Cut, t: f64) -> i64 {
        pieces_chi(&self.pieces(), cut, t)
    }

    /// χ{h ≥ s} or, when `strict`, χ{h > s}.
    pub fn pl_excursion_chi(&self, s: f64, strict: bool) -> i64 {
        self.excursion_chi(if strict { Cut::Gt } else { Cut::Geq }, s)
    }

    /// χ{h = t} = χ{h ≥ t} − χ{h > t}.
    pub fn level_set_chi(&self, t: f64) -> i64 {
        self.excursion_chi(Cut::Geq, t) - self.excursion_chi(Cut::Gt, t)
    }

    /// Distinct vertex values together with 0.
    pub fn critical_values(&self) -> Vec<f64> {
        distinct_with_zero(self.values.iter().copied())
    }

    /// Lebesgue measure of {h ⋄ t} within the set (n ≤ 3).
    pub fn excursion_volume(&self, cut: Cut, t: f64) -> Result<f64> {
        let n = self.ambient_dim();
        if n > 3 {
            return Err(Error::Unsupported(format!("excursion volumes in dimension {n}")));
        }
        let mut total = 0.0;
        for i in 0..self.set.cells().len() {
            if self.set.cell_dim(i) != n {
                continue;
            }
            let vals = self.cell_values(i);
            let vol = self.set.cell_volume(i);
            if vals.iter().all(|&v| v == vals[0]) {
                if cut.holds(vals[0], t) {
                    total += vol;
                }
                continue;
            }
            // the level set has measure zero on a non-constant simplex
            let upper = clipped_volume(&self.set.cell_vertices(i), &vals, t)?;
            total += match cut {
                Cut::Geq | Cut::Gt => upper,
                Cut::Lt | Cut::Leq => (vol - upper).max(0.0),
            };
        }
        Ok(total)
    }

    pub fn transformed(&self, rotation: &[Vec<f64>], translation: &[f64]) -> Result<PLFunction> {
        Ok(PLFunction { set: self.set.transformed(rotation, translation)?, values: self.values.clone() })
    }

    pub fn map_values(&self, f: impl Fn(f64) -> f64) -> PLFunction {
        PLFunction { set: self.set.clone(), values: self.values.iter().map(|&v| f(v)).collect() }
    }
}

impl Neg for &PLFunction {
    type Output = PLFunction;

    fn neg(self) -> PLFunction {
        self.map_values(|v| -v)
    }
}

/// Volume of {x ∈ simplex : h(x) ≥ t} for affine h with vertex values
/// `vals`: hull of the vertices above t and the edge crossings.
fn clipped_volume(vertices: &[Vec<f64>], vals: &[f64], t: f64) -> Result<f64> {
    let n = vertices[0].len();
    let mut pts: Vec<Vec<f64>> = Vec::new();
    for (i, v) in vertices.iter().enumerate() {
        if vals[i] >= t {
            pts.push(v.clone());
        }
        for j in i + 1..vertices.len() {
            let (a, b) = (vals[i] - t, vals[j] - t);
            if (a > 0.0 && b < 0.0) || (a < 0.0 && b > 0.0) {
                let w = a / (a - b);
                pts.push(v.iter().zip(&vertices[j]).map(|(x, y)| x + w * (y - x)).collect());
            }
        }
    }
    if pts.len() <= n {
        return Ok(0.0);
    }
    hull_measure(&pts)
}

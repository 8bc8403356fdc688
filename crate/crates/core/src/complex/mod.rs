//! Explicit cell representations: axis-aligned grid complexes and embedded
//! simplicial sets, both decomposed into pairwise-disjoint open cells.

pub mod grid;
pub mod simplicial;

pub use grid::{region_boolean, refine_common, BooleanOp, CellId, GridComplex, GridRegion, Refinement, Side};
pub use simplicial::{slice_chi, SimplicialSet};

use crate::error::{Error, Result};
use crate::geom::{hull_measure, open_hull_margin, project, AffineFlat, Subspace, FEASIBILITY_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CellShape {
    Simplex,
    Box,
}

/// One open convex cell given by the vertices of its closure.
#[derive(Debug, Clone, PartialEq)]
pub struct OpenPolytope {
    pub dim: usize,
    pub shape: CellShape,
    pub vertices: Vec<Vec<f64>>,
}

impl OpenPolytope {
    /// `dim`-dimensional volume of the cell.
    pub fn volume(&self) -> f64 {
        match self.shape {
            CellShape::Simplex => simplex_volume(&self.vertices),
            CellShape::Box => {
                // corners are listed with axis bits in order; edge vectors from corner 0
                let origin = &self.vertices[0];
                (0..self.dim)
                    .map(|b| {
                        let other = &self.vertices[1 << b];
                        other.iter().zip(origin).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
                    })
                    .product()
            }
        }
    }

    /// k-volume of the orthogonal projection of the closed cell onto
    /// `target` (k = `target.dim()`). Boxes project to zonotopes, whose
    /// volume is the sum of |det| over k-subsets of projected edges.
    pub fn projected_measure(&self, target: &Subspace) -> Result<f64> {
        let k = target.dim();
        match self.shape {
            CellShape::Simplex => hull_measure(&project(&self.vertices, target)?),
            CellShape::Box => {
                if k == 0 {
                    return Ok(1.0);
                }
                let origin = target.coordinates(&self.vertices[0]);
                let gens: Vec<Vec<f64>> = (0..self.dim)
                    .map(|b| {
                        let p = target.coordinates(&self.vertices[1 << b]);
                        p.iter().zip(&origin).map(|(a, o)| a - o).collect()
                    })
                    .collect();
                let mut total = 0.0;
                for subset in k_subsets(gens.len(), k) {
                    let m: Vec<Vec<f64>> = (0..k).map(|r| subset.iter().map(|&g| gens[g][r]).collect()).collect();
                    total += determinant(m).abs();
                }
                Ok(total)
            }
        }
    }

    /// Euler characteristic of the cell: (-1)^dim.
    pub fn chi(&self) -> i64 {
        sign(self.dim)
    }
}

fn k_subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(k);
    fn rec(start: usize, n: usize, k: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == k {
            out.push(cur.clone());
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, k, cur, out);
            cur.pop();
        }
    }
    rec(0, n, k, &mut cur, &mut out);
    out
}

pub(crate) fn sign(d: usize) -> i64 {
    if d.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// Volume of the simplex spanned by `vertices` inside its affine hull,
/// from the Gram determinant of the edge vectors.
pub(crate) fn simplex_volume(vertices: &[Vec<f64>]) -> f64 {
    let d = vertices.len() - 1;
    if d == 0 {
        return 1.0;
    }
    let edges: Vec<Vec<f64>> = vertices[1..]
        .iter()
        .map(|v| v.iter().zip(&vertices[0]).map(|(a, b)| a - b).collect())
        .collect();
    let mut gram = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in 0..d {
            gram[i][j] = crate::geom::dot(&edges[i], &edges[j]);
        }
    }
    let det = determinant(gram).max(0.0);
    let fact: f64 = (1..=d).map(|i| i as f64).product();
    det.sqrt() / fact
}

pub(crate) fn determinant(mut m: Vec<Vec<f64>>) -> f64 {
    let n = m.len();
    let mut det = 1.0;
    for c in 0..n {
        let p = (c..n).max_by(|&a, &b| m[a][c].abs().total_cmp(&m[b][c].abs())).unwrap();
        if m[p][c] == 0.0 {
            return 0.0;
        }
        if p != c {
            m.swap(p, c);
            det = -det;
        }
        det *= m[c][c];
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    det
}

/// A finite disjoint union of open convex cells in R^n.
pub trait CellComplex {
    fn ambient_dim(&self) -> usize;
    fn open_cells(&self) -> Vec<OpenPolytope>;
}

/// Relation of a generic flat to one open cell.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlatHit {
    Miss,
    /// The flat meets the cell in an open cell of the given dimension.
    Hit(usize),
}

/// Decides whether `flat` meets the open cell. Cells below the flat's
/// codimension are missed by generic flats. Near-ties are reported as
/// [`Error::DegenerateFlat`] so the caller can resample.
pub fn flat_meets(cell: &OpenPolytope, flat: &AffineFlat) -> Result<FlatHit> {
    let k = flat.codim();
    if cell.dim < k {
        return Ok(FlatHit::Miss);
    }
    let projected = project(&cell.vertices, flat.normal())?;
    match open_hull_margin(flat.offset_coords(), &projected)? {
        None => Ok(FlatHit::Miss),
        Some(t) if t > FEASIBILITY_TOL => Ok(FlatHit::Hit(cell.dim - k)),
        Some(t) if t < -FEASIBILITY_TOL => Ok(FlatHit::Miss),
        Some(t) => Err(Error::DegenerateFlat { margin: t }),
    }
}

/// χ of the intersection of the cells with `flat`.
pub fn slice_chi_cells(cells: &[OpenPolytope], flat: &AffineFlat) -> Result<i64> {
    let mut chi = 0;
    for cell in cells {
        if cell.vertices.first().is_some_and(|v| v.len() != flat.ambient_dim()) {
            return Err(Error::DimensionMismatch {
                expected: flat.ambient_dim(),
                found: cell.vertices[0].len(),
            });
        }
        if let FlatHit::Hit(d) = flat_meets(cell, flat)? {
            chi += sign(d);
        }
    }
    Ok(chi)
}

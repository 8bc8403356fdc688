use std::collections::BTreeSet;

use super::{sign, simplex_volume, slice_chi_cells, CellComplex, CellShape, OpenPolytope};
use crate::error::{Error, Result};
use crate::geom::lp::{maximize, LpOutcome};
use crate::geom::{mat_vec, AffineFlat, FEASIBILITY_TOL};

/// Above this many cells, pairwise disjointness is left to the producer.
pub const DISJOINTNESS_CHECK_LIMIT: usize = 1000;

/// A finite set of pairwise-disjoint open simplices embedded in R^n.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplicialSet {
    n: usize,
    vertices: Vec<Vec<f64>>,
    cells: Vec<Vec<usize>>,
}

impl SimplicialSet {
    /// Validates vertex dimensions, indices, affine independence, and (for
    /// up to [`DISJOINTNESS_CHECK_LIMIT`] cells) pairwise disjointness.
    pub fn new(n: usize, vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<SimplicialSet> {
        let set = SimplicialSet::unchecked(n, vertices, cells)?;
        if set.cells.len() <= DISJOINTNESS_CHECK_LIMIT {
            set.check_disjoint()?;
        }
        Ok(set)
    }

    /// Like [`SimplicialSet::new`] but trusts the caller on disjointness.
    pub fn unchecked(n: usize, vertices: Vec<Vec<f64>>, cells: Vec<Vec<usize>>) -> Result<SimplicialSet> {
        for v in &vertices {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
            if v.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidSimplicialSet("non-finite vertex coordinate".into()));
            }
        }
        for (i, cell) in cells.iter().enumerate() {
            if cell.is_empty() {
                return Err(Error::InvalidSimplicialSet(format!("cell {i} has no vertices")));
            }
            if cell.len() > n + 1 {
                return Err(Error::InvalidSimplicialSet(format!("cell {i} has dimension above {n}")));
            }
            let distinct: BTreeSet<_> = cell.iter().collect();
            if distinct.len() != cell.len() {
                return Err(Error::InvalidSimplicialSet(format!("cell {i} repeats a vertex")));
            }
            if let Some(&bad) = cell.iter().find(|&&v| v >= vertices.len()) {
                return Err(Error::InvalidSimplicialSet(format!("cell {i} references missing vertex {bad}")));
            }
            let pts: Vec<Vec<f64>> = cell.iter().map(|&v| vertices[v].clone()).collect();
            if !affinely_independent(&pts) {
                return Err(Error::InvalidSimplicialSet(format!("cell {i} is degenerate")));
            }
        }
        Ok(SimplicialSet { n, vertices, cells })
    }

    /// All faces of the given closed simplices, each listed once.
    pub fn closed(n: usize, vertices: Vec<Vec<f64>>, simplices: &[Vec<usize>]) -> Result<SimplicialSet> {
        SimplicialSet::new(n, vertices, all_faces(simplices))
    }

    /// Closed box `[lo, hi]` cut into `m` slabs per axis, each small cube
    /// split into n! simplices along its main diagonal (Kuhn triangulation).
    pub fn triangulated_box(lo: &[f64], hi: &[f64], m: usize) -> Result<SimplicialSet> {
        let n = lo.len();
        if hi.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: hi.len() });
        }
        if n == 0 || m == 0 || lo.iter().zip(hi).any(|(a, b)| !(a < b)) {
            return Err(Error::InvalidSimplicialSet("box needs n ≥ 1, m ≥ 1 and lo < hi".into()));
        }
        let side = m + 1;
        let count = side.pow(n as u32);
        let index = |g: &[usize]| g.iter().rev().fold(0, |acc, &x| acc * side + x);
        let vertices: Vec<Vec<f64>> = (0..count)
            .map(|mut i| {
                (0..n)
                    .map(|a| {
                        let g = i % side;
                        i /= side;
                        lo[a] + (hi[a] - lo[a]) * g as f64 / m as f64
                    })
                    .collect()
            })
            .collect();
        let perms = permutations(n);
        let mut tops = Vec::new();
        for c in 0..m.pow(n as u32) {
            let mut rest = c;
            let base: Vec<usize> = (0..n)
                .map(|_| {
                    let g = rest % m;
                    rest /= m;
                    g
                })
                .collect();
            for p in &perms {
                let mut g = base.clone();
                let mut simplex = vec![index(&g)];
                for &a in p {
                    g[a] += 1;
                    simplex.push(index(&g));
                }
                tops.push(simplex);
            }
        }
        SimplicialSet::unchecked(n, vertices, all_faces(&tops))
    }
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, n - 1);
            out.push(q);
        }
    }
    out
}

/// Every face of every listed simplex, once, lower dimensions first.
fn all_faces(simplices: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    for s in simplices {
        let mut sorted = s.clone();
        sorted.sort_unstable();
        for mask in 1..(1usize << sorted.len()) {
            let face: Vec<usize> = (0..sorted.len()).filter(|b| mask >> b & 1 == 1).map(|b| sorted[b]).collect();
            faces.insert(face);
        }
    }
    let mut cells: Vec<Vec<usize>> = faces.into_iter().collect();
    cells.sort_by_key(|c| c.len());
    cells
}

impl SimplicialSet {
    pub fn empty(n: usize) -> SimplicialSet {
        SimplicialSet { n, vertices: Vec::new(), cells: Vec::new() }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn vertices(&self) -> &[Vec<f64>] {
        &self.vertices
    }

    pub fn cells(&self) -> &[Vec<usize>] {
        &self.cells
    }

    pub fn cell_dim(&self, i: usize) -> usize {
        self.cells[i].len() - 1
    }

    pub fn cell_vertices(&self, i: usize) -> Vec<Vec<f64>> {
        self.cells[i].iter().map(|&v| self.vertices[v].clone()).collect()
    }

    /// Σ over open simplices of (-1)^dim.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells.iter().map(|c| sign(c.len() - 1)).sum()
    }

    /// `dim`-volume of cell `i` in its own affine hull.
    pub fn cell_volume(&self, i: usize) -> f64 {
        simplex_volume(&self.cell_vertices(i))
    }

    /// Lebesgue measure: total volume of the n-dimensional cells.
    pub fn lebesgue_volume(&self) -> f64 {
        (0..self.cells.len()).filter(|&i| self.cell_dim(i) == self.n).map(|i| self.cell_volume(i)).sum()
    }

    /// Image under `x -> rotation·x + translation`.
    pub fn transformed(&self, rotation: &[Vec<f64>], translation: &[f64]) -> Result<SimplicialSet> {
        if rotation.len() != self.n || rotation.iter().any(|r| r.len() != self.n) {
            return Err(Error::DimensionMismatch { expected: self.n, found: rotation.len() });
        }
        if translation.len() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: translation.len() });
        }
        let vertices = self
            .vertices
            .iter()
            .map(|v| mat_vec(rotation, v).iter().zip(translation).map(|(a, b)| a + b).collect())
            .collect();
        Ok(SimplicialSet { n: self.n, vertices, cells: self.cells.clone() })
    }

    fn check_disjoint(&self) -> Result<()> {
        let boxes: Vec<Vec<(f64, f64)>> = (0..self.cells.len())
            .map(|i| {
                (0..self.n)
                    .map(|a| {
                        self.cells[i].iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                            (lo.min(self.vertices[v][a]), hi.max(self.vertices[v][a]))
                        })
                    })
                    .collect()
            })
            .collect();
        let scale = boxes
            .iter()
            .flat_map(|b| b.iter().map(|(lo, hi)| lo.abs().max(hi.abs())))
            .fold(1.0, f64::max);
        let tol = 1e-12 * scale;
        for i in 0..self.cells.len() {
            for j in i + 1..self.cells.len() {
                let (a, b) = (&self.cells[i], &self.cells[j]);
                if a.len() == b.len() && a.iter().collect::<BTreeSet<_>>() == b.iter().collect::<BTreeSet<_>>() {
                    return Err(Error::InvalidSimplicialSet(format!("cells {i} and {j} coincide")));
                }
                if !boxes_may_meet(&boxes[i], &boxes[j], tol) {
                    continue;
                }
                if self.open_cells_meet(i, j) {
                    return Err(Error::InvalidSimplicialSet(format!("open cells {i} and {j} intersect")));
                }
            }
        }
        Ok(())
    }

    /// Largest t with a common point expressible with all barycentric
    /// weights of both simplices at least t; positive means overlap.
    fn open_cells_meet(&self, i: usize, j: usize) -> bool {
        let (a, b) = (&self.cells[i], &self.cells[j]);
        let (na, nb) = (a.len(), b.len());
        // columns: α (na), β (nb), t⁺, t⁻ with λ = α + t, μ = β + t
        let width = na + nb + 2;
        let mut rows = Vec::with_capacity(self.n + 2);
        let mut rhs = Vec::with_capacity(self.n + 2);
        let mut r = vec![0.0; width];
        r[..na].iter_mut().for_each(|x| *x = 1.0);
        r[na + nb] = na as f64;
        r[na + nb + 1] = -(na as f64);
        rows.push(r);
        rhs.push(1.0);
        let mut r = vec![0.0; width];
        r[na..na + nb].iter_mut().for_each(|x| *x = 1.0);
        r[na + nb] = nb as f64;
        r[na + nb + 1] = -(nb as f64);
        rows.push(r);
        rhs.push(1.0);
        for axis in 0..self.n {
            let mut r = vec![0.0; width];
            let mut s = 0.0;
            for (c, &v) in a.iter().enumerate() {
                r[c] = self.vertices[v][axis];
                s += self.vertices[v][axis];
            }
            for (c, &v) in b.iter().enumerate() {
                r[na + c] = -self.vertices[v][axis];
                s -= self.vertices[v][axis];
            }
            r[na + nb] = s;
            r[na + nb + 1] = -s;
            rows.push(r);
            rhs.push(0.0);
        }
        let mut cost = vec![0.0; width];
        cost[na + nb] = 1.0;
        cost[na + nb + 1] = -1.0;
        match maximize(&cost, &rows, &rhs, FEASIBILITY_TOL) {
            LpOutcome::Optimal { value, .. } => value > FEASIBILITY_TOL,
            _ => false,
        }
    }
}

fn boxes_may_meet(a: &[(f64, f64)], b: &[(f64, f64)], tol: f64) -> bool {
    a.iter().zip(b).all(|(&(alo, ahi), &(blo, bhi))| {
        let a_point = ahi - alo <= tol;
        let b_point = bhi - blo <= tol;
        match (a_point, b_point) {
            (true, true) => (alo - blo).abs() <= tol,
            (true, false) => blo + tol < alo && alo < bhi - tol,
            (false, true) => alo + tol < blo && blo < ahi - tol,
            (false, false) => alo.max(blo) < ahi.min(bhi) - tol,
        }
    })
}

fn affinely_independent(points: &[Vec<f64>]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let scale = points.iter().flat_map(|p| p.iter().map(|x| x.abs())).fold(1.0, f64::max);
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for p in &points[1..] {
        let mut r: Vec<f64> = p.iter().zip(&points[0]).map(|(a, b)| a - b).collect();
        for _ in 0..2 {
            for b in &basis {
                let c = crate::geom::dot(b, &r);
                r.iter_mut().zip(b).for_each(|(x, bi)| *x -= c * bi);
            }
        }
        let nr = crate::geom::dot(&r, &r).sqrt();
        if nr <= 1e-12 * scale {
            return false;
        }
        basis.push(r.into_iter().map(|x| x / nr).collect());
    }
    true
}

impl CellComplex for SimplicialSet {
    fn ambient_dim(&self) -> usize {
        self.n
    }

    fn open_cells(&self) -> Vec<OpenPolytope> {
        (0..self.cells.len())
            .map(|i| OpenPolytope { dim: self.cell_dim(i), shape: CellShape::Simplex, vertices: self.cell_vertices(i) })
            .collect()
    }
}

/// χ(A ∩ P) for a generic affine flat P of codimension k: every open
/// simplex of dimension d ≥ k met by P contributes (-1)^(d-k).
pub fn slice_chi(set: &SimplicialSet, flat: &AffineFlat) -> Result<i64> {
    if flat.ambient_dim() != set.n {
        return Err(Error::DimensionMismatch { expected: set.n, found: flat.ambient_dim() });
    }
    slice_chi_cells(&set.open_cells(), flat)
}

//! Product decompositions of a box by per-axis breakpoints.
//!
//! A cell picks, on every axis, either a breakpoint or the open interval
//! between two consecutive breakpoints. On an axis with `m` breakpoints the
//! choices are numbered by parity index `0..2m-1`: even `2j` is breakpoint
//! `j`, odd `2j+1` is the interval `(b_j, b_{j+1})`. Linear cell indices
//! are mixed-radix over the parity indices with axis 0 varying fastest.

use std::collections::BTreeSet;

use super::{sign, CellComplex, CellShape, OpenPolytope};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub Vec<usize>);

impl CellId {
    /// Number of interval factors.
    pub fn dim(&self) -> usize {
        self.0.iter().filter(|p| *p % 2 == 1).count()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridComplex {
    breakpoints: Vec<Vec<f64>>,
}

impl GridComplex {
    pub fn new(breakpoints: Vec<Vec<f64>>) -> Result<GridComplex> {
        if breakpoints.is_empty() {
            return Err(Error::InvalidComplex("no axes".into()));
        }
        for (a, axis) in breakpoints.iter().enumerate() {
            if axis.len() < 2 {
                return Err(Error::InvalidComplex(format!("axis {a} has fewer than 2 breakpoints")));
            }
            if axis.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidComplex(format!("axis {a} has a non-finite breakpoint")));
            }
            if axis.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::InvalidComplex(format!("axis {a} breakpoints not strictly increasing")));
            }
        }
        Ok(GridComplex { breakpoints })
    }

    /// The box `[lo_0, hi_0] × ...` with no interior breakpoints.
    pub fn bounding(lo: &[f64], hi: &[f64]) -> Result<GridComplex> {
        GridComplex::new(lo.iter().zip(hi).map(|(a, b)| vec![*a, *b]).collect())
    }

    pub fn dim(&self) -> usize {
        self.breakpoints.len()
    }

    pub fn breakpoints(&self) -> &[Vec<f64>] {
        &self.breakpoints
    }

    /// Number of parity indices on `axis`.
    pub fn axis_len(&self, axis: usize) -> usize {
        2 * self.breakpoints[axis].len() - 1
    }

    pub fn cell_count(&self) -> usize {
        (0..self.dim()).map(|a| self.axis_len(a)).product()
    }

    pub fn check_cell(&self, cell: &CellId) -> Result<()> {
        if cell.0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: cell.0.len() });
        }
        for (a, &p) in cell.0.iter().enumerate() {
            if p >= self.axis_len(a) {
                return Err(Error::InvalidCell(format!("parity index {p} out of range on axis {a}")));
            }
        }
        Ok(())
    }

    pub fn index(&self, cell: &CellId) -> usize {
        let mut idx = 0;
        let mut stride = 1;
        for (a, &p) in cell.0.iter().enumerate() {
            idx += p * stride;
            stride *= self.axis_len(a);
        }
        idx
    }

    pub fn cell(&self, mut index: usize) -> CellId {
        let mut parts = Vec::with_capacity(self.dim());
        for a in 0..self.dim() {
            let len = self.axis_len(a);
            parts.push(index % len);
            index /= len;
        }
        CellId(parts)
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        (0..self.cell_count()).map(|i| self.cell(i))
    }

    /// Lengths of the interval factors of `cell`.
    pub fn edge_lengths(&self, cell: &CellId) -> Vec<f64> {
        cell.0
            .iter()
            .enumerate()
            .filter(|(_, p)| *p % 2 == 1)
            .map(|(a, p)| {
                let j = p / 2;
                self.breakpoints[a][j + 1] - self.breakpoints[a][j]
            })
            .collect()
    }

    /// Every face of `cell`, itself included.
    pub fn faces(&self, cell: &CellId) -> Vec<CellId> {
        let options: Vec<Vec<usize>> = cell
            .0
            .iter()
            .map(|&p| if p % 2 == 1 { vec![p - 1, p, p + 1] } else { vec![p] })
            .collect();
        cartesian(&options).into_iter().map(CellId).collect()
    }

    /// Every cell whose closure contains `cell`, itself included.
    pub fn cofaces(&self, cell: &CellId) -> Vec<CellId> {
        let options: Vec<Vec<usize>> = cell
            .0
            .iter()
            .enumerate()
            .map(|(a, &p)| {
                if p % 2 == 1 {
                    vec![p]
                } else {
                    let mut o = Vec::with_capacity(3);
                    if p > 0 {
                        o.push(p - 1);
                    }
                    o.push(p);
                    if p + 1 < self.axis_len(a) {
                        o.push(p + 1);
                    }
                    o
                }
            })
            .collect();
        cartesian(&options).into_iter().map(CellId).collect()
    }

    /// Corners of the closed cell; bit `b` of the corner number selects the
    /// upper endpoint of the `b`-th interval factor.
    pub fn corners(&self, cell: &CellId) -> Vec<Vec<f64>> {
        let free: Vec<usize> = (0..self.dim()).filter(|&a| cell.0[a] % 2 == 1).collect();
        let base: Vec<f64> = cell.0.iter().enumerate().map(|(a, p)| self.breakpoints[a][p / 2]).collect();
        (0..1usize << free.len())
            .map(|bits| {
                let mut c = base.clone();
                for (b, &a) in free.iter().enumerate() {
                    if bits >> b & 1 == 1 {
                        c[a] = self.breakpoints[a][cell.0[a] / 2 + 1];
                    }
                }
                c
            })
            .collect()
    }

    /// Volume of the cell if it is full-dimensional, 0 otherwise.
    pub fn cell_volume(&self, cell: &CellId) -> f64 {
        if cell.dim() < self.dim() {
            return 0.0;
        }
        self.edge_lengths(cell).iter().product()
    }

    pub fn scaled(&self, factor: f64) -> Result<GridComplex> {
        if factor <= 0.0 {
            return Err(Error::InvalidComplex("scale factor must be positive".into()));
        }
        GridComplex::new(self.breakpoints.iter().map(|ax| ax.iter().map(|x| x * factor).collect()).collect())
    }

    pub fn translated(&self, shift: &[f64]) -> Result<GridComplex> {
        if shift.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: shift.len() });
        }
        GridComplex::new(
            self.breakpoints.iter().zip(shift).map(|(ax, s)| ax.iter().map(|x| x + s).collect()).collect(),
        )
    }
}

fn cartesian(options: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::with_capacity(options.len())];
    for opts in options {
        let mut next = Vec::with_capacity(out.len() * opts.len());
        for prefix in &out {
            for &o in opts {
                let mut p = prefix.clone();
                p.push(o);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// A finite union of open cells of a grid complex.
#[derive(Debug, Clone, PartialEq)]
pub struct GridRegion {
    complex: GridComplex,
    mask: Vec<bool>,
}

impl GridRegion {
    pub fn new(complex: GridComplex, cells: impl IntoIterator<Item = CellId>) -> Result<GridRegion> {
        let mut mask = vec![false; complex.cell_count()];
        for c in cells {
            complex.check_cell(&c)?;
            mask[complex.index(&c)] = true;
        }
        Ok(GridRegion { complex, mask })
    }

    pub fn empty(complex: GridComplex) -> GridRegion {
        let mask = vec![false; complex.cell_count()];
        GridRegion { complex, mask }
    }

    /// The closed bounding box of the complex.
    pub fn full(complex: GridComplex) -> GridRegion {
        let mask = vec![true; complex.cell_count()];
        GridRegion { complex, mask }
    }

    pub fn from_mask(complex: GridComplex, mask: Vec<bool>) -> Result<GridRegion> {
        if mask.len() != complex.cell_count() {
            return Err(Error::DimensionMismatch { expected: complex.cell_count(), found: mask.len() });
        }
        Ok(GridRegion { complex, mask })
    }

    pub fn complex(&self) -> &GridComplex {
        &self.complex
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn contains(&self, cell: &CellId) -> bool {
        self.complex.check_cell(cell).is_ok() && self.mask[self.complex.index(cell)]
    }

    pub fn cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.mask.iter().enumerate().filter(|(_, m)| **m).map(|(i, _)| self.complex.cell(i))
    }

    pub fn len(&self) -> usize {
        self.mask.iter().filter(|m| **m).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.mask.iter().any(|m| *m)
    }

    /// Σ over cells of (-1)^dim.
    pub fn euler_characteristic(&self) -> i64 {
        self.cells().map(|c| sign(c.dim())).sum()
    }

    /// Adds every face of every cell.
    pub fn closure(&self) -> GridRegion {
        let mut mask = self.mask.clone();
        for cell in self.cells() {
            for f in self.complex.faces(&cell) {
                mask[self.complex.index(&f)] = true;
            }
        }
        GridRegion { complex: self.complex.clone(), mask }
    }

    /// Same cells on a rescaled or translated copy of the complex.
    pub fn with_complex(&self, complex: GridComplex) -> Result<GridRegion> {
        if complex.breakpoints.iter().map(Vec::len).ne(self.complex.breakpoints.iter().map(Vec::len)) {
            return Err(Error::InvalidComplex("complex shape differs".into()));
        }
        Ok(GridRegion { complex, mask: self.mask.clone() })
    }
}

impl CellComplex for GridRegion {
    fn ambient_dim(&self) -> usize {
        self.complex.dim()
    }

    fn open_cells(&self) -> Vec<OpenPolytope> {
        self.cells()
            .map(|c| OpenPolytope { dim: c.dim(), shape: CellShape::Box, vertices: self.complex.corners(&c) })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

/// Common refinement of two grid complexes.
#[derive(Debug, Clone)]
pub struct Refinement {
    pub common: GridComplex,
    // per side, per axis: original breakpoint index -> refined breakpoint index
    forward: [Vec<Vec<usize>>; 2],
    // per side, per axis: refined parity index -> original parity index
    backward: [Vec<Vec<Option<usize>>>; 2],
}

/// Merges breakpoints axis by axis and records how original cells split.
pub fn refine_common(a: &GridComplex, b: &GridComplex) -> Result<Refinement> {
    if a.dim() != b.dim() {
        return Err(Error::DimensionMismatch { expected: a.dim(), found: b.dim() });
    }
    let mut merged = Vec::with_capacity(a.dim());
    for axis in 0..a.dim() {
        let mut all: Vec<f64> = a.breakpoints[axis].iter().chain(&b.breakpoints[axis]).copied().collect();
        all.sort_by(f64::total_cmp);
        all.dedup();
        merged.push(all);
    }
    let common = GridComplex::new(merged)?;
    let forward = [forward_maps(a, &common), forward_maps(b, &common)];
    let backward = [backward_maps(a, &common), backward_maps(b, &common)];
    Ok(Refinement { common, forward, backward })
}

fn forward_maps(orig: &GridComplex, common: &GridComplex) -> Vec<Vec<usize>> {
    orig.breakpoints
        .iter()
        .zip(&common.breakpoints)
        .map(|(ob, cb)| {
            ob.iter()
                .map(|x| cb.binary_search_by(|y| y.total_cmp(x)).expect("breakpoint present in union"))
                .collect()
        })
        .collect()
}

fn backward_maps(orig: &GridComplex, common: &GridComplex) -> Vec<Vec<Option<usize>>> {
    orig.breakpoints
        .iter()
        .zip(&common.breakpoints)
        .map(|(ob, cb)| {
            (0..2 * cb.len() - 1)
                .map(|p| {
                    let x = if p % 2 == 0 { cb[p / 2] } else { 0.5 * (cb[p / 2] + cb[p / 2 + 1]) };
                    locate(ob, x)
                })
                .collect()
        })
        .collect()
}

/// Parity index of the original cell containing coordinate `x`.
fn locate(bps: &[f64], x: f64) -> Option<usize> {
    if x < bps[0] || x > bps[bps.len() - 1] {
        return None;
    }
    match bps.binary_search_by(|y| y.total_cmp(&x)) {
        Ok(j) => Some(2 * j),
        Err(j) => Some(2 * (j - 1) + 1),
    }
}

impl Refinement {
    fn slot(side: Side) -> usize {
        match side {
            Side::Left => 0,
            Side::Right => 1,
        }
    }

    /// Refined cells partitioning an original cell.
    pub fn refined_cells(&self, side: Side, cell: &CellId) -> Vec<CellId> {
        let maps = &self.forward[Self::slot(side)];
        let options: Vec<Vec<usize>> = cell
            .0
            .iter()
            .enumerate()
            .map(|(a, &p)| {
                let j = p / 2;
                if p % 2 == 0 {
                    vec![2 * maps[a][j]]
                } else {
                    (2 * maps[a][j] + 1..2 * maps[a][j + 1]).collect()
                }
            })
            .collect();
        cartesian(&options).into_iter().map(CellId).collect()
    }

    /// The original cell containing a refined cell, if any.
    pub fn source_cell(&self, side: Side, refined: &CellId) -> Option<CellId> {
        let maps = &self.backward[Self::slot(side)];
        refined.0.iter().enumerate().map(|(a, &p)| maps[a][p]).collect::<Option<Vec<_>>>().map(CellId)
    }

    pub fn lift_region(&self, side: Side, region: &GridRegion) -> GridRegion {
        let mask = self
            .common
            .cells()
            .map(|c| self.source_cell(side, &c).is_some_and(|s| region.mask[region.complex.index(&s)]))
            .collect();
        GridRegion { complex: self.common.clone(), mask }
    }

    /// Cell values on the refined complex; zero outside the original box.
    pub fn lift_values(&self, side: Side, orig: &GridComplex, values: &[f64]) -> Vec<f64> {
        self.common
            .cells()
            .map(|c| self.source_cell(side, &c).map_or(0.0, |s| values[orig.index(&s)]))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BooleanOp {
    Union,
    Intersection,
    Difference,
}

/// Set operation after expressing both regions on their common refinement.
pub fn region_boolean(a: &GridRegion, b: &GridRegion, op: BooleanOp) -> Result<GridRegion> {
    let r = refine_common(&a.complex, &b.complex)?;
    let la = r.lift_region(Side::Left, a);
    let lb = r.lift_region(Side::Right, b);
    let mask = la
        .mask
        .iter()
        .zip(&lb.mask)
        .map(|(&x, &y)| match op {
            BooleanOp::Union => x || y,
            BooleanOp::Intersection => x && y,
            BooleanOp::Difference => x && !y,
        })
        .collect();
    Ok(GridRegion { complex: r.common, mask })
}

/// Distinct cells of a region as a set, mainly for tests and diagnostics.
pub fn cell_set(region: &GridRegion) -> BTreeSet<CellId> {
    region.cells().collect()
}

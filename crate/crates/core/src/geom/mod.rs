//! Low-dimensional linear algebra for the Crofton estimators: Haar-random
//! subspaces, orthogonal projection, affine flats, hull measures and the
//! small linear programs deciding fiber membership.

pub mod hull;
pub mod lp;

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub use hull::{fiber_range, hull_contains, hull_measure, open_hull_margin, FEASIBILITY_TOL};

/// Threshold on the Gram-Schmidt diagonal below which a Gaussian draw is
/// treated as rank-deficient and redrawn.
const RANK_THRESHOLD: f64 = 1e-10;

/// Orthonormality tolerance accepted for caller-supplied bases.
const ORTHONORMAL_TOL: f64 = 1e-10;

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// A linear subspace of R^n given by an orthonormal basis.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    n: usize,
    basis: Vec<Vec<f64>>,
}

impl Subspace {
    /// Wraps an orthonormal basis, checking the Gram matrix.
    pub fn new(n: usize, basis: Vec<Vec<f64>>) -> Result<Subspace> {
        if basis.len() > n {
            return Err(Error::InvalidDimension(format!(
                "{} basis vectors in R^{n}",
                basis.len()
            )));
        }
        for b in &basis {
            if b.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: b.len() });
            }
        }
        let s = Subspace { n, basis };
        let dev = s.gram_deviation();
        if dev > ORTHONORMAL_TOL {
            return Err(Error::NonOrthogonal(dev));
        }
        Ok(s)
    }

    /// Orthonormalizes `vectors` (modified Gram-Schmidt, two passes).
    pub fn span(n: usize, vectors: &[Vec<f64>]) -> Result<Subspace> {
        match orthonormalize(n, vectors)? {
            Some(basis) => Ok(Subspace { n, basis }),
            None => Err(Error::InvalidDimension("spanning vectors are linearly dependent".into())),
        }
    }

    /// Coordinate axes `axes` of R^n.
    pub fn axes(n: usize, axes: &[usize]) -> Result<Subspace> {
        let mut basis = Vec::with_capacity(axes.len());
        for &a in axes {
            if a >= n {
                return Err(Error::InvalidDimension(format!("axis {a} in R^{n}")));
            }
            let mut e = vec![0.0; n];
            e[a] = 1.0;
            basis.push(e);
        }
        Subspace::new(n, basis)
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<f64>] {
        &self.basis
    }

    /// Largest entry of |B Bᵀ - I|.
    pub fn gram_deviation(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (i, a) in self.basis.iter().enumerate() {
            for (j, b) in self.basis.iter().enumerate() {
                let target = if i == j { 1.0 } else { 0.0 };
                worst = worst.max((dot(a, b) - target).abs());
            }
        }
        worst
    }

    /// Coordinates of `p` in this basis.
    pub fn coordinates(&self, p: &[f64]) -> Vec<f64> {
        self.basis.iter().map(|b| dot(b, p)).collect()
    }

    /// Point of R^n with the given coordinates in this basis.
    pub fn embed(&self, coords: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n];
        for (c, b) in coords.iter().zip(&self.basis) {
            for (o, bi) in out.iter_mut().zip(b) {
                *o += c * bi;
            }
        }
        out
    }

    /// Orthonormal basis of the orthogonal complement. Coordinate axes are
    /// added greedily by largest residual, so the result is deterministic.
    pub fn complement(&self) -> Subspace {
        let mut basis = self.basis.clone();
        let mut added = Vec::new();
        while basis.len() < self.n {
            let mut best: Option<(f64, Vec<f64>)> = None;
            for axis in 0..self.n {
                let mut e = vec![0.0; self.n];
                e[axis] = 1.0;
                let r = residual(&e, &basis);
                let nr = norm(&r);
                if best.as_ref().is_none_or(|(bn, _)| nr > *bn) {
                    best = Some((nr, r));
                }
            }
            let (nr, r) = best.expect("n > 0");
            let mut v: Vec<f64> = r.iter().map(|x| x / nr).collect();
            // second pass keeps the basis orthonormal to working precision
            v = residual(&v, &basis);
            let nv = norm(&v);
            v.iter_mut().for_each(|x| *x /= nv);
            basis.push(v.clone());
            added.push(v);
        }
        Subspace { n: self.n, basis: added }
    }

    /// Image under the orthogonal map `rotation` (row-major n×n).
    pub fn rotated(&self, rotation: &[Vec<f64>]) -> Subspace {
        let basis = self.basis.iter().map(|b| mat_vec(rotation, b)).collect();
        Subspace { n: self.n, basis }
    }
}

pub(crate) fn mat_vec(m: &[Vec<f64>], v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| dot(row, v)).collect()
}

fn residual(v: &[f64], basis: &[Vec<f64>]) -> Vec<f64> {
    let mut r = v.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &r);
            for (x, bi) in r.iter_mut().zip(b) {
                *x -= c * bi;
            }
        }
    }
    r
}

/// Gram-Schmidt with re-orthogonalization. `None` if some diagonal entry of
/// the implied triangular factor falls below the rank threshold.
fn orthonormalize(n: usize, vectors: &[Vec<f64>]) -> Result<Option<Vec<Vec<f64>>>> {
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(vectors.len());
    for v in vectors {
        if v.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: v.len() });
        }
        let r = residual(v, &basis);
        let nr = norm(&r);
        if nr < RANK_THRESHOLD {
            return Ok(None);
        }
        basis.push(r.into_iter().map(|x| x / nr).collect());
    }
    Ok(Some(basis))
}

/// Draws a `d`-dimensional subspace of R^n from the rotation-invariant
/// probability measure by orthonormalizing `d` standard Gaussian vectors.
pub fn sample_subspace<R: Rng + ?Sized>(n: usize, d: usize, rng: &mut R) -> Result<Subspace> {
    if d > n {
        return Err(Error::InvalidDimension(format!("subspace of dimension {d} in R^{n}")));
    }
    loop {
        let vectors: Vec<Vec<f64>> = (0..d)
            .map(|_| (0..n).map(|_| rng.sample::<f64, _>(StandardNormal)).collect())
            .collect();
        if let Some(basis) = orthonormalize(n, &vectors)? {
            return Ok(Subspace { n, basis });
        }
    }
}

/// Coordinates of every point in the basis of `subspace`.
pub fn project(points: &[Vec<f64>], subspace: &Subspace) -> Result<Vec<Vec<f64>>> {
    points
        .iter()
        .map(|p| {
            if p.len() != subspace.n {
                Err(Error::DimensionMismatch { expected: subspace.n, found: p.len() })
            } else {
                Ok(subspace.coordinates(p))
            }
        })
        .collect()
}

/// The affine flat `L + x` with `x` orthogonal to `L`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineFlat {
    subspace: Subspace,
    offset: Vec<f64>,
    normal: Subspace,
    offset_coords: Vec<f64>,
}

impl AffineFlat {
    pub fn new(subspace: Subspace, offset: Vec<f64>) -> Result<AffineFlat> {
        let n = subspace.ambient_dim();
        if offset.len() != n {
            return Err(Error::DimensionMismatch { expected: n, found: offset.len() });
        }
        let scale = norm(&offset).max(1.0);
        for b in subspace.basis() {
            let d = dot(b, &offset);
            if d.abs() > 1e-12 * scale {
                return Err(Error::InvalidDimension(format!(
                    "flat offset not orthogonal to its direction space (dot = {d:e})"
                )));
            }
        }
        let normal = subspace.complement();
        let offset_coords = normal.coordinates(&offset);
        Ok(AffineFlat { subspace, offset, normal, offset_coords })
    }

    /// The flat through the point with coordinates `coords` in `normal`,
    /// perpendicular to `normal`.
    pub fn from_normal(normal: Subspace, coords: &[f64]) -> Result<AffineFlat> {
        if coords.len() != normal.dim() {
            return Err(Error::DimensionMismatch { expected: normal.dim(), found: coords.len() });
        }
        let offset = normal.embed(coords);
        let subspace = normal.complement();
        Ok(AffineFlat { subspace, offset, normal, offset_coords: coords.to_vec() })
    }

    pub fn subspace(&self) -> &Subspace {
        &self.subspace
    }

    pub fn offset(&self) -> &[f64] {
        &self.offset
    }

    /// Orthonormal basis of the orthogonal complement of the direction space.
    pub fn normal(&self) -> &Subspace {
        &self.normal
    }

    /// Offset expressed in the basis of [`AffineFlat::normal`].
    pub fn offset_coords(&self) -> &[f64] {
        &self.offset_coords
    }

    pub fn ambient_dim(&self) -> usize {
        self.subspace.ambient_dim()
    }

    /// Dimension of the flat itself.
    pub fn dim(&self) -> usize {
        self.subspace.dim()
    }

    /// Codimension k of the flat.
    pub fn codim(&self) -> usize {
        self.normal.dim()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn one_dimensional_line() {
        let s = sample_subspace(1, 1, &mut substream(0, 0)).unwrap();
        assert!((s.basis()[0][0].abs() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sampled_plane_is_orthonormal() {
        for i in 0..200 {
            let s = sample_subspace(3, 2, &mut substream(1, i)).unwrap();
            assert!(s.gram_deviation() < 1e-12);
        }
    }

    /// Rotation invariance implies line angles mod π are uniform; checked
    /// with a Kolmogorov-Smirnov statistic at significance 0.01.
    #[test]
    fn line_angles_are_uniform() {
        let n = 10_000;
        let mut angles: Vec<f64> = (0..n)
            .map(|i| {
                let s = sample_subspace(2, 1, &mut substream(2024, i)).unwrap();
                let b = &s.basis()[0];
                b[1].atan2(b[0]).rem_euclid(std::f64::consts::PI)
            })
            .collect();
        angles.sort_by(f64::total_cmp);
        let d = angles
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let f = a / std::f64::consts::PI;
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(d < 1.628 / (n as f64).sqrt(), "KS statistic {d}");
    }

    #[test]
    fn invalid_dimensions() {
        let mut rng = substream(0, 0);
        assert!(sample_subspace(2, 3, &mut rng).is_err());
        assert!(sample_subspace(0, 1, &mut rng).is_err());
        assert_eq!(sample_subspace(0, 0, &mut rng).unwrap().dim(), 0);
    }

    #[test]
    fn projection_examples() {
        let x = Subspace::axes(2, &[0]).unwrap();
        assert_eq!(project(&[vec![3.0, 4.0]], &x).unwrap(), vec![vec![3.0]]);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let diag = Subspace::new(2, vec![vec![h, h]]).unwrap();
        let p = project(&[vec![1.0, 1.0], vec![0.0, 0.0]], &diag).unwrap();
        assert!((p[0][0] - 2f64.sqrt()).abs() < 1e-12);
        assert_eq!(p[1][0], 0.0);
        assert!(project(&[vec![1.0, 2.0, 3.0]], &diag).is_err());
    }

    #[test]
    fn complement_is_orthogonal() {
        for i in 0..50 {
            let s = sample_subspace(4, 2, &mut substream(3, i)).unwrap();
            let c = s.complement();
            assert_eq!(c.dim(), 2);
            assert!(c.gram_deviation() < 1e-12);
            for a in s.basis() {
                for b in c.basis() {
                    assert!(dot(a, b).abs() < 1e-12);
                }
            }
        }
    }

    #[test]
    fn flat_offset_must_be_orthogonal() {
        let l = Subspace::axes(2, &[0]).unwrap();
        assert!(AffineFlat::new(l.clone(), vec![0.0, 0.3]).is_ok());
        assert!(AffineFlat::new(l, vec![0.1, 0.3]).is_err());
    }

    #[test]
    fn flat_from_normal_round_trips() {
        let w = sample_subspace(3, 1, &mut substream(5, 0)).unwrap();
        let f = AffineFlat::from_normal(w.clone(), &[0.7]).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.codim(), 1);
        assert!((w.coordinates(f.offset())[0] - 0.7).abs() < 1e-12);
    }
}

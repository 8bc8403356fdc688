//! Compactly supported functions on explicit cell complexes: cellwise
//! constant functions on grids and piecewise-linear functions on simplicial
//! sets.

pub mod constructible;
pub mod pl;

pub use constructible::{ConstructibleFunction, LatticeOp};
pub use pl::{Piece, PLFunction};

/// Comparison defining a superlevel or sublevel set {h ⋄ t}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cut {
    Geq,
    Gt,
    Lt,
    Leq,
}

impl Cut {
    pub fn holds(self, value: f64, t: f64) -> bool {
        match self {
            Cut::Geq => value >= t,
            Cut::Gt => value > t,
            Cut::Lt => value < t,
            Cut::Leq => value <= t,
        }
    }

    /// The complementary comparison: {h ⋄ t} and {h ⋄' t} partition R^n.
    pub fn complement(self) -> Cut {
        match self {
            Cut::Geq => Cut::Lt,
            Cut::Gt => Cut::Leq,
            Cut::Lt => Cut::Geq,
            Cut::Leq => Cut::Gt,
        }
    }

    /// The comparison satisfied by -h at -t.
    pub fn negated(self) -> Cut {
        match self {
            Cut::Geq => Cut::Leq,
            Cut::Gt => Cut::Lt,
            Cut::Lt => Cut::Gt,
            Cut::Leq => Cut::Geq,
        }
    }
}

/// Excursion modes at a nonnegative level s: {h ≥ s}, {h > s}, {h < -s},
/// {h ≤ -s}.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExcursionMode {
    Geq,
    Gt,
    LtNeg,
    LeqNeg,
}

impl ExcursionMode {
    /// The cut and raw threshold this mode tests at level `s`.
    pub fn cut(self, s: f64) -> (Cut, f64) {
        match self {
            ExcursionMode::Geq => (Cut::Geq, s),
            ExcursionMode::Gt => (Cut::Gt, s),
            ExcursionMode::LtNeg => (Cut::Lt, -s),
            ExcursionMode::LeqNeg => (Cut::Leq, -s),
        }
    }

    /// True when the mode at level `s` would contain the zero set outside
    /// the support, which an excursion region cannot represent.
    pub fn touches_zero_set(self, s: f64) -> bool {
        let (cut, t) = self.cut(s);
        cut.holds(0.0, t)
    }
}

/// Sorted distinct values, 0 always included.
pub(crate) fn distinct_with_zero(values: impl Iterator<Item = f64>) -> Vec<f64> {
    // adding 0.0 folds -0.0 into 0.0
    let mut v: Vec<f64> = values.chain(std::iter::once(0.0)).map(|x| x + 0.0).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

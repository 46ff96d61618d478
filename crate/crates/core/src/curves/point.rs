//! Points with coordinates in any field-like type.

use std::fmt;

use num_bigint::BigInt;

use super::{CurveError, KElem};

/// Coordinate arithmetic needed by the group law. Implemented exactly for
/// [`KElem`] and approximately for p-adic numbers.
pub trait Coord: Clone + fmt::Debug {
    /// The integer `n` in the same ambient field or precision as `self`.
    fn constant(&self, n: &BigInt) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, CurveError>;
    fn is_zero(&self) -> bool;
    fn compatible(&self, o: &Self) -> Result<(), CurveError>;
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Point<F> {
    Infinity,
    Affine(F, F),
}

/// A point with coordinates in Q or a quadratic field.
pub type PointK = Point<KElem>;

impl<F> Point<F> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn x(&self) -> Option<&F> {
        match self {
            Point::Affine(x, _) => Some(x),
            Point::Infinity => None,
        }
    }

    pub fn y(&self) -> Option<&F> {
        match self {
            Point::Affine(_, y) => Some(y),
            Point::Infinity => None,
        }
    }
}

impl<F: fmt::Display> fmt::Display for Point<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Infinity => f.write_str("O"),
            Point::Affine(x, y) => write!(f, "({x},{y})"),
        }
    }
}

impl Coord for KElem {
    fn constant(&self, n: &BigInt) -> Self {
        KElem::from_bigint(n)
    }

    fn add(&self, o: &Self) -> Self {
        self.try_add(o).expect("coordinates from one field")
    }

    fn sub(&self, o: &Self) -> Self {
        self.try_sub(o).expect("coordinates from one field")
    }

    fn mul(&self, o: &Self) -> Self {
        self.try_mul(o).expect("coordinates from one field")
    }

    fn neg(&self) -> Self {
        KElem::neg(self)
    }

    fn div(&self, o: &Self) -> Result<Self, CurveError> {
        self.try_div(o)
    }

    fn is_zero(&self) -> bool {
        KElem::is_zero(self)
    }

    fn compatible(&self, o: &Self) -> Result<(), CurveError> {
        self.try_add(o).map(|_| ())
    }
}

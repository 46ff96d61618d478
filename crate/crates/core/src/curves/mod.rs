//! Weierstrass curves over Q with a table-supplied conductor and root number.
//!
//! Everything in this module is exact: coordinates live in `Q` or a quadratic
//! field `Q(sqrt D)` and are carried as rationals.

mod count;
mod field;
mod isogeny;
mod point;

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::arith::{self, ArithError};

pub use count::{
    a_ell, count_points, count_points_many, nonsingular_count_by_enumeration, reduction_data,
    ReductionData, ReductionKind,
};
pub use field::{KElem, QuadExt};
pub use isogeny::{
    has_no_rational_cyclic_4_isogeny, is_isomorphic, quadratic_twist, rational_two_torsion,
    two_isogeny, two_torsion_field, TwoIsogeny, TwoTorsionField,
};
pub use point::{Coord, Point, PointK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error("singular Weierstrass model (discriminant zero)")]
    Singular,
    #[error("{0} is not a squarefree integer other than 0 and 1")]
    NotSquarefree(BigInt),
    #[error("points or coordinates from different fields")]
    FieldMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("point is not on the curve")]
    NotOnCurve,
    #[error("prime {0} has bad reduction")]
    BadReduction(u64),
    #[error("model is not minimal at {0}")]
    NonMinimal(u64),
    #[error("conductor unknown; cannot determine reduction type at {0}")]
    UnknownConductor(u64),
    #[error("reduction data at {prime} contradicts the conductor exponent {exponent}")]
    InconsistentConductor { prime: u64, exponent: u32 },
    #[error("expected exactly one rational 2-torsion point, found {0}")]
    TwoTorsionCount(usize),
    #[error("twist parameter {d} is not coprime to 2N")]
    TwistNotCoprime { d: i64 },
    #[error("prime {0} exceeds the naive point counting budget")]
    PrimeTooLarge(u64),
    #[error(transparent)]
    Arith(#[from] ArithError),
}

/// Global root number as a table datum.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RootNumber {
    Plus,
    Minus,
    #[default]
    Unknown,
}

impl RootNumber {
    pub fn from_sign(s: i32) -> Self {
        match s {
            1 => RootNumber::Plus,
            -1 => RootNumber::Minus,
            _ => RootNumber::Unknown,
        }
    }

    pub fn sign(&self) -> Option<i32> {
        match self {
            RootNumber::Plus => Some(1),
            RootNumber::Minus => Some(-1),
            RootNumber::Unknown => None,
        }
    }

    pub fn times(self, s: i32) -> Self {
        match self.sign() {
            Some(w) => RootNumber::from_sign(w * s),
            None => RootNumber::Unknown,
        }
    }
}

impl fmt::Display for RootNumber {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RootNumber::Plus => "+1",
            RootNumber::Minus => "-1",
            RootNumber::Unknown => "?",
        })
    }
}

/// An integral Weierstrass model
/// `y^2 + a1 xy + a3 y = x^3 + a2 x^2 + a4 x + a6`.
///
/// The conductor and root number are never computed here; they are data.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CurveQ {
    a: [BigInt; 5],
    conductor: Option<u64>,
    root_number: RootNumber,
    label: Option<String>,
    minimal_at_2: bool,
}

impl CurveQ {
    /// Builds a curve from `[a1, a2, a3, a4, a6]`, rejecting singular models.
    pub fn new(a: [BigInt; 5]) -> Result<Self, CurveError> {
        let c = CurveQ {
            a,
            conductor: None,
            root_number: RootNumber::Unknown,
            label: None,
            minimal_at_2: false,
        };
        if c.discriminant().is_zero() {
            return Err(CurveError::Singular);
        }
        Ok(c)
    }

    pub fn from_ints(a: [i64; 5]) -> Result<Self, CurveError> {
        Self::new(a.map(BigInt::from))
    }

    pub fn with_conductor(mut self, n: u64) -> Self {
        self.conductor = Some(n);
        self
    }

    pub fn with_root_number(mut self, w: RootNumber) -> Self {
        self.root_number = w;
        self
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }

    pub fn with_minimal_at_2(mut self, flag: bool) -> Self {
        self.minimal_at_2 = flag;
        self
    }

    pub fn a1(&self) -> &BigInt {
        &self.a[0]
    }
    pub fn a2(&self) -> &BigInt {
        &self.a[1]
    }
    pub fn a3(&self) -> &BigInt {
        &self.a[2]
    }
    pub fn a4(&self) -> &BigInt {
        &self.a[3]
    }
    pub fn a6(&self) -> &BigInt {
        &self.a[4]
    }

    pub fn coefficients(&self) -> &[BigInt; 5] {
        &self.a
    }

    pub fn conductor(&self) -> Option<u64> {
        self.conductor
    }

    pub fn root_number(&self) -> RootNumber {
        self.root_number
    }

    pub fn label(&self) -> Option<&str> {
        self.label.as_deref()
    }

    pub fn display_label(&self) -> String {
        self.label.clone().unwrap_or_else(|| {
            let [a1, a2, a3, a4, a6] = &self.a;
            format!("[{a1},{a2},{a3},{a4},{a6}]")
        })
    }

    pub fn minimal_at_2_flag(&self) -> bool {
        self.minimal_at_2
    }

    pub fn b2(&self) -> BigInt {
        self.a1() * self.a1() + 4 * self.a2()
    }

    pub fn b4(&self) -> BigInt {
        2 * self.a4() + self.a1() * self.a3()
    }

    pub fn b6(&self) -> BigInt {
        self.a3() * self.a3() + 4 * self.a6()
    }

    pub fn b8(&self) -> BigInt {
        let [a1, a2, a3, a4, a6] = &self.a;
        a1 * a1 * a6 + 4 * a2 * a6 - a1 * a3 * a4 + a2 * a3 * a3 - a4 * a4
    }

    pub fn c4(&self) -> BigInt {
        let b2 = self.b2();
        &b2 * &b2 - 24 * self.b4()
    }

    pub fn c6(&self) -> BigInt {
        let b2 = self.b2();
        -(&b2 * &b2 * &b2) + 36 * &b2 * self.b4() - 216 * self.b6()
    }

    pub fn discriminant(&self) -> BigInt {
        let (b2, b4, b6, b8) = (self.b2(), self.b4(), self.b6(), self.b8());
        -(&b2 * &b2 * &b8) - 8 * &b4 * &b4 * &b4 - 27 * &b6 * &b6 + 9 * &b2 * &b4 * &b6
    }

    pub fn j_invariant(&self) -> BigRational {
        let c4 = self.c4();
        BigRational::new(&c4 * &c4 * &c4, self.discriminant())
    }

    /// Exponent of `p` in the conductor, if the conductor is known.
    pub fn conductor_exponent(&self, p: u64) -> Option<u32> {
        self.conductor
            .map(|n| arith::valuation(&BigInt::from(n), p))
    }

    /// Minimality screen at `p`. For `p >= 5` this is exact; at 2 and 3 a
    /// failed screen is overridden by the `minimal_at_2` input flag.
    pub fn check_minimal_at(&self, p: u64) -> Result<(), CurveError> {
        let disc = self.discriminant();
        let c4 = self.c4();
        let vd = arith::valuation(&disc, p);
        let vc4 = if c4.is_zero() { u32::MAX } else { arith::valuation(&c4, p) };
        let screen = vd < 12 || vc4 < 4;
        match p {
            2 | 3 if !screen && !self.minimal_at_2 => Err(CurveError::NonMinimal(p)),
            _ if p >= 5 && !screen => Err(CurveError::NonMinimal(p)),
            _ => Ok(()),
        }
    }

    /// Evaluates the Weierstrass polynomial `F(x, y)` (zero on the curve).
    pub fn equation<F: Coord>(&self, x: &F, y: &F) -> F {
        let [a1, a2, a3, a4, a6] = &self.a;
        let c = |n: &BigInt| x.constant(n);
        let lhs = y.mul(y).add(&c(a1).mul(x).mul(y)).add(&c(a3).mul(y));
        let x2 = x.mul(x);
        let rhs = x2
            .mul(x)
            .add(&c(a2).mul(&x2))
            .add(&c(a4).mul(x))
            .add(&c(a6));
        lhs.sub(&rhs)
    }

    pub fn contains<F: Coord>(&self, p: &Point<F>) -> bool {
        match p {
            Point::Infinity => true,
            Point::Affine(x, y) => self.equation(x, y).is_zero(),
        }
    }

    pub fn neg<F: Coord>(&self, p: &Point<F>) -> Point<F> {
        match p {
            Point::Infinity => Point::Infinity,
            Point::Affine(x, y) => {
                let t = x.constant(self.a1()).mul(x).add(&x.constant(self.a3()));
                Point::Affine(x.clone(), y.neg().sub(&t))
            }
        }
    }

    /// Chord-and-tangent addition.
    pub fn add<F: Coord>(&self, p: &Point<F>, q: &Point<F>) -> Result<Point<F>, CurveError> {
        let (x1, y1, x2, y2) = match (p, q) {
            (Point::Infinity, _) => return Ok(q.clone()),
            (_, Point::Infinity) => return Ok(p.clone()),
            (Point::Affine(x1, y1), Point::Affine(x2, y2)) => (x1, y1, x2, y2),
        };
        x1.compatible(x2)?;
        let [a1, a2, a3, a4, a6] = &self.a;
        let c = |n: &BigInt| x1.constant(n);
        let (lambda, nu) = if x1.sub(x2).is_zero() {
            let denom = y1.add(y1).add(&c(a1).mul(x1)).add(&c(a3));
            if denom.is_zero() || y1.add(y2).add(&c(a1).mul(x2)).add(&c(a3)).is_zero() {
                return Ok(Point::Infinity);
            }
            let x1sq = x1.mul(x1);
            let num = c(&BigInt::from(3))
                .mul(&x1sq)
                .add(&c(&(2 * a2)).mul(x1))
                .add(&c(a4))
                .sub(&c(a1).mul(y1));
            let nnum = x1sq
                .mul(x1)
                .neg()
                .add(&c(a4).mul(x1))
                .add(&c(&(2 * a6)))
                .sub(&c(a3).mul(y1));
            (num.div(&denom)?, nnum.div(&denom)?)
        } else {
            let dx = x2.sub(x1);
            (
                y2.sub(y1).div(&dx)?,
                y1.mul(x2).sub(&y2.mul(x1)).div(&dx)?,
            )
        };
        let x3 = lambda
            .mul(&lambda)
            .add(&c(a1).mul(&lambda))
            .sub(&c(a2))
            .sub(x1)
            .sub(x2);
        let y3 = lambda.add(&c(a1)).mul(&x3).neg().sub(&nu).sub(&c(a3));
        Ok(Point::Affine(x3, y3))
    }

    /// `n * P` by double-and-add; negative `n` negates first.
    pub fn scalar_mul<F: Coord>(&self, p: &Point<F>, n: i64) -> Result<Point<F>, CurveError> {
        let mut base = if n < 0 { self.neg(p) } else { p.clone() };
        let mut k = n.unsigned_abs();
        let mut acc = Point::Infinity;
        while k > 0 {
            if k & 1 == 1 {
                acc = self.add(&acc, &base)?;
            }
            k >>= 1;
            if k > 0 {
                base = self.add(&base, &base)?;
            }
        }
        Ok(acc)
    }

    /// An affine point over Q or `Q(sqrt D)`, checked against the equation.
    pub fn point(&self, x: KElem, y: KElem) -> Result<PointK, CurveError> {
        x.compatible(&y)?;
        let p = Point::Affine(x, y);
        if self.contains(&p) {
            Ok(p)
        } else {
            Err(CurveError::NotOnCurve)
        }
    }
}

impl fmt::Display for CurveQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let [a1, a2, a3, a4, a6] = &self.a;
        write!(f, "{} [{a1},{a2},{a3},{a4},{a6}]", self.display_label())
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    pub(crate) fn e256b1() -> CurveQ {
        CurveQ::from_ints([0, 0, 0, -2, 0])
            .unwrap()
            .with_conductor(256)
            .with_root_number(RootNumber::Minus)
            .with_label("256b1")
            .with_minimal_at_2(true)
    }

    pub(crate) fn e256a1() -> CurveQ {
        CurveQ::from_ints([0, 1, 0, -3, 1])
            .unwrap()
            .with_conductor(256)
            .with_root_number(RootNumber::Minus)
            .with_label("256a1")
            .with_minimal_at_2(true)
    }

    #[test]
    fn invariants_of_example_curves() {
        let e = e256b1();
        assert_eq!(e.discriminant(), BigInt::from(512));
        assert_eq!(
            arith::squarefree_kernel(&e.discriminant()).unwrap(),
            BigInt::from(2)
        );
        assert_eq!(e.j_invariant(), BigRational::from_integer(1728.into()));
        assert_eq!(e256a1().j_invariant(), BigRational::from_integer(8000.into()));
        // the discriminant formula for y^2 = x^3 + a4 x + a6
        let (a4, a6) = (BigInt::from(-2), BigInt::zero());
        let direct = -16 * (4 * &a4 * &a4 * &a4 + 27 * &a6 * &a6);
        assert_eq!(direct, e.discriminant());
    }

    #[test]
    fn c4_c6_delta_identity() {
        for a in [[0, 0, 0, -2, 0], [0, 1, 0, -3, 1], [1, -1, 0, -2, -1], [0, 0, 1, -1, 0], [1, 1, 1, -10, -10]] {
            let e = CurveQ::from_ints(a).unwrap();
            let (c4, c6) = (e.c4(), e.c6());
            assert_eq!(&c4 * &c4 * &c4 - &c6 * &c6, 1728 * e.discriminant());
        }
        assert_eq!(CurveQ::from_ints([0, 0, 0, 0, 0]), Err(CurveError::Singular));
    }

    #[test]
    fn group_law_basics() {
        let e = e256b1();
        let t = e.point(KElem::from_int(0), KElem::from_int(0)).unwrap();
        assert_eq!(e.scalar_mul(&t, 2).unwrap(), Point::Infinity);
        assert_eq!(e.scalar_mul(&Point::<KElem>::Infinity, 7).unwrap(), Point::Infinity);
        let k = QuadExt::new(-7).unwrap();
        let p = e
            .point(
                KElem::from_int(-1).in_field(k).unwrap(),
                KElem::from_int(-1).in_field(k).unwrap(),
            )
            .unwrap();
        for n in -6..=6 {
            let q = e.scalar_mul(&p, n).unwrap();
            assert!(e.contains(&q));
        }
        let three = e.scalar_mul(&p, 3).unwrap();
        let sum = e.add(&e.add(&p, &p).unwrap(), &p).unwrap();
        assert_eq!(three, sum);
        assert_eq!(e.add(&p, &e.neg(&p)).unwrap(), Point::Infinity);
        let other = KElem::generator(QuadExt::new(2).unwrap());
        let bad = Point::Affine(other.clone(), other);
        assert_eq!(e.add(&p, &bad), Err(CurveError::FieldMismatch));
        assert!(e.point(KElem::from_int(1), KElem::from_int(1)).is_err());
    }
}

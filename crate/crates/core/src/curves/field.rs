//! Quadratic fields `Q(sqrt D)` and exact elements `a + b sqrt D`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::CurveError;
use crate::arith;

/// The quadratic field `Q(sqrt D)` for a squarefree `D` other than 0 and 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct QuadExt {
    d: i64,
}

impl QuadExt {
    pub fn new(d: i64) -> Result<Self, CurveError> {
        if d == 0 || d == 1 || !arith::is_squarefree(&BigInt::from(d)).unwrap_or(false) {
            return Err(CurveError::NotSquarefree(BigInt::from(d)));
        }
        Ok(QuadExt { d })
    }

    /// Field generated by the square root of any nonzero non-square integer.
    pub fn from_radicand(n: &BigInt) -> Result<Self, CurveError> {
        let k = arith::squarefree_kernel(n)?;
        let d: i64 = k
            .try_into()
            .map_err(|_| CurveError::NotSquarefree(n.clone()))?;
        Self::new(d)
    }

    /// The squarefree radicand `D`.
    pub fn radicand(&self) -> i64 {
        self.d
    }

    /// Field discriminant: `D` when `D ≡ 1 (mod 4)`, else `4D`.
    pub fn discriminant(&self) -> i64 {
        if self.d.rem_euclid(4) == 1 {
            self.d
        } else {
            4 * self.d
        }
    }

    pub fn is_imaginary(&self) -> bool {
        self.d < 0
    }

    /// Kronecker symbol of the discriminant at `p`: +1 split, -1 inert, 0 ramified.
    pub fn splitting(&self, p: u64) -> i32 {
        arith::kronecker(self.discriminant(), p as i64)
    }

    pub fn splits(&self, p: u64) -> bool {
        self.splitting(p) == 1
    }
}

impl fmt::Display for QuadExt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Q(sqrt({}))", self.d)
    }
}

/// `a + b sqrt(D)`. A radicand of 1 marks a plain rational (with `b = 0`)
/// that may be combined with elements of any field.
#[derive(Debug, Clone)]
pub struct KElem {
    pub a: BigRational,
    pub b: BigRational,
    d: i64,
}

impl PartialEq for KElem {
    fn eq(&self, other: &Self) -> bool {
        self.a == other.a && self.b == other.b && (self.d == other.d || self.b.is_zero())
    }
}

impl Eq for KElem {}

fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn rational_sqrt(q: &BigRational) -> Option<BigRational> {
    if q.is_negative() {
        return None;
    }
    let (n, d) = (q.numer().sqrt(), q.denom().sqrt());
    (&n * &n == *q.numer() && &d * &d == *q.denom()).then(|| BigRational::new(n, d))
}

impl KElem {
    pub fn new(a: BigRational, b: BigRational, field: QuadExt) -> Self {
        KElem { a, b, d: field.d }
    }

    pub fn rational(a: BigRational) -> Self {
        KElem {
            a,
            b: BigRational::zero(),
            d: 1,
        }
    }

    pub fn from_int(n: i64) -> Self {
        Self::rational(rat(n))
    }

    pub fn from_bigint(n: &BigInt) -> Self {
        Self::rational(BigRational::from_integer(n.clone()))
    }

    /// `sqrt(D)` itself.
    pub fn generator(field: QuadExt) -> Self {
        KElem {
            a: BigRational::zero(),
            b: BigRational::one(),
            d: field.d,
        }
    }

    pub fn field(&self) -> Option<QuadExt> {
        (self.d != 1).then_some(QuadExt { d: self.d })
    }

    pub fn radicand(&self) -> i64 {
        self.d
    }

    pub fn is_rational(&self) -> bool {
        self.b.is_zero()
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        self.is_rational().then_some(&self.a)
    }

    pub fn is_zero(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// Moves an element into `field`; fails when it already lives in another.
    pub fn in_field(&self, field: QuadExt) -> Result<Self, CurveError> {
        if self.d == field.d || self.is_rational() {
            Ok(KElem {
                a: self.a.clone(),
                b: self.b.clone(),
                d: field.d,
            })
        } else {
            Err(CurveError::FieldMismatch)
        }
    }

    fn common(&self, other: &Self) -> Result<i64, CurveError> {
        match (self.d, other.d) {
            (x, y) if x == y => Ok(x),
            (1, y) if self.b.is_zero() => Ok(y),
            (x, 1) if other.b.is_zero() => Ok(x),
            _ => Err(CurveError::FieldMismatch),
        }
    }

    pub fn try_add(&self, o: &Self) -> Result<Self, CurveError> {
        let d = self.common(o)?;
        Ok(KElem {
            a: &self.a + &o.a,
            b: &self.b + &o.b,
            d,
        })
    }

    pub fn try_sub(&self, o: &Self) -> Result<Self, CurveError> {
        let d = self.common(o)?;
        Ok(KElem {
            a: &self.a - &o.a,
            b: &self.b - &o.b,
            d,
        })
    }

    pub fn try_mul(&self, o: &Self) -> Result<Self, CurveError> {
        let d = self.common(o)?;
        let dd = rat(d);
        Ok(KElem {
            a: &self.a * &o.a + &self.b * &o.b * dd,
            b: &self.a * &o.b + &self.b * &o.a,
            d,
        })
    }

    pub fn norm(&self) -> BigRational {
        &self.a * &self.a - &self.b * &self.b * rat(self.d)
    }

    pub fn conjugate(&self) -> Self {
        KElem {
            a: self.a.clone(),
            b: -&self.b,
            d: self.d,
        }
    }

    pub fn inv(&self) -> Option<Self> {
        if self.is_zero() {
            return None;
        }
        let n = self.norm();
        Some(KElem {
            a: &self.a / &n,
            b: -&self.b / &n,
            d: self.d,
        })
    }

    pub fn try_div(&self, o: &Self) -> Result<Self, CurveError> {
        let inv = o.inv().ok_or(CurveError::DivisionByZero)?;
        self.try_mul(&inv)
    }

    pub fn neg(&self) -> Self {
        KElem {
            a: -&self.a,
            b: -&self.b,
            d: self.d,
        }
    }

    /// A square root inside `field`, if one exists.
    pub fn sqrt_in(&self, field: QuadExt) -> Option<Self> {
        if self.d != 1 && self.d != field.d && !self.b.is_zero() {
            return None;
        }
        if self.b.is_zero() {
            if let Some(r) = rational_sqrt(&self.a) {
                return Some(KElem::rational(r));
            }
            let c = rational_sqrt(&(&self.a / rat(field.d)))?;
            return Some(KElem::new(BigRational::zero(), c, field));
        }
        // (u + v sqrt D)^2 = a + b sqrt D forces u^2 = (a +- sqrt(norm)) / 2
        let n = rational_sqrt(&self.norm())?;
        let two = rat(2);
        [&self.a + &n, &self.a - &n].into_iter().find_map(|u2| {
            let u = rational_sqrt(&(u2 / &two))?;
            if u.is_zero() {
                return None;
            }
            let v = &self.b / (&two * &u);
            Some(KElem::new(u, v, field))
        })
    }

    /// Largest numerator or denominator bit length; a crude height.
    pub fn bits(&self) -> u64 {
        [&self.a, &self.b]
            .iter()
            .flat_map(|q| [q.numer().bits(), q.denom().bits()])
            .max()
            .unwrap_or(0)
    }
}

impl fmt::Display for KElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.b.is_zero() {
            write!(f, "{}", self.a)
        } else if self.a.is_zero() {
            write!(f, "{}*w", self.b)
        } else if self.b.is_negative() {
            write!(f, "{}-{}*w", self.a, -&self.b)
        } else {
            write!(f, "{}+{}*w", self.a, self.b)
        }
    }
}

//! Fixed-precision p-adic numbers with tracked valuation and precision,
//! Hensel square roots, and embeddings of quadratic-field elements into
//! `Q_p` at split primes.
//!
//! A nonzero value is `p^v * u + O(p^(v + k))` with `u` a unit known modulo
//! `p^k`. Zero comes in two flavours: the exact zero, and `O(p^a)`, a value
//! whose digits below `p^a` all vanish but about which nothing more is known.
//! Arithmetic never claims more digits than its inputs support.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::arith;
use crate::curves::{Coord, CurveError, KElem};

/// Default relative precision for 2-adic work.
pub const DEFAULT_PRECISION: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PadicError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("precision underflow: result known to no digits")]
    PrecisionUnderflow,
    #[error("{0} is not a square in Q_{1}")]
    NotASquare(String, u64),
    #[error("{p} does not split in Q(sqrt({d})): no embedding into Q_{p}")]
    NotSplit { d: i64, p: u64 },
    #[error("mixed primes {0} and {1}")]
    PrimeMismatch(u64, u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Repr {
    ExactZero,
    /// `O(p^abs)`.
    Approx { abs: i64 },
    Unit { val: i64, unit: BigInt, prec: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Padic {
    p: u64,
    repr: Repr,
}

fn ppow(p: u64, k: u32) -> BigInt {
    BigInt::from(p).pow(k)
}

/// Splits `n != 0` as `p^v * m` with `p ∤ m`.
fn split_off(n: &BigInt, p: u64) -> (i64, BigInt) {
    let v = arith::valuation(n, p);
    (v as i64, n / ppow(p, v))
}

impl Padic {
    pub fn zero(p: u64) -> Self {
        Padic {
            p,
            repr: Repr::ExactZero,
        }
    }

    /// `O(p^abs)`.
    pub fn approx_zero(p: u64, abs: i64) -> Self {
        Padic {
            p,
            repr: Repr::Approx { abs },
        }
    }

    fn from_parts(p: u64, val: i64, unit: BigInt, prec: u32) -> Self {
        if prec == 0 {
            return Self::approx_zero(p, val);
        }
        let unit = unit.mod_floor(&ppow(p, prec));
        debug_assert!(!(&unit % p).is_zero());
        Padic {
            p,
            repr: Repr::Unit { val, unit, prec },
        }
    }

    /// Normalizes `p^v * m + O(p^abs)` for an arbitrary integer `m`.
    fn normalize(p: u64, v: i64, m: BigInt, abs: i64) -> Self {
        if abs <= v {
            return Self::approx_zero(p, abs);
        }
        let m = m.mod_floor(&ppow(p, (abs - v) as u32));
        if m.is_zero() {
            return Self::approx_zero(p, abs);
        }
        let (w, u) = split_off(&m, p);
        let val = v + w;
        Self::from_parts(p, val, u, (abs - val) as u32)
    }

    /// A rational number to `prec` significant digits.
    pub fn from_rational(q: &BigRational, p: u64, prec: u32) -> Self {
        if q.is_zero() {
            return Self::zero(p);
        }
        let (vn, un) = split_off(q.numer(), p);
        let (vd, ud) = split_off(q.denom(), p);
        let modulus = ppow(p, prec);
        let inv = ud
            .mod_floor(&modulus)
            .extended_gcd(&modulus)
            .x;
        Self::from_parts(p, vn - vd, un * inv, prec)
    }

    pub fn from_int(n: &BigInt, p: u64, prec: u32) -> Self {
        Self::from_rational(&BigRational::from_integer(n.clone()), p, prec)
    }

    /// An integer known to at least absolute precision `abs`.
    pub fn integer_to_abs(n: &BigInt, p: u64, abs: i64) -> Self {
        if n.is_zero() {
            return Self::zero(p);
        }
        let v = arith::valuation(n, p) as i64;
        let prec = (abs - v).max(1) as u32;
        Self::from_int(n, p, prec)
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn is_exact_zero(&self) -> bool {
        matches!(self.repr, Repr::ExactZero)
    }

    /// True for the exact zero and for `O(p^a)`.
    pub fn is_zero(&self) -> bool {
        !matches!(self.repr, Repr::Unit { .. })
    }

    /// Valuation of a nonzero value; `None` for either kind of zero.
    pub fn valuation(&self) -> Option<i64> {
        match self.repr {
            Repr::Unit { val, .. } => Some(val),
            _ => None,
        }
    }

    /// Lower bound on the valuation: exact for nonzero values, `a` for
    /// `O(p^a)`, `i64::MAX` for the exact zero.
    pub fn valuation_lower_bound(&self) -> i64 {
        match self.repr {
            Repr::ExactZero => i64::MAX,
            Repr::Approx { abs } => abs,
            Repr::Unit { val, .. } => val,
        }
    }

    /// Relative precision (significant digits); zero for zeros.
    pub fn relative_precision(&self) -> u32 {
        match self.repr {
            Repr::Unit { prec, .. } => prec,
            _ => 0,
        }
    }

    /// The value is known modulo `p^abs_precision`.
    pub fn abs_precision(&self) -> i64 {
        match self.repr {
            Repr::ExactZero => i64::MAX,
            Repr::Approx { abs } => abs,
            Repr::Unit { val, prec, .. } => val + prec as i64,
        }
    }

    pub fn unit(&self) -> Option<&BigInt> {
        match &self.repr {
            Repr::Unit { unit, .. } => Some(unit),
            _ => None,
        }
    }

    fn check_prime(&self, o: &Self) -> Result<(), PadicError> {
        if self.p == o.p {
            Ok(())
        } else {
            Err(PadicError::PrimeMismatch(self.p, o.p))
        }
    }

    /// `p^val * unit` as an integer scaled to valuation `v <= val`.
    fn digits_at(&self, v: i64) -> BigInt {
        match &self.repr {
            Repr::Unit { val, unit, .. } => unit * ppow(self.p, (val - v) as u32),
            _ => BigInt::zero(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "p-adic prime mismatch");
        match (&self.repr, &o.repr) {
            (Repr::ExactZero, _) => return o.clone(),
            (_, Repr::ExactZero) => return self.clone(),
            _ => {}
        }
        let abs = self.abs_precision().min(o.abs_precision());
        let v = self
            .valuation_lower_bound()
            .min(o.valuation_lower_bound())
            .min(abs);
        let m = self.digits_at(v) + o.digits_at(v);
        Self::normalize(self.p, v, m, abs)
    }

    pub fn neg(&self) -> Self {
        match &self.repr {
            Repr::Unit { val, unit, prec } => Self::from_parts(self.p, *val, -unit, *prec),
            _ => self.clone(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.neg())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.p, o.p, "p-adic prime mismatch");
        match (&self.repr, &o.repr) {
            (Repr::ExactZero, _) | (_, Repr::ExactZero) => Self::zero(self.p),
            (
                Repr::Unit {
                    val: va,
                    unit: ua,
                    prec: pa,
                },
                Repr::Unit {
                    val: vb,
                    unit: ub,
                    prec: pb,
                },
            ) => Self::from_parts(self.p, va + vb, ua * ub, *pa.min(pb)),
            _ => Self::approx_zero(
                self.p,
                self.valuation_lower_bound()
                    .saturating_add(o.valuation_lower_bound()),
            ),
        }
    }

    pub fn div(&self, o: &Self) -> Result<Self, PadicError> {
        self.check_prime(o)?;
        let (vb, ub, pb) = match &o.repr {
            Repr::ExactZero => return Err(PadicError::DivisionByZero),
            Repr::Approx { .. } => return Err(PadicError::PrecisionUnderflow),
            Repr::Unit { val, unit, prec } => (*val, unit, *prec),
        };
        Ok(match &self.repr {
            Repr::ExactZero => Self::zero(self.p),
            Repr::Approx { abs } => Self::approx_zero(self.p, abs - vb),
            Repr::Unit { val, unit, prec } => {
                let prec = (*prec).min(pb);
                let modulus = ppow(self.p, prec);
                let inv = ub.mod_floor(&modulus).extended_gcd(&modulus).x;
                Self::from_parts(self.p, val - vb, unit * inv, prec)
            }
        })
    }

    pub fn pow(&self, mut n: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::from_int(&BigInt::one(), self.p, self.relative_precision().max(1));
        if self.is_exact_zero() {
            return if n == 0 { acc } else { Self::zero(self.p) };
        }
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            n >>= 1;
        }
        acc
    }

    /// Multiplies by `p^k` exactly.
    pub fn shift(&self, k: i64) -> Self {
        match &self.repr {
            Repr::ExactZero => self.clone(),
            Repr::Approx { abs } => Self::approx_zero(self.p, abs + k),
            Repr::Unit { val, unit, prec } => Self::from_parts(self.p, val + k, unit.clone(), *prec),
        }
    }

    /// Drops digits beyond absolute precision `abs`.
    pub fn truncate_abs(&self, abs: i64) -> Self {
        if abs >= self.abs_precision() {
            return self.clone();
        }
        match &self.repr {
            Repr::Unit { val, unit, .. } => Self::normalize(self.p, *val, unit.clone(), abs),
            _ => Self::approx_zero(self.p, abs),
        }
    }

    /// The residue in `[0, p^m)` of an integral value known modulo `p^m`.
    pub fn residue(&self, m: u32) -> Result<BigInt, PadicError> {
        if self.abs_precision() < m as i64 {
            return Err(PadicError::PrecisionUnderflow);
        }
        match &self.repr {
            Repr::Unit { val, .. } if *val < 0 => Err(PadicError::PrecisionUnderflow),
            Repr::Unit { .. } => Ok(self.digits_at(0).mod_floor(&ppow(self.p, m))),
            _ => Ok(BigInt::zero()),
        }
    }

    /// True iff `self ≡ o (mod p^m)` is decided by the available digits.
    pub fn congruent(&self, o: &Self, m: i64) -> Option<bool> {
        let diff = self.sub(o);
        if diff.abs_precision() >= m {
            Some(diff.valuation_lower_bound() >= m)
        } else if let Some(v) = diff.valuation() {
            (v < m).then_some(false)
        } else {
            None
        }
    }

    /// Square root with a canonical choice of sign: unit part `≡ 1 (mod 4)`
    /// for `p = 2`, least positive residue mod `p` otherwise.
    pub fn sqrt(&self) -> Result<Self, PadicError> {
        let p = self.p;
        let (val, unit, prec) = match &self.repr {
            Repr::ExactZero => return Ok(self.clone()),
            Repr::Approx { abs } => return Ok(Self::approx_zero(p, abs.div_euclid(2))),
            Repr::Unit { val, unit, prec } => (*val, unit, *prec),
        };
        if val % 2 != 0 {
            return Err(PadicError::NotASquare(self.to_string(), p));
        }
        if p == 2 {
            if prec < 3 {
                return Err(PadicError::PrecisionUnderflow);
            }
            if unit.mod_floor(&BigInt::from(8)) != BigInt::one() {
                return Err(PadicError::NotASquare(self.to_string(), p));
            }
            // r^2 ≡ u (mod 2^j) lifts to mod 2^(j+1) by adding 2^(j-1) when needed
            let mut r = BigInt::one();
            for j in 3..prec {
                let m = ppow(2, j + 1);
                if (&r * &r - unit).mod_floor(&m) != BigInt::zero() {
                    r += ppow(2, j - 1);
                }
            }
            return Ok(Self::from_parts(p, val / 2, r, prec - 1));
        }
        let u0 = arith::bigint_mod_u64(unit, p);
        let r0 = arith::sqrt_mod_prime(u0, p)
            .ok_or_else(|| PadicError::NotASquare(self.to_string(), p))?;
        let r0 = r0.min(p - r0);
        let mut r = BigInt::from(r0);
        let mut k = 1u32;
        while k < prec {
            k = (2 * k).min(prec);
            let m = ppow(p, k);
            let two_r: BigInt = &r * 2u32;
            let inv = two_r.mod_floor(&m).extended_gcd(&m).x;
            r = (&r - (&r * &r - unit) * inv).mod_floor(&m);
        }
        Ok(Self::from_parts(p, val / 2, r, prec))
    }

    /// Rational value of the stored digits (for display and tests).
    pub fn to_rational(&self) -> BigRational {
        match &self.repr {
            Repr::Unit { val, unit, .. } => {
                let u = BigRational::from_integer(unit.clone());
                let pk = BigRational::from_integer(ppow(self.p, val.unsigned_abs() as u32));
                if *val >= 0 {
                    u * pk
                } else {
                    u / pk
                }
            }
            _ => BigRational::zero(),
        }
    }
}

impl fmt::Display for Padic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.repr {
            Repr::ExactZero => write!(f, "0"),
            Repr::Approx { abs } => write!(f, "O({}^{})", self.p, abs),
            Repr::Unit { val, unit, .. } => {
                write!(f, "{}*{}^{} + O({}^{})", unit, self.p, val, self.p, self.abs_precision())
            }
        }
    }
}

impl Coord for Padic {
    fn constant(&self, n: &BigInt) -> Self {
        let abs = match self.abs_precision() {
            i64::MAX => 64,
            a => a.max(1),
        };
        Padic::integer_to_abs(n, self.p, abs + 8)
    }

    fn add(&self, o: &Self) -> Self {
        Padic::add(self, o)
    }

    fn sub(&self, o: &Self) -> Self {
        Padic::sub(self, o)
    }

    fn mul(&self, o: &Self) -> Self {
        Padic::mul(self, o)
    }

    fn neg(&self) -> Self {
        Padic::neg(self)
    }

    fn div(&self, o: &Self) -> Result<Self, CurveError> {
        Padic::div(self, o).map_err(|_| CurveError::DivisionByZero)
    }

    fn is_zero(&self) -> bool {
        Padic::is_zero(self)
    }

    fn compatible(&self, o: &Self) -> Result<(), CurveError> {
        self.check_prime(o).map_err(|_| CurveError::FieldMismatch)
    }
}

/// Hensel square root (see [`Padic::sqrt`]).
pub fn hensel_sqrt(a: &Padic) -> Result<Padic, PadicError> {
    a.sqrt()
}

/// `sqrt(D)` in `Q_p` to `prec` digits, when `p` splits in `Q(sqrt D)`.
pub fn sqrt_radicand(d: i64, p: u64, prec: u32) -> Result<Padic, PadicError> {
    let split = if p == 2 {
        d.rem_euclid(8) == 1
    } else {
        arith::kronecker(d, p as i64) == 1
    };
    if !split {
        return Err(PadicError::NotSplit { d, p });
    }
    // one guard digit: the 2-adic root loses a digit
    Padic::from_int(&BigInt::from(d), p, prec + 1).sqrt()
}

/// Embeds `a + b sqrt(D)` into `Q_p` via the canonical square root of `D`.
pub fn embed(x: &KElem, p: u64, prec: u32) -> Result<Padic, PadicError> {
    let a = Padic::from_rational(&x.a, p, prec);
    if x.b.is_zero() {
        return Ok(a);
    }
    let s = sqrt_radicand(x.radicand(), p, prec)?;
    let b = Padic::from_rational(&x.b, p, prec);
    Ok(a.add(&b.mul(&s)))
}

/// The other embedding: `sqrt(D) -> -sqrt(D)`.
pub fn embed_conjugate(x: &KElem, p: u64, prec: u32) -> Result<Padic, PadicError> {
    embed(&x.conjugate(), p, prec)
}

/// Convenience for tests and reports: the 2-adic valuation of a rational.
pub fn rational_valuation(q: &BigRational, p: u64) -> Option<i64> {
    if q.is_zero() {
        return None;
    }
    Some(arith::valuation(q.numer(), p) as i64 - arith::valuation(q.denom(), p) as i64)
}

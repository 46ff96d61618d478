//! Point counts over prime fields and local reduction data.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;

use super::{CurveError, CurveQ};
use crate::arith::{self, bigint_mod_u64};

/// Largest prime accepted by the naive counter.
pub const MAX_COUNT_PRIME: u64 = 10_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ReductionKind {
    Good,
    SplitMultiplicative,
    NonsplitMultiplicative,
    Additive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ReductionData {
    pub prime: u64,
    pub kind: ReductionKind,
    /// `|E~ns(F_l)|`.
    pub nonsingular_count: u64,
    pub a_ell: i64,
}

/// Reduced 2-division cubic `g(x) = 4x^3 + b2 x^2 + 2 b4 x + b6 (mod p)`,
/// so that the curve is `(2y + a1 x + a3)^2 = g(x)` for odd `p`.
struct DivisionCubic {
    p: u64,
    c: [u64; 4],
}

impl DivisionCubic {
    fn new(e: &CurveQ, p: u64) -> Self {
        let m = |n: BigInt| bigint_mod_u64(&n, p);
        DivisionCubic {
            p,
            c: [m(e.b6()), m(2 * e.b4()), m(e.b2()), 4 % p],
        }
    }

    #[inline]
    fn eval(&self, x: u64) -> u64 {
        let p = self.p;
        let [c0, c1, c2, c3] = self.c;
        ((((c3 * x + c2) % p) * x + c1) % p * x + c0) % p
    }

    #[inline]
    fn derivative(&self, x: u64) -> u64 {
        let p = self.p;
        let [_, c1, c2, c3] = self.c;
        ((3 * c3 % p * x % p + 2 * c2) % p * x + c1) % p
    }
}

/// Quadratic character table of `F_p`: entry is -1, 0 or 1.
fn character_table(p: u64) -> Vec<i8> {
    let mut t = vec![-1i8; p as usize];
    t[0] = 0;
    for x in 1..=(p / 2) {
        t[(x * x % p) as usize] = 1;
    }
    t
}

/// Number of affine solutions of `y'^2 = g(x)` over `F_p`, `p` odd.
fn affine_count_odd(g: &DivisionCubic) -> u64 {
    let chi = character_table(g.p);
    let mut total: i64 = 0;
    for x in 0..g.p {
        total += 1 + chi[g.eval(x) as usize] as i64;
    }
    total as u64
}

fn reduced_coefficients(e: &CurveQ, p: u64) -> [u64; 5] {
    let a = e.coefficients();
    [0, 1, 2, 3, 4].map(|i| bigint_mod_u64(&a[i], p))
}

/// `(nonsingular affine points, singular affine points)` over F_2.
fn enumerate_mod_2(e: &CurveQ) -> (u64, u64) {
    let [a1, a2, a3, a4, a6] = reduced_coefficients(e, 2);
    let (mut ns, mut sing) = (0, 0);
    for x in 0..2u64 {
        for y in 0..2u64 {
            let f = (y * y + a1 * x * y + a3 * y + x * x * x + a2 * x * x + a4 * x + a6) % 2;
            if f != 0 {
                continue;
            }
            let fx = (a1 * y + x * x + a4) % 2;
            let fy = (a1 * x + a3) % 2;
            if fx == 0 && fy == 0 {
                sing += 1;
            } else {
                ns += 1;
            }
        }
    }
    (ns, sing)
}

fn is_good_model_prime(e: &CurveQ, p: u64) -> bool {
    !(e.discriminant() % BigInt::from(p)).is_zero()
}

/// `|E(F_p)|` for a prime of good reduction.
pub fn count_points(e: &CurveQ, p: u64) -> Result<u64, CurveError> {
    if p > MAX_COUNT_PRIME {
        return Err(CurveError::PrimeTooLarge(p));
    }
    if let Some(n) = e.conductor() {
        if n % p == 0 {
            return Err(CurveError::BadReduction(p));
        }
    }
    if !is_good_model_prime(e, p) {
        return Err(if e.conductor().is_some() {
            CurveError::NonMinimal(p)
        } else {
            CurveError::BadReduction(p)
        });
    }
    if p == 2 {
        let (ns, _) = enumerate_mod_2(e);
        return Ok(ns + 1);
    }
    Ok(1 + affine_count_odd(&DivisionCubic::new(e, p)))
}

/// `a_p = p + 1 - |E(F_p)|` at a good prime.
pub fn a_ell(e: &CurveQ, p: u64) -> Result<i64, CurveError> {
    Ok(p as i64 + 1 - count_points(e, p)? as i64)
}

/// Counts at many good primes; the output order follows `primes`.
pub fn count_points_many(e: &CurveQ, primes: &[u64]) -> Result<Vec<u64>, CurveError> {
    primes.par_iter().map(|&p| count_points(e, p)).collect()
}

/// `|E~ns(F_p)|` of the reduction of the stored model, by enumeration.
pub fn nonsingular_count_by_enumeration(e: &CurveQ, p: u64) -> Result<u64, CurveError> {
    if p > MAX_COUNT_PRIME {
        return Err(CurveError::PrimeTooLarge(p));
    }
    if p == 2 {
        return Ok(1 + enumerate_mod_2(e).0);
    }
    let g = DivisionCubic::new(e, p);
    let affine = affine_count_odd(&g);
    let singular = (0..p)
        .filter(|&x| g.eval(x) == 0 && g.derivative(x) == 0)
        .count() as u64;
    Ok(1 + affine - singular)
}

/// Local data at `p`, with the reduction type read off the conductor exponent.
pub fn reduction_data(e: &CurveQ, p: u64) -> Result<ReductionData, CurveError> {
    let v = match e.conductor_exponent(p) {
        Some(v) => v,
        None if is_good_model_prime(e, p) => 0,
        None => return Err(CurveError::UnknownConductor(p)),
    };
    if v == 0 {
        let count = count_points(e, p)?;
        return Ok(ReductionData {
            prime: p,
            kind: ReductionKind::Good,
            nonsingular_count: count,
            a_ell: p as i64 + 1 - count as i64,
        });
    }
    e.check_minimal_at(p)?;
    let counted = nonsingular_count_by_enumeration(e, p)?;
    let inconsistent = CurveError::InconsistentConductor {
        prime: p,
        exponent: v,
    };
    let (kind, a) = if v >= 2 {
        (ReductionKind::Additive, 0)
    } else if p == 2 {
        match counted {
            1 => (ReductionKind::SplitMultiplicative, 1),
            3 => (ReductionKind::NonsplitMultiplicative, -1),
            _ => return Err(inconsistent),
        }
    } else {
        let g = DivisionCubic::new(e, p);
        let node = (0..p).find(|&x| g.eval(x) == 0 && g.derivative(x) == 0);
        let Some(x0) = node else {
            return Err(inconsistent);
        };
        // y'^2 ~ (12 x0 + b2)(x - x0)^2 near the node
        let slope_sq = (12 % p * x0 + bigint_mod_u64(&e.b2(), p)) % p;
        match arith::kronecker(slope_sq as i64, p as i64) {
            1 => (ReductionKind::SplitMultiplicative, 1),
            -1 => (ReductionKind::NonsplitMultiplicative, -1),
            _ => return Err(inconsistent),
        }
    };
    let expected = (p as i64 - a) as u64;
    if expected != counted {
        return Err(inconsistent);
    }
    Ok(ReductionData {
        prime: p,
        kind,
        nonsingular_count: counted,
        a_ell: a,
    })
}

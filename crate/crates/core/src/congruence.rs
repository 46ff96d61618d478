//! Congruences between logarithms of Heegner points on curves whose mod
//! `p^m` representations agree, and the mod 4 agreement of Frobenius traces
//! between a curve with rational 2-torsion and its quadratic twists.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use thiserror::Error;

use crate::arith;
use crate::curves::{
    count_points, quadratic_twist, rational_two_torsion, reduction_data, CurveError, CurveQ,
    PointK, QuadExt,
};
use crate::formal_log::{padic_log_point, LogError};
use crate::padics::Padic;

#[derive(Debug, Error)]
pub enum CongruenceError {
    #[error("conductor of {0} is not known")]
    UnknownConductor(String),
    #[error("only p = 2 is supported for logarithms, got {0}")]
    UnsupportedPrime(u64),
    #[error("{0} has no rational 2-torsion point")]
    NoTwoTorsion(String),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Log(#[from] LogError),
}

fn conductor_of(e: &CurveQ) -> Result<u64, CongruenceError> {
    e.conductor()
        .ok_or_else(|| CongruenceError::UnknownConductor(e.display_label()))
}

/// `a_l` at a prime of bad reduction, or at any prime for which the
/// conductor tells us the type.
fn trace(e: &CurveQ, l: u64) -> Result<i64, CurveError> {
    Ok(reduction_data(e, l)?.a_ell)
}

/// The product of `l^ord_l(N N')` over primes `l | gcd(N, N')` with
/// `a_l(E) ≡ a_l(E') (mod p^m)`.
pub fn compute_m(e: &CurveQ, e2: &CurveQ, p: u64, m: u32) -> Result<BigInt, CongruenceError> {
    let (n1, n2) = (conductor_of(e)?, conductor_of(e2)?);
    let g = num_integer::gcd(n1, n2);
    let pm = BigInt::from(p).pow(m);
    let mut out = BigInt::one();
    for (l, _) in arith::factor_u64(g) {
        let diff = BigInt::from(trace(e, l)? - trace(e2, l)?);
        if (&diff % &pm).is_zero() {
            let ord = arith::valuation(&BigInt::from(n1), l) + arith::valuation(&BigInt::from(n2), l);
            out *= BigInt::from(l).pow(ord);
        }
    }
    Ok(out)
}

/// The primes dividing `p N N' / M`, ascending.
pub fn product_primes(e: &CurveQ, e2: &CurveQ, p: u64, m: u32) -> Result<Vec<u64>, CongruenceError> {
    let (n1, n2) = (conductor_of(e)?, conductor_of(e2)?);
    let big_m = compute_m(e, e2, p, m)?;
    let num = BigInt::from(p) * n1 * n2;
    debug_assert!((&num % &big_m).is_zero());
    let q = num / big_m;
    let mut primes: Vec<u64> = arith::factor_u64(p * n1)
        .into_iter()
        .chain(arith::factor_u64(n2))
        .map(|(l, _)| l)
        .filter(|&l| arith::valuation(&q, l) > 0)
        .collect();
    primes.sort_unstable();
    primes.dedup();
    Ok(primes)
}

/// `|E^ns(F_l)| / l` as an exact rational.
fn local_factor(e: &CurveQ, l: u64) -> Result<BigRational, CurveError> {
    let good = match e.conductor() {
        Some(n) => n % l != 0,
        None => arith::bigint_mod_u64(&e.discriminant(), l) != 0,
    };
    let count = if good {
        count_points(e, l)?
    } else {
        reduction_data(e, l)?.nonsingular_count
    };
    Ok(BigRational::new(count.into(), l.into()))
}

/// `(prod_{l in primes} |E^ns(F_l)| / l) * log(P)` in `Q_p`, at absolute
/// precision `m + 6`.
pub fn side_value(
    e: &CurveQ,
    point: &PointK,
    k: QuadExt,
    primes: &[u64],
    p: u64,
    m: u32,
) -> Result<Padic, CongruenceError> {
    if p != 2 {
        return Err(CongruenceError::UnsupportedPrime(p));
    }
    let prec = m + 6;
    let log = padic_log_point(e, point, k, prec)?;
    let mut factor = BigRational::one();
    for &l in primes {
        factor *= local_factor(e, l)?;
    }
    Ok(Padic::from_rational(&factor, p, prec + 8).mul(&log))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    MatchesPlus,
    MatchesMinus,
    Fails,
    InsufficientPrecision,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::MatchesPlus => "matches-plus",
            Verdict::MatchesMinus => "matches-minus",
            Verdict::Fails => "fails",
            Verdict::InsufficientPrecision => "insufficient-precision",
        })
    }
}

#[derive(Debug, Clone)]
pub struct CongruenceReport {
    pub p: u64,
    pub m: u32,
    pub big_m: BigInt,
    pub product_primes: Vec<u64>,
    pub lhs: Padic,
    pub rhs: Padic,
    pub verdict: Verdict,
    /// Heegner-hypothesis or splitting conditions that did not hold.
    pub hypothesis_failures: Vec<String>,
}

fn heegner_failures(e: &CurveQ, k: QuadExt) -> Result<Vec<String>, CongruenceError> {
    let n = conductor_of(e)?;
    Ok(arith::factor_u64(n)
        .into_iter()
        .filter(|&(l, _)| !k.splits(l))
        .map(|(l, _)| format!("{l} | N({}) is not split in {k}", e.display_label()))
        .collect())
}

/// Compares both sides modulo `p^m`, trying both signs.
pub fn compare(lhs: &Padic, rhs: &Padic, m: u32) -> Verdict {
    let m = m as i64;
    match (lhs.congruent(rhs, m), lhs.congruent(&rhs.neg(), m)) {
        (Some(true), _) => Verdict::MatchesPlus,
        (_, Some(true)) => Verdict::MatchesMinus,
        (Some(false), Some(false)) => Verdict::Fails,
        _ => Verdict::InsufficientPrecision,
    }
}

pub fn verify_congruence(
    e: &CurveQ,
    point: &PointK,
    e2: &CurveQ,
    point2: &PointK,
    k: QuadExt,
    p: u64,
    m: u32,
) -> Result<CongruenceReport, CongruenceError> {
    let mut failures = heegner_failures(e, k)?;
    failures.extend(heegner_failures(e2, k)?);
    if !k.splits(p) {
        failures.push(format!("{p} is not split in {k}"));
    }
    let big_m = compute_m(e, e2, p, m)?;
    let primes = product_primes(e, e2, p, m)?;
    let lhs = side_value(e, point, k, &primes, p, m)?;
    let rhs = side_value(e2, point2, k, &primes, p, m)?;
    let verdict = compare(&lhs, &rhs, m);
    Ok(CongruenceReport {
        p,
        m,
        big_m,
        product_primes: primes,
        lhs,
        rhs,
        verdict,
        hypothesis_failures: failures,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AellReport {
    pub d: i64,
    pub bound: u64,
    pub checked: usize,
    /// `(l, a_l(E), a_l(E^(d)))` for the smallest failing prime.
    pub first_violation: Option<(u64, i64, i64)>,
}

impl AellReport {
    pub fn passed(&self) -> bool {
        self.first_violation.is_none()
    }
}

/// Checks `a_l(E) ≡ a_l(E^(d)) (mod 4)` for every prime `l <= bound` of good
/// reduction for both curves with `l ∤ 2d`.
pub fn verify_aell_mod4(e: &CurveQ, d: i64, bound: u64) -> Result<AellReport, CongruenceError> {
    if rational_two_torsion(e).is_empty() {
        return Err(CongruenceError::NoTwoTorsion(e.display_label()));
    }
    let twist = quadratic_twist(e, d)?;
    let disc = e.discriminant() * 2 * d;
    let primes: Vec<u64> = arith::primes_in_range(2, bound.max(2))
        .map_err(CurveError::from)?
        .into_iter()
        .filter(|&l| arith::bigint_mod_u64(&disc, l) != 0)
        .collect();
    let traces: Vec<(u64, i64, i64)> = primes
        .par_iter()
        .map(|&l| -> Result<_, CurveError> {
            let a = l as i64 + 1 - count_points(e, l)? as i64;
            let b = l as i64 + 1 - count_points(&twist, l)? as i64;
            Ok((l, a, b))
        })
        .collect::<Result<_, _>>()?;
    Ok(AellReport {
        d,
        bound,
        checked: traces.len(),
        first_violation: traces.into_iter().find(|(_, a, b)| (a - b).rem_euclid(4) != 0),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::tests::{e256a1, e256b1};
    use crate::curves::KElem;
    use crate::formal_log::padic_log_point;

    fn qm7() -> QuadExt {
        QuadExt::new(-7).unwrap()
    }

    fn pt(e: &CurveQ, x: i64, y: i64) -> PointK {
        e.point(KElem::from_int(x), KElem::from_int(y)).unwrap()
    }

    #[test]
    fn m_for_identical_curves_is_n_squared() {
        for e in [e256a1(), e256b1(), CurveQ::from_ints([0, -1, 1, -10, -20]).unwrap().with_conductor(11)] {
            let n = e.conductor().unwrap();
            assert_eq!(compute_m(&e, &e, 2, 2).unwrap(), BigInt::from(n) * n);
        }
    }

    #[test]
    fn m_for_twist_by_29() {
        let e = e256b1();
        let t = quadratic_twist(&e, 29).unwrap();
        assert_eq!(compute_m(&e, &t, 2, 2).unwrap(), BigInt::from(1u64 << 16));
        assert_eq!(product_primes(&e, &t, 2, 2).unwrap(), vec![2, 29]);
    }

    #[test]
    fn m_for_coprime_odd_conductors() {
        let e11 = CurveQ::from_ints([0, -1, 1, -10, -20]).unwrap().with_conductor(11);
        let e37 = CurveQ::from_ints([0, 0, 1, -1, 0]).unwrap().with_conductor(37);
        assert_eq!(compute_m(&e11, &e37, 2, 2).unwrap(), BigInt::one());
        assert_eq!(product_primes(&e11, &e37, 2, 2).unwrap(), vec![2, 11, 37]);
    }

    #[test]
    fn prime_support_matches_two_and_d() {
        for e in [e256a1(), e256b1()] {
            for d in [29i64, 37, -11, 53, -43, 109] {
                let t = quadratic_twist(&e, d).unwrap();
                let mut want = vec![2, d.unsigned_abs()];
                want.sort_unstable();
                assert_eq!(product_primes(&e, &t, 2, 2).unwrap(), want, "d={d}");
            }
        }
    }

    #[test]
    fn side_values() {
        let e = e256b1();
        let p = pt(&e, -1, -1);
        let log = padic_log_point(&e, &p, qm7(), 8).unwrap();
        let bare = side_value(&e, &p, qm7(), &[], 2, 2).unwrap();
        assert_eq!(bare.congruent(&log, 8), Some(true));
        let count29 = count_points(&e, 29).unwrap();
        assert_eq!(count29 % 4, 2);
        let s = side_value(&e, &p, qm7(), &[2, 29], 2, 2).unwrap();
        assert_eq!(s.valuation(), Some(1));
        let t = pt(&e, 0, 0);
        assert!(side_value(&e, &t, qm7(), &[2, 29], 2, 2).unwrap().is_exact_zero());
    }

    #[test]
    fn self_congruence_signs() {
        let e = e256b1();
        let p = pt(&e, -1, -1);
        let r = verify_congruence(&e, &p, &e, &p, qm7(), 2, 2).unwrap();
        assert_eq!(r.verdict, Verdict::MatchesPlus);
        assert!(r.hypothesis_failures.is_empty());
        // log(-P) = -log(P) and v(log P) = 0, so mod 4 only the minus sign fits
        let r = verify_congruence(&e, &p, &e, &e.neg(&p), qm7(), 2, 2).unwrap();
        assert_eq!(r.verdict, Verdict::MatchesMinus);
    }

    #[test]
    fn heegner_hypothesis_is_reported() {
        let e = e256b1();
        let p = pt(&e, -1, -1);
        let k = QuadExt::new(17).unwrap();
        let r = verify_congruence(&e, &p, &e, &p, k, 2, 2).unwrap();
        assert!(r.hypothesis_failures.is_empty());
        let e11 = CurveQ::from_ints([0, -1, 1, -10, -20]).unwrap().with_conductor(11);
        let q = pt(&e11, 5, 5);
        let r = verify_congruence(&e11, &q, &e11, &q, k, 2, 2).unwrap();
        // 11 is inert in Q(sqrt 17); reported once for each side
        assert_eq!(r.hypothesis_failures.len(), 2);
    }

    #[test]
    fn aell_mod4_examples() {
        let r = verify_aell_mod4(&e256b1(), 29, 2000).unwrap();
        assert!(r.passed() && r.checked > 250, "{r:?}");
        let r = verify_aell_mod4(&e256a1(), -11, 2000).unwrap();
        assert!(r.passed(), "{r:?}");
        let r = verify_aell_mod4(&e256a1(), 1, 500).unwrap();
        assert!(r.passed());
        // 11a1 has a rational 5-torsion point but no 2-torsion
        let e11 = CurveQ::from_ints([0, -1, 1, -10, -20]).unwrap().with_conductor(11);
        assert!(matches!(verify_aell_mod4(&e11, 5, 100), Err(CongruenceError::NoTwoTorsion(_))));
    }

    #[test]
    fn counts_are_even_with_two_torsion() {
        let others = [[1, -1, 1, -3, 3], [1, 0, 1, 4, -6], [0, 6, 0, 4, 0], [1, 1, 1, -10, -10]];
        let curves = [e256a1(), e256b1()]
            .into_iter()
            .chain(others.into_iter().map(|a| CurveQ::from_ints(a).unwrap()))
            .filter(|e| !rational_two_torsion(e).is_empty());
        for e in curves {
            let disc = e.discriminant();
            for l in arith::primes_in_range(3, 3000).unwrap() {
                if arith::bigint_mod_u64(&disc, l) != 0 {
                    assert_eq!(count_points(&e, l).unwrap() % 2, 0, "l={l}");
                }
            }
        }
    }
}

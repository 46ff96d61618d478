//! Rational 2-torsion, the 2-isogeny with rational kernel, 2-torsion fields
//! and quadratic twists.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{FromPrimitive, One, Signed, ToPrimitive, Zero};

use super::{CurveError, CurveQ, KElem, Point, PointK, QuadExt};
use crate::arith;

/// The cubic `h(X) = X^3 + b2 X^2 + 8 b4 X + 16 b6`, whose roots are `4x` for
/// the x-coordinates of the 2-torsion points. The curve is isomorphic to
/// `Y^2 = h(X)` via `X = 4x`, `Y = 8y + 4 a1 x + 4 a3`.
fn scaled_division_cubic(e: &CurveQ) -> [BigInt; 3] {
    [e.b2(), 8 * e.b4(), 16 * e.b6()]
}

fn eval_monic_cubic(c: &[BigInt; 3], x: &BigInt) -> BigInt {
    ((x + &c[0]) * x + &c[1]) * x + &c[2]
}

/// Exact integer roots of `X^3 + b X^2 + c X + d`, ascending.
///
/// The derivative's real roots are located in floating point; each monotone
/// piece is then searched exactly, and integers next to the turning points
/// are tested directly.
pub(crate) fn integer_roots_monic_cubic(coef: &[BigInt; 3]) -> Vec<BigInt> {
    let [b, c, d] = coef;
    let bound = BigInt::one() + b.abs().max(c.abs()).max(d.abs());
    let f = |x: &BigInt| eval_monic_cubic(coef, x);
    let mut roots: Vec<BigInt> = Vec::new();
    let push = |r: BigInt, roots: &mut Vec<BigInt>| {
        if !roots.contains(&r) {
            roots.push(r);
        }
    };

    let bf = b.to_f64().unwrap_or(f64::INFINITY);
    let cf = c.to_f64().unwrap_or(f64::INFINITY);
    let disc = bf * bf - 3.0 * cf;
    let mut cuts: Vec<BigInt> = Vec::new();
    if disc.is_finite() && disc > 0.0 {
        let s = disc.sqrt();
        for t in [(-bf - s) / 3.0, (-bf + s) / 3.0] {
            if let Some(k) = BigInt::from_f64(t.floor()) {
                for off in -2..=3 {
                    let cand = &k + off;
                    if f(&cand).is_zero() {
                        push(cand.clone(), &mut roots);
                    }
                }
                cuts.push(k);
            }
        }
    }
    let mut edges = vec![-bound.clone()];
    edges.extend(cuts);
    edges.push(bound);
    edges.sort();
    for w in edges.windows(2) {
        // exact bisection for a sign change on [lo, hi]
        let (mut lo, mut hi) = (w[0].clone(), w[1].clone());
        let (flo, fhi) = (f(&lo), f(&hi));
        if flo.is_zero() {
            push(lo.clone(), &mut roots);
        }
        if fhi.is_zero() {
            push(hi.clone(), &mut roots);
        }
        if flo.signum() * fhi.signum() >= BigInt::zero() {
            continue;
        }
        let rising = flo.is_negative();
        while &hi - &lo > BigInt::one() {
            let mid: BigInt = (&lo + &hi).div_floor(&BigInt::from(2));
            let fm = f(&mid);
            if fm.is_zero() {
                lo = mid.clone();
                hi = mid;
                break;
            }
            if fm.is_negative() == rising {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        for cand in [lo, hi] {
            if f(&cand).is_zero() {
                push(cand, &mut roots);
            }
        }
    }
    roots.sort();
    roots
}

/// All rational points of exact order 2 (0, 1 or 3 of them).
pub fn rational_two_torsion(e: &CurveQ) -> Vec<PointK> {
    let roots = integer_roots_monic_cubic(&scaled_division_cubic(e));
    roots
        .into_iter()
        .map(|r| {
            let x = BigRational::new(r, BigInt::from(4));
            let y = -(BigRational::from_integer(e.a1().clone()) * &x
                + BigRational::from_integer(e.a3().clone()))
                / BigRational::from_integer(BigInt::from(2));
            Point::Affine(KElem::rational(x), KElem::rational(y))
        })
        .collect()
}

/// The field `Q(E[2])` when it has degree at most 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TwoTorsionField {
    Trivial,
    Quadratic(QuadExt),
    /// No rational 2-torsion: the field has degree 3 or 6.
    Cubic,
}

impl TwoTorsionField {
    pub fn quadratic(&self) -> Option<QuadExt> {
        match self {
            TwoTorsionField::Quadratic(k) => Some(*k),
            _ => None,
        }
    }
}

/// `Q(E[2])`, computed twice: from the discriminant and from the residual
/// quadratic factor of the 2-division cubic.
pub fn two_torsion_field(e: &CurveQ) -> Result<TwoTorsionField, CurveError> {
    let coef = scaled_division_cubic(e);
    let roots = integer_roots_monic_cubic(&coef);
    match roots.len() {
        0 => Ok(TwoTorsionField::Cubic),
        3 => Ok(TwoTorsionField::Trivial),
        1 => {
            let r = &roots[0];
            let p = &coef[0] + r;
            let q = &coef[1] + r * &p;
            let residual = &p * &p - 4 * &q;
            let by_disc = QuadExt::from_radicand(&e.discriminant())?;
            let by_factor = QuadExt::from_radicand(&residual)?;
            assert_eq!(
                by_disc, by_factor,
                "discriminant and residual quadratic disagree on Q(E[2])"
            );
            Ok(TwoTorsionField::Quadratic(by_disc))
        }
        n => unreachable!("monic cubic with {n} distinct rational roots and nonzero discriminant"),
    }
}

/// The 2-isogeny `E -> E0 = E / <T>` for the unique rational 2-torsion point `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoIsogeny {
    pub source: CurveQ,
    pub codomain: CurveQ,
    pub kernel: PointK,
    /// Root `e` of the scaled cubic `h`, i.e. `T` has `x = e / 4`.
    shift: BigInt,
    /// `Y^2 = u^3 + A u^2 + B u` after moving `T` to the origin.
    a: BigInt,
    b: BigInt,
    /// Codomain model is the Vélu image scaled by `u -> u / s^2`.
    scale: BigInt,
}

impl TwoIsogeny {
    /// Coefficients `(A, B)` of the source in the form `Y^2 = u^3 + A u^2 + B u`.
    pub fn source_form(&self) -> (&BigInt, &BigInt) {
        (&self.a, &self.b)
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }

    /// Image of a point of `E` on `E0`, with
    /// `(u, Y) -> (Y^2 / u^2, Y (B - u^2) / u^2)` followed by the scaling.
    pub fn apply(&self, p: &PointK) -> Result<PointK, CurveError> {
        let Point::Affine(x, y) = p else {
            return Ok(Point::Infinity);
        };
        let e = &self.source;
        let k = |n: i64| KElem::from_int(n);
        let big = |n: &BigInt| KElem::from_bigint(n);
        let u = k(4).try_mul(x)?.try_sub(&big(&self.shift))?;
        if u.is_zero() {
            return Ok(Point::Infinity);
        }
        let yy = k(8)
            .try_mul(y)?
            .try_add(&big(&(4 * e.a1())).try_mul(x)?)?
            .try_add(&big(&(4 * e.a3())))?;
        let u2 = u.try_mul(&u)?;
        let xi = yy.try_mul(&yy)?.try_div(&u2)?;
        let eta = yy.try_mul(&big(&self.b).try_sub(&u2)?)?.try_div(&u2)?;
        let s2 = big(&(&self.scale * &self.scale));
        let s3 = big(&(&self.scale * &self.scale * &self.scale));
        Ok(Point::Affine(xi.try_div(&s2)?, eta.try_div(&s3)?))
    }
}

/// Vélu's formulas for the kernel `{O, T}`. Requires exactly one rational
/// 2-torsion point. The codomain inherits conductor and root number.
pub fn two_isogeny(e: &CurveQ) -> Result<TwoIsogeny, CurveError> {
    let coef = scaled_division_cubic(e);
    let roots = integer_roots_monic_cubic(&coef);
    if roots.len() != 1 {
        return Err(CurveError::TwoTorsionCount(roots.len()));
    }
    let r = roots[0].clone();
    let [b2, c, _] = &coef;
    let a: BigInt = 3 * &r + b2;
    let b: BigInt = 3 * &r * &r + 2 * b2 * &r + c;
    let mut a0: BigInt = -2 * &a;
    let mut b0: BigInt = &a * &a - 4 * &b;
    let mut scale = BigInt::one();
    let g = if a0.is_zero() { b0.abs() } else { a0.gcd(&b0) };
    if let Ok(f) = arith::factor(&g) {
        for pr in f.primes() {
            let pr = BigInt::from(pr);
            let (p2, p4) = (&pr * &pr, &pr * &pr * &pr * &pr);
            while (&a0 % &p2).is_zero() && (&b0 % &p4).is_zero() {
                a0 /= &p2;
                b0 /= &p4;
                scale *= &pr;
            }
        }
    }
    let mut codomain = CurveQ::new([BigInt::zero(), a0, BigInt::zero(), b0, BigInt::zero()])?
        .with_root_number(e.root_number());
    if let Some(n) = e.conductor() {
        codomain = codomain.with_conductor(n);
    }
    if let Some(l) = e.label() {
        codomain = codomain.with_label(format!("{l}/2"));
    }
    let kernel = rational_two_torsion(e).remove(0);
    Ok(TwoIsogeny {
        source: e.clone(),
        codomain,
        kernel,
        shift: r,
        a,
        b,
        scale,
    })
}

/// True iff `Q(E0[2])` is a genuine quadratic field, i.e. `E` admits no
/// rational cyclic 4-isogeny.
pub fn has_no_rational_cyclic_4_isogeny(e: &CurveQ) -> Result<bool, CurveError> {
    let phi = two_isogeny(e)?;
    Ok(matches!(
        two_torsion_field(&phi.codomain)?,
        TwoTorsionField::Quadratic(_)
    ))
}

/// Quadratic twist by a squarefree `d` coprime to `2N`.
///
/// Models with `a1 = a3 = 0` twist as `(0, d a2, 0, d^2 a4, d^3 a6)`; other
/// models go through the completed-square model first. The conductor is
/// `N d^2` when `d ≡ 1 (mod 4)` and left unknown otherwise.
pub fn quadratic_twist(e: &CurveQ, d: i64) -> Result<CurveQ, CurveError> {
    let bd = BigInt::from(d);
    if d == 0 || !arith::is_squarefree(&bd)? {
        return Err(CurveError::NotSquarefree(bd));
    }
    let guard = match e.conductor() {
        Some(n) => BigInt::from(2 * n),
        None => 2 * e.discriminant(),
    };
    if !bd.gcd(&guard).is_one() {
        return Err(CurveError::TwistNotCoprime { d });
    }
    if d == 1 {
        return Ok(e.clone());
    }
    let (a2, a4, a6) = if e.a1().is_zero() && e.a3().is_zero() {
        (e.a2().clone(), e.a4().clone(), e.a6().clone())
    } else {
        (e.b2(), 8 * e.b4(), 16 * e.b6())
    };
    let coeffs = [
        BigInt::zero(),
        &bd * a2,
        BigInt::zero(),
        &bd * &bd * a4,
        &bd * &bd * &bd * a6,
    ];
    let mut twist = CurveQ::new(coeffs)?;
    if d.rem_euclid(4) == 1 {
        if let Some(n) = e.conductor() {
            let d2 = (d as i128) * (d as i128);
            if let Some(nn) = (n as i128).checked_mul(d2).and_then(|v| u64::try_from(v).ok()) {
                twist = twist.with_conductor(nn);
            }
        }
    }
    if let Some(l) = e.label() {
        twist = twist.with_label(format!("{l}^({d})"));
    }
    Ok(twist.with_minimal_at_2(e.minimal_at_2_flag() && e.a1().is_zero() && e.a3().is_zero()))
}

fn rational_perfect_power(q: &BigRational, k: u32) -> bool {
    if q.is_negative() && k % 2 == 0 {
        return false;
    }
    let check = |n: &BigInt| {
        let r = n.abs().nth_root(k);
        r.pow(k) == n.abs()
    };
    check(q.numer()) && check(q.denom())
}

/// Isomorphism over Q: `c4' = u^4 c4` and `c6' = u^6 c6` for some rational `u`.
pub fn is_isomorphic(e1: &CurveQ, e2: &CurveQ) -> bool {
    let (c4, c6, d4, d6) = (e1.c4(), e1.c6(), e2.c4(), e2.c6());
    if c4.is_zero() != d4.is_zero() || c6.is_zero() != d6.is_zero() {
        return false;
    }
    if c4.is_zero() {
        return rational_perfect_power(&BigRational::new(d6, c6), 6);
    }
    if c6.is_zero() {
        return rational_perfect_power(&BigRational::new(d4, c4), 4);
    }
    let u2 = BigRational::new(&d6 * &c4, &c6 * &d4);
    if !rational_perfect_power(&u2, 2) {
        return false;
    }
    BigRational::from_integer(d4) == &u2 * &u2 * BigRational::from_integer(c4)
}

#[cfg(test)]
mod tests {
    use super::super::tests::{e256a1, e256b1};
    use super::super::{a_ell, count_points};
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn cubic_roots_exact() {
        let b = |v: i64| BigInt::from(v);
        // (X - 3)(X + 5)(X - 7) = X^3 - 5X^2 - 29X + 105
        assert_eq!(
            integer_roots_monic_cubic(&[b(-5), b(-29), b(105)]),
            vec![b(-5), b(3), b(7)]
        );
        // X^3 - 2X has the single root 0
        assert_eq!(integer_roots_monic_cubic(&[b(0), b(-2), b(0)]), vec![b(0)]);
        // (X - 1000003)(X^2 + 1)
        let r = integer_roots_monic_cubic(&[b(-1000003), b(1), b(-1000003)]);
        assert_eq!(r, vec![b(1000003)]);
        assert!(integer_roots_monic_cubic(&[b(0), b(0), b(2)]).is_empty());
    }

    #[test]
    fn two_torsion_examples() {
        let t = rational_two_torsion(&e256b1());
        assert_eq!(t.len(), 1);
        assert_eq!(t[0].x().unwrap(), &KElem::from_int(0));
        assert_eq!(rational_two_torsion(&e256a1()).len(), 1);
        let full = CurveQ::from_ints([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(rational_two_torsion(&full).len(), 3);
        for p in rational_two_torsion(&full).iter().chain(&t) {
            let e = if p.x() == t[0].x() { e256b1() } else { full.clone() };
            assert!(e.contains(p));
            assert_eq!(e.scalar_mul(p, 2).unwrap(), Point::Infinity);
        }
        let long = CurveQ::from_ints([1, -1, 1, -3, 3]).unwrap();
        for p in rational_two_torsion(&long) {
            assert!(long.contains(&p));
            assert_eq!(long.add(&p, &p).unwrap(), Point::Infinity);
        }
    }

    #[test]
    fn isogenous_curves_of_examples() {
        let phi = two_isogeny(&e256b1()).unwrap();
        let target = CurveQ::from_ints([0, 0, 0, 8, 0]).unwrap();
        assert!(is_isomorphic(&phi.codomain, &target));
        let phi_a = two_isogeny(&e256a1()).unwrap();
        let e256a2 = CurveQ::from_ints([0, 1, 0, -13, -21]).unwrap();
        assert!(is_isomorphic(&phi_a.codomain, &e256a2));
        assert!(!is_isomorphic(&phi_a.codomain, &e256a1()));
        assert_eq!(phi_a.codomain.conductor(), Some(256));
        for p in arith::primes_in_range(3, 500).unwrap() {
            assert_eq!(a_ell(&e256b1(), p).unwrap(), a_ell(&phi.codomain, p).unwrap());
            assert_eq!(a_ell(&e256a1(), p).unwrap(), a_ell(&phi_a.codomain, p).unwrap());
        }
        let full = CurveQ::from_ints([0, 0, 0, -1, 0]).unwrap();
        assert_eq!(two_isogeny(&full), Err(CurveError::TwoTorsionCount(3)));
        let none = CurveQ::from_ints([0, 0, 1, -1, 0]).unwrap();
        assert_eq!(two_isogeny(&none), Err(CurveError::TwoTorsionCount(0)));
    }

    #[test]
    fn isogeny_map_is_a_homomorphism() {
        let e = e256b1();
        let phi = two_isogeny(&e).unwrap();
        let p = e.point(KElem::from_int(-1), KElem::from_int(-1)).unwrap();
        assert_eq!(phi.apply(&phi.kernel).unwrap(), Point::Infinity);
        let multiples: Vec<PointK> = (1..5).map(|n| e.scalar_mul(&p, n).unwrap()).collect();
        for (i, q) in multiples.iter().enumerate() {
            let image = phi.apply(q).unwrap();
            assert!(phi.codomain.contains(&image));
            for r in &multiples[i..] {
                let lhs = phi.apply(&e.add(q, r).unwrap()).unwrap();
                let rhs = phi
                    .codomain
                    .add(&image, &phi.apply(r).unwrap())
                    .unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn two_torsion_fields() {
        assert_eq!(
            two_torsion_field(&e256a1()).unwrap(),
            TwoTorsionField::Quadratic(QuadExt::new(2).unwrap())
        );
        assert_eq!(
            two_torsion_field(&e256b1()).unwrap(),
            TwoTorsionField::Quadratic(QuadExt::new(2).unwrap())
        );
        let e0 = two_isogeny(&e256b1()).unwrap().codomain;
        assert_eq!(
            two_torsion_field(&e0).unwrap(),
            TwoTorsionField::Quadratic(QuadExt::new(-2).unwrap())
        );
        let e0a = two_isogeny(&e256a1()).unwrap().codomain;
        assert_eq!(
            two_torsion_field(&e0a).unwrap(),
            TwoTorsionField::Quadratic(QuadExt::new(2).unwrap())
        );
        assert_eq!(
            two_torsion_field(&CurveQ::from_ints([0, 0, 0, -1, 0]).unwrap()).unwrap(),
            TwoTorsionField::Trivial
        );
        assert_eq!(
            two_torsion_field(&CurveQ::from_ints([0, 0, 1, -1, 0]).unwrap()).unwrap(),
            TwoTorsionField::Cubic
        );
    }

    /// Random `y^2 = x(x^2 + a x + b)` with an irreducible quadratic factor;
    /// `two_torsion_field` asserts internally that both routes agree.
    #[test]
    fn two_torsion_field_routes_agree_on_random_curves() {
        let mut rng = rand::rngs::StdRng::seed_from_u64(7);
        let mut done = 0;
        while done < 100 {
            let (s, a, b) = (rng.gen_range(-20..=20), rng.gen_range(-30..=30), rng.gen_range(-60..=60));
            let (a1, a3) = (rng.gen_range(0..=1), rng.gen_range(0..=1));
            // x-shift by s keeps exactly one rational root when a^2 - 4b is not a square
            let disc = a * a - 4 * b;
            if b == 0 || disc == 0 || arith::is_square(&BigInt::from(disc)) {
                continue;
            }
            let (a2, a4, a6) = (a - 3 * s, b - 2 * a * s + 3 * s * s, -s * (b - a * s + s * s));
            let Ok(e) = CurveQ::from_ints([a1, a2, a3, a4, a6]) else { continue };
            if rational_two_torsion(&e).len() != 1 {
                continue;
            }
            assert!(matches!(two_torsion_field(&e).unwrap(), TwoTorsionField::Quadratic(_)));
            done += 1;
        }
    }

    #[test]
    fn cyclic_four_isogeny_detection() {
        assert!(has_no_rational_cyclic_4_isogeny(&e256b1()).unwrap());
        assert!(has_no_rational_cyclic_4_isogeny(&e256a1()).unwrap());
        // y^2 = x^3 + x^2 - x: Q(E[2]) = Q(sqrt 5) but the isogenous curve
        // y^2 = x^3 - 2x^2 + 5x has x^2 - 2x + 5, discriminant -16: quadratic.
        // y^2 = x(x^2 + 6x + 4) maps to x^3 - 12x^2 + 20x = x(x-2)(x-10): full 2-torsion.
        let golden = CurveQ::from_ints([0, 1, 0, -1, 0]).unwrap();
        assert!(has_no_rational_cyclic_4_isogeny(&golden).unwrap());
        let with4 = CurveQ::from_ints([0, 6, 0, 4, 0]).unwrap();
        assert_eq!(rational_two_torsion(&with4).len(), 1);
        assert!(!has_no_rational_cyclic_4_isogeny(&with4).unwrap());
        let full = CurveQ::from_ints([0, 0, 0, -1, 0]).unwrap();
        assert!(has_no_rational_cyclic_4_isogeny(&full).is_err());
    }

    #[test]
    fn twists() {
        let e = e256b1();
        assert_eq!(quadratic_twist(&e, 1).unwrap(), e);
        let t29 = quadratic_twist(&e, 29).unwrap();
        assert_eq!(t29.conductor(), Some(256 * 29 * 29));
        assert_eq!(quadratic_twist(&e, -7).unwrap().conductor(), Some(256 * 49));
        assert_eq!(quadratic_twist(&e, -5).unwrap().conductor(), None);
        assert!(quadratic_twist(&e, 12).is_err());
        assert_eq!(quadratic_twist(&e, 6), Err(CurveError::TwistNotCoprime { d: 6 }));
        for d in [5i64, -7, 29] {
            let t = quadratic_twist(&e, d).unwrap();
            for p in arith::primes_in_range(3, 200).unwrap() {
                if d % p as i64 == 0 {
                    continue;
                }
                let expect = p as i64 + 1 - arith::kronecker(d, p as i64) as i64 * a_ell(&e, p).unwrap();
                assert_eq!(count_points(&t, p).unwrap() as i64, expect, "d={d} p={p}");
            }
        }
    }
}

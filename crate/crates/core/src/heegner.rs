//! Heegner points through the modular parametrization.
//!
//! The image of a CM point `tau` in `C / Lambda` is `z = sum a_n / n q^n`;
//! Weierstrass functions for the period lattice of the model map it to a
//! complex point, whose coordinates are then recognized as elements of `K`
//! with small denominators and checked exactly on the curve. Floating point
//! only proposes candidates; nothing is returned without the exact check.

use std::f64::consts::PI;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use thiserror::Error;

use crate::arith;
use crate::curves::{reduction_data, count_points, CurveError, CurveQ, KElem, Point, PointK, QuadExt};

/// Largest `n` for which coefficients are computed.
pub const MAX_TERMS: usize = 1_000_000;
/// Default denominator bound for recognizing coordinates.
pub const DEFAULT_DENOMINATOR_BOUND: u64 = 10_000;
/// Certified bound on the discarded tail of the parametrization series.
pub const TAIL_BOUND: f64 = 1e-10;

#[derive(Debug, Error)]
pub enum HeegnerError {
    #[error("{0} terms exceed the budget of {MAX_TERMS}")]
    Budget(usize),
    #[error("conductor of {0} is not known")]
    UnknownConductor(String),
    #[error("Heegner hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("class number {0} is above the supported limit of 4")]
    ClassNumber(usize),
    #[error("{needed} terms needed for the tail bound, only {allowed} allowed")]
    InsufficientTerms { needed: usize, allowed: usize },
    #[error("could not recognize the point ({x}, {y}) over {field}")]
    Recognition { x: Complex64, y: Complex64, field: QuadExt },
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// `a_1 .. a_nmax` of the newform attached to a curve.
#[derive(Debug, Clone)]
pub struct NewformCoefficients {
    a: Vec<i64>,
}

impl NewformCoefficients {
    /// `a_n` for `1 <= n <= nmax`.
    pub fn get(&self, n: usize) -> i64 {
        self.a[n]
    }

    pub fn nmax(&self) -> usize {
        self.a.len() - 1
    }
}

pub fn newform_coefficients(e: &CurveQ, nmax: usize) -> Result<NewformCoefficients, HeegnerError> {
    if nmax > MAX_TERMS {
        return Err(HeegnerError::Budget(nmax));
    }
    let n = e
        .conductor()
        .ok_or_else(|| HeegnerError::UnknownConductor(e.display_label()))?;
    let mut spf = vec![0usize; nmax + 1];
    for i in 2..=nmax {
        if spf[i] == 0 {
            let mut j = i;
            while j <= nmax {
                if spf[j] == 0 {
                    spf[j] = i;
                }
                j += i;
            }
        }
    }
    let mut a = vec![0i64; nmax + 1];
    if nmax >= 1 {
        a[1] = 1;
    }
    for m in 2..=nmax {
        let p = spf[m];
        // split m = p^k * rest
        let (mut pk, mut k) = (1usize, 0u32);
        while (m / pk) % p == 0 {
            pk *= p;
            k += 1;
        }
        if pk != m {
            a[m] = a[pk] * a[m / pk];
            continue;
        }
        let ap = if k == 1 {
            if n % p as u64 == 0 {
                reduction_data(e, p as u64)?.a_ell
            } else {
                p as i64 + 1 - count_points(e, p as u64)? as i64
            }
        } else {
            a[p]
        };
        a[m] = match k {
            1 => ap,
            _ if n % p as u64 == 0 => a[pk / p] * ap,
            _ => ap * a[pk / p] - p as i64 * a[pk / p / p],
        };
    }
    Ok(NewformCoefficients { a })
}

/// A positive definite form `a X^2 + b XY + c Y^2` with `N | a`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct HeegnerForm {
    pub a: i64,
    pub b: i64,
    pub c: i64,
}

impl HeegnerForm {
    pub fn discriminant(&self) -> i64 {
        self.b * self.b - 4 * self.a * self.c
    }

    /// The root `(-b + sqrt(disc)) / 2a` in the upper half plane.
    pub fn tau(&self) -> Complex64 {
        let d = self.discriminant() as f64;
        Complex64::new(-self.b as f64, (-d).sqrt()) / (2.0 * self.a as f64)
    }

    /// The reduced form in the same SL2(Z) class.
    pub fn reduced(&self) -> HeegnerForm {
        let (mut a, mut b, mut c) = (self.a, self.b, self.c);
        loop {
            if b > a || b <= -a {
                // translate b into (-a, a]
                let k = (a - b).div_euclid(2 * a);
                let nb = b + 2 * k * a;
                c = (nb * nb - (b * b - 4 * a * c)) / (4 * a);
                b = nb;
            }
            if a > c {
                std::mem::swap(&mut a, &mut c);
                b = -b;
                continue;
            }
            if a == c && b < 0 {
                b = -b;
            }
            break;
        }
        HeegnerForm { a, b, c }
    }
}

/// Reduced primitive forms of discriminant `d < 0`.
pub fn reduced_forms(d: i64) -> Vec<HeegnerForm> {
    let mut out = Vec::new();
    let mut a = 1;
    while 3 * a * a <= -d {
        for b in -a + 1..=a {
            let num = b * b - d;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            if a.gcd(&b).gcd(&c) == 1 {
                out.push(HeegnerForm { a, b, c });
            }
        }
        a += 1;
    }
    out
}

fn check_hypothesis(n: u64, k: QuadExt) -> Result<i64, HeegnerError> {
    let d = k.discriminant();
    if d >= 0 {
        return Err(HeegnerError::Hypothesis(format!("{k} is not imaginary")));
    }
    if let Some((l, _)) = arith::factor_u64(n).into_iter().find(|&(l, _)| !k.splits(l)) {
        return Err(HeegnerError::Hypothesis(format!("{l} | {n} does not split in {k}")));
    }
    Ok(d)
}

/// Smallest `b >= 0` with `b^2 ≡ d_K (mod 4N)`.
fn heegner_residue(n: u64, d: i64) -> Option<i64> {
    let m = 4 * n as i128;
    (0..2 * n as i128)
        .find(|b| (b * b - d as i128).rem_euclid(m) == 0)
        .map(|b| b as i64)
}

/// The Heegner form `[N, b, c]` of discriminant `d_K` and its CM point.
pub fn heegner_tau(n: u64, k: QuadExt) -> Result<(HeegnerForm, Complex64), HeegnerError> {
    let d = check_hypothesis(n, k)?;
    let b = heegner_residue(n, d)
        .ok_or_else(|| HeegnerError::Hypothesis(format!("{d} is not a square mod {}", 4 * n)))?;
    let a = n as i64;
    let form = HeegnerForm {
        a,
        b,
        c: (b * b - d) / (4 * a),
    };
    Ok((form, form.tau()))
}

/// One Heegner form per ideal class, all with `b ≡ beta (mod 2N)`.
pub fn heegner_orbit(n: u64, k: QuadExt) -> Result<Vec<HeegnerForm>, HeegnerError> {
    let (first, _) = heegner_tau(n, k)?;
    let d = first.discriminant();
    let h = reduced_forms(d).len();
    if h > 4 {
        return Err(HeegnerError::ClassNumber(h));
    }
    let n = n as i64;
    let mut found: Vec<(HeegnerForm, HeegnerForm)> = vec![(first.reduced(), first)];
    let mut mult = 2;
    while found.len() < h {
        let a = n * mult;
        // b runs over beta + 2Nk inside (-a, a]
        let mut b = first.b - 2 * n * ((first.b + a) / (2 * n));
        while b <= a {
            if b > -a && (b * b - d) % (4 * a) == 0 {
                let c = (b * b - d) / (4 * a);
                let f = HeegnerForm { a, b, c };
                let r = f.reduced();
                if a.gcd(&b).gcd(&c) == 1 && !found.iter().any(|(g, _)| *g == r) {
                    found.push((r, f));
                }
            }
            b += 2 * n;
        }
        mult += 1;
        if mult > 10_000 {
            return Err(HeegnerError::Hypothesis("class representatives not found".into()));
        }
    }
    Ok(found.into_iter().map(|(_, f)| f).collect())
}

/// Number of terms after which `|q|^(M+1) / (1 - |q|) < TAIL_BOUND`,
/// using `|a_n / n| <= 1`.
pub fn terms_needed(tau: Complex64) -> usize {
    let r = (-2.0 * PI * tau.im).exp();
    let m = ((TAIL_BOUND * (1.0 - r)).ln() / r.ln()).ceil();
    m.max(1.0) as usize
}

/// `sum_{n <= nmax} a_n / n q^n` with `q = exp(2 pi i tau)`; errors unless
/// the tail is certified below `TAIL_BOUND`.
pub fn modular_param(f: &NewformCoefficients, tau: Complex64) -> Result<Complex64, HeegnerError> {
    let needed = terms_needed(tau);
    if needed > f.nmax() {
        return Err(HeegnerError::InsufficientTerms {
            needed,
            allowed: f.nmax(),
        });
    }
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let mut qn = q;
    let terms: Vec<Complex64> = (1..=f.nmax())
        .map(|n| {
            let t = qn * (f.get(n) as f64 / n as f64);
            qn *= q;
            t
        })
        .collect();
    Ok(pairwise_sum(&terms))
}

fn pairwise_sum(v: &[Complex64]) -> Complex64 {
    match v.len() {
        0 => Complex64::zero(),
        1 => v[0],
        n => pairwise_sum(&v[..n / 2]) + pairwise_sum(&v[n / 2..]),
    }
}

fn agm(mut a: Complex64, mut b: Complex64) -> Complex64 {
    for _ in 0..64 {
        let (na, nb) = ((a + b) / 2.0, (a * b).sqrt());
        // keep the right branch: |a - b| <= |a + b|
        let nb = if (na - nb).norm() > (na + nb).norm() { -nb } else { nb };
        if (na - a).norm() <= 1e-16 * na.norm() {
            return na;
        }
        a = na;
        b = nb;
    }
    a
}

/// Roots of the real cubic `4X^3 - g2 X - g3`.
fn cubic_roots(g2: f64, g3: f64) -> Vec<Complex64> {
    // depressed cubic X^3 + pX + q with p = -g2/4, q = -g3/4
    let (p, q) = (-g2 / 4.0, -g3 / 4.0);
    let disc = -(4.0 * p * p * p + 27.0 * q * q);
    if disc > 0.0 {
        let m = 2.0 * (-p / 3.0).sqrt();
        let theta = (3.0 * q / (p * m)).acos() / 3.0;
        let mut r: Vec<f64> = (0..3)
            .map(|k| m * (theta - 2.0 * PI * k as f64 / 3.0).cos())
            .collect();
        r.sort_by(|a, b| b.partial_cmp(a).unwrap());
        r.into_iter().map(|x| Complex64::new(x, 0.0)).collect()
    } else {
        let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
        let e1 = (-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt();
        // remaining roots of X^2 + e1 X + (e1^2 + p)
        let im = (3.0 * e1 * e1 + 4.0 * p).sqrt() / 2.0;
        vec![
            Complex64::new(e1, 0.0),
            Complex64::new(-e1 / 2.0, im),
            Complex64::new(-e1 / 2.0, -im),
        ]
    }
}

/// An oriented basis of the period lattice of `dx / (2y + a1 x + a3)`.
#[derive(Debug, Clone, Copy)]
pub struct PeriodLattice {
    pub omega1: Complex64,
    pub omega2: Complex64,
    /// `g2 = c4 / 12`, `g3 = c6 / 216` of `Y^2 = 4X^3 - g2 X - g3`.
    pub g2: f64,
    pub g3: f64,
    /// Shift `X = x + b2/12`.
    b2: f64,
    a1: f64,
    a3: f64,
}

fn to_f64(n: &BigInt) -> f64 {
    n.to_f64().expect("coefficient fits in f64")
}

impl PeriodLattice {
    /// Periods by the arithmetic-geometric mean, then Gauss-reduced.
    pub fn new(e: &CurveQ) -> Self {
        let g2 = to_f64(&e.c4()) / 12.0;
        let g3 = to_f64(&e.c6()) / 216.0;
        let r = cubic_roots(g2, g3);
        let (w1, w2) = if r[1].im == 0.0 {
            let (e1, e2, e3) = (r[0], r[1], r[2]);
            (
                Complex64::from(PI) / agm((e1 - e3).sqrt(), (e1 - e2).sqrt()),
                Complex64::i() * PI / agm((e1 - e3).sqrt(), (e2 - e3).sqrt()),
            )
        } else {
            let e1 = r[0].re;
            let beta = (3.0 * e1 * e1 - g2 / 4.0).sqrt();
            let w1 = 2.0 * PI / agm(Complex64::from(2.0 * beta.sqrt()), Complex64::from((2.0 * beta + 3.0 * e1).sqrt())).re;
            let w2 = Complex64::new(-w1 / 2.0, PI / agm(Complex64::from(2.0 * beta.sqrt()), Complex64::from((2.0 * beta - 3.0 * e1).sqrt())).re);
            (Complex64::from(w1), w2)
        };
        let (omega1, omega2) = gauss_reduce(w1, w2);
        PeriodLattice {
            omega1,
            omega2,
            g2,
            g3,
            b2: to_f64(&e.b2()),
            a1: to_f64(e.a1()),
            a3: to_f64(e.a3()),
        }
    }

    pub fn tau(&self) -> Complex64 {
        self.omega2 / self.omega1
    }

    /// Representative of `z` mod the lattice in the fundamental parallelogram
    /// centred at 0.
    pub fn reduce(&self, z: Complex64) -> Complex64 {
        let u = z / self.omega1;
        let tau = self.tau();
        let t = u.im / tau.im;
        let s = u.re - t * tau.re;
        z - self.omega1 * s.round() - self.omega2 * t.round()
    }

    /// `(wp(z), wp'(z))` by q-expansions with `terms` terms.
    pub fn weierstrass(&self, z: Complex64, terms: usize) -> (Complex64, Complex64) {
        let z = self.reduce(z);
        let tpi = Complex64::i() * 2.0 * PI / self.omega1;
        let q = (Complex64::i() * 2.0 * PI * self.tau()).exp();
        let w = (tpi * z).exp();
        let winv = w.inv();
        let f2 = |x: Complex64| x / ((1.0 - x) * (1.0 - x));
        let f3 = |x: Complex64| x * (1.0 + x) / ((1.0 - x) * (1.0 - x) * (1.0 - x));
        let mut wp = Complex64::from(1.0 / 12.0) + f2(w);
        let mut dwp = f3(w);
        let mut qn = Complex64::from(1.0);
        for _ in 0..terms {
            qn *= q;
            wp += f2(qn * w) + f2(qn * winv) - 2.0 * f2(qn);
            dwp += f3(qn * w) - f3(qn * winv);
        }
        (tpi * tpi * wp, tpi * tpi * tpi * dwp)
    }

    /// The point of `E(C)` at `z`, or `None` at a lattice point.
    pub fn point(&self, z: Complex64) -> Option<(Complex64, Complex64)> {
        let r = self.reduce(z);
        if r.norm() < 1e-7 * self.omega1.norm() {
            return None;
        }
        let (wp, dwp) = self.weierstrass(r, 60);
        let x = wp - self.b2 / 12.0;
        let y = (dwp - self.a1 * x - self.a3) / 2.0;
        Some((x, y))
    }
}

fn gauss_reduce(mut w1: Complex64, mut w2: Complex64) -> (Complex64, Complex64) {
    if (w2 / w1).im < 0.0 {
        w2 = -w2;
    }
    loop {
        let m = (w2 / w1).re.round();
        w2 -= w1 * m;
        if w2.norm() < w1.norm() - 1e-15 * w1.norm() {
            (w1, w2) = (w2, -w1);
        } else {
            return (w1, w2);
        }
    }
}

/// Continued-fraction convergents of `r` with denominator at most `bound`
/// that lie within `tol` of `r`, in order of increasing denominator.
fn convergents_within(r: f64, bound: u64, tol: f64) -> Vec<BigRational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    let mut x = r;
    for _ in 0..64 {
        let a = x.floor();
        if a.abs() > 1e15 {
            break;
        }
        let ai = a as i128;
        (h0, h1) = (h1, ai * h1 + h0);
        (k0, k1) = (k1, ai * k1 + k0);
        if k1 > bound as i128 {
            break;
        }
        if (r - h1 as f64 / k1 as f64).abs() <= tol {
            out.push(BigRational::new(h1.into(), k1.into()));
        }
        let frac = x - a;
        if frac.abs() < 1e-300 {
            break;
        }
        x = 1.0 / frac;
    }
    out
}

/// The first continued-fraction convergent of `r` with denominator at most
/// `bound` that is within `tol` of `r`.
pub fn rational_approx(r: f64, bound: u64, tol: f64) -> Option<BigRational> {
    convergents_within(r, bound, tol).into_iter().next()
}

/// Candidate elements `u + v sqrt D` near `v`, simplest first.
fn coord_candidates(v: Complex64, k: QuadExt, bound: u64) -> Vec<KElem> {
    let s = (k.radicand().unsigned_abs() as f64).sqrt();
    let tol = |t: f64| 1e-6 * t.abs().max(1.0);
    let us = convergents_within(v.re, bound, tol(v.re));
    let vs = convergents_within(v.im / s, bound, tol(v.im / s));
    let mut out = Vec::new();
    for u in &us {
        for w in &vs {
            out.push(KElem::new(u.clone(), w.clone(), k));
        }
    }
    out
}

/// Writes `x` as `(u + v sqrt D) / w`, then takes `y` either the same way
/// or, when its denominator is past the bound, as the exact root of the
/// curve equation nearest the numerical value. The result is accepted only
/// if it lies exactly on the curve.
pub fn recognize(
    e: &CurveQ,
    x: Complex64,
    y: Complex64,
    k: QuadExt,
    bound: u64,
) -> Result<PointK, HeegnerError> {
    let fail = || HeegnerError::Recognition { x, y, field: k };
    let ys = coord_candidates(y, k, bound);
    for kx in coord_candidates(x, k, bound) {
        for ky in &ys {
            if let Ok(p) = e.point(kx.clone(), ky.clone()) {
                return Ok(p);
            }
        }
        if let Some(ky) = y_from_x(e, &kx, y, k) {
            // the root must also match the numerical y
            if (to_complex(&ky, k) - y).norm() <= 1e-6 * y.norm().max(1.0) {
                if let Ok(p) = e.point(kx, ky) {
                    return Ok(p);
                }
            }
        }
    }
    Err(fail())
}

fn to_complex(v: &KElem, k: QuadExt) -> Complex64 {
    let f = |q: &BigRational| q.to_f64().unwrap_or(f64::NAN);
    let s = Complex64::from(k.radicand() as f64).sqrt();
    f(&v.a) + s * f(&v.b)
}

/// `(2y + a1 x + a3)^2 = 4x^3 + b2 x^2 + 2 b4 x + b6`, solved in `K`.
fn y_from_x(e: &CurveQ, x: &KElem, y: Complex64, k: QuadExt) -> Option<KElem> {
    let c = |n: BigInt| KElem::from_bigint(&n);
    let x2 = x.try_mul(x).ok()?;
    let rhs = [
        c(BigInt::from(4)).try_mul(&x2.try_mul(x).ok()?).ok()?,
        c(e.b2()).try_mul(&x2).ok()?,
        c(2 * e.b4()).try_mul(x).ok()?,
        c(e.b6()),
    ]
    .iter()
    .try_fold(KElem::from_int(0), |acc, t| acc.try_add(t).ok())?;
    let root = rhs.sqrt_in(k)?;
    let shift = c(e.a1().clone()).try_mul(x).ok()?.try_add(&c(e.a3().clone())).ok()?;
    let half = KElem::rational(BigRational::new(1.into(), 2.into()));
    [root.clone(), root.neg()]
        .into_iter()
        .filter_map(|r| r.try_sub(&shift).ok()?.try_mul(&half).ok())
        .min_by(|a, b| {
            let da = (to_complex(a, k) - y).norm();
            let db = (to_complex(b, k) - y).norm();
            da.total_cmp(&db)
        })
}

/// The complex point `(x, y)` for `z` on `E`, with `None` for the origin.
pub fn lattice_and_point(e: &CurveQ, z: Complex64) -> Option<(Complex64, Complex64)> {
    PeriodLattice::new(e).point(z)
}

/// The Heegner point of discriminant `d_K` on `E`, traced down to `K` by
/// summing over one form per ideal class. Defined up to sign and torsion.
pub fn compute_heegner_point(
    e: &CurveQ,
    k: QuadExt,
    nmax: Option<usize>,
    denominator_bound: u64,
) -> Result<PointK, HeegnerError> {
    let n = e
        .conductor()
        .ok_or_else(|| HeegnerError::UnknownConductor(e.display_label()))?;
    let forms = heegner_orbit(n, k)?;
    let needed = forms.iter().map(|f| terms_needed(f.tau())).max().unwrap_or(1);
    let terms = nmax.unwrap_or(needed);
    if terms > MAX_TERMS {
        return Err(HeegnerError::Budget(terms));
    }
    let coeffs = newform_coefficients(e, terms)?;
    let mut z = Complex64::zero();
    for f in &forms {
        z += modular_param(&coeffs, f.tau())?;
    }
    match lattice_and_point(e, z) {
        None => Ok(Point::Infinity),
        Some((x, y)) => recognize(e, x, y, k, denominator_bound),
    }
}

/// `E_4` and `E_6` at `tau`, for checking lattice invariants.
pub fn eisenstein(tau: Complex64, terms: usize) -> (Complex64, Complex64) {
    let q = (Complex64::i() * 2.0 * PI * tau).exp();
    let (mut e4, mut e6) = (Complex64::from(1.0), Complex64::from(1.0));
    let mut qn = Complex64::from(1.0);
    for n in 1..=terms {
        qn *= q;
        let (mut s3, mut s5) = (0f64, 0f64);
        for d in 1..=n {
            if n % d == 0 {
                s3 += (d as f64).powi(3);
                s5 += (d as f64).powi(5);
            }
        }
        e4 += qn * 240.0 * s3;
        e6 -= qn * 504.0 * s5;
    }
    (e4, e6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::tests::{e256a1, e256b1};
    use crate::curves::rational_two_torsion;
    use crate::formal_log::check_star;

    fn qm7() -> QuadExt {
        QuadExt::new(-7).unwrap()
    }

    fn e11() -> CurveQ {
        CurveQ::from_ints([0, -1, 1, -10, -20]).unwrap().with_conductor(11)
    }

    fn e37() -> CurveQ {
        CurveQ::from_ints([0, 0, 1, -1, 0]).unwrap().with_conductor(37)
    }

    #[test]
    fn coefficients() {
        let f = newform_coefficients(&e256b1(), 3000).unwrap();
        assert_eq!(f.get(1), 1);
        assert_eq!(f.get(3), 0);
        assert_eq!(f.get(5), -4);
        assert_eq!(f.get(15), f.get(3) * f.get(5));
        // 11a1: q - 2q^2 - q^3 + 2q^4 + q^5 + 2q^6 - 2q^7 ...
        let g = newform_coefficients(&e11(), 20).unwrap();
        let want = [1, -2, -1, 2, 1, 2, -2, 0, -2, -2];
        assert_eq!((1..=10).map(|n| g.get(n)).collect::<Vec<_>>(), want);
        for f in [f, newform_coefficients(&e37(), 3000).unwrap()] {
            for m in 1..=60usize {
                for n in 1..=50usize {
                    if m * n <= f.nmax() && m.gcd(&n) == 1 {
                        assert_eq!(f.get(m * n), f.get(m) * f.get(n));
                    }
                }
            }
            for p in arith::primes_in_range(3, 3000).unwrap() {
                let p = p as usize;
                if p != 37 {
                    assert!((f.get(p) as f64).abs() <= 2.0 * (p as f64).sqrt());
                    if p * p <= f.nmax() {
                        assert_eq!(f.get(p * p), f.get(p) * f.get(p) - p as i64);
                    }
                }
            }
        }
        assert!(matches!(newform_coefficients(&e11(), MAX_TERMS + 1), Err(HeegnerError::Budget(_))));
    }

    #[test]
    fn heegner_forms() {
        let (f, tau) = heegner_tau(256, qm7()).unwrap();
        assert_eq!(f.a, 256);
        assert_eq!(f.b % 2, 1);
        assert_eq!((f.b * f.b + 7) % 1024, 0);
        assert_eq!(f.discriminant(), -7);
        assert!(tau.im > 0.0);
        assert!((tau.norm_sqr() - f.c as f64 / f.a as f64).abs() < 1e-12);
        let (f, _) = heegner_tau(36, QuadExt::new(-23).unwrap()).unwrap();
        assert_eq!((f.b * f.b + 23) % 144, 0);
        assert!(heegner_tau(256, QuadExt::new(-5).unwrap()).is_err());
        // 11 is inert in Q(i)
        assert!(heegner_tau(11, QuadExt::new(-1).unwrap()).is_err());
        assert!(heegner_tau(11, QuadExt::new(2).unwrap()).is_err());
    }

    #[test]
    fn class_groups() {
        assert_eq!(reduced_forms(-7).len(), 1);
        assert_eq!(reduced_forms(-20).len(), 2);
        assert_eq!(reduced_forms(-23).len(), 3);
        assert_eq!(reduced_forms(-56).len(), 4);
        assert_eq!(reduced_forms(-71).len(), 7);
        let orbit = heegner_orbit(37, QuadExt::new(-10).unwrap()).unwrap();
        assert_eq!(orbit.len(), 2);
        for f in &orbit {
            assert_eq!(f.a % 37, 0);
            assert_eq!(f.discriminant(), -40);
            assert_eq!((f.b - orbit[0].b).rem_euclid(74), 0);
        }
        assert!(matches!(heegner_orbit(11, QuadExt::new(-79).unwrap()), Err(HeegnerError::ClassNumber(5))));
    }

    #[test]
    fn parametrization_series() {
        let f = newform_coefficients(&e11(), 400).unwrap();
        let tau = Complex64::new(0.1, 3.0);
        let q = (Complex64::i() * 2.0 * PI * tau).exp();
        let z = modular_param(&f, tau).unwrap();
        assert!((z - q).norm() < 2.0 * q.norm_sqr());
        let conj = modular_param(&f, Complex64::new(-tau.re, tau.im)).unwrap();
        assert!((conj - z.conj()).norm() < 1e-15);
        let (form, tau) = heegner_tau(11, QuadExt::new(-2).unwrap()).unwrap();
        let _ = form;
        let m = terms_needed(tau);
        let short = newform_coefficients(&e11(), m).unwrap();
        let long = newform_coefficients(&e11(), 2 * m).unwrap();
        let d = modular_param(&short, tau).unwrap() - modular_param(&long, tau).unwrap();
        assert!(d.norm() < 1e-9);
        let too_short = newform_coefficients(&e11(), m / 2).unwrap();
        assert!(matches!(modular_param(&too_short, tau), Err(HeegnerError::InsufficientTerms { .. })));
    }

    #[test]
    fn lattice_invariants() {
        for e in [e256a1(), e256b1(), e11(), e37(), CurveQ::from_ints([1, -1, 1, -3, 3]).unwrap()] {
            let l = PeriodLattice::new(&e);
            assert!(l.tau().im > 0.8);
            let (e4, e6) = eisenstein(l.tau(), 40);
            let s = 2.0 * PI / l.omega1;
            let g2 = s.powi(4) * e4 / 12.0;
            let g3 = s.powi(6) * e6 / 216.0;
            assert!((g2 - l.g2).norm() < 1e-8 * l.g2.abs().max(1.0), "{}", e.display_label());
            assert!((g3 - l.g3).norm() < 1e-8 * l.g3.abs().max(1.0), "{}", e.display_label());
            // the half period lands on a root of the 2-division polynomial
            let (x, y) = l.point(l.omega1 / 2.0).unwrap();
            let g = 4.0 * x * x * x + to_f64(&e.b2()) * x * x + 2.0 * to_f64(&e.b4()) * x + to_f64(&e.b6());
            assert!(g.norm() < 1e-8 * (1.0 + x.norm().powi(3)));
            let _ = y;
            // points satisfy the equation and more q-terms change nothing
            let z = Complex64::new(0.3, 0.17) * l.omega1 + l.omega2 * 0.21;
            let (x, y) = l.point(z).unwrap();
            let c = |n: &BigInt| to_f64(n);
            let lhs = y * y + c(e.a1()) * x * y + c(e.a3()) * y;
            let rhs = x * x * x + c(e.a2()) * x * x + c(e.a4()) * x + c(e.a6());
            assert!((lhs - rhs).norm() < 1e-8 * (1.0 + rhs.norm()));
            let (a, _) = l.weierstrass(z, 30);
            let (b, _) = l.weierstrass(z, 60);
            assert!((a - b).norm() < 1e-9 * a.norm());
        }
        assert!(lattice_and_point(&e11(), Complex64::zero()).is_none());
    }

    #[test]
    fn rational_recognition() {
        let r = rational_approx(-17.0 / 29.0 + 1e-12, 10_000, 1e-9).unwrap();
        assert_eq!(r, BigRational::new((-17).into(), 29.into()));
        assert!(rational_approx(std::f64::consts::PI, 100, 1e-9).is_none());
    }

    /// `p` equals `q` up to sign and rational 2-torsion.
    fn same_up_to_sign_and_torsion(e: &CurveQ, p: &PointK, q: &PointK) -> bool {
        let mut cands = vec![q.clone(), e.neg(q)];
        for t in rational_two_torsion(e) {
            cands.push(e.add(q, &t).unwrap());
            cands.push(e.add(&e.neg(q), &t).unwrap());
        }
        cands.contains(p)
    }

    #[test]
    fn heegner_point_256b1() {
        let e = e256b1();
        let p = compute_heegner_point(&e, qm7(), None, DEFAULT_DENOMINATOR_BOUND).unwrap();
        let want = e.point(KElem::from_int(-1), KElem::from_int(-1)).unwrap();
        assert!(same_up_to_sign_and_torsion(&e, &p, &want), "{p}");
        assert!(check_star(&e, qm7(), &p).unwrap().holds);
    }

    #[test]
    fn heegner_point_256a1() {
        let e = e256a1();
        let p = compute_heegner_point(&e, qm7(), None, DEFAULT_DENOMINATOR_BOUND).unwrap();
        let want = e.point(KElem::from_int(0), KElem::from_int(1)).unwrap();
        assert!(same_up_to_sign_and_torsion(&e, &p, &want), "{p}");
        assert!(check_star(&e, qm7(), &p).unwrap().holds);
    }

    #[test]
    fn recognizes_y_with_large_denominator() {
        // (2832489/6724, -4744432539/551368) on y^2 = x^3 - 1682x; the
        // y-denominator 82^3 is past the default bound
        let e = CurveQ::from_ints([0, 0, 0, -1682, 0]).unwrap();
        let x = Complex64::new(421.25059488397267, -1.3e-8);
        let y = Complex64::new(-8604.838400124012, 4.0e-7);
        let p = recognize(&e, x, y, qm7(), DEFAULT_DENOMINATOR_BOUND).unwrap();
        let want = e
            .point(
                KElem::rational(BigRational::new(2832489.into(), 6724.into())),
                KElem::rational(BigRational::new((-4744432539i64).into(), 551368.into())),
            )
            .unwrap();
        assert_eq!(p, want);
        assert!(recognize(&e, x + 0.01, y, qm7(), DEFAULT_DENOMINATOR_BOUND).is_err());
    }

    #[test]
    fn heegner_point_class_number_two() {
        let e = e37();
        let k = QuadExt::new(-10).unwrap();
        let p = compute_heegner_point(&e, k, None, DEFAULT_DENOMINATOR_BOUND).unwrap();
        assert!(e.contains(&p));
        assert!(!p.is_infinity());
    }
}

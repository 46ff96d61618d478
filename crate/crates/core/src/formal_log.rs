//! The formal group of a Weierstrass model, its invariant differential and
//! logarithm, and the 2-adic logarithm of a point defined over a quadratic
//! field in which 2 splits.
//!
//! In the parameter `t = -x/y` near the origin, `w = -1/y` is a power series
//! `t^3 (1 + ...)`, so `x = t^-2 / W` and `y = -t^-3 / W` with `w = t^3 W`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use thiserror::Error;

use crate::curves::{reduction_data, count_points, CurveError, CurveQ, KElem, Point, PointK, QuadExt};
use crate::padics::{self, Padic, PadicError};

/// A power series in `t` known modulo `t^order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SeriesQ {
    coeffs: Vec<BigRational>,
}

impl SeriesQ {
    pub fn zero(order: usize) -> Self {
        SeriesQ {
            coeffs: vec![BigRational::zero(); order],
        }
    }

    pub fn one(order: usize) -> Self {
        let mut s = Self::zero(order);
        if order > 0 {
            s.coeffs[0] = BigRational::one();
        }
        s
    }

    /// `t^k` truncated to `order`.
    pub fn monomial(k: usize, order: usize) -> Self {
        let mut s = Self::zero(order);
        if k < order {
            s.coeffs[k] = BigRational::one();
        }
        s
    }

    pub fn from_coeffs(coeffs: Vec<BigRational>) -> Self {
        SeriesQ { coeffs }
    }

    pub fn order(&self) -> usize {
        self.coeffs.len()
    }

    /// Coefficient of `t^i`.
    pub fn coeff(&self, i: usize) -> &BigRational {
        &self.coeffs[i]
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn truncate(&self, order: usize) -> Self {
        SeriesQ {
            coeffs: self.coeffs[..order.min(self.order())].to_vec(),
        }
    }

    pub fn add(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        SeriesQ {
            coeffs: (0..n).map(|i| &self.coeffs[i] + &o.coeffs[i]).collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        self.add(&o.scale(&-BigRational::one()))
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        SeriesQ {
            coeffs: self.coeffs.iter().map(|a| a * c).collect(),
        }
    }

    pub fn scale_int(&self, c: &BigInt) -> Self {
        self.scale(&BigRational::from_integer(c.clone()))
    }

    /// Multiplies by `t^k`, keeping the order.
    pub fn shift(&self, k: usize) -> Self {
        let n = self.order();
        let mut out = Self::zero(n);
        for i in 0..n.saturating_sub(k) {
            out.coeffs[i + k] = self.coeffs[i].clone();
        }
        out
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.order().min(o.order());
        let mut out = Self::zero(n);
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for j in 0..n - i {
                out.coeffs[i + j] += a * &o.coeffs[j];
            }
        }
        out
    }

    /// Multiplicative inverse; `None` when the constant term vanishes.
    pub fn inv(&self) -> Option<Self> {
        let n = self.order();
        let c0 = self.coeffs.first()?;
        if c0.is_zero() {
            return None;
        }
        let inv0 = c0.recip();
        let mut out = Self::zero(n);
        out.coeffs[0] = inv0.clone();
        for k in 1..n {
            let mut acc = BigRational::zero();
            for j in 1..=k {
                acc += &self.coeffs[j] * &out.coeffs[k - j];
            }
            out.coeffs[k] = -acc * &inv0;
        }
        Some(out)
    }

    pub fn derivative(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n.saturating_sub(1));
        for i in 1..n {
            out.coeffs[i - 1] = &self.coeffs[i] * BigRational::from_integer(BigInt::from(i));
        }
        out
    }

    /// Termwise integral with zero constant term.
    pub fn integral(&self) -> Self {
        let n = self.order();
        let mut out = Self::zero(n + 1);
        for i in 0..n {
            out.coeffs[i + 1] = &self.coeffs[i] / BigRational::from_integer(BigInt::from(i + 1));
        }
        out
    }

    /// Substitutes a series `s` with zero constant term.
    pub fn compose(&self, s: &Self) -> Self {
        assert!(s.coeffs.first().map_or(true, |c| c.is_zero()));
        let n = self.order().min(s.order());
        let mut out = Self::zero(n);
        let mut power = Self::one(n);
        for i in 0..n {
            if !self.coeffs[i].is_zero() {
                out = out.add(&power.scale(&self.coeffs[i]));
            }
            power = power.mul(s);
        }
        out
    }

    /// Evaluates at `t` with `v(t) >= 1`, dropping the terms past the order.
    /// The caller is responsible for the size of the discarded tail.
    pub fn eval_padic(&self, t: &Padic, rel_prec: u32) -> Padic {
        let p = t.prime();
        let mut acc = Padic::zero(p);
        let mut tp = Padic::from_int(&BigInt::one(), p, rel_prec.max(t.relative_precision()));
        for c in &self.coeffs {
            if !c.is_zero() {
                acc = acc.add(&Padic::from_rational(c, p, rel_prec).mul(&tp));
            }
            tp = tp.mul(t);
        }
        acc
    }
}

impl fmt::Display for SeriesQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{c}")?,
                1 => write!(f, "{c}*t")?,
                _ => write!(f, "{c}*t^{i}")?,
            }
        }
        if first {
            f.write_str("0")?;
        }
        write!(f, " + O(t^{})", self.order())
    }
}

/// `w(t)`, `x(t)` and `y(t)`. The last two are Laurent series, stored
/// multiplied by `t^2` and `t^3` respectively (so `x_scaled = 1/W = -y_scaled`).
#[derive(Debug, Clone)]
pub struct FormalExpansion {
    pub w: SeriesQ,
    /// `t^2 * x(t)`.
    pub x_scaled: SeriesQ,
    /// `t^3 * y(t)`.
    pub y_scaled: SeriesQ,
}

/// Solves `w = t^3 + a1 t w + a2 t^2 w + a3 w^2 + a4 t w^2 + a6 w^3` modulo `t^n`.
pub fn formal_expansion(e: &CurveQ, n: usize) -> FormalExpansion {
    assert!(n >= 4, "order must be at least 4");
    let [a1, a2, a3, a4, a6] = e.coefficients().clone();
    // coefficient k of w only involves lower coefficients, so solve in order
    let mut w = vec![BigInt::zero(); n];
    let mut w2 = vec![BigInt::zero(); n];
    w[3] = BigInt::one();
    let sq_coeff = |w: &[BigInt], k: usize| -> BigInt {
        (0..=k).map(|i| &w[i] * &w[k - i]).sum()
    };
    for k in 4..n {
        // w^2 has order 6, so its coefficients up to k - 1 are already final
        for j in 0..k {
            w2[j] = sq_coeff(&w, j);
        }
        let cube: BigInt = (3..=k.saturating_sub(6)).map(|i| &w[i] * &w2[k - i]).sum();
        let mut c = &a1 * &w[k - 1] + &a2 * &w[k - 2] + &a4 * &w2[k - 1] + &a6 * cube;
        // [t^k] w^2 uses w_i with i <= k - 3
        c += &a3 * sq_coeff(&w, k);
        w[k] = c;
    }
    let w = SeriesQ::from_coeffs(w.into_iter().map(BigRational::from_integer).collect());
    // W = w / t^3 is known to order n - 3
    let big_w = SeriesQ::from_coeffs(w.coeffs()[3..].to_vec());
    let u = big_w.inv().expect("W has constant term 1");
    FormalExpansion {
        w,
        x_scaled: u.clone(),
        y_scaled: u.scale(&-BigRational::one()),
    }
}

/// The invariant differential `dx / (2y + a1 x + a3)` as a series in `t`
/// (coefficient series of `dt`), known modulo `t^(n - 3)`.
pub fn invariant_differential(e: &CurveQ, n: usize) -> SeriesQ {
    let fe = formal_expansion(e, n);
    let u = fe.x_scaled;
    let order = u.order();
    let t = SeriesQ::monomial(1, order);
    let two = BigRational::from_integer(BigInt::from(2));
    // multiply numerator and denominator by t^3
    let num = t.mul(&u.derivative()).sub(&u.scale(&two).truncate(order - 1));
    let den = u
        .scale(&-two)
        .add(&t.mul(&u).scale_int(e.a1()))
        .add(&SeriesQ::monomial(3, order).scale_int(e.a3()));
    num.mul(&den.inv().expect("leading term -2"))
}

/// The formal logarithm `t + ...` modulo `t^n`.
pub fn formal_log_series(e: &CurveQ, n: usize) -> SeriesQ {
    assert!(n >= 2);
    // the differential loses 4 orders (3 from W, 1 from the derivative)
    invariant_differential(e, n + 4).truncate(n - 1).integral()
}

#[derive(Debug, Error)]
pub enum LogError {
    #[error("2 does not split in {0}")]
    NotSplit(QuadExt),
    #[error("point coordinates are not in {0}")]
    WrongField(QuadExt),
    #[error("no multiple mP with m <= {0} lies in the formal group")]
    NoAdmissibleMultiple(u32),
    #[error("precision exhausted after raising working precision to {0}")]
    PrecisionExhausted(u32),
    #[error(transparent)]
    Curve(#[from] CurveError),
    #[error(transparent)]
    Padic(#[from] PadicError),
}

/// Which of the two embeddings `K -> Q_2` to use.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Embedding {
    #[default]
    Canonical,
    Conjugate,
}

#[derive(Debug, Clone, Copy)]
pub struct LogOptions {
    /// Absolute 2-adic precision of the returned logarithm.
    pub precision: u32,
    pub m_max: u32,
    pub embedding: Embedding,
}

impl Default for LogOptions {
    fn default() -> Self {
        LogOptions {
            precision: padics::DEFAULT_PRECISION,
            m_max: 64,
            embedding: Embedding::Canonical,
        }
    }
}

fn embed_with(x: &KElem, prec: u32, emb: Embedding) -> Result<Padic, PadicError> {
    match emb {
        Embedding::Canonical => padics::embed(x, 2, prec),
        Embedding::Conjugate => padics::embed_conjugate(x, 2, prec),
    }
}

fn check_field(p: &PointK, k: QuadExt) -> Result<(), LogError> {
    if let Point::Affine(x, y) = p {
        for c in [x, y] {
            if !c.is_rational() && c.radicand() != k.radicand() {
                return Err(LogError::WrongField(k));
            }
        }
    }
    Ok(())
}

/// Evaluates the logarithm at a formal-group parameter `t` with `v(t) >= 1`,
/// correct to absolute precision `target`.
pub fn log_at_parameter(e: &CurveQ, t: &Padic, target: i64) -> Padic {
    let s = t.valuation().unwrap_or(target.max(1));
    assert!(s >= 1, "parameter outside the formal group");
    // v(c_j t^j) >= j s - floor(log2 j), nondecreasing in j
    let mut n = 1usize;
    while (n as i64) * s - (usize::BITS - 1 - n.leading_zeros()) as i64 <= target {
        n += 1;
    }
    let series = formal_log_series(e, n.max(2));
    let rel = (target + 4).max(1) as u32;
    series.eval_padic(t, rel).truncate_abs(target)
}

/// `log_omega(P)` in `Q_2`, where `P` has coordinates in `K` and 2 splits in `K`.
pub fn padic_log_point(e: &CurveQ, p: &PointK, k: QuadExt, precision: u32) -> Result<Padic, LogError> {
    padic_log_point_with(
        e,
        p,
        k,
        &LogOptions {
            precision,
            ..LogOptions::default()
        },
    )
}

pub fn padic_log_point_with(
    e: &CurveQ,
    p: &PointK,
    k: QuadExt,
    opts: &LogOptions,
) -> Result<Padic, LogError> {
    if !k.splits(2) {
        return Err(LogError::NotSplit(k));
    }
    e.check_minimal_at(2)?;
    check_field(p, k)?;
    if !e.contains(p) {
        return Err(CurveError::NotOnCurve.into());
    }
    let mut q = p.clone();
    let mut m = 1u32;
    let (x, y) = loop {
        let (x, y) = match &q {
            Point::Infinity => return Ok(Padic::zero(2)),
            Point::Affine(x, y) => (x.clone(), y.clone()),
        };
        let ex = embed_with(&x, 64, opts.embedding)?;
        if ex.valuation().is_some_and(|v| v <= -2) {
            break (x, y);
        }
        if m == opts.m_max {
            return Err(LogError::NoAdmissibleMultiple(opts.m_max));
        }
        q = e.add(&q, p)?;
        m += 1;
    };
    // a point of E_1(Q_2) can only be torsion if it has order 2
    if e.scalar_mul(&q, 2)?.is_infinity() {
        return Ok(Padic::zero(2));
    }
    let vm = m.trailing_zeros() as i64;
    let target = opts.precision as i64 + vm;
    let mut eprec = opts.precision + 16;
    loop {
        let ex = embed_with(&x, eprec, opts.embedding)?;
        let ey = embed_with(&y, eprec, opts.embedding)?;
        let t = ex.neg().div(&ey)?;
        if (t.relative_precision() as i64) >= target + 4 {
            let log_mp = log_at_parameter(e, &t, target);
            let m_adic = Padic::from_int(&BigInt::from(m), 2, 64);
            let out = log_mp.div(&m_adic)?;
            return Ok(out.truncate_abs(opts.precision as i64));
        }
        if eprec > 4096 {
            return Err(LogError::PrecisionExhausted(eprec));
        }
        eprec *= 2;
    }
}

/// Outcome of the criterion check at 2.
#[derive(Debug, Clone)]
pub struct StarReport {
    pub field: QuadExt,
    pub two_splits: bool,
    pub nonsingular_count_at_2: u64,
    /// `None` when the logarithm is exactly zero or was not computed.
    pub log_valuation: Option<i64>,
    pub product_valuation: Option<i64>,
    pub holds: bool,
    pub assumptions: Vec<&'static str>,
}

impl fmt::Display for StarReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let v = |o: Option<i64>| o.map_or("inf".to_string(), |v| v.to_string());
        write!(
            f,
            "K={} 2-splits={} ns_count_2={} v2(log)={} v2(count*log)={} star={}",
            self.field,
            self.two_splits,
            self.nonsingular_count_at_2,
            v(self.log_valuation),
            v(self.product_valuation),
            self.holds
        )?;
        for a in &self.assumptions {
            write!(f, " [assumes {a}]")?;
        }
        Ok(())
    }
}

pub const MANIN_ASSUMPTION: &str = "Manin constant 1 (omega is the Neron differential of the stored model)";

/// `|E^ns(F_2)|` of the stored model.
pub fn nonsingular_count_at_2(e: &CurveQ) -> Result<u64, CurveError> {
    match e.conductor() {
        Some(n) if n % 2 == 0 => Ok(reduction_data(e, 2)?.nonsingular_count),
        _ => count_points(e, 2),
    }
}

/// The criterion: 2 splits in `K` and `v_2(|E^ns(F_2)| * log(P)) = 1`.
pub fn check_star(e: &CurveQ, k: QuadExt, p: &PointK) -> Result<StarReport, LogError> {
    check_star_with(e, k, p, &LogOptions::default())
}

pub fn check_star_with(
    e: &CurveQ,
    k: QuadExt,
    p: &PointK,
    opts: &LogOptions,
) -> Result<StarReport, LogError> {
    let count = nonsingular_count_at_2(e)?;
    let mut report = StarReport {
        field: k,
        two_splits: k.splits(2),
        nonsingular_count_at_2: count,
        log_valuation: None,
        product_valuation: None,
        holds: false,
        assumptions: vec![MANIN_ASSUMPTION],
    };
    if !report.two_splits {
        return Ok(report);
    }
    let mut opts = *opts;
    let log = loop {
        let log = padic_log_point_with(e, p, k, &opts)?;
        // an inexact zero with too few digits cannot settle the valuation
        if log.is_exact_zero() || log.valuation().is_some() || log.abs_precision() >= 2 {
            break log;
        }
        opts.precision *= 2;
        if opts.precision > 512 {
            return Err(LogError::PrecisionExhausted(opts.precision));
        }
    };
    let vc = crate::arith::valuation(&BigInt::from(count), 2) as i64;
    report.log_valuation = log.valuation();
    report.product_valuation = log.valuation().map(|v| v + vc);
    report.holds = report.product_valuation == Some(1);
    Ok(report)
}

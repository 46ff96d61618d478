//! Sieves of primes `l` whose twists `E^(±l)` satisfy the Heegner-point
//! criterion, the three equivalent forms of the mod 4 point-count
//! condition, root numbers of prime twists, linear disjointness of
//! multiquadratic fields, and rank predictions.

use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use rayon::prelude::*;
use thiserror::Error;

use crate::arith::{self, kronecker};
use crate::curves::{
    count_points, has_no_rational_cyclic_4_isogeny, rational_two_torsion, two_isogeny,
    two_torsion_field, CurveError, CurveQ, PointK, QuadExt, RootNumber,
};
use crate::formal_log::check_star;

#[derive(Debug, Error)]
pub enum SieveError {
    #[error("{l} divides 2N")]
    BadPrime { l: u64 },
    #[error("conductor of {0} is not known")]
    UnknownConductor(String),
    #[error("{0} is outside the class: {1}")]
    OutsideClass(String, String),
    #[error("count and splitting descriptions disagree at l = {l}")]
    CrossCheckDisagreement { l: u64 },
    #[error("reciprocity forms of the root number disagree at l* = {lstar}")]
    ReciprocityMismatch { lstar: i64 },
    #[error("{0} is not squarefree")]
    NotSquarefree(i64),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

impl From<arith::ArithError> for SieveError {
    fn from(e: arith::ArithError) -> Self {
        SieveError::Curve(e.into())
    }
}

/// How membership in S is decided.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SMode {
    /// Split in K and `|E(F_l)| ≢ 0 (mod 4)`.
    #[default]
    Count,
    /// Split in K and inert in both `Q(E[2])` and `Q(E0[2])`.
    Lemma,
    /// Both, failing loudly on disagreement.
    CrossCheck,
}

/// `(-1)^((l-1)/2) l`.
pub fn lstar(l: u64) -> i64 {
    let l = l as i64;
    if l % 4 == 1 {
        l
    } else {
        -l
    }
}

/// Radicands of `Q(E[2])` and `Q(E0[2])` for a curve with exactly one
/// rational 2-torsion point and no rational cyclic 4-isogeny.
#[derive(Debug, Clone)]
pub struct LemmaOracle {
    curve: CurveQ,
    isogenous: CurveQ,
    pub e2_field: QuadExt,
    pub e0_field: QuadExt,
    /// Primes to avoid: those dividing `2N`, or `2 Δ Δ0` when N is unknown.
    bad: BigInt,
}

fn cubic_mod(e: &CurveQ, l: u64) -> [u64; 4] {
    let m = |n: BigInt| arith::bigint_mod_u64(&n, l);
    [m(BigInt::from(4)), m(e.b2()), m(2 * e.b4()), m(e.b6())]
}

fn count_cubic_roots(c: &[u64; 4], l: u64) -> usize {
    (0..l)
        .filter(|&x| {
            let v = ((c[0] * x % l + c[1]) % l * x % l + c[2]) % l * x % l + c[3];
            v % l == 0
        })
        .count()
}

impl LemmaOracle {
    pub fn new(e: &CurveQ) -> Result<Self, SieveError> {
        let outside = |why: &str| SieveError::OutsideClass(e.display_label(), why.to_string());
        let n_t = rational_two_torsion(e).len();
        if n_t != 1 {
            return Err(outside(&format!("{n_t} rational 2-torsion points")));
        }
        let e2_field = two_torsion_field(e)?
            .quadratic()
            .ok_or_else(|| outside("Q(E[2]) is not quadratic"))?;
        let isogenous = two_isogeny(e)?.codomain;
        let e0_field = two_torsion_field(&isogenous)?
            .quadratic()
            .ok_or_else(|| outside("E admits a rational cyclic 4-isogeny"))?;
        let bad = match e.conductor() {
            Some(n) => BigInt::from(2 * n),
            None => 2 * e.discriminant() * isogenous.discriminant(),
        };
        Ok(LemmaOracle {
            curve: e.clone(),
            isogenous,
            e2_field,
            e0_field,
            bad,
        })
    }

    /// `(|E(F_l)| ≢ 0 mod 4, E(F_l)[2] ≅ E0(F_l)[2] ≅ Z/2, l inert in both fields)`.
    pub fn check(&self, l: u64) -> Result<(bool, bool, bool), SieveError> {
        if arith::bigint_mod_u64(&self.bad, l) == 0 {
            return Err(SieveError::BadPrime { l });
        }
        let c1 = count_points(&self.curve, l)? % 4 != 0;
        let c2 = count_cubic_roots(&cubic_mod(&self.curve, l), l) == 1
            && count_cubic_roots(&cubic_mod(&self.isogenous, l), l) == 1;
        let c3 = self.e2_field.splitting(l) == -1 && self.e0_field.splitting(l) == -1;
        Ok((c1, c2, c3))
    }

    pub fn inert_in_both(&self, l: u64) -> bool {
        self.e2_field.splitting(l) == -1 && self.e0_field.splitting(l) == -1
    }
}

/// The three equivalent conditions at a single prime.
pub fn lemma_mod4_equiv(e: &CurveQ, l: u64) -> Result<(bool, bool, bool), SieveError> {
    LemmaOracle::new(e)?.check(l)
}

/// Everything the sieves need about `(E, K)`.
#[derive(Debug, Clone)]
pub struct SieveContext {
    pub curve: CurveQ,
    pub field: QuadExt,
    pub conductor: u64,
    /// Odd primes `q` with `q || N`.
    pub odd_exact: Vec<u64>,
    /// Present when the curve has the 2-torsion shape the lemma needs.
    pub lemma: Option<LemmaOracle>,
}

impl SieveContext {
    pub fn new(e: &CurveQ, k: QuadExt) -> Result<Self, SieveError> {
        let n = e
            .conductor()
            .ok_or_else(|| SieveError::UnknownConductor(e.display_label()))?;
        let odd_exact = arith::factor_u64(n)
            .into_iter()
            .filter(|&(q, a)| q != 2 && a == 1)
            .map(|(q, _)| q)
            .collect();
        Ok(SieveContext {
            curve: e.clone(),
            field: k,
            conductor: n,
            odd_exact,
            lemma: LemmaOracle::new(e).ok(),
        })
    }

    fn lemma(&self) -> Result<&LemmaOracle, SieveError> {
        match &self.lemma {
            Some(o) => Ok(o),
            None => Err(LemmaOracle::new(&self.curve).unwrap_err()),
        }
    }

    fn check_good(&self, l: u64) -> Result<(), SieveError> {
        if l == 2 || self.conductor % l == 0 {
            Err(SieveError::BadPrime { l })
        } else {
            Ok(())
        }
    }

    pub fn in_s(&self, l: u64, mode: SMode) -> Result<bool, SieveError> {
        self.check_good(l)?;
        if !self.field.splits(l) {
            return Ok(false);
        }
        let by_count = || -> Result<bool, SieveError> { Ok(count_points(&self.curve, l)? % 4 != 0) };
        match mode {
            SMode::Count => by_count(),
            SMode::Lemma => Ok(self.lemma()?.inert_in_both(l)),
            SMode::CrossCheck => {
                let a = by_count()?;
                if a != self.lemma()?.inert_in_both(l) {
                    return Err(SieveError::CrossCheckDisagreement { l });
                }
                Ok(a)
            }
        }
    }

    /// `kronecker(d, q) = 1` for every odd `q || N`.
    pub fn odd_exact_split(&self, d: i64) -> bool {
        self.odd_exact.iter().all(|&q| kronecker(d, q as i64) == 1)
    }

    fn good_primes(&self, bound: u64) -> Result<Vec<u64>, SieveError> {
        if bound < 3 {
            return Ok(Vec::new());
        }
        Ok(arith::primes_in_range(3, bound)?
            .into_iter()
            .filter(|&l| self.conductor % l != 0)
            .collect())
    }

    fn par_filter(
        &self,
        bound: u64,
        pred: impl Fn(u64) -> Result<bool, SieveError> + Sync,
    ) -> Result<Vec<u64>, SieveError> {
        let primes = self.good_primes(bound)?;
        let flags: Vec<bool> = primes
            .par_iter()
            .map(|&l| pred(l))
            .collect::<Result<_, _>>()?;
        Ok(primes
            .into_iter()
            .zip(flags)
            .filter_map(|(l, f)| f.then_some(l))
            .collect())
    }

    /// Primes `l <= bound`, `l ∤ 2N`, in S, ascending.
    pub fn enumerate_s(&self, bound: u64, mode: SMode) -> Result<Vec<u64>, SieveError> {
        self.par_filter(bound, |l| self.in_s(l, mode))
    }

    /// Signed twists `±l` with `l` in S and every odd `q || N` split in
    /// `Q(sqrt d)`, ordered by `|d|` and then negative before positive.
    pub fn enumerate_n(&self, bound: u64, mode: SMode) -> Result<Vec<i64>, SieveError> {
        Ok(self
            .enumerate_s(bound, mode)?
            .into_iter()
            .flat_map(|l| [-(l as i64), l as i64])
            .filter(|&d| self.odd_exact_split(d))
            .collect())
    }

    pub fn candidate(&self, d: i64) -> Result<TwistCandidate, SieveError> {
        let l = d.unsigned_abs();
        let prime = arith::is_prime(l);
        let good = prime && self.check_good(l).is_ok();
        let in_s = good && self.in_s(l, SMode::Count)?;
        Ok(TwistCandidate {
            d,
            l,
            in_s,
            in_n: in_s && self.odd_exact_split(d),
            lstar: if prime && l != 2 { lstar(l) } else { d },
        })
    }

    /// Split in K, inert in both 2-torsion fields, split in `Q(sqrt q)` for
    /// each odd `q || N`.
    pub fn in_t(&self, l: u64) -> Result<bool, SieveError> {
        self.check_good(l)?;
        let lemma = self.lemma()?;
        Ok(self.field.splits(l)
            && lemma.inert_in_both(l)
            && self.odd_exact.iter().all(|&q| kronecker(q as i64, l as i64) == 1))
    }

    pub fn enumerate_t(&self, bound: u64) -> Result<Vec<u64>, SieveError> {
        self.par_filter(bound, |l| self.in_t(l))
    }

    /// Generators of `Q(E[2], E0[2])`, `Q(sqrt -N)` and each `Q(sqrt q)`.
    pub fn disjointness_generators(&self) -> Result<Vec<Vec<i64>>, SieveError> {
        let lemma = self.lemma()?;
        let mut gens = vec![
            vec![lemma.e2_field.radicand(), lemma.e0_field.radicand()],
            vec![arith::squarefree_kernel_i64(-(self.conductor as i64))?],
        ];
        gens.extend(self.odd_exact.iter().map(|&q| vec![q as i64]));
        Ok(gens)
    }

    /// Linear disjointness of the fields in [`Self::disjointness_generators`].
    pub fn fields_disjoint(&self) -> Result<bool, SieveError> {
        linearly_disjoint(&self.disjointness_generators()?)
    }

    /// The fraction of sign patterns of the quadratic characters involved
    /// that meet all conditions defining T.
    pub fn heuristic_t_density(&self) -> Result<(f64, usize), SieveError> {
        let lemma = self.lemma()?;
        let mut conds: Vec<(i64, i32)> = vec![
            (self.field.radicand(), 1),
            (lemma.e2_field.radicand(), -1),
            (lemma.e0_field.radicand(), -1),
        ];
        conds.extend(self.odd_exact.iter().map(|&q| (q as i64, 1)));
        let vectors: Vec<BTreeSet<i64>> = conds
            .iter()
            .map(|&(d, _)| exponent_vector(d))
            .collect::<Result<_, _>>()?;
        let basis = reduce_basis(&vectors);
        let r = basis.len();
        // express each condition field in the basis and count sign patterns
        let coords: Vec<u64> = vectors.iter().map(|v| coordinates(&basis, v)).collect();
        let good = (0u64..1 << r)
            .filter(|signs| {
                conds.iter().zip(&coords).all(|(&(_, want), &c)| {
                    let s = if (signs & c).count_ones() % 2 == 0 { 1 } else { -1 };
                    s == want
                })
            })
            .count();
        Ok((good as f64 / (1u64 << r) as f64, r))
    }

    pub fn density_report(&self, bound: u64) -> Result<DensityReport, SieveError> {
        let total = self.good_primes(bound)?.len();
        let s = self.enumerate_s(bound, SMode::Count)?.len();
        let t = self.enumerate_t(bound)?.len();
        let disjoint = self.fields_disjoint()?;
        let (h, rank) = self.heuristic_t_density()?;
        Ok(DensityReport {
            bound,
            primes: total,
            s_count: s,
            t_count: t,
            s_frequency: s as f64 / total.max(1) as f64,
            t_frequency: t as f64 / total.max(1) as f64,
            condition_rank: rank,
            fields_disjoint: disjoint,
            heuristic: disjoint.then_some(h),
            heuristic_unchecked: h,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwistCandidate {
    pub d: i64,
    pub l: u64,
    pub in_s: bool,
    pub in_n: bool,
    pub lstar: i64,
}

#[derive(Debug, Clone)]
pub struct DensityReport {
    pub bound: u64,
    /// Odd primes up to the bound not dividing N.
    pub primes: usize,
    pub s_count: usize,
    pub t_count: usize,
    pub s_frequency: f64,
    pub t_frequency: f64,
    pub condition_rank: usize,
    pub fields_disjoint: bool,
    /// Withheld when the fields fail the disjointness hypothesis.
    pub heuristic: Option<f64>,
    pub heuristic_unchecked: f64,
}

/// Exponent vector of a squarefree integer over `-1` and the primes.
fn exponent_vector(d: i64) -> Result<BTreeSet<i64>, SieveError> {
    if d == 0 || !arith::is_squarefree(&BigInt::from(d))? {
        return Err(SieveError::NotSquarefree(d));
    }
    let mut v: BTreeSet<i64> = arith::factor_u64(d.unsigned_abs())
        .into_iter()
        .map(|(p, _)| p as i64)
        .collect();
    if d < 0 {
        v.insert(-1);
    }
    Ok(v)
}

fn xor(a: &BTreeSet<i64>, b: &BTreeSet<i64>) -> BTreeSet<i64> {
    a.symmetric_difference(b).copied().collect()
}

/// Row-reduced basis, each row with a distinct leading (largest) element.
fn reduce_basis(vectors: &[BTreeSet<i64>]) -> Vec<BTreeSet<i64>> {
    let mut basis: Vec<BTreeSet<i64>> = Vec::new();
    for v in vectors {
        let mut v = v.clone();
        while let Some(&lead) = v.iter().next_back() {
            match basis.iter().find(|b| b.iter().next_back() == Some(&lead)) {
                Some(b) => v = xor(&v, b),
                None => break,
            }
        }
        if !v.is_empty() {
            basis.push(v);
        }
    }
    basis
}

/// Bitmask of basis rows summing to `v` (which must lie in the span).
fn coordinates(basis: &[BTreeSet<i64>], v: &BTreeSet<i64>) -> u64 {
    let mut v = v.clone();
    let mut mask = 0u64;
    while let Some(&lead) = v.iter().next_back() {
        let i = basis
            .iter()
            .position(|b| b.iter().next_back() == Some(&lead))
            .expect("vector in span");
        v = xor(&v, &basis[i]);
        mask |= 1 << i;
    }
    mask
}

/// F2-rank of the exponent vectors of the given squarefree integers.
pub fn f2_rank(gens: &[i64]) -> Result<usize, SieveError> {
    let v: Vec<_> = gens.iter().map(|&d| exponent_vector(d)).collect::<Result<_, _>>()?;
    Ok(reduce_basis(&v).len())
}

/// True iff the multiquadratic fields generated by each set are linearly
/// disjoint: the rank of the union equals the sum of the ranks.
pub fn linearly_disjoint(sets: &[Vec<i64>]) -> Result<bool, SieveError> {
    let mut sum = 0;
    for s in sets {
        sum += f2_rank(s)?;
    }
    let all: Vec<i64> = sets.iter().flatten().copied().collect();
    Ok(f2_rank(&all)? == sum)
}

/// `w(E^(l*)) = w(E) (l* / -N)`, checked against `w(E) (-N / l)`.
/// Unknown outside `l* ≡ 1 (mod 4)`, `|l*|` prime, `gcd(l*, 2N) = 1`.
pub fn root_number_twist(e: &CurveQ, lstar_: i64) -> Result<RootNumber, SieveError> {
    let w = e.root_number();
    if lstar_ == 1 {
        return Ok(w);
    }
    let Some(n) = e.conductor() else {
        return Ok(RootNumber::Unknown);
    };
    let l = lstar_.unsigned_abs();
    if lstar_.rem_euclid(4) != 1 || !arith::is_prime(l) || n % l == 0 {
        return Ok(RootNumber::Unknown);
    }
    let neg_n = -(n as i64);
    let first = kronecker(lstar_, neg_n);
    let second = kronecker(neg_n, l as i64);
    if first != second {
        return Err(SieveError::ReciprocityMismatch { lstar: lstar_ });
    }
    Ok(w.times(first))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Hypothesis {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl fmt::Display for Hypothesis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "pass" } else { "fail" };
        write!(f, "HYP {} {}", self.name, verdict)?;
        if !self.detail.is_empty() {
            write!(f, "\t{}", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct RankPrediction {
    pub d: i64,
    /// `Some(1)` when every hypothesis holds.
    pub rank_over_k: Option<u8>,
    pub root_number: RootNumber,
    pub rank_over_q: Option<u8>,
    pub hypotheses: Vec<Hypothesis>,
}

impl RankPrediction {
    pub fn all_passed(&self) -> bool {
        self.hypotheses.iter().all(|h| h.passed)
    }
}

fn hyp(name: &'static str, passed: bool, detail: impl Into<String>) -> Hypothesis {
    Hypothesis {
        name,
        passed,
        detail: detail.into(),
    }
}

/// Evaluates every hypothesis of the criterion for the twist by `d` and,
/// when they all hold, predicts the analytic ranks.
pub fn predict(e: &CurveQ, k: QuadExt, p: &PointK, d: i64) -> RankPrediction {
    let mut hs = Vec::new();
    let n_t = rational_two_torsion(e).len();
    hs.push(hyp("two-torsion", n_t == 1, format!("{n_t} rational points of order 2")));
    hs.push(match has_no_rational_cyclic_4_isogeny(e) {
        Ok(b) => hyp("no-cyclic-4-isogeny", b, ""),
        Err(err) => hyp("no-cyclic-4-isogeny", false, err.to_string()),
    });
    let ctx = SieveContext::new(e, k);
    match &ctx {
        Ok(c) => {
            let bad: Vec<String> = arith::factor_u64(c.conductor)
                .into_iter()
                .filter(|&(l, _)| !k.splits(l))
                .map(|(l, _)| l.to_string())
                .collect();
            hs.push(hyp("heegner", bad.is_empty(), if bad.is_empty() { String::new() } else { format!("not split: {}", bad.join(",")) }));
        }
        Err(err) => hs.push(hyp("heegner", false, err.to_string())),
    }
    hs.push(hyp("two-split", k.splits(2), format!("d_K={}", k.discriminant())));
    hs.push(match check_star(e, k, p) {
        Ok(r) => {
            let v = r.log_valuation.map_or("inf".into(), |v| v.to_string());
            hyp("star", r.holds, format!("v2log={v}"))
        }
        Err(err) => hyp("star", false, err.to_string()),
    });
    let cand = ctx.as_ref().ok().map(|c| c.candidate(d));
    match cand {
        Some(Ok(c)) => {
            hs.push(hyp("d-in-N", c.in_n, format!("in_S={}", c.in_s)));
            // the twist's conductor adds only l, which lies in S and so splits in K
            hs.push(hyp("heegner-twist", c.in_s && k.splits(c.l), ""));
        }
        Some(Err(err)) => hs.push(hyp("d-in-N", false, err.to_string())),
        None => hs.push(hyp("d-in-N", false, "conductor unknown")),
    }
    let ok = hs.iter().all(|h| h.passed);
    let root_number = if ok && d.rem_euclid(4) == 1 {
        match root_number_twist(e, d) {
            Ok(w) => w,
            Err(err) => {
                hs.push(hyp("reciprocity", false, err.to_string()));
                RootNumber::Unknown
            }
        }
    } else {
        RootNumber::Unknown
    };
    let rank_over_q = match root_number.sign() {
        Some(1) => Some(0),
        Some(_) => Some(1),
        None => None,
    };
    RankPrediction {
        d,
        rank_over_k: ok.then_some(1),
        root_number,
        rank_over_q,
        hypotheses: hs,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curves::tests::{e256a1, e256b1};
    use crate::curves::KElem;

    fn qm7() -> QuadExt {
        QuadExt::new(-7).unwrap()
    }

    fn ctx_b() -> SieveContext {
        SieveContext::new(&e256b1(), qm7()).unwrap()
    }

    fn ctx_a() -> SieveContext {
        SieveContext::new(&e256a1(), qm7()).unwrap()
    }

    #[test]
    fn s_examples() {
        let c = ctx_b();
        assert!(c.in_s(29, SMode::CrossCheck).unwrap());
        assert!(!c.in_s(31, SMode::CrossCheck).unwrap());
        assert!(!c.in_s(5, SMode::CrossCheck).unwrap());
        assert!(matches!(c.in_s(2, SMode::Count), Err(SieveError::BadPrime { l: 2 })));
        assert_eq!(
            c.enumerate_s(400, SMode::Count).unwrap(),
            vec![29, 37, 53, 109, 149, 197, 277, 317, 373, 389]
        );
        assert_eq!(
            ctx_a().enumerate_s(340, SMode::Lemma).unwrap(),
            vec![11, 29, 37, 43, 53, 67, 107, 109, 149, 163, 179, 197, 211, 277, 317, 331]
        );
    }

    #[test]
    fn s_is_stable_under_mode() {
        for c in [ctx_a(), ctx_b()] {
            let a = c.enumerate_s(10_000, SMode::Count).unwrap();
            assert_eq!(a, c.enumerate_s(10_000, SMode::Lemma).unwrap());
            assert_eq!(a, c.enumerate_s(10_000, SMode::CrossCheck).unwrap());
        }
    }

    #[test]
    fn n_set_without_odd_exact_primes() {
        let c = ctx_b();
        let s = c.enumerate_s(200, SMode::Count).unwrap();
        let n = c.enumerate_n(200, SMode::Count).unwrap();
        assert_eq!(n.len(), 2 * s.len());
        assert_eq!(&n[..2], &[-29, 29]);
    }

    #[test]
    fn n_set_with_odd_exact_prime() {
        // 14a1: N = 2 * 7 with q = 7 exactly dividing N
        let e = CurveQ::from_ints([1, 0, 1, 4, -6]).unwrap().with_conductor(14);
        let c = SieveContext::new(&e, QuadExt::new(-31).unwrap()).unwrap();
        assert_eq!(c.odd_exact, vec![7]);
        for d in c.enumerate_n(500, SMode::Count).unwrap() {
            assert_eq!(kronecker(d, 7), 1);
        }
    }

    #[test]
    fn lemma_triples() {
        assert_eq!(lemma_mod4_equiv(&e256a1(), 11).unwrap(), (true, true, true));
        assert_eq!(lemma_mod4_equiv(&e256a1(), 7).unwrap(), (false, false, false));
        for e in [e256a1(), e256b1()] {
            let o = LemmaOracle::new(&e).unwrap();
            for l in arith::primes_in_range(3, 3000).unwrap() {
                let (a, b, c) = o.check(l).unwrap();
                assert!(a == b && b == c, "l={l}");
            }
        }
    }

    #[test]
    fn lstar_is_one_mod_4() {
        for l in arith::primes_in_range(3, 2000).unwrap() {
            let s = lstar(l);
            assert_eq!(s.rem_euclid(4), 1);
            for q in arith::primes_in_range(3, 100).unwrap() {
                if q != l {
                    assert_eq!(kronecker(s, q as i64), kronecker(q as i64, l as i64));
                }
            }
        }
    }

    #[test]
    fn disjointness() {
        assert!(linearly_disjoint(&[vec![2], vec![-1]]).unwrap());
        assert!(!linearly_disjoint(&[vec![2], vec![2]]).unwrap());
        assert!(!linearly_disjoint(&[vec![2], vec![-1], vec![-2]]).unwrap());
        assert!(linearly_disjoint(&[vec![3, 5], vec![15 * 7]]).unwrap());
        assert!(matches!(linearly_disjoint(&[vec![12]]), Err(SieveError::NotSquarefree(12))));
        assert!(ctx_a().fields_disjoint().unwrap());
        assert!(!ctx_b().fields_disjoint().unwrap());
    }

    #[test]
    fn root_numbers() {
        let e = e256a1();
        assert_eq!(root_number_twist(&e, 29).unwrap(), RootNumber::Minus);
        assert_eq!(root_number_twist(&e, -11).unwrap(), RootNumber::Plus);
        assert_eq!(root_number_twist(&e, 1).unwrap(), RootNumber::Minus);
        assert_eq!(root_number_twist(&e, 11).unwrap(), RootNumber::Unknown);
        let unknown = e.clone().with_root_number(RootNumber::Unknown);
        assert_eq!(root_number_twist(&unknown, 29).unwrap(), RootNumber::Unknown);
        for l in arith::primes_in_range(3, 3000).unwrap() {
            root_number_twist(&e, lstar(l)).unwrap();
        }
    }

    #[test]
    fn predictions() {
        let k = qm7();
        let e = e256b1();
        let p = e.point(KElem::from_int(-1), KElem::from_int(-1)).unwrap();
        let r = predict(&e, k, &p, 29);
        assert!(r.all_passed(), "{:?}", r.hypotheses);
        assert_eq!(r.rank_over_k, Some(1));
        let r = predict(&e, k, &p, 31);
        assert_eq!(r.rank_over_k, None);
        assert!(r.hypotheses.iter().any(|h| h.name == "d-in-N" && !h.passed));
        // -29 is not of the form l*: rank over K only
        let r = predict(&e, k, &p, -29);
        assert_eq!(r.rank_over_k, Some(1));
        assert_eq!(r.rank_over_q, None);
        let e = e256a1();
        let p = e.point(KElem::from_int(0), KElem::from_int(1)).unwrap();
        let r = predict(&e, k, &p, -11);
        assert_eq!(r.rank_over_q, Some(0));
        assert_eq!(r.root_number, RootNumber::Plus);
    }

    #[test]
    fn t_inside_s_and_densities() {
        for c in [ctx_a(), ctx_b()] {
            let s: BTreeSet<u64> = c.enumerate_s(10_000, SMode::Count).unwrap().into_iter().collect();
            assert!(c.enumerate_t(10_000).unwrap().iter().all(|l| s.contains(l)));
        }
        assert_eq!(ctx_b().heuristic_t_density().unwrap(), (0.125, 3));
        assert_eq!(ctx_a().heuristic_t_density().unwrap(), (0.25, 2));
        let r = ctx_a().density_report(20_000).unwrap();
        assert_eq!(r.heuristic, Some(0.25));
        assert!((r.s_frequency - 0.25).abs() < 0.025);
        assert!(ctx_b().density_report(1000).unwrap().heuristic.is_none());
    }

    #[test]
    fn parallel_order_is_deterministic() {
        let c = ctx_b();
        let par = c.enumerate_s(20_000, SMode::Count).unwrap();
        let seq: Vec<u64> = c
            .good_primes(20_000)
            .unwrap()
            .into_iter()
            .filter(|&l| c.in_s(l, SMode::Count).unwrap())
            .collect();
        assert_eq!(par, seq);
    }
}

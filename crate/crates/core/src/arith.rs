//! Integer utilities: Kronecker symbols, deterministic primality, 64-bit
//! factorization, squarefree kernels and prime enumeration.

use num_bigint::{BigInt, Sign};
use num_integer::{Integer, Roots};
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ArithError {
    #[error("cannot factor {0}: cofactor exceeds 64 bits after trial division")]
    TooLarge(BigInt),
    #[error("factorization of zero requested")]
    Zero,
    #[error("prime range [{lo}, {hi}] is invalid or exceeds the memory budget")]
    RangeTooLarge { lo: u64, hi: u64 },
}

/// Signed prime factorization of a nonzero integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pub value: BigInt,
    pub sign: i8,
    /// `(prime, exponent)` pairs with strictly increasing primes.
    pub factors: Vec<(u64, u32)>,
}

impl Factorization {
    pub fn primes(&self) -> impl Iterator<Item = u64> + '_ {
        self.factors.iter().map(|&(p, _)| p)
    }

    pub fn exponent(&self, p: u64) -> u32 {
        self.factors
            .iter()
            .find(|&&(q, _)| q == p)
            .map_or(0, |&(_, e)| e)
    }

    /// Recomputes `sign * prod p^e`.
    pub fn product(&self) -> BigInt {
        let mut acc = BigInt::from(self.sign);
        for &(p, e) in &self.factors {
            acc *= BigInt::from(p).pow(e);
        }
        acc
    }
}

fn jacobi_u64(mut a: u64, mut n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    a %= n;
    let mut t = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                t = -t;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            t = -t;
        }
        a %= n;
    }
    if n == 1 {
        t
    } else {
        0
    }
}

/// `(a / 2)` with the convention 0 for even `a`, +1 for a ≡ ±1 (mod 8).
fn kronecker_two(a_mod8: u64) -> i32 {
    match a_mod8 {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Kronecker symbol `(a / n)` for a big numerator.
pub fn kronecker_big(a: &BigInt, n: i64) -> i32 {
    if n == 0 {
        return if a.abs().is_one() { 1 } else { 0 };
    }
    let mut result = 1;
    if n < 0 && a.is_negative() {
        result = -result;
    }
    let mut m = n.unsigned_abs();
    let twos = m.trailing_zeros();
    m >>= twos;
    if twos > 0 {
        let a8 = a.mod_floor(&BigInt::from(8)).to_u64().unwrap();
        let k = kronecker_two(a8);
        if k == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            result *= k;
        }
    }
    if m == 1 {
        return result;
    }
    let r = a.mod_floor(&BigInt::from(m)).to_u64().unwrap();
    result * jacobi_u64(r, m)
}

/// Kronecker symbol `(a / n)`.
pub fn kronecker(a: i64, n: i64) -> i32 {
    kronecker_big(&BigInt::from(a), n)
}

pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller–Rabin; the first twelve primes as witnesses are
/// sufficient for every n < 2^64.
pub fn is_prime(n: u64) -> bool {
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    if n < 2 {
        return false;
    }
    for &p in &WITNESSES {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Brent's variant of Pollard rho. `n` must be composite and odd.
fn pollard_brent(n: u64) -> u64 {
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        let mut q = 1u64;
        let mut r = 1u64;
        let mut ys = 2u64;
        const M: u64 = 128;
        while g == 1 {
            x = y;
            for _ in 0..r {
                y = f(y);
            }
            let mut k = 0;
            while k < r && g == 1 {
                ys = y;
                for _ in 0..M.min(r - k) {
                    y = f(y);
                    q = mul_mod(q, x.abs_diff(y), n);
                }
                g = gcd_u64(q, n);
                k += M;
            }
            r *= 2;
        }
        if g == n {
            loop {
                ys = f(ys);
                g = gcd_u64(x.abs_diff(ys), n);
                if g > 1 {
                    break;
                }
            }
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn push_factors(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    push_factors(d, out);
    push_factors(n / d, out);
}

/// Factors a positive 64-bit integer into `(prime, exponent)` pairs.
pub fn factor_u64(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n > 0, "factor_u64(0)");
    let mut primes = Vec::new();
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47] {
        while n % p == 0 {
            primes.push(p);
            n /= p;
        }
    }
    push_factors(n, &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for p in primes {
        match out.last_mut() {
            Some((q, e)) if *q == p => *e += 1,
            _ => out.push((p, 1)),
        }
    }
    out
}

/// Factors a nonzero integer. Trial division removes primes below 2^16;
/// the remaining cofactor must fit in 64 bits.
pub fn factor(n: &BigInt) -> Result<Factorization, ArithError> {
    if n.is_zero() {
        return Err(ArithError::Zero);
    }
    let sign = if n.is_negative() { -1 } else { 1 };
    let mut rest = n.abs();
    let mut factors: Vec<(u64, u32)> = Vec::new();
    if rest.to_u64().is_none() {
        let mut p = 2u64;
        while p < 1 << 16 {
            let bp = BigInt::from(p);
            let mut e = 0;
            while (&rest % &bp).is_zero() {
                rest /= &bp;
                e += 1;
            }
            if e > 0 {
                factors.push((p, e));
            }
            p += if p == 2 { 1 } else { 2 };
        }
    }
    let Some(r) = rest.to_u64() else {
        return Err(ArithError::TooLarge(n.clone()));
    };
    if r > 1 {
        factors.extend(factor_u64(r));
    }
    factors.sort_unstable();
    Ok(Factorization {
        value: n.clone(),
        sign,
        factors,
    })
}

/// The squarefree `d` with `n / d` a positive square.
pub fn squarefree_kernel(n: &BigInt) -> Result<BigInt, ArithError> {
    let f = factor(n)?;
    let mut d = BigInt::from(f.sign);
    for &(p, e) in &f.factors {
        if e % 2 == 1 {
            d *= p;
        }
    }
    Ok(d)
}

pub fn squarefree_kernel_i64(n: i64) -> Result<i64, ArithError> {
    squarefree_kernel(&BigInt::from(n)).map(|d| d.to_i64().expect("kernel divides n"))
}

pub fn is_squarefree(n: &BigInt) -> Result<bool, ArithError> {
    Ok(factor(n)?.factors.iter().all(|&(_, e)| e == 1))
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero(), "valuation of zero");
    let bp = BigInt::from(p);
    let mut m = n.clone();
    let mut v = 0;
    loop {
        let (q, r) = m.div_rem(&bp);
        if !r.is_zero() {
            return v;
        }
        m = q;
        v += 1;
    }
}

pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &r * &r == *n
}

pub fn bigint_mod_u64(n: &BigInt, m: u64) -> u64 {
    n.mod_floor(&BigInt::from(m)).to_u64().unwrap()
}

/// Prime enumeration cap: at most this many integers per call.
const MAX_RANGE: u64 = 1 << 32;

/// All primes in `[lo, hi]`, ascending, by a segmented sieve.
pub fn primes_in_range(lo: u64, hi: u64) -> Result<Vec<u64>, ArithError> {
    if lo > hi || hi >= 1 << 40 || hi - lo >= MAX_RANGE {
        return Err(ArithError::RangeTooLarge { lo, hi });
    }
    let lo = lo.max(2);
    if lo > hi {
        return Ok(Vec::new());
    }
    let root = hi.sqrt();
    let mut small = vec![true; (root + 1) as usize];
    let mut base = Vec::new();
    for i in 2..=root as usize {
        if small[i] {
            base.push(i as u64);
            let mut j = i * i;
            while j <= root as usize {
                small[j] = false;
                j += i;
            }
        }
    }
    let mut out = Vec::new();
    const SEG: u64 = 1 << 18;
    let mut start = lo;
    while start <= hi {
        let end = (start + SEG - 1).min(hi);
        let mut mark = vec![true; (end - start + 1) as usize];
        for &p in &base {
            let first = (p * p).max(start.div_ceil(p) * p);
            let mut j = first;
            while j <= end {
                mark[(j - start) as usize] = false;
                j += p;
            }
        }
        out.extend(
            mark.iter()
                .enumerate()
                .filter(|(_, &m)| m)
                .map(|(i, _)| start + i as u64),
        );
        start = end + 1;
    }
    Ok(out)
}

/// A square root of `a` modulo an odd prime `p` (Tonelli–Shanks), if any.
pub fn sqrt_mod_prime(a: u64, p: u64) -> Option<u64> {
    let a = a % p;
    if a == 0 {
        return Some(0);
    }
    if p == 2 {
        return Some(a);
    }
    if pow_mod(a, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(pow_mod(a, (p + 1) / 4, p));
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while pow_mod(z, (p - 1) / 2, p) != p - 1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut tt = t;
        while tt != 1 {
            tt = mul_mod(tt, tt, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r)
}

/// Sign helper shared by the field and symbol code.
pub fn sign_of(n: &BigInt) -> i32 {
    match n.sign() {
        Sign::Minus => -1,
        Sign::NoSign => 0,
        Sign::Plus => 1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre_by_squares(a: u64, p: u64) -> i32 {
        let a = a % p;
        if a == 0 {
            return 0;
        }
        if (1..p).any(|x| x * x % p == a) {
            1
        } else {
            -1
        }
    }

    #[test]
    fn kronecker_examples() {
        for a in -20..20 {
            assert_eq!(kronecker(a, 1), 1);
        }
        assert_eq!(kronecker(-7, 29), 1);
        assert_eq!(kronecker(-7, 5), -1);
        // splitting of 2 in Q(sqrt(d_K)) reads d_K mod 8
        assert_eq!(kronecker(-7, 2), 1);
        assert_eq!(kronecker(5, 2), -1);
        assert_eq!(kronecker(12, 2), 0);
    }

    #[test]
    fn kronecker_matches_euler_criterion() {
        for p in primes_in_range(3, 500).unwrap() {
            for a in 1..p {
                let euler = pow_mod(a, (p - 1) / 2, p);
                let expect = if euler == 1 { 1 } else { -1 };
                assert_eq!(kronecker(a as i64, p as i64), expect);
                assert_eq!(expect, legendre_by_squares(a, p));
            }
        }
    }

    #[test]
    fn kronecker_multiplicative() {
        for n in -200i64..=200 {
            if n == 0 {
                continue;
            }
            // (0 / -1) = 1 breaks multiplicativity at n = -1, so zero is excluded
            for a in (-40i64..=40).filter(|&a| a != 0) {
                for b in (-40i64..=40).filter(|&b| b != 0) {
                    assert_eq!(
                        kronecker(a * b, n),
                        kronecker(a, n) * kronecker(b, n),
                        "({a}*{b} / {n})"
                    );
                }
            }
        }
    }

    #[test]
    fn quadratic_reciprocity() {
        let ps = primes_in_range(3, 200).unwrap();
        for &p in &ps {
            for &q in &ps {
                if p == q {
                    continue;
                }
                let lhs = kronecker(p as i64, q as i64) * kronecker(q as i64, p as i64);
                let rhs = if ((p - 1) / 2 * ((q - 1) / 2)) % 2 == 0 { 1 } else { -1 };
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn primality() {
        assert!(!is_prime(0));
        assert!(!is_prime(1));
        assert!(is_prime(2));
        assert!(is_prime(29));
        assert!(!is_prime(215296));
        assert!(is_prime(18446744073709551557));
        assert!(!is_prime(3215031751));
        assert!(!is_prime(341550071728321));
        let sieve = primes_in_range(2, 100_000).unwrap();
        let by_test: Vec<u64> = (0..=100_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, by_test);
    }

    #[test]
    fn prime_ranges() {
        assert_eq!(primes_in_range(2, 10).unwrap(), vec![2, 3, 5, 7]);
        assert_eq!(primes_in_range(29, 29).unwrap(), vec![29]);
        // Eratosthenes oracle
        let limit = 100_000usize;
        let mut comp = vec![false; limit + 1];
        let mut count = 0;
        for i in 2..=limit {
            if !comp[i] {
                count += 1;
                let mut j = i * i;
                while j <= limit {
                    comp[j] = true;
                    j += i;
                }
            }
        }
        assert_eq!(count, 9592);
        assert_eq!(primes_in_range(2, 100_000).unwrap().len(), 9592);
        assert!(primes_in_range(10, 5).is_err());
        assert!(primes_in_range(2, 1 << 41).is_err());
    }

    #[test]
    fn kernels() {
        assert_eq!(squarefree_kernel_i64(512).unwrap(), 2);
        assert_eq!(squarefree_kernel_i64(-7).unwrap(), -7);
        assert_eq!(squarefree_kernel_i64(1).unwrap(), 1);
        assert_eq!(squarefree_kernel_i64(-4096).unwrap(), -1);
        for n in (-3000i64..3000).filter(|&n| n != 0) {
            let d = squarefree_kernel_i64(n).unwrap();
            assert_eq!(n % d, 0);
            let sq = BigInt::from(n / d);
            assert!(is_square(&sq), "{n} / {d}");
            assert!(is_squarefree(&BigInt::from(d)).unwrap());
        }
        assert!(squarefree_kernel(&BigInt::zero()).is_err());
    }

    #[test]
    fn factoring() {
        let n: u64 = 1_000_000_007 * 998_244_353;
        assert_eq!(factor_u64(n), vec![(998_244_353, 1), (1_000_000_007, 1)]);
        let big = BigInt::from(2).pow(80) * 3 * BigInt::from(1_000_003u64).pow(2);
        let f = factor(&big).unwrap();
        assert_eq!(f.product(), big);
        assert_eq!(f.exponent(2), 80);
        assert_eq!(f.exponent(1_000_003), 2);
        let hopeless = BigInt::from(u64::MAX - 58) * BigInt::from(u64::MAX - 82);
        assert!(matches!(factor(&hopeless), Err(ArithError::TooLarge(_))));
    }

    #[test]
    fn tonelli() {
        for p in primes_in_range(3, 400).unwrap() {
            for a in 0..p {
                match sqrt_mod_prime(a, p) {
                    Some(r) => assert_eq!(r * r % p, a),
                    None => assert_eq!(legendre_by_squares(a, p), -1),
                }
            }
        }
    }
}

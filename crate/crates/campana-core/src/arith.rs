//! Exact integer and rational arithmetic: p-adic valuations, primitive
//! projective representatives, p-adic fractional parts, and m-full integers.
//!
//! Everything here is exact; no floating point is used anywhere in this
//! module.

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational scalar: reduced fraction with positive denominator.
pub type Rational = num_rational::BigRational;

/// Builds a rational from an integer pair, for test and construction
/// convenience.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Nearest double to an exact rational, for handing exact invariants to
/// floating-point reports.
pub fn rational_to_f64(q: &Rational) -> f64 {
    use num_traits::ToPrimitive;
    q.to_f64().expect("rational out of f64 range")
}

/// Deterministic primality test by trial division; adequate for 64-bit
/// inputs and the small primes this crate actually touches.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for q in [2u64, 3, 5] {
        if n == q {
            return true;
        }
        if n % q == 0 {
            return false;
        }
    }
    // wheel over residues coprime to 30
    let mut d = 7u64;
    let steps = [4u64, 2, 4, 2, 4, 6, 2, 6];
    let mut i = 0;
    while d.checked_mul(d).map_or(false, |dd| dd <= n) {
        if n % d == 0 {
            return false;
        }
        d += steps[i];
        i = (i + 1) % steps.len();
    }
    true
}

/// All primes `<= n`, by sieve of Eratosthenes.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut out = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            out.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    out
}

fn ensure_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// Exponent of `p` in a nonzero integer.
pub fn valuation_u64(mut n: u64, p: u64) -> u32 {
    debug_assert!(n != 0);
    let mut v = 0;
    while n % p == 0 {
        n /= p;
        v += 1;
    }
    v
}

fn valuation_bigint(n: &BigInt, p: u64) -> i64 {
    debug_assert!(!n.is_zero());
    let p = BigInt::from(p);
    let mut v = 0i64;
    let mut n = n.abs();
    loop {
        let (q, r) = n.div_rem(&p);
        if !r.is_zero() {
            return v;
        }
        n = q;
        v += 1;
    }
}

/// p-adic valuation of a nonzero rational; negative when `p` divides the
/// denominator.
pub fn padic_valuation(q: &Rational, p: u64) -> Result<i64> {
    ensure_prime(p)?;
    if q.is_zero() {
        return Err(Error::ZeroValuation);
    }
    Ok(valuation_bigint(q.numer(), p) - valuation_bigint(q.denom(), p))
}

/// The unique `r` in `[0, 1)` with denominator a power of `p` such that
/// `q - r` is a p-adic integer. Characters are evaluated downstream as
/// `exp(2 pi i r)`.
pub fn padic_fractional_part(q: &Rational, p: u64) -> Result<Rational> {
    ensure_prime(p)?;
    if q.is_zero() || padic_valuation(q, p)? >= 0 {
        return Ok(Rational::zero());
    }
    let k = (-padic_valuation(q, p)?) as u32;
    let pk = BigInt::from(p).pow(k);
    // q * p^k = a/b with both prime to p; r = (a b^{-1} mod p^k) / p^k
    let scaled = q * Rational::from_integer(pk.clone());
    let a = scaled.numer().mod_floor(&pk);
    let b = scaled.denom().clone();
    let gcd = b.extended_gcd(&pk);
    debug_assert!(gcd.gcd.is_one());
    let b_inv = gcd.x.mod_floor(&pk);
    let r = (a * b_inv).mod_floor(&pk);
    Ok(Rational::new(r, pk))
}

/// A point of projective space in lowest terms: integer coordinates with
/// gcd 1, not all zero, first nonzero coordinate positive.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PrimitivePoint {
    coords: Vec<BigInt>,
}

impl PrimitivePoint {
    /// Canonicalizes a tuple of rational projective coordinates.
    pub fn new(coords: &[Rational]) -> Result<Self> {
        primitive_rep(coords)
    }

    /// Canonicalizes integer coordinates.
    pub fn from_integers<I: Into<BigInt>>(coords: Vec<I>) -> Result<Self> {
        let rats: Vec<Rational> = coords
            .into_iter()
            .map(|c| Rational::from_integer(c.into()))
            .collect();
        primitive_rep(&rats)
    }

    pub fn coords(&self) -> &[BigInt] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    /// Coordinates as rationals, for feeding back into group actions.
    pub fn to_rationals(&self) -> Vec<Rational> {
        self.coords
            .iter()
            .map(|c| Rational::from_integer(c.clone()))
            .collect()
    }
}

impl std::fmt::Display for PrimitivePoint {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ":")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// The unique primitive representative of a projective point given by
/// rational coordinates.
pub fn primitive_rep(coords: &[Rational]) -> Result<PrimitivePoint> {
    if coords.iter().all(Rational::is_zero) {
        return Err(Error::AllZero);
    }
    // clear denominators
    let mut lcm = BigInt::one();
    for c in coords {
        lcm = lcm.lcm(c.denom());
    }
    let lcm = Rational::from_integer(lcm);
    let mut ints: Vec<BigInt> = coords.iter().map(|c| (c * &lcm).to_integer()).collect();
    // divide by the gcd
    let mut g = BigInt::zero();
    for c in &ints {
        g = g.gcd(c);
    }
    for c in &mut ints {
        *c /= &g;
    }
    // first nonzero coordinate positive
    if ints
        .iter()
        .find(|c| !c.is_zero())
        .map(Signed::is_negative)
        .unwrap_or(false)
    {
        for c in &mut ints {
            *c = -c.clone();
        }
    }
    Ok(PrimitivePoint { coords: ints })
}

/// True iff every prime outside `s` divides `n` to exponent 0 or at least
/// `m`.
pub fn is_mfull(n: u64, m: u32, s: &BTreeSet<u64>) -> bool {
    assert!(n >= 1 && m >= 1);
    if m == 1 {
        return true;
    }
    for_each_prime_power(n, |p, e| s.contains(&p) || e >= m)
}

/// True iff `n` has no prime factor outside `s` (the multiplicity-infinity
/// predicate: integral points).
pub fn is_sunit(n: u64, s: &BTreeSet<u64>) -> bool {
    assert!(n >= 1);
    for_each_prime_power(n, |p, _| s.contains(&p))
}

/// Trial-divides `n`, checking `pred(p, v_p(n))` on every prime factor;
/// short-circuits on the first failure.
fn for_each_prime_power(mut n: u64, pred: impl Fn(u64, u32) -> bool) -> bool {
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut e = 0;
            while n % d == 0 {
                n /= d;
                e += 1;
            }
            if !pred(d, e) {
                return false;
            }
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 && !pred(n, 1) {
        return false;
    }
    true
}

/// Ascending list of m-full integers `<= x`: every prime outside `s` occurs
/// with exponent 0 or >= m. Generated by depth-first products of admissible
/// prime powers, so the work is proportional to the output for m >= 2, not
/// to `x`.
pub fn mfull_up_to(x: u64, m: u32, s: &BTreeSet<u64>) -> Vec<u64> {
    assert!(x >= 1 && m >= 1);
    if m == 1 {
        return (1..=x).collect();
    }
    let mut primes: Vec<(u64, u32)> = Vec::new(); // (p, minimum exponent)
    for p in primes_up_to(integer_root(x, m)) {
        primes.push((p, if s.contains(&p) { 1 } else { m }));
    }
    for &p in s {
        if p <= x && integer_root(x, m) < p {
            primes.push((p, 1));
        }
    }
    primes.sort_unstable();
    let mut out = Vec::new();
    power_product_dfs(&primes, 0, 1, x, &mut out);
    out.sort_unstable();
    out
}

/// Ascending list of integers `<= x` all of whose prime factors lie in `s`.
pub fn sunits_up_to(x: u64, s: &BTreeSet<u64>) -> Vec<u64> {
    let primes: Vec<(u64, u32)> = s.iter().filter(|&&p| p <= x).map(|&p| (p, 1)).collect();
    let mut out = Vec::new();
    power_product_dfs(&primes, 0, 1, x, &mut out);
    out.sort_unstable();
    out
}

fn power_product_dfs(primes: &[(u64, u32)], from: usize, acc: u64, x: u64, out: &mut Vec<u64>) {
    out.push(acc);
    for i in from..primes.len() {
        let (p, e_min) = primes[i];
        if acc.checked_mul(p).map_or(true, |v| v > x) {
            // even a single factor of p overflows, and later primes are
            // larger still
            break;
        }
        let Some(mut q) = checked_pow(p, e_min).and_then(|pe| acc.checked_mul(pe)) else {
            continue;
        };
        if q > x {
            continue;
        }
        while q <= x {
            power_product_dfs(primes, i + 1, q, x, out);
            match q.checked_mul(p) {
                Some(next) => q = next,
                None => break,
            }
        }
    }
}

fn checked_pow(base: u64, exp: u32) -> Option<u64> {
    let mut acc = 1u64;
    for _ in 0..exp {
        acc = acc.checked_mul(base)?;
    }
    Some(acc)
}

/// Mobius function values for 0..=n by linear sieve; `mu[0] = 0`.
pub fn mobius_sieve(n: u64) -> Vec<i8> {
    let n = n as usize;
    let mut mu = vec![0i8; n + 1];
    let mut composite = vec![false; n + 1];
    let mut primes: Vec<usize> = Vec::new();
    if n >= 1 {
        mu[1] = 1;
    }
    for i in 2..=n {
        if !composite[i] {
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let Some(ip) = i.checked_mul(p).filter(|&v| v <= n) else {
                break;
            };
            composite[ip] = true;
            if i % p == 0 {
                mu[ip] = 0;
                break;
            }
            mu[ip] = -mu[i];
        }
    }
    mu
}

/// Largest `r` with `r^m <= x`.
pub fn integer_root(x: u64, m: u32) -> u64 {
    if m == 1 {
        return x;
    }
    let mut r = (x as f64).powf(1.0 / m as f64).round() as u64 + 1;
    while checked_pow(r, m).map_or(true, |rm| rm > x) {
        r -= 1;
    }
    r
}

/// Modular inverse of `a` modulo `n` (`gcd(a, n) = 1`).
pub(crate) fn mod_inverse_u64(a: u64, n: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (n as i128, (a % n) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    debug_assert_eq!(r, 1, "inputs must be coprime");
    t.rem_euclid(n as i128) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ps: &[u64]) -> BTreeSet<u64> {
        ps.iter().copied().collect()
    }

    #[test]
    fn valuation_of_integers_and_rationals() {
        assert_eq!(padic_valuation(&rat(12, 1), 2).unwrap(), 2);
        assert_eq!(padic_valuation(&rat(1, 1), 7).unwrap(), 0);
        assert_eq!(padic_valuation(&rat(3, 8), 2).unwrap(), -3);
        assert_eq!(padic_valuation(&rat(48, 1), 2).unwrap(), 4);
        assert_eq!(padic_valuation(&rat(-18, 1), 3).unwrap(), 2);
    }

    #[test]
    fn valuation_rejects_zero_and_composite_moduli() {
        assert_eq!(padic_valuation(&rat(0, 1), 2), Err(Error::ZeroValuation));
        assert_eq!(padic_valuation(&rat(5, 1), 6), Err(Error::NotPrime(6)));
    }

    #[test]
    fn valuation_is_additive() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for p in [2u64, 3, 5, 7] {
            for _ in 0..1000 {
                let q = rat(rng.gen_range(-999..1000), rng.gen_range(1..1000));
                let r = rat(rng.gen_range(-999..1000), rng.gen_range(1..1000));
                if q.is_zero() || r.is_zero() {
                    continue;
                }
                assert_eq!(
                    padic_valuation(&(&q * &r), p).unwrap(),
                    padic_valuation(&q, p).unwrap() + padic_valuation(&r, p).unwrap()
                );
            }
        }
    }

    #[test]
    fn primitive_rep_examples() {
        let p = primitive_rep(&[rat(1, 1), rat(1, 2), rat(1, 2), rat(3, 2)]).unwrap();
        assert_eq!(p, PrimitivePoint::from_integers(vec![2, 1, 1, 3]).unwrap());
        let p = primitive_rep(&[rat(1, 1), rat(0, 1), rat(0, 1), rat(0, 1)]).unwrap();
        assert_eq!(p.coords(), &[1.into(), 0.into(), 0.into(), 0.into()]);
        let p = primitive_rep(&[rat(-2, 1), rat(-4, 1), rat(-6, 1), rat(-8, 1)]).unwrap();
        assert_eq!(p, PrimitivePoint::from_integers(vec![1, 2, 3, 4]).unwrap());
        assert_eq!(
            primitive_rep(&[Rational::zero(), Rational::zero()]),
            Err(Error::AllZero)
        );
    }

    #[test]
    fn primitive_rep_is_idempotent_and_scale_invariant() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let v: Vec<Rational> = (0..4)
                .map(|_| rat(rng.gen_range(-50..51), rng.gen_range(1..40)))
                .collect();
            if v.iter().all(Rational::is_zero) {
                continue;
            }
            let c = rat(rng.gen_range(1..30), rng.gen_range(1..30))
                * rat(if rng.gen_bool(0.5) { -1 } else { 1 }, 1);
            let scaled: Vec<Rational> = v.iter().map(|x| x * &c).collect();
            let p = primitive_rep(&v).unwrap();
            assert_eq!(p, primitive_rep(&scaled).unwrap());
            assert_eq!(p, primitive_rep(&p.to_rationals()).unwrap());
        }
    }

    #[test]
    fn fractional_part_examples() {
        assert_eq!(padic_fractional_part(&rat(1, 2), 2).unwrap(), rat(1, 2));
        assert_eq!(padic_fractional_part(&rat(5, 1), 3).unwrap(), rat(0, 1));
        // 7/12 - 1/4 = 1/3, a 2-adic unit
        assert_eq!(padic_fractional_part(&rat(7, 12), 2).unwrap(), rat(1, 4));
        assert_eq!(padic_fractional_part(&rat(-1, 3), 3).unwrap(), rat(2, 3));
        assert_eq!(padic_fractional_part(&rat(1, 8), 2).unwrap(), rat(1, 8));
    }

    #[test]
    fn fractional_part_is_a_fractional_part() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(13);
        for p in [2u64, 3, 5] {
            for _ in 0..400 {
                let q = rat(rng.gen_range(-400..400), rng.gen_range(1..400));
                let r = padic_fractional_part(&q, p).unwrap();
                assert!(!r.is_negative() && r < Rational::one());
                let diff = &q - &r;
                if !diff.is_zero() {
                    assert!(padic_valuation(&diff, p).unwrap() >= 0, "q={q} r={r}");
                }
                // invariance under integral shifts
                let shifted = &q + rat(rng.gen_range(-20..21), 1);
                assert_eq!(padic_fractional_part(&shifted, p).unwrap(), r);
            }
        }
    }

    #[test]
    fn mfull_examples() {
        assert!(is_mfull(72, 2, &set(&[])));
        assert!(!is_mfull(12, 2, &set(&[])));
        assert!(is_mfull(12, 1, &set(&[])));
        assert!(is_mfull(1, 5, &set(&[])));
        // exemptions at S-primes
        assert!(!is_mfull(24, 2, &set(&[])));
        assert!(is_mfull(24, 2, &set(&[3])));
        assert!(is_mfull(18, 2, &set(&[2])));
        assert!(!is_mfull(12, 2, &set(&[2])));
        // infinity predicate
        assert!(is_sunit(1, &set(&[])));
        assert!(!is_sunit(2, &set(&[])));
        assert!(is_sunit(8, &set(&[2])));
        assert!(!is_sunit(12, &set(&[2])));
    }

    #[test]
    fn mfull_generation_matches_filtering() {
        assert_eq!(
            mfull_up_to(100, 2, &set(&[])),
            vec![1, 4, 8, 9, 16, 25, 27, 32, 36, 49, 64, 72, 81, 100]
        );
        assert_eq!(mfull_up_to(10, 3, &set(&[])), vec![1, 8]);
        assert_eq!(mfull_up_to(6, 1, &set(&[])), vec![1, 2, 3, 4, 5, 6]);
        for m in [2u32, 3] {
            for s in [set(&[]), set(&[2]), set(&[2, 7])] {
                let generated = mfull_up_to(3000, m, &s);
                let filtered: Vec<u64> = (1..=3000).filter(|&n| is_mfull(n, m, &s)).collect();
                assert_eq!(generated, filtered, "m={m} s={s:?}");
            }
        }
        assert_eq!(
            sunits_up_to(20, &set(&[2, 3])),
            vec![1, 2, 3, 4, 6, 8, 9, 12, 16, 18]
        );
    }

    #[test]
    fn squareful_density_approaches_its_limit() {
        // |{squareful <= X}| / sqrt(X) tends to zeta(3/2)/zeta(3) ~ 2.17
        for x in [10_000u64, 1_000_000] {
            let count = mfull_up_to(x, 2, &set(&[])).len() as f64;
            let ratio = count / (x as f64).sqrt();
            assert!((1.7..=2.4).contains(&ratio), "x={x} ratio={ratio}");
        }
    }

    #[test]
    fn primality_and_sieve_agree() {
        let sieved = primes_up_to(2000);
        let filtered: Vec<u64> = (0..=2000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieved, filtered);
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
        assert!(!is_prime(2_147_483_649));
    }

    #[test]
    fn modular_inverse() {
        for n in [4u64, 9, 25, 343, 6561] {
            for a in 1..40u64 {
                if num_integer::gcd(a, n) == 1 {
                    assert_eq!(mod_inverse_u64(a, n) * a % n, 1, "a={a} n={n}");
                }
            }
        }
    }

    #[test]
    fn mobius_sieve_matches_factorization() {
        let mu = mobius_sieve(500);
        assert_eq!(mu[0], 0);
        assert_eq!(&mu[1..11], &[1, -1, -1, 0, -1, 1, -1, 0, 0, 1]);
        for n in 1..=500u64 {
            let mut rest = n;
            let mut expected = 1i8;
            for p in primes_up_to(n) {
                if rest % p == 0 {
                    rest /= p;
                    expected = -expected;
                    if rest % p == 0 {
                        expected = 0;
                        break;
                    }
                }
            }
            assert_eq!(mu[n as usize], expected, "n = {n}");
        }
        // Mertens-style sanity: partial sums of mu stay small
        let partial: i64 = mu[1..].iter().map(|&v| v as i64).sum();
        assert!(partial.unsigned_abs() <= 10);
    }
}

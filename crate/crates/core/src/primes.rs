//! Primality, factorisation of machine integers, and prime selections.

use crate::error::{Error, Result};

pub(crate) fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub(crate) fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
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

/// Deterministic Miller–Rabin for all `u64`.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &w in &WITNESSES {
        if n % w == 0 {
            return n == w;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'outer: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'outer;
            }
        }
        return false;
    }
    true
}

/// Prime factorisation by trial division, as `(prime, multiplicity)` pairs in ascending order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d * d <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::gcd(a, b)
}

pub fn lcm(a: u64, b: u64) -> u64 {
    num_integer::lcm(a, b)
}

/// Euler's totient.
pub fn totient(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

/// All primes in `lo..=hi`, by sieve.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    if hi < 2 {
        return Vec::new();
    }
    let n = hi as usize;
    let mut sieve = vec![true; n + 1];
    sieve[0] = false;
    sieve[1] = false;
    let mut i = 2;
    while i * i <= n {
        if sieve[i] {
            let mut j = i * i;
            while j <= n {
                sieve[j] = false;
                j += i;
            }
        }
        i += 1;
    }
    (lo.max(2) as usize..=n)
        .filter(|&k| sieve[k])
        .map(|k| k as u64)
        .collect()
}

/// Parse a prime selection.
///
/// Accepted forms:
/// - `"a mod M in lo..hi"` (inclusive bounds, `gcd(a, M) = 1`)
/// - `"lo..hi"`
/// - a comma-separated list such as `"97,193"`
pub fn prime_stream(spec: &str) -> Result<Vec<u64>> {
    let spec = spec.trim();
    let bad = || Error::Parse(format!("prime selection {spec:?}"));
    let num = |s: &str| s.trim().parse::<u64>().map_err(|_| bad());
    let range = |s: &str| -> Result<(u64, u64)> {
        let (lo, hi) = s.split_once("..").ok_or_else(bad)?;
        let hi = hi.trim_start_matches('=');
        Ok((num(lo)?, num(hi)?))
    };
    if let Some((cong, rng)) = spec.split_once(" in ") {
        let (a, m) = cong.split_once("mod").ok_or_else(bad)?;
        let (a, m) = (num(a)?, num(m)?);
        if m == 0 || gcd(a % m, m) != 1 {
            return Err(Error::InvalidInput(format!("{a} is not a unit modulo {m}")));
        }
        let (lo, hi) = range(rng)?;
        return Ok(primes_in(lo, hi).into_iter().filter(|p| p % m == a % m).collect());
    }
    if spec.contains("..") {
        let (lo, hi) = range(spec)?;
        return Ok(primes_in(lo, hi));
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let p = num(part)?;
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        out.push(p);
    }
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn miller_rabin_matches_sieve() {
        let sieve = primes_in(0, 20_000);
        let mr: Vec<u64> = (0..=20_000).filter(|&n| is_prime(n)).collect();
        assert_eq!(sieve, mr);
        assert!(is_prime(18_446_744_073_709_551_557));
        assert!(!is_prime(3_215_031_751));
    }

    #[test]
    fn streams() {
        assert_eq!(prime_stream("1 mod 48 in 2..200").unwrap(), vec![97, 193]);
        assert_eq!(prime_stream("1 mod 3 in 2..20").unwrap(), vec![7, 13, 19]);
        assert_eq!(prime_stream("1 mod 84 in 2..500").unwrap(), vec![337, 421]);
        assert_eq!(prime_stream("7..20").unwrap(), vec![7, 11, 13, 17, 19]);
        assert_eq!(prime_stream("193, 97").unwrap(), vec![97, 193]);
        assert!(prime_stream("2 mod 4 in 2..20").is_err());
        assert!(prime_stream("91").is_err());
    }

    #[test]
    fn arithmetic_helpers() {
        assert_eq!(factorize(336), vec![(2, 4), (3, 1), (7, 1)]);
        assert_eq!(totient(84), 24);
        assert_eq!(pow_mod(3, 6, 7), 1);
    }
}

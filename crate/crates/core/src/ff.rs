//! Finite fields `F_{p^d}` with complete discrete-logarithm tables.
//!
//! Elements are encoded as integers `c_0 + c_1 p + ... + c_{d-1} p^{d-1}` where
//! `c_i` are the coefficients of the residue modulo the defining polynomial.
//! Constants of the prime field therefore keep their usual value, and `1` is
//! encoded as `1`.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::primes::{factorize, is_prime, mul_mod, pow_mod};

/// Encoded field element.
pub type Elem = u32;

/// Default cap on `q`, overridable through `HYPERTRACE_FIELD_BOUND`.
pub const DEFAULT_FIELD_BOUND: u64 = 1 << 24;
const HARD_FIELD_BOUND: u64 = u32::MAX as u64;
const NO_LOG: u32 = u32::MAX;

/// The configured bound on field size.
pub fn field_bound() -> u64 {
    std::env::var("HYPERTRACE_FIELD_BOUND")
        .ok()
        .and_then(|v| v.trim().parse::<u64>().ok())
        .map(|b| b.min(HARD_FIELD_BOUND))
        .unwrap_or(DEFAULT_FIELD_BOUND)
}

/// A realized finite field with generator and log/antilog tables.
#[derive(Debug)]
pub struct FiniteField {
    p: u64,
    d: u32,
    q: u64,
    modulus: Vec<u64>,
    generator: Elem,
    log: Vec<u32>,
    exp: Vec<u32>,
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.d == other.d && self.modulus == other.modulus && self.generator == other.generator
    }
}
impl Eq for FiniteField {}

/// Build `F_{p^d}` under the configured bound.
pub fn make_field(p: u64, d: u32, modulus: Option<Vec<u64>>) -> Result<Arc<FiniteField>> {
    FiniteField::with_bound(p, d, modulus, field_bound()).map(Arc::new)
}

/// Parse `"p"` or `"p^d"` and build the field with the default modulus.
pub fn parse_field(spec: &str) -> Result<Arc<FiniteField>> {
    let bad = || Error::Parse(format!("field {spec:?}"));
    let (p, d) = match spec.trim().split_once('^') {
        Some((p, d)) => (p.trim().parse().map_err(|_| bad())?, d.trim().parse().map_err(|_| bad())?),
        None => (spec.trim().parse().map_err(|_| bad())?, 1),
    };
    make_field(p, d, None)
}

impl FiniteField {
    pub fn with_bound(p: u64, d: u32, modulus: Option<Vec<u64>>, bound: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if d == 0 {
            return Err(Error::InvalidModulus("degree must be at least 1".into()));
        }
        let q = (p as u128).checked_pow(d).unwrap_or(u128::MAX);
        if q > bound.min(HARD_FIELD_BOUND) as u128 {
            return Err(Error::FieldTooLarge { q, bound });
        }
        let q = q as u64;
        let modulus = match modulus {
            Some(m) => {
                if m.len() != d as usize + 1 || m[d as usize] % p != 1 {
                    return Err(Error::InvalidModulus(format!("expected monic of degree {d}")));
                }
                let m: Vec<u64> = m.into_iter().map(|c| c % p).collect();
                if !is_irreducible(&m, p) {
                    return Err(Error::ReducibleModulus(p));
                }
                m
            }
            None => lowest_irreducible(p, d),
        };
        let mut field = FiniteField { p, d, q, modulus, generator: 0, log: Vec::new(), exp: Vec::new() };
        field.generator = field.find_generator();
        field.build_tables();
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }
    pub fn d(&self) -> u32 {
        self.d
    }
    pub fn q(&self) -> u64 {
        self.q
    }
    /// Monic defining polynomial, low degree first.
    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }
    pub fn generator(&self) -> Elem {
        self.generator
    }
    /// Order of the multiplicative group.
    pub fn order(&self) -> u64 {
        self.q - 1
    }

    pub fn zero(&self) -> Elem {
        0
    }
    pub fn one(&self) -> Elem {
        1
    }

    /// Image of an integer in the prime field.
    pub fn from_int(&self, n: i64) -> Elem {
        n.rem_euclid(self.p as i64) as Elem
    }

    /// Coefficients of the residue, low degree first.
    pub fn digits(&self, a: Elem) -> Vec<u64> {
        let mut a = a as u64;
        (0..self.d)
            .map(|_| {
                let c = a % self.p;
                a /= self.p;
                c
            })
            .collect()
    }

    pub fn from_digits(&self, coeffs: &[u64]) -> Elem {
        coeffs
            .iter()
            .rev()
            .fold(0u64, |acc, &c| acc * self.p + c % self.p) as Elem
    }

    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        if self.d == 1 {
            return ((a as u64 + b as u64) % self.p) as Elem;
        }
        self.digitwise(a, b, |x, y| (x + y) % self.p)
    }

    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        if self.d == 1 {
            return ((a as u64 + self.p - b as u64) % self.p) as Elem;
        }
        self.digitwise(a, b, |x, y| (x + self.p - y) % self.p)
    }

    pub fn neg(&self, a: Elem) -> Elem {
        self.sub(0, a)
    }

    fn digitwise(&self, a: Elem, b: Elem, f: impl Fn(u64, u64) -> u64) -> Elem {
        let (mut a, mut b) = (a as u64, b as u64);
        let (mut out, mut scale) = (0u64, 1u64);
        for _ in 0..self.d {
            out += f(a % self.p, b % self.p) * scale;
            a /= self.p;
            b /= self.p;
            scale *= self.p;
        }
        out as Elem
    }

    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        if a == 0 || b == 0 {
            return 0;
        }
        let k = (self.log[a as usize] as u64 + self.log[b as usize] as u64) % (self.q - 1);
        self.exp[k as usize]
    }

    pub fn inv(&self, a: Elem) -> Result<Elem> {
        if a == 0 {
            return Err(Error::DivisionByZero);
        }
        let k = (self.q - 1 - self.log[a as usize] as u64) % (self.q - 1);
        Ok(self.exp[k as usize])
    }

    pub fn div(&self, a: Elem, b: Elem) -> Result<Elem> {
        Ok(self.mul(a, self.inv(b)?))
    }

    /// `a^n` for any integer `n`; `0^n` is 0 for `n > 0`, 1 for `n = 0`, an error for `n < 0`.
    pub fn pow(&self, a: Elem, n: i64) -> Result<Elem> {
        if a == 0 {
            return match n.signum() {
                0 => Ok(1),
                1 => Ok(0),
                _ => Err(Error::DivisionByZero),
            };
        }
        let m = (self.q - 1) as i128;
        let k = (self.log[a as usize] as i128 * n as i128).rem_euclid(m);
        Ok(self.exp[k as usize])
    }

    /// The discrete logarithm of `a` to the base of the generator.
    pub fn dlog(&self, a: Elem) -> Result<u64> {
        self.log_of(a).ok_or(Error::ZeroElement)
    }

    /// `None` for zero.
    #[inline]
    pub fn log_of(&self, a: Elem) -> Option<u64> {
        match self.log[a as usize] {
            NO_LOG => None,
            k => Some(k as u64),
        }
    }

    /// `generator^k`.
    #[inline]
    pub fn gen_pow(&self, k: u64) -> Elem {
        self.exp[(k % (self.q - 1)) as usize]
    }

    /// `a^p`.
    pub fn frobenius(&self, a: Elem) -> Elem {
        match self.log_of(a) {
            None => 0,
            Some(k) => self.gen_pow(mul_mod(k, self.p, self.q - 1)),
        }
    }

    /// `a + a^p + ... + a^{p^{d-1}}`, as a residue in `0..p`.
    pub fn abs_trace(&self, a: Elem) -> u64 {
        let mut acc = 0;
        let mut x = a;
        for _ in 0..self.d {
            acc = self.add(acc, x);
            x = self.frobenius(x);
        }
        debug_assert!((acc as u64) < self.p);
        acc as u64
    }

    /// All elements in encoding order.
    pub fn elements(&self) -> std::ops::Range<Elem> {
        0..self.q as Elem
    }

    fn mul_poly(&self, a: Elem, b: Elem) -> Elem {
        let prod = poly_mulmod(&self.digits(a), &self.digits(b), &self.modulus, self.p);
        self.from_digits(&prod)
    }

    fn pow_poly(&self, a: Elem, mut n: u64) -> Elem {
        let (mut acc, mut base) = (1, a);
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            n >>= 1;
        }
        acc
    }

    fn find_generator(&self) -> Elem {
        let n = self.q - 1;
        let primes: Vec<u64> = factorize(n).into_iter().map(|(r, _)| r).collect();
        if self.d == 1 {
            return (1..self.q)
                .find(|&g| primes.iter().all(|&r| pow_mod(g, n / r, self.p) != 1))
                .expect("cyclic group has a generator") as Elem;
        }
        (1..self.q as Elem)
            .find(|&g| primes.iter().all(|&r| self.pow_poly(g, n / r) != 1))
            .expect("cyclic group has a generator")
    }

    fn build_tables(&mut self) {
        let n = (self.q - 1) as usize;
        let mut log = vec![NO_LOG; self.q as usize];
        let mut exp = vec![0u32; n];
        let mut x: Elem = 1;
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x;
            log[x as usize] = k as u32;
            x = if self.d == 1 {
                mul_mod(x as u64, self.generator as u64, self.p) as Elem
            } else {
                self.mul_poly(x, self.generator)
            };
        }
        debug_assert_eq!(x, 1);
        self.log = log;
        self.exp = exp;
    }
}

fn trim(a: &mut Vec<u64>) {
    while a.last() == Some(&0) {
        a.pop();
    }
}

fn poly_rem(a: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut r = a.to_vec();
    trim(&mut r);
    let dm = m.len() - 1;
    let lead_inv = pow_mod(m[dm], p - 2, p);
    while r.len() > dm {
        let shift = r.len() - 1 - dm;
        let c = mul_mod(*r.last().unwrap(), lead_inv, p);
        for (i, &mi) in m.iter().enumerate() {
            let t = mul_mod(c, mi, p);
            r[shift + i] = (r[shift + i] + p - t) % p;
        }
        trim(&mut r);
    }
    r
}

fn poly_mulmod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len()];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    let mut r = poly_rem(&prod, m, p);
    r.resize(m.len() - 1, 0);
    r
}

fn poly_gcd(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// Rabin's irreducibility test for a monic polynomial over `F_p`.
fn is_irreducible(f: &[u64], p: u64) -> bool {
    let d = f.len() - 1;
    if d == 1 {
        return true;
    }
    if f[0] == 0 {
        return false;
    }
    let x = {
        let mut v = vec![0u64; d];
        v[1] = 1;
        v
    };
    let frob = |h: &[u64]| -> Vec<u64> {
        let (mut acc, mut base, mut n) = (vec![1u64], h.to_vec(), p);
        while n > 0 {
            if n & 1 == 1 {
                acc = poly_mulmod(&acc, &base, f, p);
            }
            base = poly_mulmod(&base, &base, f, p);
            n >>= 1;
        }
        acc
    };
    let mut powers = vec![x.clone()];
    for _ in 0..d {
        let next = frob(powers.last().unwrap());
        powers.push(next);
    }
    let mut hd = powers[d].clone();
    trim(&mut hd);
    let mut xt = x.clone();
    trim(&mut xt);
    if hd != xt {
        return false;
    }
    factorize(d as u64).into_iter().all(|(r, _)| {
        let mut h = powers[d / r as usize].clone();
        h.resize(d, 0);
        h[1] = (h[1] + p - 1) % p;
        let g = poly_gcd(&h, f, p);
        g.len() == 1
    })
}

/// Smallest monic irreducible of degree `d`, ordering the non-leading coefficients
/// by their base-`p` encoding.
fn lowest_irreducible(p: u64, d: u32) -> Vec<u64> {
    let d = d as usize;
    let count = p.pow(d as u32);
    (0..count)
        .map(|code| {
            let mut m = Vec::with_capacity(d + 1);
            let mut c = code;
            for _ in 0..d {
                m.push(c % p);
                c /= p;
            }
            m.push(1);
            m
        })
        .find(|m| is_irreducible(m, p))
        .expect("irreducible polynomials exist in every degree")
}

//! Multimodular inversion in `Z[x]/(Φ)`: invert modulo many word-size primes,
//! lift by CRT and rational reconstruction, and accept only an exactly verified result.

use std::sync::{Mutex, OnceLock};

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::primes::{is_prime, mul_mod, pow_mod};

const MAX_PRIMES: usize = 4096;

fn prime(i: usize) -> u64 {
    static PRIMES: OnceLock<Mutex<Vec<u64>>> = OnceLock::new();
    let mut ps = PRIMES.get_or_init(|| Mutex::new(Vec::new())).lock().unwrap();
    let mut next = ps.last().copied().unwrap_or(1 << 62);
    while ps.len() <= i {
        next -= 1;
        while !is_prime(next) {
            next -= 1;
        }
        ps.push(next);
    }
    ps[i]
}

fn inv_mod(a: u64, m: u64) -> u64 {
    pow_mod(a, m - 2, m)
}

fn trim(v: &mut Vec<u64>) {
    while v.last() == Some(&0) {
        v.pop();
    }
}

/// Inverse of `a` modulo the monic `f` over `F_m`, or `None` when they share a factor.
fn poly_inverse_mod(a: &[u64], f: &[u64], m: u64) -> Option<Vec<u64>> {
    let sub_mul = |x: &mut Vec<u64>, y: &[u64], c: u64, shift: usize| {
        if x.len() < y.len() + shift {
            x.resize(y.len() + shift, 0);
        }
        for (i, &v) in y.iter().enumerate() {
            let t = mul_mod(v, c, m);
            let s = &mut x[i + shift];
            *s = if *s >= t { *s - t } else { *s + m - t };
        }
    };
    let (mut r0, mut r1) = (f.to_vec(), a.to_vec());
    let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (vec![], vec![1]);
    trim(&mut r1);
    loop {
        if r1.is_empty() {
            return None;
        }
        if r1.len() == 1 {
            let c = inv_mod(r1[0], m);
            let mut out: Vec<u64> = s1.iter().map(|&v| mul_mod(v, c, m)).collect();
            out.resize(f.len() - 1, 0);
            return Some(out);
        }
        // r0 = q r1 + r, s_new = s0 - q s1
        let lead = inv_mod(*r1.last().unwrap(), m);
        let mut s_new = s0.clone();
        while r0.len() >= r1.len() {
            let shift = r0.len() - r1.len();
            let c = mul_mod(*r0.last().unwrap(), lead, m);
            sub_mul(&mut r0, &r1, c, shift);
            sub_mul(&mut s_new, &s1, c, shift);
            r0.pop();
            trim(&mut r0);
        }
        trim(&mut s_new);
        std::mem::swap(&mut r0, &mut r1);
        s0 = std::mem::replace(&mut s1, s_new);
    }
}

/// `n / d` with `|n|, d ≤ √(M/2)` congruent to `u` modulo `M`.
fn rational_reconstruct(u: &BigInt, m: &BigInt, bound: &BigInt) -> Option<(BigInt, BigInt)> {
    let (mut r0, mut r1) = (m.clone(), u.mod_floor(m));
    let (mut t0, mut t1) = (BigInt::zero(), BigInt::one());
    while &r1 > bound {
        let q = &r0 / &r1;
        let r2 = &r0 - &q * &r1;
        let t2 = &t0 - &q * &t1;
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1.is_zero() || &t1.abs() > bound || !r1.gcd(&t1).is_one() {
        return None;
    }
    Some(if t1.is_negative() { (-r1, -t1) } else { (r1, t1) })
}

/// `a · b mod Φ` over `Z`, with `powers[k]` the reduction of `x^k`.
pub(crate) fn mul_reduce(a: &[BigInt], b: &[BigInt], powers: &[Vec<i64>], n: usize) -> Vec<BigInt> {
    small_mul_reduce(a, b, powers, n).unwrap_or_else(|| big_mul_reduce(a, b, powers, n))
}

/// Machine-integer path; `None` on overflow.
fn small_mul_reduce(a: &[BigInt], b: &[BigInt], powers: &[Vec<i64>], n: usize) -> Option<Vec<BigInt>> {
    let a: Vec<i128> = a.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<_>>()?;
    let b: Vec<i128> = b.iter().map(|x| x.to_i64().map(i128::from)).collect::<Option<_>>()?;
    let mut prod = vec![0i128; 2 * n - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = prod[i + j].checked_add(x * y)?;
        }
    }
    let mut out = vec![0i128; n];
    for (k, c) in prod.into_iter().enumerate() {
        if c == 0 {
            continue;
        }
        if k < n {
            out[k] = out[k].checked_add(c)?;
            continue;
        }
        for (o, &r) in out.iter_mut().zip(&powers[k % powers.len()]) {
            if r != 0 {
                *o = o.checked_add(c.checked_mul(r as i128)?)?;
            }
        }
    }
    Some(out.into_iter().map(BigInt::from).collect())
}

fn big_mul_reduce(a: &[BigInt], b: &[BigInt], powers: &[Vec<i64>], n: usize) -> Vec<BigInt> {
    let mut prod = vec![BigInt::zero(); 2 * n - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            prod[i + j] += x * y;
        }
    }
    let mut out = vec![BigInt::zero(); n];
    for (k, c) in prod.into_iter().enumerate() {
        if c.is_zero() {
            continue;
        }
        if k < n {
            out[k] += c;
            continue;
        }
        for (o, &r) in out.iter_mut().zip(&powers[k % powers.len()]) {
            if r != 0 {
                *o += &c * r;
            }
        }
    }
    out
}

/// Integer inverse data `(b, D)` with `a · b ≡ D (mod Φ)`, `D > 0`.
///
/// `poly` is `Φ` (monic, lowest degree first), `powers[k]` reduces `x^k` for `k < L`.
/// Returns `None` if no verified result appears within the prime budget.
pub(crate) fn inverse(a: &[BigInt], poly: &[i64], powers: &[Vec<i64>]) -> Option<(Vec<BigInt>, BigInt)> {
    let n = poly.len() - 1;
    let mut modulus = BigInt::one();
    let mut acc = vec![BigInt::zero(); n];
    let mut used = 0;
    let mut next_try = 1;
    for i in 0..MAX_PRIMES {
        let m = prime(i);
        let bm = BigInt::from(m);
        let reduce = |x: &BigInt| x.mod_floor(&bm).to_u64().unwrap();
        let f: Vec<u64> = poly.iter().map(|&c| c.rem_euclid(m as i64) as u64).collect();
        let am: Vec<u64> = a.iter().map(reduce).collect();
        let Some(inv) = poly_inverse_mod(&am, &f, m) else { continue };
        // CRT: acc ← acc + modulus · ((inv - acc) · modulus⁻¹ mod m)
        let mod_inv = inv_mod(reduce(&modulus), m);
        for (x, &v) in acc.iter_mut().zip(&inv) {
            let diff = (v + m - reduce(x)) % m;
            let k = mul_mod(diff, mod_inv, m);
            *x += &modulus * k;
        }
        modulus *= &bm;
        used += 1;
        if used < next_try {
            continue;
        }
        next_try = used + (used + 3) / 4;
        if let Some(found) = try_lift(a, &acc, &modulus, powers, n) {
            return Some(found);
        }
    }
    None
}

fn try_lift(a: &[BigInt], acc: &[BigInt], modulus: &BigInt, powers: &[Vec<i64>], n: usize) -> Option<(Vec<BigInt>, BigInt)> {
    let bound = (modulus >> 1usize).sqrt();
    let mut den = BigInt::one();
    let mut nums = Vec::with_capacity(n);
    for u in acc {
        let scaled = (u * &den).mod_floor(modulus);
        let (num, d) = rational_reconstruct(&scaled, modulus, &bound)?;
        // rescale the earlier numerators to the new common denominator
        if !d.is_one() {
            for x in nums.iter_mut() {
                *x *= &d;
            }
            den *= &d;
        }
        nums.push(num);
    }
    let g = nums.iter().fold(den.clone(), |g, x| g.gcd(x));
    if !g.is_one() {
        nums.iter_mut().for_each(|x| *x /= &g);
        den /= &g;
    }
    let check = mul_reduce(a, &nums, powers, n);
    let ok = check[0] == den && check[1..].iter().all(|c| c.is_zero());
    if den.sign() != Sign::Plus || !ok {
        return None;
    }
    Some((nums, den))
}

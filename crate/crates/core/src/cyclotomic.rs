//! Exact arithmetic in cyclotomic fields `Q(ζ_L)`.
//!
//! Elements are stored in the power basis `1, ζ, …, ζ^{φ(L)-1}` as the canonical
//! residue modulo `Φ_L`, so equality at a common level is coefficientwise.
//! [`IntCyclo`] is the integral fast path used inside verification sweeps.

use std::collections::HashMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::{Arc, Mutex, OnceLock};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::poly::QPoly;
use crate::primes::{gcd, lcm};

/// `Φ_L` as integer coefficients, lowest degree first.
pub fn cyclotomic_polynomial(l: u32) -> Vec<i64> {
    level(l).poly.clone()
}

fn compute_cyclotomic(l: u32) -> Vec<i64> {
    // x^L - 1 divided by Φ_e for every proper divisor e.
    let mut num = vec![0i64; l as usize + 1];
    num[0] = -1;
    num[l as usize] = 1;
    for e in 1..l {
        if l % e == 0 {
            num = div_monic(&num, &level(e).poly);
        }
    }
    num
}

fn div_monic(a: &[i64], m: &[i64]) -> Vec<i64> {
    let dm = m.len() - 1;
    let mut r = a.to_vec();
    let mut q = vec![0i64; a.len() - dm];
    for k in (0..q.len()).rev() {
        let c = r[k + dm];
        q[k] = c;
        for (i, &mi) in m.iter().enumerate() {
            r[k + i] -= c * mi;
        }
    }
    debug_assert!(r.iter().all(|&x| x == 0));
    q
}

/// Per-level tables: `Φ_L` and the reductions of `ζ^k` for `0 ≤ k < L`.
#[derive(Debug)]
pub(crate) struct Level {
    pub phi: usize,
    pub poly: Vec<i64>,
    pub powers: Vec<Vec<i64>>,
}

pub(crate) fn level(l: u32) -> Arc<Level> {
    assert!(l >= 1, "cyclotomic level must be positive");
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Level>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(hit) = cache.lock().unwrap().get(&l) {
        return hit.clone();
    }
    let poly = if l == 1 { vec![-1, 1] } else { compute_cyclotomic(l) };
    let phi = poly.len() - 1;
    let mut powers = Vec::with_capacity(l as usize);
    let mut v = vec![0i64; phi];
    v[0] = 1;
    for _ in 0..l {
        powers.push(v.clone());
        // multiply by x and reduce with the monic Φ_L
        let top = v[phi - 1];
        for i in (1..phi).rev() {
            v[i] = v[i - 1];
        }
        v[0] = 0;
        if top != 0 {
            for i in 0..phi {
                v[i] -= top * poly[i];
            }
        }
    }
    let lv = Arc::new(Level { phi, poly, powers });
    cache.lock().unwrap().insert(l, lv.clone());
    lv
}

/// Euler's φ(L), the degree of `Q(ζ_L)`.
pub fn phi(l: u32) -> usize {
    level(l).phi
}

/// `ζ_L^k` as a symbolic root of unity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RootOfUnity {
    pub level: u32,
    pub exponent: u32,
}

impl RootOfUnity {
    pub fn new(level: u32, exponent: i64) -> Self {
        RootOfUnity { level, exponent: exponent.rem_euclid(level as i64) as u32 }
    }

    pub fn to_cyclo(self) -> CycloNum {
        CycloNum::root(self.level, self.exponent as i64)
    }

    pub fn inverse(self) -> Self {
        Self::new(self.level, -(self.exponent as i64))
    }
}

/// An exact element of `Q(ζ_L)`.
#[derive(Clone, Debug)]
pub struct CycloNum {
    level: u32,
    coeffs: Vec<BigRational>,
}

impl CycloNum {
    /// Build from power-basis coefficients of length `φ(L)`.
    pub fn new(level: u32, coeffs: Vec<BigRational>) -> Result<Self> {
        if coeffs.len() != phi(level) {
            return Err(Error::InvalidInput(format!(
                "level {level} needs {} coefficients, got {}",
                phi(level),
                coeffs.len()
            )));
        }
        Ok(CycloNum { level, coeffs })
    }

    pub fn zero(level: u32) -> Self {
        CycloNum { level, coeffs: vec![BigRational::zero(); phi(level)] }
    }

    pub fn from_rational(level: u32, r: BigRational) -> Self {
        let mut c = Self::zero(level);
        c.coeffs[0] = r;
        c
    }

    pub fn from_int(level: u32, n: i64) -> Self {
        Self::from_rational(level, BigRational::from_integer(BigInt::from(n)))
    }

    pub fn one(level: u32) -> Self {
        Self::from_int(level, 1)
    }

    /// `ζ_L^k`.
    pub fn root(level: u32, k: i64) -> Self {
        let lv = self::level(level);
        let row = &lv.powers[k.rem_euclid(level as i64) as usize];
        CycloNum { level, coeffs: row.iter().map(|&x| BigRational::from_integer(x.into())).collect() }
    }

    /// `Σ_k counts[k] ζ_L^k` for a histogram indexed by exponent mod `L`.
    pub fn from_exponent_counts(level: u32, counts: &[i64]) -> Self {
        IntCyclo::from_counts(level, counts).to_cyclo()
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    /// The value as a rational, if it lies in Q.
    pub fn as_rational(&self) -> Option<BigRational> {
        self.coeffs[1..].iter().all(|c| c.is_zero()).then(|| self.coeffs[0].clone())
    }

    /// Numerators over the least common denominator.
    fn integral(&self) -> (Vec<BigInt>, BigInt) {
        let d = self.coeffs.iter().fold(BigInt::one(), |acc, c| if c.denom().is_one() { acc } else { acc.lcm(c.denom()) });
        let nums = self
            .coeffs
            .iter()
            .map(|c| if c.denom() == &d { c.numer().clone() } else { c.numer() * (&d / c.denom()) })
            .collect();
        (nums, d)
    }

    fn from_integral(level: u32, nums: Vec<BigInt>, den: &BigInt) -> CycloNum {
        let coeffs = nums
            .into_iter()
            .map(|x| if den.is_one() { BigRational::from_integer(x) } else { BigRational::new(x, den.clone()) })
            .collect();
        CycloNum { level, coeffs }
    }

    /// Re-express at level `m`, a multiple of the current level.
    pub fn lift_level(&self, m: u32) -> Result<Self> {
        if m % self.level != 0 {
            return Err(Error::InvalidInput(format!("level {} does not divide {m}", self.level)));
        }
        if m == self.level {
            return Ok(self.clone());
        }
        let step = (m / self.level) as usize;
        let lv = level(m);
        let mut out = vec![BigRational::zero(); lv.phi];
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&lv.powers[k * step % m as usize]) {
                if r != 0 {
                    *o += c * BigRational::from_integer(r.into());
                }
            }
        }
        Ok(CycloNum { level: m, coeffs: out })
    }

    /// Re-express at the smallest divisor of the level whose field contains the value.
    pub fn minimal_level(&self) -> CycloNum {
        // σ_u fixes Q(ζ_l) exactly when u ≡ 1 mod l; screen levels numerically, confirm exactly
        let units = self.embeddings();
        let vals: Vec<Complex64> = units.iter().map(|&u| self.embed(u)).collect();
        let scale: f64 = self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::INFINITY).abs()).sum::<f64>().max(1.0);
        let plausible = |l: u32| {
            units.iter().zip(&vals).all(|(&u, v)| {
                let rep = u.rem_euclid(l as i64);
                let w = units.iter().position(|&x| x.rem_euclid(l as i64) == rep).unwrap();
                (v - vals[w]).norm() <= 1e-6 * scale
            })
        };
        (1..self.level)
            .filter(|l| self.level % l == 0 && plausible(*l))
            .find_map(|l| self.drop_level(l))
            .unwrap_or_else(|| self.clone())
    }

    /// Re-express at a divisor `l` of the level, if the value lies in `Q(ζ_l)`.
    pub fn drop_level(&self, l: u32) -> Option<Self> {
        if self.level % l != 0 {
            return None;
        }
        let n = phi(l);
        let step = (self.level / l) as usize;
        if n == 0 || (n - 1) * step < self.coeffs.len() {
            // ζ_l^j = ζ^{j·step} is itself a basis vector: read the coordinates off, then check
            let cand = CycloNum { level: l, coeffs: (0..n).map(|j| self.coeffs[j * step].clone()).collect() };
            return (cand.at_level(self.level).coeffs == self.coeffs).then_some(cand);
        }
        let cols: Vec<Vec<BigRational>> = (0..n)
            .map(|j| CycloNum::root(l, j as i64).lift_level(self.level).unwrap().coeffs)
            .collect();
        let rows = self.coeffs.len();
        // augmented matrix rows × (n + 1)
        let mut m: Vec<Vec<BigRational>> = (0..rows)
            .map(|i| {
                let mut r: Vec<BigRational> = cols.iter().map(|c| c[i].clone()).collect();
                r.push(self.coeffs[i].clone());
                r
            })
            .collect();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..n {
            let Some(pr) = (row..rows).find(|&r| !m[r][col].is_zero()) else { continue };
            m.swap(row, pr);
            let inv = m[row][col].recip();
            for x in m[row].iter_mut() {
                *x *= &inv;
            }
            for r in 0..rows {
                if r != row && !m[r][col].is_zero() {
                    let f = m[r][col].clone();
                    for c in 0..=n {
                        let t = &f * &m[row][c];
                        m[r][c] -= t;
                    }
                }
            }
            pivots.push(col);
            row += 1;
        }
        if m[row..].iter().any(|r| !r[n].is_zero()) {
            return None;
        }
        let mut out = vec![BigRational::zero(); n];
        for (i, &c) in pivots.iter().enumerate() {
            out[c] = m[i][n].clone();
        }
        Some(CycloNum { level: l, coeffs: out })
    }

    fn at_level(&self, m: u32) -> CycloNum {
        self.lift_level(m).expect("common level is a multiple")
    }

    fn common(a: &CycloNum, b: &CycloNum) -> (CycloNum, CycloNum) {
        if a.level == b.level {
            return (a.clone(), b.clone());
        }
        let m = lcm(a.level as u64, b.level as u64) as u32;
        (a.at_level(m), b.at_level(m))
    }

    fn reduce(level: u32, prod: &[BigRational]) -> CycloNum {
        let lv = self::level(level);
        let mut out = vec![BigRational::zero(); lv.phi];
        for (k, c) in prod.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&lv.powers[k % level as usize]) {
                if r != 0 {
                    *o += c * BigRational::from_integer(r.into());
                }
            }
        }
        CycloNum { level, coeffs: out }
    }

    fn permute(&self, f: impl Fn(usize) -> usize) -> CycloNum {
        let l = self.level as usize;
        let mut full = vec![BigRational::zero(); l];
        for (k, c) in self.coeffs.iter().enumerate() {
            full[f(k) % l] += c;
        }
        Self::reduce(self.level, &full)
    }

    /// Complex conjugation `ζ ↦ ζ^{-1}`.
    pub fn conj(&self) -> CycloNum {
        let l = self.level as usize;
        self.permute(|k| (l - k % l) % l)
    }

    /// The automorphism `ζ ↦ ζ^u` for a unit `u` mod `L`.
    pub fn galois(&self, u: i64) -> Result<CycloNum> {
        let l = self.level as i64;
        if gcd(u.rem_euclid(l) as u64, l as u64) != 1 {
            return Err(Error::NonUnitEmbedding { embedding: u, level: self.level });
        }
        let u = u.rem_euclid(l) as usize;
        Ok(self.permute(|k| k * u))
    }

    /// Multiply by `ζ_L^k` at this element's level (lifting when `L` does not divide it).
    pub fn mul_root(&self, l: u32, k: i64) -> CycloNum {
        self * &CycloNum::root(l, k)
    }

    pub fn inv(&self) -> Result<CycloNum> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let lv = level(self.level);
        // x = a / d with a integral; x⁻¹ = d·b / D where a·b = D
        let (a, d) = self.integral();
        if let Some((b, den)) = crate::modular::inverse(&a, &lv.poly, &lv.powers) {
            return Ok(CycloNum::from_integral(self.level, b.into_iter().map(|x| x * &d).collect(), &den));
        }
        let modulus = QPoly::from_i64s(&lv.poly);
        let a = QPoly::new(self.coeffs.clone());
        let (g, s, _) = QPoly::ext_gcd(&a, &modulus);
        debug_assert_eq!(g, QPoly::one());
        let r = s.div_rem(&modulus).1;
        let mut coeffs = r.coeffs().to_vec();
        coeffs.resize(lv.phi, BigRational::zero());
        Ok(CycloNum { level: self.level, coeffs })
    }

    pub fn div(&self, other: &CycloNum) -> Result<CycloNum> {
        Ok(self * &other.inv()?)
    }

    pub fn scale(&self, r: &BigRational) -> CycloNum {
        CycloNum { level: self.level, coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn pow(&self, n: u32) -> CycloNum {
        (0..n).fold(CycloNum::one(self.level), |acc, _| &acc * self)
    }

    /// Evaluate at `ζ_L = e^{2πi·σ/L}`.
    pub fn embed_complex(&self, sigma: i64) -> Result<Complex64> {
        if gcd(sigma.rem_euclid(self.level as i64) as u64, self.level as u64) != 1 {
            return Err(Error::NonUnitEmbedding { embedding: sigma, level: self.level });
        }
        Ok(self.embed(sigma))
    }

    pub(crate) fn embed(&self, sigma: i64) -> Complex64 {
        let theta = 2.0 * std::f64::consts::PI * sigma as f64 / self.level as f64;
        self.coeffs
            .iter()
            .enumerate()
            .map(|(k, c)| Complex64::from_polar(c.to_f64().unwrap_or(f64::NAN), theta * k as f64))
            .sum()
    }

    /// Units modulo the level, i.e. the complex embeddings.
    pub fn embeddings(&self) -> Vec<i64> {
        (1..=self.level as i64).filter(|&s| gcd(s as u64, self.level as u64) == 1).collect()
    }
}

impl PartialEq for CycloNum {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = CycloNum::common(self, other);
        a.coeffs == b.coeffs
    }
}
impl Eq for CycloNum {}

impl Add for &CycloNum {
    type Output = CycloNum;
    fn add(self, o: &CycloNum) -> CycloNum {
        let (a, b) = CycloNum::common(self, o);
        CycloNum { level: a.level, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect() }
    }
}

impl Sub for &CycloNum {
    type Output = CycloNum;
    fn sub(self, o: &CycloNum) -> CycloNum {
        let (a, b) = CycloNum::common(self, o);
        CycloNum { level: a.level, coeffs: a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect() }
    }
}

impl Neg for &CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        CycloNum { level: self.level, coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

impl Mul for &CycloNum {
    type Output = CycloNum;
    fn mul(self, o: &CycloNum) -> CycloNum {
        let (a, b) = CycloNum::common(self, o);
        let lv = level(a.level);
        let ((na, da), (nb, db)) = (a.integral(), b.integral());
        let prod = crate::modular::mul_reduce(&na, &nb, &lv.powers, lv.phi);
        CycloNum::from_integral(a.level, prod, &(da * db))
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for CycloNum {
            type Output = CycloNum;
            fn $m(self, o: CycloNum) -> CycloNum {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycloNum {
    type Output = CycloNum;
    fn neg(self) -> CycloNum {
        -&self
    }
}

impl fmt::Display for CycloNum {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cs: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        let z = self.embed(1);
        write!(f, "[{}]@{} ≈ {:.6}{:+.6}i", cs.join(", "), self.level, z.re, z.im)
    }
}

#[derive(Serialize, Deserialize)]
struct CycloJson {
    level: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycloNum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycloJson { level: self.level, coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycloNum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = CycloJson::deserialize(d)?;
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| parse_rational(s))
            .collect::<Result<Vec<_>>>()
            .map_err(serde::de::Error::custom)?;
        CycloNum::new(raw.level, coeffs).map_err(serde::de::Error::custom)
    }
}

/// Parse `"n"` or `"n/d"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("rational {s:?}"));
    let s = s.trim();
    let r = match s.split_once('/') {
        Some((n, d)) => {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            BigRational::new(n, d)
        }
        None => BigRational::from_integer(s.parse().map_err(|_| bad())?),
    };
    Ok(r)
}

/// An element of `Z[ζ_L]` with machine-integer coefficients, for hot-loop comparisons.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntCyclo {
    level: u32,
    coeffs: Vec<i128>,
}

impl IntCyclo {
    /// Reduce a histogram `Σ counts[k] ζ^k`.
    pub fn from_counts(level: u32, counts: &[i64]) -> Self {
        let lv = self::level(level);
        let mut out = vec![0i128; lv.phi];
        for (k, &c) in counts.iter().enumerate() {
            if c == 0 {
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&lv.powers[k % level as usize]) {
                *o += c as i128 * r as i128;
            }
        }
        IntCyclo { level, coeffs: out }
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn mul(&self, o: &IntCyclo) -> IntCyclo {
        assert_eq!(self.level, o.level, "IntCyclo operands must share a level");
        let lv = level(self.level);
        let n = self.coeffs.len();
        let mut prod = vec![0i128; 2 * n - 1];
        for (i, &x) in self.coeffs.iter().enumerate() {
            if x == 0 {
                continue;
            }
            for (j, &y) in o.coeffs.iter().enumerate() {
                prod[i + j] += x * y;
            }
        }
        let mut out = vec![0i128; n];
        for (k, &c) in prod.iter().enumerate() {
            if c == 0 {
                continue;
            }
            if k < n {
                out[k] += c;
                continue;
            }
            for (o, &r) in out.iter_mut().zip(&lv.powers[k % self.level as usize]) {
                *o += c * r as i128;
            }
        }
        IntCyclo { level: self.level, coeffs: out }
    }

    pub fn to_cyclo(&self) -> CycloNum {
        CycloNum {
            level: self.level,
            coeffs: self.coeffs.iter().map(|&c| BigRational::from_integer(BigInt::from(c))).collect(),
        }
    }
}

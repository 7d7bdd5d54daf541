//! Multiplicative and additive characters of finite fields.
//!
//! A multiplicative character is stored as an exponent `e` mod `q-1`: it sends
//! `g^a` to `ζ_{q-1}^{ea}` for the field's generator `g`.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::ff::{Elem, FiniteField};
use crate::primes::gcd;

/// Value assigned to `χ(0)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum ZeroConvention {
    /// `χ(0) = 1` for the trivial character and `0` otherwise.
    #[default]
    Jacobi,
    /// `χ(0) = 0` for every character.
    Strict,
}

/// A multiplicative character of `F_q^×`.
#[derive(Clone)]
pub struct MultChar {
    field: Arc<FiniteField>,
    exponent: u64,
}

impl fmt::Debug for MultChar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "χ[e={} mod {}]", self.exponent, self.field.order())
    }
}

impl PartialEq for MultChar {
    fn eq(&self, o: &Self) -> bool {
        self.exponent == o.exponent && (Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field)
    }
}
impl Eq for MultChar {}

impl MultChar {
    pub fn new(field: &Arc<FiniteField>, exponent: i64) -> Self {
        let n = field.order() as i64;
        MultChar { field: field.clone(), exponent: exponent.rem_euclid(n) as u64 }
    }

    pub fn trivial(field: &Arc<FiniteField>) -> Self {
        Self::new(field, 0)
    }

    /// The quadratic character (odd characteristic).
    pub fn legendre(field: &Arc<FiniteField>) -> Result<Self> {
        Self::of_order(field, 2, 1)
    }

    /// `ω^k` where `ω` sends the generator to `ζ_M`; needs `M | q-1`.
    pub fn of_order(field: &Arc<FiniteField>, m: u64, k: i64) -> Result<Self> {
        let n = field.order();
        if m == 0 || n % m != 0 {
            return Err(Error::CongruenceViolation { q: field.q(), modulus: m });
        }
        Ok(Self::new(field, k.rem_euclid(m as i64) * (n / m) as i64))
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    pub fn exponent(&self) -> u64 {
        self.exponent
    }

    /// Exact order of the character.
    pub fn order(&self) -> u64 {
        let n = self.field.order();
        n / gcd(self.exponent, n)
    }

    pub fn is_trivial(&self) -> bool {
        self.exponent == 0
    }

    fn same_field(&self, o: &MultChar) -> Result<()> {
        if Arc::ptr_eq(&self.field, &o.field) || *self.field == *o.field {
            Ok(())
        } else {
            Err(Error::FieldMismatch)
        }
    }

    pub fn mul(&self, o: &MultChar) -> Result<MultChar> {
        self.same_field(o)?;
        Ok(Self::new(&self.field, (self.exponent + o.exponent) as i64))
    }

    pub fn div(&self, o: &MultChar) -> Result<MultChar> {
        self.same_field(o)?;
        Ok(Self::new(&self.field, self.exponent as i64 - o.exponent as i64))
    }

    pub fn conj(&self) -> MultChar {
        Self::new(&self.field, -(self.exponent as i64))
    }

    pub fn pow(&self, k: i64) -> MultChar {
        let n = self.field.order() as i128;
        Self::new(&self.field, ((self.exponent as i128 * k as i128).rem_euclid(n)) as i64)
    }

    pub fn zero_value(&self, conv: ZeroConvention) -> i64 {
        match conv {
            ZeroConvention::Jacobi if self.is_trivial() => 1,
            _ => 0,
        }
    }

    /// `e·dlog(x)` mod `q-1`, or `None` at zero.
    pub fn exponent_at(&self, x: Elem) -> Option<u64> {
        let n = self.field.order();
        self.field
            .log_of(x)
            .map(|k| ((self.exponent as u128 * k as u128) % n as u128) as u64)
    }

    /// Multiplier `s` with `χ(g^a) = ζ_W^{s·a}`; needs the order to divide `w`.
    pub fn level_multiplier(&self, w: u64) -> u64 {
        let n = self.field.order();
        assert!(w > 0 && n % w == 0 && w % self.order() == 0, "level {w} cannot carry {self:?}");
        (self.exponent / (n / w)) % w
    }

    /// `χ(x)` as an exact value at level `M = order`.
    pub fn eval(&self, x: Elem, conv: ZeroConvention) -> CycloNum {
        let m = self.order();
        match self.field.log_of(x) {
            None => CycloNum::from_int(m as u32, self.zero_value(conv)),
            Some(a) => {
                let s = self.level_multiplier(m);
                CycloNum::root(m as u32, ((s as u128 * a as u128) % m as u128) as i64)
            }
        }
    }

    /// `χ(x)` as a complex number.
    pub fn eval_complex(&self, x: Elem, conv: ZeroConvention) -> Complex64 {
        match self.exponent_at(x) {
            None => Complex64::new(self.zero_value(conv) as f64, 0.0),
            Some(k) => Complex64::from_polar(
                1.0,
                2.0 * std::f64::consts::PI * k as f64 / self.field.order() as f64,
            ),
        }
    }
}

/// The character `t ↦ χ(t^{(q-1)/N})` for the character `χ` of `μ_N` sending the
/// field's own `g^{(q-1)/N}` to `ζ_N^k`.
pub fn chi_q(k: i64, n: u64, field: &Arc<FiniteField>) -> Result<MultChar> {
    if n == 0 || (field.q() - 1) % n != 0 {
        return Err(Error::CongruenceViolation { q: field.q(), modulus: n });
    }
    MultChar::of_order(field, n, k)
}

/// As [`chi_q`], but `χ` is pinned by a chosen primitive `N`-th root of unity
/// `anchor ∈ F_q`, which is sent to `ζ_N^k`.
///
/// Anchoring every extension `F_{p^d}` at the same root from `F_p` makes the
/// resulting characters compatible with the norm maps.
pub fn chi_q_anchored(k: i64, n: u64, field: &Arc<FiniteField>, anchor: Elem) -> Result<MultChar> {
    let order = field.order();
    if n == 0 || order % n != 0 {
        return Err(Error::CongruenceViolation { q: field.q(), modulus: n });
    }
    let step = order / n;
    let la = field.dlog(anchor)?;
    if la % step != 0 || gcd(la / step, n) != 1 {
        return Err(Error::InvalidInput("anchor is not a primitive N-th root of unity".into()));
    }
    let c = (la / step) % n;
    let c_inv = mod_inverse(c as i64, n as i64).expect("unit");
    MultChar::of_order(field, n, k.rem_euclid(n as i64) * c_inv % n as i64)
}

pub(crate) fn mod_inverse(a: i64, m: i64) -> Option<i64> {
    let (mut r0, mut r1) = (m, a.rem_euclid(m));
    let (mut t0, mut t1) = (0i64, 1i64);
    while r1 != 0 {
        let q = r0 / r1;
        (r0, r1) = (r1, r0 - q * r1);
        (t0, t1) = (t1, t0 - q * t1);
    }
    (r0 == 1).then(|| t0.rem_euclid(m))
}

/// The canonical additive character `x ↦ e^{2πi·tr(x)/p}`.
#[derive(Clone, Debug)]
pub struct AdditiveChar {
    field: Arc<FiniteField>,
    base: Complex64,
}

impl AdditiveChar {
    pub fn canonical(field: &Arc<FiniteField>) -> Self {
        let base = Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI / field.p() as f64);
        AdditiveChar { field: field.clone(), base }
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        &self.field
    }

    /// `ψ_p(1)`.
    pub fn base_value(&self) -> Complex64 {
        self.base
    }

    pub fn eval(&self, x: Elem) -> Complex64 {
        let t = self.field.abs_trace(x);
        Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * t as f64 / self.field.p() as f64)
    }

    /// The conjugate character `x ↦ ψ(-x)`.
    pub fn eval_conj(&self, x: Elem) -> Complex64 {
        self.eval(x).conj()
    }
}

/// A character written as `η^k` for a run-level primitive `η` of order `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CharRef {
    pub order: u64,
    pub exponent_of_eta: i64,
}

impl CharRef {
    /// Resolve against a concrete primitive character `eta` of order `self.order`.
    pub fn resolve(&self, eta: &MultChar) -> Result<MultChar> {
        if eta.order() != self.order {
            return Err(Error::InvalidInput(format!(
                "η has order {}, reference expects {}",
                eta.order(),
                self.order
            )));
        }
        Ok(eta.pow(self.exponent_of_eta))
    }
}

//! Dense univariate polynomials over Q and the factorisation used for fibers of rational maps.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Polynomial with rational coefficients, lowest degree first, no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct QPoly {
    coeffs: Vec<BigRational>,
}

pub(crate) fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

impl QPoly {
    pub fn new(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        QPoly { coeffs }
    }

    pub fn from_i64s(c: &[i64]) -> Self {
        Self::new(c.iter().map(|&x| rat(x)).collect())
    }

    pub fn zero() -> Self {
        QPoly { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn x() -> Self {
        Self::from_i64s(&[0, 1])
    }

    pub fn constant(c: BigRational) -> Self {
        Self::new(vec![c])
    }

    /// `x - r`.
    pub fn linear_root(r: &BigRational) -> Self {
        Self::new(vec![-r.clone(), BigRational::one()])
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> Option<&BigRational> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn monic(&self) -> Self {
        match self.lead() {
            None => Self::zero(),
            Some(l) => self.scale(&l.recip()),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::one(), |acc, _| &acc * self)
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_complex(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| {
            acc * x + Complex64::new(c.to_f64().unwrap_or(f64::NAN), 0.0)
        })
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rat(i as i64))
                .collect(),
        )
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &QPoly) -> (QPoly, QPoly) {
        let dd = d.degree().expect("division by the zero polynomial");
        let lead_inv = d.lead().unwrap().recip();
        let mut r = self.coeffs.clone();
        let n = r.len();
        if n <= dd {
            return (Self::zero(), self.clone());
        }
        let mut q = vec![BigRational::zero(); n - dd];
        for k in (0..n - dd).rev() {
            let c = &r[k + dd] * &lead_inv;
            if !c.is_zero() {
                for (i, di) in d.coeffs.iter().enumerate() {
                    r[k + i] = &r[k + i] - &c * di;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Self::new(q), Self::new(r))
    }

    /// Monic gcd.
    pub fn gcd(a: &QPoly, b: &QPoly) -> QPoly {
        let (mut a, mut b) = (a.clone(), b.clone());
        while !b.is_zero() {
            let r = a.div_rem(&b).1;
            a = b;
            b = r;
        }
        a.monic()
    }

    /// `(g, s, t)` with `s·a + t·b = g` and `g` monic.
    pub fn ext_gcd(a: &QPoly, b: &QPoly) -> (QPoly, QPoly, QPoly) {
        let (mut r0, mut r1) = (a.clone(), b.clone());
        let (mut s0, mut s1) = (Self::one(), Self::zero());
        let (mut t0, mut t1) = (Self::zero(), Self::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s = &s0 - &(&q * &s1);
            let t = &t0 - &(&q * &t1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s);
            t0 = std::mem::replace(&mut t1, t);
        }
        match r0.lead().cloned() {
            None => (r0, s0, t0),
            Some(l) => {
                let li = l.recip();
                (r0.scale(&li), s0.scale(&li), t0.scale(&li))
            }
        }
    }

    /// Content-free integer coefficients with positive leading coefficient.
    pub fn primitive_integer(&self) -> Vec<BigInt> {
        let den = self
            .coeffs
            .iter()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let ints: Vec<BigInt> = self.coeffs.iter().map(|c| (c * &den).to_integer()).collect();
        let g = ints.iter().fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if g.is_zero() {
            return ints;
        }
        let sign = if ints.last().is_some_and(|l| l.is_negative()) { -BigInt::one() } else { BigInt::one() };
        ints.into_iter().map(|c| c / &g * &sign).collect()
    }

    /// Yun's squarefree decomposition: monic `(factor, multiplicity)` pairs.
    pub fn squarefree_decomposition(&self) -> Vec<(QPoly, u32)> {
        let f = self.monic();
        if f.degree().unwrap_or(0) == 0 {
            return Vec::new();
        }
        let mut out = Vec::new();
        let fp = f.derivative();
        let a0 = Self::gcd(&f, &fp);
        let mut b = f.div_rem(&a0).0;
        let mut c = fp.div_rem(&a0).0;
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let a = Self::gcd(&b, &d);
            if a.degree().unwrap_or(0) > 0 {
                out.push((a.clone(), i));
            }
            b = b.div_rem(&a).0;
            if b.degree().unwrap_or(0) == 0 {
                break;
            }
            c = d.div_rem(&a).0;
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Distinct rational roots, ascending.
    pub fn rational_roots(&self) -> Vec<BigRational> {
        let mut roots = Vec::new();
        for (f, _) in self.squarefree_decomposition() {
            roots.extend(squarefree_rational_roots(&f));
        }
        roots.sort();
        roots.dedup();
        roots
    }

    /// Factorisation over Q into monic factors.
    ///
    /// Rational roots are split off exactly; remaining factors of degree ≤ 4 are
    /// certified irreducible (or split into quadratics), higher degrees are kept
    /// whole with `certified = false`.
    pub fn factor(&self) -> Vec<Factor> {
        let mut out = Vec::new();
        for (f, mult) in self.squarefree_decomposition() {
            let mut rest = f.clone();
            for r in squarefree_rational_roots(&f) {
                let lin = Self::linear_root(&r);
                rest = rest.div_rem(&lin).0;
                out.push(Factor { poly: lin, multiplicity: mult, certified: true });
            }
            match rest.degree() {
                None | Some(0) => {}
                Some(1..=3) => out.push(Factor { poly: rest.monic(), multiplicity: mult, certified: true }),
                Some(4) => match split_quartic(&rest) {
                    Some((g, h)) => {
                        out.push(Factor { poly: g, multiplicity: mult, certified: true });
                        out.push(Factor { poly: h, multiplicity: mult, certified: true });
                    }
                    None => out.push(Factor { poly: rest.monic(), multiplicity: mult, certified: true }),
                },
                Some(_) => out.push(Factor { poly: rest.monic(), multiplicity: mult, certified: false }),
            }
        }
        out.sort_by(|a, b| {
            (a.poly.degree(), a.poly.coeffs.clone()).cmp(&(b.poly.degree(), b.poly.coeffs.clone()))
        });
        out
    }

    /// Render with variable `var`, highest degree first.
    pub fn render(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            if s.is_empty() {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { "-" } else { "+" });
            }
            let show_coeff = i == 0 || !a.is_one();
            if show_coeff {
                if a.is_integer() {
                    s.push_str(&a.to_string());
                } else {
                    s.push_str(&format!("({a})"));
                }
                if i > 0 {
                    s.push('*');
                }
            }
            match i {
                0 => {}
                1 => s.push_str(var),
                _ => s.push_str(&format!("{var}^{i}")),
            }
        }
        s
    }
}

impl fmt::Display for QPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render("x"))
    }
}

/// One irreducible factor of a factorisation over Q.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factor {
    pub poly: QPoly,
    pub multiplicity: u32,
    /// Whether irreducibility is proven rather than assumed.
    pub certified: bool,
}

impl Add for &QPoly {
    type Output = QPoly;
    fn add(self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) + o.coeff(i)).collect())
    }
}

impl Sub for &QPoly {
    type Output = QPoly;
    fn sub(self, o: &QPoly) -> QPoly {
        let n = self.coeffs.len().max(o.coeffs.len());
        QPoly::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }
}

impl Neg for &QPoly {
    type Output = QPoly;
    fn neg(self) -> QPoly {
        QPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

impl Mul for &QPoly {
    type Output = QPoly;
    fn mul(self, o: &QPoly) -> QPoly {
        if self.is_zero() || o.is_zero() {
            return QPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + o.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in o.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        QPoly::new(out)
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for QPoly {
            type Output = QPoly;
            fn $m(self, o: QPoly) -> QPoly {
                (&self).$m(&o)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

fn divisors_u128(n: u128) -> Option<Vec<u128>> {
    if n == 0 || n > 1u128 << 50 {
        return None;
    }
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u128;
    while d * d <= n {
        if n % d == 0 {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    Some(small)
}

/// Rational roots of a squarefree polynomial, verified exactly.
///
/// Candidates come from numerically isolated real roots combined with the
/// divisors of the leading coefficient (rational root theorem), or from
/// continued-fraction convergents when that coefficient is too large to factor.
fn squarefree_rational_roots(f: &QPoly) -> Vec<BigRational> {
    let Some(deg) = f.degree() else { return Vec::new() };
    if deg == 0 {
        return Vec::new();
    }
    let mut roots = Vec::new();
    let mut g = f.clone();
    if g.coeff(0).is_zero() {
        roots.push(BigRational::zero());
        g = g.div_rem(&QPoly::x()).0;
    }
    if g.degree() == Some(1) {
        roots.push(-g.coeff(0) / g.coeff(1));
        return roots;
    }
    if g.degree().unwrap_or(0) == 0 {
        return roots;
    }
    let ints = g.primitive_integer();
    let lead = ints.last().unwrap().abs();
    let scale = ints.iter().map(|c| c.abs()).max().unwrap();
    let approx: Vec<Complex64> = ints
        .iter()
        .map(|c| Complex64::new(BigRational::new(c.clone(), scale.clone()).to_f64().unwrap(), 0.0))
        .collect();
    let candidates: Vec<f64> = complex_roots(&approx)
        .into_iter()
        .filter(|z| z.im.abs() <= 1e-6 * (1.0 + z.re.abs()))
        .map(|z| z.re)
        .collect();
    let mut test = |r: BigRational| {
        if !roots.contains(&r) && g.eval(&r).is_zero() {
            roots.push(r);
        }
    };
    let dens = lead.to_u128().and_then(divisors_u128);
    for &x in &candidates {
        match &dens {
            Some(ds) => {
                for &t in ds {
                    let s = (x * t as f64).round();
                    if s.is_finite() {
                        test(BigRational::new(BigInt::from(s as i128), BigInt::from(t)));
                    }
                }
            }
            None => {
                for c in convergents(x, 40) {
                    test(c);
                }
            }
        }
    }
    roots
}

fn convergents(x: f64, n: usize) -> Vec<BigRational> {
    let mut out = Vec::new();
    let (mut h0, mut h1) = (BigInt::zero(), BigInt::one());
    let (mut k0, mut k1) = (BigInt::one(), BigInt::zero());
    let mut y = x;
    for _ in 0..n {
        if !y.is_finite() {
            break;
        }
        let a = y.floor();
        let ai = BigInt::from(a as i128);
        let h2 = &ai * &h1 + &h0;
        let k2 = &ai * &k1 + &k0;
        out.push(BigRational::new(h2.clone(), k2.clone()));
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = y - a;
        if frac.abs() < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    out
}

/// Try to split a quartic with no rational roots into two rational quadratics.
fn split_quartic(f: &QPoly) -> Option<(QPoly, QPoly)> {
    // Make monic-integer: G(y) = A^3 F(y/A) for primitive integer F with lead A.
    let ints = f.primitive_integer();
    let a_lead = ints[4].clone();
    // G(y) = y^4 + g3 y^3 + g2 y^2 + g1 y + g0 with g_i = F_i A^{3-i}.
    let g: Vec<BigInt> = (0..4).map(|i| &ints[i] * a_lead.pow(3 - i as u32)).collect();
    let (a, b, c, d) = (g[3].clone(), g[2].clone(), g[1].clone(), g[0].clone());
    let divs = d.abs().to_u128().and_then(divisors_u128)?;
    for &u in &divs {
        for sign in [1i64, -1] {
            let q = BigInt::from(u) * sign;
            let s = &d / &q;
            let found = if q != s {
                let num = &c - &q * &a;
                let den = &s - &q;
                if !(num.clone() % &den).is_zero() {
                    None
                } else {
                    let p = num / den;
                    let r = &a - &p;
                    (&p * &r + &q + &s == b).then_some((p, r))
                }
            } else if c == &q * &a {
                let disc = &a * &a - BigInt::from(4) * (&b - BigInt::from(2) * &q);
                if disc.is_negative() {
                    None
                } else {
                    let root = disc.sqrt();
                    (&root * &root == disc && (&a + &root).is_even())
                        .then(|| ((&a + &root) / 2, (&a - &root) / 2))
                }
            } else {
                None
            };
            if let Some((p, r)) = found {
                let al = BigRational::from_integer(a_lead.clone());
                let quad = |lin: &BigInt, con: &BigInt| {
                    QPoly::new(vec![
                        BigRational::from_integer(con.clone()) / (&al * &al),
                        BigRational::from_integer(lin.clone()) / &al,
                        BigRational::one(),
                    ])
                };
                return Some((quad(&p, &q), quad(&r, &s)));
            }
        }
    }
    None
}

/// All complex roots of a polynomial given low-degree-first, by Aberth iteration
/// followed by Newton polishing.
pub fn complex_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let mut c: Vec<Complex64> = coeffs.to_vec();
    while c.last().is_some_and(|z| z.norm() == 0.0) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return Vec::new();
    }
    let lead = c[n];
    let c: Vec<Complex64> = c.iter().map(|z| z / lead).collect();
    let eval = |z: Complex64| {
        let mut p = Complex64::new(0.0, 0.0);
        let mut dp = Complex64::new(0.0, 0.0);
        for a in c.iter().rev() {
            dp = dp * z + p;
            p = p * z + a;
        }
        (p, dp)
    };
    let radius = 1.0 + c[..n].iter().map(|z| z.norm()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(radius * 0.5, 0.4 + 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp) = eval(z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / (1.0 + z[i].norm()));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    for zi in z.iter_mut() {
        for _ in 0..3 {
            let (p, dp) = eval(*zi);
            if dp.norm() > 0.0 {
                let step = p / dp;
                if step.is_finite() {
                    *zi -= step;
                }
            }
        }
    }
    z
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn division_and_gcd() {
        let a = QPoly::from_i64s(&[-1, 0, 1]);
        let b = QPoly::from_i64s(&[-1, 1]);
        let (quo, rem) = a.div_rem(&b);
        assert_eq!(quo, QPoly::from_i64s(&[1, 1]));
        assert!(rem.is_zero());
        assert_eq!(QPoly::gcd(&a, &QPoly::from_i64s(&[1, 2, 1])), QPoly::from_i64s(&[1, 1]));
        let (g, s, t) = QPoly::ext_gcd(&QPoly::from_i64s(&[1, 1, 1]), &QPoly::from_i64s(&[1, 1]));
        assert_eq!(g, QPoly::one());
        assert_eq!(&(&s * &QPoly::from_i64s(&[1, 1, 1])) + &(&t * &QPoly::from_i64s(&[1, 1])), QPoly::one());
    }

    #[test]
    fn squarefree_parts() {
        // x (x-9)^2 (x+3)^3
        let f = &(&QPoly::x() * &QPoly::from_i64s(&[-9, 1]).pow(2)) * &QPoly::from_i64s(&[3, 1]).pow(3);
        let sf = f.squarefree_decomposition();
        assert_eq!(
            sf,
            vec![
                (QPoly::x(), 1),
                (QPoly::from_i64s(&[-9, 1]), 2),
                (QPoly::from_i64s(&[3, 1]), 3)
            ]
        );
    }

    #[test]
    fn rational_roots_with_denominators() {
        // (27x - 1)(49x - 3)(x^2 - x + 1)
        let f = &(&QPoly::from_i64s(&[-1, 27]) * &QPoly::from_i64s(&[-3, 49])) * &QPoly::from_i64s(&[1, -1, 1]);
        assert_eq!(f.rational_roots(), vec![q(1, 27), q(3, 49)]);
    }

    #[test]
    fn quartic_splitting() {
        // (x^2 + 1)(x^2 - 2): no rational roots, reducible
        let f = &QPoly::from_i64s(&[1, 0, 1]) * &QPoly::from_i64s(&[-2, 0, 1]);
        let fac = f.factor();
        assert_eq!(fac.len(), 2);
        assert!(fac.iter().all(|g| g.poly.degree() == Some(2) && g.certified));
        // x^4 + 1 is irreducible
        let h = QPoly::from_i64s(&[1, 0, 0, 0, 1]).factor();
        assert_eq!(h.len(), 1);
        assert!(h[0].certified);
        // 4x^4 - 4x^2 + ... non-monic: (2x^2 + 1)(3x^2 - 5)
        let k = (&QPoly::from_i64s(&[1, 0, 2]) * &QPoly::from_i64s(&[-5, 0, 3])).factor();
        assert_eq!(k.len(), 2);
        let prod = &k[0].poly * &k[1].poly;
        assert_eq!(prod, QPoly::from_i64s(&[-5, 0, -7, 0, 6]).monic());
    }

    #[test]
    fn complex_root_finder() {
        let roots = complex_roots(&[Complex64::new(5.0, 0.0), Complex64::new(2.0, 0.0), Complex64::new(1.0, 0.0)]);
        for r in roots {
            assert!((r.norm() - 5f64.sqrt()).abs() < 1e-12);
        }
    }

    #[test]
    fn render() {
        assert_eq!(QPoly::from_i64s(&[1, -1, 1]).render("x"), "x^2-x+1");
        assert_eq!(QPoly::new(vec![q(1, 2), rat(0), rat(-3)]).to_string(), "-3*x^2+(1/2)");
    }
}

//! Truncated Gauss series and the classical (complex) forms of catalog identities.

use num_complex::Complex64;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use statrs::function::gamma::gamma;

use crate::error::{Error, Result};

/// `Σ_{k<n} (a)_k (b)_k / ((c)_k k!) · x^k`.
///
/// Each term ratio `(a+k)(b+k)/((c+k)(k+1))` is formed exactly and converted to
/// a float before it multiplies the running term.
pub fn f21_series(a: &BigRational, b: &BigRational, c: &BigRational, x: Complex64, terms: usize) -> Result<Complex64> {
    if c.is_integer() && !c.is_positive() {
        return Err(Error::PoleInC);
    }
    let mut sum = Complex64::zero();
    let mut term = Complex64::one();
    for k in 0..terms {
        sum += term;
        let kk = BigRational::from_integer(k.into());
        let ratio = (a + &kk) * (b + &kk) / ((c + &kk) * (&kk + BigRational::one()));
        term *= x * ratio.to_f64().unwrap_or(f64::NAN);
        if term.norm() == 0.0 {
            break;
        }
    }
    Ok(sum)
}

/// One sample point of a classical identity.
#[derive(Debug, Clone, Serialize)]
pub struct AnalyticCheck {
    pub identity: String,
    pub x: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub rel_err: f64,
}

impl AnalyticCheck {
    pub fn passes(&self, tol: f64) -> bool {
        self.rel_err <= tol
    }
}

const TERMS: usize = 4000;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn f(a: &BigRational, b: &BigRational, c: &BigRational, x: f64) -> Result<f64> {
    Ok(f21_series(a, b, c, Complex64::new(x, 0.0), TERMS)?.re)
}

fn check(identity: &str, x: f64, lhs: f64, rhs: f64) -> AnalyticCheck {
    AnalyticCheck { identity: identity.into(), x, lhs, rhs, rel_err: (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE) }
}

fn rf(r: &BigRational) -> f64 {
    r.to_f64().unwrap()
}

/// AGM, λ/j, Borwein cubic, Goursat and the quadratic transformation at three points each.
pub fn analytic_checks() -> Result<Vec<AnalyticCheck>> {
    let mut out = Vec::new();
    let half = q(1, 2);
    let one = q(1, 1);

    // F(k) = ₂F₁(1/2, 1/2; 1; k²) and F(2√k/(1+k)) = (1+k) F(k)
    let big_f = |k: f64| f(&half, &half, &one, k * k);
    for k in [0.1, 0.2, 0.3] {
        out.push(check("agm", k, big_f(2.0 * k.sqrt() / (1.0 + k))?, (1.0 + k) * big_f(k)?));
    }

    for l in [0.1f64, 0.2, 0.3] {
        let s = l * l - l + 1.0;
        let j = 27.0 * l * l * (l - 1.0).powi(2) / (4.0 * s.powi(3));
        out.push(check("lambda-j", l, f(&q(1, 12), &q(5, 12), &one, j)?, s.powf(0.25) * f(&half, &half, &one, l)?));
    }

    let (third, two_thirds) = (q(1, 3), q(2, 3));
    for x in [0.4f64, 0.6, 0.8] {
        let lhs = f(&third, &two_thirds, &one, 1.0 - x.powi(3))?;
        let rhs = 3.0 / (1.0 + 2.0 * x) * f(&third, &two_thirds, &one, ((1.0 - x) / (1.0 + 2.0 * x)).powi(3))?;
        out.push(check("borwein-cubic", x, lhs, rhs));
    }

    // ₂F₁(a, a+1/3; 2a+5/6; 27x(1-x)²/(1+3x)³) = (1+3x)^{3a} ₂F₁(3a, 3a+1/2; 2a+5/6; x)
    let a = q(1, 24);
    let c = &a * q(2, 1) + q(5, 6);
    for x in [0.01f64, 0.03, 0.05] {
        let fx = 27.0 * x * (1.0 - x).powi(2) / (1.0 + 3.0 * x).powi(3);
        let lhs = f(&a, &(&a + &third), &c, fx)?;
        let a3 = &a * q(3, 1);
        let rhs = (1.0 + 3.0 * x).powf(rf(&a3)) * f(&a3, &(&a3 + &half), &c, x)?;
        out.push(check("goursat-116", x, lhs, rhs));
    }

    // ₂F₁(a, b; 1/2; x²) = Γ(a+½)Γ(b+½)/(Γ(a+b+½)Γ(½)) · mean of ₂F₁(2a, 2b; a+b+½; (1±x)/2)
    let (a, b) = (q(1, 16), q(3, 16));
    let c = &a + &b + &half;
    let (a2, b2) = (&a * q(2, 1), &b * q(2, 1));
    let k = gamma(rf(&(&a + &half))) * gamma(rf(&(&b + &half))) / (gamma(rf(&c)) * gamma(0.5));
    for x in [0.1f64, 0.3, 0.5] {
        let lhs = f(&a, &b, &half, x * x)?;
        let rhs = k * (f(&a2, &b2, &c, (1.0 + x) / 2.0)? + f(&a2, &b2, &c, (1.0 - x) / 2.0)?) / 2.0;
        out.push(check("quadratic", x, lhs, rhs));
    }
    Ok(out)
}

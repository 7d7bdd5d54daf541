//! Jacobi and Gauss sums, hypergeometric character sums, and brute-force Katz/BCM oracles.
//!
//! Exact sums are accumulated as histograms of exponents at a working level `W`
//! (the lcm of the character orders involved) and reduced to [`CycloNum`] once.
//! Inside kernels, `χ(0)` follows the Jacobi convention: 1 for the trivial
//! character and 0 otherwise.

use std::sync::Arc;

use num_complex::Complex64;

use crate::characters::{AdditiveChar, MultChar, ZeroConvention};
use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::ff::{Elem, FiniteField};
use crate::par::{self, Execution};
use crate::primes::lcm;

/// Tagged value of a character sum: exact when no additive character is involved.
#[derive(Debug, Clone, PartialEq)]
pub enum SumValue {
    Exact(CycloNum),
    Float(Complex64),
}

impl SumValue {
    /// The value under the standard embedding.
    pub fn to_complex(&self) -> Complex64 {
        match self {
            SumValue::Exact(c) => c.embed(1),
            SumValue::Float(z) => *z,
        }
    }

    pub fn exact(&self) -> Option<&CycloNum> {
        match self {
            SumValue::Exact(c) => Some(c),
            SumValue::Float(_) => None,
        }
    }
}

/// A character evaluated through its exponent at a working level.
#[derive(Debug, Clone, Copy)]
pub(crate) struct LevelChar {
    mult: u64,
    w: u64,
    zero_is_one: bool,
}

impl LevelChar {
    pub(crate) fn new(chi: &MultChar, w: u64) -> Self {
        LevelChar {
            mult: chi.level_multiplier(w),
            w,
            zero_is_one: chi.zero_value(ZeroConvention::Jacobi) == 1,
        }
    }

    #[inline]
    pub(crate) fn at(&self, f: &FiniteField, x: Elem) -> Option<u64> {
        match f.log_of(x) {
            None => self.zero_is_one.then_some(0),
            Some(a) => Some(self.mult * a % self.w),
        }
    }
}

/// `χ(a + b·u)` as a factor of a kernel.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Term {
    pub ch: LevelChar,
    pub a: Elem,
    pub b: Elem,
}

impl Term {
    pub(crate) fn new(chi: &MultChar, w: u64, a: Elem, b: Elem) -> Self {
        Term { ch: LevelChar::new(chi, w), a, b }
    }
}

/// Histogram of `Σ_u Π_j χ_j(a_j + b_j u)` over `u ∈ F_q` (or `F_q^×`).
pub(crate) fn affine_hist(f: &FiniteField, w: u64, terms: &[Term], skip_zero: bool, exec: Execution) -> Vec<i64> {
    par::histogram(exec, f.q(), w as usize, |u, hist| {
        let u = u as Elem;
        if skip_zero && u == 0 {
            return;
        }
        let mut total = 0u64;
        for t in terms {
            let arg = f.add(t.a, f.mul(t.b, u));
            match t.ch.at(f, arg) {
                None => return,
                Some(e) => total += e,
            }
        }
        hist[(total % w) as usize] += 1;
    })
}

/// Least common multiple of the orders: the natural level for an exact sum.
pub fn working_level(chars: &[&MultChar]) -> u64 {
    chars.iter().fold(1, |acc, c| lcm(acc, c.order()))
}

fn same_field(chars: &[&MultChar]) -> Result<Arc<FiniteField>> {
    let f = chars[0].field().clone();
    for c in &chars[1..] {
        if !(Arc::ptr_eq(c.field(), &f) || **c.field() == *f) {
            return Err(Error::FieldMismatch);
        }
    }
    Ok(f)
}

pub(crate) fn jacobi_hist(f: &FiniteField, w: u64, mu: &MultChar, nu: &MultChar) -> Vec<i64> {
    let terms = [Term::new(mu, w, 0, 1), Term::new(nu, w, 1, f.neg(1))];
    affine_hist(f, w, &terms, true, Execution::Sequential)
}

/// `J(μ, ν) = Σ_{x ∈ F_q^×} μ(x) ν(1-x)`.
pub fn jacobi_sum(mu: &MultChar, nu: &MultChar) -> Result<CycloNum> {
    let f = same_field(&[mu, nu])?;
    let w = working_level(&[mu, nu]);
    Ok(CycloNum::from_exponent_counts(w as u32, &jacobi_hist(&f, w, mu, nu)))
}

/// `g(ψ; χ) = Σ_{x ∈ F_q^×} ψ(x) χ(x)`.
pub fn gauss_sum(psi: &AdditiveChar, chi: &MultChar) -> Result<Complex64> {
    if !(Arc::ptr_eq(psi.field(), chi.field()) || **psi.field() == **chi.field()) {
        return Err(Error::FieldMismatch);
    }
    let f = chi.field();
    Ok((1..f.q() as Elem)
        .map(|x| psi.eval(x) * chi.eval_complex(x, ZeroConvention::Strict))
        .sum())
}

/// `g(ψ̄; χ) = Σ_{x ∈ F_q^×} ψ(-x) χ(x)`.
pub fn gauss_sum_conj(psi: &AdditiveChar, chi: &MultChar) -> Result<Complex64> {
    Ok(gauss_sum(psi, chi)? * chi.eval_complex(chi.field().neg(1), ZeroConvention::Strict))
}

pub(crate) fn core_hist(
    f: &FiniteField,
    w: u64,
    lam: &MultChar,
    mu: &MultChar,
    nu: &MultChar,
    t: Elem,
    exec: Execution,
) -> Vec<i64> {
    let m1 = f.neg(1);
    let terms = [Term::new(lam, w, 0, 1), Term::new(mu, w, 1, m1), Term::new(nu, w, t, m1)];
    affine_hist(f, w, &terms, false, exec)
}

/// `Σ_{t₁ ∈ F_q} λ(t₁) μ(1-t₁) ν(t-t₁)`.
pub fn hyp_core_sum(lam: &MultChar, mu: &MultChar, nu: &MultChar, t: Elem) -> Result<CycloNum> {
    let f = same_field(&[lam, mu, nu])?;
    let w = working_level(&[lam, mu, nu]);
    Ok(CycloNum::from_exponent_counts(w as u32, &core_hist(&f, w, lam, mu, nu, t, Execution::Sequential)))
}

/// Parameters `(α₁, α₂; β₁, β₂)` of a rank-two hypergeometric sheaf, with disjoint lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HCanParams {
    pub alpha: [MultChar; 2],
    pub beta: [MultChar; 2],
}

impl HCanParams {
    pub fn new(a1: MultChar, a2: MultChar, b1: MultChar, b2: MultChar) -> Result<Self> {
        same_field(&[&a1, &a2, &b1, &b2])?;
        for a in [&a1, &a2] {
            for b in [&b1, &b2] {
                if a == b {
                    return Err(Error::DegenerateParams("α and β lists share a character".into()));
                }
            }
        }
        Ok(HCanParams { alpha: [a1, a2], beta: [b1, b2] })
    }

    pub fn field(&self) -> &Arc<FiniteField> {
        self.alpha[0].field()
    }

    /// Characters `(λ, μ, ν) = (α₁β̄₂, β₁ᾱ₁, β₂ᾱ₂)` of the core sum.
    pub fn core_chars(&self) -> [MultChar; 3] {
        let [a1, a2] = &self.alpha;
        let [b1, b2] = &self.beta;
        [a1.div(b2).unwrap(), b1.div(a1).unwrap(), b2.div(a2).unwrap()]
    }

    /// Local data `(0: α; 1: 1, β₁β₂/α₁α₂; ∞: β̄)` as exponents over `q-1`.
    pub fn all_chars(&self) -> Vec<&MultChar> {
        vec![&self.alpha[0], &self.alpha[1], &self.beta[0], &self.beta[1]]
    }

    /// The inverted parameters `(β̄; ᾱ)`.
    pub fn inverted(&self) -> HCanParams {
        HCanParams {
            alpha: [self.beta[0].conj(), self.beta[1].conj()],
            beta: [self.alpha[0].conj(), self.alpha[1].conj()],
        }
    }
}

/// `A = -(β₂ᾱ₂)(-1) / (J(α₁, β₁ᾱ₁) J(α₂, β₂ᾱ₂))`.
pub fn hcan_constant(params: &HCanParams) -> Result<CycloNum> {
    let [a1, a2] = &params.alpha;
    let [b1, b2] = &params.beta;
    let f = params.field();
    let nu = b2.div(a2)?;
    let sign = nu.eval(f.neg(1), ZeroConvention::Jacobi);
    let j1 = jacobi_sum(a1, &b1.div(a1)?)?;
    let j2 = jacobi_sum(a2, &nu)?;
    let den = &j1 * &j2;
    if den.is_zero() {
        return Err(Error::ZeroNormalizer);
    }
    Ok(-&sign.div(&den)?)
}

/// The trace formula `A·α₂(t)·Σ λ(t₁)μ(1-t₁)ν(t-t₁)` evaluated at any `t`.
pub fn trace_h_can_formula(params: &HCanParams, t: Elem) -> Result<CycloNum> {
    let [lam, mu, nu] = params.core_chars();
    let core = hyp_core_sum(&lam, &mu, &nu, t)?;
    let a2t = params.alpha[1].eval(t, ZeroConvention::Jacobi);
    Ok(&(&hcan_constant(params)? * &a2t) * &core)
}

/// Frobenius trace of `H^can(α; β)` at `t ∉ {0, 1}`.
pub fn trace_h_can(params: &HCanParams, t: Elem) -> Result<CycloNum> {
    if t == 0 || t == 1 {
        return Err(Error::SingularPoint);
    }
    trace_h_can_formula(params, t)
}

/// Closed form `-(β₂ᾱ₂)(-1) J(α₁β̄₂, β₁β₂ᾱ₁ᾱ₂) / (J(α₁, β₁ᾱ₁) J(α₂, β₂ᾱ₂))` at `t = 1`.
///
/// Requires `β₁β₂ ≠ α₁α₂`; otherwise the local monodromy at 1 is unipotent and
/// the Jacobi-sum form no longer matches the core sum.
pub fn trace_h_can_at_1(params: &HCanParams) -> Result<CycloNum> {
    let [a1, a2] = &params.alpha;
    let [b1, b2] = &params.beta;
    if b1.mul(b2)? == a1.mul(a2)? {
        return Err(Error::DegenerateParams("β₁β₂ = α₁α₂: unipotent at 1".into()));
    }
    let num = jacobi_sum(&a1.div(b2)?, &b1.mul(b2)?.div(a1)?.div(a2)?)?;
    Ok(&hcan_constant(params)? * &num)
}

pub(crate) fn p2_hist(f: &FiniteField, w: u64, a: &MultChar, b: &MultChar, c: &MultChar, x: Elem, exec: Execution) -> Vec<i64> {
    let m1 = f.neg(1);
    let terms = [
        Term::new(b, w, 0, 1),
        Term::new(&c.div(b).unwrap(), w, 1, m1),
        Term::new(&a.conj(), w, 1, f.neg(x)),
    ];
    affine_hist(f, w, &terms, false, exec)
}

/// `₂P₁[A, B; C | x] = Σ_y B(y) (CB̄)(1-y) Ā(1-xy)`.
pub fn p2_function(a: &MultChar, b: &MultChar, c: &MultChar, x: Elem) -> Result<CycloNum> {
    let f = same_field(&[a, b, c])?;
    let w = working_level(&[a, b, c]);
    Ok(CycloNum::from_exponent_counts(w as u32, &p2_hist(&f, w, a, b, c, x, Execution::Sequential)))
}

/// `₂F₁[A, B; C | x] = ₂P₁[A, B; C | x] / J(B, CB̄)`.
pub fn f2_function(a: &MultChar, b: &MultChar, c: &MultChar, x: Elem) -> Result<CycloNum> {
    let j = jacobi_sum(b, &c.div(b)?)?;
    if j.is_zero() {
        return Err(Error::ZeroNormalizer);
    }
    p2_function(a, b, c, x)?.div(&j)
}

pub(crate) fn fd_hist(f: &FiniteField, w: u64, a: &MultChar, bs: &[MultChar], c: &MultChar, xs: &[Elem], exec: Execution) -> Vec<i64> {
    let m1 = f.neg(1);
    let mut terms = vec![Term::new(a, w, 0, 1), Term::new(&c.div(a).unwrap(), w, 1, m1)];
    for (b, &x) in bs.iter().zip(xs) {
        terms.push(Term::new(&b.conj(), w, 1, f.neg(x)));
    }
    affine_hist(f, w, &terms, false, exec)
}

/// Lauricella-type kernel `Σ_u A(u) (CĀ)(1-u) Π_i B̄_i(1 - x_i u)`.
pub fn fd_appell_sum(a: &MultChar, bs: &[MultChar], c: &MultChar, xs: &[Elem]) -> Result<CycloNum> {
    if bs.len() != xs.len() {
        return Err(Error::InvalidInput("one argument per B character".into()));
    }
    let mut all = vec![a, c];
    all.extend(bs.iter());
    let f = same_field(&all)?;
    let w = working_level(&all);
    Ok(CycloNum::from_exponent_counts(w as u32, &fd_hist(&f, w, a, bs, c, xs, Execution::Sequential)))
}

const ORACLE_LIMIT: f64 = 1.0e9;

fn oracle_checks(alphas: &[MultChar], betas: &[MultChar]) -> Result<Arc<FiniteField>> {
    if alphas.is_empty() || alphas.len() > 3 || betas.len() > 3 {
        return Err(Error::OracleTooLarge(format!("a = {}, b = {}", alphas.len(), betas.len())));
    }
    let all: Vec<&MultChar> = alphas.iter().chain(betas).collect();
    let f = same_field(&all)?;
    let work = ((f.q() - 1) as f64).powi((alphas.len() + betas.len() - 1) as i32);
    if work > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge(format!("{work:.0} terms")));
    }
    if alphas.iter().any(|a| betas.contains(a)) {
        return Err(Error::DegenerateParams("α and β lists share a character".into()));
    }
    Ok(f)
}

/// Enumerate unit tuples `(x, y)` with `Π x = t Π y`, calling `visit(x, y)`.
fn for_each_point(f: &FiniteField, a: usize, b: usize, t: Elem, mut visit: impl FnMut(&[Elem], &[Elem])) {
    let n = f.order();
    let free = a + b - 1;
    let lt = f.log_of(t).expect("t is a unit");
    let mut idx = vec![0u64; free];
    let mut xs = vec![0 as Elem; a];
    let mut ys = vec![0 as Elem; b];
    loop {
        // free coordinates: x_1..x_a, y_1..y_{b-1} (or x_1..x_{a-1} when b = 0)
        let mut log_x = 0u64;
        let mut log_y = 0u64;
        for (i, &k) in idx.iter().enumerate() {
            if i < a.min(free) {
                xs[i] = f.gen_pow(k);
                log_x += k;
            } else {
                ys[i - a] = f.gen_pow(k);
                log_y += k;
            }
        }
        if b > 0 {
            // y_b = Π x / (t Π_{j<b} y_j)
            let k = (log_x % n + 2 * n - lt - log_y % n) % n;
            ys[b - 1] = f.gen_pow(k);
        } else {
            let k = (lt + n - log_x % n) % n;
            xs[a - 1] = f.gen_pow(k);
        }
        visit(&xs, &ys);
        let mut i = 0;
        loop {
            if i == free {
                return;
            }
            idx[i] += 1;
            if idx[i] < n {
                break;
            }
            idx[i] = 0;
            i += 1;
        }
    }
}

/// The literal sum `(-1)^{a+b-1} Σ_{Π x = t Π y} ψ(Σx - Σy) Π α_i(x_i) Π β̄_j(y_j)`.
pub fn katz_sum_bruteforce(alphas: &[MultChar], betas: &[MultChar], psi: &AdditiveChar, t: Elem) -> Result<Complex64> {
    let f = oracle_checks(alphas, betas)?;
    if t == 0 {
        return Err(Error::SingularPoint);
    }
    let n = f.order();
    let zeta: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * k as f64 / n as f64))
        .collect();
    let psi_tab: Vec<Complex64> = f.elements().map(|x| psi.eval(x)).collect();
    let mut total = Complex64::new(0.0, 0.0);
    for_each_point(&f, alphas.len(), betas.len(), t, |xs, ys| {
        let mut e = 0u64;
        let mut s = 0;
        for (x, a) in xs.iter().zip(alphas) {
            e += a.exponent_at(*x).unwrap();
            s = f.add(s, *x);
        }
        for (y, b) in ys.iter().zip(betas) {
            e += b.conj().exponent_at(*y).unwrap();
            s = f.sub(s, *y);
        }
        total += psi_tab[s as usize] * zeta[(e % n) as usize];
    });
    let sign = if (alphas.len() + betas.len() - 1) % 2 == 0 { 1.0 } else { -1.0 };
    Ok(total * sign)
}

/// The additive-character-free variant summed over `Σx = Σy` inside `Π x = t Π y`.
pub fn bcm_sum(alphas: &[MultChar], betas: &[MultChar], t: Elem) -> Result<CycloNum> {
    let f = oracle_checks(alphas, betas)?;
    if t == 0 {
        return Err(Error::SingularPoint);
    }
    let all: Vec<&MultChar> = alphas.iter().chain(betas).collect();
    let w = working_level(&all);
    let mults: Vec<u64> = alphas
        .iter()
        .map(|a| a.level_multiplier(w))
        .chain(betas.iter().map(|b| b.conj().level_multiplier(w)))
        .collect();
    let mut hist = vec![0i64; w as usize];
    for_each_point(&f, alphas.len(), betas.len(), t, |xs, ys| {
        let mut s = 0;
        let mut e = 0u64;
        for (i, x) in xs.iter().chain(ys).enumerate() {
            e += mults[i] * f.log_of(*x).unwrap() % w;
            s = if i < xs.len() { f.add(s, *x) } else { f.sub(s, *x) };
        }
        if s == 0 {
            hist[(e % w) as usize] += 1;
        }
    });
    let sign = if (alphas.len() + betas.len() - 1) % 2 == 0 { 1 } else { -1 };
    Ok(CycloNum::from_exponent_counts(w as u32, &hist).scale(&crate::poly::rat(sign)))
}

/// `Π_i g(ψ; α_i) g(ψ̄; β̄_i)`, the factor relating Katz's sheaf to its canonical twist.
pub fn canonical_twist_constant(alphas: &[MultChar], betas: &[MultChar], psi: &AdditiveChar) -> Result<Complex64> {
    let mut acc = Complex64::new(1.0, 0.0);
    for a in alphas {
        acc *= gauss_sum(psi, a)?;
    }
    for b in betas {
        acc *= gauss_sum_conj(psi, &b.conj())?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use crate::poly::rat;

    fn field(p: u64) -> Arc<FiniteField> {
        make_field(p, 1, None).unwrap()
    }

    fn brute(chars: &[(&MultChar, Box<dyn Fn(Elem) -> Elem>)], f: &FiniteField, skip_zero: bool) -> Complex64 {
        f.elements()
            .filter(|&u| !(skip_zero && u == 0))
            .map(|u| chars.iter().map(|(c, g)| c.eval_complex(g(u), ZeroConvention::Jacobi)).product::<Complex64>())
            .sum()
    }

    #[test]
    fn jacobi_examples() {
        let f13 = field(13);
        let one = MultChar::trivial(&f13);
        assert_eq!(jacobi_sum(&one, &one).unwrap().as_rational(), Some(rat(12)));
        let f5 = field(5);
        let eps = MultChar::legendre(&f5).unwrap();
        assert_eq!(jacobi_sum(&eps, &eps).unwrap().as_rational(), Some(rat(-1)));
        let c1 = MultChar::of_order(&f13, 3, 1).unwrap();
        let j = jacobi_sum(&c1, &c1).unwrap();
        for s in j.embeddings() {
            assert!((j.embed_complex(s).unwrap().norm() - 13f64.sqrt()).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobi_matches_complex_enumeration() {
        let f = field(13);
        for e1 in 0..12 {
            for e2 in 0..12 {
                let (mu, nu) = (MultChar::new(&f, e1), MultChar::new(&f, e2));
                let one_minus = f.clone();
                let exact = jacobi_sum(&mu, &nu).unwrap().embed(1);
                let b = brute(&[(&mu, Box::new(|x| x)), (&nu, Box::new(move |x| one_minus.sub(1, x)))], &f, true);
                assert!((exact - b).norm() < 1e-9);
            }
        }
    }

    #[test]
    fn reflection_identity() {
        let f = field(13);
        for e1 in 0..12 {
            for e2 in 0..12 {
                let (mu, nu) = (MultChar::new(&f, e1), MultChar::new(&f, e2));
                if mu.mul(&nu).unwrap().is_trivial() {
                    continue;
                }
                let lhs = jacobi_sum(&mu, &nu).unwrap();
                let rhs = &nu.eval(12, ZeroConvention::Jacobi) * &jacobi_sum(&mu.mul(&nu).unwrap().conj(), &nu).unwrap();
                assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn gauss_examples() {
        let f5 = field(5);
        let psi = AdditiveChar::canonical(&f5);
        let g = gauss_sum(&psi, &MultChar::trivial(&f5)).unwrap();
        assert!((g - Complex64::new(-1.0, 0.0)).norm() < 1e-10);
        let g = gauss_sum(&psi, &MultChar::legendre(&f5).unwrap()).unwrap();
        assert!((g - Complex64::new(5f64.sqrt(), 0.0)).norm() < 1e-10);
        // duplication at F_13 with chi of order 3
        let f13 = field(13);
        let psi = AdditiveChar::canonical(&f13);
        let chi = MultChar::of_order(&f13, 3, 1).unwrap();
        let eps = MultChar::legendre(&f13).unwrap();
        let lhs = gauss_sum(&psi, &chi.pow(2)).unwrap() * gauss_sum(&psi, &eps).unwrap();
        let rhs = chi.eval_complex(4, ZeroConvention::Jacobi)
            * gauss_sum(&psi, &chi).unwrap()
            * gauss_sum(&psi, &eps.mul(&chi).unwrap()).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
    }

    #[test]
    fn core_sum_examples() {
        let f5 = field(5);
        let one = MultChar::trivial(&f5);
        assert_eq!(hyp_core_sum(&one, &one, &one, 2).unwrap().as_rational(), Some(rat(5)));
        let f7 = field(7);
        let eps = MultChar::legendre(&f7).unwrap();
        let g = f7.clone();
        let g2 = f7.clone();
        let b = brute(
            &[(&eps, Box::new(|x| x)), (&eps, Box::new(move |x| g.sub(1, x))), (&eps, Box::new(move |x| g2.sub(3, x)))],
            &f7,
            false,
        );
        assert!((hyp_core_sum(&eps, &eps, &eps, 3).unwrap().embed(1) - b).norm() < 1e-9);
    }

    #[test]
    fn core_sum_substitution_symmetry() {
        // Σ λ(t₁)μ(1-t₁)ν(t-t₁) at t = 1/2 equals λ(-1) Σ λ(u)μ(1+u)ν(-1/2-u)
        let f = field(13);
        let half = f.inv(2).unwrap();
        for (l, m, n) in [(1, 4, 6), (3, 5, 2), (6, 6, 4)] {
            let (lam, mu, nu) = (MultChar::new(&f, l), MultChar::new(&f, m), MultChar::new(&f, n));
            let lhs = hyp_core_sum(&lam, &mu, &nu, half).unwrap();
            let w = working_level(&[&lam, &mu, &nu]);
            let terms = [Term::new(&lam, w, 0, 1), Term::new(&mu, w, 1, 1), Term::new(&nu, w, f.neg(half), f.neg(1))];
            let rhs = CycloNum::from_exponent_counts(w as u32, &affine_hist(&f, w, &terms, false, Execution::Sequential));
            let rhs = &lam.eval(f.neg(1), ZeroConvention::Jacobi) * &rhs;
            assert_eq!(lhs, rhs);
        }
    }

    fn quadruples(f: &Arc<FiniteField>) -> Vec<HCanParams> {
        let n = f.order() as i64;
        let mut out = Vec::new();
        for a1 in 0..n {
            for a2 in a1..n {
                for b1 in 0..n {
                    for b2 in b1..n {
                        let c = |e| MultChar::new(f, e);
                        if let Ok(p) = HCanParams::new(c(a1), c(a2), c(b1), c(b2)) {
                            out.push(p);
                        }
                    }
                }
            }
        }
        out
    }

    #[test]
    fn trace_at_one_closed_form() {
        let f = field(13);
        for params in quadruples(&f).into_iter().step_by(7) {
            match trace_h_can_at_1(&params) {
                Ok(v) => assert_eq!(trace_h_can_formula(&params, 1).unwrap(), v),
                Err(Error::DegenerateParams(_)) => {
                    let [a1, a2] = &params.alpha;
                    assert_eq!(params.beta[0].mul(&params.beta[1]).unwrap(), a1.mul(a2).unwrap());
                }
                Err(e) => panic!("{e}"),
            }
        }
        let eps = MultChar::legendre(&f).unwrap();
        let p = HCanParams::new(eps, MultChar::trivial(&f), MultChar::of_order(&f, 3, 1).unwrap(), MultChar::of_order(&f, 3, 2).unwrap()).unwrap();
        assert_eq!(trace_h_can_formula(&p, 1).unwrap(), trace_h_can_at_1(&p).unwrap());
    }

    #[test]
    fn weil_bound_and_inversion() {
        let f = field(13);
        for params in quadruples(&f).into_iter().step_by(11) {
            let inv = params.inverted();
            for t in 2..13 {
                let v = trace_h_can(&params, t).unwrap();
                for s in v.embeddings() {
                    assert!(v.embed_complex(s).unwrap().norm() <= 2.0 * 13f64.sqrt() + 1e-9);
                }
                assert_eq!(trace_h_can(&params, f.inv(t).unwrap()).unwrap(), trace_h_can(&inv, t).unwrap());
            }
        }
        let p = quadruples(&f).remove(0);
        assert_eq!(trace_h_can(&p, 1), Err(Error::SingularPoint));
        let c = MultChar::new(&f, 1);
        assert!(matches!(
            HCanParams::new(c.clone(), MultChar::trivial(&f), c, MultChar::new(&f, 2)),
            Err(Error::DegenerateParams(_))
        ));
    }

    #[test]
    fn p2_examples() {
        let f = field(13);
        for (a, b, c) in [(1, 2, 6), (4, 3, 0), (5, 5, 2)] {
            let (a, b, c) = (MultChar::new(&f, a), MultChar::new(&f, b), MultChar::new(&f, c));
            assert_eq!(p2_function(&a, &b, &c, 0).unwrap(), jacobi_sum(&b, &c.div(&b).unwrap()).unwrap());
            assert_eq!(f2_function(&a, &b, &c, 0).unwrap(), CycloNum::one(1));
        }
    }

    #[test]
    fn fd_examples() {
        let f5 = field(5);
        let one = MultChar::trivial(&f5);
        let v = fd_appell_sum(&one, &[one.clone(), one.clone()], &one, &[2, 3]).unwrap();
        assert_eq!(v.as_rational(), Some(rat(5)));
        let f = field(13);
        let (a, b, c) = (MultChar::new(&f, 4), MultChar::new(&f, 3), MultChar::new(&f, 6));
        for x in 0..13 {
            assert_eq!(fd_appell_sum(&a, &[b.clone()], &c, &[x]).unwrap(), p2_function(&b, &a, &c, x).unwrap());
        }
        // with strict enumeration at F_5: A = ε, C = 1, B = (ε, trivial)
        let eps = MultChar::legendre(&f5).unwrap();
        let v = fd_appell_sum(&eps, &[eps.clone(), one.clone()], &one, &[2, 4]).unwrap();
        let mut direct = Complex64::new(0.0, 0.0);
        for u in 0..5u32 {
            direct += eps.eval_complex(u, ZeroConvention::Jacobi)
                * eps.eval_complex(f5.sub(1, u), ZeroConvention::Jacobi)
                * eps.eval_complex(f5.sub(1, f5.mul(2, u)), ZeroConvention::Jacobi)
                * one.eval_complex(f5.sub(1, f5.mul(4, u)), ZeroConvention::Jacobi);
        }
        assert!((v.embed(1) - direct).norm() < 1e-12);
    }

    #[test]
    fn katz_rank_one_closed_form() {
        let f = field(13);
        let psi = AdditiveChar::canonical(&f);
        for (a, b) in [(1, 4), (3, 0), (0, 6), (5, 7)] {
            let (al, be) = (MultChar::new(&f, a), MultChar::new(&f, b));
            let g = gauss_sum(&psi, &al.div(&be).unwrap()).unwrap();
            for t in 1..13 {
                let lhs = katz_sum_bruteforce(&[al.clone()], &[be.clone()], &psi, t).unwrap();
                let rhs = -g * al.eval_complex(t, ZeroConvention::Jacobi) * be.div(&al).unwrap().eval_complex(f.sub(t, 1), ZeroConvention::Jacobi);
                assert!((lhs - rhs).norm() < 1e-8, "{a} {b} {t}");
            }
        }
        let c = MultChar::new(&f, 2);
        assert!(matches!(katz_sum_bruteforce(&[c.clone()], &[c], &psi, 1), Err(Error::DegenerateParams(_))));
    }

    #[test]
    fn katz_over_canonical_twist_is_gauss_product() {
        let f = field(5);
        let psi = AdditiveChar::canonical(&f);
        for params in quadruples(&f) {
            let (al, be) = (params.alpha.to_vec(), params.beta.to_vec());
            let a = canonical_twist_constant(&al, &be, &psi).unwrap();
            for t in 2..5 {
                let k = katz_sum_bruteforce(&al, &be, &psi, t).unwrap();
                let h = trace_h_can(&params, t).unwrap().embed(1);
                assert!((k - a * h).norm() < 1e-6 * a.norm().max(1.0));
            }
        }
    }

    #[test]
    fn bcm_galois_equivariance() {
        let f = field(7);
        for (a, b) in [(vec![1, 2], vec![3, 0]), (vec![5], vec![4]), (vec![2, 3], vec![1])] {
            let al: Vec<MultChar> = a.iter().map(|&e| MultChar::new(&f, e)).collect();
            let be: Vec<MultChar> = b.iter().map(|&e| MultChar::new(&f, e)).collect();
            let alc: Vec<MultChar> = al.iter().map(|c| c.conj()).collect();
            let bec: Vec<MultChar> = be.iter().map(|c| c.conj()).collect();
            for t in 1..7 {
                assert_eq!(bcm_sum(&al, &be, t).unwrap().conj(), bcm_sum(&alc, &bec, t).unwrap());
            }
        }
    }

    #[test]
    fn bcm_small_case_by_hand() {
        // a = b = 1: points x = t y with x = y force t = 1, so the sum vanishes off t = 1
        let f = field(7);
        let (al, be) = (vec![MultChar::new(&f, 2)], vec![MultChar::new(&f, 1)]);
        for t in 2..7 {
            assert!(bcm_sum(&al, &be, t).unwrap().is_zero());
        }
        // at t = 1: -Σ_x α(x) β̄(x) = -Σ (αβ̄)(x) = 0 for αβ̄ nontrivial
        assert!(bcm_sum(&al, &be, 1).unwrap().is_zero());
    }

    #[test]
    fn oracle_limits() {
        let f = make_field(1009, 1, None).unwrap();
        let c = |e| MultChar::new(&f, e);
        let psi = AdditiveChar::canonical(&f);
        assert!(matches!(
            katz_sum_bruteforce(&[c(1), c(2), c(3)], &[c(4), c(5)], &psi, 2),
            Err(Error::OracleTooLarge(_))
        ));
    }
}

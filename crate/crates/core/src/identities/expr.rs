//! Small expression languages used by identity specs.
//!
//! Arguments are rational functions in the spec's variables (`(1-z)/(1+2*z)`,
//! `27z`), with the constant `w` standing for a chosen primitive cube root of
//! unity. Characters are monomials in named characters (`eps*A^2/eta`), and
//! expected constants are products of Jacobi sums and character values.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::characters::{MultChar, ZeroConvention};
use crate::charsums::jacobi_sum;
use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::ff::{Elem, FiniteField};
use crate::monodromy::RationalMap;
use crate::poly::QPoly;

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Sym(char),
}

fn lex(src: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = src.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let s = i;
            while i < cs.len() && cs[i].is_ascii_digit() {
                i += 1;
            }
            let text: String = cs[s..i].iter().collect();
            out.push(Tok::Num(text.parse().unwrap()));
        } else if c.is_alphabetic() || c == '_' {
            let s = i;
            while i < cs.len() && (cs[i].is_alphanumeric() || cs[i] == '_') {
                i += 1;
            }
            out.push(Tok::Ident(cs[s..i].iter().collect()));
        } else if "+-*/^(),!=".contains(c) {
            out.push(Tok::Sym(c));
            i += 1;
        } else if c == '−' {
            out.push(Tok::Sym('-'));
            i += 1;
        } else {
            return Err(Error::Parse(format!("unexpected character {c:?} in {src:?}")));
        }
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: Vec<Tok>,
    pos: usize,
    src: &'a str,
}

impl<'a> Cursor<'a> {
    fn new(src: &'a str) -> Result<Self> {
        Ok(Cursor { toks: lex(src)?, pos: 0, src })
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected {c:?}")))
        }
    }

    fn err(&self, what: &str) -> Error {
        Error::Parse(format!("{what} at token {} of {:?}", self.pos, self.src))
    }

    fn done(&self) -> Result<()> {
        if self.pos < self.toks.len() {
            Err(self.err("trailing input"))
        } else {
            Ok(())
        }
    }

    fn signed_int(&mut self) -> Result<i64> {
        let neg = self.eat('-');
        match self.next() {
            Some(Tok::Num(n)) => {
                let v = n.to_i64().ok_or_else(|| self.err("exponent too large"))?;
                Ok(if neg { -v } else { v })
            }
            _ => Err(self.err("expected an integer")),
        }
    }
}

/// A rational expression in named variables.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Int(BigInt),
    Var(String),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut c = Cursor::new(src)?;
        let e = parse_sum(&mut c)?;
        c.done()?;
        Ok(e)
    }

    /// Names occurring in the expression.
    pub fn names(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.collect(&mut out);
        out.sort();
        out.dedup();
        out
    }

    fn collect(&self, out: &mut Vec<String>) {
        match self {
            Expr::Int(_) => {}
            Expr::Var(v) => out.push(v.clone()),
            Expr::Neg(a) | Expr::Pow(a, _) => a.collect(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect(out);
                b.collect(out);
            }
        }
    }

    /// Evaluate in `alg`; `None` on division by zero.
    pub fn eval<A: Algebra>(&self, alg: &A, env: &dyn Fn(&str) -> Option<A::V>) -> Option<A::V> {
        Some(match self {
            Expr::Int(n) => alg.int(n),
            Expr::Var(v) => env(v)?,
            Expr::Neg(a) => alg.neg(&a.eval(alg, env)?),
            Expr::Add(a, b) => alg.add(&a.eval(alg, env)?, &b.eval(alg, env)?),
            Expr::Sub(a, b) => alg.sub(&a.eval(alg, env)?, &b.eval(alg, env)?),
            Expr::Mul(a, b) => alg.mul(&a.eval(alg, env)?, &b.eval(alg, env)?),
            Expr::Div(a, b) => alg.div(&a.eval(alg, env)?, &b.eval(alg, env)?)?,
            Expr::Pow(a, k) => {
                let base = a.eval(alg, env)?;
                let mut acc = alg.int(&BigInt::one());
                for _ in 0..k.unsigned_abs() {
                    acc = alg.mul(&acc, &base);
                }
                if *k < 0 {
                    alg.div(&alg.int(&BigInt::one()), &acc)?
                } else {
                    acc
                }
            }
        })
    }

    /// Evaluate in `F_q` with `vars` bound by name; `None` at a pole.
    pub fn eval_ff(&self, f: &FiniteField, vars: &[(&str, Elem)]) -> Option<Elem> {
        let alg = FfAlg(f);
        self.eval(&alg, &|name| vars.iter().find(|(n, _)| *n == name).map(|&(_, v)| v))
    }

    /// Evaluate with no free variables as an exact rational.
    pub fn eval_rational(&self) -> Result<BigRational> {
        let alg = RatFunAlg;
        let (n, d) = self
            .eval(&alg, &|_| None)
            .ok_or_else(|| Error::InvalidInput("not a rational constant".into()))?;
        Ok(n.coeff(0) / d.coeff(0))
    }

    /// The expression as a rational map in the single variable `var`.
    pub fn to_rational_map(&self, var: &str) -> Result<RationalMap> {
        let alg = RatFunAlg;
        let (n, d) = self
            .eval(&alg, &|name| (name == var).then(|| (QPoly::x(), QPoly::one())))
            .ok_or_else(|| Error::InvalidInput(format!("not a rational function of {var}")))?;
        RationalMap::new(n, d)
    }
}

fn parse_sum(c: &mut Cursor) -> Result<Expr> {
    let mut e = parse_product(c)?;
    loop {
        if c.eat('+') {
            e = Expr::Add(Box::new(e), Box::new(parse_product(c)?));
        } else if c.eat('-') {
            e = Expr::Sub(Box::new(e), Box::new(parse_product(c)?));
        } else {
            return Ok(e);
        }
    }
}

fn parse_product(c: &mut Cursor) -> Result<Expr> {
    let mut e = parse_unary(c)?;
    loop {
        if c.eat('*') {
            e = Expr::Mul(Box::new(e), Box::new(parse_unary(c)?));
        } else if c.eat('/') {
            e = Expr::Div(Box::new(e), Box::new(parse_unary(c)?));
        } else if matches!(c.peek(), Some(Tok::Num(_) | Tok::Ident(_) | Tok::Sym('('))) {
            // juxtaposition: 27z, 2(z+1), (z-1)(z+1)
            e = Expr::Mul(Box::new(e), Box::new(parse_power(c)?));
        } else {
            return Ok(e);
        }
    }
}

fn parse_unary(c: &mut Cursor) -> Result<Expr> {
    if c.eat('-') {
        return Ok(Expr::Neg(Box::new(parse_unary(c)?)));
    }
    if c.eat('+') {
        return parse_unary(c);
    }
    parse_power(c)
}

fn parse_power(c: &mut Cursor) -> Result<Expr> {
    let base = match c.next() {
        Some(Tok::Num(n)) => Expr::Int(n),
        Some(Tok::Ident(v)) => Expr::Var(v),
        Some(Tok::Sym('(')) => {
            let e = parse_sum(c)?;
            c.expect(')')?;
            e
        }
        _ => return Err(c.err("expected a number, name or '('")),
    };
    if c.eat('^') {
        let k = if c.eat('(') {
            let k = c.signed_int()?;
            c.expect(')')?;
            k
        } else {
            c.signed_int()?
        };
        return Ok(Expr::Pow(Box::new(base), k));
    }
    Ok(base)
}

/// A commutative ring with partial division in which expressions evaluate.
pub trait Algebra {
    type V: Clone;
    fn int(&self, n: &BigInt) -> Self::V;
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V;
    fn neg(&self, a: &Self::V) -> Self::V;
    fn div(&self, a: &Self::V, b: &Self::V) -> Option<Self::V>;
}

/// Arithmetic in a finite field.
pub struct FfAlg<'a>(pub &'a FiniteField);

impl Algebra for FfAlg<'_> {
    type V = Elem;
    fn int(&self, n: &BigInt) -> Elem {
        let p = BigInt::from(self.0.p());
        let r: BigInt = ((n % &p) + &p) % &p;
        self.0.from_int(r.to_i64().unwrap())
    }
    fn add(&self, a: &Elem, b: &Elem) -> Elem {
        self.0.add(*a, *b)
    }
    fn sub(&self, a: &Elem, b: &Elem) -> Elem {
        self.0.sub(*a, *b)
    }
    fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        self.0.mul(*a, *b)
    }
    fn neg(&self, a: &Elem) -> Elem {
        self.0.neg(*a)
    }
    fn div(&self, a: &Elem, b: &Elem) -> Option<Elem> {
        self.0.div(*a, *b).ok()
    }
}

/// Rational functions over `Q` as unreduced numerator/denominator pairs.
pub struct RatFunAlg;

impl Algebra for RatFunAlg {
    type V = (QPoly, QPoly);
    fn int(&self, n: &BigInt) -> Self::V {
        (QPoly::constant(BigRational::from_integer(n.clone())), QPoly::one())
    }
    fn add(&self, a: &Self::V, b: &Self::V) -> Self::V {
        (&(&a.0 * &b.1) + &(&b.0 * &a.1), &a.1 * &b.1)
    }
    fn sub(&self, a: &Self::V, b: &Self::V) -> Self::V {
        (&(&a.0 * &b.1) - &(&b.0 * &a.1), &a.1 * &b.1)
    }
    fn mul(&self, a: &Self::V, b: &Self::V) -> Self::V {
        (&a.0 * &b.0, &a.1 * &b.1)
    }
    fn neg(&self, a: &Self::V) -> Self::V {
        (-&a.0, a.1.clone())
    }
    fn div(&self, a: &Self::V, b: &Self::V) -> Option<Self::V> {
        if b.0.is_zero() {
            return None;
        }
        Some((&a.0 * &b.1, &a.1 * &b.0))
    }
}

/// A monomial `Π name^k` in named characters; `1` is the empty product.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct CharExpr {
    pub factors: BTreeMap<String, i64>,
}

impl CharExpr {
    pub fn parse(src: &str) -> Result<CharExpr> {
        let mut c = Cursor::new(src)?;
        let e = parse_char(&mut c)?;
        c.done()?;
        Ok(e)
    }

    fn mul_pow(&mut self, o: &CharExpr, k: i64) {
        for (n, e) in &o.factors {
            *self.factors.entry(n.clone()).or_default() += e * k;
        }
        self.factors.retain(|_, e| *e != 0);
    }

    pub fn names(&self) -> impl Iterator<Item = &str> {
        self.factors.keys().map(|s| s.as_str())
    }

    /// Resolve against bound characters.
    pub fn eval(&self, field: &Arc<FiniteField>, env: &BTreeMap<String, MultChar>) -> Result<MultChar> {
        let mut acc = MultChar::trivial(field);
        for (n, &k) in &self.factors {
            let ch = env
                .get(n)
                .ok_or_else(|| Error::InvalidInput(format!("unbound character {n:?}")))?;
            acc = acc.mul(&ch.pow(k))?;
        }
        Ok(acc)
    }
}

fn parse_char(c: &mut Cursor) -> Result<CharExpr> {
    let mut e = parse_char_power(c)?;
    loop {
        if c.eat('*') {
            let o = parse_char_power(c)?;
            e.mul_pow(&o, 1);
        } else if c.eat('/') {
            let o = parse_char_power(c)?;
            e.mul_pow(&o, -1);
        } else {
            return Ok(e);
        }
    }
}

fn parse_char_power(c: &mut Cursor) -> Result<CharExpr> {
    let base = match c.next() {
        Some(Tok::Num(n)) if n.is_one() => CharExpr::default(),
        Some(Tok::Ident(v)) => CharExpr { factors: [(v, 1)].into() },
        Some(Tok::Sym('(')) => {
            let e = parse_char(c)?;
            c.expect(')')?;
            e
        }
        _ => return Err(c.err("expected a character name, 1 or '('")),
    };
    if c.eat('^') {
        let k = if c.eat('(') {
            let k = c.signed_int()?;
            c.expect(')')?;
            k
        } else {
            c.signed_int()?
        };
        let mut out = CharExpr::default();
        out.mul_pow(&base, k);
        return Ok(out);
    }
    Ok(base)
}

/// `X != 1`: a character expression required to be nontrivial.
pub fn parse_constraint(src: &str) -> Result<CharExpr> {
    let (lhs, rhs) = src
        .split_once("!=")
        .ok_or_else(|| Error::Parse(format!("constraint {src:?} must read 'X != 1'")))?;
    if rhs.trim() != "1" {
        return Err(Error::Parse(format!("constraint {src:?} must compare against 1")));
    }
    CharExpr::parse(lhs)
}

/// Closed-form constant: products and quotients of `J(X, Y)`, `chi(X, r)`, integers.
#[derive(Debug, Clone, PartialEq)]
pub enum Formula {
    Int(BigInt),
    Jacobi(CharExpr, CharExpr),
    CharAt(CharExpr, Expr),
    Neg(Box<Formula>),
    Mul(Box<Formula>, Box<Formula>),
    Div(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn parse(src: &str) -> Result<Formula> {
        let mut c = Cursor::new(src)?;
        let f = parse_formula(&mut c)?;
        c.done()?;
        Ok(f)
    }

    pub fn eval(&self, field: &Arc<FiniteField>, env: &BTreeMap<String, MultChar>) -> Result<CycloNum> {
        Ok(match self {
            Formula::Int(n) => CycloNum::from_rational(1, BigRational::from_integer(n.clone())),
            Formula::Jacobi(a, b) => jacobi_sum(&a.eval(field, env)?, &b.eval(field, env)?)?,
            Formula::CharAt(x, r) => {
                let v = r.eval_rational()?;
                let p = BigInt::from(field.p());
                if v.denom() % &p == BigInt::zero() {
                    return Err(Error::InvalidInput("character argument has a pole mod p".into()));
                }
                let alg = FfAlg(field);
                let t = alg
                    .div(&alg.int(v.numer()), &alg.int(v.denom()))
                    .ok_or(Error::DivisionByZero)?;
                x.eval(field, env)?.eval(t, ZeroConvention::Jacobi)
            }
            Formula::Neg(a) => -a.eval(field, env)?,
            Formula::Mul(a, b) => &a.eval(field, env)? * &b.eval(field, env)?,
            Formula::Div(a, b) => a.eval(field, env)?.div(&b.eval(field, env)?)?,
        })
    }
}

fn parse_formula(c: &mut Cursor) -> Result<Formula> {
    let mut f = parse_formula_unary(c)?;
    loop {
        if c.eat('*') {
            f = Formula::Mul(Box::new(f), Box::new(parse_formula_unary(c)?));
        } else if c.eat('/') {
            f = Formula::Div(Box::new(f), Box::new(parse_formula_unary(c)?));
        } else {
            return Ok(f);
        }
    }
}

fn parse_formula_unary(c: &mut Cursor) -> Result<Formula> {
    if c.eat('-') {
        return Ok(Formula::Neg(Box::new(parse_formula_unary(c)?)));
    }
    match c.next() {
        Some(Tok::Num(n)) => Ok(Formula::Int(n)),
        Some(Tok::Sym('(')) => {
            let f = parse_formula(c)?;
            c.expect(')')?;
            Ok(f)
        }
        Some(Tok::Ident(name)) if name == "J" => {
            c.expect('(')?;
            let a = parse_char(c)?;
            c.expect(',')?;
            let b = parse_char(c)?;
            c.expect(')')?;
            Ok(Formula::Jacobi(a, b))
        }
        Some(Tok::Ident(name)) if name == "chi" => {
            c.expect('(')?;
            let a = parse_char(c)?;
            c.expect(',')?;
            let r = parse_sum(c)?;
            c.expect(')')?;
            Ok(Formula::CharAt(a, r))
        }
        _ => Err(c.err("expected J(..), chi(..), an integer or '('")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ff::make_field;
    use crate::monodromy::Point;

    #[test]
    fn parses_and_evaluates_in_fp() {
        let f = make_field(13, 1, None).unwrap();
        let e = Expr::parse("((1-l)/(1+2l))^3").unwrap();
        // l = 2: (-1/5)^3 = -1/125; 125 = 8 mod 13, 1/8 = 5, so -5 = 8
        assert_eq!(e.eval_ff(&f, &[("l", 2)]), Some(8));
        // 1 + 2l = 0 at l = 6
        assert_eq!(e.eval_ff(&f, &[("l", 6)]), None);
        let g = Expr::parse("27z*(1-z)^2/(1+3z)^3").unwrap();
        assert_eq!(g.names(), vec!["z".to_string()]);
        assert_eq!(Expr::parse("2^-1").unwrap().eval_ff(&f, &[]), Some(7));
        assert_eq!(Expr::parse("-z^2").unwrap().eval_ff(&f, &[("z", 3)]), Some(4));
    }

    #[test]
    fn rational_maps_and_constants() {
        let r = Expr::parse("z(z-9)^2/(z+3)^3").unwrap().to_rational_map("z").unwrap();
        assert_eq!(r.degree(), 3);
        assert_eq!(r.eval(&Point::int(-3)).unwrap(), Point::Infinity);
        assert_eq!(Expr::parse("1/2").unwrap().eval_rational().unwrap(), BigRational::new(1.into(), 2.into()));
        assert!(Expr::parse("z/z").unwrap().to_rational_map("z").is_err());
        assert!(Expr::parse("1/0").unwrap().eval_rational().is_err());
    }

    #[test]
    fn parse_errors() {
        assert!(Expr::parse("1+").is_err());
        assert!(Expr::parse("(z").is_err());
        assert!(Expr::parse("z$").is_err());
        assert!(CharExpr::parse("eta^").is_err());
        assert!(parse_constraint("A^2 = 1").is_err());
    }

    #[test]
    fn character_monomials() {
        let e = CharExpr::parse("eps*A/B^2*A").unwrap();
        assert_eq!(e.factors, [("A".to_string(), 2), ("B".to_string(), -2), ("eps".to_string(), 1)].into());
        assert!(CharExpr::parse("1").unwrap().factors.is_empty());
        assert!(CharExpr::parse("eta/eta").unwrap().factors.is_empty());
        let f = make_field(13, 1, None).unwrap();
        let env: BTreeMap<String, MultChar> =
            [("A".to_string(), MultChar::new(&f, 1)), ("B".to_string(), MultChar::new(&f, 5))].into();
        assert_eq!(CharExpr::parse("A^3*B").unwrap().eval(&f, &env).unwrap().exponent(), 8);
        assert!(CharExpr::parse("C").unwrap().eval(&f, &env).is_err());
    }

    #[test]
    fn jacobi_formulas() {
        let f = make_field(13, 1, None).unwrap();
        let env: BTreeMap<String, MultChar> = [("e".to_string(), MultChar::new(&f, 6))].into();
        // J(ε, ε) = -ε(-1) = -1 for p ≡ 1 mod 4
        let v = Formula::parse("J(e, e)").unwrap().eval(&f, &env).unwrap();
        assert_eq!(v, CycloNum::from_int(1, -1));
        let w = Formula::parse("-J(e,e)*chi(e, -1)/2").unwrap().eval(&f, &env).unwrap();
        assert_eq!(w, CycloNum::from_rational(1, BigRational::new(1.into(), 2.into())));
    }
}

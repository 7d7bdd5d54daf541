use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use super::{LocalDatum, MonodromyTuple, Point};
use crate::error::{Error, Result};
use crate::poly::QPoly;

/// `R = num / den` with coprime numerator and denominator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RationalMap {
    num: QPoly,
    den: QPoly,
}

impl RationalMap {
    /// Cancels common factors and normalizes the denominator to be monic.
    pub fn new(num: QPoly, den: QPoly) -> Result<Self> {
        if den.is_zero() {
            return Err(Error::DivisionByZero);
        }
        let g = QPoly::gcd(&num, &den);
        let (mut num, mut den) = (num.div_rem(&g).0, den.div_rem(&g).0);
        let lead = den.lead().cloned().unwrap();
        let inv = BigRational::one() / lead;
        num = num.scale(&inv);
        den = den.scale(&inv);
        if num.degree().unwrap_or(0) == 0 && den.degree() == Some(0) {
            return Err(Error::ConstantMap);
        }
        Ok(RationalMap { num, den })
    }

    pub fn polynomial(p: QPoly) -> Result<Self> {
        Self::new(p, QPoly::one())
    }

    pub fn identity() -> Self {
        RationalMap { num: QPoly::x(), den: QPoly::one() }
    }

    pub fn num(&self) -> &QPoly {
        &self.num
    }

    pub fn den(&self) -> &QPoly {
        &self.den
    }

    pub fn degree(&self) -> usize {
        self.num.degree().unwrap_or(0).max(self.den.degree().unwrap_or(0))
    }

    /// Value at a point of `P¹(Q)`.
    pub fn eval(&self, p: &Point) -> Result<Point> {
        match p {
            Point::Finite(x) => {
                let d = self.den.eval(x);
                if d.is_zero() {
                    Ok(Point::Infinity)
                } else {
                    Ok(Point::Finite(self.num.eval(x) / d))
                }
            }
            Point::Infinity => {
                let (dn, dd) = (self.num.degree().unwrap_or(0), self.den.degree().unwrap_or(0));
                Ok(match dn.cmp(&dd) {
                    std::cmp::Ordering::Greater => Point::Infinity,
                    std::cmp::Ordering::Less => Point::Finite(BigRational::zero()),
                    std::cmp::Ordering::Equal => Point::Finite(self.num.lead().unwrap() / self.den.lead().unwrap()),
                })
            }
            Point::Place { .. } => Err(Error::UnsupportedAlgebraicSingularity),
        }
    }

    pub fn render(&self, var: &str) -> String {
        if self.den.degree() == Some(0) {
            format!("{}", self.num.render(var))
        } else {
            format!("({})/({})", self.num.render(var), self.den.render(var))
        }
    }
}

/// One closed point of a fiber with its ramification index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberPlace {
    pub point: Point,
    pub ramification: u32,
    /// False only for unsplit factors of degree ≥ 5 whose irreducibility is unproven.
    pub certified: bool,
}

fn place_of(poly: &QPoly) -> Point {
    match poly.degree() {
        Some(1) => Point::Finite(-poly.coeff(0) / poly.coeff(1)),
        Some(g) => {
            let ints = poly.primitive_integer();
            let p = QPoly::new(ints.into_iter().map(BigRational::from_integer).collect());
            Point::Place { degree: g, tag: p.render("x") }
        }
        None => unreachable!("factors are nonconstant"),
    }
}

/// The fiber `R⁻¹(c)` as closed points with ramification; `Σ degree·e = deg R`.
pub fn rational_map_fibers(r: &RationalMap, c: &Point) -> Result<Vec<FiberPlace>> {
    let p = match c {
        Point::Finite(c) => &r.num - &r.den.scale(c),
        Point::Infinity => r.den.clone(),
        Point::Place { .. } => return Err(Error::UnsupportedAlgebraicSingularity),
    };
    let mut out: Vec<FiberPlace> = p
        .factor()
        .into_iter()
        .map(|f| FiberPlace { point: place_of(&f.poly), ramification: f.multiplicity, certified: f.certified })
        .collect();
    let deficit = r.degree() - p.degree().unwrap_or(0);
    if deficit > 0 {
        out.push(FiberPlace { point: Point::Infinity, ramification: deficit as u32, certified: true });
    }
    Ok(out)
}

/// Pulls local data back along `R`: exponents at a place over `c` are `e ×` those at `c`, mod 1.
pub fn pullback_tuple(t: &MonodromyTuple, r: &RationalMap) -> Result<MonodromyTuple> {
    let mut points = Vec::new();
    for (c, datum) in &t.normalized().points {
        for place in rational_map_fibers(r, c)? {
            let d: LocalDatum = datum.scaled(place.ramification);
            if !d.is_trivial() {
                points.push((place.point, d));
            }
        }
    }
    MonodromyTuple::new(t.rank, points)
}

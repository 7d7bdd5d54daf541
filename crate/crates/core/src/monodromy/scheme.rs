use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

use super::{rational_map_fibers, LocalDatum, MonodromyTuple, Point, RationalMap};
use crate::error::{Error, Result};

/// Exact local exponents at one point.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ExactColumn {
    pub point: Point,
    #[serde(serialize_with = "super::ser_rationals")]
    pub exponents: Vec<BigRational>,
}

/// A Riemann P-scheme: exact exponents at each singular point, subject to the Fuchs relation.
///
/// Points not listed are ordinary, with exponents `0, 1, …, d-1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RiemannScheme {
    rank: usize,
    columns: Vec<ExactColumn>,
}

fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

impl RiemannScheme {
    pub fn new(rank: usize, columns: Vec<(Point, Vec<BigRational>)>) -> Result<Self> {
        if columns.iter().any(|(_, e)| e.len() != rank) {
            return Err(Error::InvalidInput("column of the wrong length".into()));
        }
        let s = RiemannScheme {
            rank,
            columns: columns.into_iter().map(|(point, exponents)| ExactColumn { point, exponents }).collect(),
        }
        .normalized();
        for w in s.columns.windows(2) {
            if w[0].point == w[1].point {
                return Err(Error::InvalidInput(format!("point {} listed twice", w[0].point)));
            }
        }
        s.check_fuchs()?;
        Ok(s)
    }

    /// `₂F₁(a, b; c)`: `0: (0, 1-c)`, `∞: (a, b)`, `1: (0, c-a-b)`.
    pub fn hypergeometric(a: &BigRational, b: &BigRational, c: &BigRational) -> Result<Self> {
        let one = int(1);
        Self::new(
            2,
            vec![
                (Point::int(0), vec![BigRational::zero(), &one - c]),
                (Point::Infinity, vec![a.clone(), b.clone()]),
                (Point::int(1), vec![BigRational::zero(), c - a - b]),
            ],
        )
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn columns(&self) -> &[ExactColumn] {
        &self.columns
    }

    fn ordinary(&self) -> Vec<BigRational> {
        (0..self.rank as i64).map(int).collect()
    }

    fn normalized(mut self) -> Self {
        let ord = self.ordinary();
        for c in &mut self.columns {
            c.exponents.sort();
        }
        self.columns.retain(|c| c.exponents != ord);
        self.columns.sort_by(|a, b| a.point.cmp(&b.point));
        self
    }

    /// `Σ exponents = (m - 2)·d(d-1)/2` over the `m` singular points.
    pub fn check_fuchs(&self) -> Result<()> {
        let mut found = BigRational::zero();
        let mut m = 0i64;
        for c in &self.columns {
            let g = c.point.degree() as i64;
            m += g;
            found += c.exponents.iter().fold(BigRational::zero(), |a, e| a + e) * int(g);
        }
        let d = self.rank as i64;
        let expected = int((m - 2) * d * (d - 1) / 2);
        if found != expected {
            return Err(Error::FuchsViolation { found: found.to_string(), expected: expected.to_string() });
        }
        Ok(())
    }

    /// Exact pullback: a place of ramification `e` over a column gets `e ×` its exponents.
    ///
    /// The map may only ramify over listed columns.
    pub fn pullback(&self, r: &RationalMap) -> Result<RiemannScheme> {
        let mut cols = Vec::new();
        let mut ramification = 0usize;
        for c in &self.columns {
            for place in rational_map_fibers(r, &c.point)? {
                let e = int(place.ramification as i64);
                ramification += place.point.degree() * (place.ramification as usize - 1);
                cols.push((place.point, c.exponents.iter().map(|x| x * &e).collect()));
            }
        }
        if ramification != 2 * r.degree() - 2 {
            return Err(Error::InvalidInput("map ramifies over an ordinary point".into()));
        }
        RiemannScheme::new(self.rank, cols)
    }

    /// Multiplication by `Π (x - P)^{s_P}`: shifts the exponents at each `P` by `s_P`.
    /// The shifts must sum to zero (weighted by place degree), which keeps the Fuchs relation.
    pub fn twist(&self, twist: &[(Point, BigRational)]) -> Result<RiemannScheme> {
        let total = twist.iter().fold(BigRational::zero(), |a, (p, s)| a + s * int(p.degree() as i64));
        if !total.is_zero() {
            return Err(Error::DeterminantViolation(format!("twist shifts sum to {total}")));
        }
        let mut cols: Vec<(Point, Vec<BigRational>)> =
            self.columns.iter().map(|c| (c.point.clone(), c.exponents.clone())).collect();
        for (p, s) in twist {
            let idx = match cols.iter().position(|(q, _)| q == p) {
                Some(i) => i,
                None => {
                    cols.push((p.clone(), self.ordinary()));
                    cols.len() - 1
                }
            };
            for e in &mut cols[idx].1 {
                *e += s;
            }
        }
        RiemannScheme::new(self.rank, cols)
    }

    /// Exponents mod 1 as local monodromy data.
    pub fn to_tuple(&self) -> Result<MonodromyTuple> {
        MonodromyTuple::new(
            self.rank,
            self.columns.iter().map(|c| (c.point.clone(), LocalDatum::new(c.exponents.clone()))).collect(),
        )
        .map(|t| t.normalized())
    }
}

/// Checks `R₁^* lhs ⊗ twist = R₂^* rhs` at the level of exact exponents.
pub fn verify_bracket(
    lhs: &RiemannScheme,
    r_lhs: &RationalMap,
    twist: &[(Point, BigRational)],
    rhs: &RiemannScheme,
    r_rhs: &RationalMap,
) -> Result<bool> {
    let l = lhs.pullback(r_lhs)?.twist(twist)?;
    let r = rhs.pullback(r_rhs)?;
    Ok(l == r)
}

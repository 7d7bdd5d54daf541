//! Exponent-level monodromy calculus: local data, rigidity, pullback along rational
//! maps, Kummer twists, Riemann schemes and middle convolution of matrix tuples.

mod maps;
mod matrix;
mod scheme;

pub use maps::{pullback_tuple, rational_map_fibers, FiberPlace, RationalMap};
pub use matrix::{middle_convolution, Mat, MatrixTuple};
pub use scheme::{verify_bracket, ExactColumn, RiemannScheme};

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::parse_rational;
use crate::error::{Error, Result};

/// A point of `P¹` over `Q`: rational, infinity, or a closed point of higher degree.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Point {
    Finite(BigRational),
    Infinity,
    /// A Galois orbit of `degree` conjugate points, tagged by its minimal polynomial.
    Place { degree: usize, tag: String },
}

impl Point {
    pub fn int(n: i64) -> Point {
        Point::Finite(BigRational::from_integer(n.into()))
    }

    /// Number of geometric points represented.
    pub fn degree(&self) -> usize {
        match self {
            Point::Place { degree, .. } => *degree,
            _ => 1,
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Point::Finite(r) => write!(f, "{r}"),
            Point::Infinity => f.write_str("inf"),
            Point::Place { degree, tag } => write!(f, "place:deg{degree}:{tag}"),
        }
    }
}

impl FromStr for Point {
    type Err = Error;
    fn from_str(s: &str) -> Result<Point> {
        let s = s.trim();
        if s == "inf" || s == "∞" {
            return Ok(Point::Infinity);
        }
        if let Some(rest) = s.strip_prefix("place:deg") {
            let (deg, tag) = rest.split_once(':').ok_or_else(|| Error::Parse(format!("bad place '{s}'")))?;
            let degree = deg.parse().map_err(|_| Error::Parse(format!("bad place degree '{deg}'")))?;
            return Ok(Point::Place { degree, tag: tag.to_string() });
        }
        Ok(Point::Finite(parse_rational(s)?))
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub(crate) fn ser_rationals<S: Serializer>(v: &[BigRational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.to_string()))
}

/// `x mod 1` in `[0, 1)`.
pub fn frac(x: &BigRational) -> BigRational {
    x - x.floor()
}

/// Local monodromy at one point as a multiset of exponents in `[0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalDatum {
    exponents: Vec<BigRational>,
    pub semisimple: bool,
}

impl LocalDatum {
    pub fn new(exponents: Vec<BigRational>) -> Self {
        let mut exponents: Vec<_> = exponents.iter().map(frac).collect();
        exponents.sort();
        LocalDatum { exponents, semisimple: true }
    }

    pub fn parse(exps: &[&str]) -> Result<Self> {
        Ok(Self::new(exps.iter().map(|s| parse_rational(s)).collect::<Result<_>>()?))
    }

    pub fn exponents(&self) -> &[BigRational] {
        &self.exponents
    }

    pub fn rank(&self) -> usize {
        self.exponents.len()
    }

    /// Distinct exponents with multiplicities.
    pub fn multiplicities(&self) -> BTreeMap<BigRational, usize> {
        let mut m = BTreeMap::new();
        for e in &self.exponents {
            *m.entry(e.clone()).or_insert(0) += 1;
        }
        m
    }

    pub fn is_trivial(&self) -> bool {
        self.semisimple && self.exponents.iter().all(Zero::is_zero)
    }

    pub fn shifted(&self, s: &BigRational) -> LocalDatum {
        let mut d = LocalDatum::new(self.exponents.iter().map(|e| e + s).collect());
        d.semisimple = self.semisimple;
        d
    }

    pub fn scaled(&self, e: u32) -> LocalDatum {
        let k = BigRational::from_integer(e.into());
        let mut d = LocalDatum::new(self.exponents.iter().map(|x| x * &k).collect());
        d.semisimple = self.semisimple;
        d
    }

    fn sum(&self) -> BigRational {
        self.exponents.iter().fold(BigRational::zero(), |a, e| a + e)
    }
}

#[derive(Serialize, Deserialize)]
struct LocalDatumJson {
    exponents: Vec<(String, usize)>,
    semisimple: bool,
}

impl Serialize for LocalDatum {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LocalDatumJson {
            exponents: self.multiplicities().into_iter().map(|(e, m)| (e.to_string(), m)).collect(),
            semisimple: self.semisimple,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalDatum {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = LocalDatumJson::deserialize(d)?;
        let mut exps = Vec::new();
        for (e, m) in j.exponents {
            let r = parse_rational(&e).map_err(serde::de::Error::custom)?;
            exps.extend(std::iter::repeat(r).take(m));
        }
        let mut datum = LocalDatum::new(exps);
        datum.semisimple = j.semisimple;
        Ok(datum)
    }
}

/// Local data of a local system on `P¹` minus finitely many points.
///
/// Points not listed have trivial monodromy.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "TupleJson", into = "TupleJson")]
pub struct MonodromyTuple {
    rank: usize,
    points: Vec<(Point, LocalDatum)>,
}

#[derive(Serialize, Deserialize)]
struct TupleJson {
    rank: usize,
    points: Vec<PointJson>,
}

#[derive(Serialize, Deserialize)]
struct PointJson {
    point: Point,
    #[serde(flatten)]
    datum: LocalDatum,
}

impl TryFrom<TupleJson> for MonodromyTuple {
    type Error = Error;
    fn try_from(j: TupleJson) -> Result<Self> {
        MonodromyTuple::new(j.rank, j.points.into_iter().map(|p| (p.point, p.datum)).collect())
    }
}

impl From<MonodromyTuple> for TupleJson {
    fn from(t: MonodromyTuple) -> Self {
        TupleJson {
            rank: t.rank,
            points: t.points.into_iter().map(|(point, datum)| PointJson { point, datum }).collect(),
        }
    }
}

impl MonodromyTuple {
    /// Validates ranks, distinctness and the determinant condition; points are kept sorted.
    pub fn new(rank: usize, mut points: Vec<(Point, LocalDatum)>) -> Result<Self> {
        points.sort_by(|a, b| a.0.cmp(&b.0));
        for w in points.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::InvalidInput(format!("point {} listed twice", w[0].0)));
            }
        }
        if let Some((p, _)) = points.iter().find(|(_, d)| d.rank() != rank) {
            return Err(Error::InvalidInput(format!("local datum at {p} has the wrong rank")));
        }
        let t = MonodromyTuple { rank, points };
        let total = t.determinant_sum();
        if !total.is_integer() {
            return Err(Error::DeterminantViolation(format!("exponent sum {total} is not an integer")));
        }
        Ok(t)
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn points(&self) -> &[(Point, LocalDatum)] {
        &self.points
    }

    pub fn at(&self, p: &Point) -> Option<&LocalDatum> {
        self.points.iter().find(|(q, _)| q == p).map(|(_, d)| d)
    }

    fn determinant_sum(&self) -> BigRational {
        self.points.iter().fold(BigRational::zero(), |acc, (p, d)| {
            acc + d.sum() * BigRational::from_integer((p.degree() as i64).into())
        })
    }

    /// Drops points with trivial semisimple monodromy.
    pub fn normalized(&self) -> MonodromyTuple {
        MonodromyTuple {
            rank: self.rank,
            points: self.points.iter().filter(|(_, d)| !d.is_trivial()).cloned().collect(),
        }
    }

    /// Number of geometric singular points (a place of degree `g` counts `g` times).
    pub fn singular_count(&self) -> usize {
        self.normalized().points.iter().map(|(p, _)| p.degree()).sum()
    }
}

/// `(2 - m)·d² + Σ_s Σ_e mult(e)²` over the `m` singular points.
pub fn rigidity_index(t: &MonodromyTuple) -> Result<i64> {
    if t.points.iter().any(|(_, d)| !d.semisimple) {
        return Err(Error::NonSemisimple);
    }
    let t = t.normalized();
    let d2 = (t.rank * t.rank) as i64;
    let m = t.singular_count() as i64;
    let local: i64 = t
        .points
        .iter()
        .map(|(p, d)| p.degree() as i64 * d.multiplicities().values().map(|&k| (k * k) as i64).sum::<i64>())
        .sum();
    Ok((2 - m) * d2 + local)
}

/// Adds each twist exponent at its point (inserting the point if absent); the twist must have integer total.
pub fn kummer_twist(t: &MonodromyTuple, twist: &[(Point, BigRational)]) -> Result<MonodromyTuple> {
    let total = twist.iter().fold(BigRational::zero(), |acc, (p, s)| {
        acc + s * BigRational::from_integer((p.degree() as i64).into())
    });
    if !total.is_integer() {
        return Err(Error::DeterminantViolation(format!("twist exponents sum to {total}")));
    }
    let mut points = t.points.clone();
    for (p, s) in twist {
        match points.iter_mut().find(|(q, _)| q == p) {
            Some((_, d)) => *d = d.shifted(s),
            None => points.push((p.clone(), LocalDatum::new(vec![s.clone(); t.rank]))),
        }
    }
    Ok(MonodromyTuple::new(t.rank, points)?.normalized())
}

/// Local data `0: {a₁, a₂}`, `1: {0, b₁ + b₂ - a₁ - a₂}`, `∞: {-b₁, -b₂}` of `H^can(α; β)`,
/// with `α_i = e^{2πi a_i}` and `β_j = e^{2πi b_j}`.
pub fn hcan_local_tuple(a: [&BigRational; 2], b: [&BigRational; 2]) -> Result<MonodromyTuple> {
    let gamma = b[0] + b[1] - a[0] - a[1];
    MonodromyTuple::new(
        2,
        vec![
            (Point::int(0), LocalDatum::new(vec![a[0].clone(), a[1].clone()])),
            (Point::int(1), LocalDatum::new(vec![BigRational::zero(), gamma])),
            (Point::Infinity, LocalDatum::new(vec![-b[0], -b[1]])),
        ],
    )
}

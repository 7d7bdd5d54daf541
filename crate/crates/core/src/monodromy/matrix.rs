use crate::cyclotomic::{CycloNum, RootOfUnity};
use crate::error::{Error, Result};
use crate::primes::lcm;

use super::{LocalDatum, MonodromyTuple, Point};
use num_rational::BigRational;

/// A dense square-or-rectangular matrix over `Q(ζ_L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    level: u32,
    data: Vec<CycloNum>,
}

impl Mat {
    pub fn zero(rows: usize, cols: usize, level: u32) -> Self {
        Mat { rows, cols, level, data: vec![CycloNum::zero(level); rows * cols] }
    }

    pub fn identity(n: usize, level: u32) -> Self {
        let mut m = Self::zero(n, n, level);
        for i in 0..n {
            m.data[i * n + i] = CycloNum::one(level);
        }
        m
    }

    pub fn scalar(n: usize, c: &CycloNum) -> Self {
        let mut m = Self::zero(n, n, c.level());
        for i in 0..n {
            m.data[i * n + i] = c.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<CycloNum>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if r == 0 || rows.iter().any(|x| x.len() != c) {
            return Err(Error::InvalidInput("ragged or empty matrix".into()));
        }
        let level = rows.iter().flatten().fold(1u64, |a, x| lcm(a, x.level() as u64)) as u32;
        let data = rows.into_iter().flatten().map(|x| x.lift_level(level)).collect::<Result<_>>()?;
        Ok(Mat { rows: r, cols: c, level, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn get(&self, i: usize, j: usize) -> &CycloNum {
        &self.data[i * self.cols + j]
    }

    fn set(&mut self, i: usize, j: usize, v: CycloNum) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> Vec<CycloNum> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn mul(&self, o: &Mat) -> Mat {
        assert_eq!(self.cols, o.rows);
        let level = lcm(self.level as u64, o.level as u64) as u32;
        let mut out = Mat::zero(self.rows, o.cols, level);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.get(k, j);
                    if !b.is_zero() {
                        let v = &out.data[i * o.cols + j] + &(a * b);
                        out.data[i * o.cols + j] = v;
                    }
                }
            }
        }
        out
    }

    pub fn sub(&self, o: &Mat) -> Mat {
        let data: Vec<CycloNum> = self.data.iter().zip(&o.data).map(|(a, b)| a - b).collect();
        let level = data.iter().map(|x| x.level()).max().unwrap_or(1);
        Mat { rows: self.rows, cols: self.cols, level, data }
    }

    pub fn scale(&self, c: &CycloNum) -> Mat {
        let data: Vec<CycloNum> = self.data.iter().map(|a| a * c).collect();
        let level = lcm(self.level as u64, c.level() as u64) as u32;
        Mat { rows: self.rows, cols: self.cols, level, data }
    }

    pub fn is_identity(&self) -> bool {
        *self == Mat::identity(self.rows, self.level)
    }

    /// Reduced row echelon form; returns the nonzero rows and their pivot columns.
    fn rref(&self) -> (Vec<Vec<CycloNum>>, Vec<usize>) {
        let mut span = Span::new(self.cols, self.level);
        for i in 0..self.rows {
            span.insert(self.row(i));
        }
        span.reduced()
    }

    pub fn rank(&self) -> usize {
        self.rref().0.len()
    }

    /// Basis of `{v : M v = 0}`.
    pub fn nullspace(&self) -> Vec<Vec<CycloNum>> {
        let (rows, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![CycloNum::zero(self.level); self.cols];
                v[f] = CycloNum::one(self.level);
                for (r, &p) in rows.iter().zip(&pivots) {
                    v[p] = -&r[f];
                }
                v
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Mat> {
        let n = self.rows;
        if n != self.cols {
            return Err(Error::InvalidInput("inverse of a non-square matrix".into()));
        }
        let mut aug = Mat::zero(n, 2 * n, self.level);
        for i in 0..n {
            for j in 0..n {
                aug.set(i, j, self.get(i, j).clone());
            }
            aug.set(i, n + i, CycloNum::one(self.level));
        }
        let (rows, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::DivisionByZero);
        }
        let mut inv = Mat::zero(n, n, self.level);
        for (i, r) in rows.iter().enumerate() {
            for j in 0..n {
                inv.set(i, j, r[n + j].clone());
            }
        }
        Ok(inv)
    }

    /// Exponent multiset of the eigenvalues, all of which must lie in `μ_L`.
    pub fn local_datum(&self) -> Result<LocalDatum> {
        let n = self.rows;
        let l = self.level;
        let mut exps = Vec::new();
        let mut semisimple = true;
        for j in 0..l as i64 {
            let shifted = self.sub(&Mat::scalar(n, &CycloNum::root(l, j)));
            let geo = n - shifted.rank();
            if geo == 0 {
                continue;
            }
            let mut power = shifted.clone();
            for _ in 1..n {
                power = power.mul(&shifted);
            }
            let alg = n - power.rank();
            semisimple &= geo == alg;
            exps.extend(std::iter::repeat(BigRational::new(j.into(), (l as i64).into())).take(alg));
        }
        if exps.len() != n {
            return Err(Error::InvalidInput(format!("eigenvalues outside the level-{l} roots of unity")));
        }
        let mut d = LocalDatum::new(exps);
        d.semisimple = semisimple;
        Ok(d)
    }
}

/// Incremental row-echelon span of vectors over `Q(ζ_L)`.
struct Span {
    dim: usize,
    level: u32,
    rows: Vec<(usize, Vec<CycloNum>)>,
}

impl Span {
    fn new(dim: usize, level: u32) -> Self {
        Span { dim, level, rows: Vec::new() }
    }

    /// Adds `v` if independent; returns whether the span grew.
    fn insert(&mut self, mut v: Vec<CycloNum>) -> bool {
        for (p, r) in &self.rows {
            if !v[*p].is_zero() {
                let c = v[*p].clone();
                for (x, y) in v.iter_mut().zip(r) {
                    if !y.is_zero() {
                        *x = &*x - &(&c * y);
                    }
                }
            }
        }
        let Some(p) = v.iter().position(|x| !x.is_zero()) else { return false };
        let inv = v[p].inv().expect("nonzero");
        let v: Vec<CycloNum> = v.iter().map(|x| x * &inv).collect();
        for (_, r) in &mut self.rows {
            if !r[p].is_zero() {
                let c = r[p].clone();
                for (x, y) in r.iter_mut().zip(&v) {
                    if !y.is_zero() {
                        *x = &*x - &(&c * y);
                    }
                }
            }
        }
        self.rows.push((p, v));
        true
    }

    fn len(&self) -> usize {
        self.rows.len()
    }

    fn reduced(mut self) -> (Vec<Vec<CycloNum>>, Vec<usize>) {
        self.rows.sort_by_key(|(p, _)| *p);
        let pivots = self.rows.iter().map(|(p, _)| *p).collect();
        (self.rows.into_iter().map(|(_, r)| r).collect(), pivots)
    }

    fn complement(&self) -> Vec<Vec<CycloNum>> {
        (0..self.dim)
            .filter(|c| !self.rows.iter().any(|(p, _)| p == c))
            .map(|c| {
                let mut v = vec![CycloNum::zero(self.level); self.dim];
                v[c] = CycloNum::one(self.level);
                v
            })
            .collect()
    }
}

/// Matrices `M₁, …, M_m` with `M₁⋯M_m = 1`; the last is the monodromy at infinity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixTuple {
    level: u32,
    mats: Vec<Mat>,
}

impl MatrixTuple {
    pub fn new(mats: Vec<Mat>) -> Result<Self> {
        if mats.len() < 2 {
            return Err(Error::InvalidInput("need at least two matrices".into()));
        }
        let d = mats[0].rows;
        if mats.iter().any(|m| m.rows != d || m.cols != d) {
            return Err(Error::InvalidInput("matrices of different sizes".into()));
        }
        let level = mats.iter().fold(1u64, |a, m| lcm(a, m.level as u64)) as u32;
        let prod = mats.iter().skip(1).fold(mats[0].clone(), |acc, m| acc.mul(m));
        if !prod.is_identity() {
            return Err(Error::InvalidInput("product of the tuple is not the identity".into()));
        }
        Ok(MatrixTuple { level, mats })
    }

    /// Completes `A₁, …, A_r` with `A_∞ = (A₁⋯A_r)⁻¹`.
    pub fn from_finite(finite: Vec<Mat>) -> Result<Self> {
        let prod = finite.iter().skip(1).fold(finite[0].clone(), |acc, m| acc.mul(m));
        let mut mats = finite;
        mats.push(prod.inverse()?);
        Self::new(mats)
    }

    /// Rank-one tuple of roots of unity `ζ_L^{k_i}` at the finite points, completed at infinity.
    pub fn kummer(level: u32, exps: &[i64]) -> Result<Self> {
        Self::from_finite(exps.iter().map(|&k| Mat::scalar(1, &CycloNum::root(level, k))).collect())
    }

    pub fn rank(&self) -> usize {
        self.mats[0].rows
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn mats(&self) -> &[Mat] {
        &self.mats
    }

    /// Burnside: absolutely irreducible iff the generated algebra is all of `M_d`.
    pub fn is_irreducible(&self) -> bool {
        let d = self.rank();
        let flat = |m: &Mat| m.data.clone();
        let mut span = Span::new(d * d, self.level);
        let mut frontier = vec![Mat::identity(d, self.level)];
        span.insert(flat(&frontier[0]));
        while let Some(x) = frontier.pop() {
            for g in &self.mats {
                let y = x.mul(g);
                if span.insert(flat(&y)) {
                    if span.len() == d * d {
                        return true;
                    }
                    frontier.push(y);
                }
            }
        }
        span.len() == d * d
    }

    /// Local data at the given points, one per matrix.
    pub fn to_monodromy_tuple(&self, points: Vec<Point>) -> Result<MonodromyTuple> {
        if points.len() != self.mats.len() {
            return Err(Error::InvalidInput("one point per matrix".into()));
        }
        let data = self.mats.iter().map(|m| m.local_datum()).collect::<Result<Vec<_>>>()?;
        MonodromyTuple::new(self.rank(), points.into_iter().zip(data).collect())
    }
}

/// Dettweiler–Reiter middle convolution `MC_λ` of an irreducible tuple.
///
/// `λ = 1` is the identity functor and returns the input.
pub fn middle_convolution(mt: &MatrixTuple, lambda: RootOfUnity) -> Result<MatrixTuple> {
    if !mt.is_irreducible() {
        return Err(Error::ReducibleInput);
    }
    let lam = lambda.to_cyclo();
    let level = lcm(mt.level as u64, lam.level() as u64) as u32;
    let lam = lam.lift_level(level)?;
    if lam == CycloNum::one(level) {
        return Ok(mt.clone());
    }
    let d = mt.rank();
    let finite = &mt.mats[..mt.mats.len() - 1];
    let r = finite.len();
    let n = r * d;
    let id = Mat::identity(d, level);
    let bs: Vec<Mat> = (0..r)
        .map(|k| {
            let mut b = Mat::identity(n, level);
            for j in 0..r {
                let block = if j < k {
                    finite[j].sub(&id)
                } else if j == k {
                    finite[j].scale(&lam)
                } else {
                    finite[j].sub(&id).scale(&lam)
                };
                for a in 0..d {
                    for c in 0..d {
                        b.set(k * d + a, j * d + c, block.get(a, c).clone());
                    }
                }
            }
            b
        })
        .collect();
    let mut span = Span::new(n, level);
    for (k, a) in finite.iter().enumerate() {
        for v in a.sub(&id).nullspace() {
            let mut w = vec![CycloNum::zero(level); n];
            for (i, x) in v.into_iter().enumerate() {
                w[k * d + i] = x;
            }
            span.insert(w);
        }
    }
    let mut stacked = Mat::zero(n * r, n, level);
    for (k, b) in bs.iter().enumerate() {
        let m = b.sub(&Mat::identity(n, level));
        for i in 0..n {
            for j in 0..n {
                stacked.set(k * n + i, j, m.get(i, j).clone());
            }
        }
    }
    for v in stacked.nullspace() {
        span.insert(v);
    }
    let s = span.len();
    if s == n {
        return Err(Error::SpecialScalar);
    }
    let mut basis: Vec<Vec<CycloNum>> = span.rows.iter().map(|(_, r)| r.clone()).collect();
    basis.extend(span.complement());
    let mut p = Mat::zero(n, n, level);
    for (j, v) in basis.iter().enumerate() {
        for (i, x) in v.iter().enumerate() {
            p.set(i, j, x.clone());
        }
    }
    let pinv = p.inverse()?;
    let m = n - s;
    let reduced: Vec<Mat> = bs
        .iter()
        .map(|b| {
            let c = pinv.mul(b).mul(&p);
            let mut out = Mat::zero(m, m, level);
            for i in 0..m {
                for j in 0..m {
                    out.set(i, j, c.get(s + i, s + j).clone());
                }
            }
            out
        })
        .collect();
    MatrixTuple::from_finite(reduced)
}

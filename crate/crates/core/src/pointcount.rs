//! Character-eigenspace point sums on cyclic covers `y^N = Π (x - λ_j)^{i_j}`,
//! Frobenius characteristic polynomials from extension counts, purity checks.

use std::sync::Arc;

use num_complex::Complex64;
use num_rational::BigRational;
use serde::Serialize;

use crate::characters::{chi_q, chi_q_anchored, MultChar};
use crate::cyclotomic::CycloNum;
use crate::error::{Error, Result};
use crate::ff::{make_field, Elem, FiniteField};
use crate::par::{self, Execution};
use crate::poly::{complex_roots, rat};
use crate::primes::{factorize, gcd, pow_mod};

/// The family `y^N = Π_{j=0}^{r+1} (x - λ_j)^{i_j}` over `r + 2` branch parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CurveFamily {
    n: u64,
    exponents: Vec<i64>,
}

/// A branch point of the family: one of the `λ_j`, or infinity.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchPoint {
    Finite(usize),
    Infinity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Ramification {
    pub d: u64,
    pub index: u64,
    pub fiber_size: u64,
}

impl CurveFamily {
    /// Families violating `N ∤ i_j`, `N ∤ Σ i_j` are constructible; see [`CurveFamily::check_hypotheses`].
    pub fn new(n: u64, exponents: Vec<i64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidInput("cover degree must be at least 2".into()));
        }
        if exponents.len() < 2 {
            return Err(Error::InvalidInput("need at least two branch parameters".into()));
        }
        Ok(CurveFamily { n, exponents })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn exponents(&self) -> &[i64] {
        &self.exponents
    }

    /// Number of moduli `r`.
    pub fn r(&self) -> usize {
        self.exponents.len() - 2
    }

    pub fn check_hypotheses(&self) -> Result<()> {
        let n = self.n as i64;
        if let Some(j) = self.exponents.iter().position(|i| i.rem_euclid(n) == 0) {
            return Err(Error::HypothesisViolation(format!("N divides i_{j}")));
        }
        if self.exponents.iter().sum::<i64>().rem_euclid(n) == 0 {
            return Err(Error::HypothesisViolation("N divides the exponent sum".into()));
        }
        Ok(())
    }

    /// Dimension `r + 1` of each primitive eigenspace.
    pub fn eigenspace_dimension(&self) -> Result<usize> {
        self.check_hypotheses()?;
        Ok(self.r() + 1)
    }

    /// `d_s = gcd(N, i_s)` (or `gcd(N, Σ i)` at infinity), `N_s = N / d_s`, and `d_s` points above `s`.
    pub fn ramification_data(&self, s: BranchPoint) -> Result<Ramification> {
        self.check_hypotheses()?;
        let i = match s {
            BranchPoint::Finite(j) => *self
                .exponents
                .get(j)
                .ok_or_else(|| Error::InvalidInput(format!("no branch point {j}")))?,
            BranchPoint::Infinity => self.exponents.iter().sum(),
        };
        let d = gcd(self.n, i.unsigned_abs());
        Ok(Ramification { d, index: self.n / d, fiber_size: d })
    }

    fn check_lambda(&self, f: &FiniteField, lambda: &[Elem]) -> Result<()> {
        if lambda.len() != self.exponents.len() {
            return Err(Error::InvalidInput(format!(
                "expected {} parameters, got {}",
                self.exponents.len(),
                lambda.len()
            )));
        }
        if lambda.iter().any(|&l| l as u64 >= f.q()) {
            return Err(Error::InvalidInput("parameter outside the field".into()));
        }
        for (a, l) in lambda.iter().enumerate() {
            if lambda[..a].contains(l) {
                return Err(Error::DiscriminantZero);
            }
        }
        if f.order() % self.n != 0 {
            return Err(Error::CongruenceViolation { q: f.q(), modulus: self.n });
        }
        Ok(())
    }
}

/// Smallest primitive `N`-th root of unity in `F_p`, if `N | p - 1`.
pub fn base_root_of_unity(p: u64, n: u64) -> Option<u64> {
    if (p - 1) % n != 0 {
        return None;
    }
    let primes: Vec<u64> = factorize(n).into_iter().map(|(l, _)| l).collect();
    (1..p).find(|&a| pow_mod(a, n, p) == 1 && primes.iter().all(|&l| pow_mod(a, n / l, p) != 1))
}

/// `χ_q` of order dividing `N` on `F_q`, anchored in the prime field when possible so that
/// characters over extensions are compositions with the norm.
pub fn eigen_character(k: i64, n: u64, field: &Arc<FiniteField>) -> Result<MultChar> {
    match base_root_of_unity(field.p(), n) {
        Some(a) => chi_q_anchored(k, n, field, a as Elem),
        None => chi_q(k, n, field),
    }
}

fn eigen_hist(fam: &CurveFamily, lambda: &[Elem], chi: &MultChar, f: &FiniteField, exec: Execution) -> Vec<i64> {
    point_sum_hist(&fam.exponents, lambda, chi, fam.n, f, exec)
}

/// Histogram at level `w` of `Σ_x χ(Π (x-λ_j)^{i_j})` over `x` off the branch points.
pub(crate) fn point_sum_hist(
    exponents: &[i64],
    lambda: &[Elem],
    chi: &MultChar,
    w: u64,
    f: &FiniteField,
    exec: Execution,
) -> Vec<i64> {
    let mult = chi.level_multiplier(w);
    let order = f.order();
    let exps: Vec<u64> = exponents.iter().map(|i| i.rem_euclid(order as i64) as u64).collect();
    par::histogram(exec, f.q(), w as usize, |x, hist| {
        let x = x as Elem;
        let mut e = 0u64;
        for (l, i) in lambda.iter().zip(&exps) {
            match f.log_of(f.sub(x, *l)) {
                None => return,
                Some(a) => e = (e + a * i) % order,
            }
        }
        hist[(mult * e % w) as usize] += 1;
    })
}

/// `S = Σ_{h(x, λ) ≠ 0} χ_q^k(f_i(x))`; the Frobenius trace on the `χ^k`-eigenspace is `-S`.
pub fn hyp_point_sum(
    fam: &CurveFamily,
    lambda: &[Elem],
    k: i64,
    field: &Arc<FiniteField>,
    exec: Execution,
) -> Result<CycloNum> {
    fam.check_lambda(field, lambda)?;
    if k.rem_euclid(fam.n as i64) == 0 {
        return Err(Error::HypothesisViolation("trivial character".into()));
    }
    let chi = eigen_character(k, fam.n, field)?;
    let hist = eigen_hist(fam, lambda, &chi, field, exec);
    Ok(CycloNum::from_exponent_counts(fam.n as u32, &hist))
}

/// Affine points of `y^N = f_i(x)` with `y ≠ 0`, `h(x, λ) ≠ 0`, and the eigen-sums it decomposes into.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AffineCount {
    pub count: u64,
    /// Index `k` holds `Σ χ^k(f_i(x))`; the `k = 0` term counts the admissible `x`.
    pub eigen_sums: Vec<CycloNum>,
    pub decomposition_holds: bool,
}

pub fn curve_affine_count(
    fam: &CurveFamily,
    lambda: &[Elem],
    field: &Arc<FiniteField>,
    exec: Execution,
) -> Result<AffineCount> {
    fam.check_lambda(field, lambda)?;
    let n = fam.n;
    let chi = eigen_character(1, n, field)?;
    let hist = eigen_hist(fam, lambda, &chi, field, exec);
    // y^N = c has N solutions exactly when χ(c) = 1 for the order-N character
    let count = n * hist[0] as u64;
    let mut eigen_sums = Vec::with_capacity(n as usize);
    let mut total = CycloNum::zero(n as u32);
    for k in 0..n {
        let mut hk = vec![0i64; n as usize];
        for (b, c) in hist.iter().enumerate() {
            hk[(b as u64 * k % n) as usize] += c;
        }
        let s = CycloNum::from_exponent_counts(n as u32, &hk);
        total = &total + &s;
        eigen_sums.push(s);
    }
    let decomposition_holds = total.as_rational() == Some(BigRational::from_integer((count as i64).into()));
    Ok(AffineCount { count, eigen_sums, decomposition_holds })
}

/// Power sums and characteristic polynomial of Frobenius on one eigenspace.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FrobeniusData {
    pub p: u64,
    pub n: u64,
    pub k: i64,
    pub lambda: Vec<u64>,
    /// `S_d = tr(Frob^d)` for `d = 1..m`.
    pub power_sums: Vec<CycloNum>,
    /// Monic, lowest degree first.
    pub charpoly: Vec<CycloNum>,
}

impl FrobeniusData {
    /// Builds the degree-`rank` characteristic polynomial from `S_1..S_rank` and checks the rest.
    pub fn from_power_sums(p: u64, n: u64, k: i64, lambda: Vec<u64>, power_sums: Vec<CycloNum>, rank: usize) -> Result<Self> {
        if power_sums.len() < rank {
            return Err(Error::InvalidInput(format!("need {rank} power sums")));
        }
        let level = n as u32;
        let mut e = vec![CycloNum::one(level)];
        for j in 1..=rank {
            let mut acc = CycloNum::zero(level);
            for i in 1..=j {
                let term = &e[j - i] * &power_sums[i - 1];
                acc = if i % 2 == 1 { &acc + &term } else { &acc - &term };
            }
            e.push(acc.scale(&BigRational::new(1.into(), (j as i64).into())));
        }
        for d in rank + 1..=power_sums.len() {
            let mut pred = CycloNum::zero(level);
            for i in 1..=rank {
                let term = &e[i] * &power_sums[d - i - 1];
                pred = if i % 2 == 1 { &pred + &term } else { &pred - &term };
            }
            if pred != power_sums[d - 1] {
                return Err(Error::NewtonInconsistency { degree: d });
            }
        }
        let charpoly = (0..=rank)
            .map(|i| {
                let j = rank - i;
                if j % 2 == 0 { e[j].clone() } else { -&e[j] }
            })
            .collect();
        Ok(FrobeniusData { p, n, k, lambda, power_sums, charpoly })
    }

    pub fn rank(&self) -> usize {
        self.charpoly.len() - 1
    }

    /// Coefficients under the embedding `ζ_N ↦ e^{2πiσ/N}`.
    pub fn embedded_charpoly(&self, sigma: i64) -> Result<Vec<Complex64>> {
        self.charpoly.iter().map(|c| c.embed_complex(sigma)).collect()
    }
}

/// `S_d = -hyp_point_sum` over `F_{p^d}` for `d = 1..m`, then Newton's identities.
pub fn frobenius_charpoly(
    fam: &CurveFamily,
    lambda: &[u64],
    k: i64,
    p: u64,
    m: u32,
    exec: Execution,
) -> Result<FrobeniusData> {
    let rank = fam.eigenspace_dimension()?;
    if (m as usize) < rank {
        return Err(Error::InvalidInput(format!("need at least {rank} extension degrees")));
    }
    if (p - 1) % fam.n != 0 {
        return Err(Error::CongruenceViolation { q: p, modulus: fam.n });
    }
    let fields = (1..=m).map(|d| make_field(p, d, None)).collect::<Result<Vec<_>>>()?;
    let lam: Vec<Elem> = lambda.iter().map(|&l| (l % p) as Elem).collect();
    let sums = par::map(exec, fields, |f| {
        hyp_point_sum(fam, &lam, k, &f, Execution::Sequential).map(|s| -s)
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    FrobeniusData::from_power_sums(p, fam.n, k, lambda.to_vec(), sums, rank)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PurityReport {
    pub expected_modulus: f64,
    pub max_relative_deviation: f64,
    /// Roots per embedding `σ`.
    pub roots: Vec<(i64, Vec<(f64, f64)>)>,
}

/// Every root at every embedding must have modulus `√p` to within `1e-6·√p`.
pub fn purity_check(data: &FrobeniusData) -> Result<PurityReport> {
    let expected = (data.p as f64).sqrt();
    let mut worst = 0.0f64;
    let mut roots = Vec::new();
    for sigma in data.charpoly[0].embeddings() {
        let rs = complex_roots(&data.embedded_charpoly(sigma)?);
        for r in &rs {
            let dev = (r.norm() - expected).abs() / expected;
            if dev >= 1e-6 {
                return Err(Error::PurityViolation { modulus: r.norm(), expected });
            }
            worst = worst.max(dev);
        }
        roots.push((sigma, rs.iter().map(|z| (z.re, z.im)).collect()));
    }
    Ok(PurityReport { expected_modulus: expected, max_relative_deviation: worst, roots })
}

/// `(kc/N, k(a+b+c)/N - 1, k(a+c)/N)`: Gauss parameters of the de Rham eigenspace.
pub fn katz_connection_params(n: u64, a: i64, b: i64, c: i64, k: i64) -> Result<[BigRational; 3]> {
    let ni = n as i64;
    for (name, v) in [("a", a), ("b", b), ("c", c), ("a+b+c", a + b + c)] {
        if v.rem_euclid(ni) == 0 {
            return Err(Error::HypothesisViolation(format!("N divides {name}")));
        }
    }
    if gcd(k.unsigned_abs(), n) != 1 {
        return Err(Error::HypothesisViolation("k is not a unit mod N".into()));
    }
    let fr = |x: i64| BigRational::new(x.into(), ni.into());
    Ok([fr(k * c), fr(k * (a + b + c)) - rat(1), fr(k * (a + c))])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn legendre() -> CurveFamily {
        CurveFamily::new(2, vec![1, 1, 1]).unwrap()
    }

    fn picard() -> CurveFamily {
        CurveFamily::new(3, vec![1, 1, 1, 1]).unwrap()
    }

    /// Affine points with `y ≠ 0`, `h ≠ 0`, enumerating `y` directly.
    fn brute_count(fam: &CurveFamily, lambda: &[Elem], f: &FiniteField) -> u64 {
        let mut pows = vec![0u64; f.q() as usize];
        for y in 1..f.q() as Elem {
            pows[f.pow(y, fam.n() as i64).unwrap() as usize] += 1;
        }
        let mut count = 0;
        for x in f.elements() {
            if lambda.iter().any(|&l| l == x) {
                continue;
            }
            let mut v = 1;
            for (l, i) in lambda.iter().zip(fam.exponents()) {
                v = f.mul(v, f.pow(f.sub(x, *l), *i).unwrap());
            }
            count += pows[v as usize];
        }
        count
    }

    #[test]
    fn legendre_at_five() {
        let f = make_field(5, 1, None).unwrap();
        let s = hyp_point_sum(&legendre(), &[0, 1, 2], 1, &f, Execution::Sequential).unwrap();
        assert_eq!(s.as_rational(), Some(rat(2)));
        // 8 projective points: 7 affine (3 with y = 0) plus one at infinity
        assert_eq!(brute_count(&legendre(), &[0, 1, 2], &f) + 3 + 1, 8);
        let data = frobenius_charpoly(&legendre(), &[0, 1, 2], 1, 5, 2, Execution::Sequential).unwrap();
        let c: Vec<_> = data.charpoly.iter().map(|c| c.as_rational().unwrap()).collect();
        assert_eq!(c, vec![rat(5), rat(2), rat(1)]);
        purity_check(&data).unwrap();
        assert!(matches!(
            hyp_point_sum(&legendre(), &[0, 1, 2], 2, &f, Execution::Sequential),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn errors() {
        let f = make_field(5, 1, None).unwrap();
        assert_eq!(
            hyp_point_sum(&legendre(), &[0, 1, 1], 1, &f, Execution::Sequential),
            Err(Error::DiscriminantZero)
        );
        assert!(matches!(
            hyp_point_sum(&picard(), &[0, 1, 2, 3], 1, &f, Execution::Sequential),
            Err(Error::CongruenceViolation { .. })
        ));
        assert!(matches!(
            curve_affine_count(&picard(), &[0, 1, 2, 3], &f, Execution::Sequential),
            Err(Error::CongruenceViolation { .. })
        ));
    }

    #[test]
    fn affine_count_decomposes() {
        for (fam, lam, p) in [(legendre(), vec![0, 1, 2], 5), (picard(), vec![0, 1, 2, 3], 7)] {
            let f = make_field(p, 1, None).unwrap();
            let c = curve_affine_count(&fam, &lam, &f, Execution::Sequential).unwrap();
            assert!(c.decomposition_holds);
            assert_eq!(c.count, brute_count(&fam, &lam, &f));
        }
        let f = make_field(13, 2, None).unwrap();
        let fam = CurveFamily::new(6, vec![2, 2, 3]).unwrap();
        let c = curve_affine_count(&fam, &[0, 1, 5], &f, Execution::Parallel).unwrap();
        assert!(c.decomposition_holds);
        assert_eq!(c.count, brute_count(&fam, &[0, 1, 5], &f));
    }

    #[test]
    fn picard_weil_bound() {
        let f = make_field(7, 1, None).unwrap();
        let fam = picard();
        for a in 0..7 {
            for b in 0..7 {
                for c in 0..7 {
                    for d in 0..7 {
                        let lam = [a, b, c, d];
                        let Ok(s) = hyp_point_sum(&fam, &lam, 1, &f, Execution::Sequential) else { continue };
                        for sigma in s.embeddings() {
                            assert!(s.embed_complex(sigma).unwrap().norm() <= 3.0 * 7f64.sqrt() + 1e-9);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn picard_charpoly_consistent_and_pure() {
        let data = frobenius_charpoly(&picard(), &[0, 1, 2, 3], 1, 7, 6, Execution::Parallel).unwrap();
        assert_eq!(data.rank(), 3);
        let rep = purity_check(&data).unwrap();
        assert!(rep.max_relative_deviation < 1e-6);
        // direct counts over F_{7^d} by enumeration of y agree with the eigen-sums
        for d in 1..=3u32 {
            let f = make_field(7, d, None).unwrap();
            let count = brute_count(&picard(), &[0, 1, 2, 3], &f);
            let c = curve_affine_count(&picard(), &[0, 1, 2, 3], &f, Execution::Sequential).unwrap();
            assert_eq!(count, c.count);
        }
    }

    #[test]
    fn galois_equivariance_of_charpoly() {
        let d1 = frobenius_charpoly(&picard(), &[0, 1, 2, 4], 1, 7, 3, Execution::Sequential).unwrap();
        let d2 = frobenius_charpoly(&picard(), &[0, 1, 2, 4], 2, 7, 3, Execution::Sequential).unwrap();
        for (a, b) in d1.charpoly.iter().zip(&d2.charpoly) {
            assert_eq!(a.galois(2).unwrap(), *b);
        }
    }

    #[test]
    fn fault_injection() {
        let data = frobenius_charpoly(&picard(), &[0, 1, 2, 3], 1, 7, 4, Execution::Sequential).unwrap();
        let mut sums = data.power_sums.clone();
        sums[0] = &sums[0] + &CycloNum::one(3);
        let r = FrobeniusData::from_power_sums(7, 3, 1, vec![0, 1, 2, 3], sums, 3);
        match r {
            Err(Error::NewtonInconsistency { degree: 4 }) => {}
            Ok(d) => assert!(matches!(purity_check(&d), Err(Error::PurityViolation { .. }))),
            Err(e) => panic!("{e}"),
        }
    }

    #[test]
    fn six_fold_cover() {
        let fam = CurveFamily::new(6, vec![2, 2, 3]).unwrap();
        assert_eq!(fam.eigenspace_dimension().unwrap(), 2);
        let fibers: Vec<u64> = [BranchPoint::Finite(0), BranchPoint::Finite(1), BranchPoint::Finite(2), BranchPoint::Infinity]
            .into_iter()
            .map(|s| fam.ramification_data(s).unwrap().fiber_size)
            .collect();
        assert_eq!(fibers, vec![2, 2, 3, 1]);
        for lam in [3u64, 4, 5] {
            let data = frobenius_charpoly(&fam, &[0, 1, lam], 1, 13, 3, Execution::Sequential).unwrap();
            purity_check(&data).unwrap();
        }
        let r = picard().ramification_data(BranchPoint::Infinity).unwrap();
        assert_eq!((r.d, r.index), (1, 3));
        assert!(matches!(
            CurveFamily::new(4, vec![2, 2]).unwrap().eigenspace_dimension(),
            Err(Error::HypothesisViolation(_))
        ));
    }

    #[test]
    fn connection_params() {
        let [a, b, c] = katz_connection_params(2, 1, 1, 1, 1).unwrap();
        assert_eq!((a, b, c), (BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into()), rat(1)));
        let [a, b, c] = katz_connection_params(6, 2, 2, 3, 1).unwrap();
        assert_eq!(
            [a, b, c],
            [BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 6.into()), BigRational::new(5.into(), 6.into())]
        );
        for k in [1, 5] {
            let x = katz_connection_params(6, 2, 2, 3, k).unwrap();
            let y = katz_connection_params(6, 2, 2, 3, 6 - k).unwrap();
            for (u, v) in x.iter().zip(&y) {
                assert!((u + v).is_integer());
            }
        }
        assert!(katz_connection_params(6, 2, 2, 3, 2).is_err());
    }

    #[test]
    fn base_roots() {
        assert_eq!(base_root_of_unity(7, 3), Some(2));
        assert_eq!(base_root_of_unity(5, 2), Some(4));
        assert_eq!(base_root_of_unity(5, 3), None);
    }
}

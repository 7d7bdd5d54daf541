//! Two-tier exact verification of identity specs over prime fields.
//!
//! Each side is a `z`-independent scale (a normalizing Jacobi sum or the `H^can`
//! constant) times an integer histogram of roots of unity at a common level `W`.
//! Tier 1 checks `L(z)·R(z₀) = R(z)·L(z₀)` on histograms, where the scales cancel;
//! tier 2 compares the constant `L(z₀)/R(z₀)` with the expected one exactly.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::expr::{Algebra, Expr, FfAlg};
use super::spec::{CExpected, CSide, Compiled, FunctionKind, IdentitySpec};
use crate::characters::MultChar;
use crate::charsums::{
    core_hist, fd_hist, hcan_constant, jacobi_sum, p2_hist, trace_h_can_at_1, working_level, HCanParams, LevelChar,
};
use crate::cyclotomic::{CycloNum, IntCyclo};
use crate::error::{Error, Result};
use crate::ff::{make_field, Elem, FiniteField};
use crate::par::{self, Execution};
use crate::pointcount::point_sum_hist;
use crate::primes::{gcd, lcm};

/// Report schema tag.
pub const SCHEMA: &str = "hypertrace/1";

const MAX_INSTANCES: u64 = 1 << 20;
const MAX_WITNESSES: usize = 8;

/// One concrete choice of characters (and of `ω`) at a prime.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct InstanceKey {
    /// `η = η₀^k` where `η₀` sends the field generator to `ζ_M`.
    pub eta_exponent: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub omega: Option<u64>,
    /// Exponent over `q - 1` of each free character.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub bindings: BTreeMap<String, u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum WitnessKind {
    /// Exactly one side vanishes.
    ZeroMismatch,
    /// Both sides are nonzero but their ratio differs from the reference ratio.
    RatioMismatch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub point: Vec<u64>,
    pub kind: WitnessKind,
    pub lhs: CycloNum,
    pub rhs: CycloNum,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Tier2 {
    Pass,
    /// Tier 1 holds but the constant differs from the expected one.
    NormalizationDivergence,
    /// Empirical constant, or no point where both sides are nonzero.
    NotApplicable,
    /// Tier 1 failed, so there is no constant to compare.
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InstanceReport {
    #[serde(flatten)]
    pub key: InstanceKey,
    pub points_tested: u64,
    pub points_excluded: u64,
    /// Tested points where both sides vanish.
    pub points_both_zero: u64,
    pub exclusions: BTreeMap<String, u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<u64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_note: Option<String>,
    pub tier1_pass: bool,
    pub tier2: Tier2,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub constant: Option<CycloNum>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub expected: Option<CycloNum>,
    pub failure_count: u64,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<Witness>,
    /// Why the instance could not be evaluated (degenerate parameters).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Pass,
    Fail,
    NormalizationDivergence,
    /// The prime violates the congruence condition.
    Skipped,
    /// No character instance satisfies the constraints at this prime.
    Vacuous,
    Error,
}

impl Status {
    /// Whether this status counts against the run (`strict` also rejects divergences).
    pub fn is_failure(self, strict: bool) -> bool {
        match self {
            Status::Fail | Status::Error => true,
            Status::NormalizationDivergence => strict,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub schema: String,
    pub identity: String,
    pub prime: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
    pub instances_total: u64,
    pub instances_skipped: u64,
    pub points_tested: u64,
    pub points_excluded: u64,
    pub tier1_pass: bool,
    pub tier2_pass: bool,
    pub instances: Vec<InstanceReport>,
}

impl VerificationReport {
    fn bare(spec: &IdentitySpec, p: u64, status: Status, notice: String) -> Self {
        VerificationReport {
            schema: SCHEMA.into(),
            identity: spec.name.clone(),
            prime: p,
            status,
            notice: Some(notice),
            instances_total: 0,
            instances_skipped: 0,
            points_tested: 0,
            points_excluded: 0,
            tier1_pass: true,
            tier2_pass: true,
            instances: vec![],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AggregateReport {
    pub schema: String,
    pub identity: String,
    pub primes_requested: Vec<u64>,
    pub passed: bool,
    pub reports: Vec<VerificationReport>,
}

impl AggregateReport {
    pub fn passed_with(&self, strict: bool) -> bool {
        self.reports.iter().all(|r| !r.status.is_failure(strict))
    }
}

struct BoundSide<'a> {
    cs: &'a CSide,
    chars: Vec<MultChar>,
    pref: Vec<LevelChar>,
    scale: CycloNum,
    hcan: Option<HCanParams>,
}

struct Bound<'a> {
    f: Arc<FiniteField>,
    w: u64,
    env: BTreeMap<String, MultChar>,
    omega: Option<Elem>,
    sides: [BoundSide<'a>; 2],
}

enum PointEval {
    Excluded(String),
    Value(IntCyclo, IntCyclo),
}

fn side_name(i: usize) -> &'static str {
    ["lhs", "rhs"][i]
}

/// Enumerate the character instances of `spec` at `p`, in deterministic order.
pub fn instances(spec: &IdentitySpec, p: u64) -> Result<Vec<InstanceKey>> {
    let c = Compiled::new(spec)?;
    let f = make_field(p, 1, None)?;
    check_congruence(spec, &f)?;
    enumerate(spec, &c, &f)
}

fn check_congruence(spec: &IdentitySpec, f: &FiniteField) -> Result<()> {
    if f.order() % spec.modulus != 0 {
        return Err(Error::CongruenceViolation { q: f.q(), modulus: spec.modulus });
    }
    Ok(())
}

fn base_env(f: &Arc<FiniteField>, spec: &IdentitySpec, k: i64) -> Result<BTreeMap<String, MultChar>> {
    let mut env = BTreeMap::new();
    env.insert("eta".to_string(), MultChar::of_order(f, spec.modulus, k)?);
    if f.order() % 2 == 0 {
        env.insert("eps".to_string(), MultChar::legendre(f)?);
    }
    Ok(env)
}

fn enumerate(spec: &IdentitySpec, c: &Compiled, f: &Arc<FiniteField>) -> Result<Vec<InstanceKey>> {
    let m = spec.modulus;
    let etas: Vec<i64> = if c.uses_eta {
        (1..=m).filter(|&k| gcd(k, m) == 1).map(|k| k as i64).collect()
    } else {
        vec![1]
    };
    let omegas: Vec<Option<u64>> = if spec.omega {
        let p = f.p();
        (2..p).filter(|w| (w * w + w + 1) % p == 0).map(Some).collect()
    } else {
        vec![None]
    };
    let n = f.order();
    let total = (n as u128).pow(c.free.len() as u32);
    if total > MAX_INSTANCES as u128 {
        return Err(Error::InvalidInput(format!("{total} free-character assignments exceed the sweep limit")));
    }
    let mut assignments: Vec<Vec<u64>> = vec![vec![]];
    for _ in &c.free {
        assignments = assignments
            .into_iter()
            .flat_map(|a| {
                (0..n).map(move |e| {
                    let mut b = a.clone();
                    b.push(e);
                    b
                })
            })
            .collect();
    }
    assignments.retain(|a| c.unordered.iter().all(|g| g.windows(2).all(|w| a[w[0]] <= a[w[1]])));
    let mut out = Vec::new();
    for &k in &etas {
        let env0 = base_env(f, spec, k)?;
        for &omega in &omegas {
            for a in &assignments {
                let mut env = env0.clone();
                for (name, &e) in c.free.iter().zip(a) {
                    env.insert(name.clone(), MultChar::new(f, e as i64));
                }
                let mut ok = true;
                for x in &c.constraints {
                    if x.eval(f, &env)?.is_trivial() {
                        ok = false;
                        break;
                    }
                }
                if ok {
                    out.push(InstanceKey {
                        eta_exponent: k,
                        omega,
                        bindings: c.free.iter().cloned().zip(a.iter().copied()).collect(),
                    });
                }
            }
        }
    }
    Ok(out)
}

fn bind<'a>(spec: &IdentitySpec, c: &'a Compiled, f: &Arc<FiniteField>, key: &InstanceKey) -> Result<Bound<'a>> {
    let mut env = base_env(f, spec, key.eta_exponent)?;
    for (name, &e) in &key.bindings {
        env.insert(name.clone(), MultChar::new(f, e as i64));
    }
    let mut w = 1u64;
    let mut resolved = Vec::new();
    for cs in &c.sides {
        let chars = cs.chars.iter().map(|x| x.eval(f, &env)).collect::<Result<Vec<_>>>()?;
        let pref = cs.prefactors.iter().map(|(x, _)| x.eval(f, &env)).collect::<Result<Vec<_>>>()?;
        w = lcm(w, working_level(&chars.iter().chain(&pref).collect::<Vec<_>>()));
        resolved.push((cs, chars, pref));
    }
    let mut sides = Vec::new();
    for (cs, chars, pref) in resolved {
        let mut hcan = None;
        let scale = match cs.kind {
            FunctionKind::F21 => {
                let j = jacobi_sum(&chars[1], &chars[2].div(&chars[1])?)?;
                if j.is_zero() {
                    return Err(Error::ZeroNormalizer);
                }
                j.inv()?
            }
            FunctionKind::TraceHcan | FunctionKind::TraceHcanAt1 => {
                let h = HCanParams::new(chars[0].clone(), chars[1].clone(), chars[2].clone(), chars[3].clone())?;
                let s = if cs.kind == FunctionKind::TraceHcan { hcan_constant(&h)? } else { trace_h_can_at_1(&h)? };
                hcan = Some(h);
                s
            }
            FunctionKind::P21 | FunctionKind::Fd | FunctionKind::PointSum => CycloNum::one(1),
        };
        sides.push(BoundSide { cs, pref: pref.iter().map(|x| LevelChar::new(x, w)).collect(), chars, scale, hcan });
    }
    let [l, r]: [BoundSide; 2] = sides.try_into().ok().unwrap();
    let omega = key.omega.map(|o| f.from_int(o as i64));
    Ok(Bound { f: f.clone(), w, env, omega, sides: [l, r] })
}

fn rotate(h: &[i64], e: u64) -> Vec<i64> {
    let w = h.len();
    let mut out = vec![0; w];
    for (k, &c) in h.iter().enumerate() {
        out[(k + e as usize) % w] = c;
    }
    out
}

impl Bound<'_> {
    fn eval_point(&self, c: &Compiled, coords: &[Elem]) -> PointEval {
        let f = &*self.f;
        let mut vars: Vec<(&str, Elem)> = c.vars.iter().map(|s| s.as_str()).zip(coords.iter().copied()).collect();
        if let Some(o) = self.omega {
            vars.push(("w", o));
        }
        for (src, e) in &c.exclude_zeros {
            match e.eval_ff(f, &vars) {
                None => return PointEval::Excluded(format!("pole of {src}")),
                Some(0) => return PointEval::Excluded(format!("zero of {src}")),
                Some(_) => {}
            }
        }
        let mut args: Vec<Vec<Elem>> = Vec::with_capacity(2);
        let mut prefs: Vec<Vec<Elem>> = Vec::with_capacity(2);
        for (i, s) in self.sides.iter().enumerate() {
            let side = side_name(i);
            let mut a = Vec::with_capacity(s.cs.args.len());
            for e in &s.cs.args {
                let Some(v) = e.eval_ff(f, &vars) else {
                    return PointEval::Excluded(format!("{side} argument pole"));
                };
                for &x in &s.cs.exclude_args {
                    if v == f.from_int(x) {
                        return PointEval::Excluded(format!("{side} argument = {x}"));
                    }
                }
                a.push(v);
            }
            if s.cs.kind == FunctionKind::PointSum {
                let mut sorted = a.clone();
                sorted.sort_unstable();
                if sorted.windows(2).any(|p| p[0] == p[1]) {
                    return PointEval::Excluded(format!("{side} branch points collide"));
                }
            }
            let mut pv = Vec::with_capacity(s.cs.prefactors.len());
            for (_, e) in &s.cs.prefactors {
                match e.eval_ff(f, &vars) {
                    None => return PointEval::Excluded(format!("{side} prefactor pole")),
                    Some(0) => return PointEval::Excluded(format!("{side} prefactor zero")),
                    Some(v) => pv.push(v),
                }
            }
            args.push(a);
            prefs.push(pv);
        }
        let h0 = self.hist(0, &args[0], &prefs[0]);
        let h1 = self.hist(1, &args[1], &prefs[1]);
        PointEval::Value(IntCyclo::from_counts(self.w as u32, &h0), IntCyclo::from_counts(self.w as u32, &h1))
    }

    fn hist(&self, i: usize, args: &[Elem], pref_args: &[Elem]) -> Vec<i64> {
        let s = &self.sides[i];
        let (f, w) = (&*self.f, self.w);
        let seq = Execution::Sequential;
        let ch = &s.chars;
        let mut h = match s.cs.kind {
            FunctionKind::F21 | FunctionKind::P21 => p2_hist(f, w, &ch[0], &ch[1], &ch[2], args[0], seq),
            FunctionKind::Fd => {
                let n = ch.len();
                fd_hist(f, w, &ch[0], &ch[1..n - 1], &ch[n - 1], args, seq)
            }
            FunctionKind::TraceHcan => {
                let params = s.hcan.as_ref().unwrap();
                let [l, m, n] = params.core_chars();
                let t = args[0];
                match LevelChar::new(&params.alpha[1], w).at(f, t) {
                    None => vec![0; w as usize],
                    Some(e) => rotate(&core_hist(f, w, &l, &m, &n, t, seq), e),
                }
            }
            FunctionKind::TraceHcanAt1 => {
                let mut h = vec![0; w as usize];
                h[0] = 1;
                h
            }
            FunctionKind::PointSum => point_sum_hist(&s.cs.exponents, args, &ch[0], w, f, seq),
        };
        for (lc, &a) in s.pref.iter().zip(pref_args) {
            h = rotate(&h, lc.at(f, a).expect("prefactor arguments are nonzero"));
        }
        h
    }

    fn value(&self, i: usize, h: &IntCyclo) -> CycloNum {
        (&self.sides[i].scale * &h.to_cyclo()).minimal_level()
    }

    fn constant(&self, l: &IntCyclo, r: &IntCyclo) -> Result<CycloNum> {
        Ok(self.value(0, l).div(&self.value(1, r))?.minimal_level())
    }
}

fn coords_of(index: u64, q: u64, nvars: usize) -> Vec<Elem> {
    let mut out = vec![0; nvars];
    let mut i = index;
    for slot in out.iter_mut().rev() {
        *slot = (i % q) as Elem;
        i /= q;
    }
    out
}

fn index_of(coords: &[Elem], q: u64) -> u64 {
    coords.iter().fold(0, |acc, &c| acc * q + c as u64)
}

fn rational_coords(c: &Compiled, f: &FiniteField, exprs: &[Expr]) -> Option<Vec<Elem>> {
    let alg = FfAlg(f);
    exprs
        .iter()
        .map(|e| {
            let r = e.eval_rational().ok()?;
            alg.div(&alg.int(r.numer()), &alg.int(r.denom()))
        })
        .collect::<Option<Vec<_>>>()
        .filter(|v| v.len() == c.vars.len())
}

fn run_instance(
    spec: &IdentitySpec,
    c: &Compiled,
    f: &Arc<FiniteField>,
    key: InstanceKey,
    exec: Execution,
) -> InstanceReport {
    let q = f.q();
    let npoints = q.pow(c.vars.len() as u32);
    let mut rep = InstanceReport {
        key,
        points_tested: 0,
        points_excluded: 0,
        points_both_zero: 0,
        exclusions: BTreeMap::new(),
        reference: None,
        reference_note: None,
        tier1_pass: true,
        tier2: Tier2::NotApplicable,
        constant: None,
        expected: None,
        failure_count: 0,
        failures: vec![],
        skipped: None,
    };
    let b = match bind(spec, c, f, &rep.key) {
        Ok(b) => b,
        Err(e) => {
            rep.skipped = Some(e.to_string());
            rep.tier2 = Tier2::Skipped;
            return rep;
        }
    };
    let evals = par::map(exec, (0..npoints).collect(), |i| b.eval_point(c, &coords_of(i, q, c.vars.len())));
    let nonzero = |i: usize| matches!(&evals[i], PointEval::Value(l, r) if !l.is_zero() && !r.is_zero());
    let mut reference = None;
    if let Some(exprs) = &c.reference {
        match rational_coords(c, f, exprs) {
            None => rep.reference_note = Some("reference point has a pole mod p".into()),
            Some(z0) => {
                let i = index_of(&z0, q) as usize;
                match &evals[i] {
                    PointEval::Excluded(why) => rep.reference_note = Some(format!("reference excluded: {why}")),
                    _ if !nonzero(i) => rep.reference_note = Some("a side vanishes at the reference point".into()),
                    _ => reference = Some(i),
                }
            }
        }
    }
    if reference.is_none() {
        reference = (0..evals.len()).find(|&i| nonzero(i));
    }
    let r0 = reference.map(|i| match &evals[i] {
        PointEval::Value(l, r) => (l.clone(), r.clone()),
        PointEval::Excluded(_) => unreachable!(),
    });
    for (i, ev) in evals.iter().enumerate() {
        match ev {
            PointEval::Excluded(why) => {
                rep.points_excluded += 1;
                *rep.exclusions.entry(why.clone()).or_default() += 1;
            }
            PointEval::Value(l, r) => {
                rep.points_tested += 1;
                let kind = match (l.is_zero(), r.is_zero()) {
                    (true, true) => {
                        rep.points_both_zero += 1;
                        None
                    }
                    (true, false) | (false, true) => Some(WitnessKind::ZeroMismatch),
                    (false, false) => {
                        let (l0, r0) = r0.as_ref().unwrap();
                        (l.mul(r0) != r.mul(l0)).then_some(WitnessKind::RatioMismatch)
                    }
                };
                if let Some(kind) = kind {
                    rep.tier1_pass = false;
                    rep.failure_count += 1;
                    if rep.failures.len() < MAX_WITNESSES {
                        rep.failures.push(Witness {
                            point: coords_of(i as u64, q, c.vars.len()).iter().map(|&x| x as u64).collect(),
                            kind,
                            lhs: b.value(0, l),
                            rhs: b.value(1, r),
                        });
                    }
                }
            }
        }
    }
    if let (Some(i), Some((l0, r0))) = (reference, r0) {
        rep.reference = Some(coords_of(i as u64, q, c.vars.len()).iter().map(|&x| x as u64).collect());
        rep.constant = b.constant(&l0, &r0).ok();
    }
    rep.expected = match &c.expected {
        CExpected::One => Some(CycloNum::one(1)),
        CExpected::Formula(fm) => match fm.eval(f, &b.env) {
            Ok(v) => Some(v.minimal_level()),
            Err(e) => {
                rep.reference_note.get_or_insert_with(|| format!("expected constant unavailable: {e}"));
                None
            }
        },
        CExpected::Empirical => None,
    };
    rep.tier2 = if !rep.tier1_pass {
        Tier2::Skipped
    } else {
        match (&rep.constant, &rep.expected) {
            (Some(k), Some(e)) if k == e => Tier2::Pass,
            (Some(_), Some(_)) => Tier2::NormalizationDivergence,
            _ => Tier2::NotApplicable,
        }
    };
    rep
}

/// Exhaustively verify `spec` over `F_p` for every character instance.
pub fn verify_identity(spec: &IdentitySpec, p: u64, exec: Execution) -> Result<VerificationReport> {
    let c = Compiled::new(spec)?;
    let f = make_field(p, 1, None)?;
    check_congruence(spec, &f)?;
    let keys = enumerate(spec, &c, &f)?;
    if keys.is_empty() {
        return Ok(VerificationReport::bare(
            spec,
            p,
            Status::Vacuous,
            format!("no character instance satisfies the constraints at p = {p}"),
        ));
    }
    let (outer, inner) = if keys.len() >= 8 { (exec, Execution::Sequential) } else { (Execution::Sequential, exec) };
    let instances = par::map(outer, keys, |k| run_instance(spec, &c, &f, k, inner));
    let live: Vec<&InstanceReport> = instances.iter().filter(|r| r.skipped.is_none()).collect();
    let tier1_pass = live.iter().all(|r| r.tier1_pass);
    let tier2_pass = live.iter().all(|r| r.tier2 != Tier2::NormalizationDivergence);
    let status = if live.is_empty() {
        Status::Vacuous
    } else if !tier1_pass {
        Status::Fail
    } else if !tier2_pass {
        Status::NormalizationDivergence
    } else {
        Status::Pass
    };
    Ok(VerificationReport {
        schema: SCHEMA.into(),
        identity: spec.name.clone(),
        prime: p,
        status,
        notice: (status == Status::Vacuous).then(|| "every instance is degenerate".to_string()),
        instances_total: instances.len() as u64,
        instances_skipped: (instances.len() - live.len()) as u64,
        points_tested: live.iter().map(|r| r.points_tested).sum(),
        points_excluded: live.iter().map(|r| r.points_excluded).sum(),
        tier1_pass,
        tier2_pass,
        instances,
    })
}

/// `left(z₀) / right(z₀)` for one instance.
pub fn determine_twist_constant(spec: &IdentitySpec, p: u64, key: &InstanceKey, z0: &[u64]) -> Result<CycloNum> {
    let c = Compiled::new(spec)?;
    let f = make_field(p, 1, None)?;
    check_congruence(spec, &f)?;
    if z0.len() != c.vars.len() {
        return Err(Error::InvalidInput("reference point needs one coordinate per variable".into()));
    }
    let b = bind(spec, &c, &f, key)?;
    let coords: Vec<Elem> = z0.iter().map(|&x| (x % p) as Elem).collect();
    match b.eval_point(&c, &coords) {
        PointEval::Excluded(why) => Err(Error::ExcludedPoint(why)),
        PointEval::Value(l, r) if l.is_zero() || r.is_zero() => Err(Error::ZeroAtReference),
        PointEval::Value(l, r) => b.constant(&l, &r),
    }
}

/// Verify over several primes; primes failing the congruence are skipped with a notice.
pub fn verify_over_primes(spec: &IdentitySpec, primes: &[u64], exec: Execution) -> AggregateReport {
    let mut ps = primes.to_vec();
    ps.sort_unstable();
    ps.dedup();
    let reports = par::map(exec, ps.clone(), |p| match verify_identity(spec, p, exec) {
        Ok(r) => r,
        Err(e @ Error::CongruenceViolation { .. }) => {
            VerificationReport::bare(spec, p, Status::Skipped, format!("skipped: {e}"))
        }
        Err(e) => VerificationReport::bare(spec, p, Status::Error, e.to_string()),
    });
    AggregateReport {
        schema: SCHEMA.into(),
        identity: spec.name.clone(),
        primes_requested: ps,
        passed: reports.iter().all(|r| !r.status.is_failure(false)),
        reports,
    }
}

/// `|c|` under the standard embedding.
pub fn constant_modulus(c: &CycloNum) -> f64 {
    c.embed(1).norm()
}

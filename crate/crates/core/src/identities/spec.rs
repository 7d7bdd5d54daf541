//! Declarative identity specs (the catalog JSON schema) and their compiled form.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::expr::{parse_constraint, CharExpr, Expr, Formula};
use crate::error::{Error, Result};

/// Special function evaluated on one side of an identity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum FunctionKind {
    /// Frobenius trace of `H^can(α₁, α₂; β₁, β₂)`; chars `[α₁, α₂, β₁, β₂]`, one argument.
    #[serde(rename = "TRACE_HCAN")]
    TraceHcan,
    /// Jacobi-sum closed form of the trace at `t = 1`; chars as above, no argument.
    #[serde(rename = "TRACE_HCAN_AT_1")]
    TraceHcanAt1,
    /// `₂F₁[A, B; C]`; chars `[A, B, C]`, one argument.
    F21,
    /// `₂P₁[A, B; C]`; chars `[A, B, C]`, one argument.
    P21,
    /// Lauricella kernel; chars `[A, B₁, …, B_n, C]`, `n` arguments.
    #[serde(rename = "FD")]
    Fd,
    /// `Σ_x χ(Π (x - λ_j)^{i_j})`; one char, arguments `λ_j`, plus `exponents`.
    #[serde(rename = "POINT_SUM")]
    PointSum,
}

impl FunctionKind {
    fn default_excluded_args(self) -> Vec<i64> {
        match self {
            FunctionKind::TraceHcan | FunctionKind::F21 | FunctionKind::P21 => vec![0, 1],
            _ => vec![],
        }
    }
}

/// A character-valued factor `χ(g(z))` multiplying one side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prefactor {
    pub char: String,
    pub arg: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Side {
    pub kind: FunctionKind,
    pub chars: Vec<String>,
    #[serde(default)]
    pub args: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub prefactors: Vec<Prefactor>,
    /// Argument values excluded from the sweep; defaults to `[0, 1]` for
    /// `TRACE_HCAN`, `F21` and `P21` and to none otherwise.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exclude_args: Option<Vec<i64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exponents: Vec<i64>,
}

/// The constant expected for `left / right`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum Expected {
    #[serde(rename = "EXACT_ONE")]
    ExactOne,
    #[serde(rename = "PAPER_FORMULA", alias = "FORMULA")]
    PaperFormula { value: String },
    #[serde(rename = "EMPIRICAL")]
    Empirical,
}

/// One transformation identity `left(z) = C · right(z)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentitySpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub aliases: Vec<String>,
    #[serde(default)]
    pub description: String,
    /// Primes must satisfy `p ≡ 1 mod modulus`; `eta` has exact order `modulus`.
    pub modulus: u64,
    #[serde(default = "default_variables")]
    pub variables: Vec<String>,
    /// Characters ranging over all of `F_p^×`'s dual.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub free: Vec<String>,
    /// Groups of free characters whose order does not matter.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub unordered: Vec<Vec<String>>,
    /// `"X != 1"` conditions on the character instance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub constraints: Vec<String>,
    /// Bind `w` to each primitive cube root of unity in turn.
    #[serde(default)]
    pub omega: bool,
    pub lhs: Side,
    pub rhs: Side,
    /// Points where any of these vanishes (or has a pole) are excluded.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub exclude_zeros: Vec<String>,
    pub expected: Expected,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<Vec<String>>,
    /// Default prime selection, in `prime_stream` syntax.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub primes: Option<String>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub notes: String,
}

fn default_variables() -> Vec<String> {
    vec!["z".into()]
}

impl IdentitySpec {
    pub fn from_json(text: &str) -> Result<IdentitySpec> {
        let spec: IdentitySpec = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        Compiled::new(&spec)?;
        Ok(spec)
    }

    pub fn matches(&self, name: &str) -> bool {
        let norm = |s: &str| s.to_ascii_lowercase().replace('_', "-");
        let n = norm(name);
        norm(&self.name) == n || self.aliases.iter().any(|a| norm(a) == n)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct CSide {
    pub kind: FunctionKind,
    pub chars: Vec<CharExpr>,
    pub args: Vec<Expr>,
    pub prefactors: Vec<(CharExpr, Expr)>,
    pub exclude_args: Vec<i64>,
    pub exponents: Vec<i64>,
}

#[derive(Debug, Clone)]
pub(crate) enum CExpected {
    One,
    Formula(Formula),
    Empirical,
}

#[derive(Debug, Clone)]
pub(crate) struct Compiled {
    pub vars: Vec<String>,
    pub free: Vec<String>,
    pub unordered: Vec<Vec<usize>>,
    pub constraints: Vec<CharExpr>,
    pub sides: [CSide; 2],
    pub exclude_zeros: Vec<(String, Expr)>,
    pub expected: CExpected,
    pub reference: Option<Vec<Expr>>,
    pub uses_eta: bool,
}

impl Compiled {
    pub fn new(spec: &IdentitySpec) -> Result<Compiled> {
        let bad = |m: String| Error::InvalidInput(format!("identity {}: {m}", spec.name));
        if spec.modulus == 0 {
            return Err(bad("modulus must be positive".into()));
        }
        let mut var_names: BTreeSet<&str> = spec.variables.iter().map(|s| s.as_str()).collect();
        if var_names.len() != spec.variables.len() {
            return Err(bad("repeated variable".into()));
        }
        if spec.omega {
            var_names.insert("w");
        }
        let mut char_names: BTreeSet<&str> = ["eta", "eps"].into();
        for f in &spec.free {
            if !char_names.insert(f) {
                return Err(bad(format!("free character {f:?} shadows another name")));
            }
        }
        let expr = |src: &str| -> Result<Expr> {
            let e = Expr::parse(src)?;
            if let Some(n) = e.names().iter().find(|n| !var_names.contains(n.as_str())) {
                return Err(bad(format!("unknown variable {n:?} in {src:?}")));
            }
            Ok(e)
        };
        let chr = |src: &str| -> Result<CharExpr> {
            let e = CharExpr::parse(src)?;
            if let Some(n) = e.names().find(|n| !char_names.contains(n)) {
                return Err(bad(format!("unknown character {n:?} in {src:?}")));
            }
            Ok(e)
        };
        let side = |s: &Side| -> Result<CSide> {
            let arity_ok = match s.kind {
                FunctionKind::TraceHcan => s.chars.len() == 4 && s.args.len() == 1,
                FunctionKind::TraceHcanAt1 => s.chars.len() == 4 && s.args.is_empty(),
                FunctionKind::F21 | FunctionKind::P21 => s.chars.len() == 3 && s.args.len() == 1,
                FunctionKind::Fd => !s.args.is_empty() && s.chars.len() == s.args.len() + 2,
                FunctionKind::PointSum => {
                    s.chars.len() == 1 && s.args.len() >= 2 && s.exponents.len() == s.args.len()
                }
            };
            if !arity_ok {
                return Err(bad(format!("wrong number of characters or arguments for {:?}", s.kind)));
            }
            Ok(CSide {
                kind: s.kind,
                chars: s.chars.iter().map(|c| chr(c)).collect::<Result<_>>()?,
                args: s.args.iter().map(|a| expr(a)).collect::<Result<_>>()?,
                prefactors: s
                    .prefactors
                    .iter()
                    .map(|p| Ok((chr(&p.char)?, expr(&p.arg)?)))
                    .collect::<Result<_>>()?,
                exclude_args: s.exclude_args.clone().unwrap_or_else(|| s.kind.default_excluded_args()),
                exponents: s.exponents.clone(),
            })
        };
        let sides = [side(&spec.lhs)?, side(&spec.rhs)?];
        let unordered = spec
            .unordered
            .iter()
            .map(|g| {
                g.iter()
                    .map(|n| spec.free.iter().position(|f| f == n).ok_or_else(|| bad(format!("{n:?} is not free"))))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        let constraints = spec
            .constraints
            .iter()
            .map(|c| {
                let e = parse_constraint(c)?;
                if let Some(n) = e.names().find(|n| !char_names.contains(n)) {
                    return Err(bad(format!("unknown character {n:?} in constraint")));
                }
                Ok(e)
            })
            .collect::<Result<Vec<_>>>()?;
        let expected = match &spec.expected {
            Expected::ExactOne => CExpected::One,
            Expected::Empirical => CExpected::Empirical,
            Expected::PaperFormula { value } => CExpected::Formula(Formula::parse(value)?),
        };
        let reference = match &spec.reference {
            None => None,
            Some(r) => {
                if r.len() != spec.variables.len() {
                    return Err(bad("reference point needs one coordinate per variable".into()));
                }
                let es = r.iter().map(|s| Expr::parse(s)).collect::<Result<Vec<_>>>()?;
                for e in &es {
                    e.eval_rational()?;
                }
                Some(es)
            }
        };
        let uses_eta = sides
            .iter()
            .flat_map(|s| s.chars.iter().chain(s.prefactors.iter().map(|p| &p.0)))
            .chain(constraints.iter())
            .any(|c| c.factors.contains_key("eta"));
        Ok(Compiled {
            vars: spec.variables.clone(),
            free: spec.free.clone(),
            unordered,
            constraints,
            sides,
            exclude_zeros: spec
                .exclude_zeros
                .iter()
                .map(|s| Ok((s.clone(), expr(s)?)))
                .collect::<Result<_>>()?,
            expected,
            reference,
            uses_eta,
        })
    }
}

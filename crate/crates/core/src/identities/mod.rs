//! The transformation-identity catalog and its verifier.
//!
//! - [`IdentitySpec`]: declarative description of one identity (the catalog schema)
//! - [`verify_identity`] / [`verify_over_primes`]: exhaustive two-tier checks over `F_p`
//! - [`determine_twist_constant`]: `left(z₀)/right(z₀)` for one character instance
//! - [`f21_series`] / [`analytic_checks`]: the classical counterparts over `C`

mod analytic;
mod expr;
mod spec;
mod verify;

pub use analytic::{analytic_checks, f21_series, AnalyticCheck};
pub use expr::{parse_constraint, Algebra, CharExpr, Expr, FfAlg, Formula, RatFunAlg};
pub use spec::{Expected, FunctionKind, IdentitySpec, Prefactor, Side};
pub use verify::{
    constant_modulus, determine_twist_constant, instances, verify_identity, verify_over_primes, AggregateReport,
    InstanceKey, InstanceReport, Status, Tier2, VerificationReport, Witness, WitnessKind, SCHEMA,
};

use num_rational::BigRational;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::monodromy::{frac, hcan_local_tuple, MonodromyTuple, RiemannScheme};

/// The shipped catalog, versioned by its `schema` field.
pub const CATALOG_JSON: &str = include_str!("../../catalog/identities.json");

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Catalog {
    pub schema: String,
    pub identities: Vec<IdentitySpec>,
}

impl Catalog {
    pub fn builtin() -> Catalog {
        Catalog::from_json(CATALOG_JSON).expect("shipped catalog is valid")
    }

    /// Parse a catalog, or a single identity spec.
    pub fn from_json(text: &str) -> Result<Catalog> {
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let cat = if value.get("identities").is_some() {
            serde_json::from_value::<Catalog>(value).map_err(|e| Error::Parse(e.to_string()))?
        } else {
            let spec = serde_json::from_value::<IdentitySpec>(value).map_err(|e| Error::Parse(e.to_string()))?;
            Catalog { schema: "hypertrace-catalog/1".into(), identities: vec![spec] }
        };
        if !cat.schema.starts_with("hypertrace-catalog/") {
            return Err(Error::Parse(format!("unknown catalog schema {:?}", cat.schema)));
        }
        for s in &cat.identities {
            spec::Compiled::new(s)?;
        }
        Ok(cat)
    }

    pub fn get(&self, name: &str) -> Option<&IdentitySpec> {
        self.identities.iter().find(|s| s.matches(name))
    }
}

/// Exponent of a character written in `eta`, `eps` and `1`, as a fraction of a turn.
fn turn(c: &CharExpr, modulus: u64) -> Option<BigRational> {
    let mut t = BigRational::zero();
    for (name, &k) in &c.factors {
        let unit = match name.as_str() {
            "eta" => BigRational::new(1.into(), (modulus as i64).into()),
            "eps" => BigRational::new(1.into(), 2.into()),
            _ => return None,
        };
        t += unit * BigRational::from_integer(k.into());
    }
    Some(frac(&t))
}

/// Local monodromy shapes of the rank-two sides of `spec` whose characters are
/// fixed (no free names), as tuples with exponents over `modulus`.
///
/// `TRACE_HCAN` sides give `H^can` data directly; `F21[A, B; C]` sides give the
/// Riemann scheme `(0, 1-c | 0, c-a-b | a, b)` and are kept only when every
/// point has two distinct exponents (resonant schemes carry unipotent monodromy,
/// which the semisimple model cannot represent).
pub fn hcan_local_shapes(spec: &IdentitySpec) -> Result<Vec<(String, MonodromyTuple)>> {
    let c = spec::Compiled::new(spec)?;
    let mut out = Vec::new();
    for (side, cs) in ["lhs", "rhs"].iter().zip(&c.sides) {
        let Some(t) = cs.chars.iter().map(|x| turn(x, spec.modulus)).collect::<Option<Vec<_>>>() else {
            continue;
        };
        let label = format!("{}:{side}", spec.name);
        match cs.kind {
            FunctionKind::TraceHcan | FunctionKind::TraceHcanAt1 => {
                out.push((label, hcan_local_tuple([&t[0], &t[1]], [&t[2], &t[3]])?));
            }
            FunctionKind::F21 | FunctionKind::P21 => {
                let scheme = RiemannScheme::hypergeometric(&t[0], &t[1], &t[2])?;
                let resonant = scheme.columns().len() < 3
                    || scheme.columns().iter().any(|col| {
                        col.exponents.len() == 2 && frac(&col.exponents[0]) == frac(&col.exponents[1])
                    });
                if !resonant {
                    out.push((label, scheme.to_tuple()?));
                }
            }
            _ => {}
        }
    }
    Ok(out)
}

//! Partial values, types and call-by-value evaluation.

mod equality;
mod path;
mod term;
mod ty;
mod value;

pub use equality::{eq_existential, eq_existential_with, eq_strong, eq_strong_with, restrict};
pub use path::PathMap;
pub use term::{eval, Env, Term};
pub use ty::{Card, Ty};
pub use value::{
    decode_nat_path, decode_path, encode_nat_path, encode_path, Fuel, PFun, PVal, ProcFn,
};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("fuel exhausted")]
    FuelExhausted,
    #[error("unbound name `{0}`")]
    UnboundName(String),
    #[error("type mismatch: {0}")]
    TypeMismatch(String),
    #[error("incomparable values: {0} and {1}")]
    IncomparableTypes(String, String),
    #[error("unresolved type name `{0}`")]
    UnresolvedType(String),
    #[error("type {0} is not finitely enumerable")]
    NotEnumerable(Ty),
    #[error("host procedure failed: {0}")]
    Host(String),
}

/// The formula `⊤` or `⊥` as an element of `Logical = Unit ⇀ Unit`.
pub fn logical(b: bool) -> PVal {
    let f = if b { PFun::constant(PVal::Unit).named("top") } else { PFun::bottom() };
    PVal::Fun(f.with_domain(Ty::Unit))
}

/// A formula holds iff it is defined at `()`.
pub fn holds(phi: &PVal, fuel: &mut Fuel) -> Result<bool, KernelError> {
    Ok(phi.apply(&PVal::Unit, fuel)?.is_defined())
}

//! The declaration language: parsing, positivity, functor extraction,
//! elaboration onto the constructed datatypes, and expression evaluation.

mod ast;
mod elab;
mod eval;
mod functor_syntax;
mod lexer;
mod parser;

use thiserror::Error;

use crate::final_coalgebra::FinalError;
use crate::functors::FunctorError;
use crate::initial::InitialError;
use crate::kernel::KernelError;

pub use ast::{Constructor, Decl, DeclBody, Expr, Item, SelGroup, TyExpr};
pub use elab::{
    check_positivity, elaborate, elaborate_items, extract_functor, CoEntry, ElabEnv, FreeEntry, Selector, Slotted,
    TypeEntry,
};
pub use eval::{as_codata, as_data, show_value, tag_codata, tag_data};
pub use functor_syntax::{instance_name, parse_extpoly_nf, parse_functor, parse_kernel_ty, parse_poly_nf};
pub use parser::{parse, parse_expr, parse_items, parse_ty_expr, pretty};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SurfaceError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("negative occurrence of {decl} in {position}")]
    NegativeOccurrence { decl: String, position: String },
    #[error("unsupported type former in {decl}: {detail}")]
    UnsupportedTypeFormer { decl: String, detail: String },
    #[error("unknown type: {0}")]
    UnknownType(String),
    #[error("duplicate definition of {0}")]
    Duplicate(String),
    #[error("unbound name {0}")]
    Unbound(String),
    #[error("ambiguous built-in: {0}")]
    Ambiguous(String),
    #[error("evaluation failed: {0}")]
    Eval(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Initial(#[from] InitialError),
    #[error(transparent)]
    Final(#[from] FinalError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl SurfaceError {
    pub fn syntax(line: usize, col: usize, msg: String) -> SurfaceError {
        SurfaceError::Syntax { line, col, msg }
    }
}

impl From<SurfaceError> for KernelError {
    fn from(e: SurfaceError) -> Self {
        match e {
            SurfaceError::Kernel(k) => k,
            e => KernelError::Host(e.to_string()),
        }
    }
}

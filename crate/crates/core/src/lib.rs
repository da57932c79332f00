//! A partial λ-calculus kernel with constructed datatypes.

pub mod checks;
pub mod cpo;
pub mod final_coalgebra;
pub mod functors;
pub mod initial;
pub mod kernel;
pub mod lab;
pub mod surface;

pub use checks::{CheckConfig, CheckResult, Status, Suite};
pub use kernel::{eval, Env, Fuel, KernelError, PFun, PVal, PathMap, Term, Ty};

use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{One, Zero};

use super::path::PathMap;
use super::ty::{nat_to_u64, Ty};
use super::KernelError;

/// Evaluation budget. Every application and every evaluation step consumes
/// one unit; running out is reported as [`KernelError::FuelExhausted`],
/// which is never confused with an undefined result.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Fuel {
    steps: u64,
}

impl Fuel {
    pub const DEFAULT_STEPS: u64 = 10_000;

    pub fn new(steps: u64) -> Self {
        Fuel { steps }
    }

    pub fn remaining(&self) -> u64 {
        self.steps
    }

    pub fn tick(&mut self) -> Result<(), KernelError> {
        if self.steps == 0 {
            return Err(KernelError::FuelExhausted);
        }
        self.steps -= 1;
        Ok(())
    }
}

impl Default for Fuel {
    fn default() -> Self {
        Fuel::new(Self::DEFAULT_STEPS)
    }
}

pub type ProcFn = dyn Fn(&PVal, &mut Fuel) -> Result<PVal, KernelError> + Send + Sync;

#[derive(Clone)]
enum FunRepr {
    Proc(Arc<ProcFn>),
    /// A finite graph; arguments outside it are undefined.
    Graph(Arc<Vec<(PVal, PVal)>>),
    /// A partial map on paths of naturals, arguments encoded with
    /// [`encode_path`].
    Paths(Arc<PathMap<PVal>>),
}

/// A partial function value.
#[derive(Clone)]
pub struct PFun {
    repr: FunRepr,
    domain: Option<Arc<Ty>>,
    name: Option<Arc<str>>,
}

impl PFun {
    pub fn new(f: impl Fn(&PVal, &mut Fuel) -> Result<PVal, KernelError> + Send + Sync + 'static) -> Self {
        PFun { repr: FunRepr::Proc(Arc::new(f)), domain: None, name: None }
    }

    /// A procedural function that never consults its fuel.
    pub fn pure(f: impl Fn(&PVal) -> PVal + Send + Sync + 'static) -> Self {
        PFun::new(move |x, _| Ok(f(x)))
    }

    pub fn graph(entries: Vec<(PVal, PVal)>) -> Self {
        let entries = entries.into_iter().filter(|(_, v)| v.is_defined()).collect();
        PFun { repr: FunRepr::Graph(Arc::new(entries)), domain: None, name: None }
    }

    pub fn paths(map: PathMap<PVal>) -> Self {
        PFun { repr: FunRepr::Paths(Arc::new(map)), domain: None, name: None }
    }

    pub fn constant(v: PVal) -> Self {
        PFun::pure(move |_| v.clone())
    }

    /// The nowhere-defined function.
    pub fn bottom() -> Self {
        PFun::graph(vec![]).named("bot")
    }

    pub fn identity() -> Self {
        PFun::pure(|x| x.clone()).named("id")
    }

    pub fn with_domain(mut self, ty: Ty) -> Self {
        self.domain = Some(Arc::new(ty));
        self
    }

    pub fn named(mut self, name: &str) -> Self {
        self.name = Some(name.into());
        self
    }

    pub fn domain(&self) -> Option<&Ty> {
        self.domain.as_deref()
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn as_graph(&self) -> Option<&[(PVal, PVal)]> {
        match &self.repr {
            FunRepr::Graph(g) => Some(g),
            _ => None,
        }
    }

    pub fn as_path_map(&self) -> Option<&PathMap<PVal>> {
        match &self.repr {
            FunRepr::Paths(m) => Some(m),
            _ => None,
        }
    }

    /// Application. Strict: an undefined argument gives an undefined result.
    pub fn apply(&self, arg: &PVal, fuel: &mut Fuel) -> Result<PVal, KernelError> {
        fuel.tick()?;
        if !arg.is_defined() {
            return Ok(PVal::Undefined);
        }
        match &self.repr {
            FunRepr::Proc(f) => f(arg, fuel),
            FunRepr::Graph(g) => {
                Ok(g.iter().find(|(k, _)| k.structurally_eq(arg)).map_or(PVal::Undefined, |(_, v)| v.clone()))
            }
            FunRepr::Paths(m) => {
                let Some(path) = decode_nat_path(arg) else {
                    return Err(KernelError::TypeMismatch(format!("path map applied to non-path {arg}")));
                };
                Ok(m.get(&path).cloned().unwrap_or(PVal::Undefined))
            }
        }
    }

    fn same_identity(&self, other: &PFun) -> bool {
        match (&self.repr, &other.repr) {
            (FunRepr::Proc(a), FunRepr::Proc(b)) => Arc::ptr_eq(a, b),
            (FunRepr::Graph(a), FunRepr::Graph(b)) => {
                a.len() == b.len() && a.iter().all(|(k, v)| b.iter().any(|(k2, v2)| k.structurally_eq(k2) && v.structurally_eq(v2)))
            }
            (FunRepr::Paths(a), FunRepr::Paths(b)) => {
                a.representatives(b).iter().all(|p| match (a.get(p), b.get(p)) {
                    (None, None) => true,
                    (Some(x), Some(y)) => x.structurally_eq(y),
                    _ => false,
                })
            }
            _ => false,
        }
    }

    pub(crate) fn finite_support(&self) -> Option<Vec<PVal>> {
        match &self.repr {
            FunRepr::Graph(g) => Some(g.iter().map(|(k, _)| k.clone()).collect()),
            FunRepr::Paths(m) => Some(m.representatives(&PathMap::new()).iter().map(|p| encode_nat_path(p)).collect()),
            FunRepr::Proc(_) => None,
        }
    }
}

impl fmt::Debug for PFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(n) = &self.name {
            return write!(f, "<fn {n}>");
        }
        match &self.repr {
            FunRepr::Proc(_) => write!(f, "<fn>"),
            FunRepr::Graph(g) => {
                write!(f, "{{")?;
                for (i, (k, v)) in g.iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{k} ↦ {v}")?;
                }
                write!(f, "}}")
            }
            FunRepr::Paths(m) => {
                write!(f, "{{")?;
                for (i, (p, v, cone)) in m.entries().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{p:?}{} ↦ {v}", if *cone { "*" } else { "" })?;
                }
                write!(f, "}}")
            }
        }
    }
}

/// A partial value: undefined, or a defined value of the kernel.
#[derive(Clone)]
pub enum PVal {
    Undefined,
    Unit,
    Nat(BigUint),
    Pair(Arc<PVal>, Arc<PVal>),
    Inl(Arc<PVal>),
    Inr(Arc<PVal>),
    Fun(PFun),
}

impl PVal {
    pub fn nat(n: u64) -> PVal {
        PVal::Nat(BigUint::from(n))
    }

    /// `true = inl ()`.
    pub fn tt() -> PVal {
        PVal::Inl(Arc::new(PVal::Unit))
    }

    /// `false = inr ()`.
    pub fn ff() -> PVal {
        PVal::Inr(Arc::new(PVal::Unit))
    }

    pub fn bool(b: bool) -> PVal {
        if b {
            PVal::tt()
        } else {
            PVal::ff()
        }
    }

    /// Strict pairing: undefined if either component is.
    pub fn pair(a: PVal, b: PVal) -> PVal {
        if a.is_defined() && b.is_defined() {
            PVal::Pair(Arc::new(a), Arc::new(b))
        } else {
            PVal::Undefined
        }
    }

    pub fn inl(a: PVal) -> PVal {
        if a.is_defined() {
            PVal::Inl(Arc::new(a))
        } else {
            PVal::Undefined
        }
    }

    pub fn inr(a: PVal) -> PVal {
        if a.is_defined() {
            PVal::Inr(Arc::new(a))
        } else {
            PVal::Undefined
        }
    }

    pub fn fun(f: PFun) -> PVal {
        PVal::Fun(f)
    }

    pub fn is_defined(&self) -> bool {
        !matches!(self, PVal::Undefined)
    }

    pub fn as_nat(&self) -> Option<&BigUint> {
        match self {
            PVal::Nat(n) => Some(n),
            _ => None,
        }
    }

    pub fn as_u64(&self) -> Option<u64> {
        self.as_nat().and_then(nat_to_u64)
    }

    pub fn as_bool(&self) -> Option<bool> {
        match self {
            PVal::Inl(x) if matches!(**x, PVal::Unit) => Some(true),
            PVal::Inr(x) if matches!(**x, PVal::Unit) => Some(false),
            _ => None,
        }
    }

    pub fn as_pair(&self) -> Option<(&PVal, &PVal)> {
        match self {
            PVal::Pair(a, b) => Some((a, b)),
            _ => None,
        }
    }

    pub fn as_fun(&self) -> Option<&PFun> {
        match self {
            PVal::Fun(f) => Some(f),
            _ => None,
        }
    }

    /// Applies a function value; undefined functions give undefined results.
    pub fn apply(&self, arg: &PVal, fuel: &mut Fuel) -> Result<PVal, KernelError> {
        match self {
            PVal::Undefined => Ok(PVal::Undefined),
            PVal::Fun(f) => f.apply(arg, fuel),
            other => Err(KernelError::TypeMismatch(format!("cannot apply non-function {other}"))),
        }
    }

    /// Structural identity. Procedural function payloads compare by
    /// identity of their closure, table payloads by their graphs; this is
    /// intensional and strictly finer than observational equality.
    pub fn structurally_eq(&self, other: &PVal) -> bool {
        match (self, other) {
            (PVal::Undefined, PVal::Undefined) | (PVal::Unit, PVal::Unit) => true,
            (PVal::Nat(a), PVal::Nat(b)) => a == b,
            (PVal::Pair(a, b), PVal::Pair(c, d)) => a.structurally_eq(c) && b.structurally_eq(d),
            (PVal::Inl(a), PVal::Inl(b)) | (PVal::Inr(a), PVal::Inr(b)) => a.structurally_eq(b),
            (PVal::Fun(f), PVal::Fun(g)) => f.same_identity(g),
            _ => false,
        }
    }

    /// Right-nested tuple: `()` for none, `v` for one, `(v1, (v2, ...))`.
    pub fn tuple(items: Vec<PVal>) -> PVal {
        let mut it = items.into_iter().rev();
        match it.next() {
            None => PVal::Unit,
            Some(last) => it.fold(last, |acc, v| PVal::pair(v, acc)),
        }
    }

    /// Inverse of [`PVal::tuple`] for a known arity.
    pub fn untuple(&self, arity: usize) -> Option<Vec<PVal>> {
        match arity {
            0 => matches!(self, PVal::Unit).then(Vec::new),
            1 => Some(vec![self.clone()]),
            _ => {
                let (head, rest) = self.as_pair()?;
                let mut out = vec![head.clone()];
                out.extend(rest.untuple(arity - 1)?);
                Some(out)
            }
        }
    }

    pub fn succ(&self) -> PVal {
        match self {
            PVal::Nat(n) => PVal::Nat(n + BigUint::one()),
            _ => PVal::Undefined,
        }
    }

    pub fn is_zero_nat(&self) -> bool {
        matches!(self, PVal::Nat(n) if n.is_zero())
    }
}

impl PartialEq for PVal {
    fn eq(&self, other: &Self) -> bool {
        self.structurally_eq(other)
    }
}

impl From<u64> for PVal {
    fn from(n: u64) -> Self {
        PVal::nat(n)
    }
}

impl From<bool> for PVal {
    fn from(b: bool) -> Self {
        PVal::bool(b)
    }
}

impl fmt::Debug for PVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl fmt::Display for PVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PVal::Undefined => write!(f, "⊥"),
            PVal::Unit => write!(f, "()"),
            PVal::Nat(n) => write!(f, "{n}"),
            PVal::Pair(a, b) => write!(f, "({a}, {b})"),
            PVal::Inl(a) if matches!(**a, PVal::Unit) => write!(f, "true"),
            PVal::Inr(a) if matches!(**a, PVal::Unit) => write!(f, "false"),
            PVal::Inl(a) => write!(f, "inl {}", Atomic(a)),
            PVal::Inr(a) => write!(f, "inr {}", Atomic(a)),
            PVal::Fun(g) => write!(f, "{g}"),
        }
    }
}

struct Atomic<'a>(&'a PVal);

impl fmt::Display for Atomic<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            PVal::Inl(a) | PVal::Inr(a) if !matches!(**a, PVal::Unit) => write!(f, "({})", self.0),
            v => write!(f, "{v}"),
        }
    }
}

/// Encodes a path as a kernel list: `nil = inl ()`, `cons b p = inr (b, p)`.
pub fn encode_path(items: &[PVal]) -> PVal {
    items.iter().rev().fold(PVal::inl(PVal::Unit), |acc, b| PVal::inr(PVal::pair(b.clone(), acc)))
}

pub fn decode_path(v: &PVal) -> Option<Vec<PVal>> {
    let mut out = Vec::new();
    let mut cur = v;
    loop {
        match cur {
            PVal::Inl(u) if matches!(**u, PVal::Unit) => return Some(out),
            PVal::Inr(cell) => {
                let (head, tail) = cell.as_pair()?;
                out.push(head.clone());
                cur = tail;
            }
            _ => return None,
        }
    }
}

pub fn encode_nat_path(items: &[u64]) -> PVal {
    encode_path(&items.iter().map(|&n| PVal::nat(n)).collect::<Vec<_>>())
}

/// Decodes a path of naturals. Components beyond `u64` are mapped to
/// `u64::MAX`, which never occurs as a key of a constructed [`PathMap`].
pub fn decode_nat_path(v: &PVal) -> Option<Vec<u64>> {
    decode_path(v)?.iter().map(|c| c.as_nat().map(|n| nat_to_u64(n).unwrap_or(u64::MAX))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pairing_is_strict() {
        assert!(!PVal::pair(PVal::nat(1), PVal::Undefined).is_defined());
        assert!(!PVal::inl(PVal::Undefined).is_defined());
    }

    #[test]
    fn tuples_round_trip() {
        for k in 0..5u64 {
            let items: Vec<PVal> = (0..k).map(PVal::nat).collect();
            assert_eq!(PVal::tuple(items.clone()).untuple(k as usize).unwrap(), items);
        }
    }

    #[test]
    fn fuel_runs_out() {
        let mut fuel = Fuel::new(1);
        assert!(fuel.tick().is_ok());
        assert_eq!(fuel.tick(), Err(KernelError::FuelExhausted));
    }

    #[test]
    fn paths_round_trip() {
        let p = [3u64, 0, 7];
        assert_eq!(decode_nat_path(&encode_nat_path(&p)).unwrap(), p.to_vec());
        assert_eq!(decode_nat_path(&encode_nat_path(&[])).unwrap(), Vec::<u64>::new());
    }

    #[test]
    fn graph_functions_are_undefined_off_graph() {
        let f = PFun::graph(vec![(PVal::nat(1), PVal::nat(2))]);
        let mut fuel = Fuel::default();
        assert_eq!(f.apply(&PVal::nat(1), &mut fuel).unwrap(), PVal::nat(2));
        assert!(!f.apply(&PVal::nat(0), &mut fuel).unwrap().is_defined());
    }
}

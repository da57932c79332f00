use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigUint;

use super::value::{PFun, PVal};
use super::KernelError;

/// Semantic types of the partial λ-calculus with equality, sums and naturals.
///
/// `Bool` and `Logical` are sugar: [`Ty::normalize`] rewrites them to
/// `Sum(Unit, Unit)` and `Partial(Unit, Unit)` respectively.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Ty {
    /// The initial type; it has no values.
    Zero,
    Unit,
    Nat,
    Bool,
    Logical,
    Sum(Box<Ty>, Box<Ty>),
    Prod(Box<Ty>, Box<Ty>),
    Total(Box<Ty>, Box<Ty>),
    Partial(Box<Ty>, Box<Ty>),
    Named(String),
}

/// Cardinality of a type: finite count or infinite.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Card {
    Finite(u128),
    Infinite,
}

impl Card {
    fn add(self, other: Card) -> Card {
        match (self, other) {
            (Card::Finite(a), Card::Finite(b)) => a.checked_add(b).map_or(Card::Infinite, Card::Finite),
            _ => Card::Infinite,
        }
    }

    fn mul(self, other: Card) -> Card {
        match (self, other) {
            (Card::Finite(0), _) | (_, Card::Finite(0)) => Card::Finite(0),
            (Card::Finite(a), Card::Finite(b)) => a.checked_mul(b).map_or(Card::Infinite, Card::Finite),
            _ => Card::Infinite,
        }
    }

    fn pow(self, exp: Card) -> Card {
        match (self, exp) {
            (_, Card::Finite(0)) => Card::Finite(1),
            (Card::Finite(0), _) => Card::Finite(0),
            (Card::Finite(1), _) => Card::Finite(1),
            (Card::Finite(b), Card::Finite(e)) => {
                let Ok(e) = u32::try_from(e) else { return Card::Infinite };
                b.checked_pow(e).map_or(Card::Infinite, Card::Finite)
            }
            _ => Card::Infinite,
        }
    }

    pub fn finite(self) -> Option<u128> {
        match self {
            Card::Finite(n) => Some(n),
            Card::Infinite => None,
        }
    }
}

impl Ty {
    pub fn sum(a: Ty, b: Ty) -> Ty {
        Ty::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: Ty, b: Ty) -> Ty {
        Ty::Prod(Box::new(a), Box::new(b))
    }

    pub fn total(a: Ty, b: Ty) -> Ty {
        Ty::Total(Box::new(a), Box::new(b))
    }

    pub fn partial(a: Ty, b: Ty) -> Ty {
        Ty::Partial(Box::new(a), Box::new(b))
    }

    pub fn named(name: impl Into<String>) -> Ty {
        Ty::Named(name.into())
    }

    /// Removes the `Bool` and `Logical` abbreviations.
    pub fn normalize(&self) -> Ty {
        match self {
            Ty::Bool => Ty::sum(Ty::Unit, Ty::Unit),
            Ty::Logical => Ty::partial(Ty::Unit, Ty::Unit),
            Ty::Sum(a, b) => Ty::sum(a.normalize(), b.normalize()),
            Ty::Prod(a, b) => Ty::prod(a.normalize(), b.normalize()),
            Ty::Total(a, b) => Ty::total(a.normalize(), b.normalize()),
            Ty::Partial(a, b) => Ty::partial(a.normalize(), b.normalize()),
            other => other.clone(),
        }
    }

    /// Equality up to the `Bool`/`Logical` abbreviations.
    pub fn equiv(&self, other: &Ty) -> bool {
        self.normalize() == other.normalize()
    }

    pub fn mentions(&self, name: &str) -> bool {
        match self {
            Ty::Named(n) => n == name,
            Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Total(a, b) | Ty::Partial(a, b) => {
                a.mentions(name) || b.mentions(name)
            }
            _ => false,
        }
    }

    pub fn is_closed(&self) -> bool {
        match self {
            Ty::Named(_) => false,
            Ty::Sum(a, b) | Ty::Prod(a, b) | Ty::Total(a, b) | Ty::Partial(a, b) => a.is_closed() && b.is_closed(),
            _ => true,
        }
    }

    pub fn substitute(&self, subst: &BTreeMap<String, Ty>) -> Ty {
        match self {
            Ty::Named(n) => subst.get(n).cloned().unwrap_or_else(|| self.clone()),
            Ty::Sum(a, b) => Ty::sum(a.substitute(subst), b.substitute(subst)),
            Ty::Prod(a, b) => Ty::prod(a.substitute(subst), b.substitute(subst)),
            Ty::Total(a, b) => Ty::total(a.substitute(subst), b.substitute(subst)),
            Ty::Partial(a, b) => Ty::partial(a.substitute(subst), b.substitute(subst)),
            other => other.clone(),
        }
    }

    /// Resolves every `Named` type through `lookup`; unresolved names are an error.
    pub fn resolve(&self, lookup: &dyn Fn(&str) -> Option<Ty>) -> Result<Ty, KernelError> {
        Ok(match self {
            Ty::Named(n) => {
                let found = lookup(n).ok_or_else(|| KernelError::UnresolvedType(n.clone()))?;
                if found.mentions(n) {
                    return Err(KernelError::UnresolvedType(n.clone()));
                }
                found.resolve(lookup)?
            }
            Ty::Sum(a, b) => Ty::sum(a.resolve(lookup)?, b.resolve(lookup)?),
            Ty::Prod(a, b) => Ty::prod(a.resolve(lookup)?, b.resolve(lookup)?),
            Ty::Total(a, b) => Ty::total(a.resolve(lookup)?, b.resolve(lookup)?),
            Ty::Partial(a, b) => Ty::partial(a.resolve(lookup)?, b.resolve(lookup)?),
            other => other.clone(),
        })
    }

    /// Cardinality; `None` when the type mentions an unresolved name.
    pub fn cardinality(&self) -> Option<Card> {
        Some(match self {
            Ty::Zero => Card::Finite(0),
            Ty::Unit => Card::Finite(1),
            Ty::Bool => Card::Finite(2),
            Ty::Nat => Card::Infinite,
            Ty::Logical => Card::Finite(2),
            Ty::Sum(a, b) => a.cardinality()?.add(b.cardinality()?),
            Ty::Prod(a, b) => a.cardinality()?.mul(b.cardinality()?),
            Ty::Total(a, b) => b.cardinality()?.pow(a.cardinality()?),
            Ty::Partial(a, b) => b.cardinality()?.add(Card::Finite(1)).pow(a.cardinality()?),
            Ty::Named(_) => return None,
        })
    }

    /// All values of a finite type. Function types are enumerated as
    /// finite graphs.
    pub fn enumerate(&self) -> Result<Vec<PVal>, KernelError> {
        match self {
            Ty::Zero => Ok(vec![]),
            Ty::Unit => Ok(vec![PVal::Unit]),
            Ty::Bool => Ok(vec![PVal::tt(), PVal::ff()]),
            Ty::Logical => Ty::partial(Ty::Unit, Ty::Unit).enumerate(),
            Ty::Nat => Err(KernelError::NotEnumerable(self.clone())),
            Ty::Named(n) => Err(KernelError::UnresolvedType(n.clone())),
            Ty::Sum(a, b) => {
                let mut out: Vec<PVal> = a.enumerate()?.into_iter().map(PVal::inl).collect();
                out.extend(b.enumerate()?.into_iter().map(PVal::inr));
                Ok(out)
            }
            Ty::Prod(a, b) => {
                let (xs, ys) = (a.enumerate()?, b.enumerate()?);
                Ok(xs.iter().flat_map(|x| ys.iter().map(move |y| PVal::pair(x.clone(), y.clone()))).collect())
            }
            Ty::Total(a, b) | Ty::Partial(a, b) => {
                let partial = matches!(self, Ty::Partial(..));
                let dom = a.enumerate()?;
                let mut cod = b.enumerate()?;
                if partial {
                    cod.push(PVal::Undefined);
                }
                guard_size(cod.len(), dom.len(), self)?;
                Ok(graphs(&dom, &cod)
                    .into_iter()
                    .map(|g| PVal::Fun(PFun::graph(g).with_domain((**a).clone())))
                    .collect())
            }
        }
    }

    /// A canonical finite sample of values: exact for finite types, the
    /// naturals below `depth` for `Nat`.
    pub fn samples(&self, depth: usize) -> Result<Vec<PVal>, KernelError> {
        match self {
            Ty::Nat => Ok((0..depth as u64).map(PVal::nat).collect()),
            Ty::Sum(a, b) => {
                let mut out: Vec<PVal> = a.samples(depth)?.into_iter().map(PVal::inl).collect();
                out.extend(b.samples(depth)?.into_iter().map(PVal::inr));
                Ok(out)
            }
            Ty::Prod(a, b) => {
                let (xs, ys) = (a.samples(depth)?, b.samples(depth)?);
                Ok(xs.iter().flat_map(|x| ys.iter().map(move |y| PVal::pair(x.clone(), y.clone()))).collect())
            }
            Ty::Total(a, b) | Ty::Partial(a, b) if self.cardinality().and_then(Card::finite).is_none_or(|n| n > 4096) => {
                // constant maps plus, for partial types, the nowhere-defined map
                let mut out: Vec<PVal> = b
                    .samples(depth)?
                    .into_iter()
                    .map(|v| PVal::Fun(PFun::constant(v).with_domain((**a).clone())))
                    .collect();
                if matches!(self, Ty::Partial(..)) {
                    out.push(PVal::Fun(PFun::bottom().with_domain((**a).clone())));
                }
                Ok(out)
            }
            _ => self.enumerate(),
        }
    }

    /// Shallow membership test of a defined value in this type.
    pub fn contains(&self, v: &PVal) -> bool {
        match (self, v) {
            (Ty::Unit, PVal::Unit) => true,
            (Ty::Nat, PVal::Nat(_)) => true,
            (Ty::Bool, PVal::Inl(x) | PVal::Inr(x)) => matches!(**x, PVal::Unit),
            (Ty::Logical | Ty::Total(..) | Ty::Partial(..), PVal::Fun(_)) => true,
            (Ty::Sum(a, _), PVal::Inl(x)) => a.contains(x),
            (Ty::Sum(_, b), PVal::Inr(x)) => b.contains(x),
            (Ty::Prod(a, b), PVal::Pair(x, y)) => a.contains(x) && b.contains(y),
            (Ty::Named(_), v) => v.is_defined(),
            _ => false,
        }
    }
}

fn guard_size(cod: usize, dom: usize, ty: &Ty) -> Result<(), KernelError> {
    let too_big = (cod as u128).checked_pow(dom as u32).is_none_or(|n| n > 1 << 16);
    if too_big {
        Err(KernelError::NotEnumerable(ty.clone()))
    } else {
        Ok(())
    }
}

/// All total graphs `dom -> cod`; `Undefined` in `cod` yields partiality.
fn graphs(dom: &[PVal], cod: &[PVal]) -> Vec<Vec<(PVal, PVal)>> {
    let mut out = vec![Vec::new()];
    for x in dom {
        let mut next = Vec::with_capacity(out.len() * cod.len());
        for g in &out {
            for y in cod {
                let mut g2 = g.clone();
                if y.is_defined() {
                    g2.push((x.clone(), y.clone()));
                }
                next.push(g2);
            }
        }
        out = next;
    }
    out
}

impl fmt::Display for Ty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(t: &Ty) -> u8 {
            match t {
                Ty::Total(..) | Ty::Partial(..) => 0,
                Ty::Sum(..) => 1,
                Ty::Prod(..) => 2,
                _ => 3,
            }
        }
        fn wrap(t: &Ty, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(t) < min {
                write!(f, "({t})")
            } else {
                write!(f, "{t}")
            }
        }
        match self {
            Ty::Zero => write!(f, "Zero"),
            Ty::Unit => write!(f, "Unit"),
            Ty::Nat => write!(f, "Nat"),
            Ty::Bool => write!(f, "Bool"),
            Ty::Logical => write!(f, "Logical"),
            Ty::Named(n) => write!(f, "{n}"),
            Ty::Sum(a, b) => {
                // `+` and `×` associate to the right
                wrap(a, 2, f)?;
                write!(f, " + ")?;
                wrap(b, 1, f)
            }
            Ty::Prod(a, b) => {
                wrap(a, 3, f)?;
                write!(f, " × ")?;
                wrap(b, 2, f)
            }
            Ty::Total(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " → ")?;
                wrap(b, 0, f)
            }
            Ty::Partial(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " ⇀ ")?;
                wrap(b, 0, f)
            }
        }
    }
}

/// Converts a natural number value to `u64` if it fits.
pub(crate) fn nat_to_u64(n: &BigUint) -> Option<u64> {
    u64::try_from(n).ok()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bool_normalizes_to_unit_sum() {
        assert_eq!(Ty::Bool.normalize(), Ty::sum(Ty::Unit, Ty::Unit));
        assert!(Ty::Bool.equiv(&Ty::sum(Ty::Unit, Ty::Unit)));
        assert_eq!(Ty::Logical.normalize(), Ty::partial(Ty::Unit, Ty::Unit));
    }

    #[test]
    fn unresolved_names_are_errors() {
        let err = Ty::named("a").resolve(&|_| None).unwrap_err();
        assert!(matches!(err, KernelError::UnresolvedType(n) if n == "a"));
        let ok = Ty::prod(Ty::named("a"), Ty::Unit).resolve(&|n| (n == "a").then_some(Ty::Bool)).unwrap();
        assert_eq!(ok, Ty::prod(Ty::Bool, Ty::Unit));
    }

    #[test]
    fn cardinalities() {
        assert_eq!(Ty::Bool.cardinality(), Some(Card::Finite(2)));
        assert_eq!(Ty::partial(Ty::Bool, Ty::Bool).cardinality(), Some(Card::Finite(9)));
        assert_eq!(Ty::total(Ty::Zero, Ty::Nat).cardinality(), Some(Card::Finite(1)));
        assert_eq!(Ty::Nat.cardinality(), Some(Card::Infinite));
        assert_eq!(Ty::named("x").cardinality(), None);
    }

    #[test]
    fn enumeration_matches_cardinality() {
        for ty in [
            Ty::Bool,
            Ty::prod(Ty::Bool, Ty::sum(Ty::Unit, Ty::Bool)),
            Ty::total(Ty::Bool, Ty::Bool),
            Ty::partial(Ty::Bool, Ty::Unit),
            Ty::Zero,
        ] {
            let n = ty.enumerate().unwrap().len() as u128;
            assert_eq!(Some(Card::Finite(n)), ty.cardinality(), "{ty}");
        }
    }

    #[test]
    fn display_uses_right_association() {
        let t = Ty::total(Ty::prod(Ty::named("a"), Ty::Nat), Ty::sum(Ty::Unit, Ty::sum(Ty::Unit, Ty::Unit)));
        assert_eq!(t.to_string(), "a × Nat → Unit + Unit + Unit");
        let u = Ty::total(Ty::total(Ty::Nat, Ty::Nat), Ty::Nat);
        assert_eq!(u.to_string(), "(Nat → Nat) → Nat");
    }
}

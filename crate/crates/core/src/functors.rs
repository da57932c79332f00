//! Signature functors, their sum-of-products normal forms, and the
//! coproduct machinery (copairing, the triple encoding of sums, `bot`).
//!
//! Values of `F X` in normal form are encoded as n-ary injections
//! `in_1 = inl`, `in_2 = inr ∘ inl`, ..., `in_n = inr^(n-1)` (no tag when
//! there is a single summand). A polynomial payload is `(a, xs)` with `xs`
//! a right-nested tuple of the `k` recursive positions; an extended
//! polynomial payload is `(a, g)` with `g : B → X`.

use std::fmt;

use thiserror::Error;

use crate::kernel::{Fuel, KernelError, PFun, PVal, Ty};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FunctorError {
    #[error("functor {0} is not polynomial")]
    NotPolynomial(SigFunctor),
    #[error("functor {0} is not extended polynomial")]
    NotExtendedPolynomial(SigFunctor),
    #[error("summand tag {tag} out of range for {summands} summands")]
    TagOutOfRange { tag: usize, summands: usize },
    #[error("value {0} does not encode an element of the functor")]
    BadEncoding(String),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

/// Signature functor syntax.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SigFunctor {
    Id,
    Const(Ty),
    Sum(Box<SigFunctor>, Box<SigFunctor>),
    Prod(Box<SigFunctor>, Box<SigFunctor>),
    /// `B → body`; the body is always `Id`.
    ExpConst(Ty, Box<SigFunctor>),
}

impl SigFunctor {
    pub fn constant(ty: Ty) -> Self {
        SigFunctor::Const(ty)
    }

    pub fn sum(a: SigFunctor, b: SigFunctor) -> Self {
        SigFunctor::Sum(Box::new(a), Box::new(b))
    }

    pub fn prod(a: SigFunctor, b: SigFunctor) -> Self {
        SigFunctor::Prod(Box::new(a), Box::new(b))
    }

    pub fn exp(b: Ty) -> Self {
        SigFunctor::ExpConst(b, Box::new(SigFunctor::Id))
    }

    /// Right-nested sum; `Const(Zero)` when empty.
    pub fn sum_all(parts: Vec<SigFunctor>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => SigFunctor::Const(Ty::Zero),
            Some(last) => it.fold(last, |acc, f| SigFunctor::sum(f, acc)),
        }
    }

    /// Right-nested product; `Const(Unit)` when empty.
    pub fn prod_all(parts: Vec<SigFunctor>) -> Self {
        let mut it = parts.into_iter().rev();
        match it.next() {
            None => SigFunctor::Const(Ty::Unit),
            Some(last) => it.fold(last, |acc, f| SigFunctor::prod(f, acc)),
        }
    }

    pub fn is_polynomial(&self) -> bool {
        match self {
            SigFunctor::Id | SigFunctor::Const(_) => true,
            SigFunctor::Sum(a, b) | SigFunctor::Prod(a, b) => a.is_polynomial() && b.is_polynomial(),
            SigFunctor::ExpConst(..) => false,
        }
    }

    pub fn is_extended_polynomial(&self) -> bool {
        match self {
            SigFunctor::Id | SigFunctor::Const(_) => true,
            SigFunctor::Sum(a, b) | SigFunctor::Prod(a, b) => a.is_extended_polynomial() && b.is_extended_polynomial(),
            SigFunctor::ExpConst(_, body) => **body == SigFunctor::Id,
        }
    }

    pub fn substitute(&self, subst: &std::collections::BTreeMap<String, Ty>) -> SigFunctor {
        match self {
            SigFunctor::Id => SigFunctor::Id,
            SigFunctor::Const(t) => SigFunctor::Const(t.substitute(subst)),
            SigFunctor::Sum(a, b) => SigFunctor::sum(a.substitute(subst), b.substitute(subst)),
            SigFunctor::Prod(a, b) => SigFunctor::prod(a.substitute(subst), b.substitute(subst)),
            SigFunctor::ExpConst(t, body) => SigFunctor::ExpConst(t.substitute(subst), body.clone()),
        }
    }

    /// `|F X|` for `|X| = n`, computed from the syntax.
    pub fn cardinality(&self, n: u128) -> Option<u128> {
        Some(match self {
            SigFunctor::Id => n,
            SigFunctor::Const(t) => t.cardinality()?.finite()?,
            SigFunctor::Sum(a, b) => a.cardinality(n)?.checked_add(b.cardinality(n)?)?,
            SigFunctor::Prod(a, b) => a.cardinality(n)?.checked_mul(b.cardinality(n)?)?,
            SigFunctor::ExpConst(t, _) => n.checked_pow(u32::try_from(t.cardinality()?.finite()?).ok()?)?,
        })
    }

    /// All values of `F X` in the source encoding, for a finite `X`.
    pub fn enumerate(&self, xs: &[PVal]) -> Result<Vec<PVal>, KernelError> {
        Ok(match self {
            SigFunctor::Id => xs.to_vec(),
            SigFunctor::Const(t) => t.enumerate()?,
            SigFunctor::Sum(a, b) => {
                let mut out: Vec<PVal> = a.enumerate(xs)?.into_iter().map(PVal::inl).collect();
                out.extend(b.enumerate(xs)?.into_iter().map(PVal::inr));
                out
            }
            SigFunctor::Prod(a, b) => {
                let (us, ws) = (a.enumerate(xs)?, b.enumerate(xs)?);
                us.iter().flat_map(|u| ws.iter().map(move |w| PVal::pair(u.clone(), w.clone()))).collect()
            }
            SigFunctor::ExpConst(t, _) => {
                let dom = t.enumerate()?;
                let mut out = vec![Vec::new()];
                for d in &dom {
                    out = out
                        .into_iter()
                        .flat_map(|g: Vec<(PVal, PVal)>| {
                            xs.iter().map(move |x| {
                                let mut g = g.clone();
                                g.push((d.clone(), x.clone()));
                                g
                            })
                        })
                        .collect();
                }
                out.into_iter().map(|g| PVal::Fun(PFun::graph(g).with_domain(t.clone()))).collect()
            }
        })
    }
}

impl fmt::Display for SigFunctor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn prec(s: &SigFunctor) -> u8 {
            match s {
                SigFunctor::Sum(..) => 0,
                SigFunctor::Prod(..) => 1,
                _ => 2,
            }
        }
        fn wrap(s: &SigFunctor, min: u8, f: &mut fmt::Formatter<'_>) -> fmt::Result {
            if prec(s) < min {
                write!(f, "({s})")
            } else {
                write!(f, "{s}")
            }
        }
        match self {
            SigFunctor::Id => write!(f, "X"),
            SigFunctor::Const(t) => match t {
                Ty::Zero | Ty::Unit | Ty::Nat | Ty::Bool | Ty::Logical | Ty::Named(_) => write!(f, "{t}"),
                _ => write!(f, "[{t}]"),
            },
            SigFunctor::Sum(a, b) => {
                wrap(a, 1, f)?;
                write!(f, " + ")?;
                wrap(b, 0, f)
            }
            SigFunctor::Prod(a, b) => {
                wrap(a, 2, f)?;
                write!(f, " × ")?;
                wrap(b, 1, f)
            }
            SigFunctor::ExpConst(t, _) => match t {
                Ty::Zero | Ty::Unit | Ty::Nat | Ty::Bool | Ty::Logical | Ty::Named(_) => write!(f, "({t} → X)"),
                _ => write!(f, "([{t}] → X)"),
            },
        }
    }
}

/// Injection into summand `i` (0-based) of an `n`-ary sum.
pub fn inject(i: usize, n: usize, v: PVal) -> PVal {
    if n <= 1 {
        v
    } else if i == 0 {
        PVal::inl(v)
    } else {
        PVal::inr(inject(i - 1, n - 1, v))
    }
}

/// Inverse of [`inject`].
pub fn untag(n: usize, v: &PVal) -> Result<(usize, PVal), FunctorError> {
    if n == 0 {
        return Err(FunctorError::TagOutOfRange { tag: 0, summands: 0 });
    }
    let mut cur = v.clone();
    for i in 0..n - 1 {
        match cur {
            PVal::Inl(x) => return Ok((i, (*x).clone())),
            PVal::Inr(x) => cur = (*x).clone(),
            other => return Err(FunctorError::BadEncoding(other.to_string())),
        }
    }
    Ok((n - 1, cur))
}

/// Injection into an `n`-ary sum of types.
pub fn sum_type(parts: &[Ty]) -> Ty {
    let mut it = parts.iter().rev().cloned();
    match it.next() {
        None => Ty::Zero,
        Some(last) => it.fold(last, |acc, t| Ty::sum(t, acc)),
    }
}

fn times(a: &Ty, b: &Ty) -> Ty {
    match (a, b) {
        (Ty::Unit, t) | (t, Ty::Unit) => t.clone(),
        _ => Ty::prod(a.clone(), b.clone()),
    }
}

fn plus(a: &Ty, b: &Ty) -> Ty {
    match (a, b) {
        (Ty::Zero, t) | (t, Ty::Zero) => t.clone(),
        _ => Ty::sum(a.clone(), b.clone()),
    }
}

/// Splits a parameter value of `times(a, b)` into its two factors.
fn split_times(a: &Ty, b: &Ty, v: &PVal) -> Result<(PVal, PVal), FunctorError> {
    match (a, b) {
        (Ty::Unit, _) => Ok((PVal::Unit, v.clone())),
        (_, Ty::Unit) => Ok((v.clone(), PVal::Unit)),
        _ => v.as_pair().map(|(x, y)| (x.clone(), y.clone())).ok_or_else(|| FunctorError::BadEncoding(v.to_string())),
    }
}

fn join_times(a: &Ty, b: &Ty, x: PVal, y: PVal) -> PVal {
    match (a, b) {
        (Ty::Unit, _) => y,
        (_, Ty::Unit) => x,
        _ => PVal::pair(x, y),
    }
}

/// `Σᵢ Aᵢ × X^kᵢ`, with every constant monomial gathered into summand 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PolyNF {
    pub summands: Vec<(Ty, usize)>,
}

/// `Σᵢ Aᵢ × (Bᵢ → X)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExtPolyNF {
    pub summands: Vec<(Ty, Ty)>,
}

fn poly_monomials(f: &SigFunctor) -> Result<Vec<(Ty, usize)>, FunctorError> {
    Ok(match f {
        SigFunctor::Id => vec![(Ty::Unit, 1)],
        SigFunctor::Const(t) => vec![(t.clone(), 0)],
        SigFunctor::Sum(a, b) => {
            let mut m = poly_monomials(a)?;
            m.extend(poly_monomials(b)?);
            m
        }
        SigFunctor::Prod(a, b) => {
            let (ma, mb) = (poly_monomials(a)?, poly_monomials(b)?);
            ma.iter().flat_map(|(ta, ka)| mb.iter().map(move |(tb, kb)| (times(ta, tb), ka + kb))).collect()
        }
        SigFunctor::ExpConst(..) => return Err(FunctorError::NotPolynomial(f.clone())),
    })
}

fn ext_monomials(f: &SigFunctor) -> Result<Vec<(Ty, Ty)>, FunctorError> {
    Ok(match f {
        SigFunctor::Id => vec![(Ty::Unit, Ty::Unit)],
        SigFunctor::Const(t) => vec![(t.clone(), Ty::Zero)],
        SigFunctor::ExpConst(b, body) if **body == SigFunctor::Id => vec![(Ty::Unit, b.clone())],
        SigFunctor::ExpConst(..) => return Err(FunctorError::NotExtendedPolynomial(f.clone())),
        SigFunctor::Sum(a, b) => {
            let mut m = ext_monomials(a)?;
            m.extend(ext_monomials(b)?);
            m
        }
        SigFunctor::Prod(a, b) => {
            let (ma, mb) = (ext_monomials(a)?, ext_monomials(b)?);
            ma.iter()
                .flat_map(|(ta, ba)| mb.iter().map(move |(tb, bb)| (times(ta, tb), plus(ba, bb))))
                .collect()
        }
    })
}

pub fn to_poly_nf(f: &SigFunctor) -> Result<PolyNF, FunctorError> {
    let monomials = poly_monomials(f)?;
    let constants: Vec<Ty> = monomials.iter().filter(|(_, k)| *k == 0).map(|(t, _)| t.clone()).collect();
    let mut summands = vec![(sum_type(&constants), 0)];
    summands.extend(monomials.into_iter().filter(|(_, k)| *k > 0));
    Ok(PolyNF { summands })
}

pub fn to_extpoly_nf(f: &SigFunctor) -> Result<ExtPolyNF, FunctorError> {
    Ok(ExtPolyNF { summands: ext_monomials(f)? })
}

/// Where a source monomial lands in the normal form.
#[derive(Debug, Clone, Copy)]
struct Slot {
    summand: usize,
    /// Position among the gathered constants (for `k = 0` monomials).
    constant: Option<(usize, usize)>,
}

fn poly_slots(monomials: &[(Ty, usize)]) -> Vec<Slot> {
    let n_const = monomials.iter().filter(|(_, k)| *k == 0).count();
    let (mut c, mut s) = (0, 1);
    monomials
        .iter()
        .map(|(_, k)| {
            if *k == 0 {
                c += 1;
                Slot { summand: 0, constant: Some((c - 1, n_const)) }
            } else {
                s += 1;
                Slot { summand: s - 1, constant: None }
            }
        })
        .collect()
}

/// Source-syntax value as (monomial index, parameter value, recursive positions).
fn poly_decompose(f: &SigFunctor, v: &PVal) -> Result<(usize, PVal, Vec<PVal>), FunctorError> {
    let bad = || FunctorError::BadEncoding(v.to_string());
    Ok(match f {
        SigFunctor::Id => (0, PVal::Unit, vec![v.clone()]),
        SigFunctor::Const(_) => (0, v.clone(), vec![]),
        SigFunctor::Sum(a, b) => match v {
            PVal::Inl(u) => poly_decompose(a, u)?,
            PVal::Inr(u) => {
                let (i, p, xs) = poly_decompose(b, u)?;
                (i + poly_monomials(a)?.len(), p, xs)
            }
            _ => return Err(bad()),
        },
        SigFunctor::Prod(a, b) => {
            let (u, w) = v.as_pair().ok_or_else(bad)?;
            let (ma, mb) = (poly_monomials(a)?, poly_monomials(b)?);
            let (i, p, mut xs) = poly_decompose(a, u)?;
            let (j, q, ys) = poly_decompose(b, w)?;
            xs.extend(ys);
            (i * mb.len() + j, join_times(&ma[i].0, &mb[j].0, p, q), xs)
        }
        SigFunctor::ExpConst(..) => return Err(FunctorError::NotPolynomial(f.clone())),
    })
}

fn poly_compose(f: &SigFunctor, idx: usize, p: &PVal, xs: &[PVal]) -> Result<PVal, FunctorError> {
    Ok(match f {
        SigFunctor::Id => xs.first().cloned().ok_or_else(|| FunctorError::BadEncoding("missing position".into()))?,
        SigFunctor::Const(_) => p.clone(),
        SigFunctor::Sum(a, b) => {
            let na = poly_monomials(a)?.len();
            if idx < na {
                PVal::inl(poly_compose(a, idx, p, xs)?)
            } else {
                PVal::inr(poly_compose(b, idx - na, p, xs)?)
            }
        }
        SigFunctor::Prod(a, b) => {
            let (ma, mb) = (poly_monomials(a)?, poly_monomials(b)?);
            let (i, j) = (idx / mb.len(), idx % mb.len());
            let (pa, pb) = split_times(&ma[i].0, &mb[j].0, p)?;
            let ka = ma[i].1;
            PVal::pair(poly_compose(a, i, &pa, &xs[..ka])?, poly_compose(b, j, &pb, &xs[ka..])?)
        }
        SigFunctor::ExpConst(..) => return Err(FunctorError::NotPolynomial(f.clone())),
    })
}

impl PolyNF {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn arity(&self, i: usize) -> usize {
        self.summands[i].1
    }

    /// `in_i (a, (x_1, ..., x_k))`.
    pub fn build(&self, i: usize, a: PVal, xs: Vec<PVal>) -> Result<PVal, FunctorError> {
        let n = self.len();
        let k = self.summands.get(i).ok_or(FunctorError::TagOutOfRange { tag: i, summands: n })?.1;
        if xs.len() != k {
            return Err(FunctorError::BadEncoding(format!("summand {i} takes {k} positions, got {}", xs.len())));
        }
        Ok(inject(i, n, PVal::pair(a, PVal::tuple(xs))))
    }

    /// Inverse of [`PolyNF::build`].
    pub fn split(&self, v: &PVal) -> Result<(usize, PVal, Vec<PVal>), FunctorError> {
        let (i, payload) = untag(self.len(), v)?;
        let (a, t) = payload.as_pair().ok_or_else(|| FunctorError::BadEncoding(v.to_string()))?;
        let xs = t.untuple(self.summands[i].1).ok_or_else(|| FunctorError::BadEncoding(v.to_string()))?;
        Ok((i, a.clone(), xs))
    }

    /// Applies `g` at every recursive position.
    pub fn fmap<E: From<FunctorError>>(
        &self,
        g: &mut dyn FnMut(&PVal) -> Result<PVal, E>,
        v: &PVal,
    ) -> Result<PVal, E> {
        if !v.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, a, xs) = self.split(v)?;
        let ys = xs.iter().map(|x| g(x)).collect::<Result<Vec<_>, E>>()?;
        if ys.iter().any(|y| !y.is_defined()) {
            return Ok(PVal::Undefined);
        }
        Ok(self.build(i, a, ys)?)
    }

    /// `|F X|` for `|X| = n`.
    pub fn cardinality(&self, n: u128) -> Option<u128> {
        self.summands.iter().try_fold(0u128, |acc, (a, k)| {
            let term = a.cardinality()?.finite()?.checked_mul(n.checked_pow(*k as u32)?)?;
            acc.checked_add(term)
        })
    }

    /// All values of `F X` in this encoding, for a finite `X`.
    pub fn enumerate(&self, xs: &[PVal]) -> Result<Vec<PVal>, FunctorError> {
        let mut out = Vec::new();
        for (i, (a, k)) in self.summands.iter().enumerate() {
            for p in a.enumerate()? {
                for tuple in tuples(xs, *k) {
                    out.push(self.build(i, p.clone(), tuple)?);
                }
            }
        }
        Ok(out)
    }

    /// Back to syntax: `Σᵢ Aᵢ × X × ... × X`, dropping an empty constant summand.
    pub fn to_sig(&self) -> SigFunctor {
        let parts = self
            .summands
            .iter()
            .filter(|(a, k)| *k > 0 || *a != Ty::Zero)
            .map(|(a, k)| {
                let mut factors = Vec::new();
                if *a != Ty::Unit || *k == 0 {
                    factors.push(SigFunctor::Const(a.clone()));
                }
                factors.extend(std::iter::repeat_n(SigFunctor::Id, *k));
                SigFunctor::prod_all(factors)
            })
            .collect();
        SigFunctor::sum_all(parts)
    }

    pub fn substitute(&self, subst: &std::collections::BTreeMap<String, Ty>) -> PolyNF {
        PolyNF { summands: self.summands.iter().map(|(a, k)| (a.substitute(subst), *k)).collect() }
    }
}

impl fmt::Display for PolyNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, k)) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            match k {
                0 => write!(f, "[{a}]")?,
                1 => write!(f, "[{a}]×X")?,
                _ => write!(f, "[{a}]×X^{k}")?,
            }
        }
        Ok(())
    }
}

/// All `k`-tuples over `xs`.
pub(crate) fn tuples(xs: &[PVal], k: usize) -> Vec<Vec<PVal>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                xs.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// Source value to normal-form value.
pub fn to_nf(f: &SigFunctor, nf: &PolyNF, v: &PVal) -> Result<PVal, FunctorError> {
    if !v.is_defined() {
        return Ok(PVal::Undefined);
    }
    let monomials = poly_monomials(f)?;
    let slots = poly_slots(&monomials);
    let (idx, p, xs) = poly_decompose(f, v)?;
    let slot = slots[idx];
    let a = match slot.constant {
        Some((c, n)) => inject(c, n, p),
        None => p,
    };
    nf.build(slot.summand, a, xs)
}

/// Normal-form value to source value.
pub fn from_nf(f: &SigFunctor, nf: &PolyNF, v: &PVal) -> Result<PVal, FunctorError> {
    if !v.is_defined() {
        return Ok(PVal::Undefined);
    }
    let monomials = poly_monomials(f)?;
    let slots = poly_slots(&monomials);
    let (i, a, xs) = nf.split(v)?;
    let (idx, p) = if i == 0 {
        let n_const = slots.iter().filter(|s| s.constant.is_some()).count();
        let (c, p) = untag(n_const, &a)?;
        let idx = slots
            .iter()
            .position(|s| s.constant.is_some_and(|(cc, _)| cc == c))
            .ok_or(FunctorError::TagOutOfRange { tag: c, summands: n_const })?;
        (idx, p)
    } else {
        let idx = slots.iter().position(|s| s.constant.is_none() && s.summand == i).ok_or(
            FunctorError::TagOutOfRange { tag: i, summands: nf.len() },
        )?;
        (idx, a)
    };
    poly_compose(f, idx, &p, &xs)
}

/// The empty map `Zero → X`.
fn empty_fun() -> PVal {
    PVal::Fun(PFun::bottom().with_domain(Ty::Zero))
}

fn ext_decompose(f: &SigFunctor, v: &PVal) -> Result<(usize, PVal, PVal), FunctorError> {
    let bad = || FunctorError::BadEncoding(v.to_string());
    Ok(match f {
        SigFunctor::Id => {
            let x = v.clone();
            (0, PVal::Unit, PVal::Fun(PFun::constant(x).with_domain(Ty::Unit)))
        }
        SigFunctor::Const(_) => (0, v.clone(), empty_fun()),
        SigFunctor::ExpConst(..) => (0, PVal::Unit, v.clone()),
        SigFunctor::Sum(a, b) => match v {
            PVal::Inl(u) => ext_decompose(a, u)?,
            PVal::Inr(u) => {
                let (i, p, g) = ext_decompose(b, u)?;
                (i + ext_monomials(a)?.len(), p, g)
            }
            _ => return Err(bad()),
        },
        SigFunctor::Prod(a, b) => {
            let (u, w) = v.as_pair().ok_or_else(bad)?;
            let (ma, mb) = (ext_monomials(a)?, ext_monomials(b)?);
            let (i, p, g) = ext_decompose(a, u)?;
            let (j, q, h) = ext_decompose(b, w)?;
            let (ba, bb) = (&ma[i].1, &mb[j].1);
            let gh = match (ba, bb) {
                (Ty::Zero, _) => h,
                (_, Ty::Zero) => g,
                _ => PVal::Fun(
                    PFun::new(move |y, fuel| match y {
                        PVal::Inl(y) => g.apply(y, fuel),
                        PVal::Inr(y) => h.apply(y, fuel),
                        other => Err(KernelError::TypeMismatch(format!("exponent argument {other}"))),
                    })
                    .with_domain(Ty::sum(ba.clone(), bb.clone())),
                ),
            };
            (i * mb.len() + j, join_times(&ma[i].0, &mb[j].0, p, q), gh)
        }
    })
}

fn ext_compose(f: &SigFunctor, idx: usize, p: &PVal, g: &PVal, fuel: &mut Fuel) -> Result<PVal, FunctorError> {
    Ok(match f {
        SigFunctor::Id => g.apply(&PVal::Unit, fuel)?,
        SigFunctor::Const(_) => p.clone(),
        SigFunctor::ExpConst(..) => g.clone(),
        SigFunctor::Sum(a, b) => {
            let na = ext_monomials(a)?.len();
            if idx < na {
                PVal::inl(ext_compose(a, idx, p, g, fuel)?)
            } else {
                PVal::inr(ext_compose(b, idx - na, p, g, fuel)?)
            }
        }
        SigFunctor::Prod(a, b) => {
            let (ma, mb) = (ext_monomials(a)?, ext_monomials(b)?);
            let (i, j) = (idx / mb.len(), idx % mb.len());
            let (pa, pb) = split_times(&ma[i].0, &mb[j].0, p)?;
            let (ba, bb) = (ma[i].1.clone(), mb[j].1.clone());
            let (ga, gb) = match (&ba, &bb) {
                (Ty::Zero, _) => (empty_fun(), g.clone()),
                (_, Ty::Zero) => (g.clone(), empty_fun()),
                _ => (precompose(g, PVal::inl, ba), precompose(g, PVal::inr, bb)),
            };
            PVal::pair(ext_compose(a, i, &pa, &ga, fuel)?, ext_compose(b, j, &pb, &gb, fuel)?)
        }
    })
}

fn precompose(g: &PVal, k: fn(PVal) -> PVal, dom: Ty) -> PVal {
    let g = g.clone();
    PVal::Fun(PFun::new(move |y, fuel| g.apply(&k(y.clone()), fuel)).with_domain(dom))
}

impl ExtPolyNF {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn build(&self, i: usize, a: PVal, g: PVal) -> Result<PVal, FunctorError> {
        if i >= self.len() {
            return Err(FunctorError::TagOutOfRange { tag: i, summands: self.len() });
        }
        Ok(inject(i, self.len(), PVal::pair(a, g)))
    }

    pub fn split(&self, v: &PVal) -> Result<(usize, PVal, PVal), FunctorError> {
        let (i, payload) = untag(self.len(), v)?;
        let (a, g) = payload.as_pair().ok_or_else(|| FunctorError::BadEncoding(v.to_string()))?;
        Ok((i, a.clone(), g.clone()))
    }

    /// Post-composes the function component with `g`.
    pub fn fmap(&self, g: &PFun, v: &PVal) -> Result<PVal, FunctorError> {
        if !v.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, a, h) = self.split(v)?;
        let g = g.clone();
        let dom = self.summands[i].1.clone();
        let composed = PFun::new(move |y, fuel| {
            let hy = h.apply(y, fuel)?;
            g.apply(&hy, fuel)
        })
        .with_domain(dom);
        self.build(i, a, PVal::Fun(composed))
    }

    pub fn cardinality(&self, n: u128) -> Option<u128> {
        self.summands.iter().try_fold(0u128, |acc, (a, b)| {
            let e = u32::try_from(b.cardinality()?.finite()?).ok()?;
            acc.checked_add(a.cardinality()?.finite()?.checked_mul(n.checked_pow(e)?)?)
        })
    }

    /// The summed exponent type `B = Σᵢ Bᵢ` and parameter type `A = Σᵢ Aᵢ`.
    pub fn label_types(&self) -> (Ty, Ty) {
        let a: Vec<Ty> = self.summands.iter().map(|(a, _)| a.clone()).collect();
        let b: Vec<Ty> = self.summands.iter().map(|(_, b)| b.clone()).collect();
        (sum_type(&a), sum_type(&b))
    }

    pub fn to_sig(&self) -> SigFunctor {
        let parts = self
            .summands
            .iter()
            .map(|(a, b)| {
                let mut factors = Vec::new();
                if *a != Ty::Unit || *b == Ty::Zero {
                    factors.push(SigFunctor::Const(a.clone()));
                }
                match b {
                    Ty::Zero => {}
                    Ty::Unit => factors.push(SigFunctor::Id),
                    b => factors.push(SigFunctor::exp(b.clone())),
                }
                SigFunctor::prod_all(factors)
            })
            .collect();
        SigFunctor::sum_all(parts)
    }
}

impl fmt::Display for ExtPolyNF {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, (a, b)) in self.summands.iter().enumerate() {
            if i > 0 {
                write!(f, " + ")?;
            }
            write!(f, "[{a}]×([{b}]→X)")?;
        }
        Ok(())
    }
}

pub fn to_ext_nf(f: &SigFunctor, nf: &ExtPolyNF, v: &PVal) -> Result<PVal, FunctorError> {
    if !v.is_defined() {
        return Ok(PVal::Undefined);
    }
    let (idx, a, g) = ext_decompose(f, v)?;
    nf.build(idx, a, g)
}

pub fn from_ext_nf(f: &SigFunctor, nf: &ExtPolyNF, v: &PVal, fuel: &mut Fuel) -> Result<PVal, FunctorError> {
    if !v.is_defined() {
        return Ok(PVal::Undefined);
    }
    let (i, a, g) = nf.split(v)?;
    ext_compose(f, i, &a, &g, fuel)
}

/// Copairing: `f` on `inl` payloads, `g` on `inr` payloads, strict.
pub fn sumcase<E: From<FunctorError>>(
    f: &mut dyn FnMut(&PVal) -> Result<PVal, E>,
    g: &mut dyn FnMut(&PVal) -> Result<PVal, E>,
    v: &PVal,
) -> Result<PVal, E> {
    match v {
        PVal::Undefined => Ok(PVal::Undefined),
        PVal::Inl(x) => f(x),
        PVal::Inr(y) => g(y),
        other => Err(FunctorError::BadEncoding(other.to_string()).into()),
    }
}

/// The partial constant `bot : 1 ⇀ a`, nowhere defined.
pub fn bot(target: &Ty) -> PVal {
    PVal::Fun(PFun::bottom().named(&format!("bot[{target}]")).with_domain(Ty::Unit))
}

/// Encodes `a + b` as `(x : 1 ⇀ a, y : 1 ⇀ b, z : Bool)` where exactly the
/// side selected by `z` is defined at `()`.
pub fn encode_sum_as_triple(v: &PVal) -> Result<PVal, FunctorError> {
    let thunk = |x: &PVal| PVal::Fun(PFun::constant(x.clone()).with_domain(Ty::Unit));
    Ok(match v {
        PVal::Undefined => PVal::Undefined,
        PVal::Inl(x) => PVal::tuple(vec![thunk(x), bot(&Ty::Zero), PVal::tt()]),
        PVal::Inr(y) => PVal::tuple(vec![bot(&Ty::Zero), thunk(y), PVal::ff()]),
        other => return Err(FunctorError::BadEncoding(other.to_string())),
    })
}

fn triple_parts(t: &PVal) -> Result<(PVal, PVal, bool), FunctorError> {
    let bad = || FunctorError::BadEncoding(t.to_string());
    let parts = t.untuple(3).ok_or_else(bad)?;
    let z = parts[2].as_bool().ok_or_else(bad)?;
    Ok((parts[0].clone(), parts[1].clone(), z))
}

/// Inverse of [`encode_sum_as_triple`].
pub fn decode_triple(t: &PVal, fuel: &mut Fuel) -> Result<PVal, FunctorError> {
    if !t.is_defined() {
        return Ok(PVal::Undefined);
    }
    let (x, y, z) = triple_parts(t)?;
    Ok(if z { PVal::inl(x.apply(&PVal::Unit, fuel)?) } else { PVal::inr(y.apply(&PVal::Unit, fuel)?) })
}

/// Copairing through the triple: `if z then f (x ()) else g (y ())`.
pub fn triple_case<E: From<FunctorError> + From<KernelError>>(
    f: &mut dyn FnMut(&PVal) -> Result<PVal, E>,
    g: &mut dyn FnMut(&PVal) -> Result<PVal, E>,
    t: &PVal,
    fuel: &mut Fuel,
) -> Result<PVal, E> {
    if !t.is_defined() {
        return Ok(PVal::Undefined);
    }
    let (x, y, z) = triple_parts(t)?;
    if z {
        let a = x.apply(&PVal::Unit, fuel)?;
        if a.is_defined() {
            f(&a)
        } else {
            Ok(PVal::Undefined)
        }
    } else {
        let b = y.apply(&PVal::Unit, fuel)?;
        if b.is_defined() {
            g(&b)
        } else {
            Ok(PVal::Undefined)
        }
    }
}

/// `outl z = case z of inl x → x | inr y → bot ()`.
pub fn outl(v: &PVal, fuel: &mut Fuel) -> Result<PVal, FunctorError> {
    sumcase::<FunctorError>(&mut |x| Ok(x.clone()), &mut |_| Ok(bot(&Ty::Zero).apply(&PVal::Unit, fuel)?), v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn a() -> Ty {
        Ty::named("a")
    }

    fn proc_functor() -> SigFunctor {
        SigFunctor::sum(
            SigFunctor::prod(SigFunctor::Const(a()), SigFunctor::Id),
            SigFunctor::prod(SigFunctor::Id, SigFunctor::Id),
        )
    }

    #[test]
    fn list_functor_normal_form() {
        let f = SigFunctor::sum(SigFunctor::Const(Ty::Unit), SigFunctor::prod(SigFunctor::Const(a()), SigFunctor::Id));
        assert_eq!(to_poly_nf(&f).unwrap().summands, vec![(Ty::Unit, 0), (a(), 1)]);
    }

    #[test]
    fn identity_normal_forms() {
        assert_eq!(to_poly_nf(&SigFunctor::Id).unwrap().summands, vec![(Ty::Zero, 0), (Ty::Unit, 1)]);
        assert_eq!(to_extpoly_nf(&SigFunctor::Id).unwrap().summands, vec![(Ty::Unit, Ty::Unit)]);
    }

    #[test]
    fn proc_normal_forms() {
        let f = proc_functor();
        assert_eq!(to_poly_nf(&f).unwrap().summands, vec![(Ty::Zero, 0), (a(), 1), (Ty::Unit, 2)]);
        assert_eq!(
            to_extpoly_nf(&f).unwrap().summands,
            vec![(a(), Ty::Unit), (Ty::Unit, Ty::sum(Ty::Unit, Ty::Unit))]
        );
    }

    #[test]
    fn product_of_exponentials_sums_exponents() {
        let b1 = Ty::named("b");
        let b2 = Ty::named("c");
        let f = SigFunctor::prod(SigFunctor::exp(b1.clone()), SigFunctor::exp(b2.clone()));
        assert_eq!(to_extpoly_nf(&f).unwrap().summands, vec![(Ty::Unit, Ty::sum(b1, b2))]);
    }

    #[test]
    fn exponentials_are_not_polynomial() {
        let f = SigFunctor::sum(SigFunctor::Id, SigFunctor::exp(Ty::Bool));
        assert!(matches!(to_poly_nf(&f), Err(FunctorError::NotPolynomial(_))));
        let g = SigFunctor::ExpConst(Ty::Bool, Box::new(SigFunctor::Const(Ty::Unit)));
        assert!(matches!(to_extpoly_nf(&g), Err(FunctorError::NotExtendedPolynomial(_))));
    }

    #[test]
    fn triple_encoding_examples() {
        let mut fuel = Fuel::default();
        let t = encode_sum_as_triple(&PVal::inl(PVal::nat(4))).unwrap();
        let parts = t.untuple(3).unwrap();
        assert_eq!(parts[0].apply(&PVal::Unit, &mut fuel).unwrap(), PVal::nat(4));
        assert!(!parts[1].apply(&PVal::Unit, &mut fuel).unwrap().is_defined());
        assert_eq!(parts[2], PVal::tt());
        assert_eq!(decode_triple(&t, &mut fuel).unwrap(), PVal::inl(PVal::nat(4)));
    }

    #[test]
    fn outl_of_inr_is_undefined() {
        let mut fuel = Fuel::default();
        assert!(!outl(&PVal::inr(PVal::Unit), &mut fuel).unwrap().is_defined());
        assert_eq!(outl(&PVal::inl(PVal::nat(1)), &mut fuel).unwrap(), PVal::nat(1));
    }
}

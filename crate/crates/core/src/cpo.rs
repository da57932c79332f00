//! Cpos given by an order on kernel values and suprema of partial chains
//! (chains in `1 ⇀ A`), least fixed points, and ordered versions of the
//! constructed datatypes.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::final_coalgebra::{Coalgebra, FinalCoalgebra, FinalError, PTreeVal};
use crate::functors::{untag, ExtPolyNF, PolyNF};
use crate::initial::{build_initial, Algebra, DTreeVal, InitialAlgebra, InitialError};
use crate::kernel::{decode_path, encode_path, eq_strong_with, Fuel, KernelError, PFun, PVal, PathMap, Ty};

/// Points of a function domain at which orders and equalities are sampled.
pub const SAMPLE_DEPTH: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CpoError {
    #[error("chain still increasing at bound {bound}")]
    NotStabilized { bound: usize },
    #[error("chain is not monotone at index {index}")]
    NotMonotone { index: usize },
    #[error("{0} has no least element")]
    NotPointed(String),
    #[error("result is not a fixed point: {0}")]
    NotFixedPoint(String),
    #[error("parameter cpos do not match the signature: {0}")]
    ParamMismatch(String),
    #[error("chain elements have different shapes")]
    ShapeMismatch,
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error(transparent)]
    Initial(#[from] InitialError),
    #[error(transparent)]
    Final(#[from] FinalError),
}

impl From<CpoError> for KernelError {
    fn from(e: CpoError) -> Self {
        match e {
            CpoError::Kernel(k) => k,
            other => KernelError::Host(other.to_string()),
        }
    }
}

/// An order on the defined values of a carrier, with suprema of chains.
#[derive(Clone, Debug, PartialEq)]
pub enum Cpo {
    /// The discrete order.
    Flat(Ty),
    Product(Box<Cpo>, Box<Cpo>),
    /// Tags incomparable, componentwise within a tag.
    Sum(Box<Cpo>, Box<Cpo>),
    /// `C ⇀ B`, pointwise with `def (f c) ⇒ f c ⊑ g c`; pointed.
    PFun { dom: Ty, cod: Box<Cpo> },
    /// `A →c B`, pointwise on total maps.
    CFun { dom: Box<Cpo>, cod: Box<Cpo> },
    /// Finite lists in path encoding under the prefix order. Not complete:
    /// strictly increasing chains have no supremum here.
    Prefix(Ty),
}

pub fn flat_cpo(carrier: Ty) -> Cpo {
    Cpo::Flat(carrier)
}

pub fn product_cpo(a: Cpo, b: Cpo) -> Cpo {
    Cpo::Product(Box::new(a), Box::new(b))
}

pub fn sum_cpo(a: Cpo, b: Cpo) -> Cpo {
    Cpo::Sum(Box::new(a), Box::new(b))
}

pub fn pfun_cpo(dom: Ty, cod: Cpo) -> Cpo {
    Cpo::PFun { dom, cod: Box::new(cod) }
}

pub fn cfun_cpo(dom: Cpo, cod: Cpo) -> Cpo {
    Cpo::CFun { dom: Box::new(dom), cod: Box::new(cod) }
}

/// Right-nested sum matching the n-ary injections of the functor layer.
pub fn sum_all(mut parts: Vec<Cpo>) -> Cpo {
    match parts.len() {
        0 => Cpo::Flat(Ty::Zero),
        1 => parts.pop().expect("one part"),
        _ => {
            let first = parts.remove(0);
            sum_cpo(first, sum_all(parts))
        }
    }
}

/// The supremum of a sampled chain and the index from which the chain
/// was constant, when that is known.
#[derive(Clone, Debug)]
pub struct ChainSup {
    pub value: PVal,
    pub stable_from: Option<usize>,
}

/// A chain in `1 ⇀ A`, as a function of the index.
#[derive(Clone)]
pub struct PartialChain(pub Arc<dyn Fn(u64, &mut Fuel) -> Result<PVal, KernelError> + Send + Sync>);

impl PartialChain {
    pub fn new(f: impl Fn(u64, &mut Fuel) -> Result<PVal, KernelError> + Send + Sync + 'static) -> Self {
        PartialChain(Arc::new(f))
    }

    pub fn from_vec(xs: Vec<PVal>) -> Self {
        PartialChain::new(move |i, _| Ok(xs.get(i as usize).or(xs.last()).cloned().unwrap_or(PVal::Undefined)))
    }

    pub fn take(&self, bound: usize, fuel: &mut Fuel) -> Result<Vec<PVal>, KernelError> {
        (0..=bound as u64).map(|i| (self.0)(i, fuel)).collect()
    }
}

impl Cpo {
    pub fn carrier(&self) -> Ty {
        match self {
            Cpo::Flat(t) => t.clone(),
            Cpo::Product(a, b) => Ty::prod(a.carrier(), b.carrier()),
            Cpo::Sum(a, b) => Ty::sum(a.carrier(), b.carrier()),
            Cpo::PFun { dom, cod } => Ty::partial(dom.clone(), cod.carrier()),
            Cpo::CFun { dom, cod } => Ty::total(dom.carrier(), cod.carrier()),
            Cpo::Prefix(t) => Ty::named(format!("Path[{t}]")),
        }
    }

    fn function_domain(&self) -> Ty {
        match self {
            Cpo::PFun { dom, .. } => dom.clone(),
            Cpo::CFun { dom, .. } => dom.carrier(),
            other => other.carrier(),
        }
    }

    /// Order on defined values.
    pub fn leq(&self, x: &PVal, y: &PVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        Ok(match self {
            Cpo::Flat(_) => eq_strong_with(x, y, SAMPLE_DEPTH, fuel)?,
            Cpo::Product(a, b) => match (x.as_pair(), y.as_pair()) {
                (Some((x1, x2)), Some((y1, y2))) => a.leq(x1, y1, fuel)? && b.leq(x2, y2, fuel)?,
                _ => false,
            },
            Cpo::Sum(a, b) => match (x, y) {
                (PVal::Inl(u), PVal::Inl(v)) => a.leq(u, v, fuel)?,
                (PVal::Inr(u), PVal::Inr(v)) => b.leq(u, v, fuel)?,
                _ => false,
            },
            Cpo::PFun { dom, cod } => {
                for c in dom.samples(SAMPLE_DEPTH)? {
                    if !cod.lifted_leq(&x.apply(&c, fuel)?, &y.apply(&c, fuel)?, fuel)? {
                        return Ok(false);
                    }
                }
                true
            }
            Cpo::CFun { dom, cod } => {
                for a in dom.carrier().samples(SAMPLE_DEPTH)? {
                    let (u, v) = (x.apply(&a, fuel)?, y.apply(&a, fuel)?);
                    if !(u.is_defined() && v.is_defined() && cod.leq(&u, &v, fuel)?) {
                        return Ok(false);
                    }
                }
                true
            }
            Cpo::Prefix(_) => match (decode_path(x), decode_path(y)) {
                (Some(p), Some(q)) => p.len() <= q.len() && p.iter().zip(&q).all(|(u, v)| u.structurally_eq(v)),
                _ => false,
            },
        })
    }

    /// `x ⊑ y ⇔ (def x ⇒ x ⊑ y)` on `1 ⇀ A`.
    pub fn lifted_leq(&self, x: &PVal, y: &PVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        if !x.is_defined() {
            return Ok(true);
        }
        Ok(y.is_defined() && self.leq(x, y, fuel)?)
    }

    pub fn lifted_eq(&self, x: &PVal, y: &PVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        Ok(self.lifted_leq(x, y, fuel)? && self.lifted_leq(y, x, fuel)?)
    }

    pub fn bottom(&self) -> Option<PVal> {
        match self {
            Cpo::PFun { dom, .. } => Some(PVal::Fun(PFun::bottom().with_domain(dom.clone()))),
            Cpo::Product(a, b) => Some(PVal::pair(a.bottom()?, b.bottom()?)),
            Cpo::CFun { dom, cod } => Some(PVal::Fun(PFun::constant(cod.bottom()?).with_domain(dom.carrier()))),
            _ => None,
        }
    }

    /// Supremum of a finite monotone prefix `x₀ ⊑ ... ⊑ x_bound` of a
    /// partial chain. Function cpos take suprema pointwise and lazily.
    pub fn sup_of(&self, xs: &[PVal], fuel: &mut Fuel) -> Result<ChainSup, CpoError> {
        let Some(first) = xs.iter().position(PVal::is_defined) else {
            return Ok(ChainSup { value: PVal::Undefined, stable_from: Some(0) });
        };
        let tail = &xs[first..];
        match self {
            Cpo::Flat(_) | Cpo::Prefix(_) => {
                let mut stable = tail.len() - 1;
                while stable > 0 && self.lifted_eq(&tail[stable - 1], &tail[stable], fuel)? {
                    stable -= 1;
                }
                if stable + 1 >= tail.len() && tail.len() > 1 {
                    return Err(CpoError::NotStabilized { bound: xs.len() - 1 });
                }
                Ok(ChainSup { value: tail[stable].clone(), stable_from: Some(first + stable) })
            }
            Cpo::Product(a, b) => {
                let (mut us, mut vs) = (Vec::new(), Vec::new());
                for x in tail {
                    let (u, v) = x.as_pair().ok_or(CpoError::ShapeMismatch)?;
                    us.push(u.clone());
                    vs.push(v.clone());
                }
                let (su, sv) = (a.sup_of(&us, fuel)?, b.sup_of(&vs, fuel)?);
                let stable_from = su.stable_from.zip(sv.stable_from).map(|(i, j)| first + i.max(j));
                Ok(ChainSup { value: PVal::pair(su.value, sv.value), stable_from })
            }
            Cpo::Sum(a, b) => {
                // tags settle at the first defined element
                let left = matches!(tail[0], PVal::Inl(_));
                let mut payloads = Vec::new();
                for (k, x) in tail.iter().enumerate() {
                    match (x, left) {
                        (PVal::Inl(u), true) | (PVal::Inr(u), false) => payloads.push((**u).clone()),
                        _ => return Err(CpoError::NotMonotone { index: first + k }),
                    }
                }
                let s = if left { a.sup_of(&payloads, fuel)? } else { b.sup_of(&payloads, fuel)? };
                let value = if left { PVal::inl(s.value) } else { PVal::inr(s.value) };
                Ok(ChainSup { value, stable_from: s.stable_from.map(|i| first + i) })
            }
            Cpo::PFun { cod, .. } | Cpo::CFun { cod, .. } => {
                let dom = self.function_domain();
                let (cod, chain) = ((**cod).clone(), xs.to_vec());
                let f = PFun::new(move |c, fuel| {
                    let points: Vec<PVal> = chain.iter().map(|x| x.apply(c, fuel)).collect::<Result<_, _>>()?;
                    Ok(cod.sup_of(&points, fuel)?.value)
                })
                .with_domain(dom);
                Ok(ChainSup { value: PVal::Fun(f), stable_from: None })
            }
        }
    }

    /// Index of the first violation of `xᵢ ⊑ xᵢ₊₁`, if any.
    pub fn first_non_monotone(&self, xs: &[PVal], fuel: &mut Fuel) -> Result<Option<usize>, CpoError> {
        for i in 0..xs.len().saturating_sub(1) {
            if !self.lifted_leq(&xs[i], &xs[i + 1], fuel)? {
                return Ok(Some(i + 1));
            }
        }
        Ok(None)
    }

    /// Reflexivity, transitivity and antisymmetry on all triples of
    /// `samples`; returns the first failing triple.
    pub fn check_order_axioms(&self, samples: &[PVal], fuel: &mut Fuel) -> Result<Option<String>, CpoError> {
        let n = samples.len();
        let mut le = vec![vec![false; n]; n];
        for i in 0..n {
            for j in 0..n {
                le[i][j] = self.leq(&samples[i], &samples[j], fuel)?;
            }
        }
        for i in 0..n {
            if !le[i][i] {
                return Ok(Some(format!("{} ⋢ itself", samples[i])));
            }
            for j in 0..n {
                if i != j && le[i][j] && le[j][i] && !samples[i].structurally_eq(&samples[j]) {
                    if !eq_strong_with(&samples[i], &samples[j], SAMPLE_DEPTH, fuel)? {
                        return Ok(Some(format!("{} and {} are mutually below", samples[i], samples[j])));
                    }
                }
                for k in 0..n {
                    if le[i][j] && le[j][k] && !le[i][k] {
                        return Ok(Some(format!("{} ⊑ {} ⊑ {}", samples[i], samples[j], samples[k])));
                    }
                }
            }
        }
        Ok(None)
    }
}

/// `⊔ᵢ xᵢ` of a partial chain sampled up to `bound`.
pub fn chain_sup(cpo: &Cpo, ch: &PartialChain, bound: usize, fuel: &mut Fuel) -> Result<ChainSup, CpoError> {
    let xs = ch.take(bound, fuel)?;
    if let Some(index) = cpo.first_non_monotone(&xs, fuel)? {
        return Err(CpoError::NotMonotone { index });
    }
    cpo.sup_of(&xs, fuel)
}

/// An endo-map on a cpo.
pub type EndoFn = dyn Fn(&PVal, &mut Fuel) -> Result<PVal, KernelError> + Send + Sync;

#[derive(Clone, Debug)]
pub struct Lfp {
    pub value: PVal,
    pub stable_from: Option<usize>,
}

/// `⊔ₙ fⁿ ⊥` over `bound` iterations, checked to be a fixed point on
/// samples.
pub fn lfp(cpo: &Cpo, f: &EndoFn, bound: usize, fuel: &mut Fuel) -> Result<Lfp, CpoError> {
    let bottom = cpo.bottom().ok_or_else(|| CpoError::NotPointed(cpo.carrier().to_string()))?;
    let mut xs = vec![bottom];
    for _ in 0..bound {
        let next = f(xs.last().expect("nonempty"), fuel)?;
        xs.push(next);
    }
    if let Some(index) = cpo.first_non_monotone(&xs, fuel)? {
        return Err(CpoError::NotMonotone { index });
    }
    let s = cpo.sup_of(&xs, fuel)?;
    let image = f(&s.value, fuel)?;
    if !cpo.lifted_eq(&image, &s.value, fuel)? {
        return Err(CpoError::NotFixedPoint(s.value.to_string()));
    }
    Ok(Lfp { value: s.value, stable_from: s.stable_from })
}

/// Counts the pre-fixed points `f p ⊑ p` among `candidates` and whether
/// `x` lies below each of them.
pub fn check_minimal(
    cpo: &Cpo,
    f: &EndoFn,
    x: &PVal,
    candidates: &[PVal],
    fuel: &mut Fuel,
) -> Result<(usize, bool), CpoError> {
    let mut count = 0;
    let mut below = true;
    for p in candidates {
        if cpo.lifted_leq(&f(p, fuel)?, p, fuel)? {
            count += 1;
            below &= cpo.lifted_leq(x, p, fuel)?;
        }
    }
    Ok((count, below))
}

/// `F g n = if n = 0 then 1 else n * g (n - 1)`.
pub fn factorial_functional() -> Arc<EndoFn> {
    Arc::new(|g, _| {
        let g = g.clone();
        Ok(PVal::Fun(
            PFun::new(move |n, fuel| {
                let Some(k) = n.as_nat() else { return Ok(PVal::Undefined) };
                if n.is_zero_nat() {
                    return Ok(PVal::nat(1));
                }
                let prev = g.apply(&PVal::Nat(k - 1u32), fuel)?;
                Ok(prev.as_nat().map_or(PVal::Undefined, |p| PVal::Nat(k * p)))
            })
            .with_domain(Ty::Nat),
        ))
    })
}

/// Seeded random partial maps on `0..dom` with values below `range`.
pub fn random_partial_maps(dom: u64, range: u64, count: usize, seed: u64) -> Vec<PVal> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let graph = (0..dom)
                .filter_map(|x| rng.gen_bool(0.7).then(|| (PVal::nat(x), PVal::nat(rng.gen_range(0..range)))))
                .collect();
            PVal::Fun(PFun::graph(graph).with_domain(Ty::Nat))
        })
        .collect()
}

/// Generated monotone partial chains over a flat carrier: an undefined
/// prefix of each length up to `len`, followed by each value.
pub fn flat_chains(values: &[PVal], len: usize) -> Vec<Vec<PVal>> {
    let mut out = vec![vec![PVal::Undefined; len]];
    for k in 0..len {
        for v in values {
            let mut ch = vec![PVal::Undefined; k];
            ch.extend(std::iter::repeat_n(v.clone(), len - k));
            out.push(ch);
        }
    }
    out
}

/// Every monotone chain of `len` elements in the flat order over `Bool`
/// has its supremum at its first defined element.
pub fn bool_is_flat(len: usize, fuel: &mut Fuel) -> Result<bool, CpoError> {
    let cpo = flat_cpo(Ty::Bool);
    let vals = [PVal::Undefined, PVal::tt(), PVal::ff()];
    let mut ok = true;
    for code in 0..3usize.pow(len as u32) {
        let xs: Vec<PVal> = (0..len).map(|i| vals[code / 3usize.pow(i as u32) % 3].clone()).collect();
        if cpo.first_non_monotone(&xs, fuel)?.is_some() {
            continue;
        }
        let first = xs.iter().find(|x| x.is_defined()).cloned().unwrap_or(PVal::Undefined);
        let mut padded = xs.clone();
        padded.push(xs.last().cloned().unwrap_or(PVal::Undefined));
        ok &= cpo.sup_of(&padded, fuel)?.value.structurally_eq(&first);
    }
    Ok(ok)
}

/// The initial algebra with parameter cpos, ordered as a subtype of the
/// universal tree type.
#[derive(Clone)]
pub struct DomainInitial {
    pub handle: InitialAlgebra,
    pub params: Vec<Cpo>,
}

pub fn domain_initial(nf: &PolyNF, params: Vec<Cpo>) -> Result<DomainInitial, CpoError> {
    if params.len() != nf.len() {
        return Err(CpoError::ParamMismatch(format!("{} cpos for {} summands", params.len(), nf.len())));
    }
    for ((a, _), c) in nf.summands.iter().zip(&params) {
        if !a.equiv(&c.carrier()) {
            return Err(CpoError::ParamMismatch(format!("{} against {a}", c.carrier())));
        }
    }
    Ok(DomainInitial { handle: build_initial(nf)?, params })
}

impl DomainInitial {
    fn label_leq(&self, u: &PVal, v: &PVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        let n = self.params.len();
        let (i, a) = untag(n, u).map_err(InitialError::from)?;
        let (j, b) = untag(n, v).map_err(InitialError::from)?;
        if i != j {
            return Ok(false);
        }
        match (&a, &b) {
            (PVal::Inl(y), PVal::Inl(z)) => self.params[i].leq(y, z, fuel),
            (PVal::Inr(_), PVal::Inr(_)) => Ok(true),
            _ => Ok(false),
        }
    }

    /// Componentwise order on `(l, d, x)`: labels by the parameter cpos,
    /// depths flat, the anchor in the first parameter cpo.
    pub fn tree_leq(&self, s: &DTreeVal, t: &DTreeVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        for p in s.l.representatives(&t.l) {
            match (s.l.get(&p), t.l.get(&p)) {
                (None, None) => {}
                (Some(u), Some(v)) if self.label_leq(u, v, fuel)? => {}
                _ => return Ok(false),
            }
        }
        for p in s.d.representatives(&t.d) {
            let same = match (s.d.get(&p), t.d.get(&p)) {
                (None, None) => true,
                (Some(u), Some(v)) => u.structurally_eq(v),
                _ => false,
            };
            if !same {
                return Ok(false);
            }
        }
        match self.anchor_cpo() {
            Some(c) => c.lifted_leq(&s.x, &t.x, fuel),
            None => Ok(s.x.structurally_eq(&t.x)),
        }
    }

    fn anchor_cpo(&self) -> Option<&Cpo> {
        self.params.first()
    }

    pub fn tree_eq(&self, s: &DTreeVal, t: &DTreeVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        Ok(self.tree_leq(s, t, fuel)? && self.tree_leq(t, s, fuel)?)
    }

    /// Supremum of a chain of trees of one shape, label by label.
    pub fn tree_sup(&self, chain: &[DTreeVal], fuel: &mut Fuel) -> Result<DTreeVal, CpoError> {
        let first = chain.first().ok_or(CpoError::ShapeMismatch)?;
        let n = self.params.len();
        let mut l = PathMap::new();
        for (p, _, cone) in first.l.entries() {
            let labels: Vec<PVal> = chain
                .iter()
                .map(|t| t.l.get(&p).cloned().ok_or(CpoError::ShapeMismatch))
                .collect::<Result<_, _>>()?;
            let (i, z) = untag(n, &labels[0]).map_err(InitialError::from)?;
            let sup = match z {
                PVal::Inl(_) => {
                    let ys: Vec<PVal> = labels
                        .iter()
                        .map(|u| match untag(n, u) {
                            Ok((j, PVal::Inl(y))) if j == i => Ok((*y).clone()),
                            _ => Err(CpoError::ShapeMismatch),
                        })
                        .collect::<Result<_, _>>()?;
                    let mut padded = ys.clone();
                    padded.push(ys.last().cloned().expect("nonempty"));
                    crate::functors::inject(i, n, PVal::inl(self.params[i].sup_of(&padded, fuel)?.value))
                }
                _ => labels[0].clone(),
            };
            if cone {
                l.set_cone(p, sup);
            } else {
                l.set_exact(p, sup);
            }
        }
        let xs: Vec<PVal> = chain.iter().map(|t| t.x.clone()).collect();
        let x = match self.anchor_cpo() {
            Some(c) => {
                let mut padded = xs.clone();
                padded.push(xs.last().cloned().expect("nonempty"));
                c.sup_of(&padded, fuel)?.value
            }
            None => first.x.clone(),
        };
        Ok(DTreeVal { l, d: first.d.clone(), x })
    }

    /// `c_i` preserves the order on one comparable pair of arguments.
    pub fn constructor_monotone(
        &self,
        i: usize,
        lo: (&PVal, &[DTreeVal]),
        hi: (&PVal, &[DTreeVal]),
        fuel: &mut Fuel,
    ) -> Result<bool, CpoError> {
        let a = self.handle.construct(i, lo.0, lo.1)?;
        let b = self.handle.construct(i, hi.0, hi.1)?;
        self.tree_leq(&a, &b, fuel)
    }

    /// `c_i (⊔ yₖ, ⊔ tsₖ) = ⊔ c_i (yₖ, tsₖ)` on a finite chain of arguments.
    pub fn constructor_continuous(
        &self,
        i: usize,
        chain: &[(PVal, Vec<DTreeVal>)],
        fuel: &mut Fuel,
    ) -> Result<bool, CpoError> {
        let mut ys: Vec<PVal> = chain.iter().map(|(y, _)| y.clone()).collect();
        ys.push(ys.last().cloned().ok_or(CpoError::ShapeMismatch)?);
        let y = self.params[i].sup_of(&ys, fuel)?.value;
        let k = chain[0].1.len();
        let kids = (0..k)
            .map(|j| self.tree_sup(&chain.iter().map(|(_, ts)| ts[j].clone()).collect::<Vec<_>>(), fuel))
            .collect::<Result<Vec<_>, _>>()?;
        let lhs = self.handle.construct(i, &y, &kids)?;
        let built = chain
            .iter()
            .map(|(y, ts)| self.handle.construct(i, y, ts))
            .collect::<Result<Vec<_>, _>>()?;
        let rhs = self.tree_sup(&built, fuel)?;
        self.tree_eq(&lhs, &rhs, fuel)
    }

    /// `fold (⊔ tₖ) = ⊔ fold tₖ` in the cpo `cod`.
    pub fn fold_continuous(&self, alg: &Algebra, cod: &Cpo, chain: &[DTreeVal], fuel: &mut Fuel) -> Result<bool, CpoError> {
        let lhs = self.handle.fold(alg, &self.tree_sup(chain, fuel)?, fuel)?;
        let mut images = chain.iter().map(|t| self.handle.fold(alg, t, fuel)).collect::<Result<Vec<_>, _>>()?;
        if cod.first_non_monotone(&images, fuel)?.is_some() {
            return Ok(false);
        }
        images.push(images.last().cloned().ok_or(CpoError::ShapeMismatch)?);
        let rhs = cod.sup_of(&images, fuel)?.value;
        cod.lifted_eq(&lhs, &rhs, fuel)
    }

    pub fn fold_monotone(&self, alg: &Algebra, cod: &Cpo, s: &DTreeVal, t: &DTreeVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        if !self.tree_leq(s, t, fuel)? {
            return Ok(true);
        }
        let (u, v) = (self.handle.fold(alg, s, fuel)?, self.handle.fold(alg, t, fuel)?);
        cod.lifted_leq(&u, &v, fuel)
    }
}

/// The final coalgebra with an ordered label type; elements are compared
/// pointwise on paths up to `depth`.
#[derive(Clone)]
pub struct DomainFinal {
    pub handle: FinalCoalgebra,
    pub labels: Cpo,
    pub depth: usize,
}

pub fn domain_final(nf: &ExtPolyNF, params: Vec<Cpo>, depth: usize) -> Result<DomainFinal, CpoError> {
    if params.len() != nf.len() {
        return Err(CpoError::ParamMismatch(format!("{} cpos for {} summands", params.len(), nf.len())));
    }
    Ok(DomainFinal { handle: crate::final_coalgebra::build_final(nf)?, labels: sum_all(params), depth })
}

impl DomainFinal {
    pub fn tree_leq(&self, s: &PTreeVal, t: &PTreeVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        for p in self.handle.paths(self.depth) {
            if !self.labels.lifted_leq(&s.observe(&p, fuel)?, &t.observe(&p, fuel)?, fuel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Pointwise supremum, lazily on each path.
    pub fn tree_sup(&self, chain: &[PTreeVal]) -> PTreeVal {
        let (labels, chain) = (self.labels.clone(), chain.to_vec());
        PTreeVal::new(PFun::new(move |p, fuel| {
            let Some(path) = decode_path(p) else { return Ok(PVal::Undefined) };
            let mut points: Vec<PVal> =
                chain.iter().map(|t| t.f.apply(&encode_path(&path), fuel)).collect::<Result<_, _>>()?;
            points.push(points.last().cloned().unwrap_or(PVal::Undefined));
            Ok(labels.sup_of(&points, fuel)?.value)
        }))
    }

    /// `z ⊑ z'` in `seeds` implies `unfold d z ⊑ unfold d z'`.
    pub fn unfold_monotone(&self, d: &Coalgebra, seeds: &Cpo, z: &PVal, z2: &PVal, fuel: &mut Fuel) -> Result<bool, CpoError> {
        if !seeds.lifted_leq(z, z2, fuel)? {
            return Ok(true);
        }
        self.tree_leq(&self.handle.unfold(d, z), &self.handle.unfold(d, z2), fuel)
    }

    /// The supremum of a chain of elements again satisfies membership.
    pub fn closed_under_sup(&self, chain: &[PTreeVal], fuel: &mut Fuel) -> Result<bool, CpoError> {
        let s = self.tree_sup(chain);
        Ok(self.handle.check_membership(&s, self.depth, fuel).is_ok()
            && chain.iter().map(|t| self.tree_leq(t, &s, fuel)).collect::<Result<Vec<_>, _>>()?.into_iter().all(|b| b))
    }

    /// `unfold d (⊔ zₖ) = ⊔ unfold d zₖ` on paths up to the depth.
    pub fn unfold_continuous(&self, d: &Coalgebra, seeds: &Cpo, chain: &[PVal], fuel: &mut Fuel) -> Result<bool, CpoError> {
        let mut padded = chain.to_vec();
        padded.push(chain.last().cloned().unwrap_or(PVal::Undefined));
        let z = seeds.sup_of(&padded, fuel)?.value;
        let lhs = self.handle.unfold(d, &z);
        let trees: Vec<PTreeVal> = chain.iter().map(|z| self.handle.unfold(d, z)).collect();
        let rhs = self.tree_sup(&trees);
        Ok(self.tree_leq(&lhs, &rhs, fuel)? && self.tree_leq(&rhs, &lhs, fuel)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorial_at_five() {
        let mut fuel = Fuel::new(1_000_000);
        let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
        let fact = lfp(&cpo, &*factorial_functional(), 32, &mut fuel).unwrap();
        assert_eq!(fact.value.apply(&PVal::nat(5), &mut fuel).unwrap(), PVal::nat(120));
    }

    #[test]
    fn undefined_prefix_then_constant() {
        let mut fuel = Fuel::default();
        let ch = PartialChain::from_vec(vec![PVal::Undefined, PVal::Undefined, PVal::nat(5)]);
        let s = chain_sup(&flat_cpo(Ty::Nat), &ch, 6, &mut fuel).unwrap();
        assert_eq!(s.value, PVal::nat(5));
        assert_eq!(s.stable_from, Some(2));
    }

    #[test]
    fn growing_prefixes_do_not_stabilize() {
        let mut fuel = Fuel::default();
        let ch = PartialChain::new(|i, _| Ok(encode_path(&vec![PVal::Unit; i as usize])));
        let r = chain_sup(&Cpo::Prefix(Ty::Unit), &ch, 10, &mut fuel);
        assert_eq!(r.unwrap_err(), CpoError::NotStabilized { bound: 10 });
    }
}

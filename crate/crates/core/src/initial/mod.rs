//! Initial algebras of polynomial functors, carved out of a universal type
//! of depth-annotated trees, and list objects over the naturals.

mod list;
pub mod search;
mod tree;

use std::collections::BTreeMap;
use std::sync::Arc;

use thiserror::Error;

use crate::functors::{inject, untag, FunctorError, PolyNF};
use crate::kernel::{logical, Fuel, KernelError, PFun, PVal, PathMap, Ty};

pub use list::{list_cons, list_fold, list_nil, list_to_vec, EncList};
pub use tree::DTreeVal;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InitialError {
    #[error("value is not in the carrier: {0}")]
    NotInCarrier(String),
    #[error("representation invariant violated: {0}")]
    InvariantViolation(String),
    #[error("algebra leaves the subtype: {0}")]
    SubtypeEscape(String),
    #[error("the constants summand {0} is empty, so the carrier is empty")]
    EmptyConstantType(Ty),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

pub type BranchFn = dyn Fn(&PVal, &[PVal], &mut Fuel) -> Result<PVal, InitialError> + Send + Sync;

/// An algebra `b₁, ..., bₙ` for a polynomial normal form: branch `i`
/// receives the parameter `w : Aᵢ` and the `kᵢ` recursive results.
#[derive(Clone)]
pub struct Algebra {
    branches: Vec<Arc<BranchFn>>,
}

impl Algebra {
    pub fn new(branches: Vec<Arc<BranchFn>>) -> Self {
        Algebra { branches }
    }

    /// One branch per summand, all given by a single function of the tag.
    pub fn from_fn(
        n: usize,
        f: impl Fn(usize, &PVal, &[PVal], &mut Fuel) -> Result<PVal, InitialError> + Send + Sync + 'static,
    ) -> Self {
        let f = Arc::new(f);
        let branches = (0..n)
            .map(|i| {
                let f = f.clone();
                Arc::new(move |w: &PVal, xs: &[PVal], fuel: &mut Fuel| f(i, w, xs, fuel)) as Arc<BranchFn>
            })
            .collect();
        Algebra { branches }
    }

    /// Branches read off a structure map `d : F B → B` on encoded values.
    pub fn from_structure_map(
        nf: &PolyNF,
        d: impl Fn(&PVal, &mut Fuel) -> Result<PVal, InitialError> + Send + Sync + 'static,
    ) -> Self {
        let nf = nf.clone();
        Algebra::from_fn(nf.len(), move |i, w, xs, fuel| {
            let v = nf.build(i, w.clone(), xs.to_vec())?;
            d(&v, fuel)
        })
    }

    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn apply(&self, i: usize, w: &PVal, xs: &[PVal], fuel: &mut Fuel) -> Result<PVal, InitialError> {
        let b = self
            .branches
            .get(i)
            .ok_or(FunctorError::TagOutOfRange { tag: i, summands: self.branches.len() })?;
        if !w.is_defined() || xs.iter().any(|x| !x.is_defined()) {
            return Ok(PVal::Undefined);
        }
        b(w, xs, fuel)
    }

    /// The structure map `F B → B` on encoded values.
    pub fn apply_encoded(&self, nf: &PolyNF, v: &PVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        if !v.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, w, xs) = nf.split(v)?;
        self.apply(i, &w, &xs, fuel)
    }
}

fn is_empty_type(t: &Ty) -> bool {
    match t {
        Ty::Zero => true,
        Ty::Sum(a, b) => is_empty_type(a) && is_empty_type(b),
        Ty::Prod(a, b) => is_empty_type(a) || is_empty_type(b),
        _ => false,
    }
}

/// The constructed initial algebra of a polynomial normal form.
#[derive(Clone, Debug)]
pub struct InitialAlgebra {
    nf: PolyNF,
}

/// Builds the handle. An empty constants summand is not an error here;
/// see [`InitialAlgebra::check_constants`].
pub fn build_initial(nf: &PolyNF) -> Result<InitialAlgebra, InitialError> {
    if nf.is_empty() || nf.arity(0) != 0 || nf.summands.iter().skip(1).any(|(_, k)| *k == 0) {
        return Err(InitialError::InvariantViolation(format!("{nf} is not in collected-constants form")));
    }
    Ok(InitialAlgebra { nf: nf.clone() })
}

impl InitialAlgebra {
    pub fn nf(&self) -> &PolyNF {
        &self.nf
    }

    pub fn summands(&self) -> usize {
        self.nf.len()
    }

    /// `EmptyConstantType` when no tree can be built.
    pub fn check_constants(&self) -> Result<(), InitialError> {
        let a1 = &self.nf.summands[0].0;
        if is_empty_type(a1) {
            Err(InitialError::EmptyConstantType(a1.clone()))
        } else {
            Ok(())
        }
    }

    pub fn carrier_is_empty(&self) -> bool {
        self.check_constants().is_err()
    }

    fn label(&self, i: usize, leaf: Option<PVal>) -> PVal {
        let z = match leaf {
            Some(y) => PVal::inl(y),
            None => PVal::inr(PVal::Unit),
        };
        inject(i, self.nf.len(), z)
    }

    /// `cᵢ (y, t₁, ..., t_kᵢ)`.
    pub fn construct(&self, i: usize, y: &PVal, children: &[DTreeVal]) -> Result<DTreeVal, InitialError> {
        let n = self.nf.len();
        let (_, k) = self.nf.summands.get(i).ok_or(FunctorError::TagOutOfRange { tag: i, summands: n })?;
        if children.len() != *k {
            return Err(FunctorError::BadEncoding(format!("constructor {i} takes {k} subtrees, got {}", children.len()))
                .into());
        }
        if !y.is_defined() {
            return Err(InitialError::InvariantViolation("undefined constructor parameter".into()));
        }
        let mut l = PathMap::new();
        let mut d = PathMap::new();
        l.set_exact(vec![], self.label(i, None));
        l.set_cone(vec![0], self.label(i, Some(y.clone())));
        d.set_cone(vec![0], PVal::nat(0));
        let mut max = 0u64;
        for (j, t) in children.iter().enumerate() {
            let j = j as u64 + 1;
            t.l.graft_into(j, &mut l);
            t.d.graft_into(j, &mut d);
            let dj = t.depth().ok_or_else(|| InitialError::NotInCarrier(format!("subtree {j} has no depth")))?;
            max = max.max(dj);
        }
        d.set_exact(vec![], PVal::nat(1 + max));
        let x = match children.first() {
            Some(t) => t.x.clone(),
            None => y.clone(),
        };
        Ok(DTreeVal { l, d, x })
    }

    /// The structure map `α : F T → T` on encoded values whose recursive
    /// positions are trees in kernel form.
    pub fn alpha(&self, v: &PVal) -> Result<PVal, InitialError> {
        if !v.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, y, xs) = self.nf.split(v)?;
        let children = xs.iter().map(as_tree).collect::<Result<Vec<_>, _>>()?;
        Ok(self.construct(i, &y, &children)?.to_pval())
    }

    /// Root constructor, parameter and subtrees, following the case ladder
    /// of the fold definition; reaching an exceptional branch is an error.
    pub fn decompose(&self, t: &DTreeVal) -> Result<(usize, PVal, Vec<DTreeVal>), InitialError> {
        let n = self.nf.len();
        let root = t.l.get(&[]).ok_or_else(|| InitialError::NotInCarrier("l nil is undefined".into()))?;
        let (i, z) = untag(n, root).map_err(|_| InitialError::NotInCarrier(format!("l nil = {root}")))?;
        match z {
            PVal::Inr(u) if matches!(*u, PVal::Unit) => {}
            _ => return Err(InitialError::NotInCarrier(format!("l nil = {root} is a leaf label"))),
        }
        let slot = t.l.get(&[0]).ok_or_else(|| InitialError::NotInCarrier("l [0] is undefined".into()))?;
        let (i2, z2) = untag(n, slot).map_err(|_| InitialError::NotInCarrier(format!("l [0] = {slot}")))?;
        if i2 != i {
            return Err(InitialError::NotInCarrier(format!("l [0] = {slot} disagrees with constructor {i}")));
        }
        let w = match z2 {
            PVal::Inl(w) => (*w).clone(),
            _ => return Err(InitialError::NotInCarrier(format!("l [0] = {slot} is not a leaf label"))),
        };
        let children = (1..=self.nf.arity(i) as u64).map(|j| t.sel(j)).collect();
        Ok((i, w, children))
    }

    /// `fold b₁ ... bₙ z = f (depth z) z`.
    pub fn fold(&self, alg: &Algebra, t: &DTreeVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        let n = t.depth().ok_or_else(|| InitialError::NotInCarrier("depth is undefined".into()))?;
        self.fold_at(n, alg, t, fuel)
    }

    /// The primitive recursive `f : Nat → T ⇀ B`.
    fn fold_at(&self, n: u64, alg: &Algebra, t: &DTreeVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        fuel.tick()?;
        if n == 0 {
            return Err(InitialError::NotInCarrier("recursion ran below depth 0".into()));
        }
        let (i, w, children) = self.decompose(t)?;
        let results =
            children.iter().map(|c| self.fold_at(n - 1, alg, c, fuel)).collect::<Result<Vec<_>, _>>()?;
        alg.apply(i, &w, &results, fuel)
    }

    /// Fold on a tree in kernel form.
    pub fn fold_value(&self, alg: &Algebra, t: &PVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        if !t.is_defined() {
            return Ok(PVal::Undefined);
        }
        self.fold(alg, &as_tree(t)?, fuel)
    }

    /// The algebra whose structure map is `α` itself.
    pub fn initial_algebra(&self) -> Algebra {
        let me = self.clone();
        Algebra::from_fn(self.nf.len(), move |i, w, xs, _| {
            let children = xs.iter().map(as_tree).collect::<Result<Vec<_>, _>>()?;
            Ok(me.construct(i, w, &children)?.to_pval())
        })
    }

    /// `fold (F α) : T → F T`.
    pub fn lambek_inverse(&self, t: &DTreeVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        let me = self.clone();
        let nf = self.nf.clone();
        let alg = Algebra::from_fn(self.nf.len(), move |i, w, xs, _| {
            // each xs[j] is an element of F T; F α maps it back into T
            let ts = xs.iter().map(|x| me.alpha(x)).collect::<Result<Vec<_>, _>>()?;
            Ok(nf.build(i, w.clone(), ts)?)
        });
        self.fold(&alg, t, fuel)
    }

    /// `case t of cᵢ w xs → branchᵢ w xs`, through the Lambek inverse.
    pub fn case_op(&self, branches: &Algebra, t: &PVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        if !t.is_defined() {
            return Ok(PVal::Undefined);
        }
        let inv = self.lambek_inverse(&as_tree(t)?, fuel)?;
        branches.apply_encoded(&self.nf, &inv, fuel)
    }

    /// The pairing algebra `(α (F π₁ y), body y)` on `T × B`.
    pub fn pairing_algebra(&self, body: &Algebra) -> Algebra {
        let me = self.clone();
        let body = body.clone();
        Algebra::from_fn(self.nf.len(), move |i, w, pairs, fuel| {
            let mut firsts = Vec::with_capacity(pairs.len());
            for p in pairs {
                let (t, _) = p.as_pair().ok_or_else(|| FunctorError::BadEncoding(p.to_string()))?;
                firsts.push(as_tree(t)?);
            }
            let t = me.construct(i, w, &firsts)?.to_pval();
            let b = body.apply(i, w, pairs, fuel)?;
            Ok(PVal::pair(t, b))
        })
    }

    /// The fold `g : T → T × B` of the pairing algebra; `primrec = π₂ ∘ g`.
    pub fn primrec_pair(&self, body: &Algebra, t: &DTreeVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        self.fold(&self.pairing_algebra(body), t, fuel)
    }

    /// Primitive recursion: `f (α x) = body (F (λy. (y, f y)) x)`.
    pub fn primrec(&self, body: &Algebra, t: &DTreeVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
        let g = self.primrec_pair(body, t, fuel)?;
        Ok(g.as_pair().map_or(PVal::Undefined, |(_, b)| b.clone()))
    }

    /// Membership in the least subtype closed under the constructors:
    /// decompose down to the leaves, rebuild, and compare exactly.
    pub fn is_in_t(&self, t: &DTreeVal, max_depth: u64) -> bool {
        self.rebuild(t, max_depth).is_ok_and(|r| r.same(t))
    }

    fn rebuild(&self, t: &DTreeVal, budget: u64) -> Result<DTreeVal, InitialError> {
        let depth = t.depth().ok_or_else(|| InitialError::NotInCarrier("depth is undefined".into()))?;
        if depth == 0 || depth > budget {
            return Err(InitialError::NotInCarrier(format!("depth {depth} out of range")));
        }
        let (i, w, children) = self.decompose(t)?;
        let rebuilt = children.iter().map(|c| self.rebuild(c, depth - 1)).collect::<Result<Vec<_>, _>>()?;
        self.construct(i, &w, &rebuilt)
    }

    /// All trees of depth at most `max_depth`, with constructor parameters
    /// drawn from the enumeration of each (closed) summand type.
    pub fn enumerate_trees(&self, max_depth: usize) -> Result<Vec<DTreeVal>, InitialError> {
        let params = self
            .nf
            .summands
            .iter()
            .map(|(a, _)| a.enumerate())
            .collect::<Result<Vec<_>, _>>()?;
        let mut level: Vec<DTreeVal> = Vec::new();
        for _ in 0..max_depth {
            let mut next = Vec::new();
            for (i, (_, k)) in self.nf.summands.iter().enumerate() {
                for y in &params[i] {
                    for kids in product(&level, *k) {
                        next.push(self.construct(i, y, &kids)?);
                    }
                }
            }
            level = next;
        }
        Ok(level)
    }

    /// Monomorphic copy with type parameters instantiated.
    pub fn instantiate(&self, subst: &BTreeMap<String, Ty>) -> InitialAlgebra {
        InitialAlgebra { nf: self.nf.substitute(subst) }
    }

    /// Relabels every parameter position of type `param` by `f`, as the
    /// fold of `α' ∘ parmap f` into the target handle.
    pub fn param_map(
        &self,
        target: &InitialAlgebra,
        param: &str,
        f: &PFun,
        t: &DTreeVal,
        fuel: &mut Fuel,
    ) -> Result<DTreeVal, InitialError> {
        if target.nf.len() != self.nf.len()
            || target.nf.summands.iter().zip(&self.nf.summands).any(|((_, k1), (_, k2))| k1 != k2)
        {
            return Err(InitialError::InvariantViolation("param_map targets a differently shaped type".into()));
        }
        let tys: Vec<Ty> = self.nf.summands.iter().map(|(a, _)| a.clone()).collect();
        let (target, param, f) = (target.clone(), param.to_string(), f.clone());
        let alg = Algebra::from_fn(self.nf.len(), move |i, w, xs, fuel| {
            let w2 = map_param(&tys[i], &param, &f, w, fuel)?;
            if !w2.is_defined() {
                return Ok(PVal::Undefined);
            }
            let children = xs.iter().map(as_tree).collect::<Result<Vec<_>, _>>()?;
            Ok(target.construct(i, &w2, &children)?.to_pval())
        });
        let v = self.fold(&alg, t, fuel)?;
        as_tree(&v)
    }

    /// Folds an algebra on the subtype `{x : a | φ}` through the lifting to
    /// `1 ⇀ a`, then certifies that the result is defined and satisfies `φ`.
    pub fn subtype_fold(
        &self,
        alg: &Algebra,
        phi: &dyn Fn(&PVal) -> bool,
        t: &DTreeVal,
        fuel: &mut Fuel,
    ) -> Result<PVal, InitialError> {
        let lifted = lift_to_thunks(alg);
        let thunk = self.fold(&lifted, t, fuel)?;
        let v = thunk.apply(&PVal::Unit, fuel)?;
        if !v.is_defined() {
            return Err(InitialError::SubtypeEscape("the lifted fold is undefined".into()));
        }
        if !phi(&v) {
            return Err(InitialError::SubtypeEscape(format!("{v} violates the subtype predicate")));
        }
        Ok(v)
    }
}

/// `d? : F (1 ⇀ a) → (1 ⇀ a)` induced by `d : F a → a`.
fn lift_to_thunks(alg: &Algebra) -> Algebra {
    let alg = alg.clone();
    Algebra::from_fn(alg.len(), move |i, w, thunks, _| {
        let (alg, w, thunks) = (alg.clone(), w.clone(), thunks.to_vec());
        let body = PFun::new(move |_, fuel| {
            let mut xs = Vec::with_capacity(thunks.len());
            for th in &thunks {
                let x = th.apply(&PVal::Unit, fuel)?;
                if !x.is_defined() {
                    return Ok(PVal::Undefined);
                }
                xs.push(x);
            }
            alg.apply(i, &w, &xs, fuel).map_err(|e| match e {
                InitialError::Kernel(k) => k,
                other => KernelError::Host(other.to_string()),
            })
        });
        Ok(PVal::Fun(body.with_domain(Ty::Unit)))
    })
}

/// Structural map of `f` over the positions of type `param` in a value of `ty`.
fn map_param(ty: &Ty, param: &str, f: &PFun, v: &PVal, fuel: &mut Fuel) -> Result<PVal, InitialError> {
    Ok(match (ty, v) {
        (Ty::Named(n), _) if n == param => f.apply(v, fuel)?,
        (Ty::Sum(a, _), PVal::Inl(x)) => PVal::inl(map_param(a, param, f, x, fuel)?),
        (Ty::Sum(_, b), PVal::Inr(x)) => PVal::inr(map_param(b, param, f, x, fuel)?),
        (Ty::Prod(a, b), PVal::Pair(x, y)) => {
            PVal::pair(map_param(a, param, f, x, fuel)?, map_param(b, param, f, y, fuel)?)
        }
        (t, v) if t.mentions(param) && matches!(t, Ty::Total(..) | Ty::Partial(..)) => {
            return Err(InitialError::InvariantViolation(format!("cannot map {param} under {t} in {v}")))
        }
        _ => v.clone(),
    })
}

pub(crate) fn as_tree(v: &PVal) -> Result<DTreeVal, InitialError> {
    DTreeVal::from_pval(v).ok_or_else(|| InitialError::NotInCarrier(format!("{v} is not a tree")))
}

/// All `k`-tuples over `items`.
fn product<T: Clone>(items: &[T], k: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(x.clone());
                    t
                })
            })
            .collect();
    }
    out
}

/// `Q 0 = P 0`, `Q (suc n) = Q n ∧ P (suc n)`, computed by primitive
/// recursion into `Logical` over the constructed naturals, and compared
/// with `∀ m ≤ n. P m` for every `n ≤ bound`.
pub fn induction_via_fold(p: &dyn Fn(u64) -> bool, bound: u64) -> Result<bool, InitialError> {
    let report = induction_table(p, bound)?;
    Ok(report.iter().all(|(_, q, expected)| q == expected))
}

/// Per `n`: `(n, Q n, ∀ m ≤ n. P m)`.
pub fn induction_table(p: &dyn Fn(u64) -> bool, bound: u64) -> Result<Vec<(u64, bool, bool)>, InitialError> {
    let nat = build_initial(&nat_nf())?;
    // P is evaluated in advance so the algebra can be shared across threads
    let table: Arc<Vec<bool>> = Arc::new((0..=bound).map(p).collect());
    let tbl = table.clone();
    let body = Algebra::from_fn(2, move |i, _, pairs, fuel| {
        if i == 0 {
            return Ok(logical(tbl[0]));
        }
        let (t, q) = pairs[0].as_pair().ok_or_else(|| FunctorError::BadEncoding(pairs[0].to_string()))?;
        // a tree of depth m + 1 encodes m, so its successor is its depth
        let succ = as_tree(t)?.depth().unwrap_or(0);
        let p_next = tbl.get(succ as usize).copied().unwrap_or(false);
        let q_holds = q.apply(&PVal::Unit, fuel)?.is_defined();
        Ok(logical(q_holds && p_next))
    });
    let mut fuel = Fuel::new(u64::MAX);
    let mut out = Vec::new();
    let mut t = nat.construct(0, &PVal::Unit, &[])?;
    for n in 0..=bound {
        let q = nat.primrec(&body, &t, &mut fuel)?;
        let q_holds = q.apply(&PVal::Unit, &mut fuel)?.is_defined();
        let expected = table[..=n as usize].iter().all(|b| *b);
        out.push((n, q_holds, expected));
        t = nat.construct(1, &PVal::Unit, &[t])?;
    }
    Ok(out)
}

/// `Q = fold (copair ⊤ id)` at `Logical`: constantly true.
pub fn fold_top_id(t: &DTreeVal) -> Result<bool, InitialError> {
    let nat = build_initial(&nat_nf())?;
    let alg = Algebra::from_fn(2, |i, _, xs, _| Ok(if i == 0 { logical(true) } else { xs[0].clone() }));
    let mut fuel = Fuel::default();
    let q = nat.fold(&alg, t, &mut fuel)?;
    Ok(q.apply(&PVal::Unit, &mut fuel)?.is_defined())
}

/// The normal form `Unit + Unit × X` of the naturals.
pub fn nat_nf() -> PolyNF {
    PolyNF { summands: vec![(Ty::Unit, 0), (Ty::Unit, 1)] }
}

/// `suc^n 0` in the constructed naturals.
pub fn nat_tree(nat: &InitialAlgebra, n: u64) -> Result<DTreeVal, InitialError> {
    let mut t = nat.construct(0, &PVal::Unit, &[])?;
    for _ in 0..n {
        t = nat.construct(1, &PVal::Unit, &[t])?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_has_depth_one_and_node_label() {
        let nat = build_initial(&nat_nf()).unwrap();
        let z = nat.construct(0, &PVal::Unit, &[]).unwrap();
        assert_eq!(z.depth(), Some(1));
        assert_eq!(z.l.get(&[]).unwrap(), &PVal::inl(PVal::inr(PVal::Unit)));
        assert_eq!(z.l.get(&[0, 7, 7]).unwrap(), &PVal::inl(PVal::inl(PVal::Unit)));
        assert!(z.l.get(&[1]).is_none());
        assert_eq!(nat_tree(&nat, 2).unwrap().depth(), Some(3));
    }

    #[test]
    fn undefined_root_label_is_not_in_carrier() {
        let nat = build_initial(&nat_nf()).unwrap();
        let mut t = nat_tree(&nat, 1).unwrap();
        t.l.remove_exact(&[]);
        let alg = Algebra::from_fn(2, |_, _, _, _| Ok(PVal::Unit));
        let err = nat.fold(&alg, &t, &mut Fuel::default()).unwrap_err();
        assert!(matches!(err, InitialError::NotInCarrier(_)));
        assert!(!nat.is_in_t(&t, 10));
    }

    #[test]
    fn nonpolynomial_layout_is_rejected() {
        let bad = PolyNF { summands: vec![(Ty::Unit, 1)] };
        assert!(build_initial(&bad).is_err());
    }
}

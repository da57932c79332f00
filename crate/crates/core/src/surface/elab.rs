use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use crate::final_coalgebra::{build_final, FinalCoalgebra};
use crate::functors::{inject, to_extpoly_nf, to_poly_nf, untag, ExtPolyNF, FunctorError, PolyNF, SigFunctor};
use crate::initial::{build_initial, InitialAlgebra};
use crate::kernel::{PVal, Ty};

use super::ast::{Decl, DeclBody, Expr, Item, TyExpr};
use super::functor_syntax::instance_name;
use super::SurfaceError;

/// Rejects recursive occurrences to the left of an arrow.
pub fn check_positivity(d: &Decl) -> Result<(), SurfaceError> {
    fn walk(d: &Decl, t: &TyExpr, at: &str) -> Result<(), SurfaceError> {
        match t {
            TyExpr::Arrow(a, b) => {
                if a.mentions(&d.name) {
                    return Err(SurfaceError::NegativeOccurrence {
                        decl: d.name.clone(),
                        position: format!("{at}, argument type `{a}` of the function type `{t}`"),
                    });
                }
                walk(d, b, at)
            }
            TyExpr::Prod(a, b) | TyExpr::Sum(a, b) => {
                walk(d, a, at)?;
                walk(d, b, at)
            }
            TyExpr::App(_, args) => args.iter().try_for_each(|a| walk(d, a, at)),
            TyExpr::Name(_) => Ok(()),
        }
    }
    match &d.body {
        DeclBody::Free(ctors) => {
            for c in ctors {
                for (j, a) in c.args.iter().enumerate() {
                    walk(d, a, &format!("constructor {} argument {}", c.name, j + 1))?;
                }
            }
        }
        DeclBody::Co(alts) => {
            for g in alts.iter().flatten() {
                walk(d, &g.ty, &format!("selector {}", g.names.join(", ")))?;
            }
        }
    }
    Ok(())
}

/// What a name in a type expression refers to during extraction.
struct Scope<'a> {
    decl: &'a Decl,
    env: &'a ElabEnv,
    /// Names declared later in the same file.
    pending: &'a BTreeSet<String>,
}

impl Scope<'_> {
    fn is_self(&self, t: &TyExpr) -> Result<bool, SurfaceError> {
        let d = self.decl;
        let unsupported = |detail: String| SurfaceError::UnsupportedTypeFormer { decl: d.name.clone(), detail };
        match t {
            TyExpr::Name(n) if *n == d.name => {
                if d.params.is_empty() {
                    Ok(true)
                } else {
                    Err(unsupported(format!("`{n}` must be applied to its parameters as in `{}`", d.pattern())))
                }
            }
            TyExpr::App(n, _) if *n == d.name => {
                if *t == d.pattern() {
                    Ok(true)
                } else {
                    Err(unsupported(format!("recursive use `{t}` differs from the pattern `{}`", d.pattern())))
                }
            }
            _ => Ok(false),
        }
    }

    fn resolve(&self, t: &TyExpr, vars: &mut BTreeSet<String>) -> Result<Ty, SurfaceError> {
        Ok(match t {
            TyExpr::Name(n) => match n.as_str() {
                "Zero" => Ty::Zero,
                "Unit" => Ty::Unit,
                "Nat" => Ty::Nat,
                "Bool" => Ty::Bool,
                "Logical" => Ty::Logical,
                _ => self.named(n, &[], vars)?,
            },
            TyExpr::App(n, args) => {
                let args = args.iter().map(|a| self.resolve(a, vars)).collect::<Result<Vec<_>, _>>()?;
                self.named(n, &args, vars)?
            }
            TyExpr::Prod(a, b) => Ty::prod(self.resolve(a, vars)?, self.resolve(b, vars)?),
            TyExpr::Sum(a, b) => Ty::sum(self.resolve(a, vars)?, self.resolve(b, vars)?),
            TyExpr::Arrow(a, b) => Ty::total(self.resolve(a, vars)?, self.resolve(b, vars)?),
        })
    }

    fn named(&self, n: &str, args: &[Ty], vars: &mut BTreeSet<String>) -> Result<Ty, SurfaceError> {
        if self.pending.contains(n) {
            return Err(SurfaceError::UnsupportedTypeFormer {
                decl: self.decl.name.clone(),
                detail: format!("`{n}` is declared later; mutual recursion is not supported"),
            });
        }
        if let Some(entry) = self.env.entry(n) {
            let arity = entry.decl().params.len();
            if arity != args.len() {
                return Err(SurfaceError::UnknownType(format!("`{n}` takes {arity} parameters, given {}", args.len())));
            }
            return Ok(Ty::named(instance_name(n, args)));
        }
        if !args.is_empty() {
            return Err(SurfaceError::UnknownType(format!("`{n}` is not a declared type constructor")));
        }
        vars.insert(n.to_string());
        Ok(Ty::named(n))
    }

    fn functor(&self, t: &TyExpr, vars: &mut BTreeSet<String>) -> Result<SigFunctor, SurfaceError> {
        let d = self.decl;
        if self.is_self(t)? {
            return Ok(SigFunctor::Id);
        }
        if !t.mentions(&d.name) {
            return Ok(SigFunctor::Const(self.resolve(t, vars)?));
        }
        match t {
            TyExpr::Prod(a, b) => Ok(SigFunctor::prod(self.functor(a, vars)?, self.functor(b, vars)?)),
            TyExpr::Sum(a, b) => Ok(SigFunctor::sum(self.functor(a, vars)?, self.functor(b, vars)?)),
            TyExpr::Arrow(a, b) if self.is_self(b)? => Ok(SigFunctor::exp(self.resolve(a, vars)?)),
            _ => Err(SurfaceError::UnsupportedTypeFormer {
                decl: d.name.clone(),
                detail: format!("recursive occurrence inside `{t}` is not polynomial"),
            }),
        }
    }
}

fn extract(d: &Decl, env: &ElabEnv, pending: &BTreeSet<String>) -> Result<(SigFunctor, Vec<String>), SurfaceError> {
    check_positivity(d)?;
    let scope = Scope { decl: d, env, pending };
    let mut vars: BTreeSet<String> = d.params.iter().cloned().collect();
    let sig = match &d.body {
        DeclBody::Free(ctors) => SigFunctor::sum_all(
            ctors
                .iter()
                .map(|c| {
                    let parts = c.args.iter().map(|a| scope.functor(a, &mut vars)).collect::<Result<Vec<_>, _>>()?;
                    Ok(SigFunctor::prod_all(parts))
                })
                .collect::<Result<Vec<_>, SurfaceError>>()?,
        ),
        DeclBody::Co(alts) => SigFunctor::sum_all(
            alts.iter()
                .map(|groups| {
                    let mut parts = Vec::new();
                    for g in groups {
                        let f = scope.functor(&g.ty, &mut vars)?;
                        parts.extend(std::iter::repeat(f).take(g.names.len()));
                    }
                    Ok(SigFunctor::prod_all(parts))
                })
                .collect::<Result<Vec<_>, SurfaceError>>()?,
        ),
    };
    let mut order: Vec<String> = d.params.clone();
    order.extend(vars.into_iter().filter(|v| !d.params.contains(v)));
    Ok((sig, order))
}

/// The signature functor `Σᵢ Πⱼ Fᵢⱼ` of a declaration.
pub fn extract_functor(d: &Decl, env: &ElabEnv) -> Result<SigFunctor, SurfaceError> {
    Ok(extract(d, env, &BTreeSet::new())?.0)
}

/// A constructor or a cotype alternative: its name, position and the
/// functors of its argument slots.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Slotted {
    pub name: String,
    pub index: usize,
    pub args: Vec<SigFunctor>,
}

#[derive(Clone, Debug)]
pub struct FreeEntry {
    pub decl: Decl,
    pub sig: SigFunctor,
    pub nf: PolyNF,
    pub handle: InitialAlgebra,
    pub ctors: Vec<Slotted>,
    /// Declared parameters followed by free type variables.
    pub type_vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Selector {
    pub name: String,
    pub alt: usize,
    pub pos: usize,
    pub partial: bool,
    pub functor: SigFunctor,
}

#[derive(Clone, Debug)]
pub struct CoEntry {
    pub decl: Decl,
    pub sig: SigFunctor,
    pub nf: ExtPolyNF,
    pub handle: FinalCoalgebra,
    pub alts: Vec<Slotted>,
    pub selectors: Vec<Selector>,
    pub type_vars: Vec<String>,
}

#[derive(Clone, Debug)]
pub enum TypeEntry {
    Free(FreeEntry),
    Co(CoEntry),
}

fn split_slots(slots: &[Slotted], v: &PVal) -> Result<(usize, Vec<PVal>), FunctorError> {
    let (j, payload) = untag(slots.len(), v)?;
    let k = slots[j].args.len();
    let args = payload
        .untuple(k)
        .ok_or_else(|| FunctorError::BadEncoding(format!("{payload} is not a {k}-tuple")))?;
    Ok((j, args))
}

impl FreeEntry {
    /// Source encoding of constructor `j` applied to `args`.
    pub fn source(&self, j: usize, args: Vec<PVal>) -> PVal {
        inject(j, self.ctors.len(), PVal::tuple(args))
    }

    pub fn split_source(&self, v: &PVal) -> Result<(usize, Vec<PVal>), FunctorError> {
        split_slots(&self.ctors, v)
    }

    pub fn ctor(&self, name: &str) -> Option<&Slotted> {
        self.ctors.iter().find(|c| c.name == name)
    }

    /// The same declaration with its type variables replaced.
    pub fn instantiate(&self, subst: &BTreeMap<String, Ty>) -> FreeEntry {
        let sig = self.sig.substitute(subst);
        let ctors = self
            .ctors
            .iter()
            .map(|c| Slotted { args: c.args.iter().map(|a| a.substitute(subst)).collect(), ..c.clone() })
            .collect();
        FreeEntry {
            decl: self.decl.clone(),
            nf: self.nf.substitute(subst),
            handle: self.handle.instantiate(subst),
            sig,
            ctors,
            type_vars: self.type_vars.iter().filter(|v| !subst.contains_key(*v)).cloned().collect(),
        }
    }
}

impl CoEntry {
    pub fn source(&self, j: usize, args: Vec<PVal>) -> PVal {
        inject(j, self.alts.len(), PVal::tuple(args))
    }

    pub fn split_source(&self, v: &PVal) -> Result<(usize, Vec<PVal>), FunctorError> {
        split_slots(&self.alts, v)
    }

    pub fn instantiate(&self, subst: &BTreeMap<String, Ty>) -> Result<CoEntry, SurfaceError> {
        let sig = self.sig.substitute(subst);
        let nf = to_extpoly_nf(&sig)?;
        let handle = build_final(&nf)?;
        Ok(CoEntry {
            decl: self.decl.clone(),
            alts: self
                .alts
                .iter()
                .map(|c| Slotted { args: c.args.iter().map(|a| a.substitute(subst)).collect(), ..c.clone() })
                .collect(),
            selectors: self
                .selectors
                .iter()
                .map(|s| Selector { functor: s.functor.substitute(subst), ..s.clone() })
                .collect(),
            sig,
            nf,
            handle,
            type_vars: self.type_vars.iter().filter(|v| !subst.contains_key(*v)).cloned().collect(),
        })
    }
}

impl TypeEntry {
    pub fn decl(&self) -> &Decl {
        match self {
            TypeEntry::Free(e) => &e.decl,
            TypeEntry::Co(e) => &e.decl,
        }
    }

    pub fn sig(&self) -> &SigFunctor {
        match self {
            TypeEntry::Free(e) => &e.sig,
            TypeEntry::Co(e) => &e.sig,
        }
    }

    pub fn type_vars(&self) -> &[String] {
        match self {
            TypeEntry::Free(e) => &e.type_vars,
            TypeEntry::Co(e) => &e.type_vars,
        }
    }

    /// The printed normal form.
    pub fn nf_string(&self) -> String {
        match self {
            TypeEntry::Free(e) => e.nf.to_string(),
            TypeEntry::Co(e) => e.nf.to_string(),
        }
    }
}

#[derive(Default, Debug)]
struct Inner {
    order: Vec<String>,
    types: BTreeMap<String, TypeEntry>,
    lets: BTreeMap<String, Expr>,
}

/// Elaborated declarations and definitions; cheap to clone and share.
#[derive(Clone, Default, Debug)]
pub struct ElabEnv {
    inner: Arc<Inner>,
}

fn unsupported_construction(d: &Decl, e: FunctorError) -> SurfaceError {
    match e {
        FunctorError::NotPolynomial(f) | FunctorError::NotExtendedPolynomial(f) => SurfaceError::UnsupportedTypeFormer {
            decl: d.name.clone(),
            detail: format!("signature functor {f} has no constructed {}", if d.is_free() { "initial algebra" } else { "final coalgebra" }),
        },
        e => e.into(),
    }
}

fn build_entry(d: &Decl, env: &ElabEnv, pending: &BTreeSet<String>) -> Result<TypeEntry, SurfaceError> {
    let (sig, type_vars) = extract(d, env, pending)?;
    let scope = Scope { decl: d, env, pending };
    let mut scratch = BTreeSet::new();
    match &d.body {
        DeclBody::Free(ctors) => {
            let nf = to_poly_nf(&sig).map_err(|e| unsupported_construction(d, e))?;
            let handle = build_initial(&nf)?;
            let ctors = ctors
                .iter()
                .enumerate()
                .map(|(index, c)| {
                    let args = c.args.iter().map(|a| scope.functor(a, &mut scratch)).collect::<Result<_, _>>()?;
                    Ok(Slotted { name: c.name.clone(), index, args })
                })
                .collect::<Result<_, SurfaceError>>()?;
            Ok(TypeEntry::Free(FreeEntry { decl: d.clone(), sig, nf, handle, ctors, type_vars }))
        }
        DeclBody::Co(alts) => {
            let nf = to_extpoly_nf(&sig).map_err(|e| unsupported_construction(d, e))?;
            let handle = build_final(&nf)?;
            let mut slots = Vec::new();
            let mut selectors = Vec::new();
            for (alt, groups) in alts.iter().enumerate() {
                let mut args = Vec::new();
                for g in groups {
                    let f = scope.functor(&g.ty, &mut scratch)?;
                    for name in &g.names {
                        selectors.push(Selector {
                            name: name.clone(),
                            alt,
                            pos: args.len(),
                            partial: g.partial,
                            functor: f.clone(),
                        });
                        args.push(f.clone());
                    }
                }
                slots.push(Slotted { name: format!("{}.{alt}", d.name), index: alt, args });
            }
            Ok(TypeEntry::Co(CoEntry { decl: d.clone(), sig, nf, handle, alts: slots, selectors, type_vars }))
        }
    }
}

impl ElabEnv {
    pub fn empty() -> ElabEnv {
        ElabEnv::default()
    }

    /// Declared type names in declaration order.
    pub fn type_names(&self) -> &[String] {
        &self.inner.order
    }

    pub fn entry(&self, name: &str) -> Option<&TypeEntry> {
        self.inner.types.get(name)
    }

    pub fn entries(&self) -> impl Iterator<Item = &TypeEntry> {
        self.inner.order.iter().map(|n| &self.inner.types[n])
    }

    pub fn free(&self, name: &str) -> Option<&FreeEntry> {
        match self.entry(name)? {
            TypeEntry::Free(e) => Some(e),
            TypeEntry::Co(_) => None,
        }
    }

    pub fn cotype(&self, name: &str) -> Option<&CoEntry> {
        match self.entry(name)? {
            TypeEntry::Co(e) => Some(e),
            TypeEntry::Free(_) => None,
        }
    }

    pub fn lets(&self) -> &BTreeMap<String, Expr> {
        &self.inner.lets
    }

    /// `C[t₁, ..., tₙ]`: the entry with its parameters replaced by closed types.
    pub fn instantiate(&self, name: &str, args: &[Ty]) -> Result<TypeEntry, SurfaceError> {
        let entry = self.entry(name).ok_or_else(|| SurfaceError::UnknownType(name.to_string()))?;
        let params = &entry.decl().params;
        if params.len() != args.len() {
            return Err(SurfaceError::UnknownType(format!(
                "`{name}` takes {} parameters, given {}",
                params.len(),
                args.len()
            )));
        }
        if let Some(open) = args.iter().find(|a| !a.is_closed()) {
            return Err(SurfaceError::UnknownType(format!("instantiation with open type {open}")));
        }
        let subst: BTreeMap<String, Ty> = params.iter().cloned().zip(args.iter().cloned()).collect();
        self.instantiate_with(entry, &subst)
    }

    /// Replaces every type variable of the entry by `ty`.
    pub fn instantiate_all(&self, name: &str, ty: &Ty) -> Result<TypeEntry, SurfaceError> {
        let entry = self.entry(name).ok_or_else(|| SurfaceError::UnknownType(name.to_string()))?;
        let subst: BTreeMap<String, Ty> = entry.type_vars().iter().map(|v| (v.clone(), ty.clone())).collect();
        self.instantiate_with(entry, &subst)
    }

    fn instantiate_with(&self, entry: &TypeEntry, subst: &BTreeMap<String, Ty>) -> Result<TypeEntry, SurfaceError> {
        Ok(match entry {
            TypeEntry::Free(e) => TypeEntry::Free(e.instantiate(subst)),
            TypeEntry::Co(e) => TypeEntry::Co(e.instantiate(subst)?),
        })
    }
}

/// Elaborates declarations in order; later ones may use earlier ones.
pub fn elaborate(decls: &[Decl]) -> Result<ElabEnv, SurfaceError> {
    let items: Vec<Item> = decls.iter().cloned().map(Item::Decl).collect();
    elaborate_items(&items)
}

pub fn elaborate_items(items: &[Item]) -> Result<ElabEnv, SurfaceError> {
    let mut inner = Inner::default();
    let mut pending: BTreeSet<String> = items
        .iter()
        .filter_map(|i| match i {
            Item::Decl(d) => Some(d.name.clone()),
            Item::Let { .. } => None,
        })
        .collect();
    let mut seen_values = BTreeSet::new();
    for item in items {
        match item {
            Item::Decl(d) => {
                if inner.types.contains_key(&d.name) {
                    return Err(SurfaceError::Duplicate(d.name.clone()));
                }
                pending.remove(&d.name);
                let env = ElabEnv { inner: Arc::new(std::mem::take(&mut inner)) };
                let entry = build_entry(d, &env, &pending);
                inner = Arc::try_unwrap(env.inner).expect("sole owner");
                let entry = entry?;
                let names: Vec<String> = match &entry {
                    TypeEntry::Free(e) => e.ctors.iter().map(|c| format!("{}.{}", d.name, c.name)).collect(),
                    TypeEntry::Co(e) => e.selectors.iter().map(|s| format!("{}.{}", d.name, s.name)).collect(),
                };
                for n in names {
                    if !seen_values.insert(n.clone()) {
                        return Err(SurfaceError::Duplicate(n));
                    }
                }
                inner.order.push(d.name.clone());
                inner.types.insert(d.name.clone(), entry);
            }
            Item::Let { name, params, body } => {
                if inner.lets.contains_key(name) {
                    return Err(SurfaceError::Duplicate(name.clone()));
                }
                let e = if params.is_empty() { body.clone() } else { Expr::Lam(params.clone(), Box::new(body.clone())) };
                inner.lets.insert(name.clone(), e);
            }
        }
    }
    Ok(ElabEnv { inner: Arc::new(inner) })
}

#[cfg(test)]
mod tests {
    use super::super::parser::parse;
    use super::*;

    fn decl(src: &str) -> Decl {
        parse(src).unwrap().remove(0)
    }

    #[test]
    fn list_functor() {
        let d = decl("free type List a ::= nil | cons(a; List a)");
        let f = extract_functor(&d, &ElabEnv::empty()).unwrap();
        let expect = SigFunctor::sum(
            SigFunctor::Const(Ty::Unit),
            SigFunctor::prod(SigFunctor::Const(Ty::named("a")), SigFunctor::Id),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn proc_functor() {
        let d = decl("cotype Proc ::= (out:? a; next:? Proc) | (spawnl, spawnr: Proc)");
        let f = extract_functor(&d, &ElabEnv::empty()).unwrap();
        let expect = SigFunctor::sum(
            SigFunctor::prod(SigFunctor::Const(Ty::named("a")), SigFunctor::Id),
            SigFunctor::prod(SigFunctor::Id, SigFunctor::Id),
        );
        assert_eq!(f, expect);
    }

    #[test]
    fn negative_occurrences() {
        for src in ["free type L ::= abs(L → L)", "free type L a ::= abs((L a → a) → a)"] {
            let err = check_positivity(&decl(src)).unwrap_err();
            assert!(matches!(err, SurfaceError::NegativeOccurrence { .. }), "{src}: {err}");
        }
        check_positivity(&decl("free type List a ::= nil | cons(a; List a)")).unwrap();
    }

    #[test]
    fn nested_tree_is_unsupported() {
        let env = elaborate(&parse("free type List a ::= nil | cons(a; List a)").unwrap()).unwrap();
        let tree = decl("free type Tree a b ::= leaf a | branch(b → List (Tree a b))");
        let err = extract_functor(&tree, &env).unwrap_err();
        assert!(matches!(err, SurfaceError::UnsupportedTypeFormer { .. }), "{err}");
    }

    #[test]
    fn elaboration_installs_tables() {
        let env = elaborate(&parse("free type Nat ::= 0 | suc Nat\nfree type List a ::= nil | cons(a; List a)").unwrap())
            .unwrap();
        assert_eq!(env.type_names(), ["Nat".to_string(), "List".to_string()]);
        let list = env.free("List").unwrap();
        assert_eq!(list.ctors[1].args, vec![SigFunctor::Const(Ty::named("a")), SigFunctor::Id]);
        let inst = env.instantiate("List", &[Ty::Nat]).unwrap();
        assert_eq!(inst.nf_string(), "[Unit] + [Nat]×X");
        assert!(elaborate(&[]).unwrap().type_names().is_empty());
    }

    #[test]
    fn forward_reference_is_rejected() {
        let ds = parse("free type A ::= a B\nfree type B ::= b").unwrap();
        assert!(matches!(elaborate(&ds), Err(SurfaceError::UnsupportedTypeFormer { .. })));
    }
}

//! A call-by-value interpreter for expressions over an elaborated
//! environment. Trees of a free type `T` are kernel triples whose `l`
//! component is named `data:T`; elements of a cotype `T` are path
//! functions named `codata:T`.

use std::collections::BTreeMap;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::{CheckedSub, One, Zero};

use crate::final_coalgebra::{Coalgebra, PTreeVal};
use crate::functors::{from_nf, to_ext_nf, to_nf, SigFunctor};
use crate::initial::{Algebra, DTreeVal, InitialError};
use crate::kernel::{eq_strong_with, Fuel, KernelError, PFun, PVal};

use super::ast::{Expr, TyExpr};
use super::elab::{CoEntry, ElabEnv, FreeEntry, TypeEntry};
use super::parser::parse_expr;
use super::SurfaceError;

type Scope = BTreeMap<String, PVal>;
type Host = dyn Fn(&[PVal], &mut Fuel) -> Result<PVal, KernelError> + Send + Sync;

const SPECIAL: [&str; 5] = ["fold", "case", "primrec", "unfold", "cocase"];

fn host(e: impl Into<SurfaceError>) -> KernelError {
    e.into().into()
}

fn eval_error(msg: impl Into<String>) -> KernelError {
    KernelError::from(SurfaceError::Eval(msg.into()))
}

/// Marks a kernel tree as belonging to the free type `ty`.
pub fn tag_data(ty: &str, tree: &PVal) -> PVal {
    let Some(mut parts) = tree.untuple(3) else { return tree.clone() };
    let Some(l) = parts[0].as_fun() else { return tree.clone() };
    parts[0] = PVal::Fun(l.clone().named(&format!("data:{ty}")));
    PVal::tuple(parts)
}

pub fn as_data(v: &PVal) -> Option<(String, DTreeVal)> {
    let parts = v.untuple(3)?;
    let ty = parts[0].as_fun()?.name()?.strip_prefix("data:")?.to_string();
    Some((ty, DTreeVal::from_pval(v)?))
}

pub fn tag_codata(ty: &str, v: &PVal) -> PVal {
    match v {
        PVal::Fun(f) => PVal::Fun(f.clone().named(&format!("codata:{ty}"))),
        other => other.clone(),
    }
}

pub fn as_codata(v: &PVal) -> Option<(String, PTreeVal)> {
    let f = v.as_fun()?;
    let ty = f.name()?.strip_prefix("codata:")?.to_string();
    Some((ty, PTreeVal::new(f.clone())))
}

fn partial_app(name: String, n: usize, got: Vec<PVal>, f: Arc<Host>) -> PVal {
    let label = if got.is_empty() { name.clone() } else { format!("{name}/{}", got.len()) };
    PVal::Fun(
        PFun::new(move |x, fuel| {
            let mut args = got.clone();
            args.push(x.clone());
            if args.len() == n {
                f(&args, fuel)
            } else {
                Ok(partial_app(name.clone(), n, args, f.clone()))
            }
        })
        .named(&label),
    )
}

/// A curried host function of `n` arguments; `n = 0` runs it at once.
fn curried(
    name: &str,
    n: usize,
    fuel: &mut Fuel,
    f: impl Fn(&[PVal], &mut Fuel) -> Result<PVal, KernelError> + Send + Sync + 'static,
) -> Result<PVal, KernelError> {
    if n == 0 {
        f(&[], fuel)
    } else {
        Ok(partial_app(name.to_string(), n, Vec::new(), Arc::new(f)))
    }
}

fn apply_all(f: &PVal, args: &[PVal], fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let mut acc = f.clone();
    for a in args {
        acc = acc.apply(a, fuel)?;
    }
    Ok(acc)
}

fn nat_op(name: &str, fuel: &mut Fuel, op: fn(&PVal, &PVal) -> PVal) -> Result<PVal, KernelError> {
    let name2 = name.to_string();
    curried(name, 2, fuel, move |a, _| match (a[0].as_nat(), a[1].as_nat()) {
        (Some(_), Some(_)) => Ok(op(&a[0], &a[1])),
        _ => Err(eval_error(format!("{name2} expects naturals, got {} and {}", a[0], a[1]))),
    })
}

fn nat(v: &PVal) -> Option<BigUint> {
    v.as_nat().cloned()
}

fn builtin(name: &str, fuel: &mut Fuel) -> Option<Result<PVal, KernelError>> {
    Some(match name {
        "plus" => nat_op(name, fuel, |a, b| PVal::Nat(nat(a).unwrap() + nat(b).unwrap())),
        "times" => nat_op(name, fuel, |a, b| PVal::Nat(nat(a).unwrap() * nat(b).unwrap())),
        "minus" => nat_op(name, fuel, |a, b| {
            PVal::Nat(nat(a).unwrap().checked_sub(&nat(b).unwrap()).unwrap_or_else(Zero::zero))
        }),
        "leq" => nat_op(name, fuel, |a, b| PVal::bool(nat(a) <= nat(b))),
        "succ" => curried(name, 1, fuel, |a, _| match a[0].as_nat() {
            Some(n) => Ok(PVal::Nat(n + 1u32)),
            None => Err(eval_error(format!("succ expects a natural, got {}", a[0]))),
        }),
        "pred" => curried(name, 1, fuel, |a, _| match a[0].as_nat() {
            Some(n) if n.is_zero() => Ok(PVal::Undefined),
            Some(n) => Ok(PVal::Nat(n - BigUint::one())),
            None => Err(eval_error(format!("pred expects a natural, got {}", a[0]))),
        }),
        "eq" => curried(name, 2, fuel, |a, fuel| Ok(PVal::bool(eq_strong_with(&a[0], &a[1], 4, fuel)?))),
        "fst" => curried(name, 1, fuel, |a, _| {
            a[0].as_pair().map(|(x, _)| x.clone()).ok_or_else(|| eval_error(format!("fst of non-pair {}", a[0])))
        }),
        "snd" => curried(name, 1, fuel, |a, _| {
            a[0].as_pair().map(|(_, y)| y.clone()).ok_or_else(|| eval_error(format!("snd of non-pair {}", a[0])))
        }),
        "inl" => curried(name, 1, fuel, |a, _| Ok(PVal::inl(a[0].clone()))),
        "inr" => curried(name, 1, fuel, |a, _| Ok(PVal::inr(a[0].clone()))),
        "sumcase" => curried(name, 3, fuel, |a, fuel| match &a[2] {
            PVal::Inl(x) => a[0].apply(x, fuel),
            PVal::Inr(y) => a[1].apply(y, fuel),
            other => Err(eval_error(format!("sumcase on non-sum {other}"))),
        }),
        "true" => Ok(PVal::tt()),
        "false" => Ok(PVal::ff()),
        "bot" => Ok(PVal::Undefined),
        _ => return None,
    })
}

impl ElabEnv {
    /// Parses and evaluates an expression.
    pub fn eval_str(&self, src: &str, fuel: &mut Fuel) -> Result<PVal, SurfaceError> {
        let e = parse_expr(src)?;
        self.eval(&e, fuel)
    }

    pub fn eval(&self, e: &Expr, fuel: &mut Fuel) -> Result<PVal, SurfaceError> {
        eval_in(self, &Scope::new(), e, fuel).map_err(|e| match e {
            SurfaceError::Kernel(KernelError::Host(msg)) => SurfaceError::Eval(msg),
            other => other,
        })
    }

    /// Evaluates and prints with constructor names.
    pub fn eval_show(&self, src: &str, fuel: &mut Fuel) -> Result<String, SurfaceError> {
        let v = self.eval_str(src, fuel)?;
        Ok(show_value(self, &v))
    }

    fn free_types(&self) -> Vec<&FreeEntry> {
        self.entries()
            .filter_map(|e| match e {
                TypeEntry::Free(f) => Some(f),
                TypeEntry::Co(_) => None,
            })
            .collect()
    }

    fn cotypes(&self) -> Vec<&CoEntry> {
        self.entries()
            .filter_map(|e| match e {
                TypeEntry::Co(c) => Some(c),
                TypeEntry::Free(_) => None,
            })
            .collect()
    }

    /// The type a recursion combinator refers to: named by a bracketed
    /// argument, else the unique candidate whose arity fits `nargs`, else
    /// the type of a saturating last argument.
    fn resolve_special(
        &self,
        kind: &str,
        targs: &[TyExpr],
        nargs: usize,
        scrutinee: Option<&PVal>,
    ) -> Result<TypeEntry, SurfaceError> {
        let co = matches!(kind, "unfold" | "cocase");
        if let Some(t) = targs.first() {
            let name = t.head().ok_or_else(|| SurfaceError::UnknownType(t.to_string()))?;
            let entry = self.entry(name).ok_or_else(|| SurfaceError::UnknownType(name.to_string()))?;
            if matches!(entry, TypeEntry::Co(_)) != co {
                return Err(SurfaceError::Ambiguous(format!("{kind}[{name}] needs a {}", if co { "cotype" } else { "free type" })));
            }
            return Ok(entry.clone());
        }
        let arities: Vec<(TypeEntry, usize)> = if co {
            self.cotypes()
                .into_iter()
                .map(|c| (TypeEntry::Co(c.clone()), if kind == "unfold" { 2 } else { c.alts.len() + 1 }))
                .collect()
        } else {
            self.free_types().into_iter().map(|f| (TypeEntry::Free(f.clone()), f.ctors.len() + 1)).collect()
        };
        let exact: Vec<&(TypeEntry, usize)> = arities.iter().filter(|(_, k)| *k == nargs).collect();
        let pick = if exact.is_empty() { arities.iter().filter(|(_, k)| *k > nargs).collect() } else { exact };
        let tag = scrutinee.and_then(|v| as_data(v).map(|(t, _)| t).or_else(|| as_codata(v).map(|(t, _)| t)));
        if pick.len() > 1 {
            if let Some(t) = tag {
                if let Some((e, _)) = pick.iter().find(|(e, k)| e.decl().name == t && *k == nargs) {
                    return Ok(e.clone());
                }
            }
        }
        match pick.as_slice() {
            [(e, _)] => Ok(e.clone()),
            [] => Err(SurfaceError::Unbound(format!("{kind}: no declared type takes {nargs} arguments"))),
            many => {
                let names: Vec<&str> = many.iter().map(|(e, _)| e.decl().name.as_str()).collect();
                Err(SurfaceError::Ambiguous(format!("{kind} could refer to {}; write {kind}[T]", names.join(" or "))))
            }
        }
    }

    /// Constructors, selectors and alternative builders, qualified or not.
    fn value_name(&self, name: &str, fuel: &mut Fuel) -> Option<Result<PVal, KernelError>> {
        let (qual, base) = match name.split_once('.') {
            Some((q, b)) => (Some(q), b),
            None => (None, name),
        };
        let mut hits = Vec::new();
        for e in self.entries() {
            if qual.is_some_and(|q| q != e.decl().name) {
                continue;
            }
            match e {
                TypeEntry::Free(f) => {
                    if let Some(c) = f.ctor(base) {
                        hits.push((e, c.index, 'c'));
                    }
                }
                TypeEntry::Co(c) => {
                    if let Some(k) = c.selectors.iter().position(|s| s.name == base) {
                        hits.push((e, k, 's'));
                    } else if let Some(i) = base.parse::<usize>().ok().filter(|i| qual.is_some() && *i < c.alts.len()) {
                        hits.push((e, i, 'a'));
                    }
                }
            }
        }
        match hits.as_slice() {
            [] => None,
            [(TypeEntry::Free(f), j, _)] => Some(ctor_value(f, *j, fuel)),
            [(TypeEntry::Co(c), k, 's')] => Some(selector_value(c, *k, fuel)),
            [(TypeEntry::Co(c), i, _)] => {
                let c = c.clone();
                let i = *i;
                let k = c.alts[i].args.len();
                Some(curried(&c.alts[i].name.clone(), k, fuel, move |a, _| Ok(c.source(i, a.to_vec()))))
            }
            _ => Some(Err(host(SurfaceError::Ambiguous(format!("{name} is declared in several types"))))),
        }
    }

    /// The declared type used by list literals: two constructors, one
    /// nullary and one taking an element and a tail.
    fn list_type(&self) -> Result<&FreeEntry, SurfaceError> {
        let shaped: Vec<&FreeEntry> = self
            .free_types()
            .into_iter()
            .filter(|f| {
                f.ctors.len() == 2
                    && f.ctors[0].args.is_empty()
                    && f.ctors[1].args.len() == 2
                    && matches!(f.ctors[1].args[0], SigFunctor::Const(_))
                    && f.ctors[1].args[1] == SigFunctor::Id
            })
            .collect();
        if let Some(l) = shaped.iter().find(|f| f.decl.name == "List") {
            return Ok(l);
        }
        match shaped.as_slice() {
            [l] => Ok(l),
            [] => Err(SurfaceError::Unbound("list literals need a declared list type".into())),
            _ => Err(SurfaceError::Ambiguous("several list-shaped types; declare one named List".into())),
        }
    }
}

fn ctor_value(f: &FreeEntry, j: usize, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let f = f.clone();
    let k = f.ctors[j].args.len();
    let name = f.ctors[j].name.clone();
    curried(&name, k, fuel, move |args, _| {
        let src = f.source(j, args.to_vec());
        let v = to_nf(&f.sig, &f.nf, &src).map_err(host)?;
        let t = f.handle.alpha(&v).map_err(host)?;
        Ok(tag_data(&f.decl.name, &t))
    })
}

/// Re-tags the cotype positions of a selector result.
fn retag(ty: &str, f: &SigFunctor, v: &PVal) -> PVal {
    match (f, v) {
        (_, PVal::Undefined) => PVal::Undefined,
        (SigFunctor::Id, v) => tag_codata(ty, v),
        (SigFunctor::ExpConst(..), PVal::Fun(g)) => {
            let (ty, g) = (ty.to_string(), g.clone());
            PVal::Fun(PFun::new(move |y, fuel| Ok(tag_codata(&ty, &g.apply(y, fuel)?))))
        }
        (SigFunctor::Prod(a, b), PVal::Pair(x, y)) => PVal::pair(retag(ty, a, x), retag(ty, b, y)),
        (SigFunctor::Sum(a, _), PVal::Inl(x)) => PVal::inl(retag(ty, a, x)),
        (SigFunctor::Sum(_, b), PVal::Inr(y)) => PVal::inr(retag(ty, b, y)),
        (_, v) => v.clone(),
    }
}

fn selector_value(c: &CoEntry, k: usize, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let c = c.clone();
    let sel = c.selectors[k].clone();
    curried(&sel.name.clone(), 1, fuel, move |args, fuel| {
        let t = PTreeVal::from_pval(&args[0]).ok_or_else(|| eval_error(format!("{} of non-process {}", sel.name, args[0])))?;
        let src = c.handle.source_view(&c.sig, &t, fuel).map_err(host)?;
        if !src.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (alt, xs) = c.split_source(&src).map_err(host)?;
        if alt != sel.alt {
            return Ok(PVal::Undefined);
        }
        Ok(retag(&c.decl.name, &sel.functor, &xs[sel.pos]))
    })
}

fn to_tree(ty: &str, v: &PVal) -> Result<DTreeVal, KernelError> {
    DTreeVal::from_pval(v).ok_or_else(|| eval_error(format!("expected a {ty} tree, got {v}")))
}

fn fold_value(f: &FreeEntry, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let f = f.clone();
    let n = f.ctors.len();
    curried(&format!("fold[{}]", f.decl.name), n + 1, fuel, move |args, fuel| {
        let bs = args[..n].to_vec();
        let g = f.clone();
        let alg = Algebra::from_structure_map(&f.nf, move |v, fuel| {
            let src = from_nf(&g.sig, &g.nf, v)?;
            let (j, xs) = g.split_source(&src)?;
            Ok(apply_all(&bs[j], &xs, fuel)?)
        });
        let t = to_tree(&f.decl.name, &args[n])?;
        f.handle.fold(&alg, &t, fuel).map_err(host)
    })
}

fn case_value(f: &FreeEntry, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let f = f.clone();
    let n = f.ctors.len();
    curried(&format!("case[{}]", f.decl.name), n + 1, fuel, move |args, fuel| {
        let t = to_tree(&f.decl.name, &args[n])?;
        let (i, w, children) = f.handle.decompose(&t).map_err(host)?;
        let kids = children.iter().map(|c| tag_data(&f.decl.name, &c.to_pval())).collect();
        let v = f.nf.build(i, w, kids).map_err(host)?;
        let src = from_nf(&f.sig, &f.nf, &v).map_err(host)?;
        let (j, xs) = f.split_source(&src).map_err(host)?;
        apply_all(&args[j], &xs, fuel)
    })
}

fn primrec_value(f: &FreeEntry, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let f = f.clone();
    let n = f.ctors.len();
    curried(&format!("primrec[{}]", f.decl.name), n + 1, fuel, move |args, fuel| {
        let bs = args[..n].to_vec();
        let g = f.clone();
        let body = Algebra::from_fn(f.nf.len(), move |i, w, pairs, fuel| {
            let pairs = pairs
                .iter()
                .map(|p| match p.as_pair() {
                    Some((t, r)) => PVal::pair(tag_data(&g.decl.name, t), r.clone()),
                    None => p.clone(),
                })
                .collect();
            let v = g.nf.build(i, w.clone(), pairs)?;
            let src = from_nf(&g.sig, &g.nf, &v)?;
            let (j, xs) = g.split_source(&src)?;
            apply_all(&bs[j], &xs, fuel).map_err(InitialError::from)
        });
        let t = to_tree(&f.decl.name, &args[n])?;
        f.handle.primrec(&body, &t, fuel).map_err(host)
    })
}

fn unfold_value(c: &CoEntry, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let c = c.clone();
    curried(&format!("unfold[{}]", c.decl.name), 2, fuel, move |args, _| {
        let (step, g) = (args[0].clone(), c.clone());
        let d = Coalgebra::new(move |z, fuel| {
            let s = step.apply(z, fuel)?;
            Ok(to_ext_nf(&g.sig, &g.nf, &s)?)
        });
        let t = c.handle.unfold(&d, &args[1]);
        Ok(tag_codata(&c.decl.name, &t.to_pval()))
    })
}

fn cocase_value(c: &CoEntry, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    let c = c.clone();
    let n = c.alts.len();
    curried(&format!("cocase[{}]", c.decl.name), n + 1, fuel, move |args, fuel| {
        let t = PTreeVal::from_pval(&args[n]).ok_or_else(|| eval_error(format!("cocase of non-process {}", args[n])))?;
        let src = c.handle.source_view(&c.sig, &t, fuel).map_err(host)?;
        if !src.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (alt, _) = c.split_source(&src).map_err(host)?;
        let mut chosen = PVal::Undefined;
        for (j, b) in args[..n].iter().enumerate() {
            let r = b.apply(&args[n], fuel)?;
            if r.is_defined() != (j == alt) {
                return Err(eval_error(format!(
                    "cocase branch {} is {} on an element of alternative {}",
                    j + 1,
                    if r.is_defined() { "defined" } else { "undefined" },
                    alt + 1
                )));
            }
            if j == alt {
                chosen = r;
            }
        }
        Ok(chosen)
    })
}

fn special_value(entry: &TypeEntry, kind: &str, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    match (entry, kind) {
        (TypeEntry::Free(f), "fold") => fold_value(f, fuel),
        (TypeEntry::Free(f), "case") => case_value(f, fuel),
        (TypeEntry::Free(f), "primrec") => primrec_value(f, fuel),
        (TypeEntry::Co(c), "unfold") => unfold_value(c, fuel),
        (TypeEntry::Co(c), "cocase") => cocase_value(c, fuel),
        _ => Err(eval_error(format!("{kind} does not apply to {}", entry.decl().name))),
    }
}

fn shadowed(env: &ElabEnv, scope: &Scope, name: &str) -> bool {
    scope.contains_key(name) || env.lets().contains_key(name)
}

fn lookup(env: &ElabEnv, scope: &Scope, name: &str, targs: &[TyExpr], fuel: &mut Fuel) -> Result<PVal, SurfaceError> {
    if let Some(v) = scope.get(name) {
        return Ok(v.clone());
    }
    if let Some(e) = env.lets().get(name) {
        return eval_in(env, &Scope::new(), e, fuel);
    }
    if SPECIAL.contains(&name) {
        let entry = env.resolve_special(name, targs, usize::MAX, None)?;
        return Ok(special_value(&entry, name, fuel)?);
    }
    if let Some(v) = env.value_name(name, fuel) {
        return Ok(v?);
    }
    match builtin(name, fuel) {
        Some(v) => Ok(v?),
        None => Err(SurfaceError::Unbound(name.to_string())),
    }
}

fn closure(env: &ElabEnv, scope: Scope, xs: &[String], body: &Expr) -> PVal {
    let (env, xs, body) = (env.clone(), xs.to_vec(), body.clone());
    PVal::Fun(PFun::new(move |arg, fuel| {
        let mut s = scope.clone();
        s.insert(xs[0].clone(), arg.clone());
        if xs.len() == 1 {
            Ok(eval_in(&env, &s, &body, fuel)?)
        } else {
            Ok(closure(&env, s, &xs[1..], &body))
        }
    }))
}

fn eval_in(env: &ElabEnv, scope: &Scope, e: &Expr, fuel: &mut Fuel) -> Result<PVal, SurfaceError> {
    fuel.tick()?;
    match e {
        Expr::Num(n) => Ok(PVal::nat(*n)),
        Expr::Unit => Ok(PVal::Unit),
        Expr::Var(name, targs) => lookup(env, scope, name, targs, fuel),
        Expr::Pair(a, b) => Ok(PVal::pair(eval_in(env, scope, a, fuel)?, eval_in(env, scope, b, fuel)?)),
        Expr::Lam(xs, body) => Ok(closure(env, scope.clone(), xs, body)),
        Expr::List(items) => {
            let l = env.list_type()?;
            let mut acc = ctor_value(l, 0, fuel)?;
            let cons = ctor_value(l, 1, fuel)?;
            for item in items.iter().rev() {
                let x = eval_in(env, scope, item, fuel)?;
                acc = apply_all(&cons, &[x, acc], fuel)?;
            }
            Ok(acc)
        }
        Expr::App(..) => {
            let (head, args) = e.spine();
            if let Expr::Var(name, targs) = head {
                if name == "if" && args.len() == 3 && !shadowed(env, scope, name) {
                    let c = eval_in(env, scope, args[0], fuel)?;
                    return match c.as_bool() {
                        Some(true) => eval_in(env, scope, args[1], fuel),
                        Some(false) => eval_in(env, scope, args[2], fuel),
                        None if !c.is_defined() => Ok(PVal::Undefined),
                        None => Err(SurfaceError::Eval(format!("if on non-boolean {c}"))),
                    };
                }
                if SPECIAL.contains(&name.as_str()) && !shadowed(env, scope, name) {
                    let vals = args.iter().map(|a| eval_in(env, scope, a, fuel)).collect::<Result<Vec<_>, _>>()?;
                    let entry = env.resolve_special(name, targs, args.len(), vals.last())?;
                    let f = special_value(&entry, name, fuel)?;
                    return Ok(apply_all(&f, &vals, fuel)?);
                }
            }
            let f = eval_in(env, scope, head, fuel)?;
            let vals = args.iter().map(|a| eval_in(env, scope, a, fuel)).collect::<Result<Vec<_>, _>>()?;
            Ok(apply_all(&f, &vals, fuel)?)
        }
    }
}

/// Prints a value, with trees as constructor terms.
pub fn show_value(env: &ElabEnv, v: &PVal) -> String {
    let mut fuel = Fuel::new(1_000_000);
    show(env, v, &mut fuel)
}

fn show(env: &ElabEnv, v: &PVal, fuel: &mut Fuel) -> String {
    if let Some((ty, t)) = as_data(v) {
        if let Some(f) = env.free(&ty) {
            if let Some(s) = show_tree(env, f, &t, fuel) {
                return s;
            }
        }
    }
    if let Some((ty, _)) = as_codata(v) {
        return format!("<{ty}>");
    }
    match v {
        PVal::Pair(a, b) => format!("({}, {})", show(env, a, fuel), show(env, b, fuel)),
        PVal::Inl(a) if !matches!(**a, PVal::Unit) => format!("inl {}", show_atomic(env, a, fuel)),
        PVal::Inr(a) if !matches!(**a, PVal::Unit) => format!("inr {}", show_atomic(env, a, fuel)),
        other => other.to_string(),
    }
}

fn show_atomic(env: &ElabEnv, v: &PVal, fuel: &mut Fuel) -> String {
    let s = show(env, v, fuel);
    if s.contains(' ') && !s.starts_with('(') {
        format!("({s})")
    } else {
        s
    }
}

fn show_tree(env: &ElabEnv, f: &FreeEntry, t: &DTreeVal, fuel: &mut Fuel) -> Option<String> {
    let (i, w, children) = f.handle.decompose(t).ok()?;
    let kids = children.iter().map(|c| tag_data(&f.decl.name, &c.to_pval())).collect();
    let v = f.nf.build(i, w, kids).ok()?;
    let src = from_nf(&f.sig, &f.nf, &v).ok()?;
    let (j, xs) = f.split_source(&src).ok()?;
    let name = &f.ctors[j].name;
    if xs.is_empty() {
        return Some(name.clone());
    }
    let args: Vec<String> = xs.iter().map(|x| show(env, x, fuel)).collect();
    Some(format!("{name}({})", args.join("; ")))
}

#[cfg(test)]
mod tests {
    use super::super::{elaborate_items, parse_items};
    use super::*;

    const NAT_LIST: &str = "free type Nat ::= 0 | suc Nat\nfree type List a ::= nil | cons(a; List a)";

    fn env(src: &str) -> ElabEnv {
        elaborate_items(&parse_items(src).unwrap()).unwrap()
    }

    #[test]
    fn fold_sums_a_list_literal() {
        let e = env(NAT_LIST);
        let v = e.eval_str("fold 0 plus [1,2,3]", &mut Fuel::new(100_000)).unwrap();
        assert_eq!(v, PVal::nat(6));
    }

    #[test]
    fn constructors_print_by_name() {
        let e = env(NAT_LIST);
        let s = e.eval_show("cons 1 (cons 2 nil)", &mut Fuel::new(100_000)).unwrap();
        assert_eq!(s, "cons(1; cons(2; nil))");
        let s = e.eval_show("suc (suc Nat.0)", &mut Fuel::new(100_000)).unwrap();
        assert_eq!(s, "suc(suc(0))");
    }

    #[test]
    fn case_and_primrec() {
        let e = env(NAT_LIST);
        let mut fuel = Fuel::new(1_000_000);
        assert_eq!(e.eval_str("case[List] 0 (\\x xs -> x) [7, 8]", &mut fuel).unwrap(), PVal::nat(7));
        // length by primitive recursion: the tail comes paired with its length
        let len = e.eval_str("primrec[List] 0 (\\x p -> succ (snd p)) [4, 5, 6]", &mut fuel).unwrap();
        assert_eq!(len, PVal::nat(3));
        let pred = e.eval_show("primrec[Nat] Nat.0 fst (suc (suc Nat.0))", &mut fuel).unwrap();
        assert_eq!(pred, "suc(0)");
    }

    #[test]
    fn unsaturated_fold_needs_annotation() {
        let e = env("free type A ::= a | b(A)\nfree type B ::= c | d(B)");
        let err = e.eval_str("fold 0 succ", &mut Fuel::new(1000)).unwrap_err();
        assert!(matches!(err, SurfaceError::Ambiguous(_)), "{err}");
        assert_eq!(e.eval_str("fold[A] 0 succ", &mut Fuel::new(1000)).unwrap().is_defined(), true);
        assert_eq!(e.eval_str("fold 0 succ (d (d (d c)))", &mut Fuel::new(10_000)).unwrap(), PVal::nat(3));
    }

    #[test]
    fn unfold_and_selectors() {
        let e = env("cotype Stream ::= (hd: Nat; tl: Stream)\nlet nats = unfold (\\n -> (n, succ n)) 0");
        let mut fuel = Fuel::new(100_000);
        assert_eq!(e.eval_str("hd (tl (tl (tl nats)))", &mut fuel).unwrap(), PVal::nat(3));
        assert_eq!(e.eval_show("tl nats", &mut fuel).unwrap(), "<Stream>");
    }

    #[test]
    fn proc_selectors_are_partial() {
        let e = env(
            "cotype Proc ::= (out:? a; next:? Proc) | (spawnl, spawnr: Proc)\n\
             let p = unfold (\\n -> if (leq n 0) (inr (n, n)) (inl (n, pred n))) 2",
        );
        let mut fuel = Fuel::new(100_000);
        assert_eq!(e.eval_str("out p", &mut fuel).unwrap(), PVal::nat(2));
        assert!(!e.eval_str("spawnl p", &mut fuel).unwrap().is_defined());
        assert!(!e.eval_str("out (next (next p))", &mut fuel).unwrap().is_defined());
        assert!(e.eval_str("spawnr (next (next p))", &mut fuel).unwrap().is_defined());
        assert_eq!(e.eval_str("cocase out (\\q -> snd (spawnl q, 5)) p", &mut fuel).unwrap(), PVal::nat(2));
        let err = e.eval_str("cocase out (\\q -> 5) p", &mut fuel).unwrap_err();
        assert!(matches!(err, SurfaceError::Eval(_)), "{err}");
    }

    #[test]
    fn recursive_lets() {
        let e = env("let fact n = if (leq n 0) 1 (times n (fact (minus n 1)))");
        assert_eq!(e.eval_str("fact 5", &mut Fuel::new(100_000)).unwrap(), PVal::nat(120));
    }
}

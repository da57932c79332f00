//! Checks of the constructed initial algebras: the fold equation, fold
//! uniqueness, Lambek's lemma and primitive recursion on bounded tree
//! sets, plus the list object, the coproduct encoding and induction.

use crate::functors::{encode_sum_as_triple, decode_triple, sumcase, triple_case, FunctorError, PolyNF};
use crate::initial::search::{enumerate_algebras, FiniteAlgebra, TreeIndex};
use crate::initial::{
    build_initial, induction_table, list_cons, list_fold, list_nil, list_to_vec, nat_nf, nat_tree, Algebra,
    DTreeVal, InitialAlgebra, InitialError,
};
use crate::kernel::{eq_strong, Fuel, PVal, Ty};
use crate::surface::{ElabEnv, TypeEntry};

use super::{err, run, CheckConfig, CheckResult, Outcome};

/// Exhaustive enumeration of algebras up to this many per carrier size;
/// above it a seeded sample is drawn.
const ALGEBRA_LIMIT: u128 = 2187;
/// The same bound for the fold equation, which evaluates in the kernel.
const EQUATION_ALGEBRA_LIMIT: u128 = 64;
const ALGEBRA_SAMPLES: usize = 12;
const BRUTE_FORCE_LIMIT: u128 = 1 << 20;

/// How a tree of the set was built.
#[derive(Clone, Debug)]
pub struct TreeNode {
    pub ctor: usize,
    pub param: PVal,
    /// Indices of the subtrees in the set.
    pub kids: Vec<usize>,
    pub depth: u64,
}

/// Every tree up to a depth, each once, in depth order, with its
/// construction recorded alongside.
#[derive(Clone, Debug)]
pub struct TreeSet {
    pub trees: Vec<DTreeVal>,
    pub nodes: Vec<TreeNode>,
}

fn tuples(items: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|t| {
                items.iter().map(move |x| {
                    let mut t = t.clone();
                    t.push(*x);
                    t
                })
            })
            .collect();
    }
    out
}

pub fn tree_set(handle: &InitialAlgebra, max_depth: usize) -> Result<TreeSet, InitialError> {
    let params = handle.nf().summands.iter().map(|(a, _)| a.enumerate()).collect::<Result<Vec<_>, _>>()?;
    let mut set = TreeSet { trees: Vec::new(), nodes: Vec::new() };
    for depth in 1..=max_depth as u64 {
        let below: Vec<usize> = (0..set.nodes.len()).collect();
        let mut fresh = Vec::new();
        for (i, (_, k)) in handle.nf().summands.iter().enumerate() {
            for kids in tuples(&below, *k) {
                // exactly one level deeper than the deepest subtree
                let d = 1 + kids.iter().map(|c| set.nodes[*c].depth).max().unwrap_or(0);
                if d != depth {
                    continue;
                }
                let children: Vec<DTreeVal> = kids.iter().map(|c| set.trees[*c].clone()).collect();
                for y in &params[i] {
                    let t = handle.construct(i, y, &children)?;
                    fresh.push((t, TreeNode { ctor: i, param: y.clone(), kids: kids.clone(), depth }));
                }
            }
        }
        for (t, n) in fresh {
            set.trees.push(t);
            set.nodes.push(n);
        }
    }
    Ok(set)
}

/// `c(d) = Σᵢ |Aᵢ| · c(d - 1)^kᵢ`, the number of trees of depth at most `d`.
fn tree_count(nf: &PolyNF, max_depth: usize) -> Option<u128> {
    let sizes: Vec<u128> =
        nf.summands.iter().map(|(a, _)| a.cardinality().and_then(|c| c.finite())).collect::<Option<_>>()?;
    let mut c = 0u128;
    for _ in 0..max_depth {
        let mut next = 0u128;
        for ((_, k), s) in nf.summands.iter().zip(&sizes) {
            next = next.checked_add(s.checked_mul(c.checked_pow(*k as u32)?)?)?;
        }
        c = next;
    }
    Some(c)
}

fn algebras(nf: &PolyNF, limit: u128, seed: u64) -> Result<(Vec<FiniteAlgebra>, String), InitialError> {
    let mut all = Vec::new();
    let mut how = Vec::new();
    for size in 1..=3 {
        let (algs, exhaustive) = enumerate_algebras(nf, size, limit, ALGEBRA_SAMPLES, seed + size as u64)?;
        how.push(format!("{} on {size} ({})", algs.len(), if exhaustive { "all" } else { "sampled" }));
        all.extend(algs);
    }
    Ok((all, how.join(", ")))
}

fn show_alg(a: &FiniteAlgebra) -> String {
    format!("algebra on {} points with tables {:?}", a.size, a.tables())
}

/// Oracle for the fold into a finite algebra: the algebra applied along the
/// recorded construction of each tree.
fn oracle_fold(set: &TreeSet, alg: &FiniteAlgebra) -> Vec<Option<usize>> {
    let mut vals: Vec<Option<usize>> = Vec::with_capacity(set.nodes.len());
    for n in &set.nodes {
        let xs: Option<Vec<usize>> = n.kids.iter().map(|k| vals[*k]).collect();
        vals.push(xs.and_then(|xs| alg.eval(n.ctor, &n.param, &xs)));
    }
    vals
}

/// `cᵢ (w, ts)` as an encoded element of `F T`.
fn layer(handle: &InitialAlgebra, set: &TreeSet, t: usize) -> Result<PVal, FunctorError> {
    let n = &set.nodes[t];
    handle.nf().build(n.ctor, n.param.clone(), n.kids.iter().map(|k| set.trees[*k].to_pval()).collect())
}

/// The per-type suite for one free type; parameters must be closed.
pub fn free_type_checks(name: &str, handle: &InitialAlgebra, cfg: &CheckConfig) -> Vec<CheckResult> {
    let prefix = format!("initial/{name}");
    let set = match tree_set(handle, cfg.obs_depth) {
        Ok(s) => s,
        Err(e) => return vec![CheckResult::skip(format!("{prefix}/trees"), format!("trees cannot be enumerated: {e}"))],
    };
    let empty = handle.carrier_is_empty();
    let vacuous = |what: &str| format!("carrier is empty, so {what} holds vacuously");
    let mut out = Vec::new();

    out.push(run(format!("{prefix}/trees"), || {
        let expected = tree_count(handle.nf(), cfg.obs_depth).ok_or("tree count overflows")?;
        let listed = handle.enumerate_trees(cfg.obs_depth).map_err(err)?.len() as u128;
        if set.trees.len() as u128 != expected || listed != expected {
            return Ok(Err(format!("expected {expected} trees, built {}, enumerated {listed}", set.trees.len())));
        }
        if let Some(t) = set.trees.iter().find(|t| !handle.is_in_t(t, cfg.obs_depth as u64)) {
            return Ok(Err(format!("constructed tree {t} fails membership")));
        }
        Ok(Ok(format!("{expected} trees of depth at most {}", cfg.obs_depth)))
    }));

    let algs = algebras(handle.nf(), ALGEBRA_LIMIT, cfg.seed);
    out.push(run(format!("{prefix}/fold-equation"), || {
        if empty {
            return Ok(Ok(vacuous("the fold equation")));
        }
        let (algs, how) = algebras(handle.nf(), EQUATION_ALGEBRA_LIMIT, cfg.seed).map_err(err)?;
        let nf = handle.nf();
        let layers: Vec<(PVal, PVal)> = (0..set.trees.len())
            .map(|t| {
                let v = layer(handle, &set, t).map_err(err)?;
                let a = handle.alpha(&v).map_err(err)?;
                Ok((v, a))
            })
            .collect::<Result<_, String>>()?;
        for a in &algs {
            let alg = a.to_algebra();
            for (t, (v, av)) in layers.iter().enumerate() {
                let mut fuel = Fuel::new(cfg.fuel);
                let lhs = handle.fold_value(&alg, av, &mut fuel).map_err(err)?;
                let mut inner_fuel = Fuel::new(cfg.fuel);
                let mapped = nf
                    .fmap::<InitialError>(&mut |x| handle.fold_value(&alg, x, &mut inner_fuel), v)
                    .map_err(err)?;
                let rhs = alg.apply_encoded(nf, &mapped, &mut fuel).map_err(err)?;
                if !eq_strong(&lhs, &rhs, 4).map_err(err)? {
                    return Ok(Err(format!(
                        "{}, tree {}: fold after α gives {lhs}, algebra after F fold gives {rhs}",
                        show_alg(a),
                        set.trees[t]
                    )));
                }
            }
        }
        Ok(Ok(format!("{} trees × {} algebras ({how})", set.trees.len(), algs.len())))
    }));

    out.push(run(format!("{prefix}/fold-oracle"), || {
        if empty {
            return Ok(Ok(vacuous("agreement with the recursive oracle")));
        }
        let (algs, _) = algs.clone().map_err(err)?;
        for a in &algs {
            let alg = a.to_algebra();
            let expected = oracle_fold(&set, a);
            for (t, tree) in set.trees.iter().enumerate() {
                let got = handle.fold(&alg, tree, &mut Fuel::new(cfg.fuel)).map_err(err)?;
                if got.as_u64().map(|v| v as usize) != expected[t] {
                    return Ok(Err(format!("{}, tree {tree}: fold gives {got}, oracle {:?}", show_alg(a), expected[t])));
                }
            }
        }
        Ok(Ok(format!("{} algebras", algs.len())))
    }));

    out.push(run(format!("{prefix}/fold-uniqueness"), || {
        if empty {
            return Ok(Ok(vacuous("uniqueness")));
        }
        let (algs, how) = algs.clone().map_err(err)?;
        let index = TreeIndex::new(handle, &set.trees).map_err(err)?;
        for a in &algs {
            let u = index.fold_uniqueness(handle, a, BRUTE_FORCE_LIMIT).map_err(err)?;
            if u.solutions != 1 || !u.agrees_with_fold {
                return Ok(Err(format!(
                    "{}: {} solutions by {:?}, agrees with fold: {}",
                    show_alg(a),
                    u.solutions,
                    u.method,
                    u.agrees_with_fold
                )));
            }
        }
        Ok(Ok(format!("one solution for each of {} algebras ({how})", algs.len())))
    }));

    out.push(run(format!("{prefix}/lambek"), || {
        if empty {
            return Ok(Ok(vacuous("Lambek's lemma")));
        }
        for (t, tree) in set.trees.iter().enumerate() {
            let mut fuel = Fuel::new(cfg.fuel);
            let inv = handle.lambek_inverse(tree, &mut fuel).map_err(err)?;
            let back = handle.alpha(&inv).map_err(err)?;
            if !DTreeVal::from_pval(&back).is_some_and(|b| b.same(tree)) {
                return Ok(Err(format!("α after its inverse moves {tree} to {back}")));
            }
            let node = &set.nodes[t];
            let (i, w, xs) = handle.nf().split(&inv).map_err(err)?;
            let kids_match = xs.len() == node.kids.len()
                && xs.iter().zip(&node.kids).all(|(x, k)| DTreeVal::from_pval(x).is_some_and(|x| x.same(&set.trees[*k])));
            if i != node.ctor || !w.structurally_eq(&node.param) || !kids_match {
                return Ok(Err(format!("the inverse of α after α moves layer {}", layer(handle, &set, t).map_err(err)?)));
            }
        }
        Ok(Ok(format!("both composites are identities on {} trees", set.trees.len())))
    }));

    out.push(run(format!("{prefix}/primrec"), || {
        if empty {
            return Ok(Ok(vacuous("the pairing identity")));
        }
        // body: one more than the largest recursive result, i.e. the depth
        let body = Algebra::from_fn(handle.summands(), |_, _, pairs, _| {
            let mut m = 0;
            for p in pairs {
                let r = p.as_pair().and_then(|(_, r)| r.as_u64());
                m = m.max(r.ok_or_else(|| InitialError::NotInCarrier(format!("{p} is not a pair")))?);
            }
            Ok(PVal::nat(m + 1))
        });
        for (t, tree) in set.trees.iter().enumerate() {
            let g = handle.primrec_pair(&body, tree, &mut Fuel::new(cfg.fuel)).map_err(err)?;
            let (first, second) = g.as_pair().ok_or_else(|| format!("{g} is not a pair"))?;
            if !DTreeVal::from_pval(first).is_some_and(|f| f.same(tree)) {
                return Ok(Err(format!("first projection moves {tree} to {first}")));
            }
            if second.as_u64() != Some(set.nodes[t].depth) {
                return Ok(Err(format!("depth by primitive recursion of {tree} is {second}, built at {}", set.nodes[t].depth)));
            }
        }
        Ok(Ok(format!("first projection is the identity on {} trees", set.trees.len())))
    }));
    out
}

/// Checks every free type of the environment, parameters set to `Bool`,
/// and the built-in constructions.
pub fn initial_suite(env: &ElabEnv, cfg: &CheckConfig) -> Vec<CheckResult> {
    let mut out = Vec::new();
    for name in env.type_names() {
        if !matches!(env.entry(name), Some(TypeEntry::Free(_))) {
            continue;
        }
        match env.instantiate_all(name, &Ty::Bool) {
            Ok(TypeEntry::Free(e)) => out.extend(free_type_checks(name, &e.handle, cfg)),
            Ok(_) => {}
            Err(e) => out.push(CheckResult::skip(format!("initial/{name}"), format!("cannot instantiate: {e}"))),
        }
    }
    out.extend(builtin_initial_checks(cfg));
    out
}

fn list_nf() -> PolyNF {
    PolyNF { summands: vec![(Ty::Unit, 0), (Ty::Bool, 1)] }
}

/// All sequences over `alphabet` of length at most `max_len`, shortest first.
fn sequences<T: Clone>(alphabet: &[T], max_len: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..max_len {
        level = level
            .into_iter()
            .flat_map(|s: Vec<T>| {
                alphabet.iter().map(move |x| {
                    let mut s = s.clone();
                    s.push(x.clone());
                    s
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn predecessor(cfg: &CheckConfig) -> Result<Outcome, String> {
    let nat = build_initial(&nat_nf()).map_err(err)?;
    let zero = nat_tree(&nat, 0).map_err(err)?.to_pval();
    let body = Algebra::from_fn(2, move |i, _, pairs, _| {
        if i == 0 {
            return Ok(zero.clone());
        }
        Ok(pairs[0].as_pair().map_or(PVal::Undefined, |(t, _)| t.clone()))
    });
    for n in 0..=20u64 {
        let t = nat_tree(&nat, n).map_err(err)?;
        let p = nat.primrec(&body, &t, &mut Fuel::new(cfg.fuel)).map_err(err)?;
        let expected = nat_tree(&nat, n.saturating_sub(1)).map_err(err)?;
        let ok = DTreeVal::from_pval(&p).is_some_and(|p| p.same(&expected));
        if !ok {
            return Ok(Err(format!("predecessor of {n} is {p}")));
        }
    }
    Ok(Ok("pred 0 = 0, pred (n + 1) = n for n < 20".into()))
}

fn length(cfg: &CheckConfig) -> Result<Outcome, String> {
    let list = build_initial(&list_nf()).map_err(err)?;
    let body = Algebra::from_fn(2, |i, _, pairs, _| {
        if i == 0 {
            return Ok(PVal::nat(0));
        }
        Ok(pairs[0].as_pair().and_then(|(_, r)| r.as_u64()).map_or(PVal::Undefined, |r| PVal::nat(r + 1)))
    });
    let seqs = sequences(&[false, true], 5);
    for s in &seqs {
        let mut t = list.construct(0, &PVal::Unit, &[]).map_err(err)?;
        for b in s.iter().rev() {
            t = list.construct(1, &PVal::bool(*b), &[t]).map_err(err)?;
        }
        let n = list.primrec(&body, &t, &mut Fuel::new(cfg.fuel)).map_err(err)?;
        if n.as_u64() != Some(s.len() as u64) {
            return Ok(Err(format!("length of {s:?} is {n}")));
        }
    }
    Ok(Ok(format!("{} lists of length at most 5", seqs.len())))
}

fn list_object(cfg: &CheckConfig) -> Result<Outcome, String> {
    let nums = [PVal::nat(0), PVal::nat(1)];
    // f x acc = 3 acc + x + 1 is not commutative, so order errors show up
    let step = |x: &PVal, acc: &PVal, _: &mut Fuel| -> Result<PVal, InitialError> {
        match (x.as_u64(), acc.as_u64()) {
            (Some(x), Some(a)) => Ok(PVal::nat(3 * a + x + 1)),
            _ => Ok(PVal::Undefined),
        }
    };
    let seqs = sequences(&nums, 6);
    for conses in &seqs {
        let mut l = list_nil();
        let mut elems: Vec<PVal> = Vec::new();
        for x in conses {
            l = list_cons(x, &l).map_err(err)?;
            elems.insert(0, x.clone());
            let mut fuel = Fuel::new(cfg.fuel);
            let PVal::Inr(cell) = &l else { return Ok(Err(format!("cons gave {l}"))) };
            let (f, n) = cell.as_pair().ok_or_else(|| format!("{l} is not encoded"))?;
            if n.as_u64() != Some(elems.len() as u64 - 1) {
                return Ok(Err(format!("after {conses:?} the length index is {n}")));
            }
            for m in 0..elems.len() as u64 + 3 {
                let defined = f.apply(&PVal::nat(m), &mut fuel).map_err(err)?.is_defined();
                if defined != (m < elems.len() as u64) {
                    return Ok(Err(format!("after {conses:?}, l {m} definedness is {defined}")));
                }
            }
        }
        let mut fuel = Fuel::new(cfg.fuel);
        let folded = list_fold(&PVal::nat(0), &step, &l, &mut fuel).map_err(err)?;
        let expected = elems.iter().rev().fold(0u64, |acc, x| 3 * acc + x.as_u64().unwrap_or(0) + 1);
        if folded.as_u64() != Some(expected) {
            return Ok(Err(format!("fold over {conses:?} gives {folded}, oracle {expected}")));
        }
        let listed = list_to_vec(&l, &mut fuel).map_err(err)?;
        if listed.len() != elems.len() || listed.iter().zip(&elems).any(|(a, b)| !a.structurally_eq(b)) {
            return Ok(Err(format!("elements of {conses:?} read back as {listed:?}")));
        }
    }
    Ok(Ok(format!("{} constructor sequences of length at most 6", seqs.len())))
}

fn coproduct_encoding(cfg: &CheckConfig) -> Result<Outcome, String> {
    let mut values = Ty::sum(Ty::Bool, Ty::Unit).enumerate().map_err(err)?;
    values.extend(Ty::sum(Ty::Unit, Ty::Unit).enumerate().map_err(err)?);
    values.push(PVal::Undefined);
    type Side = fn(&PVal) -> PVal;
    let lefts: [(&str, Side); 3] = [
        ("const 0", |_| PVal::nat(0)),
        ("negate", |x| x.as_bool().map_or(PVal::nat(7), |b| PVal::bool(!b))),
        ("bottom", |_| PVal::Undefined),
    ];
    let rights: [(&str, Side); 2] = [("const 1", |_| PVal::nat(1)), ("bottom", |_| PVal::Undefined)];
    for v in &values {
        let mut fuel = Fuel::new(cfg.fuel);
        let t = encode_sum_as_triple(v).map_err(err)?;
        let back = decode_triple(&t, &mut fuel).map_err(err)?;
        if !eq_strong(&back, v, 4).map_err(err)? {
            return Ok(Err(format!("{v} round-trips to {back}")));
        }
        if let Some(parts) = t.untuple(3) {
            let x = parts[0].apply(&PVal::Unit, &mut fuel).map_err(err)?.is_defined();
            let y = parts[1].apply(&PVal::Unit, &mut fuel).map_err(err)?.is_defined();
            let z = parts[2].as_bool();
            let left = matches!(v, PVal::Inl(_));
            if (x, y, z) != (left, !left, Some(left)) {
                return Ok(Err(format!("{v} encodes with definedness ({x}, {y}) and flag {z:?}")));
            }
        } else if v.is_defined() {
            return Ok(Err(format!("{v} encodes to {t}")));
        }
        for (ln, f) in &lefts {
            for (rn, g) in &rights {
                let via_triple =
                    triple_case::<InitialError>(&mut |a| Ok(f(a)), &mut |b| Ok(g(b)), &t, &mut fuel).map_err(err)?;
                let direct = sumcase::<FunctorError>(&mut |a| Ok(f(a)), &mut |b| Ok(g(b)), v).map_err(err)?;
                if !eq_strong(&via_triple, &direct, 4).map_err(err)? {
                    return Ok(Err(format!("[{ln}, {rn}] at {v}: {via_triple} through the triple, {direct} directly")));
                }
            }
        }
    }
    Ok(Ok(format!("{} values, 6 copairings", values.len())))
}

fn induction() -> Result<Outcome, String> {
    let preds: [(&str, fn(u64) -> bool); 5] = [
        ("always", |_| true),
        ("below 10", |n| n < 10),
        ("not 2 mod 3", |n| n % 3 != 2),
        ("square below 200", |n| n * n < 200),
        ("not 0", |n| n != 0),
    ];
    for (name, p) in preds {
        let rows = induction_table(&p, 20).map_err(err)?;
        for (n, q, _) in rows {
            let all = (0..=n).all(p);
            if q != all {
                return Ok(Err(format!("{name}: Q({n}) is {q} but the bounded quantifier gives {all}")));
            }
        }
    }
    Ok(Ok("5 predicates up to 20".into()))
}

/// The checks that do not depend on a declaration.
pub fn builtin_initial_checks(cfg: &CheckConfig) -> Vec<CheckResult> {
    vec![
        run("initial/builtin/primrec-pred".into(), || predecessor(cfg)),
        run("initial/builtin/primrec-length".into(), || length(cfg)),
        run("initial/builtin/list-object".into(), || list_object(cfg)),
        run("initial/builtin/coproduct-encoding".into(), || coproduct_encoding(cfg)),
        run("initial/builtin/induction".into(), induction),
    ]
}

//! Checks of the cpo layer: suprema of partial chains, least fixed points,
//! and the ordered versions of the declared datatypes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cpo::{
    bool_is_flat, cfun_cpo, check_minimal, domain_final, domain_initial, factorial_functional, flat_chains, flat_cpo, lfp,
    pfun_cpo, product_cpo, random_partial_maps, sum_cpo, Cpo, EndoFn,
};
use crate::final_coalgebra::FinalCoalgebra;
use crate::initial::{Algebra, DTreeVal, InitialAlgebra};
use crate::kernel::{Fuel, KernelError, PFun, PVal, Ty};
use crate::surface::{ElabEnv, TypeEntry};

use super::coinductive::generic_coalgebra;
use super::inductive::tree_set;
use super::{err, run, CheckConfig, CheckResult, Outcome};

/// Combinations tried per constructor or per chain length.
const CAP: usize = 300;

/// The order a type carries: pointwise on partial maps, componentwise on
/// products and sums, discrete otherwise.
pub fn cpo_of(ty: &Ty) -> Cpo {
    match ty {
        Ty::Prod(a, b) => product_cpo(cpo_of(a), cpo_of(b)),
        Ty::Sum(a, b) => sum_cpo(cpo_of(a), cpo_of(b)),
        Ty::Partial(a, b) => pfun_cpo((**a).clone(), cpo_of(b)),
        Ty::Total(a, b) => cfun_cpo(flat_cpo((**a).clone()), cpo_of(b)),
        other => flat_cpo(other.clone()),
    }
}

fn thunk(v: Option<u64>) -> PVal {
    let f = match v {
        Some(n) => PFun::constant(PVal::nat(n)),
        None => PFun::bottom(),
    };
    PVal::Fun(f.with_domain(Ty::Unit))
}

/// Whether every thunk inside a label is defined.
fn total_label(w: &PVal, fuel: &mut Fuel) -> Result<bool, KernelError> {
    Ok(match w {
        PVal::Fun(f) if f.domain() == Some(&Ty::Unit) => f.apply(&PVal::Unit, fuel)?.is_defined(),
        PVal::Pair(a, b) => total_label(a, fuel)? && total_label(b, fuel)?,
        PVal::Inl(x) | PVal::Inr(x) => total_label(x, fuel)?,
        _ => true,
    })
}

/// Node count into `1 ⇀ Nat`, defined when every label is total.
fn count_algebra(n: usize) -> Algebra {
    Algebra::from_fn(n, |_, w, xs, fuel| {
        if !total_label(w, fuel)? {
            return Ok(thunk(None));
        }
        let mut sum = 1;
        for x in xs {
            match x.apply(&PVal::Unit, fuel)?.as_u64() {
                Some(v) => sum += v,
                None => return Ok(thunk(None)),
            }
        }
        Ok(thunk(Some(sum)))
    })
}

/// Index chains `a ⊑ b (⊑ c)` of the given length under `le`.
fn chains(le: &[Vec<bool>], len: usize) -> Vec<Vec<usize>> {
    let n = le.len();
    let mut out: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    for _ in 1..len {
        out = out
            .into_iter()
            .flat_map(|c| {
                let last = *c.last().expect("nonempty");
                (0..n).filter(move |j| le[last][*j]).map(move |j| {
                    let mut c = c.clone();
                    c.push(j);
                    c
                })
            })
            .collect();
    }
    out
}

fn leq_matrix<T>(
    xs: &[T],
    leq: &mut dyn FnMut(&T, &T) -> Result<bool, String>,
) -> Result<Vec<Vec<bool>>, String> {
    xs.iter().map(|a| xs.iter().map(|b| leq(a, b)).collect()).collect()
}

/// Every combination picking one item per slot, capped.
fn combos<T: Clone>(slots: &[Vec<T>], cap: usize) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for s in slots {
        let mut next = Vec::new();
        'fill: for c in &out {
            for x in s {
                if next.len() >= cap {
                    break 'fill;
                }
                let mut c = c.clone();
                c.push(x.clone());
                next.push(c);
            }
        }
        out = next;
    }
    out
}

/// Monotonicity and continuity of the constructors and of fold for one
/// free type, labels ordered by [`cpo_of`].
pub fn domain_checks(name: &str, handle: &InitialAlgebra, cfg: &CheckConfig) -> Vec<CheckResult> {
    let prefix = format!("cpo/{name}");
    let nf = handle.nf().clone();
    let params: Vec<Cpo> = nf.summands.iter().map(|(a, _)| cpo_of(a)).collect();
    let setup = || -> Result<_, String> {
        let dom = domain_initial(&nf, params.clone()).map_err(err)?;
        let labels: Vec<Vec<PVal>> = nf.summands.iter().map(|(a, _)| a.enumerate().map_err(err)).collect::<Result<_, _>>()?;
        let small = tree_set(handle, 2.min(cfg.obs_depth)).map_err(err)?.trees;
        let big = tree_set(handle, 3.min(cfg.obs_depth)).map_err(err)?.trees;
        let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
        let mut tleq = |s: &DTreeVal, t: &DTreeVal| dom.tree_leq(s, t, &mut fuel).map_err(err);
        let small_le = leq_matrix(&small, &mut tleq)?;
        let big_le = leq_matrix(&big, &mut tleq)?;
        let label_le: Vec<Vec<Vec<bool>>> = labels
            .iter()
            .zip(&params)
            .map(|(ls, c)| {
                let mut fuel = Fuel::new(cfg.fuel);
                leq_matrix(ls, &mut |a, b| c.leq(a, b, &mut fuel).map_err(err))
            })
            .collect::<Result<_, _>>()?;
        Ok((dom, labels, small, big, small_le, big_le, label_le))
    };
    let (dom, labels, small, big, small_le, big_le, label_le) = match setup() {
        Ok(s) => s,
        Err(e) => return vec![CheckResult::skip(prefix, format!("ordered datatype unavailable: {e}"))],
    };
    let empty = handle.carrier_is_empty();
    let vacuous = |what: &str| Ok(Ok(format!("carrier is empty, so {what} holds vacuously")));
    let cod = pfun_cpo(Ty::Unit, flat_cpo(Ty::Nat));
    let alg = count_algebra(nf.len());
    let mut out = Vec::new();

    out.push(run(format!("{prefix}/order"), || {
        for (i, s) in big.iter().enumerate() {
            if !big_le[i][i] {
                return Ok(Err(format!("{s} is not below itself")));
            }
            for (j, t) in big.iter().enumerate() {
                if i != j && big_le[i][j] && big_le[j][i] && !s.same(t) {
                    return Ok(Err(format!("{s} and {t} are mutually below")));
                }
            }
        }
        let pairs = big_le.iter().flatten().filter(|b| **b).count();
        Ok(Ok(format!("{pairs} comparable pairs among {} trees", big.len())))
    }));

    out.push(run(format!("{prefix}/constructor-monotone"), || {
        if empty {
            return vacuous("monotonicity");
        }
        let kid_pairs: Vec<(usize, usize)> =
            chains(&small_le, 2).into_iter().map(|c| (c[0], c[1])).collect();
        let mut tried = 0;
        for (i, (_, k)) in nf.summands.iter().enumerate() {
            let w_pairs: Vec<(usize, usize)> = chains(&label_le[i], 2).into_iter().map(|c| (c[0], c[1])).collect();
            let mut slots = vec![w_pairs];
            slots.extend(std::iter::repeat_n(kid_pairs.clone(), *k));
            for combo in combos(&slots, CAP) {
                let (w_lo, w_hi) = (&labels[i][combo[0].0], &labels[i][combo[0].1]);
                let lo: Vec<DTreeVal> = combo[1..].iter().map(|p| small[p.0].clone()).collect();
                let hi: Vec<DTreeVal> = combo[1..].iter().map(|p| small[p.1].clone()).collect();
                let mut fuel = Fuel::new(cfg.fuel);
                tried += 1;
                if !dom.constructor_monotone(i, (w_lo, &lo), (w_hi, &hi), &mut fuel).map_err(err)? {
                    return Ok(Err(format!("constructor {i} on {w_lo} ⊑ {w_hi} with comparable subtrees")));
                }
            }
        }
        Ok(Ok(format!("{tried} comparable argument pairs")))
    }));

    out.push(run(format!("{prefix}/constructor-continuous"), || {
        if empty {
            return vacuous("continuity");
        }
        let mut tried = 0;
        for len in [2, 3] {
            let kid_chains = chains(&small_le, len);
            for (i, (_, k)) in nf.summands.iter().enumerate() {
                let mut slots = vec![chains(&label_le[i], len)];
                slots.extend(std::iter::repeat_n(kid_chains.clone(), *k));
                for combo in combos(&slots, CAP) {
                    let chain: Vec<(PVal, Vec<DTreeVal>)> = (0..len)
                        .map(|step| {
                            let w = labels[i][combo[0][step]].clone();
                            (w, combo[1..].iter().map(|c| small[c[step]].clone()).collect())
                        })
                        .collect();
                    tried += 1;
                    if !dom.constructor_continuous(i, &chain, &mut Fuel::new(cfg.fuel)).map_err(err)? {
                        let ws: Vec<String> = chain.iter().map(|(w, _)| w.to_string()).collect();
                        return Ok(Err(format!("constructor {i} on the chain of labels {}", ws.join(" ⊑ "))));
                    }
                }
            }
        }
        Ok(Ok(format!("{tried} argument chains of 2 and 3 elements")))
    }));

    out.push(run(format!("{prefix}/fold-monotone"), || {
        if empty {
            return vacuous("monotonicity of fold");
        }
        let mut tried = 0;
        for (i, j) in chains(&big_le, 2).into_iter().map(|c| (c[0], c[1])) {
            tried += 1;
            if !dom.fold_monotone(&alg, &cod, &big[i], &big[j], &mut Fuel::new(cfg.fuel)).map_err(err)? {
                return Ok(Err(format!("fold breaks {} ⊑ {}", big[i], big[j])));
            }
        }
        Ok(Ok(format!("{tried} comparable pairs")))
    }));

    out.push(run(format!("{prefix}/fold-continuous"), || {
        if empty {
            return vacuous("continuity of fold");
        }
        let mut tried = 0;
        for len in [2, 3] {
            for c in chains(&big_le, len).into_iter().take(CAP) {
                let chain: Vec<DTreeVal> = c.iter().map(|i| big[*i].clone()).collect();
                tried += 1;
                if !dom.fold_continuous(&alg, &cod, &chain, &mut Fuel::new(cfg.fuel)).map_err(err)? {
                    let shown: Vec<String> = chain.iter().map(|t| t.to_string()).collect();
                    return Ok(Err(format!("fold of the supremum differs on {}", shown.join(" ⊑ "))));
                }
            }
        }
        Ok(Ok(format!("{tried} chains of 2 and 3 trees")))
    }));
    out
}

/// Suprema of chains of unfolded elements stay in the final coalgebra.
fn sup_closed(name: &str, handle: &FinalCoalgebra, cfg: &CheckConfig) -> CheckResult {
    run(format!("cpo/{name}/sup-closed"), || {
        let params: Vec<Cpo> = handle.nf().summands.iter().map(|(a, _)| cpo_of(a)).collect();
        let dom = domain_final(handle.nf(), params.clone(), cfg.obs_depth).map_err(err)?;
        let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
        let (mut lo, mut hi) = (Vec::new(), Vec::new());
        let mut strict = false;
        for ((a, _), c) in handle.nf().summands.iter().zip(&params) {
            let ls = a.samples(3).map_err(err)?;
            let mut pick = ls.first().map(|x| (x.clone(), x.clone()));
            'search: for x in &ls {
                for y in &ls {
                    if c.leq(x, y, &mut fuel).map_err(err)? && !c.leq(y, x, &mut fuel).map_err(err)? {
                        pick = Some((x.clone(), y.clone()));
                        strict = true;
                        break 'search;
                    }
                }
            }
            let (x, y) = pick.map_or((vec![], vec![]), |(x, y)| (vec![x], vec![y]));
            lo.push(x);
            hi.push(y);
        }
        let (Some((d_lo, seeds)), Some((d_hi, _))) = (generic_coalgebra(handle, lo), generic_coalgebra(handle, hi)) else {
            return Ok(Ok("every label type is empty".into()));
        };
        for z in &seeds {
            let (s, t) = (handle.unfold(&d_lo, z), handle.unfold(&d_hi, z));
            if !dom.tree_leq(&s, &t, &mut fuel).map_err(err)? {
                return Ok(Err(format!("unfolds at seed {z} are not comparable")));
            }
            for chain in [vec![s.clone(), t.clone()], vec![s.clone(), s.clone(), t.clone()]] {
                if !dom.closed_under_sup(&chain, &mut fuel).map_err(err)? {
                    return Ok(Err(format!("supremum of a chain of {} unfolds at seed {z} leaves the type", chain.len())));
                }
            }
        }
        Ok(Ok(format!(
            "chains over {} seeds, {}",
            seeds.len(),
            if strict { "strictly increasing labels" } else { "discrete labels only" }
        )))
    })
}

fn chain_sup_lemma(cfg: &CheckConfig) -> Result<Outcome, String> {
    let cases: Vec<(&str, Cpo, Vec<PVal>)> = vec![
        ("Bool", flat_cpo(Ty::Bool), vec![PVal::tt(), PVal::ff()]),
        ("Nat", flat_cpo(Ty::Nat), (0..3).map(PVal::nat).collect()),
        (
            "Bool + Unit",
            sum_cpo(flat_cpo(Ty::Bool), flat_cpo(Ty::Unit)),
            vec![PVal::inl(PVal::tt()), PVal::inl(PVal::ff()), PVal::inr(PVal::Unit)],
        ),
    ];
    let mut count = 0;
    for (name, cpo, vals) in &cases {
        for len in 1..=6 {
            for chain in flat_chains(vals, len) {
                let mut padded = chain.clone();
                padded.push(chain.last().cloned().unwrap_or(PVal::Undefined));
                let mut fuel = Fuel::new(cfg.fuel);
                let s = cpo.sup_of(&padded, &mut fuel).map_err(err)?;
                let first = chain.iter().find(|x| x.is_defined());
                let ok = match first {
                    None => !s.value.is_defined(),
                    Some(x) => s.value.structurally_eq(x),
                };
                count += 1;
                if !ok {
                    return Ok(Err(format!("over {name}, the chain {chain:?} has supremum {}", s.value)));
                }
            }
        }
    }
    Ok(Ok(format!("{count} chains: supremum defined exactly when some element is")))
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

fn lfp_factorial(cfg: &CheckConfig) -> Result<Outcome, String> {
    let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
    let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
    let fix = lfp(&cpo, &*factorial_functional(), cfg.chain_bound, &mut fuel).map_err(err)?;
    for n in 0..8 {
        let v = fix.value.apply(&PVal::nat(n), &mut fuel).map_err(err)?;
        if v.as_u64() != Some(factorial(n)) {
            return Ok(Err(format!("least fixed point at {n} is {v}, expected {}", factorial(n))));
        }
    }
    Ok(Ok("least fixed point agrees with n! for n < 8, 5 ↦ 120".into()))
}

/// `G g n = 1` at 0, `n · g (n - 1)` up to 5, `g n` above: the least fixed
/// point is factorial up to 5 and every extension of it above 5 is a
/// pre-fixed point.
fn truncated_factorial() -> Box<EndoFn> {
    Box::new(|g, _| {
        let g = g.clone();
        Ok(PVal::Fun(
            PFun::new(move |n, fuel| {
                let Some(k) = n.as_u64() else { return Ok(PVal::Undefined) };
                match k {
                    0 => Ok(PVal::nat(1)),
                    1..=5 => Ok(g.apply(&PVal::nat(k - 1), fuel)?.as_u64().map_or(PVal::Undefined, |p| PVal::nat(k * p))),
                    _ => g.apply(n, fuel),
                }
            })
            .with_domain(Ty::Nat),
        ))
    })
}

fn lfp_minimal(cfg: &CheckConfig) -> Result<Outcome, String> {
    let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
    let f = truncated_factorial();
    let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
    let fix = lfp(&cpo, &*f, cfg.chain_bound, &mut fuel).map_err(err)?;
    for n in 0..8 {
        let v = fix.value.apply(&PVal::nat(n), &mut fuel).map_err(err)?;
        let expected = (n <= 5).then(|| factorial(n));
        if v.as_u64() != expected {
            return Ok(Err(format!("least fixed point at {n} is {v}")));
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pre_fixed = Vec::new();
    for _ in 0..10 {
        let mut graph: Vec<(PVal, PVal)> = (0..=5).map(|n| (PVal::nat(n), PVal::nat(factorial(n)))).collect();
        for n in 6..12 {
            if rng.gen_bool(0.6) {
                graph.push((PVal::nat(n), PVal::nat(rng.gen_range(0..1000))));
            }
        }
        pre_fixed.push(PVal::Fun(PFun::graph(graph).with_domain(Ty::Nat)));
    }
    let (count, below) = check_minimal(&cpo, &*f, &fix.value, &pre_fixed, &mut fuel).map_err(err)?;
    if count != pre_fixed.len() || !below {
        return Ok(Err(format!("{count} of 10 sampled maps are pre-fixed, least fixed point below all: {below}")));
    }
    // random partial maps are almost never pre-fixed; any that are must lie above
    let noise = random_partial_maps(8, 50, 10, cfg.seed);
    let (_, below) = check_minimal(&cpo, &*f, &fix.value, &noise, &mut fuel).map_err(err)?;
    if !below {
        return Ok(Err("a random pre-fixed point lies strictly below the least fixed point".into()));
    }
    let fact = factorial_functional();
    let full = lfp(&cpo, &*fact, cfg.chain_bound, &mut fuel).map_err(err)?;
    let (count, below) = check_minimal(&cpo, &*fact, &full.value, &[full.value.clone()], &mut fuel).map_err(err)?;
    if count != 1 || !below {
        return Ok(Err("the factorial fixed point is not pre-fixed below itself".into()));
    }
    Ok(Ok("least fixed point below 10 sampled pre-fixed points".into()))
}

fn sum_stability(cfg: &CheckConfig) -> Result<Outcome, String> {
    let mut fuel = Fuel::new(cfg.fuel.saturating_mul(100));
    if !bool_is_flat(6, &mut fuel).map_err(err)? {
        return Ok(Err("a monotone Bool chain has a supremum other than its first defined element".into()));
    }
    let cpo = sum_cpo(flat_cpo(Ty::Bool), flat_cpo(Ty::Bool));
    let vals = [
        PVal::Undefined,
        PVal::inl(PVal::tt()),
        PVal::inl(PVal::ff()),
        PVal::inr(PVal::tt()),
        PVal::inr(PVal::ff()),
    ];
    let len = 4;
    let mut monotone = 0;
    for code in 0..5usize.pow(len as u32) {
        let xs: Vec<PVal> = (0..len).map(|i| vals[code / 5usize.pow(i as u32) % 5].clone()).collect();
        if cpo.first_non_monotone(&xs, &mut fuel).map_err(err)?.is_some() {
            continue;
        }
        monotone += 1;
        let mut padded = xs.clone();
        padded.push(xs[len - 1].clone());
        let s = cpo.sup_of(&padded, &mut fuel).map_err(err)?;
        let first = xs.iter().find(|x| x.is_defined()).cloned().unwrap_or(PVal::Undefined);
        if !s.value.structurally_eq(&first) {
            return Ok(Err(format!("chain {xs:?} in Bool + Bool has supremum {}", s.value)));
        }
    }
    Ok(Ok(format!("Bool chains of 6 flat; {monotone} chains in Bool + Bool settle at their first defined element")))
}

/// Per-type domain checks with parameters set to `Unit ⇀ Bool`, and the
/// built-in cpo checks.
pub fn cpo_suite(env: &ElabEnv, cfg: &CheckConfig) -> Vec<CheckResult> {
    let lifted = Ty::partial(Ty::Unit, Ty::Bool);
    let mut out = Vec::new();
    for name in env.type_names() {
        match env.instantiate_all(name, &lifted) {
            Ok(TypeEntry::Free(e)) => out.extend(domain_checks(name, &e.handle, cfg)),
            Ok(TypeEntry::Co(e)) => out.push(sup_closed(name, &e.handle, cfg)),
            Err(e) => out.push(CheckResult::skip(format!("cpo/{name}"), format!("cannot instantiate: {e}"))),
        }
    }
    out.push(run("cpo/builtin/chain-sup".into(), || chain_sup_lemma(cfg)));
    out.push(run("cpo/builtin/lfp-factorial".into(), || lfp_factorial(cfg)));
    out.push(run("cpo/builtin/lfp-minimal".into(), || lfp_minimal(cfg)));
    out.push(run("cpo/builtin/sum-stability".into(), || sum_stability(cfg)));
    out
}

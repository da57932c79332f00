//! Certifications in the finite categories of reflexive relations and of
//! sets with a chosen family of subsets.

use std::collections::BTreeMap;

use crate::final_coalgebra::{ambient_iso_check, mtype_vs_extpoly_compare};
use crate::kernel::{Fuel, Ty};
use crate::lab::{
    all_objects, coproduct, coproducts_disjoint, equalizer, hom_set, initial, is_coarse, is_regular_mono,
    is_regular_mono_by_search, nno_fragment_check, product, terminal, Category, FinMor, FinObj, LabError,
};

use super::{err, run, sort_results, CheckResult, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabTarget {
    Rere,
    Spap,
    Mtypes,
}

impl std::str::FromStr for LabTarget {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "rere" => Ok(LabTarget::Rere),
            "spap" => Ok(LabTarget::Spap),
            "mtypes" => Ok(LabTarget::Mtypes),
            other => Err(format!("unknown lab `{other}`")),
        }
    }
}

/// Factors of the (co)limits range over objects of at most this many
/// atoms, so products and coproducts have at most 4.
const FACTOR_SIZE: usize = 2;
/// Test objects of the universal properties.
const TEST_SIZE: usize = 3;

/// Counts how often each key is hit; the first expected key not hit exactly
/// once, with its count.
fn first_non_unique<K: Ord>(hits: impl IntoIterator<Item = K>, expected: impl IntoIterator<Item = K>) -> Option<(K, usize)> {
    let mut counts = BTreeMap::new();
    for k in hits {
        *counts.entry(k).or_insert(0usize) += 1;
    }
    expected.into_iter().find_map(|k| match counts.get(&k).copied().unwrap_or(0) {
        1 => None,
        c => Some((k, c)),
    })
}

fn composite(f: &FinMor, g: &FinMor) -> Option<Vec<usize>> {
    f.then(g).ok().map(|h| h.map)
}

/// Products and coproducts of all pairs and equalizers of all parallel
/// pairs of objects up to [`FACTOR_SIZE`] atoms, each against every test
/// object up to [`TEST_SIZE`] atoms: every cone has exactly one mediating
/// morphism.
fn universal_properties(cat: Category) -> Result<Outcome, String> {
    let factors = all_objects(cat, FACTOR_SIZE);
    let tests = all_objects(cat, TEST_SIZE);
    let mut cones = 0usize;
    let maps = |homs: &[FinMor]| -> Vec<Vec<usize>> { homs.iter().map(|h| h.map.clone()).collect() };
    for a in &factors {
        for b in &factors {
            let (p, p1, p2) = product(a, b).map_err(err)?;
            let (c, i1, i2) = coproduct(a, b).map_err(err)?;
            for x in &tests {
                let (fa, fb) = (maps(&hom_set(x, a)), maps(&hom_set(x, b)));
                let hits = hom_set(x, &p).iter().filter_map(|h| Some((composite(h, &p1)?, composite(h, &p2)?))).collect::<Vec<_>>();
                let cone_pairs: Vec<_> = fa.iter().flat_map(|f| fb.iter().map(move |g| (f.clone(), g.clone()))).collect();
                cones += cone_pairs.len();
                if let Some(((f, g), n)) = first_non_unique(hits, cone_pairs) {
                    return Ok(Err(format!("product {a} × {b}: {n} maps from {x} mediate the cone {f:?}, {g:?}")));
                }
                let (ga, gb) = (maps(&hom_set(a, x)), maps(&hom_set(b, x)));
                let hits = hom_set(&c, x).iter().filter_map(|h| Some((composite(&i1, h)?, composite(&i2, h)?))).collect::<Vec<_>>();
                let cocone_pairs: Vec<_> = ga.iter().flat_map(|f| gb.iter().map(move |g| (f.clone(), g.clone()))).collect();
                cones += cocone_pairs.len();
                if let Some(((f, g), n)) = first_non_unique(hits, cocone_pairs) {
                    return Ok(Err(format!("coproduct {a} + {b}: {n} maps to {x} mediate the cocone {f:?}, {g:?}")));
                }
            }
            let homs = hom_set(a, b);
            for f in &homs {
                for g in &homs {
                    let (e, m) = equalizer(f, g).map_err(err)?;
                    if composite(&m, f) != composite(&m, g) {
                        return Ok(Err(format!("equalizer inclusion {e} → {a} does not equalize")));
                    }
                    for x in &tests {
                        let equalizing: Vec<Vec<usize>> = hom_set(x, a)
                            .iter()
                            .filter(|h| composite(h, f) == composite(h, g))
                            .map(|h| h.map.clone())
                            .collect();
                        cones += equalizing.len();
                        let hits = hom_set(x, &e).iter().filter_map(|u| composite(u, &m)).collect::<Vec<_>>();
                        if let Some((h, n)) = first_non_unique(hits, equalizing) {
                            return Ok(Err(format!("equalizer {e} of two maps {a} → {b}: {n} factorizations of {h:?}")));
                        }
                    }
                }
            }
        }
    }
    Ok(Ok(format!(
        "{cones} cones: (co)limits of {} objects of at most {FACTOR_SIZE} atoms against {} test objects of at most {TEST_SIZE}",
        factors.len(),
        tests.len()
    )))
}

fn zero_to_one(cat: Category) -> Result<FinMor, LabError> {
    FinMor::new(&initial(cat), &terminal(cat), vec![])
}

fn rere_checks() -> Vec<CheckResult> {
    vec![
        run("lab/rere/universal-properties".into(), || universal_properties(Category::ReRe)),
        run("lab/rere/coarse-iff-indiscrete".into(), || {
            let objs = all_objects(Category::ReRe, 4);
            for a in &objs {
                let coarse = is_coarse(a).map_err(err)?;
                if coarse != a.is_indiscrete() {
                    return Ok(Err(format!("{a}: coarse {coarse}, indiscrete {}", a.is_indiscrete())));
                }
            }
            Ok(Ok(format!("{} objects of at most 4 atoms", objs.len())))
        }),
        run("lab/rere/regular-zero-to-one".into(), || {
            let m = zero_to_one(Category::ReRe).map_err(err)?;
            let r = is_regular_mono(&m).map_err(err)?;
            let searched = is_regular_mono_by_search(&m, 2);
            if !r.regular || !searched {
                return Ok(Err(format!("0 → 1 regular by cokernel pair {}, by search {searched}", r.regular)));
            }
            Ok(Ok("0 → 1 is regular".into()))
        }),
        run("lab/rere/nno-truncation".into(), || {
            let r = nno_fragment_check().map_err(err)?;
            if !r.discrete_not_coarse {
                return Ok(Err("the discrete truncation is coarse".into()));
            }
            if r.unique != r.algebras_checked {
                return Ok(Err(format!(
                    "{} of {} algebras have exactly one clause morphism from the discrete truncation",
                    r.unique, r.algebras_checked
                )));
            }
            if r.indiscrete_failures == 0 {
                return Ok(Err("the indiscrete truncation has a clause morphism into every algebra".into()));
            }
            Ok(Ok(format!(
                "truncation of {}: unique clause morphism into all {} algebras, not coarse; indiscrete truncation fails on {}",
                r.truncation, r.algebras_checked, r.indiscrete_failures
            )))
        }),
    ]
}

fn spap_checks() -> Vec<CheckResult> {
    vec![
        run("lab/spap/universal-properties".into(), || universal_properties(Category::SpaP)),
        run("lab/spap/regular-zero-to-one".into(), || {
            let m = zero_to_one(Category::SpaP).map_err(err)?;
            let r = is_regular_mono(&m).map_err(err)?;
            let witness = FinObj::spap(0, [0]).map_err(err)?;
            if r.regular || r.regular_subobject != witness || is_regular_mono_by_search(&m, 2) {
                return Ok(Err(format!("regular {}, regular subobject {}", r.regular, r.regular_subobject)));
            }
            Ok(Ok(format!("regular(0 → 1) = false, regular subobject {}", r.regular_subobject)))
        }),
        run("lab/spap/coproducts-not-disjoint".into(), || {
            let (disjoint, p) = coproducts_disjoint(Category::SpaP).map_err(err)?;
            if disjoint {
                return Ok(Err("the injections into 1 + 1 pull back to the initial object".into()));
            }
            Ok(Ok(format!("the injections into 1 + 1 pull back to {p}, not the initial object")))
        }),
    ]
}

fn mtype_checks(fuel: u64) -> Vec<CheckResult> {
    vec![
        run("lab/mtypes/counterexample".into(), || {
            let one = FinObj::spap_full(1);
            let empty_point = FinObj::spap_point_empty();
            let c = mtype_vs_extpoly_compare(&one, &empty_point, &empty_point).map_err(err)?;
            if c.pq_count != 0 || c.f_count == 0 {
                return Ok(Err(format!("|F(1_∅)| = {}, |P_q(1_∅)| = {}", c.f_count, c.pq_count)));
            }
            Ok(Ok(format!("|F(1_∅)| = {}, |P_q(1_∅)| = 0", c.f_count)))
        }),
        run("lab/mtypes/kernel-iso".into(), || {
            let mut fuel = Fuel::new(fuel);
            for (l, r, x) in [(Ty::Bool, Ty::Unit, Ty::Bool), (Ty::Unit, Ty::Unit, Ty::Bool), (Ty::Bool, Ty::Bool, Ty::Unit)] {
                if !ambient_iso_check(&l, &r, &x, &mut fuel).map_err(err)? {
                    return Ok(Err(format!("h is not a bijection for B = {l} + {r}, X = {x}")));
                }
            }
            Ok(Ok("h is a bijection onto P_q(X) in the kernel model on 3 instances".into()))
        }),
    ]
}

pub fn lab_suite(which: LabTarget) -> Vec<CheckResult> {
    let mut out = match which {
        LabTarget::Rere => rere_checks(),
        LabTarget::Spap => spap_checks(),
        LabTarget::Mtypes => mtype_checks(1_000_000),
    };
    sort_results(&mut out);
    out
}

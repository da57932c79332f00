use proptest::prelude::*;

use quasikernel_core::cpo::{factorial_functional, flat_cpo, pfun_cpo, product_cpo, sum_cpo};
use quasikernel_core::functors::{
    decode_triple, encode_sum_as_triple, sumcase, to_poly_nf, triple_case, FunctorError, PolyNF, SigFunctor,
};
use quasikernel_core::initial::{build_initial, list_cons, list_nil, list_to_vec, DTreeVal, InitialAlgebra};
use quasikernel_core::kernel::{eq_existential, eq_strong, holds, logical, restrict};
use quasikernel_core::lab::{hom_set, product, FinMor, FinObj};
use quasikernel_core::{eval, Env, Fuel, PFun, PVal, Term, Ty};

fn value() -> impl Strategy<Value = PVal> {
    let leaf = prop_oneof![Just(PVal::Unit), (0u64..6).prop_map(PVal::nat), any::<bool>().prop_map(PVal::bool)];
    leaf.prop_recursive(3, 16, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| PVal::pair(a, b)),
            inner.clone().prop_map(PVal::inl),
            inner.prop_map(PVal::inr),
        ]
    })
}

fn maybe_value() -> impl Strategy<Value = PVal> {
    prop_oneof![1 => Just(PVal::Undefined), 4 => value()]
}

fn ty() -> impl Strategy<Value = Ty> {
    let leaf = prop_oneof![Just(Ty::Unit), Just(Ty::Bool), Just(Ty::Nat)];
    leaf.prop_recursive(2, 8, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Ty::prod(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| Ty::sum(a, b)),
        ]
    })
}

/// Two sampled values of one type.
fn same_type_pair() -> impl Strategy<Value = (PVal, PVal)> {
    (ty(), any::<prop::sample::Index>(), any::<prop::sample::Index>()).prop_map(|(t, i, j)| {
        let xs = t.samples(3).unwrap();
        (i.get(&xs).clone(), j.get(&xs).clone())
    })
}

fn base_ty() -> impl Strategy<Value = Ty> {
    prop_oneof![Just(Ty::Unit), Just(Ty::Bool), Just(Ty::sum(Ty::Unit, Ty::Bool))]
}

fn poly_nf() -> impl Strategy<Value = PolyNF> {
    prop::collection::vec((base_ty(), 0usize..3), 1..4).prop_map(|summands| PolyNF { summands })
}

fn sig() -> impl Strategy<Value = SigFunctor> {
    let leaf = prop_oneof![
        Just(SigFunctor::Id),
        Just(SigFunctor::constant(Ty::Unit)),
        Just(SigFunctor::constant(Ty::Bool)),
    ];
    leaf.prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| SigFunctor::sum(a, b)),
            (inner.clone(), inner).prop_map(|(a, b)| SigFunctor::prod(a, b)),
        ]
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn constructors_are_strict(v in value()) {
        prop_assert!(!PVal::pair(v.clone(), PVal::Undefined).is_defined());
        prop_assert!(!PVal::pair(PVal::Undefined, v.clone()).is_defined());
        prop_assert!(!PVal::inl(PVal::Undefined).is_defined());
        prop_assert!(!PVal::inr(PVal::Undefined).is_defined());
        let id = PVal::Fun(PFun::identity());
        prop_assert!(!id.apply(&PVal::Undefined, &mut Fuel::default()).unwrap().is_defined());
        let env = Env::new();
        for t in [
            Term::Fst(Term::lit(PVal::Undefined).into()),
            Term::Snd(Term::lit(PVal::Undefined).into()),
            Term::app(Term::lam("x", Term::lit(v.clone())), Term::bot()),
        ] {
            prop_assert!(!eval(&t, &env, &mut Fuel::default()).unwrap().is_defined());
        }
    }

    #[test]
    fn strong_and_existential_equality_agree_on_defined_values((a, b) in same_type_pair()) {
        prop_assert_eq!(eq_strong(&a, &b, 4).unwrap(), eq_existential(&a, &b, 4).unwrap());
        prop_assert!(eq_strong(&a, &a, 4).unwrap());
        prop_assert_eq!(eq_strong(&a, &b, 4).unwrap(), a.structurally_eq(&b));
    }

    #[test]
    fn restriction_by_truth_values(v in maybe_value()) {
        prop_assert!(eq_strong(&restrict(&v, &PVal::tt()), &v, 4).unwrap());
        prop_assert!(!restrict(&v, &PVal::ff()).is_defined());
        // a formula holds exactly when it is ⊤
        prop_assert!(holds(&logical(true), &mut Fuel::default()).unwrap());
        prop_assert!(!holds(&logical(false), &mut Fuel::default()).unwrap());
    }

    #[test]
    fn evaluation_is_deterministic(v in value(), w in value()) {
        let t = Term::case(
            Term::inl(Term::pair(Term::lit(v), Term::lit(w))),
            "p",
            Term::Snd(Term::var("p").into()),
            "q",
            Term::bot(),
        );
        let env = Env::new();
        let a = eval(&t, &env, &mut Fuel::new(1000)).unwrap();
        let b = eval(&t, &env, &mut Fuel::new(1000)).unwrap();
        prop_assert!(a.structurally_eq(&b));
    }

    #[test]
    fn fmap_preserves_identity_and_composition(nf in poly_nf(), f in prop::collection::vec(0u64..2, 2), g in prop::collection::vec(0u64..2, 2)) {
        let xs = [PVal::nat(0), PVal::nat(1)];
        let table = |t: &[u64]| { let t = t.to_vec(); move |x: &PVal| -> Result<PVal, FunctorError> { Ok(PVal::nat(t[x.as_u64().unwrap() as usize])) } };
        for v in nf.enumerate(&xs).unwrap() {
            let id = nf.fmap::<FunctorError>(&mut |x| Ok(x.clone()), &v).unwrap();
            prop_assert!(eq_strong(&id, &v, 4).unwrap());
            let (fm, gm) = (table(&f), table(&g));
            let both = nf.fmap::<FunctorError>(&mut |x| gm(&fm(x)?), &v).unwrap();
            let (mut fm, mut gm) = (table(&f), table(&g));
            let stepwise = nf.fmap::<FunctorError>(&mut gm, &nf.fmap::<FunctorError>(&mut fm, &v).unwrap()).unwrap();
            prop_assert!(eq_strong(&both, &stepwise, 4).unwrap());
        }
    }

    #[test]
    fn normal_form_preserves_cardinality(s in sig(), n in 0u128..4) {
        let nf = to_poly_nf(&s).unwrap();
        prop_assert_eq!(nf.cardinality(n), s.cardinality(n));
    }

    #[test]
    fn copairing_is_unique(v in maybe_value().prop_filter("sum", |v| matches!(v, PVal::Inl(_) | PVal::Inr(_) | PVal::Undefined))) {
        let mut f = |x: &PVal| -> Result<PVal, FunctorError> { Ok(PVal::pair(PVal::nat(0), x.clone())) };
        let mut g = |y: &PVal| -> Result<PVal, FunctorError> { Ok(PVal::inr(y.clone())) };
        // any h with h ∘ inl = f and h ∘ inr = g
        let h = match &v {
            PVal::Inl(x) => f(x).unwrap(),
            PVal::Inr(y) => g(y).unwrap(),
            _ => PVal::Undefined,
        };
        let direct = sumcase::<FunctorError>(&mut f, &mut g, &v).unwrap();
        prop_assert!(eq_strong(&direct, &h, 4).unwrap());
        let mut fuel = Fuel::default();
        let t = encode_sum_as_triple(&v).unwrap();
        prop_assert!(eq_strong(&decode_triple(&t, &mut fuel).unwrap(), &v, 4).unwrap());
        let via = triple_case::<quasikernel_core::initial::InitialError>(
            &mut |x| Ok(PVal::pair(PVal::nat(0), x.clone())),
            &mut |y| Ok(PVal::inr(y.clone())),
            &t,
            &mut fuel,
        ).unwrap();
        prop_assert!(eq_strong(&via, &h, 4).unwrap());
    }
}

/// A random tree of the three-constructor signature, built bottom-up by
/// `ops`, with its depth computed independently.
fn mixed() -> InitialAlgebra {
    build_initial(&PolyNF { summands: vec![(Ty::Unit, 0), (Ty::Bool, 1), (Ty::Unit, 2)] }).unwrap()
}

fn grow(handle: &InitialAlgebra, ops: &[(u8, bool, usize, usize)]) -> Vec<(DTreeVal, u64)> {
    let mut built = vec![(handle.construct(0, &PVal::Unit, &[]).unwrap(), 1u64)];
    for &(op, b, i, j) in ops {
        let (ti, di) = built[i % built.len()].clone();
        let (tj, dj) = built[j % built.len()].clone();
        let next = match op % 3 {
            0 => (handle.construct(0, &PVal::Unit, &[]).unwrap(), 1),
            1 => (handle.construct(1, &PVal::bool(b), &[ti]).unwrap(), 1 + di),
            _ => (handle.construct(2, &PVal::Unit, &[ti, tj]).unwrap(), 1 + di.max(dj)),
        };
        if next.1 <= 6 {
            built.push(next);
        }
    }
    built
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn depth_is_one_more_than_the_deepest_subtree(ops in prop::collection::vec((0u8..3, any::<bool>(), 0usize..64, 0usize..64), 0..12)) {
        let handle = mixed();
        for (t, depth) in grow(&handle, &ops) {
            prop_assert_eq!(t.depth(), Some(depth));
            prop_assert!(handle.is_in_t(&t, 8));
        }
    }

    #[test]
    fn lambek_inverse_undoes_alpha(ops in prop::collection::vec((0u8..3, any::<bool>(), 0usize..64, 0usize..64), 0..8)) {
        let handle = mixed();
        for (t, _) in grow(&handle, &ops) {
            let layer = handle.lambek_inverse(&t, &mut Fuel::new(100_000)).unwrap();
            let back = DTreeVal::from_pval(&handle.alpha(&layer).unwrap()).unwrap();
            prop_assert!(back.same(&t));
        }
    }

    #[test]
    fn list_reads_back_its_conses(xs in prop::collection::vec(0u64..100, 0..10)) {
        let mut l = list_nil();
        for x in xs.iter().rev() {
            l = list_cons(&PVal::nat(*x), &l).unwrap();
        }
        let back: Vec<u64> = list_to_vec(&l, &mut Fuel::new(100_000)).unwrap().iter().map(|v| v.as_u64().unwrap()).collect();
        prop_assert_eq!(back, xs);
    }

    #[test]
    fn order_axioms_hold_on_composite_cpos(n in 1u64..4) {
        let mut samples = Vec::new();
        for a in 0..n {
            samples.push(PVal::pair(PVal::nat(a), PVal::tt()));
            samples.push(PVal::pair(PVal::nat(a), PVal::ff()));
        }
        let cpo = product_cpo(flat_cpo(Ty::Nat), flat_cpo(Ty::Bool));
        prop_assert_eq!(cpo.check_order_axioms(&samples, &mut Fuel::default()).unwrap(), None);
        let sum = sum_cpo(flat_cpo(Ty::Bool), flat_cpo(Ty::Unit));
        let vals = vec![PVal::inl(PVal::tt()), PVal::inl(PVal::ff()), PVal::inr(PVal::Unit)];
        prop_assert_eq!(sum.check_order_axioms(&vals, &mut Fuel::default()).unwrap(), None);
    }

    #[test]
    fn kleene_iterates_are_monotone(len in 1usize..8) {
        let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
        let f = factorial_functional();
        let mut fuel = Fuel::new(1_000_000);
        let mut xs = vec![cpo.bottom().unwrap()];
        for _ in 0..len {
            let next = f(xs.last().unwrap(), &mut fuel).unwrap();
            xs.push(next);
        }
        prop_assert_eq!(cpo.first_non_monotone(&xs, &mut fuel).unwrap(), None);
    }

    #[test]
    fn rere_morphisms_compose_and_projections_preserve(size in 1usize..4, bits in any::<u16>()) {
        let pairs: Vec<(usize, usize)> = (0..size)
            .flat_map(|x| (0..size).map(move |y| (x, y)))
            .enumerate()
            .filter(|(k, (x, y))| x == y || bits >> (k % 16) & 1 == 1)
            .map(|(_, p)| p)
            .collect();
        let a = FinObj::rere(size, pairs).unwrap();
        let homs = hom_set(&a, &a);
        prop_assert!(homs.iter().any(|h| h.map == (0..size).collect::<Vec<_>>()));
        for f in &homs {
            for g in &homs {
                let h = f.then(g).unwrap();
                prop_assert!(FinMor::new(&a, &a, h.map.clone()).is_ok());
            }
        }
        let (p, p1, p2) = product(&a, &a).unwrap();
        prop_assert!(FinMor::new(&p, &a, p1.map.clone()).is_ok());
        prop_assert!(FinMor::new(&p, &a, p2.map.clone()).is_ok());
    }
}

use std::path::PathBuf;

use proptest::prelude::*;

use quasikernel_core::surface::{
    elaborate_items, parse_expr, parse_items, pretty, Constructor, Decl, DeclBody, ElabEnv, Expr, Item, SelGroup,
    SurfaceError, TyExpr,
};
use quasikernel_core::Fuel;

fn corpus(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn load(src: &str) -> ElabEnv {
    elaborate_items(&parse_items(src).unwrap()).unwrap()
}

fn show(env: &ElabEnv, expr: &str) -> String {
    env.eval_show(expr, &mut Fuel::new(100_000)).unwrap()
}

#[test]
fn corpus_files_survive_printing() {
    for file in ["nat.qk", "list.qk", "proc_free.qk", "mixed.qk", "streams.qk", "illegal_abs.qk", "tree.qk", "empty.qk"]
    {
        let items = parse_items(&corpus(file)).unwrap();
        let printed = pretty(&items);
        assert_eq!(parse_items(&printed).unwrap(), items, "{file}:\n{printed}");
        assert_eq!(pretty(&parse_items(&printed).unwrap()), printed, "{file}");
    }
}

#[test]
fn rejected_declarations() {
    let neg = |src: &str| matches!(elaborate_items(&parse_items(src).unwrap()), Err(SurfaceError::NegativeOccurrence { .. }));
    assert!(neg(&corpus("illegal_abs.qk")));
    assert!(neg(&corpus("illegal_cont.qk")));
    assert!(neg("free type L ::= wrap(L × (L → Bool))"));
    assert!(matches!(
        elaborate_items(&parse_items(&corpus("tree.qk")).unwrap()),
        Err(SurfaceError::UnsupportedTypeFormer { .. })
    ));
    // constant exponents are accepted for cotypes only
    assert!(matches!(
        elaborate_items(&parse_items("free type R ::= leaf | node(Bool → R)").unwrap()),
        Err(SurfaceError::UnsupportedTypeFormer { .. })
    ));
    assert!(elaborate_items(&parse_items("cotype R ::= (label: Nat; next: Bool → R)").unwrap()).is_ok());
    assert!(matches!(parse_items("free type ::= a"), Err(SurfaceError::Syntax { .. })));
    assert!(matches!(parse_items("free type T ::= a | "), Err(SurfaceError::Syntax { .. })));
    assert!(matches!(
        elaborate_items(&parse_items("free type T ::= a\nfree type T ::= b").unwrap()),
        Err(SurfaceError::Duplicate(_))
    ));
}

#[test]
fn evaluation_against_host_arithmetic() {
    let env = load(&corpus("list.qk"));
    for xs in [vec![], vec![1u64], vec![1, 2, 3], vec![7, 0, 5, 9]] {
        let lit = format!("[{}]", xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(", "));
        assert_eq!(show(&env, &format!("sum {lit}")), xs.iter().sum::<u64>().to_string());
        assert_eq!(show(&env, &format!("length {lit}")), xs.len().to_string());
        assert_eq!(show(&env, &format!("fold 0 plus {lit}")), xs.iter().sum::<u64>().to_string());
    }
    assert_eq!(show(&env, "cons 1 nil"), "cons(1; nil)");
    assert_eq!(show(&env, "times 3 (minus 9 4)"), "15");
    assert_eq!(show(&env, "if (leq 2 3) 1 2"), "1");
    assert_eq!(show(&env, "fst (snd (1, (2, 3)))"), "2");
    assert_eq!(show(&env, "bot"), "⊥");
    assert!(matches!(env.eval_str("nosuch 1", &mut Fuel::default()), Err(SurfaceError::Unbound(_))));
}

#[test]
fn stream_observations() {
    let env = load(&corpus("streams.qk"));
    for k in 0..6u64 {
        let mut e = "unfold[Stream] (\\n -> (n, succ n)) 0".to_string();
        for _ in 0..k {
            e = format!("tl ({e})");
        }
        assert_eq!(show(&env, &format!("hd ({e})")), k.to_string());
    }
}

#[test]
fn evaluation_runs_out_of_fuel() {
    let env = load(&corpus("nat.qk"));
    let r = env.eval_str("fold 0 (\\n -> n) (suc (suc (suc 0)))", &mut Fuel::new(1));
    assert!(r.is_err());
}

const TY_NAMES: [&str; 4] = ["a", "b", "Nat", "Bool"];

fn ty_expr(rec: Option<&'static str>) -> impl Strategy<Value = TyExpr> {
    let mut leaves: Vec<BoxedStrategy<TyExpr>> = TY_NAMES.iter().map(|n| Just(TyExpr::name(n)).boxed()).collect();
    if let Some(r) = rec {
        leaves.push(Just(TyExpr::app(r, vec![TyExpr::name("a")])).boxed());
    }
    prop::strategy::Union::new(leaves).prop_recursive(3, 12, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TyExpr::prod(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TyExpr::sum(a, b)),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| TyExpr::arrow(a, b)),
            inner.prop_map(|a| TyExpr::app("List", vec![a])),
        ]
    })
}

fn free_decl() -> impl Strategy<Value = Decl> {
    prop::collection::vec(prop::collection::vec(ty_expr(Some("T")), 0..3), 1..4).prop_map(|ctors| Decl {
        name: "T".into(),
        params: vec!["a".into()],
        body: DeclBody::Free(
            ctors.into_iter().enumerate().map(|(i, args)| Constructor { name: format!("c{i}"), args }).collect(),
        ),
    })
}

fn co_decl() -> impl Strategy<Value = Decl> {
    let group = (1usize..3, any::<bool>(), ty_expr(Some("S")));
    prop::collection::vec(prop::collection::vec(group, 1..3), 1..3).prop_map(|alts| {
        let mut k = 0;
        let alts = alts
            .into_iter()
            .map(|groups| {
                groups
                    .into_iter()
                    .map(|(n, partial, ty)| {
                        let names = (0..n).map(|_| { k += 1; format!("s{k}") }).collect();
                        SelGroup { names, partial, ty }
                    })
                    .collect()
            })
            .collect();
        Decl { name: "S".into(), params: vec!["a".into()], body: DeclBody::Co(alts) }
    })
}

fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0u64..100).prop_map(Expr::Num),
        Just(Expr::Unit),
        prop::sample::select(vec!["x", "y", "plus", "fold"]).prop_map(Expr::var),
        Just(Expr::Var("fold".into(), vec![TyExpr::name("T")])),
    ];
    leaf.prop_recursive(3, 16, 3, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Expr::app(f, a)),
            inner.clone().prop_map(|b| Expr::Lam(vec!["x".into(), "y".into()], Box::new(b))),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| Expr::Pair(Box::new(a), Box::new(b))),
            prop::collection::vec(inner, 0..3).prop_map(Expr::List),
        ]
    })
}

fn item() -> impl Strategy<Value = Item> {
    prop_oneof![
        free_decl().prop_map(Item::Decl),
        co_decl().prop_map(Item::Decl),
        expr().prop_map(|body| Item::Let { name: "f".into(), params: vec!["x".into()], body }),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn printed_items_parse_back(items in prop::collection::vec(item(), 0..4)) {
        let printed = pretty(&items);
        prop_assert_eq!(parse_items(&printed).unwrap(), items, "{}", printed);
    }

    #[test]
    fn printed_expressions_parse_back(e in expr()) {
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }
}

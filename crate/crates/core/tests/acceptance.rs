//! The twelve acceptance criteria, one pass/fail line each. Every criterion
//! is exact: the pinned tolerance is zero failures and exact equality.

use std::io::Write;
use std::path::PathBuf;

use quasikernel_core::checks::{
    cpo_suite, final_suite, initial_suite, lab_suite, tree_set, CheckConfig, CheckResult, LabTarget,
};
use quasikernel_core::cpo::{factorial_functional, flat_cpo, lfp, pfun_cpo, sum_cpo};
use quasikernel_core::functors::{decode_triple, encode_sum_as_triple, sumcase, triple_case};
use quasikernel_core::initial::{
    build_initial, induction_table, list_cons, list_fold, list_nil, list_to_vec, nat_nf, nat_tree, Algebra,
    DTreeVal, InitialError,
};
use quasikernel_core::lab::{initial, is_coarse, is_regular_mono, terminal, Category, FinMor, FinObj};
use quasikernel_core::surface::{elaborate_items, parse_items, ElabEnv, SurfaceError, TypeEntry};
use quasikernel_core::{Fuel, PVal, Ty};

/// Failures allowed in any criterion.
const MAX_FAILURES: usize = 0;
const TREE_DEPTH: usize = 4;
const PATH_LENGTH: usize = 4;

const POLYNOMIAL_CORPUS: [(&str, &str); 4] =
    [("nat.qk", "Nat"), ("list.qk", "List"), ("proc_free.qk", "Proc"), ("mixed.qk", "Mix")];

fn corpus(file: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(file)
}

fn load(file: &str) -> Result<ElabEnv, SurfaceError> {
    let src = std::fs::read_to_string(corpus(file)).expect("corpus file is readable");
    elaborate_items(&parse_items(&src)?)
}

fn cfg() -> CheckConfig {
    CheckConfig { obs_depth: TREE_DEPTH, ..CheckConfig::default() }
}

struct Verdict {
    pass: bool,
    detail: String,
}

fn verdict(failures: Vec<String>, ok_detail: String) -> Verdict {
    if failures.len() <= MAX_FAILURES {
        Verdict { pass: true, detail: ok_detail }
    } else {
        Verdict { pass: false, detail: failures.join("; ") }
    }
}

/// Names of the failing results among those whose name ends with one of
/// `suffixes`, and how many matched.
fn failures_among(results: &[CheckResult], suffixes: &[&str]) -> (Vec<String>, usize) {
    let selected: Vec<&CheckResult> =
        results.iter().filter(|r| suffixes.iter().any(|s| r.name.ends_with(s))).collect();
    let failed = selected.iter().filter(|r| !r.passed()).map(|r| format!("{}: {}", r.name, r.detail)).collect();
    (failed, selected.len())
}

fn initial_results() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for (file, _) in POLYNOMIAL_CORPUS {
        let env = load(file).expect("corpus declaration elaborates");
        out.extend(initial_suite(&env, &cfg()));
    }
    out
}

/// `c(d) = Σ |Aᵢ| c(d-1)^kᵢ` worked out by hand for the corpus at depth 4,
/// parameters instantiated at Bool.
fn expected_tree_count(name: &str) -> usize {
    match name {
        // 1, 2, 3, 4
        "Nat" => 4,
        // 1, 3, 7, 15
        "List" => 15,
        // no constant constructor
        "Proc" => 0,
        // 1, 4, 25, 676
        "Mix" => 676,
        _ => unreachable!(),
    }
}

fn per_type(results: &[CheckResult], check: &str) -> (Vec<String>, usize) {
    let names: Vec<String> = POLYNOMIAL_CORPUS.iter().map(|(_, t)| format!("initial/{t}/{check}")).collect();
    let mut failures = Vec::new();
    for n in &names {
        match results.iter().find(|r| &r.name == n) {
            Some(r) if r.passed() => {}
            Some(r) => failures.push(format!("{n}: {}", r.detail)),
            None => failures.push(format!("{n}: missing")),
        }
    }
    (failures, names.len())
}

fn criterion_1(results: &[CheckResult]) -> Verdict {
    let (mut failures, n) = per_type(results, "fold-equation");
    for (file, name) in POLYNOMIAL_CORPUS {
        let env = load(file).expect("corpus declaration elaborates");
        let Ok(TypeEntry::Free(e)) = env.instantiate_all(name, &Ty::Bool) else {
            failures.push(format!("{name} is not a free type"));
            continue;
        };
        let got = tree_set(&e.handle, TREE_DEPTH).map(|s| s.trees.len());
        if got.as_ref().ok() != Some(&expected_tree_count(name)) {
            failures.push(format!("{name}: {got:?} trees, expected {}", expected_tree_count(name)));
        }
    }
    verdict(failures, format!("{n} signatures, trees of depth ≤ {TREE_DEPTH}, counts 4/15/0/676"))
}

fn criterion_2(results: &[CheckResult]) -> Verdict {
    let (failures, n) = per_type(results, "fold-uniqueness");
    verdict(failures, format!("{n} signatures, carriers of size ≤ 3, no second solution"))
}

fn criterion_3(results: &[CheckResult]) -> Verdict {
    let (failures, n) = per_type(results, "lambek");
    verdict(failures, format!("{n} signatures, both composites identities on depth ≤ {TREE_DEPTH}"))
}

fn criterion_4(results: &[CheckResult]) -> Verdict {
    let (mut failures, _) = per_type(results, "primrec");
    let (more, _) = failures_among(results, &["builtin/primrec-pred", "builtin/primrec-length"]);
    failures.extend(more);
    // predecessor by primitive recursion against n ↦ n - 1 on Nat as u64
    let nat = build_initial(&nat_nf()).expect("Nat builds");
    let to_u64 = Algebra::from_fn(2, |i, _, xs, _| {
        Ok(match i {
            0 => PVal::nat(0),
            _ => PVal::nat(xs[0].as_u64().unwrap_or(0) + 1),
        })
    });
    // the body sees (t, pred t) and returns t read as a number
    let handle = nat.clone();
    let pred_num = Algebra::from_fn(2, move |i, _, pairs, fuel| {
        if i == 0 {
            return Ok(PVal::nat(0));
        }
        let (t, _) = pairs[0].as_pair().ok_or(InitialError::NotInCarrier("pair expected".into()))?;
        let t = DTreeVal::from_pval(t).ok_or(InitialError::NotInCarrier("tree expected".into()))?;
        handle.fold(&to_u64, &t, fuel)
    });
    for n in 0..=20u64 {
        let t = nat_tree(&nat, n).expect("numeral builds");
        let got = nat.primrec(&pred_num, &t, &mut Fuel::new(1_000_000)).expect("primrec evaluates");
        if got.as_u64() != Some(n.saturating_sub(1)) {
            failures.push(format!("pred {n} = {got}"));
        }
    }
    verdict(failures, "π₁ ∘ g = id on every tree; pred n = n - 1 (pred 0 = 0) for n ≤ 20; length exact".into())
}

fn criterion_5(results: &[CheckResult]) -> Verdict {
    let (mut failures, _) = failures_among(results, &["builtin/list-object"]);
    // list_fold with a non-commutative step against Iterator::rfold
    let step = |x: &PVal, acc: &PVal, _: &mut Fuel| -> Result<PVal, InitialError> {
        Ok(PVal::nat(acc.as_u64().unwrap_or(0) * 10 + x.as_u64().unwrap_or(0)))
    };
    let mut count = 0;
    for len in 0..=6u32 {
        for code in 0..3u64.pow(len) {
            let xs: Vec<u64> = (0..len).map(|i| code / 3u64.pow(i) % 3).collect();
            let mut l = list_nil();
            for x in xs.iter().rev() {
                l = list_cons(&PVal::nat(*x), &l).expect("cons");
            }
            let mut fuel = Fuel::new(1_000_000);
            let got = list_fold(&PVal::nat(0), &step, &l, &mut fuel).expect("fold");
            let expected = xs.iter().rfold(0u64, |acc, x| acc * 10 + x);
            let back: Vec<Option<u64>> = list_to_vec(&l, &mut fuel).expect("elements").iter().map(|v| v.as_u64()).collect();
            count += 1;
            if got.as_u64() != Some(expected) || back != xs.iter().map(|x| Some(*x)).collect::<Vec<_>>() {
                failures.push(format!("{xs:?}: fold {got}, oracle {expected}"));
            }
        }
    }
    verdict(failures, format!("invariant after every cons sequence of length ≤ 6; {count} lists fold like foldr"))
}

fn criterion_6() -> Verdict {
    let env = load("streams.qk").expect("cotypes elaborate");
    let results = final_suite(&env, &CheckConfig { obs_depth: PATH_LENGTH, ..cfg() });
    let mut failures: Vec<String> =
        results.iter().filter(|r| !r.passed()).map(|r| format!("{}: {}", r.name, r.detail)).collect();
    let coalgebras: std::collections::BTreeSet<String> = results
        .iter()
        .filter(|r| r.name.ends_with("/membership"))
        .map(|r| r.name.trim_end_matches("/membership").to_string())
        .collect();
    if coalgebras.len() != 3 {
        failures.push(format!("{} coalgebras checked, expected 3", coalgebras.len()));
    }
    // counter stream: hd after k tails is k
    let mut fuel = Fuel::new(1_000_000);
    let nats = env_with_counter();
    for k in 0..=8u64 {
        let expr = format!("hd {}nats{}", "(tl ".repeat(k as usize), ")".repeat(k as usize));
        let v = nats.eval_str(&expr, &mut fuel);
        if v.as_ref().ok().and_then(|v| v.as_u64()) != Some(k) {
            failures.push(format!("{expr} = {v:?}"));
        }
    }
    verdict(failures, format!("{} coalgebras, paths of length ≤ {PATH_LENGTH}; counter at k is k for k ≤ 8", coalgebras.len()))
}

fn env_with_counter() -> ElabEnv {
    let src = "cotype Stream ::= (hd: Nat; tl: Stream)\nlet nats = unfold (\\n -> (n, succ n)) 0";
    elaborate_items(&parse_items(src).expect("parses")).expect("elaborates")
}

fn criterion_7(results: &[CheckResult]) -> Verdict {
    let (mut failures, _) = failures_among(results, &["builtin/coproduct-encoding"]);
    let mut values = Ty::sum(Ty::Bool, Ty::Bool).enumerate().expect("finite");
    values.push(PVal::Undefined);
    let mut fuel = Fuel::new(100_000);
    for v in &values {
        let t = encode_sum_as_triple(v).expect("encodes");
        let back = decode_triple(&t, &mut fuel).expect("decodes");
        if !back.structurally_eq(v) || t.is_defined() != v.is_defined() {
            failures.push(format!("{v} round-trips to {back}"));
        }
        let f = &mut |x: &PVal| -> Result<PVal, InitialError> { Ok(PVal::pair(PVal::nat(0), x.clone())) };
        let g = &mut |y: &PVal| -> Result<PVal, InitialError> { Ok(PVal::pair(PVal::nat(1), y.clone())) };
        let via_triple = triple_case::<InitialError>(f, g, &t, &mut fuel).expect("copairing");
        let direct = sumcase::<InitialError>(f, g, v).expect("sumcase");
        let oracle = match v {
            PVal::Inl(x) => PVal::pair(PVal::nat(0), (**x).clone()),
            PVal::Inr(y) => PVal::pair(PVal::nat(1), (**y).clone()),
            _ => PVal::Undefined,
        };
        if !via_triple.structurally_eq(&oracle) || !direct.structurally_eq(&oracle) {
            failures.push(format!("copairing on {v}: triple {via_triple}, sumcase {direct}"));
        }
    }
    verdict(failures, format!("{} values of Bool + Bool and ⊥; round trip, copairing and definedness exact", values.len()))
}

fn criterion_8(results: &[CheckResult]) -> Verdict {
    let (mut failures, _) = failures_among(results, &["builtin/induction"]);
    let predicates: [(&str, fn(u64) -> bool); 5] = [
        ("true", |_| true),
        ("n < 7", |n| n < 7),
        ("n ≠ 13", |n| n != 13),
        ("n² < 200", |n| n * n < 200),
        ("n mod 5 < 4", |n| n % 5 < 4),
    ];
    for (name, p) in predicates {
        let table = induction_table(&p, 20).expect("table");
        for (n, q, _) in table {
            let oracle = (0..=n).all(p);
            if q != oracle {
                failures.push(format!("{name}: Q({n}) = {q}, ∀m ≤ n. P(m) = {oracle}"));
            }
        }
    }
    verdict(failures, "5 predicates, n ≤ 20, Q(n) ⇔ ∀m ≤ n. P(m)".into())
}

fn criterion_9() -> Verdict {
    let env = ElabEnv::empty();
    let results = cpo_suite(&env, &cfg());
    let (mut failures, n) = failures_among(
        &results,
        &["builtin/chain-sup", "builtin/lfp-factorial", "builtin/lfp-minimal", "builtin/sum-stability"],
    );
    if n != 4 {
        failures.push(format!("{n} of 4 built-in cpo checks ran"));
    }
    let cpo = pfun_cpo(Ty::Nat, flat_cpo(Ty::Nat));
    let mut fuel = Fuel::new(10_000_000);
    let fix = lfp(&cpo, &*factorial_functional(), 32, &mut fuel).expect("iterates");
    let at5 = fix.value.apply(&PVal::nat(5), &mut fuel).expect("applies");
    if at5.as_u64() != Some(120) {
        failures.push(format!("lfp(F)(5) = {at5}"));
    }
    // a chain over Bool + Unit that turns defined at step 2
    let sum = sum_cpo(flat_cpo(Ty::Bool), flat_cpo(Ty::Unit));
    let chain = [PVal::Undefined, PVal::Undefined, PVal::inr(PVal::Unit), PVal::inr(PVal::Unit)];
    let s = sum.sup_of(&chain, &mut fuel).expect("sup");
    if !s.value.structurally_eq(&PVal::inr(PVal::Unit)) {
        failures.push(format!("sup of ⊥ ⊥ inr() inr() = {}", s.value));
    }
    verdict(failures, format!("lfp(F)(5) = {at5}; chain sups, minimality and sum stability exact"))
}

fn criterion_10() -> Verdict {
    let mut failures = Vec::new();
    let mut count = 0;
    for file in ["nat.qk", "list.qk", "proc_free.qk", "mixed.qk", "streams.qk"] {
        let env = load(file).expect("corpus declaration elaborates");
        let results = cpo_suite(&env, &cfg());
        let (f, n) = failures_among(
            &results,
            &[
                "/order",
                "/constructor-monotone",
                "/constructor-continuous",
                "/fold-monotone",
                "/fold-continuous",
                "/sup-closed",
            ],
        );
        failures.extend(f);
        count += n;
    }
    if count != 4 * 5 + 2 {
        failures.push(format!("{count} domain checks ran, expected 22"));
    }
    verdict(failures, format!("{count} checks over comparable pairs and 2 to 3 element chains"))
}

fn criterion_11() -> Verdict {
    let mut results = lab_suite(LabTarget::Spap);
    results.extend(lab_suite(LabTarget::Rere));
    results.extend(lab_suite(LabTarget::Mtypes));
    let (mut failures, _) = failures_among(
        &results,
        &["spap/regular-zero-to-one", "mtypes/counterexample", "rere/coarse-iff-indiscrete", "rere/nno-truncation"],
    );
    let m = FinMor::new(&initial(Category::SpaP), &terminal(Category::SpaP), vec![]).expect("0 → 1");
    let r = is_regular_mono(&m).expect("decidable");
    // (∅, {∅}): no atoms, the empty set as its only member
    let witness = FinObj::spap(0, [0u32]).expect("valid object");
    if r.regular || r.regular_subobject != witness {
        failures.push(format!("SpaP 0 → 1 regular {}, subobject {}", r.regular, r.regular_subobject));
    }
    for n in 1..=4 {
        let indiscrete = is_coarse(&FinObj::indiscrete(n)).expect("decidable");
        let discrete = is_coarse(&FinObj::discrete(n)).expect("decidable");
        // discrete objects on one atom are also indiscrete
        if !indiscrete || discrete != (n == 1) {
            failures.push(format!("size {n}: indiscrete coarse {indiscrete}, discrete coarse {discrete}"));
        }
    }
    verdict(failures, "SpaP regular(0 → 1) = false, witness (∅,{∅}); |P_q(1_∅)| = 0; coarse ⇔ indiscrete; truncation not coarse".into())
}

fn criterion_12() -> Verdict {
    let mut failures = Vec::new();
    for file in ["illegal_abs.qk", "illegal_cont.qk"] {
        match load(file) {
            Err(SurfaceError::NegativeOccurrence { .. }) => {}
            other => failures.push(format!("{file}: {:?}", other.err())),
        }
    }
    match load("tree.qk") {
        Err(SurfaceError::UnsupportedTypeFormer { .. }) => {}
        other => failures.push(format!("tree.qk: {:?}", other.err())),
    }
    verdict(failures, "abs(L → L) and abs((L a → a) → a) negative; infinitely branching Tree unsupported".into())
}

#[test]
fn acceptance_criteria() {
    let initial = initial_results();
    let verdicts = [
        ("fold equation", criterion_1(&initial)),
        ("fold uniqueness", criterion_2(&initial)),
        ("Lambek", criterion_3(&initial)),
        ("primitive recursion", criterion_4(&initial)),
        ("list object", criterion_5(&initial)),
        ("unfold", criterion_6()),
        ("coproduct encoding", criterion_7(&initial)),
        ("induction via fold", criterion_8(&initial)),
        ("cpo", criterion_9()),
        ("domain datatypes", criterion_10()),
        ("lab certifications", criterion_11()),
        ("negative declarations", criterion_12()),
    ];
    // written to the stdout handle so the lines survive test capture
    let mut out = std::io::stdout().lock();
    let mut all = true;
    for (i, (name, v)) in verdicts.iter().enumerate() {
        writeln!(
            out,
            "criterion {:>2} {:<22} {} (tolerance: exact, at most {MAX_FAILURES} failures) {}",
            i + 1,
            name,
            if v.pass { "PASS" } else { "FAIL" },
            v.detail
        )
        .expect("stdout");
        all &= v.pass;
    }
    assert!(all, "some acceptance criteria failed");
}

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::equality::{eq_existential_with, restrict};
use super::value::{Fuel, PFun, PVal};
use super::KernelError;

/// Kernel expressions.
#[derive(Clone, Debug)]
pub enum Term {
    Var(String),
    Lit(PVal),
    Lam(String, Arc<Term>),
    App(Arc<Term>, Arc<Term>),
    Pair(Arc<Term>, Arc<Term>),
    Fst(Arc<Term>),
    Snd(Arc<Term>),
    Inl(Arc<Term>),
    Inr(Arc<Term>),
    /// `case s of inl x → l | inr y → r`
    Case { scrutinee: Arc<Term>, left: (String, Arc<Term>), right: (String, Arc<Term>) },
    /// `t ↾ cond`
    Restrict(Arc<Term>, Arc<Term>),
    /// Existential equality at a fixed observation depth, as a boolean.
    Eq(Arc<Term>, Arc<Term>),
    Let(String, Arc<Term>, Arc<Term>),
}

impl Term {
    pub fn var(x: &str) -> Term {
        Term::Var(x.to_string())
    }

    pub fn lam(x: &str, body: Term) -> Term {
        Term::Lam(x.to_string(), Arc::new(body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::App(Arc::new(f), Arc::new(a))
    }

    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(a: Term, b: Term) -> Term {
        Term::Pair(Arc::new(a), Arc::new(b))
    }

    pub fn inl(a: Term) -> Term {
        Term::Inl(Arc::new(a))
    }

    pub fn inr(a: Term) -> Term {
        Term::Inr(Arc::new(a))
    }

    pub fn restrict(t: Term, cond: Term) -> Term {
        Term::Restrict(Arc::new(t), Arc::new(cond))
    }

    pub fn case(s: Term, x: &str, l: Term, y: &str, r: Term) -> Term {
        Term::Case { scrutinee: Arc::new(s), left: (x.to_string(), Arc::new(l)), right: (y.to_string(), Arc::new(r)) }
    }

    pub fn lit(v: impl Into<PVal>) -> Term {
        Term::Lit(v.into())
    }

    /// The undefined term.
    pub fn bot() -> Term {
        Term::Lit(PVal::Undefined)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(x) => write!(f, "{x}"),
            Term::Lit(v) => write!(f, "{v}"),
            Term::Lam(x, b) => write!(f, "(λ{x}. {b})"),
            Term::App(a, b) => write!(f, "({a} {b})"),
            Term::Pair(a, b) => write!(f, "({a}, {b})"),
            Term::Fst(a) => write!(f, "fst {a}"),
            Term::Snd(a) => write!(f, "snd {a}"),
            Term::Inl(a) => write!(f, "inl {a}"),
            Term::Inr(a) => write!(f, "inr {a}"),
            Term::Case { scrutinee, left, right } => {
                write!(f, "case {scrutinee} of inl {} → {} | inr {} → {}", left.0, left.1, right.0, right.1)
            }
            Term::Restrict(a, c) => write!(f, "({a} ↾ {c})"),
            Term::Eq(a, b) => write!(f, "({a} = {b})"),
            Term::Let(x, a, b) => write!(f, "let {x} = {a} in {b}"),
        }
    }
}

/// A persistent binding environment.
#[derive(Clone, Debug, Default)]
pub struct Env {
    bindings: Arc<BTreeMap<String, PVal>>,
}

impl Env {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn bind(&self, name: &str, v: PVal) -> Env {
        let mut m = (*self.bindings).clone();
        m.insert(name.to_string(), v);
        Env { bindings: Arc::new(m) }
    }

    pub fn insert(&mut self, name: &str, v: PVal) {
        Arc::make_mut(&mut self.bindings).insert(name.to_string(), v);
    }

    pub fn get(&self, name: &str) -> Option<&PVal> {
        self.bindings.get(name)
    }

    pub fn names(&self) -> impl Iterator<Item = &String> {
        self.bindings.keys()
    }
}

/// Observation depth used by [`Term::Eq`].
const EQ_DEPTH: usize = 4;

/// Call-by-value evaluation. Every constructor and elimination is strict,
/// so an undefined argument makes the whole application undefined; only
/// the branches of `case` are evaluated lazily.
pub fn eval(term: &Term, env: &Env, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    fuel.tick()?;
    Ok(match term {
        Term::Var(x) => env.get(x).cloned().ok_or_else(|| KernelError::UnboundName(x.clone()))?,
        Term::Lit(v) => v.clone(),
        Term::Lam(x, body) => {
            let (x, body, env) = (x.clone(), body.clone(), env.clone());
            PVal::Fun(PFun::new(move |arg, fuel| eval(&body, &env.bind(&x, arg.clone()), fuel)))
        }
        Term::App(f, a) => {
            let fv = eval(f, env, fuel)?;
            let av = eval(a, env, fuel)?;
            if !fv.is_defined() || !av.is_defined() {
                PVal::Undefined
            } else {
                fv.apply(&av, fuel)?
            }
        }
        Term::Pair(a, b) => {
            let av = eval(a, env, fuel)?;
            let bv = eval(b, env, fuel)?;
            PVal::pair(av, bv)
        }
        Term::Fst(a) | Term::Snd(a) => match eval(a, env, fuel)? {
            PVal::Undefined => PVal::Undefined,
            PVal::Pair(x, y) => {
                if matches!(term, Term::Fst(_)) {
                    (*x).clone()
                } else {
                    (*y).clone()
                }
            }
            other => return Err(KernelError::TypeMismatch(format!("projection of non-pair {other}"))),
        },
        Term::Inl(a) => PVal::inl(eval(a, env, fuel)?),
        Term::Inr(a) => PVal::inr(eval(a, env, fuel)?),
        Term::Case { scrutinee, left, right } => match eval(scrutinee, env, fuel)? {
            PVal::Undefined => PVal::Undefined,
            PVal::Inl(x) => eval(&left.1, &env.bind(&left.0, (*x).clone()), fuel)?,
            PVal::Inr(y) => eval(&right.1, &env.bind(&right.0, (*y).clone()), fuel)?,
            other => return Err(KernelError::TypeMismatch(format!("case on non-sum {other}"))),
        },
        Term::Restrict(t, c) => {
            let v = eval(t, env, fuel)?;
            let cv = eval(c, env, fuel)?;
            if cv.is_defined() && cv.as_bool().is_none() {
                return Err(KernelError::TypeMismatch(format!("restriction by non-boolean {cv}")));
            }
            restrict(&v, &cv)
        }
        Term::Eq(a, b) => {
            let av = eval(a, env, fuel)?;
            let bv = eval(b, env, fuel)?;
            if !av.is_defined() || !bv.is_defined() {
                PVal::Undefined
            } else {
                PVal::bool(eq_existential_with(&av, &bv, EQ_DEPTH, fuel)?)
            }
        }
        Term::Let(x, a, b) => {
            let av = eval(a, env, fuel)?;
            if !av.is_defined() {
                PVal::Undefined
            } else {
                eval(b, &env.bind(x, av), fuel)?
            }
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(t: &Term) -> PVal {
        eval(t, &Env::new(), &mut Fuel::default()).unwrap()
    }

    #[test]
    fn beta_only_for_defined_arguments() {
        let id = Term::lam("x", Term::var("x"));
        assert!(!run(&Term::app(id, Term::bot())).is_defined());
        let k = Term::lam("x", Term::lit(PVal::Unit));
        assert!(!run(&Term::app(k.clone(), Term::bot())).is_defined());
        assert_eq!(run(&Term::app(k, Term::lit(3u64))), PVal::Unit);
    }

    #[test]
    fn restriction_by_false_is_undefined() {
        assert!(!run(&Term::restrict(Term::lit(5u64), Term::lit(false))).is_defined());
        assert_eq!(run(&Term::restrict(Term::lit(5u64), Term::lit(true))), PVal::nat(5));
    }

    #[test]
    fn unbound_names_and_fuel() {
        let err = eval(&Term::var("nope"), &Env::new(), &mut Fuel::default()).unwrap_err();
        assert_eq!(err, KernelError::UnboundName("nope".into()));
        // ω = (λx. x x)(λx. x x) runs out of fuel rather than being undefined
        let w = Term::lam("x", Term::app(Term::var("x"), Term::var("x")));
        let err = eval(&Term::app(w.clone(), w), &Env::new(), &mut Fuel::new(500)).unwrap_err();
        assert_eq!(err, KernelError::FuelExhausted);
    }

    #[test]
    fn case_is_lazy_in_branches() {
        let t = Term::case(Term::inl(Term::lit(2u64)), "x", Term::var("x"), "y", Term::var("unbound"));
        assert_eq!(run(&t), PVal::nat(2));
    }
}

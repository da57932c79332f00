//! Lists as `1 + (l : Nat ⇀ A, n : Nat)` with `def (l m) ⇔ m ≤ n`.

use crate::kernel::{Fuel, PFun, PVal, Ty};

use super::InitialError;

/// An encoded list value: `inl ()` or `inr (l, n)`.
pub type EncList = PVal;

pub fn list_nil() -> EncList {
    PVal::inl(PVal::Unit)
}

/// `cons x l`. The singleton case needs an undefined element, obtained
/// from `x` itself as `x ↾ ⊥`; the other case shifts the index map.
pub fn list_cons(x: &PVal, l: &EncList) -> Result<EncList, InitialError> {
    if !x.is_defined() || !l.is_defined() {
        return Ok(PVal::Undefined);
    }
    let x = x.clone();
    match l {
        PVal::Inl(_) => {
            let f = PFun::new(move |k, _| {
                Ok(if k.is_zero_nat() { x.clone() } else { crate::kernel::restrict(&x, &PVal::ff()) })
            });
            Ok(PVal::inr(PVal::pair(PVal::Fun(f.with_domain(Ty::Nat)), PVal::nat(0))))
        }
        PVal::Inr(cell) => {
            let (old, n) = cell.as_pair().ok_or_else(|| bad(l))?;
            let old = old.clone();
            let f = PFun::new(move |k, fuel| {
                let Some(kn) = k.as_nat() else { return Ok(PVal::Undefined) };
                if k.is_zero_nat() {
                    Ok(x.clone())
                } else {
                    old.apply(&PVal::Nat(kn - 1u32), fuel)
                }
            });
            Ok(PVal::inr(PVal::pair(PVal::Fun(f.with_domain(Ty::Nat)), n.succ())))
        }
        _ => Err(bad(l)),
    }
}

fn bad(l: &PVal) -> InitialError {
    InitialError::InvariantViolation(format!("{l} is not an encoded list"))
}

/// Checks `def (l m) ⇔ m ≤ n` for `m ≤ n + 2`.
fn check_invariant(l: &PVal, n: u64, fuel: &mut Fuel) -> Result<(), InitialError> {
    for m in 0..=n + 2 {
        let defined = l.apply(&PVal::nat(m), fuel)?.is_defined();
        if defined != (m <= n) {
            return Err(InitialError::InvariantViolation(format!(
                "l {m} is {} but the length index is {n}",
                if defined { "defined" } else { "undefined" }
            )));
        }
    }
    Ok(())
}

/// `fold c f`, through the auxiliary `h` recursing on the length index:
/// `h l 0 = f (l 0) c`, `h l (suc n) = f (l 0) (h (λk. l (suc k)) n)`.
pub fn list_fold(
    c: &PVal,
    f: &dyn Fn(&PVal, &PVal, &mut Fuel) -> Result<PVal, InitialError>,
    list: &EncList,
    fuel: &mut Fuel,
) -> Result<PVal, InitialError> {
    match list {
        PVal::Undefined => Ok(PVal::Undefined),
        PVal::Inl(_) => Ok(c.clone()),
        PVal::Inr(cell) => {
            let (l, n) = cell.as_pair().ok_or_else(|| bad(list))?;
            let n = n.as_u64().ok_or_else(|| bad(list))?;
            check_invariant(l, n, fuel)?;
            h(c, f, l.clone(), n, fuel)
        }
        _ => Err(bad(list)),
    }
}

fn h(
    c: &PVal,
    f: &dyn Fn(&PVal, &PVal, &mut Fuel) -> Result<PVal, InitialError>,
    l: PVal,
    n: u64,
    fuel: &mut Fuel,
) -> Result<PVal, InitialError> {
    fuel.tick()?;
    let head = l.apply(&PVal::nat(0), fuel)?;
    let rest = if n == 0 {
        c.clone()
    } else {
        let tail = PVal::Fun(PFun::new(move |k, fuel| l.apply(&k.succ(), fuel)).with_domain(Ty::Nat));
        h(c, f, tail, n - 1, fuel)?
    };
    if !head.is_defined() || !rest.is_defined() {
        return Ok(PVal::Undefined);
    }
    f(&head, &rest, fuel)
}

/// The elements, in order.
pub fn list_to_vec(list: &EncList, fuel: &mut Fuel) -> Result<Vec<PVal>, InitialError> {
    let snoc = |x: &PVal, acc: &PVal, _: &mut Fuel| -> Result<PVal, InitialError> {
        // accumulate as a right-nested chain (x, acc) terminated by ()
        Ok(PVal::pair(x.clone(), acc.clone()))
    };
    let mut chain = list_fold(&PVal::Unit, &snoc, list, fuel)?;
    let mut out = Vec::new();
    while let Some((x, rest)) = chain.as_pair() {
        out.push(x.clone());
        chain = rest.clone();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn singleton_is_defined_only_at_zero() {
        let mut fuel = Fuel::default();
        let l = list_cons(&PVal::nat(5), &list_nil()).unwrap();
        let (f, n) = match &l {
            PVal::Inr(c) => c.as_pair().unwrap(),
            _ => panic!("not a cons cell"),
        };
        assert_eq!(n, &PVal::nat(0));
        assert_eq!(f.apply(&PVal::nat(0), &mut fuel).unwrap(), PVal::nat(5));
        assert!(!f.apply(&PVal::nat(1), &mut fuel).unwrap().is_defined());
    }

    #[test]
    fn fold_of_nil_is_the_constant() {
        let mut fuel = Fuel::default();
        let f = |_: &PVal, _: &PVal, _: &mut Fuel| Ok(PVal::Unit);
        assert_eq!(list_fold(&PVal::nat(9), &f, &list_nil(), &mut fuel).unwrap(), PVal::nat(9));
    }
}

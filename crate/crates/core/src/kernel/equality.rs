//! Existential and strong equality on partial values.
//!
//! Functions are compared extensionally on a finite sample of arguments:
//! the samples of their declared domain, the union of their finite graphs,
//! or by default `()`, the naturals below the depth and the paths over
//! those naturals shorter than the depth. Functions given by path tables
//! are compared exactly. Sampled comparison is an approximation; function
//! types have no decidable equality.

use super::path::PathMap;
use super::value::{encode_nat_path, Fuel, PFun, PVal};
use super::KernelError;

/// `v ↾ cond`: `v` if `v` is defined and `cond` is `true`, else undefined.
pub fn restrict(v: &PVal, cond: &PVal) -> PVal {
    if v.is_defined() && cond.as_bool() == Some(true) {
        v.clone()
    } else {
        PVal::Undefined
    }
}

/// Both sides defined and observationally equal up to `depth`.
pub fn eq_existential(a: &PVal, b: &PVal, depth: usize) -> Result<bool, KernelError> {
    eq_existential_with(a, b, depth, &mut Fuel::default())
}

/// Both undefined, or existentially equal.
pub fn eq_strong(a: &PVal, b: &PVal, depth: usize) -> Result<bool, KernelError> {
    eq_strong_with(a, b, depth, &mut Fuel::default())
}

pub fn eq_strong_with(a: &PVal, b: &PVal, depth: usize, fuel: &mut Fuel) -> Result<bool, KernelError> {
    match (a.is_defined(), b.is_defined()) {
        (false, false) => Ok(true),
        (true, true) => eq_existential_with(a, b, depth, fuel),
        _ => Ok(false),
    }
}

pub fn eq_existential_with(a: &PVal, b: &PVal, depth: usize, fuel: &mut Fuel) -> Result<bool, KernelError> {
    match (a, b) {
        (PVal::Undefined, _) | (_, PVal::Undefined) => Ok(false),
        (PVal::Unit, PVal::Unit) => Ok(true),
        (PVal::Nat(x), PVal::Nat(y)) => Ok(x == y),
        (PVal::Pair(a1, a2), PVal::Pair(b1, b2)) => {
            Ok(eq_existential_with(a1, b1, depth, fuel)? && eq_existential_with(a2, b2, depth, fuel)?)
        }
        (PVal::Inl(x), PVal::Inl(y)) | (PVal::Inr(x), PVal::Inr(y)) => eq_existential_with(x, y, depth, fuel),
        (PVal::Inl(_), PVal::Inr(_)) | (PVal::Inr(_), PVal::Inl(_)) => Ok(false),
        (PVal::Fun(f), PVal::Fun(g)) => fun_eq(f, g, depth, fuel),
        _ => Err(KernelError::IncomparableTypes(a.to_string(), b.to_string())),
    }
}

fn fun_eq(f: &PFun, g: &PFun, depth: usize, fuel: &mut Fuel) -> Result<bool, KernelError> {
    if let (Some(m), Some(n)) = (f.as_path_map(), g.as_path_map()) {
        return path_maps_eq(m, n, depth, fuel);
    }
    if depth == 0 {
        return Ok(true);
    }
    for x in sample_arguments(f, g, depth)? {
        let fx = apply_lenient(f, &x, fuel)?;
        let gx = apply_lenient(g, &x, fuel)?;
        if !eq_strong_with(&fx, &gx, depth - 1, fuel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

fn path_maps_eq(m: &PathMap<PVal>, n: &PathMap<PVal>, depth: usize, fuel: &mut Fuel) -> Result<bool, KernelError> {
    for p in m.representatives(n) {
        let x = m.get(&p).cloned().unwrap_or(PVal::Undefined);
        let y = n.get(&p).cloned().unwrap_or(PVal::Undefined);
        if !eq_strong_with(&x, &y, depth, fuel)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Applies `f`, reading an argument of the wrong shape as undefinedness.
fn apply_lenient(f: &PFun, x: &PVal, fuel: &mut Fuel) -> Result<PVal, KernelError> {
    match f.apply(x, fuel) {
        Err(KernelError::TypeMismatch(_)) => Ok(PVal::Undefined),
        other => other,
    }
}

fn sample_arguments(f: &PFun, g: &PFun, depth: usize) -> Result<Vec<PVal>, KernelError> {
    if let Some(ty) = f.domain().or(g.domain()) {
        if let Ok(xs) = ty.samples(depth) {
            return Ok(xs);
        }
    }
    if let (Some(xs), Some(ys)) = (f.finite_support(), g.finite_support()) {
        let mut out = xs;
        for y in ys {
            if !out.iter().any(|x| x.structurally_eq(&y)) {
                out.push(y);
            }
        }
        return Ok(out);
    }
    let mut out = vec![PVal::Unit];
    out.extend((0..depth as u64).map(PVal::nat));
    out.extend(nat_paths(depth).iter().map(|p| encode_nat_path(p)));
    for extra in [f.finite_support(), g.finite_support()].into_iter().flatten() {
        out.extend(extra);
    }
    Ok(out)
}

/// Paths over `0..depth` of length below `depth`.
fn nat_paths(depth: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    let mut frontier: Vec<Vec<u64>> = vec![vec![]];
    for _ in 1..depth {
        let mut next = Vec::new();
        for p in &frontier {
            for c in 0..depth as u64 {
                let mut q = p.clone();
                q.push(c);
                next.push(q);
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    #[test]
    fn existential_requires_definedness() {
        assert!(!eq_existential(&PVal::Undefined, &PVal::Undefined, 4).unwrap());
        assert!(eq_strong(&PVal::Undefined, &PVal::Undefined, 4).unwrap());
        assert!(!eq_strong(&PVal::nat(3), &PVal::Undefined, 4).unwrap());
        assert!(!eq_strong(&PVal::tt(), &PVal::ff(), 4).unwrap());
    }

    #[test]
    fn undefined_components_are_not_existentially_equal() {
        // built from the raw variants: the strict smart constructor would collapse it
        let p = PVal::Pair(Arc::new(PVal::nat(1)), Arc::new(PVal::Undefined));
        assert!(!eq_existential(&p, &p.clone(), 4).unwrap());
    }

    #[test]
    fn mismatched_shapes_are_incomparable() {
        let err = eq_existential(&PVal::Unit, &PVal::nat(0), 4).unwrap_err();
        assert!(matches!(err, KernelError::IncomparableTypes(..)));
    }

    #[test]
    fn functions_compare_on_samples() {
        let f = PVal::Fun(PFun::pure(|x| x.succ()));
        let g = PVal::Fun(PFun::pure(|x| x.succ()));
        let h = PVal::Fun(PFun::pure(|x| x.clone()));
        assert!(eq_existential(&f, &g, 4).unwrap());
        assert!(!eq_existential(&f, &h, 4).unwrap());
    }
}

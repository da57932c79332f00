//! M-types for a finite fiber map `q : B → A`, and the comparison of
//! `P_q` with the extended polynomial functor `(B_l → X) + (B_r → X)`.

use std::collections::BTreeMap;

use crate::kernel::{decode_path, encode_path, eq_strong_with, Fuel, KernelError, PFun, PVal, Ty};
use crate::lab::{coproduct, hom_set, partial_morphisms_on, FinObj, LabError};

use super::{Coalgebra, FinalError, PTreeVal};

/// Labels with their fibers. Label `a` is encoded as `nat a`; direction
/// `b` as `nat` of its position in the concatenated fibers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MSignature {
    pub fibers: Vec<(String, Vec<String>)>,
}

impl MSignature {
    pub fn new(fibers: impl IntoIterator<Item = (&'static str, Vec<&'static str>)>) -> Self {
        MSignature {
            fibers: fibers
                .into_iter()
                .map(|(a, bs)| (a.to_string(), bs.into_iter().map(str::to_string).collect()))
                .collect(),
        }
    }
}

#[derive(Clone, Debug)]
pub struct MType {
    sig: MSignature,
    /// `q` on direction indices.
    q: Vec<u64>,
}

pub fn build_mtype(sig: &MSignature) -> Result<MType, FinalError> {
    let mut seen: BTreeMap<&str, &str> = BTreeMap::new();
    let mut q = Vec::new();
    for (a, (label, bs)) in sig.fibers.iter().enumerate() {
        for b in bs {
            if let Some(prev) = seen.insert(b, label) {
                return Err(FinalError::NonDisjointFibers(format!("{b} lies over both {prev} and {label}")));
            }
            q.push(a as u64);
        }
    }
    Ok(MType { sig: sig.clone(), q })
}

impl MType {
    pub fn signature(&self) -> &MSignature {
        &self.sig
    }

    pub fn label(&self, name: &str) -> Option<PVal> {
        self.sig.fibers.iter().position(|(a, _)| a == name).map(|a| PVal::nat(a as u64))
    }

    pub fn direction(&self, name: &str) -> Option<PVal> {
        self.sig.fibers.iter().flat_map(|(_, bs)| bs).position(|b| b == name).map(|b| PVal::nat(b as u64))
    }

    /// The directions in the fiber over label `a`.
    pub fn fiber(&self, a: u64) -> Vec<PVal> {
        (0..self.q.len()).filter(|b| self.q[*b] == a).map(|b| PVal::nat(b as u64)).collect()
    }

    pub fn q(&self, b: &PVal) -> Option<PVal> {
        let b = b.as_u64()? as usize;
        self.q.get(b).map(|a| PVal::nat(*a))
    }

    pub fn paths(&self, max_len: usize) -> Vec<Vec<PVal>> {
        let dirs: Vec<PVal> = (0..self.q.len()).map(|b| PVal::nat(b as u64)).collect();
        let mut out = vec![vec![]];
        let mut frontier = vec![vec![]];
        for _ in 0..max_len {
            let next: Vec<Vec<PVal>> = frontier
                .iter()
                .flat_map(|p: &Vec<PVal>| {
                    dirs.iter().map(move |b| {
                        let mut q = p.clone();
                        q.push(b.clone());
                        q
                    })
                })
                .collect();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// `c f = (f nil, λb : B_{f nil}. λp. f (cons b p))`, the second
    /// component undefined off the fiber.
    pub fn structure(&self, t: &PTreeVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        let root = t.observe(&[], fuel)?;
        let Some(a) = root.as_u64() else { return Ok(PVal::Undefined) };
        let (f, q) = (t.f.clone(), self.q.clone());
        let g = PFun::new(move |b, _| {
            if b.as_u64().and_then(|b| q.get(b as usize)) != Some(&a) {
                return Ok(PVal::Undefined);
            }
            let (f, b) = (f.clone(), b.clone());
            Ok(PVal::Fun(PFun::new(move |p, fuel| {
                let Some(rest) = decode_path(p) else { return Ok(PVal::Undefined) };
                let mut full = vec![b.clone()];
                full.extend(rest);
                f.apply(&encode_path(&full), fuel)
            })))
        });
        Ok(PVal::pair(root, PVal::Fun(g)))
    }

    /// `u z nil = π₁ (d z)`, `u z (cons b p) = u (π₂ (d z) b) p`.
    pub fn unfold(&self, d: &Coalgebra, z: &PVal) -> PTreeVal {
        let (d2, z2) = (d.clone(), z.clone());
        let f = PFun::new(move |p, fuel| {
            let Some(path) = decode_path(p) else { return Ok(PVal::Undefined) };
            let mut z = z2.clone();
            for b in &path {
                let dz = d2.apply(&z, fuel).map_err(KernelError::from)?;
                let Some((_, h)) = dz.as_pair() else { return Ok(PVal::Undefined) };
                z = h.apply(b, fuel)?;
                if !z.is_defined() {
                    return Ok(PVal::Undefined);
                }
            }
            let dz = d2.apply(&z, fuel).map_err(KernelError::from)?;
            Ok(dz.as_pair().map_or(PVal::Undefined, |(a, _)| a.clone()))
        });
        PTreeVal { f, generator: Some((d.clone(), z.clone())) }
    }

    /// `def (f nil)` and `def (f (snoc p b)) ⇔ q b = f p` on paths up to
    /// `max_len`.
    pub fn check_membership(&self, t: &PTreeVal, max_len: usize, fuel: &mut Fuel) -> Result<(), FinalError> {
        if !t.observe(&[], fuel)?.is_defined() {
            return Err(FinalError::NotInCarrier("f nil is undefined".into()));
        }
        for p in self.paths(max_len.saturating_sub(1)) {
            let fp = t.observe(&p, fuel)?;
            for b in 0..self.q.len() {
                let b = PVal::nat(b as u64);
                let mut q = p.clone();
                q.push(b.clone());
                let defined = t.observe(&q, fuel)?.is_defined();
                let over = fp.is_defined() && eq_strong_with(&self.q(&b).expect("index"), &fp, 4, fuel)?;
                if defined != over {
                    return Err(FinalError::NotInCarrier(format!("at path of length {} and direction {b}", p.len())));
                }
            }
        }
        Ok(())
    }
}

/// Object counts for `F(X) = (B_l → X) + (B_r → X)` and
/// `P_q(X) = Σ a. (q⁻¹(a) → X)` in subset-family spaces. Exponentials are
/// counted by their hom-sets; `P_q` by partial morphisms out of
/// `B_l + B_r` defined exactly on a fiber.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MTypeComparison {
    pub b_l: FinObj,
    pub b_r: FinObj,
    pub x: FinObj,
    pub f_count: usize,
    pub pq_count: usize,
}

impl MTypeComparison {
    pub fn counts_agree(&self) -> bool {
        self.f_count == self.pq_count
    }
}

pub fn mtype_vs_extpoly_compare(b_l: &FinObj, b_r: &FinObj, x: &FinObj) -> Result<MTypeComparison, LabError> {
    let f_count = hom_set(b_l, x).len() + hom_set(b_r, x).len();
    let (b, inl, inr) = coproduct(b_l, b_r)?;
    let pq_count = partial_morphisms_on(&b, &inl.map, x) + partial_morphisms_on(&b, &inr.map, x);
    Ok(MTypeComparison { b_l: b_l.clone(), b_r: b_r.clone(), x: x.clone(), f_count, pq_count })
}

/// `h (inl f) = (λb. case b of inl x → f x | inr y → bot (), inl ())`,
/// and symmetrically, in the kernel model.
pub fn ambient_h(v: &PVal) -> PVal {
    let (f, tag, left) = match v {
        PVal::Inl(f) => ((**f).clone(), PVal::inl(PVal::Unit), true),
        PVal::Inr(f) => ((**f).clone(), PVal::inr(PVal::Unit), false),
        _ => return PVal::Undefined,
    };
    let g = PFun::new(move |b, fuel| match (b, left) {
        (PVal::Inl(y), true) | (PVal::Inr(y), false) => f.apply(y, fuel),
        _ => Ok(PVal::Undefined),
    });
    PVal::pair(PVal::Fun(g), tag)
}

/// Checks in the kernel model that [`ambient_h`] is a bijection from
/// `F(X)` onto `P_q(X) = (f : B ⇀ X; a : 1 + 1. ∀b. def (f b) ⇔ q b = a)`.
pub fn ambient_iso_check(b_l: &Ty, b_r: &Ty, x: &Ty, fuel: &mut Fuel) -> Result<bool, KernelError> {
    let b = Ty::sum(b_l.clone(), b_r.clone());
    let directions = b.enumerate()?;
    let q = |d: &PVal| match d {
        PVal::Inl(_) => PVal::inl(PVal::Unit),
        _ => PVal::inr(PVal::Unit),
    };
    let mut source = Vec::new();
    for f in Ty::total(b_l.clone(), x.clone()).enumerate()? {
        source.push(PVal::inl(f));
    }
    for f in Ty::total(b_r.clone(), x.clone()).enumerate()? {
        source.push(PVal::inr(f));
    }
    // P_q(X) as tables over the directions
    let mut target: Vec<(Vec<PVal>, PVal)> = Vec::new();
    for f in Ty::partial(b.clone(), x.clone()).enumerate()? {
        for a in [PVal::inl(PVal::Unit), PVal::inr(PVal::Unit)] {
            let table: Vec<PVal> = directions.iter().map(|d| f.apply(d, fuel)).collect::<Result<_, _>>()?;
            if directions.iter().zip(&table).all(|(d, v)| v.is_defined() == (q(d) == a)) {
                target.push((table, a));
            }
        }
    }
    let mut hits = vec![0usize; target.len()];
    for v in &source {
        let image = ambient_h(v);
        let (g, a) = image.as_pair().expect("pair");
        let table: Vec<PVal> = directions.iter().map(|d| g.apply(d, fuel)).collect::<Result<_, _>>()?;
        let mut found = false;
        for (k, (t, a2)) in target.iter().enumerate() {
            if a == a2 && t.iter().zip(&table).all(|(u, w)| eq_strong_with(u, w, 4, fuel).unwrap_or(false)) {
                hits[k] += 1;
                found = true;
            }
        }
        if !found {
            return Ok(false);
        }
    }
    Ok(hits.iter().all(|h| *h == 1))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overlapping_fibers_are_rejected() {
        let sig = MSignature::new([("a", vec!["x"]), ("b", vec!["x"])]);
        assert!(matches!(build_mtype(&sig), Err(FinalError::NonDisjointFibers(_))));
    }

    #[test]
    fn remark_instance_separates_the_functors() {
        let one = FinObj::spap_full(1);
        let empty_point = FinObj::spap_point_empty();
        let c = mtype_vs_extpoly_compare(&one, &empty_point, &empty_point).unwrap();
        assert_eq!((c.f_count, c.pq_count), (1, 0));
    }
}

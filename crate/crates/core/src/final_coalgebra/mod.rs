//! Final coalgebras of extended polynomial functors as partial maps from
//! paths to labels, and M-types over finite fiber maps.

mod mtype;

use std::sync::Arc;

use thiserror::Error;

use crate::functors::{from_ext_nf, inject, untag, ExtPolyNF, FunctorError, SigFunctor};
use crate::kernel::{decode_path, encode_path, eq_strong_with, Fuel, KernelError, PFun, PVal, Ty};

pub use mtype::{ambient_h, ambient_iso_check, build_mtype, mtype_vs_extpoly_compare, MSignature, MType, MTypeComparison};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FinalError {
    #[error("exponent {0} is not finitely enumerable")]
    NonEnumerableExponent(Ty),
    #[error("branch {branch} has the wrong domain: {detail}")]
    DomainMismatch { branch: usize, detail: String },
    #[error("fibers overlap at {0}")]
    NonDisjointFibers(String),
    #[error("not an element of the final coalgebra: {0}")]
    NotInCarrier(String),
    #[error(transparent)]
    Functor(#[from] FunctorError),
    #[error(transparent)]
    Kernel(#[from] KernelError),
}

impl From<FinalError> for KernelError {
    fn from(e: FinalError) -> Self {
        match e {
            FinalError::Kernel(k) => k,
            other => KernelError::Host(other.to_string()),
        }
    }
}

/// A coalgebra `d : D → F D` on encoded values.
pub type CoalgebraFn = dyn Fn(&PVal, &mut Fuel) -> Result<PVal, FinalError> + Send + Sync;

#[derive(Clone)]
pub struct Coalgebra(pub Arc<CoalgebraFn>);

impl Coalgebra {
    pub fn new(d: impl Fn(&PVal, &mut Fuel) -> Result<PVal, FinalError> + Send + Sync + 'static) -> Self {
        Coalgebra(Arc::new(d))
    }

    pub fn apply(&self, z: &PVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        if !z.is_defined() {
            return Ok(PVal::Undefined);
        }
        (self.0)(z, fuel)
    }
}

/// An element of `Path ⇀ A`, with the seed it was unfolded from if any.
#[derive(Clone)]
pub struct PTreeVal {
    pub f: PFun,
    pub generator: Option<(Coalgebra, PVal)>,
}

impl PTreeVal {
    pub fn new(f: PFun) -> Self {
        PTreeVal { f, generator: None }
    }

    pub fn observe(&self, path: &[PVal], fuel: &mut Fuel) -> Result<PVal, KernelError> {
        self.f.apply(&encode_path(path), fuel)
    }

    pub fn to_pval(&self) -> PVal {
        PVal::Fun(self.f.clone())
    }

    pub fn from_pval(v: &PVal) -> Option<PTreeVal> {
        v.as_fun().map(|f| PTreeVal::new(f.clone()))
    }
}

impl std::fmt::Debug for PTreeVal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "PTree({})", self.f)
    }
}

/// The constructed final coalgebra of an extended polynomial normal form.
#[derive(Clone, Debug)]
pub struct FinalCoalgebra {
    nf: ExtPolyNF,
    exponents: Vec<Vec<PVal>>,
}

pub fn build_final(nf: &ExtPolyNF) -> Result<FinalCoalgebra, FinalError> {
    let exponents = nf
        .summands
        .iter()
        .map(|(_, b)| b.enumerate().map_err(|_| FinalError::NonEnumerableExponent(b.clone())))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(FinalCoalgebra { nf: nf.clone(), exponents })
}

impl FinalCoalgebra {
    pub fn nf(&self) -> &ExtPolyNF {
        &self.nf
    }

    pub fn summands(&self) -> usize {
        self.nf.len()
    }

    /// Every element of `B = Σᵢ Bᵢ`.
    pub fn directions(&self) -> Vec<PVal> {
        let n = self.nf.len();
        self.exponents
            .iter()
            .enumerate()
            .flat_map(|(i, ys)| ys.iter().map(move |y| inject(i, n, y.clone())))
            .collect()
    }

    /// Every path over `B` of length at most `max_len`.
    pub fn paths(&self, max_len: usize) -> Vec<Vec<PVal>> {
        let dirs = self.directions();
        let mut out = vec![vec![]];
        let mut frontier: Vec<Vec<PVal>> = vec![vec![]];
        for _ in 0..max_len {
            let mut next = Vec::new();
            for p in &frontier {
                for b in &dirs {
                    let mut q = p.clone();
                    q.push(b.clone());
                    next.push(q);
                }
            }
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// `c f = case f nil of in_i x → in_i (x, λy. λp. f (cons (in_i y) p))`.
    pub fn structure(&self, t: &PTreeVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        let n = self.nf.len();
        let root = t.observe(&[], fuel)?;
        if !root.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, x) = untag(n, &root)?;
        let f = t.f.clone();
        let dom = self.nf.summands[i].1.clone();
        let g = PFun::new(move |y, _| {
            let f = f.clone();
            let y = y.clone();
            let sub = PFun::new(move |p, fuel| {
                let Some(rest) = decode_path(p) else { return Ok(PVal::Undefined) };
                let mut full = vec![inject(i, n, y.clone())];
                full.extend(rest);
                f.apply(&encode_path(&full), fuel)
            });
            Ok(PVal::Fun(sub))
        })
        .with_domain(dom);
        Ok(self.nf.build(i, x, PVal::Fun(g))?)
    }

    /// `structure` on a kernel value.
    pub fn structure_value(&self, v: &PVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        match PTreeVal::from_pval(v) {
            Some(t) => self.structure(&t, fuel),
            None if !v.is_defined() => Ok(PVal::Undefined),
            None => Err(FinalError::NotInCarrier(v.to_string())),
        }
    }

    /// The structure map as a coalgebra on kernel values.
    pub fn as_coalgebra(&self) -> Coalgebra {
        let me = self.clone();
        Coalgebra::new(move |v, fuel| me.structure_value(v, fuel))
    }

    /// `u = unfold d`:
    /// `u z nil = case d z of in_i (x, g) → in_i x` and
    /// `u z (cons (in_i y) p) = case d z of in_i (x, g) → u (g y) p`,
    /// undefined when the direction's summand differs from `d z`'s.
    pub fn unfold(&self, d: &Coalgebra, z: &PVal) -> PTreeVal {
        let (nf, d2, z2) = (self.nf.clone(), d.clone(), z.clone());
        let f = PFun::new(move |p, fuel| {
            let Some(path) = decode_path(p) else { return Ok(PVal::Undefined) };
            unfold_at(&nf, &d2, &z2, &path, fuel).map_err(KernelError::from)
        });
        PTreeVal { f, generator: Some((d.clone(), z.clone())) }
    }

    /// Conditions `def (f nil)` and
    /// `def (f (snoc p (in_i y))) ⇔ ∃x. f p = in_i x` on all paths up to `max_len`.
    pub fn check_membership(&self, t: &PTreeVal, max_len: usize, fuel: &mut Fuel) -> Result<(), FinalError> {
        let n = self.nf.len();
        if !t.observe(&[], fuel)?.is_defined() {
            return Err(FinalError::NotInCarrier("f nil is undefined".into()));
        }
        for p in self.paths(max_len.saturating_sub(1)) {
            let fp = t.observe(&p, fuel)?;
            let tag = if fp.is_defined() { Some(untag(n, &fp)?.0) } else { None };
            for (j, ys) in self.exponents.iter().enumerate() {
                for y in ys {
                    let mut q = p.clone();
                    q.push(inject(j, n, y.clone()));
                    let defined = t.observe(&q, fuel)?.is_defined();
                    if defined != (tag == Some(j)) {
                        return Err(FinalError::NotInCarrier(format!(
                            "at path of length {}: snoc by summand {j} is {} but f p is {fp}",
                            p.len(),
                            if defined { "defined" } else { "undefined" }
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Equality of observations on all paths up to `max_len`.
    pub fn obs_eq(&self, a: &PTreeVal, b: &PTreeVal, max_len: usize, fuel: &mut Fuel) -> Result<bool, FinalError> {
        for p in self.paths(max_len) {
            let (x, y) = (a.observe(&p, fuel)?, b.observe(&p, fuel)?);
            if !eq_strong_with(&x, &y, 4, fuel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Compares two elements of `F C` by tag, label, and observation of the
    /// successor trees on every direction.
    pub fn f_obs_eq(&self, u: &PVal, v: &PVal, max_len: usize, fuel: &mut Fuel) -> Result<bool, FinalError> {
        match (u.is_defined(), v.is_defined()) {
            (false, false) => return Ok(true),
            (true, true) => {}
            _ => return Ok(false),
        }
        let (i, x, g) = self.nf.split(u)?;
        let (j, x2, g2) = self.nf.split(v)?;
        if i != j || !eq_strong_with(&x, &x2, 4, fuel)? {
            return Ok(false);
        }
        for y in &self.exponents[i] {
            let (s, t) = (g.apply(y, fuel)?, g2.apply(y, fuel)?);
            let (Some(s), Some(t)) = (PTreeVal::from_pval(&s), PTreeVal::from_pval(&t)) else {
                return Ok(!s.is_defined() && !t.is_defined());
            };
            if !self.obs_eq(&s, &t, max_len.saturating_sub(1), fuel)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `c (unfold d z)` against `F (unfold d) (d z)`.
    pub fn check_unfold_equation(
        &self,
        d: &Coalgebra,
        z: &PVal,
        max_len: usize,
        fuel: &mut Fuel,
    ) -> Result<bool, FinalError> {
        let lhs = self.structure(&self.unfold(d, z), fuel)?;
        let dz = d.apply(z, fuel)?;
        let me = self.clone();
        let d2 = d.clone();
        let unfold_fn = PFun::new(move |seed, _| Ok(me.unfold(&d2, seed).to_pval()));
        let rhs = self.nf.fmap(&unfold_fn, &dz)?;
        self.f_obs_eq(&lhs, &rhs, max_len, fuel)
    }

    /// Counts maps `u' : D → (paths ⇀ A)` on the seeds reachable from
    /// `seeds` that satisfy the unfold equation and membership up to
    /// `max_len`, level by level over path length; each entry ranges over
    /// `candidates` plus undefined. Returns the count (capped at 2) and
    /// whether the solution agrees with `unfold`.
    pub fn unfold_uniqueness(
        &self,
        d: &Coalgebra,
        seeds: &[PVal],
        candidates: &[PVal],
        max_len: usize,
        fuel: &mut Fuel,
    ) -> Result<(usize, bool), FinalError> {
        let n = self.nf.len();
        let (seeds, dist): (Vec<PVal>, Vec<usize>) = self.reachable(d, seeds, max_len, fuel)?.into_iter().unzip();
        let index_of = |v: &PVal, seeds: &[PVal]| seeds.iter().position(|s| s.structurally_eq(v));
        // unfolded seed structure: tag, label, successor index per direction
        let mut steps = Vec::with_capacity(seeds.len());
        for z in &seeds {
            let dz = d.apply(z, fuel)?;
            let (i, x, g) = self.nf.split(&dz)?;
            let mut succ = Vec::new();
            for y in &self.exponents[i] {
                let next = g.apply(y, fuel)?;
                succ.push(index_of(&next, &seeds));
            }
            steps.push((i, x, succ));
        }
        let mut cand: Vec<PVal> = candidates.to_vec();
        cand.push(PVal::Undefined);
        // level 0 fixes each u' z nil; level k + 1 is fixed by level k
        let mut table: Vec<std::collections::HashMap<Vec<usize>, PVal>> = vec![Default::default(); seeds.len()];
        let dirs: Vec<(usize, usize)> =
            self.exponents.iter().enumerate().flat_map(|(j, ys)| (0..ys.len()).map(move |k| (j, k))).collect();
        let mut count = 1usize;
        for len in 0..=max_len {
            for (zi, (i, x, succ)) in steps.iter().enumerate() {
                // a seed first met after r steps is observed along paths of at most max_len - r
                if dist[zi] + len > max_len {
                    continue;
                }
                for path in index_paths(&dirs, len) {
                    let required = if len == 0 {
                        inject(*i, n, x.clone())
                    } else {
                        let (j, k) = dirs[path[0]];
                        match (j == *i, succ.get(k).copied().flatten()) {
                            (true, Some(next)) => table[next].get(&path[1..].to_vec()).cloned().unwrap_or(PVal::Undefined),
                            (true, None) => continue,
                            (false, _) => PVal::Undefined,
                        }
                    };
                    let mut matching = cand.iter().filter(|c| eq_strong_with(c, &required, 4, fuel).unwrap_or(false));
                    let first = matching.next().cloned();
                    let extra = matching.count();
                    match first {
                        None => return Ok((0, false)),
                        Some(v) => {
                            count = (count * (1 + extra)).min(2);
                            table[zi].insert(path, v);
                        }
                    }
                }
            }
        }
        let mut agrees = true;
        for (zi, z) in seeds.iter().enumerate() {
            let t = self.unfold(d, z);
            for (path, v) in &table[zi] {
                let p: Vec<PVal> = path.iter().map(|&c| {
                    let (j, k) = dirs[c];
                    inject(j, n, self.exponents[j][k].clone())
                }).collect();
                agrees &= eq_strong_with(&t.observe(&p, fuel)?, v, 4, fuel)?;
            }
        }
        Ok((count, agrees))
    }

    /// Seeds reachable in at most `depth` steps, each with its distance.
    fn reachable(
        &self,
        d: &Coalgebra,
        seeds: &[PVal],
        depth: usize,
        fuel: &mut Fuel,
    ) -> Result<Vec<(PVal, usize)>, FinalError> {
        let mut out: Vec<(PVal, usize)> = Vec::new();
        let mut frontier: Vec<PVal> = seeds.to_vec();
        for r in 0..=depth {
            let mut next = Vec::new();
            for z in frontier {
                if out.iter().any(|(s, _)| s.structurally_eq(&z)) {
                    continue;
                }
                let (i, _, g) = self.nf.split(&d.apply(&z, fuel)?)?;
                for y in &self.exponents[i] {
                    let w = g.apply(y, fuel)?;
                    if w.is_defined() {
                        next.push(w);
                    }
                }
                out.push((z, r));
            }
            frontier = next;
        }
        Ok(out)
    }

    /// The partial case of a cotype: branch `i` must be defined exactly on
    /// the elements whose structure map lands in summand `i`. Checked on
    /// `samples`; returns the copairing.
    pub fn cotype_case(
        &self,
        branches: Vec<PFun>,
        samples: &[PTreeVal],
        fuel: &mut Fuel,
    ) -> Result<CotypeCase, FinalError> {
        let n = self.nf.len();
        if branches.len() != n {
            return Err(FunctorError::TagOutOfRange { tag: branches.len(), summands: n }.into());
        }
        for t in samples {
            let root = t.observe(&[], fuel)?;
            let (tag, _) = untag(n, &root)?;
            for (j, b) in branches.iter().enumerate() {
                let defined = b.apply(&t.to_pval(), fuel)?.is_defined();
                if defined != (j == tag) {
                    return Err(FinalError::DomainMismatch {
                        branch: j,
                        detail: format!(
                            "{} on an element of summand {tag}",
                            if defined { "defined" } else { "undefined" }
                        ),
                    });
                }
            }
        }
        Ok(CotypeCase { n, branches })
    }

    /// The value of `c t` in the source encoding of `sig`.
    pub fn source_view(&self, sig: &SigFunctor, t: &PTreeVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        let v = self.structure(t, fuel)?;
        Ok(from_ext_nf(sig, &self.nf, &v, fuel)?)
    }

    pub fn exponents(&self) -> &[Vec<PVal>] {
        &self.exponents
    }
}

/// Paths over direction indices of exactly `len` steps.
fn index_paths(dirs: &[(usize, usize)], len: usize) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<usize>| {
                (0..dirs.len()).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    out
}

fn unfold_at(nf: &ExtPolyNF, d: &Coalgebra, z: &PVal, path: &[PVal], fuel: &mut Fuel) -> Result<PVal, FinalError> {
    let n = nf.len();
    let mut z = z.clone();
    for b in path {
        fuel.tick()?;
        let dz = d.apply(&z, fuel)?;
        if !dz.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (i, _, g) = nf.split(&dz)?;
        let (j, y) = untag(n, b)?;
        if i != j {
            return Ok(PVal::Undefined);
        }
        z = g.apply(&y, fuel)?;
        if !z.is_defined() {
            return Ok(PVal::Undefined);
        }
    }
    let dz = d.apply(&z, fuel)?;
    if !dz.is_defined() {
        return Ok(PVal::Undefined);
    }
    let (i, x, _) = nf.split(&dz)?;
    Ok(inject(i, n, x))
}

/// The copairing produced by [`FinalCoalgebra::cotype_case`].
#[derive(Clone)]
pub struct CotypeCase {
    n: usize,
    branches: Vec<PFun>,
}

impl CotypeCase {
    pub fn apply(&self, t: &PTreeVal, fuel: &mut Fuel) -> Result<PVal, FinalError> {
        let root = t.observe(&[], fuel)?;
        if !root.is_defined() {
            return Ok(PVal::Undefined);
        }
        let (tag, _) = untag(self.n, &root)?;
        Ok(self.branches[tag].apply(&t.to_pval(), fuel)?)
    }
}

/// `FX = Nat × (Unit → X)`.
pub fn stream_nf(label: Ty) -> ExtPolyNF {
    ExtPolyNF { summands: vec![(label, Ty::Unit)] }
}

/// `d n = (n, λ_. n + 1)` on the stream functor over `Nat`.
pub fn counter_coalgebra() -> Coalgebra {
    Coalgebra::new(|z, _| {
        let next = z.succ();
        Ok(PVal::pair(z.clone(), PVal::Fun(PFun::constant(next).with_domain(Ty::Unit))))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counter_observes_its_depth() {
        let s = build_final(&stream_nf(Ty::Nat)).unwrap();
        let t = s.unfold(&counter_coalgebra(), &PVal::nat(0));
        let mut fuel = Fuel::default();
        for k in 0..=8u64 {
            let path = vec![PVal::Unit; k as usize];
            assert_eq!(t.observe(&path, &mut fuel).unwrap(), PVal::nat(k));
        }
        s.check_membership(&t, 4, &mut fuel).unwrap();
    }

    #[test]
    fn nat_exponents_are_rejected() {
        let nf = ExtPolyNF { summands: vec![(Ty::Unit, Ty::Nat)] };
        assert!(matches!(build_final(&nf), Err(FinalError::NonEnumerableExponent(_))));
    }
}

//! Finite-carrier reflexive relations and subset-family spaces, with
//! (co)limits, regularity of monos, coarseness, and a truncated
//! natural-numbers check.
//!
//! Atoms are `0..n`; subsets are bitmasks, so carriers hold at most 16
//! atoms (products of two 4-atom objects).

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// Atom limits: subset families are enumerated as bitmasks, relations are not.
pub const MAX_SPAP_ATOMS: usize = 16;
pub const MAX_RERE_ATOMS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LabError {
    #[error("carrier of {atoms} atoms exceeds the limit of {limit}")]
    TooLarge { atoms: usize, limit: usize },
    #[error("objects live in different categories")]
    CategoryMismatch,
    #[error("relation is not reflexive at atom {0}")]
    NotReflexive(usize),
    #[error("atom {atom} is outside a carrier of {size}")]
    AtomOutOfRange { atom: usize, size: usize },
    #[error("map does not preserve structure")]
    NotAMorphism,
    #[error("morphisms are not parallel")]
    NotParallel,
    #[error("{0} is not supported in this category")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Category {
    ReRe,
    SpaP,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Structure {
    /// A reflexive relation as `(x, y)` pairs.
    Relation(BTreeSet<(usize, usize)>),
    /// A family of subsets as bitmasks.
    Family(BTreeSet<u32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FinObj {
    pub size: usize,
    pub structure: Structure,
}

fn check_size(cat: Category, n: usize) -> Result<(), LabError> {
    let limit = match cat {
        Category::ReRe => MAX_RERE_ATOMS,
        Category::SpaP => MAX_SPAP_ATOMS,
    };
    if n > limit {
        Err(LabError::TooLarge { atoms: n, limit })
    } else {
        Ok(())
    }
}

fn image(mask: u32, f: &[usize]) -> u32 {
    (0..f.len()).filter(|x| mask >> x & 1 == 1).fold(0, |acc, x| acc | 1 << f[x])
}

fn full(n: usize) -> u32 {
    if n == 32 {
        u32::MAX
    } else {
        (1u32 << n) - 1
    }
}

impl FinObj {
    pub fn rere(size: usize, pairs: impl IntoIterator<Item = (usize, usize)>) -> Result<FinObj, LabError> {
        check_size(Category::ReRe, size)?;
        let rel: BTreeSet<(usize, usize)> = pairs.into_iter().collect();
        for &(x, y) in &rel {
            for atom in [x, y] {
                if atom >= size {
                    return Err(LabError::AtomOutOfRange { atom, size });
                }
            }
        }
        if let Some(x) = (0..size).find(|x| !rel.contains(&(*x, *x))) {
            return Err(LabError::NotReflexive(x));
        }
        Ok(FinObj { size, structure: Structure::Relation(rel) })
    }

    pub fn spap(size: usize, family: impl IntoIterator<Item = u32>) -> Result<FinObj, LabError> {
        check_size(Category::SpaP, size)?;
        let family: BTreeSet<u32> = family.into_iter().collect();
        if let Some(m) = family.iter().find(|m| **m & !full(size) != 0) {
            return Err(LabError::AtomOutOfRange { atom: 31 - m.leading_zeros() as usize, size });
        }
        Ok(FinObj { size, structure: Structure::Family(family) })
    }

    pub fn discrete(size: usize) -> FinObj {
        FinObj::rere(size, (0..size).map(|x| (x, x))).expect("diagonal is reflexive")
    }

    pub fn indiscrete(size: usize) -> FinObj {
        FinObj::rere(size, (0..size).flat_map(|x| (0..size).map(move |y| (x, y)))).expect("full relation is reflexive")
    }

    /// `(X, 𝒫(X))`.
    pub fn spap_full(size: usize) -> FinObj {
        FinObj::spap(size, 0..=full(size)).expect("in range")
    }

    /// `1_∅ = ({*}, ∅)`.
    pub fn spap_point_empty() -> FinObj {
        FinObj::spap(1, []).expect("in range")
    }

    pub fn category(&self) -> Category {
        match self.structure {
            Structure::Relation(_) => Category::ReRe,
            Structure::Family(_) => Category::SpaP,
        }
    }

    pub fn is_discrete(&self) -> bool {
        matches!(&self.structure, Structure::Relation(r) if r.iter().all(|(x, y)| x == y))
    }

    pub fn is_indiscrete(&self) -> bool {
        matches!(&self.structure, Structure::Relation(r) if r.len() == self.size * self.size)
    }

    /// Whether `f : self → tgt` preserves structure.
    pub fn preserves(&self, tgt: &FinObj, f: &[usize]) -> bool {
        match (&self.structure, &tgt.structure) {
            (Structure::Relation(r), Structure::Relation(s)) => r.iter().all(|(x, y)| s.contains(&(f[*x], f[*y]))),
            (Structure::Family(a), Structure::Family(b)) => a.iter().all(|m| b.contains(&image(*m, f))),
            _ => false,
        }
    }

    /// The initial structure on `subset` along its inclusion.
    pub fn restrict_to(&self, subset: &[usize]) -> FinObj {
        let pos = |x: usize| subset.iter().position(|y| *y == x);
        let structure = match &self.structure {
            Structure::Relation(r) => Structure::Relation(
                r.iter().filter_map(|(x, y)| Some((pos(*x)?, pos(*y)?))).collect(),
            ),
            Structure::Family(fam) => {
                let inside = subset.iter().fold(0u32, |acc, x| acc | 1 << x);
                Structure::Family(
                    fam.iter()
                        .filter(|m| **m & !inside == 0)
                        .map(|m| subset.iter().enumerate().filter(|(_, x)| m >> **x & 1 == 1).fold(0, |acc, (i, _)| acc | 1 << i))
                        .collect(),
                )
            }
        };
        FinObj { size: subset.len(), structure }
    }
}

impl fmt::Display for FinObj {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let set = |m: u32| {
            let xs: Vec<String> = (0..self.size).filter(|x| m >> x & 1 == 1).map(|x| x.to_string()).collect();
            format!("{{{}}}", xs.join(","))
        };
        let carrier = set(full(self.size));
        match &self.structure {
            Structure::Relation(r) => {
                let pairs: Vec<String> = r.iter().filter(|(x, y)| x != y).map(|(x, y)| format!("{x}~{y}")).collect();
                write!(f, "({carrier}, refl ∪ {{{}}})", pairs.join(","))
            }
            Structure::Family(fam) => {
                let sets: Vec<String> = fam.iter().map(|m| set(*m)).collect();
                write!(f, "({carrier}, {{{}}})", sets.join(","))
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct FinMor {
    pub src: FinObj,
    pub tgt: FinObj,
    pub map: Vec<usize>,
}

impl FinMor {
    pub fn new(src: &FinObj, tgt: &FinObj, map: Vec<usize>) -> Result<FinMor, LabError> {
        if src.category() != tgt.category() {
            return Err(LabError::CategoryMismatch);
        }
        if map.len() != src.size {
            return Err(LabError::NotAMorphism);
        }
        if let Some(&atom) = map.iter().find(|y| **y >= tgt.size) {
            return Err(LabError::AtomOutOfRange { atom, size: tgt.size });
        }
        if !src.preserves(tgt, &map) {
            return Err(LabError::NotAMorphism);
        }
        Ok(FinMor { src: src.clone(), tgt: tgt.clone(), map })
    }

    pub fn identity(a: &FinObj) -> FinMor {
        FinMor { src: a.clone(), tgt: a.clone(), map: (0..a.size).collect() }
    }

    /// `self ; g`, i.e. `g ∘ self`.
    pub fn then(&self, g: &FinMor) -> Result<FinMor, LabError> {
        if self.tgt != g.src {
            return Err(LabError::NotParallel);
        }
        Ok(FinMor { src: self.src.clone(), tgt: g.tgt.clone(), map: self.map.iter().map(|x| g.map[*x]).collect() })
    }

    pub fn is_injective(&self) -> bool {
        self.map.iter().collect::<BTreeSet<_>>().len() == self.map.len()
    }

    pub fn is_iso(&self) -> bool {
        self.is_injective()
            && self.map.len() == self.tgt.size
            && {
                let mut inv = vec![0; self.tgt.size];
                for (x, y) in self.map.iter().enumerate() {
                    inv[*y] = x;
                }
                self.tgt.preserves(&self.src, &inv)
            }
    }
}

/// All functions `0..n → 0..m`, in lexicographic order.
fn functions(n: usize, m: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    if m == 0 {
        return vec![];
    }
    let mut out = Vec::new();
    let mut f = vec![0usize; n];
    loop {
        out.push(f.clone());
        let mut pos = n;
        loop {
            if pos == 0 {
                return out;
            }
            pos -= 1;
            f[pos] += 1;
            if f[pos] < m {
                break;
            }
            f[pos] = 0;
        }
    }
}

pub fn hom_set(a: &FinObj, b: &FinObj) -> Vec<FinMor> {
    if a.category() != b.category() {
        return vec![];
    }
    functions(a.size, b.size)
        .into_iter()
        .filter(|f| a.preserves(b, f))
        .map(|map| FinMor { src: a.clone(), tgt: b.clone(), map })
        .collect()
}

pub fn initial(cat: Category) -> FinObj {
    match cat {
        Category::ReRe => FinObj::rere(0, []).expect("empty"),
        Category::SpaP => FinObj::spap(0, []).expect("empty"),
    }
}

pub fn terminal(cat: Category) -> FinObj {
    match cat {
        Category::ReRe => FinObj::discrete(1),
        Category::SpaP => FinObj::spap_full(1),
    }
}

/// Product with its projections; pairs `(x, y)` sit at `x * |b| + y`.
pub fn product(a: &FinObj, b: &FinObj) -> Result<(FinObj, FinMor, FinMor), LabError> {
    let n = a.size * b.size;
    check_size(a.category(), n)?;
    let pa: Vec<usize> = (0..n).map(|i| i / b.size).collect();
    let pb: Vec<usize> = (0..n).map(|i| i % b.size).collect();
    let structure = match (&a.structure, &b.structure) {
        (Structure::Relation(r), Structure::Relation(s)) => Structure::Relation(
            r.iter()
                .flat_map(|(x, x2)| s.iter().map(move |(y, y2)| (x * b.size + y, x2 * b.size + y2)))
                .collect(),
        ),
        (Structure::Family(fa), Structure::Family(fb)) => Structure::Family(
            (0..=full(n)).filter(|m| fa.contains(&image(*m, &pa)) && fb.contains(&image(*m, &pb))).collect(),
        ),
        _ => return Err(LabError::CategoryMismatch),
    };
    let p = FinObj { size: n, structure };
    Ok((p.clone(), FinMor { src: p.clone(), tgt: a.clone(), map: pa }, FinMor { src: p, tgt: b.clone(), map: pb }))
}

/// Coproduct with its injections; `inr y` sits at `|a| + y`.
pub fn coproduct(a: &FinObj, b: &FinObj) -> Result<(FinObj, FinMor, FinMor), LabError> {
    let n = a.size + b.size;
    check_size(a.category(), n)?;
    let structure = match (&a.structure, &b.structure) {
        (Structure::Relation(r), Structure::Relation(s)) => Structure::Relation(
            r.iter().copied().chain(s.iter().map(|(x, y)| (x + a.size, y + a.size))).collect(),
        ),
        (Structure::Family(fa), Structure::Family(fb)) => {
            Structure::Family(fa.iter().copied().chain(fb.iter().map(|m| m << a.size)).collect())
        }
        _ => return Err(LabError::CategoryMismatch),
    };
    let c = FinObj { size: n, structure };
    let inl = FinMor { src: a.clone(), tgt: c.clone(), map: (0..a.size).collect() };
    let inr = FinMor { src: b.clone(), tgt: c.clone(), map: (a.size..n).collect() };
    Ok((c, inl, inr))
}

/// Equalizer of a parallel pair, as the induced substructure.
pub fn equalizer(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor), LabError> {
    if f.src != g.src || f.tgt != g.tgt {
        return Err(LabError::NotParallel);
    }
    let subset: Vec<usize> = (0..f.src.size).filter(|x| f.map[*x] == g.map[*x]).collect();
    let e = f.src.restrict_to(&subset);
    let incl = FinMor { src: e.clone(), tgt: f.src.clone(), map: subset };
    Ok((e, incl))
}

/// Pullback of a cospan `f : a → c ← b : g`.
pub fn pullback(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor, FinMor), LabError> {
    if f.tgt != g.tgt {
        return Err(LabError::NotParallel);
    }
    let (_, pa, pb) = product(&f.src, &g.src)?;
    let (e, incl) = equalizer(&pa.then(f)?, &pb.then(g)?)?;
    Ok((e, incl.then(&pa)?, incl.then(&pb)?))
}

/// Pushout of a span `f : a → b, g : a → c`, as the final structure on
/// the quotient of `b + c`.
pub fn pushout(f: &FinMor, g: &FinMor) -> Result<(FinObj, FinMor, FinMor), LabError> {
    if f.src != g.src {
        return Err(LabError::NotParallel);
    }
    let (s, inl, inr) = coproduct(&f.tgt, &g.tgt)?;
    // union-find over b + c
    let mut parent: Vec<usize> = (0..s.size).collect();
    fn find(parent: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while parent[r] != r {
            r = parent[r];
        }
        parent[x] = r;
        r
    }
    for x in 0..f.src.size {
        let (u, v) = (find(&mut parent, inl.map[f.map[x]]), find(&mut parent, inr.map[g.map[x]]));
        parent[u.max(v)] = u.min(v);
    }
    let roots: Vec<usize> = (0..s.size).map(|x| find(&mut parent, x)).collect();
    let classes: Vec<usize> = roots.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let q: Vec<usize> = roots.iter().map(|r| classes.iter().position(|c| c == r).expect("root")).collect();
    let structure = match &s.structure {
        Structure::Relation(r) => Structure::Relation(r.iter().map(|(x, y)| (q[*x], q[*y])).collect()),
        Structure::Family(fam) => Structure::Family(fam.iter().map(|m| image(*m, &q)).collect()),
    };
    let p = FinObj { size: classes.len(), structure };
    let jb = FinMor { src: f.tgt.clone(), tgt: p.clone(), map: inl.map.iter().map(|x| q[*x]).collect() };
    let jc = FinMor { src: g.tgt.clone(), tgt: p, map: inr.map.iter().map(|x| q[*x]).collect() };
    Ok((jb.tgt.clone(), jb, jc))
}

/// Every object of the category on at most `max_size` atoms.
pub fn all_objects(cat: Category, max_size: usize) -> Vec<FinObj> {
    let mut out = Vec::new();
    for n in 0..=max_size {
        match cat {
            Category::ReRe => {
                let off: Vec<(usize, usize)> =
                    (0..n).flat_map(|x| (0..n).filter(move |y| *y != x).map(move |y| (x, y))).collect();
                for bits in 0u64..1 << off.len() {
                    let pairs = (0..n)
                        .map(|x| (x, x))
                        .chain(off.iter().enumerate().filter(|(i, _)| bits >> i & 1 == 1).map(|(_, p)| *p));
                    out.push(FinObj::rere(n, pairs).expect("reflexive"));
                }
            }
            Category::SpaP => {
                let subsets = 1usize << n;
                for bits in 0u64..1 << subsets {
                    let fam = (0..subsets as u32).filter(|m| bits >> m & 1 == 1);
                    out.push(FinObj::spap(n, fam).expect("in range"));
                }
            }
        }
    }
    out
}

/// Result of testing a mono for regularity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Regularity {
    pub regular: bool,
    /// The equalizer of the cokernel pair: the regular subobject generated
    /// by the image of the mono.
    pub regular_subobject: FinObj,
}

/// A mono is regular iff it is the equalizer of its cokernel pair; the
/// equalizer is compared with the mono's source up to the induced map.
pub fn is_regular_mono(m: &FinMor) -> Result<Regularity, LabError> {
    if !m.is_injective() {
        return Err(LabError::NotAMorphism);
    }
    let (_, i1, i2) = pushout(m, m)?;
    let (e, incl) = equalizer(&i1, &i2)?;
    // m factors through incl bijectively; regular iff the factor is an iso
    let factor: Vec<usize> = m.map.iter().map(|y| incl.map.iter().position(|z| z == y).expect("m equalizes")).collect();
    let regular = factor.len() == e.size && FinMor { src: m.src.clone(), tgt: e.clone(), map: factor }.is_iso();
    Ok(Regularity { regular, regular_subobject: e })
}

/// The exhaustive variant: searches every parallel pair out of `m.tgt`
/// into objects of at most `max_size` atoms for one that `m` equalizes
/// exactly.
pub fn is_regular_mono_by_search(m: &FinMor, max_size: usize) -> bool {
    let cat = m.src.category();
    for c in all_objects(cat, max_size) {
        let homs = hom_set(&m.tgt, &c);
        for f in &homs {
            for g in &homs {
                if let Ok((e, incl)) = equalizer(f, g) {
                    if e.size != m.src.size || !m.map.iter().all(|y| incl.map.contains(y)) {
                        continue;
                    }
                    let factor: Vec<usize> =
                        m.map.iter().map(|y| incl.map.iter().position(|z| z == y).expect("contained")).collect();
                    if (FinMor { src: m.src.clone(), tgt: e, map: factor }).is_iso() {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Exponential object `b^a` in reflexive relations: carrier `hom(a, b)`
/// in [`hom_set`] order, `f ~ g` iff `x R y ⇒ f x S g y`.
pub fn rere_exponential(a: &FinObj, b: &FinObj) -> Result<(FinObj, Vec<FinMor>), LabError> {
    let (Structure::Relation(r), Structure::Relation(s)) = (&a.structure, &b.structure) else {
        return Err(LabError::Unsupported("exponentials outside reflexive relations"));
    };
    let homs = hom_set(a, b);
    check_size(Category::ReRe, homs.len())?;
    let mut pairs = Vec::new();
    for (i, f) in homs.iter().enumerate() {
        for (j, g) in homs.iter().enumerate() {
            if r.iter().all(|(x, y)| s.contains(&(f.map[*x], g.map[*y]))) {
                pairs.push((i, j));
            }
        }
    }
    Ok((FinObj::rere(homs.len(), pairs)?, homs))
}

/// The regular-subobject classifier of reflexive relations: the
/// indiscrete two-point object with `true = 1`.
pub fn rere_omega() -> (FinObj, usize) {
    (FinObj::indiscrete(2), 1)
}

/// Whether a reflexive relation admits unique choice: the singleton
/// subobject `Sg(a)` of the power object `Ω^a` has a morphism `c` to `a`
/// with `c {x} = x`, found by search over `hom(Sg(a), a)`.
pub fn is_coarse(a: &FinObj) -> Result<bool, LabError> {
    if a.category() != Category::ReRe {
        return Err(LabError::Unsupported("coarseness"));
    }
    let (omega, top) = rere_omega();
    let (power, chars) = rere_exponential(a, &omega)?;
    // position of the characteristic map of {x}, for each x
    let singletons: Vec<usize> = (0..a.size)
        .map(|x| {
            chars
                .iter()
                .position(|c| (0..a.size).all(|y| (c.map[y] == top) == (y == x)))
                .expect("every map into the indiscrete object is a morphism")
        })
        .collect();
    let sg = power.restrict_to(&singletons);
    Ok(hom_set(&sg, a).iter().any(|c| (0..a.size).all(|x| c.map[x] == x)))
}

/// Whether the pullback of the two injections into `1 + 1` is initial.
pub fn coproducts_disjoint(cat: Category) -> Result<(bool, FinObj), LabError> {
    let one = terminal(cat);
    let (_, inl, inr) = coproduct(&one, &one)?;
    let (p, _, _) = pullback(&inl, &inr)?;
    Ok((p == initial(cat), p))
}

/// An algebra `(b, z, s)` for `X + 1`.
#[derive(Debug, Clone)]
pub struct NatAlgebra {
    pub carrier: FinObj,
    pub zero: usize,
    pub succ: FinMor,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NnoReport {
    pub truncation: usize,
    pub algebras_checked: usize,
    /// Algebras with exactly one morphism from the truncation satisfying
    /// the zero and successor clauses.
    pub unique: usize,
    pub discrete_not_coarse: bool,
    /// Algebras where the indiscrete truncation has no such morphism.
    pub indiscrete_failures: usize,
}

/// Morphisms `h : n → alg` with `h 0 = z` and `h (i + 1) = s (h i)` below
/// the truncation.
pub fn clause_morphisms(n: &FinObj, alg: &NatAlgebra) -> usize {
    hom_set(n, &alg.carrier)
        .iter()
        .filter(|h| {
            h.map.first().is_none_or(|h0| *h0 == alg.zero) && (1..n.size).all(|i| h.map[i] == alg.succ.map[h.map[i - 1]])
        })
        .count()
}

/// Every algebra on reflexive relations of at most `max_carrier` atoms.
pub fn rere_nat_algebras(max_carrier: usize) -> Vec<NatAlgebra> {
    let mut out = Vec::new();
    for b in all_objects(Category::ReRe, max_carrier) {
        for s in hom_set(&b, &b) {
            for z in 0..b.size {
                out.push(NatAlgebra { carrier: b.clone(), zero: z, succ: s.clone() });
            }
        }
    }
    out
}

/// Checks the six-element discrete truncation of the naturals against
/// every algebra on at most three atoms.
pub fn nno_fragment_check() -> Result<NnoReport, LabError> {
    let truncation = 6;
    let discrete = FinObj::discrete(truncation);
    let indiscrete = FinObj::indiscrete(truncation);
    let algebras = rere_nat_algebras(3);
    let unique = algebras.iter().filter(|a| clause_morphisms(&discrete, a) == 1).count();
    let indiscrete_failures = algebras.iter().filter(|a| clause_morphisms(&indiscrete, a) == 0).count();
    Ok(NnoReport {
        truncation,
        algebras_checked: algebras.len(),
        unique,
        discrete_not_coarse: !is_coarse(&discrete)?,
        indiscrete_failures,
    })
}

/// Number of partial morphisms `a ⇀ x` defined exactly on `domain`, the
/// domain carrying the structure induced from `a`.
pub fn partial_morphisms_on(a: &FinObj, domain: &[usize], x: &FinObj) -> usize {
    hom_set(&a.restrict_to(domain), x).len()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spap_zero_to_one_is_not_regular() {
        let m = FinMor::new(&initial(Category::SpaP), &terminal(Category::SpaP), vec![]).unwrap();
        let r = is_regular_mono(&m).unwrap();
        assert!(!r.regular);
        assert_eq!(r.regular_subobject, FinObj::spap(0, [0]).unwrap());
    }

    #[test]
    fn rere_zero_to_one_is_regular() {
        let m = FinMor::new(&initial(Category::ReRe), &terminal(Category::ReRe), vec![]).unwrap();
        assert!(is_regular_mono(&m).unwrap().regular);
        assert!(is_regular_mono_by_search(&m, 2));
    }

    #[test]
    fn indiscrete_is_coarse_and_discrete_is_not() {
        assert!(is_coarse(&FinObj::indiscrete(3)).unwrap());
        assert!(!is_coarse(&FinObj::discrete(2)).unwrap());
        assert!(is_coarse(&FinObj::discrete(1)).unwrap());
    }

    #[test]
    fn spap_coproducts_are_not_disjoint() {
        let (disjoint, p) = coproducts_disjoint(Category::SpaP).unwrap();
        assert!(!disjoint);
        assert_eq!(p, FinObj::spap(0, [0]).unwrap());
        assert!(coproducts_disjoint(Category::ReRe).unwrap().0);
    }
}

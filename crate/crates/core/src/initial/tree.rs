use std::fmt;

use crate::kernel::{eq_strong, PFun, PVal, PathMap};

/// A tree in the universal type `(l : Path ⇀ A; d : Path ⇀ Nat; x : A₁)`.
///
/// `l p = in_i (inl y)` marks a leaf slot labelled `y`, `l p = in_i (inr ())`
/// a node built by constructor `i`; `d p` is the depth of the subtree at `p`;
/// `x` is the anchor element.
#[derive(Clone, Debug)]
pub struct DTreeVal {
    pub l: PathMap<PVal>,
    pub d: PathMap<PVal>,
    pub x: PVal,
}

impl DTreeVal {
    /// `depth (l, d, x) = d nil`.
    pub fn depth(&self) -> Option<u64> {
        self.d.get(&[]).and_then(PVal::as_u64)
    }

    /// `sel_j (l, d, x) = (l ∘ cons j, d ∘ cons j, x)`.
    pub fn sel(&self, j: u64) -> DTreeVal {
        DTreeVal { l: self.l.shift(j), d: self.d.shift(j), x: self.x.clone() }
    }

    /// The tree as a kernel value `(l, d, x)`.
    pub fn to_pval(&self) -> PVal {
        PVal::tuple(vec![
            PVal::Fun(PFun::paths(self.l.clone()).named("l")),
            PVal::Fun(PFun::paths(self.d.clone()).named("d")),
            self.x.clone(),
        ])
    }

    pub fn from_pval(v: &PVal) -> Option<DTreeVal> {
        let parts = v.untuple(3)?;
        let l = parts[0].as_fun()?.as_path_map()?.clone();
        let d = parts[1].as_fun()?.as_path_map()?.clone();
        Some(DTreeVal { l, d, x: parts[2].clone() })
    }

    /// Exact equality of the denoted triples.
    pub fn same(&self, other: &DTreeVal) -> bool {
        let maps_equal = |a: &PathMap<PVal>, b: &PathMap<PVal>| {
            a.representatives(b).iter().all(|p| match (a.get(p), b.get(p)) {
                (None, None) => true,
                (Some(u), Some(v)) => eq_strong(u, v, 4).unwrap_or(false),
                _ => false,
            })
        };
        maps_equal(&self.l, &other.l)
            && maps_equal(&self.d, &other.d)
            && eq_strong(&self.x, &other.x, 4).unwrap_or(false)
    }
}

impl PartialEq for DTreeVal {
    fn eq(&self, other: &Self) -> bool {
        self.same(other)
    }
}

impl fmt::Display for DTreeVal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(l = {{")?;
        for (i, (p, v, cone)) in self.l.entries().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{p:?}{} ↦ {v}", if *cone { "*" } else { "" })?;
        }
        write!(f, "}}, depth = ")?;
        match self.depth() {
            Some(n) => write!(f, "{n}")?,
            None => write!(f, "⊥")?,
        }
        write!(f, ", x = {})", self.x)
    }
}

//! Finite searches over algebras on small carriers: enumeration of all
//! (or a seeded sample of) algebras, and the count of functions on a finite
//! tree set that satisfy the fold equation.

use std::collections::HashMap;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::functors::PolyNF;
use crate::kernel::{Fuel, PVal};

use super::{Algebra, DTreeVal, InitialAlgebra, InitialError};

/// An algebra on the carrier `{0, ..., size - 1}` given by tables.
#[derive(Clone, Debug)]
pub struct FiniteAlgebra {
    pub size: usize,
    params: Arc<Vec<Vec<PVal>>>,
    /// `tables[i][p * size^k + digits]`
    tables: Arc<Vec<Vec<usize>>>,
}

impl FiniteAlgebra {
    fn slot(&self, i: usize, w: &PVal, xs: &[usize]) -> Option<usize> {
        let p = self.params[i].iter().position(|v| v.structurally_eq(w))?;
        let mut idx = p;
        for x in xs {
            idx = idx * self.size + x;
        }
        Some(idx)
    }

    /// `bᵢ (w, xs)` on carrier indices.
    pub fn eval(&self, i: usize, w: &PVal, xs: &[usize]) -> Option<usize> {
        let idx = self.slot(i, w, xs)?;
        self.tables[i].get(idx).copied()
    }

    pub fn to_algebra(&self) -> Algebra {
        let me = self.clone();
        Algebra::from_fn(self.params.len(), move |i, w, xs, _| {
            let digits: Option<Vec<usize>> =
                xs.iter().map(|x| x.as_u64().map(|n| n as usize).filter(|n| *n < me.size)).collect();
            let digits = digits.ok_or_else(|| InitialError::NotInCarrier("argument outside the carrier".into()))?;
            Ok(me.eval(i, w, &digits).map_or(PVal::Undefined, |b| PVal::nat(b as u64)))
        })
    }

    pub fn tables(&self) -> &[Vec<usize>] {
        &self.tables
    }
}

/// Number of algebras on a carrier of `size` elements, if it fits.
pub fn algebra_count(nf: &PolyNF, size: usize) -> Option<u128> {
    let mut total: u128 = 1;
    for (a, k) in &nf.summands {
        let entries = a.cardinality()?.finite()?.checked_mul((size as u128).checked_pow(*k as u32)?)?;
        total = total.checked_mul((size as u128).checked_pow(u32::try_from(entries).ok()?)?)?;
    }
    Some(total)
}

/// All algebras on `size` elements if there are at most `limit`, otherwise
/// `samples` algebras drawn with a seeded generator. The flag tells which.
pub fn enumerate_algebras(
    nf: &PolyNF,
    size: usize,
    limit: u128,
    samples: usize,
    seed: u64,
) -> Result<(Vec<FiniteAlgebra>, bool), InitialError> {
    let params: Vec<Vec<PVal>> = nf.summands.iter().map(|(a, _)| a.enumerate()).collect::<Result<_, _>>()?;
    let arities: Vec<usize> = nf.summands.iter().map(|(_, k)| *k).collect();
    let lens: Vec<usize> = params.iter().zip(&arities).map(|(p, k)| p.len() * size.pow(*k as u32)).collect();
    let total: usize = lens.iter().sum();
    let params = Arc::new(params);
    let make = |flat: &[usize]| {
        let mut tables = Vec::with_capacity(lens.len());
        let mut off = 0;
        for len in &lens {
            tables.push(flat[off..off + len].to_vec());
            off += len;
        }
        FiniteAlgebra { size, params: params.clone(), tables: Arc::new(tables) }
    };
    let exhaustive = algebra_count(nf, size).is_some_and(|c| c <= limit);
    let mut out = Vec::new();
    if size == 0 {
        return Ok((out, true));
    }
    if exhaustive {
        let mut digits = vec![0usize; total];
        loop {
            out.push(make(&digits));
            // mixed-radix increment
            let mut pos = 0;
            loop {
                if pos == total {
                    return Ok((out, true));
                }
                digits[pos] += 1;
                if digits[pos] < size {
                    break;
                }
                digits[pos] = 0;
                pos += 1;
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let flat: Vec<usize> = (0..total).map(|_| rng.gen_range(0..size)).collect();
        out.push(make(&flat));
    }
    Ok((out, false))
}

/// How the solutions of the fold equation were counted.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SearchMethod {
    /// Every function `T → B` was tested.
    BruteForce,
    /// Depth-first search over trees in depth order, pruning on the
    /// equation at each tree.
    Backtracking,
}

#[derive(Clone, Debug)]
pub struct Uniqueness {
    /// Number of solutions found, capped at 2.
    pub solutions: usize,
    pub method: SearchMethod,
    /// Whether the (first) solution coincides with the constructed fold.
    pub agrees_with_fold: bool,
}

/// A tree set closed under subtrees, indexed for the searches.
pub struct TreeIndex {
    /// `(constructor, parameter, child indices)`, in depth order.
    nodes: Vec<(usize, PVal, Vec<usize>)>,
    trees: Vec<DTreeVal>,
}

impl TreeIndex {
    pub fn new(handle: &InitialAlgebra, trees: &[DTreeVal]) -> Result<TreeIndex, InitialError> {
        let mut sorted: Vec<DTreeVal> = trees.to_vec();
        sorted.sort_by_key(|t| t.depth().unwrap_or(u64::MAX));
        let mut keys: HashMap<String, usize> = HashMap::new();
        let mut nodes = Vec::with_capacity(sorted.len());
        for (idx, t) in sorted.iter().enumerate() {
            let (i, w, children) = handle.decompose(t)?;
            let kids = children
                .iter()
                .map(|c| {
                    keys.get(&c.to_string())
                        .copied()
                        .ok_or_else(|| InitialError::InvariantViolation("tree set is not closed under subtrees".into()))
                })
                .collect::<Result<Vec<_>, _>>()?;
            keys.insert(t.to_string(), idx);
            nodes.push((i, w, kids));
        }
        Ok(TreeIndex { nodes, trees: sorted })
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn trees(&self) -> &[DTreeVal] {
        &self.trees
    }

    fn satisfied(&self, alg: &FiniteAlgebra, h: &[usize], t: usize) -> bool {
        let (i, w, kids) = &self.nodes[t];
        let xs: Vec<usize> = kids.iter().map(|k| h[*k]).collect();
        alg.eval(*i, w, &xs) == Some(h[t])
    }

    /// Counts functions `h : T → B` with `h (cᵢ (w, ts)) = bᵢ (w, h ts)`
    /// on every tree of the set.
    pub fn fold_uniqueness(
        &self,
        handle: &InitialAlgebra,
        alg: &FiniteAlgebra,
        brute_force_limit: u128,
    ) -> Result<Uniqueness, InitialError> {
        let b = alg.size;
        let n = self.len();
        let space = (b as u128).checked_pow(n as u32);
        let mut first: Option<Vec<usize>> = None;
        let mut solutions = 0usize;
        let method = if space.is_some_and(|s| s <= brute_force_limit) {
            let mut h = vec![0usize; n];
            'outer: loop {
                if (0..n).all(|t| self.satisfied(alg, &h, t)) {
                    solutions += 1;
                    if first.is_none() {
                        first = Some(h.clone());
                    }
                }
                let mut pos = 0;
                loop {
                    if pos == n {
                        break 'outer;
                    }
                    h[pos] += 1;
                    if h[pos] < b {
                        break;
                    }
                    h[pos] = 0;
                    pos += 1;
                }
            }
            SearchMethod::BruteForce
        } else {
            let mut h = vec![0usize; n];
            self.backtrack(alg, &mut h, 0, &mut solutions, &mut first);
            SearchMethod::Backtracking
        };
        let agrees_with_fold = match &first {
            None => false,
            Some(h) => {
                let algebra = alg.to_algebra();
                let mut fuel = Fuel::new(u64::MAX);
                let mut ok = true;
                for (t, tree) in self.trees.iter().enumerate() {
                    let v = handle.fold(&algebra, tree, &mut fuel)?;
                    ok &= v.as_u64() == Some(h[t] as u64);
                }
                ok
            }
        };
        Ok(Uniqueness { solutions: solutions.min(2), method, agrees_with_fold })
    }

    fn backtrack(
        &self,
        alg: &FiniteAlgebra,
        h: &mut Vec<usize>,
        t: usize,
        solutions: &mut usize,
        first: &mut Option<Vec<usize>>,
    ) {
        if *solutions >= 2 {
            return;
        }
        if t == self.len() {
            *solutions += 1;
            if first.is_none() {
                *first = Some(h.clone());
            }
            return;
        }
        for v in 0..alg.size {
            h[t] = v;
            if self.satisfied(alg, h, t) {
                self.backtrack(alg, h, t + 1, solutions, first);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::initial::{build_initial, nat_nf};

    #[test]
    fn nat_algebras_on_two_points_are_all_enumerated() {
        // 1 + X on {0,1}: 2 choices for the constant, 2^2 for the successor
        let (algs, exhaustive) = enumerate_algebras(&nat_nf(), 2, 1000, 0, 0).unwrap();
        assert!(exhaustive);
        assert_eq!(algs.len(), 8);
        assert_eq!(algebra_count(&nat_nf(), 3), Some(81));
    }

    #[test]
    fn fold_is_the_unique_solution_on_small_naturals() {
        let nat = build_initial(&nat_nf()).unwrap();
        let trees = nat.enumerate_trees(4).unwrap();
        let index = TreeIndex::new(&nat, &trees).unwrap();
        let (algs, _) = enumerate_algebras(&nat_nf(), 3, 10_000, 0, 0).unwrap();
        for alg in &algs {
            let u = index.fold_uniqueness(&nat, alg, 1_000_000).unwrap();
            assert_eq!(u.solutions, 1);
            assert_eq!(u.method, SearchMethod::BruteForce);
            assert!(u.agrees_with_fold);
        }
    }
}

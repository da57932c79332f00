//! Finite representations of partial maps on paths of naturals.
//!
//! A [`PathMap`] stores finitely many slots. Each slot may carry an exact
//! value (defined at that path only) and a cone value (defined at that
//! path and every extension of it). Lookup prefers the exact value, then the
//! cone at the path itself, then the cone at the longest proper prefix.
//! This is precisely the shape of the tree maps built by initial-algebra
//! constructors, whose leaf slot `cons 0 p` is defined for every `p`.

use std::collections::{BTreeMap, BTreeSet};

#[derive(Clone, Debug, PartialEq)]
struct Slot<V> {
    exact: Option<V>,
    cone: Option<V>,
}

impl<V> Default for Slot<V> {
    fn default() -> Self {
        Slot { exact: None, cone: None }
    }
}

/// A partial map from paths (lists of naturals) to values.
#[derive(Clone, Debug, PartialEq)]
pub struct PathMap<V> {
    slots: BTreeMap<Vec<u64>, Slot<V>>,
}

impl<V> Default for PathMap<V> {
    fn default() -> Self {
        PathMap { slots: BTreeMap::new() }
    }
}

impl<V: Clone> PathMap<V> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.values().all(|s| s.exact.is_none() && s.cone.is_none())
    }

    pub fn set_exact(&mut self, path: Vec<u64>, v: V) {
        self.slots.entry(path).or_default().exact = Some(v);
    }

    pub fn set_cone(&mut self, path: Vec<u64>, v: V) {
        self.slots.entry(path).or_default().cone = Some(v);
    }

    pub fn remove_exact(&mut self, path: &[u64]) -> Option<V> {
        let slot = self.slots.get_mut(path)?;
        let old = slot.exact.take();
        if slot.cone.is_none() {
            self.slots.remove(path);
        }
        old
    }

    pub fn remove_cone(&mut self, path: &[u64]) -> Option<V> {
        let slot = self.slots.get_mut(path)?;
        let old = slot.cone.take();
        if slot.exact.is_none() {
            self.slots.remove(path);
        }
        old
    }

    pub fn get(&self, path: &[u64]) -> Option<&V> {
        if let Some(slot) = self.slots.get(path) {
            if let Some(v) = slot.exact.as_ref().or(slot.cone.as_ref()) {
                return Some(v);
            }
        }
        (0..path.len()).rev().find_map(|i| self.slots.get(&path[..i]).and_then(|s| s.cone.as_ref()))
    }

    /// `self ∘ cons j`: the map `p ↦ self(j :: p)`.
    pub fn shift(&self, j: u64) -> PathMap<V> {
        let mut out = PathMap::new();
        for (k, slot) in self.slots.range(vec![j]..) {
            if k.first() != Some(&j) {
                break;
            }
            out.slots.insert(k[1..].to_vec(), slot.clone());
        }
        // a cone at the root also covers the shifted map, unless overridden
        if let Some(root_cone) = self.slots.get(&[][..]).and_then(|s| s.cone.clone()) {
            let slot = out.slots.entry(vec![]).or_default();
            if slot.cone.is_none() {
                slot.cone = Some(root_cone);
            }
        }
        out
    }

    /// `p ↦ self(prefix ++ p)` inserted under `prefix` into `target`:
    /// `target(j :: p) = self(p)` for the slots of `self`.
    pub fn graft_into(&self, j: u64, target: &mut PathMap<V>) {
        for (k, slot) in &self.slots {
            let mut key = Vec::with_capacity(k.len() + 1);
            key.push(j);
            key.extend_from_slice(k);
            target.slots.insert(key, slot.clone());
        }
    }

    pub fn keys(&self) -> impl Iterator<Item = &Vec<u64>> {
        self.slots.keys()
    }

    /// Entries as `(path, value, is_cone)` triples.
    pub fn entries(&self) -> Vec<(Vec<u64>, V, bool)> {
        let mut out = Vec::new();
        for (k, s) in &self.slots {
            if let Some(v) = &s.exact {
                out.push((k.clone(), v.clone(), false));
            }
            if let Some(v) = &s.cone {
                out.push((k.clone(), v.clone(), true));
            }
        }
        out
    }

    /// A finite set of paths on which two maps agree everywhere iff they
    /// agree on these paths. Keys of both maps plus, for each key `k`, one
    /// fresh extension `k ++ [c]` not a prefix of any key.
    pub fn representatives(&self, other: &PathMap<V>) -> Vec<Vec<u64>> {
        let keys: BTreeSet<&Vec<u64>> = self.slots.keys().chain(other.slots.keys()).collect();
        let mut out: BTreeSet<Vec<u64>> = BTreeSet::new();
        for k in &keys {
            out.insert((*k).clone());
            let next = keys
                .iter()
                .filter(|other| other.len() > k.len() && other.starts_with(k))
                .map(|other| other[k.len()])
                .max();
            let mut fresh = (*k).clone();
            fresh.push(next.map_or(0, |c| c + 1));
            out.insert(fresh);
        }
        out.into_iter().collect()
    }

    /// Every path of length at most `max_len` that is defined.
    pub fn defined_paths(&self, max_len: usize) -> Vec<Vec<u64>> {
        self.representatives(&PathMap::new())
            .into_iter()
            .filter(|p| p.len() <= max_len && self.get(p).is_some())
            .collect()
    }

    pub fn map_values<W: Clone>(&self, f: impl Fn(&V) -> W) -> PathMap<W> {
        PathMap {
            slots: self
                .slots
                .iter()
                .map(|(k, s)| (k.clone(), Slot { exact: s.exact.as_ref().map(&f), cone: s.cone.as_ref().map(&f) }))
                .collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_equal(a: &PathMap<u8>, b: &PathMap<u8>, len: usize, width: u64) -> bool {
        fn all_paths(len: usize, width: u64) -> Vec<Vec<u64>> {
            let mut out = vec![vec![]];
            let mut frontier = vec![vec![]];
            for _ in 0..len {
                let mut next = Vec::new();
                for p in &frontier {
                    for c in 0..width {
                        let mut q: Vec<u64> = p.clone();
                        q.push(c);
                        next.push(q);
                    }
                }
                out.extend(next.iter().cloned());
                frontier = next;
            }
            out
        }
        all_paths(len, width).iter().all(|p| a.get(p) == b.get(p))
    }

    #[test]
    fn lookup_prefers_exact_then_longest_cone() {
        let mut m = PathMap::new();
        m.set_cone(vec![], 1u8);
        m.set_cone(vec![0], 2);
        m.set_exact(vec![0, 1], 3);
        assert_eq!(m.get(&[]), Some(&1));
        assert_eq!(m.get(&[5, 5]), Some(&1));
        assert_eq!(m.get(&[0]), Some(&2));
        assert_eq!(m.get(&[0, 1]), Some(&3));
        assert_eq!(m.get(&[0, 1, 0]), Some(&2));
    }

    #[test]
    fn shift_is_precomposition_with_cons() {
        let mut m = PathMap::new();
        m.set_exact(vec![], 9u8);
        m.set_cone(vec![0], 0);
        m.set_exact(vec![1], 4);
        m.set_cone(vec![1, 0], 5);
        m.set_cone(vec![], 7);
        for j in 0..3 {
            let s = m.shift(j);
            for p in [vec![], vec![0], vec![1], vec![0, 2], vec![3, 3, 3]] {
                let mut full = vec![j];
                full.extend(&p);
                assert_eq!(s.get(&p), m.get(&full), "j={j} p={p:?}");
            }
        }
    }

    #[test]
    fn representatives_decide_equality() {
        let mut a = PathMap::new();
        a.set_cone(vec![0], 1u8);
        a.set_exact(vec![], 2);
        let mut b = a.clone();
        assert!(a.representatives(&b).iter().all(|p| a.get(p) == b.get(p)));
        b.set_exact(vec![0, 3, 1], 1);
        // same value inside the cone: same denotation
        assert!(a.representatives(&b).iter().all(|p| a.get(p) == b.get(p)));
        assert!(brute_equal(&a, &b, 4, 5));
        b.set_exact(vec![0, 3, 1], 8);
        assert!(!a.representatives(&b).iter().all(|p| a.get(p) == b.get(p)));
        assert!(!brute_equal(&a, &b, 4, 5));
    }
}

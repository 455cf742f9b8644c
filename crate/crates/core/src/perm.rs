//! Permutations and eagerly materialized permutation groups.
//!
//! Groups are small (degree at most a dozen or so), so every group keeps its
//! full element set sorted; subgroups compare by that set. Composition reads
//! right to left: `(p * q)(i) = p(q(i))`.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::ops::Mul;

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::partition::Partition;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm {
    images: Vec<u8>,
}

impl Perm {
    pub fn identity(n: usize) -> Self {
        Perm {
            images: (0..n).map(|i| i as u8).collect(),
        }
    }

    pub fn from_images(images: &[usize]) -> Result<Self> {
        let n = images.len();
        if n > u8::MAX as usize + 1 {
            return Err(Error::NotAPermutation(format!("degree {n} too large")));
        }
        let mut seen = vec![false; n];
        for &i in images {
            if i >= n || seen[i] {
                return Err(Error::NotAPermutation(format!("{images:?}")));
            }
            seen[i] = true;
        }
        Ok(Perm {
            images: images.iter().map(|&i| i as u8).collect(),
        })
    }

    /// Caller guarantees the slice is a bijection on `0..len`.
    pub(crate) fn from_raw(images: Vec<u8>) -> Self {
        debug_assert!({
            let mut s = images.clone();
            s.sort_unstable();
            s.iter().enumerate().all(|(i, &v)| i == v as usize)
        });
        Perm { images }
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.images[i] as usize
    }

    pub fn images(&self) -> impl Iterator<Item = usize> + '_ {
        self.images.iter().map(|&i| i as usize)
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &v)| i == v as usize)
    }

    pub fn inverse(&self) -> Perm {
        let mut inv = vec![0u8; self.degree()];
        for (i, &v) in self.images.iter().enumerate() {
            inv[v as usize] = i as u8;
        }
        Perm { images: inv }
    }

    /// `self ∘ other`, checked.
    pub fn compose(&self, other: &Perm) -> Result<Perm> {
        if self.degree() != other.degree() {
            return Err(Error::DegreeMismatch {
                left: self.degree(),
                right: other.degree(),
            });
        }
        Ok(self * other)
    }

    /// `self^k` for any integer `k`.
    pub fn pow(&self, k: i64) -> Perm {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut acc = Perm::identity(self.degree());
        for _ in 0..k.unsigned_abs() {
            acc = &base * &acc;
        }
        acc
    }

    pub fn order(&self) -> usize {
        let mut p = self.clone();
        let mut k = 1;
        while !p.is_identity() {
            p = self * &p;
            k += 1;
        }
        k
    }

    /// `self · other · self⁻¹`.
    pub fn conjugate(&self, other: &Perm) -> Perm {
        &(self * other) * &self.inverse()
    }

    /// `[a, b] = a⁻¹ b⁻¹ a b`.
    pub fn commutator(&self, other: &Perm) -> Perm {
        &(&self.inverse() * &other.inverse()) * &(self * other)
    }

    /// The permutation induced on the blocks of a partition, if the blocks
    /// form a system of imprimitivity for `self`.
    pub fn on_blocks(&self, block_of: &[usize], blocks: usize) -> Option<Perm> {
        let mut img = vec![u8::MAX; blocks];
        for (i, &b) in block_of.iter().enumerate() {
            let target = block_of[self.apply(i)] as u8;
            if img[b] == u8::MAX {
                img[b] = target;
            } else if img[b] != target {
                return None;
            }
        }
        Some(Perm { images: img })
    }
}

impl Mul for &Perm {
    type Output = Perm;

    fn mul(self, rhs: &Perm) -> Perm {
        assert_eq!(self.degree(), rhs.degree(), "permutation degree mismatch");
        Perm {
            images: rhs.images.iter().map(|&i| self.images[i as usize]).collect(),
        }
    }
}

impl fmt::Debug for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.images)
    }
}

impl fmt::Display for Perm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = self.degree();
        let mut seen = vec![false; n];
        let mut any = false;
        for start in 0..n {
            if seen[start] || self.apply(start) == start {
                continue;
            }
            any = true;
            f.write_str("(")?;
            let mut i = start;
            let mut first = true;
            while !seen[i] {
                seen[i] = true;
                if !first {
                    f.write_str(" ")?;
                }
                first = false;
                write!(f, "{i}")?;
                i = self.apply(i);
            }
            f.write_str(")")?;
        }
        if !any {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// `p ∘ q`, i.e. `i ↦ p(q(i))`.
pub fn compose(p: &Perm, q: &Perm) -> Result<Perm> {
    p.compose(q)
}

/// A finitely generated permutation group with its element set materialized.
#[derive(Clone)]
pub struct PermGroup {
    degree: usize,
    generators: Vec<Perm>,
    elements: Vec<Perm>,
}

impl PartialEq for PermGroup {
    fn eq(&self, other: &Self) -> bool {
        self.degree == other.degree && self.elements == other.elements
    }
}

impl Eq for PermGroup {}

impl std::hash::Hash for PermGroup {
    fn hash<H: std::hash::Hasher>(&self, state: &mut H) {
        self.degree.hash(state);
        self.elements.hash(state);
    }
}

impl fmt::Debug for PermGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "PermGroup(order {}, gens [", self.order())?;
        for (i, g) in self.generators.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{g}")?;
        }
        f.write_str("])")
    }
}

/// Incremental BFS closure used to grow a group one generator at a time.
struct Closure {
    degree: usize,
    limit: usize,
    generators: Vec<Perm>,
    seen: HashSet<Perm>,
}

impl Closure {
    fn trivial(degree: usize, limit: usize) -> Self {
        let mut seen = HashSet::new();
        seen.insert(Perm::identity(degree));
        Closure {
            degree,
            limit,
            generators: Vec::new(),
            seen,
        }
    }

    fn from_group(group: &PermGroup, limit: usize) -> Self {
        Closure {
            degree: group.degree,
            limit,
            generators: group.generators.clone(),
            seen: group.elements.iter().cloned().collect(),
        }
    }

    fn contains(&self, p: &Perm) -> bool {
        self.seen.contains(p)
    }

    /// Adds `g` as a generator unless already present. Old elements only
    /// need multiplying by `g`; new ones by every generator.
    fn add(&mut self, g: Perm) -> Result<bool> {
        if g.degree() != self.degree {
            return Err(Error::DegreeMismatch {
                left: self.degree,
                right: g.degree(),
            });
        }
        if self.seen.contains(&g) {
            return Ok(false);
        }
        self.generators.push(g.clone());
        let mut fresh: VecDeque<Perm> = VecDeque::new();
        let old: Vec<Perm> = self.seen.iter().cloned().collect();
        for e in &old {
            let p = &g * e;
            if self.seen.insert(p.clone()) {
                fresh.push_back(p);
            }
        }
        self.check_limit()?;
        while let Some(e) = fresh.pop_front() {
            for gen in &self.generators {
                let p = gen * &e;
                if !self.seen.contains(&p) {
                    self.seen.insert(p.clone());
                    fresh.push_back(p);
                }
            }
            self.check_limit()?;
        }
        Ok(true)
    }

    fn check_limit(&self) -> Result<()> {
        if self.seen.len() > self.limit {
            Err(Error::Capacity {
                what: "group closure",
                limit: self.limit,
            })
        } else {
            Ok(())
        }
    }

    fn finish(self) -> PermGroup {
        let mut elements: Vec<Perm> = self.seen.into_iter().collect();
        elements.sort_unstable();
        PermGroup {
            degree: self.degree,
            generators: self.generators,
            elements,
        }
    }
}

impl PermGroup {
    pub fn trivial(degree: usize) -> Self {
        PermGroup {
            degree,
            generators: Vec::new(),
            elements: vec![Perm::identity(degree)],
        }
    }

    /// `⟨gens⟩` on `degree` points. Redundant generators are dropped.
    pub fn close(degree: usize, gens: impl IntoIterator<Item = Perm>, limit: usize) -> Result<Self> {
        let mut closure = Closure::trivial(degree, limit);
        for g in gens {
            closure.add(g)?;
        }
        Ok(closure.finish())
    }

    /// Builds the subgroup consisting of exactly `elements`, which the
    /// caller guarantees to be closed under composition.
    pub(crate) fn from_closed_set(degree: usize, mut elements: Vec<Perm>, limit: usize) -> Result<Self> {
        elements.sort_unstable();
        let mut closure = Closure::trivial(degree, limit);
        for e in &elements {
            if !closure.contains(e) {
                closure.add(e.clone())?;
            }
        }
        let group = closure.finish();
        debug_assert_eq!(group.elements, elements);
        Ok(group)
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn generators(&self) -> &[Perm] {
        &self.generators
    }

    /// Sorted element list.
    pub fn elements(&self) -> &[Perm] {
        &self.elements
    }

    pub fn contains(&self, p: &Perm) -> bool {
        self.elements.binary_search(p).is_ok()
    }

    /// `⟨self ∪ other⟩`.
    pub fn join(&self, other: &PermGroup, limit: usize) -> Result<PermGroup> {
        let (big, small) = if self.order() >= other.order() {
            (self, other)
        } else {
            (other, self)
        };
        let mut closure = Closure::from_group(big, limit);
        for g in &small.generators {
            closure.add(g.clone())?;
        }
        Ok(closure.finish())
    }

    pub fn meet(&self, other: &PermGroup, limit: usize) -> Result<PermGroup> {
        let common: Vec<Perm> = self
            .elements
            .iter()
            .filter(|e| other.contains(e))
            .cloned()
            .collect();
        PermGroup::from_closed_set(self.degree, common, limit)
    }

    /// Partition into orbits.
    pub fn orbits(&self) -> Partition {
        let mut uf = UnionFind::<usize>::new(self.degree);
        for g in &self.generators {
            for i in 0..self.degree {
                uf.union(i, g.apply(i));
            }
        }
        Partition::from_union_find(uf)
    }

    pub fn is_transitive(&self) -> bool {
        self.orbits().block_count() <= 1
    }

    pub fn pointwise_stabilizer(&self, x: usize, limit: usize) -> Result<PermGroup> {
        let fixing = self
            .elements
            .iter()
            .filter(|g| g.apply(x) == x)
            .cloned()
            .collect();
        PermGroup::from_closed_set(self.degree, fixing, limit)
    }

    pub fn center(&self, limit: usize) -> Result<PermGroup> {
        let central = self
            .elements
            .iter()
            .filter(|z| self.generators.iter().all(|g| (g * *z) == (*z * g)))
            .cloned()
            .collect();
        PermGroup::from_closed_set(self.degree, central, limit)
    }

    /// Image under a homomorphism given on generators by `map`.
    pub fn image(&self, degree: usize, map: impl Fn(&Perm) -> Perm, limit: usize) -> Result<PermGroup> {
        PermGroup::close(degree, self.generators.iter().map(map), limit)
    }
}

pub fn close(degree: usize, gens: impl IntoIterator<Item = Perm>, limit: usize) -> Result<PermGroup> {
    PermGroup::close(degree, gens, limit)
}

pub fn orbits(group: &PermGroup) -> Partition {
    group.orbits()
}

pub fn is_subgroup(sub: &PermGroup, group: &PermGroup) -> bool {
    sub.degree == group.degree && sub.generators.iter().all(|g| group.contains(g))
}

pub fn is_normal_in(sub: &PermGroup, group: &PermGroup) -> bool {
    is_subgroup(sub, group)
        && group
            .generators
            .iter()
            .all(|a| sub.generators.iter().all(|s| sub.contains(&a.conjugate(s))))
}

pub fn is_transitive(group: &PermGroup) -> bool {
    group.is_transitive()
}

pub fn pointwise_stabilizer(group: &PermGroup, x: usize, limit: usize) -> Result<PermGroup> {
    group.pointwise_stabilizer(x, limit)
}

pub fn center_of(group: &PermGroup, limit: usize) -> Result<PermGroup> {
    group.center(limit)
}

/// `⟨[n, m] : n ∈ N, m ∈ M⟩`.
pub fn commutator_subgroup(n: &PermGroup, m: &PermGroup, limit: usize) -> Result<PermGroup> {
    if n.degree != m.degree {
        return Err(Error::DegreeMismatch {
            left: n.degree,
            right: m.degree,
        });
    }
    let mut closure = Closure::trivial(n.degree, limit);
    for a in &n.elements {
        for b in &m.elements {
            let c = a.commutator(b);
            if !closure.contains(&c) {
                closure.add(c)?;
            }
        }
    }
    Ok(closure.finish())
}

/// Smallest subgroup containing `seed` and normalized by `ambient`.
pub fn normal_closure(
    ambient: &PermGroup,
    seed: impl IntoIterator<Item = Perm>,
    limit: usize,
) -> Result<PermGroup> {
    let mut closure = Closure::trivial(ambient.degree, limit);
    for s in seed {
        closure.add(s)?;
    }
    let inverses: Vec<Perm> = ambient.generators.iter().map(Perm::inverse).collect();
    // Conjugates of generators by ambient generators suffice; the
    // generator list grows while we scan it.
    let mut i = 0;
    while i < closure.generators.len() {
        let s = closure.generators[i].clone();
        for (a, a_inv) in ambient.generators.iter().zip(&inverses) {
            let c = &(a * &s) * a_inv;
            if !closure.contains(&c) {
                closure.add(c)?;
            }
        }
        i += 1;
    }
    Ok(closure.finish())
}

/// Conjugacy-class representatives of `within`'s elements under `ambient`.
fn class_representatives(ambient: &PermGroup, within: &PermGroup) -> Vec<Perm> {
    let mut seen: HashSet<&Perm> = HashSet::new();
    let mut reps = Vec::new();
    let index: HashMap<&Perm, usize> = within.elements.iter().enumerate().map(|(i, p)| (p, i)).collect();
    for e in &within.elements {
        if seen.contains(e) {
            continue;
        }
        reps.push(e.clone());
        seen.insert(e);
        let mut stack = vec![e.clone()];
        while let Some(x) = stack.pop() {
            for a in &ambient.generators {
                let c = a.conjugate(&x);
                if let Some(&i) = index.get(&c) {
                    let key = &within.elements[i];
                    if seen.insert(key) {
                        stack.push(c);
                    }
                }
            }
        }
    }
    reps
}

/// Normal subgroups of `ambient` contained in `within`, which must itself be
/// normal in `ambient`. Sorted by order, then elements.
pub fn normal_subgroups_within(
    ambient: &PermGroup,
    within: &PermGroup,
    group_limit: usize,
    count_limit: usize,
) -> Result<Vec<PermGroup>> {
    let mut principal: Vec<PermGroup> = Vec::new();
    for rep in class_representatives(ambient, within) {
        if rep.is_identity() {
            continue;
        }
        let n = normal_closure(ambient, [rep], group_limit)?;
        if !principal.contains(&n) {
            principal.push(n);
        }
    }
    let mut found: HashSet<PermGroup> = HashSet::new();
    let mut queue: VecDeque<PermGroup> = VecDeque::new();
    let trivial = PermGroup::trivial(ambient.degree);
    found.insert(trivial.clone());
    queue.push_back(trivial);
    while let Some(k) = queue.pop_front() {
        for p in &principal {
            if is_subgroup(p, &k) {
                continue;
            }
            let j = k.join(p, group_limit)?;
            if !found.contains(&j) {
                if found.len() >= count_limit {
                    return Err(Error::Capacity {
                        what: "normal subgroup enumeration",
                        limit: count_limit,
                    });
                }
                found.insert(j.clone());
                queue.push_back(j);
            }
        }
    }
    let mut all: Vec<PermGroup> = found.into_iter().collect();
    all.sort_by(|a, b| a.order().cmp(&b.order()).then_with(|| a.elements.cmp(&b.elements)));
    Ok(all)
}

/// Every normal subgroup of `group`: join-closure of the normal closures of
/// single elements, together with the trivial group.
pub fn all_normal_subgroups(group: &PermGroup, group_limit: usize, count_limit: usize) -> Result<Vec<PermGroup>> {
    normal_subgroups_within(group, group, group_limit, count_limit)
}

//! Central extensions `Aff(Q, A, g, f, θ)` on `Q × A` and affine left
//! quasigroups `Aff(A, g, f, c)`.

use std::collections::BTreeSet;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::congr;
use crate::displ;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lquasi::LeftQuasigroup;
use crate::partition::Partition;
use crate::perm::Perm;
use crate::term::Term;

/// `Z_{n_1} × … × Z_{n_k}`. Elements are indexed in mixed radix with the
/// first coordinate most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianGroup {
    moduli: Vec<usize>,
}

impl AbelianGroup {
    pub fn new(moduli: &[usize]) -> Result<Self> {
        if moduli.contains(&0) {
            return Err(Error::MalformedTable("moduli must be positive".into()));
        }
        Ok(AbelianGroup {
            moduli: moduli.to_vec(),
        })
    }

    pub fn cyclic(n: usize) -> Self {
        AbelianGroup { moduli: vec![n] }
    }

    pub fn moduli(&self) -> &[usize] {
        &self.moduli
    }

    pub fn rank(&self) -> usize {
        self.moduli.len()
    }

    pub fn order(&self) -> usize {
        self.moduli.iter().product()
    }

    pub fn zero(&self) -> usize {
        0
    }

    pub fn element(&self, mut index: usize) -> Vec<usize> {
        let mut out = vec![0; self.rank()];
        for i in (0..self.rank()).rev() {
            out[i] = index % self.moduli[i];
            index /= self.moduli[i];
        }
        out
    }

    pub fn index(&self, v: &[usize]) -> usize {
        v.iter()
            .zip(&self.moduli)
            .fold(0, |acc, (&x, &m)| acc * m + x % m)
    }

    pub fn add(&self, a: usize, b: usize) -> usize {
        let (va, vb) = (self.element(a), self.element(b));
        let sum: Vec<usize> = va.iter().zip(&vb).zip(&self.moduli).map(|((x, y), m)| (x + y) % m).collect();
        self.index(&sum)
    }

    pub fn neg(&self, a: usize) -> usize {
        let v: Vec<usize> = self.element(a).iter().zip(&self.moduli).map(|(x, m)| (m - x) % m).collect();
        self.index(&v)
    }

    pub fn sub(&self, a: usize, b: usize) -> usize {
        self.add(a, self.neg(b))
    }

    /// The unit vectors `e_i`.
    pub fn generators(&self) -> Vec<usize> {
        (0..self.rank())
            .filter(|&i| self.moduli[i] > 1)
            .map(|i| {
                let mut v = vec![0; self.rank()];
                v[i] = 1;
                self.index(&v)
            })
            .collect()
    }

    /// The subgroup generated by `gens`, as a sorted list of indices.
    pub fn subgroup(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::from([0]);
        let mut frontier = vec![0];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.add(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// Every subgroup, sorted by order then elements.
    pub fn all_subgroups(&self) -> Vec<Vec<usize>> {
        let cyclic: BTreeSet<Vec<usize>> = (0..self.order()).map(|a| self.subgroup(&[a])).collect();
        let mut found: BTreeSet<Vec<usize>> = cyclic.clone();
        let mut frontier: Vec<Vec<usize>> = cyclic.iter().cloned().collect();
        while let Some(s) = frontier.pop() {
            for c in &cyclic {
                let mut gens = s.clone();
                gens.extend(c);
                let j = self.subgroup(&gens);
                if found.insert(j.clone()) {
                    frontier.push(j);
                }
            }
        }
        let mut out: Vec<Vec<usize>> = found.into_iter().collect();
        out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
        out
    }
}

/// An endomorphism of `A` given by an integer matrix acting on coordinate
/// vectors. Entries are reduced modulo the row modulus.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EndoMap {
    moduli: Vec<usize>,
    matrix: Vec<Vec<usize>>,
}

impl EndoMap {
    /// Requires `m[i][j] · n_j ≡ 0 (mod n_i)` so the map is well defined.
    pub fn new(group: &AbelianGroup, matrix: &[Vec<i64>]) -> Result<Self> {
        let k = group.rank();
        if matrix.len() != k || matrix.iter().any(|r| r.len() != k) {
            return Err(Error::IllDefinedEndomorphism(format!("expected a {k}×{k} matrix")));
        }
        let n = &group.moduli;
        let mut normalized = vec![vec![0usize; k]; k];
        for i in 0..k {
            for j in 0..k {
                let v = matrix[i][j].rem_euclid(n[i] as i64) as usize;
                if !(v * n[j]).is_multiple_of(n[i]) {
                    return Err(Error::IllDefinedEndomorphism(format!(
                        "entry ({i},{j}) = {v} does not respect Z_{} → Z_{}",
                        n[j], n[i]
                    )));
                }
                normalized[i][j] = v;
            }
        }
        Ok(EndoMap {
            moduli: n.clone(),
            matrix: normalized,
        })
    }

    pub fn identity(group: &AbelianGroup) -> Self {
        Self::scalar(group, 1)
    }

    pub fn zero(group: &AbelianGroup) -> Self {
        Self::scalar(group, 0)
    }

    pub fn scalar(group: &AbelianGroup, s: i64) -> Self {
        let k = group.rank();
        let m: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| if i == j { s } else { 0 }).collect()).collect();
        Self::new(group, &m).expect("scalar maps are well defined")
    }

    pub fn matrix(&self) -> &[Vec<usize>] {
        &self.matrix
    }

    pub fn apply_vec(&self, v: &[usize]) -> Vec<usize> {
        self.matrix
            .iter()
            .zip(&self.moduli)
            .map(|(row, &m)| row.iter().zip(v).map(|(&c, &x)| c * x).sum::<usize>() % m)
            .collect()
    }

    pub fn apply(&self, group: &AbelianGroup, a: usize) -> usize {
        group.index(&self.apply_vec(&group.element(a)))
    }

    /// Values on every element index.
    pub fn table(&self, group: &AbelianGroup) -> Vec<usize> {
        (0..group.order()).map(|a| self.apply(group, a)).collect()
    }

    pub fn is_automorphism(&self, group: &AbelianGroup) -> bool {
        let mut seen = vec![false; group.order()];
        self.table(group).into_iter().all(|v| !std::mem::replace(&mut seen[v], true))
    }

    /// `1 − self`.
    pub fn one_minus(&self, group: &AbelianGroup) -> Self {
        let k = group.rank();
        let m: Vec<Vec<i64>> = (0..k)
            .map(|i| (0..k).map(|j| (i == j) as i64 - self.matrix[i][j] as i64).collect())
            .collect();
        Self::new(group, &m).expect("difference of well-defined maps is well defined")
    }

    /// Equality as maps, not as matrices.
    pub fn same_map(&self, other: &EndoMap, group: &AbelianGroup) -> bool {
        self.table(group) == other.table(group)
    }

    /// Every endomorphism of `group`, one matrix per map.
    pub fn all(group: &AbelianGroup) -> Vec<EndoMap> {
        let k = group.rank();
        let n = &group.moduli;
        let mut out = Vec::new();
        let mut entries = vec![0usize; k * k];
        loop {
            let valid = (0..k * k).all(|p| (entries[p] * n[p % k]).is_multiple_of(n[p / k]));
            if valid {
                let m: Vec<Vec<i64>> = (0..k).map(|i| (0..k).map(|j| entries[i * k + j] as i64).collect()).collect();
                out.push(EndoMap::new(group, &m).expect("checked above"));
            }
            let mut p = k * k;
            loop {
                if p == 0 {
                    return out;
                }
                p -= 1;
                entries[p] += 1;
                if entries[p] < n[p / k] {
                    break;
                }
                entries[p] = 0;
            }
        }
    }

    pub fn automorphisms(group: &AbelianGroup) -> Vec<EndoMap> {
        Self::all(group).into_iter().filter(|f| f.is_automorphism(group)).collect()
    }
}

/// `θ: Q × Q → A`, stored row-major as element indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Cocycle {
    order: usize,
    values: Vec<usize>,
}

impl Cocycle {
    pub fn new(order: usize, values: Vec<usize>, group: &AbelianGroup) -> Result<Self> {
        if values.len() != order * order {
            return Err(Error::MalformedTable(format!(
                "cocycle needs {} values, got {}",
                order * order,
                values.len()
            )));
        }
        if let Some(&v) = values.iter().find(|&&v| v >= group.order()) {
            return Err(Error::OutOfRange {
                point: v,
                order: group.order(),
            });
        }
        Ok(Cocycle { order, values })
    }

    pub fn zero(order: usize) -> Self {
        Cocycle {
            order,
            values: vec![0; order * order],
        }
    }

    pub fn constant(order: usize, c: usize) -> Self {
        Cocycle {
            order,
            values: vec![c; order * order],
        }
    }

    /// Uniform values; the diagonal is forced to zero when asked.
    pub fn random<R: Rng + ?Sized>(rng: &mut R, order: usize, group: &AbelianGroup, zero_diagonal: bool) -> Self {
        let values = (0..order * order)
            .map(|i| {
                if zero_diagonal && i / order == i % order {
                    0
                } else {
                    rng.gen_range(0..group.order())
                }
            })
            .collect();
        Cocycle { order, values }
    }

    pub fn get(&self, x: usize, y: usize) -> usize {
        self.values[x * self.order + y]
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }
}

/// `E = Aff(Q, A, g, f, θ)`; the point `(x, a)` has index `x·|A| + a`.
#[derive(Debug, Clone)]
pub struct Extension {
    pub base: LeftQuasigroup,
    pub group: AbelianGroup,
    pub g: EndoMap,
    pub f: EndoMap,
    pub theta: Cocycle,
    pub algebra: LeftQuasigroup,
    g_tab: Vec<usize>,
    f_tab: Vec<usize>,
    f_inv_tab: Vec<usize>,
}

pub fn build_extension(
    base: &LeftQuasigroup,
    group: &AbelianGroup,
    g: &EndoMap,
    f: &EndoMap,
    theta: &Cocycle,
) -> Result<Extension> {
    if !f.is_automorphism(group) {
        return Err(Error::NotAutomorphism);
    }
    if theta.order != base.order() {
        return Err(Error::DegreeMismatch {
            left: base.order(),
            right: theta.order,
        });
    }
    let m = group.order();
    if base.order() * m > 255 {
        return Err(Error::Capacity {
            what: "extension order",
            limit: 255,
        });
    }
    let g_tab = g.table(group);
    let f_tab = f.table(group);
    let mut f_inv_tab = vec![0; m];
    for (a, &fa) in f_tab.iter().enumerate() {
        f_inv_tab[fa] = a;
    }
    let algebra = LeftQuasigroup::from_fn(base.order() * m, |u, v| {
        let (x, a) = (u / m, u % m);
        let (y, b) = (v / m, v % m);
        let second = group.add(group.add(g_tab[a], f_tab[b]), theta.get(x, y));
        base.op(x, y) * m + second
    })?;
    Ok(Extension {
        base: base.clone(),
        group: group.clone(),
        g: g.clone(),
        f: f.clone(),
        theta: theta.clone(),
        algebra,
        g_tab,
        f_tab,
        f_inv_tab,
    })
}

/// `Aff(A, g, f, c)`: `a · b = g(a) + f(b) + c`.
pub fn build_affine(group: &AbelianGroup, g: &EndoMap, f: &EndoMap, c: usize) -> Result<LeftQuasigroup> {
    if c >= group.order() {
        return Err(Error::OutOfRange {
            point: c,
            order: group.order(),
        });
    }
    let point = LeftQuasigroup::projection(1);
    Ok(build_extension(&point, group, g, f, &Cocycle::constant(1, c))?.algebra)
}

/// `E` is idempotent iff `Q` is idempotent, `g = 1 − f` and `θ(x, x) = 0`.
pub fn is_idempotent_extension(
    base: &LeftQuasigroup,
    group: &AbelianGroup,
    g: &EndoMap,
    f: &EndoMap,
    theta: &Cocycle,
) -> bool {
    base.is_idempotent()
        && g.same_map(&f.one_minus(group), group)
        && (0..base.order()).all(|x| theta.get(x, x) == 0)
}

impl Extension {
    pub fn order(&self) -> usize {
        self.algebra.order()
    }

    pub fn point(&self, x: usize, a: usize) -> usize {
        x * self.group.order() + a
    }

    pub fn coords(&self, p: usize) -> (usize, usize) {
        (p / self.group.order(), p % self.group.order())
    }

    pub fn f_power(&self, a: usize, k: i64) -> usize {
        let tab = if k >= 0 { &self.f_tab } else { &self.f_inv_tab };
        (0..k.unsigned_abs()).fold(a, |acc, _| tab[acc])
    }

    /// The order of `f` as a permutation of `A`.
    pub fn f_order(&self) -> usize {
        let mut k = 1;
        let mut cur = self.f_tab.clone();
        while cur.iter().enumerate().any(|(a, &v)| a != v) {
            cur = cur.iter().map(|&v| self.f_tab[v]).collect();
            k += 1;
        }
        k
    }

    /// `(y,c) \ (x,a) = (y\x, f⁻¹(a − g(c) − θ(y, y\x)))`.
    pub fn ldiv_formula(&self, u: usize, v: usize) -> usize {
        let ((y, c), (x, a)) = (self.coords(u), self.coords(v));
        let z = self.base.ldiv(y, x);
        let grp = &self.group;
        let inner = grp.sub(grp.sub(a, self.g_tab[c]), self.theta.get(y, z));
        self.point(z, self.f_inv_tab[inner])
    }

    pub fn ker_p1(&self) -> Partition {
        let m = self.group.order();
        let labels: Vec<usize> = (0..self.order()).map(|p| p / m).collect();
        Partition::from_labels(&labels)
    }

    /// Whether `p₁` respects `·` and `\`.
    pub fn p1_is_morphism(&self) -> bool {
        let n = self.order();
        let m = self.group.order();
        (0..n).all(|u| {
            (0..n).all(|v| {
                self.algebra.op(u, v) / m == self.base.op(u / m, v / m)
                    && self.algebra.ldiv(u, v) / m == self.base.ldiv(u / m, v / m)
            })
        })
    }

    /// `g(N) ⊆ N` and `f(N) = N`.
    pub fn is_invariant(&self, subgroup: &[usize]) -> bool {
        let contains = |x: usize| subgroup.binary_search(&x).is_ok();
        subgroup.iter().all(|&a| contains(self.g_tab[a]) && contains(self.f_tab[a]))
    }

    /// `(x,a) α_N (y,b)` iff `x = y` and `a − b ∈ N`; no invariance check.
    pub fn alpha_n_unchecked(&self, subgroup: &[usize]) -> Partition {
        let m = self.group.order();
        let labels: Vec<(usize, usize)> = (0..self.order())
            .map(|p| {
                let (x, a) = (p / m, p % m);
                let coset_min = subgroup.iter().map(|&s| self.group.add(a, s)).min().unwrap_or(a);
                (x, coset_min)
            })
            .collect();
        Partition::from_labels(&labels)
    }

    pub fn alpha_n(&self, subgroup: &[usize]) -> Result<Partition> {
        if !self.is_invariant(subgroup) {
            return Err(Error::InvarianceViolation("α_N needs g(N) ⊆ N = f(N)"));
        }
        Ok(self.alpha_n_unchecked(subgroup))
    }

    /// Subgroups `N` with `g(N) ⊆ N = f(N)`.
    pub fn invariant_subgroups(&self) -> Vec<Vec<usize>> {
        self.group
            .all_subgroups()
            .into_iter()
            .filter(|s| self.is_invariant(s))
            .collect()
    }

    /// `H = ⟨f^k g(A) : k ∈ Z⟩`.
    pub fn h_subgroup(&self) -> Vec<usize> {
        let ord = self.f_order() as i64;
        let gens: Vec<usize> = (0..self.group.order())
            .flat_map(|a| (0..ord).map(move |k| (a, k)))
            .map(|(a, k)| self.f_power(self.g_tab[a], k))
            .collect();
        self.group.subgroup(&gens)
    }

    /// Checks `h L_{(x,a)} L_{(x,b)}⁻¹ h⁻¹ (y,c) = (y, c + f^k g(a−b))` for
    /// `h = w L_{(z,d)}^k`, with `w` the identity or a generator of `Dis(E)`
    /// and `k` from `-1` to the order of `L_{(z,d)}`.
    pub fn displacement_action_check(&self, limits: &Limits) -> Result<bool> {
        let e = &self.algebra;
        let n = self.order();
        let grp = &self.group;
        let m = grp.order();
        let translations = e.left_translations();
        let inverses: Vec<Perm> = translations.iter().map(Perm::inverse).collect();
        let dis = e.dis(limits)?;
        let mut ws = vec![Perm::identity(n)];
        ws.extend(dis.generators().iter().cloned());
        for w in &ws {
            let w_inv = w.inverse();
            for zd in 0..n {
                let lz = &translations[zd];
                let top = lz.order() as i64;
                for k in -1..=top {
                    let h = w * &lz.pow(k);
                    let h_inv = &lz.pow(-k) * &w_inv;
                    for x in 0..self.base.order() {
                        for a in 0..m {
                            for b in 0..m {
                                let (pa, pb) = (self.point(x, a), self.point(x, b));
                                let disp = &translations[pa] * &inverses[pb];
                                let conj = &(&h * &disp) * &h_inv;
                                let shift = self.f_power(self.g_tab[grp.sub(a, b)], k);
                                for p in 0..n {
                                    let (y, c) = self.coords(p);
                                    if conj.apply(p) != self.point(y, grp.add(c, shift)) {
                                        return Ok(false);
                                    }
                                }
                            }
                        }
                    }
                }
            }
        }
        Ok(true)
    }

    /// Orbits of `Dis_{ker p₁}` are `(y, c + H)`; when `Q` is idempotent and
    /// `ker p₁ = 𝒪_{Dis_{ker p₁}}`, every block is a connected subalgebra.
    pub fn block_connectivity_check(&self, limits: &Limits) -> Result<bool> {
        let kernel = self.ker_p1();
        let low = displ::dis_alpha(&self.algebra, &kernel, limits)?;
        let orbits = low.orbits();
        let h = self.h_subgroup();
        if orbits != self.alpha_n_unchecked(&h) {
            return Ok(false);
        }
        if self.base.is_idempotent() && orbits == kernel {
            for block in kernel.blocks() {
                let sub = self.algebra.subalgebra(&block)?;
                if !displ::is_connected(&sub) {
                    return Ok(false);
                }
            }
        }
        Ok(true)
    }

    /// The block `{(x, a)}` of `ker p₁` is `Aff(A, 1 − f, f, 0)` for idempotent `E`.
    pub fn fiber_affine(&self) -> Result<LeftQuasigroup> {
        build_affine(&self.group, &self.f.one_minus(&self.group), &self.f, 0)
    }

    /// For one term of arity at most 3: the first coordinate of `t^E` is
    /// `t^Q` of the first coordinates, and shifting argument `j` by a
    /// generator `e` of `A` shifts the second coordinate by an amount that
    /// depends only on `j` and `e`.
    pub fn term_form_check(&self, term: &Term) -> bool {
        let arity = term.arity();
        let n = self.order();
        let qn = self.base.order();
        let m = self.group.order();
        let te = term.value_table(n, arity, self.algebra.mul_table(), self.algebra.ldiv_table());
        let tq = term.value_table(qn, arity, self.base.mul_table(), self.base.ldiv_table());
        let total = te.len();
        for (idx, &v) in te.iter().enumerate() {
            let mut rest = idx;
            let mut q_idx = 0;
            let mut stride = 1;
            for _ in 0..arity {
                q_idx += (rest % n / m) * stride;
                stride *= qn;
                rest /= n;
            }
            if v as usize / m != tq[q_idx] as usize {
                return false;
            }
        }
        let add: Vec<usize> = (0..m * m).map(|i| self.group.add(i / m, i % m)).collect();
        let sub: Vec<usize> = (0..m * m).map(|i| self.group.sub(i / m, i % m)).collect();
        let gens = self.group.generators();
        for j in 0..arity {
            let place = n.pow((arity - 1 - j) as u32);
            for &e in &gens {
                let mut expected: Option<usize> = None;
                for idx in 0..total {
                    let p = (idx / place) % n;
                    let (x, a) = (p / m, p % m);
                    let shifted = idx - p * place + self.point(x, add[a * m + e]) * place;
                    let diff = sub[(te[shifted] as usize % m) * m + te[idx] as usize % m];
                    match expected {
                        None => expected = Some(diff),
                        Some(d) if d != diff => return false,
                        _ => {}
                    }
                }
            }
        }
        true
    }
}

/// Quotient by `ker p₁` reproduces the base exactly.
pub fn quotient_is_base(ext: &Extension) -> bool {
    ext.algebra.quotient(&ext.ker_p1()).map(|q| q.algebra == ext.base).unwrap_or(false)
}

pub fn ker_p1_is_central(ext: &Extension) -> bool {
    crate::commut::is_central_congruence(&ext.algebra, &ext.ker_p1())
}

pub fn alpha_n_is_congruence(ext: &Extension, subgroup: &[usize]) -> Result<bool> {
    Ok(congr::is_congruence(&ext.algebra, &ext.alpha_n(subgroup)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lim() -> Limits {
        Limits::default()
    }

    fn point() -> LeftQuasigroup {
        LeftQuasigroup::projection(1)
    }

    #[test]
    fn group_basics() {
        let a = AbelianGroup::new(&[2, 2]).unwrap();
        assert_eq!(a.order(), 4);
        assert_eq!(a.element(3), vec![1, 1]);
        assert_eq!(a.add(1, 2), 3);
        assert_eq!(a.all_subgroups().len(), 5);
        assert_eq!(AbelianGroup::cyclic(4).all_subgroups().len(), 3);
        assert_eq!(AbelianGroup::cyclic(4).subgroup(&[2]), vec![0, 2]);
        assert!(AbelianGroup::new(&[0]).is_err());
    }

    #[test]
    fn endomorphism_counts() {
        let count = |m: &[usize]| {
            let a = AbelianGroup::new(m).unwrap();
            (EndoMap::all(&a).len(), EndoMap::automorphisms(&a).len())
        };
        assert_eq!(count(&[2]), (2, 1));
        assert_eq!(count(&[3]), (3, 2));
        assert_eq!(count(&[4]), (4, 2));
        assert_eq!(count(&[2, 2]), (16, 6));
        assert_eq!(count(&[2, 4]).0, 32);
        let a = AbelianGroup::new(&[2, 4]).unwrap();
        assert!(EndoMap::new(&a, &[vec![0, 0], vec![1, 0]]).is_err());
        assert!(EndoMap::new(&a, &[vec![0, 0], vec![2, 0]]).is_ok());
        assert_eq!(EndoMap::scalar(&AbelianGroup::cyclic(4), -1).matrix(), &[vec![3]]);
    }

    #[test]
    fn extension_examples() {
        let z3 = AbelianGroup::cyclic(3);
        let e = build_extension(&point(), &z3, &EndoMap::zero(&z3), &EndoMap::identity(&z3), &Cocycle::zero(1)).unwrap();
        assert_eq!(e.algebra, LeftQuasigroup::projection(3));

        let z4 = AbelianGroup::cyclic(4);
        let e = build_extension(&point(), &z4, &EndoMap::scalar(&z4, 2), &EndoMap::scalar(&z4, -1), &Cocycle::zero(1))
            .unwrap();
        assert_eq!(e.algebra, LeftQuasigroup::dihedral(4));

        let d3 = LeftQuasigroup::dihedral(3);
        let z2 = AbelianGroup::cyclic(2);
        let e = build_extension(&d3, &z2, &EndoMap::zero(&z2), &EndoMap::identity(&z2), &Cocycle::zero(3)).unwrap();
        assert_eq!(e.order(), 6);
        assert!(e.algebra.is_rack() && e.algebra.is_idempotent());
        assert!(e.p1_is_morphism() && quotient_is_base(&e));
        assert_eq!(e.ker_p1().to_string(), "0,1|2,3|4,5");

        let bad = build_extension(&point(), &z4, &EndoMap::zero(&z4), &EndoMap::scalar(&z4, 2), &Cocycle::zero(1));
        assert!(matches!(bad, Err(Error::NotAutomorphism)));
    }

    #[test]
    fn affine_examples() {
        let z2 = AbelianGroup::cyclic(2);
        let q = build_affine(&z2, &EndoMap::zero(&z2), &EndoMap::identity(&z2), 1).unwrap();
        assert_eq!(q.rows(), vec![vec![1, 0], vec![1, 0]]);
        let z3 = AbelianGroup::cyclic(3);
        let q = build_affine(&z3, &EndoMap::scalar(&z3, 2), &EndoMap::scalar(&z3, -1), 0).unwrap();
        assert_eq!(q, LeftQuasigroup::dihedral(3));
        let a = AbelianGroup::new(&[2, 2]).unwrap();
        let q = build_affine(&a, &EndoMap::zero(&a), &EndoMap::identity(&a), 0).unwrap();
        assert!(q.is_projection());
    }

    #[test]
    fn idempotent_extension_examples() {
        let z3 = AbelianGroup::cyclic(3);
        let f = EndoMap::scalar(&z3, 2);
        let d3 = LeftQuasigroup::dihedral(3);
        assert!(is_idempotent_extension(&d3, &z3, &f.one_minus(&z3), &f, &Cocycle::zero(3)));
        let one = EndoMap::identity(&z3);
        assert!(!is_idempotent_extension(&d3, &z3, &one, &one, &Cocycle::zero(3)));
        let shift = LeftQuasigroup::validate(&[vec![1, 0], vec![1, 0]]).unwrap();
        assert!(!is_idempotent_extension(&shift, &z3, &f.one_minus(&z3), &f, &Cocycle::zero(2)));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let theta = Cocycle::random(&mut rng, 3, &z3, true);
            let e = build_extension(&d3, &z3, &f.one_minus(&z3), &f, &theta).unwrap();
            assert!(e.algebra.is_idempotent());
        }
    }

    #[test]
    fn left_division_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let a = AbelianGroup::new(&[2, 2]).unwrap();
        let ends = EndoMap::all(&a);
        let auts = EndoMap::automorphisms(&a);
        let base = LeftQuasigroup::validate(&[vec![1, 2, 0], vec![0, 2, 1], vec![2, 1, 0]]).unwrap();
        for _ in 0..30 {
            let g = &ends[rng.gen_range(0..ends.len())];
            let f = &auts[rng.gen_range(0..auts.len())];
            let theta = Cocycle::random(&mut rng, 3, &a, false);
            let e = build_extension(&base, &a, g, f, &theta).unwrap();
            for u in 0..e.order() {
                for v in 0..e.order() {
                    assert_eq!(e.algebra.ldiv(u, v), e.ldiv_formula(u, v));
                }
            }
        }
    }

    #[test]
    fn alpha_n_examples() {
        let z4 = AbelianGroup::cyclic(4);
        let e = build_extension(&point(), &z4, &EndoMap::scalar(&z4, 2), &EndoMap::scalar(&z4, -1), &Cocycle::zero(1))
            .unwrap();
        assert!(e.alpha_n(&[0]).unwrap().is_discrete());
        assert_eq!(e.alpha_n(&z4.subgroup(&[1])).unwrap(), e.ker_p1());
        assert!(e.ker_p1().is_total());
        let half = e.alpha_n(&z4.subgroup(&[2])).unwrap();
        assert_eq!(half.to_string(), "0,2|1,3");
        assert!(congr::is_congruence(&e.algebra, &half));
    }

    #[test]
    fn non_invariant_subgroup_breaks_alpha_n() {
        // f swaps the two factors of Z_2 × Z_2, so N = ⟨(1,0)⟩ has f(N) ≠ N
        let a = AbelianGroup::new(&[2, 2]).unwrap();
        let f = EndoMap::new(&a, &[vec![0, 1], vec![1, 0]]).unwrap();
        let e = build_extension(&point(), &a, &EndoMap::zero(&a), &f, &Cocycle::zero(1)).unwrap();
        let n = a.subgroup(&[a.index(&[1, 0])]);
        assert!(matches!(e.alpha_n(&n), Err(Error::InvarianceViolation(_))));
        assert!(!congr::is_congruence(&e.algebra, &e.alpha_n_unchecked(&n)));
        assert_eq!(e.invariant_subgroups().len(), 3);
    }

    #[test]
    fn displacement_action_examples() {
        let z4 = AbelianGroup::cyclic(4);
        let e = build_extension(&point(), &z4, &EndoMap::scalar(&z4, 2), &EndoMap::scalar(&z4, -1), &Cocycle::zero(1))
            .unwrap();
        assert!(e.displacement_action_check(&lim()).unwrap());
        assert_eq!(e.h_subgroup(), vec![0, 2]);
        assert!(e.block_connectivity_check(&lim()).unwrap());

        let d3 = LeftQuasigroup::dihedral(3);
        let z2 = AbelianGroup::cyclic(2);
        let e = build_extension(&d3, &z2, &EndoMap::zero(&z2), &EndoMap::identity(&z2), &Cocycle::zero(3)).unwrap();
        assert!(e.displacement_action_check(&lim()).unwrap());
        assert!(displ::dis_alpha(&e.algebra, &e.ker_p1(), &lim()).unwrap().is_trivial());
        assert_eq!(e.h_subgroup(), vec![0]);
        assert!(e.block_connectivity_check(&lim()).unwrap());
    }

    #[test]
    fn idempotent_blocks_are_affine_and_connected() {
        let z3 = AbelianGroup::cyclic(3);
        let f = EndoMap::scalar(&z3, 2);
        let g = f.one_minus(&z3);
        let d3 = LeftQuasigroup::dihedral(3);
        let e = build_extension(&d3, &z3, &g, &f, &Cocycle::zero(3)).unwrap();
        assert_eq!(e.h_subgroup(), vec![0, 1, 2]);
        assert!(e.block_connectivity_check(&lim()).unwrap());
        let block = e.algebra.subalgebra(&[0, 1, 2]).unwrap();
        assert_eq!(block, e.fiber_affine().unwrap());
    }

    #[test]
    fn term_form_holds_and_detects_non_affine_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let a = AbelianGroup::new(&[2, 2]).unwrap();
        let base = LeftQuasigroup::dihedral(3);
        let f = EndoMap::new(&a, &[vec![0, 1], vec![1, 1]]).unwrap();
        let theta = Cocycle::random(&mut rng, 3, &a, false);
        let e = build_extension(&base, &a, &EndoMap::identity(&a), &f, &theta).unwrap();
        for _ in 0..50 {
            let arity = rng.gen_range(1..=3);
            let t = Term::random(&mut rng, arity, 5);
            assert!(e.term_form_check(&t), "{t}");
        }
        // swap two entries of one row: still a left quasigroup, no longer affine
        let mut rows = e.algebra.rows();
        rows[0].swap(0, 1);
        let mut broken = e.clone();
        broken.algebra = LeftQuasigroup::validate(&rows).unwrap();
        let t = Term::mul(Term::var(0), Term::var(1));
        assert!(!broken.term_form_check(&t));
    }
}

//! The term condition `C(α, β; δ)` via 2×2 matrices, the commutator
//! `[α, β]`, the center and the nilpotency series.

use serde::{Deserialize, Serialize};

use crate::congr;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lquasi::LeftQuasigroup;
use crate::partition::Partition;
use crate::term::Term;

/// Quads `(m11, m12, m21, m22)`: rows follow an `α`-pair, columns a
/// `β`-pair. Closed under componentwise `·` and `\`.
#[derive(Debug, Clone)]
pub struct MatrixSet {
    n: usize,
    quads: Vec<[u8; 4]>,
    member: Vec<bool>,
}

impl MatrixSet {
    fn index(n: usize, m: &[u8; 4]) -> usize {
        ((m[0] as usize * n + m[1] as usize) * n + m[2] as usize) * n + m[3] as usize
    }

    pub fn len(&self) -> usize {
        self.quads.len()
    }

    pub fn is_empty(&self) -> bool {
        self.quads.is_empty()
    }

    pub fn contains(&self, m: [usize; 4]) -> bool {
        m.iter().all(|&v| v < self.n) && self.member[Self::index(self.n, &m.map(|v| v as u8))]
    }

    pub fn iter(&self) -> impl Iterator<Item = [usize; 4]> + '_ {
        self.quads.iter().map(|m| m.map(usize::from))
    }

    /// Whether every quad with `m11 δ m12` also has `m21 δ m22`.
    pub fn centralizes(&self, delta: &Partition) -> bool {
        self.quads.iter().all(|m| respects(m, delta))
    }
}

#[inline]
fn respects(m: &[u8; 4], delta: &Partition) -> bool {
    !delta.related(m[0] as usize, m[1] as usize) || delta.related(m[2] as usize, m[3] as usize)
}

fn generators(alpha: &Partition, beta: &Partition) -> Vec<[u8; 4]> {
    let mut out = Vec::new();
    for (x, y) in alpha.pairs() {
        out.push([x as u8, x as u8, y as u8, y as u8]);
    }
    for (z, u) in beta.pairs() {
        out.push([z as u8, u as u8, z as u8, u as u8]);
    }
    out
}

/// Semi-naive closure. Stops early and returns `None` once `keep` rejects a quad.
fn close(q: &LeftQuasigroup, gens: Vec<[u8; 4]>, mut keep: impl FnMut(&[u8; 4]) -> bool) -> Option<MatrixSet> {
    let n = q.order();
    let mul = q.mul_table();
    let ldiv = q.ldiv_table();
    let mut member = vec![false; n.pow(4)];
    let mut quads: Vec<[u8; 4]> = Vec::new();
    let mut push = |m: [u8; 4], quads: &mut Vec<[u8; 4]>, member: &mut Vec<bool>| -> bool {
        let i = MatrixSet::index(n, &m);
        if !member[i] {
            member[i] = true;
            quads.push(m);
            return keep(&m);
        }
        true
    };
    for g in gens {
        if !push(g, &mut quads, &mut member) {
            return None;
        }
    }
    let mut i = 0;
    while i < quads.len() {
        let a = quads[i];
        for j in 0..=i {
            let b = quads[j];
            for (l, r) in [(a, b), (b, a)] {
                let prod = std::array::from_fn(|k| mul[l[k] as usize * n + r[k] as usize]);
                let quot = std::array::from_fn(|k| ldiv[l[k] as usize * n + r[k] as usize]);
                if !push(prod, &mut quads, &mut member) || !push(quot, &mut quads, &mut member) {
                    return None;
                }
            }
        }
        i += 1;
    }
    Some(MatrixSet { n, quads, member })
}

/// The subpower generated by `(x,x,y,y)` for `x α y` and `(z,u,z,u)` for `z β u`.
pub fn generate_matrices(q: &LeftQuasigroup, alpha: &Partition, beta: &Partition) -> MatrixSet {
    close(q, generators(alpha, beta), |_| true).expect("closure without a filter never aborts")
}

/// `C(α, β; δ)`, stopping at the first witness against it.
pub fn centralizes(q: &LeftQuasigroup, alpha: &Partition, beta: &Partition, delta: &Partition) -> bool {
    close(q, generators(alpha, beta), |m| respects(m, delta)).is_some()
}

pub fn is_abelian_congruence(q: &LeftQuasigroup, alpha: &Partition) -> bool {
    centralizes(q, alpha, alpha, &Partition::discrete(q.order()))
}

pub fn is_central_congruence(q: &LeftQuasigroup, alpha: &Partition) -> bool {
    let n = q.order();
    centralizes(q, alpha, &Partition::total(n), &Partition::discrete(n))
}

/// Least `δ` with `C(α, β; δ)`: iterate `δ ↦ Cg(δ ∪ {(m21, m22) : m11 δ m12})`.
fn commutator_fixpoint(q: &LeftQuasigroup, set: &MatrixSet) -> Partition {
    let mut delta = Partition::discrete(q.order());
    loop {
        let harvest: Vec<(usize, usize)> = set
            .quads
            .iter()
            .filter(|m| delta.related(m[0] as usize, m[1] as usize) && !delta.related(m[2] as usize, m[3] as usize))
            .map(|m| (m[2] as usize, m[3] as usize))
            .collect();
        if harvest.is_empty() {
            return delta;
        }
        delta = congr::congruence_generated(q, delta.spanning_pairs().chain(harvest));
    }
}

/// `[α, β]`, checked against every congruence that satisfies the term condition.
pub fn commutator(q: &LeftQuasigroup, alpha: &Partition, beta: &Partition, limits: &Limits) -> Result<Partition> {
    for p in [alpha, beta] {
        if !congr::is_congruence(q, p) {
            return Err(Error::NotACongruence);
        }
    }
    let set = generate_matrices(q, alpha, beta);
    let delta = commutator_fixpoint(q, &set);
    if !set.centralizes(&delta) {
        return Err(Error::Inconsistency(format!("[α,β] = {delta} fails the term condition")));
    }
    for gamma in congr::all_congruences(q, limits)? {
        if set.centralizes(&gamma) && !delta.leq(&gamma) {
            return Err(Error::Inconsistency(format!("{gamma} centralizes but lies outside [α,β] = {delta}")));
        }
    }
    Ok(delta)
}

/// `ζ_Q`: the join of the congruences centralizing `1_Q` over `0_Q`, verified.
pub fn center(q: &LeftQuasigroup, limits: &Limits) -> Result<Partition> {
    let n = q.order();
    let mut zeta = Partition::discrete(n);
    for alpha in congr::all_congruences(q, limits)? {
        if !alpha.leq(&zeta) && is_central_congruence(q, &alpha) {
            zeta = congr::join_c(q, &zeta, &alpha);
        }
    }
    if !is_central_congruence(q, &zeta) {
        return Err(Error::JoinFailure);
    }
    Ok(zeta)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NilpotencySeries {
    /// `ζ_1 ≤ ζ_2 ≤ …`, lifted to `Q`; stops at `1_Q` or when it stalls.
    pub series: Vec<Partition>,
    pub nilpotent: bool,
}

impl NilpotencySeries {
    pub fn class(&self) -> Option<usize> {
        self.nilpotent.then_some(self.series.len())
    }
}

pub fn nilpotency_series(q: &LeftQuasigroup, limits: &Limits) -> Result<NilpotencySeries> {
    let n = q.order();
    let mut current = Partition::discrete(n);
    let mut series = Vec::new();
    while !current.is_total() {
        let quotient = q.quotient(&current)?;
        let upper = center(&quotient.algebra, limits)?;
        let lifted = congr::lift_congruence(&current, &upper)?;
        if lifted == current {
            return Ok(NilpotencySeries { series, nilpotent: false });
        }
        series.push(lifted.clone());
        current = lifted;
    }
    Ok(NilpotencySeries { series, nilpotent: true })
}

pub fn nilpotency_class(q: &LeftQuasigroup, limits: &Limits) -> Result<Option<usize>> {
    Ok(nilpotency_series(q, limits)?.class())
}

/// Matrices `(t(x̄,z̄), t(x̄,ū), t(ȳ,z̄), t(ȳ,ū))` of one term over every
/// admissible argument choice. The first `alpha_vars` variables take
/// `α`-related pairs, the rest `β`-related pairs.
pub fn term_matrices(
    q: &LeftQuasigroup,
    alpha: &Partition,
    beta: &Partition,
    term: &Term,
    alpha_vars: usize,
) -> Vec<[usize; 4]> {
    let n = q.order();
    let arity = term.arity().max(alpha_vars);
    let table = term.value_table(n, arity, q.mul_table(), q.ldiv_table());
    let a_pairs = alpha.pairs();
    let b_pairs = beta.pairs();
    let choices: Vec<&[(usize, usize)]> = (0..arity)
        .map(|i| if i < alpha_vars { a_pairs.as_slice() } else { b_pairs.as_slice() })
        .collect();
    let mut out = Vec::new();
    let mut pick = vec![0usize; arity];
    loop {
        let mut idx = [0usize; 4];
        for (v, &p) in pick.iter().enumerate() {
            let (left, right) = choices[v][p];
            // row selects the α side, column the β side
            let values = if v < alpha_vars {
                [left, left, right, right]
            } else {
                [left, right, left, right]
            };
            for k in 0..4 {
                idx[k] = idx[k] * n + values[k];
            }
        }
        out.push(idx.map(|i| table[i] as usize));
        let mut v = arity;
        loop {
            if v == 0 {
                return out;
            }
            v -= 1;
            pick[v] += 1;
            if pick[v] < choices[v].len() {
                break;
            }
            pick[v] = 0;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn lim() -> Limits {
        Limits::default()
    }

    fn brute_closure(q: &LeftQuasigroup, alpha: &Partition, beta: &Partition) -> std::collections::BTreeSet<[usize; 4]> {
        let mut set: std::collections::BTreeSet<[usize; 4]> = std::collections::BTreeSet::new();
        for (x, y) in alpha.pairs() {
            set.insert([x, x, y, y]);
        }
        for (z, u) in beta.pairs() {
            set.insert([z, u, z, u]);
        }
        loop {
            let cur: Vec<[usize; 4]> = set.iter().copied().collect();
            let before = set.len();
            for a in &cur {
                for b in &cur {
                    set.insert(std::array::from_fn(|k| q.op(a[k], b[k])));
                    set.insert(std::array::from_fn(|k| q.ldiv(a[k], b[k])));
                }
            }
            if set.len() == before {
                return set;
            }
        }
    }

    #[test]
    fn matrix_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        let zero = Partition::discrete(3);
        let set = generate_matrices(&d3, &zero, &zero);
        assert_eq!(set.len(), 3);
        assert!(set.iter().all(|m| m.iter().all(|&v| v == m[0])));

        let p2 = LeftQuasigroup::projection(2);
        let one = Partition::total(2);
        let set = generate_matrices(&p2, &one, &one);
        let brute = brute_closure(&p2, &one, &one);
        assert_eq!(set.iter().collect::<std::collections::BTreeSet<_>>(), brute);
        assert_eq!(brute.len(), 6);
    }

    #[test]
    fn closure_matches_brute_force() {
        let tables = [
            LeftQuasigroup::dihedral(4),
            LeftQuasigroup::validate(&[vec![1, 0, 2], vec![0, 2, 1], vec![1, 0, 2]]).unwrap(),
            LeftQuasigroup::validate(&[vec![1, 0], vec![1, 0]]).unwrap(),
        ];
        for q in &tables {
            let cons = congr::all_congruences(q, &lim()).unwrap();
            for a in &cons {
                for b in &cons {
                    let set = generate_matrices(q, a, b);
                    assert_eq!(set.iter().collect::<std::collections::BTreeSet<_>>(), brute_closure(q, a, b));
                }
            }
        }
    }

    #[test]
    fn centralizer_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        let (zero, one) = (Partition::discrete(3), Partition::total(3));
        assert!(centralizes(&d3, &zero, &one, &zero));
        assert!(centralizes(&d3, &one, &one, &one));
        assert!(centralizes(&d3, &one, &one, &zero));
        assert!(is_abelian_congruence(&d3, &one));
        assert!(is_central_congruence(&d3, &zero) && is_abelian_congruence(&d3, &zero));
        let d4 = LeftQuasigroup::dihedral(4);
        assert!(is_central_congruence(&d4, &Partition::parse(4, "0,2|1,3").unwrap()));
    }

    #[test]
    fn commutator_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        let (zero, one) = (Partition::discrete(3), Partition::total(3));
        assert_eq!(commutator(&d3, &zero, &one, &lim()).unwrap(), zero);
        assert_eq!(commutator(&d3, &one, &one, &lim()).unwrap(), zero);
        let p2 = LeftQuasigroup::projection(2);
        assert!(commutator(&p2, &Partition::total(2), &Partition::total(2), &lim()).unwrap().is_discrete());
        assert!(commutator(&d3, &Partition::parse(3, "0,1").unwrap(), &one, &lim()).is_err());
    }

    #[test]
    fn center_examples() {
        assert!(center(&LeftQuasigroup::projection(1), &lim()).unwrap().is_total());
        assert!(center(&LeftQuasigroup::dihedral(3), &lim()).unwrap().is_total());
        let d4 = LeftQuasigroup::dihedral(4);
        let z = center(&d4, &lim()).unwrap();
        assert!(Partition::parse(4, "0,2|1,3").unwrap().leq(&z));
    }

    #[test]
    fn nilpotency_examples() {
        let one = nilpotency_series(&LeftQuasigroup::projection(1), &lim()).unwrap();
        assert!(one.series.is_empty() && one.class() == Some(0));
        assert_eq!(nilpotency_class(&LeftQuasigroup::dihedral(3), &lim()).unwrap(), Some(1));
        assert_eq!(nilpotency_class(&LeftQuasigroup::projection(2), &lim()).unwrap(), Some(1));
    }

    #[test]
    fn abelian_and_non_nilpotent_examples() {
        // tetrahedral quandle: affine over GF(4), hence abelian
        let tetra = LeftQuasigroup::validate(&[
            vec![0, 2, 3, 1],
            vec![3, 1, 0, 2],
            vec![1, 3, 2, 0],
            vec![2, 0, 1, 3],
        ])
        .unwrap();
        assert!(tetra.is_rack() && tetra.is_idempotent());
        assert_eq!(nilpotency_class(&tetra, &lim()).unwrap(), Some(1));

        let q = LeftQuasigroup::validate(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 2, 1]]).unwrap();
        assert!(center(&q, &lim()).unwrap().is_discrete());
        let s = nilpotency_series(&q, &lim()).unwrap();
        assert!(!s.nilpotent && s.series.is_empty());
        assert_eq!(s.class(), None);
    }

    #[test]
    fn sampled_terms_land_in_the_closure() {
        let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
        let tables = [
            LeftQuasigroup::dihedral(3),
            LeftQuasigroup::dihedral(4),
            LeftQuasigroup::validate(&[vec![1, 0, 2], vec![0, 2, 1], vec![1, 0, 2]]).unwrap(),
        ];
        for q in &tables {
            let cons = congr::all_congruences(q, &lim()).unwrap();
            for a in &cons {
                for b in &cons {
                    let set = generate_matrices(q, a, b);
                    for _ in 0..40 {
                        let arity = 2 + (rand::Rng::gen_range(&mut rng, 0..2usize));
                        let t = Term::random(&mut rng, arity, 6);
                        for m in term_matrices(q, a, b, &t, 1) {
                            assert!(set.contains(m), "{t} gives {m:?}");
                        }
                    }
                }
            }
        }
    }

    fn arb_lquasi(max: usize) -> impl Strategy<Value = LeftQuasigroup> {
        (1..=max).prop_flat_map(|n| {
            proptest::collection::vec(Just((0..n).collect::<Vec<usize>>()).prop_shuffle(), n)
                .prop_map(|rows| LeftQuasigroup::validate(&rows).unwrap())
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn centralizer_is_monotone_in_delta_antitone_in_alpha(q in arb_lquasi(4)) {
            let cons = congr::all_congruences(&q, &lim()).unwrap();
            for a in &cons {
                for a2 in &cons {
                    if !a.leq(a2) { continue; }
                    for b in &cons {
                        for d in &cons {
                            if centralizes(&q, a2, b, d) {
                                prop_assert!(centralizes(&q, a, b, d));
                            }
                            for d2 in &cons {
                                if d.leq(d2) && centralizes(&q, a, b, d) {
                                    prop_assert!(centralizes(&q, a, b, d2));
                                }
                            }
                        }
                    }
                }
            }
        }

        #[test]
        fn commutator_is_least_and_monotone(q in arb_lquasi(4)) {
            let cons = congr::all_congruences(&q, &lim()).unwrap();
            for a in &cons {
                for b in &cons {
                    let c = commutator(&q, a, b, &lim()).unwrap();
                    prop_assert!(centralizes(&q, a, b, &c));
                    for a2 in &cons {
                        if a.leq(a2) {
                            prop_assert!(c.leq(&commutator(&q, a2, b, &lim()).unwrap()));
                        }
                    }
                }
            }
        }

        #[test]
        fn early_exit_agrees_with_full_scan(q in arb_lquasi(4)) {
            let cons = congr::all_congruences(&q, &lim()).unwrap();
            for a in &cons {
                for b in &cons {
                    let set = generate_matrices(&q, a, b);
                    for d in &cons {
                        prop_assert_eq!(set.centralizes(d), centralizes(&q, a, b, d));
                    }
                }
            }
        }
    }
}

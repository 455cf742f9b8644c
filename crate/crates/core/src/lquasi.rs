//! Finite left quasigroups given by Cayley tables.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::partition::Partition;
use crate::perm::{Perm, PermGroup};
use crate::term::Term;

/// A left quasigroup on `{0..n-1}`: every row of the table is a permutation.
/// The left division `x\y` is read off the inverse rows.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct LeftQuasigroup {
    n: usize,
    mul: Vec<u8>,
    ldiv: Vec<u8>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Predicates {
    pub idempotent: bool,
    pub rack: bool,
    pub quandle: bool,
    pub latin: bool,
    pub projection: bool,
}

/// `Q/α` together with the canonical projection.
#[derive(Debug, Clone)]
pub struct Quotient {
    pub algebra: LeftQuasigroup,
    /// `block_of[x]` is the point of `Q/α` that `x` maps to; blocks are
    /// numbered in order of their least element.
    pub block_of: Vec<usize>,
}

impl LeftQuasigroup {
    /// Accepts a square table over `{0..n-1}` whose rows are bijections.
    pub fn validate(rows: &[Vec<usize>]) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::MalformedTable("empty table".into()));
        }
        if n > u8::MAX as usize {
            return Err(Error::MalformedTable(format!("order {n} exceeds 255")));
        }
        let mut mul = Vec::with_capacity(n * n);
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::MalformedTable(format!(
                    "row {x} has {} entries, expected {n}",
                    row.len()
                )));
            }
            let mut seen = vec![false; n];
            for (y, &v) in row.iter().enumerate() {
                if v >= n {
                    return Err(Error::MalformedTable(format!("entry ({x},{y}) = {v} out of range")));
                }
                if seen[v] {
                    return Err(Error::MalformedTable(format!("row {x} repeats {v}")));
                }
                seen[v] = true;
                mul.push(v as u8);
            }
        }
        Ok(Self::from_raw(n, mul))
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> usize) -> Result<Self> {
        let rows: Vec<Vec<usize>> = (0..n).map(|x| (0..n).map(|y| f(x, y)).collect()).collect();
        Self::validate(&rows)
    }

    /// Builds from left translations, which must be permutations of degree `rows.len()`.
    pub fn from_translations(rows: &[Perm]) -> Result<Self> {
        let n = rows.len();
        let table: Vec<Vec<usize>> = rows.iter().map(|r| r.images().collect()).collect();
        if rows.iter().any(|r| r.degree() != n) {
            return Err(Error::MalformedTable("translation degree differs from order".into()));
        }
        Self::validate(&table)
    }

    pub(crate) fn from_raw(n: usize, mul: Vec<u8>) -> Self {
        let mut ldiv = vec![0u8; n * n];
        for x in 0..n {
            for y in 0..n {
                ldiv[x * n + mul[x * n + y] as usize] = y as u8;
            }
        }
        LeftQuasigroup { n, mul, ldiv }
    }

    /// `x·y = y`.
    pub fn projection(n: usize) -> Self {
        Self::from_fn(n, |_, y| y).expect("projection table")
    }

    /// `x·y = 2x − y mod n`.
    pub fn dihedral(n: usize) -> Self {
        Self::from_fn(n, |x, y| (2 * x + n - y % n) % n).expect("dihedral table")
    }

    pub fn order(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn op(&self, x: usize, y: usize) -> usize {
        self.mul[x * self.n + y] as usize
    }

    #[inline]
    pub fn ldiv(&self, x: usize, y: usize) -> usize {
        self.ldiv[x * self.n + y] as usize
    }

    pub fn checked_op(&self, x: usize, y: usize) -> Result<usize> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.op(x, y))
    }

    pub fn checked_ldiv(&self, x: usize, y: usize) -> Result<usize> {
        self.check(x)?;
        self.check(y)?;
        Ok(self.ldiv(x, y))
    }

    fn check(&self, p: usize) -> Result<()> {
        if p < self.n {
            Ok(())
        } else {
            Err(Error::OutOfRange { point: p, order: self.n })
        }
    }

    pub(crate) fn mul_table(&self) -> &[u8] {
        &self.mul
    }

    pub(crate) fn ldiv_table(&self) -> &[u8] {
        &self.ldiv
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        (0..self.n)
            .map(|x| (0..self.n).map(|y| self.op(x, y)).collect())
            .collect()
    }

    pub fn row(&self, x: usize) -> &[u8] {
        &self.mul[x * self.n..(x + 1) * self.n]
    }

    /// `L_x`.
    pub fn left_translation(&self, x: usize) -> Perm {
        Perm::from_raw(self.row(x).to_vec())
    }

    pub fn left_translations(&self) -> Vec<Perm> {
        (0..self.n).map(|x| self.left_translation(x)).collect()
    }

    pub fn is_idempotent(&self) -> bool {
        (0..self.n).all(|x| self.op(x, x) == x)
    }

    /// `x(yz) = (xy)(xz)` for all triples.
    pub fn is_rack(&self) -> bool {
        let n = self.n;
        (0..n).all(|x| {
            (0..n).all(|y| {
                let xy = self.op(x, y);
                (0..n).all(|z| self.op(x, self.op(y, z)) == self.op(xy, self.op(x, z)))
            })
        })
    }

    pub fn is_latin(&self) -> bool {
        (0..self.n).all(|y| {
            let mut seen = vec![false; self.n];
            (0..self.n).all(|x| !std::mem::replace(&mut seen[self.op(x, y)], true))
        })
    }

    pub fn is_projection(&self) -> bool {
        (0..self.n).all(|x| (0..self.n).all(|y| self.op(x, y) == y))
    }

    pub fn predicates(&self) -> Predicates {
        let idempotent = self.is_idempotent();
        let rack = self.is_rack();
        Predicates {
            idempotent,
            rack,
            quandle: idempotent && rack,
            latin: self.is_latin(),
            projection: self.is_projection(),
        }
    }

    /// `E(Q) = {x : xx = x}`.
    pub fn idempotent_elements(&self) -> Vec<usize> {
        (0..self.n).filter(|&x| self.op(x, x) == x).collect()
    }

    /// `LMlt(Q) = ⟨L_x⟩`.
    pub fn lmlt(&self, limits: &Limits) -> Result<PermGroup> {
        PermGroup::close(self.n, self.left_translations(), limits.max_group_order)
    }

    /// `Dis(Q)`: the normal closure in `LMlt(Q)` of the `L_x L_0⁻¹`. The plain
    /// subgroup they generate is not normal for every left quasigroup.
    pub fn dis(&self, limits: &Limits) -> Result<PermGroup> {
        self.dis_within(&self.lmlt(limits)?, limits)
    }

    pub(crate) fn dis_within(&self, lmlt: &PermGroup, limits: &Limits) -> Result<PermGroup> {
        let l0_inv = self.left_translation(0).inverse();
        let gens = (1..self.n).map(|x| &self.left_translation(x) * &l0_inv);
        crate::perm::normal_closure(lmlt, gens, limits.max_group_order)
    }

    /// Smallest subset containing `seed` closed under `·` and `\`, as a sorted list.
    pub fn subuniverse_generated(&self, seed: &[usize]) -> Result<Vec<usize>> {
        for &s in seed {
            self.check(s)?;
        }
        let mut inside = vec![false; self.n];
        let mut members: Vec<usize> = Vec::new();
        for &s in seed {
            if !std::mem::replace(&mut inside[s], true) {
                members.push(s);
            }
        }
        let mut i = 0;
        while i < members.len() {
            let a = members[i];
            for j in 0..=i {
                let b = members[j];
                for c in [self.op(a, b), self.op(b, a), self.ldiv(a, b), self.ldiv(b, a)] {
                    if !std::mem::replace(&mut inside[c], true) {
                        members.push(c);
                    }
                }
            }
            i += 1;
        }
        members.sort_unstable();
        Ok(members)
    }

    fn close_mask(&self, mut mask: u64) -> u64 {
        loop {
            let mut next = mask;
            let mut a_bits = mask;
            while a_bits != 0 {
                let a = a_bits.trailing_zeros() as usize;
                a_bits &= a_bits - 1;
                let mut b_bits = mask;
                while b_bits != 0 {
                    let b = b_bits.trailing_zeros() as usize;
                    b_bits &= b_bits - 1;
                    next |= 1 << self.op(a, b);
                    next |= 1 << self.ldiv(a, b);
                }
            }
            if next == mask {
                return mask;
            }
            mask = next;
        }
    }

    /// All nonempty subuniverses, as sorted point lists, ordered by bitmask.
    pub fn all_subalgebras(&self) -> Result<Vec<Vec<usize>>> {
        if self.n > 64 {
            return Err(Error::Capacity {
                what: "subalgebra enumeration",
                limit: 64,
            });
        }
        let mut singles: Vec<u64> = Vec::new();
        for x in 0..self.n {
            let m = self.close_mask(1 << x);
            if !singles.contains(&m) {
                singles.push(m);
            }
        }
        for x in 0..self.n {
            for y in x + 1..self.n {
                let m = self.close_mask((1 << x) | (1 << y));
                if !singles.contains(&m) {
                    singles.push(m);
                }
            }
        }
        let mut found: std::collections::BTreeSet<u64> = singles.iter().copied().collect();
        let mut queue: Vec<u64> = singles.clone();
        while let Some(m) = queue.pop() {
            for &s in &singles {
                if m & s == s {
                    continue;
                }
                let j = self.close_mask(m | s);
                if found.insert(j) {
                    queue.push(j);
                }
            }
        }
        Ok(found
            .into_iter()
            .map(|m| (0..self.n).filter(|&x| m >> x & 1 == 1).collect())
            .collect())
    }

    /// The subalgebra on `points` (which must be a subuniverse), relabelled
    /// in increasing order.
    pub fn subalgebra(&self, points: &[usize]) -> Result<LeftQuasigroup> {
        let mut index = vec![usize::MAX; self.n];
        for (i, &p) in points.iter().enumerate() {
            self.check(p)?;
            index[p] = i;
        }
        let rows: Vec<Vec<usize>> = points
            .iter()
            .map(|&x| points.iter().map(|&y| index[self.op(x, y)]).collect())
            .collect();
        if rows.iter().flatten().any(|&v| v == usize::MAX) {
            return Err(Error::MalformedTable("points are not closed under ·".into()));
        }
        LeftQuasigroup::validate(&rows)
    }

    /// `Q/α` with blocks labelled by increasing least element.
    pub fn quotient(&self, alpha: &Partition) -> Result<Quotient> {
        if !crate::congr::is_congruence(self, alpha) {
            return Err(Error::NotACongruence);
        }
        Ok(self.quotient_unchecked(alpha))
    }

    pub(crate) fn quotient_unchecked(&self, alpha: &Partition) -> Quotient {
        let block_of = alpha.block_index();
        let k = alpha.block_count();
        let mut reps = vec![usize::MAX; k];
        for (x, &b) in block_of.iter().enumerate() {
            if reps[b] == usize::MAX {
                reps[b] = x;
            }
        }
        let mut mul = Vec::with_capacity(k * k);
        for &x in &reps {
            for &y in &reps {
                mul.push(block_of[self.op(x, y)] as u8);
            }
        }
        Quotient {
            algebra: LeftQuasigroup::from_raw(k, mul),
            block_of,
        }
    }

    pub fn eval_term(&self, term: &Term, args: &[usize]) -> Result<usize> {
        if args.len() < term.arity() {
            return Err(Error::ArityMismatch {
                arity: term.arity(),
                given: args.len(),
            });
        }
        for &a in args {
            self.check(a)?;
        }
        Ok(term.eval_with(args, &|x, y| self.op(x, y), &|x, y| self.ldiv(x, y)))
    }

    /// Invariant of `x` under isomorphisms, used to prune the bijection search.
    fn signature(&self, x: usize) -> (bool, Vec<usize>, usize, usize) {
        let mut cycles = Vec::new();
        let mut seen = vec![false; self.n];
        for s in 0..self.n {
            let mut len = 0;
            let mut i = s;
            while !seen[i] {
                seen[i] = true;
                i = self.op(x, i);
                len += 1;
            }
            if len > 0 {
                cycles.push(len);
            }
        }
        cycles.sort_unstable();
        let column_hits = (0..self.n).filter(|&y| self.op(y, x) == x).count();
        let same_row = (0..self.n).filter(|&y| self.row(y) == self.row(x)).count();
        (self.op(x, x) == x, cycles, column_hits, same_row)
    }

    /// Exact isomorphism test by backtracking over signature-compatible bijections.
    pub fn is_isomorphic(&self, other: &LeftQuasigroup) -> Result<bool> {
        if self.n != other.n {
            return Ok(false);
        }
        if self.n > 10 {
            return Err(Error::Capacity {
                what: "isomorphism test",
                limit: 10,
            });
        }
        let sa: Vec<_> = (0..self.n).map(|x| self.signature(x)).collect();
        let sb: Vec<_> = (0..other.n).map(|x| other.signature(x)).collect();
        let mut ka = sa.clone();
        let mut kb = sb.clone();
        ka.sort();
        kb.sort();
        if ka != kb {
            return Ok(false);
        }
        let mut map = vec![usize::MAX; self.n];
        let mut used = vec![false; self.n];
        Ok(self.extend_iso(other, &sa, &sb, 0, &mut map, &mut used))
    }

    fn extend_iso(
        &self,
        other: &LeftQuasigroup,
        sa: &[(bool, Vec<usize>, usize, usize)],
        sb: &[(bool, Vec<usize>, usize, usize)],
        x: usize,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
    ) -> bool {
        if x == self.n {
            return true;
        }
        for y in 0..self.n {
            if used[y] || sa[x] != sb[y] {
                continue;
            }
            map[x] = y;
            used[y] = true;
            let consistent = (0..=x).all(|a| {
                (0..=x).all(|b| {
                    let c = self.op(a, b);
                    map[c] == usize::MAX || map[c] == other.op(map[a], map[b])
                })
            }) && (0..=x).all(|a| {
                // an unmapped product cannot land on an already used image
                (0..=x).all(|b| {
                    let target = other.op(map[a], map[b]);
                    let c = self.op(a, b);
                    map[c] != usize::MAX || !map[..=x].contains(&target)
                })
            });
            if consistent && self.extend_iso(other, sa, sb, x + 1, map, used) {
                return true;
            }
            map[x] = usize::MAX;
            used[y] = false;
        }
        false
    }

    /// Relabels points by `perm`: the result has `perm(x)·perm(y) = perm(x·y)`.
    pub fn relabel(&self, perm: &Perm) -> Result<LeftQuasigroup> {
        if perm.degree() != self.n {
            return Err(Error::DegreeMismatch {
                left: self.n,
                right: perm.degree(),
            });
        }
        let inv = perm.inverse();
        LeftQuasigroup::from_fn(self.n, |x, y| perm.apply(self.op(inv.apply(x), inv.apply(y))))
    }

    /// Transposes a raw table. Ragged input yields out-of-range entries,
    /// which validation then rejects.
    pub fn transposed_rows(rows: &[Vec<usize>]) -> Vec<Vec<usize>> {
        let n = rows.len();
        (0..n)
            .map(|x| (0..n).map(|y| rows.get(y).and_then(|r| r.get(x)).copied().unwrap_or(usize::MAX)).collect())
            .collect()
    }
}

pub fn validate(rows: &[Vec<usize>]) -> Result<LeftQuasigroup> {
    LeftQuasigroup::validate(rows)
}

pub fn are_isomorphic(a: &LeftQuasigroup, b: &LeftQuasigroup) -> Result<bool> {
    a.is_isomorphic(b)
}

impl fmt::Debug for LeftQuasigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LeftQuasigroup{:?}", self.rows())
    }
}

impl fmt::Display for LeftQuasigroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|y| self.op(x, y).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn shift2() -> LeftQuasigroup {
        LeftQuasigroup::validate(&[vec![1, 0], vec![1, 0]]).unwrap()
    }

    #[test]
    fn validate_examples() {
        assert!(LeftQuasigroup::validate(&[vec![0, 1], vec![0, 1]]).is_ok());
        assert!(LeftQuasigroup::validate(&[vec![0, 0], vec![1, 1]]).is_err());
        assert!(LeftQuasigroup::validate(&[vec![0, 1], vec![0]]).is_err());
        assert!(LeftQuasigroup::validate(&[vec![0, 2], vec![1, 0]]).is_err());
        let d3 = LeftQuasigroup::dihedral(3);
        assert_eq!(d3.rows(), vec![vec![0, 2, 1], vec![2, 1, 0], vec![1, 0, 2]]);
    }

    #[test]
    fn dis_is_normal_even_when_plain_generation_is_not() {
        let q = LeftQuasigroup::validate(&[vec![1, 3, 2, 0], vec![3, 2, 0, 1], vec![1, 0, 2, 3], vec![2, 3, 1, 0]])
            .unwrap();
        let limits = Limits::default();
        let lmlt = q.lmlt(&limits).unwrap();
        let l0_inv = q.left_translation(0).inverse();
        let plain = PermGroup::close(4, (1..4).map(|x| &q.left_translation(x) * &l0_inv), 1000).unwrap();
        assert!(!crate::perm::is_normal_in(&plain, &lmlt));
        let dis = q.dis(&limits).unwrap();
        assert!(crate::perm::is_normal_in(&dis, &lmlt));
        assert!(crate::perm::is_subgroup(&plain, &dis));
        for x in 0..4 {
            for y in 0..4 {
                assert!(dis.contains(&(&q.left_translation(x) * &q.left_translation(y).inverse())));
            }
        }
    }

    #[test]
    fn op_and_ldiv() {
        assert_eq!(LeftQuasigroup::projection(2).op(0, 1), 1);
        let d3 = LeftQuasigroup::dihedral(3);
        assert_eq!(d3.op(1, 0), 2);
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(d3.ldiv(x, d3.op(x, y)), y);
                assert_eq!(d3.op(x, d3.ldiv(x, y)), y);
            }
        }
        assert!(d3.checked_op(3, 0).is_err());
    }

    #[test]
    fn predicate_examples() {
        let p2 = LeftQuasigroup::projection(2).predicates();
        assert!(p2.idempotent && p2.rack && p2.quandle && !p2.latin && p2.projection);
        let d3 = LeftQuasigroup::dihedral(3).predicates();
        assert!(d3.quandle && d3.latin && !d3.projection);
        let s = shift2().predicates();
        // right translations are constant, so not latin
        assert!(!s.idempotent && !s.latin && s.rack);
    }

    #[test]
    fn idempotent_element_examples() {
        assert_eq!(LeftQuasigroup::projection(3).idempotent_elements(), vec![0, 1, 2]);
        assert!(shift2().idempotent_elements().is_empty());
        assert_eq!(LeftQuasigroup::dihedral(3).idempotent_elements(), vec![0, 1, 2]);
    }

    #[test]
    fn lmlt_and_dis_examples() {
        let l = Limits::default();
        let p = LeftQuasigroup::projection(4);
        assert!(p.lmlt(&l).unwrap().is_trivial() && p.dis(&l).unwrap().is_trivial());
        let d3 = LeftQuasigroup::dihedral(3);
        assert_eq!(d3.lmlt(&l).unwrap().order(), 6);
        let dis = d3.dis(&l).unwrap();
        assert_eq!(dis.order(), 3);
        assert!(dis.contains(&Perm::from_images(&[1, 2, 0]).unwrap()));
        let s = shift2();
        assert_eq!(s.lmlt(&l).unwrap().order(), 2);
        assert!(s.dis(&l).unwrap().is_trivial());
    }

    #[test]
    fn subuniverse_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        assert_eq!(d3.subuniverse_generated(&[0, 1, 2]).unwrap(), vec![0, 1, 2]);
        assert_eq!(d3.subuniverse_generated(&[0]).unwrap(), vec![0]);
        assert_eq!(d3.subuniverse_generated(&[0, 1]).unwrap(), vec![0, 1, 2]);
        let d4 = LeftQuasigroup::dihedral(4);
        assert_eq!(d4.subuniverse_generated(&[0, 2]).unwrap(), vec![0, 2]);
        let subs = d3.all_subalgebras().unwrap();
        assert_eq!(subs, vec![vec![0], vec![1], vec![2], vec![0, 1, 2]]);
        // a projection quandle: every subset is a subuniverse
        assert_eq!(LeftQuasigroup::projection(3).all_subalgebras().unwrap().len(), 7);
    }

    #[test]
    fn quotient_examples() {
        let d4 = LeftQuasigroup::dihedral(4);
        let q = d4.quotient(&Partition::discrete(4)).unwrap();
        assert_eq!(q.algebra, d4);
        let q = d4.quotient(&Partition::total(4)).unwrap();
        assert_eq!(q.algebra.order(), 1);
        let alpha = Partition::parse(4, "0,2|1,3").unwrap();
        let q = d4.quotient(&alpha).unwrap();
        assert_eq!(q.algebra, LeftQuasigroup::projection(2));
        assert_eq!(q.block_of, vec![0, 1, 0, 1]);
        let bad = Partition::parse(4, "0,1|2,3").unwrap();
        assert_eq!(d4.quotient(&bad).unwrap_err(), Error::NotACongruence);
    }

    #[test]
    fn term_evaluation() {
        let d3 = LeftQuasigroup::dihedral(3);
        let t = Term::ldiv(Term::var(0), Term::mul(Term::var(0), Term::var(1)));
        for x in 0..3 {
            for y in 0..3 {
                assert_eq!(d3.eval_term(&t, &[x, y]).unwrap(), y);
            }
        }
        assert_eq!(d3.eval_term(&Term::var(0), &[2]).unwrap(), 2);
        assert_eq!(d3.eval_term(&Term::mul(Term::var(0), Term::var(1)), &[1, 0]).unwrap(), 2);
        assert!(d3.eval_term(&t, &[1]).is_err());
    }

    #[test]
    fn isomorphism_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        assert!(d3.is_isomorphic(&d3).unwrap());
        assert!(!LeftQuasigroup::projection(2).is_isomorphic(&shift2()).unwrap());
        let cyc = Perm::from_images(&[1, 2, 0]).unwrap();
        let relabelled = d3.relabel(&cyc).unwrap();
        assert!(d3.is_isomorphic(&relabelled).unwrap());
        assert!(LeftQuasigroup::projection(11).is_isomorphic(&LeftQuasigroup::projection(11)).is_err());
    }

    fn arb_lq(n: usize) -> impl Strategy<Value = LeftQuasigroup> {
        let row = Just((0..n).collect::<Vec<_>>()).prop_shuffle();
        proptest::collection::vec(row, n).prop_map(|rows| LeftQuasigroup::validate(&rows).unwrap())
    }

    fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
        Just((0..n).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Perm::from_images(&v).unwrap())
    }

    proptest! {
        #[test]
        fn division_axioms(q in arb_lq(5)) {
            for x in 0..5 {
                for y in 0..5 {
                    prop_assert_eq!(q.ldiv(x, q.op(x, y)), y);
                    prop_assert_eq!(q.op(x, q.ldiv(x, y)), y);
                }
            }
        }

        #[test]
        fn rack_iff_translations_are_endomorphisms(q in arb_lq(3)) {
            let endo = (0..3).all(|x| (0..3).all(|y| (0..3).all(|z| {
                q.op(x, q.op(y, z)) == q.op(q.op(x, y), q.op(x, z))
            })));
            prop_assert_eq!(q.is_rack(), endo);
        }

        #[test]
        fn relabelling_preserves_isomorphism_class(q in arb_lq(4), p in arb_perm(4)) {
            let r = q.relabel(&p).unwrap();
            prop_assert!(q.is_isomorphic(&r).unwrap());
            prop_assert_eq!(q.predicates(), r.predicates());
        }
    }
}

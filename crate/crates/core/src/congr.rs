//! Congruences of a left quasigroup: testing, generation, the full lattice
//! and the Cayley kernel.

use std::collections::{HashSet, VecDeque};

use petgraph::unionfind::UnionFind;

use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lquasi::LeftQuasigroup;
use crate::partition::Partition;

/// Compatibility with `·` and `\` in both arguments. Checking the spanning
/// pairs against all left and right translations is enough.
pub fn is_congruence(q: &LeftQuasigroup, alpha: &Partition) -> bool {
    let n = q.order();
    if alpha.len() != n {
        return false;
    }
    alpha.spanning_pairs().all(|(p, r)| {
        (0..n).all(|c| {
            alpha.related(q.op(c, p), q.op(c, r))
                && alpha.related(q.op(p, c), q.op(r, c))
                && alpha.related(q.ldiv(c, p), q.ldiv(c, r))
                && alpha.related(q.ldiv(p, c), q.ldiv(r, c))
        })
    })
}

/// `Cg(pairs)`: union-find fixpoint over the four translation families.
pub fn congruence_generated(q: &LeftQuasigroup, pairs: impl IntoIterator<Item = (usize, usize)>) -> Partition {
    let n = q.order();
    let mut uf = UnionFind::<usize>::new(n);
    let mut queue: VecDeque<(usize, usize)> = VecDeque::new();
    for (a, b) in pairs {
        if uf.union(a, b) {
            queue.push_back((a, b));
        }
    }
    while let Some((p, r)) = queue.pop_front() {
        for c in 0..n {
            for (a, b) in [
                (q.op(c, p), q.op(c, r)),
                (q.op(p, c), q.op(r, c)),
                (q.ldiv(c, p), q.ldiv(c, r)),
                (q.ldiv(p, c), q.ldiv(r, c)),
            ] {
                if uf.union(a, b) {
                    queue.push_back((a, b));
                }
            }
        }
    }
    Partition::from_union_find(uf)
}

/// The congruence join `α ∨ β`.
pub fn join_c(q: &LeftQuasigroup, alpha: &Partition, beta: &Partition) -> Partition {
    congruence_generated(q, alpha.spanning_pairs().chain(beta.spanning_pairs()))
}

pub fn meet(alpha: &Partition, beta: &Partition) -> Partition {
    alpha.meet(beta)
}

pub fn leq(alpha: &Partition, beta: &Partition) -> bool {
    alpha.leq(beta)
}

/// `Con(Q)`, sorted by number of blocks descending and then by labels, so
/// `0` comes first and `1` last.
pub fn all_congruences(q: &LeftQuasigroup, limits: &Limits) -> Result<Vec<Partition>> {
    let n = q.order();
    let mut principal: Vec<Partition> = Vec::new();
    let mut seen: HashSet<Partition> = HashSet::new();
    for a in 0..n {
        for b in a + 1..n {
            let c = congruence_generated(q, [(a, b)]);
            if seen.insert(c.clone()) {
                principal.push(c);
            }
        }
    }
    let zero = Partition::discrete(n);
    let mut found: HashSet<Partition> = HashSet::new();
    found.insert(zero.clone());
    let mut queue: VecDeque<Partition> = VecDeque::from([zero]);
    while let Some(k) = queue.pop_front() {
        for p in &principal {
            if p.leq(&k) {
                continue;
            }
            let j = join_c(q, &k, p);
            if !found.contains(&j) {
                if found.len() >= limits.max_congruences {
                    return Err(Error::Capacity {
                        what: "congruence enumeration",
                        limit: limits.max_congruences,
                    });
                }
                found.insert(j.clone());
                queue.push_back(j);
            }
        }
    }
    let mut all: Vec<Partition> = found.into_iter().collect();
    all.sort_by(|a, b| b.block_count().cmp(&a.block_count()).then_with(|| a.cmp(b)));
    Ok(all)
}

/// `β/α` as a partition of the blocks of `α` (numbered by least element).
pub fn quotient_congruence(alpha: &Partition, beta: &Partition) -> Result<Partition> {
    if !alpha.leq(beta) {
        return Err(Error::ContainmentViolated("quotient β/α needs α ≤ β"));
    }
    Ok(beta.project(&alpha.block_index(), alpha.block_count()))
}

/// Pulls a partition of the blocks of `α` back to `Q`.
pub fn lift_congruence(alpha: &Partition, on_blocks: &Partition) -> Result<Partition> {
    if on_blocks.len() != alpha.block_count() {
        return Err(Error::DegreeMismatch {
            left: alpha.block_count(),
            right: on_blocks.len(),
        });
    }
    let block_of = alpha.block_index();
    let labels: Vec<usize> = block_of.iter().map(|&b| on_blocks.label(b)).collect();
    Ok(Partition::from_labels(&labels))
}

/// `λ_Q`: `x ~ y` iff `L_x = L_y`.
pub fn cayley_kernel(q: &LeftQuasigroup) -> Partition {
    let rows: Vec<&[u8]> = (0..q.order()).map(|x| q.row(x)).collect();
    Partition::from_labels(&rows)
}

pub fn is_cayley(q: &LeftQuasigroup) -> bool {
    is_congruence(q, &cayley_kernel(q))
}

pub fn is_faithful(q: &LeftQuasigroup) -> bool {
    cayley_kernel(q).is_discrete()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shift2() -> LeftQuasigroup {
        LeftQuasigroup::validate(&[vec![1, 0], vec![1, 0]]).unwrap()
    }

    /// Every equivalence on `n` points, via restricted growth strings.
    fn all_equivalences(n: usize) -> Vec<Partition> {
        fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
            if cur.len() == n {
                out.push(Partition::from_labels(cur));
                return;
            }
            let max = cur.iter().copied().max().map_or(0, |m| m + 1);
            for l in 0..=max {
                cur.push(l);
                rec(n, cur, out);
                cur.pop();
            }
        }
        let mut out = Vec::new();
        rec(n, &mut Vec::new(), &mut out);
        out
    }

    /// Pairwise check straight from the definition.
    fn congruence_by_definition(q: &LeftQuasigroup, a: &Partition) -> bool {
        let n = q.order();
        (0..n).all(|x| {
            (0..n).all(|y| {
                (0..n).all(|z| {
                    (0..n).all(|t| {
                        !(a.related(x, z) && a.related(y, t))
                            || (a.related(q.op(x, y), q.op(z, t)) && a.related(q.ldiv(x, y), q.ldiv(z, t)))
                    })
                })
            })
        })
    }

    #[test]
    fn is_congruence_examples() {
        let d4 = LeftQuasigroup::dihedral(4);
        assert!(is_congruence(&d4, &Partition::discrete(4)));
        assert!(is_congruence(&d4, &Partition::total(4)));
        assert!(is_congruence(&d4, &Partition::parse(4, "0,2|1,3").unwrap()));
        assert!(!is_congruence(&d4, &Partition::parse(4, "0,1|2,3").unwrap()));
    }

    #[test]
    fn generation_examples() {
        let d3 = LeftQuasigroup::dihedral(3);
        assert!(congruence_generated(&d3, []).is_discrete());
        assert!(congruence_generated(&d3, [(0, 1)]).is_total());
        let p = LeftQuasigroup::projection(4);
        assert_eq!(congruence_generated(&p, [(1, 3)]).to_string(), "0|1,3|2");
    }

    #[test]
    fn lattice_examples() {
        let one = LeftQuasigroup::projection(1);
        assert_eq!(all_congruences(&one, &Limits::default()).unwrap(), vec![Partition::discrete(1)]);
        let d3 = LeftQuasigroup::dihedral(3);
        assert_eq!(
            all_congruences(&d3, &Limits::default()).unwrap(),
            vec![Partition::discrete(3), Partition::total(3)]
        );
        for n in 1..=4 {
            let p = LeftQuasigroup::projection(n);
            let cons = all_congruences(&p, &Limits::default()).unwrap();
            assert_eq!(cons.len(), all_equivalences(n).len());
        }
        let tight = Limits { max_congruences: 3, ..Limits::default() };
        assert!(all_congruences(&LeftQuasigroup::projection(4), &tight).unwrap_err().is_capacity());
    }

    #[test]
    fn join_meet_examples() {
        let d4 = LeftQuasigroup::dihedral(4);
        let a = congruence_generated(&d4, [(0, 2)]);
        let b = congruence_generated(&d4, [(1, 3)]);
        assert_eq!(join_c(&d4, &a, &b).to_string(), "0,2|1,3");
        assert_eq!(join_c(&d4, &a, &Partition::discrete(4)), a);
        assert_eq!(meet(&a, &Partition::total(4)), a);
    }

    #[test]
    fn quotient_and_lift() {
        let d4 = LeftQuasigroup::dihedral(4);
        let alpha = Partition::parse(4, "0,2|1,3").unwrap();
        assert!(quotient_congruence(&alpha, &alpha).unwrap().is_discrete());
        let beta = Partition::total(4);
        assert!(quotient_congruence(&alpha, &beta).unwrap().is_total());
        assert_eq!(quotient_congruence(&Partition::discrete(4), &alpha).unwrap(), alpha);
        assert!(quotient_congruence(&beta, &alpha).is_err());
        for b in all_congruences(&d4, &Limits::default()).unwrap() {
            if alpha.leq(&b) {
                let down = quotient_congruence(&alpha, &b).unwrap();
                assert_eq!(lift_congruence(&alpha, &down).unwrap(), b);
            }
        }
    }

    #[test]
    fn cayley_kernel_examples() {
        let p = LeftQuasigroup::projection(3);
        assert!(cayley_kernel(&p).is_total() && is_cayley(&p) && !is_faithful(&p));
        let d3 = LeftQuasigroup::dihedral(3);
        assert!(cayley_kernel(&d3).is_discrete() && is_faithful(&d3));
        assert!(cayley_kernel(&shift2()).is_total());
    }

    #[test]
    fn exhaustive_order_three_agrees_with_definitions() {
        let perms: Vec<Vec<usize>> = vec![
            vec![0, 1, 2], vec![0, 2, 1], vec![1, 0, 2], vec![1, 2, 0], vec![2, 0, 1], vec![2, 1, 0],
        ];
        let equivs = all_equivalences(3);
        for a in &perms {
            for b in &perms {
                for c in &perms {
                    let q = LeftQuasigroup::validate(&[a.clone(), b.clone(), c.clone()]).unwrap();
                    let cons = all_congruences(&q, &Limits::default()).unwrap();
                    let by_def: Vec<&Partition> = equivs.iter().filter(|e| congruence_by_definition(&q, e)).collect();
                    assert_eq!(cons.len(), by_def.len());
                    for e in &equivs {
                        assert_eq!(is_congruence(&q, e), congruence_by_definition(&q, e));
                    }
                    // Cg(pairs) is the meet of the congruences above the pairs
                    for e in &equivs {
                        let generated = congruence_generated(&q, e.spanning_pairs());
                        let meet_above = cons
                            .iter()
                            .filter(|c| e.leq(c))
                            .fold(Partition::total(3), |acc, c| acc.meet(c));
                        assert_eq!(generated, meet_above);
                    }
                    // closed under meet and join, contains both bounds
                    for x in &cons {
                        for y in &cons {
                            assert!(cons.contains(&x.meet(y)));
                            assert!(cons.contains(&join_c(&q, x, y)));
                        }
                    }
                    assert_eq!(cons.first(), Some(&Partition::discrete(3)));
                    assert_eq!(cons.last(), Some(&Partition::total(3)));
                    if q.is_rack() {
                        assert!(is_cayley(&q));
                    }
                }
            }
        }
    }
}

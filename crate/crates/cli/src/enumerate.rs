//! Enumeration of small left quasigroups.
//!
//! Unrestricted sweeps walk all `(n!)^n` tables, one permutation per row.
//! Rack-filtered sweeps assign rows one at a time and propagate
//! `L_{x·y} = L_x L_y L_x⁻¹` and `L_{x\y} = L_x⁻¹ L_y L_x`, so most rows are
//! forced instead of guessed.

use std::collections::HashSet;
use std::ops::ControlFlow;

use itertools::Itertools;
use lquasi::{displ, LeftQuasigroup};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

/// Upper bound on the number of candidate tables an unrestricted sweep may visit.
pub const MAX_TABLES: u128 = 100_000_000;

/// Largest order accepted by the rack search.
pub const MAX_RACK_ORDER: usize = 8;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Filter {
    pub idempotent: bool,
    pub rack: bool,
    pub latin: bool,
    pub connected: bool,
}

impl Filter {
    pub const NONE: Filter = Filter {
        idempotent: false,
        rack: false,
        latin: false,
        connected: false,
    };

    pub fn quandle() -> Self {
        Filter {
            idempotent: true,
            rack: true,
            ..Filter::NONE
        }
    }

    pub fn accepts(&self, q: &LeftQuasigroup) -> bool {
        (!self.idempotent || q.is_idempotent())
            && (!self.rack || q.is_rack())
            && (!self.latin || q.is_latin())
            && (!self.connected || displ::is_connected(q))
    }
}

/// `(n!)^n`.
pub fn raw_count(n: usize) -> u128 {
    let fact: u128 = (1..=n as u128).product();
    fact.pow(n as u32)
}

/// All permutations of `0..n` in lexicographic order.
pub(crate) fn all_perms(n: usize) -> Vec<Vec<u8>> {
    (0..n as u8).permutations(n).collect()
}

/// Sorted cycle lengths, fixed points included.
pub(crate) fn cycle_type(p: &[u8]) -> Vec<usize> {
    let mut seen = vec![false; p.len()];
    let mut out = Vec::new();
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut i = start;
        while !seen[i] {
            seen[i] = true;
            i = p[i] as usize;
            len += 1;
        }
        out.push(len);
    }
    out.sort_unstable();
    out
}

/// A partial table whose assigned rows are closed under the rack
/// propagation rules.
#[derive(Clone)]
pub(crate) struct PartialRack {
    n: usize,
    rows: Vec<u8>,
    inv: Vec<u8>,
    set: Vec<bool>,
    idempotent: bool,
    cycle_type: Option<Vec<usize>>,
}

impl PartialRack {
    pub(crate) fn new(n: usize, idempotent: bool, cycle_type: Option<Vec<usize>>) -> Self {
        PartialRack {
            n,
            rows: vec![0; n * n],
            inv: vec![0; n * n],
            set: vec![false; n],
            idempotent,
            cycle_type,
        }
    }

    pub(crate) fn first_unset(&self) -> Option<usize> {
        self.set.iter().position(|s| !s)
    }

    pub(crate) fn row(&self, x: usize) -> &[u8] {
        &self.rows[x * self.n..(x + 1) * self.n]
    }

    pub(crate) fn admits(&self, x: usize, row: &[u8]) -> bool {
        (!self.idempotent || row[x] as usize == x)
            && self.cycle_type.as_ref().is_none_or(|ct| &cycle_type(row) == ct)
    }

    pub(crate) fn to_algebra(&self) -> LeftQuasigroup {
        LeftQuasigroup::from_fn(self.n, |x, y| self.rows[x * self.n + y] as usize)
            .expect("complete rows are permutations")
    }

    fn place(&mut self, z: usize, row: &[u8], queue: &mut Vec<usize>) -> bool {
        let n = self.n;
        if self.set[z] {
            return self.row(z) == row;
        }
        if !self.admits(z, row) {
            return false;
        }
        self.rows[z * n..(z + 1) * n].copy_from_slice(row);
        for (i, &v) in row.iter().enumerate() {
            self.inv[z * n + v as usize] = i as u8;
        }
        self.set[z] = true;
        queue.push(z);
        true
    }

    /// Sets row `x` and everything it forces. `false` on a contradiction,
    /// in which case the state is garbage.
    pub(crate) fn assign(&mut self, x: usize, row: &[u8]) -> bool {
        let n = self.n;
        let mut queue = Vec::new();
        if !self.place(x, row, &mut queue) {
            return false;
        }
        let mut conj = vec![0u8; n];
        while let Some(x) = queue.pop() {
            for y in 0..n {
                if !self.set[y] {
                    continue;
                }
                for (a, b) in [(x, y), (y, x)] {
                    let (la, lia, lb) = (a * n, a * n, b * n);
                    // L_{a·b} = L_a L_b L_a⁻¹
                    for i in 0..n {
                        let j = self.inv[lia + i] as usize;
                        conj[i] = self.rows[la + self.rows[lb + j] as usize];
                    }
                    let z = self.rows[la + b] as usize;
                    if !self.place(z, &conj, &mut queue) {
                        return false;
                    }
                    // L_{a\b} = L_a⁻¹ L_b L_a
                    for i in 0..n {
                        let j = self.rows[la + i] as usize;
                        conj[i] = self.inv[lia + self.rows[lb + j] as usize];
                    }
                    let z = self.inv[lia + b] as usize;
                    if !self.place(z, &conj, &mut queue) {
                        return false;
                    }
                    if a == b {
                        break;
                    }
                }
            }
        }
        true
    }
}

/// Depth-first search over completions of `state`. Counts one node per
/// attempted row; `Err` when `budget` runs out first.
pub(crate) fn complete_racks(
    state: PartialRack,
    perms: &[Vec<u8>],
    nodes: &mut u64,
    budget: Option<u64>,
    visit: &mut dyn FnMut(&PartialRack) -> ControlFlow<()>,
) -> Result<ControlFlow<()>, u64> {
    let Some(x) = state.first_unset() else {
        return Ok(visit(&state));
    };
    for p in perms {
        if !state.admits(x, p) {
            continue;
        }
        *nodes += 1;
        if budget.is_some_and(|b| *nodes > b) {
            return Err(*nodes - 1);
        }
        let mut next = state.clone();
        if next.assign(x, p) && complete_racks(next, perms, nodes, budget, visit)?.is_break() {
            return Ok(ControlFlow::Break(()));
        }
    }
    Ok(ControlFlow::Continue(()))
}

/// Calls `visit` on every table of order `n` passing `filter`, in a fixed order.
pub fn for_each(
    n: usize,
    filter: Filter,
    mut visit: impl FnMut(LeftQuasigroup) -> ControlFlow<()>,
) -> Result<()> {
    if n == 0 || n > 255 {
        return Err(CliError::Input(format!("order {n} is outside 1..=255")));
    }
    if filter.rack {
        if n > MAX_RACK_ORDER {
            return Err(CliError::Stage {
                stage: "enumerate",
                source: lquasi::Error::Capacity {
                    what: "rack enumeration order",
                    limit: MAX_RACK_ORDER,
                },
            });
        }
        let perms = all_perms(n);
        let mut nodes = 0;
        let mut cb = |s: &PartialRack| {
            let q = s.to_algebra();
            if filter.accepts(&q) {
                visit(q)
            } else {
                ControlFlow::Continue(())
            }
        };
        let _ = complete_racks(PartialRack::new(n, filter.idempotent, None), &perms, &mut nodes, None, &mut cb)
            .expect("no budget");
        return Ok(());
    }
    let per_row: u128 = if filter.idempotent {
        (1..n as u128).product()
    } else {
        (1..=n as u128).product()
    };
    if per_row.checked_pow(n as u32).is_none_or(|total| total > MAX_TABLES) {
        return Err(CliError::Stage {
            stage: "enumerate",
            source: lquasi::Error::Capacity {
                what: "tables in an unrestricted sweep",
                limit: MAX_TABLES as usize,
            },
        });
    }
    let perms = all_perms(n);
    let choices: Vec<Vec<&Vec<u8>>> = (0..n)
        .map(|x| perms.iter().filter(|p| !filter.idempotent || p[x] as usize == x).collect())
        .collect();
    let mut pick = vec![0usize; n];
    loop {
        let q = LeftQuasigroup::from_fn(n, |x, y| choices[x][pick[x]][y] as usize).expect("rows are permutations");
        if filter.accepts(&q) && visit(q).is_break() {
            return Ok(());
        }
        let mut x = n;
        loop {
            if x == 0 {
                return Ok(());
            }
            x -= 1;
            pick[x] += 1;
            if pick[x] < choices[x].len() {
                break;
            }
            pick[x] = 0;
        }
    }
}

/// The lexicographically least relabeled table; equal exactly for
/// isomorphic structures.
pub fn canonical_form(q: &LeftQuasigroup) -> Vec<u8> {
    let n = q.order();
    let mut best: Option<Vec<u8>> = None;
    let mut table = vec![0u8; n * n];
    for p in (0..n).permutations(n) {
        for x in 0..n {
            for y in 0..n {
                table[p[x] * n + p[y]] = p[q.op(x, y)] as u8;
            }
        }
        if best.as_ref().is_none_or(|b| table < *b) {
            best = Some(table.clone());
        }
    }
    best.unwrap_or_default()
}

/// Every structure passing `filter`; with `isomorph_reject` only the first
/// member of each isomorphism class, in enumeration order.
pub fn enumerate(n: usize, filter: Filter, isomorph_reject: bool) -> Result<Vec<LeftQuasigroup>> {
    let mut out = Vec::new();
    let mut seen = HashSet::new();
    for_each(n, filter, |q| {
        if !isomorph_reject || seen.insert(canonical_form(&q)) {
            out.push(q);
        }
        ControlFlow::Continue(())
    })?;
    Ok(out)
}

/// Quandles of order `1..=max_order`, one per isomorphism class.
pub fn quandles_up_to(max_order: usize) -> Result<Vec<LeftQuasigroup>> {
    let mut out = Vec::new();
    for n in 1..=max_order {
        out.extend(enumerate(n, Filter::quandle(), true)?);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn count(n: usize, filter: Filter, iso: bool) -> usize {
        enumerate(n, filter, iso).unwrap().len()
    }

    #[test]
    fn raw_counts() {
        assert_eq!(count(1, Filter::NONE, false), 1);
        assert_eq!(count(2, Filter::NONE, false), 4);
        assert_eq!(count(3, Filter::NONE, false), 216);
        assert_eq!(raw_count(3), 216);
    }

    #[test]
    fn idempotent_counts() {
        let f = Filter {
            idempotent: true,
            ..Filter::NONE
        };
        for n in 1..=4 {
            let expected: usize = (1..n).product::<usize>().pow(n as u32);
            assert_eq!(count(n, f, false), expected);
        }
    }

    #[test]
    fn rack_search_matches_brute_force() {
        for n in 1..=4 {
            for idempotent in [false, true] {
                let base = Filter {
                    idempotent,
                    ..Filter::NONE
                };
                let brute: Vec<_> = enumerate(n, base, false).unwrap().into_iter().filter(|q| q.is_rack()).collect();
                let fast = enumerate(n, Filter { rack: true, ..base }, false).unwrap();
                let a: HashSet<_> = brute.iter().map(|q| q.rows()).collect();
                let b: HashSet<_> = fast.iter().map(|q| q.rows()).collect();
                assert_eq!(a, b, "order {n}, idempotent {idempotent}");
                assert_eq!(fast.len(), b.len(), "duplicates at order {n}");
            }
        }
    }

    #[test]
    fn isomorphism_class_counts() {
        let quandles: Vec<usize> = (1..=5).map(|n| count(n, Filter::quandle(), true)).collect();
        assert_eq!(quandles, vec![1, 1, 3, 7, 22]);
        let rack = Filter {
            rack: true,
            ..Filter::NONE
        };
        let racks: Vec<usize> = (1..=4).map(|n| count(n, rack, true)).collect();
        assert_eq!(racks, vec![1, 2, 6, 19]);
        let connected = Filter {
            connected: true,
            ..Filter::quandle()
        };
        let conn: Vec<usize> = (1..=5).map(|n| count(n, connected, true)).collect();
        assert_eq!(conn, vec![1, 0, 1, 1, 3]);
    }

    #[test]
    fn canonical_form_detects_isomorphism() {
        let qs = enumerate(3, Filter::NONE, false).unwrap();
        for a in qs.iter().step_by(7) {
            for b in qs.iter().step_by(11) {
                assert_eq!(canonical_form(a) == canonical_form(b), a.is_isomorphic(b).unwrap());
            }
        }
    }

    #[test]
    fn oversized_sweeps_are_capacity_errors() {
        assert!(enumerate(5, Filter::NONE, false).unwrap_err().is_capacity());
        assert!(enumerate(9, Filter::quandle(), false).unwrap_err().is_capacity());
    }
}

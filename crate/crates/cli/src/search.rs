//! Search for a quandle with CDOs that is not sharp.
//!
//! Only connected quandles with a nontrivial Cayley kernel are visited.
//! CDOs forces `Dis(Q)` to be transitive, so all left translations are
//! conjugate and share one cycle type. After relabeling, `L_0` is the
//! standard representative of that type (fixed points first, then cycles
//! on consecutive points by increasing length) and `L_1 = L_0`.

use std::ops::ControlFlow;

use lquasi::displ::{self, Displacement, Lattices};
use lquasi::{LeftQuasigroup, Limits};
use serde::{Deserialize, Serialize};

use crate::enumerate::{all_perms, complete_racks, cycle_type, PartialRack, MAX_RACK_ORDER};
use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SearchStatus {
    Found,
    NotFound,
    BudgetExhausted,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchReport {
    pub order: usize,
    pub budget: u64,
    pub status: SearchStatus,
    /// Row assignments tried.
    pub nodes: u64,
    /// Complete connected quandles whose lattices were computed.
    pub candidates: u64,
    pub witness: Option<Vec<Vec<usize>>>,
}

/// Cycle types with at least two fixed points, excluding the identity.
fn cycle_types(n: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = all_perms(n).iter().map(|p| cycle_type(p)).collect();
    out.sort();
    out.dedup();
    out.retain(|ct| ct.iter().filter(|&&l| l == 1).count() >= 2 && ct.iter().any(|&l| l > 1));
    out
}

fn representative(n: usize, ct: &[usize]) -> Vec<u8> {
    let mut p = Vec::with_capacity(n);
    let mut start = 0;
    for &len in ct {
        for i in 0..len {
            p.push((start + (i + 1) % len) as u8);
        }
        start += len;
    }
    p
}

/// `Ok(true)` when `q` has CDOs and is not sharp.
pub fn is_target(q: &LeftQuasigroup, limits: &Limits) -> lquasi::Result<bool> {
    let d = Displacement::new(q, limits)?;
    let lat = Lattices::compute(&d)?;
    Ok(!lat.sharp() && lat.cdos(&d)?)
}

/// Depth-first search with a node budget. Running out of budget is
/// reported in the status, not as an error.
pub fn search_cdos_not_cdsg(order: usize, budget: u64, limits: &Limits) -> Result<SearchReport> {
    if order == 0 || order > MAX_RACK_ORDER {
        return Err(CliError::Input(format!("search order must be in 1..={MAX_RACK_ORDER}")));
    }
    let perms = all_perms(order);
    let mut nodes = 0u64;
    let mut candidates = 0u64;
    let mut witness = None;
    let mut failure = None;
    let report = |status, nodes, candidates, witness| SearchReport {
        order,
        budget,
        status,
        nodes,
        candidates,
        witness,
    };
    if budget == 0 {
        return Ok(report(SearchStatus::BudgetExhausted, 0, 0, None));
    }
    for ct in cycle_types(order) {
        let rep = representative(order, &ct);
        let mut state = PartialRack::new(order, true, Some(ct));
        if !(state.assign(0, &rep) && state.assign(1, &rep)) {
            continue;
        }
        let mut visit = |s: &PartialRack| {
            let q = s.to_algebra();
            if !displ::is_connected(&q) {
                return ControlFlow::Continue(());
            }
            candidates += 1;
            match is_target(&q, limits) {
                Ok(true) => {
                    witness = Some(q.rows());
                    ControlFlow::Break(())
                }
                Ok(false) => ControlFlow::Continue(()),
                Err(e) => {
                    failure = Some(e);
                    ControlFlow::Break(())
                }
            }
        };
        let flow = complete_racks(state, &perms, &mut nodes, Some(budget), &mut visit);
        if let Some(e) = failure.take() {
            return Err(CliError::Stage { stage: "search", source: e });
        }
        match flow {
            Err(used) => return Ok(report(SearchStatus::BudgetExhausted, used, candidates, None)),
            Ok(ControlFlow::Break(())) => return Ok(report(SearchStatus::Found, nodes, candidates, witness)),
            Ok(ControlFlow::Continue(())) => {}
        }
    }
    Ok(report(SearchStatus::NotFound, nodes, candidates, None))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn representatives_have_their_type() {
        for ct in cycle_types(6) {
            let rep = representative(6, &ct);
            assert_eq!(cycle_type(&rep), ct);
            assert_eq!((rep[0], rep[1]), (0, 1));
        }
    }

    #[test]
    fn zero_budget_is_exhausted() {
        let r = search_cdos_not_cdsg(8, 0, &Limits::default()).unwrap();
        assert_eq!(r.status, SearchStatus::BudgetExhausted);
        let r = search_cdos_not_cdsg(6, 3, &Limits::default()).unwrap();
        assert_eq!(r.status, SearchStatus::BudgetExhausted);
        assert_eq!(r.nodes, 3);
    }
}

//! Per-structure reports.
//!
//! JSON schema (all keys always present):
//!
//! ```text
//! {
//!   "name": string | null,
//!   "order": n,
//!   "table": [[x·y for y] for x],
//!   "predicates": {"idempotent","rack","quandle","latin","projection": bool},
//!   "simple": bool,                      Con(Q) = {0_Q, 1_Q} with n ≥ 2
//!   "cayley_kernel_total": bool,         λ_Q = 1_Q
//!   "galois": {
//!     "order", "lmlt_order", "dis_order": int,
//!     "congruences": [partition],        each partition is a list of blocks
//!     "admissibles": [{"order": int, "generators": [[image]]}],
//!     "dis_low", "dis_high": [index into admissibles, one per congruence],
//!     "orb", "cay": [partition, one per admissible],
//!     "cayley_kernel": partition,
//!     "flags": {"cdos","cdsg","sharp","faithful","cayley","latin",
//!               "connected","connected_by_dis","superconnected","semiregular": bool}
//!   },
//!   "center": partition,
//!   "nilpotency": {"series": [partition], "nilpotent": bool},
//!   "nilpotency_class": int | null
//! }
//! ```

use std::fmt::Write as _;

use lquasi::commut::{self, NilpotencySeries};
use lquasi::displ::{self, GaloisReport};
use lquasi::{LeftQuasigroup, Limits, Partition, Predicates};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub name: Option<String>,
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub predicates: Predicates,
    pub simple: bool,
    pub cayley_kernel_total: bool,
    pub galois: GaloisReport,
    pub center: Partition,
    pub nilpotency: NilpotencySeries,
    pub nilpotency_class: Option<usize>,
}

pub fn build(q: &LeftQuasigroup, name: Option<&str>, limits: &Limits) -> Result<Report> {
    let galois = displ::full_report(q, limits).map_err(CliError::stage("galois report"))?;
    let center = commut::center(q, limits).map_err(CliError::stage("center"))?;
    let nilpotency = commut::nilpotency_series(q, limits).map_err(CliError::stage("nilpotency series"))?;
    Ok(Report {
        name: name.map(str::to_string),
        order: q.order(),
        table: q.rows(),
        predicates: q.predicates(),
        simple: q.order() >= 2 && galois.congruences.len() == 2,
        cayley_kernel_total: galois.cayley_kernel.is_total(),
        nilpotency_class: nilpotency.class(),
        galois,
        center,
        nilpotency,
    })
}

pub fn to_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn from_json(text: &str) -> serde_json::Result<Report> {
    serde_json::from_str(text)
}

fn list(parts: &[Partition]) -> String {
    parts.iter().map(Partition::to_string).collect::<Vec<_>>().join(", ")
}

fn flag(out: &mut String, name: &str, value: bool) {
    let _ = writeln!(out, "  {name:<17}{value}");
}

pub fn render_galois(out: &mut String, g: &GaloisReport) {
    let _ = writeln!(out, "|LMlt| = {}, |Dis| = {}", g.lmlt_order, g.dis_order);
    let _ = writeln!(out, "Con(Q) ({}): {}", g.congruences.len(), list(&g.congruences));
    let orders: Vec<String> = g.admissibles.iter().map(|n| n.order.to_string()).collect();
    let _ = writeln!(out, "Norm'(Q) ({}): orders {}", g.admissibles.len(), orders.join(", "));
    let _ = writeln!(out, "lambda_Q: {}", g.cayley_kernel);
    for (i, alpha) in g.congruences.iter().enumerate() {
        let (low, high) = (&g.admissibles[g.dis_low[i]], &g.admissibles[g.dis_high[i]]);
        let _ = writeln!(out, "  {alpha}: |Dis_a| = {}, |Dis^a| = {}", low.order, high.order);
    }
    for (i, n) in g.admissibles.iter().enumerate() {
        let _ = writeln!(out, "  N#{i} (order {}): O_N = {}, c_N = {}", n.order, g.orb[i], g.cay[i]);
    }
    let f = &g.flags;
    out.push_str("flags:\n");
    flag(out, "cdos", f.cdos);
    flag(out, "cdsg", f.cdsg);
    flag(out, "sharp", f.sharp);
    flag(out, "faithful", f.faithful);
    flag(out, "cayley", f.cayley);
    flag(out, "latin", f.latin);
    flag(out, "connected", f.connected);
    flag(out, "connected_by_dis", f.connected_by_dis);
    flag(out, "superconnected", f.superconnected);
    flag(out, "semiregular", f.semiregular);
}

pub fn render_human(r: &Report) -> String {
    let mut out = String::new();
    if let Some(name) = &r.name {
        let _ = writeln!(out, "{name}");
    }
    let _ = writeln!(out, "order {}", r.order);
    for row in &r.table {
        let cells: Vec<String> = row.iter().map(usize::to_string).collect();
        let _ = writeln!(out, "  {}", cells.join(" "));
    }
    let p = &r.predicates;
    let _ = writeln!(
        out,
        "idempotent={} rack={} quandle={} latin={} projection={}",
        p.idempotent, p.rack, p.quandle, p.latin, p.projection
    );
    if r.simple {
        out.push_str("simple\n");
    }
    if r.cayley_kernel_total {
        out.push_str("lambda_Q = 1_Q\n");
    }
    render_galois(&mut out, &r.galois);
    let _ = writeln!(out, "center: {}", r.center);
    let _ = writeln!(out, "upper central series: {}", list(&r.nilpotency.series));
    match r.nilpotency_class {
        Some(c) => {
            let _ = writeln!(out, "nilpotency_class: {c}");
        }
        None => out.push_str("nilpotency_class: none (not nilpotent)\n"),
    }
    out
}

//! Displacement operators `Dis_*`, `Dis^*`, `𝒪_*`, `𝔠_*`, admissible
//! subgroups and the two Galois connections between congruences and
//! subgroups of `LMlt(Q)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::congr;
use crate::error::{Error, Result};
use crate::limits::Limits;
use crate::lquasi::LeftQuasigroup;
use crate::partition::Partition;
use crate::perm::{self, Perm, PermGroup};

/// Seed for the sampled equivalences in [`check_adjunction_subgroups`].
pub const EQUIV_SAMPLE_SEED: u64 = 0xC0FFEE;
pub const EQUIV_SAMPLE_SIZE: usize = 200;

/// `LMlt(Q)` and `Dis(Q)` computed once, with the operators on top.
#[derive(Debug, Clone)]
pub struct Displacement<'a> {
    q: &'a LeftQuasigroup,
    limits: Limits,
    lmlt: PermGroup,
    dis: PermGroup,
    translations: Vec<Perm>,
    inverses: Vec<Perm>,
}

impl<'a> Displacement<'a> {
    pub fn new(q: &'a LeftQuasigroup, limits: &Limits) -> Result<Self> {
        let lmlt = q.lmlt(limits)?;
        let dis = q.dis_within(&lmlt, limits)?;
        let translations = q.left_translations();
        let inverses = translations.iter().map(Perm::inverse).collect();
        Ok(Displacement {
            q,
            limits: *limits,
            lmlt,
            dis,
            translations,
            inverses,
        })
    }

    pub fn algebra(&self) -> &LeftQuasigroup {
        self.q
    }

    pub fn limits(&self) -> &Limits {
        &self.limits
    }

    pub fn lmlt(&self) -> &PermGroup {
        &self.lmlt
    }

    pub fn dis(&self) -> &PermGroup {
        &self.dis
    }

    /// `L_x L_y⁻¹`.
    pub fn displacement(&self, x: usize, y: usize) -> Perm {
        &self.translations[x] * &self.inverses[y]
    }

    /// `Dis_α`: normal closure of the `L_x L_y⁻¹` with `x α y`.
    pub fn dis_alpha(&self, alpha: &Partition) -> Result<PermGroup> {
        self.check_len(alpha)?;
        let seed = alpha.spanning_pairs().map(|(x, m)| self.displacement(x, m));
        perm::normal_closure(&self.lmlt, seed, self.limits.max_group_order)
    }

    /// `Dis^α = {h ∈ Dis(Q) : h(x) α x}`, the kernel of `π_α`.
    pub fn dis_sup_alpha(&self, alpha: &Partition) -> Result<PermGroup> {
        self.check_len(alpha)?;
        self.fixing_blocks(&self.dis, alpha)
    }

    /// The same filter over all of `LMlt(Q)`. Differs from
    /// [`Displacement::dis_sup_alpha`] when some `L_x` fixes every block.
    pub fn dis_sup_alpha_lmlt(&self, alpha: &Partition) -> Result<PermGroup> {
        self.check_len(alpha)?;
        self.fixing_blocks(&self.lmlt, alpha)
    }

    fn fixing_blocks(&self, group: &PermGroup, alpha: &Partition) -> Result<PermGroup> {
        let n = self.q.order();
        let kept = group
            .elements()
            .iter()
            .filter(|h| (0..n).all(|x| alpha.related(h.apply(x), x)))
            .cloned()
            .collect();
        PermGroup::from_closed_set(n, kept, self.limits.max_group_order)
    }

    /// `𝒪_N`.
    pub fn orbit_eq(&self, n: &PermGroup) -> Partition {
        n.orbits()
    }

    /// `𝔠_N`: `x ~ y` iff `L_x L_y⁻¹ ∈ N`.
    pub fn cayley_eq(&self, n: &PermGroup) -> Partition {
        let size = self.q.order();
        let mut labels: Vec<usize> = (0..size).collect();
        for x in 0..size {
            if labels[x] != x {
                continue;
            }
            for y in x + 1..size {
                if labels[y] == y && n.contains(&self.displacement(y, x)) {
                    labels[y] = x;
                }
            }
        }
        Partition::from_labels(&labels)
    }

    /// `π_α(N)` acting on the blocks of `α`, numbered as in `Q/α`.
    pub fn pi(&self, alpha: &Partition, n: &PermGroup) -> Result<PermGroup> {
        if !congr::is_congruence(self.q, alpha) {
            return Err(Error::NotACongruence);
        }
        let block_of = alpha.block_index();
        let k = alpha.block_count();
        let images = n
            .generators()
            .iter()
            .map(|g| {
                g.on_blocks(&block_of, k)
                    .ok_or_else(|| Error::Inconsistency("element of LMlt does not respect a congruence".into()))
            })
            .collect::<Result<Vec<_>>>()?;
        PermGroup::close(k, images, self.limits.max_group_order)
    }

    /// Every normal subgroup of `LMlt(Q)`.
    pub fn normal_subgroups(&self) -> Result<Vec<PermGroup>> {
        perm::all_normal_subgroups(
            &self.lmlt,
            self.limits.max_group_order,
            self.limits.max_normal_subgroups,
        )
    }

    /// `Norm'(Q)`, sorted by order. Both descriptions of admissibility are
    /// evaluated and must agree.
    pub fn admissibles(&self) -> Result<Vec<PermGroup>> {
        let candidates = perm::normal_subgroups_within(
            &self.lmlt,
            &self.dis,
            self.limits.max_group_order,
            self.limits.max_normal_subgroups,
        )?;
        let mut out = Vec::new();
        for n in candidates {
            let orb = self.orbit_eq(&n);
            let by_relations = orb.leq(&self.cayley_eq(&n));
            let by_subgroups = perm::is_subgroup(&self.dis_alpha(&orb)?, &n);
            if by_relations != by_subgroups {
                return Err(Error::Inconsistency(format!(
                    "admissibility tests disagree on a subgroup of order {}",
                    n.order()
                )));
            }
            if by_relations {
                out.push(n);
            }
        }
        Ok(out)
    }

    fn check_len(&self, alpha: &Partition) -> Result<()> {
        if alpha.len() != self.q.order() {
            return Err(Error::DegreeMismatch {
                left: self.q.order(),
                right: alpha.len(),
            });
        }
        Ok(())
    }
}

/// `Con(Q)`, `Norm'(Q)` and the four operators evaluated on them.
#[derive(Debug, Clone)]
pub struct Lattices {
    pub congruences: Vec<Partition>,
    pub admissibles: Vec<PermGroup>,
    /// `Dis_α` for each congruence, in order.
    pub dis_low: Vec<PermGroup>,
    /// `Dis^α` for each congruence, in order.
    pub dis_high: Vec<PermGroup>,
    /// `𝒪_N` for each admissible subgroup, in order.
    pub orb: Vec<Partition>,
    /// `𝔠_N` for each admissible subgroup, in order.
    pub cay: Vec<Partition>,
}

impl Lattices {
    pub fn compute(d: &Displacement<'_>) -> Result<Self> {
        let congruences = congr::all_congruences(d.q, &d.limits)?;
        let admissibles = d.admissibles()?;
        let dis_low = congruences.iter().map(|a| d.dis_alpha(a)).collect::<Result<_>>()?;
        let dis_high = congruences.iter().map(|a| d.dis_sup_alpha(a)).collect::<Result<_>>()?;
        let orb = admissibles.iter().map(|n| d.orbit_eq(n)).collect();
        let cay = admissibles.iter().map(|n| d.cayley_eq(n)).collect();
        Ok(Lattices {
            congruences,
            admissibles,
            dis_low,
            dis_high,
            orb,
            cay,
        })
    }

    /// `𝒪_{Dis^α} = α` on `Con(Q)` and `Dis^{𝒪_N} = N` on `Norm'(Q)`.
    pub fn cdos(&self, d: &Displacement<'_>) -> Result<bool> {
        for (alpha, high) in self.congruences.iter().zip(&self.dis_high) {
            if &high.orbits() != alpha {
                return Ok(false);
            }
        }
        for (n, orb) in self.admissibles.iter().zip(&self.orb) {
            if &d.dis_sup_alpha(orb)? != n {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `𝔠_{Dis_α} = α` on `Con(Q)`, and `𝔠_N ∈ Con(Q)` with `Dis_{𝔠_N} = N`
    /// on `Norm'(Q)`.
    pub fn cdsg(&self, d: &Displacement<'_>) -> Result<bool> {
        for (alpha, low) in self.congruences.iter().zip(&self.dis_low) {
            if &d.cayley_eq(low) != alpha {
                return Ok(false);
            }
        }
        for (n, cay) in self.admissibles.iter().zip(&self.cay) {
            if !congr::is_congruence(d.q, cay) || &d.dis_alpha(cay)? != n {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// `𝒪_{Dis_α} = 𝒪_{Dis^α} = α` for every congruence.
    pub fn sharp(&self) -> bool {
        self.congruences
            .iter()
            .zip(self.dis_low.iter().zip(&self.dis_high))
            .all(|(alpha, (low, high))| &low.orbits() == alpha && &high.orbits() == alpha)
    }

    /// `𝔠_* = 𝒪_*` on `Norm'(Q)` and `Dis_* = Dis^*` on `Con(Q)`.
    pub fn operators_coincide(&self) -> bool {
        self.orb == self.cay && self.dis_low == self.dis_high
    }

    /// Monotone Galois connection `𝒪_N ≤ α ⟺ N ≤ Dis^α`. Returns the first
    /// failing `(congruence, admissible)` index pair.
    pub fn orbit_adjunction_violation(&self) -> Option<(usize, usize)> {
        for (i, (alpha, high)) in self.congruences.iter().zip(&self.dis_high).enumerate() {
            for (j, (n, orb)) in self.admissibles.iter().zip(&self.orb).enumerate() {
                if orb.leq(alpha) != perm::is_subgroup(n, high) {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

/// The definition: no `α < β` in `Con(Q)` with `β/α ≤ λ_{Q/α}`.
pub fn is_sharp_definitional(q: &LeftQuasigroup, congruences: &[Partition]) -> bool {
    let n = q.order();
    for alpha in congruences {
        for beta in congruences {
            if beta == alpha || !alpha.leq(beta) {
                continue;
            }
            let below_lambda = beta
                .spanning_pairs()
                .all(|(x, y)| (0..n).all(|z| alpha.related(q.op(x, z), q.op(y, z))));
            if below_lambda {
                return false;
            }
        }
    }
    true
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConnectFlags {
    pub connected: bool,
    pub connected_by_dis: bool,
    pub superconnected: bool,
    pub semiregular: bool,
}

/// Whether the left translations act transitively, i.e. `LMlt(Q)` is transitive.
pub fn is_connected(q: &LeftQuasigroup) -> bool {
    let n = q.order();
    let pairs = (0..n).flat_map(|x| (0..n).map(move |y| (y, q.op(x, y))));
    Partition::from_pairs(n, pairs).block_count() <= 1
}

pub fn connect_flags(d: &Displacement<'_>) -> Result<ConnectFlags> {
    let q = d.q;
    let mut superconnected = true;
    for points in q.all_subalgebras()? {
        if !is_connected(&q.subalgebra(&points)?) {
            superconnected = false;
            break;
        }
    }
    let n = q.order();
    let semiregular = d
        .dis
        .elements()
        .iter()
        .all(|h| h.is_identity() || (0..n).all(|x| h.apply(x) != x));
    Ok(ConnectFlags {
        connected: d.lmlt.is_transitive(),
        connected_by_dis: d.dis.is_transitive(),
        superconnected,
        semiregular,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Flags {
    pub cdos: bool,
    pub cdsg: bool,
    pub sharp: bool,
    pub faithful: bool,
    pub cayley: bool,
    pub latin: bool,
    pub connected: bool,
    pub connected_by_dis: bool,
    pub superconnected: bool,
    pub semiregular: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupSummary {
    pub order: usize,
    pub generators: Vec<Vec<usize>>,
}

impl From<&PermGroup> for GroupSummary {
    fn from(g: &PermGroup) -> Self {
        GroupSummary {
            order: g.order(),
            generators: g.generators().iter().map(|p| p.images().collect()).collect(),
        }
    }
}

/// Everything the Galois-connection analysis computes for one algebra.
/// Subgroups in `dis_low` and `dis_high` are indices into `admissibles`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GaloisReport {
    pub order: usize,
    pub lmlt_order: usize,
    pub dis_order: usize,
    pub congruences: Vec<Partition>,
    pub admissibles: Vec<GroupSummary>,
    pub dis_low: Vec<usize>,
    pub dis_high: Vec<usize>,
    pub orb: Vec<Partition>,
    pub cay: Vec<Partition>,
    pub cayley_kernel: Partition,
    pub flags: Flags,
}

fn index_of(admissibles: &[PermGroup], g: &PermGroup, what: &str) -> Result<usize> {
    admissibles
        .iter()
        .position(|n| n == g)
        .ok_or_else(|| Error::Inconsistency(format!("{what} is not admissible")))
}

/// Assembles the report and cross-checks it; an `Inconsistency` error
/// means two independent computations disagreed.
pub fn full_report(q: &LeftQuasigroup, limits: &Limits) -> Result<GaloisReport> {
    let d = Displacement::new(q, limits)?;
    let lat = Lattices::compute(&d)?;
    let cdos = lat.cdos(&d)?;
    let cdsg = lat.cdsg(&d)?;
    let sharp = lat.sharp();
    if sharp != is_sharp_definitional(q, &lat.congruences) {
        return Err(Error::Inconsistency("sharpness criteria disagree".into()));
    }
    if let Some((i, j)) = lat.orbit_adjunction_violation() {
        return Err(Error::Inconsistency(format!(
            "orbit adjunction fails at {} and admissible #{j}",
            lat.congruences[i]
        )));
    }
    for (i, alpha) in lat.congruences.iter().enumerate() {
        let (low, high) = (&lat.dis_low[i], &lat.dis_high[i]);
        let chain = [low.orbits(), high.orbits(), alpha.clone(), d.cayley_eq(low), d.cayley_eq(high)];
        if !perm::is_subgroup(low, high) || chain.windows(2).any(|w| !w[0].leq(&w[1])) {
            return Err(Error::Inconsistency(format!("operator chain fails at {alpha}")));
        }
    }
    for (orb, cay) in lat.orb.iter().zip(&lat.cay) {
        if !orb.leq(cay) || !congr::is_congruence(q, orb) {
            return Err(Error::Inconsistency(format!("orbit relation {orb} misbehaves")));
        }
    }
    let dis_low = lat
        .dis_low
        .iter()
        .map(|g| index_of(&lat.admissibles, g, "Dis_α"))
        .collect::<Result<_>>()?;
    let dis_high = lat
        .dis_high
        .iter()
        .map(|g| index_of(&lat.admissibles, g, "Dis^α"))
        .collect::<Result<_>>()?;
    let connect = connect_flags(&d)?;
    let kernel = congr::cayley_kernel(q);
    Ok(GaloisReport {
        order: q.order(),
        lmlt_order: d.lmlt.order(),
        dis_order: d.dis.order(),
        admissibles: lat.admissibles.iter().map(GroupSummary::from).collect(),
        dis_low,
        dis_high,
        flags: Flags {
            cdos,
            cdsg,
            sharp,
            faithful: kernel.is_discrete(),
            cayley: congr::is_congruence(q, &kernel),
            latin: q.is_latin(),
            connected: connect.connected,
            connected_by_dis: connect.connected_by_dis,
            superconnected: connect.superconnected,
            semiregular: connect.semiregular,
        },
        cayley_kernel: kernel,
        congruences: lat.congruences,
        orb: lat.orb,
        cay: lat.cay,
    })
}

pub fn dis_alpha(q: &LeftQuasigroup, alpha: &Partition, limits: &Limits) -> Result<PermGroup> {
    Displacement::new(q, limits)?.dis_alpha(alpha)
}

pub fn dis_sup_alpha(q: &LeftQuasigroup, alpha: &Partition, limits: &Limits) -> Result<PermGroup> {
    Displacement::new(q, limits)?.dis_sup_alpha(alpha)
}

pub fn orbit_eq(n: &PermGroup) -> Partition {
    n.orbits()
}

pub fn cayley_eq(q: &LeftQuasigroup, n: &PermGroup) -> Partition {
    let size = q.order();
    let tr = q.left_translations();
    let mut labels: Vec<usize> = (0..size).collect();
    for x in 0..size {
        for y in 0..x {
            if labels[y] == y && n.contains(&(&tr[x] * &tr[y].inverse())) {
                labels[x] = y;
                break;
            }
        }
    }
    Partition::from_labels(&labels)
}

pub fn admissibles(q: &LeftQuasigroup, limits: &Limits) -> Result<Vec<PermGroup>> {
    Displacement::new(q, limits)?.admissibles()
}

pub fn is_cdos(q: &LeftQuasigroup, limits: &Limits) -> Result<bool> {
    let d = Displacement::new(q, limits)?;
    Lattices::compute(&d)?.cdos(&d)
}

pub fn is_cdsg(q: &LeftQuasigroup, limits: &Limits) -> Result<bool> {
    let d = Displacement::new(q, limits)?;
    Lattices::compute(&d)?.cdsg(&d)
}

pub fn is_sharp(q: &LeftQuasigroup, limits: &Limits) -> Result<bool> {
    let d = Displacement::new(q, limits)?;
    Ok(Lattices::compute(&d)?.sharp())
}

/// `𝒪_N ≤ α ⟺ N ≤ Dis^α` over `Norm'(Q) × Con(Q)`.
pub fn check_adjunction_orbits(q: &LeftQuasigroup, limits: &Limits) -> Result<bool> {
    let d = Displacement::new(q, limits)?;
    Ok(Lattices::compute(&d)?.orbit_adjunction_violation().is_none())
}

/// Equivalences on which the subgroup adjunction is tested: all of them
/// for `n ≤ 4`, otherwise the congruences plus a fixed pseudorandom sample.
pub fn adjunction_equivalences(q: &LeftQuasigroup, limits: &Limits) -> Result<Vec<Partition>> {
    let n = q.order();
    if n <= 4 {
        return Ok(all_equivalences(n));
    }
    let mut out = congr::all_congruences(q, limits)?;
    let mut rng = ChaCha8Rng::seed_from_u64(EQUIV_SAMPLE_SEED);
    for _ in 0..EQUIV_SAMPLE_SIZE {
        let k = rng.gen_range(1..=n);
        let labels: Vec<usize> = (0..n).map(|_| rng.gen_range(0..k)).collect();
        out.push(Partition::from_labels(&labels));
    }
    out.sort();
    out.dedup();
    Ok(out)
}

/// `Dis_α ≤ N ⟺ α ≤ 𝔠_N` for the equivalences of
/// [`adjunction_equivalences`] and every normal subgroup of `LMlt(Q)`.
pub fn check_adjunction_subgroups(q: &LeftQuasigroup, limits: &Limits) -> Result<bool> {
    let d = Displacement::new(q, limits)?;
    let normals = d.normal_subgroups()?;
    let cays: Vec<Partition> = normals.iter().map(|n| d.cayley_eq(n)).collect();
    for alpha in adjunction_equivalences(q, limits)? {
        let low = d.dis_alpha(&alpha)?;
        for (n, cay) in normals.iter().zip(&cays) {
            if perm::is_subgroup(&low, n) != alpha.leq(cay) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Every equivalence relation on `n` points (restricted growth strings).
pub fn all_equivalences(n: usize) -> Vec<Partition> {
    fn rec(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Partition>) {
        if cur.len() == n {
            out.push(Partition::from_labels(cur));
            return;
        }
        let next = cur.iter().copied().max().map_or(0, |m| m + 1);
        for l in 0..=next {
            cur.push(l);
            rec(n, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    rec(n, &mut Vec::new(), &mut out);
    out
}

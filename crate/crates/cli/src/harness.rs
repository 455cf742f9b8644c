//! The verify-theorems harness.
//!
//! Every law is evaluated on three instance families: all left quasigroups
//! up to a small order, quandles up to isomorphism, and central extensions
//! `Aff(Q, A, g, f, θ)` over a fixed pool of bases, groups and cocycles.
//! Instances run in parallel; results are collected in instance order, so
//! the serialized outcome is identical across runs and thread counts.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::{Duration, Instant};

use lquasi::commut;
use lquasi::congr;
use lquasi::displ::{self, ConnectFlags, Displacement, Lattices};
use lquasi::ext::{self, AbelianGroup, Cocycle, EndoMap, Extension};
use lquasi::lquasi::Quotient;
use lquasi::perm::{self, Perm, PermGroup};
use lquasi::{Error, LeftQuasigroup, Limits, Partition, Term};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::enumerate::{self, Filter};
use crate::error::{CliError, Result};

pub const DEFAULT_SEED: u64 = 0xC0FFEE;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Exhaustive,
    Quandle,
    Extension,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Law {
    LmltDecomposition,
    BlockAction,
    IdempotentBlocks,
    OperatorChain,
    Monotonicity,
    AdmissibleOrbits,
    PiTransport,
    LatticeCorrespondence,
    OrbitCayleyTransport,
    LambdaRemark,
    BelowLambda,
    SharpCharacterization,
    OrbitEqualsCayley,
    GaloisOrbits,
    GaloisCayley,
    QuotientClosure,
    CdsgVsCdos,
    CdsgVsCdosCayley,
    SimpleCase,
    FromCpLemma,
    FromCpCorollary,
    CommutatorOracle,
    NilpotentCdsg,
    ExtQuotient,
    ExtKerP1Central,
    ExtDisAction,
    ExtAlphaN,
    ExtBlockConnectivity,
    ExtTermForm,
    ExtCdsgForAffine,
}

impl Law {
    pub const ALL: [Law; 30] = [
        Law::LmltDecomposition,
        Law::BlockAction,
        Law::IdempotentBlocks,
        Law::OperatorChain,
        Law::Monotonicity,
        Law::AdmissibleOrbits,
        Law::PiTransport,
        Law::LatticeCorrespondence,
        Law::OrbitCayleyTransport,
        Law::LambdaRemark,
        Law::BelowLambda,
        Law::SharpCharacterization,
        Law::OrbitEqualsCayley,
        Law::GaloisOrbits,
        Law::GaloisCayley,
        Law::QuotientClosure,
        Law::CdsgVsCdos,
        Law::CdsgVsCdosCayley,
        Law::SimpleCase,
        Law::FromCpLemma,
        Law::FromCpCorollary,
        Law::CommutatorOracle,
        Law::NilpotentCdsg,
        Law::ExtQuotient,
        Law::ExtKerP1Central,
        Law::ExtDisAction,
        Law::ExtAlphaN,
        Law::ExtBlockConnectivity,
        Law::ExtTermForm,
        Law::ExtCdsgForAffine,
    ];

    pub fn name(self) -> String {
        serde_json::to_value(self)
            .ok()
            .and_then(|v| v.as_str().map(str::to_string))
            .unwrap_or_default()
    }

    /// What the law asserts, for reports.
    pub fn statement(self) -> &'static str {
        match self {
            Law::LmltDecomposition => "Dis ⊴ LMlt, LMlt = ⟨Dis, L_x⟩ for every x, Dis = words of exponent sum 0",
            Law::BlockAction => "L_x acts on the blocks of α as L_[x] in Q/α",
            Law::IdempotentBlocks => "blocks of α at idempotents of Q/α are subuniverses",
            Law::OperatorChain => "O(Dis_α) ≤ O(Dis^α) ≤ α ≤ c(Dis_α) ≤ c(Dis^α), Dis_α ≤ Dis^α, both admissible",
            Law::Monotonicity => "Dis_*, Dis^*, O_*, c_* are monotone",
            Law::AdmissibleOrbits => "N ∈ Norm' gives O_N ∈ Con and N ≤ Dis^(O_N)",
            Law::PiTransport => "π_α(Dis_β) = Dis_(β/α) and π_α(Dis^β) = Dis^(β/α) for α ≤ β",
            Law::LatticeCorrespondence => "π_α is a lattice isomorphism {N ∈ Norm' : Dis^α ≤ N} → Norm'(Q/α)",
            Law::OrbitCayleyTransport => "O_N/β = O(π_β N) with β = O(Dis^α), c_N/α = c(π_α N), for Dis^α ≤ N",
            Law::LambdaRemark => "α ≤ λ iff Dis_α = 1; λ(Q/α) = c(Dis^α)/α",
            Law::BelowLambda => "α/β ≤ λ(Q/β) for β = O(Dis^α) and for β = O(Dis_α)",
            Law::SharpCharacterization => "sharp iff O(Dis_α) = O(Dis^α) = α for every congruence",
            Law::OrbitEqualsCayley => "O_* = c_* iff the full chain collapses iff every Q/α is faithful; then sharp",
            Law::GaloisOrbits => "O_N ≤ α iff N ≤ Dis^α, with FGF = F and GFG = G",
            Law::GaloisCayley => "Dis_α ≤ N iff α ≤ c_N over equivalences and normal subgroups, FGF = F, GFG = G",
            Law::QuotientClosure => "CDOs, CDSg and sharpness pass to every quotient",
            Law::CdsgVsCdos => "CDSg iff (sharp and CDOs) iff (c_* = O_* and Dis_* = Dis^*)",
            Law::CdsgVsCdosCayley => "the same three conditions agree on Cayley left quasigroups",
            Law::SimpleCase => "simple with λ ≠ 1 gives Norm' = {1, Dis} and CDOs; λ = 1 gives P_2 or Aff(Z_p,0,1,1)",
            Law::FromCpLemma => "C(α,β;0) gives [Dis_α, Dis_β] = 1 and equal Dis_β stabilizers along α",
            Law::FromCpCorollary => "α ≤ ζ gives Dis_α ≤ Z(Dis) and equal Dis stabilizers along α",
            Law::CommutatorOracle => "sampled term matrices lie in the closure; closure centrality implies sampled centrality",
            Law::NilpotentCdsg => "nilpotent idempotent: CDSg iff semiregular superconnected latin quandle",
            Law::ExtQuotient => "p1 is a surjective morphism and E/ker p1 = Q",
            Law::ExtKerP1Central => "ker p1 is central",
            Law::ExtDisAction => "conjugated displacements act as (y, c + f^k g(a−b))",
            Law::ExtAlphaN => "α_N is a congruence for every invariant N",
            Law::ExtBlockConnectivity => "orbits of Dis(ker p1) are (y, c+H); blocks connected when they are the orbits",
            Law::ExtTermForm => "term operations are t^Q on the base and affine in each A-argument",
            Law::ExtCdsgForAffine => "idempotent E with CDOs has superconnected Aff(A, 1−f, f, 0)",
        }
    }

    fn is_extension_law(self) -> bool {
        matches!(
            self,
            Law::ExtQuotient
                | Law::ExtKerP1Central
                | Law::ExtDisAction
                | Law::ExtAlphaN
                | Law::ExtBlockConnectivity
                | Law::ExtTermForm
                | Law::ExtCdsgForAffine
        )
    }

    /// Laws whose cost grows with pairs of congruences or with quotient
    /// lattices; skipped above [`Scope::lattice_cap`].
    fn is_quadratic(self) -> bool {
        matches!(
            self,
            Law::Monotonicity
                | Law::PiTransport
                | Law::LatticeCorrespondence
                | Law::OrbitCayleyTransport
                | Law::BelowLambda
                | Law::OrbitEqualsCayley
                | Law::GaloisOrbits
                | Law::GaloisCayley
                | Law::QuotientClosure
                | Law::FromCpLemma
                | Law::SharpCharacterization
        )
    }
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl FromStr for Law {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        Law::ALL
            .into_iter()
            .find(|l| l.name() == s)
            .ok_or_else(|| CliError::Input(format!("unknown law `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Scope {
    /// Every left quasigroup of order `1..=exhaustive_order`.
    pub exhaustive_order: usize,
    /// Quandles of order `1..=quandle_order`, up to isomorphism.
    pub quandle_order: usize,
    pub extensions: bool,
    pub seed: u64,
    pub commutator_terms: usize,
    pub extension_terms: usize,
    pub lattice_cap: usize,
    pub limits: Limits,
    /// `None` runs every law.
    pub laws: Option<Vec<Law>>,
}

impl Default for Scope {
    fn default() -> Self {
        Scope {
            exhaustive_order: 3,
            quandle_order: 5,
            extensions: true,
            seed: DEFAULT_SEED,
            commutator_terms: 500,
            extension_terms: 300,
            lattice_cap: 64,
            limits: Limits::default(),
            laws: None,
        }
    }
}

impl Scope {
    pub fn laws(&self) -> Vec<Law> {
        self.laws.clone().unwrap_or_else(|| Law::ALL.to_vec())
    }
}

#[derive(Debug, Clone)]
pub struct Instance {
    pub label: String,
    pub family: Family,
    pub algebra: LeftQuasigroup,
    pub extension: Option<Extension>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub instance: String,
    pub table: Vec<Vec<usize>>,
    pub congruence: Option<Partition>,
    pub subgroup: Option<Vec<Vec<usize>>>,
    pub detail: String,
}

impl Witness {
    fn new(inst: &Instance, detail: impl Into<String>) -> Self {
        Witness {
            instance: inst.label.clone(),
            table: inst.algebra.rows(),
            congruence: None,
            subgroup: None,
            detail: detail.into(),
        }
    }

    fn at(mut self, alpha: &Partition) -> Self {
        self.congruence = Some(alpha.clone());
        self
    }

    fn with(mut self, group: &PermGroup) -> Self {
        self.subgroup = Some(group.generators().iter().map(|p| p.images().collect()).collect());
        self
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HarnessResult {
    pub law: Law,
    pub instances: usize,
    pub failures: Vec<Witness>,
    pub skipped: usize,
    /// Summed over instances; not serialized so runs compare byte for byte.
    #[serde(skip)]
    pub elapsed: Duration,
}

impl HarnessResult {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

enum Outcome {
    NotApplicable,
    Pass,
    Fail(Witness),
    Skip,
}

type Check = std::result::Result<Option<Witness>, Error>;

fn matrix_label(m: &EndoMap) -> String {
    let rows: Vec<String> = m
        .matrix()
        .iter()
        .map(|r| r.iter().map(usize::to_string).collect::<Vec<_>>().join(" "))
        .collect();
    format!("[{}]", rows.join("; "))
}

/// Bases, groups and cocycles of the extension family, in a fixed order.
pub fn extension_family(seed: u64) -> Result<Vec<Instance>> {
    let bases = [
        ("point", LeftQuasigroup::projection(1)),
        ("P2", LeftQuasigroup::projection(2)),
        ("R3", LeftQuasigroup::dihedral(3)),
    ];
    let groups = [("Z2", vec![2]), ("Z3", vec![3]), ("Z4", vec![4]), ("Z2xZ2", vec![2, 2])];
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0xE87E_451A);
    let mut out = Vec::new();
    for (gname, moduli) in &groups {
        let group = AbelianGroup::new(moduli).map_err(CliError::stage("extension family"))?;
        let endos = EndoMap::all(&group);
        let autos = EndoMap::automorphisms(&group);
        for f in &autos {
            for g in &endos {
                for (bname, base) in &bases {
                    let k = base.order();
                    let thetas = [
                        ("zero", Cocycle::zero(k)),
                        ("random-zero-diagonal", Cocycle::random(&mut rng, k, &group, true)),
                        ("random", Cocycle::random(&mut rng, k, &group, false)),
                    ];
                    for (tname, theta) in thetas {
                        let e = ext::build_extension(base, &group, g, f, &theta)
                            .map_err(CliError::stage("extension family"))?;
                        out.push(Instance {
                            label: format!(
                                "Aff({bname}, {gname}, g={}, f={}, theta={tname}:{:?})",
                                matrix_label(g),
                                matrix_label(f),
                                theta.values()
                            ),
                            family: Family::Extension,
                            algebra: e.algebra.clone(),
                            extension: Some(e),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// All instances of `scope`, in the order results are reported.
pub fn instances(scope: &Scope) -> Result<Vec<Instance>> {
    let mut out = Vec::new();
    for n in 1..=scope.exhaustive_order {
        for (i, q) in enumerate::enumerate(n, Filter::NONE, false)?.into_iter().enumerate() {
            out.push(Instance {
                label: format!("all-{n}#{i}"),
                family: Family::Exhaustive,
                algebra: q,
                extension: None,
            });
        }
    }
    for n in 1..=scope.quandle_order {
        for (i, q) in enumerate::enumerate(n, Filter::quandle(), true)?.into_iter().enumerate() {
            out.push(Instance {
                label: format!("quandle-{n}#{i}"),
                family: Family::Quandle,
                algebra: q,
                extension: None,
            });
        }
    }
    if scope.extensions {
        out.extend(extension_family(scope.seed)?);
    }
    Ok(out)
}

/// Fixed term samples of depth at most 6.
struct Samples {
    commutator: Vec<Term>,
    extension: Vec<Term>,
}

impl Samples {
    fn new(scope: &Scope) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(scope.seed);
        let mut draw = |count: usize| -> Vec<Term> {
            (0..count)
                .map(|_| {
                    let arity = rng.gen_range(1..=3);
                    Term::random(&mut rng, arity, 6)
                })
                .collect()
        };
        let commutator = draw(scope.commutator_terms);
        let extension = draw(scope.extension_terms);
        Samples { commutator, extension }
    }
}

struct QView<'a> {
    d: Displacement<'a>,
    lat: Lattices,
    cdos: bool,
    cdsg: bool,
    sharp: bool,
}

impl<'a> QView<'a> {
    fn new(q: &'a LeftQuasigroup, limits: &Limits) -> std::result::Result<Self, Error> {
        let d = Displacement::new(q, limits)?;
        let lat = Lattices::compute(&d)?;
        let cdos = lat.cdos(&d)?;
        let cdsg = lat.cdsg(&d)?;
        let sharp = lat.sharp();
        Ok(QView {
            d,
            lat,
            cdos,
            cdsg,
            sharp,
        })
    }
}

/// Everything the Galois-type laws share for one instance.
struct Galois<'a> {
    inst: &'a Instance,
    limits: Limits,
    main: QView<'a>,
    lambda: Partition,
    quotients: &'a [Quotient],
    views: Vec<OnceCell<std::result::Result<QView<'a>, Error>>>,
    connect: OnceCell<std::result::Result<ConnectFlags, Error>>,
}

impl<'a> Galois<'a> {
    fn q(&self) -> &'a LeftQuasigroup {
        &self.inst.algebra
    }

    fn d(&self) -> &Displacement<'a> {
        &self.main.d
    }

    fn lat(&self) -> &Lattices {
        &self.main.lat
    }

    fn index_of(&self, alpha: &Partition) -> Option<usize> {
        self.lat().congruences.iter().position(|c| c == alpha)
    }

    fn view(&self, i: usize) -> std::result::Result<&QView<'a>, Error> {
        self.views[i]
            .get_or_init(|| QView::new(&self.quotients[i].algebra, &self.limits))
            .as_ref()
            .map_err(Clone::clone)
    }

    fn connect(&self) -> std::result::Result<ConnectFlags, Error> {
        self.connect.get_or_init(|| displ::connect_flags(self.d())).clone()
    }

    fn fail(&self, detail: impl Into<String>) -> Check {
        Ok(Some(Witness::new(self.inst, detail)))
    }

    fn fail_at(&self, alpha: &Partition, detail: impl Into<String>) -> Check {
        Ok(Some(Witness::new(self.inst, detail).at(alpha)))
    }

    fn fail_with(&self, alpha: Option<&Partition>, n: &PermGroup, detail: impl Into<String>) -> Check {
        let mut w = Witness::new(self.inst, detail).with(n);
        w.congruence = alpha.cloned();
        Ok(Some(w))
    }
}

fn limit(g: &Galois<'_>) -> usize {
    g.limits.max_group_order
}

fn exponent_sum_oracle(q: &LeftQuasigroup, limits: &Limits) -> std::result::Result<BTreeSet<Vec<usize>>, Error> {
    let n = q.order();
    let translations = q.left_translations();
    let m = translations.iter().fold(1usize, |acc, t| {
        let o = t.order();
        acc / gcd(acc, o) * o
    });
    let gens = translations
        .iter()
        .map(|t| {
            let images: Vec<usize> = t.images().chain((0..m).map(|i| n + (i + 1) % m)).collect();
            Perm::from_images(&images)
        })
        .collect::<std::result::Result<Vec<_>, _>>()?;
    let big = PermGroup::close(n + m, gens, limits.max_group_order.saturating_mul(m))?;
    Ok(big
        .elements()
        .iter()
        .filter(|h| h.apply(n) == n)
        .map(|h| h.images().take(n).collect())
        .collect())
}

fn gcd(a: usize, b: usize) -> usize {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn element_set(g: &PermGroup) -> BTreeSet<Vec<usize>> {
    g.elements().iter().map(|h| h.images().collect()).collect()
}

fn lmlt_decomposition(g: &Galois<'_>) -> Check {
    let (lmlt, dis) = (g.d().lmlt(), g.d().dis());
    if !perm::is_normal_in(dis, lmlt) {
        return g.fail_with(None, dis, "Dis is not normal in LMlt");
    }
    for (x, t) in g.q().left_translations().into_iter().enumerate() {
        let gens = dis.generators().iter().cloned().chain(std::iter::once(t));
        if &PermGroup::close(g.q().order(), gens, limit(g))? != lmlt {
            return g.fail(format!("⟨Dis, L_{x}⟩ ≠ LMlt"));
        }
    }
    if exponent_sum_oracle(g.q(), &g.limits)? != element_set(dis) {
        return g.fail_with(None, dis, "Dis differs from the exponent-sum-zero subgroup");
    }
    Ok(None)
}

fn block_action_at(g: &Galois<'_>, i: usize) -> Check {
    let alpha = &g.lat().congruences[i];
    let quot = &g.quotients[i];
    let k = quot.algebra.order();
    for x in 0..g.q().order() {
        let on_blocks = g.q().left_translation(x).on_blocks(&quot.block_of, k);
        if on_blocks.as_ref() != Some(&quot.algebra.left_translation(quot.block_of[x])) {
            return g.fail_at(alpha, format!("L_{x} does not act as L_[{x}]"));
        }
    }
    Ok(None)
}

fn idempotent_blocks_at(g: &Galois<'_>, i: usize) -> Check {
    let alpha = &g.lat().congruences[i];
    let quot = &g.quotients[i];
    for (b, block) in alpha.blocks().into_iter().enumerate() {
        let class = quot.block_of[block[0]];
        debug_assert_eq!(class, b);
        if quot.algebra.op(class, class) == class && g.q().subuniverse_generated(&block)? != block {
            return g.fail_at(alpha, format!("block {block:?} is not a subuniverse"));
        }
    }
    Ok(None)
}

fn operator_chain_at(g: &Galois<'_>, i: usize) -> Check {
    let lat = g.lat();
    let alpha = &lat.congruences[i];
    let (low, high) = (&lat.dis_low[i], &lat.dis_high[i]);
    let chain = [
        low.orbits(),
        high.orbits(),
        alpha.clone(),
        g.d().cayley_eq(low),
        g.d().cayley_eq(high),
    ];
    if let Some(k) = chain.windows(2).position(|w| !w[0].leq(&w[1])) {
        return g.fail_at(alpha, format!("chain breaks at step {k}: {} ≰ {}", chain[k], chain[k + 1]));
    }
    if !perm::is_subgroup(low, high) {
        return g.fail_with(Some(alpha), low, "Dis_α ≰ Dis^α");
    }
    for (name, grp) in [("Dis_α", low), ("Dis^α", high)] {
        if !lat.admissibles.contains(grp) {
            return g.fail_with(Some(alpha), grp, format!("{name} is not admissible"));
        }
    }
    Ok(None)
}

fn lambda_remark_at(g: &Galois<'_>, i: usize) -> Check {
    let lat = g.lat();
    let alpha = &lat.congruences[i];
    if alpha.leq(&g.lambda) != lat.dis_low[i].is_trivial() {
        return g.fail_at(alpha, format!("α ≤ λ is {} but |Dis_α| = {}", alpha.leq(&g.lambda), lat.dis_low[i].order()));
    }
    let expected = congr::quotient_congruence(alpha, &g.d().cayley_eq(&lat.dis_high[i]))?;
    let lambda_q = congr::cayley_kernel(&g.quotients[i].algebra);
    if lambda_q != expected {
        return g.fail_at(alpha, format!("λ(Q/α) = {lambda_q} but c(Dis^α)/α = {expected}"));
    }
    Ok(None)
}

fn below_lambda_at(g: &Galois<'_>, i: usize) -> Check {
    let lat = g.lat();
    let alpha = &lat.congruences[i];
    for (name, grp) in [("Dis^α", &lat.dis_high[i]), ("Dis_α", &lat.dis_low[i])] {
        let beta = grp.orbits();
        let Some(j) = g.index_of(&beta) else {
            return g.fail_at(alpha, format!("orbits of {name} are not a congruence"));
        };
        let rel = congr::quotient_congruence(&beta, alpha)?;
        if !rel.leq(&congr::cayley_kernel(&g.quotients[j].algebra)) {
            return g.fail_at(alpha, format!("α/O({name}) ≰ λ(Q/O({name}))"));
        }
    }
    Ok(None)
}

/// The laws that only look at one congruence.
const PER_CONGRUENCE: [Law; 6] = [
    Law::BlockAction,
    Law::IdempotentBlocks,
    Law::OperatorChain,
    Law::LambdaRemark,
    Law::BelowLambda,
    Law::PiTransport,
];

fn per_congruence(law: Law, g: &Galois<'_>, i: usize) -> Check {
    match law {
        Law::BlockAction => block_action_at(g, i),
        Law::IdempotentBlocks => idempotent_blocks_at(g, i),
        Law::OperatorChain => operator_chain_at(g, i),
        Law::LambdaRemark => lambda_remark_at(g, i),
        Law::BelowLambda => below_lambda_at(g, i),
        Law::PiTransport => pi_transport_at(g, i),
        _ => unreachable!("not a per-congruence law"),
    }
}

fn pi_transport_at(g: &Galois<'_>, i: usize) -> Check {
    let lat = g.lat();
    let alpha = &lat.congruences[i];
    let view = g.view(i)?;
    for (j, beta) in lat.congruences.iter().enumerate() {
        if !alpha.leq(beta) {
            continue;
        }
        let beta_q = congr::quotient_congruence(alpha, beta)?;
        let low = g.d().pi(alpha, &lat.dis_low[j])?;
        if low != view.d.dis_alpha(&beta_q)? {
            return g.fail_with(Some(alpha), &lat.dis_low[j], format!("π_α(Dis_β) ≠ Dis_(β/α) for β = {beta}"));
        }
        let high = g.d().pi(alpha, &lat.dis_high[j])?;
        if high != view.d.dis_sup_alpha(&beta_q)? {
            return g.fail_with(Some(alpha), &lat.dis_high[j], format!("π_α(Dis^β) ≠ Dis^(β/α) for β = {beta}"));
        }
    }
    Ok(None)
}

fn monotonicity(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    for (i, a) in lat.congruences.iter().enumerate() {
        for (j, b) in lat.congruences.iter().enumerate() {
            if a.leq(b)
                && !(perm::is_subgroup(&lat.dis_low[i], &lat.dis_low[j])
                    && perm::is_subgroup(&lat.dis_high[i], &lat.dis_high[j]))
            {
                return g.fail_at(a, format!("displacement operators not monotone up to {b}"));
            }
        }
    }
    for (i, n) in lat.admissibles.iter().enumerate() {
        for (j, m) in lat.admissibles.iter().enumerate() {
            if perm::is_subgroup(n, m) && !(lat.orb[i].leq(&lat.orb[j]) && lat.cay[i].leq(&lat.cay[j])) {
                return g.fail_with(None, n, format!("O_* or c_* not monotone up to admissible #{j}"));
            }
        }
    }
    Ok(None)
}

fn admissible_orbits(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    for (n, orb) in lat.admissibles.iter().zip(&lat.orb) {
        if !congr::is_congruence(g.q(), orb) {
            return g.fail_with(Some(orb), n, "O_N is not a congruence");
        }
        if !perm::is_subgroup(n, &g.d().dis_sup_alpha(orb)?) {
            return g.fail_with(Some(orb), n, "N ≰ Dis^(O_N)");
        }
    }
    Ok(None)
}

fn lattice_correspondence(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    let dis = g.d().dis();
    for (i, alpha) in lat.congruences.iter().enumerate() {
        let view = g.view(i)?;
        let above: Vec<&PermGroup> = lat
            .admissibles
            .iter()
            .filter(|n| perm::is_subgroup(&lat.dis_high[i], n))
            .collect();
        let images = above.iter().map(|n| g.d().pi(alpha, n)).collect::<std::result::Result<Vec<_>, _>>()?;
        let target = &view.lat.admissibles;
        if images.len() != target.len() || target.iter().any(|k| !images.contains(k)) {
            return g.fail_at(
                alpha,
                format!("{} admissibles above Dis^α but {} in Norm'(Q/α)", images.len(), target.len()),
            );
        }
        for (a, na) in above.iter().enumerate() {
            for (b, nb) in above.iter().enumerate() {
                if perm::is_subgroup(na, nb) != perm::is_subgroup(&images[a], &images[b]) {
                    return g.fail_with(Some(alpha), na, "π_α does not preserve and reflect order");
                }
            }
        }
        let block_of = &g.quotients[i].block_of;
        let k = g.quotients[i].algebra.order();
        for kgrp in target {
            let pre: Vec<Perm> = dis
                .elements()
                .iter()
                .filter(|h| h.on_blocks(block_of, k).is_some_and(|p| kgrp.contains(&p)))
                .cloned()
                .collect();
            let pre = PermGroup::close(g.q().order(), pre, limit(g))?;
            if !above.contains(&&pre) || g.d().pi(alpha, &pre)? != *kgrp {
                return g.fail_with(Some(alpha), &pre, "π_α⁻¹ is not inverse to π_α");
            }
        }
    }
    Ok(None)
}

fn orbit_cayley_transport(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    for (i, alpha) in lat.congruences.iter().enumerate() {
        let high = &lat.dis_high[i];
        let beta = high.orbits();
        let Some(j) = g.index_of(&beta) else {
            return g.fail_at(alpha, "O(Dis^α) is not a congruence");
        };
        let (view_a, view_b) = (g.view(i)?, g.view(j)?);
        for (n, (orb, cay)) in lat.admissibles.iter().zip(lat.orb.iter().zip(&lat.cay)) {
            if !perm::is_subgroup(high, n) {
                continue;
            }
            let left = congr::quotient_congruence(&beta, orb)?;
            let right = view_b.d.orbit_eq(&g.d().pi(&beta, n)?);
            if left != right {
                return g.fail_with(Some(alpha), n, format!("O_N/β = {left} but O(π_β N) = {right}"));
            }
            let left = congr::quotient_congruence(alpha, cay)?;
            let right = view_a.d.cayley_eq(&g.d().pi(alpha, n)?);
            if left != right {
                return g.fail_with(Some(alpha), n, format!("c_N/α = {left} but c(π_α N) = {right}"));
            }
        }
    }
    Ok(None)
}

fn sharp_characterization(g: &Galois<'_>) -> Check {
    let by_operators = g.main.sharp;
    let by_definition = displ::is_sharp_definitional(g.q(), &g.lat().congruences);
    if by_operators != by_definition {
        return g.fail(format!("operator form {by_operators}, definition {by_definition}"));
    }
    Ok(None)
}

fn orbit_equals_cayley(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    let first = lat.orb == lat.cay;
    let second = lat.congruences.iter().enumerate().all(|(i, alpha)| {
        let (low, high) = (&lat.dis_low[i], &lat.dis_high[i]);
        [low.orbits(), high.orbits(), g.d().cayley_eq(low), g.d().cayley_eq(high)]
            .iter()
            .all(|p| p == alpha)
    });
    let third = g.quotients.iter().all(|quot| congr::is_faithful(&quot.algebra));
    if first != second || second != third {
        return g.fail(format!("O_* = c_*: {first}, chain collapses: {second}, quotients faithful: {third}"));
    }
    if first && !g.main.sharp {
        return g.fail("O_* = c_* but not sharp");
    }
    Ok(None)
}

fn galois_orbits(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    if let Some((i, j)) = lat.orbit_adjunction_violation() {
        return g.fail_with(Some(&lat.congruences[i]), &lat.admissibles[j], "O_N ≤ α and N ≤ Dis^α disagree");
    }
    for (i, alpha) in lat.congruences.iter().enumerate() {
        let high = &lat.dis_high[i];
        if &g.d().dis_sup_alpha(&high.orbits())? != high {
            return g.fail_at(alpha, "Dis^(O(Dis^α)) ≠ Dis^α");
        }
    }
    for (n, orb) in lat.admissibles.iter().zip(&lat.orb) {
        if &g.d().dis_sup_alpha(orb)?.orbits() != orb {
            return g.fail_with(None, n, "O(Dis^(O_N)) ≠ O_N");
        }
    }
    Ok(None)
}

fn galois_cayley(g: &Galois<'_>) -> Check {
    let d = g.d();
    let normals = d.normal_subgroups()?;
    let cays: Vec<Partition> = normals.iter().map(|n| d.cayley_eq(n)).collect();
    for alpha in displ::adjunction_equivalences(g.q(), &g.limits)? {
        let low = d.dis_alpha(&alpha)?;
        for (n, cay) in normals.iter().zip(&cays) {
            if perm::is_subgroup(&low, n) != alpha.leq(cay) {
                return g.fail_with(Some(&alpha), n, "Dis_α ≤ N and α ≤ c_N disagree");
            }
        }
        if d.dis_alpha(&d.cayley_eq(&low))? != low {
            return g.fail_at(&alpha, "Dis_(c(Dis_α)) ≠ Dis_α");
        }
    }
    for (n, cay) in normals.iter().zip(&cays) {
        if &d.cayley_eq(&d.dis_alpha(cay)?) != cay {
            return g.fail_with(None, n, "c(Dis_(c_N)) ≠ c_N");
        }
    }
    Ok(None)
}

fn quotient_closure(g: &Galois<'_>) -> Check {
    let m = &g.main;
    for (i, alpha) in g.lat().congruences.iter().enumerate() {
        let v = g.view(i)?;
        for (name, here, there) in [("CDOs", m.cdos, v.cdos), ("CDSg", m.cdsg, v.cdsg), ("sharp", m.sharp, v.sharp)] {
            if here && !there {
                return g.fail_at(alpha, format!("{name} holds for Q but not for Q/α"));
            }
        }
    }
    Ok(None)
}

fn cdsg_vs_cdos(g: &Galois<'_>) -> Check {
    let m = &g.main;
    let first = m.cdsg;
    let second = m.sharp && m.cdos;
    let third = m.lat.operators_coincide();
    if first != second || second != third {
        return g.fail(format!(
            "CDSg: {first}, sharp and CDOs: {second} (sharp {}, CDOs {}), operators coincide: {third}",
            m.sharp, m.cdos
        ));
    }
    Ok(None)
}

fn simple_case(g: &Galois<'_>) -> Check {
    let q = g.q();
    let n = q.order();
    let lat = g.lat();
    if g.lambda.is_total() {
        let expected = if q.is_idempotent() {
            LeftQuasigroup::projection(2)
        } else {
            if (2..n).any(|p| n.is_multiple_of(p)) {
                return g.fail("simple with λ = 1 but the order is not prime");
            }
            LeftQuasigroup::from_fn(n, |_, y| (y + 1) % n)?
        };
        if !q.is_isomorphic(&expected)? {
            return g.fail("simple with λ = 1 but not P_2 or Aff(Z_p,0,1,1)");
        }
        return Ok(None);
    }
    let dis = g.d().dis();
    let expected = if dis.is_trivial() { 1 } else { 2 };
    if lat.admissibles.len() != expected || !lat.admissibles.iter().all(|a| a.is_trivial() || a == dis) {
        return g.fail(format!("Norm' has {} members, expected {{1, Dis}}", lat.admissibles.len()));
    }
    if !g.main.cdos {
        return g.fail("simple with λ ≠ 1 but no CDOs");
    }
    Ok(None)
}

fn stabilizers_agree(group: &PermGroup, alpha: &Partition, lim: usize) -> std::result::Result<Option<(usize, usize)>, Error> {
    for (x, y) in alpha.pairs() {
        if x < y && group.pointwise_stabilizer(x, lim)? != group.pointwise_stabilizer(y, lim)? {
            return Ok(Some((x, y)));
        }
    }
    Ok(None)
}

fn from_cp_lemma(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    let zero = Partition::discrete(g.q().order());
    for (i, alpha) in lat.congruences.iter().enumerate() {
        for (j, beta) in lat.congruences.iter().enumerate() {
            if !commut::centralizes(g.q(), alpha, beta, &zero) {
                continue;
            }
            let comm = perm::commutator_subgroup(&lat.dis_low[i], &lat.dis_low[j], limit(g))?;
            if !comm.is_trivial() {
                return g.fail_with(Some(alpha), &comm, format!("C(α,β;0) with β = {beta} but [Dis_α, Dis_β] ≠ 1"));
            }
            if let Some((x, y)) = stabilizers_agree(&lat.dis_low[j], alpha, limit(g))? {
                return g.fail_with(Some(alpha), &lat.dis_low[j], format!("(Dis_β)_{x} ≠ (Dis_β)_{y} for β = {beta}"));
            }
        }
    }
    Ok(None)
}

fn from_cp_corollary(g: &Galois<'_>) -> Check {
    let lat = g.lat();
    let zeta = commut::center(g.q(), &g.limits)?;
    let dis = g.d().dis();
    let centre = dis.center(limit(g))?;
    for (i, alpha) in lat.congruences.iter().enumerate() {
        if !alpha.leq(&zeta) {
            continue;
        }
        if !perm::is_subgroup(&lat.dis_low[i], &centre) {
            return g.fail_with(Some(alpha), &lat.dis_low[i], "α ≤ ζ but Dis_α is not central in Dis");
        }
        if let Some((x, y)) = stabilizers_agree(dis, alpha, limit(g))? {
            return g.fail_at(alpha, format!("α ≤ ζ but Dis_{x} ≠ Dis_{y}"));
        }
    }
    Ok(None)
}

fn commutator_oracle(g: &Galois<'_>, terms: &[Term]) -> Check {
    let q = g.q();
    let n = q.order();
    let lat = g.lat();
    for alpha in &lat.congruences {
        for beta in &lat.congruences {
            let closure = commut::generate_matrices(q, alpha, beta);
            let mut sampled = vec![false; n.pow(4)];
            for t in terms {
                for m in commut::term_matrices(q, alpha, beta, t, 1) {
                    if !closure.contains(m) {
                        return g.fail_at(alpha, format!("term {t} gives {m:?} outside the closure for β = {beta}"));
                    }
                    sampled[((m[0] * n + m[1]) * n + m[2]) * n + m[3]] = true;
                }
            }
            for delta in &lat.congruences {
                let by_closure = closure.centralizes(delta);
                let by_terms = sampled.iter().enumerate().filter(|(_, &s)| s).all(|(idx, _)| {
                    let m = [idx / (n * n * n), idx / (n * n) % n, idx / n % n, idx % n];
                    !delta.related(m[0], m[1]) || delta.related(m[2], m[3])
                });
                if by_closure && !by_terms {
                    return g.fail_at(alpha, format!("closure centralizes modulo {delta} but a sampled term does not (β = {beta})"));
                }
            }
        }
    }
    Ok(None)
}

fn nilpotent_cdsg(g: &Galois<'_>) -> std::result::Result<Option<Option<Witness>>, Error> {
    let q = g.q();
    if !q.is_idempotent() {
        return Ok(None);
    }
    let Some(class) = commut::nilpotency_class(q, &g.limits)? else {
        return Ok(None);
    };
    let c = g.connect()?;
    let p = q.predicates();
    let right = c.semiregular && c.superconnected && p.latin && p.quandle;
    if g.main.cdsg != right {
        return Ok(Some(g.fail(format!(
            "nilpotent of class {class}: CDSg {} but semiregular {}, superconnected {}, latin {}, quandle {}",
            g.main.cdsg, c.semiregular, c.superconnected, p.latin, p.quandle
        ))?));
    }
    Ok(Some(None))
}

fn extension_law(law: Law, inst: &Instance, e: &Extension, scope: &Scope, samples: &Samples, cdos: Option<bool>) -> std::result::Result<Option<Option<Witness>>, Error> {
    let fail = |detail: String| Ok(Some(Some(Witness::new(inst, detail))));
    match law {
        Law::ExtQuotient => {
            if !e.p1_is_morphism() {
                return fail("p1 is not a morphism".into());
            }
            if !ext::quotient_is_base(e) {
                return fail("E/ker p1 differs from Q".into());
            }
        }
        Law::ExtKerP1Central => {
            if !ext::ker_p1_is_central(e) {
                return fail("ker p1 is not central".into());
            }
        }
        Law::ExtDisAction => {
            if !e.displacement_action_check(&scope.limits)? {
                return fail("a conjugated displacement violates (y, c + f^k g(a−b))".into());
            }
        }
        Law::ExtAlphaN => {
            for n in e.invariant_subgroups() {
                if !ext::alpha_n_is_congruence(e, &n)? {
                    let mut w = Witness::new(inst, format!("α_N is not a congruence for N = {n:?}"));
                    w.congruence = Some(e.alpha_n_unchecked(&n));
                    return Ok(Some(Some(w)));
                }
            }
        }
        Law::ExtBlockConnectivity => {
            if !e.block_connectivity_check(&scope.limits)? {
                return fail(format!("orbit or connectivity mismatch, H = {:?}", e.h_subgroup()));
            }
        }
        Law::ExtTermForm => {
            if let Some(t) = samples.extension.iter().find(|t| !e.term_form_check(t)) {
                return fail(format!("term {t} is not of the affine form"));
            }
        }
        Law::ExtCdsgForAffine => {
            if !ext::is_idempotent_extension(&e.base, &e.group, &e.g, &e.f, &e.theta) {
                return Ok(None);
            }
            let cdos = match cdos {
                Some(c) => c,
                None => displ::is_cdos(&e.algebra, &scope.limits)?,
            };
            if cdos {
                let fiber = e.fiber_affine()?;
                let d = Displacement::new(&fiber, &scope.limits)?;
                if !displ::connect_flags(&d)?.superconnected {
                    return fail("E has CDOs but Aff(A, 1−f, f, 0) is not superconnected".into());
                }
            }
        }
        _ => unreachable!("not an extension law"),
    }
    Ok(Some(None))
}

fn classify(r: std::result::Result<Option<Option<Witness>>, Error>, inst: &Instance) -> Outcome {
    match r {
        Ok(None) => Outcome::NotApplicable,
        Ok(Some(None)) => Outcome::Pass,
        Ok(Some(Some(w))) => Outcome::Fail(w),
        Err(e) if e.is_capacity() => Outcome::Skip,
        Err(e) => Outcome::Fail(Witness::new(inst, format!("error: {e}"))),
    }
}

fn galois_law(law: Law, g: &Galois<'_>, samples: &Samples) -> std::result::Result<Option<Option<Witness>>, Error> {
    let n_con = g.lat().congruences.len();
    if PER_CONGRUENCE.contains(&law) {
        for i in 0..n_con {
            if let Some(w) = per_congruence(law, g, i)? {
                return Ok(Some(Some(w)));
            }
        }
        return Ok(Some(None));
    }
    let check = match law {
        Law::LmltDecomposition => lmlt_decomposition(g),
        Law::Monotonicity => monotonicity(g),
        Law::AdmissibleOrbits => admissible_orbits(g),
        Law::LatticeCorrespondence => lattice_correspondence(g),
        Law::OrbitCayleyTransport => orbit_cayley_transport(g),
        Law::SharpCharacterization => sharp_characterization(g),
        Law::OrbitEqualsCayley => orbit_equals_cayley(g),
        Law::GaloisOrbits => galois_orbits(g),
        Law::GaloisCayley => galois_cayley(g),
        Law::QuotientClosure => quotient_closure(g),
        Law::CdsgVsCdos => cdsg_vs_cdos(g),
        Law::CdsgVsCdosCayley => {
            if !congr::is_cayley(g.q()) {
                return Ok(None);
            }
            cdsg_vs_cdos(g)
        }
        Law::SimpleCase => {
            if g.q().order() < 2 || n_con != 2 {
                return Ok(None);
            }
            simple_case(g)
        }
        Law::FromCpLemma => from_cp_lemma(g),
        Law::FromCpCorollary => from_cp_corollary(g),
        Law::CommutatorOracle => {
            if g.q().order() > 3 {
                return Ok(None);
            }
            commutator_oracle(g, &samples.commutator)
        }
        Law::NilpotentCdsg => return nilpotent_cdsg(g),
        _ => unreachable!("extension laws are dispatched separately"),
    };
    check.map(Some)
}

fn prepare<'a>(q: &'a LeftQuasigroup, limits: &Limits) -> std::result::Result<(QView<'a>, Partition, Vec<Quotient>), Error> {
    let view = QView::new(q, limits)?;
    let quotients = view
        .lat
        .congruences
        .iter()
        .map(|a| q.quotient(a))
        .collect::<std::result::Result<Vec<_>, _>>()?;
    Ok((view, congr::cayley_kernel(q), quotients))
}

impl<'a> Galois<'a> {
    fn new(inst: &'a Instance, limits: Limits, main: QView<'a>, lambda: Partition, quotients: &'a [Quotient]) -> Self {
        Galois {
            inst,
            limits,
            main,
            lambda,
            quotients,
            views: (0..quotients.len()).map(|_| OnceCell::new()).collect(),
            connect: OnceCell::new(),
        }
    }
}

fn run_instance(inst: &Instance, laws: &[Law], scope: &Scope, samples: &Samples) -> Vec<(Outcome, Duration)> {
    let start = Instant::now();
    let prepared = if laws.iter().any(|l| !l.is_extension_law()) {
        Some(prepare(&inst.algebra, &scope.limits))
    } else {
        None
    };
    let (galois, setup_error) = match prepared {
        Some(Ok((view, lambda, quotients))) => (Some((view, lambda, quotients)), None),
        Some(Err(e)) => (None, Some(e)),
        None => (None, None),
    };
    let (main, quotients) = match galois {
        Some((view, lambda, quotients)) => (Some((view, lambda)), quotients),
        None => (None, Vec::new()),
    };
    let galois = main.map(|(view, lambda)| Galois::new(inst, scope.limits, view, lambda, &quotients));
    let setup = start.elapsed() / laws.len().max(1) as u32;
    let cdos = galois.as_ref().map(|g| g.main.cdos);
    laws.iter()
        .map(|&law| {
            let t = Instant::now();
            let outcome = if law.is_extension_law() {
                match &inst.extension {
                    Some(e) => classify(extension_law(law, inst, e, scope, samples, cdos), inst),
                    None => Outcome::NotApplicable,
                }
            } else if let Some(g) = &galois {
                if law.is_quadratic() && g.lat().congruences.len() > scope.lattice_cap {
                    Outcome::Skip
                } else {
                    classify(galois_law(law, g, samples), inst)
                }
            } else {
                match &setup_error {
                    Some(e) if e.is_capacity() => Outcome::Skip,
                    Some(e) => Outcome::Fail(Witness::new(inst, format!("error: {e}"))),
                    None => Outcome::NotApplicable,
                }
            };
            (outcome, t.elapsed() + setup)
        })
        .collect()
}

/// Runs `laws` over `instances` and aggregates per law.
pub fn run(instances: &[Instance], scope: &Scope) -> Vec<HarnessResult> {
    let laws = scope.laws();
    let samples = Samples::new(scope);
    let per_instance: Vec<Vec<(Outcome, Duration)>> = instances
        .par_iter()
        .map(|inst| run_instance(inst, &laws, scope, &samples))
        .collect();
    let mut results: Vec<HarnessResult> = laws
        .iter()
        .map(|&law| HarnessResult {
            law,
            instances: 0,
            failures: Vec::new(),
            skipped: 0,
            elapsed: Duration::ZERO,
        })
        .collect();
    for outcomes in per_instance {
        for (res, (outcome, dt)) in results.iter_mut().zip(outcomes) {
            res.elapsed += dt;
            match outcome {
                Outcome::NotApplicable => {}
                Outcome::Pass => res.instances += 1,
                Outcome::Fail(w) => {
                    res.instances += 1;
                    res.failures.push(w);
                }
                Outcome::Skip => res.skipped += 1,
            }
        }
    }
    results
}

pub fn verify_theorems(scope: &Scope) -> Result<Vec<HarnessResult>> {
    Ok(run(&instances(scope)?, scope))
}

/// Runs the single-congruence laws at one `α`. A relation that is not a
/// congruence is rejected before any law is evaluated.
pub fn check_at_congruence(q: &LeftQuasigroup, alpha: &Partition, limits: &Limits) -> Result<Vec<(Law, Option<Witness>)>> {
    if alpha.len() != q.order() {
        return Err(CliError::Precondition(format!("relation on {} points for an algebra of order {}", alpha.len(), q.order())));
    }
    if !congr::is_congruence(q, alpha) {
        return Err(CliError::Precondition(format!("{alpha} is not a congruence")));
    }
    let inst = Instance {
        label: "input".into(),
        family: Family::Exhaustive,
        algebra: q.clone(),
        extension: None,
    };
    let (view, lambda, quotients) = prepare(&inst.algebra, limits).map_err(CliError::stage("lattices"))?;
    let g = Galois::new(&inst, *limits, view, lambda, &quotients);
    let i = g.index_of(alpha).ok_or_else(|| CliError::Precondition(format!("{alpha} missing from Con(Q)")))?;
    PER_CONGRUENCE
        .iter()
        .map(|&law| Ok((law, per_congruence(law, &g, i).map_err(CliError::stage("law evaluation"))?)))
        .collect()
}

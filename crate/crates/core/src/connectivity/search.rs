//! Counterexample search over small bitopological spaces.
//!
//! Seeded regression instances are evaluated first, then generated ones in a
//! fixed order. Evaluation may run in parallel but findings are collected in
//! generation order, so output depends only on `(target, mode, n, seed, budget)`.

use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use super::generate::{all_preorders, bitop_of, close, random_bitop, random_monotone_map, random_preorder, Preorder};
use super::{
    antisym_components, antisym_decision, brute_force_antisym, connected_subsets, formulations,
    is_antisym_connected, is_connected_subset, is_join_locally_connected, is_locally_antisym_connected, refines,
    symmetric_components, CombinedDigraph,
};
use crate::bitopology::{join, subspace, BitopSpace};
use crate::morphisms::{check_image_preservation, PointMap};
use crate::pointset::PointSet;

/// Default seed for reproducible runs.
pub const DEFAULT_SEED: u64 = 0x5eed_2024;
/// Largest carrier for exhaustive enumeration.
pub const EXHAUSTIVE_LIMIT: usize = 6;
const CHUNK: usize = 2048;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("unknown property `{0}`; known: {known}", known = Target::ALL.iter().map(|t| t.id()).collect::<Vec<_>>().join(", "))]
    UnknownProperty(String),
    #[error("unknown mode `{0}`; expected exhaustive or random")]
    UnknownMode(String),
    #[error("exhaustive mode supports n ≤ {EXHAUSTIVE_LIMIT}, got {0}")]
    ExhaustiveTooLarge(usize),
    #[error("random mode supports n ≤ 64, got {0}")]
    TooLarge(usize),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Target {
    AntisymOracle,
    Prop53Equivalence,
    Prop54Inclusion,
    Thm54Coincidence,
    Prop61Subspace,
    Prop61Union,
    Prop62Image,
    Cor61JoinLocal,
}

impl Target {
    pub const ALL: [Target; 8] = [
        Target::AntisymOracle,
        Target::Prop53Equivalence,
        Target::Prop54Inclusion,
        Target::Thm54Coincidence,
        Target::Prop61Subspace,
        Target::Prop61Union,
        Target::Prop62Image,
        Target::Cor61JoinLocal,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Target::AntisymOracle => "antisym_oracle",
            Target::Prop53Equivalence => "prop53_equivalence",
            Target::Prop54Inclusion => "prop54_inclusion",
            Target::Thm54Coincidence => "thm54_coincidence",
            Target::Prop61Subspace => "prop61_subspace",
            Target::Prop61Union => "prop61_union",
            Target::Prop62Image => "prop62_image",
            Target::Cor61JoinLocal => "cor61_join_local",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            Target::AntisymOracle => "SCC decision agrees with subset enumeration",
            Target::Prop53Equivalence => "the three separation formulations agree",
            Target::Prop54Inclusion => "symmetric components are antisymmetrically connected and refine antisymmetric ones",
            Target::Thm54Coincidence => "equal topologies give equal component partitions",
            Target::Prop61Subspace => "local antisymmetric connectedness passes to join-open subspaces",
            Target::Prop61Union => "intersecting connected subsets have a connected union",
            Target::Prop62Image => "specialization-preserving maps keep connected images",
            Target::Cor61JoinLocal => "antisymmetric connectedness implies join connectedness",
        }
    }

    /// Instances for this target use `τ⁺ = τ⁻`.
    fn diagonal(self) -> bool {
        self == Target::Thm54Coincidence
    }
}

impl fmt::Display for Target {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Target {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Target::ALL.into_iter().find(|t| t.id() == s).ok_or_else(|| SearchError::UnknownProperty(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exhaustive,
    Random,
}

impl FromStr for Mode {
    type Err = SearchError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "exhaustive" => Ok(Mode::Exhaustive),
            "random" => Ok(Mode::Random),
            other => Err(SearchError::UnknownMode(other.to_string())),
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Random => "random",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchConfig {
    pub target: Target,
    pub mode: Mode,
    pub n: usize,
    pub seed: u64,
    /// Cap on generated instances; seeded instances are extra.
    pub budget: usize,
    /// Worker threads; `None` uses every core.
    pub threads: Option<usize>,
}

impl SearchConfig {
    pub fn new(target: Target, mode: Mode, n: usize) -> Self {
        SearchConfig { target, mode, n, seed: DEFAULT_SEED, budget: 10_000, threads: None }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SearchInstance {
    Bitop(BitopSpace),
    Map { source: BitopSpace, target: BitopSpace, map: PointMap },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Finding {
    /// `seeded:<name>` or `generated:<index>`.
    pub origin: String,
    pub instance: SearchInstance,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchReport {
    pub target: Target,
    pub mode: Mode,
    pub n: usize,
    pub seed: u64,
    pub budget: usize,
    pub seeded_tested: usize,
    pub generated_tested: usize,
    pub findings: Vec<Finding>,
}

impl SearchReport {
    pub fn instances_tested(&self) -> usize {
        self.seeded_tested + self.generated_tested
    }

    pub fn failures(&self) -> usize {
        self.findings.len()
    }
}

/// The fixed regression spaces: indiscrete/two-block and the 3-point digraph space.
pub fn seeded_instances() -> Vec<(&'static str, BitopSpace)> {
    let two_block =
        BitopSpace::from_lists(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]], &[vec![0, 1], vec![0, 1], vec![2]])
            .expect("valid fixture");
    let three =
        BitopSpace::from_lists(&[vec![0, 1], vec![1], vec![0, 1, 2]], &[vec![0], vec![1], vec![1, 2]]).expect("valid fixture");
    vec![("two_block", two_block), ("three_point", three)]
}

fn rows(t: &crate::bitopology::AlexandrovTopology) -> Preorder {
    t.nbhds().iter().map(PointSet::to_mask).collect()
}

/// Quotient target making the assignment specialization-preserving.
fn induced_target(b: &BitopSpace, assignment: &[usize], m: usize) -> BitopSpace {
    let push = |src: &Preorder| {
        let mut out = vec![0u64; m];
        for (x, &row) in src.iter().enumerate() {
            for (y, &fy) in assignment.iter().enumerate() {
                if row >> y & 1 == 1 {
                    out[assignment[x]] |= 1 << fy;
                }
            }
        }
        close(&mut out);
        out
    };
    bitop_of(&push(&rows(b.forward())), &push(&rows(b.backward())))
}

fn seeded_for(target: Target) -> Vec<(String, SearchInstance)> {
    seeded_instances()
        .into_iter()
        .map(|(name, b)| {
            let inst = if target == Target::Prop62Image {
                let (assignment, m) = if name == "two_block" { (vec![0, 0, 1], 2) } else { ((0..b.len()).collect(), b.len()) };
                let tgt = induced_target(&b, &assignment, m);
                SearchInstance::Map { source: b, target: tgt, map: PointMap::new(assignment, m).expect("in range") }
            } else {
                SearchInstance::Bitop(b)
            };
            (format!("seeded:{name}"), inst)
        })
        .collect()
}

fn map_instance(rng: &mut ChaCha8Rng, f: &Preorder, b: &Preorder) -> SearchInstance {
    let (assignment, tf, tb) = random_monotone_map(rng, f, b);
    let m = tf.len();
    SearchInstance::Map {
        source: bitop_of(f, b),
        target: bitop_of(&tf, &tb),
        map: PointMap::new(assignment, m).expect("generator stays in range"),
    }
}

/// Lazily produces generated instances in a fixed order.
struct Generator {
    target: Target,
    mode: Mode,
    n: usize,
    seed: u64,
    budget: usize,
    produced: usize,
    preorders: Vec<Preorder>,
    rng: ChaCha8Rng,
}

impl Generator {
    fn new(cfg: &SearchConfig) -> Self {
        let preorders = if cfg.mode == Mode::Exhaustive { all_preorders(cfg.n) } else { Vec::new() };
        Generator {
            target: cfg.target,
            mode: cfg.mode,
            n: cfg.n,
            seed: cfg.seed,
            budget: cfg.budget,
            produced: 0,
            preorders,
            rng: ChaCha8Rng::seed_from_u64(cfg.seed),
        }
    }

    fn total(&self) -> usize {
        let m = self.preorders.len();
        let space = match self.mode {
            Mode::Random => usize::MAX,
            Mode::Exhaustive if self.target.diagonal() => m,
            Mode::Exhaustive => m.saturating_mul(m),
        };
        space.min(self.budget)
    }

    fn next_instance(&mut self) -> Option<SearchInstance> {
        if self.produced >= self.total() {
            return None;
        }
        let k = self.produced;
        self.produced += 1;
        let (f, b) = match self.mode {
            Mode::Exhaustive => {
                let m = self.preorders.len();
                if self.target.diagonal() {
                    (self.preorders[k].clone(), self.preorders[k].clone())
                } else {
                    (self.preorders[k / m].clone(), self.preorders[k % m].clone())
                }
            }
            Mode::Random if self.target.diagonal() => {
                let p = random_preorder(&mut self.rng, self.n);
                (p.clone(), p)
            }
            Mode::Random => random_bitop(&mut self.rng, self.n),
        };
        Some(if self.target == Target::Prop62Image {
            if self.mode == Mode::Exhaustive {
                let mut local = ChaCha8Rng::seed_from_u64(self.seed ^ (k as u64).wrapping_mul(0x9e37_79b9_7f4a_7c15));
                map_instance(&mut local, &f, &b)
            } else {
                map_instance(&mut self.rng, &f, &b)
            }
        } else {
            SearchInstance::Bitop(bitop_of(&f, &b))
        })
    }
}

fn partitions(p: &[Vec<usize>]) -> String {
    format!("{p:?}")
}

/// Failure description of `target` on `inst`, or `None` when the property holds.
pub fn evaluate(target: Target, inst: &SearchInstance) -> Option<String> {
    let b = match inst {
        SearchInstance::Bitop(b) => b,
        SearchInstance::Map { source, target: tgt, map } => {
            return match check_image_preservation(map, source, tgt) {
                Err(e) => Some(format!("precondition: {e}")),
                Ok(r) if !r.failures.is_empty() => {
                    let f = &r.failures[0];
                    Some(format!("image of connected {:?} is {:?}, not connected", f.subset, f.image))
                }
                Ok(r) if !r.holds() => Some("local connectedness lost in the image".to_string()),
                Ok(_) => None,
            };
        }
    };
    match target {
        Target::AntisymOracle => {
            let fast = antisym_decision(b);
            let slow = brute_force_antisym(b).ok()?;
            if fast.connected != slow {
                return Some(format!("digraph says {}, subset enumeration says {slow}", fast.connected));
            }
            if fast.connected != is_antisym_connected(b) {
                return Some("certificate search disagrees with strong connectivity".into());
            }
            match fast.certificate {
                Some(c) if !c.is_valid_for(b) => Some(format!("invalid certificate {:?} / {:?}", c.a, c.b)),
                _ => None,
            }
        }
        Target::Prop53Equivalence => {
            let f = formulations(b).ok()?;
            (!f.agree()).then(|| format!("formulations disagree: {f:?}"))
        }
        Target::Prop54Inclusion => {
            let sym = symmetric_components(b);
            let anti = antisym_components(b);
            if !refines(&sym, &anti) {
                return Some(format!("symmetric {} not inside antisymmetric {}", partitions(&sym), partitions(&anti)));
            }
            let g = CombinedDigraph::new(b);
            sym.iter()
                .find(|c| !is_connected_subset(&g, &PointSet::from_indices(b.len(), c.iter().copied())))
                .map(|c| format!("join-connected {c:?} is not antisymmetrically connected"))
        }
        Target::Thm54Coincidence => {
            if b.forward() != b.backward() {
                return None;
            }
            let (sym, anti) = (symmetric_components(b), antisym_components(b));
            (sym != anti).then(|| format!("symmetric {} vs antisymmetric {}", partitions(&sym), partitions(&anti)))
        }
        Target::Prop61Subspace => {
            if !is_locally_antisym_connected(b) {
                return None;
            }
            join_open_sets(b).into_iter().find_map(|u| {
                let sub = subspace(b, &u).ok()?;
                (!is_locally_antisym_connected(&sub)).then(|| format!("join-open subspace {u:?} is not locally connected"))
            })
        }
        Target::Prop61Union => {
            let g = CombinedDigraph::new(b);
            let sets = connected_subsets(b, 5);
            for (i, a) in sets.iter().enumerate() {
                for c in &sets[i + 1..] {
                    if a.intersects(c) && !is_connected_subset(&g, &a.union(c)) {
                        return Some(format!("{a:?} and {c:?} are connected and meet, union is not"));
                    }
                }
            }
            None
        }
        Target::Prop62Image => None,
        Target::Cor61JoinLocal => {
            let mut out = Vec::new();
            if is_antisym_connected(b) {
                let sym = symmetric_components(b);
                if sym.len() > 1 {
                    out.push(format!("antisymmetrically connected but join topology splits into {}", partitions(&sym)));
                }
            }
            if is_locally_antisym_connected(b) && !is_join_locally_connected(b) {
                out.push("locally antisymmetrically connected but not locally join-connected".into());
            }
            (!out.is_empty()).then(|| out.join("; "))
        }
    }
}

/// Every `τ∨`-open set for carriers up to 10 points, else unions of pairs of minimal neighborhoods.
fn join_open_sets(b: &BitopSpace) -> Vec<PointSet> {
    let j = join(b);
    let n = b.len();
    if n <= 10 {
        return j.open_sets(10).expect("within bound").into_iter().filter(|u| !u.is_empty()).collect();
    }
    let mut v: Vec<PointSet> = Vec::new();
    for x in 0..n {
        for y in x..n {
            v.push(j.nbhd(x).union(j.nbhd(y)));
        }
    }
    v.sort();
    v.dedup();
    v
}

/// Runs the search described by `cfg`.
pub fn search_counterexamples(cfg: &SearchConfig) -> Result<SearchReport, SearchError> {
    match cfg.mode {
        Mode::Exhaustive if cfg.n > EXHAUSTIVE_LIMIT => return Err(SearchError::ExhaustiveTooLarge(cfg.n)),
        Mode::Random if cfg.n > 64 => return Err(SearchError::TooLarge(cfg.n)),
        _ => {}
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        builder = builder.num_threads(t.max(1));
    }
    let pool = builder.build().map_err(|e| SearchError::ThreadPool(e.to_string()))?;

    let mut findings = Vec::new();
    let seeded = seeded_for(cfg.target);
    let seeded_tested = seeded.len();
    for (origin, inst) in seeded {
        if let Some(detail) = evaluate(cfg.target, &inst) {
            findings.push(Finding { origin, instance: inst, detail });
        }
    }

    let mut gen = Generator::new(cfg);
    let mut generated_tested = 0;
    loop {
        let chunk: Vec<SearchInstance> = std::iter::from_fn(|| gen.next_instance()).take(CHUNK).collect();
        if chunk.is_empty() {
            break;
        }
        let target = cfg.target;
        let results: Vec<Option<String>> = pool.install(|| chunk.par_iter().map(|i| evaluate(target, i)).collect());
        for (k, (inst, res)) in chunk.into_iter().zip(results).enumerate() {
            if let Some(detail) = res {
                findings.push(Finding { origin: format!("generated:{}", generated_tested + k), instance: inst, detail });
            }
        }
        generated_tested = gen.produced;
    }

    Ok(SearchReport {
        target: cfg.target,
        mode: cfg.mode,
        n: cfg.n,
        seed: cfg.seed,
        budget: cfg.budget,
        seeded_tested,
        generated_tested,
        findings,
    })
}

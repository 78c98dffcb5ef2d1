//! Antisymmetric, symmetric and local connectedness of finite bitopologies.
//!
//! # Digraph reduction
//!
//! Put an arc `x → y` whenever `y ∈ N⁺(x)` or `x ∈ N⁻(y)`. A set `A` is
//! `τ⁺`-open with `τ⁻`-open complement `B` exactly when no arc leaves `A`:
//! the first kind of arc leaving `A` breaks forward openness of `A`, and an
//! arc `a → b` of the second kind puts `a ∈ N⁻(b)` with `b ∈ B`, breaking
//! backward openness of `B`. Separations are therefore the proper nonempty
//! out-closed sets, the space is antisymmetrically connected iff the digraph
//! is strongly connected, and maximal connected subsets are the SCCs.
//!
//! [`brute_force_antisym`] checks the definition directly and is kept
//! independent of this reduction.

pub mod generate;
pub mod search;

use serde::Serialize;
use thiserror::Error;

use crate::bitopology::{join, subspace, AlexandrovTopology, BitopSpace, DEFAULT_OPEN_SET_BOUND};
use crate::gauges::QuasiPseudoMetric;
use crate::graph;
use crate::pointset::PointSet;
use crate::value::{format_rational, Rational};

/// Largest carrier accepted by [`brute_force_antisym`].
pub const BRUTE_FORCE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConnectivityError {
    #[error("brute force limited to {limit} points, carrier has {n}")]
    CarrierTooLarge { n: usize, limit: usize },
    #[error("epsilon {0} must be positive")]
    NonPositiveEpsilon(String),
}

/// Arc kinds of the combined digraph: forward (`y ∈ N⁺(x)`) and backward (`x ∈ N⁻(y)`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ArcKind {
    pub forward: bool,
    pub backward: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CombinedDigraph {
    out: Vec<PointSet>,
    adj: Vec<Vec<usize>>,
}

impl CombinedDigraph {
    pub fn new(b: &BitopSpace) -> Self {
        let n = b.len();
        let mut out: Vec<PointSet> = b.forward().nbhds().to_vec();
        for (y, ny) in b.backward().nbhds().iter().enumerate() {
            for x in ny.iter() {
                out[x].insert(y);
            }
        }
        let adj = out.iter().map(PointSet::to_vec).collect();
        debug_assert!((0..n).all(|x| out[x].contains(x)));
        CombinedDigraph { out, adj }
    }

    pub fn len(&self) -> usize {
        self.out.len()
    }

    pub fn is_empty(&self) -> bool {
        self.out.is_empty()
    }

    pub fn successors(&self, x: usize) -> &PointSet {
        &self.out[x]
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adj
    }

    /// Non-loop arcs with their provenance, in lexicographic order.
    pub fn arcs(&self, b: &BitopSpace) -> Vec<(usize, usize, ArcKind)> {
        let mut v = Vec::new();
        for (x, succ) in self.adj.iter().enumerate() {
            for &y in succ {
                if x != y {
                    let kind = ArcKind {
                        forward: b.forward().nbhd(x).contains(y),
                        backward: b.backward().nbhd(y).contains(x),
                    };
                    v.push((x, y, kind));
                }
            }
        }
        v
    }

    pub fn reach(&self, x: usize) -> PointSet {
        let seen = graph::reachable_from(&self.adj, x);
        PointSet::from_indices(self.len(), (0..self.len()).filter(|&i| seen[i]))
    }
}

/// `A` forward-open, `B = X \ A` backward-open, both nonempty.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SeparationCertificate {
    pub a: PointSet,
    pub b: PointSet,
}

impl SeparationCertificate {
    pub fn is_valid_for(&self, space: &BitopSpace) -> bool {
        !self.a.is_empty()
            && !self.b.is_empty()
            && self.a.is_disjoint(&self.b)
            && self.a.union(&self.b).is_full()
            && space.forward().is_open(&self.a)
            && space.backward().is_open(&self.b)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AntisymDecision {
    pub connected: bool,
    pub certificate: Option<SeparationCertificate>,
}

/// Strong connectivity of the combined digraph; on failure the certificate is
/// the out-closure of the lowest-indexed point whose closure is proper.
pub fn antisym_decision(b: &BitopSpace) -> AntisymDecision {
    let g = CombinedDigraph::new(b);
    for x in 0..g.len() {
        let a = g.reach(x);
        if !a.is_full() {
            let cert = SeparationCertificate { b: a.complement(), a };
            assert!(cert.is_valid_for(b), "out-closure failed certificate checks");
            return AntisymDecision { connected: false, certificate: Some(cert) };
        }
    }
    AntisymDecision { connected: true, certificate: None }
}

pub fn is_antisym_connected(b: &BitopSpace) -> bool {
    graph::is_strongly_connected(CombinedDigraph::new(b).adjacency())
}

/// Checks every nonempty proper subset against the definition.
pub fn brute_force_antisym(b: &BitopSpace) -> Result<bool, ConnectivityError> {
    let n = b.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(ConnectivityError::CarrierTooLarge { n, limit: BRUTE_FORCE_LIMIT });
    }
    if n <= 1 {
        return Ok(true);
    }
    let full = (1u64 << n) - 1;
    for mask in 1..full {
        let a = PointSet::from_mask(n, mask);
        let rest = PointSet::from_mask(n, full & !mask);
        if b.forward().is_open(&a) && b.backward().is_open(&rest) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// No nonempty disjoint `A ∈ τ⁺`, `B ∈ τ⁻` with `A ∪ B = X`, over enumerated open sets.
pub fn no_open_partition(b: &BitopSpace, bound: usize) -> Result<bool, crate::bitopology::BitopError> {
    let fwd = b.forward().open_sets(bound)?;
    let bwd = b.backward().open_sets(bound)?;
    let full = PointSet::full(b.len());
    Ok(!fwd.iter().filter(|a| !a.is_empty()).any(|a| {
        bwd.iter().any(|v| !v.is_empty() && a.is_disjoint(v) && a.union(v) == full)
    }))
}

/// For all nonempty `U ∈ τ⁺`, `V ∈ τ⁻`: `U ∩ V = ∅ ⇒ U ∪ V ≠ X`.
pub fn disjoint_opens_never_cover(b: &BitopSpace, bound: usize) -> Result<bool, crate::bitopology::BitopError> {
    let fwd = b.forward().open_sets(bound)?;
    let bwd = b.backward().open_sets(bound)?;
    let full = PointSet::full(b.len());
    for u in fwd.iter().filter(|u| !u.is_empty()) {
        for v in bwd.iter().filter(|v| !v.is_empty()) {
            if u.is_disjoint(v) && u.union(v) == full {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// The three equivalent formulations, evaluated independently.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormulationCheck {
    pub by_digraph: bool,
    pub by_subsets: bool,
    pub by_open_partition: bool,
    pub by_disjoint_opens: bool,
}

impl FormulationCheck {
    pub fn agree(&self) -> bool {
        self.by_digraph == self.by_subsets
            && self.by_subsets == self.by_open_partition
            && self.by_open_partition == self.by_disjoint_opens
    }
}

pub fn formulations(b: &BitopSpace) -> Result<FormulationCheck, ConnectivityError> {
    let too_large = |_| ConnectivityError::CarrierTooLarge { n: b.len(), limit: DEFAULT_OPEN_SET_BOUND };
    Ok(FormulationCheck {
        by_digraph: is_antisym_connected(b),
        by_subsets: brute_force_antisym(b)?,
        by_open_partition: no_open_partition(b, DEFAULT_OPEN_SET_BOUND).map_err(too_large)?,
        by_disjoint_opens: disjoint_opens_never_cover(b, DEFAULT_OPEN_SET_BOUND).map_err(too_large)?,
    })
}

/// SCCs of the combined digraph.
pub fn antisym_components(b: &BitopSpace) -> Vec<Vec<usize>> {
    graph::strongly_connected_components(CombinedDigraph::new(b).adjacency())
}

/// Connected components of `τ∨`, `x ~ y` iff `y ∈ N∨(x)` or `x ∈ N∨(y)`.
pub fn symmetric_components(b: &BitopSpace) -> Vec<Vec<usize>> {
    topology_components(&join(b))
}

/// Connected components of a single Alexandrov topology.
pub fn topology_components(t: &AlexandrovTopology) -> Vec<Vec<usize>> {
    let edges: Vec<(usize, usize)> =
        (0..t.len()).flat_map(|x| t.nbhd(x).iter().map(move |y| (x, y))).collect();
    graph::undirected_components(t.len(), &edges)
}

/// `s ⊆ t` as sorted index lists.
fn sorted_subset(s: &[usize], t: &[usize]) -> bool {
    s.iter().all(|x| t.binary_search(x).is_ok())
}

/// Each part of `fine` lies inside some part of `coarse`.
pub fn refines(fine: &[Vec<usize>], coarse: &[Vec<usize>]) -> bool {
    fine.iter().all(|c| coarse.iter().any(|d| sorted_subset(c, d)))
}

/// The trace on `s` is antisymmetrically connected: the induced subdigraph is strongly connected.
pub fn is_connected_subset(g: &CombinedDigraph, s: &PointSet) -> bool {
    let Some(start) = s.first() else { return true };
    let close = |forward: bool| {
        let mut seen = PointSet::singleton(g.len(), start);
        let mut stack = vec![start];
        while let Some(v) = stack.pop() {
            for w in s.iter() {
                let arc = if forward { g.successors(v).contains(w) } else { g.successors(w).contains(v) };
                if arc && !seen.contains(w) {
                    seen.insert(w);
                    stack.push(w);
                }
            }
        }
        seen == *s
    };
    close(true) && close(false)
}

/// Up to 64 nonempty subsets that are antisymmetrically connected: every one
/// for carriers of at most `exhaustive_up_to` points, otherwise SCCs, minimal
/// neighborhoods, reach sets and their pairwise unions filtered by connectivity.
pub fn connected_subsets(b: &BitopSpace, exhaustive_up_to: usize) -> Vec<PointSet> {
    let g = CombinedDigraph::new(b);
    let n = b.len();
    let mut cands: Vec<PointSet> = Vec::new();
    if n <= exhaustive_up_to.min(16) {
        cands.extend((1..1u64 << n).map(|m| PointSet::from_mask(n, m)));
    } else {
        let j = join(b);
        let rev = graph::reverse(g.adjacency());
        for x in 0..n {
            cands.push(PointSet::singleton(n, x));
            cands.push(b.forward().nbhd(x).clone());
            cands.push(b.backward().nbhd(x).clone());
            cands.push(j.nbhd(x).clone());
            cands.push(g.reach(x));
            let back = graph::reachable_from(&rev, x);
            cands.push(PointSet::from_indices(n, (0..n).filter(|&i| back[i])));
        }
        for c in antisym_components(b) {
            cands.push(PointSet::from_indices(n, c));
        }
        let base = cands.clone();
        for (i, a) in base.iter().enumerate() {
            for c in &base[i + 1..] {
                cands.push(a.union(c));
            }
        }
        cands.sort();
        cands.dedup();
    }
    cands.retain(|s| is_connected_subset(&g, s));
    if n > exhaustive_up_to {
        cands.truncate(64);
    }
    cands
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct LocalStatus {
    pub point: usize,
    pub passes: bool,
    /// `N∨(x)`, the least `τ∨`-neighborhood.
    pub neighborhood: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ComponentReport {
    pub symmetric_components: Vec<Vec<usize>>,
    pub antisymmetric_components: Vec<Vec<usize>>,
    pub local_status: Vec<LocalStatus>,
}

/// Point `x` passes iff the trace on `N∨(x)` is antisymmetrically connected.
///
/// `N∨(x)` is contained in every `τ∨`-neighborhood of `x`, so it is the only
/// candidate that needs checking.
pub fn local_report(b: &BitopSpace) -> Vec<LocalStatus> {
    let j = join(b);
    (0..b.len())
        .map(|x| {
            let nb = j.nbhd(x).clone();
            let sub = subspace(b, &nb).expect("neighborhood contains its point");
            LocalStatus { point: x, passes: is_antisym_connected(&sub), neighborhood: nb }
        })
        .collect()
}

pub fn is_locally_antisym_connected(b: &BitopSpace) -> bool {
    local_report(b).iter().all(|s| s.passes)
}

/// Every point's least `τ∨`-neighborhood is `τ∨`-connected.
pub fn is_join_locally_connected(b: &BitopSpace) -> bool {
    let j = join(b);
    (0..b.len()).all(|x| {
        let t = j.subspace(j.nbhd(x)).expect("neighborhood contains its point");
        topology_components(&t).len() == 1
    })
}

pub fn component_report(b: &BitopSpace) -> ComponentReport {
    let symmetric_components = symmetric_components(b);
    let antisymmetric_components = antisym_components(b);
    assert!(
        refines(&symmetric_components, &antisymmetric_components),
        "symmetric component escapes every antisymmetric component"
    );
    ComponentReport { symmetric_components, antisymmetric_components, local_status: local_report(b) }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ScaleReport {
    pub epsilon: String,
    pub antisymmetric: Vec<Vec<usize>>,
    pub symmetric: Vec<Vec<usize>>,
}

/// Components of the `ε`-scale digraph `d(x,y) < ε` and of its symmetric core.
///
/// A set closed under forward `ε`-balls whose complement is closed under
/// backward `ε`-balls is exactly a set with no arc `d(a,b) < ε` leaving it,
/// so the separation criterion at scale `ε` is out-closure in this digraph.
pub fn scale_connectivity(d: &QuasiPseudoMetric, eps: &Rational) -> Result<ScaleReport, ConnectivityError> {
    use num_traits::Signed;
    if !eps.is_positive() {
        return Err(ConnectivityError::NonPositiveEpsilon(format_rational(eps)));
    }
    let n = d.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|x| (0..n).filter(|&y| d.lt(x, y, eps)).collect()).collect();
    let antisymmetric = graph::strongly_connected_components(&adj);
    let edges: Vec<(usize, usize)> = (0..n)
        .flat_map(|x| (0..n).map(move |y| (x, y)))
        .filter(|&(x, y)| d.lt(x, y, eps) && d.lt(y, x, eps))
        .collect();
    let symmetric = graph::undirected_components(n, &edges);
    assert!(refines(&symmetric, &antisymmetric));
    Ok(ScaleReport { epsilon: format_rational(eps), antisymmetric, symmetric })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::{from_digraph, WeightedDigraph};
    use crate::value::{int, ExtNonNeg};

    pub(crate) fn two_block() -> BitopSpace {
        BitopSpace::from_lists(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]], &[vec![0, 1], vec![0, 1], vec![2]]).unwrap()
    }

    // a = 0, b = 1, c = 2.
    pub(crate) fn three_point() -> BitopSpace {
        BitopSpace::from_lists(&[vec![0, 1], vec![1], vec![0, 1, 2]], &[vec![0], vec![1], vec![1, 2]]).unwrap()
    }

    fn discrete(n: usize) -> BitopSpace {
        let t = AlexandrovTopology::discrete(crate::gauges::index_labels(n));
        BitopSpace::new(t.clone(), t).unwrap()
    }

    /// Hand check of the definition over all proper nonempty subsets.
    fn hand_separations(b: &BitopSpace) -> usize {
        let n = b.len();
        (1..(1u64 << n) - 1)
            .filter(|&m| {
                let a = PointSet::from_mask(n, m);
                b.forward().is_open(&a) && b.backward().is_open(&a.complement())
            })
            .count()
    }

    #[test]
    fn two_block_space() {
        let b = two_block();
        assert!(is_antisym_connected(&b));
        assert_eq!(brute_force_antisym(&b), Ok(true));
        assert_eq!(antisym_components(&b), vec![vec![0, 1, 2]]);
        assert_eq!(symmetric_components(&b), vec![vec![0, 1], vec![2]]);
        assert!(local_report(&b).iter().all(|s| s.passes));
        assert!(formulations(&b).unwrap().agree());
    }

    #[test]
    fn discrete_pair_is_separated() {
        let b = discrete(2);
        let dec = antisym_decision(&b);
        assert!(!dec.connected);
        let cert = dec.certificate.unwrap();
        assert_eq!(cert.a.to_vec(), vec![0]);
        assert_eq!(cert.b.to_vec(), vec![1]);
        assert!(cert.is_valid_for(&b));
        assert_eq!(antisym_components(&discrete(3)), vec![vec![0], vec![1], vec![2]]);
        assert_eq!(symmetric_components(&discrete(3)), vec![vec![0], vec![1], vec![2]]);
        assert!(local_report(&discrete(3)).iter().all(|s| s.passes));
    }

    #[test]
    fn three_point_space() {
        let b = three_point();
        assert_eq!(hand_separations(&b), 0);
        assert!(is_antisym_connected(&b));
        let arcs: Vec<(usize, usize)> = CombinedDigraph::new(&b).arcs(&b).iter().map(|&(x, y, _)| (x, y)).collect();
        assert_eq!(arcs, vec![(0, 1), (1, 2), (2, 0), (2, 1)]);
        assert_eq!(symmetric_components(&b), vec![vec![0], vec![1, 2]]);
        let local = local_report(&b);
        assert_eq!(local[2].neighborhood.to_vec(), vec![1, 2]);
        assert!(local.iter().all(|s| s.passes));
    }

    #[test]
    fn single_point_and_limits() {
        let b = discrete(1);
        assert!(is_antisym_connected(&b));
        assert_eq!(brute_force_antisym(&b), Ok(true));
        assert!(matches!(brute_force_antisym(&discrete(21)), Err(ConnectivityError::CarrierTooLarge { .. })));
    }

    #[test]
    fn scale_examples() {
        let one = ExtNonNeg::one();
        let g = WeightedDigraph::new(
            crate::gauges::index_labels(3),
            vec![(0, 1, one.clone()), (1, 2, one.clone()), (2, 0, one)],
        )
        .unwrap();
        let d = from_digraph(&g);
        // Reverse distances are 2, so ε = 3/2 keeps only the cycle arcs.
        let r = scale_connectivity(&d, &crate::value::frac(3, 2)).unwrap();
        assert_eq!(r.antisymmetric, vec![vec![0, 1, 2]]);
        assert_eq!(r.symmetric, vec![vec![0], vec![1], vec![2]]);
        let small = scale_connectivity(&d, &crate::value::frac(1, 2)).unwrap();
        assert_eq!(small.antisymmetric.len(), 3);
        assert_eq!(small.symmetric.len(), 3);
        assert!(matches!(scale_connectivity(&d, &int(0)), Err(ConnectivityError::NonPositiveEpsilon(_))));
    }

    #[test]
    fn dag_fixture_at_scale_ten() {
        let g = WeightedDigraph::new(
            crate::gauges::index_labels(3),
            vec![(0, 1, ExtNonNeg::from_int(1)), (1, 2, ExtNonNeg::from_int(2))],
        )
        .unwrap();
        let r = scale_connectivity(&from_digraph(&g), &int(10)).unwrap();
        assert_eq!(r.antisymmetric, vec![vec![0], vec![1], vec![2]]);
    }
}

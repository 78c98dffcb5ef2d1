//! Finite bitopological spaces in minimal-neighborhood (Alexandrov) form.

use serde::Serialize;
use thiserror::Error;

use crate::gauges::{NumericMode, QuasiPseudoMetric};
use crate::modular::QuasiModularFamily;
use crate::pointset::PointSet;

/// Default carrier bound for [`AlexandrovTopology::open_sets`].
pub const DEFAULT_OPEN_SET_BOUND: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BitopError {
    #[error("expected {expected} neighborhoods, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("point {x} is missing from its own neighborhood")]
    NotReflexive { x: usize },
    #[error("{y} ∈ N({x}) but N({y}) ⊄ N({x})")]
    Incoherent { x: usize, y: usize },
    #[error("forward and backward carriers differ")]
    CarrierMismatch,
    #[error("subspace must be nonempty")]
    EmptySubset,
    #[error("open set family is not a topology: {0}")]
    NotATopology(String),
    #[error("open-set enumeration limited to {bound} points, carrier has {n}")]
    TooLarge { n: usize, bound: usize },
}

/// A finite topology given by the minimal open neighborhood of each point.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct AlexandrovTopology {
    points: Vec<String>,
    min_nbhd: Vec<PointSet>,
}

impl AlexandrovTopology {
    pub fn new(points: Vec<String>, min_nbhd: Vec<PointSet>) -> Result<Self, BitopError> {
        let n = points.len();
        if min_nbhd.len() != n {
            return Err(BitopError::Dimension { expected: n, got: min_nbhd.len() });
        }
        if let Some(s) = min_nbhd.iter().find(|s| s.universe() != n) {
            return Err(BitopError::Dimension { expected: n, got: s.universe() });
        }
        let t = AlexandrovTopology { points, min_nbhd };
        t.check()?;
        Ok(t)
    }

    /// Builds from index lists, rejecting out-of-range entries.
    pub fn from_lists(points: Vec<String>, lists: &[Vec<usize>]) -> Result<Self, BitopError> {
        let n = points.len();
        if lists.len() != n {
            return Err(BitopError::Dimension { expected: n, got: lists.len() });
        }
        let mut sets = Vec::with_capacity(n);
        for l in lists {
            if let Some(&index) = l.iter().find(|&&i| i >= n) {
                return Err(BitopError::IndexOutOfRange { index, n });
            }
            sets.push(PointSet::from_indices(n, l.iter().copied()));
        }
        AlexandrovTopology::new(points, sets)
    }

    /// Minimal neighborhoods of a topology given by its open sets.
    pub fn from_open_sets(points: Vec<String>, opens: &[PointSet]) -> Result<Self, BitopError> {
        let n = points.len();
        if opens.iter().any(|o| o.universe() != n) {
            return Err(BitopError::NotATopology("open set over a different carrier".into()));
        }
        let has = |s: &PointSet| opens.contains(s);
        if !has(&PointSet::empty(n)) || !has(&PointSet::full(n)) {
            return Err(BitopError::NotATopology("must contain ∅ and the carrier".into()));
        }
        for a in opens {
            for b in opens {
                if !has(&a.union(b)) || !has(&a.intersection(b)) {
                    return Err(BitopError::NotATopology(format!(
                        "not closed under union/intersection of {a:?} and {b:?}"
                    )));
                }
            }
        }
        let min_nbhd = (0..n)
            .map(|x| {
                opens
                    .iter()
                    .filter(|o| o.contains(x))
                    .fold(PointSet::full(n), |acc, o| acc.intersection(o))
            })
            .collect();
        AlexandrovTopology::new(points, min_nbhd)
    }

    pub fn discrete(points: Vec<String>) -> Self {
        let n = points.len();
        let min_nbhd = (0..n).map(|x| PointSet::singleton(n, x)).collect();
        AlexandrovTopology { points, min_nbhd }
    }

    pub fn indiscrete(points: Vec<String>) -> Self {
        let n = points.len();
        AlexandrovTopology { points, min_nbhd: vec![PointSet::full(n); n] }
    }

    fn check(&self) -> Result<(), BitopError> {
        for (x, nx) in self.min_nbhd.iter().enumerate() {
            if !nx.contains(x) {
                return Err(BitopError::NotReflexive { x });
            }
            if let Some(y) = nx.iter().find(|&y| !self.min_nbhd[y].is_subset(nx)) {
                return Err(BitopError::Incoherent { x, y });
            }
        }
        Ok(())
    }

    fn checked(self) -> Self {
        if let Err(e) = self.check() {
            panic!("Alexandrov coherence lost: {e}");
        }
        self
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn nbhd(&self, x: usize) -> &PointSet {
        &self.min_nbhd[x]
    }

    pub fn nbhds(&self) -> &[PointSet] {
        &self.min_nbhd
    }

    /// `u` is open iff it contains the minimal neighborhood of each of its points.
    pub fn is_open(&self, u: &PointSet) -> bool {
        u.iter().all(|x| self.min_nbhd[x].is_subset(u))
    }

    /// Smallest open set containing `s`.
    pub fn open_hull(&self, s: &PointSet) -> PointSet {
        let mut out = PointSet::empty(self.len());
        for x in s.iter() {
            out.union_with(&self.min_nbhd[x]);
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.min_nbhd.iter().all(|s| s.len() == 1)
    }

    pub fn is_indiscrete(&self) -> bool {
        self.min_nbhd.iter().all(PointSet::is_full)
    }

    /// All open sets, ascending by bitmask, for carriers up to `bound` points.
    pub fn open_sets(&self, bound: usize) -> Result<Vec<PointSet>, BitopError> {
        let n = self.len();
        if n > bound || n > 63 {
            return Err(BitopError::TooLarge { n, bound: bound.min(63) });
        }
        Ok((0..1u64 << n)
            .map(|m| PointSet::from_mask(n, m))
            .filter(|u| self.is_open(u))
            .collect())
    }

    /// Trace on `s`, re-indexed to `0..|s|` in ascending order.
    pub fn subspace(&self, s: &PointSet) -> Result<AlexandrovTopology, BitopError> {
        if s.is_empty() {
            return Err(BitopError::EmptySubset);
        }
        let idx = s.to_vec();
        let m = idx.len();
        let points = idx.iter().map(|&i| self.points[i].clone()).collect();
        let min_nbhd = idx
            .iter()
            .map(|&x| PointSet::from_indices(m, (0..m).filter(|&k| self.min_nbhd[x].contains(idx[k]))))
            .collect();
        Ok(AlexandrovTopology { points, min_nbhd }.checked())
    }

    /// `N(x) ∩ N'(x)` pointwise: the join of two topologies on the same carrier.
    pub fn meet_nbhds(&self, other: &AlexandrovTopology) -> AlexandrovTopology {
        let min_nbhd = self.min_nbhd.iter().zip(&other.min_nbhd).map(|(a, b)| a.intersection(b)).collect();
        AlexandrovTopology { points: self.points.clone(), min_nbhd }.checked()
    }
}

/// A pair `(τ⁺, τ⁻)` of Alexandrov topologies on one carrier.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct BitopSpace {
    forward: AlexandrovTopology,
    backward: AlexandrovTopology,
}

impl BitopSpace {
    pub fn new(forward: AlexandrovTopology, backward: AlexandrovTopology) -> Result<Self, BitopError> {
        if forward.points != backward.points {
            return Err(BitopError::CarrierMismatch);
        }
        Ok(BitopSpace { forward, backward })
    }

    /// Builds from index lists for a carrier labelled `0..n`.
    pub fn from_lists(forward: &[Vec<usize>], backward: &[Vec<usize>]) -> Result<Self, BitopError> {
        let labels = crate::gauges::index_labels(forward.len());
        BitopSpace::new(
            AlexandrovTopology::from_lists(labels.clone(), forward)?,
            AlexandrovTopology::from_lists(labels, backward)?,
        )
    }

    pub fn forward(&self) -> &AlexandrovTopology {
        &self.forward
    }

    pub fn backward(&self) -> &AlexandrovTopology {
        &self.backward
    }

    pub fn len(&self) -> usize {
        self.forward.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forward.is_empty()
    }

    pub fn points(&self) -> &[String] {
        self.forward.points()
    }

    pub fn swap(&self) -> BitopSpace {
        BitopSpace { forward: self.backward.clone(), backward: self.forward.clone() }
    }
}

/// `N⁺(x) = {y : d(x,y) = 0}`, `N⁻(x) = {y : d(y,x) = 0}`.
///
/// In exact mode this is checked against the ball `B_ε(x)` at the least
/// positive distance, which is the minimal neighborhood of the ball topology.
pub fn specialization_bitop(d: &QuasiPseudoMetric) -> BitopSpace {
    let n = d.len();
    let fwd: Vec<PointSet> = (0..n).map(|x| PointSet::from_indices(n, (0..n).filter(|&y| d.is_zero(x, y)))).collect();
    let bwd: Vec<PointSet> = (0..n).map(|x| PointSet::from_indices(n, (0..n).filter(|&y| d.is_zero(y, x)))).collect();
    if *d.mode() == NumericMode::Exact {
        let eps = d.positive_spectrum().into_iter().next().unwrap_or_else(|| crate::value::int(1));
        for x in 0..n {
            let ball = PointSet::from_indices(n, (0..n).filter(|&y| d.lt(x, y, &eps)));
            assert_eq!(ball, fwd[x], "zero set and smallest ball disagree at {x}");
        }
    }
    let points = d.points().to_vec();
    BitopSpace {
        forward: AlexandrovTopology { points: points.clone(), min_nbhd: fwd }.checked(),
        backward: AlexandrovTopology { points, min_nbhd: bwd }.checked(),
    }
}

/// `N⁺(x) = {y : w_λ(x,y) = 0 for all λ > 0}`, backward analogue with `w_λ(y,x)`.
pub fn modular_bitop(f: &QuasiModularFamily) -> BitopSpace {
    let n = f.len();
    let zero = |x: usize, y: usize| f.gauge(x, y).is_identically_zero();
    let fwd = (0..n).map(|x| PointSet::from_indices(n, (0..n).filter(|&y| zero(x, y)))).collect();
    let bwd = (0..n).map(|x| PointSet::from_indices(n, (0..n).filter(|&y| zero(y, x)))).collect();
    let points = f.points().to_vec();
    BitopSpace {
        forward: AlexandrovTopology { points: points.clone(), min_nbhd: fwd }.checked(),
        backward: AlexandrovTopology { points, min_nbhd: bwd }.checked(),
    }
}

/// `τ∨` with `N∨(x) = N⁺(x) ∩ N⁻(x)`.
pub fn join(b: &BitopSpace) -> AlexandrovTopology {
    b.forward.meet_nbhds(&b.backward)
}

/// Trace bitopology on `s`, re-indexed in ascending order.
pub fn subspace(b: &BitopSpace, s: &PointSet) -> Result<BitopSpace, BitopError> {
    Ok(BitopSpace { forward: b.forward.subspace(s)?, backward: b.backward.subspace(s)? })
}

pub fn is_open(t: &AlexandrovTopology, u: &PointSet) -> bool {
    t.is_open(u)
}

/// No two distinct points are mutually within each other's `N⁺` and `N⁻`.
pub fn is_t0(b: &BitopSpace) -> bool {
    let n = b.len();
    let (f, k) = (&b.forward, &b.backward);
    (0..n).all(|x| {
        (x + 1..n).all(|y| {
            !(f.nbhd(x).contains(y) && f.nbhd(y).contains(x) && k.nbhd(x).contains(y) && k.nbhd(y).contains(x))
        })
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::validate_qpm;
    use crate::value::ExtNonNeg;

    pub(crate) fn two_block() -> BitopSpace {
        BitopSpace::from_lists(&[vec![0, 1, 2], vec![0, 1, 2], vec![0, 1, 2]], &[vec![0, 1], vec![0, 1], vec![2]]).unwrap()
    }

    fn qpm(rows: &[&[&str]]) -> QuasiPseudoMetric {
        validate_qpm(rows.iter().map(|r| r.iter().map(|s| s.parse::<ExtNonNeg>().unwrap()).collect()).collect())
            .unwrap()
    }

    #[test]
    fn coherence_is_enforced() {
        let l = crate::gauges::index_labels(2);
        assert_eq!(
            AlexandrovTopology::from_lists(l.clone(), &[vec![1], vec![1]]),
            Err(BitopError::NotReflexive { x: 0 })
        );
        // 1 ∈ N(0) = {0,1}, but N(1) = {0,1,2} is not inside.
        let l3 = crate::gauges::index_labels(3);
        assert_eq!(
            AlexandrovTopology::from_lists(l3, &[vec![0, 1], vec![0, 1, 2], vec![2]]),
            Err(BitopError::Incoherent { x: 0, y: 1 })
        );
        assert!(matches!(
            AlexandrovTopology::from_lists(l, &[vec![0, 5], vec![1]]),
            Err(BitopError::IndexOutOfRange { index: 5, .. })
        ));
    }

    #[test]
    fn open_sets_round_trip() {
        let b = two_block();
        let opens = b.backward().open_sets(DEFAULT_OPEN_SET_BOUND).unwrap();
        let as_vecs: Vec<Vec<usize>> = opens.iter().map(PointSet::to_vec).collect();
        assert_eq!(as_vecs, vec![vec![], vec![0, 1], vec![2], vec![0, 1, 2]]);
        assert!(b.backward().is_open(&PointSet::singleton(3, 2)));
        let back = AlexandrovTopology::from_open_sets(b.points().to_vec(), &opens).unwrap();
        assert_eq!(&back, b.backward());
        assert!(matches!(
            AlexandrovTopology::from_open_sets(b.points().to_vec(), &opens[1..]),
            Err(BitopError::NotATopology(_))
        ));
        assert!(matches!(b.forward().open_sets(2), Err(BitopError::TooLarge { .. })));
    }

    #[test]
    fn specialization_examples() {
        let metric = qpm(&[&["0", "1", "2"], &["1", "0", "1"], &["2", "1", "0"]]);
        let s = specialization_bitop(&metric);
        assert!(s.forward().is_discrete() && s.backward().is_discrete());

        let zero = qpm(&[&["0", "0"], &["0", "0"]]);
        let z = specialization_bitop(&zero);
        assert!(z.forward().is_indiscrete() && z.backward().is_indiscrete());
        assert!(!is_t0(&z));

        let ab = qpm(&[&["0", "0"], &["1", "0"]]);
        let s = specialization_bitop(&ab);
        assert_eq!(s.forward().nbhd(0).to_vec(), vec![0, 1]);
        assert_eq!(s.forward().nbhd(1).to_vec(), vec![1]);
        assert_eq!(s.backward().nbhd(0).to_vec(), vec![0]);
        assert_eq!(s.backward().nbhd(1).to_vec(), vec![0, 1]);
        assert!(is_t0(&s));
    }

    #[test]
    fn join_examples() {
        let b = two_block();
        let j = join(&b);
        let v: Vec<Vec<usize>> = j.nbhds().iter().map(PointSet::to_vec).collect();
        assert_eq!(v, vec![vec![0, 1], vec![0, 1], vec![2]]);
        assert_eq!(&j, b.backward());
        let same = BitopSpace::new(b.backward().clone(), b.backward().clone()).unwrap();
        assert_eq!(&join(&same), b.backward());
    }

    #[test]
    fn join_matches_symmetrized_specialization() {
        let d = qpm(&[&["0", "0", "1"], &["1", "0", "1"], &["0", "0", "0"]]);
        assert_eq!(join(&specialization_bitop(&d)), *specialization_bitop(&d.symmetrize()).forward());
    }

    #[test]
    fn subspace_examples() {
        let b = two_block();
        let s = subspace(&b, &PointSet::from_indices(3, [0, 1])).unwrap();
        assert!(s.forward().is_indiscrete() && s.backward().is_indiscrete());
        assert_eq!(subspace(&b, &PointSet::full(3)).unwrap(), b);
        let one = subspace(&b, &PointSet::singleton(3, 2)).unwrap();
        assert_eq!(one.len(), 1);
        assert!(one.forward().is_indiscrete());
        assert_eq!(subspace(&b, &PointSet::empty(3)), Err(BitopError::EmptySubset));
    }

    #[test]
    fn open_sets_form_a_lattice_for_all_small_topologies() {
        // Every reflexive coherent neighborhood assignment on 3 points.
        let n = 3;
        let mut count = 0;
        for code in 0..(1u64 << (n * n)) {
            let lists: Vec<PointSet> = (0..n).map(|x| PointSet::from_mask(n, (code >> (n * x)) & 0b111)).collect();
            let Ok(t) = AlexandrovTopology::new(crate::gauges::index_labels(n), lists) else { continue };
            count += 1;
            let opens = t.open_sets(DEFAULT_OPEN_SET_BOUND).unwrap();
            for a in &opens {
                for b in &opens {
                    assert!(opens.contains(&a.union(b)) && opens.contains(&a.intersection(b)));
                }
            }
        }
        // 29 topologies on a labelled 3-point set.
        assert_eq!(count, 29);
    }
}

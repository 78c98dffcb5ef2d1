//! Cauchy sequences, limits, Smyth completeness, precompactness and formal balls on finite spaces.
//!
//! On a finite carrier a sequence's Cauchy behaviour is fixed by the points it
//! visits infinitely often, so sequences are taken eventually periodic. With
//! `ε` below the least positive distance, `d(x_n, x_m) < ε` means
//! `d(x_n, x_m) = 0`, which turns every condition here into a zero-set test.

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::bitopology::join;
use crate::bitopology::specialization_bitop;
use crate::gauges::QuasiPseudoMetric;
use crate::graph;
use crate::pointset::PointSet;
use crate::value::{format_rational, int, ExtNonNeg, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompletionError {
    #[error("period must be nonempty")]
    EmptyPeriod,
    #[error("sequence index {index} out of range for {n} points")]
    IndexOutOfRange { index: usize, n: usize },
    #[error("sequence is not left K-Cauchy")]
    NotCauchy,
    #[error("radius {0} is negative")]
    NegativeRadius(String),
    #[error("threshold {0} must be positive")]
    NonPositiveThreshold(String),
}

/// `x_n = preperiod[n]` for `n < |preperiod|`, then `period` repeated.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct EventuallyPeriodicSeq {
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl EventuallyPeriodicSeq {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self, CompletionError> {
        if period.is_empty() {
            return Err(CompletionError::EmptyPeriod);
        }
        Ok(EventuallyPeriodicSeq { preperiod, period })
    }

    pub fn constant(x: usize) -> Self {
        EventuallyPeriodicSeq { preperiod: vec![], period: vec![x] }
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    pub fn term(&self, k: usize) -> usize {
        match self.preperiod.get(k) {
            Some(&x) => x,
            None => self.period[(k - self.preperiod.len()) % self.period.len()],
        }
    }

    pub fn check_range(&self, n: usize) -> Result<(), CompletionError> {
        match self.preperiod.iter().chain(&self.period).find(|&&i| i >= n) {
            Some(&index) => Err(CompletionError::IndexOutOfRange { index, n }),
            None => Ok(()),
        }
    }
}

/// Every ordered pair of period points is at forward distance 0.
///
/// Two unrollings of the period put every pair in both orders after any
/// starting index, so this is exactly the tail condition.
pub fn is_left_k_cauchy(d: &QuasiPseudoMetric, s: &EventuallyPeriodicSeq) -> Result<bool, CompletionError> {
    s.check_range(d.len())?;
    Ok(s.period.iter().all(|&p| s.period.iter().all(|&q| d.is_zero(p, q))))
}

/// `{x : d(p, x) = 0 for every period point p}`.
pub fn forward_limits(d: &QuasiPseudoMetric, s: &EventuallyPeriodicSeq) -> Result<PointSet, CompletionError> {
    if !is_left_k_cauchy(d, s)? {
        return Err(CompletionError::NotCauchy);
    }
    let n = d.len();
    Ok(PointSet::from_indices(n, (0..n).filter(|&x| s.period.iter().all(|&p| d.is_zero(p, x)))))
}

fn probe_epsilon(d: &QuasiPseudoMetric) -> Rational {
    d.positive_spectrum().into_iter().next().unwrap_or_else(|| int(1))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmythClass {
    pub class: Vec<usize>,
    pub forward_limits: PointSet,
    pub witness: usize,
    /// `d(p, witness) < ε` for every class point at the probe `ε`.
    pub ball_check: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SmythReport {
    pub conclusion: &'static str,
    pub probe_epsilon: String,
    pub classes: Vec<SmythClass>,
}

impl SmythReport {
    pub fn is_complete(&self) -> bool {
        self.conclusion == "complete"
    }
}

/// One class per strongly connected component of the zero-distance digraph.
///
/// Each class, cycled as a period, is the tail of a left K-Cauchy sequence;
/// every left K-Cauchy sequence has its period inside one class. A forward
/// limit is exhibited per class and confirmed as a limit for the topology of
/// the conjugate by the ball criterion.
pub fn smyth_report(d: &QuasiPseudoMetric) -> SmythReport {
    let n = d.len();
    let adj: Vec<Vec<usize>> = (0..n).map(|x| (0..n).filter(|&y| d.is_zero(x, y)).collect()).collect();
    let eps = probe_epsilon(d);
    let mut classes = Vec::new();
    for class in graph::strongly_connected_components(&adj) {
        assert!(
            class.iter().all(|&p| class.iter().all(|&q| d.is_zero(p, q))),
            "zero-distance cycle {class:?} is not a zero clique"
        );
        let seq = EventuallyPeriodicSeq::new(vec![], class.clone()).expect("class is nonempty");
        let limits = forward_limits(d, &seq).expect("zero clique is Cauchy");
        let witness = limits.first().expect("class points are limits");
        let ball_check = class.iter().all(|&p| d.lt(p, witness, &eps));
        classes.push(SmythClass { class, forward_limits: limits, witness, ball_check });
    }
    let ok = classes.iter().all(|c| c.ball_check && !c.forward_limits.is_empty());
    SmythReport {
        conclusion: if ok { "complete" } else { "incomplete" },
        probe_epsilon: format_rational(&eps),
        classes,
    }
}

fn ball_union(d: &QuasiPseudoMetric, centers: &[usize], eps: &Rational) -> PointSet {
    let n = d.len();
    PointSet::from_indices(n, (0..n).filter(|&y| centers.iter().any(|&x| d.lt(x, y, eps))))
}

/// First-fit cover: take the first uncovered point as a new center.
pub fn first_fit_cover(d: &QuasiPseudoMetric, eps: &Rational) -> Vec<usize> {
    let n = d.len();
    let mut covered = PointSet::empty(n);
    let mut centers = Vec::new();
    for x in 0..n {
        if !covered.contains(x) {
            centers.push(x);
            covered.union_with(&ball_union(d, &[x], eps));
        }
    }
    centers
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CoverEntry {
    pub epsilon: String,
    pub first_fit_size: usize,
    /// Smallest cover among the first-fit covers at this and every smaller threshold.
    pub cover: Vec<usize>,
    pub size: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PrecompactReport {
    /// Ascending by threshold.
    pub entries: Vec<CoverEntry>,
    pub monotone: bool,
    pub first_fit_monotone: bool,
}

/// Finite `ε`-covers `⋃_{x ∈ F} B⁺_ε(x) = X` for each threshold.
///
/// Raw first-fit sizes can rise with `ε`, since a larger first ball can leave
/// the later points scattered. A cover at a smaller threshold stays a cover at
/// a larger one, so each entry keeps the smallest cover seen so far.
pub fn precompact_report(d: &QuasiPseudoMetric, thresholds: &[Rational]) -> Result<PrecompactReport, CompletionError> {
    if let Some(t) = thresholds.iter().find(|t| !t.is_positive()) {
        return Err(CompletionError::NonPositiveThreshold(format_rational(t)));
    }
    let mut sorted = thresholds.to_vec();
    sorted.sort();
    sorted.dedup();
    let mut best: Option<Vec<usize>> = None;
    let mut entries = Vec::new();
    for eps in &sorted {
        let ff = first_fit_cover(d, eps);
        assert!(ball_union(d, &ff, eps).is_full());
        let keep = match best.take() {
            Some(b) if b.len() <= ff.len() => b,
            _ => ff.clone(),
        };
        assert!(ball_union(d, &keep, eps).is_full());
        entries.push(CoverEntry { epsilon: format_rational(eps), first_fit_size: ff.len(), size: keep.len(), cover: keep.clone() });
        best = Some(keep);
    }
    let monotone = entries.windows(2).all(|w| w[1].size <= w[0].size);
    let first_fit_monotone = entries.windows(2).all(|w| w[1].first_fit_size <= w[0].first_fit_size);
    Ok(PrecompactReport { entries, monotone, first_fit_monotone })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct JoinCompactnessReport {
    pub precompact: bool,
    pub smyth_complete: bool,
    /// A finite subcover of the least-neighborhood cover of `τ∨`.
    pub join_subcover: Vec<usize>,
    pub join_compact: bool,
    pub chain_holds: bool,
}

/// Hypotheses (precompact, Smyth complete) and conclusion (join compact) on one instance.
pub fn join_compactness_check(d: &QuasiPseudoMetric) -> JoinCompactnessReport {
    let mut thresholds = d.positive_spectrum();
    thresholds.push(int(1));
    let precompact = precompact_report(d, &thresholds).map(|r| r.entries.iter().all(|e| e.size <= d.len())).unwrap_or(false);
    let smyth_complete = smyth_report(d).is_complete();
    let j = join(&specialization_bitop(d));
    let n = d.len();
    let mut covered = PointSet::empty(n);
    let mut join_subcover = Vec::new();
    for x in 0..n {
        if !covered.contains(x) {
            join_subcover.push(x);
            covered.union_with(j.nbhd(x));
        }
    }
    let join_compact = covered.is_full();
    JoinCompactnessReport {
        precompact,
        smyth_complete,
        join_subcover,
        join_compact,
        chain_holds: !(precompact && smyth_complete) || join_compact,
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormalBall {
    pub point: usize,
    pub radius: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FormalBallPoset {
    pub balls: Vec<FormalBall>,
    /// `(i, j)` with `balls[i] ⊑ balls[j]`, `i ≠ j`.
    pub order: Vec<(usize, usize)>,
    /// Strict covering pairs of the order.
    pub hasse: Vec<(usize, usize)>,
    pub reflexive: bool,
    pub transitive: bool,
    pub antisymmetric_up_to_zero: bool,
}

/// `(x,r) ⊑ (y,s)` iff `d(x,y) ≤ r − s`, over `carrier × radii`.
pub fn formal_ball_poset(d: &QuasiPseudoMetric, radii: &[Rational]) -> Result<FormalBallPoset, CompletionError> {
    if let Some(r) = radii.iter().find(|r| r.is_negative()) {
        return Err(CompletionError::NegativeRadius(format_rational(r)));
    }
    let mut rs = radii.to_vec();
    rs.sort();
    rs.dedup();
    let n = d.len();
    let elems: Vec<(usize, Rational)> = (0..n).flat_map(|x| rs.iter().map(move |r| (x, r.clone()))).collect();
    let m = elems.len();
    let tol = d.mode().tolerance().cloned();
    let le = |a: &(usize, Rational), b: &(usize, Rational)| {
        let gap = &a.1 - &b.1;
        !gap.is_negative() && d.d(a.0, b.0).le_tol(&ExtNonNeg::Finite(gap), tol.as_ref())
    };
    let rel: Vec<Vec<bool>> = elems.iter().map(|a| elems.iter().map(|b| le(a, b)).collect()).collect();
    let reflexive = (0..m).all(|i| rel[i][i]);
    let transitive = (0..m).all(|i| (0..m).all(|j| !rel[i][j] || (0..m).all(|k| !rel[j][k] || rel[i][k])));
    let antisymmetric_up_to_zero = (0..m).all(|i| {
        (0..m).all(|j| {
            !(rel[i][j] && rel[j][i])
                || (elems[i].1 == elems[j].1 && d.is_zero(elems[i].0, elems[j].0) && d.is_zero(elems[j].0, elems[i].0))
        })
    });
    let strict = |i: usize, j: usize| i != j && rel[i][j] && !rel[j][i];
    let order = (0..m).flat_map(|i| (0..m).map(move |j| (i, j))).filter(|&(i, j)| i != j && rel[i][j]).collect();
    let hasse = (0..m)
        .flat_map(|i| (0..m).map(move |j| (i, j)))
        .filter(|&(i, j)| strict(i, j) && !(0..m).any(|k| strict(i, k) && strict(k, j)))
        .collect();
    let balls = elems.iter().map(|(x, r)| FormalBall { point: *x, radius: format_rational(r) }).collect();
    Ok(FormalBallPoset { balls, order, hasse, reflexive, transitive, antisymmetric_up_to_zero })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gauges::{from_digraph, validate_qpm, WeightedDigraph};
    use crate::value::frac;

    fn qpm(rows: &[&[&str]]) -> QuasiPseudoMetric {
        validate_qpm(rows.iter().map(|r| r.iter().map(|s| s.parse::<ExtNonNeg>().unwrap()).collect()).collect())
            .unwrap()
    }

    fn seq(pre: &[usize], per: &[usize]) -> EventuallyPeriodicSeq {
        EventuallyPeriodicSeq::new(pre.to_vec(), per.to_vec()).unwrap()
    }

    #[test]
    fn cauchy_examples() {
        let zero = qpm(&[&["0", "0"], &["0", "0"]]);
        assert!(is_left_k_cauchy(&zero, &seq(&[], &[0, 1])).unwrap());
        assert!(is_left_k_cauchy(&zero, &EventuallyPeriodicSeq::constant(1)).unwrap());
        let apart = qpm(&[&["0", "1"], &["0", "0"]]);
        assert!(!is_left_k_cauchy(&apart, &seq(&[], &[0, 1])).unwrap());
        assert!(is_left_k_cauchy(&apart, &seq(&[0, 1, 0], &[1])).unwrap());
        assert_eq!(EventuallyPeriodicSeq::new(vec![0], vec![]), Err(CompletionError::EmptyPeriod));
        assert!(matches!(
            is_left_k_cauchy(&apart, &seq(&[5], &[0])),
            Err(CompletionError::IndexOutOfRange { index: 5, .. })
        ));
        assert_eq!(seq(&[2], &[0, 1]).term(4), 1);
    }

    #[test]
    fn limit_examples() {
        // d(0,1) = d(1,0) = 0 and d(0,2) = d(1,2) = 0: the limits of (0,1,0,1,…) are {0,1,2}.
        let d = qpm(&[&["0", "0", "0"], &["0", "0", "0"], &["1", "1", "0"]]);
        assert_eq!(forward_limits(&d, &seq(&[], &[0, 1])).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(forward_limits(&d, &EventuallyPeriodicSeq::constant(2)).unwrap().to_vec(), vec![2]);
        let apart = qpm(&[&["0", "1"], &["1", "0"]]);
        assert_eq!(forward_limits(&apart, &seq(&[], &[0, 1])), Err(CompletionError::NotCauchy));
    }

    #[test]
    fn smyth_examples() {
        let discrete = qpm(&[&["0", "1"], &["1", "0"]]);
        let r = smyth_report(&discrete);
        assert!(r.is_complete());
        assert_eq!(r.classes.iter().map(|c| c.witness).collect::<Vec<_>>(), vec![0, 1]);
        let zero = qpm(&[&["0", "0"], &["0", "0"]]);
        let z = smyth_report(&zero);
        assert!(z.is_complete());
        assert_eq!(z.classes.len(), 1);
        assert!(z.classes[0].forward_limits.is_full());
    }

    #[test]
    fn cover_examples() {
        let one = ExtNonNeg::one();
        let g = WeightedDigraph::new(
            crate::gauges::index_labels(3),
            vec![(0, 1, one.clone()), (1, 2, one.clone()), (2, 0, one)],
        )
        .unwrap();
        let d = from_digraph(&g);
        let r = precompact_report(&d, &[frac(1, 2)]).unwrap();
        assert_eq!(r.entries[0].size, 3);
        let zero = qpm(&[&["0", "0"], &["0", "0"]]);
        assert_eq!(precompact_report(&zero, &[frac(1, 9)]).unwrap().entries[0].size, 1);
        assert!(matches!(precompact_report(&d, &[int(0)]), Err(CompletionError::NonPositiveThreshold(_))));
    }

    #[test]
    fn first_fit_is_not_monotone_but_the_report_is() {
        let d = qpm(&[
            &["0", "6/10", "1", "1"],
            &["6/10", "0", "4/10", "4/10"],
            &["1", "4/10", "0", "8/10"],
            &["1", "4/10", "8/10", "0"],
        ]);
        let r = precompact_report(&d, &[frac(1, 2), frac(7, 10)]).unwrap();
        assert_eq!(r.entries[0].first_fit_size, 2);
        assert_eq!(r.entries[1].first_fit_size, 3);
        assert!(!r.first_fit_monotone);
        assert!(r.monotone);
        assert_eq!(r.entries[1].cover, vec![0, 1]);
    }

    #[test]
    fn formal_ball_examples() {
        let d = qpm(&[&["0", "1"], &["1", "0"]]);
        let p = formal_ball_poset(&d, &[int(0), int(1), int(2)]).unwrap();
        assert!(p.reflexive && p.transitive && p.antisymmetric_up_to_zero);
        let idx = |x: usize, r: &str| p.balls.iter().position(|b| b.point == x && b.radius == r).unwrap();
        assert!(p.order.contains(&(idx(0, "2"), idx(1, "1"))));
        assert!(!p.order.contains(&(idx(0, "1"), idx(1, "1"))));
        assert!(p.order.iter().all(|&(i, _)| p.balls[i].radius != "0"));
        assert!(matches!(formal_ball_poset(&d, &[int(-1)]), Err(CompletionError::NegativeRadius(_))));
    }

    #[test]
    fn join_compactness_chain() {
        let d = qpm(&[&["0", "0", "2"], &["1", "0", "2"], &["inf", "inf", "0"]]);
        let r = join_compactness_check(&d);
        assert!(r.precompact && r.smyth_complete && r.join_compact && r.chain_holds);
        assert_eq!(r.join_subcover, vec![0, 1, 2]);
    }
}

//! Finite quasi-pseudometrics: validation, conjugation, symmetrization, and
//! construction from weighted digraphs and positive-part `ℓp` gauges.

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::graph;
use crate::value::{exact_pow, format_rational, rational_from_f64, ExtNonNeg, Rational};

/// Default absolute tolerance for float mode.
pub const DEFAULT_FLOAT_TOL: f64 = 1e-9;

/// How distances are computed and compared.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub enum NumericMode {
    #[default]
    Exact,
    /// Float evaluation; every comparison allows this absolute slack.
    Float { tol: Rational },
}

impl NumericMode {
    pub fn float(tol: f64) -> Self {
        NumericMode::Float {
            tol: rational_from_f64(tol).expect("finite tolerance"),
        }
    }

    pub fn tolerance(&self) -> Option<&Rational> {
        match self {
            NumericMode::Exact => None,
            NumericMode::Float { tol } => Some(tol),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            NumericMode::Exact => "exact".to_string(),
            NumericMode::Float { tol } => format!("float(tol={})", tol.to_f64().unwrap_or(f64::NAN)),
        }
    }
}

/// One violated axiom of a candidate quasi-pseudometric.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "code", rename_all = "snake_case")]
pub enum QpmViolation {
    NotSquare { row: usize, len: usize, expected: usize },
    NonZeroDiagonal { i: usize, value: ExtNonNeg },
    /// `dist[i][k] > dist[i][j] + dist[j][k]`.
    TriangleViolation { i: usize, j: usize, k: usize, lhs: ExtNonNeg, rhs: ExtNonNeg },
    LabelCount { labels: usize, size: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GaugeError {
    #[error("invalid quasi-pseudometric: {} violation(s), first: {:?}", .0.len(), .0.first())]
    Invalid(Vec<QpmViolation>),
    #[error("p-th root is irrational for exponent {0}; use float mode")]
    NonRepresentable(String),
    #[error("exponent p = {0} must be at least 1")]
    BadExponent(String),
    #[error("point {index} has length {len}, expected dimension {dimension}")]
    DimensionMismatch { index: usize, len: usize, dimension: usize },
    #[error("edge {edge} references vertex {vertex} outside 0..{n}")]
    UnknownVertex { edge: usize, vertex: usize, n: usize },
    #[error("edge {0} has infinite weight")]
    InfiniteEdge(usize),
    #[error("dimension must be positive")]
    ZeroDimension,
}

/// A validated finite quasi-pseudometric over labelled points.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiPseudoMetric {
    points: Vec<String>,
    dist: Vec<Vec<ExtNonNeg>>,
    mode: NumericMode,
}

/// Default labels `"0"`, `"1"`, ….
pub fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

/// Every axiom violation of `matrix`, exact or within `tol`.
pub fn qpm_violations(matrix: &[Vec<ExtNonNeg>], tol: Option<&Rational>) -> Vec<QpmViolation> {
    let n = matrix.len();
    let mut out = Vec::new();
    for (row, r) in matrix.iter().enumerate() {
        if r.len() != n {
            out.push(QpmViolation::NotSquare { row, len: r.len(), expected: n });
        }
    }
    if !out.is_empty() {
        return out;
    }
    for (i, row) in matrix.iter().enumerate() {
        if !row[i].is_zero_tol(tol) {
            out.push(QpmViolation::NonZeroDiagonal { i, value: row[i].clone() });
        }
    }
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let rhs = &matrix[i][j] + &matrix[j][k];
                if !matrix[i][k].le_tol(&rhs, tol) {
                    out.push(QpmViolation::TriangleViolation {
                        i,
                        j,
                        k,
                        lhs: matrix[i][k].clone(),
                        rhs,
                    });
                }
            }
        }
    }
    out
}

/// Validates a square matrix with index labels.
pub fn validate_qpm(matrix: Vec<Vec<ExtNonNeg>>) -> Result<QuasiPseudoMetric, GaugeError> {
    let labels = index_labels(matrix.len());
    QuasiPseudoMetric::new(labels, matrix, NumericMode::Exact)
}

impl QuasiPseudoMetric {
    pub fn new(points: Vec<String>, dist: Vec<Vec<ExtNonNeg>>, mode: NumericMode) -> Result<Self, GaugeError> {
        let mut violations = Vec::new();
        if points.len() != dist.len() {
            violations.push(QpmViolation::LabelCount { labels: points.len(), size: dist.len() });
        }
        violations.extend(qpm_violations(&dist, mode.tolerance()));
        if violations.is_empty() {
            Ok(QuasiPseudoMetric { points, dist, mode })
        } else {
            Err(GaugeError::Invalid(violations))
        }
    }

    pub fn len(&self) -> usize {
        self.dist.len()
    }

    pub fn is_empty(&self) -> bool {
        self.dist.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn matrix(&self) -> &[Vec<ExtNonNeg>] {
        &self.dist
    }

    pub fn mode(&self) -> &NumericMode {
        &self.mode
    }

    pub fn d(&self, i: usize, j: usize) -> &ExtNonNeg {
        &self.dist[i][j]
    }

    /// Zero test honouring the numeric mode.
    pub fn is_zero(&self, i: usize, j: usize) -> bool {
        self.dist[i][j].is_zero_tol(self.mode.tolerance())
    }

    /// `d(i,j) < eps` honouring the numeric mode.
    pub fn lt(&self, i: usize, j: usize, eps: &Rational) -> bool {
        let v = &self.dist[i][j];
        match (v, self.mode.tolerance()) {
            (ExtNonNeg::Infinite, _) => false,
            (ExtNonNeg::Finite(a), None) => a < eps,
            (ExtNonNeg::Finite(a), Some(t)) => a < &(eps + t),
        }
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.len();
        (0..n).all(|i| (0..n).all(|j| self.dist[i][j] == self.dist[j][i]))
    }

    /// Distinct positive finite distance values, ascending.
    pub fn positive_spectrum(&self) -> Vec<Rational> {
        let mut vals: Vec<Rational> = self
            .dist
            .iter()
            .flatten()
            .filter_map(|v| v.as_finite())
            .filter(|r| r.is_positive())
            .cloned()
            .collect();
        vals.sort();
        vals.dedup();
        vals
    }

    /// `d⁻¹(x,y) = d(y,x)`.
    pub fn conjugate(&self) -> QuasiPseudoMetric {
        let n = self.len();
        let dist = (0..n).map(|i| (0..n).map(|j| self.dist[j][i].clone()).collect()).collect();
        QuasiPseudoMetric { points: self.points.clone(), dist, mode: self.mode.clone() }
    }

    /// `dˢ(x,y) = max(d(x,y), d(y,x))`.
    pub fn symmetrize(&self) -> QuasiPseudoMetric {
        let n = self.len();
        let dist = (0..n)
            .map(|i| (0..n).map(|j| ExtNonNeg::max_of(&self.dist[i][j], &self.dist[j][i])).collect())
            .collect();
        QuasiPseudoMetric { points: self.points.clone(), dist, mode: self.mode.clone() }
    }

    /// Restriction to `subset` (indices in the given order).
    pub fn restrict(&self, subset: &[usize]) -> QuasiPseudoMetric {
        let dist = subset
            .iter()
            .map(|&i| subset.iter().map(|&j| self.dist[i][j].clone()).collect())
            .collect();
        let points = subset.iter().map(|&i| self.points[i].clone()).collect();
        QuasiPseudoMetric { points, dist, mode: self.mode.clone() }
    }
}

pub fn conjugate(d: &QuasiPseudoMetric) -> QuasiPseudoMetric {
    d.conjugate()
}

pub fn symmetrize(d: &QuasiPseudoMetric) -> QuasiPseudoMetric {
    d.symmetrize()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub from: usize,
    pub to: usize,
    pub weight: Rational,
}

/// Weighted digraph with nonnegative finite weights; parallel edges allowed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WeightedDigraph {
    vertices: Vec<String>,
    edges: Vec<Edge>,
}

impl WeightedDigraph {
    pub fn new(vertices: Vec<String>, edges: Vec<(usize, usize, ExtNonNeg)>) -> Result<Self, GaugeError> {
        let n = vertices.len();
        let mut out = Vec::with_capacity(edges.len());
        for (idx, (from, to, w)) in edges.into_iter().enumerate() {
            for v in [from, to] {
                if v >= n {
                    return Err(GaugeError::UnknownVertex { edge: idx, vertex: v, n });
                }
            }
            let weight = match w {
                ExtNonNeg::Finite(r) => r,
                ExtNonNeg::Infinite => return Err(GaugeError::InfiniteEdge(idx)),
            };
            out.push(Edge { from, to, weight });
        }
        Ok(WeightedDigraph { vertices, edges: out })
    }

    pub fn vertices(&self) -> &[String] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    /// Plain reachability adjacency (ignores weights).
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.vertices.len()];
        for e in &self.edges {
            adj[e.from].push(e.to);
        }
        adj
    }
}

/// Shortest-path quasi-metric of a digraph via min-plus closure.
///
/// Parallel edges collapse to their minimum, unreachable pairs are `∞`, and
/// the diagonal is pinned to zero.
pub fn from_digraph(g: &WeightedDigraph) -> QuasiPseudoMetric {
    let n = g.vertices.len();
    let mut dist = vec![vec![ExtNonNeg::Infinite; n]; n];
    for e in &g.edges {
        let w = ExtNonNeg::Finite(e.weight.clone());
        if w < dist[e.from][e.to] {
            dist[e.from][e.to] = w;
        }
    }
    for (i, row) in dist.iter_mut().enumerate() {
        row[i] = ExtNonNeg::zero();
    }
    for k in 0..n {
        for i in 0..n {
            if dist[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = &dist[i][k] + &dist[k][j];
                if via < dist[i][j] {
                    dist[i][j] = via;
                }
            }
        }
    }
    let d = QuasiPseudoMetric { points: g.vertices.clone(), dist, mode: NumericMode::Exact };
    debug_assert!(qpm_violations(d.matrix(), None).is_empty());
    d
}

/// Finite sample of a positive-part `ℓp` asymmetric normed space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AsymNormSample {
    dimension: usize,
    p: Rational,
    points: Vec<Vec<Rational>>,
    labels: Vec<String>,
}

impl AsymNormSample {
    pub fn new(dimension: usize, p: Rational, points: Vec<Vec<Rational>>) -> Result<Self, GaugeError> {
        let labels = index_labels(points.len());
        Self::with_labels(dimension, p, points, labels)
    }

    pub fn with_labels(
        dimension: usize,
        p: Rational,
        points: Vec<Vec<Rational>>,
        labels: Vec<String>,
    ) -> Result<Self, GaugeError> {
        if dimension == 0 {
            return Err(GaugeError::ZeroDimension);
        }
        if p < Rational::one() {
            return Err(GaugeError::BadExponent(format_rational(&p)));
        }
        for (index, v) in points.iter().enumerate() {
            if v.len() != dimension {
                return Err(GaugeError::DimensionMismatch { index, len: v.len(), dimension });
            }
        }
        if labels.len() != points.len() {
            return Err(GaugeError::Invalid(vec![QpmViolation::LabelCount {
                labels: labels.len(),
                size: points.len(),
            }]));
        }
        Ok(AsymNormSample { dimension, p, points, labels })
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn p(&self) -> &Rational {
        &self.p
    }

    pub fn points(&self) -> &[Vec<Rational>] {
        &self.points
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// The same sample under exponent 1.
    pub fn with_p_one(&self) -> AsymNormSample {
        AsymNormSample { p: Rational::one(), ..self.clone() }
    }
}

fn positive_parts(v: &[Rational]) -> impl Iterator<Item = Rational> + '_ {
    v.iter().map(|x| if x.is_positive() { x.clone() } else { Rational::zero() })
}

/// `‖v‖p⁺ = (Σ max(v_k, 0)^p)^(1/p)` in exact arithmetic, if rational.
pub fn forward_gauge_exact(v: &[Rational], p: &Rational) -> Option<Rational> {
    if p.is_one() {
        return Some(positive_parts(v).sum());
    }
    let mut sum = Rational::zero();
    for x in positive_parts(v) {
        sum += exact_pow(&x, p)?;
    }
    exact_pow(&sum, &p.recip())
}

/// `‖v‖p⁺` in floating point.
pub fn forward_gauge_f64(v: &[Rational], p: f64) -> f64 {
    let s: f64 = positive_parts(v).map(|x| x.to_f64().unwrap_or(f64::INFINITY).powf(p)).sum();
    s.powf(1.0 / p)
}

/// `‖v‖p⁻ = ‖−v‖p⁺`.
pub fn backward_gauge_exact(v: &[Rational], p: &Rational) -> Option<Rational> {
    let neg: Vec<Rational> = v.iter().map(|x| -x).collect();
    forward_gauge_exact(&neg, p)
}

/// Classical `ℓ1` norm.
pub fn l1_norm(v: &[Rational]) -> Rational {
    v.iter().map(|x| x.abs()).sum()
}

/// `dist[i][j] = ‖v_j − v_i‖p⁺`.
///
/// Exact when every entry is rational; otherwise `NonRepresentable` in exact
/// mode. In float mode entries are rounded `f64` values converted exactly to
/// rationals and the mode's tolerance governs every later comparison.
pub fn from_asym_norm(s: &AsymNormSample, mode: &NumericMode) -> Result<QuasiPseudoMetric, GaugeError> {
    let n = s.points.len();
    let p_f = s.p.to_f64().unwrap_or(f64::INFINITY);
    let mut dist = vec![vec![ExtNonNeg::zero(); n]; n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let diff: Vec<Rational> = s.points[j].iter().zip(&s.points[i]).map(|(b, a)| b - a).collect();
            let value = match (forward_gauge_exact(&diff, &s.p), mode) {
                (Some(r), _) => r,
                (None, NumericMode::Exact) => return Err(GaugeError::NonRepresentable(format_rational(&s.p))),
                (None, NumericMode::Float { .. }) => {
                    rational_from_f64(forward_gauge_f64(&diff, p_f)).unwrap_or_else(Rational::zero)
                }
            };
            dist[i][j] = ExtNonNeg::Finite(value);
        }
    }
    QuasiPseudoMetric::new(s.labels.clone(), dist, mode.clone())
}

/// Comparison of the symmetrized gauge with the classical norm on one pair.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetrizationRecord {
    pub i: usize,
    pub j: usize,
    pub forward: ExtNonNeg,
    pub backward: ExtNonNeg,
    pub max_gauge: ExtNonNeg,
    pub l1_norm: ExtNonNeg,
    pub sum_gauge: ExtNonNeg,
    /// `max(‖·‖⁺, ‖·‖⁻) = ‖·‖₁` on this pair.
    pub max_equals_norm: bool,
}

/// Checks `max(d⁺, d⁻) ≤ ℓp ≤ 2^(1/p) · max(d⁺, d⁻)` over every pair.
///
/// For `p = 1` the upper bound is recorded in its sharp form `ℓ1 = d⁺ + d⁻`.
/// The equality `max(d⁺, d⁻) = ℓp` holds only when one of the parts vanishes,
/// so the report counts pairs where it fails instead of asserting it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetrizationReport {
    pub p: String,
    pub lower_constant: String,
    pub upper_constant: String,
    pub bounds_hold: bool,
    pub equality_failures: usize,
    pub records: Vec<SymmetrizationRecord>,
}

/// Exact `p = 1` symmetrization report for every ordered pair with `i < j`.
pub fn symmetrization_report(s: &AsymNormSample) -> SymmetrizationReport {
    let one = Rational::one();
    let n = s.points.len();
    let mut records = Vec::new();
    let mut bounds_hold = true;
    for i in 0..n {
        for j in (i + 1)..n {
            let diff: Vec<Rational> = s.points[j].iter().zip(&s.points[i]).map(|(b, a)| b - a).collect();
            let fwd = forward_gauge_exact(&diff, &one).expect("p = 1 is exact");
            let bwd = backward_gauge_exact(&diff, &one).expect("p = 1 is exact");
            let l1 = l1_norm(&diff);
            let mx = fwd.clone().max(bwd.clone());
            let sum = &fwd + &bwd;
            bounds_hold &= mx <= l1 && l1 <= sum;
            records.push(SymmetrizationRecord {
                i,
                j,
                forward: ExtNonNeg::Finite(fwd),
                backward: ExtNonNeg::Finite(bwd),
                max_equals_norm: mx == l1,
                max_gauge: ExtNonNeg::Finite(mx),
                l1_norm: ExtNonNeg::Finite(l1),
                sum_gauge: ExtNonNeg::Finite(sum),
            });
        }
    }
    SymmetrizationReport {
        p: "1".to_string(),
        lower_constant: "1".to_string(),
        upper_constant: "2".to_string(),
        bounds_hold,
        equality_failures: records.iter().filter(|r| !r.max_equals_norm).count(),
        records,
    }
}

/// `d(i,j) < ∞` for every pair of the metric.
pub fn all_finite(d: &QuasiPseudoMetric) -> bool {
    d.matrix().iter().flatten().all(ExtNonNeg::is_finite)
}

/// Digraph strong connectivity via plain reachability, independent of the closure.
pub fn digraph_strongly_connected(g: &WeightedDigraph) -> bool {
    graph::is_strongly_connected(&g.adjacency())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::value::{frac, int};

    fn m(rows: &[&[&str]]) -> Vec<Vec<ExtNonNeg>> {
        rows.iter().map(|r| r.iter().map(|s| s.parse().unwrap()).collect()).collect()
    }

    #[test]
    fn validate_examples() {
        assert!(validate_qpm(m(&[&["0", "1"], &["1", "0"]])).is_ok());
        assert!(validate_qpm(m(&[&["0", "1"], &["inf", "0"]])).is_ok());
        let err = validate_qpm(m(&[&["0", "1", "5"], &["inf", "0", "1"], &["inf", "inf", "0"]])).unwrap_err();
        let GaugeError::Invalid(v) = err else { panic!() };
        assert_eq!(
            v,
            vec![QpmViolation::TriangleViolation {
                i: 0,
                j: 1,
                k: 2,
                lhs: ExtNonNeg::from_int(5),
                rhs: ExtNonNeg::from_int(2)
            }]
        );
    }

    #[test]
    fn diagonal_and_shape_errors() {
        let GaugeError::Invalid(v) = validate_qpm(m(&[&["1", "1"], &["1", "0"]])).unwrap_err() else { panic!() };
        assert!(v.contains(&QpmViolation::NonZeroDiagonal { i: 0, value: ExtNonNeg::one() }));
        let GaugeError::Invalid(v) = validate_qpm(m(&[&["0", "1"], &["0"]])).unwrap_err() else { panic!() };
        assert!(matches!(v[0], QpmViolation::NotSquare { row: 1, .. }));
    }

    #[test]
    fn conjugate_and_symmetrize() {
        let d = validate_qpm(m(&[&["0", "1"], &["inf", "0"]])).unwrap();
        assert_eq!(d.conjugate().matrix(), m(&[&["0", "inf"], &["1", "0"]]).as_slice());
        assert_eq!(d.conjugate().conjugate(), d);
        assert_eq!(d.symmetrize().matrix(), m(&[&["0", "inf"], &["inf", "0"]]).as_slice());
        let e = validate_qpm(m(&[&["0", "1"], &["2", "0"]])).unwrap();
        assert_eq!(e.symmetrize().matrix(), m(&[&["0", "2"], &["2", "0"]]).as_slice());
        let s = e.symmetrize();
        assert_eq!(s.conjugate(), s);
        assert_eq!(s.symmetrize(), s);
    }

    #[test]
    fn digraph_examples() {
        let g = WeightedDigraph::new(
            index_labels(3),
            vec![(0, 1, ExtNonNeg::from_int(1)), (1, 2, ExtNonNeg::from_int(2))],
        )
        .unwrap();
        let d = from_digraph(&g);
        assert_eq!(d.d(0, 2), &ExtNonNeg::from_int(3));
        assert_eq!(d.d(2, 0), &ExtNonNeg::Infinite);

        let empty = from_digraph(&WeightedDigraph::new(index_labels(3), vec![]).unwrap());
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(empty.d(i, j).is_zero(), i == j);
                assert_eq!(empty.d(i, j).is_infinite(), i != j);
            }
        }

        let cyc = from_digraph(
            &WeightedDigraph::new(
                index_labels(2),
                vec![(0, 1, ExtNonNeg::from_int(1)), (1, 0, ExtNonNeg::from_int(1))],
            )
            .unwrap(),
        );
        assert_eq!(cyc.d(0, 1), &ExtNonNeg::one());
        assert_eq!(cyc.d(1, 0), &ExtNonNeg::one());
    }

    #[test]
    fn parallel_edges_and_self_loops() {
        let g = WeightedDigraph::new(
            index_labels(2),
            vec![
                (0, 1, ExtNonNeg::from_int(4)),
                (0, 1, ExtNonNeg::ratio(1, 2)),
                (0, 0, ExtNonNeg::from_int(3)),
            ],
        )
        .unwrap();
        let d = from_digraph(&g);
        assert_eq!(d.d(0, 1), &ExtNonNeg::ratio(1, 2));
        assert!(d.d(0, 0).is_zero());
        assert!(matches!(
            WeightedDigraph::new(index_labels(1), vec![(0, 1, ExtNonNeg::one())]),
            Err(GaugeError::UnknownVertex { .. })
        ));
        assert!(matches!(
            WeightedDigraph::new(index_labels(1), vec![(0, 0, ExtNonNeg::Infinite)]),
            Err(GaugeError::InfiniteEdge(0))
        ));
    }

    #[test]
    fn asym_norm_examples() {
        let s = AsymNormSample::new(2, int(1), vec![vec![int(0), int(0)], vec![int(2), int(-1)]]).unwrap();
        let d = from_asym_norm(&s, &NumericMode::Exact).unwrap();
        assert_eq!(d.d(0, 1), &ExtNonNeg::from_int(2));
        assert_eq!(d.conjugate().d(0, 1), &ExtNonNeg::from_int(1));

        let same = AsymNormSample::new(1, int(1), vec![vec![frac(3, 2)], vec![frac(3, 2)]]).unwrap();
        assert!(from_asym_norm(&same, &NumericMode::Exact).unwrap().d(0, 1).is_zero());

        let x = AsymNormSample::new(2, int(1), vec![vec![int(0), int(0)], vec![int(1), int(-1)]]).unwrap();
        let rep = symmetrization_report(&x);
        let r = &rep.records[0];
        assert_eq!(r.forward, ExtNonNeg::one());
        assert_eq!(r.backward, ExtNonNeg::one());
        assert_eq!(r.max_gauge, ExtNonNeg::one());
        assert_eq!(r.l1_norm, ExtNonNeg::from_int(2));
        assert!(!r.max_equals_norm);
        assert!(rep.bounds_hold);
        assert_eq!(rep.equality_failures, 1);
    }

    #[test]
    fn asym_norm_exact_and_float_modes() {
        // (3,4) has positive-part l2 gauge 5, exact.
        let s = AsymNormSample::new(2, int(2), vec![vec![int(0), int(0)], vec![int(3), int(4)]]).unwrap();
        let d = from_asym_norm(&s, &NumericMode::Exact).unwrap();
        assert_eq!(d.d(0, 1), &ExtNonNeg::from_int(5));
        assert!(d.d(1, 0).is_zero());

        let irr = AsymNormSample::new(2, int(2), vec![vec![int(0), int(0)], vec![int(1), int(1)]]).unwrap();
        assert!(matches!(from_asym_norm(&irr, &NumericMode::Exact), Err(GaugeError::NonRepresentable(_))));
        let f = from_asym_norm(&irr, &NumericMode::float(DEFAULT_FLOAT_TOL)).unwrap();
        assert!((f.d(0, 1).to_f64() - 2f64.sqrt()).abs() < 1e-12);

        assert!(matches!(
            AsymNormSample::new(1, frac(1, 2), vec![]),
            Err(GaugeError::BadExponent(_))
        ));
        assert!(matches!(
            AsymNormSample::new(2, int(1), vec![vec![int(1)]]),
            Err(GaugeError::DimensionMismatch { .. })
        ));
    }
}

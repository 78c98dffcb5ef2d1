//! Quasi-modular pseudometric families `w_λ(x,y)` over a finite carrier.
//!
//! Gauges come in three exact kinds: right-continuous step functions,
//! homogeneous `c/λ`, and power `c/λ^p`. Validation of the modular triangle
//! inequality is exhaustive when every gauge involved is a step function
//! (values change only at breakpoints) or when all three gauges of a triple
//! are homogeneous (closed form); mixed or power triples fall back to the grid.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::gauges::{GaugeError, NumericMode, QuasiPseudoMetric};
use crate::pointset::PointSet;
use crate::value::{exact_root, format_rational, ExtNonNeg, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModularError {
    #[error("validation grid is empty")]
    EmptyGrid,
    #[error("scale {0} is not positive")]
    NonPositiveScale(String),
    #[error("parameter {name} = {value} must be positive")]
    NonPositiveParameter { name: &'static str, value: String },
    #[error("step gauge: {0}")]
    MalformedStep(String),
    #[error("gauge matrix is not square or does not match the {0} labels")]
    Shape(usize),
    #[error("cannot merge {0} with {1} without a grid")]
    KindMismatch(&'static str, &'static str),
    #[error("c^(1/p) is irrational for c = {c}, p = {p}")]
    NonRepresentable { c: String, p: u32 },
    #[error("Luxemburg gauge is not a quasi-pseudometric: {0}")]
    Gauge(#[from] GaugeError),
    #[error("Orlicz family: {0}")]
    Orlicz(String),
}

/// Scale profile `λ ↦ w_λ(x,y)` for one ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ScaleGauge {
    /// `values[0]` on `(0, b₀)`, `values[k]` on `[b_{k-1}, b_k)`, last value on `[b_last, ∞)`.
    Step { breakpoints: Vec<Rational>, values: Vec<ExtNonNeg> },
    /// `c / λ`.
    Homogeneous { c: ExtNonNeg },
    /// `c / λ^p`, integer `p ≥ 1`.
    Power { c: ExtNonNeg, p: u32 },
}

impl ScaleGauge {
    pub fn step(breakpoints: Vec<Rational>, values: Vec<ExtNonNeg>) -> Result<Self, ModularError> {
        if values.len() != breakpoints.len() + 1 {
            return Err(ModularError::MalformedStep(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len() + 1,
                values.len()
            )));
        }
        if let Some(b) = breakpoints.iter().find(|b| !b.is_positive()) {
            return Err(ModularError::MalformedStep(format!("breakpoint {} is not positive", format_rational(b))));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModularError::MalformedStep("breakpoints must be strictly increasing".into()));
        }
        Ok(ScaleGauge::Step { breakpoints, values })
    }

    pub fn constant(v: ExtNonNeg) -> Self {
        ScaleGauge::Step { breakpoints: vec![], values: vec![v] }
    }

    pub fn zero() -> Self {
        ScaleGauge::constant(ExtNonNeg::zero())
    }

    pub fn homogeneous(c: ExtNonNeg) -> Self {
        ScaleGauge::Homogeneous { c }
    }

    pub fn power(c: ExtNonNeg, p: u32) -> Result<Self, ModularError> {
        if p == 0 {
            return Err(ModularError::NonPositiveParameter { name: "p", value: "0".into() });
        }
        Ok(ScaleGauge::Power { c, p })
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ScaleGauge::Step { .. } => "step",
            ScaleGauge::Homogeneous { .. } => "homogeneous",
            ScaleGauge::Power { .. } => "power",
        }
    }

    /// `w_λ` for `λ > 0`.
    pub fn eval(&self, lambda: &Rational) -> ExtNonNeg {
        debug_assert!(lambda.is_positive());
        match self {
            ScaleGauge::Step { breakpoints, values } => {
                let k = breakpoints.partition_point(|b| b <= lambda);
                values[k].clone()
            }
            ScaleGauge::Homogeneous { c } => c.div_scale(lambda),
            ScaleGauge::Power { c, p } => c.div_scale(&num_traits::pow(lambda.clone(), *p as usize)),
        }
    }

    /// `lim_{λ↓0} w_λ`.
    pub fn at_zero_plus(&self) -> ExtNonNeg {
        match self {
            ScaleGauge::Step { values, .. } => values[0].clone(),
            ScaleGauge::Homogeneous { c } | ScaleGauge::Power { c, .. } => {
                if c.is_zero() {
                    ExtNonNeg::zero()
                } else {
                    ExtNonNeg::Infinite
                }
            }
        }
    }

    /// Evaluation at a [`Scale`], using the zero limit for `0⁺`.
    fn eval_scale(&self, s: &Scale) -> ExtNonNeg {
        match s {
            Scale::ZeroPlus => self.at_zero_plus(),
            Scale::At(l) => self.eval(l),
        }
    }

    /// `w_λ = 0` for every `λ > 0`.
    pub fn is_identically_zero(&self) -> bool {
        match self {
            ScaleGauge::Step { values, .. } => values.iter().all(ExtNonNeg::is_zero),
            ScaleGauge::Homogeneous { c } | ScaleGauge::Power { c, .. } => c.is_zero(),
        }
    }

    /// Left endpoint of the first cell where a step gauge increases.
    pub fn monotonicity_violation(&self) -> Option<Rational> {
        match self {
            ScaleGauge::Step { breakpoints, values } => values
                .windows(2)
                .position(|w| w[1] > w[0])
                .map(|k| breakpoints[k].clone()),
            _ => None,
        }
    }

    /// `inf{λ > 0 : w_λ ≤ 1}` with `inf ∅ = ∞`.
    pub fn luxemburg(&self) -> Result<ExtNonNeg, ModularError> {
        let one = ExtNonNeg::one();
        match self {
            ScaleGauge::Step { breakpoints, values } => match values.iter().position(|v| v <= &one) {
                Some(0) => Ok(ExtNonNeg::zero()),
                Some(k) => Ok(ExtNonNeg::Finite(breakpoints[k - 1].clone())),
                None => Ok(ExtNonNeg::Infinite),
            },
            ScaleGauge::Homogeneous { c } => Ok(c.clone()),
            ScaleGauge::Power { c, p } => match c {
                ExtNonNeg::Infinite => Ok(ExtNonNeg::Infinite),
                ExtNonNeg::Finite(r) => exact_root(r, *p).map(ExtNonNeg::Finite).ok_or_else(|| {
                    ModularError::NonRepresentable { c: format_rational(r), p: *p }
                }),
            },
        }
    }

    /// Step form sampled at the grid points; continuous kinds are exact there.
    pub fn to_step(&self, grid: &[Rational]) -> ScaleGauge {
        match self {
            ScaleGauge::Step { .. } => self.clone(),
            _ => {
                let mut pts: Vec<Rational> = grid.iter().filter(|g| g.is_positive()).cloned().collect();
                pts.sort();
                pts.dedup();
                let mut values = vec![self.at_zero_plus()];
                values.extend(pts.iter().map(|g| self.eval(g)));
                ScaleGauge::Step { breakpoints: pts, values }
            }
        }
    }

    fn breakpoints(&self) -> &[Rational] {
        match self {
            ScaleGauge::Step { breakpoints, .. } => breakpoints,
            _ => &[],
        }
    }

    /// Pointwise maximum. Exact for matching kinds; otherwise needs a grid.
    pub fn pointwise_max(&self, other: &ScaleGauge, grid: Option<&[Rational]>) -> Result<ScaleGauge, ModularError> {
        if self == other {
            return Ok(self.clone());
        }
        match (self, other) {
            (ScaleGauge::Homogeneous { c: a }, ScaleGauge::Homogeneous { c: b }) => {
                Ok(ScaleGauge::Homogeneous { c: ExtNonNeg::max_of(a, b) })
            }
            (ScaleGauge::Power { c: a, p }, ScaleGauge::Power { c: b, p: q }) if p == q => {
                Ok(ScaleGauge::Power { c: ExtNonNeg::max_of(a, b), p: *p })
            }
            (ScaleGauge::Step { .. }, ScaleGauge::Step { .. }) => Ok(merge_steps(self, other)),
            _ => {
                let g = grid.ok_or(ModularError::KindMismatch(self.kind_name(), other.kind_name()))?;
                Ok(merge_steps(&self.to_step(g), &other.to_step(g)))
            }
        }
    }
}

fn merge_steps(a: &ScaleGauge, b: &ScaleGauge) -> ScaleGauge {
    let mut bps: Vec<Rational> = a.breakpoints().iter().chain(b.breakpoints()).cloned().collect();
    bps.sort();
    bps.dedup();
    let mut values = vec![ExtNonNeg::max_of(&a.at_zero_plus(), &b.at_zero_plus())];
    values.extend(bps.iter().map(|l| ExtNonNeg::max_of(&a.eval(l), &b.eval(l))));
    ScaleGauge::Step { breakpoints: bps, values }
}

/// A scale candidate: a positive rational or the right limit at zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Scale {
    ZeroPlus,
    At(Rational),
}

impl Scale {
    fn plus(&self, other: &Scale) -> Scale {
        match (self, other) {
            (Scale::ZeroPlus, s) | (s, Scale::ZeroPlus) => s.clone(),
            (Scale::At(a), Scale::At(b)) => Scale::At(a + b),
        }
    }
}

impl fmt::Display for Scale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scale::ZeroPlus => f.write_str("0+"),
            Scale::At(r) => f.write_str(&format_rational(r)),
        }
    }
}

impl Serialize for Scale {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

/// A finite quasi-modular family: one scale gauge per ordered pair.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuasiModularFamily {
    points: Vec<String>,
    gauge: Vec<Vec<ScaleGauge>>,
}

impl QuasiModularFamily {
    pub fn new(points: Vec<String>, gauge: Vec<Vec<ScaleGauge>>) -> Result<Self, ModularError> {
        let n = points.len();
        if gauge.len() != n || gauge.iter().any(|r| r.len() != n) {
            return Err(ModularError::Shape(n));
        }
        Ok(QuasiModularFamily { points, gauge })
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

    pub fn gauge(&self, i: usize, j: usize) -> &ScaleGauge {
        &self.gauge[i][j]
    }

    pub fn gauges(&self) -> &[Vec<ScaleGauge>] {
        &self.gauge
    }

    /// `w_λ(i,j)`.
    pub fn w(&self, lambda: &Rational, i: usize, j: usize) -> ExtNonNeg {
        self.gauge[i][j].eval(lambda)
    }

    /// Every step breakpoint in the family, ascending and deduplicated.
    pub fn breakpoints(&self) -> Vec<Rational> {
        let mut out: Vec<Rational> = self.gauge.iter().flatten().flat_map(|g| g.breakpoints().to_vec()).collect();
        out.sort();
        out.dedup();
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Qm2Violation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub lambda: Scale,
    pub mu: Scale,
    /// `w_{λ+μ}(i,k)`.
    pub lhs: ExtNonNeg,
    /// `w_λ(i,j) + w_μ(j,k)`.
    pub rhs: ExtNonNeg,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Qm3Violation {
    pub i: usize,
    pub j: usize,
    /// Breakpoint at which the gauge increases.
    pub at: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// Points whose self-gauge is not identically zero.
    pub qm1: Vec<usize>,
    pub qm2: Vec<Qm2Violation>,
    pub qm3: Vec<Qm3Violation>,
    /// Every triple decided exactly (step or all-homogeneous); otherwise grid-sampled.
    pub exhaustive: bool,
    pub grid: Vec<String>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.qm1.is_empty() && self.qm2.is_empty() && self.qm3.is_empty()
    }
}

fn scale_candidates(g: &ScaleGauge, grid: &[Rational]) -> Vec<Scale> {
    match g {
        ScaleGauge::Step { breakpoints, .. } => std::iter::once(Scale::ZeroPlus)
            .chain(breakpoints.iter().cloned().map(Scale::At))
            .collect(),
        _ => grid.iter().cloned().map(Scale::At).collect(),
    }
}

/// `c_xz ≤ (√a + √b)²`, the exact form of the modular triangle inequality for `c/λ`.
fn homogeneous_triangle(a: &ExtNonNeg, b: &ExtNonNeg, c: &ExtNonNeg) -> bool {
    let (a, b) = match (a, b) {
        (ExtNonNeg::Finite(a), ExtNonNeg::Finite(b)) => (a, b),
        _ => return true,
    };
    let c = match c {
        ExtNonNeg::Finite(c) => c,
        ExtNonNeg::Infinite => return false,
    };
    let gap = c - a - b;
    if !gap.is_positive() {
        return true;
    }
    &gap * &gap <= Rational::from_integer(4.into()) * a * b
}

/// Checks QM1 to QM3 over the grid (augmented with every breakpoint).
pub fn validate_family(f: &QuasiModularFamily, grid: &[Rational]) -> Result<ValidationReport, ModularError> {
    if grid.is_empty() {
        return Err(ModularError::EmptyGrid);
    }
    if let Some(bad) = grid.iter().find(|g| !g.is_positive()) {
        return Err(ModularError::NonPositiveScale(format_rational(bad)));
    }
    let mut full_grid: Vec<Rational> = grid.iter().cloned().chain(f.breakpoints()).collect();
    full_grid.sort();
    full_grid.dedup();

    let n = f.len();
    let qm1 = (0..n).filter(|&i| !f.gauge[i][i].is_identically_zero()).collect();
    let mut qm3 = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if let Some(at) = f.gauge[i][j].monotonicity_violation() {
                qm3.push(Qm3Violation { i, j, at: format_rational(&at) });
            }
        }
    }
    let mut qm2 = Vec::new();
    let mut exhaustive = true;
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                let (gij, gjk, gik) = (&f.gauge[i][j], &f.gauge[j][k], &f.gauge[i][k]);
                if let (
                    ScaleGauge::Homogeneous { c: a },
                    ScaleGauge::Homogeneous { c: b },
                    ScaleGauge::Homogeneous { c },
                ) = (gij, gjk, gik)
                {
                    if !homogeneous_triangle(a, b, c) {
                        // Witness at the minimizing split λ:μ = √a:√b, reported on the unit scale.
                        qm2.push(Qm2Violation {
                            i,
                            j,
                            k,
                            lambda: Scale::At(Rational::one()),
                            mu: Scale::At(Rational::one()),
                            lhs: c.clone(),
                            rhs: a + b,
                        });
                    }
                    continue;
                }
                let step_only = matches!(gij, ScaleGauge::Step { .. }) && matches!(gjk, ScaleGauge::Step { .. });
                exhaustive &= step_only;
                for lambda in scale_candidates(gij, &full_grid) {
                    let left = gij.eval_scale(&lambda);
                    if left.is_infinite() {
                        continue;
                    }
                    for mu in scale_candidates(gjk, &full_grid) {
                        let rhs = &left + &gjk.eval_scale(&mu);
                        let lhs = gik.eval_scale(&lambda.plus(&mu));
                        if lhs > rhs {
                            qm2.push(Qm2Violation { i, j, k, lambda: lambda.clone(), mu, lhs, rhs });
                        }
                    }
                }
            }
        }
    }
    Ok(ValidationReport {
        qm1,
        qm2,
        qm3,
        exhaustive,
        grid: full_grid.iter().map(format_rational).collect(),
    })
}

/// `d⁺(i,j) = inf{λ > 0 : w_λ(i,j) ≤ 1}`.
///
/// The output is validated as a quasi-pseudometric; the triangle inequality
/// can fail for families that satisfy QM1 to QM3 without being convex, and that
/// failure is returned rather than hidden.
pub fn luxemburg_gauge(f: &QuasiModularFamily) -> Result<QuasiPseudoMetric, ModularError> {
    let dist = f
        .gauge
        .iter()
        .map(|row| row.iter().map(ScaleGauge::luxemburg).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    Ok(QuasiPseudoMetric::new(f.points.clone(), dist, NumericMode::Exact)?)
}

/// `w⁻_λ(x,y) = w_λ(y,x)`.
pub fn conjugate_family(f: &QuasiModularFamily) -> QuasiModularFamily {
    let n = f.len();
    let gauge = (0..n).map(|i| (0..n).map(|j| f.gauge[j][i].clone()).collect()).collect();
    QuasiModularFamily { points: f.points.clone(), gauge }
}

/// `w^sym_λ(x,y) = max(w_λ(x,y), w_λ(y,x))`.
pub fn symmetrize_family(f: &QuasiModularFamily, grid: Option<&[Rational]>) -> Result<QuasiModularFamily, ModularError> {
    let n = f.len();
    let mut gauge = Vec::with_capacity(n);
    for i in 0..n {
        let mut row = Vec::with_capacity(n);
        for j in 0..n {
            row.push(f.gauge[i][j].pointwise_max(&f.gauge[j][i], grid)?);
        }
        gauge.push(row);
    }
    Ok(QuasiModularFamily { points: f.points.clone(), gauge })
}

/// Pointwise gap `d_{w^sym}(x,y) − max(d⁺(x,y), d⁻(x,y))`, measured, never asserted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SymmetrizationGap {
    pub i: usize,
    pub j: usize,
    pub of_symmetrized_family: ExtNonNeg,
    pub max_of_one_sided: ExtNonNeg,
    pub equal: bool,
}

pub fn symmetrization_gaps(f: &QuasiModularFamily, grid: Option<&[Rational]>) -> Result<Vec<SymmetrizationGap>, ModularError> {
    let sym = symmetrize_family(f, grid)?;
    let n = f.len();
    let mut out = Vec::new();
    for i in 0..n {
        for j in 0..n {
            let s = sym.gauge[i][j].luxemburg()?;
            let m = ExtNonNeg::max_of(&f.gauge[i][j].luxemburg()?, &f.gauge[j][i].luxemburg()?);
            out.push(SymmetrizationGap { i, j, equal: s == m, of_symmetrized_family: s, max_of_one_sided: m });
        }
    }
    Ok(out)
}

fn positive(name: &'static str, v: &Rational) -> Result<(), ModularError> {
    if v.is_positive() {
        Ok(())
    } else {
        Err(ModularError::NonPositiveParameter { name, value: format_rational(v) })
    }
}

/// `B⁺(x;λ,ε) = {y : w_λ(x,y) < ε}` and `B⁻(x;λ,ε) = {y : w_λ(y,x) < ε}`.
pub fn modular_balls(
    f: &QuasiModularFamily,
    x: usize,
    lambda: &Rational,
    eps: &Rational,
) -> Result<(PointSet, PointSet), ModularError> {
    positive("lambda", lambda)?;
    positive("epsilon", eps)?;
    let n = f.len();
    let e = ExtNonNeg::Finite(eps.clone());
    let fwd = PointSet::from_indices(n, (0..n).filter(|&y| f.w(lambda, x, y) < e));
    let bwd = PointSet::from_indices(n, (0..n).filter(|&y| f.w(lambda, y, x) < e));
    Ok((fwd, bwd))
}

/// A binary relation on `0..n`, stored by sections `R(x) = {y : (x,y) ∈ R}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Relation {
    sections: Vec<PointSet>,
}

impl Relation {
    pub fn from_sections(sections: Vec<PointSet>) -> Self {
        Relation { sections }
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        self.sections[x].contains(y)
    }

    pub fn section(&self, x: usize) -> &PointSet {
        &self.sections[x]
    }

    pub fn inverse(&self) -> Relation {
        let n = self.sections.len();
        let sections = (0..n)
            .map(|y| PointSet::from_indices(n, (0..n).filter(|&x| self.contains(x, y))))
            .collect();
        Relation { sections }
    }

    pub fn contains_diagonal(&self) -> bool {
        self.sections.iter().enumerate().all(|(x, s)| s.contains(x))
    }
}

/// `E⁺_{r,λ} = {(x,y) : w_λ(x,y) < r}` and its inverse `E⁻_{r,λ}`.
pub fn entourages(f: &QuasiModularFamily, r: &Rational, lambda: &Rational) -> Result<(Relation, Relation), ModularError> {
    positive("r", r)?;
    positive("lambda", lambda)?;
    let n = f.len();
    let bound = ExtNonNeg::Finite(r.clone());
    let fwd = Relation::from_sections(
        (0..n)
            .map(|x| PointSet::from_indices(n, (0..n).filter(|&y| f.w(lambda, x, y) < bound)))
            .collect(),
    );
    let bwd = fwd.inverse();
    for x in 0..n {
        let (ball, _) = modular_balls(f, x, lambda, r)?;
        assert_eq!(fwd.section(x), &ball, "section identity E⁺(x) = B⁺(x) broken at {x}");
    }
    Ok((fwd, bwd))
}

/// One-variable convex piece of an Orlicz function on `t ≥ 0`.
///
/// Slope `slopes[k]` applies on `[breaks[k], breaks[k+1])`; `breaks[0] = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PiecewiseLinear {
    breaks: Vec<Rational>,
    slopes: Vec<Rational>,
}

impl PiecewiseLinear {
    pub fn new(breaks: Vec<Rational>, slopes: Vec<Rational>) -> Result<Self, ModularError> {
        if breaks.is_empty() || breaks.len() != slopes.len() {
            return Err(ModularError::Orlicz("branch needs equally many breaks and slopes".into()));
        }
        if !breaks[0].is_zero() {
            return Err(ModularError::Orlicz("first break must be 0".into()));
        }
        if breaks.windows(2).any(|w| w[0] >= w[1]) {
            return Err(ModularError::Orlicz("breaks must be strictly increasing".into()));
        }
        if slopes.iter().any(|s| s.is_negative()) {
            return Err(ModularError::Orlicz("slopes must be nonnegative".into()));
        }
        if slopes.windows(2).any(|w| w[0] > w[1]) {
            return Err(ModularError::Orlicz("slopes must be nondecreasing (convexity)".into()));
        }
        Ok(PiecewiseLinear { breaks, slopes })
    }

    pub fn zero() -> Self {
        PiecewiseLinear { breaks: vec![Rational::zero()], slopes: vec![Rational::zero()] }
    }

    pub fn linear(slope: Rational) -> Result<Self, ModularError> {
        PiecewiseLinear::new(vec![Rational::zero()], vec![slope])
    }

    pub fn breaks(&self) -> &[Rational] {
        &self.breaks
    }

    pub fn slopes(&self) -> &[Rational] {
        &self.slopes
    }

    fn is_linear(&self) -> bool {
        self.slopes.iter().all(|s| s == &self.slopes[0])
    }

    fn is_eventually_positive(&self) -> bool {
        self.slopes.last().is_some_and(|s| s.is_positive())
    }

    /// Value at `t ≥ 0`.
    pub fn eval(&self, t: &Rational) -> Rational {
        let mut acc = Rational::zero();
        for (k, slope) in self.slopes.iter().enumerate() {
            let start = &self.breaks[k];
            if t <= start {
                break;
            }
            let end = self.breaks.get(k + 1).filter(|e| *e < t).unwrap_or(t);
            acc += slope * (end - start);
        }
        acc
    }
}

/// Convex `Φ ≥ 0` with `Φ(0) = 0`: `right` on `t ≥ 0`, `left` evaluated at `−t` for `t < 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrliczPhi {
    pub right: PiecewiseLinear,
    pub left: PiecewiseLinear,
}

impl OrliczPhi {
    /// `Φ(t) = t⁺`.
    pub fn positive_part() -> Self {
        OrliczPhi { right: PiecewiseLinear::linear(Rational::one()).unwrap(), left: PiecewiseLinear::zero() }
    }

    pub fn eval(&self, t: &Rational) -> Rational {
        if t.is_negative() {
            self.left.eval(&-t)
        } else {
            self.right.eval(t)
        }
    }

    fn is_linear(&self) -> bool {
        self.right.is_linear() && self.left.is_linear()
    }

    fn unbounded_towards(&self, t: &Rational) -> bool {
        if t.is_positive() {
            self.right.is_eventually_positive()
        } else if t.is_negative() {
            self.left.is_eventually_positive()
        } else {
            false
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrliczAtom {
    pub label: String,
    pub weight: Rational,
    pub phi: OrliczPhi,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrliczScaling {
    /// `w_λ(f,g) = Σ μ_ω Φ((g−f)(ω)/λ)`.
    Homogeneous,
    /// `w_λ(f,g) = Σ μ_ω Φ((g−f)(ω)/λ)^p`.
    Power(u32),
}

/// Discrete Musielak-Orlicz setting over finitely many atoms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrliczSpec {
    atoms: Vec<OrliczAtom>,
    functions: Vec<(String, Vec<Rational>)>,
    scaling: OrliczScaling,
    grid: Option<Vec<Rational>>,
}

impl OrliczSpec {
    pub fn new(
        atoms: Vec<OrliczAtom>,
        functions: Vec<(String, Vec<Rational>)>,
        scaling: OrliczScaling,
        grid: Option<Vec<Rational>>,
    ) -> Result<Self, ModularError> {
        if let Some(a) = atoms.iter().find(|a| !a.weight.is_positive()) {
            return Err(ModularError::Orlicz(format!("atom `{}` needs a positive weight", a.label)));
        }
        if let Some((name, _)) = functions.iter().find(|(_, v)| v.len() != atoms.len()) {
            return Err(ModularError::Orlicz(format!("function `{name}` must have one value per atom")));
        }
        if scaling == OrliczScaling::Power(0) {
            return Err(ModularError::NonPositiveParameter { name: "p", value: "0".into() });
        }
        if let Some(g) = &grid {
            if let Some(bad) = g.iter().find(|x| !x.is_positive()) {
                return Err(ModularError::NonPositiveScale(format_rational(bad)));
            }
        }
        Ok(OrliczSpec { atoms, functions, scaling, grid })
    }

    pub fn atoms(&self) -> &[OrliczAtom] {
        &self.atoms
    }

    pub fn functions(&self) -> &[(String, Vec<Rational>)] {
        &self.functions
    }

    pub fn scaling(&self) -> &OrliczScaling {
        &self.scaling
    }

    pub fn grid(&self) -> Option<&[Rational]> {
        self.grid.as_deref()
    }

    fn exponent(&self) -> u32 {
        match self.scaling {
            OrliczScaling::Homogeneous => 1,
            OrliczScaling::Power(p) => p,
        }
    }

    /// `Σ μ_ω Φ(u_ω / λ)^p`.
    fn modular(&self, u: &[Rational], lambda: &Rational) -> Rational {
        let p = self.exponent() as usize;
        self.atoms
            .iter()
            .zip(u)
            .map(|(a, x)| &a.weight * num_traits::pow(a.phi.eval(&(x / lambda)), p))
            .sum()
    }
}

/// `w_λ(f,g) = ρ((g − f)/λ)`.
///
/// When every `Φ` is linear on each half-line the family is exactly
/// homogeneous (`p = 1`) or power; otherwise each gauge is a step function
/// sampled on the declared grid, exact at the grid points.
pub fn from_orlicz(spec: &OrliczSpec) -> Result<QuasiModularFamily, ModularError> {
    let n = spec.functions.len();
    let linear = spec.atoms.iter().all(|a| a.phi.is_linear());
    let mut gauge = Vec::with_capacity(n);
    for (_, f) in &spec.functions {
        let mut row = Vec::with_capacity(n);
        for (_, g) in &spec.functions {
            let u: Vec<Rational> = g.iter().zip(f).map(|(b, a)| b - a).collect();
            let entry = if linear {
                let c = ExtNonNeg::Finite(spec.modular(&u, &Rational::one()));
                match spec.scaling {
                    OrliczScaling::Homogeneous => ScaleGauge::Homogeneous { c },
                    OrliczScaling::Power(p) => ScaleGauge::Power { c, p },
                }
            } else {
                let grid = spec
                    .grid
                    .as_ref()
                    .filter(|g| !g.is_empty())
                    .ok_or_else(|| ModularError::Orlicz("non-linear Φ requires a λ grid".into()))?;
                let mut pts = grid.clone();
                pts.sort();
                pts.dedup();
                let unbounded = spec.atoms.iter().zip(&u).any(|(a, x)| a.phi.unbounded_towards(x));
                let mut values = vec![if unbounded { ExtNonNeg::Infinite } else { ExtNonNeg::zero() }];
                values.extend(pts.iter().map(|l| ExtNonNeg::Finite(spec.modular(&u, l))));
                ScaleGauge::Step { breakpoints: pts, values }
            };
            row.push(entry);
        }
        gauge.push(row);
    }
    QuasiModularFamily::new(spec.functions.iter().map(|(l, _)| l.clone()).collect(), gauge)
}

/// `w_λ(x,y) = ρ(x,y)/λ` for a quasi-pseudometric `ρ`.
pub fn homogeneous_from_qpm(d: &QuasiPseudoMetric) -> QuasiModularFamily {
    let gauge = d
        .matrix()
        .iter()
        .map(|row| row.iter().map(|c| ScaleGauge::Homogeneous { c: c.clone() }).collect())
        .collect();
    QuasiModularFamily { points: d.points().to_vec(), gauge }
}

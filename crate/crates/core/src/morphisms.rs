//! Maps between finite spaces: continuity tests, image preservation, half-space separation.

use num_traits::{Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::bitopology::{subspace, BitopSpace};
use crate::connectivity::{
    connected_subsets, is_connected_subset, is_locally_antisym_connected, scale_connectivity, CombinedDigraph,
    ConnectivityError,
};
use crate::gauges::{from_asym_norm, AsymNormSample, GaugeError, NumericMode, QuasiPseudoMetric};
use crate::pointset::PointSet;
use crate::value::{format_rational, int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MorphismError {
    #[error("map expects {expected} {side} points, found {got}")]
    CarrierMismatch { side: &'static str, expected: usize, got: usize },
    #[error("source point {point} is sent to {image}, outside the {target_len}-point target")]
    OutOfRange { point: usize, image: usize, target_len: usize },
    #[error("{direction} specialization not preserved: {y} ∈ N({x}) but f({y}) ∉ N(f({x}))")]
    PreconditionFailed { direction: &'static str, x: usize, y: usize },
    #[error("sample {index} lies on the hyperplane")]
    SampleOnHyperplane { index: usize },
    #[error("functional has {got} coefficients for dimension {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Connectivity(#[from] ConnectivityError),
    #[error(transparent)]
    Gauge(#[from] GaugeError),
}

/// A total map `0..source_len → 0..target_len`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct PointMap {
    target_len: usize,
    assignment: Vec<usize>,
}

impl PointMap {
    pub fn new(assignment: Vec<usize>, target_len: usize) -> Result<Self, MorphismError> {
        if let Some((point, &image)) = assignment.iter().enumerate().find(|(_, &v)| v >= target_len) {
            return Err(MorphismError::OutOfRange { point, image, target_len });
        }
        Ok(PointMap { target_len, assignment })
    }

    pub fn identity(n: usize) -> Self {
        PointMap { target_len: n, assignment: (0..n).collect() }
    }

    pub fn constant(source_len: usize, target_len: usize, value: usize) -> Result<Self, MorphismError> {
        PointMap::new(vec![value; source_len], target_len)
    }

    pub fn source_len(&self) -> usize {
        self.assignment.len()
    }

    pub fn target_len(&self) -> usize {
        self.target_len
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn image(&self, s: &PointSet) -> PointSet {
        PointSet::from_indices(self.target_len, s.iter().map(|x| self.assignment[x]))
    }

    fn check_carriers(&self, source: usize, target: usize) -> Result<(), MorphismError> {
        if self.source_len() != source {
            return Err(MorphismError::CarrierMismatch { side: "source", expected: self.source_len(), got: source });
        }
        if self.target_len != target {
            return Err(MorphismError::CarrierMismatch { side: "target", expected: self.target_len, got: target });
        }
        Ok(())
    }
}

/// `dY(f x, f x') ≤ dX(x, x')` for every pair.
pub fn is_nonexpansive(f: &PointMap, dx: &QuasiPseudoMetric, dy: &QuasiPseudoMetric) -> Result<bool, MorphismError> {
    f.check_carriers(dx.len(), dy.len())?;
    let n = dx.len();
    let tol = dy.mode().tolerance().cloned();
    Ok((0..n).all(|x| (0..n).all(|y| dy.d(f.apply(x), f.apply(y)).le_tol(dx.d(x, y), tol.as_ref()))))
}

/// For every `ε` in the target's positive spectrum (or `1` when it is empty)
/// some `δ` in the source's positive spectrum (or `1`) has
/// `dX(x,x') < δ ⇒ dY(f x, f x') < ε`.
pub fn is_uniformly_continuous(f: &PointMap, dx: &QuasiPseudoMetric, dy: &QuasiPseudoMetric) -> Result<bool, MorphismError> {
    f.check_carriers(dx.len(), dy.len())?;
    let n = dx.len();
    let spectrum_or_one = |d: &QuasiPseudoMetric| {
        let s = d.positive_spectrum();
        if s.is_empty() {
            vec![int(1)]
        } else {
            s
        }
    };
    let (targets, deltas) = (spectrum_or_one(dy), spectrum_or_one(dx));
    let uc = targets.iter().all(|eps| {
        deltas.iter().any(|delta| {
            (0..n).all(|x| (0..n).all(|y| !dx.lt(x, y, delta) || dy.lt(f.apply(x), f.apply(y), eps)))
        })
    });
    if is_nonexpansive(f, dx, dy)? {
        assert!(uc, "nonexpansive map failed the uniform continuity criterion");
    }
    Ok(uc)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ContinuityReport {
    pub rendering: &'static str,
    pub nonexpansive: bool,
    pub uniformly_continuous: bool,
}

pub fn continuity_report(f: &PointMap, dx: &QuasiPseudoMetric, dy: &QuasiPseudoMetric) -> Result<ContinuityReport, MorphismError> {
    Ok(ContinuityReport {
        rendering: "spectrum",
        nonexpansive: is_nonexpansive(f, dx, dy)?,
        uniformly_continuous: is_uniformly_continuous(f, dx, dy)?,
    })
}

/// `y ∈ N⁺(x) ⇒ f(y) ∈ N⁺(f(x))` and the same for `N⁻`.
pub fn check_specialization_preserving(f: &PointMap, bx: &BitopSpace, by: &BitopSpace) -> Result<(), MorphismError> {
    f.check_carriers(bx.len(), by.len())?;
    for (direction, src, tgt) in [("forward", bx.forward(), by.forward()), ("backward", bx.backward(), by.backward())] {
        for x in 0..bx.len() {
            if let Some(y) = src.nbhd(x).iter().find(|&y| !tgt.nbhd(f.apply(x)).contains(f.apply(y))) {
                return Err(MorphismError::PreconditionFailed { direction, x, y });
            }
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageFailure {
    pub subset: PointSet,
    pub image: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ImageReport {
    pub rendering: &'static str,
    pub subsets_checked: usize,
    pub failures: Vec<ImageFailure>,
    pub source_locally_connected: bool,
    pub image_locally_connected: bool,
}

impl ImageReport {
    pub fn holds(&self) -> bool {
        self.failures.is_empty() && (!self.source_locally_connected || self.image_locally_connected)
    }
}

/// Images of antisymmetrically connected subsets stay connected, and local
/// connectedness of the source carries over to the image subspace.
pub fn check_image_preservation(f: &PointMap, bx: &BitopSpace, by: &BitopSpace) -> Result<ImageReport, MorphismError> {
    check_specialization_preserving(f, bx, by)?;
    let gy = CombinedDigraph::new(by);
    let subsets = connected_subsets(bx, 6);
    let failures: Vec<ImageFailure> = subsets
        .iter()
        .filter_map(|s| {
            let image = f.image(s);
            (!is_connected_subset(&gy, &image)).then(|| ImageFailure { subset: s.clone(), image })
        })
        .collect();
    let source_locally_connected = is_locally_antisym_connected(bx);
    let image_locally_connected = if bx.is_empty() {
        true
    } else {
        is_locally_antisym_connected(&subspace(by, &f.image(&PointSet::full(bx.len()))).expect("nonempty image"))
    };
    Ok(ImageReport {
        rendering: "specialization",
        subsets_checked: subsets.len(),
        failures,
        source_locally_connected,
        image_locally_connected,
    })
}

/// `x ↦ Σ cᵢ xᵢ` with threshold `α`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LinearFunctionalSpec {
    pub coefficients: Vec<Rational>,
    pub alpha: Rational,
}

impl LinearFunctionalSpec {
    pub fn eval(&self, x: &[Rational]) -> Rational {
        self.coefficients.iter().zip(x).map(|(c, v)| c * v).sum()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HalfspaceReport {
    pub epsilon: String,
    /// `f(x) < α`.
    pub below: PointSet,
    /// `f(x) > α`.
    pub above: PointSet,
    pub components: Vec<Vec<usize>>,
    /// Components meeting both sides: findings, not theorem failures.
    pub straddling: Vec<Vec<usize>>,
}

impl HalfspaceReport {
    pub fn is_consistent(&self) -> bool {
        self.straddling.is_empty()
    }
}

/// `ε`-scale antisymmetric components of the `p = 1` positive-part gauge that meet both open half-spaces.
pub fn halfspace_separation(
    s: &AsymNormSample,
    l: &LinearFunctionalSpec,
    eps: &Rational,
) -> Result<HalfspaceReport, MorphismError> {
    if !eps.is_positive() {
        return Err(ConnectivityError::NonPositiveEpsilon(format_rational(eps)).into());
    }
    if l.coefficients.len() != s.dimension() {
        return Err(MorphismError::DimensionMismatch { expected: s.dimension(), got: l.coefficients.len() });
    }
    let n = s.points().len();
    let values: Vec<Rational> = s.points().iter().map(|x| l.eval(x) - &l.alpha).collect();
    if let Some(index) = values.iter().position(Zero::is_zero) {
        return Err(MorphismError::SampleOnHyperplane { index });
    }
    let below = PointSet::from_indices(n, (0..n).filter(|&i| values[i].is_negative()));
    let above = below.complement();
    let d = from_asym_norm(&s.with_p_one(), &NumericMode::Exact)?;
    let components = scale_connectivity(&d, eps)?.antisymmetric;
    let straddling = components
        .iter()
        .filter(|c| c.iter().any(|&i| below.contains(i)) && c.iter().any(|&i| above.contains(i)))
        .cloned()
        .collect();
    Ok(HalfspaceReport { epsilon: format_rational(eps), below, above, components, straddling })
}

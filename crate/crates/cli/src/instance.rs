//! Instance file schema and its conversion to validated core values.

use std::fmt;

use qconn::bitopology::{modular_bitop, specialization_bitop, AlexandrovTopology, BitopError, BitopSpace};
use qconn::completion::EventuallyPeriodicSeq;
use qconn::gauges::{
    from_asym_norm, from_digraph, AsymNormSample, GaugeError, NumericMode, QuasiPseudoMetric, WeightedDigraph,
};
use qconn::modular::{
    from_orlicz, validate_family, ModularError, OrliczAtom, OrliczPhi, OrliczScaling, OrliczSpec, PiecewiseLinear,
    QuasiModularFamily, ScaleGauge, ValidationReport,
};
use qconn::morphisms::{LinearFunctionalSpec, PointMap};
use qconn::value::{format_rational, int, parse_rational, ExtNonNeg, Rational};
use qconn::PointSet;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{json, Value};

/// A rational carried as a string such as `"-3/2"` or `"0.25"`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Q(pub Rational);

impl Serialize for Q {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format_rational(&self.0))
    }
}

impl<'de> Deserialize<'de> for Q {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        parse_rational(&s).map(Q).map_err(serde::de::Error::custom)
    }
}

fn qs(v: &[Rational]) -> Vec<Q> {
    v.iter().cloned().map(Q).collect()
}

fn unq(v: Vec<Q>) -> Vec<Rational> {
    v.into_iter().map(|q| q.0).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EdgeWire {
    pub from: usize,
    pub to: usize,
    pub weight: ExtNonNeg,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GaugeWire {
    Step { breakpoints: Vec<Q>, values: Vec<ExtNonNeg> },
    Homogeneous { c: ExtNonNeg },
    Power { c: ExtNonNeg, p: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BranchWire {
    pub breaks: Vec<Q>,
    pub slopes: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PhiWire {
    pub right: BranchWire,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left: Option<BranchWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtomWire {
    pub label: String,
    pub weight: Q,
    pub phi: PhiWire,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionWire {
    pub label: String,
    pub values: Vec<Q>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ScalingWire {
    Homogeneous,
    Power { p: u32 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FunctionalWire {
    pub coefficients: Vec<Q>,
    pub alpha: Q,
}

/// On-disk form of every instance kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InstanceFile {
    QuasiMetric {
        points: Vec<String>,
        matrix: Vec<Vec<ExtNonNeg>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        float_tol: Option<f64>,
    },
    Digraph {
        vertices: Vec<String>,
        edges: Vec<EdgeWire>,
    },
    Bitopology {
        points: Vec<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forward_min_nbhd: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        backward_min_nbhd: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        forward_open_sets: Option<Vec<Vec<usize>>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        backward_open_sets: Option<Vec<Vec<usize>>>,
    },
    ModularFamily {
        points: Vec<String>,
        gauges: Vec<Vec<GaugeWire>>,
        grid: Vec<Q>,
    },
    Orlicz {
        atoms: Vec<AtomWire>,
        functions: Vec<FunctionWire>,
        scaling: ScalingWire,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        grid: Option<Vec<Q>>,
    },
    AsymNormSample {
        dimension: usize,
        p: Q,
        points: Vec<Vec<Q>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        labels: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        float_tol: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        functional: Option<FunctionalWire>,
    },
    Map {
        source: Box<InstanceFile>,
        target: Box<InstanceFile>,
        assignment: Vec<usize>,
    },
    Sequence {
        space: Box<InstanceFile>,
        #[serde(default)]
        preperiod: Vec<usize>,
        period: Vec<usize>,
    },
}

/// A machine-readable schema or validation problem.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnostic {
    pub code: String,
    pub message: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<Value>,
}

impl Diagnostic {
    pub fn new(code: &str, message: impl Into<String>) -> Self {
        Diagnostic { code: code.to_string(), message: message.into(), detail: None }
    }

    fn with_detail(mut self, detail: Value) -> Self {
        self.detail = Some(detail);
        self
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.code, self.message)
    }
}

fn gauge_diagnostics(e: GaugeError) -> Vec<Diagnostic> {
    match e {
        GaugeError::Invalid(vs) => vs
            .into_iter()
            .map(|v| {
                let detail = serde_json::to_value(&v).unwrap_or(Value::Null);
                let code = detail.get("code").and_then(Value::as_str).unwrap_or("invalid").to_string();
                Diagnostic::new(&code, format!("{v:?}")).with_detail(detail)
            })
            .collect(),
        other => vec![Diagnostic::new("gauge", other.to_string())],
    }
}

fn bitop_diagnostic(e: BitopError) -> Vec<Diagnostic> {
    vec![Diagnostic::new("bitopology", e.to_string())]
}

fn modular_diagnostic(e: ModularError) -> Vec<Diagnostic> {
    match e {
        ModularError::Gauge(g) => gauge_diagnostics(g),
        other => vec![Diagnostic::new("modular", other.to_string())],
    }
}

fn report_diagnostics(r: &ValidationReport) -> Vec<Diagnostic> {
    let mut out: Vec<Diagnostic> = Vec::new();
    for &i in &r.qm1 {
        out.push(Diagnostic::new("qm1", format!("self-gauge of point {i} is not identically zero")).with_detail(json!({ "i": i })));
    }
    for v in &r.qm2 {
        out.push(
            Diagnostic::new("qm2", format!("modular triangle fails on ({}, {}, {})", v.i, v.j, v.k))
                .with_detail(serde_json::to_value(v).unwrap_or(Value::Null)),
        );
    }
    for v in &r.qm3 {
        out.push(
            Diagnostic::new("qm3", format!("gauge ({}, {}) increases at {}", v.i, v.j, v.at))
                .with_detail(serde_json::to_value(v).unwrap_or(Value::Null)),
        );
    }
    out
}

fn mode_of(tol: Option<f64>) -> Result<NumericMode, Vec<Diagnostic>> {
    match tol {
        None => Ok(NumericMode::Exact),
        Some(t) if t.is_finite() && t >= 0.0 => Ok(NumericMode::float(t)),
        Some(t) => Err(vec![Diagnostic::new("float_tol", format!("tolerance {t} must be finite and nonnegative"))]),
    }
}

fn tol_of(mode: &NumericMode) -> Option<f64> {
    use num_traits::ToPrimitive;
    mode.tolerance().and_then(|t| t.to_f64())
}

const DEFAULT_ORLICZ_GRID: [(i64, i64); 3] = [(1, 2), (1, 1), (2, 1)];

/// A validated instance.
#[derive(Debug, Clone, PartialEq)]
pub enum Instance {
    QuasiMetric(QuasiPseudoMetric),
    Digraph { graph: WeightedDigraph, closure: QuasiPseudoMetric },
    Bitopology(BitopSpace),
    ModularFamily { family: QuasiModularFamily, grid: Vec<Rational>, report: ValidationReport },
    Orlicz { spec: OrliczSpec, family: QuasiModularFamily, report: ValidationReport },
    AsymNormSample { sample: AsymNormSample, mode: NumericMode, metric: QuasiPseudoMetric, functional: Option<LinearFunctionalSpec> },
    Map { source: Box<Instance>, target: Box<Instance>, map: PointMap },
    Sequence { space: Box<Instance>, seq: EventuallyPeriodicSeq },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::QuasiMetric(_) => "quasi_metric",
            Instance::Digraph { .. } => "digraph",
            Instance::Bitopology(_) => "bitopology",
            Instance::ModularFamily { .. } => "modular_family",
            Instance::Orlicz { .. } => "orlicz",
            Instance::AsymNormSample { .. } => "asym_norm_sample",
            Instance::Map { .. } => "map",
            Instance::Sequence { .. } => "sequence",
        }
    }

    /// Number of carrier points.
    pub fn len(&self) -> usize {
        match self {
            Instance::QuasiMetric(d) => d.len(),
            Instance::Digraph { closure, .. } => closure.len(),
            Instance::Bitopology(b) => b.len(),
            Instance::ModularFamily { family, .. } | Instance::Orlicz { family, .. } => family.len(),
            Instance::AsymNormSample { metric, .. } => metric.len(),
            Instance::Map { source, .. } => source.len(),
            Instance::Sequence { space, .. } => space.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// The quasi-pseudometric carried directly by the instance, if any.
    pub fn metric(&self) -> Option<&QuasiPseudoMetric> {
        match self {
            Instance::QuasiMetric(d) => Some(d),
            Instance::Digraph { closure, .. } => Some(closure),
            Instance::AsymNormSample { metric, .. } => Some(metric),
            _ => None,
        }
    }

    pub fn family(&self) -> Option<&QuasiModularFamily> {
        match self {
            Instance::ModularFamily { family, .. } | Instance::Orlicz { family, .. } => Some(family),
            _ => None,
        }
    }

    /// Specialization bitopology of metric kinds, modular bitopology of families.
    pub fn bitop(&self) -> Option<BitopSpace> {
        match self {
            Instance::Bitopology(b) => Some(b.clone()),
            Instance::ModularFamily { family, .. } | Instance::Orlicz { family, .. } => Some(modular_bitop(family)),
            _ => self.metric().map(specialization_bitop),
        }
    }

    pub fn to_wire(&self) -> InstanceFile {
        match self {
            Instance::QuasiMetric(d) => InstanceFile::QuasiMetric {
                points: d.points().to_vec(),
                matrix: d.matrix().to_vec(),
                float_tol: tol_of(d.mode()),
            },
            Instance::Digraph { graph, .. } => InstanceFile::Digraph {
                vertices: graph.vertices().to_vec(),
                edges: graph
                    .edges()
                    .iter()
                    .map(|e| EdgeWire { from: e.from, to: e.to, weight: ExtNonNeg::Finite(e.weight.clone()) })
                    .collect(),
            },
            Instance::Bitopology(b) => bitop_wire(b),
            Instance::ModularFamily { family, grid, .. } => InstanceFile::ModularFamily {
                points: family.points().to_vec(),
                gauges: family.gauges().iter().map(|row| row.iter().map(gauge_wire).collect()).collect(),
                grid: qs(grid),
            },
            Instance::Orlicz { spec, .. } => InstanceFile::Orlicz {
                atoms: spec
                    .atoms()
                    .iter()
                    .map(|a| AtomWire {
                        label: a.label.clone(),
                        weight: Q(a.weight.clone()),
                        phi: PhiWire {
                            right: branch_wire(&a.phi.right),
                            left: (a.phi.left != PiecewiseLinear::zero()).then(|| branch_wire(&a.phi.left)),
                        },
                    })
                    .collect(),
                functions: spec
                    .functions()
                    .iter()
                    .map(|(label, v)| FunctionWire { label: label.clone(), values: qs(v) })
                    .collect(),
                scaling: match spec.scaling() {
                    OrliczScaling::Homogeneous => ScalingWire::Homogeneous,
                    OrliczScaling::Power(p) => ScalingWire::Power { p: *p },
                },
                grid: spec.grid().map(qs),
            },
            Instance::AsymNormSample { sample, mode, functional, .. } => InstanceFile::AsymNormSample {
                dimension: sample.dimension(),
                p: Q(sample.p().clone()),
                points: sample.points().iter().map(|v| qs(v)).collect(),
                labels: Some(sample.labels().to_vec()),
                float_tol: tol_of(mode),
                functional: functional
                    .as_ref()
                    .map(|f| FunctionalWire { coefficients: qs(&f.coefficients), alpha: Q(f.alpha.clone()) }),
            },
            Instance::Map { source, target, map } => InstanceFile::Map {
                source: Box::new(source.to_wire()),
                target: Box::new(target.to_wire()),
                assignment: map.assignment().to_vec(),
            },
            Instance::Sequence { space, seq } => InstanceFile::Sequence {
                space: Box::new(space.to_wire()),
                preperiod: seq.preperiod().to_vec(),
                period: seq.period().to_vec(),
            },
        }
    }
}

pub fn bitop_wire(b: &BitopSpace) -> InstanceFile {
    let lists = |t: &AlexandrovTopology| t.nbhds().iter().map(PointSet::to_vec).collect();
    InstanceFile::Bitopology {
        points: b.points().to_vec(),
        forward_min_nbhd: Some(lists(b.forward())),
        backward_min_nbhd: Some(lists(b.backward())),
        forward_open_sets: None,
        backward_open_sets: None,
    }
}

fn gauge_wire(g: &ScaleGauge) -> GaugeWire {
    match g {
        ScaleGauge::Step { breakpoints, values } => GaugeWire::Step { breakpoints: qs(breakpoints), values: values.clone() },
        ScaleGauge::Homogeneous { c } => GaugeWire::Homogeneous { c: c.clone() },
        ScaleGauge::Power { c, p } => GaugeWire::Power { c: c.clone(), p: *p },
    }
}

fn branch_wire(b: &PiecewiseLinear) -> BranchWire {
    BranchWire { breaks: qs(b.breaks()), slopes: qs(b.slopes()) }
}

fn branch(b: BranchWire) -> Result<PiecewiseLinear, ModularError> {
    PiecewiseLinear::new(unq(b.breaks), unq(b.slopes))
}

fn topology(
    points: &[String],
    side: &str,
    nbhd: Option<Vec<Vec<usize>>>,
    opens: Option<Vec<Vec<usize>>>,
) -> Result<AlexandrovTopology, Vec<Diagnostic>> {
    let n = points.len();
    match (nbhd, opens) {
        (Some(lists), None) => AlexandrovTopology::from_lists(points.to_vec(), &lists).map_err(bitop_diagnostic),
        (None, Some(sets)) => {
            let mut out = Vec::with_capacity(sets.len());
            for s in sets {
                if let Some(&index) = s.iter().find(|&&i| i >= n) {
                    return Err(bitop_diagnostic(BitopError::IndexOutOfRange { index, n }));
                }
                out.push(PointSet::from_indices(n, s));
            }
            AlexandrovTopology::from_open_sets(points.to_vec(), &out).map_err(bitop_diagnostic)
        }
        _ => Err(vec![Diagnostic::new(
            "bitopology",
            format!("give exactly one of {side}_min_nbhd and {side}_open_sets"),
        )]),
    }
}

impl InstanceFile {
    /// Validates the file and builds the core values.
    pub fn into_instance(self) -> Result<Instance, Vec<Diagnostic>> {
        let inst = self.build()?;
        if inst.is_empty() {
            return Err(vec![Diagnostic::new("empty", format!("{} instance has no points", inst.kind()))]);
        }
        Ok(inst)
    }

    fn build(self) -> Result<Instance, Vec<Diagnostic>> {
        match self {
            InstanceFile::QuasiMetric { points, matrix, float_tol } => {
                let mode = mode_of(float_tol)?;
                QuasiPseudoMetric::new(points, matrix, mode).map(Instance::QuasiMetric).map_err(gauge_diagnostics)
            }
            InstanceFile::Digraph { vertices, edges } => {
                let graph = WeightedDigraph::new(vertices, edges.into_iter().map(|e| (e.from, e.to, e.weight)).collect())
                    .map_err(gauge_diagnostics)?;
                let closure = from_digraph(&graph);
                Ok(Instance::Digraph { graph, closure })
            }
            InstanceFile::Bitopology { points, forward_min_nbhd, backward_min_nbhd, forward_open_sets, backward_open_sets } => {
                let f = topology(&points, "forward", forward_min_nbhd, forward_open_sets)?;
                let b = topology(&points, "backward", backward_min_nbhd, backward_open_sets)?;
                BitopSpace::new(f, b).map(Instance::Bitopology).map_err(bitop_diagnostic)
            }
            InstanceFile::ModularFamily { points, gauges, grid } => {
                let mut rows = Vec::with_capacity(gauges.len());
                for row in gauges {
                    let mut out = Vec::with_capacity(row.len());
                    for g in row {
                        out.push(
                            match g {
                                GaugeWire::Step { breakpoints, values } => ScaleGauge::step(unq(breakpoints), values),
                                GaugeWire::Homogeneous { c } => Ok(ScaleGauge::homogeneous(c)),
                                GaugeWire::Power { c, p } => ScaleGauge::power(c, p),
                            }
                            .map_err(modular_diagnostic)?,
                        );
                    }
                    rows.push(out);
                }
                let family = QuasiModularFamily::new(points, rows).map_err(modular_diagnostic)?;
                let grid = unq(grid);
                let report = validate_family(&family, &grid).map_err(modular_diagnostic)?;
                if !report.is_valid() {
                    return Err(report_diagnostics(&report));
                }
                Ok(Instance::ModularFamily { family, grid, report })
            }
            InstanceFile::Orlicz { atoms, functions, scaling, grid } => {
                let mut core_atoms = Vec::with_capacity(atoms.len());
                for a in atoms {
                    let right = branch(a.phi.right).map_err(modular_diagnostic)?;
                    let left = match a.phi.left {
                        Some(l) => branch(l).map_err(modular_diagnostic)?,
                        None => PiecewiseLinear::zero(),
                    };
                    core_atoms.push(OrliczAtom { label: a.label, weight: a.weight.0, phi: OrliczPhi { right, left } });
                }
                let scaling = match scaling {
                    ScalingWire::Homogeneous => OrliczScaling::Homogeneous,
                    ScalingWire::Power { p } => OrliczScaling::Power(p),
                };
                let functions = functions.into_iter().map(|f| (f.label, unq(f.values))).collect();
                let spec = OrliczSpec::new(core_atoms, functions, scaling, grid.map(unq)).map_err(modular_diagnostic)?;
                let family = from_orlicz(&spec).map_err(modular_diagnostic)?;
                let check_grid: Vec<Rational> = match spec.grid() {
                    Some(g) if !g.is_empty() => g.to_vec(),
                    _ => DEFAULT_ORLICZ_GRID.iter().map(|&(a, b)| int(a) / int(b)).collect(),
                };
                let report = validate_family(&family, &check_grid).map_err(modular_diagnostic)?;
                if !report.is_valid() {
                    return Err(report_diagnostics(&report));
                }
                Ok(Instance::Orlicz { spec, family, report })
            }
            InstanceFile::AsymNormSample { dimension, p, points, labels, float_tol, functional } => {
                let mode = mode_of(float_tol)?;
                let pts: Vec<Vec<Rational>> = points.into_iter().map(unq).collect();
                let labels = labels.unwrap_or_else(|| qconn::gauges::index_labels(pts.len()));
                let sample = AsymNormSample::with_labels(dimension, p.0, pts, labels).map_err(gauge_diagnostics)?;
                let functional = match functional {
                    None => None,
                    Some(f) if f.coefficients.len() != dimension => {
                        return Err(vec![Diagnostic::new(
                            "functional",
                            format!("{} coefficients for dimension {dimension}", f.coefficients.len()),
                        )])
                    }
                    Some(f) => Some(LinearFunctionalSpec { coefficients: unq(f.coefficients), alpha: f.alpha.0 }),
                };
                let metric = from_asym_norm(&sample, &mode).map_err(gauge_diagnostics)?;
                Ok(Instance::AsymNormSample { sample, mode, metric, functional })
            }
            InstanceFile::Map { source, target, assignment } => {
                let source = source.into_instance()?;
                let target = target.into_instance()?;
                for (side, inst) in [("source", &source), ("target", &target)] {
                    if inst.bitop().is_none() || matches!(inst, Instance::Map { .. } | Instance::Sequence { .. }) {
                        return Err(vec![Diagnostic::new("map", format!("{side} must be a space, got {}", inst.kind()))]);
                    }
                }
                if assignment.len() != source.len() {
                    return Err(vec![Diagnostic::new(
                        "map",
                        format!("assignment has {} entries for {} source points", assignment.len(), source.len()),
                    )]);
                }
                let map = PointMap::new(assignment, target.len()).map_err(|e| vec![Diagnostic::new("map", e.to_string())])?;
                Ok(Instance::Map { source: Box::new(source), target: Box::new(target), map })
            }
            InstanceFile::Sequence { space, preperiod, period } => {
                let space = space.into_instance()?;
                let Some(d) = space.metric() else {
                    return Err(vec![Diagnostic::new("sequence", format!("space must carry a metric, got {}", space.kind()))]);
                };
                let seq = EventuallyPeriodicSeq::new(preperiod, period)
                    .map_err(|e| vec![Diagnostic::new("sequence", e.to_string())])?;
                seq.check_range(d.len()).map_err(|e| vec![Diagnostic::new("sequence", e.to_string())])?;
                Ok(Instance::Sequence { space: Box::new(space), seq })
            }
        }
    }
}

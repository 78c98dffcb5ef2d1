//! The four subcommands, returning output text and an exit code instead of printing.

use std::path::{Path, PathBuf};
use std::time::Instant;

use qconn::bitopology::{join, BitopSpace};
use qconn::completion::{
    forward_limits, formal_ball_poset, is_left_k_cauchy, join_compactness_check, precompact_report, smyth_report,
};
use qconn::connectivity::search::{search_counterexamples, Finding, Mode, SearchConfig, SearchInstance, Target};
use qconn::connectivity::{
    antisym_decision, component_report, is_join_locally_connected, is_locally_antisym_connected, scale_connectivity,
};
use qconn::dot::{components_dot, formal_ball_dot};
use qconn::gauges::{symmetrization_report, QuasiPseudoMetric};
use qconn::modular::luxemburg_gauge;
use qconn::morphisms::{check_image_preservation, check_specialization_preserving, continuity_report, halfspace_separation};
use qconn::value::{int, Rational};
use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::instance::{bitop_wire, Diagnostic, Instance, InstanceFile};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FINDINGS: i32 = 1;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_PARSE: i32 = 3;

/// Default generated-instance cap for random searches.
pub const DEFAULT_RANDOM_BUDGET: usize = 1000;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid instance ({} problem(s))", .0.len())]
    Schema(Vec<Diagnostic>),
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            _ => EXIT_INVALID,
        }
    }

    /// Machine-readable form written to stdout.
    pub fn to_json(&self) -> Value {
        match self {
            CliError::Schema(d) => json!({ "valid": false, "diagnostics": d }),
            CliError::Parse(m) => json!({ "valid": false, "diagnostics": [Diagnostic::new("parse", m.clone())] }),
            CliError::Usage(m) => json!({ "error": "usage", "message": m }),
            CliError::Io(m) => json!({ "error": "io", "message": m }),
        }
    }
}

/// Text for stdout plus the process exit code.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(stdout: String) -> Self {
        Outcome { code: EXIT_OK, stdout, stderr: String::new() }
    }

    fn from_error(e: &CliError) -> Self {
        Outcome { code: e.exit_code(), stdout: render(&e.to_json()), stderr: format!("qconn: {e}\n") }
    }
}

/// Pretty JSON with a trailing newline; keys are sorted, so output is deterministic.
pub fn render(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values always serialize");
    s.push('\n');
    s
}

pub fn parse_instance(bytes: &[u8]) -> Result<InstanceFile, CliError> {
    use serde_json::error::Category;
    serde_json::from_slice(bytes).map_err(|e| match e.classify() {
        Category::Data => CliError::Schema(vec![Diagnostic::new("schema", e.to_string())]),
        Category::Io | Category::Syntax | Category::Eof => CliError::Parse(e.to_string()),
    })
}

fn read(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

/// Sets the float tolerance on every metric-bearing part of `f`.
pub fn apply_float_tol(f: &mut InstanceFile, tol: f64) {
    match f {
        InstanceFile::QuasiMetric { float_tol, .. } | InstanceFile::AsymNormSample { float_tol, .. } => {
            *float_tol = Some(tol)
        }
        InstanceFile::Map { source, target, .. } => {
            apply_float_tol(source, tol);
            apply_float_tol(target, tol);
        }
        InstanceFile::Sequence { space, .. } => apply_float_tol(space, tol),
        _ => {}
    }
}

pub fn load(path: &Path, float_tol: Option<f64>) -> Result<Instance, CliError> {
    let mut file = parse_instance(&read(path)?)?;
    if let Some(t) = float_tol {
        apply_float_tol(&mut file, t);
    }
    file.into_instance().map_err(CliError::Schema)
}

pub fn cmd_validate(path: &Path, float_tol: Option<f64>) -> Outcome {
    match load(path, float_tol) {
        Ok(inst) => Outcome::ok(render(&json!({
            "valid": true,
            "kind": inst.kind(),
            "points": inst.len(),
            "diagnostics": [],
        }))),
        Err(e) => Outcome::from_error(&e),
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct AnalyzeOptions {
    pub components: bool,
    pub local: bool,
    pub scale: Vec<Rational>,
    pub smyth: bool,
    pub formal_balls: Option<Vec<Rational>>,
    pub precompact: Option<Vec<Rational>>,
    pub dot: Option<PathBuf>,
    pub float_tol: Option<f64>,
    pub output: Option<PathBuf>,
}

impl AnalyzeOptions {
    fn nothing_requested(&self) -> bool {
        !self.components
            && !self.local
            && self.scale.is_empty()
            && !self.smyth
            && self.formal_balls.is_none()
            && self.precompact.is_none()
    }
}

/// The space a composite instance is about: the source of a map, the carrier of a sequence.
fn carrier(inst: &Instance) -> &Instance {
    match inst {
        Instance::Map { source, .. } => source,
        Instance::Sequence { space, .. } => space,
        other => other,
    }
}

fn metric_of(inst: &Instance) -> Result<Option<QuasiPseudoMetric>, CliError> {
    if let Some(d) = inst.metric() {
        return Ok(Some(d.clone()));
    }
    match inst.family() {
        Some(f) => luxemburg_gauge(f).map(Some).map_err(|e| CliError::Usage(format!("Luxemburg gauge: {e}"))),
        None => Ok(None),
    }
}

fn require_metric(d: &Option<QuasiPseudoMetric>, flag: &str, kind: &str) -> Result<QuasiPseudoMetric, CliError> {
    d.clone().ok_or_else(|| CliError::Usage(format!("{flag} needs a metric-bearing instance, got {kind}")))
}

fn to_json<T: serde::Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn components_section(b: &BitopSpace) -> Value {
    let decision = antisym_decision(b);
    let report = component_report(b);
    json!({
        "antisym_connected": decision.connected,
        "certificate": decision.certificate,
        "symmetric_components": report.symmetric_components,
        "antisymmetric_components": report.antisymmetric_components,
        "join_components": qconn::connectivity::topology_components(&join(b)),
    })
}

fn local_section(b: &BitopSpace) -> Value {
    json!({
        "locally_antisym_connected": is_locally_antisym_connected(b),
        "join_locally_connected": is_join_locally_connected(b),
        "points": component_report(b).local_status,
    })
}

/// Builds the combined analysis report for a loaded instance.
pub fn analyze(inst: &Instance, opts: &AnalyzeOptions) -> Result<Value, CliError> {
    let space = carrier(inst);
    let kind = space.kind();
    let bitop = space.bitop();
    let metric = metric_of(space)?;
    let mut out = Map::new();
    out.insert("kind".into(), json!(inst.kind()));
    out.insert("points".into(), json!(inst.len()));

    let usage = |e: &dyn std::fmt::Display| CliError::Usage(e.to_string());
    if opts.components || opts.nothing_requested() {
        let b = bitop.as_ref().ok_or_else(|| CliError::Usage(format!("--components needs a space, got {kind}")))?;
        out.insert("components".into(), components_section(b));
    }
    if opts.local {
        let b = bitop.as_ref().ok_or_else(|| CliError::Usage(format!("--local needs a space, got {kind}")))?;
        out.insert("local".into(), local_section(b));
    }
    if !opts.scale.is_empty() {
        let d = require_metric(&metric, "--scale", kind)?;
        let reports = opts.scale.iter().map(|e| scale_connectivity(&d, e).map(|r| to_json(&r))).collect::<Result<Vec<_>, _>>();
        out.insert("scale".into(), Value::Array(reports.map_err(|e| usage(&e))?));
    }
    if opts.smyth {
        let d = require_metric(&metric, "--smyth", kind)?;
        out.insert("smyth".into(), to_json(&smyth_report(&d)));
        out.insert("join_compactness".into(), to_json(&join_compactness_check(&d)));
    }
    if let Some(radii) = &opts.formal_balls {
        let d = require_metric(&metric, "--formal-balls", kind)?;
        out.insert("formal_balls".into(), to_json(&formal_ball_poset(&d, radii).map_err(|e| usage(&e))?));
    }
    if let Some(thresholds) = &opts.precompact {
        let d = require_metric(&metric, "--precompact", kind)?;
        out.insert("precompact".into(), to_json(&precompact_report(&d, thresholds).map_err(|e| usage(&e))?));
    }

    match inst {
        Instance::ModularFamily { report, .. } | Instance::Orlicz { report, .. } => {
            out.insert("validation".into(), to_json(report));
            if let Some(d) = &metric {
                out.insert("luxemburg".into(), to_json(&d.matrix()));
            }
        }
        Instance::AsymNormSample { sample, functional, .. } => {
            out.insert("symmetrization".into(), to_json(&symmetrization_report(sample)));
            if let Some(l) = functional {
                let eps: Vec<Rational> = if opts.scale.is_empty() { vec![int(1)] } else { opts.scale.clone() };
                let reports = eps
                    .iter()
                    .map(|e| halfspace_separation(sample, l, e).map(|r| to_json(&r)))
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| usage(&e))?;
                out.insert("halfspace".into(), Value::Array(reports));
            }
        }
        Instance::Map { target, map, .. } => {
            let bx = bitop.as_ref().expect("map sources are spaces");
            let by = target.bitop().expect("map targets are spaces");
            let mut m = Map::new();
            let preserving = check_specialization_preserving(map, bx, &by);
            m.insert("specialization_preserving".into(), json!(preserving.is_ok()));
            if let (Some(dx), Some(dy)) = (&metric, metric_of(target)?) {
                m.insert("continuity".into(), to_json(&continuity_report(map, dx, &dy).map_err(|e| usage(&e))?));
            }
            if preserving.is_ok() {
                m.insert("images".into(), to_json(&check_image_preservation(map, bx, &by).map_err(|e| usage(&e))?));
            }
            out.insert("map".into(), Value::Object(m));
        }
        Instance::Sequence { seq, .. } => {
            let d = metric.as_ref().expect("sequence spaces carry metrics");
            out.insert(
                "sequence".into(),
                json!({
                    "left_k_cauchy": is_left_k_cauchy(d, seq).map_err(|e| usage(&e))?,
                    "forward_limits": forward_limits(d, seq).map_err(|e| usage(&e))?,
                }),
            );
        }
        _ => {}
    }
    Ok(Value::Object(out))
}

pub fn cmd_analyze(path: &Path, opts: &AnalyzeOptions) -> Outcome {
    let run = || -> Result<String, CliError> {
        let inst = load(path, opts.float_tol)?;
        let text = render(&analyze(&inst, opts)?);
        if let Some(dot) = &opts.dot {
            let b = carrier(&inst).bitop().ok_or_else(|| CliError::Usage("--dot needs a space".into()))?;
            write(dot, &components_dot(&b))?;
        }
        match &opts.output {
            Some(out) => {
                write(out, &text)?;
                Ok(String::new())
            }
            None => Ok(text),
        }
    };
    match run() {
        Ok(stdout) => Outcome::ok(stdout),
        Err(e) => Outcome::from_error(&e),
    }
}

/// Components graph, or the formal-ball Hasse diagram when radii are given.
pub fn cmd_export_dot(path: &Path, formal_balls: Option<&[Rational]>, output: Option<&Path>, float_tol: Option<f64>) -> Outcome {
    let run = || -> Result<String, CliError> {
        let inst = load(path, float_tol)?;
        let space = carrier(&inst);
        let text = match formal_balls {
            Some(radii) => {
                let d = require_metric(&metric_of(space)?, "--formal-balls", space.kind())?;
                let poset = formal_ball_poset(&d, radii).map_err(|e| CliError::Usage(e.to_string()))?;
                formal_ball_dot(&poset, d.points())
            }
            None => components_dot(&space.bitop().ok_or_else(|| CliError::Usage(format!("no space in {}", space.kind())))?),
        };
        match output {
            Some(out) => write(out, &text).map(|_| String::new()),
            None => Ok(text),
        }
    };
    match run() {
        Ok(stdout) => Outcome::ok(stdout),
        Err(e) => Outcome::from_error(&e),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SearchArgs {
    pub target: String,
    pub mode: String,
    pub n: usize,
    pub seed: u64,
    pub budget: Option<usize>,
    pub threads: Option<usize>,
    pub output: Option<PathBuf>,
    pub record_time: bool,
}

fn instance_wire(inst: &SearchInstance) -> InstanceFile {
    match inst {
        SearchInstance::Bitop(b) => bitop_wire(b),
        SearchInstance::Map { source, target, map } => InstanceFile::Map {
            source: Box::new(bitop_wire(source)),
            target: Box::new(bitop_wire(target)),
            assignment: map.assignment().to_vec(),
        },
    }
}

fn finding_json(f: &Finding) -> Value {
    json!({ "origin": f.origin, "detail": f.detail, "instance": instance_wire(&f.instance) })
}

pub fn search_config(args: &SearchArgs) -> Result<SearchConfig, CliError> {
    let target: Target = args.target.parse().map_err(|e: qconn::connectivity::search::SearchError| CliError::Usage(e.to_string()))?;
    let mode: Mode = args.mode.parse().map_err(|e: qconn::connectivity::search::SearchError| CliError::Usage(e.to_string()))?;
    let mut cfg = SearchConfig::new(target, mode, args.n);
    cfg.seed = args.seed;
    cfg.threads = args.threads;
    cfg.budget = args.budget.unwrap_or(match mode {
        Mode::Exhaustive => usize::MAX,
        Mode::Random => DEFAULT_RANDOM_BUDGET,
    });
    Ok(cfg)
}

pub fn cmd_search(args: &SearchArgs) -> Outcome {
    let run = || -> Result<(i32, String, String), CliError> {
        let cfg = search_config(args)?;
        let start = Instant::now();
        let report = search_counterexamples(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
        let secs = start.elapsed().as_secs_f64();
        let mut stats = json!({
            "instances_tested": report.instances_tested(),
            "seeded_tested": report.seeded_tested,
            "generated_tested": report.generated_tested,
            "failures": report.failures(),
        });
        if args.record_time {
            stats["wall_time_seconds"] = json!(secs);
        }
        let doc = json!({
            "target": report.target.id(),
            "description": report.target.description(),
            "mode": report.mode,
            "n": report.n,
            "seed": report.seed,
            "budget": if report.budget == usize::MAX { Value::Null } else { json!(report.budget) },
            "statistics": stats,
            "findings": report.findings.iter().map(finding_json).collect::<Vec<_>>(),
        });
        let text = render(&doc);
        let stdout = match &args.output {
            Some(out) => {
                write(out, &text)?;
                String::new()
            }
            None => text,
        };
        let stderr = format!(
            "qconn search: {} instances, {} failures, {secs:.3}s\n",
            report.instances_tested(),
            report.failures()
        );
        let code = if report.failures() > 0 { EXIT_FINDINGS } else { EXIT_OK };
        Ok((code, stdout, stderr))
    };
    match run() {
        Ok((code, stdout, stderr)) => Outcome { code, stdout, stderr },
        Err(e) => Outcome::from_error(&e),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn inst(s: &str) -> Instance {
        parse_instance(s.as_bytes()).unwrap().into_instance().unwrap()
    }

    #[test]
    fn parse_categories() {
        assert_eq!(parse_instance(b"\xff\x00").unwrap_err().exit_code(), EXIT_PARSE);
        assert_eq!(parse_instance(b"{\"kind\":").unwrap_err().exit_code(), EXIT_PARSE);
        assert_eq!(parse_instance(b"{\"kind\":\"nope\"}").unwrap_err().exit_code(), EXIT_INVALID);
        assert_eq!(parse_instance(b"[1,2]").unwrap_err().exit_code(), EXIT_INVALID);
    }

    #[test]
    fn digraph_scale_gives_singletons() {
        let i = inst(r#"{"kind":"digraph","vertices":["0","1","2"],"edges":[{"from":0,"to":1,"weight":"1"},{"from":1,"to":2,"weight":"2"}]}"#);
        let opts = AnalyzeOptions { scale: vec![int(10)], ..Default::default() };
        let r = analyze(&i, &opts).unwrap();
        assert_eq!(r["scale"][0]["antisymmetric"], json!([[0], [1], [2]]));
        assert!(r.get("components").is_none());
    }

    #[test]
    fn single_point_passes_everything() {
        let i = inst(r#"{"kind":"quasi_metric","points":["p"],"matrix":[["0"]]}"#);
        let opts = AnalyzeOptions {
            components: true,
            local: true,
            scale: vec![int(1)],
            smyth: true,
            formal_balls: Some(vec![int(0), int(1)]),
            precompact: Some(vec![int(1)]),
            ..Default::default()
        };
        let r = analyze(&i, &opts).unwrap();
        assert_eq!(r["components"]["antisym_connected"], json!(true));
        assert_eq!(r["local"]["locally_antisym_connected"], json!(true));
        assert_eq!(r["smyth"]["conclusion"], json!("complete"));
        assert_eq!(r["join_compactness"]["chain_holds"], json!(true));
        assert_eq!(r["formal_balls"]["transitive"], json!(true));
        assert_eq!(r["precompact"]["monotone"], json!(true));
    }

    #[test]
    fn metric_flags_reject_bare_bitopologies() {
        let i = inst(r#"{"kind":"bitopology","points":["0"],"forward_min_nbhd":[[0]],"backward_min_nbhd":[[0]]}"#);
        let e = analyze(&i, &AnalyzeOptions { smyth: true, ..Default::default() }).unwrap_err();
        assert_eq!(e.exit_code(), EXIT_INVALID);
    }

    #[test]
    fn unknown_target_is_a_usage_error() {
        let args = SearchArgs {
            target: "nope".into(),
            mode: "random".into(),
            n: 3,
            seed: 1,
            budget: None,
            threads: None,
            output: None,
            record_time: false,
        };
        let o = cmd_search(&args);
        assert_eq!(o.code, EXIT_INVALID);
        assert!(o.stdout.contains("unknown property"));
    }
}

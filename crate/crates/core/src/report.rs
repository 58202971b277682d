//! The analysis pipeline and its serializable report. Each section is
//! computed independently where possible; a failing section records its
//! error and the remaining sections still run.

use nalgebra::DMatrix;
use serde::Serialize;

use crate::coxeter::{classify, diagram_from_angles, Classification, GroupStatus, Label, DEFAULT_DENOM_CAP};
use crate::critical::{critical_point, exact_critical_point, exact_hessian, CriticalData};
use crate::model::WalkModel;
use crate::nodal::{classify_nodal, NodalResult};
use crate::spectral::{angle_geometry, isometry_check, AngleGeometry};
use crate::walkgroup::{
    g_vs_h_report, generator_set, property_suite, ExactCovariance, GvsHOptions, GvsHReport, PairOrder, PropertyReport,
};

/// Version of the report layout; bumped on any incompatible change.
pub const SCHEMA_VERSION: &str = "orthwalk-report/1";
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq)]
pub struct AnalyzeOptions {
    pub seed: u64,
    pub denom_cap: u32,
    /// Random words for the property suite.
    pub property_words: usize,
    pub property_word_length: usize,
    pub g_vs_h: GvsHOptions,
}

impl Default for AnalyzeOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            denom_cap: DEFAULT_DENOM_CAP,
            property_words: 50,
            property_word_length: 6,
            g_vs_h: GvsHOptions::default(),
        }
    }
}

/// A report section: its value, or the error that prevented it.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Section<T> {
    Ok { value: T },
    Error { error: String },
}

impl<T> Section<T> {
    pub fn ok(&self) -> Option<&T> {
        match self {
            Section::Ok { value } => Some(value),
            Section::Error { .. } => None,
        }
    }

    pub fn is_error(&self) -> bool {
        matches!(self, Section::Error { .. })
    }
}

fn section<T, E: std::fmt::Display>(r: Result<T, E>) -> Section<T> {
    match r {
        Ok(value) => Section::Ok { value },
        Err(e) => Section::Error { error: e.to_string() },
    }
}

fn matrix_rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    (0..m.nrows()).map(|i| m.row(i).iter().copied().collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModelEcho {
    pub dim: usize,
    pub steps: Vec<Vec<i32>>,
    /// Normalized weights as "p/q".
    pub weights: Vec<String>,
    pub small_step: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CriticalSection {
    pub x0: Vec<f64>,
    /// x0 as exact rationals, when it is rational.
    pub x0_exact: Option<Vec<String>>,
    pub rho: f64,
    pub hessian: Vec<Vec<f64>>,
    pub gradient_residual: f64,
    pub iterations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GeometrySection {
    /// Normalized covariance matrix (a_ij).
    pub delta: Vec<Vec<f64>>,
    pub normals: Vec<Vec<f64>>,
    /// Interior wall angles, and the same divided by π.
    pub angles: Vec<Vec<f64>>,
    pub angles_over_pi: Vec<Vec<f64>>,
    pub isometry_residual: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairLabel {
    pub i: usize,
    pub j: usize,
    pub label: Label,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HSection {
    pub labels: Vec<PairLabel>,
    pub classification: Classification,
    pub types: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GSection {
    /// S_i = Jac_{x0} φ_i, row-major.
    pub generators: Vec<Vec<Vec<f64>>>,
    pub pair_orders: Vec<PairOrder>,
    pub properties: PropertyReport,
    pub comparison: GvsHReport,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AnalysisReport {
    pub schema_version: String,
    pub tool_version: String,
    pub seed: u64,
    pub model: ModelEcho,
    pub critical: Section<CriticalSection>,
    pub geometry: Section<GeometrySection>,
    pub h: Section<HSection>,
    pub g: Section<GSection>,
    pub nodal: Section<NodalResult>,
    /// Violations of "G finite ⇒ H finite"; always empty for a sound run.
    pub consistency_violations: Vec<String>,
}

impl AnalysisReport {
    pub fn has_errors(&self) -> bool {
        self.critical.is_error() || self.geometry.is_error() || self.h.is_error() || self.g.is_error() || self.nodal.is_error()
    }
}

fn upstream<T>(name: &str) -> Section<T> {
    Section::Error { error: format!("skipped: {name} unavailable") }
}

/// Runs every analysis stage except counting.
pub fn analyze(model: &WalkModel, options: &AnalyzeOptions) -> AnalysisReport {
    let echo = ModelEcho {
        dim: model.dim(),
        steps: model.steps().iter().map(|s| s.vector.clone()).collect(),
        weights: model.steps().iter().map(|s| s.weight.to_string()).collect(),
        small_step: model.is_small_step(),
    };
    let critical = critical_point(model);
    let exact_x0 = critical.as_ref().ok().and_then(|c| exact_critical_point(model, &c.x0));
    let critical_section = section(critical.clone().map(|c| CriticalSection {
        x0: c.x0.clone(),
        x0_exact: exact_x0.as_ref().map(|x| x.iter().map(|v| v.to_string()).collect()),
        rho: c.rho,
        hessian: matrix_rows(&c.hessian),
        gradient_residual: c.gradient_residual,
        iterations: c.iterations,
    }));

    let Ok(critical) = critical else {
        return AnalysisReport {
            schema_version: SCHEMA_VERSION.into(),
            tool_version: TOOL_VERSION.into(),
            seed: options.seed,
            model: echo,
            critical: critical_section,
            geometry: upstream("critical point"),
            h: upstream("critical point"),
            g: upstream("critical point"),
            nodal: upstream("critical point"),
            consistency_violations: Vec::new(),
        };
    };

    let geometry = angle_geometry(&critical.delta);
    let geometry_section = section(geometry.clone().map(|g| geometry_section(&critical, &g)));
    let (h, g, nodal) = match &geometry {
        Ok(geo) => {
            let diagram = diagram_from_angles(geo, options.denom_cap);
            let classification = classify(&diagram);
            let labels = diagram.pairs().map(|(i, j, label)| PairLabel { i, j, label }).collect();
            let g = g_section(model, &critical, geo, &classification, exact_x0.as_deref(), options);
            let h = HSection {
                labels,
                types: classification.types().iter().map(|t| t.to_string()).collect(),
                classification,
            };
            (Section::Ok { value: h }, g, Section::Ok { value: classify_nodal(geo) })
        }
        Err(_) => (upstream("covariance geometry"), upstream("covariance geometry"), upstream("covariance geometry")),
    };

    let mut violations = Vec::new();
    if let (Some(hs), Some(gs)) = (h.ok(), g.ok()) {
        let g_finite = matches!(gs.comparison.g.status, GroupStatus::Finite { .. });
        if g_finite && hs.classification.verdict.is_infinite() {
            violations.push("G reported finite while H is infinite".to_string());
        }
    }

    AnalysisReport {
        schema_version: SCHEMA_VERSION.into(),
        tool_version: TOOL_VERSION.into(),
        seed: options.seed,
        model: echo,
        critical: critical_section,
        geometry: geometry_section,
        h,
        g,
        nodal,
        consistency_violations: violations,
    }
}

fn geometry_section(critical: &CriticalData, g: &AngleGeometry) -> GeometrySection {
    GeometrySection {
        delta: matrix_rows(&critical.delta),
        normals: g.u.clone(),
        angles: matrix_rows(&g.hyperplane_angles),
        angles_over_pi: matrix_rows(&g.hyperplane_angles.map(|v| v / std::f64::consts::PI)),
        isometry_residual: isometry_check(critical, g).max_residual,
    }
}

fn g_section(
    model: &WalkModel,
    critical: &CriticalData,
    geometry: &AngleGeometry,
    classification: &Classification,
    exact_x0: Option<&[num_rational::BigRational]>,
    options: &AnalyzeOptions,
) -> Section<GSection> {
    let exact = exact_x0.map(|x| ExactCovariance::from_hessian(&exact_hessian(model, x)));
    let generators = match generator_set(model, critical, options.denom_cap, exact.as_ref()) {
        Ok(g) => g,
        Err(e) => return Section::Error { error: e.to_string() },
    };
    let properties = property_suite(
        &generators,
        critical,
        geometry,
        options.property_words,
        options.property_word_length,
        options.seed,
    );
    let g_options = GvsHOptions { seed: options.seed, ..options.g_vs_h.clone() };
    let comparison = g_vs_h_report(&generators, classification, &g_options);
    Section::Ok {
        value: GSection {
            generators: generators.s.iter().map(matrix_rows).collect(),
            pair_orders: generators.pair_orders.clone(),
            properties,
            comparison,
        },
    }
}

/// Short human-readable summary.
pub fn render_text(r: &AnalysisReport) -> String {
    let mut out = format!("{} (tool {})\n", r.schema_version, r.tool_version);
    out.push_str(&format!("model: d = {}, {} steps\n", r.model.dim, r.model.steps.len()));
    match &r.critical {
        Section::Ok { value } => out.push_str(&format!("critical point: x0 = {:?}, rho = {}\n", value.x0, value.rho)),
        Section::Error { error } => out.push_str(&format!("critical point: error: {error}\n")),
    }
    if let Some(geo) = r.geometry.ok() {
        out.push_str("wall angles / pi:\n");
        for row in &geo.angles_over_pi {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.6}")).collect();
            out.push_str(&format!("  {}\n", cells.join("  ")));
        }
    }
    match &r.h {
        Section::Ok { value } => {
            out.push_str(&format!("H: {}", status_text(&value.classification.verdict.status)));
            if !value.types.is_empty() {
                out.push_str(&format!(" of type {}", value.types.join(" x ")));
            }
            out.push('\n');
            for e in &value.classification.verdict.evidence {
                out.push_str(&format!("  {}: {}\n", e.test, e.outcome));
            }
        }
        Section::Error { error } => out.push_str(&format!("H: error: {error}\n")),
    }
    match &r.g {
        Section::Ok { value } => {
            out.push_str(&format!("G: {}\n", status_text(&value.comparison.g.status)));
            out.push_str(&format!("  {}\n", value.comparison.conclusion));
        }
        Section::Error { error } => out.push_str(&format!("G: error: {error}\n")),
    }
    match &r.nodal {
        Section::Ok { value } if value.is_nodal => out.push_str(&format!(
            "nodal: yes, k = {}, lambda1 = {}, alpha = {}\n",
            value.k.unwrap_or(0),
            value.lambda1.unwrap_or(0),
            value.alpha.unwrap_or(f64::NAN)
        )),
        Section::Ok { value } => {
            out.push_str(&format!("nodal: no ({})\n", value.failure_reason.as_deref().unwrap_or("unknown")))
        }
        Section::Error { error } => out.push_str(&format!("nodal: error: {error}\n")),
    }
    for v in &r.consistency_violations {
        out.push_str(&format!("inconsistency: {v}\n"));
    }
    out
}

fn status_text(s: &GroupStatus) -> String {
    match s {
        GroupStatus::Finite { order } => format!("finite of order {order}"),
        GroupStatus::Infinite { witness } => format!("infinite ({witness})"),
        GroupStatus::Inconclusive { reason } => format!("inconclusive ({reason})"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::models;

    #[test]
    fn identity_covariance_report() {
        let r = analyze(&models::identity_covariance(), &AnalyzeOptions::default());
        assert!(!r.has_errors());
        let h = r.h.ok().unwrap();
        assert_eq!(h.classification.verdict.order(), Some(8));
        let g = r.g.ok().unwrap();
        assert!(g.comparison.g.is_infinite());
        assert!(r.consistency_violations.is_empty());
    }

    #[test]
    fn minus_third_report() {
        let r = analyze(&models::minus_third_covariance(), &AnalyzeOptions::default());
        let h = r.h.ok().unwrap();
        assert!(h.classification.verdict.is_infinite());
        assert!(h.classification.verdict.evidence.iter().any(|e| e.outcome.contains("-1/3")));
        assert!(!r.nodal.ok().unwrap().is_nodal);
        assert!(render_text(&r).contains("nodal: no"));
    }

    #[test]
    fn one_sided_model_reports_error_sections() {
        let m = WalkModel::uniform(2, vec![vec![1, 0], vec![0, 1], vec![1, 1]]).unwrap();
        let r = analyze(&m, &AnalyzeOptions::default());
        assert!(r.critical.is_error());
        assert!(r.nodal.is_error());
        assert!(r.has_errors());
    }

    #[test]
    fn no_inconsistency_on_models() {
        for m in models::small_step_models() {
            let r = analyze(&m, &AnalyzeOptions::default());
            assert!(r.consistency_violations.is_empty(), "{m:?}");
            assert!(!r.has_errors(), "{m:?}");
        }
    }
}

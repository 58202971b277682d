//! Coxeter diagrams built from wall angles, classification against the
//! finite-type catalog, and the infinite-group criteria.

pub mod angles;
pub mod catalog;
pub mod closure;

use std::f64::consts::PI;

use nalgebra::DMatrix;
use serde::Serialize;

use crate::spectral::AngleGeometry;
use angles::{admissible_order, chamber_label, niven_allows, recognize_cosine, ANGLE_TOL};
use catalog::{component_matrix, match_component, TypeName};
use closure::{generate_roots, generic_direction, simple_system, RootSystem};

pub use angles::DEFAULT_DENOM_CAP;

/// Default cap on root-closure size before giving up.
pub const DEFAULT_ROOT_CAP: usize = 10_000;

/// Edge data between two walls.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Label {
    /// The product of the two reflections has order `m`. When `chamber`
    /// holds, the interior angle is exactly π/m.
    Order { m: u32, chamber: bool },
    Infinite,
    /// Cosine between inward normals matching neither rule.
    NonCrystallographic { cosine: f64 },
}

impl Label {
    fn is_commuting(&self) -> bool {
        matches!(self, Label::Order { m: 2, .. })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoxeterDiagram {
    pub rank: usize,
    /// Row-major upper triangle, pairs (i, j) with i < j.
    labels: Vec<Label>,
    pub components: Vec<Vec<usize>>,
    /// Cosines between the inward normals, when the diagram comes from
    /// geometry or labels with a known realization.
    #[serde(skip)]
    pub gram: Option<DMatrix<f64>>,
    #[serde(skip)]
    pub normals: Option<Vec<Vec<f64>>>,
}

fn pair_index(rank: usize, i: usize, j: usize) -> usize {
    let (a, b) = if i < j { (i, j) } else { (j, i) };
    a * rank - a * (a + 1) / 2 + (b - a - 1)
}

impl CoxeterDiagram {
    fn build(rank: usize, labels: Vec<Label>, gram: Option<DMatrix<f64>>, normals: Option<Vec<Vec<f64>>>) -> Self {
        let mut d = Self { rank, labels, components: Vec::new(), gram, normals };
        d.components = d.compute_components();
        d
    }

    /// Label between walls i ≠ j.
    pub fn label(&self, i: usize, j: usize) -> Label {
        assert_ne!(i, j, "diagonal labels are not stored");
        self.labels[pair_index(self.rank, i, j)]
    }

    pub fn pairs(&self) -> impl Iterator<Item = (usize, usize, Label)> + '_ {
        (0..self.rank).flat_map(move |i| (i + 1..self.rank).map(move |j| (i, j, self.label(i, j))))
    }

    fn compute_components(&self) -> Vec<Vec<usize>> {
        let mut comp = vec![usize::MAX; self.rank];
        let mut out = Vec::new();
        for start in 0..self.rank {
            if comp[start] != usize::MAX {
                continue;
            }
            let id = out.len();
            let mut members = vec![start];
            comp[start] = id;
            let mut k = 0;
            while k < members.len() {
                let v = members[k];
                #[allow(clippy::needless_range_loop)]
                for w in 0..self.rank {
                    if w != v && comp[w] == usize::MAX && !self.label(v, w).is_commuting() {
                        comp[w] = id;
                        members.push(w);
                    }
                }
                k += 1;
            }
            members.sort_unstable();
            out.push(members);
        }
        out
    }

    /// Diagram from a Coxeter matrix (entries ≥ 2 off the diagonal; 0 means ∞).
    pub fn from_coxeter_matrix(m: &[Vec<u32>]) -> Self {
        let rank = m.len();
        let mut labels = Vec::new();
        for (i, row) in m.iter().enumerate() {
            for &mij in &row[i + 1..] {
                labels.push(if mij == 0 {
                    Label::Infinite
                } else {
                    Label::Order { m: mij, chamber: true }
                });
            }
        }
        let gram = DMatrix::from_fn(rank, rank, |i, j| {
            if i == j {
                1.0
            } else if m[i][j] == 0 {
                -1.0
            } else {
                -(PI / f64::from(m[i][j])).cos()
            }
        });
        Self::build(rank, labels, Some(gram), None)
    }

    pub fn all_chamber(&self) -> bool {
        self.labels.iter().all(|l| matches!(l, Label::Order { chamber: true, .. }))
    }
}

/// Labels every pair of walls from its interior angle.
pub fn diagram_from_angles(geometry: &AngleGeometry, denom_cap: u32) -> CoxeterDiagram {
    let rank = geometry.rank();
    let mut labels = Vec::new();
    for i in 0..rank {
        for j in i + 1..rank {
            let theta = geometry.hyperplane_angles[(i, j)];
            let c = geometry.gram[(i, j)];
            let label = if let Some(m) = chamber_label(theta, denom_cap) {
                Label::Order { m, chamber: true }
            } else if let Some(m) = admissible_order(c) {
                Label::Order { m, chamber: false }
            } else {
                Label::NonCrystallographic { cosine: c }
            };
            labels.push(label);
        }
    }
    CoxeterDiagram::build(rank, labels, Some(geometry.gram.clone()), Some(geometry.u.clone()))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum GroupStatus {
    Finite { order: u64 },
    Infinite { witness: String },
    Inconclusive { reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Evidence {
    pub test: String,
    pub outcome: String,
}

impl Evidence {
    pub fn new(test: impl Into<String>, outcome: impl Into<String>) -> Self {
        Self { test: test.into(), outcome: outcome.into() }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GroupVerdict {
    #[serde(flatten)]
    pub status: GroupStatus,
    pub evidence: Vec<Evidence>,
}

impl GroupVerdict {
    pub fn is_finite(&self) -> bool {
        matches!(self.status, GroupStatus::Finite { .. })
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self.status, GroupStatus::Infinite { .. })
    }

    pub fn order(&self) -> Option<u64> {
        match self.status {
            GroupStatus::Finite { order } => Some(order),
            _ => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComponentMatch {
    pub vertices: Vec<usize>,
    pub type_name: TypeName,
}

/// Verdict on the reflection group, with its type decomposition when finite.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Classification {
    pub verdict: GroupVerdict,
    /// Irreducible components of the finite group (empty otherwise). For
    /// diagrams that are not chamber diagrams, the components refer to a
    /// simple system recomputed from the root closure.
    pub components: Vec<ComponentMatch>,
    /// Number of reflections when finite.
    pub reflections: Option<u64>,
}

impl Classification {
    pub fn types(&self) -> Vec<TypeName> {
        let mut t: Vec<TypeName> = self.components.iter().map(|c| c.type_name).collect();
        t.sort();
        t
    }

    fn finite(components: Vec<ComponentMatch>, evidence: Vec<Evidence>) -> Self {
        let order = components.iter().map(|c| c.type_name.order()).product();
        let reflections = components.iter().map(|c| c.type_name.reflections()).sum();
        Self {
            verdict: GroupVerdict { status: GroupStatus::Finite { order }, evidence },
            components,
            reflections: Some(reflections),
        }
    }

    fn other(status: GroupStatus, evidence: Vec<Evidence>) -> Self {
        Self { verdict: GroupVerdict { status, evidence }, components: Vec::new(), reflections: None }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfiniteWitness {
    pub pair: (usize, usize),
    pub cosine: f64,
    pub description: String,
}

/// Infinite-group test: fires when no pair of walls is orthogonal to all
/// the others and some off-diagonal cosine lies outside the admissible list.
pub fn prop_app_test(delta: &DMatrix<f64>) -> Option<InfiniteWitness> {
    let d = delta.nrows();
    for i in 0..d {
        for j in i + 1..d {
            let isolated = (0..d)
                .filter(|&k| k != i && k != j)
                .all(|k| delta[(i, k)].abs() < ANGLE_TOL && delta[(j, k)].abs() < ANGLE_TOL);
            if isolated {
                return None;
            }
        }
    }
    for i in 0..d {
        for j in i + 1..d {
            let c = delta[(i, j)];
            if admissible_order(c).is_none() {
                return Some(InfiniteWitness {
                    pair: (i, j),
                    cosine: c,
                    description: format!(
                        "a[{i}][{j}] = {} lies outside the admissible cosine set and no 2x2 block splits off",
                        cosine_text(c)
                    ),
                });
            }
        }
    }
    None
}

fn cosine_text(c: f64) -> String {
    match recognize_cosine(c) {
        Some((p, q)) if q != 1 => format!("{p}/{q}"),
        Some((p, _)) => format!("{p}"),
        None => format!("{c:.12}"),
    }
}

/// Splits a finite root system into irreducible components by rebuilding a
/// chamber diagram from a simple system.
fn types_from_roots(system: &RootSystem) -> Option<Vec<ComponentMatch>> {
    let dir = generic_direction(&system.roots);
    let simple = simple_system(system, &dir);
    let geometry = AngleGeometry::from_normals(&simple);
    let diagram = diagram_from_angles(&geometry, 64);
    if !diagram.all_chamber() {
        return None;
    }
    match_components(&diagram)
}

fn match_components(diagram: &CoxeterDiagram) -> Option<Vec<ComponentMatch>> {
    let labels = |i: usize, j: usize| diagram.label(i, j);
    diagram
        .components
        .iter()
        .map(|vs| {
            let m = component_matrix(&labels, vs)?;
            match_component(&m).map(|t| ComponentMatch { vertices: vs.clone(), type_name: t })
        })
        .collect()
}

/// Classifies the group generated by the reflections in the walls.
pub fn classify(diagram: &CoxeterDiagram) -> Classification {
    classify_with_cap(diagram, DEFAULT_ROOT_CAP)
}

pub fn classify_with_cap(diagram: &CoxeterDiagram, root_cap: usize) -> Classification {
    let mut evidence = Vec::new();

    if let Some((i, j, _)) = diagram.pairs().find(|(_, _, l)| *l == Label::Infinite) {
        let w = format!("label between walls {i} and {j} is infinite");
        evidence.push(Evidence::new("labels", w.clone()));
        return Classification::other(GroupStatus::Infinite { witness: w }, evidence);
    }

    let has_noncrystal = diagram.pairs().any(|(_, _, l)| matches!(l, Label::NonCrystallographic { .. }));
    if let (true, Some(gram)) = (has_noncrystal, &diagram.gram) {
        match prop_app_test(gram) {
            Some(w) => {
                evidence.push(Evidence::new("admissible_cosine_test", w.description.clone()));
                return Classification::other(GroupStatus::Infinite { witness: w.description }, evidence);
            }
            None => evidence.push(Evidence::new("admissible_cosine_test", "no witness")),
        }
        for (i, j, l) in diagram.pairs() {
            if let Label::NonCrystallographic { cosine } = l {
                let rot = 2.0 * cosine * cosine - 1.0;
                if let Some((p, q)) = recognize_cosine(rot).filter(|&(p, q)| !niven_allows(p, q)) {
                    let w = format!(
                        "rotation between walls {i} and {j} has rational cosine {p}/{q} outside {{0, ±1/2, ±1}} (numerically recognized)"
                    );
                    evidence.push(Evidence::new("rational_cosine_rule", w.clone()));
                    return Classification::other(GroupStatus::Infinite { witness: w }, evidence);
                }
            }
        }
        evidence.push(Evidence::new("rational_cosine_rule", "no rational rotation cosine recognized"));
    }

    if diagram.all_chamber() {
        match match_components(diagram) {
            Some(components) => {
                let names: Vec<String> = components.iter().map(|c| c.type_name.to_string()).collect();
                evidence.push(Evidence::new("catalog_match", names.join(" x ")));
                return Classification::finite(components, evidence);
            }
            None => {
                let w = "a connected component of the chamber diagram matches no finite type".to_string();
                evidence.push(Evidence::new("catalog_match", w.clone()));
                return Classification::other(GroupStatus::Infinite { witness: w }, evidence);
            }
        }
    }

    let Some(normals) = &diagram.normals else {
        let reason = "non-chamber labels without a geometric realization".to_string();
        evidence.push(Evidence::new("root_closure", "skipped: no normals"));
        return Classification::other(GroupStatus::Inconclusive { reason }, evidence);
    };
    match generate_roots(normals, root_cap) {
        Ok(system) => match types_from_roots(&system) {
            Some(components) => {
                let names: Vec<String> = components.iter().map(|c| c.type_name.to_string()).collect();
                evidence.push(Evidence::new(
                    "root_closure",
                    format!("closed with {} reflections; simple system of type {}", system.k(), names.join(" x ")),
                ));
                Classification::finite(components, evidence)
            }
            None => {
                let reason = "root closure finished but no simple system was recognized".to_string();
                evidence.push(Evidence::new("root_closure", reason.clone()));
                Classification::other(GroupStatus::Inconclusive { reason }, evidence)
            }
        },
        Err(e) => {
            let noncrystal: Vec<String> = diagram
                .pairs()
                .filter_map(|(i, j, l)| match l {
                    Label::NonCrystallographic { cosine } => Some(format!("a[{i}][{j}] = {}", cosine_text(cosine))),
                    _ => None,
                })
                .collect();
            let reason = format!(
                "root closure exceeded cap {}; no infinite-group criterion applied ({})",
                e.cap,
                if noncrystal.is_empty() { "all labels admissible".to_string() } else { noncrystal.join(", ") }
            );
            evidence.push(Evidence::new("root_closure", format!("exceeded cap {}", e.cap)));
            Classification::other(GroupStatus::Inconclusive { reason }, evidence)
        }
    }
}

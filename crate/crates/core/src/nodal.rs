//! Polyhedral nodal domains: the chamber test, the first Dirichlet
//! eigenvalue λ₁ = k(d−2+k) with its exponent, the antisymmetric polynomial
//! P₀, and the low-dimensional catalogs.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;
use std::ops::{AddAssign, Mul};

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::closure::{generate_roots, generic_direction};
use crate::coxeter::{classify, diagram_from_angles, Label, DEFAULT_DENOM_CAP, DEFAULT_ROOT_CAP};
use crate::numeric::{ratio_to_f64, recognize_rational};
use crate::spectral::AngleGeometry;

/// Largest number of linear factors expanded into P₀ by default.
pub const DEFAULT_EXPANSION_CAP: usize = 24;
pub const HARMONIC_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum NodalError {
    #[error("catalog is available for d = 2, 3, 4 (got d = {0})")]
    UnsupportedDimension(usize),
    #[error("{k} hyperplanes exceed the expansion cap {cap}")]
    ExpansionCap { k: usize, cap: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NodalResult {
    pub is_nodal: bool,
    pub ambient_dim: usize,
    pub coxeter_type: Vec<String>,
    /// Number of reflection hyperplanes.
    pub k: Option<u64>,
    pub lambda1: Option<u64>,
    pub alpha: Option<f64>,
    pub failure_reason: Option<String>,
    /// Relative size of Δ P₀, when P₀ was expanded.
    pub harmonic_residual: Option<f64>,
    pub p0_exact: Option<bool>,
}

impl NodalResult {
    fn failure(ambient_dim: usize, reason: String) -> Self {
        Self {
            is_nodal: false,
            ambient_dim,
            coxeter_type: Vec::new(),
            k: None,
            lambda1: None,
            alpha: None,
            failure_reason: Some(reason),
            harmonic_residual: None,
            p0_exact: None,
        }
    }
}

/// λ₁ = k(d−2+k); zero for the half-line.
pub fn lambda1(k: u64, d: usize) -> u64 {
    let v = k as i64 * (d as i64 - 2 + k as i64);
    v.max(0) as u64
}

/// α = 1 + √(λ₁ + (d/2 − 1)²).
pub fn exponent(lambda1: f64, d: usize) -> f64 {
    let h = d as f64 / 2.0 - 1.0;
    1.0 + (lambda1 + h * h).sqrt()
}

/// Decides whether the walls bound a chamber of a finite reflection group.
pub fn classify_nodal(geometry: &AngleGeometry) -> NodalResult {
    classify_nodal_with_cap(geometry, DEFAULT_EXPANSION_CAP)
}

pub fn classify_nodal_with_cap(geometry: &AngleGeometry, expansion_cap: usize) -> NodalResult {
    let d = geometry.ambient_dim();
    let diagram = diagram_from_angles(geometry, DEFAULT_DENOM_CAP);
    if let Some((i, j, _)) = diagram.pairs().find(|(_, _, l)| !matches!(l, Label::Order { chamber: true, .. })) {
        let theta = geometry.hyperplane_angles[(i, j)];
        return NodalResult::failure(
            d,
            format!("angle between walls {i} and {j} is {:.12}·π, not π/m", theta / PI),
        );
    }
    let classification = classify(&diagram);
    if !classification.verdict.is_finite() {
        return NodalResult::failure(d, "chamber diagram does not classify as a finite group".into());
    }
    let system = match generate_roots(&geometry.u, DEFAULT_ROOT_CAP) {
        Ok(s) => s,
        Err(e) => return NodalResult::failure(d, format!("root closure exceeded cap {}", e.cap)),
    };
    let k = system.k() as u64;
    if classification.reflections != Some(k) {
        return NodalResult::failure(d, format!("root closure found {k} reflections, catalog disagrees"));
    }
    let roots = system.positive(&generic_direction(&system.roots));
    let (harmonic_residual, p0_exact) = match build_p0_with_cap(&roots, expansion_cap) {
        Ok(p) => (Some(check_harmonic(&p)), Some(p.is_exact())),
        Err(_) => (None, None),
    };
    let l1 = lambda1(k, d);
    NodalResult {
        is_nodal: true,
        ambient_dim: d,
        coxeter_type: classification.types().iter().map(|t| t.to_string()).collect(),
        k: Some(k),
        lambda1: Some(l1),
        alpha: Some(exponent(l1 as f64, d)),
        failure_reason: None,
        harmonic_residual,
        p0_exact,
    }
}

/// Walls with the given pairwise interior angles, realized by a Cholesky
/// factor of the Gram matrix −cos θ_ij. `angles` lists the upper triangle
/// row by row. None when the Gram matrix is not positive definite.
pub fn geometry_from_angles(rank: usize, angles: &[f64]) -> Option<AngleGeometry> {
    assert_eq!(angles.len(), rank * (rank - 1) / 2);
    let mut gram = DMatrix::identity(rank, rank);
    let mut it = angles.iter();
    for i in 0..rank {
        for j in i + 1..rank {
            let c = -it.next().unwrap().cos();
            gram[(i, j)] = c;
            gram[(j, i)] = c;
        }
    }
    let l = gram.cholesky()?.l();
    let normals: Vec<Vec<f64>> = (0..rank).map(|i| l.row(i).iter().copied().collect()).collect();
    Some(AngleGeometry::from_normals(&normals))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WeylType {
    A,
    B,
}

/// The chamber 0 < x_1 < ⋯ < x_d (type B) or x_1 < ⋯ < x_d (type A) in ℝ^d.
pub fn weyl_chamber(kind: WeylType, d: usize) -> NodalResult {
    assert!(d >= 2);
    let unit = |i: usize| (0..d).map(|k| if k == i { 1.0 } else { 0.0 }).collect::<Vec<f64>>();
    let mut normals: Vec<Vec<f64>> = (0..d - 1)
        .map(|i| unit(i + 1).iter().zip(unit(i)).map(|(a, b)| a - b).collect())
        .collect();
    if kind == WeylType::B {
        normals.insert(0, unit(0));
    }
    classify_nodal(&AngleGeometry::from_normals(&normals))
}

/// Coefficients usable in the expansion of P₀.
pub trait Coefficient: Clone + Zero + AddAssign + Mul<Output = Self> + fmt::Debug {
    fn from_u32(v: u32) -> Self;
    fn magnitude(&self) -> f64;
}

impl Coefficient for f64 {
    fn from_u32(v: u32) -> Self {
        f64::from(v)
    }
    fn magnitude(&self) -> f64 {
        self.abs()
    }
}

impl Coefficient for BigRational {
    fn from_u32(v: u32) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn magnitude(&self) -> f64 {
        ratio_to_f64(&self.abs())
    }
}

/// Homogeneous polynomial stored as exponent vector → coefficient.
#[derive(Clone, Debug, PartialEq)]
pub struct Homogeneous<T> {
    pub nvars: usize,
    pub terms: BTreeMap<Vec<u32>, T>,
}

impl<T: Coefficient> Homogeneous<T> {
    pub fn product_of_forms(nvars: usize, forms: &[Vec<T>]) -> Self {
        let mut terms = BTreeMap::from([(vec![0u32; nvars], T::from_u32(1))]);
        for form in forms {
            let mut next: BTreeMap<Vec<u32>, T> = BTreeMap::new();
            for (e, c) in &terms {
                for (i, a) in form.iter().enumerate() {
                    if a.is_zero() {
                        continue;
                    }
                    let mut e2 = e.clone();
                    e2[i] += 1;
                    *next.entry(e2).or_insert_with(T::zero) += c.clone() * a.clone();
                }
            }
            next.retain(|_, c| !c.is_zero());
            terms = next;
        }
        Self { nvars, terms }
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next().map(|e| e.iter().sum())
    }

    pub fn max_coefficient(&self) -> f64 {
        self.terms.values().map(Coefficient::magnitude).fold(0.0, f64::max)
    }

    /// Σ_i ∂²/∂x_i², term by term.
    pub fn laplacian(&self) -> Self {
        let mut terms: BTreeMap<Vec<u32>, T> = BTreeMap::new();
        for (e, c) in &self.terms {
            for i in 0..self.nvars {
                if e[i] >= 2 {
                    let mut e2 = e.clone();
                    e2[i] -= 2;
                    *terms.entry(e2).or_insert_with(T::zero) += c.clone() * T::from_u32(e[i] * (e[i] - 1));
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { nvars: self.nvars, terms }
    }

    /// x·∇p − k·p, which vanishes for a form of degree k.
    pub fn euler_defect(&self, k: u32) -> Self {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            let deg: u32 = e.iter().sum();
            if deg != k {
                // Coefficient (deg − k)·c, sign folded into the magnitude check.
                let diff = deg.abs_diff(k);
                terms.insert(e.clone(), c.clone() * T::from_u32(diff));
            }
        }
        Self { nvars: self.nvars, terms }
    }

    pub fn eval_f64(&self, x: &[f64]) -> f64
    where
        T: ToPrimitive,
    {
        self.terms
            .iter()
            .map(|(e, c)| c.to_f64().unwrap_or(f64::NAN) * e.iter().zip(x).map(|(&p, v)| v.powi(p as i32)).product::<f64>())
            .sum()
    }
}

/// P₀ = ∏ ⟨r, x⟩ over one root per hyperplane.
#[derive(Clone, Debug, PartialEq)]
pub enum PolyP0 {
    Exact(Homogeneous<BigRational>),
    Float(Homogeneous<f64>),
}

impl PolyP0 {
    pub fn is_exact(&self) -> bool {
        matches!(self, PolyP0::Exact(_))
    }

    pub fn degree(&self) -> Option<u32> {
        match self {
            PolyP0::Exact(p) => p.degree(),
            PolyP0::Float(p) => p.degree(),
        }
    }

    pub fn len(&self) -> usize {
        match self {
            PolyP0::Exact(p) => p.terms.len(),
            PolyP0::Float(p) => p.terms.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            PolyP0::Exact(p) => p.eval_f64(x),
            PolyP0::Float(p) => p.eval_f64(x),
        }
    }

    /// Exponent/coefficient list with float coefficients.
    pub fn float_terms(&self) -> Vec<(Vec<u32>, f64)> {
        match self {
            PolyP0::Exact(p) => p.terms.iter().map(|(e, c)| (e.clone(), ratio_to_f64(c))).collect(),
            PolyP0::Float(p) => p.terms.iter().map(|(e, c)| (e.clone(), *c)).collect(),
        }
    }
}

/// A root rescaled so its largest entry is ±1, as small-denominator
/// rationals, if possible.
fn rational_root(r: &[f64]) -> Option<Vec<BigRational>> {
    let m = r.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    r.iter()
        .map(|v| {
            let (p, q) = recognize_rational(v / m, 64, 1e-9)?;
            Some(BigRational::new(p.into(), q.into()))
        })
        .collect()
}

pub fn build_p0(roots: &[Vec<f64>]) -> Result<PolyP0, NodalError> {
    build_p0_with_cap(roots, DEFAULT_EXPANSION_CAP)
}

pub fn build_p0_with_cap(roots: &[Vec<f64>], cap: usize) -> Result<PolyP0, NodalError> {
    if roots.len() > cap {
        return Err(NodalError::ExpansionCap { k: roots.len(), cap });
    }
    let n = roots.first().map_or(0, Vec::len);
    let exact: Option<Vec<Vec<BigRational>>> = roots.iter().map(|r| rational_root(r)).collect();
    Ok(match exact {
        Some(forms) => PolyP0::Exact(Homogeneous::product_of_forms(n, &forms)),
        None => PolyP0::Float(Homogeneous::product_of_forms(n, roots)),
    })
}

/// max |coefficient of Δp| relative to max |coefficient of p|; exactly zero
/// when an exact P₀ is harmonic.
pub fn check_harmonic(p: &PolyP0) -> f64 {
    let (lap, norm) = match p {
        PolyP0::Exact(h) => (h.laplacian().max_coefficient(), h.max_coefficient()),
        PolyP0::Float(h) => (h.laplacian().max_coefficient(), h.max_coefficient()),
    };
    if norm == 0.0 {
        0.0
    } else {
        lap / norm
    }
}

/// True when x·∇P₀ = k·P₀ holds term by term.
pub fn check_euler(p: &PolyP0, k: u32) -> bool {
    match p {
        PolyP0::Exact(h) => h.euler_defect(k).terms.is_empty(),
        PolyP0::Float(h) => h.euler_defect(k).terms.is_empty(),
    }
}

/// Wall angle π/m with m fixed or given by a row parameter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum AngleEntry {
    Fixed(u32),
    Param(usize),
}

/// Reflection count c + Σ params[i] for the listed parameter indices.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CountExpr {
    pub constant: u64,
    pub params: Vec<usize>,
}

const PARAM_NAMES: [&str; 2] = ["k", "k'"];

impl CountExpr {
    fn eval(&self, params: &[u32]) -> u64 {
        self.constant + self.params.iter().map(|&i| u64::from(params[i])).sum::<u64>()
    }

    fn shifted_text(&self, shift: u64) -> String {
        let mut parts: Vec<String> = self.params.iter().map(|&i| PARAM_NAMES[i].to_string()).collect();
        if self.constant + shift > 0 || parts.is_empty() {
            parts.push((self.constant + shift).to_string());
        }
        parts.join("+")
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogRow {
    pub dim: usize,
    pub angles: Vec<AngleEntry>,
    pub group: String,
    pub k: CountExpr,
}

impl CatalogRow {
    pub fn parameters(&self) -> usize {
        self.k.params.len()
    }

    pub fn angles_text(&self) -> String {
        let parts: Vec<String> = self
            .angles
            .iter()
            .map(|a| match a {
                AngleEntry::Fixed(m) => format!("pi/{m}"),
                AngleEntry::Param(i) => format!("pi/{}", PARAM_NAMES[*i]),
            })
            .collect();
        format!("({})", parts.join(", "))
    }

    pub fn k_text(&self) -> String {
        self.k.shifted_text(0)
    }

    /// λ₁ = r(r+d−2) with r the reflection count; "k^2" for planar wedges.
    pub fn lambda1_text(&self) -> String {
        if self.parameters() == 0 {
            return lambda1(self.k.constant, self.dim).to_string();
        }
        let shift = self.dim as u64 - 2;
        if shift == 0 && self.k.constant == 0 && self.k.params.len() == 1 {
            return format!("{}^2", PARAM_NAMES[self.k.params[0]]);
        }
        format!("({})({})", self.k.shifted_text(0), self.k.shifted_text(shift))
    }

    pub fn instantiate(&self, params: &[u32]) -> CatalogInstance {
        let angles = self
            .angles
            .iter()
            .map(|a| match a {
                AngleEntry::Fixed(m) => *m,
                AngleEntry::Param(i) => params[*i],
            })
            .collect();
        let k = self.k.eval(params);
        CatalogInstance { dim: self.dim, denominators: angles, k, lambda1: lambda1(k, self.dim) }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CatalogInstance {
    pub dim: usize,
    /// Wall angles π/m, upper triangle row by row.
    pub denominators: Vec<u32>,
    pub k: u64,
    pub lambda1: u64,
}

impl CatalogInstance {
    pub fn geometry(&self) -> Option<AngleGeometry> {
        let angles: Vec<f64> = self.denominators.iter().map(|&m| PI / f64::from(m)).collect();
        geometry_from_angles(self.dim, &angles)
    }
}

fn row(dim: usize, angles: &[AngleEntry], group: &str, constant: u64, params: &[usize]) -> CatalogRow {
    CatalogRow {
        dim,
        angles: angles.to_vec(),
        group: group.to_string(),
        k: CountExpr { constant, params: params.to_vec() },
    }
}

/// Every polyhedral nodal domain with d walls in dimension d ∈ {2, 3, 4},
/// up to isometry; parameters range over integers ≥ 2.
pub fn catalog_tuples(d: usize) -> Result<Vec<CatalogRow>, NodalError> {
    use AngleEntry::{Fixed as F, Param as P};
    let rows = match d {
        2 => vec![row(2, &[P(0)], "I2(k)", 0, &[0])],
        3 => vec![
            row(3, &[F(2), F(2), F(2)], "A1 x A1 x A1", 3, &[]),
            row(3, &[F(2), F(2), P(0)], "A1 x I2(k)", 1, &[0]),
            row(3, &[F(3), F(2), F(3)], "A3", 6, &[]),
            row(3, &[F(3), F(2), F(4)], "B3", 9, &[]),
            row(3, &[F(5), F(2), F(3)], "H3", 15, &[]),
        ],
        4 => vec![
            row(4, &[F(2); 6], "A1 x A1 x A1 x A1", 4, &[]),
            row(4, &[F(2), F(2), F(2), F(2), F(2), P(0)], "A1 x A1 x I2(k)", 2, &[0]),
            row(4, &[P(0), F(2), F(2), F(2), F(2), P(1)], "I2(k) x I2(k')", 0, &[0, 1]),
            row(4, &[F(2), F(2), F(2), F(2), F(3), F(3)], "A1 x A3", 7, &[]),
            row(4, &[F(2), F(2), F(2), F(2), F(3), F(4)], "A1 x B3", 10, &[]),
            row(4, &[F(2), F(2), F(2), F(2), F(3), F(5)], "A1 x H3", 16, &[]),
            row(4, &[F(3), F(2), F(2), F(3), F(2), F(3)], "A4", 10, &[]),
            row(4, &[F(3), F(2), F(2), F(3), F(2), F(4)], "B4", 16, &[]),
            row(4, &[F(3), F(3), F(3), F(2), F(2), F(2)], "D4", 12, &[]),
            row(4, &[F(3), F(2), F(2), F(4), F(2), F(3)], "F4", 24, &[]),
            row(4, &[F(5), F(2), F(2), F(3), F(2), F(3)], "H4", 60, &[]),
        ],
        _ => return Err(NodalError::UnsupportedDimension(d)),
    };
    Ok(rows)
}

/// Tab-separated dump of the catalog.
pub fn catalog_tsv(d: usize) -> Result<String, NodalError> {
    let mut out = String::from("angles\tgroup\tk\tlambda1\n");
    for r in catalog_tuples(d)? {
        out.push_str(&format!("{}\t{}\t{}\t{}\n", r.angles_text(), r.group, r.k_text(), r.lambda1_text()));
    }
    Ok(out)
}

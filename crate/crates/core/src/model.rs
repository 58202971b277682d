//! Weighted step sets: parsing, validation, normalization, the sections of the
//! inventory along each axis, and a windowed irreducibility check.
//!
//! Axes are 0-based throughout the crate.

use std::collections::{HashSet, VecDeque};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Deserialize;
use thiserror::Error;

use crate::poly::LaurentPoly;

/// Validation failures for a step set.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Problem {
    #[error("the step set is empty")]
    EmptyStepSet,
    #[error("dimension must be at least 1, got {0}")]
    BadDimension(i64),
    #[error("duplicate step {0:?}")]
    DuplicateStep(Vec<i32>),
    #[error("zero step is not allowed")]
    ZeroStep,
    #[error("weight {0} is not positive")]
    NonPositiveWeight(String),
    #[error("step has {found} coordinates, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("{weights} weights given for {steps} steps")]
    WeightCount { steps: usize, weights: usize },
    #[error("cannot parse weight {0:?}; expected \"p/q\"")]
    BadWeight(String),
    #[error("coordinate {0} out of range")]
    CoordinateRange(i64),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("syntax error: {message}")]
    Syntax { message: String },
    #[error("{}{problem}", line.map(|l| format!("line {l}: ")).unwrap_or_default())]
    Invalid { line: Option<usize>, problem: Problem },
    #[error("model is not small-step; sections need every coordinate in {{-1,0,1}}")]
    NotSmallStep,
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("section {part}_{axis} vanishes identically; the involution along axis {axis} is undefined")]
    EmptySection { axis: usize, part: char },
}

impl ModelError {
    fn invalid(problem: Problem) -> Self {
        ModelError::Invalid { line: None, problem }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub vector: Vec<i32>,
    pub weight: BigRational,
}

/// A validated step set with weights normalized to sum exactly to 1.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WalkModel {
    d: usize,
    steps: Vec<Step>,
    small_step: bool,
}

impl WalkModel {
    /// Validates and normalizes. Weights only need to be positive.
    pub fn new(d: usize, steps: Vec<(Vec<i32>, BigRational)>) -> Result<Self, ModelError> {
        if d == 0 {
            return Err(ModelError::invalid(Problem::BadDimension(0)));
        }
        if steps.is_empty() {
            return Err(ModelError::invalid(Problem::EmptyStepSet));
        }
        let mut seen = HashSet::new();
        for (v, w) in &steps {
            if v.len() != d {
                return Err(ModelError::invalid(Problem::DimensionMismatch {
                    expected: d,
                    found: v.len(),
                }));
            }
            if v.iter().all(|&c| c == 0) {
                return Err(ModelError::invalid(Problem::ZeroStep));
            }
            if !w.is_positive() {
                return Err(ModelError::invalid(Problem::NonPositiveWeight(w.to_string())));
            }
            if !seen.insert(v.clone()) {
                return Err(ModelError::invalid(Problem::DuplicateStep(v.clone())));
            }
        }
        let total: BigRational = steps.iter().map(|(_, w)| w.clone()).sum();
        let small_step = steps.iter().all(|(v, _)| v.iter().all(|c| c.abs() <= 1));
        let steps = steps
            .into_iter()
            .map(|(vector, w)| Step { vector, weight: w / &total })
            .collect();
        Ok(Self { d, steps, small_step })
    }

    /// Uniform weights.
    pub fn uniform(d: usize, vectors: Vec<Vec<i32>>) -> Result<Self, ModelError> {
        Self::new(d, vectors.into_iter().map(|v| (v, BigRational::one())).collect())
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    pub fn is_small_step(&self) -> bool {
        self.small_step
    }

    pub fn is_uniform(&self) -> bool {
        self.steps.windows(2).all(|w| w[0].weight == w[1].weight)
    }

    /// Maximum ∞-norm of a step.
    pub fn max_step_norm(&self) -> i32 {
        self.steps.iter().flat_map(|s| s.vector.iter().map(|c| c.abs())).max().unwrap_or(0)
    }

    /// The inventory χ as a Laurent polynomial.
    pub fn inventory(&self) -> LaurentPoly {
        LaurentPoly::from_terms(self.d, self.steps.iter().map(|s| (s.vector.clone(), s.weight.clone())))
    }

    /// Axes on which the step set lacks a positive or a negative coordinate.
    pub fn one_sided_axes(&self) -> Vec<usize> {
        (0..self.d)
            .filter(|&i| {
                let pos = self.steps.iter().any(|s| s.vector[i] > 0);
                let neg = self.steps.iter().any(|s| s.vector[i] < 0);
                !(pos && neg)
            })
            .collect()
    }

    /// Canonical TOML rendering; `parse_model` inverts it exactly.
    pub fn to_toml_string(&self) -> String {
        let mut out = format!("dim = {}\nsteps = [\n", self.d);
        for s in &self.steps {
            let coords: Vec<String> = s.vector.iter().map(|c| c.to_string()).collect();
            out.push_str(&format!("  [{}],\n", coords.join(", ")));
        }
        out.push_str("]\nweights = [");
        let ws: Vec<String> = self.steps.iter().map(|s| format!("\"{}\"", s.weight)).collect();
        out.push_str(&ws.join(", "));
        out.push_str("]\n");
        out
    }
}

impl fmt::Display for WalkModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "d={} |S|={}", self.d, self.steps.len())
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawModel {
    dim: toml::Spanned<i64>,
    steps: Vec<toml::Spanned<Vec<i64>>>,
    weights: Option<toml::Spanned<Vec<toml::Spanned<String>>>>,
}

/// Parses a TOML model document:
///
/// ```toml
/// dim = 2
/// steps = [[1, 0], [-1, 0], [0, 1], [0, -1]]
/// weights = ["1/4", "1/4", "1/4", "1/4"]   # optional
/// ```
pub fn parse_model(document: &str) -> Result<WalkModel, ModelError> {
    let raw: RawModel =
        toml::from_str(document).map_err(|e| ModelError::Syntax { message: e.to_string() })?;
    let line_of = |span: std::ops::Range<usize>| Some(line_number(document, span.start));
    let at = |span, problem| ModelError::Invalid { line: line_of(span), problem };

    let dim = *raw.dim.get_ref();
    if dim < 1 {
        return Err(at(raw.dim.span(), Problem::BadDimension(dim)));
    }
    let d = dim as usize;
    if raw.steps.is_empty() {
        return Err(at(raw.dim.span(), Problem::EmptyStepSet));
    }

    let weights: Vec<(BigRational, std::ops::Range<usize>)> = match &raw.weights {
        None => raw.steps.iter().map(|s| (BigRational::one(), s.span())).collect(),
        Some(ws) => {
            if ws.get_ref().len() != raw.steps.len() {
                return Err(at(
                    ws.span(),
                    Problem::WeightCount { steps: raw.steps.len(), weights: ws.get_ref().len() },
                ));
            }
            let mut out = Vec::with_capacity(ws.get_ref().len());
            for w in ws.get_ref() {
                let text = w.get_ref().trim();
                let value: BigRational =
                    text.parse().map_err(|_| at(w.span(), Problem::BadWeight(text.to_string())))?;
                out.push((value, w.span()));
            }
            out
        }
    };

    let mut seen = HashSet::new();
    let mut steps = Vec::with_capacity(raw.steps.len());
    for (s, (w, wspan)) in raw.steps.iter().zip(weights) {
        let coords = s.get_ref();
        if coords.len() != d {
            return Err(at(
                s.span(),
                Problem::DimensionMismatch { expected: d, found: coords.len() },
            ));
        }
        let mut v = Vec::with_capacity(d);
        for &c in coords {
            let c32 = i32::try_from(c)
                .ok()
                .filter(|c| c.abs() <= 1 << 20)
                .ok_or_else(|| at(s.span(), Problem::CoordinateRange(c)))?;
            v.push(c32);
        }
        if v.iter().all(|&c| c == 0) {
            return Err(at(s.span(), Problem::ZeroStep));
        }
        if !w.is_positive() {
            return Err(at(wspan, Problem::NonPositiveWeight(w.to_string())));
        }
        if !seen.insert(v.clone()) {
            return Err(at(s.span(), Problem::DuplicateStep(v)));
        }
        steps.push((v, w));
    }
    WalkModel::new(d, steps)
}

fn line_number(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].bytes().filter(|&b| b == b'\n').count() + 1
}

/// χ = x_i·A_i + B_i + C_i/x_i. The three polynomials are stored in all `d`
/// variables but never involve x_i.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectionTriple {
    pub axis: usize,
    pub a: LaurentPoly,
    pub b: LaurentPoly,
    pub c: LaurentPoly,
}

impl SectionTriple {
    /// Rebuilds the inventory from the sections.
    pub fn reconstruct(&self) -> LaurentPoly {
        let mut e = vec![0; self.a.nvars()];
        e[self.axis] = 1;
        let up = self.a.shift(&e);
        e[self.axis] = -1;
        let down = self.c.shift(&e);
        &(&up + &self.b) + &down
    }
}

/// Splits the inventory by the exponent of x_i.
pub fn sections(model: &WalkModel, i: usize) -> Result<SectionTriple, ModelError> {
    if !model.small_step {
        return Err(ModelError::NotSmallStep);
    }
    if i >= model.d {
        return Err(ModelError::AxisOutOfRange { axis: i, dim: model.d });
    }
    let mut parts = [LaurentPoly::zero(model.d), LaurentPoly::zero(model.d), LaurentPoly::zero(model.d)];
    for s in &model.steps {
        let mut e = s.vector.clone();
        let k = e[i];
        e[i] = 0;
        let slot = match k {
            1 => 0,
            0 => 1,
            _ => 2,
        };
        parts[slot].add_term(e, s.weight.clone());
    }
    let [a, b, c] = parts;
    if a.is_zero() {
        return Err(ModelError::EmptySection { axis: i, part: 'A' });
    }
    if c.is_zero() {
        return Err(ModelError::EmptySection { axis: i, part: 'C' });
    }
    Ok(SectionTriple { axis: i, a, b, c })
}

/// Windowed irreducibility certificate: every pair of points with all
/// coordinates ≤ 3 is mutually reachable inside `[0, box_radius]^d`.
///
/// A radius below twice the largest step norm is raised to that bound.
pub fn check_h1(model: &WalkModel, box_radius: usize) -> bool {
    let d = model.d;
    let r = box_radius.max(2 * model.max_step_norm() as usize).max(1);
    let side = r + 1;
    let Some(total) = side.checked_pow(d as u32).filter(|&t| t <= 50_000_000) else {
        return false;
    };
    let index = |p: &[usize]| p.iter().rev().fold(0usize, |acc, &c| acc * side + c);
    let decode = |mut idx: usize| -> Vec<usize> {
        (0..d)
            .map(|_| {
                let c = idx % side;
                idx /= side;
                c
            })
            .collect()
    };

    let bfs = |sign: i32| -> Vec<bool> {
        let mut seen = vec![false; total];
        let mut queue = VecDeque::new();
        seen[0] = true;
        queue.push_back(0usize);
        while let Some(cur) = queue.pop_front() {
            let p = decode(cur);
            'steps: for s in &model.steps {
                let mut q = Vec::with_capacity(d);
                for (c, ds) in p.iter().zip(&s.vector) {
                    let v = *c as i64 + (sign * ds) as i64;
                    if v < 0 || v > r as i64 {
                        continue 'steps;
                    }
                    q.push(v as usize);
                }
                let qi = index(&q);
                if !seen[qi] {
                    seen[qi] = true;
                    queue.push_back(qi);
                }
            }
        }
        seen
    };

    let forward = bfs(1);
    let backward = bfs(-1);
    let limit = r.min(3);
    let mut point = vec![0usize; d];
    loop {
        let idx = index(&point);
        if !forward[idx] || !backward[idx] {
            return false;
        }
        let mut k = 0;
        loop {
            if k == d {
                return true;
            }
            point[k] += 1;
            if point[k] <= limit {
                break;
            }
            point[k] = 0;
            k += 1;
        }
    }
}

/// Convenience constructor for a rational from small integers.
pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Weights as `f64`, in step order.
pub fn float_weights(model: &WalkModel) -> Vec<f64> {
    model.steps.iter().map(|s| s.weight.to_f64().unwrap_or(f64::NAN)).collect()
}

/// Sum of weights, which is exactly one after construction.
pub fn weight_sum(model: &WalkModel) -> BigRational {
    model.steps.iter().fold(BigRational::zero(), |acc, s| acc + &s.weight)
}

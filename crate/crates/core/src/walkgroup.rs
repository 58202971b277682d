//! The group of the walk: the involutions φ_i, their Jacobians at the
//! critical point, infinite-order tests for pairs, and the comparison
//! between the combinatorial group G and the reflection group H.

use nalgebra::DMatrix;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::coxeter::angles::{niven_allows, rational_angle, recognize_cosine, OrderRule};
use crate::coxeter::closure::{matrix_group_closure, ApproxSet};
use crate::coxeter::{classify, Classification, CoxeterDiagram, Evidence, GroupStatus, GroupVerdict};
use crate::critical::{bilinear_form, CriticalData};
use crate::dual::Dual;
use crate::model::{sections, ModelError, SectionTriple, WalkModel};
use crate::numeric::max_abs_diff;
use crate::poly::{FloatPoly, Scalar};
use crate::spectral::AngleGeometry;

pub const MODULUS_TOL: f64 = 1e-6;
pub const WORD_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkGroupError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("A_{axis} vanishes at the evaluation point")]
    Pole { axis: usize },
}

#[derive(Clone, Debug)]
struct Section {
    a: FloatPoly,
    c: FloatPoly,
    da: Vec<FloatPoly>,
    dc: Vec<FloatPoly>,
}

/// The d birational involutions of a small-step model.
#[derive(Clone, Debug)]
pub struct Involutions {
    d: usize,
    triples: Vec<SectionTriple>,
    sections: Vec<Section>,
}

impl Involutions {
    pub fn new(model: &WalkModel) -> Result<Self, ModelError> {
        let d = model.dim();
        let triples: Vec<SectionTriple> = (0..d).map(|i| sections(model, i)).collect::<Result<_, _>>()?;
        let sections = triples
            .iter()
            .map(|t| Section {
                a: t.a.to_float(),
                c: t.c.to_float(),
                da: (0..d).map(|k| t.a.partial(k).to_float()).collect(),
                dc: (0..d).map(|k| t.c.partial(k).to_float()).collect(),
            })
            .collect();
        Ok(Self { d, triples, sections })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn triples(&self) -> &[SectionTriple] {
        &self.triples
    }

    /// φ_i: x_i ↦ C_i / (x_i·A_i), other coordinates unchanged.
    pub fn phi(&self, i: usize, p: &[f64]) -> Result<Vec<f64>, WalkGroupError> {
        let s = &self.sections[i];
        let a = s.a.eval(p);
        if a == 0.0 {
            return Err(WalkGroupError::Pole { axis: i });
        }
        let mut q = p.to_vec();
        q[i] = s.c.eval(p) / (p[i] * a);
        Ok(q)
    }

    /// φ_i over any scalar type (used with dual numbers).
    pub fn phi_generic<T: Scalar>(&self, i: usize, p: &[T]) -> Vec<T> {
        let s = &self.sections[i];
        let a = s.a.eval_generic(p);
        let c = s.c.eval_generic(p);
        let mut q = p.to_vec();
        q[i] = c / (p[i].clone() * a);
        q
    }

    /// Applies the word φ_{w[0]} ∘ φ_{w[1]} ∘ ⋯, rightmost first.
    pub fn apply_word(&self, word: &[usize], p: &[f64]) -> Result<Vec<f64>, WalkGroupError> {
        word.iter().rev().try_fold(p.to_vec(), |acc, &i| self.phi(i, &acc))
    }

    /// Jacobian of the composite word at `p`, by forward differentiation
    /// through every intermediate point.
    pub fn word_jacobian(&self, word: &[usize], p: &[f64]) -> DMatrix<f64> {
        let out = word.iter().rev().fold(Dual::seed(p), |acc, &i| self.phi_generic(i, &acc));
        Dual::jacobian(&out)
    }

    /// Analytic Jacobian of φ_i at `p`.
    pub fn jacobian_generator(&self, i: usize, p: &[f64]) -> Result<DMatrix<f64>, WalkGroupError> {
        let s = &self.sections[i];
        let a = s.a.eval(p);
        if a == 0.0 {
            return Err(WalkGroupError::Pole { axis: i });
        }
        let c = s.c.eval(p);
        let xi = p[i];
        let mut j = DMatrix::identity(self.d, self.d);
        for k in 0..self.d {
            j[(i, k)] = if k == i {
                -c / (xi * xi * a)
            } else {
                (s.dc[k].eval(p) * a - c * s.da[k].eval(p)) / (xi * a * a)
            };
        }
        Ok(j)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum PairOrderResult {
    Finite { m: u32 },
    Infinite,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairOrder {
    pub i: usize,
    pub j: usize,
    pub result: PairOrderResult,
    pub rule: OrderRule,
    /// Cosine of the rotation angle 2·arccos(a_ij).
    pub rotation_cosine: f64,
}

/// Exact squared covariance entries a_ij², available when the critical point
/// is rational.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactCovariance {
    pub squares: Vec<Vec<BigRational>>,
}

impl ExactCovariance {
    pub fn from_hessian(h: &[Vec<BigRational>]) -> Self {
        let d = h.len();
        let squares = (0..d)
            .map(|i| (0..d).map(|j| &h[i][j] * &h[i][j] / (&h[i][i] * &h[j][j])).collect())
            .collect();
        Self { squares }
    }
}

/// Order of the rotation S_iS_j, whose angle is 2·arccos(a_ij).
pub fn pair_order(
    delta: &DMatrix<f64>,
    i: usize,
    j: usize,
    denom_cap: u32,
    exact: Option<&ExactCovariance>,
) -> PairOrder {
    let a = delta[(i, j)];
    let rotation_cosine = 2.0 * a * a - 1.0;
    let done = |result, rule| PairOrder { i, j, result, rule, rotation_cosine };

    if let Some(ex) = exact {
        let rot = &ex.squares[i][j] * BigRational::from_integer(2.into()) - BigRational::one();
        let (num, den) = (rot.numer().to_i64(), rot.denom().to_i64());
        let allowed = matches!((num, den), (Some(n), Some(d)) if niven_allows(n, d));
        if !allowed {
            return done(PairOrderResult::Infinite, OrderRule::ExactRationalCosine);
        }
        // cos of the rotation angle in {−1, −1/2, 0, 1/2, 1}.
        let m = match (num.unwrap_or(0), den.unwrap_or(1)) {
            (-1, 1) => 2,
            (-1, 2) => 3,
            (0, _) => 4,
            (1, 2) => 6,
            _ => 1,
        };
        return done(PairOrderResult::Finite { m }, OrderRule::ExactRationalCosine);
    }
    if let Some((p, q)) = recognize_cosine(rotation_cosine) {
        if !niven_allows(p, q) {
            return done(PairOrderResult::Infinite, OrderRule::RecognizedRationalCosine);
        }
    }
    if let Some((_, q)) = rational_angle(a.clamp(-1.0, 1.0).acos(), denom_cap) {
        return done(PairOrderResult::Finite { m: q }, OrderRule::RationalAngle);
    }
    done(PairOrderResult::Inconclusive, OrderRule::Undecided)
}

/// The Jacobian generators and their pairwise rotation orders.
#[derive(Clone, Debug)]
pub struct GeneratorSet {
    pub involutions: Involutions,
    pub s: Vec<DMatrix<f64>>,
    pub pair_orders: Vec<PairOrder>,
}

pub fn generator_set(
    model: &WalkModel,
    critical: &CriticalData,
    denom_cap: u32,
    exact: Option<&ExactCovariance>,
) -> Result<GeneratorSet, WalkGroupError> {
    let involutions = Involutions::new(model)?;
    let d = model.dim();
    let s = (0..d)
        .map(|i| involutions.jacobian_generator(i, &critical.x0))
        .collect::<Result<Vec<_>, _>>()?;
    let pair_orders = (0..d)
        .flat_map(|i| (i + 1..d).map(move |j| (i, j)))
        .map(|(i, j)| pair_order(&critical.delta, i, j, denom_cap, exact))
        .collect();
    Ok(GeneratorSet { involutions, s, pair_orders })
}

/// Grid for the fixed-point scan.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointGrid {
    /// Values tried for each frozen coordinate.
    pub frozen_values: Vec<f64>,
    /// Newton starts for the two active coordinates.
    pub starts: Vec<(f64, f64)>,
}

impl Default for FixedPointGrid {
    /// Frozen values {±1/2, ±1, ±3/2}; starts at (±1, ±1). Positive values
    /// alone never produce a witness, because at a positive fixed point the
    /// frozen two-dimensional model has a positive-definite invariant form.
    fn default() -> Self {
        Self {
            frozen_values: vec![0.5, 1.0, 1.5, -0.5, -1.0, -1.5],
            starts: vec![(1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0)],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FixedPointWitness {
    pub pair: (usize, usize),
    pub point: Vec<f64>,
    /// Moduli of the eigenvalues of Jac(φ_i∘φ_j) at `point`.
    pub moduli: Vec<f64>,
}

fn eigen_moduli(m: &DMatrix<f64>) -> Option<Vec<f64>> {
    if m.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let mut out: Vec<f64> = m.clone().complex_eigenvalues().iter().map(|z| z.norm()).collect();
    out.sort_by(f64::total_cmp);
    Some(out)
}

/// Newton on (∂_iχ, ∂_jχ) = (A_i − C_i/x_i², A_j − C_j/x_j²) in the two
/// active coordinates.
fn fixed_point_newton(inv: &Involutions, i: usize, j: usize, mut p: Vec<f64>) -> Option<Vec<f64>> {
    let (si, sj) = (&inv.sections[i], &inv.sections[j]);
    let residual = |p: &[f64]| {
        [
            si.a.eval(p) - si.c.eval(p) / (p[i] * p[i]),
            sj.a.eval(p) - sj.c.eval(p) / (p[j] * p[j]),
        ]
    };
    for _ in 0..200 {
        let f = residual(&p);
        if !f[0].is_finite() || !f[1].is_finite() {
            return None;
        }
        if f[0].abs().max(f[1].abs()) < 1e-12 {
            return Some(p);
        }
        let (xi, xj) = (p[i], p[j]);
        let j00 = 2.0 * si.c.eval(&p) / (xi * xi * xi);
        let j01 = si.da[j].eval(&p) - si.dc[j].eval(&p) / (xi * xi);
        let j10 = sj.da[i].eval(&p) - sj.dc[i].eval(&p) / (xj * xj);
        let j11 = 2.0 * sj.c.eval(&p) / (xj * xj * xj);
        let det = j00 * j11 - j01 * j10;
        if det == 0.0 || !det.is_finite() {
            return None;
        }
        p[i] -= (j11 * f[0] - j01 * f[1]) / det;
        p[j] -= (-j10 * f[0] + j00 * f[1]) / det;
        if p[i] == 0.0 || p[j] == 0.0 {
            return None;
        }
    }
    None
}

/// Searches real fixed points of the pair (φ_i, φ_j) with the remaining
/// coordinates frozen on a grid, and reports every fixed point at which
/// φ_i∘φ_j has an eigenvalue off the unit circle. Results are sorted.
pub fn fixed_point_scan(inv: &Involutions, i: usize, j: usize, grid: &FixedPointGrid) -> Vec<FixedPointWitness> {
    assert_ne!(i, j);
    let d = inv.dim();
    let frozen: Vec<usize> = (0..d).filter(|&k| k != i && k != j).collect();
    let nvals = grid.frozen_values.len();
    let cells = nvals.pow(frozen.len() as u32);
    let mut found: Vec<FixedPointWitness> = (0..cells)
        .into_par_iter()
        .flat_map_iter(|cell| {
            let mut base = vec![0.0; d];
            let mut c = cell;
            for &k in &frozen {
                base[k] = grid.frozen_values[c % nvals];
                c /= nvals;
            }
            grid.starts
                .iter()
                .filter_map(|&(s0, s1)| {
                    let mut p = base.clone();
                    p[i] = s0;
                    p[j] = s1;
                    let fp = fixed_point_newton(inv, i, j, p)?;
                    let moduli = eigen_moduli(&inv.word_jacobian(&[i, j], &fp))?;
                    moduli
                        .iter()
                        .any(|m| (m - 1.0).abs() > MODULUS_TOL)
                        .then_some(FixedPointWitness { pair: (i, j), point: fp, moduli })
                })
                .collect::<Vec<_>>()
        })
        .collect();
    found.sort_by(|a, b| a.point.partial_cmp(&b.point).unwrap_or(std::cmp::Ordering::Equal));
    found.dedup_by(|a, b| a.point.iter().zip(&b.point).all(|(x, y)| (x - y).abs() < 1e-8));
    found
}

/// Random positive evaluation points for the word-equality oracle.
pub fn oracle_points(d: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..5).map(|_| (0..d).map(|_| rng.random_range(0.3..2.5)).collect()).collect()
}

fn close(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= WORD_TOL * x.abs().max(1.0))
}

/// True when the word acts as the identity at every oracle point.
pub fn word_is_identity(inv: &Involutions, word: &[usize], points: &[Vec<f64>]) -> bool {
    points.iter().all(|p| inv.apply_word(word, p).map(|q| close(&q, p)).unwrap_or(false))
}

/// Smallest m ≤ `cap` with (φ_iφ_j)^m = id on the oracle points, trying only
/// multiples of `base` (the order of S_iS_j, which divides it).
pub fn group_pair_order(inv: &Involutions, i: usize, j: usize, base: u32, cap: u32, points: &[Vec<f64>]) -> Option<u32> {
    let base = base.max(1);
    (1..)
        .map(|k| k * base)
        .take_while(|&m| m <= cap)
        .find(|&m| {
            let word: Vec<usize> = (0..m).flat_map(|_| [i, j]).collect();
            word_is_identity(inv, &word, points)
        })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WordSearch {
    pub length_cap: usize,
    pub elements: usize,
    /// True when some length added no new element, so `elements` = |G|.
    pub closed: bool,
}

/// Breadth-first enumeration of G by word length, identifying elements by
/// their values at the oracle points.
pub fn word_bfs(inv: &Involutions, points: &[Vec<f64>], length_cap: usize, element_cap: usize) -> WordSearch {
    let flat = |imgs: &[Vec<f64>]| imgs.concat();
    let mut set = ApproxSet::new();
    set.insert(flat(points));
    let mut frontier = vec![points.to_vec()];
    for _ in 0..length_cap {
        let mut next = Vec::new();
        for imgs in &frontier {
            for i in 0..inv.dim() {
                let Ok(images) = imgs.iter().map(|p| inv.phi(i, p)).collect::<Result<Vec<_>, _>>() else {
                    continue;
                };
                if set.insert(flat(&images)) {
                    next.push(images);
                }
            }
        }
        if next.is_empty() {
            return WordSearch { length_cap, elements: set.len(), closed: true };
        }
        if set.len() > element_cap {
            break;
        }
        frontier = next;
    }
    WordSearch { length_cap, elements: set.len(), closed: false }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GPairOrder {
    pub i: usize,
    pub j: usize,
    /// Order of φ_iφ_j in G, or None when it exceeds the cap or is infinite.
    pub order: Option<u32>,
    pub infinite: bool,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvsHOptions {
    /// Declared |G|, if known from elsewhere.
    pub declared_order: Option<u64>,
    /// Lower bound on the order of a minimal nontrivial normal subgroup of G.
    pub min_normal_order: u64,
    pub seed: u64,
    pub pair_order_cap: u32,
    pub word_length_cap: usize,
    pub grid: FixedPointGrid,
}

impl Default for GvsHOptions {
    fn default() -> Self {
        Self {
            declared_order: None,
            min_normal_order: 2,
            seed: 0,
            pair_order_cap: 12,
            word_length_cap: 12,
            grid: FixedPointGrid::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GvsHReport {
    /// |Im J| by matrix closure of the S_i.
    pub image_order: Option<usize>,
    pub h: GroupVerdict,
    pub g_pair_orders: Vec<GPairOrder>,
    pub fixed_point_witnesses: Vec<FixedPointWitness>,
    /// |K_d| for the Coxeter group on the G pair orders.
    pub k_order: Option<u64>,
    pub word_search: WordSearch,
    pub g: GroupVerdict,
    /// Some(true) when G ≅ H is established, Some(false) when refuted.
    pub isomorphic: Option<bool>,
    pub conclusion: String,
}

/// Assembles the evidence comparing G with H.
pub fn g_vs_h_report(
    generators: &GeneratorSet,
    h: &Classification,
    options: &GvsHOptions,
) -> GvsHReport {
    let inv = &generators.involutions;
    let d = inv.dim();
    let points = oracle_points(d, options.seed);
    let mut evidence = Vec::new();

    let image_order = matrix_group_closure(&generators.s, 20_000).ok();
    evidence.push(Evidence::new(
        "jacobian_image_closure",
        image_order.map_or("exceeded cap 20000".to_string(), |n| format!("|Im J| = {n}")),
    ));

    let pairs: Vec<(usize, usize)> = (0..d).flat_map(|i| (i + 1..d).map(move |j| (i, j))).collect();
    let witnesses: Vec<FixedPointWitness> = pairs
        .iter()
        .flat_map(|&(i, j)| fixed_point_scan(inv, i, j, &options.grid))
        .collect();

    let g_pair_orders: Vec<GPairOrder> = generators
        .pair_orders
        .iter()
        .map(|po| {
            let (i, j) = (po.i, po.j);
            if po.result == PairOrderResult::Infinite {
                return GPairOrder { i, j, order: None, infinite: true, source: "rotation order of S_iS_j".into() };
            }
            if witnesses.iter().any(|w| w.pair == (i, j)) {
                return GPairOrder { i, j, order: None, infinite: true, source: "fixed-point eigenvalue off the unit circle".into() };
            }
            let base = match po.result {
                PairOrderResult::Finite { m } => m,
                _ => 1,
            };
            match group_pair_order(inv, i, j, base, options.pair_order_cap, &points) {
                Some(m) => GPairOrder { i, j, order: Some(m), infinite: false, source: "word oracle".into() },
                None => GPairOrder { i, j, order: None, infinite: false, source: format!("exceeds cap {}", options.pair_order_cap) },
            }
        })
        .collect();

    let k_order = if g_pair_orders.iter().all(|p| p.order.is_some()) {
        let mut m = vec![vec![1u32; d]; d];
        for p in &g_pair_orders {
            m[p.i][p.j] = p.order.unwrap();
            m[p.j][p.i] = m[p.i][p.j];
        }
        classify(&CoxeterDiagram::from_coxeter_matrix(&m)).verdict.order()
    } else {
        None
    };
    let word_search = word_bfs(inv, &points, options.word_length_cap, 50_000);
    evidence.push(Evidence::new(
        "word_bfs",
        format!("{} elements up to length {}{}", word_search.elements, word_search.length_cap, if word_search.closed { " (closed)" } else { "" }),
    ));

    let h_order = h.verdict.order();
    let pair_infinite = g_pair_orders.iter().find(|p| p.infinite);
    let (g_status, isomorphic, conclusion) = if let Some(p) = pair_infinite {
        let witness = format!("φ_{}φ_{} has infinite order ({})", p.i, p.j, p.source);
        let iso = h_order.map(|_| false);
        let text = match h_order {
            Some(n) => format!("G is infinite while H is finite of order {n}; not isomorphic"),
            None => "G is infinite".to_string(),
        };
        (GroupStatus::Infinite { witness }, iso, text)
    } else if let (Some(k), Some(n)) = (k_order, h_order) {
        if k == n {
            (GroupStatus::Finite { order: n }, Some(true), format!("|K_d| = |H| = {n}, hence G ≅ H"))
        } else {
            sandwich(k_order, h_order, options, d)
        }
    } else {
        sandwich(k_order, h_order, options, d)
    };
    let (g_status, isomorphic, conclusion) = match (&g_status, word_search.closed) {
        (GroupStatus::Inconclusive { .. }, true) => {
            let n = word_search.elements as u64;
            evidence.push(Evidence::new("word_bfs_order", format!("|G| = {n} by closed word search")));
            let iso = h_order.map(|h| h == n).or(isomorphic);
            (GroupStatus::Finite { order: n }, iso, format!("{conclusion}; word search closes at |G| = {n}"))
        }
        _ => (g_status, isomorphic, conclusion),
    };
    evidence.push(Evidence::new("conclusion", conclusion.clone()));

    GvsHReport {
        image_order,
        h: h.verdict.clone(),
        g_pair_orders,
        fixed_point_witnesses: witnesses,
        k_order,
        word_search,
        g: GroupVerdict { status: g_status, evidence },
        isomorphic,
        conclusion,
    }
}

fn sandwich(k: Option<u64>, h: Option<u64>, options: &GvsHOptions, d: usize) -> (GroupStatus, Option<bool>, String) {
    if let (Some(g), Some(hn)) = (options.declared_order, h) {
        let bound = (1u64 << d) * options.min_normal_order;
        if g < bound {
            return (
                GroupStatus::Finite { order: g },
                Some(true),
                format!("declared |G| = {g} < 2^d·N = {bound}, hence G ≅ H (|H| = {hn})"),
            );
        }
    }
    let upper = k.map_or("∞".to_string(), |v| v.to_string());
    let lower = h.map_or("?".to_string(), |v| v.to_string());
    let reason = format!("|K_d| = {upper} ≥ |G| ≥ |H| = {lower}");
    (GroupStatus::Inconclusive { reason: reason.clone() }, None, reason)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PropertyReport {
    pub words: usize,
    /// max ‖J(g) − S_{i1}⋯S_{ik}‖ and max ‖J(gg′) − J(g)J(g′)‖.
    pub morphism_residual: f64,
    pub invariance_residual: f64,
    pub isometry_residual: f64,
    pub conjugation_residual: f64,
    pub reflection_residual: f64,
}

fn random_word(rng: &mut ChaCha8Rng, d: usize, max_len: usize) -> Vec<usize> {
    let len = rng.random_range(1..=max_len);
    (0..len).map(|_| rng.random_range(0..d)).collect()
}

/// Checks the morphism, invariance, isometry, conjugation and reflection
/// identities relating the S_i, the Hessian form and the wall normals.
pub fn property_suite(
    generators: &GeneratorSet,
    critical: &CriticalData,
    geometry: &AngleGeometry,
    words: usize,
    max_len: usize,
    seed: u64,
) -> PropertyReport {
    let inv = &generators.involutions;
    let d = inv.dim();
    let x0 = &critical.x0;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let product = |w: &[usize]| w.iter().fold(DMatrix::identity(d, d), |acc, &i| acc * &generators.s[i]);

    let (mut morph, mut inv_res) = (0.0f64, 0.0f64);
    for _ in 0..words {
        let g = random_word(&mut rng, d, max_len);
        let g2 = random_word(&mut rng, d, max_len);
        let jg = inv.word_jacobian(&g, x0);
        let jg2 = inv.word_jacobian(&g2, x0);
        let jgg: DMatrix<f64> = inv.word_jacobian(&[g.clone(), g2.clone()].concat(), x0);
        morph = morph.max(max_abs_diff(&jgg, &(&jg * &jg2))).max(max_abs_diff(&jg, &product(&g)));
        for _ in 0..20 {
            let h: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let k: Vec<f64> = (0..d).map(|_| rng.random_range(-1.0..1.0)).collect();
            let jh: Vec<f64> = (&jg * nalgebra::DVector::from_column_slice(&h)).iter().copied().collect();
            let jk: Vec<f64> = (&jg * nalgebra::DVector::from_column_slice(&k)).iter().copied().collect();
            let diff = bilinear_form(&critical.hessian, &jh, &jk) - bilinear_form(&critical.hessian, &h, &k);
            inv_res = inv_res.max(diff.abs());
        }
    }

    let isometry_residual = crate::spectral::isometry_check(critical, geometry).max_residual;

    // Φ sends f_i = e_i/√H_ii to u_i.
    let phi = DMatrix::from_fn(d, d, |r, c| geometry.u[c][r] * critical.hessian[(c, c)].sqrt());
    let phi_inv = phi.clone().try_inverse().expect("Φ is invertible");
    let mut conj = 0.0f64;
    let mut refl = 0.0f64;
    for (i, s) in generators.s.iter().enumerate() {
        let u = nalgebra::DVector::from_column_slice(&geometry.u[i]);
        let r = DMatrix::identity(d, d) - 2.0 * &u * u.transpose();
        conj = conj.max(max_abs_diff(&(&phi * s * &phi_inv), &r));
        // S_i e_i = −e_i and S_i − I has rank one.
        refl = refl.max((s[(i, i)] + 1.0).abs());
        let mut e = nalgebra::DVector::zeros(d);
        e[i] = 1.0;
        refl = refl.max(((s * &e) + &e).amax());
        let sv = (s - DMatrix::identity(d, d)).singular_values();
        let mut sv: Vec<f64> = sv.iter().copied().collect();
        sv.sort_by(|a, b| b.total_cmp(a));
        refl = refl.max(sv.iter().skip(1).fold(0.0f64, |a, v| a.max(v.abs())));
    }
    PropertyReport {
        words,
        morphism_residual: morph,
        invariance_residual: inv_res,
        isometry_residual,
        conjugation_residual: conj,
        reflection_residual: refl,
    }
}

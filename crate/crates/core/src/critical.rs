//! Critical point of the inventory, the structural constant ρ, the covariance
//! matrix, Cramér reweighting and the Hessian bilinear form.

use nalgebra::{DMatrix, DVector};
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::model::WalkModel;
use crate::numeric::{recognize_rational, to_ratio};
use crate::poly::{FloatPoly, LaurentPoly};

pub const GRADIENT_TOL: f64 = 1e-12;
pub const MAX_ITERATIONS: usize = 200;
const MIN_COORD: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CriticalError {
    #[error("no interior minimum: axes {0:?} lack a positive or a negative step")]
    OneSided(Vec<usize>),
    #[error("Newton did not converge after {iterations} iterations (gradient {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("iterate left the positive orthant despite damping")]
    Escaped,
    #[error("singular Hessian at iteration {0}")]
    SingularHessian(usize),
    #[error("pure second partial along axis {0} vanishes")]
    DegenerateSecondPartial(usize),
}

/// Analytic derivatives of χ, compiled for float evaluation.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub chi: FloatPoly,
    pub grad: Vec<FloatPoly>,
    pub hess: Vec<Vec<FloatPoly>>,
}

impl Derivatives {
    pub fn new(model: &WalkModel) -> Self {
        let chi = model.inventory();
        let d = model.dim();
        let grad_exact: Vec<LaurentPoly> = (0..d).map(|i| chi.partial(i)).collect();
        let hess = (0..d)
            .map(|i| (0..d).map(|j| grad_exact[i].partial(j).to_float()).collect())
            .collect();
        Self {
            chi: chi.to_float(),
            grad: grad_exact.iter().map(LaurentPoly::to_float).collect(),
            hess,
        }
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.chi.eval(x)
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }

    pub fn hessian(&self, x: &[f64]) -> DMatrix<f64> {
        let d = x.len();
        DMatrix::from_fn(d, d, |i, j| self.hess[i][j].eval(x))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CriticalData {
    pub x0: Vec<f64>,
    pub rho: f64,
    pub hessian: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub gradient_residual: f64,
    pub iterations: usize,
}

fn inf_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

/// Newton from (1,…,1).
pub fn critical_point(model: &WalkModel) -> Result<CriticalData, CriticalError> {
    critical_point_from(model, &vec![1.0; model.dim()])
}

/// Damped Newton from an arbitrary positive start.
///
/// Steps are taken in logarithmic coordinates t = ln x, where χ is convex.
/// A step is halved until it keeps every coordinate above 1e−9 and either
/// lowers χ or lowers the gradient norm.
pub fn critical_point_from(model: &WalkModel, start: &[f64]) -> Result<CriticalData, CriticalError> {
    let sided = model.one_sided_axes();
    if !sided.is_empty() {
        return Err(CriticalError::OneSided(sided));
    }
    let der = Derivatives::new(model);
    let d = model.dim();
    let mut x = start.to_vec();
    let mut g = der.gradient(&x);
    let mut f = der.value(&x);
    let mut iterations = 0;
    while inf_norm(&g) >= GRADIENT_TOL {
        if iterations == MAX_ITERATIONS {
            return Err(CriticalError::NoConvergence { iterations, residual: inf_norm(&g) });
        }
        iterations += 1;
        let h = der.hessian(&x);
        // Gradient and Hessian of t ↦ χ(e^t).
        let gt = DVector::from_fn(d, |i, _| x[i] * g[i]);
        let ht = DMatrix::from_fn(d, d, |i, j| {
            x[i] * x[j] * h[(i, j)] + if i == j { x[i] * g[i] } else { 0.0 }
        });
        let step = ht
            .clone()
            .cholesky()
            .map(|c| c.solve(&(-&gt)))
            .or_else(|| ht.lu().solve(&(-&gt)))
            .ok_or(CriticalError::SingularHessian(iterations))?;
        let gnorm = inf_norm(&g);
        let mut scale = 1.0;
        let mut accepted = None;
        for _ in 0..60 {
            let cand: Vec<f64> = x.iter().zip(step.iter()).map(|(xi, s)| xi * (scale * s).exp()).collect();
            if cand.iter().all(|&c| c > MIN_COORD && c.is_finite()) {
                let fc = der.value(&cand);
                let gc = der.gradient(&cand);
                if fc < f || inf_norm(&gc) < gnorm {
                    accepted = Some((cand, fc, gc));
                    break;
                }
            }
            scale *= 0.5;
        }
        let (nx, nf, ng) = accepted.ok_or(if x.iter().any(|&c| c <= MIN_COORD) {
            CriticalError::Escaped
        } else {
            CriticalError::NoConvergence { iterations, residual: gnorm }
        })?;
        x = nx;
        f = nf;
        g = ng;
    }
    let hessian = der.hessian(&x);
    let delta = normalize_hessian(&hessian)?;
    Ok(CriticalData { rho: f, gradient_residual: inf_norm(&g), x0: x, hessian, delta, iterations })
}

fn normalize_hessian(h: &DMatrix<f64>) -> Result<DMatrix<f64>, CriticalError> {
    let d = h.nrows();
    if let Some(i) = (0..d).find(|&i| h[(i, i)] <= 0.0) {
        return Err(CriticalError::DegenerateSecondPartial(i));
    }
    Ok(DMatrix::from_fn(d, d, |i, j| {
        if i == j {
            1.0
        } else {
            h[(i, j)] / (h[(i, i)] * h[(j, j)]).sqrt()
        }
    }))
}

/// Normalized Hessian a_ij = H_ij / √(H_ii H_jj) at `x0`.
pub fn covariance(model: &WalkModel, x0: &[f64]) -> Result<DMatrix<f64>, CriticalError> {
    normalize_hessian(&Derivatives::new(model).hessian(x0))
}

/// Reweights steps by w(s)·x0^s/χ(x0). The float weights are converted to
/// exact rationals and renormalized, so the result sums exactly to 1.
pub fn cramer_weights(model: &WalkModel, x0: &[f64]) -> WalkModel {
    let raw: Vec<f64> = model
        .steps()
        .iter()
        .map(|s| {
            let w = crate::numeric::ratio_to_f64(&s.weight);
            s.vector.iter().zip(x0).fold(w, |acc, (k, xi)| acc * xi.powi(*k))
        })
        .collect();
    let steps = model
        .steps()
        .iter()
        .zip(raw)
        .map(|(s, w)| (s.vector.clone(), BigRational::from_float(w).expect("finite weight")))
        .collect();
    WalkModel::new(model.dim(), steps).expect("reweighting keeps the model valid")
}

/// Mean step vector Σ w(s)·s.
pub fn drift(model: &WalkModel) -> Vec<f64> {
    let mut out = vec![0.0; model.dim()];
    for s in model.steps() {
        let w = crate::numeric::ratio_to_f64(&s.weight);
        for (o, c) in out.iter_mut().zip(&s.vector) {
            *o += w * f64::from(*c);
        }
    }
    out
}

/// [h, k] = hᵀ·D²χ(x0)·k.
pub fn bilinear_form(hessian: &DMatrix<f64>, h: &[f64], k: &[f64]) -> f64 {
    let hv = DVector::from_column_slice(h);
    let kv = DVector::from_column_slice(k);
    hv.dot(&(hessian * kv))
}

/// f_i = e_i / √[e_i, e_i], as the columns of a matrix.
pub fn normalized_basis(hessian: &DMatrix<f64>) -> DMatrix<f64> {
    let d = hessian.nrows();
    DMatrix::from_fn(d, d, |r, c| if r == c { 1.0 / hessian[(c, c)].sqrt() } else { 0.0 })
}

/// Attempts to certify `x0` as an exact rational critical point: each
/// coordinate is recognized with denominator ≤ 10⁶ and the gradient is then
/// checked to vanish in exact arithmetic.
pub fn exact_critical_point(model: &WalkModel, x0: &[f64]) -> Option<Vec<BigRational>> {
    let candidate: Option<Vec<BigRational>> = x0
        .iter()
        .map(|&v| recognize_rational(v, 1_000_000, 1e-10).filter(|r| r.0 > 0).map(to_ratio))
        .collect();
    let candidate = candidate?;
    let chi = model.inventory();
    (0..model.dim())
        .all(|i| chi.partial(i).eval_exact(&candidate).is_zero())
        .then_some(candidate)
}

/// Exact Hessian at a rational point.
pub fn exact_hessian(model: &WalkModel, x: &[BigRational]) -> Vec<Vec<BigRational>> {
    let chi = model.inventory();
    let d = model.dim();
    (0..d)
        .map(|i| {
            let gi = chi.partial(i);
            (0..d).map(|j| gi.partial(j).eval_exact(x)).collect()
        })
        .collect()
}

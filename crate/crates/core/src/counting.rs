//! Exact enumeration of orthant excursions by dynamic programming, and
//! empirical extraction of the growth rate and polynomial exponent.

use std::collections::VecDeque;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::critical::critical_point;
use crate::model::WalkModel;
use crate::nodal::classify_nodal;
use crate::spectral::angle_geometry;

pub const DEFAULT_MEMORY_BUDGET: u64 = 4 << 30;
pub const MIN_FIT_TERMS: usize = 20;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum CountError {
    #[error("point {0:?} does not match the model dimension")]
    BadPoint(Vec<i64>),
    #[error("estimated memory {needed} bytes exceeds the budget of {budget} bytes")]
    MemoryBudget { needed: u64, budget: u64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CountMode {
    /// Each path counts with the product of its step weights.
    Weighted,
    /// Each path counts once.
    Unweighted,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountOptions {
    pub mode: CountMode,
    pub memory_budget: u64,
    /// Overrides the automatic box radius when larger.
    pub box_radius: Option<usize>,
}

impl Default for CountOptions {
    fn default() -> Self {
        Self { mode: CountMode::Weighted, memory_budget: DEFAULT_MEMORY_BUDGET, box_radius: None }
    }
}

/// e(n) = numerators[n] / scale^n for n = 0..=n_max.
#[derive(Clone, Debug, PartialEq)]
pub struct CountTable {
    pub start: Vec<usize>,
    pub end: Vec<usize>,
    pub mode: CountMode,
    pub numerators: Vec<BigUint>,
    /// Common denominator of the step weights (one when unweighted).
    pub scale: BigUint,
    pub box_radius: usize,
}

/// ln x for a big integer, from its leading 64 bits.
pub fn ln_biguint(x: &BigUint) -> Option<f64> {
    if x.is_zero() {
        return None;
    }
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_u64().expect("64 bits fit");
    Some((top as f64).ln() + shift as f64 * std::f64::consts::LN_2)
}

impl CountTable {
    pub fn n_max(&self) -> usize {
        self.numerators.len() - 1
    }

    pub fn value(&self, n: usize) -> BigRational {
        BigRational::new(self.numerators[n].clone().into(), num_traits::pow(self.scale.clone(), n).into())
    }

    pub fn ln_value(&self, n: usize) -> Option<f64> {
        let ln_scale = ln_biguint(&self.scale).unwrap_or(0.0);
        ln_biguint(&self.numerators[n]).map(|v| v - n as f64 * ln_scale)
    }

    pub fn nonzero(&self) -> Vec<usize> {
        (0..self.numerators.len()).filter(|&n| !self.numerators[n].is_zero()).collect()
    }

    /// gcd of the lengths with e(n) ≠ 0.
    pub fn period(&self) -> Option<u64> {
        let nz = self.nonzero();
        (!nz.is_empty()).then(|| nz.iter().fold(0u64, |g, &n| g.gcd(&(n as u64))))
    }

    /// gcd of differences between nonzero lengths; the spacing of the
    /// lattice that carries the sequence.
    pub fn lattice_step(&self) -> Option<u64> {
        let nz = self.nonzero();
        let first = *nz.first()?;
        let g = nz.iter().fold(0u64, |g, &n| g.gcd(&((n - first) as u64)));
        Some(if g == 0 { 1 } else { g })
    }

    /// Rows "n<TAB>e(n)" with exact values.
    pub fn to_tsv(&self) -> String {
        let mut out = String::from("n\te(n)\n");
        for n in 0..self.numerators.len() {
            out.push_str(&format!("{n}\t{}\n", self.value(n)));
        }
        out
    }
}

/// Box, strides and reachability masks shared by the exact and float engines.
struct Grid {
    d: usize,
    side: usize,
    cells: usize,
    steps: Vec<Vec<i32>>,
    dist_from_start: Vec<u32>,
    dist_to_end: Vec<u32>,
    start: usize,
    end: usize,
    n_max: usize,
}

impl Grid {
    fn new(model: &WalkModel, start: &[usize], end: &[usize], n_max: usize, radius: usize) -> Self {
        let d = model.dim();
        let side = radius + 1;
        let cells = side.pow(d as u32);
        let steps: Vec<Vec<i32>> = model.steps().iter().map(|s| s.vector.clone()).collect();
        let mut g = Self {
            d,
            side,
            cells,
            steps,
            dist_from_start: Vec::new(),
            dist_to_end: Vec::new(),
            start: 0,
            end: 0,
            n_max,
        };
        g.start = g.index(start);
        g.end = g.index(end);
        g.dist_from_start = g.bfs(g.start, 1);
        g.dist_to_end = g.bfs(g.end, -1);
        g
    }

    fn index(&self, x: &[usize]) -> usize {
        x.iter().rev().fold(0, |acc, &c| acc * self.side + c)
    }

    fn coords(&self, mut i: usize) -> Vec<usize> {
        (0..self.d)
            .map(|_| {
                let c = i % self.side;
                i /= self.side;
                c
            })
            .collect()
    }

    /// Neighbour x + sign·s inside the box, if any.
    fn shifted(&self, x: &[usize], s: &[i32], sign: i32) -> Option<usize> {
        let mut idx = 0;
        for k in (0..self.d).rev() {
            let c = x[k] as i64 + i64::from(sign * s[k]);
            if c < 0 || c >= self.side as i64 {
                return None;
            }
            idx = idx * self.side + c as usize;
        }
        Some(idx)
    }

    fn bfs(&self, origin: usize, sign: i32) -> Vec<u32> {
        let mut dist = vec![u32::MAX; self.cells];
        dist[origin] = 0;
        let mut queue = VecDeque::from([origin]);
        while let Some(i) = queue.pop_front() {
            let x = self.coords(i);
            for s in &self.steps {
                if let Some(j) = self.shifted(&x, s, sign) {
                    if dist[j] == u32::MAX {
                        dist[j] = dist[i] + 1;
                        queue.push_back(j);
                    }
                }
            }
        }
        dist
    }

    fn active(&self, i: usize, t: usize) -> bool {
        let a = self.dist_from_start[i];
        let b = self.dist_to_end[i];
        a != u32::MAX && b != u32::MAX && a as usize <= t && b as usize + t <= self.n_max
    }

    /// One layer of the pull recursion new[x] = Σ_s w_s·old[x − s], run in
    /// parallel over slices of fixed last coordinate.
    fn layer<V, F>(&self, old: &[V], new: &mut [V], t: usize, pull: F)
    where
        V: Send + Sync + Default,
        F: Fn(&mut V, &V, usize) + Sync,
    {
        let slice = self.cells / self.side;
        new.par_chunks_mut(slice).enumerate().for_each(|(c, chunk)| {
            for (offset, cell) in chunk.iter_mut().enumerate() {
                let i = c * slice + offset;
                *cell = V::default();
                if !self.active(i, t) {
                    continue;
                }
                let x = self.coords(i);
                for (k, s) in self.steps.iter().enumerate() {
                    if let Some(j) = self.shifted(&x, s, -1) {
                        pull(cell, &old[j], k);
                    }
                }
            }
        });
    }
}

fn check_point(p: &[usize], d: usize) -> Result<(), CountError> {
    if p.len() != d {
        return Err(CountError::BadPoint(p.iter().map(|&v| v as i64).collect()));
    }
    Ok(())
}

/// Smallest box [0, R]^d containing every excursion of length ≤ n_max: a
/// walk that climbs to height h in some coordinate and comes back needs
/// at least (2h − P_i − Q_i)/M steps, M the largest step coordinate.
pub fn box_radius(model: &WalkModel, start: &[usize], end: &[usize], n_max: usize) -> usize {
    let m = model.max_step_norm() as usize;
    let far = start.iter().chain(end).copied().max().unwrap_or(0);
    far + (m * n_max).div_ceil(2)
}

fn estimate_memory(cells: usize, value_bytes: u64) -> u64 {
    // Two layers of values plus two distance masks.
    cells as u64 * (2 * (std::mem::size_of::<BigUint>() as u64 + value_bytes) + 8)
}

/// Integer step weights p_s = w_s·L and the common denominator L.
fn integer_weights(model: &WalkModel, mode: CountMode) -> (Vec<BigUint>, BigUint) {
    match mode {
        CountMode::Unweighted => (vec![BigUint::one(); model.steps().len()], BigUint::one()),
        CountMode::Weighted => {
            let l = model
                .steps()
                .iter()
                .fold(num_bigint::BigInt::one(), |acc, s| acc.lcm(s.weight.denom()));
            let weights = model
                .steps()
                .iter()
                .map(|s| (s.weight.numer() * (&l / s.weight.denom())).to_biguint().expect("positive weight"))
                .collect();
            (weights, l.to_biguint().expect("positive denominator"))
        }
    }
}

/// Number (or total weight) of walks of each length n ≤ n_max from P to Q
/// that never leave the closed orthant.
pub fn count_excursions(
    model: &WalkModel,
    start: &[usize],
    end: &[usize],
    n_max: usize,
    options: &CountOptions,
) -> Result<CountTable, CountError> {
    let d = model.dim();
    check_point(start, d)?;
    check_point(end, d)?;
    let radius = box_radius(model, start, end, n_max).max(options.box_radius.unwrap_or(0));
    let cells = (radius + 1).checked_pow(d as u32).unwrap_or(usize::MAX);
    let (weights, scale) = integer_weights(model, options.mode);
    let growth = weights.iter().fold(BigUint::zero(), |a, w| a + w);
    let bits_per_step = growth.bits().max(1);
    let needed = estimate_memory(cells, bits_per_step * n_max as u64 / 8);
    if needed > options.memory_budget || cells == usize::MAX {
        return Err(CountError::MemoryBudget { needed, budget: options.memory_budget });
    }

    let grid = Grid::new(model, start, end, n_max, radius);
    let unit = weights.iter().all(|w| w.is_one());
    let mut old = vec![BigUint::zero(); grid.cells];
    let mut new = vec![BigUint::zero(); grid.cells];
    old[grid.start] = BigUint::one();
    let mut numerators = vec![old[grid.end].clone()];
    for t in 1..=n_max {
        grid.layer(&old, &mut new, t, |acc: &mut BigUint, prev: &BigUint, k| {
            if prev.is_zero() {
                return;
            }
            if unit {
                *acc += prev;
            } else {
                *acc += prev * &weights[k];
            }
        });
        std::mem::swap(&mut old, &mut new);
        numerators.push(old[grid.end].clone());
    }
    Ok(CountTable {
        start: start.to_vec(),
        end: end.to_vec(),
        mode: options.mode,
        numerators,
        scale,
        box_radius: radius,
    })
}

/// Floating-point mirror of the weighted count: ln e(n) for n ≤ n_max (None
/// where e(n) = 0). Layers are renormalized to avoid overflow. Advisory
/// only; the exact table is authoritative.
pub fn count_excursions_float(
    model: &WalkModel,
    start: &[usize],
    end: &[usize],
    n_max: usize,
) -> Result<Vec<Option<f64>>, CountError> {
    let d = model.dim();
    check_point(start, d)?;
    check_point(end, d)?;
    let radius = box_radius(model, start, end, n_max);
    let grid = Grid::new(model, start, end, n_max, radius);
    let weights = crate::model::float_weights(model);
    let mut old = vec![0.0f64; grid.cells];
    let mut new = vec![0.0f64; grid.cells];
    old[grid.start] = 1.0;
    let mut log_scale = 0.0;
    let mut out = vec![(grid.start == grid.end).then_some(0.0)];
    for t in 1..=n_max {
        grid.layer(&old, &mut new, t, |acc: &mut f64, prev: &f64, k| *acc += weights[k] * prev);
        std::mem::swap(&mut old, &mut new);
        let max = old.iter().fold(0.0f64, |a, &v| a.max(v));
        let v = old[grid.end];
        out.push((v > 0.0).then(|| v.ln() + log_scale));
        if max > 0.0 {
            old.iter_mut().for_each(|v| *v /= max);
            log_scale += max.ln();
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum FitError {
    #[error("only {found} nonzero terms; at least {required} are needed")]
    InsufficientData { found: usize, required: usize },
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AsymptoticFit {
    pub rho_hat: f64,
    pub alpha_hat: f64,
    /// ρ used to form r_n = e(n)ρ^(−n).
    pub rho_reference: f64,
    pub lattice_step: u64,
    /// First and last n of the fit window.
    pub window: (usize, usize),
    /// Nodes of the extrapolation in 1/n.
    pub extrapolation_nodes: Vec<usize>,
    /// −slope of log r_n against log n over the window.
    pub alpha_regression: f64,
    /// Local exponent at the last node, before extrapolation.
    pub alpha_last: f64,
    /// Depth-one extrapolation through the first and last nodes.
    pub alpha_depth1: f64,
    pub rho_last: f64,
}

/// Value at 0 of the Lagrange interpolant through (1/n_i, y_i).
fn extrapolate(points: &[(usize, f64)]) -> f64 {
    let xs: Vec<f64> = points.iter().map(|&(n, _)| 1.0 / n as f64).collect();
    points
        .iter()
        .enumerate()
        .map(|(i, &(_, y))| {
            let l: f64 = (0..xs.len()).filter(|&j| j != i).map(|j| -xs[j] / (xs[i] - xs[j])).product();
            l * y
        })
        .sum()
}

/// Fits e(n) ~ c·ρⁿ/n^α on the last half of the nonzero terms, with
/// extrapolation of the local exponents at n ≈ N/2, 3N/4 and N.
pub fn estimate_asymptotics(table: &CountTable, rho: f64) -> Result<AsymptoticFit, FitError> {
    let nz: Vec<usize> = table.nonzero().into_iter().filter(|&n| n > 0).collect();
    if nz.len() < MIN_FIT_TERMS {
        return Err(FitError::InsufficientData { found: nz.len(), required: MIN_FIT_TERMS });
    }
    let p = table.lattice_step().unwrap_or(1) as usize;
    let ln_rho = rho.ln();
    let log_r = |n: usize| table.ln_value(n).map(|v| v - n as f64 * ln_rho);
    let window = &nz[nz.len() / 2..];

    // Least squares of log r_n on (1, log n).
    let pts: Vec<(f64, f64)> = window.iter().filter_map(|&n| Some(((n as f64).ln(), log_r(n)?))).collect();
    let m = pts.len() as f64;
    let (sx, sy) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / m, sy / m);
    let (sxy, sxx) = pts.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    let alpha_regression = -sxy / sxx;

    let local = |n: usize| -> Option<(f64, f64)> {
        let (a, b) = (log_r(n)?, log_r(n + p)?);
        let alpha = -(b - a) / (((n + p) as f64).ln() - (n as f64).ln());
        let q = ((b - a) / p as f64 + ln_rho).exp();
        Some((alpha, q))
    };
    let usable: Vec<usize> = nz.iter().copied().filter(|&n| n + p <= table.n_max() && local(n).is_some()).collect();
    let k = usable.len();
    let nodes = vec![usable[k / 2], usable[3 * k / 4], usable[k - 1]];
    let vals: Vec<(f64, f64)> = nodes.iter().map(|&n| local(n).unwrap()).collect();
    let alpha_pts: Vec<(usize, f64)> = nodes.iter().zip(&vals).map(|(&n, v)| (n, v.0)).collect();
    let rho_pts: Vec<(usize, f64)> = nodes.iter().zip(&vals).map(|(&n, v)| (n, v.1)).collect();
    Ok(AsymptoticFit {
        rho_hat: extrapolate(&rho_pts),
        alpha_hat: extrapolate(&alpha_pts),
        rho_reference: rho,
        lattice_step: p as u64,
        window: (window[0], *window.last().unwrap()),
        extrapolation_nodes: nodes,
        alpha_regression,
        alpha_last: alpha_pts[2].1,
        alpha_depth1: extrapolate(&[alpha_pts[0], alpha_pts[2]]),
        rho_last: rho_pts[2].1,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerifyOptions {
    pub n_max: usize,
    pub start: Option<Vec<usize>>,
    pub end: Option<Vec<usize>>,
    /// Relative tolerance on α.
    pub alpha_tol: f64,
    /// Relative tolerance on ρ.
    pub rho_tol: f64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self { n_max: 400, start: None, end: None, alpha_tol: 0.05, rho_tol: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Verification {
    pub n_max: usize,
    pub predicted_rho: f64,
    pub predicted_alpha: Option<f64>,
    pub fit: AsymptoticFit,
    pub alpha_rel_error: Option<f64>,
    pub rho_rel_error: f64,
    /// None when no formula applies.
    pub pass: Option<bool>,
    pub note: String,
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum VerifyError {
    #[error("critical point: {0}")]
    Critical(#[from] crate::critical::CriticalError),
    #[error("covariance geometry: {0}")]
    Spectral(#[from] crate::spectral::SpectralError),
    #[error(transparent)]
    Count(#[from] CountError),
    #[error(transparent)]
    Fit(#[from] FitError),
}

/// Predicts (ρ, α) from the critical point and the nodal classification,
/// counts weighted excursions, and compares.
pub fn verify_prediction(model: &WalkModel, options: &VerifyOptions) -> Result<Verification, VerifyError> {
    let critical = critical_point(model)?;
    let geometry = angle_geometry(&critical.delta)?;
    let nodal = classify_nodal(&geometry);
    let origin = vec![0; model.dim()];
    let start = options.start.clone().unwrap_or_else(|| origin.clone());
    let end = options.end.clone().unwrap_or(origin);
    let table = count_excursions(model, &start, &end, options.n_max, &CountOptions::default())?;
    let fit = estimate_asymptotics(&table, critical.rho)?;
    let rho_rel_error = (fit.rho_hat - critical.rho).abs() / critical.rho;
    let (predicted_alpha, alpha_rel_error, pass, note) = match nodal.alpha {
        Some(alpha) => {
            let err = (fit.alpha_hat - alpha).abs() / alpha;
            let pass = err < options.alpha_tol && rho_rel_error < options.rho_tol;
            (Some(alpha), Some(err), Some(pass), format!("nodal of type {}", nodal.coxeter_type.join(" x ")))
        }
        None => (None, None, None, "non-nodal: empirical α only".to_string()),
    };
    Ok(Verification {
        n_max: options.n_max,
        predicted_rho: critical.rho,
        predicted_alpha,
        fit,
        alpha_rel_error,
        rho_rel_error,
        pass,
        note,
    })
}

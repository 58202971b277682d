//! Root-system and matrix-group closures with tolerance-based dedup.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use serde::Serialize;

pub const DEDUP_TOL: f64 = 1e-8;
/// Quantization step of the hash grid; much coarser than the tolerance so a
/// vector and its noisy copy land in the same or an adjacent cell.
const GRID: f64 = 1e-6;

/// Set of real vectors deduplicated at ∞-norm tolerance [`DEDUP_TOL`].
#[derive(Clone, Debug, Default)]
pub struct ApproxSet {
    cells: HashMap<Vec<i64>, Vec<usize>>,
    items: Vec<Vec<f64>>,
}

impl ApproxSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn items(&self) -> &[Vec<f64>] {
        &self.items
    }

    fn key(v: &[f64]) -> Vec<i64> {
        v.iter().map(|x| (x / GRID).round() as i64).collect()
    }

    /// Candidate cell keys: the home cell, plus neighbours along coordinates
    /// that sit within the tolerance of a cell boundary.
    fn probe_keys(v: &[f64]) -> Vec<Vec<i64>> {
        let home = Self::key(v);
        let mut keys = vec![home.clone()];
        for (i, x) in v.iter().enumerate() {
            let scaled = x / GRID;
            let frac = scaled - scaled.round();
            let margin = DEDUP_TOL / GRID;
            if frac.abs() > 0.5 - margin {
                let delta = if frac > 0.0 { 1 } else { -1 };
                let current = keys.clone();
                for mut k in current {
                    k[i] = home[i] + delta;
                    keys.push(k);
                }
            }
        }
        keys
    }

    pub fn find(&self, v: &[f64]) -> Option<usize> {
        for k in Self::probe_keys(v) {
            if let Some(ids) = self.cells.get(&k) {
                for &id in ids {
                    let close = self.items[id].iter().zip(v).all(|(a, b)| (a - b).abs() <= DEDUP_TOL);
                    if close {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    /// Inserts unless an equal vector is present; returns true when new.
    pub fn insert(&mut self, v: Vec<f64>) -> bool {
        if self.find(&v).is_some() {
            return false;
        }
        let id = self.items.len();
        self.cells.entry(Self::key(&v)).or_default().push(id);
        self.items.push(v);
        true
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RootSystem {
    /// All roots, both signs.
    pub roots: Vec<Vec<f64>>,
}

impl RootSystem {
    /// Number of reflections.
    pub fn k(&self) -> usize {
        self.roots.len() / 2
    }

    /// One representative of each ± pair: the one positive on `direction`.
    pub fn positive(&self, direction: &[f64]) -> Vec<Vec<f64>> {
        self.roots.iter().filter(|r| dot(r, direction) > 0.0).cloned().collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ExceededCap {
    pub cap: usize,
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// s_v(x) = x − 2⟨x, v⟩v for unit v.
pub fn reflect(x: &[f64], v: &[f64]) -> Vec<f64> {
    let c = 2.0 * dot(x, v);
    x.iter().zip(v).map(|(a, b)| a - c * b).collect()
}

/// Orbit of {±u_i} under the reflections s_{u_i}. Since every reflection
/// s_r with r in the orbit is a conjugate of a generator, the orbit is
/// closed under all of them.
pub fn generate_roots(normals: &[Vec<f64>], cap: usize) -> Result<RootSystem, ExceededCap> {
    let unit: Vec<Vec<f64>> = normals
        .iter()
        .map(|n| {
            let len = dot(n, n).sqrt();
            n.iter().map(|x| x / len).collect()
        })
        .collect();
    let mut set = ApproxSet::new();
    let mut queue = VecDeque::new();
    for u in &unit {
        for v in [u.clone(), u.iter().map(|x| -x).collect()] {
            if set.insert(v.clone()) {
                queue.push_back(v);
            }
        }
    }
    while let Some(r) = queue.pop_front() {
        for u in &unit {
            let image = reflect(&r, u);
            if set.insert(image.clone()) {
                if set.len() > cap {
                    return Err(ExceededCap { cap });
                }
                queue.push_back(image);
            }
        }
    }
    Ok(RootSystem { roots: set.items().to_vec() })
}

/// Breadth-first product closure of a matrix generating set.
pub fn matrix_group_closure(generators: &[DMatrix<f64>], cap: usize) -> Result<usize, ExceededCap> {
    let Some(first) = generators.first() else {
        return Ok(1);
    };
    let n = first.nrows();
    let flat = |m: &DMatrix<f64>| m.iter().copied().collect::<Vec<f64>>();
    let mut set = ApproxSet::new();
    let id = DMatrix::<f64>::identity(n, n);
    set.insert(flat(&id));
    let mut queue = VecDeque::from([id]);
    while let Some(g) = queue.pop_front() {
        for s in generators {
            let h = &g * s;
            if set.insert(flat(&h)) {
                if set.len() > cap {
                    return Err(ExceededCap { cap });
                }
                queue.push_back(h);
            }
        }
    }
    Ok(set.len())
}

/// A direction not orthogonal to any root, chosen deterministically.
pub fn generic_direction(roots: &[Vec<f64>]) -> Vec<f64> {
    let dim = roots.first().map_or(0, Vec::len);
    let mut best = Vec::new();
    let mut best_gap = -1.0;
    for attempt in 0..20u32 {
        let v: Vec<f64> = (0..dim)
            .map(|i| {
                let t = f64::from(attempt * 7919 + i as u32 * 104_729 + 1);
                (t * 0.618_033_988_749_895).fract() - 0.5 + 1e-3 * i as f64
            })
            .collect();
        let gap = roots.iter().map(|r| dot(r, &v).abs()).fold(f64::INFINITY, f64::min);
        if gap > best_gap {
            best_gap = gap;
            best = v;
        }
        if gap > 1e-3 {
            break;
        }
    }
    best
}

/// Simple roots of a finite root system relative to the chamber containing
/// `direction`: the positive roots whose reflection makes exactly one
/// positive root negative (namely itself).
pub fn simple_system(system: &RootSystem, direction: &[f64]) -> Vec<Vec<f64>> {
    let pos = system.positive(direction);
    pos.iter()
        .filter(|r| {
            pos.iter().filter(|p| dot(&reflect(p, r), direction) < 0.0).count() == 1
        })
        .cloned()
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::catalog::{irreducible_types, product_roots, TypeName};
    use super::*;
    use std::f64::consts::PI;

    fn reflection_matrix(v: &[f64]) -> DMatrix<f64> {
        let n = v.len();
        let len2 = dot(v, v);
        DMatrix::from_fn(n, n, |i, j| if i == j { 1.0 } else { 0.0 } - 2.0 * v[i] * v[j] / len2)
    }

    #[test]
    fn approx_set_merges_noise() {
        let mut s = ApproxSet::new();
        assert!(s.insert(vec![0.5, 1.0]));
        assert!(!s.insert(vec![0.5 + 1e-10, 1.0 - 1e-10]));
        // Straddling a grid boundary.
        let b = 0.5 * GRID;
        assert!(s.insert(vec![b - 1e-11, 0.0]));
        assert!(!s.insert(vec![b + 1e-11, 0.0]));
        assert!(s.insert(vec![0.5 + 1e-6, 1.0]));
        assert_eq!(s.len(), 3);
    }

    #[test]
    fn a2_has_three_reflections() {
        let t = PI / 3.0;
        let normals = vec![vec![1.0, 0.0], vec![-t.cos(), t.sin()]];
        assert_eq!(generate_roots(&normals, 100).unwrap().k(), 3);
    }

    #[test]
    fn rank_three_and_four_counts() {
        for t in irreducible_types(4, 12) {
            let rs = generate_roots(&t.simple_roots(), 10_000).unwrap();
            assert_eq!(rs.k() as u64, t.reflections(), "{t}");
            let gens: Vec<_> = t.simple_roots().iter().map(|r| reflection_matrix(r)).collect();
            assert_eq!(matrix_group_closure(&gens, 20_000).unwrap() as u64, t.order(), "{t}");
        }
    }

    #[test]
    fn reducible_counts_add() {
        let types = [TypeName::A(1), TypeName::B(2), TypeName::A(1)];
        let rs = generate_roots(&product_roots(&types), 1000).unwrap();
        assert_eq!(rs.k(), 1 + 4 + 1);
        let gens: Vec<_> = product_roots(&types).iter().map(|r| reflection_matrix(r)).collect();
        assert_eq!(matrix_group_closure(&gens, 1000).unwrap(), 2 * 8 * 2);
    }

    #[test]
    fn commuting_sign_flips() {
        let gens: Vec<_> = (0..3)
            .map(|i| DMatrix::from_fn(3, 3, |r, c| if r == c { if r == i { -1.0 } else { 1.0 } } else { 0.0 }))
            .collect();
        assert_eq!(matrix_group_closure(&gens, 100).unwrap(), 8);
    }

    #[test]
    fn obtuse_third_walls_diverge() {
        // Three unit normals with pairwise cosine −1/3.
        let g = nalgebra::DMatrix::from_fn(3, 3, |i, j| if i == j { 1.0 } else { -1.0 / 3.0 });
        let l = g.cholesky().unwrap().l();
        let normals: Vec<Vec<f64>> = (0..3).map(|i| l.row(i).iter().copied().collect()).collect();
        assert_eq!(generate_roots(&normals, 10_000), Err(ExceededCap { cap: 10_000 }));
    }

    #[test]
    fn roots_are_reflection_stable() {
        for t in [TypeName::A(3), TypeName::B(3), TypeName::H3, TypeName::F4, TypeName::I2(7)] {
            let rs = generate_roots(&t.simple_roots(), 10_000).unwrap();
            let mut set = ApproxSet::new();
            for r in &rs.roots {
                set.insert(r.clone());
            }
            for v in &rs.roots {
                for r in &rs.roots {
                    assert!(set.find(&reflect(r, v)).is_some());
                }
            }
        }
    }

    #[test]
    fn simple_system_recovers_rank() {
        for t in irreducible_types(4, 8) {
            let rs = generate_roots(&t.simple_roots(), 10_000).unwrap();
            let dir = generic_direction(&rs.roots);
            assert_eq!(simple_system(&rs, &dir).len(), t.rank(), "{t}");
        }
    }
}

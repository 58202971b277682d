//! Symmetric eigendecomposition by cyclic Jacobi rotations, real powers of the
//! covariance matrix, and the wall geometry of the cone Δ^(−1/2)ℝ₊^d.
//!
//! Wall angles follow the inward-normal convention: the interior angle
//! between walls i and j is π − arccos(a_ij), where a_ij = ⟨u_i, u_j⟩.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::critical::{bilinear_form, normalized_basis, CriticalData};

pub const JACOBI_TOL: f64 = 1e-14;
pub const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("matrix is not positive definite (smallest eigenvalue {0:e})")]
    NotPositiveDefinite(f64),
    #[error("matrix is not symmetric")]
    NotSymmetric,
}

#[derive(Clone, Debug)]
pub struct SymEig {
    /// Orthogonal matrix whose columns are eigenvectors.
    pub vectors: DMatrix<f64>,
    /// Eigenvalues in descending order, matching the columns of `vectors`.
    pub values: Vec<f64>,
    pub sweeps: usize,
    /// Off-diagonal Frobenius norm before each sweep, then at termination.
    pub off_history: Vec<f64>,
}

fn off_norm(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    let mut s = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                s += a[(i, j)] * a[(i, j)];
            }
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
pub fn sym_eig(m: &DMatrix<f64>) -> SymEig {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "square matrix expected");
    let mut a = (m + m.transpose()) * 0.5;
    let mut v = DMatrix::<f64>::identity(n, n);
    let mut history = vec![off_norm(&a)];
    let mut sweeps = 0;
    while sweeps < MAX_SWEEPS && *history.last().unwrap() > JACOBI_TOL {
        sweeps += 1;
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let t = if tau == 0.0 { 1.0 } else { t };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
        history.push(off_norm(&a));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])]);
    SymEig { vectors, values, sweeps, off_history: history }
}

/// Δ^s = P·diag(λ^s)·Pᵀ for a positive-definite Δ.
pub fn matrix_power(delta: &DMatrix<f64>, s: f64) -> Result<DMatrix<f64>, SpectralError> {
    let e = sym_eig(delta);
    let min = e.values.iter().copied().fold(f64::INFINITY, f64::min);
    if min <= 0.0 {
        return Err(SpectralError::NotPositiveDefinite(min));
    }
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        e.values.len(),
        e.values.iter().map(|l| l.powf(s)),
    ));
    Ok(&e.vectors * diag * e.vectors.transpose())
}

#[derive(Clone, Debug)]
pub struct AngleGeometry {
    /// Unit inward normals of the walls.
    pub u: Vec<Vec<f64>>,
    /// ⟨u_i, u_j⟩.
    pub gram: DMatrix<f64>,
    /// Interior angle between walls i and j; zero on the diagonal.
    pub hyperplane_angles: DMatrix<f64>,
    /// Present when the geometry comes from a full-rank covariance matrix.
    pub delta_sqrt: Option<DMatrix<f64>>,
    pub delta_inv_sqrt: Option<DMatrix<f64>>,
}

impl AngleGeometry {
    /// Geometry of walls given directly by (not necessarily unit, possibly
    /// rank-deficient) normals.
    pub fn from_normals(normals: &[Vec<f64>]) -> Self {
        let u: Vec<Vec<f64>> = normals
            .iter()
            .map(|n| {
                let len = n.iter().map(|x| x * x).sum::<f64>().sqrt();
                n.iter().map(|x| x / len).collect()
            })
            .collect();
        let r = u.len();
        let gram = DMatrix::from_fn(r, r, |i, j| {
            if i == j {
                1.0
            } else {
                u[i].iter().zip(&u[j]).map(|(a, b)| a * b).sum()
            }
        });
        let hyperplane_angles = interior_angles(&gram);
        Self { u, gram, hyperplane_angles, delta_sqrt: None, delta_inv_sqrt: None }
    }

    /// Number of walls.
    pub fn rank(&self) -> usize {
        self.u.len()
    }

    /// Dimension of the ambient space.
    pub fn ambient_dim(&self) -> usize {
        self.u.first().map_or(0, Vec::len)
    }
}

fn interior_angles(gram: &DMatrix<f64>) -> DMatrix<f64> {
    let r = gram.nrows();
    DMatrix::from_fn(r, r, |i, j| {
        if i == j {
            0.0
        } else {
            PI - gram[(i, j)].clamp(-1.0, 1.0).acos()
        }
    })
}

/// u_i = Δ^(1/2) e_i and the induced wall angles.
pub fn angle_geometry(delta: &DMatrix<f64>) -> Result<AngleGeometry, SpectralError> {
    if crate::numeric::max_abs_diff(delta, &delta.transpose()) > 1e-12 {
        return Err(SpectralError::NotSymmetric);
    }
    let sqrt = matrix_power(delta, 0.5)?;
    let inv_sqrt = matrix_power(delta, -0.5)?;
    let d = delta.nrows();
    let u: Vec<Vec<f64>> = (0..d).map(|i| sqrt.column(i).iter().copied().collect()).collect();
    let gram = sqrt.transpose() * &sqrt;
    let hyperplane_angles = interior_angles(delta);
    Ok(AngleGeometry {
        u,
        gram,
        hyperplane_angles,
        delta_sqrt: Some(sqrt),
        delta_inv_sqrt: Some(inv_sqrt),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct IsometryReport {
    /// max |[f_i, f_j] − ⟨u_i, u_j⟩|.
    pub max_residual: f64,
}

/// Compares the Hessian form on the normalized basis with the Euclidean
/// Gram matrix of the unit normals.
pub fn isometry_check(critical: &CriticalData, geometry: &AngleGeometry) -> IsometryReport {
    let f = normalized_basis(&critical.hessian);
    let d = f.ncols();
    let mut worst = 0.0f64;
    for i in 0..d {
        let fi: Vec<f64> = f.column(i).iter().copied().collect();
        for j in 0..d {
            let fj: Vec<f64> = f.column(j).iter().copied().collect();
            let lhs = bilinear_form(&critical.hessian, &fi, &fj);
            let rhs: f64 = geometry.u[i].iter().zip(&geometry.u[j]).map(|(a, b)| a * b).sum();
            worst = worst.max((lhs - rhs).abs());
        }
    }
    IsometryReport { max_residual: worst }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::critical::critical_point;
    use crate::models;
    use crate::numeric::max_abs_diff;
    use proptest::prelude::*;

    fn symmetric(n: usize, entries: &[f64]) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(n, n);
        let mut k = 0;
        for i in 0..n {
            for j in i..n {
                m[(i, j)] = entries[k];
                m[(j, i)] = entries[k];
                k += 1;
            }
        }
        m
    }

    #[test]
    fn identity_decomposition() {
        let e = sym_eig(&DMatrix::identity(4, 4));
        assert_eq!(e.values, vec![1.0; 4]);
        assert!(max_abs_diff(&(e.vectors.transpose() * &e.vectors), &DMatrix::identity(4, 4)) < 1e-15);
    }

    #[test]
    fn two_fifths_model_eigenvalues() {
        let c = critical_point(&models::two_fifths_rotation()).unwrap();
        let e = sym_eig(&c.delta);
        let r = 70f64.sqrt() / 10.0;
        let want = [1.0 + r, 1.0, 1.0 - r];
        for (a, b) in e.values.iter().zip(want) {
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn wedge_square_root() {
        for alpha in [0.3, 1.0, PI / 3.0, 2.0, 2.9] {
            let a = -f64::cos(alpha);
            let delta = DMatrix::from_row_slice(2, 2, &[1.0, a, a, 1.0]);
            let s = matrix_power(&delta, 0.5).unwrap();
            let x = PI / 4.0 - alpha / 2.0;
            assert!((s[(0, 0)] - x.cos()).abs() < 1e-12);
            assert!((s[(1, 1)] - x.cos()).abs() < 1e-12);
            assert!((s[(0, 1)] + x.sin()).abs() < 1e-12);
            let g = angle_geometry(&delta).unwrap();
            assert!((g.hyperplane_angles[(0, 1)] - (-a).acos()).abs() < 1e-10);
            assert!((g.hyperplane_angles[(0, 1)] - alpha).abs() < 1e-10);
        }
    }

    #[test]
    fn identity_geometry() {
        let g = angle_geometry(&DMatrix::identity(3, 3)).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((g.u[i][j] - if i == j { 1.0 } else { 0.0 }).abs() < 1e-15);
                if i != j {
                    assert!((g.hyperplane_angles[(i, j)] - PI / 2.0).abs() < 1e-15);
                }
            }
        }
        assert_eq!(matrix_power(&DMatrix::identity(3, 3), 0.37).unwrap(), DMatrix::identity(3, 3));
    }

    #[test]
    fn tandem_wall_angles() {
        for d in 2..=6 {
            let c = critical_point(&models::tandem(d)).unwrap();
            let g = angle_geometry(&c.delta).unwrap();
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        continue;
                    }
                    let want = if i.abs_diff(j) == 1 { PI / 3.0 } else { PI / 2.0 };
                    assert!((g.hyperplane_angles[(i, j)] - want).abs() < 1e-10);
                }
            }
        }
    }

    #[test]
    fn isometry_on_models() {
        for m in models::small_step_models() {
            let c = critical_point(&m).unwrap();
            let g = angle_geometry(&c.delta).unwrap();
            assert!(isometry_check(&c, &g).max_residual < 1e-10, "{m}");
        }
        let c = critical_point(&models::simple_walk(2)).unwrap();
        let g = angle_geometry(&c.delta).unwrap();
        assert!(isometry_check(&c, &g).max_residual < 1e-12);
    }

    #[test]
    fn geometry_invariants_on_models() {
        for m in models::small_step_models() {
            let c = critical_point(&m).unwrap();
            let g = angle_geometry(&c.delta).unwrap();
            let s = g.delta_sqrt.as_ref().unwrap();
            let si = g.delta_inv_sqrt.as_ref().unwrap();
            let d = m.dim();
            assert!(max_abs_diff(&(s * s), &c.delta) < 1e-10);
            assert!(max_abs_diff(&(s * si), &DMatrix::identity(d, d)) < 1e-10);
            for i in 0..d {
                let n: f64 = g.u[i].iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!((n - 1.0).abs() < 1e-10);
                for j in 0..d {
                    assert!((g.gram[(i, j)] - c.delta[(i, j)]).abs() < 1e-10);
                    if i != j {
                        assert!((g.hyperplane_angles[(i, j)].cos() + c.delta[(i, j)]).abs() < 1e-10);
                    }
                }
            }
        }
    }

    proptest! {
        #[test]
        fn random_symmetric_reconstruction(n in 1usize..7, seed in proptest::collection::vec(-5.0f64..5.0, 28)) {
            let m = symmetric(n, &seed);
            let e = sym_eig(&m);
            let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(e.values.clone()));
            let back = &e.vectors * d * e.vectors.transpose();
            prop_assert!(max_abs_diff(&back, &m) < 1e-10);
            prop_assert!(max_abs_diff(&(e.vectors.transpose() * &e.vectors), &DMatrix::identity(n, n)) < 1e-10);
            prop_assert!(e.values.windows(2).all(|w| w[0] >= w[1]));
            prop_assert!(e.off_history.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
            prop_assert!(*e.off_history.last().unwrap() <= JACOBI_TOL);
        }

        #[test]
        fn powers_add(n in 1usize..6, seed in proptest::collection::vec(-1.0f64..1.0, 21), s in -1.5f64..1.5, t in -1.5f64..1.5) {
            let b = symmetric(n, &seed);
            let m = &b * b.transpose() + DMatrix::identity(n, n);
            let lhs = matrix_power(&m, s).unwrap() * matrix_power(&m, t).unwrap();
            let rhs = matrix_power(&m, s + t).unwrap();
            prop_assert!(max_abs_diff(&lhs, &rhs) < 1e-10 * rhs.norm().max(1.0));
        }
    }
}

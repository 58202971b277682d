//! Irreducible finite Coxeter types: orders, reflection counts, Coxeter
//! matrices, standard simple systems, and labeled-graph matching.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;

use super::Label;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TypeName {
    A(u32),
    B(u32),
    D(u32),
    E(u32),
    F4,
    H3,
    H4,
    /// Dihedral of order 2m with m ∉ {3, 4}; those are A2 and B2.
    I2(u32),
}

impl fmt::Display for TypeName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TypeName::A(n) => write!(f, "A{n}"),
            TypeName::B(n) => write!(f, "B{n}"),
            TypeName::D(n) => write!(f, "D{n}"),
            TypeName::E(n) => write!(f, "E{n}"),
            TypeName::F4 => write!(f, "F4"),
            TypeName::H3 => write!(f, "H3"),
            TypeName::H4 => write!(f, "H4"),
            TypeName::I2(6) => write!(f, "G2"),
            TypeName::I2(m) => write!(f, "I2({m})"),
        }
    }
}

impl Serialize for TypeName {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

impl TypeName {
    /// Dihedral type with the A2/B2 aliases applied.
    pub fn dihedral(m: u32) -> Self {
        match m {
            3 => TypeName::A(2),
            4 => TypeName::B(2),
            m => TypeName::I2(m),
        }
    }

    pub fn rank(&self) -> usize {
        match *self {
            TypeName::A(n) | TypeName::B(n) | TypeName::D(n) | TypeName::E(n) => n as usize,
            TypeName::F4 | TypeName::H4 => 4,
            TypeName::H3 => 3,
            TypeName::I2(_) => 2,
        }
    }

    pub fn order(&self) -> u64 {
        match *self {
            TypeName::A(n) => factorial(u64::from(n) + 1),
            TypeName::B(n) => (1u64 << n) * factorial(u64::from(n)),
            TypeName::D(n) => (1u64 << (n - 1)) * factorial(u64::from(n)),
            TypeName::E(6) => 51_840,
            TypeName::E(7) => 2_903_040,
            TypeName::E(8) => 696_729_600,
            TypeName::E(_) => unreachable!("E_n only for n = 6, 7, 8"),
            TypeName::F4 => 1_152,
            TypeName::H3 => 120,
            TypeName::H4 => 14_400,
            TypeName::I2(m) => 2 * u64::from(m),
        }
    }

    /// Number of reflections, i.e. of positive roots.
    pub fn reflections(&self) -> u64 {
        match *self {
            TypeName::A(n) => u64::from(n) * u64::from(n + 1) / 2,
            TypeName::B(n) => u64::from(n) * u64::from(n),
            TypeName::D(n) => u64::from(n) * u64::from(n - 1),
            TypeName::E(6) => 36,
            TypeName::E(7) => 63,
            TypeName::E(8) => 120,
            TypeName::E(_) => unreachable!("E_n only for n = 6, 7, 8"),
            TypeName::F4 => 24,
            TypeName::H3 => 15,
            TypeName::H4 => 60,
            TypeName::I2(m) => u64::from(m),
        }
    }

    /// Coxeter matrix in the standard vertex order (m_ii = 1).
    pub fn coxeter_matrix(&self) -> Vec<Vec<u32>> {
        let n = self.rank();
        let mut m = vec![vec![2u32; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = 1;
        }
        let mut edge = |a: usize, b: usize, v: u32| {
            m[a][b] = v;
            m[b][a] = v;
        };
        match *self {
            TypeName::A(_) => (0..n.saturating_sub(1)).for_each(|i| edge(i, i + 1, 3)),
            TypeName::B(_) => {
                (0..n - 2).for_each(|i| edge(i, i + 1, 3));
                edge(n - 2, n - 1, 4);
            }
            TypeName::D(_) => {
                (0..n - 2).for_each(|i| edge(i, i + 1, 3));
                edge(n - 3, n - 1, 3);
            }
            TypeName::E(_) => {
                // Bourbaki: 1-3-4-5-…, with 2 attached to 4.
                edge(0, 2, 3);
                edge(1, 3, 3);
                (2..n - 1).for_each(|i| edge(i, i + 1, 3));
            }
            TypeName::F4 => {
                edge(0, 1, 3);
                edge(1, 2, 4);
                edge(2, 3, 3);
            }
            TypeName::H3 => {
                edge(0, 1, 5);
                edge(1, 2, 3);
            }
            TypeName::H4 => {
                edge(0, 1, 5);
                edge(1, 2, 3);
                edge(2, 3, 3);
            }
            TypeName::I2(k) => edge(0, 1, k),
        }
        m
    }

    /// A standard simple system. Classical and F4/E types use the usual
    /// rational coordinates (A_n lives in ℝ^(n+1)); the rest use the
    /// Cholesky factor of the Coxeter form.
    pub fn simple_roots(&self) -> Vec<Vec<f64>> {
        let n = self.rank();
        let e = |dim: usize, i: usize| {
            let mut v = vec![0.0; dim];
            v[i] = 1.0;
            v
        };
        let diff = |dim: usize, i: usize, j: usize, s: f64| {
            let mut v = e(dim, i);
            v[j] += s;
            v
        };
        match *self {
            TypeName::A(_) => (0..n).map(|i| diff(n + 1, i, i + 1, -1.0)).collect(),
            TypeName::B(_) => {
                let mut r: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1, -1.0)).collect();
                r.push(e(n, n - 1));
                r
            }
            TypeName::D(_) => {
                let mut r: Vec<_> = (0..n - 1).map(|i| diff(n, i, i + 1, -1.0)).collect();
                r.push(diff(n, n - 2, n - 1, 1.0));
                r
            }
            TypeName::E(_) => {
                let mut r = vec![
                    vec![0.5, -0.5, -0.5, -0.5, -0.5, -0.5, -0.5, 0.5],
                    diff(8, 0, 1, 1.0),
                ];
                for i in 0..6 {
                    r.push(diff(8, i + 1, i, -1.0));
                }
                r.truncate(n);
                r
            }
            TypeName::F4 => vec![
                vec![0.0, 1.0, -1.0, 0.0],
                vec![0.0, 0.0, 1.0, -1.0],
                vec![0.0, 0.0, 0.0, 1.0],
                vec![0.5, -0.5, -0.5, -0.5],
            ],
            _ => cholesky_realization(&self.coxeter_matrix()),
        }
    }
}

/// Rows of the Cholesky factor of G_ij = −cos(π/m_ij): unit vectors whose
/// pairwise inward-normal cosines realize the Coxeter matrix.
pub fn cholesky_realization(m: &[Vec<u32>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let g = nalgebra::DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            1.0
        } else {
            -(PI / f64::from(m[i][j])).cos()
        }
    });
    let l = g.cholesky().expect("finite Coxeter form is positive definite").l();
    (0..n).map(|i| l.row(i).iter().copied().collect()).collect()
}

/// Direct product of simple systems, placed in orthogonal coordinate blocks.
pub fn product_roots(types: &[TypeName]) -> Vec<Vec<f64>> {
    let blocks: Vec<Vec<Vec<f64>>> = types.iter().map(TypeName::simple_roots).collect();
    let dim: usize = blocks.iter().map(|b| b[0].len()).sum();
    let mut out = Vec::new();
    let mut offset = 0;
    for b in blocks {
        let w = b[0].len();
        for r in b {
            let mut v = vec![0.0; dim];
            v[offset..offset + w].copy_from_slice(&r);
            out.push(v);
        }
        offset += w;
    }
    out
}

/// Every irreducible type of rank `n` (dihedral types need the label `m`).
fn candidates(n: usize, dihedral_m: Option<u32>) -> Vec<TypeName> {
    let k = n as u32;
    let mut out = Vec::new();
    match n {
        1 => out.push(TypeName::A(1)),
        2 => {
            if let Some(m) = dihedral_m {
                out.push(TypeName::dihedral(m));
            }
        }
        _ => {
            out.push(TypeName::A(k));
            out.push(TypeName::B(k));
            if n >= 4 {
                out.push(TypeName::D(k));
            }
            if (6..=8).contains(&n) {
                out.push(TypeName::E(k));
            }
            if n == 4 {
                out.push(TypeName::F4);
                out.push(TypeName::H4);
            }
            if n == 3 {
                out.push(TypeName::H3);
            }
        }
    }
    out
}

/// Labeled-graph isomorphism between two Coxeter matrices by backtracking.
pub fn isomorphic(a: &[Vec<u32>], b: &[Vec<u32>]) -> bool {
    let n = a.len();
    if n != b.len() {
        return false;
    }
    let signature = |m: &[Vec<u32>], i: usize| {
        let mut s: Vec<u32> = m[i].clone();
        s.sort_unstable();
        s
    };
    let sa: Vec<_> = (0..n).map(|i| signature(a, i)).collect();
    let sb: Vec<_> = (0..n).map(|i| signature(b, i)).collect();
    let mut map = vec![usize::MAX; n];
    let mut used = vec![false; n];
    fn go(
        i: usize,
        a: &[Vec<u32>],
        b: &[Vec<u32>],
        sa: &[Vec<u32>],
        sb: &[Vec<u32>],
        map: &mut [usize],
        used: &mut [bool],
    ) -> bool {
        let n = a.len();
        if i == n {
            return true;
        }
        for j in 0..n {
            if used[j] || sa[i] != sb[j] {
                continue;
            }
            if (0..i).all(|p| a[i][p] == b[j][map[p]]) {
                map[i] = j;
                used[j] = true;
                if go(i + 1, a, b, sa, sb, map, used) {
                    return true;
                }
                used[j] = false;
            }
        }
        false
    }
    go(0, a, b, &sa, &sb, &mut map, &mut used)
}

/// Finite type of a connected Coxeter matrix, if any.
pub fn match_component(m: &[Vec<u32>]) -> Option<TypeName> {
    let n = m.len();
    let dihedral = (n == 2).then(|| m[0][1]);
    if n == 2 && dihedral == Some(2) {
        return None;
    }
    candidates(n, dihedral).into_iter().find(|t| isomorphic(m, &t.coxeter_matrix()))
}

/// Coxeter matrix of the diagram restricted to `vertices`, if every label
/// there is a finite chamber label.
pub fn component_matrix(labels: &dyn Fn(usize, usize) -> Label, vertices: &[usize]) -> Option<Vec<Vec<u32>>> {
    let n = vertices.len();
    let mut m = vec![vec![1u32; n]; n];
    for a in 0..n {
        for b in 0..n {
            if a != b {
                match labels(vertices[a], vertices[b]) {
                    Label::Order { m: v, chamber: true } => m[a][b] = v,
                    _ => return None,
                }
            }
        }
    }
    Some(m)
}

/// Irreducible types of rank at most `max_rank`, with dihedral orders up to
/// `max_m`. Used for catalog sweeps.
pub fn irreducible_types(max_rank: u32, max_m: u32) -> Vec<TypeName> {
    let mut out = vec![TypeName::A(1)];
    for m in 3..=max_m {
        out.push(TypeName::dihedral(m));
    }
    for n in 3..=max_rank {
        out.push(TypeName::A(n));
        out.push(TypeName::B(n));
        if n >= 4 {
            out.push(TypeName::D(n));
        }
        if (6..=8).contains(&n) {
            out.push(TypeName::E(n));
        }
    }
    if max_rank >= 3 {
        out.push(TypeName::H3);
    }
    if max_rank >= 4 {
        out.push(TypeName::F4);
        out.push(TypeName::H4);
    }
    out
}

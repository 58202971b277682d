//! Recognition of rational angles and the cosine rules used to decide the
//! order of a planar rotation.

use std::f64::consts::PI;

use crate::numeric::recognize_rational;

pub const ANGLE_TOL: f64 = 1e-9;
pub const DEFAULT_DENOM_CAP: u32 = 400;

/// Cosines allowed between walls of a finite reflection group whose
/// rotations have order at most 6, paired with that rotation order.
pub fn admissible_cosines() -> [(f64, u32); 11] {
    let s2 = 2f64.sqrt() / 2.0;
    let s3 = 3f64.sqrt() / 2.0;
    let g1 = (5f64.sqrt() - 1.0) / 4.0;
    let g2 = (5f64.sqrt() + 1.0) / 4.0;
    [
        (0.0, 2),
        (0.5, 3),
        (-0.5, 3),
        (s2, 4),
        (-s2, 4),
        (s3, 6),
        (-s3, 6),
        (g1, 5),
        (-g1, 5),
        (g2, 5),
        (-g2, 5),
    ]
}

/// Order of the rotation whose half-angle has cosine `c`, when `c` is in
/// the admissible list.
pub fn admissible_order(c: f64) -> Option<u32> {
    admissible_cosines()
        .iter()
        .find(|(v, _)| (c - v).abs() < ANGLE_TOL)
        .map(|&(_, m)| m)
}

/// Reduced fraction p/q (q ≤ cap) with |θ/π − p/q| < 1e−9, smallest q first.
pub fn rational_angle(theta: f64, cap: u32) -> Option<(u32, u32)> {
    let x = theta / PI;
    if !(-ANGLE_TOL..=1.0 + ANGLE_TOL).contains(&x) {
        return None;
    }
    (1..=cap).find_map(|q| {
        let p = (x * f64::from(q)).round();
        ((x - p / f64::from(q)).abs() < ANGLE_TOL).then_some((p.max(0.0) as u32, q))
    })
}

/// If θ = π/m for an integer 2 ≤ m ≤ cap, return m.
pub fn chamber_label(theta: f64, cap: u32) -> Option<u32> {
    if theta <= 0.0 {
        return None;
    }
    let m = (PI / theta).round();
    (m >= 2.0 && m <= f64::from(cap) && (theta - PI / m).abs() < ANGLE_TOL).then_some(m as u32)
}

/// How a rotation order was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "snake_case")]
pub enum OrderRule {
    /// arccos(a)/π matched a small fraction.
    RationalAngle,
    /// The rotation cosine is an exact rational outside {0, ±1/2, ±1}.
    ExactRationalCosine,
    /// The rotation cosine was recognized as a small-denominator rational
    /// outside {0, ±1/2, ±1} with residual below 1e−12; numerical evidence.
    RecognizedRationalCosine,
    /// Neither route applied.
    Undecided,
}

/// A cosine in ℚ whose angle is a rational multiple of π must lie in
/// {0, ±1/2, ±1}.
pub fn niven_allows(num: i64, den: i64) -> bool {
    let (n, d) = (num.abs(), den.abs());
    n == 0 || n == d || 2 * n == d
}

/// Recognizes a float cosine as a rational with denominator ≤ 10⁴.
pub fn recognize_cosine(c: f64) -> Option<(i64, i64)> {
    recognize_rational(c, 10_000, 1e-12)
}

//! Small numeric helpers shared across modules.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::ToPrimitive;

/// Best rational approximation of `x` with denominator at most `max_den`,
/// accepted only when it lies within `tol` of `x`.
pub fn recognize_rational(x: f64, max_den: i64, tol: f64) -> Option<(i64, i64)> {
    if !x.is_finite() {
        return None;
    }
    let (mut h0, mut h1) = (0i64, 1i64);
    let (mut k0, mut k1) = (1i64, 0i64);
    let mut r = x;
    for _ in 0..64 {
        let a = r.floor();
        if a.abs() > 1e15 {
            break;
        }
        let a = a as i64;
        let h2 = a.checked_mul(h1)?.checked_add(h0)?;
        let k2 = a.checked_mul(k1)?.checked_add(k0)?;
        if k2 > max_den {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        if (x - h1 as f64 / k1 as f64).abs() <= tol {
            return Some((h1, k1));
        }
        let frac = r - a as f64;
        if frac.abs() < 1e-300 {
            break;
        }
        r = 1.0 / frac;
    }
    (k1 != 0 && (x - h1 as f64 / k1 as f64).abs() <= tol).then_some((h1, k1))
}

pub fn to_ratio((n, d): (i64, i64)) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn ratio_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

/// Largest absolute entry.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, v| a.max(v.abs()))
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs(&(a - b))
}

pub fn gcd(a: u64, b: u64) -> u64 {
    num_integer::Integer::gcd(&a, &b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recognizes_simple_fractions() {
        assert_eq!(recognize_rational(0.4, 1000, 1e-12), Some((2, 5)));
        assert_eq!(recognize_rational(-1.0 / 3.0, 1000, 1e-12), Some((-1, 3)));
        assert_eq!(recognize_rational(2.0, 10, 1e-12), Some((2, 1)));
        assert_eq!(recognize_rational(std::f64::consts::PI, 1000, 1e-12), None);
        assert_eq!(recognize_rational(355.0 / 113.0, 200, 1e-12), Some((355, 113)));
    }
}

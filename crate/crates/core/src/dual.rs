//! Forward-mode dual numbers carrying a full gradient. Used to differentiate
//! compositions of the involutions without finite differences.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::poly::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct Dual {
    pub value: f64,
    pub grad: Vec<f64>,
}

impl Dual {
    pub fn constant(value: f64, n: usize) -> Self {
        Self { value, grad: vec![0.0; n] }
    }

    /// The `i`-th coordinate function evaluated at `value`.
    pub fn variable(value: f64, i: usize, n: usize) -> Self {
        let mut grad = vec![0.0; n];
        grad[i] = 1.0;
        Self { value, grad }
    }

    /// Seeds a point as the identity map, so the gradients of any composite
    /// evaluated on it form the Jacobian.
    pub fn seed(point: &[f64]) -> Vec<Dual> {
        let n = point.len();
        point.iter().enumerate().map(|(i, &v)| Self::variable(v, i, n)).collect()
    }

    /// Stacks the gradients of a vector of duals into a row-major Jacobian.
    pub fn jacobian(values: &[Dual]) -> nalgebra::DMatrix<f64> {
        let n = values.len();
        let m = values.first().map_or(0, |v| v.grad.len());
        nalgebra::DMatrix::from_fn(n, m, |r, c| values[r].grad[c])
    }

    fn zip(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Vec<f64> {
        self.grad.iter().zip(&other.grad).map(|(a, b)| f(*a, *b)).collect()
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, rhs: Dual) -> Dual {
        let grad = self.zip(&rhs, |a, b| a + b);
        Dual { value: self.value + rhs.value, grad }
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, rhs: Dual) -> Dual {
        let grad = self.zip(&rhs, |a, b| a - b);
        Dual { value: self.value - rhs.value, grad }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Mul for Dual {
    type Output = Dual;
    fn mul(self, rhs: Dual) -> Dual {
        let (u, v) = (self.value, rhs.value);
        let grad = self.zip(&rhs, |a, b| a * v + u * b);
        Dual { value: u * v, grad }
    }
}

#[allow(clippy::suspicious_arithmetic_impl)]
impl Div for Dual {
    type Output = Dual;
    fn div(self, rhs: Dual) -> Dual {
        let (u, v) = (self.value, rhs.value);
        let grad = self.zip(&rhs, |a, b| (a * v - u * b) / (v * v));
        Dual { value: u / v, grad }
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual { value: -self.value, grad: self.grad.iter().map(|g| -g).collect() }
    }
}

impl Scalar for Dual {
    fn constant(v: f64, like: &Self) -> Self {
        Dual::constant(v, like.grad.len())
    }

    fn powi(&self, n: i32) -> Self {
        let value = self.value.powi(n);
        let scale = f64::from(n) * self.value.powi(n - 1);
        Dual { value, grad: self.grad.iter().map(|g| g * scale).collect() }
    }
}

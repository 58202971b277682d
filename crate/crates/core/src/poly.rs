//! Laurent polynomials with exact rational coefficients, plus a compiled
//! floating-point form used for evaluation.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};

/// Minimal field-like interface so the same evaluation code serves `f64`
/// and the forward-mode [`crate::dual::Dual`] numbers.
pub trait Scalar:
    Clone
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    fn constant(v: f64, like: &Self) -> Self;
    fn powi(&self, n: i32) -> Self;
}

impl Scalar for f64 {
    fn constant(v: f64, _like: &Self) -> Self {
        v
    }
    fn powi(&self, n: i32) -> Self {
        f64::powi(*self, n)
    }
}

/// Sparse Laurent polynomial in `nvars` variables.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LaurentPoly {
    nvars: usize,
    terms: BTreeMap<Vec<i32>, BigRational>,
}

impl LaurentPoly {
    pub fn zero(nvars: usize) -> Self {
        Self { nvars, terms: BTreeMap::new() }
    }

    /// Builds a polynomial from (exponent, coefficient) pairs, merging equal
    /// exponents and discarding zero coefficients.
    pub fn from_terms<I>(nvars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<i32>, BigRational)>,
    {
        let mut p = Self::zero(nvars);
        for (e, c) in terms {
            p.add_term(e, c);
        }
        p
    }

    pub fn add_term(&mut self, exponent: Vec<i32>, coeff: BigRational) {
        assert_eq!(exponent.len(), self.nvars, "exponent length mismatch");
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exponent) {
            Entry::Vacant(v) => {
                v.insert(coeff);
            }
            Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[i32], &BigRational)> {
        self.terms.iter().map(|(e, c)| (e.as_slice(), c))
    }

    pub fn coefficient(&self, exponent: &[i32]) -> Option<&BigRational> {
        self.terms.get(exponent)
    }

    /// Multiplies by the monomial `x^shift`.
    pub fn shift(&self, shift: &[i32]) -> Self {
        assert_eq!(shift.len(), self.nvars);
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| (e.iter().zip(shift).map(|(a, b)| a + b).collect(), c.clone()));
        Self::from_terms(self.nvars, terms)
    }

    pub fn partial(&self, var: usize) -> Self {
        let terms = self.terms.iter().filter(|(e, _)| e[var] != 0).map(|(e, c)| {
            let mut e2 = e.clone();
            e2[var] -= 1;
            (e2, c * BigRational::from_integer(e[var].into()))
        });
        Self::from_terms(self.nvars, terms)
    }

    /// Exact evaluation at a rational point (all coordinates nonzero).
    pub fn eval_exact(&self, x: &[BigRational]) -> BigRational {
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            let mut m = c.clone();
            for (xi, &k) in x.iter().zip(e) {
                if k != 0 {
                    m *= num_traits::pow::Pow::pow(xi, k);
                }
            }
            acc += m;
        }
        acc
    }

    pub fn to_float(&self) -> FloatPoly {
        FloatPoly {
            nvars: self.nvars,
            terms: self
                .terms
                .iter()
                .map(|(e, c)| (e.clone(), c.to_f64().unwrap_or(f64::NAN)))
                .collect(),
        }
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, rhs: &LaurentPoly) -> LaurentPoly {
        assert_eq!(self.nvars, rhs.nvars);
        let mut out = self.clone();
        for (e, c) in &rhs.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }
}

/// Laurent polynomial with `f64` coefficients, for fast repeated evaluation.
#[derive(Clone, Debug)]
pub struct FloatPoly {
    nvars: usize,
    terms: Vec<(Vec<i32>, f64)>,
}

impl FloatPoly {
    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.nvars);
        self.terms
            .iter()
            .map(|(e, c)| {
                e.iter()
                    .zip(x)
                    .filter(|(k, _)| **k != 0)
                    .fold(*c, |m, (k, xi)| m * xi.powi(*k))
            })
            .sum()
    }

    /// Generic evaluation; `x` must be nonempty so constants can borrow its shape.
    pub fn eval_generic<T: Scalar>(&self, x: &[T]) -> T {
        let like = &x[0];
        let mut acc = T::constant(0.0, like);
        for (e, c) in &self.terms {
            let mut m = T::constant(*c, like);
            for (k, xi) in e.iter().zip(x) {
                if *k != 0 {
                    m = m * xi.powi(*k);
                }
            }
            acc = acc + m;
        }
        acc
    }
}

//! Finitely supported sequences and coordinate functionals.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Finitely supported real sequence `x = sum_j x_j e_j` over indices `j >= 0`.
///
/// Only non-zero coefficients are stored, so equality is canonical.
#[derive(Clone, PartialEq, Default)]
pub struct Element<T> {
    coords: BTreeMap<usize, T>,
}

impl<T: Scalar> Element<T> {
    pub fn zero() -> Self {
        Element { coords: BTreeMap::new() }
    }

    /// Canonical basis vector `e_j`.
    pub fn basis(j: usize) -> Self {
        let mut coords = BTreeMap::new();
        coords.insert(j, T::one());
        Element { coords }
    }

    /// Builds an element from `(index, value)` pairs; repeated indices are summed.
    pub fn from_pairs<I: IntoIterator<Item = (usize, T)>>(pairs: I) -> Result<Self> {
        let mut x = Self::zero();
        for (j, v) in pairs {
            if !v.is_finite() {
                return Err(Error::NonFinite { index: j });
            }
            let cur = x.get(j);
            x.set_unchecked(j, cur + v);
        }
        Ok(x)
    }

    /// Dense coefficients placed at indices `start, start + 1, ...`.
    pub fn from_dense(start: usize, values: &[T]) -> Result<Self> {
        Self::from_pairs(values.iter().enumerate().map(|(i, &v)| (start + i, v)))
    }

    pub fn get(&self, j: usize) -> T {
        self.coords.get(&j).copied().unwrap_or_else(T::zero)
    }

    /// Sets a coefficient; zero removes it.
    pub fn set(&mut self, j: usize, v: T) -> Result<()> {
        if !v.is_finite() {
            return Err(Error::NonFinite { index: j });
        }
        self.set_unchecked(j, v);
        Ok(())
    }

    pub(crate) fn set_unchecked(&mut self, j: usize, v: T) {
        if v == T::zero() {
            self.coords.remove(&j);
        } else {
            self.coords.insert(j, v);
        }
    }

    /// Non-zero coefficients in increasing index order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, T)> + '_ {
        self.coords.iter().map(|(&j, &v)| (j, v))
    }

    pub fn support(&self) -> impl Iterator<Item = usize> + '_ {
        self.coords.keys().copied()
    }

    pub fn nnz(&self) -> usize {
        self.coords.len()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.is_empty()
    }

    /// Largest index carrying a non-zero coefficient.
    pub fn horizon(&self) -> Option<usize> {
        self.coords.keys().next_back().copied()
    }

    pub fn min_index(&self) -> Option<usize> {
        self.coords.keys().next().copied()
    }

    pub fn scale(&self, s: T) -> Self {
        let mut out = Self::zero();
        for (j, v) in self.iter() {
            out.set_unchecked(j, v * s);
        }
        out
    }

    /// `self + s * other`.
    pub fn axpy(&self, s: T, other: &Self) -> Self {
        let mut out = self.clone();
        for (j, v) in other.iter() {
            let cur = out.get(j);
            out.set_unchecked(j, cur + s * v);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.axpy(T::one(), other)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.axpy(-T::one(), other)
    }

    pub fn l1_norm(&self) -> T {
        self.coords.values().map(|v| v.abs()).sum()
    }

    pub fn linf_norm(&self) -> T {
        self.coords.values().fold(T::zero(), |m, v| m.max(v.abs()))
    }

    /// Drops the coefficients at the given indices.
    pub fn without(&self, indices: impl IntoIterator<Item = usize>) -> Self {
        let mut out = self.clone();
        for j in indices {
            out.coords.remove(&j);
        }
        out
    }

    /// Keeps only indices `<= m`.
    pub fn truncate(&self, m: usize) -> Self {
        Element { coords: self.coords.range(..=m).map(|(&j, &v)| (j, v)).collect() }
    }

    /// Converts the coefficients to another scalar type.
    pub fn cast<U: Scalar>(&self) -> Element<U> {
        let mut out = Element::zero();
        for (j, v) in self.iter() {
            out.set_unchecked(j, U::of(v.as_f64()));
        }
        out
    }

    /// Converts from `f64` coefficients without losing anything representable.
    pub fn from_f64(x: &Element<f64>) -> Self {
        let mut out = Self::zero();
        for (j, v) in x.iter() {
            out.set_unchecked(j, T::of(v));
        }
        out
    }
}

impl<T: fmt::Debug> fmt::Debug for Element<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map().entries(self.coords.iter()).finish()
    }
}

/// Linear functional `F(y) = sum_j a_j y_j` with finitely many non-zero coefficients.
#[derive(Clone, PartialEq)]
pub struct Functional<T> {
    pub coeffs: Element<T>,
    /// Dual norm claimed by whoever built the functional.
    pub declared_dual_norm: T,
}

impl<T: Scalar> Functional<T> {
    pub fn new(coeffs: Element<T>, declared_dual_norm: T) -> Self {
        Functional { coeffs, declared_dual_norm }
    }

    pub fn zero() -> Self {
        Functional { coeffs: Element::zero(), declared_dual_norm: T::zero() }
    }

    /// Coordinate pairing with `y`.
    pub fn apply(&self, y: &Element<T>) -> T {
        apply(self, y)
    }

    pub fn coeff(&self, j: usize) -> T {
        self.coeffs.get(j)
    }

    /// `(1 - s) self + s other`; the declared norm follows the triangle inequality.
    pub fn mix(&self, other: &Self, s: T) -> Self {
        let coeffs = self.coeffs.scale(T::one() - s).axpy(s, &other.coeffs);
        let n = (T::one() - s) * self.declared_dual_norm + s * other.declared_dual_norm;
        Functional { coeffs, declared_dual_norm: n }
    }
}

impl<T: fmt::Debug> fmt::Debug for Functional<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Functional({:?}, |F| = {:?})", self.coeffs, self.declared_dual_norm)
    }
}

/// `sum_j F_j y_j` over the common support.
pub fn apply<T: Scalar>(f: &Functional<T>, y: &Element<T>) -> T {
    let (small, large) = if f.coeffs.nnz() <= y.nnz() { (&f.coeffs, y) } else { (y, &f.coeffs) };
    small.iter().map(|(j, v)| v * large.get(j)).sum()
}

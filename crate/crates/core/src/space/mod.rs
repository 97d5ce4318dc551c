//! Normed sequence spaces with explicit duality.

mod lq;
pub(crate) mod recursive;
mod smooth;

pub use lq::{dual_exponent, lq_norm, lq_norming_functional, LqSpace};
pub use smooth::{PSpec, SmoothSpaceX};

use crate::element::{Element, Functional};
use crate::error::Result;
use crate::scalar::Scalar;

/// A norm on finitely supported sequences together with its dual norm.
pub trait NormedSpace<T: Scalar>: Send + Sync {
    /// Rejects elements whose support lies outside the space's index domain.
    fn check_support(&self, x: &Element<T>) -> Result<()>;

    fn norm(&self, x: &Element<T>) -> Result<T>;

    /// Dual norm of the coefficient vector of `a`.
    fn dual_norm(&self, a: &Functional<T>) -> Result<T>;

    /// Unit-norm functional `F` with `F(x) = ||x||`.
    fn norming_functional(&self, x: &Element<T>) -> Result<Functional<T>>;

    /// Unit-norm element `x` with `a(x) = ||a||_*`.
    fn dual_map(&self, a: &Functional<T>) -> Result<Element<T>>;

    /// The norm is the Euclidean one.
    fn is_hilbert(&self) -> bool {
        false
    }

    /// The norm depends only on `|x_j|` and is monotone in each of them.
    fn is_absolute(&self) -> bool {
        false
    }

    fn describe(&self) -> String;
}

/// The two concrete spaces.
#[derive(Debug, Clone)]
pub enum Space<T: Scalar> {
    Lq(LqSpace<T>),
    X(SmoothSpaceX<T>),
}

impl<T: Scalar> Space<T> {
    pub fn lq(q: f64) -> Result<Self> {
        Ok(Space::Lq(LqSpace::new(q)?))
    }

    pub fn smooth(spec: PSpec, horizon: usize) -> Result<Self> {
        Ok(Space::X(SmoothSpaceX::new(spec, horizon)?))
    }

    fn inner(&self) -> &dyn NormedSpace<T> {
        match self {
            Space::Lq(s) => s,
            Space::X(s) => s,
        }
    }

    pub fn as_smooth(&self) -> Option<&SmoothSpaceX<T>> {
        match self {
            Space::X(s) => Some(s),
            Space::Lq(_) => None,
        }
    }

    pub fn as_lq(&self) -> Option<&LqSpace<T>> {
        match self {
            Space::Lq(s) => Some(s),
            Space::X(_) => None,
        }
    }
}

impl<T: Scalar> NormedSpace<T> for Space<T> {
    fn check_support(&self, x: &Element<T>) -> Result<()> {
        self.inner().check_support(x)
    }
    fn norm(&self, x: &Element<T>) -> Result<T> {
        self.inner().norm(x)
    }
    fn dual_norm(&self, a: &Functional<T>) -> Result<T> {
        self.inner().dual_norm(a)
    }
    fn norming_functional(&self, x: &Element<T>) -> Result<Functional<T>> {
        self.inner().norming_functional(x)
    }
    fn dual_map(&self, a: &Functional<T>) -> Result<Element<T>> {
        self.inner().dual_map(a)
    }
    fn is_hilbert(&self) -> bool {
        self.inner().is_hilbert()
    }
    fn is_absolute(&self) -> bool {
        self.inner().is_absolute()
    }
    fn describe(&self) -> String {
        self.inner().describe()
    }
}

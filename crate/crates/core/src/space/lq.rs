use crate::element::{Element, Functional};
use crate::error::{Error, Result};
use crate::scalar::{signed_pow, Scalar};

use super::NormedSpace;

/// Dual exponent `p = q / (q - 1)`.
pub fn dual_exponent(q: f64) -> Result<f64> {
    if !q.is_finite() || q <= 1.0 {
        return Err(Error::ExponentOutOfRange(q));
    }
    Ok(q / (q - 1.0))
}

/// The sequence space `l_q`, `1 < q < inf`, over indices `j >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LqSpace<T> {
    q: T,
    p: T,
}

/// `(sum |x_j|^e)^{1/e}`, scaled by the largest magnitude.
fn power_norm<T: Scalar>(x: &Element<T>, e: T) -> T {
    let m = x.linf_norm();
    if m == T::zero() {
        return T::zero();
    }
    if e == T::of(2.0) {
        let s: T = x.iter().map(|(_, v)| (v / m) * (v / m)).sum();
        return m * s.sqrt();
    }
    let s: T = x.iter().map(|(_, v)| (v.abs() / m).powf(e)).sum();
    m * s.powf(e.recip())
}

impl<T: Scalar> LqSpace<T> {
    pub fn new(q: f64) -> Result<Self> {
        let p = dual_exponent(q)?;
        Ok(LqSpace { q: T::of(q), p: T::of(p) })
    }

    pub fn q(&self) -> T {
        self.q
    }

    pub fn p(&self) -> T {
        self.p
    }
}

impl<T: Scalar> NormedSpace<T> for LqSpace<T> {
    fn check_support(&self, _x: &Element<T>) -> Result<()> {
        Ok(())
    }

    fn norm(&self, x: &Element<T>) -> Result<T> {
        Ok(power_norm(x, self.q))
    }

    fn dual_norm(&self, a: &Functional<T>) -> Result<T> {
        Ok(power_norm(&a.coeffs, self.p))
    }

    fn norming_functional(&self, x: &Element<T>) -> Result<Functional<T>> {
        let n = power_norm(x, self.q);
        if n == T::zero() {
            return Err(Error::ZeroElement);
        }
        let e = self.q - T::one();
        let mut c = Element::zero();
        for (j, v) in x.iter() {
            c.set_unchecked(j, signed_pow(v / n, e));
        }
        Ok(Functional::new(c, T::one()))
    }

    fn dual_map(&self, a: &Functional<T>) -> Result<Element<T>> {
        let n = power_norm(&a.coeffs, self.p);
        if n == T::zero() {
            return Err(Error::ZeroElement);
        }
        let e = self.p - T::one();
        let mut x = Element::zero();
        for (j, v) in a.coeffs.iter() {
            x.set_unchecked(j, signed_pow(v / n, e));
        }
        Ok(x)
    }

    fn is_hilbert(&self) -> bool {
        self.q == T::of(2.0)
    }

    fn is_absolute(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("l_{}", self.q)
    }
}

/// `||x||_q`.
pub fn lq_norm<T: Scalar>(space: &LqSpace<T>, x: &Element<T>) -> T {
    power_norm(x, space.q)
}

/// Norming functional `a_j = sgn(x_j) |x_j|^{q-1} / ||x||_q^{q-1}`.
pub fn lq_norming_functional<T: Scalar>(space: &LqSpace<T>, x: &Element<T>) -> Result<Functional<T>> {
    space.norming_functional(x)
}

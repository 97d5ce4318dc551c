//! The renormed `l_1` space `X`: `||x|| = lim theta_n(x)` with
//! `theta_n = (theta_{n-1}^{p_n} + |x_n|^{p_n})^{1/p_n}` over coordinates `n >= 1`.

use serde::{Deserialize, Serialize};

use crate::element::{Element, Functional};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

use super::recursive::{norm_at, norming_coeffs, prefix_norms};
use super::NormedSpace;

/// Generator of a non-increasing exponent sequence `p_k > 1`, described by its
/// excess `p_k - 1` so that exponents near 1 keep full relative precision.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum PSpec {
    /// `p_k = 1 + c r^{k-1}`.
    Geometric { c: f64, r: f64 },
    /// `p_k = 1 + c k^{-a}`.
    Power { c: f64, a: f64 },
    /// `p_k = 1 + excess[k - 1]`; `tail_bound` bounds `sum_{k > len} (1 - 1/p_k)`.
    Explicit { excess: Vec<f64>, tail_bound: f64 },
    /// `p_k = p` for every `k`.
    Constant { p: f64 },
}

impl Default for PSpec {
    /// `p_k = 1 + 2^{1-k}`.
    fn default() -> Self {
        PSpec::Geometric { c: 1.0, r: 0.5 }
    }
}

const RHO_MAX_TERMS: usize = 1_000_000;
const RHO_REL_TAIL: f64 = 1e-6;

impl PSpec {
    fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidSequence(m.to_string()));
        match *self {
            PSpec::Geometric { c, r } => {
                if !(c.is_finite() && c > 0.0) {
                    return bad("geometric: c must be positive");
                }
                if !(r > 0.0 && r < 1.0) {
                    return bad("geometric: need 0 < r < 1 for sum(1 - 1/p_k) < inf");
                }
            }
            PSpec::Power { c, a } => {
                if !(c.is_finite() && c > 0.0) {
                    return bad("power: c must be positive");
                }
                if !(a.is_finite() && a > 1.0) {
                    return bad("power: need a > 1 for sum(1 - 1/p_k) < inf");
                }
            }
            PSpec::Explicit { ref excess, tail_bound } => {
                if excess.is_empty() {
                    return bad("explicit: empty list");
                }
                if excess.iter().any(|&e| !(e.is_finite() && e > 0.0)) {
                    return bad("explicit: every p_k must be finite and > 1");
                }
                if excess.windows(2).any(|w| w[1] > w[0]) {
                    return bad("explicit: p_k must be non-increasing");
                }
                if !(tail_bound.is_finite() && tail_bound >= 0.0) {
                    return bad("explicit: tail bound must be finite and >= 0");
                }
            }
            PSpec::Constant { p } => {
                if !(p.is_finite() && p > 1.0) {
                    return Err(Error::ExponentOutOfRange(p));
                }
                return bad("constant p_k: sum(1 - 1/p_k) diverges");
            }
        }
        Ok(())
    }

    /// `p_k - 1` for `k >= 1`, or `None` past the end of an explicit list.
    pub fn excess(&self, k: usize) -> Option<f64> {
        debug_assert!(k >= 1);
        match *self {
            PSpec::Geometric { c, r } => Some(c * r.powi((k - 1) as i32)),
            PSpec::Power { c, a } => Some(c * (k as f64).powf(-a)),
            PSpec::Explicit { ref excess, .. } => excess.get(k - 1).copied(),
            PSpec::Constant { p } => Some(p - 1.0),
        }
    }

    /// Certified bound on `sum_{k > n} (1 - 1/p_k) <= sum_{k > n} (p_k - 1)`.
    pub fn tail_bound(&self, n: usize) -> f64 {
        match *self {
            PSpec::Geometric { c, r } => c * r.powi(n as i32) / (1.0 - r),
            PSpec::Power { c, a } => {
                if n == 0 {
                    c + c / (a - 1.0)
                } else {
                    c * (n as f64).powf(1.0 - a) / (a - 1.0)
                }
            }
            PSpec::Explicit { ref excess, tail_bound } => {
                excess.iter().skip(n).map(|e| e / (1.0 + e)).sum::<f64>() + tail_bound
            }
            PSpec::Constant { .. } => f64::INFINITY,
        }
    }

    fn max_index(&self) -> Option<usize> {
        match self {
            PSpec::Explicit { excess, .. } => Some(excess.len()),
            _ => None,
        }
    }
}

/// Certified bracket of `sum_k (1 - 1/p_k)`: `(partial, tail)`.
fn exponent_sum(spec: &PSpec) -> Result<(f64, f64)> {
    let limit = spec.max_index().unwrap_or(RHO_MAX_TERMS);
    let mut s = 0.0;
    let mut comp = 0.0;
    let mut k = 1;
    while k <= limit {
        let e = spec.excess(k).expect("index within list");
        // Kahan summation keeps the partial sum exact to round-off
        let y = e / (1.0 + e) - comp;
        let t = s + y;
        comp = (t - s) - y;
        s = t;
        let tail = spec.tail_bound(k);
        if k >= 60 && tail <= 1e-17 * s {
            return Ok((s, tail));
        }
        k += 1;
    }
    let tail = spec.tail_bound(limit);
    if tail > RHO_REL_TAIL * s {
        return Err(Error::InvalidSequence(format!(
            "tail {tail:e} of sum(1 - 1/p_k) exceeds {RHO_REL_TAIL:e} of the partial sum {s}"
        )));
    }
    Ok((s, tail))
}

/// `X` truncated to coordinates `1..=horizon`.
#[derive(Debug, Clone)]
pub struct SmoothSpaceX<T> {
    spec: PSpec,
    horizon: usize,
    p: Vec<T>,
    p_excess: Vec<T>,
    q: Vec<T>,
    q_excess: Vec<T>,
    rho: f64,
    rho_upper: f64,
    rho_tail: f64,
}

impl<T: Scalar> SmoothSpaceX<T> {
    pub fn new(spec: PSpec, horizon: usize) -> Result<Self> {
        spec.validate()?;
        if horizon == 0 {
            return Err(Error::InvalidParameter("horizon must be >= 1".into()));
        }
        if let Some(m) = spec.max_index() {
            if horizon > m {
                return Err(Error::HorizonExceeded { index: horizon, horizon: m });
            }
        }
        let mut p = Vec::with_capacity(horizon);
        let mut p_excess = Vec::with_capacity(horizon);
        let mut q = Vec::with_capacity(horizon);
        let mut q_excess = Vec::with_capacity(horizon);
        for k in 1..=horizon {
            let e = spec.excess(k).expect("validated");
            p_excess.push(T::of(e));
            p.push(T::of(1.0 + e));
            // q_k - 1 = 1 / (p_k - 1)
            q_excess.push(T::of(1.0 / e));
            q.push(T::of(1.0 + 1.0 / e));
        }
        let (s, tail) = exponent_sum(&spec)?;
        Ok(SmoothSpaceX {
            spec,
            horizon,
            p,
            p_excess,
            q,
            q_excess,
            rho: (-(s + tail)).exp2(),
            rho_upper: (-s).exp2(),
            rho_tail: tail,
        })
    }

    /// The default exponents `p_k = 1 + 2^{1-k}`.
    pub fn with_default_exponents(horizon: usize) -> Result<Self> {
        Self::new(PSpec::default(), horizon)
    }

    pub fn spec(&self) -> &PSpec {
        &self.spec
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    /// `p_k`, `1 <= k <= horizon`.
    pub fn p(&self, k: usize) -> T {
        self.p[k - 1]
    }

    /// `p_k - 1`.
    pub fn p_excess(&self, k: usize) -> T {
        self.p_excess[k - 1]
    }

    /// `q_k = p_k / (p_k - 1)`.
    pub fn q(&self, k: usize) -> T {
        self.q[k - 1]
    }

    /// Certified lower bound `2^{-(S + tail)}` of `rho = 2^{-sum(1 - 1/p_k)}`.
    pub fn equivalence_constant(&self) -> f64 {
        self.rho
    }

    /// `2^{-S}` with `S` the computed partial sum; `rho` lies in `[rho, rho_upper]`.
    pub fn equivalence_constant_upper(&self) -> f64 {
        self.rho_upper
    }

    /// Tail bound used to certify the exponent sum.
    pub fn rho_tail(&self) -> f64 {
        self.rho_tail
    }

    fn check_index(&self, n: usize) -> Result<()> {
        if n > self.horizon {
            Err(Error::HorizonExceeded { index: n, horizon: self.horizon })
        } else {
            Ok(())
        }
    }

    fn check_coords(&self, x: &Element<T>) -> Result<()> {
        if x.min_index() == Some(0) {
            return Err(Error::IndexOutOfDomain { index: 0 });
        }
        match x.horizon() {
            Some(m) => self.check_index(m),
            None => Ok(()),
        }
    }

    /// `theta_n(x)`.
    pub fn theta_norm(&self, x: &Element<T>, n: usize) -> Result<T> {
        self.check_index(n)?;
        self.check_coords(x)?;
        Ok(norm_at(x, &self.p, n))
    }

    /// `theta_0(x), ..., theta_n(x)`.
    pub fn theta_prefix(&self, x: &Element<T>, n: usize) -> Result<Vec<T>> {
        self.check_index(n)?;
        self.check_coords(x)?;
        Ok(prefix_norms(x, &self.p, n))
    }

    /// `||x||_X = theta_m(x)` for `m` the largest index in the support.
    pub fn x_norm(&self, x: &Element<T>) -> Result<T> {
        self.check_coords(x)?;
        Ok(norm_at(x, &self.p, x.horizon().unwrap_or(0)))
    }

    /// `nu_n(a)`, the same recursion with the exponents `q_k`.
    pub fn nu_dual_norm(&self, a: &Functional<T>, n: usize) -> Result<T> {
        self.check_index(n)?;
        self.check_coords(&a.coeffs)?;
        Ok(norm_at(&a.coeffs, &self.q, n))
    }

    /// Coefficients of the norming functional `F_x^m`, `m` the last index of `x`.
    pub fn x_norming_functional(&self, x: &Element<T>) -> Result<Functional<T>> {
        self.check_coords(x)?;
        let m = x.horizon().ok_or(Error::ZeroElement)?;
        Ok(Functional::new(norming_coeffs(x, &self.p, &self.p_excess, m), T::one()))
    }
}

impl<T: Scalar> NormedSpace<T> for SmoothSpaceX<T> {
    fn check_support(&self, x: &Element<T>) -> Result<()> {
        self.check_coords(x)
    }

    fn norm(&self, x: &Element<T>) -> Result<T> {
        self.x_norm(x)
    }

    fn dual_norm(&self, a: &Functional<T>) -> Result<T> {
        self.check_coords(&a.coeffs)?;
        Ok(norm_at(&a.coeffs, &self.q, a.coeffs.horizon().unwrap_or(0)))
    }

    fn norming_functional(&self, x: &Element<T>) -> Result<Functional<T>> {
        self.x_norming_functional(x)
    }

    fn dual_map(&self, a: &Functional<T>) -> Result<Element<T>> {
        self.check_coords(&a.coeffs)?;
        let m = a.coeffs.horizon().ok_or(Error::ZeroElement)?;
        Ok(norming_coeffs(&a.coeffs, &self.q, &self.q_excess, m))
    }

    fn is_absolute(&self) -> bool {
        true
    }

    fn describe(&self) -> String {
        format!("X(horizon {})", self.horizon)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn x(h: usize) -> SmoothSpaceX<f64> {
        SmoothSpaceX::with_default_exponents(h).unwrap()
    }

    fn el(v: &[f64]) -> Element<f64> {
        Element::from_dense(1, v).unwrap()
    }

    #[test]
    fn default_exponents() {
        let s = x(5);
        assert_eq!(s.p(1), 2.0);
        assert_eq!(s.p(2), 1.5);
        assert_eq!(s.p(3), 1.25);
        assert_eq!(s.q(2), 3.0);
        assert_eq!(s.q(5), 17.0);
    }

    #[test]
    fn theta_examples() {
        let s = x(5);
        assert_eq!(s.theta_norm(&el(&[1.0]), 1).unwrap(), 1.0);
        let g1 = el(&[1.0, 1.0]);
        // direct recursion oracle
        let direct = (1f64 + 1f64).powf(1.0 / 1.5);
        assert_relative_eq!(s.theta_norm(&g1, 2).unwrap(), direct, max_relative = 1e-14);
        assert_relative_eq!(direct, 1.5874010519681994, max_relative = 1e-15);
        let g0 = el(&[1.0, 1.0, 1.0]);
        let t2 = (1f64.powf(1.5) + 1f64.powf(1.5)).powf(1.0 / 1.5);
        let t3 = (t2.powf(1.25) + 1.0).powf(1.0 / 1.25);
        assert_relative_eq!(s.theta_norm(&g0, 3).unwrap(), t3, max_relative = 1e-14);
        assert_relative_eq!(t3, (1.0 + 2f64.powf(1.25 / 1.5)).powf(1.0 / 1.25), max_relative = 1e-14);
        assert!((t3 - 2.267).abs() < 1e-3);
        assert_eq!(s.x_norm(&Element::zero()).unwrap(), 0.0);
        assert!(matches!(s.theta_norm(&g0, 6), Err(Error::HorizonExceeded { .. })));
        assert!(matches!(s.x_norm(&Element::basis(0)), Err(Error::IndexOutOfDomain { .. })));
    }

    #[test]
    fn nu_examples() {
        let s = x(4);
        let a = Functional::new(el(&[1.0]), 1.0);
        assert_eq!(s.nu_dual_norm(&a, 1).unwrap(), 1.0);
        let b = Functional::new(el(&[1.0, 1.0]), 1.0);
        assert_relative_eq!(s.nu_dual_norm(&b, 2).unwrap(), 2f64.cbrt(), max_relative = 1e-14);
        assert_eq!(s.nu_dual_norm(&Functional::zero(), 3).unwrap(), 0.0);
    }

    #[test]
    fn norming_examples() {
        let s = x(5);
        let f = s.x_norming_functional(&el(&[-2.0])).unwrap();
        assert_eq!(f.coeffs, el(&[-1.0]));

        let v = el(&[3.0, 4.0]);
        let f = s.x_norming_functional(&v).unwrap();
        let t2 = (3f64.powf(1.5) + 4f64.powf(1.5)).powf(1.0 / 1.5);
        assert_relative_eq!(f.coeff(1), 3f64.sqrt() / t2.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(f.coeff(2), 4f64.sqrt() / t2.sqrt(), max_relative = 1e-13);
        assert_relative_eq!(f.apply(&v), t2, max_relative = 1e-13);
        assert_relative_eq!(s.dual_norm(&f).unwrap(), 1.0, max_relative = 1e-13);

        let g0 = el(&[1.0, 1.0, 1.0]);
        let f = s.x_norming_functional(&g0).unwrap();
        assert_relative_eq!(f.apply(&g0), s.x_norm(&g0).unwrap(), max_relative = 1e-13);
        assert_eq!(s.x_norming_functional(&Element::zero()), Err(Error::ZeroElement));
    }

    #[test]
    fn rho_default() {
        let s = x(3);
        let rho = s.equivalence_constant();
        assert!((rho - 0.416).abs() <= 1e-3);
        // oracle: partial sum to k = 60 plus the geometric tail bound
        let partial: f64 = (1..=60).map(|k| {
            let e = 2f64.powi(1 - k);
            e / (1.0 + e)
        }).sum();
        assert_relative_eq!(rho, (-partial).exp2(), max_relative = 1e-12);
        assert!(s.equivalence_constant_upper() >= rho);
    }

    #[test]
    fn rho_rejects_divergent() {
        assert!(SmoothSpaceX::<f64>::new(PSpec::Constant { p: 1.5 }, 3).is_err());
        assert!(SmoothSpaceX::<f64>::new(PSpec::Geometric { c: 1.0, r: 1.0 }, 3).is_err());
        assert!(SmoothSpaceX::<f64>::new(PSpec::Power { c: 1.0, a: 1.0 }, 3).is_err());
    }

    #[test]
    fn rho_truncated_list() {
        let excess: Vec<f64> = (1..=40).map(|k| 2f64.powi(1 - k)).collect();
        let tail = PSpec::default().tail_bound(40);
        let s = SmoothSpaceX::<f64>::new(PSpec::Explicit { excess, tail_bound: tail }, 10).unwrap();
        assert!((s.equivalence_constant() - x(3).equivalence_constant()).abs() < 1e-9);
        assert!(matches!(
            SmoothSpaceX::<f64>::new(PSpec::Explicit { excess: vec![0.5, 0.6], tail_bound: 0.0 }, 2),
            Err(Error::InvalidSequence(_))
        ));
    }

    #[test]
    fn dual_map_pairs_to_dual_norm() {
        let s = x(6);
        let a = Functional::new(el(&[0.4, -1.0, 0.0, 2.0, 0.3]), 1.0);
        let v = s.dual_map(&a).unwrap();
        assert_relative_eq!(s.x_norm(&v).unwrap(), 1.0, max_relative = 1e-12);
        assert_relative_eq!(a.apply(&v), s.dual_norm(&a).unwrap(), max_relative = 1e-12);
    }
}

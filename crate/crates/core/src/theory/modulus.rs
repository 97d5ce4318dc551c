//! Moduli of smoothness and the roots `xi` of `rho(xi) = theta t xi`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::element::Element;
use crate::error::{Error, Result};
use crate::space::{LqSpace, NormedSpace};

/// Upper bound on the modulus of `l_q`: `u^q / q` for `q <= 2`, `(q - 1) u^2 / 2` for `q >= 2`.
pub fn modulus_lp_bound(q: f64, u: f64) -> Result<f64> {
    if !(q > 1.0) || !q.is_finite() {
        return Err(Error::ExponentOutOfRange(q));
    }
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must be non-negative")));
    }
    Ok(if q <= 2.0 { u.powf(q) / q } else { (q - 1.0) * u * u / 2.0 })
}

/// Exact modulus of a Hilbert space, `sqrt(1 + u^2) - 1`, in a cancellation-free form.
pub fn modulus_l2(u: f64) -> f64 {
    u * u / ((1.0 + u * u).sqrt() + 1.0)
}

fn random_unit(space: &dyn NormedSpace<f64>, dim: usize, rng: &mut ChaCha8Rng) -> Result<Element<f64>> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| StandardNormal.sample(rng)).collect();
        let x = Element::from_dense(1, &v)?;
        let n = space.norm(&x)?;
        if n > 0.0 {
            return Ok(x.scale(1.0 / n));
        }
    }
}

/// `max (||x + u y|| + ||x - u y||) / 2 - 1` over `samples` random unit pairs
/// supported on `e_1..e_dim`. A lower estimate of `rho(u)`.
pub fn modulus_empirical_dim(space: &dyn NormedSpace<f64>, u: f64, samples: usize, seed: u64, dim: usize) -> Result<f64> {
    if !(u >= 0.0) {
        return Err(Error::InvalidParameter(format!("u = {u} must be non-negative")));
    }
    if samples == 0 || dim == 0 {
        return Err(Error::InvalidParameter("samples and dim must be positive".into()));
    }
    if u == 0.0 {
        return Ok(0.0);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best = 0.0f64;
    for _ in 0..samples {
        let x = random_unit(space, dim, &mut rng)?;
        let y = random_unit(space, dim, &mut rng)?;
        let v = (space.norm(&x.axpy(u, &y))? + space.norm(&x.axpy(-u, &y))?) / 2.0 - 1.0;
        best = best.max(v);
    }
    Ok(best)
}

/// [`modulus_empirical_dim`] on the plane spanned by `e_1, e_2`.
pub fn modulus_empirical(space: &dyn NormedSpace<f64>, u: f64, samples: usize, seed: u64) -> Result<f64> {
    modulus_empirical_dim(space, u, samples, seed, 2)
}

/// A modulus of smoothness `u -> rho(u)` (exact, bound or estimate).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum SmoothnessModel {
    /// [`modulus_lp_bound`].
    LpBound { q: f64 },
    /// [`modulus_l2`].
    L2Exact,
    /// `gamma u^q`.
    Power { gamma: f64, q: f64 },
    /// [`modulus_empirical_dim`] in `l_q`.
    Empirical { q: f64, dim: usize, samples: usize, seed: u64 },
}

impl SmoothnessModel {
    pub fn validate(&self) -> Result<()> {
        match self {
            SmoothnessModel::LpBound { q } | SmoothnessModel::Empirical { q, .. } => {
                if !(*q > 1.0) || !q.is_finite() {
                    return Err(Error::ExponentOutOfRange(*q));
                }
            }
            SmoothnessModel::L2Exact => {}
            SmoothnessModel::Power { gamma, q } => {
                if !(*gamma > 0.0) || !(*q > 1.0) || !q.is_finite() {
                    return Err(Error::InvalidParameter(format!("power model needs gamma > 0 and q > 1, got ({gamma}, {q})")));
                }
            }
        }
        if let SmoothnessModel::Empirical { dim, samples, .. } = self {
            if *dim == 0 || *samples == 0 {
                return Err(Error::InvalidParameter("empirical model needs dim, samples >= 1".into()));
            }
        }
        Ok(())
    }

    /// Power type `q` with `rho(u) <= gamma u^q` near zero, when known.
    pub fn power_type(&self) -> Option<f64> {
        match self {
            SmoothnessModel::LpBound { q } => Some(q.min(2.0)),
            SmoothnessModel::L2Exact => Some(2.0),
            SmoothnessModel::Power { q, .. } => Some(*q),
            SmoothnessModel::Empirical { .. } => None,
        }
    }

    pub fn rho(&self, u: f64) -> Result<f64> {
        match self {
            SmoothnessModel::LpBound { q } => modulus_lp_bound(*q, u),
            SmoothnessModel::L2Exact => Ok(modulus_l2(u)),
            SmoothnessModel::Power { gamma, q } => Ok(gamma * u.powf(*q)),
            SmoothnessModel::Empirical { q, dim, samples, seed } => {
                let space = LqSpace::<f64>::new(*q)?;
                modulus_empirical_dim(&space, u, *samples, *seed, *dim)
            }
        }
    }
}

const XI_LIMIT: f64 = 1e9;

/// The positive root of `rho(xi) = theta t xi`.
pub fn xi_solve(model: &SmoothnessModel, theta: f64, t: f64) -> Result<f64> {
    model.validate()?;
    if !(theta > 0.0 && theta <= 0.5) {
        return Err(Error::InvalidParameter(format!("theta = {theta} outside (0, 1/2]")));
    }
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::InvalidParameter(format!("t = {t} outside (0, 1]")));
    }
    let slope = theta * t;
    let g = |u: f64| -> Result<f64> { Ok(model.rho(u)? - slope * u) };
    let mut lo = 1.0;
    let mut halvings = 0;
    while g(lo)? >= 0.0 {
        lo *= 0.5;
        halvings += 1;
        if halvings > 2000 || lo == 0.0 {
            return Err(Error::NoRoot { slope, limit: 0.0 });
        }
    }
    let mut hi = 1.0;
    while g(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > XI_LIMIT {
            return Err(Error::NoRoot { slope, limit: XI_LIMIT });
        }
    }
    if lo > hi {
        std::mem::swap(&mut lo, &mut hi);
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let v = g(mid)?;
        if v == 0.0 {
            return Ok(mid);
        }
        if v < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let xi = 0.5 * (lo + hi);
    if g(xi)?.abs() > 1e-10 * xi.max(1.0) {
        return Err(Error::NoRoot { slope, limit: xi });
    }
    Ok(xi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn lp_bound_values() {
        assert_relative_eq!(modulus_lp_bound(2.0, 0.1).unwrap(), 0.005, max_relative = 1e-15);
        assert_relative_eq!(modulus_lp_bound(1.5, 1.0).unwrap(), 2.0 / 3.0, max_relative = 1e-15);
        assert_eq!(modulus_lp_bound(3.0, 0.0).unwrap(), 0.0);
        assert!(matches!(modulus_lp_bound(1.0, 0.5), Err(Error::ExponentOutOfRange(_))));
    }

    #[test]
    fn empirical_hilbert_modulus() {
        let l2 = LqSpace::<f64>::new(2.0).unwrap();
        let est = modulus_empirical(&l2, 1.0, 100_000, 1).unwrap();
        let exact = 2f64.sqrt() - 1.0;
        assert!(est <= exact + 1e-12);
        assert!(exact - est < 1e-3);
        assert_eq!(modulus_empirical(&l2, 0.0, 10, 1).unwrap(), 0.0);
    }

    #[test]
    fn xi_values() {
        let xi = xi_solve(&SmoothnessModel::L2Exact, 0.5, 1.0).unwrap();
        assert!((xi - 4.0 / 3.0).abs() <= 1e-10);
        let a = xi_solve(&SmoothnessModel::L2Exact, 0.5, 2e-3).unwrap();
        let b = xi_solve(&SmoothnessModel::L2Exact, 0.5, 2e-4).unwrap();
        assert!(b < a && a < xi);
        let power = SmoothnessModel::Power { gamma: 0.7, q: 1.5 };
        let xi = xi_solve(&power, 0.25, 0.8).unwrap();
        assert_relative_eq!(xi, (0.2f64 / 0.7).powf(2.0), max_relative = 1e-9);
        assert!(xi_solve(&SmoothnessModel::L2Exact, 0.75, 1.0).is_err());
    }
}

//! The functional bound `beta_n`, the selection lower bound, the tail error bound, and the check of `(a + b^q)^{1/q} <= a + b`.

use serde::{Deserialize, Serialize};

use crate::dictionary::Dictionary;
use crate::element::Element;
use crate::engine::Trace;
use crate::error::{Error, Result};
use crate::schedule::Schedules;
use crate::space::NormedSpace;
use crate::theory::modulus::SmoothnessModel;

/// Geometric grid `lo, ..., hi` with `points` entries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Grid {
    fn default() -> Self {
        Grid { lo: 1e-6, hi: 1e3, points: 200 }
    }
}

impl Grid {
    pub fn values(&self) -> Vec<f64> {
        if self.points <= 1 {
            return vec![self.lo];
        }
        let r = (self.hi / self.lo).ln() / (self.points - 1) as f64;
        (0..self.points).map(|i| self.lo * (r * i as f64).exp()).collect()
    }

    fn validate(&self) -> Result<()> {
        if !(self.lo > 0.0 && self.hi >= self.lo && self.hi.is_finite()) || self.points == 0 {
            return Err(Error::InvalidParameter(format!("bad grid {self:?}")));
        }
        Ok(())
    }
}

/// Error terms of step `n`: `delta_n, delta'_n, eta_n, eta'_n`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ErrorTerms {
    pub delta: f64,
    pub delta_prime: f64,
    pub eta: f64,
    pub eta_prime: f64,
}

impl ErrorTerms {
    /// Values at step `n`; `eta_0 = eta'_0 = 0` since `G_0 = 0` is exact.
    pub fn at(sched: &Schedules, n: usize) -> Self {
        ErrorTerms {
            delta: sched.delta.eval(n),
            delta_prime: sched.delta_prime.eval(n),
            eta: if n == 0 { 0.0 } else { sched.eta.eval(n) },
            eta_prime: if n == 0 { 0.0 } else { sched.eta_prime.eval(n) },
        }
    }
}

/// `beta_n(phi) = inf_lambda (1 / lambda)(delta + eta + (delta' + eta') / ||f_n|| + 2 rho(lambda ||phi||))`,
/// minimized over `grid`.
pub fn beta_bound(model: &SmoothnessModel, err: ErrorTerms, norm_fn: f64, norm_phi: f64, grid: &Grid) -> Result<f64> {
    grid.validate()?;
    if !(norm_fn > 0.0) {
        return Err(Error::InvalidParameter(format!("||f_n|| = {norm_fn} must be positive")));
    }
    let base = err.delta + err.eta + (err.delta_prime + err.eta_prime) / norm_fn;
    let mut best = f64::INFINITY;
    for lambda in grid.values() {
        best = best.min((base + 2.0 * model.rho(lambda * norm_phi)?) / lambda);
    }
    Ok(best)
}

/// `(a + b^q)^{1/q} <= a + b` for `q > 1, a >= 0, b >= 1`.
pub fn lemma4_check(q: f64, a: f64, b: f64) -> Result<bool> {
    if !(q > 1.0) {
        return Err(Error::HypothesisViolated(format!("q = {q} must exceed 1")));
    }
    if !(a >= 0.0) {
        return Err(Error::HypothesisViolated(format!("a = {a} must be non-negative")));
    }
    if !(b >= 1.0) {
        return Err(Error::HypothesisViolated(format!("b = {b} must be at least 1")));
    }
    let lhs = (a + b.powf(q)).powf(1.0 / q);
    Ok(lhs <= (a + b) * (1.0 + 4.0 * f64::EPSILON))
}

/// `h` with `||f - h|| <= eps` and `h / A = sum_i c_i g_i`, `sum |c_i| <= 1`, `g_i` signed atoms.
#[derive(Debug, Clone)]
pub struct HullWitness {
    pub h: Element<f64>,
    pub a: f64,
    pub eps: f64,
    /// `(atom id, coefficient)`
    pub combination: Vec<(usize, f64)>,
}

impl HullWitness {
    pub fn validate(&self, space: &dyn NormedSpace<f64>, dict: &Dictionary<f64>, f: &Element<f64>) -> Result<()> {
        if !(self.a > 0.0) || !(self.eps >= 0.0) {
            return Err(Error::WitnessInvalid(format!("need A > 0 and eps >= 0, got A = {}, eps = {}", self.a, self.eps)));
        }
        let gap = space.norm(&f.sub(&self.h))?;
        if gap > self.eps * (1.0 + 1e-12) + 1e-12 {
            return Err(Error::WitnessInvalid(format!("||f - h|| = {gap} exceeds eps = {}", self.eps)));
        }
        let mass: f64 = self.combination.iter().map(|(_, c)| c.abs()).sum();
        if mass > 1.0 + 1e-12 {
            return Err(Error::WitnessInvalid(format!("convex weights sum to {mass} > 1")));
        }
        let mut sum = Element::zero();
        for &(id, c) in &self.combination {
            let atom = dict.atom(id).ok_or_else(|| Error::WitnessInvalid(format!("atom {id} is not in the dictionary")))?;
            sum = sum.axpy(c, &atom.element);
        }
        let target = self.h.scale(1.0 / self.a);
        let miss = space.norm(&target.sub(&sum))?;
        if miss > 1e-12 * space.norm(&target)?.max(1.0) {
            return Err(Error::WitnessInvalid(format!("h / A differs from the combination by {miss}")));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LemmaDiagnostics {
    pub step: usize,
    /// `beta_n(G_n)`
    pub beta: f64,
    /// Lower bound on `|F_n(phi_{n+1})|`.
    pub lemma2_bound: f64,
    pub lemma2_actual: f64,
    /// Upper bound on `E_m` for every `m > n`.
    pub lemma3_bound: f64,
    /// `max_{m > n} E_m = E_{n+1}`.
    pub lemma3_actual: f64,
}

impl LemmaDiagnostics {
    pub fn lemma2_margin(&self) -> f64 {
        self.lemma2_actual - self.lemma2_bound
    }

    pub fn lemma3_margin(&self) -> f64 {
        self.lemma3_bound - self.lemma3_actual
    }
}

/// Evaluates the selection lower bound and the tail error bound at step `n` of `trace` (`0 <= n < len`)
/// and pairs them with the values the run produced.
#[allow(clippy::too_many_arguments)]
pub fn lemma_diagnostics(
    space: &dyn NormedSpace<f64>,
    dict: &Dictionary<f64>,
    f: &Element<f64>,
    trace: &Trace<f64>,
    n: usize,
    hull: &HullWitness,
    model: &SmoothnessModel,
    sched: &Schedules,
    lambda_grid: &Grid,
    mu_grid: &Grid,
) -> Result<LemmaDiagnostics> {
    hull.validate(space, dict, f)?;
    if n >= trace.len() {
        return Err(Error::InvalidParameter(format!("step {n} has no successor in a trace of length {}", trace.len())));
    }
    mu_grid.validate()?;
    let norm_fn = if n == 0 { trace.initial_norm } else { trace.steps[n - 1].residual_norm };
    let norm_gn = if n == 0 { 0.0 } else { trace.steps[n - 1].approximant_norm };
    let err = ErrorTerms::at(sched, n);
    let beta = beta_bound(model, err, norm_fn, norm_gn, lambda_grid)?;
    let (t, tp) = (sched.t.eval(n + 1), sched.t_prime.eval(n + 1));
    let core = (1.0 - err.delta) * norm_fn - err.delta_prime - beta - hull.eps;
    let lemma2_bound = t / hull.a * core - tp;
    let next = &trace.steps[n];
    let mut lemma3_bound = norm_fn * (1.0 + err.delta) + err.delta_prime;
    for mu in mu_grid.values() {
        let v = norm_fn * (1.0 + err.delta + err.delta_prime / norm_fn + 2.0 * model.rho(mu / norm_fn)? - mu * t / (hull.a * norm_fn) * core) + mu * tp;
        lemma3_bound = lemma3_bound.min(v);
    }
    Ok(LemmaDiagnostics {
        step: n,
        beta,
        lemma2_bound,
        lemma2_actual: next.selected_value.abs(),
        lemma3_bound,
        lemma3_actual: next.error,
    })
}

//! Finite-horizon diagnostics for the convergence conditions.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schedule::Schedules;
use crate::theory::modulus::{xi_solve, SmoothnessModel};

pub const NOTICE: &str = "finite-horizon diagnostic: cannot decide the infinite-limit conditions";

/// Cauchy-tail threshold for numeric summability verdicts.
pub const TAIL_TOL: f64 = 1e-8;

/// `theta` values standing in for "every `0 < theta <= 1/2`".
pub const THETA_GRID: [f64; 3] = [0.5, 0.25, 0.125];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubsequenceReport {
    pub indices: Vec<usize>,
    /// `sum_{j <= k} b_{n_j}`, one entry per accepted index.
    pub partial_sums: Vec<f64>,
}

impl SubsequenceReport {
    pub fn total(&self) -> f64 {
        self.partial_sums.last().copied().unwrap_or(0.0)
    }

    /// Accepted indices in `(from, to]` and the sum of `b` over them.
    pub fn window(&self, from: usize, to: usize) -> (usize, f64) {
        let mut count = 0;
        let mut sum = 0.0;
        let mut prev = 0.0;
        for (&i, &s) in self.indices.iter().zip(&self.partial_sums) {
            if i > from && i <= to {
                count += 1;
                sum += s - prev;
            }
            prev = s;
        }
        (count, sum)
    }
}

/// Greedy subsequence: scanning `n = from..=horizon`, accept `n` when
/// `a_n <= b_n / max(k, 1)` after `k` acceptances.
pub fn find_subsequence(a: impl Fn(usize) -> f64, b: impl Fn(usize) -> f64, from: usize, horizon: usize) -> SubsequenceReport {
    let mut indices = Vec::new();
    let mut partial_sums = Vec::new();
    let mut total = 0.0;
    for n in from..=horizon {
        let (an, bn) = (a(n), b(n));
        let eps = 1.0 / indices.len().max(1) as f64;
        if an <= eps * bn {
            total += bn;
            indices.push(n);
            partial_sums.push(total);
        }
    }
    SubsequenceReport { indices, partial_sums }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Partition {
    pub alpha: f64,
    pub lambda1: Vec<usize>,
    pub lambda2: Vec<usize>,
    /// `sum_{j in Lambda_2} t_j^p`
    pub lambda2_tp_sum: f64,
    /// `|Lambda_1 cap (H/2, H]| / (H/2)`
    pub lambda1_tail_density: f64,
}

/// Whether `n` belongs to `Lambda_1(alpha)`.
pub fn in_lambda1(sched: &Schedules, p: f64, alpha: f64, n: usize) -> bool {
    let t = sched.t.eval(n);
    let tp = t.powf(p);
    sched.delta.eval(n - 1) + sched.delta_prime.eval(n - 1) >= alpha * tp
        || sched.eta.eval(n - 1) + sched.eta_prime.eval(n - 1) >= alpha * tp
        || sched.t_prime.eval(n) >= alpha.powf(1.0 / p) * t
}

/// `Lambda_1, Lambda_2` over `2..=horizon`.
pub fn partition(sched: &Schedules, p: f64, alpha: f64, horizon: usize) -> Partition {
    let (mut lambda1, mut lambda2) = (Vec::new(), Vec::new());
    let mut sum = 0.0;
    for n in 2..=horizon {
        if in_lambda1(sched, p, alpha, n) {
            lambda1.push(n);
        } else {
            sum += sched.t.eval(n).powf(p);
            lambda2.push(n);
        }
    }
    let half = horizon / 2;
    let tail = lambda1.iter().filter(|&&n| n > half).count();
    let width = (horizon - half).max(1);
    Partition { alpha, lambda1, lambda2, lambda2_tp_sum: sum, lambda1_tail_density: tail as f64 / width as f64 }
}

/// One indicator per condition of a subsequence-type convergence theorem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionFlags {
    /// `eta_0 < inf` (from the generator family).
    pub eta0_finite: bool,
    /// `eta'_n -> 0` (from the generator family).
    pub eta_prime_vanishes: bool,
    /// The subsequence keeps accepting indices in `(H/2, H]`.
    pub subsequence_persists: bool,
    /// `sum b_{n_k}` still grows by more than the tail tolerance over `(H/2, H]`.
    pub weight_sum_growing: bool,
    /// Largest ratio of each small quantity to its target over the accepted
    /// indices in `(H/2, H]`, keyed as in the theorem.
    pub ratios: Vec<(String, f64)>,
    /// Every ratio is at most `2 / K` with `K` the number of accepted indices.
    pub ratios_vanishing: bool,
}

impl ConditionFlags {
    pub fn all_favorable(&self) -> bool {
        self.eta0_finite && self.eta_prime_vanishes && self.subsequence_persists && self.weight_sum_growing && self.ratios_vanishing
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub notice: String,
    pub horizon: usize,
    pub p: f64,
    pub alphas: Vec<f64>,
    pub partitions: Vec<Partition>,
    /// Partial sums `sum_{n <= H} t_n^p`.
    pub tp_sum: f64,
    /// `Some(true)` when `sum t_n^p` provably diverges, `Some(false)` when a
    /// closed-form tail bound shows it converges.
    pub tp_sum_diverges: Option<bool>,
    pub subsequence: SubsequenceReport,
    pub flags: ConditionFlags,
}

fn flags_for(sched: &Schedules, sub: &SubsequenceReport, horizon: usize, target: &dyn Fn(usize) -> f64) -> ConditionFlags {
    let half = horizon / 2;
    let (count, weight) = sub.window(half, horizon);
    let k = sub.indices.len().max(1) as f64;
    let quantities: [(&str, Box<dyn Fn(usize) -> f64 + '_>); 5] = [
        ("delta", Box::new(|n| sched.delta.eval(n))),
        ("delta_prime", Box::new(|n| sched.delta_prime.eval(n))),
        ("eta", Box::new(|n| sched.eta.eval(n))),
        ("eta_prime", Box::new(|n| sched.eta_prime.eval(n))),
        ("t_prime_over_t", Box::new(|n| {
            let t = sched.t.eval(n + 1);
            if t > 0.0 { sched.t_prime.eval(n + 1) / t * target(n) } else { f64::INFINITY }
        })),
    ];
    let mut ratios = Vec::new();
    for (name, q) in quantities.iter() {
        let mut r: f64 = 0.0;
        for &n in sub.indices.iter().filter(|&&n| n > half) {
            let b = target(n);
            let v = q(n);
            r = r.max(if v == 0.0 { 0.0 } else if b > 0.0 { v / b } else { f64::INFINITY });
        }
        ratios.push((name.to_string(), r));
    }
    let ratios_vanishing = count > 0 && ratios.iter().all(|(_, r)| *r <= 2.0 / k);
    ConditionFlags {
        eta0_finite: sched.eta0().is_finite(),
        eta_prime_vanishes: sched.eta_prime.tends_to_zero(),
        subsequence_persists: count > 0,
        weight_sum_growing: weight > TAIL_TOL,
        ratios,
        ratios_vanishing,
    }
}

fn check_common(horizon: usize, alphas: &[f64]) -> Result<()> {
    if horizon < 2 {
        return Err(Error::InvalidParameter(format!("horizon {horizon} must be at least 2")));
    }
    if let Some(a) = alphas.iter().find(|a| !(**a > 0.0) || !a.is_finite()) {
        return Err(Error::InvalidParameter(format!("alpha = {a} must be positive")));
    }
    Ok(())
}

/// Power-type conditions with exponent `p` (`b_n = t_{n+1}^p`), the Lambda partition
/// for each `alpha`, and a greedy candidate subsequence.
pub fn check_conditions(sched: &Schedules, p: f64, horizon: usize, alphas: &[f64]) -> Result<ConditionReport> {
    check_common(horizon, alphas)?;
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::ExponentOutOfRange(p));
    }
    sched.validate()?;
    let target = |n: usize| sched.t.eval(n + 1).powf(p);
    let small = |n: usize| {
        let errs = sched.delta.eval(n) + sched.delta_prime.eval(n) + sched.eta.eval(n) + sched.eta_prime.eval(n);
        let t = sched.t.eval(n + 1);
        let weak = if t > 0.0 { sched.t_prime.eval(n + 1) / t * target(n) } else if sched.t_prime.eval(n + 1) > 0.0 { f64::INFINITY } else { 0.0 };
        errs.max(weak)
    };
    let subsequence = find_subsequence(small, target, 1, horizon - 1);
    let flags = flags_for(sched, &subsequence, horizon - 1, &target);
    let tp_sum = (1..=horizon).map(|n| sched.t.eval(n).powf(p)).sum();
    let tp_sum_diverges = match sched.t.power_tail_bound(p, horizon) {
        None => Some(true),
        Some(b) if b <= TAIL_TOL => Some(false),
        Some(_) => None,
    };
    Ok(ConditionReport {
        notice: NOTICE.to_string(),
        horizon,
        p,
        alphas: alphas.to_vec(),
        partitions: alphas.iter().map(|&a| partition(sched, p, a, horizon)).collect(),
        tp_sum,
        tp_sum_diverges,
        subsequence,
        flags,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XiConditionReport {
    pub notice: String,
    pub horizon: usize,
    pub theta: f64,
    /// `sum_{n <= H} t_n xi_n`
    pub t_xi_sum: f64,
    pub subsequence: SubsequenceReport,
    pub flags: ConditionFlags,
}

/// The `t xi` conditions (`b_n = t_{n+1} xi_{n+1}`) for each `theta` in [`THETA_GRID`].
pub fn check_conditions_xi(sched: &Schedules, model: &SmoothnessModel, horizon: usize) -> Result<Vec<XiConditionReport>> {
    check_common(horizon, &[])?;
    sched.validate()?;
    let mut out = Vec::new();
    for theta in THETA_GRID {
        let mut txi = vec![0.0; horizon + 2];
        for (n, v) in txi.iter_mut().enumerate().skip(1) {
            let t = sched.t.eval(n);
            *v = if t > 0.0 { t * xi_solve(model, theta, t)? } else { 0.0 };
        }
        let target = |n: usize| txi[n + 1];
        let small = |n: usize| {
            let errs = sched.delta.eval(n) + sched.delta_prime.eval(n) + sched.eta.eval(n) + sched.eta_prime.eval(n);
            let t = sched.t.eval(n + 1);
            let weak = if t > 0.0 { sched.t_prime.eval(n + 1) / t * target(n) } else if sched.t_prime.eval(n + 1) > 0.0 { f64::INFINITY } else { 0.0 };
            errs.max(weak)
        };
        let subsequence = find_subsequence(small, target, 1, horizon - 1);
        let flags = flags_for(sched, &subsequence, horizon - 1, &target);
        out.push(XiConditionReport {
            notice: NOTICE.to_string(),
            horizon,
            theta,
            t_xi_sum: txi[1..=horizon].iter().sum(),
            subsequence,
            flags,
        });
    }
    Ok(out)
}

/// Summability of one sequence: certified by the closed-form tail bound of its
/// generator, with the numeric Cauchy tail reported alongside.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summability {
    pub name: String,
    pub partial_sum: f64,
    /// `sum_{H/2 < n <= H} s_n`
    pub late_increment: f64,
    /// Bound on `sum_{n > H} s_n`, absent when the series diverges.
    pub tail_bound: Option<f64>,
    /// `late_increment <= TAIL_TOL`
    pub tail_within_tol: bool,
    pub summable: bool,
}

fn summability(name: &str, s: &crate::schedule::SeqSpec, from: usize, horizon: usize) -> Summability {
    let partial_sum = (from..=horizon).map(|n| s.eval(n)).sum();
    let late_increment = (horizon / 2 + 1..=horizon).map(|n| s.eval(n)).sum();
    let tail_bound = s.power_tail_bound(1.0, horizon);
    Summability {
        name: name.to_string(),
        partial_sum,
        late_increment,
        tail_bound,
        tail_within_tol: late_increment <= TAIL_TOL,
        summable: tail_bound.is_some(),
    }
}

/// The l_1 hypotheses on the five inaccuracy sequences.
pub fn l1_inaccuracies(sched: &Schedules, horizon: usize) -> Vec<Summability> {
    vec![
        summability("t_prime", &sched.t_prime, 1, horizon),
        summability("delta", &sched.delta, 0, horizon),
        summability("delta_prime", &sched.delta_prime, 0, horizon),
        summability("eta", &sched.eta, 1, horizon),
        summability("eta_prime", &sched.eta_prime, 1, horizon),
    ]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorollaryReport {
    pub notice: String,
    pub name: String,
    pub hypotheses_hold: bool,
    pub converges: Option<bool>,
    pub detail: String,
}

/// `liminf t_n > 0`, bounded errors and `eta'_n -> 0`: convergence iff
/// `liminf (t'_{n+1} + delta_n + delta'_n + eta_n) = 0`.
pub fn corollary_liminf(sched: &Schedules, horizon: usize) -> Result<CorollaryReport> {
    check_common(horizon, &[])?;
    let half = horizon / 2;
    let t_floor = (half.max(1)..=horizon).map(|n| sched.t.eval(n)).fold(f64::INFINITY, f64::min);
    let hypotheses_hold = t_floor > 0.0 && sched.eta0().is_finite() && sched.eta0_prime().is_finite() && sched.eta_prime.tends_to_zero();
    let late_min = (half..horizon)
        .map(|n| sched.t_prime.eval(n + 1) + sched.delta.eval(n) + sched.delta_prime.eval(n) + sched.eta.eval(n))
        .fold(f64::INFINITY, f64::min);
    let converges = hypotheses_hold.then_some(late_min <= TAIL_TOL);
    Ok(CorollaryReport {
        notice: NOTICE.to_string(),
        name: "liminf-t".into(),
        hypotheses_hold,
        converges,
        detail: format!("min over (H/2, H] of t'_(n+1) + delta_n + delta'_n + eta_n = {late_min:.6e}; min t_n there = {t_floor:.6e}"),
    })
}

/// l_1 inaccuracies in a power-type space: convergence iff `sum t_n^p = inf`.
pub fn corollary_l1_power(sched: &Schedules, p: f64, horizon: usize) -> Result<CorollaryReport> {
    check_common(horizon, &[])?;
    let parts = l1_inaccuracies(sched, horizon);
    let hypotheses_hold = parts.iter().all(|s| s.summable) && sched.eta0().is_finite() && sched.eta0_prime().is_finite();
    let diverges = sched.t.power_tail_bound(p, horizon).is_none();
    Ok(CorollaryReport {
        notice: NOTICE.to_string(),
        name: "l1-power-type".into(),
        hypotheses_hold,
        converges: hypotheses_hold.then_some(diverges),
        detail: format!(
            "non-summable: [{}]; sum t_n^p diverges: {diverges}",
            parts.iter().filter(|s| !s.summable).map(|s| s.name.as_str()).collect::<Vec<_>>().join(", ")
        ),
    })
}

/// l_1 inaccuracies in a uniformly smooth space: convergence if `sum t_n xi_n = inf`
/// for every `theta` (checked on [`THETA_GRID`] by the late partial-sum increment).
pub fn corollary_l1_smooth(sched: &Schedules, model: &SmoothnessModel, horizon: usize) -> Result<CorollaryReport> {
    check_common(horizon, &[])?;
    let parts = l1_inaccuracies(sched, horizon);
    let hypotheses_hold = parts.iter().all(|s| s.summable) && sched.eta0().is_finite() && sched.eta0_prime().is_finite();
    let mut growing = true;
    let mut late = Vec::new();
    for theta in THETA_GRID {
        let mut inc = 0.0;
        for n in horizon / 2 + 1..=horizon {
            let t = sched.t.eval(n);
            if t > 0.0 {
                inc += t * xi_solve(model, theta, t)?;
            }
        }
        growing &= inc > TAIL_TOL;
        late.push(format!("{theta}: {inc:.6e}"));
    }
    Ok(CorollaryReport {
        notice: NOTICE.to_string(),
        name: "l1-smooth".into(),
        hypotheses_hold,
        // sufficient condition only: a plateau does not imply divergence
        converges: (hypotheses_hold && growing).then_some(true),
        detail: format!("late increments of sum t_n xi_n by theta: {}", late.join("; ")),
    })
}

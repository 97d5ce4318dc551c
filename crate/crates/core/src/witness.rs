//! Divergence counterexamples packaged for the engine.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::dictionary::{canonical_dictionary, g_dictionary, weak_select, Dictionary, Selection};
use crate::element::{Element, Functional};
use crate::engine::{run_gawcga, EngineOptions, ExactRealization, Realization, StepContext, Trace};
use crate::error::{Error, Result};
use crate::ext_float::ExtF64;
use crate::projection::{perturbed_approximant, Approximation, SolverOptions};
use crate::scalar::{rel_diff, Scalar};
use crate::schedule::{SeqSpec, Schedules, Subsequence};
use crate::space::{dual_exponent, PSpec, SmoothSpaceX, Space};
use crate::theory::conditions::{partition, TAIL_TOL};

/// Absolute slack on residual floors.
pub const FLOOR_TOL: f64 = 1e-9;
/// Relative tolerance on the coefficient recursion of the smooth-space run.
pub const RECURSION_TOL: f64 = 1e-6;
/// Relative tolerance on `|F(g_0)| = |F(g_m)|`.
pub const TIE_TOL: f64 = 1e-8;
/// Relative slack when validating block tails of the unbounded-eta sequence.
const BLOCK_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum WitnessKind {
    UnboundedEta,
    FiniteLambda1,
    InfiniteLambda1,
    SmoothSpace,
}

impl WitnessKind {
    pub fn name(self) -> &'static str {
        match self {
            WitnessKind::UnboundedEta => "unbounded-eta",
            WitnessKind::FiniteLambda1 => "finite-lambda1",
            WitnessKind::InfiniteLambda1 => "infinite-lambda1",
            WitnessKind::SmoothSpace => "smooth-space",
        }
    }
}

/// Which slack makes the spike of the unbounded-eta witness admissible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SlackBranch {
    /// `eta'_{n_k} = alpha`.
    #[default]
    Absolute,
    /// `eta_{n_k} = alpha k`.
    Relative,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub holds: bool,
    /// Smallest signed margin observed (non-negative when the check holds).
    pub worst: f64,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PredicateReport {
    pub holds: bool,
    pub checks: Vec<Check>,
}

impl PredicateReport {
    fn new(checks: Vec<Check>) -> Self {
        PredicateReport { holds: checks.iter().all(|c| c.holds), checks }
    }
}

/// The expected outcome of a witness run.
#[derive(Debug, Clone, PartialEq)]
pub enum Expected {
    /// `||f_n|| >= floor` at the listed steps.
    FloorAt { steps: Vec<usize>, floor: f64 },
    /// `||f_n|| >= floor` at every step; `avoid` is never selected.
    FloorAll { floor: f64, avoid: Option<usize> },
    /// The four smooth-space claims with `rho` the norm-equivalence constant.
    SmoothSpace { rho: f64 },
}

pub struct Witness<T: Scalar> {
    pub kind: WitnessKind,
    pub space: Space<T>,
    pub dict: Dictionary<T>,
    pub f: Element<T>,
    pub sched: Schedules,
    pub steps: usize,
    pub expected: Expected,
    pub note: String,
    realization: Box<dyn Realization<T> + Send>,
}

/// A finished witness run.
pub struct WitnessRun<T> {
    pub trace: Trace<T>,
    pub report: PredicateReport,
}

impl<T: Scalar> Witness<T> {
    fn engine_options(&self, solver: SolverOptions) -> EngineOptions {
        let keep = matches!(self.expected, Expected::SmoothSpace { .. });
        EngineOptions { max_steps: self.steps, stop_tol: 0.0, solver, keep_residuals: keep, keep_functionals: keep }
    }

    /// Runs the packaged realization and evaluates the expected predicate.
    pub fn run(&mut self, solver: SolverOptions) -> Result<WitnessRun<T>> {
        let opts = self.engine_options(solver);
        let trace = run_gawcga(&self.space, &self.dict, &self.f, &self.sched, self.realization.as_mut(), &opts)?;
        let report = self.check(&trace)?;
        Ok(WitnessRun { trace, report })
    }

    /// Same element with every slack sequence zeroed and exact choices. The
    /// smooth-space witness switches to the canonical basis instead.
    pub fn contrast(&self, solver: SolverOptions) -> Result<Trace<T>> {
        let opts = EngineOptions { keep_residuals: false, keep_functionals: false, ..self.engine_options(solver) };
        let sched = Schedules::wcga(SeqSpec::constant(1.0));
        match &self.space {
            Space::X(x) => {
                let dict = canonical_dictionary(x, 1, x.horizon())?;
                run_gawcga(&self.space, &dict, &self.f, &sched, &mut ExactRealization, &opts)
            }
            Space::Lq(_) => run_gawcga(&self.space, &self.dict, &self.f, &sched, &mut ExactRealization, &opts),
        }
    }

    pub fn check(&self, trace: &Trace<T>) -> Result<PredicateReport> {
        let norms = trace.residual_norms();
        let mut checks = Vec::new();
        let audit = trace.min_margin();
        checks.push(Check {
            name: "audit".into(),
            holds: audit >= -crate::engine::AUDIT_TOL,
            worst: audit + crate::engine::AUDIT_TOL,
            detail: format!("smallest constraint margin {audit:.3e} over {} steps", trace.len()),
        });
        match &self.expected {
            Expected::FloorAt { steps, floor } => {
                let mut worst = f64::INFINITY;
                let mut seen = 0;
                for &n in steps.iter().filter(|&&n| n < norms.len()) {
                    worst = worst.min(norms[n] - floor);
                    seen += 1;
                }
                checks.push(Check {
                    name: "floor-at-subsequence".into(),
                    holds: seen > 0 && worst >= -FLOOR_TOL,
                    worst,
                    detail: format!("min over {seen} recorded n_k of ||f_n|| - {floor}"),
                });
            }
            Expected::FloorAll { floor, avoid } => {
                let worst = norms[1..].iter().map(|v| v - floor).fold(f64::INFINITY, f64::min);
                checks.push(Check {
                    name: "floor-all-steps".into(),
                    holds: !trace.is_empty() && worst >= -FLOOR_TOL,
                    worst,
                    detail: format!("min over n of ||f_n|| - {floor}"),
                });
                if let Some(id) = avoid {
                    let hits = trace.steps.iter().filter(|s| s.atom_id == *id).count();
                    checks.push(Check {
                        name: format!("atom-{id}-never-selected"),
                        holds: hits == 0,
                        worst: -(hits as f64),
                        detail: format!("atom {id} selected {hits} times"),
                    });
                }
            }
            Expected::SmoothSpace { rho } => {
                let x = self.space.as_smooth().ok_or_else(|| Error::InvalidParameter("smooth-space check needs the space X".into()))?;
                checks.extend(smooth_space_checks(x, &self.dict, trace, *rho)?);
            }
        }
        Ok(PredicateReport::new(checks))
    }
}

fn smooth_space_checks<T: Scalar>(x: &SmoothSpaceX<T>, dict: &Dictionary<T>, trace: &Trace<T>, rho: f64) -> Result<Vec<Check>> {
    let mut out = Vec::new();
    let wrong: Vec<usize> = trace.steps.iter().filter(|s| s.atom_id != s.step).map(|s| s.step).collect();
    out.push(Check {
        name: "selects-g_m-at-step-m".into(),
        holds: wrong.is_empty() && !trace.is_empty(),
        worst: -(wrong.len() as f64),
        detail: if wrong.is_empty() { format!("phi_m = +-g_m/|g_m| for m = 1..{}", trace.len()) } else { format!("other atoms at steps {wrong:?}") },
    });

    // |c_k|^{p_k - 1} = |c_1|^{p_2 - 1} prod_{n=2}^{k-1} theta_n^{p_{n+1} - p_n} for every recorded residual
    let mut worst = T::zero();
    let mut count = 0;
    for s in &trace.steps {
        let Some(r) = &s.residual else { continue };
        let m = s.step + 1;
        if m < 3 || m > x.horizon() {
            continue;
        }
        let theta = x.theta_prefix(r, m)?;
        let c1 = r.get(1).abs().powf(x.p_excess(2));
        let mut prod = c1;
        for k in 3..=m {
            prod = prod * theta[k - 1].powf(x.p_excess(k) - x.p_excess(k - 1));
            let lhs = r.get(k).abs().powf(x.p_excess(k));
            worst = worst.max(rel_diff(lhs, prod, T::min_positive_value()));
            count += 1;
        }
    }
    let worst = worst.as_f64();
    out.push(Check {
        name: "c_k-recursion".into(),
        holds: count > 0 && worst <= RECURSION_TOL,
        worst: RECURSION_TOL - worst,
        detail: format!("max relative deviation {worst:.3e} over {count} coefficients"),
    });

    let floor = trace.residual_norms().into_iter().fold(f64::INFINITY, f64::min);
    out.push(Check {
        name: "norm-floor-rho".into(),
        holds: floor >= rho - FLOOR_TOL,
        worst: floor - rho,
        detail: format!("min ||f_n||_X = {floor:.12} against rho = {rho:.12}"),
    });

    let g0 = dict.atom(0).ok_or_else(|| Error::InvalidParameter("g_0 missing".into()))?;
    let mut worst_tie = T::zero();
    let mut gap = f64::INFINITY;
    for s in &trace.steps {
        let Some(fun) = &s.functional else { continue };
        let Some(gm) = dict.atom(s.step) else { continue };
        // f_1 is proportional to e_1 - e_2, which annihilates g_0: no tie at m = 2
        if s.step != 2 {
            let v0 = fun.apply(&g0.element).abs() * g0.raw_norm;
            let vm = fun.apply(&gm.element).abs() * gm.raw_norm;
            worst_tie = worst_tie.max(rel_diff(v0, vm, T::min_positive_value()));
        }
        gap = gap.min((fun.apply(&gm.element).abs() - fun.apply(&g0.element).abs()).as_f64());
    }
    let worst_tie = worst_tie.as_f64();
    out.push(Check {
        name: "g_0-tie-broken-by-norm".into(),
        holds: worst_tie <= TIE_TOL && gap > 0.0,
        worst: (TIE_TOL - worst_tie).min(gap),
        detail: format!("max relative |F(g_0)| vs |F(g_m)| deviation {worst_tie:.3e} for m != 2; min normalized advantage of g_m {gap:.3e}"),
    });
    Ok(out)
}

/// Greedy choices; the approximant is shifted by `magnitude e_1` at the listed steps.
struct SpikeRealization {
    spikes: BTreeSet<usize>,
    magnitude: f64,
}

impl Realization<f64> for SpikeRealization {
    fn approximant(&mut self, ctx: &StepContext<f64>, span: &[Element<f64>], exact: &Approximation<f64>) -> Result<(Element<f64>, Element<f64>)> {
        if !self.spikes.contains(&ctx.n) {
            return Ok((exact.g.clone(), exact.residual.clone()));
        }
        let e1 = Element::basis(1);
        perturbed_approximant(ctx.space, span, exact, ctx.params.eta, ctx.params.eta_prime, Some((&e1, self.magnitude)))
    }
}

/// Non-increasing `a_j`: `alpha` up to `n_1`, then `(1/k)(n_{k+1} - n_k)^{-1/q}` on
/// `(n_k, n_{k+1}]`, clipped to stay non-increasing. The last block repeats the last gap.
pub fn unbounded_eta_coefficients(q: f64, alpha: f64, n_k: &[usize], horizon: usize) -> Result<Vec<f64>> {
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    dual_exponent(q)?;
    if n_k.is_empty() || n_k[0] == 0 {
        return Err(Error::InvalidParameter("n_k must be a non-empty sequence of positive indices".into()));
    }
    for w in n_k.windows(2) {
        if w[1] <= w[0] {
            return Err(Error::InvalidParameter(format!("n_k must increase strictly: {} then {}", w[0], w[1])));
        }
    }
    for w in n_k.windows(3) {
        if w[2] - w[1] < w[1] - w[0] {
            return Err(Error::InvalidParameter(format!("gaps of n_k must not decrease: {} then {}", w[1] - w[0], w[2] - w[1])));
        }
    }
    if *n_k.last().unwrap() > horizon {
        return Err(Error::InvalidParameter(format!("n_k exceeds the horizon {horizon}")));
    }
    let mut a = vec![0.0; horizon + 1];
    let mut prev = alpha;
    for (j, slot) in a.iter_mut().enumerate().skip(1) {
        let v = if j <= n_k[0] {
            alpha
        } else {
            let k = n_k.iter().filter(|&&n| n < j).count();
            let gap = if k < n_k.len() { n_k[k] - n_k[k - 1] } else if k >= 2 { n_k[k - 1] - n_k[k - 2] } else { n_k[0] };
            (1.0 / k as f64) * (gap as f64).powf(-1.0 / q)
        };
        prev = prev.min(v);
        *slot = prev;
    }
    if a[1] < alpha {
        return Err(Error::ConstructionInvalid(format!("a_1 = {} < alpha = {alpha}", a[1])));
    }
    // tails on every block that fits in the horizon
    for (i, &n) in n_k.iter().enumerate() {
        let k = i + 1;
        let block_end = n_k.get(i + 1).copied();
        if block_end.is_none() {
            break;
        }
        let tail = a[n + 1..].iter().map(|v| v.powf(q)).sum::<f64>().powf(1.0 / q);
        if tail < (1.0 / k as f64) * (1.0 - BLOCK_TOL) {
            return Err(Error::ConstructionInvalid(format!(
                "tail after n_{k} = {n} is {tail:.6} < 1/{k}; clipping to alpha broke the block bound, enlarge the gaps"
            )));
        }
    }
    Ok(a)
}

/// `||f_{n_k}||_q >= alpha` along `n_k` with `eta` or `eta'` spikes at `n_k`.
pub fn witness_unbounded_eta(q: f64, alpha: f64, n_k: &[usize], horizon: usize, branch: SlackBranch) -> Result<Witness<f64>> {
    let a = unbounded_eta_coefficients(q, alpha, n_k, horizon)?;
    let space = Space::lq(q)?;
    let dict = canonical_dictionary(&space, 1, horizon)?;
    let f = Element::from_dense(1, &a[1..])?;
    // relative slack needs E_{n_k} >= 1/k, certified only when the next block is inside the horizon
    let spikes: Vec<usize> = match branch {
        SlackBranch::Absolute => n_k.to_vec(),
        SlackBranch::Relative => n_k[..n_k.len() - 1].to_vec(),
    };
    let mut sched = Schedules::wcga(SeqSpec::constant(1.0));
    match branch {
        SlackBranch::Absolute => {
            sched.eta_prime = SeqSpec::Indicator { on: alpha, off: 0.0, subsequence: Subsequence::Explicit { indices: spikes.clone() } };
        }
        SlackBranch::Relative => {
            let mut values = vec![0.0; horizon];
            for (i, &n) in spikes.iter().enumerate() {
                values[n - 1] = alpha * (i + 1) as f64;
            }
            sched.eta = SeqSpec::Explicit { values, start: 1, tail: 0.0 };
        }
    }
    Ok(Witness {
        kind: WitnessKind::UnboundedEta,
        space,
        dict,
        f,
        sched,
        steps: horizon,
        expected: Expected::FloorAt { steps: spikes.clone(), floor: alpha },
        note: "greedy run on f = sum a_j e_j with the approximant shifted by alpha e_1 at each n_k; \
               the atom after a spike is +-e_1 again, so later indices arrive one step late"
            .into(),
        realization: Box::new(SpikeRealization { spikes: spikes.into_iter().collect(), magnitude: alpha }),
    })
}

/// Norming functionals, `phi_n = e_n` whenever admissible.
struct PreferNext;

impl Realization<f64> for PreferNext {
    fn select(&mut self, ctx: &StepContext<f64>, functional: &Functional<f64>) -> Result<Selection<f64>> {
        weak_select(ctx.dict, functional, ctx.params.t, ctx.params.t_prime, Some((ctx.n, 1)))
    }
}

/// `f = e_0 + sum t_j^{p/q} e_j` for summable `t^p`: `||f_n||_q >= 1`.
pub fn witness_finite_lambda1(q: f64, t: SeqSpec, horizon: usize) -> Result<Witness<f64>> {
    let p = dual_exponent(q)?;
    t.validate("t", Some(1.0))?;
    if horizon < 1 {
        return Err(Error::InvalidParameter("horizon must be at least 1".into()));
    }
    match t.power_tail_bound(p, horizon) {
        None => return Err(Error::ConstructionInvalid(format!("sum t_n^{p} diverges"))),
        Some(b) if b > TAIL_TOL => {
            return Err(Error::ConstructionInvalid(format!("tail of sum t_n^{p} after {horizon} is bounded only by {b:.3e} > {TAIL_TOL:e}")))
        }
        Some(_) => {}
    }
    let space = Space::lq(q)?;
    let dict = canonical_dictionary(&space, 0, horizon)?;
    let mut f = Element::basis(0);
    for j in 1..=horizon {
        f.set(j, t.eval(j).powf(p / q))?;
    }
    let sched = Schedules::wcga(t);
    Ok(Witness {
        kind: WitnessKind::FiniteLambda1,
        space,
        dict,
        f,
        sched,
        steps: horizon,
        expected: Expected::FloorAll { floor: 1.0, avoid: Some(0) },
        note: "exact norming functionals with phi_n = e_n; F(e_n) = t_n sup F sits on the weak-selection boundary".into(),
        realization: Box::new(PreferNext),
    })
}

/// The adversarial realization of the infinite-Lambda_1 case.
struct Lambda1Realization {
    q: f64,
    p: f64,
    alpha: f64,
    beta: f64,
    /// `(j, a_j)` for `j` in `Lambda_1` with `a_j > 0`.
    a: Vec<(usize, f64)>,
    lambda2: BTreeSet<usize>,
    sched: Schedules,
}

impl Lambda1Realization {
    /// `beta (eta_n + eta'_n)^{1/q} e_1 + alpha^{1/q} beta (sum a_j e_j + sum_{j in Lambda_2, j > n} t_j^{p/q} e_j)`
    fn residual(&self, n: usize) -> Result<Element<f64>> {
        let s = self.alpha.powf(1.0 / self.q) * self.beta;
        let mut r = Element::zero();
        for &(j, aj) in &self.a {
            r.set(j, s * aj)?;
        }
        for &j in self.lambda2.range(n + 1..) {
            r.set(j, s * self.sched.t.eval(j).powf(self.p / self.q))?;
        }
        let e = self.sched.eta.eval(n) + self.sched.eta_prime.eval(n);
        r.set(1, self.beta * e.powf(1.0 / self.q))?;
        Ok(r)
    }
}

impl Realization<f64> for Lambda1Realization {
    fn functional(&mut self, ctx: &StepContext<f64>) -> Result<Functional<f64>> {
        let m = ctx.n - 1;
        if m == 0 {
            return ctx.space.norming_functional(ctx.residual);
        }
        let (q, p) = (self.q, self.p);
        let dd = self.sched.delta.eval(m) + self.sched.delta_prime.eval(m);
        let ee = self.sched.eta.eval(m) + self.sched.eta_prime.eval(m);
        let norm = ctx.residual_norm;
        let a_m = (self.beta.powf(-q) * (1.0 + dd) * norm.powf(q)).powf(-1.0 / p);
        let ap = self.alpha.powf(1.0 / p);
        let mut c = Element::zero();
        c.set(0, dd.powf(1.0 / p) * a_m)?;
        c.set(1, ee.powf(1.0 / p) * a_m)?;
        for &(j, aj) in &self.a {
            c.set(j, ap * aj.powf(q / p) * a_m)?;
        }
        for &j in self.lambda2.range(m + 1..) {
            c.set(j, ap * self.sched.t.eval(j) * a_m)?;
        }
        Ok(Functional::new(c, 1.0))
    }

    fn select(&mut self, ctx: &StepContext<f64>, functional: &Functional<f64>) -> Result<Selection<f64>> {
        let n = ctx.n;
        let id = if self.lambda2.contains(&n) {
            n
        } else if functional.coeff(0) >= functional.coeff(1) {
            0
        } else {
            1
        };
        ctx.dict.selection(id, 1, functional).ok_or_else(|| Error::ConstructionInvalid(format!("atom e_{id} missing from the dictionary")))
    }

    fn approximant(&mut self, ctx: &StepContext<f64>, _span: &[Element<f64>], _exact: &Approximation<f64>) -> Result<(Element<f64>, Element<f64>)> {
        let r = self.residual(ctx.n)?;
        Ok((ctx.f.sub(&r), r))
    }
}

/// Parameters derived while building the infinite-Lambda_1 witness.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lambda1Construction {
    pub alpha: f64,
    pub beta: f64,
    pub lambda1: Vec<usize>,
    pub lambda2: Vec<usize>,
    /// Indices of `Lambda_1` carrying `a_j = 1`.
    pub support: Vec<usize>,
}

/// The realization from the infinite-Lambda_1 case: `||f_n||_q >= beta` at every step.
pub fn witness_infinite_lambda1(q: f64, sched: Schedules, alpha: f64, horizon: usize) -> Result<(Witness<f64>, Lambda1Construction)> {
    let p = dual_exponent(q)?;
    sched.validate()?;
    if !(alpha > 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be positive")));
    }
    if horizon < 2 {
        return Err(Error::InvalidParameter("horizon must be at least 2".into()));
    }
    let (eta0, eta0p) = (sched.eta0(), sched.eta0_prime());
    if !eta0.is_finite() || !eta0p.is_finite() {
        return Err(Error::ConstructionInvalid(format!("eta_0 = {eta0}, eta'_0 = {eta0p} must be finite")));
    }
    let part = partition(&sched, p, alpha, horizon);
    let need = (1.0 / alpha).ceil() as usize;
    if part.lambda1.len() < need {
        return Err(Error::ConstructionInvalid(format!(
            "Lambda_1 has {} indices up to {horizon}, fewer than ceil(1/alpha) = {need}",
            part.lambda1.len()
        )));
    }
    let mut lambda2: BTreeSet<usize> = part.lambda2.iter().copied().collect();
    lambda2.insert(1);
    let late: f64 = lambda2.range(horizon / 2 + 1..).map(|&j| sched.t.eval(j).powf(p)).sum();
    if late > TAIL_TOL {
        return Err(Error::ConstructionInvalid(format!(
            "sum of t_j^p over Lambda_2 still grows by {late:.3e} on ({}, {horizon}]",
            horizon / 2
        )));
    }
    let support: Vec<usize> = part.lambda1[..need].to_vec();
    let a: Vec<(usize, f64)> = support.iter().map(|&j| (j, 1.0)).collect();
    let sum_aq = need as f64;
    let sum_tp: f64 = lambda2.iter().map(|&j| sched.t.eval(j).powf(p)).sum();
    let beta = (eta0 + eta0p + alpha * (sum_aq + sum_tp)).powf(-1.0 / q);
    let real = Lambda1Realization { q, p, alpha, beta, a, lambda2: lambda2.clone(), sched: sched.clone() };
    let s = alpha.powf(1.0 / q) * beta;
    let mut f = Element::zero();
    for &(j, aj) in &real.a {
        f.set(j, s * aj)?;
    }
    for &j in &lambda2 {
        f.set(j, s * sched.t.eval(j).powf(p / q))?;
    }
    let space = Space::lq(q)?;
    let dict = canonical_dictionary(&space, 0, horizon)?;
    let info = Lambda1Construction { alpha, beta, lambda1: part.lambda1.clone(), lambda2: lambda2.into_iter().collect(), support };
    Ok((
        Witness {
            kind: WitnessKind::InfiniteLambda1,
            space,
            dict,
            f,
            sched,
            steps: horizon,
            expected: Expected::FloorAll { floor: beta, avoid: None },
            note: "explicit functionals F_n, atoms e_{n+1} on Lambda_2 and e_0 or e_1 on Lambda_1, explicit remainders f_n".into(),
            realization: Box::new(real),
        },
        info,
    ))
}

/// `f = e_1` over `{+-g_k / ||g_k||}` in `X`, `k <= k_max`: the WCGA picks `g_m` at step `m`.
pub fn witness_smooth_space(spec: PSpec, k_max: usize) -> Result<Witness<ExtF64>> {
    if k_max < 1 {
        return Err(Error::InvalidParameter("K must be at least 1".into()));
    }
    let horizon = (k_max + 1).max(3);
    let x = SmoothSpaceX::<ExtF64>::new(spec, horizon)?;
    let rho = x.equivalence_constant();
    let dict = g_dictionary(&x, k_max)?;
    Ok(Witness {
        kind: WitnessKind::SmoothSpace,
        space: Space::X(x),
        dict,
        f: Element::basis(1),
        sched: Schedules::wcga(SeqSpec::constant(1.0)),
        steps: k_max,
        expected: Expected::SmoothSpace { rho },
        note: "exact WCGA with t = 1; residual norms stay above the equivalence constant rho".into(),
        realization: Box::new(ExactRealization),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::NormedSpace;

    #[test]
    fn unbounded_eta_profile() {
        let n_k: Vec<usize> = (1..=10).map(|k| 10 * k).collect();
        let a = unbounded_eta_coefficients(2.0, 0.5, &n_k, 100).unwrap();
        assert_eq!(a[1], 0.5);
        assert!(a[1..].windows(2).all(|w| w[1] <= w[0]));
        assert!((a[11] - 10f64.powf(-0.5)).abs() < 1e-15);
        assert!((a[25] - 0.5 * 10f64.powf(-0.5)).abs() < 1e-15);
        let tight: Vec<usize> = (1..=100).collect();
        assert!(matches!(unbounded_eta_coefficients(2.0, 0.5, &tight, 100), Err(Error::ConstructionInvalid(_))));
        assert!(unbounded_eta_coefficients(2.0, 0.5, &[10, 15, 18], 100).is_err());
    }

    #[test]
    fn finite_lambda1_rejects_divergent() {
        assert!(matches!(witness_finite_lambda1(2.0, SeqSpec::constant(1.0), 100), Err(Error::ConstructionInvalid(_))));
    }

    #[test]
    fn finite_lambda1_first_functional() {
        let mut w = witness_finite_lambda1(2.0, SeqSpec::power(1.0, 2.0), 400).unwrap();
        let f = w.f.clone();
        let fx = w.space.norming_functional(&f).unwrap();
        let norm = w.space.norm(&f).unwrap();
        for j in [0usize, 1, 2, 7] {
            let xj = f.get(j);
            assert!((fx.coeff(j) - xj / norm).abs() < 1e-15);
        }
        let run = w.run(SolverOptions::default()).unwrap();
        assert!(run.report.holds, "{:?}", run.report);
    }

    #[test]
    fn infinite_lambda1_needs_slack() {
        assert!(matches!(witness_infinite_lambda1(2.0, Schedules::default(), 0.1, 50), Err(Error::ConstructionInvalid(_))));
    }

    #[test]
    fn smooth_space_small() {
        let mut w = witness_smooth_space(PSpec::default(), 6).unwrap();
        let run = w.run(SolverOptions::default()).unwrap();
        assert!(run.report.holds, "{:#?}", run.report);
        let c = w.contrast(SolverOptions::default()).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(c.final_norm, 0.0);
    }
}

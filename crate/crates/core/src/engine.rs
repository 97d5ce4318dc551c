//! The gAWCGA loop with per-step constraint auditing.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::dictionary::{weak_select, Dictionary, Selection};
use crate::element::{Element, Functional};
use crate::error::{Constraint, Error, Result};
use crate::projection::{best_approximation_from, Approximation, SolverOptions};
use crate::scalar::Scalar;
use crate::schedule::{Schedules, StepParams};
use crate::space::NormedSpace;

/// Margins below `-AUDIT_TOL` abort a run.
pub const AUDIT_TOL: f64 = 1e-9;

/// Everything a realization may look at when making the choices of step `n`.
pub struct StepContext<'a, T> {
    pub n: usize,
    pub space: &'a dyn NormedSpace<T>,
    pub dict: &'a Dictionary<T>,
    pub f: &'a Element<T>,
    /// `f_{n-1}`
    pub residual: &'a Element<T>,
    /// `||f_{n-1}||`
    pub residual_norm: T,
    /// `phi_1, ..., phi_{n-1}`
    pub selected: &'a [Selection<T>],
    pub params: StepParams,
}

/// The existential choices of the algorithm. Defaults give the exact WCGA choices.
pub trait Realization<T: Scalar> {
    /// `F_{n-1}` with `||F|| <= 1` and `F(f_{n-1}) >= (1 - delta) ||f_{n-1}|| - delta'`.
    fn functional(&mut self, ctx: &StepContext<T>) -> Result<Functional<T>> {
        ctx.space.norming_functional(ctx.residual)
    }

    /// `phi_n` with `F(phi_n) >= t sup F - t'`.
    fn select(&mut self, ctx: &StepContext<T>, functional: &Functional<T>) -> Result<Selection<T>> {
        weak_select(ctx.dict, functional, T::of(ctx.params.t), T::of(ctx.params.t_prime), None)
    }

    /// `(G_n, f - G_n)` with `||f - G_n|| <= (1 + eta) E_n + eta'`.
    fn approximant(&mut self, _ctx: &StepContext<T>, _span: &[Element<T>], exact: &Approximation<T>) -> Result<(Element<T>, Element<T>)> {
        Ok((exact.g.clone(), exact.residual.clone()))
    }
}

/// Exact norming functionals, greedy atoms, exact approximants.
#[derive(Debug, Clone, Copy, Default)]
pub struct ExactRealization;

impl<T: Scalar> Realization<T> for ExactRealization {}

#[derive(Debug, Clone, Copy)]
pub struct EngineOptions {
    pub max_steps: usize,
    /// Stop once `||f_n|| <= stop_tol`.
    pub stop_tol: f64,
    pub solver: SolverOptions,
    pub keep_residuals: bool,
    pub keep_functionals: bool,
}

impl Default for EngineOptions {
    fn default() -> Self {
        EngineOptions { max_steps: 100, stop_tol: 0.0, solver: SolverOptions::default(), keep_residuals: false, keep_functionals: false }
    }
}

#[derive(Debug, Clone)]
pub struct StepRecord<T> {
    pub step: usize,
    pub atom_id: usize,
    pub atom_sign: i8,
    /// `||f_n||`
    pub residual_norm: f64,
    /// `E_n`
    pub error: f64,
    pub margin_functional: f64,
    pub margin_select: f64,
    pub margin_approx: f64,
    /// `F_{n-1}(phi_n)`
    pub selected_value: f64,
    /// `sup_g F_{n-1}(g)`
    pub sup_value: f64,
    /// `||F_{n-1}||_*`
    pub functional_norm: f64,
    /// `||G_n||`
    pub approximant_norm: f64,
    pub params: StepParams,
    pub seconds: f64,
    /// `f_n`, when requested.
    pub residual: Option<Element<T>>,
    /// `F_{n-1}`, when requested.
    pub functional: Option<Functional<T>>,
}

impl<T> StepRecord<T> {
    pub fn margins(&self) -> [(Constraint, f64); 3] {
        audit_step(self)
    }
}

/// The three signed constraint margins of a recorded step.
pub fn audit_step<T>(record: &StepRecord<T>) -> [(Constraint, f64); 3] {
    [
        (Constraint::Functional, record.margin_functional),
        (Constraint::Select, record.margin_select),
        (Constraint::Approx, record.margin_approx),
    ]
}

/// `min(1 - ||F||_*, F(x) - ((1 - delta) ||x|| - delta'))`.
pub fn functional_margin<T: Scalar>(space: &dyn NormedSpace<T>, functional: &Functional<T>, x: &Element<T>, x_norm: T, delta: f64, delta_prime: f64) -> Result<(f64, f64)> {
    let dn = space.dual_norm(functional)?;
    let lower = (T::one() - T::of(delta)) * x_norm - T::of(delta_prime);
    let m = (T::one() - dn).min(functional.apply(x) - lower);
    Ok((m.as_f64(), dn.as_f64()))
}

/// `F(phi) - (t sup - t')`.
pub fn select_margin<T: Scalar>(value: T, sup: T, t: f64, t_prime: f64) -> f64 {
    (value - (T::of(t) * sup - T::of(t_prime))).as_f64()
}

/// `(1 + eta) E + eta' - ||f - G||`.
pub fn approx_margin<T: Scalar>(error: T, residual_norm: T, eta: f64, eta_prime: f64) -> f64 {
    ((T::one() + T::of(eta)) * error + T::of(eta_prime) - residual_norm).as_f64()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    /// `||f_n|| <= stop_tol`.
    Tolerance,
    /// `f_n = 0`.
    ZeroResidual,
    MaxSteps,
}

#[derive(Debug, Clone)]
pub struct Trace<T> {
    pub initial_norm: f64,
    pub steps: Vec<StepRecord<T>>,
    pub stop: StopReason,
    pub final_residual: Element<T>,
    pub final_norm: f64,
    pub final_approximant: Element<T>,
}

impl<T> Trace<T> {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// `||f_n||` for `n = 0..=len`.
    pub fn residual_norms(&self) -> Vec<f64> {
        std::iter::once(self.initial_norm).chain(self.steps.iter().map(|s| s.residual_norm)).collect()
    }

    pub fn min_margin(&self) -> f64 {
        self.steps.iter().flat_map(|s| [s.margin_functional, s.margin_select, s.margin_approx]).fold(f64::INFINITY, f64::min)
    }

    pub fn atom_ids(&self) -> Vec<usize> {
        self.steps.iter().map(|s| s.atom_id).collect()
    }
}

fn check_margin(step: usize, which: Constraint, margin: f64) -> Result<()> {
    if margin.is_nan() || margin < -AUDIT_TOL {
        return Err(Error::ConstraintViolation { step, which, margin });
    }
    Ok(())
}

/// Runs the gAWCGA on `f`, auditing every choice of `realization`.
pub fn run_gawcga<T: Scalar>(
    space: &dyn NormedSpace<T>,
    dict: &Dictionary<T>,
    f: &Element<T>,
    sched: &Schedules,
    realization: &mut dyn Realization<T>,
    opts: &EngineOptions,
) -> Result<Trace<T>> {
    if opts.max_steps == 0 {
        return Err(Error::InvalidParameter("max_steps must be at least 1".into()));
    }
    if !(opts.stop_tol >= 0.0) {
        return Err(Error::InvalidParameter(format!("stop_tol must be non-negative, got {}", opts.stop_tol)));
    }
    if dict.is_empty() {
        return Err(Error::EmptyDictionary);
    }
    sched.validate()?;
    space.check_support(f)?;
    let f_norm = space.norm(f)?;
    if f.is_zero() || f_norm == T::zero() {
        return Err(Error::ZeroElement);
    }

    let mut residual = f.clone();
    let mut residual_norm = f_norm;
    let mut approximant = Element::zero();
    let mut selected: Vec<Selection<T>> = Vec::new();
    let mut span: Vec<Element<T>> = Vec::new();
    let mut warm: Option<Element<T>> = None;
    let mut steps = Vec::new();
    let mut stop = StopReason::MaxSteps;

    for n in 1..=opts.max_steps {
        if residual.is_zero() || residual_norm == T::zero() {
            stop = StopReason::ZeroResidual;
            break;
        }
        if residual_norm.as_f64() <= opts.stop_tol {
            stop = StopReason::Tolerance;
            break;
        }
        let clock = Instant::now();
        let params = sched.step(n);
        let ctx = StepContext { n, space, dict, f, residual: &residual, residual_norm, selected: &selected, params };

        let functional = realization.functional(&ctx)?;
        let (m_func, func_norm) = functional_margin(space, &functional, &residual, residual_norm, params.delta, params.delta_prime)?;
        check_margin(n, Constraint::Functional, m_func)?;

        let chosen = realization.select(&ctx, &functional)?;
        let (sup, _) = dict.sup_functional(&functional);
        let value = functional.apply(&chosen.element);
        let m_sel = select_margin(value, sup, params.t, params.t_prime);
        check_margin(n, Constraint::Select, m_sel)?;

        span.push(chosen.element.clone());
        let exact: Approximation<T> = best_approximation_from(space, f, &span, &opts.solver, warm.as_ref())?;
        let (g, r) = realization.approximant(&ctx, &span, &exact)?;
        let r_norm = space.norm(&r)?;
        let m_app = approx_margin(exact.error, r_norm, params.eta, params.eta_prime);
        check_margin(n, Constraint::Approx, m_app)?;
        let g_norm = space.norm(&g)?;

        steps.push(StepRecord {
            step: n,
            atom_id: chosen.id,
            atom_sign: chosen.sign,
            residual_norm: r_norm.as_f64(),
            error: exact.error.as_f64(),
            margin_functional: m_func,
            margin_select: m_sel,
            margin_approx: m_app,
            selected_value: value.as_f64(),
            sup_value: sup.as_f64(),
            functional_norm: func_norm,
            approximant_norm: g_norm.as_f64(),
            params,
            seconds: clock.elapsed().as_secs_f64(),
            residual: opts.keep_residuals.then(|| r.clone()),
            functional: opts.keep_functionals.then(|| functional.clone()),
        });
        selected.push(chosen);
        warm = Some(exact.g);
        residual = r;
        residual_norm = r_norm;
        approximant = g;
    }
    if stop == StopReason::MaxSteps {
        if residual.is_zero() || residual_norm == T::zero() {
            stop = StopReason::ZeroResidual;
        } else if residual_norm.as_f64() <= opts.stop_tol {
            stop = StopReason::Tolerance;
        }
    }
    Ok(Trace {
        initial_norm: f_norm.as_f64(),
        steps,
        stop,
        final_norm: residual_norm.as_f64(),
        final_residual: residual,
        final_approximant: approximant,
    })
}

/// The WCGA: weakness `t`, all other sequences zero, exact choices.
pub fn run_wcga<T: Scalar>(
    space: &dyn NormedSpace<T>,
    dict: &Dictionary<T>,
    f: &Element<T>,
    t: crate::schedule::SeqSpec,
    opts: &EngineOptions,
) -> Result<Trace<T>> {
    run_gawcga(space, dict, f, &Schedules::wcga(t), &mut ExactRealization, opts)
}

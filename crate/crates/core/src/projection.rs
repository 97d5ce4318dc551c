//! Best approximation of `f` from the span of finitely many atoms.

use std::collections::BTreeMap;

use crate::element::Element;
use crate::error::{Error, Result};
use crate::linalg::{dot, norm2, solve_dense, Qr};
use crate::scalar::Scalar;
use crate::space::NormedSpace;

/// Tolerance used when re-verifying `||f - G|| <= (1 + eta) E + eta'`.
pub const APPROX_TOL: f64 = 1e-9;

const ARMIJO: f64 = 1e-4;
const MIN_STEP: f64 = 1e-16;
const RANK_TOL: f64 = 1e-10;
const IN_SPAN_TOL: f64 = 1e-12;
/// Relative decrease of `E` that counts as progress for the descent.
const STALL_DECREASE: f64 = 1e-14;
/// Iterations without progress before the descent returns its best point.
const STALL_LIMIT: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverPath {
    /// No atoms: `G = 0`.
    Empty,
    /// Atoms are coordinate vectors of an absolute norm: copy coordinates.
    Coordinate,
    /// Euclidean projection.
    Gram,
    /// `f` lies in the span.
    InSpan,
    /// The span is a hyperplane of the coordinate subspace: closed form through the dual map.
    Codim1,
    /// Quasi-Newton descent on the coefficients.
    Descent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PathChoice {
    #[default]
    Auto,
    /// Skip every closed form.
    ForceDescent,
}

#[derive(Debug, Clone, Copy)]
pub struct SolverOptions {
    /// Target for `max_j |F_{f-G}(phi_j)|`.
    pub cert_tol: f64,
    pub max_iter: usize,
    /// `||f - G||` below this counts as zero.
    pub zero_tol: f64,
    pub path: PathChoice,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { cert_tol: 1e-9, max_iter: 100_000, zero_tol: 1e-13, path: PathChoice::Auto }
    }
}

/// Result of a best-approximation solve.
#[derive(Debug, Clone)]
pub struct Approximation<T> {
    pub g: Element<T>,
    /// `f - g`, kept separately because it may be far below the round-off of `g`.
    pub residual: Element<T>,
    /// `E = ||f - g||`.
    pub error: T,
    /// Coefficients of `g` on the span atoms, in order.
    pub coeffs: Vec<T>,
    /// `max_j |F_{f-g}(phi_j)|` over the span atoms (zero when `f - g = 0`).
    pub certificate: T,
    pub path: SolverPath,
    pub iterations: usize,
}

/// Coordinates touched by `f` or any atom.
struct Frame<T> {
    index: Vec<usize>,
    cols: Vec<Vec<T>>,
    rhs: Vec<T>,
}

impl<T: Scalar> Frame<T> {
    fn new(f: &Element<T>, span: &[Element<T>]) -> Self {
        let mut pos = BTreeMap::new();
        for j in f.support().chain(span.iter().flat_map(|a| a.support())) {
            pos.insert(j, 0);
        }
        let index: Vec<usize> = pos.keys().copied().collect();
        for (i, j) in index.iter().enumerate() {
            pos.insert(*j, i);
        }
        let dense = |x: &Element<T>| {
            let mut v = vec![T::zero(); index.len()];
            for (j, c) in x.iter() {
                v[pos[&j]] = c;
            }
            v
        };
        Frame { cols: span.iter().map(dense).collect(), rhs: dense(f), index }
    }

    fn element(&self, v: &[T]) -> Element<T> {
        let mut x = Element::zero();
        for (&j, &c) in self.index.iter().zip(v) {
            if c.is_finite() {
                x.set_unchecked(j, c);
            }
        }
        x
    }

    fn combination(&self, kept: &[usize], c: &[T]) -> Vec<T> {
        let mut v = vec![T::zero(); self.index.len()];
        for (&k, &ck) in kept.iter().zip(c) {
            for (vi, &a) in v.iter_mut().zip(&self.cols[k]) {
                *vi += ck * a;
            }
        }
        v
    }
}

fn certificate<T: Scalar, S: NormedSpace<T> + ?Sized>(space: &S, residual: &Element<T>, span: &[Element<T>]) -> Result<T> {
    if residual.is_zero() {
        return Ok(T::zero());
    }
    let fr = space.norming_functional(residual)?;
    Ok(span.iter().fold(T::zero(), |m, a| m.max(fr.apply(a).abs())))
}

fn spread<T: Scalar>(n: usize, kept: &[usize], c: &[T]) -> Vec<T> {
    let mut out = vec![T::zero(); n];
    for (&k, &ck) in kept.iter().zip(c) {
        out[k] = ck;
    }
    out
}

/// `E = inf_{G in span} ||f - G||` together with a minimizer.
pub fn best_approximation<T: Scalar, S: NormedSpace<T> + ?Sized>(
    space: &S,
    f: &Element<T>,
    span: &[Element<T>],
    opts: &SolverOptions,
) -> Result<Approximation<T>> {
    best_approximation_from(space, f, span, opts, None)
}

/// As [`best_approximation`]; the descent starts from `warm` (an element of the span).
pub fn best_approximation_from<T: Scalar, S: NormedSpace<T> + ?Sized>(
    space: &S,
    f: &Element<T>,
    span: &[Element<T>],
    opts: &SolverOptions,
    warm: Option<&Element<T>>,
) -> Result<Approximation<T>> {
    space.check_support(f)?;
    for a in span {
        space.check_support(a)?;
    }
    let n = span.len();
    let auto = opts.path == PathChoice::Auto;
    if n == 0 {
        let e = space.norm(f)?;
        return Ok(Approximation {
            g: Element::zero(),
            residual: f.clone(),
            error: e,
            coeffs: vec![],
            certificate: T::zero(),
            path: SolverPath::Empty,
            iterations: 0,
        });
    }
    if auto && space.is_absolute() && span.iter().all(|a| a.nnz() == 1) {
        return coordinate_path(space, f, span);
    }
    let frame = Frame::new(f, span);
    let qr = Qr::new(&frame.cols, T::of(RANK_TOL));
    let fnorm2 = norm2(&frame.rhs);
    let proj_res = qr.residual(&frame.rhs);
    if auto && (space.is_hilbert() || norm2(&proj_res) <= T::of(IN_SPAN_TOL) * fnorm2) {
        let in_span = !space.is_hilbert() || norm2(&proj_res) <= T::of(IN_SPAN_TOL) * fnorm2;
        let c = qr.solve(&frame.rhs);
        let residual = if in_span { Element::zero() } else { frame.element(&proj_res) };
        let error = space.norm(&residual)?;
        let g = f.sub(&residual);
        let cert = certificate(space, &residual, span)?;
        return Ok(Approximation {
            g,
            residual,
            error,
            coeffs: spread(n, &qr.kept, &c),
            certificate: cert,
            path: if in_span { SolverPath::InSpan } else { SolverPath::Gram },
            iterations: 0,
        });
    }
    if auto {
        if let Some(s) = qr.null_vector(frame.index.len()) {
            return codim1_path(space, f, span, &frame, &qr, &s);
        }
    }
    descent_path(space, f, span, &frame, &qr, opts, warm)
}

fn coordinate_path<T: Scalar, S: NormedSpace<T> + ?Sized>(space: &S, f: &Element<T>, span: &[Element<T>]) -> Result<Approximation<T>> {
    let mut g = Element::zero();
    let mut coeffs = Vec::with_capacity(span.len());
    for a in span {
        let (j, aj) = a.iter().next().expect("single coordinate");
        if g.get(j) == T::zero() && f.get(j) != T::zero() {
            g.set_unchecked(j, f.get(j));
            coeffs.push(f.get(j) / aj);
        } else {
            coeffs.push(T::zero());
        }
    }
    let residual = f.without(g.support().collect::<Vec<_>>());
    let error = space.norm(&residual)?;
    let cert = certificate(space, &residual, span)?;
    Ok(Approximation { g, residual, error, coeffs, certificate: cert, path: SolverPath::Coordinate, iterations: 0 })
}

fn codim1_path<T: Scalar, S: NormedSpace<T> + ?Sized>(
    space: &S,
    f: &Element<T>,
    span: &[Element<T>],
    frame: &Frame<T>,
    qr: &Qr<T>,
    s: &[T],
) -> Result<Approximation<T>> {
    let a = crate::element::Functional::new(frame.element(s), T::one());
    let nu = space.dual_norm(&a)?;
    let af = a.apply(f);
    let x = space.dual_map(&a)?;
    // E = |a(f)| / ||a||_*, attained by (a(f) / ||a||_*) J*(a / ||a||_*)
    let residual = x.scale(af / nu);
    let error = af.abs() / nu;
    let g = f.sub(&residual);
    let gd: Vec<T> = frame.index.iter().map(|&j| g.get(j)).collect();
    let c = qr.solve(&gd);
    let cert = certificate(space, &residual, span)?;
    Ok(Approximation {
        g,
        residual,
        error,
        coeffs: spread(span.len(), &qr.kept, &c),
        certificate: cert,
        path: SolverPath::Codim1,
        iterations: 0,
    })
}

struct Eval<T> {
    c: Vec<T>,
    residual: Element<T>,
    value: T,
    grad: Vec<T>,
}

fn max_abs<T: Scalar>(v: &[T]) -> T {
    v.iter().fold(T::zero(), |m, x| m.max(x.abs()))
}

fn descent_path<T: Scalar, S: NormedSpace<T> + ?Sized>(
    space: &S,
    f: &Element<T>,
    span: &[Element<T>],
    frame: &Frame<T>,
    qr: &Qr<T>,
    opts: &SolverOptions,
    warm: Option<&Element<T>>,
) -> Result<Approximation<T>> {
    let kept = &qr.kept;
    let k = kept.len();
    // descent runs on coefficients of the atoms scaled to unit max-entry
    let scale: Vec<T> = kept.iter().map(|&i| max_abs(&frame.cols[i])).collect();
    let atoms: Vec<Element<T>> = kept.iter().zip(&scale).map(|(&i, &s)| frame.element(&frame.cols[i]).scale(s.recip())).collect();
    let unscale = |c: &[T]| -> Vec<T> { c.iter().zip(&scale).map(|(&ci, &s)| ci / s).collect() };
    let zero_tol = T::of(opts.zero_tol);
    let cert_tol = T::of(opts.cert_tol);

    let eval = |c: Vec<T>| -> Result<Eval<T>> {
        let g = frame.combination(kept, &unscale(&c));
        let r: Vec<T> = frame.rhs.iter().zip(&g).map(|(&a, &b)| a - b).collect();
        let residual = frame.element(&r);
        let value = space.norm(&residual)?;
        let grad = if value <= zero_tol {
            vec![T::zero(); k]
        } else {
            let fr = space.norming_functional(&residual)?;
            atoms.iter().map(|a| -fr.apply(a)).collect()
        };
        Ok(Eval { c, residual, value, grad })
    };

    let start = match warm {
        Some(w) => {
            let wd: Vec<T> = frame.index.iter().map(|&j| w.get(j)).collect();
            qr.solve(&wd).iter().zip(&scale).map(|(&c, &s)| c * s).collect()
        }
        None => vec![T::zero(); k],
    };
    let mut cur = eval(start)?;
    let cold = eval(vec![T::zero(); k])?;
    if cold.value < cur.value {
        cur = cold;
    }
    let mut h = identity::<T>(k);
    let mut fresh = true;
    let mut iterations = 0;
    let eps4 = T::of(4.0) * T::eps();

    let finish = |cur: Eval<T>, iterations: usize| -> Result<Approximation<T>> {
        let residual = if cur.value <= zero_tol { Element::zero() } else { cur.residual };
        let error = if residual.is_zero() { T::zero() } else { cur.value };
        let cert = certificate(space, &residual, span)?;
        Ok(Approximation {
            g: f.sub(&residual),
            residual,
            error,
            coeffs: spread(span.len(), kept, &unscale(&cur.c)),
            certificate: cert,
            path: SolverPath::Descent,
            iterations,
        })
    };

    let mut mark = (cur.value, max_abs(&cur.grad));
    let mut stall = 0;
    while iterations < opts.max_iter {
        if cur.value <= zero_tol || max_abs(&cur.grad) <= cert_tol {
            return finish(cur, iterations);
        }
        // nearly non-smooth norms stop resolving progress before the certificate target
        if cur.value < mark.0 * (T::one() - T::of(STALL_DECREASE)) || max_abs(&cur.grad) < mark.1 * T::of(0.5) {
            mark = (cur.value, max_abs(&cur.grad));
            stall = 0;
        } else {
            stall += 1;
            if stall >= STALL_LIMIT {
                return finish(cur, iterations);
            }
        }
        iterations += 1;
        let mut d: Vec<T> = h.iter().map(|row| -dot(row, &cur.grad)).collect();
        if fresh {
            // first step on the scale of the residual
            for x in d.iter_mut() {
                *x *= cur.value;
            }
        }
        let mut slope = dot(&cur.grad, &d);
        if slope >= T::zero() {
            h = identity(k);
            d = cur.grad.iter().map(|&g| -g * cur.value).collect();
            slope = dot(&cur.grad, &d);
        }
        let mut alpha = T::one();
        let mut accepted = None;
        while alpha >= T::of(MIN_STEP) {
            let trial: Vec<T> = cur.c.iter().zip(&d).map(|(&c, &di)| c + alpha * di).collect();
            let t = eval(trial)?;
            // the Armijo bound rounds to the current value once steps reach round-off
            let armijo = t.value <= cur.value + T::of(ARMIJO) * alpha * slope && t.value < cur.value;
            let flat = t.value <= cur.value * (T::one() + eps4) && max_abs(&t.grad) < max_abs(&cur.grad);
            if armijo || flat {
                accepted = Some((alpha, t));
                break;
            }
            alpha = alpha * T::of(0.5);
        }
        let mut resolved = false;
        if accepted.is_none() {
            match derivative_search(&eval, &cur, &d, eps4)? {
                Search::Step(a, t) => accepted = Some((a, t)),
                Search::Resolved => resolved = true,
                Search::Failed => {}
            }
        }
        match accepted {
            Some((alpha, t)) => {
                let s: Vec<T> = d.iter().map(|&di| alpha * di).collect();
                let y: Vec<T> = t.grad.iter().zip(&cur.grad).map(|(&a, &b)| a - b).collect();
                let sy = dot(&s, &y);
                if sy > T::of(1e-14) * norm2(&s) * norm2(&y) {
                    if fresh {
                        let scale = sy / dot(&y, &y);
                        h = identity::<T>(k).into_iter().map(|row| row.into_iter().map(|v| v * scale).collect()).collect();
                    }
                    bfgs_update(&mut h, &s, &y, sy);
                    fresh = false;
                }
                cur = t;
            }
            None if !fresh => {
                h = identity(k);
                fresh = true;
            }
            None => match newton_polish(&eval, &cur, cert_tol)? {
                Some(better) => {
                    cur = better;
                    h = identity(k);
                    fresh = true;
                }
                // stationary along the steepest direction to machine resolution
                None if resolved => return finish(cur, iterations),
                None => {
                    return Err(Error::NonConvergence {
                        iterations,
                        certificate: max_abs(&cur.grad).as_f64(),
                        residual: cur.value.as_f64(),
                    })
                }
            },
        }
    }
    Err(Error::NonConvergence { iterations, certificate: max_abs(&cur.grad).as_f64(), residual: cur.value.as_f64() })
}

/// Line minimization of the convex `alpha -> ||f - G(c + alpha d)||` by bisection
/// on the sign of the directional derivative, which stays accurate after the
/// objective values stop resolving progress.
fn derivative_search<T: Scalar, E>(eval: &E, cur: &Eval<T>, d: &[T], eps4: T) -> Result<Search<T>>
where
    E: Fn(Vec<T>) -> Result<Eval<T>>,
{
    if dot(&cur.grad, d) >= T::zero() {
        return Ok(Search::Failed);
    }
    let at = |a: T| -> Result<Eval<T>> { eval(cur.c.iter().zip(d).map(|(&c, &di)| c + a * di).collect()) };
    let (mut lo, mut hi) = (T::zero(), T::one());
    let mut hi_eval = at(hi)?;
    let mut lo_eval: Option<Eval<T>> = None;
    let mut doublings = 0;
    while dot(&hi_eval.grad, d) < T::zero() && doublings < 60 {
        lo = hi;
        lo_eval = Some(hi_eval);
        hi = hi + hi;
        hi_eval = at(hi)?;
        doublings += 1;
    }
    let bracketed = dot(&hi_eval.grad, d) >= T::zero();
    let mut collapsed = false;
    for _ in 0..2200 {
        let mid = (lo + hi) * T::of(0.5);
        if mid <= lo || mid >= hi {
            collapsed = true;
            break;
        }
        let m = at(mid)?;
        if dot(&m.grad, d) < T::zero() {
            lo = mid;
            lo_eval = Some(m);
        } else {
            hi = mid;
            hi_eval = m;
        }
    }
    let grad0 = max_abs(&cur.grad);
    let ok = |e: &Eval<T>| e.value <= cur.value * (T::one() + eps4) && max_abs(&e.grad) < grad0;
    let mut best: Option<(T, Eval<T>)> = None;
    for (a, e) in [(hi, Some(hi_eval)), (lo, lo_eval)] {
        let Some(e) = e else { continue };
        if ok(&e) && best.as_ref().is_none_or(|(_, b)| max_abs(&e.grad) < max_abs(&b.grad)) {
            best = Some((a, e));
        }
    }
    Ok(match best {
        Some((a, e)) => Search::Step(a, e),
        None if bracketed && collapsed => Search::Resolved,
        None => Search::Failed,
    })
}

enum Search<T> {
    Step(T, Eval<T>),
    /// The line minimizer sits between adjacent floating-point steps.
    Resolved,
    Failed,
}

fn identity<T: Scalar>(k: usize) -> Vec<Vec<T>> {
    (0..k).map(|i| (0..k).map(|j| if i == j { T::one() } else { T::zero() }).collect()).collect()
}

/// Inverse-Hessian BFGS update.
fn bfgs_update<T: Scalar>(h: &mut [Vec<T>], s: &[T], y: &[T], sy: T) {
    let k = s.len();
    let hy: Vec<T> = h.iter().map(|row| dot(row, y)).collect();
    let yhy = dot(y, &hy);
    let rho = sy.recip();
    for i in 0..k {
        for j in 0..k {
            h[i][j] += (T::one() + yhy * rho) * rho * s[i] * s[j] - rho * (hy[i] * s[j] + s[i] * hy[j]);
        }
    }
}

/// Newton steps on the gradient with a central-difference Jacobian, used once
/// objective values no longer resolve progress.
fn newton_polish<T: Scalar, E>(eval: &E, start: &Eval<T>, cert_tol: T) -> Result<Option<Eval<T>>>
where
    E: Fn(Vec<T>) -> Result<Eval<T>>,
{
    let k = start.c.len();
    let mut cur = Eval { c: start.c.clone(), residual: start.residual.clone(), value: start.value, grad: start.grad.clone() };
    let mut improved = false;
    for _ in 0..30 {
        if max_abs(&cur.grad) <= cert_tol {
            break;
        }
        let mut jac = vec![vec![T::zero(); k]; k];
        for j in 0..k {
            let h = T::of(1e-7) * cur.c[j].abs().max(cur.value);
            let mut cp = cur.c.clone();
            cp[j] += h;
            let mut cm = cur.c.clone();
            cm[j] -= h;
            let gp = eval(cp)?.grad;
            let gm = eval(cm)?.grad;
            for i in 0..k {
                jac[i][j] = (gp[i] - gm[i]) / (h + h);
            }
        }
        // symmetrize and regularize slightly
        let diag = (0..k).fold(T::zero(), |m, i| m.max(jac[i][i].abs()));
        for i in 0..k {
            for j in 0..i {
                let v = (jac[i][j] + jac[j][i]) * T::of(0.5);
                jac[i][j] = v;
                jac[j][i] = v;
            }
            jac[i][i] += T::of(1e-12) * diag;
        }
        let rhs: Vec<T> = cur.grad.iter().map(|&g| -g).collect();
        let Some(step) = solve_dense(jac, rhs) else { break };
        let mut alpha = T::one();
        let mut next = None;
        while alpha >= T::of(1e-6) {
            let trial: Vec<T> = cur.c.iter().zip(&step).map(|(&c, &s)| c + alpha * s).collect();
            let t = eval(trial)?;
            let ok_value = t.value <= cur.value * (T::one() + T::of(16.0) * T::eps());
            if ok_value && max_abs(&t.grad) < max_abs(&cur.grad) {
                next = Some(t);
                break;
            }
            alpha = alpha * T::of(0.5);
        }
        match next {
            Some(t) => {
                cur = t;
                improved = true;
            }
            None => break,
        }
    }
    Ok(improved.then_some(cur))
}

/// `G = G_exact + m d` for an optional spike `(d, m)` with `d` in the span;
/// checks `||f - G|| <= (1 + eta) E + eta'`. Returns `(G, f - G)`.
pub fn perturbed_approximant<T: Scalar, S: NormedSpace<T> + ?Sized>(
    space: &S,
    span: &[Element<T>],
    exact: &Approximation<T>,
    eta: T,
    eta_prime: T,
    spike: Option<(&Element<T>, T)>,
) -> Result<(Element<T>, Element<T>)> {
    let Some((d, m)) = spike else {
        return Ok((exact.g.clone(), exact.residual.clone()));
    };
    if !in_span(d, span) {
        return Err(Error::InvalidParameter("spike direction is not in the span".into()));
    }
    let residual = exact.residual.axpy(-m, d);
    let bound = (T::one() + eta) * exact.error + eta_prime;
    let n = space.norm(&residual)?;
    if n > bound + T::of(APPROX_TOL) {
        return Err(Error::SlackViolated((n - bound).as_f64()));
    }
    Ok((exact.g.axpy(m, d), residual))
}

/// Whether `d` is a linear combination of `span` (relative residual `<= 1e-12`).
pub fn in_span<T: Scalar>(d: &Element<T>, span: &[Element<T>]) -> bool {
    if d.is_zero() {
        return true;
    }
    let frame = Frame::new(d, span);
    let qr = Qr::new(&frame.cols, T::of(RANK_TOL));
    norm2(&qr.residual(&frame.rhs)) <= T::of(IN_SPAN_TOL) * norm2(&frame.rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::space::{LqSpace, SmoothSpaceX};
    use approx::assert_relative_eq;

    fn el(start: usize, v: &[f64]) -> Element<f64> {
        Element::from_dense(start, v).unwrap()
    }

    #[test]
    fn coordinate_projection() {
        let l2 = LqSpace::<f64>::new(2.0).unwrap();
        let a = best_approximation(&l2, &el(1, &[1.0, 0.5]), &[Element::basis(1)], &SolverOptions::default()).unwrap();
        assert_eq!(a.g, Element::basis(1));
        assert_eq!(a.error, 0.5);
        assert_eq!(a.path, SolverPath::Coordinate);

        let l3 = LqSpace::<f64>::new(3.0).unwrap();
        let f = el(0, &[0.3, -1.0, 2.0, 0.5]);
        let a = best_approximation(&l3, &f, &[Element::basis(1), Element::basis(3)], &SolverOptions::default()).unwrap();
        let expected = (0.3f64.powi(3) + 2f64.powi(3)).cbrt();
        assert_relative_eq!(a.error, expected, max_relative = 1e-14);
    }

    #[test]
    fn gram_and_descent_agree_in_l2() {
        let l2 = LqSpace::<f64>::new(2.0).unwrap();
        let f = el(1, &[1.0, -2.0, 0.5, 3.0]);
        let span = vec![el(1, &[1.0, 1.0]).scale(0.5f64.sqrt()), el(2, &[1.0, 0.0, 1.0]).scale(0.5f64.sqrt())];
        let g = best_approximation(&l2, &f, &span, &SolverOptions::default()).unwrap();
        assert_eq!(g.path, SolverPath::Gram);
        let opts = SolverOptions { path: PathChoice::ForceDescent, ..Default::default() };
        let d = best_approximation(&l2, &f, &span, &opts).unwrap();
        assert_eq!(d.path, SolverPath::Descent);
        assert!((g.error - d.error).abs() <= 1e-8);
        assert!(d.certificate <= 1e-9);
    }

    #[test]
    fn in_span_detected() {
        let l15 = LqSpace::<f64>::new(1.5).unwrap();
        let span = vec![el(1, &[1.0, 1.0]), el(2, &[1.0, -1.0])];
        let f = el(1, &[2.0, 3.0, -1.0]);
        let a = best_approximation(&l15, &f, &span, &SolverOptions::default()).unwrap();
        assert_eq!(a.path, SolverPath::InSpan);
        assert_eq!(a.error, 0.0);
        assert!(a.residual.is_zero());
    }

    #[test]
    fn codim1_matches_descent() {
        let l4 = LqSpace::<f64>::new(4.0).unwrap();
        let f = el(1, &[1.0, 0.2, -0.7]);
        let span = vec![el(1, &[1.0, 1.0]), el(2, &[1.0, 2.0])];
        let a = best_approximation(&l4, &f, &span, &SolverOptions::default()).unwrap();
        assert_eq!(a.path, SolverPath::Codim1);
        let opts = SolverOptions { path: PathChoice::ForceDescent, ..Default::default() };
        let d = best_approximation(&l4, &f, &span, &opts).unwrap();
        assert!((a.error - d.error).abs() < 1e-9);
        assert!(a.certificate < 1e-12);
    }

    #[test]
    fn smooth_space_first_step() {
        let x = SmoothSpaceX::<f64>::with_default_exponents(4).unwrap();
        let g1 = el(1, &[1.0, 1.0]);
        let a = best_approximation(&x, &Element::basis(1), &[g1], &SolverOptions::default()).unwrap();
        assert_eq!(a.path, SolverPath::Codim1);
        // E_1 = 1 / nu_2(1, -1) = 2^{-1/3}
        assert_relative_eq!(a.error, 2f64.powf(-1.0 / 3.0), max_relative = 1e-13);
    }

    #[test]
    fn spike_checks() {
        let l2 = LqSpace::<f64>::new(2.0).unwrap();
        let f = el(1, &[1.0, 1.0]);
        let span = vec![Element::basis(1)];
        let a = best_approximation(&l2, &f, &span, &SolverOptions::default()).unwrap();
        let (g, _) = perturbed_approximant(&l2, &span, &a, 0.0, 0.0, None).unwrap();
        assert_eq!(g, a.g);
        let d = Element::basis(1);
        let (g, r) = perturbed_approximant(&l2, &span, &a, 0.0, 0.5, Some((&d, 0.5))).unwrap();
        assert_eq!(g.get(1), 1.5);
        assert!(l2.norm(&r).unwrap() <= 1.5);
        assert!(matches!(perturbed_approximant(&l2, &span, &a, 0.0, 0.1, Some((&d, 2.0))), Err(Error::SlackViolated(_))));
        assert!(perturbed_approximant(&l2, &span, &a, 0.0, 1.0, Some((&Element::basis(2), 0.1))).is_err());
    }
}

//! Nested `p`-sum recursion `v_n = (v_{n-1}^{p_n} + |x_n|^{p_n})^{1/p_n}` and its
//! norming functional, evaluated in log space.
//!
//! Coordinate `k >= 1` uses `exps[k - 1]` and `excess[k - 1] = exps[k - 1] - 1`.

use crate::element::Element;
use crate::scalar::Scalar;

/// One recursion step for `a = v_{n-1}`, `b = |x_n|` and exponent `p`.
///
/// Returns `(v_n, ln(a / v_n), ln(b / v_n))`; a zero input has log `-inf`.
pub(crate) fn step<T: Scalar>(a: T, b: T, p: T) -> (T, T, T) {
    let zero = T::zero();
    if b == zero {
        let la = if a == zero { T::neg_infinity() } else { zero };
        return (a, la, T::neg_infinity());
    }
    if a == zero {
        return (b, T::neg_infinity(), zero);
    }
    if b >= a {
        let r = a / b;
        let l = r.powf(p).ln_1p() / p;
        (b * l.exp(), r.ln() - l, -l)
    } else {
        let r = b / a;
        let l = r.powf(p).ln_1p() / p;
        (a * l.exp(), -l, r.ln() - l)
    }
}

/// Values `v_0, ..., v_n` for the coordinates `1..=n` of `x`.
pub(crate) fn prefix_norms<T: Scalar>(x: &Element<T>, exps: &[T], n: usize) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    let mut v = T::zero();
    out.push(v);
    for k in 1..=n {
        v = step(v, x.get(k).abs(), exps[k - 1]).0;
        out.push(v);
    }
    out
}

/// `v_n(x)`, skipping runs of zero coordinates.
pub(crate) fn norm_at<T: Scalar>(x: &Element<T>, exps: &[T], n: usize) -> T {
    let mut v = T::zero();
    for (k, xk) in x.iter() {
        if k == 0 || k > n {
            continue;
        }
        v = step(v, xk.abs(), exps[k - 1]).0;
    }
    v
}

/// Coefficients of the norming functional of `x` restricted to `1..=m`:
/// `sgn x_k (|x_k| / v_k)^{e_k} prod_{j=k+1}^{m} (v_{j-1} / v_j)^{e_j}`, with `0/0 := 0`.
pub(crate) fn norming_coeffs<T: Scalar>(x: &Element<T>, exps: &[T], excess: &[T], m: usize) -> Element<T> {
    let mut la = vec![T::zero(); m + 1];
    let mut lb = vec![T::neg_infinity(); m + 1];
    let mut v = T::zero();
    for k in 1..=m {
        let (next, a, b) = step(v, x.get(k).abs(), exps[k - 1]);
        la[k] = a;
        lb[k] = b;
        v = next;
    }
    let mut out = Element::zero();
    if v == T::zero() {
        return out;
    }
    // suffix sum of e_j ln(v_{j-1}/v_j) for j > k
    let mut suffix = T::zero();
    for k in (1..=m).rev() {
        let xk = x.get(k);
        if xk != T::zero() {
            let lg = excess[k - 1] * lb[k] + suffix;
            out.set_unchecked(k, xk.signum() * lg.exp());
        }
        if la[k] == T::neg_infinity() {
            // every earlier coordinate is zero
            break;
        }
        suffix += excess[k - 1] * la[k];
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn direct(a: f64, b: f64, p: f64) -> f64 {
        (a.powf(p) + b.powf(p)).powf(1.0 / p)
    }

    #[test]
    fn step_matches_direct_formula() {
        for &(a, b, p) in &[(1.0, 1.0, 1.5), (3.0, 4.0, 2.0), (0.2, 5.0, 1.25), (7.0, 0.1, 3.0)] {
            let (v, la, lb) = step(a, b, p);
            let d = direct(a, b, p);
            assert!((v - d).abs() <= 1e-14 * d);
            assert!((la.exp() - a / d).abs() < 1e-14);
            assert!((lb.exp() - b / d).abs() < 1e-14);
        }
        let (v, la, lb) = step(0.0, 2.0, 1.5);
        assert_eq!((v, la, lb), (2.0, f64::NEG_INFINITY, 0.0));
    }

    #[test]
    fn norming_coeffs_pair_to_norm() {
        let exps = [2.0, 1.5, 1.25, 1.125];
        let excess = [1.0, 0.5, 0.25, 0.125];
        let x = Element::from_dense(1, &[0.3, -1.2, 0.0, 2.5]).unwrap();
        let n = norm_at(&x, &exps, 4);
        let a = norming_coeffs(&x, &exps, &excess, 4);
        let pairing: f64 = a.iter().map(|(j, v)| v * x.get(j)).sum();
        assert!((pairing - n).abs() < 1e-13 * n);
        assert_eq!(a.get(3), 0.0);
    }
}

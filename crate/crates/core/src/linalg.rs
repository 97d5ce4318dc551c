//! Small dense linear algebra over a generic scalar.

use crate::scalar::Scalar;

pub(crate) fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub(crate) fn norm2<T: Scalar>(a: &[T]) -> T {
    let m = a.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if m == T::zero() {
        return m;
    }
    let s: T = a.iter().map(|&v| (v / m) * (v / m)).sum();
    m * s.sqrt()
}

fn axpy<T: Scalar>(y: &mut [T], s: T, x: &[T]) {
    for (yi, &xi) in y.iter_mut().zip(x) {
        *yi += s * xi;
    }
}

/// Thin QR by modified Gram-Schmidt with one re-orthogonalization pass.
/// Columns whose orthogonal part falls below `rank_tol` times their norm are dropped.
#[derive(Debug, Clone)]
pub(crate) struct Qr<T> {
    /// Orthonormal columns, one per kept input column.
    pub q: Vec<Vec<T>>,
    /// `r[i][j]`: coefficient of `q_i` in kept column `j` (upper triangular).
    pub r: Vec<Vec<T>>,
    /// Indices of the kept input columns.
    pub kept: Vec<usize>,
}

impl<T: Scalar> Qr<T> {
    pub fn new(cols: &[Vec<T>], rank_tol: T) -> Self {
        let mut q: Vec<Vec<T>> = Vec::new();
        let mut r: Vec<Vec<T>> = Vec::new();
        let mut kept = Vec::new();
        for (j, col) in cols.iter().enumerate() {
            let n0 = norm2(col);
            if n0 == T::zero() {
                continue;
            }
            let mut v = col.clone();
            let mut coef = vec![T::zero(); q.len()];
            for _ in 0..2 {
                for (i, qi) in q.iter().enumerate() {
                    let c = dot(qi, &v);
                    coef[i] += c;
                    axpy(&mut v, -c, qi);
                }
            }
            let n = norm2(&v);
            if n <= rank_tol * n0 {
                continue;
            }
            for x in v.iter_mut() {
                *x /= n;
            }
            coef.push(n);
            for (i, ri) in r.iter_mut().enumerate() {
                ri.push(coef[i]);
            }
            let mut row = vec![T::zero(); kept.len()];
            row.push(n);
            r.push(row);
            q.push(v);
            kept.push(j);
        }
        Qr { q, r, kept }
    }

    pub fn rank(&self) -> usize {
        self.q.len()
    }

    /// `b - Q Q^T b`, two passes.
    pub fn residual(&self, b: &[T]) -> Vec<T> {
        let mut v = b.to_vec();
        for _ in 0..2 {
            for qi in &self.q {
                let c = dot(qi, &v);
                axpy(&mut v, -c, qi);
            }
        }
        v
    }

    /// Least-squares coefficients on the kept columns.
    pub fn solve(&self, b: &[T]) -> Vec<T> {
        let k = self.rank();
        let mut rhs: Vec<T> = self.q.iter().map(|qi| dot(qi, b)).collect();
        // refine once against the re-projected residual
        let res = self.residual(b);
        for (i, qi) in self.q.iter().enumerate() {
            rhs[i] += dot(qi, &res);
        }
        let mut x = vec![T::zero(); k];
        for i in (0..k).rev() {
            let mut s = rhs[i];
            for j in i + 1..k {
                s -= self.r[i][j] * x[j];
            }
            x[i] = s / self.r[i][i];
        }
        x
    }

    /// Unit vector orthogonal to every column, when the rank is `dim - 1`.
    pub fn null_vector(&self, dim: usize) -> Option<Vec<T>> {
        if self.rank() + 1 != dim {
            return None;
        }
        let mut best: Option<(T, Vec<T>)> = None;
        for i in 0..dim {
            let mut e = vec![T::zero(); dim];
            e[i] = T::one();
            let v = self.residual(&e);
            let n = norm2(&v);
            if best.as_ref().map_or(true, |(b, _)| n > *b) {
                best = Some((n, v));
            }
        }
        let (n, mut v) = best?;
        if n == T::zero() {
            return None;
        }
        for x in v.iter_mut() {
            *x /= n;
        }
        // one more projection removes what the normalization amplified
        let v = self.residual(&v);
        let n = norm2(&v);
        Some(v.into_iter().map(|x| x / n).collect())
    }
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting.
pub(crate) fn solve_dense<T: Scalar>(mut a: Vec<Vec<T>>, mut b: Vec<T>) -> Option<Vec<T>> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap_or(std::cmp::Ordering::Equal))?;
        if a[piv][col] == T::zero() || !a[piv][col].is_finite() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for i in col + 1..n {
            let f = a[i][col] / a[col][col];
            if f == T::zero() {
                continue;
            }
            for j in col..n {
                let v = a[col][j];
                a[i][j] -= f * v;
            }
            let v = b[col];
            b[i] -= f * v;
        }
    }
    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut s = b[i];
        for j in i + 1..n {
            s -= a[i][j] * x[j];
        }
        x[i] = s / a[i][i];
    }
    x.iter().all(|v| v.is_finite()).then_some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qr_solves_and_detects_rank() {
        let cols = vec![vec![1.0f64, 0.0, 1.0], vec![2.0, 0.0, 2.0], vec![0.0, 1.0, 1.0]];
        let qr = Qr::new(&cols, 1e-10);
        assert_eq!(qr.rank(), 2);
        assert_eq!(qr.kept, vec![0, 2]);
        let b = vec![1.0f64, 2.0, 3.0];
        let x = qr.solve(&b);
        assert!((x[0] - 1.0).abs() < 1e-14 && (x[1] - 2.0).abs() < 1e-14);
        let s = qr.null_vector(3).unwrap();
        assert!(dot(&s, &cols[0]).abs() < 1e-15 && dot(&s, &cols[2]).abs() < 1e-15);
        assert!((norm2(&s) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn dense_solve() {
        let a = vec![vec![0.0f64, 2.0], vec![3.0, 1.0]];
        let x = solve_dense(a, vec![4.0, 5.0]).unwrap();
        assert!((x[0] - 1.0).abs() < 1e-15 && (x[1] - 2.0).abs() < 1e-15);
        assert!(solve_dense(vec![vec![1.0, 1.0], vec![1.0, 1.0]], vec![1.0, 2.0]).is_none());
    }
}

//! Small dense symmetric linear algebra: Cholesky solves and eigenvalues.

use crate::scalar::Scalar;

/// Dense row-major square matrix.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct SymMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> SymMatrix<T> {
    pub(crate) fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![T::zero(); n * n],
        }
    }

    #[inline]
    #[cfg(test)]
    pub(crate) fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    #[inline]
    pub(crate) fn set(&mut self, i: usize, j: usize, v: T) {
        self.data[i * self.n + j] = v;
    }

    /// Solves `A x = b` for symmetric positive definite `A`.
    /// Returns `None` when a pivot is not positive.
    pub(crate) fn cholesky_solve(&self, b: &[T]) -> Option<Vec<T>> {
        let n = self.n;
        let mut l = self.data.clone();
        for j in 0..n {
            let mut d = l[j * n + j];
            for k in 0..j {
                d = d - l[j * n + k] * l[j * n + k];
            }
            if !(d > T::zero()) {
                return None;
            }
            let d = d.sqrt();
            l[j * n + j] = d;
            for i in (j + 1)..n {
                let (row_i, row_j) = (i * n, j * n);
                let mut s = l[row_i + j];
                for k in 0..j {
                    s = s - l[row_i + k] * l[row_j + k];
                }
                l[row_i + j] = s / d;
            }
        }
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s = s - l[i * n + k] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in (i + 1)..n {
                s = s - l[k * n + i] * y[k];
            }
            y[i] = s / l[i * n + i];
        }
        Some(y)
    }

    /// All eigenvalues in ascending order.
    ///
    /// Householder reduction to tridiagonal form followed by Sturm-sequence
    /// bisection, which resolves each eigenvalue to about `eps·‖A‖`.
    pub(crate) fn eigenvalues(&self) -> Vec<T> {
        let (diag, off) = self.tridiagonalize();
        tridiagonal_eigenvalues(&diag, &off)
    }

    fn tridiagonalize(&self) -> (Vec<T>, Vec<T>) {
        let n = self.n;
        let mut a = self.data.clone();
        let mut v = vec![T::zero(); n];
        let mut p = vec![T::zero(); n];
        let two = T::lit(2.0);
        for k in 0..n.saturating_sub(2) {
            let norm = crate::scalar::scaled_norm(
                &(k + 1..n).map(|i| a[i * n + k]).collect::<Vec<_>>(),
            );
            if norm == T::zero() {
                continue;
            }
            let x0 = a[(k + 1) * n + k];
            let alpha = if x0 > T::zero() { -norm } else { norm };
            for i in 0..n {
                v[i] = if i > k { a[i * n + k] } else { T::zero() };
            }
            v[k + 1] = v[k + 1] - alpha;
            let vnorm = crate::scalar::scaled_norm(&v[k + 1..]);
            if vnorm == T::zero() {
                continue;
            }
            for x in &mut v[k + 1..] {
                *x = *x / vnorm;
            }
            // p = 2 A v on the trailing block, then w = p - (v·p) v.
            for i in k..n {
                let mut s = T::zero();
                for j in (k + 1)..n {
                    s = s + a[i * n + j] * v[j];
                }
                p[i] = two * s;
            }
            let mut vp = T::zero();
            for i in (k + 1)..n {
                vp = vp + v[i] * p[i];
            }
            for i in k..n {
                p[i] = p[i] - vp * v[i];
            }
            for i in k..n {
                for j in k..n {
                    let upd = v[i] * p[j] + p[i] * v[j];
                    a[i * n + j] = a[i * n + j] - upd;
                }
            }
        }
        let diag = (0..n).map(|i| a[i * n + i]).collect();
        let off = (1..n).map(|i| a[i * n + i - 1]).collect();
        (diag, off)
    }
}

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count<T: Scalar>(diag: &[T], off_sq: &[T], x: T, pivot_floor: T) -> usize {
    let mut count = 0;
    let mut q = T::one();
    for (i, &d) in diag.iter().enumerate() {
        q = if i == 0 { d - x } else { d - x - off_sq[i - 1] / q };
        if q.abs() < pivot_floor {
            q = -pivot_floor;
        }
        if q < T::zero() {
            count += 1;
        }
    }
    count
}

fn tridiagonal_eigenvalues<T: Scalar>(diag: &[T], off: &[T]) -> Vec<T> {
    let n = diag.len();
    if n <= 1 {
        return diag.to_vec();
    }
    let off_sq: Vec<T> = off.iter().map(|&e| e * e).collect();
    let mut lo = T::infinity();
    let mut hi = T::neg_infinity();
    for i in 0..n {
        let r = if i > 0 { off[i - 1].abs() } else { T::zero() }
            + if i + 1 < n { off[i].abs() } else { T::zero() };
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    let scale = lo.abs().max(hi.abs()).max(T::min_positive_value());
    let pivot_floor = T::epsilon() * scale * T::lit(1e-3);
    let slack = T::epsilon() * scale * T::lit(4.0);
    lo = lo - slack;
    hi = hi + slack;
    let tol = T::epsilon() * scale * T::lit(2.0);
    let half = T::lit(0.5);
    (0..n)
        .map(|k| {
            // k-th smallest: largest x with count(x) <= k.
            let (mut a, mut b) = (lo, hi);
            for _ in 0..300 {
                let mid = half * (a + b);
                if mid <= a || mid >= b || b - a <= tol.max(T::epsilon() * mid.abs()) {
                    break;
                }
                if sturm_count(diag, &off_sq, mid, pivot_floor) > k {
                    b = mid;
                } else {
                    a = mid;
                }
            }
            half * (a + b)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn from_rows(rows: &[&[f64]]) -> SymMatrix<f64> {
        let n = rows.len();
        let mut m = SymMatrix::zeros(n);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                m.set(i, j, v);
            }
        }
        m
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let m = from_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let ev = m.eigenvalues();
        assert!((ev[0] - 1.0).abs() < 1e-14 && (ev[1] - 3.0).abs() < 1e-14);

        // Path-graph Laplacian plus identity: 1 + 2 - 2cos(kπ/n).
        let n = 12;
        let mut m = SymMatrix::zeros(n);
        for i in 0..n {
            let deg = if i == 0 || i == n - 1 { 1.0 } else { 2.0 };
            m.set(i, i, 1.0 + deg);
            if i + 1 < n {
                m.set(i, i + 1, -1.0);
                m.set(i + 1, i, -1.0);
            }
        }
        let ev = m.eigenvalues();
        for (k, &e) in ev.iter().enumerate() {
            let want = 3.0 - 2.0 * (std::f64::consts::PI * k as f64 / n as f64).cos();
            assert!((e - want).abs() < 1e-12, "{k}: {e} vs {want}");
        }
    }

    #[test]
    fn eigenvalues_trace_matches_dense_random() {
        let n = 30;
        let mut m = SymMatrix::zeros(n);
        let mut s = 1u64;
        for i in 0..n {
            for j in 0..=i {
                s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                let v = (s >> 11) as f64 / (1u64 << 53) as f64 - 0.5;
                m.set(i, j, v);
                m.set(j, i, v);
            }
        }
        let ev = m.eigenvalues();
        let trace: f64 = (0..n).map(|i| m.get(i, i)).sum();
        let frob: f64 = (0..n * n).map(|k| m.data[k] * m.data[k]).sum();
        assert!((ev.iter().sum::<f64>() - trace).abs() < 1e-11);
        assert!((ev.iter().map(|e| e * e).sum::<f64>() - frob).abs() < 1e-10);
        assert!(ev.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn cholesky_solves_and_rejects_indefinite() {
        let m = from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let x = m.cholesky_solve(&[1.0, 2.0, 3.0]).unwrap();
        for i in 0..3 {
            let r: f64 = (0..3).map(|j| m.get(i, j) * x[j]).sum();
            assert!((r - [1.0, 2.0, 3.0][i]).abs() < 1e-14);
        }
        let bad = from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert!(bad.cholesky_solve(&[1.0, 1.0]).is_none());
    }
}

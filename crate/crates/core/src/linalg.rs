//! Eigensolvers used by the phase-grid solver and the charge-basis oracle.
//!
//! * symmetric tridiagonal: Sturm-sequence bisection for the lowest
//!   eigenvalues, then inverse iteration (pivoted LU) for their vectors;
//! * sparse Hermitian: Lanczos with full reorthogonalization, falling back to
//!   a dense Hermitian decomposition for small dimensions.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

const SAFE_MIN: f64 = f64::MIN_POSITIVE;

/// Number of eigenvalues of the tridiagonal matrix strictly below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64, pivmin: f64) -> usize {
    let mut count = 0;
    let mut q = diag[0] - x;
    if q.abs() < pivmin {
        q = -pivmin;
    }
    if q < 0.0 {
        count += 1;
    }
    for i in 1..diag.len() {
        q = diag[i] - x - off[i - 1] * off[i - 1] / q;
        if q.abs() < pivmin {
            q = -pivmin;
        }
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

fn gershgorin(diag: &[f64], off: &[f64]) -> (f64, f64) {
    let n = diag.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut r = 0.0;
        if i > 0 {
            r += off[i - 1].abs();
        }
        if i + 1 < n {
            r += off[i].abs();
        }
        lo = lo.min(diag[i] - r);
        hi = hi.max(diag[i] + r);
    }
    (lo, hi)
}

/// The `count` smallest eigenvalues of a symmetric tridiagonal matrix,
/// ascending. `off[i]` couples rows `i` and `i + 1`.
pub fn tridiagonal_lowest(diag: &[f64], off: &[f64], count: usize) -> Vec<f64> {
    let n = diag.len();
    assert_eq!(off.len() + 1, n, "off-diagonal length must be n - 1");
    let count = count.min(n);
    let max_e2 = off.iter().map(|e| e * e).fold(1.0f64, f64::max);
    let pivmin = SAFE_MIN * max_e2;
    let (glo, ghi) = gershgorin(diag, off);
    let width = (ghi - glo).abs().max(f64::MIN_POSITIVE);
    let glo = glo - 2.0 * f64::EPSILON * width - pivmin;
    let ghi = ghi + 2.0 * f64::EPSILON * width + pivmin;

    let mut out = Vec::with_capacity(count);
    let mut floor = glo;
    for k in 0..count {
        let mut lo = floor;
        let mut hi = ghi;
        for _ in 0..256 {
            let tol = 2.0 * f64::EPSILON * lo.abs().max(hi.abs()) + pivmin;
            if hi - lo <= tol {
                break;
            }
            let mid = 0.5 * (lo + hi);
            if sturm_count(diag, off, mid, pivmin) > k {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let value = 0.5 * (lo + hi);
        out.push(value);
        floor = lo;
    }
    out
}

/// Eigenvector of a symmetric tridiagonal matrix for an accurate eigenvalue,
/// by inverse iteration. The result has unit Euclidean norm.
pub fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], eigenvalue: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let scale = diag
        .iter()
        .map(|d| (d - eigenvalue).abs())
        .chain(off.iter().map(|e| e.abs()))
        .fold(0.0f64, f64::max)
        .max(SAFE_MIN);
    let tiny = f64::EPSILON * scale;

    // LU with partial pivoting of T − σI, in the layout of LAPACK's dgttrf.
    let mut dl: Vec<f64> = off.to_vec();
    let mut d: Vec<f64> = diag.iter().map(|x| x - eigenvalue).collect();
    let mut du: Vec<f64> = off.to_vec();
    let mut du2 = vec![0.0; n.saturating_sub(2)];
    let mut swapped = vec![false; n - 1];
    for i in 0..n - 1 {
        if d[i].abs() >= dl[i].abs() {
            if d[i] == 0.0 {
                d[i] = tiny;
            }
            let fact = dl[i] / d[i];
            dl[i] = fact;
            d[i + 1] -= fact * du[i];
        } else {
            let fact = d[i] / dl[i];
            d[i] = dl[i];
            dl[i] = fact;
            let temp = du[i];
            du[i] = d[i + 1];
            d[i + 1] = temp - fact * d[i + 1];
            if i + 2 < n {
                du2[i] = du[i + 1];
                du[i + 1] *= -fact;
            }
            swapped[i] = true;
        }
    }
    for v in d.iter_mut() {
        if v.abs() < tiny {
            *v = if *v < 0.0 { -tiny } else { tiny };
        }
    }

    let solve = |b: &mut [f64]| {
        for i in 0..n - 1 {
            if swapped[i] {
                let temp = b[i] - dl[i] * b[i + 1];
                b[i] = b[i + 1];
                b[i + 1] = temp;
            } else {
                b[i + 1] -= dl[i] * b[i];
            }
        }
        b[n - 1] /= d[n - 1];
        b[n - 2] = (b[n - 2] - du[n - 2] * b[n - 1]) / d[n - 2];
        for i in (0..n.saturating_sub(2)).rev() {
            b[i] = (b[i] - du[i] * b[i + 1] - du2[i] * b[i + 2]) / d[i];
        }
    };

    let mut x: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64;
            1.0 + 0.5 * (0.7 * t + 0.3).sin() + 0.25 * (1.3 * t).cos()
        })
        .collect();
    normalize(&mut x);
    for _ in 0..4 {
        solve(&mut x);
        normalize(&mut x);
    }
    x
}

fn normalize(x: &mut [f64]) {
    let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 0.0 {
        x.iter_mut().for_each(|v| *v /= norm);
    }
}

/// Hermitian matrix in compressed sparse row form (all entries stored).
#[derive(Debug, Clone)]
pub struct HermitianCsr {
    dim: usize,
    row_ptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex64>,
}

impl HermitianCsr {
    /// Assemble from per-row `(column, value)` lists. Duplicate columns are
    /// summed. Hermiticity is the caller's responsibility.
    pub fn from_rows(rows: Vec<Vec<(usize, Complex64)>>) -> Self {
        let dim = rows.len();
        let mut row_ptr = Vec::with_capacity(dim + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        row_ptr.push(0);
        for mut row in rows {
            row.sort_by_key(|(c, _)| *c);
            let mut last: Option<usize> = None;
            for (c, v) in row {
                if last == Some(c) {
                    *vals.last_mut().unwrap() += v;
                } else {
                    cols.push(c);
                    vals.push(v);
                    last = Some(c);
                }
            }
            row_ptr.push(cols.len());
        }
        Self {
            dim,
            row_ptr,
            cols,
            vals,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.cols[range.clone()].binary_search(&col) {
            Ok(k) => self.vals[range.start + k],
            Err(_) => Complex64::new(0.0, 0.0),
        }
    }

    pub fn matvec(&self, x: &[Complex64], y: &mut [Complex64]) {
        for (row, out) in y.iter_mut().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for k in self.row_ptr[row]..self.row_ptr[row + 1] {
                acc += self.vals[k] * x[self.cols[k]];
            }
            *out = acc;
        }
    }

    /// Largest absolute row sum, an upper bound on the spectral radius.
    pub fn norm_bound(&self) -> f64 {
        (0..self.dim)
            .map(|r| {
                (self.row_ptr[r]..self.row_ptr[r + 1])
                    .map(|k| self.vals[k].norm())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<Complex64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for r in 0..self.dim {
            for k in self.row_ptr[r]..self.row_ptr[r + 1] {
                m[(r, self.cols[k])] += self.vals[k];
            }
        }
        m
    }
}

/// Dimensions at or below this use a dense decomposition.
pub const DENSE_LIMIT: usize = 1200;

/// Lowest `count` eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_lowest(h: &HermitianCsr, count: usize) -> Result<Vec<f64>> {
    if h.dim() <= DENSE_LIMIT {
        Ok(dense_lowest(h, count))
    } else {
        lanczos_lowest(h, count)
    }
}

pub fn dense_lowest(h: &HermitianCsr, count: usize) -> Vec<f64> {
    let eig = h.to_dense().symmetric_eigenvalues();
    let mut values: Vec<f64> = eig.iter().copied().collect();
    values.sort_by(|a, b| a.total_cmp(b));
    values.truncate(count);
    values
}

fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Lanczos with full reorthogonalization and a fixed start vector. Exact
/// degeneracies are resolved only once each; callers needing multiplicities
/// should use [`dense_lowest`].
pub fn lanczos_lowest(h: &HermitianCsr, count: usize) -> Result<Vec<f64>> {
    let n = h.dim();
    let max_iter = n.min(800);
    let norm = h.norm_bound().max(1.0);

    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let t = i as f64;
            Complex64::new(
                1.0 + 0.5 * (0.7 * t + 0.3).sin() + 0.25 * (1.3 * t).cos(),
                0.0,
            )
        })
        .collect();
    let vn = dot(&v, &v).re.sqrt();
    v.iter_mut().for_each(|x| *x /= vn);

    let mut basis: Vec<Vec<Complex64>> = vec![v];
    let mut alpha: Vec<f64> = Vec::new();
    let mut beta: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];

    for j in 0..max_iter {
        h.matvec(&basis[j], &mut w);
        let a = dot(&basis[j], &w).re;
        alpha.push(a);
        for _ in 0..2 {
            for q in &basis {
                let c = dot(q, &w);
                for (wi, qi) in w.iter_mut().zip(q) {
                    *wi -= c * qi;
                }
            }
        }
        let b = dot(&w, &w).re.sqrt();

        let k = alpha.len();
        let exhausted = b <= 1e-14 * norm || k == n;
        if k >= count && (k.is_multiple_of(5) || exhausted) {
            let ritz = tridiagonal_lowest(&alpha, &beta, count);
            let converged = exhausted
                || ritz.iter().all(|&theta| {
                    let s = tridiagonal_eigenvector(&alpha, &beta, theta);
                    b * s[k - 1].abs() <= 1e-11 * norm
                });
            if converged {
                return Ok(ritz);
            }
        }
        if exhausted {
            break;
        }
        beta.push(b);
        basis.push(w.iter().map(|x| x / b).collect());
    }
    Err(Error::NonConvergence(format!(
        "Lanczos did not converge within {max_iter} iterations (dimension {n})"
    )))
}

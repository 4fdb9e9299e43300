//! Small dense linear algebra kernels.
//!
//! Everything here works on row-major `f64` storage and is sized for desk-scale
//! problems (a few hundred rows at most). The routines are the ones the
//! analysis modules need and nothing more:
//!
//! * cyclic Jacobi rotations for the symmetric eigenproblem,
//! * Householder QR with column pivoting (rank, nullspace, least squares),
//! * Lawson-Hanson non-negative least squares and the least-distance problem
//!   built on top of it.

use std::fmt;
use std::ops::{Index, IndexMut};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix must be symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),
    #[error("matrix contains non-finite entries")]
    NonFinite,
    #[error("Jacobi iteration did not converge after {0} sweeps")]
    NoConvergence(usize),
}

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Builds a matrix from row slices. Panics if the rows are ragged.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            let r = r.as_ref();
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        Matrix {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn from_row_major(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Matrix { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `selfᵀ x`
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0.0 {
                continue;
            }
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    pub fn scaled(&self, s: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|v| s * v).collect(),
        }
    }

    /// `(A + Aᵀ) / 2`
    pub fn symmetric_part(&self) -> Matrix {
        assert!(self.is_square());
        let n = self.rows;
        let mut s = Matrix::zeros(n, n);
        for i in 0..n {
            for j in 0..n {
                s[(i, j)] = 0.5 * (self[(i, j)] + self[(j, i)]);
            }
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn row_sums(&self) -> Vec<f64> {
        (0..self.rows).map(|i| self.row(i).iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.cols];
        for i in 0..self.rows {
            for (o, v) in out.iter_mut().zip(self.row(i)) {
                *o += v;
            }
        }
        out
    }

    /// Keeps the listed columns, in the given order.
    pub fn select_columns(&self, cols: &[usize]) -> Matrix {
        let mut out = Matrix::zeros(self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out[(i, k)] = self[(i, j)];
            }
        }
        out
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Matrix {
        let mut data = Vec::with_capacity(rows.len() * self.cols);
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        Matrix {
            rows: rows.len(),
            cols: self.cols,
            data,
        }
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix {
            rows: self.rows + other.rows,
            cols: self.cols,
            data,
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for v in self.row(i) {
                write!(f, "{v:>12.6} ")?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

/// Eigen-decomposition of a real symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Eigenvalues in descending order.
    pub values: Vec<f64>,
    /// Orthonormal eigenvectors stored as columns, matching `values`.
    pub vectors: Matrix,
}

impl SymmetricEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.column(k)
    }
}

const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigensolver for symmetric matrices.
///
/// Sweeps over all off-diagonal pairs, annihilating each with a plane
/// rotation, until the off-diagonal mass is negligible relative to the
/// Frobenius norm. Quadratically convergent once the matrix is close to
/// diagonal; O(n³) per sweep, which is fine for the matrix sizes used here.
pub fn symmetric_eigen(a: &Matrix) -> Result<SymmetricEigen, LinalgError> {
    if !a.is_square() {
        return Err(LinalgError::NotSquare {
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if !a.is_finite() {
        return Err(LinalgError::NonFinite);
    }
    let n = a.rows();
    let scale = a.max_abs();
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > 1e-12 * scale.max(1.0) {
        return Err(LinalgError::NotSymmetric(asym));
    }

    let mut m = a.symmetric_part();
    let mut v = Matrix::identity(n);
    let fro = m.frobenius_norm();
    let mut converged = n < 2;
    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[(i, j)] * m[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= 1e-15 * fro || off == 0.0 {
            converged = true;
            break;
        }
        for p in 0..n - 1 {
            for q in p + 1..n {
                let apq = m[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let theta = (m[(q, q)] - m[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = m[(k, p)];
                    let akq = m[(k, q)];
                    m[(k, p)] = c * akp - s * akq;
                    m[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = m[(p, k)];
                    let aqk = m[(q, k)];
                    m[(p, k)] = c * apk - s * aqk;
                    m[(q, k)] = s * apk + c * aqk;
                }
                m[(p, q)] = 0.0;
                m[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    if !converged {
        return Err(LinalgError::NoConvergence(JACOBI_MAX_SWEEPS));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[(j, j)].total_cmp(&m[(i, i)]).then(i.cmp(&j)));
    let values = order.iter().map(|&i| m[(i, i)]).collect();
    let vectors = v.select_columns(&order);
    Ok(SymmetricEigen { values, vectors })
}

/// Householder QR with column pivoting, `A Π = Q R`.
///
/// `q` is the full orthogonal factor (rows × rows). Column `perm[k]` of the
/// input sits at position `k` of `A Π`. Factorization stops once the largest
/// remaining column norm drops below `rel_tol · |R₀₀|`; `rank` counts the
/// columns processed before that.
#[derive(Debug, Clone)]
pub struct ColPivQr {
    pub q: Matrix,
    pub r: Matrix,
    pub perm: Vec<usize>,
    pub rank: usize,
}

pub fn col_piv_qr(a: &Matrix, rel_tol: f64) -> ColPivQr {
    let (m, k) = (a.rows(), a.cols());
    let mut r = a.clone();
    let mut q = Matrix::identity(m);
    let mut perm: Vec<usize> = (0..k).collect();
    let mut rank = 0;
    let mut lead = 0.0;
    let mut v = vec![0.0; m];

    for s in 0..m.min(k) {
        let mut best = s;
        let mut best_norm = -1.0;
        for j in s..k {
            let nrm = (s..m).map(|i| r[(i, j)] * r[(i, j)]).sum::<f64>().sqrt();
            if nrm > best_norm {
                best_norm = nrm;
                best = j;
            }
        }
        if s == 0 {
            lead = best_norm;
        }
        if best_norm == 0.0 || best_norm <= rel_tol * lead {
            break;
        }
        if best != s {
            for i in 0..m {
                let tmp = r[(i, s)];
                r[(i, s)] = r[(i, best)];
                r[(i, best)] = tmp;
            }
            perm.swap(s, best);
        }

        let x0 = r[(s, s)];
        let alpha = if x0 >= 0.0 { -best_norm } else { best_norm };
        for i in s..m {
            v[i] = r[(i, s)];
        }
        v[s] -= alpha;
        let vv: f64 = (s..m).map(|i| v[i] * v[i]).sum();
        if vv > 0.0 {
            for j in s + 1..k {
                let proj: f64 = (s..m).map(|i| v[i] * r[(i, j)]).sum::<f64>() * 2.0 / vv;
                if proj != 0.0 {
                    for i in s..m {
                        r[(i, j)] -= proj * v[i];
                    }
                }
            }
            for row in 0..m {
                let proj: f64 = (s..m).map(|i| q[(row, i)] * v[i]).sum::<f64>() * 2.0 / vv;
                if proj != 0.0 {
                    for i in s..m {
                        q[(row, i)] -= proj * v[i];
                    }
                }
            }
        }
        r[(s, s)] = alpha;
        for i in s + 1..m {
            r[(i, s)] = 0.0;
        }
        rank += 1;
    }
    ColPivQr { q, r, perm, rank }
}

impl ColPivQr {
    /// Orthonormal basis (as columns) of the orthogonal complement of the
    /// column space, i.e. the left nullspace of the factored matrix.
    pub fn left_null_basis(&self) -> Matrix {
        let cols: Vec<usize> = (self.rank..self.q.rows()).collect();
        self.q.select_columns(&cols)
    }

    /// Least-squares solution of `A x ≈ b` restricted to the leading `rank`
    /// pivot columns (basic solution; remaining entries are zero).
    pub fn solve_least_squares(&self, b: &[f64]) -> Vec<f64> {
        let qtb = self.q.tr_mul_vec(b);
        let r = self.rank;
        let mut y = vec![0.0; r];
        for i in (0..r).rev() {
            let mut acc = qtb[i];
            for (j, yj) in y.iter().enumerate().skip(i + 1) {
                acc -= self.r[(i, j)] * yj;
            }
            y[i] = acc / self.r[(i, i)];
        }
        let mut x = vec![0.0; self.perm.len()];
        for (k, yk) in y.into_iter().enumerate() {
            x[self.perm[k]] = yk;
        }
        x
    }
}

/// Lawson-Hanson active-set solver for `min ‖E u − f‖₂ subject to u ≥ 0`.
pub fn nnls(e: &Matrix, f: &[f64]) -> Vec<f64> {
    let (m, n) = (e.rows(), e.cols());
    assert_eq!(f.len(), m);
    let mut u = vec![0.0; n];
    if n == 0 {
        return u;
    }
    let col_norm = (0..n)
        .map(|j| (0..m).map(|i| e[(i, j)].abs()).sum::<f64>())
        .fold(0.0, f64::max);
    let tol = 10.0 * f64::EPSILON * col_norm * (m.max(n) as f64);
    let mut passive = vec![false; n];

    let gradient = |u: &[f64]| {
        let eu = e.mul_vec(u);
        let resid: Vec<f64> = f.iter().zip(&eu).map(|(fi, ei)| fi - ei).collect();
        e.tr_mul_vec(&resid)
    };

    let mut w = gradient(&u);
    for _ in 0..3 * n + 10 {
        let mut t = None;
        let mut wmax = tol;
        for j in 0..n {
            if !passive[j] && w[j] > wmax {
                wmax = w[j];
                t = Some(j);
            }
        }
        let Some(t) = t else { break };
        passive[t] = true;

        let mut inner_guard = 0;
        loop {
            inner_guard += 1;
            let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
            let sub = e.select_columns(&idx);
            let qr = col_piv_qr(&sub, 1e-13);
            let zsub = qr.solve_least_squares(f);
            if zsub.iter().all(|&z| z > tol) || inner_guard > 3 * n + 10 {
                u.iter_mut().for_each(|x| *x = 0.0);
                for (k, &j) in idx.iter().enumerate() {
                    u[j] = zsub[k].max(0.0);
                }
                break;
            }
            let mut alpha = f64::INFINITY;
            for (k, &j) in idx.iter().enumerate() {
                if zsub[k] <= tol {
                    let denom = u[j] - zsub[k];
                    let a = if denom > 0.0 { u[j] / denom } else { 0.0 };
                    alpha = alpha.min(a);
                }
            }
            for (k, &j) in idx.iter().enumerate() {
                u[j] += alpha * (zsub[k] - u[j]);
            }
            for &j in &idx {
                if u[j] <= tol {
                    u[j] = 0.0;
                    passive[j] = false;
                }
            }
        }
        w = gradient(&u);
    }
    u
}

/// Solution of a least-distance problem.
#[derive(Debug, Clone)]
pub struct LeastDistance {
    pub z: Vec<f64>,
    /// Non-negative multipliers of `G z ≥ g`, with `z = Gᵀ λ`.
    pub multipliers: Vec<f64>,
}

/// `min ‖z‖₂ subject to G z ≥ g`, solved through its NNLS dual.
///
/// Returns `None` when the constraint set is empty.
pub fn least_distance(gmat: &Matrix, g: &[f64]) -> Option<LeastDistance> {
    let (mi, d) = (gmat.rows(), gmat.cols());
    assert_eq!(g.len(), mi);
    if mi == 0 {
        return Some(LeastDistance {
            z: vec![0.0; d],
            multipliers: vec![],
        });
    }
    // E = [Gᵀ; gᵀ], f = e_{d+1}
    let mut e = Matrix::zeros(d + 1, mi);
    for i in 0..mi {
        for j in 0..d {
            e[(j, i)] = gmat[(i, j)];
        }
        e[(d, i)] = g[i];
    }
    let mut f = vec![0.0; d + 1];
    f[d] = 1.0;
    let u = nnls(&e, &f);
    let eu = e.mul_vec(&u);
    let r: Vec<f64> = eu.iter().zip(&f).map(|(a, b)| a - b).collect();
    if norm2(&r) <= 1e-10 || r[d] >= -1e-12 {
        return None;
    }
    let z = r[..d].iter().map(|v| -v / r[d]).collect();
    let multipliers = u.iter().map(|v| v / -r[d]).collect();
    Some(LeastDistance { z, multipliers })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn approx_eq(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn jacobi_two_by_two_closed_form() {
        let a = Matrix::from_rows(&[[2.0, 1.0], [1.0, 2.0]]);
        let eig = symmetric_eigen(&a).unwrap();
        assert!(approx_eq(eig.values[0], 3.0, 1e-14));
        assert!(approx_eq(eig.values[1], 1.0, 1e-14));
        let v = eig.vector(0);
        assert!(approx_eq(v[0].abs(), 0.5f64.sqrt(), 1e-14));
    }

    #[test]
    fn jacobi_reconstructs_matrix() {
        let a = Matrix::from_rows(&[
            [4.0, -2.0, 0.5, 1.0],
            [-2.0, 3.0, 0.0, -1.0],
            [0.5, 0.0, 1.0, 2.0],
            [1.0, -1.0, 2.0, -5.0],
        ]);
        let eig = symmetric_eigen(&a).unwrap();
        for w in eig.values.windows(2) {
            assert!(w[0] >= w[1]);
        }
        for k in 0..4 {
            let v = eig.vector(k);
            let av = a.mul_vec(&v);
            for i in 0..4 {
                assert!(approx_eq(av[i], eig.values[k] * v[i], 1e-12));
            }
        }
        let trace: f64 = eig.values.iter().sum();
        assert!(approx_eq(trace, 3.0, 1e-12));
    }

    #[test]
    fn jacobi_rejects_bad_input() {
        let a = Matrix::zeros(2, 3);
        assert!(matches!(
            symmetric_eigen(&a),
            Err(LinalgError::NotSquare { .. })
        ));
        let b = Matrix::from_rows(&[[0.0, 1.0], [0.0, 0.0]]);
        assert!(matches!(
            symmetric_eigen(&b),
            Err(LinalgError::NotSymmetric(_))
        ));
        let c = Matrix::from_rows(&[[f64::NAN, 0.0], [0.0, 0.0]]);
        assert_eq!(symmetric_eigen(&c).unwrap_err(), LinalgError::NonFinite);
    }

    #[test]
    fn qr_detects_rank_and_nullspace() {
        // third column = first + second
        let a = Matrix::from_rows(&[
            [1.0, 0.0, 1.0],
            [0.0, 1.0, 1.0],
            [1.0, 1.0, 2.0],
            [2.0, -1.0, 1.0],
        ]);
        let qr = col_piv_qr(&a, 1e-10);
        assert_eq!(qr.rank, 2);
        let null = qr.left_null_basis();
        assert_eq!(null.cols(), 2);
        let at = a.transpose();
        for k in 0..2 {
            let res = at.mul_vec(&null.column(k));
            assert!(norm_inf(&res) < 1e-12);
        }
        // Q orthogonal
        let qtq = qr.q.transpose().matmul(&qr.q);
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!(approx_eq(qtq[(i, j)], want, 1e-12));
            }
        }
    }

    #[test]
    fn nnls_matches_hand_solution() {
        // unconstrained optimum (1, -1) -> constrained optimum clips second coordinate
        let e = Matrix::from_rows(&[[1.0, 0.0], [0.0, 1.0]]);
        let u = nnls(&e, &[1.0, -1.0]);
        assert!(approx_eq(u[0], 1.0, 1e-14));
        assert_eq!(u[1], 0.0);
    }

    #[test]
    fn least_distance_half_plane() {
        // min ‖z‖ s.t. z0 + z1 >= 2  ->  z = (1, 1)
        let g = Matrix::from_rows(&[[1.0, 1.0]]);
        let sol = least_distance(&g, &[2.0]).unwrap();
        assert!(approx_eq(sol.z[0], 1.0, 1e-12));
        assert!(approx_eq(sol.z[1], 1.0, 1e-12));
        assert!(approx_eq(sol.multipliers[0], 1.0, 1e-12));
    }

    #[test]
    fn least_distance_detects_infeasible() {
        // z >= 1 and -z >= 0
        let g = Matrix::from_rows(&[[1.0], [-1.0]]);
        assert!(least_distance(&g, &[1.0, 0.0]).is_none());
    }
}

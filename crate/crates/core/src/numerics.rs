//! Dense linear-algebra kernels: ridge least squares, SVD-based
//! pseudo-inverse, symmetric eigendecomposition, and iterated operator
//! application.
//!
//! Everything is `f64`, row-major, and allocation-per-call; problem sizes
//! here are desk scale (a few hundred rows at most), so the classical
//! Jacobi algorithms are both fast enough and numerically trustworthy.

use ndarray::{Array1, Array2, ArrayView1};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum NumericsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular system: lambda is zero and the Gram matrix is rank-deficient")]
    SingularSystem,
    #[error("matrix is not symmetric within tolerance {0:e}")]
    NotSymmetric(f64),
    #[error("matrix entries must be finite")]
    NonFinite,
    #[error("matrix dimensions must be positive (got {rows}x{cols})")]
    EmptyDimensions { rows: usize, cols: usize },
}

pub type Result<T> = std::result::Result<T, NumericsError>;

/// Dense real matrix with finite entries and positive dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    data: Array2<f64>,
}

impl Matrix {
    pub fn new(data: Array2<f64>) -> Result<Self> {
        if data.nrows() == 0 || data.ncols() == 0 {
            return Err(NumericsError::EmptyDimensions {
                rows: data.nrows(),
                cols: data.ncols(),
            });
        }
        if !data.iter().all(|v| v.is_finite()) {
            return Err(NumericsError::NonFinite);
        }
        Ok(Self { data })
    }

    /// Construction for results of internal arithmetic on already-validated
    /// operands. Debug builds still assert finiteness.
    pub(crate) fn from_valid(data: Array2<f64>) -> Self {
        debug_assert!(data.nrows() > 0 && data.ncols() > 0);
        debug_assert!(data.iter().all(|v| v.is_finite()));
        Self { data }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        if rows.is_empty() || rows[0].is_empty() {
            return Err(NumericsError::EmptyDimensions {
                rows: rows.len(),
                cols: rows.first().map_or(0, Vec::len),
            });
        }
        let cols = rows[0].len();
        if rows.iter().any(|r| r.len() != cols) {
            return Err(NumericsError::DimensionMismatch(
                "ragged row lengths".into(),
            ));
        }
        let flat: Vec<f64> = rows.iter().flatten().copied().collect();
        let data = Array2::from_shape_vec((rows.len(), cols), flat)
            .expect("shape checked above");
        Self::new(data)
    }

    pub fn from_flat_row_major(rows: usize, cols: usize, flat: Vec<f64>) -> Result<Self> {
        if flat.len() != rows * cols {
            return Err(NumericsError::DimensionMismatch(format!(
                "flat length {} does not match {}x{}",
                flat.len(),
                rows,
                cols
            )));
        }
        let data = Array2::from_shape_vec((rows, cols), flat)
            .map_err(|e| NumericsError::DimensionMismatch(e.to_string()))?;
        Self::new(data)
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows > 0 && cols > 0, "matrix dimensions must be positive");
        Self {
            data: Array2::zeros((rows, cols)),
        }
    }

    pub fn identity(n: usize) -> Self {
        assert!(n > 0, "matrix dimensions must be positive");
        Self {
            data: Array2::eye(n),
        }
    }

    pub fn rows(&self) -> usize {
        self.data.nrows()
    }

    pub fn cols(&self) -> usize {
        self.data.ncols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[[i, j]]
    }

    pub fn array(&self) -> &Array2<f64> {
        &self.data
    }

    pub fn into_array(self) -> Array2<f64> {
        self.data
    }

    pub fn to_flat_row_major(&self) -> Vec<f64> {
        self.data.iter().copied().collect()
    }

    pub fn dot(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols(), rhs.rows(), "matmul dimension mismatch");
        Matrix::from_valid(self.data.dot(&rhs.data))
    }

    pub fn dot_vec(&self, v: ArrayView1<f64>) -> Array1<f64> {
        assert_eq!(self.cols(), v.len(), "matvec dimension mismatch");
        self.data.dot(&v)
    }

    pub fn t(&self) -> Matrix {
        Matrix::from_valid(self.data.t().to_owned())
    }

    pub fn scale(&self, s: f64) -> Matrix {
        Matrix::from_valid(&self.data * s)
    }

    pub fn add(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        Matrix::from_valid(&self.data + &rhs.data)
    }

    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        assert_eq!((self.rows(), self.cols()), (rhs.rows(), rhs.cols()));
        Matrix::from_valid(&self.data - &rhs.data)
    }

    pub fn frob_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        if self.rows() != self.cols() {
            return false;
        }
        for i in 0..self.rows() {
            for j in (i + 1)..self.cols() {
                if (self.data[[i, j]] - self.data[[j, i]]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Ridge least-squares solution of min_K ||Yf - K Yp||_F^2 + lambda ||K||_F^2.
#[derive(Debug, Clone)]
pub struct RidgeSolution {
    pub coefficients: Matrix,
    pub objective_value: f64,
    pub residual_gradient_norm: f64,
}

/// Solves the ridge problem through the normal equations
/// K = Yf Yp^T (Yp Yp^T + lambda I)^{-1}, Cholesky when lambda > 0 and an
/// eigendecomposition-based inverse when lambda = 0.
pub fn ridge_lstsq(yf: &Matrix, yp: &Matrix, lambda: f64) -> Result<RidgeSolution> {
    if yf.cols() != yp.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "Yf has {} columns, Yp has {}",
            yf.cols(),
            yp.cols()
        )));
    }
    if lambda < 0.0 || !lambda.is_finite() {
        return Err(NumericsError::DimensionMismatch(
            "lambda must be a nonnegative finite scalar".into(),
        ));
    }
    let q = yp.rows();
    let gram = yp.dot(&yp.t()); // q x q, symmetric PSD
    let rhs = yf.dot(&yp.t()); // n x q

    let coefficients = if lambda > 0.0 {
        let mut reg = gram.into_array();
        for i in 0..q {
            reg[[i, i]] += lambda;
        }
        // solve K (G + lambda I) = rhs  =>  (G + lambda I) K^T = rhs^T
        let chol = cholesky(&reg).ok_or(NumericsError::SingularSystem)?;
        let kt = cholesky_solve_multi(&chol, &rhs.t().into_array());
        Matrix::from_valid(kt.t().to_owned())
    } else {
        let (eigvals, eigvecs) = eig_sym(&gram)?;
        let max_ev = eigvals.last().copied().unwrap_or(0.0).max(0.0);
        let cutoff = 1e-10 * max_ev.max(f64::MIN_POSITIVE);
        if eigvals.iter().any(|&ev| ev <= cutoff) {
            return Err(NumericsError::SingularSystem);
        }
        // G^{-1} = U diag(1/ev) U^T
        let u = eigvecs.array();
        let mut inv = Array2::<f64>::zeros((q, q));
        for (k, &ev) in eigvals.iter().enumerate() {
            let col = u.column(k);
            let w = 1.0 / ev;
            for i in 0..q {
                for j in 0..q {
                    inv[[i, j]] += w * col[i] * col[j];
                }
            }
        }
        rhs.dot(&Matrix::from_valid(inv))
    };

    let residual = coefficients.dot(yp).sub(yf);
    let objective_value =
        residual.frob_norm().powi(2) + lambda * coefficients.frob_norm().powi(2);
    let grad = residual
        .dot(&yp.t())
        .scale(2.0)
        .add(&coefficients.scale(2.0 * lambda));
    Ok(RidgeSolution {
        coefficients,
        objective_value,
        residual_gradient_norm: grad.frob_norm(),
    })
}

/// Moore-Penrose pseudo-inverse via one-sided Jacobi SVD. Singular values
/// below `rel_tol * sigma_max` are treated as zero.
pub fn pseudo_inverse(m: &Matrix, rel_tol: f64) -> Matrix {
    let (u, sigma, v) = svd(m);
    let smax = sigma.iter().cloned().fold(0.0, f64::max);
    let cutoff = rel_tol * smax;
    // pinv = V diag(sigma^+) U^T
    let rank_cols: Vec<usize> = (0..sigma.len())
        .filter(|&j| sigma[j] > cutoff && sigma[j] > 0.0)
        .collect();
    let mut out = Array2::<f64>::zeros((m.cols(), m.rows()));
    for &j in &rank_cols {
        let w = 1.0 / sigma[j];
        let vj = v.array().column(j);
        let uj = u.array().column(j);
        for r in 0..m.cols() {
            for c in 0..m.rows() {
                out[[r, c]] += w * vj[r] * uj[c];
            }
        }
    }
    Matrix::from_valid(out)
}

/// Default relative cutoff for [`pseudo_inverse`].
pub const PINV_DEFAULT_TOL: f64 = 1e-12;

/// Thin SVD `m = U diag(sigma) V^T` with singular values sorted descending.
/// U is m.rows x k, V is m.cols x k with k = min(rows, cols).
pub fn svd(m: &Matrix) -> (Matrix, Vec<f64>, Matrix) {
    if m.rows() >= m.cols() {
        svd_tall(m.array())
    } else {
        let (u, s, v) = svd_tall(&m.array().t().to_owned());
        (v, s, u)
    }
}

fn svd_tall(a: &Array2<f64>) -> (Matrix, Vec<f64>, Matrix) {
    let rows = a.nrows();
    let cols = a.ncols();
    let mut work = a.clone();
    let mut v = Array2::<f64>::eye(cols);
    let eps = 1e-15;
    for _sweep in 0..60 {
        let mut converged = true;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let mut alpha = 0.0;
                let mut beta = 0.0;
                let mut gamma = 0.0;
                for i in 0..rows {
                    let wp = work[[i, p]];
                    let wq = work[[i, q]];
                    alpha += wp * wp;
                    beta += wq * wq;
                    gamma += wp * wq;
                }
                if gamma.abs() <= eps * (alpha * beta).sqrt() || gamma == 0.0 {
                    continue;
                }
                converged = false;
                let zeta = (beta - alpha) / (2.0 * gamma);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for i in 0..rows {
                    let wp = work[[i, p]];
                    let wq = work[[i, q]];
                    work[[i, p]] = c * wp - s * wq;
                    work[[i, q]] = s * wp + c * wq;
                }
                for i in 0..cols {
                    let vp = v[[i, p]];
                    let vq = v[[i, q]];
                    v[[i, p]] = c * vp - s * vq;
                    v[[i, q]] = s * vp + c * vq;
                }
            }
        }
        if converged {
            break;
        }
    }
    let mut order: Vec<usize> = (0..cols).collect();
    let norms: Vec<f64> = (0..cols)
        .map(|j| work.column(j).iter().map(|x| x * x).sum::<f64>().sqrt())
        .collect();
    order.sort_by(|&a, &b| norms[b].partial_cmp(&norms[a]).unwrap());
    let mut u = Array2::<f64>::zeros((rows, cols));
    let mut vs = Array2::<f64>::zeros((cols, cols));
    let mut sigma = Vec::with_capacity(cols);
    for (slot, &j) in order.iter().enumerate() {
        let s = norms[j];
        sigma.push(s);
        if s > 0.0 {
            for i in 0..rows {
                u[[i, slot]] = work[[i, j]] / s;
            }
        }
        for i in 0..cols {
            vs[[i, slot]] = v[[i, j]];
        }
    }
    (
        Matrix::from_valid(u),
        sigma,
        Matrix::from_valid(vs),
    )
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations. Returns
/// eigenvalues ascending with matching orthonormal eigenvector columns.
pub fn eig_sym(m: &Matrix) -> Result<(Vec<f64>, Matrix)> {
    const SYM_TOL: f64 = 1e-10;
    if m.rows() != m.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "eig_sym needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    if !m.is_symmetric(SYM_TOL) {
        return Err(NumericsError::NotSymmetric(SYM_TOL));
    }
    let n = m.rows();
    let mut a = m.array().clone();
    // symmetrize exactly so rotations stay consistent
    for i in 0..n {
        for j in (i + 1)..n {
            let avg = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = avg;
            a[[j, i]] = avg;
        }
    }
    let mut v = Array2::<f64>::eye(n);
    let frob = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let stop = 1e-14 * frob.max(f64::MIN_POSITIVE);
    for _sweep in 0..60 {
        let mut off = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                off += 2.0 * a[[i, j]] * a[[i, j]];
            }
        }
        if off.sqrt() <= stop {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[[p, q]];
                if apq.abs() <= stop / (n as f64) {
                    continue;
                }
                let tau = (a[[q, q]] - a[[p, p]]) / (2.0 * apq);
                let t = if tau == 0.0 {
                    1.0
                } else {
                    tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[[k, p]];
                    let akq = a[[k, q]];
                    a[[k, p]] = c * akp - s * akq;
                    a[[k, q]] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[[p, k]];
                    let aqk = a[[q, k]];
                    a[[p, k]] = c * apk - s * aqk;
                    a[[q, k]] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[[i, i]].partial_cmp(&a[[j, j]]).unwrap());
    let eigenvalues: Vec<f64> = order.iter().map(|&i| a[[i, i]]).collect();
    let mut vectors = Array2::<f64>::zeros((n, n));
    for (slot, &j) in order.iter().enumerate() {
        for i in 0..n {
            vectors[[i, slot]] = v[[i, j]];
        }
    }
    Ok((eigenvalues, Matrix::from_valid(vectors)))
}

/// [K v, K^2 v, ..., K^h v] by repeated multiplication.
pub fn iterate_operator(
    k: &Matrix,
    v: ArrayView1<f64>,
    h: usize,
) -> Result<Vec<Array1<f64>>> {
    if k.rows() != k.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "operator must be square, got {}x{}",
            k.rows(),
            k.cols()
        )));
    }
    if v.len() != k.cols() {
        return Err(NumericsError::DimensionMismatch(format!(
            "vector length {} does not match operator size {}",
            v.len(),
            k.cols()
        )));
    }
    let mut out = Vec::with_capacity(h);
    let mut cur = v.to_owned();
    for _ in 0..h {
        cur = k.array().dot(&cur);
        out.push(cur.clone());
    }
    Ok(out)
}

/// Lower-triangular Cholesky factor of an SPD matrix, or None if a pivot
/// fails positivity.
pub(crate) fn cholesky(a: &Array2<f64>) -> Option<Array2<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for i in 0..n {
        for j in 0..=i {
            let mut sum = a[[i, j]];
            for k in 0..j {
                sum -= l[[i, k]] * l[[j, k]];
            }
            if i == j {
                if sum <= 0.0 || !sum.is_finite() {
                    return None;
                }
                l[[i, j]] = sum.sqrt();
            } else {
                l[[i, j]] = sum / l[[j, j]];
            }
        }
    }
    Some(l)
}

/// Solves L L^T X = B column-wise given the Cholesky factor L.
pub(crate) fn cholesky_solve_multi(l: &Array2<f64>, b: &Array2<f64>) -> Array2<f64> {
    let n = l.nrows();
    let mut x = b.clone();
    for col in 0..b.ncols() {
        // forward substitution L y = b
        for i in 0..n {
            let mut sum = x[[i, col]];
            for k in 0..i {
                sum -= l[[i, k]] * x[[k, col]];
            }
            x[[i, col]] = sum / l[[i, i]];
        }
        // back substitution L^T x = y
        for i in (0..n).rev() {
            let mut sum = x[[i, col]];
            for k in (i + 1)..n {
                sum -= l[[k, i]] * x[[k, col]];
            }
            x[[i, col]] = sum / l[[i, i]];
        }
    }
    x
}

/// Dense LU solve with partial pivoting; None when numerically singular.
pub(crate) fn lu_solve(a: &Array2<f64>, b: &Array1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    assert_eq!(n, b.len());
    let mut m = a.clone();
    let mut x = b.clone();
    for col in 0..n {
        let mut pivot = col;
        for r in (col + 1)..n {
            if m[[r, col]].abs() > m[[pivot, col]].abs() {
                pivot = r;
            }
        }
        if m[[pivot, col]].abs() < 1e-300 {
            return None;
        }
        if pivot != col {
            for c in 0..n {
                m.swap([col, c], [pivot, c]);
            }
            x.swap(col, pivot);
        }
        for r in (col + 1)..n {
            let f = m[[r, col]] / m[[col, col]];
            if f == 0.0 {
                continue;
            }
            for c in col..n {
                m[[r, c]] -= f * m[[col, c]];
            }
            x[r] -= f * x[col];
        }
    }
    for i in (0..n).rev() {
        let mut sum = x[i];
        for c in (i + 1)..n {
            sum -= m[[i, c]] * x[c];
        }
        x[i] = sum / m[[i, i]];
    }
    Some(x)
}

//! Dense helpers. Factorizations go through `faer`; arrays stay in `ndarray`.

use faer::Mat;
use ndarray::{Array1, Array2, ArrayView1, ArrayView2, Axis};

use crate::error::{Error, Result};

/// Eigenvalues (ascending) and column eigenvectors of a symmetric matrix.
pub fn sym_eigen(a: &Array2<f64>) -> Result<(Array1<f64>, Array2<f64>)> {
    if a.nrows() != a.ncols() {
        return Err(Error::Dimension(format!(
            "matrix is {}x{}, expected square",
            a.nrows(),
            a.ncols()
        )));
    }
    if a.nrows() == 0 {
        return Ok((Array1::zeros(0), Array2::zeros((0, 0))));
    }
    let n = a.nrows();
    let m = to_faer(a.view());
    let e = m
        .self_adjoint_eigen(faer::Side::Lower)
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let s = e.S();
    let u = e.U();
    let vals = Array1::from_shape_fn(n, |i| s[i]);
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| u[(i, j)]);
    Ok((vals, vecs))
}

fn to_faer(a: ArrayView2<f64>) -> Mat<f64> {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Solves the square system `a x = b` by partial-pivot LU.
pub fn solve(a: &Array2<f64>, b: &Array1<f64>) -> Result<Array1<f64>> {
    use faer::linalg::solvers::Solve;
    let n = a.nrows();
    if a.ncols() != n || b.len() != n {
        return Err(Error::Dimension("solve needs a square system".into()));
    }
    let lu = to_faer(a.view()).partial_piv_lu();
    let rhs = Mat::from_fn(n, 1, |i, _| b[i]);
    let x = lu.solve(&rhs);
    Ok(Array1::from_shape_fn(n, |i| x[(i, 0)]))
}

/// Thin SVD `a = U diag(s) Vᵀ` with singular values in decreasing order.
pub fn svd(a: &Array2<f64>) -> Result<(Array2<f64>, Array1<f64>, Array2<f64>)> {
    let (m, n) = a.dim();
    let k = m.min(n);
    if k == 0 {
        return Ok((Array2::zeros((m, 0)), Array1::zeros(0), Array2::zeros((n, 0))));
    }
    let d = to_faer(a.view())
        .thin_svd()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    let (u, s, v) = (d.U(), d.S(), d.V());
    Ok((
        Array2::from_shape_fn((m, k), |(i, j)| u[(i, j)]),
        Array1::from_shape_fn(k, |i| s[i]),
        Array2::from_shape_fn((n, k), |(i, j)| v[(i, j)]),
    ))
}

/// Dense product through faer's blocked kernels; noticeably faster than
/// `ndarray::dot` at the 10³ sizes used for projectors.
pub fn matmul(a: ArrayView2<f64>, b: ArrayView2<f64>) -> Array2<f64> {
    assert_eq!(a.ncols(), b.nrows(), "matmul shape mismatch");
    let c = to_faer(a) * to_faer(b);
    Array2::from_shape_fn((c.nrows(), c.ncols()), |(i, j)| c[(i, j)])
}

/// Largest singular value.
pub fn spectral_norm(a: ArrayView2<f64>) -> Result<f64> {
    if a.is_empty() {
        return Ok(0.0);
    }
    let s = to_faer(a)
        .singular_values()
        .map_err(|e| Error::Eigen(format!("{e:?}")))?;
    Ok(s.iter().fold(0.0_f64, |m, v| m.max(*v)))
}

pub fn max_abs(a: ArrayView2<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Max abs asymmetry relative to the max abs entry.
pub fn asymmetry(a: ArrayView2<f64>) -> f64 {
    let scale = max_abs(a);
    if scale == 0.0 {
        return 0.0;
    }
    let mut worst = 0.0_f64;
    for i in 0..a.nrows() {
        for j in 0..i {
            worst = worst.max((a[[i, j]] - a[[j, i]]).abs());
        }
    }
    worst / scale
}

/// Replaces `a` by `(a + aᵀ)/2`.
pub fn symmetrize(a: &mut Array2<f64>) {
    let n = a.nrows();
    for i in 0..n {
        for j in 0..i {
            let m = 0.5 * (a[[i, j]] + a[[j, i]]);
            a[[i, j]] = m;
            a[[j, i]] = m;
        }
    }
}

/// Orthonormal basis for the column span of `a` (columns with norm below `tol`
/// after projection are dropped). Two Gram-Schmidt passes.
pub fn orthonormal_columns(a: &Array2<f64>, tol: f64) -> Array2<f64> {
    let mut basis: Vec<Array1<f64>> = Vec::new();
    for col in a.axis_iter(Axis(1)) {
        let mut v = col.to_owned();
        let start = v.dot(&v).sqrt();
        for _ in 0..2 {
            for b in &basis {
                let p = b.dot(&v);
                v.scaled_add(-p, b);
            }
        }
        let norm = v.dot(&v).sqrt();
        if norm > tol * start.max(f64::MIN_POSITIVE) && norm > 0.0 {
            v /= norm;
            basis.push(v);
        }
    }
    let mut out = Array2::zeros((a.nrows(), basis.len()));
    for (j, b) in basis.iter().enumerate() {
        out.column_mut(j).assign(b);
    }
    out
}

/// Eigenvectors of `a` whose eigenvalues are at least `threshold`, as columns.
pub fn eigvecs_at_or_above(vals: &Array1<f64>, vecs: &Array2<f64>, threshold: f64) -> Array2<f64> {
    let keep: Vec<usize> = (0..vals.len()).filter(|&i| vals[i] >= threshold).collect();
    vecs.select(Axis(1), &keep)
}

/// Polishes an approximate eigenpair of a symmetric matrix by a few steps of
/// Rayleigh-quotient inverse iteration; dense eigenvectors of the channel
/// matrices carry errors of order `ε‖A‖`, far above the orbital tolerances.
pub fn refine_eigenpair(a: &Array2<f64>, x: ArrayView1<f64>, steps: usize) -> Result<(f64, Array1<f64>)> {
    let start = x.to_owned();
    let mut x = &start / start.dot(&start).sqrt();
    let mut theta = x.dot(&a.dot(&x));
    for _ in 0..steps {
        let mut shifted = a.clone();
        for i in 0..shifted.nrows() {
            shifted[[i, i]] -= theta;
        }
        let y = solve(&shifted, &x)?;
        let n = y.dot(&y).sqrt();
        if !n.is_finite() || n == 0.0 {
            break;
        }
        x = y / n;
        theta = x.dot(&a.dot(&x));
    }
    if x.dot(&start) < 0.0 {
        x.mapv_inplace(|v| -v);
    }
    Ok((theta, x))
}

//! Block Davidson iteration for the lowest eigenpairs inside a spectral window
//! of a symmetric operator, preconditioned by an exactly invertible
//! tridiagonal approximation.

use ndarray::Array2;

use super::dense::sym_eigen;
use super::norm;
use super::tridiag::SymTridiagonal;
use crate::error::{Error, Result};

pub trait SymOperator {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Clone, Copy, Debug)]
pub struct DavidsonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_basis: usize,
}

impl Default for DavidsonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-11,
            max_iter: 300,
            max_basis: 48,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Eigenpairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
    pub converged: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    y.iter_mut().zip(x).for_each(|(yi, xi)| *yi += alpha * xi);
}


/// Orthogonalizes `v` against `basis` (two passes) and normalizes it. Returns
/// `false` when nothing independent is left.
fn orthonormalize_against(basis: &[Vec<f64>], v: &mut [f64]) -> bool {
    let start = norm(v);
    if start == 0.0 || !start.is_finite() {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= start);
    for _ in 0..2 {
        for b in basis {
            let p = dot(b, v);
            axpy(-p, b, v);
        }
    }
    let n = norm(v);
    if n < 1e-10 {
        return false;
    }
    v.iter_mut().for_each(|x| *x /= n);
    true
}

/// Lowest `count` eigenpairs of `op` with eigenvalues in the open window
/// `(lo, hi)`. `guesses` seed the search space and should span good
/// approximations (at least `count` of them).
pub fn lowest_in_window(
    op: &dyn SymOperator,
    precond: &SymTridiagonal,
    count: usize,
    lo: f64,
    hi: f64,
    guesses: &[Vec<f64>],
    opts: DavidsonOptions,
) -> Result<Eigenpairs> {
    let n = op.dim();
    if count == 0 {
        return Ok(Eigenpairs {
            values: vec![],
            vectors: vec![],
            residuals: vec![],
            converged: true,
        });
    }
    let mut v: Vec<Vec<f64>> = Vec::new();
    let mut av: Vec<Vec<f64>> = Vec::new();
    let push = |v: &mut Vec<Vec<f64>>, av: &mut Vec<Vec<f64>>, mut x: Vec<f64>| {
        if orthonormalize_against(v, &mut x) {
            let mut y = vec![0.0; n];
            op.apply(&x, &mut y);
            v.push(x);
            av.push(y);
            true
        } else {
            false
        }
    };
    for g in guesses {
        push(&mut v, &mut av, g.clone());
    }
    if v.is_empty() {
        return Err(Error::Eigen("no usable starting vectors".into()));
    }

    let mut best: Option<Eigenpairs> = None;
    for _iter in 0..opts.max_iter {
        let k = v.len();
        let mut g = Array2::<f64>::zeros((k, k));
        for i in 0..k {
            for j in 0..=i {
                let s = 0.5 * (dot(&v[i], &av[j]) + dot(&v[j], &av[i]));
                g[[i, j]] = s;
                g[[j, i]] = s;
            }
        }
        let (theta, s) = sym_eigen(&g)?;
        let in_window: Vec<usize> = (0..k).filter(|&i| theta[i] > lo && theta[i] < hi).collect();
        let selected: Vec<usize> = in_window.iter().copied().take(count).collect();

        let mut values = Vec::with_capacity(selected.len());
        let mut vectors = Vec::with_capacity(selected.len());
        let mut residuals = Vec::with_capacity(selected.len());
        let mut resid_vecs = Vec::with_capacity(selected.len());
        for &idx in &selected {
            let mut x = vec![0.0; n];
            let mut ax = vec![0.0; n];
            for j in 0..k {
                axpy(s[[j, idx]], &v[j], &mut x);
                axpy(s[[j, idx]], &av[j], &mut ax);
            }
            let th = theta[idx];
            let r: Vec<f64> = ax.iter().zip(&x).map(|(a, xi)| a - th * xi).collect();
            values.push(th);
            residuals.push(norm(&r));
            vectors.push(x);
            resid_vecs.push(r);
        }
        let done = selected.len() == count && residuals.iter().all(|r| *r < opts.tol);
        let current = Eigenpairs {
            values,
            vectors,
            residuals,
            converged: done,
        };
        if done {
            return Ok(current);
        }

        // restart when the basis grows too large
        if k + count > opts.max_basis {
            let keep: Vec<usize> = in_window.iter().copied().take(count + 2).collect();
            let mut nv = Vec::new();
            let mut nav = Vec::new();
            for &idx in &keep {
                let mut x = vec![0.0; n];
                for j in 0..k {
                    axpy(s[[j, idx]], &v[j], &mut x);
                }
                push(&mut nv, &mut nav, x);
            }
            if nv.is_empty() {
                return Err(Error::Eigen("Davidson restart lost the search space".into()));
            }
            v = nv;
            av = nav;
        }

        let mut added = false;
        for (i, r) in current.residuals.iter().enumerate() {
            if *r < opts.tol {
                continue;
            }
            // The raw residual is never added: near the origin it carries
            // roundoff amplified by the operator norm, which the shifted solve
            // damps out.
            let t = precond.solve_shifted(current.values[i], &resid_vecs[i]);
            added |= push(&mut v, &mut av, t);
        }
        if current.values.len() < count {
            // window not yet populated: widen the space with preconditioned guesses
            let target = 0.5 * (lo + hi);
            for g in guesses {
                let t = precond.solve_shifted(target, g);
                added |= push(&mut v, &mut av, t);
            }
        }
        best = Some(current);
        if !added {
            break;
        }
    }
    match best {
        Some(b) if b.values.len() == count => Ok(b),
        _ => Err(Error::Eigen(format!(
            "fewer than {count} eigenvalues found in ({lo}, {hi})"
        ))),
    }
}

//! Multipole Coulomb kernels `r_<^k / r_>^{k+1}` on channel spaces.
//!
//! A density is passed in coordinate form, `n_f = x_f y_f`, so the quadrature
//! weight is already included. The kernel has a kink at `s = r`; each side is
//! integrated with the trapezoid rule in `ln r` plus Gregory-type end
//! corrections next to the kink. On the staggered Dirac layout the other
//! sub-grid sees the kink half a step from its nearest samples and uses the
//! corresponding midpoint-rule corrections.

use std::sync::OnceLock;

use ndarray::{Array1, Array2};

use super::grid::RadialGrid;
use super::space::{ChannelSpace, Layout};
use crate::linalg::dense::solve;

/// Number of samples on each side of the kink that receive a correction.
const ORDER: usize = 6;

struct Corrections {
    /// same sub-grid, offset `d` (entry 0 is the kink node itself, counted once)
    aligned: [f64; ORDER],
    /// other sub-grid, offset `d + 1/2`
    staggered: [f64; ORDER],
}

fn bernoulli(m: usize) -> f64 {
    const B: [f64; 9] = [
        1.0,
        -0.5,
        1.0 / 6.0,
        0.0,
        -1.0 / 30.0,
        0.0,
        1.0 / 42.0,
        0.0,
        -1.0 / 30.0,
    ];
    B[m]
}

/// End weights `d_j` such that `Σ_{j≥0} (1 + d_j) g(j + σ)` integrates a smooth
/// `g` on `[0, ∞)` to order `ORDER` (Euler-Maclaurin with offset σ).
fn end_weights(sigma: f64) -> [f64; ORDER] {
    let mut a = Array2::<f64>::zeros((ORDER, ORDER));
    let mut b = Array1::<f64>::zeros(ORDER);
    for q in 0..ORDER {
        for j in 0..ORDER {
            a[[q, j]] = (j as f64 + sigma).powi(q as i32);
        }
        // B_{q+1}(σ) for σ ∈ {0, 1/2}
        let m = q + 1;
        let bm = if sigma == 0.0 {
            bernoulli(m)
        } else {
            (2f64.powi(1 - m as i32) - 1.0) * bernoulli(m)
        };
        b[q] = bm / m as f64;
    }
    let d = solve(&a, &b).expect("Vandermonde system is nonsingular");
    let mut out = [0.0; ORDER];
    out.iter_mut().zip(d.iter()).for_each(|(o, v)| *o = *v);
    out
}

fn corrections() -> &'static Corrections {
    static C: OnceLock<Corrections> = OnceLock::new();
    C.get_or_init(|| {
        let mut aligned = end_weights(0.0);
        // relative to the trapezoid rule, whose end weight is 1/2
        aligned[0] += 0.5;
        // the kink sample receives the correction from both sides
        aligned[0] *= 2.0;
        Corrections {
            aligned,
            staggered: end_weights(0.5),
        }
    })
}

fn kern(k: i32, r: f64, s: f64) -> f64 {
    if r < s {
        (r / s).powi(k) / s
    } else {
        (s / r).powi(k) / r
    }
}

/// Neighbour offsets and weight corrections `(offset, a - 1)` for the layout.
fn stencil(layout: Layout) -> Vec<(usize, f64)> {
    let c = corrections();
    let mut out = Vec::new();
    match layout {
        Layout::Schrodinger => {
            for d in 0..ORDER {
                out.push((d, c.aligned[d]));
            }
        }
        Layout::Dirac => {
            for d in 0..ORDER {
                out.push((2 * d, c.aligned[d]));
                out.push((2 * d + 1, c.staggered[d]));
            }
        }
    }
    out
}

/// `(S^k n)_f = Σ_g a_{fg} r_<^k/r_>^{k+1} n_g` in linear time.
pub fn apply_kernel(space: &ChannelSpace, k: u32, n: &[f64]) -> Vec<f64> {
    let r = space.radii();
    let dim = r.len();
    assert_eq!(n.len(), dim, "density must live on the channel space");
    let k = k as i32;
    let mut out = vec![0.0; dim];

    // plain part: Σ_{g<f} r_g^k n_g / r_f^{k+1} + Σ_{g>f} r_f^k n_g / r_g^{k+1} + n_f / r_f
    let mut acc = 0.0;
    for f in 0..dim {
        out[f] = acc / r[f].powi(k + 1) + n[f] / r[f];
        acc += r[f].powi(k) * n[f];
    }
    acc = 0.0;
    for f in (0..dim).rev() {
        out[f] += acc * r[f].powi(k);
        acc += n[f] / r[f].powi(k + 1);
    }

    for (off, w) in stencil(space.layout()) {
        if off == 0 {
            for f in 0..dim {
                out[f] += w * n[f] / r[f];
            }
            continue;
        }
        for f in 0..dim {
            if f >= off {
                let g = f - off;
                out[f] += w * kern(k, r[f], r[g]) * n[g];
            }
            if f + off < dim {
                let g = f + off;
                out[f] += w * kern(k, r[f], r[g]) * n[g];
            }
        }
    }
    out
}

/// Dense symmetric kernel matrix with the same weights as [`apply_kernel`].
pub fn kernel_matrix(space: &ChannelSpace, k: u32) -> Array2<f64> {
    let r = space.radii();
    let dim = r.len();
    let ki = k as i32;
    let mut s = Array2::<f64>::zeros((dim, dim));
    for f in 0..dim {
        for g in 0..=f {
            let v = kern(ki, r[f], r[g]);
            s[[f, g]] = v;
            s[[g, f]] = v;
        }
    }
    for (off, w) in stencil(space.layout()) {
        for f in 0..dim {
            if f + off < dim {
                let g = f + off;
                let v = w * kern(ki, r[f], r[g]);
                s[[f, g]] += v;
                if off != 0 {
                    s[[g, f]] += v;
                }
            }
        }
    }
    s
}

/// Slater integral `R^k = Σ_f a_f (S^k b)_f` for coordinate densities `a`, `b`.
pub fn slater_integral(space: &ChannelSpace, k: u32, a: &[f64], b: &[f64]) -> f64 {
    let sb = apply_kernel(space, k, b);
    a.iter().zip(&sb).map(|(x, y)| x * y).sum()
}

/// Screening function `Y^k(f; r) = r ∫ f(s) r_<^k / r_>^{k+1} ds` sampled on the
/// grid nodes, for `f` sampled on the nodes.
pub fn slater_y(k: u32, f: &[f64], grid: &RadialGrid) -> Vec<f64> {
    assert_eq!(f.len(), grid.len(), "samples must match the grid");
    let space = ChannelSpace::new(grid, Layout::Schrodinger);
    let n: Vec<f64> = f.iter().zip(space.metric()).map(|(v, w)| v * w).collect();
    let pot = apply_kernel(&space, k, &n);
    pot.iter().zip(grid.nodes()).map(|(p, r)| p * r).collect()
}

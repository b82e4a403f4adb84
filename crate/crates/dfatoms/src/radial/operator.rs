//! Channel operators: discretized Dirac and Schrödinger Hamiltonians and their
//! mean-field extensions.
//!
//! The Dirac operator is stored shifted by `-c²`, so its stored eigenvalues are
//! binding energies `ε - c²` and no precision is lost at large `c`. The
//! first-order factor `B ≈ d/dr + κ/r` maps node values to midpoint values;
//! the Dirac matrix is `[[V + c², c Bᵀ], [c B, V - c²]]`, tridiagonal in the
//! interleaved ordering, and the Schrödinger matrix is `½ BᵀB + V`.

use std::sync::Arc;

use ndarray::{Array1, Array2};
use serde::{Deserialize, Serialize};

use super::coulomb::{apply_kernel, kernel_matrix};
use super::grid::RadialGrid;
use super::space::{Channel, ChannelSpace, Layout};
use crate::error::{Error, Result};
use crate::linalg::dense::{max_abs, sym_eigen};
use crate::linalg::{lowest_in_window, DavidsonOptions, Eigenpairs, SymOperator, SymTridiagonal};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OperatorKind {
    Dirac,
    Schrodinger,
    MeanFieldDirac,
    MeanFieldSchrodinger,
}

impl OperatorKind {
    pub fn is_dirac(&self) -> bool {
        matches!(self, OperatorKind::Dirac | OperatorKind::MeanFieldDirac)
    }
}

/// Nonlocal term `-coefficient · diag(o) S^k diag(o)`.
#[derive(Clone, Debug)]
pub struct ExchangeTerm {
    pub k: u32,
    pub coefficient: f64,
    pub orbital: Vec<f64>,
}

#[derive(Clone, Debug)]
enum Repr {
    Structured {
        space: Arc<ChannelSpace>,
        local: SymTridiagonal,
        exchange: Vec<ExchangeTerm>,
        /// rank-one terms `-coefficient · |o⟩⟨o|`
        rank_one: Vec<(f64, Vec<f64>)>,
    },
    Dense(Array2<f64>),
}

#[derive(Clone, Debug)]
pub struct ChannelOperator {
    channel: Channel,
    kind: OperatorKind,
    c: Option<f64>,
    shift: f64,
    repr: Repr,
}

/// First-order factor `B` as its two diagonals: `B[i,i] = lower[i]`,
/// `B[i,i+1] = upper[i]`.
fn factor_diagonals(grid: &RadialGrid, kappa: i32) -> (Vec<f64>, Vec<f64>) {
    let h = grid.step();
    let mids = grid.midpoints();
    let a = (kappa as f64 - 0.5) / 2.0;
    let lower = mids.iter().map(|rm| (-1.0 / h + a) / rm).collect();
    let upper = mids[..mids.len() - 1].iter().map(|rm| (1.0 / h + a) / rm).collect();
    (lower, upper)
}

/// `B x` for node coordinates `x`, giving midpoint coordinates.
pub fn apply_factor(grid: &RadialGrid, kappa: i32, x: &[f64]) -> Vec<f64> {
    let (lo, up) = factor_diagonals(grid, kappa);
    let m = lo.len();
    (0..m)
        .map(|i| lo[i] * x[i] + if i + 1 < m { up[i] * x[i + 1] } else { 0.0 })
        .collect()
}

/// Dense factor `B` (M×M) approximating `d/dr + κ/r` from nodes to midpoints.
pub fn factor_matrix(grid: &RadialGrid, kappa: i32) -> Array2<f64> {
    let m = grid.len();
    let (lo, up) = factor_diagonals(grid, kappa);
    let mut b = Array2::zeros((m, m));
    for i in 0..m {
        b[[i, i]] = lo[i];
        if i + 1 < m {
            b[[i, i + 1]] = up[i];
        }
    }
    b
}

/// Potential samples at every coordinate of the space. Node-only input is
/// carried to the midpoints by interpolating `r V(r)` linearly in `ln r`.
fn potential_on_space(space: &ChannelSpace, v: &[f64]) -> Result<Vec<f64>> {
    let grid = space.grid();
    let m = grid.len();
    if v.len() == space.dim() {
        return Ok(v.to_vec());
    }
    if v.len() != m {
        return Err(Error::Dimension(format!(
            "potential has {} samples, expected {} or {}",
            v.len(),
            m,
            space.dim()
        )));
    }
    match space.layout() {
        Layout::Schrodinger => Ok(v.to_vec()),
        Layout::Dirac => {
            let r = grid.nodes();
            let mids = grid.midpoints();
            let mut out = vec![0.0; 2 * m];
            for i in 0..m {
                out[2 * i] = v[i];
                let rv = if i + 1 < m {
                    0.5 * (r[i] * v[i] + r[i + 1] * v[i + 1])
                } else {
                    r[i] * v[i]
                };
                out[2 * i + 1] = rv / mids[i];
            }
            Ok(out)
        }
    }
}

pub fn dirac_channel_matrix(grid: &RadialGrid, kappa: i32, c: f64, v: &[f64]) -> Result<ChannelOperator> {
    let channel = Channel::dirac(kappa)?;
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::InvalidInput(format!("speed of light must be positive, got {c}")));
    }
    let space = Arc::new(ChannelSpace::new(grid, Layout::Dirac));
    let v = potential_on_space(&space, v)?;
    let m = grid.len();
    let c2 = c * c;
    let (lo, up) = factor_diagonals(grid, kappa);
    let mut diag = vec![0.0; 2 * m];
    let mut off = vec![0.0; 2 * m - 1];
    for i in 0..m {
        diag[2 * i] = v[2 * i];
        diag[2 * i + 1] = v[2 * i + 1] - 2.0 * c2;
        off[2 * i] = c * lo[i];
        if i + 1 < m {
            off[2 * i + 1] = c * up[i];
        }
    }
    Ok(ChannelOperator {
        channel,
        kind: OperatorKind::Dirac,
        c: Some(c),
        shift: c2,
        repr: Repr::Structured {
            space,
            local: SymTridiagonal::new(diag, off),
            exchange: Vec::new(),
            rank_one: Vec::new(),
        },
    })
}

pub fn schrodinger_channel_matrix(grid: &RadialGrid, l: i64, v: &[f64]) -> Result<ChannelOperator> {
    let channel = Channel::schrodinger(l)?;
    let space = Arc::new(ChannelSpace::new(grid, Layout::Schrodinger));
    let v = potential_on_space(&space, v)?;
    let (lo, up) = factor_diagonals(grid, channel.factor_kappa());
    let m = grid.len();
    let mut diag = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    for j in 0..m {
        let mut s = lo[j] * lo[j];
        if j >= 1 {
            s += up[j - 1] * up[j - 1];
        }
        diag[j] = 0.5 * s + v[j];
        if j + 1 < m {
            off[j] = 0.5 * lo[j] * up[j];
        }
    }
    Ok(ChannelOperator {
        channel,
        kind: OperatorKind::Schrodinger,
        c: None,
        shift: 0.0,
        repr: Repr::Structured {
            space,
            local: SymTridiagonal::new(diag, off),
            exchange: Vec::new(),
            rank_one: Vec::new(),
        },
    })
}

/// Per-component kinetic matrix `blockdiag(BᵀB, BBᵀ)` in interleaved ordering.
pub fn kinetic_matrix(grid: &RadialGrid, kappa: i32) -> Array2<f64> {
    let b = factor_matrix(grid, kappa);
    let kp = b.t().dot(&b);
    let kq = b.dot(&b.t());
    let m = grid.len();
    let mut k = Array2::zeros((2 * m, 2 * m));
    for i in 0..m {
        for j in 0..m {
            k[[2 * i, 2 * j]] = kp[[i, j]];
            k[[2 * i + 1, 2 * j + 1]] = kq[[i, j]];
        }
    }
    k
}

impl ChannelOperator {
    /// Wraps an arbitrary symmetric matrix holding the physical operator.
    pub fn from_matrix(channel: Channel, kind: OperatorKind, c: Option<f64>, matrix: Array2<f64>) -> Result<Self> {
        if matrix.nrows() != matrix.ncols() {
            return Err(Error::Dimension("operator matrix must be square".into()));
        }
        let shift = match (kind.is_dirac(), c) {
            (true, Some(c)) => c * c,
            _ => 0.0,
        };
        Ok(Self {
            channel,
            kind,
            c,
            shift,
            repr: Repr::Dense(matrix),
        })
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn kind(&self) -> OperatorKind {
        self.kind
    }

    pub fn c(&self) -> Option<f64> {
        self.c
    }

    /// Constant subtracted from the stored matrix (`c²` for Dirac kinds).
    pub fn shift(&self) -> f64 {
        self.shift
    }

    pub fn dim(&self) -> usize {
        match &self.repr {
            Repr::Structured { local, .. } => local.len(),
            Repr::Dense(a) => a.nrows(),
        }
    }

    pub fn space(&self) -> Option<&Arc<ChannelSpace>> {
        match &self.repr {
            Repr::Structured { space, .. } => Some(space),
            Repr::Dense(_) => None,
        }
    }

    /// Local (tridiagonal) part, when the operator carries one.
    pub fn local(&self) -> Option<&SymTridiagonal> {
        match &self.repr {
            Repr::Structured { local, .. } => Some(local),
            Repr::Dense(_) => None,
        }
    }

    pub fn exchange_terms(&self) -> &[ExchangeTerm] {
        match &self.repr {
            Repr::Structured { exchange, .. } => exchange,
            Repr::Dense(_) => &[],
        }
    }

    pub fn is_local(&self) -> bool {
        matches!(&self.repr, Repr::Structured { exchange, rank_one, .. } if exchange.is_empty() && rank_one.is_empty())
    }

    /// Adds a local potential (one sample per coordinate) and relabels the
    /// operator as a mean-field kind.
    pub fn add_local_potential(&mut self, v: &[f64]) -> Result<()> {
        match &mut self.repr {
            Repr::Structured { local, .. } => {
                if v.len() != local.len() {
                    return Err(Error::Dimension("potential does not match operator".into()));
                }
                local.diag.iter_mut().zip(v).for_each(|(d, p)| *d += p);
            }
            Repr::Dense(a) => {
                for (i, p) in v.iter().enumerate() {
                    a[[i, i]] += p;
                }
            }
        }
        self.promote();
        Ok(())
    }

    pub fn add_exchange(&mut self, term: ExchangeTerm) -> Result<()> {
        match &mut self.repr {
            Repr::Structured { exchange, local, .. } => {
                if term.orbital.len() != local.len() {
                    return Err(Error::Dimension("exchange orbital does not match operator".into()));
                }
                if term.coefficient != 0.0 {
                    exchange.push(term);
                }
            }
            Repr::Dense(_) => return Err(Error::InvalidInput("dense operators take no exchange terms".into())),
        }
        self.promote();
        Ok(())
    }

    /// Adds `sigma · (1 - Σ |o⟩⟨o|)` for orthonormal `occupied` vectors.
    pub fn add_level_shift(&mut self, sigma: f64, occupied: &[Vec<f64>]) -> Result<()> {
        if sigma == 0.0 {
            return Ok(());
        }
        let n = self.dim();
        self.add_local_potential(&vec![sigma; n])?;
        match &mut self.repr {
            Repr::Structured { rank_one, .. } => {
                for o in occupied {
                    rank_one.push((sigma, o.clone()));
                }
            }
            Repr::Dense(a) => {
                for o in occupied {
                    let v = Array1::from(o.clone());
                    for i in 0..n {
                        for j in 0..n {
                            a[[i, j]] -= sigma * v[i] * v[j];
                        }
                    }
                }
            }
        }
        Ok(())
    }

    fn promote(&mut self) {
        self.kind = match self.kind {
            OperatorKind::Dirac => OperatorKind::MeanFieldDirac,
            OperatorKind::Schrodinger => OperatorKind::MeanFieldSchrodinger,
            k => k,
        };
    }

    /// `y = (A - shift) x` without forming the matrix.
    pub fn apply_shifted(&self, x: &[f64], y: &mut [f64]) {
        match &self.repr {
            Repr::Structured {
                space,
                local,
                exchange,
                rank_one,
            } => {
                local.apply(x, y);
                for (coef, o) in rank_one {
                    let p: f64 = o.iter().zip(x).map(|(a, b)| a * b).sum();
                    y.iter_mut().zip(o).for_each(|(yi, oi)| *yi -= coef * p * oi);
                }
                for t in exchange {
                    let pair: Vec<f64> = t.orbital.iter().zip(x).map(|(a, b)| a * b).collect();
                    let pot = apply_kernel(space, t.k, &pair);
                    for i in 0..y.len() {
                        y[i] -= t.coefficient * t.orbital[i] * pot[i];
                    }
                }
            }
            Repr::Dense(a) => {
                let n = a.nrows();
                for i in 0..n {
                    y[i] = (0..n).map(|j| a[[i, j]] * x[j]).sum::<f64>() - self.shift * x[i];
                }
            }
        }
    }

    /// Dense matrix of `A - shift`.
    pub fn shifted_matrix(&self) -> Array2<f64> {
        match &self.repr {
            Repr::Structured {
                space,
                local,
                exchange,
                rank_one,
            } => {
                let n = local.len();
                let mut a = Array2::zeros((n, n));
                for i in 0..n {
                    a[[i, i]] = local.diag[i];
                    if i + 1 < n {
                        a[[i, i + 1]] = local.off[i];
                        a[[i + 1, i]] = local.off[i];
                    }
                }
                for (coef, o) in rank_one {
                    for i in 0..n {
                        for j in 0..n {
                            a[[i, j]] -= coef * o[i] * o[j];
                        }
                    }
                }
                let mut kernels: Vec<(u32, Array2<f64>)> = Vec::new();
                for t in exchange {
                    if !kernels.iter().any(|(k, _)| *k == t.k) {
                        kernels.push((t.k, kernel_matrix(space, t.k)));
                    }
                    let s = &kernels.iter().find(|(k, _)| *k == t.k).expect("kernel cached").1;
                    for i in 0..n {
                        let oi = t.coefficient * t.orbital[i];
                        if oi == 0.0 {
                            continue;
                        }
                        for j in 0..n {
                            a[[i, j]] -= oi * s[[i, j]] * t.orbital[j];
                        }
                    }
                }
                a
            }
            Repr::Dense(a) => {
                let mut a = a.clone();
                for i in 0..a.nrows() {
                    a[[i, i]] -= self.shift;
                }
                a
            }
        }
    }

    /// Dense matrix of the physical operator.
    pub fn matrix(&self) -> Array2<f64> {
        let mut a = self.shifted_matrix();
        for i in 0..a.nrows() {
            a[[i, i]] += self.shift;
        }
        a
    }

    /// Max abs entry of the physical operator (cheap bound used in residual
    /// contracts).
    pub fn norm_estimate(&self) -> f64 {
        match &self.repr {
            Repr::Structured { local, .. } => {
                let mut m = 0.0_f64;
                for (i, d) in local.diag.iter().enumerate() {
                    m = m.max((d + self.shift).abs());
                    if i < local.off.len() {
                        m = m.max(local.off[i].abs());
                    }
                }
                m
            }
            Repr::Dense(a) => max_abs(a.view()),
        }
    }
}

impl SymOperator for ChannelOperator {
    fn dim(&self) -> usize {
        ChannelOperator::dim(self)
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        self.apply_shifted(x, y)
    }
}

/// Full spectrum of a channel operator.
#[derive(Clone, Debug)]
pub struct ChannelSpectrum {
    /// Eigenvalues of the stored (shifted) matrix, ascending.
    pub shifted_values: Array1<f64>,
    /// Column eigenvectors.
    pub vectors: Array2<f64>,
    pub shift: f64,
}

impl ChannelSpectrum {
    /// Physical eigenvalues.
    pub fn values(&self) -> Array1<f64> {
        self.shifted_values.mapv(|v| v + self.shift)
    }
}

/// Dense diagonalization of the whole operator.
pub fn diagonalize_channel(op: &ChannelOperator) -> Result<ChannelSpectrum> {
    let a = op.shifted_matrix();
    let (vals, vecs) = sym_eigen(&a)?;
    Ok(ChannelSpectrum {
        shifted_values: vals,
        vectors: vecs,
        shift: op.shift(),
    })
}

/// Window of admissible (shifted) eigenvalues for occupied orbitals: the
/// spectral gap `(0, c²)` for Dirac kinds, everything for Schrödinger kinds.
pub fn occupation_window(op: &ChannelOperator) -> (f64, f64) {
    if op.kind().is_dirac() {
        (-op.shift(), 0.0)
    } else {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// Lowest `count` eigenpairs in the occupation window, with shifted
/// eigenvalues. Local operators use Sturm bisection; nonlocal ones use
/// Davidson iterations preconditioned by the local part, seeded with
/// `guesses` (augmented by local-part eigenvectors).
pub fn lowest_states(op: &ChannelOperator, count: usize, guesses: &[Vec<f64>], tol: f64) -> Result<Eigenpairs> {
    let (lo, hi) = occupation_window(op);
    let local = match op.local() {
        Some(l) => l,
        None => return lowest_states_dense(op, count, lo, hi),
    };
    let first = if lo.is_finite() { local.count_below(lo) } else { 0 };
    let extra = if op.is_local() { 0 } else { 2 };
    let mut values = Vec::new();
    let mut vectors = Vec::new();
    let (blo, bhi) = local.bounds();
    for i in 0..(count + extra) {
        let idx = first + i;
        if idx >= local.len() {
            break;
        }
        let a = if lo.is_finite() { blo.min(lo) } else { blo };
        let b = if hi.is_finite() { bhi.max(hi) } else { bhi };
        let lam = local.eigenvalue_in(idx, a, b);
        if lam >= hi {
            break;
        }
        values.push(lam);
        vectors.push(local.eigenvector(lam));
    }
    if op.is_local() {
        if values.len() < count {
            return Err(Error::NoBoundState(format!(
                "{} (found {} of {count} states in the window)",
                op.channel(),
                values.len()
            )));
        }
        let mut residuals = Vec::with_capacity(count);
        for (lam, v) in values.iter().zip(&vectors) {
            let mut av = vec![0.0; v.len()];
            local.apply(v, &mut av);
            residuals.push(av.iter().zip(v).map(|(a, x)| (a - lam * x).powi(2)).sum::<f64>().sqrt());
        }
        return Ok(Eigenpairs {
            values,
            vectors,
            residuals,
            converged: true,
        });
    }
    let mut seeds: Vec<Vec<f64>> = guesses.to_vec();
    seeds.extend(vectors);
    let opts = DavidsonOptions {
        tol,
        ..DavidsonOptions::default()
    };
    lowest_in_window(op, local, count, lo, hi, &seeds, opts).map_err(|e| match e {
        Error::Eigen(msg) => Error::NoBoundState(format!("{}: {msg}", op.channel())),
        other => other,
    })
}

fn lowest_states_dense(op: &ChannelOperator, count: usize, lo: f64, hi: f64) -> Result<Eigenpairs> {
    let spec = diagonalize_channel(op)?;
    let idx: Vec<usize> = (0..spec.shifted_values.len())
        .filter(|&i| spec.shifted_values[i] > lo && spec.shifted_values[i] < hi)
        .take(count)
        .collect();
    if idx.len() < count {
        return Err(Error::NoBoundState(format!("{}", op.channel())));
    }
    let values = idx.iter().map(|&i| spec.shifted_values[i]).collect();
    let vectors: Vec<Vec<f64>> = idx.iter().map(|&i| spec.vectors.column(i).to_vec()).collect();
    let mut residuals = Vec::new();
    for (i, v) in idx.iter().zip(&vectors) {
        let mut av = vec![0.0; v.len()];
        op.apply_shifted(v, &mut av);
        let lam = spec.shifted_values[*i];
        residuals.push(av.iter().zip(v).map(|(a, x)| (a - lam * x).powi(2)).sum::<f64>().sqrt());
    }
    Ok(Eigenpairs {
        values,
        vectors,
        residuals,
        converged: true,
    })
}

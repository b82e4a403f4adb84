//! Symmetric tridiagonal matrices: Sturm counts, bisection, twisted-factorization
//! eigenvectors and shifted solves.
//!
//! All routines work on the LDLᵀ recurrences directly, which keeps relative
//! accuracy for eigenvalues that are tiny compared with the matrix norm.

const TINY: f64 = 1e-300;

#[derive(Clone, Debug, PartialEq)]
pub struct SymTridiagonal {
    pub diag: Vec<f64>,
    pub off: Vec<f64>,
}

impl SymTridiagonal {
    pub fn new(diag: Vec<f64>, off: Vec<f64>) -> Self {
        assert!(
            diag.is_empty() && off.is_empty() || off.len() + 1 == diag.len(),
            "off-diagonal length must be one less than the diagonal"
        );
        Self { diag, off }
    }

    pub fn len(&self) -> usize {
        self.diag.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diag.is_empty()
    }

    /// Number of eigenvalues strictly below `x`.
    pub fn count_below(&self, x: f64) -> usize {
        let n = self.len();
        if n == 0 {
            return 0;
        }
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            if q == 0.0 {
                q = TINY;
            }
            let e = self.off[i - 1];
            q = self.diag[i] - x - e * e / q;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// Gershgorin interval enclosing the spectrum.
    pub fn bounds(&self) -> (f64, f64) {
        let n = self.len();
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for i in 0..n {
            let mut rad = 0.0;
            if i > 0 {
                rad += self.off[i - 1].abs();
            }
            if i + 1 < n {
                rad += self.off[i].abs();
            }
            lo = lo.min(self.diag[i] - rad);
            hi = hi.max(self.diag[i] + rad);
        }
        (lo, hi)
    }

    /// The `index`-th smallest eigenvalue (0-based), refined by bisection until
    /// the bracket cannot shrink further in floating point.
    pub fn eigenvalue(&self, index: usize) -> f64 {
        let (lo, hi) = self.bounds();
        self.eigenvalue_in(index, lo, hi)
    }

    /// Same as [`eigenvalue`](Self::eigenvalue) with a caller-supplied bracket
    /// `lo ≤ λ_index < hi`.
    pub fn eigenvalue_in(&self, index: usize, mut lo: f64, mut hi: f64) -> f64 {
        assert!(index < self.len());
        for _ in 0..2200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if self.count_below(mid) > index {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        0.5 * (lo + hi)
    }

    /// Unit eigenvector for an accurate eigenvalue `lambda` via the twisted
    /// factorization of `T − λ`.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.len();
        if n == 1 {
            return vec![1.0];
        }
        let mut dp = vec![0.0; n];
        let mut dm = vec![0.0; n];
        dp[0] = self.diag[0] - lambda;
        for i in 1..n {
            let prev = nonzero(dp[i - 1]);
            let e = self.off[i - 1];
            dp[i] = self.diag[i] - lambda - e * e / prev;
        }
        dm[n - 1] = self.diag[n - 1] - lambda;
        for i in (0..n - 1).rev() {
            let next = nonzero(dm[i + 1]);
            let e = self.off[i];
            dm[i] = self.diag[i] - lambda - e * e / next;
        }
        let mut twist = 0;
        let mut best = f64::INFINITY;
        for r in 0..n {
            let gamma = (dp[r] + dm[r] - (self.diag[r] - lambda)).abs();
            if gamma < best {
                best = gamma;
                twist = r;
            }
        }
        let mut z = vec![0.0; n];
        z[twist] = 1.0;
        for i in (0..twist).rev() {
            z[i] = -self.off[i] / nonzero(dp[i]) * z[i + 1];
        }
        for i in twist + 1..n {
            z[i] = -self.off[i - 1] / nonzero(dm[i]) * z[i - 1];
        }
        let norm = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        z.iter_mut().for_each(|v| *v /= norm);
        z
    }

    /// Solves `(T − σ) x = b` by an unpivoted LDLᵀ sweep. Near-singular pivots
    /// are nudged, which turns the solve into an inverse-iteration step.
    pub fn solve_shifted(&self, sigma: f64, b: &[f64]) -> Vec<f64> {
        let n = self.len();
        assert_eq!(b.len(), n);
        let mut d = vec![0.0; n];
        let mut y = b.to_vec();
        d[0] = nonzero(self.diag[0] - sigma);
        for i in 1..n {
            let l = self.off[i - 1] / d[i - 1];
            d[i] = nonzero(self.diag[i] - sigma - l * self.off[i - 1]);
            y[i] -= l * y[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - self.off[i] * x[i + 1]) / d[i];
        }
        x
    }

    /// `y = T x`.
    pub fn apply(&self, x: &[f64], y: &mut [f64]) {
        let n = self.len();
        for i in 0..n {
            let mut s = self.diag[i] * x[i];
            if i > 0 {
                s += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < n {
                s += self.off[i] * x[i + 1];
            }
            y[i] = s;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.diag
            .iter()
            .chain(self.off.iter())
            .fold(0.0_f64, |m, v| m.max(v.abs()))
    }
}

fn nonzero(v: f64) -> f64 {
    if v.abs() < TINY {
        if v.is_sign_negative() {
            -TINY
        } else {
            TINY
        }
    } else {
        v
    }
}

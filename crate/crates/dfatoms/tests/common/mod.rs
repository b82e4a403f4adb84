//! Shared problem builders and independent reference oracles.
#![allow(dead_code)]

use dfatoms::dirac_fock::{Configuration, Hamiltonian, Problem, ScfControls, ShellSpec};
use dfatoms::radial::{Channel, NuclearModel, RadialGrid};
use num_complex::Complex64;

pub const C: f64 = 137.035999084;

pub fn dirac(z: f64, c: f64, m: usize, r_min: f64, shells: &[(u32, i32, usize)]) -> Problem {
    let shells = shells
        .iter()
        .map(|&(n, k, w)| ShellSpec {
            n,
            channel: Channel::dirac(k).unwrap(),
            occupation: w,
        })
        .collect();
    Problem::new(
        NuclearModel::point(z).unwrap(),
        Hamiltonian::Dirac { c },
        RadialGrid::exponential(r_min, 40.0, m).unwrap(),
        shells,
        ScfControls::default(),
    )
    .unwrap()
}

pub fn helium(c: f64, m: usize) -> Problem {
    dirac(2.0, c, m, 1e-4 / 2.0, &[(1, -1, 2)])
}

pub fn beryllium(c: f64, m: usize) -> Problem {
    dirac(4.0, c, m, 1e-4 / 4.0, &[(1, -1, 2), (2, -1, 2)])
}

pub fn neon(c: f64, m: usize) -> Problem {
    dirac(10.0, c, m, 1e-4 / 10.0, &[(1, -1, 2), (2, -1, 2), (2, 1, 2), (2, -2, 4)])
}

/// Closed-form Dirac-Coulomb level minus c², written without the
/// cancellation of `E - c²`.
pub fn sommerfeld_shifted(z: f64, kappa: i32, n: u32, c: f64) -> f64 {
    let a = z / c;
    let k = kappa.unsigned_abs() as f64;
    let nr = n as f64 - k;
    let d = nr + (k * k - a * a).sqrt();
    let t = (a / d).powi(2);
    let s = (1.0 + t).sqrt();
    -c * c * t / (s * (1.0 + s))
}

/// Extrapolates `e(h) = e0 + a h² + b h⁴` through three points.
pub fn richardson(h: [f64; 3], e: [f64; 3]) -> f64 {
    let rows: Vec<[f64; 3]> = h.iter().map(|h| [1.0, h * h, h.powi(4)]).collect();
    let det3 = |m: &[[f64; 3]]| {
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    };
    let d = det3(&rows);
    let mut m0 = rows.clone();
    for i in 0..3 {
        m0[i][0] = e[i];
    }
    det3(&m0) / d
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

// ---------------------------------------------------------------------------
// Roothaan oracle for the helium ground state in an even-tempered 1s STO basis

/// Cyclic Jacobi diagonalization of a small symmetric matrix; eigenvalues
/// ascending, eigenvectors in columns.
pub fn jacobi(a: &[Vec<f64>]) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = a.len();
    let mut a = a.to_vec();
    let mut v: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect();
    for _ in 0..100 {
        let off: f64 = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).map(|(i, j)| a[i][j].powi(2)).sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for row in v.iter_mut() {
                    let (vp, vq) = (row[p], row[q]);
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }
    }
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| a[i][i].total_cmp(&a[j][j]));
    let vals = idx.iter().map(|&i| a[i][i]).collect();
    let vecs = (0..n).map(|r| idx.iter().map(|&i| v[r][i]).collect()).collect();
    (vals, vecs)
}

/// Closed-shell Roothaan energy of He for the exponents `zeta`.
pub fn helium_roothaan(zeta: &[f64]) -> f64 {
    let n = zeta.len();
    let z = 2.0;
    let s = |i: usize, j: usize| 8.0 * (zeta[i] * zeta[j]).powf(1.5) / (zeta[i] + zeta[j]).powi(3);
    let h = |i: usize, j: usize| 0.5 * zeta[i] * zeta[j] * s(i, j) - z * s(i, j) * (zeta[i] + zeta[j]) / 2.0;
    let eri = |i: usize, j: usize, k: usize, l: usize| {
        let a = zeta[i] + zeta[j];
        let b = zeta[k] + zeta[l];
        32.0 * (zeta[i] * zeta[j] * zeta[k] * zeta[l]).powf(1.5) * (a * a + 3.0 * a * b + b * b)
            / (a * a * b * b * (a + b).powi(3))
    };
    let smat: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s(i, j)).collect()).collect();
    let (sv, su) = jacobi(&smat);
    // X = S^{-1/2}
    let x: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| (0..n).map(|k| su[i][k] * su[j][k] / sv[k].sqrt()).sum()).collect())
        .collect();
    let mut coef = vec![0.0; n];
    let mut energy = 0.0;
    let mut first = true;
    for _ in 0..200 {
        let f: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let mut v = h(i, j);
                        if !first {
                            for k in 0..n {
                                for l in 0..n {
                                    v += coef[k] * coef[l] * eri(i, j, k, l);
                                }
                            }
                        }
                        v
                    })
                    .collect()
            })
            .collect();
        let fp: Vec<Vec<f64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (0..n).flat_map(|k| (0..n).map(move |l| (k, l))).map(|(k, l)| x[i][k] * f[k][l] * x[l][j]).sum())
                    .collect()
            })
            .collect();
        let (_, u) = jacobi(&fp);
        let new: Vec<f64> = (0..n).map(|i| (0..n).map(|k| x[i][k] * u[k][0]).sum()).collect();
        coef = new;
        let norm: f64 = (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| coef[i] * coef[j] * s(i, j)).sum();
        coef.iter_mut().for_each(|c| *c /= norm.sqrt());
        let mut e = 0.0;
        for i in 0..n {
            for j in 0..n {
                e += 2.0 * coef[i] * coef[j] * h(i, j);
                for k in 0..n {
                    for l in 0..n {
                        e += coef[i] * coef[j] * coef[k] * coef[l] * eri(i, j, k, l);
                    }
                }
            }
        }
        if !first && (e - energy).abs() < 1e-13 {
            return e;
        }
        energy = e;
        first = false;
    }
    energy
}

fn golden(mut lo: f64, mut hi: f64, f: impl Fn(f64) -> f64) -> f64 {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let a = hi - g * (hi - lo);
        let b = lo + g * (hi - lo);
        if f(a) < f(b) {
            hi = b;
        } else {
            lo = a;
        }
    }
    0.5 * (lo + hi)
}

/// Helium Hartree-Fock energy from six even-tempered 1s functions
/// `ζ_i = α β^i`, with α and β optimized variationally.
pub fn helium_sto_oracle() -> f64 {
    let energy = |la: f64, lb: f64| {
        let zeta: Vec<f64> = (0..6).map(|i| (la + lb * i as f64).exp()).collect();
        helium_roothaan(&zeta)
    };
    let (mut la, mut lb) = (0.0_f64, 0.7_f64);
    for _ in 0..8 {
        la = golden(-2.0, 1.5, |x| energy(x, lb));
        lb = golden(0.2, 1.5, |y| energy(la, y));
    }
    energy(la, lb)
}

// ---------------------------------------------------------------------------
// Three-dimensional quadrature of the two-electron energy

/// Gauss-Legendre nodes and weights on [-1, 1].
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, z);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * z * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let dp = n as f64 * (z * p1 - p0) / (z * z - 1.0);
            let dz = p1 / dp;
            z -= dz;
            if dz.abs() < 1e-15 {
                let (mut q0, mut q1) = (1.0, z);
                for k in 2..=n {
                    let q2 = ((2 * k - 1) as f64 * z * q1 - (k - 1) as f64 * q0) / k as f64;
                    q0 = q1;
                    q1 = q2;
                }
                let dq = n as f64 * (z * q1 - q0) / (z * z - 1.0);
                w[i] = 2.0 / ((1.0 - z * z) * dq * dq);
                break;
            }
        }
        x[i] = z;
    }
    (x, w)
}

fn factorial(n: i64) -> f64 {
    (1..=n).map(|k| k as f64).product()
}

/// Complex spherical harmonic with the Condon-Shortley phase.
pub fn ylm(l: i64, m: i64, cos_t: f64, phi: f64) -> Complex64 {
    if m.abs() > l {
        return Complex64::new(0.0, 0.0);
    }
    if m < 0 {
        let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
        return ylm(l, -m, cos_t, phi).conj() * sign;
    }
    // associated Legendre P_l^m by upward recurrence
    let sin_t = (1.0 - cos_t * cos_t).max(0.0).sqrt();
    let mut pmm = 1.0;
    for i in 0..m {
        pmm *= -((2 * i + 1) as f64) * sin_t;
    }
    let p = if l == m {
        pmm
    } else {
        let mut pm1 = cos_t * (2 * m + 1) as f64 * pmm;
        let mut pm0 = pmm;
        for ll in m + 2..=l {
            let pn = ((2 * ll - 1) as f64 * cos_t * pm1 - (ll + m - 1) as f64 * pm0) / (ll - m) as f64;
            pm0 = pm1;
            pm1 = pn;
        }
        pm1
    };
    let norm = ((2 * l + 1) as f64 / (4.0 * std::f64::consts::PI) * factorial(l - m) / factorial(l + m)).sqrt();
    Complex64::from_polar(norm * p, m as f64 * phi)
}

/// Two-component spin-angular function `Ω_{κ m}` with `tm = 2m`.
pub fn spin_angular(kappa: i32, tm: i64, cos_t: f64, phi: f64) -> [Complex64; 2] {
    let (l, plus) = if kappa < 0 { ((-kappa - 1) as i64, true) } else { (kappa as i64, false) };
    let m = tm as f64 / 2.0;
    let lf = l as f64;
    let up = ylm(l, (tm - 1) / 2, cos_t, phi);
    let down = ylm(l, (tm + 1) / 2, cos_t, phi);
    let d = 2.0 * lf + 1.0;
    if plus {
        [up * ((lf + m + 0.5) / d).sqrt(), down * ((lf - m + 0.5) / d).sqrt()]
    } else {
        [up * -((lf - m + 0.5) / d).sqrt(), down * ((lf + m + 0.5) / d).sqrt()]
    }
}

/// Samples on a uniform grid in `t = ln r`, interpolated onto a grid four
/// times finer with cubic Lagrange stencils.
struct Fine {
    t0: f64,
    h: f64,
    len: usize,
}

impl Fine {
    fn r(&self, j: usize) -> f64 {
        (self.t0 + j as f64 * self.h).exp()
    }

    /// `samples[i]` sits at fine index `offset + 4 i`.
    fn refine(&self, samples: &[f64], offset: usize) -> Vec<f64> {
        let n = samples.len();
        (0..self.len)
            .map(|j| {
                if j < offset {
                    return 0.0;
                }
                let s = (j - offset) as f64 / 4.0;
                if s > (n - 1) as f64 {
                    return 0.0;
                }
                let base = (s.floor() as isize - 1).clamp(0, n as isize - 4) as usize;
                let mut v = 0.0;
                for a in 0..4 {
                    let mut l = 1.0;
                    for b in 0..4 {
                        if a != b {
                            l *= (s - (base + b) as f64) / (a as f64 - b as f64);
                        }
                    }
                    v += l * samples[base + a];
                }
                v
            })
            .collect()
    }

    /// `∫∫ f(r) g(s) r_<^L / r_>^{L+1} dr ds` by cumulative trapezoid sums.
    fn coulomb(&self, l: i32, f: &[f64], g: &[f64]) -> f64 {
        let n = self.len;
        let r: Vec<f64> = (0..n).map(|j| self.r(j)).collect();
        // dr = r dt
        let inner: Vec<f64> = (0..n).map(|j| g[j] * r[j].powi(l) * r[j]).collect();
        let outer: Vec<f64> = (0..n).map(|j| g[j] * r[j].powi(-l - 1) * r[j]).collect();
        let mut a = vec![0.0; n];
        for j in 1..n {
            a[j] = a[j - 1] + 0.5 * self.h * (inner[j - 1] + inner[j]);
        }
        let mut b = vec![0.0; n];
        for j in (0..n - 1).rev() {
            b[j] = b[j + 1] + 0.5 * self.h * (outer[j] + outer[j + 1]);
        }
        let y: Vec<f64> = (0..n).map(|j| a[j] / r[j].powi(l + 1) + b[j] * r[j].powi(l)).collect();
        let mut s = 0.0;
        for j in 0..n {
            let w = if j == 0 || j == n - 1 { 0.5 } else { 1.0 };
            s += w * self.h * r[j] * f[j] * y[j];
        }
        s
    }
}

/// Direct and exchange energies `½Σ(aa|bb)` and `½Σ(ab|ba)` over all occupied
/// spin-orbitals, from four-component spinors on a product quadrature in
/// angle and a refined radial grid.
pub fn two_body_3d(psi: &Configuration) -> (f64, f64) {
    let grid = &psi.problem.grid;
    let m = grid.len();
    let h = grid.step();
    let fine = Fine {
        t0: grid.r_min().ln(),
        h: h / 4.0,
        len: 4 * m,
    };
    // radial functions on the fine grid: P from the nodes, Q from the midpoints
    let radial: Vec<(Vec<f64>, Vec<f64>)> = (0..psi.shells.len())
        .map(|i| (fine.refine(&psi.large(i), 0), fine.refine(&psi.small(i), 2)))
        .collect();

    // spin-orbitals (shell, κ, 2m)
    let mut orbitals = Vec::new();
    for (i, s) in psi.shells.iter().enumerate() {
        let Channel::Dirac(kappa) = s.channel else { panic!("Dirac shells expected") };
        let tj = 2 * kappa.abs() as i64 - 1;
        for tm in (-tj..=tj).step_by(2) {
            orbitals.push((i, kappa, tm));
        }
    }
    let (xs, ws) = gauss_legendre(16);
    let nphi = 16;
    let points: Vec<(f64, f64, f64)> = xs
        .iter()
        .zip(&ws)
        .flat_map(|(&x, &w)| {
            (0..nphi).map(move |k| (x, 2.0 * std::f64::consts::PI * k as f64 / nphi as f64, w * 2.0 * std::f64::consts::PI / nphi as f64))
        })
        .collect();
    const LMAX: i64 = 4;
    let lm: Vec<(i64, i64)> = (0..=LMAX).flat_map(|l| (-l..=l).map(move |mm| (l, mm))).collect();
    let harmonics: Vec<Vec<Complex64>> = points.iter().map(|&(x, phi, _)| lm.iter().map(|&(l, mm)| ylm(l, mm, x, phi)).collect()).collect();
    // proj[a][b][comp][lm] = ∫ Ω_a† Ω_b Y_LM dΩ for the large (0) and small (1) components
    let omegas: Vec<Vec<[[Complex64; 2]; 2]>> = orbitals
        .iter()
        .map(|&(_, k, tm)| {
            points
                .iter()
                .map(|&(x, phi, _)| [spin_angular(k, tm, x, phi), spin_angular(-k, tm, x, phi)])
                .collect()
        })
        .collect();
    let no = orbitals.len();
    let mut proj = vec![vec![[vec![Complex64::new(0.0, 0.0); lm.len()], vec![Complex64::new(0.0, 0.0); lm.len()]]; no]; no];
    for a in 0..no {
        for b in 0..no {
            for comp in 0..2 {
                for (p, &(_, _, w)) in points.iter().enumerate() {
                    let (oa, ob) = (omegas[a][p][comp], omegas[b][p][comp]);
                    let dens = (oa[0].conj() * ob[0] + oa[1].conj() * ob[1]) * w;
                    for (q, y) in harmonics[p].iter().enumerate() {
                        proj[a][b][comp][q] += dens * y;
                    }
                }
            }
        }
    }
    let mut cache = std::collections::HashMap::new();
    let mut radial_coulomb = |key: (usize, usize, usize, usize, usize, usize, i64)| -> f64 {
        *cache.entry(key).or_insert_with(|| {
            let (a, b, ca, c, d, cc, l) = key;
            let comp = |i: usize, j: usize, k: usize| -> Vec<f64> {
                let (x, y) = if k == 0 { (&radial[i].0, &radial[j].0) } else { (&radial[i].1, &radial[j].1) };
                x.iter().zip(y).map(|(u, v)| u * v).collect()
            };
            fine.coulomb(l as i32, &comp(a, b, ca), &comp(c, d, cc))
        })
    };
    let mut direct = 0.0;
    let mut exchange = 0.0;
    for a in 0..no {
        for b in 0..no {
            let (ia, ib) = (orbitals[a].0, orbitals[b].0);
            for (q, &(l, _)) in lm.iter().enumerate() {
                let pref = 4.0 * std::f64::consts::PI / (2 * l + 1) as f64;
                for c1 in 0..2 {
                    for c2 in 0..2 {
                        // (aa|bb): ∫ρ_aa Y* times ∫ρ_bb Y
                        let x = proj[a][a][c1][q].conj() * proj[b][b][c2][q];
                        if x.norm() > 1e-14 {
                            direct += 0.5 * pref * x.re * radial_coulomb((ia, ia, c1, ib, ib, c2, l));
                        }
                        // (ab|ba): ∫ρ_ab Y* = conj ∫ρ_ba Y
                        let y = proj[b][a][c1][q].conj() * proj[b][a][c2][q];
                        if y.norm() > 1e-14 {
                            exchange += 0.5 * pref * y.re * radial_coulomb((ia, ib, c1, ib, ia, c2, l));
                        }
                    }
                }
            }
        }
    }
    (direct, exchange)
}

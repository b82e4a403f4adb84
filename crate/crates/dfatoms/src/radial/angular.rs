//! Wigner 3j symbols and the closed-shell exchange coefficients built from them.
//!
//! Angular momenta are passed doubled (`two_j = 2j`) so half-integers stay exact.

use serde::{Deserialize, Serialize};

use super::space::Channel;
use crate::error::{invalid, Result};

fn factorial(n: i64) -> f64 {
    debug_assert!(n >= 0);
    static TABLE: std::sync::OnceLock<Vec<f64>> = std::sync::OnceLock::new();
    let t = TABLE.get_or_init(|| {
        let mut v = vec![1.0f64; 171];
        for i in 1..171 {
            v[i] = v[i - 1] * i as f64;
        }
        v
    });
    t[n as usize]
}

/// Wigner 3j symbol `(j1 j2 j3; m1 m2 m3)` from the Racah closed form; all
/// arguments doubled.
pub fn wigner_3j(tj1: i64, tj2: i64, tj3: i64, tm1: i64, tm2: i64, tm3: i64) -> f64 {
    if tm1 + tm2 + tm3 != 0 {
        return 0.0;
    }
    if tj3 < (tj1 - tj2).abs() || tj3 > tj1 + tj2 {
        return 0.0;
    }
    if tm1.abs() > tj1 || tm2.abs() > tj2 || tm3.abs() > tj3 {
        return 0.0;
    }
    if (tj1 + tm1) % 2 != 0 || (tj2 + tm2) % 2 != 0 || (tj3 + tm3) % 2 != 0 {
        return 0.0;
    }
    if (tj1 + tj2 + tj3) % 2 != 0 {
        return 0.0;
    }
    // everything below is an integer after halving
    let a = (tj1 + tj2 - tj3) / 2;
    let b = (tj1 - tj2 + tj3) / 2;
    let c = (-tj1 + tj2 + tj3) / 2;
    let big = (tj1 + tj2 + tj3) / 2 + 1;
    let triangle = factorial(a) * factorial(b) * factorial(c) / factorial(big);
    let pre = triangle
        * factorial((tj1 + tm1) / 2)
        * factorial((tj1 - tm1) / 2)
        * factorial((tj2 + tm2) / 2)
        * factorial((tj2 - tm2) / 2)
        * factorial((tj3 + tm3) / 2)
        * factorial((tj3 - tm3) / 2);

    let k1 = (tj3 - tj2 + tm1) / 2;
    let k2 = (tj3 - tj1 - tm2) / 2;
    let n1 = a;
    let n2 = (tj1 - tm1) / 2;
    let n3 = (tj2 + tm2) / 2;
    let tmin = 0.max(-k1).max(-k2);
    let tmax = n1.min(n2).min(n3);
    let mut sum = 0.0;
    for t in tmin..=tmax {
        let denom = factorial(t)
            * factorial(k1 + t)
            * factorial(k2 + t)
            * factorial(n1 - t)
            * factorial(n2 - t)
            * factorial(n3 - t);
        let sign = if t % 2 == 0 { 1.0 } else { -1.0 };
        sum += sign / denom;
    }
    let phase_exp = (tj1 - tj2 - tm3) / 2;
    let phase = if phase_exp.rem_euclid(2) == 0 { 1.0 } else { -1.0 };
    phase * pre.sqrt() * sum
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularCoefficient {
    pub two_ja: u32,
    pub two_jb: u32,
    pub k: u32,
    pub value: f64,
}

fn check_pair(two_j: u32, l: u32) -> Result<()> {
    if two_j != 2 * l + 1 && two_j + 1 != 2 * l {
        return Err(invalid(format!("j = {two_j}/2 is not l ± 1/2 for l = {l}")));
    }
    Ok(())
}

/// `Λ^k = (j_a k j_b; 1/2 0 -1/2)²` with the parity rule on `ℓ_a + ℓ_b + k`.
pub fn angular_weight(two_ja: u32, two_jb: u32, la: u32, lb: u32, k: u32) -> Result<AngularCoefficient> {
    check_pair(two_ja, la)?;
    check_pair(two_jb, lb)?;
    let value = if (la + lb + k) % 2 != 0 {
        0.0
    } else {
        let w = wigner_3j(two_ja as i64, 2 * k as i64, two_jb as i64, 1, 0, -1);
        w * w
    };
    Ok(AngularCoefficient { two_ja, two_jb, k, value })
}

/// Range of multipoles that can couple two channels.
pub fn multipoles(a: Channel, b: Channel) -> std::ops::RangeInclusive<u32> {
    match (a, b) {
        (Channel::Dirac(_), Channel::Dirac(_)) => {
            let (ja, jb) = (a.two_j().unwrap_or(0), b.two_j().unwrap_or(0));
            (ja.abs_diff(jb) / 2)..=((ja + jb) / 2)
        }
        _ => {
            let (la, lb) = (a.l(), b.l());
            la.abs_diff(lb)..=(la + lb)
        }
    }
}

/// Exchange coefficient per electron of a closed shell in channel `b` acting on
/// channel `a`: `Λ^k` for Dirac channels and `½ (ℓ_a k ℓ_b; 0 0 0)²` for
/// Schrödinger channels.
pub fn exchange_coefficient(a: Channel, b: Channel, k: u32) -> f64 {
    match (a, b) {
        (Channel::Dirac(_), Channel::Dirac(_)) => {
            let (ja, jb) = (a.two_j().unwrap_or(0), b.two_j().unwrap_or(0));
            angular_weight(ja, jb, a.l(), b.l(), k).map(|c| c.value).unwrap_or(0.0)
        }
        (Channel::Schrodinger(la), Channel::Schrodinger(lb)) => {
            let w = wigner_3j(2 * la as i64, 2 * k as i64, 2 * lb as i64, 0, 0, 0);
            0.5 * w * w
        }
        _ => 0.0,
    }
}

/// Intra-shell exchange weight `g_k = g/(g-1) Λ^k(a,a)` of a shell with
/// capacity `g`; it makes the radial energy of a closed shell equal the
/// energy of the corresponding Slater determinant.
pub fn intra_shell_weight(a: Channel, k: u32) -> f64 {
    let g = a.capacity() as f64;
    g / (g - 1.0) * exchange_coefficient(a, a, k)
}

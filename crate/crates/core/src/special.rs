//! Legendre polynomials and the angular integrals
//! `int_{-1}^{1} P_l(y) / (a + b y)^k dy`, k = 1, 2, expressed through Legendre
//! functions of the second kind.

#[allow(unused_imports)] // shadowed by inherent methods when std is linked
use num_traits::Float;

use crate::error::{Error, Result};
use crate::quad::gauss_legendre;

pub fn legendre(ell: usize, y: f64) -> Result<f64> {
    if !(y.abs() <= 1.0) {
        return Err(Error::Domain("legendre argument must lie in [-1, 1]"));
    }
    Ok(legendre_unchecked(ell, y))
}

pub(crate) fn legendre_unchecked(ell: usize, y: f64) -> f64 {
    if ell == 0 {
        return 1.0;
    }
    let (mut p0, mut p1) = (1.0, y);
    for k in 1..ell {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * y * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    p1
}

fn sign(ell: usize) -> f64 {
    if ell % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// `int_{-1}^{1} P_l(y) (a + b y)^{-power} dy` for `a > b >= 0`, `power` in {1, 2}.
/// `amb` must equal `a - b`; callers pass it separately so it can be formed without
/// cancellation.
pub fn sector_integral(ell: usize, a: f64, b: f64, amb: f64, power: u32) -> f64 {
    debug_assert!(power == 1 || power == 2);
    if b <= 0.5 * a {
        return series(ell, a, b, power);
    }
    let z = a / b;
    let zm1 = amb / b;
    let z2m1 = zm1 * (z + 1.0);
    let q0 = 0.5 * (2.0 * b / amb).ln_1p();
    let (q, q_prev) = legendre_q(ell, z, q0);
    if power == 1 {
        return sign(ell) * 2.0 * q / b;
    }
    let dq = if ell == 0 {
        -1.0 / z2m1
    } else {
        ell as f64 * (z * q - q_prev) / z2m1
    };
    -sign(ell) * 2.0 * dq / (b * b)
}

/// Hypergeometric expansion in `t = b/a`, valid for `t <= 1/2`.
fn series(ell: usize, a: f64, b: f64, power: u32) -> f64 {
    let t = b / a;
    let t2 = t * t;
    // d_l = sqrt(pi) l! / (Gamma(l + 3/2) 2^l)
    let mut d = 2.0;
    for k in 1..=ell {
        d *= k as f64 / (2 * k + 1) as f64;
    }
    let lead = d * t.powi(ell as i32);
    if lead == 0.0 {
        return 0.0;
    }
    let l = ell as f64;
    let (ha, hb, hc) = ((l + 1.0) / 2.0, (l + 2.0) / 2.0, l + 1.5);
    let mut f = 1.0;
    let mut tk = 1.0;
    let mut sum = 0.0;
    for k in 0..400 {
        let kf = k as f64;
        let term = if power == 1 { f * tk } else { f * tk * (l + 2.0 * kf + 1.0) };
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
        f *= (ha + kf) * (hb + kf) / ((hc + kf) * (kf + 1.0));
        tk *= t2;
    }
    let scale = if power == 1 { a } else { a * a };
    sign(ell) * lead * sum / scale
}

/// Returns `(Q_l(z), Q_{l-1}(z))` for `z > 1`, given `Q_0(z)`.
fn legendre_q(ell: usize, z: f64, q0: f64) -> (f64, f64) {
    if ell == 0 {
        return (q0, 0.0);
    }
    let rho = z + ((z - 1.0) * (z + 1.0)).sqrt();
    if rho.powi(2 * ell as i32) < 100.0 {
        let (mut qm, mut q) = (q0, z * q0 - 1.0);
        for n in 1..ell {
            let nf = n as f64;
            let next = ((2.0 * nf + 1.0) * z * q - nf * qm) / (nf + 1.0);
            qm = q;
            q = next;
        }
        return (q, qm);
    }
    // Backward recurrence for the ratios r_n = Q_n / Q_{n-1}; minimal solution.
    let extra = (18.5 / rho.ln()).ceil() as usize + 10;
    let top = ell + extra;
    let mut r = 1.0 / rho;
    let mut ratios = alloc::vec![0.0; ell + 1];
    for n in (1..=top).rev() {
        let nf = n as f64;
        r = nf / ((2.0 * nf + 1.0) * z - (nf + 1.0) * r);
        if n <= ell {
            ratios[n] = r;
        }
    }
    let mut q = q0;
    let mut qm = 0.0;
    for &rn in &ratios[1..] {
        qm = q;
        q *= rn;
    }
    (q, qm)
}

/// Brute-force reference: Gauss rule in y, doubled until the relative change drops below `tol`.
pub fn sector_integral_gauss(ell: usize, a: f64, b: f64, power: u32, tol: f64) -> f64 {
    // Convergence is judged against the integral of |P_l| <= 1, i.e. the l = 0 magnitude.
    let eval = |n: usize| -> (f64, f64) {
        let (x, w) = gauss_legendre(n);
        x.iter().zip(&w).fold((0.0, 0.0), |(s, m), (&y, &wy)| {
            let d = wy / (a + b * y).powi(power as i32);
            (s + d * legendre_unchecked(ell, y), m + d)
        })
    };
    let mut n = 16;
    let (mut prev, _) = eval(n);
    while n < 8192 {
        n *= 2;
        let (cur, mag) = eval(n);
        if (cur - prev).abs() <= tol * mag {
            return cur;
        }
        prev = cur;
    }
    prev
}

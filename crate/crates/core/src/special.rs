//! Bessel functions needed by the pointing models.
//!
//! `bessel_j1` feeds the circular-aperture pattern, `bessel_i0e` the Rician
//! angular-error density.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

/// First positive zero of `J1`, i.e. the first null of the circular-aperture
/// pattern in units of `sqrt(G) * theta`.
pub const J1_FIRST_ZERO: f64 = 3.831_705_970_207_512_3;

const SERIES_LIMIT: f64 = 8.0;
const ASYMPTOTIC_LIMIT: f64 = 25.0;

/// Bessel function of the first kind of order one.
///
/// Power series on `|x| <= 8`, Miller backward recurrence on `8 < |x| <= 25`
/// and the Hankel asymptotic expansion beyond. The three pieces keep the
/// error near one ulp of `max(|J1|, 1e-16)` on the range the pointing models
/// use.
pub fn bessel_j1(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    let ax = x.abs();
    if ax.is_infinite() {
        return 0.0;
    }
    let v = if ax <= SERIES_LIMIT {
        j1_series(ax)
    } else if ax <= ASYMPTOTIC_LIMIT {
        j1_miller(ax)
    } else {
        j1_asymptotic(ax)
    };
    if x < 0.0 {
        -v
    } else {
        v
    }
}

fn j1_series(x: f64) -> f64 {
    let half = 0.5 * x;
    let q = half * half;
    let mut term = half;
    let mut sum = term;
    let mut k = 0.0;
    loop {
        k += 1.0;
        term *= -q / (k * (k + 1.0));
        sum += term;
        if term.abs() <= 1e-17 * sum.abs() || k > 60.0 {
            break;
        }
    }
    sum
}

fn j1_miller(x: f64) -> f64 {
    // Even start order well above x; J_n decays super-exponentially past n = x.
    let mut n = (x.ceil() as usize + 40) & !1;
    let two_over_x = 2.0 / x;
    let mut next = 0.0; // J_{n+1}
    let mut cur = 1e-30; // J_n
    let mut norm = 0.0;
    let mut j1 = 0.0;
    while n > 0 {
        let prev = n as f64 * two_over_x * cur - next;
        next = cur;
        cur = prev;
        n -= 1;
        // cur now holds J_n (unnormalized)
        if n == 1 {
            j1 = cur;
        }
        if n.is_multiple_of(2) && n > 0 {
            norm += 2.0 * cur;
        }
        if cur.abs() > 1e250 {
            cur *= 1e-250;
            next *= 1e-250;
            norm *= 1e-250;
            j1 *= 1e-250;
        }
    }
    norm += cur;
    j1 / norm
}

fn j1_asymptotic(x: f64) -> f64 {
    const MU: f64 = 4.0;
    let eight_x = 8.0 * x;
    let mut p = 1.0;
    let mut q = 0.0;
    let mut term: f64 = 1.0;
    let mut prev_abs = f64::INFINITY;
    for k in 1..60 {
        let odd = (2 * k - 1) as f64;
        term *= (MU - odd * odd) / (k as f64 * eight_x);
        let a = term.abs();
        if a >= prev_abs || a < 1e-18 {
            break;
        }
        prev_abs = a;
        // t_k enters P (even k) or Q (odd k) with alternating signs.
        match k % 4 {
            0 => p += term,
            1 => q += term,
            2 => p -= term,
            _ => q -= term,
        }
    }
    let (s, c) = x.sin_cos();
    let cos_chi = (s - c) * FRAC_1_SQRT_2;
    let sin_chi = -(s + c) * FRAC_1_SQRT_2;
    (2.0 / (PI * x)).sqrt() * (p * cos_chi - q * sin_chi)
}

/// Exponentially scaled modified Bessel function `e^{-|x|} I0(x)`.
pub fn bessel_i0e(x: f64) -> f64 {
    let ax = x.abs();
    if ax <= 30.0 {
        let q = 0.25 * ax * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        let mut k = 0.0;
        loop {
            k += 1.0;
            term *= q / (k * k);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        sum * (-ax).exp()
    } else {
        let eight_x = 8.0 * ax;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..100 {
            let odd = (2 * k - 1) as f64;
            term *= odd * odd / (k as f64 * eight_x);
            sum += term;
            if term <= 1e-17 * sum {
                break;
            }
        }
        sum / (2.0 * PI * ax).sqrt()
    }
}

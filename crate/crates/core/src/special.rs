//! Gamma-function helpers and small combinatorics.

pub use statrs::function::gamma::{gamma, ln_gamma};

/// 1/Gamma(x), exactly zero at the poles 0, -1, -2, ... Arguments within
/// rounding of a pole (such as `b - a k` for rational a, b) count as poles.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.5 && (x - x.round()).abs() <= 4.0 * f64::EPSILON * x.abs().max(1.0) && x.round() <= 0.0 {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

pub fn ln_factorial(k: u64) -> f64 {
    ln_gamma(k as f64 + 1.0)
}

pub fn factorial(k: u64) -> f64 {
    (1..=k).fold(1.0, |acc, i| acc * i as f64)
}

pub fn binomial(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Express `x` as p/q with q <= `max_q` when it is that close to a rational.
pub fn small_rational(x: f64, max_q: u32) -> Option<(u32, u32)> {
    for q in 1..=max_q {
        let p = (x * q as f64).round();
        if p >= 1.0 && (p / q as f64 - x).abs() <= 1e-13 * x.abs().max(1.0) {
            return Some((p as u32, q));
        }
    }
    None
}

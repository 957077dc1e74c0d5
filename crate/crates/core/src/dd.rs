//! Double-double arithmetic, used where a series sum cancels heavily.

use num_complex::Complex64;
use std::ops::{Add, Div, Mul, Neg, Sub};

const LN2: Dd = Dd { hi: std::f64::consts::LN_2, lo: 2.3190468138462996e-17 };
const HALF_LN_2PI: Dd = Dd { hi: 0.9189385332046728, lo: -3.8782941580672414e-17 };
// (numerator, denominator) of B_{2k}, k = 1..10
const BERNOULLI: [(f64, f64); 10] = [
    (1.0, 6.0),
    (-1.0, 30.0),
    (1.0, 42.0),
    (-1.0, 30.0),
    (5.0, 66.0),
    (-691.0, 2730.0),
    (7.0, 6.0),
    (-3617.0, 510.0),
    (43867.0, 798.0),
    (-174611.0, 330.0),
];

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    let e = (a - (s - bb)) + (b - bb);
    (s, e)
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

impl Dd {
    pub const ZERO: Dd = Dd { hi: 0.0, lo: 0.0 };
    pub const ONE: Dd = Dd { hi: 1.0, lo: 0.0 };

    pub fn new(x: f64) -> Self {
        Dd { hi: x, lo: 0.0 }
    }

    /// Exact quotient p/q to double-double precision.
    pub fn ratio(p: f64, q: f64) -> Self {
        Dd::new(p) / Dd::new(q)
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    pub fn mul_f64(self, b: f64) -> Self {
        let (p, e) = two_prod(self.hi, b);
        let (s, e) = quick_two_sum(p, e + self.lo * b);
        Dd { hi: s, lo: e }
    }

    pub fn exp(self) -> Self {
        if self.hi > 709.0 {
            return Dd::new(f64::INFINITY);
        }
        if self.hi < -745.0 {
            return Dd::ZERO;
        }
        let k = (self.hi / LN2.hi).round();
        // r = (x - k ln2) / 32, so |r| < 0.011
        let r = (self - LN2.mul_f64(k)).mul_f64(1.0 / 32.0);
        let mut term = Dd::ONE;
        let mut sum = Dd::ONE;
        for i in 1..30 {
            term = (term * r) / Dd::new(i as f64);
            sum = sum + term;
            if term.hi.abs() < 1e-34 * sum.hi.abs() {
                break;
            }
        }
        for _ in 0..5 {
            sum = sum * sum;
        }
        let scale = 2f64.powi(k as i32);
        Dd { hi: sum.hi * scale, lo: sum.lo * scale }
    }

    /// Natural log of a positive value (one Newton step on `exp`).
    pub fn ln(self) -> Self {
        let y0 = Dd::new(self.hi.ln());
        y0 + self * (-y0).exp() - Dd::ONE
    }

    /// ln Gamma(x) for x > 0: Stirling series after an upward shift.
    pub fn ln_gamma(self) -> Self {
        assert!(self.hi > 0.0, "ln_gamma needs a positive argument");
        let mut z = self;
        let mut shift = Dd::ONE;
        while z.hi < 30.0 {
            shift = shift * z;
            z = z + Dd::ONE;
        }
        let lz = z.ln();
        let mut s = (z - Dd::new(0.5)) * lz - z + HALF_LN_2PI;
        let inv = Dd::ONE / z;
        let inv2 = inv * inv;
        let mut pw = inv;
        for (k, (num, den)) in BERNOULLI.iter().enumerate() {
            let k2 = 2.0 * (k as f64 + 1.0);
            s = s + pw * Dd::ratio(*num, den * k2 * (k2 - 1.0));
            pw = pw * inv2;
        }
        s - shift.ln()
    }

    /// 1/Gamma(x) for x > 0.
    pub fn rgamma(self) -> Self {
        (-self.ln_gamma()).exp()
    }
}

impl From<f64> for Dd {
    fn from(x: f64) -> Self {
        Dd::new(x)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd { hi: -self.hi, lo: -self.lo }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, b: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, b.hi);
        let (t, f) = two_sum(self.lo, b.lo);
        let (s, e) = quick_two_sum(s, e + t);
        let (s, e) = quick_two_sum(s, e + f);
        Dd { hi: s, lo: e }
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, b: Dd) -> Dd {
        self + (-b)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, b: Dd) -> Dd {
        let (p, e) = two_prod(self.hi, b.hi);
        let e = e + (self.hi * b.lo + self.lo * b.hi);
        let (s, e) = quick_two_sum(p, e);
        Dd { hi: s, lo: e }
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, b: Dd) -> Dd {
        let q1 = self.hi / b.hi;
        let r = self - b.mul_f64(q1);
        let q2 = r.hi / b.hi;
        let r = r - b.mul_f64(q2);
        let q3 = r.hi / b.hi;
        let (s, e) = quick_two_sum(q1, q2);
        Dd { hi: s, lo: e } + Dd::new(q3)
    }
}

/// Complex number with double-double parts.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct CDd {
    pub re: Dd,
    pub im: Dd,
}

impl CDd {
    pub const ZERO: CDd = CDd { re: Dd::ZERO, im: Dd::ZERO };
    pub const ONE: CDd = CDd { re: Dd::ONE, im: Dd::ZERO };

    pub fn from_c64(z: Complex64) -> Self {
        CDd { re: Dd::new(z.re), im: Dd::new(z.im) }
    }

    pub fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    pub fn norm_f64(self) -> f64 {
        self.to_c64().norm()
    }

    pub fn scale(self, s: Dd) -> Self {
        CDd { re: self.re * s, im: self.im * s }
    }

    pub fn div_real(self, s: Dd) -> Self {
        CDd { re: self.re / s, im: self.im / s }
    }
}

impl Add for CDd {
    type Output = CDd;
    fn add(self, b: CDd) -> CDd {
        CDd { re: self.re + b.re, im: self.im + b.im }
    }
}

impl Sub for CDd {
    type Output = CDd;
    fn sub(self, b: CDd) -> CDd {
        CDd { re: self.re - b.re, im: self.im - b.im }
    }
}

impl Mul for CDd {
    type Output = CDd;
    fn mul(self, b: CDd) -> CDd {
        CDd {
            re: self.re * b.re - self.im * b.im,
            im: self.re * b.im + self.im * b.re,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn third_times_three() {
        let t = Dd::ratio(1.0, 3.0);
        let back = t.mul_f64(3.0) - Dd::ONE;
        assert!(back.to_f64().abs() < 1e-31);
    }

    #[test]
    fn cancellation_survives() {
        let big = Dd::new(1e17);
        let s = (big + Dd::new(1.0)) - big;
        assert_eq!(s.to_f64(), 1.0);
    }

    #[test]
    fn exp_ln_round_trip() {
        for &x in &[0.3, 1.0, 2.5, 17.25, 150.0] {
            let d = Dd::new(x);
            let back = d.ln().exp();
            assert!(((back - d) / d).to_f64().abs() < 1e-29, "{x}");
        }
        let e = Dd::ONE.exp();
        assert!((e.hi - std::f64::consts::E).abs() < 1e-15);
    }

    #[test]
    fn gamma_exact_points() {
        // Gamma(n) = (n-1)!
        let mut f = Dd::ONE;
        for n in 1..25 {
            if n > 1 {
                f = f.mul_f64((n - 1) as f64);
            }
            let g = Dd::new(n as f64).ln_gamma().exp();
            assert!(((g - f) / f).to_f64().abs() < 1e-28, "n={n}");
        }
        // Gamma(1/2)^2 = pi
        let h = Dd::new(0.5).ln_gamma().exp();
        let pi = Dd { hi: std::f64::consts::PI, lo: 1.2246467991473532e-16 };
        assert!(((h * h - pi) / pi).to_f64().abs() < 1e-28);
    }

    #[test]
    fn complex_product() {
        let a = CDd::from_c64(Complex64::new(1.5, -2.0));
        let b = CDd::from_c64(Complex64::new(0.25, 4.0));
        let p = (a * b).to_c64();
        let q = Complex64::new(1.5, -2.0) * Complex64::new(0.25, 4.0);
        assert!((p - q).norm() < 1e-15);
    }
}

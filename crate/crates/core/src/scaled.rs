//! Complex numbers stored as (log-modulus, phase).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::ops::{Div, Mul, Neg};

/// A complex value `e^{log_mag} e^{i phase}`; `log_mag = -inf` is zero.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaledComplex {
    pub log_mag: f64,
    pub phase: f64,
}

/// Reduce an angle into (-pi, pi].
pub fn principal_angle(t: f64) -> f64 {
    if t > -PI && t <= PI {
        return t;
    }
    let mut r = t.rem_euclid(2.0 * PI);
    if r > PI {
        r -= 2.0 * PI;
    }
    if r <= -PI {
        r += 2.0 * PI;
    }
    r
}

impl ScaledComplex {
    pub const ZERO: ScaledComplex = ScaledComplex { log_mag: f64::NEG_INFINITY, phase: 0.0 };
    pub const ONE: ScaledComplex = ScaledComplex { log_mag: 0.0, phase: 0.0 };

    pub fn new(log_mag: f64, phase: f64) -> Self {
        if log_mag == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        ScaledComplex { log_mag, phase: principal_angle(phase) }
    }

    pub fn from_complex(z: Complex64) -> Self {
        if z.re == 0.0 && z.im == 0.0 {
            return Self::ZERO;
        }
        ScaledComplex { log_mag: z.norm().ln(), phase: z.arg() }
    }

    pub fn from_real(x: f64) -> Self {
        Self::from_complex(Complex64::new(x, 0.0))
    }

    /// `e^w` without forming the exponential.
    pub fn exp(w: Complex64) -> Self {
        Self::new(w.re, w.im)
    }

    pub fn is_zero(&self) -> bool {
        self.log_mag == f64::NEG_INFINITY
    }

    /// Decode to a native complex; may overflow to infinity.
    pub fn to_complex(&self) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar(self.log_mag.exp(), self.phase)
    }

    pub fn abs(&self) -> f64 {
        self.log_mag.exp()
    }

    pub fn conj(&self) -> Self {
        if self.is_zero() {
            return *self;
        }
        Self::new(self.log_mag, -self.phase)
    }

    pub fn scale_real(&self, s: f64) -> Self {
        *self * Self::from_real(s)
    }

    /// Multiply by the positive real `e^{ln_s}`.
    pub fn mul_ln(&self, ln_s: f64) -> Self {
        if self.is_zero() {
            return *self;
        }
        Self::new(self.log_mag + ln_s, self.phase)
    }

    pub fn powf(&self, p: f64) -> Self {
        if self.is_zero() {
            return if p == 0.0 { Self::ONE } else { Self::ZERO };
        }
        Self::new(self.log_mag * p, self.phase * p)
    }

    /// Sum in the frame of the larger term.
    pub fn add(&self, other: &Self) -> Self {
        if self.is_zero() {
            return *other;
        }
        if other.is_zero() {
            return *self;
        }
        let (big, small) = if self.log_mag >= other.log_mag { (self, other) } else { (other, self) };
        let rel = Complex64::from_polar((small.log_mag - big.log_mag).exp(), small.phase - big.phase);
        let s = Complex64::new(1.0, 0.0) + rel;
        if s.re == 0.0 && s.im == 0.0 {
            return Self::ZERO;
        }
        Self::new(big.log_mag + s.norm().ln(), big.phase + s.arg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&(-*other))
    }

    /// Value relative to `reference`, as a native complex.
    pub fn relative_to(&self, reference: f64) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        Complex64::from_polar((self.log_mag - reference).exp(), self.phase)
    }

    /// Sum of many terms, accumulated relative to the largest one.
    pub fn sum(terms: &[ScaledComplex]) -> Self {
        let m = terms.iter().map(|t| t.log_mag).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Self::ZERO;
        }
        let s: Complex64 = terms.iter().map(|t| t.relative_to(m)).sum();
        Self::from_complex(s) * Self::new(m, 0.0)
    }

    /// |a - b| / max(|a|, |b|), computed without decoding.
    pub fn rel_diff(a: &Self, b: &Self) -> f64 {
        let m = a.log_mag.max(b.log_mag);
        if m == f64::NEG_INFINITY {
            return 0.0;
        }
        (a.relative_to(m) - b.relative_to(m)).norm()
    }
}

impl Mul for ScaledComplex {
    type Output = ScaledComplex;
    fn mul(self, b: ScaledComplex) -> ScaledComplex {
        if self.is_zero() || b.is_zero() {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::new(self.log_mag + b.log_mag, self.phase + b.phase)
    }
}

impl Div for ScaledComplex {
    type Output = ScaledComplex;
    fn div(self, b: ScaledComplex) -> ScaledComplex {
        if self.is_zero() {
            return ScaledComplex::ZERO;
        }
        ScaledComplex::new(self.log_mag - b.log_mag, self.phase - b.phase)
    }
}

impl Neg for ScaledComplex {
    type Output = ScaledComplex;
    fn neg(self) -> ScaledComplex {
        if self.is_zero() {
            return self;
        }
        ScaledComplex::new(self.log_mag, self.phase + PI)
    }
}

//! Two-parameter Mittag-Leffler functions `E_{a,b}` and their derivatives.
//!
//! Small arguments use the Taylor series summed in double-double; large
//! arguments use the exponential part `(1/a) λ^{(1-b)/a} e^{λ^{1/a}}` minus
//! the algebraic tail. When `1/a` is an integer the tail is summed exactly
//! through the incomplete-gamma continued fraction, otherwise the divergent
//! tail series is cut at its smallest term.

use crate::dd::{CDd, Dd};
use crate::error::{no_converge, param, Result};
use crate::fock::ln_phi_c;
use crate::scaled::{principal_angle, ScaledComplex};
use crate::special::{ln_gamma, rgamma, small_rational};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Series is used while `|λ|^{1/a}` stays below this radius.
pub const CROSSOVER: f64 = 25.0;
pub const TERM_CAP: usize = 100_000;
pub const DEFAULT_TOL: f64 = 1e-17;
/// Exponential part is kept for `|arg λ| <= SECTOR * a`, i.e. up to the Stokes
/// line where it is smallest.
pub const SECTOR: f64 = PI;

const CF_MIN_RADIUS: f64 = 4.0;
const TAIL_RADIUS: f64 = 18.0;
const TAIL_TERMS: usize = 2000;
const CF_ITERATIONS: usize = 20_000;
/// Double-precision sums are trusted while the summed moduli exceed the
/// result by at most this factor.
const FAST_CANCELLATION: f64 = 1e3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    pub a: f64,
    pub b: f64,
    pub m: u32,
}

impl MLParams {
    pub fn new(a: f64, b: f64, m: u32) -> Result<Self> {
        if !(a > 0.0 && a <= 1.0) {
            return Err(param("a", format!("order must lie in (0,1], got {a}")));
        }
        if !(b > 0.0 && b.is_finite()) {
            return Err(param("b", format!("must be positive, got {b}")));
        }
        Ok(MLParams { a, b, m })
    }

    /// `1/a` when it is an integer.
    fn inverse_order(&self) -> Option<u32> {
        match small_rational(self.a, 12) {
            Some((1, q)) => Some(q),
            _ => None,
        }
    }
}

/// Principal argument in (-pi, pi]; a negative real axis maps to +pi.
pub fn arg(z: Complex64) -> f64 {
    if z.im == 0.0 {
        return if z.re < 0.0 { PI } else { 0.0 };
    }
    z.im.atan2(z.re)
}

/// Principal logarithm.
pub fn cln(z: Complex64) -> Complex64 {
    Complex64::new(z.norm().ln(), arg(z))
}

/// Principal power `z^p`.
pub fn cpow(z: Complex64, p: f64) -> Complex64 {
    if z.re == 0.0 && z.im == 0.0 {
        return if p == 0.0 { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
    }
    (cln(z) * p).exp()
}

fn check_tol(tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(param("tol", "must be positive"));
    }
    Ok(())
}

/// `E_{a,b}(λ)`.
pub fn ml_eval(p: &MLParams, lambda: Complex64, tol: f64) -> Result<ScaledComplex> {
    if p.m != 0 {
        return Err(param("m", "ml_eval takes m = 0; use ml_deriv"));
    }
    ml_deriv(p, lambda, tol)
}

/// `E^{(m)}_{a,b}(λ)`, choosing the series or the asymptotic branch by radius.
pub fn ml_deriv(p: &MLParams, lambda: Complex64, tol: f64) -> Result<ScaledComplex> {
    check_tol(tol)?;
    if lambda.norm().powf(1.0 / p.a) <= CROSSOVER {
        ml_series(p, lambda, tol)
    } else {
        ml_asymptotic(p, lambda)
    }
}

/// Term-wise differentiated Taylor series, whatever the radius.
pub fn ml_series(p: &MLParams, lambda: Complex64, tol: f64) -> Result<ScaledComplex> {
    check_tol(tol)?;
    finite_series(series_dd(p, lambda, tol)?.to_c64())
}

/// Successive Taylor coefficients `(k+m)!/k! / Gamma(a(k+m)+b)` in double-double.
struct Coefficients {
    a_dd: Dd,
    b_dd: Dd,
    m: usize,
    step: usize,
    q: usize,
    ring: Vec<Dd>,
    k: usize,
}

impl Coefficients {
    fn new(p: &MLParams) -> Self {
        let rational = small_rational(p.a, 12);
        let (step, q) = rational.map(|(s, q)| (s as usize, q as usize)).unwrap_or((0, 0));
        let a_dd = match rational {
            Some((s, q)) => Dd::ratio(s as f64, q as f64),
            None => Dd::new(p.a),
        };
        Coefficients { a_dd, b_dd: Dd::new(p.b), m: p.m as usize, step, q, ring: Vec::with_capacity(q), k: 0 }
    }

    fn arg_at(&self, k: usize) -> Dd {
        self.a_dd.mul_f64((k + self.m) as f64) + self.b_dd
    }
}

impl Iterator for Coefficients {
    type Item = Dd;

    fn next(&mut self) -> Option<Dd> {
        let k = self.k;
        let q = self.q;
        // 1/Gamma(a(k+m)+b), by exact recursion inside each residue class mod q.
        let inv_g = if self.step > 0 && k >= q {
            let s0 = self.arg_at(k - q);
            let mut prod = Dd::ONE;
            for i in 0..self.step {
                prod = prod * (s0 + Dd::new(i as f64));
            }
            self.ring[k % q] / prod
        } else {
            self.arg_at(k).rgamma()
        };
        if self.step > 0 {
            if self.ring.len() < q {
                self.ring.push(inv_g);
            } else {
                self.ring[k % q] = inv_g;
            }
        }
        let mut ff = Dd::ONE;
        for i in 1..=self.m {
            ff = ff.mul_f64((k + i) as f64);
        }
        self.k += 1;
        Some(ff * inv_g)
    }
}

/// Forward summation with the three-quiet-terms stop rule.
fn sum_series(coeffs: impl Iterator<Item = Dd>, lambda: Complex64, tol: f64) -> Result<CDd> {
    let lam = CDd::from_c64(lambda);
    let mut pw = CDd::ONE;
    let mut sum = CDd::ZERO;
    let mut quiet = 0;
    for (k, c) in coeffs.enumerate() {
        if k >= TERM_CAP {
            break;
        }
        let term = pw.scale(c);
        sum = sum + term;
        if term.norm_f64() <= tol * sum.norm_f64() {
            quiet += 1;
            if quiet >= 3 {
                return Ok(sum);
            }
        } else {
            quiet = 0;
        }
        pw = pw * lam;
    }
    Err(no_converge("Mittag-Leffler series", TERM_CAP, Some(ScaledComplex::from_complex(sum.to_c64()))))
}

/// Plain double sum; `None` when the terms cancel too much for double precision.
fn sum_series_fast(coeffs: &[Dd], lambda: Complex64, tol: f64, force: bool) -> Option<Complex64> {
    let mut pw = Complex64::new(1.0, 0.0);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut mass = 0.0;
    let mut quiet = 0;
    for c in coeffs {
        let term = pw * c.hi;
        sum += term;
        let t = term.norm();
        mass += t;
        let reference = if force { mass } else { sum.norm() };
        if t <= tol * reference {
            quiet += 1;
            if quiet >= 3 {
                return if force || mass <= FAST_CANCELLATION * sum.norm() { Some(sum) } else { None };
            }
        } else {
            quiet = 0;
        }
        pw *= lambda;
    }
    None
}

pub(crate) fn series_dd(p: &MLParams, lambda: Complex64, tol: f64) -> Result<CDd> {
    sum_series(Coefficients::new(p), lambda, tol)
}

/// Evaluator for one `(a, b, m)` that caches the Taylor coefficients, for
/// callers that sample the same function at many points.
#[derive(Clone, Debug)]
pub struct MittagLeffler {
    params: MLParams,
    coeffs: Vec<Dd>,
}

impl MittagLeffler {
    pub fn new(params: MLParams) -> Self {
        // Enough terms for every point of the series regime.
        let radius = CROSSOVER.powf(params.a);
        let ln_r = radius.ln();
        let mut coeffs = Vec::new();
        let mut peak = f64::NEG_INFINITY;
        for (k, c) in Coefficients::new(&params).enumerate() {
            let size = c.hi.abs().ln() + k as f64 * ln_r;
            peak = peak.max(size);
            coeffs.push(c);
            if k > 8 && size < peak - 100.0 || k + 1 >= TERM_CAP {
                break;
            }
        }
        MittagLeffler { params, coeffs }
    }

    pub fn params(&self) -> &MLParams {
        &self.params
    }

    /// First `count` Taylor coefficients of `E^{(m)}_{a,b}`.
    pub fn taylor(&self, count: usize) -> Vec<f64> {
        let extra = Coefficients::new(&self.params).skip(self.coeffs.len());
        self.coeffs.iter().copied().chain(extra).take(count).map(|c| c.to_f64()).collect()
    }

    /// Taylor series at `λ`, reusing the cached coefficients.
    pub fn series(&self, lambda: Complex64, tol: f64) -> Result<ScaledComplex> {
        check_tol(tol)?;
        if let Some(s) = sum_series_fast(&self.coeffs, lambda, tol.max(1e-16), false) {
            return Ok(ScaledComplex::from_complex(s));
        }
        let s = if lambda.norm().powf(1.0 / self.params.a) <= CROSSOVER {
            sum_series(self.coeffs.iter().copied().chain(Coefficients::new(&self.params).skip(self.coeffs.len())), lambda, tol)?
        } else {
            series_dd(&self.params, lambda, tol)?
        };
        finite_series(s.to_c64())
    }

    /// Value accurate relative to the largest modulus on the circle `|λ|`
    /// (the coefficients are positive), which is what weighted integrals need.
    pub fn eval_fast(&self, lambda: Complex64) -> Result<ScaledComplex> {
        if lambda.norm().powf(1.0 / self.params.a) <= CROSSOVER {
            if let Some(s) = sum_series_fast(&self.coeffs, lambda, 1e-16, true) {
                return finite_series(s);
            }
            return self.series(lambda, DEFAULT_TOL);
        }
        ml_asymptotic(&self.params, lambda)
    }

    /// Same as `ml_deriv`.
    pub fn eval(&self, lambda: Complex64, tol: f64) -> Result<ScaledComplex> {
        check_tol(tol)?;
        if lambda.norm().powf(1.0 / self.params.a) <= CROSSOVER {
            self.series(lambda, tol)
        } else {
            ml_asymptotic(&self.params, lambda)
        }
    }
}

fn finite_series(s: Complex64) -> Result<ScaledComplex> {
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(no_converge("series (overflow)", 0, None));
    }
    Ok(ScaledComplex::from_complex(s))
}

fn in_sector(p: &MLParams, lambda: Complex64) -> bool {
    arg(lambda).abs() <= SECTOR * p.a
}

/// m-th derivative of the exponential part, with no sector cut.
pub fn exp_part(p: &MLParams, lambda: Complex64) -> ScaledComplex {
    let a = p.a;
    let logx = Complex64::new(lambda.norm().ln() / a, arg(lambda) / a);
    let x = logx.exp();
    let mut c = vec![1.0 / a];
    let mut p0 = 1.0 - p.b;
    for _ in 0..p.m {
        let mut next = vec![0.0; c.len() + 1];
        for (j, &cj) in c.iter().enumerate() {
            next[j] += cj / a;
            next[j + 1] += cj * (p0 - j as f64) / a;
        }
        c = next;
        p0 += 1.0 - a;
    }
    let inv_x = 1.0 / x;
    let mut s = Complex64::new(0.0, 0.0);
    let mut pw = Complex64::new(1.0, 0.0);
    for cj in &c {
        s += pw * cj;
        pw *= inv_x;
    }
    let lead = logx * p0 + x;
    ScaledComplex::exp(lead) * ScaledComplex::from_complex(s)
}

/// Algebraic tail `sum_k d^m/dλ^m λ^{-k} / Gamma(b - a k)`, cut before its smallest term.
pub fn tail_truncated(p: &MLParams, lambda: Complex64) -> Complex64 {
    let m = p.m as usize;
    let log_l = cln(lambda);
    let ln_abs = lambda.norm().ln();
    let mut sum = Complex64::new(0.0, 0.0);
    let mut prev_size = f64::INFINITY;
    for k in 1..=TAIL_TERMS {
        let kf = k as f64;
        // Smooth size proxy; the actual terms carry an oscillating sine factor.
        let mut size = ln_gamma(p.a * kf + 1.0 - p.b) - (kf + m as f64) * ln_abs;
        for i in 0..m {
            size += (kf + i as f64).ln();
        }
        if size > prev_size {
            break;
        }
        prev_size = size;
        let g = rgamma(p.b - p.a * kf);
        if g == 0.0 {
            continue;
        }
        let mut f = 1.0;
        for i in 0..m {
            f *= -(kf + i as f64);
        }
        let t = (-log_l * (kf + m as f64)).exp() * (f * g);
        sum += t;
        // The size proxy, not the term, decides: the sine factor can make
        // single terms tiny long before the tail is exhausted.
        if size.exp() < 1e-18 * sum.norm() {
            break;
        }
    }
    sum
}

/// `F` with `Gamma(s, x) = e^{-x} x^s F(s, x)` (Legendre continued fraction).
pub fn incomplete_gamma_cf(s: f64, x: Complex64) -> Result<Complex64> {
    let tiny = Complex64::new(1e-150, 0.0);
    let one = Complex64::new(1.0, 0.0);
    let mut bb = x + (1.0 - s);
    let mut c = Complex64::new(1e150, 0.0);
    let mut d = if bb.norm() < 1e-150 { c } else { one / bb };
    let mut h = d;
    for i in 1..CF_ITERATIONS {
        let an = -(i as f64) * (i as f64 - s);
        if an == 0.0 {
            return Ok(h);
        }
        bb += 2.0;
        d = d * an + bb;
        if d.norm() < 1e-150 {
            d = tiny;
        }
        c = bb + an / c;
        if c.norm() < 1e-150 {
            c = tiny;
        }
        d = one / d;
        let del = d * c;
        h *= del;
        if (del - one).norm() < 4e-16 {
            return Ok(h);
        }
    }
    Err(no_converge("incomplete gamma fraction", CF_ITERATIONS, None))
}

/// `λ^m d^m/dλ^m f_b = sum_j w_j f_{b-j}` for any f obeying the order-lowering
/// recurrence of the Mittag-Leffler family.
fn shift_weights(a: f64, b: f64, m: u32) -> Vec<f64> {
    let mut w = vec![1.0];
    for i in 0..m {
        let mut next = vec![0.0; w.len() + 1];
        for (j, &c) in w.iter().enumerate() {
            next[j + 1] += c / a;
            next[j] += c * (-(b - j as f64 - 1.0) / a - i as f64);
        }
        w = next;
    }
    w
}

/// Exact algebraic tail for `a = 1/q`, valid inside the sector.
fn tail_exact(p: &MLParams, q: u32, lambda: Complex64) -> Result<Complex64> {
    let x = lambda.powi(q as i32);
    let a = 1.0 / q as f64;
    let zeroth = |b: f64| -> Result<Complex64> {
        let mut s = Complex64::new(0.0, 0.0);
        let mut pw = Complex64::new(1.0, 0.0);
        for i in 0..q {
            let sh = b + i as f64 * a - 1.0;
            let g = rgamma(sh);
            if g != 0.0 {
                s += pw * incomplete_gamma_cf(sh, x)? * g;
            }
            pw *= lambda;
        }
        Ok(s)
    };
    if p.m == 0 {
        return zeroth(p.b);
    }
    let w = shift_weights(a, p.b, p.m);
    let mut s = Complex64::new(0.0, 0.0);
    for (j, wj) in w.iter().enumerate() {
        if *wj != 0.0 {
            s += zeroth(p.b - j as f64)? * *wj;
        }
    }
    Ok(s / lambda.powi(p.m as i32))
}

/// Exponential part (kept only inside the sector) and the algebraic tail, so
/// that `E^{(m)} = X - T` at large radius.
fn asymptotic_parts(p: &MLParams, lambda: Complex64, need_tail: bool) -> Result<(ScaledComplex, Complex64)> {
    let inside = in_sector(p, lambda);
    let x = if inside { exp_part(p, lambda) } else { ScaledComplex::ZERO };
    if !need_tail {
        return Ok((x, Complex64::new(0.0, 0.0)));
    }
    let t = match p.inverse_order() {
        // The fraction stalls near the sector edge, where `λ^q` nears the cut.
        Some(q) if inside => tail_exact(p, q, lambda).unwrap_or_else(|_| tail_truncated(p, lambda)),
        _ => tail_truncated(p, lambda),
    };
    Ok((x, t))
}

/// Asymptotic branch, whatever the radius.
pub fn ml_asymptotic(p: &MLParams, lambda: Complex64) -> Result<ScaledComplex> {
    // Skip the tail when the exponential part swamps it.
    let scale = (1.0 + lambda.norm()).ln() * (p.m as f64 + 1.0) + 8.0;
    let x_only = if in_sector(p, lambda) { exp_part(p, lambda) } else { ScaledComplex::ZERO };
    let need_tail = x_only.log_mag < scale + 45.0;
    let (x, t) = asymptotic_parts(p, lambda, need_tail)?;
    Ok(x.sub(&ScaledComplex::from_complex(t)))
}

/// Splitting `E^{(m)} = X - T` with `T` accurate relative to itself. `X` is the
/// exponential part inside the sector and zero outside.
pub fn ml_split(p: &MLParams, lambda: Complex64, tol: f64) -> Result<(ScaledComplex, Complex64)> {
    let inside = in_sector(p, lambda);
    let radius = lambda.norm().powf(1.0 / p.a);
    if inside && radius >= CF_MIN_RADIUS {
        // Near the sector edge the fraction can stall; the generic paths below take over.
        if let Some(Ok(t)) = p.inverse_order().map(|q| tail_exact(p, q, lambda)) {
            return Ok((exp_part(p, lambda), t));
        }
    }
    // Outside the sector the series is the tail itself, with no cancellation.
    if !inside && radius <= CROSSOVER {
        return Ok((ScaledComplex::ZERO, -ml_series(p, lambda, tol)?.to_complex()));
    }
    if radius > TAIL_RADIUS {
        return asymptotic_parts(p, lambda, true);
    }
    let e = ml_series(p, lambda, tol)?;
    let x = if inside { exp_part(p, lambda) } else { ScaledComplex::ZERO };
    Ok((x, x.sub(&e).to_complex()))
}

/// `(1+|λ|)^{m(ℓ-1)+(1-b)ℓ} φ_1(λ)`, in log form.
pub fn ln_ml_envelope(ell: f64, b: f64, m: u32, lambda: Complex64) -> Result<f64> {
    if !(ell >= 1.0) {
        return Err(param("ell", "must be >= 1"));
    }
    if !(b > 0.0 && b <= 1.0) {
        return Err(param("b", format!("envelope needs b in (0,1], got {b}")));
    }
    let e = m as f64 * (ell - 1.0) + (1.0 - b) * ell;
    Ok(e * (1.0 + lambda.norm()).ln() + ln_phi_c(1.0, ell, lambda))
}

pub fn ml_envelope(ell: f64, b: f64, m: u32, lambda: Complex64) -> Result<f64> {
    ln_ml_envelope(ell, b, m, lambda).map(f64::exp)
}

/// Worst series-vs-asymptotic disagreement over an annulus and a ray fan.
#[derive(Clone, Debug, Serialize)]
pub struct OverlapReport {
    pub a: f64,
    pub b: f64,
    pub m: u32,
    /// Inner and outer radius in `|λ|^{1/a}`.
    pub annulus: (f64, f64),
    pub rays: usize,
    pub max_rel: f64,
    pub worst: (f64, f64),
}

/// Compare both branches on `|λ|^{1/a} ∈ [lo, hi]` (`radii` points) along
/// `rays` rays spread over `|arg λ| ≤ max_arg`.
pub fn overlap_report(p: &MLParams, lo: f64, hi: f64, radii: usize, rays: usize, max_arg: f64, tol: f64) -> Result<OverlapReport> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(param("annulus", "need 0 < lo <= hi"));
    }
    if radii == 0 || rays == 0 {
        return Err(param("grid", "must be non-empty"));
    }
    let mut out = OverlapReport { a: p.a, b: p.b, m: p.m, annulus: (lo, hi), rays, max_rel: 0.0, worst: (lo, 0.0) };
    for i in 0..radii {
        let t = if radii == 1 { 0.0 } else { i as f64 / (radii - 1) as f64 };
        let r = (lo + (hi - lo) * t).powf(p.a);
        for j in 0..rays {
            let th = if rays == 1 { 0.0 } else { -max_arg + 2.0 * max_arg * j as f64 / (rays - 1) as f64 };
            let lambda = ray(r, th);
            let s = ml_series(p, lambda, tol)?;
            let x = ml_asymptotic(p, lambda)?;
            let e = ScaledComplex::rel_diff(&s, &x);
            if e > out.max_rel {
                out.max_rel = e;
                out.worst = (r, th);
            }
        }
    }
    Ok(out)
}

/// Reduced phase helper re-exported for callers building rays.
pub fn ray(radius: f64, angle: f64) -> Complex64 {
    Complex64::from_polar(radius, principal_angle(angle))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn value_at_origin() {
        let p = MLParams::new(1.0, 1.0, 0).unwrap();
        let v = ml_eval(&p, c(0.0, 0.0), DEFAULT_TOL).unwrap().to_complex();
        assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        let p = MLParams::new(0.5, 0.75, 0).unwrap();
        let v = ml_eval(&p, c(0.0, 0.0), DEFAULT_TOL).unwrap().to_complex();
        assert!((v.re - rgamma(0.75)).abs() < 1e-15);
    }

    #[test]
    fn exponential_case() {
        let p = MLParams::new(1.0, 1.0, 0).unwrap();
        let z = c(1.0, 2.0);
        let v = ml_eval(&p, z, DEFAULT_TOL).unwrap().to_complex();
        assert!((v - z.exp()).norm() < 1e-14 * z.exp().norm());
        assert!((v - c(-1.1312, 2.4717)).norm() < 1e-4);
    }

    #[test]
    fn derivatives_of_exp() {
        let p = MLParams::new(1.0, 1.0, 3).unwrap();
        let v = ml_deriv(&p, c(0.5, 0.0), DEFAULT_TOL).unwrap().to_complex();
        assert!((v.re - 0.5f64.exp()).abs() < 1e-14);
        assert!((v.re - 1.64872).abs() < 1e-5);
    }

    #[test]
    fn second_derivative_matches_differences() {
        let p0 = MLParams::new(0.5, 0.75, 0).unwrap();
        let p2 = MLParams::new(0.5, 0.75, 2).unwrap();
        let h = 1e-5;
        let l = c(1.1, 0.0);
        let f = |z: Complex64| series_dd(&p0, z, 1e-30).unwrap();
        let num = (f(l + h) - f(l).scale(Dd::new(2.0)) + f(l - h)).to_c64() / (h * h);
        let d2 = ml_deriv(&p2, l, DEFAULT_TOL).unwrap().to_complex();
        assert!((num - d2).norm() / d2.norm() < 1e-6, "{num} vs {d2}");
    }

    #[test]
    fn bad_params() {
        assert!(MLParams::new(0.0, 1.0, 0).is_err());
        assert!(MLParams::new(1.2, 1.0, 0).is_err());
        assert!(MLParams::new(0.5, -1.0, 0).is_err());
        let p = MLParams::new(0.5, 1.0, 0).unwrap();
        assert!(ml_eval(&p, c(1.0, 0.0), 0.0).is_err());
        let p = MLParams::new(0.5, 1.0, 1).unwrap();
        assert!(ml_eval(&p, c(1.0, 0.0), 1e-12).is_err());
    }

    #[test]
    fn exp_part_of_exponential() {
        let p = MLParams::new(1.0, 1.0, 2).unwrap();
        let z = c(30.0, 5.0);
        let x = exp_part(&p, z);
        let want = ScaledComplex::exp(z);
        assert!(ScaledComplex::rel_diff(&x, &want) < 1e-13);
    }

    #[test]
    fn incomplete_gamma_integer_order() {
        // Gamma(1, x) = e^{-x}, so F(1, x) = 1/x.
        let x = c(7.0, 3.0);
        let f = incomplete_gamma_cf(1.0, x).unwrap();
        assert!((f - 1.0 / x).norm() < 1e-15);
        // Gamma(2, x) = (1 + x) e^{-x}
        let f = incomplete_gamma_cf(2.0, x).unwrap();
        let want = (1.0 + x) / (x * x);
        assert!((f - want).norm() < 1e-15 * want.norm(), "{f} {want}");
    }

    #[test]
    fn envelope_examples() {
        let v = ml_envelope(1.0, 1.0, 0, c(-1.0, 1.0)).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
        let v = ml_envelope(2.0, 0.5, 1, c(4.0, 0.0)).unwrap();
        let want = 25.0 * 16f64.exp();
        assert!((v - want).abs() < 1e-12 * want);
        assert!(ml_envelope(2.0, 1.5, 0, c(1.0, 0.0)).is_err());
    }

    #[test]
    fn overlap_on_the_exponential() {
        let p = MLParams::new(1.0, 1.0, 0).unwrap();
        let r = overlap_report(&p, 20.0, 30.0, 3, 5, 0.75 * PI, DEFAULT_TOL).unwrap();
        assert!(r.max_rel < 1e-9, "{r:?}");
        assert!(overlap_report(&p, 30.0, 20.0, 3, 5, 1.0, DEFAULT_TOL).is_err());
        assert!(overlap_report(&p, 20.0, 30.0, 0, 5, 1.0, DEFAULT_TOL).is_err());
    }
}

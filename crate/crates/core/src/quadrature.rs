//! Weighted `L^p` norms on ℂⁿ for slice functions `w ↦ F(w·z̄)` and for
//! polynomials, plus the radial moments behind `ρ`-weighted monomial norms.
//!
//! Everything is integrated in log space: radial integrals use a coarse scan
//! followed by adaptive composite tanh-sinh panels, angular integrals use the
//! trapezoid rule with node doubling.

use crate::error::{no_converge, param, Result};
use crate::fock::{ln_monomial_norm_sq, ln_phi_c, ln_weight_radial, norm_vec, Exponent, MultiIndex, MultiIndexPoly, SpaceParams};
use crate::scaled::ScaledComplex;
use crate::special::{ln_factorial, ln_gamma};
use num_complex::Complex64;
use serde_json::json;
use std::f64::consts::PI;

pub use crate::report::{LogRatioStats, RatioReport};

/// Terms this far (in log) below the running total are dropped.
const NEGLIGIBLE: f64 = 80.0;
const SCAN_CAP: usize = 20_000;
const GOLDEN: f64 = 0.618_033_988_749_894_9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuadConfig {
    /// Relative tolerance for every adaptive stage.
    pub tol: f64,
    /// First trapezoid node count on a circle (a power of two).
    pub angular_start: usize,
    pub angular_max: usize,
    /// Nodes per angle on an n-torus, start and cap.
    pub torus_start: usize,
    pub torus_max: usize,
    /// Bisection depth of radial panels.
    pub max_depth: u32,
}

impl Default for QuadConfig {
    fn default() -> Self {
        QuadConfig { tol: 1e-10, angular_start: 64, angular_max: 1 << 16, torus_start: 16, torus_max: 128, max_depth: 12 }
    }
}

impl QuadConfig {
    pub fn with_tol(tol: f64) -> Self {
        QuadConfig { tol, ..Default::default() }
    }

    /// Twice the starting nodes and a tenth of the tolerance.
    pub fn refined(&self) -> Self {
        QuadConfig {
            tol: self.tol / 10.0,
            angular_start: self.angular_start * 2,
            torus_start: self.torus_start * 2,
            torus_max: self.torus_max * 2,
            ..*self
        }
    }
}

/// Running `ln Σ e^{x_i}`.
#[derive(Clone, Copy, Debug)]
struct LogSum {
    shift: f64,
    acc: f64,
}

impl LogSum {
    fn new() -> Self {
        LogSum { shift: f64::NEG_INFINITY, acc: 0.0 }
    }

    fn add(&mut self, x: f64) {
        if x == f64::NEG_INFINITY {
            return;
        }
        if x > self.shift {
            self.acc = self.acc * (self.shift - x).exp() + 1.0;
            self.shift = x;
        } else {
            self.acc += (x - self.shift).exp();
        }
    }

    fn ln(&self) -> f64 {
        if self.acc == 0.0 {
            f64::NEG_INFINITY
        } else {
            self.shift + self.acc.ln()
        }
    }
}

fn ln_sum(a: f64, b: f64) -> f64 {
    let mut s = LogSum::new();
    s.add(a);
    s.add(b);
    s.ln()
}

/// `|e^a - e^b| / e^{scale}`.
fn gap(a: f64, b: f64, scale: f64) -> f64 {
    if a == f64::NEG_INFINITY && b == f64::NEG_INFINITY {
        return 0.0;
    }
    ((a - scale).exp() - (b - scale).exp()).abs()
}

fn finite_or_err(x: f64, what: &str) -> Result<f64> {
    if x.is_nan() || x == f64::INFINITY {
        return Err(no_converge(what, 0, None));
    }
    Ok(x)
}

/// Tanh-sinh on one panel at steps 1/4 and 1/8, as logs of the two estimates.
fn ts_panel(g: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64) -> Result<(f64, f64)> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let node = |t: f64| {
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
        (c + d * u.tanh(), w)
    };
    let mut add = |sum: &mut LogSum, t: f64| -> Result<()> {
        let (x, w) = node(t);
        if w > 0.0 {
            sum.add(finite_or_err(g(x)?, "quadrature integrand")? + w.ln());
        }
        Ok(())
    };
    let mut coarse = LogSum::new();
    for k in -12..=12 {
        add(&mut coarse, k as f64 * 0.25)?;
    }
    let mut odd = LogSum::new();
    for k in (-23..=23).step_by(2) {
        add(&mut odd, k as f64 * 0.125)?;
    }
    let ln_d = d.ln();
    let c_ln = coarse.ln() + 0.25f64.ln() + ln_d;
    let f_ln = ln_sum(coarse.ln(), odd.ln()) + 0.125f64.ln() + ln_d;
    Ok((c_ln, f_ln))
}

/// Adaptive composite tanh-sinh on `[a, b]`; `total` is the log of the size
/// the absolute error is measured against.
fn ts_adaptive(g: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, total: f64, tol: f64, depth: u32) -> Result<f64> {
    let panel = ts_panel(g, a, b)?;
    ts_refine(g, a, b, panel, total, tol, depth, depth)
}

#[allow(clippy::too_many_arguments)]
fn ts_refine(
    g: &mut dyn FnMut(f64) -> Result<f64>,
    a: f64,
    b: f64,
    (c, f): (f64, f64),
    total: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<f64> {
    // Halving the step roughly squares the error, so the finer estimate is
    // off by about the square of the gap.
    let e = gap(f, c, total);
    if e <= 0.1 * tol.sqrt() {
        return Ok(f);
    }
    if depth == 0 {
        if e <= tol.sqrt() {
            return Ok(f);
        }
        return Err(no_converge("tanh-sinh panel", max_depth as usize, Some(ScaledComplex::new(f, 0.0))));
    }
    let m = 0.5 * (a + b);
    let lp = ts_panel(g, a, m)?;
    let left = ts_refine(g, a, m, lp, total, tol, depth - 1, max_depth)?;
    let rp = ts_panel(g, m, b)?;
    let right = ts_refine(g, m, b, rp, total, tol, depth - 1, max_depth)?;
    Ok(ln_sum(left, right))
}

/// `ln ∫_a^b e^{g}` for a bounded interval.
fn ln_integral_interval(g: &mut dyn FnMut(f64) -> Result<f64>, a: f64, b: f64, cfg: &QuadConfig) -> Result<f64> {
    let panel = ts_panel(g, a, b)?;
    ts_refine(g, a, b, panel, panel.1, cfg.tol, cfg.max_depth, cfg.max_depth)
}

/// `ln ∫_origin^∞ e^{g(s)} ds`; `unit` is the length scale of the decay.
fn ln_integral_half_line(g: &mut dyn FnMut(f64) -> Result<f64>, origin: f64, unit: f64, cfg: &QuadConfig) -> Result<f64> {
    let mut pts = vec![origin];
    let mut vals = vec![finite_or_err(g(origin)?, "radial integrand")?];
    let mut best = vals[0];
    let mut d: f64 = 0.0;
    loop {
        d += (0.25 * d).max(unit / 64.0).min(unit / 4.0);
        let s = origin + d;
        let v = finite_or_err(g(s)?, "radial integrand")?;
        best = best.max(v);
        let prev = *vals.last().unwrap();
        pts.push(s);
        vals.push(v);
        let n = vals.len();
        if n > 16 && best > f64::NEG_INFINITY && v < best - NEGLIGIBLE && v <= prev {
            break;
        }
        if n > 16 && best == f64::NEG_INFINITY && d > 1e3 * unit {
            return Ok(f64::NEG_INFINITY);
        }
        if n >= SCAN_CAP {
            return Err(no_converge("radial scan (integrand not decaying)", n, None));
        }
    }
    // Trapezoid estimate of the total, used to judge panels.
    let mut est = LogSum::new();
    for i in 0..pts.len() - 1 {
        est.add(ln_sum(vals[i], vals[i + 1]) + (0.5 * (pts[i + 1] - pts[i])).ln());
    }
    let total = est.ln();
    if total == f64::NEG_INFINITY {
        return Ok(total);
    }
    let mut sum = LogSum::new();
    let mut i = 0;
    while i + 1 < pts.len() {
        let j = (i + 4).min(pts.len() - 1);
        let peak = vals[i..=j].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if peak > total - NEGLIGIBLE {
            sum.add(ts_adaptive(g, pts[i], pts[j], total, cfg.tol, cfg.max_depth)?);
        }
        i = j;
    }
    Ok(sum.ln())
}

/// `ln ∫_0^{2π} e^{h(φ)} dφ` by trapezoid doubling. With `symmetric`,
/// `h(φ) = h(-φ)` and only the upper half circle is sampled.
fn ln_circle_integral(h: &mut dyn FnMut(f64) -> Result<f64>, symmetric: bool, cfg: &QuadConfig) -> Result<f64> {
    let mut n = cfg.angular_start.max(4);
    let mut sum = LogSum::new();
    for j in 0..n {
        if symmetric && j > n / 2 {
            break;
        }
        let mult = if symmetric && j != 0 && j != n / 2 { 2f64.ln() } else { 0.0 };
        sum.add(finite_or_err(h(2.0 * PI * j as f64 / n as f64)?, "angular integrand")? + mult);
    }
    let mut prev = sum.ln() + (2.0 * PI / n as f64).ln();
    loop {
        let m = 2 * n;
        for j in (1..m).step_by(2) {
            if symmetric && j > n {
                break;
            }
            let mult = if symmetric { 2f64.ln() } else { 0.0 };
            sum.add(finite_or_err(h(2.0 * PI * j as f64 / m as f64)?, "angular integrand")? + mult);
        }
        n = m;
        let cur = sum.ln() + (2.0 * PI / n as f64).ln();
        if gap(cur, prev, cur.max(prev)) <= cfg.tol {
            return Ok(cur);
        }
        if n >= cfg.angular_max {
            return Err(no_converge("angular trapezoid", n, Some(ScaledComplex::new(cur, 0.0))));
        }
        prev = cur;
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
fn golden_max(f: &mut dyn FnMut(f64) -> Result<f64>, mut a: f64, mut b: f64, iters: usize) -> Result<(f64, f64)> {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    for _ in 0..iters {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1)?;
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (x1, f1) } else { (x2, f2) })
}

fn ln_weight_p(params: &SpaceParams, p: f64, t: f64) -> f64 {
    p * ln_weight_radial(params.ell, params.alpha, params.rho, t)
}

/// Radius where `(1+t)^ρ e^{-(α/2)t^{2ℓ}}` peaks (zero for ρ <= 0).
fn weight_peak(params: &SpaceParams) -> f64 {
    if params.rho <= 0.0 {
        return 0.0;
    }
    let slope = |t: f64| params.rho / (1.0 + t) - params.alpha * params.ell * t.powf(2.0 * params.ell - 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    while slope(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if slope(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Decay length of `e^{-(αp/2) r^{2ℓ}}`.
fn unit_length(params: &SpaceParams, p: f64) -> f64 {
    (2.0 / (params.alpha * p)).powf(1.0 / (2.0 * params.ell))
}

fn check_f_space(params: &SpaceParams) -> Result<()> {
    if !(params.alpha > 0.0) {
        return Err(param("alpha", "norms need alpha > 0"));
    }
    Ok(())
}

/// `w ↦ F(w·z̄)` for a one-variable `F` and an anchor `z`.
pub struct SliceFunction<F> {
    pub f: F,
    pub anchor: Vec<Complex64>,
    /// `|F(conj λ)| = |F(λ)|`, so half of each circle suffices.
    pub conj_symmetric: bool,
}

impl<F: Fn(Complex64) -> Result<ScaledComplex>> SliceFunction<F> {
    pub fn new(f: F, anchor: Vec<Complex64>, conj_symmetric: bool) -> Self {
        SliceFunction { f, anchor, conj_symmetric }
    }

    pub fn eval(&self, w: &[Complex64]) -> Result<ScaledComplex> {
        let t: Complex64 = w.iter().zip(&self.anchor).map(|(a, b)| a * b.conj()).sum();
        (self.f)(t)
    }
}

/// `ln ‖F(·z̄)‖_{L^p_{α,ρ}}`. A unitary map sends z to |z|e₁, so the integral
/// runs over `v₁ ∈ ℂ` against the weight integrated out over `|v'|`.
pub fn ln_norm_slice<F>(sf: &SliceFunction<F>, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64>
where
    F: Fn(Complex64) -> Result<ScaledComplex>,
{
    check_f_space(params)?;
    if sf.anchor.len() != params.n {
        return Err(crate::Error::Dimension(sf.anchor.len(), params.n));
    }
    let zr = norm_vec(&sf.anchor);
    let n = params.n;
    let at = |lambda: Complex64| -> Result<f64> { Ok((sf.f)(lambda)?.log_mag) };
    let p = match params.p {
        Exponent::Infinity => return ln_sup_slice(&at, zr, params, sf.conj_symmetric),
        Exponent::Finite(p) => p,
    };
    let unit = unit_length(params, p);
    let ln_outer = if n >= 2 { 2f64.ln() + (n - 1) as f64 * PI.ln() - ln_factorial(n as u64 - 2) } else { 0.0 };
    // ∫_{ℂ^{n-1}} ω(√(s²+|v'|²))^p dv', written over t = √(s²+r²).
    let ln_w = |s: f64| -> Result<f64> {
        if n == 1 {
            return Ok(ln_weight_p(params, p, s));
        }
        let mut g = |t: f64| -> Result<f64> {
            let base = t.ln() + ln_weight_p(params, p, t);
            Ok(if n == 2 { base } else { (n - 2) as f64 * (t * t - s * s).ln() + base })
        };
        Ok(ln_outer + ln_integral_half_line(&mut g, s, unit, cfg)?)
    };
    let ln_f0 = at(Complex64::new(0.0, 0.0))?;
    let ln_a = |s: f64| -> Result<f64> {
        if zr == 0.0 || s == 0.0 {
            return Ok((2.0 * PI).ln() + p * ln_f0);
        }
        let mut h = |phi: f64| -> Result<f64> { Ok(p * at(Complex64::from_polar(zr * s, phi))?) };
        ln_circle_integral(&mut h, sf.conj_symmetric, cfg)
    };
    let mut g = |s: f64| -> Result<f64> {
        if s == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok(s.ln() + ln_w(s)? + ln_a(s)?)
    };
    let radial = ln_integral_half_line(&mut g, 0.0, unit, cfg)?;
    Ok((ln_factorial(n as u64) - n as f64 * PI.ln() + radial) / p)
}

pub fn norm_slice<F>(sf: &SliceFunction<F>, params: &SpaceParams) -> Result<f64>
where
    F: Fn(Complex64) -> Result<ScaledComplex>,
{
    ln_norm_slice(sf, params, &QuadConfig::default()).map(f64::exp)
}

/// Sup of `|F(|z| v₁)| ω*(|v₁|)` with ω* the weight's decreasing envelope
/// (for n = 1 the weight itself).
fn ln_sup_slice(
    at: &dyn Fn(Complex64) -> Result<f64>,
    zr: f64,
    params: &SpaceParams,
    symmetric: bool,
) -> Result<f64> {
    let t0 = if params.n >= 2 { weight_peak(params) } else { 0.0 };
    let env = |s: f64| ln_weight_p(params, 1.0, s.max(t0));
    if zr == 0.0 {
        return Ok(at(Complex64::new(0.0, 0.0))? + env(0.0));
    }
    let obj = |s: f64, phi: f64| -> Result<f64> { Ok(at(Complex64::from_polar(zr * s, phi))? + env(s)) };
    let m = 128;
    let top = if symmetric { m / 2 } else { m - 1 };
    let unit = unit_length(params, 1.0);
    let (mut bs, mut bp, mut best) = (0.0, 0.0, obj(0.0, 0.0)?);
    let mut d: f64 = 0.0;
    let mut n = 0;
    let mut prev_ring = best;
    loop {
        d += (0.25 * d).max(unit / 64.0).min(unit / 8.0);
        n += 1;
        let mut ring = f64::NEG_INFINITY;
        for j in 0..=top {
            let phi = 2.0 * PI * j as f64 / m as f64;
            let v = obj(d, phi)?;
            ring = ring.max(v);
            if v > best {
                best = v;
                bs = d;
                bp = phi;
            }
        }
        if n > 16 && ring < best - 40.0 && ring <= prev_ring {
            break;
        }
        if n >= SCAN_CAP {
            return Err(no_converge("sup scan (weighted modulus not decaying)", n, None));
        }
        prev_ring = ring;
    }
    // Alternate golden-section refinement along the ray and the circle.
    let mut ds = unit / 8.0;
    let mut dp = 2.0 * PI / m as f64;
    for _ in 0..6 {
        let (s, v) = golden_max(&mut |s| obj(s, bp), (bs - ds).max(0.0), bs + ds, 60)?;
        if v > best {
            best = v;
            bs = s;
        }
        let (ph, v) = golden_max(&mut |ph| obj(bs, ph), bp - dp, bp + dp, 60)?;
        if v > best {
            best = v;
            bp = ph;
        }
        ds *= 0.5;
        dp *= 0.5;
    }
    Ok(best)
}

/// `ln ‖φ_c(·z̄)‖_{L^p_{α,ρ}}`.
pub fn ln_phi_norm(c: f64, params: &SpaceParams, z: &[Complex64], cfg: &QuadConfig) -> Result<f64> {
    if !(c >= 0.0) {
        return Err(param("c", "must be >= 0"));
    }
    let ell = params.ell;
    let sf = SliceFunction::new(|l| Ok(ScaledComplex::new(ln_phi_c(c, ell, l), 0.0)), z.to_vec(), true);
    ln_norm_slice(&sf, params, cfg)
}

/// `ln[(1+c^{1/ℓ}|z|)^{ρ-2n(ℓ-1)/p} e^{(c²/2α)|z|^{2ℓ}}]`.
pub fn ln_phi_norm_envelope(c: f64, params: &SpaceParams, z_abs: f64) -> f64 {
    let (n, ell) = (params.n as f64, params.ell);
    let poly = params.rho - 2.0 * n * (ell - 1.0) * params.p.recip();
    poly * (c.powf(1.0 / ell) * z_abs).ln_1p() + c * c / (2.0 * params.alpha) * z_abs.powf(2.0 * ell)
}

/// `‖φ_c(·z̄)‖` against its envelope along `z = r e₁`.
pub fn phi_norm_report(c: f64, params: &SpaceParams, radii: &[f64], cfg: &QuadConfig) -> Result<RatioReport> {
    let mut value = Vec::with_capacity(radii.len());
    let mut envelope = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut z = vec![Complex64::new(0.0, 0.0); params.n];
        z[0] = Complex64::new(r, 0.0);
        value.push(ln_phi_norm(c, params, &z, cfg)?);
        envelope.push(ln_phi_norm_envelope(c, params, r));
    }
    let rec = json!({"kind": "phi_norm", "c": c, "space": params});
    RatioReport::new(rec, params.ell, radii.to_vec(), value, envelope)
}

/// `ln ∫_0^∞ r^k (1+r)^σ e^{-c r^{2ℓ}} dr`.
pub fn ln_radial_moment(k: f64, sigma: f64, c: f64, ell: f64, cfg: &QuadConfig) -> Result<f64> {
    if !(c > 0.0) || !(k > -1.0) {
        return Err(param("moment", "needs c > 0 and k > -1"));
    }
    let e = (k + 1.0) / (2.0 * ell);
    if sigma == 0.0 {
        return Ok(ln_gamma(e) - (2.0 * ell).ln() - e * c.ln());
    }
    let unit = c.powf(-1.0 / (2.0 * ell));
    let mut g = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(if k == 0.0 { 0.0 } else { f64::NEG_INFINITY });
        }
        Ok(k * r.ln() + sigma * r.ln_1p() - c * r.powf(2.0 * ell))
    };
    ln_integral_half_line(&mut g, 0.0, unit, cfg)
}

/// `ln ‖w^ν‖²_{F²_{α,ρ}}`; closed form at ρ = 0, one radial integral otherwise.
pub fn ln_monomial_norm_sq_rho(n: usize, ell: f64, alpha: f64, rho: f64, nu: &MultiIndex, cfg: &QuadConfig) -> Result<f64> {
    if rho == 0.0 {
        return Ok(ln_monomial_norm_sq(n, ell, alpha, nu));
    }
    let d = nu.order() as u64;
    let moment = ln_radial_moment((2 * d + 2 * n as u64 - 1) as f64, 2.0 * rho, alpha, ell, cfg)?;
    Ok(2f64.ln() + ln_factorial(n as u64) + nu.ln_factorial() - ln_factorial(d + n as u64 - 1) + moment)
}

/// `ln ‖w^ν‖_{F^p_{α,ρ}}` for any p: the torus integral is trivial and the
/// simplex integral is a Dirichlet integral, leaving one radial moment.
pub fn ln_monomial_norm(params: &SpaceParams, nu: &MultiIndex, cfg: &QuadConfig) -> Result<f64> {
    check_f_space(params)?;
    let (n, ell, alpha, rho) = (params.n, params.ell, params.alpha, params.rho);
    if nu.dim() != n {
        return Err(crate::Error::Dimension(nu.dim(), n));
    }
    let d = nu.order() as f64;
    match params.p {
        Exponent::Finite(p) => {
            let moment = ln_radial_moment(p * d + (2 * n - 1) as f64, rho * p, 0.5 * p * alpha, ell, cfg)?;
            let simplex: f64 = nu.0.iter().map(|&k| ln_gamma(0.5 * p * k as f64 + 1.0)).sum::<f64>() - ln_gamma(0.5 * p * d + n as f64);
            Ok((2f64.ln() + ln_factorial(n as u64) + moment + simplex) / p)
        }
        Exponent::Infinity => {
            // Moduli peak at u_j = ν_j/|ν|; the radius solves
            // |ν| + ρ r/(1+r) = αℓ r^{2ℓ}, which has at most one positive root.
            let simplex: f64 = nu.0.iter().filter(|&&k| k > 0).map(|&k| 0.5 * k as f64 * (k as f64 / d).ln()).sum();
            let h = |r: f64| d + rho * r / (1.0 + r) - alpha * ell * r.powf(2.0 * ell);
            let r = if h(1e-12) <= 0.0 {
                0.0
            } else {
                let (mut lo, mut hi) = (1e-12, 1.0);
                while h(hi) > 0.0 {
                    hi *= 2.0;
                }
                for _ in 0..200 {
                    let mid = 0.5 * (lo + hi);
                    if h(mid) > 0.0 {
                        lo = mid;
                    } else {
                        hi = mid;
                    }
                }
                0.5 * (lo + hi)
            };
            let radial = if d == 0.0 { 0.0 } else { d * r.ln() };
            Ok(simplex + radial + ln_weight_radial(ell, alpha, rho, r))
        }
    }
}

/// Coordinates `w_j = r √u_j e^{iφ_j}` with u on the simplex, built by
/// stick-breaking from `t ∈ [0,1]^{n-1}`.
fn point(r: f64, t: &[f64], phi: &[f64]) -> Vec<Complex64> {
    let n = phi.len();
    let mut rest = 1.0;
    let mut w = Vec::with_capacity(n);
    for j in 0..n {
        let u = if j + 1 < n { rest * t[j] } else { rest };
        rest -= u;
        w.push(Complex64::from_polar(r * u.max(0.0).sqrt(), phi[j]));
    }
    w
}

/// `ln ∫_{Tⁿ} e^{p g(w)} dφ` at fixed moduli, by product trapezoid doubling.
fn ln_torus(g: &dyn Fn(&[Complex64]) -> f64, r: f64, t: &[f64], n: usize, p: f64, cfg: &QuadConfig) -> Result<f64> {
    // Raw log-sum over the m-grid, skipping the all-even points already
    // counted on the m/2-grid.
    let eval = |m: usize, skip_even: bool| -> Result<LogSum> {
        let mut sum = LogSum::new();
        let mut idx = vec![0usize; n];
        let mut phi = vec![0.0; n];
        loop {
            if !(skip_even && idx.iter().all(|i| i % 2 == 0)) {
                for j in 0..n {
                    phi[j] = 2.0 * PI * idx[j] as f64 / m as f64;
                }
                sum.add(finite_or_err(p * g(&point(r, t, &phi)), "polynomial integrand")?);
            }
            let mut j = 0;
            while j < n {
                idx[j] += 1;
                if idx[j] < m {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                break;
            }
        }
        Ok(sum)
    };
    let cell = |m: usize| n as f64 * (2.0 * PI / m as f64).ln();
    let shrink = |m: usize| (m >> (n - 1)).max(4);
    let (mut m, cap) = (shrink(cfg.torus_start), shrink(cfg.torus_max));
    let mut raw = eval(m, false)?;
    let mut prev = raw.ln() + cell(m);
    loop {
        m *= 2;
        raw.add(eval(m, true)?.ln());
        let cur = raw.ln() + cell(m);
        // The modulus has kinks at zeros, so the cap is accepted as final.
        if gap(cur, prev, cur.max(prev)) <= cfg.tol || m >= cap {
            return Ok(cur);
        }
        prev = cur;
    }
}

/// `ln ∫_Δ du ∫_{Tⁿ} dφ e^{p g}` on the sphere of radius r.
fn ln_shell(g: &dyn Fn(&[Complex64]) -> f64, r: f64, n: usize, p: f64, cfg: &QuadConfig) -> Result<f64> {
    fn nest(
        g: &dyn Fn(&[Complex64]) -> f64,
        r: f64,
        n: usize,
        p: f64,
        t: &mut Vec<f64>,
        cfg: &QuadConfig,
    ) -> Result<f64> {
        if t.len() + 1 == n {
            return ln_torus(g, r, t, n, p, cfg);
        }
        // Stick-breaking Jacobian: du_j = rest_j dt_j.
        let rest: f64 = {
            let mut rest = 1.0;
            for tj in t.iter() {
                rest *= 1.0 - tj;
            }
            rest
        };
        let mut f = |x: f64| -> Result<f64> {
            t.push(x);
            let v = nest(g, r, n, p, t, cfg);
            t.pop();
            Ok(v? + rest.ln())
        };
        ln_integral_interval(&mut f, 0.0, 1.0, cfg)
    }
    nest(g, r, n, p, &mut Vec::new(), cfg)
}

/// `ln (∫_{ℂⁿ} e^{p g(w)} ω(|w|)^p dV)^{1/p}` for a log-modulus `g`, by
/// radius, simplex and torus.
pub fn ln_norm_fn(g: &dyn Fn(&[Complex64]) -> f64, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
    check_f_space(params)?;
    let n = params.n;
    let p = match params.p {
        Exponent::Infinity => return ln_sup_fn(g, params),
        Exponent::Finite(p) => p,
    };
    let ln_c = 2f64.ln() + ln_factorial(n as u64) - n as f64 * (2.0 * PI).ln();
    let mut h = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((2 * n - 1) as f64 * r.ln() + ln_weight_p(params, p, r) + ln_shell(g, r, n, p, cfg)?)
    };
    let radial = ln_integral_half_line(&mut h, 0.0, unit_length(params, p), cfg)?;
    Ok((ln_c + radial) / p)
}

/// `ln sup |e^{g(w)}| ω(|w|)`: coarse grid in (r, simplex, torus), then
/// cyclic golden-section refinement of each coordinate.
pub fn ln_sup_fn(g: &dyn Fn(&[Complex64]) -> f64, params: &SpaceParams) -> Result<f64> {
    check_f_space(params)?;
    let n = params.n;
    let obj = |x: &[f64]| -> f64 {
        let r = x[0].max(0.0);
        let t: Vec<f64> = x[1..n].iter().map(|v| v.clamp(0.0, 1.0)).collect();
        g(&point(r, &t, &x[n..])) + ln_weight_p(params, 1.0, r)
    };
    let unit = unit_length(params, 1.0);
    let m_phi: usize = if n == 1 { 64 } else { 16 };
    let m_t: usize = 9;
    let mut best_x = vec![0.0; 2 * n];
    let mut best = obj(&best_x);
    let mut x = vec![0.0; 2 * n];
    let mut d: f64 = 0.0;
    let mut steps = 0;
    let mut prev_ring = best;
    loop {
        d += (0.25 * d).max(unit / 64.0).min(unit / 8.0);
        steps += 1;
        x[0] = d;
        let mut ring = f64::NEG_INFINITY;
        let inner = m_t.pow((n - 1) as u32) * m_phi.pow(n as u32);
        for code in 0..inner {
            let mut c = code;
            for j in 1..n {
                x[j] = (c % m_t) as f64 / (m_t - 1) as f64;
                c /= m_t;
            }
            for j in 0..n {
                x[n + j] = 2.0 * PI * (c % m_phi) as f64 / m_phi as f64;
                c /= m_phi;
            }
            let v = obj(&x);
            ring = ring.max(v);
            if v > best {
                best = v;
                best_x.copy_from_slice(&x);
            }
        }
        if steps > 16 && ring < best - 40.0 && ring <= prev_ring {
            break;
        }
        if steps >= SCAN_CAP {
            return Err(no_converge("sup scan (weighted modulus not decaying)", steps, None));
        }
        prev_ring = ring;
    }
    let mut width: Vec<f64> = (0..2 * n)
        .map(|j| if j == 0 { unit / 8.0 } else if j < n { 1.0 / (m_t - 1) as f64 } else { 2.0 * PI / m_phi as f64 })
        .collect();
    for _ in 0..8 {
        for j in 0..2 * n {
            let (lo, hi) = if j == 0 {
                ((best_x[0] - width[0]).max(0.0), best_x[0] + width[0])
            } else if j < n {
                ((best_x[j] - width[j]).max(0.0), (best_x[j] + width[j]).min(1.0))
            } else {
                (best_x[j] - width[j], best_x[j] + width[j])
            };
            let mut trial = best_x.clone();
            let (xj, v) = golden_max(
                &mut |s| {
                    trial[j] = s;
                    Ok(obj(&trial))
                },
                lo,
                hi,
                50,
            )?;
            if v > best {
                best = v;
                best_x[j] = xj;
            }
            width[j] *= 0.5;
        }
    }
    Ok(best)
}

/// `ln ‖f‖_{F^p_{α,ρ}}` for a polynomial. At p = 2 the angular integrals are
/// exact by monomial orthogonality and only radial moments remain.
pub fn ln_norm_poly(f: &MultiIndexPoly, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
    check_f_space(params)?;
    if f.n != params.n {
        return Err(crate::Error::Dimension(f.n, params.n));
    }
    if f.is_zero() {
        return Ok(f64::NEG_INFINITY);
    }
    if f.terms.len() == 1 {
        let (nu, c) = f.terms.iter().next().expect("one term");
        return Ok(c.norm().ln() + ln_monomial_norm(params, nu, cfg)?);
    }
    if params.p == Exponent::Finite(2.0) {
        let mut s = LogSum::new();
        for (nu, c) in &f.terms {
            s.add(2.0 * c.norm().ln() + ln_monomial_norm_sq_rho(params.n, params.ell, params.alpha, params.rho, nu, cfg)?);
        }
        return Ok(0.5 * s.ln());
    }
    ln_norm_fn(&|w: &[Complex64]| f.eval(w).norm().ln(), params, cfg)
}

pub fn norm_poly(f: &MultiIndexPoly, params: &SpaceParams) -> Result<f64> {
    ln_norm_poly(f, params, &QuadConfig::default()).map(f64::exp)
}

/// `∫_{𝔹ⁿ} e^{g} dV` through the same radius/simplex/torus coordinates.
pub fn integrate_over_ball(n: usize, g: &dyn Fn(&[Complex64]) -> f64, cfg: &QuadConfig) -> Result<f64> {
    if n == 0 {
        return Err(param("n", "must be >= 1"));
    }
    let ln_c = 2f64.ln() + ln_factorial(n as u64) - n as f64 * (2.0 * PI).ln();
    let mut h = |r: f64| -> Result<f64> {
        if r == 0.0 {
            return Ok(f64::NEG_INFINITY);
        }
        Ok((2 * n - 1) as f64 * r.ln() + ln_shell(g, r, n, 1.0, cfg)?)
    };
    Ok((ln_c + ln_integral_interval(&mut h, 0.0, 1.0, cfg)?).exp())
}

/// Complex tanh-sinh on one panel at steps 1/4 and 1/8.
fn ts_panel_c(g: &mut dyn FnMut(f64) -> Result<Complex64>, a: f64, b: f64) -> Result<(Complex64, Complex64)> {
    let c = 0.5 * (a + b);
    let d = 0.5 * (b - a);
    let mut at = |t: f64| -> Result<Complex64> {
        let u = 0.5 * PI * t.sinh();
        let w = 0.5 * PI * t.cosh() / (u.cosh() * u.cosh());
        if w == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let v = g(c + d * u.tanh())?;
        if !(v.re.is_finite() && v.im.is_finite()) {
            return Err(no_converge("complex quadrature integrand", 0, None));
        }
        Ok(v * w)
    };
    let mut coarse = Complex64::new(0.0, 0.0);
    for k in -12..=12 {
        coarse += at(k as f64 * 0.25)?;
    }
    let mut odd = Complex64::new(0.0, 0.0);
    for k in (-23..=23).step_by(2) {
        odd += at(k as f64 * 0.125)?;
    }
    Ok((coarse * 0.25 * d, (coarse + odd) * 0.125 * d))
}

#[allow(clippy::too_many_arguments)]
fn ts_refine_c(
    g: &mut dyn FnMut(f64) -> Result<Complex64>,
    a: f64,
    b: f64,
    (c, f): (Complex64, Complex64),
    scale: f64,
    tol: f64,
    depth: u32,
    max_depth: u32,
) -> Result<Complex64> {
    let e = (f - c).norm() / scale;
    if e <= 0.1 * tol.sqrt() || scale == 0.0 {
        return Ok(f);
    }
    if depth == 0 {
        if e <= tol.sqrt() {
            return Ok(f);
        }
        return Err(no_converge("complex tanh-sinh panel", max_depth as usize, None));
    }
    let m = 0.5 * (a + b);
    let left = ts_panel_c(g, a, m)?;
    let right = ts_panel_c(g, m, b)?;
    Ok(ts_refine_c(g, a, m, left, scale, tol, depth - 1, max_depth)? + ts_refine_c(g, m, b, right, scale, tol, depth - 1, max_depth)?)
}

/// `∫_a^b g` for a complex integrand; errors are measured against `scale`,
/// or against the first estimate when `scale` is zero.
fn integral_interval_c(g: &mut dyn FnMut(f64) -> Result<Complex64>, a: f64, b: f64, scale: f64, cfg: &QuadConfig) -> Result<Complex64> {
    let panel = ts_panel_c(g, a, b)?;
    let scale = if scale > 0.0 { scale } else { panel.1.norm() };
    ts_refine_c(g, a, b, panel, scale, cfg.tol, cfg.max_depth, cfg.max_depth)
}

/// `∫_{Tⁿ} g dφ` at fixed moduli by trapezoid doubling.
fn torus_c(g: &dyn Fn(&[Complex64]) -> Complex64, r: f64, t: &[f64], n: usize, cfg: &QuadConfig) -> Result<Complex64> {
    // Returns the sum and the sum of moduli.
    let eval = |m: usize, skip_even: bool| -> (Complex64, f64) {
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let mut idx = vec![0usize; n];
        let mut phi = vec![0.0; n];
        loop {
            if !(skip_even && idx.iter().all(|i| i % 2 == 0)) {
                for j in 0..n {
                    phi[j] = 2.0 * PI * idx[j] as f64 / m as f64;
                }
                let v = g(&point(r, t, &phi));
                sum += v;
                mass += v.norm();
            }
            let mut j = 0;
            while j < n {
                idx[j] += 1;
                if idx[j] < m {
                    break;
                }
                idx[j] = 0;
                j += 1;
            }
            if j == n {
                return (sum, mass);
            }
        }
    };
    let cell = |m: usize| (2.0 * PI / m as f64).powi(n as i32);
    let shrink = |m: usize| (m >> (n - 1)).max(4);
    let (mut m, cap) = (2 * shrink(cfg.torus_start), 2 * shrink(cfg.torus_max));
    let (mut raw, mut mass) = eval(m, false);
    let mut prev = raw * cell(m);
    loop {
        m *= 2;
        let (s, a) = eval(m, true);
        raw += s;
        mass += a;
        let cur = raw * cell(m);
        // Oscillating integrands cancel on the torus, so the error is
        // measured against the integral of the modulus.
        if (cur - prev).norm() <= cfg.tol * (mass * cell(m)).max(f64::MIN_POSITIVE) {
            return Ok(cur);
        }
        if m >= cap {
            return Err(no_converge("complex torus integral", m, None));
        }
        prev = cur;
    }
}

/// `∫_{ℂⁿ} g(w) e^{-α|w|^{2ℓ}} dV(w)` for a complex integrand.
/// `ln_majorant(r)` bounds `ln |g|` on the sphere of radius r; it fixes the
/// cut-off radius and the scale errors are measured against.
pub fn integrate_weighted(
    n: usize,
    ell: f64,
    alpha: f64,
    g: &dyn Fn(&[Complex64]) -> Complex64,
    ln_majorant: &dyn Fn(f64) -> f64,
    cfg: &QuadConfig,
) -> Result<Complex64> {
    if n == 0 {
        return Err(param("n", "must be >= 1"));
    }
    if !(alpha > 0.0) {
        return Err(param("alpha", "must be positive"));
    }
    let ln_c = 2f64.ln() + ln_factorial(n as u64) - n as f64 * (2.0 * PI).ln();
    let ln_radial = |r: f64| (2 * n - 1) as f64 * r.ln() - alpha * r.powf(2.0 * ell) + ln_majorant(r);
    // Cut-off where the majorant has dropped well below its peak, plus the
    // log of the majorant's integral as the error scale.
    let unit = alpha.powf(-0.5 / ell);
    let mut est = LogSum::new();
    let (mut r, mut best, mut prev) = (0.0f64, f64::NEG_INFINITY, f64::NEG_INFINITY);
    let step = unit / 32.0;
    let mut steps = 0;
    loop {
        r += step;
        steps += 1;
        let v = ln_radial(r);
        est.add(v + step.ln());
        best = best.max(v);
        if steps > 16 && v < best - 45.0 && v <= prev {
            break;
        }
        if steps >= SCAN_CAP {
            return Err(no_converge("weighted integral cut-off scan", steps, None));
        }
        prev = v;
    }
    let scale = (ln_c + est.ln()).exp();
    let c = ln_c.exp();
    let mut h = |r: f64| -> Result<Complex64> {
        if r == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let w = ((2 * n - 1) as f64 * r.ln() - alpha * r.powf(2.0 * ell)).exp();
        Ok(shell_c(g, r, n, cfg)? * (w * c))
    };
    // Panels of one unit length keep each tanh-sinh panel well resolved.
    let mut sum = Complex64::new(0.0, 0.0);
    let mut a = 0.0;
    while a < r {
        let b = (a + unit).min(r);
        sum += integral_interval_c(&mut h, a, b, scale, cfg)?;
        a = b;
    }
    Ok(sum)
}

fn shell_c(g: &dyn Fn(&[Complex64]) -> Complex64, r: f64, n: usize, cfg: &QuadConfig) -> Result<Complex64> {
    fn nest(g: &dyn Fn(&[Complex64]) -> Complex64, r: f64, n: usize, t: &mut Vec<f64>, cfg: &QuadConfig) -> Result<Complex64> {
        if t.len() + 1 == n {
            return torus_c(g, r, t, n, cfg);
        }
        let rest: f64 = t.iter().map(|tj| 1.0 - tj).product();
        let mut f = |x: f64| -> Result<Complex64> {
            t.push(x);
            let v = nest(g, r, n, t, cfg);
            t.pop();
            Ok(v? * rest)
        };
        integral_interval_c(&mut f, 0.0, 1.0, 0.0, cfg)
    }
    nest(g, r, n, &mut Vec::new(), cfg)
}

//! Weak decomposition of the kernel: `E_{1/ℓ,1/ℓ}` factored into two copies
//! of `E_{1/ℓ,(ℓ+1)/(2ℓ)}` plus a remainder, and the factors `G_k`, `H_k`,
//! `R_n` with `K_γ(w,z) = Σ_k G_k H_k + R_n` at `λ = w·z̄`.

use crate::bergman::{dot, Kernel};
use crate::dd::{CDd, Dd};
use crate::error::{param, Error, Result};
use crate::fock::{norm_vec, Exponent, SpaceParams};
use crate::mittag_leffler::{ml_split, MLParams, MittagLeffler, CROSSOVER, DEFAULT_TOL};
use crate::quadrature::{ln_norm_slice, QuadConfig, RatioReport, SliceFunction};
use crate::scaled::ScaledComplex;
use crate::special::{binomial, ln_factorial};
use num_complex::Complex64;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use serde::{Deserialize, Serialize};
use serde_json::json;

/// Series sums whose terms exceed the result by more than this are redone
/// in double-double.
const FAST_CANCELLATION: f64 = 1e3;

/// `(ℓ+1)/(2ℓ)`, the second index of the factor functions.
pub fn factor_b(ell: f64) -> f64 {
    (ell + 1.0) / (2.0 * ell)
}

/// `(θ(1-θ))^{(1-ℓ)/(2ℓ)}/ℓ`.
pub fn c_ell_theta(ell: f64, theta: f64) -> f64 {
    (theta * (1.0 - theta)).powf((1.0 - ell) / (2.0 * ell)) / ell
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecompParams {
    pub ell: f64,
    pub n: usize,
    pub gamma: f64,
    pub alpha: f64,
    pub beta: f64,
    pub theta: f64,
}

impl DecompParams {
    /// `theta = None` selects `α/(α+β)`.
    pub fn new(ell: f64, n: usize, gamma: f64, alpha: f64, beta: f64, theta: Option<f64>) -> Result<Self> {
        if !(ell >= 1.0 && ell.is_finite()) {
            return Err(param("ell", format!("must be >= 1, got {ell}")));
        }
        if n < 1 {
            return Err(param("n", "dimension must be >= 1"));
        }
        for (name, v) in [("gamma", gamma), ("alpha", alpha), ("beta", beta)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(param(name, format!("must be positive, got {v}")));
            }
        }
        let theta = theta.unwrap_or(alpha / (alpha + beta));
        if !(theta > 0.0 && theta < 1.0) {
            return Err(param("theta", format!("must lie in (0,1), got {theta}")));
        }
        Ok(DecompParams { ell, n, gamma, alpha, beta, theta })
    }

    pub fn c(&self) -> f64 {
        c_ell_theta(self.ell, self.theta)
    }

    /// `ℓ γ^{n/ℓ} c_{ℓ,θ}/n!`.
    pub fn big_c(&self) -> f64 {
        self.ln_kernel_prefactor().exp() * self.c()
    }

    fn ln_kernel_prefactor(&self) -> f64 {
        self.ell.ln() + self.n as f64 / self.ell * self.gamma.ln() - ln_factorial(self.n as u64)
    }

    /// The remainder goes with G when `α >= β` and with H otherwise.
    pub fn remainder_in_g(&self) -> bool {
        self.alpha >= self.beta
    }
}

/// `ψ(θ) = θ²/α + (1-θ)²/β`.
pub fn psi(theta: f64, alpha: f64, beta: f64) -> f64 {
    theta * theta / alpha + (1.0 - theta) * (1.0 - theta) / beta
}

/// Grid minimiser of ψ over `(0,1)` with `points` interior nodes.
pub fn psi_grid_min(alpha: f64, beta: f64, points: usize) -> (f64, f64) {
    (1..=points)
        .map(|i| {
            let t = i as f64 / (points + 1) as f64;
            (t, psi(t, alpha, beta))
        })
        .fold((0.5, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best })
}

/// `R_{ℓ,θ}(λ) = E_{1/ℓ,1/ℓ}(λ) - c E_{1/ℓ,b'}(θ^{1/ℓ}λ) E_{1/ℓ,b'}((1-θ)^{1/ℓ}λ)`
/// and its derivatives.
#[derive(Clone, Debug)]
pub struct Remainder {
    pub ell: f64,
    pub theta: f64,
    c: f64,
    /// Taylor coefficients, enough for the series regime.
    coeffs: Vec<Dd>,
}

impl Remainder {
    pub fn new(ell: f64, theta: f64) -> Result<Self> {
        if !(ell >= 1.0 && ell.is_finite()) {
            return Err(param("ell", format!("must be >= 1, got {ell}")));
        }
        if !(theta > 0.0 && theta < 1.0) {
            return Err(param("theta", format!("must lie in (0,1), got {theta}")));
        }
        let c = c_ell_theta(ell, theta);
        let coeffs = if ell == 1.0 { Vec::new() } else { remainder_coefficients(ell, theta) };
        Ok(Remainder { ell, theta, c, coeffs })
    }

    /// Taylor coefficients `r_j` of `R_{ℓ,θ}` (empty at ℓ = 1, where R ≡ 0).
    pub fn taylor(&self) -> Vec<f64> {
        self.coeffs.iter().map(|d| d.to_f64()).collect()
    }

    fn in_series_regime(&self, lambda: Complex64) -> bool {
        lambda.norm().powf(self.ell) <= CROSSOVER
    }

    fn deriv_coeffs(&self, m: u32) -> impl Iterator<Item = Dd> + '_ {
        self.coeffs.iter().enumerate().skip(m as usize).map(move |(k, c)| {
            let mut f = *c;
            for i in 0..m {
                f = f.mul_f64((k as u32 - i) as f64);
            }
            f
        })
    }

    /// First `count` Taylor coefficients of `R^{(m)}`, zero past the stored
    /// range (they are negligible there).
    pub fn taylor_deriv(&self, m: u32, count: usize) -> Vec<f64> {
        let mut out: Vec<f64> = self.deriv_coeffs(m).take(count).map(|d| d.to_f64()).collect();
        out.resize(count, 0.0);
        out
    }

    /// `R^{(m)}(λ)`.
    pub fn deriv(&self, m: u32, lambda: Complex64) -> Result<ScaledComplex> {
        if self.ell == 1.0 {
            return Ok(ScaledComplex::ZERO);
        }
        if self.in_series_regime(lambda) {
            return Ok(self.series(m, lambda));
        }
        self.split(m, lambda)
    }

    pub fn eval(&self, lambda: Complex64) -> Result<ScaledComplex> {
        self.deriv(0, lambda)
    }

    fn series(&self, m: u32, lambda: Complex64) -> ScaledComplex {
        let coeffs: Vec<Dd> = self.deriv_coeffs(m).collect();
        let mut sum = Complex64::new(0.0, 0.0);
        let mut mass = 0.0;
        let mut pw = Complex64::new(1.0, 0.0);
        for c in &coeffs {
            let t = pw * c.to_f64();
            sum += t;
            mass += t.norm();
            pw *= lambda;
        }
        if mass <= FAST_CANCELLATION * sum.norm() {
            return ScaledComplex::from_complex(sum);
        }
        let l = CDd::from_c64(lambda);
        let mut acc = CDd::ZERO;
        for c in coeffs.iter().rev() {
            acc = acc * l + CDd { re: *c, im: Dd::ZERO };
        }
        ScaledComplex::from_complex(acc.to_c64())
    }

    /// `-T₀ + c Σ_j C(m,j) θ^{j/ℓ}(1-θ)^{(m-j)/ℓ} [X₁T₂ + T₁X₂ - T₁T₂]`, where
    /// `E = X - T` splits each function into its exponential part and tail;
    /// the exponential parts cancel exactly.
    fn split(&self, m: u32, lambda: Complex64) -> Result<ScaledComplex> {
        let a = 1.0 / self.ell;
        let b = factor_b(self.ell);
        let (s1, s2) = (self.theta.powf(a), (1.0 - self.theta).powf(a));
        let (_, t0) = ml_split(&MLParams::new(a, a, m)?, lambda, DEFAULT_TOL)?;
        let mut terms = vec![ScaledComplex::from_complex(-t0)];
        for j in 0..=m {
            let (x1, t1) = ml_split(&MLParams::new(a, b, j)?, lambda * s1, DEFAULT_TOL)?;
            let (x2, t2) = ml_split(&MLParams::new(a, b, m - j)?, lambda * s2, DEFAULT_TOL)?;
            let w = self.c * binomial(m as u64, j as u64) * s1.powi(j as i32) * s2.powi((m - j) as i32);
            let (t1, t2) = (ScaledComplex::from_complex(t1), ScaledComplex::from_complex(t2));
            terms.push((x1 * t2).scale_real(w));
            terms.push((t1 * x2).scale_real(w));
            terms.push((t1 * t2).scale_real(-w));
        }
        Ok(ScaledComplex::sum(&terms))
    }
}

/// `r_j = 1/Γ((j+1)/ℓ) - c Σ_i θ^{i/ℓ}(1-θ)^{(j-i)/ℓ}/(Γ(i/ℓ+b')Γ((j-i)/ℓ+b'))`,
/// in double-double, until the terms at the crossover radius are negligible.
fn remainder_coefficients(ell: f64, theta: f64) -> Vec<Dd> {
    let inv = Dd::ONE / Dd::new(ell);
    let b = Dd::new(ell + 1.0) / Dd::new(2.0 * ell);
    let c = (Dd::new(theta) * Dd::new(1.0 - theta)).ln() * (Dd::new(1.0 - ell) / Dd::new(2.0 * ell));
    let c = c.exp() * inv;
    let (l1, l2) = (Dd::new(theta).ln() * inv, Dd::new(1.0 - theta).ln() * inv);
    let ln_radius = CROSSOVER.ln() / ell;
    let mut g1: Vec<Dd> = Vec::new();
    let mut g2: Vec<Dd> = Vec::new();
    let mut out = Vec::new();
    let mut peak = f64::NEG_INFINITY;
    for j in 0.. {
        let jd = Dd::new(j as f64);
        // Factor coefficients θ^{j/ℓ}/Γ(j/ℓ+b') and the same with 1-θ.
        let g = (jd * inv + b).rgamma();
        g1.push(g * (l1 * jd).exp());
        g2.push(g * (l2 * jd).exp());
        let mut s = Dd::ZERO;
        for i in 0..=j {
            s = s + g1[i] * g2[j - i];
        }
        let r = (Dd::new(j as f64 + 1.0) * inv).rgamma() - c * s;
        out.push(r);
        let size = (r.hi.abs() + (c * s).hi.abs() * 1e-30).ln() + j as f64 * ln_radius;
        peak = peak.max(size);
        if j > 8 && size < peak - 100.0 {
            break;
        }
    }
    out
}

pub fn remainder_deriv(ell: f64, theta: f64, m: u32, lambda: Complex64) -> Result<ScaledComplex> {
    Remainder::new(ell, theta)?.deriv(m, lambda)
}

pub fn remainder_eval(ell: f64, theta: f64, lambda: Complex64) -> Result<ScaledComplex> {
    remainder_deriv(ell, theta, 0, lambda)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum FactorKind {
    G,
    H,
    R,
}

/// All factor functions for one parameter set, with cached series.
#[derive(Clone, Debug)]
pub struct Decomposition {
    pub params: DecompParams,
    kernel: Kernel,
    remainder: Remainder,
    /// `E^{(k)}_{1/ℓ,b'}` for k = 0..n-1.
    factors: Vec<MittagLeffler>,
    s1: f64,
    s2: f64,
}

impl Decomposition {
    pub fn new(params: DecompParams) -> Result<Self> {
        let a = 1.0 / params.ell;
        let b = factor_b(params.ell);
        let factors = (0..params.n as u32).map(|k| MLParams::new(a, b, k).map(MittagLeffler::new)).collect::<Result<_>>()?;
        Ok(Decomposition {
            params,
            kernel: Kernel::new(params.gamma, params.n, params.ell)?,
            remainder: Remainder::new(params.ell, params.theta)?,
            factors,
            s1: (params.theta * params.gamma).powf(a),
            s2: ((1.0 - params.theta) * params.gamma).powf(a),
        })
    }

    fn factor_ml(&self, k: usize, x: Complex64, fast: bool) -> Result<ScaledComplex> {
        if fast {
            self.factors[k].eval_fast(x)
        } else {
            self.factors[k].eval(x, DEFAULT_TOL)
        }
    }

    fn g(&self, k: usize, lambda: Complex64, fast: bool) -> Result<ScaledComplex> {
        let p = &self.params;
        let w = binomial(p.n as u64 - 1, k as u64) * p.theta.powf(k as f64 / p.ell) * p.big_c();
        Ok(self.factor_ml(k, lambda * self.s1, fast)?.scale_real(w))
    }

    fn h(&self, k: usize, lambda: Complex64, fast: bool) -> Result<ScaledComplex> {
        let p = &self.params;
        let j = p.n - 1 - k;
        let w = (1.0 - p.theta).powf(j as f64 / p.ell);
        Ok(self.factor_ml(j, lambda * self.s2, fast)?.scale_real(w))
    }

    /// `R_n(λ) = (ℓγ^{n/ℓ}/n!) R^{(n-1)}(γ^{1/ℓ}λ)`.
    pub fn remainder(&self, lambda: Complex64) -> Result<ScaledComplex> {
        let p = &self.params;
        let v = self.remainder.deriv(p.n as u32 - 1, lambda * p.gamma.powf(1.0 / p.ell))?;
        Ok(v.mul_ln(p.ln_kernel_prefactor()))
    }

    fn eval_with(&self, kind: FactorKind, k: usize, lambda: Complex64, fast: bool) -> Result<ScaledComplex> {
        let n = self.params.n;
        match kind {
            FactorKind::R => self.remainder(lambda),
            _ if k > n => Err(Error::Index(format!("factor index {k} exceeds n = {n}"))),
            FactorKind::G if k == n => {
                if self.params.remainder_in_g() {
                    self.remainder(lambda)
                } else {
                    Ok(ScaledComplex::ONE)
                }
            }
            FactorKind::H if k == n => {
                if self.params.remainder_in_g() {
                    Ok(ScaledComplex::ONE)
                } else {
                    self.remainder(lambda)
                }
            }
            FactorKind::G => self.g(k, lambda, fast),
            FactorKind::H => self.h(k, lambda, fast),
        }
    }

    /// First `count` Taylor coefficients in `λ` of the factor `eval` returns.
    pub fn factor_taylor(&self, kind: FactorKind, k: usize, count: usize) -> Result<Vec<f64>> {
        let p = &self.params;
        let n = p.n;
        let scaled = |c: Vec<f64>, s: f64, w: f64| -> Vec<f64> {
            let mut pw = w;
            c.into_iter()
                .map(|x| {
                    let v = x * pw;
                    pw *= s;
                    v
                })
                .collect()
        };
        let remainder = || {
            let c = self.remainder.taylor_deriv(n as u32 - 1, count);
            scaled(c, p.gamma.powf(1.0 / p.ell), p.ln_kernel_prefactor().exp())
        };
        let one = || {
            let mut c = vec![0.0; count];
            if count > 0 {
                c[0] = 1.0;
            }
            c
        };
        match kind {
            FactorKind::R => Ok(remainder()),
            _ if k > n => Err(Error::Index(format!("factor index {k} exceeds n = {n}"))),
            FactorKind::G if k == n => Ok(if p.remainder_in_g() { remainder() } else { one() }),
            FactorKind::H if k == n => Ok(if p.remainder_in_g() { one() } else { remainder() }),
            FactorKind::G => {
                let w = binomial(n as u64 - 1, k as u64) * p.theta.powf(k as f64 / p.ell) * p.big_c();
                Ok(scaled(self.factors[k].taylor(count), self.s1, w))
            }
            FactorKind::H => {
                let j = n - 1 - k;
                let w = (1.0 - p.theta).powf(j as f64 / p.ell);
                Ok(scaled(self.factors[j].taylor(count), self.s2, w))
            }
        }
    }

    /// `G_k`, `H_k` for k = 0..n (the k = n slot carries the remainder on one
    /// side and the constant 1 on the other), or `R_n`.
    pub fn eval(&self, kind: FactorKind, k: usize, lambda: Complex64) -> Result<ScaledComplex> {
        self.eval_with(kind, k, lambda, false)
    }

    /// `|K_γ(w,z) - Σ_k G_k H_k - R_n| / |K_γ(w,z)|` at `λ = w·z̄`.
    pub fn residual_at(&self, lambda: Complex64) -> Result<f64> {
        let k = self.kernel.of_dot(lambda)?;
        let mut parts = vec![k];
        for j in 0..self.params.n {
            parts.push(-(self.g(j, lambda, false)? * self.h(j, lambda, false)?));
        }
        parts.push(-self.remainder(lambda)?);
        let m = parts.iter().map(|t| t.log_mag).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::NEG_INFINITY {
            return Ok(0.0);
        }
        let diff: Complex64 = parts.iter().map(|t| t.relative_to(m)).sum();
        if k.is_zero() {
            return Ok(diff.norm());
        }
        Ok(diff.norm() * (m - k.log_mag).exp())
    }

    pub fn identity_residual(&self, z: &[Complex64], w: &[Complex64]) -> Result<f64> {
        let n = self.params.n;
        if z.len() != n || w.len() != n {
            return Err(Error::Dimension(z.len().max(w.len()), n));
        }
        self.residual_at(dot(w, z))
    }

    /// `ln ‖F(·z̄)‖` in the given space for one factor.
    pub fn ln_factor_norm(&self, kind: FactorKind, k: usize, space: &SpaceParams, z: &[Complex64], cfg: &QuadConfig) -> Result<f64> {
        let sf = SliceFunction::new(|l| self.eval_with(kind, k, l, true), z.to_vec(), true);
        ln_norm_slice(&sf, space, cfg)
    }
}

pub fn factor_eval(kind: FactorKind, k: usize, params: &DecompParams, lambda: Complex64) -> Result<ScaledComplex> {
    Decomposition::new(*params)?.eval(kind, k, lambda)
}

pub fn identity_residual(params: &DecompParams, z: &[Complex64], w: &[Complex64]) -> Result<f64> {
    Decomposition::new(*params)?.identity_residual(z, w)
}

/// Exponents of one growth envelope `(1+|z|)^{poly} e^{expo |z|^{2ℓ}}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub poly: f64,
    pub expo: f64,
}

impl Envelope {
    pub fn ln_at(&self, ell: f64, r: f64) -> f64 {
        self.poly * r.ln_1p() + self.expo * r.powf(2.0 * ell)
    }
}

/// Spaces and envelopes for the factor norms: G_k in `F^p_{α,ρ}`, H_k in
/// `F^{p'}_{β,η}`, and the remainder in whichever space its side lives in.
#[derive(Clone, Debug)]
pub struct FactorClaim {
    pub name: String,
    pub kind: FactorKind,
    pub k: usize,
    pub space: SpaceParams,
    pub envelope: Envelope,
}

pub fn factor_claims(params: &DecompParams, p: Exponent, rho: f64, eta: f64) -> Result<Vec<FactorClaim>> {
    let (n, ell, a, b, g) = (params.n, params.ell, params.alpha, params.beta, params.gamma);
    let s = (a + b) * (a + b);
    let inv_p = p.recip();
    let inv_q = p.conjugate().recip();
    let nf = n as f64;
    let g_space = SpaceParams::new(n, ell, a, rho, p)?;
    let h_space = SpaceParams::new(n, ell, b, eta, p.conjugate())?;
    let mut out = Vec::new();
    for k in 0..n {
        let kf = k as f64;
        out.push(FactorClaim {
            name: format!("G{k}"),
            kind: FactorKind::G,
            k,
            space: g_space,
            envelope: Envelope { poly: rho + (ell - 1.0) * (2.0 * kf + 1.0 - 2.0 * nf * inv_p), expo: a * g * g / (2.0 * s) },
        });
        out.push(FactorClaim {
            name: format!("H{k}"),
            kind: FactorKind::H,
            k,
            space: h_space,
            envelope: Envelope { poly: eta + (ell - 1.0) * (2.0 * nf * inv_p - 2.0 * kf - 1.0), expo: b * g * g / (2.0 * s) },
        });
    }
    let rem = if params.remainder_in_g() {
        FactorClaim {
            name: "R".into(),
            kind: FactorKind::R,
            k: n,
            space: g_space,
            envelope: Envelope { poly: rho + (ell - 1.0) * (2.0 * nf * inv_q - 1.0), expo: a * g * g / (2.0 * s) },
        }
    } else {
        FactorClaim {
            name: "R".into(),
            kind: FactorKind::R,
            k: n,
            space: h_space,
            envelope: Envelope { poly: eta + (ell - 1.0) * (2.0 * nf * inv_p - 1.0), expo: b * g * g / (2.0 * s) },
        }
    };
    out.push(rem);
    Ok(out)
}

/// One ratio report per claim along `z = r e₁`, plus the product check
/// `Σ_k ‖G_k‖‖H_k‖` against `(1+|z|)^{ρ+η} e^{γ²/(2(α+β)) |z|^{2ℓ}}`.
pub fn factor_norm_report(
    params: &DecompParams,
    p: Exponent,
    rho: f64,
    eta: f64,
    radii: &[f64],
    cfg: &QuadConfig,
) -> Result<Vec<(String, RatioReport)>> {
    let dec = Decomposition::new(*params)?;
    let claims = factor_claims(params, p, rho, eta)?;
    let mut values = vec![Vec::with_capacity(radii.len()); claims.len()];
    for &r in radii {
        let mut z = vec![Complex64::new(0.0, 0.0); params.n];
        z[0] = Complex64::new(r, 0.0);
        for (i, c) in claims.iter().enumerate() {
            values[i].push(dec.ln_factor_norm(c.kind, c.k, &c.space, &z, cfg)?);
        }
    }
    let mut out = Vec::new();
    for (c, v) in claims.iter().zip(&values) {
        let env = radii.iter().map(|&r| c.envelope.ln_at(params.ell, r)).collect();
        let rec = json!({"kind": "factor_norm", "factor": c.name, "decomposition": params, "space": c.space, "envelope": c.envelope});
        out.push((c.name.clone(), RatioReport::new(rec, params.ell, radii.to_vec(), v.clone(), env)?));
    }
    // Product of the G_k and H_k norms, summed over k.
    let g2 = params.gamma * params.gamma / (2.0 * (params.alpha + params.beta));
    let mut prod = Vec::with_capacity(radii.len());
    for i in 0..radii.len() {
        let mut s = ScaledComplex::ZERO;
        for k in 0..params.n {
            s = s.add(&ScaledComplex::new(values[2 * k][i] + values[2 * k + 1][i], 0.0));
        }
        prod.push(s.log_mag);
    }
    let env = radii.iter().map(|&r| (rho + eta) * r.ln_1p() + g2 * r.powf(2.0 * params.ell)).collect();
    let rec = json!({"kind": "factor_product", "decomposition": params, "p": p, "rho": rho, "eta": eta});
    out.push(("GH".into(), RatioReport::new(rec, params.ell, radii.to_vec(), prod, env)?));
    Ok(out)
}

/// Seeded random pairs `(z, w)` in ℂⁿ with `|z·w̄|` uniform on `[0, max_dot]`
/// and `|z|/|w|` in `[1/2, 2]`.
pub fn sample_pairs(n: usize, max_dot: f64, count: usize, seed: u64) -> Vec<(Vec<Complex64>, Vec<Complex64>)> {
    let mut rng = StdRng::seed_from_u64(seed);
    let point = |rng: &mut StdRng| -> Vec<Complex64> {
        (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect()
    };
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let (z, w) = (point(&mut rng), point(&mut rng));
        let (nz, nw) = (norm_vec(&z), norm_vec(&w));
        let d = dot(&z, &w).norm();
        // Nearly orthogonal pairs would need huge rescaling.
        if d < 0.05 * nz * nw {
            continue;
        }
        let target = max_dot * rng.random::<f64>();
        let ratio: f64 = 2f64.powf(rng.random_range(-1.0..1.0));
        let t = (target / d).sqrt();
        let z: Vec<Complex64> = z.iter().map(|c| c * t * ratio.sqrt()).collect();
        let w: Vec<Complex64> = w.iter().map(|c| c * t / ratio.sqrt()).collect();
        out.push((z, w));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::rgamma;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn constant_terms() {
        for &(ell, theta) in &[(2.0, 0.5), (3.0, 0.25), (1.5, 0.7)] {
            let r = remainder_eval(ell, theta, c(0.0, 0.0)).unwrap().to_complex().re;
            let b = factor_b(ell);
            let want = rgamma(1.0 / ell) - c_ell_theta(ell, theta) * rgamma(b) * rgamma(b);
            assert!((r - want).abs() < 1e-14, "{ell} {theta}: {r} {want}");
        }
    }

    #[test]
    fn vanishes_at_ell_one() {
        let p = DecompParams::new(1.0, 2, 1.3, 1.0, 2.0, None).unwrap();
        let d = Decomposition::new(p).unwrap();
        assert!(d.remainder(c(3.0, -1.0)).unwrap().is_zero());
        let z = [c(0.4, 0.2), c(-0.3, 0.9)];
        let w = [c(1.1, -0.5), c(0.2, 0.3)];
        assert!(d.identity_residual(&z, &w).unwrap() < 1e-13);
    }

    #[test]
    fn taylor_matches_values() {
        for &(ell, n, a, b) in &[(2.0, 1, 1.0, 1.0), (2.0, 2, 1.0, 2.0), (1.5, 2, 3.0, 1.0), (1.0, 1, 1.0, 1.0)] {
            let d = Decomposition::new(DecompParams::new(ell, n, 1.0, a, b, None).unwrap()).unwrap();
            let lam = c(0.8, -0.6);
            for kind in [FactorKind::G, FactorKind::H] {
                for k in 0..=n {
                    let t = d.factor_taylor(kind, k, 60).unwrap();
                    let s: Complex64 = t.iter().rev().fold(c(0.0, 0.0), |acc, x| acc * lam + x);
                    let v = d.eval(kind, k, lam).unwrap().to_complex();
                    assert!((s - v).norm() <= 1e-13 * v.norm().max(1e-300), "{ell} {n} {kind:?}{k}: {s} {v}");
                }
            }
        }
    }

    #[test]
    fn factor_at_origin() {
        let p = DecompParams::new(2.0, 1, 1.0, 1.0, 1.0, None).unwrap();
        let h = factor_eval(FactorKind::H, 0, &p, c(0.0, 0.0)).unwrap().to_complex().re;
        assert!((h - rgamma(0.75)).abs() < 1e-15);
        let g = factor_eval(FactorKind::G, 0, &p, c(0.0, 0.0)).unwrap().to_complex().re;
        assert!((g - p.big_c() * rgamma(0.75)).abs() < 1e-15);
    }

    #[test]
    fn series_and_split_agree_near_crossover() {
        for &(ell, theta, m) in &[(2.0, 0.5, 0u32), (2.0, 1.0 / 3.0, 1), (3.0, 0.75, 0), (3.0, 0.5, 2)] {
            let rem = Remainder::new(ell, theta).unwrap();
            for &t in &[0.0, 0.3, 1.0, 2.0] {
                let l = Complex64::from_polar(24.0f64.powf(1.0 / ell), t / ell);
                let a = rem.series(m, l);
                let b = rem.split(m, l).unwrap();
                assert!(ScaledComplex::rel_diff(&a, &b) < 1e-9, "{ell} {theta} {m} {t}: {a:?} {b:?}");
            }
        }
    }

    #[test]
    fn derivative_matches_difference_quotient() {
        let rem = Remainder::new(2.0, 0.4).unwrap();
        let l = c(1.2, 0.7);
        let h = 1e-5;
        let fd = (rem.eval(l + h).unwrap().to_complex() - rem.eval(l - h).unwrap().to_complex()) / (2.0 * h);
        let d = rem.deriv(1, l).unwrap().to_complex();
        assert!((fd - d).norm() < 1e-8 * d.norm());
    }

    #[test]
    fn identity_holds() {
        let p = DecompParams::new(2.0, 2, 1.0, 1.0, 2.0, None).unwrap();
        let d = Decomposition::new(p).unwrap();
        for &(x, y) in &[(0.3, 0.1), (1.5, -0.7), (2.9, 0.4), (-3.0, 1.0), (0.5, 3.5)] {
            assert!(d.residual_at(c(x, y)).unwrap() < 1e-10, "{x} {y}");
        }
    }

    #[test]
    fn psi_minimum() {
        let (t, v) = psi_grid_min(1.0, 3.0, 9999);
        assert!((t - 0.25).abs() < 1e-4);
        assert!((v - 0.25).abs() < 1e-8);
    }
}

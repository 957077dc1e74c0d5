//! Reproducing kernel of the weighted Fock space on ℂⁿ, its structural
//! identities and growth envelopes.
//!
//! `K_γ(z,w) = (ℓ γ^{n/ℓ}/n!) E^{(n-1)}_{1/ℓ,1/ℓ}(γ^{1/ℓ} z·w̄)`.

use crate::error::{param, Error, Result};
use crate::fock::{ln_monomial_norm_sq, ln_phi_c, norm_vec, Exponent, MultiIndex, MultiIndexPoly, SpaceParams};
use crate::mittag_leffler::{MLParams, MittagLeffler, DEFAULT_TOL};
use crate::quadrature::{integrate_weighted, ln_norm_slice, QuadConfig, RatioReport, SliceFunction};
use crate::scaled::ScaledComplex;
use crate::special::ln_factorial;
use num_complex::Complex64;
use serde_json::json;

/// `z·w̄ = Σ z_j conj(w_j)`.
pub fn dot(z: &[Complex64], w: &[Complex64]) -> Complex64 {
    z.iter().zip(w).map(|(a, b)| a * b.conj()).sum()
}

fn check_pair(n: usize, z: &[Complex64], w: &[Complex64]) -> Result<()> {
    if z.len() != n {
        return Err(Error::Dimension(z.len(), n));
    }
    if w.len() != n {
        return Err(Error::Dimension(w.len(), n));
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelValue {
    pub value: ScaledComplex,
    pub gamma: f64,
    pub z: Vec<Complex64>,
    pub w: Vec<Complex64>,
}

/// Kernel for fixed `(γ, n, ℓ)` with cached series coefficients.
#[derive(Clone, Debug)]
pub struct Kernel {
    pub gamma: f64,
    pub n: usize,
    pub ell: f64,
    ml: MittagLeffler,
    ln_prefactor: f64,
    scale: f64,
}

impl Kernel {
    pub fn new(gamma: f64, n: usize, ell: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma.is_finite()) {
            return Err(param("gamma", format!("must be positive, got {gamma}")));
        }
        if n < 1 {
            return Err(param("n", "dimension must be >= 1"));
        }
        if !(ell >= 1.0 && ell.is_finite()) {
            return Err(param("ell", format!("must be >= 1, got {ell}")));
        }
        let ml = MittagLeffler::new(MLParams::new(1.0 / ell, 1.0 / ell, n as u32 - 1)?);
        let ln_prefactor = ell.ln() + n as f64 / ell * gamma.ln() - ln_factorial(n as u64);
        Ok(Kernel { gamma, n, ell, ml, ln_prefactor, scale: gamma.powf(1.0 / ell) })
    }

    /// `H_γ(λ)`, the kernel as a function of `λ = z·w̄`.
    pub fn of_dot(&self, lambda: Complex64) -> Result<ScaledComplex> {
        let v = self.ml.eval(lambda * self.scale, DEFAULT_TOL)?;
        Ok(v.mul_ln(self.ln_prefactor))
    }

    /// `H_γ(λ)` accurate relative to its largest modulus on the circle `|λ|`.
    pub fn of_dot_fast(&self, lambda: Complex64) -> Result<ScaledComplex> {
        let v = self.ml.eval_fast(lambda * self.scale)?;
        Ok(v.mul_ln(self.ln_prefactor))
    }

    pub fn eval(&self, z: &[Complex64], w: &[Complex64]) -> Result<ScaledComplex> {
        check_pair(self.n, z, w)?;
        self.of_dot(dot(z, w))
    }

    pub fn value(&self, z: &[Complex64], w: &[Complex64]) -> Result<KernelValue> {
        Ok(KernelValue { value: self.eval(z, w)?, gamma: self.gamma, z: z.to_vec(), w: w.to_vec() })
    }
}

pub fn kernel_eval(gamma: f64, n: usize, ell: f64, z: &[Complex64], w: &[Complex64]) -> Result<ScaledComplex> {
    Kernel::new(gamma, n, ell)?.eval(z, w)
}

/// `Σ_{|ν| <= N} z^ν w̄^ν / ‖w^ν‖²_γ`, the truncated monomial expansion.
pub fn kernel_series_oracle(
    gamma: f64,
    n: usize,
    ell: f64,
    z: &[Complex64],
    w: &[Complex64],
    degree: u32,
) -> Result<ScaledComplex> {
    if !(gamma > 0.0) {
        return Err(param("gamma", "must be positive"));
    }
    check_pair(n, z, w)?;
    let prod: Vec<Complex64> = z.iter().zip(w).map(|(a, b)| a * b.conj()).collect();
    let terms: Vec<ScaledComplex> = MultiIndex::up_to(n, degree)
        .iter()
        .map(|nu| {
            let mono = nu.0.iter().zip(&prod).fold(ScaledComplex::ONE, |acc, (&k, c)| {
                acc * ScaledComplex::from_complex(*c).powf(k as f64)
            });
            mono.mul_ln(-ln_monomial_norm_sq(n, ell, gamma, nu))
        })
        .collect();
    Ok(ScaledComplex::sum(&terms))
}

/// `w ↦ K_γ(w, z)` truncated to degree N: coefficient `z̄^ν/‖w^ν‖²_γ`.
pub fn kernel_poly(gamma: f64, ell: f64, z: &[Complex64], degree: u32) -> Result<MultiIndexPoly> {
    if !(gamma > 0.0) {
        return Err(param("gamma", "must be positive"));
    }
    let n = z.len();
    if n == 0 {
        return Err(param("z", "must be non-empty"));
    }
    let zc: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
    let mut out = MultiIndexPoly::zero(n);
    for nu in MultiIndex::up_to(n, degree) {
        let c = nu.monomial(&zc) * (-ln_monomial_norm_sq(n, ell, gamma, &nu)).exp();
        out.insert(nu, c);
    }
    Ok(out)
}

/// Largest relative residual among `K_γ(z,δw)`, `K_γ(δz,w)` and
/// `δ^{-n} K_{γδ^ℓ}(z,w)`.
pub fn dilation_identity_residual(
    gamma: f64,
    delta: f64,
    n: usize,
    ell: f64,
    z: &[Complex64],
    w: &[Complex64],
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(param("delta", "must be positive"));
    }
    let k = Kernel::new(gamma, n, ell)?;
    let dz: Vec<Complex64> = z.iter().map(|c| c * delta).collect();
    let dw: Vec<Complex64> = w.iter().map(|c| c * delta).collect();
    let a = k.eval(z, &dw)?;
    let b = k.eval(&dz, w)?;
    let c = Kernel::new(gamma * delta.powf(ell), n, ell)?.eval(z, w)?.mul_ln(-(n as f64) * delta.ln());
    Ok(ScaledComplex::rel_diff(&a, &b).max(ScaledComplex::rel_diff(&a, &c)))
}

/// `ln[(1+|z|)^{ρ+2n(ℓ-1)/p'} e^{(γ²/2α)|z|^{2ℓ}}]`.
pub fn ln_kernel_norm_envelope(p: Exponent, alpha: f64, rho: f64, gamma: f64, n: usize, ell: f64, z_abs: f64) -> f64 {
    let poly = rho + 2.0 * n as f64 * (ell - 1.0) * p.conjugate().recip();
    poly * z_abs.ln_1p() + gamma * gamma / (2.0 * alpha) * z_abs.powf(2.0 * ell)
}

pub fn kernel_norm_envelope(p: Exponent, alpha: f64, rho: f64, gamma: f64, n: usize, ell: f64, z_abs: f64) -> f64 {
    ln_kernel_norm_envelope(p, alpha, rho, gamma, n, ell, z_abs).exp()
}

/// `ln ‖K_γ(·,z)‖_{F^p_{α,ρ}}` by slice quadrature.
pub fn ln_kernel_norm(gamma: f64, params: &SpaceParams, z: &[Complex64], cfg: &QuadConfig) -> Result<f64> {
    let k = Kernel::new(gamma, params.n, params.ell)?;
    if z.len() != params.n {
        return Err(Error::Dimension(z.len(), params.n));
    }
    let sf = SliceFunction::new(|lambda| k.of_dot_fast(lambda), z.to_vec(), true);
    ln_norm_slice(&sf, params, cfg)
}

/// Norm of `K_γ(·,z)` against its envelope along `z = r e₁` for each radius.
pub fn kernel_norm_report(gamma: f64, params: &SpaceParams, radii: &[f64], cfg: &QuadConfig) -> Result<RatioReport> {
    let mut value = Vec::with_capacity(radii.len());
    let mut envelope = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut z = vec![Complex64::new(0.0, 0.0); params.n];
        z[0] = Complex64::new(r, 0.0);
        value.push(ln_kernel_norm(gamma, params, &z, cfg)?);
        envelope.push(ln_kernel_norm_envelope(params.p, params.alpha, params.rho, gamma, params.n, params.ell, r));
    }
    let rec = json!({"kind": "kernel_norm", "gamma": gamma, "space": params});
    RatioReport::new(rec, params.ell, radii.to_vec(), value, envelope)
}

/// `|K_α(z,w)|` against `(1+|z|)^{n(ℓ-1)}(1+|w|)^{n(ℓ-1)} φ_α(z·w̄)` on a
/// grid of pairs, indexed by `|z·w̄|^{1/2}` in ascending order.
pub fn pointwise_envelope_check(
    alpha: f64,
    n: usize,
    ell: f64,
    pairs: &[(Vec<Complex64>, Vec<Complex64>)],
) -> Result<RatioReport> {
    let k = Kernel::new(alpha, n, ell)?;
    let mut rows = Vec::with_capacity(pairs.len());
    for (z, w) in pairs {
        check_pair(n, z, w)?;
        let lambda = dot(z, w);
        let v = k.of_dot(lambda)?.log_mag;
        let poly = n as f64 * (ell - 1.0) * (norm_vec(z).ln_1p() + norm_vec(w).ln_1p());
        rows.push((lambda.norm().sqrt(), v, poly + ln_phi_c(alpha, ell, lambda)));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let rec = json!({"kind": "kernel_pointwise", "alpha": alpha, "n": n, "ell": ell});
    RatioReport::new(
        rec,
        ell,
        rows.iter().map(|r| r.0).collect(),
        rows.iter().map(|r| r.1).collect(),
        rows.iter().map(|r| r.2).collect(),
    )
}

/// `⟨f, K_γ(·,z)⟩_γ` by quadrature over ℂⁿ.
pub fn reproduce_by_quadrature(gamma: f64, ell: f64, f: &MultiIndexPoly, z: &[Complex64], cfg: &QuadConfig) -> Result<Complex64> {
    let n = f.n;
    let k = Kernel::new(gamma, n, ell)?;
    if z.len() != n {
        return Err(Error::Dimension(z.len(), n));
    }
    let zr = norm_vec(z);
    let coef: Vec<(u32, f64)> = f.terms.iter().map(|(nu, c)| (nu.order(), c.norm())).collect();
    // |f(w)| <= Σ|f_ν| r^{|ν|} and |K(w,z)| <= H_γ(r|z|) on |w| = r.
    let majorant = |r: f64| -> f64 {
        let poly: f64 = coef.iter().map(|(d, c)| c * r.powi(*d as i32)).sum();
        let kern = k.of_dot_fast(Complex64::new(r * zr, 0.0)).map(|v| v.log_mag).unwrap_or(f64::INFINITY);
        poly.ln() + kern
    };
    let g = |w: &[Complex64]| -> Complex64 {
        // conj K(w,z) = K(z,w)
        let kv = k.of_dot_fast(dot(z, w)).map(|v| v.to_complex()).unwrap_or(Complex64::new(f64::NAN, 0.0));
        f.eval(w) * kv
    };
    integrate_weighted(n, ell, gamma, &g, &majorant, cfg)
}

/// `|⟨f, K_z⟩_γ − f(z)| / Σ_ν |f_ν z^ν|`. The denominator bounds `|f(z)|` and
/// stays away from zero at roots of f.
pub fn reproducing_residual(gamma: f64, ell: f64, f: &MultiIndexPoly, z: &[Complex64], cfg: &QuadConfig) -> Result<f64> {
    let got = reproduce_by_quadrature(gamma, ell, f, z, cfg)?;
    let scale: f64 = f.terms.iter().map(|(nu, c)| (c * nu.monomial(z)).norm()).sum();
    if scale == 0.0 {
        return Ok(got.norm());
    }
    Ok((got - f.eval(z)).norm() / scale)
}

/// `|K(z,w) − conj K(w,z)| / |K(z,w)|`.
pub fn hermitian_residual(kernel: &Kernel, z: &[Complex64], w: &[Complex64]) -> Result<f64> {
    let a = kernel.eval(z, w)?;
    let b = kernel.eval(w, z)?.conj();
    Ok(ScaledComplex::rel_diff(&a, &b))
}

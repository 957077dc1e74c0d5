//! Small Hankel operators `𝔥_b(f) = conj(P(f̄ b))` on `F²_{α,ρ}`: matrices in
//! the orthonormal monomial bases, Schatten norms, the rank-one kernel
//! symbol, the representation of `conj(b(z))` through the decomposition
//! factors, and the normalized-factor boundedness probe.
//!
//! The operator maps into anti-holomorphic functions; polynomials here hold
//! the holomorphic function `P(f̄ b)` whose conjugate it is.

use crate::bergman::{kernel_poly, Kernel};
use crate::decomposition::{DecompParams, Decomposition, FactorKind};
use crate::error::{param, Error, Result};
use crate::fock::{ln_monomial_norm_sq, pairing_poly, Exponent, MultiIndex, MultiIndexPoly, SpaceParams};
use crate::quadrature::{ln_monomial_norm_sq_rho, ln_norm_poly, QuadConfig, RatioReport};
use crate::special::ln_factorial;
use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;
use std::collections::HashMap;

/// Relative size below which a singular value does not count toward rank.
pub const RANK_CUTOFF: f64 = 1e-8;

/// `ln(‖w^ν‖²_{α,ρ}/ν!)`, which depends on ν only through |ν|.
fn ln_degree_factor(n: usize, ell: f64, alpha: f64, rho: f64, d: u32, cfg: &QuadConfig) -> Result<f64> {
    let mut nu = vec![0; n];
    nu[0] = d;
    Ok(ln_monomial_norm_sq_rho(n, ell, alpha, rho, &MultiIndex(nu), cfg)? - ln_factorial(d as u64))
}

fn degree_factors(n: usize, ell: f64, alpha: f64, rho: f64, max: u32, cfg: &QuadConfig) -> Result<Vec<f64>> {
    (0..=max).map(|d| ln_degree_factor(n, ell, alpha, rho, d, cfg)).collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct HankelMatrix {
    pub n: usize,
    pub ell: f64,
    pub alpha: f64,
    pub rho: f64,
    pub trunc: u32,
    /// Rows and columns, graded lexicographic with |ν| <= trunc.
    pub basis: Vec<MultiIndex>,
    #[serde(skip)]
    pub matrix: DMatrix<Complex64>,
    /// Descending.
    pub singular_values: Vec<f64>,
    pub flags: Vec<String>,
}

/// Row ν, column μ: `conj(b_{μ+ν}) ‖w^{μ+ν}‖²_α ‖w^ν‖_{α,ρ} / (‖w^ν‖²_α ‖w^μ‖_{α,ρ})`,
/// the coefficient of `conj(e_ν)` in `𝔥_b(e_μ)` for the ρ-orthonormal `e`.
pub fn hankel_matrix(b: &MultiIndexPoly, ell: f64, alpha: f64, rho: f64, trunc: u32, cfg: &QuadConfig) -> Result<HankelMatrix> {
    if !(alpha > 0.0) {
        return Err(param("alpha", "must be positive"));
    }
    SpaceParams::new(b.n, ell, alpha, rho, Exponent::Finite(2.0))?;
    let n = b.n;
    let basis = MultiIndex::up_to(n, trunc);
    let mut flags = Vec::new();
    if b.degree() > trunc {
        flags.push(format!("truncation {trunc} is below the symbol degree {}", b.degree()));
    }
    let plain = |nu: &MultiIndex| ln_monomial_norm_sq(n, ell, alpha, nu);
    let weighted = if rho == 0.0 { Vec::new() } else { degree_factors(n, ell, alpha, rho, trunc, cfg)? };
    let ln_rho = |nu: &MultiIndex| {
        if rho == 0.0 {
            plain(nu)
        } else {
            weighted[nu.order() as usize] + nu.ln_factorial()
        }
    };
    let index: HashMap<&MultiIndex, usize> = basis.iter().enumerate().map(|(i, nu)| (nu, i)).collect();
    let row_part: Vec<f64> = basis.iter().map(|nu| 0.5 * ln_rho(nu) - plain(nu)).collect();
    let col_part: Vec<f64> = basis.iter().map(|mu| -0.5 * ln_rho(mu)).collect();
    let dim = basis.len();
    let mut m = DMatrix::from_element(dim, dim, Complex64::new(0.0, 0.0));
    for (kappa, c) in &b.terms {
        if kappa.order() > 2 * trunc {
            continue;
        }
        let ln_k = c.norm().ln() + plain(kappa);
        let phase = c.conj() / c.norm();
        // Split κ = μ + ν over all ν <= κ componentwise.
        for nu in MultiIndex::up_to(n, kappa.order()) {
            if nu.0.iter().zip(&kappa.0).any(|(a, b)| a > b) {
                continue;
            }
            let mu = MultiIndex(kappa.0.iter().zip(&nu.0).map(|(a, b)| a - b).collect());
            let (Some(&i), Some(&j)) = (index.get(&nu), index.get(&mu)) else { continue };
            m[(i, j)] = phase * (ln_k + row_part[i] + col_part[j]).exp();
        }
    }
    let singular_values = singular_values(&m)?;
    Ok(HankelMatrix { n, ell, alpha, rho, trunc, basis, matrix: m, singular_values, flags })
}

/// Singular values, descending.
pub fn singular_values(m: &DMatrix<Complex64>) -> Result<Vec<f64>> {
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    let svd = m.clone().try_svd(false, false, f64::EPSILON, 0).ok_or_else(|| Error::Decomposition("SVD did not converge".into()))?;
    let mut s: Vec<f64> = svd.singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    Ok(s)
}

/// `(Σ s_k^p)^{1/p}`, or `s_max` at p = ∞, for any `p > 0`.
pub fn schatten_norm(singular_values: &[f64], p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(param("p", format!("must be positive, got {p}")));
    }
    let top = singular_values.iter().copied().fold(0.0, f64::max);
    if top == 0.0 || p == f64::INFINITY {
        return Ok(top);
    }
    let s: f64 = singular_values.iter().map(|v| (v / top).powf(p)).sum();
    Ok(top * s.powf(1.0 / p))
}

impl HankelMatrix {
    pub fn schatten(&self, p: f64) -> Result<f64> {
        schatten_norm(&self.singular_values, p)
    }

    pub fn numerical_rank(&self) -> usize {
        let top = self.singular_values.first().copied().unwrap_or(0.0);
        self.singular_values.iter().filter(|&&s| s > RANK_CUTOFF * top).count()
    }

    /// `entry(μ,ν) ‖w^μ‖‖w^ν‖/‖w^{μ+ν}‖²` for every nonzero entry, keyed by
    /// μ+ν; at ρ = 0 each key carries a single value `conj(b_{μ+ν})`.
    pub fn normalized_entries(&self) -> Vec<(MultiIndex, Complex64)> {
        let mut out = Vec::new();
        for (i, nu) in self.basis.iter().enumerate() {
            for (j, mu) in self.basis.iter().enumerate() {
                let v = self.matrix[(i, j)];
                if v.norm() == 0.0 {
                    continue;
                }
                let kappa = nu.add(mu);
                let s = 0.5 * ln_monomial_norm_sq(self.n, self.ell, self.alpha, nu)
                    + 0.5 * ln_monomial_norm_sq(self.n, self.ell, self.alpha, mu)
                    - ln_monomial_norm_sq(self.n, self.ell, self.alpha, &kappa);
                out.push((kappa, v * s.exp()));
            }
        }
        out
    }
}

/// `P(f̄ b)`: coefficient of `w^κ` is `Σ_ν conj(f_ν) b_{ν+κ} ‖w^{ν+κ}‖²/‖w^κ‖²`.
pub fn hankel_projection(b: &MultiIndexPoly, f: &MultiIndexPoly, ell: f64, alpha: f64) -> Result<MultiIndexPoly> {
    if b.n != f.n {
        return Err(Error::Dimension(b.n, f.n));
    }
    let n = b.n;
    let mut out = MultiIndexPoly::zero(n);
    for (beta, cb) in &b.terms {
        let ln_beta = ln_monomial_norm_sq(n, ell, alpha, beta);
        for (nu, cf) in &f.terms {
            if nu.0.iter().zip(&beta.0).any(|(a, b)| a > b) {
                continue;
            }
            let kappa = MultiIndex(beta.0.iter().zip(&nu.0).map(|(a, b)| a - b).collect());
            let w = (ln_beta - ln_monomial_norm_sq(n, ell, alpha, &kappa)).exp();
            out.insert(kappa, cf.conj() * cb * w);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct RankOne {
    pub numerical_rank: usize,
    pub s1: f64,
    pub predicted_s1: f64,
    pub singular_values: Vec<f64>,
}

/// Symbol `K_{1/2}(·, w₀)` truncated to degree N at α = 1. The operator is
/// `f ↦ 2^{-n/ℓ} ⟨f, K(·,v)⟩ conj(K(·,v))` with `v = 2^{-1/ℓ} w₀`, so
/// `s₁ = 2^{-n/ℓ} ‖K(·,v)‖_{(F²_{1,ρ})*} ‖K(·,v)‖_{F²_{1,ρ}}`, which is
/// `2^{-n/ℓ} K(v,v)` at ρ = 0.
pub fn rank_one_check(w0: &[Complex64], ell: f64, rho: f64, trunc: u32, cfg: &QuadConfig) -> Result<RankOne> {
    let n = w0.len();
    let b = kernel_poly(0.5, ell, w0, trunc)?;
    let h = hankel_matrix(&b, ell, 1.0, rho, trunc, cfg)?;
    let shrink = 2f64.powf(-1.0 / ell);
    let v2 = w0.iter().map(|z| z.norm_sqr()).sum::<f64>() * shrink * shrink;
    let ln_pre = -(n as f64) / ell * 2f64.ln();
    let predicted = if rho == 0.0 {
        Kernel::new(1.0, n, ell)?.of_dot(Complex64::new(v2, 0.0))?.mul_ln(ln_pre).abs()
    } else {
        // Degree sums: Σ_{|ν|=d} |v^ν|²/ν! = |v|^{2d}/d!.
        let (mut dual, mut primal) = (0.0, 0.0);
        let mut d = 0u32;
        loop {
            let ln_mass = if v2 == 0.0 {
                if d == 0 { 0.0 } else { f64::NEG_INFINITY }
            } else {
                d as f64 * v2.ln() - ln_factorial(d as u64)
            };
            let ln_a = ln_degree_factor(n, ell, 1.0, rho, d, cfg)?;
            let ln_b = ln_degree_factor(n, ell, 1.0, 0.0, d, cfg)?;
            let td = (ln_mass - ln_a).exp();
            let tp = (ln_mass + ln_a - 2.0 * ln_b).exp();
            dual += td;
            primal += tp;
            if (d as f64) > v2 * 4.0 + 20.0 && td <= 1e-18 * dual && tp <= 1e-18 * primal || d >= 4000 {
                break;
            }
            d += 1;
        }
        (ln_pre.exp()) * (dual * primal).sqrt()
    };
    Ok(RankOne {
        numerical_rank: h.numerical_rank(),
        s1: h.singular_values.first().copied().unwrap_or(0.0),
        predicted_s1: predicted,
        singular_values: h.singular_values.iter().take(8).copied().collect(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct SchattenSymbol {
    pub schatten: f64,
    pub symbol_norm: f64,
    pub ratio: f64,
    pub singular_values: Vec<f64>,
    pub flags: Vec<String>,
}

/// Space of the symbol: `F^p_{α/2, 2n(ℓ-1)/p}` (ρ = 0 at p = ∞).
pub fn symbol_space(n: usize, ell: f64, alpha: f64, p: Exponent) -> Result<SpaceParams> {
    SpaceParams::new(n, ell, alpha / 2.0, 2.0 * n as f64 * (ell - 1.0) * p.recip(), p)
}

/// `‖𝔥_b‖_{S_p(F²_{α,ρ})}` against `‖b‖` in the symbol space. A zero symbol
/// reports ratio 1 with a flag.
pub fn schatten_vs_symbol(
    b: &MultiIndexPoly,
    ell: f64,
    alpha: f64,
    rho: f64,
    p: Exponent,
    trunc: u32,
    cfg: &QuadConfig,
) -> Result<SchattenSymbol> {
    let h = hankel_matrix(b, ell, alpha, rho, trunc, cfg)?;
    let mut flags = h.flags.clone();
    let schatten = h.schatten(p.as_f64())?;
    if b.is_zero() {
        flags.push("zero symbol: ratio set to 1".into());
        return Ok(SchattenSymbol { schatten, symbol_norm: 0.0, ratio: 1.0, singular_values: h.singular_values, flags });
    }
    let ln_sym = ln_norm_poly(b, &symbol_space(b.n, ell, alpha, p)?, cfg)?;
    let ratio = (schatten.ln() - ln_sym).exp();
    Ok(SchattenSymbol { schatten, symbol_norm: ln_sym.exp(), ratio, singular_values: h.singular_values, flags })
}

/// `|S_p(α, b) - S_p(1, Ψ_α b)| / S_p(α, b)` with `Ψ_α(b)(z) = b(α^{-1/(2ℓ)} z)`.
pub fn dilation_covariance_residual(b: &MultiIndexPoly, ell: f64, alpha: f64, rho: f64, p: f64, trunc: u32, cfg: &QuadConfig) -> Result<f64> {
    let a = hankel_matrix(b, ell, alpha, rho, trunc, cfg)?.schatten(p)?;
    let c = hankel_matrix(&b.dilate(alpha.powf(-1.0 / (2.0 * ell))), ell, 1.0, rho, trunc, cfg)?.schatten(p)?;
    if a == 0.0 {
        return Ok(c);
    }
    Ok((a - c).abs() / a)
}

fn unit_space_decomposition(n: usize, ell: f64, params: Option<DecompParams>) -> Result<Decomposition> {
    let p = match params {
        Some(p) => p,
        None => DecompParams::new(ell, n, 1.0, 1.0, 1.0, None)?,
    };
    if p.gamma != 1.0 {
        return Err(param("gamma", "the representation needs gamma = 1"));
    }
    if p.n != n || p.ell != ell {
        return Err(param("decomposition", "n and ell must match the symbol"));
    }
    Decomposition::new(p)
}

/// `G_k(·z̄)` or `H_k(·z̄)` as a polynomial truncated to degree N.
pub fn factor_poly(dec: &Decomposition, kind: FactorKind, k: usize, z: &[Complex64], trunc: u32) -> Result<MultiIndexPoly> {
    Ok(MultiIndexPoly::from_slice(&dec.factor_taylor(kind, k, trunc as usize + 1)?, z))
}

/// `Σ_{k=0}^{n} ⟨H_k(·z̄), conj(𝔥_b(G_k(·z̄)))⟩` with degree-N factors, exact on
/// coefficients; should equal `conj(b(z))`.
pub fn representation_sum(b: &MultiIndexPoly, z: &[Complex64], params: &DecompParams, trunc: u32) -> Result<Complex64> {
    if z.len() != b.n {
        return Err(Error::Dimension(z.len(), b.n));
    }
    let dec = unit_space_decomposition(b.n, params.ell, Some(*params))?;
    let mut s = Complex64::new(0.0, 0.0);
    for k in 0..=b.n {
        let g = factor_poly(&dec, FactorKind::G, k, z, trunc)?;
        let h = factor_poly(&dec, FactorKind::H, k, z, trunc)?;
        s += pairing_poly(&h, &hankel_projection(b, &g, params.ell, 1.0)?, params.ell, 1.0)?;
    }
    Ok(s)
}

/// `|representation_sum - conj(b(z))|` relative to `Σ|b_ν z^ν|`.
pub fn representation_residual(b: &MultiIndexPoly, z: &[Complex64], params: &DecompParams, trunc: u32) -> Result<f64> {
    let s = representation_sum(b, z, params, trunc)?;
    let scale: f64 = b.terms.iter().map(|(nu, c)| (c * nu.monomial(z)).norm()).sum();
    let diff = (s - b.eval(z).conj()).norm();
    Ok(if scale == 0.0 { diff } else { diff / scale })
}

#[derive(Clone, Debug, Serialize)]
pub struct BoundednessProbe {
    /// `ln(e^{-|z|^{2ℓ}/4}|b(z)|)` against `ln(s₁ Σ_k ‖G̃_k‖‖H̃_k‖)`.
    pub report: RatioReport,
    /// `ln ‖G̃_{k,z}‖_{F^p_{1,ρ}}`, indexed `[k][grid]`.
    pub ln_g_tilde: Vec<Vec<f64>>,
    /// `ln ‖H̃_{k,z}‖_{F^{p'}_{1,-ρ}}`, indexed `[k][grid]`.
    pub ln_h_tilde: Vec<Vec<f64>>,
    pub s1: f64,
}

/// Normalized factors
/// `G̃_{k,z} = (1+|z|)^{-ρ-(ℓ-1)(2k+1-2n/p)} e^{-|z|^{2ℓ}/8} G_k(·z̄)` and
/// `H̃_{k,z} = (1+|z|)^{ρ-(ℓ-1)(2n/p-2k-1)} e^{-|z|^{2ℓ}/8} H_k(·z̄)` along
/// `z = r e₁`. At p = 2 the report's ratio is at most 1 by Cauchy-Schwarz.
pub fn boundedness_probe(b: &MultiIndexPoly, ell: f64, rho: f64, p: Exponent, radii: &[f64], trunc: u32, cfg: &QuadConfig) -> Result<BoundednessProbe> {
    let n = b.n;
    let dec = unit_space_decomposition(n, ell, None)?;
    let g_space = SpaceParams::new(n, ell, 1.0, rho, p)?;
    let h_space = SpaceParams::new(n, ell, 1.0, -rho, p.conjugate())?;
    let s1 = hankel_matrix(b, ell, 1.0, rho, trunc, cfg)?.singular_values.first().copied().unwrap_or(0.0);
    let (nf, ip) = (n as f64, p.recip());
    let mut ln_g = vec![Vec::with_capacity(radii.len()); n + 1];
    let mut ln_h = vec![Vec::with_capacity(radii.len()); n + 1];
    let mut value = Vec::with_capacity(radii.len());
    let mut env = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut z = vec![Complex64::new(0.0, 0.0); n];
        z[0] = Complex64::new(r, 0.0);
        let (lr, e8) = (r.ln_1p(), r.powf(2.0 * ell) / 8.0);
        let mut sum = f64::NEG_INFINITY;
        for k in 0..=n {
            let kf = k as f64;
            let g = dec.ln_factor_norm(FactorKind::G, k, &g_space, &z, cfg)? - (rho + (ell - 1.0) * (2.0 * kf + 1.0 - 2.0 * nf * ip)) * lr - e8;
            let h = dec.ln_factor_norm(FactorKind::H, k, &h_space, &z, cfg)? + (rho - (ell - 1.0) * (2.0 * nf * ip - 2.0 * kf - 1.0)) * lr - e8;
            ln_g[k].push(g);
            ln_h[k].push(h);
            let t = g + h;
            let m = sum.max(t);
            sum = m + ((sum - m).exp() + (t - m).exp()).ln();
        }
        value.push(b.eval(&z).norm().ln() - 2.0 * e8);
        env.push(s1.ln() + sum);
    }
    let rec = json!({"kind": "boundedness_probe", "n": n, "ell": ell, "rho": rho, "p": p, "trunc": trunc});
    Ok(BoundednessProbe { report: RatioReport::new(rec, ell, radii.to_vec(), value, env)?, ln_g_tilde: ln_g, ln_h_tilde: ln_h, s1 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn w_pow(n: usize, nu: Vec<u32>) -> MultiIndexPoly {
        assert_eq!(nu.len(), n);
        MultiIndexPoly::monomial(MultiIndex(nu), c(1.0, 0.0))
    }

    #[test]
    fn zero_symbol() {
        let h = hankel_matrix(&MultiIndexPoly::zero(1), 1.0, 1.0, 0.0, 5, &QuadConfig::default()).unwrap();
        assert!(h.matrix.iter().all(|v| v.norm() == 0.0));
        assert_eq!(h.schatten(1.0).unwrap(), 0.0);
    }

    #[test]
    fn square_symbol() {
        let h = hankel_matrix(&w_pow(1, vec![2]), 1.0, 1.0, 0.0, 4, &QuadConfig::default()).unwrap();
        let r2 = 2f64.sqrt();
        for i in 0..5 {
            for j in 0..5 {
                let want = match (i, j) {
                    (0, 2) | (2, 0) => r2,
                    (1, 1) => 2.0,
                    _ => 0.0,
                };
                assert!((h.matrix[(i, j)] - want).norm() < 1e-13, "({i},{j}) {}", h.matrix[(i, j)]);
            }
        }
        assert!((h.schatten(f64::INFINITY).unwrap() - 2.0).abs() < 1e-13);
        assert!((h.schatten(1.0).unwrap() - (2.0 + 2.0 * r2)).abs() < 1e-12);
    }

    #[test]
    fn entries_depend_on_sum_only() {
        let b = kernel_poly(0.5, 2.0, &[c(0.7, 0.2), c(-0.3, 0.5)], 6).unwrap();
        let h = hankel_matrix(&b, 2.0, 1.0, 0.0, 6, &QuadConfig::default()).unwrap();
        for (kappa, v) in h.normalized_entries() {
            let want = b.coeff(&kappa).conj();
            assert!((v - want).norm() <= 1e-12 * want.norm(), "{kappa:?}");
        }
    }

    #[test]
    fn schatten_examples() {
        assert_eq!(schatten_norm(&[], 2.0).unwrap(), 0.0);
        assert!(schatten_norm(&[1.0], 0.0).is_err());
        assert!((schatten_norm(&[3.0, 4.0], 2.0).unwrap() - 5.0).abs() < 1e-14);
        assert!((schatten_norm(&[1.0, 1.0], 0.5).unwrap() - 4.0).abs() < 1e-14);
    }

    #[test]
    fn projection_of_monomials() {
        // P(w̄ w³) = (‖w³‖²/‖w²‖²) w² = 3 w² at ℓ = α = 1.
        let p = hankel_projection(&w_pow(1, vec![3]), &w_pow(1, vec![1]), 1.0, 1.0).unwrap();
        assert!((p.coeff(&MultiIndex(vec![2])) - 3.0).norm() < 1e-13);
        assert_eq!(p.terms.len(), 1);
    }

    #[test]
    fn rank_one_at_origin() {
        let r = rank_one_check(&[c(0.0, 0.0)], 2.0, 0.0, 10, &QuadConfig::default()).unwrap();
        assert_eq!(r.numerical_rank, 1);
        assert!((r.s1 - r.predicted_s1).abs() <= 1e-12 * r.s1);
    }

    #[test]
    fn rank_one_gaussian() {
        let r = rank_one_check(&[c(1.0, 0.0)], 1.0, 0.0, 30, &QuadConfig::default()).unwrap();
        assert_eq!(r.numerical_rank, 1);
        let want = 0.5 * 0.25f64.exp();
        assert!((r.s1 - want).abs() <= 1e-4 * want);
        assert!((r.predicted_s1 - want).abs() <= 1e-13 * want);
    }

    #[test]
    fn rank_one_weighted() {
        let cfg = QuadConfig::default();
        let r = rank_one_check(&[c(0.6, 0.8)], 2.0, 1.0, 40, &cfg).unwrap();
        assert_eq!(r.numerical_rank, 1);
        assert!((r.s1 - r.predicted_s1).abs() <= 1e-6 * r.s1, "{} {}", r.s1, r.predicted_s1);
    }

    #[test]
    fn representation_of_constant_and_linear() {
        let p = DecompParams::new(1.0, 1, 1.0, 1.0, 1.0, None).unwrap();
        let b = MultiIndexPoly::constant(1, c(0.3, -1.2));
        assert!(representation_residual(&b, &[c(0.0, 0.0)], &p, 20).unwrap() < 1e-8);
        let w = w_pow(1, vec![1]);
        assert!(representation_residual(&w, &[c(0.7, 0.0)], &p, 30).unwrap() < 1e-8);
    }

    #[test]
    fn representation_two_dimensional() {
        let p = DecompParams::new(2.0, 2, 1.0, 1.0, 1.0, None).unwrap();
        let mut b = w_pow(2, vec![2, 1]);
        b.insert(MultiIndex(vec![0, 1]), c(0.5, 0.5));
        b.insert(MultiIndex(vec![0, 0]), c(-1.0, 0.0));
        let r = representation_residual(&b, &[c(0.9, -0.4), c(0.3, 1.1)], &p, 12).unwrap();
        assert!(r < 1e-10, "{r}");
    }

    #[test]
    fn dilation_covariance() {
        let b = kernel_poly(0.5, 2.0, &[c(0.8, 0.1)], 12).unwrap();
        let r = dilation_covariance_residual(&b, 2.0, 2.5, 0.0, 2.0, 14, &QuadConfig::default()).unwrap();
        assert!(r < 1e-10, "{r}");
    }
}

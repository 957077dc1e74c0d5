//! Exact derivative calculus on coefficient polynomials and the
//! Littlewood-Paley ratio `[Σ_{m<k} |∇^m f(0)| + ‖∇^k f‖] / ‖f‖`, where
//! `‖∇^k f‖` is taken with the weight exponent lowered by `k(2ℓ-1)`.
//!
//! Axes are 0-based: `j` ranges over `0..n`.

use crate::decomposition::factor_b;
use crate::error::{param, Error, Result};
use crate::fock::{ln_monomial_norm_sq, MultiIndex, MultiIndexPoly, SpaceParams};
use crate::mittag_leffler::{MLParams, MittagLeffler};
use crate::quadrature::{ln_norm_fn, ln_norm_poly, ln_norm_slice, QuadConfig, RatioReport, SliceFunction};
use crate::scaled::ScaledComplex;
use num_complex::Complex64;
use num_traits::{FromPrimitive, Num};
use serde::Serialize;
use serde_json::json;
use std::collections::BTreeMap;
use std::f64::consts::PI;

/// Bumped whenever the members of `lp_family` change.
pub const LP_FAMILY_VERSION: u32 = 1;

/// Coefficient map over any number type, so the identities can also be run
/// in exact rational arithmetic.
pub type Terms<T> = BTreeMap<MultiIndex, T>;

fn from_u32<T: FromPrimitive>(k: u32) -> T {
    T::from_u32(k).expect("small integer is representable")
}

fn put<T: Num + Clone>(out: &mut Terms<T>, nu: MultiIndex, c: T) {
    if c.is_zero() {
        return;
    }
    let e = out.entry(nu.clone()).or_insert_with(T::zero);
    *e = e.clone() + c;
    if e.is_zero() {
        out.remove(&nu);
    }
}

/// `∂_j`: the coefficient of ν becomes `(ν_j+1) f_{ν+e_j}`.
pub fn partial_derivative_terms<T: Num + Clone + FromPrimitive>(terms: &Terms<T>, j: usize) -> Terms<T> {
    let mut out = Terms::new();
    for (nu, c) in terms {
        let k = nu.0[j];
        if k == 0 {
            continue;
        }
        let mut mu = nu.clone();
        mu.0[j] -= 1;
        put(&mut out, mu, c.clone() * from_u32(k));
    }
    out
}

/// `S_j(g)(z) = z_j ∫_0^1 g(tz) dt`: the coefficient of `ν+e_j` becomes
/// `g_ν/(|ν|+1)`.
pub fn sj_apply_terms<T: Num + Clone + FromPrimitive>(terms: &Terms<T>, j: usize) -> Terms<T> {
    let mut out = Terms::new();
    for (nu, c) in terms {
        let mut mu = nu.clone();
        mu.0[j] += 1;
        put(&mut out, mu, c.clone() / from_u32(nu.order() + 1));
    }
    out
}

/// `f(0) + Σ_j S_j(∂_j f)`, which equals `f`.
pub fn reconstruct_terms<T: Num + Clone + FromPrimitive>(terms: &Terms<T>, n: usize) -> Terms<T> {
    let mut out = Terms::new();
    if let Some(c) = terms.get(&MultiIndex::zero(n)) {
        put(&mut out, MultiIndex::zero(n), c.clone());
    }
    for j in 0..n {
        for (nu, c) in sj_apply_terms(&partial_derivative_terms(terms, j), j) {
            put(&mut out, nu, c);
        }
    }
    out
}

fn check_axis(f: &MultiIndexPoly, j: usize) -> Result<()> {
    if j >= f.n {
        return Err(Error::Index(format!("axis {j} out of range for n = {}", f.n)));
    }
    Ok(())
}

pub fn partial_derivative(f: &MultiIndexPoly, j: usize) -> Result<MultiIndexPoly> {
    check_axis(f, j)?;
    Ok(MultiIndexPoly { n: f.n, terms: partial_derivative_terms(&f.terms, j) })
}

pub fn sj_apply(g: &MultiIndexPoly, j: usize) -> Result<MultiIndexPoly> {
    check_axis(g, j)?;
    Ok(MultiIndexPoly { n: g.n, terms: sj_apply_terms(&g.terms, j) })
}

pub fn reconstruct(f: &MultiIndexPoly) -> MultiIndexPoly {
    MultiIndexPoly { n: f.n, terms: reconstruct_terms(&f.terms, f.n) }
}

/// Largest coefficient difference between f and its reconstruction,
/// relative to the largest coefficient of f.
pub fn reconstruction_defect(f: &MultiIndexPoly) -> f64 {
    let r = reconstruct(f);
    let scale = f.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
    if scale == 0.0 {
        return if r.is_zero() { 0.0 } else { f64::INFINITY };
    }
    let diff = f.add(&r.scale(Complex64::new(-1.0, 0.0))).expect("same dimension");
    diff.terms.values().map(|c| c.norm()).fold(0.0, f64::max) / scale
}

/// All `∂^ν f` with `|ν| = m`.
#[derive(Clone, Debug)]
pub struct GradientLayer {
    pub order: u32,
    pub parts: BTreeMap<MultiIndex, MultiIndexPoly>,
}

impl GradientLayer {
    pub fn new(f: &MultiIndexPoly, order: u32) -> Self {
        let parts = MultiIndex::of_order(f.n, order)
            .into_iter()
            .map(|nu| {
                let mut d = f.clone();
                for (j, &k) in nu.0.iter().enumerate() {
                    for _ in 0..k {
                        d = MultiIndexPoly { n: f.n, terms: partial_derivative_terms(&d.terms, j) };
                    }
                }
                (nu, d)
            })
            .collect();
        GradientLayer { order, parts }
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.parts.values().all(MultiIndexPoly::is_zero)
    }

    /// `|∇^m f(0)| = Σ_ν |∂^ν f(0)|`.
    pub fn at_origin(&self) -> f64 {
        self.parts.values().map(|d| d.value_at_origin().norm()).sum()
    }

    /// `ln Σ_ν |∂^ν f(w)|`.
    pub fn ln_abs_sum(&self, w: &[Complex64]) -> f64 {
        self.parts.values().map(|d| d.eval(w).norm()).sum::<f64>().ln()
    }

    fn nonzero(&self) -> Vec<&MultiIndexPoly> {
        self.parts.values().filter(|d| !d.is_zero()).collect()
    }
}

fn ln_add(a: f64, b: f64) -> f64 {
    let m = a.max(b);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + ((a - m).exp() + (b - m).exp()).ln()
}

/// The pieces of one Littlewood-Paley ratio.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpRatio {
    pub k: u32,
    /// `Σ_{m<k} |∇^m f(0)|`.
    pub origin: f64,
    /// `ln ‖∇^k f‖` in the shifted space.
    pub ln_gradient_norm: f64,
    /// `ln ‖f‖`.
    pub ln_norm: f64,
    pub ln_ratio: f64,
}

impl LpRatio {
    pub fn ratio(&self) -> f64 {
        self.ln_ratio.exp()
    }
}

/// Space for `∇^k f`: ρ lowered by `k(2ℓ-1)`.
pub fn gradient_space(params: &SpaceParams, k: u32) -> SpaceParams {
    params.with_rho(params.rho - k as f64 * (2.0 * params.ell - 1.0))
}

/// `ln ‖∇^k f‖` in the shifted space; exact orthogonality when only one
/// partial derivative survives and p = 2.
pub fn ln_gradient_norm(f: &MultiIndexPoly, k: u32, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
    let layer = GradientLayer::new(f, k);
    let space = gradient_space(params, k);
    let live = layer.nonzero();
    match live.len() {
        0 => Ok(f64::NEG_INFINITY),
        1 => ln_norm_poly(live[0], &space, cfg),
        _ => ln_norm_fn(&|w: &[Complex64]| layer.ln_abs_sum(w), &space, cfg),
    }
}

fn check_ratio_input(f: &MultiIndexPoly, k: u32, ln_norm: f64, params: &SpaceParams) -> Result<()> {
    if k < 1 {
        return Err(param("k", "must be >= 1"));
    }
    if f.n != params.n {
        return Err(Error::Dimension(f.n, params.n));
    }
    if f.is_zero() {
        return Err(param("f", "must be nonzero"));
    }
    if !ln_norm.is_finite() {
        return Err(param("f", "norm underflows or overflows"));
    }
    Ok(())
}

fn assemble(f: &MultiIndexPoly, k: u32, lg: f64, ln_norm: f64) -> LpRatio {
    let origin: f64 = (0..k).map(|m| GradientLayer::new(f, m).at_origin()).sum();
    LpRatio { k, origin, ln_gradient_norm: lg, ln_norm, ln_ratio: ln_add(origin.ln(), lg) - ln_norm }
}

/// Ratio with `ln ‖f‖` supplied, so one norm serves several k.
pub fn lp_ratio_with_norm(f: &MultiIndexPoly, k: u32, ln_norm: f64, params: &SpaceParams, cfg: &QuadConfig) -> Result<LpRatio> {
    check_ratio_input(f, k, ln_norm, params)?;
    let lg = ln_gradient_norm(f, k, params, cfg)?;
    Ok(assemble(f, k, lg, ln_norm))
}

pub fn lp_ratio(f: &MultiIndexPoly, k: u32, params: &SpaceParams, cfg: &QuadConfig) -> Result<LpRatio> {
    let ln_norm = ln_norm_poly(f, params, cfg)?;
    lp_ratio_with_norm(f, k, ln_norm, params, cfg)
}

/// `f(w) = Σ_m c_m (w·z̄)^m`, a function of one variable along the anchor.
#[derive(Clone, Debug, Serialize)]
pub struct SliceForm {
    pub coeffs: Vec<f64>,
    pub anchor: Vec<Complex64>,
}

impl SliceForm {
    fn horner(coeffs: &[f64], lambda: Complex64) -> Complex64 {
        coeffs.iter().rev().fold(Complex64::new(0.0, 0.0), |acc, c| acc * lambda + c)
    }

    fn ln_norm_of(coeffs: &[f64], anchor: &[Complex64], space: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
        if coeffs.iter().all(|&c| c == 0.0) {
            return Ok(f64::NEG_INFINITY);
        }
        let sf = SliceFunction::new(|l| Ok(ScaledComplex::from_complex(Self::horner(coeffs, l))), anchor.to_vec(), true);
        ln_norm_slice(&sf, space, cfg)
    }

    pub fn ln_norm(&self, space: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
        Self::ln_norm_of(&self.coeffs, &self.anchor, space, cfg)
    }

    /// `∂^ν f = z̄^ν F^{(|ν|)}(w·z̄)`, so `|∇^k f| = (Σ_{|ν|=k} |z^ν|) |F^{(k)}(w·z̄)|`.
    pub fn ln_gradient_norm(&self, k: u32, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
        let ku = k as usize;
        let deriv: Vec<f64> = (ku..self.coeffs.len())
            .map(|m| self.coeffs[m] * ((m - ku + 1)..=m).map(|i| i as f64).product::<f64>())
            .collect();
        let spread: f64 = MultiIndex::of_order(self.anchor.len(), k).iter().map(|nu| nu.monomial(&self.anchor).norm()).sum();
        Ok(spread.ln() + Self::ln_norm_of(&deriv, &self.anchor, &gradient_space(params, k), cfg)?)
    }
}

/// A family member; kernel truncations also carry their slice form, which
/// gives the same norms through one-variable integrals.
#[derive(Clone, Debug, Serialize)]
pub struct LpMember {
    pub name: String,
    #[serde(skip)]
    pub poly: MultiIndexPoly,
    pub slice: Option<SliceForm>,
}

impl LpMember {
    pub fn ln_norm(&self, params: &SpaceParams, cfg: &QuadConfig) -> Result<f64> {
        match &self.slice {
            Some(s) => s.ln_norm(params, cfg),
            None => ln_norm_poly(&self.poly, params, cfg),
        }
    }

    pub fn ratio(&self, k: u32, ln_norm: f64, params: &SpaceParams, cfg: &QuadConfig) -> Result<LpRatio> {
        match &self.slice {
            Some(s) => {
                check_ratio_input(&self.poly, k, ln_norm, params)?;
                let lg = s.ln_gradient_norm(k, params, cfg)?;
                Ok(assemble(&self.poly, k, lg, ln_norm))
            }
            None => lp_ratio_with_norm(&self.poly, k, ln_norm, params, cfg),
        }
    }
}

/// Unit vector along the direction of angle `t`, spread over all axes.
fn direction(n: usize, t: f64) -> Vec<Complex64> {
    let s = (n as f64).sqrt().recip();
    (0..n).map(|j| Complex64::from_polar(s, t * (j + 1) as f64)).collect()
}

/// `K_α(·, z)` truncated to degree N, in slice form: `c_m = 1/‖w₁^m‖²_α`.
pub fn kernel_member(name: String, params: &SpaceParams, z: Vec<Complex64>, degree: u32) -> LpMember {
    let n = params.n;
    let coeffs: Vec<f64> = (0..=degree)
        .map(|m| {
            let mut nu = vec![0; n];
            nu[0] = m;
            (-ln_monomial_norm_sq(n, params.ell, params.alpha, &MultiIndex(nu))).exp()
        })
        .collect();
    let poly = MultiIndexPoly::from_slice(&coeffs, &z);
    LpMember { name, poly, slice: Some(SliceForm { coeffs, anchor: z }) }
}

/// The fixed test family: monomials of degree 0..=12, kernel truncations
/// at five unit anchors, and dilates of the first anchor.
pub fn lp_family(params: &SpaceParams) -> Vec<LpMember> {
    let n = params.n;
    let one = Complex64::new(1.0, 0.0);
    let mut out = Vec::new();
    let mono = |nu: Vec<u32>| LpMember {
        name: format!("mono{:?}", nu),
        poly: MultiIndexPoly::monomial(MultiIndex(nu), one),
        slice: None,
    };
    for d in 0..=12u32 {
        let mut nu = vec![0; n];
        nu[0] = d;
        out.push(mono(nu));
        if n > 1 && d > 1 {
            let mut nu = vec![0; n];
            nu[0] = d - d / 2;
            nu[1] = d / 2;
            out.push(mono(nu));
        }
    }
    let degree = if n == 1 { 24 } else { 16 };
    for a in 0..5 {
        let z = direction(n, 2.0 * PI * a as f64 / 5.0 + 0.3);
        out.push(kernel_member(format!("kernel{a}"), params, z, degree));
    }
    let z0 = direction(n, 0.3);
    for delta in [0.5, 0.75, 1.5, 2.0] {
        let z = z0.iter().map(|v| v * delta).collect();
        out.push(kernel_member(format!("dilate{delta}"), params, z, degree));
    }
    out
}

/// Ratios over `lp_family` for one k, with the band max/min.
#[derive(Clone, Debug, Serialize)]
pub struct LpBand {
    pub family_version: u32,
    pub params: SpaceParams,
    pub k: u32,
    pub members: Vec<(String, LpRatio)>,
    pub min: f64,
    pub max: f64,
    pub band: f64,
}

pub fn lp_bands(params: &SpaceParams, ks: &[u32], cfg: &QuadConfig) -> Result<Vec<LpBand>> {
    let family = lp_family(params);
    let norms = family.iter().map(|m| m.ln_norm(params, cfg)).collect::<Result<Vec<_>>>()?;
    ks.iter()
        .map(|&k| {
            let members = family
                .iter()
                .zip(&norms)
                .map(|(m, &ln)| Ok((m.name.clone(), m.ratio(k, ln, params, cfg)?)))
                .collect::<Result<Vec<_>>>()?;
            let lo = members.iter().map(|m| m.1.ln_ratio).fold(f64::INFINITY, f64::min);
            let hi = members.iter().map(|m| m.1.ln_ratio).fold(f64::NEG_INFINITY, f64::max);
            Ok(LpBand {
                family_version: LP_FAMILY_VERSION,
                params: *params,
                k,
                members,
                min: lo.exp(),
                max: hi.exp(),
                band: (hi - lo).exp(),
            })
        })
        .collect()
}

/// `‖F^{(k)}(·z̄)‖_{ρ-k(2ℓ-1)} (1+|z|)^k` against `‖F(·z̄)‖_ρ` along `r e₁`
/// for `F = E_{1/ℓ,(ℓ+1)/(2ℓ)}`; the log-ratio should stay bounded above.
pub fn derivative_slice_report(params: &SpaceParams, k: u32, radii: &[f64], cfg: &QuadConfig) -> Result<RatioReport> {
    let a = 1.0 / params.ell;
    let b = factor_b(params.ell);
    let base = MittagLeffler::new(MLParams::new(a, b, 0)?);
    let der = MittagLeffler::new(MLParams::new(a, b, k)?);
    let shifted = gradient_space(params, k);
    let mut value = Vec::with_capacity(radii.len());
    let mut env = Vec::with_capacity(radii.len());
    for &r in radii {
        let mut z = vec![Complex64::new(0.0, 0.0); params.n];
        z[0] = Complex64::new(r, 0.0);
        let fd = SliceFunction::new(|l| der.eval_fast(l), z.clone(), true);
        let f0 = SliceFunction::new(|l| base.eval_fast(l), z, true);
        value.push(ln_norm_slice(&fd, &shifted, cfg)? + k as f64 * r.ln_1p());
        env.push(ln_norm_slice(&f0, params, cfg)?);
    }
    let rec = json!({"kind": "derivative_slice", "space": params, "k": k});
    RatioReport::new(rec, params.ell, radii.to_vec(), value, env)
}

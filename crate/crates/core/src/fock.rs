//! Space parameters, weights, multi-index polynomials and exact pairings.

use crate::error::{param, Error, Result};
use crate::mittag_leffler::arg;
use crate::special::{ln_factorial, ln_gamma};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt;

/// Integrability exponent; infinity is a tag, not a float.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Exponent {
    Finite(f64),
    Infinity,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self> {
        if p.is_infinite() && p > 0.0 {
            return Ok(Exponent::Infinity);
        }
        if !(p > 0.0) {
            return Err(param("p", format!("must be positive, got {p}")));
        }
        Ok(Exponent::Finite(p))
    }

    /// The conjugate exponent p' with 1/p + 1/p' = 1.
    pub fn conjugate(&self) -> Exponent {
        match *self {
            Exponent::Infinity => Exponent::Finite(1.0),
            Exponent::Finite(p) if p == 1.0 => Exponent::Infinity,
            Exponent::Finite(p) => Exponent::Finite(p / (p - 1.0)),
        }
    }

    /// 1/p, zero for infinity.
    pub fn recip(&self) -> f64 {
        match *self {
            Exponent::Infinity => 0.0,
            Exponent::Finite(p) => 1.0 / p,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Exponent::Infinity)
    }

    pub fn as_f64(&self) -> f64 {
        match *self {
            Exponent::Infinity => f64::INFINITY,
            Exponent::Finite(p) => p,
        }
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Exponent::Infinity => write!(f, "inf"),
            Exponent::Finite(p) => write!(f, "{p}"),
        }
    }
}

impl std::str::FromStr for Exponent {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "inf" | "infinity" | "Inf" | "oo" => Ok(Exponent::Infinity),
            t => {
                let p: f64 = t.parse().map_err(|_| param("p", format!("cannot parse `{t}`")))?;
                Exponent::new(p)
            }
        }
    }
}

impl Serialize for Exponent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Exponent::Infinity => s.serialize_str("inf"),
            Exponent::Finite(p) => s.serialize_f64(*p),
        }
    }
}

impl<'de> Deserialize<'de> for Exponent {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = Value::deserialize(d)?;
        match v {
            Value::String(s) => s.parse().map_err(serde::de::Error::custom),
            Value::Number(n) => Exponent::new(n.as_f64().unwrap_or(f64::NAN)).map_err(serde::de::Error::custom),
            _ => Err(serde::de::Error::custom("p must be a number or \"inf\"")),
        }
    }
}

/// The tuple (n, ℓ, α, ρ, p) naming a weighted space on ℂⁿ.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpaceParams {
    pub n: usize,
    pub ell: f64,
    pub alpha: f64,
    pub rho: f64,
    pub p: Exponent,
}

impl SpaceParams {
    pub fn new(n: usize, ell: f64, alpha: f64, rho: f64, p: Exponent) -> Result<Self> {
        if n < 1 {
            return Err(param("n", "dimension must be >= 1"));
        }
        if !(ell >= 1.0 && ell.is_finite()) {
            return Err(param("ell", format!("must be >= 1, got {ell}")));
        }
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(param("alpha", format!("must be >= 0, got {alpha}")));
        }
        if !rho.is_finite() {
            return Err(param("rho", "must be finite"));
        }
        if let Exponent::Finite(q) = p {
            if q < 1.0 {
                return Err(param("p", format!("must lie in [1, inf], got {q}")));
            }
        }
        Ok(SpaceParams { n, ell, alpha, rho, p })
    }

    /// Same space with p replaced.
    pub fn with_p(&self, p: Exponent) -> Self {
        SpaceParams { p, ..*self }
    }

    pub fn with_rho(&self, rho: f64) -> Self {
        SpaceParams { rho, ..*self }
    }

    pub fn p_conj(&self) -> Exponent {
        self.p.conjugate()
    }
}

/// `ln[(1+r)^ρ e^{-(α/2) r^{2ℓ}}]` at radius r = |z|.
pub fn ln_weight_radial(ell: f64, alpha: f64, rho: f64, r: f64) -> f64 {
    rho * r.ln_1p() - 0.5 * alpha * r.powf(2.0 * ell)
}

pub fn norm_vec(z: &[Complex64]) -> f64 {
    z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `(1+|z|)^ρ e^{-(α/2)|z|^{2ℓ}}`.
pub fn weight(params: &SpaceParams, z: &[Complex64]) -> f64 {
    ln_weight_radial(params.ell, params.alpha, params.rho, norm_vec(z)).exp()
}

/// `ln φ_c(λ)`: `c Re(λ^ℓ)` on the sector `|arg λ| <= π/(2ℓ)`, zero elsewhere.
pub fn ln_phi_c(c: f64, ell: f64, lambda: Complex64) -> f64 {
    let t = arg(lambda);
    if t.abs() <= PI / (2.0 * ell) {
        let v = c * lambda.norm().powf(ell) * (ell * t).cos();
        v.max(0.0)
    } else {
        0.0
    }
}

pub fn phi_c(c: f64, ell: f64, lambda: Complex64) -> f64 {
    ln_phi_c(c, ell, lambda).exp()
}

/// Multi-index ν = (ν₁,…,νₙ).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<u32>);

impl MultiIndex {
    pub fn zero(n: usize) -> Self {
        MultiIndex(vec![0; n])
    }

    pub fn unit(n: usize, j: usize) -> Self {
        let mut v = vec![0; n];
        v[j] = 1;
        MultiIndex(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn order(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn ln_factorial(&self) -> f64 {
        self.0.iter().map(|&k| ln_factorial(k as u64)).sum()
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `z^ν` as a native complex.
    pub fn monomial(&self, z: &[Complex64]) -> Complex64 {
        self.0.iter().zip(z).fold(Complex64::new(1.0, 0.0), |acc, (&k, zj)| acc * zj.powu(k))
    }

    /// All multi-indices of exact order d, graded lexicographic order.
    pub fn of_order(n: usize, d: u32) -> Vec<MultiIndex> {
        let mut out = Vec::new();
        let mut cur = vec![0u32; n];
        fn rec(pos: usize, left: u32, cur: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
            let n = cur.len();
            if pos == n - 1 {
                cur[pos] = left;
                out.push(MultiIndex(cur.clone()));
                return;
            }
            for k in (0..=left).rev() {
                cur[pos] = k;
                rec(pos + 1, left - k, cur, out);
            }
        }
        rec(0, d, &mut cur, &mut out);
        out
    }

    /// All multi-indices with |ν| <= max, by degree then graded lex.
    pub fn up_to(n: usize, max: u32) -> Vec<MultiIndex> {
        (0..=max).flat_map(|d| Self::of_order(n, d)).collect()
    }
}

/// `ln ‖w^ν‖²` in the α-pairing with `e^{-α|w|^{2ℓ}}` and unit-ball-normalized volume.
pub fn ln_monomial_norm_sq(n: usize, ell: f64, alpha: f64, nu: &MultiIndex) -> f64 {
    let k = nu.order() as f64;
    let nf = n as f64;
    -(k + nf) / ell * alpha.ln() - ell.ln() + ln_factorial(n as u64) + nu.ln_factorial() + ln_gamma((k + nf) / ell)
        - ln_gamma(nf + k)
}

/// `‖w^ν‖²_{F²_α} = (α^{-(|ν|+n)/ℓ}/ℓ) n! ν! Γ((|ν|+n)/ℓ)/(n-1+|ν|)!`.
pub fn monomial_norm_sq(n: usize, ell: f64, alpha: f64, nu: &MultiIndex) -> Result<f64> {
    if !(alpha > 0.0) {
        return Err(param("alpha", "must be positive"));
    }
    if nu.dim() != n {
        return Err(Error::Dimension(nu.dim(), n));
    }
    Ok(ln_monomial_norm_sq(n, ell, alpha, nu).exp())
}

/// Entire function stored as finitely many Taylor coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct MultiIndexPoly {
    pub n: usize,
    pub terms: BTreeMap<MultiIndex, Complex64>,
}

impl MultiIndexPoly {
    pub fn zero(n: usize) -> Self {
        MultiIndexPoly { n, terms: BTreeMap::new() }
    }

    pub fn constant(n: usize, c: Complex64) -> Self {
        let mut p = Self::zero(n);
        p.insert(MultiIndex::zero(n), c);
        p
    }

    pub fn monomial(nu: MultiIndex, c: Complex64) -> Self {
        let mut p = Self::zero(nu.dim());
        p.insert(nu, c);
        p
    }

    /// Adds `c` to the coefficient of ν, dropping it if it becomes zero.
    pub fn insert(&mut self, nu: MultiIndex, c: Complex64) {
        assert_eq!(nu.dim(), self.n, "multi-index dimension");
        let e = self.terms.entry(nu.clone()).or_insert(Complex64::new(0.0, 0.0));
        *e += c;
        if e.re == 0.0 && e.im == 0.0 {
            self.terms.remove(&nu);
        }
    }

    pub fn coeff(&self, nu: &MultiIndex) -> Complex64 {
        self.terms.get(nu).copied().unwrap_or(Complex64::new(0.0, 0.0))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|k| k.order()).max().unwrap_or(0)
    }

    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        if self.terms.len() <= 2 {
            return self.terms.iter().map(|(nu, c)| c * nu.monomial(z)).sum();
        }
        // Power tables per coordinate, then one product per term.
        let deg = self.degree() as usize;
        let powers: Vec<Vec<Complex64>> = z
            .iter()
            .map(|&zj| {
                let mut t = Vec::with_capacity(deg + 1);
                let mut x = Complex64::new(1.0, 0.0);
                for _ in 0..=deg {
                    t.push(x);
                    x *= zj;
                }
                t
            })
            .collect();
        self.terms
            .iter()
            .map(|(nu, c)| nu.0.iter().zip(&powers).fold(*c, |acc, (&k, t)| acc * t[k as usize]))
            .sum()
    }

    pub fn value_at_origin(&self) -> Complex64 {
        self.coeff(&MultiIndex::zero(self.n))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        let mut out = self.clone();
        for (nu, c) in &other.terms {
            out.insert(nu.clone(), *c);
        }
        Ok(out)
    }

    pub fn scale(&self, s: Complex64) -> Self {
        let mut out = Self::zero(self.n);
        for (nu, c) in &self.terms {
            out.insert(nu.clone(), c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension(self.n, other.n));
        }
        let mut out = Self::zero(self.n);
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                out.insert(a.add(b), ca * cb);
            }
        }
        Ok(out)
    }

    /// `w ↦ f(δ w)` for real δ.
    pub fn dilate(&self, delta: f64) -> Self {
        let mut out = Self::zero(self.n);
        for (nu, c) in &self.terms {
            out.insert(nu.clone(), c * delta.powi(nu.order() as i32));
        }
        out
    }

    /// Coefficient-wise conjugate, i.e. `w ↦ conj(f(conj w))`.
    pub fn conj_coeffs(&self) -> Self {
        let mut out = Self::zero(self.n);
        for (nu, c) in &self.terms {
            out.insert(nu.clone(), c.conj());
        }
        out
    }

    /// Keep the terms of order at most `max`.
    pub fn truncate(&self, max: u32) -> Self {
        let mut out = Self::zero(self.n);
        for (nu, c) in &self.terms {
            if nu.order() <= max {
                out.insert(nu.clone(), *c);
            }
        }
        out
    }

    /// `w ↦ F(w·z̄)` for `F(λ) = Σ_m c_m λ^m`, expanded by the multinomial
    /// theorem: `(w·z̄)^m = Σ_{|ν|=m} (m!/ν!) w^ν z̄^ν`.
    pub fn from_slice(coeffs: &[f64], z: &[Complex64]) -> Self {
        let n = z.len();
        let zc: Vec<Complex64> = z.iter().map(|v| v.conj()).collect();
        let mut out = Self::zero(n);
        for (m, &c) in coeffs.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            for nu in MultiIndex::of_order(n, m as u32) {
                let multinomial = (ln_factorial(m as u64) - nu.ln_factorial()).exp();
                out.insert(nu.clone(), nu.monomial(&zc) * (c * multinomial));
            }
        }
        out
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms
            .iter()
            .map(|(nu, c)| json!({"nu": nu.0, "re": c.re, "im": c.im}))
            .collect();
        json!({"n": self.n, "terms": terms})
    }

    /// Parse the interchange format, naming the offending field on failure.
    pub fn from_json(v: &Value) -> Result<Self> {
        let obj = v.as_object().ok_or_else(|| param("symbol", "expected a JSON object"))?;
        let n = obj
            .get("n")
            .and_then(Value::as_u64)
            .filter(|&n| n >= 1)
            .ok_or_else(|| param("n", "expected a positive integer"))? as usize;
        let terms = obj
            .get("terms")
            .and_then(Value::as_array)
            .ok_or_else(|| param("terms", "expected an array"))?;
        let mut out = Self::zero(n);
        for (i, t) in terms.iter().enumerate() {
            let field = |name: &str| format!("terms[{i}].{name}");
            let nu = t
                .get("nu")
                .and_then(Value::as_array)
                .ok_or_else(|| param(&field("nu"), "expected an array of non-negative integers"))?;
            if nu.len() != n {
                return Err(param(&field("nu"), format!("expected {n} entries, got {}", nu.len())));
            }
            let mut idx = Vec::with_capacity(n);
            for (j, e) in nu.iter().enumerate() {
                let k = e
                    .as_u64()
                    .filter(|&k| k <= u32::MAX as u64)
                    .ok_or_else(|| param(&format!("terms[{i}].nu[{j}]"), "expected a non-negative integer"))?;
                idx.push(k as u32);
            }
            let num = |name: &str| -> Result<f64> {
                match t.get(name) {
                    None => Ok(0.0),
                    Some(x) => x
                        .as_f64()
                        .filter(|f| f.is_finite())
                        .ok_or_else(|| param(&field(name), "expected a finite number")),
                }
            };
            let re = num("re")?;
            let im = num("im")?;
            if t.get("re").is_none() && t.get("im").is_none() {
                return Err(param(&field("re"), "missing coefficient"));
            }
            out.insert(MultiIndex(idx), Complex64::new(re, im));
        }
        Ok(out)
    }
}

/// `⟨f, g⟩_α = Σ_ν f_ν conj(g_ν) ‖w^ν‖²`, exact by orthogonality.
pub fn pairing_poly(f: &MultiIndexPoly, g: &MultiIndexPoly, ell: f64, alpha: f64) -> Result<Complex64> {
    if f.n != g.n {
        return Err(Error::Dimension(f.n, g.n));
    }
    if !(alpha > 0.0) {
        return Err(param("alpha", "must be positive"));
    }
    let mut s = Complex64::new(0.0, 0.0);
    for (nu, c) in &f.terms {
        if let Some(d) = g.terms.get(nu) {
            s += c * d.conj() * ln_monomial_norm_sq(f.n, ell, alpha, nu).exp();
        }
    }
    Ok(s)
}

/// `|⟨f,g⟩_α − δ^{2n} ⟨f, g(δ²·)⟩_{δ^{2ℓ}α}|`.
pub fn dilation_pairing_check(
    f: &MultiIndexPoly,
    g: &MultiIndexPoly,
    ell: f64,
    alpha: f64,
    delta: f64,
) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(param("delta", "must be positive"));
    }
    let lhs = pairing_poly(f, g, ell, alpha)?;
    let rhs = pairing_poly(f, &g.dilate(delta * delta), ell, delta.powf(2.0 * ell) * alpha)?
        * delta.powi(2 * f.n as i32);
    Ok((lhs - rhs).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special::factorial;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn weight_examples() {
        let s = SpaceParams::new(1, 1.0, 2.0, 0.0, Exponent::Finite(2.0)).unwrap();
        assert!((weight(&s, &[c(0.0)]) - 1.0).abs() < 1e-15);
        assert!((weight(&s, &[c(1.0)]) - (-1f64).exp()).abs() < 1e-15);
        let s = SpaceParams::new(1, 2.0, 1.0, -3.0, Exponent::Finite(2.0)).unwrap();
        let want = 3f64.powi(-3) * (-8f64).exp();
        assert!((weight(&s, &[c(2.0)]) - want).abs() < 1e-15 * want.max(1.0));
    }

    #[test]
    fn phi_examples() {
        assert_eq!(phi_c(0.0, 2.0, Complex64::new(3.0, 1.0)), 1.0);
        assert!((phi_c(1.0, 1.0, Complex64::new(0.0, 2.5)) - 1.0).abs() < 1e-15);
        assert!((phi_c(2.0, 2.0, c(1.5)) - 4.5f64.exp()).abs() < 1e-12);
        assert_eq!(phi_c(1.0, 2.0, Complex64::new(-1.0, 0.1)), 1.0);
    }

    #[test]
    fn monomial_norm_examples() {
        for &ell in &[1.0, 1.5, 2.0, 3.0] {
            let v = monomial_norm_sq(1, ell, 0.7, &MultiIndex(vec![0])).unwrap();
            let want = ln_gamma(1.0 + 1.0 / ell).exp() * 0.7f64.powf(-1.0 / ell);
            assert!((v - want).abs() < 1e-13 * want);
        }
        let v = monomial_norm_sq(1, 1.0, 1.0, &MultiIndex(vec![2])).unwrap();
        assert!((v - 2.0).abs() < 1e-13);
        let v = monomial_norm_sq(2, 1.0, 2.0, &MultiIndex(vec![1, 0])).unwrap();
        assert!((v - 0.25).abs() < 1e-14);
    }

    #[test]
    fn monomial_norm_at_ell_one() {
        for n in 1..4usize {
            for nu in MultiIndex::up_to(n, 6) {
                let alpha: f64 = 1.7;
                let v = monomial_norm_sq(n, 1.0, alpha, &nu).unwrap();
                let k = nu.order() as i32 + n as i32;
                let mut want = factorial(n as u64) / alpha.powi(k);
                for &j in &nu.0 {
                    want *= factorial(j as u64);
                }
                assert!((v - want).abs() <= 1e-12 * want, "{nu:?}");
            }
        }
    }

    #[test]
    fn pairing_examples() {
        let one = MultiIndexPoly::constant(1, c(1.0));
        let w = MultiIndexPoly::monomial(MultiIndex(vec![1]), c(1.0));
        let w2 = MultiIndexPoly::monomial(MultiIndex(vec![2]), c(1.0));
        assert_eq!(pairing_poly(&w, &w2, 2.0, 1.0).unwrap(), c(0.0));
        let f = one.add(&w.scale(c(2.0))).unwrap();
        let g = w.scale(c(3.0));
        let v = pairing_poly(&f, &g, 1.0, 1.3).unwrap();
        let want = 6.0 * monomial_norm_sq(1, 1.0, 1.3, &MultiIndex(vec![1])).unwrap();
        assert!((v - c(want)).norm() < 1e-14);
    }

    #[test]
    fn dilation_examples() {
        let one = MultiIndexPoly::constant(1, c(1.0));
        assert!(dilation_pairing_check(&one, &one, 2.0, 1.0, 1.7).unwrap() < 1e-14);
        let w = MultiIndexPoly::monomial(MultiIndex(vec![1]), c(1.0));
        let r = dilation_pairing_check(&w, &w, 1.0, 0.8, 2.0).unwrap();
        assert!(r < 1e-14 * pairing_poly(&w, &w, 1.0, 0.8).unwrap().norm());
        assert_eq!(dilation_pairing_check(&w, &w, 2.0, 0.8, 1.0).unwrap(), 0.0);
    }

    #[test]
    fn graded_order() {
        let v = MultiIndex::up_to(2, 2);
        let got: Vec<Vec<u32>> = v.into_iter().map(|m| m.0).collect();
        assert_eq!(got, vec![vec![0, 0], vec![1, 0], vec![0, 1], vec![2, 0], vec![1, 1], vec![0, 2]]);
    }

    #[test]
    fn json_round_trip() {
        let mut f = MultiIndexPoly::zero(2);
        f.insert(MultiIndex(vec![1, 2]), Complex64::new(0.5, -1.0));
        f.insert(MultiIndex(vec![0, 0]), c(3.0));
        let back = MultiIndexPoly::from_json(&f.to_json()).unwrap();
        assert_eq!(back, f);
    }

    #[test]
    fn json_errors_name_field() {
        let v: Value = serde_json::from_str(r#"{"n":1,"terms":[{"nu":[1],"re":1.0},{"nu":[-1],"re":2}]}"#).unwrap();
        let e = MultiIndexPoly::from_json(&v).unwrap_err().to_string();
        assert!(e.contains("terms[1].nu[0]"), "{e}");
        let v: Value = serde_json::from_str(r#"{"n":2,"terms":[{"nu":[1],"re":1.0}]}"#).unwrap();
        let e = MultiIndexPoly::from_json(&v).unwrap_err().to_string();
        assert!(e.contains("terms[0].nu"), "{e}");
        let v: Value = serde_json::from_str(r#"{"terms":[]}"#).unwrap();
        assert!(MultiIndexPoly::from_json(&v).unwrap_err().to_string().contains("`n`"));
    }

    #[test]
    fn exponent_conjugates() {
        assert_eq!(Exponent::Finite(2.0).conjugate(), Exponent::Finite(2.0));
        assert_eq!(Exponent::Finite(1.0).conjugate(), Exponent::Infinity);
        assert_eq!(Exponent::Infinity.conjugate(), Exponent::Finite(1.0));
        assert_eq!("inf".parse::<Exponent>().unwrap(), Exponent::Infinity);
    }
}

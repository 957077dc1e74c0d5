//! Flags, their validation and the resolved run configuration.

use clap::{Args, ValueEnum};
use fockhankel::decomposition::DecompParams;
use fockhankel::fock::{Exponent, MultiIndexPoly, SpaceParams};
use fockhankel::quadrature::QuadConfig;
use fockhankel::{Error, Result};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

#[derive(Args, Clone, Debug)]
pub struct Flags {
    /// Weight exponent ℓ >= 1.
    #[arg(long, default_value_t = 2.0, global = true, allow_negative_numbers = true)]
    pub ell: f64,
    /// Complex dimension.
    #[arg(long, default_value_t = 1, global = true)]
    pub n: usize,
    #[arg(long, default_value_t = 1.0, global = true, allow_negative_numbers = true)]
    pub alpha: f64,
    #[arg(long, default_value_t = 1.0, global = true, allow_negative_numbers = true)]
    pub beta: f64,
    #[arg(long, default_value_t = 1.0, global = true, allow_negative_numbers = true)]
    pub gamma: f64,
    #[arg(long, default_value_t = 0.0, global = true, allow_negative_numbers = true)]
    pub rho: f64,
    #[arg(long, default_value_t = 0.0, global = true, allow_negative_numbers = true)]
    pub eta: f64,
    /// Integrability exponent, a number >= 1 or `inf`.
    #[arg(long, default_value = "2", global = true)]
    pub p: String,
    /// Splitting parameter in (0,1); defaults to α/(α+β).
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub theta: Option<f64>,
    /// Polynomial truncation degree.
    #[arg(long, default_value_t = 40, global = true)]
    pub trunc: u32,
    /// Number of grid points (radii or random samples).
    #[arg(long, default_value_t = 17, global = true)]
    pub grid: usize,
    /// Smallest grid radius.
    #[arg(long, default_value_t = 1.0, global = true, allow_negative_numbers = true)]
    pub rmin: f64,
    /// Largest grid radius.
    #[arg(long, default_value_t = 5.0, global = true, allow_negative_numbers = true)]
    pub rmax: f64,
    /// Quadrature tolerance.
    #[arg(long, default_value_t = 1e-8, global = true, allow_negative_numbers = true)]
    pub tol: f64,
    #[arg(long, default_value_t = 0, global = true)]
    pub seed: u64,
    /// Report path; standard output when absent.
    #[arg(long, global = true)]
    pub out: Option<String>,
    #[arg(long, value_enum, default_value_t = Format::Json, global = true)]
    pub format: Format,
    /// Symbol as JSON `{"n":..,"terms":[{"nu":[..],"re":..,"im":..}]}`, or `@path`.
    #[arg(long, global = true)]
    pub symbol: Option<String>,
}

/// Every flag after validation; embedded verbatim in reports.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub command: String,
    pub ell: f64,
    pub n: usize,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub rho: f64,
    pub eta: f64,
    pub p: Exponent,
    pub theta: Option<f64>,
    pub trunc: u32,
    pub grid: usize,
    pub rmin: f64,
    pub rmax: f64,
    pub tol: f64,
    pub seed: u64,
    pub format: Format,
    pub symbol: Option<Value>,
    /// Command-specific inputs (points, orders).
    pub extra: Value,
}

fn param(field: &str, reason: impl Into<String>) -> Error {
    Error::Param { field: field.into(), reason: reason.into() }
}

impl RunConfig {
    pub fn resolve(command: &str, f: &Flags, extra: Value) -> Result<Self> {
        let p: Exponent = f.p.parse()?;
        if f.grid == 0 {
            return Err(param("grid", "must be >= 1"));
        }
        if !(f.tol > 0.0 && f.tol < 1.0) {
            return Err(param("tol", format!("must lie in (0,1), got {}", f.tol)));
        }
        if !(f.rmin >= 0.0 && f.rmax >= f.rmin && f.rmax.is_finite()) {
            return Err(param("rmax", format!("need 0 <= rmin <= rmax, got [{}, {}]", f.rmin, f.rmax)));
        }
        if f.trunc > 400 {
            return Err(param("trunc", "must be <= 400"));
        }
        let symbol = f.symbol.as_deref().map(read_symbol).transpose()?;
        let cfg = RunConfig {
            command: command.into(),
            ell: f.ell,
            n: f.n,
            alpha: f.alpha,
            beta: f.beta,
            gamma: f.gamma,
            rho: f.rho,
            eta: f.eta,
            p,
            theta: f.theta,
            trunc: f.trunc,
            grid: f.grid,
            rmin: f.rmin,
            rmax: f.rmax,
            tol: f.tol,
            seed: f.seed,
            format: f.format,
            symbol,
            extra,
        };
        // Surface range errors before any work starts.
        cfg.space()?;
        if !(cfg.gamma > 0.0 && cfg.gamma.is_finite()) {
            return Err(param("gamma", format!("must be positive, got {}", cfg.gamma)));
        }
        if !(cfg.beta > 0.0 && cfg.beta.is_finite()) {
            return Err(param("beta", format!("must be positive, got {}", cfg.beta)));
        }
        if let Some(t) = cfg.theta {
            if !(t > 0.0 && t < 1.0) {
                return Err(param("theta", format!("must lie in (0,1), got {t}")));
            }
        }
        if let Some(b) = cfg.symbol_poly()? {
            if b.n != cfg.n {
                return Err(param("symbol", format!("symbol has n = {}, flags say n = {}", b.n, cfg.n)));
            }
        }
        Ok(cfg)
    }

    pub fn space(&self) -> Result<SpaceParams> {
        if !(self.alpha > 0.0) {
            return Err(param("alpha", format!("must be positive, got {}", self.alpha)));
        }
        SpaceParams::new(self.n, self.ell, self.alpha, self.rho, self.p)
    }

    pub fn decomp(&self) -> Result<DecompParams> {
        DecompParams::new(self.ell, self.n, self.gamma, self.alpha, self.beta, self.theta)
    }

    pub fn quad(&self) -> QuadConfig {
        QuadConfig::with_tol(self.tol)
    }

    /// `grid` radii evenly spaced on `[rmin, rmax]`.
    pub fn radii(&self) -> Vec<f64> {
        if self.grid == 1 {
            return vec![self.rmax];
        }
        (0..self.grid).map(|i| self.rmin + (self.rmax - self.rmin) * i as f64 / (self.grid - 1) as f64).collect()
    }

    pub fn symbol_poly(&self) -> Result<Option<MultiIndexPoly>> {
        self.symbol.as_ref().map(MultiIndexPoly::from_json).transpose()
    }
}

fn read_symbol(text: &str) -> Result<Value> {
    let body = match text.strip_prefix('@') {
        Some(path) => std::fs::read_to_string(path).map_err(|e| param("symbol", format!("cannot read `{path}`: {e}")))?,
        None => text.to_string(),
    };
    let v: Value = serde_json::from_str(&body).map_err(|e| param("symbol", format!("malformed JSON: {e}")))?;
    MultiIndexPoly::from_json(&v)?;
    Ok(v)
}

/// `re,im` or `re` for a single complex number.
pub fn parse_complex(field: &str, s: &str) -> Result<Complex64> {
    let parts: Vec<&str> = s.split(',').map(str::trim).collect();
    let num = |t: &str| t.parse::<f64>().ok().filter(|x| x.is_finite()).ok_or_else(|| param(field, format!("cannot parse `{s}` as re,im")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(param(field, format!("cannot parse `{s}` as re,im"))),
    }
}

/// Semicolon-separated complex coordinates, `re,im;re,im`.
pub fn parse_point(field: &str, s: &str, n: usize) -> Result<Vec<Complex64>> {
    let v = s.split(';').map(|t| parse_complex(field, t)).collect::<Result<Vec<_>>>()?;
    if v.len() != n {
        return Err(param(field, format!("expected {n} coordinates, got {}", v.len())));
    }
    Ok(v)
}

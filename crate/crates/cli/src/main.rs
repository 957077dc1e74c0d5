// `!(x > 0.0)` also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
mod config;

use clap::{Parser, Subcommand};
use commands::Outcome;
use config::{parse_complex, parse_point, Flags, Format, RunConfig};
use fockhankel::mittag_leffler::MLParams;
use fockhankel::{Error, Result, VERSION};
use serde_json::{json, Value};
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "fockhankel", version, about = "Numerics for weighted Fock spaces and small Hankel operators")]
struct Cli {
    #[command(subcommand)]
    command: Group,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Group {
    /// Mittag-Leffler functions.
    Ml {
        #[command(subcommand)]
        action: MlAction,
    },
    /// Bergman kernel values and norms.
    Kernel {
        #[command(subcommand)]
        action: KernelAction,
    },
    /// Weak decomposition of the kernel.
    Decomp {
        #[command(subcommand)]
        action: DecompAction,
    },
    /// Norms of the sector-supported exponential weight.
    Phi {
        #[command(subcommand)]
        action: PhiAction,
    },
    /// Littlewood-Paley equivalence.
    Lp {
        #[command(subcommand)]
        action: LpAction,
    },
    /// Small Hankel operators.
    Hankel {
        #[command(subcommand)]
        action: HankelAction,
    },
    /// Every invariant at once.
    Suite {
        #[command(subcommand)]
        action: SuiteAction,
    },
}

#[derive(Subcommand)]
enum MlAction {
    /// m-th derivative of E_{a,b} at one point.
    Eval {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0)]
        m: u32,
        /// `re,im`.
        #[arg(long, allow_hyphen_values = true)]
        lambda: String,
    },
    /// Series against asymptotics on the crossover annulus.
    Check {
        #[arg(long)]
        a: f64,
        #[arg(long)]
        b: f64,
        #[arg(long, default_value_t = 0)]
        m: u32,
        #[arg(long, default_value_t = 16)]
        rays: usize,
    },
}

#[derive(Subcommand)]
enum KernelAction {
    /// K(z,w) for points given as `re,im;re,im`.
    Eval {
        #[arg(long, allow_hyphen_values = true)]
        z: String,
        #[arg(long, allow_hyphen_values = true)]
        w: String,
    },
    /// Symmetries on seeded pairs and the norm envelope on the radius grid.
    Check,
}

#[derive(Subcommand)]
enum DecompAction {
    /// Identity residual on seeded pairs.
    Verify {
        #[arg(long, default_value_t = 15.0)]
        max_dot: f64,
    },
    /// Factor norms against their envelopes.
    Norms,
}

#[derive(Subcommand)]
enum PhiAction {
    /// Norms against the envelope; c defaults to α/3, α/2, α.
    Norms {
        #[arg(long)]
        c: Option<f64>,
    },
}

#[derive(Subcommand)]
enum LpAction {
    /// Gradient-norm bands and exact reconstruction over the test family.
    Check,
}

#[derive(Subcommand)]
enum HankelAction {
    /// Schatten norm of the operator against the symbol norm.
    Schatten,
    /// Rank-one operator from a kernel symbol at `w0`.
    Rank1 {
        #[arg(long, allow_hyphen_values = true)]
        w0: String,
    },
    /// Operator values from the decomposition.
    Represent,
}

#[derive(Subcommand)]
enum SuiteAction {
    /// Closed forms at ℓ = 1, generic invariants otherwise.
    All,
}

fn ml_params(a: f64, b: f64, m: u32) -> Result<MLParams> {
    MLParams::new(a, b, m)
}

fn run(cli: &Cli) -> Result<(RunConfig, Outcome)> {
    let f = &cli.flags;
    let resolve = |name: &str, extra: Value| RunConfig::resolve(name, f, extra);
    match &cli.command {
        Group::Ml { action } => match action {
            MlAction::Eval { a, b, m, lambda } => {
                let cfg = resolve("ml eval", json!({"a": a, "b": b, "m": m, "lambda": lambda}))?;
                let p = ml_params(*a, *b, *m)?;
                let l = parse_complex("lambda", lambda)?;
                Ok((cfg, commands::ml_eval(&p, l)?))
            }
            MlAction::Check { a, b, m, rays } => {
                let cfg = resolve("ml check", json!({"a": a, "b": b, "m": m, "rays": rays}))?;
                if *rays == 0 {
                    return Err(Error::Param { field: "rays".into(), reason: "must be >= 1".into() });
                }
                let p = ml_params(*a, *b, *m)?;
                let out = commands::ml_check(&cfg, &p, *rays)?;
                Ok((cfg, out))
            }
        },
        Group::Kernel { action } => match action {
            KernelAction::Eval { z, w } => {
                let cfg = resolve("kernel eval", json!({"z": z, "w": w}))?;
                let zp = parse_point("z", z, cfg.n)?;
                let wp = parse_point("w", w, cfg.n)?;
                let out = commands::kernel_eval(&cfg, &zp, &wp)?;
                Ok((cfg, out))
            }
            KernelAction::Check => {
                let cfg = resolve("kernel check", Value::Null)?;
                let out = commands::kernel_check(&cfg)?;
                Ok((cfg, out))
            }
        },
        Group::Decomp { action } => match action {
            DecompAction::Verify { max_dot } => {
                let cfg = resolve("decomp verify", json!({"max_dot": max_dot}))?;
                if !(*max_dot >= 0.0 && max_dot.is_finite()) {
                    return Err(Error::Param { field: "max-dot".into(), reason: format!("must be finite and >= 0, got {max_dot}") });
                }
                let out = commands::decomp_verify(&cfg, *max_dot)?;
                Ok((cfg, out))
            }
            DecompAction::Norms => {
                let cfg = resolve("decomp norms", Value::Null)?;
                let out = commands::decomp_norms(&cfg)?;
                Ok((cfg, out))
            }
        },
        Group::Phi { action: PhiAction::Norms { c } } => {
            let cfg = resolve("phi norms", json!({"c": c}))?;
            let out = commands::phi_norms(&cfg, *c)?;
            Ok((cfg, out))
        }
        Group::Lp { action: LpAction::Check } => {
            let cfg = resolve("lp check", Value::Null)?;
            let out = commands::lp_check(&cfg)?;
            Ok((cfg, out))
        }
        Group::Hankel { action } => match action {
            HankelAction::Schatten => {
                let cfg = resolve("hankel schatten", Value::Null)?;
                let out = commands::hankel_schatten(&cfg)?;
                Ok((cfg, out))
            }
            HankelAction::Rank1 { w0 } => {
                let cfg = resolve("hankel rank1", json!({"w0": w0}))?;
                let p = parse_point("w0", w0, cfg.n)?;
                let out = commands::hankel_rank1(&cfg, &p)?;
                Ok((cfg, out))
            }
            HankelAction::Represent => {
                let cfg = resolve("hankel represent", Value::Null)?;
                let out = commands::hankel_represent(&cfg)?;
                Ok((cfg, out))
            }
        },
        Group::Suite { action: SuiteAction::All } => {
            let cfg = resolve("suite all", Value::Null)?;
            let out = commands::suite_all(&cfg)?;
            Ok((cfg, out))
        }
    }
}

fn render_json(cfg: &RunConfig, out: &Outcome) -> String {
    let reports: Vec<Value> = out.reports.iter().map(|(name, r)| json!({"name": name, "report": r})).collect();
    let doc = json!({
        "version": VERSION,
        "command": cfg.command,
        "config": cfg,
        "result": out.result,
        "reports": reports,
        "checks": out.checks,
        "passed": out.passed(),
    });
    let mut s = serde_json::to_string_pretty(&doc).expect("report serializes");
    s.push('\n');
    s
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn flatten(prefix: &str, v: &Value, rows: &mut Vec<(String, String)>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                flatten(&key, x, rows);
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}.{i}"), x, rows);
            }
        }
        Value::String(s) => rows.push((prefix.into(), s.clone())),
        other => rows.push((prefix.into(), other.to_string())),
    }
}

/// Ratio tables first, then checks, then the flattened result.
fn render_csv(cfg: &RunConfig, out: &Outcome) -> String {
    let mut s = format!("# fockhankel {VERSION} {}\n", cfg.command);
    let mut cfg_rows = Vec::new();
    flatten("", &serde_json::to_value(cfg).expect("config serializes"), &mut cfg_rows);
    for (k, v) in &cfg_rows {
        s += &format!("# {k}={v}\n");
    }
    if !out.reports.is_empty() {
        s += "report,";
        let mut header_done = false;
        for (name, r) in &out.reports {
            let table = r.to_csv();
            let mut lines = table.lines();
            let header = lines.next().unwrap_or_default();
            if !header_done {
                s += header;
                s.push('\n');
                header_done = true;
            }
            for line in lines {
                s += &format!("{},{line}\n", csv_field(name));
            }
        }
    } else if !out.checks.is_empty() {
        s += "check,value,limit,passed\n";
        for c in &out.checks {
            s += &format!("{},{:e},{:e},{}\n", csv_field(&c.name), c.value, c.limit, c.passed);
        }
    } else {
        let mut rows = Vec::new();
        flatten("", &out.result, &mut rows);
        s += "key,value\n";
        for (k, v) in rows {
            s += &format!("{},{}\n", csv_field(&k), csv_field(&v));
        }
    }
    s
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Param { .. } | Error::Dimension(..) | Error::Index(_) => 2,
        Error::NonConvergence { .. } | Error::Decomposition(_) => 3,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (cfg, out) = match run(&cli) {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    let text = match cfg.format {
        Format::Json => render_json(&cfg, &out),
        Format::Csv => render_csv(&cfg, &out),
    };
    match &cli.flags.out {
        Some(path) => {
            if let Err(e) = std::fs::write(path, &text) {
                eprintln!("error: cannot write `{path}`: {e}");
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    for c in out.checks.iter().filter(|c| !c.passed) {
        eprintln!("failed: {} = {:e} > {:e}", c.name, c.value, c.limit);
    }
    if out.passed() {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

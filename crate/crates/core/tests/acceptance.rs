//! Acceptance suite: one pass/fail line per criterion, at the stated
//! tolerances and time budgets. Runs without the test harness so the lines
//! are always printed and criteria run one at a time with honest timings.
//! Arguments that do not start with `-` select criteria by name substring.

use fockhankel::bergman::{dot, hermitian_residual, kernel_eval, kernel_norm_report, kernel_poly, reproducing_residual, Kernel};
use fockhankel::decomposition::{factor_norm_report, identity_residual, remainder_deriv, remainder_eval, sample_pairs, DecompParams};
use fockhankel::fock::{dilation_pairing_check, monomial_norm_sq, pairing_poly, Exponent, MultiIndex, MultiIndexPoly, SpaceParams};
use fockhankel::hankel::{hankel_matrix, rank_one_check, representation_residual, schatten_norm, schatten_vs_symbol};
use fockhankel::lp_calculus::{lp_bands, reconstruct_terms, Terms};
use fockhankel::mittag_leffler::{overlap_report, MLParams, DEFAULT_TOL};
use fockhankel::quadrature::{integrate_over_ball, phi_norm_report, QuadConfig};
use fockhankel::report::RatioReport;
use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use rand::rngs::StdRng;
use rand::{RngExt, SeedableRng};
use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ln_factorial(k: u32) -> f64 {
    (1..=k).map(|i| (i as f64).ln()).sum()
}

/// Runs one criterion and prints its line; a panic counts as a miss.
fn criterion(id: u32, title: &str, budget_s: f64, body: impl FnOnce(&mut Vec<String>)) -> bool {
    let t = Instant::now();
    let mut misses = Vec::new();
    if let Err(e) = catch_unwind(AssertUnwindSafe(|| body(&mut misses))) {
        let msg = e.downcast_ref::<String>().cloned().or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()));
        misses.push(format!("panicked: {}", msg.unwrap_or_default()));
    }
    let secs = t.elapsed().as_secs_f64();
    if secs > budget_s {
        misses.push(format!("took {secs:.1}s, budget {budget_s}s"));
    }
    let status = if misses.is_empty() { "PASS" } else { "FAIL" };
    println!("criterion {id} [{status}] {title} ({secs:.1}s)");
    for m in &misses {
        println!("    {m}");
    }
    misses.is_empty()
}

fn check(misses: &mut Vec<String>, ok: bool, what: impl FnOnce() -> String) {
    if !ok {
        misses.push(what());
    }
}

fn random_point(rng: &mut StdRng, n: usize, radius: f64) -> Vec<Complex64> {
    (0..n).map(|_| c(rng.random_range(-radius..radius), rng.random_range(-radius..radius))).collect()
}

fn random_poly(rng: &mut StdRng, n: usize, degree: u32) -> MultiIndexPoly {
    let mut f = MultiIndexPoly::zero(n);
    for nu in MultiIndex::up_to(n, degree) {
        f.insert(nu, c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
    }
    f
}

fn criterion_1_linear_closed_forms() -> bool {
    criterion(1, "l = 1 closed forms", 30.0, |m| {
        let mut rng = StdRng::seed_from_u64(1);
        let mut worst = 0f64;
        for n in 1..=3 {
            for gamma in [0.5, 1.0, 2.0] {
                for _ in 0..20 {
                    let z = random_point(&mut rng, n, 1.5);
                    let w = random_point(&mut rng, n, 1.5);
                    let got = kernel_eval(gamma, n, 1.0, &z, &w).unwrap().to_complex();
                    let want = (dot(&z, &w) * gamma).exp() * (gamma.powi(n as i32) / ln_factorial(n as u32).exp());
                    worst = worst.max((got - want).norm() / want.norm());
                }
            }
        }
        check(m, worst <= 1e-12, || format!("kernel closed form off by {worst:.2e}"));

        let mut worst = 0f64;
        for n in 1..=3 {
            for alpha in [0.5, 1.0, 3.0] {
                for nu in MultiIndex::up_to(n, 6) {
                    let got = monomial_norm_sq(n, 1.0, alpha, &nu).unwrap();
                    let ln_want = ln_factorial(n as u32) + nu.0.iter().map(|&k| ln_factorial(k)).sum::<f64>()
                        - (nu.order() + n as u32) as f64 * alpha.ln();
                    worst = worst.max((got / ln_want.exp() - 1.0).abs());
                }
            }
        }
        check(m, worst <= 1e-12, || format!("monomial norms off by {worst:.2e}"));

        let mut worst = 0f64;
        for theta in [0.25, 0.5, 0.8] {
            for k in 0..8 {
                let lambda = Complex64::from_polar(0.7 * k as f64, 0.9 * k as f64);
                let scale = lambda.norm().exp();
                worst = worst.max(remainder_eval(1.0, theta, lambda).unwrap().abs() / scale);
                for order in 1..=3 {
                    worst = worst.max(remainder_deriv(1.0, theta, order, lambda).unwrap().abs() / scale);
                }
            }
        }
        check(m, worst <= 1e-12, || format!("remainder not zero: {worst:.2e}"));

        let mut worst = 0f64;
        for n in 1..=2 {
            for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0)] {
                let params = DecompParams::new(1.0, n, 1.0, a, b, None).unwrap();
                for (z, w) in sample_pairs(n, 15.0, 50, 11) {
                    worst = worst.max(identity_residual(&params, &z, &w).unwrap());
                }
            }
        }
        check(m, worst <= 1e-12, || format!("decomposition residual {worst:.2e}"));

        let cfg = QuadConfig::default();
        for w0 in [0.0, 0.5, 1.0, 1.5] {
            let r = rank_one_check(&[c(w0, 0.0)], 1.0, 0.0, 40, &cfg).unwrap();
            let want = 0.5 * (w0 * w0 / 4.0).exp();
            let err = (r.s1 - want).abs() / want;
            check(m, err <= 1e-4, || format!("rank-one s1 at |w0| = {w0}: {} vs {want} ({err:.2e})", r.s1));
            check(m, r.numerical_rank == 1, || format!("rank at |w0| = {w0} is {}", r.numerical_rank));
        }
    })
}

fn criterion_2_mittag_leffler_overlap() -> bool {
    criterion(2, "Mittag-Leffler series/asymptotic overlap", 60.0, |m| {
        for (a, b) in [(1.0, 1.0), (0.5, 0.5), (0.5, 0.75), (1.0 / 3.0, 1.0 / 3.0)] {
            for order in 0..3 {
                let p = MLParams::new(a, b, order).unwrap();
                let r = overlap_report(&p, 20.0, 30.0, 11, 16, 0.75 * PI * a, DEFAULT_TOL).unwrap();
                check(m, r.max_rel <= 1e-6, || format!("a={a} b={b} m={order}: {:.2e} at {:?}", r.max_rel, r.worst));
            }
        }
    })
}

fn criterion_3_decomposition_identity() -> bool {
    criterion(3, "decomposition identity", 120.0, |m| {
        for (ell, n) in [(2.0, 1), (2.0, 2), (3.0, 1), (1.5, 1)] {
            for (a, b) in [(1.0, 1.0), (1.0, 2.0), (3.0, 1.0)] {
                let params = DecompParams::new(ell, n, 1.0, a, b, None).unwrap();
                let worst = sample_pairs(n, 15.0, 200, 3)
                    .iter()
                    .map(|(z, w)| identity_residual(&params, z, w).unwrap())
                    .fold(0.0, f64::max);
                check(m, worst <= 1e-6, || format!("l={ell} n={n} a={a} b={b}: {worst:.2e}"));
            }
        }
    })
}

fn flat(m: &mut Vec<String>, name: &str, r: &RatioReport) {
    let s = r.log_ratio.slope_r2l;
    check(m, s.abs() <= 1e-3, || format!("{name}: slope {s:.2e}"));
    check(m, r.band() <= 100.0, || format!("{name}: band {:.2}", r.band()));
}

/// One-sided: the remainder is only bounded above, and its true order sits
/// below the bound.
fn bounded(m: &mut Vec<String>, name: &str, r: &RatioReport) {
    let s = r.log_ratio.slope_r2l;
    check(m, s <= 1e-3, || format!("{name}: slope {s:.2e}"));
    check(m, r.band() <= 100.0, || format!("{name}: band {:.2}", r.band()));
}

fn criterion_4_norm_envelopes() -> bool {
    criterion(4, "norm-envelope flatness", 300.0, |m| {
        let cfg = QuadConfig::with_tol(1e-8);
        let radii: Vec<f64> = (0..17).map(|i| 1.0 + 0.25 * i as f64).collect();
        let f = Exponent::Finite;
        for (n, rho, p) in [(1, 0.0, f(2.0)), (1, 1.0, f(2.0)), (1, -1.0, f(2.0)), (1, 0.0, f(1.0)), (2, 0.0, f(1.0))] {
            let params = SpaceParams::new(n, 2.0, 1.0, rho, p).unwrap();
            let r = kernel_norm_report(1.0, &params, &radii, &cfg).unwrap();
            flat(m, &format!("kernel n={n} rho={rho} p={p}"), &r);
        }
        for (n, alpha) in [(1, 1.0), (1, 2.0), (2, 4.0)] {
            let params = SpaceParams::new(n, 2.0, alpha, 0.0, f(4.0)).unwrap();
            for cc in [alpha / 3.0, alpha / 2.0, alpha] {
                let r = phi_norm_report(cc, &params, &radii, &cfg).unwrap();
                flat(m, &format!("phi n={n} alpha={alpha} c={cc:.3}"), &r);
            }
        }
        for (n, a, b) in [(1, 1.0, 1.0), (2, 1.0, 2.0), (1, 3.0, 1.0)] {
            let params = DecompParams::new(2.0, n, 1.0, a, b, None).unwrap();
            for (name, r) in factor_norm_report(&params, f(2.0), 0.0, 0.0, &radii, &cfg).unwrap() {
                let label = format!("factor {name} n={n} a={a} b={b}");
                if name == "R" {
                    bounded(m, &label, &r);
                } else {
                    flat(m, &label, &r);
                }
            }
        }
    })
}

type Exact = Complex<Ratio<i64>>;

fn criterion_5_littlewood_paley() -> bool {
    criterion(5, "Littlewood-Paley band and reconstruction", 120.0, |m| {
        let cfg = QuadConfig::with_tol(1e-6);
        for (ell, n) in [(1.0, 1), (2.0, 1), (2.0, 2)] {
            for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Infinity] {
                let params = SpaceParams::new(n, ell, 1.0, 0.0, p).unwrap();
                for band in lp_bands(&params, &[1, 2], &cfg).unwrap() {
                    check(m, band.band <= 50.0, || format!("l={ell} n={n} p={p} k={}: band {:.2}", band.k, band.band));
                }
            }
        }
        let mut rng = StdRng::seed_from_u64(5);
        for n in 1..=3 {
            for _ in 0..10 {
                let mut terms = Terms::<Exact>::new();
                for nu in MultiIndex::up_to(n, 8) {
                    let re = Ratio::new(rng.random_range(-50..50), rng.random_range(1..9));
                    let im = Ratio::new(rng.random_range(-50..50), rng.random_range(1..9));
                    if re != Ratio::from_integer(0) || im != Ratio::from_integer(0) {
                        terms.insert(nu, Complex::new(re, im));
                    }
                }
                check(m, reconstruct_terms(&terms, n) == terms, || format!("reconstruction not exact for n={n}"));
            }
        }
    })
}

fn criterion_6_schatten_band() -> bool {
    criterion(6, "Schatten characterization", 180.0, |m| {
        let cfg = QuadConfig::default();
        for ell in [1.0, 2.0] {
            let mut family: Vec<MultiIndexPoly> = (0..=10).map(|j| MultiIndexPoly::monomial(MultiIndex(vec![j]), c(1.0, 0.0))).collect();
            for i in 0..=6 {
                family.push(kernel_poly(0.5, ell, &[c(0.25 * i as f64, 0.0)], 30).unwrap());
            }
            for p in [Exponent::Finite(1.0), Exponent::Finite(2.0), Exponent::Finite(4.0), Exponent::Infinity] {
                let mut lo = f64::INFINITY;
                let mut hi = 0f64;
                let mut rho_factor = 1f64;
                for b in &family {
                    let r0 = schatten_vs_symbol(b, ell, 1.0, 0.0, p, 40, &cfg).unwrap();
                    let r1 = schatten_vs_symbol(b, ell, 1.0, 1.0, p, 40, &cfg).unwrap();
                    for r in [&r0, &r1] {
                        lo = lo.min(r.ratio);
                        hi = hi.max(r.ratio);
                    }
                    rho_factor = rho_factor.max(r0.schatten / r1.schatten).max(r1.schatten / r0.schatten);
                }
                check(m, hi / lo <= 20.0, || format!("l={ell} p={p}: band {:.2}", hi / lo));
                check(m, rho_factor <= 10.0, || format!("l={ell} p={p}: rho factor {rho_factor:.2}"));
            }
        }
    })
}

fn criterion_7_representation() -> bool {
    criterion(7, "representation formula", 120.0, |m| {
        let mut rng = StdRng::seed_from_u64(7);
        for ell in [1.0, 2.0] {
            for n in 1..=2 {
                let params = DecompParams::new(ell, n, 1.0, 1.0, 1.0, None).unwrap();
                let b = random_poly(&mut rng, n, 4);
                for i in 0..10 {
                    let dir = random_point(&mut rng, n, 1.0);
                    let len = dir.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt();
                    let z: Vec<Complex64> = dir.iter().map(|v| v * (0.3 * (i + 1) as f64 / len)).collect();
                    let mut last = f64::INFINITY;
                    for trunc in [4, 8, 16, 24, 32, 40] {
                        let r = representation_residual(&b, &z, &params, trunc).unwrap();
                        check(m, r <= last, || format!("l={ell} n={n} point {i}: N={trunc} rose to {r:.2e} from {last:.2e}"));
                        last = r;
                    }
                    check(m, last <= 1e-6, || format!("l={ell} n={n} point {i}: residual {last:.2e} at N=40"));
                }
            }
        }
    })
}

fn criterion_8_structural_invariants() -> bool {
    criterion(8, "structural invariants", 60.0, |m| {
        let cfg = QuadConfig::default();
        for n in 1..=3 {
            let v = integrate_over_ball(n, &|_| 0.0, &cfg).unwrap();
            check(m, (v - 1.0).abs() <= 1e-8, || format!("ball volume n={n}: {v}"));
        }

        let mut rng = StdRng::seed_from_u64(8);
        let mut worst = 0f64;
        for ell in [1.0, 1.5, 2.0] {
            for n in 1..=2 {
                for delta in [0.5, 1.3, 2.0] {
                    let f = random_poly(&mut rng, n, 5);
                    let g = random_poly(&mut rng, n, 5);
                    let scale = pairing_poly(&f, &g, ell, 1.0).unwrap().norm().max(1.0);
                    worst = worst.max(dilation_pairing_check(&f, &g, ell, 1.0, delta).unwrap() / scale);
                }
            }
        }
        check(m, worst <= 1e-10, || format!("pairing dilation residual {worst:.2e}"));

        let mut worst = 0f64;
        for (ell, n) in [(1.0, 1), (2.0, 1), (2.0, 2), (1.5, 1), (3.0, 2)] {
            let k = Kernel::new(1.0, n, ell).unwrap();
            for (z, w) in sample_pairs(n, 30.0, 40, 8) {
                worst = worst.max(hermitian_residual(&k, &z, &w).unwrap());
            }
        }
        check(m, worst <= 1e-10, || format!("Hermitian residual {worst:.2e}"));

        let mut worst = 0f64;
        // One variable here; two variables run in the kernel tests, since the
        // torus quadrature alone would eat this budget.
        // Steep kernels at l = 3 need finer angular grids.
        let fine = QuadConfig { torus_max: 1024, ..cfg };
        for ell in [1.0, 1.5, 2.0, 3.0] {
            for degree in [0, 3, 8] {
                let f = random_poly(&mut rng, 1, degree);
                for r in [0.3, 0.9, 1.4] {
                    let z = [Complex64::from_polar(r, 0.7 + r)];
                    worst = worst.max(reproducing_residual(1.0, ell, &f, &z, &fine).unwrap());
                }
            }
        }
        check(m, worst <= 1e-6, || format!("reproducing residual {worst:.2e}"));

        let b = random_poly(&mut rng, 1, 6);
        let h = hankel_matrix(&b, 2.0, 1.0, 0.0, 20, &cfg).unwrap();
        let ps = [0.5, 1.0, 1.5, 2.0, 3.0, 4.0, 8.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| schatten_norm(&h.singular_values, p).unwrap()).collect();
        check(m, norms.windows(2).all(|w| w[1] <= w[0]), || format!("S_p not monotone: {norms:?}"));
        check(m, norms[norms.len() - 1] == h.singular_values[0], || "S_inf is not the top singular value".into());
    })
}

fn main() -> ExitCode {
    let filters: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let all: [(&str, fn() -> bool); 8] = [
        ("criterion_1_linear_closed_forms", criterion_1_linear_closed_forms),
        ("criterion_2_mittag_leffler_overlap", criterion_2_mittag_leffler_overlap),
        ("criterion_3_decomposition_identity", criterion_3_decomposition_identity),
        ("criterion_4_norm_envelopes", criterion_4_norm_envelopes),
        ("criterion_5_littlewood_paley", criterion_5_littlewood_paley),
        ("criterion_6_schatten_band", criterion_6_schatten_band),
        ("criterion_7_representation", criterion_7_representation),
        ("criterion_8_structural_invariants", criterion_8_structural_invariants),
    ];
    let mut failed = 0;
    let mut ran = 0;
    for (name, run) in all {
        if !filters.is_empty() && !filters.iter().any(|f| name.contains(f.as_str())) {
            continue;
        }
        ran += 1;
        if !run() {
            failed += 1;
        }
    }
    println!("acceptance: {} of {ran} criteria passed", ran - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

//! Independent oracles and randomized invariants across the library.

// Reference digits are kept exactly as computed.
#![allow(clippy::excessive_precision)]

use fockhankel::bergman::{dilation_identity_residual, hermitian_residual, Kernel};
use fockhankel::decomposition::{identity_residual, DecompParams};
use fockhankel::fock::{pairing_poly, MultiIndex, MultiIndexPoly};
use fockhankel::hankel::{hankel_matrix, schatten_norm};
use fockhankel::lp_calculus::{partial_derivative_terms, reconstruct_terms, sj_apply_terms, Terms};
use fockhankel::mittag_leffler::{ml_deriv, ml_eval, MLParams, DEFAULT_TOL};
use fockhankel::quadrature::QuadConfig;
use num_complex::{Complex, Complex64};
use num_rational::Ratio;
use proptest::prelude::*;
use std::f64::consts::PI;

type Exact = Complex<Ratio<i64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ml(a: f64, b: f64, m: u32, lambda: Complex64) -> Complex64 {
    ml_deriv(&MLParams::new(a, b, m).unwrap(), lambda, DEFAULT_TOL).unwrap().to_complex()
}

/// `e^{x²} erfc(x)` for large x from its asymptotic series.
fn erfcx_large(x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..12 {
        term *= -((2 * k - 1) as f64) / (2.0 * x * x);
        sum += term;
    }
    sum / (x * PI.sqrt())
}

#[test]
fn half_order_matches_error_function() {
    // E_{1/2,1}(x) = e^{x²} erfc(-x); reference digits from 30-digit arithmetic.
    for (x, want) in [(0.3, 1.45374923284276555609), (1.0, 5.00898008076228346631), (2.2, 252.703110496551143692), (3.7, 1764092.75609089623847)] {
        let got = ml(0.5, 1.0, 0, c(x, 0.0));
        assert!((got.re / want - 1.0).abs() < 1e-14 && got.im.abs() < 1e-14 * want, "{x}: {got} vs {want}");
    }
    for x in [8.0f64, 30.0, 100.0] {
        let want = erfcx_large(x);
        let got = ml(0.5, 1.0, 0, c(-x, 0.0));
        assert!((got.re / want - 1.0).abs() < 1e-10, "-{x}: {got} vs {want}");
    }
}

#[test]
fn values_off_the_sector() {
    // Reference values from the Taylor series in 250-digit arithmetic.
    let cases = [
        (0.5, 0.5, c(-12.0, 0.0), c(0.001938931369031135513, 0.0)),
        (1.0 / 3.0, 1.0, c(-5.0, 0.0), c(0.13308375880743357531, 0.0)),
        (1.0 / 3.0, 1.0 / 3.0, c(-4.0, 0.0), c(0.011723937315592590415, 0.0)),
        (0.5, 0.75, c(-15.0, 0.0), c(0.019228622836330279298, 0.0)),
        (0.5, 0.75, c(3.0, 4.0), c(-0.033342322645367907575, 0.032877008115564647819)),
        (1.0 / 3.0, 1.0 / 3.0, c(-2.0, 2.5), c(0.0011289359807230294036, 0.01948519836164877735)),
        (0.5, 1.0, c(-20.0, 0.0), c(0.028174348741051319319, 0.0)),
        (0.5, 0.5, c(0.0, 9.0), c(-0.0035492269855682903942, 0.0)),
    ];
    for (a, b, lambda, want) in cases {
        let got = ml(a, b, 0, lambda);
        let err = (got - want).norm() / want.norm();
        assert!(err < 1e-10, "a={a} b={b} λ={lambda}: {got} vs {want} ({err:.1e})");
    }
}

#[test]
fn algebraic_decay_off_the_sector() {
    // λ E_{a,b}(λ) + 1/Γ(b-a) + 1/(λ Γ(b-2a)) = O(λ^{-2}) along the negative axis.
    use statrs::function::gamma::gamma;
    let rg = |x: f64| if x <= 0.0 && x.fract() == 0.0 { 0.0 } else { 1.0 / gamma(x) };
    for (a, b) in [(0.5, 1.0), (0.5, 0.5), (1.0 / 3.0, 1.0), (0.5, 0.75)] {
        for x in [50.0, 200.0] {
            let lambda = c(-x, 0.0);
            let got = (ml(a, b, 0, lambda) * lambda).re + rg(b - a) + rg(b - 2.0 * a) / -x;
            assert!(got.abs() < 10.0 / (x * x), "a={a} b={b} x={x}: {got}");
        }
    }
}

#[test]
fn exponential_and_its_derivatives() {
    for x in [-3.0, 0.5, 4.0, 12.0, 40.0] {
        for m in 0..3 {
            let got = ml(1.0, 1.0, m, c(x, 0.0)).re;
            let want = f64::exp(x);
            assert!((got / want - 1.0).abs() < 1e-12, "x={x} m={m}");
        }
    }
    // E_{1,2}(λ) = (e^λ - 1)/λ
    let got = ml_eval(&MLParams::new(1.0, 2.0, 0).unwrap(), c(1e-3, 0.0), DEFAULT_TOL).unwrap().to_complex();
    assert!((got.re - f64::exp_m1(1e-3) / 1e-3).abs() < 1e-15);
}

#[test]
fn kernel_two_variables_reproduces() {
    use fockhankel::bergman::reproducing_residual;
    let mut f = MultiIndexPoly::zero(2);
    for (i, nu) in MultiIndex::up_to(2, 4).into_iter().enumerate() {
        f.insert(nu, c(0.3 + 0.1 * i as f64, -0.2));
    }
    let cfg = QuadConfig { torus_max: 256, ..QuadConfig::with_tol(1e-8) };
    let r = reproducing_residual(1.0, 2.0, &f, &[c(0.5, 0.2), c(-0.3, 0.4)], &cfg).unwrap();
    assert!(r < 1e-6, "{r}");
}

fn exact_terms(n: usize) -> impl Strategy<Value = Terms<Exact>> {
    let term = (prop::collection::vec(0u32..6, n), -40i64..40, 1i64..7, -40i64..40, 1i64..7);
    prop::collection::vec(term, 0..12).prop_map(|ts| {
        let mut out = Terms::new();
        for (nu, a, b, p, q) in ts {
            let v = Complex::new(Ratio::new(a, b), Ratio::new(p, q));
            if v != Complex::new(Ratio::from_integer(0), Ratio::from_integer(0)) {
                out.insert(MultiIndex(nu), v);
            }
        }
        out
    })
}

fn poly(n: usize, degree: u32) -> impl Strategy<Value = MultiIndexPoly> {
    let count = MultiIndex::up_to(n, degree).len();
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), count).prop_map(move |cs| {
        let mut f = MultiIndexPoly::zero(n);
        for (nu, (re, im)) in MultiIndex::up_to(n, degree).into_iter().zip(cs) {
            f.insert(nu, c(re, im));
        }
        f
    })
}

fn point(n: usize, radius: f64) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec((-radius..radius, -radius..radius), n).prop_map(|v| v.into_iter().map(|(a, b)| c(a, b)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn reconstruction_is_exact((n, terms) in (1usize..4).prop_flat_map(|n| (Just(n), exact_terms(n)))) {
        prop_assert_eq!(reconstruct_terms(&terms, n), terms);
    }

    #[test]
    fn mixed_partials_commute(terms in exact_terms(3), i in 0usize..3, j in 0usize..3) {
        let a = partial_derivative_terms(&partial_derivative_terms(&terms, i), j);
        let b = partial_derivative_terms(&partial_derivative_terms(&terms, j), i);
        prop_assert_eq!(a, b);
    }

    #[test]
    fn radial_integral_then_derivative_scales_by_degree(terms in exact_terms(2)) {
        // Σ_j ∂_j S_j multiplies the coefficient of ν by (|ν|+n)/(|ν|+1).
        let mut sum = Terms::<Exact>::new();
        for j in 0..2 {
            for (nu, v) in partial_derivative_terms(&sj_apply_terms(&terms, j), j) {
                let e = sum.entry(nu).or_insert_with(|| Complex::new(Ratio::from_integer(0), Ratio::from_integer(0)));
                *e += v;
            }
        }
        for (nu, v) in &terms {
            let d = nu.order() as i64;
            let want = *v * Ratio::new(d + 2, d + 1);
            prop_assert_eq!(sum.get(nu).copied(), Some(want));
        }
    }

    #[test]
    fn schatten_norms_decrease_in_p(mut s in prop::collection::vec(0.0f64..10.0, 1..20)) {
        s.sort_by(|a, b| b.total_cmp(a));
        let ps = [0.5, 1.0, 1.5, 2.0, 3.0, 6.0, 20.0, f64::INFINITY];
        let norms: Vec<f64> = ps.iter().map(|&p| schatten_norm(&s, p).unwrap()).collect();
        for w in norms.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12));
        }
        prop_assert_eq!(norms[norms.len() - 1], s[0]);
    }

    #[test]
    fn hankel_matrix_is_symmetric_without_weight(b in poly(1, 6), ell in prop::sample::select(vec![1.0, 1.5, 2.0])) {
        let h = hankel_matrix(&b, ell, 1.0, 0.0, 8, &QuadConfig::default()).unwrap();
        let diff = (&h.matrix - h.matrix.transpose()).norm();
        prop_assert!(diff <= 1e-12 * h.matrix.norm().max(1.0), "{}", diff);
    }

    #[test]
    fn pairing_is_conjugate_symmetric(f in poly(2, 4), g in poly(2, 4), ell in 1.0f64..3.0, alpha in 0.3f64..3.0) {
        let a = pairing_poly(&f, &g, ell, alpha).unwrap();
        let b = pairing_poly(&g, &f, ell, alpha).unwrap();
        prop_assert!((a - b.conj()).norm() <= 1e-12 * a.norm().max(1.0));
    }

    #[test]
    fn kernel_is_hermitian(z in point(2, 2.0), w in point(2, 2.0), ell in prop::sample::select(vec![1.0, 1.5, 2.0, 3.0])) {
        let k = Kernel::new(1.0, 2, ell).unwrap();
        prop_assert!(hermitian_residual(&k, &z, &w).unwrap() <= 1e-10);
    }

    #[test]
    fn kernel_dilation(z in point(1, 1.5), w in point(1, 1.5), delta in 0.5f64..1.5, ell in prop::sample::select(vec![1.0, 2.0])) {
        prop_assert!(dilation_identity_residual(1.0, delta, 1, ell, &z, &w).unwrap() <= 1e-9);
    }

    #[test]
    fn decomposition_identity_holds(z in point(1, 2.0), w in point(1, 2.0), theta in 0.2f64..0.8) {
        let params = DecompParams::new(2.0, 1, 1.0, 1.0, 1.0, Some(theta)).unwrap();
        prop_assert!(identity_residual(&params, &z, &w).unwrap() <= 1e-6);
    }

    #[test]
    fn derivative_matches_differences(a in prop::sample::select(vec![0.5, 1.0 / 3.0, 1.0]), b in 0.3f64..2.0, r in 0.1f64..3.0, t in -3.0f64..3.0) {
        let lambda = Complex64::from_polar(r, t);
        let h = 1e-5;
        let fd = (ml(a, b, 0, lambda + h) - ml(a, b, 0, lambda - h)) / (2.0 * h);
        let d = ml(a, b, 1, lambda);
        prop_assert!((fd - d).norm() <= 1e-6 * d.norm().max(1.0), "{} vs {}", fd, d);
    }

    #[test]
    fn positive_on_the_positive_axis(a in 0.2f64..1.0, b in 0.2f64..2.0, x in 0.0f64..20.0) {
        let v = ml(a, b, 0, c(x, 0.0));
        prop_assert!(v.re > 0.0);
    }
}

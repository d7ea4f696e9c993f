mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{rng, trapezoid, uniform};
use specbound::bounds::gamma_eta;
use specbound::density::LorentzianTerm;
use specbound::heom::{
    certify, delta_xi_truncation, gamma_analytic, gamma_numeric, min_n_for_error, GammaMethod, LorentzianBath,
    MeierTannorModel, TruncationTail, TABLE_POINTS,
};
use specbound::{Tolerance, VariationSpec};

/// Δξ_N(t) = −(π/β) Σᵢ pᵢ Σ_{N<k≤K} νₖ e^{−νₖt} / ((Ωᵢ²+Γᵢ²−νₖ²)² + 4Ωᵢ²νₖ²),
/// summed term by term in increasing k until e^{−νₖt} underflows below 1e-40.
fn brute_delta_xi(terms: &[LorentzianTerm], beta: f64, n: usize, k_max: usize, t: f64) -> f64 {
    let step = (-2.0 * PI * t / beta).exp();
    let mut e = (-2.0 * PI * (n + 1) as f64 * t / beta).exp();
    let mut s = 0.0;
    for k in n + 1..=k_max {
        if e < 1e-40 {
            break;
        }
        let nu = 2.0 * PI * k as f64 / beta;
        for p in terms {
            let r = p.omega * p.omega + p.gamma * p.gamma;
            let d = (r - nu * nu).powi(2) + 4.0 * p.omega * p.omega * nu * nu;
            s += p.p * nu * e / d;
        }
        e *= step;
    }
    -PI / beta * s
}

#[test]
fn numeric_gamma_matches_brute_force_for_single_lorentzian() {
    let term = MeierTannorModel::absorbed_terms()[0];
    let beta = 1.4;
    let bath = LorentzianBath::new(vec![term], beta).unwrap();
    for n in 0..=5 {
        let horizon = 40.0 * beta / (2.0 * PI * (n + 1) as f64);
        let oracle = trapezoid(|t| brute_delta_xi(&[term], beta, n, 10_000, t).abs(), 0.0, horizon, 20_000);
        let g = gamma_numeric(&bath, n, 1e-12).unwrap().gamma;
        assert!((g - oracle).abs() <= 1e-4 * oracle, "N={n}: {g} vs {oracle}");
    }
}

#[test]
fn truncation_tail_matches_brute_force_pointwise() {
    let terms = MeierTannorModel::absorbed_terms();
    let bath = MeierTannorModel::bath(1.4).unwrap();
    for n in [0, 3, 7] {
        for t in [0.0, 0.05, 0.3, 2.0] {
            let x = delta_xi_truncation(&bath, n, t).unwrap();
            assert_eq!(x.value.im, 0.0);
            let b = brute_delta_xi(&terms, 1.4, n, 200_000, t);
            assert!((x.value.re - b).abs() <= 1e-9 * b.abs() + x.error, "N={n} t={t}: {} vs {b}", x.value.re);
        }
    }
}

#[test]
fn bounds_module_and_certifier_agree_on_gamma() {
    let tol = Tolerance::new(1e-15, 1e-10);
    for &(beta, n) in TABLE_POINTS.iter() {
        let bath = MeierTannorModel::bath(beta).unwrap();
        let direct = gamma_numeric(&bath, n, 1e-12).unwrap().gamma;
        let v = VariationSpec::new(Arc::new(TruncationTail::new(bath, n).unwrap()), 1.0).unwrap().absorbed();
        let ge = gamma_eta(&v, tol, None).unwrap();
        assert!(ge.certified);
        assert_eq!(ge.eta, 0.0);
        assert!((ge.gamma - direct).abs() <= 1e-6 * direct, "β={beta}: {} vs {direct}", ge.gamma);
    }
}

#[test]
fn analytic_dominates_numeric_for_mixed_sign_baths() {
    let mut r = rng(41);
    for _ in 0..15 {
        let terms: Vec<LorentzianTerm> = (0..3)
            .map(|_| LorentzianTerm {
                p: uniform(&mut r, -2.0, 2.0),
                omega: uniform(&mut r, 0.3, 6.0),
                gamma: uniform(&mut r, 0.2, 4.0),
            })
            .collect();
        let beta = uniform(&mut r, 0.2, 8.0);
        let bath = LorentzianBath::new(terms, beta).unwrap();
        for n in [0, 1, 4, 12] {
            let a = gamma_analytic(&bath, n);
            let g = gamma_numeric(&bath, n, 1e-12).unwrap();
            assert!(g.gamma <= a * (1.0 + 1e-9) + g.error, "N={n}: numeric {} > analytic {a}", g.gamma);
        }
    }
}

#[test]
fn single_positive_lorentzian_numeric_equals_analytic() {
    let mut r = rng(42);
    for _ in 0..10 {
        let term = LorentzianTerm { p: uniform(&mut r, 0.1, 3.0), omega: uniform(&mut r, 0.3, 6.0), gamma: uniform(&mut r, 0.2, 4.0) };
        let bath = LorentzianBath::new(vec![term], uniform(&mut r, 0.2, 8.0)).unwrap();
        for n in [0, 2, 9] {
            let a = gamma_analytic(&bath, n);
            let g = gamma_numeric(&bath, n, 1e-12).unwrap().gamma;
            assert!((a - g).abs() <= 1e-6 * a, "{a} vs {g}");
        }
    }
}

#[test]
fn analytic_gamma_decreases_strictly_with_order() {
    let bath = MeierTannorModel::bath(1.4).unwrap();
    let g: Vec<f64> = (0..=100).map(|n| gamma_analytic(&bath, n)).collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]));
    assert!(g[100] < 1e-3 * g[0]);
}

#[test]
fn numeric_gamma_decreases_for_single_sign_terms() {
    let mut r = rng(43);
    let term = LorentzianTerm { p: 0.8, omega: uniform(&mut r, 0.5, 4.0), gamma: uniform(&mut r, 0.3, 2.0) };
    let bath = LorentzianBath::new(vec![term], 1.4).unwrap();
    let g: Vec<f64> = (0..=40).map(|n| gamma_numeric(&bath, n, 1e-12).unwrap().gamma).collect();
    assert!(g.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn numeric_gamma_can_grow_when_a_cancelling_term_is_dropped() {
    // At εβ = 1.4 the k = 3 Matsubara term of the mixed-sign fit has the
    // opposite sign to the rest of the tail, so removing it raises ∫|Δξ|.
    let bath = MeierTannorModel::bath(1.4).unwrap();
    let g2 = gamma_numeric(&bath, 2, 1e-12).unwrap().gamma;
    let g3 = gamma_numeric(&bath, 3, 1e-12).unwrap().gamma;
    let terms = MeierTannorModel::absorbed_terms();
    let o2 = trapezoid(|t| brute_delta_xi(&terms, 1.4, 2, 5_000, t).abs(), 0.0, 3.0, 30_000);
    let o3 = trapezoid(|t| brute_delta_xi(&terms, 1.4, 3, 5_000, t).abs(), 0.0, 3.0, 30_000);
    assert!((g2 - o2).abs() < 1e-5 * o2 && (g3 - o3).abs() < 1e-5 * o3);
    assert!(g3 > g2);
    assert!(gamma_analytic(&bath, 3) < gamma_analytic(&bath, 2));
}

#[test]
fn minimal_order_grows_with_inverse_temperature() {
    let mut last = 0;
    for beta in [0.4, 1.4, 4.0, 10.0] {
        let bath = MeierTannorModel::bath(beta).unwrap();
        let n = min_n_for_error(&bath, 30.0, 0.2, GammaMethod::Analytic, 1e-12).unwrap();
        assert!(n >= last, "β={beta}");
        last = n;
    }
}

#[test]
fn orders_above_the_minimum_meet_the_target() {
    let bath = MeierTannorModel::bath(1.4).unwrap();
    let n = min_n_for_error(&bath, 30.0, 0.2, GammaMethod::Numeric, 1e-12).unwrap();
    for extra in [0, 1, 5, 40] {
        let c = certify(&bath, n + extra, 30.0, 1e-12).unwrap();
        assert!(c.rel_bound_numeric <= 0.2);
    }
    let below = certify(&bath, n - 1, 30.0, 1e-12).unwrap();
    assert!(below.rel_bound_numeric > 0.2);
}

mod common;

use std::f64::consts::PI;
use std::sync::Arc;

use common::{rng, trapezoid, uniform};
use specbound::bounds::{
    bound_reports, check_integrability, gamma_eta, gamma_eta_truncated, general_bound, general_exponents,
    strong_bound, weak_bound, BoundKind, BoundRequest, KindSelection,
};
use specbound::correlation::xi_ohmic_closed;
use specbound::density::difference;
use specbound::heom::{gamma_analytic, LorentzianBath, MeierTannorModel, TruncationTail};
use specbound::{ConditionStatus, SpectralDensity, Tolerance, VariationSpec};

fn tol() -> Tolerance {
    Tolerance::new(1e-14, 1e-10)
}

#[test]
fn ohmic_gamma_eta_match_trapezoid_oracle() {
    let (a, cutoff, beta) = (1e-3, 1.0, 1.0);
    let v = VariationSpec::from_density(SpectralDensity::ohmic(a, cutoff), beta, 1.0, tol()).unwrap();
    let ge = gamma_eta_truncated(&v, tol(), Some(200.0)).unwrap();
    let xi = |t: f64| a * xi_ohmic_closed(cutoff, beta, t).unwrap();
    let g = trapezoid(|t| xi(t).re.abs(), 0.0, 200.0, 200_000);
    let e = trapezoid(|t| xi(t).im.abs(), 0.0, 200.0, 200_000);
    assert!((ge.gamma_head - g).abs() <= 1e-3 * g, "{} vs {g}", ge.gamma_head);
    assert!((ge.eta_head - e).abs() <= 1e-3 * e, "{} vs {e}", ge.eta_head);

    // The certified tail covers what lies beyond the horizon.
    let full = gamma_eta(&v, tol(), Some(200.0)).unwrap();
    assert!(full.certified);
    let g_far = trapezoid(|t| xi(t).re.abs(), 200.0, 20_000.0, 2_000_000);
    assert!(full.gamma_tail >= g_far);
    assert!(full.gamma >= ge.gamma_head + g_far);
}

fn random_variation(r: &mut rand::rngs::StdRng) -> SpectralDensity {
    let c = uniform(r, 0.5, 3.0);
    if uniform(r, 0.0, 1.0) < 0.5 {
        let j = SpectralDensity::ohmic(uniform(r, 0.01, 0.2), c);
        let j0 = SpectralDensity::ohmic(uniform(r, 0.01, 0.2), c * uniform(r, 0.7, 1.3));
        difference(&j, &j0)
    } else {
        let j = SpectralDensity::lorentzian(uniform(r, 0.05, 0.5), c, uniform(r, 0.3, 1.5));
        let j0 = SpectralDensity::ohmic(uniform(r, 0.01, 0.2), c);
        difference(&j, &j0)
    }
}

#[test]
fn bound_curves_are_ordered_zero_at_origin_and_monotone() {
    let mut r = rng(31);
    for _ in 0..4 {
        let dj = random_variation(&mut r);
        let beta = uniform(&mut r, 0.3, 5.0);
        let v = VariationSpec::from_density(dj, beta, uniform(&mut r, 0.1, 1.0), tol()).unwrap();
        let times: Vec<f64> = (0..40).map(|i| 0.25 * i as f64).collect();
        let req = BoundRequest { times: times.clone(), tol: tol(), horizon: None, sup_grid: 2000, kinds: KindSelection::All };
        let reports = bound_reports(&v, &req).unwrap();
        let curve = |k: fn(&BoundKind) -> bool| reports.iter().find(|b| k(&b.kind)).unwrap().curve.clone();
        let general = curve(|k| matches!(k, BoundKind::General));
        let weak = curve(|k| matches!(k, BoundKind::Weak { .. }));
        let strong = curve(|k| matches!(k, BoundKind::Strong { .. }));
        for c in [&general, &weak, &strong] {
            assert_eq!(c[0].1, 0.0);
            assert!(c.windows(2).all(|w| w[1].1 >= w[0].1));
        }
        for i in 0..times.len() {
            let g = general[i].1;
            assert!(g <= weak[i].1 * (1.0 + 1e-9) + 1e-15, "t={} {g} > weak {}", times[i], weak[i].1);
            assert!(g <= strong[i].1 * (1.0 + 1e-9) + 1e-15, "t={} {g} > strong {}", times[i], strong[i].1);
        }
    }
}

#[test]
fn gamma_eta_are_sign_symmetric() {
    let mut r = rng(32);
    let dj = random_variation(&mut r);
    let plus = VariationSpec::from_density(dj.clone(), 1.0, 1.0, tol()).unwrap();
    let minus = VariationSpec::from_density(dj.scaled(-1.0), 1.0, 1.0, tol()).unwrap();
    let a = gamma_eta(&plus, tol(), None).unwrap();
    let b = gamma_eta(&minus, tol(), None).unwrap();
    assert!((a.gamma - b.gamma).abs() <= 1e-12 * a.gamma);
    assert!((a.eta - b.eta).abs() <= 1e-12 * a.eta);
}

#[test]
fn zero_variation_gives_zero_everything() {
    let v = VariationSpec::from_density(SpectralDensity::zero(), 1.0, 1.0, tol()).unwrap();
    assert_eq!(check_integrability(&v, None, tol()), ConditionStatus::Satisfied { c: 0.0 });
    let ge = gamma_eta(&v, tol(), None).unwrap();
    assert_eq!((ge.gamma, ge.eta), (0.0, 0.0));
    assert_eq!(general_bound(&v, 5.0, tol()).unwrap(), 0.0);
    assert_eq!(weak_bound(&v, 0.0, 5.0), 0.0);
}

#[test]
fn delta_variation_admits_only_the_weak_bound() {
    let (kappa, w0, beta) = (0.3, 1.7, 2.0);
    let v = VariationSpec::from_density(SpectralDensity::DeltaMode { kappa, omega0: w0 }, beta, 1.0, tol()).unwrap();
    assert_eq!(check_integrability(&v, None, tol()), ConditionStatus::NotSatisfied);
    let req = BoundRequest { times: vec![0.0, 1.0, 2.0], tol: tol(), horizon: None, sup_grid: 4000, kinds: KindSelection::All };
    let reports = bound_reports(&v, &req).unwrap();
    assert!(reports.iter().all(|b| !matches!(b.kind, BoundKind::Strong { .. })));
    let weak = reports.iter().find_map(|b| match b.kind {
        BoundKind::Weak { c, c_certified } => Some((c, c_certified)),
        _ => None,
    });
    let (c, certified) = weak.unwrap();
    let expected = kappa / PI / (0.5 * beta * w0).tanh();
    assert!(certified);
    assert!((c - expected).abs() <= 1e-12 * expected);
}

#[test]
fn truncation_tail_general_below_strong_at_table_point() {
    let bath = MeierTannorModel::bath(0.4).unwrap();
    let v = VariationSpec::new(Arc::new(TruncationTail::new(bath, 2).unwrap()), 1.0).unwrap().absorbed();
    let ge = gamma_eta(&v, tol(), None).unwrap();
    assert_eq!(ge.eta, 0.0);
    let d = general_exponents(&v, &[0.0, 10.0, 30.0], tol()).unwrap();
    for (&t, &d) in [0.0, 10.0, 30.0].iter().zip(&d) {
        assert!(d.exp_m1() <= strong_bound(&v, ge.gamma, ge.eta, t) * (1.0 + 1e-9));
    }
}

#[test]
fn single_lorentzian_tail_is_integrable_with_analytic_constant() {
    let bath = LorentzianBath::new(vec![specbound::density::LorentzianTerm { p: 1.0, omega: 2.0, gamma: 0.7 }], 1.3).unwrap();
    let analytic = gamma_analytic(&bath, 2);
    let v = VariationSpec::new(Arc::new(TruncationTail::new(bath, 2).unwrap()), 1.0).unwrap();
    match check_integrability(&v, None, tol()) {
        ConditionStatus::Satisfied { c } => assert!((c - analytic).abs() <= 1e-6 * analytic, "{c} vs {analytic}"),
        other => panic!("expected integrable, got {other:?}"),
    }
}

use num_traits::{One, Zero};
use zbest_core::lightbulb::{enumerate_exact, lightbulb_moments, EnumerationOptions, StageLaw};
use zbest_core::{Error, Rational, Scalar};

fn q(n: i64, d: i64) -> Rational {
    Rational::from_ratio(n, d)
}

fn size_bias_holds(e: &zbest_core::lightbulb::Enumeration) -> bool {
    let mu = e.y_law.mean();
    let pmf = |law: &zbest_core::FiniteDistribution<Rational>, y: &Rational| law.cdf(y) - law.cdf_left(y);
    let support: Vec<Rational> = e.y_law.atoms().iter().chain(e.y_pp_law.atoms()).map(|(v, _)| v.clone()).collect();
    support.iter().all(|y| pmf(&e.y_pp_law, y) == y.clone() * pmf(&e.y_law, y) / mu.clone())
}

#[test]
fn n4_full_oracle() {
    let e = enumerate_exact(4, EnumerationOptions { keep_dagger_law: true, ..Default::default() }).unwrap();
    assert_eq!(e.configurations, 96);
    assert_eq!(e.y_law.mean(), q(2, 1));
    assert_eq!(e.y_law.variance(), q(1, 1));
    assert!(size_bias_holds(&e));
    assert_eq!(e.violations.total(), 0);
    assert!(e.dagger_law.as_ref().unwrap().is_uniform_on_target());
    assert_eq!(e.size_bias.verify_zbest_identity(5), Rational::zero());
    // Y'' - Y = 2·1{Y'' != Y}.
    let mu_s = e.y_law.moment(2) / e.y_law.mean();
    assert_eq!(e.p_y_pp_ne_y, (mu_s - e.y_law.mean()) / q(2, 1));
}

#[test]
fn n6_variance_and_size_bias() {
    let e = enumerate_exact(6, EnumerationOptions::default()).unwrap();
    assert_eq!(e.configurations, 162_000);
    let m = lightbulb_moments::<Rational>(6).unwrap();
    assert_eq!(e.y_law.variance(), m.sigma2);
    assert_eq!(m.sigma2, q(1012, 675));
    assert!(size_bias_holds(&e));
    assert!(e.eta_matches);
    assert_eq!(e.violations.total(), 0);
    assert_eq!(e.size_bias.expected_dg(), m.sigma2);
    assert!(e.mean_abs_gap <= q(3, 1) && e.max_abs_gap <= q(4, 1));
    assert_eq!(e.zero_bias.total_mass(), Rational::one());
}

#[test]
fn n6_full_stage_law_empty_mass() {
    let e = enumerate_exact(6, EnumerationOptions { stage_law: StageLaw::Full, ..Default::default() }).unwrap();
    assert_eq!(e.empty_mass, q(337, 8100));
    let interior = enumerate_exact(6, EnumerationOptions::default()).unwrap();
    assert_eq!(interior.empty_mass, Rational::zero());
}

#[test]
fn unsupported_sizes() {
    for n in [2, 5, 8] {
        assert!(matches!(enumerate_exact(n, EnumerationOptions::default()), Err(Error::UnsupportedN { .. })));
    }
}

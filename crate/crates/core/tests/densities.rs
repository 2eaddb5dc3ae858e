mod common;

use common::{density_cases, draw, ks_against_pdf, simpson};
use hybrid_reliability::distributions::{shifted_chi_pdf_with, ProbabilityDistribution, ShiftedChiForm};

#[test]
fn every_density_is_normalised() {
    for case in density_cases() {
        let total = simpson(&case.pdf, case.lower, case.upper, 1e-12);
        assert!((total - 1.0).abs() < 1e-8, "{}: integral {total}", case.label);
    }
    let normal = ProbabilityDistribution::normal(2.0, 0.5).unwrap();
    let total = simpson(&|x| normal.pdf(x), -8.0, 12.0, 1e-12);
    assert!((total - 1.0).abs() < 1e-8, "normal: {total}");
}

#[test]
fn densities_match_samplers_at_moderate_size() {
    for (i, case) in density_cases().iter().enumerate() {
        let ks = ks_against_pdf(&case.pdf, case.lower, draw(case, 100_000, 100 + i as u64));
        assert!(ks < 0.01, "{}: KS {ks}", case.label);
    }
}

#[test]
fn library_samplers_agree_with_their_densities() {
    let dists = [
        ProbabilityDistribution::chi_square(4).unwrap(),
        ProbabilityDistribution::shifted_chi(3, 1.5).unwrap(),
        ProbabilityDistribution::cosine_angle(7).unwrap(),
    ];
    for (i, d) in dists.iter().enumerate() {
        let mut r = common::rng(900 + i as u64);
        let samples: Vec<f64> = (0..100_000).map(|_| d.sample(&mut r)).collect();
        let ks = ks_against_pdf(&|x| d.pdf(x), d.support().0, samples);
        assert!(ks < 0.01, "{d:?}: KS {ks}");
    }
}

#[test]
fn cdf_agrees_with_integrated_pdf() {
    let dists = [
        ProbabilityDistribution::chi_square(3).unwrap(),
        ProbabilityDistribution::shifted_chi(5, 2.0).unwrap(),
        ProbabilityDistribution::cosine_angle(4).unwrap(),
    ];
    for d in dists {
        let lo = d.support().0;
        for p in [0.1, 0.5, 0.9] {
            let x = d.inverse_cdf(p).unwrap();
            let integral = simpson(&|t| d.pdf(t), lo, x, 1e-12);
            assert!((integral - p).abs() < 1e-8, "{d:?} at p={p}: {integral}");
            assert!((d.cdf(x) + d.sf(x) - 1.0).abs() < 1e-14);
        }
    }
}

#[test]
fn literal_shifted_chi_form_is_not_a_density() {
    // Without the Jacobian the mass differs from one whenever the shift is positive.
    let lit = |v: f64| shifted_chi_pdf_with(v, 4, 2.0, ShiftedChiForm::Literal).unwrap();
    let cov = |v: f64| shifted_chi_pdf_with(v, 4, 2.0, ShiftedChiForm::ChangeOfVariables).unwrap();
    let lo = 2f64.sqrt();
    assert!((simpson(&lit, lo, 40.0, 1e-12) - 1.0).abs() > 1e-2);
    assert!((simpson(&cov, lo, 40.0, 1e-12) - 1.0).abs() < 1e-8);
    let lit0 = |v: f64| shifted_chi_pdf_with(v, 4, 0.0, ShiftedChiForm::Literal).unwrap();
    assert!((simpson(&lit0, 0.0, 40.0, 1e-12) - 1.0).abs() < 1e-8);
}

//! Dimension-limit experiments: kernel certification at high dimension,
//! convergence of ball averages, and the shell/power-family growth runs.
//!
//! High-precision reference values were computed independently with
//! mpmath (50-60 digits): `n·B(n, 1/2) = Γ(n+1)Γ(1/2)/Γ(n+3/2)` for the
//! shell origin averages, and direct high-precision quadrature for the
//! off-center shell average at n = 2000.

// Frozen oracle constants are recorded at full printed precision on purpose.
#![allow(clippy::excessive_precision)]

use radmax_core::dimlimit::{
    approx_identity_certificate, default_schedule, kernel_decrease_defect,
    kernel_double_estimate_defect, limit_table, power_family_experiment, shell_counterexample,
    LimitExperiment,
};
use radmax_core::{BallSpec, RadialDensity};

#[test]
fn kernel_is_an_approximation_of_the_identity_at_high_dimension() {
    let spec = BallSpec::new(2000, 1.0, 1.0).unwrap();
    let cert = approx_identity_certificate(&spec, 0.14).unwrap();
    assert!(cert.min_kernel >= 0.0);
    assert!(cert.mass_error < 1e-8, "mass error {}", cert.mass_error);
    assert!(cert.tail() < 1e-6, "tail {}", cert.tail());
}

#[test]
fn tail_mass_shrinks_geometrically_in_the_dimension() {
    let mut previous = f64::INFINITY;
    for n in [10u32, 40, 160, 640] {
        let spec = BallSpec::new(n, 1.0, 1.0).unwrap();
        let eps = 0.1 * spec.tangent_radius();
        let tail = approx_identity_certificate(&spec, eps).unwrap().tail();
        assert!(
            tail < previous,
            "I_eps did not shrink: {tail} at n = {n} vs {previous}"
        );
        previous = tail;
    }
}

#[test]
fn kernel_is_monotone_beyond_the_peak_and_obeys_the_double_estimate() {
    for (n, s, r) in [(2u32, 1.0, 1.0), (50, 1.0, 1.0), (200, 2.0, 1.0)] {
        let spec = BallSpec::new(n, s, r).unwrap();
        let defect = kernel_decrease_defect(&spec, 1000);
        assert!(
            defect <= 1e-9,
            "kernel increased past T at (n, s, R) = ({n}, {s}, {r}): {defect}"
        );
        let (lower, upper) = kernel_double_estimate_defect(&spec, 1000).unwrap();
        assert!(
            lower <= 1e-8,
            "lower envelope violated at ({n}, {s}, {r}): {lower}"
        );
        assert!(
            upper <= 1e-8,
            "upper envelope violated at ({n}, {s}, {r}): {upper}"
        );
    }
}

#[test]
fn ball_averages_converge_for_all_continuous_profiles() {
    let densities = [
        RadialDensity::constant(2.0).unwrap(),
        RadialDensity::linear(),
        RadialDensity::quadratic(),
        RadialDensity::inverse_quadratic(),
        RadialDensity::exp_decay(),
    ];
    for density in densities {
        let name = density.name().to_owned();
        let exp = LimitExperiment::new(
            density,
            vec![(0.0, 1.0), (1.0, 1.0), (3.0, 1.0)],
            default_schedule(),
            vec![0.5, 0.2, 0.1, 0.05, 0.01],
        )
        .unwrap();
        let table = limit_table(&exp).unwrap();
        assert!(
            table.violations.is_empty(),
            "{name}: {:?}",
            table.violations
        );
    }
}

#[test]
fn shell_growth_matches_the_beta_function_oracle() {
    let schedule = [10u32, 50, 200, 800, 2000];
    let out = shell_counterexample(0.5, &schedule).unwrap();

    // n·B(n, 1/2), mpmath 50 digits.
    let oracle = [
        5.675463855030418,
        12.56451290185490,
        25.08195405347563,
        50.14039931746985,
        79.27150026601132,
    ];
    let origin = out.report.column("origin_average").unwrap();
    for (k, (&got, &want)) in origin.iter().zip(&oracle).enumerate() {
        assert!(
            ((got - want) / want).abs() < 1e-9,
            "n = {}: origin average {got} vs oracle {want}",
            schedule[k]
        );
    }

    // Off-center average at n = 2000, mpmath 60 digits (dense-split
    // quadrature of the exact cap-angle reduction); the limit value is
    // w0(sqrt(2)) = (sqrt(2)-1)^{-1/2}.
    let offset = out.report.column("offset_average").unwrap();
    let last = *offset.last().unwrap();
    assert!(((last - 1.55545837067003114271) / last).abs() < 1e-9);
    assert!((out.limit_target - 1.553773974030037307344).abs() < 1e-12);
    assert!(out.limit_gap < 0.02, "limit gap {}", out.limit_gap);

    assert!(out.origin_growth.reliable());
    assert!(
        out.origin_growth.exponent > 0.4 && out.origin_growth.exponent < 0.6,
        "origin growth exponent {}",
        out.origin_growth.exponent
    );
    assert!(
        out.lower_growth.exponent > 0.4 && out.lower_growth.exponent < 0.6,
        "lower-bound growth exponent {}",
        out.lower_growth.exponent
    );
}

#[test]
fn shell_growth_flattens_as_alpha_vanishes() {
    let out = shell_counterexample(0.01, &[10, 50, 200, 800]).unwrap();
    assert!(
        out.lower_growth.exponent < 0.05,
        "near-constant density should give a nearly flat curve, got {}",
        out.lower_growth.exponent
    );
}

#[test]
fn power_family_lower_bound_grows_exponentially() {
    let out = power_family_experiment(0.7, &[10, 25, 40, 60, 80, 100, 120]).unwrap();
    assert!(out.fit.reliable(), "R^2 = {}", out.fit.r_squared);
    assert!(
        out.fit.exponent > 0.0,
        "per-dimension log-slope {}",
        out.fit.exponent
    );
    assert!(out.fit.growth_base() > 1.0);
}

#[test]
fn power_family_growth_base_tends_to_one_with_alpha() {
    let out = power_family_experiment(0.01, &[10, 20, 40, 80]).unwrap();
    assert!(
        (out.fit.growth_base() - 1.0).abs() < 0.01,
        "fitted base {}",
        out.fit.growth_base()
    );
}

#[test]
fn experiment_reports_are_byte_identical_across_runs() {
    let a = shell_counterexample(0.5, &[10, 50, 200]).unwrap();
    let b = shell_counterexample(0.5, &[10, 50, 200]).unwrap();
    assert_eq!(a.report.to_csv(), b.report.to_csv());
    assert_eq!(a.report.to_json(), b.report.to_json());
}

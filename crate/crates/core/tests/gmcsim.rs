use gmc_core::gmcsim::*;
use gmc_core::moments::{KernelSpec, TestFunctionSpec};

#[test]
fn covariance_matches_rho_measure() {
    let n = 128;
    let eps = 4.0 / n as f64;
    for k in [KernelSpec::Interval, KernelSpec::Circle] {
        let mu = 0.6;
        let c = covariance_matrix(&k, mu, eps, n);
        let mut worst = 0.0f64;
        for d in 0..n {
            let z = d as f64 / n as f64;
            let want = mu * rho_intersection(&k, eps, z).unwrap();
            worst = worst.max((c[(0, d)] - want).abs());
        }
        assert!(worst < 1e-6, "{k:?}: {worst:e}");
    }
}

#[test]
fn second_moment_trend_in_epsilon() {
    // interval, phi = 1: E[M^2] = 2 / ((1 - mu)(2 - mu))
    let mu = 0.5;
    let target = 2.0 / ((1.0 - mu) * (2.0 - mu));
    let n = 512;
    let vals: Vec<f64> = [8.0, 4.0, 2.0]
        .iter()
        .map(|m| {
            let cg = build_covariance(&KernelSpec::Interval, mu, m / n as f64, n).unwrap();
            grid_second_moment(&cg, TestFunctionSpec::Constant)
        })
        .collect();
    let gaps: Vec<f64> = vals.iter().map(|v| (target - v).abs()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2], "{vals:?} vs {target}");

    let cg = build_covariance(&KernelSpec::Interval, mu, 4.0 / 256.0, 256).unwrap();
    let s = sample_total_mass(&cg, TestFunctionSpec::Constant, 50_000, 5).unwrap();
    let (m2, se) = s.moment(2);
    let exact = grid_second_moment(&cg, TestFunctionSpec::Constant);
    assert!((m2 - exact).abs() < 4.0 * se, "{m2} +- {se} vs {exact}");
}

#[test]
fn samples_are_reproducible() {
    let cg = build_covariance(&KernelSpec::Interval, 0.4, 4.0 / 64.0, 64).unwrap();
    let a = sample_total_mass(&cg, TestFunctionSpec::Constant, 700, 99).unwrap();
    let b = sample_total_mass(&cg, TestFunctionSpec::Constant, 700, 99).unwrap();
    assert_eq!(a, b);
    assert_eq!(a.n_samples(), 700);
    assert_ne!(a, sample_total_mass(&cg, TestFunctionSpec::Constant, 700, 100).unwrap());
}

#[test]
fn interval_positivity_report() {
    let rep = conical_intensity(&KernelSpec::Interval).positivity();
    assert_eq!(rep.points, POSITIVITY_GRID);
    assert_eq!(rep.min_value, 1.0);
}

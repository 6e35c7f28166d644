use gmc_core::expansion::{mellin_series, LogMomentSeries};
use gmc_core::mellin::{asymptotic_logm, log_morris_mellin, MellinParams};

fn remainder(q: f64, tau: f64, order: usize) -> f64 {
    let exact = log_morris_mellin(&MellinParams::new(q, tau, 0.0, 0.0)).unwrap().re;
    (exact - asymptotic_logm(q, tau, 0.0, 0.0, order).unwrap().value).abs()
}

#[test]
fn asymptotic_remainder_scaling() {
    for p in [2usize, 3] {
        let ratio = remainder(1.7, 40.0, p) / remainder(1.7, 20.0, p);
        assert!(ratio < 2f64.powf(-(p as f64 + 0.5)), "P={p}: ratio {ratio}");
    }
}

#[test]
fn intermittency_series_matches_transform() {
    let tau = 20.0;
    for lambda in [0.0, 0.25] {
        let series = LogMomentSeries::circle(lambda, 6).unwrap();
        for q in [1.7, 2.5] {
            let s = mellin_series(q, 2.0 / tau, &series, 6).unwrap();
            let exact = log_morris_mellin(&MellinParams::new(q, tau, lambda, lambda)).unwrap().re;
            let diff = (s.exp_form.ln() - exact).abs();
            assert!(diff <= s.smallest_term.1, "lambda={lambda} q={q}: {diff:e} vs {:e}", s.smallest_term.1);
            assert!((s.term_by_term.ln() - exact).abs() < 10.0 * s.smallest_term.1);
        }
    }
}

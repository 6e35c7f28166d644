use anyhow::{bail, Result};
use gmc_core::expansion::{h_coefficient, h_symbolic, BellProvider, DerivativeProvider, LogMomentSeries, QuadratureProvider};
use gmc_core::gmcsim::{
    build_covariance, conical_intensity, covariance_matrix, girsanov_check, intermittency_invariance_check,
    rho_intersection, sample_total_mass, write_binary, write_csv,
};
use gmc_core::mellin::{
    asymptotic_logm, morris_mellin, selberg_mellin, self_duality_residual, MellinParams, MAX_ASYMPTOTIC_ORDER,
};
use gmc_core::moments::{morris_moment, numeric_moment_oracle, KernelSpec, Method, MomentRequest, TestFunctionSpec};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::args::{
    ExpansionArgs, KindArg, MellinArgs, MethodArg, MomentsArgs, ProviderArg, SimulateArgs, Suite, VerifyArgs,
};
use crate::table::{Cell, Table};

/// What a run produced, plus the quantities recorded in the sidecar.
pub struct Outcome {
    pub table: Table,
    pub mu: Option<f64>,
    pub tau: Option<f64>,
    /// Largest error bar or residual reported in the table.
    pub achieved: Option<f64>,
    /// Verification verdict; `None` for commands that do not verify.
    pub passed: Option<bool>,
}

impl Outcome {
    fn plain(table: Table) -> Self {
        Outcome {
            table,
            mu: None,
            tau: None,
            achieved: None,
            passed: None,
        }
    }
}

fn track(worst: &mut Option<f64>, v: f64) {
    if v.is_finite() {
        *worst = Some(worst.map_or(v, |w| w.max(v)));
    }
}

pub fn moments(a: &MomentsArgs) -> Result<Outcome> {
    let kernel = a.kernel.kernel()?;
    let phi = a.kernel.phi()?;
    let (mu, tau) = a.strength.resolve()?;
    let method = match a.method {
        MethodArg::Auto => Method::Auto,
        MethodArg::Quadrature => Method::Quadrature,
        MethodArg::Montecarlo => Method::MonteCarlo { seed: a.seed },
    };
    let phibar = phi.mean()?;
    let mut t = Table::new(&["n", "mu", "tau", "value", "error", "method", "closed_form"]);
    let mut worst = None;
    for &n in &a.n {
        let closed = if mu == 0.0 {
            Some(phibar.powi(n as i32))
        } else if matches!(kernel, KernelSpec::Circle) && (n as f64) < tau {
            let lambda = match phi {
                TestFunctionSpec::Circular { lambda } => lambda,
                _ => 0.0,
            };
            morris_moment(n, tau, lambda).ok()
        } else {
            None
        };
        let req = MomentRequest {
            kernel: kernel.clone(),
            phi,
            order: n,
            mu,
        };
        match numeric_moment_oracle(&req, method, a.budget) {
            Ok(e) => {
                track(&mut worst, e.error);
                let m = format!("{:?}", e.method).to_lowercase();
                let status = if e.budget_exceeded { "budget exceeded" } else { "ok" };
                t.push(
                    vec![n.into(), mu.into(), tau.into(), e.value.into(), e.error.into(), m.into(), closed.into()],
                    status,
                );
            }
            Err(e) => t.push_failed(vec![n.into(), mu.into(), tau.into()], e),
        }
    }
    Ok(Outcome {
        table: t,
        mu: Some(mu),
        tau: Some(tau),
        achieved: worst,
        passed: None,
    })
}

fn provider(kernel: KernelSpec, phi: TestFunctionSpec, which: ProviderArg, budget: u64, samples: u64, seed: u64, k_max: usize) -> Result<Box<dyn DerivativeProvider>> {
    Ok(match which {
        ProviderArg::Quadrature => {
            Box::new(QuadratureProvider::new(kernel, phi, budget)?.with_monte_carlo(samples, seed))
        }
        ProviderArg::Bell => {
            let lambda = match (&kernel, phi) {
                (KernelSpec::Circle, TestFunctionSpec::Circular { lambda }) => lambda,
                (KernelSpec::Circle, TestFunctionSpec::Constant) => 0.0,
                _ => bail!("provider: bell needs the circle kernel"),
            };
            Box::new(BellProvider::new(LogMomentSeries::circle(lambda, k_max.max(2) + 8)?))
        }
    })
}

pub fn expansion(a: &ExpansionArgs) -> Result<Outcome> {
    if a.symbolic {
        let mut t = Table::new(&["n", "k", "terms", "coefficient"]);
        for &n in &a.n {
            match h_symbolic(n, a.with_f) {
                Ok(map) => {
                    for (k, h) in map {
                        if a.k_max.is_some_and(|m| k > m) {
                            continue;
                        }
                        t.push(vec![n.into(), k.into(), h.len().into(), h.to_canonical_string().into()], "ok");
                    }
                }
                Err(e) => t.push_failed(vec![n.into()], e),
            }
        }
        return Ok(Outcome::plain(t));
    }
    let kernel = a.kernel.kernel()?;
    let phi = a.kernel.phi()?;
    let k_top = a.k_max.unwrap_or(2 * a.n.iter().max().copied().unwrap_or(1) + 2);
    let prov = provider(kernel, phi, a.provider, a.budget, a.mc_samples, a.seed, k_top)?;
    let mut t = Table::new(&["n", "k", "value", "error", "method"]);
    let mut worst = None;
    for &n in &a.n {
        for k in 2..=a.k_max.unwrap_or(2 * n + 2) {
            match h_coefficient(n, k, prov.as_ref()) {
                Ok(e) => {
                    track(&mut worst, e.error);
                    let m = format!("{:?}", e.method).to_lowercase();
                    t.push(vec![n.into(), k.into(), e.value.into(), e.error.into(), m.into()], "ok");
                }
                Err(e) => t.push_failed(vec![n.into(), k.into()], e),
            }
        }
    }
    Ok(Outcome {
        achieved: worst,
        ..Outcome::plain(t)
    })
}

pub fn mellin(a: &MellinArgs) -> Result<Outcome> {
    let (mu, tau) = a.strength.resolve()?;
    let l2 = a.lambda2.unwrap_or(a.lambda);
    if let Some(p) = a.asymptotic {
        if p > MAX_ASYMPTOTIC_ORDER {
            bail!("asymptotic: order at most {MAX_ASYMPTOTIC_ORDER}");
        }
    }
    let mut t = Table::new(&["q", "mu", "tau", "re", "im", "product", "rel_diff", "asymptotic_log"]);
    let mut worst = None;
    for &q in &a.q {
        let p = MellinParams::new(q, tau, a.lambda, l2);
        let v = match a.kind {
            KindArg::Morris => morris_mellin(&p),
            KindArg::Selberg => selberg_mellin(&p),
        };
        let v = match v {
            Ok(v) => v,
            Err(e) => {
                t.push_failed(vec![q.into(), mu.into(), tau.into()], e);
                continue;
            }
        };
        let integer = q >= 1.0 && q.fract() == 0.0;
        let product = if a.kind == KindArg::Morris && integer && a.lambda == l2 {
            morris_moment(q as usize, tau, a.lambda).ok()
        } else {
            None
        };
        let rel = product.map(|m| (v.re - m).abs() / m.abs());
        if let Some(r) = rel {
            track(&mut worst, r);
        }
        let asym = match (a.kind, a.asymptotic) {
            (KindArg::Morris, Some(order)) => asymptotic_logm(q, tau, a.lambda, l2, order).ok().map(|s| s.value),
            _ => None,
        };
        t.push(
            vec![q.into(), mu.into(), tau.into(), v.re.into(), v.im.into(), product.into(), rel.into(), asym.into()],
            "ok",
        );
    }
    Ok(Outcome {
        table: t,
        mu: Some(mu),
        tau: Some(tau),
        achieved: worst,
        passed: None,
    })
}

pub fn simulate(a: &SimulateArgs) -> Result<Outcome> {
    let kernel = a.kernel.kernel()?;
    let phi = a.kernel.phi()?;
    let (mu, tau) = a.strength.resolve()?;
    let eps = a.epsilon.unwrap_or(4.0 / a.grid as f64);
    let cg = build_covariance(&kernel, mu, eps, a.grid)?;
    let set = sample_total_mass(&cg, phi, a.samples, a.seed)?;
    if let Some(path) = &a.samples_out {
        if path.extension().is_some_and(|e| e == "bin") {
            write_binary(&set, path)?;
        } else {
            write_csv(&set, path)?;
        }
    }
    let mut t = Table::new(&["quantity", "value", "std_error"]);
    for k in [1, 2] {
        let (m, se) = set.moment(k);
        t.push(vec![format!("moment_{k}").into(), m.into(), se.into()], "ok");
    }
    let d = &cg.diagnostics;
    t.push(vec![format!("factor_{}", d.method).into(), d.jitter.into(), Cell::Num(f64::NAN)], "ok");
    t.push(vec!["clipped_mass".into(), d.clipped_mass.into(), Cell::Num(f64::NAN)], "ok");
    t.push(vec!["epsilon".into(), eps.into(), Cell::Num(f64::NAN)], "ok");
    Ok(Outcome {
        table: t,
        mu: Some(mu),
        tau: Some(tau),
        achieved: Some(set.moment(2).1),
        passed: None,
    })
}

struct Checks {
    table: Table,
    worst: Option<f64>,
}

impl Checks {
    fn new() -> Self {
        Checks {
            table: Table::new(&["case", "value", "error", "tolerance", "pass"]),
            worst: None,
        }
    }

    fn add(&mut self, case: String, value: f64, error: f64, tol: f64, pass: bool) {
        track(&mut self.worst, error);
        self.table.push(vec![case.into(), value.into(), error.into(), tol.into(), pass.into()], "ok");
    }

    fn fail(&mut self, case: String, e: impl std::fmt::Display) {
        self.table.push(vec![case.into(), f64::NAN.into(), f64::NAN.into(), f64::NAN.into(), false.into()], e.to_string());
    }

    fn residual(&mut self, case: String, r: gmc_core::Result<f64>, tol: f64) {
        match r {
            Ok(r) => self.add(case, r, r, tol, r < tol),
            Err(e) => self.fail(case, e),
        }
    }
}

pub fn verify(a: &VerifyArgs) -> Result<Outcome> {
    let mut c = Checks::new();
    match a.suite {
        Suite::Renormalizability => {
            let kernel = a.kernel.kernel()?;
            let phi = a.kernel.phi()?;
            let prov = QuadratureProvider::new(kernel, phi, a.budget)?.with_monte_carlo(a.mc_samples, a.seed);
            for &n in &a.n {
                for k in 2..=2 * n + 2 {
                    let case = format!("H({n},{k})");
                    match h_coefficient(n, k, &prov) {
                        // only k > 2n must vanish
                        Ok(e) => c.add(case, e.value, e.error, e.error, k <= 2 * n || e.value.abs() < e.error),
                        Err(e) => c.fail(case, e),
                    }
                }
            }
        }
        Suite::Mellin => {
            for tau in [6.0, 8.0] {
                for lam in [0.0, 0.25] {
                    for n in 1..=3usize {
                        let case = format!("n={n} tau={tau} lambda={lam}");
                        let r = morris_mellin(&MellinParams::new(n as f64, tau, lam, lam)).and_then(|v| {
                            let m = morris_moment(n, tau, lam)?;
                            Ok((v.re - m).abs() / m)
                        });
                        c.residual(case, r, 1e-8);
                    }
                }
            }
        }
        Suite::SelfDuality => {
            for q in [0.3, 0.7, 1.2] {
                for tau in [1.8, 2.5, 4.0] {
                    c.residual(format!("q={q} tau={tau}"), self_duality_residual(q, tau), 1e-8);
                }
            }
        }
        Suite::Cone => {
            let eps = 1e-3;
            for k in [KernelSpec::Interval, KernelSpec::Circle] {
                let mut worst = 0.0f64;
                let mut err = None;
                for i in 0..100 {
                    let z = eps + (1.0 - 2.0 * eps) * i as f64 / 99.0;
                    match rho_intersection(&k, eps, z) {
                        Ok(r) => worst = worst.max((r + k.log_r(z)).abs()),
                        Err(e) => err = Some(e),
                    }
                }
                match err {
                    None => c.add(format!("rho {}", k.name()), worst, worst, 1e-6, worst < 1e-6),
                    Some(e) => c.fail(format!("rho {}", k.name()), e),
                }
            }
            let rep = conical_intensity(&KernelSpec::Interval).positivity();
            let dev = (rep.min_value - 1.0).abs();
            c.add("f interval".into(), rep.min_value, dev, 0.0, dev == 0.0 && rep.positive());
        }
        Suite::Girsanov => {
            let n = 32;
            let cov = covariance_matrix(&KernelSpec::Interval, 1.0, 4.0 / n as f64, n);
            let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
            for draw in 0..10 {
                let beta: Vec<f64> = (0..n).map(|_| rng.gen_range(-0.2..0.2)).collect();
                let y = rng.gen_range(0..n);
                c.residual(format!("draw {draw} y={y}"), girsanov_check(&cov, 0.7, &[y], &beta), 1e-12);
            }
        }
        Suite::Invariance => {
            for (mu, delta, l) in [(1.0, 0.3, 1.0), (0.8, 0.5, 2.0)] {
                let case = format!("mu={mu} delta={delta} L={l}");
                match intermittency_invariance_check(mu, delta, l, &KernelSpec::Interval, 4.0 / 64.0, 64) {
                    Ok((m, v)) => {
                        let r = m.max(v);
                        c.add(case, r, r, 1e-12, r < 1e-12);
                    }
                    Err(e) => c.fail(case, e),
                }
            }
        }
    }
    let passed = c.table.all_ok() && c.table.rows.iter().all(|r| r[4] == Cell::Bool(true));
    Ok(Outcome {
        achieved: c.worst,
        passed: Some(passed),
        ..Outcome::plain(c.table)
    })
}

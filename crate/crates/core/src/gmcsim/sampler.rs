use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::covariance::{CovarianceGrid, Factor};
use crate::error::{domain, Result};
use crate::moments::TestFunctionSpec;

/// Samples drawn per RNG stream; fixed so results do not depend on the thread count.
pub const CHUNK: usize = 256;

/// Grid metadata carried with a sample set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridMeta {
    pub n: usize,
    pub epsilon: f64,
    pub mu: f64,
    pub kernel: String,
}

/// Draws of the total mass sum_i phi(s_i) exp(w_i) / N.
#[derive(Clone, Debug, PartialEq)]
pub struct MassSampleSet {
    pub samples: Vec<f64>,
    pub seed: u64,
    pub grid: GridMeta,
}

impl MassSampleSet {
    pub fn n_samples(&self) -> usize {
        self.samples.len()
    }

    /// Empirical k-th moment and its standard error.
    pub fn moment(&self, k: i32) -> (f64, f64) {
        let n = self.samples.len() as f64;
        let (mut s, mut s2) = (0.0, 0.0);
        for x in &self.samples {
            let v = x.powi(k);
            s += v;
            s2 += v * v;
        }
        let m = s / n;
        let var = ((s2 / n - m * m) * n / (n - 1.0)).max(0.0);
        (m, (var / n).sqrt())
    }
}

fn weights(cg: &CovarianceGrid, phi: TestFunctionSpec) -> Vec<f64> {
    let n = cg.len() as f64;
    cg.grid
        .iter()
        .zip(&cg.realized_variance)
        .map(|(&s, &v)| phi.value(s, 1.0 - s) * (-0.5 * v).exp() / n)
        .collect()
}

fn masses_dense(l: &DMatrix<f64>, w: &[f64], rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let n = w.len();
    let z = DMatrix::from_fn(n, count, |_, _| StandardNormal.sample(rng));
    let field = l * z;
    (0..count)
        .map(|c| field.column(c).iter().zip(w).map(|(x, wi)| wi * x.exp()).sum())
        .collect()
}

fn masses_circulant(roots: &[f64], w: &[f64], rng: &mut ChaCha8Rng, count: usize) -> Vec<f64> {
    let n = w.len();
    let fft = FftPlanner::new().plan_fft_forward(n);
    let mut buf = vec![Complex64::new(0.0, 0.0); n];
    let mut out = Vec::with_capacity(count);
    // real and imaginary parts are two independent fields
    while out.len() < count {
        for (b, r) in buf.iter_mut().zip(roots) {
            let a: f64 = StandardNormal.sample(rng);
            let c: f64 = StandardNormal.sample(rng);
            *b = Complex64::new(a * r, c * r);
        }
        fft.process(&mut buf);
        let (mut re, mut im) = (0.0, 0.0);
        for (v, wi) in buf.iter().zip(w) {
            re += wi * v.re.exp();
            im += wi * v.im.exp();
        }
        out.push(re);
        if out.len() < count {
            out.push(im);
        }
    }
    out
}

/// Seeded draws of the total mass of phi(x) M_{mu,eps}(dx) on the grid.
///
/// Chunk c of `CHUNK` samples uses ChaCha8 stream c of `seed`, so the set is
/// identical for every worker count.
pub fn sample_total_mass(cg: &CovarianceGrid, phi: TestFunctionSpec, n_samples: usize, seed: u64) -> Result<MassSampleSet> {
    phi.validate()?;
    if n_samples == 0 {
        return domain("need at least one sample");
    }
    let w = weights(cg, phi);
    let chunks = n_samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let count = CHUNK.min(n_samples - c * CHUNK);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c as u64);
            match &cg.factor {
                Factor::Zero => vec![w.iter().sum(); count],
                Factor::Dense(l) => masses_dense(l, &w, &mut rng, count),
                Factor::Circulant(roots) => masses_circulant(roots, &w, &mut rng, count),
            }
        })
        .collect();
    Ok(MassSampleSet {
        samples: parts.concat(),
        seed,
        grid: GridMeta {
            n: cg.len(),
            epsilon: cg.epsilon,
            mu: cg.mu,
            kernel: cg.kernel.name(),
        },
    })
}

/// Exact E[M^2] of the discretized mass, sum_ij w_i w_j exp(C_ij) with the realized covariance.
pub fn grid_second_moment(cg: &CovarianceGrid, phi: TestFunctionSpec) -> f64 {
    let n = cg.len();
    let c = cg.realized_covariance();
    let u: Vec<f64> = cg
        .grid
        .iter()
        .map(|&s| phi.value(s, 1.0 - s) / n as f64)
        .collect();
    let mut total = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += u[j] * c[(i, j)].exp();
        }
        total += u[i] * row;
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmcsim::build_covariance;
    use crate::moments::KernelSpec;

    #[test]
    fn zero_mu_gives_mean() {
        let cg = build_covariance(&KernelSpec::Circle, 0.0, 4.0 / 64.0, 64).unwrap();
        let s = sample_total_mass(&cg, TestFunctionSpec::Constant, 10, 1).unwrap();
        assert!(s.samples.iter().all(|v| (v - 1.0).abs() < 1e-14));
    }

    #[test]
    fn unbiased_mean() {
        for k in [KernelSpec::Circle, KernelSpec::Interval] {
            let cg = build_covariance(&k, 0.5, 4.0 / 256.0, 256).unwrap();
            let s = sample_total_mass(&cg, TestFunctionSpec::Constant, 20_000, 7).unwrap();
            let (m, se) = s.moment(1);
            assert!((m - 1.0).abs() < 4.0 * se, "{k:?}: {m} +- {se}");
            assert!(s.samples.iter().all(|v| *v > 0.0));
        }
    }

    #[test]
    fn second_moment_matches_grid_value() {
        let cg = build_covariance(&KernelSpec::Interval, 0.3, 4.0 / 64.0, 64).unwrap();
        let s = sample_total_mass(&cg, TestFunctionSpec::Constant, 40_000, 3).unwrap();
        let (m2, se) = s.moment(2);
        let exact = grid_second_moment(&cg, TestFunctionSpec::Constant);
        assert!((m2 - exact).abs() < 4.0 * se, "{m2} +- {se} vs {exact}");
    }

    #[test]
    fn thread_count_does_not_matter() {
        let cg = build_covariance(&KernelSpec::Circle, 0.5, 4.0 / 256.0, 256).unwrap();
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| sample_total_mass(&cg, TestFunctionSpec::Constant, 1000, 11).unwrap())
        };
        assert_eq!(run(1), run(3));
    }
}

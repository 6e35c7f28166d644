use std::path::PathBuf;

use anyhow::{bail, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gmc_core::moments::{KernelSpec, TestFunctionSpec, DEFAULT_BUDGET, DEFAULT_MC_SEED};
use serde::Serialize;

use crate::table::Format;

#[derive(Parser, Debug, Serialize)]
#[command(name = "gmc", version, about = "Moments, intermittency expansions, Mellin transforms and simulation of 1-D GMC")]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// Worker threads (defaults to GMC_THREADS, then all cores).
    #[arg(long, global = true, env = "GMC_THREADS")]
    pub threads: Option<usize>,

    /// Result table path; a `<output>.meta.json` sidecar is written next to it.
    /// Without it the table goes to stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Subcommand, Debug, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    /// Moments E[M(phi)^n] by direct integration, with the closed form where known.
    Moments(MomentsArgs),
    /// H(n,k) coefficients of the intermittency expansion, numeric or symbolic.
    Expansion(ExpansionArgs),
    /// Morris or Selberg Mellin transforms E[M^q].
    Mellin(MellinArgs),
    /// Seeded draws of the total mass of the regularized field.
    Simulate(SimulateArgs),
    /// Run a verification suite; exits with 2 if any check fails.
    Verify(VerifyArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Moments(_) => "moments",
            Command::Expansion(_) => "expansion",
            Command::Mellin(_) => "mellin",
            Command::Simulate(_) => "simulate",
            Command::Verify(_) => "verify",
        }
    }
}

/// Intermittency as either mu or tau = 2/mu.
#[derive(Args, Debug, Clone, Serialize)]
#[group(required = true, multiple = false)]
pub struct Strength {
    #[arg(long)]
    pub mu: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
}

impl Strength {
    /// (mu, tau); tau is infinite at mu = 0.
    pub fn resolve(&self) -> Result<(f64, f64)> {
        match (self.mu, self.tau) {
            (Some(mu), None) if mu >= 0.0 => Ok((mu, if mu == 0.0 { f64::INFINITY } else { 2.0 / mu })),
            (None, Some(tau)) if tau > 0.0 => Ok((2.0 / tau, tau)),
            (Some(mu), None) => bail!("mu: must be >= 0, got {mu}"),
            (None, Some(tau)) => bail!("tau: must be > 0, got {tau}"),
            _ => bail!("exactly one of --mu and --tau is required"),
        }
    }
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct KernelArgs {
    /// interval, circle or gff-circle:Q with 0 <= Q < 1.
    #[arg(long, default_value = "circle")]
    pub kernel: String,
    /// Test function exponent: |1 - e^{2 pi i s}|^{2 lambda} on periodic kernels,
    /// s^lambda (1-s)^lambda2 on the interval.
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Second interval exponent (defaults to --lambda).
    #[arg(long)]
    pub lambda2: Option<f64>,
}

impl KernelArgs {
    pub fn kernel(&self) -> Result<KernelSpec> {
        parse_kernel(&self.kernel)
    }

    pub fn phi(&self) -> Result<TestFunctionSpec> {
        let k = self.kernel()?;
        let l2 = self.lambda2.unwrap_or(self.lambda);
        if !(self.lambda >= 0.0 && l2 >= 0.0) {
            bail!("lambda: exponents must be >= 0");
        }
        Ok(if k.is_periodic() {
            if l2 != self.lambda {
                bail!("lambda2: periodic kernels take a single exponent");
            }
            if self.lambda == 0.0 {
                TestFunctionSpec::Constant
            } else {
                TestFunctionSpec::Circular { lambda: self.lambda }
            }
        } else if self.lambda == 0.0 && l2 == 0.0 {
            TestFunctionSpec::Constant
        } else {
            TestFunctionSpec::Beta {
                lambda1: self.lambda,
                lambda2: l2,
            }
        })
    }
}

pub fn parse_kernel(s: &str) -> Result<KernelSpec> {
    match s {
        "interval" => Ok(KernelSpec::Interval),
        "circle" => Ok(KernelSpec::Circle),
        _ => match s.strip_prefix("gff-circle:").map(str::parse::<f64>) {
            Some(Ok(q)) => Ok(KernelSpec::gff_circle(q)?),
            _ => bail!("kernel: expected interval, circle or gff-circle:Q, got '{s}'"),
        },
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodArg {
    Auto,
    Quadrature,
    Montecarlo,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MomentsArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub strength: Strength,
    /// Moment orders.
    #[arg(long, num_args = 1.., required = true)]
    pub n: Vec<usize>,
    #[arg(long, value_enum, default_value_t = MethodArg::Auto)]
    pub method: MethodArg,
    /// Integrand evaluations (quadrature) or samples (Monte Carlo).
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = DEFAULT_MC_SEED)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProviderArg {
    /// Direct integration of the moment derivatives.
    Quadrature,
    /// Closed-form log-moment coefficients of the circle (Bell recurrence).
    Bell,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ExpansionArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Expansion orders n.
    #[arg(long, num_args = 1.., required = true)]
    pub n: Vec<usize>,
    /// Largest k (defaults to 2n + 2).
    #[arg(long)]
    pub k_max: Option<usize>,
    #[arg(long, value_enum, default_value_t = ProviderArg::Quadrature)]
    pub provider: ProviderArg,
    /// Exact symbolic h_{n,k} in the pair couplings instead of numbers (n <= 6).
    #[arg(long)]
    pub symbolic: bool,
    /// Keep the test-function factors f in the symbolic output.
    #[arg(long)]
    pub with_f: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    /// Monte Carlo samples for moment orders above the quadrature limit.
    #[arg(long, default_value_t = 4_000_000)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = DEFAULT_MC_SEED)]
    pub seed: u64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum KindArg {
    Morris,
    Selberg,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct MellinArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub strength: Strength,
    #[arg(long, default_value_t = 0.0)]
    pub lambda: f64,
    /// Second exponent (defaults to --lambda).
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Mellin variables.
    #[arg(long, num_args = 1.., required = true, allow_negative_numbers = true)]
    pub q: Vec<f64>,
    #[arg(long, value_enum, default_value_t = KindArg::Morris)]
    pub kind: KindArg,
    /// Also report the large-tau asymptotic series of log E[M^q] to this order.
    #[arg(long)]
    pub asymptotic: Option<usize>,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    #[command(flatten)]
    #[serde(flatten)]
    pub strength: Strength,
    /// Grid points N.
    #[arg(long, default_value_t = 2048)]
    pub grid: usize,
    /// Regularization scale (defaults to 4/N).
    #[arg(long)]
    pub epsilon: Option<f64>,
    #[arg(long, default_value_t = 100_000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_MC_SEED)]
    pub seed: u64,
    /// Also write the raw samples: `.bin` gives the binary column, anything else CSV.
    #[arg(long)]
    pub samples_out: Option<PathBuf>,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    /// H(n,k) vanishes for k > 2n.
    Renormalizability,
    /// Morris transform at integer q against the moment product.
    Mellin,
    SelfDuality,
    /// Cone-construction covariance against -log r.
    Cone,
    Girsanov,
    Invariance,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    #[command(flatten)]
    #[serde(flatten)]
    pub kernel: KernelArgs,
    /// Expansion orders for the renormalizability suite.
    #[arg(long, num_args = 1.., default_values_t = [1usize, 2])]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u64,
    #[arg(long, default_value_t = 4_000_000)]
    pub mc_samples: u64,
    #[arg(long, default_value_t = DEFAULT_MC_SEED)]
    pub seed: u64,
}

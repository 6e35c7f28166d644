//! Morris and Selberg Mellin transforms through log G-ratio integrals.

mod integral;
mod transform;

pub use integral::{i_integral, log_g_ratio};
pub use transform::{
    asymptotic_coefficient, asymptotic_logm, log_morris_mellin, log_selberg_mellin, morris_mellin, selberg_mellin,
    self_duality_residual, AsymptoticSum, MellinParams, MAX_ASYMPTOTIC_ORDER,
};

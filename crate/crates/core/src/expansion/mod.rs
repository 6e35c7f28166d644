//! Intermittency expansion: log-moment coefficients, H_{n,k}, symbolic h_{n,k},
//! Mellin-coefficient recursions and multi-subset coefficients.

mod hcoef;
mod logmoment;
mod multi;
mod series;
mod symbolic;

pub use hcoef::{h_coefficient, h_recurrence_table, BellProvider, DerivativeProvider, QuadratureProvider};
pub use logmoment::{
    c_closed_circle, c_closed_circle_poly, c_numeric, c_numeric_all, circle_poly_parts, CoeffPoly, LogMomentSeries,
};
pub use multi::{multi_subset_h, JointDerivativeProvider, QuadratureJointProvider};
pub use series::{
    f_coefficients, f_coefficients_complex, f_recurrence, general_transform, mellin_series, required_derivatives,
    MellinSeries,
};
pub use symbolic::{h_symbolic, h_symbolic_raw, Monomial, SymbolicCoefficient, MAX_ARITY};

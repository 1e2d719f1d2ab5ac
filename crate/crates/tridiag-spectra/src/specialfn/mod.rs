//! Scalar special-function kernels.
//!
//! Everything downstream reduces to four ingredients implemented here:
//! Pochhammer and q-Pochhammer symbols, terminating (basic) hypergeometric
//! sums, log-gamma ratios, and compensated summation. A small double-double
//! type [`dd::Dd`] provides roughly 32 significant digits for the handful of
//! paths where plain `f64` demonstrably loses too much to cancellation.

pub mod dd;
pub mod gamma;
pub mod kahan;
pub mod series;

pub use dd::Dd;
pub use gamma::{gamma_abs_sq, gamma_imag_abs_sq, log_gamma, log_gamma_ratio};
pub use kahan::NeumaierSum;
pub use series::{
    basic_hypergeometric_terminating, hypergeometric_terminating, pochhammer, q_pochhammer,
    q_pochhammer_inf, q_pochhammer_pair, q_pochhammer_pair_inf, SeriesParam, SeriesParams,
};

//! Special functions needed by the UNB model: the gamma family, Gauss and
//! Kummer hypergeometric series, the s = 1 Lerch transcendent, and the
//! double series for the `b`-derivative of ₂F₁.
//!
//! Series are summed in log space with sign tracking, so large Pochhammer
//! products never overflow.

mod gamma;
mod hypergeometric;
mod series;
mod theta;

pub use gamma::{digamma, log_gamma, trigamma};
pub(crate) use gamma::{digamma_unchecked, ln_factorial, ln_gamma};
pub use hypergeometric::{
    confluent_1f1, gauss_2f1, gauss_2f1_with, lerch_phi, Hyp2f1Method, EULER_THRESHOLD,
};
pub use series::{SeriesControl, SeriesSum};
pub(crate) use series::sum_by_ratio;
pub use theta::{kampe_theta1, ThetaArgs, THETA_MAX_DIAGONAL};

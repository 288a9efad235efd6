//! Log-link count regression with UNB, NB and UP responses, Wald inference
//! and the Vuong test for non-nested comparisons.
//!
//! Every family is parameterized by its conditional mean `μ_i = exp(x_i·β)`:
//! UNB takes `p_i = r / (2μ_i + r)`, NB takes `p_i = r / (μ_i + r)` and UP
//! takes `λ_i = 2μ_i`.

mod design;
mod family;
mod fit;
mod vuong;

pub use design::{Design, RegressionSpec, INTERCEPT_NAME};
pub use fit::{
    fit_nb_regression, fit_regression, fit_regression_design, fit_unb_regression,
    fit_up_regression, reg_beta_gradient, reg_loglik, unb_reg_loglik, RegressionFit, ETA_LIMIT,
    PMF_FLOOR,
};
pub use vuong::{vuong_test, vuong_test_ln, VuongResult};

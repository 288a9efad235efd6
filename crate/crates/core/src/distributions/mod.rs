//! The UNB distribution and the comparator laws it is fitted against.

mod comparators;
mod params;
mod sampling;
mod unb;

pub use comparators::{geom_ln_pmf, geom_pmf, nb_cdf, nb_ln_pmf, nb_pmf, up_ln_pmf, up_ln_pmf_with, up_pmf};
pub use params::{GeomParams, NbParams, UnbParams, UpParams};
pub use sampling::{geom_sample, nb_sample, unb_sample, up_sample};
pub use unb::{
    ln_pmf_hypergeometric, pmf_route, unb_cdf, unb_dispersion_index, unb_ln_pmf,
    unb_ln_pmf_series, unb_ln_pmf_with, unb_mean, unb_mgf, unb_p0, unb_pgf, unb_pmf, unb_pmf_ratio,
    unb_pmf_series, unb_pmf_vector, unb_variance, PmfRoute, RECURRENCE_FLOOR,
};

/// Smallest `x` with `P(N >= x) < eps` for the mixing law `N ~ NB(r, p)`.
///
/// Since `p_UNB(x) <= P(N >= x)`, summing the UNB PMF up to this point leaves
/// at most `eps` of mass behind.
pub fn nb_tail_cutoff(params: &NbParams, eps: f64) -> u64 {
    let (r, p, q) = (params.r(), params.p(), params.q());
    let mut ln_term = r * p.ln();
    let mut cdf = 0.0;
    let mut x = 0u64;
    loop {
        // survival P(N >= x) = 1 - P(N <= x - 1)
        let survival = 1.0 - cdf;
        if survival < eps && x > 0 {
            return x;
        }
        // Once past the mode, bound the survival by a geometric tail of the
        // current term, which stays accurate below the 1 - cdf rounding floor.
        let xf = x as f64;
        let ratio = q * (r + xf) / (xf + 1.0);
        if ratio < 1.0 && xf > 0.0 {
            let tail_bound = ln_term.exp() / (1.0 - ratio);
            if tail_bound < eps {
                return x;
            }
        }
        cdf += ln_term.exp();
        ln_term += ratio.ln();
        x += 1;
    }
}

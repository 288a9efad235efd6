//! Seeded samplers. Each call owns its generator, so equal `(params, n, seed)`
//! always produce the same sequence.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson};

use super::params::{GeomParams, NbParams, UnbParams, UpParams};

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// One NB(r, p) draw as a Poisson whose rate is Gamma(shape r, scale q/p).
fn draw_nb<R: Rng>(rng: &mut R, gamma: &Gamma<f64>) -> u64 {
    let rate = gamma.sample(rng);
    draw_poisson(rng, rate)
}

fn draw_poisson<R: Rng>(rng: &mut R, rate: f64) -> u64 {
    if rate <= 0.0 {
        return 0;
    }
    // `Poisson::new` only fails for non-finite or non-positive rates.
    let poisson = Poisson::new(rate).expect("positive finite Poisson rate");
    poisson.sample(rng) as u64
}

fn nb_gamma(r: f64, p: f64) -> Gamma<f64> {
    Gamma::new(r, (1.0 - p) / p).expect("validated NB parameters")
}

/// Draws `X | N ~ U{0..N}` with `N ~ NB(r, p)`.
pub fn unb_sample(params: &UnbParams, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    let gamma = nb_gamma(params.r(), params.p());
    (0..n)
        .map(|_| {
            let latent = draw_nb(&mut rng, &gamma);
            rng.random_range(0..=latent)
        })
        .collect()
}

pub fn nb_sample(params: &NbParams, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    let gamma = nb_gamma(params.r(), params.p());
    (0..n).map(|_| draw_nb(&mut rng, &gamma)).collect()
}

/// Number of failures before the first success, by inversion.
pub fn geom_sample(params: &GeomParams, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    let ln_q = (-params.p()).ln_1p();
    (0..n)
        .map(|_| {
            let u: f64 = 1.0 - rng.random::<f64>();
            (u.ln() / ln_q).floor() as u64
        })
        .collect()
}

pub fn up_sample(params: &UpParams, n: usize, seed: u64) -> Vec<u64> {
    let mut rng = rng(seed);
    (0..n)
        .map(|_| {
            let latent = draw_poisson(&mut rng, params.lambda());
            rng.random_range(0..=latent)
        })
        .collect()
}

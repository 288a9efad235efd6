use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use unb_core::datasets::Dataset;
use unb_core::distributions::{unb_sample, UnbParams};
use unb_core::estimation::CountModel;
use unb_core::regression::{fit_regression, RegressionSpec};
use unb_core::Error;

fn synthetic(n: usize, seed: u64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut a, mut b, mut y) = (Vec::new(), Vec::new(), Vec::new());
    for i in 0..n {
        let xa: f64 = rng.random_range(0.0..2.0);
        let xb = f64::from(u8::from(rng.random_bool(0.3)));
        let params = UnbParams::from_mean((-0.5 + 0.7 * xa + 0.5 * xb).exp(), 2.5).unwrap();
        y.push(unb_sample(&params, 1, seed + i as u64)[0] as f64);
        a.push(xa);
        b.push(xb);
    }
    Dataset::new(vec![("y".into(), y), ("a".into(), a), ("b".into(), b)]).unwrap()
}

#[test]
fn covariate_order_permutes_coefficients() {
    let data = synthetic(400, 3);
    let ab = fit_regression(CountModel::Unb, &data, &RegressionSpec::new("y", &["a", "b"]), 0.95).unwrap();
    let ba = fit_regression(CountModel::Unb, &data, &RegressionSpec::new("y", &["b", "a"]), 0.95).unwrap();
    assert!((ab.log_likelihood - ba.log_likelihood).abs() < 1e-6);
    assert!((ab.beta[1] - ba.beta[2]).abs() < 1e-4);
    assert!((ab.beta[2] - ba.beta[1]).abs() < 1e-4);
    assert_eq!(ba.names, ["(Intercept)", "b", "a"]);
}

#[test]
fn recovers_generating_coefficients() {
    let data = synthetic(4000, 11);
    let fit = fit_regression(CountModel::Unb, &data, &RegressionSpec::new("y", &["a", "b"]), 0.95).unwrap();
    assert!(fit.converged);
    for (k, truth) in [-0.5, 0.7, 0.5].into_iter().enumerate() {
        let (lo, hi) = fit.conf_intervals[k];
        assert!(lo - 0.05 < truth && truth < hi + 0.05, "coefficient {k}: {lo}..{hi}");
    }
}

#[test]
fn aic_prefers_the_generating_family() {
    let data = synthetic(3000, 5);
    let spec = RegressionSpec::new("y", &["a", "b"]);
    let unb = fit_regression(CountModel::Unb, &data, &spec, 0.95).unwrap();
    let up = fit_regression(CountModel::Up, &data, &spec, 0.95).unwrap();
    assert!(unb.aic < up.aic);
}

#[test]
fn collinear_design_is_rejected() {
    let data = Dataset::new(vec![
        ("y".into(), vec![0.0, 1.0, 3.0, 2.0, 0.0]),
        ("one".into(), vec![1.0; 5]),
    ])
    .unwrap();
    let err = fit_regression(CountModel::Nb, &data, &RegressionSpec::new("y", &["one"]), 0.95).unwrap_err();
    assert!(matches!(err, Error::RankDeficient { .. }), "{err:?}");
}

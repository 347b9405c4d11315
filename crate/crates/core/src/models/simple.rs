//! The analytically tractable benchmark models.

use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, RngCore};
use rand_distr::{Binomial, Distribution, Gamma as GammaDist, Poisson, StandardNormal};
use statrs::distribution::{Beta, Continuous, ContinuousCDF, Normal};
use statrs::function::gamma::{gamma_lr, ln_gamma};

use super::{Dataset, Model, PosteriorOracle, Prior, SummaryScheme};
use crate::oracles::{gaussian_abc_posterior_params, MeanPrior, TruncatedNormal};

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

// Sample standard deviation with the n-1 denominator.
fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() as f64 - 1.0)).sqrt()
}

/// Two Binomial(5, theta) observations with a uniform prior.
///
/// Three sufficient summaries of the pair `(y1, y2)`: the raw pair `s1`,
/// the order statistics `s2`, and the sum `s3`. Observed data: `(1, 2)`.
pub fn binomial_pair() -> Model {
    const TRIALS: u64 = 5;
    let prior = Prior::new(
        |rng: &mut dyn RngCore| vec![rng.random::<f64>()],
        |theta: &[f64]| {
            if (0.0..=1.0).contains(&theta[0]) {
                1.0
            } else {
                0.0
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        let p = theta[0].clamp(0.0, 1.0);
        let binom = Binomial::new(TRIALS, p).unwrap();
        Dataset::Reals(vec![
            binom.sample(rng) as f64,
            binom.sample(rng) as f64,
        ])
    };
    let schemes = vec![
        SummaryScheme::new("s1", 2, |d: &Dataset| Ok(d.as_reals()?.to_vec())),
        SummaryScheme::new("s2", 2, |d: &Dataset| {
            let mut v = d.as_reals()?.to_vec();
            v.sort_by(f64::total_cmp);
            Ok(v)
        }),
        SummaryScheme::new("s3", 1, |d: &Dataset| Ok(vec![d.as_reals()?.iter().sum()])),
    ];
    // theta | y ~ Beta(1 + y1 + y2, 1 + 2n - y1 - y2) = Beta(4, 8).
    let post = Beta::new(4.0, 8.0).unwrap();
    let oracle = PosteriorOracle {
        density: Arc::new(move |t| if (0.0..=1.0).contains(&t) { post.pdf(t) } else { 0.0 }),
        cdf: Arc::new(move |t| post.cdf(t.clamp(0.0, 1.0))),
    };
    Model::new(
        "binomial-pair",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(vec![1.0, 2.0]),
        Some(oracle),
    )
}

/// One Exp(theta) observation with a Gamma(1.2, 1.2) prior; observed y = 2.
pub fn exp_gamma() -> Model {
    const ALPHA: f64 = 1.2;
    const BETA: f64 = 1.2;
    const Y_OBS: f64 = 2.0;
    let prior = Prior::new(
        |rng: &mut dyn RngCore| {
            vec![GammaDist::new(ALPHA, 1.0 / BETA).unwrap().sample(rng)]
        },
        |theta: &[f64]| {
            let t = theta[0];
            if t <= 0.0 {
                0.0
            } else {
                (ALPHA * BETA.ln() + (ALPHA - 1.0) * t.ln() - BETA * t - ln_gamma(ALPHA)).exp()
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        Dataset::Reals(vec![rand_distr::Exp::new(theta[0]).unwrap().sample(rng)])
    };
    let schemes = vec![SummaryScheme::new("y", 1, |d: &Dataset| {
        Ok(d.as_reals()?.to_vec())
    })];
    let oracle = PosteriorOracle {
        density: Arc::new(move |t| crate::oracles::expgamma_true_posterior(t, Y_OBS, ALPHA, BETA)),
        cdf: Arc::new(move |t| crate::oracles::expgamma_true_posterior_cdf(t, Y_OBS, ALPHA, BETA)),
    };
    Model::new(
        "exp-gamma",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(vec![Y_OBS]),
        Some(oracle),
    )
}

/// Four N(theta, 4) observations (so the full-mean variance is 1) with a
/// wide N(0, 30^2) prior. Schemes: the sufficient full mean and the
/// insufficient mean of the first two observations.
pub fn gaussian_known_var() -> Model {
    const SIGMA0: f64 = 2.0;
    const N: usize = 4;
    const PRIOR_SD: f64 = 30.0;
    let y_obs = vec![1.4, -0.6, 0.9, -0.5]; // full mean 0.3, partial mean 0.4
    let prior = Prior::new(
        |rng: &mut dyn RngCore| {
            let z: f64 = StandardNormal.sample(rng);
            vec![PRIOR_SD * z]
        },
        |theta: &[f64]| Normal::new(0.0, PRIOR_SD).unwrap().pdf(theta[0]),
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        let t = theta[0];
        Dataset::Reals(
            (0..N)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    t + SIGMA0 * z
                })
                .collect(),
        )
    };
    let schemes = vec![
        SummaryScheme::new("mean", 1, |d: &Dataset| Ok(vec![mean(d.as_reals()?)])),
        SummaryScheme::new("partial-mean", 1, |d: &Dataset| {
            let y = d.as_reals()?;
            Ok(vec![mean(&y[..y.len() / 2])])
        }),
    ];
    // Exact posterior given the sufficient full mean (h = 0, omega = 1).
    let (post_mean, post_var) = gaussian_abc_posterior_params(
        mean(&y_obs),
        SIGMA0,
        N,
        0.0,
        MeanPrior::Normal {
            m0: 0.0,
            s0: PRIOR_SD,
        },
        1.0,
    )
    .unwrap();
    let post = Normal::new(post_mean, post_var.sqrt()).unwrap();
    let oracle = PosteriorOracle {
        density: Arc::new(move |t| post.pdf(t)),
        cdf: Arc::new(move |t| post.cdf(t)),
    };
    Model::new(
        "gaussian-known-var",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(y_obs),
        Some(oracle),
    )
}

/// Five Poisson(lambda) observations with a Gamma(1, 1) prior; observed
/// data `(0,0,0,0,5)`, whose mean and standard deviation disagree under
/// the model. Schemes: mean, sample sd, and the pair.
pub fn poisson_gamma() -> Model {
    const ALPHA: f64 = 1.0;
    const BETA: f64 = 1.0;
    const N: usize = 5;
    let y_obs = vec![0.0, 0.0, 0.0, 0.0, 5.0];
    let prior = Prior::new(
        |rng: &mut dyn RngCore| {
            vec![GammaDist::new(ALPHA, 1.0 / BETA).unwrap().sample(rng)]
        },
        |theta: &[f64]| {
            let t = theta[0];
            if t <= 0.0 {
                0.0
            } else {
                (ALPHA * BETA.ln() + (ALPHA - 1.0) * t.ln() - BETA * t - ln_gamma(ALPHA)).exp()
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        let lambda = theta[0];
        if lambda <= 0.0 {
            return Dataset::Reals(vec![0.0; N]);
        }
        let pois = Poisson::new(lambda).unwrap();
        Dataset::Reals((0..N).map(|_| pois.sample(rng)).collect())
    };
    let schemes = vec![
        SummaryScheme::new("mean", 1, |d: &Dataset| Ok(vec![mean(d.as_reals()?)])),
        SummaryScheme::new("sd", 1, |d: &Dataset| Ok(vec![sample_sd(d.as_reals()?)])),
        SummaryScheme::new("mean-sd", 2, |d: &Dataset| {
            let y = d.as_reals()?;
            Ok(vec![mean(y), sample_sd(y)])
        }),
    ];
    // Conjugate posterior lambda | y ~ Gamma(alpha + n ybar, beta + n) = Gamma(6, 6).
    let shape = ALPHA + y_obs.iter().sum::<f64>();
    let rate = BETA + N as f64;
    let oracle = PosteriorOracle {
        density: Arc::new(move |t| {
            if t <= 0.0 {
                0.0
            } else {
                (shape * rate.ln() + (shape - 1.0) * t.ln() - rate * t - ln_gamma(shape)).exp()
            }
        }),
        cdf: Arc::new(move |t| if t <= 0.0 { 0.0 } else { gamma_lr(shape, rate * t) }),
    };
    Model::new(
        "poisson-gamma",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(y_obs),
        Some(oracle),
    )
}

/// Fifty N(theta, 1) observations with a U(-5, 5) prior and two competing
/// sufficient summary pairs:
/// `s1 = (mean(y[0..40]), mean(y[40..50]))` (independent, unequal scales)
/// and `s2 = (mean(y[0..25]) - mean(y[25..50]), mean(y[25..50]))`
/// (correlated). Observed data: all zeros, so both summaries are (0, 0)
/// and the posterior is N(0, 1/50) truncated to the prior support.
pub fn gaussian_split_means() -> Model {
    const N: usize = 50;
    let prior = Prior::new(
        |rng: &mut dyn RngCore| vec![rng.random_range(-5.0..5.0)],
        |theta: &[f64]| {
            if (-5.0..=5.0).contains(&theta[0]) {
                0.1
            } else {
                0.0
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        let t = theta[0];
        Dataset::Reals(
            (0..N)
                .map(|_| {
                    let z: f64 = StandardNormal.sample(rng);
                    t + z
                })
                .collect(),
        )
    };
    let schemes = vec![
        SummaryScheme::new("s1", 2, |d: &Dataset| {
            let y = d.as_reals()?;
            Ok(vec![mean(&y[..40]), mean(&y[40..])])
        }),
        SummaryScheme::new("s2", 2, |d: &Dataset| {
            let y = d.as_reals()?;
            Ok(vec![mean(&y[..25]) - mean(&y[25..]), mean(&y[25..])])
        }),
    ];
    let post = TruncatedNormal::new(0.0, (1.0f64 / 50.0).sqrt(), -5.0, 5.0).unwrap();
    let oracle = PosteriorOracle {
        density: Arc::new(move |t| post.pdf(t)),
        cdf: Arc::new(move |t| post.cdf(t)),
    };
    Model::new(
        "gaussian-split-means",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(vec![0.0; N]),
        Some(oracle),
    )
}

/// Analytic summary covariance of the `s1` scheme: diag(1/40, 1/10).
pub fn split_means_cov_s1() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[1.0 / 40.0, 0.0, 0.0, 1.0 / 10.0])
}

/// Analytic summary covariance of the `s2` scheme:
/// [[2/25, -1/25], [-1/25, 1/25]] (correlation -1/sqrt(2)).
pub fn split_means_cov_s2() -> DMatrix<f64> {
    DMatrix::from_row_slice(2, 2, &[2.0 / 25.0, -1.0 / 25.0, -1.0 / 25.0, 1.0 / 25.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn binomial_schemes() {
        let model = binomial_pair();
        let data = Dataset::Reals(vec![2.0, 1.0]);
        assert_eq!(model.summarize("s1", &data).unwrap(), vec![2.0, 1.0]);
        assert_eq!(model.summarize("s2", &data).unwrap(), vec![1.0, 2.0]);
        assert_eq!(model.summarize("s3", &data).unwrap(), vec![3.0]);
        assert_eq!(model.observed_summary("s3").unwrap(), vec![3.0]);
    }

    #[test]
    fn poisson_observed_summary_is_mean_one_sd_sqrt5() {
        let model = poisson_gamma();
        let s = model.observed_summary("mean-sd").unwrap();
        assert_eq!(s[0], 1.0);
        assert!((s[1] - 5.0f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn split_means_observed_summaries_vanish() {
        let model = gaussian_split_means();
        assert_eq!(model.observed_summary("s1").unwrap(), vec![0.0, 0.0]);
        assert_eq!(model.observed_summary("s2").unwrap(), vec![0.0, 0.0]);
    }

    #[test]
    fn gaussian_known_var_schemes() {
        let model = gaussian_known_var();
        let s = model.observed_summary("mean").unwrap();
        assert!((s[0] - 0.3).abs() < 1e-12);
        let s = model.observed_summary("partial-mean").unwrap();
        assert!((s[0] - 0.4).abs() < 1e-12);
    }

    #[test]
    fn exp_gamma_simulator_tracks_rate() {
        let model = exp_gamma();
        let mut rng = stream(3);
        let reps = 20_000;
        let mean_y: f64 = (0..reps)
            .map(|_| model.simulate(&[2.0], &mut rng).as_reals().unwrap()[0])
            .sum::<f64>()
            / reps as f64;
        assert!((mean_y - 0.5).abs() < 0.02);
    }
}

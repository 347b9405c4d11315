//! Distances between summary vectors and their data-driven configuration.
//!
//! Three forms: plain Euclidean, per-coordinate weighted Euclidean
//! (weights are typically reciprocal prior-predictive standard
//! deviations), and the Mahalanobis quadratic form
//! `(s - s_obs)' Sigma^-1 (s - s_obs)`.
//!
//! The Mahalanobis form is kept *squared*, as samplers compare distances
//! only through monotone thresholds and kernels; note that a uniform
//! kernel scale `h` on the squared form corresponds to `h^2` on the
//! unsquared distance.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::RngCore;

use crate::error::{Error, Result};
use crate::models::{Model, SummaryScheme};

/// Distance between summary vectors.
#[derive(Clone, Debug)]
pub enum DistanceMetric {
    /// `sqrt(sum (s_i - o_i)^2)`.
    Euclidean,
    /// `sqrt(sum (w_i (s_i - o_i))^2)` with strictly positive weights.
    WeightedEuclidean { weights: Vec<f64> },
    /// The quadratic form `(s - o)' Sigma^-1 (s - o)`.
    Mahalanobis {
        sigma: DMatrix<f64>,
        chol: Cholesky<f64, Dyn>,
    },
}

impl DistanceMetric {
    pub fn euclidean() -> Self {
        DistanceMetric::Euclidean
    }

    pub fn weighted(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::InvalidParameter("weights must be non-empty".into()));
        }
        if let Some(idx) = weights.iter().position(|w| !(*w > 0.0)) {
            return Err(Error::InvalidParameter(format!(
                "weight {idx} must be strictly positive, got {}",
                weights[idx]
            )));
        }
        Ok(DistanceMetric::WeightedEuclidean { weights })
    }

    /// Mahalanobis metric; fails if `sigma` is not symmetric positive
    /// definite (Cholesky must succeed).
    pub fn mahalanobis(sigma: DMatrix<f64>) -> Result<Self> {
        if sigma.nrows() != sigma.ncols() {
            return Err(Error::DimensionMismatch {
                expected: sigma.nrows(),
                got: sigma.ncols(),
            });
        }
        let max_asym = (&sigma - sigma.transpose()).abs().max();
        if max_asym > 1e-8 * sigma.abs().max().max(1.0) {
            return Err(Error::NotPositiveDefinite);
        }
        let chol = Cholesky::new(sigma.clone()).ok_or(Error::NotPositiveDefinite)?;
        Ok(DistanceMetric::Mahalanobis { sigma, chol })
    }

    /// Dimension this metric is pinned to, if any.
    pub fn dim(&self) -> Option<usize> {
        match self {
            DistanceMetric::Euclidean => None,
            DistanceMetric::WeightedEuclidean { weights } => Some(weights.len()),
            DistanceMetric::Mahalanobis { sigma, .. } => Some(sigma.nrows()),
        }
    }

    /// Distance between a simulated summary and the observed one.
    pub fn distance(&self, s: &[f64], s_obs: &[f64]) -> Result<f64> {
        if s.len() != s_obs.len() {
            return Err(Error::DimensionMismatch {
                expected: s_obs.len(),
                got: s.len(),
            });
        }
        if let Some(dim) = self.dim() {
            if dim != s.len() {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: s.len(),
                });
            }
        }
        match self {
            DistanceMetric::Euclidean => Ok(s
                .iter()
                .zip(s_obs)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                .sqrt()),
            DistanceMetric::WeightedEuclidean { weights } => Ok(s
                .iter()
                .zip(s_obs)
                .zip(weights)
                .map(|((a, b), w)| {
                    let d = w * (a - b);
                    d * d
                })
                .sum::<f64>()
                .sqrt()),
            DistanceMetric::Mahalanobis { chol, .. } => {
                let d = DVector::from_iterator(s.len(), s.iter().zip(s_obs).map(|(a, b)| a - b));
                let solved = chol.solve(&d);
                Ok(d.dot(&solved))
            }
        }
    }
}

/// Sample covariance of summaries with positive-definiteness diagnostics.
#[derive(Clone, Debug)]
pub struct CovarianceEstimate {
    pub sigma: DMatrix<f64>,
    /// Coordinates whose sample variance was exactly zero.
    pub degenerate: Vec<usize>,
    /// Diagonal jitter added to restore positive definiteness (0 if none).
    pub jitter: f64,
}

/// Estimate `Cov(s | theta*)` from `m` simulated summary vectors.
///
/// The estimate uses the n-1 denominator. If the Cholesky factorization
/// fails, `1e-10 * trace/dim` (with a tiny floor for the all-zero case)
/// is added to the diagonal and reported.
pub fn estimate_covariance(
    model: &Model,
    scheme: &SummaryScheme,
    theta_star: &[f64],
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<CovarianceEstimate> {
    let dim = scheme.dim();
    if m < dim + 1 {
        return Err(Error::InvalidParameter(format!(
            "need at least dim+1 = {} replicates, got {m}",
            dim + 1
        )));
    }
    let mut draws = Vec::with_capacity(m);
    for _ in 0..m {
        if let Ok(s) = model.simulate_summary(scheme, theta_star, rng) {
            draws.push(s);
        }
    }
    if draws.len() < dim + 1 {
        return Err(Error::DegenerateSample(
            "too few valid summaries for a covariance estimate",
        ));
    }
    let n = draws.len() as f64;
    let mut mean = vec![0.0; dim];
    for s in &draws {
        for (acc, v) in mean.iter_mut().zip(s) {
            *acc += v;
        }
    }
    for acc in &mut mean {
        *acc /= n;
    }
    let mut cov = DMatrix::zeros(dim, dim);
    for s in &draws {
        for i in 0..dim {
            let di = s[i] - mean[i];
            for j in i..dim {
                cov[(i, j)] += di * (s[j] - mean[j]);
            }
        }
    }
    for i in 0..dim {
        for j in i..dim {
            let v = cov[(i, j)] / (n - 1.0);
            cov[(i, j)] = v;
            cov[(j, i)] = v;
        }
    }

    let degenerate: Vec<usize> = (0..dim).filter(|&i| cov[(i, i)] == 0.0).collect();
    let mut jitter = 0.0;
    if Cholesky::new(cov.clone()).is_none() {
        let trace: f64 = (0..dim).map(|i| cov[(i, i)]).sum();
        jitter = if trace > 0.0 {
            1e-10 * trace / dim as f64
        } else {
            1e-10
        };
        for i in 0..dim {
            cov[(i, i)] += jitter;
        }
    }
    Ok(CovarianceEstimate {
        sigma: cov,
        degenerate,
        jitter,
    })
}

/// Per-coordinate standard deviations of summaries under the prior
/// predictive distribution (`theta ~ prior`, data simulated at `theta`).
///
/// Simulations whose summary fails (e.g. an undefined statistic) are
/// skipped. A coordinate with zero spread is an error naming that
/// coordinate, not a silently dropped column.
pub fn prior_predictive_scales(
    model: &Model,
    scheme: &SummaryScheme,
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<Vec<f64>> {
    if m < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least two prior draws, got {m}"
        )));
    }
    let dim = scheme.dim();
    let mut count = 0.0f64;
    let mut mean = vec![0.0; dim];
    let mut m2 = vec![0.0; dim];
    for _ in 0..m {
        let theta = model.prior().sample(rng);
        let Ok(s) = scheme.apply(&model.simulate(&theta, rng)) else {
            continue;
        };
        count += 1.0;
        for i in 0..dim {
            let delta = s[i] - mean[i];
            mean[i] += delta / count;
            m2[i] += delta * (s[i] - mean[i]);
        }
    }
    if count < 2.0 {
        return Err(Error::DegenerateSample(
            "fewer than two valid summaries under the prior predictive",
        ));
    }
    let sds: Vec<f64> = m2.iter().map(|v| (v / (count - 1.0)).sqrt()).collect();
    if let Some(idx) = sds.iter().position(|sd| !(*sd > 0.0)) {
        return Err(Error::DegenerateCoordinate { index: idx });
    }
    Ok(sds)
}

/// Weighted-Euclidean metric from prior-predictive scales (weights `1/sd`).
pub fn scaled_metric(
    model: &Model,
    scheme: &SummaryScheme,
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<DistanceMetric> {
    let sds = prior_predictive_scales(model, scheme, m, rng)?;
    DistanceMetric::weighted(sds.into_iter().map(|sd| 1.0 / sd).collect())
}

/// Mahalanobis metric from a pilot covariance estimate at `theta_star`.
pub fn pilot_mahalanobis_metric(
    model: &Model,
    scheme: &SummaryScheme,
    theta_star: &[f64],
    m: usize,
    rng: &mut dyn RngCore,
) -> Result<DistanceMetric> {
    let est = estimate_covariance(model, scheme, theta_star, m, rng)?;
    DistanceMetric::mahalanobis(est.sigma)
}

//! Rejection samplers: standard, exact-match likelihood-free, kernel ABC,
//! quantile-threshold, and the adaptive scale-lowering sampler.
//!
//! All samplers draw from an explicit stream and are bit-reproducible
//! under a fixed seed. Acceptance draws `u` are taken from (0, 1], so the
//! smallest acceptable kernel scale is always well defined.

use std::sync::Arc;

use rand::{Rng, RngCore};

use crate::error::{Error, Result};
use crate::kernels::SmoothingKernel;
use crate::metrics::DistanceMetric;
use crate::models::Model;

/// Default ceiling on simulator calls.
pub const DEFAULT_SIM_BUDGET: u64 = 100_000_000;

/// One candidate in the adaptive sampler: its parameter, summary,
/// distance to the observed summary, acceptance draw, and acceptance
/// weight `K_h(rho)/K_h(0)` at the current scale.
#[derive(Clone, Debug)]
pub struct Particle {
    pub theta: Vec<f64>,
    pub summary: Vec<f64>,
    pub rho: f64,
    pub u: f64,
    pub weight: f64,
}

/// Accepted parameter draws plus run diagnostics.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedSample {
    pub thetas: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
    /// Kernel scale of the run (0 for exact-match and standard rejection).
    pub h_final: f64,
    /// Total simulator (or proposal, for standard rejection) calls.
    pub sims_used: u64,
    pub accept_rate: f64,
}

impl WeightedSample {
    fn from_thetas(thetas: Vec<Vec<f64>>, h_final: f64, sims_used: u64) -> Self {
        let n = thetas.len();
        let accept_rate = if sims_used > 0 {
            n as f64 / sims_used as f64
        } else {
            0.0
        };
        WeightedSample {
            weights: vec![1.0; n],
            thetas,
            h_final,
            sims_used,
            accept_rate,
        }
    }

    pub fn len(&self) -> usize {
        self.thetas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.thetas.is_empty()
    }

    /// The `j`-th coordinate of every accepted draw.
    pub fn marginal(&self, j: usize) -> Vec<f64> {
        self.thetas.iter().map(|t| t[j]).collect()
    }

    /// Simulator calls per accepted draw (the efficiency measure of the
    /// adaptive sampler studies).
    pub fn sims_per_particle(&self) -> f64 {
        self.sims_used as f64 / self.len().max(1) as f64
    }
}

/// A sampling density: draw and evaluate.
pub struct DensitySampler<'a> {
    pub sample: &'a (dyn Fn(&mut dyn RngCore) -> Vec<f64> + Sync),
    pub density: &'a (dyn Fn(&[f64]) -> f64 + Sync),
}

/// Proposal for the likelihood-free samplers. The prior is the common
/// case and needs no envelope bookkeeping; a custom proposal carries
/// `ratio_bound >= max_theta prior(theta)/g(theta)`.
pub enum Proposal<'a> {
    Prior,
    Custom {
        g: DensitySampler<'a>,
        ratio_bound: f64,
    },
}

impl Proposal<'_> {
    fn draw(&self, model: &Model, rng: &mut dyn RngCore) -> Vec<f64> {
        match self {
            Proposal::Prior => model.prior().sample(rng),
            Proposal::Custom { g, .. } => (g.sample)(rng),
        }
    }

    // prior(theta) / (ratio_bound * g(theta)), the second-stage acceptance
    // probability. Must lie in [0, 1]; larger values mean the declared
    // envelope bound is wrong and the sampler fails loudly.
    fn prior_ratio(&self, model: &Model, theta: &[f64]) -> Result<f64> {
        match self {
            Proposal::Prior => Ok(1.0),
            Proposal::Custom { g, ratio_bound } => {
                let ratio = model.prior().density(theta) / ((g.density)(theta) * ratio_bound);
                if ratio > 1.0 + 1e-9 {
                    Err(Error::EnvelopeViolation { ratio })
                } else {
                    Ok(ratio.min(1.0))
                }
            }
        }
    }
}

// Acceptance draw in (0, 1].
fn accept_draw(rng: &mut dyn RngCore) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Sample `n_accept` draws from the density `f` by rejection from `g`
/// with envelope constant `envelope >= sup f/g`.
///
/// Every proposal's ratio `f/(envelope * g)` is checked; a ratio above
/// one means the envelope is invalid and the run aborts.
pub fn standard_rejection(
    f: &dyn Fn(&[f64]) -> f64,
    g: &DensitySampler,
    envelope: f64,
    n_accept: usize,
    budget: u64,
    rng: &mut dyn RngCore,
) -> Result<WeightedSample> {
    if !(envelope > 0.0) {
        return Err(Error::InvalidParameter("envelope must be positive".into()));
    }
    let mut thetas = Vec::with_capacity(n_accept);
    let mut trials: u64 = 0;
    while thetas.len() < n_accept {
        if trials >= budget {
            return Err(Error::BudgetExceeded {
                sims_used: trials,
                accepted: thetas.len(),
                context: "standard rejection".into(),
            });
        }
        let theta = (g.sample)(rng);
        trials += 1;
        let ratio = f(&theta) / (envelope * (g.density)(&theta));
        if ratio > 1.0 + 1e-9 {
            return Err(Error::EnvelopeViolation { ratio });
        }
        if accept_draw(rng) <= ratio {
            thetas.push(theta);
        }
    }
    Ok(WeightedSample::from_thetas(thetas, 0.0, trials))
}

/// Likelihood-free rejection with exact summary matching: simulate data,
/// accept the parameter when the simulated summary equals the observed
/// one exactly (then thin by the prior/proposal ratio).
///
/// Exact matching only terminates for discrete-valued summaries; on
/// effectively continuous summaries the budget error reports the wasted
/// simulations.
pub fn lf_rejection_exact(
    model: &Model,
    scheme_id: &str,
    s_obs: &[f64],
    proposal: &Proposal,
    n_accept: usize,
    budget: u64,
    rng: &mut dyn RngCore,
) -> Result<WeightedSample> {
    let scheme = model.scheme(scheme_id)?;
    if scheme.dim() != s_obs.len() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            got: s_obs.len(),
        });
    }
    let mut thetas = Vec::with_capacity(n_accept);
    let mut sims: u64 = 0;
    while thetas.len() < n_accept {
        if sims >= budget {
            return Err(Error::BudgetExceeded {
                sims_used: sims,
                accepted: thetas.len(),
                context: format!(
                    "no exact summary match within budget (model `{}`, scheme `{scheme_id}`); \
                     continuous summaries need h > 0",
                    model.id()
                ),
            });
        }
        let theta = proposal.draw(model, rng);
        let data = model.simulate(&theta, rng);
        sims += 1;
        let Ok(s) = scheme.apply(&data) else {
            continue;
        };
        if s == s_obs {
            let ratio = proposal.prior_ratio(model, &theta)?;
            if ratio >= 1.0 || accept_draw(rng) <= ratio {
                thetas.push(theta);
            }
        }
    }
    Ok(WeightedSample::from_thetas(thetas, 0.0, sims))
}

/// Kernel ABC rejection: accept `theta` with probability
/// `K_h(rho) pi(theta) / (K g(theta))` where `rho` is the metric distance
/// between simulated and observed summaries and `K = K_h(0) ratio_bound`.
///
/// `h = 0` routes to [`lf_rejection_exact`] (the kernel limit is a point
/// mass at zero distance).
pub fn abc_rejection(
    model: &Model,
    scheme_id: &str,
    s_obs: &[f64],
    metric: &DistanceMetric,
    kernel: SmoothingKernel,
    h: f64,
    proposal: &Proposal,
    n_accept: usize,
    budget: u64,
    rng: &mut dyn RngCore,
) -> Result<WeightedSample> {
    if h < 0.0 {
        return Err(Error::InvalidScale(h));
    }
    if h == 0.0 {
        return lf_rejection_exact(model, scheme_id, s_obs, proposal, n_accept, budget, rng);
    }
    let scheme = model.scheme(scheme_id)?;
    if scheme.dim() != s_obs.len() {
        return Err(Error::DimensionMismatch {
            expected: scheme.dim(),
            got: s_obs.len(),
        });
    }
    let mut thetas = Vec::with_capacity(n_accept);
    let mut sims: u64 = 0;
    while thetas.len() < n_accept {
        if sims >= budget {
            return Err(Error::BudgetExceeded {
                sims_used: sims,
                accepted: thetas.len(),
                context: format!(
                    "ABC rejection at h = {h} (model `{}`, scheme `{scheme_id}`)",
                    model.id()
                ),
            });
        }
        let theta = proposal.draw(model, rng);
        let data = model.simulate(&theta, rng);
        sims += 1;
        let Ok(s) = scheme.apply(&data) else {
            continue;
        };
        let rho = metric.distance(&s, s_obs)?;
        let weight = kernel.acceptance_ratio(h, rho)?;
        let ratio = proposal.prior_ratio(model, &theta)?;
        if accept_draw(rng) <= weight * ratio {
            thetas.push(theta);
        }
    }
    Ok(WeightedSample::from_thetas(thetas, h, sims))
}

/// Prior-predictive rejection with a post-hoc threshold: simulate
/// `m_draws` parameter/summary pairs from the prior and keep the
/// `n_keep` closest to the observed summary. Equivalent to a uniform
/// kernel whose scale is the realized `n_keep/m_draws` distance quantile,
/// which is returned as `h_final`.
pub fn quantile_rejection(
    model: &Model,
    scheme_id: &str,
    s_obs: &[f64],
    metric: &DistanceMetric,
    m_draws: usize,
    n_keep: usize,
    rng: &mut dyn RngCore,
) -> Result<WeightedSample> {
    if n_keep == 0 || n_keep > m_draws {
        return Err(Error::InvalidParameter(format!(
            "need 0 < n_keep <= m_draws, got {n_keep} of {m_draws}"
        )));
    }
    let scheme = model.scheme(scheme_id)?;
    let mut pool: Vec<(f64, Vec<f64>)> = Vec::with_capacity(m_draws);
    for _ in 0..m_draws {
        let theta = model.prior().sample(rng);
        let data = model.simulate(&theta, rng);
        let Ok(s) = scheme.apply(&data) else {
            continue;
        };
        let rho = metric.distance(&s, s_obs)?;
        pool.push((rho, theta));
    }
    if pool.len() < n_keep {
        return Err(Error::DegenerateSample(
            "fewer valid summaries than the number of draws to keep",
        ));
    }
    pool.select_nth_unstable_by(n_keep - 1, |a, b| a.0.total_cmp(&b.0));
    pool.truncate(n_keep);
    pool.sort_by(|a, b| a.0.total_cmp(&b.0));
    let h = pool.last().unwrap().0;
    let thetas: Vec<Vec<f64>> = pool.into_iter().map(|(_, t)| t).collect();
    let mut out = WeightedSample::from_thetas(thetas, h, m_draws as u64);
    out.accept_rate = n_keep as f64 / m_draws as f64;
    Ok(out)
}

/// Termination rule for the adaptive sampler.
pub enum StopRule {
    /// Stop once the kernel scale reaches the target.
    TargetScale(f64),
    /// Stop after this many simulator calls.
    MaxSims(u64),
    /// Stop when the mean absolute gap between the particles' empirical
    /// CDF and a reference CDF falls below the threshold. Scalar
    /// parameters only.
    CdfDiscrepancy {
        cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
        threshold: f64,
    },
}

impl StopRule {
    fn satisfied(&self, h: f64, sims: u64, particles: &[Particle]) -> bool {
        match self {
            StopRule::TargetScale(target) => h <= *target,
            StopRule::MaxSims(max) => sims >= *max,
            StopRule::CdfDiscrepancy { cdf, threshold } => {
                cdf_discrepancy(particles, cdf) < *threshold
            }
        }
    }
}

/// Mean absolute gap between the empirical CDF of the particles' scalar
/// parameters and a reference CDF, evaluated at the particles.
pub fn cdf_discrepancy(particles: &[Particle], cdf: &(dyn Fn(f64) -> f64 + Send + Sync)) -> f64 {
    let mut values: Vec<f64> = particles.iter().map(|p| p.theta[0]).collect();
    values.sort_by(f64::total_cmp);
    let n = values.len() as f64;
    values
        .iter()
        .enumerate()
        .map(|(i, v)| ((i + 1) as f64 / n - cdf(*v)).abs())
        .sum::<f64>()
        / n
}

/// Result of an adaptive run: the accepted sample plus the final particle
/// states and the number of scale-lowering iterations.
pub struct AdaptiveRun {
    pub sample: WeightedSample,
    pub particles: Vec<Particle>,
    pub iterations: u64,
}

/// Adaptive ABC rejection with the prior as proposal.
///
/// A population of `n_particles` is initialized from the prior and the
/// scale `h` starts at the smallest value accepting every particle. Each
/// iteration identifies the particle that would be rejected first as `h`
/// decreases, lowers `h` to the smallest value accepting all others,
/// recomputes the weights, and regenerates the removed particle by
/// simulation until it is accepted at the new scale (its `u` is redrawn
/// with the candidate; survivors keep theirs). On termination the
/// population is distributed as a fixed-scale ABC rejection run at
/// `h_final` would be.
pub fn abc_adaptive(
    model: &Model,
    scheme_id: &str,
    s_obs: &[f64],
    metric: &DistanceMetric,
    kernel: SmoothingKernel,
    n_particles: usize,
    stop: &StopRule,
    budget: u64,
    rng: &mut dyn RngCore,
) -> Result<AdaptiveRun> {
    if n_particles < 2 {
        return Err(Error::InvalidParameter(
            "the adaptive sampler needs at least two particles".into(),
        ));
    }
    if let StopRule::CdfDiscrepancy { .. } = stop {
        if model.theta_dim() != 1 {
            return Err(Error::InvalidParameter(
                "the CDF-discrepancy rule applies to scalar parameters only".into(),
            ));
        }
    }
    let scheme = model.scheme(scheme_id)?;
    let mut sims: u64 = 0;

    let mut draw_particle = |rng: &mut dyn RngCore, sims: &mut u64| -> Result<Particle> {
        loop {
            if *sims >= budget {
                return Err(Error::BudgetExceeded {
                    sims_used: *sims,
                    accepted: 0,
                    context: "adaptive sampler initialization".into(),
                });
            }
            let theta = model.prior().sample(rng);
            let data = model.simulate(&theta, rng);
            *sims += 1;
            let Ok(summary) = scheme.apply(&data) else {
                continue;
            };
            let rho = metric.distance(&summary, s_obs)?;
            return Ok(Particle {
                theta,
                summary,
                rho,
                u: accept_draw(rng),
                weight: 1.0,
            });
        }
    };

    let mut particles = Vec::with_capacity(n_particles);
    for _ in 0..n_particles {
        particles.push(draw_particle(rng, &mut sims)?);
    }

    // Smallest h accepting everything; per-particle thresholds are the
    // smallest scales at which each particle survives its own u.
    let min_scales = |particles: &[Particle]| -> Result<Vec<f64>> {
        particles
            .iter()
            .map(|p| kernel.min_scale_to_accept(p.rho, p.u))
            .collect()
    };
    let mut scales = min_scales(&particles)?;
    let mut h = scales.iter().cloned().fold(0.0f64, f64::max).max(f64::MIN_POSITIVE);
    for p in particles.iter_mut() {
        p.weight = kernel.acceptance_ratio(h, p.rho)?;
    }

    let mut iterations: u64 = 0;
    while !stop.satisfied(h, sims, &particles) {
        // The particle that is rejected first as h falls: for the uniform
        // kernel every in-window weight is 1, so the binding particle is
        // the farthest one; otherwise the box's argmin(W - u).
        let r = if kernel == SmoothingKernel::Uniform {
            argmax_by(&particles, |p| p.rho)
        } else {
            argmin_by(&particles, |p| p.weight - p.u)
        };

        // Lowest h accepting everything except r.
        let h_new = scales
            .iter()
            .enumerate()
            .filter(|(i, _)| *i != r)
            .map(|(_, s)| *s)
            .fold(0.0f64, f64::max)
            .max(f64::MIN_POSITIVE);
        h = h_new.min(h);
        for p in particles.iter_mut() {
            p.weight = kernel.acceptance_ratio(h, p.rho)?;
        }

        // Regenerate particle r at the new scale.
        loop {
            if sims >= budget {
                return Err(Error::AdaptiveBudget {
                    sims_used: sims,
                    h,
                    particles,
                });
            }
            let theta = model.prior().sample(rng);
            let data = model.simulate(&theta, rng);
            sims += 1;
            let Ok(summary) = scheme.apply(&data) else {
                continue;
            };
            let rho = metric.distance(&summary, s_obs)?;
            let u = accept_draw(rng);
            let weight = kernel.acceptance_ratio(h, rho)?;
            if u <= weight {
                particles[r] = Particle {
                    theta,
                    summary,
                    rho,
                    u,
                    weight,
                };
                scales[r] = kernel.min_scale_to_accept(rho, u)?;
                break;
            }
        }
        iterations += 1;
    }

    let thetas: Vec<Vec<f64>> = particles.iter().map(|p| p.theta.clone()).collect();
    let mut sample = WeightedSample::from_thetas(thetas, h, sims);
    sample.accept_rate = n_particles as f64 / sims.max(1) as f64;
    Ok(AdaptiveRun {
        sample,
        particles,
        iterations,
    })
}

fn argmax_by(particles: &[Particle], key: impl Fn(&Particle) -> f64) -> usize {
    let mut best = 0;
    for i in 1..particles.len() {
        if key(&particles[i]) > key(&particles[best]) {
            best = i;
        }
    }
    best
}

fn argmin_by(particles: &[Particle], key: impl Fn(&Particle) -> f64) -> usize {
    let mut best = 0;
    for i in 1..particles.len() {
        if key(&particles[i]) < key(&particles[best]) {
            best = i;
        }
    }
    best
}

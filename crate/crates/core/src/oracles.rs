//! Closed-form and quadrature reference quantities.
//!
//! Everything here is ground truth for the samplers: smoothed likelihoods
//! and posteriors that can be written down exactly for the benchmark
//! models, a quadrature fallback that computes the same integrals
//! numerically, exact match probabilities for the two-observation binomial
//! model, and the count-mixture identity used by the stereology study.
//!
//! Gamma/erf special functions are delegated to `statrs` (Lanczos-grade
//! accuracy); the integrals themselves are evaluated with this crate's
//! adaptive Gauss–Kronrod rule so that closed forms and quadrature stay
//! independent routes.

use num_bigint::BigInt;
use num_rational::BigRational;
use statrs::distribution::{Continuous, ContinuousCDF, Normal};
use statrs::function::gamma::{gamma, gamma_lr, ln_gamma};

use crate::error::{Error, Result};
use crate::kernels::SmoothingKernel;
use crate::quadrature::integrate;

/// Width multiplier for the Gaussian kernel's effective support.
/// The normal tail beyond 12 standard deviations is below 1e-32, far
/// under every tolerance used here.
const GAUSSIAN_WINDOW: f64 = 12.0;

// ---------------------------------------------------------------------------
// Exponential likelihood with Gamma prior (uniform kernel)
// ---------------------------------------------------------------------------

/// Exponential density `theta e^(-theta y)` for `y >= 0`.
pub fn expgamma_likelihood(y: f64, theta: f64) -> f64 {
    if y < 0.0 {
        0.0
    } else {
        theta * (-theta * y).exp()
    }
}

/// Uniform-kernel smoothed likelihood of the exponential model.
///
/// For `0 < h < y` this is `(1/2h) e^(-theta y) (e^(theta h) - e^(-theta h))`;
/// for wider windows the same CDF difference is clipped at the support
/// boundary `y = 0`; `h = 0` returns the exact density.
pub fn expgamma_abc_likelihood(y: f64, theta: f64, h: f64) -> f64 {
    if h == 0.0 {
        return expgamma_likelihood(y, theta);
    }
    if h < y {
        return (-theta * y).exp() * ((theta * h).exp() - (-theta * h).exp()) / (2.0 * h);
    }
    // Window [y-h, y+h] truncated to y >= 0: P(y+h) - P(max(0, y-h)).
    let upper = 1.0 - (-theta * (y + h)).exp();
    let lower = 1.0 - (-theta * (y - h).max(0.0)).exp();
    (upper - lower) / (2.0 * h)
}

/// Second-order bias of the smoothed exponential likelihood under the
/// uniform kernel: `(1/6) h^2 theta^3 e^(-theta y)`, i.e.
/// `(1/2) h^2 sigma^2_K p''(y|theta)` with `sigma^2_K = 1/3`.
pub fn expgamma_bias2(y: f64, theta: f64, h: f64) -> f64 {
    h * h * theta.powi(3) * (-theta * y).exp() / 6.0
}

/// Normalized uniform-kernel ABC posterior for the exponential likelihood
/// with a Gamma(alpha, beta) prior:
///
/// `theta^(alpha-1) e^(-theta(y+beta)) (e^(theta h) - e^(-theta h))
///  / { Gamma(alpha) [ (y+beta-h)^-alpha - (y+beta+h)^-alpha ] }`
///
/// Requires `0 < h < y + beta` so the normalizer is finite.
pub fn expgamma_abc_posterior(theta: f64, y: f64, alpha: f64, beta: f64, h: f64) -> Result<f64> {
    let a = y + beta;
    if !(h > 0.0 && h < a) {
        return Err(Error::Domain(format!(
            "scale must satisfy 0 < h < y + beta = {a}, got {h}"
        )));
    }
    if theta <= 0.0 {
        return Ok(0.0);
    }
    let num = theta.powf(alpha - 1.0)
        * (-theta * a).exp()
        * ((theta * h).exp() - (-theta * h).exp());
    let den = gamma(alpha) * ((a - h).powf(-alpha) - (a + h).powf(-alpha));
    Ok(num / den)
}

/// Exact posterior of the exponential-Gamma pair.
///
/// The Exp(theta) density carries a factor theta, so a Gamma(alpha, beta)
/// prior updates to Gamma(alpha + 1, beta + y) on one observation — the
/// same limit the smoothed posterior reaches as h -> 0.
pub fn expgamma_true_posterior(theta: f64, y: f64, alpha: f64, beta: f64) -> f64 {
    let shape = alpha + 1.0;
    let rate = beta + y;
    if theta <= 0.0 {
        return 0.0;
    }
    (shape * rate.ln() + (shape - 1.0) * theta.ln() - rate * theta - ln_gamma(shape)).exp()
}

/// CDF of the exponential-Gamma posterior Gamma(alpha + 1, beta + y).
pub fn expgamma_true_posterior_cdf(theta: f64, y: f64, alpha: f64, beta: f64) -> f64 {
    reg_lower_gamma(alpha + 1.0, (beta + y) * theta)
}

/// Regularized lower incomplete gamma `P(a, x)`, extended to `x <= 0`.
fn reg_lower_gamma(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(a, x)
    }
}

// ---------------------------------------------------------------------------
// Gaussian location model (Gaussian kernel)
// ---------------------------------------------------------------------------

/// Prior on the Gaussian location parameter.
#[derive(Clone, Copy, Debug)]
pub enum MeanPrior {
    /// Improper flat prior.
    Flat,
    /// Normal prior with mean `m0` and standard deviation `s0`.
    Normal { m0: f64, s0: f64 },
}

/// Mean and variance of the Gaussian-kernel ABC posterior for the normal
/// location model.
///
/// The smoothed likelihood of the summary `s = mean(y_{1..n'})` is normal
/// with variance `sigma0^2/(omega n) + h^2` where `omega = n'/n`; the
/// posterior follows by conjugacy. `omega = 1` is the sufficient
/// full-mean case, `h = 0` removes the kernel inflation.
pub fn gaussian_abc_posterior_params(
    ybar: f64,
    sigma0: f64,
    n: usize,
    h: f64,
    prior: MeanPrior,
    omega: f64,
) -> Result<(f64, f64)> {
    if !(sigma0 > 0.0) || n == 0 {
        return Err(Error::InvalidParameter(
            "sigma0 must be positive and n >= 1".into(),
        ));
    }
    if !(omega > 0.0 && omega <= 1.0) {
        return Err(Error::InvalidParameter(format!(
            "omega must lie in (0, 1], got {omega}"
        )));
    }
    let lik_var = sigma0 * sigma0 / (omega * n as f64) + h * h;
    match prior {
        MeanPrior::Flat => Ok((ybar, lik_var)),
        MeanPrior::Normal { m0, s0 } => {
            if !(s0 > 0.0) {
                return Err(Error::InvalidParameter("s0 must be positive".into()));
            }
            let w_prior = 1.0 / (s0 * s0);
            let w_lik = 1.0 / lik_var;
            let var = 1.0 / (w_prior + w_lik);
            let mean = (m0 * w_prior + ybar * w_lik) * var;
            Ok((mean, var))
        }
    }
}

/// Density of the Gaussian-kernel ABC posterior (see
/// [`gaussian_abc_posterior_params`]).
pub fn gaussian_abc_posterior(
    theta: f64,
    ybar: f64,
    sigma0: f64,
    n: usize,
    h: f64,
    prior: MeanPrior,
    omega: f64,
) -> Result<f64> {
    let (mean, var) = gaussian_abc_posterior_params(ybar, sigma0, n, h, prior, omega)?;
    Ok(Normal::new(mean, var.sqrt()).unwrap().pdf(theta))
}

// ---------------------------------------------------------------------------
// Generic one-dimensional uniform-kernel posterior
// ---------------------------------------------------------------------------

/// Unnormalized uniform-kernel ABC posterior for any scalar-data model
/// with a tractable CDF: `pi(theta) [P(y+h|theta) - P(y-h|theta)] / (2h)`.
pub fn uniform_kernel_posterior_cdfdiff(
    cdf: &dyn Fn(f64, f64) -> f64,
    prior: &dyn Fn(f64) -> f64,
    theta: f64,
    y_obs: f64,
    h: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidScale(h));
    }
    Ok(prior(theta) * (cdf(y_obs + h, theta) - cdf(y_obs - h, theta)) / (2.0 * h))
}

// ---------------------------------------------------------------------------
// Exact match probabilities for the two-observation binomial model
// ---------------------------------------------------------------------------

/// Summary choices for the two-observation binomial model: the raw pair,
/// the order statistics, or the sum.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinomialScheme {
    Pair,
    Ordered,
    Sum,
}

fn big_factorial(k: u64) -> BigInt {
    let mut out = BigInt::from(1u64);
    for i in 2..=k {
        out *= i;
    }
    out
}

fn big_choose(n: u64, k: u64) -> BigInt {
    big_factorial(n) / (big_factorial(k) * big_factorial(n - k))
}

/// Beta function at positive integer arguments, exactly:
/// `B(a, b) = (a-1)! (b-1)! / (a+b-1)!`.
fn big_beta(a: u64, b: u64) -> BigRational {
    BigRational::new(
        big_factorial(a - 1) * big_factorial(b - 1),
        big_factorial(a + b - 1),
    )
}

/// Probability of exactly matching the observed summary under prior
/// predictive sampling, for two Binomial(n, theta) observations with a
/// uniform prior on theta.
///
/// For the pair `(y1, y2)`: `C(n,y1) C(n,y2) B(y1+y2+1, 2n-y1-y2+1)`.
/// Order statistics double that when the two values differ; the sum is
/// uniform over `0..=2n`, probability `1/(2n+1)`.
pub fn binomial_match_prob(scheme: BinomialScheme, s_obs: &[u64], n: u64) -> Result<BigRational> {
    let invalid = |msg: String| Err(Error::InvalidParameter(msg));
    match scheme {
        BinomialScheme::Pair | BinomialScheme::Ordered => {
            let [y1, y2] = *s_obs else {
                return invalid("pair schemes need a two-element summary".into());
            };
            if y1 > n || y2 > n {
                return invalid(format!("counts ({y1}, {y2}) exceed n = {n}"));
            }
            let base = BigRational::from(big_choose(n, y1) * big_choose(n, y2))
                * big_beta(y1 + y2 + 1, 2 * n - y1 - y2 + 1);
            let mult = if scheme == BinomialScheme::Ordered && y1 != y2 {
                2
            } else {
                1
            };
            Ok(base * BigRational::from(BigInt::from(mult)))
        }
        BinomialScheme::Sum => {
            let [s] = *s_obs else {
                return invalid("sum scheme needs a one-element summary".into());
            };
            if s > 2 * n {
                return invalid(format!("sum {s} exceeds 2n = {}", 2 * n));
            }
            Ok(BigRational::new(BigInt::from(1), BigInt::from(2 * n + 1)))
        }
    }
}

/// Floating-point value of [`binomial_match_prob`].
pub fn binomial_match_prob_f64(scheme: BinomialScheme, s_obs: &[u64], n: u64) -> Result<f64> {
    let r = binomial_match_prob(scheme, s_obs, n)?;
    let num: f64 = r.numer().to_string().parse().unwrap();
    let den: f64 = r.denom().to_string().parse().unwrap();
    Ok(num / den)
}

// ---------------------------------------------------------------------------
// Quadrature reference for smoothed likelihoods
// ---------------------------------------------------------------------------

/// Numerically integrate `K_h(|y - y_obs|) p(y)` over the kernel window,
/// clipped to the model support. The independent route against which every
/// closed form above is checked.
pub fn quadrature_abc_likelihood(
    pdf: &dyn Fn(f64) -> f64,
    y_obs: f64,
    kernel: SmoothingKernel,
    h: f64,
    support: (f64, f64),
    rel_tol: f64,
) -> Result<f64> {
    if !(h > 0.0) {
        return Err(Error::InvalidScale(h));
    }
    let half_window = if kernel.is_compact() {
        h
    } else {
        GAUSSIAN_WINDOW * h
    };
    let lo = (y_obs - half_window).max(support.0);
    let hi = (y_obs + half_window).min(support.1);
    if lo >= hi {
        return Ok(0.0);
    }
    integrate(
        &|y| kernel.eval_scaled(h, y - y_obs).unwrap() * pdf(y),
        lo,
        hi,
        rel_tol,
    )
}

// ---------------------------------------------------------------------------
// Posterior bias decomposition
// ---------------------------------------------------------------------------

/// Ingredients for the pointwise posterior bias of a scalar model:
/// likelihood, its second derivative in `y`, prior, and integration
/// supports for the normalizing constants.
pub struct BiasModel<'a> {
    pub likelihood: &'a dyn Fn(f64, f64) -> f64,
    pub likelihood_dd: &'a dyn Fn(f64, f64) -> f64,
    pub prior: &'a dyn Fn(f64) -> f64,
    pub theta_support: (f64, f64),
    pub y_support: (f64, f64),
}

/// Exact and second-order pointwise posterior bias at `theta`.
#[derive(Clone, Copy, Debug)]
pub struct PosteriorBias {
    /// `pi_ABC(theta|y) - pi(theta|y)`.
    pub exact: f64,
    /// Same quantity with the second-order likelihood bias substituted.
    pub second_order: f64,
}

/// Decompose the ABC posterior error at one `theta`:
/// the exact bias is the difference of the two normalized posteriors, and
/// its second-order form replaces the smoothed-likelihood error with
/// `(1/2) h^2 sigma^2_K p''(y|theta)`, split as
/// `b pi / c_ABC + pi(theta|y)(c/c_ABC - 1)`.
pub fn posterior_bias(
    model: &BiasModel,
    kernel: SmoothingKernel,
    theta: f64,
    y_obs: f64,
    h: f64,
) -> Result<PosteriorBias> {
    let p_abc = |th: f64| {
        quadrature_abc_likelihood(&|y| (model.likelihood)(y, th), y_obs, kernel, h, model.y_support, 1e-10)
    };
    let (t_lo, t_hi) = model.theta_support;
    let c = integrate(
        &|th| (model.likelihood)(y_obs, th) * (model.prior)(th),
        t_lo,
        t_hi,
        1e-10,
    )?;
    let c_abc = integrate(&|th| p_abc(th).unwrap_or(0.0) * (model.prior)(th), t_lo, t_hi, 1e-8)?;

    let prior_here = (model.prior)(theta);
    let p_here = (model.likelihood)(y_obs, theta);
    let posterior_here = p_here * prior_here / c;

    let exact = p_abc(theta)? * prior_here / c_abc - posterior_here;
    let b_hat = 0.5 * h * h * kernel.variance() * (model.likelihood_dd)(y_obs, theta);
    let second_order = b_hat * prior_here / c_abc + posterior_here * (c / c_abc - 1.0);
    Ok(PosteriorBias {
        exact,
        second_order,
    })
}

// ---------------------------------------------------------------------------
// Truncated reference distributions
// ---------------------------------------------------------------------------

/// Gamma(shape, rate) restricted to `(lo, hi)`.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedGamma {
    shape: f64,
    rate: f64,
    lo: f64,
    hi: f64,
    mass: f64,
}

impl TruncatedGamma {
    pub fn new(shape: f64, rate: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(shape > 0.0 && rate > 0.0 && lo >= 0.0 && hi > lo) {
            return Err(Error::InvalidParameter(format!(
                "truncated Gamma needs shape, rate > 0 and 0 <= lo < hi, got ({shape}, {rate}, {lo}, {hi})"
            )));
        }
        let mass = reg_lower_gamma(shape, rate * hi) - reg_lower_gamma(shape, rate * lo);
        if !(mass > 0.0) {
            return Err(Error::DegenerateMixture);
        }
        Ok(Self {
            shape,
            rate,
            lo,
            hi,
            mass,
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi || x <= 0.0 {
            return 0.0;
        }
        (self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln()
            - self.rate * x
            - ln_gamma(self.shape))
        .exp()
            / self.mass
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            0.0
        } else if x >= self.hi {
            1.0
        } else {
            (reg_lower_gamma(self.shape, self.rate * x)
                - reg_lower_gamma(self.shape, self.rate * self.lo))
                / self.mass
        }
    }
}

/// Normal(mean, sd^2) restricted to `(lo, hi)`.
#[derive(Clone, Copy, Debug)]
pub struct TruncatedNormal {
    mean: f64,
    sd: f64,
    lo: f64,
    hi: f64,
    mass: f64,
}

impl TruncatedNormal {
    pub fn new(mean: f64, sd: f64, lo: f64, hi: f64) -> Result<Self> {
        if !(sd > 0.0 && hi > lo) {
            return Err(Error::InvalidParameter(
                "truncated normal needs sd > 0 and lo < hi".into(),
            ));
        }
        let base = Normal::new(mean, sd).unwrap();
        let mass = base.cdf(hi) - base.cdf(lo);
        if !(mass > 0.0) {
            return Err(Error::InvalidParameter(
                "truncation interval carries no mass".into(),
            ));
        }
        Ok(Self {
            mean,
            sd,
            lo,
            hi,
            mass,
        })
    }

    pub fn pdf(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            return 0.0;
        }
        Normal::new(self.mean, self.sd).unwrap().pdf(x) / self.mass
    }

    pub fn cdf(&self, x: f64) -> f64 {
        if x <= self.lo {
            return 0.0;
        }
        if x >= self.hi {
            return 1.0;
        }
        let base = Normal::new(self.mean, self.sd).unwrap();
        (base.cdf(x) - base.cdf(self.lo)) / self.mass
    }
}

// ---------------------------------------------------------------------------
// Discrete count-mixture posterior (stereology)
// ---------------------------------------------------------------------------

/// Conjugate machinery for a count observation `n | lambda ~ Poisson(c lambda)`
/// with `lambda ~ U(0, hi)`: the posterior is Gamma(n+1, c) truncated to
/// the prior support, and the prior predictive count probabilities have
/// the closed form `Pr(n) = P(n+1, c hi) / (c hi)` with `P` the regularized
/// lower incomplete gamma.
#[derive(Clone, Copy, Debug)]
pub struct CountPosterior {
    pub rate_coeff: f64,
    pub prior_hi: f64,
}

impl CountPosterior {
    pub fn new(rate_coeff: f64, prior_hi: f64) -> Result<Self> {
        if !(rate_coeff > 0.0 && prior_hi > 0.0) {
            return Err(Error::InvalidParameter(
                "count posterior needs positive rate coefficient and prior bound".into(),
            ));
        }
        Ok(Self {
            rate_coeff,
            prior_hi,
        })
    }

    /// Exact posterior `pi(lambda | n)`.
    pub fn posterior(&self, n: u64) -> Result<TruncatedGamma> {
        TruncatedGamma::new(n as f64 + 1.0, self.rate_coeff, 0.0, self.prior_hi)
    }

    /// Prior predictive probability `Pr(N = n)`.
    pub fn count_prob(&self, n: u64) -> f64 {
        let scale = self.rate_coeff * self.prior_hi;
        reg_lower_gamma(n as f64 + 1.0, scale) / scale
    }
}

/// The uniform-kernel count posterior as a weighted mixture: conditioning
/// on `|n - n_obs| <= h` averages the exact posteriors `pi(lambda | n_obs + k)`
/// with prior-predictive weights, normalized over the admissible window.
pub fn discrete_mixture_posterior(
    lambda: f64,
    n_obs: u64,
    h: f64,
    counts: &CountPosterior,
) -> Result<f64> {
    mixture_eval(n_obs, h, counts, |tg| tg.pdf(lambda))
}

/// CDF companion of [`discrete_mixture_posterior`].
pub fn discrete_mixture_posterior_cdf(
    lambda: f64,
    n_obs: u64,
    h: f64,
    counts: &CountPosterior,
) -> Result<f64> {
    mixture_eval(n_obs, h, counts, |tg| tg.cdf(lambda))
}

fn mixture_eval(
    n_obs: u64,
    h: f64,
    counts: &CountPosterior,
    f: impl Fn(&TruncatedGamma) -> f64,
) -> Result<f64> {
    if h < 0.0 {
        return Err(Error::Domain(format!("window must be >= 0, got {h}")));
    }
    let h_star = h.floor() as u64;
    let lo = n_obs.saturating_sub(h_star);
    let hi = n_obs + h_star;
    let mut weight_sum = 0.0;
    let mut value = 0.0;
    for k in lo..=hi {
        let w = counts.count_prob(k);
        if w > 0.0 {
            value += w * f(&counts.posterior(k)?);
            weight_sum += w;
        }
    }
    if weight_sum <= 0.0 {
        return Err(Error::DegenerateMixture);
    }
    Ok(value / weight_sum)
}

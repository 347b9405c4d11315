//! Spherical inclusions observed through a planar cross-section.
//!
//! Sphere centres follow a homogeneous Poisson process with rate `lambda`
//! per unit volume; diameters above the threshold `v0` follow a
//! generalized Pareto distribution. A sphere of diameter `V` intersects
//! the unit-area sampling plane with probability proportional to `V`
//! (its centre must lie within `V/2` of the plane), so intersecting
//! spheres have the size-biased diameter density `v f(v) / E[V]`, and the
//! observed cross-section of such a sphere at a uniform relative offset
//! `U` is the chord `y = V sqrt(1 - U^2)`. Only cross-sections exceeding
//! the measurement threshold `v0` are recorded, which makes the observed
//! count `n | lambda ~ Poisson(c lambda)` with a geometry constant `c`
//! exposed through [`calibrate_count_rate`].

use std::sync::LazyLock;

use rand::{Rng, RngCore};
use rand_distr::{Distribution, Poisson};

use super::{Dataset, Model, Prior, SummaryScheme};
use crate::error::{Error, Result};
use crate::rng::stream;

/// Poisson rate, GPD scale/shape, and the threshold diameter.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct InclusionParams {
    pub lambda: f64,
    pub sigma: f64,
    pub xi: f64,
    pub v0: f64,
}

impl InclusionParams {
    pub fn new(lambda: f64, sigma: f64, xi: f64, v0: f64) -> Result<Self> {
        if !(lambda >= 0.0) || !(sigma > 0.0) || !(v0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "inclusion model needs lambda >= 0, sigma > 0, v0 > 0; got ({lambda}, {sigma}, {v0})"
            )));
        }
        if !(xi >= 0.0 && xi < 1.0) {
            return Err(Error::InvalidParameter(format!(
                "GPD shape must lie in [0, 1) for a finite mean, got {xi}"
            )));
        }
        Ok(Self {
            lambda,
            sigma,
            xi,
            v0,
        })
    }

    /// Default geometry: sigma = 1.5, xi = 0.1, v0 = 5.
    pub fn with_rate(lambda: f64) -> Result<Self> {
        Self::new(lambda, 1.5, 0.1, 5.0)
    }

    /// Mean true diameter `E[V] = v0 + sigma / (1 - xi)`.
    pub fn mean_diameter(&self) -> f64 {
        self.v0 + self.sigma / (1.0 - self.xi)
    }
}

// Plain GPD excess above the threshold, by inverse CDF.
fn gpd_excess(sigma: f64, xi: f64, rng: &mut dyn RngCore) -> f64 {
    let w: f64 = rng.random();
    if xi < 1e-12 {
        -sigma * w.ln()
    } else {
        sigma * (w.powf(-xi) - 1.0) / xi
    }
}

// Excess drawn from the length-biased density x f(x) / E[X]. On the
// survival scale t = (1 + xi x / sigma)^(-1/xi) the target CDF is
// G(t) = (t^(1-xi) - (1-xi) t) / xi  (limit t - t ln t as xi -> 0),
// inverted by bisection.
fn size_biased_excess(sigma: f64, xi: f64, rng: &mut dyn RngCore) -> f64 {
    let w: f64 = rng.random();
    let g = |t: f64| {
        if xi < 1e-12 {
            t - t * t.ln()
        } else {
            (t.powf(1.0 - xi) - (1.0 - xi) * t) / xi
        }
    };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if g(mid) < w {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let t = 0.5 * (lo + hi);
    if xi < 1e-12 {
        -sigma * t.ln()
    } else {
        sigma * (t.powf(-xi) - 1.0) / xi
    }
}

// Diameter of a plane-intersecting sphere: size-biased V = v0 + X. The
// density v f(v) splits as v0 f(v) + x f(x), giving a two-component
// mixture with weights v0 and E[X].
fn size_biased_diameter(p: &InclusionParams, rng: &mut dyn RngCore) -> f64 {
    let mean_excess = p.sigma / (1.0 - p.xi);
    let w: f64 = rng.random();
    let excess = if w < p.v0 / (p.v0 + mean_excess) {
        gpd_excess(p.sigma, p.xi, rng)
    } else {
        size_biased_excess(p.sigma, p.xi, rng)
    };
    p.v0 + excess
}

/// Simulate the observed cross-section diameters for a unit-area planar
/// slice: a Poisson(`lambda E[V]`) number of intersecting spheres, each
/// contributing a chord `V sqrt(1 - U^2)` that is recorded when it
/// exceeds the threshold.
pub fn inclusion_simulate(p: &InclusionParams, rng: &mut dyn RngCore) -> Vec<f64> {
    let mean_hits = p.lambda * p.mean_diameter();
    let hits = if mean_hits > 0.0 {
        Poisson::new(mean_hits).unwrap().sample(rng) as usize
    } else {
        0
    };
    let mut out = Vec::new();
    for _ in 0..hits {
        let v = size_biased_diameter(p, rng);
        let u: f64 = rng.random();
        let y = v * (1.0 - u * u).sqrt();
        if y > p.v0 {
            out.push(y);
        }
    }
    out
}

/// Estimate the effective count rate `c` in `E[n | lambda] = c lambda` by
/// brute-force simulation at `lambda = 1` (the geometry fields of `p` are
/// used; its rate is ignored).
pub fn calibrate_count_rate(p: &InclusionParams, sims: u64, rng: &mut dyn RngCore) -> Result<f64> {
    if sims == 0 {
        return Err(Error::InvalidParameter("need at least one simulation".into()));
    }
    let unit = InclusionParams { lambda: 1.0, ..*p };
    let total: u64 = (0..sims)
        .map(|_| inclusion_simulate(&unit, rng).len() as u64)
        .sum();
    Ok(total as f64 / sims as f64)
}

const PRIOR_HI: f64 = 100.0;

// Canonical observed dataset, simulated once at lambda = 50 from a fixed
// stream; the sufficient count summary is its length.
static OBSERVED: LazyLock<Vec<f64>> = LazyLock::new(|| {
    let p = InclusionParams::with_rate(50.0).unwrap();
    inclusion_simulate(&p, &mut stream(0x73_70_68_65_72_65))
});

/// Catalog model: `lambda ~ U(0, 100)` with the default geometry, and the
/// sufficient count summary `s = n`.
pub fn model() -> Model {
    let prior = Prior::new(
        |rng: &mut dyn RngCore| vec![rng.random_range(0.0..PRIOR_HI)],
        |theta: &[f64]| {
            if (0.0..PRIOR_HI).contains(&theta[0]) {
                1.0 / PRIOR_HI
            } else {
                0.0
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| {
        let p = InclusionParams::with_rate(theta[0].max(0.0)).unwrap();
        Dataset::Reals(inclusion_simulate(&p, rng))
    };
    let schemes = vec![SummaryScheme::new("count", 1, |d: &Dataset| {
        Ok(vec![d.as_reals()?.len() as f64])
    })];
    Model::new(
        "spherical-inclusions",
        1,
        prior,
        simulate,
        schemes,
        Dataset::Reals(OBSERVED.clone()),
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn mean_diameter_formula() {
        let p = InclusionParams::with_rate(1.0).unwrap();
        assert!((p.mean_diameter() - (5.0 + 1.5 / 0.9)).abs() < 1e-12);
    }

    #[test]
    fn zero_rate_yields_no_observations() {
        let p = InclusionParams::with_rate(0.0).unwrap();
        assert!(inclusion_simulate(&p, &mut stream(1)).is_empty());
    }

    #[test]
    fn size_biased_diameter_mean_matches_moment_ratio() {
        // E[V_sb] = E[V^2] / E[V] with V = v0 + X, X ~ GPD(sigma, xi):
        // E[X] = sigma/(1-xi), E[X^2] = 2 sigma^2 / ((1-xi)(1-2xi)).
        let p = InclusionParams::with_rate(1.0).unwrap();
        let (v0, sigma, xi) = (p.v0, p.sigma, p.xi);
        let ex = sigma / (1.0 - xi);
        let ex2 = 2.0 * sigma * sigma / ((1.0 - xi) * (1.0 - 2.0 * xi));
        let ev = v0 + ex;
        let ev2 = v0 * v0 + 2.0 * v0 * ex + ex2;
        let expect = ev2 / ev;

        let mut rng = stream(2);
        let reps = 200_000;
        let mean: f64 = (0..reps)
            .map(|_| size_biased_diameter(&p, &mut rng))
            .sum::<f64>()
            / reps as f64;
        assert!((mean - expect).abs() < 0.02, "{mean} vs {expect}");
    }

    #[test]
    fn observed_count_scales_linearly_in_rate() {
        // Calibrate c at lambda = 1 and check E[n | lambda = 4] = 4c.
        let p = InclusionParams::with_rate(1.0).unwrap();
        let c = calibrate_count_rate(&p, 100_000, &mut substream(3, 0)).unwrap();
        assert!(c > 0.0);

        let p4 = InclusionParams::with_rate(4.0).unwrap();
        let reps = 50_000u64;
        let mut rng = substream(3, 1);
        let mean: f64 = (0..reps)
            .map(|_| inclusion_simulate(&p4, &mut rng).len() as f64)
            .sum::<f64>()
            / reps as f64;
        // Poisson sd at mean 4c over reps draws, 4 sigma slack.
        let slack = 4.0 * (4.0 * c / reps as f64).sqrt() + 4.0 * c / 100.0;
        assert!((mean - 4.0 * c).abs() < slack, "{mean} vs {}", 4.0 * c);
    }

    #[test]
    fn catalog_observed_count_is_stable() {
        let model = model();
        let s = model.observed_summary("count").unwrap();
        assert_eq!(s, model.observed_summary("count").unwrap());
        assert!(s[0] > 0.0);
    }
}

//! Generative models and their summary-statistic schemes.
//!
//! A [`Model`] bundles a prior (sampler and density), a data simulator,
//! one or more named summary schemes, a canonical observed dataset, and —
//! for the benchmark models — the exact posterior given that dataset.
//! Samplers only ever touch models through this interface, so anything
//! with a prior and a simulator can be plugged into the toolkit.

mod gandk;
mod inclusions;
mod simple;

pub use gandk::{gk_octile_summaries, gk_quantile, gk_simulate, GandKParams};
pub use inclusions::{calibrate_count_rate, inclusion_simulate, InclusionParams};
pub use simple::{split_means_cov_s1, split_means_cov_s2};

use std::sync::Arc;

use rand::RngCore;

use crate::coalescent::SeqMatrix;
use crate::error::{Error, Result};

/// A simulated or observed dataset.
#[derive(Clone, Debug, PartialEq)]
pub enum Dataset {
    /// A vector of real observations (counts are stored as exact floats).
    Reals(Vec<f64>),
    /// An infinite-sites sequence sample.
    Seqs(SeqMatrix),
}

impl Dataset {
    pub fn as_reals(&self) -> Result<&[f64]> {
        match self {
            Dataset::Reals(v) => Ok(v),
            Dataset::Seqs(_) => Err(Error::Domain(
                "expected a real-valued dataset, got sequences".into(),
            )),
        }
    }

    pub fn as_seqs(&self) -> Result<&SeqMatrix> {
        match self {
            Dataset::Seqs(m) => Ok(m),
            Dataset::Reals(_) => Err(Error::Domain(
                "expected a sequence dataset, got reals".into(),
            )),
        }
    }
}

type SchemeFn = dyn Fn(&Dataset) -> Result<Vec<f64>> + Send + Sync;

/// A named, pure map from datasets to summary vectors.
pub struct SummaryScheme {
    id: &'static str,
    dim: usize,
    f: Box<SchemeFn>,
}

impl SummaryScheme {
    pub fn new(
        id: &'static str,
        dim: usize,
        f: impl Fn(&Dataset) -> Result<Vec<f64>> + Send + Sync + 'static,
    ) -> Self {
        Self {
            id,
            dim,
            f: Box::new(f),
        }
    }

    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn apply(&self, data: &Dataset) -> Result<Vec<f64>> {
        (self.f)(data)
    }
}

type SampleFn = dyn Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync;
type DensityFn = dyn Fn(&[f64]) -> f64 + Send + Sync;
type SimulateFn = dyn Fn(&[f64], &mut dyn RngCore) -> Dataset + Send + Sync;

/// Prior distribution: a sampler and its density.
pub struct Prior {
    sample: Box<SampleFn>,
    density: Box<DensityFn>,
}

impl Prior {
    pub fn new(
        sample: impl Fn(&mut dyn RngCore) -> Vec<f64> + Send + Sync + 'static,
        density: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        Self {
            sample: Box::new(sample),
            density: Box::new(density),
        }
    }

    pub fn sample(&self, rng: &mut dyn RngCore) -> Vec<f64> {
        (self.sample)(rng)
    }

    pub fn density(&self, theta: &[f64]) -> f64 {
        (self.density)(theta)
    }
}

/// Exact posterior (density and CDF) of a scalar parameter given the
/// model's canonical observed data.
#[derive(Clone)]
pub struct PosteriorOracle {
    pub density: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    pub cdf: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
}

/// A generative model with named summary schemes.
pub struct Model {
    id: &'static str,
    theta_dim: usize,
    prior: Prior,
    simulate: Box<SimulateFn>,
    schemes: Vec<SummaryScheme>,
    observed: Dataset,
    oracle: Option<PosteriorOracle>,
}

impl Model {
    pub fn new(
        id: &'static str,
        theta_dim: usize,
        prior: Prior,
        simulate: impl Fn(&[f64], &mut dyn RngCore) -> Dataset + Send + Sync + 'static,
        schemes: Vec<SummaryScheme>,
        observed: Dataset,
        oracle: Option<PosteriorOracle>,
    ) -> Self {
        Self {
            id,
            theta_dim,
            prior,
            simulate: Box::new(simulate),
            schemes,
            observed,
            oracle,
        }
    }

    pub fn id(&self) -> &'static str {
        self.id
    }

    pub fn theta_dim(&self) -> usize {
        self.theta_dim
    }

    pub fn prior(&self) -> &Prior {
        &self.prior
    }

    pub fn observed(&self) -> &Dataset {
        &self.observed
    }

    pub fn oracle(&self) -> Option<&PosteriorOracle> {
        self.oracle.as_ref()
    }

    pub fn simulate(&self, theta: &[f64], rng: &mut dyn RngCore) -> Dataset {
        (self.simulate)(theta, rng)
    }

    pub fn scheme(&self, id: &str) -> Result<&SummaryScheme> {
        self.schemes
            .iter()
            .find(|s| s.id == id)
            .ok_or_else(|| Error::UnknownScheme {
                model: self.id.into(),
                scheme: id.into(),
            })
    }

    pub fn scheme_ids(&self) -> Vec<&'static str> {
        self.schemes.iter().map(|s| s.id).collect()
    }

    pub fn summarize(&self, scheme_id: &str, data: &Dataset) -> Result<Vec<f64>> {
        self.scheme(scheme_id)?.apply(data)
    }

    /// Summary of the canonical observed dataset.
    pub fn observed_summary(&self, scheme_id: &str) -> Result<Vec<f64>> {
        self.summarize(scheme_id, &self.observed)
    }

    /// Simulate a dataset at `theta` and summarize it in one step.
    pub fn simulate_summary(
        &self,
        scheme: &SummaryScheme,
        theta: &[f64],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<f64>> {
        scheme.apply(&self.simulate(theta, rng))
    }
}

/// Ids of the built-in models.
pub const BUILTIN_MODELS: [&str; 7] = [
    "binomial-pair",
    "exp-gamma",
    "gaussian-known-var",
    "poisson-gamma",
    "gaussian-split-means",
    "gandk",
    "spherical-inclusions",
];

/// Construct a built-in model by id.
pub fn builtin(id: &str) -> Result<Model> {
    match id {
        "binomial-pair" => Ok(simple::binomial_pair()),
        "exp-gamma" => Ok(simple::exp_gamma()),
        "gaussian-known-var" => Ok(simple::gaussian_known_var()),
        "poisson-gamma" => Ok(simple::poisson_gamma()),
        "gaussian-split-means" => Ok(simple::gaussian_split_means()),
        "gandk" => Ok(gandk::model()),
        "spherical-inclusions" => Ok(inclusions::model()),
        "coalescent-growth" => Ok(coalescent_growth()),
        other => Err(Error::UnknownModel(other.into())),
    }
}

/// All built-in models, including the coalescent.
pub fn builtin_models() -> Vec<Model> {
    let mut out: Vec<Model> = BUILTIN_MODELS.iter().map(|id| builtin(id).unwrap()).collect();
    out.push(coalescent_growth());
    out
}

/// Exponential-growth coalescent model: 30 sequences, independent
/// U(0, 200) priors on the scaled mutation rate and the ms-style growth
/// rate, summarized by `(pi0, S, D, H0)`. The observed data are the
/// printed expansion-simulation sequences.
fn coalescent_growth() -> Model {
    use crate::coalescent::{
        parse_seq_table, simulate_sample, summarize_seqs, GrowthParams, EXPANSION_SIM_TABLE,
    };
    const N_SEQS: u32 = 30;
    let prior = Prior::new(
        |rng: &mut dyn RngCore| {
            use rand::Rng;
            vec![rng.random_range(0.0..200.0), rng.random_range(0.0..200.0)]
        },
        |theta: &[f64]| {
            if theta.iter().all(|t| (0.0..200.0).contains(t)) {
                1.0 / (200.0 * 200.0)
            } else {
                0.0
            }
        },
    );
    let simulate = |theta: &[f64], rng: &mut dyn RngCore| -> Dataset {
        let params = GrowthParams::from_ms_alpha(theta[0].max(1e-9), theta[1].max(0.0))
            .expect("prior support yields valid growth parameters");
        Dataset::Seqs(simulate_sample(N_SEQS, &params, rng).expect("theta0 > 0"))
    };
    let stats = SummaryScheme::new("stats", 4, |data: &Dataset| {
        summarize_seqs(data.as_seqs()?)?.as_vec().map(|a| a.to_vec())
    });
    let observed = Dataset::Seqs(parse_seq_table(EXPANSION_SIM_TABLE).unwrap());
    Model::new(
        "coalescent-growth",
        2,
        prior,
        simulate,
        vec![stats],
        observed,
        None,
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn catalog_resolves_all_ids() {
        for id in BUILTIN_MODELS {
            let model = builtin(id).unwrap();
            assert_eq!(model.id(), id);
            assert!(!model.scheme_ids().is_empty());
        }
        assert!(matches!(
            builtin("nope"),
            Err(Error::UnknownModel(_))
        ));
    }

    #[test]
    fn observed_summaries_are_computable() {
        for model in builtin_models() {
            for scheme in model.scheme_ids() {
                let s = model.observed_summary(scheme).unwrap();
                assert_eq!(s.len(), model.scheme(scheme).unwrap().dim());
                assert!(s.iter().all(|x| x.is_finite()));
            }
        }
    }

    #[test]
    fn simulation_is_reproducible_under_a_seed() {
        for model in builtin_models() {
            let theta = model.prior().sample(&mut stream(11));
            let a = model.simulate(&theta, &mut stream(12));
            let b = model.simulate(&theta, &mut stream(12));
            assert_eq!(a, b, "{}", model.id());
        }
    }

    #[test]
    fn coalescent_growth_summary_matches_published_values() {
        let model = builtin("coalescent-growth").unwrap();
        let s = model.observed_summary("stats").unwrap();
        assert!((s[0] - 5.90).abs() < 0.01);
        assert_eq!(s[1], 42.0);
        assert!((s[2] - -1.64).abs() < 0.01);
        assert!((s[3] - 3.67).abs() < 0.01);
    }
}

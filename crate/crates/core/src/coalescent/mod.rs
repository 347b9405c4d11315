//! Kingman coalescent with exponential growth and infinite-sites mutation.
//!
//! Genealogies are simulated backwards in time, in units of `2 N0`
//! generations, for a population whose size shrinks into the past as
//! `N(t) = N0 exp(-beta t)`. Mutations are dropped on the tree at rate
//! `theta0 / 2` per unit branch length; under the infinite-sites model
//! every mutation creates a fresh segregating column.

mod seq;
mod stats;

pub use seq::{parse_seq_table, write_seq_table, SeqMatrix};
pub use stats::{summarize_seqs, SeqSummary};

use rand::Rng;
use rand::RngCore;
use rand_distr::{Distribution, Exp1, Poisson};

use crate::error::{Error, Result};

/// Mutation and growth parameters.
///
/// `theta0 = 4 N0 mu` is the scaled mutation rate; `beta = 2 N0 b` is the
/// growth rate with time measured in units of `2 N0` generations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GrowthParams {
    pub theta0: f64,
    pub beta: f64,
}

impl GrowthParams {
    pub fn new(theta0: f64, beta: f64) -> Result<Self> {
        if !(theta0 > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "theta0 must be positive, got {theta0}"
            )));
        }
        if !(beta >= 0.0) {
            return Err(Error::InvalidParameter(format!(
                "growth rate must be non-negative, got {beta}"
            )));
        }
        Ok(Self { theta0, beta })
    }

    /// Build from an `ms`-style growth rate. `ms` measures time in units
    /// of `4 N0` generations, so its growth parameter is `alpha = 4 N0 b`,
    /// twice ours: `beta = alpha / 2`.
    pub fn from_ms_alpha(theta0: f64, alpha: f64) -> Result<Self> {
        Self::new(theta0, alpha / 2.0)
    }
}

/// One branch of a realized genealogy: its length (in `2 N0` units) and
/// the leaves below it.
#[derive(Clone, Debug)]
pub struct Branch {
    pub length: f64,
    pub leaves: Vec<u32>,
}

/// A realized genealogy of `n` leaves: the `2n - 2` branches below the
/// root, plus the tree height.
#[derive(Clone, Debug)]
pub struct Genealogy {
    pub n: u32,
    pub branches: Vec<Branch>,
    pub height: f64,
}

impl Genealogy {
    pub fn total_length(&self) -> f64 {
        self.branches.iter().map(|b| b.length).sum()
    }
}

/// Simulate a coalescent genealogy for `n >= 2` sequences.
///
/// With `k` lineages at time `t0`, the next coalescence happens at
/// `t = t0 + ln(1 + beta E e^(-beta t0) / C(k,2)) / beta` with
/// `E ~ Exp(1)`, the closed-form inversion of the time-rescaled pair
/// coalescence hazard `C(k,2) e^(beta t)`. `beta = 0` reduces to the
/// standard `Exp(C(k,2))` waits.
pub fn simulate_genealogy(n: u32, params: &GrowthParams, rng: &mut dyn RngCore) -> Genealogy {
    assert!(n >= 2, "a genealogy needs at least two sequences");
    let beta = params.beta;

    struct Lineage {
        birth: f64,
        leaves: Vec<u32>,
    }

    let mut active: Vec<Lineage> = (0..n)
        .map(|i| Lineage {
            birth: 0.0,
            leaves: vec![i],
        })
        .collect();
    let mut branches = Vec::with_capacity(2 * n as usize - 2);
    let mut t = 0.0_f64;

    while active.len() > 1 {
        let k = active.len() as f64;
        let rate = k * (k - 1.0) / 2.0;
        let e: f64 = Exp1.sample(rng);
        t = if beta > 0.0 {
            t + (beta * e / rate * (-beta * t).exp()).ln_1p() / beta
        } else {
            t + e / rate
        };

        let i = rng.random_range(0..active.len());
        let mut j = rng.random_range(0..active.len() - 1);
        if j >= i {
            j += 1;
        }
        let (i, j) = (i.min(j), i.max(j));

        let second = active.swap_remove(j);
        let first = active.swap_remove(i);
        let mut leaves = first.leaves.clone();
        leaves.extend_from_slice(&second.leaves);
        leaves.sort_unstable();
        for lineage in [first, second] {
            branches.push(Branch {
                length: t - lineage.birth,
                leaves: lineage.leaves,
            });
        }
        active.push(Lineage { birth: t, leaves });
    }

    Genealogy {
        n,
        branches,
        height: t,
    }
}

/// Drop infinite-sites mutations on a genealogy.
///
/// The mutation count is `Poisson(theta0/2 * total length)`; each mutation
/// lands uniformly on total branch length and marks the leaves below its
/// branch as derived. Columns appear in mutation order.
pub fn drop_mutations(tree: &Genealogy, theta0: f64, rng: &mut dyn RngCore) -> Result<SeqMatrix> {
    if !(theta0 > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "theta0 must be positive, got {theta0}"
        )));
    }
    let total = tree.total_length();
    let mean = theta0 / 2.0 * total;
    let count = if mean > 0.0 {
        Poisson::new(mean)
            .map_err(|e| Error::InvalidParameter(format!("mutation rate: {e}")))?
            .sample(rng) as usize
    } else {
        0
    };

    let mut cumulative = Vec::with_capacity(tree.branches.len());
    let mut acc = 0.0;
    for branch in &tree.branches {
        acc += branch.length;
        cumulative.push(acc);
    }

    let mut columns = Vec::with_capacity(count);
    for _ in 0..count {
        let x: f64 = rng.random::<f64>() * total;
        let idx = cumulative.partition_point(|&c| c < x);
        let idx = idx.min(tree.branches.len() - 1);
        columns.push(tree.branches[idx].leaves.clone());
    }
    Ok(SeqMatrix::from_columns(tree.n, &columns))
}

/// Simulate a sequence sample in one step.
pub fn simulate_sample(n: u32, params: &GrowthParams, rng: &mut dyn RngCore) -> Result<SeqMatrix> {
    let tree = simulate_genealogy(n, params, rng);
    drop_mutations(&tree, params.theta0, rng)
}

/// Simulated infinite-sites data for a sample of 30 sequences from an
/// exponentially expanding population (42 segregating sites).
pub const EXPANSION_SIM_TABLE: &str = "\
1 : 000000000000000000000001000100000000000000
1 : 000000000000000000001010001000000000101001
1 : 000000000000000100000010001000010000101001
5 : 000000100000100000000000000000000000000000
1 : 000000100000100000000000000000001000000000
2 : 000000100000100000000000000001000000000000
1 : 000000100000100000000000000010000000000000
2 : 000000100000100001000000000000000000000000
2 : 000000100000100010000000000000000000000000
1 : 000000100001100001000000000000000000000000
1 : 000000100100100000100000000000000001000000
1 : 000000100100100000110000000000000000000000
1 : 000000101000100000000100100000000000000110
2 : 000001100010010000000000000000000000000000
2 : 000010010000000000000001010000000000010000
2 : 000100000000000000000000001000100000001000
1 : 001000000000001000000000001000000110101000
1 : 010000100000100000000000000000000000000000
2 : 100000000000000000000010001000000000101001
";

/// Sequence data from locus 9pMB8 in 11 Biaka individuals (22 sequences,
/// 42 segregating sites), Hammer et al. (2010).
pub const BIAKA_9PMB8_TABLE: &str = "\
1 : 000000000000000000000000000000000010100001
1 : 000000000000000000000000001000000000000010
1 : 000000000000000000000001010100111001000100
4 : 000000000000000011010000000100000000000000
1 : 000000000000000111010010000100000100000000
4 : 000000000000000111010010000101000100000000
1 : 000000000000010000000000000000000000000000
1 : 000000000000100111010000000100000000000000
1 : 000000000001000000000000010100000000001100
1 : 000000000010000000000000010100000000000100
1 : 000000000100001000000100100000000010000000
1 : 000000010000000000000000000000000010100001
1 : 000100001000000000000000000100000000000100
1 : 001000000001000000101000010100000000010100
1 : 010001100000000000000000001000000000000000
1 : 100010000000000011010000000110000000000000
";

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{stream, substream};

    fn harmonic(n: u32) -> f64 {
        (1..n).map(|i| 1.0 / i as f64).sum()
    }

    #[test]
    fn expansion_fixture_reproduces_published_summaries() {
        let m = parse_seq_table(EXPANSION_SIM_TABLE).unwrap();
        assert_eq!(m.n(), 30);
        assert_eq!(m.segregating_sites(), 42);
        let s = summarize_seqs(&m).unwrap();
        assert!((s.pi0 - 5.90).abs() < 0.01, "pi0 = {}", s.pi0);
        assert!((s.tajima_d.unwrap() - -1.64).abs() < 0.01);
        assert!((s.fay_wu_h - 3.67).abs() < 0.01);
    }

    #[test]
    fn biaka_fixture_reproduces_published_summaries() {
        let m = parse_seq_table(BIAKA_9PMB8_TABLE).unwrap();
        assert_eq!(m.n(), 22);
        assert_eq!(m.segregating_sites(), 42);
        let s = summarize_seqs(&m).unwrap();
        assert!((s.pi0 - 7.52).abs() < 0.01, "pi0 = {}", s.pi0);
        assert!((s.tajima_d.unwrap() - -1.35).abs() < 0.01);
        assert!((s.fay_wu_h - 4.0).abs() < 0.01);
    }

    #[test]
    fn fixtures_round_trip_bit_exactly() {
        for text in [EXPANSION_SIM_TABLE, BIAKA_9PMB8_TABLE] {
            let m = parse_seq_table(text).unwrap();
            assert_eq!(write_seq_table(&m), text);
        }
    }

    #[test]
    fn pair_coalescence_time_is_standard_exponential() {
        let params = GrowthParams::new(1.0, 0.0).unwrap();
        let mut rng = stream(41);
        let reps = 100_000;
        let mean: f64 = (0..reps)
            .map(|_| simulate_genealogy(2, &params, &mut rng).height)
            .sum::<f64>()
            / reps as f64;
        // Exp(1) mean with 3 sigma slack: sd = 1/sqrt(reps).
        assert!((mean - 1.0).abs() < 3.0 / (reps as f64).sqrt());
    }

    #[test]
    fn total_length_matches_coalescent_identity() {
        // E[L] = 2 sum_{i=1}^{n-1} 1/i for the constant-size coalescent.
        let params = GrowthParams::new(1.0, 0.0).unwrap();
        let mut rng = stream(42);
        let reps = 40_000;
        let mean: f64 = (0..reps)
            .map(|_| simulate_genealogy(20, &params, &mut rng).total_length())
            .sum::<f64>()
            / reps as f64;
        let expect = 2.0 * harmonic(20);
        assert!((mean - expect).abs() < 0.03, "mean {mean} vs {expect}");
    }

    #[test]
    fn growth_shrinks_tree_height() {
        let mut heights = Vec::new();
        for (lane, beta) in [0.0, 10.0, 60.0].iter().enumerate() {
            let params = GrowthParams::new(1.0, *beta).unwrap();
            let mut rng = substream(43, lane as u64);
            let reps = 4000;
            let mean: f64 = (0..reps)
                .map(|_| simulate_genealogy(20, &params, &mut rng).height)
                .sum::<f64>()
                / reps as f64;
            heights.push(mean);
        }
        assert!(heights[0] > heights[1] && heights[1] > heights[2], "{heights:?}");
    }

    #[test]
    fn mutation_columns_are_segregating_and_reproducible() {
        let params = GrowthParams::new(50.0, 30.0).unwrap();
        let a = simulate_sample(20, &params, &mut stream(7)).unwrap();
        let b = simulate_sample(20, &params, &mut stream(7)).unwrap();
        assert_eq!(a, b);
        // Segregation is enforced by construction; derived counts are in 1..n.
        assert!(a.derived_counts().iter().all(|&d| d >= 1 && d < a.n()));
    }

    #[test]
    fn watterson_mean_segregating_sites() {
        let params = GrowthParams::new(50.0, 0.0).unwrap();
        let mut rng = stream(44);
        let reps = 3000;
        let mean: f64 = (0..reps)
            .map(|_| {
                simulate_sample(20, &params, &mut rng)
                    .unwrap()
                    .segregating_sites() as f64
            })
            .sum::<f64>()
            / reps as f64;
        let expect = 50.0 * harmonic(20); // ~177.4
        // 3 sigma band, sd(S) ~ 90 at these parameters.
        assert!((mean - expect).abs() < 3.0 * 90.0 / (reps as f64).sqrt());
    }

    #[test]
    fn ms_alpha_entry_matches_halved_beta_distributionally() {
        let by_alpha = GrowthParams::from_ms_alpha(50.0, 30.0).unwrap();
        let by_beta = GrowthParams::new(50.0, 15.0).unwrap();
        assert_eq!(by_alpha, by_beta);
        let reps = 10_000;
        let mut a: Vec<f64> = Vec::new();
        let mut b: Vec<f64> = Vec::new();
        let mut rng_a = substream(45, 0);
        let mut rng_b = substream(45, 1);
        for _ in 0..reps {
            a.push(simulate_sample(20, &by_alpha, &mut rng_a).unwrap().segregating_sites() as f64);
            b.push(simulate_sample(20, &by_beta, &mut rng_b).unwrap().segregating_sites() as f64);
        }
        a.sort_by(f64::total_cmp);
        b.sort_by(f64::total_cmp);
        let ks = two_sample_ks(&a, &b);
        assert!(ks < 0.03, "ks = {ks}");
    }

    // Tie-aware two-sample KS: both pointers pass every value equal to the
    // current minimum before the gap is measured.
    fn two_sample_ks(a: &[f64], b: &[f64]) -> f64 {
        let mut max = 0.0f64;
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            let x = a[i].min(b[j]);
            while i < a.len() && a[i] <= x {
                i += 1;
            }
            while j < b.len() && b[j] <= x {
                j += 1;
            }
            let d = (i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs();
            max = max.max(d);
        }
        max
    }

    #[test]
    fn zero_rate_tree_yields_no_sites() {
        let tree = Genealogy {
            n: 3,
            branches: vec![
                Branch { length: 0.0, leaves: vec![0] },
                Branch { length: 0.0, leaves: vec![1] },
                Branch { length: 0.0, leaves: vec![2] },
                Branch { length: 0.0, leaves: vec![0, 1] },
            ],
            height: 0.0,
        };
        let m = drop_mutations(&tree, 5.0, &mut stream(1)).unwrap();
        assert_eq!(m.segregating_sites(), 0);
        let s = summarize_seqs(&m).unwrap();
        assert_eq!(s.tajima_d, None);
        assert!(s.as_vec().is_err());
    }
}

//! Summary statistics for infinite-sites sequence samples.

use super::seq::SeqMatrix;
use crate::error::{Error, Result};

/// The four classic summaries of a sequence sample.
///
/// `tajima_d` is undefined when there are no segregating sites; it is
/// reported as `None` rather than defaulting to zero.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeqSummary {
    /// Mean pairwise Hamming distance over all sequence pairs.
    pub pi0: f64,
    /// Number of segregating sites.
    pub segregating: usize,
    /// Tajima's D.
    pub tajima_d: Option<f64>,
    /// Fay and Wu's H (unnormalized), `pi0 - theta_H`.
    pub fay_wu_h: f64,
}

impl SeqSummary {
    /// `(pi0, S, D, H0)` as a summary vector; errors if D is undefined.
    pub fn as_vec(&self) -> Result<[f64; 4]> {
        let d = self
            .tajima_d
            .ok_or(Error::UndefinedStatistic("Tajima's D requires S > 0"))?;
        Ok([self.pi0, self.segregating as f64, d, self.fay_wu_h])
    }
}

/// Compute `(pi0, S, D, H0)` for a sequence sample of size `n >= 2`.
///
/// Site-frequency identities are used throughout: a column with `d`
/// derived copies contributes `d(n-d)` differing pairs to `pi0` and
/// `2 d^2 / (n(n-1))` to Fu's high-frequency estimator `theta_H`.
/// Tajima's D normalizes `pi0 - S/a1` by the usual `e1 S + e2 S(S-1)`
/// variance estimate.
pub fn summarize_seqs(matrix: &SeqMatrix) -> Result<SeqSummary> {
    let n = matrix.n();
    if n < 2 {
        return Err(Error::Domain(format!(
            "summary statistics need n >= 2 sequences, got {n}"
        )));
    }
    let nf = n as f64;
    let pairs = nf * (nf - 1.0) / 2.0;
    let counts = matrix.derived_counts();
    let s = counts.len();

    let diff_pairs: u64 = counts.iter().map(|&d| d as u64 * (n - d) as u64).sum();
    let pi0 = diff_pairs as f64 / pairs;

    let theta_h: f64 = counts
        .iter()
        .map(|&d| 2.0 * (d as f64) * (d as f64))
        .sum::<f64>()
        / (nf * (nf - 1.0));
    let fay_wu_h = pi0 - theta_h;

    let tajima_d = if s == 0 {
        None
    } else {
        let a1: f64 = (1..n).map(|i| 1.0 / i as f64).sum();
        let a2: f64 = (1..n).map(|i| 1.0 / (i as f64 * i as f64)).sum();
        let b1 = (nf + 1.0) / (3.0 * (nf - 1.0));
        let b2 = 2.0 * (nf * nf + nf + 3.0) / (9.0 * nf * (nf - 1.0));
        let c1 = b1 - 1.0 / a1;
        let c2 = b2 - (nf + 2.0) / (a1 * nf) + a2 / (a1 * a1);
        let e1 = c1 / a1;
        let e2 = c2 / (a1 * a1 + a2);
        let sf = s as f64;
        Some((pi0 - sf / a1) / (e1 * sf + e2 * sf * (sf - 1.0)).sqrt())
    };

    Ok(SeqSummary {
        pi0,
        segregating: s,
        tajima_d,
        fay_wu_h,
    })
}

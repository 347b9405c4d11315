//! Binary sequence tables under the infinite-sites model.
//!
//! The text format is one row per distinct sequence, `count : bitstring`,
//! with 0 the ancestral and 1 the derived type. Every column must be
//! segregating (at least one 0 and one 1 across the sample).

use std::collections::BTreeMap;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// A sample of binary sequences with per-row multiplicities.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeqMatrix {
    rows: Vec<(u32, Vec<u8>)>,
    n: u32,
    sites: usize,
}

impl SeqMatrix {
    /// Build from `(multiplicity, row)` pairs, validating the invariants:
    /// uniform row length, binary entries, multiplicities >= 1, and every
    /// column segregating.
    pub fn from_rows(rows: Vec<(u32, Vec<u8>)>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::DegenerateSample("sequence table has no rows"));
        }
        let sites = rows[0].1.len();
        let mut n: u32 = 0;
        for (line, (mult, row)) in rows.iter().enumerate() {
            if *mult == 0 {
                return Err(Error::SeqParse {
                    line: line + 1,
                    message: "row multiplicity must be >= 1".into(),
                });
            }
            if row.len() != sites {
                return Err(Error::SeqParse {
                    line: line + 1,
                    message: format!("ragged row: {} columns, expected {sites}", row.len()),
                });
            }
            if let Some(col) = row.iter().position(|b| *b > 1) {
                return Err(Error::SeqParse {
                    line: line + 1,
                    message: format!("non-binary entry in column {}", col + 1),
                });
            }
            n += mult;
        }
        for col in 0..sites {
            let derived: u32 = rows
                .iter()
                .map(|(mult, row)| if row[col] == 1 { *mult } else { 0 })
                .sum();
            if derived == 0 || derived == n {
                return Err(Error::SeqParse {
                    line: 0,
                    message: format!("column {} is not segregating", col + 1),
                });
            }
        }
        Ok(Self { rows, n, sites })
    }

    /// Build from per-site derived leaf lists, one entry per mutation, for a
    /// sample of `n` sequences. Columns keep their given order; identical
    /// rows are merged and emitted lexicographically.
    pub fn from_columns(n: u32, columns: &[Vec<u32>]) -> Self {
        let sites = columns.len();
        let mut raw = vec![vec![0u8; sites]; n as usize];
        for (col, leaves) in columns.iter().enumerate() {
            for &leaf in leaves {
                raw[leaf as usize][col] = 1;
            }
        }
        let mut grouped: BTreeMap<Vec<u8>, u32> = BTreeMap::new();
        for row in raw {
            *grouped.entry(row).or_insert(0) += 1;
        }
        let rows: Vec<(u32, Vec<u8>)> =
            grouped.into_iter().map(|(row, mult)| (mult, row)).collect();
        Self { rows, n, sites }
    }

    /// Total number of sequences in the sample.
    pub fn n(&self) -> u32 {
        self.n
    }

    /// Number of segregating sites (columns).
    pub fn segregating_sites(&self) -> usize {
        self.sites
    }

    /// Distinct rows with multiplicities.
    pub fn rows(&self) -> &[(u32, Vec<u8>)] {
        &self.rows
    }

    /// Number of derived (1) alleles in each column.
    pub fn derived_counts(&self) -> Vec<u32> {
        let mut counts = vec![0u32; self.sites];
        for (mult, row) in &self.rows {
            for (col, bit) in row.iter().enumerate() {
                if *bit == 1 {
                    counts[col] += mult;
                }
            }
        }
        counts
    }

    /// Expand multiplicities into one row per sequence.
    pub fn expanded(&self) -> Vec<Vec<u8>> {
        let mut out = Vec::with_capacity(self.n as usize);
        for (mult, row) in &self.rows {
            for _ in 0..*mult {
                out.push(row.clone());
            }
        }
        out
    }
}

/// Parse the `count : bitstring` text format. Blank lines are ignored.
pub fn parse_seq_table(text: &str) -> Result<SeqMatrix> {
    let mut rows = Vec::new();
    for (idx, raw_line) in text.lines().enumerate() {
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let (count_part, bits_part) = line.split_once(':').ok_or_else(|| Error::SeqParse {
            line: idx + 1,
            message: "expected `count : bitstring`".into(),
        })?;
        let mult: u32 = count_part.trim().parse().map_err(|_| Error::SeqParse {
            line: idx + 1,
            message: format!("invalid count `{}`", count_part.trim()),
        })?;
        let mut bits = Vec::new();
        for (col, ch) in bits_part.trim().chars().enumerate() {
            match ch {
                '0' => bits.push(0),
                '1' => bits.push(1),
                other => {
                    return Err(Error::SeqParse {
                        line: idx + 1,
                        message: format!("non-binary character `{other}` in column {}", col + 1),
                    })
                }
            }
        }
        rows.push((mult, bits));
    }
    SeqMatrix::from_rows(rows)
}

/// Render a matrix in the same `count : bitstring` format that
/// [`parse_seq_table`] reads. Rows are emitted in stored order.
pub fn write_seq_table(matrix: &SeqMatrix) -> String {
    let mut out = String::new();
    for (mult, row) in matrix.rows() {
        let bits: String = row.iter().map(|b| if *b == 1 { '1' } else { '0' }).collect();
        let _ = writeln!(out, "{mult} : {bits}");
    }
    out
}

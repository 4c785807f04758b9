//! Reward-table replay: a logged binary outcome matrix played back as a
//! bandit environment.
//!
//! Each row of the table is one presentation event, each column one arm.
//! Pulling an arm draws a uniformly random row (with replacement, keeping
//! the arm distributions stationary) and returns that row's entry for the
//! arm. Column means are computable from the table and serve as the true
//! means for regret accounting.
//!
//! On-disk format: header-less CSV, one row per event, entries are the ASCII
//! characters `0` or `1`, LF line endings, no trailing comma.

use std::fmt::Write as _;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::harness::{Environment, ONLINE_STREAM};
use crate::offline::OfflineDataset;

/// Immutable binary outcome matrix; rows are events, columns are arms.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RewardTable {
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

impl RewardTable {
    /// Build from explicit rows; every entry must be 0 or 1 and all rows
    /// must have equal, positive length.
    pub fn from_rows(rows: &[Vec<u8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::TableParse {
                row: 0,
                col: 0,
                msg: "reward table is empty".into(),
            });
        }
        let cols = rows[0].len();
        if cols == 0 {
            return Err(Error::TableParse {
                row: 1,
                col: 0,
                msg: "first row has no entries".into(),
            });
        }
        let mut data = Vec::with_capacity(rows.len() * cols);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::TableParse {
                    row: r + 1,
                    col: row.len(),
                    msg: format!("expected {cols} entries, found {}", row.len()),
                });
            }
            for (c, &v) in row.iter().enumerate() {
                if v > 1 {
                    return Err(Error::NonBinaryEntry {
                        row: r + 1,
                        col: c + 1,
                        found: v.to_string(),
                    });
                }
                data.push(v);
            }
        }
        Ok(Self {
            rows: rows.len(),
            cols,
            data,
        })
    }

    /// Parse the CSV format described in the module docs.
    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut lines: Vec<&str> = text.split('\n').collect();
        if lines.last() == Some(&"") {
            lines.pop();
        }
        if lines.is_empty() {
            return Err(Error::TableParse {
                row: 0,
                col: 0,
                msg: "reward table is empty".into(),
            });
        }
        let mut cols = 0usize;
        let mut data = Vec::new();
        for (r, line) in lines.iter().enumerate() {
            let mut row_len = 0usize;
            for (c, cell) in line.split(',').enumerate() {
                let bit = match cell {
                    "0" => 0u8,
                    "1" => 1u8,
                    other => {
                        return Err(Error::NonBinaryEntry {
                            row: r + 1,
                            col: c + 1,
                            found: other.to_string(),
                        })
                    }
                };
                data.push(bit);
                row_len += 1;
            }
            if r == 0 {
                cols = row_len;
            } else if row_len != cols {
                return Err(Error::TableParse {
                    row: r + 1,
                    col: row_len,
                    msg: format!("expected {cols} entries, found {row_len}"),
                });
            }
        }
        Ok(Self {
            rows: lines.len(),
            cols,
            data,
        })
    }

    /// Serialize back to the on-disk CSV format.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.data.len() * 2);
        for r in 0..self.rows {
            for c in 0..self.cols {
                if c > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}", self.entry(r, c));
            }
            out.push('\n');
        }
        out
    }

    /// Seeded Bernoulli table with the given per-column means; handy for
    /// tests and synthetic replay experiments.
    pub fn synthetic_bernoulli(column_means: &[f64], rows: usize, seed: u64) -> Result<Self> {
        if column_means.is_empty() || rows == 0 {
            return Err(Error::InvalidParameter(
                "synthetic table needs at least one row and one column".into(),
            ));
        }
        for (j, &p) in column_means.iter().enumerate() {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "column {j} mean must be in [0,1], got {p}"
                )));
            }
        }
        let cols = column_means.len();
        let mut data = vec![0u8; rows * cols];
        for (j, &p) in column_means.iter().enumerate() {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            for r in 0..rows {
                data[r * cols + j] = u8::from(rng.random_bool(p));
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn arm_count(&self) -> usize {
        self.cols
    }

    pub fn entry(&self, row: usize, col: usize) -> u8 {
        self.data[row * self.cols + col]
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut sums = vec![0u64; self.cols];
        for r in 0..self.rows {
            for (c, sum) in sums.iter_mut().enumerate() {
                *sum += u64::from(self.entry(r, c));
            }
        }
        sums.iter()
            .map(|&s| s as f64 / self.rows as f64)
            .collect()
    }
}

/// Load a reward table from a CSV file.
pub fn load_reward_table(path: impl AsRef<Path>) -> Result<RewardTable> {
    let text = std::fs::read_to_string(path)?;
    RewardTable::parse_csv(&text)
}

/// A reward table plus a seeded uniform row sampler.
pub struct ReplayEnvironment<'a> {
    table: &'a RewardTable,
    column_means: Vec<f64>,
    rng: ChaCha8Rng,
}

impl<'a> ReplayEnvironment<'a> {
    pub fn new(table: &'a RewardTable, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(ONLINE_STREAM);
        Self {
            table,
            column_means: table.column_means(),
            rng,
        }
    }

    pub fn table(&self) -> &RewardTable {
        self.table
    }

    /// Draw a uniform row and return its entry for `arm`.
    pub fn try_pull(&mut self, arm: usize) -> Result<f64> {
        if arm >= self.table.arm_count() {
            return Err(Error::ArmIndex {
                arm,
                arms: self.table.arm_count(),
            });
        }
        let row = self.rng.random_range(0..self.table.rows());
        Ok(f64::from(self.table.entry(row, arm)))
    }

    /// Assemble an offline dataset by replaying `counts[j]` pulls per arm.
    /// Each arm draws rows from its own stream derived from `seed`, disjoint
    /// from this environment's online stream.
    pub fn build_offline(&self, counts: &[u64], seed: u64) -> Result<OfflineDataset> {
        if counts.len() != self.table.arm_count() {
            return Err(Error::Config(format!(
                "counts has length {} but the table has {} columns",
                counts.len(),
                self.table.arm_count()
            )));
        }
        let mut means = Vec::with_capacity(counts.len());
        for (arm, &n) in counts.iter().enumerate() {
            if n == 0 {
                means.push(None);
                continue;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(arm as u64);
            let sum: f64 = (0..n)
                .map(|_| {
                    let row = rng.random_range(0..self.table.rows());
                    f64::from(self.table.entry(row, arm))
                })
                .sum();
            means.push(Some(sum / n as f64));
        }
        OfflineDataset::from_parts(counts.to_vec(), means)
    }
}

impl Environment for ReplayEnvironment<'_> {
    fn arm_count(&self) -> usize {
        self.table.arm_count()
    }

    fn true_mean(&self, arm: usize) -> f64 {
        self.column_means[arm]
    }

    fn pull(&mut self, arm: usize) -> f64 {
        self.try_pull(arm).expect("arm index checked by the harness")
    }
}

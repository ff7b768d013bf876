//! Run records, raw tables and verdicts that are recomputed from those tables.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};
use smoothlab_core::scaling::ScalingFit;

use crate::config::{ExperimentConfig, Kind};

/// A numeric table; `NaN` and infinities are not allowed so that the JSON round-trips.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    /// Columns drawn against the first one on log-log axes, when the table is a scaling curve.
    #[serde(default)]
    pub plot: Vec<String>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            plot: Vec::new(),
        }
    }

    pub fn plotted(mut self, cols: &[&str]) -> Self {
        self.plot = cols.iter().map(|c| c.to_string()).collect();
        self
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let j = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[j]).collect())
    }
}

/// How a verdict is derived from a table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "kebab-case")]
pub enum Check {
    /// Log-log slope of `y` against `x` inside `[lo, hi]`.
    Slope { table: String, x: String, y: String, lo: Option<f64>, hi: Option<f64> },
    /// Slope of at least `lo`, or every `|y| ≤ floor`.
    Order { table: String, x: String, y: String, lo: f64, floor: f64 },
    /// `col[k+1] ≤ factor · col[k]` for every row.
    Decreasing { table: String, col: String, factor: f64 },
    /// `lo_col ≤ col ≤ hi_col` row by row.
    Within { table: String, col: String, lo_col: String, hi_col: String },
    /// `|a - b| ≤ tol |b|` row by row.
    Relative { table: String, a: String, b: String, tol: f64 },
    /// `|col| ≤ tol` row by row.
    Small { table: String, col: String, tol: f64 },
    /// The index `max_u d_F[u]` from a column where `-1` marks an infinite `d_F[u]`.
    Index { table: String, col: String, expected: Option<u32> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictRecord {
    pub name: String,
    pub check: Check,
    /// Human-readable observed value, recomputed from the table.
    pub observed: String,
    pub pass: bool,
}

impl Check {
    fn table<'a>(&self, tables: &'a [Table]) -> Option<&'a Table> {
        let name = match self {
            Check::Slope { table, .. }
            | Check::Order { table, .. }
            | Check::Decreasing { table, .. }
            | Check::Within { table, .. }
            | Check::Relative { table, .. }
            | Check::Small { table, .. }
            | Check::Index { table, .. } => table,
        };
        tables.iter().find(|t| &t.name == name)
    }

    /// `(observed, pass)`; a missing table or column fails.
    pub fn evaluate(&self, tables: &[Table]) -> (String, bool) {
        let Some(t) = self.table(tables) else { return ("missing table".into(), false) };
        let col = |c: &str| t.column(c);
        let missing = || ("missing column".to_string(), false);
        match self {
            Check::Slope { x, y, lo, hi, .. } => {
                let (Some(xs), Some(ys)) = (col(x), col(y)) else { return missing() };
                let fit = loglog(&xs, &ys);
                let pass = !fit.empty && lo.map_or(true, |l| fit.slope >= l) && hi.map_or(true, |h| fit.slope <= h);
                (format!("slope {:.4}", fit.slope), pass)
            }
            Check::Order { x, y, lo, floor, .. } => {
                let (Some(xs), Some(ys)) = (col(x), col(y)) else { return missing() };
                let top = ys.iter().map(|v| v.abs()).fold(0.0, f64::max);
                if !ys.is_empty() && top <= *floor {
                    return (format!("exact up to rounding (largest {top:.3e})"), true);
                }
                let fit = loglog(&xs, &ys);
                (format!("slope {:.4}", fit.slope), !fit.empty && fit.slope >= *lo)
            }
            Check::Decreasing { col: c, factor, .. } => {
                let Some(v) = col(c) else { return missing() };
                let worst = v.windows(2).map(|w| w[1] / w[0]).fold(f64::NEG_INFINITY, f64::max);
                (format!("largest factor {worst:.4}"), v.len() >= 2 && worst <= *factor)
            }
            Check::Within { col: c, lo_col, hi_col, .. } => {
                let (Some(v), Some(lo), Some(hi)) = (col(c), col(lo_col), col(hi_col)) else { return missing() };
                let out = v.iter().zip(lo.iter().zip(&hi)).filter(|(x, (l, h))| !(**x >= **l && **x <= **h)).count();
                (format!("{out} of {} rows outside", v.len()), out == 0 && !v.is_empty())
            }
            Check::Relative { a, b, tol, .. } => {
                let (Some(av), Some(bv)) = (col(a), col(b)) else { return missing() };
                let worst = av.iter().zip(&bv).map(|(x, y)| (x - y).abs() / y.abs()).fold(0.0, f64::max);
                (format!("largest relative gap {worst:.3e}"), !av.is_empty() && worst <= *tol)
            }
            Check::Small { col: c, tol, .. } => {
                let Some(v) = col(c) else { return missing() };
                let worst = v.iter().map(|x| x.abs()).fold(0.0, f64::max);
                (format!("largest {worst:.3e}"), !v.is_empty() && worst <= *tol)
            }
            Check::Index { col: c, expected, .. } => {
                let Some(v) = col(c) else { return missing() };
                let observed = if v.iter().any(|&k| k < 0.0) {
                    None
                } else {
                    Some(v.iter().fold(0.0, |a: f64, &b| a.max(b)) as u32)
                };
                let show = observed.map_or("inf".to_string(), |k| k.to_string());
                (format!("d_F = {show}"), !v.is_empty() && observed == *expected)
            }
        }
    }
}

fn loglog(x: &[f64], y: &[f64]) -> ScalingFit {
    let pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    ScalingFit::loglog(&pairs)
}

/// Deterministic part of a run: identical configs give identical bytes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunResults {
    pub config_hash: String,
    pub kind: Kind,
    pub config: ExperimentConfig,
    /// Module reports, embedded as produced.
    pub results: Value,
    pub tables: Vec<Table>,
    pub verdicts: Vec<VerdictRecord>,
}

/// One line of the append-only run log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub timestamp: String,
    pub cached: bool,
    #[serde(flatten)]
    pub run: RunResults,
}

impl RunResults {
    pub fn new(config: &ExperimentConfig, results: Value, tables: Vec<Table>, checks: Vec<(String, Check)>) -> Self {
        let verdicts = checks
            .into_iter()
            .map(|(name, check)| {
                let (observed, pass) = check.evaluate(&tables);
                VerdictRecord { name, check, observed, pass }
            })
            .collect();
        Self { config_hash: config_hash(config), kind: config.kind, config: config.clone(), results, tables, verdicts }
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass)
    }

    /// Re-derive every verdict from the stored tables.
    pub fn recheck(&self) -> bool {
        self.verdicts.iter().all(|v| v.check.evaluate(&self.tables) == (v.observed.clone(), v.pass))
    }
}

/// SHA-256 of the canonical config JSON, hex encoded.
pub fn config_hash(config: &ExperimentConfig) -> String {
    let digest = Sha256::digest(config.canonical_json().as_bytes());
    digest.iter().map(|b| format!("{b:02x}")).collect()
}

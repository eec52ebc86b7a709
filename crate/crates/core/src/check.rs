//! Verification reports.

use alloc::string::String;
use alloc::vec::Vec;

/// How `statistic` is compared with `tolerance`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum CheckKind {
    /// Pass when `statistic ≤ tolerance` (a deviation).
    Deviation,
    /// Pass when `statistic > tolerance` (a p-value against a level α).
    PValue,
}

/// Outcome of one check: the compared quantities, the test statistic and
/// whether it lies within the declared tolerance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CheckReport {
    pub name: String,
    pub lhs: Vec<f64>,
    pub rhs: Vec<f64>,
    pub statistic: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub seed: u64,
    pub n_samples: u64,
    pub kind: CheckKind,
}

impl CheckReport {
    /// A deviation check; passes iff `statistic ≤ tolerance` (NaN fails).
    pub fn deviation(
        name: impl Into<String>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        statistic: f64,
        tolerance: f64,
        seed: u64,
        n_samples: u64,
    ) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            statistic,
            tolerance,
            pass: statistic <= tolerance,
            seed,
            n_samples,
            kind: CheckKind::Deviation,
        }
    }

    /// A test at level `alpha`; passes iff `p > alpha`.
    pub fn p_value(
        name: impl Into<String>,
        lhs: Vec<f64>,
        rhs: Vec<f64>,
        p: f64,
        alpha: f64,
        seed: u64,
        n_samples: u64,
    ) -> Self {
        CheckReport {
            name: name.into(),
            lhs,
            rhs,
            statistic: p,
            tolerance: alpha,
            pass: p > alpha,
            seed,
            n_samples,
            kind: CheckKind::PValue,
        }
    }

    /// Largest absolute deviation between `lhs` and `rhs`.
    pub fn max_abs_deviation(lhs: &[f64], rhs: &[f64]) -> f64 {
        lhs.iter()
            .zip(rhs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

//! Monte Carlo verification against the closed forms, with a JSON report.

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::ginibre::{charpoly_pair_average, schur_average_closed, trace_moment_of_power};
use crate::montecarlo::{estimate_statistics, z_score, Statistic};
use crate::partitions::Partition;

/// `|z|` at or above this fails a statistic.
pub const Z_THRESHOLD: f64 = 5.0;

/// Which statistics to sample, at which dimensions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationPlan {
    pub dims: Vec<usize>,
    pub partitions: Vec<Partition>,
    pub trace_powers: Vec<usize>,
    pub charpoly_pairs: Vec<(f64, f64)>,
    /// Added to every target; nonzero only to check that the harness can
    /// fail.
    #[serde(default)]
    pub target_offset: f64,
}

impl Default for VerificationPlan {
    fn default() -> Self {
        let p = |s: &str| s.parse::<Partition>().expect("literal partition");
        Self {
            dims: vec![2, 4, 6],
            partitions: ["2", "4", "2,2", "4,2", "2,2,2", "1", "3,1"]
                .into_iter()
                .map(p)
                .collect(),
            trace_powers: vec![2, 3, 4, 6],
            charpoly_pairs: vec![(0.3, -0.2), (0.5, 0.5)],
            target_offset: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationEntry {
    pub statistic: String,
    pub dim: usize,
    pub target: f64,
    /// Decimal string when the target is an exact integer.
    pub target_exact: Option<String>,
    pub estimate: f64,
    pub std_error: f64,
    pub z_score: f64,
    /// Mean imaginary part over samples (Schur statistics only).
    pub imag_mean: Option<f64>,
    pub n_samples: u64,
    pub seed: u64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub n_samples: u64,
    pub threshold: f64,
    pub entries: Vec<VerificationEntry>,
    pub all_passed: bool,
}

impl VerificationReport {
    pub fn failures(&self) -> impl Iterator<Item = &VerificationEntry> {
        self.entries.iter().filter(|e| !e.passed)
    }
}

fn charpoly_target(x1: f64, x2: f64, dim: usize) -> f64 {
    let w = x1 * x2;
    charpoly_pair_average(dim)
        .iter()
        .enumerate()
        .map(|(k, c)| c.to_f64().unwrap_or(f64::NAN) * w.powi(k as i32))
        .sum()
}

/// Runs every statistic of `plan` at every dimension, one sample stream
/// per dimension. Schur statistics whose partition is longer than `N` are
/// identically zero and are reported as exact zeros.
pub fn run_verification(
    plan: &VerificationPlan,
    n_samples: u64,
    seed: u64,
) -> Result<VerificationReport> {
    let mut entries = Vec::new();
    for &dim in &plan.dims {
        let mut stats = Vec::new();
        let mut targets: Vec<(f64, Option<String>)> = Vec::new();
        let mut trivially_zero = Vec::new();
        for lambda in &plan.partitions {
            let exact = schur_average_closed(lambda, dim).value;
            if lambda.len() > dim {
                trivially_zero.push((Statistic::Schur(lambda.clone()), exact));
                continue;
            }
            targets.push((exact.to_f64().unwrap_or(f64::NAN), Some(exact.to_string())));
            stats.push(Statistic::Schur(lambda.clone()));
        }
        for &p in &plan.trace_powers {
            let exact = trace_moment_of_power(p, dim);
            targets.push((exact.to_f64().unwrap_or(f64::NAN), Some(exact.to_string())));
            stats.push(Statistic::Trace(p));
        }
        for &(x1, x2) in &plan.charpoly_pairs {
            targets.push((charpoly_target(x1, x2, dim), None));
            stats.push(Statistic::CharpolyPair(x1, x2));
        }

        for (stat, exact) in trivially_zero {
            let target = exact.to_f64().unwrap_or(f64::NAN) + plan.target_offset;
            let z = z_score(0.0, target, 0.0);
            entries.push(VerificationEntry {
                statistic: stat.id(),
                dim,
                target,
                target_exact: Some(exact.to_string()),
                estimate: 0.0,
                std_error: 0.0,
                z_score: z,
                imag_mean: Some(0.0),
                n_samples,
                seed,
                passed: z.abs() < Z_THRESHOLD,
            });
        }

        let estimates = estimate_statistics(dim, n_samples, seed, &stats)?;
        for ((stat, (target, target_exact)), (re, im)) in stats.iter().zip(targets).zip(estimates) {
            let target = target + plan.target_offset;
            let z = re.z_score(target);
            let is_schur = matches!(stat, Statistic::Schur(_));
            let imag_ok = !is_schur || im.mean.abs() <= Z_THRESHOLD * im.std_error + 1e-9;
            entries.push(VerificationEntry {
                statistic: stat.id(),
                dim,
                target,
                target_exact,
                estimate: re.mean,
                std_error: re.std_error,
                z_score: z,
                imag_mean: is_schur.then_some(im.mean),
                n_samples: re.n_samples,
                seed,
                passed: z.abs() < Z_THRESHOLD && imag_ok,
            });
        }
    }
    let all_passed = entries.iter().all(|e| e.passed);
    Ok(VerificationReport {
        seed,
        n_samples,
        threshold: Z_THRESHOLD,
        entries,
        all_passed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_plan() -> VerificationPlan {
        VerificationPlan {
            dims: vec![2, 3],
            partitions: vec![
                "2".parse().unwrap(),
                "1".parse().unwrap(),
                "2,2,2".parse().unwrap(),
            ],
            trace_powers: vec![2, 3],
            charpoly_pairs: vec![(0.5, 0.5)],
            target_offset: 0.0,
        }
    }

    #[test]
    fn small_plan_passes_and_round_trips() {
        let report = run_verification(&small_plan(), 4000, 42).unwrap();
        assert!(report.all_passed, "{report:#?}");
        assert_eq!(report.entries.len(), 2 * 6);
        let json = serde_json::to_string(&report).unwrap();
        let back: VerificationReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back, report);
    }

    #[test]
    fn injected_offset_fails() {
        let mut plan = small_plan();
        plan.target_offset = 10.0;
        let report = run_verification(&plan, 2000, 42).unwrap();
        assert!(!report.all_passed);
        assert!(report.failures().count() > 0);
    }

    #[test]
    fn charpoly_targets() {
        // 1 + 6·(−0.06) + 6·0.0036 + 6·(−0.000216)
        assert!((charpoly_target(0.3, -0.2, 3) - 0.840304).abs() < 1e-12);
        assert!((charpoly_target(0.5, 0.5, 2) - 1.625).abs() < 1e-15);
    }
}

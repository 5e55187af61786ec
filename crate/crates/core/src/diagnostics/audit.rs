use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use super::in_window;
use crate::driver::IterationTrace;
use crate::error::{Error, Result};
use crate::linalg::{LdltFactorization, PivotSize};
use crate::problems::{Iterate, KnownSolution};

/// Largest allowed max/min ratio within one family of the audit.
pub const THETA_SPREAD: f64 = 1e3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FamilyRange {
    pub name: String,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

impl FamilyRange {
    /// `max / min`; 1 for an empty family.
    pub fn spread(&self) -> f64 {
        if self.samples == 0 {
            1.0
        } else {
            self.max / self.min
        }
    }

    pub fn pass(&self) -> bool {
        self.min > 0.0 && self.spread() <= THETA_SPREAD || self.samples == 0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ThetaMuAudit {
    pub iterations: usize,
    pub families: Vec<FamilyRange>,
}

impl ThetaMuAudit {
    pub fn pass(&self) -> bool {
        self.iterations > 0 && self.families.iter().all(FamilyRange::pass)
    }
}

/// Under strict complementarity `s_B`, `lambda_N` are of size `mu` and
/// `lambda_B`, `s_N` of size 1. Checks the spread of `s_B / mu`, `lambda_B`,
/// `s_N` and `lambda_N / mu` over the window iterations of a trace.
pub fn theta_mu_audit(trace: &IterationTrace, known: &KnownSolution) -> Result<ThetaMuAudit> {
    let iterates: Vec<Iterate> = trace.records.iter().map(|r| r.iterate.clone()).collect();
    theta_mu_audit_iterates(&iterates, known)
}

pub fn theta_mu_audit_iterates(iterates: &[Iterate], known: &KnownSolution) -> Result<ThetaMuAudit> {
    if !known.strictly_complementary {
        return Err(Error::NotStrictlyComplementary(format!(
            "active set {:?}",
            known.active
        )));
    }
    let mut fam: [(String, Vec<f64>); 4] = [
        ("s_B/mu".into(), vec![]),
        ("lambda_B".into(), vec![]),
        ("s_N".into(), vec![]),
        ("lambda_N/mu".into(), vec![]),
    ];
    let mut iterations = 0;
    for it in iterates {
        let mu = it.mu();
        if !in_window(mu) {
            continue;
        }
        iterations += 1;
        for &i in &known.active {
            fam[0].1.push(it.s[i] / mu);
            fam[1].1.push(it.lambda[i]);
        }
        for &i in &known.inactive {
            fam[2].1.push(it.s[i]);
            fam[3].1.push(it.lambda[i] / mu);
        }
    }
    let families = fam
        .into_iter()
        .map(|(name, v)| FamilyRange {
            name,
            min: v.iter().copied().fold(f64::INFINITY, f64::min),
            max: v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            samples: v.len(),
        })
        .collect();
    Ok(ThetaMuAudit { iterations, families })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PivotTypeReport {
    /// 2x2 pivots with at least one diagonal of size `1/mu`.
    pub large_two_by_two: usize,
    /// Number of 1x1 pivots with a diagonal of size `1/mu`.
    pub large_one_by_one: usize,
    /// True when the first `expected.len()` pivots are 1x1, large, and
    /// consume exactly the expected positions.
    pub large_first: bool,
}

/// Classifies the pivots of an `LDL^T` factorization against `mu`.
/// `expected` lists the positions of the `1/mu`-sized diagonals in the
/// factored matrix.
pub fn pivot_type_audit(f: &LdltFactorization<f64>, mu: f64, expected: &[usize]) -> PivotTypeReport {
    let large_two_by_two = f
        .pivot_log
        .iter()
        .filter(|p| p.size == PivotSize::TwoByTwo && p.has_large_diagonal(mu))
        .count();
    let large_one_by_one = f
        .pivot_log
        .iter()
        .filter(|p| p.size == PivotSize::OneByOne && p.has_large_diagonal(mu))
        .count();
    let head = &f.pivot_log[..expected.len().min(f.pivot_log.len())];
    let mut seen: Vec<usize> = head.iter().flat_map(|p| p.indices.clone()).collect();
    seen.sort_unstable();
    let mut want = expected.to_vec();
    want.sort_unstable();
    let large_first = head.len() == expected.len()
        && head
            .iter()
            .all(|p| p.size == PivotSize::OneByOne && p.has_large_diagonal(mu))
        && seen == want;
    PivotTypeReport {
        large_two_by_two,
        large_one_by_one,
        large_first,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BackwardStructureReport {
    /// Largest `|T_ij|` outside the designated large diagonal positions.
    pub scale: f64,
    pub threshold: f64,
    /// Entries of `P^T |L||Y||L^T| P` above the threshold at other positions.
    pub violations: Vec<(usize, usize)>,
}

impl BackwardStructureReport {
    pub fn pass(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks that large entries of `P^T |L||Y||L^T| P` occur only on the
/// diagonal positions listed in `large`.
pub fn backward_structure_audit(
    t: &DMatrix<f64>,
    f: &LdltFactorization<f64>,
    large: &[usize],
    factor: f64,
) -> BackwardStructureReport {
    let n = t.nrows();
    let is_large = |i: usize, j: usize| i == j && large.contains(&i);
    let mut scale = 0.0f64;
    for j in 0..n {
        for i in 0..n {
            if !is_large(i, j) {
                scale = scale.max(t[(i, j)].abs());
            }
        }
    }
    let threshold = factor * scale;
    let prod = f.abs_product_original();
    let mut violations = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if !is_large(i, j) && prod[(i, j)] > threshold {
                violations.push((i, j));
            }
        }
    }
    BackwardStructureReport {
        scale,
        threshold,
        violations,
    }
}

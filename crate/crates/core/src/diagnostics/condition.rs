use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::linalg::gepp_solve;
use crate::precision::PrecisionConfig;
use crate::stepgen::AssembledSystem;

pub const PROBE_ITERATIONS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionEstimate {
    pub sigma_max: f64,
    /// Upper bound on the smallest singular value.
    pub sigma_min: f64,
    pub ratio: f64,
    /// Inverse iteration failed; `sigma_min` is `min_j ||A e_j||` and `ratio`
    /// only bounds the condition number from below.
    pub lower_bound_only: bool,
}

pub fn condition_probe(sys: &AssembledSystem<f64>) -> ConditionEstimate {
    condition_probe_matrix(&sys.matrix)
}

/// `sigma_max / sigma_min` from power iteration on `A^T A` and inverse
/// iteration on `A^T A`, each run for [`PROBE_ITERATIONS`] steps.
pub fn condition_probe_matrix(a: &DMatrix<f64>) -> ConditionEstimate {
    let n = a.ncols();
    let start = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let ata = a.transpose() * a;

    let mut x = start.clone();
    let mut sigma_max = 0.0;
    for _ in 0..PROBE_ITERATIONS {
        let y = &ata * &x;
        let nrm = y.norm();
        if nrm == 0.0 {
            break;
        }
        sigma_max = (x.dot(&y)).max(0.0).sqrt();
        x = y / nrm;
    }

    let pc = PrecisionConfig::native();
    let at = a.transpose();
    let mut x = start;
    let mut sigma_min = f64::NAN;
    let mut failed = false;
    for _ in 0..PROBE_ITERATIONS {
        // (A^T A)^{-1} x = A^{-1} (A^{-T} x).
        let w = gepp_solve(&at, x.as_slice(), &pc).and_then(|w| gepp_solve(a, &w.x, &pc));
        let y = match w {
            Ok(sol) => DVector::from_vec(sol.x),
            Err(_) => {
                failed = true;
                break;
            }
        };
        let nrm = y.norm();
        if !nrm.is_finite() || nrm == 0.0 {
            failed = true;
            break;
        }
        let rq = x.dot(&y);
        sigma_min = (1.0 / rq).sqrt();
        x = y / nrm;
    }
    if failed || !sigma_min.is_finite() {
        let col_min = (0..n).map(|j| a.column(j).norm()).fold(f64::INFINITY, f64::min);
        return ConditionEstimate {
            sigma_max,
            sigma_min: col_min,
            ratio: sigma_max / col_min,
            lower_bound_only: true,
        };
    }
    ConditionEstimate {
        sigma_max,
        sigma_min,
        ratio: sigma_max / sigma_min,
        lower_bound_only: false,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dmatrix;

    #[test]
    fn identity_is_perfectly_conditioned() {
        let c = condition_probe_matrix(&DMatrix::identity(3, 3));
        assert!((c.ratio - 1.0).abs() < 1e-12);
        assert!(!c.lower_bound_only);
    }

    #[test]
    fn diagonal_ratio() {
        let c = condition_probe_matrix(&dmatrix![1.0, 0.0; 0.0, 1e-8]);
        assert!((c.ratio / 1e8 - 1.0).abs() < 0.01, "{c:?}");
    }

    #[test]
    fn singular_matrix_reports_lower_bound() {
        let c = condition_probe_matrix(&dmatrix![1.0, 1.0; 1.0, 1.0]);
        assert!(c.lower_bound_only);
        assert!(c.ratio >= 1.0);
    }
}

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::precision::PrecisionConfig;
use crate::problems::{eval_residuals, Iterate, KnownSolution, MultiplierSegment, NlpProblem};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DistanceReport {
    pub delta_exact: f64,
    pub delta_estimate: f64,
    /// `delta_estimate / delta_exact`; infinite when the exact distance is zero.
    pub ratio: f64,
}

/// `||(r_f, min(lambda, -g(z)))||`, computable without knowing the solution.
pub fn delta_estimate(problem: NlpProblem, it: &Iterate) -> Result<f64> {
    let pc = PrecisionConfig::native();
    let res = eval_residuals(problem, it)?;
    let g = problem.eval_g(&pc, &it.z);
    let comp = it.lambda.iter().zip(&g).map(|(&l, &gi)| l.min(-gi));
    Ok(res
        .r_f
        .iter()
        .copied()
        .chain(comp)
        .map(|x| x * x)
        .sum::<f64>()
        .sqrt())
}

/// Euclidean distance from `x` to `{l >= 0 : a^T l = b}`.
///
/// Enumerates every face `{l_F = 0}` of the orthant, projects onto the
/// affine set within that face and keeps the nearest feasible projection.
/// The true projection lies in the relative interior of one face, so this is
/// exact.
pub fn segment_distance(seg: &MultiplierSegment, x: &[f64]) -> Result<f64> {
    let k = x.len();
    assert!(k <= 16, "face enumeration is exponential in |B|");
    let mut best: Option<f64> = None;
    for mask in 0u32..(1 << k) {
        let free: Vec<usize> = (0..k).filter(|&j| mask & (1 << j) == 0).collect();
        let mut p = vec![0.0; k];
        for &j in &free {
            p[j] = x[j];
        }
        let aa: f64 = free.iter().map(|&j| seg.a[j] * seg.a[j]).sum();
        let ap: f64 = free.iter().map(|&j| seg.a[j] * p[j]).sum();
        if aa > 0.0 {
            let c = (seg.b - ap) / aa;
            for &j in &free {
                p[j] += c * seg.a[j];
            }
        } else if seg.b != 0.0 {
            continue;
        }
        let scale = 1.0 + seg.b.abs();
        if p.iter().any(|&v| v < -1e-14 * scale) {
            continue;
        }
        let d = p
            .iter()
            .zip(x)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        best = Some(best.map_or(d, |b: f64| b.min(d)));
    }
    best.ok_or(Error::EmptyMultiplierSet)
}

/// Distance from `(z, lambda)` to `{z*} x S_lambda`, with `lambda_N* = 0`.
pub fn delta_exact(known: &KnownSolution, it: &Iterate) -> Result<f64> {
    let dz2: f64 = it
        .z
        .iter()
        .zip(&known.z_star)
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    let dl = segment_distance(&known.multiplier_affine, &known.lambda_b(&it.lambda))?;
    let ln2: f64 = known.lambda_n(&it.lambda).iter().map(|x| x * x).sum();
    Ok((dz2 + dl * dl + ln2).sqrt())
}

pub fn distance_report(problem: NlpProblem, known: &KnownSolution, it: &Iterate) -> Result<DistanceReport> {
    let delta_exact = delta_exact(known, it)?;
    let delta_estimate = delta_estimate(problem, it)?;
    let ratio = if delta_exact > 0.0 {
        delta_estimate / delta_exact
    } else {
        f64::INFINITY
    };
    Ok(DistanceReport {
        delta_exact,
        delta_estimate,
        ratio,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn seg() -> MultiplierSegment {
        MultiplierSegment {
            a: vec![2.0, 4.0],
            b: 3.0,
        }
    }

    #[test]
    fn point_on_segment() {
        // 2 (1.04) + 4 (0.23) = 3.
        assert!(segment_distance(&seg(), &[1.04, 0.23]).unwrap() < 1e-15);
    }

    #[test]
    fn interior_projection() {
        let d = segment_distance(&seg(), &[1.0, 0.2]).unwrap();
        assert!((d - 0.2 / 20f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn projection_onto_endpoint() {
        // Beyond the vertex (0, 3/4): the nearest point is the vertex itself.
        let d = segment_distance(&seg(), &[-1.0, 2.0]).unwrap();
        let expect = ((1.0f64).powi(2) + (2.0f64 - 0.75).powi(2)).sqrt();
        assert!((d - expect).abs() < 1e-14);
    }

    #[test]
    fn empty_set_detected() {
        let s = MultiplierSegment { a: vec![1.0], b: -1.0 };
        assert_eq!(segment_distance(&s, &[0.5]), Err(Error::EmptyMultiplierSet));
    }

    #[test]
    fn scalar_quadratic_saturates_lower_bound() {
        let p = NlpProblem::ScalarQuadratic;
        let k = p.known_solution();
        let eps = 1e-3;
        let it = Iterate::new(vec![eps], vec![eps], vec![eps]);
        assert!((delta_exact(&k, &it).unwrap() - 2f64.sqrt() * eps).abs() < 1e-18);
        assert!((delta_estimate(p, &it).unwrap() - eps).abs() < 1e-18);
    }

    #[test]
    fn zero_at_solution() {
        let p = NlpProblem::TwoCircles;
        let k = p.known_solution();
        let it = Iterate::new(vec![0.0, 0.0], vec![0.5, 0.5], vec![1.0, 1.0]);
        assert_eq!(delta_exact(&k, &it).unwrap(), 0.0);
    }

    #[test]
    fn estimate_at_start_is_moderate() {
        let p = NlpProblem::TwoCircles;
        let d = delta_estimate(p, &p.default_start()).unwrap();
        assert!((1e-2..=1.0).contains(&d), "{d}");
    }
}

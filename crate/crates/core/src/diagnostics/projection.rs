use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::problems::{norm2, KnownSolution};
use crate::stepgen::Step;

/// Split of the active multiplier step into range and null-space parts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProjectionReport {
    /// `||U^T dl_B||`.
    pub u_component: f64,
    /// `||V^T dl_B||`.
    pub v_component: f64,
    pub dz_norm: f64,
    pub ds_norm: f64,
    pub dlambda_n_norm: f64,
}

pub fn project_multiplier_step(step: &Step, known: &KnownSolution) -> ProjectionReport {
    let dlb = DVector::from_vec(known.lambda_b(&step.dlambda));
    let u = known.svd.u.transpose() * &dlb;
    let v = known.svd.v.transpose() * &dlb;
    ProjectionReport {
        u_component: u.norm(),
        v_component: v.norm(),
        dz_norm: norm2(&step.dz),
        ds_norm: norm2(&step.ds),
        dlambda_n_norm: norm2(&known.lambda_n(&step.dlambda)),
    }
}

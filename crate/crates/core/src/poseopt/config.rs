use serde::{Deserialize, Serialize};

use crate::error::CraftError;

/// Pose optimization settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OptimConfig {
    /// Initial camera views per batch.
    pub n_views: usize,
    pub n_batches: usize,
    /// Coordinate descent budget per hypothesis.
    pub steps: usize,
    /// Scales the initial probe steps; 0.1 gives 0.1 rad for angles, 0.1
    /// for distance and 0.05 for offsets and scales.
    pub step_size: f64,
    pub lambda_iou: f64,
    pub lambda_miou: f64,
    pub lambda_dist: f64,
    pub seed: u64,
    /// Vertical field of view in degrees.
    pub fov_y_deg: f64,
}

impl Default for OptimConfig {
    fn default() -> Self {
        Self {
            n_views: 40,
            n_batches: 5,
            steps: 100,
            step_size: 0.1,
            lambda_iou: 0.75,
            lambda_miou: 0.15,
            lambda_dist: 0.15,
            seed: 0,
            fov_y_deg: 30.0,
        }
    }
}

impl OptimConfig {
    pub fn validate(&self) -> Result<(), CraftError> {
        let bad = |m: String| Err(CraftError::InvalidConfig(m));
        if self.n_views == 0 || self.n_batches == 0 || self.steps == 0 {
            return bad("n_views, n_batches and steps must be at least 1".into());
        }
        for (name, w) in [
            ("lambda_iou", self.lambda_iou),
            ("lambda_miou", self.lambda_miou),
            ("lambda_dist", self.lambda_dist),
            ("step_size", self.step_size),
        ] {
            if !(w >= 0.0 && w.is_finite()) {
                return bad(format!("{name} must be a nonnegative number, got {w}"));
            }
        }
        if !(self.fov_y_deg > 0.0 && self.fov_y_deg < 180.0) {
            return bad(format!("fov_y_deg {} outside (0, 180)", self.fov_y_deg));
        }
        Ok(())
    }

    /// Weighted total of the three selection losses.
    pub fn total(&self, l_iou: f64, l_miou: f64, l_dist: f64) -> f64 {
        self.lambda_iou * l_iou + self.lambda_miou * l_miou + self.lambda_dist * l_dist
    }

    pub fn n_hypotheses(&self) -> usize {
        self.n_views * self.n_batches
    }
}

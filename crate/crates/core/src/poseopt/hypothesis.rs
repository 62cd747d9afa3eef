//! Camera/scale hypotheses and their gradient-free refinement.

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::config::OptimConfig;
use crate::geom::{LabeledMesh, Vec3};
use crate::raster::{Camera, Mask, SilhouetteRenderer};
use crate::scalar::Real;
use crate::seed::{self, Stream};

pub const SCALE_MIN: f64 = 0.5;
pub const SCALE_MAX: f64 = 2.0;
const ELEVATION_LIMIT_DEG: f64 = 89.0;
const DISTANCE_RANGE: (f64, f64) = (0.5, 10.0);
const OFFSET_LIMIT: f64 = 1.0;
/// Consecutive rejected rounds before all steps halve.
const PATIENCE: usize = 10;

/// Camera and per-axis mesh scale, with the silhouette loss after each
/// accepted optimization step (the first entry is the starting loss).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PoseHypothesis<T> {
    pub cam: Camera<T>,
    pub scale: Vec3<T>,
    #[serde(default)]
    pub loss_history: Vec<f64>,
}

impl<T: Real> PoseHypothesis<T> {
    pub fn new(cam: Camera<T>) -> Self {
        Self {
            cam,
            scale: Vec3::splat(T::one()),
            loss_history: Vec::new(),
        }
    }

    fn params(&self) -> [T; 8] {
        let c = &self.cam;
        [
            c.azimuth,
            c.elevation,
            c.distance,
            c.offset[0],
            c.offset[1],
            self.scale.x,
            self.scale.y,
            self.scale.z,
        ]
    }

    fn with_params(&self, p: &[T; 8]) -> (Camera<T>, Vec3<T>) {
        let mut cam = self.cam;
        cam.azimuth = p[0];
        cam.elevation = p[1];
        cam.distance = p[2];
        cam.offset = [p[3], p[4]];
        (cam, Vec3::new(p[5], p[6], p[7]))
    }
}

/// `n_views × n_batches` starting hypotheses for a `width × height` target.
///
/// Hypothesis `b * n_views + i` of batch `b` has its azimuth jittered inside
/// the `i`-th of `n_views` equal sectors, so every batch covers the circle.
pub fn init_hypotheses<T: Real>(cfg: &OptimConfig, width: usize, height: usize) -> Vec<PoseHypothesis<T>> {
    let mut rng = seed::rng(cfg.seed, Stream::Hypotheses);
    let mut out = Vec::with_capacity(cfg.n_hypotheses());
    for _ in 0..cfg.n_batches {
        for i in 0..cfg.n_views {
            let u: f64 = rng.random();
            let az = (i as f64 + u) / cfg.n_views as f64 * std::f64::consts::TAU;
            let el = rng.random_range(-10.0f64..=60.0).to_radians();
            let dist = rng.random_range(1.5f64..=4.0);
            let mut cam = Camera::new(T::lit(az), T::lit(el), T::lit(dist), width, height);
            cam.fov_y = T::lit(cfg.fov_y_deg.to_radians());
            out.push(PoseHypothesis::new(cam));
        }
    }
    out
}

fn clamp_params<T: Real>(p: &mut [T; 8]) {
    let lim = T::lit(ELEVATION_LIMIT_DEG.to_radians());
    p[1] = p[1].max(-lim).min(lim);
    p[2] = p[2].max(T::lit(DISTANCE_RANGE.0)).min(T::lit(DISTANCE_RANGE.1));
    for o in &mut p[3..5] {
        *o = o.max(T::lit(-OFFSET_LIMIT)).min(T::lit(OFFSET_LIMIT));
    }
    for s in &mut p[5..8] {
        *s = s.max(T::lit(SCALE_MIN)).min(T::lit(SCALE_MAX));
    }
}

/// Initial probe steps for `step_size`: angles, distance, offsets, scales.
fn initial_steps<T: Real>(step_size: f64) -> [T; 8] {
    let k = step_size / 0.1;
    [0.1, 0.1, 0.1, 0.05, 0.05, 0.05, 0.05, 0.05].map(|s| T::lit(s * k))
}

/// Coordinate descent on the L1 silhouette loss.
///
/// Each round probes every parameter at `±step` and takes the best probe if
/// it lowers the loss. A rejected round would repeat identically until the
/// steps halve, so it is charged as the whole run of rejections at once.
pub fn optimize_with<T: Real>(
    renderer: &SilhouetteRenderer<T>,
    target: &Mask,
    h: &PoseHypothesis<T>,
    cfg: &OptimConfig,
) -> PoseHypothesis<T> {
    let mut buf = Mask::new(target.width(), target.height());
    let mut eval = |p: &[T; 8]| {
        let (cam, scale) = h.with_params(p);
        renderer.render_into(scale, &cam, &mut buf);
        buf.xor_count(target)
    };
    let mut p = h.params();
    clamp_params(&mut p);
    let mut loss = eval(&p);
    let n = target.len().max(1) as f64;
    let mut history = h.loss_history.clone();
    history.push(loss as f64 / n);
    let mut steps = initial_steps::<T>(cfg.step_size);
    let mut used = 0;
    // state before the last accepted move; its loss is known to be higher
    let mut prev: Option<[T; 8]> = None;
    while used < cfg.steps && loss > 0 && cfg.step_size > 0.0 {
        let mut best: Option<([T; 8], usize)> = None;
        for k in 0..8 {
            for up in [true, false] {
                let mut q = p;
                q[k] = if up { q[k] + steps[k] } else { q[k] - steps[k] };
                clamp_params(&mut q);
                if q == p || prev == Some(q) {
                    continue;
                }
                let l = eval(&q);
                if l < best.as_ref().map_or(loss, |b| b.1) {
                    best = Some((q, l));
                }
            }
        }
        match best {
            Some((q, l)) => {
                prev = Some(p);
                p = q;
                loss = l;
                history.push(loss as f64 / n);
                used += 1;
            }
            None => {
                used += PATIENCE;
                for s in &mut steps {
                    *s *= T::lit(0.5);
                }
            }
        }
    }
    let (cam, scale) = h.with_params(&p);
    PoseHypothesis {
        cam,
        scale,
        loss_history: history,
    }
}

/// Optimizes one hypothesis of `mesh` against a binary target silhouette.
pub fn optimize_hypothesis<T: Real>(
    mesh: &LabeledMesh<T>,
    target: &Mask,
    h: &PoseHypothesis<T>,
    cfg: &OptimConfig,
) -> PoseHypothesis<T> {
    optimize_with(&SilhouetteRenderer::new(mesh), target, h, cfg)
}

//! Multi-hypothesis pose fitting of templates to a part-labeled target and
//! selection of the best (template, pose).

pub mod config;
pub mod hypothesis;
pub mod losses;

use std::cmp::Ordering;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use config::OptimConfig;
pub use hypothesis::{init_hypotheses, optimize_hypothesis, optimize_with, PoseHypothesis};
pub use losses::{iou, l1_silhouette_loss, loss_dist, loss_iou, loss_miou};

use crate::error::CraftError;
use crate::geom::LabeledMesh;
use crate::raster::{render_labels, LabelMap, SilhouetteRenderer};
use crate::scalar::Real;

/// A refined hypothesis of one template with its selection losses.
#[derive(Debug, Clone, PartialEq)]
pub struct PoseResult<T> {
    pub template_id: String,
    pub hypothesis_index: usize,
    pub hypothesis: PoseHypothesis<T>,
    /// Class-labeled render at the hypothesis.
    pub render: LabelMap,
    pub l_iou: f64,
    pub l_miou: f64,
    pub l_dist: f64,
    pub l_total: f64,
}

/// Serializable summary of a [`PoseResult`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PoseRecord<T> {
    pub template_id: String,
    pub hypothesis_index: usize,
    pub hypothesis: PoseHypothesis<T>,
    pub l_iou: f64,
    pub l_miou: f64,
    pub l_dist: f64,
    pub l_total: f64,
}

impl<T: Real> PoseResult<T> {
    /// Renders `mesh` at `hypothesis` and scores it against `target`.
    pub fn evaluate(
        mesh: &LabeledMesh<T>,
        target: &LabelMap,
        hypothesis: PoseHypothesis<T>,
        hypothesis_index: usize,
        cfg: &OptimConfig,
    ) -> Result<Self, CraftError> {
        let render = render_labels(mesh, hypothesis.scale, &hypothesis.cam)?;
        let target = target.to_class_labels();
        let l_iou = loss_iou(&target.silhouette(), &render.silhouette())?;
        let l_miou = loss_miou(&target, &render)?;
        let l_dist = loss_dist(&target, &render)?;
        Ok(Self {
            template_id: mesh.template_id.clone(),
            hypothesis_index,
            hypothesis,
            render,
            l_iou,
            l_miou,
            l_dist,
            l_total: cfg.total(l_iou, l_miou, l_dist),
        })
    }

    pub fn record(&self) -> PoseRecord<T> {
        PoseRecord {
            template_id: self.template_id.clone(),
            hypothesis_index: self.hypothesis_index,
            hypothesis: self.hypothesis.clone(),
            l_iou: self.l_iou,
            l_miou: self.l_miou,
            l_dist: self.l_dist,
            l_total: self.l_total,
        }
    }

    fn selection_order(&self, other: &Self) -> Ordering {
        self.l_total
            .total_cmp(&other.l_total)
            .then(self.l_iou.total_cmp(&other.l_iou))
            .then_with(|| self.template_id.cmp(&other.template_id))
            .then(self.hypothesis_index.cmp(&other.hypothesis_index))
    }
}

/// Result with the lowest total loss; ties go to the lower IoU loss, then
/// the lower template id, then the lower hypothesis index.
///
/// Totals are recomputed from the component losses with `cfg`'s weights.
pub fn select_best<'a, T: Real>(
    results: &'a [PoseResult<T>],
    cfg: &OptimConfig,
) -> Result<&'a PoseResult<T>, CraftError> {
    let rescored: Vec<(f64, &PoseResult<T>)> = results
        .iter()
        .map(|r| (cfg.total(r.l_iou, r.l_miou, r.l_dist), r))
        .collect();
    rescored
        .iter()
        .min_by(|a, b| a.0.total_cmp(&b.0).then_with(|| a.1.selection_order(b.1)))
        .map(|(_, r)| *r)
        .ok_or(CraftError::EmptyResults)
}

/// Optimizes every starting hypothesis of one template against `target`.
/// Results come back in hypothesis order regardless of thread scheduling.
pub fn fit_template<T: Real>(
    mesh: &LabeledMesh<T>,
    target: &LabelMap,
    cfg: &OptimConfig,
) -> Result<Vec<PoseResult<T>>, CraftError> {
    cfg.validate()?;
    let renderer = SilhouetteRenderer::new(mesh);
    let sil = target.silhouette();
    init_hypotheses::<T>(cfg, target.width(), target.height())
        .into_par_iter()
        .enumerate()
        .map(|(i, h)| {
            let refined = optimize_with(&renderer, &sil, &h, cfg);
            PoseResult::evaluate(mesh, target, refined, i, cfg)
        })
        .collect()
}

/// Fits every template and returns the overall best result.
pub fn estimate_pose<T: Real>(
    templates: &[LabeledMesh<T>],
    target: &LabelMap,
    cfg: &OptimConfig,
) -> Result<PoseResult<T>, CraftError> {
    let mut winners = Vec::with_capacity(templates.len());
    for mesh in templates {
        let results = fit_template(mesh, target, cfg)?;
        winners.push(select_best(&results, cfg)?.clone());
    }
    select_best(&winners, cfg).cloned()
}

//! Success-rate metrics, part IoU and the exhaustive-search baselines.

mod baseline;
mod metrics;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

pub use baseline::{
    baseline_search, baseline_search_unpruned, group_types, BaselineConfig, BaselinePick,
    BaselineResult, Metric, SceneType,
};
pub use metrics::{
    count_parts, crop_pair, e_measure, mean_e_measure, part_count_accuracy, part_iou,
    silhouette_accuracy, viewpoint_error, vp_accuracy, PartCounts, SIL_THRESHOLD,
    VP_THRESHOLD_DEG,
};

use crate::error::CraftError;
use crate::geom::{ObjectClass, PartClass, TriMesh};
use crate::poseopt::iou;
use crate::primfit::PrimitivePart;
use crate::raster::{render_parts, Camera, LabelMap};
use crate::scalar::Real;

/// Renders placed primitives with their part classes; axles are internal
/// and left out.
pub fn render_primitive_parts<T: Real>(parts: &[PrimitivePart<T>], cam: &Camera<T>) -> Result<LabelMap, CraftError> {
    let meshes: Vec<(PartClass, TriMesh<T>)> = parts
        .iter()
        .filter_map(|p| p.part_class().map(|c| (c, p.mesh())))
        .collect();
    render_parts(&meshes, cam)
}

/// Annotated target: part masks, camera and per-class instance counts.
#[derive(Debug, Clone)]
pub struct GroundTruth<T> {
    pub object_class: ObjectClass,
    pub labels: LabelMap,
    pub camera: Camera<T>,
    pub part_counts: PartCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub vp_acc: bool,
    pub part_acc: bool,
    pub sil_acc: bool,
    pub success: bool,
    pub part_iou: f64,
    pub e_measure: f64,
    pub vp_error_deg: f64,
    pub sil_iou: f64,
}

/// Scores a craft, given as placed primitives in the model frame, against
/// the ground truth.
///
/// Viewpoint and silhouette use the predicted camera; part IoU and
/// E-measure render with the ground-truth camera and compare inside the
/// union bounding box fitted to `crop_size`.
pub fn evaluate<T: Real>(
    parts: &[PrimitivePart<T>],
    pred_cam: &Camera<T>,
    gt: &GroundTruth<T>,
    crop_size: usize,
) -> Result<EvalReport, CraftError> {
    let (w, h) = (gt.labels.width(), gt.labels.height());
    let pred_cam = Camera {
        width: w,
        height: h,
        ..*pred_cam
    };
    let gt_cam = Camera {
        width: w,
        height: h,
        ..gt.camera
    };
    let vp_error_deg = viewpoint_error(&pred_cam.rotation(), &gt_cam.rotation(), gt.object_class);
    let vp_acc = vp_error_deg <= VP_THRESHOLD_DEG;

    let pred_counts = count_parts(parts.iter().map(|p| p.label));
    let part_acc = part_count_accuracy(&pred_counts, &gt.part_counts);

    let gt_sil = gt.labels.silhouette();
    let pred_sil = render_primitive_parts(parts, &pred_cam)?.silhouette();
    let sil_iou = iou(&pred_sil, &gt_sil)?;
    let sil_acc = sil_iou > SIL_THRESHOLD;

    let at_gt = render_primitive_parts(parts, &gt_cam)?;
    let (pred, gt_crop) = crop_pair(&at_gt, &gt.labels, crop_size)?;
    Ok(EvalReport {
        vp_acc,
        part_acc,
        sil_acc,
        success: vp_acc && part_acc && sil_acc,
        part_iou: part_iou(&pred, &gt_crop)?,
        e_measure: mean_e_measure(&pred, &gt_crop)?,
        vp_error_deg,
        sil_iou,
    })
}

/// One evaluated input of a corpus with optional baseline part IoUs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub object_class: ObjectClass,
    pub report: EvalReport,
    pub baseline_emax: Option<f64>,
    pub baseline_miou: Option<f64>,
}

/// Per-class means of the success components and part IoUs, plus an
/// average row over the classes present. Missing baseline values are
/// left blank.
pub fn aggregate_csv(entries: &[CorpusEntry]) -> String {
    let mut by_class: BTreeMap<ObjectClass, Vec<&CorpusEntry>> = BTreeMap::new();
    for e in entries {
        by_class.entry(e.object_class).or_default().push(e);
    }
    let mean = |v: &[f64]| (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64);
    let cell = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_default();
    let mut out = String::from("class,n,vp_acc,part_acc,sil_acc,sr,baseline_emax,baseline_miou,ours_part_iou\n");
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 7];
    for (class, rows) in &by_class {
        let frac = |f: &dyn Fn(&EvalReport) -> bool| rows.iter().filter(|e| f(&e.report)).count() as f64 / rows.len() as f64;
        let vals = [
            Some(frac(&|r| r.vp_acc)),
            Some(frac(&|r| r.part_acc)),
            Some(frac(&|r| r.sil_acc)),
            Some(frac(&|r| r.success)),
            mean(&rows.iter().filter_map(|e| e.baseline_emax).collect::<Vec<_>>()),
            mean(&rows.iter().filter_map(|e| e.baseline_miou).collect::<Vec<_>>()),
            mean(&rows.iter().map(|e| e.report.part_iou).collect::<Vec<_>>()),
        ];
        let _ = write!(out, "{},{}", class.name(), rows.len());
        for (k, v) in vals.iter().enumerate() {
            let _ = write!(out, ",{}", cell(*v));
            columns[k].extend(v);
        }
        out.push('\n');
    }
    let _ = write!(out, "average,{}", entries.len());
    for c in &columns {
        let _ = write!(out, ",{}", cell(mean(c)));
    }
    out.push('\n');
    out
}

use std::collections::BTreeMap;

use crate::error::CraftError;
use crate::geom::{Mat3, ObjectClass, PartClass, PartLabel};
use crate::poseopt::iou;
use crate::raster::{LabelMap, Mask};
use crate::scalar::Real;

pub const VP_THRESHOLD_DEG: f64 = 30.0;
pub const SIL_THRESHOLD: f64 = 0.5;

pub type PartCounts = BTreeMap<PartClass, usize>;

/// Geodesic angle in degrees between two rotations. For yaw-symmetric
/// classes the smaller angle over a half-turn yaw of `pred` is used.
pub fn viewpoint_error<T: Real>(pred: &Mat3<T>, gt: &Mat3<T>, object_class: ObjectClass) -> f64 {
    let direct = pred.geodesic_angle(gt).as_f64();
    let angle = if object_class.is_yaw_symmetric() {
        let flipped = pred.mul_mat(&Mat3::rotation_y(T::PI()));
        direct.min(flipped.geodesic_angle(gt).as_f64())
    } else {
        direct
    };
    angle.to_degrees()
}

pub fn vp_accuracy<T: Real>(pred: &Mat3<T>, gt: &Mat3<T>, object_class: ObjectClass) -> bool {
    viewpoint_error(pred, gt, object_class) <= VP_THRESHOLD_DEG
}

/// Instance counts per part class; axles are skipped.
pub fn count_parts<I: IntoIterator<Item = PartLabel>>(labels: I) -> PartCounts {
    let mut counts = PartCounts::new();
    for class in labels.into_iter().filter_map(PartLabel::class) {
        *counts.entry(class).or_default() += 1;
    }
    counts
}

/// Equal per-class counts; zero entries are ignored.
pub fn part_count_accuracy(pred: &PartCounts, gt: &PartCounts) -> bool {
    let nz = |m: &PartCounts| m.iter().filter(|(_, &n)| n > 0).map(|(&c, &n)| (c, n)).collect::<Vec<_>>();
    nz(pred) == nz(gt)
}

/// Whether the silhouette IoU is strictly above `threshold`.
pub fn silhouette_accuracy(pred: &Mask, gt: &Mask, threshold: f64) -> Result<bool, CraftError> {
    Ok(iou(pred, gt)? > threshold)
}

fn per_class_mean(
    pred: &LabelMap,
    gt: &LabelMap,
    metric: impl Fn(&Mask, &Mask) -> Result<f64, CraftError>,
) -> Result<f64, CraftError> {
    if !pred.same_shape(gt) {
        return Err(CraftError::ResolutionMismatch(pred.width(), pred.height(), gt.width(), gt.height()));
    }
    let classes = gt.classes_present();
    if classes.is_empty() {
        return Ok(if pred.classes_present().is_empty() { 1.0 } else { 0.0 });
    }
    let mut sum = 0.0;
    for &c in &classes {
        sum += metric(&pred.class_mask(c), &gt.class_mask(c))?;
    }
    Ok(sum / classes.len() as f64)
}

/// Mean IoU over the part classes present in `gt`; a class missing from
/// `pred` scores 0. Two maps without parts score 1.
pub fn part_iou(pred: &LabelMap, gt: &LabelMap) -> Result<f64, CraftError> {
    per_class_mean(pred, gt, iou)
}

/// Enhanced-alignment measure of a binary prediction against a binary
/// ground truth.
///
/// Both maps are centered on their means and compared through the
/// alignment `ξ = 2 φ_gt φ_pred / (φ_gt² + φ_pred²)`, mapped by
/// `(1 + ξ)² / 4` and averaged over pixels. A constant ground truth has no
/// alignment term: an empty one scores the fraction of background in
/// `pred`, a full one the fraction of foreground.
pub fn e_measure(pred: &Mask, gt: &Mask) -> Result<f64, CraftError> {
    if !pred.same_shape(gt) {
        return Err(CraftError::ResolutionMismatch(pred.width(), pred.height(), gt.width(), gt.height()));
    }
    let n = gt.len();
    if n == 0 {
        return Ok(1.0);
    }
    let (ng, np) = (gt.count(), pred.count());
    let nf = n as f64;
    if ng == 0 {
        return Ok(1.0 - np as f64 / nf);
    }
    if ng == n {
        return Ok(np as f64 / nf);
    }
    let n11 = pred.and_count(gt);
    let n10 = ng - n11; // gt only
    let n01 = np - n11; // pred only
    let n00 = n - n11 - n10 - n01;
    let (mg, mp) = (ng as f64 / nf, np as f64 / nf);
    let f = |g: f64, p: f64| {
        let (a, b) = (g - mg, p - mp);
        let xi = 2.0 * a * b / (a * a + b * b);
        (1.0 + xi) * (1.0 + xi) / 4.0
    };
    let total = n11 as f64 * f(1.0, 1.0)
        + n10 as f64 * f(1.0, 0.0)
        + n01 as f64 * f(0.0, 1.0)
        + n00 as f64 * f(0.0, 0.0);
    Ok(total / nf)
}

/// Mean E-measure over the part classes present in `gt`.
pub fn mean_e_measure(pred: &LabelMap, gt: &LabelMap) -> Result<f64, CraftError> {
    per_class_mean(pred, gt, e_measure)
}

/// Crops both maps to the union bounding box of their silhouettes and fits
/// each into a `size`×`size` canvas. Maps without any foreground are only
/// resized.
pub fn crop_pair(pred: &LabelMap, gt: &LabelMap, size: usize) -> Result<(LabelMap, LabelMap), CraftError> {
    if !pred.same_shape(gt) {
        return Err(CraftError::ResolutionMismatch(pred.width(), pred.height(), gt.width(), gt.height()));
    }
    let boxes = [pred.silhouette().bbox(), gt.silhouette().bbox()];
    let union = boxes.into_iter().flatten().reduce(|a, b| {
        (a.0.min(b.0), a.1.min(b.1), a.2.max(b.2), a.3.max(b.3))
    });
    Ok(match union {
        Some((x0, y0, x1, y1)) => (
            pred.crop(x0, y0, x1, y1).fit_square(size),
            gt.crop(x0, y0, x1, y1).fit_square(size),
        ),
        None => (pred.fit_square(size), gt.fit_square(size)),
    })
}

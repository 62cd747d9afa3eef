//! Silhouette and part-mask losses.

use crate::error::CraftError;
use crate::raster::{LabelMap, Mask};

fn check_shapes(a: &Mask, b: &Mask) -> Result<(), CraftError> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(CraftError::ResolutionMismatch(a.width(), a.height(), b.width(), b.height()))
    }
}

fn check_maps(a: &LabelMap, b: &LabelMap) -> Result<(), CraftError> {
    if a.same_shape(b) {
        Ok(())
    } else {
        Err(CraftError::ResolutionMismatch(a.width(), a.height(), b.width(), b.height()))
    }
}

/// Mean absolute pixel difference of two binary masks.
pub fn l1_silhouette_loss(render: &Mask, target: &Mask) -> Result<f64, CraftError> {
    check_shapes(render, target)?;
    if render.is_empty() {
        return Ok(0.0);
    }
    Ok(render.xor_count(target) as f64 / render.len() as f64)
}

/// IoU of two masks; two empty masks agree perfectly.
pub fn iou(a: &Mask, b: &Mask) -> Result<f64, CraftError> {
    check_shapes(a, b)?;
    let union = a.or_count(b);
    if union == 0 {
        return Ok(1.0);
    }
    Ok(a.and_count(b) as f64 / union as f64)
}

/// `1 - IoU` of the whole silhouettes.
pub fn loss_iou(target_sil: &Mask, render_sil: &Mask) -> Result<f64, CraftError> {
    Ok(1.0 - iou(target_sil, render_sil)?)
}

/// Mean over the part classes present in `target` of `1 - IoU`; a class the
/// render lacks contributes 1. A target without parts gives 0.
pub fn loss_miou(target: &LabelMap, render: &LabelMap) -> Result<f64, CraftError> {
    check_maps(target, render)?;
    let classes = target.classes_present();
    if classes.is_empty() {
        return Ok(0.0);
    }
    let mut sum = 0.0;
    for &c in &classes {
        sum += 1.0 - iou(&target.class_mask(c), &render.class_mask(c))?;
    }
    Ok(sum / classes.len() as f64)
}

/// Mean over the part classes present in `target` of the distance between
/// mask centroids divided by the image diagonal (between the centers of
/// opposite corner pixels); an empty mask on either side contributes 1.
pub fn loss_dist(target: &LabelMap, render: &LabelMap) -> Result<f64, CraftError> {
    check_maps(target, render)?;
    let classes = target.classes_present();
    if classes.is_empty() {
        return Ok(0.0);
    }
    let diag = ((target.width() as f64 - 1.0).hypot(target.height() as f64 - 1.0)).max(1.0);
    let mut sum = 0.0;
    for &c in &classes {
        sum += match (target.class_mask(c).centroid(), render.class_mask(c).centroid()) {
            (Some((tx, ty)), Some((rx, ry))) => ((tx - rx).hypot(ty - ry) / diag).min(1.0),
            _ => 1.0,
        };
    }
    Ok(sum / classes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::PartClass;
    use std::collections::BTreeMap;

    fn square(w: usize, x0: usize, y0: usize, s: usize) -> Mask {
        Mask::from_fn(w, w, |x, y| x >= x0 && x < x0 + s && y >= y0 && y < y0 + s)
    }

    #[test]
    fn l1_examples() {
        let a = square(4, 0, 0, 2);
        assert_eq!(l1_silhouette_loss(&a, &a).unwrap(), 0.0);
        assert_eq!(l1_silhouette_loss(&a, &a.complement()).unwrap(), 1.0);
        let b = square(4, 2, 2, 2);
        // a and b differ in 8 pixels; a vs 4 pixels of b shifted
        let c = Mask::from_fn(4, 4, |x, y| (x < 2 && y < 2) || (x == 3 && y == 3) || (x == 2 && y == 0) || (x == 2 && y == 1) || (x == 3 && y == 0));
        assert_eq!(c.xor_count(&a), 4);
        assert_eq!(l1_silhouette_loss(&c, &a).unwrap(), 0.25);
        assert_eq!(l1_silhouette_loss(&a, &b).unwrap(), 0.5);
        assert!(l1_silhouette_loss(&a, &Mask::new(5, 4)).is_err());
    }

    #[test]
    fn iou_examples() {
        let a = square(8, 1, 1, 2);
        let b = square(8, 2, 1, 2);
        assert!((loss_iou(&a, &b).unwrap() - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(loss_iou(&a, &a).unwrap(), 0.0);
        assert_eq!(loss_iou(&a, &square(8, 5, 5, 2)).unwrap(), 1.0);
        assert_eq!(loss_iou(&Mask::new(8, 8), &Mask::new(8, 8)).unwrap(), 0.0);
    }

    fn map(w: usize, cells: &[(usize, usize, PartClass)]) -> LabelMap {
        let mut data = vec![0u8; w * w];
        let mut legend = BTreeMap::new();
        for &(x, y, c) in cells {
            data[y * w + x] = c.index();
            legend.insert(c.index(), c);
        }
        LabelMap::new(w, w, data, legend).unwrap()
    }

    #[test]
    fn dist_corner_to_corner_is_one() {
        let t = map(8, &[(0, 0, PartClass::Wheel)]);
        let r = map(8, &[(7, 7, PartClass::Wheel)]);
        assert!((loss_dist(&t, &r).unwrap() - 1.0).abs() < 1e-12);
        let missing = map(8, &[(7, 7, PartClass::BusBody)]);
        assert_eq!(loss_dist(&t, &missing).unwrap(), 1.0);
        assert_eq!(loss_miou(&t, &missing).unwrap(), 1.0);
    }
}

//! Software rasterizer for part-label maps and silhouettes.

pub mod camera;
pub mod labelmap;
pub mod mask;
pub mod render;
pub mod silhouette;

pub use camera::Camera;
pub use labelmap::LabelMap;
pub use mask::Mask;
pub use render::{render_instances, render_labels, render_parts};
pub use silhouette::SilhouetteRenderer;

use crate::geom::PartClass;

/// Binary mask of all non-background pixels.
pub fn silhouette(map: &LabelMap) -> Mask {
    map.silhouette()
}

/// Binary mask of the pixels labeled `part`, over all of its instances.
pub fn class_mask(map: &LabelMap, part: PartClass) -> Mask {
    map.class_mask(part)
}

use serde::{Deserialize, Serialize};

use super::config::PipelineConfig;
use crate::error::CraftError;
use crate::evalkit::{count_parts, GroundTruth};
use crate::geom::{LabeledMesh, ObjectClass, Vec3};
use crate::matching::{propose, CraftProposal, SceneObject};
use crate::poseopt::{estimate_pose, PoseRecord};
use crate::primfit::{simplify_model, PrimitivePart};
use crate::raster::{render_instances, Camera, LabelMap};
use crate::structure::{
    correspond_parts, filter_parts, instances_from_template, mirror_completion, InstanceRecord, MaskMatch,
};

/// Object class named by the unique part classes of the input legend.
pub fn object_class_of(input: &LabelMap) -> Result<ObjectClass, CraftError> {
    ObjectClass::from_parts(input.classes_present())
}

/// Winning template and pose for an instance-labeled input.
pub fn pose_stage(input: &LabelMap, cfg: &PipelineConfig) -> Result<(ObjectClass, PoseRecord<f64>, LabelMap), CraftError> {
    let object_class = object_class_of(input)?;
    let templates = cfg.templates_for(object_class)?;
    let best = estimate_pose(&templates, input, &cfg.pose_config())?;
    Ok((object_class, best.record(), best.render))
}

/// Template instances kept, completed and simplified.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimplifiedModel {
    pub object_class: ObjectClass,
    pub template_id: String,
    pub camera: Camera<f64>,
    pub scale: Vec3<f64>,
    pub matches: Vec<MaskMatch>,
    pub instances: Vec<InstanceRecord<f64>>,
    pub parts: Vec<PrimitivePart<f64>>,
}

/// Keeps the template instances visible in the input, mirrors one-sided
/// parts and fits primitives (plus axles where the class has them).
pub fn simplify_stage(
    template: &LabeledMesh<f64>,
    pose: &PoseRecord<f64>,
    input: &LabelMap,
    cfg: &PipelineConfig,
) -> Result<SimplifiedModel, CraftError> {
    let h = &pose.hypothesis;
    let cam = Camera {
        width: input.width(),
        height: input.height(),
        ..h.cam
    };
    let render = render_instances(template, h.scale, &cam)?;
    let matches = correspond_parts(&render, input)?;
    let instances = instances_from_template(template, h.scale);
    let kept = filter_parts(&instances, &matches)?;
    let completed = mirror_completion(&kept);
    let parts = simplify_model(&completed, template.object_class, cfg.samples, cfg.seed)?;
    Ok(SimplifiedModel {
        object_class: template.object_class,
        template_id: template.template_id.clone(),
        camera: cam,
        scale: h.scale,
        matches,
        instances: completed.iter().map(|i| i.record()).collect(),
        parts,
    })
}

pub fn match_stage(model: &SimplifiedModel, scene: &[SceneObject<f64>]) -> Result<CraftProposal<f64>, CraftError> {
    propose(&model.parts, scene)
}

/// Instance-labeled render of a template with its ground truth annotation.
pub fn synthesize(template: &LabeledMesh<f64>, cam: &Camera<f64>) -> Result<(LabelMap, GroundTruth<f64>), CraftError> {
    let input = render_instances(template, Vec3::splat(1.0), cam)?;
    let counts = count_parts(template.part_instances().iter().map(|i| i.part_class.into()));
    let gt = GroundTruth {
        object_class: template.object_class,
        labels: input.to_class_labels(),
        camera: *cam,
        part_counts: counts,
    };
    Ok((input, gt))
}

//! File-level commands: each stage reads the previous stage's files and
//! writes JSON artifacts that embed the config and seed of the run.

mod config;
mod stages;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

pub use config::{load_template_dir, PipelineConfig};
pub use stages::{match_stage, object_class_of, pose_stage, simplify_stage, synthesize, SimplifiedModel};

use crate::error::CraftError;
use crate::evalkit::{
    baseline_search, evaluate, render_primitive_parts, BaselineConfig, BaselineResult, EvalReport, GroundTruth,
    Metric,
};
use crate::geom::{ObjectClass, PartClass, Vec3};
use crate::matching::{builtin_scene, load_scene, CraftProposal, SceneObject};
use crate::poseopt::PoseRecord;
use crate::primfit::simplify_model;
use crate::raster::{Camera, LabelMap};
use crate::structure::instances_from_template;

/// Envelope of every JSON output.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Artifact<B> {
    pub seed: u64,
    pub config: PipelineConfig,
    #[serde(flatten)]
    pub body: B,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoseFile {
    pub object_class: ObjectClass,
    pub input: String,
    pub pose: PoseRecord<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProposalFile {
    pub object_class: ObjectClass,
    pub template_id: String,
    /// Estimated camera, used for the viewpoint and silhouette checks.
    pub camera: Camera<f64>,
    pub scene: String,
    pub proposal: CraftProposal<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub ground_truth: String,
    pub report: EvalReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselineFile {
    pub object_class: ObjectClass,
    pub scene: String,
    pub result: BaselineResult<f64>,
}

/// Ground-truth annotation; `labels` is a label map path relative to the
/// annotation file. `template` names the layout used by the baselines.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruthFile {
    pub object_class: ObjectClass,
    pub camera: Camera<f64>,
    pub part_counts: BTreeMap<PartClass, usize>,
    pub labels: String,
    #[serde(default)]
    pub template: Option<String>,
}

impl GroundTruthFile {
    pub fn load(path: &Path) -> Result<(Self, GroundTruth<f64>), CraftError> {
        let file: Self = read_json(path)?;
        let dir = path.parent().unwrap_or(Path::new("."));
        let labels = LabelMap::load(&dir.join(&file.labels))?;
        let gt = GroundTruth {
            object_class: file.object_class,
            labels,
            camera: file.camera,
            part_counts: file.part_counts.clone(),
        };
        Ok((file, gt))
    }
}

pub fn read_json<V: DeserializeOwned>(path: &Path) -> Result<V, CraftError> {
    Ok(serde_json::from_str(&std::fs::read_to_string(path)?)?)
}

pub fn write_json<V: Serialize>(path: &Path, value: &V) -> Result<(), CraftError> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

fn file_name(path: &Path) -> String {
    path.file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn artifact<B>(cfg: &PipelineConfig, body: B) -> Artifact<B> {
    Artifact {
        seed: cfg.seed,
        config: cfg.clone(),
        body,
    }
}

/// A scene file path, or a bundled scene name (`scene1`, `scene2`) when no
/// such file exists.
pub fn resolve_scene(arg: &str) -> Result<(String, Vec<SceneObject<f64>>), CraftError> {
    let path = Path::new(arg);
    if !path.exists() {
        if let Some(scene) = builtin_scene(arg) {
            return Ok((arg.to_string(), scene));
        }
    }
    Ok((file_name(path), load_scene(path)?))
}

/// Output file names inside the output directory.
pub mod names {
    pub const POSE: &str = "pose.json";
    pub const POSE_RENDER: &str = "pose_render.pgm";
    pub const MODEL: &str = "model.json";
    pub const PROPOSAL: &str = "proposal.json";
    pub const CRAFT_RENDER: &str = "craft.pgm";
    pub const REPORT: &str = "report.json";
    pub const INPUT: &str = "input.pgm";
    pub const GROUND_TRUTH: &str = "gt.json";
    pub const GROUND_TRUTH_LABELS: &str = "gt.pgm";
}

/// Fits the templates of the input's object class and writes the winning
/// pose with its class render.
pub fn cmd_pose(input: &Path, cfg: &PipelineConfig, out: &Path) -> Result<PathBuf, CraftError> {
    std::fs::create_dir_all(out)?;
    let map = LabelMap::load(input)?;
    let (object_class, pose, render) = pose_stage(&map, cfg)?;
    render.save(&out.join(names::POSE_RENDER))?;
    let path = out.join(names::POSE);
    let body = PoseFile {
        object_class,
        input: file_name(input),
        pose,
    };
    write_json(&path, &artifact(cfg, body))?;
    Ok(path)
}

/// Prunes, completes and simplifies the posed template into a primitive
/// model.
pub fn cmd_simplify(pose_file: &Path, input: &Path, cfg: &PipelineConfig, out: &Path) -> Result<PathBuf, CraftError> {
    std::fs::create_dir_all(out)?;
    let pose: Artifact<PoseFile> = read_json(pose_file)?;
    let map = LabelMap::load(input)?;
    let template = cfg.template(&pose.body.pose.template_id)?;
    let model = simplify_stage(&template, &pose.body.pose, &map, cfg)?;
    let path = out.join(names::MODEL);
    write_json(&path, &artifact(cfg, model))?;
    Ok(path)
}

/// Matches the model's parts to scene objects and renders the craft at
/// the estimated camera.
pub fn cmd_match(model_file: &Path, scene: &str, cfg: &PipelineConfig, out: &Path) -> Result<PathBuf, CraftError> {
    std::fs::create_dir_all(out)?;
    let model: Artifact<SimplifiedModel> = read_json(model_file)?;
    let (scene_name, objects) = resolve_scene(scene)?;
    let proposal = match_stage(&model.body, &objects)?;
    let render = render_primitive_parts(&proposal.placed_parts(), &model.body.camera)?;
    render.save(&out.join(names::CRAFT_RENDER))?;
    let path = out.join(names::PROPOSAL);
    let body = ProposalFile {
        object_class: model.body.object_class,
        template_id: model.body.template_id.clone(),
        camera: model.body.camera,
        scene: scene_name,
        proposal,
    };
    write_json(&path, &artifact(cfg, body))?;
    Ok(path)
}

pub fn cmd_evaluate(proposal_file: &Path, gt_file: &Path, cfg: &PipelineConfig, out: &Path) -> Result<PathBuf, CraftError> {
    std::fs::create_dir_all(out)?;
    let proposal: Artifact<ProposalFile> = read_json(proposal_file)?;
    let (_, gt) = GroundTruthFile::load(gt_file)?;
    let report = evaluate(
        &proposal.body.proposal.placed_parts(),
        &proposal.body.camera,
        &gt,
        cfg.crop_size,
    )?;
    let path = out.join(names::REPORT);
    let body = ReportFile {
        ground_truth: file_name(gt_file),
        report,
    };
    write_json(&path, &artifact(cfg, body))?;
    Ok(path)
}

/// Exhaustive baseline over the scene for the ground-truth template layout.
pub fn cmd_baseline(
    gt_file: &Path,
    scene: &str,
    metric: Metric,
    cfg: &PipelineConfig,
    out: &Path,
) -> Result<PathBuf, CraftError> {
    std::fs::create_dir_all(out)?;
    let (file, gt) = GroundTruthFile::load(gt_file)?;
    let template_id = file
        .template
        .as_deref()
        .ok_or_else(|| CraftError::InvalidConfig("ground truth names no template for the baseline layout".into()))?;
    let template = cfg.template(template_id)?;
    let instances = instances_from_template(&template, Vec3::splat(1.0));
    let layout = simplify_model(&instances, template.object_class, cfg.samples, cfg.seed)?;
    let (scene_name, objects) = resolve_scene(scene)?;
    let bcfg = BaselineConfig {
        crop_size: cfg.crop_size,
        ..BaselineConfig::new(metric, gt.labels, gt.camera, layout)
    };
    let result = baseline_search(&objects, &bcfg)?;
    let stem = match metric {
        Metric::Miou => "baseline_miou",
        Metric::EMax => "baseline_emax",
    };
    render_primitive_parts(&result.parts, &bcfg.gt_camera)?.save(&out.join(format!("{stem}.pgm")))?;
    let path = out.join(format!("{stem}.json"));
    let body = BaselineFile {
        object_class: file.object_class,
        scene: scene_name,
        result,
    };
    write_json(&path, &artifact(cfg, body))?;
    Ok(path)
}

/// Pose, simplify, match and render; evaluates too when a ground truth is
/// given. Returns every file written.
pub fn cmd_pipeline(
    input: &Path,
    scene: &str,
    gt_file: Option<&Path>,
    cfg: &PipelineConfig,
    out: &Path,
) -> Result<Vec<PathBuf>, CraftError> {
    // fail on a bad scene before the expensive pose stage
    resolve_scene(scene)?;
    let pose = cmd_pose(input, cfg, out)?;
    let model = cmd_simplify(&pose, input, cfg, out)?;
    let proposal = cmd_match(&model, scene, cfg, out)?;
    let mut files = vec![pose, out.join(names::POSE_RENDER), model, proposal, out.join(names::CRAFT_RENDER)];
    if let Some(gt) = gt_file {
        files.push(cmd_evaluate(&files[3], gt, cfg, out)?);
    }
    Ok(files)
}

/// Renders a template at `cam` as an instance-labeled input and writes it
/// with its ground-truth annotation.
pub fn cmd_synth(template_id: &str, cam: &Camera<f64>, cfg: &PipelineConfig, out: &Path) -> Result<Vec<PathBuf>, CraftError> {
    std::fs::create_dir_all(out)?;
    let template = cfg.template(template_id)?;
    let (input, gt) = synthesize(&template, cam)?;
    let input_path = out.join(names::INPUT);
    input.save(&input_path)?;
    gt.labels.save(&out.join(names::GROUND_TRUTH_LABELS))?;
    let file = GroundTruthFile {
        object_class: gt.object_class,
        camera: gt.camera,
        part_counts: gt.part_counts,
        labels: names::GROUND_TRUTH_LABELS.to_string(),
        template: Some(template_id.to_string()),
    };
    let gt_path = out.join(names::GROUND_TRUTH);
    write_json(&gt_path, &file)?;
    Ok(vec![input_path, gt_path])
}

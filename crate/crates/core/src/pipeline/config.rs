use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::obj::read_obj;
use crate::geom::templates::{generate_template, parse_template_id, templates_for};
use crate::geom::{LabeledMesh, ObjectClass};
use crate::poseopt::OptimConfig;
use crate::primfit::DEFAULT_SAMPLES;

/// Settings shared by every command. The run seed replaces `pose.seed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PipelineConfig {
    pub seed: u64,
    pub pose: OptimConfig,
    /// Surface samples per shape when choosing primitives.
    pub samples: usize,
    /// Side of the square canvas used for part IoU and the baselines.
    pub crop_size: usize,
    /// Directory of `.obj` templates; the procedural set when absent.
    pub templates: Option<PathBuf>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            pose: OptimConfig::default(),
            samples: DEFAULT_SAMPLES,
            crop_size: 256,
            templates: None,
        }
    }
}

impl PipelineConfig {
    /// Reads a TOML or JSON config, chosen by file extension.
    pub fn load(path: &Path) -> Result<Self, CraftError> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = match path.extension().and_then(|e| e.to_str()) {
            Some("json") => serde_json::from_str(&text)?,
            _ => toml::from_str(&text).map_err(|e| CraftError::InvalidConfig(e.to_string()))?,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CraftError> {
        self.pose.validate()?;
        if self.samples == 0 {
            return Err(CraftError::InvalidConfig("samples must be at least 1".into()));
        }
        if self.crop_size < 32 {
            return Err(CraftError::InvalidConfig("crop_size must be at least 32".into()));
        }
        Ok(())
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn pose_config(&self) -> OptimConfig {
        OptimConfig {
            seed: self.seed,
            ..self.pose.clone()
        }
    }

    /// Templates of one object class, sorted by id.
    pub fn templates_for(&self, object_class: ObjectClass) -> Result<Vec<LabeledMesh<f64>>, CraftError> {
        match &self.templates {
            None => Ok(templates_for(object_class)),
            Some(dir) => {
                let all = load_template_dir(dir)?;
                let found: Vec<_> = all.into_iter().filter(|m| m.object_class == object_class).collect();
                if found.is_empty() {
                    return Err(CraftError::InvalidConfig(format!(
                        "no {object_class} templates in {}",
                        dir.display()
                    )));
                }
                Ok(found)
            }
        }
    }

    pub fn template(&self, id: &str) -> Result<LabeledMesh<f64>, CraftError> {
        match &self.templates {
            None => {
                let (class, variant) = parse_template_id(id).ok_or_else(|| CraftError::UnknownName(id.to_string()))?;
                generate_template(class, variant)
            }
            Some(dir) => load_template_dir(dir)?
                .into_iter()
                .find(|m| m.template_id == id)
                .ok_or_else(|| CraftError::UnknownName(id.to_string())),
        }
    }
}

/// Every `.obj` file of `dir`, named by file stem, in name order.
pub fn load_template_dir(dir: &Path) -> Result<Vec<LabeledMesh<f64>>, CraftError> {
    let mut paths: Vec<PathBuf> = std::fs::read_dir(dir)?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|e| e == "obj"))
        .collect();
    paths.sort();
    paths
        .iter()
        .map(|p| {
            let id = p.file_stem().and_then(|s| s.to_str()).unwrap_or("template");
            read_obj(&std::fs::read_to_string(p)?, id, None)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn toml_and_json_configs() {
        let dir = tempfile::tempdir().unwrap();
        let t = dir.path().join("c.toml");
        std::fs::write(&t, "seed = 3\n[pose]\nn_views = 4\nsteps = 10\n").unwrap();
        let cfg = PipelineConfig::load(&t).unwrap();
        assert_eq!(cfg.seed, 3);
        assert_eq!(cfg.pose.n_views, 4);
        assert_eq!(cfg.pose.n_batches, 5);
        assert_eq!(cfg.pose_config().seed, 3);
        let j = dir.path().join("c.json");
        std::fs::write(&j, r#"{"samples": 256}"#).unwrap();
        assert_eq!(PipelineConfig::load(&j).unwrap().samples, 256);
        std::fs::write(&t, "sed = 3\n").unwrap();
        assert!(PipelineConfig::load(&t).is_err());
    }

    #[test]
    fn template_lookup() {
        let cfg = PipelineConfig::default();
        assert_eq!(cfg.templates_for(ObjectClass::Chair).unwrap().len(), 3);
        assert_eq!(cfg.template("bus_2").unwrap().template_id, "bus_2");
        assert!(cfg.template("bus_9").is_err());
    }

    #[test]
    fn template_directory() {
        let dir = tempfile::tempdir().unwrap();
        let mesh = generate_template::<f64>(ObjectClass::Table, 1).unwrap();
        std::fs::write(dir.path().join("my_table.obj"), crate::geom::obj::write_obj(&mesh)).unwrap();
        let cfg = PipelineConfig {
            templates: Some(dir.path().to_path_buf()),
            ..Default::default()
        };
        let found = cfg.templates_for(ObjectClass::Table).unwrap();
        assert_eq!(found.len(), 1);
        assert_eq!(found[0].template_id, "my_table");
        assert!(cfg.templates_for(ObjectClass::Bus).is_err());
        assert!(cfg.template("my_table").is_ok());
    }
}

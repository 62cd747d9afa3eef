use std::collections::BTreeMap;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::metrics::{count_parts, crop_pair, mean_e_measure, part_iou, PartCounts};
use super::render_primitive_parts;
use crate::error::CraftError;
use crate::geom::{PartClass, PartLabel, ShapeKind};
use crate::matching::{place_object, SceneObject};
use crate::primfit::PrimitivePart;
use crate::raster::{Camera, LabelMap};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    /// Mean part IoU.
    Miou,
    /// Mean per-part E-measure.
    EMax,
}

impl FromStr for Metric {
    type Err = CraftError;

    fn from_str(s: &str) -> Result<Self, CraftError> {
        match s.to_ascii_lowercase().as_str() {
            "miou" => Ok(Metric::Miou),
            "emax" | "e_max" | "me_max" => Ok(Metric::EMax),
            _ => Err(CraftError::UnknownName(s.to_string())),
        }
    }
}

impl Metric {
    pub fn score(self, pred: &LabelMap, gt: &LabelMap) -> Result<f64, CraftError> {
        match self {
            Metric::Miou => part_iou(pred, gt),
            Metric::EMax => mean_e_measure(pred, gt),
        }
    }
}

/// Inputs of the exhaustive baselines: ground-truth masks and camera, and a
/// layout of simplified template parts that fixes the part count and the
/// placement of each object.
#[derive(Debug, Clone)]
pub struct BaselineConfig<T> {
    pub metric: Metric,
    pub gt_masks: LabelMap,
    pub gt_camera: Camera<T>,
    pub layout: Vec<PrimitivePart<T>>,
    /// Classes whose instances must all use objects of identical dims.
    pub uniform_classes: Vec<PartClass>,
    pub crop_size: usize,
}

impl<T: Real> BaselineConfig<T> {
    pub fn new(metric: Metric, gt_masks: LabelMap, gt_camera: Camera<T>, layout: Vec<PrimitivePart<T>>) -> Self {
        Self {
            metric,
            gt_masks,
            gt_camera,
            layout,
            uniform_classes: PartClass::ALL.into_iter().filter(|c| c.requires_uniform_dims()).collect(),
            crop_size: 256,
        }
    }

    pub fn part_counts(&self) -> PartCounts {
        count_parts(self.layout.iter().map(|p| p.label))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BaselinePick {
    pub part_id: usize,
    pub label: PartLabel,
    pub object_id: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct BaselineResult<T> {
    pub metric: Metric,
    pub score: f64,
    /// Part IoU of the chosen combination.
    pub part_iou: f64,
    /// Number of combinations rendered and scored.
    pub evaluated: usize,
    /// Model units per scene unit.
    pub scale: T,
    pub picks: Vec<BaselinePick>,
    pub parts: Vec<PrimitivePart<T>>,
}

/// Scene objects with identical shape and dims, ids sorted.
#[derive(Debug, Clone)]
pub struct SceneType<T> {
    pub representative: SceneObject<T>,
    pub ids: Vec<String>,
}

/// Groups the scene by (shape, dims), ordered by that key.
pub fn group_types<T: Real>(scene: &[SceneObject<T>]) -> Vec<SceneType<T>> {
    let mut groups: BTreeMap<_, Vec<&SceneObject<T>>> = BTreeMap::new();
    for o in scene {
        groups.entry(o.type_key()).or_default().push(o);
    }
    groups
        .into_values()
        .map(|mut v| {
            v.sort_by(|a, b| a.id.cmp(&b.id));
            SceneType {
                representative: v[0].clone(),
                ids: v.iter().map(|o| o.id.clone()).collect(),
            }
        })
        .collect()
}

struct Search<'a, T> {
    cfg: &'a BaselineConfig<T>,
    slots: Vec<&'a PrimitivePart<T>>,
    types: Vec<SceneType<T>>,
}

impl<'a, T: Real> Search<'a, T> {
    fn new(scene: &[SceneObject<T>], cfg: &'a BaselineConfig<T>) -> Result<Self, CraftError> {
        if !cfg.gt_masks.same_shape(&LabelMap::empty(cfg.gt_camera.width, cfg.gt_camera.height)) {
            return Err(CraftError::ResolutionMismatch(
                cfg.gt_camera.width,
                cfg.gt_camera.height,
                cfg.gt_masks.width(),
                cfg.gt_masks.height(),
            ));
        }
        let mut slots: Vec<&PrimitivePart<T>> = cfg.layout.iter().filter(|p| p.part_class().is_some()).collect();
        slots.sort_by_key(|p| p.id);
        if slots.is_empty() {
            return Err(CraftError::EmptyModel);
        }
        Ok(Self {
            cfg,
            slots,
            types: group_types(scene),
        })
    }

    fn slot_shape(&self, s: usize) -> ShapeKind {
        self.slots[s].primitive.kind()
    }

    fn is_uniform(&self, s: usize) -> bool {
        self.slots[s].part_class().is_some_and(|c| self.cfg.uniform_classes.contains(&c))
    }

    /// Slot groups assigned together: one group per uniform class, one per
    /// other slot.
    fn variables(&self) -> Vec<Vec<usize>> {
        let mut vars: Vec<Vec<usize>> = Vec::new();
        let mut uniform: BTreeMap<PartClass, usize> = BTreeMap::new();
        for s in 0..self.slots.len() {
            if self.is_uniform(s) {
                let class = self.slots[s].part_class().expect("classed slot");
                match uniform.get(&class) {
                    Some(&v) => vars[v].push(s),
                    None => {
                        uniform.insert(class, vars.len());
                        vars.push(vec![s]);
                    }
                }
            } else {
                vars.push(vec![s]);
            }
        }
        vars
    }

    /// Type index per slot for every feasible combination, generated
    /// variable by variable with shape, uniformity and stock checks.
    fn pruned_combinations(&self) -> Vec<Vec<usize>> {
        let vars = self.variables();
        let mut out = Vec::new();
        let mut combo = vec![usize::MAX; self.slots.len()];
        let mut used = vec![0usize; self.types.len()];
        self.descend(&vars, 0, &mut combo, &mut used, &mut out);
        out
    }

    fn descend(
        &self,
        vars: &[Vec<usize>],
        v: usize,
        combo: &mut Vec<usize>,
        used: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        let Some(slots) = vars.get(v) else {
            out.push(combo.clone());
            return;
        };
        let shape = self.slot_shape(slots[0]);
        if slots.iter().any(|&s| self.slot_shape(s) != shape) {
            return;
        }
        for (t, ty) in self.types.iter().enumerate() {
            if ty.representative.shape() != shape || used[t] + slots.len() > ty.ids.len() {
                continue;
            }
            used[t] += slots.len();
            for &s in slots {
                combo[s] = t;
            }
            self.descend(vars, v + 1, combo, used, out);
            used[t] -= slots.len();
        }
    }

    /// Same feasibility rules applied after the fact to a type combination.
    fn feasible(&self, combo: &[usize]) -> bool {
        let mut used = vec![0usize; self.types.len()];
        for (s, &t) in combo.iter().enumerate() {
            used[t] += 1;
            if self.types[t].representative.shape() != self.slot_shape(s) {
                return false;
            }
        }
        if used.iter().zip(&self.types).any(|(&u, ty)| u > ty.ids.len()) {
            return false;
        }
        for a in 0..combo.len() {
            for b in a + 1..combo.len() {
                if self.is_uniform(a)
                    && self.slots[a].part_class() == self.slots[b].part_class()
                    && combo[a] != combo[b]
                {
                    return false;
                }
            }
        }
        true
    }

    /// Global scale: summed leading part dims over summed leading object dims.
    fn scale(&self, combo: &[usize]) -> T {
        let (mut num, mut den) = (T::zero(), T::zero());
        for (s, &t) in combo.iter().enumerate() {
            num += self.slots[s].primitive.dim_vector()[0];
            den += self.types[t].representative.dim_vector()[0];
        }
        num / den
    }

    fn placed(&self, combo: &[usize]) -> (T, Vec<PrimitivePart<T>>) {
        let scale = self.scale(combo);
        let parts = combo
            .iter()
            .enumerate()
            .map(|(s, &t)| {
                let slot = self.slots[s];
                PrimitivePart {
                    id: slot.id,
                    label: slot.label,
                    primitive: place_object(&slot.primitive, &self.types[t].representative, scale),
                    transform: slot.transform,
                }
            })
            .collect();
        (scale, parts)
    }

    fn score(&self, combo: &[usize]) -> Result<f64, CraftError> {
        let (_, parts) = self.placed(combo);
        let render = render_primitive_parts(&parts, &self.cfg.gt_camera)?;
        let (pred, gt) = crop_pair(&render, &self.cfg.gt_masks, self.cfg.crop_size)?;
        self.cfg.metric.score(&pred, &gt)
    }

    fn best(&self, scored: Vec<(f64, Vec<usize>)>, evaluated: usize) -> Result<BaselineResult<T>, CraftError> {
        let (score, combo) = scored
            .into_iter()
            .max_by(|a, b| a.0.total_cmp(&b.0).then_with(|| b.1.cmp(&a.1)))
            .ok_or(CraftError::NoFeasibleCombination)?;
        let (scale, parts) = self.placed(&combo);
        let render = render_primitive_parts(&parts, &self.cfg.gt_camera)?;
        let (pred, gt) = crop_pair(&render, &self.cfg.gt_masks, self.cfg.crop_size)?;
        let part_iou = part_iou(&pred, &gt)?;
        let mut taken = vec![0usize; self.types.len()];
        let picks = combo
            .iter()
            .enumerate()
            .map(|(s, &t)| {
                let id = self.types[t].ids[taken[t]].clone();
                taken[t] += 1;
                BaselinePick {
                    part_id: self.slots[s].id,
                    label: self.slots[s].label,
                    object_id: id,
                }
            })
            .collect();
        Ok(BaselineResult {
            metric: self.cfg.metric,
            score,
            part_iou,
            evaluated,
            scale,
            picks,
            parts,
        })
    }
}

/// Best combination of scene objects for the layout under the configured
/// metric. Enumerates object types rather than instances and prunes shape
/// mismatches, mixed dims within uniform classes and exhausted stock before
/// rendering. Ties go to the lexicographically smallest type combination.
pub fn baseline_search<T: Real>(
    scene: &[SceneObject<T>],
    cfg: &BaselineConfig<T>,
) -> Result<BaselineResult<T>, CraftError> {
    let search = Search::new(scene, cfg)?;
    let combos = search.pruned_combinations();
    let evaluated = combos.len();
    let scored = combos
        .into_par_iter()
        .map(|c| search.score(&c).map(|s| (s, c)))
        .collect::<Result<Vec<_>, _>>()?;
    search.best(scored, evaluated)
}

/// Reference enumeration over every injective assignment of scene
/// instances to slots; infeasible assignments are discarded only after
/// being generated. Exponential, meant for small checks.
pub fn baseline_search_unpruned<T: Real>(
    scene: &[SceneObject<T>],
    cfg: &BaselineConfig<T>,
) -> Result<BaselineResult<T>, CraftError> {
    let search = Search::new(scene, cfg)?;
    let type_of: Vec<usize> = scene
        .iter()
        .map(|o| {
            search
                .types
                .iter()
                .position(|t| t.representative.type_key() == o.type_key())
                .expect("type of scene object")
        })
        .collect();
    let k = search.slots.len();
    let mut scored = Vec::new();
    let mut evaluated = 0;
    let mut pick = vec![0usize; k];
    let mut used = vec![false; scene.len()];
    fn rec(
        depth: usize,
        pick: &mut Vec<usize>,
        used: &mut Vec<bool>,
        visit: &mut dyn FnMut(&[usize]) -> Result<(), CraftError>,
    ) -> Result<(), CraftError> {
        if depth == pick.len() {
            return visit(pick);
        }
        for j in 0..used.len() {
            if !used[j] {
                used[j] = true;
                pick[depth] = j;
                rec(depth + 1, pick, used, visit)?;
                used[j] = false;
            }
        }
        Ok(())
    }
    rec(0, &mut pick, &mut used, &mut |p: &[usize]| {
        let combo: Vec<usize> = p.iter().map(|&j| type_of[j]).collect();
        if search.feasible(&combo) {
            evaluated += 1;
            scored.push((search.score(&combo)?, combo));
        }
        Ok(())
    })?;
    search.best(scored, evaluated)
}

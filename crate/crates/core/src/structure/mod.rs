//! Structure refinement after pose fitting: keep the template parts seen in
//! the input, complete hidden ones by mirroring, and add axles.

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::{aabb_of, Aabb, LabeledMesh, PartClass, PartLabel, Primitive, RigidTransform, TriMesh, Vec3};
use crate::primfit::PrimitivePart;
use crate::raster::LabelMap;
use crate::scalar::Real;

/// Vertices closer than this to the mirror plane count as straddling it.
pub const MIRROR_EPS: f64 = 1e-4;
/// Angular tolerance for pairing wheels into axles.
pub const AXLE_TOLERANCE_DEG: f64 = 5.0;
/// Axle radius relative to the wheel radius.
pub const AXLE_RADIUS_RATIO: f64 = 0.2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum Provenance {
    Rendered,
    Mirrored { source: usize },
    Generated,
}

/// A connected same-labeled part of the posed template.
#[derive(Debug, Clone, PartialEq)]
pub struct PartInstance<T> {
    pub id: usize,
    pub part_class: PartClass,
    pub geometry: TriMesh<T>,
    pub provenance: Provenance,
}

/// Debug view of a [`PartInstance`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct InstanceRecord<T> {
    pub id: usize,
    pub part_class: PartClass,
    pub provenance: Provenance,
    pub aabb: Aabb<T>,
    pub transform: RigidTransform<T>,
}

impl<T: Real> PartInstance<T> {
    pub fn aabb(&self) -> Aabb<T> {
        aabb_of(&self.geometry.vertices).expect("instance geometry is nonempty")
    }

    pub fn record(&self) -> InstanceRecord<T> {
        let aabb = self.aabb();
        InstanceRecord {
            id: self.id,
            part_class: self.part_class,
            provenance: self.provenance,
            aabb,
            transform: RigidTransform::translation(aabb.center()),
        }
    }
}

/// Label of instance `id` in an instance render (see
/// [`render_instances`](crate::raster::render_instances)).
pub fn instance_label(id: usize) -> u8 {
    u8::try_from(id + 1).expect("at most 255 instances")
}

/// Part instances of `mesh` with the per-axis pose `scale` applied, in
/// [`LabeledMesh::part_instances`] order; instance `k` gets id `k`.
pub fn instances_from_template<T: Real>(mesh: &LabeledMesh<T>, scale: Vec3<T>) -> Vec<PartInstance<T>> {
    mesh.part_instances()
        .iter()
        .enumerate()
        .map(|(id, inst)| PartInstance {
            id,
            part_class: inst.part_class,
            geometry: mesh.instance_mesh(inst).scaled(scale),
            provenance: Provenance::Rendered,
        })
        .collect()
}

/// Pairing of one rendered instance mask with an input mask.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaskMatch {
    pub render_label: u8,
    pub part_class: PartClass,
    pub input_label: Option<u8>,
    /// Centroid distance in pixels for matched pairs.
    pub distance: Option<f64>,
}

/// Greedy one-to-one matching of rendered instance masks to input masks of
/// the same class by ascending centroid distance. Every legend label of the
/// input is one mask. Instances that are not visible stay unmatched.
pub fn correspond_parts(render: &LabelMap, input: &LabelMap) -> Result<Vec<MaskMatch>, CraftError> {
    if !render.same_shape(input) {
        return Err(CraftError::ResolutionMismatch(
            render.width(),
            render.height(),
            input.width(),
            input.height(),
        ));
    }
    let centroids = |map: &LabelMap| -> Vec<(u8, PartClass, (f64, f64))> {
        map.labels_present()
            .into_iter()
            .filter_map(|(l, c)| map.label_mask(l).centroid().map(|p| (l, c, p)))
            .collect()
    };
    let ours = centroids(render);
    let theirs = centroids(input);
    let mut pairs = Vec::new();
    for (i, &(_, rc, rp)) in ours.iter().enumerate() {
        for (j, &(_, ic, ip)) in theirs.iter().enumerate() {
            if rc == ic {
                pairs.push(((rp.0 - ip.0).hypot(rp.1 - ip.1), i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut assigned: Vec<Option<(usize, f64)>> = vec![None; ours.len()];
    let mut used = vec![false; theirs.len()];
    for (d, i, j) in pairs {
        if assigned[i].is_none() && !used[j] {
            assigned[i] = Some((j, d));
            used[j] = true;
        }
    }
    Ok(render
        .legend()
        .iter()
        .map(|(&label, &class)| {
            let hit = ours
                .iter()
                .position(|o| o.0 == label)
                .and_then(|i| assigned[i]);
            MaskMatch {
                render_label: label,
                part_class: class,
                input_label: hit.map(|(j, _)| theirs[j].0),
                distance: hit.map(|(_, d)| d),
            }
        })
        .collect())
}

/// Instances whose render label has a matched input mask.
pub fn filter_parts<T: Real>(
    instances: &[PartInstance<T>],
    matches: &[MaskMatch],
) -> Result<Vec<PartInstance<T>>, CraftError> {
    let kept: Vec<_> = instances
        .iter()
        .filter(|inst| {
            matches
                .iter()
                .any(|m| m.render_label == instance_label(inst.id) && m.input_label.is_some())
        })
        .cloned()
        .collect();
    if kept.is_empty() {
        return Err(CraftError::NoPartsRetained);
    }
    Ok(kept)
}

/// Appends a mirrored copy (across `x = 0`) of every instance lying fully on
/// one side of the plane whose reflected box overlaps no same-class instance.
pub fn mirror_completion<T: Real>(instances: &[PartInstance<T>]) -> Vec<PartInstance<T>> {
    let eps = T::lit(MIRROR_EPS);
    let boxes: Vec<Aabb<T>> = instances.iter().map(|i| i.aabb()).collect();
    let mut out = instances.to_vec();
    let mut next_id = instances.iter().map(|i| i.id + 1).max().unwrap_or(0);
    for (inst, bbox) in instances.iter().zip(&boxes) {
        let v = &inst.geometry.vertices;
        let one_side = v.iter().all(|p| p.x < -eps) || v.iter().all(|p| p.x > eps);
        if !one_side {
            continue;
        }
        let reflected = bbox.reflected_x();
        let has_counterpart = instances
            .iter()
            .zip(&boxes)
            .any(|(o, b)| o.part_class == inst.part_class && b.intersection_volume(&reflected) > T::zero());
        if has_counterpart {
            continue;
        }
        out.push(PartInstance {
            id: next_id,
            part_class: inst.part_class,
            geometry: inst.geometry.reflected_x(),
            provenance: Provenance::Mirrored { source: inst.id },
        });
        next_id += 1;
    }
    out
}

/// Connects pairs of parallel, coaxial wheels with axle cylinders.
///
/// Candidate pairs have axes within 5° of parallel and a center-to-center
/// direction within 5° of the axis; they are taken nearest first. Each axle
/// spans the wheel centers with 20% of the smaller wheel radius. Axle ids
/// start at `first_id`. A wheel left without a partner is logged.
pub fn generate_axles<T: Real>(
    wheels: &[PrimitivePart<T>],
    first_id: usize,
) -> Result<Vec<PrimitivePart<T>>, CraftError> {
    let mut info = Vec::with_capacity(wheels.len());
    for w in wheels {
        match w.primitive {
            Primitive::Cylinder { radius, axis, .. } => {
                let dir = w.transform.rotation.mul_vec(Vec3::unit(axis));
                info.push((radius, axis, dir, w.transform.translation));
            }
            Primitive::Cuboid { .. } => {
                return Err(CraftError::InvalidPrimitive(format!(
                    "wheel {} is not a cylinder",
                    w.id
                )))
            }
        }
    }
    let cos_tol = T::lit(AXLE_TOLERANCE_DEG.to_radians().cos());
    let mut pairs = Vec::new();
    for i in 0..info.len() {
        for j in i + 1..info.len() {
            let (ai, aj) = (info[i].2, info[j].2);
            let d = info[j].3 - info[i].3;
            let len = d.norm();
            if ai.dot(aj).abs() < cos_tol || !(len > T::zero()) {
                continue;
            }
            if (d * (T::one() / len)).dot(ai).abs() >= cos_tol {
                pairs.push((len, i, j));
            }
        }
    }
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap().then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut paired = vec![false; info.len()];
    let mut axles = Vec::new();
    for (len, i, j) in pairs {
        if paired[i] || paired[j] {
            continue;
        }
        paired[i] = true;
        paired[j] = true;
        let radius = info[i].0.min(info[j].0) * T::lit(AXLE_RADIUS_RATIO);
        let mid = (info[i].3 + info[j].3) * T::lit(0.5);
        axles.push(PrimitivePart {
            id: first_id + axles.len(),
            label: PartLabel::Axle,
            primitive: Primitive::cylinder(radius, len, info[i].1)?,
            transform: RigidTransform::new(wheels[i].transform.rotation, mid)?,
        });
    }
    for (k, w) in wheels.iter().enumerate() {
        if !paired[k] {
            log::warn!("wheel {} has no parallel partner; no axle generated", w.id);
        }
    }
    Ok(axles)
}

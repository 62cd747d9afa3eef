//! Simplification of part instances to cuboids and cylinders.

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::{aabb_of, chamfer, Aabb, Axis, ObjectClass, PartClass, PartLabel, Primitive, RigidTransform, SurfaceSampler, TriMesh};
use crate::scalar::Real;
use crate::structure::{generate_axles, PartInstance};

/// Default number of surface samples per shape.
pub const DEFAULT_SAMPLES: usize = 2048;
/// Scores within this relative margin of the best count as tied; sampling
/// noise at the default count is around one percent.
pub const TIE_TOLERANCE: f64 = 0.02;

/// A primitive placed in the model frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PrimitivePart<T> {
    pub id: usize,
    pub label: PartLabel,
    pub primitive: Primitive<T>,
    pub transform: RigidTransform<T>,
}

impl<T: Real> PrimitivePart<T> {
    pub fn part_class(&self) -> Option<PartClass> {
        self.label.class()
    }

    /// Triangle mesh of the placed primitive.
    pub fn mesh(&self) -> TriMesh<T> {
        let local = crate::geom::shapes::primitive_mesh(&self.primitive, crate::geom::Vec3::zero());
        local.map_vertices(|v| self.transform.apply(v))
    }
}

/// Cuboid with the box dims, then cylinders along x, y and z with the box
/// length on the axis and radius equal to half the mean cross dimension.
pub fn propose_candidates<T: Real>(bbox: &Aabb<T>) -> Result<[Primitive<T>; 4], CraftError> {
    let d = bbox.dims();
    if (0..3).any(|i| !(d[i] > T::lit(1e-9))) {
        return Err(CraftError::DegenerateBox(d.cast::<f64>().to_array()));
    }
    let cyl = |axis: Axis| {
        let [a, b] = axis.cross_axes();
        Primitive::cylinder((d[a.index()] + d[b.index()]) * T::lit(0.25), d[axis.index()], axis)
    };
    Ok([
        Primitive::cuboid(d)?,
        cyl(Axis::X)?,
        cyl(Axis::Y)?,
        cyl(Axis::Z)?,
    ])
}

/// Candidate of `geometry`'s bounding box with the lowest chamfer distance
/// to the part's surface, with the distance of every candidate. Among
/// candidates tied with the best (see [`TIE_TOLERANCE`]) the earliest wins:
/// cuboid, then cylinders along x, y and z.
pub fn select_primitive<T: Real>(
    geometry: &TriMesh<T>,
    n: usize,
    seed: u64,
) -> Result<(Primitive<T>, [T; 4]), CraftError> {
    let bbox = geometry.aabb()?;
    let candidates = propose_candidates(&bbox)?;
    let part_points = geometry.sample_points(n, seed)?;
    let center = bbox.center();
    let mut scores = [T::zero(); 4];
    for (k, cand) in candidates.iter().enumerate() {
        let pts: Vec<_> = cand
            .sample_points(n, seed)?
            .into_iter()
            .map(|p| p + center)
            .collect();
        scores[k] = chamfer(&part_points, &pts)?;
    }
    let min = scores.iter().copied().fold(T::infinity(), T::min);
    let limit = min * T::lit(1.0 + TIE_TOLERANCE);
    let best = scores.iter().position(|&s| s <= limit).unwrap_or(0);
    Ok((candidates[best], scores))
}

/// One primitive per instance, placed at the center of the instance's
/// bounding box, plus axles between wheel pairs for object classes that
/// have them.
pub fn simplify_model<T: Real>(
    instances: &[PartInstance<T>],
    object_class: ObjectClass,
    n: usize,
    seed: u64,
) -> Result<Vec<PrimitivePart<T>>, CraftError> {
    let mut parts = Vec::with_capacity(instances.len());
    for inst in instances {
        let (primitive, _) = select_primitive(&inst.geometry, n, seed)?;
        let center = aabb_of(&inst.geometry.vertices)?.center();
        parts.push(PrimitivePart {
            id: inst.id,
            label: PartLabel::Class(inst.part_class),
            primitive,
            transform: RigidTransform::translation(center),
        });
    }
    if object_class.has_axles() {
        let mut wheels = Vec::new();
        for p in parts.iter().filter(|p| p.label == PartLabel::Class(PartClass::Wheel)) {
            match p.primitive {
                Primitive::Cylinder { .. } => wheels.push(p.clone()),
                _ => log::warn!("wheel {} simplified to a {}, no axle", p.id, p.primitive.kind()),
            }
        }
        let next_id = parts.iter().map(|p| p.id + 1).max().unwrap_or(0);
        parts.extend(generate_axles(&wheels, next_id)?);
    }
    Ok(parts)
}

//! Proportion-based assignment of primitive parts to scene objects.
//!
//! The largest model part is matched first (the anchor) using a dual ranking
//! over shape proportions and volume. The anchor's largest dimension then
//! sets the common scale, and the remaining parts pick unused objects
//! greedily by combined dimension and ratio error.

mod scene;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::{PartLabel, Primitive, RigidTransform, ShapeKind, Vec3};
use crate::primfit::PrimitivePart;
use crate::scalar::Real;

pub use scene::{
    builtin_scene, load_scene, parse_scene, save_scene, scene_one, scene_two, SceneDims,
    SceneObject,
};

/// A part's dim vector divided by the leading dimension of the largest part.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalizedPart<T> {
    pub id: usize,
    pub label: PartLabel,
    pub shape: ShapeKind,
    pub dims: [T; 3],
}

/// Dual-ranking entry for one anchor candidate. Ranks are 1-based and
/// tied values share the best position (1, 2, 2, 4).
#[derive(Debug, Clone, PartialEq)]
pub struct AnchorCandidate<T> {
    pub object_id: String,
    /// Mean absolute difference of self-normalized dims to the largest part.
    pub dim_error: T,
    pub volume: T,
    pub rank_dims: usize,
    pub rank_volume: usize,
}

impl<T: Real> AnchorCandidate<T> {
    /// Twice the mean rank.
    pub fn rank_sum(&self) -> usize {
        self.rank_dims + self.rank_volume
    }
}

/// Errors of pairing a normalized part with a normalized object.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct PairError<T> {
    pub dim: T,
    pub ratio: T,
    pub total: T,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Assignment<T> {
    pub part_id: usize,
    pub label: PartLabel,
    pub object_id: String,
    pub shape: ShapeKind,
    pub error: PairError<T>,
    /// Placement copied from the simplified part, as a row-major 4x4 matrix.
    #[serde(with = "matrix4")]
    pub transform: RigidTransform<T>,
    /// The object in model units, oriented like the part it replaces.
    pub placed: Primitive<T>,
}

/// Injective part-to-object assignment; the anchor comes first, then the
/// remaining parts in the order they were matched.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct CraftProposal<T> {
    pub anchor_part: usize,
    pub anchor_object: String,
    /// Model units per scene unit.
    pub scale: T,
    pub assignments: Vec<Assignment<T>>,
}

impl<T: Real> CraftProposal<T> {
    pub fn object_ids(&self) -> Vec<&str> {
        self.assignments.iter().map(|a| a.object_id.as_str()).collect()
    }

    pub fn object_for(&self, part_id: usize) -> Option<&str> {
        self.assignments
            .iter()
            .find(|a| a.part_id == part_id)
            .map(|a| a.object_id.as_str())
    }

    /// The chosen objects as placed primitive parts, for rendering.
    pub fn placed_parts(&self) -> Vec<PrimitivePart<T>> {
        self.assignments
            .iter()
            .map(|a| PrimitivePart {
                id: a.part_id,
                label: a.label,
                primitive: a.placed,
                transform: a.transform,
            })
            .collect()
    }
}

fn leading<T: Real>(d: [T; 3]) -> T {
    d[0]
}

fn mean_abs_diff<T: Real>(a: [T; 3], b: [T; 3]) -> T {
    (0..3).map(|i| (a[i] - b[i]).abs()).sum::<T>() / T::lit(3.0)
}

fn cmp_t<T: Real>(a: T, b: T) -> Ordering {
    a.partial_cmp(&b).unwrap_or(Ordering::Equal)
}

/// Ranking key of an O(1) value: rounded to a 1e-12 grid so that rounding
/// noise from rescaling does not reorder equal values.
fn snap<T: Real>(x: T) -> T {
    (x * T::lit(1e12)).round()
}

/// `values` relative to their maximum, snapped.
fn snap_relative<T: Real>(values: &[T]) -> Vec<T> {
    let max = values.iter().copied().fold(T::zero(), T::max);
    values
        .iter()
        .map(|&v| if max > T::zero() { snap(v / max) } else { v })
        .collect()
}

/// Part with the single largest dimension; ties go to the larger volume,
/// then the lower id.
pub fn find_largest_part<T: Real>(parts: &[PrimitivePart<T>]) -> Result<&PrimitivePart<T>, CraftError> {
    let lead = snap_relative(&parts.iter().map(|p| leading(p.primitive.dim_vector())).collect::<Vec<_>>());
    let vol = snap_relative(&parts.iter().map(|p| p.primitive.volume()).collect::<Vec<_>>());
    (0..parts.len())
        .min_by(|&a, &b| {
            cmp_t(lead[b], lead[a])
                .then(cmp_t(vol[b], vol[a]))
                .then(parts[a].id.cmp(&parts[b].id))
        })
        .map(|i| &parts[i])
        .ok_or(CraftError::EmptyModel)
}

/// Divides every part's dim vector by the leading dimension of `p_max`.
pub fn normalize_parts<T: Real>(parts: &[PrimitivePart<T>], p_max: &PrimitivePart<T>) -> Vec<NormalizedPart<T>> {
    let s = leading(p_max.primitive.dim_vector());
    parts
        .iter()
        .map(|p| NormalizedPart {
            id: p.id,
            label: p.label,
            shape: p.primitive.kind(),
            dims: p.primitive.dim_vector().map(|v| v / s),
        })
        .collect()
}

/// Competition ranks of `keys` under `cmp` (smaller sorts first).
fn competition_ranks<K>(keys: &[K], cmp: impl Fn(&K, &K) -> Ordering) -> Vec<usize> {
    keys.iter()
        .map(|k| 1 + keys.iter().filter(|o| cmp(o, k) == Ordering::Less).count())
        .collect()
}

/// Both rankings for every scene object of `p_max_n`'s shape, in scene order.
pub fn anchor_candidates<T: Real>(
    scene: &[SceneObject<T>],
    p_max_n: &NormalizedPart<T>,
) -> Vec<AnchorCandidate<T>> {
    let same: Vec<&SceneObject<T>> = scene.iter().filter(|o| o.shape() == p_max_n.shape).collect();
    let errors: Vec<T> = same
        .iter()
        .map(|o| {
            let d = o.dim_vector();
            let s = leading(d);
            mean_abs_diff(d.map(|v| v / s), p_max_n.dims)
        })
        .collect();
    let volumes: Vec<T> = same.iter().map(|o| o.volume()).collect();
    let error_keys: Vec<T> = errors.iter().map(|&e| snap(e)).collect();
    let ra = competition_ranks(&error_keys, |a, b| cmp_t(*a, *b));
    let rb = competition_ranks(&snap_relative(&volumes), |a, b| cmp_t(*b, *a));
    same.iter()
        .enumerate()
        .map(|(i, o)| AnchorCandidate {
            object_id: o.id.clone(),
            dim_error: errors[i],
            volume: volumes[i],
            rank_dims: ra[i],
            rank_volume: rb[i],
        })
        .collect()
}

/// Scene object with the best mean position in the proportion and volume
/// rankings. Ties go to the better proportion rank, then the lower id.
pub fn find_anchor<'a, T: Real>(
    scene: &'a [SceneObject<T>],
    p_max_n: &NormalizedPart<T>,
) -> Result<&'a SceneObject<T>, CraftError> {
    let best = anchor_candidates(scene, p_max_n)
        .into_iter()
        .min_by(|a, b| {
            a.rank_sum()
                .cmp(&b.rank_sum())
                .then(a.rank_dims.cmp(&b.rank_dims))
                .then(a.object_id.cmp(&b.object_id))
        })
        .ok_or_else(|| CraftError::AnchorShapeUnavailable(p_max_n.shape.to_string()))?;
    Ok(scene.iter().find(|o| o.id == best.object_id).expect("candidate from scene"))
}

/// Errors between a normalized part and a scene object normalized by the
/// anchor: mean absolute dim difference, mean absolute difference of the
/// self-normalized ratios, and their root sum of squares.
pub fn pair_error<T: Real>(part: [T; 3], object: [T; 3]) -> PairError<T> {
    let dim = mean_abs_diff(part, object);
    let (sp, so) = (leading(part), leading(object));
    let ratio = mean_abs_diff(part.map(|v| v / sp), object.map(|v| v / so));
    PairError {
        dim,
        ratio,
        total: (dim * dim + ratio * ratio).sqrt(),
    }
}

/// One greedy step: the part and the object chosen for it.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchStep<T> {
    pub part_id: usize,
    pub object_id: String,
    pub error: PairError<T>,
}

/// Greedy assignment of every part except `anchor_part`, largest leading
/// dimension first (ties by id). Each part takes the unused object of its
/// shape with the lowest total error against the anchor-normalized scene;
/// ties go to the lower object id.
pub fn match_remaining<T: Real>(
    parts_n: &[NormalizedPart<T>],
    anchor_part: usize,
    scene: &[SceneObject<T>],
    anchor: &SceneObject<T>,
) -> Result<Vec<MatchStep<T>>, CraftError> {
    let s = leading(anchor.dim_vector());
    let scene_n: Vec<[T; 3]> = scene.iter().map(|o| o.dim_vector().map(|v| v / s)).collect();
    let mut used: Vec<bool> = scene.iter().map(|o| o.id == anchor.id).collect();

    let mut order: Vec<&NormalizedPart<T>> = parts_n.iter().filter(|p| p.id != anchor_part).collect();
    order.sort_by(|a, b| cmp_t(snap(leading(b.dims)), snap(leading(a.dims))).then(a.id.cmp(&b.id)));

    let mut steps = Vec::with_capacity(order.len());
    for part in order {
        let best = scene
            .iter()
            .enumerate()
            .filter(|(j, o)| !used[*j] && o.shape() == part.shape)
            .map(|(j, o)| (j, o, pair_error(part.dims, scene_n[j])))
            .min_by(|a, b| cmp_t(snap(a.2.total), snap(b.2.total)).then(a.1.id.cmp(&b.1.id)));
        let Some((j, o, error)) = best else {
            return Err(CraftError::InsufficientObjects {
                part_id: part.id,
                label: part.label.name().to_string(),
                shape: part.shape.to_string(),
            });
        };
        used[j] = true;
        steps.push(MatchStep {
            part_id: part.id,
            object_id: o.id.clone(),
            error,
        });
    }
    Ok(steps)
}

/// Orients a scene object like `part`, in model units: cuboid dims follow
/// the order of the part's extents, cylinders take the part's axis.
pub fn place_object<T: Real>(part: &Primitive<T>, object: &SceneObject<T>, scale: T) -> Primitive<T> {
    match (*part, object.dims) {
        (Primitive::Cylinder { axis, .. }, SceneDims::Cylinder { radius, length }) => Primitive::Cylinder {
            radius: radius * scale,
            length: length * scale,
            axis,
        },
        _ => {
            let ext = part.extents();
            let mut axes = [0usize, 1, 2];
            axes.sort_by(|&a, &b| cmp_t(ext[b], ext[a]).then(a.cmp(&b)));
            let d = object.dim_vector();
            let mut dims = Vec3::zero();
            for (k, &ax) in axes.iter().enumerate() {
                dims[ax] = d[k] * scale;
            }
            Primitive::Cuboid { dims }
        }
    }
}

/// Runs the three steps on a simplified model.
pub fn propose<T: Real>(parts: &[PrimitivePart<T>], scene: &[SceneObject<T>]) -> Result<CraftProposal<T>, CraftError> {
    let p_max = find_largest_part(parts)?;
    let parts_n = normalize_parts(parts, p_max);
    let p_max_n = parts_n.iter().find(|p| p.id == p_max.id).expect("p_max in parts");
    let anchor = find_anchor(scene, p_max_n)?;
    let steps = match_remaining(&parts_n, p_max.id, scene, anchor)?;

    let scale = leading(p_max.primitive.dim_vector()) / leading(anchor.dim_vector());
    let s = leading(anchor.dim_vector());
    let anchor_step = MatchStep {
        part_id: p_max.id,
        object_id: anchor.id.clone(),
        error: pair_error(p_max_n.dims, anchor.dim_vector().map(|v| v / s)),
    };
    let assignments = std::iter::once(anchor_step)
        .chain(steps)
        .map(|step| {
            let part = parts.iter().find(|p| p.id == step.part_id).expect("part");
            let object = scene.iter().find(|o| o.id == step.object_id).expect("object");
            Assignment {
                part_id: part.id,
                label: part.label,
                shape: object.shape(),
                placed: place_object(&part.primitive, object, scale),
                object_id: step.object_id,
                error: step.error,
                transform: part.transform,
            }
        })
        .collect();
    Ok(CraftProposal {
        anchor_part: p_max.id,
        anchor_object: anchor.id.clone(),
        scale,
        assignments,
    })
}

mod matrix4 {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use crate::geom::{Mat3, RigidTransform, Vec3};
    use crate::scalar::Real;

    pub fn serialize<T: Real, S: Serializer>(t: &RigidTransform<T>, s: S) -> Result<S::Ok, S::Error> {
        t.to_matrix().serialize(s)
    }

    pub fn deserialize<'de, T: Real, D: Deserializer<'de>>(d: D) -> Result<RigidTransform<T>, D::Error> {
        let m = <[[T; 4]; 4]>::deserialize(d)?;
        let rows = [0, 1, 2].map(|i| Vec3::new(m[i][0], m[i][1], m[i][2]));
        RigidTransform::new(
            Mat3::from_rows(rows[0], rows[1], rows[2]),
            Vec3::new(m[0][3], m[1][3], m[2][3]),
        )
        .map_err(serde::de::Error::custom)
    }
}

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::{Axis, Primitive, ShapeKind, Vec3};
use crate::scalar::Real;

/// Physical dimensions of a scene object, in millimetres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SceneDims<T> {
    Cuboid([T; 3]),
    Cylinder { radius: T, length: T },
}

/// One available physical object. Quantities are expanded: two identical
/// boxes are two records with distinct ids.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawObject<T>", into = "RawObject<T>", bound = "T: Real")]
pub struct SceneObject<T> {
    pub id: String,
    pub dims: SceneDims<T>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields, bound = "T: Real")]
struct RawObject<T> {
    id: String,
    shape: ShapeKind,
    /// `[dx, dy, dz]` for a cuboid, `[radius, length]` for a cylinder.
    dims: Vec<T>,
}

impl<T: Real> TryFrom<RawObject<T>> for SceneObject<T> {
    type Error = CraftError;

    fn try_from(raw: RawObject<T>) -> Result<Self, CraftError> {
        let dims = match (raw.shape, raw.dims.as_slice()) {
            (ShapeKind::Cuboid, &[x, y, z]) => SceneDims::Cuboid([x, y, z]),
            (ShapeKind::Cylinder, &[radius, length]) => SceneDims::Cylinder { radius, length },
            (shape, d) => {
                return Err(CraftError::Parse(format!(
                    "object {}: {shape} takes {} dims, got {}",
                    raw.id,
                    if shape == ShapeKind::Cuboid { 3 } else { 2 },
                    d.len()
                )))
            }
        };
        SceneObject::new(raw.id, dims)
    }
}

impl<T: Real> From<SceneObject<T>> for RawObject<T> {
    fn from(o: SceneObject<T>) -> Self {
        let shape = o.shape();
        let dims = match o.dims {
            SceneDims::Cuboid(d) => d.to_vec(),
            SceneDims::Cylinder { radius, length } => vec![radius, length],
        };
        RawObject {
            id: o.id,
            shape,
            dims,
        }
    }
}

impl<T: Real> SceneObject<T> {
    pub fn new(id: impl Into<String>, dims: SceneDims<T>) -> Result<Self, CraftError> {
        let id = id.into();
        let ok = |v: T| v > T::zero() && v.is_finite();
        let valid = match dims {
            SceneDims::Cuboid(d) => d.iter().all(|&v| ok(v)),
            SceneDims::Cylinder { radius, length } => ok(radius) && ok(length),
        };
        if !valid {
            return Err(CraftError::InvalidPrimitive(format!(
                "scene object {id}: dims must be positive"
            )));
        }
        Ok(Self { id, dims })
    }

    pub fn cuboid(id: impl Into<String>, dims: [T; 3]) -> Result<Self, CraftError> {
        Self::new(id, SceneDims::Cuboid(dims))
    }

    pub fn cylinder(id: impl Into<String>, radius: T, length: T) -> Result<Self, CraftError> {
        Self::new(id, SceneDims::Cylinder { radius, length })
    }

    /// Object with the shape of `p` and its dimensions multiplied by `scale`.
    pub fn from_primitive(id: impl Into<String>, p: &Primitive<T>, scale: T) -> Result<Self, CraftError> {
        match *p {
            Primitive::Cuboid { dims } => Self::cuboid(id, (dims * scale).to_array()),
            Primitive::Cylinder { radius, length, .. } => {
                Self::cylinder(id, radius * scale, length * scale)
            }
        }
    }

    pub fn shape(&self) -> ShapeKind {
        match self.dims {
            SceneDims::Cuboid(_) => ShapeKind::Cuboid,
            SceneDims::Cylinder { .. } => ShapeKind::Cylinder,
        }
    }

    /// Sorted-descending characteristic dimensions, see
    /// [`Primitive::dim_vector`].
    pub fn dim_vector(&self) -> [T; 3] {
        self.as_primitive(Axis::Z).dim_vector()
    }

    pub fn volume(&self) -> T {
        self.as_primitive(Axis::Z).volume()
    }

    /// The object as a primitive; cylinders get the given axis.
    pub fn as_primitive(&self, axis: Axis) -> Primitive<T> {
        match self.dims {
            SceneDims::Cuboid(d) => Primitive::Cuboid { dims: Vec3::from(d) },
            SceneDims::Cylinder { radius, length } => Primitive::Cylinder {
                radius,
                length,
                axis,
            },
        }
    }

    /// Same object with every dimension multiplied by `k`.
    pub fn scaled(&self, k: T) -> Self {
        let dims = match self.dims {
            SceneDims::Cuboid(d) => SceneDims::Cuboid(d.map(|v| v * k)),
            SceneDims::Cylinder { radius, length } => SceneDims::Cylinder {
                radius: radius * k,
                length: length * k,
            },
        };
        Self {
            id: self.id.clone(),
            dims,
        }
    }

    /// Key identifying objects with identical shape and dims.
    pub fn type_key(&self) -> (ShapeKind, [u64; 3]) {
        let bits = |v: T| v.as_f64().to_bits();
        let d = match self.dims {
            SceneDims::Cuboid(d) => d.map(bits),
            SceneDims::Cylinder { radius, length } => [bits(radius), bits(length), 0],
        };
        (self.shape(), d)
    }
}

/// Parses a scene file and checks that ids are unique.
pub fn parse_scene<T: Real>(json: &str) -> Result<Vec<SceneObject<T>>, CraftError> {
    let objects: Vec<SceneObject<T>> = serde_json::from_str(json)?;
    let mut ids: Vec<&str> = objects.iter().map(|o| o.id.as_str()).collect();
    ids.sort_unstable();
    if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
        return Err(CraftError::Parse(format!("duplicate scene object id {}", w[0])));
    }
    Ok(objects)
}

pub fn load_scene<T: Real>(path: &Path) -> Result<Vec<SceneObject<T>>, CraftError> {
    parse_scene(&std::fs::read_to_string(path)?)
}

pub fn save_scene<T: Real>(path: &Path, scene: &[SceneObject<T>]) -> Result<(), CraftError> {
    let mut s = serde_json::to_string_pretty(scene)?;
    s.push('\n');
    std::fs::write(path, s)?;
    Ok(())
}

const SCENE_ONE: &str = include_str!("../../fixtures/scene_1.json");
const SCENE_TWO: &str = include_str!("../../fixtures/scene_2.json");

/// Diverse inventory: 20 primitive types, 10 instances each.
pub fn scene_one<T: Real>() -> Vec<SceneObject<T>> {
    parse_scene(SCENE_ONE).expect("bundled scene parses")
}

/// Restricted inventory of 20 everyday objects in 10 types.
pub fn scene_two<T: Real>() -> Vec<SceneObject<T>> {
    parse_scene(SCENE_TWO).expect("bundled scene parses")
}

/// Looks up a bundled scene by name (`scene1`, `scene2`).
pub fn builtin_scene<T: Real>(name: &str) -> Option<Vec<SceneObject<T>>> {
    match name {
        "scene1" | "scene_1" | "1" => Some(scene_one()),
        "scene2" | "scene_2" | "2" => Some(scene_two()),
        _ => None,
    }
}

use serde::{Deserialize, Serialize};

use super::linalg::{Axis, Vec3};
use crate::error::CraftError;
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeKind {
    Cuboid,
    Cylinder,
}

impl ShapeKind {
    pub fn name(self) -> &'static str {
        match self {
            ShapeKind::Cuboid => "cuboid",
            ShapeKind::Cylinder => "cylinder",
        }
    }
}

impl std::fmt::Display for ShapeKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Cuboid or cylinder centered at the origin of its local frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "lowercase", bound = "T: Real")]
pub enum Primitive<T> {
    Cuboid { dims: Vec3<T> },
    Cylinder { radius: T, length: T, axis: Axis },
}

impl<T: Real> Primitive<T> {
    pub fn cuboid(dims: Vec3<T>) -> Result<Self, CraftError> {
        if (0..3).all(|i| dims[i] > T::zero() && dims[i].is_finite()) {
            Ok(Primitive::Cuboid { dims })
        } else {
            Err(CraftError::InvalidPrimitive(format!("cuboid dims {dims:?}")))
        }
    }

    pub fn cylinder(radius: T, length: T, axis: Axis) -> Result<Self, CraftError> {
        if radius > T::zero() && length > T::zero() && radius.is_finite() && length.is_finite() {
            Ok(Primitive::Cylinder {
                radius,
                length,
                axis,
            })
        } else {
            Err(CraftError::InvalidPrimitive(format!(
                "cylinder radius {radius} length {length}"
            )))
        }
    }

    pub fn kind(&self) -> ShapeKind {
        match self {
            Primitive::Cuboid { .. } => ShapeKind::Cuboid,
            Primitive::Cylinder { .. } => ShapeKind::Cylinder,
        }
    }

    /// Axis-aligned extents in the local frame.
    pub fn extents(&self) -> Vec3<T> {
        match *self {
            Primitive::Cuboid { dims } => dims,
            Primitive::Cylinder {
                radius,
                length,
                axis,
            } => {
                let mut e = Vec3::splat(radius + radius);
                e[axis.index()] = length;
                e
            }
        }
    }

    pub fn volume(&self) -> T {
        match *self {
            Primitive::Cuboid { dims } => dims.x * dims.y * dims.z,
            Primitive::Cylinder { radius, length, .. } => T::PI() * radius * radius * length,
        }
    }

    pub fn surface_area(&self) -> T {
        match *self {
            Primitive::Cuboid { dims } => {
                T::lit(2.0) * (dims.x * dims.y + dims.y * dims.z + dims.x * dims.z)
            }
            Primitive::Cylinder { radius, length, .. } => {
                T::lit(2.0) * T::PI() * radius * (radius + length)
            }
        }
    }

    /// Sorted-descending characteristic dimensions: cuboid sides, or
    /// `(length, diameter, diameter)` for a cylinder.
    pub fn dim_vector(&self) -> [T; 3] {
        match *self {
            Primitive::Cuboid { dims } => {
                let mut d = dims.to_array();
                d.sort_by(|a, b| b.partial_cmp(a).unwrap());
                d
            }
            Primitive::Cylinder { radius, length, .. } => {
                let dia = radius + radius;
                let mut d = [length, dia, dia];
                d.sort_by(|a, b| b.partial_cmp(a).unwrap());
                d
            }
        }
    }
}

//! Geometric types, the part taxonomy, sampling and chamfer distance.

pub mod aabb;
pub mod chamfer;
pub mod linalg;
pub mod mesh;
pub mod obj;
pub mod primitive;
pub mod sampling;
pub mod shapes;
pub mod taxonomy;
pub mod templates;

pub use aabb::{aabb_of, Aabb};
pub use chamfer::chamfer;
pub use linalg::{Axis, Mat3, RigidTransform, Vec3};
pub use mesh::{InstanceFaces, LabeledMesh, TriMesh};
pub use primitive::{Primitive, ShapeKind};
pub use sampling::SurfaceSampler;
pub use taxonomy::{ObjectClass, PartClass, PartLabel};
pub use templates::generate_template;

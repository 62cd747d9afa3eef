//! Craft proposals from part-labeled silhouettes.
//!
//! A segmentation of the target object drives pose fitting of labeled
//! template meshes ([`poseopt`]). The winning template is completed and
//! pruned ([`structure`]), simplified to cuboids and cylinders
//! ([`primfit`]) and matched against an inventory of primitive scene
//! objects by proportions ([`matching`]). [`evalkit`] scores proposals and
//! runs the exhaustive baselines; [`pipeline`] wires the stages to files.
//!
//! Geometry and metrics are generic over [`Real`] (`f32` or `f64`); the
//! aliases below fix the scalar to `f64`, which the pipeline uses.

// `!(x > 0)` style checks reject NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod evalkit;
pub mod geom;
pub mod matching;
pub mod pipeline;
pub mod poseopt;
pub mod primfit;
pub mod raster;
pub mod scalar;
pub mod seed;
pub mod structure;

pub use error::{CraftError, Result};
pub use scalar::Real;

pub type Vector3 = geom::Vec3<f64>;
pub type Aabb = geom::Aabb<f64>;
pub type Primitive = geom::Primitive<f64>;
pub type RigidTransform = geom::RigidTransform<f64>;
pub type TriMesh = geom::TriMesh<f64>;
pub type LabeledMesh = geom::LabeledMesh<f64>;
pub type Camera = raster::Camera<f64>;
pub type PoseHypothesis = poseopt::PoseHypothesis<f64>;
pub type PoseResult = poseopt::PoseResult<f64>;
pub type PartInstance = structure::PartInstance<f64>;
pub type PrimitivePart = primfit::PrimitivePart<f64>;
pub type SceneObject = matching::SceneObject<f64>;
pub type CraftProposal = matching::CraftProposal<f64>;
pub type BaselineConfig = evalkit::BaselineConfig<f64>;
pub type BaselineResult = evalkit::BaselineResult<f64>;
pub type GroundTruth = evalkit::GroundTruth<f64>;

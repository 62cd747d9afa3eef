//! Look-at camera on a sphere around the origin.

use serde::{Deserialize, Serialize};

use crate::error::CraftError;
use crate::geom::{Mat3, Vec3};
use crate::scalar::Real;

/// Near clipping distance in model units.
pub const NEAR: f64 = 1e-2;

/// Perspective camera looking at the origin from spherical coordinates,
/// with a screen-space offset in normalized device units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Camera<T> {
    pub azimuth: T,
    pub elevation: T,
    pub distance: T,
    pub offset: [T; 2],
    pub fov_y: T,
    pub width: usize,
    pub height: usize,
}

impl<T: Real> Camera<T> {
    pub fn new(azimuth: T, elevation: T, distance: T, width: usize, height: usize) -> Self {
        Self {
            azimuth,
            elevation,
            distance,
            offset: [T::zero(); 2],
            fov_y: T::lit(30f64.to_radians()),
            width,
            height,
        }
    }

    pub fn validate(&self) -> Result<(), CraftError> {
        if !(self.distance > T::zero()) {
            return Err(CraftError::InvalidCamera(format!("distance {}", self.distance)));
        }
        if self.width < 32 || self.height < 32 {
            return Err(CraftError::InvalidCamera(format!(
                "resolution {}x{} below 32x32",
                self.width, self.height
            )));
        }
        if !(self.fov_y > T::zero() && self.fov_y < T::PI()) {
            return Err(CraftError::InvalidCamera(format!("fov_y {}", self.fov_y)));
        }
        Ok(())
    }

    /// Azimuth wrapped into `[0, 2π)` and snapped to a 2^-32 rad grid, so
    /// that angles a whole number of turns apart give identical frames.
    pub fn canonical_azimuth(&self) -> T {
        let wrapped = self.azimuth.as_f64().rem_euclid(std::f64::consts::TAU);
        let grid = (1u64 << 32) as f64;
        let snapped = (wrapped * grid).round() / grid;
        T::lit(if snapped >= std::f64::consts::TAU { 0.0 } else { snapped })
    }

    pub fn eye(&self) -> Vec3<T> {
        let (sa, ca) = self.canonical_azimuth().sin_cos();
        let (se, ce) = self.elevation.sin_cos();
        Vec3::new(ce * sa, se, ce * ca) * self.distance
    }

    /// World-to-camera rotation; rows are right, up and backward.
    pub fn rotation(&self) -> Mat3<T> {
        let forward = (-self.eye()).normalized();
        let world_up = Vec3::new(T::zero(), T::one(), T::zero());
        let mut right = forward.cross(world_up);
        if right.norm_sq() < T::lit(1e-20) {
            // looking straight down or up
            right = Vec3::new(T::one(), T::zero(), T::zero());
        }
        let right = right.normalized();
        let up = right.cross(forward);
        Mat3::from_rows(right, up, -forward)
    }

    pub fn aspect(&self) -> T {
        T::from_usize_lossy(self.width) / T::from_usize_lossy(self.height)
    }

    pub(crate) fn projector(&self) -> Projector<T> {
        let rot = self.rotation();
        let fy = T::one() / (self.fov_y * T::lit(0.5)).tan();
        Projector {
            eye: self.eye(),
            right: rot.row(0),
            up: rot.row(1),
            forward: -rot.row(2),
            fx: fy / self.aspect(),
            fy,
            offset: self.offset,
            half_w: T::from_usize_lossy(self.width) * T::lit(0.5),
            half_h: T::from_usize_lossy(self.height) * T::lit(0.5),
        }
    }
}

/// Precomputed view transform.
pub(crate) struct Projector<T> {
    eye: Vec3<T>,
    right: Vec3<T>,
    up: Vec3<T>,
    forward: Vec3<T>,
    fx: T,
    fy: T,
    offset: [T; 2],
    half_w: T,
    half_h: T,
}

impl<T: Real> Projector<T> {
    /// Camera-space coordinates `(x right, y up, depth)`.
    #[inline]
    pub fn to_camera(&self, p: Vec3<T>) -> Vec3<T> {
        let d = p - self.eye;
        Vec3::new(d.dot(self.right), d.dot(self.up), d.dot(self.forward))
    }

    /// Pixel coordinates of a camera-space point with positive depth;
    /// pixel `(i, j)` has its center at `(i + 0.5, j + 0.5)`, rows top-down.
    #[inline]
    pub fn to_screen(&self, c: Vec3<T>) -> [T; 2] {
        let nx = c.x * self.fx / c.z + self.offset[0];
        let ny = c.y * self.fy / c.z + self.offset[1];
        [(nx + T::one()) * self.half_w, (T::one() - ny) * self.half_h]
    }
}

use serde::{Deserialize, Serialize};

use super::linalg::Vec3;
use crate::error::CraftError;
use crate::scalar::Real;

/// Axis-aligned box in the canonical frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Aabb<T> {
    pub min_corner: Vec3<T>,
    pub max_corner: Vec3<T>,
}

impl<T: Real> Aabb<T> {
    pub fn new(min_corner: Vec3<T>, max_corner: Vec3<T>) -> Self {
        debug_assert!((0..3).all(|i| min_corner[i] <= max_corner[i]));
        Self {
            min_corner,
            max_corner,
        }
    }

    pub fn from_center_dims(center: Vec3<T>, dims: Vec3<T>) -> Self {
        let half = dims * T::lit(0.5);
        Self::new(center - half, center + half)
    }

    pub fn dims(&self) -> Vec3<T> {
        self.max_corner - self.min_corner
    }

    pub fn center(&self) -> Vec3<T> {
        (self.min_corner + self.max_corner) * T::lit(0.5)
    }

    pub fn translated(&self, t: Vec3<T>) -> Self {
        Self::new(self.min_corner + t, self.max_corner + t)
    }

    /// Mirror image across the `x = 0` plane.
    pub fn reflected_x(&self) -> Self {
        let mut lo = self.min_corner;
        let mut hi = self.max_corner;
        lo.x = -self.max_corner.x;
        hi.x = -self.min_corner.x;
        Self::new(lo, hi)
    }

    pub fn intersection_volume(&self, other: &Self) -> T {
        let lo = self.min_corner.max(other.min_corner);
        let hi = self.max_corner.min(other.max_corner);
        let d = hi - lo;
        if d.x <= T::zero() || d.y <= T::zero() || d.z <= T::zero() {
            T::zero()
        } else {
            d.x * d.y * d.z
        }
    }

    pub fn union(&self, other: &Self) -> Self {
        Self::new(
            self.min_corner.min(other.min_corner),
            self.max_corner.max(other.max_corner),
        )
    }
}

/// Componentwise bounds of a point set.
pub fn aabb_of<T: Real>(points: &[Vec3<T>]) -> Result<Aabb<T>, CraftError> {
    let (first, rest) = points.split_first().ok_or(CraftError::EmptyGeometry)?;
    let (lo, hi) = rest
        .iter()
        .fold((*first, *first), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    Ok(Aabb::new(lo, hi))
}

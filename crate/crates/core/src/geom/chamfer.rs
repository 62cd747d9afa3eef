//! Symmetric chamfer distance backed by a static k-d tree.

use super::linalg::Vec3;
use crate::error::CraftError;
use crate::scalar::Real;

/// Static 3-d tree over a point set, stored as a permuted array.
pub struct KdTree<'a, T> {
    points: &'a [Vec3<T>],
    order: Vec<usize>,
    split_axis: Vec<u8>,
}

impl<'a, T: Real> KdTree<'a, T> {
    pub fn build(points: &'a [Vec3<T>]) -> Self {
        let mut order: Vec<usize> = (0..points.len()).collect();
        let mut split_axis = vec![0u8; points.len()];
        Self::build_range(points, &mut order, &mut split_axis, 0, points.len());
        Self {
            points,
            order,
            split_axis,
        }
    }

    fn build_range(
        points: &[Vec3<T>],
        order: &mut [usize],
        split_axis: &mut [u8],
        lo: usize,
        hi: usize,
    ) {
        if hi - lo <= 1 {
            return;
        }
        let slice = &mut order[lo..hi];
        let mut mn = points[slice[0]];
        let mut mx = mn;
        for &i in slice.iter() {
            mn = mn.min(points[i]);
            mx = mx.max(points[i]);
        }
        let spread = mx - mn;
        let axis = if spread.x >= spread.y && spread.x >= spread.z {
            0
        } else if spread.y >= spread.z {
            1
        } else {
            2
        };
        let mid = (hi - lo) / 2;
        slice.select_nth_unstable_by(mid, |&a, &b| {
            points[a][axis].partial_cmp(&points[b][axis]).unwrap()
        });
        split_axis[lo + mid] = axis as u8;
        Self::build_range(points, order, split_axis, lo, lo + mid);
        Self::build_range(points, order, split_axis, lo + mid + 1, hi);
    }

    /// Squared distance from `q` to its nearest neighbor in the tree.
    pub fn nearest_sq(&self, q: Vec3<T>) -> T {
        let mut best = T::infinity();
        self.search(q, 0, self.order.len(), &mut best);
        best
    }

    fn search(&self, q: Vec3<T>, lo: usize, hi: usize, best: &mut T) {
        if lo >= hi {
            return;
        }
        let mid = lo + (hi - lo) / 2;
        let p = self.points[self.order[mid]];
        let d = q.dist_sq(p);
        if d < *best {
            *best = d;
        }
        if hi - lo == 1 {
            return;
        }
        let axis = self.split_axis[mid] as usize;
        let delta = q[axis] - p[axis];
        let (near, far) = if delta < T::zero() {
            ((lo, mid), (mid + 1, hi))
        } else {
            ((mid + 1, hi), (lo, mid))
        };
        self.search(q, near.0, near.1, best);
        if delta * delta < *best {
            self.search(q, far.0, far.1, best);
        }
    }
}

/// Mean over `from` of the squared distance to the nearest point of `to`.
pub fn mean_nearest_sq<T: Real>(from: &[Vec3<T>], to: &[Vec3<T>]) -> Result<T, CraftError> {
    if from.is_empty() || to.is_empty() {
        return Err(CraftError::EmptyPointSet);
    }
    let tree = KdTree::build(to);
    let mut sum = T::zero();
    for &p in from {
        sum += tree.nearest_sq(p);
    }
    Ok(sum / T::from_usize_lossy(from.len()))
}

/// Symmetric chamfer distance: the sum of both directed mean squared
/// nearest-neighbor distances.
pub fn chamfer<T: Real>(a: &[Vec3<T>], b: &[Vec3<T>]) -> Result<T, CraftError> {
    Ok(mean_nearest_sq(a, b)? + mean_nearest_sq(b, a)?)
}

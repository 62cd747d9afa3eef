//! Area-weighted uniform surface sampling.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::linalg::{Axis, Vec3};
use super::mesh::TriMesh;
use super::primitive::Primitive;
use crate::error::CraftError;
use crate::scalar::Real;
use crate::seed::{self, Stream};

/// Surfaces that can be sampled uniformly by area.
pub trait SurfaceSampler<T: Real> {
    fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3<T>>, CraftError>;

    /// `n` points, deterministic for a fixed `seed`.
    fn sample_points(&self, n: usize, seed: u64) -> Result<Vec<Vec3<T>>, CraftError> {
        self.sample_with(n, &mut seed::rng(seed, Stream::Sampling))
    }
}

fn uniform<T: Real>(rng: &mut ChaCha8Rng) -> T {
    T::lit(rng.random::<f64>())
}

impl<T: Real> SurfaceSampler<T> for TriMesh<T> {
    fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3<T>>, CraftError> {
        if n == 0 {
            return Err(CraftError::ZeroSamples);
        }
        if self.triangles.is_empty() {
            return Err(CraftError::EmptyGeometry);
        }
        let mut cumulative = Vec::with_capacity(self.triangles.len());
        let mut total = T::zero();
        for &t in &self.triangles {
            total += self.triangle_area(t);
            cumulative.push(total);
        }
        if !(total > T::zero()) {
            return Err(CraftError::ZeroArea);
        }
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let target = uniform::<T>(rng) * total;
            let idx = cumulative
                .partition_point(|&c| c <= target)
                .min(cumulative.len() - 1);
            let [a, b, c] = self.corners(self.triangles[idx]);
            let r1 = uniform::<T>(rng).sqrt();
            let r2 = uniform::<T>(rng);
            let p = a * (T::one() - r1) + b * (r1 * (T::one() - r2)) + c * (r1 * r2);
            out.push(p);
        }
        Ok(out)
    }
}

impl<T: Real> SurfaceSampler<T> for Primitive<T> {
    fn sample_with(&self, n: usize, rng: &mut ChaCha8Rng) -> Result<Vec<Vec3<T>>, CraftError> {
        if n == 0 {
            return Err(CraftError::ZeroSamples);
        }
        if !(self.surface_area() > T::zero()) {
            return Err(CraftError::ZeroArea);
        }
        let half = T::lit(0.5);
        let mut out = Vec::with_capacity(n);
        match *self {
            Primitive::Cuboid { dims } => {
                // faces normal to x, y, z
                let areas = [dims.y * dims.z, dims.x * dims.z, dims.x * dims.y];
                let total = areas[0] + areas[1] + areas[2];
                for _ in 0..n {
                    let pick = uniform::<T>(rng) * total;
                    let axis = if pick < areas[0] {
                        0
                    } else if pick < areas[0] + areas[1] {
                        1
                    } else {
                        2
                    };
                    let side = if rng.random::<bool>() { half } else { -half };
                    let mut p = Vec3::zero();
                    for i in 0..3 {
                        p[i] = if i == axis {
                            side * dims[i]
                        } else {
                            (uniform::<T>(rng) - half) * dims[i]
                        };
                    }
                    out.push(p);
                }
            }
            Primitive::Cylinder {
                radius,
                length,
                axis,
            } => {
                let side_area = T::TAU() * radius * length;
                let cap_area = T::PI() * radius * radius;
                let total = side_area + cap_area + cap_area;
                let [a1, a2] = axis.cross_axes();
                for _ in 0..n {
                    let pick = uniform::<T>(rng) * total;
                    let theta = uniform::<T>(rng) * T::TAU();
                    let (along, rho) = if pick < side_area {
                        ((uniform::<T>(rng) - half) * length, radius)
                    } else {
                        let end = if pick < side_area + cap_area { -half } else { half };
                        (end * length, radius * uniform::<T>(rng).sqrt())
                    };
                    out.push(place(axis, a1, a2, along, rho * theta.cos(), rho * theta.sin()));
                }
            }
        }
        Ok(out)
    }
}

fn place<T: Real>(axis: Axis, a1: Axis, a2: Axis, along: T, u: T, v: T) -> Vec3<T> {
    let mut p = Vec3::zero();
    p[axis.index()] = along;
    p[a1.index()] = u;
    p[a2.index()] = v;
    p
}

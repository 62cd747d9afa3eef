//! Closed, outward-wound meshes for the basic solids.

use super::linalg::{Axis, Vec3};
use super::mesh::TriMesh;
use super::primitive::Primitive;
use crate::scalar::Real;

/// Segment count used for tessellated cylinders; divisible by four so
/// the polygon reaches the full radius along both cross axes.
pub const CYLINDER_SEGMENTS: usize = 16;

pub fn cuboid_mesh<T: Real>(dims: Vec3<T>, center: Vec3<T>) -> TriMesh<T> {
    let h = dims * T::lit(0.5);
    let mut vertices = Vec::with_capacity(8);
    for i in 0..8 {
        let sx = if i & 1 == 0 { -h.x } else { h.x };
        let sy = if i & 2 == 0 { -h.y } else { h.y };
        let sz = if i & 4 == 0 { -h.z } else { h.z };
        vertices.push(center + Vec3::new(sx, sy, sz));
    }
    let quads: [[u32; 4]; 6] = [
        [0, 2, 6, 4], // -x
        [1, 5, 7, 3], // +x
        [0, 4, 5, 1], // -y
        [2, 3, 7, 6], // +y
        [0, 1, 3, 2], // -z
        [4, 6, 7, 5], // +z
    ];
    let mut triangles = Vec::with_capacity(12);
    for [a, b, c, d] in quads {
        triangles.push([a, b, c]);
        triangles.push([a, c, d]);
    }
    orient_outward(TriMesh { vertices, triangles }, center)
}

pub fn cylinder_mesh<T: Real>(
    radius: T,
    length: T,
    axis: Axis,
    center: Vec3<T>,
    segments: usize,
) -> TriMesh<T> {
    let [a1, a2] = axis.cross_axes();
    let half = length * T::lit(0.5);
    let mut vertices = Vec::with_capacity(2 * segments);
    for end in [-half, half] {
        for k in 0..segments {
            let theta = T::TAU() * T::from_usize_lossy(k) / T::from_usize_lossy(segments);
            let mut p = Vec3::zero();
            p[axis.index()] = end;
            p[a1.index()] = radius * theta.cos();
            p[a2.index()] = radius * theta.sin();
            vertices.push(center + p);
        }
    }
    let n = segments as u32;
    let mut triangles = Vec::with_capacity(4 * segments);
    for k in 0..n {
        let k1 = (k + 1) % n;
        triangles.push([k, k1, n + k1]);
        triangles.push([k, n + k1, n + k]);
    }
    for k in 1..n - 1 {
        triangles.push([0, k + 1, k]);
        triangles.push([n, n + k, n + k + 1]);
    }
    orient_outward(TriMesh { vertices, triangles }, center)
}

pub fn uv_sphere<T: Real>(radius: T, stacks: usize, slices: usize) -> TriMesh<T> {
    let mut vertices = vec![Vec3::new(T::zero(), radius, T::zero())];
    for i in 1..stacks {
        let phi = T::PI() * T::from_usize_lossy(i) / T::from_usize_lossy(stacks);
        for j in 0..slices {
            let theta = T::TAU() * T::from_usize_lossy(j) / T::from_usize_lossy(slices);
            vertices.push(Vec3::new(
                radius * phi.sin() * theta.cos(),
                radius * phi.cos(),
                radius * phi.sin() * theta.sin(),
            ));
        }
    }
    vertices.push(Vec3::new(T::zero(), -radius, T::zero()));
    let s = slices as u32;
    let ring = |i: u32, j: u32| 1 + i * s + (j % s);
    let bottom = vertices.len() as u32 - 1;
    let mut triangles = Vec::new();
    for j in 0..s {
        triangles.push([0, ring(0, j), ring(0, j + 1)]);
    }
    for i in 0..(stacks as u32 - 2) {
        for j in 0..s {
            triangles.push([ring(i, j), ring(i + 1, j), ring(i + 1, j + 1)]);
            triangles.push([ring(i, j), ring(i + 1, j + 1), ring(i, j + 1)]);
        }
    }
    let last = stacks as u32 - 2;
    for j in 0..s {
        triangles.push([bottom, ring(last, j + 1), ring(last, j)]);
    }
    orient_outward(TriMesh { vertices, triangles }, Vec3::zero())
}

/// Tessellates a primitive placed at `center` with identity rotation.
pub fn primitive_mesh<T: Real>(prim: &Primitive<T>, center: Vec3<T>) -> TriMesh<T> {
    match *prim {
        Primitive::Cuboid { dims } => cuboid_mesh(dims, center),
        Primitive::Cylinder {
            radius,
            length,
            axis,
        } => cylinder_mesh(radius, length, axis, center, CYLINDER_SEGMENTS),
    }
}

// Flips faces whose normal points toward `center`; valid for convex solids.
fn orient_outward<T: Real>(mut mesh: TriMesh<T>, center: Vec3<T>) -> TriMesh<T> {
    for tri in &mut mesh.triangles {
        let [a, b, c] = tri.map(|i| mesh.vertices[i as usize]);
        let n = (b - a).cross(c - a);
        let centroid = (a + b + c) * (T::one() / T::lit(3.0));
        if n.dot(centroid - center) < T::zero() {
            tri.swap(1, 2);
        }
    }
    mesh
}

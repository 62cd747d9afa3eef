//! Triangle meshes, labeled template meshes and part instances.

use serde::{Deserialize, Serialize};

use super::aabb::{aabb_of, Aabb};
use super::linalg::Vec3;
use super::taxonomy::{ObjectClass, PartClass};
use crate::error::CraftError;
use crate::scalar::Real;

/// Plain indexed triangle mesh.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TriMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<[u32; 3]>,
}

impl<T: Real> TriMesh<T> {
    pub fn new(vertices: Vec<Vec3<T>>, triangles: Vec<[u32; 3]>) -> Result<Self, CraftError> {
        let n = vertices.len();
        if let Some(t) = triangles.iter().find(|t| t.iter().any(|&i| i as usize >= n)) {
            return Err(CraftError::InvalidMesh(format!(
                "triangle {t:?} indexes past {n} vertices"
            )));
        }
        Ok(Self {
            vertices,
            triangles,
        })
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn corners(&self, tri: [u32; 3]) -> [Vec3<T>; 3] {
        tri.map(|i| self.vertices[i as usize])
    }

    pub fn triangle_area(&self, tri: [u32; 3]) -> T {
        let [a, b, c] = self.corners(tri);
        (b - a).cross(c - a).norm() * T::lit(0.5)
    }

    pub fn surface_area(&self) -> T {
        self.triangles.iter().map(|&t| self.triangle_area(t)).sum()
    }

    pub fn aabb(&self) -> Result<Aabb<T>, CraftError> {
        aabb_of(&self.vertices)
    }

    /// Appends `other`, returning the index of its first triangle.
    pub fn append(&mut self, other: &TriMesh<T>) -> usize {
        let base = self.vertices.len() as u32;
        let first = self.triangles.len();
        self.vertices.extend_from_slice(&other.vertices);
        self.triangles
            .extend(other.triangles.iter().map(|t| t.map(|i| i + base)));
        first
    }

    pub fn map_vertices(&self, f: impl Fn(Vec3<T>) -> Vec3<T>) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| f(v)).collect(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn translated(&self, t: Vec3<T>) -> Self {
        self.map_vertices(|v| v + t)
    }

    pub fn scaled(&self, s: Vec3<T>) -> Self {
        self.map_vertices(|v| v.component_mul(s))
    }

    /// Mirror image across `x = 0`, with winding flipped to keep orientation.
    pub fn reflected_x(&self) -> Self {
        Self {
            vertices: self
                .vertices
                .iter()
                .map(|v| Vec3::new(-v.x, v.y, v.z))
                .collect(),
            triangles: self.triangles.iter().map(|&[a, b, c]| [a, c, b]).collect(),
        }
    }

    /// Sub-mesh made of the given faces, with vertices re-indexed.
    pub fn submesh(&self, faces: &[usize]) -> Self {
        let mut remap = vec![u32::MAX; self.vertices.len()];
        let mut vertices = Vec::new();
        let mut triangles = Vec::with_capacity(faces.len());
        for &f in faces {
            let tri = self.triangles[f].map(|i| {
                let slot = &mut remap[i as usize];
                if *slot == u32::MAX {
                    *slot = vertices.len() as u32;
                    vertices.push(self.vertices[i as usize]);
                }
                *slot
            });
            triangles.push(tri);
        }
        Self {
            vertices,
            triangles,
        }
    }
}

/// Faces of one connected, same-labeled region of a labeled mesh.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InstanceFaces {
    pub part_class: PartClass,
    pub faces: Vec<usize>,
}

/// Template mesh whose faces carry part-class labels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct LabeledMesh<T> {
    pub vertices: Vec<Vec3<T>>,
    pub triangles: Vec<[u32; 3]>,
    pub face_labels: Vec<PartClass>,
    pub object_class: ObjectClass,
    pub template_id: String,
}

impl<T: Real> LabeledMesh<T> {
    /// Builds a mesh after checking indices, label count and label compatibility.
    pub fn new(
        mesh: TriMesh<T>,
        face_labels: Vec<PartClass>,
        object_class: ObjectClass,
        template_id: impl Into<String>,
    ) -> Result<Self, CraftError> {
        let mesh = TriMesh::new(mesh.vertices, mesh.triangles)?;
        if face_labels.len() != mesh.triangles.len() {
            return Err(CraftError::InvalidMesh(format!(
                "{} labels for {} triangles",
                face_labels.len(),
                mesh.triangles.len()
            )));
        }
        if let Some(bad) = face_labels
            .iter()
            .find(|l| !l.is_compatible_with(object_class))
        {
            return Err(CraftError::InvalidMesh(format!(
                "part class {bad} is not compatible with {object_class}"
            )));
        }
        Ok(Self {
            vertices: mesh.vertices,
            triangles: mesh.triangles,
            face_labels,
            object_class,
            template_id: template_id.into(),
        })
    }

    /// Checks the template normalization: every vertex inside the centered unit cube.
    pub fn check_unit_cube(&self) -> Result<(), CraftError> {
        let lim = T::lit(0.5 + 1e-9);
        match self
            .vertices
            .iter()
            .find(|v| v.x.abs() > lim || v.y.abs() > lim || v.z.abs() > lim)
        {
            Some(v) => Err(CraftError::InvalidMesh(format!(
                "vertex {v:?} outside the unit cube"
            ))),
            None => Ok(()),
        }
    }

    pub fn tri_mesh(&self) -> TriMesh<T> {
        TriMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
    }

    pub fn part_classes(&self) -> Vec<PartClass> {
        let mut classes = self.face_labels.clone();
        classes.sort();
        classes.dedup();
        classes
    }

    /// Uniformly rescales and recenters so the bounding box fits the centered unit cube.
    pub fn normalize_to_unit_cube(&mut self) -> Result<(), CraftError> {
        let bb = aabb_of(&self.vertices)?;
        let extent = bb.dims().max_element();
        if extent <= T::zero() {
            return Err(CraftError::InvalidMesh("zero extent".into()));
        }
        let c = bb.center();
        let s = T::one() / extent;
        for v in &mut self.vertices {
            *v = (*v - c) * s;
        }
        Ok(())
    }

    /// Connected components of same-labeled faces, ordered by first face.
    ///
    /// Faces connect when they share a vertex index.
    pub fn part_instances(&self) -> Vec<InstanceFaces> {
        let n = self.triangles.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut i: usize) -> usize {
            while parent[i] != i {
                parent[i] = parent[parent[i]];
                i = parent[i];
            }
            i
        }
        // first face seen per (vertex, label)
        let mut owner: std::collections::HashMap<(u32, PartClass), usize> = Default::default();
        for (f, tri) in self.triangles.iter().enumerate() {
            for &v in tri {
                match owner.entry((v, self.face_labels[f])) {
                    std::collections::hash_map::Entry::Occupied(e) => {
                        let a = find(&mut parent, *e.get());
                        let b = find(&mut parent, f);
                        if a != b {
                            parent[a.max(b)] = a.min(b);
                        }
                    }
                    std::collections::hash_map::Entry::Vacant(e) => {
                        e.insert(f);
                    }
                }
            }
        }
        let mut slot_of_root: std::collections::HashMap<usize, usize> = Default::default();
        let mut out: Vec<InstanceFaces> = Vec::new();
        for f in 0..n {
            let root = find(&mut parent, f);
            let slot = *slot_of_root.entry(root).or_insert_with(|| {
                out.push(InstanceFaces {
                    part_class: self.face_labels[f],
                    faces: Vec::new(),
                });
                out.len() - 1
            });
            out[slot].faces.push(f);
        }
        out
    }

    /// Geometry of one instance as a standalone mesh.
    pub fn instance_mesh(&self, instance: &InstanceFaces) -> TriMesh<T> {
        TriMesh {
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
        .submesh(&instance.faces)
    }
}

//! Fast binary silhouettes for the pose optimizer's inner loop.

use super::camera::{Camera, NEAR};
use super::mask::Mask;
use super::render::{clip_near, fill_convex};
use crate::geom::{LabeledMesh, Vec3};
use crate::scalar::Real;

struct Instance<T> {
    vertices: Vec<Vec3<T>>,
    triangles: Vec<[u32; 3]>,
    convex: bool,
}

/// Silhouette renderer with per-instance preprocessing.
///
/// Convex part instances in front of the camera are filled as the convex
/// hull of their projected vertices; anything else goes through the
/// triangle path. Coverage uses the same pixel-center rule as
/// [`render_labels`](super::render_labels), so the two agree except for
/// pixel centers lying exactly on an edge.
pub struct SilhouetteRenderer<T> {
    instances: Vec<Instance<T>>,
}

impl<T: Real> SilhouetteRenderer<T> {
    pub fn new(mesh: &LabeledMesh<T>) -> Self {
        let instances = mesh
            .part_instances()
            .iter()
            .map(|inst| {
                let m = mesh.instance_mesh(inst);
                let convex = is_convex(&m.vertices, &m.triangles);
                Instance {
                    vertices: m.vertices,
                    triangles: m.triangles,
                    convex,
                }
            })
            .collect();
        Self { instances }
    }

    pub fn render(&self, scale: Vec3<T>, cam: &Camera<T>) -> Mask {
        let mut mask = Mask::new(cam.width, cam.height);
        self.render_into(scale, cam, &mut mask);
        mask
    }

    pub fn render_into(&self, scale: Vec3<T>, cam: &Camera<T>, mask: &mut Mask) {
        mask.clear();
        let proj = cam.projector();
        let near = T::lit(NEAR);
        let (w, h) = (cam.width, cam.height);
        let mut cs: Vec<Vec3<T>> = Vec::new();
        let mut pts: Vec<[f64; 2]> = Vec::new();
        let mut hull: Vec<[f64; 2]> = Vec::new();
        for inst in &self.instances {
            cs.clear();
            cs.extend(inst.vertices.iter().map(|v| proj.to_camera(v.component_mul(scale))));
            if cs.iter().all(|c| c.z < near) {
                continue;
            }
            if inst.convex && cs.iter().all(|c| c.z >= near) {
                pts.clear();
                pts.extend(cs.iter().map(|&c| {
                    let s = proj.to_screen(c);
                    [s[0].as_f64(), s[1].as_f64()]
                }));
                convex_hull(&mut pts, &mut hull);
                fill_convex(&hull, w, h, |y, x0, x1| mask.set_span(y, x0, x1));
            } else {
                for tri in &inst.triangles {
                    let poly = clip_near(tri.map(|i| cs[i as usize]));
                    for k in 1..poly.len().saturating_sub(1) {
                        let s = [poly[0], poly[k], poly[k + 1]].map(|c| {
                            let s = proj.to_screen(c);
                            [s[0].as_f64(), s[1].as_f64()]
                        });
                        fill_convex(&s, w, h, |y, x0, x1| mask.set_span(y, x0, x1));
                    }
                }
            }
        }
    }
}

/// Every vertex lies on the inner side of every face plane.
fn is_convex<T: Real>(vertices: &[Vec3<T>], triangles: &[[u32; 3]]) -> bool {
    if vertices.len() < 4 {
        return false;
    }
    let n = T::from_usize_lossy(vertices.len());
    let centroid = vertices.iter().fold(Vec3::zero(), |a, &v| a + v) * (T::one() / n);
    let bb = crate::geom::aabb_of(vertices).expect("nonempty");
    let tol = bb.dims().max_element() * T::lit(1e-7);
    for tri in triangles {
        let [a, b, c] = tri.map(|i| vertices[i as usize]);
        let nrm = (b - a).cross(c - a);
        let len = nrm.norm();
        if len <= T::zero() {
            continue;
        }
        let mut nrm = nrm * (T::one() / len);
        if (centroid - a).dot(nrm) > T::zero() {
            nrm = -nrm;
        }
        if vertices.iter().any(|&v| (v - a).dot(nrm) > tol) {
            return false;
        }
    }
    true
}

/// Andrew's monotone chain; `out` receives the hull counter-clockwise
/// without repeated points.
pub(crate) fn convex_hull(pts: &mut [[f64; 2]], out: &mut Vec<[f64; 2]>) {
    out.clear();
    // insertion sort: inputs are a few dozen points
    for i in 1..pts.len() {
        let p = pts[i];
        let mut j = i;
        while j > 0 && (pts[j - 1][0] > p[0] || (pts[j - 1][0] == p[0] && pts[j - 1][1] > p[1])) {
            pts[j] = pts[j - 1];
            j -= 1;
        }
        pts[j] = p;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    for &p in pts.iter() {
        while out.len() >= 2 && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
            out.pop();
        }
        out.push(p);
    }
    let lower = out.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while out.len() >= lower && cross(out[out.len() - 2], out[out.len() - 1], p) <= 0.0 {
            out.pop();
        }
        out.push(p);
    }
    out.pop();
}

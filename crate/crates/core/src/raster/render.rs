//! Z-buffered label rasterization with pixel-center coverage.

use std::collections::BTreeMap;

use super::camera::{Camera, Projector, NEAR};
use super::labelmap::LabelMap;
use crate::error::CraftError;
use crate::geom::{LabeledMesh, PartClass, Vec3};
use crate::scalar::Real;

/// Calls `span(y, x0, x1)` for every row of pixels whose centers lie inside
/// the convex polygon `poly` (either winding, no repeated points);
/// `x0..=x1` is inclusive and clamped to the image. Degenerate polygons
/// cover nothing.
pub(crate) fn fill_convex(
    poly: &[[f64; 2]],
    width: usize,
    height: usize,
    mut span: impl FnMut(usize, usize, usize),
) {
    let n = poly.len();
    if n < 3 {
        return;
    }
    let mut area2 = 0.0;
    let (mut top, mut bottom) = (0, 0);
    let (mut xmin, mut xmax) = (f64::INFINITY, f64::NEG_INFINITY);
    for k in 0..n {
        let (p, q) = (poly[k], poly[(k + 1) % n]);
        area2 += p[0] * q[1] - q[0] * p[1];
        if p[1] < poly[top][1] {
            top = k;
        }
        if p[1] > poly[bottom][1] {
            bottom = k;
        }
        xmin = xmin.min(p[0]);
        xmax = xmax.max(p[0]);
    }
    if area2.abs() < 1e-9 || !(xmax > 0.0 && xmin < width as f64) {
        return;
    }
    let y0 = (poly[top][1] - 0.5).ceil().max(0.0);
    let y1 = (poly[bottom][1] - 0.5).floor().min(height as f64 - 1.0);
    if !(y0 <= y1) {
        return;
    }
    // walk both chains from the top vertex to the bottom one
    let mut left = Chain::new(poly, top, true);
    let mut right = Chain::new(poly, top, false);
    for y in y0 as usize..=y1 as usize {
        let yc = y as f64 + 0.5;
        let (a0, a1) = left.span_at(poly, bottom, yc);
        let (b0, b1) = right.span_at(poly, bottom, yc);
        let x0 = ceil_i(if a0 < b0 { a0 } else { b0 } - 0.5).max(0);
        let x1 = floor_i(if a1 > b1 { a1 } else { b1 } - 0.5).min(width as i64 - 1);
        if x0 <= x1 {
            span(y, x0 as usize, x1 as usize);
        }
    }
}

/// Cursor on one side of a convex polygon, stepping forward or backward
/// from the top vertex.
struct Chain {
    cur: usize,
    next: usize,
    forward: bool,
    slope: f64,
    flat: bool,
}

impl Chain {
    fn new(poly: &[[f64; 2]], top: usize, forward: bool) -> Self {
        let mut c = Self {
            cur: top,
            next: top,
            forward,
            slope: 0.0,
            flat: false,
        };
        c.next = c.step(top, poly.len());
        c.load(poly);
        c
    }

    #[inline]
    fn step(&self, i: usize, n: usize) -> usize {
        if self.forward {
            if i + 1 == n {
                0
            } else {
                i + 1
            }
        } else if i == 0 {
            n - 1
        } else {
            i - 1
        }
    }

    #[inline]
    fn load(&mut self, poly: &[[f64; 2]]) {
        let (p, q) = (poly[self.cur], poly[self.next]);
        let dy = q[1] - p[1];
        self.flat = dy.abs() < 1e-12;
        self.slope = if self.flat { 0.0 } else { (q[0] - p[0]) / dy };
    }

    /// Horizontal extent of the chain at height `yc`.
    #[inline(always)]
    fn span_at(&mut self, poly: &[[f64; 2]], bottom: usize, yc: f64) -> (f64, f64) {
        while self.cur != bottom && poly[self.next][1] < yc {
            self.cur = self.next;
            self.next = self.step(self.cur, poly.len());
            self.load(poly);
        }
        let p = poly[self.cur];
        if self.flat {
            let q = poly[self.next];
            if p[0] < q[0] {
                (p[0], q[0])
            } else {
                (q[0], p[0])
            }
        } else {
            let x = p[0] + self.slope * (yc - p[1]);
            (x, x)
        }
    }
}

/// `ceil` via truncation; the libm call is slow without SSE4.1.
#[inline]
fn ceil_i(t: f64) -> i64 {
    let i = t as i64;
    i + ((i as f64) < t) as i64
}

#[inline]
fn floor_i(t: f64) -> i64 {
    let i = t as i64;
    i - ((i as f64) > t) as i64
}

/// Clips a camera-space triangle to the near plane; returns the clipped
/// polygon (0, 3 or 4 vertices).
pub(crate) fn clip_near<T: Real>(tri: [Vec3<T>; 3]) -> Vec<Vec3<T>> {
    let near = T::lit(NEAR);
    if tri.iter().all(|v| v.z >= near) {
        return tri.to_vec();
    }
    let mut out = Vec::with_capacity(4);
    for k in 0..3 {
        let (a, b) = (tri[k], tri[(k + 1) % 3]);
        let (ain, bin) = (a.z >= near, b.z >= near);
        if ain {
            out.push(a);
        }
        if ain != bin {
            let t = (near - a.z) / (b.z - a.z);
            out.push(a + (b - a) * t);
        }
    }
    out
}

/// Depth buffer plus label buffer for one frame.
pub(crate) struct Frame {
    pub width: usize,
    pub height: usize,
    pub labels: Vec<u8>,
    inv_depth: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            labels: vec![0; width * height],
            inv_depth: vec![0.0; width * height],
        }
    }

    /// Rasterizes one camera-space triangle; on equal depth the earlier
    /// triangle keeps the pixel.
    pub fn draw<T: Real>(&mut self, proj: &Projector<T>, tri: [Vec3<T>; 3], label: u8) {
        let poly = clip_near(tri);
        for k in 1..poly.len().saturating_sub(1) {
            let pts = [poly[0], poly[k], poly[k + 1]];
            let mut s = [[0.0; 2]; 3];
            let mut w = [0.0; 3];
            for i in 0..3 {
                let p = proj.to_screen(pts[i]);
                s[i] = [p[0].as_f64(), p[1].as_f64()];
                w[i] = 1.0 / pts[i].z.as_f64();
            }
            let d = (s[1][0] - s[0][0]) * (s[2][1] - s[0][1])
                - (s[2][0] - s[0][0]) * (s[1][1] - s[0][1]);
            if d.abs() < 1e-9 {
                continue;
            }
            let a = ((w[1] - w[0]) * (s[2][1] - s[0][1]) - (w[2] - w[0]) * (s[1][1] - s[0][1])) / d;
            let b = ((s[1][0] - s[0][0]) * (w[2] - w[0]) - (s[2][0] - s[0][0]) * (w[1] - w[0])) / d;
            let c = w[0] - a * s[0][0] - b * s[0][1];
            let width = self.width;
            let (labels, depth) = (&mut self.labels, &mut self.inv_depth);
            fill_convex(&s, self.width, self.height, |y, x0, x1| {
                let yc = y as f64 + 0.5;
                for x in x0..=x1 {
                    let z = a * (x as f64 + 0.5) + b * yc + c;
                    let i = y * width + x;
                    if z > depth[i] {
                        depth[i] = z;
                        labels[i] = label;
                    }
                }
            });
        }
    }
}

/// Renders triangles of `vertices` (model frame, scaled by `scale`) with one
/// label byte per triangle; label 0 faces are skipped.
pub(crate) fn render_faces<T: Real>(
    vertices: &[Vec3<T>],
    triangles: &[[u32; 3]],
    labels: &[u8],
    scale: Vec3<T>,
    cam: &Camera<T>,
) -> Vec<u8> {
    let proj = cam.projector();
    let cam_space: Vec<Vec3<T>> = vertices
        .iter()
        .map(|v| proj.to_camera(v.component_mul(scale)))
        .collect();
    let mut frame = Frame::new(cam.width, cam.height);
    for (tri, &label) in triangles.iter().zip(labels) {
        if label == 0 {
            continue;
        }
        let t = tri.map(|i| cam_space[i as usize]);
        frame.draw(&proj, t, label);
    }
    frame.labels
}

fn check_inputs<T: Real>(scale: Vec3<T>, cam: &Camera<T>) -> Result<(), CraftError> {
    cam.validate()?;
    if !(scale.x > T::zero() && scale.y > T::zero() && scale.z > T::zero()) {
        return Err(CraftError::InvalidCamera(format!("scale {scale:?} must be positive")));
    }
    Ok(())
}

/// Renders per-class labels: each covered pixel holds the class index of the
/// nearest face. A mesh entirely behind the camera gives an empty map.
pub fn render_labels<T: Real>(
    mesh: &LabeledMesh<T>,
    scale: Vec3<T>,
    cam: &Camera<T>,
) -> Result<LabelMap, CraftError> {
    check_inputs(scale, cam)?;
    let labels: Vec<u8> = mesh.face_labels.iter().map(|c| c.index()).collect();
    let data = render_faces(&mesh.vertices, &mesh.triangles, &labels, scale, cam);
    let legend = mesh.part_classes().into_iter().map(|c| (c.index(), c)).collect();
    Ok(LabelMap::from_raw(cam.width, cam.height, data, legend))
}

/// Renders one label per part instance (in [`LabeledMesh::part_instances`]
/// order, starting at 1); the legend maps each label to its class.
pub fn render_instances<T: Real>(
    mesh: &LabeledMesh<T>,
    scale: Vec3<T>,
    cam: &Camera<T>,
) -> Result<LabelMap, CraftError> {
    check_inputs(scale, cam)?;
    let instances = mesh.part_instances();
    if instances.len() > 255 {
        return Err(CraftError::InvalidMesh(format!(
            "{} part instances exceed the 255 label limit",
            instances.len()
        )));
    }
    let mut labels = vec![0u8; mesh.triangles.len()];
    let mut legend = BTreeMap::new();
    for (k, inst) in instances.iter().enumerate() {
        let label = k as u8 + 1;
        legend.insert(label, inst.part_class);
        for &f in &inst.faces {
            labels[f] = label;
        }
    }
    let data = render_faces(&mesh.vertices, &mesh.triangles, &labels, scale, cam);
    Ok(LabelMap::from_raw(cam.width, cam.height, data, legend))
}

/// Renders instance-labeled parts given as separate meshes with explicit
/// classes; label `k + 1` is `parts[k]`.
pub fn render_parts<T: Real>(
    parts: &[(PartClass, crate::geom::TriMesh<T>)],
    cam: &Camera<T>,
) -> Result<LabelMap, CraftError> {
    cam.validate()?;
    if parts.len() > 255 {
        return Err(CraftError::InvalidMesh(format!(
            "{} parts exceed the 255 label limit",
            parts.len()
        )));
    }
    let proj = cam.projector();
    let mut frame = Frame::new(cam.width, cam.height);
    let mut legend = BTreeMap::new();
    for (k, (class, mesh)) in parts.iter().enumerate() {
        let label = k as u8 + 1;
        legend.insert(label, *class);
        let cs: Vec<Vec3<T>> = mesh.vertices.iter().map(|&v| proj.to_camera(v)).collect();
        for tri in &mesh.triangles {
            frame.draw(&proj, tri.map(|i| cs[i as usize]), label);
        }
    }
    Ok(LabelMap::from_raw(cam.width, cam.height, frame.labels, legend))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::shapes::cuboid_mesh;
    use crate::geom::{templates, ObjectClass, TriMesh};

    fn cube_mesh(center: Vec3<f64>, dims: Vec3<f64>, class: PartClass) -> (TriMesh<f64>, Vec<PartClass>) {
        let m = cuboid_mesh(dims, center);
        let n = m.triangles.len();
        (m, vec![class; n])
    }

    /// Point-in-convex-polygon test at every pixel center.
    fn brute_fill(poly: &[[f64; 2]], w: usize, h: usize) -> Vec<bool> {
        let n = poly.len();
        let area2: f64 = (0..n)
            .map(|k| poly[k][0] * poly[(k + 1) % n][1] - poly[(k + 1) % n][0] * poly[k][1])
            .sum();
        let mut out = vec![false; w * h];
        for y in 0..h {
            for x in 0..w {
                let q = [x as f64 + 0.5, y as f64 + 0.5];
                out[y * w + x] = (0..n).all(|k| {
                    let (p, r) = (poly[k], poly[(k + 1) % n]);
                    let c = (r[0] - p[0]) * (q[1] - p[1]) - (r[1] - p[1]) * (q[0] - p[0]);
                    c * area2.signum() >= 0.0
                });
            }
        }
        out
    }

    proptest::proptest! {
        #[test]
        fn fill_matches_point_in_polygon(
            pts in proptest::collection::vec((-5.0f64..37.0, -5.0f64..37.0), 3..12)
        ) {
            let mut p: Vec<[f64; 2]> = pts.iter().map(|&(x, y)| [x, y]).collect();
            let mut hull = Vec::new();
            crate::raster::silhouette::convex_hull(&mut p, &mut hull);
            let mut got = vec![false; 32 * 32];
            fill_convex(&hull, 32, 32, |y, a, b| for x in a..=b { got[y * 32 + x] = true });
            if hull.len() >= 3 {
                let want = brute_fill(&hull, 32, 32);
                // centers within rounding of an edge may go either way
                let diff = got.iter().zip(&want).filter(|(a, b)| a != b).count();
                proptest::prop_assert!(diff <= 1, "{diff} pixels differ");
            }
        }
    }

    #[test]
    fn fill_counts_pixel_centers() {
        let mut n = 0;
        // square covering centers 1.5..=4.5 in both directions
        fill_convex(&[[1.0, 1.0], [5.0, 1.0], [5.0, 5.0], [1.0, 5.0]], 8, 8, |_, a, b| {
            n += b - a + 1
        });
        assert_eq!(n, 16);
        let mut spans = Vec::new();
        fill_convex(&[[0.0, 0.0], [0.0, 2.0], [2.0, 0.0]], 8, 8, |y, a, b| spans.push((y, a, b)));
        assert_eq!(spans, vec![(0, 0, 1), (1, 0, 0)]);
        // zero area
        fill_convex(&[[0.0, 0.0], [1.0, 1.0], [2.0, 2.0]], 8, 8, |_, _, _| panic!());
    }

    #[test]
    fn triangle_facing_camera_covers_center() {
        let m = TriMesh::new(
            vec![
                Vec3::new(-0.5, -0.5, 0.0),
                Vec3::new(0.5, -0.5, 0.0),
                Vec3::new(0.0, 0.5, 0.0),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        let mesh = LabeledMesh::new(m, vec![PartClass::BusBody], ObjectClass::Bus, "t").unwrap();
        let cam = Camera::new(0.0, 0.0, 2.0, 64, 64);
        let map = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap();
        assert!(map.silhouette().get(32, 32));
        assert_eq!(map.get(32, 32), PartClass::BusBody.index());
    }

    #[test]
    fn nearer_part_wins_overlap() {
        // camera on +z looking at the origin; seat is nearer than back
        let (mut a, mut la) = cube_mesh(Vec3::new(0.0, 0.0, 0.3), Vec3::splat(0.2), PartClass::ChairSeat);
        let (b, lb) = cube_mesh(Vec3::new(0.0, 0.0, -0.3), Vec3::splat(0.4), PartClass::ChairBack);
        a.append(&b);
        la.extend(lb);
        let mesh = LabeledMesh::new(a, la.clone(), ObjectClass::Chair, "c").unwrap();
        let cam = Camera::new(0.0, 0.0, 3.0, 64, 64);
        let map = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(map.class_at(32, 32), Some(PartClass::ChairSeat));
        assert!(map.class_mask(PartClass::ChairBack).count() > 0);
        // order of faces does not matter for strict depth differences
        let (b2, lb2) = cube_mesh(Vec3::new(0.0, 0.0, -0.3), Vec3::splat(0.4), PartClass::ChairBack);
        let (a2, la2) = cube_mesh(Vec3::new(0.0, 0.0, 0.3), Vec3::splat(0.2), PartClass::ChairSeat);
        let mut m2 = b2;
        m2.append(&a2);
        let mut l2 = lb2;
        l2.extend(la2);
        let mesh2 = LabeledMesh::new(m2, l2, ObjectClass::Chair, "c").unwrap();
        let map2 = render_labels(&mesh2, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(map2.class_at(32, 32), Some(PartClass::ChairSeat));
    }

    #[test]
    fn behind_camera_is_empty() {
        let mesh = templates::generate_template::<f64>(ObjectClass::Truck, 1).unwrap();
        let mut cam = Camera::new(0.0, 0.0, 3.0, 64, 64);
        // push everything behind the eye by shifting the mesh far back
        let shifted = LabeledMesh {
            vertices: mesh.vertices.iter().map(|&v| v + Vec3::new(0.0, 0.0, 10.0)).collect(),
            ..mesh
        };
        cam.distance = 3.0;
        let map = render_labels(&shifted, Vec3::splat(1.0), &cam).unwrap();
        assert!(map.silhouette().is_empty());
    }

    #[test]
    fn wheels_below_body_in_side_view() {
        let mesh = templates::generate_template::<f64>(ObjectClass::Truck, 1).unwrap();
        let cam = Camera::new(std::f64::consts::FRAC_PI_2, 0.0, 3.0, 128, 128);
        let map = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap();
        let (_, wy) = map.class_mask(PartClass::Wheel).centroid().unwrap();
        let (_, by) = map.class_mask(PartClass::TruckBody).centroid().unwrap();
        assert!(wy > by, "wheel centroid row {wy} should be below body row {by}");
    }

    #[test]
    fn instance_labels_split_wheels() {
        let mesh = templates::generate_template::<f64>(ObjectClass::Truck, 1).unwrap();
        let cam = Camera::new(std::f64::consts::FRAC_PI_2, 0.2, 3.0, 128, 128);
        let inst = render_instances(&mesh, Vec3::splat(1.0), &cam).unwrap();
        let cls = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(inst.silhouette(), cls.silhouette());
        assert_eq!(inst.class_mask(PartClass::Wheel), cls.class_mask(PartClass::Wheel));
        let wheels = inst
            .labels_present()
            .into_iter()
            .filter(|(_, c)| *c == PartClass::Wheel)
            .count();
        assert!(wheels >= 2);
    }

    #[test]
    fn distance_monotone_on_cube() {
        let (m, l) = cube_mesh(Vec3::zero(), Vec3::splat(1.0), PartClass::BusBody);
        let mesh = LabeledMesh::new(m, l, ObjectClass::Bus, "cube").unwrap();
        let mut prev = usize::MAX;
        for k in 0..20 {
            let cam = Camera::new(0.6, 0.3, 1.5 + 0.25 * k as f64, 96, 96);
            let n = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap().silhouette().count();
            assert!(n <= prev);
            prev = n;
        }
    }

    #[test]
    fn near_plane_clipping_keeps_front_part() {
        let (m, l) = cube_mesh(Vec3::zero(), Vec3::splat(1.0), PartClass::BusBody);
        let mesh = LabeledMesh::new(m, l, ObjectClass::Bus, "cube").unwrap();
        // eye inside the cube's bounding sphere but outside the cube
        let cam = Camera::new(0.0, 0.0, 0.55, 64, 64);
        let map = render_labels(&mesh, Vec3::splat(1.0), &cam).unwrap();
        assert_eq!(map.silhouette().count(), 64 * 64);
    }
}

//! Wavefront OBJ exchange for labeled meshes.
//!
//! Every part instance is one group named `<part_class>__<index>`.

use std::collections::HashMap;
use std::fmt::Write as _;

use super::linalg::Vec3;
use super::mesh::{LabeledMesh, TriMesh};
use super::taxonomy::{ObjectClass, PartClass};
use crate::error::CraftError;
use crate::scalar::Real;

pub fn write_obj<T: Real>(mesh: &LabeledMesh<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "# {} ({})", mesh.template_id, mesh.object_class);
    for v in &mesh.vertices {
        let _ = writeln!(out, "v {} {} {}", v.x, v.y, v.z);
    }
    let mut per_class: HashMap<PartClass, usize> = HashMap::new();
    for inst in mesh.part_instances() {
        let idx = per_class.entry(inst.part_class).or_insert(0);
        *idx += 1;
        let _ = writeln!(out, "g {}__{}", inst.part_class, idx);
        for &f in &inst.faces {
            let [a, b, c] = mesh.triangles[f];
            let _ = writeln!(out, "f {} {} {}", a + 1, b + 1, c + 1);
        }
    }
    out
}

fn parse_group(name: &str) -> Result<PartClass, CraftError> {
    let class = name.split_once("__").map_or(name, |(c, _)| c);
    class.parse()
}

/// Parses an OBJ whose groups name part instances.
///
/// Vertices are duplicated per group so that groups never merge into one
/// instance. When `object_class` is `None` it is inferred from the labels.
/// The result is normalized into the centered unit cube.
pub fn read_obj<T: Real>(
    text: &str,
    template_id: &str,
    object_class: Option<ObjectClass>,
) -> Result<LabeledMesh<T>, CraftError> {
    let mut positions: Vec<Vec3<T>> = Vec::new();
    let mut mesh = TriMesh::<T>::default();
    let mut labels = Vec::new();
    let mut current: Option<PartClass> = None;
    let mut group_vertices: HashMap<usize, u32> = HashMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        let mut it = line.split_whitespace();
        let Some(tag) = it.next() else { continue };
        let err = |msg: &str| CraftError::Parse(format!("line {}: {msg}", lineno + 1));
        match tag {
            "v" => {
                let c: Vec<f64> = it
                    .take(3)
                    .map(|s| s.parse::<f64>().map_err(|_| err("bad coordinate")))
                    .collect::<Result<_, _>>()?;
                if c.len() != 3 {
                    return Err(err("vertex needs three coordinates"));
                }
                positions.push(Vec3::new(T::lit(c[0]), T::lit(c[1]), T::lit(c[2])));
            }
            "g" | "o" => {
                let name = it.next().ok_or_else(|| err("unnamed group"))?;
                current = Some(parse_group(name)?);
                group_vertices.clear();
            }
            "f" => {
                let class = current.ok_or_else(|| err("face outside a labeled group"))?;
                let mut idx = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first.parse().map_err(|_| err("bad face index"))?;
                    let resolved = if i < 0 {
                        positions.len() as i64 + i
                    } else {
                        i - 1
                    };
                    if resolved < 0 || resolved as usize >= positions.len() {
                        return Err(err("face index out of range"));
                    }
                    let local = *group_vertices.entry(resolved as usize).or_insert_with(|| {
                        mesh.vertices.push(positions[resolved as usize]);
                        mesh.vertices.len() as u32 - 1
                    });
                    idx.push(local);
                }
                if idx.len() < 3 {
                    return Err(err("face needs at least three vertices"));
                }
                for k in 1..idx.len() - 1 {
                    mesh.triangles.push([idx[0], idx[k], idx[k + 1]]);
                    labels.push(class);
                }
            }
            _ => {}
        }
    }
    if mesh.triangles.is_empty() {
        return Err(CraftError::InvalidMesh("no faces".into()));
    }
    let object_class = match object_class {
        Some(c) => c,
        None => ObjectClass::from_parts(labels.iter().copied())?,
    };
    let mut out = LabeledMesh::new(mesh, labels, object_class, template_id)?;
    out.normalize_to_unit_cube()?;
    Ok(out)
}

//! Procedural part-labeled template meshes, three variants per object class.
//!
//! Frame convention: `x` is lateral (the mirror plane is `x = 0`), `y` is
//! up and `z` points toward the front of the object.

use super::linalg::{Axis, Vec3};
use super::mesh::{LabeledMesh, TriMesh};
use super::primitive::Primitive;
use super::shapes::primitive_mesh;
use super::taxonomy::{ObjectClass, PartClass};
use crate::error::CraftError;
use crate::scalar::Real;

pub const VARIANTS: u8 = 3;

/// One primitive part of a template blueprint, in authoring units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlueprintPart {
    pub part_class: PartClass,
    pub primitive: Primitive<f64>,
    pub center: Vec3<f64>,
}

fn cuboid(part_class: PartClass, dims: [f64; 3], center: [f64; 3]) -> BlueprintPart {
    BlueprintPart {
        part_class,
        primitive: Primitive::Cuboid { dims: dims.into() },
        center: center.into(),
    }
}

fn cylinder(part_class: PartClass, radius: f64, length: f64, axis: Axis, center: [f64; 3]) -> BlueprintPart {
    BlueprintPart {
        part_class,
        primitive: Primitive::Cylinder {
            radius,
            length,
            axis,
        },
        center: center.into(),
    }
}

fn wheel_pairs(radius: f64, width: f64, x: f64, zs: &[f64]) -> Vec<BlueprintPart> {
    zs.iter()
        .flat_map(|&z| {
            [-x, x].map(|x| cylinder(PartClass::Wheel, radius, width, Axis::X, [x, radius, z]))
        })
        .collect()
}

fn legs(at: &[(f64, f64)], height: f64, make: impl Fn(f64, f64, f64) -> BlueprintPart) -> Vec<BlueprintPart> {
    at.iter()
        .flat_map(|&(x, z)| [make(-x, z, height), make(x, z, height)])
        .collect()
}

fn square_leg(side: f64) -> impl Fn(f64, f64, f64) -> BlueprintPart {
    move |x, z, h| cuboid(PartClass::FurnitureLeg, [side, h, side], [x, h / 2.0, z])
}

fn round_leg(radius: f64) -> impl Fn(f64, f64, f64) -> BlueprintPart {
    move |x, z, h| cylinder(PartClass::FurnitureLeg, radius, h, Axis::Y, [x, h / 2.0, z])
}

/// Parts of a template before normalization.
pub fn blueprint(object_class: ObjectClass, variant: u8) -> Result<Vec<BlueprintPart>, CraftError> {
    use PartClass::*;
    if !(1..=VARIANTS).contains(&variant) {
        return Err(CraftError::InvalidConfig(format!(
            "template variant {variant} outside 1..={VARIANTS}"
        )));
    }
    let parts = match (object_class, variant) {
        // box truck: cargo box taller than the cabin
        (ObjectClass::Truck, 1) => {
            let mut p = vec![
                cuboid(TruckCabin, [2.4, 2.0, 1.8], [0.0, 1.6, 2.5]),
                cuboid(TruckBody, [2.4, 2.6, 5.0], [0.0, 1.9, -1.0]),
            ];
            p.extend(wheel_pairs(0.5, 0.4, 1.0, &[2.4, -2.4]));
            p
        }
        // flatbed on three axles
        (ObjectClass::Truck, 2) => {
            let mut p = vec![
                cuboid(TruckCabin, [2.4, 2.2, 2.0], [0.0, 1.8, 3.0]),
                cuboid(TruckBody, [2.4, 0.6, 5.5], [0.0, 1.0, -0.75]),
            ];
            p.extend(wheel_pairs(0.5, 0.4, 1.0, &[3.0, -1.5, -2.6]));
            p
        }
        // pickup: long cabin, short low bed
        (ObjectClass::Truck, 3) => {
            let mut p = vec![
                cuboid(TruckCabin, [2.0, 1.6, 2.8], [0.0, 1.3, 1.4]),
                cuboid(TruckBody, [2.0, 0.9, 2.4], [0.0, 0.95, -1.6]),
            ];
            p.extend(wheel_pairs(0.45, 0.35, 0.85, &[1.7, -1.7]));
            p
        }
        (ObjectClass::Bus, 1) => {
            let mut p = vec![cuboid(BusBody, [2.5, 3.0, 10.0], [0.0, 1.9, 0.0])];
            p.extend(wheel_pairs(0.5, 0.4, 1.05, &[3.5, -3.5]));
            p
        }
        (ObjectClass::Bus, 2) => {
            let mut p = vec![cuboid(BusBody, [2.5, 3.2, 12.0], [0.0, 2.0, 0.0])];
            p.extend(wheel_pairs(0.5, 0.4, 1.05, &[4.2, -3.2, -4.4]));
            p
        }
        // minibus: short body, wheels close to the ends
        (ObjectClass::Bus, 3) => {
            let mut p = vec![cuboid(BusBody, [2.2, 2.6, 6.0], [0.0, 1.75, 0.0])];
            p.extend(wheel_pairs(0.5, 0.35, 0.93, &[2.3, -2.3]));
            p
        }
        (ObjectClass::Chair, 1) => {
            let mut p = vec![
                cuboid(ChairSeat, [1.0, 0.1, 1.0], [0.0, 0.5, 0.0]),
                cuboid(ChairBack, [1.0, 0.9, 0.1], [0.0, 1.0, -0.45]),
            ];
            p.extend(legs(&[(0.42, 0.42), (0.42, -0.42)], 0.45, square_leg(0.08)));
            p
        }
        (ObjectClass::Chair, 2) => {
            let mut p = vec![
                cuboid(ChairSeat, [1.0, 0.1, 1.0], [0.0, 0.5, 0.0]),
                cuboid(ChairBack, [1.0, 0.6, 0.1], [0.0, 0.85, -0.45]),
                cuboid(ChairArm, [0.1, 0.3, 0.9], [-0.55, 0.7, 0.0]),
                cuboid(ChairArm, [0.1, 0.3, 0.9], [0.55, 0.7, 0.0]),
            ];
            p.extend(legs(&[(0.42, 0.42), (0.42, -0.42)], 0.45, round_leg(0.05)));
            p
        }
        // tall back on short legs
        (ObjectClass::Chair, 3) => {
            let mut p = vec![
                cuboid(ChairSeat, [1.0, 0.1, 0.9], [0.0, 0.35, 0.0]),
                cuboid(ChairBack, [1.0, 1.4, 0.1], [0.0, 1.1, -0.4]),
            ];
            p.extend(legs(&[(0.42, 0.37), (0.42, -0.37)], 0.3, round_leg(0.05)));
            p
        }
        (ObjectClass::Table, 1) => {
            let mut p = vec![cuboid(TableSurface, [1.0, 0.08, 2.0], [0.0, 0.75, 0.0])];
            p.extend(legs(&[(0.44, 0.94), (0.44, -0.94)], 0.71, square_leg(0.08)));
            p
        }
        // long table on six legs
        (ObjectClass::Table, 2) => {
            let mut p = vec![cuboid(TableSurface, [1.0, 0.08, 3.0], [0.0, 0.75, 0.0])];
            p.extend(legs(
                &[(0.44, 1.42), (0.44, 0.0), (0.44, -1.42)],
                0.71,
                square_leg(0.08),
            ));
            p
        }
        // thick top on inset round legs
        (ObjectClass::Table, 3) => {
            let mut p = vec![cuboid(TableSurface, [1.2, 0.2, 1.7], [0.0, 0.7, 0.0])];
            p.extend(legs(&[(0.4, 0.6), (0.4, -0.6)], 0.6, round_leg(0.06)));
            p
        }
        _ => unreachable!(),
    };
    Ok(parts)
}

pub fn template_id(object_class: ObjectClass, variant: u8) -> String {
    format!("{}_{}", object_class.name(), variant)
}

/// Parses ids of the form `<object_class>_<variant>`.
pub fn parse_template_id(id: &str) -> Option<(ObjectClass, u8)> {
    let (class, variant) = id.rsplit_once('_')?;
    let variant: u8 = variant.parse().ok()?;
    let class: ObjectClass = class.parse().ok()?;
    (1..=VARIANTS).contains(&variant).then_some((class, variant))
}

/// Builds the labeled template mesh, normalized into the centered unit cube.
pub fn generate_template<T: Real>(
    object_class: ObjectClass,
    variant: u8,
) -> Result<LabeledMesh<T>, CraftError> {
    let parts = blueprint(object_class, variant)?;
    let mut mesh = TriMesh::<T>::default();
    let mut labels = Vec::new();
    for part in &parts {
        let piece = primitive_mesh(&cast_primitive(&part.primitive), part.center.cast());
        labels.extend(std::iter::repeat_n(part.part_class, piece.triangles.len()));
        mesh.append(&piece);
    }
    let mut out = LabeledMesh::new(mesh, labels, object_class, template_id(object_class, variant))?;
    out.normalize_to_unit_cube()?;
    Ok(out)
}

pub fn templates_for<T: Real>(object_class: ObjectClass) -> Vec<LabeledMesh<T>> {
    (1..=VARIANTS)
        .map(|v| generate_template(object_class, v).expect("variant in range"))
        .collect()
}

pub fn all_templates<T: Real>() -> Vec<LabeledMesh<T>> {
    ObjectClass::ALL
        .into_iter()
        .flat_map(templates_for)
        .collect()
}

fn cast_primitive<T: Real>(p: &Primitive<f64>) -> Primitive<T> {
    match *p {
        Primitive::Cuboid { dims } => Primitive::Cuboid { dims: dims.cast() },
        Primitive::Cylinder {
            radius,
            length,
            axis,
        } => Primitive::Cylinder {
            radius: T::lit(radius),
            length: T::lit(length),
            axis,
        },
    }
}

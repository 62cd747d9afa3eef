//! Part and object classes with their compatibility table.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::CraftError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ObjectClass {
    Truck,
    Bus,
    Chair,
    Table,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PartClass {
    TruckCabin,
    TruckBody,
    BusBody,
    Wheel,
    ChairBack,
    ChairSeat,
    ChairArm,
    TableSurface,
    FurnitureLeg,
}

impl ObjectClass {
    pub const ALL: [ObjectClass; 4] = [
        ObjectClass::Truck,
        ObjectClass::Bus,
        ObjectClass::Chair,
        ObjectClass::Table,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ObjectClass::Truck => "truck",
            ObjectClass::Bus => "bus",
            ObjectClass::Chair => "chair",
            ObjectClass::Table => "table",
        }
    }

    /// Part classes that may appear on an object of this class.
    pub fn compatible_parts(self) -> Vec<PartClass> {
        PartClass::ALL
            .into_iter()
            .filter(|p| p.compatible_objects().contains(&self))
            .collect()
    }

    /// Part classes that identify this object class on their own.
    pub fn unique_parts(self) -> Vec<PartClass> {
        PartClass::ALL
            .into_iter()
            .filter(|p| p.compatible_objects() == [self])
            .collect()
    }

    /// Infers the object class from the part classes visible in a segmentation.
    ///
    /// Fails unless the unique parts present all point at the same object class.
    pub fn from_parts<I>(parts: I) -> Result<ObjectClass, CraftError>
    where
        I: IntoIterator<Item = PartClass>,
    {
        let mut found: Option<ObjectClass> = None;
        for part in parts {
            if let [only] = part.compatible_objects() {
                match found {
                    None => found = Some(*only),
                    Some(prev) if prev == *only => {}
                    Some(_) => return Err(CraftError::ObjectClassUndeterminable),
                }
            }
        }
        found.ok_or(CraftError::ObjectClassUndeterminable)
    }

    /// Objects whose appearance is unchanged by a half turn about the vertical axis.
    pub fn is_yaw_symmetric(self) -> bool {
        matches!(self, ObjectClass::Bus | ObjectClass::Table)
    }

    pub fn has_axles(self) -> bool {
        matches!(self, ObjectClass::Truck | ObjectClass::Bus)
    }
}

impl PartClass {
    pub const ALL: [PartClass; 9] = [
        PartClass::TruckCabin,
        PartClass::TruckBody,
        PartClass::BusBody,
        PartClass::Wheel,
        PartClass::ChairBack,
        PartClass::ChairSeat,
        PartClass::ChairArm,
        PartClass::TableSurface,
        PartClass::FurnitureLeg,
    ];

    pub fn name(self) -> &'static str {
        match self {
            PartClass::TruckCabin => "truck_cabin",
            PartClass::TruckBody => "truck_body",
            PartClass::BusBody => "bus_body",
            PartClass::Wheel => "wheel",
            PartClass::ChairBack => "chair_back",
            PartClass::ChairSeat => "chair_seat",
            PartClass::ChairArm => "chair_arm",
            PartClass::TableSurface => "table_surface",
            PartClass::FurnitureLeg => "furniture_leg",
        }
    }

    /// Label index used in class-level label maps, `1..=9`.
    pub fn index(self) -> u8 {
        PartClass::ALL.iter().position(|&p| p == self).unwrap() as u8 + 1
    }

    pub fn from_index(index: u8) -> Option<PartClass> {
        PartClass::ALL.get(usize::from(index).checked_sub(1)?).copied()
    }

    pub fn compatible_objects(self) -> &'static [ObjectClass] {
        use ObjectClass::*;
        match self {
            PartClass::TruckCabin | PartClass::TruckBody => &[Truck],
            PartClass::BusBody => &[Bus],
            PartClass::Wheel => &[Truck, Bus],
            PartClass::ChairBack | PartClass::ChairSeat | PartClass::ChairArm => &[Chair],
            PartClass::TableSurface => &[Table],
            PartClass::FurnitureLeg => &[Chair, Table],
        }
    }

    pub fn is_compatible_with(self, object: ObjectClass) -> bool {
        self.compatible_objects().contains(&object)
    }

    /// Parts that must all receive identically dimensioned objects.
    pub fn requires_uniform_dims(self) -> bool {
        matches!(self, PartClass::Wheel | PartClass::FurnitureLeg)
    }
}

impl fmt::Display for PartClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl fmt::Display for ObjectClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PartClass {
    type Err = CraftError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        PartClass::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| CraftError::UnknownName(s.to_string()))
    }
}

impl FromStr for ObjectClass {
    type Err = CraftError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ObjectClass::ALL
            .into_iter()
            .find(|o| o.name() == s)
            .ok_or_else(|| CraftError::UnknownName(s.to_string()))
    }
}

/// Label carried by a simplified part: a Table I class, or the internal axle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum PartLabel {
    Class(PartClass),
    Axle,
}

impl PartLabel {
    pub fn name(self) -> &'static str {
        match self {
            PartLabel::Class(c) => c.name(),
            PartLabel::Axle => "axle",
        }
    }

    pub fn class(self) -> Option<PartClass> {
        match self {
            PartLabel::Class(c) => Some(c),
            PartLabel::Axle => None,
        }
    }
}

impl From<PartClass> for PartLabel {
    fn from(c: PartClass) -> Self {
        PartLabel::Class(c)
    }
}

impl From<PartLabel> for String {
    fn from(l: PartLabel) -> Self {
        l.name().to_string()
    }
}

impl TryFrom<String> for PartLabel {
    type Error = CraftError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        if s == "axle" {
            Ok(PartLabel::Axle)
        } else {
            s.parse().map(PartLabel::Class)
        }
    }
}

impl fmt::Display for PartLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

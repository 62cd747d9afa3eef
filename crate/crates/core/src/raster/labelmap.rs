//! Part-label rasters and their PGM + legend file format.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::mask::Mask;
use crate::error::CraftError;
use crate::geom::PartClass;

/// Raster of label indices; `0` is background and every other index is
/// mapped to a part class by the legend. Several indices may share a
/// class, one per part instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelMap {
    width: usize,
    height: usize,
    data: Vec<u8>,
    legend: BTreeMap<u8, PartClass>,
}

impl LabelMap {
    pub fn new(
        width: usize,
        height: usize,
        data: Vec<u8>,
        legend: BTreeMap<u8, PartClass>,
    ) -> Result<Self, CraftError> {
        if data.len() != width * height {
            return Err(CraftError::InvalidLabelMap(format!(
                "{} pixels for {width}x{height}",
                data.len()
            )));
        }
        if legend.contains_key(&0) {
            return Err(CraftError::InvalidLabelMap("label 0 is background".into()));
        }
        if let Some(l) = data.iter().find(|&&l| l != 0 && !legend.contains_key(&l)) {
            return Err(CraftError::InvalidLabelMap(format!("label {l} missing from legend")));
        }
        Ok(Self {
            width,
            height,
            data,
            legend,
        })
    }

    /// Skips validation; callers guarantee every label is in the legend.
    pub(crate) fn from_raw(
        width: usize,
        height: usize,
        data: Vec<u8>,
        legend: BTreeMap<u8, PartClass>,
    ) -> Self {
        debug_assert_eq!(data.len(), width * height);
        Self {
            width,
            height,
            data,
            legend,
        }
    }

    pub fn empty(width: usize, height: usize) -> Self {
        Self {
            width,
            height,
            data: vec![0; width * height],
            legend: BTreeMap::new(),
        }
    }

    /// Class-level map: every pixel of `mask_of(class)` gets `class.index()`.
    pub fn from_class_masks(width: usize, height: usize, masks: &[(PartClass, Mask)]) -> Self {
        let mut data = vec![0u8; width * height];
        let mut legend = BTreeMap::new();
        for (class, mask) in masks {
            legend.insert(class.index(), *class);
            for (x, y) in mask.iter_set() {
                data[y * width + x] = class.index();
            }
        }
        Self {
            width,
            height,
            data,
            legend,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn legend(&self) -> &BTreeMap<u8, PartClass> {
        &self.legend
    }

    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.data[y * self.width + x]
    }

    pub fn class_at(&self, x: usize, y: usize) -> Option<PartClass> {
        self.legend.get(&self.get(x, y)).copied()
    }

    pub fn same_shape(&self, other: &LabelMap) -> bool {
        self.width == other.width && self.height == other.height
    }

    fn mask_where(&self, pred: impl Fn(u8) -> bool) -> Mask {
        let mut m = Mask::new(self.width, self.height);
        for (i, &l) in self.data.iter().enumerate() {
            if pred(l) {
                m.set(i % self.width, i / self.width);
            }
        }
        m
    }

    /// Pixels with any non-background label.
    pub fn silhouette(&self) -> Mask {
        self.mask_where(|l| l != 0)
    }

    /// Pixels whose label maps to `part`, merging all of its instances.
    pub fn class_mask(&self, part: PartClass) -> Mask {
        let mut hit = [false; 256];
        for (&l, &c) in &self.legend {
            hit[l as usize] = c == part;
        }
        self.mask_where(|l| hit[l as usize])
    }

    pub fn label_mask(&self, label: u8) -> Mask {
        self.mask_where(|l| l == label && l != 0)
    }

    /// Part classes with at least one pixel, in class order.
    pub fn classes_present(&self) -> Vec<PartClass> {
        let mut seen = [false; 256];
        for &l in &self.data {
            seen[l as usize] = true;
        }
        let mut out: Vec<PartClass> = self
            .legend
            .iter()
            .filter(|(&l, _)| seen[l as usize])
            .map(|(_, &c)| c)
            .collect();
        out.sort();
        out.dedup();
        out
    }

    /// Labels with at least one pixel, with their classes.
    pub fn labels_present(&self) -> Vec<(u8, PartClass)> {
        let mut seen = [false; 256];
        for &l in &self.data {
            seen[l as usize] = true;
        }
        self.legend
            .iter()
            .filter(|(&l, _)| seen[l as usize])
            .map(|(&l, &c)| (l, c))
            .collect()
    }

    /// Same regions relabeled with one index per class.
    pub fn to_class_labels(&self) -> LabelMap {
        let data = self
            .data
            .iter()
            .map(|l| self.legend.get(l).map_or(0, |c| c.index()))
            .collect();
        let legend = self.legend.values().map(|&c| (c.index(), c)).collect();
        LabelMap {
            width: self.width,
            height: self.height,
            data,
            legend,
        }
    }

    /// Crop of `(x0, y0)..=(x1, y1)`.
    pub fn crop(&self, x0: usize, y0: usize, x1: usize, y1: usize) -> LabelMap {
        let (w, h) = (x1 - x0 + 1, y1 - y0 + 1);
        let mut data = Vec::with_capacity(w * h);
        for y in y0..=y1 {
            data.extend_from_slice(&self.data[y * self.width + x0..=y * self.width + x1]);
        }
        LabelMap {
            width: w,
            height: h,
            data,
            legend: self.legend.clone(),
        }
    }

    /// Nearest-neighbor resize into a `size`×`size` canvas, preserving the
    /// aspect ratio and padding the remainder with background.
    pub fn fit_square(&self, size: usize) -> LabelMap {
        let scale = size as f64 / self.width.max(self.height) as f64;
        let sw = ((self.width as f64 * scale).round() as usize).clamp(1, size);
        let sh = ((self.height as f64 * scale).round() as usize).clamp(1, size);
        let (px, py) = ((size - sw) / 2, (size - sh) / 2);
        let mut data = vec![0u8; size * size];
        for y in 0..sh {
            let sy = (((y as f64 + 0.5) / scale) as usize).min(self.height - 1);
            for x in 0..sw {
                let sx = (((x as f64 + 0.5) / scale) as usize).min(self.width - 1);
                data[(y + py) * size + x + px] = self.data[sy * self.width + sx];
            }
        }
        LabelMap {
            width: size,
            height: size,
            data,
            legend: self.legend.clone(),
        }
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut out = format!("P5\n{} {}\n255\n", self.width, self.height).into_bytes();
        out.extend_from_slice(&self.data);
        out
    }

    pub fn legend_text(&self) -> String {
        let mut s = String::new();
        for (l, c) in &self.legend {
            let _ = writeln!(s, "{l} {c}");
        }
        s
    }

    pub fn from_pgm(bytes: &[u8], legend_text: &str) -> Result<Self, CraftError> {
        let (width, height, data) = parse_pgm(bytes)?;
        LabelMap::new(width, height, data, parse_legend(legend_text)?)
    }

    /// Writes `<path>` (PGM) and its `.legend` sidecar.
    pub fn save(&self, path: &Path) -> Result<(), CraftError> {
        std::fs::write(path, self.to_pgm())?;
        std::fs::write(legend_path(path), self.legend_text())?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self, CraftError> {
        let bytes = std::fs::read(path)?;
        let legend = std::fs::read_to_string(legend_path(path))?;
        Self::from_pgm(&bytes, &legend)
    }
}

pub fn legend_path(pgm: &Path) -> PathBuf {
    pgm.with_extension("legend")
}

fn parse_legend(text: &str) -> Result<BTreeMap<u8, PartClass>, CraftError> {
    let mut legend = BTreeMap::new();
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (idx, name) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| CraftError::Parse(format!("legend line {line:?}")))?;
        let idx: u8 = idx
            .parse()
            .map_err(|_| CraftError::Parse(format!("legend index {idx:?}")))?;
        legend.insert(idx, name.trim().parse()?);
    }
    Ok(legend)
}

fn parse_pgm(bytes: &[u8]) -> Result<(usize, usize, Vec<u8>), CraftError> {
    let bad = |m: &str| CraftError::Parse(format!("pgm: {m}"));
    let mut pos = 0;
    let mut fields = Vec::with_capacity(4);
    while fields.len() < 4 {
        while pos < bytes.len() && (bytes[pos].is_ascii_whitespace() || bytes[pos] == b'#') {
            if bytes[pos] == b'#' {
                while pos < bytes.len() && bytes[pos] != b'\n' {
                    pos += 1;
                }
            } else {
                pos += 1;
            }
        }
        let start = pos;
        while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(bad("truncated header"));
        }
        fields.push(std::str::from_utf8(&bytes[start..pos]).map_err(|_| bad("header"))?);
    }
    if fields[0] != "P5" {
        return Err(bad("only binary P5 is supported"));
    }
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad("header number"));
    let (w, h, maxval) = (num(fields[1])?, num(fields[2])?, num(fields[3])?);
    if maxval == 0 || maxval > 255 {
        return Err(bad("maxval must be 1..=255"));
    }
    pos += 1; // single whitespace after maxval
    let data = bytes.get(pos..pos + w * h).ok_or_else(|| bad("truncated raster"))?;
    Ok((w, h, data.to_vec()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> LabelMap {
        let mut data = vec![0u8; 8 * 4];
        data[1] = 1;
        data[2] = 2;
        data[9] = 3;
        let legend = [(1, PartClass::Wheel), (2, PartClass::Wheel), (3, PartClass::BusBody)]
            .into_iter()
            .collect();
        LabelMap::new(8, 4, data, legend).unwrap()
    }

    #[test]
    fn silhouette_is_union_of_class_masks() {
        let m = sample();
        let mut union = Mask::new(8, 4);
        for c in PartClass::ALL {
            union.union_with(&m.class_mask(c));
        }
        assert_eq!(union, m.silhouette());
        assert_eq!(m.silhouette().count(), m.data().iter().filter(|&&l| l != 0).count());
        assert_eq!(m.class_mask(PartClass::Wheel).count(), 2);
        assert!(m.class_mask(PartClass::ChairArm).is_empty());
        assert!(LabelMap::empty(8, 8).silhouette().is_empty());
    }

    #[test]
    fn rejects_labels_outside_legend() {
        assert!(LabelMap::new(2, 1, vec![0, 5], BTreeMap::new()).is_err());
        assert!(LabelMap::new(2, 2, vec![0, 5], BTreeMap::new()).is_err());
    }

    #[test]
    fn pgm_round_trip_and_comments() {
        let m = sample();
        let back = LabelMap::from_pgm(&m.to_pgm(), &m.legend_text()).unwrap();
        assert_eq!(back, m);
        let mut with_comment = b"P5\n# made by hand\n2 1\n255\n".to_vec();
        with_comment.extend_from_slice(&[0, 4]);
        let l = LabelMap::from_pgm(&with_comment, "4 wheel\n").unwrap();
        assert_eq!(l.get(1, 0), 4);
        assert!(LabelMap::from_pgm(b"P2\n1 1\n255\n0", "").is_err());
        assert!(LabelMap::from_pgm(b"P5\n4 4\n255\n\0", "").is_err());
    }

    #[test]
    fn save_and_load_files() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("mask.pgm");
        sample().save(&p).unwrap();
        assert!(dir.path().join("mask.legend").exists());
        assert_eq!(LabelMap::load(&p).unwrap(), sample());
    }

    #[test]
    fn fit_square_preserves_aspect() {
        let m = LabelMap::new(4, 2, vec![1; 8], [(1, PartClass::BusBody)].into_iter().collect())
            .unwrap();
        let f = m.fit_square(8);
        assert_eq!(f.silhouette().count(), 32);
        assert_eq!(f.silhouette().bbox(), Some((0, 2, 7, 5)));
        assert_eq!(sample().to_class_labels().labels_present().len(), 2);
    }
}

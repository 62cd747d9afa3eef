//! Packed binary masks.

/// Row-major bit mask; bit `x` of row `y` is pixel `(x, y)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Mask {
    width: usize,
    height: usize,
    stride: usize,
    bits: Vec<u64>,
}

impl Mask {
    pub fn new(width: usize, height: usize) -> Self {
        let stride = width.div_ceil(64);
        Self {
            width,
            height,
            stride,
            bits: vec![0; stride * height],
        }
    }

    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                if f(x, y) {
                    m.set(x, y);
                }
            }
        }
        m
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn len(&self) -> usize {
        self.width * self.height
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    pub fn same_shape(&self, other: &Mask) -> bool {
        self.width == other.width && self.height == other.height
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> bool {
        self.bits[y * self.stride + x / 64] >> (x % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, x: usize, y: usize) {
        self.bits[y * self.stride + x / 64] |= 1 << (x % 64);
    }

    /// Sets pixels `x0..=x1` of row `y`.
    #[inline(always)]
    pub fn set_span(&mut self, y: usize, x0: usize, x1: usize) {
        debug_assert!(x0 <= x1 && x1 < self.width && y < self.height);
        let row = &mut self.bits[y * self.stride..(y + 1) * self.stride];
        let (w0, w1) = (x0 / 64, x1 / 64);
        let lo = !0u64 << (x0 % 64);
        let hi = !0u64 >> (63 - x1 % 64);
        if w0 == w1 {
            row[w0] |= lo & hi;
        } else {
            row[w0] |= lo;
            for w in &mut row[w0 + 1..w1] {
                *w = !0;
            }
            row[w1] |= hi;
        }
    }

    pub fn clear(&mut self) {
        self.bits.iter_mut().for_each(|w| *w = 0);
    }

    pub fn count(&self) -> usize {
        zip_popcount(&self.bits, &self.bits, |a, _| a)
    }

    fn zip_count(&self, other: &Mask, op: impl Fn(u64, u64) -> u64) -> usize {
        assert!(self.same_shape(other), "mask shapes differ");
        zip_popcount(&self.bits, &other.bits, op)
    }

    pub fn and_count(&self, other: &Mask) -> usize {
        self.zip_count(other, |a, b| a & b)
    }

    pub fn or_count(&self, other: &Mask) -> usize {
        self.zip_count(other, |a, b| a | b)
    }

    pub fn xor_count(&self, other: &Mask) -> usize {
        self.zip_count(other, |a, b| a ^ b)
    }

    pub fn union_with(&mut self, other: &Mask) {
        assert!(self.same_shape(other), "mask shapes differ");
        for (a, b) in self.bits.iter_mut().zip(&other.bits) {
            *a |= b;
        }
    }

    pub fn complement(&self) -> Mask {
        Mask::from_fn(self.width, self.height, |x, y| !self.get(x, y))
    }

    pub fn iter_set(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.height).flat_map(move |y| {
            (0..self.width).filter(move |&x| self.get(x, y)).map(move |x| (x, y))
        })
    }

    /// Mean pixel-center position `(x, y)`, or `None` for an empty mask.
    pub fn centroid(&self) -> Option<(f64, f64)> {
        let mut n = 0usize;
        let (mut sx, mut sy) = (0f64, 0f64);
        for (x, y) in self.iter_set() {
            n += 1;
            sx += x as f64 + 0.5;
            sy += y as f64 + 0.5;
        }
        (n > 0).then(|| (sx / n as f64, sy / n as f64))
    }

    /// Inclusive pixel bounds `(x0, y0, x1, y1)` of the set pixels.
    pub fn bbox(&self) -> Option<(usize, usize, usize, usize)> {
        let mut b: Option<(usize, usize, usize, usize)> = None;
        for (x, y) in self.iter_set() {
            b = Some(match b {
                None => (x, y, x, y),
                Some((x0, y0, x1, y1)) => (x0.min(x), y0.min(y), x1.max(x), y1.max(y)),
            });
        }
        b
    }
}

#[inline(always)]
fn popcount_generic(a: &[u64], b: &[u64], op: impl Fn(u64, u64) -> u64) -> usize {
    a.iter().zip(b).map(|(&x, &y)| op(x, y).count_ones() as usize).sum()
}

#[cfg(target_arch = "x86_64")]
#[target_feature(enable = "popcnt")]
unsafe fn popcount_hw(a: &[u64], b: &[u64], op: impl Fn(u64, u64) -> u64) -> usize {
    popcount_generic(a, b, op)
}

/// Popcount of `op` over paired words, using the hardware instruction when
/// the CPU has one (the default x86-64 target does not assume it).
fn zip_popcount(a: &[u64], b: &[u64], op: impl Fn(u64, u64) -> u64) -> usize {
    #[cfg(target_arch = "x86_64")]
    if std::arch::is_x86_feature_detected!("popcnt") {
        // SAFETY: the feature was detected at runtime
        return unsafe { popcount_hw(a, b, op) };
    }
    popcount_generic(a, b, op)
}

//! Three-class probability maps and their categorical views.
//!
//! Channel order is (background, contour, neuron) everywhere in memory; the
//! file layer maps PNG R, G, B onto these channels.

use crate::raster::BinaryMask;

/// Per-pixel channel sum tolerance accepted before renormalization, sized
/// for 8-bit quantization error.
pub const SUM_TOLERANCE: f64 = 0.02;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Channel {
    Background = 0,
    Contour = 1,
    Neuron = 2,
}

/// Pixel class of a categorical raster. `Background` doubles as the tissue
/// class of synthesized ground-truth masks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
#[repr(u8)]
pub enum PixelClass {
    Background = 0,
    Contour = 1,
    Neuron = 2,
}

impl PixelClass {
    pub fn channel_index(self) -> usize {
        self as usize
    }
}

/// Categorical H×W raster.
#[derive(Clone, PartialEq, Eq)]
pub struct ClassMap {
    width: u32,
    height: u32,
    classes: Vec<PixelClass>,
}

impl ClassMap {
    pub fn new(width: u32, height: u32) -> Self {
        assert!(width > 0 && height > 0);
        Self {
            width,
            height,
            classes: vec![PixelClass::Background; width as usize * height as usize],
        }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> PixelClass) -> Self {
        let mut map = Self::new(width, height);
        for y in 0..height {
            for x in 0..width {
                let idx = map.index(x, y);
                map.classes[idx] = f(x, y);
            }
        }
        map
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> PixelClass {
        self.classes[self.index(x, y)]
    }

    pub fn set(&mut self, x: u32, y: u32, class: PixelClass) {
        let idx = self.index(x, y);
        self.classes[idx] = class;
    }

    pub fn classes(&self) -> &[PixelClass] {
        &self.classes
    }

    /// Binary mask of the pixels carrying one class.
    pub fn class_mask(&self, class: PixelClass) -> BinaryMask {
        let mut i = 0;
        BinaryMask::from_fn(self.width, self.height, |_, _| {
            let hit = self.classes[i] == class;
            i += 1;
            hit
        })
    }

    pub fn count(&self, class: PixelClass) -> usize {
        self.classes.iter().filter(|&&c| c == class).count()
    }
}

impl std::fmt::Debug for ClassMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "ClassMap({}x{}, bg {} / contour {} / neuron {})",
            self.width,
            self.height,
            self.count(PixelClass::Background),
            self.count(PixelClass::Contour),
            self.count(PixelClass::Neuron)
        )
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ProbabilityMapError {
    #[error("channel value {value} at ({x}, {y}) lies outside [0, 1]")]
    ValueOutOfRange { x: u32, y: u32, value: f64 },
    #[error("channel sum {sum} at ({x}, {y}) outside 1 ± {SUM_TOLERANCE}")]
    BadChannelSum { x: u32, y: u32, sum: f64 },
    #[error("plane length {got} does not match {width}x{height}")]
    PlaneSizeMismatch { width: u32, height: u32, got: usize },
}

/// H×W×3 class probabilities, one f64 plane per channel.
#[derive(Clone, PartialEq)]
pub struct ProbabilityMap {
    width: u32,
    height: u32,
    planes: [Vec<f64>; 3],
}

impl ProbabilityMap {
    /// Validates ranges and per-pixel sums, then renormalizes every pixel to
    /// an exact unit sum.
    pub fn from_planes(
        width: u32,
        height: u32,
        background: Vec<f64>,
        contour: Vec<f64>,
        neuron: Vec<f64>,
    ) -> Result<Self, ProbabilityMapError> {
        let n = width as usize * height as usize;
        for plane in [&background, &contour, &neuron] {
            if plane.len() != n {
                return Err(ProbabilityMapError::PlaneSizeMismatch { width, height, got: plane.len() });
            }
        }
        let mut map = Self { width, height, planes: [background, contour, neuron] };
        for i in 0..n {
            let trio = [map.planes[0][i], map.planes[1][i], map.planes[2][i]];
            let x = (i % width as usize) as u32;
            let y = (i / width as usize) as u32;
            for v in trio {
                if !(0.0..=1.0).contains(&v) {
                    return Err(ProbabilityMapError::ValueOutOfRange { x, y, value: v });
                }
            }
            let sum = trio[0] + trio[1] + trio[2];
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(ProbabilityMapError::BadChannelSum { x, y, sum });
            }
            let fixed = renormalize_trio(trio);
            map.planes[0][i] = fixed[0];
            map.planes[1][i] = fixed[1];
            map.planes[2][i] = fixed[2];
        }
        Ok(map)
    }

    /// Builds from a per-pixel closure; the closure output is renormalized
    /// and must satisfy the same validity bounds as [`Self::from_planes`].
    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [f64; 3],
    ) -> Result<Self, ProbabilityMapError> {
        let n = width as usize * height as usize;
        let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
        for y in 0..height {
            for x in 0..width {
                let trio = f(x, y);
                planes[0].push(trio[0]);
                planes[1].push(trio[1]);
                planes[2].push(trio[2]);
            }
        }
        let [b, c, nn] = planes;
        Self::from_planes(width, height, b, c, nn)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        y as usize * self.width as usize + x as usize
    }

    pub fn channel(&self, channel: Channel) -> &[f64] {
        &self.planes[channel as usize]
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [f64; 3] {
        let i = self.index(x, y);
        [self.planes[0][i], self.planes[1][i], self.planes[2][i]]
    }
}

impl std::fmt::Debug for ProbabilityMap {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "ProbabilityMap({}x{})", self.width, self.height)
    }
}

/// Rescales a nonnegative trio to sum to exactly 1.0.
///
/// After the division the residual is folded into the neuron channel (or the
/// contour channel when the neuron mass is vanishing) in a way that makes the
/// left-to-right f64 sum exactly 1.0, so renormalization is idempotent
/// bit-for-bit.
pub fn renormalize_trio([b, c, n]: [f64; 3]) -> [f64; 3] {
    debug_assert!(b >= 0.0 && c >= 0.0 && n >= 0.0);
    let sum = b + c + n;
    if sum == 1.0 {
        return [b, c, n];
    }
    if sum <= 0.0 {
        return [1.0, 0.0, 0.0];
    }
    let b = b / sum;
    let c = c / sum;
    if b >= 1.0 {
        return [1.0, 0.0, 0.0];
    }
    let t = b + c;
    if t <= 1.0 {
        // b + c + (1 - t) sums to exactly 1.0 in f64
        [b, c, 1.0 - t]
    } else {
        // rounding pushed b + c above 1; the neuron share is ~0 anyway
        [b, 1.0 - b, 0.0]
    }
}

/// Per-pixel argmax over the three channels; ties break in channel order
/// background < contour < neuron.
pub fn argmax_class(pm: &ProbabilityMap) -> ClassMap {
    ClassMap::from_fn(pm.width(), pm.height(), |x, y| {
        let [b, c, n] = pm.get(x, y);
        let mut class = PixelClass::Background;
        let mut best = b;
        if c > best {
            class = PixelClass::Contour;
            best = c;
        }
        if n > best {
            class = PixelClass::Neuron;
        }
        class
    })
}

/// Binary mask of pixels whose argmax class is neuron or contour.
pub fn merged_mask(pm: &ProbabilityMap) -> BinaryMask {
    let classes = argmax_class(pm);
    let mut i = 0;
    BinaryMask::from_fn(pm.width(), pm.height(), |_, _| {
        let hit = classes.classes()[i] != PixelClass::Background;
        i += 1;
        hit
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn uniform(w: u32, h: u32, trio: [f64; 3]) -> ProbabilityMap {
        ProbabilityMap::from_fn(w, h, |_, _| trio).unwrap()
    }

    #[test]
    fn argmax_picks_the_largest_channel() {
        let pm = uniform(2, 2, [0.1, 0.2, 0.7]);
        assert_eq!(argmax_class(&pm).get(0, 0), PixelClass::Neuron);
        let pm = uniform(2, 2, [1.0, 0.0, 0.0]);
        assert_eq!(argmax_class(&pm).get(0, 0), PixelClass::Background);
    }

    #[test]
    fn argmax_tie_breaks_in_channel_order() {
        let pm = uniform(1, 1, [0.4, 0.4, 0.2]);
        assert_eq!(argmax_class(&pm).get(0, 0), PixelClass::Background);
    }

    #[test]
    fn merged_mask_is_contour_or_neuron() {
        let pm = ProbabilityMap::from_fn(3, 1, |x, _| match x {
            0 => [0.9, 0.05, 0.05],
            1 => [0.1, 0.8, 0.1],
            _ => [0.1, 0.1, 0.8],
        })
        .unwrap();
        let mask = merged_mask(&pm);
        assert!(!mask.get(0, 0));
        assert!(mask.get(1, 0));
        assert!(mask.get(2, 0));
    }

    #[test]
    fn merged_mask_of_pure_background_is_empty() {
        let pm = uniform(4, 4, [1.0, 0.0, 0.0]);
        assert!(!merged_mask(&pm).any_set());
    }

    #[test]
    fn out_of_tolerance_sum_is_rejected() {
        let err = ProbabilityMap::from_fn(1, 1, |_, _| [0.5, 0.3, 0.1]).unwrap_err();
        assert!(matches!(err, ProbabilityMapError::BadChannelSum { .. }));
    }

    #[test]
    fn renormalized_sums_are_exactly_one() {
        let cases = [
            [0.5, 0.3, 0.22],
            [1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0],
            [0.98, 0.01, 0.0],
            [0.0, 0.0, 1.01],
            [0.51, 0.50, 0.0],
        ];
        for trio in cases {
            let [b, c, n] = renormalize_trio(trio);
            assert_eq!(b + c + n, 1.0, "sum of {trio:?} after renormalization");
        }
    }

    proptest! {
        #[test]
        fn renormalization_is_idempotent(
            b in 0.0f64..1.0,
            c in 0.0f64..1.0,
            n in 0.0f64..1.0,
        ) {
            let once = renormalize_trio([b, c, n]);
            let twice = renormalize_trio(once);
            prop_assert_eq!(once, twice);
            prop_assert_eq!(once[0] + once[1] + once[2], 1.0);
        }
    }
}

//! Marker-controlled watershed by priority flooding.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::raster::{BinaryMask, Connectivity, LabelMap};

/// Elevation surface flooded by the watershed. Values must be finite.
#[derive(Debug, Clone)]
pub struct Topography {
    width: u32,
    height: u32,
    elevation: Vec<f64>,
}

impl Topography {
    pub fn new(width: u32, height: u32, elevation: Vec<f64>) -> Self {
        assert_eq!(elevation.len(), width as usize * height as usize);
        assert!(elevation.iter().all(|v| v.is_finite()), "elevation must be finite");
        Self { width, height, elevation }
    }

    pub fn from_fn(width: u32, height: u32, mut f: impl FnMut(u32, u32) -> f64) -> Self {
        let mut elevation = Vec::with_capacity(width as usize * height as usize);
        for y in 0..height {
            for x in 0..width {
                elevation.push(f(x, y));
            }
        }
        Self::new(width, height, elevation)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.elevation[y as usize * self.width as usize + x as usize]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum WatershedError {
    #[error("marker pixel ({x}, {y}) lies outside the flooding mask")]
    MarkerOutsideMask { x: u32, y: u32 },
}

// Queue entry ordered by (elevation, insertion sequence); BinaryHeap is a
// max-heap so the comparison is reversed to pop the lowest first.
struct FloodEntry {
    elevation: f64,
    seq: u64,
    idx: u32,
}

impl PartialEq for FloodEntry {
    fn eq(&self, other: &Self) -> bool {
        self.seq == other.seq
    }
}

impl Eq for FloodEntry {}

impl PartialOrd for FloodEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for FloodEntry {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .elevation
            .total_cmp(&self.elevation)
            .then_with(|| other.seq.cmp(&self.seq))
    }
}

/// Floods the topography from the marker pixels in increasing elevation
/// order (FIFO within equal elevation), restricted to the mask foreground.
///
/// Every mask pixel reachable from a marker receives exactly one marker
/// label; contested pixels go to the first-arriving basin. Marker pixels
/// keep their labels and pixels outside the mask stay 0. Markers are seeded
/// in raster order, which fixes the arrival order on flat plateaus.
pub fn seeded_watershed(
    topo: &Topography,
    markers: &LabelMap,
    mask: &BinaryMask,
    conn: Connectivity,
) -> Result<LabelMap, WatershedError> {
    let (w, h) = (mask.width(), mask.height());
    assert_eq!((topo.width(), topo.height()), (w, h), "topography size mismatch");
    assert_eq!((markers.width(), markers.height()), (w, h), "marker size mismatch");

    let mut out = markers.clone();
    let mut heap: BinaryHeap<FloodEntry> = BinaryHeap::new();
    let mut seq = 0u64;
    for y in 0..h {
        for x in 0..w {
            if markers.get(x, y) != 0 {
                if !mask.get(x, y) {
                    return Err(WatershedError::MarkerOutsideMask { x, y });
                }
                heap.push(FloodEntry { elevation: topo.get(x, y), seq, idx: out.index(x, y) as u32 });
                seq += 1;
            }
        }
    }

    while let Some(entry) = heap.pop() {
        let x = entry.idx % w;
        let y = entry.idx / w;
        let label = out.get(x, y);
        for &(dx, dy) in conn.offsets() {
            let nx = x as i64 + dx as i64;
            let ny = y as i64 + dy as i64;
            if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                continue;
            }
            let (nx, ny) = (nx as u32, ny as u32);
            if mask.get(nx, ny) && out.get(nx, ny) == 0 {
                out.set(nx, ny, label);
                heap.push(FloodEntry { elevation: topo.get(nx, ny), seq, idx: out.index(nx, ny) as u32 });
                seq += 1;
            }
        }
    }
    Ok(out)
}

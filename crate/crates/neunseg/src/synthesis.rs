//! Pixel-level ground-truth synthesis from point annotations and a binary
//! foreground segmentation: competitive region growing plus the inter-cell
//! contour class.

use crate::morph::{competitive_expansion, ExpansionSeed, UNLIMITED_STEPS};
use crate::probmap::{ClassMap, PixelClass};
use crate::raster::{BinaryMask, Connectivity, LabelMap, Point};

pub const DEFAULT_CONTOUR_THICKNESS: u32 = 4;

#[derive(Debug, Clone)]
pub struct RegionGrowth {
    pub labels: LabelMap,
    /// seeds that landed on background, reported and skipped
    pub skipped_seeds: Vec<Point>,
}

/// Competitive region growing: simultaneous 8-connected breadth-first
/// expansion from every seed, constrained to the binary foreground.
///
/// Seed `i` grows label `i + 1`; contested pixels go to the front arriving
/// first, ties within a step to the lower seed index. Foreground components
/// containing no seed stay background. Seeds must be unique and in bounds.
pub fn region_growing(binary: &BinaryMask, seeds: &[Point]) -> RegionGrowth {
    let mut skipped = Vec::new();
    let mut grown = Vec::new();
    let mut taken = std::collections::HashSet::new();
    for (i, p) in seeds.iter().enumerate() {
        assert!(p.x < binary.width() && p.y < binary.height(), "seed {p} out of bounds");
        debug_assert!(taken.insert(*p), "duplicate seed {p}");
        if !binary.get(p.x, p.y) {
            skipped.push(*p);
            continue;
        }
        grown.push(ExpansionSeed {
            label: i as u32 + 1,
            pixels: vec![*p],
            steps: UNLIMITED_STEPS,
        });
    }
    let labels = competitive_expansion(
        binary.width(),
        binary.height(),
        &grown,
        Connectivity::Eight.offsets(),
        Some(binary),
    );
    RegionGrowth { labels, skipped_seeds: skipped }
}

/// Inserts the inter-cell contour class between touching instances.
///
/// A foreground pixel becomes contour iff a pixel of a different label lies
/// within Chebyshev radius `thickness / 2`, giving a band of the configured
/// constant thickness astride every interface. Remaining foreground is
/// neuron, background is tissue.
pub fn contour_class(instances: &LabelMap, thickness: u32) -> ClassMap {
    assert!(
        thickness >= 2 && thickness.is_multiple_of(2),
        "contour thickness must be even and at least 2"
    );
    let radius = (thickness / 2) as i64;
    let (w, h) = (instances.width(), instances.height());
    ClassMap::from_fn(w, h, |x, y| {
        let label = instances.get(x, y);
        if label == 0 {
            return PixelClass::Background;
        }
        for dy in -radius..=radius {
            for dx in -radius..=radius {
                let nx = x as i64 + dx;
                let ny = y as i64 + dy;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                let other = instances.get(nx as u32, ny as u32);
                if other != 0 && other != label {
                    return PixelClass::Contour;
                }
            }
        }
        PixelClass::Neuron
    })
}

#[derive(Debug, Clone)]
pub struct Synthesis {
    /// instance ground truth for evaluation
    pub instances: LabelMap,
    /// three-class training target
    pub classes: ClassMap,
    pub skipped_seeds: Vec<Point>,
}

/// Region growing followed by contour insertion.
pub fn synthesize(binary: &BinaryMask, seeds: &[Point], thickness: u32) -> Synthesis {
    let growth = region_growing(binary, seeds);
    let classes = contour_class(&growth.labels, thickness);
    Synthesis {
        instances: growth.labels,
        classes,
        skipped_seeds: growth.skipped_seeds,
    }
}

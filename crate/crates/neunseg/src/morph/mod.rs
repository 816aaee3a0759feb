//! Binary morphology kernels: erosion, dilation, ultimate erosion with
//! residue lineage, dynamic reconstruction, distance transform, peak picking
//! and marker-controlled watershed.

mod distance;
mod watershed;

pub use distance::{distance_transform, local_maxima, DistanceMap};
pub use watershed::{seeded_watershed, Topography, WatershedError};

pub(crate) use distance::squared_distance_to_unset;

use crate::raster::{
    connected_components, BinaryMask, Connectivity, LabelMap, Point, StructuringElement,
};

/// Binary erosion. A pixel survives iff every offset of the structuring
/// element lands on a set pixel; the image border counts as background.
///
/// Since the structuring element is the closed disk of its radius, this is
/// a threshold on the squared distance to the nearest background pixel.
pub fn erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let r2 = u64::from(se.radius()) * u64::from(se.radius());
    let sq = squared_distance_to_unset(mask);
    let mut i = 0;
    BinaryMask::from_fn(mask.width(), mask.height(), |_, _| {
        let keep = sq[i] > r2;
        i += 1;
        keep
    })
}

/// Binary dilation. A pixel is set iff some offset of the structuring
/// element reaches a set input pixel.
pub fn dilate(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    let (w, h) = (mask.width(), mask.height());
    let mut out = BinaryMask::new(w, h);
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) {
                continue;
            }
            for &(dx, dy) in se.offsets() {
                let nx = x as i64 + dx as i64;
                let ny = y as i64 + dy as i64;
                if nx >= 0 && ny >= 0 && nx < w as i64 && ny < h as i64 {
                    out.set(nx as u32, ny as u32, true);
                }
            }
        }
    }
    out
}

/// The surviving core of one component after ultimate erosion.
///
/// `erosion_count` is the number of erosions applied to reach the residue's
/// stage, i.e. the number of dilations that restores its pre-erosion scale.
/// A component already smaller than one erosion step is its own residue with
/// `erosion_count` 0.
#[derive(Debug, Clone)]
pub struct UltimateResidue {
    pub label: u32,
    pub erosion_count: u32,
    pub pixels: Vec<Point>,
}

/// Iterated erosion with component lineage tracking.
///
/// At every step the current mask is eroded once more; a component whose
/// region contains no pixel of the next stage has reached its last non-empty
/// stage and is emitted as a residue. A component that splits continues
/// through its children, so each touching object yields its own residue.
/// Residues are labeled 1.. in discovery order (step, then raster order).
pub fn ultimate_erosion(
    mask: &BinaryMask,
    se: &StructuringElement,
    conn: Connectivity,
) -> Vec<UltimateResidue> {
    assert!(se.radius() >= 1, "ultimate erosion needs a structuring element radius of at least 1");
    let (w, h) = (mask.width(), mask.height());
    let mut residues = Vec::new();
    let mut current = mask.clone();
    let mut step = 0u32;

    while current.any_set() {
        let next = erode(&current, se);
        let components = connected_components(&current, conn);
        let n = components.max_label() as usize;
        let mut pixels: Vec<Vec<Point>> = vec![Vec::new(); n + 1];
        let mut survives = vec![false; n + 1];
        for y in 0..h {
            for x in 0..w {
                let label = components.get(x, y);
                if label != 0 {
                    pixels[label as usize].push(Point::new(x, y));
                    if next.get(x, y) {
                        survives[label as usize] = true;
                    }
                }
            }
        }
        for label in 1..=n {
            if !survives[label] {
                residues.push(UltimateResidue {
                    label: residues.len() as u32 + 1,
                    erosion_count: step,
                    pixels: std::mem::take(&mut pixels[label]),
                });
            }
        }
        current = next;
        step += 1;
    }
    residues
}

/// One competing region for [`competitive_expansion`].
pub(crate) struct ExpansionSeed {
    pub label: u32,
    pub pixels: Vec<Point>,
    /// number of expansion steps this region may take
    pub steps: u32,
}

pub(crate) const UNLIMITED_STEPS: u32 = u32::MAX;

/// Simultaneous multi-source expansion, one step at a time.
///
/// Per step every still-active region claims the unowned pixels reachable
/// from its front through `offsets` (restricted to `mask` foreground when a
/// mask is given). A pixel claimed by several regions in the same step goes
/// to the seed listed first, so callers pass seeds in ascending label order
/// to get the lower-label tie rule. Owned pixels are never overwritten.
pub(crate) fn competitive_expansion(
    width: u32,
    height: u32,
    seeds: &[ExpansionSeed],
    offsets: &[(i32, i32)],
    mask: Option<&BinaryMask>,
) -> LabelMap {
    let n = width as usize * height as usize;
    let mut out = LabelMap::new(width, height);
    let mut fronts: Vec<Vec<u32>> = Vec::with_capacity(seeds.len());
    for seed in seeds {
        let mut front = Vec::with_capacity(seed.pixels.len());
        for p in &seed.pixels {
            let idx = out.index(p.x, p.y);
            debug_assert_eq!(out.get(p.x, p.y), 0, "seed regions must be disjoint");
            out.set(p.x, p.y, seed.label);
            front.push(idx as u32);
        }
        fronts.push(front);
    }

    // claim bookkeeping reused across steps: claim_step[i] marks the step a
    // pixel was claimed in, claim_seed[i] the winning seed of that step
    let mut claim_step = vec![0u32; n];
    let mut claim_seed = vec![0u32; n];
    let mut newly: Vec<u32> = Vec::new();

    let mut step = 1u32;
    loop {
        newly.clear();
        let mut any_active = false;
        for (si, seed) in seeds.iter().enumerate() {
            if seed.steps < step || fronts[si].is_empty() {
                continue;
            }
            any_active = true;
            for &fi in &fronts[si] {
                let fx = (fi as usize % width as usize) as i64;
                let fy = (fi as usize / width as usize) as i64;
                for &(dx, dy) in offsets {
                    let nx = fx + dx as i64;
                    let ny = fy + dy as i64;
                    if nx < 0 || ny < 0 || nx >= width as i64 || ny >= height as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as u32, ny as u32);
                    if let Some(m) = mask {
                        if !m.get(nx, ny) {
                            continue;
                        }
                    }
                    if out.get(nx, ny) != 0 {
                        continue;
                    }
                    let qi = out.index(nx, ny);
                    if claim_step[qi] != step {
                        claim_step[qi] = step;
                        claim_seed[qi] = si as u32;
                        newly.push(qi as u32);
                    }
                }
            }
        }
        if !any_active || newly.is_empty() {
            break;
        }
        for front in fronts.iter_mut() {
            front.clear();
        }
        for &qi in &newly {
            let si = claim_seed[qi as usize] as usize;
            let x = (qi as usize % width as usize) as u32;
            let y = (qi as usize / width as usize) as u32;
            out.set(x, y, seeds[si].label);
            fronts[si].push(qi);
        }
        step += 1;
    }
    out
}

/// Dilates every residue `erosion_count` times with the structuring element,
/// expanding all residues simultaneously one step at a time. Contested
/// pixels go to the residue whose front reached them first; within a step,
/// ties break to the lower label.
pub fn dynamic_reconstruction(
    residues: &[UltimateResidue],
    se: &StructuringElement,
    width: u32,
    height: u32,
) -> LabelMap {
    let mut order: Vec<&UltimateResidue> = residues.iter().collect();
    order.sort_by_key(|r| r.label);
    let seeds: Vec<ExpansionSeed> = order
        .into_iter()
        .map(|r| ExpansionSeed {
            label: r.label,
            pixels: r.pixels.clone(),
            steps: r.erosion_count,
        })
        .collect();
    competitive_expansion(width, height, &seeds, se.offsets(), None)
}

//! Deterministic synthetic scenes: disk-shaped cells with optional touching
//! pairs, ground-truth instance labels, class masks, centroid annotations
//! and a derived probability map.
//!
//! Touching pairs carry a partial inter-cell ridge in the probability map:
//! the contour class dominates only the central part of the interface, the
//! way a predictor separates dense cells partially rather than entirely, so
//! the thresholded neuron channel stays connected across the pair while the
//! argmax neuron mask acquires the concavity the ultimate erosion needs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::probmap::{ClassMap, ProbabilityMap};
use crate::raster::{LabelMap, Point};
use crate::synthesis::{contour_class, DEFAULT_CONTOUR_THICKNESS};

const TISSUE: [f64; 3] = [0.95, 0.03, 0.02];
const NEURON: [f64; 3] = [0.05, 0.05, 0.90];
const RIDGE: [f64; 3] = [0.05, 0.55, 0.40];

/// Half-width of the partial ridge along the pair axis (pixels).
const RIDGE_HALF_WIDTH: f64 = 2.0;
/// Fraction of the interface chord covered by the ridge.
const RIDGE_COVERAGE: f64 = 0.6;

/// Smallest radius at which a touching pair is guaranteed to split under
/// the default structuring element.
const MIN_PAIR_RADIUS: u32 = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct SceneParams {
    pub width: u32,
    pub height: u32,
    pub cells: u32,
    pub radius_min: u32,
    pub radius_max: u32,
    /// fraction of cells placed as touching pairs
    pub touching_fraction: f64,
    /// minimum boundary gap between distinct cell groups
    pub gap: u32,
}

impl Default for SceneParams {
    fn default() -> Self {
        Self {
            width: 512,
            height: 512,
            cells: 40,
            radius_min: 12,
            radius_max: 18,
            touching_fraction: 0.0,
            gap: 3,
        }
    }
}

impl SceneParams {
    pub fn validate(&self) -> Result<(), String> {
        if self.width < 32 || self.height < 32 {
            return Err("scene must be at least 32x32".into());
        }
        if self.radius_min < 3 || self.radius_min > self.radius_max {
            return Err("need 3 <= radius-min <= radius-max".into());
        }
        if !(0.0..=1.0).contains(&self.touching_fraction) {
            return Err("touching-fraction must lie in [0, 1]".into());
        }
        if self.touching_fraction > 0.0 && self.radius_max < MIN_PAIR_RADIUS {
            return Err(format!(
                "touching pairs need radius-max >= {MIN_PAIR_RADIUS}"
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone)]
pub struct Scene {
    pub probability: ProbabilityMap,
    pub instances: LabelMap,
    pub classes: ClassMap,
    pub centroids: Vec<Point>,
}

#[derive(Debug, Clone, Copy)]
struct Disk {
    cx: f64,
    cy: f64,
    r: f64,
}

#[derive(Debug, Clone, Copy)]
struct Ridge {
    // midpoint of the pair axis, unit axis direction and chord coverage
    mx: f64,
    my: f64,
    ux: f64,
    uy: f64,
    half_chord: f64,
}

impl Ridge {
    fn between(a: Disk, b: Disk) -> Ridge {
        let dx = b.cx - a.cx;
        let dy = b.cy - a.cy;
        let d = (dx * dx + dy * dy).sqrt();
        let lens_half_height = (a.r * a.r - (d / 2.0) * (d / 2.0)).max(0.0).sqrt();
        Ridge {
            mx: (a.cx + b.cx) / 2.0,
            my: (a.cy + b.cy) / 2.0,
            ux: dx / d,
            uy: dy / d,
            half_chord: RIDGE_COVERAGE * lens_half_height,
        }
    }

    fn contains(&self, x: f64, y: f64) -> bool {
        let px = x - self.mx;
        let py = y - self.my;
        let along = px * self.ux + py * self.uy;
        let across = -px * self.uy + py * self.ux;
        along.abs() <= RIDGE_HALF_WIDTH && across.abs() <= self.half_chord
    }
}

struct Layout {
    disks: Vec<Disk>,
    // per disk, the index of the ridge it participates in
    disk_ridge: Vec<Option<usize>>,
    ridges: Vec<Ridge>,
}

fn rasterize(width: u32, height: u32, layout: &Layout) -> Scene {
    let mut instances = LabelMap::new(width, height);
    for y in 0..height {
        for x in 0..width {
            let mut best: Option<(f64, usize)> = None;
            for (i, d) in layout.disks.iter().enumerate() {
                let dx = x as f64 - d.cx;
                let dy = y as f64 - d.cy;
                let sq = dx * dx + dy * dy;
                if sq <= d.r * d.r && best.is_none_or(|(b, _)| sq < b) {
                    best = Some((sq, i));
                }
            }
            if let Some((_, i)) = best {
                instances.set(x, y, i as u32 + 1);
            }
        }
    }

    let classes = contour_class(&instances, DEFAULT_CONTOUR_THICKNESS);

    let n = width as usize * height as usize;
    let mut planes = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for y in 0..height {
        for x in 0..width {
            let label = instances.get(x, y);
            let trio = if label == 0 {
                TISSUE
            } else {
                let disk = label as usize - 1;
                let ridged = layout.disk_ridge[disk]
                    .map(|ri| layout.ridges[ri].contains(x as f64, y as f64))
                    .unwrap_or(false);
                if ridged {
                    RIDGE
                } else {
                    NEURON
                }
            };
            let i = y as usize * width as usize + x as usize;
            planes[0][i] = trio[0];
            planes[1][i] = trio[1];
            planes[2][i] = trio[2];
        }
    }
    for plane in planes.iter_mut() {
        *plane = blur_plane(plane, width as usize, height as usize);
    }
    let [bg, contour, neuron] = planes;
    let probability = ProbabilityMap::from_planes(width, height, bg, contour, neuron)
        .expect("synthetic probabilities stay within tolerance");

    let centroids = layout
        .disks
        .iter()
        .map(|d| Point::new(d.cx.round() as u32, d.cy.round() as u32))
        .collect();

    Scene { probability, instances, classes, centroids }
}

// separable 3x3 binomial blur with edge clamp
fn blur_plane(plane: &[f64], w: usize, h: usize) -> Vec<f64> {
    let mut tmp = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let at = |xx: isize| plane[y * w + xx.clamp(0, w as isize - 1) as usize];
            tmp[y * w + x] =
                0.25 * at(x as isize - 1) + 0.5 * at(x as isize) + 0.25 * at(x as isize + 1);
        }
    }
    let mut out = vec![0.0; w * h];
    for y in 0..h {
        for x in 0..w {
            let at = |yy: isize| tmp[yy.clamp(0, h as isize - 1) as usize * w + x];
            out[y * w + x] =
                0.25 * at(y as isize - 1) + 0.5 * at(y as isize) + 0.25 * at(y as isize + 1);
        }
    }
    out
}

fn clear_of_others(disks: &[Disk], candidate: Disk, gap: f64, skip_last: usize) -> bool {
    disks.iter().take(disks.len() - skip_last).all(|d| {
        let dx = d.cx - candidate.cx;
        let dy = d.cy - candidate.cy;
        let min = d.r + candidate.r + gap;
        dx * dx + dy * dy >= min * min
    })
}

/// Generates a random scene. Deterministic for a given seed.
///
/// Panics when the requested density cannot be placed; use a larger canvas
/// or fewer cells.
pub fn generate(params: &SceneParams, seed: u64) -> Scene {
    params.validate().expect("invalid scene parameters");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pairs = (f64::from(params.cells) * params.touching_fraction / 2.0).floor() as u32;
    let singles = params.cells - 2 * pairs;

    let mut layout = Layout { disks: Vec::new(), disk_ridge: Vec::new(), ridges: Vec::new() };
    let gap = f64::from(params.gap);
    let mut attempts = 0u32;
    let max_attempts = 200_000;

    for _ in 0..pairs {
        loop {
            attempts += 1;
            assert!(
                attempts < max_attempts,
                "could not place {} cells in {}x{}; lower the density",
                params.cells,
                params.width,
                params.height
            );
            let r = rng.gen_range(MIN_PAIR_RADIUS..=params.radius_max.max(MIN_PAIR_RADIUS));
            let d = f64::from(rng.gen_range(22..=2 * r - 4));
            let theta = rng.gen_range(0.0..std::f64::consts::PI);
            let margin = f64::from(r) + d / 2.0 + 4.0;
            if 2.0 * margin >= f64::from(params.width) || 2.0 * margin >= f64::from(params.height) {
                continue;
            }
            let mx = rng.gen_range(margin..f64::from(params.width) - margin);
            let my = rng.gen_range(margin..f64::from(params.height) - margin);
            let (ux, uy) = (theta.cos(), theta.sin());
            let a = Disk { cx: mx - ux * d / 2.0, cy: my - uy * d / 2.0, r: f64::from(r) };
            let b = Disk { cx: mx + ux * d / 2.0, cy: my + uy * d / 2.0, r: f64::from(r) };
            if clear_of_others(&layout.disks, a, gap, 0) && clear_of_others(&layout.disks, b, gap, 0)
            {
                let ridge = Ridge::between(a, b);
                layout.ridges.push(ridge);
                let ri = layout.ridges.len() - 1;
                layout.disks.push(a);
                layout.disks.push(b);
                layout.disk_ridge.push(Some(ri));
                layout.disk_ridge.push(Some(ri));
                break;
            }
        }
    }

    for _ in 0..singles {
        loop {
            attempts += 1;
            assert!(
                attempts < max_attempts,
                "could not place {} cells in {}x{}; lower the density",
                params.cells,
                params.width,
                params.height
            );
            let r = rng.gen_range(params.radius_min..=params.radius_max);
            let margin = r + 4;
            if 2 * margin >= params.width || 2 * margin >= params.height {
                continue;
            }
            let cx = f64::from(rng.gen_range(margin..params.width - margin));
            let cy = f64::from(rng.gen_range(margin..params.height - margin));
            let candidate = Disk { cx, cy, r: f64::from(r) };
            if clear_of_others(&layout.disks, candidate, gap, 0) {
                layout.disks.push(candidate);
                layout.disk_ridge.push(None);
                break;
            }
        }
    }

    rasterize(params.width, params.height, &layout)
}

/// Canonical two-disk fixture: equal disks of the given radius with centers
/// `center_distance` apart, joined by a partial 4-px contour ridge.
pub fn touching_pair(radius: u32, center_distance: u32) -> Scene {
    assert!(center_distance < 2 * radius, "disks must overlap");
    let pad = radius + 6;
    let width = center_distance + 2 * pad;
    let height = 2 * pad + 1;
    let cy = f64::from(pad);
    let a = Disk { cx: f64::from(pad), cy, r: f64::from(radius) };
    let b = Disk { cx: f64::from(pad + center_distance), cy, r: f64::from(radius) };
    let ridge = Ridge::between(a, b);
    let layout = Layout {
        disks: vec![a, b],
        disk_ridge: vec![Some(0), Some(0)],
        ridges: vec![ridge],
    };
    rasterize(width, height, &layout)
}

/// Single isolated disk, centered.
pub fn single_disk(radius: u32) -> Scene {
    let pad = radius + 6;
    let side = 2 * pad + 1;
    let c = f64::from(pad);
    let layout = Layout {
        disks: vec![Disk { cx: c, cy: c, r: f64::from(radius) }],
        disk_ridge: vec![None],
        ridges: vec![],
    };
    rasterize(side, side, &layout)
}

//! Independent oracle implementations for the integration suites.
//!
//! Everything here recomputes results straight from definitions (offset
//! scans, per-pixel sets, exhaustive matching) and shares no code with the
//! library paths it checks.

#![allow(dead_code)]

use std::collections::{BTreeMap, HashSet};

use neunseg::raster::{BinaryMask, Connectivity, LabelMap, Point, StructuringElement};
use rand::Rng;

// ---------------------------------------------------------------- morphology

/// Definition-level erosion: a pixel survives iff every structuring-element
/// offset lands on a set pixel, borders reading as background.
pub fn offset_erode(mask: &BinaryMask, se: &StructuringElement) -> BinaryMask {
    BinaryMask::from_fn(mask.width(), mask.height(), |x, y| {
        mask.get(x, y)
            && se
                .offsets()
                .iter()
                .all(|&(dx, dy)| mask.get_clipped(x as i64 + dx as i64, y as i64 + dy as i64))
    })
}

/// Stack-based component tracing, components listed in raster order of
/// their first pixel, pixels in raster order.
pub fn trace_components(mask: &BinaryMask, conn: Connectivity) -> Vec<Vec<Point>> {
    let (w, h) = (mask.width(), mask.height());
    let mut seen = vec![false; (w * h) as usize];
    let mut components = Vec::new();
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x, y) || seen[(y * w + x) as usize] {
                continue;
            }
            let mut stack = vec![(x, y)];
            seen[(y * w + x) as usize] = true;
            let mut pixels = Vec::new();
            while let Some((cx, cy)) = stack.pop() {
                pixels.push(Point::new(cx, cy));
                for &(dx, dy) in conn.offsets() {
                    let nx = cx as i64 + dx as i64;
                    let ny = cy as i64 + dy as i64;
                    if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                        continue;
                    }
                    let (nx, ny) = (nx as u32, ny as u32);
                    if mask.get(nx, ny) && !seen[(ny * w + nx) as usize] {
                        seen[(ny * w + nx) as usize] = true;
                        stack.push((nx, ny));
                    }
                }
            }
            pixels.sort_by_key(|p| (p.y, p.x));
            components.push(pixels);
        }
    }
    components
}

/// The literal erode-label-diff loop: erode until empty; a component of the
/// current stage with no pixel in the next stage is a residue whose count is
/// the number of erosions applied so far.
pub fn naive_ultimate_erosion(
    mask: &BinaryMask,
    se: &StructuringElement,
    conn: Connectivity,
) -> Vec<(Vec<Point>, u32)> {
    let mut residues = Vec::new();
    let mut current = mask.clone();
    let mut step = 0u32;
    while current.any_set() {
        let next = offset_erode(&current, se);
        for pixels in trace_components(&current, conn) {
            let survives = pixels.iter().any(|p| next.get(p.x, p.y));
            if !survives {
                residues.push((pixels, step));
            }
        }
        current = next;
        step += 1;
    }
    residues
}

/// O(n²) squared Euclidean distance to the nearest background pixel or the
/// border.
pub fn brute_force_squared_distance(mask: &BinaryMask) -> Vec<u64> {
    let (w, h) = (mask.width() as i64, mask.height() as i64);
    let mut out = vec![0u64; (w * h) as usize];
    for y in 0..h {
        for x in 0..w {
            if !mask.get(x as u32, y as u32) {
                continue;
            }
            let mut best = [x + 1, w - x, y + 1, h - y]
                .into_iter()
                .map(|d| (d * d) as u64)
                .min()
                .unwrap();
            for by in 0..h {
                for bx in 0..w {
                    if !mask.get(bx as u32, by as u32) {
                        best = best.min(((x - bx) * (x - bx) + (y - by) * (y - by)) as u64);
                    }
                }
            }
            out[(y * w + x) as usize] = best;
        }
    }
    out
}

// ------------------------------------------------------------------- metrics

pub type PixelSet = HashSet<(u32, u32)>;

/// Per-label pixel sets of a label map.
pub fn object_sets(lm: &LabelMap) -> BTreeMap<u32, PixelSet> {
    let mut objects: BTreeMap<u32, PixelSet> = BTreeMap::new();
    for y in 0..lm.height() {
        for x in 0..lm.width() {
            let label = lm.get(x, y);
            if label != 0 {
                objects.entry(label).or_default().insert((x, y));
            }
        }
    }
    objects
}

fn iou_parts(a: &PixelSet, b: &PixelSet) -> (u64, u64) {
    let inter = a.intersection(b).count() as u64;
    let union = (a.len() + b.len()) as u64 - inter;
    (inter, union)
}

// exact fraction comparison a1/b1 > a2/b2
fn frac_greater((a1, b1): (u64, u64), (a2, b2): (u64, u64)) -> bool {
    (a1 as u128) * (b2 as u128) > (a2 as u128) * (b1 as u128)
}

/// Exhaustive instance-F1 matcher: searches all one-to-one assignments of
/// ground truths to predictions whose IoU clears the threshold and takes the
/// maximum number of matches.
pub fn exhaustive_f1_seg(pred: &LabelMap, gt: &LabelMap, threshold: f64) -> (f64, f64, f64) {
    let pred_objects = object_sets(pred);
    let gt_objects = object_sets(gt);
    let pred_list: Vec<&PixelSet> = pred_objects.values().collect();
    let gt_list: Vec<&PixelSet> = gt_objects.values().collect();

    fn search(
        gi: usize,
        gt_list: &[&PixelSet],
        pred_list: &[&PixelSet],
        used: &mut Vec<bool>,
        threshold: f64,
    ) -> usize {
        if gi == gt_list.len() {
            return 0;
        }
        // skip this ground truth
        let mut best = search(gi + 1, gt_list, pred_list, used, threshold);
        for (pi, p) in pred_list.iter().enumerate() {
            if used[pi] {
                continue;
            }
            let (inter, union) = iou_parts(gt_list[gi], p);
            if (inter as f64) > threshold * union as f64 {
                used[pi] = true;
                best = best.max(1 + search(gi + 1, gt_list, pred_list, used, threshold));
                used[pi] = false;
            }
        }
        best
    }

    let mut used = vec![false; pred_list.len()];
    let tp = search(0, &gt_list, &pred_list, &mut used, threshold);
    let fp = pred_list.len() - tp;
    let fn_ = gt_list.len() - tp;
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    (precision, recall, f1)
}

/// Set-based AJI following the same assignment rule as the library but
/// recomputed from per-pixel sets with fresh IoU scans.
pub fn naive_aji(pred: &LabelMap, gt: &LabelMap) -> f64 {
    let preds = object_sets(pred);
    let gts = object_sets(gt);
    assert!(!gts.is_empty());
    let mut unassigned: Vec<u32> = preds.keys().copied().collect();
    let mut numerator = 0u64;
    let mut denominator = 0u64;
    for g in gts.values() {
        let mut best: Option<(usize, (u64, u64))> = None;
        for (i, p_label) in unassigned.iter().enumerate() {
            let (inter, union) = iou_parts(g, &preds[p_label]);
            if inter == 0 {
                continue;
            }
            if best.is_none_or(|(_, cur)| frac_greater((inter, union), cur)) {
                best = Some((i, (inter, union)));
            }
        }
        match best {
            Some((i, (inter, union))) => {
                numerator += inter;
                denominator += union;
                unassigned.remove(i);
            }
            None => denominator += g.len() as u64,
        }
    }
    for p_label in unassigned {
        denominator += preds[&p_label].len() as u64;
    }
    numerator as f64 / denominator as f64
}

/// Set-based detection counts.
pub fn naive_detection(pred: &LabelMap, centroids: &[Point]) -> (usize, usize, usize) {
    let objects = object_sets(pred);
    let mut tp = 0;
    let mut fp = 0;
    let mut fn_ = 0;
    for pixels in objects.values() {
        let hits = centroids.iter().filter(|c| pixels.contains(&(c.x, c.y))).count();
        match hits {
            0 => fp += 1,
            1 => tp += 1,
            n => fn_ += n,
        }
    }
    fn_ += centroids
        .iter()
        .filter(|c| objects.values().all(|pixels| !pixels.contains(&(c.x, c.y))))
        .count();
    (tp, fp, fn_)
}

/// Set-based Dice on label-map foregrounds.
pub fn naive_dice(pred: &LabelMap, gt: &LabelMap) -> f64 {
    let a: PixelSet = object_sets(pred).into_values().flatten().collect();
    let b: PixelSet = object_sets(gt).into_values().flatten().collect();
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(&b).count();
    2.0 * inter as f64 / (a.len() + b.len()) as f64
}

// ------------------------------------------------------------------ fixtures

pub fn disk_mask(w: u32, h: u32, cx: i64, cy: i64, r: i64) -> BinaryMask {
    BinaryMask::from_fn(w, h, |x, y| {
        let dx = x as i64 - cx;
        let dy = y as i64 - cy;
        dx * dx + dy * dy <= r * r
    })
}

/// Union of a few random disks, the blob family used by the erosion and
/// synthesis criteria.
pub fn random_blob_mask(rng: &mut impl Rng, max_side: u32) -> BinaryMask {
    let w = rng.gen_range(48..=max_side);
    let h = rng.gen_range(48..=max_side);
    let blobs = rng.gen_range(1..=8);
    let mut disks = Vec::new();
    for _ in 0..blobs {
        let r = rng.gen_range(3i64..=16);
        let cx = rng.gen_range(0..w as i64);
        let cy = rng.gen_range(0..h as i64);
        disks.push((cx, cy, r));
    }
    BinaryMask::from_fn(w, h, |x, y| {
        disks.iter().any(|&(cx, cy, r)| {
            let dx = x as i64 - cx;
            let dy = y as i64 - cy;
            dx * dx + dy * dy <= r * r
        })
    })
}

/// Random rectangle scene for the metric criteria; later labels overwrite
/// earlier ones. Not all labels need survive.
pub fn random_label_scene(rng: &mut impl Rng, w: u32, h: u32, max_objects: u32) -> LabelMap {
    let objects = rng.gen_range(0..=max_objects);
    let mut lm = LabelMap::new(w, h);
    for label in 1..=objects {
        let x0 = rng.gen_range(0..w.saturating_sub(3));
        let y0 = rng.gen_range(0..h.saturating_sub(3));
        let bw = rng.gen_range(2..=8.min(w - x0));
        let bh = rng.gen_range(2..=8.min(h - y0));
        for y in y0..y0 + bh {
            for x in x0..x0 + bw {
                lm.set(x, y, label);
            }
        }
    }
    lm
}

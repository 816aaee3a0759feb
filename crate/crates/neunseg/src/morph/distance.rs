//! Exact Euclidean distance transform and distance-map peak picking.

use crate::raster::{BinaryMask, Point, StructuringElement};

/// Per-pixel Euclidean distance to the nearest background pixel. Zero exactly
/// on background.
#[derive(Debug, Clone)]
pub struct DistanceMap {
    width: u32,
    height: u32,
    dist: Vec<f64>,
}

impl DistanceMap {
    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.dist[y as usize * self.width as usize + x as usize]
    }

    pub fn values(&self) -> &[f64] {
        &self.dist
    }
}

/// Squared Euclidean distance from every pixel to the nearest unset pixel,
/// with everything outside the image border counting as unset.
///
/// Column pass gives exact 1D distances; the row pass runs the
/// lower-envelope scan over parabolas. Envelope boundaries are computed in
/// f64 but every output is evaluated with integer arithmetic, so results are
/// exact (a misplaced boundary can only happen where two parabolas give the
/// same value).
pub(crate) fn squared_distance_to_unset(mask: &BinaryMask) -> Vec<u64> {
    let w = mask.width() as usize;
    let h = mask.height() as usize;
    let mut col = vec![0u64; w * h];

    for x in 0..w {
        // nearest unset at or above, border at y = -1
        let mut dist = 1u64;
        for y in 0..h {
            let i = y * w + x;
            if !mask.get(x as u32, y as u32) {
                col[i] = 0;
                dist = 1;
            } else {
                col[i] = dist;
                dist += 1;
            }
        }
        // nearest unset below, border at y = h
        let mut dist = 1u64;
        for y in (0..h).rev() {
            let i = y * w + x;
            if !mask.get(x as u32, y as u32) {
                dist = 1;
            } else {
                col[i] = col[i].min(dist);
                dist += 1;
            }
        }
        for y in 0..h {
            let i = y * w + x;
            col[i] *= col[i];
        }
    }

    let mut out = vec![0u64; w * h];
    let mut sites = vec![0usize; w + 1];
    let mut bounds = vec![0f64; w + 2];
    for y in 0..h {
        let row = &col[y * w..(y + 1) * w];
        lower_envelope(row, &mut sites, &mut bounds, &mut out[y * w..(y + 1) * w]);
        for x in 0..w {
            let border = (x as u64 + 1).min(w as u64 - x as u64);
            out[y * w + x] = out[y * w + x].min(border * border);
        }
    }
    out
}

/// 1D squared-distance lower envelope (Felzenszwalb & Huttenlocher).
fn lower_envelope(g: &[u64], sites: &mut [usize], bounds: &mut [f64], out: &mut [u64]) {
    let n = g.len();
    let mut k = 0usize;
    sites[0] = 0;
    bounds[0] = f64::NEG_INFINITY;
    bounds[1] = f64::INFINITY;
    for q in 1..n {
        let fq = g[q] as f64 + (q * q) as f64;
        loop {
            let v = sites[k];
            let s = (fq - (g[v] as f64 + (v * v) as f64)) / (2.0 * (q as f64 - v as f64));
            if s <= bounds[k] {
                if k == 0 {
                    break;
                }
                k -= 1;
            } else {
                k += 1;
                sites[k] = q;
                bounds[k] = s;
                bounds[k + 1] = f64::INFINITY;
                break;
            }
        }
    }
    let mut k = 0usize;
    for (q, out_q) in out.iter_mut().enumerate() {
        while bounds[k + 1] < q as f64 {
            k += 1;
        }
        let v = sites[k];
        let d = q.abs_diff(v) as u64;
        *out_q = d * d + g[v];
    }
}

/// Exact Euclidean distance from each foreground pixel to the nearest
/// background pixel or the image border.
pub fn distance_transform(mask: &BinaryMask) -> DistanceMap {
    let sq = squared_distance_to_unset(mask);
    DistanceMap {
        width: mask.width(),
        height: mask.height(),
        dist: sq.into_iter().map(|v| (v as f64).sqrt()).collect(),
    }
}

/// Peaks of a distance map.
///
/// A candidate peak is a foreground pixel whose value is ≥ every value within
/// Euclidean distance `min_distance`. Candidates are then kept greedily in
/// order of decreasing value (raster order on ties), rejecting any peak
/// closer than `min_distance` to an already accepted one.
pub fn local_maxima(dm: &DistanceMap, min_distance: u32) -> Vec<Point> {
    assert!(min_distance >= 1, "min_distance must be at least 1");
    let (w, h) = (dm.width(), dm.height());
    let mut window: Vec<(i32, i32)> = StructuringElement::disk(min_distance)
        .offsets()
        .iter()
        .copied()
        .filter(|&(dx, dy)| (dx, dy) != (0, 0))
        .collect();
    // near offsets first so non-peaks are rejected quickly
    window.sort_by_key(|&(dx, dy)| dx as i64 * dx as i64 + dy as i64 * dy as i64);

    let mut candidates: Vec<(f64, u32, u32)> = Vec::new();
    for y in 0..h {
        'pixels: for x in 0..w {
            let v = dm.get(x, y);
            if v <= 0.0 {
                continue;
            }
            for &(dx, dy) in &window {
                let nx = x as i64 + dx as i64;
                let ny = y as i64 + dy as i64;
                if nx < 0 || ny < 0 || nx >= w as i64 || ny >= h as i64 {
                    continue;
                }
                if dm.get(nx as u32, ny as u32) > v {
                    continue 'pixels;
                }
            }
            candidates.push((v, y, x));
        }
    }
    candidates.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let min_sq = u64::from(min_distance) * u64::from(min_distance);
    let mut accepted: Vec<Point> = Vec::new();
    for (_, y, x) in candidates {
        let far_enough = accepted.iter().all(|p| {
            let dx = p.x.abs_diff(x) as u64;
            let dy = p.y.abs_diff(y) as u64;
            dx * dx + dy * dy >= min_sq
        });
        if far_enough {
            accepted.push(Point::new(x, y));
        }
    }
    accepted
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::raster::BinaryMask;

    // O(n²) nearest-background scan, border included.
    fn brute_force_sq(mask: &BinaryMask) -> Vec<u64> {
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
                            let d = ((x - bx) * (x - bx) + (y - by) * (y - by)) as u64;
                            best = best.min(d);
                        }
                    }
                }
                out[(y * w + x) as usize] = best;
            }
        }
        out
    }

    fn disk_mask(w: u32, h: u32, cx: i64, cy: i64, r: i64) -> BinaryMask {
        BinaryMask::from_fn(w, h, |x, y| {
            let dx = x as i64 - cx;
            let dy = y as i64 - cy;
            dx * dx + dy * dy <= r * r
        })
    }

    #[test]
    fn all_background_is_zero() {
        let mask = BinaryMask::new(8, 8);
        let dm = distance_transform(&mask);
        assert!(dm.values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn single_pixel_has_distance_one() {
        let mut mask = BinaryMask::new(31, 31);
        mask.set(15, 15, true);
        let dm = distance_transform(&mask);
        assert_eq!(dm.get(15, 15), 1.0);
    }

    #[test]
    fn disk_center_distance_is_close_to_the_radius() {
        // 25x25 fixture, frozen from the brute-force oracle: the nearest
        // background pixel to the center of a radius-10 disk sits at offset
        // (10, 1), squared distance 101, so the value is within 1 px of the
        // disk radius.
        let mask = disk_mask(25, 25, 12, 12, 10);
        let brute = brute_force_sq(&mask);
        assert_eq!(brute[12 * 25 + 12], 101);
        let dm = distance_transform(&mask);
        assert_eq!(dm.get(12, 12), 101f64.sqrt());
        assert!((dm.get(12, 12) - 10.0).abs() <= 1.0 + 1e-9);
        // the center is the map's maximum
        let max = dm.values().iter().cloned().fold(0.0, f64::max);
        assert_eq!(max, dm.get(12, 12));
    }

    #[test]
    fn matches_brute_force_on_random_masks() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..20 {
            let w = rng.gen_range(1..=64);
            let h = rng.gen_range(1..=64);
            let density = rng.gen_range(0.2..0.9);
            let mask = BinaryMask::from_fn(w, h, |_, _| rng.gen_bool(density));
            let fast = squared_distance_to_unset(&mask);
            let brute = brute_force_sq(&mask);
            assert_eq!(fast, brute, "mismatch on {w}x{h} mask");
        }
    }

    #[test]
    fn peaks_of_zero_map_are_empty() {
        let mask = BinaryMask::new(16, 16);
        let dm = distance_transform(&mask);
        assert!(local_maxima(&dm, 20).is_empty());
    }

    #[test]
    fn two_far_disks_give_two_peaks() {
        let mut mask = disk_mask(100, 40, 20, 20, 10);
        let other = disk_mask(100, 40, 80, 20, 10);
        for y in 0..40 {
            for x in 0..100 {
                if other.get(x, y) {
                    mask.set(x, y, true);
                }
            }
        }
        let dm = distance_transform(&mask);
        let peaks = local_maxima(&dm, 20);
        assert_eq!(peaks.len(), 2);
        let near = |p: &Point, cx: u32, cy: u32| p.x.abs_diff(cx) <= 1 && p.y.abs_diff(cy) <= 1;
        assert!(peaks.iter().any(|p| near(p, 20, 20)));
        assert!(peaks.iter().any(|p| near(p, 80, 20)));
    }

    #[test]
    fn close_peaks_are_suppressed() {
        // two equal-height plateaus 5 px apart, spacing requirement 20
        let mut mask = BinaryMask::new(40, 20);
        for y in 5..15 {
            for x in 5..30 {
                mask.set(x, y, true);
            }
        }
        let dm = distance_transform(&mask);
        let peaks = local_maxima(&dm, 20);
        assert_eq!(peaks.len(), 1);
    }
}

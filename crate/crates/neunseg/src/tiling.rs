//! Overlapping tile planning, border down-weighting and seamless
//! reassembly of per-tile probability maps.

use crate::probmap::{renormalize_trio, ProbabilityMap};

pub const DEFAULT_PATCH_SIZE: u32 = 1344;
pub const DEFAULT_OVERLAP: u32 = 120;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TileRect {
    pub x0: u32,
    pub y0: u32,
    pub width: u32,
    pub height: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileGrid {
    pub tiles: Vec<TileRect>,
    pub cols: u32,
    pub rows: u32,
    /// effective tile size; equals the requested patch size unless the
    /// image is smaller along an axis
    pub tile_width: u32,
    pub tile_height: u32,
    pub overlap: u32,
}

fn axis_positions(len: u32, patch: u32, stride: u32) -> (u32, Vec<u32>) {
    if patch >= len {
        return (len, vec![0]);
    }
    let span = len - patch;
    let n = span.div_ceil(stride) + 1;
    let mut positions = Vec::with_capacity(n as usize);
    for i in 0..n {
        positions.push((i * stride).min(span));
    }
    (patch, positions)
}

/// Plans a grid of `patch_size`-sized tiles covering the image, consecutive
/// tiles overlapping by at least `overlap` pixels. The last tile per axis is
/// clamped flush to the image edge; a patch larger than the image shrinks to
/// the image along that axis.
pub fn plan_tiles(width: u32, height: u32, patch_size: u32, overlap: u32) -> TileGrid {
    assert!(width > 0 && height > 0, "image must be at least 1x1");
    assert!(patch_size > overlap, "patch size must exceed the overlap");
    let stride = patch_size - overlap;
    let (tile_width, xs) = axis_positions(width, patch_size, stride);
    let (tile_height, ys) = axis_positions(height, patch_size, stride);
    let mut tiles = Vec::with_capacity(xs.len() * ys.len());
    for &y0 in &ys {
        for &x0 in &xs {
            tiles.push(TileRect { x0, y0, width: tile_width, height: tile_height });
        }
    }
    TileGrid {
        cols: xs.len() as u32,
        rows: ys.len() as u32,
        tile_width,
        tile_height,
        overlap,
        tiles,
    }
}

/// Separable per-tile weights: 1 in the interior, ramping linearly down to
/// 1/(overlap+1) at the tile border over a band of `overlap` pixels.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightMap {
    width: u32,
    height: u32,
    weights: Vec<f64>,
}

fn axis_ramp(len: u32, overlap: u32) -> Vec<f64> {
    (0..len)
        .map(|i| {
            let border = i.min(len - 1 - i);
            if border >= overlap {
                1.0
            } else {
                (border + 1) as f64 / (overlap + 1) as f64
            }
        })
        .collect()
}

impl WeightMap {
    pub fn rect(width: u32, height: u32, overlap: u32) -> Self {
        let wx = axis_ramp(width, overlap);
        let wy = axis_ramp(height, overlap);
        let mut weights = Vec::with_capacity(width as usize * height as usize);
        for &row in &wy {
            for &col in &wx {
                weights.push(col * row);
            }
        }
        Self { width, height, weights }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f64 {
        self.weights[y as usize * self.width as usize + x as usize]
    }
}

/// Square weight map for one patch.
pub fn weight_map(patch_size: u32, overlap: u32) -> WeightMap {
    WeightMap::rect(patch_size, patch_size, overlap)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
pub enum StitchError {
    #[error("pixel ({x}, {y}) is covered by no tile")]
    CoverageGap { x: u32, y: u32 },
}

/// Reassembles per-tile probability maps into one canvas.
///
/// Every pixel becomes the weight-normalized average Σwᵢpᵢ/Σwᵢ of its
/// covering tiles, renormalized to unit channel sum. Where all contributions
/// agree bitwise the common value passes through untouched, so stitching the
/// output of a per-pixel predictor reproduces the whole-image prediction
/// exactly.
pub fn stitch(
    tiles: &[(TileRect, ProbabilityMap)],
    weights: &WeightMap,
    width: u32,
    height: u32,
) -> Result<ProbabilityMap, StitchError> {
    let n = width as usize * height as usize;
    let mut acc = [vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; n]];
    let mut first = [vec![0.0f64; n], vec![0.0f64; n], vec![0.0f64; n]];
    let mut wsum = vec![0.0f64; n];
    let mut seen = vec![false; n];
    let mut uniform = vec![true; n];

    for (rect, map) in tiles {
        assert_eq!(
            (map.width(), map.height()),
            (rect.width, rect.height),
            "tile map dimensions must match the tile rect"
        );
        assert!(
            rect.width == weights.width() && rect.height == weights.height(),
            "weight map dimensions must match the tile size"
        );
        assert!(
            rect.x0 + rect.width <= width && rect.y0 + rect.height <= height,
            "tile must lie inside the canvas"
        );
        for ty in 0..rect.height {
            for tx in 0..rect.width {
                let trio = map.get(tx, ty);
                let w = weights.get(tx, ty);
                let i = (rect.y0 + ty) as usize * width as usize + (rect.x0 + tx) as usize;
                if !seen[i] {
                    seen[i] = true;
                    first[0][i] = trio[0];
                    first[1][i] = trio[1];
                    first[2][i] = trio[2];
                } else if trio != [first[0][i], first[1][i], first[2][i]] {
                    uniform[i] = false;
                }
                acc[0][i] += w * trio[0];
                acc[1][i] += w * trio[1];
                acc[2][i] += w * trio[2];
                wsum[i] += w;
            }
        }
    }

    let mut planes = [Vec::with_capacity(n), Vec::with_capacity(n), Vec::with_capacity(n)];
    for i in 0..n {
        if !seen[i] {
            return Err(StitchError::CoverageGap {
                x: (i % width as usize) as u32,
                y: (i / width as usize) as u32,
            });
        }
        let trio = if uniform[i] {
            [first[0][i], first[1][i], first[2][i]]
        } else {
            renormalize_trio([acc[0][i] / wsum[i], acc[1][i] / wsum[i], acc[2][i] / wsum[i]])
        };
        planes[0].push(trio[0]);
        planes[1].push(trio[1]);
        planes[2].push(trio[2]);
    }
    let [b, c, nn] = planes;
    Ok(ProbabilityMap::from_planes(width, height, b, c, nn)
        .expect("stitched values stay within tolerance"))
}
